//! Workbench for fault-tolerant blind quantum computation on brickwork states.
//!
//! * [`simcore`]: dense statevector kernels.
//! * [`steane`]: physical-level [[7,1,3]] encoding and fault-tolerant gadgets.
//! * [`brickwork`]: brickwork geometry, measurement flow and MBQC execution.
//! * [`compiler`]: circuit IR, adder generator, decomposition, routing and brick packing.
//! * [`protocol`]: client/server protocol engines with transcripts.
//! * [`ledger`]: exact resource accounting and ratio tables.

pub mod simcore;
pub mod steane;
pub mod brickwork;
pub mod compiler;
pub mod ledger;
pub mod protocol;
