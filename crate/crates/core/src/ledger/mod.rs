//! Exact resource accounting for the brickwork protocols and the plain
//! fault-tolerant circuit, and the ratio tables built from them.

mod cost;
mod estimate;
mod model;
pub mod reference_values;
mod tables;

pub use cost::{format_decimal, parse_decimal, CostVector};
pub use estimate::{estimate, Census, EstimateInput, PartyCost, Protocol, Report, Reports};
pub use model::CostModel;
pub use tables::{format_cell, ratio_cell, ratio_tables, RatioTable};

use thiserror::Error;

use crate::brickwork::BrickworkError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LedgerError {
    #[error("{0}")]
    Argument(String),
    #[error(transparent)]
    Brickwork(#[from] BrickworkError),
}
