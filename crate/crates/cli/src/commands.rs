use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use ftbqc::brickwork::{run_mbqc_state, BrickworkLayout};
use ftbqc::compiler::{decompose, GateTally, Routed};
use ftbqc::ledger::reference_values::{self, CENSUS};
use ftbqc::ledger::{ratio_tables, Census, CostModel, Reports};
use ftbqc::protocol::{run_protocol, Backend, BufferMode, ChannelConfig, RunConfig, RunStatus, Variant, View};
use ftbqc::simcore::{fidelity, StateVector};

use crate::source::{output_dir, pad_layout, prepare, resolve, write, Prepared, BUILTINS};
use crate::{BackendArg, BufferArg, CliError, CompileArgs, EstimateArgs, FormatArg, ProtocolArg, RunArgs};

pub const REPORT_FORMAT_VERSION: u32 = 1;

fn census_line(c: &Census) -> String {
    format!("census (n, m, bricks, half_bricks, qubits) = ({}, {}, {}, {}, {})", c.rows, c.layers, c.bricks, c.half_bricks, c.qubits)
}

#[derive(Serialize)]
struct CompileReport<'a> {
    format_version: u32,
    circuit: String,
    source: GateTally,
    decomposed: GateTally,
    routed: GateTally,
    swaps: usize,
    initial_position: &'a [usize],
    final_position: &'a [usize],
    rows: usize,
    layers: usize,
    merged: usize,
    census: Census,
}

pub fn compile(args: CompileArgs) -> Result<(), CliError> {
    let p = prepare(resolve(&args.circuit)?)?;
    let (Some(circuit), Some(routed), Some(placement)) = (&p.circuit, &p.routed, &p.placement) else {
        return Err(CliError::Usage(format!("`{}` is a layout, not a circuit (built-ins: {BUILTINS})", args.circuit)));
    };
    let census = Census::of_layout(&p.layout);
    let report = CompileReport {
        format_version: REPORT_FORMAT_VERSION,
        circuit: p.name.clone(),
        source: circuit.tally(),
        decomposed: decompose(circuit).tally(),
        routed: routed.circuit.tally(),
        swaps: routed.swaps,
        initial_position: &routed.initial_position,
        final_position: &routed.final_position,
        rows: placement.rows,
        layers: placement.layers,
        merged: placement.merged,
        census,
    };
    let dir = output_dir(args.out_dir)?;
    let layout_path = write(&dir, &format!("{}.layout.json", p.name), &p.layout.to_json())?;
    let tally_path = write(&dir, &format!("{}.tally.json", p.name), &to_json(&report))?;
    let csv_path = write(&dir, &format!("{}.tally.csv", p.name), &versioned_csv(&report.decomposed.to_csv()))?;
    let t = &report.source;
    let d = &report.decomposed;
    println!("{}: {} wires, {} gates", p.name, circuit.wire_count(), circuit.gates().len());
    println!("  source:     {} Toffoli, {} CNOT, {} NOT, {} T", t.toffoli, t.cnot, t.not, t.t_count);
    println!("  decomposed: {} T, {} two-qubit Clifford, {} one-qubit Clifford", d.t_count, d.two_qubit_clifford(), d.one_qubit_clifford());
    println!("  routed:     {} swaps; packed into {} layers ({} gates merged)", routed.swaps, placement.layers, placement.merged);
    println!("{}", census_line(&census));
    for path in [layout_path, tally_path, csv_path] {
        println!("wrote {}", path.display());
    }
    Ok(())
}

/// Header row, then a `format_version` row, then the data.
fn versioned_csv(csv: &str) -> String {
    let (header, rest) = csv.split_once('\n').unwrap_or((csv, ""));
    format!("{header}\nformat_version,{REPORT_FORMAT_VERSION}\n{rest}")
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report serializes")
}

/// Keys accepted in a run configuration file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    seed: Option<u64>,
    protocol: Option<String>,
    backend: Option<Backend>,
    buffer_mode: Option<BufferMode>,
    physical_checks: Option<usize>,
    census: Option<String>,
    channel: Option<ChannelConfig>,
}

fn load_config(path: Option<&Path>) -> Result<FileConfig, CliError> {
    let Some(path) = path else { return Ok(FileConfig::default()) };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.to_path_buf(), source: e })?;
    toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn parse_input(arg: &str, rows: usize, seed: u64) -> Result<Option<StateVector>, CliError> {
    let bad = |e: ftbqc::simcore::SimError| CliError::Usage(format!("input `{arg}`: {e}"));
    Ok(match arg {
        "plus" => None,
        "zero" => Some(StateVector::new(rows).map_err(bad)?),
        "random" => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(5);
            Some(StateVector::random(rows, &mut rng).map_err(bad)?)
        }
        other => {
            let k = other
                .strip_prefix("basis:")
                .and_then(|k| k.parse().ok())
                .ok_or_else(|| CliError::Usage(format!("input `{other}` is not plus, zero, random or basis:<index>")))?;
            Some(StateVector::basis(rows, k).map_err(bad)?)
        }
    })
}

fn permute(state: &StateVector, position: &[usize]) -> StateVector {
    let src = state.amplitudes();
    let mut amps = src.to_vec();
    for (j, a) in src.iter().enumerate() {
        amps[Routed::permute_index(position, j)] = *a;
    }
    StateVector::from_amplitudes(amps).expect("same norm")
}

/// What the output should be: the source circuit when there is one and the
/// wire counts line up, otherwise a plain MBQC run of the layout.
fn reference(p: &Prepared, layout: &BrickworkLayout, input: &StateVector, seed: u64) -> Result<(String, StateVector), CliError> {
    if let (Some(c), Some(r)) = (&p.circuit, &p.routed) {
        if c.wire_count() == layout.rows() {
            // The protocol input was already placed on the physical wires.
            let mut logical = input.clone();
            let inverse: Vec<usize> = {
                let mut inv = vec![0; r.initial_position.len()];
                for (w, &q) in r.initial_position.iter().enumerate() {
                    inv[q] = w;
                }
                inv
            };
            logical = permute(&logical, &inverse);
            c.apply_to(&mut logical)?;
            return Ok(("source circuit".into(), permute(&logical, &r.final_position)));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (out, _) = run_mbqc_state(layout, input.clone(), &mut rng)?;
    Ok(("plain MBQC run".into(), out))
}

pub fn run(args: RunArgs) -> Result<(), CliError> {
    let file = load_config(args.config.as_deref())?;
    let seed = args.seed.or(file.seed).ok_or_else(|| CliError::Usage("a seed is required (--seed or `seed` in the config)".into()))?;
    let variant = match (args.protocol, &file.protocol) {
        (Some(ProtocolArg::Bfk), _) => Variant::BfkBasic,
        (Some(ProtocolArg::Protocol1), _) => Variant::Protocol1,
        (Some(ProtocolArg::Bsa), _) => Variant::Protocol2,
        (None, Some(s)) => s.parse()?,
        (None, None) => Variant::BfkBasic,
    };
    let backend = match args.backend {
        Some(BackendArg::Exact) => Backend::Exact,
        Some(BackendArg::Tally) => Backend::Tally,
        None => file.backend.unwrap_or_default(),
    };
    let buffer_mode = match args.buffer_mode {
        Some(BufferArg::EightQubit) => BufferMode::EightQubit,
        Some(BufferArg::MeasureAndDiscard) => BufferMode::MeasureAndDiscard,
        None => file.buffer_mode.unwrap_or_default(),
    };
    let mut channel = file.channel.unwrap_or_default();
    channel.depolarizing = args.depolarizing.unwrap_or(channel.depolarizing);
    channel.classical_loss = args.classical_loss.unwrap_or(channel.classical_loss);
    channel.max_retransmits = args.max_retransmits.unwrap_or(channel.max_retransmits);
    let cfg = RunConfig {
        backend,
        channel,
        buffer_mode,
        physical_checks: args.physical_checks.or(file.physical_checks).unwrap_or(0),
        forced_r: Vec::new(),
    };

    let p = prepare(resolve(&args.source)?)?;
    let layout = match args.census.as_ref().or(file.census.as_ref()) {
        Some(c) => pad_layout(&p.layout, &c.parse()?)?,
        None => p.layout.clone(),
    };
    let input = if backend == Backend::Exact { parse_input(&args.input, layout.rows(), seed)? } else { None };
    if backend == Backend::Tally && args.input != "plus" {
        return Err(CliError::Usage("the tally backend carries no amplitudes; drop --input".into()));
    }

    println!("{variant} on {} ({}x{}), {:?} backend, seed {seed}", p.name, layout.rows(), layout.layers(), backend);
    let out = run_protocol(variant, &layout, input.as_ref(), &cfg, seed)?;

    let dir = output_dir(args.out_dir)?;
    let stem = format!("{}.{}", p.name, variant);
    let transcript = write(&dir, &format!("{stem}.transcript.jsonl"), &out.transcript.to_jsonl(View::Bob))?;
    let omniscient = write(&dir, &format!("{stem}.omniscient.jsonl"), &out.transcript.to_jsonl(View::Omniscient))?;
    let ledger = write(&dir, &format!("{stem}.ledger.json"), &out.ledger.to_json())?;
    print!("{}", out.ledger.to_text());
    for c in &out.spot_checks {
        println!(
            "  spot check ({}, {}): θ={} δ={} noise {} → angle {}, fidelity {:.12}, outcome {}",
            c.x, c.y, c.theta, c.delta, c.noise, c.expected_angle, c.decoded_fidelity, u8::from(c.outcome)
        );
    }
    println!("transcript digest {}", out.digest);
    for path in [transcript, omniscient, ledger] {
        println!("wrote {}", path.display());
    }

    if let Some(output) = &out.output {
        let start = match &input {
            Some(s) => s.clone(),
            None => ftbqc::brickwork::product_input(&vec![ftbqc::simcore::Octant::ZERO; layout.rows()])?,
        };
        let (what, want) = reference(&p, &layout, &start, seed)?;
        let f = fidelity(output, &want).map_err(|e| CliError::Usage(e.to_string()))?;
        println!("fidelity vs {what}: {f:.12}");
    }
    match out.status {
        RunStatus::Success => {
            println!("status: success");
            Ok(())
        }
        RunStatus::Uncorrectable { coords } => {
            let list: Vec<String> = coords.iter().map(|c| c.to_string()).collect();
            println!("status: uncorrectable at {}", list.join(" "));
            Err(CliError::Uncorrectable)
        }
    }
}

#[derive(Serialize)]
struct EstimateDocument<'a> {
    format_version: u32,
    source: &'a str,
    census: Census,
    reports: &'a Reports,
    tables: &'a [ftbqc::ledger::RatioTable; 3],
}

pub fn estimate(args: EstimateArgs) -> Result<(), CliError> {
    let p = prepare(resolve(&args.source)?)?;
    let compiled = Census::of_layout(&p.layout);
    let census = match &args.census {
        Some(c) => c.parse()?,
        None => compiled,
    };
    let model = CostModel::steane();
    let target = p.target_tally();
    let reports = Reports::build(&model, &census, &target)?;
    let tables = ratio_tables(&reports, &target);

    match args.format {
        FormatArg::Json => {
            let doc = EstimateDocument { format_version: REPORT_FORMAT_VERSION, source: &p.name, census, reports: &reports, tables: &tables };
            println!("{}", to_json(&doc));
        }
        FormatArg::Csv => {
            for r in [&reports.bfk_basic, &reports.protocol1, &reports.protocol2, &reports.ft_circuit] {
                print!("{}", r.to_csv());
            }
            for t in &tables {
                println!("# {}", t.title);
                print!("{}", t.to_csv());
            }
        }
        FormatArg::Text => {
            if args.census.is_none() && (census.rows, census.layers) != CENSUS && p.name == "qcla10" {
                println!(
                    "note: census {}x{} comes from the greedy packer; the reference tables assume the hand-optimized {}x{} layout (pass --census {}x{})",
                    census.rows, census.layers, CENSUS.0, CENSUS.1, CENSUS.0, CENSUS.1
                );
            } else if args.census.is_none() {
                println!("note: census {}x{} comes from the greedy packer", census.rows, census.layers);
            }
            println!("{}", census_line(&census));
            println!(
                "target: {} T, {} two-qubit Clifford, {} one-qubit Clifford",
                target.t_count,
                target.two_qubit_clifford(),
                target.one_qubit_clifford()
            );
            for r in [&reports.bfk_basic, &reports.protocol1, &reports.protocol2, &reports.ft_circuit] {
                print!("{}", r.to_text());
            }
            let comparison = ftbqc::ledger::estimate(
                &model,
                ftbqc::ledger::Protocol::BfkFtComparison,
                ftbqc::ledger::EstimateInput::Census(&census),
            )?;
            print!("{}", comparison.to_text());
            for t in &tables {
                println!();
                print!("{}", t.to_text());
            }
        }
    }

    if args.paper_check {
        let lines = reference_values::compare(&model, &census, &reports, &tables);
        let bad: Vec<_> = lines.iter().filter(|l| !l.ok).collect();
        eprintln!("reference check: {}/{} match", lines.len() - bad.len(), lines.len());
        for l in &bad {
            eprintln!("  MISMATCH {}: expected {}, got {}", l.name, l.expected, l.actual);
        }
        if !bad.is_empty() {
            return Err(CliError::Mismatch(bad.len()));
        }
    }
    Ok(())
}
