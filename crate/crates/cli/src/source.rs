use std::path::{Path, PathBuf};

use ftbqc::brickwork::{BrickworkLayout, Coord};
use ftbqc::compiler::{compile, qcla_adder, CircuitIR, GateTally, Placement, Routed};
use ftbqc::ledger::Census;
use ftbqc::simcore::GateKind;

use crate::CliError;

/// Where a computation comes from: a circuit (file or built-in) or a ready layout.
pub enum Source {
    Circuit { name: String, circuit: CircuitIR },
    Layout { name: String, layout: BrickworkLayout },
}

/// A compiled or loaded layout plus what it came from.
pub struct Prepared {
    pub name: String,
    pub layout: BrickworkLayout,
    pub circuit: Option<CircuitIR>,
    pub routed: Option<Routed>,
    pub placement: Option<Placement>,
}

impl Prepared {
    /// Decomposed gate counts of the source circuit; zero for a bare layout.
    pub fn target_tally(&self) -> GateTally {
        self.circuit.as_ref().map(|c| ftbqc::compiler::decompose(c).tally()).unwrap_or_default()
    }
}

pub const BUILTINS: &str = "qcla:<bits>, toffoli, identity:<rows>x<layers>";

pub fn resolve(arg: &str) -> Result<Source, CliError> {
    if let Some(bits) = arg.strip_prefix("qcla:") {
        let bits: usize = bits.parse().map_err(|_| CliError::Usage(format!("`{arg}`: adder width is not a number")))?;
        return Ok(Source::Circuit { name: format!("qcla{bits}"), circuit: qcla_adder(bits)? });
    }
    if arg == "toffoli" {
        let mut c = CircuitIR::new(3);
        c.add(GateKind::Toffoli, &[0, 1, 2])?;
        return Ok(Source::Circuit { name: "toffoli".into(), circuit: c });
    }
    if let Some(shape) = arg.strip_prefix("identity:") {
        let census: Census = shape.parse()?;
        return Ok(Source::Layout {
            name: format!("identity{}x{}", census.rows, census.layers),
            layout: BrickworkLayout::identity(census.rows, census.layers)?,
        });
    }
    let path = Path::new(arg);
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.to_path_buf(), source: e })?;
    let name = path.file_stem().map_or("circuit".into(), |s| s.to_string_lossy().trim_end_matches(".layout").to_string());
    if path.extension().is_some_and(|e| e == "json") {
        Ok(Source::Layout { name, layout: BrickworkLayout::from_json(&text)? })
    } else {
        Ok(Source::Circuit { name, circuit: CircuitIR::parse(&text)? })
    }
}

pub fn prepare(source: Source) -> Result<Prepared, CliError> {
    Ok(match source {
        Source::Circuit { name, circuit } => {
            let (routed, placement) = compile(&circuit)?;
            Prepared { name, layout: placement.layout.clone(), circuit: Some(circuit), routed: Some(routed), placement: Some(placement) }
        }
        Source::Layout { name, layout } => Prepared { name, layout, circuit: None, routed: None, placement: None },
    })
}

/// The layout stretched to `census.layers` with identity layers appended.
pub fn pad_layout(layout: &BrickworkLayout, census: &Census) -> Result<BrickworkLayout, CliError> {
    if census.rows != layout.rows() || census.layers < layout.layers() {
        return Err(CliError::Usage(format!(
            "census {}x{} cannot hold the compiled {}x{} layout",
            census.rows,
            census.layers,
            layout.rows(),
            layout.layers()
        )));
    }
    let mut out = BrickworkLayout::identity(census.rows, census.layers)?;
    for x in 1..=4 * layout.layers() {
        for y in 1..=layout.rows() {
            let c = Coord::new(x, y);
            out.set_phi(c, layout.phi(c))?;
        }
    }
    Ok(out)
}

pub fn output_dir(flag: Option<PathBuf>) -> Result<PathBuf, CliError> {
    let dir = flag.unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).map_err(|e| CliError::Io { path: dir.clone(), source: e })?;
    Ok(dir)
}

pub fn write(dir: &Path, file: &str, contents: &str) -> Result<PathBuf, CliError> {
    let path = dir.join(file);
    std::fs::write(&path, contents).map_err(|e| CliError::Io { path: path.clone(), source: e })?;
    Ok(path)
}
