use std::path::Path;
use std::process::{Command, Output};

fn ftbqc(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ftbqc"))
        .args(args)
        .current_dir(dir)
        .env_remove("FTBQC_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn digest(o: &Output) -> String {
    stdout(o)
        .lines()
        .find_map(|l| l.strip_prefix("transcript digest "))
        .expect("digest line")
        .to_string()
}

/// Census numbers from "census (n, m, bricks, half_bricks, qubits) = (a, b, c, d, e)".
fn census(o: &Output) -> [u64; 5] {
    let line = stdout(o).lines().find(|l| l.starts_with("census (")).expect("census line").to_string();
    let nums: Vec<u64> = line.rsplit_once("= (").unwrap().1.trim_end_matches(')').split(", ").map(|s| s.parse().unwrap()).collect();
    nums.try_into().unwrap()
}

#[test]
fn compile_qcla10_census_is_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let o = ftbqc(dir.path(), &["compile", "qcla:10"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let [n, m, bricks, half, qubits] = census(&o);
    assert_eq!(n, 35);
    assert_eq!(qubits, n * (4 * m + 1));
    // Each layer tiles n rows with bricks and at most one half-brick.
    assert_eq!(2 * bricks + half, n * m);
    assert!(m <= 700, "{m} layers");
    for f in ["qcla10.layout.json", "qcla10.tally.json", "qcla10.tally.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let tally: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("qcla10.tally.json")).unwrap()).unwrap();
    assert_eq!(tally["format_version"], 1);
    assert_eq!(tally["decomposed"]["t_count"], 441);
    let csv = std::fs::read_to_string(dir.path().join("qcla10.tally.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().starts_with("format_version,"));
}

#[test]
fn compile_toffoli_fits_in_sixteen_layers() {
    let dir = tempfile::tempdir().unwrap();
    let o = ftbqc(dir.path(), &["compile", "toffoli"]);
    assert!(o.status.success());
    let [n, m, _, _, qubits] = census(&o);
    assert_eq!(n, 3);
    assert!(m <= 16);
    assert_eq!(qubits, 3 * (4 * m + 1));
}

#[test]
fn malformed_circuit_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.qc"), "WIRES 2\nCNOT 0 1\nFROBNICATE 0\n").unwrap();
    let o = ftbqc(dir.path(), &["compile", "bad.qc"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn compiled_layout_round_trips_through_run() {
    let dir = tempfile::tempdir().unwrap();
    assert!(ftbqc(dir.path(), &["compile", "toffoli"]).status.success());
    let o = ftbqc(dir.path(), &["run", "toffoli.layout.json", "--seed", "3", "--input", "basis:6"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("fidelity vs plain MBQC run: 1.0000000"), "{}", stdout(&o));
}

#[test]
fn exact_bfk_on_identity_layout() {
    let dir = tempfile::tempdir().unwrap();
    let o = ftbqc(dir.path(), &["run", "identity:2x1", "--protocol", "bfk", "--backend", "exact", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let f: f64 = out.lines().find_map(|l| l.split_once(": ").filter(|(k, _)| k.starts_with("fidelity")).map(|(_, v)| v.parse().unwrap())).unwrap();
    assert!(f >= 1.0 - 1e-9);
    for suffix in ["transcript.jsonl", "omniscient.jsonl", "ledger.json"] {
        assert!(dir.path().join(format!("identity2x1.bfk_basic.{suffix}")).exists());
    }
}

#[test]
fn toffoli_through_the_circuit_reference() {
    let dir = tempfile::tempdir().unwrap();
    for input in ["random", "basis:5", "zero", "plus"] {
        let o = ftbqc(dir.path(), &["run", "toffoli", "--seed", "11", "--input", input]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(stdout(&o).contains("fidelity vs source circuit: 1.0000000"), "{input}: {}", stdout(&o));
    }
}

#[test]
fn bsa_tally_on_qcla10_matches_reference_totals() {
    let dir = tempfile::tempdir().unwrap();
    let o = ftbqc(dir.path(), &["run", "qcla:10", "--protocol", "bsa", "--backend", "tally", "--census", "35x612", "--seed", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let ledger: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("qcla10.protocol2.ledger.json")).unwrap()).unwrap();
    let text = ledger.to_string();
    for total in ["7200060", "163887080", "38571750", "24343060"] {
        assert!(text.contains(total), "{total} missing");
    }
    assert!(stdout(&o).contains("bob_prep  T 7,200,060; 2q 163,887,080; 1q 38,571,750; meas 24,343,060"));
}

#[test]
fn same_seed_same_digest() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["run", "identity:3x2", "--protocol", "protocol1", "--seed", "5", "--depolarizing", "0.01"];
    let a = ftbqc(dir.path(), &args);
    let b = ftbqc(dir.path(), &args);
    assert_eq!(a.status.code(), b.status.code());
    assert_eq!(digest(&a), digest(&b));
    let c = ftbqc(dir.path(), &["run", "identity:3x2", "--protocol", "protocol1", "--seed", "6", "--depolarizing", "0.01"]);
    assert_ne!(digest(&a), digest(&c));
}

#[test]
fn seed_is_mandatory() {
    let dir = tempfile::tempdir().unwrap();
    let o = ftbqc(dir.path(), &["run", "identity:2x1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("seed"));
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.toml"),
        "seed = 9\nprotocol = \"bsa\"\nbackend = \"tally\"\nbuffer_mode = \"measure-and-discard\"\n[channel]\nclassical_loss = 0.0\n",
    )
    .unwrap();
    let o = ftbqc(dir.path(), &["run", "identity:2x1", "--config", "run.toml"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("buffer high-water 2 blocks"), "{}", stdout(&o));
    let o = ftbqc(dir.path(), &["run", "identity:2x1", "--config", "run.toml", "--buffer-mode", "eight-qubit"]);
    assert!(stdout(&o).contains("buffer high-water 8 blocks"));

    std::fs::write(dir.path().join("typo.toml"), "seed = 1\nbakend = \"tally\"\n").unwrap();
    let o = ftbqc(dir.path(), &["run", "identity:2x1", "--config", "typo.toml"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn lossy_classical_channel_aborts_with_code_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = ftbqc(dir.path(), &["run", "identity:2x1", "--seed", "1", "--classical-loss", "1.0"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn heavy_noise_is_uncorrectable_with_code_4() {
    let dir = tempfile::tempdir().unwrap();
    let o = ftbqc(dir.path(), &["run", "identity:2x2", "--protocol", "protocol1", "--backend", "tally", "--seed", "1", "--depolarizing", "0.5"]);
    assert_eq!(o.status.code(), Some(4), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("status: uncorrectable at"));
}

#[test]
fn out_dir_from_flag_and_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = ftbqc(dir.path(), &["compile", "toffoli", "--out-dir", "a/b"]);
    assert!(o.status.success());
    assert!(dir.path().join("a/b/toffoli.layout.json").exists());

    let o = Command::new(env!("CARGO_BIN_EXE_ftbqc"))
        .args(["compile", "toffoli"])
        .current_dir(dir.path())
        .env("FTBQC_OUT_DIR", "env_out")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(dir.path().join("env_out/toffoli.tally.json").exists());
}

#[test]
fn paper_check_passes_at_the_reference_census() {
    let dir = tempfile::tempdir().unwrap();
    let o = ftbqc(dir.path(), &["estimate", "qcla:10", "--paper-check", "--census", "35x612"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    for cell in ["97x", "258x", "1,041x", "287x", "160x", "875x", "1,515x", "1,826x", "1,735x", "189x", "1,685x", "281x", "313x"] {
        assert!(out.contains(cell), "{cell}");
    }
}

#[test]
fn paper_check_lists_cells_on_the_greedy_census() {
    let dir = tempfile::tempdir().unwrap();
    let o = ftbqc(dir.path(), &["estimate", "qcla:10", "--paper-check"]);
    assert_eq!(o.status.code(), Some(5));
    assert!(stderr(&o).contains("MISMATCH"));
    assert!(stdout(&o).contains("hand-optimized 35x612"), "{}", stdout(&o));
}

#[test]
fn estimate_on_empty_layout_prints_na() {
    let dir = tempfile::tempdir().unwrap();
    let o = ftbqc(dir.path(), &["estimate", "identity:2x1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("n/a"));
}

#[test]
fn estimate_formats() {
    let dir = tempfile::tempdir().unwrap();
    let o = ftbqc(dir.path(), &["estimate", "qcla:10", "--census", "35x612", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["format_version"], 1);
    assert_eq!(v["census"]["qubits"], 85715);
    let o = ftbqc(dir.path(), &["estimate", "qcla:10", "--census", "35x612", "--format", "csv"]);
    assert!(stdout(&o).contains("bfk_basic,bob,42840,106488,149940,85680,0"));
}

#[test]
fn verify_suites_pass() {
    let dir = tempfile::tempdir().unwrap();
    for suite in ["simcore", "brickwork", "equivalence", "blindness"] {
        let o = ftbqc(dir.path(), &["verify", suite]);
        assert_eq!(o.status.code(), Some(0), "{suite}: {}", stdout(&o));
        assert!(!stdout(&o).contains("FAIL"));
    }
}

#[test]
fn verify_steane_sweeps_all_84_cases() {
    let dir = tempfile::tempdir().unwrap();
    let o = ftbqc(dir.path(), &["verify", "steane"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let cases: usize = stdout(&o)
        .lines()
        .filter(|l| l.starts_with("PASS single-qubit errors"))
        .map(|l| l.split(": ").nth(1).unwrap().split(' ').next().unwrap().parse::<usize>().unwrap())
        .sum();
    assert_eq!(cases, 84);
}

#[test]
fn unknown_source_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = ftbqc(dir.path(), &["estimate", "qcla:abc"]);
    assert_eq!(o.status.code(), Some(2));
    let o = ftbqc(dir.path(), &["run", "identity:2x1", "--seed", "1", "--census", "3x5"]);
    assert_eq!(o.status.code(), Some(2));
}
