//! End-to-end runs of the `hovqe` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hovqe::encoding::{encode, EncodingKind};
use hovqe::hamiltonian::{assemble_with, demo_spec, kinetic_matrix, PowerConstruction};
use hovqe::pauli::PauliSum;
use hovqe::vqe::RunTrace;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn hovqe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hovqe")).args(args).output().expect("binary runs")
}

fn with_config(name: &str, extra: &[&str]) -> Output {
    let path = configs().join(name);
    let mut args = vec!["--config", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    hovqe(&args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("run.toml");
    std::fs::write(&p, text).unwrap();
    p
}

fn run_inline(text: &str, extra: &[&str]) -> (Output, tempfile::TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(dir.path(), text);
    let mut args = vec!["--config", p.to_str().unwrap()];
    args.extend_from_slice(extra);
    (hovqe(&args), dir)
}

/// Rows of `n,k,energy` output as numbers.
fn eigen_rows(text: &str) -> Vec<(usize, usize, f64)> {
    text.lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect()
}

#[test]
fn carbon10_eigensolve_row() {
    let o = with_config("carbon_eigensolve.toml", &["eigensolve"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).lines().any(|l| l == "8,3,-6.5364"), "{}", stdout(&o));
}

#[test]
fn single_state_is_the_diagonal_element() {
    let o = with_config("single_state.toml", &["eigensolve", "--full-precision"]);
    assert_eq!(code(&o), 0);
    let rows = eigen_rows(&stdout(&o));
    assert_eq!(rows.len(), 1);
    assert_eq!((rows[0].0, rows[0].1), (1, 0));
    // ħω (2·0 + 3/2) / 2 with ħω = 2
    assert!((rows[0].2 - 1.5).abs() < 1e-14);
}

#[test]
fn alpha_k1_stable_across_basis_size() {
    let o = with_config("alpha_eigensolve.toml", &["eigensolve", "--full-precision"]);
    assert_eq!(code(&o), 0);
    let rows = eigen_rows(&stdout(&o));
    let e = |n, k| rows.iter().find(|r| r.0 == n && r.1 == k).unwrap().2;
    assert!((e(8, 1) - e(16, 1)).abs() < 5e-4);
    assert!((e(8, 2) - e(16, 2)).abs() < 5e-4);
}

#[test]
fn full_precision_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let o = with_config(
        "carbon_eigensolve.toml",
        &["eigensolve", "--full-precision", "--out", dir.path().to_str().unwrap()],
    );
    let printed = eigen_rows(&stdout(&o));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("eigensolve.json")).unwrap()).unwrap();
    for (row, j) in printed.iter().zip(json.as_array().unwrap()) {
        assert_eq!(row.2, j["energy"].as_f64().unwrap());
    }
}

const GRAY_PRINTED: [(&str, f64); 10] = [
    ("II", 33.556),
    ("IZ", -16.133),
    ("ZI", -0.004),
    ("ZZ", -8.073),
    ("XI", -17.586),
    ("XZ", 7.959),
    ("ZX", 8.801),
    ("IX", -8.801),
    ("XX", -0.014),
    ("YY", -0.006),
];

#[test]
fn gray_listing_of_the_reference_example() {
    let o = with_config("worked_example.toml", &["encode"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 10);
    for (p, c) in GRAY_PRINTED {
        let line = lines.iter().find(|l| l.split_whitespace().nth(1) == Some(p)).unwrap();
        let got: f64 = line.split_whitespace().next().unwrap().parse().unwrap();
        // the reference identity coefficient is 0.003 below the computed one
        let tol = if p == "II" { 4e-3 } else { 1.0005e-3 };
        assert!((got - c).abs() <= tol, "{p}: {got} vs {c}");
    }
}

#[test]
fn listing_is_half_even_rounding_of_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = with_config("demo_encode.toml", &["encode", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let sum: PauliSum =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("encode.json")).unwrap()).unwrap();
    let text = stdout(&o);
    assert_eq!(text, std::fs::read_to_string(dir.path().join("encode.txt")).unwrap());
    for ((p, c), line) in sum.iter().zip(text.lines()) {
        let mut f = line.split_whitespace();
        let printed: f64 = f.next().unwrap().parse().unwrap();
        assert_eq!(f.next().unwrap(), p.to_string());
        assert!((printed - c).abs() <= 5e-4 + 1e-12);
    }
}

#[test]
fn encode_json_reloads_to_the_library_sum() {
    let dir = tempfile::tempdir().unwrap();
    let o = with_config("demo_encode.toml", &["encode", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(dir.path().join("encode.json")).unwrap();
    let reloaded: PauliSum = serde_json::from_str(&text).unwrap();
    let h = assemble_with(&demo_spec(), PowerConstruction::Padded).unwrap();
    assert_eq!(reloaded, encode(&h, EncodingKind::Gray, 2).unwrap());
    assert_eq!(serde_json::to_string_pretty(&reloaded).unwrap() + "\n", text);
}

#[test]
fn zero_potential_gives_kinetic_only_sum() {
    let cfg = "[hamiltonian]\nsystem = \"custom\"\na_target = 4\nhbar_omega = 12.0\n\
               potential = { kind = \"exponential\", v0 = 0.0, c = 0.05 }\n\
               [encode]\nn = 2\nk = 1\nencoding = \"binary\"\n";
    let (o, dir) = run_inline(cfg, &["encode", "--out"]);
    assert_eq!(code(&o), 2, "--out needs a value");
    let out = dir.path().join("out");
    let (o, _d) = run_inline(cfg, &["encode", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let got: PauliSum = serde_json::from_str(&std::fs::read_to_string(out.join("encode.json")).unwrap()).unwrap();
    let want = encode(&kinetic_matrix(2, 12.0), EncodingKind::Binary, 1).unwrap();
    assert!(got.approx_eq(&want, 1e-12));
}

#[test]
fn counts_all_match() {
    let dir = tempfile::tempdir().unwrap();
    let o = with_config("counts.toml", &["counts", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).lines().all(|l| l.ends_with(" 0 mismatches")));
    let csv = std::fs::read_to_string(dir.path().join("counts.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "encoding,n_qubits,dim,k,quantity,formula,enumerated,match");
    assert!(lines.clone().all(|l| l.ends_with(",true")));
    assert!(lines.clone().any(|l| l == "onehot,4,4,2,pauli_terms,15,15,true"));
    // Gray n=4: every count is flat from K = 8 on
    for q in ["pauli_terms", "qc_sets", "dgc_sets", "two_qubit_gates"] {
        let vals: Vec<&str> = lines
            .clone()
            .filter(|l| l.starts_with("gray,4,16,") && l.contains(&format!(",{q},")))
            .filter(|l| l.split(',').nth(3).unwrap().parse::<usize>().unwrap() >= 8)
            .map(|l| l.split(',').nth(5).unwrap())
            .collect();
        assert_eq!(vals.len(), 9);
        assert!(vals.windows(2).all(|w| w[0] == w[1]), "{q}: {vals:?}");
    }
}

#[test]
fn groups_for_the_demo_system() {
    let o = with_config("demo_encode.toml", &["groups"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).ends_with("4 groups, 10 terms, 1 two-qubit gates\n"), "{}", stdout(&o));
    let qc = "[groups]\nscheme = \"qc\"\n";
    let (o, _d) = run_inline(qc, &["groups"]);
    assert!(stdout(&o).contains("5 groups, 10 terms"), "{}", stdout(&o));
}

#[test]
fn tables_reference_entries() {
    let o = with_config("tables.toml", &["tables"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let section = |title: &str| {
        let start = text.find(title).unwrap();
        let end = text[start + 1..].find("== ").map_or(text.len(), |e| start + 1 + e);
        text[start..end].to_string()
    };
    let gray2 = section("== gray code, N=4,");
    assert!(gray2.contains("  |0><1| + h.c.: 0.500 XI + 0.500 XZ\n"), "{gray2}");
    let bin3 = section("== binary code, N=8,");
    assert!(bin3.contains("alternate representation: 1,3,1,7,1,3,1\n"));
    let oh = section("== onehot code, N=4,");
    assert!(oh.contains("  |0><0|: 0.500 IIII - 0.500 ZIII\n"), "{oh}");
}

#[test]
fn smoke_vqe_has_one_record() {
    let dir = tempfile::tempdir().unwrap();
    let o = with_config("vqe_smoke.toml", &["vqe", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let csv = std::fs::read_to_string(dir.path().join("trace_seed3.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    let trace: RunTrace =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("run_seed3.json")).unwrap()).unwrap();
    assert_eq!(trace.records.len(), 1);
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let o = with_config("vqe_smoke.toml", &["vqe", "--seed", "11", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("seed 11:"));
    assert!(dir.path().join("trace_seed11.csv").exists());
    assert!(!dir.path().join("trace_seed3.csv").exists());
}

fn summary_mean(line: &str) -> f64 {
    line.split("mean ").nth(1).unwrap().split_whitespace().next().unwrap().parse().unwrap()
}

fn summary_std(line: &str) -> f64 {
    line.split("± ").nth(1).unwrap().split_whitespace().next().unwrap().parse().unwrap()
}

#[test]
fn carbon10_preset_converges() {
    let o = with_config("vqe_carbon10.toml", &["vqe", "--full-precision"]);
    assert_eq!(code(&o), 0);
    let line = stdout(&o);
    assert!((summary_mean(&line) - -6.5364).abs() < 1e-3, "{line}");
}

#[test]
fn alpha16_shot_preset_within_three_sigma() {
    let o = with_config("vqe_alpha16_shots.toml", &["vqe", "--seed", "1", "--full-precision"]);
    assert_eq!(code(&o), 0);
    let line = stdout(&o);
    let (mean, std) = (summary_mean(&line), summary_std(&line));
    assert!((mean - -18.9470).abs() < 3.0 * std, "{line}");
}

#[test]
fn runs_are_deterministic() {
    for (cfg, cmd) in [("vqe_alpha16_shots.toml", "vqe"), ("counts.toml", "counts")] {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let oa = with_config(cfg, &[cmd, "--out", a.path().to_str().unwrap()]);
        let ob = with_config(cfg, &[cmd, "--out", b.path().to_str().unwrap()]);
        assert_eq!(oa.stdout, ob.stdout);
        let mut names: Vec<_> = std::fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
        names.sort();
        assert!(!names.is_empty());
        for n in names {
            assert_eq!(std::fs::read(a.path().join(&n)).unwrap(), std::fs::read(b.path().join(&n)).unwrap());
        }
    }
}

#[test]
fn unknown_key_is_a_config_error() {
    let (o, _d) = run_inline("[encode]\nn = 4\nbogus = 1\n", &["encode"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus"));
    assert!(o.stdout.is_empty());
    let (o, _d) = run_inline("[hamiltonian]\nsystem = \"carbon\"\na_target = 10\nextra = 2\n", &["eigensolve"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn validation_failure_writes_nothing() {
    let cfg = "[vqe]\nn = 4\nk = 2\n[[vqe.stages]]\nk = 2\niterations = 0\nmethod = \"spsa\"\nmode = \"exact\"\n";
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(dir.path(), cfg);
    let out = dir.path().join("out");
    let o = hovqe(&["--config", p.to_str().unwrap(), "--out", out.to_str().unwrap(), "vqe"]);
    assert_eq!(code(&o), 2);
    assert!(o.stdout.is_empty());
    assert!(!out.exists());

    let o = hovqe(&["--config", p.to_str().unwrap(), "--out", out.to_str().unwrap(), "eigensolve"]);
    assert_eq!(code(&o), 0, "other sections keep their defaults");
    assert!(out.join("eigensolve.csv").exists());
}

#[test]
fn invalid_specs_exit_with_config_code() {
    for cfg in [
        "[eigensolve]\nn = [0]\nk = [1]\n",
        "[eigensolve]\nn = []\n",
        "[encode]\nn = 3\nk = 1\nencoding = \"gray\"\n",
        "[vqe]\npreset = { system = \"alpha\", hbar_omega = 14, k = 1, n = 8 }\n",
        "[vqe]\npreset = { system = \"carbon\", a_target = 10, n = 8 }\nn = 8\n",
        "[counts]\nn_max = 9\n",
        "seed = -1\n",
    ] {
        let cmd = if cfg.contains("[eigensolve]") {
            "eigensolve"
        } else if cfg.contains("[encode]") {
            "encode"
        } else if cfg.contains("[counts]") {
            "counts"
        } else {
            "vqe"
        };
        let (o, _d) = run_inline(cfg, &[cmd]);
        assert_eq!(code(&o), 2, "{cfg}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn io_failures_exit_with_io_code() {
    let o = hovqe(&["--config", "/nonexistent/run.toml", "encode"]);
    assert_eq!(code(&o), 4);
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let o = hovqe(&["encode", "--out", blocker.join("sub").to_str().unwrap()]);
    assert_eq!(code(&o), 4);
    assert!(o.stdout.is_empty());
}

#[test]
fn usage_errors_exit_with_config_code() {
    assert_eq!(code(&hovqe(&["frobnicate"])), 2);
    assert_eq!(code(&hovqe(&[])), 2);
    assert_eq!(code(&hovqe(&["encode", "--seed", "x"])), 2);
    assert_eq!(code(&hovqe(&["--help"])), 0);
}
