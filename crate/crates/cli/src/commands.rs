//! Subcommand bodies. Each returns its stdout text and output files; nothing is
//! written until the whole command has succeeded.

use hovqe::encoding::{
    alternate_representation, encode, encode_onehot, flip_string_table, ladder_operator, number_operator,
    term_count_compact, term_count_onehot, CodeTable, EncodingKind,
};
use hovqe::grouping::{
    dgc_count, dgc_groups, group, qc_count_binary, qc_count_gray, qc_groups, twoqubit_count_binary,
    twoqubit_count_gray, QcHint,
};
use hovqe::hamiltonian::{assemble_sized, assemble_with, lowest_eigenvalue, RealMatrix};
use hovqe::pauli::PauliSum;
use hovqe::vqe::{preset_schedule, run_schedule, AnsatzConfig, Mode, RunTrace, VqeConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::format::{coeff3, energy, join};

/// Seed used when neither the config nor the command line sets one.
pub const DEFAULT_SEED: u64 = 1;

/// Options shared by every subcommand.
#[derive(Debug, Clone, Copy, Default)]
pub struct Ctx {
    pub full_precision: bool,
    pub seed: Option<u64>,
}

#[derive(Debug, Default)]
pub struct Output {
    pub stdout: String,
    /// File name and contents, written under `--out` when given.
    pub files: Vec<(String, String)>,
    /// Raised after the output is emitted, e.g. a formula mismatch.
    pub failure: Option<CliError>,
}

fn config_err<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Config(msg.into()))
}

fn json<T: Serialize + ?Sized>(v: &T) -> CliResult<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

/// One line per term: 3-decimal coefficient, then the Pauli string.
pub fn listing(sum: &PauliSum) -> String {
    sum.iter().map(|(p, c)| format!("{:>9} {p}\n", coeff3(*c))).collect()
}

/// Single-line form such as `0.500 XI + 0.500 XZ`.
fn inline(sum: &PauliSum) -> String {
    let mut s = String::new();
    for (i, (p, c)) in sum.iter().enumerate() {
        let v = coeff3(*c);
        match (i, v.strip_prefix('-')) {
            (0, _) => s.push_str(&format!("{v} {p}")),
            (_, Some(abs)) => s.push_str(&format!(" - {abs} {p}")),
            (_, None) => s.push_str(&format!(" + {v} {p}")),
        }
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

#[derive(Serialize)]
struct EigenRow {
    n: usize,
    k: usize,
    energy: f64,
}

pub fn eigensolve(cfg: &RunConfig, ctx: Ctx) -> CliResult<Output> {
    let e = &cfg.eigensolve;
    if e.n.is_empty() || e.k.is_empty() {
        return config_err("[eigensolve] needs non-empty n and k lists");
    }
    let mut jobs = Vec::new();
    for &n in &e.n {
        for &k in &e.k {
            if n == 0 {
                return config_err("[eigensolve] basis size must be at least 1");
            }
            let spec = cfg.hamiltonian.spec(n.max(2), k).map_err(|err| err.context(&format!("N={n} K={k}")))?;
            jobs.push((n, k, spec));
        }
    }
    let rows: Vec<EigenRow> = jobs
        .par_iter()
        .map(|(n, k, spec)| {
            let m = assemble_sized(spec, *n, e.construction)?;
            Ok(EigenRow { n: *n, k: *k, energy: lowest_eigenvalue(&m)? })
        })
        .collect::<CliResult<_>>()?;

    let mut stdout = String::from("n,k,energy\n");
    let mut csv = String::from("n,k,energy\n");
    for r in &rows {
        stdout.push_str(&format!("{},{},{}\n", r.n, r.k, energy(r.energy, ctx.full_precision)));
        csv.push_str(&format!("{},{},{:?}\n", r.n, r.k, r.energy));
    }
    Ok(Output {
        stdout,
        files: vec![("eigensolve.csv".into(), csv), ("eigensolve.json".into(), json(&rows)?)],
        failure: None,
    })
}

pub fn encode_cmd(cfg: &RunConfig, _ctx: Ctx) -> CliResult<Output> {
    let e = &cfg.encode;
    let spec = cfg.hamiltonian.spec(e.n, e.k)?;
    let h = assemble_with(&spec, e.construction)?;
    let sum = encode(&h, e.encoding, e.k)?;
    let text = listing(&sum);
    Ok(Output {
        stdout: text.clone(),
        files: vec![("encode.json".into(), json(&sum)?), ("encode.txt".into(), text)],
        failure: None,
    })
}

#[derive(Serialize)]
struct CountRow {
    encoding: EncodingKind,
    n_qubits: usize,
    dim: usize,
    k: usize,
    quantity: &'static str,
    formula: usize,
    enumerated: usize,
    #[serde(rename = "match")]
    matches: bool,
}

/// Symmetric matrix with entries uniform in [0.5, 1.5] inside the band |i−j| ≤ max(k, 1).
fn generic_banded(dim: usize, k: usize, rng: &mut impl Rng) -> RealMatrix {
    let band = k.max(1);
    let mut m = RealMatrix::zeros(dim);
    for i in 0..dim {
        for j in i..dim.min(i + band + 1) {
            let v = rng.gen_range(0.5..1.5);
            m.set(i, j, v);
            m.set(j, i, v);
        }
    }
    m
}

fn nonzero_terms(s: &PauliSum) -> usize {
    s.iter().filter(|(_, c)| c.abs() > 1e-9).count()
}

fn count_point(kind: EncodingKind, n: usize, k: usize, rng: &mut ChaCha8Rng) -> CliResult<Vec<CountRow>> {
    let row = |n_qubits, dim, quantity, formula, enumerated| CountRow {
        encoding: kind,
        n_qubits,
        dim,
        k,
        quantity,
        formula,
        enumerated,
        matches: formula == enumerated,
    };
    if kind == EncodingKind::OneHot {
        let kk = k.min(n - 1);
        let h = generic_banded(n, kk, rng);
        let got = nonzero_terms(&encode_onehot(&h, kk)?);
        return Ok(vec![row(n, n, "pauli_terms", term_count_onehot(n, k), got)]);
    }
    let dim = 1usize << n;
    let kk = k.min(dim - 1);
    let h = generic_banded(dim, kk, rng);
    let sum = encode(&h, kind, kk)?;
    let qc = qc_groups(&sum, QcHint::Compact)?;
    let dgc = dgc_groups(&sum)?;
    let cnots = dgc.iter().map(|g| g.two_qubit_gate_count()).sum();
    let (qc_formula, cnot_formula) = match kind {
        EncodingKind::Gray => (qc_count_gray(n, k), twoqubit_count_gray(n, k)),
        _ => (qc_count_binary(n, k), twoqubit_count_binary(n, k)),
    };
    Ok(vec![
        row(n, dim, "pauli_terms", term_count_compact(n, k), nonzero_terms(&sum)),
        row(n, dim, "qc_sets", qc_formula, qc.len()),
        row(n, dim, "dgc_sets", dgc_count(n, k), dgc.len()),
        row(n, dim, "two_qubit_gates", cnot_formula, cnots),
    ])
}

pub fn counts(cfg: &RunConfig, ctx: Ctx) -> CliResult<Output> {
    let c = &cfg.counts;
    if c.encodings.is_empty() {
        return config_err("[counts] needs at least one encoding");
    }
    if !(1..=6).contains(&c.n_max) {
        return config_err(format!("[counts] n_max must lie in 1..=6, got {}", c.n_max));
    }
    if !(2..=32).contains(&c.dim_max) {
        return config_err(format!("[counts] dim_max must lie in 2..=32, got {}", c.dim_max));
    }
    let seed = ctx.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let mut points = Vec::new();
    for &kind in &c.encodings {
        let (sizes, kmax): (Vec<usize>, fn(usize) -> usize) = match kind {
            EncodingKind::OneHot => ((2..=c.dim_max).collect(), |dim| dim),
            _ => ((1..=c.n_max).collect(), |n| 1 << n),
        };
        for n in sizes {
            for k in 0..=kmax(n) {
                points.push((kind, n, k));
            }
        }
    }
    let rows: Vec<CountRow> = points
        .par_iter()
        .enumerate()
        .map(|(i, &(kind, n, k))| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            count_point(kind, n, k, &mut rng)
        })
        .collect::<CliResult<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    let mut csv = String::from("encoding,n_qubits,dim,k,quantity,formula,enumerated,match\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.encoding, r.n_qubits, r.dim, r.k, r.quantity, r.formula, r.enumerated, r.matches
        ));
    }
    let mut stdout = String::new();
    for &kind in &c.encodings {
        let mine: Vec<&CountRow> = rows.iter().filter(|r| r.encoding == kind).collect();
        let bad = mine.iter().filter(|r| !r.matches).count();
        stdout.push_str(&format!("{kind}: {} checks, {bad} mismatches\n", mine.len()));
    }
    let mismatches: Vec<&CountRow> = rows.iter().filter(|r| !r.matches).collect();
    for r in &mismatches {
        stdout.push_str(&format!(
            "mismatch {} n_qubits={} K={} {}: formula {}, enumerated {}\n",
            r.encoding, r.n_qubits, r.k, r.quantity, r.formula, r.enumerated
        ));
    }
    let failure = (!mismatches.is_empty())
        .then(|| CliError::Contract(format!("{} formula/enumeration mismatches", mismatches.len())));
    Ok(Output { stdout, files: vec![("counts.csv".into(), csv), ("counts.json".into(), json(&rows)?)], failure })
}

#[derive(Serialize)]
struct GroupRecord<'a> {
    index: usize,
    scheme: hovqe::grouping::Scheme,
    structural: bool,
    flip_pattern: &'a Option<Vec<usize>>,
    two_qubit_gates: usize,
    rotation: &'a hovqe::circuit::Circuit,
    terms: PauliSum,
}

pub fn groups(cfg: &RunConfig, _ctx: Ctx) -> CliResult<Output> {
    let g = &cfg.groups;
    let spec = cfg.hamiltonian.spec(g.n, g.k)?;
    let h = assemble_with(&spec, g.construction)?;
    let sum = encode(&h, g.encoding, g.k)?;
    let groups = group(&sum, g.scheme, QcHint::for_encoding(g.encoding))?;

    let mut records = Vec::new();
    let mut text = String::new();
    for (i, grp) in groups.iter().enumerate() {
        let terms = PauliSum::from_terms(sum.n(), grp.members.iter().copied().zip(grp.coeffs.iter().copied()))?;
        let flip = match &grp.flip_pattern {
            Some(f) if !f.is_empty() => join(f),
            Some(_) => "none".to_string(),
            None => "-".to_string(),
        };
        let fallback = if grp.structural { "" } else { ", fallback" };
        text.push_str(&format!(
            "group {i}: {} terms, flip {flip}, two-qubit gates {}{fallback}\n",
            grp.members.len(),
            grp.two_qubit_gate_count()
        ));
        for line in listing(&terms).lines() {
            text.push_str(&format!("  {line}\n"));
        }
        records.push(GroupRecord {
            index: i,
            scheme: grp.scheme,
            structural: grp.structural,
            flip_pattern: &grp.flip_pattern,
            two_qubit_gates: grp.two_qubit_gate_count(),
            rotation: &grp.rotation,
            terms,
        });
    }
    let cnots: usize = groups.iter().map(|g| g.two_qubit_gate_count()).sum();
    text.push_str(&format!("{} groups, {} terms, {cnots} two-qubit gates\n", groups.len(), sum.len()));
    Ok(Output {
        stdout: text.clone(),
        files: vec![("groups.json".into(), json(&records)?), ("groups.txt".into(), text)],
        failure: None,
    })
}

fn vqe_configs(cfg: &RunConfig, ctx: Ctx) -> CliResult<Vec<VqeConfig>> {
    let v = &cfg.vqe;
    let seeds = match (ctx.seed, &v.seeds, cfg.seed) {
        (Some(s), _, _) => vec![s],
        (None, Some(list), _) => list.clone(),
        (None, None, Some(s)) => vec![s],
        (None, None, None) => vec![DEFAULT_SEED],
    };
    if seeds.is_empty() {
        return config_err("[vqe] seeds list is empty");
    }
    let base = match v.preset {
        Some(preset) => {
            let custom = [v.n.is_some(), v.k.is_some(), v.encoding.is_some(), v.ansatz.is_some(), v.grouping.is_some()];
            if custom.contains(&true) || v.stages.is_some() {
                return config_err("[vqe] preset runs take only mode, seeds, noise and optimizer");
            }
            let mut base = preset_schedule(preset, v.mode.unwrap_or(Mode::Exact), 0)?;
            if let Some(noise) = v.noise {
                base.noise = noise;
            }
            if let Some(opt) = v.optimizer {
                base.optimizer = opt;
            }
            base
        }
        None => {
            if v.mode.is_some() {
                return config_err("[vqe] mode applies to presets; custom stages carry their own mode");
            }
            let (Some(n), Some(k)) = (v.n, v.k) else {
                return config_err("[vqe] needs either a preset or n, k and stages");
            };
            let Some(stages) = v.stages.clone() else {
                return config_err("[vqe] custom runs need at least one [[vqe.stages]] entry");
            };
            let encoding = v.encoding.unwrap_or(EncodingKind::Gray);
            let ansatz = v.ansatz.unwrap_or(match encoding {
                EncodingKind::OneHot => AnsatzConfig::OneHot,
                _ => AnsatzConfig::Layered { layers: 4 },
            });
            VqeConfig {
                spec: cfg.hamiltonian.spec(n, k)?,
                encoding,
                ansatz,
                grouping: v.grouping.unwrap_or(hovqe::grouping::Scheme::Qc),
                stages,
                noise: v.noise.unwrap_or_default(),
                optimizer: v.optimizer.unwrap_or_default(),
                seed: 0,
            }
        }
    };
    base.spec.validate()?;
    base.noise.validate()?;
    Ok(seeds.into_iter().map(|seed| VqeConfig { seed, ..base.clone() }).collect())
}

fn mean_std(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = if x.len() > 1 { x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    (mean, var.sqrt())
}

pub fn vqe(cfg: &RunConfig, ctx: Ctx) -> CliResult<Output> {
    let configs = vqe_configs(cfg, ctx)?;
    let traces: Vec<RunTrace> = configs
        .par_iter()
        .map(|c| run_schedule(c).map_err(|e| CliError::from(e).context(&format!("vqe seed {}", c.seed))))
        .collect::<CliResult<_>>()?;

    let f = |v| energy(v, ctx.full_precision);
    let mut stdout = String::new();
    let mut files = Vec::new();
    for (c, t) in configs.iter().zip(&traces) {
        let summary = match &t.summary {
            Some(s) => format!("mean {} ± {} over last {}", f(s.mean), f(s.std), s.window),
            None => "mean n/a".to_string(),
        };
        stdout.push_str(&format!(
            "seed {}: {summary}, nr {}, exact {}, {} records\n",
            c.seed,
            f(t.nr_value),
            f(t.exact_energy),
            t.records.len()
        ));
        files.push((format!("trace_seed{}.csv", c.seed), t.to_csv()));
        files.push((format!("run_seed{}.json", c.seed), json(t)?));
    }
    let means: Vec<f64> = traces.iter().filter_map(|t| t.summary.as_ref().map(|s| s.mean)).collect();
    if means.len() > 1 {
        let (m, s) = mean_std(&means);
        stdout.push_str(&format!("{} seeds: mean of means {} ± {}\n", means.len(), f(m), f(s)));
    }
    Ok(Output { stdout, files, failure: None })
}

#[derive(Serialize)]
struct FlipEntry {
    k: usize,
    end: usize,
    pattern: String,
}

#[derive(Serialize)]
struct NumberEntry {
    m: usize,
    operator: PauliSum,
}

#[derive(Serialize)]
struct LadderEntry {
    m: usize,
    k: usize,
    operator: PauliSum,
}

#[derive(Serialize)]
struct CodeTables {
    encoding: EncodingKind,
    n_qubits: usize,
    dim: usize,
    words: Vec<String>,
    alternate_representation: Option<Vec<u64>>,
    flip_strings: Option<Vec<FlipEntry>>,
    number_operators: Vec<NumberEntry>,
    ladder_operators: Vec<LadderEntry>,
}

fn code_tables(kind: EncodingKind, dim: usize) -> CliResult<CodeTables> {
    let code = CodeTable::for_dim(kind, dim)?;
    let (alt, flips) = if kind == EncodingKind::OneHot {
        (None, None)
    } else {
        let alt = alternate_representation(&code)?.entries;
        let flips = flip_string_table(kind, code.n_qubits)?
            .into_iter()
            .map(|((k, end), pattern)| FlipEntry { k, end, pattern })
            .collect();
        (Some(alt), Some(flips))
    };
    let number_operators =
        (0..dim).map(|m| Ok(NumberEntry { m, operator: number_operator(&code, m)? })).collect::<CliResult<_>>()?;
    let mut ladder_operators = Vec::new();
    for k in 1..dim {
        for m in 0..dim - k {
            ladder_operators.push(LadderEntry { m, k, operator: ladder_operator(&code, m, k)? });
        }
    }
    Ok(CodeTables {
        encoding: kind,
        n_qubits: code.n_qubits,
        dim,
        words: code.words(),
        alternate_representation: alt,
        flip_strings: flips,
        number_operators,
        ladder_operators,
    })
}

fn render(t: &CodeTables) -> String {
    let mut s = format!("== {} code, N={}, {} qubits ==\n", t.encoding, t.dim, t.n_qubits);
    for (m, w) in t.words.iter().enumerate() {
        s.push_str(&format!("|{m}> {w}\n"));
    }
    if let Some(alt) = &t.alternate_representation {
        s.push_str(&format!("alternate representation: {}\n", join(alt)));
    }
    if let Some(flips) = &t.flip_strings {
        s.push_str("flip strings (k, end):\n");
        for e in flips {
            s.push_str(&format!("  k={} end={}: {}\n", e.k, e.end, e.pattern));
        }
    }
    s.push_str("number operators:\n");
    for e in &t.number_operators {
        s.push_str(&format!("  |{0}><{0}|: {1}\n", e.m, inline(&e.operator)));
    }
    s.push_str("ladder operators:\n");
    for e in &t.ladder_operators {
        s.push_str(&format!("  |{}><{}| + h.c.: {}\n", e.m, e.m + e.k, inline(&e.operator)));
    }
    s
}

pub fn tables(cfg: &RunConfig, _ctx: Ctx) -> CliResult<Output> {
    let t = &cfg.tables;
    let mut jobs = Vec::new();
    for &n in &t.n {
        if !(1..=6).contains(&n) {
            return config_err(format!("[tables] qubit counts must lie in 1..=6, got {n}"));
        }
        jobs.push((EncodingKind::Binary, 1 << n));
        jobs.push((EncodingKind::Gray, 1 << n));
    }
    for &dim in &t.dim {
        if !(2..=16).contains(&dim) {
            return config_err(format!("[tables] one-hot sizes must lie in 2..=16, got {dim}"));
        }
        jobs.push((EncodingKind::OneHot, dim));
    }
    if jobs.is_empty() {
        return config_err("[tables] needs at least one n or dim");
    }
    let all = jobs.into_iter().map(|(kind, dim)| code_tables(kind, dim)).collect::<CliResult<Vec<_>>>()?;
    let text = all.iter().map(render).collect::<Vec<_>>().join("\n");
    Ok(Output {
        stdout: text.clone(),
        files: vec![("tables.json".into(), json(&all)?), ("tables.txt".into(), text)],
        failure: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inline_signs() {
        let s = PauliSum::from_terms(2, [("II".parse().unwrap(), 0.5), ("ZI".parse().unwrap(), -0.5)]).unwrap();
        assert_eq!(inline(&s), "0.500 II - 0.500 ZI");
        assert_eq!(inline(&PauliSum::new(2)), "0");
    }

    #[test]
    fn listing_rounds_each_term() {
        let s = PauliSum::from_terms(1, [("X".parse().unwrap(), 0.0625), ("Z".parse().unwrap(), -1.2345)]).unwrap();
        assert_eq!(listing(&s), "    0.062 X\n   -1.234 Z\n");
    }
}
