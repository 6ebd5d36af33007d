//! Staged VQE schedules with SPSA and adaptive-learning-rate gradient descent.

use std::f64::consts::{FRAC_PI_2, SQRT_2};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ansatz::{layered_ansatz, onehot_ansatz};
use crate::circuit::{Circuit, ParamGate};
use crate::encoding::{encode, EncodingKind};
use crate::error::{config, Result};
use crate::grouping::{group, CommutingGroup, QcHint, Scheme};
use crate::hamiltonian::{assemble, lowest_eigenvalue, HamiltonianSpec};
use crate::pauli::PauliSum;
use crate::sim::{expectation_shots, run, run_noisy, NoiseModel};

/// SPSA settings; `a` and `big_a` are derived per stage when unset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpsaConfig {
    pub a: Option<f64>,
    pub c: f64,
    /// Stability constant A; defaults to 10% of the stage iterations.
    pub big_a: Option<f64>,
    pub alpha: f64,
    pub gamma: f64,
    /// Per-component size of the first step when `a` is calibrated.
    pub target_step: f64,
    pub calibration_samples: usize,
    /// Upper bound on the Euclidean norm of one update.
    pub max_step: Option<f64>,
    /// Reject updates whose recorded energy exceeds the previous one by more than this.
    /// Honoured in exact mode only, where the comparison is noise-free.
    pub blocking: Option<f64>,
}

impl Default for SpsaConfig {
    fn default() -> Self {
        Self {
            a: None,
            c: 0.1,
            big_a: None,
            alpha: 0.602,
            gamma: 0.101,
            target_step: 0.1,
            calibration_samples: 10,
            max_step: Some(0.1),
            blocking: None,
        }
    }
}

/// Resolved SPSA gain sequence a_k = a/(A+k+1)^α, c_k = c/(k+1)^γ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpsaGains {
    pub a: f64,
    pub c: f64,
    pub big_a: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub max_step: Option<f64>,
}

impl SpsaGains {
    pub fn a_k(&self, k: usize) -> f64 {
        self.a / (self.big_a + k as f64 + 1.0).powf(self.alpha)
    }

    pub fn c_k(&self, k: usize) -> f64 {
        self.c / (k as f64 + 1.0).powf(self.gamma)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientMode {
    ParameterShift,
    CentralDifference,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GdConfig {
    pub lr_init: f64,
    pub lr_min: f64,
    pub lr_max: f64,
    pub window: usize,
    pub up: f64,
    pub down: f64,
    pub gradient: GradientMode,
    /// Step for central differences.
    pub fd_step: f64,
}

impl Default for GdConfig {
    fn default() -> Self {
        Self {
            lr_init: 0.01,
            lr_min: 1e-4,
            lr_max: 0.05,
            window: 10,
            up: 1.05,
            down: 0.8,
            gradient: GradientMode::ParameterShift,
            fd_step: 1e-5,
        }
    }
}

impl GdConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lr_min > 0.0 && self.lr_min <= self.lr_init && self.lr_init <= self.lr_max) {
            return config("gradient descent needs 0 < lr_min <= lr_init <= lr_max");
        }
        if self.window < 2 || !(self.up > 0.0) || !(self.down > 0.0) {
            return config("gradient descent window must be >= 2 and factors positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerConfig {
    pub spsa: SpsaConfig,
    pub gd: GdConfig,
}

impl OptimizerConfig {
    /// Small perturbations and steps with exact-mode blocking; suited to the stiff
    /// high-K Hamiltonians where the default gains overshoot.
    pub fn conservative() -> Self {
        Self {
            spsa: SpsaConfig {
                c: 0.03,
                target_step: 0.03,
                max_step: Some(0.03),
                blocking: Some(0.0),
                ..Default::default()
            },
            gd: GdConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Spsa,
    Gd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Shot,
    Noisy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageConfig {
    pub k: usize,
    pub iterations: usize,
    pub method: Method,
    pub mode: Mode,
    /// Shots per commuting group (shot and noisy modes).
    #[serde(default)]
    pub shots: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum AnsatzConfig {
    Layered { layers: usize },
    OneHot,
}

impl AnsatzConfig {
    pub fn build(&self, encoding: EncodingKind, dim: usize) -> Result<Circuit> {
        match (*self, encoding) {
            (AnsatzConfig::OneHot, EncodingKind::OneHot) => onehot_ansatz(dim),
            (AnsatzConfig::Layered { layers }, EncodingKind::Binary | EncodingKind::Gray) => {
                if dim < 2 || !dim.is_power_of_two() {
                    return config(format!("layered ansatz needs N = 2^n, got {dim}"));
                }
                layered_ansatz(dim.trailing_zeros() as usize, layers)
            }
            _ => config("one-hot encoding pairs with the one-hot ansatz, binary/Gray with the layered ansatz"),
        }
    }
}

/// Everything needed to reproduce one schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct VqeConfig {
    /// Basis size and full truncation order K used for the NR value.
    pub spec: HamiltonianSpec,
    pub encoding: EncodingKind,
    pub ansatz: AnsatzConfig,
    pub grouping: Scheme,
    pub stages: Vec<StageConfig>,
    pub noise: NoiseModel,
    pub optimizer: OptimizerConfig,
    pub seed: u64,
}

/// Reference systems with built-in schedules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "system", rename_all = "lowercase", deny_unknown_fields)]
pub enum Preset {
    /// Neutron on a carbon isotope (A = 10, 12, 14, 16, 18), full K = 3.
    Carbon { a_target: u32, n: usize },
    /// Neutron on an alpha particle with ħω = 12 or 16 MeV and full K = 1 or 2.
    Alpha { hbar_omega: u32, k: usize, n: usize },
}

fn stage(k: usize, iterations: usize, method: Method, mode: Mode, shots: u64) -> StageConfig {
    let shots = (mode != Mode::Exact).then_some(shots);
    StageConfig { k, iterations, method, mode, shots }
}

/// Gray-encoded schedule for a reference system in the requested evaluation mode.
pub fn preset_schedule(preset: Preset, mode: Mode, seed: u64) -> Result<VqeConfig> {
    use Method::{Gd, Spsa};
    let (spec, layers, stages) = match preset {
        Preset::Carbon { a_target, n } => {
            let spec = crate::hamiltonian::n_carbon_spec(a_target, n, 3)?;
            let (s1, g1) = if n <= 8 { (500, 1000) } else { (1000, 1500) };
            let stages = match mode {
                Mode::Noisy => vec![stage(1, 500, Spsa, mode, 1_000), stage(3, s1 + g1, Spsa, mode, 20_000)],
                _ => vec![
                    stage(1, 500, Spsa, mode, 1_000),
                    stage(3, s1, Spsa, mode, 1_000),
                    stage(3, g1, Gd, mode, 1_000),
                ],
            };
            (spec, 4, stages)
        }
        Preset::Alpha { hbar_omega, k, n } => {
            let spec = crate::hamiltonian::n_alpha_spec(hbar_omega, n, k)?;
            let stages = match (k, mode) {
                (1, Mode::Noisy) => vec![stage(0, 500, Spsa, mode, 1_000), stage(1, 500, Spsa, mode, 100_000)],
                (1, _) => vec![stage(0, 500, Spsa, mode, 100_000), stage(1, 500, Gd, mode, 100_000)],
                (2, _) => {
                    let lo = if mode == Mode::Noisy { 1_000 } else { 100_000 };
                    vec![
                        stage(0, 750, Spsa, mode, lo),
                        stage(1, 750, Spsa, mode, lo),
                        stage(2, 750, Spsa, mode, 100_000),
                    ]
                }
                _ => return config(format!("no built-in schedule for K={k}")),
            };
            (spec, 5, stages)
        }
    };
    Ok(VqeConfig {
        spec,
        encoding: EncodingKind::Gray,
        ansatz: AnsatzConfig::Layered { layers },
        grouping: Scheme::Qc,
        stages,
        noise: NoiseModel::default(),
        optimizer: OptimizerConfig::conservative(),
        seed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub stage: usize,
    pub iteration: usize,
    pub energy: f64,
    pub params: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub window: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub records: Vec<Record>,
    /// Index of the first record of each stage.
    pub stage_starts: Vec<usize>,
    pub initial_params: Vec<f64>,
    pub final_params: Vec<f64>,
    pub summary: Option<Summary>,
    /// Exact expectation of the full-K Hamiltonian at the final parameters.
    pub nr_value: f64,
    /// Lowest eigenvalue of the full-K Hamiltonian matrix.
    pub exact_energy: f64,
}

impl RunTrace {
    pub fn energies(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.energy).collect()
    }

    /// `stage,iteration,energy` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("stage,iteration,energy\n");
        for r in &self.records {
            s.push_str(&format!("{},{},{:?}\n", r.stage, r.iteration, r.energy));
        }
        s
    }
}

/// Mean and sample standard deviation of the last `m` energies.
pub fn summarize(trace: &RunTrace, m: usize) -> Result<Summary> {
    summarize_energies(&trace.energies(), m)
}

pub fn summarize_energies(e: &[f64], m: usize) -> Result<Summary> {
    if m < 2 || e.len() < m {
        return config(format!("need at least {m} >= 2 records, trace has {}", e.len()));
    }
    let tail = &e[e.len() - m..];
    let mean = tail.iter().sum::<f64>() / m as f64;
    let var = tail.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
    Ok(Summary { mean, std: var.sqrt(), window: m })
}

/// Derives SPSA gains for a stage, calibrating `a` from sampled gradient magnitudes.
pub fn spsa_gains(
    cfg: &SpsaConfig,
    iterations: usize,
    theta: &[f64],
    eval: &mut dyn FnMut(&[f64]) -> f64,
    rng: &mut impl Rng,
) -> SpsaGains {
    let big_a = cfg.big_a.unwrap_or(0.1 * iterations as f64);
    let a = match cfg.a {
        Some(a) => a,
        None => {
            let mut mag = 0.0;
            let samples = cfg.calibration_samples.max(1);
            for _ in 0..samples {
                let delta = rademacher(theta.len(), rng);
                let plus: Vec<f64> = theta.iter().zip(&delta).map(|(t, d)| t + cfg.c * d).collect();
                let minus: Vec<f64> = theta.iter().zip(&delta).map(|(t, d)| t - cfg.c * d).collect();
                mag += ((eval(&plus) - eval(&minus)) / (2.0 * cfg.c)).abs();
            }
            mag /= samples as f64;
            let mag = if mag > 1e-12 { mag } else { 1.0 };
            cfg.target_step * (big_a + 1.0).powf(cfg.alpha) / mag
        }
    };
    SpsaGains { a, c: cfg.c, big_a, alpha: cfg.alpha, gamma: cfg.gamma, max_step: cfg.max_step }
}

fn rademacher(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..n).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect()
}

/// One SPSA update; calls `eval` exactly twice.
pub fn spsa_step(
    theta: &[f64],
    eval: &mut dyn FnMut(&[f64]) -> f64,
    k: usize,
    gains: &SpsaGains,
    rng: &mut impl Rng,
) -> Vec<f64> {
    let (ak, ck) = (gains.a_k(k), gains.c_k(k));
    let delta = rademacher(theta.len(), rng);
    let plus: Vec<f64> = theta.iter().zip(&delta).map(|(t, d)| t + ck * d).collect();
    let minus: Vec<f64> = theta.iter().zip(&delta).map(|(t, d)| t - ck * d).collect();
    let diff = eval(&plus) - eval(&minus);
    let mut step: Vec<f64> = delta.iter().map(|d| ak * diff / (2.0 * ck * d)).collect();
    if let Some(cap) = gains.max_step {
        let norm = step.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > cap {
            step.iter_mut().for_each(|x| *x *= cap / norm);
        }
    }
    theta.iter().zip(&step).map(|(t, s)| t - s).collect()
}

/// Gradient of `eval` by the shift rule of each parameter's gate, or central differences.
pub fn gradient(
    theta: &[f64],
    eval: &mut dyn FnMut(&[f64]) -> f64,
    rules: &[ParamGate],
    mode: GradientMode,
    fd_step: f64,
) -> Vec<f64> {
    let mut shifted = theta.to_vec();
    let mut at = |i: usize, d: f64, eval: &mut dyn FnMut(&[f64]) -> f64| {
        shifted[i] = theta[i] + d;
        let v = eval(&shifted);
        shifted[i] = theta[i];
        v
    };
    (0..theta.len())
        .map(|i| match mode {
            GradientMode::CentralDifference => (at(i, fd_step, eval) - at(i, -fd_step, eval)) / (2.0 * fd_step),
            GradientMode::ParameterShift => match rules[i] {
                ParamGate::Ry { scale } => {
                    let s = FRAC_PI_2 / scale;
                    0.5 * scale * (at(i, s, eval) - at(i, -s, eval))
                }
                ParamGate::Cry { scale } => {
                    let s1 = FRAC_PI_2 / scale;
                    let s3 = 3.0 * FRAC_PI_2 / scale;
                    let cp = (SQRT_2 + 1.0) / (4.0 * SQRT_2);
                    let cm = (SQRT_2 - 1.0) / (4.0 * SQRT_2);
                    scale * (cp * (at(i, s1, eval) - at(i, -s1, eval)) - cm * (at(i, s3, eval) - at(i, -s3, eval)))
                }
            },
        })
        .collect()
}

/// θ′ = θ − lr·∇E.
pub fn gd_step(
    theta: &[f64],
    eval: &mut dyn FnMut(&[f64]) -> f64,
    lr: f64,
    rules: &[ParamGate],
    mode: GradientMode,
    fd_step: f64,
) -> Vec<f64> {
    if lr == 0.0 {
        return theta.to_vec();
    }
    let g = gradient(theta, eval, rules, mode, fd_step);
    theta.iter().zip(&g).map(|(t, gi)| t - lr * gi).collect()
}

/// Least-squares slope of equally spaced samples.
pub fn slope(window: &[f64]) -> f64 {
    let n = window.len() as f64;
    let xm = (n - 1.0) / 2.0;
    let ym = window.iter().sum::<f64>() / n;
    let (mut num, mut den) = (0.0, 0.0);
    for (i, y) in window.iter().enumerate() {
        let dx = i as f64 - xm;
        num += dx * (y - ym);
        den += dx * dx;
    }
    num / den
}

/// Grows lr on a falling window, shrinks it otherwise (a flat window shrinks).
pub fn adaptive_lr(window: &[f64], lr: f64, cfg: &GdConfig) -> f64 {
    if slope(window) < 0.0 {
        (cfg.up * lr).min(cfg.lr_max)
    } else {
        (cfg.down * lr).max(cfg.lr_min)
    }
}

/// Encoded Hamiltonian for basis size N and truncation K.
pub fn encoded_hamiltonian(spec: &HamiltonianSpec, encoding: EncodingKind, k: usize) -> Result<PauliSum> {
    let h = assemble(&spec.with_nk(spec.n, k))?;
    encode(&h, encoding, k)
}

struct Estimator {
    circuit: Circuit,
    sum: PauliSum,
    groups: Vec<CommutingGroup>,
    mode: Mode,
    shots: u64,
    noise: NoiseModel,
}

impl Estimator {
    fn eval(&self, theta: &[f64], rng: &mut ChaCha8Rng) -> f64 {
        let r = match self.mode {
            Mode::Exact => run(&self.circuit, theta).and_then(|s| s.expectation(&self.sum)),
            Mode::Shot => run(&self.circuit, theta).and_then(|s| expectation_shots(&s, &self.groups, self.shots, rng)),
            Mode::Noisy => run_noisy(&self.circuit, theta, self.noise)
                .and_then(|rho| expectation_shots(&rho, &self.groups, self.shots, rng)),
        };
        r.expect("estimator inputs validated before the schedule starts")
    }
}

fn validate(cfg: &VqeConfig) -> Result<()> {
    cfg.spec.validate()?;
    cfg.noise.validate()?;
    cfg.optimizer.gd.validate()?;
    if cfg.stages.is_empty() {
        return config("schedule has no stages");
    }
    for (i, s) in cfg.stages.iter().enumerate() {
        if s.iterations == 0 {
            return config(format!("stage {i} has zero iterations"));
        }
        if s.k > cfg.spec.k {
            return config(format!("stage {i} uses K={} above the full K={}", s.k, cfg.spec.k));
        }
        if s.mode != Mode::Exact && s.shots.unwrap_or(0) == 0 {
            return config(format!("stage {i} needs a positive shot count"));
        }
        if s.method == Method::Gd && s.iterations < 1 {
            return config(format!("stage {i} is empty"));
        }
    }
    Ok(())
}

/// Runs every stage in order, warm-starting each from the previous final parameters.
pub fn run_schedule(cfg: &VqeConfig) -> Result<RunTrace> {
    validate(cfg)?;
    let circuit = cfg.ansatz.build(cfg.encoding, cfg.spec.n)?;
    let rules = circuit.param_gates()?;
    let mut opt_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut shot_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    shot_rng.set_stream(1);

    let mut theta = vec![0.0; circuit.n_params];
    let initial_params = theta.clone();
    let mut records = Vec::new();
    let mut stage_starts = Vec::new();

    for (si, stage) in cfg.stages.iter().enumerate() {
        stage_starts.push(records.len());
        let sum = encoded_hamiltonian(&cfg.spec, cfg.encoding, stage.k)?;
        let groups = match stage.mode {
            Mode::Exact => Vec::new(),
            _ => group(&sum, cfg.grouping, QcHint::for_encoding(cfg.encoding))?,
        };
        let est = Estimator {
            circuit: circuit.clone(),
            sum,
            groups,
            mode: stage.mode,
            shots: stage.shots.unwrap_or(0),
            noise: cfg.noise,
        };
        let mut eval = |t: &[f64]| est.eval(t, &mut shot_rng);
        match stage.method {
            Method::Spsa => {
                let gains = spsa_gains(&cfg.optimizer.spsa, stage.iterations, &theta, &mut eval, &mut opt_rng);
                let blocking = cfg.optimizer.spsa.blocking.filter(|_| stage.mode == Mode::Exact);
                let mut last = f64::INFINITY;
                for it in 0..stage.iterations {
                    let next = spsa_step(&theta, &mut eval, it, &gains, &mut opt_rng);
                    let mut energy = eval(&next);
                    match blocking {
                        Some(tol) if it > 0 && energy > last + tol => energy = last,
                        _ => theta = next,
                    }
                    last = energy;
                    records.push(Record { stage: si, iteration: it, energy, params: theta.clone() });
                }
            }
            Method::Gd => {
                let gd = cfg.optimizer.gd;
                let mut lr = gd.lr_init;
                let mut history: Vec<f64> = Vec::with_capacity(stage.iterations);
                for it in 0..stage.iterations {
                    theta = gd_step(&theta, &mut eval, lr, &rules, gd.gradient, gd.fd_step);
                    let energy = eval(&theta);
                    history.push(energy);
                    if history.len() % gd.window == 0 {
                        lr = adaptive_lr(&history[history.len() - gd.window..], lr, &gd);
                    }
                    records.push(Record { stage: si, iteration: it, energy, params: theta.clone() });
                }
            }
        }
    }

    let full = encoded_hamiltonian(&cfg.spec, cfg.encoding, cfg.spec.k)?;
    let nr_value = run(&circuit, &theta)?.expectation(&full)?;
    let exact_energy = lowest_eigenvalue(&assemble(&cfg.spec)?)?;
    let summary = summarize_energies(&records.iter().map(|r| r.energy).collect::<Vec<_>>(), 100).ok();
    Ok(RunTrace { records, stage_starts, initial_params, final_params: theta, summary, nr_value, exact_energy })
}
