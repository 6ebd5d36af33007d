//! Statevector and density-matrix simulation, exact and sampled expectations.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate};
use crate::error::{config, Result};
use crate::grouping::CommutingGroup;
use crate::pauli::PauliSum;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Depolarizing probabilities per gate and symmetric readout flip probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseModel {
    pub p1: f64,
    pub p2: f64,
    pub readout_eps: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self { p1: 0.001, p2: 0.01, readout_eps: 0.02 }
    }
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        Self { p1: 0.0, p2: 0.0, readout_eps: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("p1", self.p1), ("p2", self.p2), ("readout_eps", self.readout_eps)] {
            if !(0.0..=1.0).contains(&v) {
                return config(format!("noise parameter {name}={v} outside [0, 1]"));
            }
        }
        Ok(())
    }
}

type Mat2 = [[Complex64; 2]; 2];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn ry_matrix(angle: f64) -> Mat2 {
    let (s, co) = (0.5 * angle).sin_cos();
    [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
}

fn gate_matrix(g: &Gate, params: &[f64]) -> Option<Mat2> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match *g {
        Gate::Ry { angle, .. } | Gate::Cry { angle, .. } => Some(ry_matrix(angle.resolve(params))),
        Gate::H { .. } => Some([[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]]),
        Gate::Sdg { .. } => Some([[ONE, ZERO], [ZERO, c(0.0, -1.0)]]),
        Gate::X { .. } => Some([[ZERO, ONE], [ONE, ZERO]]),
        Gate::Cnot { .. } => None,
    }
}

#[inline]
fn bit(n: usize, q: usize) -> usize {
    1usize << (n - 1 - q)
}

// Applies `g` to a vector of 2^n amplitudes.
fn apply_to_vector(v: &mut [Complex64], n: usize, g: &Gate, params: &[f64]) {
    match *g {
        Gate::Cnot { control, target } => {
            let (cb, tb) = (bit(n, control), bit(n, target));
            for i in 0..v.len() {
                if i & cb != 0 && i & tb == 0 {
                    v.swap(i, i | tb);
                }
            }
        }
        Gate::Cry { control, target, .. } => {
            let m = gate_matrix(g, params).unwrap();
            let (cb, tb) = (bit(n, control), bit(n, target));
            for i in 0..v.len() {
                if i & cb != 0 && i & tb == 0 {
                    let (a, b) = (v[i], v[i | tb]);
                    v[i] = m[0][0] * a + m[0][1] * b;
                    v[i | tb] = m[1][0] * a + m[1][1] * b;
                }
            }
        }
        Gate::Ry { qubit, .. } | Gate::H { qubit } | Gate::Sdg { qubit } | Gate::X { qubit } => {
            let m = gate_matrix(g, params).unwrap();
            let qb = bit(n, qubit);
            for i in 0..v.len() {
                if i & qb == 0 {
                    let (a, b) = (v[i], v[i | qb]);
                    v[i] = m[0][0] * a + m[0][1] * b;
                    v[i | qb] = m[1][0] * a + m[1][1] * b;
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub n_qubits: usize,
    pub amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zero(n_qubits: usize) -> Self {
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[0] = ONE;
        Self { n_qubits, amps }
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() || !amps.len().is_power_of_two() {
            return config("statevector length must be a power of two");
        }
        Ok(Self { n_qubits: amps.len().trailing_zeros() as usize, amps })
    }

    pub fn apply(&mut self, g: &Gate, params: &[f64]) {
        apply_to_vector(&mut self.amps, self.n_qubits, g, params);
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn expectation(&self, sum: &PauliSum) -> Result<f64> {
        check_n(self.n_qubits, sum)?;
        let mut e = 0.0;
        for (p, coeff) in sum.iter() {
            let mut acc = ZERO;
            for (b, a) in self.amps.iter().enumerate() {
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let (ph, out) = p.apply(b as u64);
                acc += self.amps[out as usize].conj() * ph * a;
            }
            e += coeff * acc.re;
        }
        Ok(e)
    }

    /// Outcome distribution after applying a measurement rotation.
    pub fn rotated_probabilities(&self, rotation: &Circuit) -> Vec<f64> {
        let mut s = self.clone();
        for g in &rotation.gates {
            s.apply(g, &[]);
        }
        s.probabilities()
    }
}

fn check_n(n: usize, sum: &PauliSum) -> Result<()> {
    if sum.n() != n {
        return config(format!("operator acts on {} qubits, state has {n}", sum.n()));
    }
    Ok(())
}

/// Density matrix with a noise model applied after every gate.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub n_qubits: usize,
    dim: usize,
    /// Row-major.
    pub rho: Vec<Complex64>,
    pub noise: NoiseModel,
}

impl DensityMatrix {
    pub fn zero(n_qubits: usize, noise: NoiseModel) -> Self {
        let dim = 1 << n_qubits;
        let mut rho = vec![ZERO; dim * dim];
        rho[0] = ONE;
        Self { n_qubits, dim, rho, noise }
    }

    pub fn from_state(s: &StateVector, noise: NoiseModel) -> Self {
        let dim = s.amps.len();
        let mut rho = vec![ZERO; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                rho[i * dim + j] = s.amps[i] * s.amps[j].conj();
            }
        }
        Self { n_qubits: s.n_qubits, dim, rho, noise }
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.rho[i * self.dim + j]
    }

    fn left_apply(&mut self, g: &Gate, params: &[f64]) {
        let dim = self.dim;
        let mut col = vec![ZERO; dim];
        for c in 0..dim {
            for r in 0..dim {
                col[r] = self.rho[r * dim + c];
            }
            apply_to_vector(&mut col, self.n_qubits, g, params);
            for r in 0..dim {
                self.rho[r * dim + c] = col[r];
            }
        }
    }

    fn adjoint_in_place(&mut self) {
        let dim = self.dim;
        for i in 0..dim {
            self.rho[i * dim + i] = self.rho[i * dim + i].conj();
            for j in (i + 1)..dim {
                let (a, b) = (self.rho[i * dim + j], self.rho[j * dim + i]);
                self.rho[i * dim + j] = b.conj();
                self.rho[j * dim + i] = a.conj();
            }
        }
    }

    /// ρ → UρU†, then depolarizing noise on the touched qubits.
    pub fn apply(&mut self, g: &Gate, params: &[f64]) {
        self.left_apply(g, params);
        self.adjoint_in_place();
        self.left_apply(g, params);
        let q = g.qubits();
        if q.len() == 1 {
            self.depolarize(&q, self.noise.p1);
        } else {
            self.depolarize(&q, self.noise.p2);
        }
    }

    /// ρ → (1−p)ρ + p·Tr_Q(ρ) ⊗ I/2^{|Q|}.
    pub fn depolarize(&mut self, qubits: &[usize], p: f64) {
        if p == 0.0 {
            return;
        }
        let mask: usize = qubits.iter().map(|&q| bit(self.n_qubits, q)).sum();
        let sub: Vec<usize> = subsets(mask);
        let w = p / sub.len() as f64;
        let dim = self.dim;
        let old = self.rho.clone();
        for r in 0..dim {
            for cc in 0..dim {
                let mut v = (1.0 - p) * old[r * dim + cc];
                if (r ^ cc) & mask == 0 {
                    let (r0, c0) = (r & !mask, cc & !mask);
                    let mut tr = ZERO;
                    for s in &sub {
                        tr += old[(r0 | s) * dim + (c0 | s)];
                    }
                    v += w * tr;
                }
                self.rho[r * dim + cc] = v;
            }
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i).re).collect()
    }

    pub fn expectation(&self, sum: &PauliSum) -> Result<f64> {
        check_n(self.n_qubits, sum)?;
        let mut e = 0.0;
        for (p, coeff) in sum.iter() {
            // Tr[Pρ] = Σ_b phase(b) ρ[b, b^x]
            let mut acc = ZERO;
            for b in 0..self.dim {
                let (ph, out) = p.apply(b as u64);
                acc += ph * self.get(b, out as usize);
            }
            e += coeff * acc.re;
        }
        Ok(e)
    }

    /// Outcome distribution after a noisy measurement rotation and readout flips.
    pub fn rotated_probabilities(&self, rotation: &Circuit) -> Vec<f64> {
        let mut s = self.clone();
        for g in &rotation.gates {
            s.apply(g, &[]);
        }
        let mut p = s.diagonal();
        apply_readout(&mut p, self.n_qubits, self.noise.readout_eps);
        p
    }
}

fn subsets(mask: usize) -> Vec<usize> {
    let mut out = vec![0];
    let mut s = mask;
    while s != 0 {
        out.push(s);
        s = (s - 1) & mask;
    }
    out
}

/// Independent symmetric bit flips on every qubit, applied to a distribution.
pub fn apply_readout(p: &mut [f64], n: usize, eps: f64) {
    if eps == 0.0 {
        return;
    }
    for q in 0..n {
        let qb = bit(n, q);
        for i in 0..p.len() {
            if i & qb == 0 {
                let (a, b) = (p[i], p[i | qb]);
                p[i] = (1.0 - eps) * a + eps * b;
                p[i | qb] = (1.0 - eps) * b + eps * a;
            }
        }
    }
}

pub fn run(circuit: &Circuit, params: &[f64]) -> Result<StateVector> {
    circuit.check_params(params)?;
    let mut s = StateVector::zero(circuit.n_qubits);
    for g in &circuit.gates {
        s.apply(g, params);
    }
    Ok(s)
}

pub fn run_noisy(circuit: &Circuit, params: &[f64], noise: NoiseModel) -> Result<DensityMatrix> {
    circuit.check_params(params)?;
    noise.validate()?;
    let mut rho = DensityMatrix::zero(circuit.n_qubits, noise);
    for g in &circuit.gates {
        rho.apply(g, params);
    }
    Ok(rho)
}

/// A prepared state that can be measured in a rotated basis.
pub trait Measurable {
    fn n_qubits(&self) -> usize;
    fn outcome_probabilities(&self, rotation: &Circuit) -> Vec<f64>;
    fn expectation_exact(&self, sum: &PauliSum) -> Result<f64>;
}

impl Measurable for StateVector {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }
    fn outcome_probabilities(&self, rotation: &Circuit) -> Vec<f64> {
        self.rotated_probabilities(rotation)
    }
    fn expectation_exact(&self, sum: &PauliSum) -> Result<f64> {
        self.expectation(sum)
    }
}

impl Measurable for DensityMatrix {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }
    fn outcome_probabilities(&self, rotation: &Circuit) -> Vec<f64> {
        self.rotated_probabilities(rotation)
    }
    fn expectation_exact(&self, sum: &PauliSum) -> Result<f64> {
        self.expectation(sum)
    }
}

/// ⟨ψ|H|ψ⟩ or Tr[Hρ].
pub fn expectation_exact(state: &impl Measurable, sum: &PauliSum) -> Result<f64> {
    state.expectation_exact(sum)
}

/// Multinomial outcome counts drawn as a chain of binomials.
pub fn sample_counts(probs: &[f64], shots: u64, rng: &mut impl Rng) -> Vec<u64> {
    let mut counts = vec![0u64; probs.len()];
    let mut remaining = shots;
    let mut mass: f64 = probs.iter().map(|p| p.max(0.0)).sum();
    for (i, p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        let p = p.max(0.0);
        if i + 1 == probs.len() || mass <= p {
            counts[i] = remaining;
            break;
        }
        let q = (p / mass).clamp(0.0, 1.0);
        let k = if q == 0.0 { 0 } else { Binomial::new(remaining, q).expect("valid binomial").sample(rng) };
        counts[i] = k;
        remaining -= k;
        mass -= p;
    }
    counts
}

/// Exact expectation reconstructed from per-group outcome distributions.
pub fn expectation_from_groups(state: &impl Measurable, groups: &[CommutingGroup]) -> f64 {
    groups
        .iter()
        .map(|g| {
            let p = state.outcome_probabilities(&g.rotation);
            p.iter().zip(g.outcome_values()).map(|(pi, v)| pi * v).sum::<f64>()
        })
        .sum()
}

/// Sampled estimate with `shots_per_group` shots for every group.
pub fn expectation_shots(
    state: &impl Measurable,
    groups: &[CommutingGroup],
    shots_per_group: u64,
    rng: &mut impl Rng,
) -> Result<f64> {
    if shots_per_group == 0 {
        return config("shots per group must be positive");
    }
    let mut e = 0.0;
    for g in groups {
        if g.n_qubits() != state.n_qubits() {
            return config("group and state qubit counts differ");
        }
        let values = g.outcome_values();
        if g.is_constant() {
            e += values[0];
            continue;
        }
        let p = state.outcome_probabilities(&g.rotation);
        let counts = sample_counts(&p, shots_per_group, rng);
        let s: f64 = counts.iter().zip(values).map(|(k, v)| *k as f64 * v).sum();
        e += s / shots_per_group as f64;
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Angle;

    #[test]
    fn empty_circuit_is_zero_state() {
        let s = run(&Circuit::new(3), &[]).unwrap();
        assert_eq!(s, StateVector::zero(3));
    }

    #[test]
    fn ry_convention() {
        // Ry(2θ)|0⟩ = cos θ|0⟩ + sin θ|1⟩
        let mut c = Circuit::new(1);
        c.push(Gate::Ry { qubit: 0, angle: Angle::Param { index: 0, scale: 2.0 } });
        let s = run(&c, &[0.3]).unwrap();
        assert!((s.amps[0].re - 0.3f64.cos()).abs() < 1e-15);
        assert!((s.amps[1].re - 0.3f64.sin()).abs() < 1e-15);
        assert!(run(&c, &[]).is_err());
    }

    #[test]
    fn full_two_qubit_depolarizing() {
        let mut c = Circuit::new(3);
        c.push(Gate::H { qubit: 0 });
        c.push(Gate::Cnot { control: 0, target: 1 });
        let rho = run_noisy(&c, &[], NoiseModel { p1: 0.0, p2: 1.0, readout_eps: 0.0 }).unwrap();
        // marginal of qubits 0,1 is I/4
        for a in 0..4 {
            for b in 0..4 {
                let v = rho.get(a << 1, b << 1);
                let expect = if a == b { 0.25 } else { 0.0 };
                assert!((v.re - expect).abs() < 1e-12 && v.im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn readout_flip_distribution() {
        let mut p = vec![1.0, 0.0, 0.0, 0.0];
        apply_readout(&mut p, 2, 0.1);
        let expect = [0.81, 0.09, 0.09, 0.01];
        for (a, b) in p.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn sampling_total_and_determinism() {
        use rand::SeedableRng;
        let p = [0.1, 0.2, 0.3, 0.4];
        let mut r1 = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let mut r2 = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let a = sample_counts(&p, 1000, &mut r1);
        assert_eq!(a.iter().sum::<u64>(), 1000);
        assert_eq!(a, sample_counts(&p, 1000, &mut r2));
        assert_eq!(sample_counts(&[0.0, 1.0, 0.0], 17, &mut r1), vec![0, 17, 0]);
    }
}
