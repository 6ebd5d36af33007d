//! Helpers shared by the integration tests: random matrices and dense oracles.
#![allow(dead_code)]

use hovqe::circuit::Circuit;
use hovqe::encoding::CodeTable;
use hovqe::hamiltonian::RealMatrix;
use hovqe::pauli::{ComplexMatrix, PauliString, PauliSum};
use hovqe::sim::StateVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Property-test settings without on-disk regression files.
pub fn quiet(cases: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config { cases, failure_persistence: None, ..Default::default() }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Symmetric matrix with entries uniform in [0.5, 1.5] inside the band |i−j| ≤ max(k, 1).
pub fn generic_banded(dim: usize, k: usize, rng: &mut impl Rng) -> RealMatrix {
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

/// Symmetric banded matrix with entries of either sign.
pub fn signed_banded(dim: usize, k: usize, rng: &mut impl Rng) -> RealMatrix {
    let mut m = generic_banded(dim, k, rng);
    for i in 0..dim {
        for j in i..dim {
            if m.get(i, j) != 0.0 && rng.gen::<bool>() {
                let v = -m.get(i, j);
                m.set(i, j, v);
                m.set(j, i, v);
            }
        }
    }
    m
}

/// H placed on the code words of a 2^n-dimensional space.
pub fn embed(h: &RealMatrix, code: &CodeTable) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(1 << code.n_qubits);
    for a in 0..h.dim() {
        for b in 0..h.dim() {
            let v = h.get(a, b);
            if v != 0.0 {
                m.set(code.entries[a] as usize, code.entries[b] as usize, Complex64::new(v, 0.0));
            }
        }
    }
    m
}

/// Dense unitary of a parameter-free circuit, column b = circuit applied to |b⟩.
pub fn unitary(c: &Circuit, params: &[f64]) -> ComplexMatrix {
    let dim = 1usize << c.n_qubits;
    let mut u = ComplexMatrix::zeros(dim);
    for b in 0..dim {
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[b] = Complex64::new(1.0, 0.0);
        let mut s = StateVector::from_amplitudes(amps).unwrap();
        for g in &c.gates {
            s.apply(g, params);
        }
        for (r, a) in s.amps.iter().enumerate() {
            u.set(r, b, *a);
        }
    }
    u
}

/// R·P·R† for the measurement rotation R.
pub fn conjugated(rotation: &Circuit, p: &PauliString) -> ComplexMatrix {
    let u = unitary(rotation, &[]);
    u.matmul(&p.dense_matrix().unwrap()).matmul(&u.adjoint())
}

/// Random state with real or complex amplitudes.
pub fn random_state(n: usize, rng: &mut impl Rng) -> StateVector {
    let mut amps: Vec<Complex64> =
        (0..1 << n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    amps.iter_mut().for_each(|a| *a /= norm);
    StateVector::from_amplitudes(amps).unwrap()
}

/// Letter strings written with qubit 0 rightmost, converted to this crate's order.
pub fn reversed_sum(n: usize, printed: &[(&str, f64)]) -> PauliSum {
    let terms = printed.iter().map(|(s, c)| (s.chars().rev().collect::<String>().parse().unwrap(), *c));
    PauliSum::from_terms(n, terms).unwrap()
}

pub fn number_of_nonzero_terms(s: &PauliSum) -> usize {
    s.iter().filter(|(_, c)| c.abs() > 1e-9).count()
}
