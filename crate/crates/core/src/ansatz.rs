//! Real-amplitude ansatz circuits for one-hot and compact encodings.

use crate::circuit::{Angle, Circuit, Gate};
use crate::error::{config, Result};

/// Recursive one-hot ansatz on N qubits with N−1 angles θ. Fock amplitude m is
/// sin θ₁ ⋯ sin θ_m · cos θ_{m+1} (no cosine for the last state); θ = 0 gives |0⟩.
pub fn onehot_ansatz(dim: usize) -> Result<Circuit> {
    if dim < 2 {
        return config(format!("one-hot ansatz needs N >= 2, got {dim}"));
    }
    let mut c = Circuit::new(dim);
    c.push(Gate::X { qubit: 0 });
    c.push(Gate::Ry { qubit: 1, angle: Angle::Param { index: 0, scale: 2.0 } });
    c.push(Gate::Cnot { control: 1, target: 0 });
    for m in 1..dim - 1 {
        c.push(Gate::Cry { control: m, target: m + 1, angle: Angle::Param { index: m, scale: 2.0 } });
        c.push(Gate::Cnot { control: m + 1, target: m });
    }
    Ok(c)
}

/// `layers` repetitions of [Ry on every qubit, CNOT chain i → i+1].
pub fn layered_ansatz(n: usize, layers: usize) -> Result<Circuit> {
    if n < 1 || layers < 1 {
        return config(format!("layered ansatz needs n >= 1 and L >= 1, got n={n}, L={layers}"));
    }
    let mut c = Circuit::new(n);
    for l in 0..layers {
        for q in 0..n {
            c.push(Gate::Ry { qubit: q, angle: Angle::Param { index: l * n + q, scale: 1.0 } });
        }
        for q in 0..n.saturating_sub(1) {
            c.push(Gate::Cnot { control: q, target: q + 1 });
        }
    }
    Ok(c)
}

/// Closed-form one-hot amplitudes for angles θ (Fock order).
pub fn onehot_amplitudes(theta: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(theta.len() + 1);
    let mut s = 1.0;
    for t in theta {
        out.push(s * t.cos());
        s *= t.sin();
    }
    out.push(s);
    out
}
