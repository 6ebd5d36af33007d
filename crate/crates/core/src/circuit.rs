//! Gate lists with parameter slots.

use serde::{Deserialize, Serialize};

use crate::error::{config, Result};

/// Rotation angle: fixed, or `scale * params[index]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Angle {
    Fixed(f64),
    Param { index: usize, scale: f64 },
}

impl Angle {
    pub fn resolve(&self, params: &[f64]) -> f64 {
        match *self {
            Angle::Fixed(a) => a,
            Angle::Param { index, scale } => scale * params[index],
        }
    }
}

/// Gates; `Ry(θ) = exp(−iθY/2)`, so `Ry(2θ) = exp(−iθY)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "lowercase")]
pub enum Gate {
    Ry {
        qubit: usize,
        angle: Angle,
    },
    /// Ry on `target` when `control` is 1.
    Cry {
        control: usize,
        target: usize,
        angle: Angle,
    },
    Cnot {
        control: usize,
        target: usize,
    },
    H {
        qubit: usize,
    },
    Sdg {
        qubit: usize,
    },
    X {
        qubit: usize,
    },
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Ry { qubit, .. } | Gate::H { qubit } | Gate::Sdg { qubit } | Gate::X { qubit } => vec![qubit],
            Gate::Cry { control, target, .. } | Gate::Cnot { control, target } => vec![control, target],
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self, Gate::Cry { .. } | Gate::Cnot { .. })
    }

    pub fn angle(&self) -> Option<Angle> {
        match *self {
            Gate::Ry { angle, .. } | Gate::Cry { angle, .. } => Some(angle),
            _ => None,
        }
    }
}

/// Which parameterized gate a parameter drives, for gradient rules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamGate {
    Ry { scale: f64 },
    Cry { scale: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
    pub n_params: usize,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self { n_qubits, gates: Vec::new(), n_params: 0 }
    }

    /// Appends a gate; parameter slots extend `n_params` as needed.
    pub fn push(&mut self, g: Gate) {
        for q in g.qubits() {
            assert!(q < self.n_qubits, "qubit {q} out of range for {} qubits", self.n_qubits);
        }
        if let Some(Angle::Param { index, .. }) = g.angle() {
            self.n_params = self.n_params.max(index + 1);
        }
        self.gates.push(g);
    }

    pub fn one_qubit_count(&self) -> usize {
        self.gates.iter().filter(|g| !g.is_two_qubit()).count()
    }

    pub fn two_qubit_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_two_qubit()).count()
    }

    pub fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.n_params {
            return config(format!("circuit takes {} parameters, got {}", self.n_params, params.len()));
        }
        Ok(())
    }

    /// Gate type driven by each parameter; every parameter must drive exactly one gate.
    pub fn param_gates(&self) -> Result<Vec<ParamGate>> {
        let mut out: Vec<Option<ParamGate>> = vec![None; self.n_params];
        for g in &self.gates {
            let (idx, pg) = match *g {
                Gate::Ry { angle: Angle::Param { index, scale }, .. } => (index, ParamGate::Ry { scale }),
                Gate::Cry { angle: Angle::Param { index, scale }, .. } => (index, ParamGate::Cry { scale }),
                _ => continue,
            };
            if out[idx].replace(pg).is_some() {
                return config(format!("parameter {idx} drives more than one gate"));
            }
        }
        out.into_iter()
            .enumerate()
            .map(|(i, p)| p.ok_or_else(|| crate::Error::Config(format!("parameter {i} drives no gate"))))
            .collect()
    }
}
