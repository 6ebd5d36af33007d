//! Truncated Hamiltonian H_{N,K} = T + V_K in the s-wave harmonic-oscillator basis.

use serde::{Deserialize, Serialize};

use crate::eigen;
use crate::error::{config, Result};

/// Nucleon mass in MeV.
pub const NUCLEON_MASS: f64 = 938.272029;
/// ħc in MeV·fm.
pub const HBAR_C: f64 = 197.3269804;

// Matrix elements keep the orbital quantum number symbolic; only s-waves are exposed.
const ELL: f64 = 0.0;

/// Two-body system: target of mass number `a_target` plus projectile of mass number `a_proj`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NuclearSystem {
    pub a_target: u32,
    pub a_proj: u32,
    pub nucleon_mass: f64,
    pub hbar_omega: f64,
    pub hbar_c: f64,
}

impl NuclearSystem {
    /// A neutron on a target of mass number `a_target`.
    pub fn neutron_on(a_target: u32, hbar_omega: f64) -> Self {
        Self { a_target, a_proj: 1, nucleon_mass: NUCLEON_MASS, hbar_omega, hbar_c: HBAR_C }
    }

    pub fn validate(&self) -> Result<()> {
        if self.a_target < 1 || self.a_proj < 1 {
            return config("mass numbers must be >= 1");
        }
        if !(self.hbar_omega > 0.0) || !(self.nucleon_mass > 0.0) || !(self.hbar_c > 0.0) {
            return config("hbar_omega, nucleon mass and hbar_c must be positive");
        }
        Ok(())
    }

    pub fn reduced_mass(&self) -> f64 {
        reduced_mass(self.a_target, self.a_proj, self.nucleon_mass)
    }

    /// Oscillator length squared b² in fm².
    pub fn b_sq(&self) -> f64 {
        oscillator_length_sq(self.reduced_mass(), self.hbar_omega, self.hbar_c)
    }
}

/// Central potential, either V0·exp(−c r²/b²) or a polynomial Σ v_k r^{2k}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PotentialSpec {
    /// `v0` in MeV, `c` dimensionless.
    Exponential { v0: f64, c: f64 },
    /// `v[k]` in MeV·fm^{-2k}.
    Polynomial { v: Vec<f64> },
}

impl PotentialSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            PotentialSpec::Exponential { v0, c } => {
                if !(*c >= 0.0 && c.is_finite()) || !v0.is_finite() {
                    return config("exponential potential requires finite V0 and c >= 0");
                }
            }
            PotentialSpec::Polynomial { v } => {
                if v.iter().any(|x| !x.is_finite()) {
                    return config("polynomial coefficients must be finite");
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSpec {
    pub system: NuclearSystem,
    pub potential: PotentialSpec,
    /// Basis size.
    pub n: usize,
    /// Potential truncation order.
    pub k: usize,
}

impl HamiltonianSpec {
    pub fn validate(&self) -> Result<()> {
        self.system.validate()?;
        self.potential.validate()?;
        if self.n < 2 {
            return config(format!("basis size N must be >= 2, got {}", self.n));
        }
        if let PotentialSpec::Polynomial { v } = &self.potential {
            if v.len() < self.k + 1 {
                return config(format!(
                    "polynomial potential has {} coefficients but K={} needs {}",
                    v.len(),
                    self.k,
                    self.k + 1
                ));
            }
        }
        Ok(())
    }

    pub fn with_nk(&self, n: usize, k: usize) -> Self {
        Self { n, k, ..self.clone() }
    }
}

/// Dense real square matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![0.0; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, x) in d.iter().enumerate() {
            m.set(i, i, *x);
        }
        m
    }

    /// Builds from rows; panics on ragged input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for r in rows {
            assert_eq!(r.len(), dim, "matrix must be square");
            data.extend_from_slice(r);
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn matmul(&self, other: &RealMatrix) -> RealMatrix {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = RealMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn add_scaled(&mut self, other: &RealMatrix, s: f64) {
        assert_eq!(self.dim, other.dim);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    /// Top-left `dim`×`dim` block.
    pub fn truncate(&self, dim: usize) -> RealMatrix {
        assert!(dim <= self.dim);
        let mut out = RealMatrix::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                out.set(i, j, self.get(i, j));
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Symmetric to 1e-12 relative to the largest entry.
    pub fn is_symmetric(&self) -> bool {
        let tol = 1e-12 * self.max_abs().max(f64::MIN_POSITIVE);
        (0..self.dim).all(|i| (0..i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }

    /// Largest |i−j| with a nonzero entry.
    pub fn bandwidth(&self) -> usize {
        let mut w = 0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                if self.get(i, j) != 0.0 {
                    w = w.max(i.abs_diff(j));
                }
            }
        }
        w
    }

    /// Rows separated by newlines, full round-trip precision.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim).map(|j| format!("{:?}", self.get(i, j))).collect();
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }
}

pub fn reduced_mass(a_target: u32, a_proj: u32, nucleon_mass: f64) -> f64 {
    let (a, b) = (a_target as f64, a_proj as f64);
    a * b / (a + b) * nucleon_mass
}

/// b² = (ħc)² / (μ ħω), in fm².
pub fn oscillator_length_sq(mu: f64, hbar_omega: f64, hbar_c: f64) -> f64 {
    hbar_c * hbar_c / (mu * hbar_omega)
}

/// ħω = 41/(A+1)^{1/3} MeV.
pub fn hbar_omega_rule(a_target: u32) -> f64 {
    41.0 / ((a_target as f64) + 1.0).cbrt()
}

fn r2_diag(n: usize) -> f64 {
    2.0 * n as f64 + ELL + 1.5
}

fn r2_off(n: usize) -> f64 {
    let n = n as f64;
    (n * (n + ELL + 0.5)).sqrt()
}

pub fn kinetic_matrix(dim: usize, hbar_omega: f64) -> RealMatrix {
    let mut t = RealMatrix::zeros(dim);
    let h = 0.5 * hbar_omega;
    for n in 0..dim {
        t.set(n, n, h * r2_diag(n));
        if n > 0 {
            let off = -h * r2_off(n);
            t.set(n, n - 1, off);
            t.set(n - 1, n, off);
        }
    }
    t
}

fn r2_matrix(dim: usize) -> RealMatrix {
    let mut m = RealMatrix::zeros(dim);
    for n in 0..dim {
        m.set(n, n, r2_diag(n));
        if n > 0 {
            let off = r2_off(n);
            m.set(n, n - 1, off);
            m.set(n - 1, n, off);
        }
    }
    m
}

/// How powers of r² are formed from the tridiagonal r² matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PowerConstruction {
    /// Power in a dimension padded by k, then truncated; exact matrix elements.
    #[default]
    Padded,
    /// Power of the already truncated N×N matrix; the last k rows lose intermediate states.
    Truncated,
}

/// (r/b)^{2k} in the first `dim` basis states, exact despite truncation.
pub fn r2k_matrix_dimensionless(dim: usize, k: usize) -> RealMatrix {
    r2k_matrix_with(dim, k, PowerConstruction::Padded)
}

pub fn r2k_matrix_with(dim: usize, k: usize, construction: PowerConstruction) -> RealMatrix {
    if k == 0 {
        return RealMatrix::identity(dim);
    }
    // k products of a tridiagonal matrix only reach k states beyond the block.
    let pad = match construction {
        PowerConstruction::Padded => k,
        PowerConstruction::Truncated => 0,
    };
    let base = r2_matrix(dim + pad);
    let mut acc = base.clone();
    for _ in 1..k {
        acc = acc.matmul(&base);
    }
    acc.truncate(dim)
}

/// Taylor coefficients V0 (−c)^k / k! for k = 0..=K.
pub fn exponential_coefficients(v0: f64, c: f64, k_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(k_max + 1);
    let mut term = v0;
    for k in 0..=k_max {
        if k > 0 {
            term *= -c / k as f64;
        }
        out.push(term);
    }
    out
}

pub fn assemble(spec: &HamiltonianSpec) -> Result<RealMatrix> {
    assemble_with(spec, PowerConstruction::Padded)
}

pub fn assemble_with(spec: &HamiltonianSpec, construction: PowerConstruction) -> Result<RealMatrix> {
    spec.validate()?;
    assemble_sized(spec, spec.n, construction)
}

/// H for basis size `dim` ≥ 1 with the system, potential and K of `spec`; `spec.n` is ignored.
pub fn assemble_sized(spec: &HamiltonianSpec, dim: usize, construction: PowerConstruction) -> Result<RealMatrix> {
    spec.with_nk(dim.max(2), spec.k).validate()?;
    if dim < 1 {
        return config("basis size must be >= 1");
    }
    let mut h = kinetic_matrix(dim, spec.system.hbar_omega);
    let coeffs: Vec<f64> = match &spec.potential {
        PotentialSpec::Exponential { v0, c } => exponential_coefficients(*v0, *c, spec.k),
        PotentialSpec::Polynomial { v } => {
            let b2 = spec.system.b_sq();
            v[..=spec.k].iter().enumerate().map(|(k, vk)| vk * b2.powi(k as i32)).collect()
        }
    };
    for (k, ck) in coeffs.iter().enumerate() {
        h.add_scaled(&r2k_matrix_with(dim, k, construction), *ck);
    }
    Ok(h)
}

pub fn lowest_eigenvalue(m: &RealMatrix) -> Result<f64> {
    let vals = eigen::eigenvalues(m)?;
    Ok(vals[0])
}

/// Exponential-potential parameters (V0/ħω, c^{-1/2}) for neutron + carbon isotopes.
pub fn n_carbon_parameters(a_target: u32) -> Option<(f64, f64)> {
    match a_target {
        10 => Some((-0.650, 5.43)),
        12 => Some((-0.283, 5.35)),
        14 => Some((-0.242, 5.0)),
        16 => Some((-0.175, 4.7)),
        18 => Some((-0.192, 4.6)),
        _ => None,
    }
}

/// Neutron + carbon-A with the exponential fit and the ħω rule.
pub fn n_carbon_spec(a_target: u32, n: usize, k: usize) -> Result<HamiltonianSpec> {
    let Some((ratio, c_inv_sqrt)) = n_carbon_parameters(a_target) else {
        return config(format!("no carbon parameters for A={a_target}"));
    };
    let hw = hbar_omega_rule(a_target);
    Ok(HamiltonianSpec {
        system: NuclearSystem::neutron_on(a_target, hw),
        potential: PotentialSpec::Exponential { v0: ratio * hw, c: 1.0 / (c_inv_sqrt * c_inv_sqrt) },
        n,
        k,
    })
}

/// Local n+α potential coefficients (MeV·fm^{-2k}) at ħω = 12 MeV.
pub const N_ALPHA_HW12: [f64; 13] =
    [-57.207, 6.653, 0.086, -0.013, -0.001, -1.8e-5, 2.3e-6, 2.1e-7, 5.7e-9, -3.6e-10, -4.3e-11, -1.5e-12, 5.0e-14];

/// Local n+α potential coefficients (MeV·fm^{-2k}) at ħω = 16 MeV.
pub const N_ALPHA_HW16: [f64; 13] =
    [-59.571, 6.448, 0.133, -0.007, -0.001, -4.8e-5, 4.1e-7, 2.3e-7, 1.5e-8, 3.0e-10, -3.6e-11, -3.8e-12, -1.5e-13];

/// Neutron + α with the tabulated local polynomial potential; `hbar_omega` is 12 or 16.
pub fn n_alpha_spec(hbar_omega: u32, n: usize, k: usize) -> Result<HamiltonianSpec> {
    let v = match hbar_omega {
        12 => N_ALPHA_HW12.to_vec(),
        16 => N_ALPHA_HW16.to_vec(),
        _ => return config(format!("no n+alpha potential tabulated at hbar_omega={hbar_omega}")),
    };
    Ok(HamiltonianSpec {
        system: NuclearSystem::neutron_on(4, hbar_omega as f64),
        potential: PotentialSpec::Polynomial { v },
        n,
        k,
    })
}

/// Small exponential-potential demo system: V0 = −2.79 MeV, c = 0.05, ħω = 15.95 MeV, N = 4, K = 2.
pub fn demo_spec() -> HamiltonianSpec {
    HamiltonianSpec {
        system: NuclearSystem::neutron_on(16, 15.95),
        potential: PotentialSpec::Exponential { v0: -2.79, c: 0.05 },
        n: 4,
        k: 2,
    }
}
