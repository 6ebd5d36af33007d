//! Pauli strings, real Pauli sums and the dense-matrix oracle.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{config, contract, Error, Result};

/// Coefficients with magnitude at or below this are dropped.
pub const PRUNE_TOL: f64 = 1e-12;
/// Largest qubit count accepted by the dense oracle.
pub const DENSE_MAX_QUBITS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Global phase in {1, i, −1, −i}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    One,
    I,
    MinusOne,
    MinusI,
}

impl Phase {
    pub fn from_power(k: u32) -> Self {
        match k % 4 {
            0 => Phase::One,
            1 => Phase::I,
            2 => Phase::MinusOne,
            _ => Phase::MinusI,
        }
    }

    pub fn power(self) -> u32 {
        match self {
            Phase::One => 0,
            Phase::I => 1,
            Phase::MinusOne => 2,
            Phase::MinusI => 3,
        }
    }

    pub fn to_complex(self) -> Complex64 {
        match self {
            Phase::One => Complex64::new(1.0, 0.0),
            Phase::I => Complex64::new(0.0, 1.0),
            Phase::MinusOne => Complex64::new(-1.0, 0.0),
            Phase::MinusI => Complex64::new(0.0, -1.0),
        }
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase::from_power(self.power() + rhs.power())
    }
}

/// n-qubit Pauli string. Qubit q lives at bit `n-1-q` of the masks so that the
/// masks act directly on basis-state indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: u64,
    z: u64,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        assert!(n <= 64, "at most 64 qubits");
        Self { n, x: 0, z: 0 }
    }

    /// Builds from masks in basis-index convention (qubit 0 = most significant bit).
    pub fn from_masks(n: usize, x: u64, z: u64) -> Self {
        assert!(n <= 64, "at most 64 qubits");
        let lim = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        assert!(x & !lim == 0 && z & !lim == 0, "mask exceeds qubit count");
        Self { n, x, z }
    }

    pub fn from_letters(letters: &[Pauli]) -> Self {
        let n = letters.len();
        let mut p = Self::identity(n);
        for (q, l) in letters.iter().enumerate() {
            p.set(q, *l);
        }
        p
    }

    /// A single letter on qubit `q`, identity elsewhere.
    pub fn single(n: usize, q: usize, l: Pauli) -> Self {
        let mut p = Self::identity(n);
        p.set(q, l);
        p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    #[inline]
    fn bit(&self, q: usize) -> u64 {
        1u64 << (self.n - 1 - q)
    }

    pub fn get(&self, q: usize) -> Pauli {
        let b = self.bit(q);
        Pauli::from_bits(self.x & b != 0, self.z & b != 0)
    }

    pub fn set(&mut self, q: usize, l: Pauli) {
        let b = self.bit(q);
        let (x, z) = l.bits();
        self.x = if x { self.x | b } else { self.x & !b };
        self.z = if z { self.z | b } else { self.z & !b };
    }

    pub fn letters(&self) -> Vec<Pauli> {
        (0..self.n).map(|q| self.get(q)).collect()
    }

    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    pub fn is_diagonal(&self) -> bool {
        self.x == 0
    }

    /// Qubits carrying X or Y, ascending.
    pub fn x_support(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| self.x & self.bit(q) != 0).collect()
    }

    /// Non-identity qubits, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| (self.x | self.z) & self.bit(q) != 0).collect()
    }

    /// P|b⟩ = phase·|b'⟩.
    #[inline]
    pub fn apply(&self, b: u64) -> (Complex64, u64) {
        let mut k = self.y_count();
        if (b & self.z).count_ones() % 2 == 1 {
            k += 2;
        }
        (Phase::from_power(k).to_complex(), b ^ self.x)
    }

    fn check_same(&self, other: &PauliString) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Config(format!("qubit count mismatch: {} vs {}", self.n, other.n)));
        }
        Ok(())
    }

    /// P·Q = phase·R.
    pub fn multiply(&self, other: &PauliString) -> Result<(Phase, PauliString)> {
        self.check_same(other)?;
        let mut k = 0u32;
        for q in 0..self.n {
            k += letter_product_phase(self.get(q), other.get(q));
        }
        Ok((Phase::from_power(k), PauliString { n: self.n, x: self.x ^ other.x, z: self.z ^ other.z }))
    }

    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        self.check_same(other)?;
        Ok(((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0)
    }

    pub fn qubitwise_commutes(&self, other: &PauliString) -> Result<bool> {
        self.check_same(other)?;
        Ok((0..self.n).all(|q| {
            let (a, b) = (self.get(q), other.get(q));
            a == Pauli::I || b == Pauli::I || a == b
        }))
    }

    pub fn dense_matrix(&self) -> Result<ComplexMatrix> {
        guard_dense(self.n)?;
        let dim = 1usize << self.n;
        let mut m = ComplexMatrix::zeros(dim);
        for b in 0..dim as u64 {
            let (ph, out) = self.apply(b);
            m.set(out as usize, b as usize, ph);
        }
        Ok(m)
    }
}

// i-power of the single-qubit product a·b.
fn letter_product_phase(a: Pauli, b: Pauli) -> u32 {
    use Pauli::*;
    match (a, b) {
        (X, Y) | (Y, Z) | (Z, X) => 1,
        (Y, X) | (Z, Y) | (X, Z) => 3,
        _ => 0,
    }
}

impl Ord for PauliString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n.cmp(&other.n).then_with(|| {
            for q in 0..self.n {
                match self.get(q).cmp(&other.get(q)) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n {
            write!(f, "{}", self.get(q).as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() || s.len() > 64 {
            return config(format!("bad Pauli string length: {s:?}"));
        }
        let letters = s
            .chars()
            .map(|c| match c {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                _ => config(format!("bad Pauli letter {c:?} in {s:?}")),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliString::from_letters(&letters))
    }
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Real linear combination of n-qubit Pauli strings, kept in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n: usize,
    terms: BTreeMap<PauliString, f64>,
}

impl PauliSum {
    pub fn new(n: usize) -> Self {
        Self { n, terms: BTreeMap::new() }
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (PauliString, f64)>) -> Result<Self> {
        let mut s = Self::new(n);
        for (p, c) in terms {
            s.add(p, c)?;
        }
        s.prune();
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&mut self, p: PauliString, c: f64) -> Result<()> {
        if p.n() != self.n {
            return config(format!("term {p} does not act on {} qubits", self.n));
        }
        if !c.is_finite() {
            return contract(format!("non-finite coefficient for {p}"));
        }
        *self.terms.entry(p).or_insert(0.0) += c;
        Ok(())
    }

    /// Adds a complex coefficient; the imaginary part must vanish.
    pub fn add_complex(&mut self, p: PauliString, c: Complex64) -> Result<()> {
        if c.im.abs() > 1e-10 * c.norm().max(1.0) {
            return contract(format!("coefficient of {p} is not real: {c}"));
        }
        self.add(p, c.re)
    }

    pub fn add_sum(&mut self, other: &PauliSum, scale: f64) -> Result<()> {
        for (p, c) in &other.terms {
            self.add(*p, scale * c)?;
        }
        self.prune();
        Ok(())
    }

    pub fn prune(&mut self) {
        self.terms.retain(|_, c| c.abs() > PRUNE_TOL);
    }

    pub fn coeff(&self, p: &PauliString) -> f64 {
        self.terms.get(p).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliString, &f64)> {
        self.terms.iter()
    }

    pub fn strings(&self) -> Vec<PauliString> {
        self.terms.keys().copied().collect()
    }

    pub fn dense_matrix(&self) -> Result<ComplexMatrix> {
        guard_dense(self.n)?;
        let dim = 1usize << self.n;
        let mut m = ComplexMatrix::zeros(dim);
        for (p, c) in &self.terms {
            for b in 0..dim as u64 {
                let (ph, out) = p.apply(b);
                let e = m.get(out as usize, b as usize) + ph * c;
                m.set(out as usize, b as usize, e);
            }
        }
        Ok(m)
    }

    /// True when every pair of coefficients agrees within `tol`.
    pub fn approx_eq(&self, other: &PauliSum, tol: f64) -> bool {
        if self.n != other.n {
            return false;
        }
        let keys: std::collections::BTreeSet<_> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.into_iter().all(|p| (self.coeff(p) - other.coeff(p)).abs() <= tol)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermRepr {
    pauli: PauliString,
    coeff: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SumRepr {
    n: usize,
    terms: Vec<TermRepr>,
}

impl Serialize for PauliSum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SumRepr { n: self.n, terms: self.terms.iter().map(|(p, c)| TermRepr { pauli: *p, coeff: *c }).collect() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PauliSum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = SumRepr::deserialize(d)?;
        PauliSum::from_terms(r.n, r.terms.into_iter().map(|t| (t.pauli, t.coeff))).map_err(serde::de::Error::custom)
    }
}

fn guard_dense(n: usize) -> Result<()> {
    if n > DENSE_MAX_QUBITS {
        return config(format!("dense matrices limited to {DENSE_MAX_QUBITS} qubits, got {n}"));
    }
    Ok(())
}

/// Dense complex square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![Complex64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_real(m: &crate::hamiltonian::RealMatrix) -> Self {
        let dim = m.dim();
        Self { dim, data: m.as_slice().iter().map(|x| Complex64::new(*x, 0.0)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> ComplexMatrix {
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        let n = self.dim;
        (0..n).all(|i| (0..n).all(|j| i == j || self.get(i, j).norm() <= tol))
    }

    pub fn kron(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let (a, b) = (self.dim, other.dim);
        let mut out = ComplexMatrix::zeros(a * b);
        for i in 0..a {
            for j in 0..a {
                let s = self.get(i, j);
                for k in 0..b {
                    for l in 0..b {
                        out.set(i * b + k, j * b + l, s * other.get(k, l));
                    }
                }
            }
        }
        out
    }
}

/// Pauli coefficients c_P = Tr[P M]/2^n of a Hermitian matrix.
pub fn pauli_decompose(m: &ComplexMatrix) -> Result<PauliSum> {
    let dim = m.dim();
    if dim == 0 || !dim.is_power_of_two() {
        return config(format!("matrix dimension {dim} is not a power of two"));
    }
    let n = dim.trailing_zeros() as usize;
    guard_dense(n)?;
    if !m.is_hermitian(1e-10) {
        return contract("pauli_decompose input is not Hermitian");
    }
    let mut sum = PauliSum::new(n);
    let norm = 1.0 / dim as f64;
    let mut w = vec![Complex64::new(0.0, 0.0); dim];
    for x in 0..dim {
        // Tr[P M] = Σ_d i^{#Y} (−1)^{d·z} M[d, d^x]; the z-sum is a Walsh–Hadamard transform.
        for (d, wd) in w.iter_mut().enumerate() {
            *wd = m.get(d, d ^ x);
        }
        walsh_hadamard(&mut w);
        for (z, wz) in w.iter().enumerate() {
            let p = PauliString::from_masks(n, x as u64, z as u64);
            let c = Phase::from_power(p.y_count()).to_complex() * wz * norm;
            if c.norm() > PRUNE_TOL {
                sum.add_complex(p, c)?;
            }
        }
    }
    sum.prune();
    Ok(sum)
}

fn walsh_hadamard(v: &mut [Complex64]) {
    let mut h = 1;
    while h < v.len() {
        for i in (0..v.len()).step_by(2 * h) {
            for j in i..i + h {
                let (a, b) = (v[j], v[j + h]);
                v[j] = a + b;
                v[j + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// |i⟩⟨i| on n qubits as a sum of 2^n I/Z strings.
pub fn projector_decompose(i: u64, n: usize) -> Result<PauliSum> {
    if n == 0 || n > 63 || i >= (1u64 << n) {
        return config(format!("projector index {i} out of range for {n} qubits"));
    }
    let c = 1.0 / (1u64 << n) as f64;
    PauliSum::from_terms(
        n,
        (0..(1u64 << n)).map(|j| {
            let s = if (i & j).count_ones() % 2 == 0 { c } else { -c };
            (PauliString::from_masks(n, 0, j), s)
        }),
    )
}
