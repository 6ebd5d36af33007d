//! Qubit-wise (QC) and distance-grouped (DGC) commuting sets with their
//! measurement circuits, plus set-count and two-qubit-gate formulas.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate};
use crate::encoding::{gray_weight, n_bar, EncodingKind};
use crate::error::{config, contract, Result};
use crate::pauli::{Pauli, PauliString, PauliSum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Qc,
    Dgc,
}

/// Structure of the sum being grouped, when known.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QcHint {
    /// Arbitrary sum: greedy first-fit.
    None,
    /// One-hot encoded: all-Z, all-X and all-Y sets.
    OneHot,
    /// Binary or Gray encoded: one set per X/Y letter pattern.
    Compact,
}

impl QcHint {
    pub fn for_encoding(kind: EncodingKind) -> Self {
        match kind {
            EncodingKind::OneHot => QcHint::OneHot,
            _ => QcHint::Compact,
        }
    }
}

/// Mutually measurable terms with the circuit that rotates them to Z-type operators.
#[derive(Debug, Clone)]
pub struct CommutingGroup {
    pub scheme: Scheme,
    pub members: Vec<PauliString>,
    pub coeffs: Vec<f64>,
    /// X/Y support shared by all members (DGC structural groups only).
    pub flip_pattern: Option<Vec<usize>>,
    /// Gates applied before a computational-basis measurement.
    pub rotation: Circuit,
    /// False for fallback groups of terms outside the expected structure.
    pub structural: bool,
    // member i after rotation is diag[i].0 · Z^{diag[i].1}
    diag: Vec<(f64, u64)>,
    values: Vec<f64>,
}

impl CommutingGroup {
    pub fn new(
        scheme: Scheme,
        terms: Vec<(PauliString, f64)>,
        flip_pattern: Option<Vec<usize>>,
        rotation: Circuit,
        structural: bool,
    ) -> Result<Self> {
        let n = rotation.n_qubits;
        if n > 24 {
            return config("groups are limited to 24 qubits");
        }
        let mut diag = Vec::with_capacity(terms.len());
        for (p, _) in &terms {
            if p.n() != n {
                return config("group member and rotation qubit counts differ");
            }
            diag.push(conjugate_to_diagonal(p, &rotation)?);
        }
        let dim = 1usize << n;
        let mut values = vec![0.0; dim];
        for ((_, c), (s, z)) in terms.iter().zip(&diag) {
            for (b, v) in values.iter_mut().enumerate() {
                let par = if (b as u64 & z).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                *v += c * s * par;
            }
        }
        let (members, coeffs) = terms.into_iter().unzip();
        Ok(Self { scheme, members, coeffs, flip_pattern, rotation, structural, diag, values })
    }

    pub fn n_qubits(&self) -> usize {
        self.rotation.n_qubits
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// ±1 eigenvalue of member `i` on measurement outcome `outcome`.
    pub fn sign(&self, i: usize, outcome: u64) -> f64 {
        let (s, z) = self.diag[i];
        if (outcome & z).count_ones() % 2 == 0 {
            s
        } else {
            -s
        }
    }

    /// Per-member ±1 vectors indexed by outcome.
    pub fn sign_table(&self) -> Vec<Vec<i8>> {
        let dim = 1u64 << self.n_qubits();
        (0..self.len()).map(|i| (0..dim).map(|b| self.sign(i, b) as i8).collect()).collect()
    }

    /// Σ coeff·sign for every outcome.
    pub fn outcome_values(&self) -> &[f64] {
        &self.values
    }

    /// Every member is a multiple of the identity after rotation.
    pub fn is_constant(&self) -> bool {
        self.diag.iter().all(|(_, z)| *z == 0)
    }

    pub fn two_qubit_gate_count(&self) -> usize {
        self.rotation.two_qubit_count()
    }
}

// Pauli frame (x, z, negative) conjugated through Clifford gates.
struct Frame {
    n: usize,
    x: u64,
    z: u64,
    neg: bool,
}

impl Frame {
    fn b(&self, q: usize) -> u64 {
        1u64 << (self.n - 1 - q)
    }

    fn h(&mut self, q: usize) {
        let b = self.b(q);
        let (xq, zq) = (self.x & b != 0, self.z & b != 0);
        self.neg ^= xq && zq;
        self.x = (self.x & !b) | if zq { b } else { 0 };
        self.z = (self.z & !b) | if xq { b } else { 0 };
    }

    fn s(&mut self, q: usize) {
        let b = self.b(q);
        let (xq, zq) = (self.x & b != 0, self.z & b != 0);
        self.neg ^= xq && zq;
        if xq {
            self.z ^= b;
        }
    }

    fn x_gate(&mut self, q: usize) {
        self.neg ^= self.z & self.b(q) != 0;
    }

    fn cnot(&mut self, c: usize, t: usize) {
        let (bc, bt) = (self.b(c), self.b(t));
        let (xc, zc) = (self.x & bc != 0, self.z & bc != 0);
        let (xt, zt) = (self.x & bt != 0, self.z & bt != 0);
        self.neg ^= xc && zt && (xt == zc);
        if xc {
            self.x ^= bt;
        }
        if zt {
            self.z ^= bc;
        }
    }
}

/// W P W† for the Clifford measurement circuit W; must be ±Z-type.
fn conjugate_to_diagonal(p: &PauliString, w: &Circuit) -> Result<(f64, u64)> {
    let mut f = Frame { n: p.n(), x: p.x_mask(), z: p.z_mask(), neg: false };
    for g in &w.gates {
        match *g {
            Gate::H { qubit } => f.h(qubit),
            Gate::Sdg { qubit } => {
                for _ in 0..3 {
                    f.s(qubit);
                }
            }
            Gate::X { qubit } => f.x_gate(qubit),
            Gate::Cnot { control, target } => f.cnot(control, target),
            Gate::Ry { .. } | Gate::Cry { .. } => return contract("measurement circuits must be Clifford"),
        }
    }
    if f.x != 0 {
        return contract(format!("rotation does not diagonalize {p}"));
    }
    Ok((if f.neg { -1.0 } else { 1.0 }, f.z))
}

/// Per-qubit basis change: H for X, Sdg then H for Y.
pub fn qc_rotation(members: &[PauliString], n: usize) -> Result<Circuit> {
    let mut c = Circuit::new(n);
    for q in 0..n {
        let mut letter = Pauli::I;
        for p in members {
            let l = p.get(q);
            if l == Pauli::I || l == letter {
                continue;
            }
            if letter == Pauli::I {
                letter = l;
            } else {
                return contract(format!("members disagree on qubit {q}; not qubit-wise commuting"));
            }
        }
        match letter {
            Pauli::X => c.push(Gate::H { qubit: q }),
            Pauli::Y => {
                c.push(Gate::Sdg { qubit: q });
                c.push(Gate::H { qubit: q });
            }
            _ => {}
        }
    }
    Ok(c)
}

/// Inverse GHZ preparation on the qubits `f`: CNOTs from the lowest qubit, then H on it.
pub fn dgc_rotation(f: &[usize], n: usize) -> Result<Circuit> {
    let Some(&lead) = f.iter().min() else {
        return config("empty flip pattern needs no rotation");
    };
    let mut targets: Vec<usize> = f.iter().copied().filter(|&q| q != lead).collect();
    targets.sort_unstable();
    targets.dedup();
    if targets.iter().any(|&q| q >= n) || lead >= n {
        return config("flip pattern qubit out of range");
    }
    let mut c = Circuit::new(n);
    // the fan-out CNOTs commute; they are listed in reverse of the preparation order
    for &t in targets.iter().rev() {
        c.push(Gate::Cnot { control: lead, target: t });
    }
    c.push(Gate::H { qubit: lead });
    Ok(c)
}

fn qc_letter_compatible(group: &[(PauliString, f64)], p: &PauliString) -> bool {
    group.iter().all(|(m, _)| m.qubitwise_commutes(p).unwrap_or(false))
}

fn greedy_qc(terms: Vec<(PauliString, f64)>, n: usize, structural: bool) -> Result<Vec<CommutingGroup>> {
    let mut bins: Vec<Vec<(PauliString, f64)>> = Vec::new();
    for t in terms {
        match bins.iter_mut().find(|b| qc_letter_compatible(b, &t.0)) {
            Some(b) => b.push(t),
            None => bins.push(vec![t]),
        }
    }
    bins.into_iter()
        .map(|b| {
            let members: Vec<PauliString> = b.iter().map(|(p, _)| *p).collect();
            let rot = qc_rotation(&members, n)?;
            CommutingGroup::new(Scheme::Qc, b, None, rot, structural)
        })
        .collect()
}

fn keyed<K: Ord + Copy>(sum: &PauliSum, key: impl Fn(&PauliString) -> K) -> Vec<Vec<(PauliString, f64)>> {
    let mut order: Vec<K> = Vec::new();
    let mut map: BTreeMap<K, Vec<(PauliString, f64)>> = BTreeMap::new();
    for (p, c) in sum.iter() {
        let k = key(p);
        let e = map.entry(k).or_default();
        if e.is_empty() {
            order.push(k);
        }
        e.push((*p, *c));
    }
    order.into_iter().map(|k| map.remove(&k).unwrap()).collect()
}

fn onehot_class(p: &PauliString) -> u8 {
    let l = p.letters();
    if l.iter().all(|x| matches!(x, Pauli::I | Pauli::Z)) {
        0
    } else if l.iter().all(|x| matches!(x, Pauli::I | Pauli::X)) {
        1
    } else if l.iter().all(|x| matches!(x, Pauli::I | Pauli::Y)) {
        2
    } else {
        3
    }
}

/// Qubit-wise commuting sets.
pub fn qc_groups(sum: &PauliSum, hint: QcHint) -> Result<Vec<CommutingGroup>> {
    let n = sum.n();
    let buckets = match hint {
        QcHint::None => return greedy_qc(sum.iter().map(|(p, c)| (*p, *c)).collect(), n, false),
        QcHint::OneHot => keyed(sum, onehot_class),
        // X/Y letters in place, Z read as I
        QcHint::Compact => keyed(sum, |p| (p.x_mask(), p.x_mask() & p.z_mask())),
    };
    let mut out = Vec::new();
    let mut leftovers = Vec::new();
    for b in buckets {
        if hint == QcHint::OneHot && onehot_class(&b[0].0) == 3 {
            leftovers.extend(b);
            continue;
        }
        let members: Vec<PauliString> = b.iter().map(|(p, _)| *p).collect();
        let rot = qc_rotation(&members, n)?;
        out.push(CommutingGroup::new(Scheme::Qc, b, None, rot, true)?);
    }
    out.extend(greedy_qc(leftovers, n, false)?);
    Ok(out)
}

/// Distance-grouped commuting sets keyed by X/Y support.
pub fn dgc_groups(sum: &PauliSum) -> Result<Vec<CommutingGroup>> {
    let n = sum.n();
    let mut out = Vec::new();
    let mut leftovers = Vec::new();
    for b in keyed(sum, |p| p.x_mask()) {
        let (good, bad): (Vec<_>, Vec<_>) = b.into_iter().partition(|(p, _)| p.y_count() % 2 == 0);
        leftovers.extend(bad);
        if good.is_empty() {
            continue;
        }
        let f = good[0].0.x_support();
        let rot = if f.is_empty() { Circuit::new(n) } else { dgc_rotation(&f, n)? };
        out.push(CommutingGroup::new(Scheme::Dgc, good, Some(f), rot, true)?);
    }
    for mut g in greedy_qc(leftovers, n, false)? {
        g.scheme = Scheme::Dgc;
        out.push(g);
    }
    Ok(out)
}

/// Groups under the requested scheme.
pub fn group(sum: &PauliSum, scheme: Scheme, hint: QcHint) -> Result<Vec<CommutingGroup>> {
    match scheme {
        Scheme::Qc => qc_groups(sum, hint),
        Scheme::Dgc => dgc_groups(sum),
    }
}

fn band(k: usize) -> usize {
    k.max(1)
}

pub fn qc_count_binary(n: usize, k: usize) -> usize {
    let half = 1usize << (n - 1);
    if k > half {
        return (1 + 3usize.pow(n as u32)) / 2;
    }
    1 + (1..=band(k))
        .map(|j| {
            let w = ((1usize << n) - j).count_ones() as usize;
            (1usize << w) - (1usize << (w - n_bar(n, j)))
        })
        .sum::<usize>()
}

pub fn qc_count_gray(n: usize, k: usize) -> usize {
    let half = 1usize << (n - 1);
    if k > half {
        return (1 + 3usize.pow(n as u32)) / 2;
    }
    1 + (1..=band(k)).map(|j| n_bar(n, j) << gray_weight(j - 1)).sum::<usize>()
}

pub fn dgc_count(n: usize, k: usize) -> usize {
    let half = 1usize << (n - 1);
    if k > half {
        return 1 << n;
    }
    1 + (1..=band(k)).map(|j| n_bar(n, j)).sum::<usize>()
}

pub fn twoqubit_count_gray(n: usize, k: usize) -> usize {
    let half = 1usize << (n - 1);
    if k > half {
        return twoqubit_saturation(n);
    }
    (1..=band(k)).map(|j| n_bar(n, j) * gray_weight(j - 1) as usize).sum()
}

pub fn twoqubit_count_binary(n: usize, k: usize) -> usize {
    let half = 1usize << (n - 1);
    if k > half {
        return twoqubit_saturation(n);
    }
    let twice: usize = (1..=band(k))
        .map(|j| {
            let nb = n_bar(n, j);
            let w = ((1usize << n) - j).count_ones() as usize;
            nb * (2 * w - 1 - nb)
        })
        .sum();
    twice / 2
}

// 1 + 2^{n−1}(n−2), written to stay in unsigned arithmetic at n = 1.
fn twoqubit_saturation(n: usize) -> usize {
    (1 + (1usize << (n - 1)) * n) - (1usize << n)
}
