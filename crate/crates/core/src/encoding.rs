//! One-hot, binary and Gray encodings of a banded Hamiltonian, flip sequences
//! and Pauli-term counts.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{config, contract, Error, Result};
use crate::hamiltonian::RealMatrix;
use crate::pauli::{pauli_decompose, ComplexMatrix, Pauli, PauliString, PauliSum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EncodingKind {
    #[serde(alias = "one-hot", alias = "one_hot")]
    OneHot,
    Binary,
    Gray,
}

impl fmt::Display for EncodingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EncodingKind::OneHot => "onehot",
            EncodingKind::Binary => "binary",
            EncodingKind::Gray => "gray",
        })
    }
}

impl FromStr for EncodingKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "onehot" | "one-hot" | "one_hot" | "oh" => Ok(EncodingKind::OneHot),
            "binary" | "bin" => Ok(EncodingKind::Binary),
            "gray" => Ok(EncodingKind::Gray),
            _ => config(format!("unknown encoding {s:?}")),
        }
    }
}

/// Renders `v` as `n` characters, qubit 0 first.
pub fn bits_to_string(v: u64, n: usize) -> String {
    (0..n).map(|q| if v >> (n - 1 - q) & 1 == 1 { '1' } else { '0' }).collect()
}

/// Ordered code words; entry m encodes Fock state |m⟩. Words are stored as
/// basis-state indices (qubit 0 = most significant bit).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeTable {
    pub kind: EncodingKind,
    pub n_qubits: usize,
    pub entries: Vec<u64>,
}

impl CodeTable {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn word(&self, m: usize) -> String {
        bits_to_string(self.entries[m], self.n_qubits)
    }

    pub fn words(&self) -> Vec<String> {
        (0..self.len()).map(|m| self.word(m)).collect()
    }

    /// Code table for `dim` Fock states.
    pub fn for_dim(kind: EncodingKind, dim: usize) -> Result<Self> {
        match kind {
            EncodingKind::OneHot => one_hot_code(dim),
            _ => {
                let n = log2_exact(dim)?;
                Ok(if kind == EncodingKind::Gray { gray_code(n) } else { binary_code(n) })
            }
        }
    }
}

fn log2_exact(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return config(format!("compact encodings need N = 2^n with n >= 1, got N={dim}"));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Reflective Gray code, new bit appended on the right.
pub fn gray_code(n: usize) -> CodeTable {
    assert!((1..64).contains(&n));
    let mut words: Vec<u64> = vec![0, 1];
    for _ in 1..n {
        let mut next: Vec<u64> = words.iter().map(|w| w << 1).collect();
        next.extend(words.iter().rev().map(|w| (w << 1) | 1));
        words = next;
    }
    CodeTable { kind: EncodingKind::Gray, n_qubits: n, entries: words }
}

pub fn binary_code(n: usize) -> CodeTable {
    assert!((1..64).contains(&n));
    CodeTable { kind: EncodingKind::Binary, n_qubits: n, entries: (0..1u64 << n).collect() }
}

pub fn one_hot_code(dim: usize) -> Result<CodeTable> {
    if !(2..=64).contains(&dim) {
        return config(format!("one-hot encoding needs 2 <= N <= 64, got {dim}"));
    }
    Ok(CodeTable {
        kind: EncodingKind::OneHot,
        n_qubits: dim,
        entries: (0..dim).map(|m| 1u64 << (dim - 1 - m)).collect(),
    })
}

/// Bit-flip descriptors between consecutive code words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlipSequence {
    pub kind: EncodingKind,
    pub n_qubits: usize,
    /// Gray: 1-based flipped qubit. Binary: XOR of neighbours as an integer.
    pub entries: Vec<u64>,
}

impl FlipSequence {
    /// X-pattern of entry `i` (1-based), as a basis-index mask.
    pub fn mask(&self, i: usize) -> u64 {
        let e = self.entries[i - 1];
        match self.kind {
            EncodingKind::Gray => 1u64 << (self.n_qubits - e as usize),
            _ => e,
        }
    }

    /// XOR-accumulated X-pattern over the 1-based closed interval [l, r].
    pub fn pattern(&self, l: usize, r: usize) -> u64 {
        (l..=r).fold(0, |acc, i| acc ^ self.mask(i))
    }
}

pub fn alternate_representation(code: &CodeTable) -> Result<FlipSequence> {
    let n = code.n_qubits;
    let mut entries = Vec::with_capacity(code.len().saturating_sub(1));
    for w in code.entries.windows(2) {
        let diff = w[0] ^ w[1];
        match code.kind {
            EncodingKind::Gray => {
                if diff.count_ones() != 1 {
                    return config(format!(
                        "Gray neighbours {} and {} differ in {} bits",
                        bits_to_string(w[0], n),
                        bits_to_string(w[1], n),
                        diff.count_ones()
                    ));
                }
                entries.push((n - diff.trailing_zeros() as usize) as u64);
            }
            EncodingKind::Binary => entries.push(diff),
            EncodingKind::OneHot => return config("flip sequences are defined for binary and Gray codes only"),
        }
    }
    Ok(FlipSequence { kind: code.kind, n_qubits: n, entries })
}

fn check_band(h: &RealMatrix, k: usize) -> Result<()> {
    if !h.is_symmetric() {
        return contract("Hamiltonian matrix is not symmetric");
    }
    let bw = h.bandwidth();
    if bw > k.max(1) {
        return config(format!("matrix bandwidth {bw} exceeds declared K={k}"));
    }
    Ok(())
}

/// One-hot encoding on N qubits.
pub fn encode_onehot(h: &RealMatrix, k: usize) -> Result<PauliSum> {
    check_band(h, k)?;
    let dim = h.dim();
    if !(2..=64).contains(&dim) {
        return config(format!("one-hot encoding needs 2 <= N <= 64, got {dim}"));
    }
    let mut s = PauliSum::new(dim);
    for m in 0..dim {
        let d = h.get(m, m);
        s.add(PauliString::identity(dim), 0.5 * d)?;
        s.add(PauliString::single(dim, m, Pauli::Z), -0.5 * d)?;
    }
    for m in 0..dim {
        for mp in (m + 1)..dim.min(m + k.max(1) + 1) {
            let c = 0.5 * h.get(mp, m);
            for l in [Pauli::X, Pauli::Y] {
                let mut p = PauliString::identity(dim);
                p.set(m, l);
                p.set(mp, l);
                s.add(p, c)?;
            }
        }
    }
    s.prune();
    Ok(s)
}

/// Σ H_{m'm} |code(m')⟩⟨code(m)|, Pauli-decomposed.
pub fn encode_compact(h: &RealMatrix, code: &CodeTable) -> Result<PauliSum> {
    if code.kind == EncodingKind::OneHot {
        return config("encode_compact needs a binary or Gray code");
    }
    log2_exact(h.dim())?;
    if code.len() != h.dim() {
        return config(format!("code has {} words but matrix is {}x{}", code.len(), h.dim(), h.dim()));
    }
    if !h.is_symmetric() {
        return contract("Hamiltonian matrix is not symmetric");
    }
    let mut m = ComplexMatrix::zeros(h.dim());
    for (a, wa) in code.entries.iter().enumerate() {
        for (b, wb) in code.entries.iter().enumerate() {
            m.set(*wa as usize, *wb as usize, Complex64::new(h.get(a, b), 0.0));
        }
    }
    pauli_decompose(&m)
}

/// Encodes `h` (bandwidth at most max(K,1)) with the requested scheme.
pub fn encode(h: &RealMatrix, kind: EncodingKind, k: usize) -> Result<PauliSum> {
    match kind {
        EncodingKind::OneHot => encode_onehot(h, k),
        _ => {
            check_band(h, k)?;
            encode_compact(h, &CodeTable::for_dim(kind, h.dim())?)
        }
    }
}

// |a⟩⟨b| + |b⟩⟨a| for a ≠ b, or |a⟩⟨a| for a = b, expanded qubit by qubit.
fn hermitian_outer(n: usize, a: u64, b: u64) -> Result<PauliSum> {
    let diff = a ^ b;
    let norm = 0.5f64.powi(n as i32);
    let mut sum = PauliSum::new(n);
    for choice in 0..(1u64 << n) {
        // choice bit set → Z on equal qubits, Y on differing qubits
        let p = PauliString::from_masks(n, diff, choice);
        let mut coeff = Complex64::new(norm, 0.0);
        for q in 0..n {
            let bit = 1u64 << (n - 1 - q);
            if choice & bit == 0 {
                continue;
            }
            if diff & bit == 0 {
                if a & bit != 0 {
                    coeff = -coeff;
                }
            } else {
                // |0⟩⟨1| = (X + iY)/2, |1⟩⟨0| = (X − iY)/2
                coeff *= if a & bit == 0 { Complex64::new(0.0, 1.0) } else { Complex64::new(0.0, -1.0) };
            }
        }
        let scale = if diff == 0 { 1.0 } else { 2.0 };
        // adding the conjugate keeps twice the real part
        let c = coeff.re * scale;
        if c != 0.0 {
            sum.add(p, c)?;
        }
    }
    sum.prune();
    Ok(sum)
}

/// Number operator |m⟩⟨m| in the given code.
pub fn number_operator(code: &CodeTable, m: usize) -> Result<PauliSum> {
    if m >= code.len() {
        return config(format!("Fock index {m} out of range for N={}", code.len()));
    }
    if code.kind == EncodingKind::OneHot {
        // restricted to the weight-one subspace: ½(I − Z_m)
        let n = code.n_qubits;
        return PauliSum::from_terms(n, [(PauliString::identity(n), 0.5), (PauliString::single(n, m, Pauli::Z), -0.5)]);
    }
    let w = code.entries[m];
    hermitian_outer(code.n_qubits, w, w)
}

/// Hermitian step-k pair |m+k⟩⟨m| + |m⟩⟨m+k| in the given code.
pub fn ladder_operator(code: &CodeTable, m: usize, k: usize) -> Result<PauliSum> {
    if k == 0 || m + k >= code.len() {
        return config(format!("ladder indices m={m}, k={k} out of range for N={}", code.len()));
    }
    if code.kind == EncodingKind::OneHot {
        // restricted to the weight-one subspace: ½(X_m X_{m+k} + Y_m Y_{m+k})
        let n = code.n_qubits;
        let pair = |l| {
            let mut p = PauliString::identity(n);
            p.set(m, l);
            p.set(m + k, l);
            (p, 0.5)
        };
        return PauliSum::from_terms(n, [pair(Pauli::X), pair(Pauli::Y)]);
    }
    hermitian_outer(code.n_qubits, code.entries[m + k], code.entries[m])
}

fn ceil_log2(k: usize) -> usize {
    if k <= 1 {
        0
    } else {
        (usize::BITS - (k - 1).leading_zeros()) as usize
    }
}

/// n̄_k = n − ⌈log₂ k⌉.
pub fn n_bar(n: usize, k: usize) -> usize {
    n - ceil_log2(k)
}

/// Hamming weight of the k-th reflective Gray word.
pub fn gray_weight(k: usize) -> u32 {
    (k ^ (k >> 1)).count_ones()
}

pub fn term_count_onehot(dim: usize, k: usize) -> usize {
    let k = k.max(1).min(dim.saturating_sub(1).max(1));
    1 + dim + 2 * dim * k - k * (k + 1)
}

pub fn term_count_compact(n: usize, k: usize) -> usize {
    let half = 1usize << (n - 1);
    if k == 0 {
        (1 << n) + n * half
    } else if k <= half {
        (1 << n) + half * (1..=k).map(|j| n_bar(n, j)).sum::<usize>()
    } else {
        half * (1 + (1 << n))
    }
}

/// X/I string of the length-k flip subsequence ending at index 2^j, keyed by (k, 2^j).
pub fn flip_string_table(kind: EncodingKind, n: usize) -> Result<BTreeMap<(usize, usize), String>> {
    let code = match kind {
        EncodingKind::Gray => gray_code(n),
        EncodingKind::Binary => binary_code(n),
        EncodingKind::OneHot => return config("flip-string tables exist for binary and Gray codes only"),
    };
    let mut out = BTreeMap::new();
    for j in 0..n {
        let col = 1usize << j;
        for k in 1..=col {
            let mask = code.entries[col - k] ^ code.entries[col];
            out.insert((k, col), x_pattern_string(mask, n));
        }
    }
    Ok(out)
}

pub fn x_pattern_string(mask: u64, n: usize) -> String {
    (0..n).map(|q| if mask >> (n - 1 - q) & 1 == 1 { 'X' } else { 'I' }).collect()
}

/// Shortest interval ending at a power-of-two index with the same X-pattern as [l, r].
pub fn canonical_subsequence(seq: &FlipSequence, l: usize, r: usize) -> Result<(usize, usize)> {
    let len = seq.entries.len();
    if l < 1 || l > r || r > len {
        return config(format!("interval [{l}, {r}] outside 1..={len}"));
    }
    let target = seq.pattern(l, r);
    let mut best: Option<(usize, usize)> = None;
    let mut col = 1;
    while col <= len {
        let mut acc = 0;
        for start in (1..=col).rev() {
            acc ^= seq.mask(start);
            if acc == target {
                let cand = (start, col);
                let shorter = best.is_none_or(|(bl, br)| col - start < br - bl);
                if shorter {
                    best = Some(cand);
                }
                break;
            }
        }
        col *= 2;
    }
    match best {
        Some((bl, br)) if br - bl <= r - l => Ok((bl, br)),
        _ => contract(format!("no power-of-two-ending interval matches [{l}, {r}]")),
    }
}
