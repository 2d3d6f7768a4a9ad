//! Dense state vectors for a handful of labeled kaons.
//!
//! Every state lives in the product strangeness basis. Amplitude index bit `k`
//! holds the strangeness of the `k`-th label: `0` is K⁰, `1` is K̄⁰. With
//! labels `[c, a, b]` the amplitude of |K⁰⟩_c|K⁰⟩_a|K̄⁰⟩_b sits at index
//! `0b100`.

use std::fmt;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Largest number of kaons a state may hold (16 amplitudes).
pub const MAX_KAONS: usize = 4;

/// Projections with a weight below this floor have no post-state.
pub const PROB_FLOOR: f64 = 1e-30;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Identifier of one kaon in a multi-kaon state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(pub char);

impl Label {
    pub const A: Label = Label('a');
    pub const B: Label = Label('b');
    pub const C: Label = Label('c');
    pub const D: Label = Label('d');
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A 2×2 complex matrix acting on one kaon, rows and columns ordered (K⁰, K̄⁰).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix2(pub [[C64; 2]; 2]);

impl Matrix2 {
    pub const IDENTITY: Matrix2 = Matrix2([[ONE, ZERO], [ZERO, ONE]]);

    pub fn new(m00: C64, m01: C64, m10: C64, m11: C64) -> Self {
        Matrix2([[m00, m01], [m10, m11]])
    }

    pub fn diag(d0: C64, d1: C64) -> Self {
        Matrix2([[d0, ZERO], [ZERO, d1]])
    }

    pub fn det(&self) -> C64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn inverse(&self) -> Result<Matrix2> {
        let det = self.det();
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        if det.norm() <= 1e-14 * scale * scale {
            return Err(Error::SingularMatrix(det.norm()));
        }
        let m = &self.0;
        Ok(Matrix2([
            [m[1][1] / det, -m[0][1] / det],
            [-m[1][0] / det, m[0][0] / det],
        ]))
    }

    pub fn mul(&self, rhs: &Matrix2) -> Matrix2 {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = [[ZERO; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Matrix2(out)
    }

    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        let m = &self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    pub fn adjoint(&self) -> Matrix2 {
        let m = &self.0;
        Matrix2([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// A 4×4 operator on an ordered kaon pair, indexed `first | second << 1`.
pub type PairOperator = [[C64; 4]; 4];

/// Conserved quantum numbers of a two-kaon state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuantumNumbers {
    pub strangeness: i8,
    pub parity: i8,
    pub isospin: u8,
}

/// The collision projection basis: simultaneous eigenstates of S, P and I.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PairBasisVector {
    /// |K⁰K⁰⟩
    Phi1,
    /// |K̄⁰K̄⁰⟩
    Phi2,
    /// |Ψ₊⟩ = (|K⁰K̄⁰⟩ + |K̄⁰K⁰⟩)/√2
    Phi3,
    /// |Ψ₋⟩ = (|K⁰K̄⁰⟩ − |K̄⁰K⁰⟩)/√2
    Phi4,
}

impl PairBasisVector {
    pub const ALL: [PairBasisVector; 4] = [Self::Phi1, Self::Phi2, Self::Phi3, Self::Phi4];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn quantum_numbers(self) -> QuantumNumbers {
        let (strangeness, parity, isospin) = match self {
            Self::Phi1 => (2, 1, 1),
            Self::Phi2 => (-2, 1, 1),
            Self::Phi3 => (0, 1, 1),
            Self::Phi4 => (0, -1, 0),
        };
        QuantumNumbers { strangeness, parity, isospin }
    }

    /// Amplitudes indexed `first | second << 1`.
    pub fn amps(self) -> [C64; 4] {
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        match self {
            Self::Phi1 => [ONE, ZERO, ZERO, ZERO],
            Self::Phi2 => [ZERO, ZERO, ZERO, ONE],
            // index 1 is |K̄⁰⟩_first|K⁰⟩_second, index 2 is |K⁰⟩_first|K̄⁰⟩_second
            Self::Phi3 => [ZERO, h, h, ZERO],
            Self::Phi4 => [ZERO, -h, h, ZERO],
        }
    }

    pub fn state(self, first: Label, second: Label) -> Result<MultiKaonState> {
        MultiKaonState::new(vec![first, second], self.amps().to_vec())
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Phi1 => "phi1",
            Self::Phi2 => "phi2",
            Self::Phi3 => "phi3",
            Self::Phi4 => "phi4",
        }
    }
}

/// Result of projecting two kaons onto a [`PairBasisVector`].
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub prob: f64,
    /// Normalized state of the remaining kaons; `None` when `prob` is below
    /// [`PROB_FLOOR`].
    pub post: Option<MultiKaonState>,
}

impl Projection {
    pub fn is_zero(&self) -> bool {
        self.post.is_none()
    }

    pub fn post_state(&self) -> Result<&MultiKaonState> {
        self.post.as_ref().ok_or(Error::ZeroProbability)
    }
}

/// Pure state of up to [`MAX_KAONS`] labeled kaons.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiKaonState {
    labels: Vec<Label>,
    amps: Vec<C64>,
}

impl MultiKaonState {
    pub fn new(labels: Vec<Label>, amps: Vec<C64>) -> Result<Self> {
        if labels.len() > MAX_KAONS {
            return Err(Error::TooManyKaons(labels.len()));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::DuplicateLabel(*l));
            }
        }
        let expected = 1usize << labels.len();
        if amps.len() != expected {
            return Err(Error::BadLength { got: amps.len(), expected });
        }
        Ok(MultiKaonState { labels, amps })
    }

    /// One kaon with amplitudes `(K⁰, K̄⁰)`.
    pub fn ket(label: Label, amps: [C64; 2]) -> Self {
        MultiKaonState { labels: vec![label], amps: amps.to_vec() }
    }

    /// The empty product, a scalar `1`.
    pub fn scalar(z: C64) -> Self {
        MultiKaonState { labels: Vec::new(), amps: vec![z] }
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn n_kaons(&self) -> usize {
        self.labels.len()
    }

    pub fn position(&self, label: Label) -> Result<usize> {
        self.labels.iter().position(|&l| l == label).ok_or(Error::MissingLabel(label))
    }

    /// Amplitude for the given per-label strangeness bits (in label order).
    pub fn amp(&self, bits: &[u8]) -> C64 {
        let idx = bits.iter().enumerate().fold(0usize, |acc, (k, &b)| acc | ((b as usize & 1) << k));
        self.amps[idx]
    }

    pub fn norm2(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    /// ⟨self|other⟩, conjugating `self`.
    pub fn inner(&self, other: &MultiKaonState) -> Result<C64> {
        self.check_same_labels(other)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// Overlap |⟨a|b⟩|²/(‖a‖²‖b‖²); `1` means equal up to a global phase and scale.
    pub fn fidelity(&self, other: &MultiKaonState) -> Result<f64> {
        let ip = self.inner(other)?;
        let denom = self.norm2() * other.norm2();
        if denom < PROB_FLOOR {
            return Err(Error::ZeroProbability);
        }
        Ok(ip.norm_sqr() / denom)
    }

    /// Largest amplitude difference after removing the relative global phase
    /// (and, if `normalize`, the scale) of `other` with respect to `self`.
    pub fn phase_aligned_distance(&self, other: &MultiKaonState, normalize: bool) -> Result<f64> {
        let ip = self.inner(other)?;
        let (lhs, rhs) = if normalize {
            (self.normalized()?, other.normalized()?)
        } else {
            (self.clone(), other.clone())
        };
        let phase = if ip.norm() > 0.0 { ip / ip.norm() } else { ONE };
        Ok(lhs
            .amps
            .iter()
            .zip(&rhs.amps)
            .map(|(a, b)| (a * phase - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn scale(&self, z: C64) -> MultiKaonState {
        MultiKaonState { labels: self.labels.clone(), amps: self.amps.iter().map(|a| a * z).collect() }
    }

    pub fn normalized(&self) -> Result<MultiKaonState> {
        let n2 = self.norm2();
        if n2 < PROB_FLOOR {
            return Err(Error::ZeroProbability);
        }
        Ok(self.scale(C64::new(1.0 / n2.sqrt(), 0.0)))
    }

    /// `self ⊗ other`; labels of `self` come first.
    pub fn tensor(&self, other: &MultiKaonState) -> Result<MultiKaonState> {
        if let Some(l) = other.labels.iter().find(|l| self.labels.contains(l)) {
            return Err(Error::DuplicateLabel(*l));
        }
        let n = self.labels.len() + other.labels.len();
        if n > MAX_KAONS {
            return Err(Error::TooManyKaons(n));
        }
        let shift = self.labels.len();
        let mut amps = vec![ZERO; 1 << n];
        for (ib, b) in other.amps.iter().enumerate() {
            for (ia, a) in self.amps.iter().enumerate() {
                amps[ia | (ib << shift)] = a * b;
            }
        }
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        Ok(MultiKaonState { labels, amps })
    }

    /// Apply `op` to the kaon `label`, leaving the others untouched.
    pub fn apply_single(&self, label: Label, op: &Matrix2) -> Result<MultiKaonState> {
        let bit = 1usize << self.position(label)?;
        let m = &op.0;
        let mut amps = self.amps.clone();
        for idx in (0..self.amps.len()).filter(|i| i & bit == 0) {
            let (x0, x1) = (self.amps[idx], self.amps[idx | bit]);
            amps[idx] = m[0][0] * x0 + m[0][1] * x1;
            amps[idx | bit] = m[1][0] * x0 + m[1][1] * x1;
        }
        Ok(MultiKaonState { labels: self.labels.clone(), amps })
    }

    /// Apply a two-kaon operator to the ordered pair `(first, second)`.
    pub fn apply_pair(&self, pair: (Label, Label), op: &PairOperator) -> Result<MultiKaonState> {
        let (bi, bj) = self.pair_bits(pair)?;
        let mut amps = self.amps.clone();
        for base in (0..self.amps.len()).filter(|i| i & (bi | bj) == 0) {
            let slots = [base, base | bi, base | bj, base | bi | bj];
            let input = slots.map(|s| self.amps[s]);
            for (row, &slot) in op.iter().zip(&slots) {
                amps[slot] = row.iter().zip(&input).map(|(m, x)| m * x).sum();
            }
        }
        Ok(MultiKaonState { labels: self.labels.clone(), amps })
    }

    /// Project kaons `pair` onto `v`.
    ///
    /// `prob` is the squared norm of the component of `self` along `v` ⊗ (any
    /// state of the other kaons). The post-state carries the remaining labels
    /// in their original order and is normalized.
    pub fn project_pair(&self, pair: (Label, Label), v: PairBasisVector) -> Result<Projection> {
        let (bi, bj) = self.pair_bits(pair)?;
        let rest: Vec<usize> = (0..self.labels.len())
            .filter(|&k| (1 << k) != bi && (1 << k) != bj)
            .collect();
        let bra = v.amps().map(|z| z.conj());
        let mut comp = vec![ZERO; 1 << rest.len()];
        for (idx, amp) in self.amps.iter().enumerate() {
            let x = usize::from(idx & bi != 0);
            let y = usize::from(idx & bj != 0);
            let r = rest.iter().enumerate().fold(0usize, |acc, (k, &pos)| acc | (((idx >> pos) & 1) << k));
            comp[r] += bra[x | (y << 1)] * amp;
        }
        let labels: Vec<Label> = rest.iter().map(|&k| self.labels[k]).collect();
        let raw = MultiKaonState { labels, amps: comp };
        let prob = raw.norm2();
        if prob < PROB_FLOOR {
            return Ok(Projection { prob, post: None });
        }
        Ok(Projection { prob, post: Some(raw.scale(C64::new(1.0 / prob.sqrt(), 0.0))) })
    }

    /// Relabel in place order; `new_labels` must have the same length and be distinct.
    pub fn relabel(&self, new_labels: &[Label]) -> Result<MultiKaonState> {
        MultiKaonState::new(new_labels.to_vec(), self.amps.clone())
    }

    /// Reorder the kaons so that the labels follow `order`.
    pub fn permute(&self, order: &[Label]) -> Result<MultiKaonState> {
        if order.len() != self.labels.len() {
            return Err(Error::LabelMismatch { left: self.labels.clone(), right: order.to_vec() });
        }
        let src: Vec<usize> = order.iter().map(|&l| self.position(l)).collect::<Result<_>>()?;
        let mut amps = vec![ZERO; self.amps.len()];
        for (idx, slot) in amps.iter_mut().enumerate() {
            let old = src.iter().enumerate().fold(0usize, |acc, (k, &pos)| acc | (((idx >> k) & 1) << pos));
            *slot = self.amps[old];
        }
        MultiKaonState::new(order.to_vec(), amps)
    }

    fn pair_bits(&self, (first, second): (Label, Label)) -> Result<(usize, usize)> {
        if first == second {
            return Err(Error::DuplicateLabel(first));
        }
        Ok((1 << self.position(first)?, 1 << self.position(second)?))
    }

    fn check_same_labels(&self, other: &MultiKaonState) -> Result<()> {
        if self.labels != other.labels {
            return Err(Error::LabelMismatch { left: self.labels.clone(), right: other.labels.clone() });
        }
        Ok(())
    }
}
