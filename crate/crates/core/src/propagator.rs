// SPDX-License-Identifier: Apache-2.0

//! Invariant sectors of the interaction Hamiltonian and their propagators.
//!
//! The pair-creation coupling changes both photon numbers together, so
//! `n1 - n2` and (atomic excitations + photon pairs) are conserved. Each
//! joint state `|atoms, n1, n2>` therefore lives in a sector of dimension 1,
//! 3 or 4:
//!
//! * `Quad(m1, m2)`: `|++,m>, |+-,m+1>, |-+,m+1>, |--,m+2>`
//! * `TripleLeft(k)`: `|+-,0,k>, |-+,0,k>, |--,1,k+1>`
//! * `TripleRight(k)`, `k >= 1`: `|+-,k,0>, |-+,k,0>, |--,k+1,1>`
//! * `Frozen(n1, n2)`: `|--,n1,n2>` with an empty mode, which the
//!   Hamiltonian annihilates.
//!
//! Each sector block can be propagated either by diagonalizing it
//! ([`SectorEigen`], the engine of record) or from the closed-form operator
//! entries of [`analytic_entry`], valid on `Quad` sectors only.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::smallmat::{herm_eigen, Complex, HermEigen, MatC, HERMITIAN_TOL};

/// Two-atom basis label, in matrix order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Atomic {
    PlusPlus = 0,
    PlusMinus = 1,
    MinusPlus = 2,
    MinusMinus = 3,
}

impl Atomic {
    pub const ALL: [Atomic; 4] = [Atomic::PlusPlus, Atomic::PlusMinus, Atomic::MinusPlus, Atomic::MinusMinus];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Atomic {
        Self::ALL[i]
    }

    /// Photon pairs a sector's `|++>` member must emit to reach this state.
    #[inline]
    pub fn pairs_below_top(self) -> u32 {
        match self {
            Atomic::PlusPlus => 0,
            Atomic::PlusMinus | Atomic::MinusPlus => 1,
            Atomic::MinusMinus => 2,
        }
    }

    /// `(atom 1 excited, atom 2 excited)`.
    #[inline]
    pub fn excitations(self) -> (bool, bool) {
        match self {
            Atomic::PlusPlus => (true, true),
            Atomic::PlusMinus => (true, false),
            Atomic::MinusPlus => (false, true),
            Atomic::MinusMinus => (false, false),
        }
    }
}

/// A joint atom-field basis state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisState {
    pub atoms: Atomic,
    pub n1: u32,
    pub n2: u32,
}

impl BasisState {
    pub const fn new(atoms: Atomic, n1: u32, n2: u32) -> Self {
        Self { atoms, n1, n2 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sector {
    Quad { m1: u32, m2: u32 },
    TripleLeft { k: u32 },
    TripleRight { k: u32 },
    Frozen { n1: u32, n2: u32 },
}

/// Fixed-capacity list of a sector's member states.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SectorStates {
    len: usize,
    states: [BasisState; 4],
}

impl SectorStates {
    fn from_slice(s: &[BasisState]) -> Self {
        let mut states = [s[0]; 4];
        states[..s.len()].copy_from_slice(s);
        Self { len: s.len(), states }
    }

    pub fn as_slice(&self) -> &[BasisState] {
        &self.states[..self.len]
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

impl std::ops::Deref for SectorStates {
    type Target = [BasisState];

    fn deref(&self) -> &[BasisState] {
        self.as_slice()
    }
}

impl Sector {
    pub fn dim(&self) -> usize {
        match self {
            Sector::Quad { .. } => 4,
            Sector::TripleLeft { .. } | Sector::TripleRight { .. } => 3,
            Sector::Frozen { .. } => 1,
        }
    }

    /// Member states in block order.
    pub fn states(&self) -> SectorStates {
        use Atomic::*;
        match *self {
            Sector::Quad { m1, m2 } => SectorStates::from_slice(&[
                BasisState::new(PlusPlus, m1, m2),
                BasisState::new(PlusMinus, m1 + 1, m2 + 1),
                BasisState::new(MinusPlus, m1 + 1, m2 + 1),
                BasisState::new(MinusMinus, m1 + 2, m2 + 2),
            ]),
            Sector::TripleLeft { k } => SectorStates::from_slice(&[
                BasisState::new(PlusMinus, 0, k),
                BasisState::new(MinusPlus, 0, k),
                BasisState::new(MinusMinus, 1, k + 1),
            ]),
            Sector::TripleRight { k } => SectorStates::from_slice(&[
                BasisState::new(PlusMinus, k, 0),
                BasisState::new(MinusPlus, k, 0),
                BasisState::new(MinusMinus, k + 1, 1),
            ]),
            Sector::Frozen { n1, n2 } => SectorStates::from_slice(&[BasisState::new(MinusMinus, n1, n2)]),
        }
    }

    pub fn is_valid(&self) -> bool {
        match *self {
            Sector::TripleRight { k } => k >= 1,
            Sector::Frozen { n1, n2 } => n1 == 0 || n2 == 0,
            _ => true,
        }
    }
}

/// Sector containing `state`, with the state's position in the block.
pub fn sector_of(state: BasisState) -> (Sector, usize) {
    use Atomic::*;
    let BasisState { atoms, n1, n2 } = state;
    match atoms {
        PlusPlus => (Sector::Quad { m1: n1, m2: n2 }, 0),
        PlusMinus | MinusPlus => {
            let pos = if atoms == PlusMinus { 0 } else { 1 };
            if n1 >= 1 && n2 >= 1 {
                (Sector::Quad { m1: n1 - 1, m2: n2 - 1 }, pos + 1)
            } else if n1 == 0 {
                (Sector::TripleLeft { k: n2 }, pos)
            } else {
                (Sector::TripleRight { k: n1 }, pos)
            }
        }
        MinusMinus => {
            if n1 >= 2 && n2 >= 2 {
                (Sector::Quad { m1: n1 - 2, m2: n2 - 2 }, 3)
            } else if n1 == 1 && n2 >= 1 {
                (Sector::TripleLeft { k: n2 - 1 }, 2)
            } else if n2 == 1 && n1 >= 2 {
                (Sector::TripleRight { k: n1 - 1 }, 2)
            } else {
                (Sector::Frozen { n1, n2 }, 0)
            }
        }
    }
}

/// Every sector holding at least one state with `n1 <= cutoff1`,
/// `n2 <= cutoff2`, in order of first appearance (atoms, then `n1`, then
/// `n2`). Member photon numbers stay within `cutoff + 2`.
pub fn enumerate_sectors(cutoff1: u32, cutoff2: u32) -> Vec<Sector> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for atoms in Atomic::ALL {
        for n1 in 0..=cutoff1 {
            for n2 in 0..=cutoff2 {
                let (sector, _) = sector_of(BasisState::new(atoms, n1, n2));
                if seen.insert(sector) {
                    out.push(sector);
                }
            }
        }
    }
    out
}

/// `<bra| H |ket>` in units of `hbar g`.
fn hamiltonian_element(bra: BasisState, ket: BasisState, alpha: f64) -> f64 {
    let (b1, b2) = bra.atoms.excitations();
    let (k1, k2) = ket.atoms.excitations();
    // dipole exchange |+-> <-> |-+> at fixed field
    if bra.n1 == ket.n1 && bra.n2 == ket.n2 && b1 != k1 && b2 != k2 && b1 != b2 {
        return alpha;
    }
    // exactly one atom changes level, field pair moves the opposite way
    let one_flip = (b1 != k1) ^ (b2 != k2);
    if !one_flip {
        return 0.0;
    }
    let lowered = (k1 && !b1) || (k2 && !b2);
    if lowered && bra.n1 == ket.n1 + 1 && bra.n2 == ket.n2 + 1 {
        (f64::from(bra.n1) * f64::from(bra.n2)).sqrt()
    } else if !lowered && ket.n1 == bra.n1 + 1 && ket.n2 == bra.n2 + 1 {
        (f64::from(ket.n1) * f64::from(ket.n2)).sqrt()
    } else {
        0.0
    }
}

/// Real symmetric sector block of the interaction Hamiltonian, units of `hbar g`.
pub fn sector_hamiltonian(sector: Sector, alpha: f64) -> MatC {
    let states = sector.states();
    let d = states.len();
    let mut h = MatC::zeros(d);
    for i in 0..d {
        for j in 0..d {
            h[(i, j)] = Complex::new(hamiltonian_element(states[i], states[j], alpha), 0.0);
        }
    }
    h
}

/// Diagonalized sector block; propagates to any time without
/// re-diagonalizing.
#[derive(Clone, Copy, Debug)]
pub struct SectorEigen {
    pub sector: Sector,
    pub states: SectorStates,
    pub eigen: HermEigen,
    /// Eigenvectors with column phases removed; the block is real symmetric.
    real_vectors: [[f64; 4]; 4],
}

impl SectorEigen {
    pub fn new(sector: Sector, alpha: f64) -> Result<Self> {
        let h = sector_hamiltonian(sector, alpha);
        let eigen = herm_eigen(&h, HERMITIAN_TOL)
            .map_err(|e| Error::Sector { sector, gt: f64::NAN, source: Box::new(e) })?;
        let mut real_vectors = [[0.0; 4]; 4];
        let d = sector.dim();
        for k in 0..d {
            let lead = (0..d).map(|i| eigen.vectors[(i, k)]).fold(Complex::new(0.0, 0.0), |a, z| {
                if z.norm() > a.norm() {
                    z
                } else {
                    a
                }
            });
            let unphase = lead.conj() / lead.norm();
            for (i, row) in real_vectors.iter_mut().enumerate().take(d) {
                row[k] = (eigen.vectors[(i, k)] * unphase).re;
            }
        }
        Ok(Self { sector, states: sector.states(), eigen, real_vectors })
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    /// `exp(-i H gt)`.
    pub fn propagator(&self, gt: f64) -> MatC {
        self.eigen.apply_fn(|w| Complex::from_polar(1.0, -w * gt))
    }

    /// Column `pos` of `exp(-i H gt)`, given precomputed phases
    /// `exp(-i w_k gt)`.
    #[inline]
    pub fn column_with_phases(&self, pos: usize, phases: &[Complex; 4]) -> [Complex; 4] {
        let d = self.dim();
        let v = &self.real_vectors;
        let mut col = [Complex::new(0.0, 0.0); 4];
        for k in 0..d {
            let w = phases[k] * v[pos][k];
            for (i, c) in col.iter_mut().enumerate().take(d) {
                *c += w * v[i][k];
            }
        }
        col
    }

    #[inline]
    pub fn phases(&self, gt: f64) -> [Complex; 4] {
        let mut p = [Complex::new(0.0, 0.0); 4];
        for (k, ph) in p.iter_mut().enumerate().take(self.dim()) {
            let (s, c) = (-self.eigen.values[k] * gt).sin_cos();
            *ph = Complex::new(c, s);
        }
        p
    }
}

/// `exp(-i H gt)` for one sector, through its eigendecomposition.
pub fn sector_propagator_numeric(sector: Sector, alpha: f64, gt: f64) -> Result<MatC> {
    Ok(SectorEigen::new(sector, alpha)
        .map_err(|e| match e {
            Error::Sector { sector, source, .. } => Error::Sector { sector, gt, source },
            other => other,
        })?
        .propagator(gt))
}

/// Photon-number dependent scalars of the closed-form propagator, at field
/// occupation `(n1, n2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SectorScalars {
    pub lambda: f64,
    pub theta: f64,
}

impl SectorScalars {
    /// `lambda = 2[(n1+1)(n2+1) + n1 n2]`, `theta = sqrt(4 lambda + alpha^2)`.
    pub fn new(n1: u32, n2: u32, alpha: f64) -> Self {
        let (n1, n2) = (f64::from(n1), f64::from(n2));
        let pairs = (n1 + 1.0) * (n2 + 1.0) + n1 * n2;
        let lambda = 2.0 * pairs;
        let theta = (8.0 * pairs + alpha * alpha).sqrt();
        Self { lambda, theta }
    }

    /// `A = e^{-i alpha gt/2} [cos(theta gt/2) + i (alpha/theta) sin(theta gt/2)] - 1`
    pub fn a(&self, alpha: f64, gt: f64) -> Complex {
        let (s, c) = (0.5 * self.theta * gt).sin_cos();
        Complex::from_polar(1.0, -0.5 * alpha * gt) * Complex::new(c, alpha / self.theta * s) - 1.0
    }

    /// `B = e^{-i (alpha + theta) gt/2} [1 - e^{i theta gt}]`
    pub fn b(&self, alpha: f64, gt: f64) -> Complex {
        Complex::from_polar(1.0, -0.5 * (alpha + self.theta) * gt)
            * (1.0 - Complex::from_polar(1.0, self.theta * gt))
    }

    fn middle(&self, alpha: f64, gt: f64, sign: f64) -> Complex {
        let th = self.theta;
        let i_theta = Complex::from_polar(1.0, th * gt);
        let bracket = (1.0 - i_theta) * alpha
            + Complex::from_polar(2.0 * th * sign, 0.5 * (3.0 * alpha + th) * gt)
            + (1.0 + i_theta) * th;
        Complex::from_polar(1.0 / (4.0 * th), -0.5 * (alpha + th) * gt) * bracket
    }

    /// Diagonal single-excitation entry `U22 = U33`.
    pub fn u22(&self, alpha: f64, gt: f64) -> Complex {
        self.middle(alpha, gt, 1.0)
    }

    /// Exchange entry `U23 = U32`.
    pub fn u23(&self, alpha: f64, gt: f64) -> Complex {
        self.middle(alpha, gt, -1.0)
    }
}

#[derive(Clone, Copy, Debug)]
enum FieldOp {
    /// `a1+ a2+`
    Raise,
    /// `a1 a2`
    Lower,
    /// `A / lambda` at the current occupation
    AOverLambda,
    /// `B / theta` at the current occupation
    BOverTheta,
}

enum EntryForm {
    /// `delta + coeff * (operator string)`, string printed left to right.
    String { delta: f64, coeff: f64, ops: &'static [FieldOp] },
    Middle22,
    Middle23,
}

fn entry_form(row: Atomic, col: Atomic) -> EntryForm {
    use Atomic::*;
    use FieldOp::*;
    let s = |delta, coeff, ops| EntryForm::String { delta, coeff, ops };
    match (row, col) {
        (PlusPlus, PlusPlus) => s(1.0, 2.0, &[Lower, AOverLambda, Raise]),
        (PlusPlus, PlusMinus | MinusPlus) => s(0.0, 1.0, &[Lower, BOverTheta]),
        (PlusPlus, MinusMinus) => s(0.0, 2.0, &[Lower, AOverLambda, Lower]),
        (PlusMinus | MinusPlus, PlusPlus) => s(0.0, 1.0, &[BOverTheta, Raise]),
        (PlusMinus, PlusMinus) | (MinusPlus, MinusPlus) => EntryForm::Middle22,
        (PlusMinus, MinusPlus) | (MinusPlus, PlusMinus) => EntryForm::Middle23,
        (PlusMinus | MinusPlus, MinusMinus) => s(0.0, 1.0, &[BOverTheta, Lower]),
        (MinusMinus, PlusPlus) => s(0.0, 2.0, &[Raise, AOverLambda, Raise]),
        (MinusMinus, PlusMinus | MinusPlus) => s(0.0, 1.0, &[Raise, BOverTheta]),
        (MinusMinus, MinusMinus) => s(1.0, 2.0, &[Raise, AOverLambda, Lower]),
    }
}

/// Closed-form propagator entry `<row, n'| U(gt) |col, n1, n2>`, where
/// `n'` is fixed by pair conservation.
///
/// Operator strings act right to left on `|n1, n2>`; `A`, `B`, `lambda` and
/// `theta` are evaluated at whatever occupation the string has reached.
/// Only columns that sit in a four-state sector are accepted.
pub fn analytic_entry(row: Atomic, col: Atomic, n1: u32, n2: u32, alpha: f64, gt: f64) -> Result<Complex> {
    let drop = col.pairs_below_top();
    if n1 < drop || n2 < drop {
        return Err(Error::IndexOutOfSector { row: row.index() + 1, col: col.index() + 1, n1, n2 });
    }
    Ok(match entry_form(row, col) {
        EntryForm::Middle22 => SectorScalars::new(n1, n2, alpha).u22(alpha, gt),
        EntryForm::Middle23 => SectorScalars::new(n1, n2, alpha).u23(alpha, gt),
        EntryForm::String { delta, coeff, ops } => {
            let (mut f1, mut f2) = (n1, n2);
            let mut amp = Complex::new(coeff, 0.0);
            for op in ops.iter().rev() {
                match op {
                    FieldOp::Raise => {
                        amp *= (f64::from(f1 + 1) * f64::from(f2 + 1)).sqrt();
                        f1 += 1;
                        f2 += 1;
                    }
                    FieldOp::Lower => {
                        // unreachable for columns inside a four-state sector
                        debug_assert!(f1 > 0 && f2 > 0);
                        amp *= (f64::from(f1) * f64::from(f2)).sqrt();
                        f1 -= 1;
                        f2 -= 1;
                    }
                    FieldOp::AOverLambda => {
                        let sc = SectorScalars::new(f1, f2, alpha);
                        amp *= sc.a(alpha, gt) / sc.lambda;
                    }
                    FieldOp::BOverTheta => {
                        let sc = SectorScalars::new(f1, f2, alpha);
                        amp *= sc.b(alpha, gt) / sc.theta;
                    }
                }
            }
            amp + delta
        }
    })
}

/// Closed-form block for a `Quad` sector, in the sector's state order.
pub fn analytic_block(sector: Sector, alpha: f64, gt: f64) -> Result<MatC> {
    let states = sector.states();
    if !matches!(sector, Sector::Quad { .. }) {
        let s = states[0];
        return Err(Error::IndexOutOfSector { row: 1, col: s.atoms.index() + 1, n1: s.n1, n2: s.n2 });
    }
    let mut u = MatC::zeros(4);
    for (j, col) in states.iter().enumerate() {
        for (i, row) in states.iter().enumerate() {
            u[(i, j)] = analytic_entry(row.atoms, col.atoms, col.n1, col.n2, alpha, gt)?;
        }
    }
    Ok(u)
}
