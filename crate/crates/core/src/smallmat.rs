// SPDX-License-Identifier: Apache-2.0

//! Fixed-capacity complex matrices of dimension 1 through 4 and a cyclic
//! Jacobi eigensolver for the Hermitian case.
//!
//! Everything in the simulation lives in spaces of dimension at most four
//! (two-atom density matrices, invariant-sector propagators), so storage is a
//! plain `[[Complex; 4]; 4]` with an active dimension and no heap traffic.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Complex = Complex64;

pub const MAX_DIM: usize = 4;

/// Sweep cap for the Jacobi iteration.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Default relative Hermiticity tolerance for [`herm_eigen`].
pub const HERMITIAN_TOL: f64 = 1e-10;

const ZERO: Complex = Complex::new(0.0, 0.0);
const ONE: Complex = Complex::new(1.0, 0.0);

/// Square complex matrix with `dim <= 4`. Entries outside the active block
/// are kept at zero.
#[derive(Clone, Copy, PartialEq)]
pub struct MatC {
    dim: usize,
    data: [[Complex; MAX_DIM]; MAX_DIM],
}

/// A two-atom operator in the ordered basis `{|++>, |+->, |-+>, |-->}`.
pub type Mat4C = MatC;

impl MatC {
    pub fn zeros(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim), "matrix dimension {dim} outside 1..=4");
        Self { dim, data: [[ZERO; MAX_DIM]; MAX_DIM] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i][i] = ONE;
        }
        m
    }

    pub fn from_diag(diag: &[Complex]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.data[i][i] = d;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.data[i][i] = Complex::new(d, 0.0);
        }
        m
    }

    /// Build from row-major entries; `rows.len()` sets the dimension.
    pub fn from_rows<R: AsRef<[Complex]>>(rows: &[R]) -> Self {
        let mut m = Self::zeros(rows.len());
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            assert_eq!(row.len(), rows.len(), "row {i} has wrong length");
            m.data[i][..row.len()].copy_from_slice(row);
        }
        m
    }

    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let mut m = Self::zeros(rows.len());
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            assert_eq!(row.len(), rows.len(), "row {i} has wrong length");
            for (j, &x) in row.iter().enumerate() {
                m.data[i][j] = Complex::new(x, 0.0);
            }
        }
        m
    }

    /// Outer product `|u><v|`.
    pub fn outer(u: &[Complex], v: &[Complex]) -> Self {
        assert_eq!(u.len(), v.len());
        let mut m = Self::zeros(u.len());
        for (i, &ui) in u.iter().enumerate() {
            for (j, &vj) in v.iter().enumerate() {
                m.data[i][j] = ui * vj.conj();
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m.data[i][j] = self.data[j][i].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m.data[i][j] = self.data[j][i];
            }
        }
        m
    }

    pub fn mat_mul(&self, rhs: &Self) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::DimMismatch { left: self.dim, right: rhs.dim });
        }
        let n = self.dim;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    m.data[i][j] += a * rhs.data[k][j];
                }
            }
        }
        Ok(m)
    }

    pub fn mul_vec(&self, v: &[Complex]) -> Vec<Complex> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.data[i][j] * v[j]).sum())
            .collect()
    }

    pub fn scale(&self, s: Complex) -> Self {
        let mut m = *self;
        for row in m.data.iter_mut().take(self.dim) {
            for x in row.iter_mut().take(self.dim) {
                *x *= s;
            }
        }
        m
    }

    pub fn trace(&self) -> Complex {
        (0..self.dim).map(|i| self.data[i][i]).sum()
    }

    /// Max absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.entries().map(|(_, _, z)| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.entries().map(|(_, _, z)| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |A_ij - B_ij|`; panics on mismatched dimensions.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.entries()
            .map(|(i, j, z)| (z - other.data[i][j]).norm())
            .fold(0.0, f64::max)
    }

    /// `max |A_ij - conj(A_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.entries()
            .map(|(i, j, z)| (z - self.data[j][i].conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol * self.max_abs()
    }

    /// `(A + A†) / 2`, with exactly real diagonal.
    pub fn hermitian_part(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for i in 0..self.dim {
            m.data[i][i] = Complex::new(self.data[i][i].re, 0.0);
            for j in (i + 1)..self.dim {
                let z = (self.data[i][j] + self.data[j][i].conj()) * 0.5;
                m.data[i][j] = z;
                m.data[j][i] = z.conj();
            }
        }
        m
    }

    /// Conjugate by a permutation: `P A P^T` with `P e_j = e_{perm[j]}`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.dim);
        let mut m = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m.data[perm[i]][perm[j]] = self.data[i][j];
            }
        }
        m
    }

    pub fn is_finite(&self) -> bool {
        self.entries().all(|(_, _, z)| z.re.is_finite() && z.im.is_finite())
    }

    /// Active entries as `(row, col, value)`, row-major.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex)> + '_ {
        let n = self.dim;
        (0..n).flat_map(move |i| (0..n).map(move |j| (i, j, self.data[i][j])))
    }

    pub fn column(&self, j: usize) -> Vec<Complex> {
        (0..self.dim).map(|i| self.data[i][j]).collect()
    }
}

impl Index<(usize, usize)> for MatC {
    type Output = Complex;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex {
        debug_assert!(i < self.dim && j < self.dim);
        &self.data[i][j]
    }
}

impl IndexMut<(usize, usize)> for MatC {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex {
        debug_assert!(i < self.dim && j < self.dim);
        &mut self.data[i][j]
    }
}

impl Add for MatC {
    type Output = MatC;

    fn add(mut self, rhs: MatC) -> MatC {
        assert_eq!(self.dim, rhs.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                self.data[i][j] += rhs.data[i][j];
            }
        }
        self
    }
}

impl Sub for MatC {
    type Output = MatC;

    fn sub(mut self, rhs: MatC) -> MatC {
        assert_eq!(self.dim, rhs.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                self.data[i][j] -= rhs.data[i][j];
            }
        }
        self
    }
}

impl Mul for &MatC {
    type Output = MatC;

    fn mul(self, rhs: &MatC) -> MatC {
        self.mat_mul(rhs).expect("matrix dimensions must agree")
    }
}

impl fmt::Debug for MatC {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MatC({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self.data[i][j];
                write!(f, "{:+.6e}{:+.6e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Conjugate transpose.
pub fn adjoint(a: &MatC) -> MatC {
    a.adjoint()
}

pub fn mat_mul(a: &MatC, b: &MatC) -> Result<MatC> {
    a.mat_mul(b)
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are ascending; column `k` of `vectors` belongs to
/// `values[k]`.
#[derive(Clone, Copy, Debug)]
pub struct HermEigen {
    pub values: [f64; MAX_DIM],
    pub vectors: MatC,
}

impl HermEigen {
    pub fn dim(&self) -> usize {
        self.vectors.dim()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.values[..self.dim()]
    }

    /// `V diag(f(lambda)) V†`.
    pub fn apply_fn(&self, f: impl Fn(f64) -> Complex) -> MatC {
        let n = self.dim();
        let v = &self.vectors;
        let mut out = MatC::zeros(n);
        for k in 0..n {
            let fk = f(self.values[k]);
            for i in 0..n {
                let vik = v[(i, k)] * fk;
                for j in 0..n {
                    out[(i, j)] += vik * v[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> MatC {
        self.apply_fn(|x| Complex::new(x, 0.0))
    }
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// The input is checked against `tol * max|A_ij|` and then replaced by its
/// exact Hermitian part before iterating.
pub fn herm_eigen(a: &MatC, tol: f64) -> Result<HermEigen> {
    let scale = a.max_abs();
    let defect = a.hermiticity_defect();
    if !(defect <= tol * scale) {
        return Err(Error::NotHermitian { defect, scale });
    }
    let n = a.dim();
    if scale == 0.0 {
        return Ok(HermEigen { values: [0.0; MAX_DIM], vectors: MatC::identity(n) });
    }
    // unit max-entry scale keeps squared norms clear of under/overflow
    let mut m = a.hermitian_part().scale(Complex::new(1.0 / scale, 0.0));
    let mut v = MatC::identity(n);
    let frob = m.frobenius();

    let mut converged = false;
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let off = off_diagonal_norm(&m);
        if off == 0.0 || off <= 1e-17 * frob {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                jacobi_rotate(&mut m, &mut v, p, q);
            }
        }
    }
    if !converged {
        let off = off_diagonal_norm(&m);
        if !(off <= 1e-17 * frob) {
            return Err(Error::NoConvergence { sweeps: JACOBI_MAX_SWEEPS, off_norm: off });
        }
    }

    // ascending, ties by original position
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re).then(i.cmp(&j)));

    let mut values = [0.0; MAX_DIM];
    let mut vectors = MatC::zeros(n);
    for (k, &src) in order.iter().enumerate() {
        values[k] = m[(src, src)].re * scale;
        for i in 0..n {
            vectors[(i, k)] = v[(i, src)];
        }
    }
    Ok(HermEigen { values, vectors })
}

fn off_diagonal_norm(m: &MatC) -> f64 {
    m.entries()
        .filter(|&(i, j, _)| i != j)
        .map(|(_, _, z)| z.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Zero `m[p][q]` with the unitary `G = diag(1, e^{-i phi}) R(c, s)` acting on
/// the `(p, q)` plane; `m <- G† m G`, `v <- v G`.
fn jacobi_rotate(m: &mut MatC, v: &mut MatC, p: usize, q: usize) {
    let apq = m[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r; // e^{i phi}
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let n = m.dim();

    // G_pp = c, G_pq = s, G_qp = -s e^{-i phi}, G_qq = c e^{-i phi}
    let gqp = -phase.conj() * s;
    let gqq = phase.conj() * c;

    for i in 0..n {
        let mip = m[(i, p)];
        let miq = m[(i, q)];
        m[(i, p)] = mip * c + miq * gqp;
        m[(i, q)] = mip * s + miq * gqq;
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = vip * c + viq * gqp;
        v[(i, q)] = vip * s + viq * gqq;
    }
    for j in 0..n {
        let mpj = m[(p, j)];
        let mqj = m[(q, j)];
        m[(p, j)] = mpj * c + mqj * gqp.conj();
        m[(q, j)] = mpj * s + mqj * gqq.conj();
    }
    m[(p, q)] = ZERO;
    m[(q, p)] = ZERO;
    m[(p, p)] = Complex::new(m[(p, p)].re, 0.0);
    m[(q, q)] = Complex::new(m[(q, q)].re, 0.0);
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> MatC {
        let mut m = MatC::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        m
    }

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> MatC {
        let g = random_matrix(rng, n);
        g + g.adjoint()
    }

    fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> MatC {
        // exp(-i H) of a random Hermitian H
        let h = random_hermitian(rng, n);
        let e = herm_eigen(&h, HERMITIAN_TOL).unwrap();
        e.apply_fn(|x| Complex::from_polar(1.0, -x))
    }

    fn check_decomposition(a: &MatC, e: &HermEigen) {
        let n = a.dim();
        let scale = a.max_abs().max(f64::MIN_POSITIVE);
        for k in 0..n {
            let vk = e.vectors.column(k);
            let av = a.mul_vec(&vk);
            let resid = av
                .iter()
                .zip(&vk)
                .map(|(x, y)| (x - y * e.values[k]).norm())
                .fold(0.0, f64::max);
            assert!(resid <= 1e-12 * scale, "residual {resid:e}");
        }
        let gram = &e.vectors.adjoint() * &e.vectors;
        assert!(gram.max_abs_diff(&MatC::identity(n)) <= 1e-12);
        assert!(e.reconstruct().max_abs_diff(a) <= 1e-12 * scale);
        assert!(e.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn identity_eigenvalues() {
        let e = herm_eigen(&MatC::identity(4), HERMITIAN_TOL).unwrap();
        assert_eq!(e.eigenvalues(), &[1.0, 1.0, 1.0, 1.0]);
        assert_eq!(e.vectors, MatC::identity(4));
    }

    #[test]
    fn diagonal_sorted_ascending() {
        let a = MatC::from_real_diag(&[3.0, -1.0, 0.0, 2.0]);
        let e = herm_eigen(&a, HERMITIAN_TOL).unwrap();
        assert_eq!(e.eigenvalues(), &[-1.0, 0.0, 2.0, 3.0]);
        // each eigenvector is the basis vector the value came from
        assert_eq!(e.vectors[(1, 0)], ONE);
        assert_eq!(e.vectors[(2, 1)], ONE);
        assert_eq!(e.vectors[(3, 2)], ONE);
        assert_eq!(e.vectors[(0, 3)], ONE);
    }

    #[test]
    fn ties_keep_original_order() {
        let a = MatC::from_real_diag(&[2.0, 1.0, 2.0, 1.0]);
        let e = herm_eigen(&a, HERMITIAN_TOL).unwrap();
        assert_eq!(e.eigenvalues(), &[1.0, 1.0, 2.0, 2.0]);
        assert_eq!(e.vectors[(1, 0)], ONE);
        assert_eq!(e.vectors[(3, 1)], ONE);
        assert_eq!(e.vectors[(0, 2)], ONE);
        assert_eq!(e.vectors[(2, 3)], ONE);
    }

    #[test]
    fn pauli_x() {
        let a = MatC::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]]);
        let e = herm_eigen(&a, HERMITIAN_TOL).unwrap();
        assert_abs_diff_eq!(e.values[0], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e.values[1], 1.0, epsilon = 1e-15);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        // up to a global phase: v_minus ~ (1, -1)/sqrt2, v_plus ~ (1, 1)/sqrt2
        let vm = e.vectors.column(0);
        let vp = e.vectors.column(1);
        assert_abs_diff_eq!((vm[0] + vm[1]).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(vm[0].norm(), h, epsilon = 1e-15);
        assert_abs_diff_eq!((vp[0] - vp[1]).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(vp[0].norm(), h, epsilon = 1e-15);
    }

    #[test]
    fn complex_two_by_two() {
        // Pauli-Y: eigenvalues -1, +1
        let a = MatC::from_rows(&[[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]]);
        let e = herm_eigen(&a, HERMITIAN_TOL).unwrap();
        assert_abs_diff_eq!(e.values[0], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e.values[1], 1.0, epsilon = 1e-15);
        check_decomposition(&a, &e);
    }

    #[test]
    fn random_hermitian_trace_and_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for n in 1..=4 {
            for _ in 0..200 {
                let h = random_hermitian(&mut rng, n);
                let e = herm_eigen(&h, HERMITIAN_TOL).unwrap();
                check_decomposition(&h, &e);
                let direct: f64 = (0..n).map(|i| h[(i, i)].re).sum();
                let sum: f64 = e.eigenvalues().iter().sum();
                assert!((sum - direct).abs() <= 1e-12 * h.max_abs());
            }
        }
    }

    #[test]
    fn unitary_conjugation_preserves_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let h = random_hermitian(&mut rng, 4);
            let w = random_unitary(&mut rng, 4);
            let g = &(&w * &h) * &w.adjoint();
            let e1 = herm_eigen(&h, HERMITIAN_TOL).unwrap();
            let e2 = herm_eigen(&g, 1e-9).unwrap();
            for k in 0..4 {
                assert!((e1.values[k] - e2.values[k]).abs() <= 1e-11);
            }
        }
    }

    #[test]
    fn degenerate_and_tiny_matrices() {
        let e = herm_eigen(&MatC::zeros(3), HERMITIAN_TOL).unwrap();
        assert_eq!(e.eigenvalues(), &[0.0, 0.0, 0.0]);
        let a = MatC::from_real_rows(&[[1e-200, 1e-200], [1e-200, 1e-200]]);
        let e = herm_eigen(&a, HERMITIAN_TOL).unwrap();
        check_decomposition(&a, &e);
        // rank-one projector: eigenvalues 0,0,0,1
        let psi = [c(0.5, 0.0), c(0.0, 0.5), c(-0.5, 0.0), c(0.0, -0.5)];
        let p = MatC::outer(&psi, &psi);
        let e = herm_eigen(&p, HERMITIAN_TOL).unwrap();
        check_decomposition(&p, &e);
        assert_abs_diff_eq!(e.values[3], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let a = MatC::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]);
        assert!(matches!(herm_eigen(&a, HERMITIAN_TOL), Err(Error::NotHermitian { .. })));
        // within tolerance is accepted and symmetrized
        let b = MatC::from_real_rows(&[[1.0, 1.0], [1.0 + 1e-12, 1.0]]);
        let e = herm_eigen(&b, HERMITIAN_TOL).unwrap();
        assert!(e.reconstruct().is_hermitian(0.0));
    }

    #[test]
    fn mat_mul_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_matrix(&mut rng, 4);
        assert_eq!(mat_mul(&a, &MatC::identity(4)).unwrap(), a);
        let p = MatC::from_real_diag(&[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(mat_mul(&p, &p).unwrap(), p);
        for _ in 0..50 {
            let a = random_matrix(&mut rng, 4);
            let b = random_matrix(&mut rng, 4);
            let lhs = (&a * &b).adjoint();
            let rhs = &b.adjoint() * &a.adjoint();
            assert!(lhs.max_abs_diff(&rhs) <= 1e-15);
            let c3 = random_matrix(&mut rng, 4);
            let l = &(&a * &b) * &c3;
            let r = &a * &(&b * &c3);
            assert!(l.max_abs_diff(&r) <= 1e-13);
        }
        assert!(matches!(
            mat_mul(&MatC::identity(2), &MatC::identity(3)),
            Err(Error::DimMismatch { left: 2, right: 3 })
        ));
    }

    #[test]
    fn adjoint_cases() {
        let s = MatC::from_real_rows(&[[1.0, 2.0], [2.0, -3.0]]);
        assert_eq!(adjoint(&s), s);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = random_matrix(&mut rng, 3);
        assert_eq!(adjoint(&adjoint(&a)), a);
        let d = MatC::from_diag(&[c(0.0, 1.0), c(0.0, -1.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let expect = MatC::from_diag(&[c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(adjoint(&d), expect);
    }
}
