// SPDX-License-Identifier: Apache-2.0

//! Brute-force reference: the full truncated Hilbert space, dense
//! Hamiltonian built from Kronecker products, diagonalized with nalgebra.
//! Shares nothing with the sector code.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, SymmetricEigen};

type C = nalgebra::Complex<f64>;

fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a.kronecker(b)
}

fn annihilation(dim: usize) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = (n as f64).sqrt();
    }
    a
}

/// Ordering: atom 1 (x) atom 2 (x) mode 1 (x) mode 2, atom index 0 = excited.
pub struct FullSpace {
    pub field_dim: usize,
    values: DVector<f64>,
    vectors: DMatrix<f64>,
}

impl FullSpace {
    /// `field_dim` Fock states per mode, `0..field_dim`.
    pub fn new(alpha: f64, field_dim: usize) -> Self {
        let i2 = DMatrix::<f64>::identity(2, 2);
        let idf = DMatrix::<f64>::identity(field_dim, field_dim);
        let mut lower = DMatrix::<f64>::zeros(2, 2);
        lower[(1, 0)] = 1.0;
        let r1 = kron(&kron(&lower, &i2), &kron(&idf, &idf));
        let r2 = kron(&kron(&i2, &lower), &kron(&idf, &idf));
        let a = annihilation(field_dim);
        let a1 = kron(&DMatrix::identity(4, 4), &kron(&a, &idf));
        let a2 = kron(&DMatrix::identity(4, 4), &kron(&idf, &a));
        let pair_up = a1.transpose() * a2.transpose();
        let mut h = &pair_up * (&r1 + &r2);
        h += h.transpose();
        let dipole = r1.transpose() * &r2;
        h += (&dipole + dipole.transpose()) * alpha;
        let eig = SymmetricEigen::new(h);
        Self { field_dim, values: eig.eigenvalues, vectors: eig.eigenvectors }
    }

    fn index(&self, atoms: usize, n1: usize, n2: usize) -> usize {
        (atoms * self.field_dim + n1) * self.field_dim + n2
    }

    fn propagate(&self, psi: &DVector<C>, gt: f64) -> DVector<C> {
        let vc = self.vectors.map(|x| C::new(x, 0.0));
        let mut coeff = vc.transpose() * psi;
        for (k, c) in coeff.iter_mut().enumerate() {
            *c *= C::from_polar(1.0, -self.values[k] * gt);
        }
        vc * coeff
    }

    /// Reduced atomic state from the product of a pure atomic state and a
    /// diagonal field mixture `weights1 (x) weights2`.
    pub fn reduced(&self, atoms: [(f64, f64); 4], weights1: &[f64], weights2: &[f64], gt: f64) -> [[(f64, f64); 4]; 4] {
        let d = self.field_dim;
        let mut rho = [[C::new(0.0, 0.0); 4]; 4];
        for (n1, &p1) in weights1.iter().enumerate() {
            for (n2, &p2) in weights2.iter().enumerate() {
                let mut psi = DVector::<C>::zeros(4 * d * d);
                for (a, &(re, im)) in atoms.iter().enumerate() {
                    psi[self.index(a, n1, n2)] = C::new(re, im);
                }
                let out = self.propagate(&psi, gt);
                for m1 in 0..d {
                    for m2 in 0..d {
                        for i in 0..4 {
                            let zi = out[self.index(i, m1, m2)];
                            for j in 0..4 {
                                rho[i][j] += zi * out[self.index(j, m1, m2)].conj() * (p1 * p2);
                            }
                        }
                    }
                }
            }
        }
        rho.map(|row| row.map(|z| (z.re, z.im)))
    }
}

/// `nbar^n / (1 + nbar)^(n+1)` for `n = 0..=cutoff`.
pub fn geometric_weights(nbar: f64, cutoff: usize) -> Vec<f64> {
    (0..=cutoff).map(|n| nbar.powi(n as i32) / (1.0 + nbar).powi(n as i32 + 1)).collect()
}

/// `(cos t1 |+> + e^{i p1} sin t1 |->) (x) (same for atom 2)`.
pub fn product_state(t1: f64, p1: f64, t2: f64, p2: f64) -> [(f64, f64); 4] {
    let one = |t: f64, p: f64| [C::new(t.cos(), 0.0), C::from_polar(t.sin(), p)];
    let (a, b) = (one(t1, p1), one(t2, p2));
    let z = [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]];
    z.map(|c| (c.re, c.im))
}
