// SPDX-License-Identifier: Apache-2.0

//! Negativity of a two-atom state via the partial transpose.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::smallmat::{herm_eigen, Mat4C, HERMITIAN_TOL};

/// Partial-transpose eigenvalues above this are reported as non-negative.
pub const NEGATIVITY_DUST: f64 = -1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NegativityResult {
    pub epsilon: f64,
    pub negative_eigs: Vec<f64>,
    /// Ascending.
    pub pt_spectrum: [f64; 4],
}

fn check_two_qubit(rho: &Mat4C) -> Result<()> {
    if rho.dim() != 4 {
        return Err(Error::DimMismatch { left: rho.dim(), right: 4 });
    }
    if !rho.is_hermitian(HERMITIAN_TOL) {
        return Err(Error::NotHermitian { defect: rho.hermiticity_defect(), scale: rho.max_abs() });
    }
    Ok(())
}

/// Transpose over the second atom: `<i j| rho |k l>` moves to `<i l| . |k j>`.
pub fn partial_transpose(rho: &Mat4C) -> Result<Mat4C> {
    check_two_qubit(rho)?;
    Ok(partial_transpose_unchecked(rho, 1))
}

/// Transpose over the first atom.
pub fn partial_transpose_first(rho: &Mat4C) -> Result<Mat4C> {
    check_two_qubit(rho)?;
    Ok(partial_transpose_unchecked(rho, 0))
}

fn partial_transpose_unchecked(rho: &Mat4C, atom: usize) -> Mat4C {
    let mut out = Mat4C::zeros(4);
    for (row, col, z) in rho.entries() {
        let (i, j) = (row >> 1, row & 1);
        let (k, l) = (col >> 1, col & 1);
        let (r, c) = if atom == 1 { ((i << 1) | l, (k << 1) | j) } else { ((k << 1) | j, (i << 1) | l) };
        out[(r, c)] = z;
    }
    out
}

/// `epsilon = -2 * (sum of negative partial-transpose eigenvalues)`.
pub fn negativity(rho: &Mat4C) -> Result<NegativityResult> {
    let pt = partial_transpose(rho)?;
    let eig = herm_eigen(&pt, HERMITIAN_TOL)?;
    let mut pt_spectrum = [0.0; 4];
    pt_spectrum.copy_from_slice(eig.eigenvalues());
    if pt_spectrum.iter().all(|&x| x >= NEGATIVITY_DUST) {
        return Ok(NegativityResult { epsilon: 0.0, negative_eigs: Vec::new(), pt_spectrum });
    }
    let negative_eigs: Vec<f64> = pt_spectrum.iter().copied().filter(|&x| x < 0.0).collect();
    let epsilon = -2.0 * negative_eigs.iter().sum::<f64>();
    Ok(NegativityResult { epsilon, negative_eigs, pt_spectrum })
}
