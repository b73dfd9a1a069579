// SPDX-License-Identifier: Apache-2.0

//! Exact unitary dynamics of two dipole-coupled two-level atoms that exchange
//! photon pairs with a two-mode thermal cavity field, and the atom-atom
//! negativity that dynamics generates.
//!
//! The pieces, bottom up:
//!
//! * [`smallmat`]: fixed-size complex matrices and a Jacobi eigensolver.
//! * [`model`]: parameters, thermal Fock weights, the product atomic state.
//! * [`propagator`]: invariant sectors of the Hamiltonian and their
//!   propagators, numerically and in closed form.
//! * [`dynamics`]: the reduced two-atom state summed over the thermal
//!   ensemble.
//! * [`entanglement`]: partial transpose and negativity.
//! * [`appendix`]: evaluator for the closed-form reference matrix elements,
//!   checked against the sector engine.

pub mod appendix;
pub mod dynamics;
pub mod entanglement;
pub mod error;
pub mod model;
pub mod propagator;
pub mod smallmat;
pub mod sum;

pub use appendix::{appendix_elements, check_appendix, AppendixReport, Disposition, Element, ElementCheck};
pub use dynamics::{Engine, NegativityPoint, NegativityTrace, ReducedState, Simulation};
pub use entanglement::{negativity, partial_transpose, NegativityResult};
pub use error::{Error, Result};
pub use model::{initial_atomic_density, AtomPreparation, ModelParams, ThermalWeights};
pub use propagator::{Atomic, BasisState, Sector};
pub use smallmat::{herm_eigen, Complex, HermEigen, Mat4C, MatC};
