// SPDX-License-Identifier: Apache-2.0

//! Reduced two-atom dynamics averaged over the thermal two-mode field.
//!
//! For a pure atomic preparation `psi` and initial Fock pair `|n1, n2>`, the
//! joint state stays inside the (at most three) sectors reached from
//! `|a, n1, n2>`, and after propagation splits by final occupation as
//! `sum_d |phi_d> (x) |n1 + d, n2 + d>` with `d` in `-2..=2`. The field trace
//! then contributes `sum_d |phi_d><phi_d|`, weighted by `p1(n1) p2(n2)`.
//!
//! Fock pairs are summed in a fixed order (`n1` outer, `n2` inner) with
//! compensated accumulation per matrix entry. Time points are independent,
//! so they are split across workers and the result does not depend on the
//! worker count.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entanglement::{negativity, NegativityResult};
use crate::error::{Error, Result};
use crate::model::{build_thermal_weights, AtomPreparation, ModelParams, ThermalWeights};
use crate::propagator::{analytic_entry, sector_of, Atomic, BasisState, Sector, SectorEigen};
use crate::smallmat::{herm_eigen, Complex, Mat4C, HERMITIAN_TOL};
use crate::sum::{compensated_sum, CompensatedSum};

/// How sector propagators are produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    /// Eigendecomposition of every sector block.
    Numeric,
    /// Closed-form entries on four-state sectors, numeric on the boundary.
    Analytic,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReducedState {
    pub gt: f64,
    /// Unnormalized: the trace falls short of 1 by the discarded thermal mass.
    pub rho: Mat4C,
    /// `|trace - 1|`.
    pub trace_error: f64,
    /// Smallest eigenvalue of the renormalized state.
    pub min_eig: f64,
}

impl ReducedState {
    /// `rho / trace(rho)`.
    pub fn normalized(&self) -> Mat4C {
        self.rho.scale(Complex::new(1.0 / self.rho.trace().re, 0.0))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NegativityPoint {
    pub state: ReducedState,
    pub negativity: NegativityResult,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NegativityTrace {
    pub points: Vec<NegativityPoint>,
    pub cutoffs: (u32, u32),
    pub tails: (f64, f64),
    pub truncation_warning: bool,
}

impl NegativityTrace {
    pub fn max_epsilon(&self) -> f64 {
        self.points.iter().map(|p| p.negativity.epsilon).fold(0.0, f64::max)
    }
}

/// Uniform grid of `steps` points on `[0, gt_max]`, endpoints included.
pub fn uniform_grid(gt_max: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..steps).map(|k| gt_max * k as f64 / (steps - 1) as f64).collect(),
    }
}

/// A configured thermal-field simulation.
#[derive(Clone, Debug)]
pub struct Simulation {
    params: ModelParams,
    prep: AtomPreparation,
    psi: [Complex; 4],
    field1: ThermalWeights,
    field2: ThermalWeights,
}

impl Simulation {
    pub fn new(params: ModelParams, prep: AtomPreparation) -> Result<Self> {
        params.validate()?;
        let field1 = build_thermal_weights(params.nbar1, params.cutoff_tail, params.cutoff_cap);
        let field2 = build_thermal_weights(params.nbar2, params.cutoff_tail, params.cutoff_cap);
        Ok(Self { params, prep, psi: prep.canonical_amplitudes(), field1, field2 })
    }

    /// Explicit per-mode Fock cutoffs instead of the tail policy.
    pub fn with_cutoffs(params: ModelParams, prep: AtomPreparation, cutoff1: u32, cutoff2: u32) -> Result<Self> {
        params.validate()?;
        let field1 = ThermalWeights::with_cutoff(params.nbar1, cutoff1);
        let field2 = ThermalWeights::with_cutoff(params.nbar2, cutoff2);
        Ok(Self { params, prep, psi: prep.canonical_amplitudes(), field1, field2 })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn prep(&self) -> &AtomPreparation {
        &self.prep
    }

    pub fn fields(&self) -> (&ThermalWeights, &ThermalWeights) {
        (&self.field1, &self.field2)
    }

    pub fn cutoffs(&self) -> (u32, u32) {
        (self.field1.cutoff, self.field2.cutoff)
    }

    pub fn truncation_warning(&self) -> bool {
        self.field1.truncation_warning || self.field2.truncation_warning
    }

    /// Thermal mass kept by the cutoffs, `(sum p1)(sum p2)`.
    pub fn retained_mass(&self) -> f64 {
        compensated_sum(&self.field1.weights) * compensated_sum(&self.field2.weights)
    }

    /// Raw reduced density matrices on `grid`.
    pub fn reduced_matrices(&self, grid: &[f64], engine: Engine) -> Result<Vec<Mat4C>> {
        if grid.is_empty() {
            return Ok(Vec::new());
        }
        let workers = rayon::current_num_threads().max(1);
        let chunk = grid.len().div_ceil(workers * 4).max(1);
        let parts: Vec<Vec<Mat4C>> = grid
            .par_chunks(chunk)
            .map(|times| self.accumulate(times, engine))
            .collect::<Result<_>>()?;
        Ok(parts.into_iter().flatten().collect())
    }

    pub fn evolve(&self, gt: f64, engine: Engine) -> Result<ReducedState> {
        let rho = self.accumulate(&[gt], engine)?.pop().expect("one time point");
        diagnose(gt, rho)
    }

    pub fn reduced_states(&self, grid: &[f64], engine: Engine) -> Result<Vec<ReducedState>> {
        let mats = self.reduced_matrices(grid, engine)?;
        grid.iter().zip(mats).map(|(&gt, rho)| diagnose(gt, rho)).collect()
    }

    pub fn negativity_series(&self, grid: &[f64], engine: Engine) -> Result<NegativityTrace> {
        let states = self.reduced_states(grid, engine)?;
        let points = states
            .into_iter()
            .map(|state| {
                let negativity = negativity(&state.normalized())?;
                Ok(NegativityPoint { state, negativity })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(NegativityTrace {
            points,
            cutoffs: self.cutoffs(),
            tails: (self.field1.tail, self.field2.tail),
            truncation_warning: self.truncation_warning(),
        })
    }

    /// Thermal sum for a block of time points, one pass over the Fock pairs.
    fn accumulate(&self, times: &[f64], engine: Engine) -> Result<Vec<Mat4C>> {
        for &gt in times {
            if !gt.is_finite() {
                return Err(Error::InvalidParameter { field: "gt", reason: format!("must be finite, got {gt}") });
            }
        }
        let alpha = self.params.alpha;
        let sources: Vec<Atomic> =
            Atomic::ALL.into_iter().filter(|a| self.psi[a.index()] != Complex::new(0.0, 0.0)).collect();
        let mut acc = vec![Accumulator::default(); times.len()];
        let mut cache = SectorCache::new(alpha, times, engine);
        let mut placed: Vec<(Atomic, Sector, usize)> = Vec::with_capacity(4);

        for (n1, &p1) in self.field1.weights.iter().enumerate() {
            let n1 = n1 as u32;
            cache.retire_rows_below(n1.saturating_sub(2));
            for (n2, &p2) in self.field2.weights.iter().enumerate() {
                let weight = p1 * p2;
                if weight == 0.0 {
                    continue;
                }
                let n2 = n2 as u32;
                placed.clear();
                for &a in &sources {
                    let (sector, pos) = sector_of(BasisState::new(a, n1, n2));
                    cache.ensure(sector)?;
                    placed.push((a, sector, pos));
                }
                let routes: Vec<Route<'_>> = placed
                    .iter()
                    .map(|&(a, sector, pos)| Route::new(a, pos, cache.entry(sector), n1, self.psi[a.index()]))
                    .collect();

                for (t, (slot, &gt)) in acc.iter_mut().zip(times).enumerate() {
                    let mut phi = [[Complex::new(0.0, 0.0); 4]; 5];
                    for route in &routes {
                        let col = match route.cached.phases.as_deref() {
                            Some(phases) => route.cached.eig.column_with_phases(route.pos, &phases[t]),
                            None => route.analytic_column(n1, n2, alpha, gt)?,
                        };
                        for k in 0..route.cached.eig.dim() {
                            let (target, shift) = route.targets[k];
                            phi[shift][target] += col[k] * route.amp;
                        }
                    }
                    slot.add_projectors(weight, &phi);
                }
            }
        }
        Ok(acc.iter().map(Accumulator::matrix).collect())
    }
}

/// Where one initial atomic basis state is propagated.
struct Route<'a> {
    source: Atomic,
    pos: usize,
    amp: Complex,
    cached: &'a CachedSector,
    /// `(final atomic index, final occupation shift + 2)` per sector state.
    targets: [(usize, usize); 4],
}

impl<'a> Route<'a> {
    fn new(source: Atomic, pos: usize, cached: &'a CachedSector, n1: u32, amp: Complex) -> Self {
        let mut targets = [(0, 0); 4];
        for (k, st) in cached.eig.states.iter().enumerate() {
            let shift = i64::from(st.n1) - i64::from(n1) + 2;
            debug_assert!((0..5).contains(&shift));
            targets[k] = (st.atoms.index(), shift as usize);
        }
        Self { source, pos, amp, cached, targets }
    }

    fn analytic_column(&self, n1: u32, n2: u32, alpha: f64, gt: f64) -> Result<[Complex; 4]> {
        let eig = &self.cached.eig;
        let mut col = [Complex::new(0.0, 0.0); 4];
        for (k, st) in eig.states.iter().enumerate() {
            col[k] = analytic_entry(st.atoms, self.source, n1, n2, alpha, gt)
                .map_err(|e| Error::Sector { sector: eig.sector, gt, source: Box::new(e) })?;
        }
        Ok(col)
    }
}

struct CachedSector {
    eig: SectorEigen,
    /// `exp(-i w_k gt)` per time point; `None` when the closed form is used.
    phases: Option<Vec<[Complex; 4]>>,
}

/// Sector eigendecompositions and their phases over the current time block.
/// `Quad` rows are dropped once the Fock sweep has passed them.
struct SectorCache<'t> {
    alpha: f64,
    times: &'t [f64],
    engine: Engine,
    map: HashMap<Sector, CachedSector>,
}

impl<'t> SectorCache<'t> {
    fn new(alpha: f64, times: &'t [f64], engine: Engine) -> Self {
        Self { alpha, times, engine, map: HashMap::new() }
    }

    fn ensure(&mut self, sector: Sector) -> Result<()> {
        if self.map.contains_key(&sector) {
            return Ok(());
        }
        let eig = SectorEigen::new(sector, self.alpha)?;
        let closed_form = self.engine == Engine::Analytic && matches!(sector, Sector::Quad { .. });
        let phases = (!closed_form).then(|| self.times.iter().map(|&gt| eig.phases(gt)).collect());
        self.map.insert(sector, CachedSector { eig, phases });
        Ok(())
    }

    fn entry(&self, sector: Sector) -> &CachedSector {
        &self.map[&sector]
    }

    fn retire_rows_below(&mut self, m1_min: u32) {
        self.map.retain(|s, _| !matches!(s, Sector::Quad { m1, .. } if *m1 < m1_min));
    }
}

/// Upper triangle of a Hermitian 4x4 under compensated summation.
#[derive(Clone, Copy, Default)]
struct Accumulator {
    diag: [CompensatedSum; 4],
    off_re: [CompensatedSum; 6],
    off_im: [CompensatedSum; 6],
}

const UPPER: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

impl Accumulator {
    #[inline]
    fn add_projectors(&mut self, weight: f64, phi: &[[Complex; 4]; 5]) {
        let mut diag = [0.0; 4];
        let mut off = [Complex::new(0.0, 0.0); 6];
        for v in phi {
            if v.iter().all(|z| *z == Complex::new(0.0, 0.0)) {
                continue;
            }
            for i in 0..4 {
                diag[i] += v[i].norm_sqr();
            }
            for (slot, &(i, j)) in off.iter_mut().zip(&UPPER) {
                *slot += v[i] * v[j].conj();
            }
        }
        for i in 0..4 {
            self.diag[i].add(weight * diag[i]);
        }
        for k in 0..6 {
            self.off_re[k].add(weight * off[k].re);
            self.off_im[k].add(weight * off[k].im);
        }
    }

    fn matrix(&self) -> Mat4C {
        let mut m = Mat4C::zeros(4);
        for i in 0..4 {
            m[(i, i)] = Complex::new(self.diag[i].value(), 0.0);
        }
        for (k, &(i, j)) in UPPER.iter().enumerate() {
            let z = Complex::new(self.off_re[k].value(), self.off_im[k].value());
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
        m
    }
}

fn diagnose(gt: f64, rho: Mat4C) -> Result<ReducedState> {
    let trace = rho.trace().re;
    let normalized = rho.scale(Complex::new(1.0 / trace, 0.0));
    let min_eig = herm_eigen(&normalized, HERMITIAN_TOL)?.values[0];
    Ok(ReducedState { gt, rho, trace_error: (trace - 1.0).abs(), min_eig })
}

/// Reduced state at one time with the default numeric engine.
pub fn evolve_reduced(params: &ModelParams, prep: &AtomPreparation, gt: f64) -> Result<ReducedState> {
    Simulation::new(*params, *prep)?.evolve(gt, Engine::Numeric)
}

/// Negativity time series with the default numeric engine.
pub fn negativity_series(params: &ModelParams, prep: &AtomPreparation, grid: &[f64]) -> Result<NegativityTrace> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter { field: "gt_grid", reason: "must not be empty".into() });
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter { field: "gt_grid", reason: "must be strictly ascending".into() });
    }
    Simulation::new(*params, *prep)?.negativity_series(grid, Engine::Numeric)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::initial_atomic_density;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn fig1a() -> (ModelParams, AtomPreparation) {
        (ModelParams::new(0.1, 0.01, 0.01).unwrap(), AtomPreparation::basis(true, false))
    }

    #[test]
    fn zero_time_returns_initial_state() {
        let params = ModelParams::new(0.3, 0.5, 1.2).unwrap();
        let prep = AtomPreparation::new(0.4, 1.0, 1.1, -0.3).unwrap();
        let sim = Simulation::new(params, prep).unwrap();
        let s = sim.evolve(0.0, Engine::Numeric).unwrap();
        let expect = initial_atomic_density(&prep).scale(Complex::new(sim.retained_mass(), 0.0));
        assert!(s.rho.max_abs_diff(&expect) < 1e-14);
        assert!((s.trace_error - (1.0 - sim.retained_mass())).abs() < 1e-15);
    }

    #[test]
    fn dark_configuration_stays_put() {
        let params = ModelParams::new(0.3, 0.0, 2.0).unwrap();
        let prep = AtomPreparation::basis(false, false);
        let sim = Simulation::new(params, prep).unwrap();
        let target = Mat4C::from_real_diag(&[0.0, 0.0, 0.0, 1.0]).scale(Complex::new(sim.retained_mass(), 0.0));
        for s in sim.reduced_states(&uniform_grid(25.0, 40), Engine::Numeric).unwrap() {
            assert!(s.rho.max_abs_diff(&target) < 1e-15);
        }
    }

    #[test]
    fn trace_and_hermiticity() {
        let params = ModelParams::new(0.1, 0.2, 0.2).unwrap();
        let prep = AtomPreparation::new(FRAC_PI_4, PI / 6.0, FRAC_PI_4, 0.0).unwrap();
        let sim = Simulation::new(params, prep).unwrap();
        let kept = sim.retained_mass();
        for s in sim.reduced_states(&uniform_grid(25.0, 60), Engine::Numeric).unwrap() {
            assert!(s.rho.hermiticity_defect() <= 1e-12);
            assert!((s.rho.trace().re - kept).abs() <= 1e-10);
            assert!(s.min_eig >= -1e-9);
        }
    }

    #[test]
    fn engines_agree() {
        let params = ModelParams::new(0.3, 0.5, 0.8).unwrap();
        let prep = AtomPreparation::new(0.3, 0.2, 1.0, 2.0).unwrap();
        let sim = Simulation::new(params, prep).unwrap();
        let grid = uniform_grid(20.0, 41);
        let a = sim.reduced_matrices(&grid, Engine::Numeric).unwrap();
        let b = sim.reduced_matrices(&grid, Engine::Analytic).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!(x.max_abs_diff(y) < 1e-10);
        }
    }

    #[test]
    fn single_point_matches_batch_bitwise() {
        let (params, prep) = fig1a();
        let sim = Simulation::new(params, prep).unwrap();
        let grid = uniform_grid(10.0, 11);
        let batch = sim.reduced_matrices(&grid, Engine::Numeric).unwrap();
        for (gt, m) in grid.iter().zip(&batch) {
            assert_eq!(sim.evolve(*gt, Engine::Numeric).unwrap().rho, *m);
        }
    }

    #[test]
    fn separable_start_has_zero_negativity() {
        let params = ModelParams::new(0.1, 0.2, 0.2).unwrap();
        for prep in [
            AtomPreparation::basis(true, false),
            AtomPreparation::new(FRAC_PI_4, 0.0, FRAC_PI_4, PI).unwrap(),
            AtomPreparation::new(0.3, 1.0, FRAC_PI_2, 0.0).unwrap(),
        ] {
            let t = negativity_series(&params, &prep, &[0.0]).unwrap();
            assert_eq!(t.points[0].negativity.epsilon, 0.0);
        }
    }

    #[test]
    fn fig1a_generates_entanglement() {
        let (params, prep) = fig1a();
        let t = negativity_series(&params, &prep, &uniform_grid(25.0, 500)).unwrap();
        assert!(t.max_epsilon() > 0.0);
        assert!(t.points.iter().all(|p| (0.0..=1.0).contains(&p.negativity.epsilon)));
    }

    #[test]
    fn rejects_bad_grids() {
        let (params, prep) = fig1a();
        assert!(negativity_series(&params, &prep, &[]).is_err());
        assert!(negativity_series(&params, &prep, &[1.0, 0.5]).is_err());
        assert!(evolve_reduced(&params, &prep, f64::NAN).is_err());
    }

    #[test]
    fn grid_shape() {
        assert_eq!(uniform_grid(25.0, 1), vec![0.0]);
        let g = uniform_grid(25.0, 500);
        assert_eq!(g.len(), 500);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[499], 25.0);
    }
}
