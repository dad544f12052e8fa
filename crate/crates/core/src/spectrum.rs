//! Coupled two-parameter eigenvalue solver.
//!
//! A bound state at index `(N_Theta, N_Omega, 2 kappa)` is a pair `(E,
//! lambda)` for which both cylinder systems possess saddles connectors with
//! the prescribed windings. The angular eigenvalue is slaved to the energy
//! (`lambda = lambda(E)` from the Theta solve), leaving a single outer root
//! find on the radial connector miss over the spectral gap `E in (0, 1)`.
//!
//! Energies cluster exponentially near `E = 1` for small couplings, so the
//! scan grid is log-spaced in `1 - E`. Scanning uses the cheap single-ended
//! radial lift; bracket refinement and the final state use two-sided
//! matching.

use crate::angular::{
    angular_amplitude, solve_lambda, AngularContext, AngularSolution, AngularTols, BracketConfig,
};
use crate::error::{Error, Result};
use crate::labels::{winding_to_label, SpectroLabel};
use crate::ode::{lift_to_winding, WindingConvention};
use crate::radial::{
    default_cutoff, forward_lift, matched_miss, radial_amplitude, shoot_omega_matched,
    shot_target, RadialContext, RadialShot, RadialTols,
};
use num_complex::Complex64;
use rayon::prelude::*;

/// Physical configuration: ring radius, coupling, and the default angular
/// momentum sector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub a: f64,
    pub gamma: f64,
    pub two_kappa: i32,
}

/// `a_max = 1 - 1/sqrt(2)`: the ring-radius bound of the existence theorem.
pub const A_MAX: f64 = 0.292_893_218_813_452_5;
/// `gamma_min = -1/2`: the coupling bound of the existence theorem.
pub const GAMMA_MIN: f64 = -0.5;

impl ModelParams {
    pub fn new(a: f64, gamma: f64, two_kappa: i32) -> Result<Self> {
        if !(a >= 0.0 && a.is_finite()) {
            return Err(Error::InvalidParam(format!("ring radius a = {a} must be >= 0")));
        }
        if !(gamma < 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParam(format!("gamma = {gamma} must be negative")));
        }
        if two_kappa.rem_euclid(2) == 0 {
            return Err(Error::InvalidParam(format!(
                "2 kappa = {two_kappa} must be odd"
            )));
        }
        Ok(ModelParams { a, gamma, two_kappa })
    }

    /// Whether `(a, gamma)` lies inside the window where the existence
    /// theorem guarantees the found/not-found pattern. The solver runs
    /// outside the window too, but results there are not guaranteed.
    pub fn in_theorem_window(&self) -> bool {
        self.a > 0.0 && self.a < A_MAX && self.gamma > GAMMA_MIN && self.gamma < 0.0
    }
}

/// The three integers indexing a bound state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StateIndex {
    pub n_theta: i32,
    pub n_omega: i32,
    pub two_kappa: i32,
}

impl StateIndex {
    pub fn new(n_theta: i32, n_omega: i32, two_kappa: i32) -> Result<Self> {
        if two_kappa.rem_euclid(2) == 0 {
            return Err(Error::InvalidParam(format!(
                "2 kappa = {two_kappa} must be odd"
            )));
        }
        Ok(StateIndex { n_theta, n_omega, two_kappa })
    }

    /// The existence-theorem predicate: windings `(N_Theta >= 0, N_Omega >=
    /// 0)` or `(N_Theta <= -1, N_Omega >= 1)`.
    pub fn admissible(&self) -> bool {
        (self.n_theta >= 0 && self.n_omega >= 0) || (self.n_theta <= -1 && self.n_omega >= 1)
    }

    /// The integer `N` labelling the angular eigenstate.
    pub fn n_big(&self) -> i32 {
        if self.n_theta >= 0 {
            self.n_theta + 1
        } else {
            self.n_theta
        }
    }
}

/// Tolerances and scan controls for the coupled solve.
#[derive(Debug, Clone, Copy)]
pub struct SpectrumTols {
    pub angular: AngularTols,
    pub radial: RadialTols,
    /// Root tolerance on the energy.
    pub e_tol: f64,
    /// Number of scan points over the gap.
    pub scan_points: usize,
    /// Scan window in `g = 1 - E`: from `gap_max` down to `gap_min`.
    pub gap_min: f64,
    pub gap_max: f64,
}

impl Default for SpectrumTols {
    fn default() -> Self {
        SpectrumTols {
            angular: AngularTols::default(),
            radial: RadialTols::default(),
            e_tol: 1e-9,
            scan_points: 64,
            gap_min: 1e-6,
            gap_max: 0.5,
        }
    }
}

impl SpectrumTols {
    fn scan_grid(&self) -> Vec<f64> {
        let n = self.scan_points.max(2);
        (0..n)
            .map(|i| {
                let frac = i as f64 / (n - 1) as f64;
                let gap = self.gap_max * (self.gap_min / self.gap_max).powf(frac);
                1.0 - gap
            })
            .collect()
    }
}

/// A solved eigenpair with its profiles and diagnostics.
#[derive(Debug, Clone)]
pub struct BoundState {
    pub energy: f64,
    pub lambda: f64,
    pub index: StateIndex,
    pub angular: AngularSolution,
    pub radial: RadialShot,
    /// Half-width of the final energy bracket.
    pub e_residual: f64,
    /// Hydrogenic label; `None` for inadmissible indices solved anyway.
    pub label: Option<SpectroLabel>,
}

/// Tracks the slowly varying angular eigenvalue along an energy sweep so
/// each inner solve starts from a tight bracket.
struct LambdaCache {
    last: Option<f64>,
}

impl LambdaCache {
    fn new() -> Self {
        LambdaCache { last: None }
    }

    fn solve(
        &mut self,
        params: &ModelParams,
        index: &StateIndex,
        energy: f64,
        tols: &SpectrumTols,
    ) -> Result<AngularSolution> {
        let ctx = AngularContext::new(params.a, energy, index.two_kappa)?;
        let search = match self.last {
            Some(lambda) => BracketConfig::seeded(lambda, 0.3),
            None => BracketConfig::default(),
        };
        let sol = solve_lambda(&ctx, index.n_theta, &search, &tols.angular)?;
        self.last = Some(sol.lambda);
        Ok(sol)
    }
}

fn radial_context(params: &ModelParams, index: &StateIndex, lambda: f64, energy: f64) -> Result<RadialContext> {
    RadialContext::new(params.a, params.gamma, index.two_kappa, lambda, energy)
}

fn cutoff(tols: &SpectrumTols, energy: f64) -> f64 {
    tols.radial.r0.unwrap_or_else(|| default_cutoff(energy))
}

/// Radial connector miss at trial energy `E` with the angular eigenvalue
/// slaved to the Theta winding: `DeltaOmega(E, lambda(E)) - target(E,
/// N_Omega)`.
///
/// The angular momentum sector is taken from `index`.
pub fn coupled_miss(
    params: &ModelParams,
    index: &StateIndex,
    energy: f64,
    tols: &SpectrumTols,
) -> Result<f64> {
    let mut cache = LambdaCache::new();
    coupled_miss_cached(params, index, energy, tols, &mut cache)
}

fn coupled_miss_cached(
    params: &ModelParams,
    index: &StateIndex,
    energy: f64,
    tols: &SpectrumTols,
    cache: &mut LambdaCache,
) -> Result<f64> {
    let ang = cache.solve(params, index, energy, tols)?;
    let ctx = radial_context(params, index, ang.lambda, energy)?;
    matched_miss(&ctx, index.n_omega, cutoff(tols, energy), &tols.radial)
}

/// Solve for the bound state with the given winding index.
///
/// Scans the gap for sign changes of the connector miss, bisects the unique
/// bracket, and assembles the converged profiles. `NoRootInGap` is the
/// legal outcome for indices excluded by the existence theorem;
/// `MultipleRoots` reports every root energy when the one-root-per-winding
/// assumption fails.
pub fn solve_bound_state(
    params: &ModelParams,
    index: &StateIndex,
    tols: &SpectrumTols,
) -> Result<BoundState> {
    let grid = tols.scan_grid();
    let mut cache = LambdaCache::new();

    // cheap single-ended scan; the forward and matched misses share their
    // roots, each sitting on the same connector transition
    let mut scan: Vec<(f64, f64)> = Vec::with_capacity(grid.len());
    for &energy in &grid {
        let ang = cache.solve(params, index, energy, tols)?;
        let ctx = radial_context(params, index, ang.lambda, energy)?;
        let (delta, _) = forward_lift(&ctx, cutoff(tols, energy), &tols.radial)?;
        let miss = delta - shot_target(&ctx, index.n_omega);
        scan.push((energy, miss));
    }

    let mut brackets: Vec<(f64, f64)> = Vec::new();
    for w in scan.windows(2) {
        let ((e0, f0), (e1, f1)) = (w[0], w[1]);
        if f0 == 0.0 {
            brackets.push((e0, e0));
        } else if f0.signum() != f1.signum() {
            brackets.push((e0, e1));
        }
    }
    if brackets.is_empty() {
        return Err(Error::NoRootInGap {
            lo: grid[0],
            hi: *grid.last().unwrap(),
            points: grid.len(),
        });
    }

    let mut roots: Vec<(f64, f64)> = Vec::new();
    for &(lo, hi) in &brackets {
        roots.push(refine_energy(params, index, lo, hi, tols)?);
    }
    if roots.len() > 1 {
        return Err(Error::MultipleRoots {
            energies: roots.iter().map(|r| r.0).collect(),
        });
    }
    let (energy, e_residual) = roots[0];

    // final assembly at the converged energy
    let mut cache = LambdaCache::new();
    let ang = cache.solve(params, index, energy, tols)?;
    let ctx = radial_context(params, index, ang.lambda, energy)?;
    let matched = shoot_omega_matched(&ctx, index.n_omega, cutoff(tols, energy), &tols.radial)?;

    // recompute windings from the stored profiles
    let n_theta = lift_to_winding(ang.delta_lift(), WindingConvention::Theta)?;
    if n_theta != index.n_theta || matched.shot.winding != index.n_omega {
        return Err(Error::InvalidParam(format!(
            "winding verification failed: got ({n_theta}, {}), requested ({}, {})",
            matched.shot.winding, index.n_theta, index.n_omega
        )));
    }

    Ok(BoundState {
        energy,
        lambda: ang.lambda,
        index: *index,
        angular: ang,
        radial: matched.shot,
        e_residual,
        label: winding_to_label(index).ok(),
    })
}

/// Bisection on the matched coupled miss inside a sign-change bracket;
/// returns the root and the final bracket half-width.
fn refine_energy(
    params: &ModelParams,
    index: &StateIndex,
    mut lo: f64,
    mut hi: f64,
    tols: &SpectrumTols,
) -> Result<(f64, f64)> {
    if lo == hi {
        return Ok((lo, 0.0));
    }
    let mut cache = LambdaCache::new();
    let eval = |e: f64, cache: &mut LambdaCache| -> Result<f64> {
        coupled_miss_cached(params, index, e, tols, cache)
    };
    let mut flo = eval(lo, &mut cache)?;
    let fhi = eval(hi, &mut cache)?;
    if flo == 0.0 {
        return Ok((lo, 0.0));
    }
    if fhi == 0.0 {
        return Ok((hi, 0.0));
    }
    if flo.signum() == fhi.signum() {
        // the forward scan bracketed a transition the matched miss resolves
        // slightly differently; nudge the lower edge outward
        lo = (lo - 5.0 * (hi - lo)).max(1e-9);
        flo = eval(lo, &mut cache)?;
        if flo.signum() == fhi.signum() {
            return Err(Error::NoRootInGap { lo, hi, points: 2 });
        }
    }
    for _ in 0..200 {
        if hi - lo <= tols.e_tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = eval(mid, &mut cache)?;
        if fm == 0.0 {
            return Ok((mid, 0.0));
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi), 0.5 * (hi - lo)))
}

/// One cell of an existence scan.
#[derive(Debug, Clone)]
pub struct ExistenceCell {
    pub index: StateIndex,
    /// The theorem's prediction for this cell.
    pub predicted: bool,
    pub outcome: ExistenceOutcome,
}

#[derive(Debug, Clone)]
pub enum ExistenceOutcome {
    Found { energy: f64, lambda: f64 },
    NotFound,
    Failed { message: String },
}

impl ExistenceOutcome {
    pub fn found(&self) -> bool {
        matches!(self, ExistenceOutcome::Found { .. })
    }
}

/// Found/not-found table over winding ranges, compared against the
/// existence-theorem predicate.
#[derive(Debug, Clone, Default)]
pub struct ExistenceReport {
    pub cells: Vec<ExistenceCell>,
}

impl ExistenceReport {
    /// True when every cell agrees with the theorem's prediction.
    pub fn matches_theorem(&self) -> bool {
        self.cells
            .iter()
            .all(|c| c.outcome.found() == c.predicted)
    }
}

/// Attempt every `(N_Theta, N_Omega)` in the given ranges for the kappa
/// sector of `params`. Cells run in parallel; the report order is the
/// row-major range order regardless of worker count.
pub fn existence_scan(
    params: &ModelParams,
    n_theta_range: std::ops::RangeInclusive<i32>,
    n_omega_range: std::ops::RangeInclusive<i32>,
    tols: &SpectrumTols,
) -> ExistenceReport {
    let mut indices = Vec::new();
    for n_theta in n_theta_range {
        for n_omega in n_omega_range.clone() {
            indices.push(StateIndex {
                n_theta,
                n_omega,
                two_kappa: params.two_kappa,
            });
        }
    }
    let cells: Vec<ExistenceCell> = indices
        .par_iter()
        .map(|index| {
            let outcome = match solve_bound_state(params, index, tols) {
                Ok(state) => ExistenceOutcome::Found {
                    energy: state.energy,
                    lambda: state.lambda,
                },
                Err(Error::NoRootInGap { .. }) => ExistenceOutcome::NotFound,
                Err(e) => ExistenceOutcome::Failed {
                    message: e.to_string(),
                },
            };
            ExistenceCell {
                index: *index,
                predicted: index.admissible(),
                outcome,
            }
        })
        .collect();
    ExistenceReport { cells }
}

/// One row of a degeneracy-splitting comparison.
#[derive(Debug, Clone)]
pub struct SplittingRow {
    pub left: StateIndex,
    pub right: StateIndex,
    pub label_left: Option<SpectroLabel>,
    pub label_right: Option<SpectroLabel>,
    pub e_left: f64,
    pub e_right: f64,
    /// Signed energy difference `E_left - E_right`.
    pub delta_e: f64,
}

/// Solve the states of each pair and report their energy differences.
///
/// Pairs are expected to be degenerate in the `a -> 0` limit (same `n` and
/// `j`, or kappa-mirrored), which is where the splitting diagnostics of the
/// ring geometry live: the `m_j` splitting from the `a kappa` term and the
/// Lamb-shift-like `sgn(k)` splitting.
pub fn splitting_report(
    params_base: &ModelParams,
    pairs: &[(StateIndex, StateIndex)],
    tols: &SpectrumTols,
) -> Result<Vec<SplittingRow>> {
    pairs
        .par_iter()
        .map(|(left, right)| {
            let a = solve_bound_state(params_base, left, tols)?;
            let b = if right == left {
                a.clone()
            } else {
                solve_bound_state(params_base, right, tols)?
            };
            Ok(SplittingRow {
                left: *left,
                right: *right,
                label_left: a.label,
                label_right: b.label,
                e_left: a.energy,
                e_right: b.energy,
                delta_e: a.energy - b.energy,
            })
        })
        .collect()
}

/// Symbolic time/azimuth phase common to every component,
/// `exp(-i (E t - kappa phi))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseFactor {
    pub energy: f64,
    pub two_kappa: i32,
}

impl std::fmt::Display for PhaseFactor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "exp(-i ({:.12} t - ({}/2) phi))",
            self.energy, self.two_kappa
        )
    }
}

/// The four bispinor component fields sampled on an `(r, theta)` grid,
/// stored row-major with `theta` fastest. The common phase factor is
/// reported symbolically in `phase`.
#[derive(Debug, Clone)]
pub struct Bispinor {
    pub r_grid: Vec<f64>,
    pub theta_grid: Vec<f64>,
    pub components: [Vec<Complex64>; 4],
    pub phase: PhaseFactor,
}

/// Evaluate the separated bispinor `R S (cos(Theta/2) e^{-i Omega/2},
/// sin(Theta/2) e^{+i Omega/2}, cos(Theta/2) e^{+i Omega/2},
/// sin(Theta/2) e^{-i Omega/2})` on the given grid.
pub fn assemble_bispinor(
    params: &ModelParams,
    state: &BoundState,
    r_grid: &[f64],
    theta_grid: &[f64],
) -> Result<Bispinor> {
    let ctx = radial_context(params, &state.index, state.lambda, state.energy)?;
    // amplitudes along the stored profiles, then interpolate linearly onto
    // the requested grid
    let n_amp = 2048;
    let rad = radial_amplitude(&ctx, &state.radial, n_amp)?;
    let actx = AngularContext::new(params.a, state.energy, state.index.two_kappa)?;
    let ang = angular_amplitude(&actx, &state.angular, n_amp)?;

    let interp = |xs: &[f64], ys: &[f64], x: f64| -> f64 {
        let i = xs.partition_point(|&v| v <= x).clamp(1, xs.len() - 1);
        let (x0, x1) = (xs[i - 1], xs[i]);
        let (y0, y1) = (ys[i - 1], ys[i]);
        if x1 == x0 {
            y0
        } else {
            y0 + (y1 - y0) * ((x - x0) / (x1 - x0)).clamp(0.0, 1.0)
        }
    };
    let ang_t: Vec<f64> = ang.iter().map(|p| p.0).collect();
    let ang_s: Vec<f64> = ang.iter().map(|p| p.1).collect();

    let mut components: [Vec<Complex64>; 4] = Default::default();
    for c in &mut components {
        c.reserve(r_grid.len() * theta_grid.len());
    }
    for &r in r_grid {
        let big_r = interp(&rad.rs, &rad.amplitude, r);
        let omega = state.radial.omega_profile.eval(r);
        let e_minus = Complex64::from_polar(1.0, -0.5 * omega);
        let e_plus = Complex64::from_polar(1.0, 0.5 * omega);
        for &theta in theta_grid {
            let s = interp(&ang_t, &ang_s, theta);
            let th = state.angular.theta_profile.eval(theta);
            let rs = big_r * s;
            let cos_half = (0.5 * th).cos();
            let sin_half = (0.5 * th).sin();
            components[0].push(rs * cos_half * e_minus);
            components[1].push(rs * sin_half * e_plus);
            components[2].push(rs * cos_half * e_plus);
            components[3].push(rs * sin_half * e_minus);
        }
    }
    Ok(Bispinor {
        r_grid: r_grid.to_vec(),
        theta_grid: theta_grid.to_vec(),
        components,
        phase: PhaseFactor {
            energy: state.energy,
            two_kappa: state.index.two_kappa,
        },
    })
}
