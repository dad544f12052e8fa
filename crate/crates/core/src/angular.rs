//! The angular (Theta) eigenvalue problem.
//!
//! In Prüfer form the angular system decouples into a single angle ODE on
//! `(0, pi)`,
//!
//! ```text
//! dTheta/dtheta = -2 a cos(theta) cos(Theta)
//!                 + 2 (a E sin(theta) - kappa / sin(theta)) sin(Theta)
//!                 + 2 lambda
//! ```
//!
//! whose connectors between the boundary saddles carry the winding number
//! `N_Theta`. For a given winding, `lambda` is pinned by a bisection on the
//! terminal-lift miss, which is strictly monotone in `lambda` because the
//! field grows pointwise with it. Shooting is done from both ends toward
//! `theta = pi/2` (each half rides a stable manifold), so the matching miss
//! stays O(1)-conditioned even for large `|kappa|` where a single-ended shot
//! saturates.
//!
//! At `a = 0` the spectrum and the connectors are known in closed form from
//! Jacobi polynomials; those serve as the oracle throughout the test suite.

use crate::error::{Error, Result};
use crate::hydrogen::jacobi_p;
use crate::ode::{
    integrate_lifted, lift_to_winding, theta_lift_target, LiftedTrajectory, Tolerances,
    WindingConvention,
};
use crate::solve::{adaptive_simpson, bisect_polish, scan_first_bracket, Bracket};
use std::f64::consts::{FRAC_PI_2, PI};

/// Parameters the Theta field depends on: ring radius, trial energy, and the
/// half-integer angular momentum component (stored doubled).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularContext {
    pub a: f64,
    pub energy: f64,
    pub two_kappa: i32,
}

impl AngularContext {
    pub fn new(a: f64, energy: f64, two_kappa: i32) -> Result<Self> {
        if !(a >= 0.0 && a.is_finite()) {
            return Err(Error::InvalidParam(format!("ring radius a = {a} must be >= 0")));
        }
        if two_kappa.rem_euclid(2) == 0 {
            return Err(Error::InvalidParam(format!(
                "2 kappa = {two_kappa} must be an odd integer"
            )));
        }
        if !energy.is_finite() {
            return Err(Error::InvalidParam("energy must be finite".into()));
        }
        Ok(AngularContext { a, energy, two_kappa })
    }

    pub fn kappa(&self) -> f64 {
        self.two_kappa as f64 / 2.0
    }
}

/// Shooting controls for the angular solve.
#[derive(Debug, Clone, Copy)]
pub struct AngularTols {
    /// ODE tolerances for each half-shot.
    pub ode: Tolerances,
    /// Frobenius startup offset from the singular endpoints.
    pub eps: f64,
    /// Root tolerance on lambda.
    pub lambda_tol: f64,
}

impl Default for AngularTols {
    fn default() -> Self {
        AngularTols {
            ode: Tolerances::new(1e-10, 1e-12),
            eps: 1e-6,
            lambda_tol: 1e-9,
        }
    }
}

/// Initial lambda bracketing strategy: scan `[center - half_width,
/// center + half_width]` in `step` increments, widening geometrically on
/// failure.
#[derive(Debug, Clone, Copy)]
pub struct BracketConfig {
    pub center: Option<f64>,
    pub half_width: f64,
    pub step: f64,
    pub max_widenings: u32,
}

impl Default for BracketConfig {
    fn default() -> Self {
        BracketConfig {
            center: None,
            half_width: 2.0,
            step: 0.25,
            max_widenings: 6,
        }
    }
}

impl BracketConfig {
    /// Seeded bracket around a known good guess.
    pub fn seeded(center: f64, half_width: f64) -> Self {
        BracketConfig {
            center: Some(center),
            half_width,
            ..Default::default()
        }
    }
}

/// A converged angular eigensolution.
#[derive(Debug, Clone)]
pub struct AngularSolution {
    /// The angular eigenvalue.
    pub lambda: f64,
    /// Winding number of the connector.
    pub winding: i32,
    /// Matched connector profile over `(eps, pi - eps)`.
    pub theta_profile: LiftedTrajectory,
    /// Terminal (matching) lift miss at the converged lambda.
    pub residual: f64,
}

impl AngularSolution {
    /// Total lift change of the stored connector.
    pub fn delta_lift(&self) -> f64 {
        self.theta_profile.delta_lift()
    }
}

/// Right-hand side of the Theta equation; errors on the csc singularity.
pub fn theta_rhs(theta: f64, theta_lift: f64, ctx: &AngularContext, lambda: f64) -> Result<f64> {
    if theta <= 0.0 || theta >= PI {
        return Err(Error::DomainBoundary { value: theta });
    }
    Ok(theta_slope(theta, theta_lift, ctx, lambda))
}

#[inline]
fn theta_slope(theta: f64, theta_lift: f64, ctx: &AngularContext, lambda: f64) -> f64 {
    let kappa = ctx.kappa();
    -2.0 * ctx.a * theta.cos() * theta_lift.cos()
        + 2.0 * (ctx.a * ctx.energy * theta.sin() - kappa / theta.sin()) * theta_lift.sin()
        + 2.0 * lambda
}

/// First-order startup slope at a boundary saddle with `cos(Theta_s) =
/// anchor_cos`: balancing the `1/theta` term against a linear ansatz gives
/// `c = (2 lambda - 2 a cos(Theta_s)) / (1 + 2 |kappa|)`.
pub fn frobenius_slope(ctx: &AngularContext, lambda: f64, anchor_cos: f64) -> f64 {
    (2.0 * lambda - 2.0 * ctx.a * anchor_cos) / (1.0 + ctx.two_kappa.abs() as f64)
}

/// Start anchor for a forward shot: `0` for `kappa > 0`, `pi` for `kappa < 0`.
pub fn start_anchor(ctx: &AngularContext) -> f64 {
    if ctx.two_kappa > 0 {
        0.0
    } else {
        PI
    }
}

/// Start anchor matching the closed-form connectors: for `kappa < 0` the
/// profiles begin at `sgn(N) pi` rather than a fixed `+pi` (the two choices
/// differ by a rigid 2 pi shift and share every lift change).
fn matched_anchor(ctx: &AngularContext, n_theta: i32) -> f64 {
    if ctx.two_kappa > 0 {
        0.0
    } else if n_theta >= 0 {
        PI
    } else {
        -PI
    }
}

/// Single-ended shot of the Theta equation from `eps` to `pi - eps`.
///
/// Returns the total lift change adjusted to the ideal boundary values by
/// the Frobenius correction on both ends, together with the trajectory.
/// Near an eigenvalue the result saturates toward the neighbouring sink
/// values, so this is a scanning/diagnostic tool; converged profiles come
/// from [`shoot_theta_matched`].
pub fn shoot_theta(
    ctx: &AngularContext,
    lambda: f64,
    eps: f64,
    tols: &AngularTols,
) -> Result<(f64, LiftedTrajectory)> {
    if !(eps > 0.0 && eps < 1e-3) {
        return Err(Error::InvalidParam(format!("eps = {eps} outside (0, 1e-3)")));
    }
    let anchor = start_anchor(ctx);
    let c = frobenius_slope(ctx, lambda, anchor.cos());
    let field = |t: f64, y: f64| theta_slope(t, y, ctx, lambda);
    let traj = integrate_lifted(&field, eps, PI - eps, anchor + c * eps, tols.ode)?;
    // the end saddle sits an odd multiple of pi from the start, so the
    // startup slope applies at the right end as well
    let delta = (traj.final_lift() + c * eps) - anchor;
    Ok((delta, traj))
}

/// Result of a two-sided (matched) connector shot.
#[derive(Debug, Clone)]
pub struct MatchedTheta {
    /// Forward minus backward lift at the matching angle `pi/2`; zero
    /// exactly on a connector with the requested winding.
    pub miss: f64,
    /// Lift change between the ideal boundary values, `target + miss`.
    pub delta_lift: f64,
    /// Concatenated profile (forward piece then reversed backward piece).
    pub profile: LiftedTrajectory,
}

/// Shoot both halves of a prospective `N_Theta` connector and report the
/// matching miss at `theta = pi/2`.
pub fn shoot_theta_matched(
    ctx: &AngularContext,
    lambda: f64,
    n_theta: i32,
    tols: &AngularTols,
) -> Result<MatchedTheta> {
    let eps = tols.eps;
    let anchor = matched_anchor(ctx, n_theta);
    let target = theta_lift_target(n_theta);
    let c = frobenius_slope(ctx, lambda, anchor.cos());
    let field = |t: f64, y: f64| theta_slope(t, y, ctx, lambda);

    let fwd = integrate_lifted(&field, eps, FRAC_PI_2, anchor + c * eps, tols.ode)?;
    let end_anchor = anchor + target;
    let bwd = integrate_lifted(&field, PI - eps, FRAC_PI_2, end_anchor - c * eps, tols.ode)?;

    let miss = fwd.final_lift() - bwd.final_lift();
    let profile = fwd.join(bwd.reversed());
    Ok(MatchedTheta {
        miss,
        delta_lift: target + miss,
        profile,
    })
}

/// Find the angular eigenvalue whose connector winds `n_theta` times.
///
/// The miss is strictly increasing in lambda (the field derivative is +2
/// pointwise), so a scan plus bisection is exact; a short secant polish
/// drives the terminal miss itself below the root tolerance.
pub fn solve_lambda(
    ctx: &AngularContext,
    n_theta: i32,
    search: &BracketConfig,
    tols: &AngularTols,
) -> Result<AngularSolution> {
    let n_big = if n_theta >= 0 { n_theta + 1 } else { n_theta };
    let center = search
        .center
        .unwrap_or_else(|| exact_k(n_big, ctx.two_kappa).expect("n_big != 0") as f64);
    let miss_fn = |lambda: f64| -> Result<f64> {
        Ok(shoot_theta_matched(ctx, lambda, n_theta, tols)?.miss)
    };

    let mut half_width = search.half_width;
    let mut bracket: Option<Bracket> = None;
    for _ in 0..=search.max_widenings {
        let lo = center - half_width;
        let hi = center + half_width;
        // the miss is monotone in lambda, so scanning stops at the first
        // (and only) sign change
        if let Some(found) = scan_first_bracket(|x| miss_fn(x), lo, hi, search.step)? {
            bracket = Some(found);
            break;
        }
        half_width *= 2.0;
    }
    let bracket = bracket.ok_or(Error::BracketNotFound {
        n_theta,
        lo: center - half_width,
        hi: center + half_width,
    })?;

    let xtol = tols.lambda_tol * bracket.hi.abs().max(1.0);
    let (lambda, miss) = bisect_polish(miss_fn, bracket, xtol, 4)?;

    let shot = shoot_theta_matched(ctx, lambda, n_theta, tols)?;
    let winding = lift_to_winding(shot.delta_lift, WindingConvention::Theta)?;
    debug_assert_eq!(winding, n_theta);
    Ok(AngularSolution {
        lambda,
        winding,
        theta_profile: shot.profile,
        residual: miss.abs(),
    })
}

/// Exact `a = 0` angular eigenvalue: `k = -sgn(N) (|N| + |kappa| - 1/2)`.
pub fn exact_k(n_big: i32, two_kappa: i32) -> Result<i32> {
    if n_big == 0 {
        return Err(Error::ZeroN);
    }
    // |kappa| - 1/2 = (|2 kappa| - 1) / 2, an exact integer
    let shift = (two_kappa.abs() - 1) / 2;
    Ok(-n_big.signum() * (n_big.abs() + shift))
}

/// Closed-form `a = 0` connector lift at a single angle.
///
/// Built from the Jacobi-polynomial eigenvectors; the branch is the
/// continuous one anchored at `Theta(0) = 0` for `kappa > 0` and
/// `sgn(N) pi` for `kappa < 0`.
pub fn exact_theta_profile(n_big: i32, two_kappa: i32, theta: f64) -> Result<f64> {
    Ok(exact_theta_samples(n_big, two_kappa, &[theta])?[0])
}

/// Closed-form connector lift on an ascending grid in `(0, pi)`.
pub fn exact_theta_samples(n_big: i32, two_kappa: i32, thetas: &[f64]) -> Result<Vec<f64>> {
    if n_big == 0 {
        return Err(Error::ZeroN);
    }
    if thetas.is_empty() {
        return Ok(Vec::new());
    }
    if thetas.iter().any(|&t| t <= 0.0 || t >= PI) {
        return Err(Error::DomainBoundary {
            value: *thetas
                .iter()
                .find(|&&t| t <= 0.0 || t >= PI)
                .unwrap(),
        });
    }
    if thetas.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParam("angles must be ascending".into()));
    }

    let deg = n_big.unsigned_abs() - 1;
    let alpha_minus = (two_kappa.abs() - 1) as f64 / 2.0; // |kappa| - 1/2
    let alpha_plus = (two_kappa.abs() + 1) as f64 / 2.0; // |kappa| + 1/2
    let sgn = n_big.signum() as f64;
    // phase of the eigenvector (S1, S2) for |kappa|; the positive common
    // prefactor sin^{kappa + 1/2} does not move the phase
    let raw = |t: f64| -> f64 {
        let half = 0.5 * t;
        let x = t.cos();
        let s1 = -(half.tan().recip()).sqrt() * jacobi_p(deg, alpha_minus, alpha_plus, x);
        let s2 = sgn * half.tan().sqrt() * jacobi_p(deg, alpha_plus, alpha_minus, x);
        2.0 * s2.atan2(s1)
    };

    // anchor the branch at Theta(0+) = 0 for the |kappa| profile
    let t_anchor = thetas[0].min(1e-9);
    let raw0 = raw(t_anchor);
    let mut lift = raw0 + 2.0 * PI * ((-raw0) / (2.0 * PI)).round();
    let shift = if two_kappa < 0 { sgn * PI } else { 0.0 };

    let mut out = Vec::with_capacity(thetas.len());
    let mut t_prev = t_anchor;
    let mut raw_prev = raw0;
    for &t in thetas {
        let n_base = (((t - t_prev) / 0.02).ceil() as usize).clamp(1, 1024);
        for i in 1..=n_base {
            let tb = t_prev + (t - t_prev) * i as f64 / n_base as f64;
            let raw_b = raw(tb);
            lift = advance_phase(&raw, t_prev + (t - t_prev) * (i - 1) as f64 / n_base as f64,
                raw_prev, tb, raw_b, lift, 0);
            raw_prev = raw_b;
        }
        t_prev = t;
        out.push(lift + shift);
    }
    Ok(out)
}

fn advance_phase(
    raw: &impl Fn(f64) -> f64,
    ta: f64,
    raw_a: f64,
    tb: f64,
    raw_b: f64,
    lift_a: f64,
    depth: u32,
) -> f64 {
    let mut d = raw_b - raw_a;
    d -= 2.0 * PI * (d / (2.0 * PI)).round();
    if d.abs() <= 0.5 || depth >= 55 || (tb - ta) < 1e-15 {
        return lift_a + d;
    }
    let tm = 0.5 * (ta + tb);
    let raw_m = raw(tm);
    let lift_m = advance_phase(raw, ta, raw_a, tm, raw_m, lift_a, depth + 1);
    advance_phase(raw, tm, raw_m, tb, raw_b, lift_m, depth + 1)
}

/// Angular amplitude `S(theta)` recovered by quadrature of
/// `d ln S / dtheta = -a cos(theta) sin(Theta) - (a E sin(theta) -
/// kappa / sin(theta)) cos(Theta)` along a converged connector, normalized
/// to `S(pi/2) = 1`.
pub fn angular_amplitude(
    ctx: &AngularContext,
    solution: &AngularSolution,
    points: usize,
) -> Result<Vec<(f64, f64)>> {
    if points < 2 {
        return Err(Error::InvalidParam("need at least two sample points".into()));
    }
    let profile = &solution.theta_profile;
    let kappa = ctx.kappa();
    let integrand = |t: f64| -> f64 {
        let th = profile.eval(t);
        -ctx.a * t.cos() * th.sin()
            - (ctx.a * ctx.energy * t.sin() - kappa / t.sin()) * th.cos()
    };
    let (lo, hi) = (profile.start_t(), profile.end_t());
    let mut out = Vec::with_capacity(points);
    let mut prev_t = FRAC_PI_2;
    let mut ln_s = 0.0;
    // sample outward from the normalization point in two passes
    let grid: Vec<f64> = (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect();
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &t in grid.iter().filter(|&&t| t >= FRAC_PI_2) {
        ln_s += adaptive_simpson(&integrand, prev_t, t, 1e-11);
        upper.push((t, ln_s.exp()));
        prev_t = t;
    }
    prev_t = FRAC_PI_2;
    ln_s = 0.0;
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &t in grid.iter().rev().filter(|&&t| t < FRAC_PI_2) {
        ln_s += adaptive_simpson(&integrand, prev_t, t, 1e-11);
        lower.push((t, ln_s.exp()));
        prev_t = t;
    }
    lower.reverse();
    out.extend(lower);
    out.extend(upper);
    Ok(out)
}
