//! Adaptive embedded Runge-Kutta 5(4) integration of scalar angle ODEs.
//!
//! The integrator advances a single lifted angle `y(t)` with the classic
//! Dormand-Prince 5(4) pair under PI step-size control and records every
//! accepted node together with its slope, so trajectories carry a cubic
//! Hermite dense output. The lift is continuous by construction: a step
//! whose angle change approaches pi is rejected and retried smaller, so no
//! branch jumps can hide between nodes.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Right-hand side of an angle ODE `dy/dt = slope(t, y)`.
///
/// Implementations must be 2pi-periodic in the angle argument.
pub trait AngleField {
    fn slope(&self, t: f64, angle: f64) -> f64;
}

impl<F: Fn(f64, f64) -> f64> AngleField for F {
    fn slope(&self, t: f64, angle: f64) -> f64 {
        self(t, angle)
    }
}

/// Relative and absolute local error tolerances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rel: 1e-10,
            abs: 1e-12,
        }
    }
}

impl Tolerances {
    pub fn new(rel: f64, abs: f64) -> Self {
        Tolerances { rel, abs }
    }

    /// Both tolerances scaled by `factor`.
    pub fn scaled(self, factor: f64) -> Self {
        Tolerances {
            rel: self.rel * factor,
            abs: self.abs * factor,
        }
    }
}

/// Dense ODE solution carrying a continuous (unwrapped) angle lift.
///
/// Nodes are stored in integration order; `t` is strictly monotone
/// (increasing for forward integration, decreasing for backward) and
/// consecutive lift gaps stay below pi.
#[derive(Debug, Clone)]
pub struct LiftedTrajectory {
    ts: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
    tol: Tolerances,
}

impl LiftedTrajectory {
    /// Independent variable at the start of integration.
    pub fn start_t(&self) -> f64 {
        self.ts[0]
    }

    /// Independent variable at the end of integration.
    pub fn end_t(&self) -> f64 {
        *self.ts.last().unwrap()
    }

    /// Lift value at the start of integration.
    pub fn start_lift(&self) -> f64 {
        self.ys[0]
    }

    /// Lift value at the end of integration.
    pub fn final_lift(&self) -> f64 {
        *self.ys.last().unwrap()
    }

    /// Total lift change over the trajectory.
    pub fn delta_lift(&self) -> f64 {
        self.final_lift() - self.start_lift()
    }

    /// Tolerances the trajectory was integrated with.
    pub fn tolerances(&self) -> Tolerances {
        self.tol
    }

    /// Accepted nodes `(t, lift)` in integration order.
    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.ts.iter().copied().zip(self.ys.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.ts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ts.is_empty()
    }

    /// Cubic Hermite dense-output evaluation; `t` is clamped to the domain.
    pub fn eval(&self, t: f64) -> f64 {
        let forward = self.ts[0] <= *self.ts.last().unwrap();
        let n = self.ts.len();
        // locate the bracketing interval
        let i = if forward {
            match self.ts.partition_point(|&x| x <= t) {
                0 => 0,
                p if p >= n => n - 2,
                p => p - 1,
            }
        } else {
            match self.ts.partition_point(|&x| x >= t) {
                0 => 0,
                p if p >= n => n - 2,
                p => p - 1,
            }
        };
        let (t0, t1) = (self.ts[i], self.ts[i + 1]);
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let (f0, f1) = (self.slopes[i], self.slopes[i + 1]);
        let h = t1 - t0;
        if h == 0.0 {
            return y0;
        }
        let s = ((t - t0) / h).clamp(0.0, 1.0);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * y0
            + (s3 - 2.0 * s2 + s) * h * f0
            + (-2.0 * s3 + 3.0 * s2) * y1
            + (s3 - s2) * h * f1
    }

    /// `n` dense samples `(t, lift)` uniformly spaced over the domain.
    pub fn sample_uniform(&self, n: usize) -> Vec<(f64, f64)> {
        let (a, b) = (self.start_t(), self.end_t());
        (0..n)
            .map(|i| {
                let t = a + (b - a) * i as f64 / (n - 1).max(1) as f64;
                (t, self.eval(t))
            })
            .collect()
    }

    /// Concatenate with a second piece starting where this one ends.
    ///
    /// Used to assemble matched (two-sided) shooting profiles; the seam gap
    /// must already be below the node-continuity bound.
    pub fn join(mut self, other: LiftedTrajectory) -> LiftedTrajectory {
        debug_assert!((self.end_t() - other.start_t()).abs() < 1e-9);
        self.ts.extend_from_slice(&other.ts[1..]);
        self.ys.extend_from_slice(&other.ys[1..]);
        self.slopes.extend_from_slice(&other.slopes[1..]);
        self
    }

    /// Reverse the integration order (a backward piece becomes forward).
    pub fn reversed(mut self) -> LiftedTrajectory {
        self.ts.reverse();
        self.ys.reverse();
        self.slopes.reverse();
        self
    }

    /// Rigidly shift every lift value (2pi-equivariance bookkeeping).
    pub fn shifted(mut self, offset: f64) -> LiftedTrajectory {
        for y in &mut self.ys {
            *y += offset;
        }
        self
    }
}

// Dormand-Prince 5(4) coefficients.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// 5th-order weights coincide with the last A row (FSAL); E = b5 - b4.
const E_ERR: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 5.0;
// PI controller exponents for a 5(4) pair.
const PI_ALPHA: f64 = 0.17;
const PI_BETA: f64 = 0.04;
const MAX_STEPS: usize = 2_000_000;
// Reject any step that would move the angle by more than this, so that the
// stored lift can never alias a branch jump.
const MAX_ANGLE_STEP: f64 = 3.0;

/// Integrate `dy/dt = field(t, y)` from `t0` to `t1` (either direction) with
/// the lift started at `y0`.
///
/// Local error per step is kept within the tolerances by the embedded
/// estimate; the returned trajectory carries dense output over `[t0, t1]`.
pub fn integrate_lifted(
    field: &impl AngleField,
    t0: f64,
    t1: f64,
    y0: f64,
    tol: Tolerances,
) -> Result<LiftedTrajectory> {
    if !(t0.is_finite() && t1.is_finite() && y0.is_finite()) || t0 == t1 {
        return Err(Error::InvalidParam(format!(
            "bad integration range [{t0}, {t1}] or start {y0}"
        )));
    }
    if !(tol.rel > 0.0 && tol.abs > 0.0) {
        return Err(Error::InvalidParam("tolerances must be positive".into()));
    }

    let dir = (t1 - t0).signum();
    let span = (t1 - t0).abs();
    let h_floor = 1e-14 * span;

    let mut t = t0;
    let mut y = y0;
    let mut k1 = field.slope(t, y);
    if !k1.is_finite() {
        return Err(Error::NonFiniteField { t });
    }

    let mut h = dir * initial_step(field, t, y, k1, dir, span, tol);
    let mut err_prev: f64 = 1.0;

    let mut ts = Vec::with_capacity(256);
    let mut ys = Vec::with_capacity(256);
    let mut slopes = Vec::with_capacity(256);
    ts.push(t);
    ys.push(y);
    slopes.push(k1);

    let mut rejected = false;
    for _ in 0..MAX_STEPS {
        if (t1 - t) * dir <= 0.0 {
            break;
        }
        // land exactly on t1; the capped closing step is exempt from the
        // floor check
        let closing = ((t + h) - t1) * dir >= 0.0;
        if closing {
            h = t1 - t;
        } else if h.abs() < h_floor {
            return Err(Error::StepSizeUnderflow { t, floor: h_floor });
        }

        let mut k = [0.0f64; 7];
        k[0] = k1;
        let mut nonfinite = false;
        for i in 1..7 {
            let mut acc = 0.0;
            for (j, kj) in k.iter().enumerate().take(i) {
                acc += A[i - 1][j] * kj;
            }
            let ki = field.slope(t + C[i] * h, y + h * acc);
            if !ki.is_finite() {
                nonfinite = true;
                break;
            }
            k[i] = ki;
        }

        if nonfinite {
            h *= 0.2;
            rejected = true;
            continue;
        }

        // 5th-order solution (same weights as the last stage row, FSAL)
        let mut dy = 0.0;
        for (j, kj) in k.iter().enumerate().take(6) {
            dy += A[5][j] * kj;
        }
        let y_new = y + h * dy;
        let mut err_raw = 0.0;
        for (j, kj) in k.iter().enumerate() {
            err_raw += E_ERR[j] * kj;
        }
        let scale = tol.abs + tol.rel * y.abs().max(y_new.abs());
        let err = (h * err_raw / scale).abs().max(1e-300);

        if !y_new.is_finite() {
            h *= 0.2;
            rejected = true;
            continue;
        }

        if err <= 1.0 && (y_new - y).abs() < MAX_ANGLE_STEP {
            t += h;
            y = y_new;
            k1 = k[6]; // FSAL
            ts.push(t);
            ys.push(y);
            slopes.push(k1);

            let mut fac = SAFETY * err.powf(-PI_ALPHA) * err_prev.powf(PI_BETA);
            fac = fac.clamp(FAC_MIN, FAC_MAX);
            if rejected {
                fac = fac.min(1.0);
            }
            rejected = false;
            err_prev = err.max(1e-4);
            h *= fac;
        } else {
            let fac = if (y_new - y).abs() >= MAX_ANGLE_STEP {
                0.5
            } else {
                (SAFETY * err.powf(-0.2)).clamp(FAC_MIN, 1.0)
            };
            h *= fac;
            rejected = true;
        }
    }

    if (t1 - t) * dir > 0.0 {
        return Err(Error::StepSizeUnderflow { t, floor: h_floor });
    }

    Ok(LiftedTrajectory {
        ts,
        ys,
        slopes,
        tol,
    })
}

/// Standard two-probe starting step heuristic.
fn initial_step(
    field: &impl AngleField,
    t: f64,
    y: f64,
    f0: f64,
    dir: f64,
    span: f64,
    tol: Tolerances,
) -> f64 {
    let sc = tol.abs + tol.rel * y.abs();
    let d0 = y.abs() / sc;
    let d1 = f0.abs() / sc;
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6 * span
    } else {
        0.01 * (d0 / d1)
    };
    let h0 = h0.min(span);
    let f1 = field.slope(t + dir * h0, y + dir * h0 * f0);
    if !f1.is_finite() {
        return (h0 * 1e-3).max(1e-12 * span);
    }
    let d2 = ((f1 - f0).abs() / sc) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6 * span)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(span)
}

/// Which lift-target family a winding is extracted against.
///
/// A Theta connector with winding `N` changes its lift by `-(2N+1) pi`; an
/// Omega connector changes its lift by `pi - 2 acos(E) - 2 pi N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WindingConvention {
    Theta,
    Omega { energy: f64 },
}

/// Gate half-width for accepting a lift change as a connector.
pub const WINDING_GATE: f64 = 0.3;

/// Map a total lift change onto its integer winding number.
///
/// Fails with `NotNearTarget` when no target of the convention lies within
/// 0.3 rad, which is the signature of a failed (non-connector) shot.
pub fn lift_to_winding(delta_lift: f64, convention: WindingConvention) -> Result<i32> {
    let (n, target) = match convention {
        WindingConvention::Theta => {
            let n = (-(delta_lift + PI) / (2.0 * PI)).round();
            (n, -(2.0 * n + 1.0) * PI)
        }
        WindingConvention::Omega { energy } => {
            if !(0.0..1.0).contains(&energy) {
                return Err(Error::InvalidParam(format!(
                    "winding convention requires E in (0,1), got {energy}"
                )));
            }
            let base = PI - 2.0 * energy.acos();
            let n = ((base - delta_lift) / (2.0 * PI)).round();
            (n, base - 2.0 * PI * n)
        }
    };
    if (delta_lift - target).abs() > WINDING_GATE {
        return Err(Error::NotNearTarget { delta_lift });
    }
    Ok(n as i32)
}

/// Lift-change target for a Theta connector of winding `n_theta`.
pub fn theta_lift_target(n_theta: i32) -> f64 {
    -(2.0 * n_theta as f64 + 1.0) * PI
}

/// Lift-change target for an Omega connector of winding `n_omega` at energy `E`.
pub fn omega_lift_target(n_omega: i32, energy: f64) -> f64 {
    PI - 2.0 * energy.acos() - 2.0 * PI * n_omega as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_field_keeps_lift() {
        let traj = integrate_lifted(&|_t: f64, _y: f64| 0.0, 0.0, 1.0, 1.5, Tolerances::default())
            .unwrap();
        assert_eq!(traj.final_lift(), 1.5);
        assert_eq!(traj.delta_lift(), 0.0);
    }

    #[test]
    fn constant_field_is_linear() {
        let c = 0.731;
        let t_end = 4.0;
        let tol = Tolerances::new(1e-10, 1e-12);
        let traj = integrate_lifted(&|_t: f64, _y: f64| c, 0.0, t_end, 0.0, tol).unwrap();
        assert!((traj.final_lift() - c * t_end).abs() < 1e-10 * c * t_end);
        // dense output reproduces the line
        for (t, y) in traj.sample_uniform(17) {
            assert!((y - c * t).abs() < 1e-9);
        }
    }

    #[test]
    fn frozen_a0_ground_state_connector() {
        // a = 0 angular field, kappa = 1/2, lambda = -1: the connector is
        // Theta = -theta, so the lift at pi - eps is -pi + eps.
        let eps = 1e-6;
        let field = |t: f64, y: f64| -y.sin() / t.sin() - 2.0;
        let traj =
            integrate_lifted(&field, eps, PI - eps, -eps, Tolerances::new(1e-10, 1e-12)).unwrap();
        assert!(
            (traj.final_lift() - (-PI + eps)).abs() < 1e-8,
            "final lift {}",
            traj.final_lift()
        );
        // within the spec tolerance of -pi itself
        assert!((traj.final_lift() + PI).abs() < 1.5e-6);
    }

    #[test]
    fn winding_targets_theta() {
        assert_eq!(lift_to_winding(-PI, WindingConvention::Theta).unwrap(), 0);
        assert_eq!(lift_to_winding(PI, WindingConvention::Theta).unwrap(), -1);
        assert_eq!(
            lift_to_winding(-3.0 * PI + 0.2, WindingConvention::Theta).unwrap(),
            1
        );
        assert!(matches!(
            lift_to_winding(-PI + 0.5, WindingConvention::Theta),
            Err(Error::NotNearTarget { .. })
        ));
    }

    #[test]
    fn winding_targets_omega() {
        let e = 0.9;
        let conv = WindingConvention::Omega { energy: e };
        assert_eq!(lift_to_winding(PI - 2.0 * e.acos(), conv).unwrap(), 0);
        assert_eq!(
            lift_to_winding(PI - 2.0 * e.acos() - 2.0 * PI, conv).unwrap(),
            1
        );
        assert!(matches!(
            lift_to_winding(PI - 2.0 * e.acos() - PI, conv),
            Err(Error::NotNearTarget { .. })
        ));
    }

    #[test]
    fn nonfinite_at_start_is_reported() {
        let field = |t: f64, y: f64| -y.sin() / t.sin() - 2.0;
        let err = integrate_lifted(&field, 0.0, PI - 1e-6, 0.0, Tolerances::default()).unwrap_err();
        assert!(matches!(err, Error::NonFiniteField { .. }));
    }

    #[test]
    fn blowup_underflows_step_size() {
        // finite-time blow-up forces the controller below the step floor
        let field = |_t: f64, y: f64| 1e6 * (1.0 + y * y);
        let err = integrate_lifted(&field, 0.0, 1.0, 0.0, Tolerances::default()).unwrap_err();
        assert!(matches!(err, Error::StepSizeUnderflow { .. }));
    }

    #[test]
    fn backward_integration_reverses() {
        let field = |t: f64, y: f64| 0.3 * (y - t).cos() + 0.1 * t;
        let tol = Tolerances::new(1e-11, 1e-13);
        let fwd = integrate_lifted(&field, 0.0, 2.0, 0.4, tol).unwrap();
        let back = integrate_lifted(&field, 2.0, 0.0, fwd.final_lift(), tol).unwrap();
        assert!((back.final_lift() - 0.4).abs() < 1e-8);
    }

    #[test]
    fn richardson_tolerance_consistency() {
        let field = |t: f64, y: f64| (2.0 * y).sin() + (3.0 * t).cos();
        let loose = Tolerances::new(1e-8, 1e-10);
        let tight = loose.scaled(0.5);
        let a = integrate_lifted(&field, 0.0, 5.0, 0.2, loose).unwrap();
        let b = integrate_lifted(&field, 0.0, 5.0, 0.2, tight).unwrap();
        assert!((a.final_lift() - b.final_lift()).abs() < 10.0 * loose.rel.max(loose.abs) * 10.0);
    }

    #[test]
    fn node_gaps_stay_below_pi() {
        let field = |t: f64, y: f64| 40.0 * (0.5 - (y - 20.0 * t).sin());
        let traj = integrate_lifted(&field, 0.0, 3.0, 0.0, Tolerances::new(1e-8, 1e-10)).unwrap();
        let nodes: Vec<_> = traj.nodes().collect();
        for w in nodes.windows(2) {
            assert!((w[1].1 - w[0].1).abs() < PI);
            assert!(w[1].0 > w[0].0);
        }
    }
}
