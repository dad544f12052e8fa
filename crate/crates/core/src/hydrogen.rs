//! Exact special-relativistic hydrogen oracle (the `a -> 0` limit).
//!
//! The half-line radial problem with Coulomb coupling `gamma` and spin-orbit
//! number `k` is exactly solvable: energies follow the Sommerfeld formula and
//! the eigenfunctions are terminating confluent hypergeometric series. The
//! phase `Omega(r) = 2 atan(v/u)` of those eigenfunctions, lifted continuously
//! across the poles of its rational inner function, is the oracle the radial
//! shooting module is validated against.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Largest admissible |gamma| for the exact solution (Thaller window).
pub const GAMMA_WINDOW: f64 = 0.866_025_403_784_438_6; // sqrt(3)/2

/// A hydrogenic bound state `(M, k)` with coupling `gamma`.
///
/// `m` is the radial quantum number (`M = n - |k|`) and `k` the nonzero
/// integer spin-orbit quantum number. The principal quantum number is
/// `n = M + |k|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HydrogenState {
    m: u32,
    k: i32,
    gamma: f64,
}

impl HydrogenState {
    /// Validate and build a state; `k > 0, M = 0` is excluded and `gamma`
    /// must lie in `(-sqrt(3)/2, 0)`.
    pub fn new(m: u32, k: i32, gamma: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParam("spin-orbit number k must be nonzero".into()));
        }
        if k > 0 && m == 0 {
            return Err(Error::ExcludedState { m, k });
        }
        if !(gamma > -GAMMA_WINDOW && gamma < 0.0) {
            return Err(Error::InvalidParam(format!(
                "gamma = {gamma} outside (-sqrt(3)/2, 0)"
            )));
        }
        Ok(HydrogenState { m, k, gamma })
    }

    pub fn radial_nodes(&self) -> u32 {
        self.m
    }

    pub fn spin_orbit(&self) -> i32 {
        self.k
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Principal quantum number `n = M + |k|`.
    pub fn principal(&self) -> u32 {
        self.m + self.k.unsigned_abs()
    }

    /// `rho = sqrt(k^2 - gamma^2)`.
    pub fn rho(&self) -> f64 {
        let k2 = (self.k as f64) * (self.k as f64);
        (k2 - self.gamma * self.gamma).sqrt()
    }
}

/// Sommerfeld energy `E = 1 / sqrt(1 + (gamma / (M + rho))^2)` in units of m.
pub fn sommerfeld_energy(state: &HydrogenState) -> f64 {
    let q = state.gamma / (state.m as f64 + state.rho());
    1.0 / (1.0 + q * q).sqrt()
}

/// Derived quantities of the closed-form eigenfunction.
///
/// The coefficient pair `(c1, c2)` is stored rather than the ratio
/// `mu = c1/c2` so that the `M = 0` degeneracy (`c1 = 0`) stays exact.
#[derive(Debug, Clone, Copy)]
pub struct GordonAux {
    pub rho: f64,
    pub eta: f64,
    pub mu: f64,
    pub c1: f64,
    pub c2: f64,
    pub energy: f64,
}

impl GordonAux {
    pub fn for_state(state: &HydrogenState) -> GordonAux {
        let energy = sommerfeld_energy(state);
        let eta = (1.0 - energy * energy).sqrt();
        let rho = state.rho();
        let mu = if state.m == 0 {
            0.0
        } else {
            state.m as f64 / (state.k as f64 + state.gamma / eta)
        };
        GordonAux {
            rho,
            eta,
            mu,
            c1: mu,
            c2: 1.0,
            energy,
        }
    }
}

/// Terminating confluent hypergeometric series `F(alpha, beta, x)` with
/// nonpositive integer `alpha`: an exact `|alpha| + 1`-term sum.
pub fn confluent_f(alpha: i32, beta: f64, x: f64) -> Result<f64> {
    if alpha > 0 {
        return Err(Error::NonTerminating { alpha });
    }
    let n = (-alpha) as usize;
    let mut sum = 1.0;
    let mut term = 1.0;
    for j in 0..n {
        term *= (alpha as f64 + j as f64) * x / ((j as f64 + 1.0) * (beta + j as f64));
        sum += term;
    }
    Ok(sum)
}

/// Jacobi polynomial `P_n^{(alpha, beta)}(x)` by the three-term recurrence.
pub fn jacobi_p(n: u32, alpha: f64, beta: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut p_prev = 1.0;
    let mut p = 0.5 * (alpha - beta) + 0.5 * (alpha + beta + 2.0) * x;
    for m in 2..=n {
        let m = m as f64;
        let c = 2.0 * m + alpha + beta;
        let a1 = 2.0 * m * (m + alpha + beta) * (c - 2.0);
        let a2 = (c - 1.0) * (alpha * alpha - beta * beta);
        let a3 = (c - 2.0) * (c - 1.0) * c;
        let a4 = 2.0 * (m + alpha - 1.0) * (m + beta - 1.0) * c;
        let p_next = ((a2 + a3 * x) * p - a4 * p_prev) / a1;
        p_prev = p;
        p = p_next;
    }
    p
}

/// Closed-form radial eigenfunction pieces at one radius.
#[derive(Debug, Clone, Copy)]
pub struct GordonRadial {
    pub phi1: f64,
    pub phi2: f64,
    pub u: f64,
    pub v: f64,
}

/// Evaluate `(phi1, phi2, u, v)` of the bound eigenfunction at `r > 0`.
pub fn gordon_radial(state: &HydrogenState, r: f64) -> Result<GordonRadial> {
    if r <= 0.0 {
        return Err(Error::DomainBoundary { value: r });
    }
    let aux = GordonAux::for_state(state);
    let x = 2.0 * aux.eta * r;
    let beta = 2.0 * aux.rho + 1.0;
    let pre = (-aux.eta * r).exp() * r.powf(aux.rho);
    // c1 = 0 kills phi1 for M = 0; never evaluate the non-terminating F(1,..)
    let phi1 = if state.m == 0 {
        0.0
    } else {
        aux.c1 * pre * confluent_f(-(state.m as i32) + 1, beta, x)?
    };
    let phi2 = aux.c2 * pre * confluent_f(-(state.m as i32), beta, x)?;
    let u = (1.0 + aux.energy).sqrt() * (phi1 + phi2);
    let v = (1.0 - aux.energy).sqrt() * (phi1 - phi2);
    Ok(GordonRadial { phi1, phi2, u, v })
}

/// Branch-resolved phase value at `r -> 0+`.
pub fn omega_at_origin(k: i32, gamma: f64) -> f64 {
    let s = (-gamma / k as f64).asin();
    if k < 0 {
        s
    } else {
        -PI - s
    }
}

/// Phase of the eigenfunction with the overall positive prefactor removed;
/// returns `(we_u, we_v)` proportional to `(u, v)`.
fn phase_components(state: &HydrogenState, aux: &GordonAux, r: f64) -> Result<(f64, f64)> {
    let x = 2.0 * aux.eta * r;
    let beta = 2.0 * aux.rho + 1.0;
    let f1 = if state.m == 0 {
        0.0
    } else {
        confluent_f(-(state.m as i32) + 1, beta, x)?
    };
    let f2 = confluent_f(-(state.m as i32), beta, x)?;
    let num = aux.mu * f1 + f2; // ~ u / prefactor
    let den = aux.mu * f1 - f2; // ~ v / prefactor
    Ok((
        (1.0 + aux.energy).sqrt() * num,
        (1.0 - aux.energy).sqrt() * den,
    ))
}

/// Continuous lift of `Omega(r) = 2 atan(v/u)` at a single radius.
///
/// The branch is anchored at the `r -> 0` value of [`omega_at_origin`] and
/// `-2 pi` accumulates at each pole crossing of the rational inner function,
/// so the `r -> infinity` limit is `-2 pi M - acos(E)`.
pub fn gordon_omega_profile(state: &HydrogenState, r: f64) -> Result<f64> {
    Ok(gordon_omega_samples(state, &[r])?[0])
}

/// Continuous lift sampled at several radii (ascending, all positive).
pub fn gordon_omega_samples(state: &HydrogenState, rs: &[f64]) -> Result<Vec<f64>> {
    if rs.is_empty() {
        return Ok(Vec::new());
    }
    if rs.iter().any(|&r| r <= 0.0) || rs.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParam(
            "radii must be positive and ascending".into(),
        ));
    }
    let aux = GordonAux::for_state(state);
    let raw = |r: f64| -> Result<f64> {
        let (u, v) = phase_components(state, &aux, r)?;
        Ok(2.0 * v.atan2(u))
    };

    // anchor the branch at the origin limit
    let r_anchor = rs[0].min(1e-9 / aux.eta.max(1e-6));
    let target0 = omega_at_origin(state.k, state.gamma);
    let raw0 = raw(r_anchor)?;
    let mut lift = raw0 + 2.0 * PI * ((target0 - raw0) / (2.0 * PI)).round();
    debug_assert!((lift - target0).abs() < 0.3);

    let mut out = Vec::with_capacity(rs.len());
    let mut r_prev = r_anchor;
    let mut raw_prev = raw0;
    for &r in rs {
        let (l, rp) = march_lift(&raw, r_prev, raw_prev, r, lift)?;
        lift = l;
        raw_prev = rp;
        r_prev = r;
        out.push(lift);
    }
    Ok(out)
}

/// Advance the continuous lift from `(r0, raw0, lift0)` to `r1`.
///
/// The interval is walked on a base grid no coarser than the pole spacing
/// scale and each cell is bisected until the wrapped phase step is small, so
/// the integer branch count cannot alias.
fn march_lift(
    raw: &impl Fn(f64) -> Result<f64>,
    r0: f64,
    raw0: f64,
    r1: f64,
    lift0: f64,
) -> Result<(f64, f64)> {
    let mut lift = lift0;
    let mut ra = r0;
    let mut raw_a = raw0;
    let n_base = (((r1 - r0) / 0.05).ceil() as usize).clamp(1, 4096);
    for i in 1..=n_base {
        let rb = r0 + (r1 - r0) * i as f64 / n_base as f64;
        let raw_b = raw(rb)?;
        lift = advance_cell(raw, ra, raw_a, rb, raw_b, lift, 0)?;
        ra = rb;
        raw_a = raw_b;
    }
    Ok((lift, raw_a))
}

fn advance_cell(
    raw: &impl Fn(f64) -> Result<f64>,
    ra: f64,
    raw_a: f64,
    rb: f64,
    raw_b: f64,
    lift_a: f64,
    depth: u32,
) -> Result<f64> {
    let mut d = raw_b - raw_a;
    d -= 2.0 * PI * (d / (2.0 * PI)).round();
    if d.abs() <= 0.5 || depth >= 60 || (rb - ra) < 1e-15 * rb.abs().max(1.0) {
        return Ok(lift_a + d);
    }
    let rm = 0.5 * (ra + rb);
    let raw_m = raw(rm)?;
    let lift_m = advance_cell(raw, ra, raw_a, rm, raw_m, lift_a, depth + 1)?;
    advance_cell(raw, rm, raw_m, rb, raw_b, lift_m, depth + 1)
}

/// Count the zeros of the denominator of the phase's rational inner function
/// on `(0, infinity)`: `M` zeros for `k < 0` and `M - 1` for `k > 0`.
pub fn count_denominator_zeros(state: &HydrogenState) -> u32 {
    let aux = GordonAux::for_state(state);
    let beta = 2.0 * aux.rho + 1.0;
    let den = |x: f64| -> f64 {
        let f1 = if state.m == 0 {
            0.0
        } else {
            confluent_f(-(state.m as i32) + 1, beta, x).unwrap()
        };
        let f2 = confluent_f(-(state.m as i32), beta, x).unwrap();
        aux.mu * f1 + f2
    };
    // polynomial in x = 2 eta r of degree <= M; all positive roots lie well
    // below this classical bound
    let x_max = 6.0 * (state.m as f64 + beta + 2.0);
    let n_grid = 20_000;
    let mut count = 0;
    let mut prev = den(1e-12);
    for i in 1..=n_grid {
        let x = x_max * i as f64 / n_grid as f64;
        let cur = den(x);
        if prev != 0.0 && cur != 0.0 && prev.signum() != cur.signum() {
            count += 1;
        }
        prev = cur;
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(m: u32, k: i32, gamma: f64) -> HydrogenState {
        HydrogenState::new(m, k, gamma).unwrap()
    }

    #[test]
    fn excluded_state_rejected() {
        assert!(matches!(
            HydrogenState::new(0, 1, -0.2),
            Err(Error::ExcludedState { m: 0, k: 1 })
        ));
        assert!(HydrogenState::new(1, 1, -0.2).is_ok());
        assert!(HydrogenState::new(0, -1, -0.2).is_ok());
        assert!(HydrogenState::new(0, -1, -0.9).is_err());
    }

    #[test]
    fn sommerfeld_ground_state() {
        // M = 0, |k| = 1 reduces to sqrt(1 - gamma^2)
        let e = sommerfeld_energy(&st(0, -1, -0.2));
        assert!((e - 0.96f64.sqrt()).abs() < 1e-15);
        assert!((e - 0.9797959).abs() < 1e-7);
    }

    #[test]
    fn sommerfeld_first_excited() {
        // frozen from an independent high-precision evaluation of
        // 1/sqrt(1 + 0.04/(1 + sqrt(0.96))^2)
        let e = sommerfeld_energy(&st(1, -1, -0.2));
        assert!((e - 0.99493615300512).abs() < 1e-11);
        // nonrelativistic check: 1 - E ~ gamma^2 / 8
        assert!((1.0 - e - 0.005).abs() < 2e-4);
    }

    #[test]
    fn nonrelativistic_limit() {
        // 1 - E -> gamma^2 / (2 n^2) with relative error O(gamma^2)
        let gamma = -1e-3;
        for (m, k) in [(0, -1), (1, -1), (0, -2), (2, -1), (1, 2)] {
            let state = st(m, k, gamma);
            let n = state.principal() as f64;
            let gap = 1.0 - sommerfeld_energy(&state);
            let nonrel = gamma * gamma / (2.0 * n * n);
            assert!(
                ((gap - nonrel) / nonrel).abs() < 1e-4,
                "M={m} k={k}: gap {gap:.3e} vs {nonrel:.3e}"
            );
        }
    }

    #[test]
    fn confluent_terminating_sums() {
        assert_eq!(confluent_f(0, 3.0, 17.0).unwrap(), 1.0);
        assert!((confluent_f(-1, 3.0, 2.0).unwrap() - (1.0 - 2.0 / 3.0)).abs() < 1e-15);
        assert!((confluent_f(-2, 3.0, 1.0).unwrap() - (1.0 - 2.0 / 3.0 + 1.0 / 12.0)).abs() < 1e-15);
        assert!(matches!(
            confluent_f(1, 3.0, 1.0),
            Err(Error::NonTerminating { alpha: 1 })
        ));
    }

    /// Explicit hypergeometric-sum form of the Jacobi polynomial, used as the
    /// independent oracle for the recurrence.
    fn jacobi_sum_oracle(n: u32, alpha: f64, beta: f64, x: f64) -> f64 {
        fn binom(top: f64, k: u32) -> f64 {
            let mut v = 1.0;
            for i in 0..k {
                v *= (top - i as f64) / (k - i) as f64;
            }
            v
        }
        let mut sum = 0.0;
        for s in 0..=n {
            sum += binom(n as f64 + alpha, n - s)
                * binom(n as f64 + beta, s)
                * (0.5 * (x - 1.0)).powi(s as i32)
                * (0.5 * (x + 1.0)).powi((n - s) as i32);
        }
        sum
    }

    #[test]
    fn jacobi_low_orders() {
        assert_eq!(jacobi_p(0, 1.3, -0.2, 0.77), 1.0);
        assert!((jacobi_p(1, 0.0, 1.0, 0.0) - (-0.5)).abs() < 1e-15);
        let oracle = jacobi_sum_oracle(2, 1.0, 0.0, 0.5);
        assert!((jacobi_p(2, 1.0, 0.0, 0.5) - oracle).abs() < 1e-14);
        assert!((oracle - 0.625).abs() < 1e-15);
    }

    #[test]
    fn jacobi_recurrence_matches_sum_oracle() {
        for n in 0..7u32 {
            for &(alpha, beta) in &[(0.0, 1.0), (1.0, 2.0), (2.0, 1.0), (3.0, 2.0)] {
                for i in 0..9 {
                    let x = -1.0 + 0.25 * i as f64;
                    let a = jacobi_p(n, alpha, beta, x);
                    let b = jacobi_sum_oracle(n, alpha, beta, x);
                    assert!((a - b).abs() < 1e-11 * b.abs().max(1.0), "n={n} x={x}");
                }
            }
        }
    }

    #[test]
    fn gordon_ground_state_pieces() {
        // M = 0: phi1 vanishes identically and phi2 = e^{-eta r} r^rho
        let state = st(0, -1, -0.2);
        let aux = GordonAux::for_state(&state);
        let g = gordon_radial(&state, 2.5).unwrap();
        assert_eq!(g.phi1, 0.0);
        assert!((g.phi2 - (-aux.eta * 2.5f64).exp() * 2.5f64.powf(aux.rho)).abs() < 1e-15);
    }

    #[test]
    fn gordon_phi2_single_zero() {
        // M = 1: F(-1, 2 rho + 1, 2 eta r) is linear with root (2 rho + 1)/(2 eta)
        let state = st(1, -1, -0.2);
        let aux = GordonAux::for_state(&state);
        let r_zero = (2.0 * aux.rho + 1.0) / (2.0 * aux.eta);
        let g = gordon_radial(&state, r_zero).unwrap();
        assert!(g.phi2.abs() < 1e-12);
        let mut sign_changes = 0;
        let mut prev = gordon_radial(&state, 0.01).unwrap().phi2;
        for i in 1..4000 {
            let r = 0.01 + i as f64 * 0.05;
            let cur = gordon_radial(&state, r).unwrap().phi2;
            if prev.signum() != cur.signum() {
                sign_changes += 1;
            }
            prev = cur;
        }
        assert_eq!(sign_changes, 1);
    }

    #[test]
    fn omega_constant_for_nodeless_state() {
        // M = 0, k = -1: mu = 0 so the inner ratio is -1 for every r and the
        // profile is identically -acos(E)
        let state = st(0, -1, -0.2);
        let e = sommerfeld_energy(&state);
        for r in [1e-6, 0.1, 1.0, 10.0, 300.0] {
            let om = gordon_omega_profile(&state, r).unwrap();
            assert!((om + e.acos()).abs() < 1e-12, "r={r}: {om}");
        }
        // and matches the origin branch table
        assert!((omega_at_origin(-1, -0.2) + e.acos()).abs() < 1e-14);
    }

    #[test]
    fn omega_lift_drops_2pi_per_pole() {
        let gamma = -0.2;
        for (m, k) in [(1i32, -1i32), (2, -1), (2, 1), (3, -2)] {
            let state = st(m as u32, k, gamma);
            let aux = GordonAux::for_state(&state);
            let r_far = 400.0 / aux.eta;
            let lift = gordon_omega_profile(&state, r_far).unwrap();
            let predicted = -2.0 * PI * m as f64 - aux.energy.acos();
            // corrected for the leading algebraic tail
            let tail = (state.k as f64 - gamma / aux.eta) / r_far;
            assert!(
                (lift - tail - predicted).abs() < 1e-4,
                "M={m} k={k}: lift {lift:.6} vs {predicted:.6}"
            );
        }
    }

    #[test]
    fn pole_counts() {
        for m in 0..=4u32 {
            for k in [-3i32, -2, -1, 1, 2, 3] {
                if k > 0 && m == 0 {
                    continue;
                }
                let state = st(m, k, -0.2);
                let expect = if k < 0 { m } else { m - 1 };
                assert_eq!(
                    count_denominator_zeros(&state),
                    expect,
                    "M={m} k={k}"
                );
            }
        }
    }
}
