//! Internal scalar root-finding and quadrature helpers.

use crate::error::Result;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub flo: f64,
    pub fhi: f64,
}

/// Walk `f` over `[lo, hi]` in steps of `step`, returning the first interval
/// with a sign change.
pub(crate) fn scan_first_bracket<E>(
    mut f: impl FnMut(f64) -> std::result::Result<f64, E>,
    lo: f64,
    hi: f64,
    step: f64,
) -> std::result::Result<Option<Bracket>, E> {
    let mut x0 = lo;
    let mut f0 = f(x0)?;
    if f0 == 0.0 {
        return Ok(Some(Bracket {
            lo: x0,
            hi: x0,
            flo: f0,
            fhi: f0,
        }));
    }
    while x0 < hi {
        let x1 = (x0 + step).min(hi);
        let f1 = f(x1)?;
        if f0.signum() != f1.signum() {
            return Ok(Some(Bracket {
                lo: x0,
                hi: x1,
                flo: f0,
                fhi: f1,
            }));
        }
        x0 = x1;
        f0 = f1;
    }
    Ok(None)
}

/// Bisection to `xtol`, followed by a few secant polish steps that exploit a
/// smooth miss function near the root. Returns `(x, f(x))`.
pub(crate) fn bisect_polish(
    mut f: impl FnMut(f64) -> Result<f64>,
    bracket: Bracket,
    xtol: f64,
    polish: usize,
) -> Result<(f64, f64)> {
    let Bracket {
        mut lo,
        mut hi,
        mut flo,
        mut fhi,
    } = bracket;
    if flo == 0.0 {
        return Ok((lo, flo));
    }
    if fhi == 0.0 {
        return Ok((hi, fhi));
    }
    debug_assert!(flo.signum() != fhi.signum());
    for _ in 0..200 {
        if hi - lo <= xtol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // f64 resolution reached
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok((mid, fm));
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    // secant polish inside the bracket
    let (mut x0, mut f0, mut x1, mut f1) = (lo, flo, hi, fhi);
    let (mut best_x, mut best_f) = if f0.abs() < f1.abs() {
        (x0, f0)
    } else {
        (x1, f1)
    };
    for _ in 0..polish {
        let denom = f1 - f0;
        if denom == 0.0 {
            break;
        }
        let x2 = x1 - f1 * (x1 - x0) / denom;
        if !x2.is_finite() || x2 < lo || x2 > hi {
            break;
        }
        let f2 = f(x2)?;
        if f2.abs() < best_f.abs() {
            best_x = x2;
            best_f = f2;
        }
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f2;
        if f2 == 0.0 {
            break;
        }
    }
    Ok((best_x, best_f))
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` (a may exceed b).
pub(crate) fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bracket_and_bisect() {
        let f = |x: f64| -> Result<f64> { Ok(x * x - 2.0) };
        let br = scan_first_bracket(|x| f(x), 0.0, 3.0, 0.5).unwrap().unwrap();
        let (x, fx) = bisect_polish(f, br, 1e-13, 3).unwrap();
        assert!((x - std::f64::consts::SQRT_2).abs() < 1e-12);
        assert!(fx.abs() < 1e-11);
    }

    #[test]
    fn simpson_integrates_cosine() {
        let v = adaptive_simpson(&|x: f64| x.cos(), 0.0, 1.0, 1e-12);
        assert!((v - 1.0f64.sin()).abs() < 1e-11);
    }

    #[test]
    fn simpson_handles_inverse_power_edge() {
        // integrand ~ 1/x near the lower end, as in angular amplitudes
        let v = adaptive_simpson(&|x: f64| 1.0 / x, 1e-3, 1.0, 1e-12);
        assert!((v - (1.0f64 / 1e-3).ln()).abs() < 1e-9);
    }
}
