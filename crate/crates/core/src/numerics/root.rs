//! Bracketed root-finding: bisection with secant acceleration, plus the
//! monotone inversion used for numeric quantiles.

use super::{Interval, QuadSettings};
use crate::error::{Error, Result};

const MAX_ITER: usize = 500;

/// Find a root of `f` inside the finite bracket `iv` with `f(lo)*f(hi) <= 0`.
///
/// Secant steps are taken when they stay inside the bracket and keep
/// shrinking it; otherwise the method falls back to bisection, so convergence
/// to a bracket of width `abs_tol` is guaranteed.
pub fn find_root<F: Fn(f64) -> f64>(f: F, iv: Interval, s: &QuadSettings) -> Result<f64> {
    s.validate()?;
    if !iv.is_finite() || !(iv.lo < iv.hi) {
        return Err(Error::InvalidInterval {
            lo: iv.lo,
            hi: iv.hi,
        });
    }
    let (mut a, mut b) = (iv.lo, iv.hi);
    let mut fa = f(a);
    let mut fb = f(b);
    for (x, fx) in [(a, fa), (b, fb)] {
        if !fx.is_finite() {
            return Err(Error::Evaluation { x });
        }
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoBracket {
            lo: a,
            hi: b,
            flo: fa,
            fhi: fb,
        });
    }

    let xtol = s.abs_tol.max(4.0 * f64::EPSILON * a.abs().max(b.abs()));
    let mut width_two_ago = b - a;
    for it in 0..MAX_ITER {
        if b - a <= xtol {
            break;
        }
        // Secant proposal, clipped away from the endpoints; bisection is
        // forced whenever the bracket stops halving.
        let mid = 0.5 * (a + b);
        let mut x = if it % 2 == 0 || (b - a) > 0.5 * width_two_ago {
            mid
        } else {
            let sec = (a * fb - b * fa) / (fb - fa);
            let margin = 0.01 * (b - a);
            if sec.is_finite() && sec > a + margin && sec < b - margin {
                sec
            } else {
                mid
            }
        };
        if !(x > a && x < b) {
            x = mid;
        }
        let fx = f(x);
        if !fx.is_finite() {
            return Err(Error::Evaluation { x });
        }
        if fx == 0.0 || fx.abs() <= s.abs_tol {
            return Ok(x);
        }
        width_two_ago = b - a;
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
    }
    Ok(0.5 * (a + b))
}

/// Leftmost `x` in `[lo, hi]` with `cdf(x) >= u`, assuming `cdf` is
/// nondecreasing with `cdf(lo) < u <= cdf(hi)`. Newton steps through the
/// density accelerate the bisection where the density is positive.
pub(crate) fn invert_monotone<C, D>(
    cdf: C,
    density: D,
    u: f64,
    mut lo: f64,
    mut hi: f64,
    s: &QuadSettings,
) -> Result<f64>
where
    C: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let mut last_width = hi - lo;
    for it in 0..MAX_ITER {
        let xtol = s.abs_tol.max(4.0 * f64::EPSILON * lo.abs().max(hi.abs()));
        if hi - lo <= xtol {
            return Ok(hi);
        }
        // Bisection step, replaced by a bracketed Newton step from the upper
        // end on odd iterations.
        let mut x = 0.5 * (lo + hi);
        if it % 2 == 1 && (hi - lo) < 0.5 * last_width {
            let fx = density(hi);
            if fx > 0.0 {
                let candidate = hi - (cdf(hi) - u) / fx;
                let margin = 0.01 * (hi - lo);
                if candidate.is_finite() && candidate > lo + margin && candidate < hi - margin {
                    x = candidate;
                }
            }
        }
        last_width = hi - lo;
        let cx = cdf(x);
        if !cx.is_finite() {
            return Err(Error::Evaluation { x });
        }
        if cx >= u {
            hi = x;
        } else {
            lo = x;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::special::norm_cdf;

    fn settings() -> QuadSettings {
        QuadSettings::default()
    }

    #[test]
    fn linear_root() {
        let r = find_root(|x| x - 0.5, Interval::new(0.0, 1.0).unwrap(), &settings()).unwrap();
        assert!((r - 0.5).abs() < 1e-10);
    }

    #[test]
    fn exp_root_is_ln2() {
        let r = find_root(
            |x: f64| x.exp() - 2.0,
            Interval::new(0.0, 2.0).unwrap(),
            &settings(),
        )
        .unwrap();
        assert!((r - std::f64::consts::LN_2).abs() < 1e-10);
    }

    // Independent oracle for the 0.975 normal quantile: Maclaurin series for
    // erf plus plain bisection, no shared code with the library path.
    fn erf_series(x: f64) -> f64 {
        let mut term = x;
        let mut sum = x;
        for n in 1..200 {
            let nf = n as f64;
            term *= -x * x / nf;
            let add = term / (2.0 * nf + 1.0);
            sum += add;
            if add.abs() < 1e-18 {
                break;
            }
        }
        sum * 2.0 / std::f64::consts::PI.sqrt()
    }

    #[test]
    fn normal_quantile_via_root() {
        let phi = |x: f64| 0.5 * (1.0 + erf_series(x / std::f64::consts::SQRT_2));
        let r = find_root(
            |x| phi(x) - 0.975,
            Interval::new(0.0, 4.0).unwrap(),
            &settings(),
        )
        .unwrap();
        assert!((r - 1.959964).abs() < 1e-6, "got {r}");
        // and the library normal CDF agrees with the series oracle
        for &x in &[0.3, 1.0, 1.959964, 3.0] {
            assert!((norm_cdf(x) - phi(x)).abs() < 1e-14);
        }
    }

    #[test]
    fn missing_bracket_is_reported() {
        let r = find_root(|x| x * x + 1.0, Interval::new(-1.0, 1.0).unwrap(), &settings());
        assert!(matches!(r, Err(Error::NoBracket { .. })));
    }

    #[test]
    fn residual_small_for_lipschitz_functions() {
        let s = settings();
        // Lipschitz constant <= 10.
        let f = |x: f64| 10.0 * (x - 0.3377);
        let r = find_root(f, Interval::new(0.0, 1.0).unwrap(), &s).unwrap();
        assert!(f(r).abs() <= 10.0 * s.abs_tol);
    }

    #[test]
    fn invert_monotone_flat_stretch() {
        // CDF flat on [1, 2]: inversion at the plateau level returns the left edge.
        let cdf = |x: f64| {
            if x < 1.0 {
                0.5 * x
            } else if x < 2.0 {
                0.5
            } else {
                0.5 + 0.5 * (x - 2.0)
            }
        };
        let x = invert_monotone(cdf, |_| 0.0, 0.5, 0.0, 3.0, &settings()).unwrap();
        assert!((x - 1.0).abs() < 1e-9, "got {x}");
    }
}
