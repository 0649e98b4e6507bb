//! Globally adaptive Gauss-Kronrod quadrature with breakpoint hints,
//! unbounded-domain transforms and geometric tail extension.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{Interval, KahanSum, QuadSettings};
use crate::error::{Error, Result};

// 15-point Kronrod abscissae on [-1, 1] (positive half) with the embedded
// 7-point Gauss rule. Odd indices are the Gauss nodes.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

const MAX_PANELS: usize = 16_384;

/// Outcome of one integration: the estimate and its error bound.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
}

/// Outcome of a tail-extended integration over a possibly unbounded region.
#[derive(Debug, Clone, Copy)]
pub struct TailedQuad {
    pub value: f64,
    pub error: f64,
    /// Partial sums grew past the divergence cap.
    pub diverged: bool,
}

// GSL-style error rescaling from the raw Kronrod-Gauss difference.
fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

struct PanelEval {
    value: f64,
    error: f64,
    res_abs: f64,
}

fn qk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> PanelEval {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut fv1 = [0.0_f64; 7];
    let mut fv2 = [0.0_f64; 7];
    let mut res_gauss = WG[3] * f_center;
    let mut res_kronrod = WGK[7] * f_center;
    let mut res_abs = res_kronrod.abs();

    // Gauss-shared nodes.
    for j in 0..3 {
        let jtw = 2 * j + 1;
        let x = half * XGK[jtw];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_gauss += WG[j] * (f1 + f2);
        res_kronrod += WGK[jtw] * (f1 + f2);
        res_abs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    // Kronrod-only nodes.
    for j in 0..4 {
        let jtw = 2 * j;
        let x = half * XGK[jtw];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_kronrod += WGK[jtw] * (f1 + f2);
        res_abs += WGK[jtw] * (f1.abs() + f2.abs());
    }

    let mean = res_kronrod * 0.5;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let err = (res_kronrod - res_gauss) * half;
    PanelEval {
        value: res_kronrod * half,
        error: rescale_error(err, res_abs * half.abs(), res_asc * half.abs()),
        res_abs: res_abs * half.abs(),
    }
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    res_abs: f64,
    depth: u32,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Guard that lets fallible integrands run under the infallible quadrature
/// callback: the first error is parked and the integrand returns 0 afterwards.
pub(crate) struct FnGuard {
    slot: RefCell<Option<Error>>,
}

impl FnGuard {
    pub fn new() -> Self {
        Self {
            slot: RefCell::new(None),
        }
    }

    pub fn wrap<'a, F: Fn(f64) -> Result<f64> + 'a>(&'a self, f: F) -> impl Fn(f64) -> f64 + 'a {
        move |x| match f(x) {
            Ok(v) => v,
            Err(e) => {
                self.slot.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    }

    pub fn check(&self) -> Result<()> {
        match self.slot.borrow_mut().take() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

fn panel_of(f: &dyn Fn(f64) -> f64, a: f64, b: f64, depth: u32) -> Result<Panel> {
    let eval = qk15(f, a, b);
    if !eval.value.is_finite() && eval.res_abs.is_finite() {
        // A finite res_abs with non-finite sum means cancellation of infinities.
        return Err(Error::Evaluation { x: 0.5 * (a + b) });
    }
    Ok(Panel {
        a,
        b,
        value: eval.value,
        error: eval.error,
        res_abs: eval.res_abs,
        depth,
    })
}

// Adaptive integration over a finite interval, breakpoints already applied
// as initial panel boundaries.
fn adapt_finite(f: &dyn Fn(f64) -> f64, edges: &[f64], s: &QuadSettings) -> Result<QuadResult> {
    let mut heap: BinaryHeap<Panel> = BinaryHeap::new();
    let mut frozen: Vec<Panel> = Vec::new(); // panels at depth/width limits
    let mut total_value = 0.0;
    let mut total_error = 0.0;
    let mut total_res_abs = 0.0;

    let mut push = |p: Panel,
                    heap: &mut BinaryHeap<Panel>,
                    frozen: &mut Vec<Panel>,
                    tv: &mut f64,
                    te: &mut f64,
                    tr: &mut f64| {
        *tv += p.value;
        *te += p.error;
        *tr += p.res_abs;
        let width_floor = 32.0 * f64::EPSILON * (p.a.abs().max(p.b.abs()).max(1.0));
        if p.depth >= s.max_depth || (p.b - p.a) <= width_floor {
            frozen.push(p);
        } else {
            heap.push(p);
        }
    };

    for w in edges.windows(2) {
        let p = panel_of(f, w[0], w[1], 0)?;
        push(
            p,
            &mut heap,
            &mut frozen,
            &mut total_value,
            &mut total_error,
            &mut total_res_abs,
        );
    }

    loop {
        let tol = s
            .tolerance_for(total_value)
            .max(100.0 * f64::EPSILON * total_res_abs);
        if total_error <= tol {
            break;
        }
        if heap.len() + frozen.len() >= MAX_PANELS {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        total_value -= worst.value;
        total_error -= worst.error;
        total_res_abs -= worst.res_abs;
        let mid = 0.5 * (worst.a + worst.b);
        for (a, b) in [(worst.a, mid), (mid, worst.b)] {
            let p = panel_of(f, a, b, worst.depth + 1)?;
            push(
                p,
                &mut heap,
                &mut frozen,
                &mut total_value,
                &mut total_error,
                &mut total_res_abs,
            );
        }
    }

    // Deterministic final summation: sort panels by position.
    let mut panels: Vec<Panel> = heap.into_vec();
    panels.extend(frozen);
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let mut value = KahanSum::default();
    let mut error = KahanSum::default();
    let mut res_abs = 0.0;
    for p in &panels {
        value.add(p.value);
        error.add(p.error);
        res_abs += p.res_abs;
    }
    let value = value.value();
    let error = error.value();

    let tol = s.tolerance_for(value).max(100.0 * f64::EPSILON * res_abs);
    if !value.is_finite() || error > tol {
        return Err(Error::Accuracy { best: value, error });
    }
    Ok(QuadResult { value, error })
}

// Build sorted panel edges from an interval and interior breakpoints.
fn edges_for(lo: f64, hi: f64, breakpoints: &[f64]) -> Vec<f64> {
    let mut edges = Vec::with_capacity(breakpoints.len() + 2);
    edges.push(lo);
    let min_gap = 1e-14 * (hi - lo).max(lo.abs().max(hi.abs()));
    for &b in breakpoints {
        if b > lo + min_gap && b < hi - min_gap {
            edges.push(b);
        }
    }
    edges.push(hi);
    edges.sort_by(f64::total_cmp);
    edges.dedup_by(|a, b| (*a - *b).abs() <= min_gap);
    edges
}

/// Integrate `f` over `iv` to the requested tolerance.
///
/// Unbounded intervals are handled through the usual rational substitutions.
/// Returns the estimate with its error bound, or an accuracy error carrying
/// the best estimate when the subdivision budget is exhausted.
pub fn integrate<F: Fn(f64) -> f64>(f: F, iv: Interval, s: &QuadSettings) -> Result<QuadResult> {
    integrate_with_breakpoints(f, iv, &[], s)
}

/// Like [`integrate`], but never lets a single panel straddle one of the
/// supplied breakpoints (jump or kink locations of the integrand).
pub fn integrate_with_breakpoints<F: Fn(f64) -> f64>(
    f: F,
    iv: Interval,
    breakpoints: &[f64],
    s: &QuadSettings,
) -> Result<QuadResult> {
    s.validate()?;
    if iv.lo.is_nan() || iv.hi.is_nan() || !(iv.lo < iv.hi) {
        return Err(Error::InvalidInterval {
            lo: iv.lo,
            hi: iv.hi,
        });
    }

    let guard = FnGuard::new();
    let checked = guard.wrap(|x| {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Evaluation { x })
        }
    });

    let result = integrate_impl(&checked, iv, breakpoints, s);
    guard.check()?;
    result
}

fn integrate_impl(
    f: &dyn Fn(f64) -> f64,
    iv: Interval,
    breakpoints: &[f64],
    s: &QuadSettings,
) -> Result<QuadResult> {
    match (iv.lo.is_finite(), iv.hi.is_finite()) {
        (true, true) => adapt_finite(f, &edges_for(iv.lo, iv.hi, breakpoints), s),
        (true, false) => {
            // x = lo + t/(1-t), t in [0, 1)
            let lo = iv.lo;
            let g = move |t: f64| {
                let om = 1.0 - t;
                let fx = f(lo + t / om);
                if fx == 0.0 {
                    0.0
                } else {
                    fx / (om * om)
                }
            };
            let bp: Vec<f64> = breakpoints
                .iter()
                .filter(|&&b| b.is_finite() && b > lo)
                .map(|&b| (b - lo) / (1.0 + (b - lo)))
                .collect();
            adapt_finite(&g, &edges_for(0.0, 1.0, &bp), s)
        }
        (false, true) => {
            // x = hi - t/(1-t), t in [0, 1)
            let hi = iv.hi;
            let g = move |t: f64| {
                let om = 1.0 - t;
                let fx = f(hi - t / om);
                if fx == 0.0 {
                    0.0
                } else {
                    fx / (om * om)
                }
            };
            let bp: Vec<f64> = breakpoints
                .iter()
                .filter(|&&b| b.is_finite() && b < hi)
                .map(|&b| (hi - b) / (1.0 + (hi - b)))
                .collect();
            adapt_finite(&g, &edges_for(0.0, 1.0, &bp), s)
        }
        (false, false) => {
            // Split at a finite anchor and handle each half-line.
            let anchor = breakpoints
                .iter()
                .copied()
                .find(|b| b.is_finite())
                .unwrap_or(0.0);
            let half = QuadSettings {
                abs_tol: 0.5 * s.abs_tol,
                ..*s
            };
            let left = integrate_impl(
                f,
                Interval {
                    lo: f64::NEG_INFINITY,
                    hi: anchor,
                },
                breakpoints,
                &half,
            )?;
            let right = integrate_impl(
                f,
                Interval {
                    lo: anchor,
                    hi: f64::INFINITY,
                },
                breakpoints,
                &half,
            )?;
            Ok(QuadResult {
                value: left.value + right.value,
                error: left.error + right.error,
            })
        }
    }
}

/// Integrate a decaying nonnegative-tailed integrand: a core window handled
/// by the adaptive rule, then geometric extension toward the ends of
/// `support` until increments stop mattering or partial sums pass `cap`.
pub(crate) fn integrate_decaying<F: Fn(f64) -> f64>(
    f: F,
    core: (f64, f64),
    support: Interval,
    breakpoints: &[f64],
    s: &QuadSettings,
    cap: f64,
) -> Result<TailedQuad> {
    let lo = core.0.max(support.lo);
    let hi = core.1.min(support.hi);
    if !(lo < hi) {
        return Err(Error::InvalidInterval { lo, hi });
    }
    let base = match integrate_with_breakpoints(&f, Interval { lo, hi }, breakpoints, s) {
        Ok(r) => r,
        Err(Error::Accuracy { best, .. }) if !best.is_finite() || best.abs() > cap => {
            return Ok(TailedQuad {
                value: f64::INFINITY,
                error: f64::INFINITY,
                diverged: true,
            });
        }
        Err(e) => return Err(e),
    };
    let mut value = base.value;
    let mut error = base.error;
    let mut step = (hi - lo).max(1.0) / 4.0;

    // Rightward extension.
    let mut a = hi;
    for _ in 0..200 {
        if a >= support.hi {
            break;
        }
        let b = (a + step).min(support.hi);
        let seg = match integrate_with_breakpoints(&f, Interval { lo: a, hi: b }, breakpoints, s) {
            Ok(r) => r,
            Err(Error::Evaluation { .. }) | Err(Error::Accuracy { .. }) if value.abs() > cap => {
                return Ok(TailedQuad {
                    value: f64::INFINITY,
                    error: f64::INFINITY,
                    diverged: true,
                });
            }
            Err(e) => return Err(e),
        };
        value += seg.value;
        error += seg.error;
        if !value.is_finite() || value.abs() > cap {
            return Ok(TailedQuad {
                value: f64::INFINITY,
                error: f64::INFINITY,
                diverged: true,
            });
        }
        if seg.value.abs() <= 0.25 * s.tolerance_for(value) {
            break;
        }
        a = b;
        step *= 2.0;
    }

    // Leftward extension.
    step = (hi - lo).max(1.0) / 4.0;
    let mut b = lo;
    for _ in 0..200 {
        if b <= support.lo {
            break;
        }
        let a = (b - step).max(support.lo);
        let seg = match integrate_with_breakpoints(&f, Interval { lo: a, hi: b }, breakpoints, s) {
            Ok(r) => r,
            Err(Error::Evaluation { .. }) | Err(Error::Accuracy { .. }) if value.abs() > cap => {
                return Ok(TailedQuad {
                    value: f64::INFINITY,
                    error: f64::INFINITY,
                    diverged: true,
                });
            }
            Err(e) => return Err(e),
        };
        value += seg.value;
        error += seg.error;
        if !value.is_finite() || value.abs() > cap {
            return Ok(TailedQuad {
                value: f64::INFINITY,
                error: f64::INFINITY,
                diverged: true,
            });
        }
        if seg.value.abs() <= 0.25 * s.tolerance_for(value) {
            break;
        }
        b = a;
        step *= 2.0;
    }

    Ok(TailedQuad {
        value,
        error,
        diverged: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings() -> QuadSettings {
        QuadSettings::default()
    }

    #[test]
    fn constant_on_unit_interval() {
        let r = integrate(|_| 1.0, Interval::new(0.0, 1.0).unwrap(), &settings()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn quadratic_on_unit_interval() {
        let r = integrate(|x| x * x, Interval::new(0.0, 1.0).unwrap(), &settings()).unwrap();
        assert!((r.value - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn laplace_density_over_real_line() {
        let r = integrate(
            |x: f64| 0.5 * (-x.abs()).exp(),
            Interval::REAL_LINE,
            &settings(),
        )
        .unwrap();
        assert!((r.value - 1.0).abs() < 1e-10, "got {}", r.value);
    }

    #[test]
    fn semi_infinite_exponential() {
        let r = integrate(
            |x: f64| (-x).exp(),
            Interval::new(0.0, f64::INFINITY).unwrap(),
            &settings(),
        )
        .unwrap();
        assert!((r.value - 1.0).abs() < 1e-10);
        let r = integrate(
            |x: f64| x.exp(),
            Interval::new(f64::NEG_INFINITY, 0.0).unwrap(),
            &settings(),
        )
        .unwrap();
        assert!((r.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn breakpoints_capture_jumps() {
        // Step function: 1 on [0, 1/3), 3 on [1/3, 1].
        let f = |x: f64| if x < 1.0 / 3.0 { 1.0 } else { 3.0 };
        let r = integrate_with_breakpoints(
            f,
            Interval::new(0.0, 1.0).unwrap(),
            &[1.0 / 3.0],
            &settings(),
        )
        .unwrap();
        let want = 1.0 / 3.0 + 3.0 * 2.0 / 3.0;
        assert!((r.value - want).abs() < 1e-12);
    }

    #[test]
    fn split_additivity_within_tolerance() {
        let s = settings();
        let f = |x: f64| (x.sin() + 1.2).powi(2);
        let whole = integrate(f, Interval::new(-2.0, 3.0).unwrap(), &s).unwrap();
        let left = integrate(f, Interval::new(-2.0, 0.7).unwrap(), &s).unwrap();
        let right = integrate(f, Interval::new(0.7, 3.0).unwrap(), &s).unwrap();
        assert!((whole.value - left.value - right.value).abs() <= 2.0 * s.abs_tol.max(1e-12));
    }

    #[test]
    fn non_finite_integrand_reports_evaluation_error() {
        let r = integrate(
            |x: f64| 1.0 / (x - 0.5),
            Interval::new(0.0, 1.0).unwrap(),
            &settings(),
        );
        // The pole makes this non-integrable: either an evaluation error
        // (hit the pole) or an accuracy failure is acceptable.
        assert!(r.is_err());
    }

    #[test]
    fn decaying_tail_extension() {
        let s = settings();
        let r = integrate_decaying(
            |x: f64| (-x.abs()).exp() / 2.0,
            (-2.0, 2.0),
            Interval::REAL_LINE,
            &[0.0],
            &s,
            1e12,
        )
        .unwrap();
        assert!(!r.diverged);
        assert!((r.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn decaying_detects_divergence() {
        let s = settings();
        let r = integrate_decaying(
            |x: f64| x.abs().exp(),
            (-1.0, 1.0),
            Interval::REAL_LINE,
            &[],
            &s,
            1e12,
        )
        .unwrap();
        assert!(r.diverged);
        assert!(r.value.is_infinite());
    }
}
