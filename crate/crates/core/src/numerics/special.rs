//! Error function and standard-normal helpers, accurate to double precision
//! over the whole real line (SPECFUN-style rational approximations).

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

const SQRT_2PI: f64 = 2.506628274631000502415765284811;
// 1/sqrt(pi)
const FRAC_1_SQRT_PI: f64 = 0.5641895835477562869480794515608;

// |x| <= 0.46875
const ERF_A: [f64; 5] = [
    3.16112374387056560e0,
    1.13864154151050156e2,
    3.77485237685302021e2,
    3.20937758913846947e3,
    1.85777706184603153e-1,
];
const ERF_B: [f64; 4] = [
    2.36012909523441209e1,
    2.44024637934444173e2,
    1.28261652607737228e3,
    2.84423683343917062e3,
];
// 0.46875 < x <= 4
const ERF_C: [f64; 9] = [
    5.64188496988670089e-1,
    8.88314979438837594e0,
    6.61191906371416295e1,
    2.98635138197400131e2,
    8.81952221241769090e2,
    1.71204761263407058e3,
    2.05107837782607147e3,
    1.23033935479799725e3,
    2.15311535474403846e-8,
];
const ERF_D: [f64; 8] = [
    1.57449261107098347e1,
    1.17693950891312499e2,
    5.37181101862009858e2,
    1.62138957456669019e3,
    3.29079923573345963e3,
    4.36261909014324716e3,
    3.43936767414372164e3,
    1.23033935480374942e3,
];
// x > 4
const ERF_P: [f64; 6] = [
    3.05326634961232344e-1,
    3.60344899949804439e-1,
    1.25781726111229246e-1,
    1.60837851487422766e-2,
    6.58749161529837803e-4,
    1.63153871373020978e-2,
];
const ERF_Q: [f64; 5] = [
    2.56852019228982242e0,
    1.87295284992346047e0,
    5.27905102951428412e-1,
    6.05183413124413191e-2,
    2.33520497626869185e-3,
];

// erfc(y)*exp(y^2) for y in (0.46875, 4].
fn erfc_mid(y: f64) -> f64 {
    let mut num = ERF_C[8] * y;
    let mut den = y;
    for i in 0..7 {
        num = (num + ERF_C[i]) * y;
        den = (den + ERF_D[i]) * y;
    }
    (num + ERF_C[7]) / (den + ERF_D[7])
}

// erfc(y)*exp(y^2) for y > 4.
fn erfc_far(y: f64) -> f64 {
    let ysq = 1.0 / (y * y);
    let mut num = ERF_P[5] * ysq;
    let mut den = ysq;
    for i in 0..4 {
        num = (num + ERF_P[i]) * ysq;
        den = (den + ERF_Q[i]) * ysq;
    }
    let r = ysq * (num + ERF_P[4]) / (den + ERF_Q[4]);
    (FRAC_1_SQRT_PI - r) / y
}

// exp(-y^2) computed as exp(-hi^2)*exp(-(y-hi)(y+hi)) with hi a short-mantissa
// approximation of y, which keeps the relative error of the product small.
fn exp_neg_sq(y: f64) -> f64 {
    let hi = (y * 16.0).trunc() / 16.0;
    let del = (y - hi) * (y + hi);
    (-hi * hi).exp() * (-del).exp()
}

/// Error function.
pub fn erf(x: f64) -> f64 {
    let y = x.abs();
    if y <= 0.46875 {
        let z = y * y;
        let mut num = ERF_A[4] * z;
        let mut den = z;
        for i in 0..3 {
            num = (num + ERF_A[i]) * z;
            den = (den + ERF_B[i]) * z;
        }
        return x * (num + ERF_A[3]) / (den + ERF_B[3]);
    }
    let r = 1.0 - erfc_positive(y);
    if x < 0.0 {
        -r
    } else {
        r
    }
}

// erfc on [0.46875, inf).
fn erfc_positive(y: f64) -> f64 {
    if y > 26.6 {
        return 0.0; // underflow
    }
    let scaled = if y <= 4.0 { erfc_mid(y) } else { erfc_far(y) };
    exp_neg_sq(y) * scaled
}

/// Complementary error function, accurate in the far tail.
pub fn erfc(x: f64) -> f64 {
    let y = x.abs();
    if y <= 0.46875 {
        return 1.0 - erf(x);
    }
    if x < 0.0 {
        2.0 - erfc_positive(y)
    } else {
        erfc_positive(y)
    }
}

/// Standard normal density.
pub fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / SQRT_2PI
}

/// Standard normal CDF.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// Standard normal survival function 1 - CDF, accurate in the right tail.
pub fn norm_sf(x: f64) -> f64 {
    0.5 * erfc(x * FRAC_1_SQRT_2)
}

// Acklam's rational initial guess for the normal quantile.
fn norm_quantile_guess(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -norm_quantile_guess(1.0 - p)
    }
}

/// Standard normal quantile for u in (0, 1); Newton-polished to full double
/// precision. Returns +-inf at the endpoints.
pub fn norm_quantile(u: f64) -> f64 {
    if u <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if u >= 1.0 {
        return f64::INFINITY;
    }
    let mut x = norm_quantile_guess(u);
    for _ in 0..3 {
        // Work on the smaller of CDF/survival so the residual stays accurate.
        let (resid, _) = if x <= 0.0 {
            (norm_cdf(x) - u, u)
        } else {
            ((1.0 - u) - norm_sf(x), 1.0 - u)
        };
        let pdf = norm_pdf(x);
        if pdf <= 0.0 {
            break;
        }
        let step = resid / pdf;
        // Halley correction for faster convergence.
        let step = step / (1.0 + 0.5 * x * step);
        if !step.is_finite() {
            break;
        }
        x -= step;
        if step.abs() <= 1e-16 * (1.0 + x.abs()) {
            break;
        }
    }
    x
}

pub const SQRT_TWO_PI: f64 = SQRT_2PI;
pub const SQRT_TWO: f64 = SQRT_2;
