//! Adaptive quadrature, bracketed root-finding and domain-truncation utilities
//! that underpin every other module.

mod quad;
mod root;
pub mod special;

pub use quad::{integrate, integrate_with_breakpoints, QuadResult, TailedQuad};
pub(crate) use quad::{integrate_decaying, FnGuard};
pub use root::find_root;
pub(crate) use root::invert_monotone;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Values larger than this are reported as divergent (`+inf`) by the
/// integral routines that support unbounded results.
pub const DIVERGENCE_CAP: f64 = 1e12;

/// Floor applied to densities appearing in denominators, so that ratio
/// integrands stay finite and genuine divergence shows up through the cap
/// instead of through NaNs.
pub const DENSITY_FLOOR: f64 = 1e-300;

/// Quadrature, inversion and truncation tolerances shared across the toolkit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadSettings {
    /// Absolute integration tolerance.
    pub abs_tol: f64,
    /// Relative integration tolerance.
    pub rel_tol: f64,
    /// Subdivision depth limit per panel.
    pub max_depth: u32,
    /// Quantile level used to truncate unbounded domains, in (0, 1/2).
    pub trunc_q: f64,
}

impl Default for QuadSettings {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_depth: 60,
            trunc_q: 1e-9,
        }
    }
}

impl QuadSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !self.abs_tol.is_finite() {
            return Err(Error::InvalidSettings(format!(
                "abs_tol must be positive, got {}",
                self.abs_tol
            )));
        }
        if !(self.rel_tol > 0.0) || !self.rel_tol.is_finite() {
            return Err(Error::InvalidSettings(format!(
                "rel_tol must be positive, got {}",
                self.rel_tol
            )));
        }
        if self.max_depth < 1 {
            return Err(Error::InvalidSettings("max_depth must be >= 1".into()));
        }
        if !(self.trunc_q > 0.0 && self.trunc_q < 0.5) {
            return Err(Error::InvalidSettings(format!(
                "trunc_q must lie in (0, 1/2), got {}",
                self.trunc_q
            )));
        }
        Ok(())
    }

    /// Tolerance applicable to a quantity of the given magnitude.
    pub fn tolerance_for(&self, magnitude: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * magnitude.abs())
    }
}

/// Interval of the extended real line; infinite endpoints are permitted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const REAL_LINE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || !(lo < hi) {
            return Err(Error::InvalidInterval { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Closed-interval membership.
    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo < hi).then_some(Interval { lo, hi })
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }
}

/// Compensated summation; keeps deterministic totals independent of how many
/// panels the adaptive scheme produced.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct KahanSum {
    sum: f64,
    c: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn settings_validation() {
        assert!(QuadSettings::default().validate().is_ok());
        let bad = QuadSettings {
            trunc_q: 0.5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = QuadSettings {
            abs_tol: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn interval_ops() {
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(f64::NAN, 1.0).is_err());
        let iv = Interval::new(f64::NEG_INFINITY, 0.0).unwrap();
        assert!(!iv.is_finite());
        assert!(iv.contains(-1e308));
        let a = Interval::new(0.0, 2.0).unwrap();
        let b = Interval::new(1.0, 3.0).unwrap();
        assert_eq!(a.intersect(&b).unwrap(), Interval { lo: 1.0, hi: 2.0 });
        assert_eq!(a.hull(&b), Interval { lo: 0.0, hi: 3.0 });
    }

    #[test]
    fn kahan_compensates() {
        let mut k = KahanSum::default();
        for _ in 0..1_000_000 {
            k.add(0.1);
        }
        assert!((k.value() - 100_000.0).abs() < 1e-9);
    }
}
