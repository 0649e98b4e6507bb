//! Finite mixtures of laws.

use super::{check_unit_open, Distribution1D, Law};
use crate::error::{Error, Result};
use crate::numerics::{invert_monotone, Interval, QuadSettings};

/// Weighted mixture; weights are positive and sum to 1.
pub struct Mixture {
    comps: Vec<(f64, Law)>,
    support: Interval,
    positive: bool,
    bps: Vec<f64>,
    inv_settings: QuadSettings,
}

/// Build a mixture from `(weight, law)` components.
pub fn mixture(comps: Vec<(f64, Law)>, s: &QuadSettings) -> Result<Mixture> {
    if comps.is_empty() {
        return Err(Error::InvalidSpec("mixture needs components".into()));
    }
    let mut total = 0.0;
    for (w, _) in &comps {
        if !w.is_finite() || *w <= 0.0 {
            return Err(Error::InvalidSpec(format!(
                "mixture weights must be positive, got {w}"
            )));
        }
        total += w;
    }
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidSpec(format!(
            "mixture weights sum to {total}, expected 1"
        )));
    }
    // Renormalize exactly so the CDF tops out at 1.
    let comps: Vec<(f64, Law)> = comps.into_iter().map(|(w, d)| (w / total, d)).collect();

    let support = comps
        .iter()
        .map(|(_, d)| d.support())
        .reduce(|a, b| a.hull(&b))
        .unwrap();

    // Positive on the hull iff positive component supports cover it without
    // interior gaps.
    let mut ivs: Vec<Interval> = comps
        .iter()
        .filter(|(_, d)| d.has_positive_density())
        .map(|(_, d)| d.support())
        .collect();
    ivs.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let positive = {
        let mut ok = !ivs.is_empty() && ivs[0].lo <= support.lo;
        let mut cover = if ok { ivs[0].hi } else { f64::NAN };
        if ok {
            for iv in &ivs[1..] {
                if iv.lo > cover {
                    ok = false;
                    break;
                }
                cover = cover.max(iv.hi);
            }
        }
        ok && cover >= support.hi
    };

    let mut bps: Vec<f64> = comps.iter().flat_map(|(_, d)| d.breakpoints()).collect();
    bps.sort_by(f64::total_cmp);
    bps.dedup();

    Ok(Mixture {
        comps,
        support,
        positive,
        bps,
        inv_settings: *s,
    })
}

impl Distribution1D for Mixture {
    fn density(&self, x: f64) -> f64 {
        self.comps.iter().map(|(w, d)| w * d.density(x)).sum()
    }

    fn cdf(&self, x: f64) -> f64 {
        self.comps.iter().map(|(w, d)| w * d.cdf(x)).sum()
    }

    fn survival(&self, x: f64) -> f64 {
        self.comps.iter().map(|(w, d)| w * d.survival(x)).sum()
    }

    fn quantile(&self, u: f64) -> Result<f64> {
        check_unit_open(u)?;
        // The mixture quantile is bracketed by the extreme component
        // quantiles at the same level.
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (_, d) in &self.comps {
            let q = d.quantile(u)?;
            lo = lo.min(q);
            hi = hi.max(q);
        }
        if lo >= hi {
            return Ok(lo);
        }
        if self.cdf(lo) >= u {
            return Ok(lo);
        }
        invert_monotone(
            |x| self.cdf(x),
            |x| self.density(x),
            u,
            lo,
            hi,
            &self.inv_settings,
        )
    }

    fn support(&self) -> Interval {
        self.support
    }

    fn has_positive_density(&self) -> bool {
        self.positive
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.bps.clone()
    }
}
