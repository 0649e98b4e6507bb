//! Piecewise densities with closed-form antiderivatives per piece, so CDF
//! and quantile evaluations stay exact across jump discontinuities.

use serde::{Deserialize, Serialize};

use super::{check_unit_open, Distribution1D};
use crate::error::{Error, Result};
use crate::numerics::{find_root, Interval, QuadSettings};

/// Density expression on one piece.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PieceExpr {
    /// Constant density `value`.
    Const { value: f64 },
    /// `coef * exp(rate * x)`.
    Exp { coef: f64, rate: f64 },
    /// Polynomial with `coeffs[i] * x^i`.
    Poly { coeffs: Vec<f64> },
}

impl PieceExpr {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            PieceExpr::Const { value } => *value,
            PieceExpr::Exp { coef, rate } => coef * (rate * x).exp(),
            PieceExpr::Poly { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c),
        }
    }

    /// Mass on `[lo, x]`.
    fn mass(&self, lo: f64, x: f64) -> f64 {
        match self {
            PieceExpr::Const { value } => value * (x - lo),
            PieceExpr::Exp { coef, rate } => {
                if rate.abs() < 1e-300 {
                    coef * (x - lo)
                } else {
                    // coef/rate * (e^{rate x} - e^{rate lo}), written to stay
                    // accurate when the difference is small
                    coef / rate * (rate * lo).exp() * ((x - lo) * rate).exp_m1()
                }
            }
            PieceExpr::Poly { coeffs } => {
                let anti = |t: f64| {
                    coeffs
                        .iter()
                        .enumerate()
                        .rev()
                        .fold(0.0, |acc, (i, c)| (acc + c / (i as f64 + 1.0)) * t)
                };
                anti(x) - anti(lo)
            }
        }
    }

    /// `x` in `[lo, hi]` with mass(`lo`, x) = `target`.
    fn invert_mass(&self, lo: f64, hi: f64, target: f64, s: &QuadSettings) -> Result<f64> {
        match self {
            PieceExpr::Const { value } => {
                if *value <= 0.0 {
                    return Ok(lo);
                }
                Ok((lo + target / value).min(hi))
            }
            PieceExpr::Exp { coef, rate } => {
                if *coef <= 0.0 {
                    return Ok(lo);
                }
                if rate.abs() < 1e-300 {
                    return Ok((lo + target / coef).min(hi));
                }
                let arg = target * rate / (coef * (rate * lo).exp());
                Ok((lo + arg.ln_1p() / rate).min(hi))
            }
            PieceExpr::Poly { .. } => {
                if target <= 0.0 {
                    return Ok(lo);
                }
                let full = self.mass(lo, hi);
                if target >= full {
                    return Ok(hi);
                }
                find_root(|x| self.mass(lo, x) - target, Interval { lo, hi }, s)
            }
        }
    }

    // Sampled positivity check; exact for the closed forms.
    fn min_on(&self, lo: f64, hi: f64) -> f64 {
        match self {
            PieceExpr::Const { value } => *value,
            PieceExpr::Exp { coef, .. } => {
                if *coef <= 0.0 {
                    *coef
                } else {
                    self.eval(lo).min(self.eval(hi))
                }
            }
            PieceExpr::Poly { .. } => {
                let mut m = f64::INFINITY;
                for i in 0..=32 {
                    let x = lo + (hi - lo) * i as f64 / 32.0;
                    m = m.min(self.eval(x));
                }
                m
            }
        }
    }
}

/// One finite-interval piece of a piecewise density.
#[derive(Debug, Clone)]
pub struct Piece {
    pub iv: Interval,
    pub expr: PieceExpr,
}

/// Piecewise density; pieces are disjoint, ordered, finite intervals. Gaps
/// between consecutive pieces carry zero density and make the CDF flat.
#[derive(Debug, Clone)]
pub struct Piecewise {
    pieces: Vec<Piece>,
    /// Mass strictly before piece i; `cum[len]` is the total mass.
    cum: Vec<f64>,
    /// Mass of piece i and everything after it.
    cum_right: Vec<f64>,
    total: f64,
    positive: bool,
    bps: Vec<f64>,
    inv_settings: QuadSettings,
}

impl Piecewise {
    /// `mass_tol` bounds how far the total mass may sit from 1; constructions
    /// that truncate an infinite series document their deficit.
    pub fn new(pieces: Vec<Piece>, mass_tol: f64) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidSpec("piecewise density needs pieces".into()));
        }
        for p in &pieces {
            if !p.iv.is_finite() {
                return Err(Error::InvalidSpec(
                    "piecewise pieces must be finite intervals".into(),
                ));
            }
        }
        for w in pieces.windows(2) {
            if w[1].iv.lo < w[0].iv.hi - 1e-12 * w[0].iv.hi.abs().max(1.0) {
                return Err(Error::InvalidSpec(format!(
                    "pieces overlap near x = {}",
                    w[1].iv.lo
                )));
            }
        }

        let mut cum = Vec::with_capacity(pieces.len() + 1);
        cum.push(0.0);
        let mut positive = true;
        for (i, p) in pieces.iter().enumerate() {
            if p.expr.min_on(p.iv.lo, p.iv.hi) < -1e-12 {
                return Err(Error::InvalidSpec(format!(
                    "piece {i} has negative density"
                )));
            }
            if p.expr.min_on(p.iv.lo, p.iv.hi) <= 0.0 {
                positive = false;
            }
            if i + 1 < pieces.len() && pieces[i + 1].iv.lo > p.iv.hi + 1e-12 {
                positive = false; // interior gap
            }
            let m = p.expr.mass(p.iv.lo, p.iv.hi);
            cum.push(cum[i] + m);
        }
        let total = *cum.last().unwrap();
        if (total - 1.0).abs() > mass_tol {
            return Err(Error::InvalidSpec(format!(
                "piecewise total mass {total} differs from 1 beyond tolerance {mass_tol}"
            )));
        }

        let mut cum_right = vec![0.0; pieces.len() + 1];
        for i in (0..pieces.len()).rev() {
            cum_right[i] = cum_right[i + 1] + (cum[i + 1] - cum[i]);
        }

        let mut bps = Vec::with_capacity(2 * pieces.len());
        for p in &pieces {
            bps.push(p.iv.lo);
            bps.push(p.iv.hi);
        }
        bps.sort_by(f64::total_cmp);
        bps.dedup();

        Ok(Self {
            pieces,
            cum,
            cum_right,
            total,
            positive,
            bps,
            inv_settings: QuadSettings::default(),
        })
    }

    pub fn total_mass(&self) -> f64 {
        self.total
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    // Index of the piece whose interval starts at or before x; None if x
    // precedes everything.
    fn piece_at_or_before(&self, x: f64) -> Option<usize> {
        let k = self.pieces.partition_point(|p| p.iv.lo <= x);
        k.checked_sub(1)
    }
}

impl Distribution1D for Piecewise {
    fn density(&self, x: f64) -> f64 {
        match self.piece_at_or_before(x) {
            Some(i) if x < self.pieces[i].iv.hi => self.pieces[i].expr.eval(x),
            _ => 0.0,
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        match self.piece_at_or_before(x) {
            None => 0.0,
            Some(i) => {
                let p = &self.pieces[i];
                if x < p.iv.hi {
                    self.cum[i] + p.expr.mass(p.iv.lo, x)
                } else {
                    self.cum[i + 1]
                }
            }
        }
    }

    fn survival(&self, x: f64) -> f64 {
        match self.piece_at_or_before(x) {
            None => 1.0,
            Some(i) => {
                let p = &self.pieces[i];
                if x < p.iv.hi {
                    self.cum_right[i + 1] + p.expr.mass(x, p.iv.hi) + (1.0 - self.total)
                } else {
                    self.cum_right[i + 1] + (1.0 - self.total)
                }
            }
        }
    }

    fn quantile(&self, u: f64) -> Result<f64> {
        check_unit_open(u)?;
        if u >= self.total {
            // Only reachable within the documented truncation deficit.
            return Ok(self.pieces.last().unwrap().iv.hi);
        }
        // First piece with cumulative mass >= u.
        let i = self.cum[1..].partition_point(|&c| c < u);
        let p = &self.pieces[i];
        p.expr
            .invert_mass(p.iv.lo, p.iv.hi, u - self.cum[i], &self.inv_settings)
    }

    fn support(&self) -> Interval {
        Interval {
            lo: self.pieces.first().unwrap().iv.lo,
            hi: self.pieces.last().unwrap().iv.hi,
        }
    }

    fn has_positive_density(&self) -> bool {
        self.positive
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.bps.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate_with_breakpoints, QuadSettings};

    fn tent() -> Piecewise {
        // density 2x on [0, 1]
        Piecewise::new(
            vec![Piece {
                iv: Interval::new(0.0, 1.0).unwrap(),
                expr: PieceExpr::Poly {
                    coeffs: vec![0.0, 2.0],
                },
            }],
            1e-12,
        )
        .unwrap()
    }

    #[test]
    fn tent_cdf_and_quantile() {
        let d = tent();
        assert!((d.cdf(0.5) - 0.25).abs() < 1e-14);
        assert!((d.quantile(0.25).unwrap() - 0.5).abs() < 1e-9);
        assert!(d.has_positive_density() == false); // density 0 at x = 0
    }

    #[test]
    fn gapped_density_quantile_returns_left_edge() {
        // Halves on [0,1] and [2,3]; CDF flat on (1,2).
        let d = Piecewise::new(
            vec![
                Piece {
                    iv: Interval::new(0.0, 1.0).unwrap(),
                    expr: PieceExpr::Const { value: 0.5 },
                },
                Piece {
                    iv: Interval::new(2.0, 3.0).unwrap(),
                    expr: PieceExpr::Const { value: 0.5 },
                },
            ],
            1e-12,
        )
        .unwrap();
        assert!(!d.has_positive_density());
        // infimum of {x : F(x) >= 0.5} is x = 1
        assert!((d.quantile(0.5).unwrap() - 1.0).abs() < 1e-12);
        assert!((d.quantile(0.75).unwrap() - 2.5).abs() < 1e-12);
        assert_eq!(d.density(1.5), 0.0);
        assert!((d.cdf(1.7) - 0.5).abs() < 1e-15);
        assert!((d.survival(2.5) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn exp_pieces_integrate_to_cdf() {
        // e^{-x} on [0, 5] plus flat remainder mass on [5, 6].
        let tail = (-5.0_f64).exp();
        let d = Piecewise::new(
            vec![
                Piece {
                    iv: Interval::new(0.0, 5.0).unwrap(),
                    expr: PieceExpr::Exp {
                        coef: 1.0,
                        rate: -1.0,
                    },
                },
                Piece {
                    iv: Interval::new(5.0, 6.0).unwrap(),
                    expr: PieceExpr::Const { value: tail },
                },
            ],
            1e-12,
        )
        .unwrap();
        let s = QuadSettings::default();
        for x in [0.3, 1.0, 4.9, 5.5] {
            let num = integrate_with_breakpoints(
                |t| d.density(t),
                Interval::new(0.0, x).unwrap(),
                &d.breakpoints(),
                &s,
            )
            .unwrap();
            assert!((num.value - d.cdf(x)).abs() < 1e-10, "x = {x}");
        }
        // round trip through the quantile
        for u in [0.1, 0.6, 0.99, 0.999] {
            let x = d.quantile(u).unwrap();
            assert!((d.cdf(x) - u).abs() < 1e-10, "u = {u}");
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(Piecewise::new(vec![], 1e-9).is_err());
        // mass far from 1
        let r = Piecewise::new(
            vec![Piece {
                iv: Interval::new(0.0, 1.0).unwrap(),
                expr: PieceExpr::Const { value: 0.5 },
            }],
            1e-9,
        );
        assert!(r.is_err());
        // negative density
        let r = Piecewise::new(
            vec![Piece {
                iv: Interval::new(0.0, 1.0).unwrap(),
                expr: PieceExpr::Poly {
                    coeffs: vec![1.5, -2.0],
                },
            }],
            1e-9,
        );
        assert!(r.is_err());
        // overlapping pieces
        let r = Piecewise::new(
            vec![
                Piece {
                    iv: Interval::new(0.0, 1.0).unwrap(),
                    expr: PieceExpr::Const { value: 0.5 },
                },
                Piece {
                    iv: Interval::new(0.5, 1.5).unwrap(),
                    expr: PieceExpr::Const { value: 0.5 },
                },
            ],
            1e-9,
        );
        assert!(r.is_err());
    }
}
