//! The heavy-tailed relocation of the standard two-sided exponential: inside
//! `|x| < n` the density is untouched; for each block `k >= n` the mass of
//! `e^{-|x|}/2` on `[k, k+1)` is replaced by `e^{-|x|/2}/2` on `[x_k, k+1)`,
//! where `x_k` in `(k, k+1)` is chosen so block masses match. Chi-square
//! distance to the base law stays bounded below while the CDF distance
//! vanishes, which is what makes this family a useful stress case.

use super::piecewise::{Piece, PieceExpr, Piecewise};
use super::{Distribution1D};
use crate::error::{Error, Result};
use crate::numerics::Interval;

/// Left endpoint `x_k = k + 1 - 2 ln(1 + ((e-1)/2) e^{-(k+1)/2})` of the
/// relocated block for index `k`; always inside `(k, k+1)`.
pub fn tail_block_start(k: u32) -> f64 {
    let e = std::f64::consts::E;
    let c = (e - 1.0) / 2.0;
    (k as f64 + 1.0) - 2.0 * (c * (-(k as f64 + 1.0) / 2.0).exp()).ln_1p()
}

/// Exact chi-square of the relocated law against the two-sided exponential:
/// `2 sum_{k>=n} ln(1 + ((e-1)/2) e^{-(k+1)/2}) - e^{-n}`, summed to
/// convergence.
pub fn gn_chi_square_series(n: u32) -> f64 {
    let e = std::f64::consts::E;
    let c = (e - 1.0) / 2.0;
    let mut sum = 0.0;
    for k in n.. {
        let term = (c * (-(k as f64 + 1.0) / 2.0).exp()).ln_1p();
        sum += term;
        if term < 1e-18 {
            break;
        }
    }
    2.0 * sum - (-(n as f64)).exp()
}

/// The relocated-tail law for parameter `n >= 1`.
#[derive(Debug, Clone)]
pub struct GnLaw {
    law: Piecewise,
    n: u32,
    cut: u32,
    mass_deficit: f64,
}

/// Build the relocated-tail law. The infinite block sequence is cut once the
/// remaining blocks influence neither the mass nor the chi-square value
/// beyond 1e-12; the exact deficit is reported through
/// [`GnLaw::mass_deficit`].
pub fn make_gn(n: u32) -> Result<GnLaw> {
    if n < 1 {
        return Err(Error::Domain(format!("block relocation needs n >= 1, got {n}")));
    }
    // Residual mass beyond block K is e^{-(K+1)}; the chi-square series tail
    // decays like e^{-(K+2)/2} and needs K >= 57 to drop below 1e-12.
    let cut = n.max(57);
    let nf = n as f64;

    let mut pieces: Vec<Piece> = Vec::with_capacity(2 * (cut - n + 2) as usize);
    for k in (n..=cut).rev() {
        pieces.push(Piece {
            iv: Interval::new(-(k as f64 + 1.0), -tail_block_start(k))?,
            expr: PieceExpr::Exp {
                coef: 0.5,
                rate: 0.5,
            },
        });
    }
    pieces.push(Piece {
        iv: Interval::new(-nf, 0.0)?,
        expr: PieceExpr::Exp {
            coef: 0.5,
            rate: 1.0,
        },
    });
    pieces.push(Piece {
        iv: Interval::new(0.0, nf)?,
        expr: PieceExpr::Exp {
            coef: 0.5,
            rate: -1.0,
        },
    });
    for k in n..=cut {
        pieces.push(Piece {
            iv: Interval::new(tail_block_start(k), k as f64 + 1.0)?,
            expr: PieceExpr::Exp {
                coef: 0.5,
                rate: -0.5,
            },
        });
    }

    let law = Piecewise::new(pieces, 1e-9)?;
    Ok(GnLaw {
        law,
        n,
        cut,
        mass_deficit: (-(cut as f64 + 1.0)).exp(),
    })
}

impl GnLaw {
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Index of the last block kept.
    pub fn series_cut(&self) -> u32 {
        self.cut
    }

    /// Mass of the discarded blocks.
    pub fn mass_deficit(&self) -> f64 {
        self.mass_deficit
    }
}

impl Distribution1D for GnLaw {
    fn density(&self, x: f64) -> f64 {
        self.law.density(x)
    }
    fn cdf(&self, x: f64) -> f64 {
        self.law.cdf(x)
    }
    fn survival(&self, x: f64) -> f64 {
        self.law.survival(x)
    }
    fn quantile(&self, u: f64) -> Result<f64> {
        self.law.quantile(u)
    }
    fn support(&self) -> Interval {
        self.law.support()
    }
    fn has_positive_density(&self) -> bool {
        false
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.law.breakpoints()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate_with_breakpoints, QuadSettings};

    #[test]
    fn block_starts_sit_inside_their_intervals() {
        for k in 1..40 {
            let x = tail_block_start(k);
            assert!(x > k as f64 && x < k as f64 + 1.0, "k = {k}, x_k = {x}");
        }
        // pinned independent evaluation of the closed form
        assert!((tail_block_start(3) - 3.78001073479394499731).abs() < 1e-14);
        assert!((tail_block_start(2) - 2.64923786256780671798).abs() < 1e-14);
    }

    #[test]
    fn block_masses_match_the_base_law() {
        // mass of e^{-x/2}/2 on [x_k, k+1) equals mass of e^{-x}/2 on [k, k+1)
        for k in [1u32, 4, 9] {
            let xk = tail_block_start(k);
            let relocated = (-xk / 2.0).exp() - (-(k as f64 + 1.0) / 2.0).exp();
            let base = (-(k as f64)).exp() - (-(k as f64 + 1.0)).exp();
            assert!((relocated - base).abs() < 1e-15, "k = {k}");
        }
    }

    #[test]
    fn unit_mass_and_symmetry() {
        let d = make_gn(3).unwrap();
        let s = QuadSettings::default();
        let mass = integrate_with_breakpoints(
            |x| d.density(x),
            d.support(),
            &d.breakpoints(),
            &s,
        )
        .unwrap();
        assert!((mass.value - 1.0).abs() < 1e-9, "mass = {}", mass.value);
        assert!(d.mass_deficit() < 1e-24);
        // density is even
        for x in [0.5, 2.9, 3.5, 4.2] {
            assert_eq!(d.density(x), d.density(-x));
        }
    }

    #[test]
    fn matches_base_law_inside_the_untouched_zone() {
        let d = make_gn(3).unwrap();
        for x in [-2.9, -1.0, 0.0, 0.5, 2.5] {
            let base = 0.5 * (-x.abs() as f64).exp();
            assert!((d.density(x) - base).abs() < 1e-15);
        }
        // zero on the gap [n, x_n)
        assert_eq!(d.density(3.2), 0.0);
        assert!(d.density(tail_block_start(3) + 1e-9) > 0.0);
    }

    #[test]
    fn chi_square_series_reference_values() {
        // pinned 30-digit evaluations of the series
        assert!((gn_chi_square_series(2) - 0.786301106710344418793).abs() < 1e-13);
        assert!((gn_chi_square_series(5) - 0.207853195340786966868).abs() < 1e-13);
        assert!((gn_chi_square_series(8) - 0.048034196152373313178).abs() < 1e-13);
    }

    #[test]
    fn rejects_zero() {
        assert!(make_gn(0).is_err());
    }
}
