//! Closed-form families: Gaussian, Laplace, exponential, uniform.

use super::{check_unit_open, law, Distribution1D, Law};
use crate::error::{Error, Result};
use crate::numerics::special::{norm_cdf, norm_pdf, norm_quantile, norm_sf};
use crate::numerics::Interval;

/// Normal law with the given mean and standard deviation.
#[derive(Debug, Clone, Copy)]
pub struct Gaussian {
    mean: f64,
    sd: f64,
}

impl Gaussian {
    pub fn new(mean: f64, sd: f64) -> Result<Self> {
        if !mean.is_finite() || !sd.is_finite() || sd <= 0.0 {
            return Err(Error::InvalidSpec(format!(
                "gaussian requires finite mean and sd > 0, got ({mean}, {sd})"
            )));
        }
        Ok(Self { mean, sd })
    }

    fn z(&self, x: f64) -> f64 {
        (x - self.mean) / self.sd
    }
}

impl Distribution1D for Gaussian {
    fn density(&self, x: f64) -> f64 {
        norm_pdf(self.z(x)) / self.sd
    }

    fn cdf(&self, x: f64) -> f64 {
        norm_cdf(self.z(x))
    }

    fn survival(&self, x: f64) -> f64 {
        norm_sf(self.z(x))
    }

    fn quantile(&self, u: f64) -> Result<f64> {
        check_unit_open(u)?;
        Ok(self.mean + self.sd * norm_quantile(u))
    }

    fn support(&self) -> Interval {
        Interval::REAL_LINE
    }

    fn has_positive_density(&self) -> bool {
        true
    }

    fn median(&self) -> Result<f64> {
        Ok(self.mean)
    }
}

/// Two-sided exponential law `exp(-|x - shift| / scale) / (2 scale)`.
#[derive(Debug, Clone, Copy)]
pub struct Laplace {
    shift: f64,
    scale: f64,
}

impl Laplace {
    pub fn new(shift: f64, scale: f64) -> Result<Self> {
        if !shift.is_finite() || !scale.is_finite() || scale <= 0.0 {
            return Err(Error::InvalidSpec(format!(
                "laplace requires finite shift and scale > 0, got ({shift}, {scale})"
            )));
        }
        Ok(Self { shift, scale })
    }
}

impl Distribution1D for Laplace {
    fn density(&self, x: f64) -> f64 {
        (-(x - self.shift).abs() / self.scale).exp() / (2.0 * self.scale)
    }

    fn cdf(&self, x: f64) -> f64 {
        let z = (x - self.shift) / self.scale;
        if z <= 0.0 {
            0.5 * z.exp()
        } else {
            1.0 - 0.5 * (-z).exp()
        }
    }

    fn survival(&self, x: f64) -> f64 {
        let z = (x - self.shift) / self.scale;
        if z >= 0.0 {
            0.5 * (-z).exp()
        } else {
            1.0 - 0.5 * z.exp()
        }
    }

    fn quantile(&self, u: f64) -> Result<f64> {
        check_unit_open(u)?;
        let z = if u <= 0.5 {
            (2.0 * u).ln()
        } else {
            -(2.0 * (1.0 - u)).ln()
        };
        Ok(self.shift + self.scale * z)
    }

    fn support(&self) -> Interval {
        Interval::REAL_LINE
    }

    fn has_positive_density(&self) -> bool {
        true
    }

    fn median(&self) -> Result<f64> {
        Ok(self.shift)
    }

    fn breakpoints(&self) -> Vec<f64> {
        vec![self.shift]
    }
}

/// Exponential law on `[0, inf)` with the given rate.
#[derive(Debug, Clone, Copy)]
pub struct Exponential {
    rate: f64,
}

impl Exponential {
    pub fn new(rate: f64) -> Result<Self> {
        if !rate.is_finite() || rate <= 0.0 {
            return Err(Error::InvalidSpec(format!(
                "exponential requires rate > 0, got {rate}"
            )));
        }
        Ok(Self { rate })
    }
}

impl Distribution1D for Exponential {
    fn density(&self, x: f64) -> f64 {
        if x < 0.0 {
            0.0
        } else {
            self.rate * (-self.rate * x).exp()
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            -(-self.rate * x).exp_m1()
        }
    }

    fn survival(&self, x: f64) -> f64 {
        if x <= 0.0 {
            1.0
        } else {
            (-self.rate * x).exp()
        }
    }

    fn quantile(&self, u: f64) -> Result<f64> {
        check_unit_open(u)?;
        Ok(-(-u).ln_1p() / self.rate)
    }

    fn support(&self) -> Interval {
        Interval {
            lo: 0.0,
            hi: f64::INFINITY,
        }
    }

    fn has_positive_density(&self) -> bool {
        true
    }

    fn breakpoints(&self) -> Vec<f64> {
        vec![0.0]
    }
}

/// Uniform law on `[lo, hi]`.
#[derive(Debug, Clone, Copy)]
pub struct Uniform {
    lo: f64,
    hi: f64,
}

impl Uniform {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || !(lo < hi) {
            return Err(Error::InvalidSpec(format!(
                "uniform requires finite lo < hi, got ({lo}, {hi})"
            )));
        }
        Ok(Self { lo, hi })
    }
}

impl Distribution1D for Uniform {
    fn density(&self, x: f64) -> f64 {
        if x >= self.lo && x <= self.hi {
            1.0 / (self.hi - self.lo)
        } else {
            0.0
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        ((x - self.lo) / (self.hi - self.lo)).clamp(0.0, 1.0)
    }

    fn survival(&self, x: f64) -> f64 {
        ((self.hi - x) / (self.hi - self.lo)).clamp(0.0, 1.0)
    }

    fn quantile(&self, u: f64) -> Result<f64> {
        check_unit_open(u)?;
        Ok(self.lo + u * (self.hi - self.lo))
    }

    fn support(&self) -> Interval {
        Interval {
            lo: self.lo,
            hi: self.hi,
        }
    }

    fn has_positive_density(&self) -> bool {
        true
    }

    fn breakpoints(&self) -> Vec<f64> {
        vec![self.lo, self.hi]
    }
}

pub fn gaussian(mean: f64, sd: f64) -> Result<Law> {
    Ok(law(Gaussian::new(mean, sd)?))
}

pub fn laplace(shift: f64, scale: f64) -> Result<Law> {
    Ok(law(Laplace::new(shift, scale)?))
}

pub fn exponential(rate: f64) -> Result<Law> {
    Ok(law(Exponential::new(rate)?))
}

pub fn uniform(lo: f64, hi: f64) -> Result<Law> {
    Ok(law(Uniform::new(lo, hi)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_basics() {
        let d = Gaussian::new(0.0, 1.0).unwrap();
        assert!((d.cdf(0.0) - 0.5).abs() < 1e-16);
        assert!((d.quantile(0.975).unwrap() - 1.95996398454005423552).abs() < 1e-13);
        assert!(Gaussian::new(0.0, 0.0).is_err());
        let d = Gaussian::new(3.0, 2.0).unwrap();
        assert_eq!(d.median().unwrap(), 3.0);
    }

    #[test]
    fn laplace_matches_closed_forms() {
        let d = Laplace::new(0.0, 1.0).unwrap();
        assert!((d.density(1.0) - 0.5 * (-1.0_f64).exp()).abs() < 1e-16);
        assert!((d.cdf(-1.0) - 0.5 * (-1.0_f64).exp()).abs() < 1e-16);
        assert_eq!(d.quantile(0.5).unwrap(), 0.0);

        // shifted CDF branches
        let m = 1.5;
        let g = Laplace::new(m, 1.0).unwrap();
        assert!((g.cdf(0.5) - 0.5 * (0.5 - m as f64).exp()).abs() < 1e-16);
        assert!((g.cdf(2.5) - (1.0 - 0.5 * (m - 2.5 as f64).exp())).abs() < 1e-16);
        // survival is exact in the right tail
        assert!((g.survival(40.0) - 0.5 * (m - 40.0 as f64).exp()).abs() < 1e-32);
    }

    #[test]
    fn exponential_quantile() {
        let d = Exponential::new(1.0).unwrap();
        let u = 1.0 - (-1.0_f64).exp();
        assert!((d.quantile(u).unwrap() - 1.0).abs() < 1e-14);
        assert!((d.median().unwrap() - std::f64::consts::LN_2).abs() < 1e-14);
    }

    #[test]
    fn uniform_round_trip() {
        let d = Uniform::new(-1.0, 3.0).unwrap();
        for u in [0.1, 0.5, 0.9] {
            let x = d.quantile(u).unwrap();
            assert!((d.cdf(x) - u).abs() < 1e-14);
        }
        assert!(d.quantile(0.0).is_err());
        assert!(d.quantile(1.0).is_err());
    }
}
