//! One-dimensional probability laws: analytic families, mixtures, piecewise
//! densities and the special CDF constructions, all exposing density, CDF,
//! quantile and median through one trait.

mod families;
mod gn;
mod mixture;
mod piecewise;
mod truncated;

pub use families::{gaussian, laplace, exponential, uniform, Exponential, Gaussian, Laplace, Uniform};
pub use gn::{gn_chi_square_series, make_gn, tail_block_start, GnLaw};
pub use mixture::{mixture, Mixture};
pub use piecewise::{Piece, PieceExpr, Piecewise};
pub use truncated::{truncate_cdf, CdfTruncated};

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{integrate_decaying, Interval, QuadSettings, DIVERGENCE_CAP};

/// A one-dimensional probability law.
///
/// `cdf` must be nondecreasing with limits 0 and 1; `quantile` is the
/// generalized inverse `u -> inf { x : F(x) >= u }`, so for flat CDF
/// stretches it returns the left endpoint of the level set.
pub trait Distribution1D: Send + Sync {
    fn density(&self, x: f64) -> f64;

    fn cdf(&self, x: f64) -> f64;

    /// `1 - cdf(x)`, overridden where a direct form keeps the right tail
    /// accurate.
    fn survival(&self, x: f64) -> f64 {
        1.0 - self.cdf(x)
    }

    /// Generalized inverse of the CDF, defined for u in (0, 1).
    fn quantile(&self, u: f64) -> Result<f64>;

    fn support(&self) -> Interval;

    /// True when the density is strictly positive on the interior of the
    /// support.
    fn has_positive_density(&self) -> bool;

    fn median(&self) -> Result<f64> {
        self.quantile(0.5)
    }

    /// Sorted locations where the density jumps or kinks; quadrature panels
    /// never straddle them.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

macro_rules! delegate_distribution {
    ($ty:ty) => {
        impl<D: Distribution1D + ?Sized> Distribution1D for $ty {
            fn density(&self, x: f64) -> f64 {
                (**self).density(x)
            }
            fn cdf(&self, x: f64) -> f64 {
                (**self).cdf(x)
            }
            fn survival(&self, x: f64) -> f64 {
                (**self).survival(x)
            }
            fn quantile(&self, u: f64) -> Result<f64> {
                (**self).quantile(u)
            }
            fn support(&self) -> Interval {
                (**self).support()
            }
            fn has_positive_density(&self) -> bool {
                (**self).has_positive_density()
            }
            fn median(&self) -> Result<f64> {
                (**self).median()
            }
            fn breakpoints(&self) -> Vec<f64> {
                (**self).breakpoints()
            }
        }
    };
}

delegate_distribution!(&D);
delegate_distribution!(Box<D>);
delegate_distribution!(Arc<D>);

/// Shared handle to a law; construction is the only mutation, so evaluation
/// is safe from any thread.
pub type Law = Arc<dyn Distribution1D>;

/// Wrap a concrete law into a shared handle.
pub fn law<D: Distribution1D + 'static>(d: D) -> Law {
    Arc::new(d)
}

pub(crate) fn check_unit_open(u: f64) -> Result<()> {
    if u > 0.0 && u < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("quantile level must lie in (0, 1), got {u}")))
    }
}

/// Truncation window `[Q(trunc_q), Q(1 - trunc_q)]`.
pub fn trunc_window<D: Distribution1D + ?Sized>(d: &D, s: &QuadSettings) -> Result<(f64, f64)> {
    let lo = d.quantile(s.trunc_q)?;
    let hi = d.quantile(1.0 - s.trunc_q)?;
    Ok((lo, hi))
}

/// Locations in (0, 1) where the quantile function of `d` may kink: the CDF
/// images of the density breakpoints.
pub fn quantile_kinks<D: Distribution1D + ?Sized>(d: &D) -> Vec<f64> {
    let mut ks: Vec<f64> = d
        .breakpoints()
        .iter()
        .map(|&x| d.cdf(x))
        .filter(|u| *u > 0.0 && *u < 1.0)
        .collect();
    ks.sort_by(f64::total_cmp);
    ks.dedup();
    ks
}

/// Mean by quadrature over the truncated support.
pub fn mean<D: Distribution1D + ?Sized>(d: &D, s: &QuadSettings) -> Result<f64> {
    let w = trunc_window(d, s)?;
    let bps = d.breakpoints();
    let r = integrate_decaying(
        |x| x * d.density(x),
        w,
        d.support(),
        &bps,
        s,
        DIVERGENCE_CAP,
    )?;
    if r.diverged {
        return Err(Error::Accuracy {
            best: r.value,
            error: f64::INFINITY,
        });
    }
    Ok(r.value)
}

/// Central moment of the given order by quadrature.
pub fn central_moment<D: Distribution1D + ?Sized>(
    d: &D,
    order: u32,
    s: &QuadSettings,
) -> Result<f64> {
    let m = mean(d, s)?;
    let w = trunc_window(d, s)?;
    let bps = d.breakpoints();
    let r = integrate_decaying(
        |x| (x - m).powi(order as i32) * d.density(x),
        w,
        d.support(),
        &bps,
        s,
        DIVERGENCE_CAP,
    )?;
    if r.diverged {
        return Err(Error::Accuracy {
            best: r.value,
            error: f64::INFINITY,
        });
    }
    Ok(r.value)
}

pub fn variance<D: Distribution1D + ?Sized>(d: &D, s: &QuadSettings) -> Result<f64> {
    central_moment(d, 2, s)
}

/// Serializable description of a law: family plus parameters. This is the
/// JSON input format of the command-line tool.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionSpec {
    Gaussian { params: GaussianParams },
    Laplace { params: LaplaceParams },
    Exponential { params: ExponentialParams },
    Uniform { params: UniformParams },
    Mixture { components: Vec<MixtureComponent> },
    Piecewise { pieces: Vec<PieceSpec> },
    GnExample { params: GnParams },
    Truncated { params: Box<TruncatedParams> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaussianParams {
    pub mean: f64,
    pub sd: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LaplaceParams {
    pub shift: f64,
    pub scale: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExponentialParams {
    pub rate: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UniformParams {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    pub spec: DistributionSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PieceSpec {
    pub lo: f64,
    pub hi: f64,
    pub expr: PieceExpr,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GnParams {
    pub n: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TruncatedParams {
    pub target: DistributionSpec,
    pub reference: DistributionSpec,
    pub n: u32,
}

/// Build a law from its serializable description with default settings.
pub fn make_family(spec: &DistributionSpec) -> Result<Law> {
    make_family_with(spec, &QuadSettings::default())
}

/// Build a law from its description; `s` controls numeric inversion for the
/// families without closed-form quantiles.
pub fn make_family_with(spec: &DistributionSpec, s: &QuadSettings) -> Result<Law> {
    match spec {
        DistributionSpec::Gaussian { params } => Ok(law(Gaussian::new(params.mean, params.sd)?)),
        DistributionSpec::Laplace { params } => Ok(law(Laplace::new(params.shift, params.scale)?)),
        DistributionSpec::Exponential { params } => Ok(law(Exponential::new(params.rate)?)),
        DistributionSpec::Uniform { params } => Ok(law(Uniform::new(params.lo, params.hi)?)),
        DistributionSpec::Mixture { components } => {
            let mut comps = Vec::with_capacity(components.len());
            for c in components {
                comps.push((c.weight, make_family_with(&c.spec, s)?));
            }
            Ok(law(mixture(comps, s)?))
        }
        DistributionSpec::Piecewise { pieces } => {
            let mut ps = Vec::with_capacity(pieces.len());
            for p in pieces {
                ps.push(Piece {
                    iv: Interval::new(p.lo, p.hi)?,
                    expr: p.expr.clone(),
                });
            }
            Ok(law(Piecewise::new(ps, 1e-9)?))
        }
        DistributionSpec::GnExample { params } => Ok(law(make_gn(params.n)?)),
        DistributionSpec::Truncated { params } => {
            let target = make_family_with(&params.target, s)?;
            let reference = make_family_with(&params.reference, s)?;
            Ok(law(truncate_cdf(target, reference, params.n)?))
        }
    }
}
