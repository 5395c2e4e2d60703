//! Distribution catalogue.
//!
//! Every law the measures, bounds and simulations consume lives here as a
//! [`Family`] variant wrapped in a validated [`DistributionModel`]. Models
//! are immutable once built and can be shared freely across threads.
//!
//! Quantiles are analytic wherever the distribution function inverts in
//! closed form; the gamma, inverse-gamma and general beta entries use a
//! safeguarded Newton iteration on the regularized incomplete function.

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::RandomStream;
use crate::sample::SampleData;
use crate::special::{beta_reg, gamma_lr, gamma_ur, inv_beta_reg, ln_beta, ln_gamma, norm_cdf,
    norm_pdf, norm_quantile};

/// The parametric families in the catalogue.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Family {
    Uniform { a: f64, b: f64 },
    Exponential { rate: f64 },
    /// `F(x) = 1 - exp(-rate · x^shape)`.
    Weibull { shape: f64, rate: f64 },
    Laplace { loc: f64, scale: f64 },
    Normal { mean: f64, sd: f64 },
    Gamma { shape: f64, rate: f64 },
    /// Density `scale^shape / Γ(shape) · x^(-shape-1) · exp(-scale/x)`.
    InvGamma { shape: f64, scale: f64 },
    Beta { a: f64, b: f64 },
    /// Density `1 / (x · ln(b/a))` on (a, b).
    Reciprocal { a: f64, b: f64 },
    /// Density `weights[j-1]` on `[j-1, j)`.
    Piecewise { weights: Vec<f64> },
    /// Density `shape/scale · (x/scale)^(shape-1)` on (0, scale).
    Power { shape: f64, scale: f64 },
    /// `F(x) = (x/scale)^shape / (1 + (x/scale)^shape)`.
    LogLogistic { scale: f64, shape: f64 },
    /// Lomax: density `shape/scale · (1 + x/scale)^(-shape-1)`.
    ParetoII { shape: f64, scale: f64 },
    /// `F(x) = 1 - ((1-x)/(1-a))^k` on (a, 1).
    AltPower { a: f64, k: f64 },
    /// Lognormal(mu, sigma) truncated to (a, b).
    TruncLogNormal { a: f64, b: f64, mu: f64, sigma: f64 },
    /// Law of `scale · X + shift` for a base model X; `scale` may be negative.
    Affine { base: Box<DistributionModel>, scale: f64, shift: f64 },
}

/// Interval `[lower, upper]`; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Support {
    pub lower: f64,
    pub upper: f64,
}

impl Support {
    pub fn contains(&self, x: f64) -> bool {
        x >= self.lower && x <= self.upper
    }

    pub fn is_bounded(&self) -> bool {
        self.lower.is_finite() && self.upper.is_finite()
    }
}

/// Which operations a model provides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Capabilities {
    pub pdf: bool,
    pub cdf: bool,
    pub quantile: bool,
    pub pdf_derivative: bool,
    pub sampler: bool,
}

/// How a density derivative was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DerivativeSource {
    Analytic,
    FiniteDifference,
}

/// Density derivative at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivative {
    pub value: f64,
    /// Set when `x` is a kink of the density; `value` is then the right derivative.
    pub one_sided: bool,
    pub source: DerivativeSource,
}

/// Measures a catalogue entry may know in closed form (weight φ(x) = x for
/// the weighted ones).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedMeasure {
    Extropy,
    Varextropy,
    WeightedExtropy,
    WeightedVarextropy,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionModel {
    name: String,
    family: Family,
    support: Support,
    capabilities: Capabilities,
    // Cached constants.
    #[serde(skip)]
    norm: f64,
    #[serde(skip)]
    aux: f64,
}

fn positive(model: &str, key: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(model, format!("{key} must be positive and finite, got {v}")))
    }
}

fn finite(model: &str, key: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(model, format!("{key} must be finite, got {v}")))
    }
}

impl DistributionModel {
    /// Validate parameters and build the model.
    pub fn new(family: Family) -> Result<Self> {
        use Family::*;
        let inf = f64::INFINITY;
        let mut norm = 0.0;
        let mut aux = 0.0;
        let (name, support) = match &family {
            Uniform { a, b } => {
                finite("uniform", "a", *a)?;
                finite("uniform", "b", *b)?;
                if b <= a {
                    return Err(Error::invalid("uniform", "requires a < b"));
                }
                ("uniform", (*a, *b))
            }
            Exponential { rate } => {
                positive("exp", "lambda", *rate)?;
                ("exp", (0.0, inf))
            }
            Weibull { shape, rate } => {
                positive("weibull", "alpha", *shape)?;
                positive("weibull", "lambda", *rate)?;
                ("weibull", (0.0, inf))
            }
            Laplace { loc, scale } => {
                finite("laplace", "mu", *loc)?;
                positive("laplace", "beta", *scale)?;
                ("laplace", (-inf, inf))
            }
            Normal { mean, sd } => {
                finite("normal", "mu", *mean)?;
                positive("normal", "sigma", *sd)?;
                ("normal", (-inf, inf))
            }
            Gamma { shape, rate } => {
                positive("gamma", "shape", *shape)?;
                positive("gamma", "rate", *rate)?;
                norm = shape * rate.ln() - ln_gamma(*shape);
                ("gamma", (0.0, inf))
            }
            InvGamma { shape, scale } => {
                positive("invgamma", "alpha", *shape)?;
                positive("invgamma", "beta", *scale)?;
                norm = shape * scale.ln() - ln_gamma(*shape);
                ("invgamma", (0.0, inf))
            }
            Beta { a, b } => {
                positive("beta", "a", *a)?;
                positive("beta", "b", *b)?;
                norm = -ln_beta(*a, *b);
                ("beta", (0.0, 1.0))
            }
            Reciprocal { a, b } => {
                positive("reciprocal", "a", *a)?;
                finite("reciprocal", "b", *b)?;
                if b <= a {
                    return Err(Error::invalid("reciprocal", "requires 0 < a < b"));
                }
                norm = (b / a).ln();
                ("reciprocal", (*a, *b))
            }
            Piecewise { weights } => {
                if weights.is_empty() {
                    return Err(Error::invalid("piecewise", "needs at least one weight"));
                }
                if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
                    return Err(Error::invalid("piecewise", "weights must be nonnegative"));
                }
                let s: f64 = weights.iter().sum();
                if (s - 1.0).abs() > 1e-9 {
                    return Err(Error::invalid("piecewise", format!("weights sum to {s}, not 1")));
                }
                ("piecewise", (0.0, weights.len() as f64))
            }
            Power { shape, scale } => {
                positive("power", "beta", *shape)?;
                positive("power", "scale", *scale)?;
                ("power", (0.0, *scale))
            }
            LogLogistic { scale, shape } => {
                positive("loglogistic", "scale", *scale)?;
                positive("loglogistic", "shape", *shape)?;
                ("loglogistic", (0.0, inf))
            }
            ParetoII { shape, scale } => {
                positive("pareto2", "alpha", *shape)?;
                positive("pareto2", "sigma", *scale)?;
                ("pareto2", (0.0, inf))
            }
            AltPower { a, k } => {
                positive("ak", "k", *k)?;
                finite("ak", "a", *a)?;
                if *a >= 1.0 {
                    return Err(Error::invalid("ak", "requires a < 1"));
                }
                ("ak", (*a, 1.0))
            }
            TruncLogNormal { a, b, mu, sigma } => {
                positive("tl", "a", *a)?;
                finite("tl", "b", *b)?;
                finite("tl", "mu", *mu)?;
                positive("tl", "sigma", *sigma)?;
                if b <= a {
                    return Err(Error::invalid("tl", "requires 0 < a < b"));
                }
                let lo = norm_cdf((a.ln() - mu) / sigma);
                let hi = norm_cdf((b.ln() - mu) / sigma);
                if hi - lo <= 0.0 {
                    return Err(Error::invalid("tl", "truncation interval has no mass"));
                }
                norm = hi - lo;
                aux = lo;
                ("tl", (*a, *b))
            }
            Affine { base, scale, shift } => {
                finite("affine", "scale", *scale)?;
                finite("affine", "shift", *shift)?;
                if *scale == 0.0 {
                    return Err(Error::invalid("affine", "scale must be nonzero"));
                }
                let s = base.support();
                let (l, u) = (scale * s.lower + shift, scale * s.upper + shift);
                ("affine", (l.min(u), l.max(u)))
            }
        };
        Ok(DistributionModel {
            name: name.to_string(),
            family,
            support: Support {
                lower: support.0,
                upper: support.1,
            },
            capabilities: Capabilities {
                pdf: true,
                cdf: true,
                quantile: true,
                pdf_derivative: true,
                sampler: true,
            },
            norm,
            aux,
        })
    }

    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        Self::new(Family::Uniform { a, b })
    }
    pub fn exponential(rate: f64) -> Result<Self> {
        Self::new(Family::Exponential { rate })
    }
    pub fn weibull(shape: f64, rate: f64) -> Result<Self> {
        Self::new(Family::Weibull { shape, rate })
    }
    pub fn laplace(loc: f64, scale: f64) -> Result<Self> {
        Self::new(Family::Laplace { loc, scale })
    }
    pub fn normal(mean: f64, sd: f64) -> Result<Self> {
        Self::new(Family::Normal { mean, sd })
    }
    pub fn gamma(shape: f64, rate: f64) -> Result<Self> {
        Self::new(Family::Gamma { shape, rate })
    }
    pub fn inv_gamma(shape: f64, scale: f64) -> Result<Self> {
        Self::new(Family::InvGamma { shape, scale })
    }
    pub fn beta(a: f64, b: f64) -> Result<Self> {
        Self::new(Family::Beta { a, b })
    }
    pub fn reciprocal(a: f64, b: f64) -> Result<Self> {
        Self::new(Family::Reciprocal { a, b })
    }
    pub fn piecewise(weights: Vec<f64>) -> Result<Self> {
        Self::new(Family::Piecewise { weights })
    }
    pub fn power(shape: f64, scale: f64) -> Result<Self> {
        Self::new(Family::Power { shape, scale })
    }
    pub fn log_logistic(scale: f64, shape: f64) -> Result<Self> {
        Self::new(Family::LogLogistic { scale, shape })
    }
    pub fn pareto2(shape: f64, scale: f64) -> Result<Self> {
        Self::new(Family::ParetoII { shape, scale })
    }
    pub fn alt_power(a: f64, k: f64) -> Result<Self> {
        Self::new(Family::AltPower { a, k })
    }
    pub fn trunc_lognormal(a: f64, b: f64) -> Result<Self> {
        Self::new(Family::TruncLogNormal {
            a,
            b,
            mu: 0.0,
            sigma: 1.0,
        })
    }
    /// Law of `scale · X + shift`.
    pub fn affine(&self, scale: f64, shift: f64) -> Result<Self> {
        Self::new(Family::Affine {
            base: Box::new(self.clone()),
            scale,
            shift,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn capabilities(&self) -> Capabilities {
        self.capabilities
    }

    /// Named parameters in canonical order.
    pub fn params(&self) -> Vec<(String, f64)> {
        use Family::*;
        let p = |k: &str, v: f64| (k.to_string(), v);
        match &self.family {
            Uniform { a, b } => vec![p("a", *a), p("b", *b)],
            Exponential { rate } => vec![p("lambda", *rate)],
            Weibull { shape, rate } => vec![p("alpha", *shape), p("lambda", *rate)],
            Laplace { loc, scale } => vec![p("mu", *loc), p("beta", *scale)],
            Normal { mean, sd } => vec![p("mu", *mean), p("sigma", *sd)],
            Gamma { shape, rate } => vec![p("shape", *shape), p("rate", *rate)],
            InvGamma { shape, scale } => vec![p("alpha", *shape), p("beta", *scale)],
            Beta { a, b } => vec![p("a", *a), p("b", *b)],
            Reciprocal { a, b } => vec![p("a", *a), p("b", *b)],
            Piecewise { weights } => weights
                .iter()
                .enumerate()
                .map(|(i, w)| p(&format!("a{}", i + 1), *w))
                .collect(),
            Power { shape, scale } => vec![p("beta", *shape), p("scale", *scale)],
            LogLogistic { scale, shape } => vec![p("scale", *scale), p("shape", *shape)],
            ParetoII { shape, scale } => vec![p("alpha", *shape), p("sigma", *scale)],
            AltPower { a, k } => vec![p("a", *a), p("k", *k)],
            TruncLogNormal { a, b, mu, sigma } => {
                vec![p("a", *a), p("b", *b), p("mu", *mu), p("sigma", *sigma)]
            }
            Affine { scale, shift, .. } => vec![p("scale", *scale), p("shift", *shift)],
        }
    }

    /// Interior points where the density or its derivative is not smooth.
    pub fn kinks(&self) -> Vec<f64> {
        use Family::*;
        match &self.family {
            Laplace { loc, .. } => vec![*loc],
            Piecewise { weights } => (1..weights.len()).map(|j| j as f64).collect(),
            Affine { base, scale, shift } => {
                base.kinks().into_iter().map(|k| scale * k + shift).collect()
            }
            _ => Vec::new(),
        }
    }

    /// Density; zero outside the support.
    pub fn pdf(&self, x: f64) -> f64 {
        use Family::*;
        if x.is_nan() || x < self.support.lower || x > self.support.upper {
            return 0.0;
        }
        match &self.family {
            Uniform { a, b } => 1.0 / (b - a),
            Exponential { rate } => rate * (-rate * x).exp(),
            Weibull { shape, rate } => {
                if x == 0.0 {
                    return if *shape == 1.0 {
                        *rate
                    } else if *shape < 1.0 {
                        f64::INFINITY
                    } else {
                        0.0
                    };
                }
                shape * rate * x.powf(shape - 1.0) * (-rate * x.powf(*shape)).exp()
            }
            Laplace { loc, scale } => (-(x - loc).abs() / scale).exp() / (2.0 * scale),
            Normal { mean, sd } => norm_pdf((x - mean) / sd) / sd,
            Gamma { shape, rate } => {
                if x == 0.0 {
                    return match shape.partial_cmp(&1.0) {
                        Some(std::cmp::Ordering::Equal) => *rate,
                        Some(std::cmp::Ordering::Less) => f64::INFINITY,
                        _ => 0.0,
                    };
                }
                (self.norm + (shape - 1.0) * x.ln() - rate * x).exp()
            }
            InvGamma { shape, scale } => {
                if x == 0.0 {
                    return 0.0;
                }
                (self.norm - (shape + 1.0) * x.ln() - scale / x).exp()
            }
            Beta { a, b } => {
                if (x == 0.0 && *a < 1.0) || (x == 1.0 && *b < 1.0) {
                    return f64::INFINITY;
                }
                if (x == 0.0 && *a > 1.0) || (x == 1.0 && *b > 1.0) {
                    return 0.0;
                }
                let la = if *a == 1.0 { 0.0 } else { (a - 1.0) * x.ln() };
                let lb = if *b == 1.0 { 0.0 } else { (b - 1.0) * (-x).ln_1p() };
                (self.norm + la + lb).exp()
            }
            Reciprocal { .. } => 1.0 / (x * self.norm),
            Piecewise { weights } => {
                let j = (x.floor() as usize).min(weights.len() - 1);
                weights[j]
            }
            Power { shape, scale } => {
                if x == 0.0 && *shape < 1.0 {
                    return f64::INFINITY;
                }
                shape / scale * (x / scale).powf(shape - 1.0)
            }
            LogLogistic { scale, shape } => {
                let z = x / scale;
                if x == 0.0 {
                    return if *shape > 1.0 {
                        0.0
                    } else if *shape == 1.0 {
                        1.0 / scale
                    } else {
                        f64::INFINITY
                    };
                }
                let zk = z.powf(*shape);
                (shape / scale) * z.powf(shape - 1.0) / ((1.0 + zk) * (1.0 + zk))
            }
            ParetoII { shape, scale } => shape / scale * (1.0 + x / scale).powf(-shape - 1.0),
            AltPower { a, k } => {
                if x == 1.0 && *k < 1.0 {
                    return f64::INFINITY;
                }
                k * (1.0 - x).powf(k - 1.0) / (1.0 - a).powf(*k)
            }
            TruncLogNormal { mu, sigma, .. } => {
                norm_pdf((x.ln() - mu) / sigma) / (x * sigma * self.norm)
            }
            Affine { base, scale, shift } => base.pdf((x - shift) / scale) / scale.abs(),
        }
    }

    /// Distribution function.
    pub fn cdf(&self, x: f64) -> f64 {
        use Family::*;
        if x.is_nan() {
            return f64::NAN;
        }
        if x <= self.support.lower {
            return 0.0;
        }
        if x >= self.support.upper {
            return 1.0;
        }
        match &self.family {
            Uniform { a, b } => (x - a) / (b - a),
            Exponential { rate } => -(-rate * x).exp_m1(),
            Weibull { shape, rate } => -(-rate * x.powf(*shape)).exp_m1(),
            Laplace { loc, scale } => {
                let z = (x - loc) / scale;
                if z < 0.0 {
                    0.5 * z.exp()
                } else {
                    1.0 - 0.5 * (-z).exp()
                }
            }
            Normal { mean, sd } => norm_cdf((x - mean) / sd),
            Gamma { shape, rate } => gamma_lr(*shape, rate * x),
            InvGamma { shape, scale } => gamma_ur(*shape, scale / x),
            Beta { a, b } => beta_reg(*a, *b, x),
            Reciprocal { a, .. } => (x / a).ln() / self.norm,
            Piecewise { weights } => {
                let j = (x.floor() as usize).min(weights.len() - 1);
                let below: f64 = weights[..j].iter().sum();
                below + weights[j] * (x - j as f64)
            }
            Power { shape, scale } => (x / scale).powf(*shape),
            LogLogistic { scale, shape } => {
                let zk = (x / scale).powf(*shape);
                zk / (1.0 + zk)
            }
            ParetoII { shape, scale } => 1.0 - (1.0 + x / scale).powf(-shape),
            AltPower { a, k } => 1.0 - ((1.0 - x) / (1.0 - a)).powf(*k),
            TruncLogNormal { mu, sigma, .. } => {
                ((norm_cdf((x.ln() - mu) / sigma) - self.aux) / self.norm).clamp(0.0, 1.0)
            }
            Affine { base, scale, shift } => {
                let z = (x - shift) / scale;
                if *scale > 0.0 {
                    base.cdf(z)
                } else {
                    1.0 - base.cdf(z)
                }
            }
        }
    }

    /// Survival function `1 - F(x)`, accurate in the right tail where it can be.
    pub fn sf(&self, x: f64) -> f64 {
        use Family::*;
        if x <= self.support.lower {
            return 1.0;
        }
        if x >= self.support.upper {
            return 0.0;
        }
        match &self.family {
            Exponential { rate } => (-rate * x).exp(),
            Weibull { shape, rate } => (-rate * x.powf(*shape)).exp(),
            Normal { mean, sd } => norm_cdf(-(x - mean) / sd),
            Gamma { shape, rate } => gamma_ur(*shape, rate * x),
            ParetoII { shape, scale } => (1.0 + x / scale).powf(-shape),
            LogLogistic { scale, shape } => 1.0 / (1.0 + (x / scale).powf(*shape)),
            AltPower { a, k } => ((1.0 - x) / (1.0 - a)).powf(*k),
            Laplace { loc, scale } if x > *loc => 0.5 * (-(x - loc) / scale).exp(),
            _ => 1.0 - self.cdf(x),
        }
    }

    /// Quantile function `Q(u) = inf{x : F(x) ≥ u}`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::Domain(format!("quantile level {u} outside [0, 1]")));
        }
        if u == 0.0 {
            return Ok(self.support.lower);
        }
        if u == 1.0 {
            return Ok(self.support.upper);
        }
        Ok(self.quantile_interior(u))
    }

    fn quantile_interior(&self, u: f64) -> f64 {
        use Family::*;
        match &self.family {
            Uniform { a, b } => a + u * (b - a),
            Exponential { rate } => -(-u).ln_1p() / rate,
            Weibull { shape, rate } => (-(-u).ln_1p() / rate).powf(1.0 / shape),
            Laplace { loc, scale } => {
                if u < 0.5 {
                    loc + scale * (2.0 * u).ln()
                } else {
                    loc - scale * (2.0 * (1.0 - u)).ln()
                }
            }
            Normal { mean, sd } => mean + sd * norm_quantile(u),
            Gamma { shape, rate } => gamma_quantile(*shape, u) / rate,
            InvGamma { shape, scale } => scale / gamma_quantile(*shape, 1.0 - u),
            Beta { a, b } => {
                if *b == 1.0 {
                    u.powf(1.0 / a)
                } else if *a == 1.0 {
                    -((1.0 / b) * (-u).ln_1p()).exp_m1()
                } else {
                    beta_quantile(*a, *b, self.norm, u)
                }
            }
            Reciprocal { a, .. } => a * (u * self.norm).exp(),
            Piecewise { weights } => {
                let mut acc = 0.0;
                for (j, w) in weights.iter().enumerate() {
                    if *w > 0.0 && acc + w >= u {
                        return j as f64 + (u - acc) / w;
                    }
                    acc += w;
                }
                weights.len() as f64
            }
            Power { shape, scale } => scale * u.powf(1.0 / shape),
            LogLogistic { scale, shape } => scale * (u / (1.0 - u)).powf(1.0 / shape),
            ParetoII { shape, scale } => scale * ((-(1.0 / shape) * (-u).ln_1p()).exp_m1()),
            AltPower { a, k } => 1.0 - (1.0 - a) * (1.0 - u).powf(1.0 / k),
            TruncLogNormal { mu, sigma, .. } => {
                let p = (self.aux + u * self.norm).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON);
                (mu + sigma * norm_quantile(p))
                    .exp()
                    .clamp(self.support.lower, self.support.upper)
            }
            Affine { base, scale, shift } => {
                let v = if *scale > 0.0 { u } else { 1.0 - u };
                scale * base.quantile_interior(v) + shift
            }
        }
    }

    /// Density derivative; see [`Derivative`] for the kink convention.
    pub fn pdf_derivative(&self, x: f64) -> Result<Derivative> {
        use Family::*;
        let s = self.support;
        if !(x > s.lower && x < s.upper) {
            return Err(Error::Domain(format!(
                "density derivative requested at {x}, outside the support interior"
            )));
        }
        let analytic = |value: f64| Derivative {
            value,
            one_sided: false,
            source: DerivativeSource::Analytic,
        };
        let f = self.pdf(x);
        let d = match &self.family {
            Uniform { .. } => analytic(0.0),
            Exponential { rate } => analytic(-rate * f),
            Weibull { shape, rate } => {
                analytic(f * ((shape - 1.0) / x - shape * rate * x.powf(shape - 1.0)))
            }
            Laplace { loc, scale } => {
                if x == *loc {
                    Derivative {
                        value: -f / scale,
                        one_sided: true,
                        source: DerivativeSource::Analytic,
                    }
                } else {
                    analytic(-(x - loc).signum() * f / scale)
                }
            }
            Normal { mean, sd } => analytic(-(x - mean) / (sd * sd) * f),
            Gamma { shape, rate } => analytic(f * ((shape - 1.0) / x - rate)),
            Beta { a, b } => analytic(f * ((a - 1.0) / x - (b - 1.0) / (1.0 - x))),
            Reciprocal { .. } => analytic(-f / x),
            Piecewise { .. } => Derivative {
                value: 0.0,
                one_sided: x.fract() == 0.0,
                source: DerivativeSource::Analytic,
            },
            Power { shape, .. } => analytic(f * (shape - 1.0) / x),
            ParetoII { shape, scale } => analytic(-(shape + 1.0) / (scale + x) * f),
            AltPower { k, .. } => analytic(-(k - 1.0) * f / (1.0 - x)),
            InvGamma { .. } | LogLogistic { .. } | TruncLogNormal { .. } => {
                let h = 1e-6f64.max(1e-6 * x.abs());
                let (lo, hi) = (x - h, x + h);
                let value = if lo > s.lower && hi < s.upper {
                    (self.pdf(hi) - self.pdf(lo)) / (2.0 * h)
                } else if hi < s.upper {
                    (self.pdf(hi) - f) / h
                } else {
                    (f - self.pdf(lo)) / h
                };
                Derivative {
                    value,
                    one_sided: false,
                    source: DerivativeSource::FiniteDifference,
                }
            }
            Affine { base, scale, shift } => {
                let inner = base.pdf_derivative((x - shift) / scale)?;
                Derivative {
                    value: inner.value / (scale * scale.abs()),
                    ..inner
                }
            }
        };
        Ok(d)
    }

    /// Mean, `+∞` when it diverges.
    pub fn mean(&self) -> f64 {
        use Family::*;
        match &self.family {
            Uniform { a, b } => 0.5 * (a + b),
            Exponential { rate } => 1.0 / rate,
            Weibull { shape, rate } => rate.powf(-1.0 / shape) * (ln_gamma(1.0 + 1.0 / shape)).exp(),
            Laplace { loc, .. } => *loc,
            Normal { mean, .. } => *mean,
            Gamma { shape, rate } => shape / rate,
            InvGamma { shape, scale } => {
                if *shape > 1.0 {
                    scale / (shape - 1.0)
                } else {
                    f64::INFINITY
                }
            }
            Beta { a, b } => a / (a + b),
            Reciprocal { a, b } => (b - a) / self.norm,
            Piecewise { weights } => weights
                .iter()
                .enumerate()
                .map(|(j, w)| w * (j as f64 + 0.5))
                .sum(),
            Power { shape, scale } => scale * shape / (shape + 1.0),
            LogLogistic { scale, shape } => {
                if *shape > 1.0 {
                    let t = PI / shape;
                    scale * t / t.sin()
                } else {
                    f64::INFINITY
                }
            }
            ParetoII { shape, scale } => {
                if *shape > 1.0 {
                    scale / (shape - 1.0)
                } else {
                    f64::INFINITY
                }
            }
            AltPower { a, k } => a + (1.0 - a) / (k + 1.0),
            TruncLogNormal { a, b, mu, sigma } => {
                let s2 = sigma * sigma;
                let hi = norm_cdf((b.ln() - mu - s2) / sigma);
                let lo = norm_cdf((a.ln() - mu - s2) / sigma);
                (mu + 0.5 * s2).exp() * (hi - lo) / self.norm
            }
            Affine { base, scale, shift } => scale * base.mean() + shift,
        }
    }

    /// Closed-form value of a measure (weight φ(x) = x for weighted ones),
    /// when the catalogue entry declares one.
    pub fn closed_form(&self, m: ClosedMeasure) -> Option<f64> {
        use ClosedMeasure::*;
        use Family::*;
        let sqrt3 = 3f64.sqrt();
        match (&self.family, m) {
            (Uniform { a, b }, Extropy) => Some(-0.5 / (b - a)),
            (Uniform { .. }, Varextropy) => Some(0.0),
            (Uniform { a, b }, WeightedExtropy) => Some(-(a + b) / (4.0 * (b - a))),
            (Uniform { a, b }, WeightedVarextropy) => {
                let w = b - a;
                Some((b.powi(3) - a.powi(3)) / (12.0 * w.powi(3)) - (a + b).powi(2) / (16.0 * w * w))
            }
            (Exponential { rate }, Extropy) => Some(-rate / 4.0),
            (Exponential { rate }, Varextropy) => Some(rate * rate / 48.0),
            (Exponential { .. }, WeightedExtropy) => Some(-1.0 / 8.0),
            (Exponential { .. }, WeightedVarextropy) => Some(5.0 / 1728.0),
            (Weibull { shape, .. }, WeightedExtropy) => Some(-shape / 8.0),
            (Weibull { shape, .. }, WeightedVarextropy) => Some(5.0 * shape * shape / 1728.0),
            (Laplace { scale, .. }, Extropy) => Some(-1.0 / (8.0 * scale)),
            (Laplace { scale, .. }, Varextropy) => Some(1.0 / (192.0 * scale * scale)),
            (Laplace { loc, scale }, WeightedExtropy) => Some(-loc / (8.0 * scale)),
            (Laplace { loc, scale }, WeightedVarextropy) => {
                Some(1.0 / 216.0 + loc * loc / (192.0 * scale * scale))
            }
            (Normal { sd, .. }, Extropy) => Some(-1.0 / (4.0 * sd * PI.sqrt())),
            (Normal { sd, .. }, Varextropy) => Some((sqrt3 / (24.0 * PI) - 1.0 / (16.0 * PI)) / (sd * sd)),
            (Normal { mean, sd }, WeightedExtropy) => Some(-mean / (4.0 * sd * PI.sqrt())),
            (Normal { mean, sd }, WeightedVarextropy) => {
                let r = mean / sd;
                Some(sqrt3 / (72.0 * PI) + r * r * (sqrt3 / (24.0 * PI) - 1.0 / (16.0 * PI)))
            }
            (Beta { a, b }, _) if *b == 1.0 || *a == 1.0 => {
                let (p, mirrored) = if *b == 1.0 { (*a, false) } else { (*b, true) };
                beta_one_closed(p, mirrored, m)
            }
            (Beta { a, b }, WeightedVarextropy) if *b == 2.0 => {
                let a = *a;
                Some(
                    a * a * (5.0 * a.powi(4) + 15.0 * a.powi(3) + 17.0 * a * a + 9.0 * a + 2.0)
                        / (48.0 * (9.0 * a * a + 9.0 * a + 2.0) * (2.0 * a + 1.0).powi(2)),
                )
            }
            (Beta { a, b }, WeightedVarextropy) if *a == 2.0 => {
                let a = *b;
                // Removable singularities of the rational form.
                if [1.0 / 3.0, 0.5, 2.0 / 3.0].iter().any(|s| (a - s).abs() < 1e-6) {
                    return None;
                }
                Some(
                    a * a
                        * (373.0 * a.powi(6) + 746.0 * a.powi(5) + 308.0 * a.powi(4)
                            - 130.0 * a.powi(3)
                            - 13.0 * a * a
                            + 104.0 * a
                            + 52.0)
                        / (48.0 * (81.0 * a.powi(4) - 45.0 * a * a + 4.0) * (4.0 * a * a - 1.0).powi(2)),
                )
            }
            (Reciprocal { a, b }, Extropy) => Some(-(1.0 / a - 1.0 / b) / (2.0 * self.norm.powi(2))),
            (Reciprocal { a, b }, Varextropy) => {
                let j = -(1.0 / a - 1.0 / b) / (2.0 * self.norm.powi(2));
                Some((1.0 / (a * a) - 1.0 / (b * b)) / (8.0 * self.norm.powi(3)) - j * j)
            }
            (Reciprocal { .. }, WeightedExtropy) => Some(-0.5 / self.norm),
            (Reciprocal { .. }, WeightedVarextropy) => Some(0.0),
            (Piecewise { weights }, _) => Some(piecewise_closed(weights, m)),
            (Power { shape, scale }, Extropy) if *shape > 0.5 => {
                Some(-0.5 * shape * shape / (scale * (2.0 * shape - 1.0)))
            }
            (Power { shape, .. }, WeightedExtropy) => Some(-shape / 4.0),
            (Power { shape, .. }, WeightedVarextropy) => Some(shape * shape / 48.0),
            _ => None,
        }
    }

    /// `n` inverse-CDF draws from `stream`.
    pub fn sample(&self, n: usize, stream: &mut RandomStream) -> Result<SampleData> {
        let values: Vec<f64> = (0..n).map(|_| self.draw(stream)).collect();
        SampleData::new(values)
    }

    /// One inverse-CDF draw.
    #[inline]
    pub fn draw(&self, stream: &mut RandomStream) -> f64 {
        self.quantile_interior(stream.next_open01())
    }
}

// Beta(p, 1) and, mirrored, Beta(1, p).
fn beta_one_closed(p: f64, mirrored: bool, m: ClosedMeasure) -> Option<f64> {
    use ClosedMeasure::*;
    match m {
        Extropy if p > 0.5 => Some(-p * p / (2.0 * (2.0 * p - 1.0))),
        Varextropy if p > 2.0 / 3.0 => {
            Some(p.powi(3) * (p - 1.0).powi(2) / (4.0 * (3.0 * p - 2.0) * (2.0 * p - 1.0).powi(2)))
        }
        WeightedExtropy if !mirrored => Some(-p / 4.0),
        WeightedExtropy if p > 0.5 => Some(-p / (4.0 * (2.0 * p - 1.0))),
        WeightedVarextropy if !mirrored => Some(p * p / 48.0),
        WeightedVarextropy if p > 2.0 / 3.0 => Some(
            p * p * (5.0 * p * p - 5.0 * p + 2.0)
                / (48.0 * (9.0 * p * p - 9.0 * p + 2.0) * (2.0 * p - 1.0).powi(2)),
        ),
        _ => None,
    }
}

fn piecewise_closed(a: &[f64], m: ClosedMeasure) -> f64 {
    use ClosedMeasure::*;
    let s2: f64 = a.iter().map(|x| x * x).sum();
    let s3: f64 = a.iter().map(|x| x * x * x).sum();
    let jw: f64 = -0.25
        * a.iter()
            .enumerate()
            .map(|(i, x)| (2.0 * (i + 1) as f64 - 1.0) * x * x)
            .sum::<f64>();
    match m {
        Extropy => -0.5 * s2,
        Varextropy => 0.25 * (s3 - s2 * s2),
        WeightedExtropy => jw,
        WeightedVarextropy => {
            let t: f64 = a
                .iter()
                .enumerate()
                .map(|(i, x)| {
                    let j = (i + 1) as f64;
                    (3.0 * j * j - 3.0 * j + 1.0) * x * x * x
                })
                .sum();
            t / 12.0 - jw * jw
        }
    }
}

/// Quantile of Gamma(shape, 1): Newton on the regularized incomplete gamma,
/// guarded by a bisection bracket, to 1e-12 relative.
pub fn gamma_quantile(shape: f64, u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return f64::INFINITY;
    }
    let ln_norm = -ln_gamma(shape);
    // Wilson–Hilferty start.
    let z = norm_quantile(u);
    let c = 1.0 / (9.0 * shape);
    let mut x = shape * (1.0 - c + z * c.sqrt()).powi(3);
    if !(x > 0.0) || !x.is_finite() {
        x = (u * (shape * ln_gamma(shape).exp())).powf(1.0 / shape).max(1e-300);
    }
    let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
    for _ in 0..200 {
        let f = gamma_lr(shape, x) - u;
        if f > 0.0 {
            hi = hi.min(x);
        } else {
            lo = lo.max(x);
        }
        let dens = (ln_norm + (shape - 1.0) * x.ln() - x).exp();
        let mut next = if dens > 0.0 { x - f / dens } else { f64::NAN };
        if !(next > lo && next < hi) || !next.is_finite() {
            next = if hi.is_finite() { 0.5 * (lo + hi) } else { 2.0 * x.max(1.0) };
        }
        if (next - x).abs() <= 1e-12 * x.abs().max(1e-300) {
            return next;
        }
        x = next;
    }
    x
}

fn beta_quantile(a: f64, b: f64, ln_norm: f64, u: f64) -> f64 {
    let mut x = inv_beta_reg(a, b, u).clamp(1e-300, 1.0 - 1e-16);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..100 {
        let f = beta_reg(a, b, x) - u;
        if f > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let dens = (ln_norm + (a - 1.0) * x.ln() + (b - 1.0) * (-x).ln_1p()).exp();
        let mut next = x - f / dens;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-14 {
            return next;
        }
        x = next;
    }
    x
}

impl fmt::Display for DistributionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Family::Piecewise { weights } = &self.family {
            let w: Vec<String> = weights.iter().map(|w| format!("{w}")).collect();
            return write!(f, "piecewise weights={}", w.join(","));
        }
        if let Family::Affine { base, scale, shift } = &self.family {
            return write!(f, "{scale}·({base}) + {shift}");
        }
        write!(f, "{}", self.name)?;
        for (k, v) in self.params() {
            write!(f, " {k}={v}")?;
        }
        Ok(())
    }
}
