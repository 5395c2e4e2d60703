//! Extropy-type measures.
//!
//! With weight φ,
//!
//! * `J^w_φ(X)  = -½ ∫ φ f²`
//! * `VJ^w_φ(X) = ¼ ∫ φ² f³ - (J^w_φ(X))²`
//!
//! and φ = 1 gives the unweighted extropy `J` and varextropy `VJ`. Each
//! operation uses a catalogued closed form when one applies and adaptive
//! quadrature otherwise; the `*_quadrature` variants always integrate.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::bivariate::BivariateModel;
use crate::dist::{ClosedMeasure, DistributionModel};
use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_2d, QuadResult, QuadratureConfig};
use crate::special::ln_gamma;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// The weight φ.
#[derive(Clone)]
pub enum WeightFunction {
    One,
    Identity,
    Custom {
        label: String,
        eval: RealFn,
        deriv: Option<RealFn>,
    },
}

impl WeightFunction {
    pub fn custom(
        label: impl Into<String>,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        WeightFunction::Custom {
            label: label.into(),
            eval: Arc::new(eval),
            deriv: None,
        }
    }

    pub fn custom_with_derivative(
        label: impl Into<String>,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        deriv: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        WeightFunction::Custom {
            label: label.into(),
            eval: Arc::new(eval),
            deriv: Some(Arc::new(deriv)),
        }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            WeightFunction::One => 1.0,
            WeightFunction::Identity => x,
            WeightFunction::Custom { eval, .. } => eval(x),
        }
    }

    /// φ′(x), if known.
    pub fn deriv(&self, x: f64) -> Option<f64> {
        match self {
            WeightFunction::One => Some(0.0),
            WeightFunction::Identity => Some(1.0),
            WeightFunction::Custom { deriv, .. } => deriv.as_ref().map(|d| d(x)),
        }
    }

    pub fn label(&self) -> &str {
        match self {
            WeightFunction::One => "one",
            WeightFunction::Identity => "x",
            WeightFunction::Custom { label, .. } => label,
        }
    }
}

impl fmt::Debug for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeightFunction({})", self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasureValue {
    pub value: f64,
    pub method: Method,
    pub est_abs_error: f64,
}

impl MeasureValue {
    fn closed(value: f64) -> Self {
        MeasureValue {
            value,
            method: Method::ClosedForm,
            est_abs_error: 0.0,
        }
    }

    fn quad(value: f64, est_abs_error: f64) -> Self {
        MeasureValue {
            value,
            method: Method::Quadrature,
            est_abs_error,
        }
    }
}

/// Clamp rounding-level negatives of a variance-type quantity to zero.
pub(crate) fn checked_variance(v: f64) -> Result<f64> {
    if v >= 0.0 {
        Ok(v)
    } else if v >= -1e-9 {
        Ok(0.0)
    } else {
        Err(Error::NegativeVariance(v))
    }
}

/// `∫ h` over the model's support with its kinks as breakpoints.
pub(crate) fn integrate_over(
    model: &DistributionModel,
    lower: f64,
    upper: f64,
    h: impl Fn(f64) -> f64,
    cfg: &QuadratureConfig,
) -> Result<QuadResult> {
    let kinks: Vec<f64> = model
        .kinks()
        .into_iter()
        .filter(|k| *k > lower && *k < upper)
        .collect();
    integrate(h, lower, upper, &kinks, cfg)
}

/// `∫ h(u) du` over (0, 1) with the images of the kinks as breakpoints.
pub(crate) fn integrate_unit(
    model: &DistributionModel,
    h: impl Fn(f64) -> f64,
    cfg: &QuadratureConfig,
) -> Result<QuadResult> {
    let kinks: Vec<f64> = model
        .kinks()
        .into_iter()
        .map(|k| model.cdf(k))
        .filter(|u| *u > 0.0 && *u < 1.0)
        .collect();
    integrate(h, 0.0, 1.0, &kinks, cfg)
}

fn closed_for(model: &DistributionModel, phi: &WeightFunction, variance: bool) -> Option<f64> {
    let m = match (phi, variance) {
        (WeightFunction::One, false) => ClosedMeasure::Extropy,
        (WeightFunction::One, true) => ClosedMeasure::Varextropy,
        (WeightFunction::Identity, false) => ClosedMeasure::WeightedExtropy,
        (WeightFunction::Identity, true) => ClosedMeasure::WeightedVarextropy,
        _ => return None,
    };
    model.closed_form(m)
}

/// `(∫ φ f², ∫ φ² f³)` over `[lower, upper]`.
fn moments(
    model: &DistributionModel,
    phi: &WeightFunction,
    lower: f64,
    upper: f64,
    cfg: &QuadratureConfig,
) -> Result<(QuadResult, QuadResult)> {
    let b = integrate_over(
        model,
        lower,
        upper,
        |x| {
            let f = model.pdf(x);
            if f == 0.0 {
                0.0
            } else {
                phi.eval(x) * f * f
            }
        },
        cfg,
    )?;
    let a = integrate_over(
        model,
        lower,
        upper,
        |x| {
            let f = model.pdf(x);
            if f == 0.0 {
                0.0
            } else {
                let p = phi.eval(x);
                p * p * f * f * f
            }
        },
        cfg,
    )?;
    Ok((b, a))
}

fn variance_from(a: &QuadResult, b: &QuadResult, sa: f64, sb: f64) -> Result<MeasureValue> {
    // ¼ (A/sa) - ¼ (B/sb)²
    let j = -0.5 * b.value / sb;
    let v = 0.25 * a.value / sa - j * j;
    let err = 0.25 * a.abs_error / sa + j.abs() * b.abs_error / sb;
    Ok(MeasureValue::quad(checked_variance(v)?, err))
}

/// `J(X) = -½ ∫ f²`.
pub fn extropy(model: &DistributionModel, cfg: &QuadratureConfig) -> Result<MeasureValue> {
    weighted_extropy(model, &WeightFunction::One, cfg)
}

/// `J^w_φ(X) = -½ ∫ φ f²`.
pub fn weighted_extropy(
    model: &DistributionModel,
    phi: &WeightFunction,
    cfg: &QuadratureConfig,
) -> Result<MeasureValue> {
    match closed_for(model, phi, false) {
        Some(v) => Ok(MeasureValue::closed(v)),
        None => weighted_extropy_quadrature(model, phi, cfg),
    }
}

pub fn weighted_extropy_quadrature(
    model: &DistributionModel,
    phi: &WeightFunction,
    cfg: &QuadratureConfig,
) -> Result<MeasureValue> {
    let s = model.support();
    let b = integrate_over(
        model,
        s.lower,
        s.upper,
        |x| {
            let f = model.pdf(x);
            if f == 0.0 {
                0.0
            } else {
                phi.eval(x) * f * f
            }
        },
        cfg,
    )?;
    Ok(MeasureValue::quad(-0.5 * b.value, 0.5 * b.abs_error))
}

/// `VJ(X) = ¼ ∫ f³ - J²`.
pub fn varextropy(model: &DistributionModel, cfg: &QuadratureConfig) -> Result<MeasureValue> {
    weighted_varextropy(model, &WeightFunction::One, cfg)
}

/// `VJ^w_φ(X) = ¼ ∫ φ² f³ - (J^w_φ)²`.
pub fn weighted_varextropy(
    model: &DistributionModel,
    phi: &WeightFunction,
    cfg: &QuadratureConfig,
) -> Result<MeasureValue> {
    match closed_for(model, phi, true) {
        Some(v) => Ok(MeasureValue::closed(v)),
        None => weighted_varextropy_quadrature(model, phi, cfg),
    }
}

pub fn weighted_varextropy_quadrature(
    model: &DistributionModel,
    phi: &WeightFunction,
    cfg: &QuadratureConfig,
) -> Result<MeasureValue> {
    let s = model.support();
    let (b, a) = moments(model, phi, s.lower, s.upper, cfg)?;
    variance_from(&a, &b, 1.0, 1.0)
}

/// `VJ^w(X)` through the quantile function:
/// `¼ (∫ Q² f(Q)² du - (∫ Q f(Q) du)²)`.
pub fn weighted_varextropy_quantile_form(
    model: &DistributionModel,
    cfg: &QuadratureConfig,
) -> Result<MeasureValue> {
    let qf = |u: f64| {
        let q = model.quantile(u).unwrap_or(f64::NAN);
        (q, model.pdf(q))
    };
    let b = integrate_unit(
        model,
        |u| {
            let (q, f) = qf(u);
            if f == 0.0 {
                0.0
            } else {
                q * f
            }
        },
        cfg,
    )?;
    let a = integrate_unit(
        model,
        |u| {
            let (q, f) = qf(u);
            if f == 0.0 {
                0.0
            } else {
                q * q * f * f
            }
        },
        cfg,
    )?;
    let v = 0.25 * (a.value - b.value * b.value);
    let err = 0.25 * a.abs_error + 0.5 * b.value.abs() * b.abs_error;
    Ok(MeasureValue::quad(checked_variance(v)?, err))
}

fn require_nonnegative(model: &DistributionModel, what: &str) -> Result<()> {
    if model.support().lower < 0.0 {
        return Err(Error::Domain(format!(
            "{what} needs a nonnegative support; `{}` starts at {}",
            model.name(),
            model.support().lower
        )));
    }
    Ok(())
}

/// `VJ^w` of the equilibrium law with density `F̄(x)/μ`, by the quantile
/// form `¼ [∫ (1-u)³ Q²/(μ³ f(Q)) du - (∫ (1-u)² Q/(μ² f(Q)) du)²]`.
pub fn equilibrium_weighted_varextropy(
    model: &DistributionModel,
    cfg: &QuadratureConfig,
) -> Result<MeasureValue> {
    require_nonnegative(model, "the equilibrium law")?;
    let mu = model.mean();
    if !mu.is_finite() || mu <= 0.0 {
        return Err(Error::Domain(format!(
            "the equilibrium law needs a finite positive mean, got {mu}"
        )));
    }
    let qf = |u: f64| {
        let q = model.quantile(u).unwrap_or(f64::NAN);
        (q, model.pdf(q))
    };
    let b = integrate_unit(
        model,
        |u| {
            let (q, f) = qf(u);
            if q == 0.0 {
                0.0
            } else {
                (1.0 - u).powi(2) * q / (mu * mu * f)
            }
        },
        cfg,
    )?;
    let a = integrate_unit(
        model,
        |u| {
            let (q, f) = qf(u);
            if q == 0.0 {
                0.0
            } else {
                (1.0 - u).powi(3) * q * q / (mu.powi(3) * f)
            }
        },
        cfg,
    )?;
    let v = 0.25 * (a.value - b.value * b.value);
    let err = 0.25 * a.abs_error + 0.5 * b.value.abs() * b.abs_error;
    Ok(MeasureValue::quad(checked_variance(v)?, err))
}

/// `VJ^w` of the δ-weighted law `δ f / E[δ(X)]`, computed as
/// `Var_Y[Y δ(Y) f(Y)] / (4 E²[δ(X)])` with the variance under the weighted law.
pub fn weighted_law_varextropy(
    model: &DistributionModel,
    delta: &WeightFunction,
    cfg: &QuadratureConfig,
) -> Result<MeasureValue> {
    let s = model.support();
    let grid_ok = (1..100).all(|i| {
        let x = model.quantile(i as f64 / 100.0).unwrap_or(f64::NAN);
        delta.eval(x) >= 0.0
    });
    if !grid_ok {
        return Err(Error::Domain(format!("weight `{}` is negative on the support", delta.label())));
    }
    let c = integrate_over(model, s.lower, s.upper, |x| delta.eval(x) * model.pdf(x), cfg)?;
    if !(c.value > 0.0) || !c.value.is_finite() {
        return Err(Error::Domain(format!(
            "weight `{}` has expectation {} under `{}`",
            delta.label(),
            c.value,
            model.name()
        )));
    }
    let h = |x: f64| x * delta.eval(x) * model.pdf(x);
    let wy = |x: f64| delta.eval(x) * model.pdf(x) / c.value;
    let m1 = integrate_over(
        model,
        s.lower,
        s.upper,
        |x| {
            let w = wy(x);
            if w == 0.0 {
                0.0
            } else {
                h(x) * w
            }
        },
        cfg,
    )?;
    let m2 = integrate_over(
        model,
        s.lower,
        s.upper,
        |x| {
            let w = wy(x);
            if w == 0.0 {
                0.0
            } else {
                h(x) * h(x) * w
            }
        },
        cfg,
    )?;
    let var = m2.value - m1.value * m1.value;
    let scale = 0.25 / (c.value * c.value);
    let err = scale * (m2.abs_error + 2.0 * m1.value.abs() * m1.abs_error)
        + 2.0 * scale * var.abs() * c.abs_error / c.value;
    Ok(MeasureValue::quad(checked_variance(scale * var)?, err))
}

/// `VJ^w(g(X)) = ¼ Var[g(X) f(X) / g′(X)]` for strictly increasing `g`.
pub fn transform_weighted_varextropy(
    model: &DistributionModel,
    g: &dyn Fn(f64) -> f64,
    g_prime: &dyn Fn(f64) -> f64,
    cfg: &QuadratureConfig,
) -> Result<MeasureValue> {
    let mut prev = f64::NEG_INFINITY;
    for i in 1..200 {
        let x = model.quantile(i as f64 / 200.0).unwrap_or(f64::NAN);
        let (gx, d) = (g(x), g_prime(x));
        if !(gx > prev) || !(d > 0.0) {
            return Err(Error::Domain(format!(
                "transform is not strictly increasing near x = {x}"
            )));
        }
        prev = gx;
    }
    let s = model.support();
    let h = |x: f64| {
        let f = model.pdf(x);
        if f == 0.0 {
            0.0
        } else {
            g(x) * f / g_prime(x)
        }
    };
    let m1 = integrate_over(model, s.lower, s.upper, |x| h(x) * model.pdf(x), cfg)?;
    let m2 = integrate_over(
        model,
        s.lower,
        s.upper,
        |x| {
            let v = h(x);
            v * v * model.pdf(x)
        },
        cfg,
    )?;
    let v = 0.25 * (m2.value - m1.value * m1.value);
    let err = 0.25 * m2.abs_error + 0.5 * m1.value.abs() * m1.abs_error;
    Ok(MeasureValue::quad(checked_variance(v)?, err))
}

/// `(1/16) [∫∫ x² y² f³ - (∫∫ x y f²)²]`.
pub fn bivariate_weighted_varextropy(
    joint: &BivariateModel,
    cfg: &QuadratureConfig,
) -> Result<MeasureValue> {
    let (sx, sy) = joint.support();
    let xr = (sx.lower, sx.upper);
    let yr = (sy.lower, sy.upper);
    let b = integrate_2d(
        |x, y| {
            let f = joint.joint_pdf(x, y);
            if f == 0.0 {
                0.0
            } else {
                x * y * f * f
            }
        },
        xr,
        yr,
        cfg,
    )?;
    let a = integrate_2d(
        |x, y| {
            let f = joint.joint_pdf(x, y);
            if f == 0.0 {
                0.0
            } else {
                x * x * y * y * f * f * f
            }
        },
        xr,
        yr,
        cfg,
    )?;
    let v = (a.value - b.value * b.value) / 16.0;
    let err = (a.abs_error + 2.0 * b.value.abs() * b.abs_error) / 16.0;
    Ok(MeasureValue::quad(checked_variance(v)?, err))
}

/// `VJ^w(X)[VJ^w(Y) + (J^w(Y))²] + (J^w(X))² VJ^w(Y)` for independent X, Y.
pub fn independent_bivariate_decomposition(
    x: &DistributionModel,
    y: &DistributionModel,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let id = WeightFunction::Identity;
    let vx = weighted_varextropy(x, &id, cfg)?.value;
    let vy = weighted_varextropy(y, &id, cfg)?.value;
    let jx = weighted_extropy(x, &id, cfg)?.value;
    let jy = weighted_extropy(y, &id, cfg)?.value;
    Ok(vx * (vy + jy * jy) + jx * jx * vy)
}

/// Weighted residual varextropy `VJ^w_φ(X_t)`.
pub fn residual_weighted_varextropy(
    model: &DistributionModel,
    phi: &WeightFunction,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<MeasureValue> {
    require_nonnegative(model, "the residual measure")?;
    let s = model.support();
    let sf = model.sf(t);
    if !(sf > 0.0) {
        return Err(Error::Domain(format!("survival function vanishes at t = {t}")));
    }
    let lo = t.max(s.lower);
    let (b, a) = moments(model, phi, lo, s.upper, cfg)?;
    variance_from(&a, &b, sf.powi(3), sf * sf)
}

/// Weighted past varextropy `VJ^w_φ(X_(t))`.
pub fn past_weighted_varextropy(
    model: &DistributionModel,
    phi: &WeightFunction,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<MeasureValue> {
    require_nonnegative(model, "the past measure")?;
    let s = model.support();
    let cdf = model.cdf(t);
    if !(cdf > 0.0) {
        return Err(Error::Domain(format!("distribution function vanishes at t = {t}")));
    }
    let hi = t.min(s.upper);
    let (b, a) = moments(model, phi, s.lower, hi, cfg)?;
    variance_from(&a, &b, cdf.powi(3), cdf * cdf)
}

/// Weighted residual extropy `J^w_φ(X_t) = -½ ∫_t^∞ φ f² / F̄²(t)`.
pub fn residual_weighted_extropy(
    model: &DistributionModel,
    phi: &WeightFunction,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<MeasureValue> {
    require_nonnegative(model, "the residual measure")?;
    let s = model.support();
    let sf = model.sf(t);
    if !(sf > 0.0) {
        return Err(Error::Domain(format!("survival function vanishes at t = {t}")));
    }
    let (b, _) = moments(model, phi, t.max(s.lower), s.upper, cfg)?;
    Ok(MeasureValue::quad(-0.5 * b.value / (sf * sf), 0.5 * b.abs_error / (sf * sf)))
}

/// Threshold for local monotonicity of `t ↦ VJ^w_φ(X_t)`:
/// `φ²(t) r²(t)/12 + J (J + φ(t) r(t))/3` with `J = J^w_φ(X_t)` and hazard
/// rate `r`. The residual measure is increasing at t iff it is at least
/// this value.
pub fn residual_monotonicity_rhs(
    model: &DistributionModel,
    phi: &WeightFunction,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let sf = model.sf(t);
    if !(sf > 0.0) {
        return Err(Error::Domain(format!("survival function vanishes at t = {t}")));
    }
    let r = model.pdf(t) / sf;
    let p = phi.eval(t);
    let j = residual_weighted_extropy(model, phi, t, cfg)?.value;
    Ok(p * p * r * r / 12.0 + j * (j + p * r) / 3.0)
}

/// Mean residual life `m(t) = ∫_t^∞ F̄ / F̄(t)`.
pub fn mean_residual_life(
    model: &DistributionModel,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let sf = model.sf(t);
    if !(sf > 0.0) {
        return Err(Error::Domain(format!("survival function vanishes at t = {t}")));
    }
    let tail = tail_integral(model, t, cfg)?;
    if !tail.is_finite() {
        return Err(Error::Domain(format!("mean residual life diverges at t = {t}")));
    }
    Ok(tail / sf)
}

fn tail_integral(model: &DistributionModel, t: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let s = model.support();
    let lo = t.max(s.lower);
    Ok(integrate_over(model, lo, s.upper, |y| model.sf(y), cfg)?.value + (lo - t).max(0.0))
}

/// Upper bound on `VJ^w_φ(X_t)` through the mean residual life:
///
/// `F̄(t)^-2 E{[φ f′ + φ′ f]²(X_t + t) · (m(t + X_t) - m(t) + X_t) / r(t + X_t)}`.
pub fn residual_mrl_upper_bound(
    model: &DistributionModel,
    phi: &WeightFunction,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<MeasureValue> {
    require_nonnegative(model, "the residual bound")?;
    let s = model.support();
    let sf_t = model.sf(t);
    if !(sf_t > 0.0) {
        return Err(Error::Domain(format!("survival function vanishes at t = {t}")));
    }
    if phi.deriv(t.max(s.lower)).is_none() {
        return Err(Error::Domain(format!(
            "weight `{}` has no derivative; the bound needs φ′",
            phi.label()
        )));
    }
    let m_t = mean_residual_life(model, t, cfg)?;
    let inner = cfg.tightened(0.1);
    let failure = std::cell::Cell::new(None::<Error>);
    let lo = t.max(s.lower);
    // With 1/r = F̄/f, the integrand collapses to
    // [φ f′ + φ′ f]² (∫_x^∞ F̄ + (x - t - m(t)) F̄(x)) / F̄(t)³.
    let integrand = |x: f64| {
        let f = model.pdf(x);
        let sf = model.sf(x);
        if f == 0.0 || sf == 0.0 {
            return 0.0;
        }
        let d = match model.pdf_derivative(x) {
            Ok(d) => d.value,
            Err(e) => {
                failure.set(Some(e));
                return 0.0;
            }
        };
        let tail = match integrate_over(model, x, s.upper, |y| model.sf(y), &inner) {
            Ok(r) => r.value,
            Err(e) => {
                failure.set(Some(e));
                return 0.0;
            }
        };
        let k = phi.eval(x) * d + phi.deriv(x).unwrap_or(0.0) * f;
        k * k * (tail + (x - t - m_t) * sf)
    };
    let r = integrate_over(model, lo, s.upper, integrand, cfg)?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let norm = sf_t.powi(3);
    Ok(MeasureValue::quad(r.value / norm, r.abs_error / norm))
}

/// Lower bound `11/(512π) + μ²/(128 σ² π)` for `VJ^w` of normal(μ, σ).
pub fn normal_lower_bound(mu: f64, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) || !sigma.is_finite() || !mu.is_finite() {
        return Err(Error::Domain(format!("normal bound needs σ > 0, got σ = {sigma}")));
    }
    let pi = std::f64::consts::PI;
    Ok(11.0 / (512.0 * pi) + mu * mu / (128.0 * sigma * sigma * pi))
}

/// Lower bound for `VJ^w` of the inverse gamma law (free of the scale β):
/// `P(α) Γ(α - 3/2)² / (512 π (α - 1) Γ(α)²)` with
/// `P(α) = 4α⁵ + 15α⁴ - 961α³ + 7575α² - 22317α + 21636`.
pub fn invgamma_lower_bound(alpha: f64, beta: f64) -> Result<f64> {
    if !(alpha > 1.5) || !alpha.is_finite() {
        return Err(Error::Domain(format!("inverse gamma bound needs α > 3/2, got {alpha}")));
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::Domain(format!("inverse gamma bound needs β > 0, got {beta}")));
    }
    let a = alpha;
    let p = (((((4.0 * a + 15.0) * a - 961.0) * a + 7575.0) * a - 22317.0) * a) + 21636.0;
    let lg = 2.0 * (ln_gamma(a - 1.5) - ln_gamma(a));
    Ok(p * lg.exp() / (512.0 * std::f64::consts::PI * (a - 1.0)))
}

/// True when the closed-form table was used for a measure of `model`.
pub fn has_closed_form(model: &DistributionModel, phi: &WeightFunction, variance: bool) -> bool {
    closed_for(model, phi, variance).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn extropy_examples() {
        let u = DistributionModel::uniform(0.0, 1.0).unwrap();
        assert_eq!(extropy(&u, &cfg()).unwrap().value, -0.5);
        let e = DistributionModel::exponential(1.0).unwrap();
        assert!(close(extropy_q(&e), -0.25, 1e-10));
        let b = DistributionModel::beta(2.0, 1.0).unwrap();
        assert!(close(extropy_q(&b), -2.0 / 3.0, 1e-10));
        assert!(close(extropy(&b, &cfg()).unwrap().value, -2.0 / 3.0, 1e-15));
    }

    fn extropy_q(m: &DistributionModel) -> f64 {
        weighted_extropy_quadrature(m, &WeightFunction::One, &cfg()).unwrap().value
    }

    fn wvj_q(m: &DistributionModel) -> f64 {
        weighted_varextropy_quadrature(m, &WeightFunction::Identity, &cfg()).unwrap().value
    }

    fn vj_q(m: &DistributionModel) -> f64 {
        weighted_varextropy_quadrature(m, &WeightFunction::One, &cfg()).unwrap().value
    }

    #[test]
    fn weighted_extropy_examples() {
        let id = WeightFunction::Identity;
        let u = DistributionModel::uniform(0.0, 1.0).unwrap();
        let e = DistributionModel::exponential(1.0).unwrap();
        let q = |m| weighted_extropy_quadrature(m, &id, &cfg()).unwrap().value;
        assert!(close(q(&u), -0.25, 1e-12));
        assert!(close(q(&e), -0.125, 1e-10));
    }

    #[test]
    fn varextropy_examples() {
        assert!(close(vj_q(&DistributionModel::uniform(2.0, 5.0).unwrap()), 0.0, 1e-12));
        assert!(close(vj_q(&DistributionModel::laplace(0.0, 2.0).unwrap()), 1.0 / 768.0, 1e-10));
        let z = DistributionModel::normal(0.0, 1.0).unwrap();
        let exact = 3f64.sqrt() / (24.0 * PI) - 1.0 / (16.0 * PI);
        assert!(close(vj_q(&z), exact, 1e-10));
        assert!(close(exact, 0.0030779, 5e-7));
    }

    #[test]
    fn weighted_varextropy_examples() {
        let e = DistributionModel::exponential(3.0).unwrap();
        assert!(close(wvj_q(&e), 5.0 / 1728.0, 1e-10));
        let l = DistributionModel::laplace(0.0, 7.0).unwrap();
        assert!(close(wvj_q(&l), 1.0 / 216.0, 1e-10));
        let r = DistributionModel::reciprocal(0.25, 1.0).unwrap();
        assert!(wvj_q(&r).abs() < 1e-9);
        let z = DistributionModel::normal(0.0, 1.0).unwrap();
        assert!(close(wvj_q(&z), 3f64.sqrt() / (72.0 * PI), 1e-10));
    }

    #[test]
    fn weibull_weighted_varextropy() {
        // J^w = -α/8 for every λ, so VJ^w = α²/54 - α²/64.
        for &(alpha, lambda) in &[(1.0, 1.0), (2.0, 1.0), (2.0, 3.0), (0.7, 2.0)] {
            let w = DistributionModel::weibull(alpha, lambda).unwrap();
            assert!(close(wvj_q(&w), 5.0 * alpha * alpha / 1728.0, 1e-9), "α={alpha}");
            let j = weighted_extropy_quadrature(&w, &WeightFunction::Identity, &cfg()).unwrap();
            assert!(close(j.value, -alpha / 8.0, 1e-10));
        }
    }

    #[test]
    fn quantile_form_examples() {
        let q = |m: &DistributionModel| weighted_varextropy_quantile_form(m, &cfg()).unwrap().value;
        assert!(close(q(&DistributionModel::uniform(0.0, 1.0).unwrap()), 1.0 / 48.0, 1e-10));
        assert!(close(q(&DistributionModel::exponential(1.0).unwrap()), 5.0 / 1728.0, 1e-9));
        assert!(q(&DistributionModel::reciprocal(0.25, 1.0).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn closed_forms_match_quadrature() {
        let models = [
            DistributionModel::uniform(1.0, 3.0).unwrap(),
            DistributionModel::exponential(2.0).unwrap(),
            DistributionModel::laplace(1.5, 2.0).unwrap(),
            DistributionModel::normal(3.0, 2.0).unwrap(),
            DistributionModel::beta(3.0, 1.0).unwrap(),
            DistributionModel::beta(1.0, 3.0).unwrap(),
            DistributionModel::beta(1.5, 2.0).unwrap(),
            DistributionModel::beta(2.0, 3.0).unwrap(),
            DistributionModel::reciprocal(0.25, 1.0).unwrap(),
            DistributionModel::piecewise(vec![0.1, 0.4, 0.2, 0.3]).unwrap(),
            DistributionModel::power(2.0, 2.0).unwrap(),
            DistributionModel::weibull(2.0, 3.0).unwrap(),
        ];
        for m in &models {
            for phi in [WeightFunction::One, WeightFunction::Identity] {
                if let Some(c) = closed_for(m, &phi, false) {
                    let q = weighted_extropy_quadrature(m, &phi, &cfg()).unwrap().value;
                    assert!(close(c, q, 1e-9), "{m} J φ={}: {c} vs {q}", phi.label());
                }
                if let Some(c) = closed_for(m, &phi, true) {
                    let q = weighted_varextropy_quadrature(m, &phi, &cfg()).unwrap().value;
                    assert!(close(c, q, 1e-9), "{m} VJ φ={}: {c} vs {q}", phi.label());
                }
            }
        }
    }

    #[test]
    fn equilibrium_examples() {
        let e = DistributionModel::exponential(1.0).unwrap();
        let v = equilibrium_weighted_varextropy(&e, &cfg()).unwrap().value;
        assert!(close(v, 5.0 / 1728.0, 1e-9));
        // uniform(0,1): equilibrium density 2(1-x) is beta(1,2).
        let u = DistributionModel::uniform(0.0, 1.0).unwrap();
        let v = equilibrium_weighted_varextropy(&u, &cfg()).unwrap().value;
        let oracle = wvj_q(&DistributionModel::beta(1.0, 2.0).unwrap());
        assert!(close(v, oracle, 1e-9));
        let p = DistributionModel::power(1.0, 2.0).unwrap();
        let u2 = DistributionModel::uniform(0.0, 2.0).unwrap();
        let a = equilibrium_weighted_varextropy(&p, &cfg()).unwrap().value;
        let b = equilibrium_weighted_varextropy(&u2, &cfg()).unwrap().value;
        assert!(close(a, b, 1e-12));
        let n = DistributionModel::normal(0.0, 1.0).unwrap();
        assert!(matches!(equilibrium_weighted_varextropy(&n, &cfg()), Err(Error::Domain(_))));
        let heavy = DistributionModel::pareto2(1.0, 1.0).unwrap();
        assert!(equilibrium_weighted_varextropy(&heavy, &cfg()).is_err());
    }

    #[test]
    fn weighted_law_examples() {
        let e = DistributionModel::exponential(1.0).unwrap();
        let one = weighted_law_varextropy(&e, &WeightFunction::One, &cfg()).unwrap().value;
        assert!(close(one, 5.0 / 1728.0, 1e-10));
        // δ(x) = x turns exponential(1) into gamma(2, 1).
        let v = weighted_law_varextropy(&e, &WeightFunction::Identity, &cfg()).unwrap().value;
        let g = wvj_q(&DistributionModel::gamma(2.0, 1.0).unwrap());
        assert!(close(v, g, 1e-9), "{v} vs {g}");
        let u = DistributionModel::uniform(0.0, 1.0).unwrap();
        let d = WeightFunction::custom("2x", |x| 2.0 * x);
        let v = weighted_law_varextropy(&u, &d, &cfg()).unwrap().value;
        assert!(close(v, 1.0 / 12.0, 1e-10));
        let neg = WeightFunction::custom("-1", |_| -1.0);
        assert!(weighted_law_varextropy(&u, &neg, &cfg()).is_err());
    }

    #[test]
    fn transform_examples() {
        let l = DistributionModel::laplace(0.0, 1.0).unwrap();
        let id = transform_weighted_varextropy(&l, &|x| x, &|_| 1.0, &cfg()).unwrap().value;
        assert!(close(id, 1.0 / 216.0, 1e-10));
        let aff = transform_weighted_varextropy(&l, &|x| 2.0 * x + 3.0, &|_| 2.0, &cfg()).unwrap();
        assert!(close(aff.value, 1.0 / 216.0 + 2.25 / 192.0, 1e-10));
        let g = DistributionModel::gamma(2.0, 1.0).unwrap();
        let pit = transform_weighted_varextropy(&g, &|x| g.cdf(x), &|x| g.pdf(x), &cfg()).unwrap();
        assert!(close(pit.value, 1.0 / 48.0, 1e-10));
        assert!(transform_weighted_varextropy(&l, &|x| -x, &|_| -1.0, &cfg()).is_err());
    }

    #[test]
    fn bivariate_examples() {
        let c = cfg();
        let bv = BivariateModel::gumbel_exponential(0.0).unwrap();
        let v = bivariate_weighted_varextropy(&bv, &c).unwrap().value;
        assert!(close(v, 295.0 / 2985984.0, 1e-8));
        let u = DistributionModel::uniform(0.0, 1.0).unwrap();
        let iu = BivariateModel::independent(u.clone(), u.clone());
        let v = bivariate_weighted_varextropy(&iu, &c).unwrap().value;
        assert!(close(v, 7.0 / 2304.0, 1e-10));
        let d = independent_bivariate_decomposition(&u, &u, &c).unwrap();
        assert!(close(v, d, 1e-10));
    }

    #[test]
    fn residual_and_past() {
        let c = cfg();
        let e = DistributionModel::exponential(2.0).unwrap();
        for &t in &[0.0, 0.3, 1.0, 4.0] {
            let v = residual_weighted_varextropy(&e, &WeightFunction::One, t, &c).unwrap().value;
            assert!(close(v, 4.0 / 48.0, 1e-9), "t = {t}");
        }
        let g = DistributionModel::gamma(2.0, 1.0).unwrap();
        let at0 = residual_weighted_varextropy(&g, &WeightFunction::Identity, 0.0, &c).unwrap();
        assert!(close(at0.value, wvj_q(&g), 1e-10));
        let u = DistributionModel::uniform(0.0, 1.0).unwrap();
        let p = past_weighted_varextropy(&u, &WeightFunction::One, 0.5, &c).unwrap().value;
        assert!(close(p, 0.0, 1e-12));
        let full = past_weighted_varextropy(&g, &WeightFunction::Identity, f64::INFINITY, &c);
        assert!(close(full.unwrap().value, wvj_q(&g), 1e-10));
        let b = DistributionModel::beta(2.0, 1.0).unwrap();
        assert!(residual_weighted_varextropy(&b, &WeightFunction::One, 1.0, &c).is_err());
        assert!(past_weighted_varextropy(&b, &WeightFunction::One, 0.0, &c).is_err());
    }

    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    #[test]
    fn residual_weibull_matches_fixed_grid() {
        let w = DistributionModel::weibull(2.0, 1.0).unwrap();
        let t = 1.0;
        let sf = w.sf(t);
        let a = simpson(|x| x * x * w.pdf(x).powi(3), t, 12.0, 100_000);
        let b = simpson(|x| x * w.pdf(x).powi(2), t, 12.0, 100_000);
        let oracle = 0.25 * (a / sf.powi(3) - b * b / sf.powi(4));
        let v = residual_weighted_varextropy(&w, &WeightFunction::Identity, t, &cfg()).unwrap();
        assert!(close(v.value, oracle, 1e-10), "{} vs {oracle}", v.value);
    }

    #[test]
    fn past_exponential_matches_fixed_grid() {
        let e = DistributionModel::exponential(1.0).unwrap();
        let t = 1.0;
        let ft = e.cdf(t);
        let a = simpson(|x| x * x * e.pdf(x).powi(3), 0.0, t, 100_000);
        let b = simpson(|x| x * e.pdf(x).powi(2), 0.0, t, 100_000);
        let oracle = 0.25 * (a / ft.powi(3) - b * b / ft.powi(4));
        let v = past_weighted_varextropy(&e, &WeightFunction::Identity, t, &cfg()).unwrap();
        assert!(close(v.value, oracle, 1e-12));
    }

    #[test]
    fn monotonicity_threshold_classifies_slope() {
        let c = cfg();
        let cases = [
            (DistributionModel::weibull(2.0, 1.0).unwrap(), WeightFunction::Identity),
            (DistributionModel::gamma(2.0, 1.0).unwrap(), WeightFunction::One),
            (DistributionModel::gamma(0.5, 1.0).unwrap(), WeightFunction::Identity),
            (DistributionModel::log_logistic(0.5, 2.0).unwrap(), WeightFunction::One),
        ];
        for (m, phi) in &cases {
            for &t in &[0.2, 0.5, 1.0, 1.7] {
                let h = 1e-4;
                let up = residual_weighted_varextropy(m, phi, t + h, &c).unwrap().value;
                let dn = residual_weighted_varextropy(m, phi, t - h, &c).unwrap().value;
                let slope = (up - dn) / (2.0 * h);
                let v = residual_weighted_varextropy(m, phi, t, &c).unwrap().value;
                let rhs = residual_monotonicity_rhs(m, phi, t, &c).unwrap();
                if slope > 1e-6 {
                    assert!(v >= rhs, "{m} t={t}: slope {slope}, {v} < {rhs}");
                } else if slope < -1e-6 {
                    assert!(v <= rhs, "{m} t={t}: slope {slope}, {v} > {rhs}");
                }
            }
        }
        let e = DistributionModel::exponential(3.0).unwrap();
        for &t in &[0.1, 1.0] {
            let rhs = residual_monotonicity_rhs(&e, &WeightFunction::One, t, &c).unwrap();
            assert!(close(rhs, 9.0 / 48.0, 1e-9));
        }
    }

    #[test]
    fn mrl_bound_dominates() {
        let c = cfg();
        let cases = [
            (DistributionModel::exponential(1.0).unwrap(), WeightFunction::One, 0.0),
            (DistributionModel::weibull(2.0, 1.0).unwrap(), WeightFunction::Identity, 0.5),
            (DistributionModel::uniform(0.0, 1.0).unwrap(), WeightFunction::Identity, 0.0),
        ];
        for (m, phi, t) in &cases {
            let bound = residual_mrl_upper_bound(m, phi, *t, &c).unwrap().value;
            let v = residual_weighted_varextropy(m, phi, *t, &c).unwrap().value;
            assert!(bound >= v, "{m}: bound {bound} < {v}");
        }
        let custom = WeightFunction::custom("x^2", |x| x * x);
        let e = DistributionModel::exponential(1.0).unwrap();
        assert!(residual_mrl_upper_bound(&e, &custom, 0.0, &c).is_err());
    }

    #[test]
    fn mean_residual_life_of_exponential() {
        let e = DistributionModel::exponential(2.0).unwrap();
        assert!(close(mean_residual_life(&e, 1.3, &cfg()).unwrap(), 0.5, 1e-10));
    }

    #[test]
    fn normal_bound_examples() {
        let b = normal_lower_bound(3.0, 2.0).unwrap();
        assert!(close(b, 0.012434, 5e-6));
        let z = DistributionModel::normal(3.0, 2.0).unwrap();
        let exact = wvj_q(&z);
        assert!(close(exact, 0.014584, 5e-6));
        assert!(b <= exact);
        assert!(close(normal_lower_bound(0.0, 5.0).unwrap(), 11.0 / (512.0 * PI), 1e-15));
        assert!(close(normal_lower_bound(1.0, 1.0).unwrap(), 11.0 / (512.0 * PI) + 1.0 / (128.0 * PI), 1e-15));
        assert!(normal_lower_bound(0.0, 0.0).is_err());
    }

    #[test]
    fn invgamma_bound_examples() {
        for &(alpha, beta) in &[(8.0, 1.0), (8.0, 5.0), (50.0, 1.0)] {
            let bound = invgamma_lower_bound(alpha, beta).unwrap();
            let m = DistributionModel::inv_gamma(alpha, beta).unwrap();
            let v = wvj_q(&m);
            assert!(bound <= v, "α={alpha} β={beta}: bound {bound} > {v}");
        }
        assert_eq!(invgamma_lower_bound(8.0, 1.0).unwrap(), invgamma_lower_bound(8.0, 5.0).unwrap());
        assert!(invgamma_lower_bound(1.5, 1.0).is_err());
    }

    #[test]
    fn negative_variance_is_reported() {
        assert_eq!(checked_variance(-5e-10).unwrap(), 0.0);
        assert!(matches!(checked_variance(-1e-6), Err(Error::NegativeVariance(_))));
    }
}
