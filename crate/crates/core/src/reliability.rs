//! Coherent systems of i.i.d. components described by their signature.
//!
//! With `g_i` the Beta(i, n-i+1) density, the system lifetime has density
//! `f_T(t) = g_V(F(t)) f(t)` where `g_V = Σ s_i g_i`, so every system
//! measure is an integral over (0, 1) in the quantile scale.

use serde::Serialize;

use crate::dist::DistributionModel;
use crate::error::{Error, Result};
use crate::measures::{checked_variance, integrate_unit, MeasureValue, Method};
use crate::quad::QuadratureConfig;
use crate::special::{binomial, ln_beta};

/// Probabilities `s_i = P(T = X_{i:n})`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignatureVector {
    s: Vec<f64>,
}

impl SignatureVector {
    /// Accepts entries summing to 1 within 1e-9 and rescales them to sum to 1.
    pub fn new(s: Vec<f64>) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::invalid("signature", "empty signature"));
        }
        if s.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid("signature", "entries must be nonnegative"));
        }
        let total: f64 = s.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::invalid("signature", format!("entries sum to {total}, not 1")));
        }
        Ok(SignatureVector {
            s: s.into_iter().map(|v| v / total).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.s.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.s
    }

    /// `g_V(u) = Σ s_i g_i(u)`.
    pub fn g_v(&self, u: f64) -> f64 {
        let n = self.n();
        self.s
            .iter()
            .enumerate()
            .filter(|(_, s)| **s > 0.0)
            .map(|(k, s)| s * beta_order_density(k + 1, n, u))
            .sum()
    }

    /// `Σ s_i G_i(u)` with `G_i(u) = Σ_{j≥i} C(n,j) u^j (1-u)^{n-j}`, the
    /// system distribution function in the uniform scale.
    pub fn big_g(&self, u: f64) -> f64 {
        let n = self.n();
        let terms: Vec<f64> = (0..=n)
            .map(|j| binomial(n, j) * u.powi(j as i32) * (1.0 - u).powi((n - j) as i32))
            .collect();
        let mut tail = 0.0;
        let mut acc = 0.0;
        for i in (1..=n).rev() {
            tail += terms[i];
            acc += self.s[i - 1] * tail;
        }
        acc
    }
}

/// Density of the i-th of n uniform order statistics.
fn beta_order_density(i: usize, n: usize, u: f64) -> f64 {
    let c = i as f64 * binomial(n, i);
    let a = if i == 1 { 1.0 } else { u.powi(i as i32 - 1) };
    let b = if i == n { 1.0 } else { (1.0 - u).powi((n - i) as i32) };
    c * a * b
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemModel {
    pub signature: SignatureVector,
    pub component: DistributionModel,
}

impl SystemModel {
    pub fn new(signature: SignatureVector, component: DistributionModel) -> Self {
        SystemModel {
            signature,
            component,
        }
    }

    /// System lifetime density.
    pub fn pdf(&self, t: f64) -> f64 {
        let f = self.component.pdf(t);
        if f == 0.0 {
            return 0.0;
        }
        self.signature.g_v(self.component.cdf(t)) * f
    }
}

/// Density of the i-th order statistic of n draws from `model`.
pub fn order_stat_pdf(model: &DistributionModel, i: usize, n: usize, x: f64) -> Result<f64> {
    if i == 0 || i > n {
        return Err(Error::invalid("order statistic", format!("need 1 ≤ i ≤ n, got i={i}, n={n}")));
    }
    let f = model.pdf(x);
    if f == 0.0 {
        return Ok(0.0);
    }
    Ok(beta_order_density(i, n, model.cdf(x)) * f)
}

/// Extropy, varextropy and weighted varextropy of a system lifetime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SystemMeasures {
    pub extropy: MeasureValue,
    pub varextropy: MeasureValue,
    pub weighted_varextropy: MeasureValue,
}

/// `J(T) = -½ ∫ g_V² f(Q) du`, `VJ(T) = ¼ ∫ g_V³ f(Q)² du - J²`, and
/// `VJ^w(T)` with the extra weights `Q²` and `Q`.
pub fn system_varextropy(sys: &SystemModel, cfg: &QuadratureConfig) -> Result<SystemMeasures> {
    let m = &sys.component;
    let sig = &sys.signature;
    let point = |u: f64| {
        let q = m.quantile(u).unwrap_or(f64::NAN);
        (q, m.pdf(q), sig.g_v(u))
    };
    let guard = |v: f64, f: f64| if f == 0.0 { 0.0 } else { v };
    let i2 = integrate_unit(m, |u| {
        let (_, f, g) = point(u);
        guard(g * g * f, f)
    }, cfg)?;
    let i3 = integrate_unit(m, |u| {
        let (_, f, g) = point(u);
        guard(g * g * g * f * f, f)
    }, cfg)?;
    let w2 = integrate_unit(m, |u| {
        let (q, f, g) = point(u);
        guard(q * g * g * f, f)
    }, cfg)?;
    let w3 = integrate_unit(m, |u| {
        let (q, f, g) = point(u);
        guard(q * q * g * g * g * f * f, f)
    }, cfg)?;
    let j = -0.5 * i2.value;
    let vj = checked_variance(0.25 * i3.value - j * j)?;
    let jw = -0.5 * w2.value;
    let vjw = checked_variance(0.25 * w3.value - jw * jw)?;
    let q = |value, err| MeasureValue {
        value,
        method: Method::Quadrature,
        est_abs_error: err,
    };
    Ok(SystemMeasures {
        extropy: q(j, 0.5 * i2.abs_error),
        varextropy: q(vj, 0.25 * i3.abs_error + j.abs() * i2.abs_error),
        weighted_varextropy: q(vjw, 0.25 * w3.abs_error + jw.abs() * w2.abs_error),
    })
}

fn hardy_integral(sys: &SystemModel, power: i32, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
    let m = &sys.component;
    if m.support().lower < 0.0 {
        return Err(Error::Domain(format!(
            "Hardy bounds need a nonnegative component law; `{}` starts at {}",
            m.name(),
            m.support().lower
        )));
    }
    let r = integrate_unit(
        m,
        |u| {
            let q = m.quantile(u).unwrap_or(f64::NAN);
            let g = sys.signature.big_g(u);
            if g == 0.0 {
                return 0.0;
            }
            // dQ = du / f(Q).
            (g / q).powi(power) / m.pdf(q)
        },
        cfg,
    );
    let diverges = || {
        Error::Domain(format!(
            "Hardy integral of order {power} is not finite for component `{}`",
            m.name()
        ))
    };
    match r {
        Ok(r) if r.value.is_finite() => Ok((r.value, r.abs_error)),
        Ok(_) | Err(Error::NonConvergence { .. }) => Err(diverges()),
        Err(e) => Err(e),
    }
}

/// Upper bound `-(1/8) ∫ G(u)² / Q(u)² dQ(u)` on the system extropy.
pub fn hardy_extropy_bound(sys: &SystemModel, cfg: &QuadratureConfig) -> Result<MeasureValue> {
    let (b2, e2) = hardy_integral(sys, 2, cfg)?;
    Ok(MeasureValue {
        value: -b2 / 8.0,
        method: Method::Quadrature,
        est_abs_error: e2 / 8.0,
    })
}

/// The two-term expression `(2/27) ∫ G³/Q³ dQ - ((1/8) ∫ G²/Q² dQ)²`
/// offered as a bound on the system varextropy.
pub fn hardy_varextropy_bound(sys: &SystemModel, cfg: &QuadratureConfig) -> Result<MeasureValue> {
    let (b2, e2) = hardy_integral(sys, 2, cfg)?;
    let (b3, e3) = hardy_integral(sys, 3, cfg)?;
    let uj = b2 / 8.0;
    Ok(MeasureValue {
        value: 2.0 / 27.0 * b3 - uj * uj,
        method: Method::Quadrature,
        est_abs_error: 2.0 / 27.0 * e3 + 2.0 * uj * e2 / 8.0,
    })
}

/// `VJ^w(X_{r:n})` through the Beta representation
///
/// `B(3r-2, 3(n-r)+1)/(4B³) E[Q² f²(Q(V₁))] - B(2r-1, 2(n-r)+1)²/(4B⁴) E²[Q f(Q(V₂))]`
///
/// with `B = B(r, n-r+1)`, `V₁ ~ Beta(3r-2, 3(n-r)+1)`, `V₂ ~ Beta(2r-1, 2(n-r)+1)`.
pub fn order_stat_weighted_varextropy(
    model: &DistributionModel,
    r: usize,
    n: usize,
    cfg: &QuadratureConfig,
) -> Result<MeasureValue> {
    if r == 0 || r > n {
        return Err(Error::invalid("order statistic", format!("need 1 ≤ r ≤ n, got r={r}, n={n}")));
    }
    let (rf, nf) = (r as f64, n as f64);
    let lb = ln_beta(rf, nf - rf + 1.0);
    let (a1, b1) = (3.0 * rf - 2.0, 3.0 * (nf - rf) + 1.0);
    let (a2, b2) = (2.0 * rf - 1.0, 2.0 * (nf - rf) + 1.0);
    let (lb1, lb2) = (ln_beta(a1, b1), ln_beta(a2, b2));
    let beta_pdf = |a: f64, b: f64, lnb: f64, u: f64| {
        let la = if a == 1.0 { 0.0 } else { (a - 1.0) * u.ln() };
        let lbb = if b == 1.0 { 0.0 } else { (b - 1.0) * (-u).ln_1p() };
        (la + lbb - lnb).exp()
    };
    let qf = |u: f64| {
        let q = model.quantile(u).unwrap_or(f64::NAN);
        (q, model.pdf(q))
    };
    let e1 = integrate_unit(
        model,
        |u| {
            let (q, f) = qf(u);
            if f == 0.0 {
                0.0
            } else {
                q * q * f * f * beta_pdf(a1, b1, lb1, u)
            }
        },
        cfg,
    )?;
    let e2 = integrate_unit(
        model,
        |u| {
            let (q, f) = qf(u);
            if f == 0.0 {
                0.0
            } else {
                q * f * beta_pdf(a2, b2, lb2, u)
            }
        },
        cfg,
    )?;
    let c1 = (lb1 - 3.0 * lb).exp() / 4.0;
    let c2 = (2.0 * lb2 - 4.0 * lb).exp() / 4.0;
    let v = c1 * e1.value - c2 * e2.value * e2.value;
    Ok(MeasureValue {
        value: checked_variance(v)?,
        method: Method::Quadrature,
        est_abs_error: c1 * e1.abs_error + 2.0 * c2 * e2.value.abs() * e2.abs_error,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DispersiveOrder {
    /// `F ≤_disp G`: `f(F⁻¹(v)) ≥ g(G⁻¹(v))` everywhere on the grid.
    FLeqG,
    GLeqF,
    /// Both directions hold up to the tie tolerance.
    Equivalent,
    Incomparable,
}

/// Grid comparison of `v ↦ f(F⁻¹(v))` with `v ↦ g(G⁻¹(v))` at `grid_points`
/// equispaced interior points; differences within 1e-12 count as ties.
pub fn dispersive_order_check(
    model_f: &DistributionModel,
    model_g: &DistributionModel,
    grid_points: usize,
) -> Result<DispersiveOrder> {
    if grid_points < 100 {
        return Err(Error::Domain(format!("need at least 100 grid points, got {grid_points}")));
    }
    let density_quantile = |m: &DistributionModel, v: f64| -> Result<f64> { Ok(m.pdf(m.quantile(v)?)) };
    let (mut f_le_g, mut g_le_f) = (true, true);
    for k in 1..=grid_points {
        let v = k as f64 / (grid_points + 1) as f64;
        let a = density_quantile(model_f, v)?;
        let b = density_quantile(model_g, v)?;
        if (a - b).abs() <= 1e-12 {
            continue;
        }
        if a < b {
            f_le_g = false;
        } else {
            g_le_f = false;
        }
    }
    Ok(match (f_le_g, g_le_f) {
        (true, true) => DispersiveOrder::Equivalent,
        (true, false) => DispersiveOrder::FLeqG,
        (false, true) => DispersiveOrder::GLeqF,
        (false, false) => DispersiveOrder::Incomparable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{weighted_varextropy_quadrature, WeightFunction};
    use crate::quad::integrate;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn sig(s: &[f64]) -> SignatureVector {
        SignatureVector::new(s.to_vec()).unwrap()
    }

    #[test]
    fn order_stat_pdf_examples() {
        let u = DistributionModel::uniform(0.0, 1.0).unwrap();
        assert!((order_stat_pdf(&u, 1, 2, 0.5).unwrap() - 1.0).abs() < 1e-15);
        let e = DistributionModel::exponential(1.0).unwrap();
        let x = 1.0;
        let oracle = 6.0 * e.cdf(x) * e.sf(x) * e.pdf(x);
        assert!((order_stat_pdf(&e, 2, 3, x).unwrap() - oracle).abs() < 1e-15);
        assert_eq!(order_stat_pdf(&e, 1, 1, 0.7).unwrap(), e.pdf(0.7));
        assert!(order_stat_pdf(&e, 0, 3, 1.0).is_err());
        assert!(order_stat_pdf(&e, 4, 3, 1.0).is_err());
    }

    #[test]
    fn g_v_of_three_component_example() {
        let s = sig(&[1.0 / 3.0, 2.0 / 3.0, 0.0]);
        for &u in &[0.1, 0.4, 0.8] {
            assert!((s.g_v(u) - (1.0 - u) * (1.0 + 3.0 * u)).abs() < 1e-14);
        }
    }

    #[test]
    fn g_v_integrates_to_one() {
        for s in [vec![1.0], vec![0.0, 1.0 / 6.0, 7.0 / 12.0, 0.25], vec![0.2, 0.3, 0.1, 0.4, 0.0]] {
            let s = sig(&s);
            let r = integrate(|u| s.g_v(u), 0.0, 1.0, &[], &cfg()).unwrap();
            assert!((r.value - 1.0).abs() < 1e-10);
            assert!((s.big_g(1.0) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn three_component_system() {
        let e = DistributionModel::exponential(1.0).unwrap();
        let m = system_varextropy(&SystemModel::new(sig(&[1.0 / 3.0, 2.0 / 3.0, 0.0]), e), &cfg())
            .unwrap();
        assert!((m.extropy.value + 0.35).abs() < 1e-10);
        assert!((m.varextropy.value + 0.35 * 0.35 - 25.0 / 168.0).abs() < 1e-10);
        assert!((m.varextropy.value - 0.0263).abs() < 5e-4);
    }

    #[test]
    fn single_component_collapses() {
        let g = DistributionModel::gamma(2.0, 1.0).unwrap();
        let m = system_varextropy(&SystemModel::new(sig(&[1.0]), g.clone()), &cfg()).unwrap();
        let c = cfg();
        let vj = weighted_varextropy_quadrature(&g, &WeightFunction::One, &c).unwrap().value;
        let vjw = weighted_varextropy_quadrature(&g, &WeightFunction::Identity, &c).unwrap().value;
        assert!((m.varextropy.value - vj).abs() < 1e-10);
        assert!((m.weighted_varextropy.value - vjw).abs() < 1e-10);
    }

    #[test]
    fn four_component_examples() {
        let s = sig(&[0.0, 1.0 / 6.0, 7.0 / 12.0, 0.25]);
        let vj = |m: DistributionModel| {
            system_varextropy(&SystemModel::new(s.clone(), m), &cfg()).unwrap().varextropy.value
        };
        let x = vj(DistributionModel::exponential(2.0).unwrap());
        let y1 = vj(DistributionModel::log_logistic(0.5, 2.0).unwrap());
        let y2 = vj(DistributionModel::pareto2(5.0, 3.0).unwrap());
        assert!((x - 0.03659).abs() < 5e-5, "{x}");
        assert!((y1 - 0.04252).abs() < 5e-5, "{y1}");
        assert!((y2 - 0.02215).abs() < 5e-5, "{y2}");
        assert!(x < y1 && x > y2);
    }

    #[test]
    fn system_density_agrees_with_quantile_route() {
        let s = sig(&[0.0, 1.0 / 6.0, 7.0 / 12.0, 0.25]);
        let comp = DistributionModel::exponential(2.0).unwrap();
        let sys = SystemModel::new(s, comp);
        let c = cfg();
        let direct = integrate(|t| sys.pdf(t).powi(2), 0.0, f64::INFINITY, &[], &c).unwrap().value;
        let m = system_varextropy(&sys, &c).unwrap();
        assert!((m.extropy.value + 0.5 * direct).abs() < 1e-10);
    }

    #[test]
    fn hardy_bounds_at_power_two() {
        let s = sig(&[0.0, 1.0 / 6.0, 7.0 / 12.0, 0.25]);
        let sys = SystemModel::new(s, DistributionModel::power(2.0, 2.0).unwrap());
        let uj = hardy_extropy_bound(&sys, &cfg()).unwrap().value;
        let b = 2.0f64;
        let printed = (-2168.0 * b.powi(4) + 1316.0 * b.powi(3) - 291.0 * b * b + 28.0 * b - 1.0)
            / (16.0
                * (6720.0 * b.powi(5) - 5944.0 * b.powi(4) + 2070.0 * b.powi(3) - 355.0 * b * b
                    + 30.0 * b
                    - 1.0));
        assert!((uj - printed).abs() < 1e-10, "{uj} vs {printed}");
        assert!((uj + 0.01169).abs() < 5e-6);
        let vb = hardy_varextropy_bound(&sys, &cfg()).unwrap().value;
        let printed_v = (5715.0 * b.powi(4) - 4548.0 * b.powi(3) + 1318.0 * b * b - 168.0 * b + 8.0)
            / (108.0
                * (12474.0 * b.powi(5) - 14841.0 * b.powi(4) + 6939.0 * b.powi(3)
                    - 1594.0 * b * b
                    + 180.0 * b
                    - 8.0))
            - printed * printed;
        assert!((vb - printed_v).abs() < 1e-10, "{vb} vs {printed_v}");
        assert!((vb - 0.002494).abs() < 5e-6);
        let m = system_varextropy(&sys, &cfg()).unwrap();
        assert!(m.extropy.value <= uj);
    }

    #[test]
    fn hardy_extropy_bound_single_component() {
        let sys = SystemModel::new(sig(&[1.0]), DistributionModel::power(2.0, 2.0).unwrap());
        let uj = hardy_extropy_bound(&sys, &cfg()).unwrap().value;
        let j = system_varextropy(&sys, &cfg()).unwrap().extropy.value;
        assert!(j <= uj);
        let n = SystemModel::new(sig(&[1.0]), DistributionModel::normal(0.0, 1.0).unwrap());
        assert!(matches!(hardy_extropy_bound(&n, &cfg()), Err(Error::Domain(_))));
    }

    #[test]
    fn order_statistic_formula_matches_direct_density() {
        let c = cfg();
        let u = DistributionModel::uniform(0.0, 1.0).unwrap();
        let f23 = |x: f64| order_stat_pdf(&u, 2, 3, x).unwrap();
        let a = integrate(|x| x * x * f23(x).powi(3), 0.0, 1.0, &[], &c).unwrap().value;
        let b = integrate(|x| x * f23(x).powi(2), 0.0, 1.0, &[], &c).unwrap().value;
        let oracle = 0.25 * a - (0.5 * b).powi(2);
        let v = order_stat_weighted_varextropy(&u, 2, 3, &c).unwrap().value;
        assert!((v - oracle).abs() < 1e-10, "{v} vs {oracle}");

        let e = DistributionModel::exponential(1.0).unwrap();
        for &(r, n) in &[(1, 4), (3, 4), (4, 4)] {
            let f = |x: f64| order_stat_pdf(&e, r, n, x).unwrap();
            let a = integrate(|x| x * x * f(x).powi(3), 0.0, f64::INFINITY, &[], &c).unwrap().value;
            let b = integrate(|x| x * f(x).powi(2), 0.0, f64::INFINITY, &[], &c).unwrap().value;
            let oracle = 0.25 * a - (0.5 * b).powi(2);
            let v = order_stat_weighted_varextropy(&e, r, n, &c).unwrap().value;
            assert!((v - oracle).abs() < 1e-10, "r={r} n={n}: {v} vs {oracle}");
        }
    }

    #[test]
    fn order_statistic_edge_cases() {
        let c = cfg();
        let g = DistributionModel::gamma(2.0, 1.0).unwrap();
        let one = order_stat_weighted_varextropy(&g, 1, 1, &c).unwrap().value;
        let direct = weighted_varextropy_quadrature(&g, &WeightFunction::Identity, &c).unwrap().value;
        assert!((one - direct).abs() < 1e-10);
        let z = DistributionModel::normal(0.0, 1.0).unwrap();
        let lo = order_stat_weighted_varextropy(&z, 1, 3, &c).unwrap().value;
        let hi = order_stat_weighted_varextropy(&z, 3, 3, &c).unwrap().value;
        assert!((lo - hi).abs() < 1e-8);
        assert!(order_stat_weighted_varextropy(&z, 4, 3, &c).is_err());
    }

    #[test]
    fn reciprocal_order_statistics_are_smallest_in_the_middle() {
        let c = cfg();
        let r = DistributionModel::reciprocal(0.25, 1.0).unwrap();
        for n in [4usize, 5] {
            let v: Vec<f64> = (1..=n)
                .map(|k| order_stat_weighted_varextropy(&r, k, n, &c).unwrap().value)
                .collect();
            for k in 0..n {
                assert!(v[k] <= v[0] + 1e-12 && v[k] <= v[n - 1] + 1e-12);
            }
            let mid = n.div_ceil(2);
            let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!((v[mid - 1] - min).abs() < 1e-12, "n={n}: {v:?}");
        }
    }

    #[test]
    fn dispersive_examples() {
        let x = DistributionModel::exponential(2.0).unwrap();
        let y1 = DistributionModel::log_logistic(0.5, 2.0).unwrap();
        let y2 = DistributionModel::pareto2(5.0, 3.0).unwrap();
        assert_eq!(dispersive_order_check(&x, &y1, 1000).unwrap(), DispersiveOrder::FLeqG);
        assert_eq!(dispersive_order_check(&x, &y2, 1000).unwrap(), DispersiveOrder::FLeqG);
        assert_eq!(dispersive_order_check(&y1, &x, 1000).unwrap(), DispersiveOrder::GLeqF);
        assert_eq!(dispersive_order_check(&x, &x, 100).unwrap(), DispersiveOrder::Equivalent);
        let n = DistributionModel::normal(0.0, 1.0).unwrap();
        let l = DistributionModel::laplace(0.0, 1.0).unwrap();
        assert_eq!(dispersive_order_check(&n, &l, 500).unwrap(), DispersiveOrder::Incomparable);
        assert!(dispersive_order_check(&x, &y1, 99).is_err());
    }

    #[test]
    fn signature_validation() {
        assert!(SignatureVector::new(vec![0.5, 0.6]).is_err());
        assert!(SignatureVector::new(vec![-0.1, 1.1]).is_err());
        assert!(SignatureVector::new(vec![]).is_err());
        let s = SignatureVector::new(vec![0.5, 0.5 + 5e-10]).unwrap();
        assert!((s.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
