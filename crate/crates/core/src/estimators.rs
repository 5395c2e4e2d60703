//! Kernel estimators of the weighted varextropy `VJ^w(X)` (weight φ(x) = x).
//!
//! * plug-in: `¼ (∫ x² f_n³ - (∫ x f_n²)²)` with the Epanechnikov KDE `f_n`;
//! * resubstitution: the empirical variance of `½ X_i f̃_n(X_i)` with the
//!   leave-one-out KDE `f̃_n`;
//! * quantile: `¼ (∫ Q_n²/q̃_n² - (∫ Q_n/q̃_n)²)` with the empirical quantile
//!   `Q_n` and a kernel quantile-density estimate `q̃_n`.
//!
//! Both integrals are evaluated piece by piece between the points where the
//! integrand changes form (kernel support edges and quantile jumps). The
//! plug-in integrand is a polynomial on each piece, so 5-point Gauss–Legendre
//! is exact there.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{GL10, GL5};
use crate::sample::SampleData;

/// Epanechnikov kernel `¾ (1 - x²)` on [-1, 1].
#[inline]
pub fn epanechnikov(x: f64) -> f64 {
    if x.abs() < 1.0 {
        0.75 * (1.0 - x * x)
    } else {
        0.0
    }
}

/// How a bandwidth `h` maps to the kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelScale {
    /// `K((x - X_i)/h) / h`: support half-width `h`.
    HalfWidth,
    /// `h` is the kernel standard deviation: support half-width `√5 h`.
    #[default]
    StdDev,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelSpec {
    bandwidth: f64,
    scale: KernelScale,
}

impl KernelSpec {
    pub fn new(bandwidth: f64, scale: KernelScale) -> Result<Self> {
        if !(bandwidth > 0.0) || !bandwidth.is_finite() {
            return Err(Error::Domain(format!("bandwidth must be positive, got {bandwidth}")));
        }
        Ok(KernelSpec { bandwidth, scale })
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn scale(&self) -> KernelScale {
        self.scale
    }

    /// Half-width of the kernel support.
    pub fn half_width(&self) -> f64 {
        match self.scale {
            KernelScale::HalfWidth => self.bandwidth,
            KernelScale::StdDev => self.bandwidth * 5f64.sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    Plugin,
    Resub,
    Quantile,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 3] = [EstimatorKind::Plugin, EstimatorKind::Resub, EstimatorKind::Quantile];

    pub fn as_str(&self) -> &'static str {
        match self {
            EstimatorKind::Plugin => "plugin",
            EstimatorKind::Resub => "resub",
            EstimatorKind::Quantile => "quantile",
        }
    }
}

impl std::str::FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "plugin" | "plug-in" => Ok(EstimatorKind::Plugin),
            "resub" | "resubstitution" => Ok(EstimatorKind::Resub),
            "quantile" => Ok(EstimatorKind::Quantile),
            _ => Err(Error::parse(s, "expected plugin, resub or quantile")),
        }
    }
}

impl std::fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Options shared by the three estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub scale: KernelScale,
    /// Fixed bandwidth; `None` uses [`bandwidth_default`] (and its `n - 1`
    /// version for the leave-one-out density).
    pub bandwidth: Option<f64>,
    /// Interval the plug-in integrals are clipped to, on top of the KDE support.
    pub domain: (f64, f64),
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            scale: KernelScale::StdDev,
            bandwidth: None,
            domain: (0.0, f64::INFINITY),
        }
    }
}

impl EstimatorConfig {
    pub fn with_domain(mut self, lower: f64, upper: f64) -> Self {
        self.domain = (lower, upper);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimateResult {
    pub value: f64,
    pub estimator: EstimatorKind,
    pub bandwidth_used: f64,
    pub kernel_half_width: f64,
    pub n: usize,
}

fn rule_of_thumb(s: f64, n: usize) -> f64 {
    1.06 * s * (n as f64).powf(-0.2)
}

/// `1.06 s n^(-1/5)`.
pub fn bandwidth_default(sample: &SampleData) -> Result<f64> {
    check_sample(sample)?;
    Ok(rule_of_thumb(sample.std_dev(), sample.n()))
}

fn check_sample(sample: &SampleData) -> Result<()> {
    if sample.n() < 2 {
        return Err(Error::Domain(format!("need at least 2 observations, got {}", sample.n())));
    }
    if !(sample.std_dev() > 0.0) {
        return Err(Error::Domain("sample has zero variance".into()));
    }
    Ok(())
}

/// `f_n(x) = (1/(n w)) Σ K((x - X_i)/w)` with `w` the kernel half-width.
pub fn kde_eval(sample: &SampleData, kernel: &KernelSpec, x: f64) -> f64 {
    let xs = sample.sorted();
    let w = kernel.half_width();
    let lo = xs.partition_point(|v| *v <= x - w);
    let hi = xs.partition_point(|v| *v < x + w);
    let s: f64 = xs[lo..hi].iter().map(|v| epanechnikov((x - v) / w)).sum();
    s / (xs.len() as f64 * w)
}

/// Leave-one-out density `(1/((n-1) w)) Σ_{j≠i} K((X_i - X_j)/w)` at the
/// observation with input index `i`; `kernel` carries the `n - 1` bandwidth.
pub fn kde_loo_eval(sample: &SampleData, kernel: &KernelSpec, i: usize) -> Result<f64> {
    let n = sample.n();
    if n < 2 {
        return Err(Error::Domain("leave-one-out density needs n ≥ 2".into()));
    }
    let xi = *sample
        .values()
        .get(i)
        .ok_or_else(|| Error::Domain(format!("index {i} out of range for n = {n}")))?;
    let w = kernel.half_width();
    let s: f64 = sample
        .values()
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != i)
        .map(|(_, v)| epanechnikov((xi - v) / w))
        .sum();
    Ok(s / ((n - 1) as f64 * w))
}

/// KDE at every sorted observation, excluding the point itself when `loo`.
fn kde_at_points(xs: &[f64], w: f64, loo: bool) -> Vec<f64> {
    let n = xs.len();
    let denom = if loo { (n - 1) as f64 } else { n as f64 } * w;
    let mut out = Vec::with_capacity(n);
    let mut lo = 0;
    for (i, &x) in xs.iter().enumerate() {
        while xs[lo] <= x - w {
            lo += 1;
        }
        let mut s = 0.0;
        // Walk left then right so the summation order is fixed by sorted order.
        for &v in &xs[lo..i] {
            s += epanechnikov((x - v) / w);
        }
        if !loo {
            s += 0.75;
        }
        for &v in &xs[i + 1..] {
            if v >= x + w {
                break;
            }
            s += epanechnikov((x - v) / w);
        }
        out.push(s / denom);
    }
    out
}

fn resolve(sample: &SampleData, cfg: &EstimatorConfig) -> Result<KernelSpec> {
    check_sample(sample)?;
    let h = match cfg.bandwidth {
        Some(h) => h,
        None => rule_of_thumb(sample.std_dev(), sample.n()),
    };
    KernelSpec::new(h, cfg.scale)
}

fn result(value: f64, kind: EstimatorKind, k: &KernelSpec, n: usize) -> EstimateResult {
    EstimateResult {
        value,
        estimator: kind,
        bandwidth_used: k.bandwidth(),
        kernel_half_width: k.half_width(),
        n,
    }
}

/// Plug-in estimate over `[X_(1) - w, X_(n) + w] ∩ cfg.domain`.
pub fn plugin_estimate(sample: &SampleData, cfg: &EstimatorConfig) -> Result<EstimateResult> {
    let k = resolve(sample, cfg)?;
    let v = plugin_value(sample.sorted(), k.half_width(), cfg.domain);
    Ok(result(v, EstimatorKind::Plugin, &k, sample.n()))
}

fn plugin_value(xs: &[f64], w: f64, domain: (f64, f64)) -> f64 {
    let n = xs.len();
    // Work in coordinates centred on the sample mean to keep the running
    // power sums well conditioned.
    let c = xs.iter().sum::<f64>() / n as f64;
    let norm = 0.75 / (n as f64 * w);
    let inv_w2 = 1.0 / (w * w);
    let lo_clip = domain.0 - c;
    let hi_clip = domain.1 - c;

    let (mut a_int, mut b_int) = (0.0, 0.0);
    let (mut k, mut s1, mut s2) = (0.0f64, 0.0f64, 0.0f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut prev = xs[0] - c - w;
    let gl = &*GL5;
    while j < n {
        // Next event: a kernel entering at X_i - w or leaving at X_j + w.
        let enter = if i < n { xs[i] - c - w } else { f64::INFINITY };
        let leave = xs[j] - c + w;
        let next = enter.min(leave);
        if k > 0.0 && next > prev {
            let a = prev.max(lo_clip);
            let b = next.min(hi_clip);
            if b > a {
                let f = |y: f64| norm * (k - (k * y * y - 2.0 * y * s1 + s2) * inv_w2);
                let (ka, kb) = gl.integrate_pair(a, b, |y| {
                    let fy = f(y).max(0.0);
                    let x = y + c;
                    (x * x * fy * fy * fy, x * fy * fy)
                });
                a_int += ka;
                b_int += kb;
            }
        }
        prev = next;
        if enter <= leave {
            let y = xs[i] - c;
            k += 1.0;
            s1 += y;
            s2 += y * y;
            i += 1;
        } else {
            let y = xs[j] - c;
            k -= 1.0;
            s1 -= y;
            s2 -= y * y;
            j += 1;
            if k == 0.0 {
                s1 = 0.0;
                s2 = 0.0;
            }
        }
    }
    0.25 * (a_int - b_int * b_int)
}

/// Resubstitution estimate `(1/(4n)) Σ X_i² f̃_i² - ¼ ((1/n) Σ X_i f̃_i)²`,
/// where `f̃` uses the bandwidth rule at count `n - 1`.
pub fn resub_estimate(sample: &SampleData, cfg: &EstimatorConfig) -> Result<EstimateResult> {
    check_sample(sample)?;
    let n = sample.n();
    let h = match cfg.bandwidth {
        Some(h) => h,
        None => rule_of_thumb(sample.std_dev(), n - 1),
    };
    let k = KernelSpec::new(h, cfg.scale)?;
    let xs = sample.sorted();
    let loo = kde_at_points(xs, k.half_width(), true);
    let (mut m1, mut m2) = (0.0, 0.0);
    for (x, f) in xs.iter().zip(&loo) {
        let t = x * f;
        m1 += t;
        m2 += t * t;
    }
    let nf = n as f64;
    let v = 0.25 * (m2 / nf - (m1 / nf) * (m1 / nf));
    Ok(result(v.max(0.0), EstimatorKind::Resub, &k, n))
}

/// Kernel quantile-density estimate
/// `q̃_n(u) = (1/(n w)) Σ K((S_i - u)/w) / f_n(X_(i))` with `S_i = i/n`.
pub fn quantile_density_estimate(sample: &SampleData, kernel: &KernelSpec, u: f64) -> Result<f64> {
    check_n(sample)?;
    let xs = sample.sorted();
    let w = kernel.half_width();
    let fx = kde_at_points(xs, w, false);
    Ok(qdens_at(&fx, w, u))
}

fn check_n(sample: &SampleData) -> Result<()> {
    if sample.n() < 2 {
        return Err(Error::Domain(format!("need at least 2 observations, got {}", sample.n())));
    }
    Ok(())
}

fn qdens_at(fx: &[f64], w: f64, u: f64) -> f64 {
    let n = fx.len();
    let nf = n as f64;
    let s: f64 = fx
        .iter()
        .enumerate()
        .map(|(i, f)| epanechnikov(((i + 1) as f64 / nf - u) / w) / f)
        .sum();
    s / (nf * w)
}

/// `Q_n(u) = X_(⌈n u⌉)`, with `Q_n(0) = X_(1)`.
pub fn empirical_quantile(sample: &SampleData, u: f64) -> Result<f64> {
    sample.empirical_quantile(u)
}

/// Quantile-based estimate over `[1/(2n), 1 - 1/(2n)]`; the integrand is 0
/// wherever `q̃_n` vanishes.
pub fn quantile_estimate(sample: &SampleData, cfg: &EstimatorConfig) -> Result<EstimateResult> {
    let k = resolve(sample, cfg)?;
    let xs = sample.sorted();
    let w = k.half_width();
    let fx = kde_at_points(xs, w, false);
    let v = quantile_value(xs, &fx, w);
    Ok(result(v, EstimatorKind::Quantile, &k, sample.n()))
}

fn quantile_value(xs: &[f64], fx: &[f64], w: f64) -> f64 {
    let n = xs.len();
    let nf = n as f64;
    let eps = 0.5 / nf;
    let (lo, hi) = (eps, 1.0 - eps);

    let mut cuts: Vec<f64> = Vec::with_capacity(3 * n + 2);
    cuts.push(lo);
    cuts.push(hi);
    for i in 1..=n {
        let s = i as f64 / nf;
        for p in [s, s - w, s + w] {
            if p > lo && p < hi {
                cuts.push(p);
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let norm = 0.75 / (nf * w);
    let inv_w2 = 1.0 / (w * w);
    let c: Vec<f64> = fx.iter().map(|f| 1.0 / f).collect();
    // Active kernels are the i with |S_i - u| < w; S_i increases with i, so
    // the active set is a window [first, last).
    let (mut first, mut last) = (0usize, 0usize);
    let (mut w0, mut w1, mut w2) = (0.0f64, 0.0f64, 0.0f64);
    let gl = &*GL10;
    let (mut a_int, mut b_int) = (0.0, 0.0);
    for seg in cuts.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        if b <= a {
            continue;
        }
        let mid = 0.5 * (a + b);
        while last < n && ((last + 1) as f64 / nf) - w < mid {
            let s = (last + 1) as f64 / nf;
            w0 += c[last];
            w1 += c[last] * s;
            w2 += c[last] * s * s;
            last += 1;
        }
        while first < last && ((first + 1) as f64 / nf) + w <= mid {
            let s = (first + 1) as f64 / nf;
            w0 -= c[first];
            w1 -= c[first] * s;
            w2 -= c[first] * s * s;
            first += 1;
        }
        if first == last {
            w0 = 0.0;
            w1 = 0.0;
            w2 = 0.0;
            continue;
        }
        let kidx = ((nf * mid).ceil() as usize).clamp(1, n);
        let q = xs[kidx - 1];
        let (ka, kb) = gl.integrate_pair(a, b, |u| {
            let qd = norm * (w0 - (w0 * u * u - 2.0 * u * w1 + w2) * inv_w2);
            if qd > 0.0 {
                let r = q / qd;
                (r * r, r)
            } else {
                (0.0, 0.0)
            }
        });
        a_int += ka;
        b_int += kb;
    }
    0.25 * (a_int - b_int * b_int)
}

/// Dispatch on the estimator kind.
pub fn estimate(
    sample: &SampleData,
    kind: EstimatorKind,
    cfg: &EstimatorConfig,
) -> Result<EstimateResult> {
    match kind {
        EstimatorKind::Plugin => plugin_estimate(sample, cfg),
        EstimatorKind::Resub => resub_estimate(sample, cfg),
        EstimatorKind::Quantile => quantile_estimate(sample, cfg),
    }
}
