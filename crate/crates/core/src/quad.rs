//! Adaptive Gauss–Kronrod quadrature.
//!
//! Every panel is integrated with the 7-point Gauss / 15-point Kronrod pair;
//! the panel with the largest error estimate is bisected until the global
//! estimate drops below `max(abs_tol, rel_tol·|I|)`. Caller-supplied
//! breakpoints (density kinks, support edges) always become panel
//! boundaries. Semi-infinite and infinite ranges are mapped onto (0, 1) with
//! `x = a + t/(1-t)` (and its mirror), so there is a single code path.
//!
//! The module also carries fixed Gauss–Legendre rules, which the kernel
//! estimators use on polynomial pieces.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances for adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            abs_tol: 1e-10,
            rel_tol: 1e-9,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureConfig {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if !(abs_tol > 0.0 && rel_tol > 0.0) {
            return Err(Error::Domain("quadrature tolerances must be positive".into()));
        }
        if max_subdivisions == 0 {
            return Err(Error::Domain("max_subdivisions must be at least 1".into()));
        }
        Ok(QuadratureConfig {
            abs_tol,
            rel_tol,
            max_subdivisions,
        })
    }

    /// A config with both tolerances scaled by `factor`.
    pub fn tightened(&self, factor: f64) -> Self {
        QuadratureConfig {
            abs_tol: self.abs_tol * factor,
            rel_tol: self.rel_tol * factor,
            max_subdivisions: self.max_subdivisions,
        }
    }
}

/// Value and error estimate of an integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

// Gauss weights at XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

/// Integrate `f` over the finite interval `[a, b]` with mandatory breakpoints.
fn integrate_finite<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    breaks: &[f64],
    cfg: &QuadratureConfig,
) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            abs_error: 0.0,
            evaluations: 0,
        });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut edges = vec![lo];
    let mut inner: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|p| p.is_finite() && *p > lo && *p < hi)
        .collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    edges.extend(inner);
    edges.push(hi);

    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    let mut evaluations = 0;
    // Panels too narrow to split further; their error is final.
    let mut frozen_err = 0.0;
    for w in edges.windows(2) {
        let (value, error) = kronrod15(f, w[0], w[1]);
        evaluations += 15;
        total += value;
        total_err += error;
        heap.push(Panel {
            a: w[0],
            b: w[1],
            value,
            error,
        });
    }
    let mut panels = heap.len();
    loop {
        if !total.is_finite() || !total_err.is_finite() {
            return Err(Error::NonConvergence {
                value: total,
                achieved: total_err,
                requested: cfg.abs_tol.max(cfg.rel_tol * total.abs()),
            });
        }
        let target = cfg.abs_tol.max(cfg.rel_tol * total.abs());
        if total_err <= target {
            break;
        }
        let worst = match heap.pop() {
            Some(p) => p,
            None => break,
        };
        let mid = 0.5 * (worst.a + worst.b);
        if panels >= cfg.max_subdivisions || mid <= worst.a || mid >= worst.b {
            if panels >= cfg.max_subdivisions {
                heap.push(worst);
                return Err(Error::NonConvergence {
                    value: sign * total,
                    achieved: total_err,
                    requested: target,
                });
            }
            frozen_err += worst.error;
            continue;
        }
        let (v1, e1) = kronrod15(f, worst.a, mid);
        let (v2, e2) = kronrod15(f, mid, worst.b);
        evaluations += 30;
        panels += 1;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }
    // Recompute from panels to shed accumulated update rounding.
    let mut vals: Vec<(f64, f64, f64)> = heap.iter().map(|p| (p.a, p.value, p.error)).collect();
    vals.sort_by(|x, y| x.0.total_cmp(&y.0));
    let value: f64 = vals.iter().map(|v| v.1).sum();
    let err: f64 = vals.iter().map(|v| v.2).sum::<f64>() + frozen_err;
    let target = cfg.abs_tol.max(cfg.rel_tol * value.abs());
    if err > target * 1.000001 && frozen_err > 0.0 {
        return Err(Error::NonConvergence {
            value: sign * value,
            achieved: err,
            requested: target,
        });
    }
    Ok(QuadResult {
        value: sign * value,
        abs_error: err,
        evaluations,
    })
}

/// Integrate `f` over `[a, b]`, where either end may be infinite.
///
/// `breaks` are points where `f` (or one of its low derivatives) is not
/// smooth; they are honored even after the infinite-range transformation.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    cfg: &QuadratureConfig,
) -> Result<QuadResult> {
    integrate_dyn(&f, a, b, breaks, cfg)
}

fn integrate_dyn(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    breaks: &[f64],
    cfg: &QuadratureConfig,
) -> Result<QuadResult> {
    if a.is_nan() || b.is_nan() {
        return Err(Error::Domain("NaN integration limit".into()));
    }
    if a > b {
        let r = integrate_dyn(f, b, a, breaks, cfg)?;
        return Ok(QuadResult {
            value: -r.value,
            ..r
        });
    }
    match (a.is_finite(), b.is_finite()) {
        (true, true) => integrate_finite(f, a, b, breaks, cfg),
        (true, false) => {
            let g = |t: f64| {
                let s = 1.0 - t;
                let x = a + t / s;
                let v = f(x);
                if v == 0.0 {
                    0.0
                } else {
                    v / (s * s)
                }
            };
            let tb: Vec<f64> = breaks
                .iter()
                .filter(|&&p| p > a && p.is_finite())
                .map(|&p| (p - a) / (1.0 + p - a))
                .collect();
            integrate_finite(&g, 0.0, 1.0, &tb, cfg)
        }
        (false, true) => {
            let g = |t: f64| {
                let s = 1.0 - t;
                let x = b - t / s;
                let v = f(x);
                if v == 0.0 {
                    0.0
                } else {
                    v / (s * s)
                }
            };
            let tb: Vec<f64> = breaks
                .iter()
                .filter(|&&p| p < b && p.is_finite())
                .map(|&p| (b - p) / (1.0 + b - p))
                .collect();
            integrate_finite(&g, 0.0, 1.0, &tb, cfg)
        }
        (false, false) => {
            let mut finite: Vec<f64> = breaks.iter().copied().filter(|p| p.is_finite()).collect();
            finite.sort_by(f64::total_cmp);
            let split = finite.first().copied().unwrap_or(0.0);
            let half_cfg = cfg.tightened(0.5);
            let left = integrate_dyn(f, f64::NEG_INFINITY, split, &finite, &half_cfg)?;
            let right = integrate_dyn(f, split, f64::INFINITY, &finite, &half_cfg)?;
            Ok(QuadResult {
                value: left.value + right.value,
                abs_error: left.abs_error + right.abs_error,
                evaluations: left.evaluations + right.evaluations,
            })
        }
    }
}

/// Nested adaptive quadrature over a product region.
pub fn integrate_2d<F: Fn(f64, f64) -> f64>(
    f: F,
    x_range: (f64, f64),
    y_range: (f64, f64),
    cfg: &QuadratureConfig,
) -> Result<QuadResult> {
    let inner_cfg = cfg.tightened(1e-2);
    let inner_err = std::cell::Cell::new(0.0f64);
    let inner_fail = std::cell::Cell::new(None::<Error>);
    let evals = std::cell::Cell::new(0usize);
    let outer = integrate(
        |x| match integrate(|y| f(x, y), y_range.0, y_range.1, &[], &inner_cfg) {
            Ok(r) => {
                inner_err.set(inner_err.get().max(r.abs_error));
                evals.set(evals.get() + r.evaluations);
                r.value
            }
            Err(e) => {
                inner_fail.set(Some(e));
                0.0
            }
        },
        x_range.0,
        x_range.1,
        &[],
        cfg,
    )?;
    if let Some(e) = inner_fail.take() {
        return Err(e);
    }
    let x_len = if x_range.0.is_finite() && x_range.1.is_finite() {
        x_range.1 - x_range.0
    } else {
        1.0
    };
    Ok(QuadResult {
        value: outer.value,
        abs_error: outer.abs_error + inner_err.get() * x_len,
        evaluations: outer.evaluations + evals.get(),
    })
}

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Build the `n`-point rule by Newton iteration on P_n.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, z);
                dp = d;
                let dz = p / d;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, z);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Apply the rule on `[a, b]`.
    #[inline]
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(c + h * x);
        }
        acc * h
    }

    /// Apply the rule to two integrands sharing the same evaluation points.
    #[inline]
    pub fn integrate_pair<F: FnMut(f64) -> (f64, f64)>(&self, a: f64, b: f64, mut f: F) -> (f64, f64) {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let (mut p, mut q) = (0.0, 0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let (u, v) = f(c + h * x);
            p += w * u;
            q += w * v;
        }
        (p * h, q * h)
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

pub(crate) static GL5: LazyLock<GaussLegendre> = LazyLock::new(|| GaussLegendre::new(5));
pub(crate) static GL10: LazyLock<GaussLegendre> = LazyLock::new(|| GaussLegendre::new(10));
