//! Monte Carlo harness: bias/MSE studies, simulated critical values for the
//! reciprocal null, goodness-of-fit decisions and power studies.
//!
//! Replication `r` of a cell draws from the stream `(seed, label, r)`, where
//! the label names the sampling law and sample size. All statistics of a cell
//! are computed on the same samples. Per-replication results are collected in
//! replication order and reduced with pairwise summation, so a report depends
//! only on its configuration and not on the number of worker threads.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::DistributionModel;
use crate::error::{Error, Result};
use crate::estimators::{estimate, EstimatorConfig, EstimatorKind, KernelScale};
use crate::measures::{weighted_varextropy, WeightFunction};
use crate::quad::QuadratureConfig;
use crate::rng::{stream_id_for, RandomStream};
use crate::sample::SampleData;
use crate::special::pairwise_sum;

/// A goodness-of-fit statistic: one of the estimators or Kolmogorov–Smirnov.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    Plugin,
    Resub,
    Quantile,
    Ks,
}

impl Statistic {
    pub const ALL: [Statistic; 4] = [Statistic::Plugin, Statistic::Resub, Statistic::Quantile, Statistic::Ks];

    pub fn as_str(&self) -> &'static str {
        match self {
            Statistic::Plugin => "plugin",
            Statistic::Resub => "resub",
            Statistic::Quantile => "quantile",
            Statistic::Ks => "ks",
        }
    }

    pub fn estimator(&self) -> Option<EstimatorKind> {
        match self {
            Statistic::Plugin => Some(EstimatorKind::Plugin),
            Statistic::Resub => Some(EstimatorKind::Resub),
            Statistic::Quantile => Some(EstimatorKind::Quantile),
            Statistic::Ks => None,
        }
    }
}

impl From<EstimatorKind> for Statistic {
    fn from(k: EstimatorKind) -> Self {
        match k {
            EstimatorKind::Plugin => Statistic::Plugin,
            EstimatorKind::Resub => Statistic::Resub,
            EstimatorKind::Quantile => Statistic::Quantile,
        }
    }
}

impl std::str::FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("ks") {
            return Ok(Statistic::Ks);
        }
        s.parse::<EstimatorKind>()
            .map(Statistic::from)
            .map_err(|_| Error::parse(s, "expected plugin, resub, quantile or ks"))
    }
}

impl std::fmt::Display for Statistic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Settings shared by every simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub reps: usize,
    pub seed: u64,
    pub scale: KernelScale,
    pub bandwidth: Option<f64>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            reps: 10_000,
            seed: 0,
            scale: KernelScale::StdDev,
            bandwidth: None,
        }
    }
}

impl SimConfig {
    pub fn new(reps: usize, seed: u64) -> Self {
        SimConfig {
            reps,
            seed,
            ..Default::default()
        }
    }

    fn estimator(&self, domain: (f64, f64)) -> EstimatorConfig {
        EstimatorConfig {
            scale: self.scale,
            bandwidth: self.bandwidth,
            domain,
        }
    }
}

/// Run `f` on a pool of `threads` workers (`None`: rayon's default).
pub fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        if t == 0 {
            return Err(Error::Domain("thread count must be at least 1".into()));
        }
        b = b.num_threads(t);
    }
    let pool = b
        .build()
        .map_err(|e| Error::Domain(format!("cannot build thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn replicate<T: Send>(reps: usize, f: impl Fn(u64) -> T + Sync + Send) -> Vec<T> {
    (0..reps as u64).into_par_iter().map(f).collect()
}

fn cell_stream(seed: u64, label: &str) -> RandomStream {
    RandomStream::new(seed, stream_id_for(label))
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let m = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = pairwise_sum(xs) / m;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let dev: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = pairwise_sum(&dev) / (m - 1.0);
    (mean, (var / m).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasMseRow {
    pub estimator: EstimatorKind,
    pub n: usize,
    pub model: String,
    pub true_value: f64,
    pub bias: f64,
    pub bias_se: f64,
    pub mse: f64,
    pub mse_se: f64,
    pub reps: usize,
    pub failures: usize,
    pub seed: u64,
}

/// Bias and MSE of each estimator in `kinds` over `cfg.reps` samples of size
/// `n` from `model`, against the model's `VJ^w` with φ(x) = x.
pub fn mc_bias_mse(
    model: &DistributionModel,
    kinds: &[EstimatorKind],
    n: usize,
    cfg: &SimConfig,
) -> Result<Vec<BiasMseRow>> {
    if cfg.reps < 100 {
        return Err(Error::Domain(format!("need at least 100 replications, got {}", cfg.reps)));
    }
    if n < 2 {
        return Err(Error::Domain(format!("sample size must be at least 2, got {n}")));
    }
    let truth = weighted_varextropy(model, &WeightFunction::Identity, &QuadratureConfig::default())?.value;
    let per_rep = simulate_estimates(model, kinds, n, cfg)?;

    let mut rows = Vec::with_capacity(kinds.len());
    for (j, kind) in kinds.iter().enumerate() {
        let errs: Vec<f64> = per_rep.iter().filter_map(|r| r[j]).map(|v| v - truth).collect();
        let sq: Vec<f64> = errs.iter().map(|e| e * e).collect();
        let (bias, bias_se) = mean_and_se(&errs);
        let (mse, mse_se) = mean_and_se(&sq);
        rows.push(BiasMseRow {
            estimator: *kind,
            n,
            model: model.to_string(),
            true_value: truth,
            bias,
            bias_se,
            mse,
            mse_se,
            reps: cfg.reps,
            failures: cfg.reps - errs.len(),
            seed: cfg.seed,
        });
    }
    Ok(rows)
}

/// Estimates of each kind in `kinds` on `cfg.reps` samples of size `n` from
/// `model`, one vector per replication in replication order. The plug-in
/// integrals are clipped to the model's support; failed estimates are `None`.
pub fn simulate_estimates(
    model: &DistributionModel,
    kinds: &[EstimatorKind],
    n: usize,
    cfg: &SimConfig,
) -> Result<Vec<Vec<Option<f64>>>> {
    let sup = model.support();
    let ecfg = cfg.estimator((sup.lower, sup.upper));
    let label = format!("bias|{model}|n={n}");
    let base = cell_stream(cfg.seed, &label);
    let per_rep: Vec<Result<Vec<Option<f64>>>> = replicate(cfg.reps, |r| {
        let mut s = base.replication(r);
        let sample = model.sample(n, &mut s)?;
        Ok(kinds
            .iter()
            .map(|k| estimate(&sample, *k, &ecfg).ok().map(|e| e.value).filter(|v| v.is_finite()))
            .collect())
    });
    per_rep.into_iter().collect()
}

/// `max(max_i {i/n - U_(i)}, max_i {U_(i) - (i-1)/n})` with `U_i = F0(X_i)`.
pub fn ks_statistic(sample: &SampleData, null_cdf: &dyn Fn(f64) -> f64) -> f64 {
    let mut u: Vec<f64> = sample.values().iter().map(|x| null_cdf(*x)).collect();
    u.sort_by(f64::total_cmp);
    ks_from_sorted_uniforms(&u)
}

fn ks_from_sorted_uniforms(u: &[f64]) -> f64 {
    let nf = u.len() as f64;
    let mut d = 0.0f64;
    for (i, ui) in u.iter().enumerate() {
        d = d.max((i + 1) as f64 / nf - ui).max(ui - i as f64 / nf);
    }
    d
}

/// The reciprocal law on `[a, b]` as the null of the test.
fn null_model(a: f64, b: f64) -> Result<DistributionModel> {
    DistributionModel::reciprocal(a, b)
}

/// Value of `stat` on `sample` with the estimators clipped to the null
/// support `[a, b]`.
pub fn statistic_value(
    sample: &SampleData,
    stat: Statistic,
    null: &DistributionModel,
    cfg: &SimConfig,
) -> Result<f64> {
    match stat.estimator() {
        Some(kind) => {
            let sup = null.support();
            Ok(estimate(sample, kind, &cfg.estimator((sup.lower, sup.upper)))?.value)
        }
        None => Ok(ks_statistic(sample, &|x| null.cdf(x))),
    }
}

/// Statistics of `stats` on `cfg.reps` samples of size `n` from `law`,
/// tested against the reciprocal null on `[a, b]`. Column `j` holds the
/// values of `stats[j]` in replication order; failed replications are
/// `None`.
fn simulate_statistics(
    law: &DistributionModel,
    stats: &[Statistic],
    n: usize,
    null: &DistributionModel,
    cfg: &SimConfig,
    label: &str,
) -> Result<Vec<Vec<Option<f64>>>> {
    if cfg.reps < 100 {
        return Err(Error::Domain(format!("need at least 100 replications, got {}", cfg.reps)));
    }
    if n < 2 {
        return Err(Error::Domain(format!("sample size must be at least 2, got {n}")));
    }
    let base = cell_stream(cfg.seed, label);
    let per_rep: Vec<Result<Vec<Option<f64>>>> = replicate(cfg.reps, |r| {
        let mut s = base.replication(r);
        let sample = law.sample(n, &mut s)?;
        Ok(stats
            .iter()
            .map(|st| statistic_value(&sample, *st, null, cfg).ok().filter(|v| v.is_finite()))
            .collect())
    });
    let per_rep: Vec<Vec<Option<f64>>> = per_rep.into_iter().collect::<Result<_>>()?;
    Ok((0..stats.len())
        .map(|j| per_rep.iter().map(|r| r[j]).collect())
        .collect())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

/// Order statistic at `⌈(1-α) m⌉` of the successful values.
fn upper_quantile(values: &[Option<f64>], alpha: f64) -> Result<(f64, usize)> {
    let mut v: Vec<f64> = values.iter().flatten().copied().collect();
    if v.is_empty() {
        return Err(Error::Domain("every replication failed".into()));
    }
    v.sort_by(f64::total_cmp);
    let m = v.len();
    let k = ((1.0 - alpha) * m as f64).ceil() as usize;
    Ok((v[k.clamp(1, m) - 1], values.len() - m))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalValue {
    pub estimator: Statistic,
    pub n: usize,
    pub alpha: f64,
    pub a: f64,
    pub b: f64,
    pub reps: usize,
    pub seed: u64,
    pub value: f64,
    #[serde(default)]
    pub failures: usize,
}

/// Simulated `(1-α)` critical values for every statistic in `stats`, sharing
/// the null samples.
pub fn critical_values(
    stats: &[Statistic],
    n: usize,
    alpha: f64,
    a: f64,
    b: f64,
    cfg: &SimConfig,
) -> Result<Vec<CriticalValue>> {
    check_alpha(alpha)?;
    let null = null_model(a, b)?;
    let label = format!("null|{null}|n={n}");
    let cols = simulate_statistics(&null, stats, n, &null, cfg, &label)?;
    stats
        .iter()
        .zip(&cols)
        .map(|(st, col)| {
            let (value, failures) = upper_quantile(col, alpha)?;
            Ok(CriticalValue {
                estimator: *st,
                n,
                alpha,
                a,
                b,
                reps: cfg.reps,
                seed: cfg.seed,
                value,
                failures,
            })
        })
        .collect()
}

pub fn reciprocal_critical_value(
    stat: Statistic,
    n: usize,
    alpha: f64,
    a: f64,
    b: f64,
    cfg: &SimConfig,
) -> Result<f64> {
    Ok(critical_values(&[stat], n, alpha, a, b, cfg)?[0].value)
}

/// Persistent critical values keyed by `(estimator, n, α, a, b, reps, seed)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CriticalValueCache {
    pub entries: Vec<CriticalValue>,
}

impl CriticalValueCache {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let c: CriticalValueCache =
            serde_json::from_str(s).map_err(|e| Error::parse("critical-value cache", e.to_string()))?;
        for e in &c.entries {
            if !e.value.is_finite() || !(e.a > 0.0 && e.a < e.b) || !(e.alpha > 0.0 && e.alpha < 1.0) {
                return Err(Error::parse("critical-value cache", "entry with invalid a, b, alpha or value"));
            }
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Ok(Self::default());
        }
        let s = std::fs::read_to_string(path)?;
        Self::from_json_str(&s)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("cache serializes")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json_string())?;
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    pub fn lookup(&self, stat: Statistic, n: usize, alpha: f64, a: f64, b: f64, reps: usize, seed: u64) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| {
                e.estimator == stat
                    && e.n == n
                    && e.alpha == alpha
                    && e.a == a
                    && e.b == b
                    && e.reps == reps
                    && e.seed == seed
            })
            .map(|e| e.value)
    }

    pub fn insert(&mut self, cv: CriticalValue) {
        self.entries.retain(|e| {
            !(e.estimator == cv.estimator
                && e.n == cv.n
                && e.alpha == cv.alpha
                && e.a == cv.a
                && e.b == cv.b
                && e.reps == cv.reps
                && e.seed == cv.seed)
        });
        self.entries.push(cv);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GofResult {
    pub statistic: f64,
    pub critical_value: f64,
    pub alpha: f64,
    pub reject: bool,
    pub estimator: Statistic,
    pub n: usize,
}

/// Where the critical value of a test comes from.
#[derive(Debug, Clone)]
pub enum CriticalSource {
    Value(f64),
    Simulate(SimConfig),
    /// Look up in the cache, simulating and inserting on a miss.
    Cache(SimConfig, std::path::PathBuf),
}

/// Test the reciprocal null on `[a, b]`: reject when the statistic is at least
/// the critical value.
pub fn gof_test(
    sample: &SampleData,
    stat: Statistic,
    alpha: f64,
    a: f64,
    b: f64,
    source: &CriticalSource,
) -> Result<GofResult> {
    check_alpha(alpha)?;
    let null = null_model(a, b)?;
    if sample.n() < 2 {
        return Err(Error::Domain(format!("need at least 2 observations, got {}", sample.n())));
    }
    if let Some((i, x)) = sample.values().iter().enumerate().find(|(_, x)| !(**x >= a && **x <= b)) {
        return Err(Error::Domain(format!(
            "observation {} = {x} lies outside the null support [{a}, {b}]",
            i + 1
        )));
    }
    let n = sample.n();
    let critical_value = match source {
        CriticalSource::Value(c) => *c,
        CriticalSource::Simulate(cfg) => reciprocal_critical_value(stat, n, alpha, a, b, cfg)?,
        CriticalSource::Cache(cfg, path) => {
            let mut cache = CriticalValueCache::load(path)?;
            match cache.lookup(stat, n, alpha, a, b, cfg.reps, cfg.seed) {
                Some(c) => c,
                None => {
                    let cv = critical_values(&[stat], n, alpha, a, b, cfg)?.remove(0);
                    let c = cv.value;
                    cache.insert(cv);
                    cache.save(path)?;
                    c
                }
            }
        }
    };
    let cfg = match source {
        CriticalSource::Simulate(c) | CriticalSource::Cache(c, _) => *c,
        CriticalSource::Value(_) => SimConfig::default(),
    };
    let statistic = statistic_value(sample, stat, &null, &cfg)?;
    Ok(GofResult {
        statistic,
        critical_value,
        alpha,
        reject: statistic >= critical_value,
        estimator: stat,
        n,
    })
}

/// Alternatives of the power study, each with its null interval `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub enum Scenario {
    /// `F(x) = 1 - (1-x)^k / (1-a)^k` on `(a, 1)`, one alternative per `k`.
    AltPower { a: f64, ks: Vec<f64> },
    /// Standard lognormal truncated to `(a, b)`.
    TruncLogNormal { a: f64, b: f64 },
}

impl Scenario {
    /// The first study: `a = 1/4`, `b = 1`, `A_1.5` and `A_2`.
    pub fn first() -> Self {
        Scenario::AltPower { a: 0.25, ks: vec![1.5, 2.0] }
    }

    /// The second study: `a = 1/4`, `b = 10`, truncated lognormal.
    pub fn second() -> Self {
        Scenario::TruncLogNormal { a: 0.25, b: 10.0 }
    }

    pub fn null_interval(&self) -> (f64, f64) {
        match self {
            Scenario::AltPower { a, .. } => (*a, 1.0),
            Scenario::TruncLogNormal { a, b } => (*a, *b),
        }
    }

    /// `(label, law)` for each alternative.
    pub fn alternatives(&self) -> Result<Vec<(String, DistributionModel)>> {
        match self {
            Scenario::AltPower { a, ks } => ks
                .iter()
                .map(|k| Ok((format!("A_{k}"), DistributionModel::alt_power(*a, *k)?)))
                .collect(),
            Scenario::TruncLogNormal { a, b } => Ok(vec![("TL".to_string(), DistributionModel::trunc_lognormal(*a, *b)?)]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerRow {
    pub estimator: Statistic,
    pub n: usize,
    pub alternative: String,
    pub power: f64,
    pub mc_se: f64,
    pub critical_value: f64,
    pub reps: usize,
    pub failures: usize,
    pub seed: u64,
}

/// Rejection frequencies under each alternative of `scenario`, with critical
/// values taken from `crit` (one per statistic and n).
pub fn power_study(
    scenario: &Scenario,
    stats: &[Statistic],
    n_list: &[usize],
    alpha: f64,
    crit: &[CriticalValue],
    cfg: &SimConfig,
) -> Result<Vec<PowerRow>> {
    check_alpha(alpha)?;
    let (a, b) = scenario.null_interval();
    let null = null_model(a, b)?;
    let mut rows = Vec::new();
    for (name, law) in scenario.alternatives()? {
        for &n in n_list {
            let cvals: Vec<f64> = stats
                .iter()
                .map(|st| {
                    crit.iter()
                        .find(|c| c.estimator == *st && c.n == n && c.alpha == alpha && c.a == a && c.b == b)
                        .map(|c| c.value)
                        .ok_or_else(|| Error::Domain(format!("no critical value for {st} at n = {n}")))
                })
                .collect::<Result<_>>()?;
            let label = format!("alt|{law}|n={n}");
            let cols = simulate_statistics(&law, stats, n, &null, cfg, &label)?;
            for ((st, col), c) in stats.iter().zip(&cols).zip(&cvals) {
                let hits: Vec<f64> = col.iter().flatten().map(|v| if *v >= *c { 1.0 } else { 0.0 }).collect();
                let m = hits.len();
                let p = if m > 0 { pairwise_sum(&hits) / m as f64 } else { f64::NAN };
                rows.push(PowerRow {
                    estimator: *st,
                    n,
                    alternative: name.clone(),
                    power: p,
                    mc_se: (p * (1.0 - p) / m as f64).sqrt(),
                    critical_value: *c,
                    reps: cfg.reps,
                    failures: cfg.reps - m,
                    seed: cfg.seed,
                });
            }
        }
    }
    Ok(rows)
}

/// Rejection frequency of `stat` under the null itself at critical value `c`;
/// the samples use a stream independent of the one behind `c`.
pub fn null_rejection_rate(
    stat: Statistic,
    n: usize,
    a: f64,
    b: f64,
    c: f64,
    cfg: &SimConfig,
) -> Result<(f64, f64)> {
    let null = null_model(a, b)?;
    let label = format!("level|{null}|n={n}");
    let col = simulate_statistics(&null, &[stat], n, &null, cfg, &label)?.remove(0);
    let hits: Vec<f64> = col.iter().flatten().map(|v| if *v >= c { 1.0 } else { 0.0 }).collect();
    let m = hits.len() as f64;
    let p = pairwise_sum(&hits) / m;
    Ok((p, (p * (1.0 - p) / m).sqrt()))
}

/// One cell of a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub estimator: String,
    pub n: usize,
    pub alternative: String,
    pub metric: String,
    pub value: f64,
    pub mc_se: Option<f64>,
    pub reps: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportTable {
    pub name: String,
    pub rows: Vec<ReportRow>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SimulationReport {
    pub tables: Vec<ReportTable>,
}

impl SimulationReport {
    pub fn push_bias_mse(&mut self, name: &str, rows: &[BiasMseRow]) {
        let mut out = Vec::new();
        for r in rows {
            for (metric, value, se) in [("bias", r.bias, r.bias_se), ("mse", r.mse, r.mse_se)] {
                out.push(ReportRow {
                    estimator: r.estimator.to_string(),
                    n: r.n,
                    alternative: r.model.clone(),
                    metric: metric.into(),
                    value,
                    mc_se: Some(se),
                    reps: r.reps,
                    seed: r.seed,
                });
            }
        }
        self.tables.push(ReportTable { name: name.into(), rows: out });
    }

    pub fn push_critical(&mut self, name: &str, rows: &[CriticalValue]) {
        let out = rows
            .iter()
            .map(|c| ReportRow {
                estimator: c.estimator.to_string(),
                n: c.n,
                alternative: "null".into(),
                metric: "critical_value".into(),
                value: c.value,
                mc_se: None,
                reps: c.reps,
                seed: c.seed,
            })
            .collect();
        self.tables.push(ReportTable { name: name.into(), rows: out });
    }

    pub fn push_power(&mut self, name: &str, rows: &[PowerRow]) {
        let out = rows
            .iter()
            .map(|p| ReportRow {
                estimator: p.estimator.to_string(),
                n: p.n,
                alternative: p.alternative.clone(),
                metric: "power".into(),
                value: p.power,
                mc_se: Some(p.mc_se),
                reps: p.reps,
                seed: p.seed,
            })
            .collect();
        self.tables.push(ReportTable { name: name.into(), rows: out });
    }

    /// One line per cell; numbers in shortest round-trip form.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["estimator", "n", "alternative", "metric", "value", "mc_se", "reps", "seed"])
            .expect("in-memory write");
        for t in &self.tables {
            for r in &t.rows {
                w.write_record([
                    r.estimator.clone(),
                    r.n.to_string(),
                    r.alternative.clone(),
                    r.metric.clone(),
                    format!("{:?}", r.value),
                    r.mc_se.map(|v| format!("{v:?}")).unwrap_or_default(),
                    r.reps.to_string(),
                    r.seed.to_string(),
                ])
                .expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Tables with n as rows and `(metric, estimator)` as columns.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for t in &self.tables {
            out.push_str(&t.name);
            out.push('\n');
            let mut cols: Vec<(String, String, String)> = Vec::new();
            let mut grid: BTreeMap<usize, BTreeMap<usize, f64>> = BTreeMap::new();
            for r in &t.rows {
                let key = (r.alternative.clone(), r.metric.clone(), r.estimator.clone());
                let ci = match cols.iter().position(|c| *c == key) {
                    Some(i) => i,
                    None => {
                        cols.push(key);
                        cols.len() - 1
                    }
                };
                grid.entry(r.n).or_default().insert(ci, r.value);
            }
            // Group rows by alternative when there are several.
            let mut alts: Vec<String> = Vec::new();
            for c in &cols {
                if !alts.contains(&c.0) {
                    alts.push(c.0.clone());
                }
            }
            for alt in &alts {
                let idx: Vec<usize> = (0..cols.len()).filter(|i| cols[*i].0 == *alt).collect();
                if alts.len() > 1 {
                    out.push_str(&format!("  {alt}\n"));
                }
                out.push_str(&format!("{:>6}", "n"));
                for i in &idx {
                    let head = if cols[*i].1 == "power" || cols[*i].1 == "critical_value" {
                        cols[*i].2.clone()
                    } else {
                        format!("{}:{}", cols[*i].1, cols[*i].2)
                    };
                    out.push_str(&format!(" {head:>16}"));
                }
                out.push('\n');
                for (n, row) in &grid {
                    if !idx.iter().any(|i| row.contains_key(i)) {
                        continue;
                    }
                    out.push_str(&format!("{n:>6}"));
                    for i in &idx {
                        let cell = row.get(i).map(|v| fmt_sig(*v, 6)).unwrap_or_else(|| "-".into());
                        out.push_str(&format!(" {cell:>16}"));
                    }
                    out.push('\n');
                }
            }
            out.push('\n');
        }
        out
    }
}

/// `v` with at least `digits` significant digits.
pub fn fmt_sig(v: f64, digits: usize) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    if v == 0.0 {
        return format!("{:.*}", digits - 1, 0.0);
    }
    let mag = v.abs().log10().floor() as i32;
    let decimals = digits as i32 - 1 - mag;
    if (-4..=12).contains(&mag) && decimals >= 0 {
        format!("{:.*}", decimals as usize, v)
    } else {
        format!("{:.*e}", digits - 1, v)
    }
}

/// Sample sizes of the bias/MSE tables.
pub const BIAS_SIZES: [usize; 5] = [10, 20, 30, 50, 100];
/// Sample sizes of the critical-value tables.
pub const CRIT_SIZES: [usize; 7] = [10, 20, 30, 40, 50, 75, 100];
/// Sample sizes of the power tables.
pub const POWER_SIZES: [usize; 5] = [10, 20, 30, 40, 50];

/// Bias/MSE table for gamma(2,1) (`table = 1`) or beta(2,1) (`table = 2`).
pub fn bias_table(table: u32, sizes: &[usize], cfg: &SimConfig) -> Result<SimulationReport> {
    let (name, model) = match table {
        1 => ("bias and MSE, gamma(2,1)", DistributionModel::gamma(2.0, 1.0)?),
        2 => ("bias and MSE, beta(2,1)", DistributionModel::beta(2.0, 1.0)?),
        _ => return Err(Error::Domain(format!("unknown table {table}; expected 1 or 2"))),
    };
    let mut rows = Vec::new();
    for &n in sizes {
        rows.extend(mc_bias_mse(&model, &EstimatorKind::ALL, n, cfg)?);
    }
    let mut report = SimulationReport::default();
    report.push_bias_mse(name, &rows);
    Ok(report)
}

/// Critical values and powers for scenario 1 or 2 at α = 0.05.
pub fn power_tables(
    scenario_id: u32,
    crit_sizes: &[usize],
    power_sizes: &[usize],
    crit_cfg: &SimConfig,
    power_cfg: &SimConfig,
) -> Result<(SimulationReport, Vec<CriticalValue>, Vec<PowerRow>)> {
    let scenario = match scenario_id {
        1 => Scenario::first(),
        2 => Scenario::second(),
        _ => return Err(Error::Domain(format!("unknown scenario {scenario_id}; expected 1 or 2"))),
    };
    let alpha = 0.05;
    let (a, b) = scenario.null_interval();
    let mut sizes: Vec<usize> = crit_sizes.iter().chain(power_sizes).copied().collect();
    sizes.sort_unstable();
    sizes.dedup();
    let mut crit = Vec::new();
    for &n in &sizes {
        crit.extend(critical_values(&Statistic::ALL, n, alpha, a, b, crit_cfg)?);
    }
    let power = power_study(&scenario, &Statistic::ALL, power_sizes, alpha, &crit, power_cfg)?;
    let mut report = SimulationReport::default();
    let shown: Vec<CriticalValue> = crit
        .iter()
        .filter(|c| crit_sizes.contains(&c.n) && c.estimator != Statistic::Ks)
        .cloned()
        .collect();
    report.push_critical(&format!("critical values, alpha = {alpha}, a = {a}, b = {b}"), &shown);
    report.push_power(&format!("power, alpha = {alpha}, a = {a}, b = {b}"), &power);
    Ok((report, crit, power))
}
