//! Observed samples.

use serde::Serialize;

use crate::error::{Error, Result};

/// Observations together with their ascending order and sample standard
/// deviation (divisor `n - 1`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleData {
    values: Vec<f64>,
    sorted: Vec<f64>,
    std_dev: f64,
}

impl SampleData {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("sample is empty".into()));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite observation {bad}")));
        }
        let mut sorted = values.clone();
        sorted.sort_by(|a, b| a.total_cmp(b));
        let std_dev = std_dev(&sorted);
        Ok(SampleData {
            values,
            sorted,
            std_dev,
        })
    }

    /// Observations in input order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Observations in ascending order.
    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Sample standard deviation; 0 for a single observation.
    pub fn std_dev(&self) -> f64 {
        self.std_dev
    }

    pub fn min(&self) -> f64 {
        self.sorted[0]
    }

    pub fn max(&self) -> f64 {
        self.sorted[self.sorted.len() - 1]
    }

    /// Empirical distribution function.
    pub fn ecdf(&self, x: f64) -> f64 {
        self.sorted.partition_point(|v| *v <= x) as f64 / self.n() as f64
    }

    /// `X_(ceil(n u))`; `u = 0` returns the minimum.
    pub fn empirical_quantile(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::Domain(format!("quantile level {u} outside [0, 1]")));
        }
        let n = self.n();
        let k = ((n as f64 * u).ceil() as usize).clamp(1, n);
        Ok(self.sorted[k - 1])
    }

    /// Same observations multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        SampleData::new(self.values.iter().map(|v| v * c).collect())
    }
}

fn std_dev(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    (ss / (n - 1) as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empirical_quantiles() {
        let s = SampleData::new(vec![3.0, 1.0, 4.0, 2.0]).unwrap();
        assert_eq!(s.empirical_quantile(0.5).unwrap(), 2.0);
        assert_eq!(s.empirical_quantile(1.0).unwrap(), 4.0);
        assert_eq!(s.empirical_quantile(0.51).unwrap(), 3.0);
        assert_eq!(s.empirical_quantile(0.0).unwrap(), 1.0);
        assert!(s.empirical_quantile(1.2).is_err());
    }

    #[test]
    fn std_dev_uses_n_minus_one() {
        let s = SampleData::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!((s.std_dev() - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(s.sorted(), &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.values(), &[1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn ecdf_steps() {
        let s = SampleData::new(vec![0.5, 0.1, 0.9]).unwrap();
        assert_eq!(s.ecdf(0.0), 0.0);
        assert!((s.ecdf(0.5) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(s.ecdf(2.0), 1.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(SampleData::new(vec![]).is_err());
        assert!(SampleData::new(vec![1.0, f64::NAN]).is_err());
    }
}
