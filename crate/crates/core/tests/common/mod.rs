#![allow(dead_code)]

use varextropy::DistributionModel;

/// One representative parameterization of every catalogue family, plus a few
/// extra settings for families whose behaviour depends on the parameters.
pub fn models() -> Vec<DistributionModel> {
    vec![
        DistributionModel::uniform(0.0, 1.0),
        DistributionModel::uniform(1.0, 3.0),
        DistributionModel::exponential(1.0),
        DistributionModel::exponential(2.5),
        DistributionModel::weibull(2.0, 1.0),
        DistributionModel::weibull(1.5, 3.0),
        DistributionModel::laplace(0.0, 1.0),
        DistributionModel::laplace(1.0, 2.0),
        DistributionModel::normal(0.0, 1.0),
        DistributionModel::normal(3.0, 2.0),
        DistributionModel::gamma(2.0, 1.0),
        DistributionModel::gamma(3.5, 2.0),
        DistributionModel::inv_gamma(3.0, 1.0),
        DistributionModel::beta(2.0, 1.0),
        DistributionModel::beta(2.0, 3.0),
        DistributionModel::reciprocal(0.25, 1.0),
        DistributionModel::reciprocal(0.25, 10.0),
        DistributionModel::piecewise(vec![0.2, 0.5, 0.3]),
        DistributionModel::power(2.0, 2.0),
        DistributionModel::log_logistic(0.5, 2.0),
        DistributionModel::pareto2(5.0, 3.0),
        DistributionModel::alt_power(0.25, 1.5),
        DistributionModel::alt_power(0.25, 2.0),
        DistributionModel::trunc_lognormal(0.25, 10.0),
    ]
    .into_iter()
    .map(|m| m.expect("valid parameters"))
    .collect()
}
