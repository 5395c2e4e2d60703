//! Joint laws for the bivariate measures.

use crate::dist::{DistributionModel, Support};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum BivariateFamily {
    /// Gumbel's bivariate exponential,
    /// `((1 + θx)(1 + θy) - θ) exp(-(x + y + θxy))` on the positive quadrant.
    GumbelExponential { theta: f64 },
    Independent {
        x: Box<DistributionModel>,
        y: Box<DistributionModel>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BivariateModel {
    family: BivariateFamily,
}

impl BivariateModel {
    pub fn gumbel_exponential(theta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&theta) {
            return Err(Error::invalid("bvexp", format!("theta must lie in [0, 1], got {theta}")));
        }
        Ok(BivariateModel {
            family: BivariateFamily::GumbelExponential { theta },
        })
    }

    pub fn independent(x: DistributionModel, y: DistributionModel) -> Self {
        BivariateModel {
            family: BivariateFamily::Independent {
                x: Box::new(x),
                y: Box::new(y),
            },
        }
    }

    pub fn family(&self) -> &BivariateFamily {
        &self.family
    }

    pub fn name(&self) -> &str {
        match self.family {
            BivariateFamily::GumbelExponential { .. } => "bvexp",
            BivariateFamily::Independent { .. } => "indep",
        }
    }

    /// Marginal supports; the joint support is their product.
    pub fn support(&self) -> (Support, Support) {
        match &self.family {
            BivariateFamily::GumbelExponential { .. } => {
                let s = Support {
                    lower: 0.0,
                    upper: f64::INFINITY,
                };
                (s, s)
            }
            BivariateFamily::Independent { x, y } => (x.support(), y.support()),
        }
    }

    pub fn joint_pdf(&self, x: f64, y: f64) -> f64 {
        match &self.family {
            BivariateFamily::GumbelExponential { theta } => {
                if x < 0.0 || y < 0.0 {
                    return 0.0;
                }
                ((1.0 + theta * x) * (1.0 + theta * y) - theta) * (-(x + y + theta * x * y)).exp()
            }
            BivariateFamily::Independent { x: fx, y: fy } => fx.pdf(x) * fy.pdf(y),
        }
    }
}
