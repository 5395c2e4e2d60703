//! Text formats: model specs, signatures, sample files.
//!
//! A model spec is a catalogue name followed by `key=value` pairs, e.g.
//! `exp lambda=1` or `reciprocal a=0.25 b=1`. Values may be decimals or
//! rationals such as `1/4`; the piecewise family takes a comma list,
//! `piecewise weights=0.2,0.3,0.5`.

use std::collections::BTreeMap;

use crate::bivariate::BivariateModel;
use crate::dist::DistributionModel;
use crate::error::{Error, Result};
use crate::sample::SampleData;

/// A catalogue entry as listed by [`catalog`].
#[derive(Debug, Clone, Copy)]
pub struct CatalogEntry {
    pub name: &'static str,
    /// `(key, default)`; `None` marks a required key.
    pub params: &'static [(&'static str, Option<f64>)],
    pub description: &'static str,
}

const CATALOG: &[CatalogEntry] = &[
    CatalogEntry {
        name: "uniform",
        params: &[("a", Some(0.0)), ("b", Some(1.0))],
        description: "uniform on (a, b)",
    },
    CatalogEntry {
        name: "exp",
        params: &[("lambda", Some(1.0))],
        description: "exponential with rate lambda",
    },
    CatalogEntry {
        name: "weibull",
        params: &[("alpha", None), ("lambda", Some(1.0))],
        description: "F(x) = 1 - exp(-lambda x^alpha)",
    },
    CatalogEntry {
        name: "laplace",
        params: &[("mu", Some(0.0)), ("beta", Some(1.0))],
        description: "Laplace with location mu and scale beta",
    },
    CatalogEntry {
        name: "normal",
        params: &[("mu", Some(0.0)), ("sigma", Some(1.0))],
        description: "normal with mean mu and standard deviation sigma",
    },
    CatalogEntry {
        name: "gamma",
        params: &[("shape", None), ("rate", Some(1.0))],
        description: "gamma with shape and rate",
    },
    CatalogEntry {
        name: "invgamma",
        params: &[("alpha", None), ("beta", Some(1.0))],
        description: "inverse gamma with shape alpha and scale beta",
    },
    CatalogEntry {
        name: "beta",
        params: &[("a", None), ("b", None)],
        description: "beta(a, b) on (0, 1)",
    },
    CatalogEntry {
        name: "reciprocal",
        params: &[("a", None), ("b", None)],
        description: "density 1/(x ln(b/a)) on (a, b)",
    },
    CatalogEntry {
        name: "piecewise",
        params: &[("weights", None)],
        description: "density weights[j] on [j, j+1); comma-separated weights summing to 1",
    },
    CatalogEntry {
        name: "power",
        params: &[("beta", None), ("scale", Some(2.0))],
        description: "density beta/scale (x/scale)^(beta-1) on (0, scale)",
    },
    CatalogEntry {
        name: "loglogistic",
        params: &[("scale", Some(0.5)), ("shape", Some(2.0))],
        description: "F(x) = (x/scale)^shape / (1 + (x/scale)^shape); defaults give 8x/(4x^2+1)^2",
    },
    CatalogEntry {
        name: "pareto2",
        params: &[("alpha", Some(5.0)), ("sigma", Some(3.0))],
        description: "Lomax density alpha/sigma (1 + x/sigma)^(-alpha-1)",
    },
    CatalogEntry {
        name: "ak",
        params: &[("a", Some(0.25)), ("k", None)],
        description: "F(x) = 1 - ((1-x)/(1-a))^k on (a, 1)",
    },
    CatalogEntry {
        name: "tl",
        params: &[("a", Some(0.25)), ("b", Some(1.0)), ("mu", Some(0.0)), ("sigma", Some(1.0))],
        description: "lognormal(mu, sigma) truncated to (a, b)",
    },
];

const ALIASES: &[(&str, &str)] = &[
    ("exponential", "exp"),
    ("gauss", "normal"),
    ("inverse-gamma", "invgamma"),
    ("log-logistic", "loglogistic"),
    ("lomax", "pareto2"),
    ("pareto-ii", "pareto2"),
    ("truncated-lognormal", "tl"),
];

/// All catalogue entries.
pub fn catalog() -> &'static [CatalogEntry] {
    CATALOG
}

/// Parse a decimal or a rational `p/q`.
pub fn parse_number(token: &str) -> Result<f64> {
    let t = token.trim();
    if t.is_empty() {
        return Err(Error::parse(token, "empty number"));
    }
    let v = match t.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| Error::parse(token, "bad numerator"))?;
            let q: f64 = q.trim().parse().map_err(|_| Error::parse(token, "bad denominator"))?;
            if q == 0.0 {
                return Err(Error::parse(token, "zero denominator"));
            }
            p / q
        }
        None => t.parse().map_err(|_| Error::parse(token, "not a number"))?,
    };
    if !v.is_finite() {
        return Err(Error::parse(token, "not finite"));
    }
    Ok(v)
}

fn parse_list(token: &str) -> Result<Vec<f64>> {
    token.split(',').map(parse_number).collect()
}

/// Parse a model spec such as `reciprocal a=1/4 b=1`.
pub fn parse_model_spec(spec: &str) -> Result<DistributionModel> {
    let mut words = spec.split_whitespace();
    let raw = words.next().ok_or_else(|| Error::parse(spec, "empty model spec"))?;
    let lower = raw.to_ascii_lowercase();
    let name = ALIASES
        .iter()
        .find(|(a, _)| *a == lower)
        .map(|(_, n)| *n)
        .unwrap_or(lower.as_str());
    let entry = CATALOG
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::parse(raw, "unknown model"))?;

    let mut given: BTreeMap<&str, &str> = BTreeMap::new();
    for w in words {
        let (k, v) = w
            .split_once('=')
            .ok_or_else(|| Error::parse(w, "expected key=value"))?;
        if !entry.params.iter().any(|(p, _)| *p == k) {
            return Err(Error::parse(w, format!("unknown parameter for `{}`", entry.name)));
        }
        if given.insert(k, v).is_some() {
            return Err(Error::parse(w, "duplicate parameter"));
        }
    }

    if entry.name == "piecewise" {
        let w = given
            .get("weights")
            .ok_or_else(|| Error::parse(spec, "piecewise needs weights=..."))?;
        return DistributionModel::piecewise(parse_list(w)?);
    }

    let mut vals = Vec::with_capacity(entry.params.len());
    for (k, default) in entry.params {
        let v = match given.get(k) {
            Some(tok) => parse_number(tok)?,
            None => default.ok_or_else(|| {
                Error::parse(spec, format!("missing required parameter `{k}`"))
            })?,
        };
        vals.push(v);
    }
    let p = |i: usize| vals[i];
    match entry.name {
        "uniform" => DistributionModel::uniform(p(0), p(1)),
        "exp" => DistributionModel::exponential(p(0)),
        "weibull" => DistributionModel::weibull(p(0), p(1)),
        "laplace" => DistributionModel::laplace(p(0), p(1)),
        "normal" => DistributionModel::normal(p(0), p(1)),
        "gamma" => DistributionModel::gamma(p(0), p(1)),
        "invgamma" => DistributionModel::inv_gamma(p(0), p(1)),
        "beta" => DistributionModel::beta(p(0), p(1)),
        "reciprocal" => DistributionModel::reciprocal(p(0), p(1)),
        "power" => DistributionModel::power(p(0), p(1)),
        "loglogistic" => DistributionModel::log_logistic(p(0), p(1)),
        "pareto2" => DistributionModel::pareto2(p(0), p(1)),
        "ak" => DistributionModel::alt_power(p(0), p(1)),
        "tl" => DistributionModel::new(crate::dist::Family::TruncLogNormal {
            a: p(0),
            b: p(1),
            mu: p(2),
            sigma: p(3),
        }),
        _ => unreachable!("catalogue table and constructor list out of sync"),
    }
}

/// Parse `bvexp theta=0.5` or `indep <spec> ; <spec>`.
pub fn parse_bivariate_spec(spec: &str) -> Result<BivariateModel> {
    let t = spec.trim();
    let (head, rest) = t.split_once(char::is_whitespace).unwrap_or((t, ""));
    match head.to_ascii_lowercase().as_str() {
        "bvexp" => {
            let mut theta = 0.0;
            for w in rest.split_whitespace() {
                match w.split_once('=') {
                    Some(("theta", v)) => theta = parse_number(v)?,
                    _ => return Err(Error::parse(w, "expected theta=value")),
                }
            }
            BivariateModel::gumbel_exponential(theta)
        }
        "indep" => {
            let (x, y) = rest
                .split_once(';')
                .ok_or_else(|| Error::parse(spec, "expected `indep <spec> ; <spec>`"))?;
            Ok(BivariateModel::independent(parse_model_spec(x)?, parse_model_spec(y)?))
        }
        "" => Err(Error::parse(spec, "empty bivariate spec")),
        _ => Err(Error::parse(head, "unknown bivariate model")),
    }
}

/// Parse a comma-separated signature, e.g. `0,1/6,7/12,1/4`, checking that
/// entries are nonnegative and sum to 1 within 1e-9.
pub fn parse_signature(text: &str) -> Result<Vec<f64>> {
    let s = parse_list(text.trim())?;
    if let Some(bad) = s.iter().find(|v| **v < 0.0) {
        return Err(Error::parse(format!("{bad}"), "signature entries must be nonnegative"));
    }
    let total: f64 = s.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::parse(text, format!("signature sums to {total}, not 1")));
    }
    Ok(s)
}

/// Parse observations: one per line, `#` starts a comment, blank lines are
/// skipped. A single-column CSV is accepted, including a non-numeric header
/// on the first data line.
pub fn parse_sample_text(text: &str) -> Result<SampleData> {
    let mut values = Vec::new();
    let mut first = true;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let cell = line.trim_end_matches(',').trim().trim_matches('"');
        if cell.contains(',') {
            return Err(Error::parse(
                raw,
                format!("line {}: expected a single column", lineno + 1),
            ));
        }
        match cell.parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            Ok(_) => {
                return Err(Error::parse(cell, format!("line {}: not finite", lineno + 1)));
            }
            Err(_) if first && cell.chars().any(|c| c.is_alphabetic()) => {}
            Err(_) => {
                return Err(Error::parse(cell, format!("line {}: not a number", lineno + 1)));
            }
        }
        first = false;
    }
    if values.is_empty() {
        return Err(Error::parse(text.lines().next().unwrap_or(""), "no observations"));
    }
    SampleData::new(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Family;

    #[test]
    fn numbers() {
        assert_eq!(parse_number("1/4").unwrap(), 0.25);
        assert_eq!(parse_number(" 2.5 ").unwrap(), 2.5);
        assert!(parse_number("1/0").is_err());
        assert!(parse_number("abc").is_err());
        assert!(parse_number("inf").is_err());
    }

    #[test]
    fn model_specs() {
        let m = parse_model_spec("exp lambda=1").unwrap();
        assert_eq!(m.family(), &Family::Exponential { rate: 1.0 });
        let r = parse_model_spec("reciprocal a=1/4 b=1").unwrap();
        assert_eq!(r.family(), &Family::Reciprocal { a: 0.25, b: 1.0 });
        let p = parse_model_spec("piecewise weights=0.25,1/4,0.5").unwrap();
        assert_eq!(p.support().upper, 3.0);
        assert!(parse_model_spec("exponential").is_ok());
        assert!(parse_model_spec("").is_err());
        assert!(parse_model_spec("exp rate=1").is_err());
        assert!(parse_model_spec("exp lambda=1 lambda=2").is_err());
        assert!(parse_model_spec("beta a=2").is_err());
        assert!(parse_model_spec("reciprocal a=0 b=1").is_err());
    }

    #[test]
    fn every_catalogue_entry_parses_with_defaults() {
        let fill = |e: &CatalogEntry| -> String {
            let mut s = e.name.to_string();
            for (k, d) in e.params {
                if d.is_none() {
                    let v = match (e.name, *k) {
                        ("piecewise", _) => "0.5,0.5",
                        ("beta", _) => "2",
                        ("reciprocal", "a") => "0.25",
                        _ => "1.5",
                    };
                    s.push_str(&format!(" {k}={v}"));
                }
            }
            s
        };
        for e in catalog() {
            parse_model_spec(&fill(e)).unwrap_or_else(|err| panic!("{}: {err}", e.name));
        }
    }

    #[test]
    fn signatures() {
        assert_eq!(parse_signature("1/3,2/3,0").unwrap().len(), 3);
        assert!(parse_signature("0,1/6,7/12,1/4").is_ok());
        assert!(parse_signature("0.5,0.6").is_err());
        assert!(parse_signature("-0.5,1.5").is_err());
    }

    #[test]
    fn sample_files() {
        let s = parse_sample_text("# header\n0.5\n\n0.25 # trailing\n1\n").unwrap();
        assert_eq!(s.sorted(), &[0.25, 0.5, 1.0]);
        let c = parse_sample_text("x\n1.5,\n2.5\n").unwrap();
        assert_eq!(c.n(), 2);
        assert!(parse_sample_text("1\nfoo\n").is_err());
        assert!(parse_sample_text("1,2\n").is_err());
        assert!(parse_sample_text("# nothing\n").is_err());
    }

    #[test]
    fn bivariate_specs() {
        assert!(parse_bivariate_spec("bvexp theta=0").is_ok());
        assert!(parse_bivariate_spec("indep uniform ; uniform").is_ok());
        assert!(parse_bivariate_spec("bvexp theta=2").is_err());
        assert!(parse_bivariate_spec("indep uniform").is_err());
    }
}
