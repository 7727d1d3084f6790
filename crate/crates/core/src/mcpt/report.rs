//! Search results and their line-oriented text form.
//!
//! ```text
//! method: ga
//! penalty: bic
//! mean_model: constant
//! ar_order: 1
//! seed: 7
//! initial_mean: 10.2315
//! slope: -
//! changepoint: 26 1904 10.6120
//! objective: 212.480
//! minus2loglik: 193.895
//! penalty_value: 18.5850
//! ar_params: 0.213400
//! sigma2: 0.301120
//! ```
//!
//! Each `changepoint` line holds the first index of the new regime, its
//! calendar label and the regime's average fitted mean. `seed` is `-` for
//! deterministic methods, `slope` is `-` unless the mean has a linear trend
//! and `ar_params` is `-` for white noise.

use crate::ar::MeanModelKind;
use crate::error::{Error, Result};
use crate::format::sig6;
use crate::mcpt::likelihood::PenalizedFit;
use crate::mcpt::penalty::PenaltyKind;
use crate::series::TimeSeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SearchMethod {
    BinarySegmentation,
    GeneticAlgorithm,
    Exhaustive,
}

impl SearchMethod {
    pub fn name(self) -> &'static str {
        match self {
            Self::BinarySegmentation => "binseg",
            Self::GeneticAlgorithm => "ga",
            Self::Exhaustive => "exhaustive",
        }
    }
}

impl std::str::FromStr for SearchMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binseg" => Ok(Self::BinarySegmentation),
            "ga" => Ok(Self::GeneticAlgorithm),
            "exhaustive" => Ok(Self::Exhaustive),
            other => Err(Error::InvalidParameter(format!(
                "unknown method '{other}'; expected binseg, ga or exhaustive"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult {
    pub method: SearchMethod,
    pub seed: Option<u64>,
    pub fit: PenalizedFit,
    /// Calendar label of each changepoint.
    pub labels: Vec<i64>,
}

impl SearchResult {
    pub fn new(method: SearchMethod, seed: Option<u64>, fit: PenalizedFit, series: &TimeSeries) -> Self {
        let labels = fit.config.taus().iter().map(|&t| series.label_of(t)).collect();
        Self {
            method,
            seed,
            fit,
            labels,
        }
    }

    pub fn to_text(&self) -> String {
        let fit = &self.fit;
        let means = fit.segment_means();
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(": ");
            out.push_str(&v);
            out.push('\n');
        };
        line("method", self.method.name().into());
        line(
            "penalty",
            fit.penalty_kind.map_or("-", PenaltyKind::name).into(),
        );
        line("mean_model", fit.mean_model.kind.name().into());
        line("ar_order", fit.error_model.order.to_string());
        line("seed", self.seed.map_or("-".into(), |s| s.to_string()));
        line("initial_mean", sig6(means[0]));
        line(
            "slope",
            match fit.mean_model.kind {
                MeanModelKind::LinearTrend => sig6(fit.mean_model.slope),
                _ => "-".into(),
            },
        );
        for (i, (&tau, label)) in fit.config.taus().iter().zip(&self.labels).enumerate() {
            line("changepoint", format!("{tau} {label} {}", sig6(means[i + 1])));
        }
        line("objective", sig6(fit.objective));
        line("minus2loglik", sig6(fit.minus2loglik));
        line("penalty_value", sig6(fit.penalty));
        let phi = &fit.error_model.phi;
        line(
            "ar_params",
            if phi.is_empty() {
                "-".into()
            } else {
                phi.iter().map(|v| sig6(*v)).collect::<Vec<_>>().join(" ")
            },
        );
        line("sigma2", sig6(fit.error_model.sigma2));
        out
    }
}

/// The contents of a search report as written by [`SearchResult::to_text`].
#[derive(Clone, Debug, PartialEq)]
pub struct SearchSummary {
    pub method: SearchMethod,
    pub penalty: Option<PenaltyKind>,
    pub mean_model: MeanModelKind,
    pub ar_order: usize,
    pub seed: Option<u64>,
    pub initial_mean: f64,
    /// Trend per time step, for a linear-trend mean.
    pub slope: Option<f64>,
    /// `(index, label, segment mean)` per changepoint.
    pub changepoints: Vec<(usize, i64, f64)>,
    pub objective: f64,
    pub minus2loglik: f64,
    pub penalty_value: f64,
    pub ar_params: Vec<f64>,
    pub sigma2: f64,
}

impl SearchSummary {
    pub fn parse(text: &str) -> Result<Self> {
        let err = |line: usize, message: String| Error::Parse {
            path: "<search report>".into(),
            line,
            message,
        };
        let mut fields: Vec<(usize, &str, &str)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            if raw.trim().is_empty() {
                continue;
            }
            let (k, v) = raw
                .split_once(": ")
                .ok_or_else(|| err(i + 1, format!("expected 'key: value', got '{raw}'")))?;
            fields.push((i + 1, k, v));
        }
        let get = |key: &str| -> Result<(usize, &str)> {
            fields
                .iter()
                .find(|(_, k, _)| *k == key)
                .map(|(l, _, v)| (*l, *v))
                .ok_or_else(|| err(0, format!("missing '{key}'")))
        };
        fn optional(v: &str) -> Option<&str> {
            (v != "-").then_some(v)
        }
        fn num<T: std::str::FromStr>(line: usize, v: &str, err: &dyn Fn(usize, String) -> Error) -> Result<T> {
            v.parse().map_err(|_| err(line, format!("bad number '{v}'")))
        }
        let float = |key: &str| -> Result<f64> {
            let (l, v) = get(key)?;
            num(l, v, &err)
        };

        let (l, v) = get("method")?;
        let method = v.parse().map_err(|e: Error| err(l, e.to_string()))?;
        let (l, v) = get("penalty")?;
        let penalty = optional(v)
            .map(|s| s.parse().map_err(|e: Error| err(l, e.to_string())))
            .transpose()?;
        let (l, v) = get("mean_model")?;
        let mean_model = v.parse().map_err(|e: Error| err(l, e.to_string()))?;
        let (l, v) = get("ar_order")?;
        let ar_order = num(l, v, &err)?;
        let (l, v) = get("seed")?;
        let seed = optional(v).map(|s| num(l, s, &err)).transpose()?;
        let (l, v) = get("slope")?;
        let slope = optional(v).map(|s| num(l, s, &err)).transpose()?;
        let mut changepoints = Vec::new();
        for (l, k, v) in &fields {
            if *k != "changepoint" {
                continue;
            }
            let parts: Vec<&str> = v.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(err(*l, format!("changepoint needs 3 fields, got '{v}'")));
            }
            changepoints.push((num(*l, parts[0], &err)?, num(*l, parts[1], &err)?, num(*l, parts[2], &err)?));
        }
        let (l, v) = get("ar_params")?;
        let ar_params = match optional(v) {
            None => Vec::new(),
            Some(s) => s
                .split_whitespace()
                .map(|x| num(l, x, &err))
                .collect::<Result<_>>()?,
        };
        Ok(Self {
            method,
            penalty,
            mean_model,
            ar_order,
            seed,
            initial_mean: float("initial_mean")?,
            slope,
            changepoints,
            objective: float("objective")?,
            minus2loglik: float("minus2loglik")?,
            penalty_value: float("penalty_value")?,
            ar_params,
            sigma2: float("sigma2")?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mcpt::config::ChangepointConfig;
    use crate::mcpt::likelihood::MeanShiftModel;

    #[test]
    fn text_round_trip() {
        let x: Vec<f64> = (0..40)
            .map(|i| f64::from(i >= 20) * 2.0 + ((i * 7919) % 13) as f64 / 13.0)
            .collect();
        let s = TimeSeries::annual(x, 1950).unwrap();
        let model = MeanShiftModel::new(&s, MeanModelKind::Constant, 1).unwrap();
        let fit = model
            .penalized_fit(&ChangepointConfig::new(vec![21], 40).unwrap(), PenaltyKind::Bic)
            .unwrap();
        let r = SearchResult::new(SearchMethod::GeneticAlgorithm, Some(7), fit.clone(), &s);
        let text = r.to_text();
        let back = SearchSummary::parse(&text).unwrap();
        assert_eq!(back.method, SearchMethod::GeneticAlgorithm);
        assert_eq!(back.penalty, Some(PenaltyKind::Bic));
        assert_eq!(back.seed, Some(7));
        assert_eq!(back.ar_order, 1);
        assert_eq!(back.changepoints.len(), 1);
        assert_eq!((back.changepoints[0].0, back.changepoints[0].1), (21, 1970));
        assert!((back.objective - fit.objective).abs() <= 1e-5 * fit.objective.abs());
        assert_eq!(back.ar_params.len(), 1);
        assert_eq!(back.slope, None);
        assert!(text.lines().any(|l| l.starts_with("changepoint: 21 1970 ")));
    }

    #[test]
    fn malformed_text_reports_line() {
        let err = SearchSummary::parse("method: ga\nthis is not a field\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }
}
