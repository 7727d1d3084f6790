//! At-most-one-changepoint (AMOC) tests.
//!
//! `CUSUM(k) = (S_k - (k/N) S_N) / (s sqrt(N))` where `S_k` is the k-th
//! partial sum and `s` the sample standard deviation (divisor `N - 1`).
//! Three statistics are built on it:
//!
//! * SCUSUM, `(1/N) sum_k CUSUM(k)^2`, whose null limit is `int B^2`;
//! * the maximum `D* = max_{2<=k<=N} |CUSUM(k)|`, limit `sup |B|`;
//! * CUSUM_D, the maximum over CUSUMs of residuals from a fitted linear
//!   trend, compared against the trend-adjusted null.
//!
//! All three assume uncorrelated errors; [`amoc_pipeline`] pre-whitens with a
//! fitted AR(p) model first.

pub mod null;

pub use null::{simulate_all, simulate_null, NullDistribution, NullKind, NullTables};

use crate::ar::{fit_ar, least_squares, mean_design, prewhiten, ArFit, MeanModelKind};
use crate::error::{Error, Result};
use crate::series::TimeSeries;

use nalgebra::DVector;

/// Which AMOC statistic a result carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StatisticKind {
    Scusum,
    MaxCusum,
    CusumD,
}

impl StatisticKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Scusum => "SCUSUM",
            Self::MaxCusum => "max|CUSUM|",
            Self::CusumD => "CUSUM_D",
        }
    }

    pub fn null_kind(self) -> NullKind {
        match self {
            Self::Scusum => NullKind::IntegratedBridgeSquared,
            Self::MaxCusum => NullKind::SupBridge,
            Self::CusumD => NullKind::SupTrendAdjusted,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AmocResult {
    pub statistic: f64,
    pub statistic_kind: StatisticKind,
    /// Last index (1-based) before the estimated shift.
    pub changepoint_estimate: usize,
    /// Calendar label of `changepoint_estimate`.
    pub changepoint_label: i64,
    pub p_value: f64,
    /// `(percentile, threshold)` pairs, increasing.
    pub critical_values: Vec<(f64, f64)>,
    pub prewhitened: bool,
    /// The series the statistic was computed on, `CUSUM(1..=N)`.
    pub cusum: Vec<f64>,
    /// Model used to pre-whiten, if any stage of the pipeline fitted one.
    pub fit: Option<ArFit>,
}

impl AmocResult {
    pub fn significant_at(&self, alpha: f64) -> bool {
        self.p_value <= alpha
    }
}

/// `CUSUM(k)` for `k = 1..=N`.
pub fn cusum(series: &TimeSeries) -> Result<Vec<f64>> {
    cusum_values(series.values())
}

fn cusum_values(x: &[f64]) -> Result<Vec<f64>> {
    let n = x.len();
    if n < 4 {
        return Err(Error::SeriesTooShort { len: n, required: 4 });
    }
    let nf = n as f64;
    let total: f64 = x.iter().sum();
    let mean = total / nf;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (nf - 1.0);
    if var <= 1e-24 * mean * mean || var == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let scale = 1.0 / (var.sqrt() * nf.sqrt());
    let mut s = 0.0;
    let mut out: Vec<f64> = x
        .iter()
        .enumerate()
        .map(|(i, v)| {
            s += v;
            (s - (i + 1) as f64 / nf * total) * scale
        })
        .collect();
    out[n - 1] = 0.0;
    Ok(out)
}

/// `argmax_{2<=k<=N} |CUSUM(k)|`, smallest `k` on ties.
fn argmax_abs(c: &[f64]) -> (usize, f64) {
    let mut best = (2, c[1].abs());
    for (i, v) in c.iter().enumerate().skip(2) {
        if v.abs() > best.1 {
            best = (i + 1, v.abs());
        }
    }
    best
}

fn finish(
    series: &TimeSeries,
    kind: StatisticKind,
    statistic: f64,
    cusum: Vec<f64>,
    null: &NullDistribution,
) -> Result<AmocResult> {
    if null.kind != kind.null_kind() {
        return Err(Error::InvalidParameter(format!(
            "{} needs the {} null table, got {}",
            kind.name(),
            kind.null_kind().name(),
            null.kind.name()
        )));
    }
    let (k, _) = argmax_abs(&cusum);
    Ok(AmocResult {
        statistic,
        statistic_kind: kind,
        changepoint_estimate: k,
        changepoint_label: series.label_of(k),
        p_value: null.p_value(statistic),
        critical_values: null.critical_values(),
        prewhitened: false,
        cusum,
        fit: None,
    })
}

/// SCUSUM test against the `int B^2` null.
pub fn scusum_test(series: &TimeSeries, null: &NullDistribution) -> Result<AmocResult> {
    let c = cusum(series)?;
    let stat = c.iter().map(|v| v * v).sum::<f64>() / c.len() as f64;
    finish(series, StatisticKind::Scusum, stat, c, null)
}

/// Maximum-CUSUM test. With `trend_adjusted`, the CUSUM is taken over the
/// residuals of an OLS fit of `a + b t` (the CUSUM_D statistic).
pub fn max_cusum_test(
    series: &TimeSeries,
    trend_adjusted: bool,
    null: &NullDistribution,
) -> Result<AmocResult> {
    let (kind, c) = if trend_adjusted {
        (StatisticKind::CusumD, cusum_values(&detrend(series.values())?)?)
    } else {
        (StatisticKind::MaxCusum, cusum(series)?)
    };
    let (_, stat) = argmax_abs(&c);
    finish(series, kind, stat, c, null)
}

fn detrend(x: &[f64]) -> Result<Vec<f64>> {
    let n = x.len();
    let design = mean_design(MeanModelKind::LinearTrend, n, 1);
    let y = DVector::from_column_slice(x);
    let beta = least_squares(&design, &y)?;
    Ok((&y - &design * beta).iter().copied().collect())
}

/// Fit the mean model with AR(`p`) errors, pre-whiten, and test.
///
/// A linear-trend mean uses CUSUM_D; constant and seasonal means use SCUSUM
/// on the mean-removed prediction errors.
pub fn amoc_pipeline(
    series: &TimeSeries,
    kind: MeanModelKind,
    p: usize,
    tables: &NullTables,
) -> Result<AmocResult> {
    let fit = fit_ar(series, kind, p)?;
    let whitened = prewhiten(series, &fit)?;
    let mut result = match kind {
        MeanModelKind::LinearTrend => max_cusum_test(&whitened, true, &tables.trend)?,
        MeanModelKind::Constant | MeanModelKind::SeasonalOffsets => {
            scusum_test(&whitened, &tables.integrated)?
        }
    };
    result.prewhitened = p > 0;
    result.fit = Some(fit);
    Ok(result)
}
