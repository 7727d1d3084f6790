//! Time-series container and the seasonal summaries used before any
//! changepoint analysis: seasonal means and standard deviations,
//! standardization, sample autocorrelation and target-minus-reference
//! differencing.
//!
//! Time runs `t = 1..=N`. For a series with period `T`, observation `t`
//! belongs to season `((t - 1) mod T) + 1` of cycle `(t - 1) / T`.

use crate::error::{Error, Result};

/// A complete, finite, regularly spaced univariate series.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    start_label: i64,
    period: usize,
    label: String,
}

impl TimeSeries {
    /// Builds a series; rejects non-finite values and series shorter than 2.
    pub fn new(values: Vec<f64>, period: usize) -> Result<Self> {
        if period == 0 {
            return Err(Error::InvalidPeriod);
        }
        if values.len() < 2 {
            return Err(Error::SeriesTooShort {
                len: values.len(),
                required: 2,
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index: i + 1 });
        }
        Ok(Self {
            values,
            start_label: 1,
            period,
            label: String::new(),
        })
    }

    /// Annual (`T = 1`) series whose first observation is `first_year`.
    pub fn annual(values: Vec<f64>, first_year: i64) -> Result<Self> {
        Ok(Self::new(values, 1)?.with_start(first_year))
    }

    /// Sets the calendar label (usually the year) of the first cycle.
    pub fn with_start(mut self, start_label: i64) -> Self {
        self.start_label = start_label;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn start_label(&self) -> i64 {
        self.start_label
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Value at time `t` (1-based).
    pub fn at(&self, t: usize) -> f64 {
        self.values[t - 1]
    }

    /// Season of time `t`, in `1..=T`.
    pub fn season(&self, t: usize) -> usize {
        (t - 1) % self.period + 1
    }

    /// Calendar label of the cycle containing time `t`.
    pub fn label_of(&self, t: usize) -> i64 {
        self.start_label + ((t - 1) / self.period) as i64
    }

    /// Time index of the first observation carrying calendar label `label`.
    pub fn index_of_label(&self, label: i64) -> Option<usize> {
        let offset = label.checked_sub(self.start_label)?;
        if offset < 0 {
            return None;
        }
        let t = offset as usize * self.period + 1;
        (t <= self.len()).then_some(t)
    }

    /// Number of complete cycles, or an error for a trailing partial cycle.
    pub fn complete_cycles(&self) -> Result<usize> {
        if !self.len().is_multiple_of(self.period) {
            return Err(Error::PartialCycle {
                len: self.len(),
                period: self.period,
            });
        }
        Ok(self.len() / self.period)
    }

    /// Same metadata, new values (same length required by callers).
    pub(crate) fn with_values(&self, values: Vec<f64>) -> Self {
        Self {
            values,
            start_label: self.start_label,
            period: self.period,
            label: self.label.clone(),
        }
    }

    /// Contiguous piece `t in [from, to]` (1-based, inclusive).
    pub fn slice(&self, from: usize, to: usize) -> Result<Self> {
        if from < 1 || to > self.len() || from > to {
            return Err(Error::InvalidParameter(format!(
                "slice [{from}, {to}] outside 1..={}",
                self.len()
            )));
        }
        if self.period != 1 && !(from - 1).is_multiple_of(self.period) {
            return Err(Error::InvalidParameter(
                "seasonal series can only be sliced at cycle boundaries".into(),
            ));
        }
        let values = self.values[from - 1..to].to_vec();
        Ok(Self::new(values, self.period)?
            .with_start(self.label_of(from))
            .with_label(self.label.clone()))
    }

    /// The series read backwards in time.
    pub fn reversed(&self) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        self.with_values(values)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }
}

/// Per-season sample means and standard deviations.
#[derive(Clone, Debug, PartialEq)]
pub struct SeasonalStats {
    pub means: Vec<f64>,
    pub std_devs: Vec<f64>,
    /// Number of complete cycles the estimates use.
    pub cycles: usize,
}

impl SeasonalStats {
    pub fn period(&self) -> usize {
        self.means.len()
    }
}

/// Seasonal means and standard deviations; the variance divisor is `d - 1`.
pub fn seasonal_stats(series: &TimeSeries) -> Result<SeasonalStats> {
    let period = series.period();
    let cycles = series.complete_cycles()?;
    if cycles < 2 {
        return Err(Error::FewerThanTwoCycles { cycles });
    }
    let d = cycles as f64;
    let mut means = vec![0.0; period];
    let mut std_devs = vec![0.0; period];
    for nu in 0..period {
        let season = || (0..cycles).map(|n| series.values()[n * period + nu]);
        let mean = season().sum::<f64>() / d;
        let var = season().map(|x| (x - mean).powi(2)).sum::<f64>() / (d - 1.0);
        if var <= 0.0 {
            return Err(Error::NonPositiveVariance { season: nu + 1 });
        }
        means[nu] = mean;
        std_devs[nu] = var.sqrt();
    }
    Ok(SeasonalStats {
        means,
        std_devs,
        cycles,
    })
}

/// Removes the seasonal mean and divides by the seasonal standard deviation.
pub fn standardize(series: &TimeSeries, stats: &SeasonalStats) -> Result<TimeSeries> {
    if stats.period() != series.period() {
        return Err(Error::PeriodMismatch {
            left: series.period(),
            right: stats.period(),
        });
    }
    let values = series
        .values()
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let nu = i % series.period();
            (x - stats.means[nu]) / stats.std_devs[nu]
        })
        .collect();
    Ok(series.with_values(values))
}

/// Sample autocorrelations of a standardized series.
#[derive(Clone, Debug, PartialEq)]
pub struct AcfResult {
    pub lags: Vec<usize>,
    pub correlations: Vec<f64>,
    /// Half-width of the pointwise 95% band for white noise, `1.96 / sqrt(N)`.
    pub white_noise_band: f64,
}

impl AcfResult {
    /// Number of lags `h >= 1` whose correlation lies inside the white-noise band.
    pub fn lags_within_band(&self) -> usize {
        self.lags
            .iter()
            .zip(&self.correlations)
            .filter(|(h, r)| **h > 0 && r.abs() <= self.white_noise_band)
            .count()
    }
}

/// Lag-`h` correlations `(1/N) * sum_t S_t S_{t+h}` for `h = 0..=max_lag`.
///
/// The input must already be standardized (zero mean, unit variance). The
/// divisor is `N` for every lag, so lag 0 is the mean square of the input,
/// close to but not exactly 1 when the standardization used divisor `d - 1`.
pub fn acf(series: &TimeSeries, max_lag: usize) -> Result<AcfResult> {
    let n = series.len();
    if max_lag >= n {
        return Err(Error::LagTooLarge { lag: max_lag, len: n });
    }
    let x = series.values();
    let correlations = (0..=max_lag)
        .map(|h| {
            let s: f64 = x[..n - h].iter().zip(&x[h..]).map(|(a, b)| a * b).sum();
            (s / n as f64).clamp(-1.0, 1.0)
        })
        .collect();
    Ok(AcfResult {
        lags: (0..=max_lag).collect(),
        correlations,
        white_noise_band: 1.96 / (n as f64).sqrt(),
    })
}

/// Elementwise `target - reference`.
pub fn difference(target: &TimeSeries, reference: &TimeSeries) -> Result<TimeSeries> {
    if target.period() != reference.period() {
        return Err(Error::PeriodMismatch {
            left: target.period(),
            right: reference.period(),
        });
    }
    if target.len() != reference.len() {
        return Err(Error::LengthMismatch {
            left: target.len(),
            right: reference.len(),
        });
    }
    if target.start_label() != reference.start_label() {
        return Err(Error::StartMismatch {
            left: target.start_label(),
            right: reference.start_label(),
        });
    }
    let values = target
        .values()
        .iter()
        .zip(reference.values())
        .map(|(a, b)| a - b)
        .collect();
    Ok(target.with_values(values))
}
