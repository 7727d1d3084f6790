//! Autoregressive error models fitted under a no-changepoint mean structure,
//! and the one-step-ahead prediction errors ("pre-whitened" series) they
//! produce.
//!
//! Fitting is two-stage: the mean structure by ordinary least squares, then
//! the AR coefficients and innovation variance by exact Gaussian maximum
//! likelihood on the residuals. AR coefficients are parameterized through
//! partial autocorrelations in (-1, 1), so every fit is causal.

use nalgebra::{DMatrix, DVector};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::optim::{brent, nelder_mead};
use crate::series::TimeSeries;

/// Partial autocorrelations are confined to this interval during optimization.
pub(crate) const PACF_BOUND: f64 = 0.9995;

/// Which deterministic mean structure the series is assumed to follow.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MeanModelKind {
    Constant,
    LinearTrend,
    SeasonalOffsets,
}

impl MeanModelKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Constant => "constant",
            Self::LinearTrend => "trend",
            Self::SeasonalOffsets => "seasonal",
        }
    }

    /// Number of regression columns for a series of period `period`.
    pub fn n_params(self, period: usize) -> usize {
        match self {
            Self::Constant => 1,
            Self::LinearTrend => 2,
            Self::SeasonalOffsets => period,
        }
    }
}

impl std::str::FromStr for MeanModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "constant" | "mean" => Ok(Self::Constant),
            "trend" | "linear" | "lineartrend" => Ok(Self::LinearTrend),
            "seasonal" | "seasonaloffsets" => Ok(Self::SeasonalOffsets),
            other => Err(Error::InvalidParameter(format!(
                "unknown mean model '{other}'; expected constant, trend or seasonal"
            ))),
        }
    }
}

/// A fitted mean function `mu_t = b0 (+ b1 t) (+ s_season)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MeanModel {
    pub kind: MeanModelKind,
    /// Location `b0`, in data units.
    pub intercept: f64,
    /// Slope `b1` per time step; zero unless `kind` is `LinearTrend`.
    pub slope: f64,
    /// Seasonal offsets `s_1..s_T` summing to zero; empty unless `SeasonalOffsets`.
    pub seasonal: Vec<f64>,
}

impl MeanModel {
    pub fn constant(level: f64) -> Self {
        Self {
            kind: MeanModelKind::Constant,
            intercept: level,
            slope: 0.0,
            seasonal: Vec::new(),
        }
    }

    pub fn linear(intercept: f64, slope: f64) -> Self {
        Self {
            kind: MeanModelKind::LinearTrend,
            intercept,
            slope,
            seasonal: Vec::new(),
        }
    }

    /// `mu_t` at time `t` (1-based).
    pub fn value_at(&self, t: usize) -> f64 {
        let mut mu = self.intercept + self.slope * t as f64;
        if !self.seasonal.is_empty() {
            mu += self.seasonal[(t - 1) % self.seasonal.len()];
        }
        mu
    }

    /// Ordinary least-squares fit of this mean structure.
    pub fn fit_ols(series: &TimeSeries, kind: MeanModelKind) -> Result<Self> {
        let n = series.len();
        let design = mean_design(kind, n, series.period());
        let k = design.ncols();
        if n <= k {
            return Err(Error::SeriesTooShort {
                len: n,
                required: k + 1,
            });
        }
        let y = DVector::from_column_slice(series.values());
        let beta = least_squares(&design, &y)?;
        Ok(Self::from_coefficients(kind, series.period(), beta.as_slice()))
    }

    fn from_coefficients(kind: MeanModelKind, period: usize, beta: &[f64]) -> Self {
        match kind {
            MeanModelKind::Constant => Self::constant(beta[0]),
            MeanModelKind::LinearTrend => Self::linear(beta[0], beta[1]),
            MeanModelKind::SeasonalOffsets => {
                let mut seasonal: Vec<f64> = beta[1..].to_vec();
                seasonal.push(-seasonal.iter().sum::<f64>());
                if period == 1 {
                    seasonal = vec![0.0];
                }
                Self {
                    kind,
                    intercept: beta[0],
                    slope: 0.0,
                    seasonal,
                }
            }
        }
    }
}

/// Regression columns of a mean structure: intercept, optional `t`, and
/// sum-to-zero (effect-coded) seasonal contrasts.
pub(crate) fn mean_design(kind: MeanModelKind, n: usize, period: usize) -> DMatrix<f64> {
    let k = kind.n_params(period);
    DMatrix::from_fn(n, k, |row, col| {
        let t = row + 1;
        match (kind, col) {
            (_, 0) => 1.0,
            (MeanModelKind::LinearTrend, 1) => t as f64,
            (MeanModelKind::SeasonalOffsets, c) => {
                let season = (t - 1) % period + 1;
                if season == c {
                    1.0
                } else if season == period {
                    -1.0
                } else {
                    0.0
                }
            }
            _ => unreachable!(),
        }
    })
}

pub(crate) fn least_squares(design: &DMatrix<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
    let xtx = design.transpose() * design;
    let xty = design.transpose() * y;
    xtx.cholesky()
        .map(|c| c.solve(&xty))
        .ok_or_else(|| Error::InvalidParameter("singular regression design".into()))
}

/// Converts partial autocorrelations to AR coefficients (Durbin-Levinson).
pub fn pacf_to_ar(pacf: &[f64]) -> Vec<f64> {
    let mut phi: Vec<f64> = Vec::with_capacity(pacf.len());
    for (k, &a) in pacf.iter().enumerate() {
        let prev = phi.clone();
        phi.push(a);
        for j in 0..k {
            phi[j] = prev[j] - a * prev[k - 1 - j];
        }
    }
    phi
}

/// Inverse of [`pacf_to_ar`]; `None` when the coefficients are not causal.
pub fn ar_to_pacf(phi: &[f64]) -> Option<Vec<f64>> {
    let p = phi.len();
    let mut pacf = vec![0.0; p];
    let mut cur = phi.to_vec();
    for k in (0..p).rev() {
        let a = cur[k];
        if !a.is_finite() || a.abs() >= 1.0 {
            return None;
        }
        pacf[k] = a;
        let denom = 1.0 - a * a;
        cur = (0..k).map(|j| (cur[j] + a * cur[k - 1 - j]) / denom).collect();
    }
    Some(pacf)
}

/// True when all roots of `1 - phi_1 z - ... - phi_p z^p` lie outside the unit circle.
pub fn is_causal(phi: &[f64]) -> bool {
    ar_to_pacf(phi).is_some()
}

/// Finite-past linear predictors of a unit-innovation AR(p) process.
///
/// Row `t - 1` holds the coefficients predicting observation `t` from
/// `t - 1, t - 2, ...`; rows from `p` on are the AR coefficients themselves.
#[derive(Clone, Debug)]
pub(crate) struct ArPredictor {
    pub phi: Vec<f64>,
    /// Durbin-Levinson coefficients for the start-up times `t = 1..=p`.
    pub startup: Vec<Vec<f64>>,
    /// One-step mean squared errors for `t = 1..=p`, relative to the innovation variance.
    pub startup_mse: Vec<f64>,
}

impl ArPredictor {
    pub fn from_pacf(pacf: &[f64]) -> Self {
        let p = pacf.len();
        // relative variances: v_p = 1, v_{k-1} = v_k / (1 - a_k^2)
        let mut v = vec![1.0; p + 1];
        for k in (1..=p).rev() {
            v[k - 1] = v[k] / (1.0 - pacf[k - 1] * pacf[k - 1]);
        }
        let mut startup = Vec::with_capacity(p);
        let mut coefs: Vec<f64> = Vec::new();
        for k in 0..p {
            startup.push(coefs.clone());
            let a = pacf[k];
            let prev = coefs.clone();
            coefs.push(a);
            for j in 0..k {
                coefs[j] = prev[j] - a * prev[k - 1 - j];
            }
        }
        Self {
            phi: pacf_to_ar(pacf),
            startup,
            startup_mse: v[..p].to_vec(),
        }
    }

    pub fn order(&self) -> usize {
        self.phi.len()
    }

    /// Sum of `ln r_t`, i.e. the log-determinant of the unit-innovation covariance.
    pub fn log_det(&self) -> f64 {
        self.startup_mse.iter().map(|r| r.ln()).sum()
    }

    /// Coefficients predicting the value at 0-based position `i`.
    pub fn coefs_at(&self, i: usize) -> &[f64] {
        if i < self.order() {
            &self.startup[i]
        } else {
            &self.phi
        }
    }

    /// Relative prediction MSE at 0-based position `i`.
    pub fn mse_at(&self, i: usize) -> f64 {
        if i < self.order() {
            self.startup_mse[i]
        } else {
            1.0
        }
    }

    /// One-step prediction errors of a zero-mean sequence.
    pub fn innovations(&self, u: &[f64]) -> Vec<f64> {
        (0..u.len())
            .map(|i| {
                let pred: f64 = self
                    .coefs_at(i)
                    .iter()
                    .enumerate()
                    .map(|(j, c)| c * u[i - 1 - j])
                    .sum();
                u[i] - pred
            })
            .collect()
    }

    /// `-2 ln L` of a zero-mean sequence with the innovation variance profiled out.
    /// Returns `(minus2loglik, sigma2)`.
    pub fn profile_m2ll(&self, u: &[f64]) -> (f64, f64) {
        let n = u.len() as f64;
        let e = self.innovations(u);
        let weighted: f64 = e
            .iter()
            .enumerate()
            .map(|(i, v)| v * v / self.mse_at(i))
            .sum();
        let sigma2 = weighted / n;
        (m2ll_from_profile(u.len(), sigma2, self.log_det()), sigma2)
    }
}

/// `-2 ln L = N ln(2 pi sigma2) + ln det + N` at the profiled variance.
pub(crate) fn m2ll_from_profile(n: usize, sigma2: f64, log_det: f64) -> f64 {
    let n = n as f64;
    n * (2.0 * std::f64::consts::PI * sigma2).ln() + log_det + n
}

/// Minimizes `objective(pacf)` over partial autocorrelations in the open
/// unit cube. `warm` seeds the search (padded with zeros).
pub(crate) fn optimize_pacf<F: FnMut(&[f64]) -> f64>(
    p: usize,
    warm: Option<&[f64]>,
    mut objective: F,
) -> (Vec<f64>, f64) {
    match p {
        0 => (Vec::new(), objective(&[])),
        1 => {
            let (a, v) = brent(|a| objective(&[a]), -PACF_BOUND, PACF_BOUND, 1e-10, 200);
            // Brent never evaluates the end points; check the start-at-zero value too
            let v0 = objective(&[0.0]);
            if v0 < v {
                (vec![0.0], v0)
            } else {
                (vec![a], v)
            }
        }
        _ => {
            let mut start = vec![0.0; p];
            if let Some(w) = warm {
                for (s, a) in start.iter_mut().zip(w) {
                    *s = a.clamp(-PACF_BOUND, PACF_BOUND).atanh();
                }
            }
            let to_pacf = |theta: &[f64]| -> Vec<f64> {
                theta
                    .iter()
                    .map(|t| t.tanh().clamp(-PACF_BOUND, PACF_BOUND))
                    .collect()
            };
            let (theta, v) = nelder_mead(|th| objective(&to_pacf(th)), &start, 0.3, 1e-12, 4000);
            // restart once from the optimum to escape premature collapse
            let (theta, v2) = nelder_mead(|th| objective(&to_pacf(th)), &theta, 0.05, 1e-13, 4000);
            (to_pacf(&theta), v.min(v2))
        }
    }
}

/// A fitted AR(p) error model together with its mean structure.
#[derive(Clone, Debug, PartialEq)]
pub struct ArFit {
    pub order: usize,
    pub phi: Vec<f64>,
    /// Innovation variance (maximum-likelihood divisor `N`).
    pub sigma2: f64,
    pub mean_model: MeanModel,
    /// Exact Gaussian log-likelihood of the residuals.
    pub loglik: f64,
    /// Length and period of the series the model was fitted to.
    pub n: usize,
    pub period: usize,
}

impl ArFit {
    pub fn pacf(&self) -> Vec<f64> {
        ar_to_pacf(&self.phi).expect("fits are causal")
    }

    /// `sigma2 / (1 - sum phi)^2`, the spectral density at frequency zero times `2 pi`.
    pub fn long_run_variance(&self) -> Result<f64> {
        if !is_causal(&self.phi) {
            return Err(Error::NonStationaryFit);
        }
        let s: f64 = self.phi.iter().sum();
        Ok(self.sigma2 / (1.0 - s).powi(2))
    }

    /// Schwarz criterion counting AR, variance and mean parameters.
    pub fn bic(&self) -> f64 {
        let k = self.order + 1 + self.mean_model.kind.n_params(self.period);
        -2.0 * self.loglik + k as f64 * (self.n as f64).ln()
    }

    pub(crate) fn predictor(&self) -> ArPredictor {
        ArPredictor::from_pacf(&self.pacf())
    }
}

/// Fits the mean structure by OLS, then AR(p) by exact Gaussian MLE on the residuals.
pub fn fit_ar(series: &TimeSeries, kind: MeanModelKind, p: usize) -> Result<ArFit> {
    fit_ar_warm(series, kind, p, None)
}

fn fit_ar_warm(
    series: &TimeSeries,
    kind: MeanModelKind,
    p: usize,
    warm: Option<&[f64]>,
) -> Result<ArFit> {
    let n = series.len();
    let required = p + kind.n_params(series.period()) + 3;
    if n < required {
        return Err(Error::SeriesTooShort { len: n, required });
    }
    let mean_model = MeanModel::fit_ols(series, kind)?;
    let resid: Vec<f64> = (1..=n).map(|t| series.at(t) - mean_model.value_at(t)).collect();

    // Fit orders 1..p in turn, each seeded by the previous optimum, so the
    // likelihood cannot drop as the order grows.
    let mut pacf: Vec<f64> = warm.map(<[f64]>::to_vec).unwrap_or_default();
    if p >= 2 && warm.is_none() {
        for q in 1..p {
            let (a, _) = optimize_pacf(q, Some(&pacf), |a| {
                ArPredictor::from_pacf(a).profile_m2ll(&resid).0
            });
            pacf = a;
        }
    }
    let (pacf, _) = optimize_pacf(p, Some(&pacf), |a| {
        ArPredictor::from_pacf(a).profile_m2ll(&resid).0
    });
    if pacf.iter().any(|a| a.abs() >= PACF_BOUND - 1e-6) {
        return Err(Error::NonStationaryFit);
    }
    let pred = ArPredictor::from_pacf(&pacf);
    let (m2ll, sigma2) = pred.profile_m2ll(&resid);
    if sigma2 <= 0.0 || !sigma2.is_finite() {
        return Err(Error::ZeroVariance);
    }
    Ok(ArFit {
        order: p,
        phi: pred.phi.clone(),
        sigma2,
        mean_model,
        loglik: -0.5 * m2ll,
        n,
        period: series.period(),
    })
}

/// Fits orders `0..=max_p` and keeps the one with the smallest BIC.
pub fn select_order_bic(series: &TimeSeries, kind: MeanModelKind, max_p: usize) -> Result<ArFit> {
    let mut best: Option<ArFit> = None;
    let mut warm: Vec<f64> = Vec::new();
    for p in 0..=max_p {
        let fit = match fit_ar_warm(series, kind, p, Some(&warm)) {
            Ok(f) => f,
            Err(Error::SeriesTooShort { .. }) if best.is_some() => break,
            Err(e) => return Err(e),
        };
        warm = fit.pacf();
        if best.as_ref().is_none_or(|b| fit.bic() < b.bic()) {
            best = Some(fit);
        }
    }
    Ok(best.expect("order 0 always fits or errors"))
}

/// One-step-ahead prediction errors `Y_t = X_t - X^_t` under a fitted model.
///
/// For `t > p`, `X^_t = mu_t + sum_j phi_j (X_{t-j} - mu_{t-j})`; the first `p`
/// predictions use the finite-past best linear predictors, so for AR(1)
/// `X^_1 = mu_1`.
pub fn prewhiten(series: &TimeSeries, fit: &ArFit) -> Result<TimeSeries> {
    if series.len() != fit.n || series.period() != fit.period {
        return Err(Error::ModelSeriesMismatch(format!(
            "fit is for N={} T={}, series has N={} T={}",
            fit.n,
            fit.period,
            series.len(),
            series.period()
        )));
    }
    let n = series.len();
    let centered: Vec<f64> = (1..=n)
        .map(|t| series.at(t) - fit.mean_model.value_at(t))
        .collect();
    let y = fit.predictor().innovations(&centered);
    Ok(series.with_values(y))
}

/// AR plug-in long-run variance; `series` must be the one the model was fitted to.
pub fn long_run_variance(series: &TimeSeries, fit: &ArFit) -> Result<f64> {
    if series.len() != fit.n {
        return Err(Error::ModelSeriesMismatch(format!(
            "fit is for N={}, series has N={}",
            fit.n,
            series.len()
        )));
    }
    fit.long_run_variance()
}

/// Ljung-Box portmanteau statistic over `lags` lags, with `fitted` parameters
/// subtracted from the degrees of freedom. Returns `(Q, p_value)`.
pub fn ljung_box(residuals: &[f64], lags: usize, fitted: usize) -> Result<(f64, f64)> {
    let n = residuals.len();
    if lags == 0 || lags >= n || fitted >= lags {
        return Err(Error::InvalidParameter(format!(
            "ljung-box needs fitted < lags < n; got fitted={fitted}, lags={lags}, n={n}"
        )));
    }
    let mean = residuals.iter().sum::<f64>() / n as f64;
    let c: Vec<f64> = residuals.iter().map(|v| v - mean).collect();
    let c0: f64 = c.iter().map(|v| v * v).sum();
    if c0 <= 0.0 {
        return Err(Error::ZeroVariance);
    }
    let q: f64 = (1..=lags)
        .map(|h| {
            let r: f64 = c[..n - h].iter().zip(&c[h..]).map(|(a, b)| a * b).sum::<f64>() / c0;
            r * r / (n - h) as f64
        })
        .sum::<f64>()
        * n as f64
        * (n as f64 + 2.0);
    let chi = ChiSquared::new((lags - fitted) as f64).expect("positive dof");
    Ok((q, 1.0 - chi.cdf(q)))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    pub(crate) fn simulate_ar(phi: &[f64], n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let burn = 500;
        let mut x: Vec<f64> = Vec::with_capacity(n + burn);
        for i in 0..n + burn {
            let mut v: f64 = StandardNormal.sample(&mut rng);
            for (j, c) in phi.iter().enumerate() {
                if i > j {
                    v += c * x[i - 1 - j];
                }
            }
            x.push(v);
        }
        x.split_off(burn)
    }

    /// Dense Toeplitz covariance oracle for the exact likelihood.
    fn dense_m2ll(phi: &[f64], sigma2: f64, u: &[f64]) -> f64 {
        let n = u.len();
        // autocovariances by long MA(inf) truncation
        let mut psi = vec![1.0];
        for k in 1..4000 {
            let v: f64 = phi
                .iter()
                .enumerate()
                .filter(|(j, _)| k > *j)
                .map(|(j, c)| c * psi[k - 1 - j])
                .sum();
            psi.push(v);
        }
        let gamma: Vec<f64> = (0..n)
            .map(|h| sigma2 * psi[..psi.len() - h].iter().zip(&psi[h..]).map(|(a, b)| a * b).sum::<f64>())
            .collect();
        let cov = DMatrix::from_fn(n, n, |i, j| gamma[i.abs_diff(j)]);
        let chol = cov.cholesky().unwrap();
        let logdet: f64 = 2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>();
        let uv = DVector::from_column_slice(u);
        let quad = uv.dot(&chol.solve(&uv));
        n as f64 * (2.0 * std::f64::consts::PI).ln() + logdet + quad
    }

    #[test]
    fn pacf_round_trip() {
        let pacf = [0.5, -0.3, 0.2];
        let phi = pacf_to_ar(&pacf);
        let back = ar_to_pacf(&phi).unwrap();
        for (a, b) in pacf.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(!is_causal(&[1.2]));
        assert!(!is_causal(&[0.5, 0.6]));
        assert!(is_causal(&[0.5, 0.3]));
    }

    #[test]
    fn exact_likelihood_matches_dense_covariance() {
        for (phi, seed) in [(vec![0.6], 1u64), (vec![0.5, -0.3], 2), (vec![-0.4, 0.2, 0.1], 3)] {
            let u = simulate_ar(&phi, 40, seed);
            let pred = ArPredictor::from_pacf(&ar_to_pacf(&phi).unwrap());
            let sigma2 = 1.7;
            let e = pred.innovations(&u);
            let quad: f64 = e.iter().enumerate().map(|(i, v)| v * v / pred.mse_at(i)).sum::<f64>() / sigma2;
            let ours = u.len() as f64 * (2.0 * std::f64::consts::PI * sigma2).ln() + pred.log_det() + quad;
            let oracle = dense_m2ll(&phi, sigma2, &u);
            assert!((ours - oracle).abs() < 1e-8, "{ours} vs {oracle}");
        }
    }

    #[test]
    fn white_noise_fit() {
        let x = simulate_ar(&[], 10_000, 4);
        let s = TimeSeries::new(x, 1).unwrap();
        let fit = fit_ar(&s, MeanModelKind::Constant, 1).unwrap();
        assert!(fit.phi[0].abs() < 0.03);
        assert!((0.95..=1.05).contains(&fit.sigma2));
    }

    #[test]
    fn ar1_recovered() {
        let x = simulate_ar(&[0.6], 5_000, 5);
        let s = TimeSeries::new(x.iter().map(|v| v + 3.0).collect(), 1).unwrap();
        let fit = fit_ar(&s, MeanModelKind::Constant, 1).unwrap();
        assert!((fit.phi[0] - 0.6).abs() < 0.03);
        assert!((fit.mean_model.intercept - 3.0).abs() < 0.2);
    }

    #[test]
    fn trend_and_ar1_recovered() {
        let x = simulate_ar(&[0.3], 2_000, 8);
        let s = TimeSeries::new(
            x.iter().enumerate().map(|(i, v)| 9.0 + 0.01 * (i + 1) as f64 + v).collect(),
            1,
        )
        .unwrap();
        let fit = fit_ar(&s, MeanModelKind::LinearTrend, 1).unwrap();
        assert!((fit.mean_model.slope - 0.01).abs() < 0.001);
        assert!((fit.phi[0] - 0.3).abs() < 0.05, "{:?}", fit);
    }

    #[test]
    fn seasonal_offsets_sum_to_zero() {
        let x = simulate_ar(&[0.2], 240, 7);
        let s = TimeSeries::new(
            x.iter().enumerate().map(|(i, v)| 5.0 * ((i % 12) as f64 - 5.5) + v).collect(),
            12,
        )
        .unwrap();
        let fit = fit_ar(&s, MeanModelKind::SeasonalOffsets, 1).unwrap();
        assert_eq!(fit.mean_model.seasonal.len(), 12);
        assert!(fit.mean_model.seasonal.iter().sum::<f64>().abs() < 1e-9);
        assert!((fit.mean_model.seasonal[0] + 27.5).abs() < 1.0);
    }

    #[test]
    fn loglik_nondecreasing_in_order() {
        let x = simulate_ar(&[0.5, -0.2], 400, 8);
        let s = TimeSeries::new(x, 1).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for p in 0..=4 {
            let fit = fit_ar(&s, MeanModelKind::Constant, p).unwrap();
            assert!(fit.loglik >= prev - 1e-7, "p={p}: {} < {prev}", fit.loglik);
            assert!(is_causal(&fit.phi));
            prev = fit.loglik;
        }
    }

    #[test]
    fn bic_picks_true_order() {
        let x = simulate_ar(&[0.6], 2_000, 9);
        let s = TimeSeries::new(x, 1).unwrap();
        assert_eq!(select_order_bic(&s, MeanModelKind::Constant, 5).unwrap().order, 1);
    }

    #[test]
    fn too_short_series() {
        let s = TimeSeries::new(vec![1.0, 2.0, 0.5, 1.5], 1).unwrap();
        assert!(matches!(
            fit_ar(&s, MeanModelKind::LinearTrend, 1),
            Err(Error::SeriesTooShort { .. })
        ));
    }

    #[test]
    fn ar0_prewhitening_is_detrending() {
        let x = simulate_ar(&[], 50, 10);
        let s = TimeSeries::new(x.iter().enumerate().map(|(i, v)| v + 0.1 * i as f64).collect(), 1).unwrap();
        let fit = fit_ar(&s, MeanModelKind::LinearTrend, 0).unwrap();
        let y = prewhiten(&s, &fit).unwrap();
        for t in 1..=50 {
            assert!((y.at(t) - (s.at(t) - fit.mean_model.value_at(t))).abs() < 1e-12);
        }
    }

    #[test]
    fn ar1_startup_is_mean() {
        let x = simulate_ar(&[0.4], 80, 11);
        let s = TimeSeries::new(x.iter().enumerate().map(|(i, v)| 9.0 + 0.02 * i as f64 + v).collect(), 1).unwrap();
        let fit = fit_ar(&s, MeanModelKind::LinearTrend, 1).unwrap();
        let y = prewhiten(&s, &fit).unwrap();
        let b0 = fit.mean_model.intercept;
        let b1 = fit.mean_model.slope;
        assert!((s.at(1) - y.at(1) - (b0 + b1)).abs() < 1e-12);
        let t = 10;
        let pred = b0 + b1 * t as f64 + fit.phi[0] * (s.at(t - 1) - b0 - b1 * (t - 1) as f64);
        assert!((s.at(t) - y.at(t) - pred).abs() < 1e-12);
    }

    #[test]
    fn true_parameters_whiten() {
        let x = simulate_ar(&[0.6], 10_000, 12);
        let s = TimeSeries::new(x, 1).unwrap();
        let fit = ArFit {
            order: 1,
            phi: vec![0.6],
            sigma2: 1.0,
            mean_model: MeanModel::constant(0.0),
            loglik: 0.0,
            n: s.len(),
            period: 1,
        };
        let y = prewhiten(&s, &fit).unwrap();
        let m = y.mean();
        let v: Vec<f64> = y.values().iter().map(|a| a - m).collect();
        let c0: f64 = v.iter().map(|a| a * a).sum();
        let c1: f64 = v.windows(2).map(|w| w[0] * w[1]).sum();
        assert!((c1 / c0).abs() < 0.03);
        // deterministic
        assert_eq!(prewhiten(&s, &fit).unwrap(), y);
    }

    #[test]
    fn prewhiten_rejects_other_series() {
        let s = TimeSeries::new(simulate_ar(&[0.2], 30, 13), 1).unwrap();
        let fit = fit_ar(&s, MeanModelKind::Constant, 1).unwrap();
        let other = TimeSeries::new(simulate_ar(&[0.2], 31, 13), 1).unwrap();
        assert!(matches!(prewhiten(&other, &fit), Err(Error::ModelSeriesMismatch(_))));
    }

    #[test]
    fn long_run_variance_closed_forms() {
        let mk = |phi: Vec<f64>| ArFit {
            order: phi.len(),
            phi,
            sigma2: 1.0,
            mean_model: MeanModel::constant(0.0),
            loglik: 0.0,
            n: 10,
            period: 1,
        };
        assert!((mk(vec![]).long_run_variance().unwrap() - 1.0).abs() < 1e-15);
        assert!((mk(vec![0.5]).long_run_variance().unwrap() - 4.0).abs() < 1e-12);
        assert!((mk(vec![-0.5]).long_run_variance().unwrap() - 4.0 / 9.0).abs() < 1e-12);
        assert!(matches!(mk(vec![1.1]).long_run_variance(), Err(Error::NonStationaryFit)));
    }

    #[test]
    fn fitted_prewhitening_passes_ljung_box() {
        let reps = 100;
        let passes = (0..reps)
            .filter(|r| {
                let s = TimeSeries::new(simulate_ar(&[0.6], 500, 1000 + r), 1).unwrap();
                let fit = fit_ar(&s, MeanModelKind::Constant, 1).unwrap();
                let y = prewhiten(&s, &fit).unwrap();
                ljung_box(y.values(), 10, 1).unwrap().1 > 0.05
            })
            .count();
        assert!(passes >= 90, "{passes}/{reps}");
    }
}
