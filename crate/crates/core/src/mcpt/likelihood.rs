//! Exact Gaussian likelihood of a mean-shift model with AR(p) errors.
//!
//! The model is `X_t = mu_t + Delta_{r(t)} + e_t`, where `mu_t` is the mean
//! structure (constant, linear trend or seasonal offsets), `r(t)` the regime
//! of `t`, `Delta_1 = 0`, and `e_t` a causal AR(p) process whose parameters
//! are shared by all regimes. For fixed AR parameters the regression
//! coefficients and the innovation variance have closed-form GLS estimates;
//! the AR parameters are optimized in an outer loop.
//!
//! GLS needs the prediction-error transform `e(a)` of every regression
//! column `a`. After the first `p` times it is the filter
//! `e_t(a) = sum_l c_l a_{t-l}` with `c = (1, -phi_1, ..., -phi_p)`, so the
//! cross products reduce to `sum_{l,l'} c_l c_l' L_{l l'}(a, b)` with lag
//! moments `L_{l l'}(a, b) = sum_{t>p} a_{t-l} b_{t-l'}`. Those are computed
//! once per configuration (in O(1) each for regime indicators, via prefix
//! sums), so each likelihood evaluation during the AR search costs
//! O(p^2 K^2) for `K` columns, independent of `N`.

use nalgebra::{DMatrix, DVector};

use crate::ar::{
    m2ll_from_profile, mean_design, optimize_pacf, ArFit, ArPredictor, MeanModel, MeanModelKind,
};
use crate::error::{Error, Result};
use crate::mcpt::config::{ChangepointConfig, MIN_SEG};
use crate::mcpt::penalty::{penalty, PenaltyKind};
use crate::series::TimeSeries;

/// A configuration fitted by maximum likelihood, with its penalized objective.
#[derive(Clone, Debug, PartialEq)]
pub struct PenalizedFit {
    pub config: ChangepointConfig,
    /// Mean structure of the first regime.
    pub mean_model: MeanModel,
    /// Regime offsets `Delta_1 = 0, Delta_2, ..., Delta_{m+1}`.
    pub offsets: Vec<f64>,
    /// AR parameters and innovation variance shared by all regimes.
    pub error_model: ArFit,
    pub minus2loglik: f64,
    pub penalty_kind: Option<PenaltyKind>,
    pub penalty: f64,
    pub objective: f64,
}

impl PenalizedFit {
    pub fn n(&self) -> usize {
        self.error_model.n
    }

    /// Fitted mean at time `t` (1-based).
    pub fn fitted_mean(&self, t: usize) -> f64 {
        self.mean_model.value_at(t) + self.offsets[self.config.segment_of(t)]
    }

    pub fn fitted_values(&self) -> Vec<f64> {
        (1..=self.n()).map(|t| self.fitted_mean(t)).collect()
    }

    /// Average fitted mean over each segment.
    pub fn segment_means(&self) -> Vec<f64> {
        self.config
            .segments(self.n())
            .into_iter()
            .map(|(s, e)| (s..=e).map(|t| self.fitted_mean(t)).sum::<f64>() / (e + 1 - s) as f64)
            .collect()
    }

    /// Re-scores the same fit under `kind`.
    pub fn with_penalty(mut self, kind: PenaltyKind) -> Self {
        self.penalty = penalty(kind, &self.config, self.n());
        self.penalty_kind = Some(kind);
        self.objective = self.minus2loglik + self.penalty;
        self
    }
}

/// Result of profiling one configuration.
#[derive(Clone, Debug)]
struct Profile {
    m2ll: f64,
    pacf: Vec<f64>,
    beta: Vec<f64>,
    sigma2: f64,
}

/// Precomputed data for evaluating many configurations on one series.
#[derive(Clone, Debug)]
pub struct MeanShiftModel {
    n: usize,
    period: usize,
    kind: MeanModelKind,
    p: usize,
    y_mean: f64,
    /// Regressors other than the regime indicators, then the centered data.
    fixed: Vec<Vec<f64>>,
    /// Prefix sums of `fixed`, each of length `n + 1`.
    prefix: Vec<Vec<f64>>,
    /// `L_{l l'}` among the fixed columns, indexed `l * (p + 1) + l'`.
    fixed_lag: Vec<DMatrix<f64>>,
}

impl MeanShiftModel {
    pub fn new(series: &TimeSeries, kind: MeanModelKind, p: usize) -> Result<Self> {
        let n = series.len();
        let period = series.period();
        let y_mean = series.mean();
        let mut fixed: Vec<Vec<f64>> = Vec::new();
        match kind {
            MeanModelKind::Constant => {}
            MeanModelKind::LinearTrend => {
                let c = (n as f64 + 1.0) / 2.0;
                fixed.push((1..=n).map(|t| (t as f64 - c) / n as f64).collect());
            }
            MeanModelKind::SeasonalOffsets => {
                let d = mean_design(kind, n, period);
                for col in 1..d.ncols() {
                    fixed.push(d.column(col).iter().copied().collect());
                }
            }
        }
        fixed.push(series.values().iter().map(|v| v - y_mean).collect());
        let prefix = fixed
            .iter()
            .map(|col| {
                let mut acc = vec![0.0; n + 1];
                for (i, v) in col.iter().enumerate() {
                    acc[i + 1] = acc[i] + v;
                }
                acc
            })
            .collect();
        let f = fixed.len();
        let mut fixed_lag = Vec::with_capacity((p + 1) * (p + 1));
        for l in 0..=p {
            for l2 in 0..=p {
                fixed_lag.push(DMatrix::from_fn(f, f, |a, b| {
                    (p..n).map(|i| fixed[a][i - l] * fixed[b][i - l2]).sum()
                }));
            }
        }
        Ok(Self {
            n,
            period,
            kind,
            p,
            y_mean,
            fixed,
            prefix,
            fixed_lag,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ar_order(&self) -> usize {
        self.p
    }

    pub fn mean_kind(&self) -> MeanModelKind {
        self.kind
    }

    fn check(&self, config: &ChangepointConfig) -> Result<()> {
        config.validate(self.n, MIN_SEG)?;
        let k = config.m() + self.fixed.len();
        if self.n < k + self.p + 1 {
            return Err(Error::SeriesTooShort {
                len: self.n,
                required: k + self.p + 1,
            });
        }
        Ok(())
    }

    /// `-2 ln L` at the maximum-likelihood parameters of `config`.
    pub fn minus2loglik(&self, config: &ChangepointConfig) -> Result<f64> {
        Ok(self.profile(config)?.m2ll)
    }

    /// Maximum-likelihood fit of `config`, unpenalized.
    pub fn fit(&self, config: &ChangepointConfig) -> Result<PenalizedFit> {
        let prof = self.profile(config)?;
        Ok(self.assemble(config, prof))
    }

    /// Maximum-likelihood fit of `config` scored under `kind`.
    pub fn penalized_fit(&self, config: &ChangepointConfig, kind: PenaltyKind) -> Result<PenalizedFit> {
        Ok(self.fit(config)?.with_penalty(kind))
    }

    fn profile(&self, config: &ChangepointConfig) -> Result<Profile> {
        self.check(config)?;
        let moments = Moments::new(self, config);
        let (pacf, _) = optimize_pacf(self.p, None, |a| {
            moments
                .evaluate(&ArPredictor::from_pacf(a), self.n)
                .map_or(f64::INFINITY, |(m2ll, _, _)| m2ll)
        });
        let (m2ll, beta, sigma2) = moments.evaluate(&ArPredictor::from_pacf(&pacf), self.n)?;
        Ok(Profile {
            m2ll,
            pacf,
            beta,
            sigma2,
        })
    }

    fn assemble(&self, config: &ChangepointConfig, prof: Profile) -> PenalizedFit {
        let regimes = config.m() + 1;
        let levels = &prof.beta[..regimes];
        let extra = &prof.beta[regimes..];
        let base = levels[0] + self.y_mean;
        let mean_model = match self.kind {
            MeanModelKind::Constant => MeanModel::constant(base),
            MeanModelKind::LinearTrend => {
                let n = self.n as f64;
                let slope = extra[0] / n;
                MeanModel::linear(base - slope * (n + 1.0) / 2.0, slope)
            }
            MeanModelKind::SeasonalOffsets => {
                let mut seasonal = extra.to_vec();
                seasonal.push(-seasonal.iter().sum::<f64>());
                if self.period == 1 {
                    seasonal = vec![0.0];
                }
                MeanModel {
                    kind: MeanModelKind::SeasonalOffsets,
                    intercept: base,
                    slope: 0.0,
                    seasonal,
                }
            }
        };
        let offsets = levels.iter().map(|b| b - levels[0]).collect();
        let predictor = ArPredictor::from_pacf(&prof.pacf);
        let error_model = ArFit {
            order: self.p,
            phi: predictor.phi,
            sigma2: prof.sigma2,
            mean_model: mean_model.clone(),
            loglik: -0.5 * prof.m2ll,
            n: self.n,
            period: self.period,
        };
        PenalizedFit {
            config: config.clone(),
            mean_model,
            offsets,
            error_model,
            minus2loglik: prof.m2ll,
            penalty_kind: None,
            penalty: 0.0,
            objective: prof.m2ll,
        }
    }
}

/// Lag moments of all columns for one configuration.
///
/// Column order: regime indicators, other regressors, data.
struct Moments {
    k: usize,
    p: usize,
    lag: Vec<DMatrix<f64>>,
    /// Values of every column at times `1..=p`.
    head: Vec<Vec<f64>>,
}

impl Moments {
    fn new(model: &MeanShiftModel, config: &ChangepointConfig) -> Self {
        let (n, p) = (model.n, model.p);
        let segs: Vec<(usize, usize)> = config
            .segments(n)
            .into_iter()
            .map(|(s, e)| (s - 1, e - 1))
            .collect();
        let r = segs.len();
        let f = model.fixed.len();
        let k = r + f;
        let lo_i = p;
        let hi_i = n - 1;

        // sum over i in [lo, hi] of fixed column `c` at i - shift
        let fixed_sum = |c: usize, lo: usize, hi: usize, shift: usize| -> f64 {
            if lo > hi {
                return 0.0;
            }
            model.prefix[c][hi - shift + 1] - model.prefix[c][lo - shift]
        };

        let mut lag = Vec::with_capacity((p + 1) * (p + 1));
        for l in 0..=p {
            for l2 in 0..=p {
                let mut m = DMatrix::zeros(k, k);
                for (a, &(sa, ea)) in segs.iter().enumerate() {
                    // times i whose lag-l value lies in segment a
                    let lo_a = (sa + l).max(lo_i);
                    let hi_a = (ea + l).min(hi_i);
                    for (b, &(sb, eb)) in segs.iter().enumerate() {
                        let lo = lo_a.max(sb + l2);
                        let hi = hi_a.min(eb + l2);
                        m[(a, b)] = if lo <= hi { (hi - lo + 1) as f64 } else { 0.0 };
                    }
                    for c in 0..f {
                        m[(a, r + c)] = fixed_sum(c, lo_a, hi_a, l2);
                    }
                }
                for c in 0..f {
                    for (b, &(sb, eb)) in segs.iter().enumerate() {
                        let lo = (sb + l2).max(lo_i);
                        let hi = (eb + l2).min(hi_i);
                        m[(r + c, b)] = fixed_sum(c, lo, hi, l);
                    }
                }
                m.view_mut((r, r), (f, f))
                    .copy_from(&model.fixed_lag[l * (p + 1) + l2]);
                lag.push(m);
            }
        }

        let head = (0..p.min(n))
            .map(|i| {
                let mut row = vec![0.0; k];
                row[config.segment_of(i + 1)] = 1.0;
                for c in 0..f {
                    row[r + c] = model.fixed[c][i];
                }
                row
            })
            .collect();
        Self { k, p, lag, head }
    }

    /// `(-2 ln L, beta, sigma2)` for fixed AR parameters.
    fn evaluate(&self, pred: &ArPredictor, n: usize) -> Result<(f64, Vec<f64>, f64)> {
        let (k, p) = (self.k, self.p);
        let mut c = vec![1.0; p + 1];
        for (cj, phi) in c[1..].iter_mut().zip(&pred.phi) {
            *cj = -phi;
        }
        let mut g = DMatrix::<f64>::zeros(k, k);
        for l in 0..=p {
            for l2 in 0..=p {
                let w = c[l] * c[l2];
                if w != 0.0 {
                    g += &self.lag[l * (p + 1) + l2] * w;
                }
            }
        }
        for i in 0..self.head.len() {
            let coefs = pred.coefs_at(i);
            let e: Vec<f64> = (0..k)
                .map(|col| {
                    self.head[i][col]
                        - coefs
                            .iter()
                            .enumerate()
                            .map(|(j, cf)| cf * self.head[i - 1 - j][col])
                            .sum::<f64>()
                })
                .collect();
            let w = 1.0 / pred.mse_at(i);
            for a in 0..k {
                for b in 0..k {
                    g[(a, b)] += w * e[a] * e[b];
                }
            }
        }
        let kx = k - 1;
        let gxx = g.view((0, 0), (kx, kx)).clone_owned();
        let gxy = DVector::from_iterator(kx, (0..kx).map(|a| g[(a, kx)]));
        let chol = gxx
            .cholesky()
            .ok_or_else(|| Error::InvalidConfig("singular regression design".into()))?;
        let beta = chol.solve(&gxy);
        let s = g[(kx, kx)] - gxy.dot(&beta);
        let sigma2 = s / n as f64;
        if sigma2.is_nan() || sigma2 <= 0.0 || !sigma2.is_finite() {
            return Err(Error::ZeroVariance);
        }
        Ok((
            m2ll_from_profile(n, sigma2, pred.log_det()),
            beta.iter().copied().collect(),
            sigma2,
        ))
    }
}

/// Maximum-likelihood fit of `config`, with `-2 ln L` in `minus2loglik` and
/// no penalty.
pub fn gaussian_loglik(
    series: &TimeSeries,
    config: &ChangepointConfig,
    kind: MeanModelKind,
    p: usize,
) -> Result<PenalizedFit> {
    MeanShiftModel::new(series, kind, p)?.fit(config)
}
