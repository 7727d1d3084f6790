//! Global minimization of the penalized objective by enumeration.

use crate::ar::MeanModelKind;
use crate::error::{Error, Result};
use crate::mcpt::config::{ChangepointConfig, MIN_SEG};
use crate::mcpt::likelihood::{MeanShiftModel, PenalizedFit};
use crate::mcpt::penalty::{penalty, PenaltyKind};
use crate::series::TimeSeries;

/// Calls `visit` on every admissible configuration of at most `max_m`
/// changepoints, in lexicographic order of the changepoint lists.
pub fn for_each_config<F: FnMut(&ChangepointConfig)>(n: usize, max_m: usize, mut visit: F) {
    fn rec<F: FnMut(&ChangepointConfig)>(
        n: usize,
        max_m: usize,
        prev: usize,
        taus: &mut Vec<usize>,
        visit: &mut F,
    ) {
        visit(&ChangepointConfig::from_sorted_unchecked(taus.clone()));
        if taus.len() == max_m {
            return;
        }
        // next changepoint leaves MIN_SEG before it and after it
        for tau in prev + MIN_SEG..=(n + 1).saturating_sub(MIN_SEG) {
            taus.push(tau);
            rec(n, max_m, tau, taus, visit);
            taus.pop();
        }
    }
    rec(n, max_m, 1, &mut Vec::new(), &mut visit);
}

/// Exact minimizer of `-2 ln L + penalty` over all configurations with at
/// most `max_m` changepoints (all of them when `max_m` is `None`).
///
/// Limited to `N <= 25`, or `N <= 200` with `max_m <= 3`.
pub fn exhaustive_search(
    series: &TimeSeries,
    penalty_kind: PenaltyKind,
    kind: MeanModelKind,
    p: usize,
    max_m: Option<usize>,
) -> Result<PenalizedFit> {
    let n = series.len();
    let feasible = n <= 25 || (n <= 200 && max_m.is_some_and(|m| m <= 3));
    if !feasible {
        return Err(Error::ProblemTooLarge(format!(
            "exhaustive search needs N <= 25, or N <= 200 with at most 3 changepoints; got N={n}, max_m={max_m:?}"
        )));
    }
    let model = MeanShiftModel::new(series, kind, p)?;
    let base = model.fit(&ChangepointConfig::empty())?;
    let mut best = (base.minus2loglik, ChangepointConfig::empty());
    for_each_config(n, max_m.unwrap_or(n), |cfg| {
        if cfg.is_empty() {
            return;
        }
        if let Ok(m2ll) = model.minus2loglik(cfg) {
            let obj = m2ll + penalty(penalty_kind, cfg, n);
            if obj < best.0 {
                best = (obj, cfg.clone());
            }
        }
    });
    model.penalized_fit(&best.1, penalty_kind)
}
