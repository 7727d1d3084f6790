//! Binary segmentation with pre-whitened AMOC tests.

use crate::amoc::{amoc_pipeline, NullTables};
use crate::ar::MeanModelKind;
use crate::error::{Error, Result};
use crate::mcpt::config::{ChangepointConfig, MIN_SEG};
use crate::mcpt::likelihood::MeanShiftModel;
use crate::mcpt::penalty::PenaltyKind;
use crate::mcpt::report::{SearchMethod, SearchResult};
use crate::series::TimeSeries;

/// Changepoints found by recursive AMOC testing.
///
/// Each segment gets its own AR(`p`) fit and test (SCUSUM for a constant
/// mean, CUSUM_D for a linear trend). A segment that rejects at level
/// `alpha` is split after the CUSUM maximizer, restricted so both halves
/// keep [`MIN_SEG`] points; recursion stops at segments shorter than
/// `2 * MIN_SEG` or too short to fit the AR model.
pub fn binary_segmentation_config(
    series: &TimeSeries,
    kind: MeanModelKind,
    p: usize,
    alpha: f64,
    tables: &NullTables,
) -> Result<ChangepointConfig> {
    if kind == MeanModelKind::SeasonalOffsets && series.period() > 1 {
        return Err(Error::InvalidParameter(
            "binary segmentation supports constant and trend means; deseasonalize first".into(),
        ));
    }
    let n = series.len();
    if n < 2 * MIN_SEG {
        return Err(Error::SeriesTooShort {
            len: n,
            required: 2 * MIN_SEG,
        });
    }
    let mut taus = Vec::new();
    let mut stack = vec![(1usize, n)];
    while let Some((s, e)) = stack.pop() {
        let len = e + 1 - s;
        if len < 2 * MIN_SEG {
            continue;
        }
        let sub = TimeSeries::new(series.values()[s - 1..e].to_vec(), 1)?
            .with_start(series.label_of(s));
        let result = match amoc_pipeline(&sub, kind, p, tables) {
            Ok(r) => r,
            Err(Error::SeriesTooShort { .. } | Error::NonStationaryFit | Error::ZeroVariance) => {
                continue
            }
            Err(err) => return Err(err),
        };
        if !result.significant_at(alpha) {
            continue;
        }
        let k = (MIN_SEG..=len - MIN_SEG)
            .rev()
            .max_by(|&a, &b| result.cusum[a - 1].abs().total_cmp(&result.cusum[b - 1].abs()))
            .expect("non-empty range");
        let tau = s + k;
        taus.push(tau);
        stack.push((tau, e));
        stack.push((s, tau - 1));
    }
    taus.sort_unstable();
    ChangepointConfig::new(taus, n)
}

/// [`binary_segmentation_config`] with the found configuration fitted by
/// maximum likelihood and scored under `score_with`.
pub fn binary_segmentation(
    series: &TimeSeries,
    kind: MeanModelKind,
    p: usize,
    alpha: f64,
    tables: &NullTables,
    score_with: PenaltyKind,
) -> Result<SearchResult> {
    let config = binary_segmentation_config(series, kind, p, alpha, tables)?;
    let fit = MeanShiftModel::new(series, kind, p)?.penalized_fit(&config, score_with)?;
    Ok(SearchResult::new(SearchMethod::BinarySegmentation, None, fit, series))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn noise(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    #[test]
    fn finds_two_large_shifts() {
        let mut x = noise(150, 1);
        for v in &mut x[50..100] {
            *v += 3.0;
        }
        let s = TimeSeries::annual(x, 1900).unwrap();
        let tables = NullTables::shipped();
        let cfg = binary_segmentation_config(&s, MeanModelKind::Constant, 0, 0.05, tables).unwrap();
        assert_eq!(cfg.taus(), &[51, 101]);
        let r = binary_segmentation(&s, MeanModelKind::Constant, 0, 0.05, tables, PenaltyKind::Bic).unwrap();
        assert_eq!(r.labels, vec![1950, 2000]);
    }

    #[test]
    fn null_series_usually_unsplit() {
        let tables = NullTables::shipped();
        let empty = (0..100)
            .filter(|&seed| {
                let s = TimeSeries::new(noise(100, 300 + seed), 1).unwrap();
                binary_segmentation_config(&s, MeanModelKind::Constant, 0, 0.05, tables)
                    .unwrap()
                    .is_empty()
            })
            .count();
        assert!(empty >= 88, "{empty}");
    }

    #[test]
    fn seasonal_mean_is_rejected() {
        let s = TimeSeries::new(noise(48, 2), 12).unwrap();
        assert!(binary_segmentation_config(&s, MeanModelKind::SeasonalOffsets, 0, 0.05, NullTables::shipped()).is_err());
    }
}
