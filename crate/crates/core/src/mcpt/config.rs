//! Changepoint configurations and the distance between two of them.

use crate::error::{Error, Result};

/// Shortest admissible segment.
pub const MIN_SEG: usize = 2;

/// Ordered changepoint times `tau_1 < ... < tau_m`.
///
/// `tau_i` is the first observation (1-based) of regime `i + 1`, so the
/// segments are `[tau_{i-1}, tau_i - 1]` with `tau_0 = 1` and
/// `tau_{m+1} = N + 1`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChangepointConfig {
    taus: Vec<usize>,
}

impl ChangepointConfig {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Validates ordering and segment lengths (at least [`MIN_SEG`]) for a
    /// series of length `n`.
    pub fn new(taus: Vec<usize>, n: usize) -> Result<Self> {
        let cfg = Self { taus };
        cfg.validate(n, MIN_SEG)?;
        Ok(cfg)
    }

    pub(crate) fn from_sorted_unchecked(taus: Vec<usize>) -> Self {
        Self { taus }
    }

    pub fn validate(&self, n: usize, min_seg: usize) -> Result<()> {
        let mut prev = 1;
        for &tau in &self.taus {
            if tau <= prev || tau > n {
                return Err(Error::InvalidConfig(format!(
                    "changepoints must be strictly increasing within 2..={n}; got {:?}",
                    self.taus
                )));
            }
            if tau - prev < min_seg {
                return Err(Error::SegmentTooShort {
                    start: prev,
                    len: tau - prev,
                    min: min_seg,
                });
            }
            prev = tau;
        }
        if n + 1 - prev < min_seg {
            return Err(Error::SegmentTooShort {
                start: prev,
                len: n + 1 - prev,
                min: min_seg,
            });
        }
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.taus.len()
    }

    pub fn taus(&self) -> &[usize] {
        &self.taus
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }

    /// `[tau_0 = 1, tau_1, ..., tau_m, tau_{m+1} = n + 1]`.
    pub fn boundaries(&self, n: usize) -> Vec<usize> {
        let mut b = Vec::with_capacity(self.taus.len() + 2);
        b.push(1);
        b.extend_from_slice(&self.taus);
        b.push(n + 1);
        b
    }

    /// Inclusive 1-based `(start, end)` of every segment.
    pub fn segments(&self, n: usize) -> Vec<(usize, usize)> {
        self.boundaries(n).windows(2).map(|w| (w[0], w[1] - 1)).collect()
    }

    /// 0-based regime index of time `t`.
    pub fn segment_of(&self, t: usize) -> usize {
        self.taus.partition_point(|&tau| tau <= t)
    }
}

/// Distance between an estimated and a reference configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConfigDistance {
    pub value: f64,
    /// `|m_a - m_b|`.
    pub count_term: f64,
    /// Summed `|tau_a - tau_b|` over matched pairs, divided by `N`.
    pub location_term: f64,
}

/// `|m_a - m_b| + (1/N) sum |a_i - b_j|` over an optimal order-preserving
/// matching of the two sets of times.
///
/// The matching minimizes the matched distances plus `N/2` for every point
/// left unmatched; only matched pairs enter the location term, so comparing
/// against an empty configuration gives the pure count difference.
pub fn config_distance(a: &ChangepointConfig, b: &ChangepointConfig, n: usize) -> ConfigDistance {
    let (x, y) = (a.taus(), b.taus());
    let skip = n as f64 / 2.0;
    let (p, q) = (x.len(), y.len());
    // cost[i][j]: best cost for x[..i], y[..j]; matched[i][j]: its matched distance sum
    let mut cost = vec![vec![0.0; q + 1]; p + 1];
    let mut matched = vec![vec![0.0; q + 1]; p + 1];
    for i in 0..=p {
        for j in 0..=q {
            if i == 0 && j == 0 {
                continue;
            }
            let mut best = (f64::INFINITY, 0.0);
            if i > 0 {
                best = (cost[i - 1][j] + skip, matched[i - 1][j]);
            }
            if j > 0 && cost[i][j - 1] + skip < best.0 {
                best = (cost[i][j - 1] + skip, matched[i][j - 1]);
            }
            if i > 0 && j > 0 {
                let d = x[i - 1].abs_diff(y[j - 1]) as f64;
                if cost[i - 1][j - 1] + d < best.0 {
                    best = (cost[i - 1][j - 1] + d, matched[i - 1][j - 1] + d);
                }
            }
            cost[i][j] = best.0;
            matched[i][j] = best.1;
        }
    }
    let count_term = p.abs_diff(q) as f64;
    let location_term = matched[p][q] / n as f64;
    ConfigDistance {
        value: count_term + location_term,
        count_term,
        location_term,
    }
}
