//! Complexity penalties for the mean-shift problem.

use crate::error::{Error, Result};
use crate::mcpt::config::ChangepointConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PenaltyKind {
    Aic,
    Bic,
    Mbic,
    Mdl,
}

impl PenaltyKind {
    pub const ALL: [PenaltyKind; 4] = [Self::Aic, Self::Bic, Self::Mbic, Self::Mdl];

    pub fn name(self) -> &'static str {
        match self {
            Self::Aic => "aic",
            Self::Bic => "bic",
            Self::Mbic => "mbic",
            Self::Mdl => "mdl",
        }
    }
}

impl std::str::FromStr for PenaltyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown penalty '{s}'; expected aic, bic, mbic or mdl"
                ))
            })
    }
}

/// Penalty of `config` on a series of length `n`; zero when there are no changepoints.
///
/// * AIC `2(2m + 2)`
/// * BIC `(2m + 2) ln N`
/// * mBIC `3m ln N + sum_{i=1}^{m+1} ln((tau_i - tau_{i-1}) / N)`
/// * MDL `sum_{i=1}^{m+1} ln(tau_i - tau_{i-1}) + 2 ln m + 2 sum_{i=2}^{m} ln tau_i`
pub fn penalty(kind: PenaltyKind, config: &ChangepointConfig, n: usize) -> f64 {
    let m = config.m();
    if m == 0 {
        return 0.0;
    }
    let mf = m as f64;
    let ln_n = (n as f64).ln();
    let bounds = config.boundaries(n);
    let gaps = || bounds.windows(2).map(|w| (w[1] - w[0]) as f64);
    match kind {
        PenaltyKind::Aic => 2.0 * (2.0 * mf + 2.0),
        PenaltyKind::Bic => (2.0 * mf + 2.0) * ln_n,
        PenaltyKind::Mbic => 3.0 * mf * ln_n + gaps().map(|g| (g / n as f64).ln()).sum::<f64>(),
        PenaltyKind::Mdl => {
            let tail: f64 = config.taus()[1..].iter().map(|&t| (t as f64).ln()).sum();
            gaps().map(f64::ln).sum::<f64>() + 2.0 * mf.ln() + 2.0 * tail
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(t: &[usize], n: usize) -> ChangepointConfig {
        ChangepointConfig::new(t.to_vec(), n).unwrap()
    }

    #[test]
    fn zero_without_changepoints() {
        for k in PenaltyKind::ALL {
            assert_eq!(penalty(k, &ChangepointConfig::empty(), 100), 0.0);
        }
    }

    #[test]
    fn worked_values() {
        let one = cfg(&[51], 100);
        assert!((penalty(PenaltyKind::Bic, &one, 100) - 4.0 * 100f64.ln()).abs() < 1e-12);
        assert!((penalty(PenaltyKind::Bic, &one, 100) - 18.4207).abs() < 1e-4);
        assert!((penalty(PenaltyKind::Mdl, &one, 100) - 2.0 * 50f64.ln()).abs() < 1e-12);
        assert!((penalty(PenaltyKind::Aic, &one, 100) - 8.0).abs() < 1e-12);
        let mbic = 3.0 * 100f64.ln() + 2.0 * 0.5f64.ln();
        assert!((penalty(PenaltyKind::Mbic, &one, 100) - mbic).abs() < 1e-12);
    }

    #[test]
    fn mdl_three_changepoints() {
        let c = cfg(&[20, 50, 80], 100);
        let expect = 19f64.ln() + 30f64.ln() + 30f64.ln() + 21f64.ln()
            + 2.0 * 3f64.ln()
            + 2.0 * (50f64.ln() + 80f64.ln());
        assert!((penalty(PenaltyKind::Mdl, &c, 100) - expect).abs() < 1e-12);
    }

    #[test]
    fn location_dependence() {
        let early = cfg(&[30], 100);
        let late = cfg(&[71], 100);
        assert_eq!(
            penalty(PenaltyKind::Bic, &early, 100),
            penalty(PenaltyKind::Bic, &late, 100)
        );
        assert_ne!(
            penalty(PenaltyKind::Mdl, &early, 100),
            penalty(PenaltyKind::Mdl, &late, 100)
        );
        assert_ne!(
            penalty(PenaltyKind::Mbic, &cfg(&[10], 100), 100),
            penalty(PenaltyKind::Mbic, &cfg(&[50], 100), 100)
        );
    }

    #[test]
    fn aic_is_linear_in_m() {
        let a = penalty(PenaltyKind::Aic, &cfg(&[30], 100), 100);
        let b = penalty(PenaltyKind::Aic, &cfg(&[30, 60], 100), 100);
        assert!((b - a - 4.0).abs() < 1e-12);
    }
}
