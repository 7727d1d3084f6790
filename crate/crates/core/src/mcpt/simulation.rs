//! Monte Carlo comparison of binary segmentation with GA-minimized
//! penalized likelihood on the three-shift design (`N = 500`, shifts at
//! 126, 251 and 376 alternating up and down).

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::amoc::NullTables;
use crate::ar::MeanModelKind;
use crate::datasets::{simulate, SimSpec};
use crate::error::{Error, Result};
use crate::mcpt::binseg::binary_segmentation_config;
use crate::mcpt::config::{config_distance, ChangepointConfig};
use crate::mcpt::ga::{ga_search_with, Evaluator, GaParams};
use crate::mcpt::likelihood::MeanShiftModel;
use crate::mcpt::penalty::PenaltyKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StudyMethod {
    BinarySegmentation,
    Penalized(PenaltyKind),
}

impl StudyMethod {
    pub fn name(self) -> &'static str {
        match self {
            Self::BinarySegmentation => "binseg",
            Self::Penalized(PenaltyKind::Aic) => "aic-ga",
            Self::Penalized(PenaltyKind::Bic) => "bic-ga",
            Self::Penalized(PenaltyKind::Mbic) => "mbic-ga",
            Self::Penalized(PenaltyKind::Mdl) => "mdl-ga",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StudyOptions {
    pub replicates: usize,
    pub seed: u64,
    /// Size of each mean shift in noise standard deviations.
    pub shift: f64,
    /// AR order fitted by every method.
    pub ar_order: usize,
    /// Level of the AMOC tests inside binary segmentation.
    pub alpha: f64,
    pub penalties: Vec<PenaltyKind>,
    pub ga: GaParams,
}

impl Default for StudyOptions {
    fn default() -> Self {
        Self {
            replicates: 100,
            seed: 1,
            shift: 1.0,
            ar_order: 0,
            alpha: 0.05,
            penalties: vec![PenaltyKind::Bic, PenaltyKind::Mbic, PenaltyKind::Mdl],
            ga: GaParams::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Estimate {
    pub method: StudyMethod,
    pub config: ChangepointConfig,
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Replicate {
    pub index: usize,
    /// Seed of the simulated series.
    pub seed: u64,
    pub estimates: Vec<Estimate>,
}

impl Replicate {
    pub fn estimate(&self, method: StudyMethod) -> Option<&Estimate> {
        self.estimates.iter().find(|e| e.method == method)
    }
}

/// Aggregates for one method over all replicates.
#[derive(Clone, Debug, PartialEq)]
pub struct MethodSummary {
    pub method: StudyMethod,
    pub mean_distance: f64,
    pub median_distance: f64,
    pub median_m: f64,
    /// Share of replicates with exactly the true number of changepoints.
    pub correct_m: f64,
    /// Share of replicates recovering the true configuration exactly.
    pub exact: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StudyResult {
    pub options: StudyOptions,
    pub truth: ChangepointConfig,
    pub n: usize,
    pub replicates: Vec<Replicate>,
}

impl StudyResult {
    pub fn methods(&self) -> Vec<StudyMethod> {
        self.replicates
            .first()
            .map(|r| r.estimates.iter().map(|e| e.method).collect())
            .unwrap_or_default()
    }

    pub fn distances(&self, method: StudyMethod) -> Vec<f64> {
        self.replicates
            .iter()
            .filter_map(|r| r.estimate(method).map(|e| e.distance))
            .collect()
    }

    pub fn summary(&self) -> Vec<MethodSummary> {
        self.methods()
            .into_iter()
            .map(|method| {
                let est: Vec<&Estimate> = self.replicates.iter().filter_map(|r| r.estimate(method)).collect();
                let k = est.len() as f64;
                let d: Vec<f64> = est.iter().map(|e| e.distance).collect();
                let m: Vec<f64> = est.iter().map(|e| e.config.m() as f64).collect();
                MethodSummary {
                    method,
                    mean_distance: d.iter().sum::<f64>() / k,
                    median_distance: median(d),
                    median_m: median(m),
                    correct_m: est.iter().filter(|e| e.config.m() == self.truth.m()).count() as f64 / k,
                    exact: est.iter().filter(|e| e.config == self.truth).count() as f64 / k,
                }
            })
            .collect()
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k == 0 {
        return f64::NAN;
    }
    if k % 2 == 1 {
        v[k / 2]
    } else {
        (v[k / 2 - 1] + v[k / 2]) / 2.0
    }
}

/// Seed of replicate `index`: one ChaCha stream per replicate, so results
/// do not depend on scheduling or on the replicate count.
fn replicate_seed(seed: u64, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng.next_u64()
}

/// Runs every method on `options.replicates` simulated series. Replicates
/// run in parallel; the output is identical for any thread count.
pub fn simulation_study(options: &StudyOptions, tables: &NullTables) -> Result<StudyResult> {
    if options.replicates < 10 {
        return Err(Error::InvalidParameter(format!(
            "simulation study needs at least 10 replicates, got {}",
            options.replicates
        )));
    }
    let design = SimSpec::three_shift_design(options.shift, 0);
    let n = design.n;
    let truth = ChangepointConfig::new(design.taus.clone(), n)?;
    let replicates = (0..options.replicates)
        .into_par_iter()
        .map(|index| run_replicate(options, tables, index, &truth))
        .collect::<Result<Vec<_>>>()?;
    Ok(StudyResult {
        options: options.clone(),
        truth,
        n,
        replicates,
    })
}

fn run_replicate(options: &StudyOptions, tables: &NullTables, index: usize, truth: &ChangepointConfig) -> Result<Replicate> {
    let seed = replicate_seed(options.seed, index);
    let (series, _) = simulate(&SimSpec::three_shift_design(options.shift, seed))?;
    let n = series.len();
    let kind = MeanModelKind::Constant;
    let mut estimates = Vec::with_capacity(options.penalties.len() + 1);
    let bs = binary_segmentation_config(&series, kind, options.ar_order, options.alpha, tables)?;
    estimates.push(Estimate {
        method: StudyMethod::BinarySegmentation,
        distance: config_distance(&bs, truth, n).value,
        config: bs,
    });
    let model = MeanShiftModel::new(&series, kind, options.ar_order)?;
    let mut eval = Evaluator::new(&model);
    for (j, &pen) in options.penalties.iter().enumerate() {
        let fit = ga_search_with(&mut eval, pen, &options.ga, seed ^ (j as u64 + 1))?;
        estimates.push(Estimate {
            method: StudyMethod::Penalized(pen),
            distance: config_distance(&fit.config, truth, n).value,
            config: fit.config,
        });
    }
    Ok(Replicate { index, seed, estimates })
}
