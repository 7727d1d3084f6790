//! Genetic-algorithm search over changepoint configurations.
//!
//! A chromosome is the sorted list of changepoint times. Children come from
//! uniform crossover on the union of two tournament-selected parents
//! (shared changepoints are always inherited), followed by mutation: add a
//! changepoint, delete one, or move one by up to `jitter` steps. Children
//! are repaired to respect the minimum segment length. The best `elitism`
//! members survive unchanged, and a few random members join every
//! generation to keep the population diverse. The search is restarted a few
//! times; the best distinct members of each run are then polished by
//! steepest-descent local search over single additions, deletions and moves.
//!
//! `-2 ln L` values are memoized per configuration, so repeated runs on the
//! same series (e.g. under different penalties) share work.

use std::collections::{HashMap, HashSet};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::ar::MeanModelKind;
use crate::error::Result;
use crate::mcpt::config::{ChangepointConfig, MIN_SEG};
use crate::mcpt::likelihood::{MeanShiftModel, PenalizedFit};
use crate::mcpt::penalty::{penalty, PenaltyKind};
use crate::series::TimeSeries;

#[derive(Clone, Debug, PartialEq)]
pub struct GaParams {
    pub population: usize,
    pub max_generations: usize,
    /// Stop after this many generations without improvement.
    pub stagnation: usize,
    pub elitism: usize,
    pub tournament: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    /// Largest move of a jitter mutation.
    pub jitter: usize,
    /// Upper bound on changepoints in randomly generated members.
    pub max_initial: usize,
    /// Fresh random members added each generation.
    pub immigrants: usize,
    /// Independent runs; the best result over all of them is kept.
    pub restarts: usize,
    /// Best distinct members of each run refined by local search (0 disables).
    pub polish_starts: usize,
}

impl Default for GaParams {
    fn default() -> Self {
        Self {
            population: 200,
            max_generations: 500,
            stagnation: 50,
            elitism: 2,
            tournament: 2,
            crossover_rate: 0.9,
            mutation_rate: 0.5,
            jitter: 3,
            max_initial: 10,
            immigrants: 10,
            restarts: 5,
            polish_starts: 10,
        }
    }
}

/// Memoized `-2 ln L` of configurations on one series.
pub struct Evaluator<'a> {
    model: &'a MeanShiftModel,
    cache: HashMap<ChangepointConfig, Option<f64>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(model: &'a MeanShiftModel) -> Self {
        Self {
            model,
            cache: HashMap::new(),
        }
    }

    pub fn model(&self) -> &MeanShiftModel {
        self.model
    }

    pub fn evaluations(&self) -> usize {
        self.cache.len()
    }

    /// `-2 ln L` for every config (`None` when a config cannot be fitted),
    /// computing the uncached ones in parallel.
    pub fn minus2loglik(&mut self, configs: &[ChangepointConfig]) -> Vec<Option<f64>> {
        let mut todo: Vec<&ChangepointConfig> = configs
            .iter()
            .filter(|c| !self.cache.contains_key(*c))
            .collect();
        todo.sort();
        todo.dedup();
        let model = self.model;
        let fresh: Vec<Option<f64>> = todo
            .par_iter()
            .map(|c| model.minus2loglik(c).ok())
            .collect();
        for (c, v) in todo.into_iter().zip(fresh) {
            self.cache.insert(c.clone(), v);
        }
        configs.iter().map(|c| self.cache[c]).collect()
    }

    fn objectives(&mut self, configs: &[ChangepointConfig], kind: PenaltyKind) -> Vec<f64> {
        let n = self.model.n();
        self.minus2loglik(configs)
            .into_iter()
            .zip(configs)
            .map(|(v, c)| v.map_or(f64::INFINITY, |m| m + penalty(kind, c, n)))
            .collect()
    }
}

/// Drops changepoints until every segment has at least [`MIN_SEG`] points.
fn repair(mut taus: Vec<usize>, n: usize) -> Vec<usize> {
    taus.sort_unstable();
    taus.dedup();
    let mut out: Vec<usize> = Vec::with_capacity(taus.len());
    let mut prev = 1;
    for t in taus {
        if t >= prev + MIN_SEG && t + MIN_SEG <= n + 1 {
            out.push(t);
            prev = t;
        }
    }
    out
}

/// A random configuration with about `m` changepoints, `m` uniform in `0..=max_m`.
///
/// Segment lengths are drawn as `MIN_SEG` plus a geometric excess, so densely
/// packed configurations are as reachable as sparse ones.
fn random_config<R: Rng>(rng: &mut R, n: usize, max_m: usize) -> Vec<usize> {
    let m = rng.random_range(0..=max_m);
    if m == 0 {
        return Vec::new();
    }
    let mean_excess = ((n as f64 / (m + 1) as f64) - MIN_SEG as f64).max(0.0);
    let q = 1.0 / (1.0 + mean_excess);
    let mut taus = Vec::with_capacity(m);
    let mut t = 1;
    loop {
        let mut len = MIN_SEG;
        while !rng.random_bool(q) {
            len += 1;
        }
        t += len;
        if t + MIN_SEG > n + 1 || taus.len() == m {
            break;
        }
        taus.push(t);
    }
    taus
}

fn crossover<R: Rng>(rng: &mut R, a: &[usize], b: &[usize], n: usize) -> Vec<usize> {
    let mut child: Vec<usize> = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let (t, shared) = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) if x == y => {
                i += 1;
                j += 1;
                (x, true)
            }
            (Some(&x), Some(&y)) if x < y => {
                i += 1;
                (x, false)
            }
            (Some(&x), None) => {
                i += 1;
                (x, false)
            }
            (_, Some(&y)) => {
                j += 1;
                (y, false)
            }
            (None, None) => unreachable!(),
        };
        if shared || rng.random_bool(0.5) {
            child.push(t);
        }
    }
    repair(child, n)
}

fn mutate<R: Rng>(rng: &mut R, taus: &mut Vec<usize>, n: usize, jitter: usize) {
    let op = if taus.is_empty() { 0 } else { rng.random_range(0..3) };
    match op {
        0 => taus.push(rng.random_range(2..=n)),
        1 => {
            let i = rng.random_range(0..taus.len());
            taus.remove(i);
        }
        _ => {
            let i = rng.random_range(0..taus.len());
            let step = rng.random_range(1..=jitter) as i64;
            let step = if rng.random_bool(0.5) { step } else { -step };
            taus[i] = (taus[i] as i64 + step).clamp(2, n as i64) as usize;
        }
    }
    *taus = repair(std::mem::take(taus), n);
}

/// Single-step neighbours: every addition, deletion, and move by up to `jitter`.
fn neighbours(taus: &[usize], n: usize, jitter: usize) -> Vec<ChangepointConfig> {
    let mut out = Vec::new();
    let admissible = |v: &[usize]| {
        ChangepointConfig::from_sorted_unchecked(v.to_vec())
            .validate(n, MIN_SEG)
            .is_ok()
    };
    for t in 2..=n {
        if taus.contains(&t) {
            continue;
        }
        let mut v = taus.to_vec();
        v.push(t);
        v.sort_unstable();
        if admissible(&v) {
            out.push(ChangepointConfig::from_sorted_unchecked(v));
        }
    }
    for i in 0..taus.len() {
        let mut v = taus.to_vec();
        v.remove(i);
        out.push(ChangepointConfig::from_sorted_unchecked(v));
        for d in 1..=jitter as i64 {
            for s in [-d, d] {
                let t = taus[i] as i64 + s;
                if t < 2 || t > n as i64 {
                    continue;
                }
                let mut v = taus.to_vec();
                v[i] = t as usize;
                if admissible(&v) {
                    out.push(ChangepointConfig::from_sorted_unchecked(v));
                }
            }
        }
    }
    out
}

fn tournament<'p, R: Rng>(rng: &mut R, pop: &'p [(f64, Vec<usize>)], size: usize) -> &'p [usize] {
    let mut best = pop.choose(rng).expect("non-empty population");
    for _ in 1..size {
        let c = pop.choose(rng).expect("non-empty population");
        if c.0 < best.0 {
            best = c;
        }
    }
    &best.1
}

/// Steepest descent over [`neighbours`] until no neighbour improves.
fn local_search(
    eval: &mut Evaluator<'_>,
    mut cur: (f64, Vec<usize>),
    penalty_kind: PenaltyKind,
    jitter: usize,
) -> (f64, Vec<usize>) {
    let n = eval.model().n();
    loop {
        let cand = neighbours(&cur.1, n, jitter);
        let objs = eval.objectives(&cand, penalty_kind);
        let step = objs
            .iter()
            .zip(&cand)
            .filter(|(o, _)| **o < cur.0)
            .min_by(|a, b| a.0.total_cmp(b.0).then_with(|| a.1.cmp(b.1)));
        match step {
            Some((o, c)) => cur = (*o, c.taus().to_vec()),
            None => return cur,
        }
    }
}

/// Minimizes `-2 ln L + penalty` with a genetic algorithm.
pub fn ga_search(
    series: &TimeSeries,
    penalty_kind: PenaltyKind,
    kind: MeanModelKind,
    p: usize,
    params: &GaParams,
    seed: u64,
) -> Result<PenalizedFit> {
    let model = MeanShiftModel::new(series, kind, p)?;
    let mut eval = Evaluator::new(&model);
    ga_search_with(&mut eval, penalty_kind, params, seed)
}

/// [`ga_search`] on a shared evaluator.
pub fn ga_search_with(
    eval: &mut Evaluator<'_>,
    penalty_kind: PenaltyKind,
    params: &GaParams,
    seed: u64,
) -> Result<PenalizedFit> {
    let n = eval.model().n();
    // the no-changepoint model must be fittable; errors surface here
    eval.model().fit(&ChangepointConfig::empty())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_init = params.max_initial.min(n / MIN_SEG);
    let size = params.population.max(2);

    let score = |eval: &mut Evaluator<'_>, genomes: Vec<Vec<usize>>| -> Vec<(f64, Vec<usize>)> {
        let cfgs: Vec<ChangepointConfig> = genomes
            .iter()
            .map(|g| ChangepointConfig::from_sorted_unchecked(g.clone()))
            .collect();
        let mut scored: Vec<(f64, Vec<usize>)> =
            eval.objectives(&cfgs, penalty_kind).into_iter().zip(genomes).collect();
        scored.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        scored
    };
    let mut best = (f64::INFINITY, Vec::new());

    for _ in 0..params.restarts.max(1) {
        let mut genomes: Vec<Vec<usize>> = vec![Vec::new()];
        while genomes.len() < size {
            genomes.push(random_config(&mut rng, n, max_init));
        }
        let mut pop = score(eval, genomes);
        let mut run_best = pop[0].clone();
        let mut stale = 0;

        for _ in 0..params.max_generations {
            let mut next: Vec<Vec<usize>> = Vec::with_capacity(size);
            for (_, g) in &pop {
                if next.len() >= params.elitism {
                    break;
                }
                if !next.contains(g) {
                    next.push(g.clone());
                }
            }
            let mut seen: HashSet<Vec<usize>> = next.iter().cloned().collect();
            for _ in 0..params.immigrants.min(size - next.len()) {
                let g = random_config(&mut rng, n, max_init);
                seen.insert(g.clone());
                next.push(g);
            }
            while next.len() < size {
                let a = tournament(&mut rng, &pop, params.tournament);
                let b = tournament(&mut rng, &pop, params.tournament);
                let mut child = if rng.random_bool(params.crossover_rate) {
                    crossover(&mut rng, a, b, n)
                } else {
                    a.to_vec()
                };
                while rng.random_bool(params.mutation_rate) {
                    mutate(&mut rng, &mut child, n, params.jitter);
                }
                // duplicates add nothing; push them elsewhere
                for _ in 0..8 {
                    if !seen.contains(&child) {
                        break;
                    }
                    mutate(&mut rng, &mut child, n, params.jitter);
                }
                seen.insert(child.clone());
                next.push(child);
            }
            pop = score(eval, next);
            if pop[0].0 < run_best.0 {
                run_best = pop[0].clone();
                stale = 0;
            } else {
                stale += 1;
                if stale >= params.stagnation {
                    break;
                }
            }
        }
        let mut finalists = vec![run_best];
        for member in &pop {
            if finalists.len() >= params.polish_starts {
                break;
            }
            if !finalists.iter().any(|f| f.1 == member.1) {
                finalists.push(member.clone());
            }
        }
        for start in finalists {
            let polished = if params.polish_starts > 0 {
                local_search(eval, start, penalty_kind, params.jitter)
            } else {
                start
            };
            if polished.0 < best.0 || (polished.0 == best.0 && polished.1 < best.1) {
                best = polished;
            }
        }
    }
    let cfg = ChangepointConfig::from_sorted_unchecked(best.1);
    eval.model().penalized_fit(&cfg, penalty_kind)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mcpt::exhaustive::exhaustive_search;
    use rand_distr::{Distribution, StandardNormal};

    fn noise(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    #[test]
    fn repair_enforces_segment_lengths() {
        assert_eq!(repair(vec![2, 3, 5, 6, 10], 10), vec![3, 5]);
        assert_eq!(repair(vec![9, 3, 3], 10), vec![3, 9]);
        assert_eq!(repair(vec![10], 10), Vec::<usize>::new());
    }

    #[test]
    fn operators_keep_configs_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..2000 {
            let a = random_config(&mut rng, 30, 10);
            let b = random_config(&mut rng, 30, 10);
            let mut c = crossover(&mut rng, &a, &b, 30);
            mutate(&mut rng, &mut c, 30, 3);
            for v in [&a, &b, &c] {
                assert!(ChangepointConfig::new(v.clone(), 30).is_ok(), "{v:?}");
            }
        }
    }

    #[test]
    fn crossover_keeps_shared_changepoints() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let c = crossover(&mut rng, &[5, 10, 20], &[10, 15], 30);
            assert!(c.contains(&10));
            assert!(c.iter().all(|t| [5, 10, 15, 20].contains(t)));
        }
    }

    #[test]
    fn agrees_with_exhaustive_search() {
        for seed in 0..12 {
            let mut x = noise(16, seed);
            for v in &mut x[8..] {
                *v += 2.0;
            }
            let s = TimeSeries::new(x, 1).unwrap();
            let p = (seed % 2) as usize;
            let exact = exhaustive_search(&s, PenaltyKind::Bic, MeanModelKind::Constant, p, None).unwrap();
            let ga = ga_search(&s, PenaltyKind::Bic, MeanModelKind::Constant, p, &GaParams::default(), seed).unwrap();
            assert!((ga.objective - exact.objective).abs() < 1e-8, "seed {seed}");
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let mut x = noise(120, 9);
        for v in &mut x[40..80] {
            *v += 1.5;
        }
        let s = TimeSeries::new(x, 1).unwrap();
        let params = GaParams::default();
        let a = ga_search(&s, PenaltyKind::Mbic, MeanModelKind::Constant, 1, &params, 3).unwrap();
        let b = ga_search(&s, PenaltyKind::Mbic, MeanModelKind::Constant, 1, &params, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.config.taus(), &[41, 81]);
    }
}
