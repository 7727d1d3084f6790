//! Monte Carlo null distributions for the AMOC statistics.
//!
//! Each draw builds a Brownian path on an `n_grid`-point grid and evaluates
//! the limit functional of one statistic:
//!
//! * `IntegratedBridgeSquared`: `int_0^1 B(t)^2 dt` (SCUSUM), Riemann sum;
//! * `SupBridge`: `sup |B(t)|` (max CUSUM);
//! * `SupTrendAdjusted`: `sup |B2(t)|`, where `B2` is the limit of partial
//!   sums of residuals from a fitted linear trend (CUSUM_D).
//!
//! For the two supremum functionals the grid maximum is biased low by about
//! `0.58 / sqrt(n_grid)`. Between grid points the path is a Brownian bridge
//! with known end points, so the maximum over each interval near the running
//! supremum is drawn exactly from its conditional law.
//!
//! Draw `i` uses its own ChaCha stream `(seed, i)`, so a table depends only
//! on `(kind, m, n_grid, seed)` and not on how draws are scheduled.

use std::io::{Read, Write};
use std::path::Path;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"CPTNULL1";
const HEADER_LEN: usize = 40;

/// Seed of the tables shipped with the crate.
pub const SHIPPED_SEED: u64 = 20_220_601;
pub const SHIPPED_DRAWS: usize = 100_000;
pub const SHIPPED_GRID: usize = 10_000;

/// Limit functional a null table samples.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NullKind {
    IntegratedBridgeSquared,
    SupBridge,
    SupTrendAdjusted,
}

impl NullKind {
    pub const ALL: [NullKind; 3] = [
        NullKind::IntegratedBridgeSquared,
        NullKind::SupBridge,
        NullKind::SupTrendAdjusted,
    ];

    fn code(self) -> u32 {
        match self {
            Self::IntegratedBridgeSquared => 0,
            Self::SupBridge => 1,
            Self::SupTrendAdjusted => 2,
        }
    }

    fn from_code(code: u32) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.code() == code)
            .ok_or_else(|| Error::NullTable(format!("unknown kind code {code}")))
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::IntegratedBridgeSquared => "integrated-bridge-squared",
            Self::SupBridge => "sup-bridge",
            Self::SupTrendAdjusted => "sup-trend-adjusted",
        }
    }

    /// File name used for this kind in a table directory.
    pub fn file_name(self) -> String {
        format!("{}.nulltab", self.name())
    }
}

/// A sorted Monte Carlo sample from a limit law.
#[derive(Clone, Debug, PartialEq)]
pub struct NullDistribution {
    pub kind: NullKind,
    pub n_grid: usize,
    pub seed: u64,
    sample: Vec<f64>,
}

/// Percentiles reported alongside every test.
pub const REPORTED_PERCENTILES: [f64; 4] = [90.0, 95.0, 97.5, 99.0];

impl NullDistribution {
    pub fn from_sample(kind: NullKind, n_grid: usize, seed: u64, mut sample: Vec<f64>) -> Self {
        sample.sort_by(f64::total_cmp);
        Self {
            kind,
            n_grid,
            seed,
            sample,
        }
    }

    pub fn draws(&self) -> usize {
        self.sample.len()
    }

    pub fn sample(&self) -> &[f64] {
        &self.sample
    }

    /// Empirical quantile `sorted[ceil(q M) - 1]` for `q` in (0, 1].
    pub fn quantile(&self, q: f64) -> f64 {
        let m = self.sample.len();
        let idx = ((q * m as f64).ceil() as usize).clamp(1, m) - 1;
        self.sample[idx]
    }

    /// `(percentile, threshold)` pairs for the standard percentiles.
    pub fn critical_values(&self) -> Vec<(f64, f64)> {
        REPORTED_PERCENTILES
            .iter()
            .map(|&p| (p, self.quantile(p / 100.0)))
            .collect()
    }

    /// Right-tail p-value `(1 + #{draws >= stat}) / (M + 1)`.
    pub fn p_value(&self, statistic: f64) -> f64 {
        let below = self.sample.partition_point(|&x| x < statistic);
        let at_or_above = self.sample.len() - below;
        (1 + at_or_above) as f64 / (self.sample.len() + 1) as f64
    }

    pub fn mean(&self) -> f64 {
        self.sample.iter().sum::<f64>() / self.sample.len() as f64
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + 8 * self.sample.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&self.kind.code().to_le_bytes());
        out.extend_from_slice(&0u32.to_le_bytes());
        out.extend_from_slice(&(self.sample.len() as u64).to_le_bytes());
        out.extend_from_slice(&(self.n_grid as u64).to_le_bytes());
        out.extend_from_slice(&self.seed.to_le_bytes());
        for v in &self.sample {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN || &bytes[..8] != MAGIC {
            return Err(Error::NullTable("bad magic or truncated header".into()));
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
        let u64_at = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
        let kind = NullKind::from_code(u32_at(8))?;
        let m = u64_at(16) as usize;
        let n_grid = u64_at(24) as usize;
        let seed = u64_at(32);
        let body = &bytes[HEADER_LEN..];
        if body.len() != 8 * m {
            return Err(Error::NullTable(format!(
                "header promises {m} draws, body holds {} bytes",
                body.len()
            )));
        }
        let sample: Vec<f64> = body
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        if sample.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::NullTable("sample is not sorted".into()));
        }
        Ok(Self {
            kind,
            n_grid,
            seed,
            sample,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(&self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut f = std::fs::File::open(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => Error::FileNotFound(path.to_path_buf()),
            _ => Error::Io(e),
        })?;
        let mut bytes = Vec::new();
        f.read_to_end(&mut bytes)?;
        Self::from_bytes(&bytes)
    }
}

/// The three null tables a test run needs.
#[derive(Clone, Debug)]
pub struct NullTables {
    pub integrated: NullDistribution,
    pub sup: NullDistribution,
    pub trend: NullDistribution,
}

impl NullTables {
    pub fn get(&self, kind: NullKind) -> &NullDistribution {
        match kind {
            NullKind::IntegratedBridgeSquared => &self.integrated,
            NullKind::SupBridge => &self.sup,
            NullKind::SupTrendAdjusted => &self.trend,
        }
    }

    /// Tables bundled with the crate (`M = 100 000`, `n_grid = 10 000`).
    pub fn shipped() -> &'static NullTables {
        static TABLES: OnceLock<NullTables> = OnceLock::new();
        TABLES.get_or_init(|| {
            let load = |bytes: &[u8]| NullDistribution::from_bytes(bytes).expect("bundled table is valid");
            NullTables {
                integrated: load(include_bytes!("../../data/integrated-bridge-squared.nulltab")),
                sup: load(include_bytes!("../../data/sup-bridge.nulltab")),
                trend: load(include_bytes!("../../data/sup-trend-adjusted.nulltab")),
            }
        })
    }

    /// Loads `<dir>/<kind>.nulltab` for every kind.
    pub fn load_dir(dir: &Path) -> Result<Self> {
        let load = |k: NullKind| NullDistribution::load(&dir.join(k.file_name()));
        Ok(Self {
            integrated: load(NullKind::IntegratedBridgeSquared)?,
            sup: load(NullKind::SupBridge)?,
            trend: load(NullKind::SupTrendAdjusted)?,
        })
    }

    pub fn save_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for k in NullKind::ALL {
            self.get(k).save(&dir.join(k.file_name()))?;
        }
        Ok(())
    }
}

fn validate(n_grid: usize, m: usize) -> Result<()> {
    if n_grid < 1000 {
        return Err(Error::InvalidParameter(format!("n_grid must be >= 1000; got {n_grid}")));
    }
    if m < 10_000 {
        return Err(Error::InvalidParameter(format!("M must be >= 10000; got {m}")));
    }
    Ok(())
}

/// Draws `m` values of one limit functional.
pub fn simulate_null(kind: NullKind, n_grid: usize, m: usize, seed: u64) -> Result<NullDistribution> {
    validate(n_grid, m)?;
    Ok(simulate_unchecked(&[kind], n_grid, m, seed).pop().unwrap())
}

/// Draws all three functionals from the same Brownian paths.
pub fn simulate_all(n_grid: usize, m: usize, seed: u64) -> Result<NullTables> {
    validate(n_grid, m)?;
    let mut v = simulate_unchecked(&NullKind::ALL, n_grid, m, seed);
    let trend = v.pop().unwrap();
    let sup = v.pop().unwrap();
    let integrated = v.pop().unwrap();
    Ok(NullTables {
        integrated,
        sup,
        trend,
    })
}

fn simulate_unchecked(kinds: &[NullKind], n_grid: usize, m: usize, seed: u64) -> Vec<NullDistribution> {
    let draws: Vec<[f64; 3]> = (0..m)
        .into_par_iter()
        .map_init(
            || vec![0.0; n_grid],
            |buf, i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64);
                one_draw(&mut rng, buf, kinds)
            },
        )
        .collect();
    kinds
        .iter()
        .map(|&k| {
            let col = match k {
                NullKind::IntegratedBridgeSquared => 0,
                NullKind::SupBridge => 1,
                NullKind::SupTrendAdjusted => 2,
            };
            NullDistribution::from_sample(k, n_grid, seed, draws.iter().map(|d| d[col]).collect())
        })
        .collect()
}

/// Exact maximum of a Brownian bridge from `a` to `b` over an interval of variance `dt`.
fn bridge_max<R: Rng>(rng: &mut R, a: f64, b: f64, dt: f64) -> f64 {
    let u: f64 = 1.0 - rng.random::<f64>();
    0.5 * (a + b + ((b - a).powi(2) - 2.0 * dt * u.ln()).sqrt())
}

/// Continuous-path supremum of `|path|` given its grid values (with
/// `path[-1] = 0` implied at time 0).
fn refined_abs_sup<R: Rng>(rng: &mut R, path: &[f64], dt: f64) -> f64 {
    let discrete = path.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    // intervals whose end points are this far below the grid maximum cannot
    // exceed it except with probability exp(-128)
    let cutoff = discrete - 8.0 * dt.sqrt();
    let mut sup = discrete;
    let mut prev = 0.0f64;
    for &cur in path {
        if prev.max(cur) > cutoff {
            sup = sup.max(bridge_max(rng, prev, cur, dt));
        }
        if -(prev.min(cur)) > cutoff {
            sup = sup.max(bridge_max(rng, -prev, -cur, dt));
        }
        prev = cur;
    }
    sup
}

fn one_draw<R: Rng>(rng: &mut R, z: &mut [f64], kinds: &[NullKind]) -> [f64; 3] {
    let n = z.len();
    let nf = n as f64;
    let scale = 1.0 / nf.sqrt();
    let mut total = 0.0;
    let mut weighted = 0.0;
    for (i, zi) in z.iter_mut().enumerate() {
        let v: f64 = rng.sample(StandardNormal);
        *zi = v;
        total += v;
        weighted += (i + 1) as f64 * v;
    }
    let want = |k| kinds.contains(&k);
    let mut out = [f64::NAN; 3];

    if want(NullKind::IntegratedBridgeSquared) || want(NullKind::SupBridge) {
        // B_k = (S_k - (k/n) S_n) / sqrt(n), stored in place of the increments
        let mut bridge = vec![0.0; n];
        let mut s = 0.0;
        let mut sq = 0.0;
        for (k, zi) in z.iter().enumerate() {
            s += zi;
            let b = (s - (k + 1) as f64 / nf * total) * scale;
            bridge[k] = b;
            sq += b * b;
        }
        out[0] = sq / nf;
        if want(NullKind::SupBridge) {
            out[1] = refined_abs_sup(rng, &bridge, 1.0 / nf);
        }
    }

    if want(NullKind::SupTrendAdjusted) {
        // OLS of the increments on (1, k); partial sums of the residuals
        let sum_k = nf * (nf + 1.0) / 2.0;
        let sum_k2 = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 6.0;
        let det = nf * sum_k2 - sum_k * sum_k;
        let slope = (nf * weighted - sum_k * total) / det;
        let intercept = (total - slope * sum_k) / nf;
        let mut path = vec![0.0; n];
        let mut s = 0.0;
        for (k, zi) in z.iter().enumerate() {
            s += zi - intercept - slope * (k + 1) as f64;
            path[k] = s * scale;
        }
        out[2] = refined_abs_sup(rng, &path, 1.0 / nf);
    }
    out
}
