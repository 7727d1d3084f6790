//! Dataset ingestion and synthetic series.
//!
//! Analysis never touches the network: files are downloaded once (see the
//! `cpt fetch` command) into a cache laid out as `<cache>/<source>/<file>`
//! and parsed from there. The cache root is `$CPT_CACHE_DIR` when set.
//!
//! Supported layouts:
//!
//! * **CET**: Met Office Hadley Centre monthly file, one row per year with
//!   the year, twelve monthly means and the annual mean. Values of `-99.9`
//!   (or lower) mark missing data.
//! * **NSIDC sea ice**: the September extent CSV with `year` and `extent`
//!   columns (million km²); `-9999` marks missing data.
//! * **Berkeley Earth station**: either a `year,value` CSV, or the raw
//!   station text export (`%` comments, whitespace columns year, month,
//!   value), reduced to annual means of complete years.
//! * **Local CSV**: header row with `year` and `value` columns (the names
//!   are configurable).

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::mcpt::ChangepointConfig;
use crate::series::TimeSeries;

/// Environment variable overriding the cache root.
pub const CACHE_ENV: &str = "CPT_CACHE_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Source {
    Cet,
    BerkeleyStation,
    NsidcSeaIce,
    LocalCsv,
}

impl Source {
    pub fn name(self) -> &'static str {
        match self {
            Self::Cet => "cet",
            Self::BerkeleyStation => "berkeley",
            Self::NsidcSeaIce => "nsidc",
            Self::LocalCsv => "local",
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A named dataset with a known source, cache file and default years.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KnownDataset {
    pub name: &'static str,
    pub source: Source,
    pub file_name: &'static str,
    /// Download location, when one is stable enough to hard-code.
    pub url: Option<&'static str>,
    pub years: (i64, i64),
    pub units: &'static str,
}

pub const CET: KnownDataset = KnownDataset {
    name: "cet",
    source: Source::Cet,
    file_name: "meantemp_monthly_totals.txt",
    url: Some("https://www.metoffice.gov.uk/hadobs/hadcet/data/v2/meantemp_monthly_totals.txt"),
    years: (1900, 2020),
    units: "degC",
};

pub const SEA_ICE: KnownDataset = KnownDataset {
    name: "seaice",
    source: Source::NsidcSeaIce,
    file_name: "N_09_extent_v3.0.csv",
    url: Some("https://noaadata.apps.nsidc.org/NOAA/G02135/north/monthly/data/N_09_extent_v3.0.csv"),
    years: (1979, 2021),
    units: "million km2",
};

/// Atlanta Hartsfield annual mean temperature. Berkeley Earth has no
/// stable direct link for the station export, so `fetch` needs `--url`.
pub const ATLANTA: KnownDataset = KnownDataset {
    name: "atlanta",
    source: Source::BerkeleyStation,
    file_name: "atlanta.csv",
    url: None,
    years: (1879, 2013),
    units: "degC",
};

pub const KNOWN: [KnownDataset; 3] = [CET, SEA_ICE, ATLANTA];

impl KnownDataset {
    pub fn lookup(name: &str) -> Option<Self> {
        KNOWN.into_iter().find(|d| d.name == name)
    }

    pub fn cache_path(&self) -> PathBuf {
        cache_root().join(self.source.name()).join(self.file_name)
    }

    /// Spec that reads the cached file over the default years.
    pub fn spec(&self) -> DatasetSpec {
        DatasetSpec::new(self.source, self.cache_path()).with_years(self.years.0, self.years.1)
    }
}

/// Cache root: `$CPT_CACHE_DIR`, else `$XDG_CACHE_HOME/cpt`, else
/// `~/.cache/cpt`, else `.cpt-cache` in the working directory.
pub fn cache_root() -> PathBuf {
    if let Some(dir) = std::env::var_os(CACHE_ENV).filter(|d| !d.is_empty()) {
        return PathBuf::from(dir);
    }
    if let Some(dir) = std::env::var_os("XDG_CACHE_HOME").filter(|d| !d.is_empty()) {
        return PathBuf::from(dir).join("cpt");
    }
    match std::env::var_os("HOME").filter(|d| !d.is_empty()) {
        Some(home) => PathBuf::from(home).join(".cache").join("cpt"),
        None => PathBuf::from(".cpt-cache"),
    }
}

/// Where and how to read one annual series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DatasetSpec {
    pub source: Source,
    pub path: PathBuf,
    /// Inclusive year range; `None` keeps every year in the file.
    pub years: Option<(i64, i64)>,
    /// Column names for [`Source::LocalCsv`].
    pub year_column: String,
    pub value_column: String,
}

impl DatasetSpec {
    pub fn new(source: Source, path: impl Into<PathBuf>) -> Self {
        Self {
            source,
            path: path.into(),
            years: None,
            year_column: "year".into(),
            value_column: "value".into(),
        }
    }

    pub fn with_years(mut self, start: i64, end: i64) -> Self {
        self.years = Some((start, end));
        self
    }

    pub fn with_columns(mut self, year: impl Into<String>, value: impl Into<String>) -> Self {
        self.year_column = year.into();
        self.value_column = value.into();
        self
    }
}

/// Parses `"1900:2020"` (also accepts `-` as the separator).
pub fn parse_year_range(s: &str) -> Result<(i64, i64)> {
    let bad = || Error::InvalidParameter(format!("year range '{s}' is not START:END"));
    let (a, b) = s.split_once(':').or_else(|| s.split_once('-')).ok_or_else(bad)?;
    let start: i64 = a.trim().parse().map_err(|_| bad())?;
    let end: i64 = b.trim().parse().map_err(|_| bad())?;
    if start > end {
        return Err(Error::InvalidParameter(format!("year range {start}:{end} is empty")));
    }
    Ok((start, end))
}

/// Reads the annual series described by `spec`.
pub fn load(spec: &DatasetSpec) -> Result<TimeSeries> {
    if let Some((a, b)) = spec.years {
        if a > b {
            return Err(Error::InvalidParameter(format!("year range {a}:{b} is empty")));
        }
    }
    if !spec.path.is_file() {
        return Err(Error::FileNotFound(spec.path.clone()));
    }
    let text = fs::read_to_string(&spec.path)?;
    let path = spec.path.display().to_string();
    let annual = match spec.source {
        Source::Cet => parse_cet(&text, &path)?,
        Source::NsidcSeaIce => parse_csv_columns(&text, &path, &["year"], &["extent"], Some(-9999.0))?,
        Source::LocalCsv => parse_csv_columns(
            &text,
            &path,
            &[spec.year_column.as_str()],
            &[spec.value_column.as_str()],
            None,
        )?,
        Source::BerkeleyStation => {
            if text.trim_start().starts_with('%') {
                parse_berkeley_text(&text, &path)?
            } else {
                parse_csv_columns(&text, &path, &["year"], &["value", "temperature", "tavg"], None)?
            }
        }
    };
    assemble(annual, spec.years, &path)?.ok_or_else(|| Error::Parse {
        path,
        line: 0,
        message: "no data rows".into(),
    })
    .map(|s| s.with_label(spec.source.name()))
}

/// Year -> value, with `None` for values flagged missing in the file.
type Annual = BTreeMap<i64, Option<f64>>;

fn assemble(annual: Annual, years: Option<(i64, i64)>, path: &str) -> Result<Option<TimeSeries>> {
    let (start, end) = match years {
        Some(r) => r,
        None => match (annual.keys().next(), annual.keys().next_back()) {
            (Some(&a), Some(&b)) => (a, b),
            _ => return Ok(None),
        },
    };
    let mut values = Vec::with_capacity((end - start + 1) as usize);
    for year in start..=end {
        match annual.get(&year) {
            Some(Some(v)) => values.push(*v),
            _ => return Err(Error::MissingValueInRange { year }),
        }
    }
    if values.len() < 2 {
        return Err(Error::Parse {
            path: path.into(),
            line: 0,
            message: format!("range {start}:{end} holds fewer than two years"),
        });
    }
    TimeSeries::annual(values, start).map(Some)
}

fn parse_err(path: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.into(),
        line,
        message: message.into(),
    }
}

fn insert_year(annual: &mut Annual, year: i64, value: Option<f64>, path: &str, line: usize) -> Result<()> {
    if annual.insert(year, value).is_some() {
        return Err(parse_err(path, line, format!("year {year} appears twice")));
    }
    Ok(())
}

/// Met Office CET monthly file. Header and note lines are skipped; a data
/// row starts with a four-digit year and must hold 14 numbers.
fn parse_cet(text: &str, path: &str) -> Result<Annual> {
    let mut annual = Annual::new();
    for (i, line) in text.lines().enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let Some(first) = fields.first() else { continue };
        if first.len() != 4 || !first.bytes().all(|b| b.is_ascii_digit()) {
            continue;
        }
        let year: i64 = first.parse().expect("four ascii digits");
        // the current year is published with months still missing
        if fields.len() != 14 {
            return Err(parse_err(
                path,
                i + 1,
                format!("expected year, 12 months and annual mean; got {} fields", fields.len()),
            ));
        }
        let value: f64 = fields[13]
            .parse()
            .map_err(|_| parse_err(path, i + 1, format!("bad annual value '{}'", fields[13])))?;
        let value = (value > -99.0).then_some(value);
        insert_year(&mut annual, year, value, path, i + 1)?;
    }
    Ok(annual)
}

/// Any CSV with a header naming a year column and a value column (the
/// first match among `value_names`, compared case-insensitively after
/// trimming).
fn parse_csv_columns(
    text: &str,
    path: &str,
    year_names: &[&str],
    value_names: &[&str],
    missing: Option<f64>,
) -> Result<Annual> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| parse_err(path, 1, e.to_string()))?
        .clone();
    let find = |names: &[&str]| {
        names.iter().find_map(|n| {
            headers
                .iter()
                .position(|h| h.eq_ignore_ascii_case(n))
        })
    };
    let year_col = find(year_names)
        .ok_or_else(|| parse_err(path, 1, format!("no '{}' column in header", year_names[0])))?;
    let value_col = find(value_names)
        .ok_or_else(|| parse_err(path, 1, format!("no '{}' column in header", value_names[0])))?;
    let mut annual = Annual::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let field = |col: usize| {
            record
                .get(col)
                .ok_or_else(|| parse_err(path, line, format!("row has no column {}", col + 1)))
        };
        let y = field(year_col)?;
        let year: i64 = y
            .parse()
            .map_err(|_| parse_err(path, line, format!("bad year '{y}'")))?;
        let v = field(value_col)?;
        let value = if v.is_empty() || v.eq_ignore_ascii_case("nan") {
            None
        } else {
            let x: f64 = v
                .parse()
                .map_err(|_| parse_err(path, line, format!("bad value '{v}'")))?;
            (Some(x) != missing).then_some(x)
        };
        insert_year(&mut annual, year, value, path, line)?;
    }
    Ok(annual)
}

/// Berkeley Earth station text export: `%` comment lines, then rows
/// `year month value ...`. A year enters the series only with all twelve
/// months present.
fn parse_berkeley_text(text: &str, path: &str) -> Result<Annual> {
    let mut months: BTreeMap<i64, Vec<(u32, f64)>> = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() < 3 {
            return Err(parse_err(path, i + 1, "expected year, month and value"));
        }
        let year: i64 = fields[0]
            .parse()
            .map_err(|_| parse_err(path, i + 1, format!("bad year '{}'", fields[0])))?;
        let month: u32 = fields[1]
            .parse()
            .ok()
            .filter(|m| (1..=12).contains(m))
            .ok_or_else(|| parse_err(path, i + 1, format!("bad month '{}'", fields[1])))?;
        let value: f64 = fields[2]
            .parse()
            .map_err(|_| parse_err(path, i + 1, format!("bad value '{}'", fields[2])))?;
        if value.is_finite() {
            months.entry(year).or_default().push((month, value));
        }
    }
    Ok(months
        .into_iter()
        .map(|(year, mut obs)| {
            obs.sort_by_key(|(m, _)| *m);
            obs.dedup_by_key(|(m, _)| *m);
            let mean = (obs.len() == 12).then(|| obs.iter().map(|(_, v)| v).sum::<f64>() / 12.0);
            (year, mean)
        })
        .collect())
}

/// Writes an annual series as a `year,value` CSV that [`load`] reads back
/// exactly (shortest round-trip float formatting).
pub fn write_csv(series: &TimeSeries, path: &Path) -> Result<()> {
    let mut out = String::from("year,value\n");
    for (t, v) in series.values().iter().enumerate() {
        out.push_str(&format!("{},{v}\n", series.label_of(t + 1)));
    }
    let mut file = fs::File::create(path)?;
    file.write_all(out.as_bytes())?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SimErrors {
    Iid,
    /// Stationary AR(1) with coefficient `phi`, `|phi| < 1`.
    Ar1 { phi: f64 },
}

/// A piecewise-constant mean plus Gaussian noise.
#[derive(Clone, Debug, PartialEq)]
pub struct SimSpec {
    pub n: usize,
    /// One mean per segment, `taus.len() + 1` in total.
    pub means: Vec<f64>,
    /// First index of each new segment.
    pub taus: Vec<usize>,
    pub errors: SimErrors,
    /// Marginal standard deviation of the noise.
    pub sd: f64,
    pub seed: u64,
}

impl SimSpec {
    /// `N = 500`, changepoints at 126, 251, 376 and means alternating
    /// `0, shift, 0, shift`, white noise with unit variance.
    pub fn three_shift_design(shift: f64, seed: u64) -> Self {
        Self {
            n: 500,
            means: vec![0.0, shift, 0.0, shift],
            taus: vec![126, 251, 376],
            errors: SimErrors::Iid,
            sd: 1.0,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.means.len() != self.taus.len() + 1 {
            return Err(Error::InvalidParameter(format!(
                "{} changepoints need {} segment means, got {}",
                self.taus.len(),
                self.taus.len() + 1,
                self.means.len()
            )));
        }
        if self.sd.is_nan() || self.sd < 0.0 || self.sd.is_infinite() {
            return Err(Error::InvalidParameter(format!("noise sd {} must be >= 0", self.sd)));
        }
        if let SimErrors::Ar1 { phi } = self.errors {
            if phi.is_nan() || phi.abs() >= 1.0 {
                return Err(Error::InvalidParameter(format!("AR(1) coefficient {phi} is not stationary")));
            }
        }
        Ok(())
    }
}

/// Generates the series of `spec` and its true configuration. Equal specs
/// give bitwise-identical output.
pub fn simulate(spec: &SimSpec) -> Result<(TimeSeries, ChangepointConfig)> {
    spec.validate()?;
    let truth = ChangepointConfig::new(spec.taus.clone(), spec.n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut z = || -> f64 { StandardNormal.sample(&mut rng) };
    let mut noise = Vec::with_capacity(spec.n);
    match spec.errors {
        SimErrors::Iid => noise.extend((0..spec.n).map(|_| spec.sd * z())),
        SimErrors::Ar1 { phi } => {
            let innov_sd = spec.sd * (1.0 - phi * phi).sqrt();
            let mut prev = spec.sd * z();
            noise.push(prev);
            for _ in 1..spec.n {
                prev = phi * prev + innov_sd * z();
                noise.push(prev);
            }
        }
    }
    let values = noise
        .into_iter()
        .enumerate()
        .map(|(i, e)| spec.means[truth.segment_of(i + 1)] + e)
        .collect();
    Ok((TimeSeries::new(values, 1)?.with_label("simulated"), truth))
}

impl FromStr for SimErrors {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "iid" {
            return Ok(Self::Iid);
        }
        s.strip_prefix("ar1:")
            .and_then(|p| p.parse().ok())
            .map(|phi| Self::Ar1 { phi })
            .ok_or_else(|| Error::InvalidParameter(format!("noise '{s}' is not 'iid' or 'ar1:PHI'")))
    }
}
