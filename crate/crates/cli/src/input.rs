use std::path::Path;

use changepoint_core::amoc::NullTables;
use changepoint_core::datasets::{load, parse_year_range, DatasetSpec, KnownDataset, Source};
use changepoint_core::series::TimeSeries;
use changepoint_core::Error;

use crate::{CliError, DataArgs, Result};

pub fn known(name: &str) -> Result<KnownDataset> {
    KnownDataset::lookup(name).ok_or_else(|| {
        CliError::Usage(format!("unknown dataset '{name}'; expected cet, seaice or atlanta"))
    })
}

/// The annual series selected by `--dataset`/`--path` and `--years`.
pub fn annual_series(args: &DataArgs) -> Result<TimeSeries> {
    let years = args
        .years
        .as_deref()
        .map(parse_year_range)
        .transpose()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let mut spec = match (&args.dataset, &args.path) {
        (Some(name), _) => known(name)?.spec(),
        (None, Some(path)) => DatasetSpec::new(Source::LocalCsv, path),
        (None, None) => return Err(CliError::Usage("one of --dataset or --path is required".into())),
    };
    if let Some((a, b)) = years {
        spec = spec.with_years(a, b);
    }
    Ok(load(&spec)?)
}

/// A `year,value` CSV with `period` consecutive rows per year, read in file
/// order.
pub fn seasonal_series(path: &Path, period: usize, years: Option<&str>) -> Result<TimeSeries> {
    let display = path.display().to_string();
    if !path.is_file() {
        return Err(Error::FileNotFound(path.to_path_buf()).into());
    }
    let range = years
        .map(parse_year_range)
        .transpose()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| parse_error(&display, 0, e.to_string()))?;
    let headers = reader
        .headers()
        .map_err(|e| parse_error(&display, 1, e.to_string()))?
        .clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| parse_error(&display, 1, format!("no '{name}' column in header")))
    };
    let (year_col, value_col) = (column("year")?, column("value")?);
    let mut first_year = None;
    let mut values = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| parse_error(&display, 0, e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let year: i64 = record[year_col]
            .parse()
            .map_err(|_| parse_error(&display, line, format!("bad year '{}'", &record[year_col])))?;
        if range.is_some_and(|(a, b)| year < a || year > b) {
            continue;
        }
        let value: f64 = record[value_col]
            .parse()
            .map_err(|_| parse_error(&display, line, format!("bad value '{}'", &record[value_col])))?;
        let start = *first_year.get_or_insert(year);
        let expected = start + (values.len() / period) as i64;
        if year != expected {
            return Err(parse_error(
                &display,
                line,
                format!("expected year {expected} ({period} rows per year), got {year}"),
            ));
        }
        values.push(value);
    }
    let start = first_year.ok_or_else(|| parse_error(&display, 0, "no data rows".into()))?;
    Ok(TimeSeries::new(values, period)?.with_start(start))
}

fn parse_error(path: &str, line: usize, message: String) -> CliError {
    Error::Parse {
        path: path.into(),
        line,
        message,
    }
    .into()
}

/// Tables from `--tables`, if given.
pub fn tables(dir: Option<&Path>) -> Result<Option<NullTables>> {
    Ok(dir.map(NullTables::load_dir).transpose()?)
}
