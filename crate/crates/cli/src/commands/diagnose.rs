use changepoint_core::format::sig6;
use changepoint_core::normality::normality_test;
use changepoint_core::series::{acf, difference, seasonal_stats, standardize, TimeSeries};

use crate::input::{annual_series, seasonal_series};
use crate::output::{Csv, OutputDir, Report};
use crate::{CliError, DiagnoseArgs, Result};

pub fn run(args: &DiagnoseArgs) -> Result<String> {
    if args.period == 0 {
        return Err(CliError::Usage("--period must be at least 1".into()));
    }
    let years = args.data.years.as_deref();
    let target = match (&args.data.path, args.period) {
        (_, 1) => annual_series(&args.data)?,
        (Some(path), period) => seasonal_series(path, period, years)?,
        (None, _) => return Err(CliError::Usage("--period above 1 needs --path".into())),
    };
    let out = OutputDir::create(&args.output)?;
    let mut stats_csv = Csv::new(&["series", "season", "mean", "sd"]);
    let mut acf_csv = Csv::new(&["series", "lag", "acf", "band"]);
    let mut report = Report::default();
    report.line("n", target.len().to_string());
    report.line("period", target.period().to_string());

    let std_target = describe("target", &target, args.max_lag, &mut stats_csv, &mut acf_csv, &mut report)?;
    let analysed = match &args.reference {
        None => std_target,
        Some(path) => {
            let reference = seasonal_series(path, args.period, years)?;
            let stats = seasonal_stats(&reference)?;
            let diff = difference(&std_target, &standardize(&reference, &stats)?)?;
            describe("difference", &diff, args.max_lag, &mut stats_csv, &mut acf_csv, &mut report)?
        }
    };
    match normality_test(analysed.values()) {
        Ok(t) => {
            report.num("shapiro_wilk_w", t.statistic);
            report.num("shapiro_wilk_p", t.p_value);
        }
        Err(changepoint_core::Error::SampleSizeOutOfRange { n }) => {
            report.line("shapiro_wilk", format!("skipped (n = {n} outside 3..=5000)"));
        }
        Err(e) => return Err(e.into()),
    }
    let text = report.finish();
    out.write("diagnose_report.txt", &text)?;
    out.write("seasonal_stats.csv", &stats_csv.finish())?;
    out.write("acf.csv", &acf_csv.finish())?;
    Ok(text)
}

/// Seasonal statistics and ACF of `series`; returns it standardized.
fn describe(
    name: &str,
    series: &TimeSeries,
    max_lag: usize,
    stats_csv: &mut Csv,
    acf_csv: &mut Csv,
    report: &mut Report,
) -> Result<TimeSeries> {
    let stats = seasonal_stats(series)?;
    for (i, (m, s)) in stats.means.iter().zip(&stats.std_devs).enumerate() {
        stats_csv.row(&[name.into(), (i + 1).to_string(), sig6(*m), sig6(*s)]);
    }
    let standardized = standardize(series, &stats)?;
    let a = acf(&standardized, max_lag)?;
    for (lag, r) in a.lags.iter().zip(&a.correlations) {
        acf_csv.row(&[name.into(), lag.to_string(), sig6(*r), sig6(a.white_noise_band)]);
    }
    report.line(
        &format!("{name}_acf_within_band"),
        format!("{} of {}", a.lags_within_band(), max_lag),
    );
    Ok(standardized)
}
