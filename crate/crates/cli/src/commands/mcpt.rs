use changepoint_core::amoc::NullTables;
use changepoint_core::format::sig6;
use changepoint_core::mcpt::{
    binary_segmentation, exhaustive_search, ga_search, GaParams, SearchMethod, SearchResult,
};

use crate::input::{annual_series, tables};
use crate::output::{Csv, OutputDir};
use crate::{CliError, McptArgs, Result};

pub fn run(args: &McptArgs) -> Result<String> {
    if !(args.alpha > 0.0 && args.alpha < 1.0) {
        return Err(CliError::Usage(format!("--alpha {} is not in (0, 1)", args.alpha)));
    }
    let series = annual_series(&args.data)?;
    let result = match args.method {
        SearchMethod::GeneticAlgorithm => {
            let fit = ga_search(&series, args.penalty, args.mean, args.ar, &GaParams::default(), args.seed)?;
            SearchResult::new(args.method, Some(args.seed), fit, &series)
        }
        SearchMethod::Exhaustive => {
            let fit = exhaustive_search(&series, args.penalty, args.mean, args.ar, None)?;
            SearchResult::new(args.method, None, fit, &series)
        }
        SearchMethod::BinarySegmentation => {
            let loaded = tables(args.tables.as_deref())?;
            let tables = loaded.as_ref().unwrap_or_else(|| NullTables::shipped());
            binary_segmentation(&series, args.mean, args.ar, args.alpha, tables, args.penalty)?
        }
    };
    let out = OutputDir::create(&args.output)?;
    let text = result.to_text();
    out.write("mcpt_report.txt", &text)?;

    let fit = &result.fit;
    let mut segments = Csv::new(&["segment", "start", "end", "start_year", "end_year", "mean"]);
    for (i, ((s, e), mean)) in fit
        .config
        .segments(series.len())
        .into_iter()
        .zip(fit.segment_means())
        .enumerate()
    {
        segments.row(&[
            (i + 1).to_string(),
            s.to_string(),
            e.to_string(),
            series.label_of(s).to_string(),
            series.label_of(e).to_string(),
            sig6(mean),
        ]);
    }
    out.write("segments.csv", &segments.finish())?;

    let mut fitted = Csv::new(&["t", "year", "observed", "fitted"]);
    for (i, (x, f)) in series.values().iter().zip(fit.fitted_values()).enumerate() {
        fitted.row(&[(i + 1).to_string(), series.label_of(i + 1).to_string(), sig6(*x), sig6(f)]);
    }
    out.write("fitted.csv", &fitted.finish())?;
    Ok(text)
}
