use changepoint_core::amoc::{amoc_pipeline, NullTables};
use changepoint_core::format::sig6;

use crate::input::{annual_series, tables};
use crate::output::{confidence, Csv, OutputDir, Report};
use crate::{AmocArgs, CliError, Result};

pub fn run(args: &AmocArgs) -> Result<String> {
    if !(args.alpha > 0.0 && args.alpha < 1.0) {
        return Err(CliError::Usage(format!("--alpha {} is not in (0, 1)", args.alpha)));
    }
    let series = annual_series(&args.data)?;
    let loaded = tables(args.tables.as_deref())?;
    let tables = loaded.as_ref().unwrap_or_else(|| NullTables::shipped());
    let result = amoc_pipeline(&series, args.mean, args.ar, tables)?;
    let out = OutputDir::create(&args.output)?;

    let n = series.len();
    let mut report = Report::default();
    report.line("series", series.label());
    report.line("years", format!("{}-{}", series.label_of(1), series.label_of(n)));
    report.line("n", n.to_string());
    report.line("mean_model", args.mean.name());
    report.line("ar_order", args.ar.to_string());
    if let Some(fit) = result.fit.as_ref().filter(|f| f.order > 0) {
        let phi: Vec<String> = fit.phi.iter().map(|v| sig6(*v)).collect();
        report.line("ar_params", phi.join(" "));
        report.num("sigma2", fit.sigma2);
    }
    report.line("prewhitened", if result.prewhitened { "yes" } else { "no" });
    report.line("test", result.statistic_kind.name());
    report.num("statistic", result.statistic);
    report.num("p_value", result.p_value);
    for (pct, v) in &result.critical_values {
        report.num(&format!("critical_{pct}"), *v);
    }
    report.line("changepoint_index", result.changepoint_estimate.to_string());
    report.line("changepoint_year", result.changepoint_label.to_string());
    let verdict = if result.significant_at(args.alpha) {
        "changepoint"
    } else {
        "no changepoint"
    };
    report.line("decision", format!("{verdict} at {}", confidence(args.alpha)));
    let text = report.finish();
    out.write("amoc_report.txt", &text)?;

    let mut trace = Csv::new(&["k", "year", "cusum"]);
    for (i, c) in result.cusum.iter().enumerate() {
        trace.row(&[(i + 1).to_string(), series.label_of(i + 1).to_string(), sig6(*c)]);
    }
    out.write("cusum_trace.csv", &trace.finish())?;
    Ok(text)
}
