use changepoint_core::amoc::{simulate_all, NullKind};
use changepoint_core::format::sig6;

use crate::output::{OutputDir, Report};
use crate::{NulltabArgs, Result};

pub fn run(args: &NulltabArgs) -> Result<String> {
    let out = OutputDir::create(&args.output)?;
    let tables = simulate_all(args.grid, args.draws, args.seed)?;
    tables.save_dir(&args.output)?;
    let mut report = Report::default();
    report.line("draws", args.draws.to_string());
    report.line("grid", args.grid.to_string());
    report.line("seed", args.seed.to_string());
    for kind in NullKind::ALL {
        let null = tables.get(kind);
        let cv: Vec<String> = null
            .critical_values()
            .into_iter()
            .map(|(pct, v)| format!("{pct}%={}", sig6(v)))
            .collect();
        report.line(kind.name(), cv.join(" "));
    }
    let text = report.finish();
    out.write("nulltab_report.txt", &text)?;
    Ok(text)
}
