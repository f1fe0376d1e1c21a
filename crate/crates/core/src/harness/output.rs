use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::sim::{RunOutcome, SlotRecord, SummaryReport};
use crate::error::{invalid, Result};

pub const SLOT_HEADER: &str = "slot,state,belief_entropy,n,success";
pub const PLOT_HEADER: &str = "kind,replication,target_outage,achieved_outage,mean_allocation,overhead_vs_oracle";

pub fn write_slot_csv<W: Write>(records: &[SlotRecord], writer: W) -> Result<()> {
    let mut w = BufWriter::new(writer);
    writeln!(w, "{SLOT_HEADER}")?;
    for r in records {
        writeln!(w, "{},{},{},{},{}", r.slot, r.state, r.belief_entropy, r.n, u8::from(r.success))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `summary.json` and, when asked, `slots.csv` into `dir`.
pub fn write_run_outputs(dir: &Path, outcome: &RunOutcome, per_slot_csv: bool) -> Result<SummaryReport> {
    fs::create_dir_all(dir)?;
    let mut summary = outcome.summary.clone();
    if per_slot_csv {
        write_slot_csv(&outcome.records, fs::File::create(dir.join("slots.csv"))?)?;
        summary.slots_csv = Some("slots.csv".to_string());
    }
    let mut json = serde_json::to_string_pretty(&summary)?;
    json.push('\n');
    fs::write(dir.join("summary.json"), json)?;
    Ok(summary)
}

/// Plot-ready CSV, one row per report in the given order.
pub fn emit_plot_data(reports: &[SummaryReport]) -> Result<String> {
    if reports.is_empty() {
        return Err(invalid("no reports to emit"));
    }
    let mut out = String::new();
    writeln!(out, "{PLOT_HEADER}").unwrap();
    for r in reports {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.kind,
            r.replication.unwrap_or(0),
            r.target_outage,
            r.achieved_outage,
            r.mean_allocation,
            r.overhead_vs_oracle
        )
        .unwrap();
    }
    Ok(out)
}

/// Writes `sweep.json` (all reports) and `plot.csv`.
pub fn write_sweep_outputs(dir: &Path, reports: &[SummaryReport]) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut json = serde_json::to_string_pretty(reports)?;
    json.push('\n');
    fs::write(dir.join("sweep.json"), json)?;
    if !reports.is_empty() {
        fs::write(dir.join("plot.csv"), emit_plot_data(reports)?)?;
    }
    Ok(())
}
