//! Deterministic CSV rendering of an alignment report.
//!
//! Rendering rules: percentages round half away from zero to integer;
//! correlations and other statistics print to 6 decimals. Statistics arrive
//! in full precision and are rounded only here. The rules themselves are
//! restated in `report_notes.txt` next to the CSVs.

use crate::analytics::AlignmentReport;
use crate::judgment::ParseFailure;
use crate::util::round_half_away;
use std::io;
use std::path::{Path, PathBuf};

/// Counters for the data-quality section of the notes file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DataQuality {
    pub transcript_records: usize,
    pub parsed_judgments: usize,
    pub parse_failures: Vec<ParseFailure>,
    pub failed_requests: usize,
    /// Duplicate transcript records superseded by a later record.
    pub superseded_records: usize,
}

fn escape_csv(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn fmt_int(v: Option<f64>) -> String {
    v.map(|v| round_half_away(v).to_string()).unwrap_or_default()
}

fn fmt_f64(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.6}")).unwrap_or_default()
}

fn fmt_temp(t: Option<f64>) -> String {
    t.map(|t| t.to_string()).unwrap_or_default()
}

/// Write the five CSVs plus the notes file into `out_dir`; returns the paths
/// written. `report` is `None` when there was not enough data, in which case
/// the CSVs are headers-only and the notes say why.
pub fn write_reports(
    report: Option<&AlignmentReport>,
    quality: &DataQuality,
    out_dir: &Path,
) -> io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)?;
    let mut paths = Vec::new();
    let mut emit = |name: &str, content: String| -> io::Result<()> {
        let path = out_dir.join(name);
        std::fs::write(&path, content)?;
        paths.push(path);
        Ok(())
    };

    let cell_labels: Vec<String> = report
        .map(|r| r.deviation_matrix.cells.iter().map(|c| c.label()).collect())
        .unwrap_or_default();

    // deviation.csv: signed integer percentage points, human column first
    let mut deviation = String::from("tool_id,human");
    for label in &cell_labels {
        deviation.push(',');
        deviation.push_str(&escape_csv(label));
    }
    deviation.push('\n');
    if let Some(r) = report {
        for (ti, tool) in r.deviation_matrix.tools.iter().enumerate() {
            deviation.push_str(&escape_csv(tool));
            deviation.push(',');
            deviation.push_str(&fmt_int(Some(r.human[tool])));
            for entry in &r.deviation_matrix.entries[ti] {
                deviation.push(',');
                deviation.push_str(&fmt_int(*entry));
            }
            deviation.push('\n');
        }
    }
    emit("deviation.csv", deviation)?;

    // mae.csv: both the absolute and the signed column means per cell
    let mut mae = String::from("model_id,temperature,mae,signed_mean,mae_pct,signed_mean_pct\n");
    if let Some(r) = report {
        for (ci, cell) in r.deviation_matrix.cells.iter().enumerate() {
            mae.push_str(&format!(
                "{},{},{},{},{},{}\n",
                escape_csv(&cell.model_id),
                fmt_temp(cell.temperature),
                fmt_f64(r.mae_by_cell[ci]),
                fmt_f64(r.signed_mean_by_cell[ci]),
                fmt_int(r.mae_by_cell[ci]),
                fmt_int(r.signed_mean_by_cell[ci]),
            ));
        }
    }
    emit("mae.csv", mae)?;

    // correlations.csv: per-cell pearson with per-model mean and sample std
    let mut correlations =
        String::from("model_id,temperature,pearson,model_average,model_std_dev\n");
    if let Some(r) = report {
        for (ci, cell) in r.deviation_matrix.cells.iter().enumerate() {
            let summary = r.pearson_summary_by_model.get(&cell.model_id);
            correlations.push_str(&format!(
                "{},{},{},{},{}\n",
                escape_csv(&cell.model_id),
                fmt_temp(cell.temperature),
                fmt_f64(r.pearson_by_cell[ci]),
                fmt_f64(summary.map(|s| s.0)),
                fmt_f64(summary.map(|s| s.1)),
            ));
        }
    }
    emit("correlations.csv", correlations)?;

    // completeness.csv: unanswered counts joined with per-tool mean |deviation|
    let mut completeness =
        String::from("tool_id,unanswered_count,answered_fraction,mean_abs_deviation\n");
    if let Some(r) = report {
        for join in &r.completeness {
            completeness.push_str(&format!(
                "{},{},{},{}\n",
                escape_csv(&join.tool_id),
                join.unanswered_count.map(|c| c.to_string()).unwrap_or_default(),
                fmt_f64(join.answered_fraction),
                fmt_f64(join.mean_abs_deviation),
            ));
        }
    }
    emit("completeness.csv", completeness)?;

    // series.csv: human vs per-cell AI overall percents (plot data)
    let mut series = String::from("tool_id,human");
    for label in &cell_labels {
        series.push(',');
        series.push_str(&escape_csv(label));
    }
    series.push('\n');
    if let Some(r) = report {
        for (ti, tool) in r.deviation_matrix.tools.iter().enumerate() {
            series.push_str(&escape_csv(tool));
            series.push(',');
            series.push_str(&fmt_f64(Some(r.human[tool])));
            for ai in &r.ai_overall[ti] {
                series.push(',');
                series.push_str(&fmt_f64(*ai));
            }
            series.push('\n');
        }
    }
    emit("series.csv", series)?;

    let mut notes = String::new();
    notes.push_str(
        "Rendering rules: percentages are rounded half away from zero to integer; \
         correlations and other statistics are printed to 6 decimals. All statistics \
         are computed in full precision and rounded only at render time.\n\n",
    );
    match report {
        Some(r) => {
            notes.push_str(&format!(
                "Completeness rank correlation (Spearman, unanswered vs mean |deviation|): {}\n\n",
                fmt_f64(r.completeness_rank_corr)
            ));
            if r.coverage_notes.is_empty() {
                notes.push_str("Coverage: all tools present in both scorecards and baseline.\n");
            } else {
                notes.push_str("Coverage:\n");
                for note in &r.coverage_notes {
                    notes.push_str(&format!("  {note}\n"));
                }
            }
        }
        None => {
            notes.push_str("No report: not enough overlapping data to build one.\n");
        }
    }
    notes.push_str("\nData quality:\n");
    notes.push_str(&format!(
        "  transcript records: {}\n  parsed judgments: {}\n  parse failures: {}\n  \
         failed requests: {}\n  superseded duplicate records: {}\n",
        quality.transcript_records,
        quality.parsed_judgments,
        quality.parse_failures.len(),
        quality.failed_requests,
        quality.superseded_records,
    ));
    for failure in &quality.parse_failures {
        notes.push_str(&format!("  parse failure {}: {}\n", failure.raw_ref, failure.reason));
    }
    emit("report_notes.txt", notes)?;

    Ok(paths)
}
