//! CSV, markdown and JSON renderings of a grid.

use std::fmt::Write as _;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{percent, EvalReport};

use super::grid::{GridCell, GridResult};
use super::pipeline::write_json;

pub const CSV_HEADER: [&str; 9] = [
    "fs_method",
    "classifier",
    "ensemble",
    "accuracy",
    "precision",
    "recall",
    "f1",
    "train_s",
    "predict_s",
];
pub const TIMING_COLUMNS: [&str; 2] = ["train_s", "predict_s"];

pub const CSV_FILE: &str = "grid.csv";
pub const TABLES_FILE: &str = "tables.md";
pub const TIMING_FILE: &str = "timing.md";
pub const JSON_FILE: &str = "grid.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
    Json,
}

impl ReportFormat {
    pub const ALL: [ReportFormat; 3] = [ReportFormat::Csv, ReportFormat::Markdown, ReportFormat::Json];
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" | "markdown-table" => Ok(ReportFormat::Markdown),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::Config(format!("unknown report format {other:?}"))),
        }
    }
}

/// One CSV line; metric fields are empty for failed cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub fs_method: String,
    pub classifier: String,
    pub ensemble: String,
    pub accuracy: Option<f64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
    pub train_s: Option<f64>,
    pub predict_s: Option<f64>,
}

impl CsvRow {
    pub fn from_cell(cell: &GridCell) -> CsvRow {
        let r = cell.report.as_ref();
        let get = |f: fn(&EvalReport) -> f64| r.map(f);
        CsvRow {
            fs_method: cell.fs.id().into(),
            classifier: cell.classifier.id().into(),
            ensemble: cell.ensemble.id().into(),
            accuracy: get(|r| r.accuracy),
            precision: get(|r| r.precision),
            recall: get(|r| r.recall),
            f1: get(|r| r.f1),
            train_s: get(|r| r.wall_clock_train_s),
            predict_s: get(|r| r.wall_clock_predict_s),
        }
    }
}

fn field(v: Option<f64>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_default()
}

pub fn write_csv(result: &GridResult, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(CSV_HEADER)?;
    for cell in &result.cells {
        let r = CsvRow::from_cell(cell);
        w.write_record([
            r.fs_method,
            r.classifier,
            r.ensemble,
            field(r.accuracy),
            field(r.precision),
            field(r.recall),
            field(r.f1),
            field(r.train_s),
            field(r.predict_s),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(input: impl Read) -> Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if header != CSV_HEADER {
        return Err(Error::Config(format!("unexpected CSV header {header:?}")));
    }
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

#[derive(Debug, Clone, Copy)]
enum Metric {
    Accuracy,
    Precision,
    Recall,
    F1,
}

impl Metric {
    const ALL: [Metric; 4] = [Metric::Accuracy, Metric::Precision, Metric::Recall, Metric::F1];

    fn name(self) -> &'static str {
        match self {
            Metric::Accuracy => "Accuracy",
            Metric::Precision => "Precision",
            Metric::Recall => "Recall",
            Metric::F1 => "F1",
        }
    }

    fn value(self, r: &EvalReport) -> f64 {
        match self {
            Metric::Accuracy => r.accuracy,
            Metric::Precision => r.precision,
            Metric::Recall => r.recall,
            Metric::F1 => r.f1,
        }
    }
}

fn table_header(out: &mut String, result: &GridResult) {
    out.push_str("| FS method |");
    for c in &result.classifiers {
        let _ = write!(out, " {} |", c.display_name());
    }
    out.push_str("\n|---|");
    for _ in &result.classifiers {
        out.push_str("---:|");
    }
    out.push('\n');
}

/// Benchmark tables: one per (ensemble mode, metric), FS methods as rows
/// and classifiers as columns, followed by the K each cell settled on.
pub fn render_tables(result: &GridResult) -> String {
    let mut out = String::new();
    let sweep = result
        .k_sweep
        .iter()
        .map(|k| k.to_string())
        .collect::<Vec<_>>()
        .join(", ");
    let _ = writeln!(
        out,
        "# {} ({} train / {} test, vocabulary {})\n",
        result.dataset.name, result.dataset.train, result.dataset.test, result.vocabulary
    );
    let _ = writeln!(
        out,
        "Cells report the most accurate point of the K sweep ({sweep}); the other metrics are taken at that point.\n"
    );
    for &mode in &result.ensembles {
        for metric in Metric::ALL {
            let _ = writeln!(out, "## {} of FS techniques, {}\n", metric.name(), mode.display_name());
            table_header(&mut out, result);
            for &fs in &result.fs {
                let _ = write!(out, "| {} |", fs.display_name());
                for &clf in &result.classifiers {
                    let text = match result.cell(fs, clf, mode).and_then(|c| c.report.as_ref()) {
                        Some(r) => percent(metric.value(r)),
                        None => "error".into(),
                    };
                    let _ = write!(out, " {text} |");
                }
                out.push('\n');
            }
            out.push('\n');
        }
        let _ = writeln!(out, "## Selected K, {}\n", mode.display_name());
        table_header(&mut out, result);
        for &fs in &result.fs {
            let _ = write!(out, "| {} |", fs.display_name());
            for &clf in &result.classifiers {
                let text = match result.cell(fs, clf, mode) {
                    Some(GridCell { best_k: Some(k), .. }) => k.to_string(),
                    Some(GridCell { report: Some(_), .. }) => "all".into(),
                    _ => "error".into(),
                };
                let _ = write!(out, " {text} |");
            }
            out.push('\n');
        }
        out.push('\n');
    }
    let failures: Vec<&GridCell> = result.failures().collect();
    if !failures.is_empty() {
        out.push_str("## Failed cells\n\n");
        for c in failures {
            let _ = writeln!(
                out,
                "- {} / {} / {}: {}",
                c.fs.display_name(),
                c.classifier.display_name(),
                c.ensemble.display_name(),
                c.error.as_deref().unwrap_or_default()
            );
        }
        out.push('\n');
    }
    out
}

pub fn render_timing(result: &GridResult) -> String {
    let mut out = String::from(
        "# Timing\n\n| FS method | Classifier | Ensemble | train_s | predict_s |\n|---|---|---|---:|---:|\n",
    );
    let (mut train, mut predict) = (0.0, 0.0);
    for c in &result.cells {
        let (t, p) = c
            .report
            .as_ref()
            .map_or((0.0, 0.0), |r| (r.wall_clock_train_s, r.wall_clock_predict_s));
        train += t;
        predict += p;
        let _ = writeln!(
            out,
            "| {} | {} | {} | {t:.3} | {p:.3} |",
            c.fs.display_name(),
            c.classifier.display_name(),
            c.ensemble.display_name()
        );
    }
    let selection: f64 = result.selection_timing.iter().map(|s| s.seconds).sum();
    let _ = writeln!(out, "\n- train seconds, all cells: {train:.3}");
    let _ = writeln!(out, "- predict seconds, all cells: {predict:.3}");
    let _ = writeln!(out, "- selection seconds: {selection:.3}");
    let _ = writeln!(out, "- total wall clock seconds: {:.3}", result.total_wall_clock_s);
    out
}

/// Writes the requested formats into `dir` and returns the files written.
pub fn emit_report(result: &GridResult, dir: &Path, formats: &[ReportFormat]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for format in formats {
        match format {
            ReportFormat::Csv => {
                let p = dir.join(CSV_FILE);
                write_csv(result, &p)?;
                written.push(p);
            }
            ReportFormat::Markdown => {
                let p = dir.join(TABLES_FILE);
                std::fs::write(&p, render_tables(result))?;
                written.push(p);
                let p = dir.join(TIMING_FILE);
                std::fs::write(&p, render_timing(result))?;
                written.push(p);
            }
            ReportFormat::Json => {
                let p = dir.join(JSON_FILE);
                write_json(&p, result)?;
                written.push(p);
            }
        }
    }
    Ok(written)
}
