use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sentifs::bench::{self, report, selftest, ReportFormat, RunConfig};
use sentifs::error::Result;
use sentifs::metrics::percent;

#[derive(Parser)]
#[command(
    name = "sentifs",
    version,
    about = "Feature selection and classifier benchmark for sentence-level sentiment"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Preprocess a dataset and write tokens and the vocabulary.
    Prep(Common),
    /// Write the feature ranking of each FS method.
    Score(Common),
    /// Run one FS method, classifier and ensemble mode.
    Run(Common),
    /// Run the FS method x classifier x ensemble grid.
    Grid {
        #[command(flatten)]
        common: Common,
        /// Report formats, comma separated: csv, markdown, json.
        #[arg(long, default_value = "csv,markdown,json")]
        format: String,
    },
    /// Check scorers, the LR gradient and degenerate ensembles.
    Selftest {
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

#[derive(Args, Default)]
struct Common {
    /// Configuration file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Dataset name (ARD, IRD, YRD, MR, BOOKS, DVD, ELECTRONICS, KITCHEN) or
    /// path to a `sentence<TAB>label` file.
    #[arg(long)]
    dataset: Option<String>,
    /// FS methods: OR, CHI, GSS, BNS, CD, IMP_CHI, MRDC, NONE, or all.
    #[arg(long)]
    fs: Option<String>,
    /// Feature counts to sweep, e.g. 500,1000,2000,all.
    #[arg(long)]
    k: Option<String>,
    /// Classifiers: LR, SVM_RBF, SVM_LINEAR, DT, MNB, BNB, or all.
    #[arg(long)]
    clf: Option<String>,
    /// Ensemble modes: none, bagging, random_subspace, or all.
    #[arg(long)]
    ensemble: Option<String>,
    #[arg(long)]
    estimators: Option<usize>,
    #[arg(long)]
    subspace_frac: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory holding the dataset files.
    #[arg(long)]
    data_dir: Option<PathBuf>,
    /// Any other configuration key, as key=value. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Common {
    fn config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        let flags: [(&str, Option<String>); 11] = [
            ("dataset", self.dataset.clone()),
            ("fs", self.fs.clone()),
            ("k", self.k.clone()),
            ("clf", self.clf.clone()),
            ("ensemble", self.ensemble.clone()),
            ("estimators", self.estimators.map(|v| v.to_string())),
            ("subspace_frac", self.subspace_frac.map(|v| v.to_string())),
            ("seed", self.seed.map(|v| v.to_string())),
            ("jobs", self.jobs.map(|v| v.to_string())),
            ("out", self.out.as_ref().map(|p| p.display().to_string())),
            ("data_dir", self.data_dir.as_ref().map(|p| p.display().to_string())),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, &v)?;
            }
        }
        for pair in &self.set {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| sentifs::error::Error::Config(format!("--set expects key=value, got {pair:?}")))?;
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn execute(command: Command) -> Result<bool> {
    match command {
        Command::Prep(common) => {
            let cfg = common.config()?;
            let prep = bench::pipeline::prep(&cfg)?;
            println!(
                "{}: {} train / {} test documents, vocabulary {}, written to {}",
                prep.meta.name,
                prep.train.len(),
                prep.test.len(),
                prep.vocab.len(),
                cfg.out.display()
            );
        }
        Command::Score(common) => {
            let cfg = common.config()?;
            for path in bench::pipeline::score(&cfg)? {
                println!("{}", path.display());
            }
        }
        Command::Run(common) => {
            let cfg = common.config()?;
            let r = bench::run(&cfg)?;
            let k = r.best_k.map_or("all".to_string(), |k| k.to_string());
            println!(
                "{} {} {} {}: accuracy {} precision {} recall {} f1 {} (k={k})",
                r.dataset.name,
                r.fs_method,
                r.classifier,
                r.ensemble,
                percent(r.report.accuracy),
                percent(r.report.precision),
                percent(r.report.recall),
                percent(r.report.f1)
            );
        }
        Command::Grid { common, format } => {
            let cfg = common.config()?;
            let formats: Vec<ReportFormat> = format.split(',').map(str::parse).collect::<Result<_>>()?;
            let result = bench::run_grid(&cfg)?;
            for path in report::emit_report(&result, &cfg.out, &formats)? {
                println!("{}", path.display());
            }
            let failed = result.failures().count();
            println!(
                "{} cells, {failed} failed, {:.1}s",
                result.cells.len(),
                result.total_wall_clock_s
            );
            for cell in result.failures() {
                eprintln!(
                    "failed: {} {} {}: {}",
                    cell.fs,
                    cell.classifier,
                    cell.ensemble,
                    cell.error.as_deref().unwrap_or_default()
                );
            }
        }
        Command::Selftest { seed } => {
            let checks = selftest::run_selftest(seed)?;
            for c in &checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            return Ok(checks.iter().all(|c| c.passed));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
