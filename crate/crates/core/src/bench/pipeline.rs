//! Preprocess, extract, select, train and evaluate for one configuration.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use crate::classifiers::{self, Kind};
use crate::corpus::{Corpus, Label};
use crate::ensemble::{self, EnsembleSpec};
use crate::error::{Error, Result};
use crate::features::{
    binary_matrix, build_stats, build_vocabulary, count_matrix, tf_idf_matrix, ContingencyStats, CountVectors,
    FeatureMatrix, Vocabulary,
};
use crate::metrics::EvalReport;
use crate::selection::{self, SelectionSpec};

use super::config::{EnsembleMode, FsChoice, KValue, MnbInput, RunConfig};
use super::datasets::{self, DatasetMeta};

/// Train/test data after preprocessing and feature extraction.
pub struct Prepared {
    pub meta: DatasetMeta,
    pub train: Corpus,
    pub test: Corpus,
    pub vocab: Vocabulary,
    pub stats: ContingencyStats,
    pub counts: CountVectors,
    pub y_train: Vec<Label>,
    pub y_test: Vec<Label>,
    pub tf_idf: [FeatureMatrix; 2],
    pub binary: [FeatureMatrix; 2],
    pub count: [FeatureMatrix; 2],
}

impl Prepared {
    /// Train and test matrices the classifier consumes.
    pub fn matrices(&self, kind: Kind, mnb_input: MnbInput) -> &[FeatureMatrix; 2] {
        match kind {
            Kind::Mnb if mnb_input == MnbInput::Counts => &self.count,
            k if k.uses_binary_features() => &self.binary,
            _ => &self.tf_idf,
        }
    }

    /// Distinct feature counts of the sweep, ascending.
    pub fn resolve_sweep(&self, sweep: &[KValue]) -> Vec<usize> {
        let set: BTreeSet<usize> = sweep.iter().map(|k| k.resolve(self.vocab.len())).collect();
        set.into_iter().collect()
    }
}

pub fn load(cfg: &RunConfig) -> Result<(Corpus, Corpus, DatasetMeta)> {
    let dir = datasets::resolve_data_dir(cfg.data_dir.as_deref());
    let loaded = datasets::load_split(
        &cfg.dataset,
        &dir,
        cfg.seed,
        cfg.train_frac,
        cfg.check_counts,
        cfg.min_df,
    )?;
    Ok((loaded.train, loaded.test, loaded.meta))
}

pub fn extract(train: Corpus, test: Corpus, meta: DatasetMeta, cfg: &RunConfig) -> Result<Prepared> {
    let vocab = build_vocabulary(&train, meta.min_df)?;
    if vocab.is_empty() {
        return Err(Error::InvalidParameter("vocabulary is empty".into()));
    }
    let stats = build_stats(&train, &vocab);
    let counts = CountVectors::build(&train, &vocab);
    let both = |f: &dyn Fn(&Corpus) -> FeatureMatrix| [f(&train), f(&test)];
    let tf_idf = both(&|c| tf_idf_matrix(c, &vocab, &stats, cfg.tf_length));
    let binary = both(&|c| binary_matrix(c, &vocab));
    let count = both(&|c| count_matrix(c, &vocab));
    Ok(Prepared {
        y_train: train.labels(),
        y_test: test.labels(),
        meta,
        train,
        test,
        vocab,
        stats,
        counts,
        tf_idf,
        binary,
        count,
    })
}

/// Loads, splits, preprocesses and extracts features.
pub fn prepare(cfg: &RunConfig) -> Result<Prepared> {
    let (train, test, meta) = load(cfg).map_err(|e| e.at_stage("preprocess"))?;
    extract(train, test, meta, cfg).map_err(|e| e.at_stage("extract"))
}

/// Selected columns, ascending; `None` keeps every feature.
pub fn select_features(prep: &Prepared, fs: FsChoice, k: usize, cfg: &RunConfig) -> Result<Option<Vec<usize>>> {
    match fs {
        FsChoice::None => Ok(None),
        FsChoice::Method(method) => {
            let spec = SelectionSpec {
                method,
                k,
                params: cfg.selection.clone(),
            };
            selection::select(&spec, &prep.stats, &prep.counts).map(Some)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub k: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellOutcome {
    /// Feature count of the reported point; `None` without selection.
    pub best_k: Option<usize>,
    pub sweep: Vec<SweepPoint>,
    pub report: EvalReport,
}

pub fn subspace_size(frac: f64, n_features: usize) -> usize {
    ((frac * n_features as f64 - 1e-9).ceil() as usize).clamp(1, n_features.max(1))
}

type Predictor = dyn Fn(&FeatureMatrix) -> Result<Vec<Label>>;

/// Trains and evaluates one classifier on one feature subset.
pub fn train_and_evaluate(
    prep: &Prepared,
    columns: Option<&[usize]>,
    kind: Kind,
    mode: EnsembleMode,
    cfg: &RunConfig,
) -> Result<EvalReport> {
    let [x_train, x_test] = prep.matrices(kind, cfg.mnb_input);
    let (x_train, x_test) = match columns {
        Some(cols) => (x_train.project(cols)?, x_test.project(cols)?),
        None => (x_train.clone(), x_test.clone()),
    };
    let mut train_cfg = cfg.train.clone();
    train_cfg.seed = cfg.seed;

    let start = Instant::now();
    let predictor: Box<Predictor> = match mode {
        EnsembleMode::Base => {
            let model =
                classifiers::train(kind, &x_train, &prep.y_train, &train_cfg).map_err(|e| e.at_stage("train"))?;
            Box::new(move |x| model.predict(x))
        }
        EnsembleMode::Ensemble(ek) => {
            let spec = EnsembleSpec {
                kind: ek,
                n_estimators: cfg.estimators,
                subspace_size: Some(subspace_size(cfg.subspace_frac, x_train.cols())),
                bootstrap: cfg.bootstrap,
                base: kind,
                config: train_cfg,
                seed: cfg.seed,
            };
            let model = ensemble::train(&x_train, &prep.y_train, &spec).map_err(|e| e.at_stage("train"))?;
            Box::new(move |x| model.predict(x))
        }
    };
    let train_s = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let predictions = predictor(&x_test).map_err(|e| e.at_stage("evaluate"))?;
    let predict_s = start.elapsed().as_secs_f64();

    let mut report =
        EvalReport::from_predictions(&prep.y_test, &predictions, cfg.f1_mode).map_err(|e| e.at_stage("evaluate"))?;
    report.wall_clock_train_s = train_s;
    report.wall_clock_predict_s = predict_s;
    Ok(report)
}

/// Evaluates a cell over the K sweep and keeps the most accurate point. Ties
/// keep the smaller K. Timings are summed over the sweep.
pub fn evaluate_cell(
    prep: &Prepared,
    fs: FsChoice,
    kind: Kind,
    mode: EnsembleMode,
    cfg: &RunConfig,
    selection_for: &dyn Fn(usize) -> Result<Option<Vec<usize>>>,
) -> Result<CellOutcome> {
    let ks = match fs {
        FsChoice::None => vec![prep.vocab.len()],
        FsChoice::Method(_) => prep.resolve_sweep(&cfg.k),
    };
    let mut best: Option<(usize, EvalReport)> = None;
    let mut sweep = Vec::with_capacity(ks.len());
    let (mut train_s, mut predict_s) = (0.0, 0.0);
    for k in ks {
        let columns = selection_for(k).map_err(|e| e.at_stage("select"))?;
        let report = train_and_evaluate(prep, columns.as_deref(), kind, mode, cfg)?;
        train_s += report.wall_clock_train_s;
        predict_s += report.wall_clock_predict_s;
        sweep.push(SweepPoint {
            k,
            accuracy: report.accuracy,
        });
        if best.as_ref().is_none_or(|(_, b)| report.accuracy > b.accuracy) {
            best = Some((k, report));
        }
    }
    let (k, mut report) = best.expect("sweep is never empty");
    report.wall_clock_train_s = train_s;
    report.wall_clock_predict_s = predict_s;
    Ok(CellOutcome {
        best_k: matches!(fs, FsChoice::Method(_)).then_some(k),
        sweep,
        report,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub version: &'static str,
    pub dataset: DatasetMeta,
    pub vocabulary: usize,
    pub fs_method: String,
    pub classifier: String,
    pub ensemble: String,
    pub best_k: Option<usize>,
    pub k_sweep: Vec<SweepPoint>,
    pub report: EvalReport,
}

pub const RUN_REPORT_FILE: &str = "report.json";

fn single<T: Copy + std::fmt::Display>(items: &[T], what: &str) -> Result<T> {
    match items {
        [one] => Ok(*one),
        _ => Err(Error::Config(format!(
            "run takes exactly one {what}, got {}",
            items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
        ))),
    }
}

/// Runs one configuration and writes `report.json` into the output
/// directory.
pub fn run(cfg: &RunConfig) -> Result<RunReport> {
    cfg.validate()?;
    let fs = single(&cfg.fs, "fs method")?;
    let kind = single(&cfg.classifiers, "classifier")?;
    let mode = single(&cfg.ensembles, "ensemble mode")?;
    let prep = prepare(cfg)?;
    let outcome = evaluate_cell(&prep, fs, kind, mode, cfg, &|k| select_features(&prep, fs, k, cfg))?;
    let mut report = outcome.report;
    report.config = cfg.echo();
    let result = RunReport {
        version: env!("CARGO_PKG_VERSION"),
        dataset: prep.meta.clone(),
        vocabulary: prep.vocab.len(),
        fs_method: fs.id().into(),
        classifier: kind.id().into(),
        ensemble: mode.id().into(),
        best_k: outcome.best_k,
        k_sweep: outcome.sweep,
        report,
    };
    std::fs::create_dir_all(&cfg.out)?;
    write_json(&cfg.out.join(RUN_REPORT_FILE), &result)?;
    Ok(result)
}

/// Writes the preprocessed splits and the vocabulary.
pub fn prep(cfg: &RunConfig) -> Result<Prepared> {
    cfg.validate()?;
    let prep = prepare(cfg)?;
    std::fs::create_dir_all(&cfg.out)?;
    for (name, corpus) in [("train", &prep.train), ("test", &prep.test)] {
        let mut f = std::io::BufWriter::new(std::fs::File::create(cfg.out.join(format!("{name}.tokens.tsv")))?);
        for d in corpus.documents() {
            writeln!(f, "{}\t{}\t{}", d.id, d.label, d.tokens.join(" "))?;
        }
        f.flush()?;
    }
    let mut f = std::io::BufWriter::new(std::fs::File::create(cfg.out.join("vocabulary.tsv"))?);
    for (i, w) in prep.vocab.words().iter().enumerate() {
        writeln!(f, "{i}\t{w}\t{}", prep.vocab.document_frequencies()[i])?;
    }
    f.flush()?;
    Ok(prep)
}

/// Writes one ranking file per requested method, truncated to the largest
/// K of the sweep.
pub fn score(cfg: &RunConfig) -> Result<Vec<std::path::PathBuf>> {
    cfg.validate()?;
    let prep = prepare(cfg)?;
    let k = *prep.resolve_sweep(&cfg.k).last().expect("sweep is never empty");
    std::fs::create_dir_all(&cfg.out)?;
    let mut written = Vec::new();
    for fs in &cfg.fs {
        let FsChoice::Method(method) = *fs else { continue };
        let entries = selection::ranked_entries(method, &prep.stats, &prep.counts, k, &cfg.selection)
            .map_err(|e| e.at_stage("select"))?;
        let path = cfg.out.join(format!("ranking_{}.tsv", method.id()));
        let header = format!("dataset={} k={k} seed={}", prep.meta.name, cfg.seed);
        let f = std::io::BufWriter::new(std::fs::File::create(&path)?);
        selection::write_ranking(f, method, &header, &entries, &prep.vocab)?;
        written.push(path);
    }
    Ok(written)
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut f, value)?;
    writeln!(f)?;
    Ok(())
}
