//! The FS method x classifier x ensemble grid.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::classifiers::Kind;
use crate::error::{Error, Result};
use crate::metrics::EvalReport;

use super::config::{EnsembleMode, FsChoice, RunConfig};
use super::datasets::DatasetMeta;
use super::pipeline::{self, Prepared, SweepPoint};

fn as_id<S: Serializer, T: Display>(value: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(value)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridCell {
    #[serde(serialize_with = "as_id")]
    pub fs: FsChoice,
    #[serde(serialize_with = "as_id")]
    pub classifier: Kind,
    #[serde(serialize_with = "as_id")]
    pub ensemble: EnsembleMode,
    pub best_k: Option<usize>,
    pub sweep: Vec<SweepPoint>,
    /// Present when the cell succeeded.
    pub report: Option<EvalReport>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelectionTiming {
    pub fs: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GridResult {
    pub version: String,
    pub dataset: DatasetMeta,
    pub vocabulary: usize,
    /// Resolved feature counts the cells were swept over.
    pub k_sweep: Vec<usize>,
    pub config: Vec<String>,
    /// Ensemble modes, FS methods and classifiers in grid order.
    #[serde(skip)]
    pub ensembles: Vec<EnsembleMode>,
    #[serde(skip)]
    pub fs: Vec<FsChoice>,
    #[serde(skip)]
    pub classifiers: Vec<Kind>,
    pub cells: Vec<GridCell>,
    pub selection_timing: Vec<SelectionTiming>,
    pub total_wall_clock_s: f64,
}

impl GridResult {
    /// An empty grid over no combinations.
    pub fn empty(dataset: DatasetMeta) -> GridResult {
        GridResult {
            version: env!("CARGO_PKG_VERSION").into(),
            dataset,
            vocabulary: 0,
            k_sweep: Vec::new(),
            config: Vec::new(),
            ensembles: Vec::new(),
            fs: Vec::new(),
            classifiers: Vec::new(),
            cells: Vec::new(),
            selection_timing: Vec::new(),
            total_wall_clock_s: 0.0,
        }
    }

    pub fn cell(&self, fs: FsChoice, classifier: Kind, ensemble: EnsembleMode) -> Option<&GridCell> {
        self.cells
            .iter()
            .find(|c| c.fs == fs && c.classifier == classifier && c.ensemble == ensemble)
    }

    pub fn failures(&self) -> impl Iterator<Item = &GridCell> {
        self.cells.iter().filter(|c| c.error.is_some())
    }
}

type Selection = std::result::Result<Arc<Vec<usize>>, String>;

/// Computes every (method, K) selection the grid needs.
fn selections(
    prep: &Prepared,
    cfg: &RunConfig,
    ks: &[usize],
) -> (BTreeMap<(FsChoice, usize), Selection>, Vec<SelectionTiming>) {
    let jobs: Vec<(FsChoice, usize)> = cfg
        .fs
        .iter()
        .filter(|fs| matches!(fs, FsChoice::Method(_)))
        .flat_map(|&fs| ks.iter().map(move |&k| (fs, k)))
        .collect();
    let computed: Vec<((FsChoice, usize), Selection, f64)> = jobs
        .par_iter()
        .map(|&(fs, k)| {
            let start = Instant::now();
            let sel = pipeline::select_features(prep, fs, k, cfg)
                .map(|s| Arc::new(s.expect("methods always select")))
                .map_err(|e| e.at_stage("select").to_string());
            ((fs, k), sel, start.elapsed().as_secs_f64())
        })
        .collect();
    let mut timing: BTreeMap<FsChoice, f64> = BTreeMap::new();
    let mut map = BTreeMap::new();
    for (key, sel, secs) in computed {
        *timing.entry(key.0).or_default() += secs;
        map.insert(key, sel);
    }
    let timing = cfg
        .fs
        .iter()
        .filter_map(|fs| {
            timing.get(fs).map(|&seconds| SelectionTiming {
                fs: fs.id().into(),
                seconds,
            })
        })
        .collect();
    (map, timing)
}

/// Runs every requested combination over shared preprocessing. A failing
/// cell records its error and the others still run.
pub fn run_grid(cfg: &RunConfig) -> Result<GridResult> {
    cfg.validate()?;
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| {
        let prep = pipeline::prepare(cfg)?;
        let ks = prep.resolve_sweep(&cfg.k);
        let (selected, selection_timing) = selections(&prep, cfg, &ks);

        let combos: Vec<(EnsembleMode, FsChoice, Kind)> = cfg
            .ensembles
            .iter()
            .flat_map(|&e| {
                cfg.fs
                    .iter()
                    .flat_map(move |&f| cfg.classifiers.iter().map(move |&c| (e, f, c)))
            })
            .collect();
        let cells: Vec<GridCell> = combos
            .par_iter()
            .map(|&(ensemble, fs, classifier)| {
                let lookup = |k: usize| -> Result<Option<Vec<usize>>> {
                    match fs {
                        FsChoice::None => Ok(None),
                        FsChoice::Method(_) => match &selected[&(fs, k)] {
                            Ok(cols) => Ok(Some(cols.as_ref().clone())),
                            Err(msg) => Err(Error::InvalidParameter(msg.clone())),
                        },
                    }
                };
                let outcome = pipeline::evaluate_cell(&prep, fs, classifier, ensemble, cfg, &lookup);
                let (best_k, sweep, report, error) = match outcome {
                    Ok(o) => (o.best_k, o.sweep, Some(o.report), None),
                    Err(e) => (None, Vec::new(), None, Some(e.to_string())),
                };
                GridCell {
                    fs,
                    classifier,
                    ensemble,
                    best_k,
                    sweep,
                    report,
                    error,
                }
            })
            .collect();

        Ok(GridResult {
            version: env!("CARGO_PKG_VERSION").into(),
            dataset: prep.meta.clone(),
            vocabulary: prep.vocab.len(),
            k_sweep: ks,
            config: cfg.echo(),
            ensembles: cfg.ensembles.clone(),
            fs: cfg.fs.clone(),
            classifiers: cfg.classifiers.clone(),
            cells,
            selection_timing,
            total_wall_clock_s: start.elapsed().as_secs_f64(),
        })
    })
}
