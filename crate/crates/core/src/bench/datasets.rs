//! Built-in dataset registry with expected class counts.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::corpus::{self, Corpus, Partition, SplitSpec};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    /// One `sentence<TAB>label` file, split at run time.
    Sentences(&'static str),
    /// Separate train and test files.
    PreSplit { train: &'static str, test: &'static str },
    /// A manifest of `path<TAB>label` lines.
    Manifest(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DatasetInfo {
    pub name: &'static str,
    pub source: Source,
    pub positive: usize,
    pub negative: usize,
    pub train: usize,
    pub test: usize,
    pub min_df: usize,
}

pub const REGISTRY: [DatasetInfo; 8] = [
    DatasetInfo {
        name: "ARD",
        source: Source::Sentences("amazon_cells_labelled.txt"),
        positive: 500,
        negative: 500,
        train: 700,
        test: 300,
        min_df: 1,
    },
    DatasetInfo {
        name: "IRD",
        source: Source::Sentences("imdb_labelled.txt"),
        positive: 500,
        negative: 500,
        train: 700,
        test: 300,
        min_df: 1,
    },
    DatasetInfo {
        name: "YRD",
        source: Source::Sentences("yelp_labelled.txt"),
        positive: 500,
        negative: 500,
        train: 700,
        test: 300,
        min_df: 1,
    },
    DatasetInfo {
        name: "MR",
        source: Source::PreSplit {
            train: "mr_train.tsv",
            test: "mr_test.tsv",
        },
        positive: 5331,
        negative: 5331,
        train: 7108,
        test: 3554,
        min_df: 2,
    },
    DatasetInfo {
        name: "BOOKS",
        source: Source::Manifest("books.manifest"),
        positive: 1000,
        negative: 1000,
        train: 1600,
        test: 400,
        min_df: 2,
    },
    DatasetInfo {
        name: "DVD",
        source: Source::Manifest("dvd.manifest"),
        positive: 1000,
        negative: 1000,
        train: 1600,
        test: 400,
        min_df: 2,
    },
    DatasetInfo {
        name: "ELECTRONICS",
        source: Source::Manifest("electronics.manifest"),
        positive: 1000,
        negative: 1000,
        train: 1600,
        test: 400,
        min_df: 2,
    },
    DatasetInfo {
        name: "KITCHEN",
        source: Source::Manifest("kitchen.manifest"),
        positive: 1000,
        negative: 1000,
        train: 1600,
        test: 400,
        min_df: 2,
    },
];

pub const DEFAULT_DATA_DIR: &str = "data";
pub const DATA_DIR_ENV: &str = "SENTIFS_DATA_DIR";

pub fn lookup(name: &str) -> Option<&'static DatasetInfo> {
    REGISTRY.iter().find(|d| d.name.eq_ignore_ascii_case(name))
}

pub fn known_names() -> String {
    REGISTRY.iter().map(|d| d.name).collect::<Vec<_>>().join(", ")
}

/// Explicit directory, then the environment variable, then `data/`.
pub fn resolve_data_dir(explicit: Option<&Path>) -> PathBuf {
    explicit
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(DATA_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_DATA_DIR))
}

/// Paths a dataset reads, for checking presence before a run.
pub fn files(info: &DatasetInfo, dir: &Path) -> Vec<PathBuf> {
    match info.source {
        Source::Sentences(f) | Source::Manifest(f) => vec![dir.join(f)],
        Source::PreSplit { train, test } => vec![dir.join(train), dir.join(test)],
    }
}

pub fn is_available(name: &str, dir: &Path) -> bool {
    lookup(name).is_some_and(|info| files(info, dir).iter().all(|p| p.is_file()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DatasetMeta {
    pub name: String,
    pub documents: usize,
    pub positive: usize,
    pub negative: usize,
    pub train: usize,
    pub test: usize,
    pub min_df: usize,
}

#[derive(Debug, Clone)]
pub struct LoadedSplit {
    pub train: Corpus,
    pub test: Corpus,
    pub meta: DatasetMeta,
}

fn check_counts(info: &DatasetInfo, counts: [usize; 2]) -> Result<()> {
    if counts != [info.negative, info.positive] {
        return Err(Error::DatasetCounts {
            name: info.name.to_string(),
            expected_pos: info.positive,
            expected_neg: info.negative,
            pos: counts[1],
            neg: counts[0],
        });
    }
    Ok(())
}

/// Loads a registry dataset or a `sentence<TAB>label` file and splits it.
///
/// Registry datasets use their fixed split sizes. A file path is split
/// stratified with `train_frac` of the documents, rounded, in training.
pub fn load_split(
    dataset: &str,
    data_dir: &Path,
    seed: u64,
    train_frac: f64,
    check: bool,
    min_df: Option<usize>,
) -> Result<LoadedSplit> {
    let Some(info) = lookup(dataset) else {
        let path = Path::new(dataset);
        if !path.is_file() {
            return Err(Error::UnknownDataset {
                name: dataset.to_string(),
                known: known_names(),
            });
        }
        let corpus = corpus::load_tsv(path)?;
        let n = corpus.len();
        let train_n = ((n as f64 * train_frac).round() as usize).clamp(1, n.saturating_sub(1).max(1));
        let (train, test) = corpus::split(&corpus, &SplitSpec::new(train_n, n - train_n).with_seed(seed))?;
        let [neg, pos] = corpus.class_counts();
        return Ok(LoadedSplit {
            meta: DatasetMeta {
                name: corpus.name.clone(),
                documents: n,
                positive: pos,
                negative: neg,
                train: train.len(),
                test: test.len(),
                min_df: min_df.unwrap_or(1),
            },
            train,
            test,
        });
    };
    let (train, test) = match info.source {
        Source::Sentences(file) => {
            let corpus = corpus::load_tsv(data_dir.join(file))?;
            if check {
                check_counts(info, corpus.class_counts())?;
            }
            let n = corpus.len();
            let spec = if check {
                SplitSpec::new(info.train, info.test)
            } else {
                let train_n = ((n as f64 * info.train as f64) / (info.train + info.test) as f64).round() as usize;
                SplitSpec::new(train_n, n - train_n)
            };
            corpus::split(&corpus, &spec.with_seed(seed))?
        }
        Source::PreSplit { train, test } => {
            let tr = corpus::load_tsv(data_dir.join(train))?;
            let te = corpus::load_tsv(data_dir.join(test))?;
            if check {
                let [a, b] = tr.class_counts();
                let [c, d] = te.class_counts();
                check_counts(info, [a + c, b + d])?;
            }
            (
                Corpus::concat(&tr.name, Partition::Train, &[&tr]),
                Corpus::concat(&te.name, Partition::Test, &[&te]),
            )
        }
        Source::Manifest(file) => {
            let corpus = corpus::load_manifest(data_dir.join(file))?;
            if check {
                check_counts(info, corpus.class_counts())?;
            }
            let n = corpus.len();
            let train_n = if check {
                info.train
            } else {
                ((n as f64 * info.train as f64) / (info.train + info.test) as f64).round() as usize
            };
            corpus::split(&corpus, &SplitSpec::new(train_n, n - train_n).with_seed(seed))?
        }
    };
    let [tn, tp] = train.class_counts();
    let [sn, sp] = test.class_counts();
    Ok(LoadedSplit {
        meta: DatasetMeta {
            name: info.name.to_string(),
            documents: train.len() + test.len(),
            positive: tp + sp,
            negative: tn + sn,
            train: train.len(),
            test: test.len(),
            min_df: min_df.unwrap_or(info.min_df),
        },
        train,
        test,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn lookup_is_case_insensitive() {
        assert_eq!(lookup("ard").unwrap().name, "ARD");
        assert_eq!(lookup("Kitchen").unwrap().train, 1600);
        assert!(lookup("nope").is_none());
    }

    #[test]
    fn unknown_dataset_lists_names() {
        let err = load_split("nope", Path::new("/nonexistent"), 1, 0.7, true, None).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("ARD") && msg.contains("KITCHEN"), "{msg}");
    }

    #[test]
    fn counts_are_validated() {
        let dir = tempfile::tempdir().unwrap();
        let mut f = std::fs::File::create(dir.path().join("amazon_cells_labelled.txt")).unwrap();
        for i in 0..10 {
            writeln!(f, "sentence {i}\t{}", i % 2).unwrap();
        }
        drop(f);
        let err = load_split("ARD", dir.path(), 1, 0.7, true, None).unwrap_err();
        assert!(matches!(err, Error::DatasetCounts { pos: 5, neg: 5, .. }), "{err}");
        let loaded = load_split("ARD", dir.path(), 1, 0.7, false, None).unwrap();
        assert_eq!((loaded.meta.train, loaded.meta.test), (7, 3));
    }

    #[test]
    fn path_dataset_splits_by_fraction() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("small.tsv");
        let mut f = std::fs::File::create(&path).unwrap();
        for i in 0..20 {
            writeln!(f, "words {i}\t{}", i % 2).unwrap();
        }
        drop(f);
        let loaded = load_split(path.to_str().unwrap(), dir.path(), 3, 0.7, true, None).unwrap();
        assert_eq!((loaded.train.len(), loaded.test.len()), (14, 6));
        assert_eq!(loaded.train.class_counts(), [7, 7]);
    }
}
