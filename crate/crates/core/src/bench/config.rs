//! Flat `key = value` run configuration with `#` comments.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::classifiers::{Kind, TrainConfig};
use crate::corpus::DEFAULT_SPLIT_SEED;
use crate::ensemble::{EnsembleKind, DEFAULT_ESTIMATORS};
use crate::error::{Error, Result};
use crate::features::TfLength;
use crate::metrics::F1Mode;
use crate::selection::{GssForm, Method, SelectionParams};

/// A feature selection choice, including none at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FsChoice {
    None,
    Method(Method),
}

impl FsChoice {
    pub const ALL_METHODS: [FsChoice; 7] = [
        FsChoice::Method(Method::OddsRatio),
        FsChoice::Method(Method::ChiSquare),
        FsChoice::Method(Method::Gss),
        FsChoice::Method(Method::Bns),
        FsChoice::Method(Method::CountDifference),
        FsChoice::Method(Method::ImprovedChiSquare),
        FsChoice::Method(Method::Mrdc),
    ];

    pub fn id(self) -> &'static str {
        match self {
            FsChoice::None => "NONE",
            FsChoice::Method(m) => m.id(),
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            FsChoice::None => "None",
            FsChoice::Method(m) => m.display_name(),
        }
    }
}

impl fmt::Display for FsChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for FsChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("none") {
            Ok(FsChoice::None)
        } else {
            s.parse().map(FsChoice::Method)
        }
    }
}

/// Base classifier alone, or wrapped in an ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EnsembleMode {
    Base,
    Ensemble(EnsembleKind),
}

impl EnsembleMode {
    pub const ALL: [EnsembleMode; 3] = [
        EnsembleMode::Base,
        EnsembleMode::Ensemble(EnsembleKind::Bagging),
        EnsembleMode::Ensemble(EnsembleKind::RandomSubspace),
    ];

    pub fn id(self) -> &'static str {
        match self {
            EnsembleMode::Base => "none",
            EnsembleMode::Ensemble(k) => k.id(),
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            EnsembleMode::Base => "Base Classifiers",
            EnsembleMode::Ensemble(k) => k.display_name(),
        }
    }
}

impl fmt::Display for EnsembleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for EnsembleMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" | "base" => Ok(EnsembleMode::Base),
            other => other.parse().map(EnsembleMode::Ensemble),
        }
    }
}

/// One entry of the K sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KValue {
    Count(usize),
    /// The whole vocabulary.
    All,
}

impl KValue {
    pub fn resolve(self, vocab_size: usize) -> usize {
        match self {
            KValue::Count(k) => k.min(vocab_size),
            KValue::All => vocab_size,
        }
    }
}

impl fmt::Display for KValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KValue::Count(k) => write!(f, "{k}"),
            KValue::All => f.write_str("all"),
        }
    }
}

impl FromStr for KValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("all") {
            return Ok(KValue::All);
        }
        match s.parse::<usize>() {
            Ok(k) if k > 0 => Ok(KValue::Count(k)),
            _ => Err(Error::Config(format!("invalid k {s:?}"))),
        }
    }
}

pub const DEFAULT_K_SWEEP: [KValue; 4] = [
    KValue::Count(500),
    KValue::Count(1000),
    KValue::Count(2000),
    KValue::All,
];

/// Which matrix multinomial naive Bayes trains on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MnbInput {
    #[default]
    Binary,
    Counts,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Registry name or path to a `sentence<TAB>label` file.
    pub dataset: String,
    pub data_dir: Option<PathBuf>,
    pub fs: Vec<FsChoice>,
    pub k: Vec<KValue>,
    pub classifiers: Vec<Kind>,
    pub ensembles: Vec<EnsembleMode>,
    pub estimators: usize,
    pub subspace_frac: f64,
    pub bootstrap: bool,
    /// Seeds the split, the ensembles and the base classifiers.
    pub seed: u64,
    pub jobs: usize,
    pub out: PathBuf,
    /// `None` uses the dataset default.
    pub min_df: Option<usize>,
    /// Training fraction for datasets given by path.
    pub train_frac: f64,
    pub check_counts: bool,
    pub tf_length: TfLength,
    pub selection: SelectionParams,
    pub mnb_input: MnbInput,
    pub f1_mode: F1Mode,
    pub train: TrainConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dataset: "ARD".into(),
            data_dir: None,
            fs: FsChoice::ALL_METHODS.to_vec(),
            k: DEFAULT_K_SWEEP.to_vec(),
            classifiers: Kind::ALL.to_vec(),
            ensembles: EnsembleMode::ALL.to_vec(),
            estimators: DEFAULT_ESTIMATORS,
            subspace_frac: 0.5,
            bootstrap: true,
            seed: DEFAULT_SPLIT_SEED,
            jobs: 1,
            out: PathBuf::from("out"),
            min_df: None,
            train_frac: 0.7,
            check_counts: true,
            tf_length: TfLength::AllTokens,
            selection: SelectionParams::default(),
            mnb_input: MnbInput::Binary,
            f1_mode: F1Mode::Positive,
            train: TrainConfig::default(),
        }
    }
}

fn list<T: FromStr<Err = Error> + Clone>(value: &str, all: &[T]) -> Result<Vec<T>> {
    if value.trim().eq_ignore_ascii_case("all") {
        return Ok(all.to_vec());
    }
    let items: Vec<T> = value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(Error::Config("empty list".into()));
    }
    Ok(items)
}

fn number<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("invalid value {value:?} for {key}")))
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    pub const KEYS: [&'static str; 22] = [
        "dataset",
        "data_dir",
        "fs",
        "k",
        "clf",
        "ensemble",
        "estimators",
        "subspace_frac",
        "bootstrap",
        "seed",
        "jobs",
        "out",
        "min_df",
        "train_frac",
        "check_counts",
        "tf_length",
        "or_epsilon",
        "bns_clamp",
        "gss_form",
        "mrdc_pool",
        "mnb_input",
        "f1_mode",
    ];

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim();
        let value = value.trim();
        match key {
            "dataset" => self.dataset = value.to_string(),
            "data_dir" => self.data_dir = Some(PathBuf::from(value)),
            "fs" => {
                self.fs = if value.eq_ignore_ascii_case("all") {
                    FsChoice::ALL_METHODS.to_vec()
                } else {
                    list(value, &[])?
                }
            }
            "k" => self.k = list(value, &DEFAULT_K_SWEEP)?,
            "clf" | "classifier" => self.classifiers = list(value, &Kind::ALL)?,
            "ensemble" => self.ensembles = list(value, &EnsembleMode::ALL)?,
            "estimators" => self.estimators = number(key, value)?,
            "subspace_frac" => self.subspace_frac = number(key, value)?,
            "bootstrap" => self.bootstrap = number(key, value)?,
            "seed" => {
                self.seed = number(key, value)?;
                self.train.seed = self.seed;
            }
            "jobs" => self.jobs = number(key, value)?,
            "out" => self.out = PathBuf::from(value),
            "min_df" => {
                self.min_df = match value {
                    "auto" | "" => None,
                    v => Some(number(key, v)?),
                }
            }
            "train_frac" => self.train_frac = number(key, value)?,
            "check_counts" => self.check_counts = number(key, value)?,
            "tf_length" => {
                self.tf_length = match value {
                    "all_tokens" => TfLength::AllTokens,
                    "in_vocabulary" => TfLength::InVocabulary,
                    _ => return Err(Error::Config(format!("invalid tf_length {value:?}"))),
                }
            }
            "or_epsilon" => self.selection.or_epsilon = number(key, value)?,
            "bns_clamp" => {
                self.selection.bns_clamp = match value {
                    "auto" | "" => None,
                    v => Some(number(key, v)?),
                }
            }
            "gss_form" => {
                self.selection.gss_form = match value {
                    "standard" => GssForm::Standard,
                    "as_printed" => GssForm::AsPrinted,
                    _ => return Err(Error::Config(format!("invalid gss_form {value:?}"))),
                }
            }
            "mrdc_pool" => {
                self.selection.mrdc_pool = match value {
                    "auto" | "" => None,
                    v => Some(number(key, v)?),
                }
            }
            "mnb_input" => {
                self.mnb_input = match value {
                    "binary" => MnbInput::Binary,
                    "counts" => MnbInput::Counts,
                    _ => return Err(Error::Config(format!("invalid mnb_input {value:?}"))),
                }
            }
            "f1_mode" => self.f1_mode = value.parse()?,
            other => {
                if !self.train.set(other, value)? {
                    return Err(Error::Config(format!("unknown key {other:?}")));
                }
            }
        }
        Ok(())
    }

    /// Applies `key=value` lines; blank lines and `#` comments are ignored.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
            self.set(k, v)
                .map_err(|e| Error::Config(format!("line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        cfg.apply_text(&std::fs::read_to_string(path)?)?;
        Ok(cfg)
    }

    pub fn get(&self, key: &str) -> Option<String> {
        let opt = |v: Option<String>| v.unwrap_or_else(|| "auto".into());
        Some(match key {
            "dataset" => self.dataset.clone(),
            "data_dir" => opt(self.data_dir.as_ref().map(|p| p.display().to_string())),
            "fs" => join(&self.fs),
            "k" => join(&self.k),
            "clf" => join(&self.classifiers),
            "ensemble" => join(&self.ensembles),
            "estimators" => self.estimators.to_string(),
            "subspace_frac" => format!("{:?}", self.subspace_frac),
            "bootstrap" => self.bootstrap.to_string(),
            "seed" => self.seed.to_string(),
            "jobs" => self.jobs.to_string(),
            "out" => self.out.display().to_string(),
            "min_df" => opt(self.min_df.map(|v| v.to_string())),
            "train_frac" => format!("{:?}", self.train_frac),
            "check_counts" => self.check_counts.to_string(),
            "tf_length" => match self.tf_length {
                TfLength::AllTokens => "all_tokens".into(),
                TfLength::InVocabulary => "in_vocabulary".into(),
            },
            "or_epsilon" => format!("{:?}", self.selection.or_epsilon),
            "bns_clamp" => opt(self.selection.bns_clamp.map(|v| format!("{v:?}"))),
            "gss_form" => match self.selection.gss_form {
                GssForm::Standard => "standard".into(),
                GssForm::AsPrinted => "as_printed".into(),
            },
            "mrdc_pool" => opt(self.selection.mrdc_pool.map(|v| v.to_string())),
            "mnb_input" => match self.mnb_input {
                MnbInput::Binary => "binary".into(),
                MnbInput::Counts => "counts".into(),
            },
            "f1_mode" => self.f1_mode.to_string(),
            other => return self.train.get(other),
        })
    }

    /// Every setting as `key=value`, run keys first, then classifier keys.
    /// The output directory and job count are left out since they do not
    /// affect results.
    pub fn echo(&self) -> Vec<String> {
        Self::KEYS
            .iter()
            .chain(TrainConfig::KEYS.iter().filter(|k| **k != "seed"))
            .filter(|k| !matches!(**k, "out" | "jobs" | "data_dir"))
            .map(|k| format!("{k}={}", self.get(k).unwrap_or_default()))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.fs.is_empty() || self.k.is_empty() || self.classifiers.is_empty() || self.ensembles.is_empty() {
            return Err(Error::Config("fs, k, clf and ensemble need at least one value".into()));
        }
        if self.estimators == 0 {
            return Err(Error::Config("estimators must be at least 1".into()));
        }
        if !(self.subspace_frac > 0.0 && self.subspace_frac <= 1.0) {
            return Err(Error::Config(format!(
                "subspace_frac must lie in (0, 1], got {}",
                self.subspace_frac
            )));
        }
        if !(self.train_frac > 0.0 && self.train_frac < 1.0) {
            return Err(Error::Config(format!(
                "train_frac must lie in (0, 1), got {}",
                self.train_frac
            )));
        }
        if self.jobs == 0 {
            return Err(Error::Config("jobs must be at least 1".into()));
        }
        if self.min_df == Some(0) {
            return Err(Error::Config("min_df must be at least 1".into()));
        }
        self.train.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_config_text() {
        let mut cfg = RunConfig::default();
        cfg.apply_text(
            "# comment\n dataset = YRD\nfs = CHI, CD # trailing\nk = 100,all\nclf=MNB\nensemble = none,rs\nsvm_c = 2.5\nseed=7\n",
        )
        .unwrap();
        assert_eq!(cfg.dataset, "YRD");
        assert_eq!(
            cfg.fs,
            vec![
                FsChoice::Method(Method::ChiSquare),
                FsChoice::Method(Method::CountDifference)
            ]
        );
        assert_eq!(cfg.k, vec![KValue::Count(100), KValue::All]);
        assert_eq!(cfg.classifiers, vec![Kind::Mnb]);
        assert_eq!(
            cfg.ensembles,
            vec![EnsembleMode::Base, EnsembleMode::Ensemble(EnsembleKind::RandomSubspace)]
        );
        assert_eq!(cfg.train.svm_c, 2.5);
        assert_eq!(cfg.train.seed, 7);
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn rejects_bad_input() {
        let mut cfg = RunConfig::default();
        assert!(cfg.apply_text("nonsense").is_err());
        assert!(cfg.set("colour", "blue").is_err());
        assert!(cfg.set("k", "0").is_err());
        assert!(cfg.set("fs", "IG").is_err());
        cfg.set("subspace_frac", "1.5").unwrap();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn echo_round_trips() {
        let mut cfg = RunConfig::default();
        cfg.set("fs", "NONE,MRDC").unwrap();
        cfg.set("mrdc_pool", "300").unwrap();
        cfg.set("dt_max_depth", "4").unwrap();
        let mut back = RunConfig::default();
        back.apply_text(&cfg.echo().join("\n")).unwrap();
        assert_eq!(back.echo(), cfg.echo());
        assert_eq!(back.selection, cfg.selection);
        assert_eq!(back.train, cfg.train);
    }

    #[test]
    fn k_resolution() {
        assert_eq!(KValue::Count(500).resolve(300), 300);
        assert_eq!(KValue::All.resolve(300), 300);
        assert_eq!(KValue::Count(20).resolve(300), 20);
    }
}
