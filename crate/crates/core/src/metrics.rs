//! Accuracy, precision, recall and F1 with label 1 as the positive class.

use serde::{Deserialize, Serialize};

use crate::corpus::Label;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }

    /// The same table with the roles of the two classes exchanged.
    pub fn swapped(&self) -> ConfusionCounts {
        ConfusionCounts {
            tp: self.tn,
            fp: self.fn_,
            fn_: self.fp,
            tn: self.tp,
        }
    }
}

pub fn confusion(y_true: &[Label], y_pred: &[Label]) -> Result<ConfusionCounts> {
    if y_true.len() != y_pred.len() {
        return Err(Error::Dimension {
            expected: y_true.len(),
            got: y_pred.len(),
        });
    }
    let mut c = ConfusionCounts::default();
    for (&t, &p) in y_true.iter().zip(y_pred) {
        match (t, p) {
            (1, 1) => c.tp += 1,
            (0, 1) => c.fp += 1,
            (1, 0) => c.fn_ += 1,
            (0, 0) => c.tn += 1,
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "labels must be 0 or 1, got ({t}, {p})"
                )))
            }
        }
    }
    Ok(c)
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn accuracy(c: &ConfusionCounts) -> Result<f64> {
    match c.total() {
        0 => Err(Error::UndefinedMetric),
        n => Ok((c.tp + c.tn) as f64 / n as f64),
    }
}

pub fn precision(c: &ConfusionCounts) -> f64 {
    ratio(c.tp, c.tp + c.fp)
}

pub fn recall(c: &ConfusionCounts) -> f64 {
    ratio(c.tp, c.tp + c.fn_)
}

pub fn f1(c: &ConfusionCounts) -> f64 {
    let (p, r) = (precision(c), recall(c));
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Mean of the per-class F1 scores.
pub fn macro_f1(c: &ConfusionCounts) -> f64 {
    0.5 * (f1(c) + f1(&c.swapped()))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum F1Mode {
    #[default]
    Positive,
    Macro,
}

impl std::str::FromStr for F1Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "positive" | "binary" => Ok(F1Mode::Positive),
            "macro" => Ok(F1Mode::Macro),
            other => Err(Error::Config(format!("unknown f1 mode {other:?}"))),
        }
    }
}

impl std::fmt::Display for F1Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            F1Mode::Positive => "positive",
            F1Mode::Macro => "macro",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub f1_mode: F1Mode,
    pub confusion: ConfusionCounts,
    pub wall_clock_train_s: f64,
    pub wall_clock_predict_s: f64,
    /// `key=value` lines describing the run.
    pub config: Vec<String>,
}

impl EvalReport {
    pub fn from_predictions(y_true: &[Label], y_pred: &[Label], f1_mode: F1Mode) -> Result<EvalReport> {
        let c = confusion(y_true, y_pred)?;
        Ok(EvalReport {
            accuracy: accuracy(&c)?,
            precision: precision(&c),
            recall: recall(&c),
            f1: match f1_mode {
                F1Mode::Positive => f1(&c),
                F1Mode::Macro => macro_f1(&c),
            },
            f1_mode,
            confusion: c,
            wall_clock_train_s: 0.0,
            wall_clock_predict_s: 0.0,
            config: Vec::new(),
        })
    }
}

/// A fraction in [0, 1] as a percentage with two decimals, rounding halves
/// up: `0.82333 -> "82.33"`, `0.8 -> "80.00"`.
pub fn percent(value: f64) -> String {
    let hundredths = (value * 10_000.0 + 0.5 + 1e-9).floor() as i64;
    format!("{}.{:02}", hundredths / 100, hundredths % 100)
}
