//! The six base classifiers and their shared training/prediction contract.
//!
//! All classifiers are binary. Every argmax or sign tie resolves to label 1.

use std::fmt;
use std::str::FromStr;

use crate::corpus::{Label, POSITIVE};
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

mod dump;
pub mod logistic;
pub mod naive_bayes;
pub mod smo;
pub mod svm;
pub mod tree;

pub use dump::{read_model, write_model};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Lr,
    SvmRbf,
    SvmLinear,
    Dt,
    Mnb,
    Bnb,
}

impl Kind {
    /// Table column order.
    pub const ALL: [Kind; 6] = [Kind::Lr, Kind::SvmRbf, Kind::SvmLinear, Kind::Dt, Kind::Mnb, Kind::Bnb];

    pub fn id(self) -> &'static str {
        match self {
            Kind::Lr => "LR",
            Kind::SvmRbf => "SVM_RBF",
            Kind::SvmLinear => "SVM_LINEAR",
            Kind::Dt => "DT",
            Kind::Mnb => "MNB",
            Kind::Bnb => "BNB",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            Kind::Lr => "LR",
            Kind::SvmRbf => "SVM-RBF",
            Kind::SvmLinear => "SVM-Linear",
            Kind::Dt => "DT",
            Kind::Mnb => "MNB",
            Kind::Bnb => "BNB",
        }
    }

    /// Naive Bayes variants train on presence features; everything else on
    /// TF-IDF.
    pub fn uses_binary_features(self) -> bool {
        matches!(self, Kind::Mnb | Kind::Bnb)
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase().replace(['-', ' '], "_");
        Ok(match norm.as_str() {
            "LR" | "LOGISTIC" => Kind::Lr,
            "SVM_RBF" | "RBF" => Kind::SvmRbf,
            "SVM_LINEAR" | "SVM_L" | "SVM" | "LINEAR_SVM" => Kind::SvmLinear,
            "DT" | "TREE" => Kind::Dt,
            "MNB" => Kind::Mnb,
            "BNB" => Kind::Bnb,
            _ => return Err(Error::Config(format!("unknown classifier {s:?}"))),
        })
    }
}

/// RBF kernel width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gamma {
    /// `1 / (d * mean per-feature variance)` of the training matrix.
    Scale,
    Value(f64),
}

impl fmt::Display for Gamma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gamma::Scale => f.write_str("scale"),
            Gamma::Value(v) => write!(f, "{v:?}"),
        }
    }
}

impl FromStr for Gamma {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("scale") {
            return Ok(Gamma::Scale);
        }
        s.trim()
            .parse::<f64>()
            .map(Gamma::Value)
            .map_err(|_| Error::Config(format!("invalid gamma {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    /// Initial step size for the LR line search.
    pub lr_step: f64,
    pub lr_l2: f64,
    pub lr_iters: usize,
    /// LR stops once the gradient infinity-norm drops below this.
    pub tolerance: f64,
    pub svm_c: f64,
    /// Maximal KKT violation accepted by the SMO solver.
    pub svm_tolerance: f64,
    pub svm_max_iter: usize,
    pub rbf_gamma: Gamma,
    pub rbf_max_rows: usize,
    pub dt_max_depth: Option<usize>,
    pub dt_min_leaf: usize,
    pub nb_alpha: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            lr_step: 1.0,
            lr_l2: 1.0,
            lr_iters: 500,
            tolerance: 1e-6,
            svm_c: 1.0,
            svm_tolerance: 1e-3,
            svm_max_iter: 10_000_000,
            rbf_gamma: Gamma::Scale,
            rbf_max_rows: 10_000,
            dt_max_depth: None,
            dt_min_leaf: 1,
            nb_alpha: 1.0,
            seed: 42,
        }
    }
}

impl TrainConfig {
    pub const KEYS: [&'static str; 13] = [
        "lr_step",
        "lr_l2",
        "lr_iters",
        "tolerance",
        "svm_c",
        "svm_tolerance",
        "svm_max_iter",
        "rbf_gamma",
        "rbf_max_rows",
        "dt_max_depth",
        "dt_min_leaf",
        "nb_alpha",
        "seed",
    ];

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("lr_step", self.lr_step),
            ("lr_l2", self.lr_l2),
            ("tolerance", self.tolerance),
            ("svm_c", self.svm_c),
            ("svm_tolerance", self.svm_tolerance),
            ("nb_alpha", self.nb_alpha),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if let Gamma::Value(g) = self.rbf_gamma {
            if !(g > 0.0 && g.is_finite()) {
                return Err(Error::InvalidParameter(format!("rbf_gamma must be positive, got {g}")));
            }
        }
        if self.dt_min_leaf == 0 || self.lr_iters == 0 || self.svm_max_iter == 0 {
            return Err(Error::InvalidParameter(
                "dt_min_leaf, lr_iters and svm_max_iter must be at least 1".into(),
            ));
        }
        if self.dt_max_depth == Some(0) {
            return Err(Error::InvalidParameter("dt_max_depth must be at least 1".into()));
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<String> {
        Some(match key {
            "lr_step" => format!("{:?}", self.lr_step),
            "lr_l2" => format!("{:?}", self.lr_l2),
            "lr_iters" => self.lr_iters.to_string(),
            "tolerance" => format!("{:?}", self.tolerance),
            "svm_c" => format!("{:?}", self.svm_c),
            "svm_tolerance" => format!("{:?}", self.svm_tolerance),
            "svm_max_iter" => self.svm_max_iter.to_string(),
            "rbf_gamma" => self.rbf_gamma.to_string(),
            "rbf_max_rows" => self.rbf_max_rows.to_string(),
            "dt_max_depth" => self.dt_max_depth.map_or("none".into(), |d| d.to_string()),
            "dt_min_leaf" => self.dt_min_leaf.to_string(),
            "nb_alpha" => format!("{:?}", self.nb_alpha),
            "seed" => self.seed.to_string(),
            _ => return None,
        })
    }

    /// Sets one hyperparameter from its textual form. Returns `Ok(false)` for
    /// keys this config does not own.
    pub fn set(&mut self, key: &str, value: &str) -> Result<bool> {
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.trim()
                .parse()
                .map_err(|_| Error::Config(format!("invalid value {v:?} for {key}")))
        }
        match key {
            "lr_step" => self.lr_step = num(key, value)?,
            "lr_l2" => self.lr_l2 = num(key, value)?,
            "lr_iters" => self.lr_iters = num(key, value)?,
            "tolerance" => self.tolerance = num(key, value)?,
            "svm_c" => self.svm_c = num(key, value)?,
            "svm_tolerance" => self.svm_tolerance = num(key, value)?,
            "svm_max_iter" => self.svm_max_iter = num(key, value)?,
            "rbf_gamma" => self.rbf_gamma = value.parse()?,
            "rbf_max_rows" => self.rbf_max_rows = num(key, value)?,
            "dt_max_depth" => {
                self.dt_max_depth = match value.trim() {
                    "none" | "unlimited" | "" => None,
                    v => Some(num(key, v)?),
                }
            }
            "dt_min_leaf" => self.dt_min_leaf = num(key, value)?,
            "nb_alpha" => self.nb_alpha = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            _ => return Ok(false),
        }
        Ok(true)
    }

    /// `key=value` pairs separated by spaces, in [`TrainConfig::KEYS`] order.
    pub fn to_line(&self) -> String {
        Self::KEYS
            .iter()
            .map(|k| format!("{k}={}", self.get(k).unwrap_or_default()))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// A node of a fitted decision tree.
#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    /// Rows with `x[feature] <= threshold` go to `left`.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        label: Label,
        counts: [usize; 2],
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelParams {
    Logistic {
        weights: Vec<f64>,
        bias: f64,
    },
    LinearSvm {
        weights: Vec<f64>,
        bias: f64,
    },
    RbfSvm {
        gamma: f64,
        bias: f64,
        /// `alpha_i * y_i` per support vector, with `y` in {-1, +1}.
        coef: Vec<f64>,
        support: FeatureMatrix,
    },
    Tree {
        nodes: Vec<TreeNode>,
    },
    Multinomial {
        log_prior: [f64; 2],
        log_likelihood: [Vec<f64>; 2],
    },
    Bernoulli {
        log_prior: [f64; 2],
        log_p: [Vec<f64>; 2],
        log_not_p: [Vec<f64>; 2],
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub kind: Kind,
    pub feature_count: usize,
    pub config: TrainConfig,
    pub params: ModelParams,
}

/// Checks dimensions and that both classes are present.
pub(crate) fn check_training_data(x: &FeatureMatrix, y: &[Label]) -> Result<()> {
    if x.rows() != y.len() {
        return Err(Error::Dimension {
            expected: x.rows(),
            got: y.len(),
        });
    }
    if let Some(&bad) = y.iter().find(|&&l| l > 1) {
        return Err(Error::InvalidParameter(format!("label {bad} is not binary")));
    }
    let positives = y.iter().filter(|&&l| l == POSITIVE).count();
    if positives == 0 || positives == y.len() {
        return Err(Error::SingleClass);
    }
    Ok(())
}

pub fn train(kind: Kind, x: &FeatureMatrix, y: &[Label], cfg: &TrainConfig) -> Result<TrainedModel> {
    cfg.validate()?;
    check_training_data(x, y)?;
    let params = match kind {
        Kind::Lr => logistic::train(x, y, cfg)?.0,
        Kind::SvmLinear => svm::train_linear(x, y, cfg)?,
        Kind::SvmRbf => svm::train_rbf(x, y, cfg)?,
        Kind::Dt => tree::train(x, y, cfg),
        Kind::Mnb => naive_bayes::train_multinomial(x, y, cfg.nb_alpha),
        Kind::Bnb => naive_bayes::train_bernoulli(x, y, cfg.nb_alpha),
    };
    Ok(TrainedModel {
        kind,
        feature_count: x.cols(),
        config: cfg.clone(),
        params,
    })
}

pub fn train_lr(x: &FeatureMatrix, y: &[Label], cfg: &TrainConfig) -> Result<TrainedModel> {
    train(Kind::Lr, x, y, cfg)
}

pub fn train_svm_linear(x: &FeatureMatrix, y: &[Label], cfg: &TrainConfig) -> Result<TrainedModel> {
    train(Kind::SvmLinear, x, y, cfg)
}

pub fn train_svm_rbf(x: &FeatureMatrix, y: &[Label], cfg: &TrainConfig) -> Result<TrainedModel> {
    train(Kind::SvmRbf, x, y, cfg)
}

pub fn train_dt(x: &FeatureMatrix, y: &[Label], cfg: &TrainConfig) -> Result<TrainedModel> {
    train(Kind::Dt, x, y, cfg)
}

pub fn train_mnb(x: &FeatureMatrix, y: &[Label], cfg: &TrainConfig) -> Result<TrainedModel> {
    train(Kind::Mnb, x, y, cfg)
}

pub fn train_bnb(x: &FeatureMatrix, y: &[Label], cfg: &TrainConfig) -> Result<TrainedModel> {
    train(Kind::Bnb, x, y, cfg)
}

fn sign_label(score: f64) -> Label {
    if score >= 0.0 {
        1
    } else {
        0
    }
}

impl TrainedModel {
    /// Label for row `i` of `x`; `x` must have `feature_count` columns.
    fn predict_row(&self, x: &FeatureMatrix, i: usize) -> Label {
        match &self.params {
            ModelParams::Logistic { weights, bias } => {
                // h(x) > 0.5 exactly when the linear score is positive
                if x.row_dot(i, weights) + bias > 0.0 {
                    1
                } else {
                    0
                }
            }
            ModelParams::LinearSvm { weights, bias } => sign_label(x.row_dot(i, weights) + bias),
            ModelParams::RbfSvm {
                gamma,
                bias,
                coef,
                support,
            } => sign_label(svm::rbf_decision(support, coef, *gamma, *bias, x, i)),
            ModelParams::Tree { nodes } => tree::predict_row(nodes, x, i),
            ModelParams::Multinomial {
                log_prior,
                log_likelihood,
            } => naive_bayes::predict_multinomial(log_prior, log_likelihood, x, i),
            ModelParams::Bernoulli {
                log_prior,
                log_p,
                log_not_p,
            } => naive_bayes::predict_bernoulli(log_prior, log_p, log_not_p, x, i),
        }
    }

    pub fn predict(&self, x: &FeatureMatrix) -> Result<Vec<Label>> {
        if x.cols() != self.feature_count {
            return Err(Error::Dimension {
                expected: self.feature_count,
                got: x.cols(),
            });
        }
        Ok((0..x.rows()).map(|i| self.predict_row(x, i)).collect())
    }

    /// Whether every stored parameter is finite.
    pub fn is_finite(&self) -> bool {
        let all = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match &self.params {
            ModelParams::Logistic { weights, bias } | ModelParams::LinearSvm { weights, bias } => {
                all(weights) && bias.is_finite()
            }
            ModelParams::RbfSvm { gamma, bias, coef, .. } => gamma.is_finite() && bias.is_finite() && all(coef),
            ModelParams::Tree { nodes } => nodes.iter().all(|n| match n {
                TreeNode::Split { threshold, .. } => threshold.is_finite(),
                TreeNode::Leaf { .. } => true,
            }),
            ModelParams::Multinomial {
                log_prior,
                log_likelihood,
            } => all(log_prior) && log_likelihood.iter().all(|v| all(v)),
            ModelParams::Bernoulli {
                log_prior,
                log_p,
                log_not_p,
            } => all(log_prior) && log_p.iter().chain(log_not_p).all(|v| all(v)),
        }
    }
}

pub fn predict(model: &TrainedModel, x: &FeatureMatrix) -> Result<Vec<Label>> {
    model.predict(x)
}
