//! Bagging and random-subspace committees over a single base classifier.
//!
//! Member `i` draws from its own ChaCha8 stream `(seed, i)`, so members can
//! train in parallel and the committee does not depend on scheduling.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::classifiers::{self, read_model, write_model, Kind, TrainConfig, TrainedModel};
use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

pub const DEFAULT_ESTIMATORS: usize = 25;
/// Bootstrap draws that hit a single class are redrawn up to this many times.
const MAX_REDRAWS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EnsembleKind {
    Bagging,
    RandomSubspace,
}

impl EnsembleKind {
    pub fn id(self) -> &'static str {
        match self {
            EnsembleKind::Bagging => "bagging",
            EnsembleKind::RandomSubspace => "random_subspace",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            EnsembleKind::Bagging => "Bagging",
            EnsembleKind::RandomSubspace => "Random Subspace",
        }
    }
}

impl fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for EnsembleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace(['-', ' '], "_").as_str() {
            "bagging" | "bag" => Ok(EnsembleKind::Bagging),
            "random_subspace" | "rs" | "subspace" => Ok(EnsembleKind::RandomSubspace),
            _ => Err(Error::Config(format!("unknown ensemble {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub n_estimators: usize,
    /// Features per random-subspace member; `None` means half the features,
    /// rounded up.
    pub subspace_size: Option<usize>,
    /// Bagging samples with replacement when set, and uses every row in
    /// order otherwise.
    pub bootstrap: bool,
    pub base: Kind,
    pub config: TrainConfig,
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn new(kind: EnsembleKind, base: Kind) -> Self {
        EnsembleSpec {
            kind,
            n_estimators: DEFAULT_ESTIMATORS,
            subspace_size: None,
            bootstrap: true,
            base,
            config: TrainConfig::default(),
            seed: 42,
        }
    }

    pub fn resolved_subspace(&self, n_features: usize) -> usize {
        self.subspace_size.unwrap_or(n_features.div_ceil(2))
    }

    fn validate(&self, n_features: usize) -> Result<()> {
        if self.n_estimators == 0 {
            return Err(Error::InvalidParameter("n_estimators must be at least 1".into()));
        }
        if self.kind == EnsembleKind::RandomSubspace {
            let m = self.resolved_subspace(n_features);
            if m == 0 || m > n_features {
                return Err(Error::InvalidParameter(format!(
                    "subspace size {m} must be between 1 and the feature count {n_features}"
                )));
            }
        }
        self.config.validate()
    }

    fn member_rng(&self, member: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(member as u64);
        rng
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleModel {
    pub members: Vec<TrainedModel>,
    /// Columns each member sees, ascending.
    pub member_feature_sets: Vec<Vec<usize>>,
    pub spec: EnsembleSpec,
    pub feature_count: usize,
}

fn bootstrap_rows(rng: &mut ChaCha8Rng, y: &[Label]) -> Result<Vec<usize>> {
    let n = y.len();
    for _ in 0..MAX_REDRAWS {
        let rows: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
        let positives = rows.iter().filter(|&&r| y[r] == 1).count();
        if positives > 0 && positives < n {
            return Ok(rows);
        }
    }
    Err(Error::SingleClass)
}

pub fn train_bagging(x: &FeatureMatrix, y: &[Label], spec: &EnsembleSpec) -> Result<EnsembleModel> {
    if spec.kind != EnsembleKind::Bagging {
        return Err(Error::InvalidParameter("train_bagging needs a bagging spec".into()));
    }
    spec.validate(x.cols())?;
    classifiers::check_training_data(x, y)?;
    let members = (0..spec.n_estimators)
        .into_par_iter()
        .map(|i| {
            let rows = if spec.bootstrap {
                bootstrap_rows(&mut spec.member_rng(i), y)?
            } else {
                (0..y.len()).collect()
            };
            let xs = x.select_rows(&rows);
            let ys: Vec<Label> = rows.iter().map(|&r| y[r]).collect();
            classifiers::train(spec.base, &xs, &ys, &spec.config)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EnsembleModel {
        member_feature_sets: vec![(0..x.cols()).collect(); members.len()],
        members,
        spec: spec.clone(),
        feature_count: x.cols(),
    })
}

pub fn train_random_subspace(x: &FeatureMatrix, y: &[Label], spec: &EnsembleSpec) -> Result<EnsembleModel> {
    if spec.kind != EnsembleKind::RandomSubspace {
        return Err(Error::InvalidParameter(
            "train_random_subspace needs a random subspace spec".into(),
        ));
    }
    spec.validate(x.cols())?;
    classifiers::check_training_data(x, y)?;
    let m = spec.resolved_subspace(x.cols());
    let trained = (0..spec.n_estimators)
        .into_par_iter()
        .map(|i| {
            let mut set = index::sample(&mut spec.member_rng(i), x.cols(), m).into_vec();
            set.sort_unstable();
            let model = classifiers::train(spec.base, &x.project(&set)?, y, &spec.config)?;
            Ok((model, set))
        })
        .collect::<Result<Vec<_>>>()?;
    let (members, member_feature_sets) = trained.into_iter().unzip();
    Ok(EnsembleModel {
        members,
        member_feature_sets,
        spec: spec.clone(),
        feature_count: x.cols(),
    })
}

pub fn train(x: &FeatureMatrix, y: &[Label], spec: &EnsembleSpec) -> Result<EnsembleModel> {
    match spec.kind {
        EnsembleKind::Bagging => train_bagging(x, y, spec),
        EnsembleKind::RandomSubspace => train_random_subspace(x, y, spec),
    }
}

/// Per-position majority over member predictions; ties go to label 1.
pub fn vote(member_predictions: &[Vec<Label>]) -> Result<Vec<Label>> {
    let Some(first) = member_predictions.first() else {
        return Err(Error::InvalidParameter("vote needs at least one member".into()));
    };
    let n = first.len();
    if let Some(bad) = member_predictions.iter().find(|p| p.len() != n) {
        return Err(Error::Dimension {
            expected: n,
            got: bad.len(),
        });
    }
    let members = member_predictions.len();
    Ok((0..n)
        .map(|i| {
            let ones = member_predictions.iter().filter(|p| p[i] == 1).count();
            (2 * ones >= members) as Label
        })
        .collect())
}

impl EnsembleModel {
    pub fn member_predictions(&self, x: &FeatureMatrix) -> Result<Vec<Vec<Label>>> {
        if x.cols() != self.feature_count {
            return Err(Error::Dimension {
                expected: self.feature_count,
                got: x.cols(),
            });
        }
        let full = self.member_feature_sets.iter().all(|s| s.len() == self.feature_count);
        self.members
            .par_iter()
            .zip(&self.member_feature_sets)
            .map(|(m, set)| {
                if full {
                    m.predict(x)
                } else {
                    m.predict(&x.project(set)?)
                }
            })
            .collect()
    }

    pub fn predict(&self, x: &FeatureMatrix) -> Result<Vec<Label>> {
        vote(&self.member_predictions(x)?)
    }
}

const MAGIC: &str = "sentifs-ensemble v1";

/// Manifest header followed by one `member` line and model dump per member.
pub fn write_ensemble<W: Write>(mut out: W, model: &EnsembleModel) -> Result<()> {
    let s = &model.spec;
    writeln!(out, "{MAGIC}")?;
    writeln!(out, "kind {}", s.kind)?;
    writeln!(out, "n_estimators {}", s.n_estimators)?;
    writeln!(
        out,
        "subspace_size {}",
        s.subspace_size.map_or("auto".into(), |m| m.to_string())
    )?;
    writeln!(out, "bootstrap {}", s.bootstrap)?;
    writeln!(out, "base {}", s.base)?;
    writeln!(out, "seed {}", s.seed)?;
    writeln!(out, "feature_count {}", model.feature_count)?;
    for (i, (m, set)) in model.members.iter().zip(&model.member_feature_sets).enumerate() {
        let cols: Vec<String> = set.iter().map(|c| c.to_string()).collect();
        writeln!(out, "member {i} {}", cols.join(" "))?;
        write_model(&mut out, m)?;
    }
    Ok(())
}

pub fn read_ensemble<R: BufRead>(mut input: R) -> Result<EnsembleModel> {
    let bad = |m: &str| Error::ModelFormat(m.to_string());
    let mut line = String::new();
    let mut next = |input: &mut R| -> Result<String> {
        line.clear();
        if input.read_line(&mut line)? == 0 {
            return Err(Error::ModelFormat("unexpected end of input".into()));
        }
        Ok(line.trim_end_matches(['\n', '\r']).to_string())
    };
    if next(&mut input)? != MAGIC {
        return Err(bad("missing ensemble header"));
    }
    let mut field = |input: &mut R, name: &str| -> Result<String> {
        let l = next(input)?;
        match l.split_once(' ') {
            Some((k, v)) if k == name => Ok(v.to_string()),
            _ => Err(Error::ModelFormat(format!("expected {name}"))),
        }
    };
    let kind: EnsembleKind = field(&mut input, "kind")?.parse()?;
    let n_estimators: usize = field(&mut input, "n_estimators")?
        .parse()
        .map_err(|_| bad("n_estimators"))?;
    let subspace_size = match field(&mut input, "subspace_size")?.as_str() {
        "auto" => None,
        v => Some(v.parse().map_err(|_| bad("subspace_size"))?),
    };
    let bootstrap: bool = field(&mut input, "bootstrap")?.parse().map_err(|_| bad("bootstrap"))?;
    let base: Kind = field(&mut input, "base")?.parse()?;
    let seed: u64 = field(&mut input, "seed")?.parse().map_err(|_| bad("seed"))?;
    let feature_count: usize = field(&mut input, "feature_count")?
        .parse()
        .map_err(|_| bad("feature_count"))?;
    let mut members = Vec::with_capacity(n_estimators);
    let mut sets = Vec::with_capacity(n_estimators);
    for i in 0..n_estimators {
        let header = field(&mut input, "member")?;
        let mut parts = header.split_whitespace();
        if parts.next() != Some(&i.to_string()) {
            return Err(bad("member index out of order"));
        }
        let set: Vec<usize> = parts
            .map(|t| t.parse().map_err(|_| bad("member column")))
            .collect::<Result<_>>()?;
        let model = read_model(&mut input)?;
        if model.feature_count != set.len() {
            return Err(bad("member feature count does not match its column set"));
        }
        members.push(model);
        sets.push(set);
    }
    let config = members.first().map(|m| m.config.clone()).unwrap_or_default();
    Ok(EnsembleModel {
        members,
        member_feature_sets: sets,
        spec: EnsembleSpec {
            kind,
            n_estimators,
            subspace_size,
            bootstrap,
            base,
            config,
            seed,
        },
        feature_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::Weighting;

    fn data(seed: u64, rows: usize, cols: usize) -> (FeatureMatrix, Vec<Label>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dense: Vec<Vec<f64>> = (0..rows)
            .map(|_| {
                (0..cols)
                    .map(|_| if rng.random_bool(0.3) { 1.0 } else { 0.0 })
                    .collect()
            })
            .collect();
        let y: Vec<Label> = dense
            .iter()
            .map(|r| ((r[0] + r[1] + r[2] >= 1.0) ^ rng.random_bool(0.1)) as Label)
            .collect();
        (FeatureMatrix::from_dense(&dense, cols, Weighting::Binary).unwrap(), y)
    }

    #[test]
    fn vote_examples() {
        assert_eq!(vote(&[vec![1], vec![1], vec![0]]).unwrap(), vec![1]);
        assert_eq!(vote(&[vec![0], vec![1]]).unwrap(), vec![1]);
        assert_eq!(vote(&[vec![0, 1, 0]]).unwrap(), vec![0, 1, 0]);
        assert!(vote(&[]).is_err());
        assert!(vote(&[vec![0], vec![0, 1]]).is_err());
    }

    #[test]
    fn identical_votes_are_fixed_points() {
        let p = vec![0, 1, 1, 0];
        for b in 1..6 {
            assert_eq!(vote(&vec![p.clone(); b]).unwrap(), p);
        }
    }

    #[test]
    fn degenerate_ensembles_match_base() {
        let (x, y) = data(1, 60, 6);
        for kind in Kind::ALL {
            let base = classifiers::train(kind, &x, &y, &TrainConfig::default()).unwrap();
            let expected = base.predict(&x).unwrap();
            let mut bag = EnsembleSpec::new(EnsembleKind::Bagging, kind);
            bag.n_estimators = 1;
            bag.bootstrap = false;
            assert_eq!(train(&x, &y, &bag).unwrap().predict(&x).unwrap(), expected, "{kind}");
            let mut rs = EnsembleSpec::new(EnsembleKind::RandomSubspace, kind);
            rs.subspace_size = Some(x.cols());
            for c in [1, 4] {
                rs.n_estimators = c;
                assert_eq!(train(&x, &y, &rs).unwrap().predict(&x).unwrap(), expected, "{kind}");
            }
        }
    }

    #[test]
    fn seeded_and_order_independent() {
        let (x, y) = data(2, 50, 8);
        let mut spec = EnsembleSpec::new(EnsembleKind::RandomSubspace, Kind::Mnb);
        spec.n_estimators = 7;
        let a = train(&x, &y, &spec).unwrap();
        let b = train(&x, &y, &spec).unwrap();
        assert_eq!(a, b);
        assert!(a.member_feature_sets.iter().all(|s| s.len() == 4));
        // reversing the members leaves the vote unchanged
        let mut rev = a.clone();
        rev.members.reverse();
        rev.member_feature_sets.reverse();
        assert_eq!(rev.predict(&x).unwrap(), a.predict(&x).unwrap());
        // member i is the same whatever the committee size
        spec.n_estimators = 3;
        let c = train(&x, &y, &spec).unwrap();
        assert_eq!(c.member_feature_sets[..], a.member_feature_sets[..3]);
    }

    #[test]
    fn bagging_is_seeded() {
        let (x, y) = data(3, 40, 5);
        let mut spec = EnsembleSpec::new(EnsembleKind::Bagging, Kind::Dt);
        spec.n_estimators = 5;
        assert_eq!(train(&x, &y, &spec).unwrap(), train(&x, &y, &spec).unwrap());
        spec.seed = 7;
        let other = train(&x, &y, &spec).unwrap();
        assert_eq!(other.members.len(), 5);
    }

    #[test]
    fn invalid_specs() {
        let (x, y) = data(4, 20, 3);
        let mut spec = EnsembleSpec::new(EnsembleKind::RandomSubspace, Kind::Mnb);
        spec.subspace_size = Some(4);
        assert!(train(&x, &y, &spec).is_err());
        spec.subspace_size = None;
        spec.n_estimators = 0;
        assert!(train(&x, &y, &spec).is_err());
        assert!(train_bagging(&x, &y, &EnsembleSpec::new(EnsembleKind::RandomSubspace, Kind::Mnb)).is_err());
    }

    #[test]
    fn dump_round_trip() {
        let (x, y) = data(5, 30, 6);
        for kind in [EnsembleKind::Bagging, EnsembleKind::RandomSubspace] {
            let mut spec = EnsembleSpec::new(kind, Kind::Bnb);
            spec.n_estimators = 3;
            let m = train(&x, &y, &spec).unwrap();
            let mut buf = Vec::new();
            write_ensemble(&mut buf, &m).unwrap();
            let back = read_ensemble(&buf[..]).unwrap();
            assert_eq!(back, m);
        }
    }
}
