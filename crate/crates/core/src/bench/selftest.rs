//! Synthetic data and the property checks behind `sentifs selftest`.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classifiers::{self, Kind};
use crate::corpus::{self, Corpus, Label, Partition, SplitSpec};
use crate::ensemble::{self, EnsembleKind, EnsembleSpec};
use crate::error::Result;
use crate::features::{binary_matrix, build_stats, build_vocabulary, tf_idf_matrix, FeatureMatrix, TfLength};
use crate::oracle;

const POSITIVE_WORDS: [&str; 12] = [
    "great",
    "good",
    "love",
    "excellent",
    "nice",
    "best",
    "happy",
    "works",
    "perfect",
    "recommend",
    "fine",
    "awesome",
];
const NEGATIVE_WORDS: [&str; 12] = [
    "bad",
    "poor",
    "broke",
    "worst",
    "waste",
    "terrible",
    "disappointed",
    "junk",
    "awful",
    "return",
    "failed",
    "cheap",
];
const NEUTRAL_WORDS: [&str; 24] = [
    "the", "phone", "this", "it", "battery", "and", "is", "was", "a", "product", "i", "my", "with", "for", "case",
    "sound", "screen", "after", "one", "day", "use", "very", "quality", "price",
];

/// Balanced two-class sentences built from small sentiment lexicons. Each
/// sentence carries one to three cue words, one of which comes from the
/// opposite class one time in five.
pub fn synthetic_sentences(seed: u64, n_docs: usize) -> Vec<(String, Label)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_docs)
        .map(|i| {
            let label = (i % 2) as Label;
            let (own, other) = if label == 1 {
                (&POSITIVE_WORDS, &NEGATIVE_WORDS)
            } else {
                (&NEGATIVE_WORDS, &POSITIVE_WORDS)
            };
            let mut words: Vec<&str> = (0..rng.random_range(3..9))
                .map(|_| *NEUTRAL_WORDS.choose(&mut rng).expect("non-empty"))
                .collect();
            for _ in 0..rng.random_range(1..4) {
                let pool = if rng.random_bool(0.2) { other } else { own };
                let at = rng.random_range(0..=words.len());
                words.insert(at, pool.choose(&mut rng).expect("non-empty"));
            }
            (words.join(" "), label)
        })
        .collect()
}

pub fn synthetic_corpus(seed: u64, n_docs: usize) -> Corpus {
    Corpus::from_records("synthetic", Partition::Full, synthetic_sentences(seed, n_docs)).expect("labels are binary")
}

/// Writes `sentence<TAB>label` lines.
pub fn write_synthetic_tsv(path: &Path, seed: u64, n_docs: usize) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    for (text, label) in synthetic_sentences(seed, n_docs) {
        writeln!(f, "{text}\t{label}")?;
    }
    f.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Trains every classifier kind alone, as a one-member bagging ensemble
/// without bootstrap, and as a one-member full-width random subspace
/// ensemble, and compares predictions on both partitions.
pub fn degenerate_ensembles(seed: u64, n_docs: usize) -> Result<Vec<Check>> {
    let corpus = synthetic_corpus(seed, n_docs);
    let train_n = n_docs * 7 / 10;
    let (train, test) = corpus::split(&corpus, &SplitSpec::new(train_n, n_docs - train_n).with_seed(seed))?;
    let vocab = build_vocabulary(&train, 1)?;
    let stats = build_stats(&train, &vocab);
    let y = train.labels();
    let tf: [FeatureMatrix; 2] = [&train, &test].map(|c| tf_idf_matrix(c, &vocab, &stats, TfLength::AllTokens));
    let bin: [FeatureMatrix; 2] = [&train, &test].map(|c| binary_matrix(c, &vocab));
    let mut checks = Vec::new();
    for kind in Kind::ALL {
        let [x_train, x_test] = if kind.uses_binary_features() { &bin } else { &tf };
        let cfg = classifiers::TrainConfig {
            seed,
            ..Default::default()
        };
        let base = classifiers::train(kind, x_train, &y, &cfg)?;
        let mut bag = EnsembleSpec::new(EnsembleKind::Bagging, kind);
        bag.n_estimators = 1;
        bag.bootstrap = false;
        bag.config = cfg.clone();
        bag.seed = seed;
        let mut rs = EnsembleSpec::new(EnsembleKind::RandomSubspace, kind);
        rs.n_estimators = 1;
        rs.subspace_size = Some(x_train.cols());
        rs.config = cfg;
        rs.seed = seed;
        let bag = ensemble::train(x_train, &y, &bag)?;
        let rs = ensemble::train(x_train, &y, &rs)?;
        let mut mismatches = 0;
        for x in [x_train, x_test] {
            let want = base.predict(x)?;
            for got in [bag.predict(x)?, rs.predict(x)?] {
                mismatches += want.iter().zip(&got).filter(|(a, b)| a != b).count();
            }
        }
        checks.push(Check {
            name: format!("degenerate ensembles match {}", kind.id()),
            passed: mismatches == 0,
            detail: format!("{mismatches} mismatching predictions over {} documents", 2 * n_docs),
        });
    }
    Ok(checks)
}

/// Scorer oracle, LR gradient check and degenerate ensembles.
pub fn run_selftest(seed: u64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let start = Instant::now();
    let report = oracle::check_scorers(seed, 100, 1e-10)?;
    checks.push(Check {
        name: "scorers match brute-force recomputation".into(),
        passed: report.passed(),
        detail: format!(
            "{} corpora, {} score and {} selection checks, max error {:.3e}, {} failures, {:.2}s",
            report.corpora,
            report.score_checks,
            report.selection_checks,
            report.max_score_error,
            report.failures.len(),
            start.elapsed().as_secs_f64()
        ),
    });
    let err = oracle::lr_gradient_check(seed, 20)?;
    checks.push(Check {
        name: "logistic regression gradient".into(),
        passed: err < 1e-4,
        detail: format!("max relative error {err:.3e} over 20 instances"),
    });
    checks.extend(degenerate_ensembles(seed, 200)?);
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_is_balanced_and_seeded() {
        let a = synthetic_sentences(3, 50);
        assert_eq!(a, synthetic_sentences(3, 50));
        assert_ne!(a, synthetic_sentences(4, 50));
        assert_eq!(a.iter().filter(|(_, l)| *l == 1).count(), 25);
    }

    #[test]
    fn degenerate_checks_pass() {
        let checks = degenerate_ensembles(5, 80).unwrap();
        assert_eq!(checks.len(), 6);
        assert!(checks.iter().all(|c| c.passed), "{checks:?}");
    }
}
