//! Brute-force reference computations used to cross-check the optimized
//! code paths.
//!
//! Everything here works from the raw token lists of each document, keyed
//! by word rather than by vocabulary index, and uses textbook formulas
//! (expected-count chi-square, two-pass Pearson, bisection normal
//! quantile).

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classifiers::logistic;
use crate::corpus::{Corpus, Label, Partition};
use crate::error::Result;
use crate::features::{build_stats, build_vocabulary, CountVectors, FeatureMatrix, Weighting};
use crate::selection::{self, Method, SelectionParams, SelectionSpec};

/// Per-word document counts by class, straight from the documents.
#[derive(Debug, Clone)]
pub struct WordTable {
    pub pos_with: usize,
    pub neg_with: usize,
    pub pos: usize,
    pub neg: usize,
}

impl WordTable {
    fn n(&self) -> usize {
        self.pos + self.neg
    }

    fn df(&self) -> usize {
        self.pos_with + self.neg_with
    }
}

pub struct Reference {
    pub words: Vec<String>,
    pub tables: BTreeMap<String, WordTable>,
    /// Per word, its occurrence count in each document.
    pub counts: BTreeMap<String, Vec<f64>>,
}

impl Reference {
    pub fn new(corpus: &Corpus) -> Reference {
        let docs = corpus.documents();
        let pos = docs.iter().filter(|d| d.label == 1).count();
        let neg = docs.len() - pos;
        let mut tables: BTreeMap<String, WordTable> = BTreeMap::new();
        let mut counts: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        for (i, d) in docs.iter().enumerate() {
            let set: BTreeSet<&String> = d.tokens.iter().collect();
            for w in set {
                let t = tables.entry(w.clone()).or_insert(WordTable {
                    pos_with: 0,
                    neg_with: 0,
                    pos,
                    neg,
                });
                if d.label == 1 {
                    t.pos_with += 1;
                } else {
                    t.neg_with += 1;
                }
            }
            for w in &d.tokens {
                counts.entry(w.clone()).or_insert_with(|| vec![0.0; docs.len()])[i] += 1.0;
            }
        }
        Reference {
            words: tables.keys().cloned().collect(),
            tables,
            counts,
        }
    }

    pub fn score(&self, method: Method, word: &str, params: &SelectionParams) -> f64 {
        let t = &self.tables[word];
        match method {
            Method::OddsRatio => odds_ratio(t, params.or_epsilon),
            Method::ChiSquare => chi_square(t),
            Method::Gss => gss(t),
            Method::Bns => bns(t, params.bns_clamp),
            Method::CountDifference => count_difference(t),
            Method::ImprovedChiSquare => chi_square(t),
            Method::Mrdc => rdc(t),
        }
    }

    /// Words ordered best first; scores equal to 12 significant digits tie
    /// and fall back to document frequency, then alphabetical order.
    fn ranked(&self, words: &[String], score: impl Fn(&str) -> f64) -> Vec<String> {
        let mut keyed: Vec<(f64, usize, &String)> = words
            .iter()
            .map(|w| (round12(score(w)), self.tables[w].df(), w))
            .collect();
        keyed.sort_by(|a, b| b.0.total_cmp(&a.0).then(b.1.cmp(&a.1)).then(a.2.cmp(b.2)));
        keyed.into_iter().map(|(_, _, w)| w.clone()).collect()
    }

    /// The reference selection of `k` words.
    pub fn select(&self, method: Method, k: usize, params: &SelectionParams) -> Vec<String> {
        let mut out: Vec<String> = match method {
            Method::OddsRatio => self.ranked(&self.words, |w| self.score(method, w, params).abs()),
            Method::ImprovedChiSquare => self.improved_chi_square(k),
            Method::Mrdc => self.mrdc(k, params.mrdc_pool.unwrap_or(2000).max(k)),
            m => self.ranked(&self.words, |w| self.score(m, w, params)),
        };
        out.truncate(k);
        out.sort();
        out
    }

    fn improved_chi_square(&self, k: usize) -> Vec<String> {
        let global = self.ranked(&self.words, |w| chi_square(&self.tables[w]));
        let quota = k.div_ceil(2);
        let mut picked: Vec<String> = Vec::new();
        for positive in [false, true] {
            let associated: Vec<String> = self
                .words
                .iter()
                .filter(|w| {
                    let t = &self.tables[*w];
                    let (mine, my_n, other, other_n) = if positive {
                        (t.pos_with, t.pos, t.neg_with, t.neg)
                    } else {
                        (t.neg_with, t.neg, t.pos_with, t.pos)
                    };
                    (mine as f64 / my_n as f64) > (other as f64 / other_n as f64)
                })
                .cloned()
                .collect();
            for w in self
                .ranked(&associated, |w| chi_square(&self.tables[w]))
                .into_iter()
                .take(quota)
            {
                if !picked.contains(&w) {
                    picked.push(w);
                }
            }
        }
        let rank = |w: &String| global.iter().position(|g| g == w).expect("word is ranked");
        picked.sort_by_key(|w| rank(w));
        picked.truncate(k);
        for w in &global {
            if picked.len() >= k {
                break;
            }
            if !picked.contains(w) {
                picked.push(w.clone());
            }
        }
        picked
    }

    fn mrdc(&self, k: usize, pool: usize) -> Vec<String> {
        let candidates: Vec<String> = self
            .ranked(&self.words, |w| rdc(&self.tables[w]))
            .into_iter()
            .take(pool)
            .collect();
        let mut selected = vec![candidates[0].clone()];
        while selected.len() < k {
            let values: Vec<Option<f64>> = candidates
                .iter()
                .map(|c| {
                    if selected.contains(c) {
                        return None;
                    }
                    let penalty: f64 = selected
                        .iter()
                        .map(|s| pearson(&self.counts[c], &self.counts[s]).abs())
                        .sum();
                    Some(rdc(&self.tables[c]) - penalty)
                })
                .collect();
            let best = values.iter().flatten().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
            let tol = 1e-9 * best.abs().max(1.0);
            let pick = values
                .iter()
                .position(|v| v.is_some_and(|v| v >= best - tol))
                .expect("a candidate remains");
            selected.push(candidates[pick].clone());
        }
        selected
    }
}

fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let digits = 11 - x.abs().log10().floor() as i32;
    let scale = 10f64.powi(digits);
    (x * scale).round() / scale
}

/// 2x2 table with the positive class as `c`:
/// `a` = with word in c, `b` = with word not in c, `c` = without in c,
/// `d` = without not in c.
fn cells(t: &WordTable) -> (f64, f64, f64, f64) {
    (
        t.pos_with as f64,
        t.neg_with as f64,
        (t.pos - t.pos_with) as f64,
        (t.neg - t.neg_with) as f64,
    )
}

pub fn odds_ratio(t: &WordTable, eps: f64) -> f64 {
    let (a, b, c, d) = cells(t);
    // odds ratio of the positive class over that of the negative class,
    // which is the reciprocal table
    let r = ((a + eps) * (d + eps)) / ((b + eps) * (c + eps));
    (r * r).ln()
}

pub fn chi_square(t: &WordTable) -> f64 {
    let (a, b, c, d) = cells(t);
    let n = a + b + c + d;
    let observed = [[a, b], [c, d]];
    let rows = [a + b, c + d];
    let cols = [a + c, b + d];
    let mut total = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let e = rows[i] * cols[j] / n;
            if e == 0.0 {
                return 0.0;
            }
            total += (observed[i][j] - e) * (observed[i][j] - e) / e;
        }
    }
    // both class-vs-rest tables coincide for two classes and the priors sum to 1
    total
}

pub fn gss(t: &WordTable) -> f64 {
    let (a, b, c, d) = cells(t);
    (a * d - b * c).abs()
}

pub fn count_difference(t: &WordTable) -> f64 {
    let df = t.df();
    if df == 0 {
        0.0
    } else {
        (t.pos_with as f64 - t.neg_with as f64).abs() / df as f64
    }
}

pub fn rdc(t: &WordTable) -> f64 {
    let (p, n) = (t.pos_with as f64, t.neg_with as f64);
    (p - n).abs() / p.min(n).max(1.0)
}

pub fn bns(t: &WordTable, clamp: Option<f64>) -> f64 {
    let delta = clamp.unwrap_or(0.5 / t.n() as f64);
    let tpr = (t.pos_with as f64 / t.pos as f64).clamp(delta, 1.0 - delta);
    let fpr = (t.neg_with as f64 / t.neg as f64).clamp(delta, 1.0 - delta);
    (inverse_normal(tpr) - inverse_normal(fpr)).abs()
}

/// Standard normal CDF from its Taylor series around 0, which converges for
/// every argument.
pub fn normal_cdf(x: f64) -> f64 {
    if x.abs() > 9.0 {
        return if x > 0.0 { 1.0 } else { 0.0 };
    }
    let mut term = x;
    let mut sum = x;
    let mut k = 1.0;
    while term.abs() > 1e-300 && k < 2000.0 {
        term *= x * x / (2.0 * k + 1.0);
        sum += term;
        k += 1.0;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    0.5 + sum * (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Bisection on [`normal_cdf`].
pub fn inverse_normal(p: f64) -> f64 {
    let (mut lo, mut hi) = (-9.0f64, 9.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if normal_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Two-pass Pearson correlation; 0 when either vector is constant.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        0.0
    } else {
        sxy / (sxx * syy).sqrt()
    }
}

fn word(i: usize) -> String {
    let a = (b'a' + (i / 26) as u8) as char;
    let b = (b'a' + (i % 26) as u8) as char;
    format!("{a}{b}")
}

/// A random labeled corpus with up to `max_docs` documents over up to
/// `max_words` two-letter words, both classes present.
pub fn random_corpus(rng: &mut ChaCha8Rng, max_docs: usize, max_words: usize) -> Corpus {
    let n_docs = rng.random_range(4..=max_docs.max(4));
    let n_words = rng.random_range(2..=max_words.max(2));
    let rates: Vec<[f64; 2]> = (0..n_words)
        .map(|_| [rng.random_range(0.0..0.4), rng.random_range(0.0..0.4)])
        .collect();
    let records: Vec<(String, Label)> = (0..n_docs)
        .map(|i| {
            let label: Label = if i < 2 { i as Label } else { rng.random_range(0..2) };
            let mut tokens = Vec::new();
            for (w, r) in rates.iter().enumerate() {
                if rng.random_bool(r[label as usize]) {
                    for _ in 0..rng.random_range(1..=3) {
                        tokens.push(word(w));
                    }
                }
            }
            if tokens.is_empty() {
                tokens.push(word(rng.random_range(0..n_words)));
            }
            (tokens.join(" "), label)
        })
        .collect();
    Corpus::from_records("random", Partition::Full, records).expect("non-empty corpus")
}

#[derive(Debug, Clone, Default)]
pub struct OracleReport {
    pub corpora: usize,
    pub score_checks: usize,
    pub selection_checks: usize,
    pub max_score_error: f64,
    pub failures: Vec<String>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Compares every scorer and every selection procedure against the
/// reference on `n_corpora` random corpora.
pub fn check_scorers(seed: u64, n_corpora: usize, tolerance: f64) -> Result<OracleReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = OracleReport::default();
    let params = SelectionParams::default();
    for c in 0..n_corpora {
        let corpus = random_corpus(&mut rng, 200, 50);
        let vocab = build_vocabulary(&corpus, 1)?;
        let stats = build_stats(&corpus, &vocab);
        let counts = CountVectors::build(&corpus, &vocab);
        let reference = Reference::new(&corpus);
        report.corpora += 1;
        if reference.words.len() != vocab.len() {
            report.failures.push(format!("corpus {c}: vocabulary size differs"));
            continue;
        }
        let mut library_scores = Vec::new();
        for m in Method::ALL.into_iter().filter(|m| m.is_ranking()) {
            library_scores.push((m, selection::score(m, &stats, &params)?.scores));
        }
        library_scores.push((
            Method::Mrdc,
            (0..vocab.len())
                .map(|f| selection::rdc(&stats, f))
                .collect::<Result<_>>()?,
        ));
        for (m, scores) in &library_scores {
            for (f, &got) in scores.iter().enumerate() {
                let want = reference.score(*m, vocab.word(f), &params);
                let err = (got - want).abs() / want.abs().max(1.0);
                report.score_checks += 1;
                report.max_score_error = report.max_score_error.max(err);
                if err > tolerance {
                    report
                        .failures
                        .push(format!("corpus {c}: {m} score of {:?}: {got} vs {want}", vocab.word(f)));
                }
            }
        }
        let v = vocab.len();
        let mut ks = vec![1, v.div_ceil(3), v.div_ceil(2), v];
        ks.dedup();
        for m in Method::ALL {
            for &k in &ks {
                let spec = SelectionSpec {
                    method: m,
                    k,
                    params: params.clone(),
                };
                let mut got: Vec<String> = selection::select(&spec, &stats, &counts)?
                    .into_iter()
                    .map(|f| vocab.word(f).to_string())
                    .collect();
                got.sort();
                let want = reference.select(m, k, &params);
                report.selection_checks += 1;
                if got != want {
                    report
                        .failures
                        .push(format!("corpus {c}: {m} k={k}: {got:?} vs {want:?}"));
                }
            }
        }
    }
    Ok(report)
}

/// Largest relative error between the analytic logistic-regression gradient
/// and central finite differences over `instances` random problems.
pub fn lr_gradient_check(seed: u64, instances: usize) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..instances {
        let rows = rng.random_range(3..30);
        let cols = rng.random_range(1..8);
        let dense: Vec<Vec<f64>> = (0..rows)
            .map(|_| {
                (0..cols)
                    .map(|_| {
                        if rng.random_bool(0.5) {
                            rng.random_range(-2.0..2.0)
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        let x = FeatureMatrix::from_dense(&dense, cols, Weighting::TfIdf)?;
        let y: Vec<Label> = (0..rows).map(|_| rng.random_range(0..2)).collect();
        let params: Vec<f64> = (0..=cols).map(|_| rng.random_range(-1.5..1.5)).collect();
        let l2 = rng.random_range(0.0..2.0);
        let (_, grad) = logistic::objective_and_gradient(&x, &y, &params, l2);
        for j in 0..=cols {
            let h = 1e-5 * params[j].abs().max(1.0);
            let mut p = params.clone();
            p[j] = params[j] + h;
            let up = logistic::objective_and_gradient(&x, &y, &p, l2).0;
            p[j] = params[j] - h;
            let down = logistic::objective_and_gradient(&x, &y, &p, l2).0;
            let fd = (up - down) / (2.0 * h);
            let err = (fd - grad[j]).abs() / fd.abs().max(grad[j].abs()).max(1e-6);
            worst = worst.max(err);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_cdf_known_values() {
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-16);
        assert!((normal_cdf(1.0) - 0.841_344_746_068_542_9).abs() < 1e-14);
        assert!((normal_cdf(-1.959_963_984_540_054) - 0.025).abs() < 1e-14);
        assert!((inverse_normal(0.975) - 1.959_963_984_540_054).abs() < 1e-12);
    }

    #[test]
    fn pearson_basics() {
        assert!((pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]) - 1.0).abs() < 1e-15);
        assert!((pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]) + 1.0).abs() < 1e-15);
        assert_eq!(pearson(&[1.0, 1.0], &[0.0, 5.0]), 0.0);
    }

    #[test]
    fn round12_ties_rounding_noise() {
        assert_eq!(round12(0.1 + 0.2), round12(0.3));
        assert_ne!(round12(1.0), round12(1.0 + 1e-9));
    }

    #[test]
    fn scorers_agree_on_a_few_corpora() {
        let r = check_scorers(7, 10, 1e-10).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
        assert!(r.score_checks > 0 && r.selection_checks > 0);
    }

    #[test]
    fn gradient_check_is_tight() {
        assert!(lr_gradient_check(3, 5).unwrap() < 1e-4);
    }
}
