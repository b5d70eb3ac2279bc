//! Filter feature scoring and top-K selection.
//!
//! Every scorer is a pure function of [`ContingencyStats`] (MRDC also needs
//! per-document [`CountVectors`]). Rankings break score ties by higher
//! document frequency, then by lower vocabulary index; since vocabularies
//! are indexed by descending frequency then word, the last key amounts to
//! lexicographic word order. Scores are compared at 12 significant digits
//! (see [`rank_value`]).
//!
//! The RDC score used by MRDC is `|n_{f,c1} - n_{f,c0}| / max(1, min(n_{f,c1},
//! n_{f,c0}))`, a stand-in for the original relative discriminative
//! criterion, which is defined elsewhere in the literature.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::features::{ContingencyStats, CountVectors, Vocabulary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    OddsRatio,
    ChiSquare,
    Gss,
    Bns,
    CountDifference,
    ImprovedChiSquare,
    Mrdc,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::OddsRatio,
        Method::ChiSquare,
        Method::Gss,
        Method::Bns,
        Method::CountDifference,
        Method::ImprovedChiSquare,
        Method::Mrdc,
    ];

    /// Identifier used in configs, CSV files and dumps.
    pub fn id(self) -> &'static str {
        match self {
            Method::OddsRatio => "OR",
            Method::ChiSquare => "CHI",
            Method::Gss => "GSS",
            Method::Bns => "BNS",
            Method::CountDifference => "CD",
            Method::ImprovedChiSquare => "IMP_CHI",
            Method::Mrdc => "MRDC",
        }
    }

    /// Row label in rendered tables.
    pub fn display_name(self) -> &'static str {
        match self {
            Method::OddsRatio => "OR",
            Method::ChiSquare => "Chi-Sq",
            Method::Gss => "GSS",
            Method::Bns => "BNS",
            Method::CountDifference => "CD",
            Method::ImprovedChiSquare => "Imp Chi-Sq",
            Method::Mrdc => "MRDC",
        }
    }

    /// Whether the method produces a full ranking (as opposed to a
    /// k-dependent subset).
    pub fn is_ranking(self) -> bool {
        !matches!(self, Method::ImprovedChiSquare | Method::Mrdc)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase().replace(['-', ' '], "_");
        Ok(match norm.as_str() {
            "OR" | "ODDS_RATIO" => Method::OddsRatio,
            "CHI" | "CHI_SQ" | "CHI_SQUARE" => Method::ChiSquare,
            "GSS" => Method::Gss,
            "BNS" => Method::Bns,
            "CD" | "COUNT_DIFFERENCE" => Method::CountDifference,
            "IMP_CHI" | "IMP_CHI_SQ" | "IMPROVED_CHI_SQUARE" => Method::ImprovedChiSquare,
            "MRDC" => Method::Mrdc,
            _ => return Err(Error::Config(format!("unknown feature selection method {s:?}"))),
        })
    }
}

/// Which form of the GSS cross product to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GssForm {
    /// `n_{f,c} * n_{f̄,c̄} - n_{f,c̄} * n_{f̄,c}`
    #[default]
    Standard,
    /// `n_{f,c} * n_{f̄,c} - n_{f,c̄} * n_{f̄,c}`, kept for comparison runs.
    AsPrinted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RankKey {
    #[default]
    Signed,
    /// Rank by magnitude; used by odds ratio where both signs discriminate.
    Absolute,
}

pub const DEFAULT_OR_EPSILON: f64 = 0.5;
pub const DEFAULT_MRDC_POOL: usize = 2000;

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionParams {
    pub or_epsilon: f64,
    /// Overrides the BNS rate clamp; `None` uses `1 / (2N)`.
    pub bns_clamp: Option<f64>,
    pub gss_form: GssForm,
    /// MRDC candidate pool; `None` uses `min(|V|, 2000)`.
    pub mrdc_pool: Option<usize>,
}

impl Default for SelectionParams {
    fn default() -> Self {
        SelectionParams {
            or_epsilon: DEFAULT_OR_EPSILON,
            bns_clamp: None,
            gss_form: GssForm::Standard,
            mrdc_pool: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionSpec {
    pub method: Method,
    pub k: usize,
    pub params: SelectionParams,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRanking {
    pub method: Method,
    pub scores: Vec<f64>,
    pub order: Vec<usize>,
    pub rank_key: RankKey,
}

/// A score rounded to 12 significant digits, so that scores which are equal
/// in exact arithmetic compare equal despite rounding in their computation.
pub fn rank_value(score: f64) -> f64 {
    if score == 0.0 || !score.is_finite() {
        return score;
    }
    format!("{score:.11e}").parse().expect("formatted float parses")
}

/// Orders feature indices by score (descending), then document frequency
/// (descending), then index (ascending).
fn rank_order(scores: &[f64], key: RankKey, df: &[usize]) -> Vec<usize> {
    let values: Vec<f64> = scores
        .iter()
        .map(|&s| match key {
            RankKey::Signed => rank_value(s),
            RankKey::Absolute => rank_value(s.abs()),
        })
        .collect();
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        values[b]
            .total_cmp(&values[a])
            .then_with(|| df[b].cmp(&df[a]))
            .then_with(|| a.cmp(&b))
    });
    order
}

fn ranking(method: Method, scores: Vec<f64>, key: RankKey, stats: &ContingencyStats) -> FeatureRanking {
    let order = rank_order(&scores, key, stats.document_frequencies());
    FeatureRanking {
        method,
        scores,
        order,
        rank_key: key,
    }
}

fn require_binary(stats: &ContingencyStats, method: &'static str) -> Result<()> {
    match stats.n_classes() {
        2 => Ok(()),
        classes => Err(Error::UnsupportedClasses { method, classes }),
    }
}

/// Log of the per-class smoothed odds ratio `((A+e)(D+e)) / ((B+e)(C+e))`,
/// grouped so that swapping the classes negates it exactly.
fn log_class_odds(stats: &ContingencyStats, f: usize, k: usize, eps: f64) -> f64 {
    let a = stats.n_f_c(f, k) as f64 + eps;
    let b = stats.n_f_not_c(f, k) as f64 + eps;
    let c = stats.n_not_f_c(f, k) as f64 + eps;
    let d = stats.n_not_f_not_c(f, k) as f64 + eps;
    (a.ln() + d.ln()) - (b.ln() + c.ln())
}

/// Log ratio of the positive-class odds to the negative-class odds. Positive
/// scores indicate the positive class; ranking uses the magnitude.
pub fn score_odds_ratio(stats: &ContingencyStats, eps: f64) -> Result<FeatureRanking> {
    require_binary(stats, "odds ratio")?;
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "odds ratio smoothing must be positive, got {eps}"
        )));
    }
    let scores = (0..stats.n_features())
        .map(|f| 2.0 * log_class_odds(stats, f, 1, eps))
        .collect();
    Ok(ranking(Method::OddsRatio, scores, RankKey::Absolute, stats))
}

/// Chi-square statistic of the 2x2 presence/class table for class `k`; 0
/// when any marginal is empty.
pub fn chi_square_class(stats: &ContingencyStats, f: usize, k: usize) -> f64 {
    let a = stats.n_f_c(f, k) as f64;
    let b = stats.n_f_not_c(f, k) as f64;
    let c = stats.n_not_f_c(f, k) as f64;
    let d = stats.n_not_f_not_c(f, k) as f64;
    let denom = (a + b) * (c + d) * (a + c) * (b + d);
    if denom == 0.0 {
        return 0.0;
    }
    let cross = a * d - b * c;
    stats.n_docs() as f64 * cross * cross / denom
}

/// Class-prior weighted chi-square.
pub fn chi_square(stats: &ContingencyStats, f: usize) -> f64 {
    let n = stats.n_docs() as f64;
    (0..stats.n_classes())
        .map(|k| stats.n_c(k) as f64 / n * chi_square_class(stats, f, k))
        .sum()
}

pub fn score_chi_square(stats: &ContingencyStats) -> FeatureRanking {
    let scores = (0..stats.n_features()).map(|f| chi_square(stats, f)).collect();
    ranking(Method::ChiSquare, scores, RankKey::Signed, stats)
}

pub fn gss_class(stats: &ContingencyStats, f: usize, k: usize, form: GssForm) -> f64 {
    let a = stats.n_f_c(f, k) as f64;
    let b = stats.n_f_not_c(f, k) as f64;
    let c = stats.n_not_f_c(f, k) as f64;
    let d = stats.n_not_f_not_c(f, k) as f64;
    match form {
        GssForm::Standard => a * d - b * c,
        GssForm::AsPrinted => a * c - b * c,
    }
}

pub fn score_gss(stats: &ContingencyStats, form: GssForm) -> FeatureRanking {
    let scores = (0..stats.n_features())
        .map(|f| {
            (0..stats.n_classes())
                .map(|k| gss_class(stats, f, k, form))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    ranking(Method::Gss, scores, RankKey::Signed, stats)
}

/// Standard normal quantile function.
pub fn normal_quantile(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}

/// Bi-normal separation with rates clamped to `[clamp, 1 - clamp]`
/// (default clamp `1 / (2N)`).
pub fn score_bns(stats: &ContingencyStats, clamp: Option<f64>) -> Result<FeatureRanking> {
    let n = stats.n_docs();
    for k in 0..stats.n_classes() {
        if stats.n_c(k) == 0 || stats.n_not_c(k) == 0 {
            return Err(Error::InvalidParameter(
                "BNS requires every class to be non-empty".into(),
            ));
        }
    }
    let delta = clamp.unwrap_or(1.0 / (2.0 * n as f64));
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "BNS clamp must lie in (0, 0.5), got {delta}"
        )));
    }
    let clamp_rate = |r: f64| r.clamp(delta, 1.0 - delta);
    let scores = (0..stats.n_features())
        .map(|f| {
            (0..stats.n_classes())
                .map(|k| {
                    let tpr = clamp_rate(stats.n_f_c(f, k) as f64 / stats.n_c(k) as f64);
                    let fpr = clamp_rate(stats.n_f_not_c(f, k) as f64 / stats.n_not_c(k) as f64);
                    stats.n_c(k) as f64 / n as f64 * (normal_quantile(tpr) - normal_quantile(fpr)).abs()
                })
                .sum()
        })
        .collect();
    Ok(ranking(Method::Bns, scores, RankKey::Signed, stats))
}

/// `|n_{f,c1} - n_{f,c0}| / n_f`, in `[0, 1]`.
pub fn score_count_difference(stats: &ContingencyStats) -> Result<FeatureRanking> {
    require_binary(stats, "count difference")?;
    let scores = (0..stats.n_features())
        .map(|f| {
            let nf = stats.n_f(f);
            if nf == 0 {
                return 0.0;
            }
            (stats.n_f_c(f, 1) as f64 - stats.n_f_c(f, 0) as f64).abs() / nf as f64
        })
        .collect();
    Ok(ranking(Method::CountDifference, scores, RankKey::Signed, stats))
}

/// Relative discriminative criterion of one feature.
pub fn rdc(stats: &ContingencyStats, f: usize) -> Result<f64> {
    require_binary(stats, "RDC")?;
    Ok(rdc_unchecked(stats, f))
}

fn rdc_unchecked(stats: &ContingencyStats, f: usize) -> f64 {
    let (pos, neg) = (stats.n_f_c(f, 1), stats.n_f_c(f, 0));
    pos.abs_diff(neg) as f64 / pos.min(neg).max(1) as f64
}

/// Scores every feature with a ranking method. Subset methods
/// (improved chi-square, MRDC) have no standalone ranking.
pub fn score(method: Method, stats: &ContingencyStats, params: &SelectionParams) -> Result<FeatureRanking> {
    match method {
        Method::OddsRatio => score_odds_ratio(stats, params.or_epsilon),
        Method::ChiSquare => Ok(score_chi_square(stats)),
        Method::Gss => Ok(score_gss(stats, params.gss_form)),
        Method::Bns => score_bns(stats, params.bns_clamp),
        Method::CountDifference => score_count_difference(stats),
        Method::ImprovedChiSquare | Method::Mrdc => Err(Error::InvalidParameter(format!(
            "{method} selects subsets and has no standalone ranking"
        ))),
    }
}

fn check_k(k: usize, n_features: usize) -> Result<()> {
    if k == 0 || k > n_features {
        return Err(Error::InvalidParameter(format!(
            "k must lie in 1..={n_features}, got {k}"
        )));
    }
    Ok(())
}

/// The first `k` features of the ranking, returned in ascending index order.
pub fn select_top_k(ranking: &FeatureRanking, k: usize) -> Result<Vec<usize>> {
    check_k(k, ranking.order.len())?;
    let mut chosen = ranking.order[..k].to_vec();
    chosen.sort_unstable();
    Ok(chosen)
}

/// Improved chi-square as (feature, score) pairs in selection order.
///
/// Each class gets a quota of `ceil(k / C)` features, drawn from the
/// features positively associated with it and ranked by that class's
/// chi-square. Shortfalls are filled from the global ranking; a surplus is
/// trimmed by global rank.
pub fn improved_chi_square_order(stats: &ContingencyStats, k: usize) -> Result<Vec<(usize, f64)>> {
    let n_features = stats.n_features();
    check_k(k, n_features)?;
    let classes = stats.n_classes();
    let df = stats.document_frequencies();
    let global = score_chi_square(stats);
    let mut global_pos = vec![0usize; n_features];
    for (pos, &f) in global.order.iter().enumerate() {
        global_pos[f] = pos;
    }
    let quota = k.div_ceil(classes);
    let mut chosen = vec![false; n_features];
    let mut picked: Vec<usize> = Vec::new();
    for c in 0..classes {
        // n_{f,c} / n_c > n_{f,c̄} / n_c̄, cross-multiplied to stay in integers
        let associated: Vec<usize> = (0..n_features)
            .filter(|&f| stats.n_f_c(f, c) * stats.n_not_c(c) > stats.n_f_not_c(f, c) * stats.n_c(c))
            .collect();
        let class_scores: Vec<f64> = associated
            .iter()
            .map(|&f| rank_value(chi_square_class(stats, f, c)))
            .collect();
        let mut order: Vec<usize> = (0..associated.len()).collect();
        order.sort_by(|&a, &b| {
            class_scores[b]
                .total_cmp(&class_scores[a])
                .then_with(|| df[associated[b]].cmp(&df[associated[a]]))
                .then_with(|| associated[a].cmp(&associated[b]))
        });
        for &i in order.iter().take(quota) {
            let f = associated[i];
            if !chosen[f] {
                chosen[f] = true;
                picked.push(f);
            }
        }
    }
    if picked.len() > k {
        picked.sort_by_key(|&f| global_pos[f]);
        for &f in &picked[k..] {
            chosen[f] = false;
        }
        picked.truncate(k);
    }
    for &f in &global.order {
        if picked.len() >= k {
            break;
        }
        if !chosen[f] {
            chosen[f] = true;
            picked.push(f);
        }
    }
    Ok(picked.into_iter().map(|f| (f, global.scores[f])).collect())
}

pub fn select_improved_chi_square(stats: &ContingencyStats, k: usize) -> Result<Vec<usize>> {
    let mut set: Vec<usize> = improved_chi_square_order(stats, k)?
        .into_iter()
        .map(|(f, _)| f)
        .collect();
    set.sort_unstable();
    Ok(set)
}

/// Sufficient statistics of one count vector for Pearson correlation.
#[derive(Debug, Clone, Copy)]
struct Moments {
    sum: i128,
    /// `N * sum(x^2) - sum(x)^2`, i.e. N^2 times the population variance.
    scaled_var: i128,
}

fn moments(v: &[(usize, u32)], n: i128) -> Moments {
    let sum: i128 = v.iter().map(|&(_, c)| c as i128).sum();
    let sumsq: i128 = v.iter().map(|&(_, c)| (c as i128) * (c as i128)).sum();
    Moments {
        sum,
        scaled_var: n * sumsq - sum * sum,
    }
}

/// Absolute Pearson correlation between two count vectors given the dense
/// form of the second. Zero-variance vectors correlate 0 with everything.
fn abs_correlation(x: &[(usize, u32)], mx: Moments, y_dense: &[u32], my: Moments, n: i128) -> f64 {
    if mx.scaled_var == 0 || my.scaled_var == 0 {
        return 0.0;
    }
    let sxy: i128 = x.iter().map(|&(d, c)| c as i128 * y_dense[d] as i128).sum();
    let scaled_cov = n * sxy - mx.sum * my.sum;
    (scaled_cov as f64).abs() / ((mx.scaled_var as f64) * (my.scaled_var as f64)).sqrt()
}

/// Absolute Pearson correlation of two features' count vectors.
pub fn count_correlation(counts: &CountVectors, i: usize, j: usize) -> f64 {
    let n = counts.n_docs() as i128;
    let (xi, xj) = (counts.vector(i), counts.vector(j));
    abs_correlation(xi, moments(xi, n), &counts.dense(j), moments(xj, n), n)
}

/// `a > b` beyond rounding noise.
pub(crate) fn clearly_greater(a: f64, b: f64) -> bool {
    a - b > 1e-12 * a.abs().max(b.abs()).max(1.0)
}

pub fn default_mrdc_pool(n_features: usize) -> usize {
    n_features.min(DEFAULT_MRDC_POOL)
}

/// Greedy MRDC selection as (feature, marginal score) pairs in the order
/// features were added.
pub fn mrdc_order(stats: &ContingencyStats, counts: &CountVectors, k: usize, pool: usize) -> Result<Vec<(usize, f64)>> {
    require_binary(stats, "MRDC")?;
    let n_features = stats.n_features();
    if counts.n_features() != n_features || counts.n_docs() != stats.n_docs() {
        return Err(Error::Dimension {
            expected: n_features,
            got: counts.n_features(),
        });
    }
    check_k(k, n_features)?;
    let pool = pool.min(n_features);
    if k > pool {
        return Err(Error::InvalidParameter(format!(
            "MRDC needs k <= candidate pool, got k={k}, pool={pool}"
        )));
    }
    let rdc_scores: Vec<f64> = (0..n_features).map(|f| rdc_unchecked(stats, f)).collect();
    let candidates: Vec<usize> = rank_order(&rdc_scores, RankKey::Signed, stats.document_frequencies())
        .into_iter()
        .take(pool)
        .collect();
    let n = counts.n_docs() as i128;
    let cand_moments: Vec<Moments> = candidates.iter().map(|&f| moments(counts.vector(f), n)).collect();

    let mut penalty = vec![0.0f64; candidates.len()];
    let mut taken = vec![false; candidates.len()];
    let mut selected = Vec::with_capacity(k);
    let mut dense = vec![0u32; counts.n_docs()];
    let mut last = 0usize;
    taken[0] = true;
    selected.push((candidates[0], rdc_scores[candidates[0]]));

    while selected.len() < k {
        for &(d, c) in counts.vector(candidates[last]) {
            dense[d] = c;
        }
        let mut best: Option<(usize, f64)> = None;
        for (i, &f) in candidates.iter().enumerate() {
            if taken[i] {
                continue;
            }
            penalty[i] += abs_correlation(counts.vector(f), cand_moments[i], &dense, cand_moments[last], n);
            let value = rdc_scores[f] - penalty[i];
            if best.is_none_or(|(_, v)| clearly_greater(value, v)) {
                best = Some((i, value));
            }
        }
        for &(d, _) in counts.vector(candidates[last]) {
            dense[d] = 0;
        }
        let (i, value) = best.expect("pool holds at least k candidates");
        taken[i] = true;
        selected.push((candidates[i], value));
        last = i;
    }
    Ok(selected)
}

pub fn select_mrdc(stats: &ContingencyStats, counts: &CountVectors, k: usize, pool: usize) -> Result<Vec<usize>> {
    let mut set: Vec<usize> = mrdc_order(stats, counts, k, pool)?
        .into_iter()
        .map(|(f, _)| f)
        .collect();
    set.sort_unstable();
    Ok(set)
}

/// Runs any method and returns the selected feature indices in ascending
/// order. For MRDC the candidate pool is widened to `k` when needed.
pub fn select(spec: &SelectionSpec, stats: &ContingencyStats, counts: &CountVectors) -> Result<Vec<usize>> {
    match spec.method {
        Method::ImprovedChiSquare => select_improved_chi_square(stats, spec.k),
        Method::Mrdc => {
            let pool = spec
                .params
                .mrdc_pool
                .unwrap_or_else(|| default_mrdc_pool(stats.n_features()))
                .max(spec.k);
            select_mrdc(stats, counts, spec.k, pool)
        }
        m => select_top_k(&score(m, stats, &spec.params)?, spec.k),
    }
}

/// Writes a `rank<TAB>word<TAB>score` listing preceded by a `#` header line.
pub fn write_ranking<W: Write>(
    mut out: W,
    method: Method,
    header_params: &str,
    entries: &[(usize, f64)],
    vocab: &Vocabulary,
) -> Result<()> {
    writeln!(out, "# method={method} {header_params}")?;
    for (rank, &(f, s)) in entries.iter().enumerate() {
        writeln!(out, "{}\t{}\t{s:?}", rank + 1, vocab.word(f))?;
    }
    Ok(())
}

/// Ranked (feature, score) entries for any method; subset methods report
/// their selection order for `k`.
pub fn ranked_entries(
    method: Method,
    stats: &ContingencyStats,
    counts: &CountVectors,
    k: usize,
    params: &SelectionParams,
) -> Result<Vec<(usize, f64)>> {
    match method {
        Method::ImprovedChiSquare => improved_chi_square_order(stats, k),
        Method::Mrdc => {
            let pool = params
                .mrdc_pool
                .unwrap_or_else(|| default_mrdc_pool(stats.n_features()))
                .max(k);
            mrdc_order(stats, counts, k, pool)
        }
        m => {
            check_k(k, stats.n_features())?;
            let r = score(m, stats, params)?;
            Ok(r.order.iter().take(k).map(|&f| (f, r.scores[f])).collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Stats for binary tables given as (n_{f,c0}, n_{f,c1}) per feature.
    fn stats(class_counts: [usize; 2], features: &[(usize, usize)]) -> ContingencyStats {
        ContingencyStats::from_counts(
            class_counts.to_vec(),
            features.iter().map(|&(n0, n1)| vec![n0, n1]).collect(),
        )
        .unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn odds_ratio_examples() {
        let s = stats([2, 2], &[(0, 2), (1, 1), (2, 0)]);
        let r = score_odds_ratio(&s, 0.5).unwrap();
        assert!(close(r.scores[0], 625f64.ln(), 1e-12));
        assert!(close(r.scores[0], 6.438, 1e-3));
        assert_eq!(r.scores[1], 0.0);
        assert!(close(r.scores[2], -625f64.ln(), 1e-12));
        assert!(r.scores[0] > 0.0);
        // ranked by magnitude: the neutral feature is last
        assert_eq!(*r.order.last().unwrap(), 1);
        let three = ContingencyStats::from_counts(vec![2, 2, 2], vec![vec![1, 1, 1]]).unwrap();
        assert!(matches!(
            score_odds_ratio(&three, 0.5),
            Err(Error::UnsupportedClasses { classes: 3, .. })
        ));
    }

    #[test]
    fn chi_square_examples() {
        let s = stats([2, 2], &[(0, 2), (1, 1), (2, 2)]);
        let r = score_chi_square(&s);
        assert!(close(r.scores[0], 4.0, 1e-12));
        assert_eq!(r.scores[1], 0.0);
        assert_eq!(r.scores[2], 0.0);
    }

    #[test]
    fn gss_examples() {
        let s = stats([2, 2], &[(0, 2), (1, 1)]);
        let r = score_gss(&s, GssForm::Standard);
        assert_eq!(r.scores[0], 4.0);
        assert_eq!(r.scores[1], 0.0);
        // (n_{f,c1}, n_{f,c0}) = (2, 0): A=2,B=0,C=0,D=2 for c1; printed form A*C - B*C = 0
        let p = score_gss(&s, GssForm::AsPrinted);
        assert_eq!(p.scores[0], 0.0);
        let swapped = stats([2, 2], &[(2, 0), (1, 1)]);
        assert_eq!(score_gss(&swapped, GssForm::Standard).scores, r.scores);
    }

    #[test]
    fn bns_examples() {
        let s = stats([10, 10], &[(5, 5), (3, 3)]);
        let r = score_bns(&s, None).unwrap();
        assert_eq!(r.scores[0], 0.0);
        assert_eq!(r.scores[1], 0.0);
        // rates 0.8413 and 0.5 with no clamping in play
        let s = stats([10000, 10000], &[(5000, 8413)]);
        let r = score_bns(&s, None).unwrap();
        assert!(close(r.scores[0], 1.0, 1e-3));
        // clamped: a single-class feature stays finite
        let s = stats([5, 5], &[(0, 5)]);
        let r = score_bns(&s, None).unwrap();
        assert!(r.scores[0].is_finite());
        let q = normal_quantile(1.0 - 1.0 / 20.0);
        assert!(close(r.scores[0], 2.0 * q, 1e-12));
    }

    #[test]
    fn normal_quantile_matches_bisection() {
        // independent route: bisection on a Simpson-integrated density
        fn cdf(x: f64) -> f64 {
            let steps = 20_000;
            let (a, b) = (-12.0, x);
            let h = (b - a) / steps as f64;
            let pdf = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
            let mut s = pdf(a) + pdf(b);
            for i in 1..steps {
                let t = a + i as f64 * h;
                s += if i % 2 == 1 { 4.0 } else { 2.0 } * pdf(t);
            }
            s * h / 3.0
        }
        for p in [0.01, 0.1, 0.3, 0.5, 0.8413, 0.95, 0.999] {
            let (mut lo, mut hi) = (-10.0, 10.0);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if cdf(mid) < p {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            assert!(close(normal_quantile(p), 0.5 * (lo + hi), 1e-8), "p={p}");
        }
    }

    #[test]
    fn count_difference_examples() {
        let s = stats([5, 5], &[(1, 3), (2, 2), (0, 4)]);
        let r = score_count_difference(&s).unwrap();
        assert_eq!(r.scores, vec![0.5, 0.0, 1.0]);
    }

    #[test]
    fn rdc_examples() {
        let s = stats([10, 10], &[(2, 6), (3, 3), (0, 6)]);
        assert_eq!(rdc(&s, 0).unwrap(), 2.0);
        assert_eq!(rdc(&s, 1).unwrap(), 0.0);
        assert_eq!(rdc(&s, 2).unwrap(), 6.0);
    }

    #[test]
    fn top_k_examples() {
        let s = stats([10, 10], &[(1, 1), (1, 1), (1, 1)]);
        let r = ranking(Method::ChiSquare, vec![3.0, 1.0, 2.0], RankKey::Signed, &s);
        assert_eq!(select_top_k(&r, 2).unwrap(), vec![0, 2]);
        assert_eq!(select_top_k(&r, 3).unwrap(), vec![0, 1, 2]);
        assert!(select_top_k(&r, 0).is_err());
        assert!(select_top_k(&r, 4).is_err());
        // equal scores: higher document frequency wins
        let s = stats([10, 10], &[(2, 3), (4, 5)]);
        let r = ranking(Method::ChiSquare, vec![1.0, 1.0], RankKey::Signed, &s);
        assert_eq!(r.order, vec![1, 0]);
        assert_eq!(select_top_k(&r, 1).unwrap(), vec![1]);
    }

    #[test]
    fn improved_chi_square_quota() {
        // feature 0 aligned with positive, feature 1 with negative; feature 2 is
        // weakly positive but has a higher global score than feature 1
        let s = stats([10, 10], &[(0, 10), (6, 0), (0, 9)]);
        let global = score_chi_square(&s);
        assert!(global.scores[2] > global.scores[1]);
        assert_eq!(select_top_k(&global, 2).unwrap(), vec![0, 2]);
        assert_eq!(select_improved_chi_square(&s, 2).unwrap(), vec![0, 1]);
        assert_eq!(select_improved_chi_square(&s, 3).unwrap(), vec![0, 1, 2]);
        // k = 1: quota ceil(1/2) = 1 per class, trimmed by global rank
        assert_eq!(select_improved_chi_square(&s, 1).unwrap(), vec![0]);
    }

    #[test]
    fn improved_chi_square_fills_from_global() {
        // no feature is associated with the negative class
        let s = stats([10, 10], &[(0, 8), (1, 1), (2, 2), (0, 5)]);
        let sel = select_improved_chi_square(&s, 4).unwrap();
        assert_eq!(sel, vec![0, 1, 2, 3]);
        let sel = select_improved_chi_square(&s, 3).unwrap();
        assert_eq!(sel.len(), 3);
        assert!(sel.contains(&0) && sel.contains(&3));
    }

    #[test]
    fn mrdc_prefers_uncorrelated() {
        // features 0 and 1 are duplicates, feature 2 uncorrelated with both
        let counts = CountVectors::from_dense(&[
            vec![1, 1, 1, 0, 1, 0, 0, 0],
            vec![1, 1, 1, 0, 1, 0, 0, 0],
            vec![0, 1, 0, 1, 0, 0, 0, 0],
        ])
        .unwrap();
        let labels = [1u8, 1, 1, 1, 0, 0, 0, 0];
        let df_class: Vec<Vec<usize>> = (0..3)
            .map(|f| {
                let v = counts.dense(f);
                let mut row = vec![0, 0];
                for (d, &c) in v.iter().enumerate() {
                    if c > 0 {
                        row[labels[d] as usize] += 1;
                    }
                }
                row
            })
            .collect();
        let s = ContingencyStats::from_counts(vec![4, 4], df_class).unwrap();
        assert_eq!(rdc(&s, 0).unwrap(), 2.0);
        assert_eq!(rdc(&s, 2).unwrap(), 2.0);
        assert!(close(count_correlation(&counts, 0, 1), 1.0, 1e-12));
        assert!(close(count_correlation(&counts, 0, 2), 0.0, 1e-12));
        let sel = select_mrdc(&s, &counts, 2, 3).unwrap();
        assert_eq!(sel, vec![0, 2]);
        assert_eq!(select_mrdc(&s, &counts, 1, 3).unwrap(), vec![0]);
        assert!(select_mrdc(&s, &counts, 3, 2).is_err());
    }

    #[test]
    fn mrdc_without_correlation_is_rdc_top_k() {
        // disjoint single-document features have tiny negative correlation;
        // use constant vectors instead, which contribute zero.
        let counts = CountVectors::from_dense(&[vec![1, 1, 1, 1], vec![2, 2, 2, 2], vec![1, 1, 1, 1]]).unwrap();
        let s = ContingencyStats::from_counts(vec![2, 2], vec![vec![2, 2]; 3]).unwrap();
        let r = ranking(
            Method::Mrdc,
            (0..3).map(|f| rdc(&s, f).unwrap()).collect(),
            RankKey::Signed,
            &s,
        );
        for k in 1..=3 {
            assert_eq!(select_mrdc(&s, &counts, k, 3).unwrap(), select_top_k(&r, k).unwrap());
        }
    }

    #[test]
    fn self_correlation_is_one() {
        let counts = CountVectors::from_dense(&[vec![0, 3, 1, 0, 2]]).unwrap();
        assert!(close(count_correlation(&counts, 0, 0), 1.0, 1e-12));
    }

    #[test]
    fn method_parsing() {
        for m in Method::ALL {
            assert_eq!(m.id().parse::<Method>().unwrap(), m);
        }
        assert_eq!("chi-sq".parse::<Method>().unwrap(), Method::ChiSquare);
        assert!("IG".parse::<Method>().is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_stats() -> impl Strategy<Value = ContingencyStats> {
            (1usize..40, 1usize..40).prop_flat_map(|(n0, n1)| {
                prop::collection::vec((0..=n0, 0..=n1), 1..30).prop_map(move |rows| {
                    ContingencyStats::from_counts(vec![n0, n1], rows.into_iter().map(|(a, b)| vec![a, b]).collect())
                        .unwrap()
                })
            })
        }

        fn swapped(s: &ContingencyStats) -> ContingencyStats {
            ContingencyStats::from_counts(
                vec![s.n_c(1), s.n_c(0)],
                (0..s.n_features())
                    .map(|f| vec![s.n_f_c(f, 1), s.n_f_c(f, 0)])
                    .collect(),
            )
            .unwrap()
        }

        fn doubled(s: &ContingencyStats) -> ContingencyStats {
            ContingencyStats::from_counts(
                vec![2 * s.n_c(0), 2 * s.n_c(1)],
                (0..s.n_features())
                    .map(|f| vec![2 * s.n_f_c(f, 0), 2 * s.n_f_c(f, 1)])
                    .collect(),
            )
            .unwrap()
        }

        proptest! {
            #[test]
            fn score_ranges(s in arb_stats()) {
                for v in score_chi_square(&s).scores { prop_assert!(v >= 0.0 && v.is_finite()); }
                for v in score_count_difference(&s).unwrap().scores { prop_assert!((0.0..=1.0).contains(&v)); }
                for v in score_bns(&s, None).unwrap().scores { prop_assert!(v.is_finite() && v >= 0.0); }
                for v in score_odds_ratio(&s, 0.5).unwrap().scores { prop_assert!(v.is_finite()); }
            }

            #[test]
            fn class_swap_invariance(s in arb_stats()) {
                let t = swapped(&s);
                let tol = 1e-9;
                for (a, b) in score_chi_square(&s).scores.iter().zip(score_chi_square(&t).scores) { prop_assert!((a - b).abs() <= tol); }
                for (a, b) in score_gss(&s, GssForm::Standard).scores.iter().zip(score_gss(&t, GssForm::Standard).scores) { prop_assert!((a - b).abs() <= tol); }
                for (a, b) in score_bns(&s, None).unwrap().scores.iter().zip(score_bns(&t, None).unwrap().scores) { prop_assert!((a - b).abs() <= tol); }
                for (a, b) in score_count_difference(&s).unwrap().scores.iter().zip(score_count_difference(&t).unwrap().scores) { prop_assert!((a - b).abs() <= tol); }
                let or_s = score_odds_ratio(&s, 0.5).unwrap();
                let or_t = score_odds_ratio(&t, 0.5).unwrap();
                for (a, b) in or_s.scores.iter().zip(&or_t.scores) { prop_assert!((a + b).abs() <= tol); }
                prop_assert_eq!(or_s.order, or_t.order);
            }

            #[test]
            fn duplication_invariance(s in arb_stats()) {
                let d = doubled(&s);
                prop_assert_eq!(score_count_difference(&s).unwrap().scores, score_count_difference(&d).unwrap().scores);
                // odds ratio is scale-free once the smoothing constant scales with the counts
                let or_s = score_odds_ratio(&s, 0.5).unwrap();
                let or_d = score_odds_ratio(&d, 1.0).unwrap();
                for (a, b) in or_s.scores.iter().zip(&or_d.scores) { prop_assert!((a - b).abs() <= 1e-9); }
                // equal up to exact rational ties, which rounding may order either way
                for w in or_d.order.windows(2) {
                    prop_assert!(or_s.scores[w[0]].abs() >= or_s.scores[w[1]].abs() - 1e-9);
                }
                prop_assert_eq!(score_chi_square(&s).order, score_chi_square(&d).order);
                for (a, b) in score_chi_square(&s).scores.iter().zip(score_chi_square(&d).scores) {
                    prop_assert!((2.0 * a - b).abs() <= 1e-9 * b.abs().max(1.0));
                }
            }

            #[test]
            fn selections_have_k_distinct_features(s in arb_stats(), frac in 0.0f64..1.0) {
                let k = 1 + ((s.n_features() - 1) as f64 * frac) as usize;
                let sel = select_improved_chi_square(&s, k).unwrap();
                prop_assert_eq!(sel.len(), k);
                prop_assert!(sel.windows(2).all(|w| w[0] < w[1]));
                prop_assert_eq!(select_improved_chi_square(&s, s.n_features()).unwrap(), (0..s.n_features()).collect::<Vec<_>>());
            }
        }
    }
}
