//! Multinomial and Bernoulli naive Bayes with Laplace smoothing.

use crate::corpus::Label;
use crate::features::FeatureMatrix;

use super::ModelParams;

fn log_priors(y: &[Label]) -> ([f64; 2], [f64; 2]) {
    let mut n = [0.0f64; 2];
    for &l in y {
        n[l as usize] += 1.0;
    }
    let total = y.len() as f64;
    ([(n[0] / total).ln(), (n[1] / total).ln()], n)
}

/// Event counts are the matrix values themselves, so a binary matrix gives
/// presence counts and a count matrix gives term frequencies.
pub fn train_multinomial(x: &FeatureMatrix, y: &[Label], alpha: f64) -> ModelParams {
    let d = x.cols();
    let mut counts = [vec![0.0; d], vec![0.0; d]];
    for (i, &label) in y.iter().enumerate() {
        let (idx, vals) = x.row(i);
        for (&j, &v) in idx.iter().zip(vals) {
            counts[label as usize][j] += v;
        }
    }
    let (log_prior, _) = log_priors(y);
    let log_likelihood = counts.map(|c| {
        let total: f64 = c.iter().sum();
        let denom = (total + alpha * d as f64).ln();
        c.iter().map(|&n| (n + alpha).ln() - denom).collect()
    });
    ModelParams::Multinomial {
        log_prior,
        log_likelihood,
    }
}

/// Any nonzero value counts as presence.
pub fn train_bernoulli(x: &FeatureMatrix, y: &[Label], alpha: f64) -> ModelParams {
    let d = x.cols();
    let mut present = [vec![0.0; d], vec![0.0; d]];
    for (i, &label) in y.iter().enumerate() {
        let (idx, vals) = x.row(i);
        for (&j, &v) in idx.iter().zip(vals) {
            if v != 0.0 {
                present[label as usize][j] += 1.0;
            }
        }
    }
    let (log_prior, n) = log_priors(y);
    let mut log_p = [Vec::new(), Vec::new()];
    let mut log_not_p = [Vec::new(), Vec::new()];
    for c in 0..2 {
        let denom = n[c] + 2.0 * alpha;
        log_p[c] = present[c].iter().map(|&k| ((k + alpha) / denom).ln()).collect();
        log_not_p[c] = present[c].iter().map(|&k| ((n[c] - k + alpha) / denom).ln()).collect();
    }
    ModelParams::Bernoulli {
        log_prior,
        log_p,
        log_not_p,
    }
}

fn argmax(scores: [f64; 2]) -> Label {
    if scores[1] >= scores[0] {
        1
    } else {
        0
    }
}

pub fn joint_log_multinomial(
    log_prior: &[f64; 2],
    log_likelihood: &[Vec<f64>; 2],
    x: &FeatureMatrix,
    i: usize,
) -> [f64; 2] {
    let (idx, vals) = x.row(i);
    [0, 1].map(|c| {
        log_prior[c]
            + idx
                .iter()
                .zip(vals)
                .map(|(&j, &v)| v * log_likelihood[c][j])
                .sum::<f64>()
    })
}

pub fn joint_log_bernoulli(
    log_prior: &[f64; 2],
    log_p: &[Vec<f64>; 2],
    log_not_p: &[Vec<f64>; 2],
    x: &FeatureMatrix,
    i: usize,
) -> [f64; 2] {
    let (idx, vals) = x.row(i);
    [0, 1].map(|c| {
        let absent: f64 = log_not_p[c].iter().sum();
        let swap: f64 = idx
            .iter()
            .zip(vals)
            .filter(|(_, &v)| v != 0.0)
            .map(|(&j, _)| log_p[c][j] - log_not_p[c][j])
            .sum();
        log_prior[c] + absent + swap
    })
}

pub fn predict_multinomial(log_prior: &[f64; 2], log_likelihood: &[Vec<f64>; 2], x: &FeatureMatrix, i: usize) -> Label {
    argmax(joint_log_multinomial(log_prior, log_likelihood, x, i))
}

pub fn predict_bernoulli(
    log_prior: &[f64; 2],
    log_p: &[Vec<f64>; 2],
    log_not_p: &[Vec<f64>; 2],
    x: &FeatureMatrix,
    i: usize,
) -> Label {
    argmax(joint_log_bernoulli(log_prior, log_p, log_not_p, x, i))
}
