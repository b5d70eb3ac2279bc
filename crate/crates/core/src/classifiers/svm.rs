//! Soft-margin support vector machines, linear and RBF, both trained on the
//! dual by [`smo::solve`].

use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

use super::smo::{self, KernelKind, KernelMatrix, Solution};
use super::{Gamma, ModelParams, TrainConfig};

fn signed(y: &[Label]) -> Vec<f64> {
    y.iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect()
}

/// `1 / sum_j Var(x_j)` over the columns of `x`, or 1 when every column is
/// constant.
pub fn scale_gamma(x: &FeatureMatrix) -> f64 {
    let m = x.rows() as f64;
    let mut sum = vec![0.0; x.cols()];
    let mut sq = vec![0.0; x.cols()];
    for i in 0..x.rows() {
        let (idx, vals) = x.row(i);
        for (&j, &v) in idx.iter().zip(vals) {
            sum[j] += v;
            sq[j] += v * v;
        }
    }
    let total: f64 = sum
        .iter()
        .zip(&sq)
        .map(|(s, q)| (q / m - (s / m) * (s / m)).max(0.0))
        .sum();
    if total > 0.0 {
        1.0 / total
    } else {
        1.0
    }
}

pub fn resolve_gamma(x: &FeatureMatrix, gamma: Gamma) -> f64 {
    match gamma {
        Gamma::Scale => scale_gamma(x),
        Gamma::Value(g) => g,
    }
}

/// Runs the dual solver and returns its raw solution.
pub fn fit_dual(x: &FeatureMatrix, y: &[Label], kernel: KernelKind, cfg: &TrainConfig) -> Solution {
    let ys = signed(y);
    let mut k = KernelMatrix::new(x, kernel);
    smo::solve(&mut k, &ys, cfg.svm_c, cfg.svm_tolerance, cfg.svm_max_iter)
}

pub fn train_linear(x: &FeatureMatrix, y: &[Label], cfg: &TrainConfig) -> Result<ModelParams> {
    let sol = fit_dual(x, y, KernelKind::Linear, cfg);
    let mut weights = vec![0.0; x.cols()];
    for (i, (&a, &label)) in sol.alpha.iter().zip(y).enumerate() {
        if a == 0.0 {
            continue;
        }
        let c = if label == 1 { a } else { -a };
        let (idx, vals) = x.row(i);
        for (&j, &v) in idx.iter().zip(vals) {
            weights[j] += c * v;
        }
    }
    Ok(ModelParams::LinearSvm {
        weights,
        bias: -sol.rho,
    })
}

pub fn train_rbf(x: &FeatureMatrix, y: &[Label], cfg: &TrainConfig) -> Result<ModelParams> {
    if x.rows() > cfg.rbf_max_rows {
        return Err(Error::KernelCap {
            cap: cfg.rbf_max_rows,
            rows: x.rows(),
        });
    }
    let gamma = resolve_gamma(x, cfg.rbf_gamma);
    let sol = fit_dual(x, y, KernelKind::Rbf { gamma }, cfg);
    let keep: Vec<usize> = (0..x.rows()).filter(|&i| sol.alpha[i] > 0.0).collect();
    let coef = keep
        .iter()
        .map(|&i| if y[i] == 1 { sol.alpha[i] } else { -sol.alpha[i] })
        .collect();
    Ok(ModelParams::RbfSvm {
        gamma,
        bias: -sol.rho,
        coef,
        support: x.select_rows(&keep),
    })
}

fn sparse_dot(a: (&[usize], &[f64]), b: (&[usize], &[f64])) -> f64 {
    let (mut p, mut q, mut acc) = (0, 0, 0.0);
    while p < a.0.len() && q < b.0.len() {
        match a.0[p].cmp(&b.0[q]) {
            std::cmp::Ordering::Less => p += 1,
            std::cmp::Ordering::Greater => q += 1,
            std::cmp::Ordering::Equal => {
                acc += a.1[p] * b.1[q];
                p += 1;
                q += 1;
            }
        }
    }
    acc
}

/// `sum_s coef_s K(support_s, x_i) + bias`.
pub fn rbf_decision(support: &FeatureMatrix, coef: &[f64], gamma: f64, bias: f64, x: &FeatureMatrix, i: usize) -> f64 {
    let row = x.row(i);
    let norm_x: f64 = row.1.iter().map(|v| v * v).sum();
    let mut acc = bias;
    for (s, &c) in coef.iter().enumerate() {
        let sv = support.row(s);
        let norm_s: f64 = sv.1.iter().map(|v| v * v).sum();
        let dist = (norm_s + norm_x - 2.0 * sparse_dot(sv, row)).max(0.0);
        acc += c * (-gamma * dist).exp();
    }
    acc
}
