//! L2-regularized logistic regression trained by full-batch gradient descent
//! with a Barzilai-Borwein trial step and Armijo backtracking.
//!
//! Objective over `m` rows, with the bias left unregularized:
//!
//! `J(w, b) = -(1/m) * sum[y log h + (1 - y) log(1 - h)] + (l2 / (2m)) * |w|^2`

use crate::corpus::Label;
use crate::error::Result;
use crate::features::FeatureMatrix;

use super::{ModelParams, TrainConfig};

const ARMIJO: f64 = 1e-4;

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Objective value and gradient at `params = [w_0 .. w_{d-1}, b]`.
pub fn objective_and_gradient(x: &FeatureMatrix, y: &[Label], params: &[f64], l2: f64) -> (f64, Vec<f64>) {
    let d = x.cols();
    let m = x.rows() as f64;
    let (w, b) = (&params[..d], params[d]);
    let mut grad = vec![0.0; d + 1];
    let mut loss = 0.0;
    for (i, &label) in y.iter().enumerate() {
        let z = x.row_dot(i, w) + b;
        let t = label as f64;
        // -[t log h(z) + (1 - t) log(1 - h(z))] = softplus(z) - t z
        loss += softplus(z) - t * z;
        let r = sigmoid(z) - t;
        let (idx, vals) = x.row(i);
        for (&j, &v) in idx.iter().zip(vals) {
            grad[j] += r * v;
        }
        grad[d] += r;
    }
    let mut penalty = 0.0;
    for j in 0..d {
        grad[j] = grad[j] / m + l2 / m * w[j];
        penalty += w[j] * w[j];
    }
    grad[d] /= m;
    (loss / m + 0.5 * l2 / m * penalty, grad)
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

/// Trains and also returns the objective value after every accepted step
/// (the first entry is the value at zero).
pub fn train(x: &FeatureMatrix, y: &[Label], cfg: &TrainConfig) -> Result<(ModelParams, Vec<f64>)> {
    let d = x.cols();
    let mut params = vec![0.0; d + 1];
    let (mut value, mut grad) = objective_and_gradient(x, y, &params, cfg.lr_l2);
    let mut trace = vec![value];
    let mut step = cfg.lr_step;
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;

    for _ in 0..cfg.lr_iters {
        if inf_norm(&grad) < cfg.tolerance {
            break;
        }
        if let Some((p_old, g_old)) = &prev {
            let (mut ss, mut sy) = (0.0, 0.0);
            for j in 0..=d {
                let s = params[j] - p_old[j];
                let yv = grad[j] - g_old[j];
                ss += s * s;
                sy += s * yv;
            }
            if sy > 0.0 && ss > 0.0 {
                step = ss / sy;
            }
        }
        let gg: f64 = grad.iter().map(|g| g * g).sum();
        let mut accepted = None;
        while step > 1e-20 {
            let candidate: Vec<f64> = params.iter().zip(&grad).map(|(p, g)| p - step * g).collect();
            let (v, g) = objective_and_gradient(x, y, &candidate, cfg.lr_l2);
            if v <= value - ARMIJO * step * gg {
                accepted = Some((candidate, v, g));
                break;
            }
            step *= 0.5;
        }
        let Some((candidate, v, g)) = accepted else {
            break;
        };
        prev = Some((
            std::mem::replace(&mut params, candidate),
            std::mem::replace(&mut grad, g),
        ));
        value = v;
        trace.push(value);
    }
    let bias = params.pop().expect("bias slot");
    Ok((ModelParams::Logistic { weights: params, bias }, trace))
}

/// Probability of the positive class for row `i`.
pub fn probability(weights: &[f64], bias: f64, x: &FeatureMatrix, i: usize) -> f64 {
    sigmoid(x.row_dot(i, weights) + bias)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::{train_lr, Kind};
    use crate::features::Weighting;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_weights_give_half() {
        let x = FeatureMatrix::from_dense(&[vec![3.0, -1.0]], 2, Weighting::TfIdf).unwrap();
        assert_eq!(probability(&[0.0, 0.0], 0.0, &x, 0), 0.5);
    }

    #[test]
    fn separates_one_dimensional_data() {
        let x = FeatureMatrix::from_dense(&[vec![-1.0], vec![1.0]], 1, Weighting::TfIdf).unwrap();
        let y = [0, 1];
        let m = train_lr(&x, &y, &TrainConfig::default()).unwrap();
        assert_eq!(m.kind, Kind::Lr);
        assert_eq!(m.predict(&x).unwrap(), vec![0, 1]);
        if let ModelParams::Logistic { weights, .. } = &m.params {
            assert!(weights[0] > 0.0);
        }
    }

    #[test]
    fn objective_is_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rows: Vec<Vec<f64>> = (0..60)
            .map(|_| {
                (0..8)
                    .map(|_| {
                        if rng.random_bool(0.4) {
                            rng.random_range(0.0..2.0)
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        let y: Vec<Label> = rows.iter().map(|r| (r[0] + r[1] - r[2] > 0.5) as Label).collect();
        let x = FeatureMatrix::from_dense(&rows, 8, Weighting::TfIdf).unwrap();
        let cfg = TrainConfig {
            lr_l2: 0.1,
            ..TrainConfig::default()
        };
        let (_, trace) = train(&x, &y, &cfg).unwrap();
        assert!(trace.len() > 2);
        assert!(trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let rows: Vec<Vec<f64>> = (0..12)
                .map(|_| {
                    (0..4)
                        .map(|_| {
                            if rng.random_bool(0.5) {
                                rng.random_range(-1.0..1.0)
                            } else {
                                0.0
                            }
                        })
                        .collect()
                })
                .collect();
            let y: Vec<Label> = (0..12).map(|_| rng.random_range(0..2)).collect();
            let x = FeatureMatrix::from_dense(&rows, 4, Weighting::TfIdf).unwrap();
            let params: Vec<f64> = (0..5).map(|_| rng.random_range(-1.0..1.0)).collect();
            let (_, g) = objective_and_gradient(&x, &y, &params, 0.7);
            for j in 0..5 {
                let h = 1e-6;
                let mut p = params.clone();
                p[j] += h;
                let up = objective_and_gradient(&x, &y, &p, 0.7).0;
                p[j] -= 2.0 * h;
                let down = objective_and_gradient(&x, &y, &p, 0.7).0;
                let fd = (up - down) / (2.0 * h);
                assert!(
                    (fd - g[j]).abs() <= 1e-4 * fd.abs().max(g[j].abs()).max(1e-8),
                    "j={j} fd={fd} g={}",
                    g[j]
                );
            }
        }
    }
}
