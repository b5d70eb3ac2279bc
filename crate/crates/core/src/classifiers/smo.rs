//! Sequential minimal optimization for the soft-margin SVM dual
//!
//! `min 1/2 a'Qa - e'a  s.t.  0 <= a_i <= C,  y'a = 0`,  `Q_ij = y_i y_j K(x_i, x_j)`
//!
//! Working pairs are chosen by maximal violation for the first index and
//! second-order gain for the second. The solver stops when the maximal KKT
//! violation `m(a) - M(a)` falls below the tolerance.

use std::collections::VecDeque;
use std::sync::Arc;

use crate::features::FeatureMatrix;

const TAU: f64 = 1e-12;
/// Kernel row cache budget.
const CACHE_BYTES: usize = 256 << 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelKind {
    Linear,
    Rbf { gamma: f64 },
}

/// Lazily computed kernel rows over the rows of a sparse matrix, cached
/// first-in first-out under a fixed memory budget.
pub struct KernelMatrix<'a> {
    x: &'a FeatureMatrix,
    kind: KernelKind,
    sq_norms: Vec<f64>,
    scratch: Vec<f64>,
    rows: Vec<Option<Arc<[f64]>>>,
    fifo: VecDeque<usize>,
    capacity: usize,
}

impl<'a> KernelMatrix<'a> {
    pub fn new(x: &'a FeatureMatrix, kind: KernelKind) -> Self {
        let n = x.rows();
        let sq_norms = (0..n).map(|i| x.row(i).1.iter().map(|v| v * v).sum()).collect();
        KernelMatrix {
            x,
            kind,
            sq_norms,
            scratch: vec![0.0; x.cols()],
            rows: vec![None; n],
            fifo: VecDeque::new(),
            capacity: (CACHE_BYTES / (8 * n.max(1))).max(2),
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn finish(&self, dot: f64, i: usize, j: usize) -> f64 {
        match self.kind {
            KernelKind::Linear => dot,
            KernelKind::Rbf { gamma } => {
                let dist = (self.sq_norms[i] + self.sq_norms[j] - 2.0 * dot).max(0.0);
                (-gamma * dist).exp()
            }
        }
    }

    pub fn diag(&self, i: usize) -> f64 {
        match self.kind {
            KernelKind::Linear => self.sq_norms[i],
            KernelKind::Rbf { .. } => 1.0,
        }
    }

    pub fn row(&mut self, i: usize) -> Arc<[f64]> {
        if let Some(r) = &self.rows[i] {
            return Arc::clone(r);
        }
        let (idx, vals) = self.x.row(i);
        for (&c, &v) in idx.iter().zip(vals) {
            self.scratch[c] = v;
        }
        let row: Arc<[f64]> = (0..self.x.rows())
            .map(|t| {
                let (ti, tv) = self.x.row(t);
                let dot: f64 = ti.iter().zip(tv).map(|(&c, &v)| v * self.scratch[c]).sum();
                if t == i {
                    self.diag(i)
                } else {
                    self.finish(dot, i, t)
                }
            })
            .collect();
        for &c in idx {
            self.scratch[c] = 0.0;
        }
        if self.fifo.len() >= self.capacity {
            if let Some(old) = self.fifo.pop_front() {
                self.rows[old] = None;
            }
        }
        self.fifo.push_back(i);
        self.rows[i] = Some(Arc::clone(&row));
        row
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub alpha: Vec<f64>,
    /// Decision function is `sum_i alpha_i y_i K(x_i, x) - rho`.
    pub rho: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Gradient of the dual objective, `Q alpha - e`.
    pub gradient: Vec<f64>,
}

/// `y` holds +1/-1.
pub fn solve(kernel: &mut KernelMatrix<'_>, y: &[f64], c: f64, tolerance: f64, max_iter: usize) -> Solution {
    let n = kernel.len();
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let diag: Vec<f64> = (0..n).map(|i| kernel.diag(i)).collect();
    let upper = |a: f64| a >= c;
    let lower = |a: f64| a <= 0.0;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < max_iter {
        // first index: maximal -y_t G_t over the "up" set
        let mut gmax = f64::NEG_INFINITY;
        let mut i_sel = None;
        for t in 0..n {
            let in_up = if y[t] > 0.0 { !upper(alpha[t]) } else { !lower(alpha[t]) };
            if in_up && -y[t] * grad[t] >= gmax {
                gmax = -y[t] * grad[t];
                i_sel = Some(t);
            }
        }
        let Some(i) = i_sel else {
            converged = true;
            break;
        };
        let ki = kernel.row(i);
        // second index: best second-order gain over the "low" set
        let mut gmax2 = f64::NEG_INFINITY;
        let mut best_obj = f64::INFINITY;
        let mut j_sel = None;
        for t in 0..n {
            let in_low = if y[t] > 0.0 { !lower(alpha[t]) } else { !upper(alpha[t]) };
            if !in_low {
                continue;
            }
            let v = y[t] * grad[t];
            gmax2 = gmax2.max(v);
            let b = gmax + v;
            if b > 0.0 {
                let a = diag[i] + diag[t] - 2.0 * ki[t];
                let obj = -(b * b) / if a > 0.0 { a } else { TAU };
                if obj <= best_obj {
                    best_obj = obj;
                    j_sel = Some(t);
                }
            }
        }
        if gmax + gmax2 < tolerance || j_sel.is_none() {
            converged = true;
            break;
        }
        let j = j_sel.expect("checked above");
        iterations += 1;
        let kj = kernel.row(j);

        let (old_i, old_j) = (alpha[i], alpha[j]);
        let quad = {
            let a = diag[i] + diag[j] - 2.0 * ki[j];
            if a > 0.0 {
                a
            } else {
                TAU
            }
        };
        if y[i] != y[j] {
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..n {
            grad[t] += y[t] * (y[i] * ki[t] * di + y[j] * kj[t] * dj);
        }
    }

    let rho = compute_rho(&alpha, &grad, y, c);
    Solution {
        alpha,
        rho,
        iterations,
        converged,
        gradient: grad,
    }
}

fn compute_rho(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> f64 {
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut free, mut sum_free) = (0usize, 0.0);
    for t in 0..alpha.len() {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            sum_free += yg;
        }
    }
    if free > 0 {
        sum_free / free as f64
    } else {
        0.5 * (ub + lb)
    }
}

/// Maximal KKT violation `m(alpha) - M(alpha)` of a dual point; at most the
/// solver tolerance on convergence.
pub fn kkt_gap(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> f64 {
    let mut up = f64::NEG_INFINITY;
    let mut low = f64::INFINITY;
    for t in 0..alpha.len() {
        let v = -y[t] * grad[t];
        let in_up = if y[t] > 0.0 { alpha[t] < c } else { alpha[t] > 0.0 };
        let in_low = if y[t] > 0.0 { alpha[t] > 0.0 } else { alpha[t] < c };
        if in_up {
            up = up.max(v);
        }
        if in_low {
            low = low.min(v);
        }
    }
    if up == f64::NEG_INFINITY || low == f64::INFINITY {
        0.0
    } else {
        (up - low).max(0.0)
    }
}
