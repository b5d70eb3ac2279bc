//! Decision tree induction by entropy information gain.

use crate::corpus::Label;
use crate::features::FeatureMatrix;

use super::{ModelParams, TrainConfig, TreeNode};

/// Gains at or below this are treated as zero.
const MIN_GAIN: f64 = 1e-12;

pub fn entropy(counts: [usize; 2]) -> f64 {
    let n = (counts[0] + counts[1]) as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

fn majority(counts: [usize; 2]) -> Label {
    if counts[1] >= counts[0] {
        1
    } else {
        0
    }
}

#[derive(Debug, Clone, Copy)]
struct Split {
    feature: usize,
    threshold: f64,
    gain: f64,
}

fn best_split(
    columns: &[Vec<(usize, f64)>],
    in_node: &[bool],
    y: &[Label],
    counts: [usize; 2],
    min_leaf: usize,
) -> Option<Split> {
    let n = counts[0] + counts[1];
    let parent = entropy(counts);
    let mut best: Option<Split> = None;
    let mut groups: Vec<(f64, [usize; 2])> = Vec::new();
    for (feature, col) in columns.iter().enumerate() {
        groups.clear();
        let mut nonzero = [0usize; 2];
        for &(row, v) in col {
            if in_node[row] {
                groups.push((v, [0, 0]));
                groups.last_mut().expect("just pushed").1[y[row] as usize] += 1;
                nonzero[y[row] as usize] += 1;
            }
        }
        let zeros = [counts[0] - nonzero[0], counts[1] - nonzero[1]];
        if zeros[0] + zeros[1] > 0 {
            groups.push((0.0, zeros));
        }
        groups.sort_by(|a, b| a.0.total_cmp(&b.0));
        // merge equal values
        let mut merged: Vec<(f64, [usize; 2])> = Vec::with_capacity(groups.len());
        for &(v, c) in &groups {
            match merged.last_mut() {
                Some(last) if last.0 == v => {
                    last.1[0] += c[0];
                    last.1[1] += c[1];
                }
                _ => merged.push((v, c)),
            }
        }
        if merged.len() < 2 {
            continue;
        }
        let mut left = [0usize; 2];
        for w in merged.windows(2) {
            left[0] += w[0].1[0];
            left[1] += w[0].1[1];
            let n_left = left[0] + left[1];
            let n_right = n - n_left;
            if n_left < min_leaf || n_right < min_leaf {
                continue;
            }
            let right = [counts[0] - left[0], counts[1] - left[1]];
            let child = (n_left as f64 * entropy(left) + n_right as f64 * entropy(right)) / n as f64;
            let gain = parent - child;
            if gain > MIN_GAIN && best.is_none_or(|b| gain > b.gain + MIN_GAIN) {
                best = Some(Split {
                    feature,
                    threshold: 0.5 * (w[0].0 + w[1].0),
                    gain,
                });
            }
        }
    }
    best
}

pub fn train(x: &FeatureMatrix, y: &[Label], cfg: &TrainConfig) -> ModelParams {
    let columns = x.to_columns();
    let mut nodes: Vec<TreeNode> = Vec::new();
    let mut in_node = vec![false; x.rows()];
    // (node slot, rows, depth)
    let mut stack: Vec<(usize, Vec<usize>, usize)> = vec![(0, (0..x.rows()).collect(), 0)];
    nodes.push(TreeNode::Leaf {
        label: 1,
        counts: [0, 0],
    });

    while let Some((slot, rows, depth)) = stack.pop() {
        let mut counts = [0usize; 2];
        for &r in &rows {
            counts[y[r] as usize] += 1;
        }
        let leaf = TreeNode::Leaf {
            label: majority(counts),
            counts,
        };
        let depth_left = cfg.dt_max_depth.is_none_or(|d| depth < d);
        if counts[0] == 0 || counts[1] == 0 || !depth_left || rows.len() < 2 * cfg.dt_min_leaf {
            nodes[slot] = leaf;
            continue;
        }
        for &r in &rows {
            in_node[r] = true;
        }
        let split = best_split(&columns, &in_node, y, counts, cfg.dt_min_leaf);
        for &r in &rows {
            in_node[r] = false;
        }
        let Some(split) = split else {
            nodes[slot] = leaf;
            continue;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| x.get(i, split.feature) <= split.threshold);
        let left = nodes.len();
        let right = left + 1;
        nodes.push(TreeNode::Leaf {
            label: 1,
            counts: [0, 0],
        });
        nodes.push(TreeNode::Leaf {
            label: 1,
            counts: [0, 0],
        });
        nodes[slot] = TreeNode::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        stack.push((right, r, depth + 1));
        stack.push((left, l, depth + 1));
    }
    ModelParams::Tree { nodes }
}

pub fn predict_row(nodes: &[TreeNode], x: &FeatureMatrix, i: usize) -> Label {
    let mut at = 0;
    loop {
        match nodes[at] {
            TreeNode::Leaf { label, .. } => return label,
            TreeNode::Split {
                feature,
                threshold,
                left,
                right,
            } => at = if x.get(i, feature) <= threshold { left } else { right },
        }
    }
}

/// Information gain of every internal node, recomputed from the leaf counts
/// beneath it.
pub fn node_gains(nodes: &[TreeNode]) -> Vec<f64> {
    fn totals(nodes: &[TreeNode], at: usize) -> [usize; 2] {
        match nodes[at] {
            TreeNode::Leaf { counts, .. } => counts,
            TreeNode::Split { left, right, .. } => {
                let (a, b) = (totals(nodes, left), totals(nodes, right));
                [a[0] + b[0], a[1] + b[1]]
            }
        }
    }
    nodes
        .iter()
        .filter_map(|n| match *n {
            TreeNode::Split { left, right, .. } => {
                let (a, b) = (totals(nodes, left), totals(nodes, right));
                let parent = [a[0] + b[0], a[1] + b[1]];
                let n = (parent[0] + parent[1]) as f64;
                let (na, nb) = ((a[0] + a[1]) as f64, (b[0] + b[1]) as f64);
                Some(entropy(parent) - (na * entropy(a) + nb * entropy(b)) / n)
            }
            TreeNode::Leaf { .. } => None,
        })
        .collect()
}
