//! Plain-text model serialization. Floats are written in their shortest
//! round-trip form, so a dump read back yields an identical model.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::features::{FeatureMatrix, Weighting};

use super::{Kind, ModelParams, TrainConfig, TrainedModel, TreeNode};

const MAGIC: &str = "sentifs-model v1";

fn floats(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(" ")
}

fn write_vec<W: Write>(out: &mut W, name: &str, v: &[f64]) -> Result<()> {
    writeln!(out, "{name} {}", v.len())?;
    writeln!(out, "{}", floats(v))?;
    Ok(())
}

pub fn write_model<W: Write>(mut out: W, model: &TrainedModel) -> Result<()> {
    writeln!(out, "{MAGIC}")?;
    writeln!(out, "kind {}", model.kind.id())?;
    writeln!(out, "feature_count {}", model.feature_count)?;
    writeln!(out, "config {}", model.config.to_line())?;
    match &model.params {
        ModelParams::Logistic { weights, bias } | ModelParams::LinearSvm { weights, bias } => {
            writeln!(out, "bias {bias:?}")?;
            write_vec(&mut out, "weights", weights)?;
        }
        ModelParams::RbfSvm {
            gamma,
            bias,
            coef,
            support,
        } => {
            writeln!(out, "gamma {gamma:?}")?;
            writeln!(out, "bias {bias:?}")?;
            write_vec(&mut out, "coef", coef)?;
            writeln!(
                out,
                "support {} {} {}",
                support.rows(),
                support.cols(),
                support.weighting
            )?;
            writeln!(
                out,
                "{}",
                support
                    .columns()
                    .iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            )?;
            for i in 0..support.rows() {
                let (idx, vals) = support.row(i);
                let cells: Vec<String> = idx.iter().zip(vals).map(|(j, v)| format!("{j}:{v:?}")).collect();
                writeln!(out, "{}", cells.join(" "))?;
            }
        }
        ModelParams::Tree { nodes } => {
            writeln!(out, "nodes {}", nodes.len())?;
            for n in nodes {
                match n {
                    TreeNode::Split {
                        feature,
                        threshold,
                        left,
                        right,
                    } => writeln!(out, "split {feature} {threshold:?} {left} {right}")?,
                    TreeNode::Leaf { label, counts } => writeln!(out, "leaf {label} {} {}", counts[0], counts[1])?,
                }
            }
        }
        ModelParams::Multinomial {
            log_prior,
            log_likelihood,
        } => {
            writeln!(out, "log_prior {}", floats(log_prior))?;
            write_vec(&mut out, "log_likelihood_0", &log_likelihood[0])?;
            write_vec(&mut out, "log_likelihood_1", &log_likelihood[1])?;
        }
        ModelParams::Bernoulli {
            log_prior,
            log_p,
            log_not_p,
        } => {
            writeln!(out, "log_prior {}", floats(log_prior))?;
            write_vec(&mut out, "log_p_0", &log_p[0])?;
            write_vec(&mut out, "log_p_1", &log_p[1])?;
            write_vec(&mut out, "log_not_p_0", &log_not_p[0])?;
            write_vec(&mut out, "log_not_p_1", &log_not_p[1])?;
        }
    }
    writeln!(out, "end")?;
    Ok(())
}

struct Lines<R> {
    inner: std::io::Lines<R>,
    line: usize,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::ModelFormat(msg.into())
}

fn parse<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.parse().map_err(|_| bad(format!("invalid {what} {s:?}")))
}

impl<R: BufRead> Lines<R> {
    fn next(&mut self) -> Result<String> {
        self.line += 1;
        match self.inner.next() {
            Some(l) => Ok(l?),
            None => Err(bad(format!("unexpected end of input at line {}", self.line))),
        }
    }

    /// Reads `name rest` and returns `rest`.
    fn field(&mut self, name: &str) -> Result<String> {
        let l = self.next()?;
        match l.split_once(' ') {
            Some((k, rest)) if k == name => Ok(rest.to_string()),
            _ if l == name => Ok(String::new()),
            _ => Err(bad(format!("line {}: expected {name}", self.line))),
        }
    }

    fn scalar(&mut self, name: &str) -> Result<f64> {
        let v = self.field(name)?;
        parse(&v, name)
    }

    fn float_list(&mut self, expected: usize, name: &str) -> Result<Vec<f64>> {
        let l = self.next()?;
        let v: Vec<f64> = l.split_whitespace().map(|t| parse(t, name)).collect::<Result<_>>()?;
        if v.len() != expected {
            return Err(bad(format!("{name}: expected {expected} values, got {}", v.len())));
        }
        Ok(v)
    }

    fn vec(&mut self, name: &str) -> Result<Vec<f64>> {
        let n: usize = parse(&self.field(name)?, name)?;
        self.float_list(n, name)
    }
}

pub fn read_model<R: BufRead>(input: R) -> Result<TrainedModel> {
    let mut lines = Lines {
        inner: input.lines(),
        line: 0,
    };
    if lines.next()? != MAGIC {
        return Err(bad("missing header"));
    }
    let kind: Kind = lines.field("kind")?.parse().map_err(|_| bad("unknown kind"))?;
    let feature_count: usize = parse(&lines.field("feature_count")?, "feature_count")?;
    let mut config = TrainConfig::default();
    for pair in lines.field("config")?.split_whitespace() {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| bad(format!("bad config entry {pair:?}")))?;
        if !config.set(k, v).map_err(|e| bad(e.to_string()))? {
            return Err(bad(format!("unknown config key {k:?}")));
        }
    }
    let pair = |v: Vec<f64>| -> Result<[f64; 2]> { v.try_into().map_err(|_| bad("expected two values")) };
    let params = match kind {
        Kind::Lr | Kind::SvmLinear => {
            let bias = lines.scalar("bias")?;
            let weights = lines.vec("weights")?;
            if kind == Kind::Lr {
                ModelParams::Logistic { weights, bias }
            } else {
                ModelParams::LinearSvm { weights, bias }
            }
        }
        Kind::SvmRbf => {
            let gamma = lines.scalar("gamma")?;
            let bias = lines.scalar("bias")?;
            let coef = lines.vec("coef")?;
            let header = lines.field("support")?;
            let parts: Vec<&str> = header.split_whitespace().collect();
            let [rows, cols, weighting] = parts[..] else {
                return Err(bad("support header"));
            };
            let rows: usize = parse(rows, "rows")?;
            let cols: usize = parse(cols, "cols")?;
            let weighting: Weighting = weighting.parse().map_err(|_| bad("weighting"))?;
            let columns: Vec<usize> = lines
                .next()?
                .split_whitespace()
                .map(|t| parse(t, "column"))
                .collect::<Result<_>>()?;
            let mut entries = Vec::with_capacity(rows);
            for _ in 0..rows {
                let row: Vec<(usize, f64)> = lines
                    .next()?
                    .split_whitespace()
                    .map(|cell| {
                        let (j, v) = cell.split_once(':').ok_or_else(|| bad("support cell"))?;
                        Ok((parse(j, "column")?, parse(v, "weight")?))
                    })
                    .collect::<Result<_>>()?;
                entries.push(row);
            }
            if coef.len() != rows {
                return Err(bad("coef and support lengths differ"));
            }
            let support = FeatureMatrix::from_sparse_rows(&entries, cols, weighting)
                .and_then(|m| m.with_columns(columns))
                .map_err(|e| bad(e.to_string()))?;
            ModelParams::RbfSvm {
                gamma,
                bias,
                coef,
                support,
            }
        }
        Kind::Dt => {
            let n: usize = parse(&lines.field("nodes")?, "nodes")?;
            let mut nodes = Vec::with_capacity(n);
            for _ in 0..n {
                let l = lines.next()?;
                let t: Vec<&str> = l.split_whitespace().collect();
                let node = match t[..] {
                    ["split", f, th, a, b] => TreeNode::Split {
                        feature: parse(f, "feature")?,
                        threshold: parse(th, "threshold")?,
                        left: parse(a, "child")?,
                        right: parse(b, "child")?,
                    },
                    ["leaf", label, c0, c1] => TreeNode::Leaf {
                        label: parse(label, "label")?,
                        counts: [parse(c0, "count")?, parse(c1, "count")?],
                    },
                    _ => return Err(bad(format!("bad node line {l:?}"))),
                };
                nodes.push(node);
            }
            for node in &nodes {
                if let TreeNode::Split { left, right, .. } = node {
                    if *left >= n || *right >= n {
                        return Err(bad("child index out of range"));
                    }
                }
            }
            ModelParams::Tree { nodes }
        }
        Kind::Mnb => {
            let log_prior = pair(lines.float_list_inline("log_prior")?)?;
            ModelParams::Multinomial {
                log_prior,
                log_likelihood: [lines.vec("log_likelihood_0")?, lines.vec("log_likelihood_1")?],
            }
        }
        Kind::Bnb => {
            let log_prior = pair(lines.float_list_inline("log_prior")?)?;
            ModelParams::Bernoulli {
                log_prior,
                log_p: [lines.vec("log_p_0")?, lines.vec("log_p_1")?],
                log_not_p: [lines.vec("log_not_p_0")?, lines.vec("log_not_p_1")?],
            }
        }
    };
    if lines.next()? != "end" {
        return Err(bad("missing end marker"));
    }
    Ok(TrainedModel {
        kind,
        feature_count,
        config,
        params,
    })
}

impl<R: BufRead> Lines<R> {
    fn float_list_inline(&mut self, name: &str) -> Result<Vec<f64>> {
        self.field(name)?.split_whitespace().map(|t| parse(t, name)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::train;
    use proptest::prelude::*;

    fn roundtrip(m: &TrainedModel) -> TrainedModel {
        let mut buf = Vec::new();
        write_model(&mut buf, m).unwrap();
        read_model(&buf[..]).unwrap()
    }

    #[test]
    fn rejects_garbage() {
        assert!(read_model(&b"hello\n"[..]).is_err());
        assert!(read_model(&b"sentifs-model v1\nkind LR\n"[..]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn every_kind_round_trips(
            rows in prop::collection::vec(prop::collection::vec(prop_oneof![Just(0.0f64), 0.01f64..3.0], 4), 6..14),
            flips in prop::collection::vec(any::<bool>(), 14),
        ) {
            let x = FeatureMatrix::from_dense(&rows, 4, Weighting::TfIdf).unwrap();
            let x = x.project(&[0, 2, 3]).unwrap();
            let mut y: Vec<u8> = flips[..rows.len()].iter().map(|&b| b as u8).collect();
            y[0] = 0;
            y[1] = 1;
            for kind in Kind::ALL {
                let m = train(kind, &x, &y, &TrainConfig::default()).unwrap();
                let back = roundtrip(&m);
                prop_assert_eq!(&back, &m);
                prop_assert_eq!(back.predict(&x).unwrap(), m.predict(&x).unwrap());
            }
        }
    }
}
