//! Vocabulary, document-frequency contingency counts and sparse feature
//! matrices (TF-IDF, binary presence, raw counts).

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::io::Write;

use crate::corpus::{Corpus, LabeledDocument};
use crate::error::{Error, Result};

/// Word/index bijection built from a training corpus. Index order is
/// descending document frequency, ties broken lexicographically, so a lower
/// index always means "at least as frequent".
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    index: HashMap<String, usize>,
    words: Vec<String>,
    df: Vec<usize>,
    pub min_df: usize,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn word(&self, index: usize) -> &str {
        &self.words[index]
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    /// Training document frequency of each feature.
    pub fn document_frequencies(&self) -> &[usize] {
        &self.df
    }
}

fn distinct_tokens(doc: &LabeledDocument) -> HashSet<&str> {
    doc.tokens.iter().map(String::as_str).collect()
}

pub fn build_vocabulary(train: &Corpus, min_df: usize) -> Result<Vocabulary> {
    if min_df < 1 {
        return Err(Error::InvalidParameter(format!(
            "min_df must be at least 1, got {min_df}"
        )));
    }
    if train.is_empty() {
        return Err(Error::EmptyCorpus(train.name.clone()));
    }
    let mut df: HashMap<&str, usize> = HashMap::new();
    for doc in train.documents() {
        for w in distinct_tokens(doc) {
            *df.entry(w).or_default() += 1;
        }
    }
    let mut entries: Vec<(&str, usize)> = df.into_iter().filter(|&(_, n)| n >= min_df).collect();
    entries.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let words: Vec<String> = entries.iter().map(|(w, _)| (*w).to_owned()).collect();
    let index = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
    Ok(Vocabulary {
        index,
        words,
        df: entries.iter().map(|&(_, n)| n).collect(),
        min_df,
    })
}

/// Document-level contingency counts for every feature and class.
///
/// A feature "occurs" in a document if it appears at least once; multiplicity
/// is ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct ContingencyStats {
    n_docs: usize,
    class_counts: Vec<usize>,
    df: Vec<usize>,
    df_class: Vec<Vec<usize>>,
}

impl ContingencyStats {
    /// Builds stats from explicit per-class counts. `df_class[f][k]` is the
    /// number of class-`k` documents containing feature `f`.
    pub fn from_counts(class_counts: Vec<usize>, df_class: Vec<Vec<usize>>) -> Result<Self> {
        if class_counts.is_empty() {
            return Err(Error::InvalidParameter("no classes".into()));
        }
        for (f, row) in df_class.iter().enumerate() {
            if row.len() != class_counts.len() {
                return Err(Error::Dimension {
                    expected: class_counts.len(),
                    got: row.len(),
                });
            }
            if row.iter().zip(&class_counts).any(|(a, n)| a > n) {
                return Err(Error::InvalidParameter(format!(
                    "feature {f}: class frequency exceeds class size"
                )));
            }
        }
        Ok(ContingencyStats {
            n_docs: class_counts.iter().sum(),
            df: df_class.iter().map(|r| r.iter().sum()).collect(),
            class_counts,
            df_class,
        })
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn n_classes(&self) -> usize {
        self.class_counts.len()
    }

    pub fn n_features(&self) -> usize {
        self.df.len()
    }

    /// n_{c_k}
    pub fn n_c(&self, k: usize) -> usize {
        self.class_counts[k]
    }

    /// n_{c_k̄}
    pub fn n_not_c(&self, k: usize) -> usize {
        self.n_docs - self.class_counts[k]
    }

    /// n_f
    pub fn n_f(&self, f: usize) -> usize {
        self.df[f]
    }

    /// n_{f̄}
    pub fn n_not_f(&self, f: usize) -> usize {
        self.n_docs - self.df[f]
    }

    /// n_{f,c_k}
    pub fn n_f_c(&self, f: usize, k: usize) -> usize {
        self.df_class[f][k]
    }

    /// n_{f,c_k̄}
    pub fn n_f_not_c(&self, f: usize, k: usize) -> usize {
        self.df[f] - self.df_class[f][k]
    }

    /// n_{f̄,c_k}
    pub fn n_not_f_c(&self, f: usize, k: usize) -> usize {
        self.class_counts[k] - self.df_class[f][k]
    }

    /// n_{f̄,c_k̄}
    pub fn n_not_f_not_c(&self, f: usize, k: usize) -> usize {
        self.n_not_c(k) - self.n_f_not_c(f, k)
    }

    pub fn document_frequencies(&self) -> &[usize] {
        &self.df
    }
}

pub fn build_stats(train: &Corpus, vocab: &Vocabulary) -> ContingencyStats {
    let mut class_counts = vec![0usize; 2];
    let mut df_class = vec![vec![0usize; 2]; vocab.len()];
    for doc in train.documents() {
        let k = doc.label as usize;
        class_counts[k] += 1;
        for w in distinct_tokens(doc) {
            if let Some(f) = vocab.get(w) {
                df_class[f][k] += 1;
            }
        }
    }
    ContingencyStats {
        n_docs: train.len(),
        df: df_class.iter().map(|r| r.iter().sum()).collect(),
        class_counts,
        df_class,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weighting {
    TfIdf,
    Binary,
    Counts,
}

impl fmt::Display for Weighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Weighting::TfIdf => "tf_idf",
            Weighting::Binary => "binary",
            Weighting::Counts => "counts",
        })
    }
}

impl std::str::FromStr for Weighting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "tf_idf" => Ok(Weighting::TfIdf),
            "binary" => Ok(Weighting::Binary),
            "counts" => Ok(Weighting::Counts),
            other => Err(Error::Config(format!("unknown weighting {other:?}"))),
        }
    }
}

/// Which token count divides raw term counts in TF.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TfLength {
    /// Every preprocessed token of the document.
    #[default]
    AllTokens,
    /// Only tokens that are in the vocabulary.
    InVocabulary,
}

/// Sparse document x feature matrix in compressed-row form. Column indices
/// within a row are strictly increasing and only non-zero weights are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    n_cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
    pub weighting: Weighting,
    /// Vocabulary index of each column.
    columns: Vec<usize>,
}

impl FeatureMatrix {
    fn with_capacity(n_cols: usize, weighting: Weighting) -> Self {
        FeatureMatrix {
            n_cols,
            indptr: vec![0],
            indices: Vec::new(),
            values: Vec::new(),
            weighting,
            columns: (0..n_cols).collect(),
        }
    }

    fn push_row(&mut self, entries: impl IntoIterator<Item = (usize, f64)>) {
        for (c, v) in entries {
            if v != 0.0 {
                self.indices.push(c);
                self.values.push(v);
            }
        }
        self.indptr.push(self.indices.len());
    }

    /// Builds a matrix from dense rows; zeros are not stored.
    pub fn from_dense(rows: &[Vec<f64>], n_cols: usize, weighting: Weighting) -> Result<Self> {
        let mut m = FeatureMatrix::with_capacity(n_cols, weighting);
        for row in rows {
            if row.len() != n_cols {
                return Err(Error::Dimension {
                    expected: n_cols,
                    got: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter("non-finite weight".into()));
            }
            m.push_row(row.iter().copied().enumerate());
        }
        Ok(m)
    }

    /// Builds a matrix from per-row sparse entries; each row must have
    /// strictly increasing column indices.
    pub fn from_sparse_rows(rows: &[Vec<(usize, f64)>], n_cols: usize, weighting: Weighting) -> Result<Self> {
        let mut m = FeatureMatrix::with_capacity(n_cols, weighting);
        for row in rows {
            for w in row.windows(2) {
                if w[0].0 >= w[1].0 {
                    return Err(Error::InvalidParameter(
                        "row entries must have strictly increasing columns".into(),
                    ));
                }
            }
            if let Some(&(c, _)) = row.last() {
                if c >= n_cols {
                    return Err(Error::FeatureIndex { index: c, len: n_cols });
                }
            }
            m.push_row(row.iter().copied());
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.indptr.len() - 1
    }

    pub fn cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn columns(&self) -> &[usize] {
        &self.columns
    }

    /// Replaces the vocabulary index recorded for each column.
    pub fn with_columns(mut self, columns: Vec<usize>) -> Result<Self> {
        if columns.len() != self.n_cols {
            return Err(Error::Dimension {
                expected: self.n_cols,
                got: columns.len(),
            });
        }
        self.columns = columns;
        Ok(self)
    }

    /// Column indices and weights of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        (&self.indices[a..b], &self.values[a..b])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (idx, vals) = self.row(i);
        match idx.binary_search(&j) {
            Ok(p) => vals[p],
            Err(_) => 0.0,
        }
    }

    pub fn row_dot(&self, i: usize, dense: &[f64]) -> f64 {
        let (idx, vals) = self.row(i);
        idx.iter().zip(vals).map(|(&j, &v)| v * dense[j]).sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.rows())
            .map(|i| {
                let mut r = vec![0.0; self.n_cols];
                let (idx, vals) = self.row(i);
                for (&j, &v) in idx.iter().zip(vals) {
                    r[j] = v;
                }
                r
            })
            .collect()
    }

    /// Rows `ids` in the given order (duplicates allowed).
    pub fn select_rows(&self, ids: &[usize]) -> FeatureMatrix {
        let mut m = FeatureMatrix::with_capacity(self.n_cols, self.weighting);
        m.columns = self.columns.clone();
        for &i in ids {
            let (idx, vals) = self.row(i);
            m.push_row(idx.iter().copied().zip(vals.iter().copied()));
        }
        m
    }

    /// Restricts the matrix to `selected` columns, re-indexed densely in
    /// ascending original column order.
    pub fn project(&self, selected: &[usize]) -> Result<FeatureMatrix> {
        let mut keep: Vec<usize> = selected.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if let Some(&bad) = keep.iter().find(|&&c| c >= self.n_cols) {
            return Err(Error::FeatureIndex {
                index: bad,
                len: self.n_cols,
            });
        }
        let mut remap = vec![usize::MAX; self.n_cols];
        for (new, &old) in keep.iter().enumerate() {
            remap[old] = new;
        }
        let mut m = FeatureMatrix::with_capacity(keep.len(), self.weighting);
        m.columns = keep.iter().map(|&c| self.columns[c]).collect();
        for i in 0..self.rows() {
            let (idx, vals) = self.row(i);
            m.push_row(
                idx.iter()
                    .zip(vals)
                    .filter(|(&j, _)| remap[j] != usize::MAX)
                    .map(|(&j, &v)| (remap[j], v)),
            );
        }
        Ok(m)
    }

    /// Column-major copy: for each column, the (row, weight) pairs in
    /// ascending row order.
    pub fn to_columns(&self) -> Vec<Vec<(usize, f64)>> {
        let mut cols = vec![Vec::new(); self.n_cols];
        for i in 0..self.rows() {
            let (idx, vals) = self.row(i);
            for (&j, &v) in idx.iter().zip(vals) {
                cols[j].push((i, v));
            }
        }
        cols
    }

    /// Writes `rows cols weighting` followed by one `row<TAB>col<TAB>weight`
    /// line per stored entry.
    pub fn dump<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{} {} {}", self.rows(), self.n_cols, self.weighting)?;
        for i in 0..self.rows() {
            let (idx, vals) = self.row(i);
            for (&j, &v) in idx.iter().zip(vals) {
                writeln!(out, "{i}\t{j}\t{v:?}")?;
            }
        }
        Ok(())
    }
}

fn term_counts(doc: &LabeledDocument, vocab: &Vocabulary) -> BTreeMap<usize, usize> {
    let mut counts = BTreeMap::new();
    for t in &doc.tokens {
        if let Some(f) = vocab.get(t) {
            *counts.entry(f).or_insert(0) += 1;
        }
    }
    counts
}

/// TF-IDF weights: `count(w, d) / len(d) * ln(N_train / df_train(w))`.
///
/// Out-of-vocabulary words are dropped; documents with no vocabulary words
/// give empty rows.
pub fn tf_idf_matrix(
    corpus: &Corpus,
    vocab: &Vocabulary,
    stats: &ContingencyStats,
    tf_length: TfLength,
) -> FeatureMatrix {
    let n = stats.n_docs() as f64;
    let idf: Vec<f64> = (0..vocab.len()).map(|f| (n / stats.n_f(f) as f64).ln()).collect();
    let mut m = FeatureMatrix::with_capacity(vocab.len(), Weighting::TfIdf);
    for doc in corpus.documents() {
        let counts = term_counts(doc, vocab);
        let len = match tf_length {
            TfLength::AllTokens => doc.tokens.len(),
            TfLength::InVocabulary => counts.values().sum(),
        } as f64;
        m.push_row(counts.into_iter().map(|(f, c)| (f, c as f64 / len * idf[f])));
    }
    m
}

/// Presence matrix: weight 1 wherever the word occurs in the document.
pub fn binary_matrix(corpus: &Corpus, vocab: &Vocabulary) -> FeatureMatrix {
    let mut m = FeatureMatrix::with_capacity(vocab.len(), Weighting::Binary);
    for doc in corpus.documents() {
        m.push_row(term_counts(doc, vocab).into_keys().map(|f| (f, 1.0)));
    }
    m
}

/// Raw within-document term counts.
pub fn count_matrix(corpus: &Corpus, vocab: &Vocabulary) -> FeatureMatrix {
    let mut m = FeatureMatrix::with_capacity(vocab.len(), Weighting::Counts);
    for doc in corpus.documents() {
        m.push_row(term_counts(doc, vocab).into_iter().map(|(f, c)| (f, c as f64)));
    }
    m
}

/// Per-feature occurrence counts over the training documents, stored
/// sparsely as (document, count) pairs in ascending document order.
#[derive(Debug, Clone, PartialEq)]
pub struct CountVectors {
    n_docs: usize,
    vectors: Vec<Vec<(usize, u32)>>,
}

impl CountVectors {
    pub fn build(train: &Corpus, vocab: &Vocabulary) -> Self {
        let mut vectors = vec![Vec::new(); vocab.len()];
        for (d, doc) in train.documents().iter().enumerate() {
            for (f, c) in term_counts(doc, vocab) {
                vectors[f].push((d, c as u32));
            }
        }
        CountVectors {
            n_docs: train.len(),
            vectors,
        }
    }

    /// Builds count vectors from dense per-feature columns.
    pub fn from_dense(columns: &[Vec<u32>]) -> Result<Self> {
        let n_docs = columns.first().map_or(0, Vec::len);
        if let Some(bad) = columns.iter().find(|c| c.len() != n_docs) {
            return Err(Error::Dimension {
                expected: n_docs,
                got: bad.len(),
            });
        }
        let vectors = columns
            .iter()
            .map(|c| {
                c.iter()
                    .enumerate()
                    .filter(|(_, &v)| v > 0)
                    .map(|(d, &v)| (d, v))
                    .collect()
            })
            .collect();
        Ok(CountVectors { n_docs, vectors })
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn n_features(&self) -> usize {
        self.vectors.len()
    }

    pub fn vector(&self, f: usize) -> &[(usize, u32)] {
        &self.vectors[f]
    }

    pub fn dense(&self, f: usize) -> Vec<u32> {
        let mut v = vec![0; self.n_docs];
        for &(d, c) in &self.vectors[f] {
            v[d] = c;
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Label, Partition};

    pub(crate) fn corpus(docs: &[(&str, Label)]) -> Corpus {
        Corpus::from_records("t", Partition::Train, docs.iter().map(|&(t, l)| (t, l))).unwrap()
    }

    #[test]
    fn vocabulary_order_and_floor() {
        let c = corpus(&[("a b", 1), ("a", 0)]);
        let v = build_vocabulary(&c, 1).unwrap();
        assert_eq!(v.get("a"), Some(0));
        assert_eq!(v.get("b"), Some(1));
        let v2 = build_vocabulary(&c, 2).unwrap();
        assert_eq!(v2.len(), 1);
        assert_eq!(v2.get("a"), Some(0));
        assert!(build_vocabulary(&c, 0).is_err());
        let empty = corpus(&[]);
        assert!(matches!(build_vocabulary(&empty, 1), Err(Error::EmptyCorpus(_))));
    }

    #[test]
    fn vocabulary_ties_are_lexicographic() {
        let c = corpus(&[("zeta alpha mid", 1), ("mid", 0)]);
        let v = build_vocabulary(&c, 1).unwrap();
        assert_eq!(v.words(), &["mid", "alpha", "zeta"]);
        assert_eq!(v.document_frequencies(), &[2, 1, 1]);
    }

    #[test]
    fn stats_hand_count() {
        let c = corpus(&[("a", 1), ("a a", 1), ("b", 0), ("a b", 0)]);
        let v = build_vocabulary(&c, 1).unwrap();
        let s = build_stats(&c, &v);
        let (a, b) = (v.get("a").unwrap(), v.get("b").unwrap());
        assert_eq!(s.n_docs(), 4);
        assert_eq!(s.n_f(a), 3);
        assert_eq!(s.n_f_c(a, 1), 2);
        assert_eq!(s.n_f_c(a, 0), 1);
        assert_eq!(s.n_f(b), 2);
        assert_eq!(s.n_f_c(b, 1), 0);
        assert_eq!(s.n_not_f_not_c(a, 1), 1);
        assert_eq!(s.n_not_f_c(b, 1), 2);
    }

    #[test]
    fn tf_idf_arithmetic() {
        // df(a) = 1 out of N = 10
        let mut docs = vec![("a a b c", 1)];
        docs.extend(std::iter::repeat_n(("b c", 0), 9));
        let c = corpus(&docs);
        let v = build_vocabulary(&c, 1).unwrap();
        let s = build_stats(&c, &v);
        let m = tf_idf_matrix(&c, &v, &s, TfLength::AllTokens);
        let a = v.get("a").unwrap();
        let expected = 0.5 * 10f64.ln();
        assert!((m.get(0, a) - expected).abs() < 1e-12);
        assert!((m.get(0, a) - 1.1513).abs() < 1e-4);
        // b and c occur everywhere: IDF 0
        for w in ["b", "c"] {
            let f = v.get(w).unwrap();
            assert!((0..m.rows()).all(|i| m.get(i, f) == 0.0));
        }
    }

    #[test]
    fn tf_length_variant() {
        let train = corpus(&[("a b", 1), ("b", 0)]);
        let v = build_vocabulary(&train, 1).unwrap();
        let s = build_stats(&train, &v);
        let test = corpus(&[("a zzz zzz zzz", 1)]);
        let a = v.get("a").unwrap();
        let all = tf_idf_matrix(&test, &v, &s, TfLength::AllTokens);
        let inv = tf_idf_matrix(&test, &v, &s, TfLength::InVocabulary);
        assert!((all.get(0, a) - 0.25 * 2f64.ln()).abs() < 1e-12);
        assert!((inv.get(0, a) - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn oov_and_empty_rows() {
        let train = corpus(&[("good", 1), ("bad", 0)]);
        let v = build_vocabulary(&train, 1).unwrap();
        let s = build_stats(&train, &v);
        let test = corpus(&[("unseen words only", 1), ("!!!", 0)]);
        let m = tf_idf_matrix(&test, &v, &s, TfLength::AllTokens);
        assert_eq!(m.rows(), 2);
        assert_eq!(m.nnz(), 0);
        let b = binary_matrix(&test, &v);
        assert_eq!(b.row(1).0.len(), 0);
    }

    #[test]
    fn binary_single_entry() {
        let c = corpus(&[("a a a", 1)]);
        let v = build_vocabulary(&c, 1).unwrap();
        let m = binary_matrix(&c, &v);
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.row(0), (&[0usize][..], &[1.0][..]));
        let counts = count_matrix(&c, &v);
        assert_eq!(counts.get(0, 0), 3.0);
    }

    #[test]
    fn project_cases() {
        let m = FeatureMatrix::from_dense(&[vec![1.0, 2.0], vec![0.0, 3.0]], 2, Weighting::TfIdf).unwrap();
        let all = m.project(&[1, 0]).unwrap();
        assert_eq!(all, m);
        let none = m.project(&[]).unwrap();
        assert_eq!(none.cols(), 0);
        assert_eq!(none.rows(), 2);
        let first = m.project(&[0]).unwrap();
        assert_eq!(first.to_dense(), vec![vec![1.0], vec![0.0]]);
        assert_eq!(first.columns(), &[0]);
        let second = m.project(&[1]).unwrap();
        assert_eq!(second.columns(), &[1]);
        assert!(matches!(m.project(&[2]), Err(Error::FeatureIndex { index: 2, len: 2 })));
    }

    #[test]
    fn dump_format() {
        let m = FeatureMatrix::from_dense(&[vec![0.5, 0.0], vec![0.0, 1.0]], 2, Weighting::Binary).unwrap();
        let mut buf = Vec::new();
        m.dump(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "2 2 binary\n0\t0\t0.5\n1\t1\t1.0\n");
    }

    #[test]
    fn count_vectors_match_matrix() {
        let c = corpus(&[("a a b", 1), ("b", 0), ("c a", 0)]);
        let v = build_vocabulary(&c, 1).unwrap();
        let cv = CountVectors::build(&c, &v);
        let m = count_matrix(&c, &v);
        for f in 0..v.len() {
            let dense = cv.dense(f);
            for (d, &count) in dense.iter().enumerate() {
                assert_eq!(count as f64, m.get(d, f));
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_corpus() -> impl Strategy<Value = Vec<(Vec<u8>, Label)>> {
            prop::collection::vec((prop::collection::vec(0u8..12, 0..8), 0u8..2), 1..60)
        }

        fn materialize(raw: &[(Vec<u8>, Label)]) -> Corpus {
            let docs: Vec<(String, Label)> = raw
                .iter()
                .map(|(ws, l)| {
                    (
                        ws.iter()
                            .map(|w| format!("w{}", (b'a' + w) as char))
                            .collect::<Vec<_>>()
                            .join(" "),
                        *l,
                    )
                })
                .collect();
            Corpus::from_records("p", Partition::Train, docs).unwrap()
        }

        proptest! {
            #[test]
            fn stats_partition_identities(raw in arb_corpus()) {
                let c = materialize(&raw);
                let v = build_vocabulary(&c, 1).unwrap();
                let s = build_stats(&c, &v);
                prop_assert_eq!(s.n_c(0) + s.n_c(1), s.n_docs());
                for f in 0..v.len() {
                    prop_assert_eq!(s.n_f_c(f, 0) + s.n_f_c(f, 1), s.n_f(f));
                    for k in 0..2 {
                        prop_assert_eq!(s.n_f_c(f, k) + s.n_not_f_c(f, k), s.n_c(k));
                        prop_assert_eq!(
                            s.n_f_c(f, k) + s.n_f_not_c(f, k) + s.n_not_f_c(f, k) + s.n_not_f_not_c(f, k),
                            s.n_docs()
                        );
                    }
                }
            }

            #[test]
            fn stats_match_brute_force(raw in arb_corpus()) {
                let c = materialize(&raw);
                let v = build_vocabulary(&c, 1).unwrap();
                let s = build_stats(&c, &v);
                for f in 0..v.len() {
                    let word = v.word(f);
                    let containing: Vec<&LabeledDocument> = c.documents().iter().filter(|d| d.tokens.iter().any(|t| t == word)).collect();
                    prop_assert_eq!(containing.len(), s.n_f(f));
                    for k in 0..2u8 {
                        prop_assert_eq!(containing.iter().filter(|d| d.label == k).count(), s.n_f_c(f, k as usize));
                    }
                }
            }

            #[test]
            fn tf_idf_deterministic_and_finite(raw in arb_corpus()) {
                let c = materialize(&raw);
                let v = build_vocabulary(&c, 1).unwrap();
                let s = build_stats(&c, &v);
                let a = tf_idf_matrix(&c, &v, &s, TfLength::AllTokens);
                let b = tf_idf_matrix(&c, &v, &s, TfLength::AllTokens);
                prop_assert!(a.values.iter().zip(&b.values).all(|(x, y)| x.to_bits() == y.to_bits()));
                prop_assert_eq!(&a, &b);
                prop_assert!(a.values.iter().all(|w| w.is_finite() && *w > 0.0));
                let bin = binary_matrix(&c, &v);
                prop_assert!(bin.values.iter().all(|&w| w == 1.0));
                // a word in every document has zero weight everywhere
                for f in 0..v.len() {
                    if s.n_f(f) == s.n_docs() {
                        prop_assert!((0..a.rows()).all(|i| a.get(i, f) == 0.0));
                    }
                }
            }
        }
    }
}
