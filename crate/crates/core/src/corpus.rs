//! Labeled sentence corpora: loading, preprocessing and train/test splits.
//!
//! Preprocessing lowercases the text, expands a fixed table of English
//! contractions, replaces every character outside `a-z` with a space and
//! splits on whitespace. Stopwords are kept.

use std::fmt;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Binary polarity label: 0 is negative, 1 is positive.
pub type Label = u8;

pub const NEGATIVE: Label = 0;
pub const POSITIVE: Label = 1;

/// Contraction rules as (pattern, replacement, whole_word). Whole-word
/// patterns only fire at the start of a word. Sorted longest first so the
/// scan below is longest-match-first.
const CONTRACTIONS: &[(&str, &str, bool)] = &[
    ("can't", "cannot", true),
    ("won't", "will not", true),
    ("let's", "let us", true),
    ("it's", "it is", true),
    ("n't", " not", false),
    ("'re", " are", false),
    ("'ve", " have", false),
    ("'ll", " will", false),
    ("'d", " would", false),
    ("'m", " am", false),
];

fn expand_contractions(lower: &str) -> String {
    let chars: Vec<char> = lower
        .chars()
        .map(|c| if c == '\u{2019}' || c == '\u{2018}' { '\'' } else { c })
        .collect();
    let mut out = String::with_capacity(lower.len() + 16);
    let mut i = 0;
    'scan: while i < chars.len() {
        for &(pattern, replacement, whole_word) in CONTRACTIONS {
            if whole_word && i > 0 && chars[i - 1].is_alphabetic() {
                continue;
            }
            let len = pattern.len();
            if i + len <= chars.len() && pattern.chars().zip(&chars[i..i + len]).all(|(p, &c)| p == c) {
                out.push_str(replacement);
                i += len;
                continue 'scan;
            }
        }
        out.push(chars[i]);
        i += 1;
    }
    out
}

/// Turns raw text into lowercase alphabetic tokens.
///
/// Pure function of its input; text without letters yields no tokens.
pub fn preprocess(raw_text: &str) -> Vec<String> {
    let expanded = expand_contractions(&raw_text.to_lowercase());
    let filtered: String = expanded
        .chars()
        .map(|c| if c.is_ascii_lowercase() { c } else { ' ' })
        .collect();
    filtered.split_whitespace().map(str::to_owned).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDocument {
    pub id: usize,
    pub raw_text: String,
    pub tokens: Vec<String>,
    pub label: Label,
}

impl LabeledDocument {
    pub fn new(id: usize, raw_text: impl Into<String>, label: Label) -> Self {
        let raw_text = raw_text.into();
        let tokens = preprocess(&raw_text);
        LabeledDocument {
            id,
            raw_text,
            tokens,
            label,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Partition {
    Full,
    Train,
    Test,
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Partition::Full => "full",
            Partition::Train => "train",
            Partition::Test => "test",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub name: String,
    pub partition: Partition,
    documents: Vec<LabeledDocument>,
}

impl Corpus {
    /// Builds a corpus from (text, label) pairs. Ids are assigned densely in
    /// input order.
    pub fn from_records<S: Into<String>>(
        name: impl Into<String>,
        partition: Partition,
        records: impl IntoIterator<Item = (S, Label)>,
    ) -> Result<Self> {
        let mut documents = Vec::new();
        for (id, (text, label)) in records.into_iter().enumerate() {
            if label > 1 {
                return Err(Error::InvalidParameter(format!(
                    "document {id}: label {label} is not binary"
                )));
            }
            documents.push(LabeledDocument::new(id, text, label));
        }
        Ok(Corpus {
            name: name.into(),
            partition,
            documents,
        })
    }

    fn reindexed(name: &str, partition: Partition, docs: Vec<LabeledDocument>) -> Self {
        let documents = docs
            .into_iter()
            .enumerate()
            .map(|(id, mut d)| {
                d.id = id;
                d
            })
            .collect();
        Corpus {
            name: name.to_owned(),
            partition,
            documents,
        }
    }

    pub fn documents(&self) -> &[LabeledDocument] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn labels(&self) -> Vec<Label> {
        self.documents.iter().map(|d| d.label).collect()
    }

    /// Document counts as `[negative, positive]`.
    pub fn class_counts(&self) -> [usize; 2] {
        let mut counts = [0; 2];
        for d in &self.documents {
            counts[d.label as usize] += 1;
        }
        counts
    }

    /// Concatenates two corpora, renumbering ids.
    pub fn concat(name: &str, partition: Partition, parts: &[&Corpus]) -> Corpus {
        let docs = parts.iter().flat_map(|c| c.documents.iter().cloned()).collect();
        Corpus::reindexed(name, partition, docs)
    }
}

fn parse_label(raw: &str) -> Option<Label> {
    match raw.trim() {
        "0" => Some(NEGATIVE),
        "1" => Some(POSITIVE),
        _ => None,
    }
}

fn corpus_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Loads a `sentence<TAB>label` file. Whitespace-only lines are skipped. The
/// label is taken after the last tab on the line.
pub fn load_tsv(path: impl AsRef<Path>) -> Result<Corpus> {
    let path = path.as_ref();
    let content = fs::read_to_string(path)?;
    let mut records = Vec::new();
    for (lineno, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |reason: &str| Error::Parse {
            path: path.to_path_buf(),
            line: lineno + 1,
            reason: reason.to_owned(),
        };
        let (text, raw_label) = line
            .rsplit_once('\t')
            .ok_or_else(|| parse_err("missing tab separator"))?;
        let label =
            parse_label(raw_label).ok_or_else(|| parse_err(&format!("label {:?} is not 0 or 1", raw_label.trim())))?;
        records.push((text.to_owned(), label));
    }
    if records.is_empty() {
        return Err(Error::EmptyCorpus(path.display().to_string()));
    }
    Corpus::from_records(corpus_name(path), Partition::Full, records)
}

/// Loads a manifest of `path<TAB>label` lines. Every non-blank line of each
/// listed file is one document carrying that file's label. Relative paths are
/// resolved against the manifest's directory.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<Corpus> {
    let path = path.as_ref();
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let content = fs::read_to_string(path)?;
    let mut records = Vec::new();
    for (lineno, line) in content.lines().enumerate() {
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let parse_err = |reason: String| Error::Parse {
            path: path.to_path_buf(),
            line: lineno + 1,
            reason,
        };
        let (file, raw_label) = line
            .rsplit_once('\t')
            .ok_or_else(|| parse_err("missing tab separator".into()))?;
        let label =
            parse_label(raw_label).ok_or_else(|| parse_err(format!("label {:?} is not 0 or 1", raw_label.trim())))?;
        let member = base.join(file.trim());
        let text = fs::read_to_string(&member)?;
        records.extend(
            text.lines()
                .filter(|l| !l.trim().is_empty())
                .map(|l| (l.to_owned(), label)),
        );
    }
    if records.is_empty() {
        return Err(Error::EmptyCorpus(path.display().to_string()));
    }
    Corpus::from_records(corpus_name(path), Partition::Full, records)
}

pub const DEFAULT_SPLIT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitSpec {
    pub train_count: usize,
    pub test_count: usize,
    pub seed: u64,
    pub stratified: bool,
}

impl SplitSpec {
    pub fn new(train_count: usize, test_count: usize) -> Self {
        SplitSpec {
            train_count,
            test_count,
            seed: DEFAULT_SPLIT_SEED,
            stratified: true,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Largest-remainder allocation of `train` slots proportional to class sizes.
fn stratified_quotas(counts: [usize; 2], train: usize) -> [usize; 2] {
    let total = counts[0] + counts[1];
    let mut quotas = [0usize; 2];
    let mut remainders = [0usize; 2];
    for k in 0..2 {
        let exact = train * counts[k];
        quotas[k] = exact / total;
        remainders[k] = exact % total;
    }
    let mut left = train - quotas[0] - quotas[1];
    // Ties in remainder go to the positive class.
    let order = if remainders[0] > remainders[1] { [0, 1] } else { [1, 0] };
    for &k in order.iter().cycle().take(4) {
        if left == 0 {
            break;
        }
        if quotas[k] < counts[k] {
            quotas[k] += 1;
            left -= 1;
        }
    }
    quotas
}

/// Splits a corpus into disjoint train and test parts covering every
/// document. Both parts keep the original document order and get fresh
/// dense ids.
pub fn split(corpus: &Corpus, spec: &SplitSpec) -> Result<(Corpus, Corpus)> {
    let len = corpus.len();
    if spec.train_count + spec.test_count != len {
        return Err(Error::SplitCounts {
            train: spec.train_count,
            test: spec.test_count,
            len,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut train_ids = Vec::with_capacity(spec.train_count);
    let mut test_ids = Vec::with_capacity(spec.test_count);
    if spec.stratified && len > 0 {
        let quotas = stratified_quotas(corpus.class_counts(), spec.train_count);
        for (class, &quota) in quotas.iter().enumerate() {
            let mut ids: Vec<usize> = corpus
                .documents
                .iter()
                .filter(|d| d.label as usize == class)
                .map(|d| d.id)
                .collect();
            ids.shuffle(&mut rng);
            train_ids.extend_from_slice(&ids[..quota]);
            test_ids.extend_from_slice(&ids[quota..]);
        }
    } else {
        let mut ids: Vec<usize> = (0..len).collect();
        ids.shuffle(&mut rng);
        test_ids = ids.split_off(spec.train_count);
        train_ids = ids;
    }
    train_ids.sort_unstable();
    test_ids.sort_unstable();
    let take = |ids: &[usize]| ids.iter().map(|&i| corpus.documents[i].clone()).collect();
    Ok((
        Corpus::reindexed(&corpus.name, Partition::Train, take(&train_ids)),
        Corpus::reindexed(&corpus.name, Partition::Test, take(&test_ids)),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn toks(words: &[&str]) -> Vec<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn preprocess_examples() {
        assert_eq!(preprocess("I CAN'T wait!!"), toks(&["i", "cannot", "wait"]));
        assert_eq!(preprocess("abc"), toks(&["abc"]));
        assert!(preprocess("123 $$$").is_empty());
        assert_eq!(
            preprocess("Good case, Excellent value."),
            toks(&["good", "case", "excellent", "value"])
        );
    }

    #[test]
    fn contractions_expand_before_filtering() {
        assert_eq!(preprocess("I don't like it"), toks(&["i", "do", "not", "like", "it"]));
        assert_eq!(preprocess("Won't work"), toks(&["will", "not", "work"]));
        assert_eq!(
            preprocess("they're great, I've seen"),
            toks(&["they", "are", "great", "i", "have", "seen"])
        );
        assert_eq!(
            preprocess("It's fine, let's go"),
            toks(&["it", "is", "fine", "let", "us", "go"])
        );
        assert_eq!(
            preprocess("you'll, he'd, I'm"),
            toks(&["you", "will", "he", "would", "i", "am"])
        );
        assert_eq!(preprocess("isn\u{2019}t"), toks(&["is", "not"]));
        // whole-word rules do not fire inside a word
        assert_eq!(preprocess("bit's"), toks(&["bit", "s"]));
    }

    #[test]
    fn non_ascii_letters_are_dropped() {
        assert_eq!(preprocess("café au lait"), toks(&["caf", "au", "lait"]));
    }

    fn write_file(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
        let p = dir.join(name);
        let mut f = fs::File::create(&p).unwrap();
        f.write_all(body.as_bytes()).unwrap();
        p
    }

    #[test]
    fn load_tsv_parses_records() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_file(dir.path(), "d.txt", "Good case, Excellent value.\t1\n\n   \nbad\t0\r\n");
        let c = load_tsv(&p).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.documents()[0].tokens, toks(&["good", "case", "excellent", "value"]));
        assert_eq!(c.documents()[0].label, 1);
        assert_eq!(c.documents()[1].tokens, toks(&["bad"]));
        assert_eq!(c.documents()[1].id, 1);
        assert_eq!(c.name, "d");
    }

    #[test]
    fn load_tsv_errors() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_file(dir.path(), "a.txt", "no tab here\n");
        match load_tsv(&p) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other:?}"),
        }
        let p = write_file(dir.path(), "b.txt", "ok\t1\nbad label\t2\n");
        match load_tsv(&p) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        let p = write_file(dir.path(), "c.txt", "\n  \n");
        assert!(matches!(load_tsv(&p), Err(Error::EmptyCorpus(_))));
    }

    #[test]
    fn load_manifest_concatenates_files() {
        let dir = tempfile::tempdir().unwrap();
        write_file(dir.path(), "pos.txt", "great stuff\nloved it\n");
        write_file(dir.path(), "neg.txt", "awful\n");
        let m = write_file(dir.path(), "books.manifest", "pos.txt\t1\nneg.txt\t0\n");
        let c = load_manifest(&m).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.class_counts(), [1, 2]);
        assert_eq!(c.name, "books");
    }

    fn balanced(n: usize) -> Corpus {
        Corpus::from_records(
            "bal",
            Partition::Full,
            (0..n).map(|i| (format!("doc number {i}"), (i % 2) as Label)),
        )
        .unwrap()
    }

    #[test]
    fn stratified_split_balanced() {
        let c = balanced(1000);
        let (train, test) = split(&c, &SplitSpec::new(700, 300).with_seed(7)).unwrap();
        assert_eq!(train.class_counts(), [350, 350]);
        assert_eq!(test.class_counts(), [150, 150]);
        assert_eq!(train.partition, Partition::Train);
        assert!(train.documents().iter().enumerate().all(|(i, d)| d.id == i));
    }

    #[test]
    fn degenerate_and_deterministic_split() {
        let c = balanced(40);
        let (train, test) = split(&c, &SplitSpec::new(40, 0)).unwrap();
        assert_eq!(train.documents().len(), 40);
        assert!(test.is_empty());
        assert_eq!(
            train.documents().iter().map(|d| &d.raw_text).collect::<Vec<_>>(),
            c.documents().iter().map(|d| &d.raw_text).collect::<Vec<_>>()
        );
        let a = split(&c, &SplitSpec::new(30, 10).with_seed(3)).unwrap();
        let b = split(&c, &SplitSpec::new(30, 10).with_seed(3)).unwrap();
        assert_eq!(a, b);
        assert!(split(&c, &SplitSpec::new(41, 0)).is_err());
    }

    #[test]
    fn split_is_a_partition() {
        let c = Corpus::from_records(
            "u",
            Partition::Full,
            (0..37).map(|i| (format!("w{i} x"), (i % 3 == 0) as Label)),
        )
        .unwrap();
        for stratified in [true, false] {
            let mut spec = SplitSpec::new(25, 12);
            spec.stratified = stratified;
            let (train, test) = split(&c, &spec).unwrap();
            let mut texts: Vec<_> = train
                .documents()
                .iter()
                .chain(test.documents())
                .map(|d| d.raw_text.clone())
                .collect();
            texts.sort();
            let mut all: Vec<_> = c.documents().iter().map(|d| d.raw_text.clone()).collect();
            all.sort();
            assert_eq!(texts, all);
            if stratified {
                let [n0, n1] = c.class_counts();
                let [t0, t1] = train.class_counts();
                let expect0 = 25.0 * n0 as f64 / 37.0;
                let expect1 = 25.0 * n1 as f64 / 37.0;
                assert!((t0 as f64 - expect0).abs() <= 1.0);
                assert!((t1 as f64 - expect1).abs() <= 1.0);
            }
        }
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn tokens_are_lowercase_alpha(s in "\\PC{0,60}") {
                for t in preprocess(&s) {
                    prop_assert!(!t.is_empty());
                    prop_assert!(t.bytes().all(|b| b.is_ascii_lowercase()));
                }
            }

            #[test]
            fn preprocess_idempotent_on_joined_tokens(s in "[a-zA-Z' ,.!0-9\u{2019}]{0,80}") {
                let tokens = preprocess(&s);
                prop_assert_eq!(preprocess(&tokens.join(" ")), tokens);
            }
        }
    }
}
