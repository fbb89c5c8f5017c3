//! Text readers and writers for embedding matrices, sparse codes, and the
//! evaluation datasets.
//!
//! All files are UTF-8; readers accept LF or CRLF, writers emit LF. Word
//! tokens may not contain whitespace. Values are serialized with Rust's
//! shortest round-trip decimal representation, so write -> read restores
//! every f64 bit-exactly.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::types::{BinaryEmbeddings, EmbeddingMatrix, SparseEmbeddings};

/// Input format of an embedding text file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EmbeddingFormat {
    /// Headered when the first line is exactly two integers, plain otherwise.
    #[default]
    Auto,
    /// First line "V L", then V records.
    Headered,
    /// One record per line: "word v1 ... vL".
    Plain,
}

impl std::str::FromStr for EmbeddingFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "auto" => Ok(EmbeddingFormat::Auto),
            "headered" => Ok(EmbeddingFormat::Headered),
            "plain" => Ok(EmbeddingFormat::Plain),
            other => Err(format!("unknown format {other:?} (auto|headered|plain)")),
        }
    }
}

/// On-disk layout for sparse codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SparseLayout {
    /// "word v1 ... vK" with literal 0 for absent entries; readable by
    /// [`read_embeddings`].
    #[default]
    DenseText,
    /// "word idx:val ..." with ascending indices; the compact option at
    /// high sparsity.
    IndexValue,
}

impl std::str::FromStr for SparseLayout {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "dense-text" => Ok(SparseLayout::DenseText),
            "index-value" => Ok(SparseLayout::IndexValue),
            other => Err(format!(
                "unknown layout {other:?} (dense-text|index-value)"
            )),
        }
    }
}

/// A parsed embedding file plus the count of duplicate words that were
/// dropped (first occurrence wins).
#[derive(Debug)]
pub struct ReadOutcome {
    pub matrix: EmbeddingMatrix,
    pub duplicates_skipped: usize,
}

/// Reads a dense embedding matrix from text.
///
/// L is taken from the header if present, else inferred from the first
/// record. Ragged or non-numeric rows are reported with their line number.
pub fn read_embeddings(path: impl AsRef<Path>, format: EmbeddingFormat) -> Result<ReadOutcome> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut lines = BufReader::new(file).lines().enumerate();

    let mut vocab: Vec<String> = Vec::new();
    let mut data: Vec<f64> = Vec::new();
    let mut l: Option<usize> = None;
    let mut declared_v: Option<usize> = None;
    let mut duplicates = 0usize;
    let mut first_record: Option<(usize, String)> = None;

    if let Some((idx, line)) = lines.next() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let lineno = idx + 1;
        match format {
            EmbeddingFormat::Headered => {
                let (v, cols) = parse_header(path, lineno, &line)?;
                declared_v = Some(v);
                l = Some(cols);
            }
            EmbeddingFormat::Auto => {
                if let Ok((v, cols)) = parse_header(path, lineno, &line) {
                    declared_v = Some(v);
                    l = Some(cols);
                } else {
                    first_record = Some((lineno, line));
                }
            }
            EmbeddingFormat::Plain => first_record = Some((lineno, line)),
        }
    } else {
        return Err(Error::parse(path, 1, "empty embedding file"));
    }

    let mut handle_record = |lineno: usize, line: &str| -> Result<()> {
        if line.trim().is_empty() {
            return Ok(());
        }
        let (word, values) = parse_record(path, lineno, line, l)?;
        if l.is_none() {
            l = Some(values.len());
        }
        if vocab.iter().any(|w| w == &word) {
            duplicates += 1;
            return Ok(());
        }
        vocab.push(word);
        data.extend(values);
        Ok(())
    };

    if let Some((lineno, line)) = first_record {
        handle_record(lineno, &line)?;
    }
    for (idx, line) in lines {
        let line = line.map_err(|e| Error::io(path, e))?;
        handle_record(idx + 1, &line)?;
    }

    let l = l.ok_or_else(|| Error::parse(path, 1, "no records in embedding file"))?;
    if let Some(v) = declared_v {
        if vocab.len() != v {
            return Err(Error::parse(
                path,
                1,
                format!("header declares {v} words, file has {}", vocab.len()),
            ));
        }
    }
    let matrix = EmbeddingMatrix::new(vocab, data, l).map_err(|e| match e {
        Error::Config(msg) => Error::parse(path, 1, msg),
        other => other,
    })?;
    Ok(ReadOutcome {
        matrix,
        duplicates_skipped: duplicates,
    })
}

fn parse_header(path: &Path, lineno: usize, line: &str) -> Result<(usize, usize)> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(Error::parse(path, lineno, "header must be \"V L\""));
    }
    let v = fields[0]
        .parse::<usize>()
        .map_err(|_| Error::parse(path, lineno, format!("bad vocabulary size {:?}", fields[0])))?;
    let l = fields[1]
        .parse::<usize>()
        .map_err(|_| Error::parse(path, lineno, format!("bad vector length {:?}", fields[1])))?;
    Ok((v, l))
}

fn parse_record(
    path: &Path,
    lineno: usize,
    line: &str,
    expected_l: Option<usize>,
) -> Result<(String, Vec<f64>)> {
    let mut fields = line.split_whitespace();
    let word = fields
        .next()
        .ok_or_else(|| Error::parse(path, lineno, "missing word"))?
        .to_string();
    let mut values = Vec::new();
    for field in fields {
        let value: f64 = field.parse().map_err(|_| {
            Error::parse(path, lineno, format!("non-numeric field {field:?}"))
        })?;
        if !value.is_finite() {
            return Err(Error::parse(
                path,
                lineno,
                format!("non-finite value {field:?}"),
            ));
        }
        values.push(value);
    }
    if values.is_empty() {
        return Err(Error::parse(path, lineno, "record has no values"));
    }
    if let Some(l) = expected_l {
        if values.len() != l {
            return Err(Error::parse(
                path,
                lineno,
                format!("expected {l} values, found {}", values.len()),
            ));
        }
    }
    Ok((word, values))
}

/// Writes a dense matrix as "word v1 ... vL" lines, optionally preceded by
/// a "V L" header.
pub fn write_embeddings(
    path: impl AsRef<Path>,
    matrix: &EmbeddingMatrix,
    headered: bool,
) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let write = |out: &mut BufWriter<File>| -> std::io::Result<()> {
        if headered {
            writeln!(out, "{} {}", matrix.len(), matrix.dims())?;
        }
        for (word, row) in matrix.rows() {
            write!(out, "{word}")?;
            for v in row {
                write!(out, " {v}")?;
            }
            writeln!(out)?;
        }
        out.flush()
    };
    write(&mut out).map_err(|e| Error::io(path, e))
}

/// Writes sparse codes in the requested layout.
pub fn write_sparse(
    path: impl AsRef<Path>,
    codes: &SparseEmbeddings,
    layout: SparseLayout,
) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let k = codes.dims();
    let write = |out: &mut BufWriter<File>| -> std::io::Result<()> {
        for (word, row) in codes.rows() {
            write!(out, "{word}")?;
            match layout {
                SparseLayout::DenseText => {
                    let mut next = row.iter().peekable();
                    for j in 0..k {
                        match next.peek() {
                            Some(&&(idx, v)) if idx == j => {
                                write!(out, " {v}")?;
                                next.next();
                            }
                            _ => write!(out, " 0")?,
                        }
                    }
                }
                SparseLayout::IndexValue => {
                    for &(j, v) in row {
                        write!(out, " {j}:{v}")?;
                    }
                }
            }
            writeln!(out)?;
        }
        out.flush()
    };
    write(&mut out).map_err(|e| Error::io(path, e))
}

/// Reads codes written in the index-value layout.
pub fn read_sparse(path: impl AsRef<Path>, k: usize) -> Result<SparseEmbeddings> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut vocab = Vec::new();
    let mut rows = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let word = fields
            .next()
            .ok_or_else(|| Error::parse(path, lineno, "missing word"))?;
        let mut row = Vec::new();
        for field in fields {
            let (j, v) = field.split_once(':').ok_or_else(|| {
                Error::parse(path, lineno, format!("expected idx:val, found {field:?}"))
            })?;
            let j: usize = j
                .parse()
                .map_err(|_| Error::parse(path, lineno, format!("bad index {j:?}")))?;
            let v: f64 = v
                .parse()
                .map_err(|_| Error::parse(path, lineno, format!("bad value {v:?}")))?;
            row.push((j, v));
        }
        vocab.push(word.to_string());
        rows.push(row);
    }
    if vocab.is_empty() {
        return Err(Error::parse(path, 1, "empty sparse code file"));
    }
    SparseEmbeddings::new(vocab, k, rows).map_err(|e| match e {
        Error::Config(msg) => Error::parse(path, 1, msg),
        other => other,
    })
}

/// Writes binary codes as dense 0/1 text (readable by [`read_embeddings`]).
pub fn write_binary(path: impl AsRef<Path>, codes: &BinaryEmbeddings) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let k = codes.dims();
    let write = |out: &mut BufWriter<File>| -> std::io::Result<()> {
        for (word, row) in codes.rows() {
            write!(out, "{word}")?;
            let mut next = row.iter().peekable();
            for j in 0..k {
                match next.peek() {
                    Some(&&idx) if idx == j => {
                        write!(out, " 1")?;
                        next.next();
                    }
                    _ => write!(out, " 0")?,
                }
            }
            writeln!(out)?;
        }
        out.flush()
    };
    write(&mut out).map_err(|e| Error::io(path, e))
}

/// Writes a dictionary with an "L K" header followed by L rows of K values.
pub fn write_dictionary(path: impl AsRef<Path>, dict: &crate::types::Dictionary) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let write = |out: &mut BufWriter<File>| -> std::io::Result<()> {
        writeln!(out, "{} {}", dict.input_dims(), dict.code_dims())?;
        for lrow in 0..dict.input_dims() {
            for j in 0..dict.code_dims() {
                if j > 0 {
                    write!(out, " ")?;
                }
                write!(out, "{}", dict.entry(lrow, j))?;
            }
            writeln!(out)?;
        }
        out.flush()
    };
    write(&mut out).map_err(|e| Error::io(path, e))
}

/// Reads a dictionary written by [`write_dictionary`].
pub fn read_dictionary(path: impl AsRef<Path>) -> Result<crate::types::Dictionary> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut lines = BufReader::new(file).lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse(path, 1, "empty dictionary file"))?;
    let header = header.map_err(|e| Error::io(path, e))?;
    let (l, k) = parse_header(path, 1, &header)?;
    let mut data = Vec::with_capacity(l * k);
    for (idx, line) in lines {
        let line = line.map_err(|e| Error::io(path, e))?;
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        for field in line.split_whitespace() {
            let v: f64 = field.parse().map_err(|_| {
                Error::parse(path, lineno, format!("non-numeric field {field:?}"))
            })?;
            data.push(v);
        }
    }
    if data.len() != l * k {
        return Err(Error::parse(
            path,
            1,
            format!("expected {} values, found {}", l * k, data.len()),
        ));
    }
    crate::types::Dictionary::new(data, l, k).map_err(|e| match e {
        Error::Config(msg) => Error::parse(path, 1, msg),
        other => other,
    })
}

/// Word-pair similarity judgments: (word1, word2, human score).
#[derive(Debug, Clone)]
pub struct SimilarityDataset {
    pub pairs: Vec<(String, String, f64)>,
}

/// Reads "word1 word2 score" lines (whitespace or TAB separated).
pub fn read_similarity(path: impl AsRef<Path>) -> Result<SimilarityDataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut pairs = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::parse(
                path,
                lineno,
                format!("expected 3 fields (word1 word2 score), found {}", fields.len()),
            ));
        }
        let score: f64 = fields[2].parse().map_err(|_| {
            Error::parse(path, lineno, format!("bad score {:?}", fields[2]))
        })?;
        if !score.is_finite() {
            return Err(Error::parse(path, lineno, "non-finite score"));
        }
        pairs.push((fields[0].to_string(), fields[1].to_string(), score));
    }
    if pairs.is_empty() {
        return Err(Error::parse(path, 1, "empty similarity file"));
    }
    Ok(SimilarityDataset { pairs })
}

/// Tokenized classification examples with their label set.
#[derive(Debug, Clone)]
pub struct LabeledTextDataset {
    pub examples: Vec<(Vec<String>, usize)>,
    pub labels: Vec<String>,
    /// Examples whose text tokenized to nothing; they featurize to zero
    /// vectors and are flagged rather than dropped.
    pub empty_examples: usize,
}

/// Reads "label<TAB>text" lines with whitespace tokenization.
pub fn read_labeled(path: impl AsRef<Path>, lowercase: bool) -> Result<LabeledTextDataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut labels: Vec<String> = Vec::new();
    let mut examples = Vec::new();
    let mut empty_examples = 0usize;
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let (label, text) = line.split_once('\t').ok_or_else(|| {
            Error::parse(path, lineno, "expected \"label<TAB>text\"")
        })?;
        let label = label.trim();
        if label.is_empty() {
            return Err(Error::parse(path, lineno, "empty label"));
        }
        let label_id = match labels.iter().position(|l| l == label) {
            Some(id) => id,
            None => {
                labels.push(label.to_string());
                labels.len() - 1
            }
        };
        let tokens: Vec<String> = text
            .split_whitespace()
            .map(|t| {
                if lowercase {
                    t.to_lowercase()
                } else {
                    t.to_string()
                }
            })
            .collect();
        if tokens.is_empty() {
            empty_examples += 1;
        }
        examples.push((tokens, label_id));
    }
    if examples.is_empty() {
        return Err(Error::parse(path, 1, "empty labeled file"));
    }
    Ok(LabeledTextDataset {
        examples,
        labels,
        empty_examples,
    })
}
