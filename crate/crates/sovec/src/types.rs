//! Domain types and the minimal dense/sparse vector arithmetic used
//! throughout the crate.
//!
//! Matrices are stored row-major with one row per word, in 64-bit floats.
//! Sparse rows keep `(index, value)` pairs with strictly ascending indices
//! and no explicitly stored zeros, so sparsity is always exact.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Dense V x L matrix of input word vectors together with its vocabulary.
#[derive(Debug, Clone)]
pub struct EmbeddingMatrix {
    vocab: Vec<String>,
    index: HashMap<String, usize>,
    data: Vec<f64>,
    l: usize,
}

impl EmbeddingMatrix {
    /// Builds a matrix from a vocabulary and row-major data of shape V x L.
    ///
    /// Rejects duplicate words, non-finite entries, and shape mismatches.
    pub fn new(vocab: Vec<String>, data: Vec<f64>, l: usize) -> Result<Self> {
        if l == 0 {
            return Err(Error::Config("embedding length L must be >= 1".into()));
        }
        if data.len() != vocab.len() * l {
            return Err(Error::Config(format!(
                "data has {} values, expected {} words x {} dims",
                data.len(),
                vocab.len(),
                l
            )));
        }
        if let Some(bad) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::Config(format!("non-finite entry {bad} in matrix")));
        }
        let mut index = HashMap::with_capacity(vocab.len());
        for (i, word) in vocab.iter().enumerate() {
            if index.insert(word.clone(), i).is_some() {
                return Err(Error::Config(format!("duplicate word {word:?} in vocabulary")));
            }
        }
        Ok(EmbeddingMatrix {
            vocab,
            index,
            data,
            l,
        })
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    /// Number of words (rows).
    pub fn len(&self) -> usize {
        self.vocab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocab.is_empty()
    }

    /// Vector length L (columns).
    pub fn dims(&self) -> usize {
        self.l
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.l..(i + 1) * self.l]
    }

    pub fn word_index(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    /// Flat row-major data, V*L values.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn rows(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.vocab
            .iter()
            .enumerate()
            .map(|(i, w)| (w.as_str(), self.row(i)))
    }
}

/// Dense L x K dictionary of basis vectors, learned jointly with the codes.
///
/// Row-major: entry `(l, j)` is component `l` of basis column `j`.
#[derive(Debug, Clone)]
pub struct Dictionary {
    data: Vec<f64>,
    l: usize,
    k: usize,
}

impl Dictionary {
    pub fn new(data: Vec<f64>, l: usize, k: usize) -> Result<Self> {
        if data.len() != l * k {
            return Err(Error::Config(format!(
                "dictionary has {} values, expected {l} x {k}",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::Config(format!("non-finite entry {bad} in dictionary")));
        }
        Ok(Dictionary { data, l, k })
    }

    /// Input dimensionality L (rows).
    pub fn input_dims(&self) -> usize {
        self.l
    }

    /// Code length K (columns).
    pub fn code_dims(&self) -> usize {
        self.k
    }

    pub fn entry(&self, l: usize, j: usize) -> f64 {
        self.data[l * self.k + j]
    }

    pub fn entry_mut(&mut self, l: usize, j: usize) -> &mut f64 {
        &mut self.data[l * self.k + j]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Squared Frobenius norm, the tau-weighted term of the training objective.
    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|d| d * d).sum()
    }

    /// x = D a for a sparse code row; `x` must have length L and is overwritten.
    pub fn multiply_sparse_into(&self, pairs: &[(usize, f64)], out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.l);
        out.fill(0.0);
        for &(j, v) in pairs {
            for (l, slot) in out.iter_mut().enumerate() {
                *slot += self.entry(l, j) * v;
            }
        }
    }
}

/// V x K sparse code matrix: per word, ascending `(index, value)` pairs with
/// every stored value nonzero. Absent entries are exact zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseEmbeddings {
    vocab: Vec<String>,
    index: HashMap<String, usize>,
    k: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

impl SparseEmbeddings {
    pub fn new(vocab: Vec<String>, k: usize, rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        if rows.len() != vocab.len() {
            return Err(Error::Config(format!(
                "{} rows for {} words",
                rows.len(),
                vocab.len()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            let mut prev: Option<usize> = None;
            for &(j, v) in row {
                if j >= k {
                    return Err(Error::Config(format!("row {i}: index {j} >= K={k}")));
                }
                if v == 0.0 {
                    return Err(Error::Config(format!("row {i}: stored zero at index {j}")));
                }
                if !v.is_finite() {
                    return Err(Error::Config(format!("row {i}: non-finite value at index {j}")));
                }
                if prev.is_some_and(|p| p >= j) {
                    return Err(Error::Config(format!(
                        "row {i}: indices not strictly ascending at {j}"
                    )));
                }
                prev = Some(j);
            }
        }
        let mut index = HashMap::with_capacity(vocab.len());
        for (i, word) in vocab.iter().enumerate() {
            if index.insert(word.clone(), i).is_some() {
                return Err(Error::Config(format!("duplicate word {word:?} in vocabulary")));
            }
        }
        Ok(SparseEmbeddings {
            vocab,
            index,
            k,
            rows,
        })
    }

    /// Collects the nonzero entries of dense row-major codes. Exact zeros
    /// (of either sign) become absent entries.
    pub fn from_dense(vocab: Vec<String>, k: usize, dense: &[f64]) -> Result<Self> {
        let rows = dense
            .chunks(k)
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0.0)
                    .map(|(j, v)| (j, *v))
                    .collect()
            })
            .collect();
        SparseEmbeddings::new(vocab, k, rows)
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    pub fn len(&self) -> usize {
        self.vocab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocab.is_empty()
    }

    /// Code length K.
    pub fn dims(&self) -> usize {
        self.k
    }

    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn word_index(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn rows(&self) -> impl Iterator<Item = (&str, &[(usize, f64)])> {
        self.vocab
            .iter()
            .zip(self.rows.iter())
            .map(|(w, r)| (w.as_str(), r.as_slice()))
    }

    /// Total number of stored (nonzero) entries.
    pub fn stored(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Fraction of exactly-zero cells over the full V x K grid.
    pub fn sparsity(&self) -> f64 {
        let cells = self.len() * self.k;
        assert!(cells > 0, "sparsity undefined for an empty code matrix");
        1.0 - self.stored() as f64 / cells as f64
    }

    /// Dense V x K row-major copy; absent entries densify to literal 0.0.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut dense = vec![0.0; self.len() * self.k];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                dense[i * self.k + j] = v;
            }
        }
        dense
    }

    /// Densifies into an [`EmbeddingMatrix`] (for clustering, intrusion
    /// generation, or dense-text output).
    pub fn to_matrix(&self) -> Result<EmbeddingMatrix> {
        EmbeddingMatrix::new(self.vocab.clone(), self.to_dense(), self.k)
    }
}

/// V x K binary codes: per word, the strictly ascending set of active indices.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryEmbeddings {
    vocab: Vec<String>,
    index: HashMap<String, usize>,
    k: usize,
    rows: Vec<Vec<usize>>,
}

impl BinaryEmbeddings {
    pub fn new(vocab: Vec<String>, k: usize, rows: Vec<Vec<usize>>) -> Result<Self> {
        if rows.len() != vocab.len() {
            return Err(Error::Config(format!(
                "{} rows for {} words",
                rows.len(),
                vocab.len()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            let mut prev: Option<usize> = None;
            for &j in row {
                if j >= k {
                    return Err(Error::Config(format!("row {i}: index {j} >= K={k}")));
                }
                if prev.is_some_and(|p| p >= j) {
                    return Err(Error::Config(format!(
                        "row {i}: indices not strictly ascending at {j}"
                    )));
                }
                prev = Some(j);
            }
        }
        let mut index = HashMap::with_capacity(vocab.len());
        for (i, word) in vocab.iter().enumerate() {
            if index.insert(word.clone(), i).is_some() {
                return Err(Error::Config(format!("duplicate word {word:?} in vocabulary")));
            }
        }
        Ok(BinaryEmbeddings {
            vocab,
            index,
            k,
            rows,
        })
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    pub fn len(&self) -> usize {
        self.vocab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocab.is_empty()
    }

    pub fn dims(&self) -> usize {
        self.k
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.rows[i]
    }

    pub fn word_index(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn rows(&self) -> impl Iterator<Item = (&str, &[usize])> {
        self.vocab
            .iter()
            .zip(self.rows.iter())
            .map(|(w, r)| (w.as_str(), r.as_slice()))
    }

    /// Active indices become value 1.0, everything else stays zero.
    pub fn to_sparse(&self) -> SparseEmbeddings {
        let rows = self
            .rows
            .iter()
            .map(|row| row.iter().map(|&j| (j, 1.0)).collect())
            .collect();
        SparseEmbeddings::new(self.vocab.clone(), self.k, rows)
            .expect("binary rows are valid sparse rows")
    }

    pub fn to_matrix(&self) -> Result<EmbeddingMatrix> {
        let mut dense = vec![0.0; self.len() * self.k];
        for (i, row) in self.rows.iter().enumerate() {
            for &j in row {
                dense[i * self.k + j] = 1.0;
            }
        }
        EmbeddingMatrix::new(self.vocab.clone(), dense, self.k)
    }
}

/// Borrowed view of a word vector in either storage form.
#[derive(Debug, Clone, Copy)]
pub enum VectorRef<'a> {
    Dense(&'a [f64]),
    Sparse { pairs: &'a [(usize, f64)], dim: usize },
}

impl VectorRef<'_> {
    pub fn dim(&self) -> usize {
        match self {
            VectorRef::Dense(v) => v.len(),
            VectorRef::Sparse { dim, .. } => *dim,
        }
    }

    fn norm_sq(&self) -> f64 {
        match self {
            VectorRef::Dense(v) => v.iter().map(|x| x * x).sum(),
            VectorRef::Sparse { pairs, .. } => pairs.iter().map(|(_, x)| x * x).sum(),
        }
    }
}

/// Word-to-vector lookup shared by the evaluation protocols.
pub trait VectorLookup {
    /// Vector length (L for dense inputs, K for codes).
    fn dim(&self) -> usize;
    fn get(&self, word: &str) -> Option<VectorRef<'_>>;
}

impl VectorLookup for EmbeddingMatrix {
    fn dim(&self) -> usize {
        self.l
    }

    fn get(&self, word: &str) -> Option<VectorRef<'_>> {
        self.word_index(word).map(|i| VectorRef::Dense(self.row(i)))
    }
}

impl VectorLookup for SparseEmbeddings {
    fn dim(&self) -> usize {
        self.k
    }

    fn get(&self, word: &str) -> Option<VectorRef<'_>> {
        self.word_index(word).map(|i| VectorRef::Sparse {
            pairs: self.row(i),
            dim: self.k,
        })
    }
}

fn dot(u: &VectorRef<'_>, v: &VectorRef<'_>) -> f64 {
    match (u, v) {
        (VectorRef::Dense(a), VectorRef::Dense(b)) => {
            a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
        }
        (VectorRef::Sparse { pairs, .. }, VectorRef::Dense(b)) => {
            pairs.iter().map(|&(j, x)| x * b[j]).sum()
        }
        (VectorRef::Dense(_), VectorRef::Sparse { .. }) => dot(v, u),
        (VectorRef::Sparse { pairs: a, .. }, VectorRef::Sparse { pairs: b, .. }) => {
            // Walk only the intersection of the two active-index sets.
            let mut sum = 0.0;
            let (mut i, mut j) = (0, 0);
            while i < a.len() && j < b.len() {
                let (ja, va) = a[i];
                let (jb, vb) = b[j];
                if ja == jb {
                    sum += va * vb;
                    i += 1;
                    j += 1;
                } else if ja < jb {
                    i += 1;
                } else {
                    j += 1;
                }
            }
            sum
        }
    }
}

/// Cosine similarity of two vectors of equal length.
///
/// A zero-norm argument is an error rather than a NaN.
pub fn cosine(u: VectorRef<'_>, v: VectorRef<'_>) -> Result<f64> {
    if u.dim() != v.dim() {
        return Err(Error::Config(format!(
            "cosine of vectors with different lengths {} and {}",
            u.dim(),
            v.dim()
        )));
    }
    let nu = u.norm_sq();
    let nv = v.norm_sq();
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::Degenerate(
            "cosine similarity undefined for a zero-norm vector".into(),
        ));
    }
    Ok(dot(&u, &v) / (nu.sqrt() * nv.sqrt()))
}

/// Cosine similarity of two dense slices.
pub fn cosine_dense(u: &[f64], v: &[f64]) -> Result<f64> {
    cosine(VectorRef::Dense(u), VectorRef::Dense(v))
}
