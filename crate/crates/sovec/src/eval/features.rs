//! Turning token sequences into classifier feature vectors.

use crate::error::{Error, Result};
use crate::io::LabeledTextDataset;
use crate::types::{VectorLookup, VectorRef};

/// How a token sequence becomes one feature vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureMode {
    /// Mean of the in-vocabulary token vectors.
    Average,
    /// In-order concatenation; every example must have exactly `tokens`
    /// tokens, and out-of-vocabulary slots are zero-filled.
    Concat { tokens: usize },
}

/// One featurized example.
#[derive(Debug, Clone)]
pub struct Features {
    pub values: Vec<f64>,
    /// Tokens that were not found in the vocabulary.
    pub oov: usize,
    /// True when no token was in vocabulary; `values` is all zeros then.
    pub all_oov: bool,
}

fn add_into(acc: &mut [f64], v: VectorRef<'_>) {
    match v {
        VectorRef::Dense(row) => {
            for (slot, x) in acc.iter_mut().zip(row.iter()) {
                *slot += x;
            }
        }
        VectorRef::Sparse { pairs, .. } => {
            for &(j, x) in pairs {
                acc[j] += x;
            }
        }
    }
}

/// Builds a feature vector from tokens. Average mode skips OOV tokens and
/// divides by the in-vocabulary count; concat mode zero-fills OOV slots.
pub fn featurize<V: VectorLookup>(
    tokens: &[String],
    vectors: &V,
    mode: FeatureMode,
) -> Result<Features> {
    let dim = vectors.dim();
    match mode {
        FeatureMode::Average => {
            let mut values = vec![0.0; dim];
            let mut found = 0usize;
            for token in tokens {
                if let Some(v) = vectors.get(token) {
                    add_into(&mut values, v);
                    found += 1;
                }
            }
            if found > 0 {
                let inv = 1.0 / found as f64;
                for v in &mut values {
                    *v *= inv;
                }
            }
            Ok(Features {
                values,
                oov: tokens.len() - found,
                all_oov: found == 0,
            })
        }
        FeatureMode::Concat { tokens: expected } => {
            if tokens.len() != expected {
                return Err(Error::Config(format!(
                    "concat mode expects {expected} tokens per example, found {}",
                    tokens.len()
                )));
            }
            let mut values = vec![0.0; expected * dim];
            let mut found = 0usize;
            for (slot, token) in tokens.iter().enumerate() {
                if let Some(v) = vectors.get(token) {
                    add_into(&mut values[slot * dim..(slot + 1) * dim], v);
                    found += 1;
                }
            }
            Ok(Features {
                values,
                oov: tokens.len() - found,
                all_oov: found == 0,
            })
        }
    }
}

/// A featurized dataset ready for the classifer: one row per example.
#[derive(Debug, Clone)]
pub struct FeatureSet {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub classes: Vec<String>,
    /// Examples that featurized to all-zero vectors (every token OOV).
    pub all_oov_examples: usize,
}

impl FeatureSet {
    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.first().map_or(0, Vec::len)
    }
}

/// Featurizes every example of a labeled dataset with the same mode.
pub fn featurize_dataset<V: VectorLookup>(
    dataset: &LabeledTextDataset,
    vectors: &V,
    mode: FeatureMode,
) -> Result<FeatureSet> {
    let mut features = Vec::with_capacity(dataset.examples.len());
    let mut labels = Vec::with_capacity(dataset.examples.len());
    let mut all_oov = 0usize;
    for (tokens, label) in &dataset.examples {
        let f = featurize(tokens, vectors, mode)?;
        if f.all_oov {
            all_oov += 1;
        }
        features.push(f.values);
        labels.push(*label);
    }
    Ok(FeatureSet {
        features,
        labels,
        classes: dataset.labels.clone(),
        all_oov_examples: all_oov,
    })
}
