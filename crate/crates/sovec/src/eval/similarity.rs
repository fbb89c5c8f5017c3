//! Spearman rank correlation and the word-similarity benchmark protocol.

use crate::error::{Error, Result};
use crate::io::SimilarityDataset;
use crate::types::{cosine, VectorLookup};

/// Spearman's rank correlation: Pearson correlation of the two rank
/// vectors, with ties assigned average ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Config(format!(
            "spearman inputs have lengths {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::Degenerate(
            "spearman needs at least 2 observations".into(),
        ));
    }
    let rx = average_ranks(x);
    let ry = average_ranks(y);
    pearson(&rx, &ry)
}

/// Average ranks (1-based); tied values share the mean of their positions.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite values"));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // positions i..=j (0-based) share rank mean of (i+1)..=(j+1)
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = rank;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (a, b) in x.iter().zip(y.iter()) {
        let da = a - mx;
        let db = b - my;
        cov += da * db;
        vx += da * da;
        vy += db * db;
    }
    if vx == 0.0 || vy == 0.0 {
        return Err(Error::Degenerate(
            "correlation undefined for a constant input".into(),
        ));
    }
    Ok(cov / (vx * vy).sqrt())
}

/// Result of the word-similarity protocol.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct SimilarityEval {
    /// Spearman correlation between model cosines and human scores over
    /// the covered pairs.
    pub rho: f64,
    pub covered: usize,
    pub skipped: usize,
}

/// Scores every pair with cosine similarity and correlates the model
/// ranking with the human ranking.
///
/// Pairs with an out-of-vocabulary word, or whose similarity is undefined
/// (zero-norm vector), are skipped and counted.
pub fn eval_similarity<V: VectorLookup>(
    vectors: &V,
    dataset: &SimilarityDataset,
) -> Result<SimilarityEval> {
    let mut model = Vec::new();
    let mut human = Vec::new();
    let mut skipped = 0usize;
    for (w1, w2, score) in &dataset.pairs {
        match (vectors.get(w1), vectors.get(w2)) {
            (Some(u), Some(v)) => match cosine(u, v) {
                Ok(c) => {
                    model.push(c);
                    human.push(*score);
                }
                Err(Error::Degenerate(_)) => skipped += 1,
                Err(e) => return Err(e),
            },
            _ => skipped += 1,
        }
    }
    if model.len() < 2 {
        return Err(Error::Degenerate(format!(
            "only {} of {} pairs covered; need at least 2 for a correlation",
            model.len(),
            dataset.pairs.len()
        )));
    }
    Ok(SimilarityEval {
        rho: spearman(&model, &human)?,
        covered: model.len(),
        skipped,
    })
}
