//! Alternative length-preserving transformations used as comparison
//! points: per-entry sign binarization and mean thresholding to {-1, 0, 1}.

use crate::types::{BinaryEmbeddings, EmbeddingMatrix};

/// Global means of the strictly positive and strictly negative entries of a
/// matrix. A side with no entries of that sign is disabled (`None`) and the
/// corresponding output symbol is never produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanThresholds {
    pub positive: Option<f64>,
    pub negative: Option<f64>,
}

/// Computes M+ and M- over all entries of the matrix. Exact zeros count
/// toward neither mean.
pub fn mean_thresholds(x: &EmbeddingMatrix) -> MeanThresholds {
    let mut pos_sum = 0.0;
    let mut pos_n = 0u64;
    let mut neg_sum = 0.0;
    let mut neg_n = 0u64;
    for &v in x.data() {
        if v > 0.0 {
            pos_sum += v;
            pos_n += 1;
        } else if v < 0.0 {
            neg_sum += v;
            neg_n += 1;
        }
    }
    MeanThresholds {
        positive: (pos_n > 0).then(|| pos_sum / pos_n as f64),
        negative: (neg_n > 0).then(|| neg_sum / neg_n as f64),
    }
}

/// Binary transform that keeps the original vector length: index j is
/// active iff x_{i,j} > 0 (zeros map to inactive).
pub fn sign_binarize(x: &EmbeddingMatrix) -> BinaryEmbeddings {
    let l = x.dims();
    let rows = (0..x.len())
        .map(|i| {
            x.row(i)
                .iter()
                .enumerate()
                .filter(|(_, v)| **v > 0.0)
                .map(|(j, _)| j)
                .collect()
        })
        .collect();
    BinaryEmbeddings::new(x.vocab().to_vec(), l, rows)
        .expect("ascending filtered indices are valid")
}

/// Ternary transform: 1 where x >= M+, -1 where x <= M-, else 0, with the
/// means taken over the whole matrix. Returns the thresholds so callers can
/// report a disabled branch.
pub fn mean_threshold(x: &EmbeddingMatrix) -> (EmbeddingMatrix, MeanThresholds) {
    let thresholds = mean_thresholds(x);
    let data = x
        .data()
        .iter()
        .map(|&v| match thresholds {
            MeanThresholds {
                positive: Some(p), ..
            } if v >= p => 1.0,
            MeanThresholds {
                negative: Some(n), ..
            } if v <= n => -1.0,
            _ => 0.0,
        })
        .collect();
    let out = EmbeddingMatrix::new(x.vocab().to_vec(), data, x.dims())
        .expect("ternary values are finite");
    (out, thresholds)
}
