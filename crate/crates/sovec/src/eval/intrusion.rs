//! Word-intrusion instance generation for the interpretability study.
//!
//! For each chosen dimension (highest variance first) an instance pairs the
//! four top-ranked words with one intruder: a word from the bottom half of
//! that dimension's ranking that sits in the top decile of some other
//! dimension. Judges then try to spot the intruder among the shuffled five.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::types::EmbeddingMatrix;

#[derive(Debug, Clone)]
pub struct IntrusionInstance {
    pub dimension: usize,
    /// The four highest-valued words on the dimension, best first.
    pub top_words: Vec<String>,
    pub intruder: String,
    /// The five words in shuffled presentation order.
    pub presentation: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct IntrusionReport {
    pub instances: Vec<IntrusionInstance>,
    /// Dimensions selected by variance but skipped for lack of a valid
    /// intruder.
    pub skipped_dimensions: Vec<usize>,
}

/// Generates up to `per_dim` instances for each of the `n_dims`
/// highest-variance dimensions. Intruders are sampled uniformly (without
/// replacement within a dimension) among all valid candidates.
pub fn gen_intrusions(
    matrix: &EmbeddingMatrix,
    n_dims: usize,
    per_dim: usize,
    seed: u64,
) -> Result<IntrusionReport> {
    let v = matrix.len();
    let k = matrix.dims();
    if v < 5 {
        return Err(Error::Degenerate(format!(
            "intrusion instances need at least 5 words, vocabulary has {v}"
        )));
    }

    // Rank words per dimension, descending by value with the vocabulary
    // index breaking ties, so the generation is fully deterministic.
    let mut orders: Vec<Vec<usize>> = Vec::with_capacity(k);
    let mut variances = Vec::with_capacity(k);
    for d in 0..k {
        let column: Vec<f64> = (0..v).map(|i| matrix.row(i)[d]).collect();
        let mean = column.iter().sum::<f64>() / v as f64;
        variances.push(column.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / v as f64);
        let mut order: Vec<usize> = (0..v).collect();
        order.sort_by(|&a, &b| {
            column[b]
                .partial_cmp(&column[a])
                .expect("finite values")
                .then(a.cmp(&b))
        });
        orders.push(order);
    }

    // Which dimensions rank each word inside their top decile.
    let decile = (v as f64 * 0.1).ceil() as usize;
    let mut decile_dims: Vec<Vec<usize>> = vec![Vec::new(); v];
    for (d, order) in orders.iter().enumerate() {
        for &word in &order[..decile] {
            decile_dims[word].push(d);
        }
    }

    let mut by_variance: Vec<usize> = (0..k).collect();
    by_variance.sort_by(|&a, &b| {
        variances[b]
            .partial_cmp(&variances[a])
            .expect("finite variance")
            .then(a.cmp(&b))
    });

    let bottom = v / 2;
    let mut rng = <ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
    let mut instances = Vec::new();
    let mut skipped = Vec::new();
    for &d in by_variance.iter().take(n_dims.min(k)) {
        let order = &orders[d];
        let top4: Vec<usize> = order[..4].to_vec();
        let mut candidates: Vec<usize> = order[v - bottom..]
            .iter()
            .copied()
            .filter(|w| !top4.contains(w))
            .filter(|&w| decile_dims[w].iter().any(|&other| other != d))
            .collect();
        if candidates.is_empty() {
            skipped.push(d);
            continue;
        }
        let count = per_dim.min(candidates.len());
        for _ in 0..count {
            let pick = rng.gen_range(0..candidates.len());
            let intruder = candidates.swap_remove(pick);
            let top_words: Vec<String> =
                top4.iter().map(|&w| matrix.vocab()[w].clone()).collect();
            let mut presentation: Vec<String> = top_words.clone();
            presentation.push(matrix.vocab()[intruder].clone());
            presentation.shuffle(&mut rng);
            instances.push(IntrusionInstance {
                dimension: d,
                top_words,
                intruder: matrix.vocab()[intruder].clone(),
                presentation,
            });
        }
    }
    Ok(IntrusionReport {
        instances,
        skipped_dimensions: skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn matrix(vocab: &[&str], rows: &[&[f64]]) -> EmbeddingMatrix {
        let l = rows[0].len();
        let data = rows.iter().flat_map(|r| r.iter().copied()).collect();
        EmbeddingMatrix::new(vocab.iter().map(|w| w.to_string()).collect(), data, l).unwrap()
    }

    /// Six words, two dimensions, engineered so w4 is the only valid
    /// intruder for the high-variance dimension 0: it is in the bottom half
    /// of dim 0 and tops dim 1, while w5 tops nothing.
    fn toy() -> EmbeddingMatrix {
        matrix(
            &["w0", "w1", "w2", "w3", "w4", "w5"],
            &[
                &[10.0, 0.0],
                &[9.0, 1.0],
                &[8.0, 0.5],
                &[7.0, 0.2],
                &[2.0, 5.0],
                &[1.0, 0.1],
            ],
        )
    }

    #[test]
    fn toy_selects_the_unique_valid_intruder() {
        let report = gen_intrusions(&toy(), 1, 3, 123).unwrap();
        // only one candidate exists, so only one instance can be emitted
        assert_eq!(report.instances.len(), 1);
        let inst = &report.instances[0];
        assert_eq!(inst.dimension, 0);
        assert_eq!(inst.top_words, vec!["w0", "w1", "w2", "w3"]);
        assert_eq!(inst.intruder, "w4");
        assert!(report.skipped_dimensions.is_empty());
    }

    #[test]
    fn instance_shape_is_four_plus_one_distinct() {
        let report = gen_intrusions(&toy(), 1, 1, 9).unwrap();
        let inst = &report.instances[0];
        assert_eq!(inst.presentation.len(), 5);
        let mut sorted = inst.presentation.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 5, "all five presented words are distinct");
        assert!(inst.presentation.contains(&inst.intruder));
        for w in &inst.top_words {
            assert!(inst.presentation.contains(w));
        }
    }

    #[test]
    fn dimension_without_valid_intruder_is_skipped() {
        // bottom-half words of dim 0 (w4, w5) are in nobody's top decile:
        // top-1 of dim 1 is w0.
        let m = matrix(
            &["w0", "w1", "w2", "w3", "w4", "w5"],
            &[
                &[10.0, 5.0],
                &[9.0, 1.0],
                &[8.0, 0.5],
                &[7.0, 0.2],
                &[2.0, 0.05],
                &[1.0, 0.1],
            ],
        );
        let report = gen_intrusions(&m, 1, 1, 3).unwrap();
        assert!(report.instances.is_empty());
        assert_eq!(report.skipped_dimensions, vec![0]);
    }

    #[test]
    fn random_instances_satisfy_the_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        let v = 40;
        let k = 8;
        let vocab: Vec<String> = (0..v).map(|i| format!("w{i}")).collect();
        let data: Vec<f64> = (0..v * k).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let m = EmbeddingMatrix::new(vocab, data, k).unwrap();
        let report = gen_intrusions(&m, 5, 3, 77).unwrap();
        assert!(!report.instances.is_empty());
        let decile = (v as f64 * 0.1).ceil() as usize;
        for inst in &report.instances {
            let d = inst.dimension;
            let column: Vec<f64> = (0..v).map(|i| m.row(i)[d]).collect();
            // top_words are the 4 highest on the dimension
            let mut by_value: Vec<usize> = (0..v).collect();
            by_value.sort_by(|&a, &b| column[b].partial_cmp(&column[a]).unwrap().then(a.cmp(&b)));
            let expected_top: Vec<String> = by_value[..4]
                .iter()
                .map(|&w| m.vocab()[w].clone())
                .collect();
            assert_eq!(inst.top_words, expected_top);

            // intruder value is below (or at) the dimension median
            let wi = m.word_index(&inst.intruder).unwrap();
            let mut sorted = column.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let median = if v % 2 == 1 {
                sorted[v / 2]
            } else {
                (sorted[v / 2 - 1] + sorted[v / 2]) / 2.0
            };
            assert!(column[wi] <= median, "intruder above the median");

            // intruder is in the top decile of some other dimension
            let in_decile = (0..k).filter(|&other| other != d).any(|other| {
                let col: Vec<f64> = (0..v).map(|i| m.row(i)[other]).collect();
                let mut order: Vec<usize> = (0..v).collect();
                order.sort_by(|&a, &b| col[b].partial_cmp(&col[a]).unwrap().then(a.cmp(&b)));
                order[..decile].contains(&wi)
            });
            assert!(in_decile, "intruder not in any other top decile");

            // five distinct words
            let mut words = inst.presentation.clone();
            words.sort();
            words.dedup();
            assert_eq!(words.len(), 5);
        }
    }

    #[test]
    fn tiny_vocabulary_is_an_error() {
        let m = matrix(&["a", "b", "c", "d"], &[&[1.0], &[2.0], &[3.0], &[4.0]]);
        assert!(matches!(
            gen_intrusions(&m, 1, 1, 1),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn seeded_generation_is_reproducible() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let v = 30;
        let k = 6;
        let vocab: Vec<String> = (0..v).map(|i| format!("w{i}")).collect();
        let data: Vec<f64> = (0..v * k).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let m = EmbeddingMatrix::new(vocab, data, k).unwrap();
        let a = gen_intrusions(&m, 3, 2, 42).unwrap();
        let b = gen_intrusions(&m, 3, 2, 42).unwrap();
        assert_eq!(a.instances.len(), b.instances.len());
        for (x, y) in a.instances.iter().zip(b.instances.iter()) {
            assert_eq!(x.presentation, y.presentation);
            assert_eq!(x.intruder, y.intruder);
        }
    }
}
