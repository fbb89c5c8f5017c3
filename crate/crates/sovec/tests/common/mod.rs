//! Shared helpers for the integration suites: a planted sparse-coding
//! instance with known ground truth, plus small dataset builders.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sovec::types::EmbeddingMatrix;

pub struct PlantedInstance {
    pub x: EmbeddingMatrix,
    /// sqrt(mean x^2): the scale the reconstruction error is judged against.
    pub rms: f64,
    pub k: usize,
    pub words: usize,
}

/// Standard normal via Box-Muller; keeps the suites off extra deps.
fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Builds X = D* A* + noise, with a unit-column dictionary and codes that
/// have `nonzeros` strictly positive entries per word.
pub fn planted_instance(
    words: usize,
    l: usize,
    k: usize,
    nonzeros: usize,
    noise_sd: f64,
    seed: u64,
) -> PlantedInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // dictionary with unit-norm columns
    let mut dict = vec![0.0f64; l * k];
    for j in 0..k {
        let mut norm_sq = 0.0;
        for lrow in 0..l {
            let v = normal(&mut rng);
            dict[lrow * k + j] = v;
            norm_sq += v * v;
        }
        let inv = 1.0 / norm_sq.sqrt();
        for lrow in 0..l {
            dict[lrow * k + j] *= inv;
        }
    }

    let mut data = vec![0.0f64; words * l];
    for word in 0..words {
        let mut support: Vec<usize> = Vec::with_capacity(nonzeros);
        while support.len() < nonzeros {
            let j = rng.gen_range(0..k);
            if !support.contains(&j) {
                support.push(j);
            }
        }
        for &j in &support {
            let a = rng.gen_range(0.5..1.5);
            for lrow in 0..l {
                data[word * l + lrow] += dict[lrow * k + j] * a;
            }
        }
        for lrow in 0..l {
            data[word * l + lrow] += noise_sd * normal(&mut rng);
        }
    }

    let rms = (data.iter().map(|v| v * v).sum::<f64>() / data.len() as f64).sqrt();
    let vocab: Vec<String> = (0..words).map(|i| format!("w{i}")).collect();
    let x = EmbeddingMatrix::new(vocab, data, l).expect("planted matrix is valid");
    PlantedInstance { x, rms, k, words }
}

/// The desk-scale instance the acceptance criteria pin: L=20, K=100,
/// V=500, 5 nonzeros per word, noise sd 0.01, seed 20240601.
pub fn acceptance_instance() -> PlantedInstance {
    planted_instance(500, 20, 100, 5, 0.01, 20240601)
}

/// Per-element reconstruction RMSE of codes against the input.
pub fn reconstruction_rmse(
    x: &EmbeddingMatrix,
    dict: &sovec::types::Dictionary,
    codes: &sovec::types::SparseEmbeddings,
) -> f64 {
    let terms = sovec::objective(x, dict, codes, 0.0, 0.0).expect("shapes agree");
    (terms.reconstruction / (x.len() * x.dims()) as f64).sqrt()
}
