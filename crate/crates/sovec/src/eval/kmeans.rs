//! Lloyd's k-means with seeded k-means++ initialization, used to inspect
//! clusters of (binary) code vectors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct KMeansResult {
    pub assignments: Vec<usize>,
    /// k centroids of the input dimensionality.
    pub centroids: Vec<Vec<f64>>,
    /// Within-cluster sum of squared distances at the final state.
    pub wcss: f64,
    pub iterations: usize,
    /// WCSS after each Lloyd iteration; non-increasing.
    pub wcss_history: Vec<f64>,
}

fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum()
}

/// Clusters `n` points given as flat row-major data with `dim` columns.
pub fn kmeans(data: &[f64], dim: usize, k: usize, seed: u64, max_iters: usize) -> Result<KMeansResult> {
    if dim == 0 || data.len() % dim != 0 {
        return Err(Error::Config(format!(
            "data of length {} is not divisible into rows of {dim}",
            data.len()
        )));
    }
    let n = data.len() / dim;
    if k == 0 {
        return Err(Error::Config("k must be >= 1".into()));
    }
    if k > n {
        return Err(Error::Degenerate(format!(
            "cannot form {k} clusters from {n} points"
        )));
    }
    let point = |i: usize| &data[i * dim..(i + 1) * dim];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // k-means++ seeding: next centroid drawn proportionally to squared
    // distance from the nearest centroid so far.
    let mut centroids: Vec<Vec<f64>> = Vec::with_capacity(k);
    centroids.push(point(rng.gen_range(0..n)).to_vec());
    let mut best_dist: Vec<f64> = (0..n)
        .map(|i| dist_sq(point(i), &centroids[0]))
        .collect();
    while centroids.len() < k {
        let total: f64 = best_dist.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.gen_range(0.0..total);
            let mut chosen = n - 1;
            for (i, &d) in best_dist.iter().enumerate() {
                if target < d {
                    chosen = i;
                    break;
                }
                target -= d;
            }
            chosen
        } else {
            // all remaining points coincide with a centroid
            rng.gen_range(0..n)
        };
        centroids.push(point(next).to_vec());
        for i in 0..n {
            let d = dist_sq(point(i), centroids.last().unwrap());
            if d < best_dist[i] {
                best_dist[i] = d;
            }
        }
    }

    let mut assignments = vec![0usize; n];
    let mut wcss_history = Vec::new();
    let mut iterations = 0;
    for _ in 0..max_iters {
        iterations += 1;
        // assignment step
        let mut changed = false;
        for i in 0..n {
            let p = point(i);
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (c, centroid) in centroids.iter().enumerate() {
                let d = dist_sq(p, centroid);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            if assignments[i] != best {
                assignments[i] = best;
                changed = true;
            }
        }

        // re-seed empty clusters from the point farthest to its centroid
        let mut counts = vec![0usize; k];
        for &a in &assignments {
            counts[a] += 1;
        }
        let mut reseeded = false;
        for c in 0..k {
            if counts[c] > 0 {
                continue;
            }
            let farthest = (0..n)
                .filter(|&i| counts[assignments[i]] > 1)
                .max_by(|&a, &b| {
                    let da = dist_sq(point(a), &centroids[assignments[a]]);
                    let db = dist_sq(point(b), &centroids[assignments[b]]);
                    da.partial_cmp(&db).expect("finite distances")
                });
            if let Some(i) = farthest {
                counts[assignments[i]] -= 1;
                assignments[i] = c;
                counts[c] = 1;
                centroids[c] = point(i).to_vec();
                reseeded = true;
            }
        }

        // update step
        for centroid in &mut centroids {
            centroid.fill(0.0);
        }
        for (i, &a) in assignments.iter().enumerate() {
            for (slot, v) in centroids[a].iter_mut().zip(point(i).iter()) {
                *slot += v;
            }
        }
        for (c, centroid) in centroids.iter_mut().enumerate() {
            if counts[c] > 0 {
                let inv = 1.0 / counts[c] as f64;
                for v in centroid.iter_mut() {
                    *v *= inv;
                }
            }
        }

        let wcss: f64 = assignments
            .iter()
            .enumerate()
            .map(|(i, &a)| dist_sq(point(i), &centroids[a]))
            .sum();
        wcss_history.push(wcss);

        if !changed && !reseeded {
            break;
        }
    }

    let wcss = *wcss_history.last().expect("at least one iteration");
    Ok(KMeansResult {
        assignments,
        centroids,
        wcss,
        iterations,
        wcss_history,
    })
}
