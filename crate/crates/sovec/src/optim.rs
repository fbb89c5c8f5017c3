//! Online AdaGrad with regularized dual averaging (RDA) for the code
//! vectors, and plain AdaGrad for the dictionary.
//!
//! The code-side update keeps, per coordinate, the cumulative raw-gradient
//! sum and squared-gradient sum over all updates of that word. Thresholding
//! the running average gradient against the l1 penalty produces exact zeros,
//! so sparsity needs no epsilon cutoff.

use crate::error::{Error, Result};
use crate::types::Dictionary;

/// The regularizer applied to the code matrix. Only the l1 norm is
/// supported; it is what makes the codes sparse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
pub enum Regularizer {
    #[default]
    L1,
}

/// Training hyperparameters.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct TrainerConfig {
    /// l1 penalty on the codes; larger values zero more coordinates.
    pub lambda: f64,
    /// l2 (squared Frobenius) penalty on the dictionary.
    pub tau: f64,
    /// Code length K. Overcomplete runs use K > L.
    pub k: usize,
    /// Base learning rate for both AdaGrad paths.
    pub eta: f64,
    /// Number of passes over the vocabulary.
    pub epochs: usize,
    /// Seed for dictionary init and per-epoch shuffles.
    pub seed: u64,
    /// Constrain codes to be nonnegative (the binarizable path).
    pub nonnegative: bool,
    /// Project nonzero codes to 1 after training. Requires `nonnegative`.
    pub binarize: bool,
    /// Worker count; 1 selects the deterministic serial path.
    pub threads: usize,
    pub regularizer: Regularizer,
}

impl TrainerConfig {
    /// Config with documented defaults for a given code length.
    pub fn new(k: usize) -> Self {
        TrainerConfig {
            lambda: 1.0,
            tau: 1e-5,
            k,
            eta: 0.05,
            epochs: 20,
            seed: 42,
            nonnegative: false,
            binarize: false,
            threads: 1,
            regularizer: Regularizer::L1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambda < 0.0 || !self.lambda.is_finite() {
            return Err(Error::Config(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        if self.tau < 0.0 || !self.tau.is_finite() {
            return Err(Error::Config(format!("tau must be >= 0, got {}", self.tau)));
        }
        if self.eta <= 0.0 || !self.eta.is_finite() {
            return Err(Error::Config(format!("eta must be > 0, got {}", self.eta)));
        }
        if self.k == 0 {
            return Err(Error::Config("K must be >= 1".into()));
        }
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be >= 1".into()));
        }
        if self.threads == 0 {
            return Err(Error::Config("threads must be >= 1".into()));
        }
        if self.binarize && !self.nonnegative {
            return Err(Error::Config(
                "binarize requires the nonnegative path".into(),
            ));
        }
        Ok(())
    }
}

/// Per-coordinate accumulators for the RDA code updates plus per-entry
/// squared-gradient sums for the dictionary's AdaGrad steps.
#[derive(Debug, Clone)]
pub struct OptimizerState {
    v: usize,
    k: usize,
    pub(crate) code_grad_sum: Vec<f64>,
    pub(crate) code_grad_sq: Vec<f64>,
    pub(crate) word_steps: Vec<u64>,
    pub(crate) dict_grad_sq: Vec<f64>,
}

impl OptimizerState {
    pub fn new(words: usize, k: usize, l: usize) -> Self {
        OptimizerState {
            v: words,
            k,
            code_grad_sum: vec![0.0; words * k],
            code_grad_sq: vec![0.0; words * k],
            word_steps: vec![0; words],
            dict_grad_sq: vec![0.0; l * k],
        }
    }

    pub fn words(&self) -> usize {
        self.v
    }

    pub fn code_dims(&self) -> usize {
        self.k
    }

    /// Updates applied so far to word `i`.
    pub fn steps(&self, i: usize) -> u64 {
        self.word_steps[i]
    }

    /// Running average gradient for coordinate `(i, j)`; `None` before the
    /// first update of word `i`.
    pub fn average_gradient(&self, i: usize, j: usize) -> Option<f64> {
        let t = self.word_steps[i];
        (t > 0).then(|| self.code_grad_sum[i * self.k + j] / t as f64)
    }
}

/// Gradient of the unregularized reconstruction loss ||x - D a||^2 with
/// respect to the code vector: 2 D^T (D a - x).
pub fn code_gradient(x: &[f64], dict: &Dictionary, code: &[f64]) -> Result<Vec<f64>> {
    let residual = reconstruction_residual(x, dict, code)?;
    Ok(gradient_from_residual(dict, &residual))
}

pub(crate) fn reconstruction_residual(
    x: &[f64],
    dict: &Dictionary,
    code: &[f64],
) -> Result<Vec<f64>> {
    let (l, k) = (dict.input_dims(), dict.code_dims());
    if x.len() != l || code.len() != k {
        return Err(Error::Config(format!(
            "code_gradient shapes disagree: x has {} (want {l}), code has {} (want {k})",
            x.len(),
            code.len()
        )));
    }
    let mut residual: Vec<f64> = x.iter().map(|v| -v).collect();
    for (j, &a) in code.iter().enumerate() {
        if a != 0.0 {
            for (lrow, slot) in residual.iter_mut().enumerate() {
                *slot += dict.entry(lrow, j) * a;
            }
        }
    }
    Ok(residual)
}

pub(crate) fn gradient_from_residual(dict: &Dictionary, residual: &[f64]) -> Vec<f64> {
    let (l, k) = (dict.input_dims(), dict.code_dims());
    let mut grad = vec![0.0; k];
    for lrow in 0..l {
        let r = 2.0 * residual[lrow];
        if r != 0.0 {
            for (j, slot) in grad.iter_mut().enumerate() {
                *slot += dict.entry(lrow, j) * r;
            }
        }
    }
    grad
}

/// The RDA thresholding rule for one coordinate, given its accumulators
/// after the current gradient has been absorbed.
///
/// With average gradient gbar = grad_sum / t:
///   value = 0                                       if |gbar| <= lambda
///   value = -sign(gbar) * (eta*t/sqrt(G)) * (|gbar| - lambda)  otherwise
/// and in nonnegative mode additionally 0 whenever the result is negative.
#[inline]
pub fn rda_coordinate(
    grad_sum: f64,
    grad_sq_sum: f64,
    steps: u64,
    eta: f64,
    lambda: f64,
    nonnegative: bool,
) -> f64 {
    debug_assert!(steps > 0);
    let t = steps as f64;
    let avg = grad_sum / t;
    if avg.abs() <= lambda {
        return 0.0;
    }
    // |gbar| > lambda >= 0 implies some past gradient was nonzero. Under
    // overflow the accumulators go non-finite instead; the resulting NaN
    // is caught by the epoch-boundary divergence check.
    debug_assert!(grad_sq_sum > 0.0 || !avg.is_finite());
    let value = -avg.signum() * (eta * t / grad_sq_sum.sqrt()) * (avg.abs() - lambda);
    if nonnegative && value < 0.0 {
        0.0
    } else {
        value
    }
}

/// Absorbs a raw gradient for word `i` and recomputes its code row.
///
/// Returns the new row as ascending (index, value) pairs; coordinates whose
/// average gradient falls inside the threshold are absent (exact zeros).
pub fn rda_update(
    state: &mut OptimizerState,
    word: usize,
    gradient: &[f64],
    config: &TrainerConfig,
) -> Result<Vec<(usize, f64)>> {
    let k = state.k;
    if gradient.len() != k {
        return Err(Error::Config(format!(
            "gradient has {} coordinates, state expects {k}",
            gradient.len()
        )));
    }
    if word >= state.v {
        return Err(Error::Config(format!(
            "word index {word} out of range for {} words",
            state.v
        )));
    }
    state.word_steps[word] += 1;
    let t = state.word_steps[word];
    let base = word * k;
    let mut row = Vec::new();
    for (j, &g) in gradient.iter().enumerate() {
        let sum = &mut state.code_grad_sum[base + j];
        *sum += g;
        let sq = &mut state.code_grad_sq[base + j];
        *sq += g * g;
        let value = rda_coordinate(*sum, *sq, t, config.eta, config.lambda, config.nonnegative);
        if value != 0.0 {
            row.push((j, value));
        }
    }
    Ok(row)
}

/// Per-entry dictionary gradient for one sample: 2 (D a - x) a^T + 2 tau D.
#[inline]
pub(crate) fn dict_entry_gradient(residual_l: f64, a_j: f64, tau: f64, d_entry: f64) -> f64 {
    2.0 * residual_l * a_j + 2.0 * tau * d_entry
}

/// AdaGrad step given the accumulated squared gradients (after absorbing
/// the current one). Callers skip entries with `grad_sq_sum == 0`; a
/// non-finite accumulator flows through to the divergence check.
#[inline]
pub(crate) fn adagrad_step(eta: f64, g: f64, grad_sq_sum: f64) -> f64 {
    debug_assert!(grad_sq_sum > 0.0 || !grad_sq_sum.is_finite());
    eta * g / grad_sq_sum.sqrt()
}

/// Applies one AdaGrad dictionary step for a single word's residual.
///
/// `code` is the word's current sparse code row. Every entry of `D` carries
/// the 2*tau*D term; when tau is 0 only the active columns can move.
pub fn dict_update(
    state: &mut OptimizerState,
    dict: &mut Dictionary,
    x: &[f64],
    code: &[(usize, f64)],
    config: &TrainerConfig,
) -> Result<()> {
    let (l, k) = (dict.input_dims(), dict.code_dims());
    if x.len() != l {
        return Err(Error::Config(format!(
            "sample has {} dims, dictionary expects {l}",
            x.len()
        )));
    }
    if k != state.k {
        return Err(Error::Config(format!(
            "dictionary K={k} disagrees with optimizer state K={}",
            state.k
        )));
    }
    let mut residual: Vec<f64> = x.iter().map(|v| -v).collect();
    for &(j, a) in code {
        for (lrow, slot) in residual.iter_mut().enumerate() {
            *slot += dict.entry(lrow, j) * a;
        }
    }
    if config.tau == 0.0 {
        // Only active columns receive any gradient.
        for &(j, a) in code {
            for (lrow, &r) in residual.iter().enumerate() {
                apply_dict_entry(state, dict, lrow, j, r, a, config);
            }
        }
    } else {
        let mut dense = vec![0.0; k];
        for &(j, a) in code {
            dense[j] = a;
        }
        for lrow in 0..l {
            let r = residual[lrow];
            for (j, &a) in dense.iter().enumerate() {
                apply_dict_entry(state, dict, lrow, j, r, a, config);
            }
        }
    }
    Ok(())
}

#[inline]
fn apply_dict_entry(
    state: &mut OptimizerState,
    dict: &mut Dictionary,
    lrow: usize,
    j: usize,
    residual_l: f64,
    a_j: f64,
    config: &TrainerConfig,
) {
    let k = dict.code_dims();
    let entry = dict.entry(lrow, j);
    let g = dict_entry_gradient(residual_l, a_j, config.tau, entry);
    let sq = &mut state.dict_grad_sq[lrow * k + j];
    *sq += g * g;
    if *sq == 0.0 {
        // No gradient has ever touched this entry; nothing to step.
        return;
    }
    *dict.entry_mut(lrow, j) = entry - adagrad_step(config.eta, g, *sq);
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn identity_dict(n: usize) -> Dictionary {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Dictionary::new(data, n, n).unwrap()
    }

    fn config(lambda: f64, eta: f64, nonneg: bool, k: usize) -> TrainerConfig {
        let mut c = TrainerConfig::new(k);
        c.lambda = lambda;
        c.eta = eta;
        c.nonnegative = nonneg;
        c
    }

    #[test]
    fn code_gradient_at_origin() {
        let d = identity_dict(2);
        let g = code_gradient(&[1.0, 0.0], &d, &[0.0, 0.0]).unwrap();
        assert_eq!(g, vec![-2.0, 0.0]);
    }

    #[test]
    fn code_gradient_at_perfect_fit() {
        let d = identity_dict(2);
        let g = code_gradient(&[0.3, -0.7], &d, &[0.3, -0.7]).unwrap();
        assert_eq!(g, vec![0.0, 0.0]);
    }

    #[test]
    fn code_gradient_hand_value() {
        // D=[[1,1],[0,1]], x=[1,1], a=[1,0]: residual [0,-1], grad [0,-2]
        let d = Dictionary::new(vec![1.0, 1.0, 0.0, 1.0], 2, 2).unwrap();
        let g = code_gradient(&[1.0, 1.0], &d, &[1.0, 0.0]).unwrap();
        assert_eq!(g, vec![0.0, -2.0]);
    }

    #[test]
    fn code_gradient_dimension_mismatch() {
        let d = identity_dict(2);
        assert!(matches!(
            code_gradient(&[1.0], &d, &[0.0, 0.0]),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn code_gradient_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let l = rng.gen_range(2..6);
            let k = rng.gen_range(2..8);
            let dict = Dictionary::new(
                (0..l * k).map(|_| rng.gen_range(-1.0..1.0)).collect(),
                l,
                k,
            )
            .unwrap();
            let x: Vec<f64> = (0..l).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let a: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let analytic = code_gradient(&x, &dict, &a).unwrap();

            let loss = |a: &[f64]| -> f64 {
                let mut total = 0.0;
                for lrow in 0..l {
                    let mut r = -x[lrow];
                    for (j, &aj) in a.iter().enumerate() {
                        r += dict.entry(lrow, j) * aj;
                    }
                    total += r * r;
                }
                total
            };
            let h = 1e-5;
            let mut numeric = vec![0.0; k];
            let mut probe = a.clone();
            for j in 0..k {
                probe[j] = a[j] + h;
                let up = loss(&probe);
                probe[j] = a[j] - h;
                let down = loss(&probe);
                probe[j] = a[j];
                numeric[j] = (up - down) / (2.0 * h);
            }
            let diff: f64 = analytic
                .iter()
                .zip(numeric.iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let scale: f64 = analytic.iter().map(|g| g * g).sum::<f64>().sqrt();
            assert!(
                diff <= 1e-6 * scale.max(1.0),
                "finite-difference mismatch: {diff} vs scale {scale}"
            );
        }
    }

    #[test]
    fn rda_first_update_below_threshold_is_exact_zero() {
        let mut state = OptimizerState::new(1, 1, 1);
        let cfg = config(1.0, 0.05, false, 1);
        let row = rda_update(&mut state, 0, &[0.5], &cfg).unwrap();
        assert!(row.is_empty());
        assert_eq!(state.average_gradient(0, 0), Some(0.5));
    }

    #[test]
    fn rda_first_update_above_threshold_hand_value() {
        // lambda=1, eta=0.05, g=2: gbar=2, G=4, t=1 -> gamma = -0.025
        let mut state = OptimizerState::new(1, 1, 1);
        let cfg = config(1.0, 0.05, false, 1);
        let row = rda_update(&mut state, 0, &[2.0], &cfg).unwrap();
        assert_eq!(row, vec![(0, -0.025)]);
    }

    #[test]
    fn rda_nonnegative_zeroes_negative_gamma() {
        let mut state = OptimizerState::new(1, 1, 1);
        let cfg = config(1.0, 0.05, true, 1);
        let row = rda_update(&mut state, 0, &[2.0], &cfg).unwrap();
        assert!(row.is_empty());
    }

    #[test]
    fn rda_lambda_zero_matches_dual_averaging_adagrad() {
        // With no l1 penalty the update is the dual-averaging AdaGrad step
        // -sign(gbar) * eta * t * |gbar| / sqrt(G); compare against an
        // independently maintained scalar transcription.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let mut state = OptimizerState::new(1, 1, 1);
            let cfg = config(0.0, 0.1, false, 1);
            let mut sum = 0.0;
            let mut sq = 0.0;
            let mut t = 0u64;
            let mut last = 0.0;
            for _ in 0..rng.gen_range(1..30) {
                let g: f64 = rng.gen_range(-2.0..2.0);
                let row = rda_update(&mut state, 0, &[g], &cfg).unwrap();
                last = row.first().map(|&(_, v)| v).unwrap_or(0.0);
                sum += g;
                sq += g * g;
                t += 1;
            }
            let avg: f64 = sum / t as f64;
            let expected = if avg == 0.0 {
                0.0
            } else {
                -avg.signum() * cfg.eta * t as f64 * avg.abs() / sq.sqrt()
            };
            assert!(
                (last - expected).abs() <= 1e-12,
                "got {last}, oracle {expected}"
            );
        }
    }

    #[test]
    fn rda_monotone_thresholding() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let sum: f64 = rng.gen_range(-5.0..5.0);
            let steps = rng.gen_range(1..20);
            let sq: f64 = rng.gen_range(0.1..10.0) + sum * sum / steps as f64;
            let l1: f64 = rng.gen_range(0.0..2.0);
            let l2: f64 = l1 + rng.gen_range(0.0..2.0);
            let at_l1 = rda_coordinate(sum, sq, steps, 0.05, l1, false);
            let at_l2 = rda_coordinate(sum, sq, steps, 0.05, l2, false);
            if at_l1 == 0.0 {
                assert_eq!(at_l2, 0.0, "larger lambda must keep zeros zero");
            }
        }
    }

    #[test]
    fn rda_nonnegative_never_emits_negative() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let k = rng.gen_range(1..6);
            let mut state = OptimizerState::new(2, k, 2);
            let mut cfg = config(rng.gen_range(0.0..1.0), rng.gen_range(0.01..0.5), true, k);
            cfg.nonnegative = true;
            for _ in 0..rng.gen_range(1..20) {
                let g: Vec<f64> = (0..k).map(|_| rng.gen_range(-3.0..3.0)).collect();
                let word = rng.gen_range(0..2);
                let row = rda_update(&mut state, word, &g, &cfg).unwrap();
                for (_, v) in row {
                    assert!(v > 0.0, "nonnegative mode emitted {v}");
                }
            }
        }
    }

    #[test]
    fn dict_update_zero_code_zero_tau_is_noop() {
        let mut state = OptimizerState::new(1, 2, 2);
        let mut dict = identity_dict(2);
        let before = dict.data().to_vec();
        let mut cfg = config(0.0, 0.05, false, 2);
        cfg.tau = 0.0;
        dict_update(&mut state, &mut dict, &[1.0, 1.0], &[], &cfg).unwrap();
        assert_eq!(dict.data(), before.as_slice());
    }

    #[test]
    fn dict_update_tau_only_hand_value() {
        // Single entry d=1.0, zero code, tau=1e-5, eta=0.05:
        // g = 2e-5, G = 4e-10, step = 0.05 -> d = 0.95
        let mut state = OptimizerState::new(1, 1, 1);
        let mut dict = Dictionary::new(vec![1.0], 1, 1).unwrap();
        let mut cfg = config(0.0, 0.05, false, 1);
        cfg.tau = 1e-5;
        dict_update(&mut state, &mut dict, &[0.0], &[], &cfg).unwrap();
        assert!((dict.entry(0, 0) - 0.95).abs() < 1e-12);
    }

    #[test]
    fn dict_update_stationary_at_perfect_fit() {
        let mut state = OptimizerState::new(1, 2, 2);
        let mut dict = identity_dict(2);
        let before = dict.data().to_vec();
        let mut cfg = config(0.0, 0.05, false, 2);
        cfg.tau = 0.0;
        // x = D a exactly
        dict_update(&mut state, &mut dict, &[0.4, 0.6], &[(0, 0.4), (1, 0.6)], &cfg).unwrap();
        assert_eq!(dict.data(), before.as_slice());
    }

    #[test]
    fn config_validation() {
        let mut c = TrainerConfig::new(10);
        assert!(c.validate().is_ok());
        c.lambda = -1.0;
        assert!(c.validate().is_err());
        c.lambda = 0.5;
        c.eta = 0.0;
        assert!(c.validate().is_err());
        c.eta = 0.05;
        c.binarize = true;
        assert!(c.validate().is_err());
        c.nonnegative = true;
        assert!(c.validate().is_ok());
    }
}
