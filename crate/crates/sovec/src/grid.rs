//! Hyperparameter grid search: train every (lambda, K) cell, score each on
//! a development word-similarity set, and select the best correlation among
//! cells that clear the sparsity floor.

use crate::error::{Error, Result};
use crate::eval::eval_similarity;
use crate::io::SimilarityDataset;
use crate::optim::TrainerConfig;
use crate::trainer::{train, TrainReport};
use crate::types::{Dictionary, EmbeddingMatrix, SparseEmbeddings};

/// Grid definition. `factors` scale the input length: K = factor * L.
#[derive(Debug, Clone)]
pub struct GridSearchConfig {
    pub lambdas: Vec<f64>,
    pub factors: Vec<usize>,
    /// Cells below this sparsity are reported but never selected.
    pub min_sparsity: f64,
    /// Shared trainer settings; `k`, `lambda` are overridden per cell.
    pub base: TrainerConfig,
}

impl GridSearchConfig {
    /// The default search: lambda in {0.1, 0.5, 1.0}, K in {10L, 20L},
    /// with a 90% sparsity floor.
    pub fn new(base: TrainerConfig) -> Self {
        GridSearchConfig {
            lambdas: vec![0.1, 0.5, 1.0],
            factors: vec![10, 20],
            min_sparsity: 0.90,
            base,
        }
    }
}

/// One evaluated grid cell.
#[derive(Debug, Clone, serde::Serialize)]
pub struct GridCell {
    pub lambda: f64,
    pub factor: usize,
    pub k: usize,
    pub sparsity: f64,
    /// Dev-set Spearman correlation; `None` when too few pairs were
    /// covered to correlate (e.g. fully zeroed codes).
    pub rho: Option<f64>,
    pub covered: usize,
    pub skipped: usize,
    pub objective: f64,
    /// Sparsity floor cleared and a correlation exists.
    pub qualifies: bool,
}

/// Artifacts of the selected cell.
#[derive(Debug)]
pub struct GridWinner {
    /// Index into [`GridOutcome::cells`].
    pub cell: usize,
    pub dictionary: Dictionary,
    pub codes: SparseEmbeddings,
    pub report: TrainReport,
}

#[derive(Debug)]
pub struct GridOutcome {
    pub cells: Vec<GridCell>,
    /// `None` when no cell clears the sparsity floor.
    pub winner: Option<GridWinner>,
}

/// Returns true when `a` should be selected over `b`. Primary key is dev
/// correlation; ties break toward higher sparsity, then smaller K, then
/// larger lambda, keeping selection deterministic.
fn better(a: &GridCell, b: &GridCell) -> bool {
    let ra = a.rho.expect("qualifying cell has rho");
    let rb = b.rho.expect("qualifying cell has rho");
    if ra != rb {
        return ra > rb;
    }
    if a.sparsity != b.sparsity {
        return a.sparsity > b.sparsity;
    }
    if a.k != b.k {
        return a.k < b.k;
    }
    a.lambda > b.lambda
}

/// Trains and scores every cell of the grid.
pub fn grid_search(
    x: &EmbeddingMatrix,
    dev: &SimilarityDataset,
    config: &GridSearchConfig,
) -> Result<GridOutcome> {
    if config.lambdas.is_empty() || config.factors.is_empty() {
        return Err(Error::Config("empty grid".into()));
    }
    let l = x.dims();
    let mut cells: Vec<GridCell> = Vec::new();
    let mut winner: Option<GridWinner> = None;

    for &lambda in &config.lambdas {
        for &factor in &config.factors {
            if factor == 0 {
                return Err(Error::Config("factor must be >= 1".into()));
            }
            let mut cfg = config.base.clone();
            cfg.lambda = lambda;
            cfg.k = factor * l;
            let (dictionary, codes, report) = train(x, &cfg)?;
            let sparsity = codes.sparsity();
            let (rho, covered, skipped) = match eval_similarity(&codes, dev) {
                Ok(eval) => (Some(eval.rho), eval.covered, eval.skipped),
                Err(Error::Degenerate(_)) => (None, 0, dev.pairs.len()),
                Err(e) => return Err(e),
            };
            let cell = GridCell {
                lambda,
                factor,
                k: cfg.k,
                sparsity,
                rho,
                covered,
                skipped,
                objective: report
                    .epochs
                    .last()
                    .map(|e| e.objective.total)
                    .unwrap_or(f64::NAN),
                qualifies: sparsity >= config.min_sparsity && rho.is_some(),
            };
            let index = cells.len();
            let take = cell.qualifies
                && match &winner {
                    None => true,
                    Some(w) => better(&cell, &cells[w.cell]),
                };
            cells.push(cell);
            if take {
                winner = Some(GridWinner {
                    cell: index,
                    dictionary,
                    codes,
                    report,
                });
            }
        }
    }
    Ok(GridOutcome { cells, winner })
}
