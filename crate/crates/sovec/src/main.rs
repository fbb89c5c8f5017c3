//! Command-line surface over the sovec library: train, grid-search,
//! baseline transforms, and the evaluation protocols.
//!
//! Exit codes: 0 success, 1 usage error, 2 data/parse error, 3 numerical
//! divergence.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use sovec::baselines;
use sovec::error::Error;
use sovec::eval::{
    self, default_l2_grid, eval_similarity, featurize_dataset, gen_intrusions, kmeans,
    FeatureMode,
};
use sovec::grid::{grid_search, GridSearchConfig};
use sovec::io::{self, EmbeddingFormat, SparseLayout};
use sovec::manifest::{sha256_file, RunManifest};
use sovec::optim::TrainerConfig;
use sovec::types::EmbeddingMatrix;

const EXIT_USAGE: i32 = 1;
const EXIT_DATA: i32 = 2;
const EXIT_DIVERGED: i32 = 3;

#[derive(Parser)]
#[command(
    name = "sovec",
    version,
    about = "Sparse overcomplete word vectors: training, transforms, evaluation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Learn sparse (optionally nonnegative/binary) codes from dense vectors
    Train(TrainArgs),
    /// Search lambda x K against a development similarity set
    GridSearch(GridArgs),
    /// Length-preserving baseline transforms (sign, mean-threshold)
    Baseline(BaselineArgs),
    /// Word-similarity correlation of a vector file against human scores
    EvalSim(EvalSimArgs),
    /// Text classification with l2-regularized logistic regression
    EvalClf(EvalClfArgs),
    /// k-means clustering of word vectors
    Cluster(ClusterArgs),
    /// Generate word-intrusion instances for annotation
    Intrusion(IntrusionArgs),
}

#[derive(Args)]
struct TrainArgs {
    /// Dense input vectors, "word v1 ... vL" per line
    #[arg(long)]
    input: PathBuf,
    /// Input format
    #[arg(long, default_value = "auto")]
    format: EmbeddingFormat,
    /// Code length K (overrides --factor)
    #[arg(long, conflicts_with = "factor")]
    k: Option<usize>,
    /// Code length as a multiple of L: K = factor * L
    #[arg(long, default_value_t = 10)]
    factor: usize,
    /// l1 penalty on the codes
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    /// l2 penalty on the dictionary
    #[arg(long, default_value_t = 1e-5)]
    tau: f64,
    /// Base learning rate
    #[arg(long, default_value_t = 0.05)]
    eta: f64,
    #[arg(long, default_value_t = 20)]
    epochs: usize,
    /// Constrain codes to be nonnegative
    #[arg(long)]
    nonneg: bool,
    /// Also write binary codes (implies --nonneg)
    #[arg(long)]
    binarize: bool,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// On-disk layout for the codes
    #[arg(long, default_value = "dense-text")]
    sparse_layout: SparseLayoutArg,
}

#[derive(Clone, Copy)]
struct SparseLayoutArg(SparseLayout);

impl std::str::FromStr for SparseLayoutArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        s.parse().map(SparseLayoutArg)
    }
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    input: PathBuf,
    /// Development similarity file: "word1 word2 score" per line
    #[arg(long)]
    dev_sim: PathBuf,
    #[arg(long, default_value = "auto")]
    format: EmbeddingFormat,
    /// Comma-separated lambda grid
    #[arg(long, default_value = "0.1,0.5,1.0", value_delimiter = ',')]
    lambda_grid: Vec<f64>,
    /// Comma-separated K factors (K = factor * L)
    #[arg(long, default_value = "10,20", value_delimiter = ',')]
    factor_grid: Vec<usize>,
    /// Cells below this sparsity are never selected
    #[arg(long, default_value_t = 0.90)]
    min_sparsity: f64,
    #[arg(long, default_value_t = 1e-5)]
    tau: f64,
    #[arg(long, default_value_t = 0.05)]
    eta: f64,
    #[arg(long, default_value_t = 20)]
    epochs: usize,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    #[arg(long, default_value = "dense-text")]
    sparse_layout: SparseLayoutArg,
}

#[derive(Args)]
struct BaselineArgs {
    /// Dense input vectors
    #[arg(long)]
    vectors: PathBuf,
    /// sign | mean-threshold
    #[arg(long)]
    method: BaselineMethod,
    /// Output vector file
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "auto")]
    format: EmbeddingFormat,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum BaselineMethod {
    Sign,
    MeanThreshold,
}

#[derive(Args)]
struct EvalSimArgs {
    #[arg(long)]
    vectors: PathBuf,
    /// Similarity dataset: "word1 word2 score" per line
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long, default_value = "auto")]
    format: EmbeddingFormat,
    /// Optional JSON report path
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct EvalClfArgs {
    #[arg(long)]
    vectors: PathBuf,
    /// "label<TAB>text" per line
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    dev: PathBuf,
    #[arg(long)]
    test: PathBuf,
    /// average | concat
    #[arg(long, default_value = "average")]
    mode: ClfMode,
    /// Lowercase tokens before lookup
    #[arg(long)]
    lowercase: bool,
    /// Comma-separated l2 grid (default: 1e-3 .. 1e2, log-spaced)
    #[arg(long, value_delimiter = ',')]
    l2_grid: Option<Vec<f64>>,
    #[arg(long, default_value = "auto")]
    format: EmbeddingFormat,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ClfMode {
    Average,
    Concat,
}

#[derive(Args)]
struct ClusterArgs {
    #[arg(long)]
    vectors: PathBuf,
    #[arg(long, default_value_t = 100)]
    k: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    max_iters: usize,
    /// Write "word<TAB>cluster" assignments here
    #[arg(long)]
    out: Option<PathBuf>,
    /// Clusters to print
    #[arg(long, default_value_t = 10)]
    show: usize,
    #[arg(long, default_value = "auto")]
    format: EmbeddingFormat,
}

#[derive(Args)]
struct IntrusionArgs {
    #[arg(long)]
    vectors: PathBuf,
    /// Number of highest-variance dimensions to use
    #[arg(long, default_value_t = 25)]
    dims: usize,
    /// Instances per dimension
    #[arg(long, default_value_t = 1)]
    per_dim: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Write instances as TSV (dimension, presented words, intruder)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "auto")]
    format: EmbeddingFormat,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn io(path: &Path, source: std::io::Error) -> Self {
        Failure::from(Error::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::Diverged { .. } => EXIT_DIVERGED,
            _ => EXIT_DATA,
        };
        Failure {
            code,
            message: err.to_string(),
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            // help/version requests are not errors
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    let result = match cli.command {
        Command::Train(args) => cmd_train(args),
        Command::GridSearch(args) => cmd_gridsearch(args),
        Command::Baseline(args) => cmd_baseline(args),
        Command::EvalSim(args) => cmd_eval_sim(args),
        Command::EvalClf(args) => cmd_eval_clf(args),
        Command::Cluster(args) => cmd_cluster(args),
        Command::Intrusion(args) => cmd_intrusion(args),
    };
    if let Err(failure) = result {
        eprintln!("error: {}", failure.message);
        std::process::exit(failure.code);
    }
}

/// Flag-value checks that need no file access; run before any I/O.
fn check_hyperparameters(
    lambda: f64,
    tau: f64,
    eta: f64,
    epochs: usize,
    threads: usize,
) -> Result<(), Failure> {
    if lambda < 0.0 || !lambda.is_finite() {
        return Err(Failure::usage(format!("--lambda must be >= 0, got {lambda}")));
    }
    if tau < 0.0 || !tau.is_finite() {
        return Err(Failure::usage(format!("--tau must be >= 0, got {tau}")));
    }
    if eta <= 0.0 || !eta.is_finite() {
        return Err(Failure::usage(format!("--eta must be > 0, got {eta}")));
    }
    if epochs == 0 {
        return Err(Failure::usage("--epochs must be >= 1"));
    }
    if threads == 0 {
        return Err(Failure::usage("--threads must be >= 1"));
    }
    Ok(())
}

fn read_vectors(path: &Path, format: EmbeddingFormat) -> Result<EmbeddingMatrix, Failure> {
    let outcome = io::read_embeddings(path, format)?;
    if outcome.duplicates_skipped > 0 {
        eprintln!(
            "warning: {} duplicate word(s) skipped in {} (first occurrence wins)",
            outcome.duplicates_skipped,
            path.display()
        );
    }
    Ok(outcome.matrix)
}

fn write_text(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| Failure::io(path, e))
}

fn cmd_train(args: TrainArgs) -> Result<(), Failure> {
    check_hyperparameters(args.lambda, args.tau, args.eta, args.epochs, args.threads)?;
    if let Some(k) = args.k {
        if k == 0 {
            return Err(Failure::usage("--k must be >= 1"));
        }
    } else if args.factor == 0 {
        return Err(Failure::usage("--factor must be >= 1"));
    }

    let started = Instant::now();
    let x = read_vectors(&args.input, args.format)?;
    let k = args.k.unwrap_or(args.factor * x.dims());
    if k <= x.dims() {
        eprintln!(
            "warning: K={k} <= L={}; the representation will not be overcomplete",
            x.dims()
        );
    }

    let mut config = TrainerConfig::new(k);
    config.lambda = args.lambda;
    config.tau = args.tau;
    config.eta = args.eta;
    config.epochs = args.epochs;
    config.seed = args.seed;
    config.threads = args.threads;
    config.nonnegative = args.nonneg || args.binarize;
    config.binarize = args.binarize;
    config.validate().map_err(|e| Failure::usage(e.to_string()))?;

    let (dictionary, codes, report) = sovec::train(&x, &config)?;

    std::fs::create_dir_all(&args.out_dir).map_err(|e| Failure::io(&args.out_dir, e))?;
    let codes_path = args.out_dir.join("codes.txt");
    let dict_path = args.out_dir.join("dictionary.txt");
    let report_path = args.out_dir.join("report.json");
    io::write_sparse(&codes_path, &codes, args.sparse_layout.0)?;
    io::write_dictionary(&dict_path, &dictionary)?;
    let mut outputs = vec![
        codes_path.display().to_string(),
        dict_path.display().to_string(),
        report_path.display().to_string(),
    ];
    if config.binarize {
        let binary = sovec::binarize(&codes);
        let path = args.out_dir.join("binary.txt");
        io::write_binary(&path, &binary)?;
        outputs.push(path.display().to_string());
    }
    let report_json = serde_json::to_string_pretty(&report).expect("report serializes");
    write_text(&report_path, &(report_json + "\n"))?;

    let last = report.epochs.last().expect("at least one epoch");
    if args.lambda == 0.0 {
        eprintln!(
            "warning: lambda = 0 disables the l1 penalty; codes are dense (sparsity {:.4})",
            report.final_sparsity
        );
    }
    println!(
        "sparsity {:.4}  objective {:.6}  (reconstruction {:.6}, l1 {:.6}, dictionary {:.6})",
        report.final_sparsity,
        last.objective.total,
        last.objective.reconstruction,
        last.objective.l1,
        last.objective.dictionary
    );

    let manifest = RunManifest {
        command: "train".into(),
        config: serde_json::to_value(&config).expect("config serializes"),
        inputs: vec![sha256_file(&args.input)?],
        outputs,
        threads: config.threads,
        seed: config.seed,
        duration_secs: started.elapsed().as_secs_f64(),
        results: serde_json::json!({
            "sparsity": report.final_sparsity,
            "objective": last.objective.total,
            "epochs_run": report.epochs_run,
        }),
    };
    manifest.write(args.out_dir.join("manifest.json"))?;
    Ok(())
}

fn cmd_gridsearch(args: GridArgs) -> Result<(), Failure> {
    check_hyperparameters(0.0, args.tau, args.eta, args.epochs, args.threads)?;
    if args.lambda_grid.iter().any(|l| *l < 0.0 || !l.is_finite()) {
        return Err(Failure::usage("--lambda-grid values must be >= 0"));
    }
    if args.factor_grid.iter().any(|f| *f == 0) {
        return Err(Failure::usage("--factor-grid values must be >= 1"));
    }
    if !(0.0..=1.0).contains(&args.min_sparsity) {
        return Err(Failure::usage("--min-sparsity must be in [0, 1]"));
    }

    let started = Instant::now();
    let x = read_vectors(&args.input, args.format)?;
    let dev = io::read_similarity(&args.dev_sim)?;

    let mut base = TrainerConfig::new(1);
    base.tau = args.tau;
    base.eta = args.eta;
    base.epochs = args.epochs;
    base.seed = args.seed;
    base.threads = args.threads;
    let grid_config = GridSearchConfig {
        lambdas: args.lambda_grid.clone(),
        factors: args.factor_grid.clone(),
        min_sparsity: args.min_sparsity,
        base,
    };
    let outcome = grid_search(&x, &dev, &grid_config)?;

    std::fs::create_dir_all(&args.out_dir).map_err(|e| Failure::io(&args.out_dir, e))?;

    // ranked table: qualifying cells first, best rho first
    let mut order: Vec<usize> = (0..outcome.cells.len()).collect();
    order.sort_by(|&a, &b| {
        let ca = &outcome.cells[a];
        let cb = &outcome.cells[b];
        cb.qualifies.cmp(&ca.qualifies).then(
            cb.rho
                .unwrap_or(f64::NEG_INFINITY)
                .partial_cmp(&ca.rho.unwrap_or(f64::NEG_INFINITY))
                .expect("rho is not NaN"),
        )
    });
    let table_path = args.out_dir.join("grid.tsv");
    let mut table =
        String::from("lambda\tfactor\tk\tsparsity\trho\tcovered\tskipped\tobjective\tqualifies\n");
    for &i in &order {
        let c = &outcome.cells[i];
        table.push_str(&format!(
            "{}\t{}\t{}\t{:.6}\t{}\t{}\t{}\t{:.6}\t{}\n",
            c.lambda,
            c.factor,
            c.k,
            c.sparsity,
            c.rho.map_or("n/a".into(), |r| format!("{r:.6}")),
            c.covered,
            c.skipped,
            c.objective,
            c.qualifies
        ));
    }
    write_text(&table_path, &table)?;
    print!("{table}");

    let Some(winner) = outcome.winner else {
        return Err(Failure {
            code: EXIT_DATA,
            message: format!(
                "no grid cell reached the {:.0}% sparsity floor with a usable dev correlation; see {}",
                args.min_sparsity * 100.0,
                table_path.display()
            ),
        });
    };

    let cell = &outcome.cells[winner.cell];
    println!(
        "selected: lambda={} K={} (sparsity {:.4}, dev rho {:.4})",
        cell.lambda,
        cell.k,
        cell.sparsity,
        cell.rho.expect("winner has rho")
    );
    let codes_path = args.out_dir.join("codes.txt");
    let dict_path = args.out_dir.join("dictionary.txt");
    io::write_sparse(&codes_path, &winner.codes, args.sparse_layout.0)?;
    io::write_dictionary(&dict_path, &winner.dictionary)?;

    let mut config = grid_config.base.clone();
    config.lambda = cell.lambda;
    config.k = cell.k;
    let manifest = RunManifest {
        command: "grid-search".into(),
        config: serde_json::to_value(&config).expect("config serializes"),
        inputs: vec![sha256_file(&args.input)?, sha256_file(&args.dev_sim)?],
        outputs: vec![
            table_path.display().to_string(),
            codes_path.display().to_string(),
            dict_path.display().to_string(),
        ],
        threads: config.threads,
        seed: config.seed,
        duration_secs: started.elapsed().as_secs_f64(),
        results: serde_json::json!({
            "lambda": cell.lambda,
            "k": cell.k,
            "sparsity": cell.sparsity,
            "dev_rho": cell.rho,
            "covered": cell.covered,
            "skipped": cell.skipped,
        }),
    };
    manifest.write(args.out_dir.join("manifest.json"))?;
    Ok(())
}

fn cmd_baseline(args: BaselineArgs) -> Result<(), Failure> {
    let x = read_vectors(&args.vectors, args.format)?;
    match args.method {
        BaselineMethod::Sign => {
            let binary = baselines::sign_binarize(&x);
            io::write_binary(&args.out, &binary)?;
            let active: usize = (0..binary.len()).map(|i| binary.row(i).len()).sum();
            println!(
                "sign binarization: {} words, {} dims, {:.4} active fraction",
                binary.len(),
                binary.dims(),
                active as f64 / (binary.len() * binary.dims()) as f64
            );
        }
        BaselineMethod::MeanThreshold => {
            let (ternary, thresholds) = baselines::mean_threshold(&x);
            if thresholds.positive.is_none() {
                eprintln!("warning: no positive entries; the +1 branch is disabled");
            }
            if thresholds.negative.is_none() {
                eprintln!("warning: no negative entries; the -1 branch is disabled");
            }
            io::write_embeddings(&args.out, &ternary, false)?;
            let plus = ternary.data().iter().filter(|v| **v == 1.0).count();
            let minus = ternary.data().iter().filter(|v| **v == -1.0).count();
            let total = ternary.data().len();
            println!(
                "mean thresholding: M+ {:?}, M- {:?}; +1 {:.4}, -1 {:.4}, 0 {:.4}",
                thresholds.positive,
                thresholds.negative,
                plus as f64 / total as f64,
                minus as f64 / total as f64,
                (total - plus - minus) as f64 / total as f64
            );
        }
    }
    Ok(())
}

fn cmd_eval_sim(args: EvalSimArgs) -> Result<(), Failure> {
    let vectors = read_vectors(&args.vectors, args.format)?;
    let dataset = io::read_similarity(&args.dataset)?;
    let eval = eval_similarity(&vectors, &dataset)?;
    println!(
        "rho {:.6}  covered {}  skipped {}",
        eval.rho, eval.covered, eval.skipped
    );
    if let Some(path) = args.report {
        let json = serde_json::to_string_pretty(&eval).expect("eval serializes");
        write_text(&path, &(json + "\n"))?;
    }
    Ok(())
}

fn cmd_eval_clf(args: EvalClfArgs) -> Result<(), Failure> {
    if let Some(grid) = &args.l2_grid {
        if grid.is_empty() || grid.iter().any(|v| *v < 0.0 || !v.is_finite()) {
            return Err(Failure::usage("--l2-grid values must be >= 0"));
        }
    }
    let vectors = read_vectors(&args.vectors, args.format)?;
    let train_ds = io::read_labeled(&args.train, args.lowercase)?;
    let dev_ds = io::read_labeled(&args.dev, args.lowercase)?;
    let test_ds = io::read_labeled(&args.test, args.lowercase)?;

    let mode = match args.mode {
        ClfMode::Average => FeatureMode::Average,
        ClfMode::Concat => {
            let tokens = train_ds
                .examples
                .first()
                .map(|(t, _)| t.len())
                .ok_or_else(|| Failure::usage("empty training set"))?;
            FeatureMode::Concat { tokens }
        }
    };
    // dev/test label ids must agree with the training label set
    let align = |ds: &io::LabeledTextDataset| -> Result<io::LabeledTextDataset, Failure> {
        let mut examples = Vec::with_capacity(ds.examples.len());
        for (tokens, label) in &ds.examples {
            let name = &ds.labels[*label];
            let id = train_ds
                .labels
                .iter()
                .position(|l| l == name)
                .ok_or_else(|| {
                    Failure::from(Error::Degenerate(format!(
                        "label {name:?} does not occur in the training set"
                    )))
                })?;
            examples.push((tokens.clone(), id));
        }
        Ok(io::LabeledTextDataset {
            examples,
            labels: train_ds.labels.clone(),
            empty_examples: ds.empty_examples,
        })
    };
    let dev_ds = align(&dev_ds)?;
    let test_ds = align(&test_ds)?;

    let train_set = featurize_dataset(&train_ds, &vectors, mode)?;
    let dev_set = featurize_dataset(&dev_ds, &vectors, mode)?;
    let test_set = featurize_dataset(&test_ds, &vectors, mode)?;
    for (name, set) in [("train", &train_set), ("dev", &dev_set), ("test", &test_set)] {
        if set.all_oov_examples > 0 {
            eprintln!(
                "warning: {} {name} example(s) had every token out of vocabulary",
                set.all_oov_examples
            );
        }
    }

    let grid = args.l2_grid.clone().unwrap_or_else(default_l2_grid);
    let fit = eval::train_logreg(&train_set, &dev_set, &grid)?;
    let test_accuracy = fit.model.accuracy(&test_set);
    println!(
        "l2 {}  dev accuracy {:.4}  test accuracy {:.4}",
        fit.l2, fit.dev_accuracy, test_accuracy
    );
    if let Some(path) = args.report {
        let mode_name = match mode {
            FeatureMode::Average => "average".to_string(),
            FeatureMode::Concat { tokens } => format!("concat({tokens})"),
        };
        let json = serde_json::json!({
            "l2": fit.l2,
            "dev_accuracy": fit.dev_accuracy,
            "test_accuracy": test_accuracy,
            "classes": train_set.classes,
            "mode": mode_name,
        });
        write_text(
            &path,
            &(serde_json::to_string_pretty(&json).expect("report serializes") + "\n"),
        )?;
    }
    Ok(())
}

fn cmd_cluster(args: ClusterArgs) -> Result<(), Failure> {
    if args.max_iters == 0 {
        return Err(Failure::usage("--max-iters must be >= 1"));
    }
    if args.k == 0 {
        return Err(Failure::usage("--k must be >= 1"));
    }
    let vectors = read_vectors(&args.vectors, args.format)?;
    let result = kmeans(
        vectors.data(),
        vectors.dims(),
        args.k,
        args.seed,
        args.max_iters,
    )?;
    println!(
        "k {}  wcss {:.6}  iterations {}",
        args.k, result.wcss, result.iterations
    );
    // vocabulary files are conventionally frequency-ordered, so the first
    // members of each cluster are its most frequent words
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); args.k];
    for (word, &cluster) in result.assignments.iter().enumerate() {
        members[cluster].push(word);
    }
    for (c, words) in members.iter().enumerate().take(args.show) {
        let preview: Vec<&str> = words
            .iter()
            .take(6)
            .map(|&w| vectors.vocab()[w].as_str())
            .collect();
        println!("cluster {c} ({} words): {}", words.len(), preview.join(", "));
    }
    if let Some(path) = args.out {
        let mut text = String::new();
        for (word, &cluster) in result.assignments.iter().enumerate() {
            text.push_str(&format!("{}\t{}\n", vectors.vocab()[word], cluster));
        }
        write_text(&path, &text)?;
    }
    Ok(())
}

fn cmd_intrusion(args: IntrusionArgs) -> Result<(), Failure> {
    if args.dims == 0 || args.per_dim == 0 {
        return Err(Failure::usage("--dims and --per-dim must be >= 1"));
    }
    let vectors = read_vectors(&args.vectors, args.format)?;
    let report = gen_intrusions(&vectors, args.dims, args.per_dim, args.seed)?;
    println!(
        "{} instance(s) over {} dimension(s); {} dimension(s) skipped",
        report.instances.len(),
        args.dims,
        report.skipped_dimensions.len()
    );
    for skipped in &report.skipped_dimensions {
        eprintln!("warning: dimension {skipped} has no valid intruder; skipped");
    }
    for inst in report.instances.iter().take(5) {
        println!(
            "dim {:>4}: {}   [intruder: {}]",
            inst.dimension,
            inst.presentation.join(", "),
            inst.intruder
        );
    }
    if let Some(path) = args.out {
        let mut text = String::from("dimension\tpresented\tintruder\n");
        for inst in &report.instances {
            text.push_str(&format!(
                "{}\t{}\t{}\n",
                inst.dimension,
                inst.presentation.join(","),
                inst.intruder
            ));
        }
        write_text(&path, &text)?;
    }
    Ok(())
}
