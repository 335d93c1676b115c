//! Command-line front end for the box-embedding trainer and evaluators.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use elbe::cli::{
    cmd_eval_equiv, cmd_eval_ppi, cmd_family_demo, cmd_gen_synthetic, cmd_train, default_out_dir,
    EvalEquivArgs, EvalPpiArgs, FamilyDemoArgs, GenSyntheticArgs, TrainArgs,
};
use elbe::trainer::TrainConfig;

#[derive(Parser)]
#[command(name = "elbe", about = "Box embeddings for normalized EL++ ontologies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct CommonTrainOpts {
    /// Embedding dimension.
    #[arg(long, default_value_t = 50)]
    dim: usize,
    /// Hinge margin (negative values demand slack inside containments).
    #[arg(long, default_value_t = -0.05, allow_hyphen_values = true)]
    margin: f64,
    /// Adam learning rate.
    #[arg(long, default_value_t = 5e-3)]
    lr: f64,
    /// Number of training epochs.
    #[arg(long, default_value_t = 1000)]
    epochs: usize,
    /// Mini-batch size.
    #[arg(long, default_value_t = 32)]
    batch_size: usize,
    /// Corrupted-tail negatives sampled per NF3 axiom.
    #[arg(long, default_value_t = 1)]
    negatives: usize,
    /// RNG seed controlling init and batch order.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Worker threads (training is deterministic; only 1 is supported).
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

impl CommonTrainOpts {
    fn to_config(&self) -> TrainConfig {
        TrainConfig {
            dim: self.dim,
            margin: self.margin,
            learning_rate: self.lr,
            epochs: self.epochs,
            batch_size: self.batch_size,
            negatives_per_positive: self.negatives,
            seed: self.seed,
            ..TrainConfig::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Train box embeddings on a normalized axiom file.
    Train {
        /// Training axiom file.
        axioms: PathBuf,
        /// Optional validation axiom file (NF3 mean rank reported per epoch).
        #[arg(long)]
        valid: Option<PathBuf>,
        #[command(flatten)]
        opts: CommonTrainOpts,
        /// Output directory (default: $ELBE_OUT_DIR or ./elbe_out).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rank link-prediction queries from a checkpoint.
    EvalPpi {
        /// Checkpoint written by `train`.
        checkpoint: PathBuf,
        /// Test axiom file (NF3 lines are the queries).
        test: PathBuf,
        /// Known-true axiom file removed from filtered rankings.
        #[arg(long)]
        filter: Option<PathBuf>,
        /// Hits@k cutoffs.
        #[arg(long, value_delimiter = ',', default_values_t = [10usize, 100])]
        ks: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rank equivalence-entailment queries from a checkpoint.
    EvalEquiv {
        checkpoint: PathBuf,
        /// Held-out triples as `nf2 C D E` lines.
        triples: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = [1usize, 3, 10])]
        ks: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train the 12-axiom family ontology in 2-D and plot the boxes.
    FamilyDemo {
        #[arg(long, default_value_t = 10_000)]
        epochs: usize,
        #[arg(long, default_value_t = 1e-3)]
        lr: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build an equivalence-entailment corpus from a base ontology.
    GenSynthetic {
        /// Base axiom file supplying the NF2 triples.
        base: PathBuf,
        #[arg(long, default_value_t = 2131)]
        n_triples: usize,
        #[arg(long, default_value_t = 1000)]
        n_heldout: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> elbe::Result<()> {
    match cli.command {
        Command::Train {
            axioms,
            valid,
            opts,
            out,
        } => {
            if opts.threads != 1 {
                return Err(elbe::Error::Config(format!(
                    "--threads {} unsupported: training is single-threaded for determinism",
                    opts.threads
                )));
            }
            let config = opts.to_config();
            config.validate()?;
            let args = TrainArgs {
                axioms,
                valid,
                out_dir: out.unwrap_or_else(default_out_dir),
                config,
                threads: opts.threads,
            };
            let ckpt = cmd_train(&args)?;
            println!("checkpoint written to {}", ckpt.display());
            Ok(())
        }
        Command::EvalPpi {
            checkpoint,
            test,
            filter,
            ks,
            out,
        } => {
            let report = cmd_eval_ppi(&EvalPpiArgs {
                checkpoint,
                test,
                filter,
                ks,
                out_dir: out.unwrap_or_else(default_out_dir),
            })?;
            println!(
                "raw MR {:.2} AUC {:.4} | filtered MR {:.2} AUC {:.4}",
                report.raw.mean_rank, report.raw.auc, report.filtered.mean_rank,
                report.filtered.auc
            );
            Ok(())
        }
        Command::EvalEquiv {
            checkpoint,
            triples,
            ks,
            out,
        } => {
            let report = cmd_eval_equiv(&EvalEquivArgs {
                checkpoint,
                triples,
                ks,
                out_dir: out.unwrap_or_else(default_out_dir),
            })?;
            for (k, h) in &report.raw.hits_at {
                println!("hits@{k} {h:.4}");
            }
            println!("mean rank {:.3}", report.raw.mean_rank);
            Ok(())
        }
        Command::FamilyDemo {
            epochs,
            lr,
            seed,
            out,
        } => {
            let result = cmd_family_demo(&FamilyDemoArgs {
                out_dir: out.unwrap_or_else(default_out_dir),
                epochs,
                learning_rate: lr,
                seed,
            })?;
            println!("checkpoint written to {}", result.checkpoint.display());
            Ok(())
        }
        Command::GenSynthetic {
            base,
            n_triples,
            n_heldout,
            seed,
            out,
        } => {
            let (train, heldout) = cmd_gen_synthetic(&GenSyntheticArgs {
                base,
                n_triples,
                n_heldout,
                seed,
                out_dir: out.unwrap_or_else(default_out_dir),
            })?;
            println!("wrote {} and {}", train.display(), heldout.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
