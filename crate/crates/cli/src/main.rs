//! Command-line surface for the toolkit: scoring, softmax conversion,
//! identifiability probing, model averaging, and synthetic-data generation.
//!
//! Exit codes are part of the interface: 0 on success, 2 for input or
//! validation problems, 3 for infeasible configurations (enumeration or
//! completion caps). Reports go to stdout, diagnostics to stderr, and every
//! command is byte-deterministic given its flags and seed.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use preqnet::criteria::{
    class_sequential_exact, class_sequential_monte_carlo, conditional_node_monitor,
    global_criterion,
};
use preqnet::identifiability::variational_dependence_probe_with;
use preqnet::network::{conditional_class_dist, configurations, sample_dataset};
use preqnet::selection::{
    averaged_class_predictive, enumerate_dags, select_top_k, structure_log_posterior, ModelPrior,
    RankCriterion,
};
use preqnet::softmax::{evaluate_softmax, extract_polynomial_softmax};

use preqnet_cli::model_file::{
    dataset_to_csv, parse_dataset, parse_model, parse_prediction_input, LoadedModel,
};
use preqnet_cli::report::{
    sig, to_json, AverageReport, IdentifiabilityReport, OutputFormat, PredictiveReport, RankedRow,
    RankingReport, ScoreReport, SoftmaxFile, StructureRow,
};
use preqnet_cli::CliError;

#[derive(Parser)]
#[command(
    name = "preqnet",
    version,
    about = "Discrete Bayesian-network classification: scoring, conversion, identifiability, averaging"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CriterionArg {
    Cnm,
    Csc,
    CscMc,
    Lml,
}

/// Run options shared by the scoring commands.
#[derive(Debug, clap::Args)]
struct RunConfig {
    /// Required for csc-mc; randomized paths never run unseeded.
    #[arg(long)]
    seed: Option<u64>,
    /// Monte-Carlo sample count for csc-mc.
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    /// Exact-csc feasibility cap on the number of class completions.
    #[arg(long, default_value_t = preqnet::criteria::DEFAULT_COMPLETION_CAP)]
    completion_cap: u64,
    #[arg(long, value_enum, default_value = "table")]
    format: OutputFormat,
}

impl RunConfig {
    fn validate(&self) -> Result<(), CliError> {
        check_positive("samples", self.samples as f64)?;
        check_positive("completion-cap", self.completion_cap as f64)?;
        Ok(())
    }

    fn required_seed(&self) -> Result<u64, CliError> {
        self.seed.ok_or_else(|| {
            CliError::Validation(
                "--seed is required for csc-mc; randomized paths never run unseeded".into(),
            )
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Score a model against a dataset with a prequential criterion.
    Score {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum)]
        criterion: CriterionArg,
        #[command(flatten)]
        run: RunConfig,
    },
    /// Convert a fully parameterized model to a softmax regression (JSON).
    Convert {
        #[arg(long)]
        model: PathBuf,
        /// Target representation; only `softmax` exists.
        #[arg(long, value_parser = ["softmax"])]
        to: String,
        /// Evaluate both representations on every input configuration and
        /// print the maximum absolute deviation to stderr.
        #[arg(long)]
        check: bool,
    },
    /// Probe the rank of the parameter-to-input-distribution Jacobian.
    Identifiability {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 100)]
        points: usize,
        #[arg(long)]
        seed: u64,
        /// Central-difference step on free parameters.
        #[arg(long, default_value_t = preqnet::identifiability::DEFAULT_STEP)]
        step: f64,
        /// Relative singular-value threshold.
        #[arg(long, default_value_t = preqnet::identifiability::DEFAULT_RANK_TOLERANCE)]
        rank_tol: f64,
        #[arg(long, value_enum, default_value = "table")]
        format: OutputFormat,
    },
    /// Enumerate structures over a variable spec, score them, and average.
    Average {
        /// Variables spec: a model file whose edges and parameters are unused.
        #[arg(long)]
        variables: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Dirichlet hyperparameter applied to every CPT cell of every
        /// candidate structure.
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        /// Refuse to enumerate beyond this many variables.
        #[arg(long, default_value_t = 5)]
        max_nodes: usize,
        /// Drop structures where any node has more parents than this.
        #[arg(long)]
        max_parents: Option<usize>,
        /// Ranking criterion for --top.
        #[arg(long, value_enum, default_value = "lml")]
        criterion: CriterionArg,
        /// Print the top k structures under the ranking criterion.
        #[arg(long)]
        top: Option<usize>,
        /// Input assignment, e.g. "X1=0,X2=hi"; prints the averaged class
        /// distribution.
        #[arg(long)]
        predict: Option<String>,
        #[command(flatten)]
        run: RunConfig,
    },
    /// Sample complete cases from a fully parameterized model as CSV.
    Generate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        cases: usize,
        #[arg(long)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<LoadedModel, CliError> {
    parse_model(&read_file(path)?)
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Score {
            model,
            data,
            criterion,
            run,
        } => {
            run.validate()?;
            let model = load_model(&model)?;
            let dataset = parse_dataset(&read_file(&data)?, &model)?;
            let report = match criterion {
                CriterionArg::Cnm => {
                    conditional_node_monitor(&model.structure, &model.prior, &dataset)?
                }
                CriterionArg::Csc => class_sequential_exact(
                    &model.structure,
                    &model.prior,
                    &dataset,
                    run.completion_cap,
                )?,
                CriterionArg::CscMc => class_sequential_monte_carlo(
                    &model.structure,
                    &model.prior,
                    &dataset,
                    run.samples,
                    run.required_seed()?,
                )?,
                CriterionArg::Lml => global_criterion(&model.structure, &model.prior, &dataset)?,
            };
            print!(
                "{}",
                ScoreReport::from_criterion(&report).render(run.format)
            );
            Ok(())
        }

        Command::Convert { model, to, check } => {
            debug_assert_eq!(to, "softmax");
            let model = load_model(&model)?;
            let params = model.parameters.as_ref().ok_or_else(|| {
                CliError::Validation(
                    "conversion requires explicit parameter tables in the model file".into(),
                )
            })?;
            let softmax = extract_polynomial_softmax(&model.structure, params)?;
            print!("{}", to_json(&SoftmaxFile::from_model(&softmax)));
            if check {
                let cards: Vec<usize> = model
                    .structure
                    .input_variables()
                    .iter()
                    .map(|&i| model.structure.variable(i).cardinality())
                    .collect();
                let mut max_deviation: f64 = 0.0;
                for x in configurations(&cards) {
                    let direct = conditional_class_dist(&model.structure, params, &x)?;
                    let via_softmax = evaluate_softmax(&softmax, &x)?;
                    for (a, b) in direct.iter().zip(&via_softmax) {
                        max_deviation = max_deviation.max((a - b).abs());
                    }
                }
                eprintln!("max-abs-deviation {}", sig(max_deviation));
            }
            Ok(())
        }

        Command::Identifiability {
            model,
            points,
            seed,
            step,
            rank_tol,
            format,
        } => {
            check_positive("step", step)?;
            check_positive("rank-tol", rank_tol)?;
            if points == 0 {
                return Err(CliError::Validation("--points must be at least 1".into()));
            }
            let model = load_model(&model)?;
            let rank_report =
                variational_dependence_probe_with(&model.structure, points, seed, step, rank_tol)?;
            print!(
                "{}",
                IdentifiabilityReport::from_rank_report(&rank_report).render(format)
            );
            Ok(())
        }

        Command::Average {
            variables,
            data,
            alpha,
            max_nodes,
            max_parents,
            criterion,
            top,
            predict,
            run,
        } => {
            run.validate()?;
            check_positive("alpha", alpha)?;
            let model = load_model(&variables)?;
            let n = model.structure.variable_count();
            if n > max_nodes {
                return Err(CliError::Infeasible(format!(
                    "{n} variables exceed the enumeration bound --max-nodes {max_nodes}"
                )));
            }
            let dataset = parse_dataset(&read_file(&data)?, &model)?;
            let family = enumerate_dags(
                model.structure.variables(),
                model.structure.class_index(),
                max_parents,
            )?;
            let table = structure_log_posterior(&family, &ModelPrior::uniform(), alpha, &dataset)?;

            let name_edges = |s: &preqnet::network::DagStructure| -> Vec<(String, String)> {
                let mut edges = Vec::new();
                for child in 0..s.variable_count() {
                    for &parent in s.parents(child) {
                        edges.push((
                            s.variable(parent).name().to_string(),
                            s.variable(child).name().to_string(),
                        ));
                    }
                }
                edges.sort();
                edges
            };

            let structures: Vec<StructureRow> = table
                .entries
                .iter()
                .enumerate()
                .map(|(index, entry)| StructureRow {
                    index,
                    edges: name_edges(&entry.structure),
                    log_marginal_likelihood: entry.log_marginal_likelihood,
                    log_posterior: entry.log_posterior,
                    posterior: entry.log_posterior.exp(),
                })
                .collect();

            let ranking = match top {
                None => None,
                Some(k) => {
                    let rank_criterion = match criterion {
                        CriterionArg::Lml => RankCriterion::MarginalLikelihood,
                        CriterionArg::Cnm => RankCriterion::Cnm,
                        CriterionArg::Csc => RankCriterion::CscExact {
                            completion_cap: run.completion_cap,
                        },
                        CriterionArg::CscMc => RankCriterion::CscMonteCarlo {
                            samples: run.samples,
                            seed: run.required_seed()?,
                        },
                    };
                    let ranked = select_top_k(&table, k, rank_criterion, alpha, &dataset)?;
                    let index_of = |mask: u128| {
                        table
                            .entries
                            .iter()
                            .position(|e| e.structure.adjacency_encoding() == mask)
                            .expect("ranked structure comes from the table")
                    };
                    Some(RankingReport {
                        criterion: match criterion {
                            CriterionArg::Lml => "lml",
                            CriterionArg::Cnm => "cnm",
                            CriterionArg::Csc => "csc",
                            CriterionArg::CscMc => "csc-mc",
                        }
                        .to_string(),
                        top: ranked
                            .iter()
                            .map(|(structure, score)| RankedRow {
                                index: index_of(structure.adjacency_encoding()),
                                edges: name_edges(structure),
                                score: *score,
                            })
                            .collect(),
                    })
                }
            };

            let predictive = match predict {
                None => None,
                Some(text) => {
                    let x = parse_prediction_input(&text, &model)?;
                    let distribution = averaged_class_predictive(&table, alpha, &dataset, &x)?;
                    Some(PredictiveReport {
                        class_variable: model.structure.class_variable().name().to_string(),
                        distribution,
                    })
                }
            };

            let report = AverageReport {
                alpha,
                structures,
                ranking,
                predictive,
            };
            print!("{}", report.render(run.format));
            Ok(())
        }

        Command::Generate { model, cases, seed } => {
            let model = load_model(&model)?;
            let params = model.parameters.as_ref().ok_or_else(|| {
                CliError::Validation(
                    "generation requires explicit parameter tables in the model file".into(),
                )
            })?;
            let dataset = sample_dataset(&model.structure, params, cases, seed);
            print!("{}", dataset_to_csv(&dataset));
            Ok(())
        }
    }
}

fn check_positive(flag: &str, value: f64) -> Result<(), CliError> {
    if !value.is_finite() || value <= 0.0 {
        return Err(CliError::Validation(format!(
            "--{flag} must be positive, got {value}"
        )));
    }
    Ok(())
}
