// SPDX-License-Identifier: Apache-2.0

//! `hqc`: train hierarchical quantum classifiers and run the accompanying studies.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hqc_core::data::{BinaryTask, Split};
use hqc_core::experiments::{
    self, curves_csv, entropy_histograms, histogram_csv, noise_sweep, run_experiment, test_metrics,
    ClassifierSpec, DataOptions, DataStore, LayoutChoice, NoiseSweepConfig, TaskSpec,
};
use hqc_core::gates::{Family, Field};
use hqc_core::topology::export_qasm;
use hqc_core::trainer::{load_checkpoint, save_checkpoint, Checkpoint, TrainConfig};
use hqc_core::Error;

#[derive(Parser)]
#[command(name = "hqc", version, about = "Hierarchical quantum classifiers")]
struct Cli {
    /// Dataset root holding iris.csv and mnist/ [default: $HQC_DATA_DIR or ./data]
    #[arg(long, global = true)]
    data_dir: Option<PathBuf>,

    /// Seed of the train/test split (Iris) and of the quantum test split.
    #[arg(long, global = true, default_value_t = 0)]
    split_seed: u64,

    /// Log progress to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum LayoutArg {
    Ttn,
    Mera,
    Hybrid,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Simple,
    General,
    Ancilla,
}

#[derive(Clone, Copy, ValueEnum)]
enum FieldArg {
    Real,
    Complex,
}

#[derive(Clone, Copy, ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(Subcommand)]
enum Command {
    /// Train one classifier per seed and write the accuracy summary.
    Train {
        /// iris12, iris23, iris13, 0or1, 2or7, even, gt4, or qAorB for quantum classes.
        #[arg(long)]
        task: TaskSpec,
        #[arg(long, value_enum)]
        layout: LayoutArg,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, value_enum)]
        field: FieldArg,
        #[arg(long, default_value_t = 5)]
        seeds: u64,
        /// JSON object overriding fields of the task's default training configuration.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Summary JSON; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Learning curves of every seed as CSV.
        #[arg(long)]
        curves: Option<PathBuf>,
        /// Directory receiving one checkpoint per seed.
        #[arg(long)]
        checkpoint_dir: Option<PathBuf>,
    },
    /// Accuracy of a checkpointed model under depolarizing noise with finite shots.
    NoiseSweep {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long, default_value_t = 0.2)]
        lambda_max: f64,
        #[arg(long, default_value_t = 0.01)]
        lambda_step: f64,
        #[arg(long, default_value_t = 401)]
        shots: u64,
        #[arg(long, default_value_t = 200)]
        repeats: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Histograms of maximum bipartite entanglement entropy of synthetic classes.
    EntropyHist {
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,5,10")]
        classes: Vec<usize>,
        #[arg(long, default_value_t = 5000)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        bins: usize,
        #[arg(long, default_value_t = 8)]
        qubits: usize,
        /// CSV; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a checkpoint as OpenQASM 2.0 and report its exact test accuracy and cost.
    ExportQasm {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Logistic-regression baseline on a classical task.
    Baseline {
        #[arg(long)]
        task: BinaryTask,
        #[arg(long, value_enum, default_value = "on")]
        pca: Toggle,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .filter_level(if cli.verbose {
            log::LevelFilter::Info
        } else {
            log::LevelFilter::Warn
        })
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => match e.downcast::<Usage>() {
            Ok(m) => {
                eprintln!("error: {}", m.0);
                ExitCode::from(2)
            }
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(1)
            }
        },
    }
}

/// Invalid flag values and combinations; exits with the usage code.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(e: impl std::fmt::Display) -> anyhow::Error {
    Usage(e.to_string()).into()
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn load_config(task: TaskSpec, path: Option<&Path>) -> anyhow::Result<TrainConfig> {
    let base = task.default_config();
    let Some(path) = path else { return Ok(base) };
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let overrides: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let serde_json::Value::Object(overrides) = overrides else {
        return Err(usage(format!("{}: expected a JSON object", path.display())));
    };
    let mut merged = serde_json::to_value(&base)?;
    for (k, v) in overrides {
        merged[k] = v;
    }
    let config: TrainConfig =
        serde_json::from_value(merged).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    config.validate().map_err(usage)?;
    Ok(config)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let options = DataOptions {
        root: cli
            .data_dir
            .clone()
            .unwrap_or_else(experiments::default_data_root),
        split_seed: cli.split_seed,
        ..Default::default()
    };
    let store = DataStore::new(options);
    match cli.command {
        Command::Train {
            task,
            layout,
            kind,
            field,
            seeds,
            config,
            out,
            curves,
            checkpoint_dir,
        } => {
            let layout = match layout {
                LayoutArg::Ttn => LayoutChoice::Ttn,
                LayoutArg::Mera => LayoutChoice::Mera,
                LayoutArg::Hybrid => LayoutChoice::Hybrid,
            };
            let family = match kind {
                KindArg::Simple => Family::Simple,
                KindArg::General => Family::General,
                KindArg::Ancilla => Family::Ancilla,
            };
            let field = match field {
                FieldArg::Real => Field::Real,
                FieldArg::Complex => Field::Complex,
            };
            let spec = ClassifierSpec::new(layout, family, field).map_err(usage)?;
            if seeds == 0 {
                return Err(usage("--seeds must be at least 1"));
            }
            let config = load_config(task, config.as_deref())?;
            let prepared = store.prepare(task).context("preparing data")?;
            let seed_list: Vec<u64> = (0..seeds).collect();
            let (result, runs) = run_experiment(spec, &prepared, &config, &seed_list)?;
            if let Some(h) = &result.hybrid {
                for (s, h) in seed_list.iter().zip(h) {
                    eprintln!(
                        "seed {s}: ttn {} steps, mera {} steps, ratio {:.3}",
                        h.ttn_steps, h.mera_steps, h.ratio
                    );
                }
            }
            if let Some(dir) = checkpoint_dir {
                std::fs::create_dir_all(&dir)?;
                for run in &runs {
                    let cfg = TrainConfig {
                        rng_seed: run.seed,
                        ..config.clone()
                    };
                    let mut ck = Checkpoint::new(&run.model, &run.report.best_params)?
                        .with_report(&cfg, &run.report);
                    ck.task = Some(task.to_string());
                    ck.split_seed = Some(cli.split_seed);
                    let name = format!("{task}_{:?}_{:?}_seed{}.json", layout, spec.kind, run.seed)
                        .to_lowercase();
                    save_checkpoint(&ck, dir.join(name))?;
                }
            }
            if let Some(path) = curves {
                let c: Vec<(u64, &[_])> = runs
                    .iter()
                    .map(|r| (r.seed, r.report.curves.as_slice()))
                    .collect();
                std::fs::write(&path, curves_csv(&c))?;
            }
            eprintln!(
                "{task}: mean test accuracy {:.2} ± {:.2}",
                result.mean,
                result.std_dev.unwrap_or(0.0)
            );
            emit(out.as_deref(), &result.to_json()?)
        }
        Command::NoiseSweep {
            checkpoint,
            lambda_max,
            lambda_step,
            shots,
            repeats,
            seed,
            out,
        } => {
            let cfg = NoiseSweepConfig {
                lambda_max,
                lambda_step,
                shots,
                repeats,
                seed,
            };
            cfg.lambdas().map_err(usage)?;
            let (ck, model, prepared) = open_checkpoint(&store, &checkpoint)?;
            let rows = prepared.data.indices(Split::Test);
            let points = noise_sweep(&model, &ck.params, &prepared.data, &rows, &cfg)?;
            for p in &points {
                eprintln!(
                    "lambda {:.2}: {:.2} ± {:.2}",
                    p.lambda, p.mean_accuracy, p.std_accuracy
                );
            }
            emit(out.as_deref(), &json(&points)?)
        }
        Command::EntropyHist {
            classes,
            count,
            seed,
            bins,
            qubits,
            out,
        } => {
            if classes.is_empty() || classes.contains(&0) || count == 0 || bins == 0 {
                return Err(usage(
                    "classes must be positive depths and count and bins positive",
                ));
            }
            let hists = entropy_histograms(&classes, qubits, count, seed, bins)?;
            for h in &hists {
                eprintln!("class {}: median entropy {:.4} bits", h.depth, h.median());
            }
            emit(out.as_deref(), &histogram_csv(&hists))
        }
        Command::ExportQasm { checkpoint, out } => {
            let (ck, model, prepared) = open_checkpoint(&store, &checkpoint)?;
            let qasm = export_qasm(&model, &ck.params).map_err(|e| match e {
                Error::UnsupportedKind(_) => usage(e),
                e => e.into(),
            })?;
            let (acc, cost) = test_metrics(&model, &ck.params, &prepared.data)?;
            eprintln!("test accuracy {acc:.2}%, test cost {cost:.4}");
            emit(out.as_deref(), &qasm)
        }
        Command::Baseline { task, pca, out } => {
            let r = experiments::baseline(&store, task, matches!(pca, Toggle::On))?;
            eprintln!("{task}: logistic test accuracy {:.2}%", r.test_accuracy);
            emit(out.as_deref(), &json(&r)?)
        }
    }
}

fn open_checkpoint(
    store: &DataStore,
    path: &Path,
) -> anyhow::Result<(
    Checkpoint,
    hqc_core::topology::ClassifierModel,
    experiments::PreparedTask,
)> {
    let mut ck = load_checkpoint(path).with_context(|| format!("loading {}", path.display()))?;
    let model = ck.model()?;
    let task: TaskSpec = ck
        .task
        .as_deref()
        .context("checkpoint does not name its task")?
        .parse()?;
    let mut options = store.options.clone();
    options.split_seed = ck.split_seed.unwrap_or(options.split_seed);
    let prepared = DataStore::new(options).prepare(task)?;
    ck.task = Some(task.to_string());
    Ok((ck, model, prepared))
}
