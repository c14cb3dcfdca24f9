use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mhfc::dataio::{
    generate_synthetic, load_manifest, save_dataset, write_features, write_results, FeatureDataset,
    SynthConfig,
};
use mhfc::numerics::SimplexVector;
use mhfc::protocols::{
    episode_rng, evaluate, fused_features, sample_episode, Budget, EpisodeConfig, EpisodeShape,
    RunPlan, Setting,
};
use mhfc::subspace::{SubspaceConfig, SubspaceMethod};
use mhfc::{Error, Result};
use serde_json::{json, Value};

mod ablate;

#[derive(Parser)]
#[command(
    name = "mhfc",
    version,
    about = "Multi-head feature collaboration for few-shot classification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one configuration over many sampled episodes.
    Run(RunCmd),
    /// Write a synthetic multi-head dataset (manifest, head files, labels).
    Synth(SynthCmd),
    /// Sweep one factor with paired episodes and print a CSV table.
    Ablate(AblateCmd),
    /// Write the fused support and query features of one episode as CSV.
    ExportFused(ExportCmd),
}

#[derive(Args, Clone)]
struct SynthArgs {
    #[arg(long, default_value_t = 20)]
    classes: usize,
    #[arg(long, default_value_t = 100)]
    per_class: usize,
    #[arg(long, default_value_t = 64)]
    raw_dim: usize,
    #[arg(long, default_value_t = 2)]
    heads: usize,
    #[arg(long, default_value_t = 1.0)]
    class_separation: f64,
    #[arg(long, default_value_t = 0.8)]
    head_shift: f64,
    #[arg(long, default_value_t = 0.6)]
    noise_sigma: f64,
}

impl SynthArgs {
    fn config(&self, seed: u64) -> SynthConfig {
        SynthConfig {
            n_classes: self.classes,
            samples_per_class: self.per_class,
            raw_dim: self.raw_dim,
            n_heads: self.heads,
            class_separation: self.class_separation,
            head_shift: self.head_shift,
            noise_sigma: self.noise_sigma,
            seed,
        }
    }
}

/// Where the features come from: a manifest, or the synthetic generator.
#[derive(Args, Clone)]
struct DataArgs {
    /// Feature manifest; without it a synthetic dataset is generated.
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[command(flatten)]
    synth: SynthArgs,
    /// Seed of the synthetic dataset.
    #[arg(long, default_value_t = 7)]
    data_seed: u64,
}

impl DataArgs {
    fn load(&self) -> Result<(FeatureDataset, Value)> {
        match &self.manifest {
            Some(path) => Ok((load_manifest(path)?, json!({ "manifest": path }))),
            None => {
                let cfg = self.synth.config(self.data_seed);
                Ok((generate_synthetic(&cfg)?, json!({ "synthetic": cfg })))
            }
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SettingArg {
    Inductive,
    Transductive,
    Semi,
}

impl From<SettingArg> for Setting {
    fn from(s: SettingArg) -> Self {
        match s {
            SettingArg::Inductive => Setting::Inductive,
            SettingArg::Transductive => Setting::Transductive,
            SettingArg::Semi => Setting::Semi,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    None,
    Pca,
    Lle,
    Le,
}

impl From<MethodArg> for SubspaceMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::None => SubspaceMethod::None,
            MethodArg::Pca => SubspaceMethod::Pca,
            MethodArg::Lle => SubspaceMethod::Lle,
            MethodArg::Le => SubspaceMethod::Le,
        }
    }
}

#[derive(Args, Clone)]
struct EpisodeArgs {
    #[arg(long, value_enum, default_value_t = SettingArg::Inductive)]
    setting: SettingArg,
    #[arg(long, default_value_t = 5)]
    way: usize,
    #[arg(long, default_value_t = 1)]
    shot: usize,
    #[arg(long, default_value_t = 15)]
    query: usize,
    /// Unlabeled samples per class (semi-supervised pool).
    #[arg(long, default_value_t = 0)]
    unlabeled: usize,
    #[arg(long, value_enum, default_value_t = MethodArg::Le)]
    method: MethodArg,
    #[arg(long, default_value_t = 5)]
    dim2: usize,
    /// Neighborhood size for LE/LLE [default: max(2, points / 10)].
    #[arg(long)]
    k_neighbors: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    #[arg(long, default_value_t = mhfc::attention::DEFAULT_ETA)]
    eta: f64,
    /// Pseudo-labels to absorb: a count or "all".
    #[arg(long, default_value = "all")]
    budget: Budget,
    /// Stop self-training once the best pool score falls below this.
    #[arg(long)]
    confidence_floor: Option<f64>,
    /// Fixed head weights, comma separated, instead of learned ones.
    #[arg(long, value_delimiter = ',')]
    weights: Option<Vec<f64>>,
    /// Scale every raw feature vector to unit length first.
    #[arg(long)]
    unit_norm: bool,
}

impl EpisodeArgs {
    fn shape(&self) -> EpisodeShape {
        EpisodeShape {
            way: self.way,
            shot: self.shot,
            query: self.query,
            unlabeled: self.unlabeled,
        }
    }

    fn config(&self) -> Result<EpisodeConfig> {
        let fixed_weights = self.weights.clone().map(SimplexVector::new).transpose()?;
        let cfg = EpisodeConfig {
            setting: self.setting.into(),
            subspace: SubspaceConfig {
                method: self.method.into(),
                dim2: self.dim2,
                k_neighbors: self.k_neighbors,
            },
            mu: self.mu,
            eta: self.eta,
            pseudo_label_budget: self.budget,
            confidence_floor: self.confidence_floor,
            fixed_weights,
            unit_norm: self.unit_norm,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args, Clone)]
struct SweepArgs {
    #[arg(long, default_value_t = 600)]
    episodes: usize,
    /// Master seed for episode sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; results do not depend on it.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct RunCmd {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    episode: EpisodeArgs,
    #[command(flatten)]
    sweep: SweepArgs,
    /// Results JSON path.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SynthCmd {
    #[command(flatten)]
    synth: SynthArgs,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Output directory.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct AblateCmd {
    #[arg(long, value_enum)]
    mode: ablate::Mode,
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    episode: EpisodeArgs,
    #[command(flatten)]
    sweep: SweepArgs,
    /// CSV path; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ExportCmd {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    episode: EpisodeArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Which episode of the seeded sequence to export.
    #[arg(long, default_value_t = 0)]
    episode_index: usize,
    #[arg(long)]
    output: PathBuf,
}

fn warn_empty_pool(episode: &EpisodeArgs) {
    if matches!(episode.setting, SettingArg::Semi) && episode.unlabeled == 0 {
        eprintln!("warning: semi setting with --unlabeled 0 has no pool; running inductive");
    }
}

fn cmd_run(cmd: RunCmd) -> Result<()> {
    warn_empty_pool(&cmd.episode);
    let plan = RunPlan {
        shape: cmd.episode.shape(),
        episodes: cmd.sweep.episodes,
        seed: cmd.sweep.seed,
        episode: cmd.episode.config()?,
    };
    let (dataset, source) = cmd.data.load()?;
    let mut summary = evaluate(&dataset, &plan, cmd.sweep.jobs)?;
    if let Value::Object(map) = &mut summary.config {
        map.insert("data".into(), source);
    }
    println!(
        "accuracy: {:.2}% +/- {:.2}% over {} episodes",
        100.0 * summary.mean_accuracy,
        100.0 * summary.ci95,
        summary.n_episodes
    );
    if let Some(path) = &cmd.output {
        write_results(&summary, path)?;
    }
    Ok(())
}

fn cmd_synth(cmd: SynthCmd) -> Result<()> {
    let dataset = generate_synthetic(&cmd.synth.config(cmd.seed))?;
    let manifest = save_dataset(&dataset, &cmd.output)?;
    println!("wrote {}", manifest.display());
    Ok(())
}

fn cmd_export(cmd: ExportCmd) -> Result<()> {
    let cfg = cmd.episode.config()?;
    let (dataset, _) = cmd.data.load()?;
    let shape = cmd.episode.shape();
    shape.check_dataset(&dataset)?;
    let ep = sample_episode(
        &dataset,
        &shape,
        &mut episode_rng(cmd.seed, cmd.episode_index),
    )?;
    let (z, samples) = fused_features(&dataset, &ep, &cfg)?;
    let labels: Vec<i64> = samples.iter().map(|&i| dataset.labels()[i]).collect();
    write_features(&z, &labels, &cmd.output)?;
    println!(
        "wrote {} samples x {} features to {}",
        z.n_samples(),
        z.matrix.rows(),
        cmd.output.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(cmd) => cmd_run(cmd),
        Command::Synth(cmd) => cmd_synth(cmd),
        Command::Ablate(cmd) => ablate::run(cmd),
        Command::ExportFused(cmd) => cmd_export(cmd),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> ExitCode {
    if e.is_config_error() {
        ExitCode::from(2)
    } else {
        ExitCode::from(1)
    }
}
