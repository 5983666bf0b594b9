use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fadkit::commands::{self, Command};
use fadkit::config::{thread_pool, ConfigLayer, RunConfig};

#[derive(Parser)]
#[command(name = "fadkit", version, about = "Fréchet Audio Distance toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Overall and per-category FAD of each system against the reference
    Fad(Flags),
    /// Spearman correlation of FAD⁻¹ with perceptual ratings
    Correlate(Flags),
    /// Project embeddings onto their top principal components
    Reduce(Flags),
    /// 2D classical-MDS map of the inter-category FAD matrix
    Map(Flags),
    /// fad, then correlate, then map
    Pipeline(Flags),
}

#[derive(clap::Args)]
struct Flags {
    /// JSON config file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Ratings CSV (system,category,audio_quality,category_fit)
    #[arg(long)]
    ratings: Option<PathBuf>,
    /// Precomputed FAD CSV for `correlate`
    #[arg(long)]
    fad_csv: Option<PathBuf>,
    #[arg(long)]
    model: Option<String>,
    /// Reduce to K principal components (128 if K is omitted)
    #[arg(long, value_name = "K", num_args = 0..=1, default_missing_value = "128")]
    reduce: Option<usize>,
    #[arg(long)]
    noise_std: Option<f64>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    system: Option<String>,
    #[arg(long)]
    category: Option<String>,
    /// Cells per side of the region grid in the map output
    #[arg(long)]
    grid_size: Option<usize>,
}

impl Flags {
    fn into_layers(self) -> (Option<PathBuf>, ConfigLayer) {
        let layer = ConfigLayer {
            manifest: self.manifest,
            ratings: self.ratings,
            fad_csv: self.fad_csv,
            model: self.model,
            reduce: self.reduce,
            noise_std: self.noise_std,
            reps: self.reps,
            seed: self.seed,
            out: self.out,
            system: self.system,
            category: self.category,
            grid_size: self.grid_size,
        };
        (self.config, layer)
    }
}

fn run(command: Command, flags: Flags) -> fadkit::Result<()> {
    let (config_path, flags) = flags.into_layers();
    let layer = match config_path {
        Some(path) => flags.over(ConfigLayer::load(&path)?),
        None => flags,
    };
    let config = RunConfig::resolve(layer)?;
    thread_pool()?.install(|| commands::run(command, &config))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, flags) = match cli.command {
        Cmd::Fad(f) => (Command::Fad, f),
        Cmd::Correlate(f) => (Command::Correlate, f),
        Cmd::Reduce(f) => (Command::Reduce, f),
        Cmd::Map(f) => (Command::Map, f),
        Cmd::Pipeline(f) => (Command::Pipeline, f),
    };
    match run(command, flags) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fadkit: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
