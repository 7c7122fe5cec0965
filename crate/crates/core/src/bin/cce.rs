use std::path::PathBuf;
use std::process::ExitCode;

use cce::experiment::{self, ExperimentConfig};
use cce::games::GameSpec;
use cce::{Error, Result};
use clap::{Parser, Subcommand};
use serde_json::{Map, Value};

#[derive(Parser)]
#[command(name = "cce", version, about = "Coarse correlated equilibria of extensive-form games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a solver and write traces plus a summary.
    Solve(SolveArgs),
    /// Build a game and save it as a JSON instance.
    Instance {
        #[arg(long)]
        game: String,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(clap::Args)]
struct SolveArgs {
    /// Game spec, e.g. K3-4, L3-3, G2-3-AL, SHAPLEY, M:coordination, R2-3:seed=7.
    #[arg(long)]
    game: Option<String>,
    /// cfr, cfr-s, cfr-jr or cfr-jr-k.
    #[arg(long)]
    algo: Option<String>,
    #[arg(long)]
    iters: Option<u64>,
    #[arg(long)]
    eval_every: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seeds for cfr-s, comma separated.
    #[arg(long = "seed", alias = "seeds", value_delimiter = ',')]
    seeds: Vec<u64>,
    #[arg(long)]
    recon_rate: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    alpha_targets: Vec<f64>,
    /// Per-cell limit in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    workers: Option<usize>,
    /// JSON config; its fields override the flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl SolveArgs {
    fn flags(&self) -> Map<String, Value> {
        let mut m = Map::new();
        let mut put = |k: &str, v: Option<Value>| {
            if let Some(v) = v {
                m.insert(k.into(), v);
            }
        };
        put("game", self.game.clone().map(Value::from));
        put("algorithm", self.algo.clone().map(Value::from));
        put("iterations", self.iters.map(Value::from));
        put("eval_every", self.eval_every.map(Value::from));
        put("out_dir", self.out.as_ref().map(|p| Value::from(p.display().to_string())));
        put("seeds", (!self.seeds.is_empty()).then(|| Value::from(self.seeds.clone())));
        put("k", self.recon_rate.map(Value::from));
        put("alpha_targets", (!self.alpha_targets.is_empty()).then(|| Value::from(self.alpha_targets.clone())));
        put("time_limit_s", self.time_limit.map(Value::from));
        put("format", self.format.clone().map(Value::from));
        put("workers", self.workers.map(Value::from));
        m
    }

    fn config(&self) -> Result<ExperimentConfig> {
        let mut merged = self.flags();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
                path: path.clone(),
                source: e,
            })?;
            match serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))? {
                Value::Object(file) => merged.extend(file),
                _ => return Err(Error::Config(format!("{}: expected a JSON object", path.display()))),
            }
        }
        ExperimentConfig::from_json(&Value::Object(merged).to_string())
    }
}

fn solve(args: &SolveArgs) -> Result<ExitCode> {
    let config = args.config()?;
    let output = experiment::run(&config)?;
    if let Some(dir) = &config.out_dir {
        for path in experiment::emit(&output, config.format, dir)? {
            eprintln!("wrote {}", path.display());
        }
    }
    println!("{}", serde_json::to_string_pretty(&output.summary)?);
    Ok(if output.timed_out_without_target() {
        ExitCode::from(3)
    } else {
        ExitCode::SUCCESS
    })
}

fn instance(game: &str, out: &std::path::Path) -> Result<ExitCode> {
    let spec: GameSpec = game.parse()?;
    experiment::persist_instance(&spec.build()?, out)?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(args) => solve(args),
        Command::Instance { game, out } => instance(game, out),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        match e {
            Error::Io { .. } => ExitCode::from(1),
            _ => ExitCode::from(2),
        }
    })
}
