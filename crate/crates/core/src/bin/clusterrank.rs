use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use clusterrank::attacks::{AttackKind, AttackSpec, Direction};
use clusterrank::experiment::{self, ExperimentConfig, Method, Mode, StatsFormat, EXIT_CONFIG};
use clusterrank::similarity::Measure;

/// Reputation-based ranking on clustered rating networks.
///
/// Log verbosity is read from CLUSTERRANK_LOG (e.g. `info`, `debug`).
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rank a dataset and write rankings/reputations CSVs.
    Rank(Common),
    /// Compare clean and attacked runs over attacker fractions.
    AttackEval {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_kind)]
        attack: Option<AttackKind>,
        /// Single attacker fraction (ignored when --sweep is given).
        #[arg(long)]
        fraction: Option<f64>,
        /// Comma-separated attacker fractions.
        #[arg(long, value_delimiter = ',')]
        sweep: Option<Vec<f64>>,
        #[arg(long, value_enum)]
        direction: Option<DirectionArg>,
        #[arg(long)]
        filler_count: Option<usize>,
        /// Comma-separated methods among AA, BWA, LD, KD, CD.
        #[arg(long, value_delimiter = ',', value_parser = parse_method)]
        methods: Option<Vec<Method>>,
        #[arg(long)]
        seed: Option<u64>,
        /// Also write timings.csv.
        #[arg(long)]
        timings: bool,
        /// Also write the attacked datasets.
        #[arg(long)]
        export_attacked: bool,
    },
    /// Print dataset counts.
    Stats {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct Common {
    /// TOML configuration file; flags override its values.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Ratings file (`user,item,rating,timestamp`).
    #[arg(short, long)]
    dataset: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    theta: Option<u32>,
    #[arg(long, value_parser = parse_measure)]
    measure: Option<Measure>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    /// Apply a k-core filter after loading.
    #[arg(long)]
    k_core: Option<usize>,
    #[arg(long)]
    r_min: Option<u32>,
    #[arg(long)]
    r_max: Option<u32>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Bipartite,
    Multipartite,
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Push,
    Nuke,
}

fn parse_kind(s: &str) -> Result<AttackKind, String> {
    s.parse().map_err(|e: clusterrank::Error| e.to_string())
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: clusterrank::Error| e.to_string())
}

fn parse_measure(s: &str) -> Result<Measure, String> {
    s.parse().map_err(|e: clusterrank::Error| e.to_string())
}

fn build_config(c: &Common) -> clusterrank::Result<ExperimentConfig> {
    let mut cfg = match &c.config {
        Some(path) => ExperimentConfig::from_toml_file(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(d) = &c.dataset {
        cfg.dataset = d.clone();
    }
    if let Some(o) = &c.output {
        cfg.output = Some(o.clone());
    }
    if let Some(m) = c.mode {
        cfg.mode = match m {
            ModeArg::Bipartite => Mode::Bipartite,
            ModeArg::Multipartite => Mode::Multipartite,
        };
    }
    if let Some(v) = c.lambda {
        cfg.ranker.lambda = v;
    }
    if let Some(v) = c.alpha {
        cfg.alpha = v;
    }
    if let Some(v) = c.theta {
        cfg.similarity.theta = v;
    }
    if let Some(v) = c.measure {
        cfg.similarity.measure = v;
    }
    if let Some(v) = c.epsilon {
        cfg.ranker.epsilon = v;
    }
    if let Some(v) = c.max_iters {
        cfg.ranker.max_iters = v;
    }
    if c.k_core.is_some() {
        cfg.k_core = c.k_core;
    }
    if c.r_min.is_some() || c.r_max.is_some() {
        cfg.scale = clusterrank::dataset::RatingScale::new(
            c.r_min.unwrap_or(cfg.scale.r_min()),
            c.r_max.unwrap_or(cfg.scale.r_max()),
        )?;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CLUSTERRANK_LOG", "warn")).init();
    let cli = Cli::parse();
    let common = match &cli.command {
        Command::Rank(c) => c,
        Command::AttackEval { common, .. } | Command::Stats { common, .. } => common,
    };
    let mut cfg = match build_config(common) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    let code = match cli.command {
        Command::Rank(_) => experiment::cmd_rank(&cfg),
        Command::AttackEval {
            attack,
            fraction,
            sweep,
            direction,
            filler_count,
            methods,
            seed,
            timings,
            export_attacked,
            ..
        } => {
            if attack.is_some() || fraction.is_some() || direction.is_some() || filler_count.is_some() {
                let mut spec = cfg.attack.unwrap_or_default();
                if let Some(k) = attack {
                    spec.kind = k;
                }
                if let Some(f) = fraction {
                    spec.fraction = f;
                }
                if let Some(d) = direction {
                    spec.direction = match d {
                        DirectionArg::Push => Direction::Push,
                        DirectionArg::Nuke => Direction::Nuke,
                    };
                }
                if let Some(n) = filler_count {
                    spec.filler_count = n;
                }
                cfg.attack = Some(AttackSpec { ..spec });
            }
            if sweep.is_some() {
                cfg.sweep = sweep;
            }
            if let Some(m) = methods {
                cfg.methods = m;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            cfg.timings |= timings;
            cfg.export_attacked |= export_attacked;
            experiment::cmd_attack_eval(&cfg)
        }
        Command::Stats { json, .. } => {
            let format = if json { StatsFormat::Json } else { StatsFormat::Csv };
            experiment::cmd_stats(&cfg, format)
        }
    };
    ExitCode::from(code as u8)
}
