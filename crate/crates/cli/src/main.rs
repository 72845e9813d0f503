use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use closed_char_cli::config::RunConfig;
use closed_char_cli::{indices, orbits, output, resonance, CliError};

/// Closed characteristics on convex hypersurfaces: orbits, indices, resonance.
#[derive(Debug, Parser)]
#[command(name = "closed-char", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Body specification; replaces the config's `body`.
    #[arg(long)]
    body: Option<PathBuf>,
    /// Output directory (default `out`).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    m_max: Option<usize>,
    /// Fourier modes for the dual action.
    #[arg(long)]
    modes: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Find closed characteristics and write `orbits.json`.
    Orbits {
        #[command(flatten)]
        common: Common,
    },
    /// Linearize orbits and write `indices.json`.
    Indices {
        #[command(flatten)]
        common: Common,
        /// Orbit file (default `<out>/orbits.json`).
        #[arg(long)]
        orbits: Option<PathBuf>,
    },
    /// Resonance identity, Morse counts and audits from `indices.json`.
    Resonance {
        #[command(flatten)]
        common: Common,
        /// Index file (default `<out>/indices.json`).
        #[arg(long)]
        indices: Option<PathBuf>,
        /// Critical type numbers for degenerate orbits, `{"<id>": [[k_0, ...], ...]}`.
        #[arg(long)]
        klist: Option<PathBuf>,
    },
    /// All three stages in sequence.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        klist: Option<PathBuf>,
    },
}

fn configure(c: &Common) -> Result<RunConfig, CliError> {
    let mut cfg = match &c.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(p) = &c.body {
        cfg.body = Some(output::read_json(p)?);
    }
    if let Some(o) = &c.out {
        cfg.out = Some(o.clone());
    }
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(m) = c.m_max {
        cfg.m_max = m;
    }
    if let Some(m) = c.modes {
        cfg.modes = m;
    }
    cfg.validate()?;
    if let Some(w) = c.workers {
        // a second initialization only fails when a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w).build_global();
    }
    Ok(cfg)
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Orbits { common } => orbits::cmd(&configure(&common)?),
        Command::Indices { common, orbits: path } => {
            let cfg = configure(&common)?;
            let path = path.unwrap_or_else(|| cfg.out_dir().join("orbits.json"));
            indices::cmd(&cfg, &path)
        }
        Command::Resonance { common, indices: path, klist } => {
            let cfg = configure(&common)?;
            let path = path.unwrap_or_else(|| cfg.out_dir().join("indices.json"));
            resonance::cmd(&cfg, &path, klist.as_deref())
        }
        Command::Run { common, klist } => {
            let cfg = configure(&common)?;
            let out = cfg.out_dir();
            orbits::cmd(&cfg)?;
            indices::cmd(&cfg, &out.join("orbits.json"))?;
            resonance::cmd(&cfg, &out.join("indices.json"), klist.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("closed-char: {e}");
            ExitCode::from(e.code())
        }
    }
}
