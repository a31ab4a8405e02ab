use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use twistlab_cli::output::write_files;
use twistlab_cli::{run, CliError, Command, ExperimentConfig};

/// Square-tiled surfaces, SU(2) representations and Dehn-twist dynamics.
#[derive(Parser)]
#[command(name = "twistlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Combinatorics of a surface: genus, vertices, cylinders, multitwists.
    Info(Common),
    /// Sample representations and record probes.
    Sample(Common),
    /// Follow random twist words and record probes after every step.
    Orbit(Common),
    /// Certify the invariant of sprime, l22 or n4.
    Certify(Common),
    /// Leaf alternation (example1) or bracket rank (example2).
    Foliation(Common),
}

#[derive(Args)]
struct Common {
    /// Config file of `key = value` lines; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Registry name: fig1, sprime, l22, n4, torus.
    #[arg(long)]
    surface: Option<String>,
    /// Right-neighbour permutation in cycle notation.
    #[arg(long)]
    sigma: Option<String>,
    /// Top-neighbour permutation in cycle notation.
    #[arg(long = "sigma-prime")]
    sigma_prime: Option<String>,
    /// descent, propagate or n4.
    #[arg(long)]
    sampler: Option<String>,
    /// Master seed.
    #[arg(long)]
    seed: Option<String>,
    /// Number of independent orbits (orbit, certify).
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    samples: Option<String>,
    #[arg(long)]
    steps: Option<String>,
    #[arg(long = "orbit-steps")]
    orbit_steps: Option<String>,
    /// Residual tolerance.
    #[arg(long)]
    tol: Option<String>,
    #[arg(long = "min-success")]
    min_success: Option<String>,
    /// Trace probes, e.g. 'tr(a1);tr(a1 b2^-1)'.
    #[arg(long)]
    probes: Option<String>,
    /// Twist word for every orbit, e.g. 'V1 H2^-1'.
    #[arg(long)]
    word: Option<String>,
    /// example1, example2 or example2-projective.
    #[arg(long)]
    system: Option<String>,
    #[arg(long)]
    points: Option<String>,
    #[arg(long)]
    alternations: Option<String>,
    /// Leaf flow times are uniform in (-T, T).
    #[arg(long = "leaf-time")]
    leaf_time: Option<String>,
    /// Directory for <command>.jsonl and <command>.csv; without it records go
    /// to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Add wall-clock time to the closing run record.
    #[arg(long)]
    timing: bool,
    /// info: print the JSON record instead of the text report.
    #[arg(long)]
    json: bool,
}

impl Common {
    fn config(&self) -> Result<ExperimentConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
                ExperimentConfig::from_text(&text)?
            }
            None => ExperimentConfig::default(),
        };
        let flags = [
            ("surface", &self.surface),
            ("sigma", &self.sigma),
            ("sigma-prime", &self.sigma_prime),
            ("sampler", &self.sampler),
            ("seed", &self.seed),
            ("seeds", &self.seeds),
            ("samples", &self.samples),
            ("steps", &self.steps),
            ("orbit-steps", &self.orbit_steps),
            ("tol", &self.tol),
            ("min-success", &self.min_success),
            ("probes", &self.probes),
            ("word", &self.word),
            ("system", &self.system),
            ("points", &self.points),
            ("alternations", &self.alternations),
            ("leaf-time", &self.leaf_time),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v).map_err(|e| CliError::Parse(format!("--{key}: {e}")))?;
            }
        }
        if cfg.surface.is_some() && (self.sigma.is_some() || self.sigma_prime.is_some()) {
            return Err(CliError::Parse("give either --surface or --sigma/--sigma-prime".into()));
        }
        // permutations on the command line replace a surface from the file
        if self.sigma.is_some() && self.surface.is_none() {
            cfg.surface = None;
        }
        if let Some(out) = &self.out {
            cfg.out = Some(out.clone());
        }
        cfg.timing |= self.timing;
        cfg.json |= self.json;
        Ok(cfg)
    }
}

fn execute(command: Command, common: &Common) -> Result<(), CliError> {
    let cfg = common.config()?;
    let result = run(command, &cfg)?;
    match &cfg.out {
        Some(dir) => write_files(dir, command.name(), &result.records, &result.summary)?,
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            match (&result.text, cfg.json) {
                (Some(text), false) => lock.write_all(text.as_bytes())?,
                _ => twistlab_cli::output::write_jsonl(&result.records, &mut lock)?,
            }
        }
    }
    match result.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common) = match &cli.command {
        Sub::Info(c) => (Command::Info, c),
        Sub::Sample(c) => (Command::Sample, c),
        Sub::Orbit(c) => (Command::Orbit, c),
        Sub::Certify(c) => (Command::Certify, c),
        Sub::Foliation(c) => (Command::Foliation, c),
    };
    match execute(command, common) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("twistlab {}: {e}", command.name());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
