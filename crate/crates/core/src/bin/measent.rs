use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use measent::runner::{
    collect_config_paths, load_config, preset, run, sweep, ExperimentConfig, RunError, RunReport, PRESET_NAMES,
};

/// Measurement-induced entanglement experiments.
#[derive(Debug, Parser)]
#[command(name = "measent", version)]
struct Cli {
    /// Seed for randomly drawn couplings (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Tolerance on dominant eigenvalue moduli (overrides the config).
    #[arg(long = "mod-tol", global = true)]
    mod_tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one JSON config.
    Run {
        config: PathBuf,
        /// Output prefix (overrides the config).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every config in a directory, a list file, or several paths.
    Sweep {
        #[arg(required = true)]
        targets: Vec<PathBuf>,
    },
    /// Run a built-in preset.
    Preset {
        name: String,
        /// Output prefix; defaults to the preset name.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the preset config as JSON instead of running it.
        #[arg(long)]
        print: bool,
    },
    /// List built-in presets.
    Presets,
}

fn apply_overrides(cfg: &mut ExperimentConfig, cli: &Cli) {
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    if cli.mod_tol.is_some() {
        cfg.mod_tol = cli.mod_tol;
    }
}

fn summary(r: &RunReport) {
    let mut line = format!("{}: {} steps", r.name, r.trajectory.steps.len());
    if let Some(last) = r.trajectory.last() {
        line.push_str(&format!(", final survival {:?}", last.survival));
    }
    if let Some(p) = &r.prediction {
        line.push_str(&format!(", {} (probability {:?})", p.classification.as_str(), p.probability));
    }
    if let Some(path) = &r.trajectory_path {
        line.push_str(&format!(", wrote {}", path.display()));
    }
    println!("{line}");
    for note in &r.erratum_notes {
        println!("  note: {note}");
    }
}

fn fail(e: &RunError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn run_one(mut cfg: ExperimentConfig, cli: &Cli) -> ExitCode {
    apply_overrides(&mut cfg, cli);
    match run(&cfg) {
        Ok(r) => {
            summary(&r);
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Run { config, out } => {
            let mut cfg = match load_config(config) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            if out.is_some() {
                cfg.output = out.clone();
            }
            run_one(cfg, &cli)
        }
        Command::Preset { name, out, print } => {
            let Some(mut cfg) = preset(name) else {
                return fail(&RunError::Config(format!(
                    "unknown preset {name:?}; available: {}",
                    PRESET_NAMES.join(", ")
                )));
            };
            cfg.output = Some(out.clone().unwrap_or_else(|| PathBuf::from(name)));
            if *print {
                apply_overrides(&mut cfg, &cli);
                println!("{}", cfg.to_json());
                return ExitCode::SUCCESS;
            }
            run_one(cfg, &cli)
        }
        Command::Presets => {
            for name in PRESET_NAMES {
                println!("{name}");
            }
            ExitCode::SUCCESS
        }
        Command::Sweep { targets } => {
            let mut paths = Vec::new();
            for t in targets {
                match collect_config_paths(t) {
                    Ok(p) => paths.extend(p),
                    Err(e) => return fail(&e),
                }
            }
            let mut configs = Vec::new();
            let mut worst = 0u8;
            let mut loaded: Vec<&Path> = Vec::new();
            for p in &paths {
                match load_config(p) {
                    Ok(mut c) => {
                        apply_overrides(&mut c, &cli);
                        configs.push(c);
                        loaded.push(p);
                    }
                    Err(e) => {
                        eprintln!("error: {e}");
                        worst = worst.max(e.exit_code() as u8);
                    }
                }
            }
            let results = match sweep(&configs) {
                Ok(r) => r,
                Err(e) => return fail(&e),
            };
            let mut chain_rows = Vec::new();
            for (path, res) in loaded.iter().zip(&results) {
                match res {
                    Ok(r) => {
                        summary(r);
                        if let Some(c) = &r.chain {
                            chain_rows.push((r.name.clone(), c.clone()));
                        }
                    }
                    Err(e) => {
                        eprintln!("error: {}: {e}", path.display());
                        worst = worst.max(e.exit_code() as u8);
                    }
                }
            }
            if !chain_rows.is_empty() {
                println!("name,N,a_re,a_im,b_re,b_im,dominant");
                for (name, c) in chain_rows {
                    println!(
                        "{name},{},{:?},{:?},{:?},{:?},{}",
                        c.n, c.a.re, c.a.im, c.b.re, c.b.im, c.dominant_label
                    );
                }
            }
            ExitCode::from(worst)
        }
    }
}
