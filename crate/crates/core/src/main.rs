use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use anisoflow::anisotropy::{energy_of_wulff, mixed_constant, wulff_area};
use anisoflow::harness::{self, presets, record, verify, FlowConfig};
use anisoflow::par::Execution;
use anisoflow::{AnisotropySpec, Error};

#[derive(Parser)]
#[command(
    name = "anisoflow",
    version,
    about = "Anisoperimetric-ratio flow of polygonal curves"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one or more config files (concurrently).
    Run {
        #[arg(required = true)]
        configs: Vec<PathBuf>,
        /// Write each run into DIR/<name> instead of the config's output.dir.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a built-in preset.
    Preset {
        /// One of the built-in names, or `list`.
        name: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// `dotted.key=value`, repeatable.
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Print the preset config instead of running it.
        #[arg(long)]
        show: bool,
    },
    /// Re-check the invariants of a recorded series.
    Verify { record: PathBuf },
    /// Print |W_sigma|, L_sigma(∂W_mu) and K_{sigma,mu}.
    Constants {
        /// Compact form, e.g. `cosine:eps=0.2,m=2`.
        #[arg(long, default_value = "constant")]
        sigma: String,
        #[arg(long, default_value = "constant")]
        mu: String,
    },
}

fn print_outcome(outcome: &harness::RunOutcome, dir: &std::path::Path) {
    let rec = &outcome.record;
    match &rec.failure {
        None => println!(
            "{}: {} steps to t = {}, ratio {:.12} -> {:.12}, output in {}",
            outcome.config.name,
            rec.steps,
            rec.final_time(),
            rec.rows.first().map_or(f64::NAN, |r| r.ratio),
            rec.rows.last().map_or(f64::NAN, |r| r.ratio),
            dir.display()
        ),
        Some(e) => println!("{}: stopped early: {e}", outcome.config.name),
    }
    if let Some(c) = &outcome.crossing {
        match c.first {
            Some(t) => println!("  crossing of the reference at t = {t}"),
            None => println!("  no crossing of the reference"),
        }
    }
}

fn execute(cli: Cli) -> Result<bool, Error> {
    match cli.command {
        Command::Run { configs, out } => {
            let loaded = configs
                .iter()
                .map(|p| FlowConfig::load(p))
                .collect::<Result<Vec<_>, _>>()?;
            let dirs: Vec<PathBuf> = loaded
                .iter()
                .map(|c| match (&out, &c.output.dir) {
                    (Some(o), _) => o.join(&c.name),
                    (None, Some(d)) => d.clone(),
                    (None, None) => PathBuf::from("out").join(&c.name),
                })
                .collect();
            let jobs: Vec<(FlowConfig, PathBuf)> = loaded.into_iter().zip(dirs).collect();
            let results = anisoflow::par::map_slice(Execution::default(), &jobs, |(c, d)| {
                harness::run(c, Some(d)).map(|o| (o, d.clone()))
            });
            let mut ok = true;
            for r in results {
                let (outcome, dir) = r?;
                ok &= outcome.record.completed();
                print_outcome(&outcome, &dir);
            }
            Ok(ok)
        }
        Command::Preset {
            name,
            out,
            overrides,
            show,
        } => {
            if name == "list" {
                for n in presets::names() {
                    println!("{n}");
                }
                return Ok(true);
            }
            let cfg = presets::preset(&name)?.with_overrides(&overrides)?;
            if show {
                print!(
                    "{}",
                    toml::to_string(&cfg).map_err(|e| Error::Parse(e.to_string()))?
                );
                return Ok(true);
            }
            let dir = out.join(&cfg.name);
            let outcome = harness::run(&cfg, Some(&dir))?;
            print_outcome(&outcome, &dir);
            Ok(outcome.record.completed())
        }
        Command::Verify { record: path } => {
            let file = std::fs::File::open(&path).map_err(|e| Error::Io {
                path: path.clone(),
                source: e,
            })?;
            let rows = record::read_rows(file)?;
            let problems = verify::check_rows(&rows);
            if problems.is_empty() {
                println!("{}: {} rows ok", path.display(), rows.len());
                Ok(true)
            } else {
                for p in &problems {
                    println!("{}: {p}", path.display());
                }
                Ok(false)
            }
        }
        Command::Constants { sigma, mu } => {
            let s = AnisotropySpec::parse_compact(&sigma)?.build()?;
            let m = AnisotropySpec::parse_compact(&mu)?.build()?;
            println!("wulff_area_sigma = {:.16e}", wulff_area(&s)?);
            println!("wulff_area_mu = {:.16e}", wulff_area(&m)?);
            println!(
                "energy_sigma_of_wulff_mu = {:.16e}",
                energy_of_wulff(&s, &m)?
            );
            println!("mixed_constant = {:.16e}", mixed_constant(&s, &m)?);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
