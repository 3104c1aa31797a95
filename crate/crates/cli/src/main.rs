use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use relmon_cli::cache::Cache;
use relmon_cli::config::{fixture_config, load_config, Resolved};
use relmon_cli::pipeline::{self, RunOptions};
use relmon_cli::plot;
use relmon_cli::report::{self, ClassifyBody, MonodromyBody, Report};
use relmon_cli::CACHE_ENV;

#[derive(Parser)]
#[command(name = "relmon", version, about = "Relative monodromy of elliptic logarithms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Table of periods and τ at the configured sample points.
    Periods(Common),
    /// Monodromy presentation of the configured loops.
    Monodromy(Common),
    /// Monodromy, kernel search and classification.
    Classify(Common),
    /// SVG figures from the results already in the output directory.
    Plot(Common),
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long, value_name = "PATH", conflicts_with = "fixture")]
    config: Option<PathBuf>,
    /// Named fixture: ISO-EXAMPLE, NONISO-EXAMPLE or REMARK-FIXTURE.
    #[arg(long, value_name = "NAME")]
    fixture: Option<String>,
    /// Word length bound for the kernel search.
    #[arg(long, value_name = "N")]
    depth: Option<usize>,
    /// Odd prime for the mod-p density check.
    #[arg(long, value_name = "P")]
    prime: Option<u64>,
    /// Cache directory for loop extractions (MONODROMY_CACHE overrides).
    #[arg(long, value_name = "DIR")]
    cache: Option<PathBuf>,
    /// Output directory (default: the config's, else `relmon-out`).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Record failures as error rows instead of stopping.
    #[arg(long)]
    keep_going: bool,
}

fn resolve(c: &Common) -> Result<Resolved> {
    let mut cfg = match (&c.config, &c.fixture) {
        (Some(p), None) => load_config(p)?,
        (None, Some(n)) => fixture_config(n)?,
        _ => bail!("give one of --config PATH or --fixture NAME"),
    };
    if let Some(d) = c.depth {
        cfg.search.max_depth = d;
    }
    if let Some(p) = c.prime {
        cfg.search.density_prime = p;
    }
    cfg.resolve()
}

fn cache_dir(c: &Common) -> Option<PathBuf> {
    match std::env::var_os(CACHE_ENV) {
        Some(v) if !v.is_empty() => Some(PathBuf::from(v)),
        _ => c.cache.clone(),
    }
}

fn out_dir(c: &Common, run: &Resolved) -> Result<PathBuf> {
    let dir = c
        .out
        .clone()
        .or_else(|| run.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("relmon-out"));
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir)
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Writes the command's JSON and text reports, honouring config overrides.
fn emit(dir: &Path, run: &Resolved, command: &str, json: &str, text: &str) -> Result<()> {
    let j = run.output.json.clone().unwrap_or_else(|| format!("{command}.json").into());
    let t = run.output.text.clone().unwrap_or_else(|| format!("{command}.txt").into());
    write(&dir.join(j), json)?;
    write(&dir.join(t), text)?;
    print!("{text}");
    Ok(())
}

fn report_cache(cache: &Cache) {
    if cache.dir().is_some() {
        let (hits, misses) = cache.stats();
        eprintln!("cache: {hits} hits, {misses} misses");
    }
}

fn run(cli: Cli) -> Result<()> {
    let (name, c) = match &cli.command {
        Command::Periods(c) => ("periods", c),
        Command::Monodromy(c) => ("monodromy", c),
        Command::Classify(c) => ("classify", c),
        Command::Plot(c) => ("plot", c),
    };
    let run = resolve(c)?;
    let dir = out_dir(c, &run)?;
    let opts = RunOptions {
        keep_going: c.keep_going,
    };
    match name {
        "periods" => {
            let (body, failed) = pipeline::periods(&run)?;
            let text = report::periods_text(&run.name, &body);
            emit(&dir, &run, name, &Report::new(name, &run.name, body).to_json(), &text)?;
            if failed > 0 && !opts.keep_going {
                bail!("{failed} sample points failed; --keep-going accepts error rows");
            }
        }
        "monodromy" => {
            let cache = Cache::new(cache_dir(c))?;
            let body = pipeline::monodromy(&run, &cache, opts)?;
            report_cache(&cache);
            let text = report::monodromy_text(&run.name, &body);
            emit(&dir, &run, name, &Report::new(name, &run.name, body).to_json(), &text)?;
        }
        "classify" => {
            let cache = Cache::new(cache_dir(c))?;
            let (mono, body) = pipeline::classify_run(&run, &cache, opts)?;
            report_cache(&cache);
            write(&dir.join("monodromy.json"), &Report::new("monodromy", &run.name, mono).to_json())?;
            let text = report::classify_text(&run.name, &body);
            emit(&dir, &run, "classification", &Report::new(name, &run.name, body).to_json(), &text)?;
        }
        _ => {
            let mono_path = dir.join("monodromy.json");
            let Ok(text) = std::fs::read_to_string(&mono_path) else {
                bail!(
                    "missing results: {} not found; run `relmon monodromy` or `relmon classify` first",
                    mono_path.display()
                );
            };
            let mono: Report<MonodromyBody> = report::parse_report(&text, "monodromy")?;
            let svg = run.output.svg.clone().unwrap_or_else(|| "lambda-plane.svg".into());
            let path = dir.join(svg);
            write(&path, &plot::lambda_plane_svg(&format!("λ-plane: {}", run.name), &mono.body))?;
            println!("wrote {}", path.display());
            if let Ok(text) = std::fs::read_to_string(dir.join("classification.json")) {
                let cls: Report<ClassifyBody> = report::parse_report(&text, "classify")?;
                let path = dir.join("translations.svg");
                write(&path, &plot::translations_svg(&format!("kernel translations: {}", run.name), &cls.body))?;
                println!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
