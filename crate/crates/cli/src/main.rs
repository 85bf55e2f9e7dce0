use anyhow::{anyhow, bail, Context as _, Result};
use clap::{Parser, Subcommand};
use lcrit::acceptance::{run_all, Context};
use lcrit::auxseries::{SchemeParams, Theorem, WeightScheme};
use lcrit::characters::{character, characters};
use lcrit::config::Config;
use lcrit::critzeros::{find_critical_points, write_csv, SearchRect};
use lcrit::diophantine::{find_tau, targets_from_scheme, SearchOptions, Strategy};
use lcrit::primesums::PrimeTable;
use lcrit::scanner::{check_chain, scan, sigma_grid, theorem_bounds, write_scan_csv, ChainOptions};
use serde_json::json;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "lcrit", about = "Extreme values of Dirichlet L-functions near critical points of zeta")]
struct Cli {
    /// key = value config file (default: $LCRIT_CONFIG, else built-in defaults)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// List the Dirichlet characters mod Q
    Chars {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// The four extreme-value constants for modulus Q
    Bounds {
        #[arg(long)]
        q: u64,
    },
    /// Zeros of zeta' in a rectangle
    Zeros {
        /// sigma1,sigma2,t1,t2
        #[arg(long)]
        rect: String,
        #[arg(long, default_value_t = 0.05)]
        res: f64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// |L| and the normalized statistics along a vertical grid
    Scan {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        chi: u64,
        /// t1:t2:N, log-spaced
        #[arg(long)]
        grid: String,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Shift tau matching the scheme weights at every prime <= x
    Tau {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        chi: u64,
        #[arg(long)]
        x: f64,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value_t = 0.02)]
        tol: f64,
        /// T1,T2 (T2 may be inf)
        #[arg(long, default_value = "0,inf")]
        interval: String,
        /// thm2 (large values) or thm4 (small values) targets
        #[arg(long, default_value = "thm2")]
        theorem: String,
        #[arg(long, default_value = "auto")]
        strategy: String,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Toy pipeline for large |L| at a constructed shift
    Thm2(ChainArgs),
    /// Toy pipeline for small |L| at a constructed shift
    Thm4(ChainArgs),
    /// Run the acceptance suite; exit status 1 if any criterion fails
    Verify,
}

#[derive(clap::Args)]
struct ChainArgs {
    #[arg(long)]
    q: u64,
    #[arg(long)]
    chi: u64,
    #[arg(long, default_value_t = 200.0)]
    x: f64,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, default_value_t = 0.02)]
    tol: f64,
    #[arg(long)]
    json: Option<PathBuf>,
}

fn parse_list(s: &str, sep: char, n: usize) -> Result<Vec<f64>> {
    let v: Vec<f64> = s
        .split(sep)
        .map(|p| match p.trim() {
            "inf" => Ok(f64::INFINITY),
            t => t.parse::<f64>().map_err(|e| anyhow!("{t:?}: {e}")),
        })
        .collect::<Result<_>>()?;
    if v.len() != n {
        bail!("expected {n} values separated by '{sep}', got {s:?}");
    }
    Ok(v)
}

fn parse_theorem(s: &str) -> Result<Theorem> {
    match s {
        "thm2" | "2" => Ok(Theorem::Thm2),
        "thm4" | "4" => Ok(Theorem::Thm4),
        _ => bail!("theorem must be thm2 or thm4"),
    }
}

fn write_json(path: Option<&Path>, v: &serde_json::Value) -> Result<()> {
    let text = serde_json::to_string_pretty(v)?;
    match path {
        Some(p) => std::fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display()))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn table_for(config: &Config, need: u64) -> Result<PrimeTable> {
    Ok(PrimeTable::new(config.sieve_limit.max(need))?)
}

fn main() -> Result<()> {
    env_logger::init();
    let cli = Cli::parse();
    let config = Config::resolve(cli.config.as_deref())?;
    match cli.cmd {
        Cmd::Chars { q, json } => {
            let all = characters(q)?;
            println!("label conductor primitive parity order");
            for c in &all {
                println!(
                    "{:>5} {:>9} {:>9} {:>6} {:>5}",
                    c.label(),
                    c.conductor(),
                    c.is_primitive(),
                    c.parity().sign(),
                    c.order()
                );
            }
            if let Some(p) = json {
                let v: Vec<_> = all.iter().map(|c| c.export()).collect();
                write_json(Some(&p), &serde_json::to_value(v)?)?;
            }
        }
        Cmd::Bounds { q } => {
            write_json(None, &serde_json::to_value(theorem_bounds(q)?)?)?;
        }
        Cmd::Zeros { rect, res, csv } => {
            let r = parse_list(&rect, ',', 4)?;
            let rect = SearchRect::new(r[0], r[1], r[2], r[3], res)?;
            let found = find_critical_points(&rect, &config.eval())?;
            println!(
                "winding count {}, refined {}{}",
                found.count,
                found.points.len(),
                if found.incomplete { " (incomplete)" } else { "" }
            );
            for p in &found.points {
                println!("{:.12} {:+.12}i  |zeta'| = {:.1e}", p.beta_prime, p.gamma_prime, p.residual);
            }
            if let Some(path) = csv {
                write_csv(&found.points, BufWriter::new(File::create(&path)?))?;
            }
        }
        Cmd::Scan {
            q,
            chi,
            grid,
            sigma,
            csv,
            json,
        } => {
            let g: Vec<&str> = grid.split(':').collect();
            if g.len() != 3 {
                bail!("grid must be t1:t2:N");
            }
            let (t1, t2, n): (f64, f64, usize) = (g[0].parse()?, g[1].parse()?, g[2].parse()?);
            let chr = character(q, chi)?;
            let report = scan(&sigma_grid(sigma, t1, t2, n), &chr, &config)?;
            println!(
                "{} points; max |L|/loglog t = {:.4} (bound {:.4}); min |L| loglog t = {:.4} (bound {:.4}); {} errors",
                report.records.len(),
                report.running_max_norm_large.last().copied().unwrap_or(f64::NAN),
                report.bounds.thm1,
                report.running_min_norm_small.last().copied().unwrap_or(f64::NAN),
                report.bounds.thm3,
                report.errors.len()
            );
            if let Some(path) = csv {
                write_scan_csv(&report, BufWriter::new(File::create(&path)?))?;
            }
            if let Some(path) = json {
                write_json(Some(&path), &serde_json::to_value(&report)?)?;
            }
        }
        Cmd::Tau {
            q,
            chi,
            x,
            delta,
            tol,
            interval,
            theorem,
            strategy,
            json,
        } => {
            let th = parse_theorem(&theorem)?;
            let iv = parse_list(&interval, ',', 2)?;
            let chr = character(q, chi)?;
            let tbl = table_for(&config, x as u64 + 1)?;
            let params = SchemeParams::derived(x, delta.unwrap_or(config.delta), chr, th, &config.eval())?;
            let scheme = WeightScheme::new(th.rouche_kind(), params);
            let targets = targets_from_scheme(&scheme, &tbl).with_tolerance(tol)?;
            let opts = SearchOptions {
                strategy: strategy.parse::<Strategy>().map_err(|e| anyhow!(e))?,
                seed: config.seed,
                max_height_bits: config.tau_max_height_bits,
                ..Default::default()
            };
            let cert = find_tau(&targets, iv[0], iv[1], &opts)?;
            eprintln!(
                "{} primes, max defect {:.5} (tolerance {}), log10 tau {:.3}, success {}",
                targets.len(),
                cert.max_defect,
                tol,
                cert.log10_tau,
                cert.success
            );
            write_json(
                json.as_deref(),
                &json!({ "certificate": cert, "scheme": scheme.export(None), "config": config }),
            )?;
        }
        Cmd::Thm2(a) => chain(Theorem::Thm2, a, &config)?,
        Cmd::Thm4(a) => chain(Theorem::Thm4, a, &config)?,
        Cmd::Verify => {
            let ctx = Context::new(config);
            let results = run_all(&ctx);
            for r in &results {
                println!("{}", r.line());
            }
            if results.iter().any(|r| !r.passed) {
                std::process::exit(1);
            }
        }
    }
    Ok(())
}

fn chain(th: Theorem, a: ChainArgs, config: &Config) -> Result<()> {
    let chr = character(a.q, a.chi)?;
    let tbl = table_for(config, 0)?;
    let opts = ChainOptions {
        tolerance: a.tol,
        ..Default::default()
    };
    let r = check_chain(th, &chr, a.x, a.delta.unwrap_or(config.delta), &tbl, config, &opts)?;
    eprintln!(
        "|L(1+i tau)| = {:.5}, target {:.5}, ratio {:.3}, passes {}",
        r.abs_l, r.target, r.ratio, r.passes
    );
    write_json(a.json.as_deref(), &serde_json::to_value(&r)?)
}
