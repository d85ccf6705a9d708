//! `nlrigid` command-line driver.
//!
//! Exit codes: 0 on a pass or completed run, 1 on a fail verdict, 2 on usage
//! errors and unmet preconditions.

mod config;

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use nlrigid::curvature::{criticality_report, nondegeneracy_infimum, write_criticality_csv, write_nondeg_csv};
use nlrigid::gridfile::{self, Encoding};
use nlrigid::moving_planes::{decompose, write_sweep_csv, Sweeper};
use nlrigid::rigidity::{direction_fan, extract_balls_with, Verdict};
use nlrigid::{IndicatorGrid, Profile, RadialKernel};

use config::RunConfig;

#[derive(Parser)]
#[command(name = "nlrigid", version, about = "Nonlocal curvature diagnostics and rigidity checks on indicator grids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Grid spacing, overriding the config.
    #[arg(long, global = true)]
    spacing: Option<f64>,
    /// Seed for pair sampling, overriding the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of sweep directions.
    #[arg(long, global = true)]
    dirs: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Profile, distribution function, η, r(0) and integrability; writes kernel.csv.
    KernelInfo,
    /// Rasterizes the configured set; writes set.nlgrid.
    SetBuild,
    /// Local masses on the essential boundary; writes criticality.csv.
    Criticality,
    /// Nondegeneracy infimum over boundary pairs; writes nondeg.csv.
    Nondeg,
    /// Moving-planes sweeps over a fan of directions; writes sweep CSVs.
    Sweep,
    /// Ball extraction and the theorem's radius and distance checks; writes rigidity.json.
    Verify,
}

enum Outcome {
    Done,
    Failed,
    NotApplicable,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Ok(Outcome::NotApplicable) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {}", format!("{e:#}").replace('\n', " "));
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    let path = cli.config.as_ref().context("--config <path> is required")?;
    let mut cfg = RunConfig::load(path)?;
    if cli.spacing.is_some() {
        cfg.spacing = cli.spacing;
    }
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    if cli.dirs.is_some() {
        cfg.dirs = cli.dirs;
    }
    if let Some(h) = cfg.spacing {
        anyhow::ensure!(h > 0.0 && h.is_finite(), "spacing must be positive, got {h}");
    }
    let out = cli.out.clone().or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    let kernel = cfg.kernel()?;
    match cli.command {
        Command::KernelInfo => kernel_info(&kernel, &out),
        Command::SetBuild => {
            let set = cfg.build_set()?;
            let path = out.join("set.nlgrid");
            gridfile::to_file(&set, &path, Encoding::Rle)?;
            println!("{} cells occupied of {}, measure {:.6}", set.occupied_count(), set.len(), set.measure());
            println!("wrote {}", path.display());
            Ok(Outcome::Done)
        }
        Command::Criticality => {
            let set = cfg.build_set()?;
            let rep = criticality_report(&set, &kernel)?;
            write_file(&out.join("criticality.csv"), |w| write_criticality_csv(&rep, w))?;
            println!("boundary points {}", rep.count);
            println!("mean {:.8}", rep.mean);
            println!("max relative deviation {:.6e}", rep.max_deviation);
            Ok(Outcome::Done)
        }
        Command::Nondeg => {
            let set = cfg.build_set()?;
            let rep = nondegeneracy_infimum(&set, &kernel, cfg.nondeg())?;
            write_file(&out.join("nondeg.csv"), |w| write_nondeg_csv(&rep, w))?;
            println!("infimum {:.8e} at distance {:.6}", rep.value, rep.distance);
            println!("pairs {} ({})", rep.pairs_evaluated, if rep.exhaustive { "exhaustive" } else { "sampled" });
            Ok(Outcome::Done)
        }
        Command::Sweep => sweep(&cfg, &kernel, &out),
        Command::Verify => {
            let set = cfg.build_set()?;
            let rep = extract_balls_with(&set, &kernel, &cfg.rigidity())?;
            fs::write(out.join("rigidity.json"), rep.to_json() + "\n")?;
            println!("verdict: {}", rep.verdict.name());
            for (i, b) in rep.balls.iter().enumerate() {
                println!("ball {i}: center {:?} radius {:.6}", b.center, b.radius);
            }
            for r in &rep.reasons {
                eprintln!("{r}");
            }
            Ok(match rep.verdict {
                Verdict::Pass => Outcome::Done,
                Verdict::Fail => Outcome::Failed,
                Verdict::NotApplicable => Outcome::NotApplicable,
            })
        }
    }
}

fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    body(&mut w)?;
    w.flush()?;
    Ok(())
}

fn kernel_info(kernel: &RadialKernel, out: &Path) -> Result<Outcome> {
    println!("kind {} in dimension {}", kernel.kind().name(), kernel.dim());
    let (levels, reach) = match kernel.profile() {
        Profile::Piecewise { levels, radii } => {
            println!("phi:");
            let mut lo = 0.0;
            for (l, r) in levels.iter().zip(radii) {
                println!("  [{lo}, {r}) -> {l}");
                lo = *r;
            }
            let top = levels[0];
            let mut s: Vec<f64> = (0..=64).map(|i| 1.25 * top * i as f64 / 64.0).collect();
            s.extend(levels.iter().copied());
            s.sort_by(f64::total_cmp);
            s.dedup();
            (s, *radii.last().unwrap())
        }
        Profile::Power { alpha } => {
            println!("phi(t) = t^-{alpha}");
            let s: Vec<f64> = (0..=64).map(|i| 10f64.powf(-3.0 + 6.0 * i as f64 / 64.0)).collect();
            (s, f64::INFINITY)
        }
    };
    let mut csv = String::from("s,r_of_s\n");
    println!("r(s):");
    for (i, &s) in levels.iter().enumerate() {
        let r = kernel.distribution(s)?;
        csv.push_str(&format!("{s},{r}\n"));
        if i % 8 == 0 {
            println!("  r({s:.6}) = {r}");
        }
    }
    fs::write(out.join("kernel.csv"), csv)?;
    println!("eta {}", kernel.eta());
    println!("r(0) {reach}");
    let ii = kernel.check_improved_integrability();
    println!("improved integrability {} (tail {})", ii.converges, ii.tail);
    Ok(Outcome::Done)
}

/// `k` directions: evenly spaced on the circle in 2-D, a Fibonacci lattice
/// on the sphere in 3-D, the axis fan otherwise.
fn directions(d: usize, k: usize) -> Vec<Vec<f64>> {
    match d {
        2 => (0..k)
            .map(|i| {
                let th = std::f64::consts::TAU * i as f64 / k as f64;
                vec![th.cos(), th.sin()]
            })
            .collect(),
        3 => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..k)
                .map(|i| {
                    let z = 1.0 - 2.0 * (i as f64 + 0.5) / k as f64;
                    let rho = (1.0 - z * z).sqrt();
                    let th = golden * i as f64;
                    vec![rho * th.cos(), rho * th.sin(), z]
                })
                .collect()
        }
        _ => direction_fan(d).into_iter().cycle().take(k).collect(),
    }
}

fn sweep(cfg: &RunConfig, kernel: &RadialKernel, out: &Path) -> Result<Outcome> {
    let set: IndicatorGrid = cfg.build_set()?;
    let k = cfg.dirs.unwrap_or(set.dim() + 1).max(1);
    let sweeper = Sweeper::new(&set, &cfg.sweep())?;
    println!("direction,T,away,close,symmetric_measure,nonsymmetric_measure,separation_violations");
    for (i, nu) in directions(set.dim(), k).iter().enumerate() {
        let rep = sweeper.stopping_time(nu)?;
        let name = if k == 1 { "sweep.csv".to_string() } else { format!("sweep_{i:03}.csv") };
        write_file(&out.join(name), |w| write_sweep_csv(&rep, w))?;
        let dec = decompose(&set, &rep, kernel)?;
        println!(
            "{:?},{},{},{},{:.6},{:.6},{}",
            rep.direction,
            rep.stopping_time,
            rep.at_stop.away.len(),
            rep.at_stop.close.len(),
            dec.symmetric.measure(),
            dec.nonsymmetric.measure(),
            dec.separation.violations.len()
        );
        if let Some(w) = dec.warning {
            eprintln!("direction {i}: {w}");
        }
    }
    Ok(Outcome::Done)
}
