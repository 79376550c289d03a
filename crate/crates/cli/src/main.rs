use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use epstein_lab::enumeration::VectorLengthList;
use epstein_lab::epstein::{Cutoff, EpsteinEvaluator, ZetaEvaluation, DEFAULT_TOL};
use epstein_lab::harness::report::fmt17;
use epstein_lab::harness::{default_config, run_experiment, ExperimentConfig, EXPERIMENTS};
use epstein_lab::lattice::{default_walk_steps, format_lattice, read_lattice, sample_lattice, Lattice, DEFAULT_PRIME};
use epstein_lab::poisson::{h_sample_joint, simulate_points, DEFAULT_HORIZON};
use epstein_lab::rng::{trial_rng, StreamTag};
use epstein_lab::stable::{self, affine, params_for_h, params_for_h_hat, params_for_z0, StableParams};

const SEED_ENV: &str = "EPSTEIN_LAB_SEED";

#[derive(Parser)]
#[command(name = "epstein-lab", version, about = "Epstein zeta functions of random lattices and their Poisson and stable limits")]
struct Cli {
    /// Master seed; the EPSTEIN_LAB_SEED environment variable takes precedence.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file (standard output if omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a covolume-one lattice from Hecke points (text lattice file).
    SampleLattice {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = DEFAULT_PRIME)]
        prime: u64,
        /// Hecke walk length; 0 picks the default for the dimension.
        #[arg(long, default_value_t = 1)]
        steps: u32,
        #[arg(long, default_value_t = 0)]
        trial: u64,
    },
    /// Normalized volumes of all lattice vectors up to a volume bound.
    Enumerate {
        #[arg(long)]
        lattice: PathBuf,
        #[arg(long)]
        vmax: f64,
    },
    /// E_n(L, s) at the given points, or V_n^{-2c} E_n(L, cn) with --normalized.
    Epstein {
        #[arg(long)]
        lattice: PathBuf,
        /// Comma-separated evaluation points.
        #[arg(long, value_delimiter = ',', required = true)]
        s: Vec<f64>,
        /// Read the points as c = s/n and print the normalized value.
        #[arg(long)]
        normalized: bool,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Sum exactly up to this normalized volume instead of to a certified tolerance.
        #[arg(long)]
        volume_cutoff: Option<f64>,
    },
    /// The height h_n(L) and its centred statistic.
    Height {
        #[arg(long)]
        lattice: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Draws of H(c) (c = 1/2 gives Z_0) from the Poisson model.
    PoissonSim {
        #[arg(long, value_delimiter = ',', required = true)]
        c: Vec<f64>,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = DEFAULT_HORIZON)]
        horizon: f64,
        /// Print the points of one realization instead.
        #[arg(long)]
        points: bool,
    },
    /// Table of x, pdf, cdf for a stable law.
    Stable {
        /// One of h:<c>, h-hat:<c>, z0, height, or alpha,sigma,beta,mu.
        #[arg(long)]
        law: String,
        #[arg(long, default_value_t = -10.0, allow_hyphen_values = true)]
        lo: f64,
        #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
        hi: f64,
        #[arg(long, default_value_t = 201)]
        count: usize,
    },
    /// Run a named experiment and emit its report.
    #[command(after_help = experiment_help())]
    Experiment {
        name: String,
        /// JSON config: flat, or keyed by experiment name.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Directory for cached per-lattice functionals.
        #[arg(long)]
        cache_dir: Option<PathBuf>,
    },
}

fn experiment_help() -> String {
    let mut s = String::from("Experiments and their default configurations:\n");
    for name in EXPERIMENTS {
        let cfg = default_config(name).expect("known experiment");
        s.push_str(&format!("  {name:<17} {}\n", serde_json::to_string(&cfg).unwrap_or_default()));
    }
    s.push_str("\"steps\": 0 selects the default Hecke walk length.\n");
    s
}

fn parse_law(spec: &str) -> Result<StableParams> {
    let spec = spec.trim();
    if let Some(c) = spec.strip_prefix("h:") {
        return Ok(params_for_h(c.parse()?)?);
    }
    if let Some(c) = spec.strip_prefix("h-hat:") {
        return Ok(params_for_h_hat(c.parse()?)?);
    }
    match spec {
        "z0" => return Ok(params_for_z0()),
        "height" => return Ok(affine(params_for_z0(), 2.0, -std::f64::consts::PI.ln() - 1.0)?),
        _ => {}
    }
    let v: Vec<f64> = spec.split(',').map(|x| x.trim().parse::<f64>()).collect::<Result<_, _>>().context("stable law")?;
    if v.len() != 4 {
        bail!("expected alpha,sigma,beta,mu; got '{spec}'");
    }
    Ok(StableParams::new(v[0], v[1], v[2], v[3])?)
}

fn load(path: &PathBuf) -> Result<Lattice<f64>> {
    read_lattice(path).with_context(|| format!("reading {}", path.display()))
}

fn csv_rows(out: &mut dyn Write, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

fn zeta_row(e: &ZetaEvaluation) -> Vec<String> {
    vec![e.n.to_string(), fmt17(e.s), fmt17(e.value), fmt17(e.tail_bound), format!("{:?}", e.tail_kind), fmt17(e.cutoff_volume)]
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let seed = match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().with_context(|| format!("{SEED_ENV}={v}"))?,
        Err(_) => cli.seed,
    };
    let mut out: Box<dyn Write> = match &cli.out {
        Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    };
    let json = cli.format == Format::Json;

    match cli.command {
        Command::SampleLattice { dim, prime, steps, trial } => {
            let steps = if steps == 0 { default_walk_steps(dim, prime) } else { steps };
            let l = sample_lattice(dim, prime, steps, seed, trial)?;
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&l)?)?;
            } else {
                write!(out, "{}", format_lattice(&l))?;
            }
        }
        Command::Enumerate { lattice, vmax } => {
            let vl = VectorLengthList::enumerate(&load(&lattice)?, vmax)?;
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&vl)?)?;
            } else {
                vl.write_csv(&mut out)?;
            }
        }
        Command::Epstein { lattice, s, normalized, tol, volume_cutoff } => {
            let cutoff = match volume_cutoff {
                Some(a) => Cutoff::Volume { a },
                None => Cutoff::Certified { tol },
            };
            let ev = EpsteinEvaluator::new(&load(&lattice)?, cutoff)?;
            let evals: Vec<ZetaEvaluation> =
                s.iter().map(|&x| if normalized { ev.e_normalized(x) } else { ev.e(x) }).collect::<Result<_, _>>()?;
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&evals)?)?;
            } else {
                let rows: Vec<Vec<String>> = evals.iter().map(zeta_row).collect();
                csv_rows(&mut out, &["n", "s", "value", "tail_bound", "tail_kind", "cutoff_volume"], &rows)?;
            }
        }
        Command::Height { lattice, tol } => {
            let ev = EpsteinEvaluator::new(&load(&lattice)?, Cutoff::Certified { tol })?;
            let h = ev.height()?;
            let stat = ev.height_statistic()?;
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&serde_json::json!({ "height": h, "height_statistic": stat }))?)?;
            } else {
                let rows = vec![
                    vec!["height".to_string(), fmt17(h.value), fmt17(h.tail_bound)],
                    vec!["height_statistic".to_string(), fmt17(stat.value), fmt17(stat.tail_bound)],
                ];
                csv_rows(&mut out, &["quantity", "value", "tail_bound"], &rows)?;
            }
        }
        Command::PoissonSim { c, trials, horizon, points } => {
            if points {
                let mut rng = trial_rng(seed, StreamTag::Poisson, 0);
                let real = simulate_points(horizon, &mut rng)?;
                if json {
                    writeln!(out, "{}", serde_json::to_string_pretty(real.points())?)?;
                } else {
                    let rows: Vec<Vec<String>> =
                        real.points().iter().enumerate().map(|(j, t)| vec![(j + 1).to_string(), fmt17(*t)]).collect();
                    csv_rows(&mut out, &["j", "volume"], &rows)?;
                }
            } else {
                let mut grid = c.clone();
                grid.sort_by(f64::total_cmp);
                grid.dedup();
                let mut rows = Vec::new();
                let mut all = Vec::new();
                for t in 0..trials {
                    let mut rng = trial_rng(seed, StreamTag::Poisson, t);
                    let draw = h_sample_joint(&grid, horizon, &mut rng)?;
                    for (cj, v) in grid.iter().zip(&draw) {
                        rows.push(vec![t.to_string(), fmt17(*cj), fmt17(*v)]);
                    }
                    all.push(draw);
                }
                if json {
                    writeln!(out, "{}", serde_json::to_string_pretty(&serde_json::json!({ "c": grid, "draws": all }))?)?;
                } else {
                    csv_rows(&mut out, &["trial", "c", "value"], &rows)?;
                }
            }
        }
        Command::Stable { law, lo, hi, count } => {
            let p = parse_law(&law)?;
            let table = stable::density_table(p, lo, hi, count)?;
            if json {
                let rows: Vec<_> = table.iter().map(|&(x, f, c)| serde_json::json!({ "x": x, "pdf": f, "cdf": c })).collect();
                writeln!(out, "{}", serde_json::to_string_pretty(&serde_json::json!({ "params": p, "rows": rows }))?)?;
            } else {
                let rows: Vec<Vec<String>> = table.iter().map(|&(x, f, c)| vec![fmt17(x), fmt17(f), fmt17(c)]).collect();
                csv_rows(&mut out, &["x", "pdf", "cdf"], &rows)?;
            }
        }
        Command::Experiment { name, config, cache_dir } => {
            let mut cfg = match &config {
                Some(path) => ExperimentConfig::from_file_for(path, &name)?,
                None => ExperimentConfig::default(),
            };
            cfg.master_seed = Some(seed);
            if cache_dir.is_some() {
                cfg.cache_dir = cache_dir;
            }
            let report = run_experiment(&name, &cfg)?;
            eprint!("{}", report.summary());
            eprintln!("wall time {:.1} s", report.wall_time_seconds);
            if json {
                writeln!(out, "{}", report.to_json()?)?;
            } else {
                report.write_csv(&mut out)?;
            }
        }
    }
    out.flush()?;
    Ok(())
}
