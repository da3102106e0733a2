//! `masspack`: pack mass under a gauge, compute the dual semi-cover, certify
//! feasibility, and run the circle splitting pipeline.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input error.

mod io;

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use masspack_core::circle::{is_h_carleson, verify_splitting, SplittingReport};
use masspack_core::cover::dyadic_min_cut;
use masspack_core::demo::{
    alpha_density_samples, divergent_dust_weight, positive_arc_lengths, single_gap_weight,
};
use masspack_core::dyadic::DyadicCube;
use masspack_core::gauge::{Gauge, GaugeFn};
use masspack_core::membership::{check_membership_with_slack, CubeScope, ViolationReport};
use masspack_core::pack::{pack, MassFunction, ScalingStep};
use serde::Serialize;

const DEFAULT_SEED: u64 = 0x6d61_7373_7061_636b;
const DEMO_GRID: usize = 1 << 14;
const DEMO_LEVELS: [u32; 5] = [4, 8, 16, 32, 64];

#[derive(Parser)]
#[command(
    name = "masspack",
    about = "gauge-constrained mass packing, tree duality, and circle splitting",
    version,
    subcommand_required = true,
    arg_required_else_help = true
)]
struct Cli {
    /// Seed for sampled verification, recorded in reports
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pack a roof grid: near-optimal mass function plus its bottleneck cover
    Pack {
        /// Roof JSON: {"n":..,"m":..,"values":[..]} with "inf" allowed
        #[arg(long)]
        roof: PathBuf,
        /// Gauge: power:ALPHA, log, density:FILE, or table:FILE
        #[arg(long)]
        gauge: String,
        /// Output path; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact dyadic semi-cover minimum of a roof
    Dual {
        #[arg(long)]
        roof: PathBuf,
        /// Gauge: power:ALPHA, log, density:FILE, or table:FILE
        #[arg(long)]
        gauge: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify a mass function against its roof and cube budgets
    Verify {
        #[arg(long)]
        roof: PathBuf,
        /// Mass function JSON (or a pack report; its "f" field is used)
        #[arg(long)]
        f: PathBuf,
        /// Gauge: power:ALPHA, log, density:FILE, or table:FILE
        #[arg(long)]
        gauge: String,
        #[arg(long, value_enum, default_value_t = ScopeArg::All)]
        scope: ScopeArg,
        /// Relative slack on every budget comparison
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build splitting outer functions for a circle weight
    Split {
        /// One weight sample per line
        #[arg(long)]
        weight: PathBuf,
        /// Gauge: power:ALPHA, log, density:FILE, or table:FILE
        #[arg(long)]
        gauge: String,
        /// Norm exponent
        #[arg(long)]
        t: f64,
        /// Growth-bound epsilon
        #[arg(long)]
        eps: f64,
        /// Comma-separated partition counts
        #[arg(long = "Ns", value_delimiter = ',', default_values_t = DEMO_LEVELS)]
        levels: Vec<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a bundled splitting scenario and write a comparative report
    Demo {
        name: DemoName,
        /// Directory for the report file
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Norm exponent for both weights
        #[arg(long, default_value_t = 2.0)]
        t: f64,
        /// Growth-bound epsilon
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        /// Density exponent for the alpha-carleson demo
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        /// Density decay coefficient for the alpha-carleson demo
        #[arg(long, default_value_t = 1.0)]
        decay: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ScopeArg {
    Dyadic,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum DemoName {
    Carleson,
    AlphaCarleson,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Err(err) = check_thread_cap() {
        eprintln!("error: {err:#}");
        return ExitCode::from(2);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

/// The engine is single-threaded, so any positive cap is honored as-is; the
/// variable is still validated for forward compatibility.
fn check_thread_cap() -> Result<()> {
    if let Ok(raw) = std::env::var("MASSPACK_THREADS") {
        let n: usize = raw
            .parse()
            .with_context(|| format!("MASSPACK_THREADS={raw:?} is not a number"))?;
        if n == 0 {
            bail!("MASSPACK_THREADS must be at least 1");
        }
        log::debug!("MASSPACK_THREADS={n}: execution is single-threaded, cap honored");
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    let seed = cli.seed;
    match cli.command {
        Command::Pack { roof, gauge, out } => {
            let h = io::parse_gauge(&gauge, 1.0)?;
            let roof = io::read_roof(&roof)?;
            let result = pack(&roof, &h)?;
            #[derive(Serialize)]
            struct PackReport<'a> {
                gauge: &'a str,
                primal_value: f64,
                raw_value: f64,
                bottlenecks: &'a [DyadicCube],
                trace: &'a [ScalingStep],
                f: &'a MassFunction,
                f_raw: &'a MassFunction,
            }
            io::emit_json(
                &PackReport {
                    gauge: &gauge,
                    primal_value: result.primal_value,
                    raw_value: result.raw_value,
                    bottlenecks: &result.bottlenecks,
                    trace: &result.trace,
                    f: &result.f,
                    f_raw: &result.f_raw,
                },
                out.as_deref(),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Dual { roof, gauge, out } => {
            let h = io::parse_gauge(&gauge, 1.0)?;
            let roof = io::read_roof(&roof)?;
            let (value, cover) = dyadic_min_cut(&roof, &h)?;
            #[derive(Serialize)]
            struct DualReport<'a> {
                gauge: &'a str,
                value: f64,
                cover: &'a [DyadicCube],
            }
            io::emit_json(
                &DualReport {
                    gauge: &gauge,
                    value,
                    cover: &cover.cubes,
                },
                out.as_deref(),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            roof,
            f,
            gauge,
            scope,
            tol,
            out,
        } => {
            if tol.is_nan() || tol < f64::EPSILON {
                bail!(
                    "--tol must be at least machine epsilon ({:e})",
                    f64::EPSILON
                );
            }
            let h = io::parse_gauge(&gauge, 1.0)?;
            let roof = io::read_roof(&roof)?;
            let f = io::read_mass(&f)?;
            let scope = match scope {
                ScopeArg::Dyadic => CubeScope::Dyadic,
                ScopeArg::All => CubeScope::AllGrid { sample_seed: seed },
            };
            let report = check_membership_with_slack(&f, &roof, &h, scope, tol)?;
            #[derive(Serialize)]
            struct VerifyReport<'a> {
                gauge: &'a str,
                seed: u64,
                tol: f64,
                ok: bool,
                #[serde(flatten)]
                report: &'a ViolationReport,
            }
            io::emit_json(
                &VerifyReport {
                    gauge: &gauge,
                    seed,
                    tol,
                    ok: report.is_empty(),
                    report: &report,
                },
                out.as_deref(),
            )?;
            Ok(if report.is_empty() {
                ExitCode::SUCCESS
            } else {
                eprintln!("{} violations found", report.violations.len());
                ExitCode::from(1)
            })
        }
        Command::Split {
            weight,
            gauge,
            t,
            eps,
            levels,
            out,
        } => {
            let h = io::parse_gauge(&gauge, TAU)?;
            let w = io::read_weight_csv(&weight, t)?;
            let report = verify_splitting(&w, &h, &levels, eps)?;
            #[derive(Serialize)]
            struct SplitOut<'a> {
                gauge: &'a str,
                seed: u64,
                #[serde(flatten)]
                report: &'a SplittingReport,
            }
            io::emit_json(
                &SplitOut {
                    gauge: &gauge,
                    seed,
                    report: &report,
                },
                out.as_deref(),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Demo {
            name,
            out_dir,
            t,
            eps,
            alpha,
            decay,
        } => {
            run_demo(name, &out_dir, t, eps, alpha, decay, seed)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

#[derive(Serialize)]
struct WeightSection {
    description: String,
    carleson_verdict: bool,
    gauge_series_partial_sum: f64,
    splitting: SplittingReport,
}

#[derive(Serialize)]
struct DemoReport {
    demo: String,
    gauge: String,
    seed: u64,
    grid_size: usize,
    t: f64,
    eps: f64,
    /// Largest |h_density(x) - decay * x^alpha| on the sample grid, present
    /// for the density-built gauge of the alpha demo
    #[serde(skip_serializing_if = "Option::is_none")]
    power_gauge_agreement: Option<f64>,
    divergent_drop_factor: f64,
    control_drop_factor: f64,
    divergent: WeightSection,
    control: WeightSection,
}

fn weight_section<H: GaugeFn>(
    description: &str,
    w: &masspack_core::circle::CircleWeight,
    h: &H,
    eps: f64,
) -> Result<WeightSection> {
    let arcs = positive_arc_lengths(w);
    let (carleson_verdict, gauge_series_partial_sum) = is_h_carleson(&arcs, h)?;
    let splitting = verify_splitting(w, h, &DEMO_LEVELS, eps)?;
    Ok(WeightSection {
        description: description.to_string(),
        carleson_verdict,
        gauge_series_partial_sum,
        splitting,
    })
}

fn drop_factor(section: &WeightSection) -> f64 {
    let ints: Vec<f64> = section
        .splitting
        .per_n
        .iter()
        .map(|d| d.integral_wt)
        .collect();
    ints[0] / ints[ints.len() - 1]
}

fn run_demo(
    name: DemoName,
    out_dir: &Path,
    t: f64,
    eps: f64,
    alpha: f64,
    decay: f64,
    seed: u64,
) -> Result<()> {
    let (demo_name, gauge_desc, h, power_gauge_agreement) = match name {
        DemoName::Carleson => (
            "carleson",
            "log".to_string(),
            io::parse_gauge("log", TAU)?,
            None,
        ),
        DemoName::AlphaCarleson => {
            let samples = alpha_density_samples(alpha, decay, 512);
            let h = Gauge::from_density(&samples, 1e9, TAU)?;
            // the induced gauge against the pure power law
            let agreement = samples
                .iter()
                .map(|&(x, _)| {
                    let got = h.value(x).expect("sample inside domain");
                    (got - decay * x.powf(alpha)).abs()
                })
                .fold(0.0f64, f64::max);
            (
                "alpha-carleson",
                format!("density: exp(-{decay} * x^({alpha} - 1))"),
                h,
                Some(agreement),
            )
        }
    };

    let dust = divergent_dust_weight(DEMO_GRID, t)?;
    let control = single_gap_weight(DEMO_GRID, t)?;
    let divergent = weight_section(
        "weight carried by a three-scale dust of thin arcs",
        &dust,
        &h,
        eps,
    )?;
    let control_section = weight_section(
        "weight vanishing on a single arc of about one radian",
        &control,
        &h,
        eps,
    )?;

    let report = DemoReport {
        demo: demo_name.to_string(),
        gauge: gauge_desc,
        seed,
        grid_size: DEMO_GRID,
        t,
        eps,
        power_gauge_agreement,
        divergent_drop_factor: drop_factor(&divergent),
        control_drop_factor: drop_factor(&control_section),
        divergent,
        control: control_section,
    };

    std::fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let path = out_dir.join(format!("{}_report.json", demo_name.replace('-', "_")));
    io::emit_json(&report, Some(&path))?;

    println!("demo {demo_name}: report written to {}", path.display());
    println!(
        "  dust weight: integral falls {:.1}x across N = {:?} (Carleson verdict: {})",
        report.divergent_drop_factor, DEMO_LEVELS, report.divergent.carleson_verdict
    );
    println!(
        "  control:     integral changes {:.2}x (Carleson verdict: {})",
        report.control_drop_factor, report.control.carleson_verdict
    );
    Ok(())
}
