//! `betti`: simulations, reference curves, cell statistics and plots.

mod plot;

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use betti_core::analytic::{self, constants};
use betti_core::betti::SignatureMeta;
use betti_core::experiment::{log_grid, GridSpec};
use betti_core::io::{
    parse_csv, read_points, write_analytic_csv, write_experiment_csv, write_histogram_csv, write_signature_csv,
};
use betti_core::pdc;
use betti_core::verify::run_suite;
use betti_core::{
    alpha_thresholds, build_delaunay, build_filtration, fit_leading_order, mark_filtration, periodic_delaunay,
    run_experiment, signature, ExperimentConfig, RngSpec, SimplicialComplex,
};

#[derive(Parser)]
#[command(name = "betti", version, about = "Betti number signatures of Poisson point processes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo mean Betti numbers on an eta grid
    Simulate(SimulateArgs),
    /// Analytic reference curves
    Analytic(AnalyticArgs),
    /// Poisson-Delaunay cell statistics and the asymptotic coefficients
    Pdc(PdcArgs),
    /// Small-instance oracle comparison and Euler identity sweep
    Verify(VerifyArgs),
    /// Render a CSV as an SVG line chart
    Plot(PlotArgs),
    /// Betti signature of one point set
    Signature(SignatureArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// key=value config file; flags override its entries
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(short = 'd', long = "dim")]
    dim: Option<usize>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(short = 'R', long)]
    realizations: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    eta_min: Option<f64>,
    #[arg(long)]
    eta_max: Option<f64>,
    #[arg(long)]
    eta_points: Option<usize>,
    /// torus (default) or sphere
    #[arg(long)]
    topology: Option<String>,
    /// Output CSV (stdout when absent)
    #[arg(short = 'o', long)]
    out: Option<PathBuf>,
    /// Print leading-order fits to stderr
    #[arg(long)]
    fit: bool,
}

#[derive(Args)]
struct AnalyticArgs {
    #[arg(short = 'd', long = "dim")]
    dim: usize,
    #[arg(long, default_value_t = 1e-3)]
    eta_min: f64,
    #[arg(long, default_value_t = 10.0)]
    eta_max: f64,
    #[arg(long, default_value_t = 200)]
    points: usize,
    #[arg(short = 'o', long)]
    out: Option<PathBuf>,
    /// Also print the constants table to stderr
    #[arg(long)]
    constants: bool,
}

#[derive(Args)]
struct PdcArgs {
    #[arg(long, default_value_t = 1_000_000)]
    n_points: usize,
    #[arg(long, default_value_t = 0.2)]
    margin: f64,
    /// Histogram bin width in degrees
    #[arg(long, default_value_t = 0.5)]
    bin_deg: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest-angle histogram CSV
    #[arg(short = 'o', long)]
    out: Option<PathBuf>,
    /// Skip the sampling step
    #[arg(long)]
    no_sample: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 50)]
    instances: usize,
    #[arg(long, default_value_t = 25)]
    max_n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct PlotArgs {
    input: PathBuf,
    /// Log-log axes
    #[arg(long)]
    log: bool,
    /// Abscissa column (default: first)
    #[arg(long)]
    x: Option<String>,
    /// Ordinate columns, comma separated (default: all but the abscissa and
    /// standard errors)
    #[arg(long, value_delimiter = ',')]
    y: Vec<String>,
    /// Output SVG (default: input with .svg extension)
    #[arg(short = 'o', long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SignatureArgs {
    input: PathBuf,
    /// Periodic boundaries (coordinates must lie in [0, 1))
    #[arg(long)]
    torus: bool,
    /// Intensity used for the eta column (default: point count)
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short = 'o', long)]
    out: Option<PathBuf>,
    /// Also write the sorted filtration here
    #[arg(long)]
    dump: Option<PathBuf>,
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let mut cfg = match &a.config {
        Some(p) => ExperimentConfig::from_kv(&fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?)
            .with_context(|| format!("in {}", p.display()))?,
        None => ExperimentConfig::new(a.dim.unwrap_or(2))?,
    };
    let mut grid = GridSpec::default();
    let pairs = [
        ("d", a.dim.map(|v| v.to_string())),
        ("lambda", a.lambda.map(|v| v.to_string())),
        ("realizations", a.realizations.map(|v| v.to_string())),
        ("seed", a.seed.map(|v| v.to_string())),
        ("eta_min", a.eta_min.map(|v| v.to_string())),
        ("eta_max", a.eta_max.map(|v| v.to_string())),
        ("eta_points", a.eta_points.map(|v| v.to_string())),
        ("topology", a.topology.clone()),
    ];
    for (k, v) in pairs {
        if let Some(v) = v {
            cfg.apply(k, &v, &mut grid)?;
        }
    }
    cfg.eta_grid = grid.build(&cfg.eta_grid)?;
    if let Some(o) = a.out {
        cfg.out = Some(o);
    }
    cfg.validate()?;
    eprintln!(
        "simulate: d={} lambda={} R={} seed={} topology={} grid={} points",
        cfg.dim,
        cfg.lambda,
        cfg.realizations,
        cfg.seed,
        cfg.topology,
        cfg.eta_grid.len()
    );
    let r = run_experiment(&cfg)?;
    let mut out = output(cfg.out.as_deref())?;
    write_experiment_csv(&r, &mut out)?;
    out.flush()?;
    if a.fit {
        let windows: &[(usize, (f64, f64))] = match cfg.dim {
            2 => &[(1, (0.05, 0.3))],
            _ => &[(1, (0.05, 0.3)), (2, (0.1, 0.4))],
        };
        for &(k, w) in windows {
            match fit_leading_order(&r, k, w) {
                Ok(f) => eprintln!(
                    "beta{k} on [{}, {}]: slope {:.4}, prefactor {:.5}, residual {:.3}",
                    w.0, w.1, f.slope, f.prefactor, f.residual
                ),
                Err(e) => eprintln!("beta{k} on [{}, {}]: {e}", w.0, w.1),
            }
        }
    }
    Ok(())
}

fn analytic_cmd(a: AnalyticArgs) -> Result<()> {
    let etas = log_grid(a.eta_min, a.eta_max, a.points)?;
    let mut out = output(a.out.as_deref())?;
    write_analytic_csv(a.dim, &etas, &mut out)?;
    out.flush()?;
    if a.constants {
        for c in constants() {
            eprintln!("{:<28} {:>14.8} {:?}", c.name, c.value, c.source);
        }
    }
    Ok(())
}

fn pdc_cmd(a: PdcArgs) -> Result<()> {
    let series = pdc::p_triangle_series_2d(4)?;
    println!("2D triangle-loop series: {:.5} eta^2 {:+.5} eta^3 {:+.5} eta^4", series[0], series[1], series[2]);
    println!("2D beta1 leading coefficient: {:.5}", pdc::beta1_coeff_2d()?);
    let r = pdc::p_triangle_coeff_3d()?;
    println!(
        "3D beta1 eta^2 coefficient: closed {:.5}, numeric {:.5} (gap {:.3}%, log-log slope {:.4})",
        r.closed,
        r.numeric,
        100.0 * r.relative_gap(),
        r.slope
    );
    println!("A = {} vs 8 sqrt 3 = {:.6}", analytic::MEIJER_A, 8.0 * 3f64.sqrt());
    if a.no_sample {
        return Ok(());
    }
    let mut rng = RngSpec::new(a.seed, 0).rng();
    let s = pdc::sample_pdc(a.n_points, a.margin, &mut rng)?;
    let ks = pdc::ks_distance(&s.typical_angles(), pdc::typical_theta_cdf);
    let min_max = s.max_angles().into_iter().fold(f64::INFINITY, f64::min);
    let est = pdc::beta2_coeff_3d_binned(&s, a.bin_deg.to_radians())?;
    println!(
        "sampled {} tetrahedra ({:.4} per interior point), KS distance of typical angles {:.5}",
        s.tets.len(),
        s.tets_per_point(),
        ks
    );
    println!(
        "smallest largest-angle {:.4} deg (theta_0 = {:.4} deg)",
        min_max.to_degrees(),
        analytic::theta_0().to_degrees()
    );
    println!(
        "I = {:.6} (unbinned {:.6}), beta2 eta^3 coefficient {:.5}; supports {}",
        est.integral,
        est.integral_unbinned,
        est.coefficient,
        pdc::supported_reference_value(est.coefficient)
    );
    if let Some(p) = a.out {
        let mut out = output(Some(&p))?;
        write_histogram_csv(&est.histogram, &mut out)?;
        out.flush()?;
    }
    Ok(())
}

fn verify_cmd(a: VerifyArgs) -> Result<bool> {
    let r = run_suite(a.instances, a.max_n, a.seed)?;
    println!(
        "{} instances, {} thresholds compared, {} periodic Euler sweeps",
        r.instances, r.thresholds_checked, r.euler_checked
    );
    for (dim, stream, n) in &r.mismatched_instances {
        println!("MISMATCH d={dim} seed={} stream={stream}: {n} thresholds", a.seed);
    }
    println!("{}", if r.passed() { "PASS" } else { "FAIL" });
    Ok(r.passed())
}

fn plot_cmd(a: PlotArgs) -> Result<()> {
    let t = parse_csv(&fs::read_to_string(&a.input).with_context(|| format!("reading {}", a.input.display()))?)?;
    let x_name = a.x.unwrap_or_else(|| t.columns[0].clone());
    let xs = t.column(&x_name).with_context(|| format!("no column '{x_name}'"))?;
    let ys: Vec<String> = if a.y.is_empty() {
        t.columns
            .iter()
            .filter(|c| **c != x_name && !c.ends_with("_sem"))
            .cloned()
            .collect()
    } else {
        a.y
    };
    let series = ys
        .iter()
        .map(|name| {
            let col = t.column(name).with_context(|| format!("no column '{name}'"))?;
            Ok(plot::Series {
                name: name.clone(),
                points: xs.iter().copied().zip(col).collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let svg = plot::render(&series, &x_name, a.log);
    let out = a.out.unwrap_or_else(|| a.input.with_extension("svg"));
    fs::write(&out, svg).with_context(|| format!("writing {}", out.display()))?;
    Ok(())
}

fn signature_cmd(a: SignatureArgs) -> Result<()> {
    let pts = read_points(&a.input, a.torus).with_context(|| format!("reading {}", a.input.display()))?;
    let complex = if a.torus {
        periodic_delaunay(&pts, a.seed)?.complex
    } else {
        if pts.dim() == 1 {
            bail!("one-dimensional input has no Delaunay complex here");
        }
        SimplicialComplex::sphere_augmented(&build_delaunay(&pts, a.seed)?)?
    };
    let t = alpha_thresholds(&complex)?;
    let f = build_filtration(&complex, &t)?;
    if let Some(p) = &a.dump {
        let mut out = output(Some(p))?;
        f.write_dump(&mut out)?;
        out.flush()?;
    }
    let mf = mark_filtration(f)?;
    let sig = signature(&mf).with_meta(SignatureMeta {
        n_points: pts.len(),
        dim: pts.dim(),
        lambda: a.lambda,
        seed: None,
        topology: Some(complex.topology()),
    });
    betti_core::betti::check_euler(&mf, &sig, &[])?;
    let mut out = output(a.out.as_deref())?;
    write_signature_csv(&sig, &mut out)?;
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => simulate(a).map(|_| true),
        Command::Analytic(a) => analytic_cmd(a).map(|_| true),
        Command::Pdc(a) => pdc_cmd(a).map(|_| true),
        Command::Verify(a) => verify_cmd(a),
        Command::Plot(a) => plot_cmd(a).map(|_| true),
        Command::Signature(a) => signature_cmd(a).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
