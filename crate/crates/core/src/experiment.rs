//! Monte Carlo runs: many Poisson realizations pushed through the full
//! pipeline, with Betti numbers aggregated on a grid of reduced densities.

use std::path::PathBuf;

use rayon::prelude::*;

use crate::analytic::{alpha_from_eta, euler_density};
use crate::betti::{check_euler, mark_filtration, signature};
use crate::complex::{SimplicialComplex, Topology};
use crate::delaunay::build_delaunay;
use crate::error::{Error, Result};
use crate::filtration::{alpha_thresholds, build_filtration};
use crate::periodic::periodic_delaunay;
use crate::poisson::{sample_process, RngSpec};

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub dim: usize,
    pub lambda: f64,
    pub realizations: usize,
    pub seed: u64,
    /// Reduced densities, strictly increasing and nonnegative.
    pub eta_grid: Vec<f64>,
    /// `Torus2`/`Torus3` for periodic runs, `SphereAugmented` for the plain
    /// unit cube.
    pub topology: Topology,
    pub out: Option<PathBuf>,
}

/// `points` log-spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && points >= 2) {
        return Err(Error::invalid(format!(
            "log grid needs 0 < lo < hi and at least 2 points (got {lo}, {hi}, {points})"
        )));
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..points)
        .map(|i| match i {
            0 => lo,
            _ if i == points - 1 => hi,
            _ => (a + (b - a) * i as f64 / (points - 1) as f64).exp(),
        })
        .collect())
}

impl ExperimentConfig {
    /// Desk-scale defaults: lambda 1e4, 200 (2D) or 20 (3D) realizations,
    /// 60 log-spaced etas on [1e-2, 10], periodic boundaries.
    pub fn new(dim: usize) -> Result<Self> {
        let realizations = match dim {
            2 => 200,
            3 => 20,
            _ => return Err(Error::invalid(format!("dimension must be 2 or 3, got {dim}"))),
        };
        Ok(ExperimentConfig {
            dim,
            lambda: 1e4,
            realizations,
            seed: 0,
            eta_grid: log_grid(1e-2, 10.0, 60)?,
            topology: Topology::torus(dim)?,
            out: None,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !matches!(self.dim, 2 | 3) {
            return Err(Error::invalid(format!("dimension must be 2 or 3, got {}", self.dim)));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::invalid(format!("lambda must be positive, got {}", self.lambda)));
        }
        if self.realizations == 0 {
            return Err(Error::invalid("need at least one realization"));
        }
        if self.eta_grid.is_empty()
            || self.eta_grid[0] < 0.0
            || self.eta_grid.windows(2).any(|w| !(w[0] < w[1]))
            || self.eta_grid.iter().any(|e| !e.is_finite())
        {
            return Err(Error::invalid("eta grid must be finite, nonnegative and strictly increasing"));
        }
        match self.topology {
            Topology::SphereAugmented => {}
            t if t.is_torus() && t == Topology::torus(self.dim)? => {}
            t => {
                return Err(Error::invalid(format!(
                    "topology {t} is not usable for d = {}",
                    self.dim
                )))
            }
        }
        Ok(())
    }

    /// Reads flat `key = value` text. Blank lines and `#` comments are
    /// skipped; keys are d, lambda, realizations, seed, eta_min, eta_max,
    /// eta_points, topology, out.
    pub fn from_kv(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                message: format!("expected key=value, got '{line}'"),
            })?;
            pairs.push((i + 1, k.trim().to_string(), v.trim().to_string()));
        }
        let dim = match pairs.iter().find(|p| p.1 == "d") {
            Some((line, _, v)) => v.parse().map_err(|_| Error::Parse {
                line: *line,
                message: format!("bad dimension '{v}'"),
            })?,
            None => 2,
        };
        let mut cfg = ExperimentConfig::new(dim)?;
        let mut grid = GridSpec::default();
        for (line, k, v) in &pairs {
            cfg.apply(k, v, &mut grid).map_err(|e| Error::Parse {
                line: *line,
                message: e.to_string(),
            })?;
        }
        cfg.eta_grid = grid.build(&cfg.eta_grid)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies one key; grid bounds are collected into `grid` and resolved
    /// by [`GridSpec::build`].
    pub fn apply(&mut self, key: &str, value: &str, grid: &mut GridSpec) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse().map_err(|_| Error::invalid(format!("bad value '{v}' for {key}")))
        }
        match key {
            "d" => {
                let d: usize = num(key, value)?;
                if d != self.dim {
                    let fresh = ExperimentConfig::new(d)?;
                    self.realizations = fresh.realizations;
                    if self.topology.is_torus() {
                        self.topology = fresh.topology;
                    }
                    self.dim = d;
                }
            }
            "lambda" => self.lambda = num(key, value)?,
            "realizations" | "R" => self.realizations = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "eta_min" => grid.min = Some(num(key, value)?),
            "eta_max" => grid.max = Some(num(key, value)?),
            "eta_points" => grid.points = Some(num(key, value)?),
            "topology" => {
                self.topology = match value {
                    "torus" | "periodic" => Topology::torus(self.dim)?,
                    other => other.parse()?,
                }
            }
            "out" => self.out = Some(PathBuf::from(value)),
            _ => return Err(Error::invalid(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    pub fn alpha_grid(&self) -> Result<Vec<f64>> {
        self.eta_grid
            .iter()
            .map(|&e| alpha_from_eta(self.dim, e, self.lambda))
            .collect()
    }
}

/// Partial log-grid settings; unset fields keep the current grid's values.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GridSpec {
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub points: Option<usize>,
}

impl GridSpec {
    pub fn build(&self, current: &[f64]) -> Result<Vec<f64>> {
        if *self == GridSpec::default() {
            return Ok(current.to_vec());
        }
        log_grid(
            self.min.unwrap_or(current[0]),
            self.max.unwrap_or(current[current.len() - 1]),
            self.points.unwrap_or(current.len()),
        )
    }
}

/// Betti numbers of one realization at each grid point (`[b0, b1, b2, b3]`).
#[derive(Clone, Debug, PartialEq)]
pub struct RealizationResult {
    pub index: u64,
    pub n_points: usize,
    pub betti: Vec<[i64; 4]>,
}

/// Runs one realization through the pipeline and checks the Euler identity
/// at every breakpoint and every grid threshold.
pub fn run_realization(cfg: &ExperimentConfig, index: u64) -> Result<RealizationResult> {
    let spec = RngSpec::new(cfg.seed, index);
    let pts = sample_process(cfg.lambda, cfg.dim, spec)?;
    let grid_sq: Vec<f64> = cfg.alpha_grid()?.iter().map(|a| a * a).collect();
    if pts.is_empty() {
        return Ok(RealizationResult {
            index,
            n_points: 0,
            betti: vec![[0; 4]; grid_sq.len()],
        });
    }
    let delaunay_seed = cfg.seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    let complex = match cfg.topology {
        Topology::SphereAugmented => SimplicialComplex::sphere_augmented(&build_delaunay(&pts, delaunay_seed)?)?,
        _ => periodic_delaunay(&pts, delaunay_seed)?.complex,
    };
    let t = alpha_thresholds(&complex)?;
    let mf = mark_filtration(build_filtration(&complex, &t)?)?;
    let sig = signature(&mf);
    check_euler(&mf, &sig, &grid_sq)?;
    let betti = grid_sq
        .iter()
        .map(|&a| {
            let v = sig.eval_sq(a);
            let mut row = [0i64; 4];
            row[..v.len()].copy_from_slice(&v);
            row
        })
        .collect();
    Ok(RealizationResult {
        index,
        n_points: pts.len(),
        betti,
    })
}

/// Mean and standard error of the mean.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Moment {
    pub mean: f64,
    pub sem: f64,
}

impl Moment {
    /// From integer samples scaled by `1 / scale`; sums are exact so the
    /// result does not depend on sample order. The SEM is NaN for one sample.
    fn of_integers(xs: impl Iterator<Item = i64>, scale: f64) -> Moment {
        let (mut n, mut s, mut s2) = (0i128, 0i128, 0i128);
        for x in xs {
            n += 1;
            s += x as i128;
            s2 += (x as i128) * (x as i128);
        }
        let nf = n as f64;
        let mean = s as f64 / nf;
        let sem = if n > 1 {
            // n * sum(x^2) - (sum x)^2 is exact in i128
            let var = (n * s2 - s * s) as f64 / (nf * (nf - 1.0));
            (var / nf).sqrt()
        } else {
            f64::NAN
        };
        Moment {
            mean: mean / scale,
            sem: sem / scale,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridPoint {
    pub eta: f64,
    pub alpha: f64,
    /// `beta_k / lambda` for k = 0..=d.
    pub betti: Vec<Moment>,
    /// `chi / lambda` from the same per-realization integers.
    pub chi: Moment,
    pub chi_theory: f64,
}

#[derive(Clone, Debug)]
pub struct AggregateResult {
    pub config: ExperimentConfig,
    pub points: Vec<GridPoint>,
    pub realizations: Vec<RealizationResult>,
}

impl AggregateResult {
    pub fn dim(&self) -> usize {
        self.config.dim
    }

    /// Aggregates per-realization integers on the grid.
    pub fn from_realizations(config: ExperimentConfig, realizations: Vec<RealizationResult>) -> Result<Self> {
        let d = config.dim;
        let alphas = config.alpha_grid()?;
        let lambda = config.lambda;
        let points = config
            .eta_grid
            .iter()
            .zip(&alphas)
            .enumerate()
            .map(|(g, (&eta, &alpha))| {
                let betti = (0..=d)
                    .map(|k| Moment::of_integers(realizations.iter().map(|r| r.betti[g][k]), lambda))
                    .collect();
                let chi = Moment::of_integers(
                    realizations.iter().map(|r| {
                        (0..=d)
                            .map(|k| if k % 2 == 0 { r.betti[g][k] } else { -r.betti[g][k] })
                            .sum()
                    }),
                    lambda,
                );
                Ok(GridPoint {
                    eta,
                    alpha,
                    betti,
                    chi,
                    chi_theory: euler_density(d, eta)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(AggregateResult {
            config,
            points,
            realizations,
        })
    }
}

/// Runs all realizations in the rayon pool (realization `i` uses stream `i`
/// of the master seed) and aggregates them in index order.
pub fn run_experiment(config: &ExperimentConfig) -> Result<AggregateResult> {
    config.validate()?;
    let results = (0..config.realizations as u64)
        .into_par_iter()
        .map(|i| {
            run_realization(config, i).map_err(|e| Error::Realization {
                index: i,
                seed: config.seed,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    AggregateResult::from_realizations(config.clone(), results)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerFit {
    pub slope: f64,
    pub prefactor: f64,
    /// Euclidean norm of the log residuals.
    pub residual: f64,
    pub points: usize,
}

/// Least-squares line through `(log eta, log mean beta_k / lambda)` over the
/// grid points with `lo <= eta <= hi`, each weighted by the inverse variance
/// of its log mean, `(mean / sem)^2`. Without usable standard errors (a
/// single realization) the points are weighted equally.
pub fn fit_leading_order(result: &AggregateResult, k: usize, window: (f64, f64)) -> Result<PowerFit> {
    if k > result.dim() {
        return Err(Error::invalid(format!("no beta_{k} in d = {}", result.dim())));
    }
    let pts: Vec<(f64, f64, f64)> = result
        .points
        .iter()
        .filter(|p| p.eta >= window.0 && p.eta <= window.1)
        .map(|p| (p.eta, p.betti[k].mean, p.betti[k].sem))
        .collect();
    if let Some(bad) = pts.iter().find(|p| !(p.1 > 0.0)) {
        return Err(Error::WindowTooLow(format!(
            "mean beta_{k} is {} at eta = {}",
            bad.1, bad.0
        )));
    }
    if pts.len() < 4 {
        return Err(Error::WindowTooLow(format!(
            "only {} grid points in [{}, {}]",
            pts.len(),
            window.0,
            window.1
        )));
    }
    let weighted = pts.iter().all(|p| p.2 > 0.0 && p.2.is_finite());
    let logs: Vec<(f64, f64, f64)> = pts
        .iter()
        .map(|p| {
            let w = if weighted { (p.1 / p.2).powi(2) } else { 1.0 };
            (p.0.ln(), p.1.ln(), w)
        })
        .collect();
    Ok(log_log_fit(&logs))
}

/// Weighted line fit through `(x, y, weight)` triples.
fn log_log_fit(logs: &[(f64, f64, f64)]) -> PowerFit {
    let sw: f64 = logs.iter().map(|l| l.2).sum();
    let mx = logs.iter().map(|l| l.2 * l.0).sum::<f64>() / sw;
    let my = logs.iter().map(|l| l.2 * l.1).sum::<f64>() / sw;
    let sxx: f64 = logs.iter().map(|l| l.2 * (l.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|l| l.2 * (l.0 - mx) * (l.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = logs
        .iter()
        .map(|l| (l.1 - intercept - slope * l.0).powi(2))
        .sum::<f64>()
        .sqrt();
    PowerFit {
        slope,
        prefactor: intercept.exp(),
        residual,
        points: logs.len(),
    }
}
