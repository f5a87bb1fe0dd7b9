//! Text formats: point files in, CSV tables out.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::analytic::{eta_from_alpha, reference_row};
use crate::betti::BettiSignature;
use crate::error::{Error, Result};
use crate::experiment::AggregateResult;
use crate::pdc::AngleDensity;
use crate::points::PointSet;

/// Parses whitespace-separated coordinates, one point per line. Blank lines
/// and lines starting with `#` are skipped; labels follow line order. With
/// `torus` set every coordinate must lie in `[0, 1)`.
pub fn parse_points(text: &str, torus: bool) -> Result<PointSet> {
    let mut set: Option<PointSet> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let n = i + 1;
        let vals = line
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Parse {
                        line: n,
                        message: format!("not a finite number: '{t}'"),
                    })
            })
            .collect::<Result<Vec<f64>>>()?;
        let set = match &mut set {
            Some(s) => s,
            None => {
                if !(1..=3).contains(&vals.len()) {
                    return Err(Error::Parse {
                        line: n,
                        message: format!("expected 1 to 3 coordinates, found {}", vals.len()),
                    });
                }
                set.insert(PointSet::new(vals.len()))
            }
        };
        if vals.len() != set.dim() {
            return Err(Error::Parse {
                line: n,
                message: format!("expected {} coordinates, found {}", set.dim(), vals.len()),
            });
        }
        if torus && vals.iter().any(|v| !(0.0..1.0).contains(v)) {
            return Err(Error::Parse {
                line: n,
                message: "coordinate outside [0, 1) in torus mode".into(),
            });
        }
        let mut c = [0.0; 3];
        c[..vals.len()].copy_from_slice(&vals);
        let label = set.len() as u32;
        set.push(c, label);
    }
    set.ok_or(Error::NoPoints)
}

pub fn read_points(path: &Path, torus: bool) -> Result<PointSet> {
    parse_points(&fs::read_to_string(path)?, torus)
}

/// One point per line in shortest round-trip form, so re-reading gives the
/// identical doubles.
pub fn write_points<W: Write>(pts: &PointSet, mut out: W) -> Result<()> {
    for c in pts.coords() {
        let row: Vec<String> = c[..pts.dim()].iter().map(|x| format!("{x:?}")).collect();
        writeln!(out, "{}", row.join(" "))?;
    }
    Ok(())
}

/// Decimal with 9 significant digits; scientific outside `[1e-5, 1e9)`.
pub fn fmt9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    let e = x.abs().log10().floor() as i32;
    if !(-5..9).contains(&e) {
        return format!("{x:.8e}");
    }
    format!("{:.*}", (8 - e).max(0) as usize, x)
}

fn write_row<W: Write>(out: &mut W, row: &[f64]) -> Result<()> {
    let cells: Vec<String> = row.iter().map(|&x| fmt9(x)).collect();
    writeln!(out, "{}", cells.join(","))?;
    Ok(())
}

pub fn experiment_columns(dim: usize) -> Vec<&'static str> {
    let mut cols = vec!["eta", "alpha", "beta0_mean", "beta0_sem", "beta1_mean", "beta1_sem"];
    if dim == 3 {
        cols.extend(["beta2_mean", "beta2_sem"]);
    }
    cols.extend(["chi_mean", "chi_theory"]);
    cols
}

/// Grid means as CSV; `beta2` columns only in 3D.
pub fn write_experiment_csv<W: Write>(r: &AggregateResult, mut out: W) -> Result<()> {
    let d = r.dim();
    writeln!(out, "{}", experiment_columns(d).join(","))?;
    for p in &r.points {
        let mut row = vec![p.eta, p.alpha];
        for k in 0..d.min(3) {
            row.extend([p.betti[k].mean, p.betti[k].sem]);
        }
        row.extend([p.chi.mean, p.chi_theory]);
        write_row(&mut out, &row)?;
    }
    Ok(())
}

/// Signature steps: one row per breakpoint, `alpha,eta,beta0..beta_d`. The
/// intensity for `eta` is the recorded one, else the point count.
pub fn write_signature_csv<W: Write>(sig: &BettiSignature, mut out: W) -> Result<()> {
    let d = sig.dim();
    let lambda = sig.meta.lambda.unwrap_or(sig.meta.n_points as f64);
    let mut header = vec!["alpha".to_string(), "eta".to_string()];
    header.extend((0..=d).map(|k| format!("beta{k}")));
    writeln!(out, "{}", header.join(","))?;
    for a in sig.breakpoints() {
        let mut row = vec![fmt9(a), fmt9(eta_from_alpha(d, a, lambda)?)];
        row.extend(sig.eval(a).iter().map(|b| b.to_string()));
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

pub const ANALYTIC_COLUMNS: [&str; 5] = ["eta", "chi_over_lambda", "beta0_series", "beta1_leading", "beta2_leading"];

/// Reference curves on `etas`; `beta2_leading` is empty in 2D.
pub fn write_analytic_csv<W: Write>(dim: usize, etas: &[f64], mut out: W) -> Result<()> {
    writeln!(out, "{}", ANALYTIC_COLUMNS.join(","))?;
    for &eta in etas {
        let [chi, b0, b1, b2] = reference_row(dim, eta)?;
        let b2 = if dim == 3 { fmt9(b2) } else { String::new() };
        writeln!(out, "{},{},{},{},{}", fmt9(eta), fmt9(chi), fmt9(b0), fmt9(b1), b2)?;
    }
    Ok(())
}

/// Histogram bins as `lo,hi,density`.
pub fn write_histogram_csv<W: Write>(h: &AngleDensity, mut out: W) -> Result<()> {
    let AngleDensity::Histogram { edges, density } = h else {
        return Err(Error::invalid("only histograms can be written as bins"));
    };
    writeln!(out, "theta_lo,theta_hi,density")?;
    for (w, &p) in edges.windows(2).zip(density) {
        write_row(&mut out, &[w[0], w[1], p])?;
    }
    Ok(())
}

/// A parsed numeric CSV: header plus rows, empty cells read as NaN.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

pub fn parse_csv(text: &str) -> Result<Table> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "missing header".into(),
    })?;
    let columns: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
    let rows = lines
        .map(|(i, l)| {
            let row = l
                .split(',')
                .map(|s| match s.trim() {
                    "" => Ok(f64::NAN),
                    t => t.parse::<f64>().map_err(|_| Error::Parse {
                        line: i + 1,
                        message: format!("not a number: '{t}'"),
                    }),
                })
                .collect::<Result<Vec<f64>>>()?;
            if row.len() != columns.len() {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("expected {} fields, found {}", columns.len(), row.len()),
                });
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    Ok(Table { columns, rows })
}
