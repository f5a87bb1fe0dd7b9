//! Poisson-Delaunay cells: closed-form shape densities, the triangle-loop
//! probability series in 2D and 3D, and the sampled largest
//! face-normal/vertex angle that feeds the small-eta void coefficient.

use std::f64::consts::PI;

use rand::RngCore;
use rayon::prelude::*;

use crate::analytic::{beta1_coeff_3d_closed, face_intensity_3d, tet_intensity_3d, theta_0, MEIJER_A, TRIANGLE_INTENSITY_2D};
use crate::delaunay::build_delaunay;
use crate::error::{Error, Result};
use crate::geometry::{circumsphere, Coord};
use crate::points::PointSet;
use crate::poisson::unit_coordinate;
use crate::quadrature::{integrate, integrate_with_breaks};

/// Largest vertex angle of a Poisson-Delaunay triangle, on `[pi/3, pi)`.
pub fn fmax_phi_2d(phi: f64) -> f64 {
    if !(PI / 3.0..PI).contains(&phi) {
        return 0.0;
    }
    if phi < PI / 2.0 {
        2.0 / PI * ((3.0 * phi - PI) * (2.0 * phi).sin() - (2.0 * phi).cos() + (4.0 * phi).cos())
    } else {
        4.0 / PI * (phi.sin() + (PI - phi) * phi.cos()) * phi.sin()
    }
}

/// Largest vertex angle of a typical face of a 3D Poisson-Delaunay
/// tetrahedron, on `[pi/3, pi]`.
pub fn fmax_phi_3d_face(phi: f64) -> f64 {
    if !(PI / 3.0..=PI).contains(&phi) {
        return 0.0;
    }
    let (s, c) = phi.sin_cos();
    let s2 = s * s;
    let k = 8.0 / (PI * PI) * s2;
    if phi < PI / 2.0 {
        k * ((3.0 * phi - PI) * (3.0 - 2.0 * s2) - (9.0 - 16.0 * s2 * s2) * s * c)
    } else {
        k * ((PI - phi) * (3.0 - 2.0 * s2) + 3.0 * c * s)
    }
}

/// Typical face-normal/vertex angle of a 3D Poisson-Delaunay tetrahedron.
pub fn f_typical_theta(theta: f64) -> f64 {
    if !(0.0..=PI).contains(&theta) {
        return 0.0;
    }
    105.0 / 128.0 * theta.sin().powi(5) * (1.0 + theta.cos()).powi(2)
}

/// Circumradius of a 2D Poisson-Delaunay triangle.
pub fn f_r_2d(r: f64, lambda: f64) -> f64 {
    if r < 0.0 {
        return 0.0;
    }
    2.0 * (PI * lambda).powi(2) * r.powi(3) * (-PI * lambda * r * r).exp()
}

/// Circumradius of a 3D Poisson-Delaunay tetrahedron.
pub fn f_r_3d(r: f64, lambda: f64) -> f64 {
    if r < 0.0 {
        return 0.0;
    }
    32.0 * PI.powi(3) * lambda.powi(3) / 9.0 * r.powi(8) * (-4.0 * PI * lambda / 3.0 * r.powi(3)).exp()
}

/// Radial marginal of the general m-dimensional cell density
/// `~ r^(m^2 - 1) exp(-lambda omega_m r^m)`, normalised:
/// `m (lambda omega_m)^m / Gamma(m)`.
pub fn miles_radial_density(m: usize, lambda: f64, r: f64) -> Result<f64> {
    let omega = crate::analytic::omega(m)?;
    let gamma_m: f64 = (1..m).map(|i| i as f64).product();
    let mm = m as i32;
    Ok(m as f64 * (lambda * omega).powi(mm) / gamma_m
        * r.powi(mm * mm - 1)
        * (-lambda * omega * r.powi(mm)).exp())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DensityKind {
    FmaxPhi2d,
    FmaxPhi3dFace,
    FTypicalTheta,
    FR2d,
    FR3d,
}

/// A probability density on an interval: a closed form or a histogram.
#[derive(Clone, Debug, PartialEq)]
pub enum AngleDensity {
    Closed { kind: DensityKind, lo: f64, hi: f64 },
    Histogram { edges: Vec<f64>, density: Vec<f64> },
}

/// Looks a closed-form density up by name (`fmax_phi_2d`,
/// `fmax_phi_3d_face`, `f_typical_theta`, `f_R_2d`, `f_R_3d`); radial
/// densities use unit intensity.
pub fn closed_form_density(name: &str) -> Result<AngleDensity> {
    let (kind, lo, hi) = match name {
        "fmax_phi_2d" => (DensityKind::FmaxPhi2d, PI / 3.0, PI),
        "fmax_phi_3d_face" => (DensityKind::FmaxPhi3dFace, PI / 3.0, PI),
        "f_typical_theta" => (DensityKind::FTypicalTheta, 0.0, PI),
        "f_R_2d" => (DensityKind::FR2d, 0.0, f64::INFINITY),
        "f_R_3d" => (DensityKind::FR3d, 0.0, f64::INFINITY),
        _ => return Err(Error::UnknownDensity(name.to_string())),
    };
    Ok(AngleDensity::Closed { kind, lo, hi })
}

impl AngleDensity {
    pub fn domain(&self) -> (f64, f64) {
        match self {
            AngleDensity::Closed { lo, hi, .. } => (*lo, *hi),
            AngleDensity::Histogram { edges, .. } => (edges[0], edges[edges.len() - 1]),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            AngleDensity::Closed { kind, .. } => match kind {
                DensityKind::FmaxPhi2d => fmax_phi_2d(x),
                DensityKind::FmaxPhi3dFace => fmax_phi_3d_face(x),
                DensityKind::FTypicalTheta => f_typical_theta(x),
                DensityKind::FR2d => f_r_2d(x, 1.0),
                DensityKind::FR3d => f_r_3d(x, 1.0),
            },
            AngleDensity::Histogram { edges, density } => {
                if x < edges[0] || x >= edges[edges.len() - 1] {
                    return 0.0;
                }
                let i = edges.partition_point(|&e| e <= x) - 1;
                density[i]
            }
        }
    }

    /// Total mass (quadrature for closed forms, exact for histograms).
    pub fn total_mass(&self) -> Result<f64> {
        match self {
            AngleDensity::Closed { lo, hi, .. } => {
                let hi = if hi.is_finite() { *hi } else { 6.0 };
                let mid = 0.5 * (lo + hi);
                Ok(integrate_with_breaks(|x| self.eval(x), &[*lo, mid, hi], 1e-12, 0.0)?.value)
            }
            AngleDensity::Histogram { edges, density } => Ok(edges
                .windows(2)
                .zip(density)
                .map(|(w, d)| (w[1] - w[0]) * d)
                .sum()),
        }
    }
}

/// Coefficients of eta^2 .. eta^J of the 2D triangle-loop probability:
/// `((-1)^(j-1) (j-1) / j!) * int_{pi/3}^{pi/2} (1 - sin^-2j) f_max`.
pub fn p_triangle_series_2d(j_max: usize) -> Result<Vec<f64>> {
    if !(2..=6).contains(&j_max) {
        return Err(Error::invalid(format!("series order must be in 2..=6, got {j_max}")));
    }
    (2..=j_max)
        .map(|j| {
            let integral = integrate(
                |phi: f64| (1.0 - phi.sin().powi(-2 * j as i32)) * fmax_phi_2d(phi),
                PI / 3.0,
                PI / 2.0,
                1e-12,
                0.0,
            )?
            .value;
            let fact: f64 = (1..=j).map(|i| i as f64).product();
            let sign = if (j - 1) % 2 == 0 { 1.0 } else { -1.0 };
            Ok(sign * (j - 1) as f64 / fact * integral)
        })
        .collect()
}

/// Leading coefficient of `E beta_1 / lambda` in 2D: triangle intensity
/// times the eta^2 coefficient of the triangle-loop probability.
pub fn beta1_coeff_2d() -> Result<f64> {
    Ok(TRIANGLE_INTENSITY_2D * p_triangle_series_2d(2)?[0])
}

/// 3D triangle-loop probability at reduced density `eta` (unit intensity):
/// `int_phi int_rho int_theta f_max(phi) f_R(rho / sin theta) f_Theta(theta)
/// / sin theta`, with `rho` between `alpha` and `alpha / sin phi`.
pub fn p_triangle_3d(eta: f64) -> Result<f64> {
    let alpha = (3.0 * eta / (4.0 * PI)).cbrt();
    let theta_integral = |rho: f64| -> Result<f64> {
        // the mass sits near theta ~ rho; resolve it with geometric breaks
        let mut breaks = vec![0.0];
        let mut t = rho / 8.0;
        while t < PI / 2.0 {
            breaks.push(t);
            t *= 2.0;
        }
        breaks.extend([PI / 2.0, PI]);
        let f = |theta: f64| {
            let s = theta.sin();
            if s <= 0.0 {
                return 0.0;
            }
            f_r_3d(rho / s, 1.0) * f_typical_theta(theta) / s
        };
        Ok(integrate_with_breaks(f, &breaks, 0.0, 1e-11)?.value)
    };
    let rho_integral = |phi: f64| -> Result<f64> {
        let hi = alpha / phi.sin();
        if hi <= alpha {
            return Ok(0.0);
        }
        let err = std::cell::Cell::new(None);
        let q = integrate(
            |rho| {
                theta_integral(rho).unwrap_or_else(|e| {
                    err.set(Some(e));
                    0.0
                })
            },
            alpha,
            hi,
            0.0,
            1e-10,
        )?;
        if let Some(e) = err.take() {
            return Err(e);
        }
        Ok(q.value)
    };
    let err = std::cell::Cell::new(None);
    let q = integrate(
        |phi| {
            fmax_phi_3d_face(phi)
                * rho_integral(phi).unwrap_or_else(|e| {
                    err.set(Some(e));
                    0.0
                })
        },
        PI / 3.0,
        PI / 2.0,
        0.0,
        1e-9,
    )?;
    if let Some(e) = err.take() {
        return Err(e);
    }
    Ok(q.value)
}

/// Reduced densities used by the numeric route.
pub const NUMERIC_ROUTE_ETAS: [f64; 3] = [1e-2, 0.003_162_277_660_168_379_4, 1e-3];

#[derive(Clone, Debug, PartialEq)]
pub struct Asymptotics3d {
    /// `(sqrt 3 A / 64)(4 - pi^2 / 4)` with the reference constant `A`.
    pub closed: f64,
    /// Face intensity times the eta^2 prefactor of the numeric route.
    pub numeric: f64,
    /// Free slope of log P against log eta.
    pub slope: f64,
    /// `(eta, P(eta))` samples.
    pub samples: Vec<(f64, f64)>,
}

impl Asymptotics3d {
    pub fn relative_gap(&self) -> f64 {
        (self.numeric - self.closed).abs() / self.closed
    }
}

/// The 3D eta^2 coefficient of `E beta_1 / lambda`, by the closed form and by
/// the numeric limit of [`p_triangle_3d`]. The prefactor of the numeric
/// route is the intercept of a log-log fit with slope fixed at 2; the free
/// slope is reported alongside. Routes further than 1% apart are an error.
pub fn p_triangle_coeff_3d() -> Result<Asymptotics3d> {
    let samples: Vec<(f64, f64)> = NUMERIC_ROUTE_ETAS
        .iter()
        .map(|&eta| Ok((eta, p_triangle_3d(eta)?)))
        .collect::<Result<_>>()?;
    let logs: Vec<(f64, f64)> = samples.iter().map(|&(e, p)| (e.ln(), p.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|l| l.0).sum::<f64>() / n;
    let my = logs.iter().map(|l| l.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|l| (l.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|l| (l.0 - mx) * (l.1 - my)).sum();
    let slope = sxy / sxx;
    let prefactor = (my - 2.0 * mx).exp();
    let report = Asymptotics3d {
        closed: beta1_coeff_3d_closed(MEIJER_A),
        numeric: face_intensity_3d() * prefactor,
        slope,
        samples,
    };
    if report.relative_gap() > 0.01 {
        return Err(Error::AsymptoticsMismatch {
            closed: report.closed,
            numeric: report.numeric,
        });
    }
    Ok(report)
}

/// Radius and the four face-normal/vertex angles of one tetrahedron.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TetSample {
    pub radius: f64,
    pub theta: [f64; 4],
}

impl TetSample {
    pub fn theta_max(&self) -> f64 {
        self.theta.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Clone, Debug)]
pub struct PdcSamples {
    pub tets: Vec<TetSample>,
    pub n_points: usize,
    pub margin: f64,
    /// Points inside the margin-reduced box.
    pub interior_points: usize,
}

impl PdcSamples {
    /// Tetrahedra per point inside the sampling window.
    pub fn tets_per_point(&self) -> f64 {
        self.tets.len() as f64 / self.interior_points as f64
    }

    pub fn typical_angles(&self) -> Vec<f64> {
        self.tets.iter().flat_map(|t| t.theta).collect()
    }

    pub fn max_angles(&self) -> Vec<f64> {
        self.tets.iter().map(TetSample::theta_max).collect()
    }
}

/// Angle between the outward normal of each face and the ray from the
/// circumcentre to a vertex of that face; face `i` is opposite vertex `i`.
pub fn tet_angles(v: &[Coord; 4]) -> Result<TetSample> {
    let sphere = circumsphere(3, v)?;
    let r = sphere.radius();
    let sub = |a: &Coord, b: &Coord| [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    let dot = |a: &[f64; 3], b: &[f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let mut theta = [0.0; 4];
    for (i, t) in theta.iter_mut().enumerate() {
        let f: Vec<&Coord> = (0..4).filter(|&j| j != i).map(|j| &v[j]).collect();
        let e1 = sub(f[1], f[0]);
        let e2 = sub(f[2], f[0]);
        let mut n = [
            e1[1] * e2[2] - e1[2] * e2[1],
            e1[2] * e2[0] - e1[0] * e2[2],
            e1[0] * e2[1] - e1[1] * e2[0],
        ];
        if dot(&n, &sub(&v[i], f[0])) > 0.0 {
            n = [-n[0], -n[1], -n[2]];
        }
        let len = dot(&n, &n).sqrt();
        let cos = dot(&n, &sub(f[0], &sphere.center)) / (len * r);
        *t = cos.clamp(-1.0, 1.0).acos();
    }
    Ok(TetSample { radius: r, theta })
}

/// Delaunay tetrahedra of `n_points` uniform points in `[-1, 1]^3` whose
/// circumcentres are at least `margin` from the boundary.
pub fn sample_pdc<R: RngCore + ?Sized>(n_points: usize, margin: f64, rng: &mut R) -> Result<PdcSamples> {
    if !(margin > 0.0 && margin < 1.0) {
        return Err(Error::invalid(format!("margin must lie in (0, 1), got {margin}")));
    }
    if n_points < MIN_PDC_POINTS {
        return Err(Error::invalid(format!(
            "need at least {MIN_PDC_POINTS} points, got {n_points}"
        )));
    }
    let mut pts = PointSet::new(3);
    for i in 0..n_points {
        let mut c = [0.0; 3];
        for x in c.iter_mut() {
            *x = 2.0 * unit_coordinate(rng) - 1.0;
        }
        pts.push(c, i as u32);
    }
    let dt = build_delaunay(&pts, rng.next_u64())?;
    let bound = 1.0 - margin;
    let inside = |c: &Coord| c.iter().all(|x| x.abs() <= bound);
    let cells: Vec<[Coord; 4]> = dt
        .finite_cells()
        .map(|c| {
            let mut v = [[0.0; 3]; 4];
            for (j, &i) in c.iter().enumerate() {
                v[j] = *pts.coord(i as usize);
            }
            v
        })
        .collect();
    let tets: Vec<TetSample> = cells
        .par_iter()
        .map(|v| -> Result<Option<TetSample>> {
            let s = circumsphere(3, v)?;
            if !inside(&s.center) {
                return Ok(None);
            }
            Ok(Some(tet_angles(v)?))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    if tets.len() < 1000 {
        return Err(Error::TooFewTetrahedra(tets.len()));
    }
    let interior_points = pts.coords().iter().filter(|c| inside(c)).count();
    Ok(PdcSamples {
        tets,
        n_points,
        margin,
        interior_points,
    })
}

/// Histogram bin width for angle densities: half a degree.
pub fn default_bin_width() -> f64 {
    0.5f64.to_radians()
}

/// Normalised histogram of `values` with bin edges at multiples of `width`
/// covering `[lo, hi]`.
pub fn histogram(values: &[f64], lo: f64, hi: f64, width: f64) -> AngleDensity {
    let first = (lo / width).floor() as i64;
    let last = (hi / width).ceil() as i64;
    let edges: Vec<f64> = (first..=last).map(|k| k as f64 * width).collect();
    let mut counts = vec![0u64; edges.len() - 1];
    for &v in values {
        let i = ((v / width).floor() as i64 - first).clamp(0, counts.len() as i64 - 1);
        counts[i as usize] += 1;
    }
    let n = values.len() as f64;
    let density = counts
        .iter()
        .zip(edges.windows(2))
        .map(|(&c, w)| c as f64 / (n * (w[1] - w[0])))
        .collect();
    AngleDensity::Histogram { edges, density }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Beta2Estimate {
    /// `int_{theta_0}^{pi/2} f_max (sin^-9 - 1)` from the histogram.
    pub integral: f64,
    /// Same integral as a plain sample mean (no binning).
    pub integral_unbinned: f64,
    /// `(24 pi^2 / 35) I / 6`.
    pub coefficient: f64,
    pub histogram: AngleDensity,
    pub samples: usize,
}

/// The eta^3 coefficient of `E beta_2 / lambda` from sampled largest angles.
/// Each half-degree bin contributes its sample fraction times the integrand
/// at the midpoint of the part of the bin inside `[theta_0, pi/2]`.
pub fn beta2_coeff_3d(samples: &PdcSamples) -> Result<Beta2Estimate> {
    beta2_coeff_3d_binned(samples, default_bin_width())
}

/// [`beta2_coeff_3d`] with a chosen bin width in radians.
pub fn beta2_coeff_3d_binned(samples: &PdcSamples, width: f64) -> Result<Beta2Estimate> {
    if !(width > 0.0 && width < 0.5) {
        return Err(Error::invalid(format!("bin width must lie in (0, 0.5) rad, got {width}")));
    }
    let t0 = theta_0();
    let maxes = samples.max_angles();
    if maxes.is_empty() {
        return Err(Error::InvalidSample("no tetrahedra".into()));
    }
    // allow for rounding in acos near the regular tetrahedron
    if let Some(bad) = maxes.iter().find(|&&t| t < t0 - 1e-9 || t > PI) {
        return Err(Error::InvalidSample(format!(
            "largest angle {bad} outside [theta_0, pi]"
        )));
    }
    let hist = histogram(&maxes, t0, PI, width);
    let g = |t: f64| t.sin().powi(-9) - 1.0;
    let integral = match &hist {
        AngleDensity::Histogram { edges, density } => edges
            .windows(2)
            .zip(density)
            .map(|(w, &d)| {
                let a = w[0].max(t0);
                let b = w[1].min(PI / 2.0);
                if b <= a {
                    return 0.0;
                }
                // mass of the bin, all of which lies at or above theta_0
                d * (w[1] - w[0]) * g(0.5 * (a + b))
            })
            .sum(),
        AngleDensity::Closed { .. } => unreachable!(),
    };
    let n = maxes.len() as f64;
    let integral_unbinned = maxes
        .iter()
        .filter(|&&t| t < PI / 2.0)
        .map(|&t| g(t))
        .sum::<f64>()
        / n;
    Ok(Beta2Estimate {
        integral,
        integral_unbinned,
        coefficient: tet_intensity_3d() * integral / 6.0,
        histogram: hist,
        samples: maxes.len(),
    })
}

/// Cumulative distribution of [`f_typical_theta`], in closed form via
/// `u = cos theta`: `(105/128) int_{cos theta}^1 (1 - u)^2 (1 + u)^4 du`.
pub fn typical_theta_cdf(theta: f64) -> f64 {
    // (1 - u)^2 (1 + u)^4 expanded in powers of u
    let p = [1.0, 2.0, -1.0, -4.0, -1.0, 2.0, 1.0];
    let anti = |u: f64| {
        p.iter()
            .enumerate()
            .map(|(k, c)| c * u.powi(k as i32 + 1) / (k + 1) as f64)
            .sum::<f64>()
    };
    let u = theta.clamp(0.0, PI).cos();
    105.0 / 128.0 * (anti(1.0) - anti(u))
}

/// Kolmogorov-Smirnov distance between a sample and a continuous CDF.
pub fn ks_distance<F: Fn(f64) -> f64>(values: &[f64], cdf: F) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Which reference void number a computed coefficient supports. The reference
/// area 0.0023 would give ~0.0026 if taken as `I`; read as `I / 6` it gives
/// ~0.015 again.
pub fn supported_reference_value(coefficient: f64) -> &'static str {
    let from_area = tet_intensity_3d() * 0.0023 / 6.0;
    if (coefficient / from_area).ln().abs() < (coefficient / 0.015).ln().abs() {
        "area 0.0023 taken as I (coefficient ~0.0026)"
    } else {
        "coefficient 0.015 (area 0.0023 matches I/6)"
    }
}

/// Minimum point count accepted by [`sample_pdc`].
pub const MIN_PDC_POINTS: usize = 10_000;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poisson::RngSpec;

    #[test]
    fn closed_forms_normalised() {
        for name in ["fmax_phi_2d", "fmax_phi_3d_face", "f_typical_theta", "f_R_2d", "f_R_3d"] {
            let d = closed_form_density(name).unwrap();
            assert!((d.total_mass().unwrap() - 1.0).abs() < 1e-8, "{name}");
        }
        assert!(matches!(closed_form_density("nope"), Err(Error::UnknownDensity(_))));
    }

    #[test]
    fn endpoint_values() {
        assert!(fmax_phi_2d(PI / 3.0).abs() < 1e-15);
        assert!(fmax_phi_3d_face(PI / 3.0).abs() < 1e-14);
        // both branches meet at 4 / pi
        for f in [fmax_phi_2d, fmax_phi_3d_face] {
            let below = f(PI / 2.0 - 1e-12);
            let at = f(PI / 2.0);
            assert!((below - 4.0 / PI).abs() < 1e-9);
            assert!((at - 4.0 / PI).abs() < 1e-12);
        }
    }

    #[test]
    fn miles_radial_marginals() {
        for m in [2, 3] {
            let q = integrate(|r| miles_radial_density(m, 1.0, r).unwrap(), 0.0, 5.0, 1e-12, 0.0).unwrap();
            assert!((q.value - 1.0).abs() < 1e-9);
        }
        for r in [0.1, 0.5, 1.3] {
            assert!((miles_radial_density(2, 2.5, r).unwrap() - f_r_2d(r, 2.5)).abs() < 1e-12);
            assert!((miles_radial_density(3, 2.5, r).unwrap() - f_r_3d(r, 2.5)).abs() < 1e-12);
        }
    }

    #[test]
    fn triangle_series_2d() {
        let c = p_triangle_series_2d(4).unwrap();
        assert!((c[0] - 0.03200).abs() < 1e-4, "{c:?}");
        assert!((c[1] + 0.03422).abs() < 1e-4, "{c:?}");
        assert!((c[2] - 0.01835).abs() < 1e-4, "{c:?}");
        assert!((beta1_coeff_2d().unwrap() - 0.0640).abs() < 2e-4);
        // alternating and shrinking
        assert!(c[0] > 0.0 && c[1] < 0.0 && c[2] > 0.0);
        assert!(c[2].abs() < c[1].abs());
        assert!(p_triangle_series_2d(7).is_err());
    }

    #[test]
    fn sin6_moment_identity() {
        let q = integrate(
            |p: f64| (p.sin().powi(-6) - 1.0) * fmax_phi_3d_face(p),
            PI / 3.0,
            PI / 2.0,
            1e-13,
            0.0,
        )
        .unwrap();
        assert!((q.value - (4.0 / (PI * PI) - 0.25)).abs() < 1e-11);
    }

    /// Independent form: integrate the radius analytically,
    /// `int f_R = G(alpha / (sin theta sin phi)) - G(alpha / sin theta)`.
    fn p_triangle_3d_reduced(eta: f64) -> f64 {
        let alpha = (3.0 * eta / (4.0 * PI)).cbrt();
        let g_plus_one = |r: f64| {
            let x = 4.0 * PI / 3.0 * r.powi(3);
            -(-x).exp_m1() - (x * x / 2.0 + x) * (-x).exp()
        };
        integrate(
            |phi: f64| {
                let inner = integrate_with_breaks(
                    |t: f64| {
                        let s = t.sin();
                        if s <= 0.0 {
                            return 0.0;
                        }
                        f_typical_theta(t) * (g_plus_one(alpha / (s * phi.sin())) - g_plus_one(alpha / s))
                    },
                    &[0.0, alpha / 4.0, alpha, 4.0 * alpha, PI / 2.0, PI],
                    1e-16,
                    1e-11,
                )
                .unwrap()
                .value;
                fmax_phi_3d_face(phi) * inner
            },
            PI / 3.0,
            PI / 2.0,
            0.0,
            1e-10,
        )
        .unwrap()
        .value
    }

    #[test]
    fn triple_integral_matches_reduced_form() {
        for eta in [1e-2, 1e-3] {
            let a = p_triangle_3d(eta).unwrap();
            let b = p_triangle_3d_reduced(eta);
            assert!(((a - b) / b).abs() < 1e-7, "{a} vs {b}");
        }
    }

    #[test]
    fn coefficient_3d_routes_agree() {
        let r = p_triangle_coeff_3d().unwrap();
        assert!((r.closed - 0.5747).abs() < 1e-4);
        assert!(r.relative_gap() < 0.01);
        assert!((r.numeric - 0.5747).abs() / 0.5747 < 0.01);
        assert!((r.slope - 2.0).abs() < 0.02);
    }

    #[test]
    fn regular_tetrahedron_angles() {
        let k = 1.0;
        let v = [[k, k, k], [k, -k, -k], [-k, k, -k], [-k, -k, k]];
        let s = tet_angles(&v).unwrap();
        for t in s.theta {
            assert!((t - theta_0()).abs() < 1e-12);
        }
        assert!((s.radius - 3f64.sqrt()).abs() < 1e-12);
        // a flattened tetrahedron has its centre outside: some angle > pi/2
        let flat = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.3, 0.3, 0.05]];
        assert!(tet_angles(&flat).unwrap().theta_max() > PI / 2.0);
    }

    #[test]
    fn typical_cdf_matches_quadrature() {
        for t in [0.3, 1.0, 2.0, PI] {
            let q = integrate(f_typical_theta, 0.0, t, 1e-13, 0.0).unwrap().value;
            assert!((typical_theta_cdf(t) - q).abs() < 1e-12);
        }
    }

    #[test]
    fn small_sample_properties() {
        let mut rng = RngSpec::new(5, 0).rng();
        let s = sample_pdc(20_000, 0.2, &mut rng).unwrap();
        assert!(s.max_angles().iter().all(|&t| t >= theta_0() - 1e-9));
        let ratio = s.tets_per_point();
        assert!((ratio - tet_intensity_3d()).abs() / tet_intensity_3d() < 0.03, "{ratio}");
        let ks = ks_distance(&s.typical_angles(), typical_theta_cdf);
        assert!(ks < 0.02, "ks {ks}");
        let est = beta2_coeff_3d(&s).unwrap();
        assert!((est.integral - est.integral_unbinned).abs() < 0.1 * est.integral_unbinned);
        assert!(s.tets.len() >= 1000);
        assert_eq!(supported_reference_value(0.0155), "coefficient 0.015 (area 0.0023 matches I/6)");
        assert!(supported_reference_value(0.0027).starts_with("area"));
    }

    #[test]
    fn split_sample_integrals_agree() {
        let a = sample_pdc(60_000, 0.2, &mut RngSpec::new(11, 0).rng()).unwrap();
        let b = sample_pdc(60_000, 0.2, &mut RngSpec::new(11, 1).rng()).unwrap();
        let ia = beta2_coeff_3d(&a).unwrap().integral;
        let ib = beta2_coeff_3d(&b).unwrap().integral;
        assert!((ia - ib).abs() / ia.max(ib) < 0.05, "{ia} vs {ib}");
    }

    #[test]
    fn too_few_tetrahedra() {
        let mut rng = RngSpec::new(5, 1).rng();
        assert!(matches!(sample_pdc(10_000, 0.97, &mut rng), Err(Error::TooFewTetrahedra(_))));
        assert!(matches!(sample_pdc(100, 0.2, &mut rng), Err(Error::InvalidParameter(_))));
        assert!(sample_pdc(10_000, 1.0, &mut rng).is_err());
    }

    #[test]
    fn histogram_normalised() {
        let h = histogram(&[0.1, 0.2, 0.21, 1.0], 0.0, 1.2, 0.05);
        assert!((h.total_mass().unwrap() - 1.0).abs() < 1e-12);
        assert!(h.eval(0.205) > 0.0);
    }
}
