//! Reference curves for the Poisson-Boolean model: expected Euler
//! characteristic, low-density cluster expansions of the component count, and
//! leading-order Betti asymptotics. All densities are per unit volume and
//! divided by the intensity, as functions of the reduced density
//! `eta = omega_d alpha^d lambda`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// A named number with where it comes from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Constant {
    pub name: &'static str,
    pub value: f64,
    pub source: &'static str,
}

/// 2D continuum percolation threshold of discs.
pub const ETA_C: f64 = 1.1280586;
/// 3D threshold above which the balls percolate.
pub const ETA_1: f64 = 0.341889;
/// 3D threshold above which the uncovered space stops percolating.
pub const ETA_2: f64 = 3.5032;
/// Intensity of Poisson-Delaunay triangles per unit point intensity in 2D.
pub const TRIANGLE_INTENSITY_2D: f64 = 2.0;
/// Second-derivative constant of the Meijer-G combination in the 3D
/// triangle-loop integral, quoted to five significant digits.
pub const MEIJER_A: f64 = 13.8564;

/// Intensity of Poisson-Delaunay faces per unit point intensity in 3D.
pub fn face_intensity_3d() -> f64 {
    48.0 * PI * PI / 35.0
}

/// Intensity of Poisson-Delaunay tetrahedra per unit point intensity.
pub fn tet_intensity_3d() -> f64 {
    24.0 * PI * PI / 35.0
}

/// Smallest possible largest face-normal/vertex angle of a tetrahedron.
pub fn theta_0() -> f64 {
    (1.0f64 / 3.0).acos()
}

pub fn constants() -> Vec<Constant> {
    vec![
        Constant { name: "omega_1", value: 2.0, source: "length of the unit 1-ball" },
        Constant { name: "omega_2", value: PI, source: "area of the unit disc" },
        Constant { name: "omega_3", value: 4.0 * PI / 3.0, source: "volume of the unit ball" },
        Constant {
            name: "eta_c",
            value: ETA_C,
            source: "2D disc percolation threshold (Quintanilla, Torquato, Ziff 2000)",
        },
        Constant {
            name: "eta_1",
            value: ETA_1,
            source: "3D ball percolation threshold (Lorenz, Ziff 2001)",
        },
        Constant {
            name: "eta_2",
            value: ETA_2,
            source: "3D void percolation threshold (Rintoul 2000)",
        },
        Constant {
            name: "lambda_2_2d",
            value: TRIANGLE_INTENSITY_2D,
            source: "Poisson-Delaunay triangles per point in the plane",
        },
        Constant {
            name: "lambda_2_3d",
            value: face_intensity_3d(),
            source: "Poisson-Delaunay faces per point in space, 48 pi^2 / 35",
        },
        Constant {
            name: "lambda_3_3d",
            value: tet_intensity_3d(),
            source: "Poisson-Delaunay tetrahedra per point in space, 24 pi^2 / 35",
        },
        Constant { name: "theta_0", value: theta_0(), source: "arccos(1/3), 70.53 degrees" },
        Constant {
            name: "A",
            value: MEIJER_A,
            source: "second derivative at Z = 0 of 6 Z^3 M1(Z^2) + Z^3 M2(Z^2), quoted value",
        },
    ]
}

/// Volume of the unit d-ball.
pub fn omega(d: usize) -> Result<f64> {
    match d {
        1 => Ok(2.0),
        2 => Ok(PI),
        3 => Ok(4.0 * PI / 3.0),
        _ => Err(Error::invalid(format!("no unit-ball volume for d = {d}"))),
    }
}

pub fn eta_from_alpha(d: usize, alpha: f64, lambda: f64) -> Result<f64> {
    Ok(omega(d)? * alpha.powi(d as i32) * lambda)
}

pub fn alpha_from_eta(d: usize, eta: f64, lambda: f64) -> Result<f64> {
    Ok((eta / (omega(d)? * lambda)).powf(1.0 / d as f64))
}

/// Where a series comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm,
    /// Cluster-integral expansions (Quintanilla and Torquato 1996).
    Table,
    Quadrature,
}

/// Polynomial in eta, coefficients from eta^0 upward.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesExpansion {
    pub coefficients: Vec<f64>,
    pub validity: &'static str,
    pub provenance: Provenance,
}

impl SeriesExpansion {
    pub fn eval(&self, eta: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, c| acc * eta + c)
    }

    pub fn coefficient(&self, j: usize) -> f64 {
        self.coefficients.get(j).copied().unwrap_or(0.0)
    }
}

/// Expected Euler characteristic per point, `E chi / lambda`. In 1D the
/// argument is `2 alpha lambda`.
pub fn euler_density(d: usize, eta: f64) -> Result<f64> {
    if !(eta >= 0.0) {
        return Err(Error::invalid(format!("eta must be >= 0, got {eta}")));
    }
    let e = (-eta).exp();
    match d {
        1 => Ok(e),
        2 => Ok((1.0 - eta) * e),
        3 => Ok((1.0 - 3.0 * eta + 3.0 * PI * PI / 32.0 * eta * eta) * e),
        _ => Err(Error::invalid(format!("no Euler density for d = {d}"))),
    }
}

/// Taylor coefficients of [`euler_density`] up to eta^j_max.
pub fn euler_density_taylor(d: usize, j_max: usize) -> Result<Vec<f64>> {
    let poly: Vec<f64> = match d {
        1 => vec![1.0],
        2 => vec![1.0, -1.0],
        3 => vec![1.0, -3.0, 3.0 * PI * PI / 32.0],
        _ => return Err(Error::invalid(format!("no Euler density for d = {d}"))),
    };
    let mut exp = vec![0.0; j_max + 1];
    let mut fact = 1.0;
    for (j, e) in exp.iter_mut().enumerate() {
        if j > 0 {
            fact *= j as f64;
        }
        *e = if j % 2 == 0 { 1.0 } else { -1.0 } / fact;
    }
    Ok((0..=j_max)
        .map(|j| (0..=j.min(poly.len() - 1)).map(|i| poly[i] * exp[j - i]).sum())
        .collect())
}

const RHO_2D: [[f64; 5]; 5] = [
    [1.0, -4.0, 8.0, -10.6667, 10.6667],
    [0.0, 2.0, -11.3079, 32.2915, -62.0415],
    [0.0, 0.0, 4.8720, -35.3346, 129.6895],
    [0.0, 0.0, 0.0, 13.022, -114.823],
    [0.0, 0.0, 0.0, 0.0, 36.728],
];

const RHO_3D: [[f64; 5]; 5] = [
    [1.0, -8.0, 32.0, -85.3333, 170.6667],
    [0.0, 4.0, -49.0, 302.2238, -1250.5030],
    [0.0, 0.0, 22.0, -359.4203, 2959.1209],
    [0.0, 0.0, 0.0, 139.7867, -2842.60],
    [0.0, 0.0, 0.0, 0.0, 964.68],
];

/// Low-density expansion of the k-mer density `rho_k / lambda`.
pub fn rho_k_series(d: usize, k: usize) -> Result<SeriesExpansion> {
    let table = match d {
        2 => &RHO_2D,
        3 => &RHO_3D,
        _ => return Err(Error::invalid(format!("no k-mer table for d = {d}"))),
    };
    if !(1..=5).contains(&k) {
        return Err(Error::NotTabulated { k });
    }
    Ok(SeriesExpansion {
        coefficients: table[k - 1].to_vec(),
        validity: "eta -> 0",
        provenance: Provenance::Table,
    })
}

/// Truncated component-count expansion `E beta_0 / lambda` as tabulated
/// (the column sums of the k-mer tables).
pub fn beta0_series(d: usize) -> Result<SeriesExpansion> {
    let (coefficients, validity) = match d {
        2 => (vec![1.0, -2.0, 1.5641, -0.6878, 0.2197], "eta < 0.5"),
        3 => (vec![1.0, -4.0, 5.0, -2.7431, 1.3646], "eta < 0.3"),
        _ => return Err(Error::invalid(format!("no beta_0 expansion for d = {d}"))),
    };
    Ok(SeriesExpansion {
        coefficients,
        validity,
        provenance: Provenance::Table,
    })
}

pub fn beta0_value(d: usize, eta: f64) -> Result<f64> {
    Ok(beta0_series(d)?.eval(eta))
}

/// `(coefficient, power)` of the leading small-eta term of `E beta_k /
/// lambda`.
pub fn leading_term(d: usize, k: usize) -> Result<(f64, i32)> {
    match (d, k) {
        (2, 1) => Ok((0.0640, 2)),
        (3, 1) => Ok((0.5747, 2)),
        (3, 2) => Ok((0.015, 3)),
        _ => Err(Error::NoAsymptotic { dim: d, k }),
    }
}

pub fn betti_leading(d: usize, k: usize, eta: f64) -> Result<f64> {
    let (c, p) = leading_term(d, k)?;
    Ok(c * eta.powi(p))
}

/// The closed form of the 3D eta^2 coefficient of `E beta_1 / lambda`:
/// `(sqrt 3 A / 64)(4 - pi^2 / 4)`.
pub fn beta1_coeff_3d_closed(a: f64) -> f64 {
    3f64.sqrt() * a / 64.0 * (4.0 - PI * PI / 4.0)
}

/// One row of reference curves at `eta`: chi, beta_0 series, beta_1 and
/// beta_2 leading terms (zero where the term is identically zero).
pub fn reference_row(d: usize, eta: f64) -> Result<[f64; 4]> {
    let chi = euler_density(d, eta)?;
    match d {
        1 => Ok([chi, chi, 0.0, 0.0]),
        2 => Ok([chi, beta0_value(2, eta)?, betti_leading(2, 1, eta)?, 0.0]),
        3 => Ok([
            chi,
            beta0_value(3, eta)?,
            betti_leading(3, 1, eta)?,
            betti_leading(3, 2, eta)?,
        ]),
        _ => Err(Error::invalid(format!("no reference curves for d = {d}"))),
    }
}
