//! Exact-sign predicates and circumspheres for simplices in two and three
//! dimensions.
//!
//! `orient` and `in_sphere` delegate to Shewchuk's adaptive-precision
//! expansions (the `robust` crate): a floating-point filter with a certified
//! error bound that escalates to exact arithmetic only when the filter cannot
//! decide. Circumspheres are solved in floating point with a conditioning
//! guard that falls back to exact rational arithmetic for slivers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use robust::{Coord as C2, Coord3D as C3};

use crate::error::{Error, Result};

/// A point in up to three dimensions. Unused trailing components are zero.
pub type Coord = [f64; 3];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    #[inline]
    pub fn of(x: f64) -> Sign {
        if x > 0.0 {
            Sign::Positive
        } else if x < 0.0 {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    pub fn as_i32(self) -> i32 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    #[inline]
    pub fn flip(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }

    #[inline]
    pub fn times(self, other: Sign) -> Sign {
        match other {
            Sign::Positive => self,
            Sign::Negative => self.flip(),
            Sign::Zero => Sign::Zero,
        }
    }
}

#[inline]
fn c2(p: &Coord) -> C2<f64> {
    C2 { x: p[0], y: p[1] }
}

#[inline]
fn c3(p: &Coord) -> C3<f64> {
    C3 {
        x: p[0],
        y: p[1],
        z: p[2],
    }
}

/// Sign of the signed area of `(a, b, c)`; positive when counterclockwise.
#[inline]
pub fn orient2d(a: &Coord, b: &Coord, c: &Coord) -> Sign {
    Sign::of(robust::orient2d(c2(a), c2(b), c2(c)))
}

/// Sign of `det[b - a, c - a, d - a]`; the standard simplex
/// `(0,0,0), (1,0,0), (0,1,0), (0,0,1)` is positive.
#[inline]
pub fn orient3d(a: &Coord, b: &Coord, c: &Coord, d: &Coord) -> Sign {
    // Shewchuk's convention is the opposite of the right-hand determinant.
    Sign::of(-robust::orient3d(c3(a), c3(b), c3(c), c3(d)))
}

/// Orientation of a full-dimensional simplex given as `dim + 1` points.
pub fn orient(dim: usize, points: &[Coord]) -> Sign {
    match dim {
        2 => orient2d(&points[0], &points[1], &points[2]),
        3 => orient3d(&points[0], &points[1], &points[2], &points[3]),
        _ => panic!("orient is defined for d = 2, 3"),
    }
}

/// In-sphere test assuming `simplex` is positively oriented: positive when
/// `q` lies strictly inside the circumsphere.
#[inline]
pub(crate) fn in_sphere_oriented(dim: usize, s: &[Coord], q: &Coord) -> Sign {
    match dim {
        2 => Sign::of(robust::incircle(c2(&s[0]), c2(&s[1]), c2(&s[2]), c2(q))),
        // robust::insphere expects its own positive orientation, which is our
        // negative one.
        3 => Sign::of(-robust::insphere(
            c3(&s[0]),
            c3(&s[1]),
            c3(&s[2]),
            c3(&s[3]),
            c3(q),
        )),
        _ => panic!("in_sphere is defined for d = 2, 3"),
    }
}

/// `+1` if `q` is strictly inside the circumsphere of the `dim`-simplex, `0`
/// if on it, `-1` if outside. Independent of the vertex order.
pub fn in_sphere(dim: usize, simplex: &[Coord], q: &Coord) -> Result<Sign> {
    let o = orient(dim, simplex);
    if o == Sign::Zero {
        return Err(Error::FlatSimplex);
    }
    Ok(in_sphere_oriented(dim, simplex, q).times(o))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Circumsphere {
    pub center: Coord,
    pub radius_sq: f64,
}

impl Circumsphere {
    pub fn radius(&self) -> f64 {
        self.radius_sq.sqrt()
    }
}

#[inline]
pub fn dist_sq(dim: usize, a: &Coord, b: &Coord) -> f64 {
    (0..dim).map(|i| (a[i] - b[i]) * (a[i] - b[i])).sum()
}

// Below this ratio of |det| to the Hadamard bound the floating solve is not
// trusted.
const CONDITION_GUARD: f64 = 1e-10;

/// Smallest sphere through the `k + 1` vertices of a `k`-simplex embedded in
/// `dim` dimensions (`k <= dim`). The centre lies in the affine hull of the
/// vertices.
pub fn circumsphere(dim: usize, simplex: &[Coord]) -> Result<Circumsphere> {
    let k = simplex.len() - 1;
    assert!(k <= dim && (1..=3).contains(&dim));
    let v0 = simplex[0];
    if k == 0 {
        return Ok(Circumsphere {
            center: v0,
            radius_sq: 0.0,
        });
    }
    let mut rows = [[0.0f64; 3]; 3];
    for i in 0..k {
        for c in 0..dim {
            rows[i][c] = simplex[i + 1][c] - v0[c];
        }
    }
    if let Some(offset) = solve_offset_f64(dim, k, &rows) {
        let mut center = v0;
        for c in 0..dim {
            center[c] += offset[c];
        }
        let radius_sq = (0..dim).map(|c| offset[c] * offset[c]).sum();
        return Ok(Circumsphere { center, radius_sq });
    }
    circumsphere_exact(dim, simplex)
}

/// Offset `x = c - v0` from the first vertex to the circumcentre, or `None`
/// when the system is too ill-conditioned for floating point.
fn solve_offset_f64(dim: usize, k: usize, rows: &[[f64; 3]; 3]) -> Option<[f64; 3]> {
    let norm_sq = |r: &[f64; 3]| (0..dim).map(|c| r[c] * r[c]).sum::<f64>();
    if k == dim {
        // 2 a_i . x = |a_i|^2
        let mut m = [[0.0; 4]; 3];
        let mut bound = 1.0;
        for i in 0..k {
            for c in 0..dim {
                m[i][c] = rows[i][c];
            }
            let n2 = norm_sq(&rows[i]);
            m[i][dim] = 0.5 * n2;
            bound *= n2.sqrt();
        }
        let (x, det) = gauss_f64(k, &mut m)?;
        if !(det.abs() > CONDITION_GUARD * bound) {
            return None;
        }
        let mut out = [0.0; 3];
        out[..dim].copy_from_slice(&x[..dim]);
        Some(out)
    } else {
        // Normal equations in the affine hull: x = sum t_j a_j,
        // (a_i . a_j) t_j = |a_i|^2 / 2.
        let mut m = [[0.0; 4]; 3];
        let mut bound = 1.0;
        for i in 0..k {
            for j in 0..k {
                m[i][j] = (0..dim).map(|c| rows[i][c] * rows[j][c]).sum();
            }
            m[i][k] = 0.5 * m[i][i];
            bound *= m[i][i];
        }
        let (t, det) = gauss_f64(k, &mut m)?;
        if !(det.abs() > CONDITION_GUARD * bound) {
            return None;
        }
        let mut out = [0.0; 3];
        for j in 0..k {
            for c in 0..dim {
                out[c] += t[j] * rows[j][c];
            }
        }
        Some(out)
    }
}

/// Gaussian elimination with partial pivoting on an augmented `n x (n+1)`
/// system. Returns the solution and the determinant.
fn gauss_f64(n: usize, m: &mut [[f64; 4]; 3]) -> Option<([f64; 3], f64)> {
    let mut det = 1.0;
    for col in 0..n {
        let piv = (col..n).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[piv][col] == 0.0 {
            return None;
        }
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        det *= m[col][col];
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for c in col..=n {
                m[r][c] -= f * m[col][c];
            }
        }
    }
    let mut x = [0.0; 3];
    for r in (0..n).rev() {
        let mut s = m[r][n];
        for c in r + 1..n {
            s -= m[r][c] * x[c];
        }
        x[r] = s / m[r][r];
    }
    Some((x, det))
}

fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite coordinate")
}

/// Exact rational circumsphere; the result is rounded once at the end.
pub(crate) fn circumsphere_exact(dim: usize, simplex: &[Coord]) -> Result<Circumsphere> {
    let k = simplex.len() - 1;
    let v0: Vec<BigRational> = (0..dim).map(|c| rat(simplex[0][c])).collect();
    let rows: Vec<Vec<BigRational>> = (1..=k)
        .map(|i| (0..dim).map(|c| rat(simplex[i][c]) - &v0[c]).collect())
        .collect();
    let dot = |a: &[BigRational], b: &[BigRational]| {
        a.iter()
            .zip(b)
            .fold(BigRational::zero(), |acc, (x, y)| acc + x * y)
    };
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let mut m: Vec<Vec<BigRational>> = (0..k)
        .map(|i| {
            let mut row: Vec<BigRational> = (0..k).map(|j| dot(&rows[i], &rows[j])).collect();
            row.push(&half * dot(&rows[i], &rows[i]));
            row
        })
        .collect();
    for col in 0..k {
        let piv = (col..k)
            .find(|&r| !m[r][col].is_zero())
            .ok_or(Error::DegenerateSimplex)?;
        m.swap(piv, col);
        for r in col + 1..k {
            let f = &m[r][col] / &m[col][col];
            for c in col..=k {
                let sub = &f * &m[col][c];
                m[r][c] -= sub;
            }
        }
    }
    let mut t = vec![BigRational::zero(); k];
    for r in (0..k).rev() {
        let mut s = m[r][k].clone();
        for c in r + 1..k {
            s -= &m[r][c] * &t[c];
        }
        t[r] = s / &m[r][r];
    }
    let mut center = [0.0; 3];
    let mut radius_sq = BigRational::zero();
    for c in 0..dim {
        let off = (0..k).fold(BigRational::zero(), |acc, j| acc + &t[j] * &rows[j][c]);
        radius_sq += &off * &off;
        center[c] = (&v0[c] + &off).to_f64().unwrap_or(f64::NAN);
    }
    Ok(Circumsphere {
        center,
        radius_sq: radius_sq.to_f64().unwrap_or(f64::NAN),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Coord {
        [x, y, 0.0]
    }

    #[test]
    fn orientation_examples() {
        assert_eq!(orient2d(&p(0., 0.), &p(1., 0.), &p(0., 1.)), Sign::Positive);
        assert_eq!(orient2d(&p(0., 0.), &p(1., 0.), &p(2., 0.)), Sign::Zero);
        let t = [[0., 0., 0.], [1., 0., 0.], [0., 1., 0.], [0., 0., 1.]];
        assert_eq!(orient(3, &t), Sign::Positive);
        let t2 = [t[1], t[0], t[2], t[3]];
        assert_eq!(orient(3, &t2), Sign::Negative);
    }

    #[test]
    fn in_sphere_examples() {
        let tri = [p(0., 0.), p(1., 0.), p(0., 1.)];
        assert_eq!(in_sphere(2, &tri, &p(1., 1.)).unwrap(), Sign::Zero);
        assert_eq!(in_sphere(2, &tri, &p(0.5, 0.5)).unwrap(), Sign::Positive);
        assert_eq!(in_sphere(2, &tri, &p(2., 2.)).unwrap(), Sign::Negative);
        // vertex order does not matter
        let cw = [tri[0], tri[2], tri[1]];
        assert_eq!(in_sphere(2, &cw, &p(0.5, 0.5)).unwrap(), Sign::Positive);
        let flat = [p(0., 0.), p(1., 0.), p(2., 0.)];
        assert!(matches!(in_sphere(2, &flat, &p(0., 1.)), Err(Error::FlatSimplex)));
    }

    #[test]
    fn in_sphere_3d_orientation_independent() {
        let t = [[0., 0., 0.], [1., 0., 0.], [0., 1., 0.], [0., 0., 1.]];
        let inside = [0.25, 0.25, 0.25];
        let outside = [2., 2., 2.];
        let on = [1., 1., 1.];
        for s in [t, [t[1], t[0], t[2], t[3]]] {
            assert_eq!(in_sphere(3, &s, &inside).unwrap(), Sign::Positive);
            assert_eq!(in_sphere(3, &s, &outside).unwrap(), Sign::Negative);
            assert_eq!(in_sphere(3, &s, &on).unwrap(), Sign::Zero);
        }
    }

    #[test]
    fn circumsphere_examples() {
        let h = 3f64.sqrt() / 2.0;
        let eq = [p(0., 0.), p(1., 0.), p(0.5, h)];
        let cs = circumsphere(2, &eq).unwrap();
        assert!((cs.radius() - 1.0 / 3f64.sqrt()).abs() < 1e-12);

        let edge = [p(0.2, 0.3), p(1.2, 0.3)];
        let cs = circumsphere(2, &edge).unwrap();
        assert!((cs.radius() - 0.5).abs() < 1e-15);
        assert!((cs.center[0] - 0.7).abs() < 1e-15 && (cs.center[1] - 0.3).abs() < 1e-15);

        let s = 1.0;
        let tet = [
            [0., 0., 0.],
            [s, 0., 0.],
            [s / 2., s * 3f64.sqrt() / 2., 0.],
            [s / 2., s * 3f64.sqrt() / 6., s * (2.0f64 / 3.0).sqrt()],
        ];
        let cs = circumsphere(3, &tet).unwrap();
        assert!((cs.radius() - 6f64.sqrt() / 4.0).abs() < 1e-12);
        // triangle face in 3D: the centre stays in the face's plane
        let face = circumsphere(3, &tet[..3]).unwrap();
        assert!(face.center[2].abs() < 1e-15);
        assert!((face.radius() - 1.0 / 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn degenerate_circumsphere() {
        let collinear = [p(0., 0.), p(1., 0.), p(2., 0.)];
        assert!(matches!(
            circumsphere(2, &collinear),
            Err(Error::DegenerateSimplex)
        ));
        let dup = [[0.1, 0.2, 0.3], [0.1, 0.2, 0.3]];
        assert!(matches!(circumsphere(3, &dup), Err(Error::DegenerateSimplex)));
    }

    #[test]
    fn exact_fallback_on_sliver() {
        // nearly flat triangle: the floating solve is rejected by the guard
        let h = 1e-12;
        let sliver = [p(0., 0.), p(1., 0.), p(0.5, h)];
        let fast = circumsphere(2, &sliver).unwrap();
        let exact = circumsphere_exact(2, &sliver).unwrap();
        assert_eq!(fast, exact);
        // R = (1/4 + h^2) / (2h)
        let r = (0.25 + h * h) / (2.0 * h);
        assert!((fast.radius() - r).abs() / r < 1e-12);
    }
}
