//! Periodic boundary conditions on the unit square / cube by translated
//! copies.
//!
//! The points are copied across the faces of the unit cube, the enlarged set
//! is triangulated, and one representative of every translation orbit of top
//! cells is kept: the one whose centroid lies in `[0, 1)^d`. The result is
//! re-indexed by the original labels, which identifies opposite faces of the
//! cube and yields a triangulated flat torus.

use crate::complex::{Shifts, SimplicialComplex, Topology, PAD};
use crate::delaunay::build_delaunay;
use crate::error::{Error, Result};
use crate::geometry::{circumsphere, Coord};
use crate::points::PointSet;

/// Below this many points the half-cube copies are not trusted and all
/// `3^d` translates are used.
pub const HALF_CUBE_MIN_POINTS: usize = 50;

/// Which copies were triangulated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Translation {
    /// `2^d` copies: each point shifted toward the far half of every axis.
    HalfCube,
    /// All `3^d` unit translates.
    Full,
}

impl Translation {
    /// Canonical circumspheres must stay strictly below this squared radius
    /// for the copies to cover every circumball.
    pub fn radius_sq_bound(self) -> f64 {
        match self {
            Translation::HalfCube => 0.0625,
            Translation::Full => 0.25,
        }
    }
}

/// A triangulated flat torus whose vertices are the original point labels.
#[derive(Clone, Debug)]
pub struct PeriodicComplex {
    pub complex: SimplicialComplex,
    pub translation: Translation,
    /// Number of points handed to the Delaunay builder.
    pub enlarged_size: usize,
    /// Largest squared circumradius over canonical top cells.
    pub max_radius_sq: f64,
    /// Set when the half-cube copies were abandoned for the full set.
    pub fallback: Option<String>,
}

/// Rounds a coordinate in `[0, 1)` down to the `2^-52` grid so that unit
/// translates are exact.
pub fn snap_to_grid(x: f64) -> f64 {
    (x / f64::EPSILON).floor() * f64::EPSILON
}

fn check_unit_cube(points: &PointSet) -> Result<()> {
    if points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    if !(2..=3).contains(&points.dim()) {
        return Err(Error::invalid(format!(
            "periodic complexes need d = 2 or 3, got {}",
            points.dim()
        )));
    }
    if !points.in_unit_cube() {
        return Err(Error::invalid("periodic input must lie in [0, 1)^d"));
    }
    Ok(())
}

/// Snapped coordinates indexed by label.
fn by_label(points: &PointSet) -> Vec<Coord> {
    let mut out = vec![[0.0; 3]; points.len()];
    for (c, &l) in snapped(points).coords().iter().zip(points.labels()) {
        out[l as usize] = *c;
    }
    out
}

fn snapped(points: &PointSet) -> PointSet {
    let dim = points.dim();
    let mut out = PointSet::new(dim);
    for (c, &l) in points.coords().iter().zip(points.labels()) {
        let mut s = *c;
        for x in s.iter_mut().take(dim) {
            *x = snap_to_grid(*x);
        }
        out.push(s, l);
    }
    match points.origin() {
        Some(o) => out.with_origin(o),
        None => out,
    }
}

/// Half-cube copies: on each axis a point with `x < 0.5` gains a copy at
/// `x + 1`, otherwise at `x - 1`; all `2^d` combinations are emitted, so the
/// output has exactly `2^d N` points, each labelled like its original.
pub fn translate_points(points: &PointSet) -> Result<PointSet> {
    check_unit_cube(points)?;
    let dim = points.dim();
    let pts = snapped(points);
    let mut out = PointSet::new(dim);
    for mask in 0..(1usize << dim) {
        for (c, &l) in pts.coords().iter().zip(pts.labels()) {
            let mut t = *c;
            for a in 0..dim {
                if mask >> a & 1 == 1 {
                    t[a] += if c[a] < 0.5 { 1.0 } else { -1.0 };
                }
            }
            out.push(t, l);
        }
    }
    Ok(out)
}

/// All `3^d` unit translates.
pub fn translate_points_full(points: &PointSet) -> Result<PointSet> {
    check_unit_cube(points)?;
    let dim = points.dim();
    let pts = snapped(points);
    let mut out = PointSet::new(dim);
    let total = 3usize.pow(dim as u32);
    for code in 0..total {
        let mut shift = [0.0; 3];
        let mut rest = code;
        for s in shift.iter_mut().take(dim) {
            // code 0 maps to the zero shift so originals come first
            *s = [0.0, 1.0, -1.0][rest % 3];
            rest /= 3;
        }
        for (c, &l) in pts.coords().iter().zip(pts.labels()) {
            let mut t = *c;
            for a in 0..dim {
                t[a] += shift[a];
            }
            out.push(t, l);
        }
    }
    Ok(out)
}

/// Periodic Delaunay complex of `points` (coordinates in `[0, 1)^d`, labels
/// `0..N`). Uses the half-cube copies when `N >= 50` and every canonical
/// circumradius is below 1/4; otherwise the full translate set.
pub fn periodic_delaunay(points: &PointSet, seed: u64) -> Result<PeriodicComplex> {
    check_unit_cube(points)?;
    let n = points.len();
    if n >= HALF_CUBE_MIN_POINTS {
        let enlarged = translate_points(points)?;
        match canonicalize(points, &enlarged, Translation::HalfCube, seed) {
            Ok(pc) => return Ok(pc),
            Err(e @ (Error::PeriodicIntegrity { .. } | Error::DegenerateInput(_))) => {
                let mut pc = canonicalize(
                    points,
                    &translate_points_full(points)?,
                    Translation::Full,
                    seed,
                )?;
                pc.fallback = Some(e.to_string());
                return Ok(pc);
            }
            Err(e) => return Err(e),
        }
    }
    let mut pc = canonicalize(points, &translate_points_full(points)?, Translation::Full, seed)?;
    pc.fallback = Some(format!("N = {n} is below {HALF_CUBE_MIN_POINTS}"));
    Ok(pc)
}

/// Triangulates `enlarged` (copies of `original`) and keeps one translate of
/// every top cell, then checks the closed-manifold counts.
pub fn canonicalize(
    original: &PointSet,
    enlarged: &PointSet,
    translation: Translation,
    seed: u64,
) -> Result<PeriodicComplex> {
    let dim = original.dim();
    let n = original.len();
    let mut sorted: Vec<u32> = original.labels().to_vec();
    sorted.sort_unstable();
    if sorted.iter().enumerate().any(|(i, &l)| l != i as u32) {
        return Err(Error::invalid("periodic input labels must be 0..N"));
    }
    let base = by_label(original);
    let dt = build_delaunay(enlarged, seed)?;
    let shift_of = |e: u32| -> [i8; 3] {
        let c = enlarged.coord(e as usize);
        let mut s = [0i8; 3];
        for a in 0..dim {
            s[a] = c[a].floor() as i8;
        }
        s
    };

    let mut cells = Vec::new();
    let mut shifts: Vec<Shifts> = Vec::new();
    let mut max_radius_sq: f64 = 0.0;
    for cell in dt.finite_cells() {
        let mut verts: Vec<(u32, [i8; 3])> = cell
            .iter()
            .map(|&e| (enlarged.labels()[e as usize], shift_of(e)))
            .collect();
        verts.sort_unstable_by_key(|v| v.0);
        let mut keep = true;
        for a in 0..dim {
            let s: i32 = verts.iter().map(|v| v.1[a] as i32).sum();
            // summed in label order so every translate sees the same value
            let x: f64 = verts.iter().map(|v| base[v.0 as usize][a]).sum();
            if !canonical_axis(dim, s, x) {
                keep = false;
                break;
            }
        }
        if !keep {
            continue;
        }
        let coords: Vec<Coord> = cell.iter().map(|&e| *enlarged.coord(e as usize)).collect();
        max_radius_sq = max_radius_sq.max(circumsphere(dim, &coords)?.radius_sq);
        let mut v = [PAD; 4];
        let mut sh = [[0i8; 3]; 4];
        for (j, (l, s)) in verts.into_iter().enumerate() {
            v[j] = l;
            sh[j] = s;
        }
        if v[..=dim].windows(2).any(|w| w[0] == w[1]) {
            let distinct = 1 + v[..=dim].windows(2).filter(|w| w[0] != w[1]).count();
            return Err(Error::PeriodicIntegrity {
                what: "distinct labels per cell",
                expected: dim + 1,
                found: distinct,
            });
        }
        cells.push(v);
        shifts.push(sh);
    }
    if !(max_radius_sq < translation.radius_sq_bound()) {
        return Err(Error::DegenerateInput(format!(
            "canonical circumradius^2 {max_radius_sq} exceeds the copy margin {}",
            translation.radius_sq_bound()
        )));
    }
    let mut keys = cells.clone();
    keys.sort_unstable();
    let unique = {
        keys.dedup();
        keys.len()
    };
    if unique != cells.len() {
        return Err(Error::PeriodicIntegrity {
            what: "distinct top cells",
            expected: cells.len(),
            found: unique,
        });
    }
    let topology = Topology::torus(dim)?;
    let complex = SimplicialComplex::from_top_cells(
        dim,
        topology,
        base,
        cells,
        Some(shifts),
    )?;
    check_torus(&complex, n)?;
    Ok(PeriodicComplex {
        complex,
        translation,
        enlarged_size: enlarged.len(),
        max_radius_sq,
        fallback: None,
    })
}

/// Whether a cell with vertex shifts summing to `shift_sum` and original
/// coordinates summing to `coord_sum` (along one axis) has its centroid in
/// `[0, 1)`. A centroid exactly on the far face belongs to the zero side.
pub fn canonical_axis(dim: usize, shift_sum: i32, coord_sum: f64) -> bool {
    (0..=dim as i32).contains(&(shift_sum + coord_sum.floor() as i32))
}

/// Closed-manifold counts of a triangulated torus with `n` vertices.
pub fn check_torus(c: &SimplicialComplex, n: usize) -> Result<()> {
    let fail = |what, expected, found| Err(Error::PeriodicIntegrity { what, expected, found });
    if c.count(0) != n {
        return fail("vertex labels present", n, c.count(0));
    }
    match c.dim() {
        2 => {
            if c.count(1) != 3 * n {
                return fail("edges = 3N", 3 * n, c.count(1));
            }
            if c.count(2) != 2 * n {
                return fail("triangles = 2N", 2 * n, c.count(2));
            }
        }
        _ => {
            let t = c.count(3);
            if c.count(2) != 2 * t {
                return fail("triangles = 2T", 2 * t, c.count(2));
            }
            if c.count(1) != n + t {
                return fail("edges = N + T", n + t, c.count(1));
            }
        }
    }
    let d = c.dim();
    for i in 0..c.count(d - 1) as u32 {
        let k = c.cofacets(d - 1, i).len();
        if k != 2 {
            return fail("cofacets per facet", 2, k);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poisson::{sample_points, RngSpec};

    fn labelled_cells(c: &SimplicialComplex) -> Vec<[u32; 4]> {
        c.simplices(c.dim()).to_vec()
    }

    #[test]
    fn single_point_copies() {
        let p = PointSet::from_coords(2, vec![[0.25, 0.25, 0.0]]);
        let t = translate_points(&p).unwrap();
        assert_eq!(t.len(), 4);
        let mut got: Vec<(f64, f64)> = t.coords().iter().map(|c| (c[0], c[1])).collect();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(got, vec![(0.25, 0.25), (0.25, 1.25), (1.25, 0.25), (1.25, 1.25)]);
        assert!(t.labels().iter().all(|&l| l == 0));
        assert!(matches!(
            translate_points(&PointSet::new(2)),
            Err(Error::EmptyPointSet)
        ));
    }

    #[test]
    fn copy_counts_3d() {
        let mut rng = RngSpec::new(1, 1).rng();
        let p = sample_points(100, 3, &mut rng);
        let t = translate_points(&p).unwrap();
        assert_eq!(t.len(), 800);
        let mut hist = vec![0; 100];
        for &l in t.labels() {
            hist[l as usize] += 1;
        }
        assert!(hist.iter().all(|&h| h == 8));
        assert_eq!(translate_points_full(&p).unwrap().len(), 2700);
    }

    #[test]
    fn torus_counts_2d() {
        for seed in 0..5 {
            let mut rng = RngSpec::new(seed, 0).rng();
            let p = sample_points(50 + 40 * seed as usize, 2, &mut rng);
            let pc = periodic_delaunay(&p, seed).unwrap();
            assert_eq!(pc.translation, Translation::HalfCube);
            let n = p.len();
            assert_eq!(pc.complex.counts(), vec![n, 3 * n, 2 * n]);
        }
    }

    #[test]
    fn torus_counts_3d() {
        let mut rng = RngSpec::new(77, 0).rng();
        let p = sample_points(300, 3, &mut rng);
        let pc = periodic_delaunay(&p, 3).unwrap();
        let c = &pc.complex;
        assert_eq!(c.count(2), 2 * c.count(3));
        assert_eq!(c.count(1), 300 + c.count(3));
        assert_eq!(c.euler_characteristic(), 0);
    }

    #[test]
    fn matches_full_translation_reference() {
        let mut half_cube_used = 0;
        for seed in 0..20u64 {
            let mut rng = RngSpec::new(1000 + seed, 0).rng();
            let n = 50 + (seed as usize * 23) % 451;
            let dim = if seed % 2 == 0 { 2 } else { 3 };
            let p = sample_points(n, dim, &mut rng);
            let pc = periodic_delaunay(&p, 5).unwrap();
            if pc.translation == Translation::HalfCube {
                half_cube_used += 1;
            }
            let full =
                canonicalize(&p, &translate_points_full(&p).unwrap(), Translation::Full, 5).unwrap();
            assert_eq!(labelled_cells(&pc.complex), labelled_cells(&full.complex));
        }
        assert!(half_cube_used >= 15, "half-cube copies used {half_cube_used}/20");
    }

    #[test]
    fn independent_of_origin() {
        // shifting the fundamental domain relabels nothing and must give the
        // same labelled complex
        let mut rng = RngSpec::new(31, 0).rng();
        let p = sample_points(120, 2, &mut rng);
        let reference = labelled_cells(&periodic_delaunay(&p, 0).unwrap().complex);
        let mut shift_rng = RngSpec::new(32, 0).rng();
        for _ in 0..10 {
            let off = [
                crate::poisson::unit_coordinate(&mut shift_rng),
                crate::poisson::unit_coordinate(&mut shift_rng),
            ];
            let mut moved = PointSet::new(2);
            for (c, &l) in p.coords().iter().zip(p.labels()) {
                let mut m = *c;
                for a in 0..2 {
                    m[a] += off[a];
                    if m[a] >= 1.0 {
                        m[a] -= 1.0;
                    }
                }
                moved.push(m, l);
            }
            let got = labelled_cells(&periodic_delaunay(&moved, 0).unwrap().complex);
            assert_eq!(got, reference);
        }
    }

    #[test]
    fn boundary_centroid_goes_to_zero_side() {
        // originals at x = 0.5, 0.25, 0.25; shifts summing to 2 put the
        // centroid at x = 1.0 exactly
        assert!(!canonical_axis(2, 2, 1.0));
        // the translate by -1 has centroid 0.0 and is the kept one
        assert!(canonical_axis(2, -1, 1.0));
        assert!(canonical_axis(2, 0, 1.0));
        // centroid 0.3 on the other axis
        assert!(canonical_axis(2, 0, 0.9));
        assert!(!canonical_axis(2, -1, 0.9));
    }

    #[test]
    fn small_inputs_use_full_translation() {
        let mut rng = RngSpec::new(5, 5).rng();
        let p = sample_points(30, 2, &mut rng);
        let pc = periodic_delaunay(&p, 1).unwrap();
        assert_eq!(pc.translation, Translation::Full);
        assert_eq!(pc.enlarged_size, 270);
        assert!(pc.fallback.is_some());
        assert_eq!(pc.complex.counts(), vec![30, 90, 60]);
    }
}
