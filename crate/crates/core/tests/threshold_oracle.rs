//! Alpha thresholds against a brute-force search over empty spheres.
//!
//! The centres of spheres through the vertices of `s` form a flat on which
//! the radius is minimal at the smallest circumcentre, and "no point inside"
//! cuts that flat by half-spaces. The smallest empty sphere is therefore the
//! smallest circumsphere of `s + extra` for some set of extra points, and it
//! is found by trying every such set whose smallest circumsphere is empty.

use betti_core::poisson::sample_points;
use betti_core::{alpha_thresholds, build_delaunay, Coord, RngSpec, SimplicialComplex};

/// Smallest circumsphere (centre, radius^2) of affinely independent points,
/// from the Gram system of the edge vectors.
fn smallest_sphere(dim: usize, p: &[Coord]) -> Option<(Coord, f64)> {
    let k = p.len() - 1;
    if k == 0 {
        return Some((p[0], 0.0));
    }
    let e: Vec<[f64; 3]> = (1..=k).map(|i| std::array::from_fn(|j| if j < dim { p[i][j] - p[0][j] } else { 0.0 })).collect();
    let dot = |a: &[f64; 3], b: &[f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    // G t = |e_i|^2 / 2
    let mut m: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            let mut row: Vec<f64> = (0..k).map(|j| dot(&e[i], &e[j])).collect();
            row.push(0.5 * dot(&e[i], &e[i]));
            row
        })
        .collect();
    let scale = m.iter().map(|r| r[r.len() - 1]).fold(0.0, f64::max);
    for c in 0..k {
        let piv = (c..k).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs()))?;
        if m[piv][c].abs() < 1e-9 * scale {
            return None;
        }
        m.swap(c, piv);
        for r in 0..k {
            if r != c {
                let f = m[r][c] / m[c][c];
                for j in c..=k {
                    m[r][j] -= f * m[c][j];
                }
            }
        }
    }
    let t: Vec<f64> = (0..k).map(|i| m[i][k] / m[i][i]).collect();
    let mut off = [0.0; 3];
    for i in 0..k {
        for j in 0..3 {
            off[j] += t[i] * e[i][j];
        }
    }
    let centre = std::array::from_fn(|j| p[0][j] + off[j]);
    Some((centre, dot(&off, &off)))
}

fn subsets(pool: &[usize], size: usize) -> Vec<Vec<usize>> {
    if size == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for (i, &x) in pool.iter().enumerate() {
        for mut rest in subsets(&pool[i + 1..], size - 1) {
            rest.insert(0, x);
            out.push(rest);
        }
    }
    out
}

fn brute_threshold_sq(dim: usize, pts: &[Coord], simplex: &[u32]) -> f64 {
    let others: Vec<usize> = (0..pts.len()).filter(|i| !simplex.contains(&(*i as u32))).collect();
    let mut best = f64::INFINITY;
    for extra in 0..=(dim + 1 - simplex.len()) {
        for s in subsets(&others, extra) {
            let members: Vec<Coord> = simplex.iter().map(|&v| pts[v as usize]).chain(s.iter().map(|&i| pts[i])).collect();
            let Some((c, r2)) = smallest_sphere(dim, &members) else { continue };
            let d2 = |q: &Coord| (0..dim).map(|j| (q[j] - c[j]).powi(2)).sum::<f64>();
            let empty = others.iter().filter(|i| !s.contains(i)).all(|&i| d2(&pts[i]) >= r2 * (1.0 - 1e-9));
            if empty {
                best = best.min(r2);
            }
        }
    }
    best
}

fn check(dim: usize, n: usize, stream: u64) -> usize {
    let set = sample_points(n, dim, &mut RngSpec::new(404, stream).rng());
    let c = SimplicialComplex::sphere_augmented(&build_delaunay(&set, stream).unwrap()).unwrap();
    let t = alpha_thresholds(&c).unwrap();
    let mut checked = 0;
    for k in 0..=dim {
        for i in 0..c.count(k) as u32 {
            if c.is_infinite(k, i) {
                assert_eq!(t.squared(k, i), f64::INFINITY);
                continue;
            }
            let want = brute_threshold_sq(dim, set.coords(), c.vertices(k, i));
            let got = t.squared(k, i);
            assert!(
                (got - want).abs() <= 1e-9 * want.max(1e-12),
                "d={dim} stream={stream} simplex {:?}: {got} vs {want}",
                c.vertices(k, i)
            );
            checked += 1;
        }
    }
    checked
}

#[test]
fn thresholds_2d() {
    for s in 0..20 {
        assert!(check(2, 8 + (s as usize % 10), s) > 0);
    }
}

#[test]
fn thresholds_3d() {
    for s in 0..15 {
        assert!(check(3, 7 + (s as usize % 8), s) > 0);
    }
}
