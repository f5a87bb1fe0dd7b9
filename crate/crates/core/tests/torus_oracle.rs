//! Small-eta Betti numbers on periodic complexes against GF(2) ranks. Below
//! the point where any cycle wraps around the torus the marks need no
//! correction, so the two must agree exactly.

use betti_core::analytic::alpha_from_eta;
use betti_core::poisson::sample_points;
use betti_core::verify::gf2_betti;
use betti_core::{alpha_thresholds, build_filtration, mark_filtration, periodic_delaunay, signature, RngSpec};

/// Returns the number of thresholds compared and the largest top-minus-one
/// Betti number seen.
fn compare(dim: usize, n: usize, eta_max: f64, stream: u64) -> (usize, i64) {
    let pts = sample_points(n, dim, &mut RngSpec::new(77, stream).rng());
    let pc = periodic_delaunay(&pts, stream).unwrap();
    let t = alpha_thresholds(&pc.complex).unwrap();
    let mf = mark_filtration(build_filtration(&pc.complex, &t).unwrap()).unwrap();
    let sig = signature(&mf);
    let a_max = if eta_max.is_finite() {
        alpha_from_eta(dim, eta_max, n as f64).unwrap()
    } else {
        f64::INFINITY
    };
    let (mut checked, mut most) = (0, 0);
    for &a2 in sig.breakpoints_sq().iter().filter(|&&a2| a2 <= a_max * a_max) {
        let b = sig.eval_sq(a2);
        assert_eq!(b, gf2_betti(&pc.complex, &t, a2), "d={dim} stream={stream} alpha^2={a2}");
        checked += 1;
        most = most.max(b[dim - 1]);
    }
    (checked, most)
}

#[test]
fn torus2_small_eta_matches_ranks() {
    for s in 0..3 {
        let (checked, loops) = compare(2, 400, 0.8, s);
        assert!(checked > 100 && loops > 0);
    }
}

/// In 2D every triangle but the last kills a 1-cycle, so the marks are
/// exact at every threshold, including the full torus.
#[test]
fn torus2_every_threshold_matches_ranks() {
    for s in 3..6 {
        let (checked, _) = compare(2, 150, f64::INFINITY, s);
        assert!(checked > 100);
    }
}

#[test]
fn torus3_small_eta_matches_ranks() {
    let mut voids = 0;
    for s in 0..3 {
        let (checked, most) = compare(3, 1000, 0.4, s);
        assert!(checked > 100);
        voids += most;
    }
    assert!(voids > 0);
}
