//! Independent checks: Betti numbers by GF(2) boundary-matrix ranks, and an
//! Euler-identity sweep over periodic complexes.

use std::collections::HashMap;

use rand::Rng;

use crate::betti::{check_euler, mark_filtration, signature};
use crate::complex::SimplicialComplex;
use crate::delaunay::build_delaunay;
use crate::error::Result;
use crate::filtration::{alpha_thresholds, build_filtration, AlphaThresholds};
use crate::periodic::periodic_delaunay;
use crate::poisson::{sample_points, RngSpec};

/// Rank over GF(2) of a set of columns given as sorted row indices.
pub fn gf2_rank(columns: &[Vec<usize>], rows: usize) -> usize {
    let words = rows.div_ceil(64);
    let mut pivots: HashMap<usize, Vec<u64>> = HashMap::new();
    let mut rank = 0;
    for col in columns {
        let mut bits = vec![0u64; words];
        for &r in col {
            bits[r / 64] ^= 1 << (r % 64);
        }
        loop {
            let Some(low) = highest_bit(&bits) else { break };
            match pivots.get(&low) {
                Some(p) => {
                    for (b, q) in bits.iter_mut().zip(p) {
                        *b ^= q;
                    }
                }
                None => {
                    pivots.insert(low, bits);
                    rank += 1;
                    break;
                }
            }
        }
    }
    rank
}

fn highest_bit(bits: &[u64]) -> Option<usize> {
    bits.iter()
        .enumerate()
        .rev()
        .find(|(_, &w)| w != 0)
        .map(|(i, &w)| i * 64 + 63 - w.leading_zeros() as usize)
}

/// Betti numbers of the sublevel complex `{sigma : alpha_T(sigma)^2 <=
/// alpha_sq}` from ranks of its boundary matrices. Faces are looked up by
/// vertex tuple, not through the complex's adjacency.
pub fn gf2_betti(c: &SimplicialComplex, t: &AlphaThresholds, alpha_sq: f64) -> Vec<i64> {
    let d = c.dim();
    let mut simplices: Vec<Vec<&[u32]>> = vec![Vec::new(); d + 1];
    for (k, level) in simplices.iter_mut().enumerate() {
        for i in 0..c.count(k) as u32 {
            if t.squared(k, i) <= alpha_sq {
                level.push(c.vertices(k, i));
            }
        }
    }
    let index: Vec<HashMap<&[u32], usize>> = simplices
        .iter()
        .map(|l| l.iter().enumerate().map(|(i, s)| (*s, i)).collect())
        .collect();
    let mut ranks = vec![0usize; d + 2];
    for k in 1..=d {
        let columns: Vec<Vec<usize>> = simplices[k]
            .iter()
            .map(|s| {
                let mut rows: Vec<usize> = (0..s.len())
                    .map(|j| {
                        let face: Vec<u32> =
                            s.iter().enumerate().filter(|&(t, _)| t != j).map(|(_, &v)| v).collect();
                        *index[k - 1]
                            .get(face.as_slice())
                            .expect("sublevel sets are closed under faces")
                    })
                    .collect();
                rows.sort_unstable();
                rows
            })
            .collect();
        ranks[k] = gf2_rank(&columns, simplices[k - 1].len());
    }
    (0..=d)
        .map(|k| simplices[k].len() as i64 - ranks[k] as i64 - ranks[k + 1] as i64)
        .collect()
}

/// Result of comparing the incremental signature with the GF(2) ranks at
/// every distinct finite threshold.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OracleReport {
    pub thresholds_checked: usize,
    pub mismatches: Vec<(f64, Vec<i64>, Vec<i64>)>,
}

/// Oracle comparison on the sphere-augmented Delaunay complex of `pts`.
pub fn oracle_compare(pts: &crate::points::PointSet, seed: u64) -> Result<OracleReport> {
    let dt = build_delaunay(pts, seed)?;
    let c = SimplicialComplex::sphere_augmented(&dt)?;
    let t = alpha_thresholds(&c)?;
    let mf = mark_filtration(build_filtration(&c, &t)?)?;
    let sig = signature(&mf);
    check_euler(&mf, &sig, &[])?;
    let mut levels: Vec<f64> = mf
        .filtration()
        .entries()
        .iter()
        .map(|e| e.alpha_sq)
        .filter(|a| a.is_finite())
        .collect();
    levels.dedup();
    let mut report = OracleReport::default();
    for a in levels {
        let want = gf2_betti(&c, &t, a);
        let got = sig.eval_sq(a);
        report.thresholds_checked += 1;
        if want != got {
            report.mismatches.push((a.sqrt(), got, want));
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, Default)]
pub struct SuiteReport {
    pub instances: usize,
    pub thresholds_checked: usize,
    pub mismatched_instances: Vec<(usize, u64, usize)>,
    pub euler_checked: usize,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.mismatched_instances.is_empty()
    }
}

/// Random small instances (`d + 2 ..= max_n` points, both dimensions) against
/// the GF(2) oracle, followed by an Euler-identity sweep over periodic
/// complexes. Instance `i` of dimension `d` uses stream `2 i + d - 2`.
pub fn run_suite(instances: usize, max_n: usize, seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::default();
    for dim in [2usize, 3] {
        for i in 0..instances {
            let stream = (2 * i + dim - 2) as u64;
            let mut rng = RngSpec::new(seed, stream).rng();
            let lo = dim + 2;
            let n = rng.random_range(lo..=max_n.max(lo));
            let pts = sample_points(n, dim, &mut rng);
            let r = oracle_compare(&pts, stream)?;
            report.instances += 1;
            report.thresholds_checked += r.thresholds_checked;
            if !r.mismatches.is_empty() {
                report
                    .mismatched_instances
                    .push((dim, stream, r.mismatches.len()));
            }
        }
    }
    for dim in [2usize, 3] {
        for i in 0..4u64 {
            let spec = RngSpec::new(seed, 1_000_000 + 2 * i + dim as u64);
            let pts = sample_points(100 + 50 * i as usize, dim, &mut spec.rng());
            let pc = periodic_delaunay(&pts, spec.stream_index)?;
            let t = alpha_thresholds(&pc.complex)?;
            let mf = mark_filtration(build_filtration(&pc.complex, &t)?)?;
            check_euler(&mf, &signature(&mf), &[])?;
            report.euler_checked += 1;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::points::PointSet;

    #[test]
    fn rank_examples() {
        assert_eq!(gf2_rank(&[vec![0, 1], vec![1, 2], vec![0, 2]], 3), 2);
        assert_eq!(gf2_rank(&[vec![0], vec![1], vec![2]], 3), 3);
        assert_eq!(gf2_rank(&[vec![], vec![70, 130]], 131), 1);
    }

    #[test]
    fn square_by_ranks() {
        let pts = PointSet::from_coords(
            2,
            vec![[0., 0., 0.], [1., 0., 0.], [1., 1., 0.], [0., 1., 0.]],
        );
        let c = SimplicialComplex::sphere_augmented(&build_delaunay(&pts, 0).unwrap()).unwrap();
        let t = alpha_thresholds(&c).unwrap();
        assert_eq!(gf2_betti(&c, &t, 0.25), vec![1, 1, 0]);
        assert_eq!(gf2_betti(&c, &t, 0.5), vec![1, 0, 0]);
        assert_eq!(gf2_betti(&c, &t, f64::INFINITY), vec![1, 0, 1]);
        let r = oracle_compare(&pts, 0).unwrap();
        assert!(r.mismatches.is_empty());
    }

    #[test]
    fn small_suite_passes() {
        let r = run_suite(5, 15, 9).unwrap();
        assert!(r.passed(), "{:?}", r.mismatched_instances);
        assert_eq!(r.instances, 10);
        assert_eq!(r.euler_checked, 8);
    }
}
