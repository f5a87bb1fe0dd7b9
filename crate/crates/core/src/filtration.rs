//! Alpha thresholds and the filtration order.
//!
//! Thresholds are kept squared. A top cell enters at its circumradius. A lower
//! simplex whose smallest circumsphere holds no vertex of any cofacet
//! (a Gabriel simplex) enters at its own smallest radius, otherwise it enters
//! with the earliest of its cofacets.

use std::io::Write;

use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};
use crate::geometry::{circumsphere, dist_sq, Coord};

/// Relative slack tolerated when a face's threshold exceeds a coface's.
pub const MONOTONE_TOLERANCE: f64 = 1e-12;

/// Squared alpha threshold per simplex, indexed like the complex.
#[derive(Clone, Debug)]
pub struct AlphaThresholds {
    sq: Vec<Vec<f64>>,
}

impl AlphaThresholds {
    pub fn squared(&self, k: usize, i: u32) -> f64 {
        self.sq[k][i as usize]
    }

    pub fn alpha(&self, k: usize, i: u32) -> f64 {
        self.squared(k, i).sqrt()
    }

    pub fn dim_slice(&self, k: usize) -> &[f64] {
        &self.sq[k]
    }
}

/// Computes the squared alpha threshold of every simplex.
pub fn alpha_thresholds(c: &SimplicialComplex) -> Result<AlphaThresholds> {
    let d = c.dim();
    let mut sq: Vec<Vec<f64>> = vec![Vec::new(); d + 1];
    sq[d] = (0..c.count(d) as u32)
        .map(|i| {
            if c.is_infinite(d, i) {
                Ok(f64::INFINITY)
            } else {
                Ok(circumsphere(d, &c.embedded(d, i)[..=d])?.radius_sq)
            }
        })
        .collect::<Result<_>>()?;

    for k in (0..d).rev() {
        let mut level = Vec::with_capacity(c.count(k));
        for i in 0..c.count(k) as u32 {
            let cof = c.cofacets(k, i);
            let inherited = cof
                .iter()
                .map(|&t| sq[k + 1][t as usize])
                .fold(f64::INFINITY, f64::min);
            if c.is_infinite(k, i) {
                level.push(f64::INFINITY);
                continue;
            }
            if k == 0 {
                level.push(0.0);
                continue;
            }
            let own = c.embedded(k, i);
            let sphere = circumsphere(d, &own[..=k])?;
            let verts = c.vertices(k, i);
            let mut gabriel = true;
            for &t in cof {
                if c.is_infinite(k + 1, t) {
                    continue;
                }
                let frame = c.embedded(k + 1, t);
                let tv = c.vertices(k + 1, t);
                // frame offset between sigma's own embedding and this cofacet's
                let at = tv.iter().position(|x| *x == verts[0]).unwrap();
                let mut offset = [0.0; 3];
                for a in 0..d {
                    offset[a] = frame[at][a] - own[0][a];
                }
                let opp = tv.iter().position(|x| !verts.contains(x)).unwrap();
                let mut q: Coord = frame[opp];
                for a in 0..d {
                    q[a] -= offset[a];
                }
                if dist_sq(d, &q, &sphere.center) < sphere.radius_sq {
                    gabriel = false;
                    break;
                }
            }
            let mut value = if gabriel { sphere.radius_sq } else { inherited };
            if value > inherited {
                if value - inherited <= MONOTONE_TOLERANCE * inherited {
                    value = inherited;
                } else {
                    return Err(Error::ThresholdMonotonicity(format!(
                        "{k}-simplex {:?} has {value} above its cofacet's {inherited}",
                        verts
                    )));
                }
            }
            level.push(value);
        }
        sq[k] = level;
    }
    Ok(AlphaThresholds { sq })
}

/// One filtration slot.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Entry {
    pub dim: u8,
    pub id: u32,
    pub alpha_sq: f64,
}

impl Entry {
    pub fn alpha(&self) -> f64 {
        self.alpha_sq.sqrt()
    }
}

/// Simplices ordered by (threshold, dimension, vertex tuple).
#[derive(Clone, Debug)]
pub struct Filtration<'c> {
    complex: &'c SimplicialComplex,
    entries: Vec<Entry>,
    position: Vec<Vec<u32>>,
}

/// Sorts the simplices of `c` into filtration order and checks that every
/// face precedes each of its cofaces.
pub fn build_filtration<'c>(
    c: &'c SimplicialComplex,
    thresholds: &AlphaThresholds,
) -> Result<Filtration<'c>> {
    let d = c.dim();
    let mut entries = Vec::with_capacity(c.total());
    for k in 0..=d {
        for i in 0..c.count(k) as u32 {
            entries.push(Entry {
                dim: k as u8,
                id: i,
                alpha_sq: thresholds.squared(k, i),
            });
        }
    }
    // ids within a dimension are already in vertex-tuple order
    entries.sort_unstable_by(|a, b| {
        a.alpha_sq
            .total_cmp(&b.alpha_sq)
            .then(a.dim.cmp(&b.dim))
            .then(a.id.cmp(&b.id))
    });
    let mut position: Vec<Vec<u32>> = (0..=d).map(|k| vec![0; c.count(k)]).collect();
    for (p, e) in entries.iter().enumerate() {
        position[e.dim as usize][e.id as usize] = p as u32;
    }
    for (p, e) in entries.iter().enumerate() {
        let k = e.dim as usize;
        if k == 0 {
            continue;
        }
        for &f in c.faces(k, e.id) {
            if position[k - 1][f as usize] as usize >= p {
                return Err(Error::ThresholdMonotonicity(format!(
                    "face {:?} follows coface {:?}",
                    c.vertices(k - 1, f),
                    c.vertices(k, e.id)
                )));
            }
        }
    }
    Ok(Filtration {
        complex: c,
        entries,
        position,
    })
}

impl<'c> Filtration<'c> {
    pub fn complex(&self) -> &'c SimplicialComplex {
        self.complex
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn position(&self, k: usize, i: u32) -> usize {
        self.position[k][i as usize] as usize
    }

    /// Number of leading entries with threshold at most `alpha_sq`.
    pub fn prefix_len(&self, alpha_sq: f64) -> usize {
        self.entries.partition_point(|e| e.alpha_sq <= alpha_sq)
    }

    /// Simplex counts per dimension of the sublevel complex at `alpha_sq`.
    pub fn counts_at(&self, alpha_sq: f64) -> Vec<usize> {
        let mut counts = vec![0; self.complex.dim() + 1];
        for e in &self.entries[..self.prefix_len(alpha_sq)] {
            counts[e.dim as usize] += 1;
        }
        counts
    }

    /// Writes one line per entry: `dim alpha_T v0,v1,...`; the vertex at
    /// infinity prints as `inf`.
    pub fn write_dump<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let inf = self.complex.infinite_vertex();
        for e in &self.entries {
            let verts: Vec<String> = self
                .complex
                .vertices(e.dim as usize, e.id)
                .iter()
                .map(|&v| {
                    if Some(v) == inf {
                        "inf".to_string()
                    } else {
                        v.to_string()
                    }
                })
                .collect();
            writeln!(out, "{} {} {}", e.dim, format_alpha(e.alpha()), verts.join(","))?;
        }
        Ok(())
    }
}

fn format_alpha(a: f64) -> String {
    if a.is_infinite() {
        "inf".into()
    } else {
        format!("{a:.17e}")
    }
}
