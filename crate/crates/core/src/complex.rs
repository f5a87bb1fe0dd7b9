//! Simplicial complexes with face and coface adjacency.
//!
//! Simplices are stored per dimension as sorted vertex tuples (padded to four
//! entries with `u32::MAX`) in lexicographic order, so a simplex id is its
//! rank among the simplices of its dimension.

use crate::delaunay::{Delaunay, INFINITE};
use crate::error::{Error, Result};
use crate::geometry::Coord;

/// Padding for unused tuple slots.
pub const PAD: u32 = u32::MAX;

/// How the complex closes up, which decides the marking conventions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Topology {
    /// Plain Delaunay complex of a finite point set; hull facets have one
    /// cofacet.
    Euclidean,
    /// Delaunay complex plus a vertex at infinity coned over the hull, i.e. a
    /// triangulated d-sphere.
    SphereAugmented,
    Torus2,
    Torus3,
}

impl Topology {
    pub fn is_torus(self) -> bool {
        matches!(self, Topology::Torus2 | Topology::Torus3)
    }

    /// Closed pseudomanifolds: every (d-1)-simplex has exactly two cofacets.
    pub fn is_closed(self) -> bool {
        !matches!(self, Topology::Euclidean)
    }

    pub fn name(self) -> &'static str {
        match self {
            Topology::Euclidean => "euclidean",
            Topology::SphereAugmented => "sphere",
            Topology::Torus2 => "torus-2",
            Topology::Torus3 => "torus-3",
        }
    }

    pub fn torus(dim: usize) -> Result<Topology> {
        match dim {
            2 => Ok(Topology::Torus2),
            3 => Ok(Topology::Torus3),
            _ => Err(Error::invalid(format!("no torus mode for d = {dim}"))),
        }
    }
}

impl std::str::FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "euclidean" => Ok(Topology::Euclidean),
            "sphere" | "sphere-augmented" => Ok(Topology::SphereAugmented),
            "torus-2" | "torus2" => Ok(Topology::Torus2),
            "torus-3" | "torus3" => Ok(Topology::Torus3),
            _ => Err(Error::invalid(format!("unknown topology '{s}'"))),
        }
    }
}

impl std::fmt::Display for Topology {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Integer translate of each vertex of a top cell, in tuple order.
pub type Shifts = [[i8; 3]; 4];

#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    dim: usize,
    topology: Topology,
    points: Vec<Coord>,
    infinite: Option<u32>,
    simplices: Vec<Vec<[u32; 4]>>,
    // faces[k][i]: ids of the (k-1)-faces of simplex (k, i), face j omits vertex j
    faces: Vec<Vec<[u32; 4]>>,
    cof_start: Vec<Vec<u32>>,
    cof_list: Vec<Vec<u32>>,
    shifts: Option<Vec<Shifts>>,
}

impl SimplicialComplex {
    /// Assembles a complex from its top cells. Each cell lists `dim + 1`
    /// vertex ids; `shifts`, when present, places each vertex of each top cell
    /// at `points[v] + shift` (torus frames). Vertex id `points.len()` denotes
    /// the vertex at infinity.
    pub fn from_top_cells(
        dim: usize,
        topology: Topology,
        points: Vec<Coord>,
        cells: Vec<[u32; 4]>,
        shifts: Option<Vec<Shifts>>,
    ) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::invalid(format!("complex dimension {dim} unsupported")));
        }
        if let Some(s) = &shifts {
            if s.len() != cells.len() {
                return Err(Error::invalid("one shift row per top cell required"));
            }
        }
        let n = points.len() as u32;
        let mut uses_infinite = false;
        let mut tops: Vec<([u32; 4], Shifts)> = Vec::with_capacity(cells.len());
        for (ci, cell) in cells.iter().enumerate() {
            let mut pairs: Vec<(u32, [i8; 3])> = (0..=dim)
                .map(|j| (cell[j], shifts.as_ref().map_or([0; 3], |s| s[ci][j])))
                .collect();
            pairs.sort_unstable_by_key(|p| p.0);
            let mut v = [PAD; 4];
            let mut sh = [[0i8; 3]; 4];
            for (j, (x, s)) in pairs.into_iter().enumerate() {
                if x > n {
                    return Err(Error::invalid(format!("vertex id {x} out of range")));
                }
                uses_infinite |= x == n;
                v[j] = x;
                sh[j] = s;
            }
            if v[..=dim].windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::NonManifold(format!("cell {ci} repeats a vertex")));
            }
            tops.push((v, sh));
        }
        tops.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        if tops.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::NonManifold("duplicate top cell".into()));
        }

        let mut simplices = vec![Vec::new(); dim + 1];
        let mut faces = vec![Vec::new(); dim + 1];
        let mut cof_start = vec![Vec::new(); dim + 1];
        let mut cof_list = vec![Vec::new(); dim + 1];
        let top_shifts = shifts.map(|_| tops.iter().map(|t| t.1).collect());
        simplices[dim] = tops.into_iter().map(|t| t.0).collect();

        for k in (1..=dim).rev() {
            let mut incidences: Vec<([u32; 4], u32, u8)> =
                Vec::with_capacity(simplices[k].len() * (k + 1));
            for (i, s) in simplices[k].iter().enumerate() {
                for j in 0..=k {
                    let mut f = [PAD; 4];
                    let mut m = 0;
                    for (t, &x) in s[..=k].iter().enumerate() {
                        if t != j {
                            f[m] = x;
                            m += 1;
                        }
                    }
                    incidences.push((f, i as u32, j as u8));
                }
            }
            incidences.sort_unstable();
            let mut lower = Vec::new();
            let mut start = Vec::new();
            let mut list = Vec::with_capacity(incidences.len());
            let mut face_ids = vec![[PAD; 4]; simplices[k].len()];
            for (f, parent, j) in incidences {
                if lower.last() != Some(&f) {
                    lower.push(f);
                    start.push(list.len() as u32);
                }
                let id = (lower.len() - 1) as u32;
                list.push(parent);
                face_ids[parent as usize][j as usize] = id;
            }
            start.push(list.len() as u32);
            simplices[k - 1] = lower;
            faces[k] = face_ids;
            cof_start[k - 1] = start;
            cof_list[k - 1] = list;
        }
        let complex = SimplicialComplex {
            dim,
            topology,
            points,
            infinite: uses_infinite.then_some(n),
            simplices,
            faces,
            cof_start,
            cof_list,
            shifts: top_shifts,
        };
        Ok(complex)
    }

    /// The finite Delaunay cells.
    pub fn from_delaunay(dt: &Delaunay) -> Result<Self> {
        let cells = dt.finite_cells().map(pad).collect();
        Self::from_top_cells(dt.dim(), Topology::Euclidean, dt.points().to_vec(), cells, None)
    }

    /// The Delaunay cells plus the cone from a vertex at infinity over the
    /// hull, a triangulated sphere.
    pub fn sphere_augmented(dt: &Delaunay) -> Result<Self> {
        let n = dt.num_points() as u32;
        let cells = dt
            .cells()
            .map(|c| {
                let mut v = pad(c);
                for x in v.iter_mut().filter(|x| **x == INFINITE) {
                    *x = n;
                }
                // padding must stay above every id
                for x in v.iter_mut().skip(c.len()) {
                    *x = PAD;
                }
                v
            })
            .collect();
        Self::from_top_cells(
            dt.dim(),
            Topology::SphereAugmented,
            dt.points().to_vec(),
            cells,
            None,
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    /// Coordinates of the finite vertices.
    pub fn points(&self) -> &[Coord] {
        &self.points
    }

    /// Id of the vertex at infinity, if present.
    pub fn infinite_vertex(&self) -> Option<u32> {
        self.infinite
    }

    pub fn count(&self, k: usize) -> usize {
        self.simplices.get(k).map_or(0, Vec::len)
    }

    /// Simplex counts for k = 0..=dim.
    pub fn counts(&self) -> Vec<usize> {
        (0..=self.dim).map(|k| self.count(k)).collect()
    }

    pub fn total(&self) -> usize {
        self.simplices.iter().map(Vec::len).sum()
    }

    pub fn simplices(&self, k: usize) -> &[[u32; 4]] {
        &self.simplices[k]
    }

    pub fn vertices(&self, k: usize, i: u32) -> &[u32] {
        &self.simplices[k][i as usize][..=k]
    }

    /// Id of the simplex with the given sorted vertices, if present.
    pub fn find(&self, vertices: &[u32]) -> Option<u32> {
        let k = vertices.len().checked_sub(1)?;
        if k > self.dim {
            return None;
        }
        let mut key = [PAD; 4];
        key[..=k].copy_from_slice(vertices);
        self.simplices[k].binary_search(&key).ok().map(|i| i as u32)
    }

    /// The (k-1)-faces of simplex (k, i); face j omits vertex j.
    pub fn faces(&self, k: usize, i: u32) -> &[u32] {
        &self.faces[k][i as usize][..=k]
    }

    /// The (k+1)-simplices containing simplex (k, i).
    pub fn cofacets(&self, k: usize, i: u32) -> &[u32] {
        if k >= self.dim {
            return &[];
        }
        let s = self.cof_start[k][i as usize] as usize;
        let e = self.cof_start[k][i as usize + 1] as usize;
        &self.cof_list[k][s..e]
    }

    pub fn is_infinite(&self, k: usize, i: u32) -> bool {
        self.infinite
            .is_some_and(|n| self.vertices(k, i).last() == Some(&n))
    }

    /// Hull markers: (d-1)-simplices with a single cofacet.
    pub fn hull_facets(&self) -> Vec<u32> {
        (0..self.count(self.dim - 1) as u32)
            .filter(|&i| self.cofacets(self.dim - 1, i).len() == 1)
            .collect()
    }

    /// Vertex coordinates of a finite simplex in one consistent frame: the
    /// frame of a top cell containing it, so periodic simplices come out
    /// unwrapped.
    pub fn embedded(&self, k: usize, i: u32) -> [Coord; 4] {
        let mut out = [[0.0; 3]; 4];
        if k == self.dim || self.shifts.is_none() {
            let sh = self.shifts.as_ref().map(|s| s[i as usize]);
            for (j, &v) in self.vertices(k, i).iter().enumerate() {
                if Some(v) == self.infinite {
                    continue;
                }
                let mut c = self.points[v as usize];
                if let Some(sh) = sh {
                    for a in 0..self.dim {
                        c[a] += sh[j][a] as f64;
                    }
                }
                out[j] = c;
            }
            return out;
        }
        let parent = self.cofacets(k, i)[0];
        let frame = self.embedded(k + 1, parent);
        let pv = self.vertices(k + 1, parent);
        for (j, v) in self.vertices(k, i).iter().enumerate() {
            let t = pv.iter().position(|x| x == v).expect("face vertex in cofacet");
            out[j] = frame[t];
        }
        out
    }

    /// Alternating simplex count.
    pub fn euler_characteristic(&self) -> i64 {
        (0..=self.dim)
            .map(|k| if k % 2 == 0 { 1 } else { -1 } * self.count(k) as i64)
            .sum()
    }
}

fn pad(c: &[u32]) -> [u32; 4] {
    let mut v = [PAD; 4];
    v[..c.len()].copy_from_slice(c);
    v
}
