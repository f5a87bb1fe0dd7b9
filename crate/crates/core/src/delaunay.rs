//! Delaunay triangulations of point sets in two and three dimensions.
//!
//! Points are inserted one at a time (Bowyer-Watson): locate the new point by
//! a remembering stochastic walk, grow the conflict region of cells whose
//! circumsphere contains it, and re-triangulate the cavity by coning its
//! boundary to the new point. The convex hull is closed off by cells incident
//! to a single vertex at infinity, so every facet has exactly two cells.
//!
//! Cospherical configurations are resolved by symbolic perturbation of the
//! lifted points: each point's paraboloid height is raised by an
//! infinitesimal whose magnitude is ordered by the lexicographic rank of its
//! coordinates. Lexicographic rank is invariant under translation, so exact
//! periodic copies of a configuration are triangulated identically.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{in_sphere_oriented, orient, orient2d, Coord, Sign};
use crate::points::PointSet;

/// Vertex id of the point at infinity inside cells.
pub const INFINITE: u32 = u32::MAX;
const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug)]
struct Cell {
    v: [u32; 4],
    // n[i] is the cell across the facet opposite v[i]
    n: [u32; 4],
}

impl Cell {
    fn infinite_slot(&self, dim: usize) -> Option<usize> {
        self.v[..=dim].iter().position(|&x| x == INFINITE)
    }
}

/// A Delaunay triangulation closed by a vertex at infinity.
#[derive(Clone, Debug)]
pub struct Delaunay {
    dim: usize,
    points: Vec<Coord>,
    rank: Vec<u32>,
    cells: Vec<Cell>,
    alive: Vec<bool>,
    free: Vec<u32>,
    stamp: Vec<u32>,
    in_conflict: Vec<bool>,
    epoch: u32,
    hint: u32,
    walk_state: u64,
}

/// Builds the Delaunay triangulation of `points` (2D or 3D).
///
/// The insertion order is a biased randomized order derived from `seed`;
/// the resulting triangulation does not depend on it.
pub fn build_delaunay(points: &PointSet, seed: u64) -> Result<Delaunay> {
    let dim = points.dim();
    if !(2..=3).contains(&dim) {
        return Err(Error::invalid(format!(
            "Delaunay triangulation needs d = 2 or 3, got {dim}"
        )));
    }
    if points.len() < dim + 1 {
        return Err(Error::DegenerateInput(format!(
            "{} points cannot span {dim} dimensions",
            points.len()
        )));
    }
    if points.len() >= (u32::MAX / 2) as usize {
        return Err(Error::invalid("too many points"));
    }
    let coords = points.coords().to_vec();
    let rank = lexicographic_rank(dim, &coords)?;
    let order = insertion_order(dim, &coords, seed);
    let mut dt = Delaunay {
        dim,
        points: coords,
        rank,
        cells: Vec::new(),
        alive: Vec::new(),
        free: Vec::new(),
        stamp: Vec::new(),
        in_conflict: Vec::new(),
        epoch: 0,
        hint: 0,
        walk_state: seed ^ 0x9E37_79B9_7F4A_7C15,
    };
    let rest = dt.initial_simplex(order)?;
    for p in rest {
        dt.insert(p)?;
    }
    Ok(dt)
}

fn lexicographic_rank(dim: usize, coords: &[Coord]) -> Result<Vec<u32>> {
    let mut idx: Vec<u32> = (0..coords.len() as u32).collect();
    let cmp = |a: &u32, b: &u32| {
        let (pa, pb) = (&coords[*a as usize], &coords[*b as usize]);
        (0..dim)
            .map(|i| pa[i].total_cmp(&pb[i]))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    };
    idx.sort_unstable_by(cmp);
    for w in idx.windows(2) {
        if cmp(&w[0], &w[1]).is_eq() {
            return Err(Error::DegenerateInput(format!(
                "points {} and {} coincide",
                w[0].min(w[1]),
                w[0].max(w[1])
            )));
        }
    }
    let mut rank = vec![0; coords.len()];
    for (r, &i) in idx.iter().enumerate() {
        rank[i as usize] = r as u32;
    }
    Ok(rank)
}

/// Biased randomized insertion order: shuffled, split into rounds of doubling
/// size, each round sorted along a Z-order curve.
fn insertion_order(dim: usize, coords: &[Coord], seed: u64) -> Vec<u32> {
    let mut order: Vec<u32> = (0..coords.len() as u32).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for c in coords {
        for i in 0..dim {
            lo[i] = lo[i].min(c[i]);
            hi[i] = hi[i].max(c[i]);
        }
    }
    let bits = if dim == 2 { 31 } else { 21 };
    let scale: Vec<f64> = (0..dim)
        .map(|i| {
            let w = hi[i] - lo[i];
            if w > 0.0 {
                ((1u64 << bits) - 1) as f64 / w
            } else {
                0.0
            }
        })
        .collect();
    let key = |p: u32| -> u64 {
        let c = &coords[p as usize];
        let mut k = 0u64;
        for i in 0..dim {
            let q = ((c[i] - lo[i]) * scale[i]) as u64;
            for b in 0..bits {
                k |= ((q >> b) & 1) << (b * dim + i);
            }
        }
        k
    };

    let mut end = order.len();
    while end > 0 {
        let start = if end > 64 { end / 2 } else { 0 };
        order[start..end].sort_by_cached_key(|&p| key(p));
        end = start;
    }
    order
}

impl Delaunay {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Coord] {
        &self.points
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    /// Vertex tuples of all live cells; infinite cells contain [`INFINITE`].
    pub fn cells(&self) -> impl Iterator<Item = &[u32]> + '_ {
        let d = self.dim;
        self.cells
            .iter()
            .zip(&self.alive)
            .filter(|(_, &a)| a)
            .map(move |(c, _)| &c.v[..=d])
    }

    pub fn finite_cells(&self) -> impl Iterator<Item = &[u32]> + '_ {
        self.cells().filter(|v| !v.contains(&INFINITE))
    }

    pub fn num_finite_cells(&self) -> usize {
        self.finite_cells().count()
    }

    /// Vertices on the convex hull.
    pub fn hull_vertices(&self) -> Vec<u32> {
        let mut on_hull = vec![false; self.points.len()];
        for v in self.cells().filter(|v| v.contains(&INFINITE)) {
            for &x in v.iter().filter(|&&x| x != INFINITE) {
                on_hull[x as usize] = true;
            }
        }
        (0..self.points.len() as u32)
            .filter(|&i| on_hull[i as usize])
            .collect()
    }

    fn coord(&self, v: u32) -> &Coord {
        &self.points[v as usize]
    }

    fn cell_coords(&self, c: &Cell) -> [Coord; 4] {
        let mut out = [[0.0; 3]; 4];
        for i in 0..=self.dim {
            if c.v[i] != INFINITE {
                out[i] = *self.coord(c.v[i]);
            }
        }
        out
    }

    /// Orientation of cell `c` with its `slot`-th vertex replaced by point `p`.
    fn orient_replaced(&self, c: &Cell, slot: usize, p: u32) -> Sign {
        let mut pts = self.cell_coords(c);
        pts[slot] = *self.coord(p);
        orient(self.dim, &pts[..=self.dim])
    }

    /// Perturbed in-sphere test for a finite, positively oriented cell. Never
    /// returns zero.
    fn in_sphere_perturbed(&self, c: &Cell, p: u32) -> Sign {
        let d = self.dim;
        let pts = self.cell_coords(c);
        let raw = in_sphere_oriented(d, &pts[..=d], self.coord(p));
        if raw != Sign::Zero {
            return raw;
        }
        // Raising the lift of vertex a by eps moves p inside iff p has a
        // positive barycentric coordinate for a; raising p's own lift moves it
        // outside. The largest rank dominates.
        let mut slots: [(u32, usize); 5] = [(0, 0); 5];
        for (i, slot) in slots.iter_mut().enumerate().take(d + 1) {
            *slot = (self.rank[c.v[i] as usize], i);
        }
        slots[d + 1] = (self.rank[p as usize], d + 1);
        slots[..d + 2].sort_unstable_by(|a, b| b.0.cmp(&a.0));
        for &(_, slot) in &slots[..d + 2] {
            if slot == d + 1 {
                return Sign::Negative;
            }
            let o = self.orient_replaced(c, slot, p);
            if o != Sign::Zero {
                return o;
            }
        }
        Sign::Negative
    }

    fn conflicts(&self, ci: u32, p: u32) -> bool {
        let c = &self.cells[ci as usize];
        match c.infinite_slot(self.dim) {
            None => self.in_sphere_perturbed(c, p) == Sign::Positive,
            Some(k) => match self.orient_replaced(c, k, p) {
                Sign::Positive => true,
                Sign::Negative => false,
                // on the hull hyperplane: follow the finite neighbour
                Sign::Zero => {
                    let nb = &self.cells[c.n[k] as usize];
                    self.in_sphere_perturbed(nb, p) == Sign::Positive
                }
            },
        }
    }

    fn new_cell(&mut self, v: [u32; 4]) -> u32 {
        let cell = Cell { v, n: [NONE; 4] };
        if let Some(i) = self.free.pop() {
            self.cells[i as usize] = cell;
            self.alive[i as usize] = true;
            i
        } else {
            self.cells.push(cell);
            self.alive.push(true);
            self.stamp.push(0);
            self.in_conflict.push(false);
            (self.cells.len() - 1) as u32
        }
    }

    /// Picks `dim + 1` affinely independent points from the front of `order`,
    /// builds the first cell and its hull, and returns the remaining order.
    fn initial_simplex(&mut self, order: Vec<u32>) -> Result<Vec<u32>> {
        let d = self.dim;
        let mut chosen = vec![order[0], order[1]];
        let collinear = |a: &Coord, b: &Coord, c: &Coord| {
            let proj = |i: usize, j: usize| {
                let f = |p: &Coord| [p[i], p[j], 0.0];
                orient2d(&f(a), &f(b), &f(c))
            };
            proj(0, 1) == Sign::Zero && proj(1, 2) == Sign::Zero && proj(0, 2) == Sign::Zero
        };
        let third = order[2..]
            .iter()
            .copied()
            .find(|&p| !collinear(self.coord(chosen[0]), self.coord(chosen[1]), self.coord(p)))
            .ok_or_else(|| Error::DegenerateInput("all points are collinear".into()))?;
        chosen.push(third);
        if d == 3 {
            let fourth = order[2..]
                .iter()
                .copied()
                .find(|&p| {
                    let pts = [
                        *self.coord(chosen[0]),
                        *self.coord(chosen[1]),
                        *self.coord(chosen[2]),
                        *self.coord(p),
                    ];
                    orient(3, &pts) != Sign::Zero
                })
                .ok_or_else(|| Error::DegenerateInput("all points are coplanar".into()))?;
            chosen.push(fourth);
        }
        let mut v = [INFINITE; 4];
        v[..=d].copy_from_slice(&chosen);
        let c = Cell { v, n: [NONE; 4] };
        if self.orient_replaced(&c, 0, v[0]) == Sign::Negative {
            v.swap(0, 1);
        }
        let first = self.new_cell(v);
        let mut all = vec![first];
        for i in 0..=d {
            let mut w = v;
            w[i] = INFINITE;
            // flip so that replacing the infinite vertex by an outside point
            // gives a positive orientation
            w.swap((i + 1) % (d + 1), (i + 2) % (d + 1));
            all.push(self.new_cell(w));
        }
        self.link_among(&all);
        self.hint = first;
        Ok(order
            .into_iter()
            .filter(|p| !chosen.contains(p))
            .collect())
    }

    /// Connects cells through shared facets (brute force; initial hull only).
    fn link_among(&mut self, ids: &[u32]) {
        let d = self.dim;
        for (a_pos, &a) in ids.iter().enumerate() {
            for &b in &ids[a_pos + 1..] {
                let (va, vb) = (self.cells[a as usize].v, self.cells[b as usize].v);
                let shared = va[..=d].iter().filter(|x| vb[..=d].contains(x)).count();
                if shared != d {
                    continue;
                }
                let ia = (0..=d).find(|&i| !vb[..=d].contains(&va[i])).unwrap();
                let ib = (0..=d).find(|&i| !va[..=d].contains(&vb[i])).unwrap();
                self.cells[a as usize].n[ia] = b;
                self.cells[b as usize].n[ib] = a;
            }
        }
    }

    fn next_random(&mut self) -> u64 {
        // xorshift64*
        let mut x = self.walk_state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.walk_state = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    /// Walks from the hint to a cell in conflict with `p`: either a finite
    /// cell whose closure contains `p` or an infinite cell whose hull facet
    /// `p` sees.
    fn locate(&mut self, p: u32) -> u32 {
        let d = self.dim;
        let mut c = self.hint;
        if !self.alive[c as usize] || self.cells[c as usize].infinite_slot(d).is_some() {
            c = (0..self.cells.len() as u32)
                .find(|&i| {
                    self.alive[i as usize] && self.cells[i as usize].infinite_slot(d).is_none()
                })
                .expect("triangulation has a finite cell");
        }
        let limit = 4 * self.cells.len() + 64;
        for _ in 0..limit {
            let cell = self.cells[c as usize];
            if cell.infinite_slot(d).is_some() {
                return c;
            }
            let offset = (self.next_random() % (d as u64 + 1)) as usize;
            let mut moved = false;
            for t in 0..=d {
                let i = (offset + t) % (d + 1);
                if self.orient_replaced(&cell, i, p) == Sign::Negative {
                    c = cell.n[i];
                    moved = true;
                    break;
                }
            }
            if !moved {
                return c;
            }
        }
        // the walk should never cycle on a Delaunay triangulation; scan as a
        // last resort
        (0..self.cells.len() as u32)
            .find(|&i| self.alive[i as usize] && self.conflicts(i, p))
            .expect("some cell conflicts with a new point")
    }

    fn insert(&mut self, p: u32) -> Result<()> {
        let d = self.dim;
        let start = self.locate(p);
        if !self.conflicts(start, p) {
            return Err(Error::DegenerateInput(format!(
                "point {p} located in a cell it does not conflict with"
            )));
        }
        self.epoch = self.epoch.wrapping_add(1);
        let epoch = self.epoch;
        self.stamp[start as usize] = epoch;
        self.in_conflict[start as usize] = true;

        let mut cavity = vec![start];
        let mut stack = vec![start];
        let mut boundary: Vec<(u32, usize)> = Vec::new();
        while let Some(c) = stack.pop() {
            for i in 0..=d {
                let nb = self.cells[c as usize].n[i];
                if self.stamp[nb as usize] != epoch {
                    self.stamp[nb as usize] = epoch;
                    let hit = self.conflicts(nb, p);
                    self.in_conflict[nb as usize] = hit;
                    if hit {
                        cavity.push(nb);
                        stack.push(nb);
                    }
                }
                if !self.in_conflict[nb as usize] {
                    boundary.push((c, i));
                }
            }
        }

        // cone each boundary facet to p
        let mut created = Vec::with_capacity(boundary.len());
        for &(c, i) in &boundary {
            let old = self.cells[c as usize];
            let mut v = old.v;
            v[i] = p;
            let outside = old.n[i];
            let nc = self.new_cell(v);
            self.cells[nc as usize].n[i] = outside;
            let back = self.cells[outside as usize].n[..=d]
                .iter()
                .position(|&x| x == c)
                .expect("neighbour relation is symmetric");
            self.cells[outside as usize].n[back] = nc;
            if !v[..=d].contains(&INFINITE) {
                let cell = self.cells[nc as usize];
                if self.orient_replaced(&cell, i, p) != Sign::Positive {
                    return Err(Error::DegenerateInput(format!(
                        "inserting point {p} produced a flat cell"
                    )));
                }
            }
            created.push((nc, i));
        }

        // link the new cells to each other across facets containing p
        let mut pending: Vec<([u32; 2], u32, usize)> = Vec::new();
        for &(nc, ip) in &created {
            let v = self.cells[nc as usize].v;
            for j in (0..=d).filter(|&j| j != ip) {
                let mut key = [0u32; 2];
                let mut k = 0;
                for (s, &x) in v[..=d].iter().enumerate() {
                    if s != j && s != ip {
                        key[k] = x;
                        k += 1;
                    }
                }
                if key[0] > key[1] && d == 3 {
                    key.swap(0, 1);
                }
                if let Some(pos) = pending.iter().position(|e| e.0 == key) {
                    let (_, other, oj) = pending.swap_remove(pos);
                    self.cells[nc as usize].n[j] = other;
                    self.cells[other as usize].n[oj] = nc;
                } else {
                    pending.push((key, nc, j));
                }
            }
        }
        debug_assert!(pending.is_empty(), "cavity boundary is a closed surface");

        for c in cavity {
            self.alive[c as usize] = false;
            self.in_conflict[c as usize] = false;
            self.free.push(c);
        }
        self.hint = created
            .iter()
            .map(|&(c, _)| c)
            .find(|&c| self.cells[c as usize].infinite_slot(d).is_none())
            .unwrap_or(created[0].0);
        Ok(())
    }

    /// Structural self-check used by tests: symmetric adjacency, positive
    /// orientation of finite cells, and each facet shared by exactly two
    /// cells.
    pub fn check_structure(&self) -> Result<()> {
        let d = self.dim;
        for (i, c) in self.cells.iter().enumerate() {
            if !self.alive[i] {
                continue;
            }
            for j in 0..=d {
                let nb = c.n[j];
                if nb == NONE || !self.alive[nb as usize] {
                    return Err(Error::NonManifold(format!("cell {i} has a dangling neighbour")));
                }
                let other = &self.cells[nb as usize];
                let back = other.n[..=d].iter().filter(|&&x| x == i as u32).count();
                if back != 1 {
                    return Err(Error::NonManifold(format!("asymmetric adjacency at cell {i}")));
                }
                let shared = c.v[..=d]
                    .iter()
                    .enumerate()
                    .filter(|&(s, x)| s != j && other.v[..=d].contains(x))
                    .count();
                if shared != d {
                    return Err(Error::NonManifold(format!("cell {i} facet {j} mismatch")));
                }
            }
            if c.infinite_slot(d).is_none() {
                let pts = self.cell_coords(c);
                if orient(d, &pts[..=d]) != Sign::Positive {
                    return Err(Error::DegenerateInput(format!("cell {i} is not positive")));
                }
            }
        }
        Ok(())
    }
}
