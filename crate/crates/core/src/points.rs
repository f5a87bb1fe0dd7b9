use crate::geometry::Coord;
use crate::poisson::RngSpec;

/// Labelled points in (or near) the unit `dim`-cube.
///
/// Coordinates are stored padded to three components; components at or
/// beyond `dim` are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<Coord>,
    labels: Vec<u32>,
    origin: Option<RngSpec>,
}

impl PointSet {
    pub fn new(dim: usize) -> Self {
        assert!((1..=3).contains(&dim), "dimension must be 1, 2 or 3");
        PointSet {
            dim,
            coords: Vec::new(),
            labels: Vec::new(),
            origin: None,
        }
    }

    /// Builds a point set labelled `0..n` in input order.
    pub fn from_coords(dim: usize, coords: Vec<Coord>) -> Self {
        let labels = (0..coords.len() as u32).collect();
        let mut set = PointSet::new(dim);
        set.coords = coords;
        set.labels = labels;
        set
    }

    pub fn from_slices(dim: usize, rows: &[&[f64]]) -> Self {
        let coords = rows
            .iter()
            .map(|r| {
                let mut c = [0.0; 3];
                c[..dim].copy_from_slice(&r[..dim]);
                c
            })
            .collect();
        PointSet::from_coords(dim, coords)
    }

    pub fn push(&mut self, coord: Coord, label: u32) {
        debug_assert!(coord.iter().all(|c| c.is_finite()));
        self.coords.push(coord);
        self.labels.push(label);
    }

    pub fn with_origin(mut self, origin: RngSpec) -> Self {
        self.origin = Some(origin);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[Coord] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> &Coord {
        &self.coords[i]
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn origin(&self) -> Option<RngSpec> {
        self.origin
    }

    pub fn in_unit_cube(&self) -> bool {
        self.coords
            .iter()
            .all(|c| c[..self.dim].iter().all(|&x| (0.0..1.0).contains(&x)))
    }
}
