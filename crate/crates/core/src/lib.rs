//! Betti number signatures of Poisson point processes.
//!
//! The pipeline takes a realization of a homogeneous Poisson process in the
//! unit square or cube, builds the Delaunay complex of the point set (with
//! periodic boundary conditions simulated by translated copies), assigns every
//! simplex its alpha-threshold, and marks each simplex of the resulting
//! filtration as creating (+1) or destroying (-1) a cycle. Running sums of the
//! marks give `beta_k(alpha)` at every radius in a single pass.
//!
//! Alongside the simulation machinery the crate carries the analytic
//! reference curves (Euler characteristic densities, low-density cluster
//! expansions, leading-order Betti asymptotics) and the Poisson-Delaunay cell
//! quadratures those asymptotics come from.

pub mod analytic;
pub mod betti;
pub mod complex;
pub mod delaunay;
pub mod error;
pub mod experiment;
pub mod filtration;
pub mod geometry;
pub mod io;
pub mod pdc;
pub mod periodic;
pub mod points;
pub mod poisson;
pub mod quadrature;
pub mod union_find;
pub mod verify;












pub use betti::{mark_filtration, signature, BettiSignature, Mark, MarkedFiltration};
pub use complex::{SimplicialComplex, Topology};
pub use delaunay::{build_delaunay, Delaunay};
pub use error::{Error, Result};
pub use experiment::{fit_leading_order, run_experiment, AggregateResult, ExperimentConfig};
pub use filtration::{alpha_thresholds, build_filtration, AlphaThresholds, Filtration};
pub use geometry::{Circumsphere, Coord, Sign};
pub use periodic::{periodic_delaunay, PeriodicComplex};
pub use points::PointSet;
pub use poisson::RngSpec;
