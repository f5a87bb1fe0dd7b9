//! Homogeneous Poisson point processes in the unit cube with reproducible
//! per-realization streams.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::points::PointSet;

/// Above this mean the count is drawn from the rounded normal approximation.
pub const NORMAL_APPROX_CUTOFF: f64 = 1000.0;

// e^{-mu} stays comfortably inside f64 range for the inversion chunks.
const INVERSION_CHUNK: f64 = 500.0;

/// Identifies one realization: the master seed of an experiment plus the
/// realization counter. Realization `i` is reachable without generating any
/// of the ones before it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RngSpec {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl RngSpec {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        RngSpec {
            master_seed,
            stream_index,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

/// Draws `N ~ Poisson(lambda)`.
///
/// Exact inversion for `lambda <= 1000` (split into chunks of mean at most
/// 500, whose sum is again Poisson); above that, a `Normal(lambda,
/// sqrt(lambda))` draw rounded to the nearest integer and clamped at zero.
pub fn sample_count<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> Result<u64> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::invalid(format!("intensity must be >= 0, got {lambda}")));
    }
    if lambda == 0.0 {
        return Ok(0);
    }
    if lambda > NORMAL_APPROX_CUTOFF {
        let normal = Normal::new(lambda, lambda.sqrt()).expect("valid normal parameters");
        let x: f64 = normal.sample(rng);
        return Ok(x.round().max(0.0) as u64);
    }
    let chunks = (lambda / INVERSION_CHUNK).ceil();
    let mu = lambda / chunks;
    let mut total = 0;
    for _ in 0..chunks as usize {
        total += invert(mu, rng);
    }
    Ok(total)
}

fn invert<R: Rng + ?Sized>(mu: f64, rng: &mut R) -> u64 {
    let u: f64 = rng.random();
    let mut p = (-mu).exp();
    let mut cdf = p;
    let mut k = 0u64;
    // the cap only matters if rounding leaves cdf a hair below u
    let cap = (mu + 40.0 * mu.sqrt() + 40.0) as u64;
    while u > cdf && k < cap {
        k += 1;
        p *= mu / k as f64;
        cdf += p;
    }
    k
}

/// A uniform coordinate in `[0, 1)` on the `2^-52` grid, so translates by
/// +-1 are exact in double precision.
#[inline]
pub fn unit_coordinate<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 12) as f64 * f64::EPSILON
}

/// `n` i.i.d. uniform points in `[0, 1)^dim`, labelled `0..n`.
pub fn sample_points<R: RngCore + ?Sized>(n: usize, dim: usize, rng: &mut R) -> PointSet {
    let mut set = PointSet::new(dim);
    for label in 0..n {
        let mut c = [0.0; 3];
        for x in c.iter_mut().take(dim) {
            *x = unit_coordinate(rng);
        }
        set.push(c, label as u32);
    }
    set
}

/// One full realization: Poisson count then uniform points, tagged with its
/// stream.
pub fn sample_process(lambda: f64, dim: usize, spec: RngSpec) -> Result<PointSet> {
    let mut rng = spec.rng();
    let n = sample_count(lambda, &mut rng)?;
    Ok(sample_points(n as usize, dim, &mut rng).with_origin(spec))
}
