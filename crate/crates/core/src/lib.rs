//! Murphy's α for integer polynomials with certified truncation error,
//! Dickman ρ smooth-count predictions, and exact smoothness censuses of
//! binary forms.
//!
//! The algorithms live in one module each:
//!
//! * [`polyform`]: exact polynomial and binary-form arithmetic.
//! * [`rootcount`]: `n_{p^k}(f)` by cluster lifting.
//! * [`alpha`]: local and global α with the RH tail bound.
//! * [`quadfield`]: imaginary quadratic field invariants.
//! * [`dickman`]: ρ, its derivatives and Ψ(x, B) estimates.
//! * [`census`]: exact Ψ(x, B) and line-sieved form censuses.
//! * [`avgalpha`]: averages of α_p over coefficient boxes.

pub mod alpha;
pub mod arith;
pub mod avgalpha;
pub mod census;
pub mod dickman;
pub mod error;
mod fp;
pub mod polyform;
pub mod primes;
pub mod quadfield;
pub mod rootcount;
pub mod summation;

pub use alpha::{AlphaEstimate, FieldParams, LocalAlpha, LocalMethod};
pub use avgalpha::CoefficientBox;
pub use census::CensusResult;
pub use dickman::{RhoTable, SmoothPrediction};
pub use error::{Error, Result};
pub use polyform::{BinaryForm, Discriminant, Polynomial};
pub use quadfield::{IdealCountProfile, QuadField};
pub use rootcount::{RootCountProfile, RootCounter};

/// Worker count and sieve segment size for the parallel kernels.
///
/// Segment boundaries depend only on `segment_size`, and per-segment results
/// are always folded in ascending order, so numeric output is independent of
/// `workers`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Parallelism {
    pub workers: usize,
    pub segment_size: u64,
}

pub const DEFAULT_SEGMENT_SIZE: u64 = 1 << 20;

impl Parallelism {
    pub fn new(workers: usize, segment_size: u64) -> Self {
        Parallelism {
            workers: workers.max(1),
            segment_size: segment_size.max(1),
        }
    }

    pub fn serial() -> Self {
        Parallelism::new(1, DEFAULT_SEGMENT_SIZE)
    }

    /// Runs `f` inside a dedicated pool of `workers` threads.
    pub fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        match rayon::ThreadPoolBuilder::new().num_threads(self.workers).build() {
            Ok(pool) => pool.install(f),
            // no threads available: run on the caller
            Err(_) => f(),
        }
    }
}

impl Default for Parallelism {
    fn default() -> Self {
        let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
        Parallelism::new(workers, DEFAULT_SEGMENT_SIZE)
    }
}
