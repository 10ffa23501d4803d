//! Gauss-diagram calculus for finite-type invariants of virtual and long
//! virtual knots.
//!
//! The crate provides:
//!
//! - canonical arrow/chord diagrams on circle and line skeletons, with
//!   enumeration up to rotation ([`diagram`], [`enumerate`]);
//! - Gauss-code and JSON wire formats ([`gauss_code`], [`json`]);
//! - exact sparse rational linear algebra ([`linalg`]);
//! - the Reidemeister-move schemas on Gauss diagrams and the relation
//!   families they induce ([`moves`], [`relations`]);
//! - the subdiagram-sum maps, invariant-space computation, evaluation and
//!   witness search ([`invariant`]);
//! - claim-by-claim verification with machine-readable certificates and an
//!   on-disk cache ([`verify`], [`cache`]).

pub mod cache;
pub mod diagram;
pub mod enumerate;
pub mod error;
pub mod formal_sum;
pub mod gauss_code;
pub mod invariant;
pub mod json;
pub mod linalg;
pub mod moves;
pub mod relations;
pub mod verify;

pub use diagram::{Arc, Canonical, CanonicalKey, Diagram, Flavor, Sign, Skeleton, Style};
pub use error::{Error, Result};
pub use formal_sum::{average, rat, FormalSum, Rational};

/// Fixes the global worker-thread count for parallel generation. Zero
/// leaves the library default in place; later calls are ignored once a
/// pool exists.
pub fn configure_parallelism(threads: usize) {
    if threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
}
