//! Subspace geometry and operator perturbation of fusion frames in finite
//! dimension.
//!
//! * [`numerics`]: SVD, pseudoinverse, reduced minimum modulus and the rank policy.
//! * [`subspaces`]: projectors, intersections, Friedrichs/Dixmier angles, gap.
//! * [`fusion_frames`]: synthesis/analysis/frame operators and optimal bounds.
//! * [`perturbation`]: weight windows for `(T(W_i), v_i)` and the inequality verifiers.
//! * [`instances`]: the block example and seeded random generators.
//! * [`suites`]: randomized verifier suites shared by the CLI and the tests.
//! * [`io`]: JSON instance files and report envelopes.

pub mod error;
pub mod fusion_frames;
pub mod instances;
pub mod io;
pub mod numerics;
pub mod perturbation;
pub mod subspaces;
pub mod suites;

pub use error::{Error, Result};
pub use fusion_frames::{Classification, FrameAnalysis, WeightedFamily};
pub use numerics::{Matrix, Tolerance, C64};
pub use subspaces::Subspace;
