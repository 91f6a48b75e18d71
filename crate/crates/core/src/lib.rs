//! Constrained interpolation engine: given finite scattered data with
//! nonnegative values, build a smooth nonnegative interpolant by explicit
//! local extensions glued through a Calderon-Zygmund cube decomposition and
//! a Whitney partition of unity, and probe solvability with linear
//! programs over jet coefficients.
//!
//! Modules:
//! - [`multiindex`], [`jets`]: multivariate jet arithmetic (truncated
//!   Taylor polynomials stored as derivative values).
//! - [`whitney`]: Whitney fields and the pairwise compatibility seminorm.
//! - [`gamma`]: membership tests for the convex jet classes that
//!   characterize jets of bounded nonnegative functions.
//! - [`czdecomp`]: dyadic cubes and the stopping-time decomposition.
//! - [`smoothfn`]: evaluable smooth functions, cutoffs, partitions of unity.
//! - [`extension`]: jet-to-function extensions, two-function patching, cube
//!   gluing, and the end-to-end interpolation pipeline.
//! - [`feasibility`]: jet-coefficient linear programs, minimal-norm search,
//!   subset-feasibility experiments, and a Helly-property harness.
//! - [`synth`]: seeded generators for random instances used by the
//!   verification suites.

pub mod czdecomp;
pub mod extension;
pub mod feasibility;
pub mod gamma;
pub mod jets;
pub mod lp;
pub mod multiindex;
pub mod smoothfn;
pub mod synth;
pub mod whitney;

pub use czdecomp::{classify_and_anchor, cz_decompose, CubeType, CzDecomposition, DyadicCube, DyadicRegion};
pub use jets::{jet_multiply, Jet};
pub use multiindex::MultiIndex;
pub use smoothfn::FunctionHandle;
pub use whitney::WhitneyField;
