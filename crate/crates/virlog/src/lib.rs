//! Exact computer algebra for lowest-weight Virasoro and Heisenberg modules.
//!
//! Modules, bottom-up:
//! - [`exact`]: rationals, polynomials in `c, h`, matrices and elimination.
//! - [`vircore`]: partitions, Virasoro words, normal ordering on a lowest-weight vector.
//! - [`shapovalov`]: Gram matrices, `Φ_{r,s}` curves, Kac determinant.
//! - [`induced`]: block Gram matrices of Jordan-block induced modules, kernels, `κ`, classification.
//! - [`heisenberg`]: rank-one Heisenberg Fock modules and their pseudo-traces.
//! - [`qseries`]: `q`-series with `log q` coefficients and the Virasoro pseudo-traces.
//! - [`verify`]: worked examples checked end to end.

pub mod exact;
pub mod heisenberg;
pub mod induced;
pub mod qseries;
pub mod shapovalov;
pub mod verify;
pub mod vircore;

use thiserror::Error as ThisError;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Eq, ThisError)]
pub enum Error {
    #[error("invalid rational number {0:?}")]
    ParseRat(String),
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("weight mismatch: {0} vs {1}")]
    WeightMismatch(u32, u32),
    #[error("parameter t must be nonzero")]
    ZeroT,
    #[error("kernel of the degree-{degree} Gram matrix has dimension {dim}, expected 1")]
    KernelDimension { degree: u32, dim: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("series offsets {0} and {1} differ by a non-integer")]
    OffsetMismatch(String, String),
    #[error("module is not interlocked: {0}")]
    NotInterlocked(String),
}
