//! Hecke L-functions of the Gaussian field attached to primitive odd
//! characters modulo a primary `q`.
//!
//! The crate is layered bottom-up:
//!
//! * [`zi`]: exact arithmetic in `Z[i]` (norms, primary normalization,
//!   factorization, `μ`, `φ`, `ω`, primary divisors).
//! * [`residue`]: the unit group `(Z[i]/(q))*`, its characters, parity and
//!   primitivity, and the divisor-sum form of the orthogonality relation.
//! * [`hecke`]: the lift of a primitive odd character to a Hecke character
//!   modulo `(1+i)^3 q`, its Gauss sum, and the von Mangoldt function of `Q(i)`.
//! * [`kernels`]: the smoothing kernels `V` and `W` used by the approximate
//!   functional equation and the second-moment identity.
//! * [`lvalues`]: central values `L(1/2, χ̃)` and `A(χ̃)` with `|L|^2 = 2A`.
//! * [`experiments`]: moment sweeps, non-vanishing counts, one-level density
//!   and the supporting lattice-point lemmas.
//! * [`verify`]: a deterministic invariant suite across all of the above.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod hecke;
pub mod kernels;
pub mod lvalues;
pub mod residue;
pub mod verify;
pub mod zi;

pub use error::{Error, Result};
pub use zi::GaussInt;
