//! The unit group `(Z[i]/(q))*` for primary odd `q` and its characters.

mod character;
mod modulus;
mod orthogonality;
mod ring;

pub use character::{characters, eval_char, is_primitive, primitive_odd, Character};
pub use modulus::{Modulus, UnitGroupBasis, DEFAULT_NORM_BOUND};
pub(crate) use orthogonality::psi_star_of;
pub use orthogonality::{orthogonality_rhs, psi, psi_star, DivisorSums, Parity};
pub use ring::ResidueRing;

use std::sync::Arc;

use crate::error::Result;
use crate::zi::GaussInt;

/// Build the unit-group tables for `q` with the default norm bound.
pub fn build_modulus(q: GaussInt) -> Result<Arc<Modulus>> {
    Modulus::build(q)
}
