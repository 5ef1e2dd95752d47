//! Exact arithmetic in F2[t] and in the residue fields F_{2^k}, k ≤ 12.

mod factor;
mod field;
mod poly;

pub use factor::{irreducibles, is_irreducible, poly_factor};
pub use field::{root_of_irreducible, FieldSpec, Gf2k, MAX_EXTENSION_DEGREE};
pub use poly::BitPoly;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("cannot factor the zero polynomial")]
    FactorZero,
    #[error("zero has no inverse")]
    InverseOfZero,
    #[error("extension degree {0} is not supported (1..=12)")]
    UnsupportedDegree(u32),
    #[error("modulus {0} is not irreducible")]
    ReducibleModulus(BitPoly),
    #[error("modulus {0} is not primitive")]
    NonPrimitiveModulus(BitPoly),
}
