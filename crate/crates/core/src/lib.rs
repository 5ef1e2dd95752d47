//! Exact analysis of jacobian elliptic fibrations over P¹ over F2.
//!
//! The crate enumerates the 2²¹ Weierstrass equations over F2[t] with
//! `deg a_i ≤ i`, runs Tate's algorithm at every place, counts rational points
//! on the fibers over t = 0, 1, ∞, and filters for fibrations whose Picard
//! scheme can be constant. A small lattice engine checks the dual-graph and
//! height-pairing facts behind that filter.

pub mod census;
pub mod gf2arith;
pub mod lattice;
pub mod search;
pub mod tate;
pub mod text;
pub mod weierstrass;

pub use gf2arith::BitPoly;
pub use weierstrass::{IsoTransform, Mobius, Place, RationalPoint, WeierstrassEq};
