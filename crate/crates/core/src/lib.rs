//! Exact-arithmetic toolkit that decides and certifies, over the rationals,
//! whether mod-2 triple and symmetric fourfold Massey products are defined or
//! vanish: norm-group membership with certificates, quaternion symbols and
//! their local invariants, Galois-algebra constructions, and a finite-group
//! engine for the unipotent groups over F2 that drive the criteria.

pub mod arith;
pub mod brauer;
pub mod conic;
pub mod normgroups;
pub mod etale;

pub use etale::{EtaleAlgebra, EtaleElement, EtaleError, SquareClass};
