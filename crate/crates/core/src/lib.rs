//! Exponential sums over permutation orbits in F_p^n, spectral gaps of the
//! associated Cayley graphs, diameters of V_0 ⋊ S_n and Kazhdan-constant
//! bounds for small finite groups.

pub mod catalog;
pub mod error;
pub mod expsum;
pub mod finite_group;
pub mod kazhdan;
pub mod modp;
pub mod perm;
pub mod rng;
pub mod semidirect;
pub mod spectral;

pub use error::{Error, Result};
pub use modp::{FpScalar, FpVector, PrimeField};
pub use perm::Permutation;
