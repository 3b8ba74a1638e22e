//! Rumples: uniquely 2-divisible left quasigroups satisfying
//! `(xy)(xz) = (yx)(yz)`, equivalently involutive nondegenerate
//! set-theoretic solutions of the Yang–Baxter equation.
//!
//! Everything is carried by [`Magma`], a plain multiplication table.
//! Structure is certified by predicates rather than by types.

pub mod affine;
pub mod error;
pub mod extensions;
pub mod fp;
pub mod io;
pub mod iso;
pub mod magma;
pub mod permgroup;
pub mod search;
pub mod yangbaxter;

pub use error::{Error, Result};
pub use iso::{automorphisms, canonical_form, canonical_labeling, find_isomorphism, Isomorphism};
pub use magma::Magma;
pub use permgroup::{PermGroup, Permutation};
pub use yangbaxter::SetSolution;
