//! Sums-of-squares certificates for linear matrix inequalities.
//!
//! A linear pencil `A(x) = A0 + x1*A1 + ... + xn*An` defines the spectrahedron
//! `{x : A(x) PSD}`. This crate searches, with a built-in SDP solver, for algebraic
//! certificates of infeasibility, low dimensionality and boundedness of such sets,
//! builds a sums-of-squares dual with no duality gap, and re-checks every
//! certificate by exact polynomial expansion.

pub mod certificates;
pub mod cli;
pub mod duals;
pub mod gram;
pub mod io;
pub mod linalg;
pub mod pencil;
pub mod poly;
pub mod scalar;
pub mod sdp;
pub mod verify;
