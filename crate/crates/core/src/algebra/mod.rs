//! Exact arithmetic: integers, rationals, polynomials, algebraic numbers,
//! matrices and integer lattices.

pub mod algebraic;
pub mod dyadic;
pub mod factor;
pub mod field;
pub mod lattice;
pub mod matrix;
pub mod modular;
pub mod numfield;
pub mod poly;
pub mod roots;
