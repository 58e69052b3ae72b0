//! Koszul complexes over polynomial generators, pointwise exactness
//! diagnostics, exact and weighted-L² division, and numerical checks of the
//! associated pointwise identities and Skoda-type inequalities.

pub mod exterior;
pub mod linalg;
pub mod poly;
pub mod koszul;
pub mod trace;
pub mod identcheck;
pub mod quad;
pub mod l2solve;
pub mod adjdiv;
pub mod cli;
