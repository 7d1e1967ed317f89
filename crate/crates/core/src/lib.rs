//! Exact computations around the de Rham-Witt complex of hyperplane
//! arrangement complements over `F_p`: truncated p-adic arithmetic,
//! fractional-exponent de Rham-Witt forms, exact rational differential forms,
//! Orlik-Solomon and Aomoto complexes, Milnor K symbols, and the sl2
//! hypergeometric KZ cocycle.

pub mod aomoto;
pub mod arrangement;
pub mod kz;
pub mod linalg;
pub mod logform;
pub mod milnor;
pub mod padic;
pub mod poly;
pub mod ratfn;
pub mod suite;
pub mod witt;
