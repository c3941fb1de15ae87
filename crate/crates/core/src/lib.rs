//! Prime number races between residue classes: sieving, Dirichlet characters,
//! zeros of ζ and L-functions, explicit formulas and almost periods.

pub mod almost_period;
pub mod argument;
pub mod arith;
pub mod characters;
pub mod error;
pub mod explicit_formula;
pub mod numeric;
pub mod race;
pub mod report;
pub mod sieve;
pub mod special;
pub mod l_functions;
pub mod zeta_zeros;

pub use error::{Error, Result};
pub use report::{Report, Status};
