pub mod algebra;
pub mod cli;
pub mod cone;
pub mod error;
pub mod lattice;
pub mod oracle;
pub mod sampling;
pub mod selftest;
pub mod toric_lnd;
pub mod trinomial;

pub use error::{Error, Result, Witness};
