//! Locally repairable codes built from low-degree polynomials evaluated on
//! structured point sets, with repair, decoding and a storage simulator.

pub mod acceptance;
pub mod codefile;
pub mod evalset;
pub mod fixtures;
pub mod geometry;
pub mod gf;
pub mod guard;
pub mod inner;
pub mod lincode;
pub mod lrc2;
pub mod lrc3;
pub mod matrix;
pub mod mpoly;
pub mod ratio;
pub mod repair;
pub mod rm;
pub mod sim;

mod error;
pub use error::Error;
