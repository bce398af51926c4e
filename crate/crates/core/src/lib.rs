pub mod arith;
pub mod corpus;
pub mod decide;
pub mod error;
pub mod exactmat;
pub mod invariants;
pub mod padic;
pub mod quadmod;
pub mod reduction;
pub mod spectral;

pub use error::{Error, Result};
