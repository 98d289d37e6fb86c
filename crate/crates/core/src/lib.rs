//! Proof objects and finite semantics for the polymodal provability logic GLP.

pub mod algebra;
pub mod corpus;
pub mod cyclic;
pub mod error;
pub mod formula;
pub mod hilbert;
pub mod infinitary;
pub mod io;
pub mod neighbourhood;
pub mod proof;

pub use error::{BuildError, CheckError};
pub use formula::{fml, parse, Formula, FormulaSet, ParseError};
