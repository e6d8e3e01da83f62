//! Quantitative and qualitative reachability for one-clock clock-dependent
//! probabilistic timed automata.

pub mod cli;
pub mod dsl;
pub mod error;
pub mod imc;
pub mod imdp;
pub mod interval;
pub mod model;
pub mod oracle;
pub mod rational;
pub mod solve;

pub use error::{Error, Result};
