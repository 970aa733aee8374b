//! Identifying and controlling sets for combinatorial solution systems.

pub mod element_set;
pub mod error;
pub mod explicit;
pub mod flow;
pub mod graph;
pub mod hitting;
pub mod instances;
pub mod io;
pub mod linalg;
pub mod linear;
pub mod matroid;
mod par;
pub mod path;
pub mod polymatroid;
pub mod rational;
pub mod tolls;

pub use element_set::ElementSet;
pub use error::{Error, NotIdentifyingWitness, Result};
pub use graph::{Digraph, StPair, WeightedGroundSet};
pub use rational::Rational;
