//! Train track maps on finite graphs, their proper full fold decompositions,
//! lamination train track structures and the automata they generate.

pub mod automaton;
pub mod catalog;
pub mod error;
pub mod fic;
pub mod graph;
pub mod halfint;
pub mod ltt;
pub mod map;
pub mod matrix;
pub mod pff;
pub mod pnp;
pub mod scc;
pub mod train_track;
pub mod whitehead;

pub use error::{Error, Result};
pub use graph::{Dir, EdgePath, Graph, Turn};
pub use halfint::HalfInt;
pub use map::{parse_map, EdgePermutation, GraphMap};
