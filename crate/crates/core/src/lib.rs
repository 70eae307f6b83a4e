//! Tournaments, disjoint paths, subdivisions of complete digraphs and a
//! constructive linkage engine.

pub mod connectivity;
pub mod constructions;
pub mod error;
pub mod linkage;
pub mod path;
pub mod scc;
pub mod subdivision;
pub mod tournament;
pub mod vertex_set;

pub use error::{Error, TournamentError, Violation};
pub use path::Path;
pub use scc::{strong_components, CondensationOrder};
pub use tournament::Tournament;
pub use vertex_set::VertexSet;
