//! Linking terminal pairs in highly connected tournaments of large minimum
//! out-degree.

mod context;
mod pipeline;
mod restricted;
mod reversing;
mod trace;

pub use context::{close_limit, goodness_violation, select_good_set, GoodSet, LinkageContext};
pub use pipeline::{
    link_terminals, link_terminals_with, reverse_kstar, verify_linkage, LinkOptions, LinkReport,
};
pub use restricted::RestrictedEdgeSet;
pub use reversing::{
    find_reversing_system, verify_reversing_system, ReversingState, ReversingSystem,
};
pub use trace::TraceRecord;
