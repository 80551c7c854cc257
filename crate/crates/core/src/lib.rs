//! Constructive Lovász Local Lemma tooling for colorings of graphs and
//! groups: certificates and resampling, non-repetitive graph colorings,
//! free subshifts on finite patches, Schreier graphs and finite models of
//! the subgroup space.

pub mod graph;
pub mod groups;
pub mod lll;
pub mod schreier;
pub mod subgroup_space;
pub mod subshift;
pub mod thue;
