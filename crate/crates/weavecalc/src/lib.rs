//! Combinatorial calculator for trivalent surface graphs and their sheaf
//! counts: coloring counters with a chromatic-polynomial oracle, local graph
//! surgeries with count predictions, a chain-level handle-attachment engine
//! over prime fields, and count-based cobordism obstructions.

pub mod chromatic;
pub mod cobordism;
pub mod coloring;
pub mod formats;
pub mod homalg;
pub mod obstruct;
pub mod poly;
pub mod randgen;
pub mod surface_map;
pub mod weave_moves;
