//! Extremal parameters and exact searches: level-freeness and span
//! parameters, largest free families, minimum copy counts, free-family
//! counting, tree-copy machinery, and supersaturation probes.

pub mod params;
pub mod probe;
pub mod search;
pub mod trees;
pub mod window;

pub use params::{density_exponent, max_free_levels, max_span, PosetParams, SubposetMode};
pub use probe::{supersat_probe, ProbeGenerator, ProbeReport};
pub use search::{
    count_free_families, largest_free_by_scan, largest_free_family, middle_copy_count, min_copies,
    revolving_door,
};
pub use trees::{
    layered_witness_check, tree_count, Digraph, DirectedTree, LayeredBound, LayeredWitness,
    TreeCountingRun,
};
pub use window::{find_window_copy, max_span_in_window, window_embeds, AbstractSet};
