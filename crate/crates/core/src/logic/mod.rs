//! Reduction, validity, bisimulation, the ♯ translation and a bounded
//! language-equivalence probe.

mod bisim;
mod probe;
mod reduce;
mod sharp;
mod tableau;

pub use bisim::{bisimilar, bisimilarity_blocks, Bisimulation};
pub use probe::{language_equivalence_probe, ProbeParams, ProbeVerdict};
pub use reduce::{measure, reduce, reduce_action, reduce_step, Measure};
pub use sharp::{sharp_action, sharp_formula};
pub use tableau::{validity, Validity, ValidityOptions, DEFAULT_MAX_NODES};
