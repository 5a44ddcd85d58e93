//! Dynamic epistemic temporal logic: Kripke models with a yesterday
//! relation, temporal action models, product update, property checks,
//! reduction-based validity, bisimulation and the YDEL translation.

pub mod action;
pub mod cli;
pub mod demo;
pub mod error;
pub mod fixtures;
pub mod formula;
pub mod frame;
pub mod io;
pub mod kripke;
pub mod logic;
pub mod semantics;
pub mod workspace;

pub use action::ActionModel;
pub use error::{Error, Result};
pub use formula::{Formula, Signature};
pub use frame::{Closure, Depth, Property, PropertyReport, Witness};
pub use kripke::KripkeModel;
pub use workspace::Workspace;
