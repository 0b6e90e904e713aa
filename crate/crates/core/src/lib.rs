//! Finite Kripke models for intuitionistic, dual-intuitionistic and
//! bi-intuitionistic modal and tense logics: truth sets, greatest
//! bisimulations, distinguishing formulas and admissible set algebras.

pub mod bisim;
pub mod distinguish;
pub mod formula;
pub mod gen;
pub mod genframe;
pub mod model;
pub mod relation;
pub mod semantics;
pub mod stateset;

pub use formula::{Base, Formula, Fragment};
pub use model::{Flavor, Model, ModelError, Partition};
pub use relation::Relation;
pub use stateset::StateSet;
