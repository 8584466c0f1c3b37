//! Evolutionary perturbation and stability evaluation for Winograd-schema
//! instances.

pub mod perturb;
pub mod text;
pub mod wordnet;
pub mod analysis;
pub mod augment;
pub mod stopwords;
pub mod predict;
pub mod store;
pub mod eval;
