//! Homophily measures for labeled graphs, with randomized checks of their
//! desirable properties, graph generators and experiment drivers.

pub mod class_matrix;
pub mod cli;
pub mod directed;
pub mod error;
pub mod experiments;
pub mod generators;
pub mod graph;
pub mod io;
pub mod measures;
pub mod properties;
pub mod rng;

pub use class_matrix::{ClassAdjacency, ClassMarginals, NormalizedClassMatrix};
pub use error::{Error, Result};
pub use graph::{Edge, LabeledGraph, MergeMode, Preprocess};
pub use measures::{Measure, MeasureValue, UndefinedReason};
