//! Box embeddings for normalized EL++ ontologies.
//!
//! Concepts are embedded as axis-parallel boxes (a center and a per-axis
//! half-width) and roles as translation vectors. Each of the seven normal
//! forms of an EL++ TBox contributes a hinge loss over the box geometry;
//! training minimizes their sum plus a negative-sampling term with Adam.
//! Trained models support subsumption/link ranking and equivalence
//! entailment with the usual Hits@k, mean rank, and AUC metrics.
//!
//! The `elbe` binary wires these pieces into `train`, `eval-ppi`,
//! `eval-equiv`, `family-demo`, and `gen-synthetic` subcommands; see
//! [`cli`] for the command implementations.

pub mod cli;
pub mod error;
pub mod evaluation;
pub mod geometry;
pub mod losses;
pub mod ontology;
pub mod trainer;

pub use error::{Error, Result};
pub use geometry::{ConceptBox, Margin};
pub use ontology::{AxiomSet, ConceptId, NormalizedAxiom, RelationId, Vocabulary};
pub use trainer::{ModelParams, TrainConfig};
