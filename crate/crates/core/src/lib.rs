//! Multi-prototype word senses for lexical entailment.
//!
//! Occurrences of each word are clustered into senses, turned into PPMI
//! prototypes, and scored for entailment with balAPinc or with ConVecs, an
//! SVM over concatenated latent vectors.

pub mod convecs;
pub mod corpus;
pub mod entail;
pub mod error;
pub mod harness;
pub mod lexsim;
pub mod senses;
pub mod synth;
pub mod vsm;

pub use error::{Error, Result};
