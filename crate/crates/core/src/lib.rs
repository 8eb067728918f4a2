//! Exact finite-field laboratory for band quadratic digit forms over F_q[t].

pub mod cyclotomic;
pub mod bandform;
pub mod budget;
pub mod error;
pub mod gf;
pub mod polyring;
pub mod ranklab;
pub mod sieve;
pub mod verify;

pub use bandform::{BandForm, BandSpec, LaurentSymbol};
pub use cyclotomic::CountVector;
pub use error::{Error, Result};
pub use gf::{Character, CharacterSelector, FieldElement, FieldSpec, Fq};
pub use polyring::{FactorMode, FactorMultiset, Poly, PolyRing};
pub use budget::Budget;
pub use ranklab::{MatrixFq, RadicalReport, ReciprocalSymbol};
