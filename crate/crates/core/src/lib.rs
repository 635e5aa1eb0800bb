//! Exact arithmetic on dual resolution graphs of a finite morphism
//! `(g, f): (X, 0) -> (C^2, 0)` from a normal surface singularity.

pub mod blowup;
pub mod cycles;
pub mod error;
pub mod exploration;
pub mod graph;
pub mod invariants;
pub mod linalg;

pub use blowup::{blow_up, BlowupSite, BlowupState};
pub use cycles::CycleDivisor;
pub use error::{Error, Result};
pub use exploration::{explore, generate_famille, ExplorationResult, MichelSystem};
pub use graph::{Arrow, ArrowKind, Issue, ResolutionGraph, ValidationReport, Vertex};
pub use invariants::{Function, FunctionData, InnerRateData, SkeletonData};
pub use linalg::{RatMatrix, RatVector, Rational};
