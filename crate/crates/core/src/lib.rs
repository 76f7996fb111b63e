//! Combinatorial model of diameters of the open unit disk.
//!
//! A diameter `L` transverse to the standard diameter `L0` is encoded as an
//! open meander: the order in which `L` visits its crossings with `L0`, the
//! side of its first arc, and the exact rational area of every face of
//! `D \ (L ∪ L0)`. On top of that representation the crate computes Maslov
//! indices, runs the extremal-point removal moves, and assembles a
//! replayable certificate bounding the Hofer energy needed to bring `L`
//! back to `L0` by `μmax − μmin − 1/2`.

pub mod certificate;
pub mod engine;
pub mod error;
pub mod format;
pub mod maslov;
pub mod meander;
pub mod moves;
pub mod rational;
pub mod regions;
pub mod shape;
pub mod svg;
pub mod symmetry;
pub mod verify;

pub use certificate::{render as render_certificate, replay, CertificateText};
pub use engine::{untangle, Certificate, EnergyLedger, SweepMode, SweepRecord, Verdict};
pub use error::{Error, ParseError, ParseErrorClass, Result};
pub use maslov::{maslov_indices, winding_gap_oracle, IndexTable};
pub use meander::{assign_areas, FaceId, Meander};
pub use rational::Rational;
pub use shape::{enumerate_shapes, validate, MeanderShape, Side, ValidationReport};
pub use symmetry::{apply_symmetry, SymmetryTransform};
