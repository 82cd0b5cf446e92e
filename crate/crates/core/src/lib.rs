//! Pure braid invariants computed from the Delaunay flips of moving points.
//!
//! A pure braid on `n` strands is realised as a motion of `n` points inside a
//! fixed triangle. Every time the Delaunay triangulation of the `n + 3`
//! points flips a diagonal, the change of triangle basis is recorded as an
//! exact rational `(2n+1) x (2n+1)` matrix; the product over the motion is the
//! invariant.

pub mod braid;
pub mod delaunay;
pub mod error;
pub mod fixtures;
pub mod flip;
pub mod geometry;
pub mod kinetics;
pub mod matrix;
pub mod rational;
pub mod svg;

pub use braid::{
    canonical_setup, invariant, parse_word, verify_relations, BraidEngine, BraidWord, CanonicalSetup, InvariantResult,
    Letter, LoopShape, RelationFamily, RelationReport, VerifyOptions,
};
pub use delaunay::{
    build_delaunay, diff_flips, ordered_basis, FlipDiff, FlipEvent, OrderedBasis, Triangle, Triangulation,
};
pub use error::{
    BraidError, DelaunayError, FixtureError, FlipError, GeometryError, KineticsError, LinalgError, WordError,
};
pub use flip::{build_flip_matrix, gamma_generator_name, reverse_roles, FlipMatrix, FlipRoles, LabelMap};
pub use geometry::{incircle, orient2d, validate_general_position, Configuration, LabeledPoint, Point};
pub use kinetics::{configuration_at, extract_flip_sequence, ExtractOptions, FlipSequence, Trajectory, TrajectorySet};
pub use matrix::RationalMatrix;
pub use rational::Rational;
