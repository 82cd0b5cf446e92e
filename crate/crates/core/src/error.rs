use thiserror::Error;

use crate::delaunay::Triangle;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational literal {0:?}; expected \"p/q\" or an integer")]
pub struct ParseRationalError(pub String);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch in {op}: {left_rows}x{left_cols} vs {right_rows}x{right_cols}")]
    DimensionMismatch {
        op: &'static str,
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("{op} requires a square matrix, got {rows}x{cols}")]
    NotSquare { op: &'static str, rows: usize, cols: usize },
    #[error("singular matrix")]
    Singular,
    #[error("malformed matrix: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("degenerate circumcircle: the three points are collinear")]
    DegenerateCircumcircle,
    #[error("duplicate point index {0}")]
    DuplicateIndex(usize),
    #[error("points {0} and {1} share the label {2}")]
    CoincidentLabels(usize, usize, String),
    #[error("boundary must name three distinct point indices present in the configuration")]
    BadBoundary,
    #[error("boundary triangle is degenerate")]
    DegenerateBoundary,
    #[error("point {0} is not strictly inside the boundary triangle")]
    OutsideBoundary(usize),
    #[error("unknown point index {0}")]
    UnknownIndex(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DelaunayError {
    #[error("degenerate input: points {0:?} are cocircular with an empty circumdisk")]
    Cocircular([usize; 4]),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlipError {
    #[error("coincident labels: zeta_{0} = zeta_{1}")]
    CoincidentLabels(usize, usize),
    #[error("bases do not differ by the flip {removed:?} -> {inserted:?}: {detail}")]
    BasisMismatch {
        removed: [usize; 2],
        inserted: [usize; 2],
        detail: String,
    },
    #[error("missing label for point {0}")]
    MissingLabel(usize),
    #[error("invalid flip roles ({0}, {1}, {2}, {3}): indices must be distinct")]
    InvalidRoles(usize, usize, usize, usize),
    #[error("triangle {0} missing from basis")]
    MissingTriangle(Triangle),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KineticsError {
    #[error("time {0} outside [0, 1]")]
    TimeOutOfRange(String),
    #[error("invalid trajectory for point {index}: {reason}")]
    BadTrajectory { index: usize, reason: String },
    #[error("unresolved codimension-2 event in ({t_lo}, {t_hi}); perturb trajectories")]
    UnresolvedEvent { t_lo: String, t_hi: String },
    #[error("sample time {0} stays degenerate after jitter retries")]
    PersistentDegeneracy(String),
    #[error("endpoint configuration not in general position: {0}")]
    DegenerateEndpoint(DelaunayError),
    #[error("sampling step must be positive and larger than the floor")]
    BadStep,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Flip(#[from] FlipError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("token {position} ({token:?}): malformed, expected b(i,j) or b(i,j)^-1")]
    Malformed { position: usize, token: String },
    #[error("token {position} ({token:?}): i < j required")]
    Order { position: usize, token: String },
    #[error("token {position} ({token:?}): strand index exceeds n = {n}")]
    OutOfRange { position: usize, token: String, n: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BraidError {
    #[error("canonical setup requires n >= 1")]
    EmptySetup,
    #[error("could not place {0} strands in general position")]
    Placement(usize),
    #[error("loop for b({i},{j}) passes too close to point {blocker}")]
    LoopClearance { i: usize, j: usize, blocker: usize },
    #[error("strand index out of range for this setup: {0}")]
    StrandOutOfRange(usize),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Kinetics(#[from] KineticsError),
    #[error(transparent)]
    Flip(#[from] FlipError),
    #[error(transparent)]
    Delaunay(#[from] DelaunayError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FixtureError {
    #[error("cannot read fixture {file}: {reason}")]
    Io { file: String, reason: String },
    #[error("fixture {0} missing")]
    Missing(String),
    #[error("checksum mismatch for {file}: manifest {expected}, actual {actual}")]
    Checksum {
        file: String,
        expected: String,
        actual: String,
    },
    #[error("malformed fixture {file}: {detail}")]
    Parse { file: String, detail: String },
    #[error("{suite}: {what} differs at entry ({row}, {col}): expected {expected}, got {actual}")]
    Mismatch {
        suite: String,
        what: String,
        row: usize,
        col: usize,
        expected: String,
        actual: String,
    },
    #[error("{suite}: {detail}")]
    Failed { suite: String, detail: String },
}
