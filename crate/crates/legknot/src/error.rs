use thiserror::Error;

/// Errors surfaced by the curve-construction and solver pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("both coordinate functions are constant but the balance defect is nonzero")]
    AllCoefficientsZero,

    #[error("interpolation constraints are linearly dependent or inconsistent (residual {residual:.3e})")]
    SingularSystem { residual: f64 },

    #[error("tangential crossing near t = {t:.6}, s = {s:.6}: tangents are parallel")]
    TangentialCrossing { t: f64, s: f64 },

    #[error("crossing detection failed to converge from the seed grid (grid size {grid})")]
    SeedGridTooCoarse { grid: usize },

    #[error("Z values at crossing ({t_lo:.6}, {t_hi:.6}) are tied within tolerance")]
    ZTie { t_lo: f64, t_hi: f64 },

    #[error("no circle radius above {min_radius:.3e} keeps the insertion disjoint from the diagram at tau = {tau:.6}")]
    NoRoomForCircle { tau: f64, min_radius: f64 },

    #[error("spatial lift of the assembled curve self-intersects (parameters {t:.6} and {s:.6})")]
    SelfIntersection { t: f64, s: f64 },

    #[error("knot-type verification failed up to the degree cap {cap}: {details}")]
    DegreeCapExceeded { cap: usize, details: String },

    #[error("malformed Gauss code: {0}")]
    MalformedCode(String),

    #[error("curve is not Legendrian: residual {residual:.3e} exceeds {tol:.3e}")]
    NotLegendrian { residual: f64, tol: f64 },

    #[error("inhomogeneous system needs polynomial degree parameter n >= 2, got {n}")]
    DegreeTooSmall { n: usize },

    #[error("curve leaves the right half-sphere: x1({t:.6}) = {x1:.3e}")]
    NotInRightHalfSphere { t: f64, x1: f64 },

    #[error("projection is undefined at the point at infinity (1, 0)")]
    AtInfinity,

    #[error("Newton iteration for the forward flow map did not converge at t = {t} (residual {residual:.3e})")]
    NoConvergence { t: f64, residual: f64 },

    #[error("front lift is ill-conditioned at the cusp t = {t:.6}: |y'| = {dy:.3e}, |z'| = {dz:.3e}")]
    CuspIllConditioned { t: f64, dy: f64, dz: f64 },

    #[error("crossing slopes are equal; the front convention cannot order the strands")]
    EqualSlopes,

    #[error("link still meets the ball of radius {radius} at the largest grid time (min distance {last_min:.3e})")]
    NotEscapedInGrid { radius: f64, last_min: f64 },

    #[error("degenerate field: {0}")]
    DegenerateField(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
