use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("elements belong to different algebras")]
    AlgebraMismatch,
    #[error("element is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("spectrum too close to zero (min eigenvalue {min:.3e})")]
    SingularSpectrum { min: f64 },
    #[error("element is not positive")]
    NotPositive,
    #[error("idempotent fails the projection-space invariants (defect {defect:.3e})")]
    DegenerateProjection { defect: f64 },
    #[error("vector fails the sphere invariants (defect {defect:.3e})")]
    NotOnSphere { defect: f64 },
    #[error("matrix fails the tangent-space invariants (defect {defect:.3e})")]
    InvalidTangent { defect: f64 },
    #[error("sphere points lie over different projections")]
    DifferentFibers,
    #[error("objects are attached to different base points")]
    BasePointMismatch,
    #[error("vector is not horizontal at the given sphere point")]
    NotHorizontal,
    #[error("matrix is not a member of the isometry group")]
    NotInGroup,
    #[error("vector is not in the range of the projection")]
    NotInRange,
    #[error("element has operator norm >= 1, outside the disk")]
    NotInDisk,
    #[error("element has no positive invertible imaginary part")]
    NotInHalfSpace,
    #[error("convex combination is not representable by a disk point")]
    NotRepresentable,
    #[error("finite-difference family leaves the half-space")]
    StepOutOfHalfSpace,
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
