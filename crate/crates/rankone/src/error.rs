use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is numerically singular")]
    SingularMatrix,
    #[error("element is not in N-bar (residual {residual:.3e})")]
    NotInNbar { residual: f64 },
    #[error("element lies on the complement of the open Bruhat cell (minor {minor:.3e})")]
    BruhatCell { minor: f64 },
    #[error("integral diverges: {0}")]
    Divergent(String),
    #[error("pole at {location}")]
    Pole { location: String },
    #[error("quadrature did not converge: estimated error {error:.3e}")]
    Nonconvergent { error: f64 },
    #[error("point lies on the antidiagonal")]
    Antidiagonal,
    #[error("boundary points coincide")]
    Diagonal,
    #[error("input must differ from the identity")]
    IdentityInput,
    #[error("test function support exceeds the truncation window")]
    SupportExceedsTruncation,
    #[error("Monte-Carlo standard error {sigma:.3e} exceeds budget {budget:.3e}")]
    McVariance { sigma: f64, budget: f64 },
    #[error("least-squares fit is ill-conditioned (residual {residual:.3e})")]
    IllConditioned { residual: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
