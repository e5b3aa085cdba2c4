//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid filter: {0}")]
    InvalidFilter(String),

    #[error("unknown builtin filter `{0}`")]
    UnknownBuiltin(String),

    #[error("dilation must be an integer >= 2, got {0}")]
    InvalidDilation(i64),

    #[error("filter file, line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("duplicate coefficient index {0}")]
    DuplicateIndex(i64),

    #[error(
        "quadrature did not converge to {tol:e}: estimate ({est_re:e}, {est_im:e}), \
         error bound {bound:e}"
    )]
    QuadratureNonConvergence {
        est_re: f64,
        est_im: f64,
        bound: f64,
        tol: f64,
    },

    #[error("erf argument z = ({re}, {im}) lies in the overflow region (Im^2 - Re^2 > {bound})")]
    ErfOverflow { re: f64, im: f64, bound: f64 },

    #[error("Landau level {0} outside the supported range 0..=10")]
    UnsupportedLevel(u32),

    #[error("invalid Monte Carlo configuration: {0}")]
    InvalidMonteCarlo(String),

    #[error("filling factor must lie in (0, 1], got {0}")]
    InvalidFilling(f64),

    #[error("Ewald summation did not converge: {0}")]
    EwaldNonConvergence(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
