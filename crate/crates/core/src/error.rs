use crate::numkernel::{Definiteness, NumError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Num(#[from] NumError),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("{what} must be Hermitian (relative deviation {deviation:.3e})")]
    NotHermitian { what: &'static str, deviation: f64 },
    #[error("{what} must be symmetric (relative deviation {deviation:.3e})")]
    NotSymmetric { what: &'static str, deviation: f64 },
    #[error("{what} must be positive definite, found {}", .definiteness.status)]
    NotPositiveDefinite {
        what: &'static str,
        definiteness: Definiteness,
    },
    #[error("1 {sign} 𝓕 is singular (reciprocal condition {margin:.3e})")]
    SpectralGate { sign: char, margin: f64 },
    #[error("1 + κ is singular, no fundamental matrix (reciprocal condition {margin:.3e})")]
    CayleyUndefined { margin: f64 },
    #[error("1 + 𝓕̃𝓕 is singular (reciprocal condition {margin:.3e})")]
    CompositionGate { margin: f64 },
    #[error("matrix is not Hamiltonian: J𝓕 asymmetry {asymmetry:.3e}")]
    NotHamiltonian { asymmetry: f64 },
    #[error("matrix is not canonical: ‖κᵀJκ − J‖ = {defect:.3e}")]
    NotCanonical { defect: f64 },
    #[error("degenerate stationary phase: fiber Hessian determinant {det_abs:.3e} (reciprocal condition {margin:.3e})")]
    DegenerateStationaryPhase { det_abs: f64, margin: f64 },
    #[error("image of the Lagrangian plane is not a graph over x (block {block}, reciprocal condition {margin:.3e})")]
    NotAGraph { block: &'static str, margin: f64 },
    #[error("no kernel of normal form: θ-to-x coupling block is singular (reciprocal condition {margin:.3e})")]
    NoKernelNormalForm { margin: f64 },
    #[error("phase function is rank deficient: rows {rows:?} of the θ-Hessian block are dependent")]
    RankDeficientPhase { rows: Vec<usize> },
    #[error("symbol not admissible: {0}")]
    Inadmissible(String),
    #[error("quadrature: {0}")]
    Quadrature(String),
}

pub type Result<T> = std::result::Result<T, Error>;
