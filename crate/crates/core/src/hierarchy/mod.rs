//! The moment hierarchy `las_t`, the two-point bounds `ϑ` and `ϑ′`, the
//! three-point bound, and measure recovery by Möbius inversion.
//!
//! `las_t(G)` maximises `Σ_x w(x) y_{{x}}` over vectors `y` indexed by the
//! independent sets of size at most `2t`, subject to `y ≥ 0`, `y_∅ = 1` and
//! `M_t(y) ⪰ 0`. The solver's primal matrix on the PSD block is a kernel `K`
//! over `I_t` that is feasible for the dual program `las_t(G)*`; every
//! reported bound is `K(∅, ∅)` after [`verify_dual_certificate`] has checked
//! `K` against the graph directly.

mod lasserre;
mod moebius;
mod theta;
mod three_point;

use faer::Mat;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::basis::BasisError;
use crate::graph::GraphError;
use crate::sdp::{SdpError, SolveStatus, SolverOptions};

pub use lasserre::{
    assemble_lasserre, assemble_lasserre_with, indicator_solution, las_bound, las_bound_with,
    verify_dual_certificate, CertificateReport, MomentCheck, MomentProgram, Violation,
};
pub use moebius::{inclusion_exclusion, moebius_recover_measure, zeta_transform};
pub use theta::{
    lift_theta_prime_solution, theta, theta_moment, theta_prime, theta_with, two_point_kernel, two_point_program,
    TwoPointKernel,
};
pub use three_point::{
    three_point_bound, three_point_bound_with, three_point_direct, three_point_direct_with, three_point_program,
};

/// Tolerance for certificate verification.
pub const VERIFY_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum HierarchyError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    Sdp(#[from] SdpError),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl HierarchyError {
    /// Whether the error comes from a size cap.
    pub fn is_cap(&self) -> bool {
        matches!(
            self,
            HierarchyError::Graph(GraphError::CapExceeded { .. })
                | HierarchyError::Basis(BasisError::CapExceeded { .. })
                | HierarchyError::Sdp(SdpError::CapExceeded { .. })
        )
    }
}

/// Options shared by the bound computations.
#[derive(Clone, Debug)]
pub struct BoundOptions {
    pub solver: SolverOptions,
    /// Tolerance for the certificate check.
    pub verify_tol: f64,
    /// Cap on `|I_{2t}|`.
    pub basis_cap: usize,
}

impl Default for BoundOptions {
    fn default() -> Self {
        Self {
            solver: SolverOptions::default(),
            verify_tol: VERIFY_TOL,
            basis_cap: crate::basis::DEFAULT_BASIS_CAP,
        }
    }
}

impl BoundOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            solver: SolverOptions {
                tol,
                ..SolverOptions::default()
            },
            ..Self::default()
        }
    }
}

/// Dual-side object proving a bound.
#[derive(Clone, Debug, PartialEq)]
pub enum Certificate {
    /// Kernel `K` over `I_t × I_t`, rows in canonical basis order.
    Kernel { level: usize, matrix: Mat<f64> },
    /// Coefficients of `f = Σ f_k G_k^n` for the zonal sphere bound.
    Polynomial { n: usize, theta: f64, coefficients: Vec<f64> },
}

impl Certificate {
    /// SHA-256 over the little-endian bytes of the certificate data.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        match self {
            Certificate::Kernel { level, matrix } => {
                h.update(b"kernel");
                h.update((*level as u64).to_le_bytes());
                h.update((matrix.nrows() as u64).to_le_bytes());
                for j in 0..matrix.ncols() {
                    for i in 0..matrix.nrows() {
                        h.update(matrix[(i, j)].to_le_bytes());
                    }
                }
            }
            Certificate::Polynomial { n, theta, coefficients } => {
                h.update(b"polynomial");
                h.update((*n as u64).to_le_bytes());
                h.update(theta.to_le_bytes());
                for c in coefficients {
                    h.update(c.to_le_bytes());
                }
            }
        }
        hex::encode(h.finalize())
    }
}

/// A bound with its certificate and verification outcome.
#[derive(Clone, Debug, Serialize)]
pub struct BoundResult {
    /// The bound as computed by the solver.
    pub value: f64,
    /// Objective of the opposite side of the primal–dual pair.
    pub dual_value: f64,
    /// `|value − dual_value|`.
    pub gap: f64,
    pub status: SolveStatus,
    pub iterations: usize,
    /// How far the certificate is from feasible; zero or negative when it
    /// passes with room to spare.
    pub verification_margin: f64,
    /// The bound backed by a verified certificate, if any.
    pub certified_bound: Option<f64>,
    #[serde(skip)]
    pub certificate: Option<Certificate>,
    /// Optimal moment vector over `I_{2t}` (including `y_∅ = 1`), when the
    /// computation has one.
    #[serde(skip)]
    pub moments: Option<Vec<f64>>,
}

impl BoundResult {
    pub fn is_certified(&self) -> bool {
        self.certified_bound.is_some()
    }

    pub fn certificate_digest(&self) -> Option<String> {
        self.certificate.as_ref().map(Certificate::digest)
    }

    /// The result for a program with no variables: value zero, certified
    /// by the zero kernel.
    pub(crate) fn trivial(level: usize, kernel_dim: usize) -> Self {
        Self {
            value: 0.0,
            dual_value: 0.0,
            gap: 0.0,
            status: SolveStatus::Optimal,
            iterations: 0,
            verification_margin: 0.0,
            certified_bound: Some(0.0),
            certificate: Some(Certificate::Kernel {
                level,
                matrix: Mat::zeros(kernel_dim, kernel_dim),
            }),
            moments: Some(vec![1.0]),
        }
    }
}
