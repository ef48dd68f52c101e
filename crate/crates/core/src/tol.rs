use serde::{Deserialize, Serialize};

/// Numerical thresholds shared by every routine.
///
/// `exact_tol` guards identities that hold exactly in exact arithmetic,
/// `iter_tol` guards limits of iterations and sampled searches, and
/// `rank_tol` separates numerically zero singular values from the rest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub exact_tol: f64,
    pub iter_tol: f64,
    pub rank_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { exact_tol: 1e-9, iter_tol: 1e-6, rank_tol: 1e-8 }
    }
}

impl Tolerances {
    pub fn new(exact_tol: f64, iter_tol: f64, rank_tol: f64) -> crate::Result<Self> {
        let t = Self { exact_tol, iter_tol, rank_tol };
        if [exact_tol, iter_tol, rank_tol].iter().all(|v| v.is_finite() && *v > 0.0) {
            Ok(t)
        } else {
            Err(crate::Error::InvalidInput(format!("tolerances must be positive: {t:?}")))
        }
    }
}

/// Eigenvalues closer than this are grouped into one cluster.
pub const CLUSTER_TOL: f64 = 1e-4;
