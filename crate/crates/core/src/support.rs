//! Support projections `s(x)`, peak projections `1 - s(x)`, and the two
//! limit formulas that realize them for cone elements.

use serde::{Deserialize, Serialize};

use crate::calculus::bai_sequence;
use crate::cone::in_f;
use crate::error::{precondition, Error, Result};
use crate::matrix::{
    column_space, identity, lambda_min, norm, operator_norm, projector, real, trace, validate, ComplexMatrix, C64,
};
use crate::tol::Tolerances;

/// Exponent used for the averaged route `e_n → s(x)`.
pub const BAI_LIMIT_N: u64 = 1 << 30;

/// Largest exponent tried by the power route.
pub const POWER_LIMIT_MAX: u64 = 1 << 62;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupportRoute {
    Svd,
    BaiLimit,
    PowerLimit,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SupportResult {
    #[serde(with = "crate::matrix::serde_matrix")]
    pub s: ComplexMatrix,
    pub route: SupportRoute,
    /// `max(‖s x - x‖, ‖x s - x‖)`.
    pub residual: f64,
}

/// All three routes and their pairwise operator-norm distances.
#[derive(Debug, Clone)]
pub struct SupportRoutes {
    pub svd: SupportResult,
    pub bai_limit: SupportResult,
    pub power_limit: SupportResult,
    pub svd_vs_bai: f64,
    pub svd_vs_power: f64,
    pub bai_vs_power: f64,
}

impl SupportRoutes {
    pub fn max_disagreement(&self) -> f64 {
        self.svd_vs_bai.max(self.svd_vs_power).max(self.bai_vs_power)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityState {
    #[serde(with = "crate::matrix::serde_matrix")]
    rho: ComplexMatrix,
}

impl DensityState {
    pub fn new(rho: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        validate(&rho)?;
        if norm(&(&rho - rho.adjoint())) > tol.exact_tol * norm(&rho).max(1.0) {
            return Err(Error::InvalidInput("density matrix is not Hermitian".into()));
        }
        if lambda_min(&rho)? < -tol.exact_tol {
            return Err(Error::InvalidInput("density matrix is not positive".into()));
        }
        let tr = trace(&rho).re;
        if !(-tol.exact_tol..=1.0 + tol.exact_tol).contains(&tr) {
            return Err(Error::InvalidInput(format!("density matrix has trace {tr}")));
        }
        Ok(Self { rho })
    }

    /// Vector state `⟨· v, v⟩` for a unit vector `v`.
    pub fn vector(v: &[C64], tol: &Tolerances) -> Result<Self> {
        let v = crate::matrix::ComplexVector::from_column_slice(v);
        let nv = v.norm();
        if nv == 0.0 {
            return Err(Error::InvalidInput("zero vector".into()));
        }
        let u = v / real(nv);
        Self::new(&u * u.adjoint(), tol)
    }

    pub fn rho(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn eval(&self, x: &ComplexMatrix) -> C64 {
        trace(&(&self.rho * x))
    }
}

fn check_nonzero_f(x: &ComplexMatrix, tol: &Tolerances, what: &str) -> Result<()> {
    if !in_f(x, tol)? {
        return Err(precondition(format!("{what} needs ‖1 - x‖ ≤ 1")));
    }
    if norm(x) <= tol.exact_tol {
        return Err(precondition(format!("{what} needs x ≠ 0")));
    }
    Ok(())
}

fn support_residual(s: &ComplexMatrix, x: &ComplexMatrix) -> f64 {
    norm(&(s * x - x)).max(norm(&(x * s - x)))
}

fn svd_support(x: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    Ok(projector(&column_space(x, tol)?))
}

/// `s(x)` as the range projection of `x` (SVD route).
pub fn support_projection(x: &ComplexMatrix, tol: &Tolerances) -> Result<SupportResult> {
    check_nonzero_f(x, tol, "support_projection")?;
    let s = svd_support(x, tol)?;
    Ok(SupportResult { residual: support_residual(&s, x), s, route: SupportRoute::Svd })
}

/// `(z*z)^n` with `z = 1 - x/2`, squared until two successive iterates
/// differ by less than `iter_tol`. Returns the limit and the exponent reached.
pub fn power_limit_with_exponent(x: &ComplexMatrix, n_max: u64, tol: &Tolerances) -> Result<(ComplexMatrix, u64)> {
    if !in_f(x, tol)? {
        return Err(precondition("power_limit_projection needs ‖1 - x‖ ≤ 1"));
    }
    let n = x.nrows();
    let z = identity(n) - x * real(0.5);
    let mut w = z.adjoint() * &z;
    let mut e = 1u64;
    loop {
        if e > n_max / 2 {
            let w2 = &w * &w;
            return Err(Error::NoConvergence { routine: "power limit", residual: operator_norm(&(w2 - &w))? });
        }
        let w2 = &w * &w;
        let w2 = (&w2 + w2.adjoint()) * real(0.5);
        let step = operator_norm(&(&w2 - &w))?;
        w = w2;
        e *= 2;
        if step < tol.iter_tol {
            return Ok((w, e));
        }
    }
}

/// Projection onto `Ker x` as the limit of `(z*z)^n`.
pub fn power_limit_projection(x: &ComplexMatrix, n_max: u64, tol: &Tolerances) -> Result<ComplexMatrix> {
    power_limit_with_exponent(x, n_max, tol).map(|(w, _)| w)
}

/// Computes `s(x)` by all three routes and compares them.
pub fn support_routes(x: &ComplexMatrix, tol: &Tolerances) -> Result<SupportRoutes> {
    check_nonzero_f(x, tol, "support_routes")?;
    let s_svd = svd_support(x, tol)?;
    let e = bai_sequence(x, BAI_LIMIT_N, tol)?;
    let s_bai = (&e + e.adjoint()) * real(0.5);
    let s_pow = identity(x.nrows()) - power_limit_projection(x, POWER_LIMIT_MAX, tol)?;
    let d = |a: &ComplexMatrix, b: &ComplexMatrix| operator_norm(&(a - b));
    let out = SupportRoutes {
        svd_vs_bai: d(&s_svd, &s_bai)?,
        svd_vs_power: d(&s_svd, &s_pow)?,
        bai_vs_power: d(&s_bai, &s_pow)?,
        svd: SupportResult { residual: support_residual(&s_svd, x), s: s_svd, route: SupportRoute::Svd },
        bai_limit: SupportResult { residual: support_residual(&s_bai, x), s: s_bai, route: SupportRoute::BaiLimit },
        power_limit: SupportResult { residual: support_residual(&s_pow, x), s: s_pow, route: SupportRoute::PowerLimit },
    };
    Ok(out)
}

/// Projection onto the sum of the ranges of `xs` and the support of the
/// convex combination `Σ α_k x_k`.
pub fn join_supports(xs: &[ComplexMatrix], alphas: &[f64], tol: &Tolerances) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if xs.is_empty() || xs.len() != alphas.len() {
        return Err(Error::InvalidInput("need one weight per element".into()));
    }
    let n = xs[0].nrows();
    for x in xs {
        crate::matrix::check_same_dim(x, n)?;
        if !in_f(x, tol)? {
            return Err(precondition("join_supports needs every x_k in F"));
        }
    }
    if alphas.iter().any(|&a| !(a > 0.0)) || (alphas.iter().sum::<f64>() - 1.0).abs() > tol.exact_tol {
        return Err(precondition("weights must be positive and sum to 1"));
    }
    let mut stacked = ComplexMatrix::zeros(n, n * xs.len());
    for (k, x) in xs.iter().enumerate() {
        stacked.view_mut((0, k * n), (n, n)).copy_from(x);
    }
    let s_join = projector(&column_space(&stacked, tol)?);
    let z = xs.iter().zip(alphas).fold(ComplexMatrix::zeros(n, n), |acc, (x, a)| acc + x * real(*a));
    let s_sum = svd_support(&z, tol)?;
    Ok((s_join, s_sum))
}

/// `1 - s(x)`.
pub fn peak_projection(x: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    let s = support_projection(x, tol)?;
    Ok(identity(x.nrows()) - s.s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateVanishing {
    pub phi_x: C64,
    pub phi_s: f64,
    pub consistent: bool,
}

/// Compares `φ(x) = 0` with `φ(s(x)) = 0` for the state `φ = tr(ρ ·)`.
pub fn state_vanishing_check(x: &ComplexMatrix, rho: &DensityState, tol: &Tolerances) -> Result<StateVanishing> {
    check_nonzero_f(x, tol, "state_vanishing_check")?;
    crate::matrix::check_same_dim(rho.rho(), x.nrows())?;
    let s = svd_support(x, tol)?;
    let phi_x = rho.eval(x);
    let phi_s = rho.eval(&s).re;
    let consistent = (phi_x.norm() < tol.iter_tol) == (phi_s.abs() < tol.iter_tol);
    Ok(StateVanishing { phi_x, phi_s, consistent })
}
