//! Membership tests for the cone `F = {x : ‖1 - x‖ ≤ 1}`, its half
//! `½F = {x : ‖1 - 2x‖ ≤ 1}`, accretivity, strict real positivity and the
//! cone `R+ F`.

use serde::{Deserialize, Serialize};

use crate::error::{precondition, Error, Result};
use crate::matrix::{identity, lambda_min, norm, operator_norm, real, validate, ComplexMatrix};
use crate::tol::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeReport {
    #[serde(rename = "in_F")]
    pub in_f: bool,
    #[serde(rename = "in_halfF")]
    pub in_half_f: bool,
    pub accretive: bool,
    pub strictly_real_positive: bool,
    pub best_cone_constant: Option<f64>,
}

/// `‖1 - x‖`.
pub fn distance_from_one(x: &ComplexMatrix) -> Result<f64> {
    validate(x)?;
    operator_norm(&(identity(x.nrows()) - x))
}

/// Membership in `F`, decided by `‖1 - x‖ ≤ 1 + exact_tol` and cross-checked
/// against `λ_min(x + x* - x x*) = 1 - ‖1 - x‖²`.
pub fn in_f(x: &ComplexMatrix, tol: &Tolerances) -> Result<bool> {
    let d = distance_from_one(x)?;
    let gram = x + x.adjoint() - x * x.adjoint();
    let lmin = lambda_min(&gram)?;
    let scale = d.mul_add(d, 1.0);
    let gap = (lmin - (1.0 - d * d)).abs();
    if gap > 10.0 * tol.exact_tol * scale {
        return Err(Error::Disagreement(format!(
            "cone characterizations disagree: 1-‖1-x‖² = {}, λ_min(x+x*-xx*) = {lmin}",
            1.0 - d * d
        )));
    }
    Ok(d <= 1.0 + tol.exact_tol)
}

pub fn in_half_f(x: &ComplexMatrix, tol: &Tolerances) -> Result<bool> {
    validate(x)?;
    let d = operator_norm(&(identity(x.nrows()) - x * real(2.0)))?;
    Ok(d <= 1.0 + tol.exact_tol)
}

/// Numerical range in the closed right half plane: `x + x* ⪰ 0`.
pub fn accretive(x: &ComplexMatrix, tol: &Tolerances) -> Result<bool> {
    validate(x)?;
    Ok(lambda_min(&(x + x.adjoint()))? * 0.5 >= -tol.exact_tol)
}

/// `λ_min(Re x) > exact_tol`, for `x ∈ F`.
pub fn strictly_real_positive(x: &ComplexMatrix, tol: &Tolerances) -> Result<bool> {
    if !in_f(x, tol)? {
        return Err(precondition("strict real positivity is only defined on F"));
    }
    Ok(lambda_min(&(x + x.adjoint()))? * 0.5 > tol.exact_tol)
}

/// Largest `C` with `x + x* - C x*x ⪰ -exact_tol`, found by bisection.
///
/// Then `C x ∈ F`, which is checked before returning. `None` for the zero
/// matrix, for non-accretive `x`, and when no constant above `iter_tol` works.
pub fn cone_constant(x: &ComplexMatrix, tol: &Tolerances) -> Result<Option<f64>> {
    validate(x)?;
    let xnorm = norm(x);
    if xnorm <= tol.exact_tol {
        return Ok(None);
    }
    let re2 = x + x.adjoint();
    let gram = x.adjoint() * x;
    let slack = |c: f64| -> Result<f64> { lambda_min(&(&re2 - &gram * real(c))) };
    if slack(0.0)? < -tol.exact_tol {
        return Ok(None);
    }
    let mut lo = 0.0;
    let mut hi = 1.0 / (xnorm * xnorm);
    while slack(hi)? >= -tol.exact_tol {
        lo = hi;
        hi *= 2.0;
        if hi > 1e15 {
            return Err(Error::Breakdown("cone constant bracket did not close".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if slack(mid)? >= -tol.exact_tol {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    if lo < tol.iter_tol {
        return Ok(None);
    }
    let scaled = x * real(lo);
    let d = distance_from_one(&scaled)?;
    if d > 1.0 + lo * tol.exact_tol + 10.0 * tol.exact_tol {
        return Err(Error::Disagreement(format!("C·x escapes F for C = {lo}: ‖1 - Cx‖ = {d}")));
    }
    Ok(Some(lo))
}

pub fn cone_report(x: &ComplexMatrix, tol: &Tolerances) -> Result<ConeReport> {
    let in_f = in_f(x, tol)?;
    Ok(ConeReport {
        in_f,
        in_half_f: in_half_f(x, tol)?,
        accretive: accretive(x, tol)?,
        strictly_real_positive: in_f && strictly_real_positive(x, tol)?,
        best_cone_constant: cone_constant(x, tol)?,
    })
}
