//! Spectral radius, numerical range sampling, the wedge test for roots and
//! the two-norm invertibility classifier.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{precondition, Error, Result};
use crate::matrix::{
    hermitian_eigen, identity, lambda_max, operator_norm, real, smallest_singular_value, spectrum, validate,
    ComplexMatrix, C64,
};
use crate::tol::Tolerances;

pub const DEFAULT_THETA_COUNT: usize = 720;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NumericalRangeSample {
    pub theta_count: usize,
    pub boundary_points: Vec<C64>,
    /// Largest modulus among the boundary points.
    pub radius: f64,
    /// `h(θ) = λ_max(Re(e^{-iθ} x))` on the grid.
    pub support_values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WedgeSpec {
    rho: f64,
}

impl WedgeSpec {
    pub fn new(rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho < PI / 2.0) {
            return Err(Error::InvalidInput(format!("wedge angle {rho} not in (0, π/2)")));
        }
        Ok(Self { rho })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NeumannVerdict {
    Invertible,
    Singular,
}

pub fn spectral_radius(x: &ComplexMatrix) -> Result<f64> {
    crate::matrix::spectral_radius(x)
}

fn rotated_real_part(x: &ComplexMatrix, theta: f64) -> ComplexMatrix {
    let rot = x * C64::from_polar(1.0, -theta);
    (&rot + rot.adjoint()) * real(0.5)
}

/// Support function `h(θ)` of the numerical range.
pub fn support_function(x: &ComplexMatrix, theta: f64) -> Result<f64> {
    lambda_max(&rotated_real_part(x, theta))
}

/// Samples the boundary of the numerical range by a sweep over `theta_count`
/// uniformly spaced directions.
pub fn numerical_range(x: &ComplexMatrix, theta_count: usize) -> Result<NumericalRangeSample> {
    validate(x)?;
    if theta_count < 8 {
        return Err(Error::InvalidInput("theta_count must be at least 8".into()));
    }
    let n = x.nrows();
    let mut points = Vec::with_capacity(theta_count);
    let mut support = Vec::with_capacity(theta_count);
    for k in 0..theta_count {
        let theta = 2.0 * PI * k as f64 / theta_count as f64;
        let (vals, vecs) = hermitian_eigen(&rotated_real_part(x, theta))?;
        let v = vecs.column(n - 1);
        let w = v.dotc(&(x * v));
        support.push(vals[n - 1]);
        points.push(w);
    }
    let radius = points.iter().map(|w| w.norm()).fold(0.0, f64::max);
    Ok(NumericalRangeSample { theta_count, boundary_points: points, radius, support_values: support })
}

/// Numerical radius `ν(x) = max_θ h(θ)`, refined by golden-section search
/// around the best grid angle.
pub fn numerical_radius(x: &ComplexMatrix) -> Result<f64> {
    validate(x)?;
    if x.nrows() == 0 {
        return Ok(0.0);
    }
    let m = 360;
    let step = 2.0 * PI / m as f64;
    let mut best = (0.0, f64::NEG_INFINITY);
    for k in 0..m {
        let th = k as f64 * step;
        let h = support_function(x, th)?;
        if h > best.1 {
            best = (th, h);
        }
    }
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (best.0 - step, best.0 + step);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (support_function(x, c)?, support_function(x, d)?);
    for _ in 0..80 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = support_function(x, c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = support_function(x, d)?;
        }
        if b - a < 1e-12 {
            break;
        }
    }
    Ok(best.1.max(fc).max(fd))
}

/// Largest `|arg w|` over the sampled numerical range boundary and the
/// spectrum, ignoring points within `exact_tol` of 0.
pub fn max_argument(x: &ComplexMatrix, theta_count: usize, tol: &Tolerances) -> Result<f64> {
    let nr = numerical_range(x, theta_count)?;
    let ev = spectrum(x)?;
    Ok(nr
        .boundary_points
        .iter()
        .chain(ev.iter())
        .filter(|w| w.norm() > tol.exact_tol)
        .map(|w| w.arg().abs())
        .fold(0.0, f64::max))
}

/// Numerical range and spectrum inside `W_ρ ∩ {|1/2 - w| ≤ 1/2}`.
pub fn wedge_membership(x: &ComplexMatrix, w: WedgeSpec, theta_count: usize, tol: &Tolerances) -> Result<bool> {
    let nr = numerical_range(x, theta_count)?;
    let ev = spectrum(x)?;
    let slack = 2.0 * PI / theta_count as f64 + 1e-6;
    let half = real(0.5);
    Ok(nr.boundary_points.iter().chain(ev.iter()).all(|p| {
        let in_disk = (half - p).norm() <= 0.5 + tol.exact_tol;
        let in_sector = p.norm() <= tol.exact_tol || p.arg().abs() < w.rho + slack;
        in_disk && in_sector
    }))
}

/// Classifies `T` with `‖1 - T‖ ≤ 1` by the pair `‖1 - T‖`, `‖1 - T/2‖`, and
/// cross-checks the verdict against the smallest singular value.
pub fn sharp_neumann(t: &ComplexMatrix, tol: &Tolerances) -> Result<NeumannVerdict> {
    validate(t)?;
    let n = t.nrows();
    let a = operator_norm(&(identity(n) - t))?;
    if a > 1.0 + tol.exact_tol {
        return Err(precondition(format!("sharp_neumann needs ‖1 - T‖ ≤ 1, got {a}")));
    }
    let b = operator_norm(&(identity(n) - t * real(0.5)))?;
    let near_one = |v: f64| v >= 1.0 - tol.iter_tol && v <= 1.0 + tol.exact_tol;
    let verdict = if near_one(a) && near_one(b) { NeumannVerdict::Singular } else { NeumannVerdict::Invertible };
    let smin = smallest_singular_value(t)?;
    let thr = crate::matrix::rank_threshold(operator_norm(t)?, tol);
    let oracle = if smin <= thr { NeumannVerdict::Singular } else { NeumannVerdict::Invertible };
    if verdict != oracle {
        return Err(Error::Disagreement(format!(
            "norm test says {verdict:?} (‖1-T‖ = {a}, ‖1-T/2‖ = {b}), rank oracle says {oracle:?} (σ_min = {smin})"
        )));
    }
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::root_cai;
    use crate::matrix::{c64, diag_real, from_real_rows, norm};
    use crate::sample::{complex_gaussian, random_f_element, random_f_mixed, random_singular_f_element, rng_from_seed};
    use rand::Rng;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn radius_examples() {
        assert_eq!(spectral_radius(&from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]])).unwrap(), 0.0);
        assert_eq!(spectral_radius(&diag_real(&[2.0, 0.0])).unwrap(), 2.0);
        assert_eq!(spectral_radius(&from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]])).unwrap(), 1.0);
    }

    #[test]
    fn numerical_range_of_nilpotent_is_half_disk() {
        let x = from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let nr = numerical_range(&x, 720).unwrap();
        assert!((nr.radius - 0.5).abs() < 1e-12);
        for p in &nr.boundary_points {
            assert!((p.norm() - 0.5).abs() < 1e-12);
        }
        assert!((numerical_radius(&x).unwrap() - 0.5).abs() < 1e-12);
        // random Rayleigh quotients stay inside and approach the radius
        let mut rng = rng_from_seed(1);
        let mut best: f64 = 0.0;
        for _ in 0..20000 {
            let v = crate::matrix::ComplexVector::from_fn(2, |_, _| complex_gaussian(&mut rng));
            let v = &v / real(v.norm());
            let q = v.dotc(&(&x * &v)).norm();
            assert!(q <= 0.5 + 1e-12);
            best = best.max(q);
        }
        assert!(best > 0.49);
    }

    #[test]
    fn numerical_range_of_hermitian_is_segment() {
        let nr = numerical_range(&diag_real(&[0.0, 1.0]), 64).unwrap();
        assert!((nr.radius - 1.0).abs() < 1e-14);
        for p in &nr.boundary_points {
            assert!(p.im.abs() < 1e-14 && p.re > -1e-14 && p.re < 1.0 + 1e-14);
        }
    }

    #[test]
    fn disk_containment_for_cone_elements() {
        let mut rng = rng_from_seed(2);
        for trial in 0..200 {
            let x = random_f_mixed(&mut rng, 1 + trial % 8);
            let nr = numerical_range(&x, 180).unwrap();
            for p in &nr.boundary_points {
                assert!((real(1.0) - p).norm() <= 1.0 + 1e-6);
            }
        }
    }

    #[test]
    fn radius_chain() {
        let mut rng = rng_from_seed(3);
        for trial in 0..100 {
            let n = 1 + trial % 6;
            let x = crate::sample::random_matrix(&mut rng, n);
            let r = spectral_radius(&x).unwrap();
            let nu = numerical_radius(&x).unwrap();
            let nrm = norm(&x);
            assert!(r <= nu + 1e-9 && nu <= nrm + 1e-9, "{r} {nu} {nrm}");
            // ν ≥ ‖x‖/2 is the classical lower bound
            assert!(nu >= nrm / 2.0 - 1e-9);
        }
    }

    #[test]
    fn wedge_examples() {
        let t = tol();
        let w = WedgeSpec::new(0.1).unwrap();
        assert!(wedge_membership(&(identity(2) * real(0.5)), w, 720, &t).unwrap());
        assert!(!wedge_membership(&(identity(2) * c64(0.0, 0.5)), w, 720, &t).unwrap());
        assert!(WedgeSpec::new(2.0).is_err());
    }

    #[test]
    fn roots_lie_in_shrinking_wedges() {
        let t = tol();
        let mut rng = rng_from_seed(4);
        for trial in 0..10 {
            let x = random_f_mixed(&mut rng, 2 + trial % 5);
            let mut prev = f64::INFINITY;
            for n in [1u32, 2, 4, 8, 16] {
                let u = root_cai(&x, n, &t).unwrap();
                let arg = max_argument(&u, 720, &t).unwrap();
                assert!(arg <= prev + 1e-9, "not shrinking: {arg} after {prev}");
                prev = arg;
                if n >= 2 {
                    let w = WedgeSpec::new(PI / (2.0 * n as f64)).unwrap();
                    assert!(wedge_membership(&u, w, 720, &t).unwrap(), "n = {n}");
                }
            }
        }
    }

    #[test]
    fn neumann_examples() {
        let t = tol();
        assert_eq!(sharp_neumann(&identity(3), &t).unwrap(), NeumannVerdict::Invertible);
        assert_eq!(sharp_neumann(&diag_real(&[2.0, 0.0]), &t).unwrap(), NeumannVerdict::Singular);
        assert_eq!(sharp_neumann(&diag_real(&[2.0, 1.0]), &t).unwrap(), NeumannVerdict::Invertible);
        assert!(matches!(sharp_neumann(&diag_real(&[3.0, 1.0]), &t), Err(Error::Precondition(_))));
    }

    #[test]
    fn neumann_agrees_with_rank_oracle() {
        let t = tol();
        let mut rng = rng_from_seed(5);
        for trial in 0..500 {
            let n = 2 + trial % 7;
            let x = if rng.random_bool(0.5) {
                let r = rng.random_range(0.3..0.99);
                random_f_element(&mut rng, n, r)
            } else {
                let k = rng.random_range(1..n);
                let r = rng.random_range(0.3..1.0);
                random_singular_f_element(&mut rng, n, k, r)
            };
            sharp_neumann(&x, &t).unwrap();
        }
    }
}
