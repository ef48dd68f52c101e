//! Concrete algebras used as worked examples: a two-dimensional algebra with
//! no nontrivial idempotent ideals, similarity orbits `R D R⁻¹` of the
//! diagonal, and discretized Volterra operators.

use serde::{Deserialize, Serialize};

use crate::algebra::FDAlgebra;
use crate::calculus::bai_sequence;
use crate::error::{Error, Result};
use crate::matrix::{from_real_rows, identity, is_lower_triangular, operator_norm, real, unit, ComplexMatrix};
use crate::tol::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExampleName {
    TwoDim,
    Rdr,
    Volterra,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExampleSpec {
    pub name: ExampleName,
    pub size: usize,
}

impl ExampleSpec {
    pub fn new(name: ExampleName, size: usize) -> Result<Self> {
        if size < 2 {
            return Err(Error::InvalidInput(format!("example size must be at least 2, got {size}")));
        }
        Ok(Self { name, size })
    }

    /// JSON payload for the example: an algebra file, or a matrix file for
    /// the Volterra operator.
    pub fn build_json(&self, tol: &Tolerances) -> Result<serde_json::Value> {
        match self.name {
            ExampleName::TwoDim => Ok(example_two_dim(tol)?.to_json()),
            ExampleName::Rdr => {
                let ex = example_rdr(self.size)?;
                let alg = ex.algebra(tol)?;
                Ok(serde_json::json!({
                    "algebra": alg.to_json(),
                    "r": crate::matrix::matrix_to_json(&ex.r),
                    "min_commutator": ex.min_commutator,
                    "minimizer": ex.minimizer,
                }))
            }
            ExampleName::Volterra => Ok(crate::matrix::matrix_to_json(&volterra(self.size)?)),
        }
    }
}

/// `{[[s, s - t], [0, t]]}` with basis `{1, [[1, 1], [0, 0]]}`.
pub fn example_two_dim(tol: &Tolerances) -> Result<FDAlgebra> {
    FDAlgebra::new(2, vec![identity(2), from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]])], tol)
}

pub const RDR_MAX: usize = 12;

#[derive(Debug, Clone)]
pub struct RdrExample {
    pub r: ComplexMatrix,
    pub r_inv: ComplexMatrix,
    /// `R E_kk R⁻¹`, a basis of minimal idempotents.
    pub basis: Vec<ComplexMatrix>,
    pub min_commutator: f64,
    /// Diagonal of the projection attaining the minimum.
    pub minimizer: Vec<u8>,
}

impl RdrExample {
    pub fn algebra(&self, tol: &Tolerances) -> Result<FDAlgebra> {
        FDAlgebra::new(self.r.nrows(), self.basis.clone(), tol)
    }
}

/// `R = 1 + S/2` with `S` the backward shift, the algebra `R D R⁻¹`, and
/// the smallest commutator `‖p R*R - R*R p‖` over nontrivial diagonal
/// projections `p`.
pub fn example_rdr(n: usize) -> Result<RdrExample> {
    if !(2..=RDR_MAX).contains(&n) {
        return Err(Error::InvalidInput(format!("rdr size must be in 2..={RDR_MAX}, got {n}")));
    }
    let mut r = identity(n);
    for i in 0..n - 1 {
        r[(i, i + 1)] = real(0.5);
    }
    // (1 + S/2)⁻¹ = Σ (-S/2)^k, exact for the nilpotent shift
    let mut r_inv = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            r_inv[(i, j)] = real((-0.5f64).powi((j - i) as i32));
        }
    }
    let basis = (0..n).map(|k| &r * unit(n, k, k) * &r_inv).collect();
    let rr = r.adjoint() * &r;
    let mut best = f64::INFINITY;
    let mut minimizer = Vec::new();
    for mask in 1..(1u32 << n) - 1 {
        let d: Vec<f64> = (0..n).map(|k| f64::from((mask >> k) & 1)).collect();
        let p = crate::matrix::diag_real(&d);
        let c = operator_norm(&(&p * &rr - &rr * &p))?;
        if c < best {
            best = c;
            minimizer = d.iter().map(|&v| v as u8).collect();
        }
    }
    Ok(RdrExample { r, r_inv, basis, min_commutator: best, minimizer })
}

/// Midpoint discretization of `(Vf)(s) = ∫_0^s f`: `1/n` below the diagonal
/// and `1/(2n)` on it.
pub fn volterra(n: usize) -> Result<ComplexMatrix> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("volterra size must be at least 2, got {n}")));
    }
    let h = 1.0 / n as f64;
    Ok(ComplexMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Greater => real(h),
        std::cmp::Ordering::Equal => real(0.5 * h),
        std::cmp::Ordering::Less => real(0.0),
    }))
}

/// `2tV(1 + tV)⁻¹`, which lies in the cone because `V` is accretive.
pub fn volterra_cayley(n: usize, t: f64) -> Result<ComplexMatrix> {
    if !(t > 0.0) {
        return Err(Error::InvalidInput("t must be positive".into()));
    }
    let v = volterra(n)? * real(t);
    let inv = (identity(n) + &v)
        .solve_lower_triangular(&identity(n))
        .ok_or_else(|| Error::Breakdown("singular 1 + tV".into()))?;
    Ok(v * inv * real(2.0))
}

/// Spectral radius of a lower-triangular matrix, read off its diagonal.
/// The eigenvalue problem for these is too ill-conditioned to solve directly.
pub fn triangular_spectral_radius(x: &ComplexMatrix) -> Result<f64> {
    if !is_lower_triangular(x) {
        return Err(Error::InvalidInput("matrix is not lower triangular".into()));
    }
    Ok(x.diagonal().iter().map(|z| z.norm()).fold(0.0, f64::max))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VolterraQuasinilpotence {
    pub n: usize,
    pub t: f64,
    /// `(m, r(e_m))` for the requested indices.
    pub radii: Vec<(u64, f64)>,
}

/// Spectral radii of `e_m` built from the Cayley element of `V_n`.
pub fn volterra_quasinilpotence(n: usize, t: f64, ms: &[u64], tol: &Tolerances) -> Result<VolterraQuasinilpotence> {
    let x = volterra_cayley(n, t)?;
    let radii = ms
        .iter()
        .map(|&m| Ok((m, triangular_spectral_radius(&bai_sequence(&x, m, tol)?)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(VolterraQuasinilpotence { n, t, radii })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::nor_battery;
    use crate::cone::in_f;
    use crate::matrix::{dist, operator_norm_power, spectral_radius};

    #[test]
    fn two_dim_example() {
        let t = Tolerances::default();
        let a = example_two_dim(&t).unwrap();
        assert_eq!(a.dim(), 2);
        let e = from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]);
        assert!(dist(&(&e * &e), &e) < 1e-15);
        assert!(dist(a.unit().unwrap(), &identity(2)) < 1e-10);
        let r = nor_battery(&a, 300, 3, &t).unwrap();
        assert!(r.all_pass);
    }

    #[test]
    fn rdr_small_cases() {
        let ex = example_rdr(2).unwrap();
        // [p, R*R] = [[0, 1/2], [-1/2, 0]] up to sign for both projections
        assert!((ex.min_commutator - 0.5).abs() < 1e-12);
        let ex = example_rdr(3).unwrap();
        assert!(ex.min_commutator > 0.0);
        assert!(ex.minimizer.contains(&1) && ex.minimizer.contains(&0));
        assert!(dist(&(&ex.r * &ex.r_inv), &identity(3)) < 1e-14);
        assert!(example_rdr(1).is_err() && example_rdr(13).is_err());
    }

    #[test]
    fn rdr_commutators_stay_positive() {
        let t = Tolerances::default();
        for n in 2..=8 {
            let ex = example_rdr(n).unwrap();
            assert!(ex.min_commutator > 1e-6, "n = {n}");
            let a = ex.algebra(&t).unwrap();
            assert_eq!(a.dim(), n);
            assert!(dist(a.unit().unwrap(), &identity(n)) < 1e-8);
        }
    }

    #[test]
    fn volterra_basics() {
        let v = volterra(100).unwrap();
        assert!(is_lower_triangular(&v));
        assert!(v.iter().all(|z| z.re >= 0.0 && z.im == 0.0));
        assert!(spectral_radius(&volterra(6).unwrap()).unwrap() <= 1.0 / 12.0 + 1e-3);
        assert!(triangular_spectral_radius(&v).unwrap() <= 0.005);
        assert!(volterra(1).is_err());
    }

    #[test]
    fn volterra_norm_power_matches_svd() {
        let v = volterra(200).unwrap();
        let a = operator_norm(&v).unwrap();
        let b = operator_norm_power(&v, 1000, 1e-14).unwrap();
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn volterra_cayley_in_cone_and_quasinilpotent() {
        let t = Tolerances::default();
        for n in [10, 50, 200] {
            let x = volterra_cayley(n, 1.0).unwrap();
            assert!(in_f(&x, &t).unwrap());
            let q = volterra_quasinilpotence(n, 1.0, &[1, 2, 8, 64], &t).unwrap();
            for (m, r) in q.radii {
                // diagonal of e_m is 1 - (1/m) Σ (1 - μ)^k with μ ≈ 1/n
                let mu = (1.0 / n as f64) / (1.0 + 0.5 / n as f64);
                let s: f64 = (1..=m).map(|k| (1.0 - mu).powi(k as i32)).sum();
                assert!((r - (1.0 - s / m as f64)).abs() < 1e-12);
                if m <= 2 {
                    assert!(r < 2.0 / n as f64);
                }
            }
        }
    }
}
