//! Dense complex linear algebra used by every other module: norms, spectra,
//! singular value decompositions, range and kernel projections.
//!
//! Rank decisions are always made from singular values against
//! `Tolerances::rank_tol`, never by pivoted elimination.

use faer::Side;
use nalgebra::linalg::Schur;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol::Tolerances;

pub type C64 = Complex<f64>;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;


#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

#[inline]
pub fn real(v: f64) -> C64 {
    Complex::new(v, 0.0)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn zeros(n: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(n, n)
}

/// Builds a matrix from real rows.
pub fn from_real_rows(rows: &[&[f64]]) -> ComplexMatrix {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    ComplexMatrix::from_fn(n, m, |i, j| real(rows[i][j]))
}

pub fn diag_real(values: &[f64]) -> ComplexMatrix {
    let n = values.len();
    ComplexMatrix::from_fn(n, n, |i, j| if i == j { real(values[i]) } else { C64::default() })
}

/// Matrix unit `E_ij` of size `n`.
pub fn unit(n: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut e = zeros(n);
    e[(i, j)] = real(1.0);
    e
}

/// Checks that `x` is square with finite entries.
pub fn validate(x: &ComplexMatrix) -> Result<()> {
    if x.nrows() != x.ncols() {
        return Err(Error::NotSquare { rows: x.nrows(), cols: x.ncols() });
    }
    check_finite(x)
}

pub(crate) fn check_finite(x: &ComplexMatrix) -> Result<()> {
    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

pub(crate) fn check_same_dim(x: &ComplexMatrix, n: usize) -> Result<()> {
    if x.nrows() != n || x.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x.nrows() });
    }
    Ok(())
}

fn to_faer(x: &ComplexMatrix) -> faer::Mat<C64> {
    faer::Mat::from_fn(x.nrows(), x.ncols(), |i, j| x[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, C64>) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Full SVD `x = u diag(s) v*`, `u` square of size `rows`, `v` of size `cols`,
/// `s` nonincreasing.
pub(crate) struct FullSvd {
    pub u: ComplexMatrix,
    pub s: Vec<f64>,
    pub v: ComplexMatrix,
}

pub(crate) fn svd(x: &ComplexMatrix) -> Result<FullSvd> {
    let d = to_faer(x).svd().map_err(|_| Error::NoConvergence { routine: "svd", residual: f64::NAN })?;
    let s = d.S().column_vector().iter().map(|z| z.re).collect();
    Ok(FullSvd { u: from_faer(d.U()), s, v: from_faer(d.V()) })
}

/// Singular values in nonincreasing order.
pub fn singular_values(x: &ComplexMatrix) -> Result<Vec<f64>> {
    if x.is_empty() {
        return Ok(Vec::new());
    }
    check_finite(x)?;
    let mut s = to_faer(x).singular_values().map_err(|_| Error::NoConvergence { routine: "svd", residual: f64::NAN })?;
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// Largest singular value.
pub fn operator_norm(x: &ComplexMatrix) -> Result<f64> {
    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(singular_values(x)?.first().copied().unwrap_or(0.0))
}

/// Operator norm for inputs already known to be finite.
pub(crate) fn norm(x: &ComplexMatrix) -> f64 {
    operator_norm(x).expect("svd failed on a finite matrix")
}

pub fn smallest_singular_value(x: &ComplexMatrix) -> Result<f64> {
    Ok(singular_values(x)?.last().copied().unwrap_or(0.0))
}

/// Operator norm by power iteration on `x* x`, for matrices too large for a
/// full SVD. Converges at the rate `(s2/s1)^2` per step.
pub fn operator_norm_power(x: &ComplexMatrix, max_iter: usize, tol: f64) -> Result<f64> {
    validate(x)?;
    let n = x.ncols();
    if n == 0 {
        return Ok(0.0);
    }
    let mut v = ComplexVector::from_fn(n, |i, _| real(1.0 + (i as f64 * 0.618_033_988_7).fract()));
    v /= real(v.norm());
    let mut est = 0.0;
    let adj = x.adjoint();
    for _ in 0..max_iter {
        let w = &adj * (x * &v);
        let nw = w.norm();
        if nw == 0.0 {
            return Ok(0.0);
        }
        let next = nw.sqrt();
        v = w / real(nw);
        if (next - est).abs() <= tol * next {
            return Ok(next);
        }
        est = next;
    }
    Err(Error::NoConvergence { routine: "operator_norm_power", residual: est })
}

pub fn is_upper_triangular(x: &ComplexMatrix) -> bool {
    (0..x.nrows()).all(|i| (0..i.min(x.ncols())).all(|j| x[(i, j)] == C64::default()))
}

pub fn is_lower_triangular(x: &ComplexMatrix) -> bool {
    (0..x.nrows()).all(|i| ((i + 1)..x.ncols()).all(|j| x[(i, j)] == C64::default()))
}

/// Complex Schur form `x = Q T Q*` with `T` upper triangular.
pub fn schur(x: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    validate(x)?;
    let n = x.nrows();
    if n == 0 || is_upper_triangular(x) {
        return Ok((identity(n), x.clone()));
    }
    let s = Schur::try_new(x.clone(), 1e-15, 100_000)
        .ok_or(Error::NoConvergence { routine: "schur", residual: f64::NAN })?;
    let (q, mut t) = s.unpack();
    for i in 0..n {
        for j in 0..i {
            t[(i, j)] = C64::default();
        }
    }
    Ok((q, t))
}

/// Eigenvalues with multiplicity, sorted by nonincreasing modulus.
///
/// Triangular inputs return their diagonal exactly; everything else goes
/// through the complex Schur form.
pub fn spectrum(x: &ComplexMatrix) -> Result<Vec<C64>> {
    validate(x)?;
    let mut ev: Vec<C64> = if is_upper_triangular(x) || is_lower_triangular(x) {
        x.diagonal().iter().copied().collect()
    } else {
        let (_, t) = schur(x)?;
        t.diagonal().iter().copied().collect()
    };
    ev.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
    Ok(ev)
}

pub fn spectral_radius(x: &ComplexMatrix) -> Result<f64> {
    Ok(spectrum(x)?.first().map_or(0.0, |z| z.norm()))
}

pub fn hermitian_part(x: &ComplexMatrix) -> ComplexMatrix {
    (x + x.adjoint()) * real(0.5)
}

/// Eigen-decomposition of the Hermitian part of `h`: ascending eigenvalues and
/// the matching orthonormal eigenvectors as columns.
pub fn hermitian_eigen(h: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    validate(h)?;
    let n = h.nrows();
    if n == 0 {
        return Ok((Vec::new(), zeros(0)));
    }
    let sym = hermitian_part(h);
    let e = to_faer(&sym)
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::NoConvergence { routine: "hermitian_eigen", residual: f64::NAN })?;
    let values = e.S().column_vector().iter().map(|z| z.re).collect();
    Ok((values, from_faer(e.U())))
}

pub fn lambda_min(h: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigen(h)?.0.first().copied().unwrap_or(0.0))
}

pub fn lambda_max(h: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigen(h)?.0.last().copied().unwrap_or(0.0))
}

/// Threshold below which a singular value counts as zero.
pub(crate) fn rank_threshold(sigma_max: f64, tol: &Tolerances) -> f64 {
    tol.rank_tol * sigma_max.max(1.0)
}

pub fn numerical_rank(x: &ComplexMatrix, tol: &Tolerances) -> Result<usize> {
    let s = singular_values(x)?;
    let thr = rank_threshold(s.first().copied().unwrap_or(0.0), tol);
    Ok(s.iter().filter(|&&v| v > thr).count())
}

/// Orthonormal basis (as columns) of the column space of a rectangular matrix.
pub(crate) fn column_space(x: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    if x.ncols() == 0 || x.nrows() == 0 {
        return Ok(ComplexMatrix::zeros(x.nrows(), 0));
    }
    check_finite(x)?;
    let d = svd(x)?;
    let thr = rank_threshold(d.s.first().copied().unwrap_or(0.0), tol);
    let k = d.s.iter().filter(|&&v| v > thr).count();
    Ok(d.u.columns(0, k).into_owned())
}

/// Orthonormal basis (as columns) of the null space of a rectangular matrix.
pub(crate) fn null_space(x: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    let n = x.ncols();
    if x.nrows() == 0 {
        return Ok(identity(n));
    }
    check_finite(x)?;
    let d = svd(x)?;
    let thr = rank_threshold(d.s.first().copied().unwrap_or(0.0), tol);
    let k = d.s.iter().filter(|&&v| v > thr).count();
    Ok(d.v.columns(k, n - k).into_owned())
}

/// Orthogonal projection onto the span of the orthonormal columns of `basis`.
pub(crate) fn projector(basis: &ComplexMatrix) -> ComplexMatrix {
    basis * basis.adjoint()
}

/// Orthogonal projections onto the range and onto the kernel of `x`.
///
/// For non-normal `x` these need not be complementary; both are returned as
/// computed, each a Hermitian idempotent.
pub fn range_kernel_projections(x: &ComplexMatrix, tol: &Tolerances) -> Result<(ComplexMatrix, ComplexMatrix)> {
    validate(x)?;
    let range = column_space(x, tol)?;
    let kernel = null_space(x, tol)?;
    Ok((projector(&range), projector(&kernel)))
}

/// Minimum-norm least-squares solution of `a z = b` via the pseudo-inverse.
pub(crate) fn lstsq(a: &ComplexMatrix, b: &ComplexVector, tol: &Tolerances) -> Result<ComplexVector> {
    if a.ncols() == 0 {
        return Ok(ComplexVector::zeros(0));
    }
    let d = svd(a)?;
    let thr = rank_threshold(d.s.first().copied().unwrap_or(0.0), tol);
    let mut z = ComplexVector::zeros(a.ncols());
    for (k, &s) in d.s.iter().enumerate() {
        if s > thr {
            let coef = d.u.column(k).dotc(b) / real(s);
            z += d.v.column(k) * coef;
        }
    }
    Ok(z)
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn direct_sum(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (n, m) = (a.nrows(), b.nrows());
    let mut out = ComplexMatrix::zeros(n + m, a.ncols() + b.ncols());
    out.view_mut((0, 0), (n, a.ncols())).copy_from(a);
    out.view_mut((n, a.ncols()), (m, b.ncols())).copy_from(b);
    out
}

/// Matrix power by repeated squaring.
pub fn powi(x: &ComplexMatrix, mut k: u64) -> ComplexMatrix {
    let mut result = identity(x.nrows());
    let mut base = x.clone();
    while k > 0 {
        if k & 1 == 1 {
            result = &result * &base;
        }
        k >>= 1;
        if k > 0 {
            base = &base * &base;
        }
    }
    result
}

pub fn trace(x: &ComplexMatrix) -> C64 {
    x.trace()
}

/// Frobenius distance, convenient for residuals.
pub fn dist(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a - b).norm()
}

/// `true` when `p` is a Hermitian idempotent within `eps` in operator norm.
pub fn is_projection(p: &ComplexMatrix, eps: f64) -> bool {
    norm(&(p * p - p)) <= eps && norm(&(p - p.adjoint())) <= eps
}

/// Column-major vectorization.
pub fn vec_of(x: &ComplexMatrix) -> ComplexVector {
    ComplexVector::from_column_slice(x.as_slice())
}

pub fn unvec(v: &[C64], n: usize) -> ComplexMatrix {
    ComplexMatrix::from_column_slice(n, n, v)
}

/// JSON matrix payload: `{"dim": n, "entries": [[re, im], ...]}`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixFile {
    pub fn from_matrix(x: &ComplexMatrix) -> Self {
        let n = x.nrows();
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push([x[(i, j)].re, x[(i, j)].im]);
            }
        }
        Self { dim: n, entries }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let n = self.dim;
        if n == 0 || self.entries.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "matrix payload is not square: dim {n} with {} entries",
                self.entries.len()
            )));
        }
        let x = ComplexMatrix::from_fn(n, n, |i, j| {
            let [re, im] = self.entries[i * n + j];
            c64(re, im)
        });
        validate(&x)?;
        Ok(x)
    }
}

pub fn matrix_to_json(x: &ComplexMatrix) -> serde_json::Value {
    serde_json::to_value(MatrixFile::from_matrix(x)).expect("matrix serializes")
}

pub fn matrix_from_json(s: &str) -> Result<ComplexMatrix> {
    let f: MatrixFile = serde_json::from_str(s)?;
    f.to_matrix()
}

/// Serde adapter for `ComplexMatrix` fields in the row-major JSON format.
pub mod serde_matrix {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &ComplexMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixFile::from_matrix(x).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<ComplexMatrix, D::Error> {
        let f = MatrixFile::deserialize(d)?;
        f.to_matrix().map_err(serde::de::Error::custom)
    }
}


#[cfg(test)]
mod proptests {
    use super::*;
    use crate::sample::{random_matrix, random_unitary, rng_from_seed};
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn norm_submultiplicative_and_unitarily_invariant(seed in any::<u64>(), n in 1usize..=16) {
            let mut rng = rng_from_seed(seed);
            let a = random_matrix(&mut rng, n);
            let b = random_matrix(&mut rng, n);
            let u = random_unitary(&mut rng, n);
            let v = random_unitary(&mut rng, n);
            let na = operator_norm(&a).unwrap();
            let nb = operator_norm(&b).unwrap();
            let slack = 1e-9 * (na * nb).max(1.0);
            prop_assert!(operator_norm(&(&a * &b)).unwrap() <= na * nb + slack);
            prop_assert!((operator_norm(&(&u * &a * &v)).unwrap() - na).abs() <= 1e-9 * na.max(1.0));
        }
    }
}
