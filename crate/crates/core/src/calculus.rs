//! Root functional calculus on the cone: binomial coefficients, principal
//! r-th powers, the averaged approximate identity `e_n`, the root sequence
//! `u_n = (x/2)^{1/n}` and Riesz idempotents.

use serde::{Deserialize, Serialize};

use crate::cone::in_f;
use crate::error::{precondition, Error, Result};
use crate::matrix::{identity, norm, real, schur, validate, ComplexMatrix, C64};
use crate::tol::{Tolerances, CLUSTER_TOL};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinomialSeries {
    pub r: f64,
    /// `a_1..a_N`.
    pub coefficients: Vec<f64>,
    pub truncation_n: usize,
    pub tail_bound: f64,
}

/// Taylor coefficients of `1 - (1 - z)^r`.
pub fn binomial_coefficients(r: f64, n: usize) -> Result<BinomialSeries> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::InvalidInput(format!("exponent {r} not in (0, 1]")));
    }
    if n == 0 {
        return Err(Error::InvalidInput("truncation must be positive".into()));
    }
    let mut a = Vec::with_capacity(n);
    let mut ak = r;
    for k in 1..=n {
        a.push(ak);
        ak *= (k as f64 - r) / (k as f64 + 1.0);
    }
    let sum: f64 = a.iter().sum();
    Ok(BinomialSeries { r, coefficients: a, truncation_n: n, tail_bound: (1.0 - sum).max(0.0) })
}

// ---------------------------------------------------------------------------
// Schur-form utilities

/// Swaps the adjacent diagonal entries `k`, `k+1` of upper triangular `t`,
/// updating `q` so that `q t q*` is unchanged.
fn swap_adjacent(q: &mut ComplexMatrix, t: &mut ComplexMatrix, k: usize) {
    let n = t.nrows();
    let a = t[(k, k)];
    let b = t[(k + 1, k + 1)];
    let v0 = t[(k, k + 1)];
    let v1 = b - a;
    let nv = (v0.norm_sqr() + v1.norm_sqr()).sqrt();
    if nv == 0.0 {
        return;
    }
    // columns of g: eigenvector for b, then its orthogonal complement
    let (g00, g10) = (v0 / nv, v1 / nv);
    let (g01, g11) = (-g10.conj(), g00.conj());
    for j in 0..n {
        let (x, y) = (t[(k, j)], t[(k + 1, j)]);
        t[(k, j)] = g00.conj() * x + g10.conj() * y;
        t[(k + 1, j)] = g01.conj() * x + g11.conj() * y;
    }
    for i in 0..n {
        let (x, y) = (t[(i, k)], t[(i, k + 1)]);
        t[(i, k)] = x * g00 + y * g10;
        t[(i, k + 1)] = x * g01 + y * g11;
        let (x, y) = (q[(i, k)], q[(i, k + 1)]);
        q[(i, k)] = x * g00 + y * g10;
        q[(i, k + 1)] = x * g01 + y * g11;
    }
    t[(k + 1, k)] = C64::default();
    t[(k, k)] = b;
    t[(k + 1, k + 1)] = a;
}

/// Reorders a Schur form so that the diagonal keys are nondecreasing.
pub(crate) fn reorder_schur(q: &mut ComplexMatrix, t: &mut ComplexMatrix, keys: &mut [usize]) {
    let n = keys.len();
    for pass in 0..n {
        let mut swapped = false;
        for k in 0..n.saturating_sub(1 + pass) {
            if keys[k] > keys[k + 1] {
                swap_adjacent(q, t, k);
                keys.swap(k, k + 1);
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
}

/// Solves `a X - X b = c` for upper triangular `a` (p x p) and `b` (q x q)
/// with disjoint spectra.
pub(crate) fn triangular_sylvester(a: &ComplexMatrix, b: &ComplexMatrix, c: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (p, q) = (a.nrows(), b.nrows());
    let mut x = ComplexMatrix::zeros(p, q);
    for l in 0..q {
        let mut rhs: Vec<C64> = (0..p).map(|i| c[(i, l)]).collect();
        for m in 0..l {
            let blm = b[(m, l)];
            for (i, r) in rhs.iter_mut().enumerate() {
                *r += x[(i, m)] * blm;
            }
        }
        let shift = b[(l, l)];
        for i in (0..p).rev() {
            let mut s = rhs[i];
            for j in (i + 1)..p {
                s -= a[(i, j)] * x[(j, l)];
            }
            let d = a[(i, i)] - shift;
            if d.norm() == 0.0 {
                return Err(Error::Breakdown("Sylvester equation with shared eigenvalue".into()));
            }
            x[(i, l)] = s / d;
        }
    }
    Ok(x)
}

// ---------------------------------------------------------------------------
// Principal powers

fn scalar_power(z: C64, r: f64) -> C64 {
    if z.norm() == 0.0 {
        C64::default()
    } else {
        (z.ln() * r).exp()
    }
}

/// Single-linkage clusters of eigenvalues; eigenvalues below `zero_tol`
/// form their own cluster, always labelled 0 and placed first.
fn cluster_eigenvalues(ev: &[C64], zero_tol: f64) -> (Vec<usize>, bool) {
    let n = ev.len();
    let zero: Vec<bool> = ev.iter().map(|z| z.norm() <= zero_tol).collect();
    let has_zero = zero.iter().any(|&b| b);
    let mut label = vec![usize::MAX; n];
    let mut next = usize::from(has_zero);
    for i in 0..n {
        if zero[i] {
            label[i] = 0;
            continue;
        }
        if label[i] != usize::MAX {
            continue;
        }
        label[i] = next;
        let mut stack = vec![i];
        while let Some(k) = stack.pop() {
            for j in 0..n {
                if label[j] == usize::MAX && !zero[j] && (ev[j] - ev[k]).norm() <= CLUSTER_TOL {
                    label[j] = next;
                    stack.push(j);
                }
            }
        }
        next += 1;
    }
    (label, has_zero)
}

/// `f(T)` for an atomic triangular block by a Taylor series of `z^r` about
/// the mean eigenvalue.
fn atom_power(t: &ComplexMatrix, r: f64) -> Result<ComplexMatrix> {
    let m = t.nrows();
    if m == 1 {
        return Ok(ComplexMatrix::from_element(1, 1, scalar_power(t[(0, 0)], r)));
    }
    let sigma = t.diagonal().sum() / real(m as f64);
    let nmat = t - identity(m) * sigma;
    let mut coef = scalar_power(sigma, r);
    let mut term_pow = identity(m);
    let mut out = identity(m) * coef;
    let mut small_run = 0;
    for k in 0..2000 {
        coef *= real(r - k as f64) / (sigma * (k as f64 + 1.0));
        term_pow = &term_pow * &nmat;
        let term = &term_pow * coef;
        let tn = norm(&term);
        out += term;
        if tn <= f64::EPSILON * norm(&out) {
            small_run += 1;
            if small_run >= 2 && k + 1 >= m {
                return Ok(out);
            }
        } else {
            small_run = 0;
        }
        if !tn.is_finite() {
            break;
        }
    }
    Err(Error::NoConvergence { routine: "taylor atom", residual: f64::NAN })
}

/// Principal r-th power `exp(r Log x)` with `0^r = 0` on a semisimple zero
/// eigenvalue, by reordered Schur form and the block Parlett recurrence.
///
/// No cone precondition is imposed; a non-semisimple zero eigenvalue is an
/// error.
pub fn principal_power(x: &ComplexMatrix, r: f64) -> Result<ComplexMatrix> {
    validate(x)?;
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::InvalidInput(format!("exponent {r} not in (0, 1]")));
    }
    let n = x.nrows();
    if n == 0 || r == 1.0 {
        return Ok(x.clone());
    }
    let scale = norm(x).max(1.0);
    let (mut q, mut t) = schur(x)?;
    let ev: Vec<C64> = t.diagonal().iter().copied().collect();
    let (mut keys, has_zero) = cluster_eigenvalues(&ev, 100.0 * f64::EPSILON * scale * n as f64);
    reorder_schur(&mut q, &mut t, &mut keys);

    let mut starts = vec![0];
    for k in 1..n {
        if keys[k] != keys[k - 1] {
            starts.push(k);
        }
    }
    starts.push(n);
    let nb = starts.len() - 1;
    let block = |m: &ComplexMatrix, i: usize, j: usize| {
        m.view((starts[i], starts[j]), (starts[i + 1] - starts[i], starts[j + 1] - starts[j]))
            .into_owned()
    };

    let mut f = ComplexMatrix::zeros(n, n);
    for b in 0..nb {
        let tb = block(&t, b, b);
        let fb = if has_zero && keys[starts[b]] == 0 {
            if norm(&tb) > 1e-6 * scale {
                return Err(Error::Breakdown("zero eigenvalue is not semisimple".into()));
            }
            ComplexMatrix::zeros(tb.nrows(), tb.ncols())
        } else {
            atom_power(&tb, r)?
        };
        f.view_mut((starts[b], starts[b]), fb.shape()).copy_from(&fb);
    }
    for d in 1..nb {
        for i in 0..(nb - d) {
            let j = i + d;
            let (tii, tjj, tij) = (block(&t, i, i), block(&t, j, j), block(&t, i, j));
            let mut rhs = block(&f, i, i) * &tij - &tij * block(&f, j, j);
            for k in (i + 1)..j {
                rhs += block(&f, i, k) * block(&t, k, j) - block(&t, i, k) * block(&f, k, j);
            }
            let fij = triangular_sylvester(&tii, &tjj, &rhs)?;
            f.view_mut((starts[i], starts[j]), fij.shape()).copy_from(&fij);
        }
    }
    let out = &q * f * q.adjoint();
    if out.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Breakdown("non-finite entries in Parlett recurrence".into()));
    }
    Ok(out)
}

/// `x^r = 1 - f(1 - x)` with `f(z) = 1 - (1 - z)^r`, for `x` in the cone.
pub fn matrix_power_r(x: &ComplexMatrix, r: f64, tol: &Tolerances) -> Result<ComplexMatrix> {
    if !in_f(x, tol)? {
        return Err(precondition("matrix_power_r needs ‖1 - x‖ ≤ 1"));
    }
    principal_power(x, r)
}

/// Truncated binomial series `1 - Σ_{k≤N} a_k (1 - x)^k`.
pub fn series_power_oracle(x: &ComplexMatrix, r: f64, n: usize) -> Result<ComplexMatrix> {
    validate(x)?;
    let series = binomial_coefficients(r, n)?;
    let dim = x.nrows();
    let z = identity(dim) - x;
    let mut zk = identity(dim);
    let mut out = identity(dim);
    for a in &series.coefficients {
        zk = &zk * &z;
        out -= &zk * real(*a);
    }
    Ok(out)
}

/// `e_n = 1 - (1/n) Σ_{k=1}^n (1 - x)^k`, summed by binary doubling so that
/// very large `n` is cheap.
pub fn bai_sequence(x: &ComplexMatrix, n: u64, tol: &Tolerances) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be positive".into()));
    }
    if !in_f(x, tol)? {
        return Err(precondition("bai_sequence needs ‖1 - x‖ ≤ 1"));
    }
    let dim = x.nrows();
    let p = identity(dim) - x;
    // s = Σ_{k=1}^a p^k, pa = p^a
    let mut s = ComplexMatrix::zeros(dim, dim);
    let mut pa = identity(dim);
    for bit in (0..64 - n.leading_zeros()).rev() {
        s = &s + &pa * &s;
        pa = &pa * &pa;
        if (n >> bit) & 1 == 1 {
            pa = &pa * &p;
            s += &pa;
        }
    }
    Ok(identity(dim) - s / real(n as f64))
}

/// `u_n = (x/2)^{1/n}`.
pub fn root_cai(x: &ComplexMatrix, n: u32, tol: &Tolerances) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be positive".into()));
    }
    if !in_f(x, tol)? {
        return Err(precondition("root_cai needs ‖1 - x‖ ≤ 1"));
    }
    if norm(x) <= tol.exact_tol {
        return Err(precondition("root_cai needs x ≠ 0"));
    }
    principal_power(&(x * real(0.5)), 1.0 / f64::from(n))
}

/// Riesz idempotent for the eigenvalues of modulus below `radius`.
pub fn spectral_idempotent(x: &ComplexMatrix, radius: f64, _tol: &Tolerances) -> Result<ComplexMatrix> {
    validate(x)?;
    if !(radius > 0.0) {
        return Err(Error::InvalidInput("radius must be positive".into()));
    }
    let n = x.nrows();
    let (mut q, mut t) = schur(x)?;
    let mut keys = Vec::with_capacity(n);
    for k in 0..n {
        let m = t[(k, k)].norm();
        if m >= 0.9 * radius && m <= 1.1 * radius {
            return Err(Error::GapViolation { modulus: m, radius });
        }
        keys.push(usize::from(m > radius));
    }
    reorder_schur(&mut q, &mut t, &mut keys);
    let k = keys.iter().filter(|&&c| c == 0).count();
    let mut e = ComplexMatrix::zeros(n, n);
    for i in 0..k {
        e[(i, i)] = real(1.0);
    }
    if k > 0 && k < n {
        let t11 = t.view((0, 0), (k, k)).into_owned();
        let t22 = t.view((k, k), (n - k, n - k)).into_owned();
        let t12 = t.view((0, k), (k, n - k)).into_owned();
        let z = triangular_sylvester(&t11, &t22, &t12)?;
        e.view_mut((0, k), (k, n - k)).copy_from(&z);
    }
    Ok(&q * e * q.adjoint())
}

// ---------------------------------------------------------------------------
// Polynomials

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    /// Coefficients in increasing degree.
    pub coeffs: Vec<C64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<C64>) -> Self {
        Self { coeffs }
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::default(), |acc, c| acc * z + c)
    }

    /// Horner evaluation at a square matrix.
    pub fn eval_matrix(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let n = x.nrows();
        let mut acc = ComplexMatrix::zeros(n, n);
        for c in self.coeffs.iter().rev() {
            acc = &acc * x + identity(n) * *c;
        }
        acc
    }

    fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Polynomial::new(vec![]);
        }
        let mut out = vec![C64::default(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Polynomial) -> Polynomial {
        let mut acc = Polynomial::new(vec![]);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(inner);
            if acc.coeffs.is_empty() {
                acc.coeffs.push(C64::default());
            }
            acc.coeffs[0] += c;
        }
        acc
    }

    /// Sum of coefficient moduli, an upper bound for the sup norm on the disc.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::in_half_f;
    use crate::matrix::{c64, diag_real, dist, from_real_rows, operator_norm, unit};
    use crate::sample::{random_f_element, random_f_mixed, random_matrix, random_projection, rng_from_seed};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn binomial_examples() {
        let s = binomial_coefficients(0.5, 3).unwrap();
        for (a, b) in s.coefficients.iter().zip([0.5, 0.125, 0.0625]) {
            assert!((a - b).abs() < 1e-15);
        }
        let one = binomial_coefficients(1.0, 4).unwrap();
        assert_eq!(one.coefficients, vec![1.0, 0.0, 0.0, 0.0]);
        let mut prev = 0.0;
        for n in [10, 100, 1000, 10000] {
            let s: f64 = binomial_coefficients(1.0 / 3.0, n).unwrap().coefficients.iter().sum();
            assert!(s > prev && s < 1.0);
            prev = s;
        }
        assert!(binomial_coefficients(0.0, 3).is_err());
        assert!(binomial_coefficients(1.5, 3).is_err());
    }

    #[test]
    fn binomial_matches_generalized_binomial_oracle() {
        // a_k = -(-1)^k C(r, k), computed from the product formula
        for r in [0.5, 1.0 / 3.0, 0.2] {
            let s = binomial_coefficients(r, 12).unwrap();
            for k in 1..=12usize {
                let mut c = 1.0;
                for j in 0..k {
                    c *= (r - j as f64) / (j as f64 + 1.0);
                }
                let want = -(if k % 2 == 0 { 1.0 } else { -1.0 }) * c;
                assert!((s.coefficients[k - 1] - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn power_examples() {
        let t = tol();
        let mut rng = rng_from_seed(3);
        let p = random_projection(&mut rng, 4, 2);
        assert!(dist(&matrix_power_r(&p, 0.5, &t).unwrap(), &p) < 1e-10);
        let j = from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        let want = from_real_rows(&[&[1.0, 0.5], &[0.0, 1.0]]);
        assert!(dist(&matrix_power_r(&j, 0.5, &t).unwrap(), &want) < 1e-12);
        let d = diag_real(&[2.0, 0.0]);
        let want = diag_real(&[2f64.sqrt(), 0.0]);
        assert!(dist(&matrix_power_r(&d, 0.5, &t).unwrap(), &want) < 1e-12);
        assert!(matches!(matrix_power_r(&(identity(2) * real(-1.0)), 0.5, &t), Err(Error::Precondition(_))));
    }

    #[test]
    fn series_oracle_examples() {
        assert!(dist(&series_power_oracle(&identity(3), 0.3, 7).unwrap(), &identity(3)) < 1e-15);
        let j = from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        let want = from_real_rows(&[&[1.0, 0.5], &[0.0, 1.0]]);
        assert!(dist(&series_power_oracle(&j, 0.5, 2).unwrap(), &want) < 1e-15);
    }

    #[test]
    fn parlett_agrees_with_series_on_interior_spectra() {
        let t = tol();
        let mut rng = rng_from_seed(4);
        for trial in 0..100 {
            let n = 2 + trial % 6;
            let x = random_f_element(&mut rng, n, 0.6);
            let r = [0.5, 1.0 / 3.0, 0.2][trial % 3];
            let nterms = 80;
            let bound = binomial_coefficients(r, nterms).unwrap().tail_bound;
            let oracle = series_power_oracle(&x, r, nterms).unwrap();
            let got = matrix_power_r(&x, r, &t).unwrap();
            let err = operator_norm(&(oracle - &got)).unwrap();
            assert!(err <= bound + 1e-12, "trial {trial}: {err} > {bound}");
        }
    }

    #[test]
    fn roots_stay_in_cone_commute_and_round_trip() {
        let t = tol();
        let mut rng = rng_from_seed(5);
        for trial in 0..60 {
            let n = 1 + trial % 8;
            let x = random_f_mixed(&mut rng, n);
            for (r, inv) in [(0.5, 2.0), (1.0 / 3.0, 3.0)] {
                let y = matrix_power_r(&x, r, &t).unwrap();
                assert!(crate::cone::distance_from_one(&y).unwrap() <= 1.0 + 10.0 * t.exact_tol);
                assert!(dist(&(&y * &x), &(&x * &y)) < 1e-9);
                // (x^r)^{1/r} as an integer power
                let mut z = y.clone();
                for _ in 1..(inv as usize) {
                    z = &z * &y;
                }
                assert!(dist(&z, &x) < t.iter_tol, "trial {trial}");
            }
        }
    }

    #[test]
    fn half_cone_preserved() {
        let t = tol();
        let mut rng = rng_from_seed(6);
        for trial in 0..40 {
            let x = random_f_mixed(&mut rng, 1 + trial % 6) * real(0.5);
            assert!(in_half_f(&x, &t).unwrap());
            for r in [0.5, 1.0 / 3.0, 0.2] {
                let y = matrix_power_r(&x, r, &t).unwrap();
                let d = operator_norm(&(identity(x.nrows()) - &y * real(2.0))).unwrap();
                assert!(d <= 1.0 + 10.0 * t.exact_tol, "{d}");
            }
        }
    }

    #[test]
    fn confluent_and_near_confluent_eigenvalues() {
        // eigenvalues 0.5 and 0.5 + 1e-6 with coupling
        let x = ComplexMatrix::from_fn(3, 3, |i, j| match (i, j) {
            (0, 0) => real(0.5),
            (1, 1) => real(0.5 + 1e-6),
            (2, 2) => real(1.2),
            (0, 1) => real(0.3),
            (1, 2) => real(0.2),
            _ => C64::default(),
        });
        let y = principal_power(&x, 0.5).unwrap();
        assert!(dist(&(&y * &y), &x) < 1e-12);
    }

    #[test]
    fn bai_examples() {
        let t = tol();
        for n in [1, 5, 64] {
            assert!(dist(&bai_sequence(&identity(3), n, &t).unwrap(), &identity(3)) < 1e-14);
        }
        let e2 = bai_sequence(&diag_real(&[2.0, 0.0]), 2, &t).unwrap();
        assert!(dist(&e2, &diag_real(&[1.0, 0.0])) < 1e-14);
    }

    #[test]
    fn bai_bounds_match_direct_sum() {
        let t = tol();
        let mut rng = rng_from_seed(7);
        for trial in 0..30 {
            let d = 2 + trial % 5;
            let x = random_f_mixed(&mut rng, d);
            for n in [1u64, 3, 8, 17, 64] {
                let e = bai_sequence(&x, n, &t).unwrap();
                // direct oracle
                let p = identity(d) - &x;
                let mut pk = identity(d);
                let mut s = ComplexMatrix::zeros(d, d);
                for _ in 0..n {
                    pk = &pk * &p;
                    s += &pk;
                }
                let avg = &s / real(n as f64);
                assert!(dist(&e, &(identity(d) - &avg)) < 1e-12);
                assert!(operator_norm(&avg).unwrap() <= 1.0 + 1e-12);
                let defect = operator_norm(&(&x * &e - &x)).unwrap();
                assert!(defect <= 2.0 / n as f64 + 1e-12);
            }
        }
    }

    #[test]
    fn root_cai_examples() {
        let t = tol();
        let mut rng = rng_from_seed(8);
        let p = random_projection(&mut rng, 4, 2);
        for n in [1, 2, 7] {
            assert!(dist(&root_cai(&(&p * real(2.0)), n, &t).unwrap(), &p) < 1e-10);
            let u = root_cai(&diag_real(&[2.0, 0.0]), n, &t).unwrap();
            assert!(dist(&u, &diag_real(&[1.0, 0.0])) < 1e-12);
        }
        let x = random_f_element(&mut rng, 6, 0.9);
        let half = &x * real(0.5);
        let defect = |n| operator_norm(&(root_cai(&x, n, &t).unwrap() * &half - &half)).unwrap();
        assert!(defect(32) < defect(2));
        assert!(root_cai(&crate::matrix::zeros(2), 2, &t).is_err());
    }

    #[test]
    fn idempotent_examples() {
        let t = tol();
        let e = spectral_idempotent(&diag_real(&[2.0, 0.0]), 1.0, &t).unwrap();
        assert!(dist(&e, &diag_real(&[0.0, 1.0])) < 1e-14);
        let e = spectral_idempotent(&diag_real(&[2.0, 3.0]), 1.0, &t).unwrap();
        assert!(norm(&e) < 1e-14);
        let x = from_real_rows(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 0.0], &[0.0, 0.0, 2.0]]);
        let e = spectral_idempotent(&x, 1.0, &t).unwrap();
        assert!(dist(&(&e * &e), &e) < 1e-12);
        assert!(dist(&(&e * &x), &(&x * &e)) < 1e-12);
        assert!(dist(&e, &(unit(3, 0, 0) + unit(3, 1, 1))) < 1e-12);
        assert!(matches!(spectral_idempotent(&diag_real(&[1.0, 3.0]), 1.05, &t), Err(Error::GapViolation { .. })));
    }

    #[test]
    fn idempotent_on_random_nonnormal() {
        let t = tol();
        let mut rng = rng_from_seed(9);
        for _ in 0..20 {
            let x = random_matrix(&mut rng, 6);
            let ev = crate::matrix::spectrum(&x).unwrap();
            let mods: Vec<f64> = ev.iter().map(|z| z.norm()).collect();
            let Some(radius) = (1..40).map(|k| k as f64 * 0.1).find(|r| mods.iter().all(|m| (m - r).abs() > 0.15 * r)) else {
                continue;
            };
            let e = spectral_idempotent(&x, radius, &t).unwrap();
            assert!(dist(&(&e * &e), &e) < 1e-8);
            assert!(dist(&(&e * &x), &(&x * &e)) < 1e-8);
            let k = mods.iter().filter(|&&m| m < radius).count() as f64;
            assert!((crate::matrix::trace(&e).re - k).abs() < 1e-8);
        }
    }

    #[test]
    fn composition_law() {
        let mut rng = rng_from_seed(10);
        use rand::Rng;
        for trial in 0..100 {
            let n = 1 + trial % 8;
            let tmat = crate::sample::random_contraction(&mut rng, n, 1.0);
            let mut rp = |deg: usize| {
                let p = Polynomial::new((0..=deg).map(|_| c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect());
                let s = p.l1_norm();
                Polynomial::new(p.coeffs.iter().map(|c| c / s).collect())
            };
            let f = rp(3);
            let g = rp(4);
            let lhs = f.eval_matrix(&g.eval_matrix(&tmat));
            let rhs = f.compose(&g).eval_matrix(&tmat);
            assert!(dist(&lhs, &rhs) < 100.0 * 1e-9);
            let z = c64(0.3, -0.2);
            assert!((f.compose(&g).eval(z) - f.eval(g.eval(z))).norm() < 1e-14);
        }
    }
}
