//! Linear maps `M_n → M_m`: Choi matrices, complete positivity,
//! amplifications, searches for cone violations, Kraus and Stinespring
//! factorizations, and completely positive extensions from subspaces.

use nalgebra::linalg::QR;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cone::in_f;
use crate::error::{precondition, Error, Result};
use crate::matrix::{
    hermitian_eigen, identity, kron, lambda_max, lambda_min, operator_norm, real, unit, validate, vec_of,
    ComplexMatrix, ComplexVector, MatrixFile, C64,
};
use crate::sample::{complex_gaussian, derive_seed, random_matrix, random_unitary, rng_from_seed};
use crate::subspace::Subspace;
use crate::tol::Tolerances;

/// Largest `k·n` accepted by [`amplify`].
pub const AMPLIFY_CAP: usize = 64;

#[derive(Debug, Clone)]
pub struct MatrixMap {
    in_dim: usize,
    out_dim: usize,
    /// Images of `E_ij`, row-major in `(i, j)`.
    action: Vec<ComplexMatrix>,
    choi: ComplexMatrix,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixMapFile {
    pub in_dim: usize,
    pub out_dim: usize,
    pub action: Vec<MatrixFile>,
}

fn assemble_choi(n: usize, m: usize, action: &[ComplexMatrix]) -> ComplexMatrix {
    let mut c = ComplexMatrix::zeros(n * m, n * m);
    for i in 0..n {
        for j in 0..n {
            c.view_mut((i * m, j * m), (m, m)).copy_from(&action[i * n + j]);
        }
    }
    c
}

impl MatrixMap {
    pub fn new(in_dim: usize, out_dim: usize, action: Vec<ComplexMatrix>) -> Result<Self> {
        if in_dim == 0 || out_dim == 0 {
            return Err(Error::InvalidInput("map dimensions must be positive".into()));
        }
        if action.len() != in_dim * in_dim {
            return Err(Error::DimensionMismatch { expected: in_dim * in_dim, found: action.len() });
        }
        for a in &action {
            crate::matrix::check_same_dim(a, out_dim)?;
            validate(a)?;
        }
        let choi = assemble_choi(in_dim, out_dim, &action);
        Ok(Self { in_dim, out_dim, action, choi })
    }

    pub fn from_fn(in_dim: usize, out_dim: usize, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Result<Self> {
        let action = (0..in_dim * in_dim).map(|k| f(&unit(in_dim, k / in_dim, k % in_dim))).collect();
        Self::new(in_dim, out_dim, action)
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_fn(n, n, |x| x.clone())
    }

    pub fn transpose(n: usize) -> Result<Self> {
        Self::from_fn(n, n, |x| x.transpose())
    }

    /// `a ↦ Σ K a K*` with each `K` of size `m × n`.
    pub fn from_kraus(kraus: &[ComplexMatrix]) -> Result<Self> {
        let k0 = kraus.first().ok_or_else(|| Error::InvalidInput("need at least one Kraus operator".into()))?;
        let (m, n) = (k0.nrows(), k0.ncols());
        if kraus.iter().any(|k| k.nrows() != m || k.ncols() != n) {
            return Err(Error::InvalidInput("Kraus operators differ in shape".into()));
        }
        Self::from_fn(n, m, |x| kraus.iter().fold(ComplexMatrix::zeros(m, m), |acc, k| acc + k * x * k.adjoint()))
    }

    /// Completely positive map with `r` Gaussian Kraus operators.
    pub fn random_cp(rng: &mut impl Rng, n: usize, m: usize, r: usize) -> Result<Self> {
        let kraus: Vec<_> =
            (0..r.max(1)).map(|_| ComplexMatrix::from_fn(m, n, |_, _| complex_gaussian(rng))).collect();
        Self::from_kraus(&kraus)
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn action(&self) -> &[ComplexMatrix] {
        &self.action
    }

    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        crate::matrix::check_same_dim(x, self.in_dim)?;
        let n = self.in_dim;
        let mut out = ComplexMatrix::zeros(self.out_dim, self.out_dim);
        for (k, img) in self.action.iter().enumerate() {
            let c = x[(k / n, k % n)];
            if c != C64::default() {
                out += img * c;
            }
        }
        Ok(out)
    }

    pub fn to_file(&self) -> MatrixMapFile {
        MatrixMapFile {
            in_dim: self.in_dim,
            out_dim: self.out_dim,
            action: self.action.iter().map(MatrixFile::from_matrix).collect(),
        }
    }

    pub fn from_file(f: &MatrixMapFile) -> Result<Self> {
        let action = f.action.iter().map(|m| m.to_matrix()).collect::<Result<Vec<_>>>()?;
        Self::new(f.in_dim, f.out_dim, action)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_file(&serde_json::from_str(s)?)
    }
}

/// `[T(E_ij)]` as an `nm × nm` block matrix.
pub fn choi(t: &MatrixMap) -> ComplexMatrix {
    t.choi.clone()
}

pub fn is_cp(t: &MatrixMap, tol: &Tolerances) -> Result<bool> {
    Ok(lambda_min(&t.choi)? >= -tol.exact_tol)
}

/// `T_k = id_k ⊗ T` on `M_k(M_n)`.
pub fn amplify(t: &MatrixMap, k: usize) -> Result<MatrixMap> {
    if k == 0 || k * t.in_dim > AMPLIFY_CAP {
        return Err(Error::InvalidInput(format!("amplification k = {k} exceeds the cap k·n ≤ {AMPLIFY_CAP}")));
    }
    let (n, kn) = (t.in_dim, k * t.in_dim);
    let mut action = Vec::with_capacity(kn * kn);
    for r in 0..kn {
        for c in 0..kn {
            action.push(kron(&unit(k, r / n, c / n), &t.action[(r % n) * n + c % n]));
        }
    }
    MatrixMap::new(kn, k * t.out_dim, action)
}

/// `‖C·1 - T(x)‖ - C`; positive means `T(x) ∉ C·F`.
pub fn cone_violation(t: &MatrixMap, c: f64, x: &ComplexMatrix) -> Result<f64> {
    let y = t.apply(x)?;
    Ok(operator_norm(&(identity(t.out_dim) * real(c) - y))? - c)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OcpSearch {
    pub k: usize,
    pub c: f64,
    pub trials: usize,
    /// Largest violation seen; a witness needs more than `iter_tol`.
    pub best_margin: f64,
    #[serde(with = "crate::algebra::opt_matrix")]
    pub witness: Option<ComplexMatrix>,
    pub message: String,
}

fn unitary_factor(x: &ComplexMatrix) -> ComplexMatrix {
    let qr = QR::new(x.clone());
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..q.ncols() {
        let d = r[(j, j)];
        if d.norm() > 0.0 {
            let ph = d / real(d.norm());
            for i in 0..q.nrows() {
                q[(i, j)] *= ph;
            }
        }
    }
    q
}

/// Sampled search for `x = 1 + u ∈ F` (u unitary) with `T_k(x) ∉ C·F`.
///
/// Random unitaries are followed by local ascent from the best one. Finding
/// nothing is not a proof that `T` is OCP.
pub fn ocp_falsify(t: &MatrixMap, c: f64, k: usize, budget: usize, seed: u64, tol: &Tolerances) -> Result<OcpSearch> {
    if !(c > 0.0) {
        return Err(precondition("C must be positive"));
    }
    let tk = amplify(t, k)?;
    let dim = tk.in_dim;
    let one = identity(dim);
    let mut rng = rng_from_seed(derive_seed(seed, k as u64));
    let sample_budget = budget - budget / 4;
    let mut best_u = one.clone();
    let mut best = f64::NEG_INFINITY;
    let mut trials = 0;
    let mut found = None;
    let check = |u: &ComplexMatrix, trials: &mut usize| -> Result<f64> {
        *trials += 1;
        cone_violation(&tk, c, &(&one + u))
    };
    for _ in 0..sample_budget {
        let u = random_unitary(&mut rng, dim);
        let v = check(&u, &mut trials)?;
        if v > best {
            best = v;
            best_u = u;
        }
        if best > tol.iter_tol {
            break;
        }
    }
    let mut step = 0.3;
    while best <= tol.iter_tol && trials < budget && step > 1e-6 {
        let g = random_matrix(&mut rng, dim);
        let u = unitary_factor(&(&best_u + g * real(step)));
        let v = check(&u, &mut trials)?;
        if v > best {
            best = v;
            best_u = u;
        } else {
            step *= 0.97;
        }
    }
    if best > tol.iter_tol {
        let x = &one + &best_u;
        if in_f(&x, tol)? {
            found = Some(x);
        }
    }
    let message = if found.is_some() {
        format!("violation {best:.3e} found at level {k}")
    } else {
        format!("no violation found at level {k} after {trials} trials")
    };
    Ok(OcpSearch { k, c, trials, best_margin: best, witness: found, message })
}

/// `zx ∈ F` for `z` on the circle `|1 - z| = 1` and `z ∈ {0, 1, 2}`,
/// cross-checked against the direct test `x = x*`, `0 ≤ x ≤ 1`.
pub fn disk_test(x: &ComplexMatrix, disk_samples: usize, tol: &Tolerances) -> Result<bool> {
    validate(x)?;
    let mut zs: Vec<C64> = vec![real(0.0), real(1.0), real(2.0)];
    zs.extend((0..disk_samples).map(|k| {
        let phi = std::f64::consts::TAU * k as f64 / disk_samples.max(1) as f64;
        real(1.0) + C64::from_polar(1.0, phi)
    }));
    let mut sampled = true;
    for z in zs {
        if !in_f(&(x * z), tol)? {
            sampled = false;
            break;
        }
    }
    let scale = crate::matrix::norm(x).max(1.0);
    let skew = operator_norm(&(x - x.adjoint()))? * 0.5;
    let herm = crate::matrix::hermitian_part(x);
    let (lo, hi) = (lambda_min(&herm)?, lambda_max(&herm)?);
    let direct_margin = (-skew).min(lo).min(1.0 - hi);
    let direct = direct_margin >= -tol.exact_tol * scale;
    // near the boundary a finite circle sample cannot resolve the answer
    let resolution = 10.0 * tol.iter_tol * scale;
    if sampled != direct && direct_margin.abs() > resolution {
        return Err(Error::Disagreement(format!(
            "disk test says {sampled}, direct positivity test says {direct} (margin {direct_margin:e})"
        )));
    }
    Ok(if direct_margin.abs() > resolution { direct } else { sampled })
}

#[derive(Debug, Clone)]
pub struct StinespringTriple {
    /// `[K_1*; …; K_r*]`, of size `rn × m` for a map `M_n → M_m`.
    pub v: ComplexMatrix,
    pub r: usize,
    pub kraus: Vec<ComplexMatrix>,
    pub reconstruction_residual: f64,
}

impl StinespringTriple {
    pub fn norm_sq(&self) -> Result<f64> {
        Ok(operator_norm(&self.v)?.powi(2))
    }
}

/// Kraus operators from the Choi eigendecomposition, and the isometry-like
/// `V` with `T(a) = V* (1_r ⊗ a) V`.
pub fn stinespring(t: &MatrixMap, tol: &Tolerances) -> Result<StinespringTriple> {
    if !is_cp(t, tol)? {
        return Err(precondition("stinespring needs a completely positive map"));
    }
    let (n, m) = (t.in_dim, t.out_dim);
    let (vals, vecs) = hermitian_eigen(&t.choi)?;
    let top = vals.iter().copied().fold(0.0, f64::max);
    let mut kraus = Vec::new();
    for (l, &lam) in vals.iter().enumerate() {
        if lam <= tol.rank_tol * top.max(f64::MIN_POSITIVE) {
            continue;
        }
        let v = vecs.column(l);
        let s = lam.sqrt();
        kraus.push(ComplexMatrix::from_fn(m, n, |a, i| v[i * m + a] * s));
    }
    let r = kraus.len();
    let mut v = ComplexMatrix::zeros(r * n, m);
    for (l, k) in kraus.iter().enumerate() {
        v.view_mut((l * n, 0), (n, m)).copy_from(&k.adjoint());
    }
    let rebuilt = if r == 0 {
        MatrixMap::new(n, m, vec![ComplexMatrix::zeros(m, m); n * n])?
    } else {
        MatrixMap::from_kraus(&kraus)?
    };
    let reconstruction_residual = (rebuilt.choi - &t.choi).norm();
    Ok(StinespringTriple { v, r, kraus, reconstruction_residual })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ExtensionStatus {
    Feasible,
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct ExtensionResult {
    pub choi_ext: ComplexMatrix,
    pub status: ExtensionStatus,
    pub iterations: usize,
    /// `-λ_min` of the returned Choi matrix (zero when PSD).
    pub psd_residual: f64,
    /// Largest `‖T̃(b) - T(b)‖_F` over the basis of `A`.
    pub agreement_residual: f64,
}

/// Linear operator `C ↦ (Φ_C(b_l))_l` where `Φ_C(X) = Σ X_ij C_ij`.
fn constraint_matrix(basis: &[ComplexMatrix], n: usize, m: usize) -> ComplexMatrix {
    let nm = n * m;
    let mut a = ComplexMatrix::zeros(basis.len() * m * m, nm * nm);
    for (l, b) in basis.iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                let bij = b[(i, j)];
                if bij == C64::default() {
                    continue;
                }
                for p in 0..m {
                    for q in 0..m {
                        // entry (p, q) of block (i, j) of C, column-major vec
                        let col = (j * m + q) * nm + (i * m + p);
                        let row = l * m * m + q * m + p;
                        a[(row, col)] += bij;
                    }
                }
            }
        }
    }
    a
}

fn psd_projection(c: &ComplexMatrix) -> Result<ComplexMatrix> {
    let h = (c + c.adjoint()) * real(0.5);
    let (vals, vecs) = hermitian_eigen(&h)?;
    let d = ComplexMatrix::from_diagonal(&ComplexVector::from_iterator(vals.len(), vals.iter().map(|&v| real(v.max(0.0)))));
    Ok(&vecs * d * vecs.adjoint())
}

/// Dykstra iteration between the PSD cone and the affine set of Choi
/// matrices agreeing with `T` on `A`. The returned matrix is always PSD and
/// its agreement with `T` is measured afresh.
pub fn cp_extension_search(
    t: &MatrixMap,
    a_basis: &[ComplexMatrix],
    tol: &Tolerances,
    budget: usize,
) -> Result<ExtensionResult> {
    let (n, m) = (t.in_dim, t.out_dim);
    let space = Subspace::span_matrices(n, a_basis, tol)?;
    if !space.contains_matrix(&identity(n)) {
        return Err(precondition("the subspace must contain the identity"));
    }
    let basis = space.basis_matrices();
    let targets: Vec<ComplexMatrix> = basis.iter().map(|b| t.apply(b)).collect::<Result<_>>()?;
    let a = constraint_matrix(&basis, n, m);
    let rhs = {
        let mut v = ComplexVector::zeros(basis.len() * m * m);
        for (l, y) in targets.iter().enumerate() {
            v.rows_mut(l * m * m, m * m).copy_from(&vec_of(y));
        }
        v
    };
    let d = crate::matrix::svd(&a)?;
    let thr = crate::matrix::rank_threshold(d.s.first().copied().unwrap_or(0.0), tol);
    let rank = d.s.iter().filter(|&&s| s > thr).count();
    let ur = d.u.columns(0, rank).into_owned();
    let vr = d.v.columns(0, rank).into_owned();
    let sinv = ComplexMatrix::from_diagonal(&ComplexVector::from_iterator(rank, d.s[..rank].iter().map(|s| real(1.0 / s))));
    let pinv = &vr * sinv * ur.adjoint();
    let nm = n * m;
    let affine = |c: &ComplexMatrix| -> ComplexMatrix {
        let x = vec_of(c);
        let corr = &pinv * (&a * &x - &rhs);
        crate::matrix::unvec((x - corr).as_slice(), nm)
    };
    let agreement = |c: &ComplexMatrix| -> f64 {
        (&a * vec_of(c) - &rhs).norm() / rhs.norm().max(1.0)
    };

    let mut x = affine(&ComplexMatrix::zeros(nm, nm));
    let mut p_inc = ComplexMatrix::zeros(nm, nm);
    let mut q_inc = ComplexMatrix::zeros(nm, nm);
    let mut best = psd_projection(&x)?;
    let mut best_res = agreement(&best);
    let mut iterations = 0;
    while iterations < budget && best_res >= tol.iter_tol {
        iterations += 1;
        let y = psd_projection(&(&x + &p_inc))?;
        p_inc = &x + &p_inc - &y;
        let xn = affine(&(&y + &q_inc));
        q_inc = &y + &q_inc - &xn;
        x = xn;
        let res = agreement(&y);
        if res < best_res {
            best_res = res;
            best = y;
        }
    }
    let psd_residual = (-lambda_min(&best)?).max(0.0);
    let ext = MatrixMap::new(n, m, (0..n * n).map(|k| best.view(((k / n) * m, (k % n) * m), (m, m)).into_owned()).collect())?;
    let agreement_residual = basis
        .iter()
        .zip(&targets)
        .map(|(b, y)| ext.apply(b).map(|z| (z - y).norm()))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let status = if psd_residual <= tol.exact_tol && agreement_residual < tol.iter_tol {
        ExtensionStatus::Feasible
    } else {
        ExtensionStatus::Inconclusive
    };
    Ok(ExtensionResult { choi_ext: best, status, iterations, psd_residual, agreement_residual })
}
