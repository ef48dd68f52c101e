//! Finite-dimensional operator algebras realized as subspaces of `M_n`,
//! their one- and two-sided ideals, inner inverses and quotient norms.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cone::{in_f, strictly_real_positive};
use crate::error::{precondition, Error, Result};
use crate::matrix::{
    identity, is_projection, lstsq, norm, null_space, numerical_rank, operator_norm, real, smallest_singular_value,
    spectrum, unit, validate, vec_of, ComplexMatrix, ComplexVector, MatrixFile, C64,
};
use crate::sample::{complex_gaussian, derive_seed, rng_from_seed};
use crate::spectral::{numerical_radius, support_function};
use crate::subspace::Subspace;
use crate::tol::{Tolerances, CLUSTER_TOL};

/// Unital or non-unital subalgebra of `M_n` given by a basis.
#[derive(Debug, Clone)]
pub struct FDAlgebra {
    ambient_dim: usize,
    basis: Vec<ComplexMatrix>,
    space: Subspace,
    unit: Option<ComplexMatrix>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FDAlgebraFile {
    pub ambient_dim: usize,
    pub basis: Vec<MatrixFile>,
    pub unital: bool,
}

fn frob(x: &ComplexMatrix) -> f64 {
    x.norm()
}

fn inner(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

impl FDAlgebra {
    /// Algebra with the given spanning set. Dependent generators are dropped;
    /// the span must be closed under multiplication.
    pub fn new(n: usize, generators: Vec<ComplexMatrix>, tol: &Tolerances) -> Result<Self> {
        let mut basis: Vec<ComplexMatrix> = Vec::new();
        let mut space = Subspace::zero(n * n, tol);
        for g in generators {
            if g.nrows() != n || g.ncols() != n {
                return Err(Error::DimensionMismatch { expected: n, found: g.nrows() });
            }
            validate(&g)?;
            if frob(&g) == 0.0 || space.contains_matrix(&(&g / real(frob(&g)))) {
                continue;
            }
            basis.push(g);
            space = Subspace::span_matrices(n, &basis, tol)?;
        }
        let alg = Self { ambient_dim: n, basis, space, unit: None };
        alg.check_closed(tol)?;
        let unit = alg.find_unit(tol)?;
        Ok(Self { unit, ..alg })
    }

    /// Matrix units spanning a unital algebra; no closure check needed.
    fn from_matrix_units(n: usize, basis: Vec<ComplexMatrix>, tol: &Tolerances) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("ambient dimension must be positive".into()));
        }
        let space = Subspace::span_matrices(n, &basis, tol)?;
        Ok(Self { ambient_dim: n, basis, space, unit: Some(identity(n)) })
    }

    pub fn full(n: usize, tol: &Tolerances) -> Result<Self> {
        let gens = (0..n * n).map(|k| unit(n, k / n, k % n)).collect();
        Self::from_matrix_units(n, gens, tol)
    }

    pub fn upper_triangular(n: usize, tol: &Tolerances) -> Result<Self> {
        let gens = (0..n).flat_map(|i| (i..n).map(move |j| unit(n, i, j))).collect();
        Self::from_matrix_units(n, gens, tol)
    }

    /// `ℂ·1` inside `M_n`.
    pub fn scalars(n: usize, tol: &Tolerances) -> Result<Self> {
        Self::new(n, vec![identity(n)], tol)
    }

    /// Block-diagonal `A ⊕ B` inside `M_{n+m}`.
    pub fn direct_sum(a: &FDAlgebra, b: &FDAlgebra, tol: &Tolerances) -> Result<Self> {
        let (n, m) = (a.ambient_dim, b.ambient_dim);
        let mut gens = Vec::new();
        for x in &a.basis {
            gens.push(crate::matrix::direct_sum(x, &ComplexMatrix::zeros(m, m)));
        }
        for y in &b.basis {
            gens.push(crate::matrix::direct_sum(&ComplexMatrix::zeros(n, n), y));
        }
        Self::new(n + m, gens, tol)
    }

    fn check_closed(&self, tol: &Tolerances) -> Result<()> {
        let normed: Vec<ComplexMatrix> = self.space.basis_matrices();
        for a in &normed {
            for b in &normed {
                let p = a * b;
                if self.space.matrix_residual(&p) > tol.iter_tol {
                    return Err(Error::InvalidInput("span is not closed under multiplication".into()));
                }
            }
        }
        Ok(())
    }

    /// Two-sided identity of the algebra, if one exists.
    fn find_unit(&self, tol: &Tolerances) -> Result<Option<ComplexMatrix>> {
        let bs = self.space.basis_matrices();
        let d = bs.len();
        if d == 0 {
            return Ok(None);
        }
        let n2 = self.ambient_dim * self.ambient_dim;
        let mut m = ComplexMatrix::zeros(2 * d * n2, d);
        let mut rhs = ComplexVector::zeros(2 * d * n2);
        for (jdx, bj) in bs.iter().enumerate() {
            let bjv = vec_of(bj);
            rhs.rows_mut(2 * jdx * n2, n2).copy_from(&bjv);
            rhs.rows_mut((2 * jdx + 1) * n2, n2).copy_from(&bjv);
            for (k, bk) in bs.iter().enumerate() {
                m.view_mut((2 * jdx * n2, k), (n2, 1)).copy_from(&vec_of(&(bk * bj)));
                m.view_mut(((2 * jdx + 1) * n2, k), (n2, 1)).copy_from(&vec_of(&(bj * bk)));
            }
        }
        let c = lstsq(&m, &rhs, tol)?;
        let res = (&m * &c - &rhs).norm() / rhs.norm();
        if res > tol.iter_tol {
            return Ok(None);
        }
        Ok(Some(combine(&bs, c.as_slice())))
    }

    pub fn from_file(f: &FDAlgebraFile, tol: &Tolerances) -> Result<Self> {
        let gens = f.basis.iter().map(|m| m.to_matrix()).collect::<Result<Vec<_>>>()?;
        let alg = Self::new(f.ambient_dim, gens, tol)?;
        if alg.is_unital() != f.unital {
            return Err(Error::InvalidInput(format!(
                "file declares unital = {}, but the algebra {} an identity",
                f.unital,
                if alg.is_unital() { "has" } else { "lacks" }
            )));
        }
        Ok(alg)
    }

    pub fn to_file(&self) -> FDAlgebraFile {
        FDAlgebraFile {
            ambient_dim: self.ambient_dim,
            basis: self.basis.iter().map(MatrixFile::from_matrix).collect(),
            unital: self.is_unital(),
        }
    }

    pub fn from_json(s: &str, tol: &Tolerances) -> Result<Self> {
        Self::from_file(&serde_json::from_str(s)?, tol)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.to_file()).expect("algebra serializes")
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[ComplexMatrix] {
        &self.basis
    }

    pub fn space(&self) -> &Subspace {
        &self.space
    }

    pub fn is_unital(&self) -> bool {
        self.unit.is_some()
    }

    pub fn unit(&self) -> Option<&ComplexMatrix> {
        self.unit.as_ref()
    }

    pub fn contains(&self, x: &ComplexMatrix) -> bool {
        x.nrows() == self.ambient_dim && self.space.contains_matrix(x)
    }

    /// Gaussian combination of the orthonormal basis.
    pub fn random_element(&self, rng: &mut impl Rng) -> ComplexMatrix {
        let bs = self.space.basis_matrices();
        let cs: Vec<C64> = (0..bs.len()).map(|_| complex_gaussian(rng)).collect();
        combine(&bs, &cs)
    }

    fn require_unit(&self) -> Result<&ComplexMatrix> {
        self.unit.as_ref().ok_or_else(|| precondition("algebra is not unital"))
    }

    fn require_member(&self, x: &ComplexMatrix, what: &str) -> Result<()> {
        validate(x)?;
        if !self.contains(x) {
            return Err(precondition(format!("{what}: element is not in the algebra")));
        }
        Ok(())
    }
}

fn combine(mats: &[ComplexMatrix], coeffs: &[C64]) -> ComplexMatrix {
    let n = mats.first().map_or(0, |m| m.nrows());
    mats.iter().zip(coeffs).fold(ComplexMatrix::zeros(n, n), |acc, (m, c)| acc + m * *c)
}

fn span(n: usize, mats: &[ComplexMatrix], tol: &Tolerances) -> Result<Subspace> {
    Subspace::span_matrices(n, mats, tol)
}

/// `{a ∈ A : f(a) = a}` for a linear map `f`.
fn fixed_subspace(alg: &FDAlgebra, f: impl Fn(&ComplexMatrix) -> ComplexMatrix, tol: &Tolerances) -> Result<Subspace> {
    let n = alg.ambient_dim;
    let bs = alg.space.basis_matrices();
    if bs.is_empty() {
        return Ok(Subspace::zero(n * n, tol));
    }
    let cols: Vec<ComplexVector> = bs.iter().map(|b| vec_of(&(f(b) - b))).collect();
    let m = ComplexMatrix::from_columns(&cols);
    let kernel = null_space(&m, tol)?;
    let mats: Vec<ComplexMatrix> = kernel
        .column_iter()
        .map(|c| combine(&bs, c.as_slice()))
        .collect();
    span(n, &mats, tol)
}

/// `oa(x)`: span of the powers `x, x², …`, built by Arnoldi iteration in the
/// Frobenius inner product.
pub fn generated_algebra(x: &ComplexMatrix, tol: &Tolerances) -> Result<FDAlgebra> {
    validate(x)?;
    if frob(x) <= tol.exact_tol {
        return Err(precondition("generated_algebra needs x ≠ 0"));
    }
    let n = x.nrows();
    let mut q: Vec<ComplexMatrix> = Vec::new();
    let mut v = x.clone();
    for _ in 0..=n * n {
        let nv = frob(&v);
        if nv <= tol.rank_tol * frob(x) {
            break;
        }
        for _ in 0..2 {
            for b in &q {
                let c = inner(b, &v);
                v -= b * c;
            }
        }
        let r = frob(&v);
        if r <= tol.rank_tol * nv {
            break;
        }
        let b = v / real(r);
        v = x * &b;
        q.push(b);
    }
    FDAlgebra::new(n, q, tol)
}

#[derive(Debug, Clone)]
pub struct IdealSpaces {
    pub x_a: Subspace,
    pub a_x: Subspace,
    pub x_a_x: Subspace,
}

/// Spans of `xA`, `Ax` and `xAx`.
pub fn ideal_subspaces(x: &ComplexMatrix, alg: &FDAlgebra, tol: &Tolerances) -> Result<IdealSpaces> {
    alg.require_member(x, "ideal_subspaces")?;
    let n = alg.ambient_dim;
    let bs = alg.basis();
    let xa: Vec<_> = bs.iter().map(|b| x * b).collect();
    let ax: Vec<_> = bs.iter().map(|b| b * x).collect();
    let xax: Vec<_> = bs.iter().map(|b| x * b * x).collect();
    Ok(IdealSpaces { x_a: span(n, &xa, tol)?, a_x: span(n, &ax, tol)?, x_a_x: span(n, &xax, tol)? })
}

/// Is `J·A ⊆ J` (right ideal) and, if `two_sided`, `A·J ⊆ J`.
pub fn is_ideal(j: &Subspace, alg: &FDAlgebra, two_sided: bool, tol: &Tolerances) -> bool {
    let js = j.basis_matrices();
    let bs = alg.space.basis_matrices();
    js.iter().all(|a| {
        bs.iter().all(|b| {
            j.matrix_residual(&(a * b)) <= tol.iter_tol && (!two_sided || j.matrix_residual(&(b * a)) <= tol.iter_tol)
        })
    })
}

/// Solves `e ∈ J`, `e·j = j` for all `j ∈ J` by least squares.
pub fn left_identity_search(j: &Subspace, alg: &FDAlgebra, tol: &Tolerances) -> Result<Option<ComplexMatrix>> {
    let n = alg.ambient_dim;
    if j.ambient_dim() != n * n {
        return Err(Error::DimensionMismatch { expected: n * n, found: j.ambient_dim() });
    }
    if !is_ideal(j, alg, false, tol) {
        return Err(precondition("subspace is not a right ideal"));
    }
    let js = j.basis_matrices();
    let d = js.len();
    if d == 0 {
        return Ok(Some(ComplexMatrix::zeros(n, n)));
    }
    let n2 = n * n;
    let mut m = ComplexMatrix::zeros(d * n2, d);
    let mut rhs = ComplexVector::zeros(d * n2);
    for (mi, jm) in js.iter().enumerate() {
        rhs.rows_mut(mi * n2, n2).copy_from(&vec_of(jm));
        for (k, jk) in js.iter().enumerate() {
            m.view_mut((mi * n2, k), (n2, 1)).copy_from(&vec_of(&(jk * jm)));
        }
    }
    let c = lstsq(&m, &rhs, tol)?;
    if (&m * &c - &rhs).norm() / rhs.norm() > tol.iter_tol {
        return Ok(None);
    }
    Ok(Some(combine(&js, c.as_slice())))
}

/// `J = (1 - x)A` and its left identity.
pub fn one_minus_ideal(
    x: &ComplexMatrix,
    alg: &FDAlgebra,
    tol: &Tolerances,
) -> Result<(Subspace, Option<ComplexMatrix>)> {
    let one = alg.require_unit()?.clone();
    alg.require_member(x, "one_minus_ideal")?;
    if operator_norm(x)? > 1.0 + tol.exact_tol {
        return Err(precondition("one_minus_ideal needs ‖x‖ ≤ 1"));
    }
    let y = one - x;
    let gens: Vec<_> = alg.basis().iter().map(|b| &y * b).collect();
    let j = span(alg.ambient_dim, &gens, tol)?;
    let e = left_identity_search(&j, alg, tol)?;
    Ok((j, e))
}

// ---------------------------------------------------------------------------
// Power-norm battery

pub const NOR_CONDITIONS: [&str; 5] =
    ["powers_vanish", "radius_below_norm", "numerical_radius_below_norm", "one_plus_below_two", "quasi_invertible"];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionRecord {
    pub name: String,
    pub passes: usize,
    pub failures: usize,
    /// Smallest margin seen; positive means the strict inequality held.
    pub worst_margin: f64,
    #[serde(with = "opt_matrix")]
    pub witness: Option<ComplexMatrix>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NorReport {
    pub samples: usize,
    pub rejected: usize,
    pub conditions: Vec<ConditionRecord>,
    pub all_pass: bool,
    /// Either every condition held on every sample, or every condition failed
    /// at least once.
    pub consistent: bool,
}

pub(crate) mod opt_matrix {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Option<ComplexMatrix>, s: S) -> std::result::Result<S::Ok, S::Error> {
        x.as_ref().map(MatrixFile::from_matrix).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<ComplexMatrix>, D::Error> {
        let f = Option::<MatrixFile>::deserialize(d)?;
        f.map(|f| f.to_matrix().map_err(serde::de::Error::custom)).transpose()
    }
}

/// Orthonormal basis of the range of an idempotent `e`, for compressions.
fn range_basis(e: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    crate::matrix::column_space(e, tol)
}

/// Margins of the five conditions for one element of the unit ball.
fn nor_margins(a: &ComplexMatrix, one: &ComplexMatrix, q: &ComplexMatrix, tol: &Tolerances) -> Result<[f64; 5]> {
    let na = operator_norm(a)?;
    let r = crate::matrix::spectral_radius(&(q.adjoint() * a * q))?;
    let mut p = a.clone();
    let mut decays = false;
    for _ in 0..40 {
        if operator_norm(&p)? < tol.iter_tol {
            decays = true;
            break;
        }
        p = &p * &p;
    }
    let powers = if decays { (1.0 - r).max(tol.iter_tol * 2.0) } else { -(r - 1.0).abs().max(0.0) };
    let nu = numerical_radius(a)?;
    let onep = operator_norm(&(one + a))?;
    let qi = smallest_singular_value(&(q.adjoint() * (one - a) * q))?;
    Ok([powers, na - r, na - nu, 2.0 - onep, qi])
}

/// Samples the unit ball of a unital algebra away from `ℂ1` and evaluates
/// five conditions that hold or fail together.
pub fn nor_battery(alg: &FDAlgebra, trials: usize, seed: u64, tol: &Tolerances) -> Result<NorReport> {
    let one = alg.require_unit()?.clone();
    let n = alg.ambient_dim;
    let q = range_basis(&one, tol)?;
    let one_f = frob(&one);
    let dist_to_scalars = |a: &ComplexMatrix| {
        let c = inner(&one, a) / real(one_f * one_f);
        frob(&(a - &one * c)) / (n as f64).sqrt()
    };
    let mut candidates: Vec<ComplexMatrix> = alg
        .basis()
        .iter()
        .map(|b| b / real(operator_norm(b).unwrap_or(1.0).max(f64::MIN_POSITIVE)))
        .collect();
    let mut rng = rng_from_seed(derive_seed(seed, 0x4e4f52));
    for _ in 0..trials {
        let g = alg.random_element(&mut rng);
        let ng = operator_norm(&g)?;
        if ng == 0.0 {
            continue;
        }
        let radius = if rng.random_bool(0.8) { 1.0 } else { rng.random_range(0.3..1.0) };
        candidates.push(g * real(radius / ng));
    }
    let mut records: Vec<ConditionRecord> = NOR_CONDITIONS
        .iter()
        .map(|s| ConditionRecord {
            name: (*s).to_string(),
            passes: 0,
            failures: 0,
            worst_margin: f64::INFINITY,
            witness: None,
        })
        .collect();
    let (mut samples, mut rejected) = (0, 0);
    for a in candidates {
        if dist_to_scalars(&a) <= 0.05 {
            rejected += 1;
            continue;
        }
        samples += 1;
        let m = nor_margins(&a, &one, &q, tol)?;
        for (rec, margin) in records.iter_mut().zip(m) {
            if margin > tol.iter_tol {
                rec.passes += 1;
            } else {
                rec.failures += 1;
                if rec.witness.is_none() {
                    rec.witness = Some(a.clone());
                }
            }
            rec.worst_margin = rec.worst_margin.min(margin);
        }
    }
    let all_pass = records.iter().all(|r| r.failures == 0);
    let consistent = all_pass || records.iter().all(|r| r.failures > 0);
    Ok(NorReport { samples, rejected, conditions: records, all_pass, consistent })
}

// ---------------------------------------------------------------------------
// Inner inverse battery

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WsReport {
    pub x_oa_closed: bool,
    pub oa_unital: bool,
    pub inner_inverse_in_oa: bool,
    pub xax_closed: bool,
    pub one_sided_ideals_closed: bool,
    pub inner_inverse_in_a: bool,
    pub zero_isolated: bool,
    pub oa_semisimple: bool,
    #[serde(with = "opt_matrix")]
    pub y_oa: Option<ComplexMatrix>,
    #[serde(with = "opt_matrix")]
    pub y_a: Option<ComplexMatrix>,
    /// Set when the cone precondition was skipped.
    pub precondition_bypassed: bool,
    /// The equivalences and implications that must hold for cone elements.
    pub consistent: bool,
}

impl WsReport {
    pub fn equivalent_block(&self) -> [bool; 6] {
        [
            self.x_oa_closed,
            self.oa_unital,
            self.inner_inverse_in_oa,
            self.xax_closed,
            self.one_sided_ideals_closed,
            self.inner_inverse_in_a,
        ]
    }
}

fn inner_inverse(x: &ComplexMatrix, candidates: &[ComplexMatrix], tol: &Tolerances) -> Result<Option<ComplexMatrix>> {
    if candidates.is_empty() {
        return Ok(None);
    }
    let cols: Vec<ComplexVector> = candidates.iter().map(|b| vec_of(&(x * b * x))).collect();
    let m = ComplexMatrix::from_columns(&cols);
    let rhs = vec_of(x);
    let c = lstsq(&m, &rhs, tol)?;
    if (&m * &c - &rhs).norm() / rhs.norm().max(1.0) > tol.iter_tol {
        return Ok(None);
    }
    Ok(Some(combine(candidates, c.as_slice())))
}

/// Diagonalizability of `x`, decided cluster by cluster: the geometric
/// multiplicity must equal the cluster size.
pub fn is_semisimple(x: &ComplexMatrix) -> Result<bool> {
    let n = x.nrows();
    let ev = spectrum(x)?;
    let scale = norm(x).max(1.0);
    let rank_tol = Tolerances { rank_tol: CLUSTER_TOL, ..Tolerances::default() };
    let mut used = vec![false; n];
    for i in 0..n {
        if used[i] {
            continue;
        }
        let members: Vec<usize> = (0..n).filter(|&j| !used[j] && (ev[j] - ev[i]).norm() <= CLUSTER_TOL * scale).collect();
        for &j in &members {
            used[j] = true;
        }
        let mean = members.iter().map(|&j| ev[j]).sum::<C64>() / real(members.len() as f64);
        let shifted = x - identity(n) * mean;
        let geo = n - numerical_rank(&(shifted / real(scale)), &rank_tol)?;
        if geo < members.len() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn ws_evaluate(x: &ComplexMatrix, alg: &FDAlgebra, bypassed: bool, tol: &Tolerances) -> Result<WsReport> {
    let n = alg.ambient_dim;
    let oa = generated_algebra(x, tol)?;
    let (s_l, _) = crate::matrix::range_kernel_projections(x, tol)?;
    let (s_r, _) = crate::matrix::range_kernel_projections(&x.adjoint(), tol)?;
    let oa_b = oa.space.basis_matrices();

    let x_oa = span(n, &oa_b.iter().map(|o| x * o).collect::<Vec<_>>(), tol)?;
    let x_oa_closed = x_oa.equals(&fixed_subspace(&oa, |o| &s_l * o, tol)?);
    let oa_unital = x_oa.dim() == oa.dim();
    let y_oa = inner_inverse(x, &oa_b, tol)?;

    let ideals = ideal_subspaces(x, alg, tol)?;
    let xax_closed = ideals.x_a_x.equals(&fixed_subspace(alg, |a| &s_l * a * &s_r, tol)?);
    let one_sided_ideals_closed = ideals.x_a.equals(&fixed_subspace(alg, |a| &s_l * a, tol)?)
        && ideals.a_x.equals(&fixed_subspace(alg, |a| a * &s_r, tol)?);
    let y_a = inner_inverse(x, &alg.space.basis_matrices(), tol)?;

    let zero_thr = 1e-6 * norm(x).max(1.0);
    let zero_isolated = spectrum(x)?.iter().all(|z| z.norm() <= zero_thr || z.norm() > CLUSTER_TOL);
    let oa_semisimple = is_semisimple(x)?;

    let mut report = WsReport {
        x_oa_closed,
        oa_unital,
        inner_inverse_in_oa: y_oa.is_some(),
        xax_closed,
        one_sided_ideals_closed,
        inner_inverse_in_a: y_a.is_some(),
        zero_isolated,
        oa_semisimple,
        y_oa,
        y_a,
        precondition_bypassed: bypassed,
        consistent: true,
    };
    if !bypassed {
        let block = report.equivalent_block();
        let all_same = block.iter().all(|&b| b == block[0]);
        let implies_isolated = !block[0] || zero_isolated;
        let semisimple_closes = !oa_semisimple || zero_isolated == block[0];
        report.consistent = all_same && implies_isolated && semisimple_closes;
    }
    Ok(report)
}

/// Inner-inverse and closedness conditions for `x` in the cone of `A`.
pub fn ws_battery(x: &ComplexMatrix, alg: &FDAlgebra, tol: &Tolerances) -> Result<WsReport> {
    alg.require_member(x, "ws_battery")?;
    if !in_f(x, tol)? {
        return Err(precondition("ws_battery needs ‖1 - x‖ ≤ 1"));
    }
    ws_evaluate(x, alg, false, tol)
}

/// Same conditions without the cone precondition, for counterexamples
/// outside the cone. Consistency is not asserted.
pub fn ws_battery_unchecked(x: &ComplexMatrix, alg: &FDAlgebra, tol: &Tolerances) -> Result<WsReport> {
    alg.require_member(x, "ws_battery")?;
    ws_evaluate(x, alg, true, tol)
}

// ---------------------------------------------------------------------------
// Quotient norms

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum QuotientStatus {
    Certified,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuotientNorm {
    pub lower: f64,
    pub upper: f64,
    pub status: QuotientStatus,
}

impl QuotientNorm {
    pub fn value(&self) -> Option<f64> {
        (self.status == QuotientStatus::Certified).then_some(0.5 * (self.lower + self.upper))
    }
}

pub const DEFAULT_QUOTIENT_BUDGET: usize = 20_000;

/// Smoothed top singular value `μ log Σ exp(σ_i/μ)` and its gradient in the
/// complex coordinates of `J`.
fn smoothed(a: &ComplexMatrix, js: &[ComplexMatrix], c: &[C64], mu: f64) -> Result<(f64, f64, Vec<C64>)> {
    let r = a - combine(js, c);
    let d = crate::matrix::svd(&r)?;
    let smax = d.s.iter().copied().fold(0.0, f64::max);
    let ws: Vec<f64> = d.s.iter().map(|s| ((s - smax) / mu).exp()).collect();
    let z: f64 = ws.iter().sum();
    let f = smax + mu * z.ln();
    let mut g = vec![C64::default(); js.len()];
    for (i, w) in ws.iter().enumerate() {
        let w = w / z;
        if w < 1e-14 || d.s[i] == 0.0 {
            continue;
        }
        let ui = d.u.column(i);
        let vi = d.v.column(i);
        for (k, jk) in js.iter().enumerate() {
            let zk = ui.dotc(&(jk * vi));
            g[k] -= zk.conj() * w;
        }
    }
    Ok((f, smax, g))
}

/// Lower bound `|⟨W, a⟩| / ‖W‖_1` from trace-class witnesses `W ⊥ J` built
/// on the top singular subspace of the residual.
fn dual_lower_bound(a: &ComplexMatrix, r: &ComplexMatrix, js: &[ComplexMatrix]) -> Result<f64> {
    let d = crate::matrix::svd(r)?;
    let smax = d.s[0];
    if smax == 0.0 {
        return Ok(0.0);
    }
    let mut best: f64 = 0.0;
    for width in [0.0, 1e-10, 1e-8, 1e-6, 1e-4, 1e-3, 1e-2, 1e-1] {
        let k = d.s.iter().filter(|&&s| s >= smax * (1.0 - width)).count();
        let uk = d.u.columns(0, k).into_owned();
        let vk = d.v.columns(0, k).into_owned();
        let gs: Vec<ComplexMatrix> = js.iter().map(|j| uk.adjoint() * j * &vk).collect();
        let gspace = Subspace::span_matrices(k, &gs, &Tolerances::default())?;
        let z = identity(k) - gspace.project_matrix(&identity(k));
        let mut w = &uk * z * vk.adjoint();
        for j in js {
            let c = inner(j, &w);
            w -= j * c;
        }
        let trace_norm: f64 = crate::matrix::singular_values(&w)?.iter().sum();
        if trace_norm > 0.0 {
            best = best.max(inner(&w, a).norm() / trace_norm);
        }
    }
    Ok(best)
}

/// `dist(a, J)` in operator norm, certified by a dual witness.
pub fn quotient_norm(a: &ComplexMatrix, j: &Subspace, tol: &Tolerances, budget: usize) -> Result<QuotientNorm> {
    validate(a)?;
    let n = a.nrows();
    if j.ambient_dim() != n * n {
        return Err(Error::DimensionMismatch { expected: n * n, found: j.ambient_dim() });
    }
    let js = j.basis_matrices();
    let na = operator_norm(a)?;
    if js.is_empty() || na == 0.0 {
        return Ok(QuotientNorm { lower: na, upper: na, status: QuotientStatus::Certified });
    }
    let c0: Vec<C64> = js.iter().map(|b| inner(b, a)).collect();
    let mut best_c = c0.clone();
    let mut best = operator_norm(&(a - combine(&js, &c0)))?;
    let mut lower = dual_lower_bound(a, &(a - combine(&js, &c0)), &js)?;
    let mut evals = 0usize;
    let mut rng = rng_from_seed(0x51554f54);
    'restarts: for restart in 0..10 {
        if best - lower < tol.iter_tol {
            break;
        }
        let mut c: Vec<C64> = if restart == 0 {
            c0.clone()
        } else {
            c0.iter().map(|z| z + complex_gaussian(&mut rng) * (0.5 * na)).collect()
        };
        let mut mu = 0.1 * na;
        while mu > 1e-11 * na {
            let mut step = na;
            for _ in 0..200 {
                if evals >= budget {
                    break 'restarts;
                }
                let (f, smax, g) = smoothed(a, &js, &c, mu)?;
                evals += 1;
                if smax < best {
                    best = smax;
                    best_c = c.clone();
                }
                let gn2: f64 = g.iter().map(|z| z.norm_sqr()).sum();
                if gn2.sqrt() < 1e-14 {
                    break;
                }
                let mut accepted = false;
                while step > 1e-18 * na {
                    let trial: Vec<C64> = c.iter().zip(&g).map(|(ci, gi)| ci - gi * step).collect();
                    let (ft, st, _) = smoothed(a, &js, &trial, mu)?;
                    evals += 1;
                    if ft <= f - 0.25 * step * gn2 {
                        if st < best {
                            best = st;
                            best_c = trial.clone();
                        }
                        c = trial;
                        step *= 2.0;
                        accepted = true;
                        break;
                    }
                    step *= 0.5;
                }
                if !accepted {
                    break;
                }
            }
            mu *= 0.1;
        }
        lower = lower.max(dual_lower_bound(a, &(a - combine(&js, &best_c)), &js)?);
    }
    lower = lower.max(dual_lower_bound(a, &(a - combine(&js, &best_c)), &js)?);
    let lower = lower.min(best);
    let status = if best - lower < tol.iter_tol { QuotientStatus::Certified } else { QuotientStatus::Inconclusive };
    Ok(QuotientNorm { lower, upper: best, status })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuotientConeReport {
    pub forward_checked: usize,
    pub forward_failures: usize,
    /// Largest certified `dist(1 - x, J)` over sampled `x ∈ F_A`.
    pub worst_forward: f64,
    pub lifts_checked: usize,
    pub lift_failures: usize,
    /// Largest `max(‖1 - y‖ - 1, dist(y - x, J))` over constructed lifts.
    pub worst_lift_residual: f64,
    pub inconclusive: usize,
}

/// Two-sided ideal `J` of `A` with identity `e`: checks that the quotient
/// map sends the cone of `A` onto the cone of `A/J`.
pub fn quotient_cone_check(
    alg: &FDAlgebra,
    j: &Subspace,
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<QuotientConeReport> {
    let one = alg.require_unit()?.clone();
    if !is_ideal(j, alg, true, tol) {
        return Err(precondition("J is not a two-sided ideal"));
    }
    let e = left_identity_search(j, alg, tol)?.ok_or_else(|| precondition("J has no identity"))?;
    if j.basis_matrices().iter().any(|b| frob(&(b * &e - b)) > tol.iter_tol) {
        return Err(precondition("J has no two-sided identity"));
    }
    let mut rng = rng_from_seed(derive_seed(seed, 0x51434b));
    let budget = DEFAULT_QUOTIENT_BUDGET;
    let mut rep = QuotientConeReport {
        forward_checked: 0,
        forward_failures: 0,
        worst_forward: 0.0,
        lifts_checked: 0,
        lift_failures: 0,
        worst_lift_residual: 0.0,
        inconclusive: 0,
    };
    for _ in 0..samples {
        // forward: x ∈ F_A maps into the quotient cone
        let c = alg.random_element(&mut rng);
        let c = &c * real(rng.random_range(0.2..=1.0) / operator_norm(&c)?.max(f64::MIN_POSITIVE));
        let x = &one - &c;
        let q = quotient_norm(&(&one - &x), j, tol, budget)?;
        rep.forward_checked += 1;
        if q.status == QuotientStatus::Inconclusive {
            rep.inconclusive += 1;
        }
        rep.worst_forward = rep.worst_forward.max(q.upper);
        if q.lower > 1.0 + tol.iter_tol {
            rep.forward_failures += 1;
        }

        // reverse: a coset in the quotient cone lifts into F_A
        let g = alg.random_element(&mut rng);
        let qg = quotient_norm(&g, j, tol, budget)?;
        if qg.upper <= tol.exact_tol {
            continue;
        }
        let target = rng.random_range(0.2..=1.0);
        let xp = &one - &g * real(target / qg.upper);
        let ome = &one - &e;
        let y = &ome * &xp * &ome + &e;
        let in_alg = alg.space.matrix_residual(&y);
        let coset = j.matrix_residual(&(&y - &xp));
        let excess = operator_norm(&(&one - &y))? - 1.0;
        let resid = excess.max(coset).max(in_alg);
        rep.lifts_checked += 1;
        rep.worst_lift_residual = rep.worst_lift_residual.max(resid);
        if resid > tol.iter_tol {
            rep.lift_failures += 1;
        }
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------
// Compressions and strict positivity

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompressionResult {
    pub invertible: bool,
    /// `None` for the empty compression.
    pub smallest_singular_value: Option<f64>,
}

/// Invertibility of `pxp` on the range of the projection `p`.
pub fn compression_invertibility(x: &ComplexMatrix, p: &ComplexMatrix, tol: &Tolerances) -> Result<CompressionResult> {
    if !strictly_real_positive(x, tol)? {
        return Err(precondition("compression_invertibility needs strictly real positive x"));
    }
    crate::matrix::check_same_dim(p, x.nrows())?;
    if !is_projection(p, tol.exact_tol.max(1e-12) * 10.0) {
        return Err(precondition("p is not an orthogonal projection"));
    }
    let q = range_basis(p, tol)?;
    if q.ncols() == 0 {
        return Ok(CompressionResult { invertible: true, smallest_singular_value: None });
    }
    let comp = q.adjoint() * x * &q;
    let smin = smallest_singular_value(&comp)?;
    let thr = crate::matrix::rank_threshold(norm(&comp), tol);
    Ok(CompressionResult { invertible: smin > thr, smallest_singular_value: Some(smin) })
}

/// Four independently computed readings of "x is as good as invertible" for
/// `x` in the cone of `M_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositivityChain {
    pub ideal_is_everything: bool,
    pub support_is_one: bool,
    pub no_vanishing_state: bool,
    pub strictly_real_positive: bool,
}

impl PositivityChain {
    pub fn agree(&self) -> bool {
        let v = [self.ideal_is_everything, self.support_is_one, self.no_vanishing_state, self.strictly_real_positive];
        v.iter().all(|&b| b == v[0])
    }
}

pub fn positivity_chain(x: &ComplexMatrix, tol: &Tolerances) -> Result<PositivityChain> {
    if !in_f(x, tol)? {
        return Err(precondition("positivity_chain needs ‖1 - x‖ ≤ 1"));
    }
    let n = x.nrows();
    let full = FDAlgebra::full(n, tol)?;
    let ideals = ideal_subspaces(x, &full, tol)?;
    let support_is_one = if frob(x) <= tol.exact_tol {
        false
    } else {
        let s = crate::support::support_projection(x, tol)?.s;
        operator_norm(&(s - identity(n)))? < tol.iter_tol
    };
    // distance from 0 to the numerical range, from the support function
    let gap = (0..720)
        .map(|k| support_function(x, 2.0 * std::f64::consts::PI * k as f64 / 720.0).map(|h| -h))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let srp = strictly_real_positive(x, tol)?;
    Ok(PositivityChain {
        ideal_is_everything: ideals.x_a.dim() == n * n,
        support_is_one,
        no_vanishing_state: gap > tol.exact_tol,
        strictly_real_positive: srp,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{diag_real, dist, from_real_rows};
    use crate::sample::{random_contraction, random_f_element, random_f_mixed, random_projection};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn generated_algebra_examples() {
        let t = tol();
        let mut rng = rng_from_seed(1);
        let p = random_projection(&mut rng, 4, 2);
        assert_eq!(generated_algebra(&p, &t).unwrap().dim(), 1);
        assert_eq!(generated_algebra(&diag_real(&[2.0, 0.0]), &t).unwrap().dim(), 1);
        assert_eq!(generated_algebra(&diag_real(&[1.0, 2.0]), &t).unwrap().dim(), 2);
        let nil = from_real_rows(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0]]);
        let oa = generated_algebra(&nil, &t).unwrap();
        assert_eq!(oa.dim(), 2);
        assert!(!oa.is_unital());
        assert!(generated_algebra(&crate::matrix::zeros(2), &t).is_err());
    }

    #[test]
    fn algebra_constructors_and_units() {
        let t = tol();
        let m2 = FDAlgebra::full(2, &t).unwrap();
        assert_eq!(m2.dim(), 4);
        assert!(dist(m2.unit().unwrap(), &identity(2)) < 1e-10);
        let t3 = FDAlgebra::upper_triangular(3, &t).unwrap();
        assert_eq!(t3.dim(), 6);
        assert!(t3.is_unital());
        let oa = generated_algebra(&diag_real(&[2.0, 0.0]), &t).unwrap();
        assert!(dist(oa.unit().unwrap(), &diag_real(&[1.0, 0.0])) < 1e-10);
        // not closed
        assert!(FDAlgebra::new(2, vec![unit(2, 0, 1), unit(2, 1, 0)], &t).is_err());
        let sum = FDAlgebra::direct_sum(&m2, &FDAlgebra::scalars(1, &t).unwrap(), &t).unwrap();
        assert_eq!(sum.dim(), 5);
        assert!(dist(sum.unit().unwrap(), &identity(3)) < 1e-10);
    }

    #[test]
    fn algebra_json_round_trip() {
        let t = tol();
        let a = FDAlgebra::upper_triangular(2, &t).unwrap();
        let s = serde_json::to_string(&a.to_json()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert!(v.get("ambient_dim").is_some() && v.get("basis").is_some() && v.get("unital").is_some());
        let b = FDAlgebra::from_json(&s, &t).unwrap();
        assert!(b.space().equals(a.space()));
        let mut f = a.to_file();
        f.unital = false;
        assert!(FDAlgebra::from_file(&f, &t).is_err());
    }

    #[test]
    fn ideal_examples() {
        let t = tol();
        let m2 = FDAlgebra::full(2, &t).unwrap();
        let x = diag_real(&[2.0, 0.0]);
        let id = ideal_subspaces(&x, &m2, &t).unwrap();
        assert_eq!((id.x_a.dim(), id.a_x.dim(), id.x_a_x.dim()), (2, 2, 1));
        assert!(id.x_a.contains_matrix(&unit(2, 0, 1)) && id.a_x.contains_matrix(&unit(2, 1, 0)));
        let id = ideal_subspaces(&identity(2), &m2, &t).unwrap();
        assert!(id.x_a.equals(m2.space()) && id.x_a_x.equals(m2.space()));
        let mut rng = rng_from_seed(2);
        let m4 = FDAlgebra::full(4, &t).unwrap();
        for _ in 0..10 {
            let x = random_f_mixed(&mut rng, 4);
            let id = ideal_subspaces(&x, &m4, &t).unwrap();
            assert!(id.x_a_x.contains_matrix(&x));
            let s = crate::support::support_projection(&x, &t).unwrap().s;
            let cols: Vec<ComplexVector> =
                id.x_a.basis_matrices().iter().flat_map(|m| m.column_iter().map(|c| c.into_owned()).collect::<Vec<_>>()).collect();
            let q = crate::matrix::column_space(&ComplexMatrix::from_columns(&cols), &t).unwrap();
            assert!(dist(&crate::matrix::projector(&q), &s) < 1e-8);
        }
    }

    #[test]
    fn left_identity_examples() {
        let t = tol();
        let m2 = FDAlgebra::full(2, &t).unwrap();
        let xa = ideal_subspaces(&diag_real(&[2.0, 0.0]), &m2, &t).unwrap().x_a;
        let e = left_identity_search(&xa, &m2, &t).unwrap().unwrap();
        assert!(dist(&e, &unit(2, 0, 0)) < 1e-10);
        let t2 = FDAlgebra::upper_triangular(2, &t).unwrap();
        let strict = Subspace::span_matrices(2, &[unit(2, 0, 1)], &t).unwrap();
        assert!(left_identity_search(&strict, &t2, &t).unwrap().is_none());
        let e = left_identity_search(m2.space(), &m2, &t).unwrap().unwrap();
        assert!(dist(&e, &identity(2)) < 1e-10);
        let not_right = Subspace::span_matrices(2, &[unit(2, 1, 0)], &t).unwrap();
        assert!(left_identity_search(&not_right, &t2, &t).is_err());
    }

    #[test]
    fn one_minus_ideal_examples() {
        let t = tol();
        let m3 = FDAlgebra::full(3, &t).unwrap();
        let (j, e) = one_minus_ideal(&identity(3), &m3, &t).unwrap();
        assert_eq!(j.dim(), 0);
        assert!(norm(&e.unwrap()) == 0.0);
        let (j, e) = one_minus_ideal(&crate::matrix::zeros(3), &m3, &t).unwrap();
        assert_eq!(j.dim(), 9);
        assert!(dist(&e.unwrap(), &identity(3)) < 1e-10);
        let mut rng = rng_from_seed(3);
        for trial in 0..200 {
            let n = 1 + trial % 6;
            let alg = FDAlgebra::full(n, &t).unwrap();
            let radius = rng.random_range(0.1..=1.0);
            let x = random_contraction(&mut rng, n, radius);
            let (_, e) = one_minus_ideal(&x, &alg, &t).unwrap();
            let e = e.expect("left identity exists");
            assert!(dist(&(&e * &e), &e) < 1e-8);
        }
        assert!(one_minus_ideal(&(identity(2) * real(2.0)), &FDAlgebra::full(2, &t).unwrap(), &t).is_err());
    }

    #[test]
    fn one_minus_ideal_in_triangular_algebra() {
        let t = tol();
        let t3 = FDAlgebra::upper_triangular(3, &t).unwrap();
        let mut rng = rng_from_seed(4);
        for _ in 0..30 {
            let g = t3.random_element(&mut rng);
            let x = &g / real(operator_norm(&g).unwrap());
            let (_, e) = one_minus_ideal(&x, &t3, &t).unwrap();
            assert!(e.is_some());
        }
    }

    #[test]
    fn nor_battery_examples() {
        let t = tol();
        let two = FDAlgebra::new(2, vec![identity(2), from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]])], &t).unwrap();
        let r = nor_battery(&two, 500, 7, &t).unwrap();
        assert!(r.all_pass && r.consistent, "{:?}", r.conditions);
        assert!(r.conditions.iter().all(|c| c.worst_margin > 1e-4));
        let m2 = FDAlgebra::full(2, &t).unwrap();
        let r = nor_battery(&m2, 100, 7, &t).unwrap();
        assert!(!r.all_pass && r.consistent);
        let e11 = r.conditions[0].witness.clone().unwrap();
        assert!(dist(&(&e11 * &e11), &e11) < 1e-10);
        let c = FDAlgebra::scalars(2, &t).unwrap();
        let r = nor_battery(&c, 50, 7, &t).unwrap();
        assert_eq!(r.samples, 0);
        assert!(r.all_pass && r.consistent);
        assert!(nor_battery(&generated_algebra(&unit(2, 0, 1), &t).unwrap(), 5, 1, &t).is_err());
    }

    #[test]
    fn ws_examples() {
        let t = tol();
        let m2 = FDAlgebra::full(2, &t).unwrap();
        let r = ws_battery(&diag_real(&[2.0, 0.0]), &m2, &t).unwrap();
        assert!(r.equivalent_block().iter().all(|&b| b) && r.zero_isolated && r.consistent);
        let y = r.y_a.unwrap();
        let x = diag_real(&[2.0, 0.0]);
        assert!(dist(&(&x * &y * &x), &x) < 1e-10);
        assert!(dist(&r.y_oa.unwrap(), &diag_real(&[0.5, 0.0])) < 1e-10);
        let j = from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        let r = ws_battery(&j, &m2, &t).unwrap();
        assert!(r.equivalent_block().iter().all(|&b| b) && r.consistent);
    }

    #[test]
    fn ws_nilpotent_witness() {
        let t = tol();
        let t3 = FDAlgebra::upper_triangular(3, &t).unwrap();
        let x = from_real_rows(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 0.0], &[0.0, 0.0, 2.0]]);
        assert!(ws_battery(&x, &t3, &t).is_err());
        let r = ws_battery_unchecked(&x, &t3, &t).unwrap();
        assert!(r.zero_isolated && !r.oa_semisimple && r.precondition_bypassed);
        assert!(r.equivalent_block().iter().all(|&b| !b), "{r:?}");
    }

    #[test]
    fn ws_equivalences_on_cone_samples() {
        let t = tol();
        let mut rng = rng_from_seed(5);
        for trial in 0..60 {
            let n = 1 + trial % 5;
            let x = random_f_mixed(&mut rng, n);
            let m = FDAlgebra::full(n, &t).unwrap();
            let r = ws_battery(&x, &m, &t).unwrap();
            assert!(r.consistent && r.equivalent_block()[0], "trial {trial}: {r:?}");
        }
    }

    #[test]
    fn quotient_norm_examples() {
        let t = tol();
        let t2 = FDAlgebra::upper_triangular(2, &t).unwrap();
        let j = Subspace::span_matrices(2, &[unit(2, 0, 1)], &t).unwrap();
        let a = from_real_rows(&[&[0.7, 3.0], &[0.0, -0.4]]);
        let q = quotient_norm(&a, &j, &t, DEFAULT_QUOTIENT_BUDGET).unwrap();
        assert_eq!(q.status, QuotientStatus::Certified);
        assert!((q.value().unwrap() - 0.7).abs() < 1e-6);
        let q = quotient_norm(&unit(2, 0, 1), &j, &t, 100).unwrap();
        assert!(q.upper < 1e-12);
        let zero = Subspace::zero(4, &t);
        let q = quotient_norm(&a, &zero, &t, 100).unwrap();
        assert!((q.upper - operator_norm(&a).unwrap()).abs() < 1e-12);
        let _ = t2;
    }

    #[test]
    fn quotient_norm_matches_line_search_oracle() {
        // dist(a, span{E12}) by dense scan of the complex b-plane
        let t = tol();
        let j = Subspace::span_matrices(2, &[unit(2, 0, 1)], &t).unwrap();
        let mut rng = rng_from_seed(6);
        for _ in 0..5 {
            let a = crate::sample::random_matrix(&mut rng, 2);
            let q = quotient_norm(&a, &j, &t, DEFAULT_QUOTIENT_BUDGET).unwrap();
            assert_eq!(q.status, QuotientStatus::Certified);
            let mut best = f64::INFINITY;
            let b0 = a[(0, 1)];
            for i in -200..=200 {
                for k in -200..=200 {
                    let b = b0 + crate::matrix::c64(i as f64 * 0.01, k as f64 * 0.01);
                    let mut m = a.clone();
                    m[(0, 1)] -= b;
                    best = best.min(operator_norm(&m).unwrap());
                }
            }
            assert!(q.upper <= best + 1e-9 && q.lower >= best - 2e-4, "{q:?} vs {best}");
        }
    }

    #[test]
    fn quotient_cone_on_blocks() {
        let t = tol();
        let m2 = FDAlgebra::full(2, &t).unwrap();
        let c = FDAlgebra::scalars(1, &t).unwrap();
        let a = FDAlgebra::direct_sum(&m2, &c, &t).unwrap();
        let j = Subspace::span_matrices(3, &[0, 1, 2, 3].map(|k| crate::matrix::direct_sum(&unit(2, k / 2, k % 2), &crate::matrix::zeros(1))), &t).unwrap();
        let r = quotient_cone_check(&a, &j, 20, 1, &t).unwrap();
        assert_eq!(r.forward_failures + r.lift_failures + r.inconclusive, 0, "{r:?}");
        let a = FDAlgebra::direct_sum(&m2, &m2, &t).unwrap();
        let j = Subspace::span_matrices(4, &[0, 1, 2, 3].map(|k| crate::matrix::direct_sum(&unit(2, k / 2, k % 2), &crate::matrix::zeros(2))), &t).unwrap();
        let r = quotient_cone_check(&a, &j, 20, 2, &t).unwrap();
        assert_eq!(r.forward_failures + r.lift_failures + r.inconclusive, 0, "{r:?}");
        assert!(r.worst_forward <= 1.0 + 1e-6);
    }

    #[test]
    fn compression_examples() {
        let t = tol();
        let mut rng = rng_from_seed(7);
        let x = random_f_element(&mut rng, 4, 0.8);
        assert!(compression_invertibility(&x, &identity(4), &t).unwrap().invertible);
        let r = compression_invertibility(&x, &crate::matrix::zeros(4), &t).unwrap();
        assert!(r.invertible && r.smallest_singular_value.is_none());
        for trial in 0..200 {
            let n = 1 + trial % 8;
            let radius = rng.random_range(0.1..0.99);
            let x = random_f_element(&mut rng, n, radius);
            let k = rng.random_range(0..=n);
            let p = random_projection(&mut rng, n, k);
            assert!(compression_invertibility(&x, &p, &t).unwrap().invertible);
        }
        assert!(compression_invertibility(&diag_real(&[2.0, 0.0]), &identity(2), &t).is_err());
    }

    #[test]
    fn positivity_chain_agrees() {
        let t = tol();
        let mut rng = rng_from_seed(8);
        for trial in 0..60 {
            let x = random_f_mixed(&mut rng, 1 + trial % 5);
            let c = positivity_chain(&x, &t).unwrap();
            assert!(c.agree(), "{c:?}");
        }
    }
}
