//! Named property suites with JSON reports.
//!
//! Every suite is deterministic in `(suite, dim, trials, seed, tol)`: trial
//! `i` draws from its own generator seeded by `derive_seed(seed, i)`.

use std::f64::consts::PI;
use std::path::Path;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{
    compression_invertibility, nor_battery, one_minus_ideal, positivity_chain, quotient_cone_check, quotient_norm,
    ws_battery, ws_battery_unchecked, FDAlgebra, QuotientStatus, DEFAULT_QUOTIENT_BUDGET,
};
use crate::calculus::{bai_sequence, matrix_power_r, root_cai, Polynomial};
use crate::cone::{distance_from_one, in_f, strictly_real_positive};
use crate::domar::{
    bump_cai_check, domar_criterion_check, make_weight, principal_density_check, quasinilpotence_estimate,
    titchmarsh_check, GridFunction, WeightSpec,
};
use crate::error::{Error, Result};
use crate::examples::{example_rdr, example_two_dim, triangular_spectral_radius, volterra};
use crate::matrix::{
    c64, diag_real, dist, hermitian_part, identity, lambda_max, lambda_min, operator_norm, operator_norm_power, powi,
    range_kernel_projections, real, smallest_singular_value, unit, ComplexMatrix, C64,
};
use crate::ocpmap::{amplify, choi, cone_violation, disk_test, is_cp, ocp_falsify, stinespring, MatrixMap};
use crate::sample::{
    derive_seed, random_contraction, random_density, random_f_element, random_f_mixed, random_half_f_element,
    random_hermitian, random_matrix, random_projection, random_singular_f_element, random_unitary, rng_from_seed,
    SuiteRng,
};
use crate::spectral::{
    max_argument, numerical_radius, numerical_range, sharp_neumann, spectral_radius, wedge_membership,
    NeumannVerdict, WedgeSpec, DEFAULT_THETA_COUNT,
};
use crate::subspace::Subspace;
use crate::support::{join_supports, state_vanishing_check, support_routes, DensityState};
use crate::tol::Tolerances;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub suite: String,
    /// Largest matrix dimension; the suite default when `None`.
    pub dim: Option<usize>,
    /// Number of random trials; the suite default when `None`.
    pub trials: Option<usize>,
    pub seed: u64,
    pub tol: Tolerances,
}

impl SuiteConfig {
    pub fn new(suite: impl Into<String>) -> Self {
        Self { suite: suite.into(), dim: None, trials: None, seed: 0, tol: Tolerances::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseStatus {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub name: String,
    pub status: CaseStatus,
    /// Distance to the threshold, positive when passing. `None` for yes/no
    /// checks.
    pub margin: Option<f64>,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub case: String,
    pub message: String,
    pub seed: Option<u64>,
    #[serde(with = "crate::algebra::opt_matrix")]
    pub matrix: Option<ComplexMatrix>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
    pub tol: Tolerances,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub config: ConfigEcho,
    pub cases: Vec<CaseRecord>,
    pub failures: Vec<FailureRecord>,
    pub wall_ms: u64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.cases.iter().all(|c| c.status == CaseStatus::Pass)
    }

    /// Case names and statuses, for determinism comparisons.
    pub fn outcomes(&self) -> Vec<(String, CaseStatus)> {
        self.cases.iter().map(|c| (c.name.clone(), c.status)).collect()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn emit_report(report: &SuiteReport, path: &Path) -> Result<()> {
    std::fs::write(path, report.to_json_string() + "\n")?;
    Ok(())
}

/// Case recorder handed to each suite.
pub struct Cases {
    cases: Vec<CaseRecord>,
    failures: Vec<FailureRecord>,
}

impl Cases {
    fn new() -> Self {
        Self { cases: Vec::new(), failures: Vec::new() }
    }

    fn push(&mut self, name: String, ok: bool, margin: Option<f64>, tol: f64, seed: Option<u64>, witness: Option<&ComplexMatrix>, message: String) {
        let status = if ok { CaseStatus::Pass } else { CaseStatus::Fail };
        if !ok {
            self.failures.push(FailureRecord { case: name.clone(), message, seed, matrix: witness.cloned() });
        }
        self.cases.push(CaseRecord { name, status, margin, tol });
    }

    /// Passes when `value ≤ limit`.
    pub fn at_most(&mut self, name: impl Into<String>, value: f64, limit: f64, seed: Option<u64>, witness: Option<&ComplexMatrix>) {
        let ok = value <= limit;
        let msg = format!("value {value:e} exceeds limit {limit:e}");
        self.push(name.into(), ok, Some(limit - value), limit, seed, witness, msg);
    }

    /// Passes when `value > limit`.
    pub fn above(&mut self, name: impl Into<String>, value: f64, limit: f64, seed: Option<u64>, witness: Option<&ComplexMatrix>) {
        let ok = value > limit;
        let msg = format!("value {value:e} not above {limit:e}");
        self.push(name.into(), ok, Some(value - limit), limit, seed, witness, msg);
    }

    pub fn truth(&mut self, name: impl Into<String>, ok: bool, tol: f64, seed: Option<u64>, witness: Option<&ComplexMatrix>, message: impl Into<String>) {
        self.push(name.into(), ok, None, tol, seed, witness, message.into());
    }

    /// Records the outcome of a fallible check; errors become failures.
    pub fn guard(&mut self, name: impl Into<String>, tol: f64, seed: Option<u64>, witness: Option<&ComplexMatrix>, f: impl FnOnce(&mut Self, &str) -> Result<()>) {
        let name = name.into();
        if let Err(e) = f(self, &name) {
            self.push(name, false, None, tol, seed, witness, e.to_string());
        }
    }
}

pub struct SuiteContext {
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
    pub tol: Tolerances,
}

impl SuiteContext {
    pub fn trial_seed(&self, i: usize) -> u64 {
        derive_seed(self.seed, i as u64)
    }

    pub fn rng(&self, i: usize) -> SuiteRng {
        rng_from_seed(self.trial_seed(i))
    }

    /// Dimensions cycle through `1..=dim`, or `lo..=dim` when given.
    fn dim_for(&self, i: usize, lo: usize) -> usize {
        let lo = lo.min(self.dim);
        lo + i % (self.dim - lo + 1)
    }
}

type SuiteFn = fn(&SuiteContext, &mut Cases);

pub struct SuiteEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub default_dim: usize,
    pub default_trials: usize,
    run: SuiteFn,
}

pub const SUITES: &[SuiteEntry] = &[
    SuiteEntry { name: "matcore", description: "SVD reconstruction, rank-nullity, range/kernel projections, Schur and JSON round trips", default_dim: 8, default_trials: 100, run: suite_matcore },
    SuiteEntry { name: "cone", description: "cone membership characterizations, roots stay in the cone, strict positivity vs rank", default_dim: 8, default_trials: 200, run: suite_cone },
    SuiteEntry { name: "roots", description: "square roots square back, roots stay in F and F/2, roots lie in oa(x)", default_dim: 8, default_trials: 200, run: suite_roots },
    SuiteEntry { name: "calculus", description: "polynomial composition, power round trips, e_n approximate identity bound", default_dim: 8, default_trials: 100, run: suite_calculus },
    SuiteEntry { name: "support-routes", description: "SVD, e_n-limit and power-limit support projections agree", default_dim: 8, default_trials: 200, run: suite_support_routes },
    SuiteEntry { name: "support-identities", description: "s(x) = s(x*x) = s(xx*) = s(x*) and the state vanishing biconditional", default_dim: 8, default_trials: 200, run: suite_support_identities },
    SuiteEntry { name: "support-join", description: "support of a positive combination equals the join of supports", default_dim: 8, default_trials: 100, run: suite_support_join },
    SuiteEntry { name: "numerical-range", description: "numerical ranges of cone elements lie in the disk |1 - w| <= 1; r <= nu <= norm", default_dim: 8, default_trials: 200, run: suite_numerical_range },
    SuiteEntry { name: "sharp-neumann", description: "norm-pair invertibility classifier against the rank oracle", default_dim: 8, default_trials: 500, run: suite_sharp_neumann },
    SuiteEntry { name: "wedge", description: "numerical ranges of (x/2)^(1/n) shrink into sectors", default_dim: 6, default_trials: 20, run: suite_wedge },
    SuiteEntry { name: "ws-battery", description: "inner-inverse and closed-range conditions agree on cone elements; nilpotent blocks separate them outside", default_dim: 8, default_trials: 200, run: suite_ws_battery },
    SuiteEntry { name: "one-minus-ideal", description: "(1 - x)A has a left identity for contractions x", default_dim: 6, default_trials: 200, run: suite_one_minus_ideal },
    SuiteEntry { name: "positivity-chain", description: "xA = A, s(x) = 1, no vanishing state and strict real positivity agree", default_dim: 8, default_trials: 200, run: suite_positivity_chain },
    SuiteEntry { name: "compression", description: "compressions of strictly real positive elements are invertible", default_dim: 8, default_trials: 200, run: suite_compression },
    SuiteEntry { name: "nor-battery", description: "unit-ball conditions on the two-dimensional example and their failure on M_2", default_dim: 2, default_trials: 500, run: suite_nor_battery },
    SuiteEntry { name: "algebra-closure", description: "block algebras are closed, units act as units, JSON round trip", default_dim: 3, default_trials: 50, run: suite_algebra_closure },
    SuiteEntry { name: "rdr-commutant", description: "no nontrivial diagonal projection commutes with R*R", default_dim: 8, default_trials: 1, run: suite_rdr },
    SuiteEntry { name: "volterra", description: "discretized Volterra operator: spectral radius, norm, quasinilpotent e_m", default_dim: 2000, default_trials: 1, run: suite_volterra },
    SuiteEntry { name: "domar", description: "Titchmarsh additivity, translation integral, quasinilpotence, bumps, principal ideals", default_dim: 1, default_trials: 500, run: suite_domar },
    SuiteEntry { name: "domar-titchmarsh", description: "discrete Titchmarsh additivity of support starts", default_dim: 1, default_trials: 500, run: suite_domar_titchmarsh },
    SuiteEntry { name: "ocp", description: "transpose witness, no witnesses for CP maps, Stinespring round trip, disk test", default_dim: 4, default_trials: 50, run: suite_ocp },
    SuiteEntry { name: "quotient-cone", description: "quotient maps carry the cone onto the quotient cone; certified quotient norms", default_dim: 2, default_trials: 50, run: suite_quotient_cone },
];

pub fn find_suite(name: &str) -> Option<&'static SuiteEntry> {
    SUITES.iter().find(|s| s.name == name)
}

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.name).collect()
}

pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let entry = find_suite(&cfg.suite).ok_or_else(|| {
        Error::InvalidInput(format!("unknown suite '{}'; known suites: {}", cfg.suite, suite_names().join(", ")))
    })?;
    let dim = cfg.dim.unwrap_or(entry.default_dim);
    let trials = cfg.trials.unwrap_or(entry.default_trials);
    if dim == 0 || trials == 0 {
        return Err(Error::InvalidInput("dim and trials must be positive".into()));
    }
    let ctx = SuiteContext { dim, trials, seed: cfg.seed, tol: cfg.tol };
    let start = Instant::now();
    let mut cases = Cases::new();
    (entry.run)(&ctx, &mut cases);
    Ok(SuiteReport {
        suite: entry.name.to_string(),
        config: ConfigEcho { dim, trials, seed: cfg.seed, tol: cfg.tol },
        cases: cases.cases,
        failures: cases.failures,
        wall_ms: start.elapsed().as_millis() as u64,
    })
}

// ---------------------------------------------------------------------------

fn rank_invertible(x: &ComplexMatrix, tol: &Tolerances) -> Result<bool> {
    let smin = smallest_singular_value(x)?;
    Ok(smin > crate::matrix::rank_threshold(operator_norm(x)?, tol))
}

fn suite_matcore(ctx: &SuiteContext, c: &mut Cases) {
    let t = ctx.tol;
    for i in 0..ctx.trials {
        let seed = ctx.trial_seed(i);
        let mut rng = ctx.rng(i);
        let n = ctx.dim_for(i, 1);
        let k = rng.random_range(1..=n);
        // rank k by construction
        let a = random_matrix(&mut rng, n).columns(0, k).into_owned() * random_matrix(&mut rng, n).rows(0, k).into_owned();
        c.guard(format!("trial {i}: svd reconstruction"), 100.0 * t.exact_tol, Some(seed), Some(&a), |c, name| {
            let d = crate::matrix::svd(&a)?;
            let sig = ComplexMatrix::from_diagonal(&crate::matrix::ComplexVector::from_iterator(n, d.s.iter().map(|&v| real(v))));
            let scale = operator_norm(&a)?.max(1.0);
            c.at_most(name, dist(&(&d.u * sig * d.v.adjoint()), &a) / scale, 100.0 * t.exact_tol, Some(seed), Some(&a));
            Ok(())
        });
        c.guard(format!("trial {i}: rank-nullity"), 0.0, Some(seed), Some(&a), |c, name| {
            let r = crate::matrix::numerical_rank(&a, &t)?;
            let nul = crate::matrix::null_space(&a, &t)?.ncols();
            c.truth(name, r == k && r + nul == n, 0.0, Some(seed), Some(&a), format!("rank {r}, nullity {nul}, built rank {k}"));
            Ok(())
        });
        c.guard(format!("trial {i}: range and kernel projections"), 10.0 * t.exact_tol, Some(seed), Some(&a), |c, name| {
            let (p, q) = range_kernel_projections(&a, &t)?;
            let eps = 10.0 * t.exact_tol;
            let scale = operator_norm(&a)?.max(1.0);
            let ok = crate::matrix::is_projection(&p, eps)
                && crate::matrix::is_projection(&q, eps)
                && dist(&(&p * &a), &a) <= eps * scale
                && operator_norm(&(&a * &q))? <= eps * scale;
            c.truth(name, ok, eps, Some(seed), Some(&a), "projection identities failed");
            Ok(())
        });
        let x = random_matrix(&mut rng, n);
        c.guard(format!("trial {i}: schur"), 100.0 * t.exact_tol, Some(seed), Some(&x), |c, name| {
            let (q, tt) = crate::matrix::schur(&x)?;
            let unitary = dist(&(q.adjoint() * &q), &identity(n));
            let back = dist(&(&q * &tt * q.adjoint()), &x) / operator_norm(&x)?.max(1.0);
            c.truth(format!("{name}: triangular"), crate::matrix::is_upper_triangular(&tt), 0.0, Some(seed), Some(&x), "factor not triangular");
            c.at_most(name, unitary.max(back), 100.0 * t.exact_tol, Some(seed), Some(&x));
            Ok(())
        });
        c.guard(format!("trial {i}: json round trip"), 0.0, Some(seed), Some(&x), |c, name| {
            let y = crate::matrix::matrix_from_json(&crate::matrix::matrix_to_json(&x).to_string())?;
            c.truth(name, y == x, 0.0, Some(seed), Some(&x), "matrix changed");
            Ok(())
        });
        let b = random_matrix(&mut rng, n);
        let vs = [crate::matrix::vec_of(&x), crate::matrix::vec_of(&b)];
        c.guard(format!("trial {i}: subspace orthonormal"), 10.0 * t.exact_tol, Some(seed), None, |c, name| {
            let sp = Subspace::span_vectors(n * n, &vs, &t)?;
            let g = sp.basis().adjoint() * sp.basis();
            c.at_most(name, dist(&g, &identity(sp.dim())), 10.0 * t.exact_tol, Some(seed), None);
            c.truth(format!("{name}: contains generators"), sp.contains_matrix(&x) && sp.contains_matrix(&b), 0.0, Some(seed), None, "generator outside span");
            Ok(())
        });
    }
}

fn suite_algebra_closure(ctx: &SuiteContext, c: &mut Cases) {
    let t = ctx.tol;
    for i in 0..ctx.trials {
        let seed = ctx.trial_seed(i);
        let mut rng = ctx.rng(i);
        c.guard(format!("algebra {i}"), t.iter_tol, Some(seed), None, |c, name| {
            let (a, _) = random_block_algebra(&mut rng, ctx.dim.max(1), &t)?;
            let (bs, space) = (a.basis(), a.space());
            let worst = bs.iter().flat_map(|x| bs.iter().map(move |y| space.matrix_residual(&(x * y)))).fold(0.0, f64::max);
            c.at_most(format!("{name}: closed"), worst, t.rank_tol, Some(seed), None);
            let u = a.unit().cloned().unwrap_or_else(|| ComplexMatrix::zeros(a.ambient_dim(), a.ambient_dim()));
            let unit_err = bs.iter().map(|b| dist(&(&u * b), b).max(dist(&(b * &u), b))).fold(0.0, f64::max);
            c.truth(format!("{name}: unital"), a.is_unital(), 0.0, Some(seed), None, "block algebra reported non-unital");
            c.at_most(format!("{name}: unit"), unit_err, t.iter_tol, Some(seed), Some(&u));
            let back = FDAlgebra::from_json(&a.to_json().to_string(), &t)?;
            c.truth(format!("{name}: json round trip"), back.space().equals(a.space()) && back.is_unital(), 0.0, Some(seed), None, "algebra changed");
            Ok(())
        });
    }
}

fn suite_domar_titchmarsh(ctx: &SuiteContext, c: &mut Cases) {
    let t = ctx.tol;
    c.guard("titchmarsh", 0.0, Some(ctx.seed), None, |c, name| {
        let r = titchmarsh_check(ctx.trials, ctx.seed, &t)?;
        c.truth(format!("{name}: exact additivity"), r.violations == 0 && r.equalities == r.tested, 0.0, Some(ctx.seed), None, format!("{r:?}"));
        c.truth(format!("{name}: no zero divisors"), r.zero_divisors == 0, 0.0, Some(ctx.seed), None, format!("{r:?}"));
        Ok(())
    });
}

fn suite_cone(ctx: &SuiteContext, c: &mut Cases) {
    let t = ctx.tol;
    for i in 0..ctx.trials {
        let seed = ctx.trial_seed(i);
        let mut rng = ctx.rng(i);
        let x = random_f_mixed(&mut rng, ctx.dim_for(i, 1));
        c.guard(format!("trial {i}: characterizations"), t.exact_tol, Some(seed), Some(&x), |c, name| {
            let d = distance_from_one(&x)?;
            let lm = lambda_min(&(&x + x.adjoint() - x.adjoint() * &x))?;
            c.truth(name, in_f(&x, &t)?, t.exact_tol, Some(seed), Some(&x), "in_F rejected a sampled cone element");
            c.at_most(format!("{name} gap"), (d * d - (1.0 - lm)).abs(), 10.0 * t.exact_tol * (1.0 + d * d), Some(seed), Some(&x));
            Ok(())
        });
        for (r, label) in [(0.5, "1/2"), (1.0 / 3.0, "1/3"), (0.2, "1/5")] {
            c.guard(format!("trial {i}: root {label} in F"), t.exact_tol, Some(seed), Some(&x), |c, name| {
                let y = matrix_power_r(&x, r, &t)?;
                c.at_most(name, distance_from_one(&y)?, 1.0 + 10.0 * t.exact_tol, Some(seed), Some(&x));
                Ok(())
            });
        }
        let radius = rng.random_range(0.2..=1.0);
        let h = random_half_f_element(&mut rng, ctx.dim_for(i, 1), radius);
        for (r, label) in [(0.5, "1/2"), (1.0 / 3.0, "1/3"), (0.2, "1/5")] {
            c.guard(format!("trial {i}: root {label} in F/2"), t.exact_tol, Some(seed), Some(&h), |c, name| {
                let y = matrix_power_r(&h, r, &t)?;
                c.at_most(name, distance_from_one(&(y * real(2.0)))?, 1.0 + 10.0 * t.exact_tol, Some(seed), Some(&h));
                Ok(())
            });
        }
        c.guard(format!("trial {i}: strict positivity vs rank"), t.exact_tol, Some(seed), Some(&x), |c, name| {
            let (a, b) = (strictly_real_positive(&x, &t)?, rank_invertible(&x, &t)?);
            c.truth(name, a == b, t.exact_tol, Some(seed), Some(&x), format!("strictly real positive {a}, invertible {b}"));
            Ok(())
        });
    }
}

fn suite_roots(ctx: &SuiteContext, c: &mut Cases) {
    let t = ctx.tol;
    for i in 0..ctx.trials {
        let seed = ctx.trial_seed(i);
        let mut rng = ctx.rng(i);
        let n = ctx.dim_for(i, 1);
        let x = random_f_mixed(&mut rng, n);
        let r = rng.random_range(0.05..1.0);
        c.guard(format!("trial {i}: sqrt squared"), 1e-6, Some(seed), Some(&x), |c, name| {
            let s = matrix_power_r(&x, 0.5, &t)?;
            c.at_most(name, dist(&(&s * &s), &x), 1e-6, Some(seed), Some(&x));
            Ok(())
        });
        c.guard(format!("trial {i}: x^r in F"), 1e-8, Some(seed), Some(&x), |c, name| {
            let y = matrix_power_r(&x, r, &t)?;
            c.at_most(name, distance_from_one(&y)?, 1.0 + 1e-8, Some(seed), Some(&x));
            let oa = crate::algebra::generated_algebra(&x, &t)?;
            c.at_most(format!("trial {i}: x^r in oa(x)"), oa.space().matrix_residual(&y), 1e-8, Some(seed), Some(&x));
            Ok(())
        });
        let radius = rng.random_range(0.2..=1.0);
        let h = random_half_f_element(&mut rng, n, radius);
        c.guard(format!("trial {i}: x^r in F/2"), 1e-8, Some(seed), Some(&h), |c, name| {
            let y = matrix_power_r(&h, r, &t)?;
            c.at_most(name, distance_from_one(&(y * real(2.0)))?, 1.0 + 1e-8, Some(seed), Some(&h));
            Ok(())
        });
    }
}

fn random_unit_l1_polynomial(rng: &mut impl Rng, deg: usize) -> Polynomial {
    let p = Polynomial::new((0..=deg).map(|_| c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect());
    let s = p.l1_norm();
    Polynomial::new(p.coeffs.iter().map(|z| z / s).collect())
}

fn suite_calculus(ctx: &SuiteContext, c: &mut Cases) {
    let t = ctx.tol;
    for i in 0..ctx.trials {
        let seed = ctx.trial_seed(i);
        let mut rng = ctx.rng(i);
        let n = ctx.dim_for(i, 1);
        let tm = random_contraction(&mut rng, n, 1.0);
        let f = random_unit_l1_polynomial(&mut rng, 3);
        let g = random_unit_l1_polynomial(&mut rng, 4);
        let lhs = f.eval_matrix(&g.eval_matrix(&tm));
        let rhs = f.compose(&g).eval_matrix(&tm);
        c.at_most(format!("trial {i}: composition"), dist(&lhs, &rhs), 100.0 * t.exact_tol, Some(seed), Some(&tm));

        let x = random_f_mixed(&mut rng, n);
        for k in [2u64, 3] {
            c.guard(format!("trial {i}: (x^(1/{k}))^{k}"), t.iter_tol, Some(seed), Some(&x), |c, name| {
                let y = matrix_power_r(&x, 1.0 / k as f64, &t)?;
                c.at_most(name, dist(&powi(&y, k), &x), t.iter_tol, Some(seed), Some(&x));
                Ok(())
            });
        }
        for m in [1u64, 4, 16, 64] {
            c.guard(format!("trial {i}: x e_{m} - x"), 2.0 / m as f64, Some(seed), Some(&x), |c, name| {
                let e = bai_sequence(&x, m, &t)?;
                c.at_most(name, operator_norm(&(&x * e - &x))?, 2.0 / m as f64 + t.exact_tol, Some(seed), Some(&x));
                Ok(())
            });
        }
    }
}

fn suite_support_routes(ctx: &SuiteContext, c: &mut Cases) {
    let t = ctx.tol;
    for i in 0..ctx.trials {
        let seed = ctx.trial_seed(i);
        let mut rng = ctx.rng(i);
        let x = random_f_mixed(&mut rng, ctx.dim_for(i, 1));
        c.guard(format!("trial {i}: route agreement"), t.iter_tol, Some(seed), Some(&x), |c, name| {
            let r = support_routes(&x, &t)?;
            c.at_most(name, r.max_disagreement(), t.iter_tol, Some(seed), Some(&x));
            Ok(())
        });
    }
}

fn suite_support_identities(ctx: &SuiteContext, c: &mut Cases) {
    let t = ctx.tol;
    for i in 0..ctx.trials {
        let seed = ctx.trial_seed(i);
        let mut rng = ctx.rng(i);
        let n = ctx.dim_for(i, 1);
        let x = random_f_mixed(&mut rng, n);
        c.guard(format!("trial {i}: s(x) = s(x*x) = s(xx*) = s(x*)"), t.exact_tol, Some(seed), Some(&x), |c, name| {
            let s = range_kernel_projections(&x, &t)?.0;
            let others = [x.adjoint() * &x, &x * x.adjoint(), x.adjoint()];
            let worst = others
                .iter()
                .map(|y| range_kernel_projections(y, &t).map(|(p, _)| dist(&p, &s)))
                .collect::<Result<Vec<f64>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            c.at_most(name, worst, 10.0 * t.exact_tol, Some(seed), Some(&x));
            Ok(())
        });
        let rank = rng.random_range(1..=n);
        let rho = random_density(&mut rng, n, rank);
        // also a state supported on the kernel when there is one
        let kernel_state = {
            let (_, k) = range_kernel_projections(&x, &t).unwrap_or((identity(n), ComplexMatrix::zeros(n, n)));
            let tr = k.trace().re;
            (tr > 0.5).then(|| k / real(tr))
        };
        for (label, r) in [("random state", Some(rho)), ("kernel state", kernel_state)] {
            let Some(r) = r else { continue };
            c.guard(format!("trial {i}: vanishing biconditional, {label}"), t.iter_tol, Some(seed), Some(&x), |c, name| {
                let st = DensityState::new(r, &t)?;
                let v = state_vanishing_check(&x, &st, &t)?;
                c.truth(name, v.consistent, t.iter_tol, Some(seed), Some(&x), format!("phi(x) = {}, phi(s) = {}", v.phi_x, v.phi_s));
                Ok(())
            });
        }
    }
}

fn suite_support_join(ctx: &SuiteContext, c: &mut Cases) {
    let t = ctx.tol;
    for i in 0..ctx.trials {
        let seed = ctx.trial_seed(i);
        let mut rng = ctx.rng(i);
        let n = ctx.dim_for(i, 1);
        let k = rng.random_range(1..=4);
        let xs: Vec<ComplexMatrix> = (0..k).map(|_| random_f_mixed(&mut rng, n)).collect();
        let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.1..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let alphas: Vec<f64> = raw.iter().map(|a| a / total).collect();
        c.guard(format!("trial {i}: join of {k} supports"), t.iter_tol, Some(seed), xs.first(), |c, name| {
            let (sj, ss) = join_supports(&xs, &alphas, &t)?;
            c.at_most(name, dist(&sj, &ss), t.iter_tol, Some(seed), xs.first());
            Ok(())
        });
    }
}

fn suite_numerical_range(ctx: &SuiteContext, c: &mut Cases) {
    let t = ctx.tol;
    for i in 0..ctx.trials {
        let seed = ctx.trial_seed(i);
        let mut rng = ctx.rng(i);
        let n = ctx.dim_for(i, 1);
        let x = random_f_mixed(&mut rng, n);
        c.guard(format!("trial {i}: W(x) in disk"), t.iter_tol, Some(seed), Some(&x), |c, name| {
            let nr = numerical_range(&x, DEFAULT_THETA_COUNT)?;
            let worst = nr.boundary_points.iter().map(|w| (real(1.0) - w).norm()).fold(0.0, f64::max);
            c.at_most(name, worst, 1.0 + t.iter_tol, Some(seed), Some(&x));
            Ok(())
        });
        let a = random_matrix(&mut rng, n);
        c.guard(format!("trial {i}: r <= nu <= norm"), t.exact_tol, Some(seed), Some(&a), |c, name| {
            let (r, nu, nm) = (spectral_radius(&a)?, numerical_radius(&a)?, operator_norm(&a)?);
            let slack = 10.0 * t.exact_tol * nm.max(1.0);
            c.truth(name, r <= nu + slack && nu <= nm + slack, t.exact_tol, Some(seed), Some(&a), format!("r = {r}, nu = {nu}, norm = {nm}"));
            Ok(())
        });
    }
}

/// `1 - u` for a unitary `u` whose eigenvalues stay at angle at least 0.3
/// from 1: on the boundary of the cone but invertible.
fn boundary_invertible(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let w = random_unitary(rng, n);
    let d = ComplexMatrix::from_diagonal(&crate::matrix::ComplexVector::from_fn(n, |_, _| {
        C64::from_polar(1.0, rng.random_range(0.3..(2.0 * PI - 0.3)))
    }));
    identity(n) - &w * d * w.adjoint()
}

fn suite_sharp_neumann(ctx: &SuiteContext, c: &mut Cases) {
    let t = ctx.tol;
    for i in 0..ctx.trials {
        let seed = ctx.trial_seed(i);
        let mut rng = ctx.rng(i);
        let n = ctx.dim_for(i, 2);
        let kind = i % 4;
        let x = match kind {
            0 => {
                let r = rng.random_range(0.3..0.99);
                random_f_element(&mut rng, n, r)
            }
            1 => boundary_invertible(&mut rng, n),
            _ => {
                let k = rng.random_range(1..=n.max(2) - 1).min(n);
                let r = rng.random_range(0.3..=1.0);
                random_singular_f_element(&mut rng, n, k, r)
            }
        };
        c.guard(format!("trial {i}: classifier vs rank"), t.iter_tol, Some(seed), Some(&x), |c, name| {
            let v = sharp_neumann(&x, &t)?;
            let expected = if kind < 2 { NeumannVerdict::Invertible } else { NeumannVerdict::Singular };
            c.truth(name, v == expected, t.iter_tol, Some(seed), Some(&x), format!("verdict {v:?}, constructed as {expected:?}"));
            Ok(())
        });
    }
}

fn suite_wedge(ctx: &SuiteContext, c: &mut Cases) {
    let t = ctx.tol;
    for i in 0..ctx.trials {
        let seed = ctx.trial_seed(i);
        let mut rng = ctx.rng(i);
        let x = random_f_mixed(&mut rng, ctx.dim_for(i, 2));
        c.guard(format!("trial {i}: wedges"), t.exact_tol, Some(seed), Some(&x), |c, name| {
            let mut prev = f64::INFINITY;
            let mut shrinking = true;
            let mut inside = true;
            for n in [1u32, 2, 4, 8, 16] {
                let u = root_cai(&x, n, &t)?;
                let arg = max_argument(&u, DEFAULT_THETA_COUNT, &t)?;
                shrinking &= arg <= prev + t.exact_tol;
                prev = arg;
                if n >= 2 {
                    inside &= wedge_membership(&u, WedgeSpec::new(PI / (2.0 * f64::from(n)))?, DEFAULT_THETA_COUNT, &t)?;
                }
            }
            c.truth(format!("{name}: shrinking"), shrinking, t.exact_tol, Some(seed), Some(&x), "maximal argument increased");
            c.truth(format!("{name}: sector pi/2n"), inside, t.exact_tol, Some(seed), Some(&x), "root left its sector");
            Ok(())
        });
    }
}

/// `N_j ⊕ D` with `N_j` the nilpotent shift and `D` invertible diagonal.
fn nilpotent_plus_invertible(j: usize, diag: &[f64]) -> ComplexMatrix {
    let mut n = ComplexMatrix::zeros(j, j);
    for k in 0..j - 1 {
        n[(k, k + 1)] = real(1.0);
    }
    crate::matrix::direct_sum(&n, &diag_real(diag))
}

fn suite_ws_battery(ctx: &SuiteContext, c: &mut Cases) {
    let t = ctx.tol;
    for i in 0..ctx.trials {
        let seed = ctx.trial_seed(i);
        let mut rng = ctx.rng(i);
        let n = ctx.dim_for(i, 1);
        let x = random_f_mixed(&mut rng, n);
        c.guard(format!("trial {i}: equivalences"), t.iter_tol, Some(seed), Some(&x), |c, name| {
            let a = FDAlgebra::full(n, &t)?;
            let r = ws_battery(&x, &a, &t)?;
            c.truth(name, r.consistent, t.iter_tol, Some(seed), Some(&x), format!("{:?}", r.equivalent_block()));
            Ok(())
        });
    }
    for (j, d) in [(2usize, vec![2.0]), (3, vec![2.0]), (2, vec![1.5, 3.0]), (3, vec![2.5, -1.0])] {
        let x = nilpotent_plus_invertible(j, &d);
        let n = x.nrows();
        c.guard(format!("nilpotent {j} + invertible {}: isolated zero without inner inverse", d.len()), t.iter_tol, None, Some(&x), |c, name| {
            let a = FDAlgebra::upper_triangular(n, &t)?;
            let r = ws_battery_unchecked(&x, &a, &t)?;
            let ok = r.zero_isolated && !r.inner_inverse_in_a && !r.oa_semisimple;
            c.truth(name, ok, t.iter_tol, None, Some(&x), format!("{r:?}"));
            Ok(())
        });
    }
}

fn suite_one_minus_ideal(ctx: &SuiteContext, c: &mut Cases) {
    let t = ctx.tol;
    for i in 0..ctx.trials {
        let seed = ctx.trial_seed(i);
        let mut rng = ctx.rng(i);
        let n = ctx.dim_for(i, 1);
        let radius = rng.random_range(0.1..=1.0);
        let x = random_contraction(&mut rng, n, radius);
        c.guard(format!("trial {i}: left identity"), t.iter_tol, Some(seed), Some(&x), |c, name| {
            let a = FDAlgebra::full(n, &t)?;
            let (_, e) = one_minus_ideal(&x, &a, &t)?;
            c.truth(name, e.is_some(), t.iter_tol, Some(seed), Some(&x), "no left identity found");
            Ok(())
        });
    }
}

fn suite_positivity_chain(ctx: &SuiteContext, c: &mut Cases) {
    let t = ctx.tol;
    for i in 0..ctx.trials {
        let seed = ctx.trial_seed(i);
        let mut rng = ctx.rng(i);
        let x = random_f_mixed(&mut rng, ctx.dim_for(i, 1));
        c.guard(format!("trial {i}: four readings agree"), t.exact_tol, Some(seed), Some(&x), |c, name| {
            let ch = positivity_chain(&x, &t)?;
            c.truth(name, ch.agree(), t.exact_tol, Some(seed), Some(&x), format!("{ch:?}"));
            Ok(())
        });
    }
}

fn suite_compression(ctx: &SuiteContext, c: &mut Cases) {
    let t = ctx.tol;
    for i in 0..ctx.trials {
        let seed = ctx.trial_seed(i);
        let mut rng = ctx.rng(i);
        let n = ctx.dim_for(i, 1);
        let r = rng.random_range(0.1..0.99);
        let x = random_f_element(&mut rng, n, r);
        let k = rng.random_range(0..=n);
        let p = random_projection(&mut rng, n, k);
        c.guard(format!("trial {i}: pxp invertible on rank {k}"), t.exact_tol, Some(seed), Some(&x), |c, name| {
            let res = compression_invertibility(&x, &p, &t)?;
            c.truth(name, res.invertible, t.exact_tol, Some(seed), Some(&x), format!("{res:?}"));
            Ok(())
        });
    }
}

fn suite_nor_battery(ctx: &SuiteContext, c: &mut Cases) {
    let t = ctx.tol;
    c.guard("two-dimensional example", 1e-3, Some(ctx.seed), None, |c, name| {
        let a = example_two_dim(&t)?;
        let r = nor_battery(&a, ctx.trials, ctx.seed, &t)?;
        c.truth(format!("{name}: sampled"), r.samples >= ctx.trials, 0.0, Some(ctx.seed), None, format!("only {} samples", r.samples));
        for cond in &r.conditions {
            c.above(format!("{name}: {}", cond.name), cond.worst_margin, 1e-3, Some(ctx.seed), cond.witness.as_ref());
        }
        Ok(())
    });
    c.guard("M_2", t.iter_tol, Some(ctx.seed), None, |c, name| {
        let a = FDAlgebra::full(2, &t)?;
        let r = nor_battery(&a, ctx.trials.min(100), ctx.seed, &t)?;
        c.truth(format!("{name}: fails consistently"), !r.all_pass && r.consistent, t.iter_tol, Some(ctx.seed), None, format!("{:?}", r.conditions));
        let w = r.conditions[0].witness.clone();
        let idem = w.as_ref().map_or(f64::INFINITY, |w| dist(&(w * w), w));
        c.at_most(format!("{name}: idempotent witness"), idem, t.exact_tol, Some(ctx.seed), w.as_ref());
        Ok(())
    });
}

fn suite_rdr(ctx: &SuiteContext, c: &mut Cases) {
    for n in 2..=ctx.dim.clamp(2, crate::examples::RDR_MAX) {
        c.guard(format!("n = {n}"), 1e-6, None, None, |c, name| {
            let ex = example_rdr(n)?;
            c.above(name, ex.min_commutator, 1e-6, None, None);
            Ok(())
        });
    }
}

fn suite_volterra(ctx: &SuiteContext, c: &mut Cases) {
    let t = ctx.tol;
    c.guard("spectral radius of V_100", 0.005, None, None, |c, name| {
        c.at_most(name, triangular_spectral_radius(&volterra(100)?)?, 0.005, None, None);
        Ok(())
    });
    let n = ctx.dim.max(2);
    c.guard(format!("norm of V_{n}"), 1e-3, None, None, |c, name| {
        let nv = operator_norm_power(&volterra(n)?, 10_000, 1e-13)?;
        c.at_most(name, (nv - 2.0 / PI).abs(), 1e-3, None, None);
        Ok(())
    });
    for m in [1usize, 10, 50, 200] {
        c.guard(format!("e_1, e_2 of the Cayley element of V_{m} quasinilpotent"), 0.0, None, None, |c, name| {
            let m = m.max(2);
            let q = crate::examples::volterra_quasinilpotence(m, 1.0, &[1, 2], &t)?;
            let worst = q.radii.iter().map(|&(_, r)| r).fold(0.0, f64::max);
            c.at_most(name, worst, 2.0 / m as f64, None, None);
            Ok(())
        });
    }
}

fn suite_domar(ctx: &SuiteContext, c: &mut Cases) {
    let t = ctx.tol;
    c.guard("titchmarsh", 0.0, Some(ctx.seed), None, |c, name| {
        let r = titchmarsh_check(ctx.trials, ctx.seed, &t)?;
        c.truth(format!("{name}: exact additivity"), r.violations == 0 && r.equalities == r.tested, 0.0, Some(ctx.seed), None, format!("{r:?}"));
        c.truth(format!("{name}: no zero divisors"), r.zero_divisors == 0, 0.0, Some(ctx.seed), None, format!("{r:?}"));
        Ok(())
    });
    c.guard("standard ideals multiply", 0.0, Some(ctx.seed), None, |c, name| {
        let mut rng = rng_from_seed(derive_seed(ctx.seed, 0x5354));
        let mut bad = 0;
        for _ in 0..100 {
            let f = crate::domar::random_grid_function(&mut rng, 0.01, 400);
            let g = crate::domar::random_grid_function(&mut rng, 0.01, 400);
            if let Ok(fg) = crate::domar::convolve_exact(&f, &g, &t) {
                let (a, b) = (crate::domar::alpha(&f, &t), crate::domar::alpha(&g, &t));
                if crate::domar::alpha(&fg, &t) < a + b - 1e-12 {
                    bad += 1;
                }
            }
        }
        c.truth(name, bad == 0, 0.0, Some(ctx.seed), None, format!("{bad} products left J_(a+b)"));
        Ok(())
    });
    c.guard("translation integral", 1e-6, None, None, |c, name| {
        let w = make_weight(WeightSpec::Gaussian, 10.0, &t)?;
        for tp in [0.5, 1.0, 2.0] {
            let r = domar_criterion_check(&w, tp, 10.0, &t)?;
            let exact = (-2.0 * tp * tp).exp() / (4.0 * tp);
            c.at_most(format!("{name} at t = {tp}"), (r.integral + r.tail_bound - exact).abs(), 1e-6, None, None);
            c.truth(format!("{name} at t = {tp}: criterion"), r.satisfied, 0.0, None, None, format!("{r:?}"));
        }
        Ok(())
    });
    c.guard("quasinilpotence", 0.0, Some(ctx.seed), None, |c, name| {
        let w = make_weight(WeightSpec::Gaussian, 30.0, &t)?;
        let f = GridFunction::indicator(1.0, 2.0, 0.05, 30.0)?;
        let q = quasinilpotence_estimate(&f, &w, 12, &t)?;
        c.above(format!("{name}: root decreases from n = 2 to n = 8"), q[1].root - q[7].root, 0.0, None, None);
        let worst = q.iter().map(|s| s.root / s.bound_root).fold(0.0, f64::max);
        c.at_most(format!("{name}: below bound, indicator"), worst, 1.0 + 1e-9, None, None);
        let mut rng = rng_from_seed(derive_seed(ctx.seed, 0x514e));
        for k in 0..20 {
            let a = rng.random_range(0.5..1.5);
            let b = a + rng.random_range(0.2..0.9);
            let coeffs: Vec<f64> = (0..600).map(|_| rng.random_range(0.1..1.0)).collect();
            let f = GridFunction::from_fn(0.05, 30.0, |x| {
                if x >= a && x < b { real(coeffs[(x / 0.05).round() as usize]) } else { real(0.0) }
            })?;
            let q = quasinilpotence_estimate(&f, &w, 12, &t)?;
            let worst = q.iter().map(|s| s.root / s.bound_root).fold(0.0, f64::max);
            c.at_most(format!("{name}: below bound, random f {k}"), worst, 1.0 + 1e-9, None, None);
        }
        Ok(())
    });
    c.guard("bump approximate identity", 0.0, None, None, |c, name| {
        let w = make_weight(WeightSpec::Gaussian, 10.0, &t)?;
        let p = GridFunction::indicator(1.0, 2.0, 0.01, 4.0)?;
        let rows = bump_cai_check(&[0.4, 0.1, 0.05], &w, &[p], &t)?;
        let l1 = rows[1].l1_norm;
        c.truth(format!("{name}: mass of f_0.1"), l1 > 0.99 && l1 <= 1.0, 0.0, None, None, format!("{l1}"));
        c.above(format!("{name}: smaller bump acts closer to identity"), rows[0].probe_errors[0] - rows[2].probe_errors[0], 0.0, None, None);
        Ok(())
    });
    c.guard("principal ideal density", 1e-8, Some(ctx.seed), None, |c, name| {
        let w = make_weight(WeightSpec::Gaussian, 10.0, &t)?;
        let mut rng = rng_from_seed(derive_seed(ctx.seed, 0x5044));
        let (h, horizon) = (0.01, 2.0);
        for k in 0..20 {
            let a = rng.random_range(0..40usize);
            let width = rng.random_range(5..30usize);
            let tail: Vec<f64> = (0..width).map(|_| rng.random_range(0.0..1.0)).collect();
            let s: f64 = tail.iter().sum();
            let scale = rng.random_range(0.1..0.9) / s;
            let mut tf = GridFunction::zeros(h, horizon)?;
            tf.coeffs[a] = real(1.0);
            for (j, v) in tail.iter().enumerate() {
                tf.coeffs[a + 1 + j] = real(v * scale);
            }
            let g0 = (a as f64 + rng.random_range(5.0..40.0)) * h;
            let g1 = g0 + rng.random_range(0.2..0.6);
            let g = GridFunction::from_fn(h, horizon, |x| {
                real(if x > g0 && x < g1 { ((x - g0) * (g1 - x)).powi(2) * 1e3 } else { 0.0 })
            })?;
            let r = principal_density_check(&tf, &g, &w, &t)?;
            c.at_most(format!("{name}: instance {k}"), r.residual, 1e-8, None, None);
        }
        Ok(())
    });
}

fn suite_ocp(ctx: &SuiteContext, c: &mut Cases) {
    let t = ctx.tol;
    c.guard("transpose witness", 1e-9, None, None, |c, name| {
        let tr = MatrixMap::transpose(2)?;
        let t2 = amplify(&tr, 2)?;
        let mut x = ComplexMatrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                x += crate::matrix::kron(&unit(2, i, j), &unit(2, i, j));
            }
        }
        c.truth(format!("{name}: x in F"), in_f(&x, &t)?, t.exact_tol, None, Some(&x), "2p not in F");
        for cc in [1.0, 2.0, 5.0] {
            let v = cone_violation(&t2, cc, &x)?;
            c.at_most(format!("{name}: margin at C = {cc}"), (v - 1.0).abs(), 1e-9, None, Some(&x));
        }
        Ok(())
    });
    let budget = 10_000;
    for i in 0..ctx.trials {
        let seed = ctx.trial_seed(i);
        let mut rng = ctx.rng(i);
        let n = 1 + i % ctx.dim.min(4);
        let m = 1 + (i / 4) % ctx.dim.min(4);
        let r = rng.random_range(1..=3);
        let map = match MatrixMap::random_cp(&mut rng, n, m, r) {
            Ok(m) => m,
            Err(e) => {
                c.truth(format!("map {i}"), false, 0.0, Some(seed), None, e.to_string());
                continue;
            }
        };
        c.guard(format!("map {i}: Stinespring"), 1e-10, Some(seed), None, |c, name| {
            let s = stinespring(&map, &t)?;
            c.at_most(format!("{name} round trip"), s.reconstruction_residual, 1e-10, Some(seed), Some(&choi(&map)));
            let t1 = operator_norm(&map.apply(&identity(n))?)?;
            c.at_most(format!("{name} norm"), (s.norm_sq()? - t1).abs(), 1e-9, Some(seed), Some(&choi(&map)));
            Ok(())
        });
        let small = MatrixMap::random_cp(&mut rng, 2, 2, r).expect("valid shape");
        c.guard(format!("map {i}: no cone violation"), t.iter_tol, Some(seed), None, |c, name| {
            let cc = operator_norm(&small.apply(&identity(2))?)?;
            for k in 1..=3 {
                let s = ocp_falsify(&small, cc, k, budget / 3, seed, &t)?;
                c.truth(format!("{name} at k = {k}"), s.witness.is_none(), t.iter_tol, Some(seed), s.witness.as_ref(), s.message);
            }
            Ok(())
        });
    }
    let mut agree = 0;
    let total = 500;
    for i in 0..total {
        let seed = derive_seed(ctx.seed, 0xd15c + i as u64);
        let mut rng = rng_from_seed(seed);
        let n = 1 + i % ctx.dim.min(4);
        let x = match i % 4 {
            0 => random_hermitian(&mut rng, n, 0.0, 1.0),
            1 => random_hermitian(&mut rng, n, -0.5, 1.5),
            2 => {
                let r = rng.random_range(0.2..1.0);
                random_f_element(&mut rng, n, r)
            }
            _ => random_matrix(&mut rng, n) * real(0.5),
        };
        let herm = hermitian_part(&x);
        let direct = operator_norm(&(&x - x.adjoint())).unwrap_or(f64::INFINITY) <= t.exact_tol
            && lambda_min(&herm).unwrap_or(-1.0) >= -t.exact_tol
            && lambda_max(&herm).unwrap_or(2.0) <= 1.0 + t.exact_tol;
        match disk_test(&x, 360, &t) {
            Ok(v) if v == direct => agree += 1,
            Ok(v) => c.truth(format!("disk sample {i}"), false, t.exact_tol, Some(seed), Some(&x), format!("disk {v}, direct {direct}")),
            Err(e) => c.truth(format!("disk sample {i}"), false, t.exact_tol, Some(seed), Some(&x), e.to_string()),
        }
    }
    c.truth("disk test agreement", agree == total, 0.0, Some(ctx.seed), None, format!("{agree}/{total}"));
    c.truth("transpose is not CP", !is_cp(&MatrixMap::transpose(2).expect("valid"), &t).unwrap_or(true), 0.0, None, None, "transpose reported CP");
}

/// Random block algebra `B_1 ⊕ B_2` with `J = B_1 ⊕ 0`.
fn random_block_algebra(rng: &mut SuiteRng, max_block: usize, tol: &Tolerances) -> Result<(FDAlgebra, Subspace)> {
    let mut block = || -> Result<FDAlgebra> {
        let n = rng.random_range(1..=max_block);
        match rng.random_range(0..3) {
            0 => FDAlgebra::full(n, tol),
            1 => FDAlgebra::upper_triangular(n, tol),
            _ => FDAlgebra::scalars(n, tol),
        }
    };
    let b1 = block()?;
    let b2 = block()?;
    let a = FDAlgebra::direct_sum(&b1, &b2, tol)?;
    let pad = ComplexMatrix::zeros(b2.ambient_dim(), b2.ambient_dim());
    let gens: Vec<_> = b1.basis().iter().map(|b| crate::matrix::direct_sum(b, &pad)).collect();
    let j = Subspace::span_matrices(a.ambient_dim(), &gens, tol)?;
    Ok((a, j))
}

fn suite_quotient_cone(ctx: &SuiteContext, c: &mut Cases) {
    let t = ctx.tol;
    for i in 0..ctx.trials {
        let seed = ctx.trial_seed(i);
        let mut rng = ctx.rng(i);
        c.guard(format!("algebra {i}: both inclusions"), t.iter_tol, Some(seed), None, |c, name| {
            let (a, j) = random_block_algebra(&mut rng, ctx.dim.max(1), &t)?;
            let r = quotient_cone_check(&a, &j, 8, seed, &t)?;
            c.at_most(format!("{name}: forward"), r.worst_forward, 1.0 + t.iter_tol, Some(seed), None);
            c.at_most(format!("{name}: lift"), r.worst_lift_residual, t.iter_tol, Some(seed), None);
            c.truth(format!("{name}: certified"), r.inconclusive == 0, t.iter_tol, Some(seed), None, format!("{r:?}"));
            Ok(())
        });
    }
    let j = Subspace::span_matrices(2, &[unit(2, 0, 1)], &t).expect("span");
    for i in 0..10 {
        let seed = derive_seed(ctx.seed, 0x7132 + i);
        let mut rng = rng_from_seed(seed);
        let a = random_matrix(&mut rng, 2);
        let mut a = a;
        a[(1, 0)] = C64::default();
        c.guard(format!("upper triangular quotient {i}"), t.iter_tol, Some(seed), Some(&a), |c, name| {
            let q = quotient_norm(&a, &j, &t, DEFAULT_QUOTIENT_BUDGET)?;
            let exact = a[(0, 0)].norm().max(a[(1, 1)].norm());
            c.truth(format!("{name}: certified"), q.status == QuotientStatus::Certified, t.iter_tol, Some(seed), Some(&a), format!("{q:?}"));
            c.at_most(format!("{name}: gap"), q.upper - q.lower, t.iter_tol, Some(seed), Some(&a));
            let outside = (q.lower - exact).max(exact - q.upper).max(0.0);
            c.at_most(format!("{name}: contains max(|a11|, |a22|)"), outside, t.exact_tol, Some(seed), Some(&a));
            Ok(())
        });
    }
}
