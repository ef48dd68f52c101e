//! Grid discretization of the radical convolution algebra `L¹(ℝ⁺, ω)` acting
//! on `L²(ℝ⁺, ω)`.
//!
//! A grid function stores samples `f(kh)` for `k < N`; the horizon is `Nh`.
//! Convolution is `(f*g)[m] = h Σ_{j≤m} f[j] g[m-j]`, so the discrete delta
//! `1/h` at index 0 is an exact identity. Every public convolution refuses
//! results whose support would run past the horizon.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{precondition, Error, Result};
use crate::matrix::{real, ComplexMatrix, C64};
use crate::sample::{complex_gaussian, derive_seed, rng_from_seed};
use crate::tol::Tolerances;

/// Points used to verify weight invariants.
pub const WEIGHT_CHECK_POINTS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightSpec {
    /// `ω(t) = exp(-t²)`.
    Gaussian,
    /// Samples `[t, ω(t)]` starting at `[0, 1]`, interpolated linearly in
    /// `log ω` and extrapolated from the last segment.
    Custom {
        samples: Vec<[f64; 2]>,
        #[serde(default = "default_epsilon")]
        epsilon: f64,
    },
}

fn default_epsilon() -> f64 {
    0.5
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadicalWeight {
    pub spec: WeightSpec,
    pub epsilon: f64,
    pub description: String,
}

impl RadicalWeight {
    pub fn eta(&self, t: f64) -> f64 {
        match &self.spec {
            WeightSpec::Gaussian => t * t,
            WeightSpec::Custom { samples, .. } => {
                let k = samples.partition_point(|s| s[0] <= t).clamp(1, samples.len() - 1);
                let ([t0, w0], [t1, w1]) = (samples[k - 1], samples[k]);
                let (e0, e1) = (-w0.ln(), -w1.ln());
                e0 + (e1 - e0) * (t - t0) / (t1 - t0)
            }
        }
    }

    pub fn omega(&self, t: f64) -> f64 {
        (-self.eta(t)).exp()
    }
}

/// Builds a weight and verifies `ω(0) = 1`, sampled submultiplicativity and
/// that `ω(t)^{1/t}` does not increase on `[0, horizon]`.
pub fn make_weight(spec: WeightSpec, horizon: f64, tol: &Tolerances) -> Result<RadicalWeight> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidInput("horizon must be positive".into()));
    }
    let (epsilon, description) = match &spec {
        WeightSpec::Gaussian => (0.5, "exp(-t^2)".to_string()),
        WeightSpec::Custom { samples, epsilon } => {
            if samples.len() < 2 {
                return Err(Error::InvalidInput("custom weight needs at least two samples".into()));
            }
            if samples[0] != [0.0, 1.0] {
                return Err(Error::InvalidInput("custom weight must start at [0, 1]".into()));
            }
            if samples.windows(2).any(|w| !(w[1][0] > w[0][0])) || samples.iter().any(|s| !(s[1] > 0.0 && s[1].is_finite())) {
                return Err(Error::InvalidInput("custom samples need increasing t and positive finite ω".into()));
            }
            if !(*epsilon > 0.0) {
                return Err(Error::InvalidInput("epsilon must be positive".into()));
            }
            (*epsilon, format!("custom ({} samples)", samples.len()))
        }
    };
    let w = RadicalWeight { spec, epsilon, description };
    let step = horizon / WEIGHT_CHECK_POINTS as f64;
    let eta: Vec<f64> = (0..=WEIGHT_CHECK_POINTS).map(|k| w.eta(k as f64 * step)).collect();
    if eta[0].abs() > tol.exact_tol {
        return Err(Error::InvalidInput("ω(0) must be 1".into()));
    }
    // ω(s+t) ≤ ω(s)ω(t) ⇔ η(s+t) ≥ η(s) + η(t)
    for i in 1..=WEIGHT_CHECK_POINTS / 2 {
        for j in i..=WEIGHT_CHECK_POINTS - i {
            let gap = eta[i + j] - eta[i] - eta[j];
            if gap < -tol.exact_tol * (1.0 + eta[i + j].abs()) {
                return Err(Error::InvalidInput(format!(
                    "weight is not submultiplicative at s = {}, t = {}",
                    i as f64 * step,
                    j as f64 * step
                )));
            }
        }
    }
    if !(eta[WEIGHT_CHECK_POINTS] > 0.0) {
        return Err(Error::InvalidInput("ω(t)^(1/t) does not fall below 1 on the horizon".into()));
    }
    for k in 1..WEIGHT_CHECK_POINTS {
        let (a, b) = (eta[k] / (k as f64 * step), eta[k + 1] / ((k + 1) as f64 * step));
        if b < a - tol.exact_tol * (1.0 + a.abs()) {
            return Err(Error::InvalidInput(format!("ω(t)^(1/t) increases near t = {}", k as f64 * step)));
        }
    }
    Ok(w)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DomarReport {
    pub eta_convex: bool,
    pub min_second_difference: f64,
    pub growth_increasing: bool,
    /// `∫_0^∞ (ω(x+t)/ω(x))² dx`: quadrature on `[0, horizon]` plus tail bound.
    pub integral: f64,
    pub tail_bound: f64,
    pub integral_finite: bool,
    pub satisfied: bool,
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let m = intervals + intervals % 2;
    let h = (b - a) / m as f64;
    let mut s = f(a) + f(b);
    for k in 1..m {
        s += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// Sampled checks of convexity of `η`, growth of `η(t)/t^{1+ε}`, and
/// finiteness of the translation integral.
pub fn domar_criterion_check(w: &RadicalWeight, t_probe: f64, horizon: f64, tol: &Tolerances) -> Result<DomarReport> {
    if !(t_probe > 0.0 && horizon > t_probe) {
        return Err(Error::InvalidInput("need 0 < t_probe < horizon".into()));
    }
    let points = WEIGHT_CHECK_POINTS;
    let step = horizon / points as f64;
    let eta: Vec<f64> = (0..=points).map(|k| w.eta(k as f64 * step)).collect();
    let min_second_difference = eta.windows(3).map(|e| e[0] - 2.0 * e[1] + e[2]).fold(f64::INFINITY, f64::min);
    let eta_convex = min_second_difference >= -tol.exact_tol;

    let growth: Vec<f64> =
        (points / 2..=points).map(|k| eta[k] / (k as f64 * step).powf(1.0 + w.epsilon)).collect();
    let growth_increasing = growth.windows(2).all(|g| g[1] > g[0]);

    let ratio2 = |x: f64| (-2.0 * (w.eta(x + t_probe) - w.eta(x))).exp();
    let integral_body = simpson(ratio2, 0.0, horizon, 200_000);
    // With η convex the increments δ_k = η(X+(k+1)t) - η(X+kt) grow by at
    // least c per step, so the tail is at most t e^{-2δ_0} / (1 - e^{-2c}).
    let d0 = w.eta(horizon + t_probe) - w.eta(horizon);
    let c = d0 - (w.eta(horizon) - w.eta(horizon - t_probe));
    let tail_bound = if eta_convex && c > 0.0 {
        t_probe * (-2.0 * d0).exp() / (1.0 - (-2.0 * c).exp())
    } else {
        f64::INFINITY
    };
    let integral_finite = tail_bound.is_finite();
    Ok(DomarReport {
        eta_convex,
        min_second_difference,
        growth_increasing,
        integral: integral_body,
        tail_bound,
        integral_finite,
        satisfied: eta_convex && growth_increasing && integral_finite,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub h: f64,
    #[serde(with = "coeff_pairs")]
    pub coeffs: Vec<C64>,
}

mod coeff_pairs {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(c: &[C64], s: S) -> std::result::Result<S::Ok, S::Error> {
        c.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<C64>, D::Error> {
        Ok(Vec::<[f64; 2]>::deserialize(d)?.into_iter().map(|[re, im]| C64::new(re, im)).collect())
    }
}

fn grid_len(h: f64, horizon: f64) -> Result<usize> {
    if !(h > 0.0 && horizon >= h && h.is_finite() && horizon.is_finite()) {
        return Err(Error::InvalidInput(format!("bad grid: h = {h}, horizon = {horizon}")));
    }
    Ok((horizon / h).round() as usize)
}

impl GridFunction {
    pub fn new(h: f64, coeffs: Vec<C64>) -> Result<Self> {
        grid_len(h, h * coeffs.len().max(1) as f64)?;
        if coeffs.is_empty() || coeffs.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("grid function needs finite coefficients".into()));
        }
        Ok(Self { h, coeffs })
    }

    pub fn zeros(h: f64, horizon: f64) -> Result<Self> {
        Ok(Self { h, coeffs: vec![C64::default(); grid_len(h, horizon)?] })
    }

    pub fn from_fn(h: f64, horizon: f64, f: impl Fn(f64) -> C64) -> Result<Self> {
        let n = grid_len(h, horizon)?;
        Self::new(h, (0..n).map(|k| f(k as f64 * h)).collect())
    }

    /// Samples of the indicator of `[a, b)`.
    pub fn indicator(a: f64, b: f64, h: f64, horizon: f64) -> Result<Self> {
        let (ia, ib) = ((a / h).round() as usize, (b / h).round() as usize);
        let mut g = Self::zeros(h, horizon)?;
        for k in ia..ib.min(g.len()) {
            g.coeffs[k] = real(1.0);
        }
        Ok(g)
    }

    /// `1/h` at the grid point nearest `t`.
    pub fn delta(t: f64, h: f64, horizon: f64) -> Result<Self> {
        let mut g = Self::zeros(h, horizon)?;
        let k = (t / h).round() as usize;
        if k >= g.len() {
            return Err(Error::InvalidInput("delta beyond horizon".into()));
        }
        g.coeffs[k] = real(1.0 / h);
        Ok(g)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let g: Self = serde_json::from_str(s)?;
        Self::new(g.h, g.coeffs)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        self.h * self.len() as f64
    }

    fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// First and last indices above `rank_tol · max|f|`.
    pub fn support_indices(&self, tol: &Tolerances) -> Option<(usize, usize)> {
        let thr = tol.rank_tol * self.max_abs();
        let m = self.max_abs();
        if m == 0.0 {
            return None;
        }
        let first = self.coeffs.iter().position(|z| z.norm() > thr)?;
        let last = self.coeffs.iter().rposition(|z| z.norm() > thr)?;
        Some((first, last))
    }

    /// `h Σ |f_k| ω(kh)`.
    pub fn l1_norm(&self, w: &RadicalWeight) -> f64 {
        self.h * self.coeffs.iter().enumerate().map(|(k, z)| z.norm() * w.omega(k as f64 * self.h)).sum::<f64>()
    }

    /// `(h Σ |g_k|² ω(kh)²)^{1/2}`.
    pub fn l2_norm(&self, w: &RadicalWeight) -> f64 {
        (self.h
            * self
                .coeffs
                .iter()
                .enumerate()
                .map(|(k, z)| (z.norm() * w.omega(k as f64 * self.h)).powi(2))
                .sum::<f64>())
        .sqrt()
    }

    pub fn unweighted_l1(&self) -> f64 {
        self.h * self.coeffs.iter().map(|z| z.norm()).sum::<f64>()
    }

    fn sub(&self, other: &GridFunction) -> GridFunction {
        let n = self.len().max(other.len());
        let at = |g: &GridFunction, k: usize| g.coeffs.get(k).copied().unwrap_or_default();
        GridFunction { h: self.h, coeffs: (0..n).map(|k| at(self, k) - at(other, k)).collect() }
    }
}

/// `α(f)`: start of the numerical support, `+∞` for the zero function.
pub fn alpha(f: &GridFunction, tol: &Tolerances) -> f64 {
    f.support_indices(tol).map_or(f64::INFINITY, |(i, _)| i as f64 * f.h)
}

fn check_grids(f: &GridFunction, g: &GridFunction) -> Result<()> {
    if (f.h - g.h).abs() > 1e-12 * f.h.max(g.h) {
        return Err(Error::InvalidInput(format!("grid steps differ: {} vs {}", f.h, g.h)));
    }
    Ok(())
}

/// Truncated product on a grid of `len` points, no support guard.
fn convolve_raw(f: &GridFunction, g: &GridFunction, len: usize) -> GridFunction {
    let mut out = vec![C64::default(); len];
    for (i, fi) in f.coeffs.iter().enumerate().filter(|(_, z)| z.norm() != 0.0) {
        for (j, gj) in g.coeffs.iter().enumerate().take(len.saturating_sub(i)) {
            out[i + j] += fi * gj;
        }
    }
    for z in &mut out {
        *z *= f.h;
    }
    GridFunction { h: f.h, coeffs: out }
}

/// `f * g` on the longer of the two grids, refusing results that would be
/// truncated by the horizon.
pub fn convolve_exact(f: &GridFunction, g: &GridFunction, tol: &Tolerances) -> Result<GridFunction> {
    check_grids(f, g)?;
    let len = f.len().max(g.len());
    if let (Some((_, lf)), Some((_, lg))) = (f.support_indices(tol), g.support_indices(tol)) {
        if lf + lg >= len {
            return Err(Error::InvalidInput(format!(
                "support of the product reaches past the horizon {}",
                len as f64 * f.h
            )));
        }
    }
    Ok(convolve_raw(f, g, len))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvolutionReport {
    pub fg: GridFunction,
    pub l1_f: f64,
    pub l1_g: f64,
    pub l1_fg: f64,
    pub l2_g: f64,
    pub l2_fg: f64,
    /// `‖f‖₁ ‖g‖₂`.
    pub operator_bound: f64,
    pub bound_holds: bool,
}

pub fn convolve(f: &GridFunction, g: &GridFunction, w: &RadicalWeight, tol: &Tolerances) -> Result<ConvolutionReport> {
    let fg = convolve_exact(f, g, tol)?;
    let (l1_f, l1_g, l1_fg) = (f.l1_norm(w), g.l1_norm(w), fg.l1_norm(w));
    let (l2_g, l2_fg) = (g.l2_norm(w), fg.l2_norm(w));
    let operator_bound = l1_f * l2_g;
    let bound_holds = l2_fg <= operator_bound * (1.0 + tol.exact_tol) + f64::MIN_POSITIVE;
    Ok(ConvolutionReport { fg, l1_f, l1_g, l1_fg, l2_g, l2_fg, operator_bound, bound_holds })
}

/// `M_f` on the weighted grid space, conjugated to the standard inner
/// product: entries `h f[i-j] ω(ih)/ω(jh)` for `j ≤ i`.
pub fn conv_operator(f: &GridFunction, w: &RadicalWeight) -> ComplexMatrix {
    let n = f.len();
    let h = f.h;
    ComplexMatrix::from_fn(n, n, |i, j| {
        if j > i {
            C64::default()
        } else {
            f.coeffs[i - j] * (h * (w.eta(j as f64 * h) - w.eta(i as f64 * h)).exp())
        }
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TitchmarshReport {
    pub trials: usize,
    pub tested: usize,
    pub rejected: usize,
    pub equalities: usize,
    pub violations: usize,
    /// Products of nonzero functions that came out zero.
    pub zero_divisors: usize,
}

/// Random pairs with random support offsets: `α(f*g) = α(f) + α(g)` at the
/// index level.
pub fn titchmarsh_check(trials: usize, seed: u64, tol: &Tolerances) -> Result<TitchmarshReport> {
    let (h, n) = (0.01, 400usize);
    let mut rep = TitchmarshReport { trials, tested: 0, rejected: 0, equalities: 0, violations: 0, zero_divisors: 0 };
    for t in 0..trials {
        let mut rng = rng_from_seed(derive_seed(seed, t as u64));
        let f = random_grid_function(&mut rng, h, n);
        let g = random_grid_function(&mut rng, h, n);
        let fg = match convolve_exact(&f, &g, tol) {
            Ok(fg) => fg,
            Err(_) => {
                rep.rejected += 1;
                continue;
            }
        };
        rep.tested += 1;
        let lhs = fg.support_indices(tol).map(|(i, _)| i);
        let rhs = match (f.support_indices(tol), g.support_indices(tol)) {
            (Some((i, _)), Some((j, _))) => Some(i + j),
            _ => None,
        };
        if lhs == rhs {
            rep.equalities += 1;
        } else {
            rep.violations += 1;
        }
        if lhs.is_none() && rhs.is_some() {
            rep.zero_divisors += 1;
        }
    }
    Ok(rep)
}

/// Random grid function on `n` points: zero with probability 1/20, otherwise
/// Gaussian coefficients on a random window whose endpoints have modulus in
/// `[0.5, 1.5]`.
pub fn random_grid_function(rng: &mut impl Rng, h: f64, n: usize) -> GridFunction {
    let mut c = vec![C64::default(); n];
    if !rng.random_bool(0.05) {
        let start = rng.random_range(0..n * 3 / 4);
        let len = rng.random_range(1..=n / 2);
        let end = (start + len).min(n);
        for z in &mut c[start..end] {
            *z = complex_gaussian(rng);
        }
        for k in [start, end - 1] {
            let phase = rng.random_range(0.0..std::f64::consts::TAU);
            c[k] = C64::from_polar(rng.random_range(0.5..1.5), phase);
        }
    }
    GridFunction { h, coeffs: c }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuasiStep {
    pub n: usize,
    /// `‖*ⁿf‖₁^{1/n}`.
    pub root: f64,
    /// n-th root of `‖f‖₁ⁿ · max_{[na,nb]} ω / (min_{[a,b]} ω)ⁿ`.
    pub bound_root: f64,
}

/// Weighted norms of the convolution powers of `f`, with the bound obtained
/// from comparing weighted and unweighted norms on the supports.
pub fn quasinilpotence_estimate(
    f: &GridFunction,
    w: &RadicalWeight,
    n_max: usize,
    tol: &Tolerances,
) -> Result<Vec<QuasiStep>> {
    let (ia, ib) = f.support_indices(tol).ok_or_else(|| precondition("f must be nonzero"))?;
    if ia == 0 {
        return Err(precondition("quasinilpotence estimate needs α(f) > 0"));
    }
    if n_max == 0 {
        return Err(Error::InvalidInput("n_max must be positive".into()));
    }
    if n_max * ib >= f.len() {
        return Err(Error::InvalidInput(format!(
            "horizon {} too short for {} convolution powers",
            f.horizon(),
            n_max
        )));
    }
    let h = f.h;
    let l1 = f.l1_norm(w);
    // logs throughout, since ω(nb) underflows quickly
    let min_eta_ab = (ia..=ib).map(|k| w.eta(k as f64 * h)).fold(f64::NEG_INFINITY, f64::max);
    let mut p = f.clone();
    let mut out = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        if n > 1 {
            p = convolve_exact(&p, f, tol)?;
        }
        let nf = n as f64;
        let min_eta_n = (n * ia..=n * ib).map(|k| w.eta(k as f64 * h)).fold(f64::INFINITY, f64::min);
        let log_bound = nf * l1.ln() - min_eta_n + nf * min_eta_ab;
        out.push(QuasiStep { n, root: p.l1_norm(w).powf(1.0 / nf), bound_root: (log_bound / nf).exp() });
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityResult {
    pub u: GridFunction,
    /// `‖T_f * u - g‖₁ / ‖g‖₁`, weighted.
    pub residual: f64,
    /// `‖u‖₂ / ‖g‖₂` times the leading-coefficient scale.
    pub condition_estimate: f64,
}

/// Largest growth of the solution tolerated before reporting breakdown.
pub const DENSITY_CONDITION_LIMIT: f64 = 1e12;

/// Solves `T_f * u = g` on the grid by forward substitution on the
/// lower-triangular Toeplitz system. Requires `α(g) > α(T_f)`.
pub fn principal_density_check(
    t_f: &GridFunction,
    g: &GridFunction,
    w: &RadicalWeight,
    tol: &Tolerances,
) -> Result<DensityResult> {
    check_grids(t_f, g)?;
    let (i0, _) = t_f.support_indices(tol).ok_or_else(|| precondition("T_f must be nonzero"))?;
    let ig = g.support_indices(tol).map_or(usize::MAX, |(i, _)| i);
    if ig == usize::MAX {
        return Err(precondition("g must be nonzero"));
    }
    if ig <= i0 {
        return Err(precondition(format!(
            "need α(g) > α(T_f), got α(g) = {} and α(T_f) = {}",
            ig as f64 * g.h,
            i0 as f64 * t_f.h
        )));
    }
    let n = t_f.len().max(g.len());
    let h = t_f.h;
    let tf = |k: usize| t_f.coeffs.get(k).copied().unwrap_or_default();
    let lead = tf(i0) * h;
    let mut u = vec![C64::default(); n];
    for k in 0..n - i0 {
        let m = k + i0;
        let mut acc = g.coeffs.get(m).copied().unwrap_or_default();
        for j in (i0 + 1)..=m {
            acc -= tf(j) * h * u[m - j];
        }
        u[k] = acc / lead;
    }
    let u = GridFunction { h, coeffs: u };
    let gn = g.l2_norm(w);
    let condition_estimate = u.l2_norm(w) / gn * lead.norm() / h;
    if !condition_estimate.is_finite() || condition_estimate > DENSITY_CONDITION_LIMIT {
        return Err(Error::Breakdown(format!("triangular solve is ill-conditioned (estimate {condition_estimate:e})")));
    }
    let r = convolve_raw(t_f, &u, n).sub(g);
    let residual = r.l1_norm(w) / g.l1_norm(w);
    Ok(DensityResult { u, residual, condition_estimate })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BumpRow {
    pub eps: f64,
    /// Grid points in the bump; 1 means the resolution floor is reached.
    pub points: usize,
    pub l1_norm: f64,
    /// `‖f_ε * p - p‖₂` per probe.
    pub probe_errors: Vec<f64>,
    pub at_resolution_floor: bool,
}

/// Normalized bumps `f_ε` (integral one on `[0, ε)`) as an approximate
/// identity: weighted mass and action on probes.
pub fn bump_cai_check(
    eps_list: &[f64],
    w: &RadicalWeight,
    probes: &[GridFunction],
    tol: &Tolerances,
) -> Result<Vec<BumpRow>> {
    let first = probes.first().ok_or_else(|| Error::InvalidInput("need at least one probe".into()))?;
    let (h, horizon) = (first.h, first.horizon());
    let mut rows = Vec::new();
    for &eps in eps_list {
        if !(eps > 0.0) {
            return Err(Error::InvalidInput(format!("eps must be positive, got {eps}")));
        }
        let m = ((eps / h).round() as usize).max(1);
        let mut f = GridFunction::zeros(h, horizon)?;
        for k in 0..m.min(f.len()) {
            f.coeffs[k] = real(1.0 / (m as f64 * h));
        }
        let probe_errors = probes
            .iter()
            .map(|p| Ok(convolve_exact(&f, p, tol)?.sub(p).l2_norm(w)))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(BumpRow { eps, points: m, l1_norm: f.l1_norm(w), probe_errors, at_resolution_floor: m == 1 });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::operator_norm;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn gaussian() -> RadicalWeight {
        make_weight(WeightSpec::Gaussian, 10.0, &tol()).unwrap()
    }

    fn exponential(horizon: f64) -> RadicalWeight {
        let samples = (0..=100).map(|k| {
            let t = k as f64 * horizon / 100.0;
            [t, (-t).exp()]
        });
        make_weight(WeightSpec::Custom { samples: samples.collect(), epsilon: 0.5 }, horizon, &tol()).unwrap()
    }

    #[test]
    fn weight_examples() {
        let w = gaussian();
        assert!((w.omega(1.0) - (-1.0f64).exp()).abs() < 1e-15);
        assert!((w.omega(0.0) - 1.0).abs() < 1e-15);
        let e = exponential(10.0);
        assert!((e.omega(2.5) - (-2.5f64).exp()).abs() < 1e-12);
        let bad = WeightSpec::Custom { samples: vec![[0.0, 1.0], [1.0, 2.0]], epsilon: 0.5 };
        assert!(make_weight(bad, 5.0, &tol()).is_err());
        let bad = WeightSpec::Custom { samples: vec![[0.0, 0.5], [1.0, 0.1]], epsilon: 0.5 };
        assert!(make_weight(bad, 5.0, &tol()).is_err());
        let s = serde_json::to_string(&WeightSpec::Gaussian).unwrap();
        assert_eq!(s, r#"{"kind":"gaussian"}"#);
    }

    #[test]
    fn domar_examples() {
        let t = tol();
        let w = gaussian();
        for tp in [0.5, 1.0, 2.0] {
            let r = domar_criterion_check(&w, tp, 10.0, &t).unwrap();
            let exact = (-2.0 * tp * tp).exp() / (4.0 * tp);
            assert!((r.integral + r.tail_bound - exact).abs() < 1e-6, "{tp}: {r:?}");
            assert!(r.satisfied);
        }
        let r = domar_criterion_check(&exponential(10.0), 1.0, 10.0, &t).unwrap();
        assert!(r.eta_convex && !r.growth_increasing && !r.satisfied);
    }

    #[test]
    fn convolution_examples() {
        let t = tol();
        let w = gaussian();
        let h = 0.01;
        let d = GridFunction::delta(0.0, h, 4.0).unwrap();
        let g = GridFunction::from_fn(h, 4.0, |x| real((-x).exp() * (x < 2.0) as u8 as f64)).unwrap();
        let r = convolve(&d, &g, &w, &t).unwrap();
        assert!(r.fg.coeffs.iter().zip(&g.coeffs).all(|(a, b)| (a - b).norm() < 1e-14));
        let ind = GridFunction::indicator(0.0, 1.0, h, 4.0).unwrap();
        let tri = convolve_exact(&ind, &ind, &t).unwrap();
        // left-endpoint quadrature of the triangle function: off by one cell
        assert!((tri.coeffs[100].re - 1.0).abs() <= 1.5 * h);
        let mut rng = rng_from_seed(3);
        for _ in 0..100 {
            let f = random_grid_function(&mut rng, 0.05, 80);
            let g = random_grid_function(&mut rng, 0.05, 80);
            if let Ok(r) = convolve(&f, &g, &w, &t) {
                assert!(r.bound_holds);
            }
        }
        let other = GridFunction::zeros(0.02, 4.0).unwrap();
        assert!(convolve_exact(&d, &other, &t).is_err());
        let late = GridFunction::indicator(3.0, 3.5, h, 4.0).unwrap();
        assert!(convolve_exact(&late, &late, &t).is_err());
    }

    #[test]
    fn conv_operator_norm_below_l1() {
        let w = gaussian();
        let f = GridFunction::indicator(0.2, 0.9, 0.05, 3.0).unwrap();
        let m = conv_operator(&f, &w);
        assert!(operator_norm(&m).unwrap() <= f.l1_norm(&w) * (1.0 + 1e-12));
    }

    #[test]
    fn alpha_examples() {
        let t = tol();
        let h = 0.1;
        let mut f = GridFunction::zeros(h, 5.0).unwrap();
        f.coeffs[3] = real(1.0);
        assert!((alpha(&f, &t) - 0.3).abs() < 1e-15);
        assert!(alpha(&GridFunction::zeros(h, 5.0).unwrap(), &t).is_infinite());
        let f = GridFunction::indicator(0.2, 0.6, h, 5.0).unwrap();
        let g = GridFunction::indicator(0.5, 1.0, h, 5.0).unwrap();
        let fg = convolve_exact(&f, &g, &t).unwrap();
        assert_eq!(fg.support_indices(&t).unwrap().0, 7);
    }

    #[test]
    fn titchmarsh_examples() {
        let r = titchmarsh_check(500, 9, &tol()).unwrap();
        assert_eq!(r.violations, 0);
        assert_eq!(r.equalities, r.tested);
        assert_eq!(r.tested + r.rejected, 500);
        assert!(r.tested > 100);
    }

    #[test]
    fn quasinilpotence_examples() {
        let t = tol();
        let w = make_weight(WeightSpec::Gaussian, 30.0, &t).unwrap();
        let f = GridFunction::indicator(1.0, 2.0, 0.05, 30.0).unwrap();
        let q = quasinilpotence_estimate(&f, &w, 12, &t).unwrap();
        assert!(q[7].root < q[1].root);
        assert!(q.iter().all(|s| s.root <= s.bound_root * (1.0 + 1e-9)));
        let g = GridFunction::indicator(0.0, 1.0, 0.05, 30.0).unwrap();
        assert!(quasinilpotence_estimate(&g, &w, 4, &t).is_err());
        assert!(quasinilpotence_estimate(&f, &w, 20, &t).is_err());
    }

    #[test]
    fn density_examples() {
        let t = tol();
        let w = gaussian();
        let h = 0.01;
        let tf = GridFunction::delta(0.2, h, 2.0).unwrap();
        let g = GridFunction::delta(0.5, h, 2.0).unwrap();
        let r = principal_density_check(&tf, &g, &w, &t).unwrap();
        assert!(r.residual < 1e-14);
        assert_eq!(r.u.support_indices(&t).unwrap().0, 30);
        let tf = GridFunction::indicator(0.2, 0.4, h, 2.0).unwrap();
        let bump = GridFunction::from_fn(h, 2.0, |x| {
            real(if x > 0.6 && x < 0.9 { ((x - 0.6) * (0.9 - x)).powi(2) * 1e4 } else { 0.0 })
        })
        .unwrap();
        let r = principal_density_check(&tf, &bump, &w, &t).unwrap();
        assert!(r.residual < 1e-8, "{}", r.residual);
        assert!(principal_density_check(&bump, &tf, &w, &t).is_err());
    }

    #[test]
    fn bump_examples() {
        let t = tol();
        let w = gaussian();
        let p = GridFunction::indicator(1.0, 2.0, 0.01, 4.0).unwrap();
        let rows = bump_cai_check(&[0.4, 0.1, 0.05, 0.001], &w, &[p], &t).unwrap();
        assert!(rows[1].l1_norm > 0.99 && rows[1].l1_norm <= 1.0);
        assert!(rows[2].probe_errors[0] < rows[0].probe_errors[0]);
        assert!(rows[3].at_resolution_floor && !rows[2].at_resolution_floor);
    }

    #[test]
    fn grid_json_round_trip() {
        let f = GridFunction::indicator(0.1, 0.3, 0.1, 0.5).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert!(s.starts_with(r#"{"h":0.1,"coeffs":[[0.0,0.0],[1.0,0.0]"#));
        assert_eq!(GridFunction::from_json(&s).unwrap(), f);
        assert!(GridFunction::from_json(r#"{"h":0.1,"coeffs":[]}"#).is_err());
    }
}
