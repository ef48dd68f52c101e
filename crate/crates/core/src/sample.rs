//! Seeded random generators for matrices, cone elements and states.
//!
//! Every randomized routine in the crate takes an explicit RNG or seed so
//! that runs are reproducible.

use nalgebra::linalg::QR;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matrix::{c64, direct_sum, identity, norm, real, ComplexMatrix, C64};

pub type SuiteRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SuiteRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Per-sample seed derived from a master seed (splitmix64 finalizer).
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index.wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn gaussian(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn complex_gaussian(rng: &mut impl Rng) -> C64 {
    c64(gaussian(rng), gaussian(rng)) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn random_matrix(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    random_rect(rng, n, n)
}

pub fn random_rect(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-distributed unitary (QR of a Gaussian matrix with phase correction).
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let g = random_matrix(rng, n);
    let qr = QR::new(g);
    let q = qr.q();
    let r = qr.r();
    let mut u = q;
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / real(d.norm()) } else { real(1.0) };
        for i in 0..n {
            u[(i, j)] *= phase;
        }
    }
    u
}

/// Random matrix rescaled to operator norm exactly `radius`.
pub fn random_contraction(rng: &mut impl Rng, n: usize, radius: f64) -> ComplexMatrix {
    let g = random_matrix(rng, n);
    let s = norm(&g);
    g * real(radius / s)
}

/// Element `1 - c` of the cone with `‖c‖ = radius ≤ 1`.
pub fn random_f_element(rng: &mut impl Rng, n: usize, radius: f64) -> ComplexMatrix {
    identity(n) - random_contraction(rng, n, radius)
}

/// Element `(1 - c)/2` of the half cone with `‖c‖ = radius ≤ 1`.
pub fn random_half_f_element(rng: &mut impl Rng, n: usize, radius: f64) -> ComplexMatrix {
    random_f_element(rng, n, radius) * real(0.5)
}

/// Rank-deficient cone element `U (0_k ⊕ y) U*` with `y = 1 - c`, `‖c‖ = radius`.
pub fn random_singular_f_element(rng: &mut impl Rng, n: usize, kernel_dim: usize, radius: f64) -> ComplexMatrix {
    assert!(kernel_dim <= n);
    let y = random_f_element(rng, n - kernel_dim, radius);
    let block = direct_sum(&ComplexMatrix::zeros(kernel_dim, kernel_dim), &y);
    let u = random_unitary(rng, n);
    &u * block * u.adjoint()
}

/// Mixture used by the cone suites: generic interior elements, boundary
/// elements with `‖1 - x‖ = 1`, and nonzero rank-deficient elements.
pub fn random_f_mixed(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let kinds = if n > 1 { 3 } else { 2 };
    match rng.random_range(0..kinds) {
        0 => {
            let radius = rng.random_range(0.2..0.98);
            random_f_element(rng, n, radius)
        }
        1 => random_f_element(rng, n, 1.0),
        _ => {
            let k = rng.random_range(1..n);
            let radius = rng.random_range(0.2..0.95);
            random_singular_f_element(rng, n, k, radius)
        }
    }
}

/// Random density matrix of the given rank (trace one).
pub fn random_density(rng: &mut impl Rng, n: usize, rank: usize) -> ComplexMatrix {
    let g = crate::sample::random_rect(rng, n, rank.max(1));
    let rho = &g * g.adjoint();
    let t = rho.trace().re;
    rho / real(t)
}

/// Orthogonal projection onto a random subspace of dimension `k`.
pub fn random_projection(rng: &mut impl Rng, n: usize, k: usize) -> ComplexMatrix {
    let u = random_unitary(rng, n);
    let v = u.columns(0, k).into_owned();
    &v * v.adjoint()
}

/// Random Hermitian matrix with eigenvalues drawn from `lo..hi`.
pub fn random_hermitian(rng: &mut impl Rng, n: usize, lo: f64, hi: f64) -> ComplexMatrix {
    let u = random_unitary(rng, n);
    let d = ComplexMatrix::from_fn(n, n, |i, j| if i == j { real(lo + (hi - lo) * rng.random::<f64>()) } else { C64::default() });
    &u * d * u.adjoint()
}
