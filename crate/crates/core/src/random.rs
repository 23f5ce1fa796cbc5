//! Seeded generators of valid inputs.
//!
//! Triples are built as `A = (κΠ₀jΠ₀*/2 + K) S₀⁻¹` with `K` Hermitian, which
//! satisfies `AS₀ - S₀A* = κΠ₀jΠ₀*` for `κ = 1` (continuous) and `κ = i`
//! (discrete) by construction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::discrete::JacobiData;
use crate::error::Result;
use crate::linalg::{c, identity, inv_hpd, set_block, zeros, CMatrix, Hermitian};
use crate::triple::{ParameterTriple, SignatureJ, Variant};

/// Frobenius norm of the random `Π₀`.
pub const PI_SIZE: f64 = 0.5;
/// Frobenius norm of the Hermitian part `K`.
pub const KERNEL_SIZE: f64 = 1.0;
/// Frobenius norm of `C(k) - I` and of `B(k) = Q(k)C(k)`.
pub const JACOBI_SPREAD: f64 = 0.3;

/// The generator behind every seeded input; fixed so that runs are reproducible
/// across platforms.
pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    SeededRng::seed_from_u64(seed)
}

/// Entries with real and imaginary parts uniform in `[-1, 1]`.
pub fn complex_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        c(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0))
    })
}

pub fn hermitian<R: Rng>(rng: &mut R, n: usize) -> Hermitian {
    let m = complex_matrix(rng, n, n);
    Hermitian::symmetrize(&m + m.adjoint())
}

/// `M` rescaled to Frobenius norm `size`.
fn normalized(m: CMatrix, size: f64) -> CMatrix {
    let norm = m.norm();
    if norm == 0.0 {
        return m;
    }
    m * c(size / norm, 0.0)
}

/// `BB*/n + floor·I`, so the smallest eigenvalue is at least `floor`.
pub fn positive_definite<R: Rng>(rng: &mut R, n: usize, floor: f64) -> Hermitian {
    let b = complex_matrix(rng, n, n);
    Hermitian::symmetrize(&b * b.adjoint() / c(n as f64, 0.0) + identity(n) * c(floor, 0.0))
}

fn triple_from<R: Rng>(rng: &mut R, variant: Variant, pi0: CMatrix) -> Result<ParameterTriple> {
    let n = pi0.nrows();
    let j = SignatureJ::new(variant, pi0.ncols() / 2);
    let s0 = positive_definite(rng, n, 0.5);
    let k = normalized(hermitian(rng, n).into_inner(), KERNEL_SIZE);
    let lift = &pi0 * j.matrix() * pi0.adjoint() * (j.coupling() * 0.5);
    let a = (lift + k) * inv_hpd(&s0)?.as_matrix();
    ParameterTriple::new(a, s0.into_inner(), pi0, variant)
}

/// A random valid triple of the given variant with `A` of size `n × n` and
/// `Π₀` of size `n × 2h`.
pub fn triple<R: Rng>(rng: &mut R, variant: Variant, n: usize, h: usize) -> Result<ParameterTriple> {
    let pi0 = normalized(complex_matrix(rng, n, 2 * h), PI_SIZE);
    triple_from(rng, variant, pi0)
}

/// A random discrete triple whose `Π₀` has vanishing first `h` columns.
pub fn boundary_triple<R: Rng>(rng: &mut R, n: usize, h: usize) -> Result<ParameterTriple> {
    let mut pi0 = zeros(n, 2 * h);
    set_block(&mut pi0, 0, h, &normalized(complex_matrix(rng, n, h), PI_SIZE));
    triple_from(rng, Variant::Discrete, pi0)
}

/// Random commuting data `C(k) = I + E(k) ≻ 0`, `Q(k) = B(k)C(k)⁻¹` with
/// `E(k)`, `B(k)` Hermitian, for `k = 1..=N+1`.
pub fn jacobi_data<R: Rng>(rng: &mut R, h: usize, truncation: usize) -> Result<JacobiData> {
    let mut cs = Vec::with_capacity(truncation + 1);
    let mut qs = Vec::with_capacity(truncation + 1);
    for _ in 0..=truncation {
        let ck = Hermitian::symmetrize(
            identity(h) + normalized(hermitian(rng, h).into_inner(), JACOBI_SPREAD),
        );
        let bk = normalized(hermitian(rng, h).into_inner(), JACOBI_SPREAD);
        qs.push(bk * inv_hpd(&ck)?.as_matrix());
        cs.push(ck);
    }
    JacobiData::new(cs, qs, 1e-9)
}

/// A random triple with `Π₀ = 0`; then `A = K S₀⁻¹` with `K` Hermitian.
pub fn degenerate_triple<R: Rng>(
    rng: &mut R,
    variant: Variant,
    n: usize,
    h: usize,
) -> Result<ParameterTriple> {
    triple_from(rng, variant, zeros(n, 2 * h))
}
