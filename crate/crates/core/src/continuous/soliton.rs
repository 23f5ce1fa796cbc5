use crate::error::{Error, Result};
use crate::linalg::{c, max_nan, CMatrix};
use crate::triple::ParameterTriple;

/// Scalar triple `A = -κ²`, `Π(0) = [-κ, 1]`, `S(0) = s0`.
///
/// With `u ≡ 0` this gives `Λ₂(x) = e^{κx}`, `S(x) = (e^{2κx} + 2κs0 - 1)/(2κ)`
/// and `ũ(x) = -2κ² sech²(κx + φ)` with `φ = -½ ln(2κs0 - 1)`, provided
/// `s0 > 1/(2κ)`.
pub fn soliton_triple(kappa: f64, s0: f64) -> Result<ParameterTriple> {
    if !(kappa > 0.0) || !(s0 > 0.5 / kappa) {
        return Err(Error::Invalid(format!(
            "soliton data needs kappa > 0 and S0 > 1/(2 kappa), got kappa = {kappa}, S0 = {s0}"
        )));
    }
    let scalar = |v: f64| CMatrix::from_element(1, 1, c(v, 0.0));
    let pi0 = CMatrix::from_row_slice(1, 2, &[c(-kappa, 0.0), c(1.0, 0.0)]);
    ParameterTriple::continuous(scalar(-kappa * kappa), scalar(s0), pi0)
}

/// Least-squares fit of `amplitude · sech²(κx + shift)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SechFit {
    pub kappa: f64,
    pub amplitude: f64,
    pub shift: f64,
    /// Largest pointwise deviation from the fitted profile.
    pub max_error: f64,
}

fn sech2(z: f64) -> f64 {
    let s = 1.0 / z.cosh();
    s * s
}

/// Best amplitude for a fixed shift, and the resulting sum of squares.
fn profile(xs: &[f64], values: &[f64], kappa: f64, shift: f64) -> (f64, f64) {
    let (mut sy, mut ss) = (0.0, 0.0);
    for (&x, &v) in xs.iter().zip(values) {
        let s = sech2(kappa * x + shift);
        sy += s * v;
        ss += s * s;
    }
    let amplitude = if ss > 0.0 { sy / ss } else { 0.0 };
    let sse = xs
        .iter()
        .zip(values)
        .map(|(&x, &v)| (v - amplitude * sech2(kappa * x + shift)).powi(2))
        .sum();
    (amplitude, sse)
}

/// Fits `values ≈ a · sech²(κx + φ)` over `(a, φ)`.
///
/// The amplitude enters linearly and is eliminated; the shift is located by a
/// scan over `[-20, 20]` followed by golden-section refinement.
pub fn fit_sech2(xs: &[f64], values: &[f64], kappa: f64) -> Result<SechFit> {
    if xs.len() != values.len() || xs.len() < 3 {
        return Err(Error::InsufficientSamples(format!(
            "at least three matching samples, got {} and {}",
            xs.len(),
            values.len()
        )));
    }
    let objective = |phi: f64| profile(xs, values, kappa, phi).1;
    let step = 0.05;
    let mut best = -20.0;
    let mut best_val = objective(best);
    let mut phi = -20.0;
    while phi <= 20.0 {
        let v = objective(phi);
        if v < best_val {
            best = phi;
            best_val = v;
        }
        phi += step;
    }

    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (best - step, best + step);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (objective(x1), objective(x2));
    while hi - lo > 1e-14 * (1.0 + best.abs()) {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = objective(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = objective(x2);
        }
    }
    let shift = 0.5 * (lo + hi);
    let amplitude = profile(xs, values, kappa, shift).0;
    let max_error = xs
        .iter()
        .zip(values)
        .map(|(&x, &v)| (v - amplitude * sech2(kappa * x + shift)).abs())
        .fold(0.0, max_nan);
    Ok(SechFit {
        kappa,
        amplitude,
        shift,
        max_error,
    })
}
