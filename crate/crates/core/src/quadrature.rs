//! Cumulative composite Simpson quadrature for matrix-valued samples.

use crate::linalg::CMatrix;

/// Weights `w` such that `Σ w_i f(nodes_i)` integrates the quadratic
/// interpolant through three nodes over `[a, b]`.
fn quadratic_weights(nodes: [f64; 3], a: f64, b: f64) -> [f64; 3] {
    // Two-point Gauss-Legendre is exact for the cubic-or-lower interpolant.
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let g = half / 3f64.sqrt();
    let mut w = [0.0; 3];
    for x in [mid - g, mid + g] {
        for i in 0..3 {
            let mut l = 1.0;
            for j in 0..3 {
                if i != j {
                    l *= (x - nodes[j]) / (nodes[i] - nodes[j]);
                }
            }
            w[i] += half * l;
        }
    }
    w
}

/// Running integral `∫_{x_0}^{x_k} f` at every node.
///
/// Intervals are taken in consecutive pairs sharing one quadratic
/// interpolant, which is composite Simpson on a uniform grid; a trailing odd
/// interval reuses the last three nodes. Needs at least three nodes unless the
/// grid is a single point or a single interval (trapezoid).
pub fn cumulative(xs: &[f64], fs: &[CMatrix]) -> Vec<CMatrix> {
    assert_eq!(xs.len(), fs.len());
    let n = xs.len();
    let zero = || CMatrix::zeros(fs[0].nrows(), fs[0].ncols());
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    out.push(zero());
    if n == 2 {
        out.push((&fs[0] + &fs[1]).scale(0.5 * (xs[1] - xs[0])));
        return out;
    }
    let mut i = 0;
    while i + 1 < n {
        let base = if i + 2 < n { i } else { n - 3 };
        let nodes = [xs[base], xs[base + 1], xs[base + 2]];
        let steps = if i + 2 < n { 2 } else { 1 };
        for s in 0..steps {
            let (a, b) = (xs[i + s], xs[i + s + 1]);
            let w = quadratic_weights(nodes, a, b);
            let piece = fs[base].scale(w[0]) + fs[base + 1].scale(w[1]) + fs[base + 2].scale(w[2]);
            let prev = out.last().unwrap().clone();
            out.push(prev + piece);
        }
        i += steps;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn scalar(v: f64) -> CMatrix {
        CMatrix::from_element(1, 1, c(v, 0.0))
    }

    #[test]
    fn exact_for_cubics_at_even_nodes() {
        let xs: Vec<f64> = (0..=10).map(|k| k as f64 * 0.3).collect();
        let fs: Vec<CMatrix> = xs.iter().map(|&x| scalar(x * x * x - 2.0 * x + 1.0)).collect();
        let cum = cumulative(&xs, &fs);
        for k in (0..=10).step_by(2) {
            let x: f64 = xs[k];
            let exact = x.powi(4) / 4.0 - x * x + x;
            assert!((cum[k][(0, 0)].re - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_for_quadratics_on_nonuniform_grid() {
        let xs = [0.0, 0.1, 0.35, 0.4, 0.9, 1.3, 2.0];
        let fs: Vec<CMatrix> = xs.iter().map(|&x| scalar(3.0 * x * x + 1.0)).collect();
        let cum = cumulative(&xs, &fs);
        for (k, &x) in xs.iter().enumerate() {
            assert!((cum[k][(0, 0)].re - (x * x * x + x)).abs() < 1e-13);
        }
    }

    #[test]
    fn fourth_order_convergence() {
        let err = |n: usize| {
            let xs: Vec<f64> = (0..=n).map(|k| k as f64 / n as f64).collect();
            let fs: Vec<CMatrix> = xs.iter().map(|&x| scalar(x.exp())).collect();
            let cum = cumulative(&xs, &fs);
            (cum[n][(0, 0)].re - (1f64.exp() - 1.0)).abs()
        };
        let ratio = err(20) / err(40);
        assert!(ratio > 14.0 && ratio < 18.0, "ratio {ratio}");
    }
}
