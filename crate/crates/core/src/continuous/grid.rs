use crate::error::{Error, Result};
use crate::linalg::{zeros, CMatrix, Hermitian};

/// Strictly increasing sample points starting at `x = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(Vec<f64>);

impl Grid {
    pub fn new(xs: Vec<f64>) -> Result<Self> {
        match xs.first() {
            None => return Err(Error::Grid("empty grid".into())),
            Some(&x0) if x0 != 0.0 => {
                return Err(Error::Grid(format!("grid must start at 0, starts at {x0}")))
            }
            _ => {}
        }
        if xs.iter().any(|x| !x.is_finite()) {
            return Err(Error::Grid("non-finite sample".into()));
        }
        if let Some(w) = xs.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::Grid(format!(
                "grid not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
        Ok(Grid(xs))
    }

    /// `[0, length]` split into `round(length / step)` equal intervals.
    pub fn uniform(length: f64, step: f64) -> Result<Self> {
        if !(length > 0.0) || !(step > 0.0) || !length.is_finite() {
            return Err(Error::Grid(format!(
                "need positive length and step, got {length} and {step}"
            )));
        }
        let n = ((length / step).round() as usize).max(1);
        Self::new((0..=n).map(|k| length * k as f64 / n as f64).collect())
    }

    pub fn xs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn length(&self) -> f64 {
        *self.0.last().unwrap()
    }

    /// Index of the sample equal to `x` up to rounding.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let tol = 1e-12 * (1.0 + x.abs());
        let i = self.0.partition_point(|&v| v < x - tol);
        (i < self.0.len() && (self.0[i] - x).abs() <= tol).then_some(i)
    }
}

/// The `h × h` Hermitian potential `u(x)` of the initial system.
#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    Zero { h: usize },
    /// Piecewise linear between knots.
    Tabulated { xs: Vec<f64>, values: Vec<Hermitian> },
}

impl Potential {
    pub fn zero(h: usize) -> Self {
        Potential::Zero { h }
    }

    pub fn tabulated(xs: Vec<f64>, values: Vec<Hermitian>) -> Result<Self> {
        if xs.len() != values.len() || xs.is_empty() {
            return Err(Error::Grid(format!(
                "potential has {} knots and {} values",
                xs.len(),
                values.len()
            )));
        }
        let h = values[0].dim();
        if values.iter().any(|v| v.dim() != h) {
            return Err(Error::Dimension {
                context: "potential",
                expected: format!("{h}x{h} samples"),
                found: "mixed sizes".into(),
            });
        }
        Grid::new(xs.clone())?;
        Ok(Potential::Tabulated { xs, values })
    }

    /// `u ≡ value` on `[0, length]`.
    pub fn constant(value: Hermitian, length: f64) -> Result<Self> {
        Self::tabulated(vec![0.0, length], vec![value.clone(), value])
    }

    pub fn h(&self) -> usize {
        match self {
            Potential::Zero { h } => *h,
            Potential::Tabulated { values, .. } => values[0].dim(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Potential::Zero { .. })
    }

    /// Knots where the interpolant has kinks.
    pub fn knots(&self) -> &[f64] {
        match self {
            Potential::Zero { .. } => &[],
            Potential::Tabulated { xs, .. } => xs,
        }
    }

    /// Largest `x` at which `u` is defined.
    pub fn extent(&self) -> f64 {
        match self {
            Potential::Zero { .. } => f64::INFINITY,
            Potential::Tabulated { xs, .. } => *xs.last().unwrap(),
        }
    }

    pub fn at(&self, x: f64) -> CMatrix {
        match self {
            Potential::Zero { h } => zeros(*h, *h),
            Potential::Tabulated { xs, values } => {
                let last = xs.len() - 1;
                if x <= xs[0] {
                    return values[0].as_matrix().clone();
                }
                if x >= xs[last] {
                    return values[last].as_matrix().clone();
                }
                let i = xs.partition_point(|&v| v <= x) - 1;
                let w = (x - xs[i]) / (xs[i + 1] - xs[i]);
                if w == 0.0 {
                    return values[i].as_matrix().clone();
                }
                values[i].as_matrix().scale(1.0 - w) + values[i + 1].as_matrix().scale(w)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn grid_validation() {
        assert!(Grid::new(vec![]).is_err());
        assert!(Grid::new(vec![0.5, 1.0]).is_err());
        assert!(Grid::new(vec![0.0, 1.0, 1.0]).is_err());
        let g = Grid::uniform(5.0, 1e-3).unwrap();
        assert_eq!(g.len(), 5001);
        assert_eq!(g.length(), 5.0);
        assert_eq!(g.index_of(2.5), Some(2500));
        assert_eq!(g.index_of(2.5004), None);
    }

    #[test]
    fn linear_interpolation() {
        let v0 = Hermitian::from_real_diagonal(&[0.0]);
        let v1 = Hermitian::from_real_diagonal(&[2.0]);
        let u = Potential::tabulated(vec![0.0, 1.0], vec![v0, v1]).unwrap();
        assert_eq!(u.at(0.25)[(0, 0)], c(0.5, 0.0));
        assert_eq!(u.at(3.0)[(0, 0)], c(2.0, 0.0));
        assert_eq!(Potential::zero(2).at(1.0), zeros(2, 2));
    }
}
