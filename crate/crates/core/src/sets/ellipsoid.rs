//! Ellipsoids {z : (z − c)ᵀQ(z − c) ≤ 1} projected by a safeguarded Newton
//! iteration on the Lagrange multiplier.

use super::BoundaryEval;
use crate::error::{input, Error, Result};
use crate::linalg::{check_finite_vec, check_symmetric, symmetric_eigh, Matrix, SymEig, Vector};

/// Residual of the secular equation at which the multiplier search stops.
pub const SECULAR_TOL: f64 = 1e-12;
const MAX_NEWTON: usize = 200;

#[derive(Debug, Clone)]
pub struct Ellipsoid {
    shape: Matrix,
    center: Vector,
    eig: SymEig,
}

impl Ellipsoid {
    /// `shape` must be symmetric positive definite.
    pub fn new(shape: Matrix, center: Vector) -> Result<Self> {
        check_symmetric(&shape)?;
        check_finite_vec(&center, "ellipsoid center")?;
        if shape.nrows() != center.len() {
            return input(format!(
                "ellipsoid shape is {}x{} but center has length {}",
                shape.nrows(),
                shape.ncols(),
                center.len()
            ));
        }
        let eig = symmetric_eigh(&shape)?;
        if eig.values.len() == 0 || eig.values[0] <= 0.0 {
            return input("ellipsoid shape matrix is not positive definite");
        }
        Ok(Self { shape, center, eig })
    }

    /// Axis-aligned ellipsoid with the given semi-axes.
    pub fn axis_aligned(semi_axes: &[f64], center: Vector) -> Result<Self> {
        if semi_axes.iter().any(|&s| !(s.is_finite() && s > 0.0)) {
            return input("semi-axes must be positive");
        }
        let q = Matrix::from_diagonal(&Vector::from_iterator(
            semi_axes.len(),
            semi_axes.iter().map(|s| 1.0 / (s * s)),
        ));
        Self::new(q, center)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn shape(&self) -> &Matrix {
        &self.shape
    }

    pub fn center(&self) -> &Vector {
        &self.center
    }

    pub fn project(&self, z: &Vector) -> Result<Vector> {
        let d = z - &self.center;
        if d.dot(&(&self.shape * &d)) <= 1.0 {
            return Ok(z.clone());
        }
        let q = &self.eig.values;
        let y = self.eig.vectors.transpose() * &d;
        let secular = |mu: f64| -> (f64, f64) {
            let mut f = -1.0;
            let mut df = 0.0;
            for i in 0..q.len() {
                let s = 1.0 + mu * q[i];
                let t = q[i] * y[i] * y[i] / (s * s);
                f += t;
                df -= 2.0 * t * q[i] / s;
            }
            (f, df)
        };
        // f is convex and decreasing on [0, ∞), positive at 0 and negative at hi.
        let mut lo = 0.0_f64;
        let mut hi = y.norm() / q[0].sqrt();
        let mut mu = 0.0_f64;
        let mut converged = false;
        let mut last_f = f64::INFINITY;
        for _ in 0..MAX_NEWTON {
            let (f, df) = secular(mu);
            last_f = f;
            if f > 0.0 {
                lo = lo.max(mu);
            } else {
                hi = hi.min(mu);
            }
            // f is a sum of O(1) terms minus 1, so |f| below a few ε is rounding noise.
            if f.abs() <= 8.0 * f64::EPSILON {
                converged = true;
                break;
            }
            let mut next = mu - f / df;
            if !(next >= lo && next <= hi) || !next.is_finite() {
                next = 0.5 * (lo + hi);
            }
            let step = (next - mu).abs();
            mu = next;
            if f.abs() <= SECULAR_TOL && step <= 4.0 * f64::EPSILON * mu.max(f64::MIN_POSITIVE) {
                converged = true;
                break;
            }
            if hi - lo <= 4.0 * f64::EPSILON * hi {
                converged = f.abs() <= SECULAR_TOL;
                break;
            }
        }
        if !converged {
            return Err(Error::Convergence {
                what: "ellipsoid multiplier search".into(),
                iterations: MAX_NEWTON,
                residual: last_f.abs(),
            });
        }
        let scaled = Vector::from_iterator(q.len(), (0..q.len()).map(|i| y[i] / (1.0 + mu * q[i])));
        Ok(&self.center + &self.eig.vectors * scaled)
    }

    /// g(z) = (z − c)ᵀQ(z − c) − 1.
    pub fn boundary(&self, z: &Vector) -> BoundaryEval {
        let d = z - &self.center;
        let qd = &self.shape * &d;
        BoundaryEval {
            g: d.dot(&qd) - 1.0,
            grad: qd * 2.0,
            hess: &self.shape * 2.0,
        }
    }
}
