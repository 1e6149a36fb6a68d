//! Epigraph of a shifted power function, {(x, y) : y ≥ |x|^α − β}.

use super::BoundaryEval;
use crate::error::{input, Error, Result};
use crate::linalg::{Matrix, Vector};

/// Relative tolerance on the offset root.
pub const ROOT_TOL: f64 = 1e-14;
const MAX_ROOT_ITER: usize = 200;

#[derive(Debug, Clone)]
pub struct PowerEpigraph {
    alpha: f64,
    beta: f64,
}

impl PowerEpigraph {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 1.0) {
            return input(format!("epigraph exponent must exceed 1, got {alpha}"));
        }
        if !(beta.is_finite() && beta >= 0.0) {
            return input(format!("epigraph shift must be nonnegative, got {beta}"));
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn project(&self, z: &Vector) -> Result<Vector> {
        let (x, y) = (z[0], z[1]);
        let ax = x.abs();
        let yp = y + self.beta;
        if yp >= ax.powf(self.alpha) {
            return Ok(z.clone());
        }
        let delta = epigraph_offset(ax, yp, self.alpha)?;
        let u = ax - delta;
        Ok(Vector::from_vec(vec![x.signum() * u, u.powf(self.alpha) - self.beta]))
    }

    /// P(z) − z, with the horizontal part taken from the offset root rather
    /// than from a difference of nearly equal abscissae.
    pub fn displacement(&self, z: &Vector) -> Result<Vector> {
        let (x, y) = (z[0], z[1]);
        let ax = x.abs();
        let yp = y + self.beta;
        if yp >= ax.powf(self.alpha) {
            return Ok(Vector::zeros(2));
        }
        let delta = epigraph_offset(ax, yp, self.alpha)?;
        let u = ax - delta;
        Ok(Vector::from_vec(vec![-x.signum() * delta, u.powf(self.alpha) - yp]))
    }

    /// g(x, y) = |x|^α − β − y.
    pub fn boundary(&self, z: &Vector) -> Result<BoundaryEval> {
        let (x, y) = (z[0], z[1]);
        let a = self.alpha;
        let ax = x.abs();
        let curvature_term = if ax > 0.0 {
            a * (a - 1.0) * ax.powf(a - 2.0)
        } else if a > 2.0 {
            0.0
        } else if a == 2.0 {
            2.0
        } else {
            return Err(Error::Regularity(format!(
                "|x|^{a} has an unbounded second derivative at x = 0"
            )));
        };
        let mut hess = Matrix::zeros(2, 2);
        hess[(0, 0)] = curvature_term;
        Ok(BoundaryEval {
            g: ax.powf(a) - self.beta - y,
            grad: Vector::from_vec(vec![a * x.signum() * ax.powf(a - 1.0), -1.0]),
            hess,
        })
    }
}

/// Horizontal offset δ = |x| − u of the projection of a point below the graph
/// of |x|^α (unshifted, with y' = y + β).
///
/// The foot u ∈ [max(0, y'^{1/α}), |x|] solves u − |x| + αu^{α−1}(u^α − y') = 0.
/// Solving for δ directly keeps full relative accuracy when the foot is close
/// to the query point, which matters near the vertex.
pub fn epigraph_offset(ax: f64, yp: f64, alpha: f64) -> Result<f64> {
    if ax == 0.0 {
        return Ok(0.0);
    }
    let lo_u = if yp > 0.0 { yp.powf(1.0 / alpha).min(ax) } else { 0.0 };
    // F(δ) = δ − α u^{α−1}(u^α − y') with u = ax − δ is increasing in δ.
    // Also returns the rounding noise of the residual: |F| below it carries
    // no information about the sign.
    let f = |d: f64| -> (f64, f64, f64) {
        let u = ax - d;
        let ua1 = u.powf(alpha - 1.0);
        let ua = ua1 * u;
        let gap = ua - yp;
        let val = d - alpha * ua1 * gap;
        let ua2 = if u > 0.0 { ua1 / u } else { f64::INFINITY };
        let dval = 1.0 + alpha * (alpha - 1.0) * ua2 * gap + alpha * alpha * ua1 * ua1;
        let noise = 8.0 * f64::EPSILON * (d.abs() + alpha * ua1 * (ua + yp.abs()));
        (val, dval, noise)
    };
    let mut lo = 0.0_f64;
    let mut hi = ax - lo_u;
    let mut d = (ax - ax.min(1.0)).clamp(lo, hi);
    for _ in 0..MAX_ROOT_ITER {
        let (val, dval, noise) = f(d);
        if val.abs() <= noise {
            return Ok(d);
        }
        if val < 0.0 {
            lo = d;
        } else {
            hi = d;
        }
        let mut next = d - val / dval;
        if !(next.is_finite() && next >= lo && next <= hi) {
            next = 0.5 * (lo + hi);
        }
        let step = (next - d).abs();
        d = next;
        if step <= ROOT_TOL * d.abs() || hi - lo <= 2.0 * f64::EPSILON * hi {
            return Ok(d);
        }
    }
    Err(Error::Convergence {
        what: "epigraph foot-point root".into(),
        iterations: MAX_ROOT_ITER,
        residual: f(d).0.abs(),
    })
}
