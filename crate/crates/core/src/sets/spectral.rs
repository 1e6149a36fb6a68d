//! Spectral sets of symmetric matrices acting on the isometric flattening:
//! the PSD cone and {Σ : λ_max(Σ) ≤ a, tr Σ = 1}.

use super::BoundaryEval;
use crate::error::{input, Error, Result};
use crate::linalg::{smat, svec, svec_len, symmetric_eigh, Matrix, SymEig, Vector};

/// Relative eigenvalue gap below which the extreme eigenvalue counts as repeated.
pub const SIMPLE_GAP_TOL: f64 = 1e-8;

fn outer_sym(a: &Vector, b: &Vector) -> Matrix {
    let m = a * b.transpose();
    (&m + m.transpose()) * 0.5
}

/// Derivatives of an extreme eigenvalue λ_i, assumed simple, in svec coordinates.
///
/// grad = svec(v_i v_iᵀ); hess = Σ_{j≠i} 2/(λ_i − λ_j) w_j w_jᵀ with
/// w_j = svec(sym(v_i v_jᵀ)).
fn eigenvalue_derivatives(eig: &SymEig, i: usize) -> Result<(Vector, Matrix)> {
    let n = eig.values.len();
    let scale = eig.values.amax().max(1.0);
    let vi = eig.vectors.column(i).into_owned();
    for j in 0..n {
        if j != i && (eig.values[i] - eig.values[j]).abs() <= SIMPLE_GAP_TOL * scale {
            return Err(Error::Regularity(format!(
                "eigenvalue {} is not simple; the spectral boundary is not C2 here",
                eig.values[i]
            )));
        }
    }
    let grad = svec(&(&vi * vi.transpose()));
    let dim = svec_len(n);
    let mut hess = Matrix::zeros(dim, dim);
    for j in 0..n {
        if j == i {
            continue;
        }
        let vj = eig.vectors.column(j).into_owned();
        let w = svec(&outer_sym(&vi, &vj));
        hess += &w * w.transpose() * (2.0 / (eig.values[i] - eig.values[j]));
    }
    Ok((grad, hess))
}

/// Cone of positive semidefinite n × n matrices.
#[derive(Debug, Clone)]
pub struct PsdCone {
    order: usize,
}

impl PsdCone {
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return input("PSD cone of order 0");
        }
        Ok(Self { order })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        svec_len(self.order)
    }

    pub fn project(&self, z: &Vector) -> Result<Vector> {
        let eig = symmetric_eigh(&smat(z)?)?;
        let clipped = eig.values.map(|l| l.max(0.0));
        Ok(svec(&eig.reassemble_with(&clipped)))
    }

    /// g = −λ_min, smooth where λ_min is simple.
    pub fn boundary(&self, z: &Vector) -> Result<BoundaryEval> {
        let eig = symmetric_eigh(&smat(z)?)?;
        let (grad, hess) = eigenvalue_derivatives(&eig, 0)?;
        Ok(BoundaryEval {
            g: -eig.values[0],
            grad: -grad,
            hess: -hess,
        })
    }
}

/// {Σ : λ_max(Σ) ≤ a, tr Σ = 1}.
#[derive(Debug, Clone)]
pub struct SpectralBoxTrace {
    order: usize,
    bound: f64,
}

impl SpectralBoxTrace {
    pub fn new(order: usize, bound: f64) -> Result<Self> {
        if order == 0 {
            return input("spectral set of order 0");
        }
        if !bound.is_finite() || bound * (order as f64) < 1.0 {
            return input(format!(
                "set is empty: bound {bound} times order {order} is below the unit trace"
            ));
        }
        Ok(Self { order, bound })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn dim(&self) -> usize {
        svec_len(self.order)
    }

    pub fn project(&self, z: &Vector) -> Result<Vector> {
        let eig = symmetric_eigh(&smat(z)?)?;
        let v = project_capped_simplex(&eig.values, self.bound);
        Ok(svec(&eig.reassemble_with(&v)))
    }

    /// g = λ_max − a, smooth where λ_max is simple.
    pub fn boundary(&self, z: &Vector) -> Result<BoundaryEval> {
        let eig = symmetric_eigh(&smat(z)?)?;
        let top = self.order - 1;
        let (grad, hess) = eigenvalue_derivatives(&eig, top)?;
        Ok(BoundaryEval {
            g: eig.values[top] - self.bound,
            grad,
            hess,
        })
    }
}

/// Projection of λ onto {v : v_i ≤ a, Σ v_i = 1}.
///
/// The solution is v_i = min(λ_i − τ, a). With the k largest entries clipped,
/// τ = (Σ_{rest} λ − (1 − k a)) / (n − k); the valid k is found by a sweep.
pub fn project_capped_simplex(lambda: &Vector, a: f64) -> Vector {
    let n = lambda.len();
    let mut sorted: Vec<f64> = lambda.iter().copied().collect();
    sorted.sort_by(|x, y| y.total_cmp(x));
    let total: f64 = sorted.iter().sum();
    let mut clipped_sum = 0.0;
    let mut tau = None;
    for k in 0..n {
        let rest = total - clipped_sum;
        let t = (rest - (1.0 - k as f64 * a)) / (n - k) as f64;
        let clipped_ok = k == 0 || sorted[k - 1] - t >= a;
        let free_ok = sorted[k] - t <= a;
        if clipped_ok && free_ok {
            tau = Some(t);
            break;
        }
        clipped_sum += sorted[k];
    }
    match tau {
        Some(t) => lambda.map(|l| (l - t).min(a)),
        // Only reachable when n·a = 1 up to rounding: every entry sits at the cap.
        None => Vector::from_element(n, a),
    }
}
