//! Second-order cone K = {(t, u) : ‖u‖ ≤ t} and its preimages under
//! orthogonal affine maps.

use super::BoundaryEval;
use crate::error::{input, Error, Result};
use crate::linalg::{check_finite_mat, check_finite_vec, Matrix, Vector};

const ORTHOGONALITY_TOL: f64 = 1e-10;

/// Second-order (Lorentz) cone in R^n, n ≥ 2, with the first coordinate as t.
#[derive(Debug, Clone)]
pub struct SecondOrderCone {
    dim: usize,
}

impl SecondOrderCone {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return input(format!("second-order cone needs dimension >= 2, got {dim}"));
        }
        Ok(Self { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn project(&self, z: &Vector) -> Vector {
        project_soc(z)
    }

    /// g(t, u) = ‖u‖ − t, smooth away from the axis u = 0.
    pub fn boundary(&self, z: &Vector) -> Result<BoundaryEval> {
        let u = z.rows(1, self.dim - 1);
        let nu = u.norm();
        if nu <= 1e-12 * z.norm().max(1.0) {
            return Err(Error::Regularity(
                "the cone boundary is not a manifold at the apex or on the axis".into(),
            ));
        }
        let n = self.dim;
        let mut grad = Vector::zeros(n);
        grad[0] = -1.0;
        let unit = u / nu;
        grad.rows_mut(1, n - 1).copy_from(&unit);
        let mut hess = Matrix::zeros(n, n);
        let block = (Matrix::identity(n - 1, n - 1) - &unit * unit.transpose()) / nu;
        hess.view_mut((1, 1), (n - 1, n - 1)).copy_from(&block);
        Ok(BoundaryEval {
            g: nu - z[0],
            grad,
            hess,
        })
    }
}

/// Three-case projection onto the second-order cone.
pub fn project_soc(z: &Vector) -> Vector {
    let t = z[0];
    let u = z.rows(1, z.len() - 1);
    let nu = u.norm();
    if nu <= t {
        return z.clone();
    }
    if nu <= -t {
        return Vector::zeros(z.len());
    }
    let s = 0.5 * (t + nu);
    let mut p = Vector::zeros(z.len());
    p[0] = s;
    p.rows_mut(1, z.len() - 1).copy_from(&(u * (s / nu)));
    p
}

/// {z : Cz + d ∈ K} for an orthogonal matrix C.
///
/// Orthogonality makes the projection explicit: P(z) = Cᵀ(P_K(Cz + d) − d).
#[derive(Debug, Clone)]
pub struct ConePreimage {
    map: Matrix,
    shift: Vector,
    cone: SecondOrderCone,
}

impl ConePreimage {
    pub fn new(map: Matrix, shift: Vector) -> Result<Self> {
        check_finite_mat(&map, "cone map")?;
        check_finite_vec(&shift, "cone shift")?;
        if !map.is_square() || map.nrows() != shift.len() {
            return input("cone map must be square and match the shift length");
        }
        let n = map.nrows();
        let defect = (map.transpose() * &map - Matrix::identity(n, n)).norm();
        if defect > ORTHOGONALITY_TOL {
            return Err(Error::Unsupported(format!(
                "cone preimage requires an orthogonal map (‖CᵀC − I‖ = {defect:e})"
            )));
        }
        Ok(Self {
            cone: SecondOrderCone::new(n)?,
            map,
            shift,
        })
    }

    pub fn dim(&self) -> usize {
        self.shift.len()
    }

    pub fn map(&self) -> &Matrix {
        &self.map
    }

    pub fn shift(&self) -> &Vector {
        &self.shift
    }

    pub fn project(&self, z: &Vector) -> Vector {
        let w = &self.map * z + &self.shift;
        self.map.transpose() * (project_soc(&w) - &self.shift)
    }

    pub fn boundary(&self, z: &Vector) -> Result<BoundaryEval> {
        let w = &self.map * z + &self.shift;
        let e = self.cone.boundary(&w)?;
        Ok(BoundaryEval {
            g: e.g,
            grad: self.map.transpose() * e.grad,
            hess: self.map.transpose() * e.hess * &self.map,
        })
    }
}
