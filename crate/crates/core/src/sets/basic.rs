//! Halfspaces, hyperplanes and Euclidean balls.

use super::BoundaryEval;
use crate::error::{input, Result};
use crate::linalg::{check_finite_vec, Matrix, Vector};

fn check_normal(normal: &Vector, offset: f64) -> Result<()> {
    check_finite_vec(normal, "normal vector")?;
    if !offset.is_finite() {
        return input("offset is not finite");
    }
    if normal.norm() == 0.0 {
        return input("normal vector is zero");
    }
    Ok(())
}

/// {z : ⟨a, z⟩ ≤ b}.
#[derive(Debug, Clone)]
pub struct Halfspace {
    normal: Vector,
    offset: f64,
}

impl Halfspace {
    pub fn new(normal: Vector, offset: f64) -> Result<Self> {
        check_normal(&normal, offset)?;
        Ok(Self { normal, offset })
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    pub fn normal(&self) -> &Vector {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn project(&self, z: &Vector) -> Vector {
        let excess = self.normal.dot(z) - self.offset;
        if excess <= 0.0 {
            z.clone()
        } else {
            z - &self.normal * (excess / self.normal.norm_squared())
        }
    }

    pub fn boundary(&self, z: &Vector) -> BoundaryEval {
        let n = self.dim();
        BoundaryEval {
            g: self.normal.dot(z) - self.offset,
            grad: self.normal.clone(),
            hess: Matrix::zeros(n, n),
        }
    }
}

/// {z : ⟨a, z⟩ = b}.
#[derive(Debug, Clone)]
pub struct Hyperplane {
    normal: Vector,
    offset: f64,
}

impl Hyperplane {
    pub fn new(normal: Vector, offset: f64) -> Result<Self> {
        check_normal(&normal, offset)?;
        Ok(Self { normal, offset })
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    pub fn normal(&self) -> &Vector {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn project(&self, z: &Vector) -> Vector {
        let excess = self.normal.dot(z) - self.offset;
        z - &self.normal * (excess / self.normal.norm_squared())
    }
}

/// Closed ball of the given center and radius.
#[derive(Debug, Clone)]
pub struct Ball {
    center: Vector,
    radius: f64,
}

impl Ball {
    pub fn new(center: Vector, radius: f64) -> Result<Self> {
        check_finite_vec(&center, "ball center")?;
        if !(radius.is_finite() && radius >= 0.0) {
            return input(format!("ball radius {radius} must be finite and nonnegative"));
        }
        Ok(Self { center, radius })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &Vector {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn project(&self, z: &Vector) -> Vector {
        let d = z - &self.center;
        let r = d.norm();
        if r <= self.radius {
            z.clone()
        } else {
            &self.center + d * (self.radius / r)
        }
    }

    /// g(z) = ‖z − c‖² − r².
    pub fn boundary(&self, z: &Vector) -> BoundaryEval {
        let d = z - &self.center;
        let n = self.dim();
        BoundaryEval {
            g: d.norm_squared() - self.radius * self.radius,
            grad: d * 2.0,
            hess: Matrix::identity(n, n) * 2.0,
        }
    }
}
