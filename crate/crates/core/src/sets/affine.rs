//! Affine subspaces {z : Az = b} with an orthonormal basis of the direction space.

use crate::error::{input, Result};
use crate::linalg::{check_dim, least_squares_min_norm, orthonormal_nullspace, Matrix, Vector};

/// Residual allowed when checking that a constraint system is consistent.
const CONSISTENCY_TOL: f64 = 1e-10;

/// L = {z : Az = b}, stored with a point of L and an orthonormal basis B of null(A).
///
/// The coordinate map φ(z) = Bᵀ(z − anchor) is an isometry from L onto R^d.
#[derive(Debug, Clone)]
pub struct AffineSubspace {
    a: Matrix,
    b: Vector,
    basis: Matrix,
    anchor: Vector,
    rank: usize,
}

impl AffineSubspace {
    /// Builds L from its constraints. Redundant rows are accepted as long as the
    /// system is consistent; the direction space then has dimension n − rank(A).
    pub fn new(a: Matrix, b: Vector) -> Result<Self> {
        if b.len() != a.nrows() {
            return input(format!(
                "affine constraints: A has {} rows but b has length {}",
                a.nrows(),
                b.len()
            ));
        }
        let ns = orthonormal_nullspace(&a)?;
        let anchor = least_squares_min_norm(&a, &b)?;
        let residual = (&a * &anchor - &b).norm();
        if residual > CONSISTENCY_TOL * (1.0 + b.norm()) {
            return input(format!("affine constraints are inconsistent (residual {residual:e})"));
        }
        Ok(Self {
            a,
            b,
            basis: ns.basis,
            anchor,
            rank: ns.rank,
        })
    }

    /// Builds L and additionally requires A to have full row rank.
    pub fn with_full_row_rank(a: Matrix, b: Vector) -> Result<Self> {
        let rows = a.nrows();
        let l = Self::new(a, b)?;
        if l.rank != rows {
            return input(format!("constraint matrix has rank {} < {rows} rows", l.rank));
        }
        Ok(l)
    }

    /// The whole space R^n, i.e. a system with no rows.
    pub fn whole_space(n: usize) -> Self {
        Self {
            a: Matrix::zeros(0, n),
            b: Vector::zeros(0),
            basis: Matrix::identity(n, n),
            anchor: Vector::zeros(n),
            rank: 0,
        }
    }

    /// {z : z_axis = value} in R^n.
    pub fn coordinate_plane(n: usize, axis: usize, value: f64) -> Result<Self> {
        if axis >= n {
            return input(format!("axis {axis} out of range for dimension {n}"));
        }
        let mut a = Matrix::zeros(1, n);
        a[(0, axis)] = 1.0;
        Self::new(a, Vector::from_element(1, value))
    }

    /// Stacks the constraints of several subspaces of the same ambient space.
    pub fn intersect(parts: &[&AffineSubspace]) -> Result<Self> {
        let n = match parts.first() {
            Some(p) => p.ambient_dim(),
            None => return input("cannot intersect an empty list of subspaces"),
        };
        if parts.iter().any(|p| p.ambient_dim() != n) {
            return input("subspaces live in different ambient dimensions");
        }
        let rows: usize = parts.iter().map(|p| p.a.nrows()).sum();
        let mut a = Matrix::zeros(rows, n);
        let mut b = Vector::zeros(rows);
        let mut r = 0;
        for p in parts {
            let m = p.a.nrows();
            a.view_mut((r, 0), (m, n)).copy_from(&p.a);
            b.rows_mut(r, m).copy_from(&p.b);
            r += m;
        }
        Self::new(a, b)
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    /// Dimension d of L.
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Vector {
        &self.b
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn anchor(&self) -> &Vector {
        &self.anchor
    }

    /// True when L is the whole ambient space.
    pub fn is_whole_space(&self) -> bool {
        self.dim() == self.ambient_dim()
    }

    /// ‖Az − b‖.
    pub fn residual(&self, z: &Vector) -> f64 {
        if self.a.nrows() == 0 {
            return 0.0;
        }
        (&self.a * z - &self.b).norm()
    }

    /// Orthogonal projection anchor + BBᵀ(z − anchor).
    pub fn project(&self, z: &Vector) -> Result<Vector> {
        check_dim(z, self.ambient_dim(), "point")?;
        Ok(self.from_coords(&self.to_coords(z)))
    }

    /// φ(z) = Bᵀ(z − anchor).
    pub fn to_coords(&self, z: &Vector) -> Vector {
        self.basis.transpose() * (z - &self.anchor)
    }

    /// φ⁻¹(w) = anchor + Bw.
    pub fn from_coords(&self, w: &Vector) -> Vector {
        &self.anchor + &self.basis * w
    }

    /// Expresses an ambient direction in hull coordinates (Bᵀv).
    pub fn restrict_vector(&self, v: &Vector) -> Vector {
        self.basis.transpose() * v
    }

    /// Expresses an ambient quadratic form in hull coordinates (BᵀHB).
    pub fn restrict_form(&self, h: &Matrix) -> Matrix {
        self.basis.transpose() * h * &self.basis
    }
}
