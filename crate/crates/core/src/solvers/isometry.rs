//! Rewrites a problem confined to an affine subspace L in orthonormal
//! coordinates of L. Projections and circumcenters commute with isometries,
//! so the iterates of the reduced problem are the images of the original ones.

use super::FeasibilityProblem;
use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::sets::{AffineSubspace, Set};

/// Reduced problem in R^d together with the coordinate maps of L.
#[derive(Debug, Clone)]
pub struct IsometryReduction {
    pub problem: FeasibilityProblem,
    pub hull: AffineSubspace,
}

impl IsometryReduction {
    /// φ(z) = Bᵀ(z − anchor).
    pub fn to_reduced(&self, z: &Vector) -> Vector {
        self.hull.to_coords(z)
    }

    /// φ⁻¹(w) = anchor + Bw.
    pub fn to_ambient(&self, w: &Vector) -> Vector {
        self.hull.from_coords(w)
    }
}

pub fn isometry_reduce(problem: &FeasibilityProblem) -> Result<IsometryReduction> {
    let hull = problem
        .common_hull
        .clone()
        .ok_or_else(|| Error::Unsupported("isometry reduction needs a common affine hull".into()))?;
    let x = Set::embedded(problem.x.clone(), hull.clone())?;
    let y = Set::embedded(problem.y.clone(), hull.clone())?;
    let mut reduced = FeasibilityProblem::new(x, y)?;
    if let Some(r) = &problem.reference_solution {
        reduced = reduced.with_reference(hull.to_coords(r))?;
    }
    reduced.known_constants = problem.known_constants;
    Ok(IsometryReduction {
        problem: reduced,
        hull,
    })
}
