//! Circumcenter of a finite point set: the point of the affine hull of the
//! points that is equidistant from all of them.
//!
//! The equidistance system ⟨c − p₀, v_i⟩ = ‖v_i‖²/2 with v_i = p_i − p₀ is
//! solved through a modified Gram–Schmidt factorization V = QR rather than the
//! normal (Gram) equations. Near convergence of cCRM the three points become
//! nearly collinear and the Gram matrix has a condition number around 1e13;
//! the QR route keeps the solve accurate there.

use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::linalg::{check_finite_vec, Vector};

/// Points closer than this fraction of the set's diameter are merged.
pub const DEDUP_TOL: f64 = 1e-12;
/// A difference vector whose component orthogonal to the previous ones is
/// below this fraction of its length counts as linearly dependent.
pub const RANK_TOL: f64 = 1e-12;
/// Equidistance residual, relative to 1 + diameter, accepted for dependent points.
pub const CONSISTENCY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CircumStatus {
    /// The distinct points were affinely independent.
    Nondegenerate,
    /// Duplicates were merged or dependent points dropped before solving.
    ReducedRank,
    /// All points coincide.
    CoincidentAll,
}

impl CircumStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CircumStatus::Nondegenerate => "nondegenerate",
            CircumStatus::ReducedRank => "reduced_rank",
            CircumStatus::CoincidentAll => "coincident_all",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircumResult {
    pub center: Vector,
    pub status: CircumStatus,
}

/// Circumcenter of `points`.
///
/// Returns a geometry error when distinct points are affinely dependent in a
/// way that admits no equidistant point, e.g. three distinct collinear points.
pub fn circumcenter(points: &[Vector]) -> Result<CircumResult> {
    let first = match points.first() {
        Some(p) => p,
        None => return input("circumcenter of an empty point set"),
    };
    let n = first.len();
    for p in points {
        if p.len() != n {
            return input("circumcenter points have different dimensions");
        }
        check_finite_vec(p, "circumcenter point")?;
    }

    let mut diameter = 0.0_f64;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            diameter = diameter.max((&points[i] - &points[j]).norm());
        }
    }
    if diameter == 0.0 {
        return Ok(CircumResult {
            center: first.clone(),
            status: CircumStatus::CoincidentAll,
        });
    }

    let merge = DEDUP_TOL * diameter;
    let mut kept: Vec<&Vector> = Vec::with_capacity(points.len());
    for p in points {
        if kept.iter().all(|q| (p - *q).norm() > merge) {
            kept.push(p);
        }
    }
    let mut reduced = kept.len() < points.len();
    if kept.len() == 1 {
        return Ok(CircumResult {
            center: first.clone(),
            status: CircumStatus::CoincidentAll,
        });
    }

    let base = kept[0];
    let mut q_cols: Vec<Vector> = Vec::new();
    // Column j of R holds the coefficients of the j-th independent difference.
    let mut r_cols: Vec<Vec<f64>> = Vec::new();
    let mut dependent: Vec<&Vector> = Vec::new();
    for p in &kept[1..] {
        let v = *p - base;
        let vnorm = v.norm();
        let mut w = v.clone();
        let mut coef = vec![0.0; q_cols.len()];
        // Two passes of modified Gram–Schmidt for orthogonality to working precision.
        for _ in 0..2 {
            for (i, q) in q_cols.iter().enumerate() {
                let c = q.dot(&w);
                coef[i] += c;
                w -= q * c;
            }
        }
        let wnorm = w.norm();
        if wnorm <= RANK_TOL * vnorm {
            dependent.push(p);
            continue;
        }
        coef.push(wnorm);
        q_cols.push(w / wnorm);
        r_cols.push(coef);
    }

    // Forward substitution on Rᵀy = (‖v_j‖²/2)_j.
    let k = q_cols.len();
    let mut y = vec![0.0; k];
    for j in 0..k {
        let vj_sq: f64 = r_cols[j].iter().map(|c| c * c).sum();
        let mut rhs = 0.5 * vj_sq;
        for i in 0..j {
            rhs -= r_cols[j][i] * y[i];
        }
        y[j] = rhs / r_cols[j][j];
    }
    let mut center = base.clone();
    for (q, yi) in q_cols.iter().zip(&y) {
        center += q * *yi;
    }

    if !dependent.is_empty() {
        reduced = true;
        let radius = (&center - base).norm();
        for p in &dependent {
            let gap = ((&center - *p).norm() - radius).abs();
            if gap > CONSISTENCY_TOL * (1.0 + diameter) {
                return Err(Error::Geometry(format!(
                    "distinct affinely dependent points admit no circumcenter (equidistance gap {gap:e})"
                )));
            }
        }
    }

    Ok(CircumResult {
        center,
        status: if reduced {
            CircumStatus::ReducedRank
        } else {
            CircumStatus::Nondegenerate
        },
    })
}
