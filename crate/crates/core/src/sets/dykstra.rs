//! Cyclic Dykstra iteration for projecting onto an intersection of sets.

use super::Set;
use crate::error::{input, Error, Result};
use crate::linalg::{check_dim, Vector};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 100_000;

/// Projection of `z` onto the intersection of `sets`.
///
/// One iteration is a full cycle over the sets. The loop stops when both the
/// iterate and the correction terms change by at most tol·(1 + ‖x‖) over a cycle.
pub fn dykstra_project(sets: &[Set], z: &Vector, tol: f64, max_iter: usize) -> Result<Vector> {
    let first = match sets.first() {
        Some(s) => s,
        None => return input("Dykstra needs at least one set"),
    };
    let n = first.dim();
    check_dim(z, n, "point")?;
    if sets.iter().any(|s| s.dim() != n) {
        return input("Dykstra sets live in different dimensions");
    }
    if !(tol > 0.0) || max_iter == 0 {
        return input("Dykstra needs tol > 0 and max_iter >= 1");
    }
    if sets.len() == 1 {
        return first.project(z);
    }
    let mut x = z.clone();
    let mut incr: Vec<Vector> = vec![Vector::zeros(n); sets.len()];
    let mut change = f64::INFINITY;
    for _ in 0..max_iter {
        let x_prev = x.clone();
        let mut incr_change = 0.0_f64;
        for (set, p) in sets.iter().zip(incr.iter_mut()) {
            let y = &x + &*p;
            let next = set.project(&y)?;
            let p_next = &y - &next;
            incr_change += (&p_next - &*p).norm_squared();
            *p = p_next;
            x = next;
        }
        change = (&x - &x_prev).norm().max(incr_change.sqrt());
        if change <= tol * (1.0 + x.norm()) {
            return Ok(x);
        }
    }
    Err(Error::Convergence {
        what: "Dykstra projection".into(),
        iterations: max_iter,
        residual: change,
    })
}
