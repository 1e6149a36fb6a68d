//! Scalar form of one cCRM step for X = {y ≥ |x|^α}, Y = {y ≤ 0} started on
//! the axis y = 0. The iterate stays on the axis, so the step reduces to a map
//! x ↦ x_next built from three foot-point roots and the equidistance relation
//! (x_next − p)(p − a) = p^α(p^α − h).

use crate::error::{input, Error, Result};
use crate::sets::epigraph_offset;

/// Intermediate quantities of the scalar step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpigraphInternals {
    /// Foot of the projection of (x, 0): x = u(1 + αu^{2(α−1)}).
    pub u: f64,
    /// Foot of the projection of (u, 0).
    pub v: f64,
    /// First coordinate of the centralized point, (u + v)/2.
    pub a: f64,
    /// Second coordinate of the centralized point, v^α/2.
    pub h: f64,
    /// Foot of the projection of (a, h): a − p = αp^{α−1}(p^α − h).
    pub p: f64,
}

/// x_next for α > 1 and x > 0.
///
/// Each foot point is computed through its offset from the query abscissa,
/// which keeps the differences a − p and x − u accurate as x → 0.
pub fn epigraph_scalar_step(alpha: f64, x: f64) -> Result<(f64, EpigraphInternals)> {
    if !(alpha.is_finite() && alpha > 1.0) {
        return input(format!("exponent must exceed 1, got {alpha}"));
    }
    if !(x.is_finite() && x > 0.0) {
        return input(format!("scalar step needs x > 0, got {x}"));
    }
    let du = epigraph_offset(x, 0.0, alpha)?;
    let u = x - du;
    let dv = epigraph_offset(u, 0.0, alpha)?;
    let v = u - dv;
    let a = x - du - 0.5 * dv;
    let h = 0.5 * v.powf(alpha);
    let dp = epigraph_offset(a, h, alpha)?;
    let p = a - dp;
    if dp == 0.0 {
        return Err(Error::Geometry(
            "centralized point lies on the graph; the step is undefined".into(),
        ));
    }
    let pa = p.powf(alpha);
    let next = p - pa * (pa - h) / dp;
    Ok((next, EpigraphInternals { u, v, a, h, p }))
}
