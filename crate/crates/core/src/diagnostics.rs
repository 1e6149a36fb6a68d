//! Quantitative diagnostics for convergence runs: rate classification,
//! boundary curvature, the tangent-hyperplane distance bound, the error-bound
//! constant ω, the Féjer factor-2 bound and the Q-quadratic constant check.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{input, Error, Result};
use crate::linalg::{orthonormal_nullspace, symmetric_eigh, Matrix, Vector};
use crate::sets::{BoundaryEval, Set};
use crate::solvers::{FeasibilityProblem, KnownConstants, SolveTrace};

/// Distances at or below `FLOOR_FACTOR · ε · scale` are treated as noise.
pub const FLOOR_FACTOR: f64 = 1e3;
/// Default sphere radii for [`estimate_omega`].
pub const OMEGA_RADII: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];
pub const OMEGA_SAMPLES: usize = 200;

const GRAD_TOL: f64 = 1e-10;
const LEVEL_TOL: f64 = 1e-8;
const TANGENT_TOL: f64 = 1e-10;
const MARGIN: f64 = 0.10;

/// Arithmetic precision of a distance sequence and the magnitude of its limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateOptions {
    /// Unit roundoff of the arithmetic that produced the distances.
    pub epsilon: f64,
    /// Usually 1 + ‖z̄‖.
    pub scale: f64,
    /// Problem-specific resolution limit. Distances at or below it are
    /// treated like distances below the roundoff floor.
    pub min_distance: f64,
}

impl Default for RateOptions {
    fn default() -> Self {
        Self {
            epsilon: f64::EPSILON,
            scale: 1.0,
            min_distance: 0.0,
        }
    }
}

impl RateOptions {
    pub fn with_limit(epsilon: f64, z_bar_norm: f64) -> Self {
        Self {
            epsilon,
            scale: 1.0 + z_bar_norm,
            min_distance: 0.0,
        }
    }

    pub fn with_min_distance(mut self, min_distance: f64) -> Self {
        self.min_distance = min_distance;
        self
    }

    pub fn floor(&self) -> f64 {
        (FLOOR_FACTOR * self.epsilon * self.scale).max(self.min_distance)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum RateClass {
    /// Successive ratios creep up toward 1.
    Sublinear,
    Linear { constant: f64 },
    Superlinear,
    Quadratic { constant: f64 },
}

impl RateClass {
    pub fn name(&self) -> &'static str {
        match self {
            RateClass::Sublinear => "sublinear",
            RateClass::Linear { .. } => "linear",
            RateClass::Superlinear => "superlinear",
            RateClass::Quadratic { .. } => "quadratic",
        }
    }

    pub fn constant(&self) -> Option<f64> {
        match self {
            RateClass::Linear { constant } | RateClass::Quadratic { constant } => Some(*constant),
            _ => None,
        }
    }
}

impl std::fmt::Display for RateClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.constant() {
            Some(c) => write!(f, "{} ({c:.3})", self.name()),
            None => f.write_str(self.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateReport {
    /// d_{k+1}/d_k for consecutive usable entries.
    pub linear_ratios: Vec<f64>,
    /// d_{k+1}/d_k².
    pub quad_ratios: Vec<f64>,
    pub classification: RateClass,
    /// Half-open index window [start, end) of distances above the floor.
    pub usable_range: (usize, usize),
    pub floor: f64,
}

/// Classifies the convergence rate of a sequence of distances to the limit.
///
/// Only the leading run of distances above the precision floor is used. The
/// tests are applied in the order quadratic, superlinear, sublinear, linear.
pub fn rate_report(distances: &[f64], opts: &RateOptions) -> Result<RateReport> {
    let floor = opts.floor();
    let end = distances
        .iter()
        .position(|d| !(d.is_finite() && *d > floor))
        .unwrap_or(distances.len());
    if end < 3 {
        return input(format!(
            "rate classification needs at least 3 distances above the floor {floor:.3e}, found {end}"
        ));
    }
    let usable = &distances[..end];
    let linear: Vec<f64> = usable.windows(2).map(|w| w[1] / w[0]).collect();
    let quad: Vec<f64> = usable.windows(2).map(|w| w[1] / (w[0] * w[0])).collect();
    let n = linear.len();
    let last = linear[n - 1];

    let q1 = quad[n - 2];
    let q2 = quad[n - 1];
    let quad_stable = (q2 - q1).abs() <= 0.2 * q1.max(q2);
    let fast = last < 0.1;
    let decreasing = {
        let from = n.saturating_sub(3);
        // a real drop, not rounding wobble around a constant ratio
        linear[from..].windows(2).all(|w| w[1] < 0.99 * w[0])
    };

    let classification = if fast && quad_stable {
        RateClass::Quadratic { constant: q2 }
    } else if fast && decreasing {
        RateClass::Superlinear
    } else if is_sublinear(&linear) {
        RateClass::Sublinear
    } else {
        let tail = &linear[n - (n / 2).clamp(1, 50)..];
        let c = (tail.iter().map(|r| r.ln()).sum::<f64>() / tail.len() as f64).exp();
        RateClass::Linear { constant: c }
    };
    Ok(RateReport {
        linear_ratios: linear,
        quad_ratios: quad,
        classification,
        usable_range: (0, end),
        floor,
    })
}

/// Ratios close to 1 whose gap to 1 keeps shrinking: between the first quarter
/// and the end of the run, 1 − r must fall by at least a quarter.
fn is_sublinear(linear: &[f64]) -> bool {
    let n = linear.len();
    if n < 8 {
        return false;
    }
    let last = linear[n - 1];
    let early = linear[n / 4];
    last > 0.9 && last < 1.0 && (1.0 - last) < 0.75 * (1.0 - early)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureValue {
    pub kappa: f64,
    /// Unit tangent vector (ambient coordinates) attaining the maximum.
    pub maximizing_direction: Vec<f64>,
}

/// κ from a boundary descriptor expressed in hull coordinates.
///
/// Returns the spectral radius of the Hessian restricted to the tangent space
/// divided by the gradient norm, together with the maximizing direction in the
/// same coordinates.
pub fn curvature_from_eval(eval: &BoundaryEval) -> Result<(f64, Vector)> {
    let gnorm = eval.grad.norm();
    if !(gnorm > GRAD_TOL) {
        return Err(Error::Regularity(format!(
            "boundary gradient vanishes (‖∇g‖ = {gnorm:.3e})"
        )));
    }
    let d = eval.grad.len();
    if d == 1 {
        return Ok((0.0, Vector::zeros(1)));
    }
    let row = Matrix::from_row_slice(1, d, eval.grad.as_slice());
    let tangent = orthonormal_nullspace(&row)?.basis;
    let reduced = tangent.transpose() * &eval.hess * &tangent;
    let eig = symmetric_eigh(&reduced)?;
    let (idx, lambda) = eig
        .values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(i, v)| (i, v.abs()))
        .expect("tangent space is nonempty");
    let dir = &tangent * eig.vectors.column(idx);
    Ok((lambda / gnorm, dir))
}

/// Curvature κ_C of the relative boundary of `set` at `z_bar`.
pub fn curvature(set: &Set, z_bar: &Vector) -> Result<CurvatureValue> {
    if !set.has_boundary_descriptor() {
        return Err(Error::Unsupported(format!(
            "a {} has no smooth boundary descriptor",
            set.kind()
        )));
    }
    let eval = set.boundary_eval(z_bar)?;
    let level = LEVEL_TOL * (1.0 + z_bar.norm()) * eval.grad.norm().max(1.0);
    if eval.g.abs() > level {
        return input(format!(
            "point is not on the boundary (g = {:.3e})",
            eval.g
        ));
    }
    let (kappa, dir) = curvature_from_eval(&eval)?;
    let ambient = match set.affine_hull() {
        Some(h) => h.basis() * dir,
        None => dir,
    };
    Ok(CurvatureValue {
        kappa,
        maximizing_direction: ambient.iter().copied().collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TangentBoundReport {
    pub kappa: f64,
    /// Largest dist(w, C)/‖w − p‖² among the checked samples.
    pub worst_ratio: f64,
    pub checked: usize,
    pub holds: bool,
}

/// Checks dist(w, C) ≤ κ_C (1 + 10%) ‖w − p‖² for samples on the tangent
/// hyperplane at `p` with ‖w − p‖ ≤ 0.1/κ_C.
pub fn tangent_bound_check(set: &Set, p: &Vector, w_samples: &[Vector]) -> Result<TangentBoundReport> {
    let kappa = curvature(set, p)?.kappa;
    let normal = set.boundary_ambient(p)?.grad;
    let normal = match set.affine_hull() {
        Some(h) => {
            let b = h.basis();
            b * (b.transpose() * normal)
        }
        None => normal,
    };
    let hull = set.affine_hull();
    let reach = if kappa > 0.0 { 0.1 / kappa } else { f64::INFINITY };
    let mut worst = 0.0f64;
    let mut checked = 0;
    let mut holds = true;
    for w in w_samples {
        let v = w - p;
        let r = v.norm();
        let mut off = normal.dot(&v).abs() / normal.norm();
        if let Some(h) = &hull {
            off = off.max(h.residual(w));
        }
        if off > TANGENT_TOL * (1.0 + r) {
            return input(format!("sample lies off the tangent hyperplane by {off:.3e}"));
        }
        if r == 0.0 || r > reach {
            continue;
        }
        let dist = set.distance(w)?;
        let ratio = dist / (r * r);
        worst = worst.max(ratio);
        checked += 1;
        if dist > kappa * (1.0 + MARGIN) * r * r + 1e-14 * (1.0 + p.norm()) {
            holds = false;
        }
    }
    Ok(TangentBoundReport {
        kappa,
        worst_ratio: worst,
        checked,
        holds,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadiusOmega {
    pub radius: f64,
    /// Minimum ratio on this sphere, if any sample was usable.
    pub min_ratio: Option<f64>,
    pub used: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OmegaEstimate {
    /// Minimum over every usable sample.
    pub omega: f64,
    pub per_radius: Vec<RadiusOmega>,
}

/// Empirical error-bound constant near `z_bar`:
/// min max(dist(z, X), dist(z, Y)) / dist(z, X ∩ Y) over random points on
/// spheres of the given radii.
///
/// Spheres lie in the common hull when the problem declares one, otherwise in
/// the ambient space. Samples with dist(z, X ∩ Y) ≤ 1e-12 are skipped.
pub fn estimate_omega(
    problem: &FeasibilityProblem,
    z_bar: &Vector,
    radii: &[f64],
    samples_per_radius: usize,
    seed: u64,
) -> Result<OmegaEstimate> {
    if z_bar.len() != problem.dim() {
        return input("z̄ has the wrong dimension");
    }
    if radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return input("radii must be positive and finite");
    }
    let basis = match &problem.common_hull {
        Some(h) => h.basis().clone(),
        None => Matrix::identity(problem.dim(), problem.dim()),
    };
    let d = basis.ncols();
    if d == 0 {
        return input("the common hull is a single point");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut per_radius = Vec::with_capacity(radii.len());
    let mut omega = f64::INFINITY;
    for &radius in radii {
        let mut best = f64::INFINITY;
        let mut used = 0;
        for _ in 0..samples_per_radius {
            let g = Vector::from_fn(d, |_, _| StandardNormal.sample(&mut rng));
            let gn = g.norm();
            if gn == 0.0 {
                continue;
            }
            let z = z_bar + &basis * (g * (radius / gn));
            let dist_int = problem.intersection_distance(&z)?;
            if dist_int <= 1e-12 {
                continue;
            }
            let (dx, dy) = problem.residuals(&z)?;
            best = best.min(dx.max(dy) / dist_int);
            used += 1;
        }
        per_radius.push(RadiusOmega {
            radius,
            min_ratio: (used > 0).then_some(best),
            used,
        });
        omega = omega.min(best);
    }
    if !omega.is_finite() {
        return Err(Error::Estimation(
            "every sample lies in (or within 1e-12 of) the intersection".into(),
        ));
    }
    Ok(OmegaEstimate { omega, per_radius })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadConstantReport {
    pub classification: RateClass,
    /// Last usable quadratic ratio of dist(z^k, X ∩ Y).
    pub observed: f64,
    /// 4 max(κ_X, κ_Y)/ω.
    pub theorem_bound: f64,
    /// max(κ_X, κ_Y)/ω.
    pub sharper_bound: f64,
    pub within_theorem: bool,
    /// Present when the limit is isolated along the run, i.e. the distance
    /// to X ∩ Y equals the distance to the limit.
    pub within_sharper: Option<bool>,
}

/// Compares the observed quadratic constant with 4κ/ω (with a 10% margin) and,
/// when `isolated_limit` holds, with κ/ω.
pub fn quad_constant_check(
    intersection_distances: &[f64],
    constants: Option<&KnownConstants>,
    isolated_limit: bool,
    opts: &RateOptions,
) -> Result<QuadConstantReport> {
    let Some(c) = constants else {
        return input("curvature and error-bound constants are required");
    };
    if !(c.omega > 0.0) || c.kappa_x < 0.0 || c.kappa_y < 0.0 {
        return input("constants must satisfy κ ≥ 0 and ω > 0");
    }
    let report = rate_report(intersection_distances, opts)?;
    let observed = *report.quad_ratios.last().expect("at least two ratios");
    let sharper = c.kappa() / c.omega;
    let theorem = 4.0 * sharper;
    Ok(QuadConstantReport {
        classification: report.classification,
        observed,
        theorem_bound: theorem,
        sharper_bound: sharper,
        within_theorem: observed <= theorem * (1.0 + MARGIN),
        within_sharper: isolated_limit.then_some(observed <= sharper * (1.0 + MARGIN)),
    })
}

/// Runs [`quad_constant_check`] on a solver trace, measuring dist(z^k, X ∩ Y)
/// with the Dykstra projector and deciding isolation by comparing it with the
/// distance to the reference solution.
pub fn quad_constant_check_trace(
    trace: &SolveTrace,
    problem: &FeasibilityProblem,
    opts: &RateOptions,
) -> Result<QuadConstantReport> {
    let z_bar = problem
        .reference_solution
        .as_ref()
        .ok_or_else(|| Error::Input("the problem has no reference solution".into()))?;
    let mut dists = Vec::with_capacity(trace.len());
    let mut isolated = true;
    for z in &trace.iterates {
        let d = problem.intersection_distance(z)?;
        let r = (z - z_bar).norm();
        if d > opts.floor() && (r - d).abs() > 1e-6 * r {
            isolated = false;
        }
        dists.push(d);
    }
    quad_constant_check(&dists, problem.known_constants.as_ref(), isolated, opts)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FejerReport {
    /// Largest ‖z^k − z̄‖ / dist(z^k, X ∩ Y) over iterates off the intersection.
    pub max_factor: f64,
    /// Largest ‖z^k − z̄‖ − 2 dist(z^k, X ∩ Y).
    pub worst_excess: f64,
    pub checked: usize,
    pub holds: bool,
}

/// Checks ‖z^k − z̄‖ ≤ 2 dist(z^k, X ∩ Y) + 1e-9 along a trace.
pub fn fejer_bound_check<F>(trace: &SolveTrace, z_bar: &Vector, mut intersection_distance: F) -> Result<FejerReport>
where
    F: FnMut(&Vector) -> Result<f64>,
{
    let mut max_factor = 0.0f64;
    let mut worst = f64::NEG_INFINITY;
    for z in &trace.iterates {
        let r = (z - z_bar).norm();
        let d = intersection_distance(z)?;
        worst = worst.max(r - 2.0 * d);
        if d > 0.0 {
            max_factor = max_factor.max(r / d);
        }
    }
    Ok(FejerReport {
        max_factor,
        worst_excess: worst,
        checked: trace.len(),
        holds: worst <= 1e-9,
    })
}
