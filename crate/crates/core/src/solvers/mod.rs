//! Iteration engines for the two-set feasibility problem: the centralized
//! circumcentered-reflection method (cCRM) together with alternating
//! projections (MAP) and the plain circumcentered-reflection method (CRM).

mod epigraph_scalar;
mod isometry;

pub use epigraph_scalar::{epigraph_scalar_step, EpigraphInternals};
pub use isometry::{isometry_reduce, IsometryReduction};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::circumcenter::{circumcenter, CircumStatus};
use crate::error::{input, Error, Result};
use crate::linalg::{check_dim, check_finite_vec, Vector};
use crate::sets::{dykstra_project, AffineSubspace, Set, DYKSTRA_MAX_ITER};

/// Tolerance of the Dykstra projector used for dist(z, X ∩ Y).
pub const INTERSECTION_TOL: f64 = 1e-13;
/// Residual allowed when checking that oracles respect a declared hull.
const HULL_TOL: f64 = 1e-9;

/// Curvatures of the two boundaries at the limit and the error-bound constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KnownConstants {
    pub kappa_x: f64,
    pub kappa_y: f64,
    pub omega: f64,
}

impl KnownConstants {
    pub fn kappa(&self) -> f64 {
        self.kappa_x.max(self.kappa_y)
    }
}

/// Find z ∈ X ∩ Y.
#[derive(Debug, Clone)]
pub struct FeasibilityProblem {
    pub x: Set,
    pub y: Set,
    /// Common affine hull L = aff(X) = aff(Y), when known.
    pub common_hull: Option<AffineSubspace>,
    pub reference_solution: Option<Vector>,
    pub known_constants: Option<KnownConstants>,
}

impl FeasibilityProblem {
    pub fn new(x: Set, y: Set) -> Result<Self> {
        if x.dim() != y.dim() {
            return input(format!("X has dimension {} but Y has dimension {}", x.dim(), y.dim()));
        }
        Ok(Self {
            x,
            y,
            common_hull: None,
            reference_solution: None,
            known_constants: None,
        })
    }

    /// Declares the common affine hull, checking that both projections land in it.
    pub fn with_hull(mut self, hull: AffineSubspace) -> Result<Self> {
        let n = self.dim();
        if hull.ambient_dim() != n {
            return input("hull and sets live in different dimensions");
        }
        let mut probes = vec![hull.anchor().clone()];
        for i in 0..n {
            let mut e = hull.anchor().clone();
            e[i] += 1.0;
            probes.push(e);
        }
        for z in &probes {
            for set in [&self.x, &self.y] {
                let p = set.project(z)?;
                if hull.residual(&p) > HULL_TOL * (1.0 + p.norm()) {
                    return input(format!(
                        "projection onto a {} leaves the declared hull",
                        set.kind()
                    ));
                }
            }
        }
        self.common_hull = Some(hull);
        Ok(self)
    }

    pub fn with_reference(mut self, z: Vector) -> Result<Self> {
        check_dim(&z, self.dim(), "reference solution")?;
        check_finite_vec(&z, "reference solution")?;
        self.reference_solution = Some(z);
        Ok(self)
    }

    pub fn with_constants(mut self, constants: KnownConstants) -> Self {
        self.known_constants = Some(constants);
        self
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    /// (dist(z, X), dist(z, Y)).
    pub fn residuals(&self, z: &Vector) -> Result<(f64, f64)> {
        Ok((self.x.distance(z)?, self.y.distance(z)?))
    }

    /// Projection onto X ∩ Y by Dykstra's algorithm.
    pub fn project_intersection(&self, z: &Vector) -> Result<Vector> {
        dykstra_project(
            &[self.x.clone(), self.y.clone()],
            z,
            INTERSECTION_TOL,
            DYKSTRA_MAX_ITER,
        )
    }

    pub fn intersection_distance(&self, z: &Vector) -> Result<f64> {
        Ok((self.project_intersection(z)? - z).norm())
    }

    /// Centralized point z_C = ½(P_Y P_X z + P_X P_Y P_X z).
    pub fn centralized_point(&self, z: &Vector) -> Result<Vector> {
        let w = self.y.project(&self.x.project(z)?)?;
        let pxw = self.x.project(&w)?;
        Ok((w + pxw) * 0.5)
    }

    /// One cCRM step: circumcenter of {z_C, R_X z_C, R_Y z_C}.
    ///
    /// The triangle is formed relative to z_C from the projection
    /// displacements, so short legs next to long ones keep their digits.
    pub fn ccrm_step(&self, z: &Vector) -> Result<CcrmStep> {
        let zc = self.centralized_point(z)?;
        let dx = self.x.displacement(&zc)? * 2.0;
        let dy = self.y.displacement(&zc)? * 2.0;
        let c = circumcenter(&[Vector::zeros(zc.len()), dx, dy])?;
        Ok(CcrmStep {
            next: &zc + c.center,
            centralized: zc,
            status: c.status,
        })
    }

    /// One MAP step: P_Y P_X z.
    pub fn map_step(&self, z: &Vector) -> Result<Vector> {
        self.y.project(&self.x.project(z)?)
    }

    /// One CRM step: circumcenter of {z, R_X z, R_Y R_X z}.
    pub fn crm_step(&self, z: &Vector) -> Result<(Vector, CircumStatus)> {
        let dx = self.x.displacement(z)? * 2.0;
        let rx = z + &dx;
        let dy = self.y.displacement(&rx)? * 2.0;
        let c = circumcenter(&[Vector::zeros(z.len()), dx.clone(), dx + dy])?;
        Ok((z + c.center, c.status))
    }
}

#[derive(Debug, Clone)]
pub struct CcrmStep {
    pub next: Vector,
    pub centralized: Vector,
    pub status: CircumStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Ccrm,
    Map,
    Crm,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Map, Method::Crm, Method::Ccrm];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Ccrm => "ccrm",
            Method::Map => "map",
            Method::Crm => "crm",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ccrm" => Ok(Method::Ccrm),
            "map" => Ok(Method::Map),
            "crm" => Ok(Method::Crm),
            other => input(format!("unknown method '{other}' (expected ccrm, map or crm)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub method: Method,
    pub max_iter: usize,
    /// Stop when max(dist(z, X), dist(z, Y)) ≤ tol_feas.
    pub tol_feas: f64,
    /// Stop when ‖z⁺ − z‖ ≤ tol_step·(1 + ‖z‖).
    pub tol_step: f64,
    pub record_internals: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            method: Method::Ccrm,
            max_iter: 10_000,
            tol_feas: 1e-12,
            tol_step: 1e-15,
            record_internals: false,
        }
    }
}

impl SolverConfig {
    pub fn with_method(method: Method) -> Self {
        Self {
            method,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol_feas > 0.0 && self.tol_feas.is_finite()) {
            return input("tol_feas must be positive");
        }
        if !(self.tol_step >= 0.0 && self.tol_step.is_finite()) {
            return input("tol_step must be nonnegative");
        }
        if self.max_iter == 0 {
            return input("max_iter must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Feasible,
    MaxIter,
    /// The step fell below the stagnation guard, or the circumcenter became
    /// numerically undefined at the precision floor.
    Stagnation,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::Feasible => "feasible",
            Termination::MaxIter => "max_iter",
            Termination::Stagnation => "stagnation",
        }
    }
}

/// Record of a solver run. Per-step internals, when recorded, are indexed by
/// the step k → k+1 and therefore have one entry fewer than `iterates`.
#[derive(Debug, Clone)]
pub struct SolveTrace {
    pub method: Method,
    pub iterates: Vec<Vector>,
    pub centralized_points: Option<Vec<Vector>>,
    pub circum_status: Option<Vec<CircumStatus>>,
    pub residuals: Vec<(f64, f64)>,
    pub distances_to_reference: Option<Vec<f64>>,
    pub termination: Termination,
}

impl SolveTrace {
    pub fn len(&self) -> usize {
        self.iterates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.iterates.is_empty()
    }

    pub fn last(&self) -> &Vector {
        self.iterates.last().expect("a trace holds at least the starting point")
    }

    pub fn max_residuals(&self) -> Vec<f64> {
        self.residuals.iter().map(|(a, b)| a.max(*b)).collect()
    }
}

/// Iterates the configured method from `z0`.
///
/// Hitting `max_iter` is reported through the termination flag. A circumcenter
/// geometry error inside a run can only arise from rounding once the three
/// points are numerically collinear, so it ends the run as stagnation.
pub fn run(problem: &FeasibilityProblem, config: &SolverConfig, z0: &Vector) -> Result<SolveTrace> {
    config.validate()?;
    check_dim(z0, problem.dim(), "starting point")?;
    check_finite_vec(z0, "starting point")?;

    let record = config.record_internals;
    let mut trace = SolveTrace {
        method: config.method,
        iterates: vec![z0.clone()],
        centralized_points: (record && config.method == Method::Ccrm).then(Vec::new),
        circum_status: (record && config.method != Method::Map).then(Vec::new),
        residuals: vec![problem.residuals(z0)?],
        distances_to_reference: problem
            .reference_solution
            .as_ref()
            .map(|r| vec![(z0 - r).norm()]),
        termination: Termination::MaxIter,
    };

    let mut z = z0.clone();
    let mut steps = 0;
    loop {
        let (dx, dy) = *trace.residuals.last().expect("nonempty");
        if dx.max(dy) <= config.tol_feas {
            trace.termination = Termination::Feasible;
            break;
        }
        if steps == config.max_iter {
            trace.termination = Termination::MaxIter;
            break;
        }
        let outcome = match config.method {
            Method::Ccrm => problem
                .ccrm_step(&z)
                .map(|s| (s.next, Some(s.centralized), Some(s.status))),
            Method::Map => problem.map_step(&z).map(|n| (n, None, None)),
            Method::Crm => problem.crm_step(&z).map(|(n, s)| (n, None, Some(s))),
        };
        let (next, zc, status) = match outcome {
            Ok(o) => o,
            Err(Error::Geometry(_)) => {
                trace.termination = Termination::Stagnation;
                break;
            }
            Err(e) => return Err(e),
        };
        if (&next - &z).norm() <= config.tol_step * (1.0 + z.norm()) {
            trace.termination = Termination::Stagnation;
            break;
        }
        if let (Some(list), Some(zc)) = (trace.centralized_points.as_mut(), zc) {
            list.push(zc);
        }
        if let (Some(list), Some(s)) = (trace.circum_status.as_mut(), status) {
            list.push(s);
        }
        trace.residuals.push(problem.residuals(&next)?);
        if let (Some(list), Some(r)) = (trace.distances_to_reference.as_mut(), problem.reference_solution.as_ref()) {
            list.push((&next - r).norm());
        }
        trace.iterates.push(next.clone());
        z = next;
        steps += 1;
    }
    Ok(trace)
}

#[cfg(test)]
mod tests;
