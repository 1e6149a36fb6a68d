//! Generic small-vector versions of the oracles, the circumcenter and the
//! three iterations, instantiated for f64 and for double-double numbers.
//!
//! Only the set families needed by the reproduction tables are covered:
//! halfspaces, hyperplanes, discs lying in a coordinate plane and the power
//! epigraph.

use super::Real;
use crate::error::{input, Error, Result};
use crate::sets::epigraph_offset;
use crate::solvers::{Method, Termination};

pub type Point<T> = Vec<T>;

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + *x * *y)
}

pub fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

fn sub<T: Real>(a: &[T], b: &[T]) -> Point<T> {
    a.iter().zip(b).map(|(x, y)| *x - *y).collect()
}

fn axpy<T: Real>(a: &[T], s: T, b: &[T]) -> Point<T> {
    a.iter().zip(b).map(|(x, y)| *x + s * *y).collect()
}

pub fn distance<T: Real>(a: &[T], b: &[T]) -> T {
    norm(&sub(a, b))
}

fn max<T: Real>(a: T, b: T) -> T {
    if a >= b {
        a
    } else {
        b
    }
}

/// Sets with projections implemented for any [`Real`].
#[derive(Debug, Clone)]
pub enum ExactSet<T> {
    /// {z : ⟨normal, z⟩ ≤ offset}.
    Halfspace { normal: Point<T>, offset: T },
    /// {z : ⟨normal, z⟩ = offset}.
    Hyperplane { normal: Point<T>, offset: T },
    /// Disc of the plane {z_axis = center_axis}.
    PlanarDisc { center: Point<T>, radius: T, axis: usize },
    /// {(x, y) : y ≥ |x|^α − β}.
    PowerEpigraph { alpha: f64, beta: T },
}

impl<T: Real> ExactSet<T> {
    pub fn dim(&self) -> usize {
        match self {
            ExactSet::Halfspace { normal, .. } | ExactSet::Hyperplane { normal, .. } => normal.len(),
            ExactSet::PlanarDisc { center, .. } => center.len(),
            ExactSet::PowerEpigraph { .. } => 2,
        }
    }

    pub fn project(&self, z: &[T]) -> Result<Point<T>> {
        if z.len() != self.dim() {
            return input(format!("point has dimension {}, expected {}", z.len(), self.dim()));
        }
        match self {
            ExactSet::Halfspace { normal, offset } => {
                let excess = dot(normal, z) - *offset;
                if excess <= T::zero() {
                    Ok(z.to_vec())
                } else {
                    Ok(axpy(z, -(excess / dot(normal, normal)), normal))
                }
            }
            ExactSet::Hyperplane { normal, offset } => {
                let excess = dot(normal, z) - *offset;
                Ok(axpy(z, -(excess / dot(normal, normal)), normal))
            }
            ExactSet::PlanarDisc { center, radius, axis } => {
                let mut w = z.to_vec();
                w[*axis] = center[*axis];
                let d = sub(&w, center);
                let r = norm(&d);
                if r <= *radius {
                    Ok(w)
                } else {
                    Ok(axpy(center, *radius / r, &d))
                }
            }
            ExactSet::PowerEpigraph { alpha, beta } => {
                let (x, y) = (z[0], z[1]);
                let ax = x.abs();
                let yp = y + *beta;
                if yp >= ax.powf(*alpha) {
                    return Ok(z.to_vec());
                }
                let delta = epigraph_offset_real(ax, yp, *alpha)?;
                let u = ax - delta;
                let sx = if x < T::zero() { -u } else { u };
                Ok(vec![sx, u.powf(*alpha) - *beta])
            }
        }
    }

    pub fn reflect(&self, z: &[T]) -> Result<Point<T>> {
        let p = self.project(z)?;
        Ok(p.iter().zip(z).map(|(pi, zi)| *pi + *pi - *zi).collect())
    }

    pub fn distance(&self, z: &[T]) -> Result<T> {
        Ok(distance(&self.project(z)?, z))
    }
}

/// The offset root of the epigraph projection refined in the working precision
/// from a double-precision start.
pub fn epigraph_offset_real<T: Real>(ax: T, yp: T, alpha: f64) -> Result<T> {
    if ax.is_zero() {
        return Ok(T::zero());
    }
    let start = epigraph_offset(ax.to_f64(), yp.to_f64(), alpha)?;
    let mut d = T::from_f64(start);
    let a = T::from_f64(alpha);
    for _ in 0..40 {
        let u = ax - d;
        if u <= T::zero() {
            break;
        }
        let ua1 = u.powf(alpha - 1.0);
        let gap = ua1 * u - yp;
        let val = d - a * ua1 * gap;
        let dval = T::one() + a * T::from_f64(alpha - 1.0) * (ua1 / u) * gap + a * a * ua1 * ua1;
        let step = val / dval;
        d = d - step;
        if step.abs() <= T::from_f64(4.0 * T::EPSILON) * d.abs() {
            break;
        }
    }
    if d < T::zero() {
        d = T::zero();
    }
    if d > ax {
        d = ax;
    }
    Ok(d)
}

/// Circumcenter by modified Gram–Schmidt, with tolerances scaled to the precision.
pub fn circumcenter_real<T: Real>(points: &[Point<T>]) -> Result<Point<T>> {
    let scale = T::EPSILON / f64::EPSILON;
    let first = match points.first() {
        Some(p) => p,
        None => return input("circumcenter of an empty point set"),
    };
    let mut diameter = T::zero();
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            diameter = max(diameter, distance(&points[i], &points[j]));
        }
    }
    if diameter.is_zero() {
        return Ok(first.clone());
    }
    let merge = T::from_f64(1e-12 * scale) * diameter;
    let mut kept: Vec<&Point<T>> = Vec::new();
    for p in points {
        if kept.iter().all(|q| distance(p, q) > merge) {
            kept.push(p);
        }
    }
    if kept.len() == 1 {
        return Ok(first.clone());
    }
    let base = kept[0];
    let mut q_cols: Vec<Point<T>> = Vec::new();
    let mut r_cols: Vec<Vec<T>> = Vec::new();
    let mut dependent = Vec::new();
    for p in &kept[1..] {
        let v = sub(p, base);
        let vnorm = norm(&v);
        let mut w = v.clone();
        let mut coef = vec![T::zero(); q_cols.len()];
        for _ in 0..2 {
            for (i, q) in q_cols.iter().enumerate() {
                let c = dot(q, &w);
                coef[i] = coef[i] + c;
                w = axpy(&w, -c, q);
            }
        }
        let wnorm = norm(&w);
        if wnorm <= T::from_f64(1e-12 * scale) * vnorm {
            dependent.push(*p);
            continue;
        }
        coef.push(wnorm);
        q_cols.push(w.iter().map(|x| *x / wnorm).collect());
        r_cols.push(coef);
    }
    let k = q_cols.len();
    let mut y = vec![T::zero(); k];
    for j in 0..k {
        let vj_sq = r_cols[j].iter().fold(T::zero(), |acc, c| acc + *c * *c);
        let mut rhs = vj_sq * T::from_f64(0.5);
        for i in 0..j {
            rhs = rhs - r_cols[j][i] * y[i];
        }
        y[j] = rhs / r_cols[j][j];
    }
    let mut center = base.clone();
    for (q, yi) in q_cols.iter().zip(&y) {
        center = axpy(&center, *yi, q);
    }
    let radius = distance(&center, base);
    for p in dependent {
        let gap = (distance(&center, p) - radius).abs();
        if gap > T::from_f64(1e-9 * scale) * (T::one() + diameter) {
            return Err(Error::Geometry("distinct affinely dependent points".into()));
        }
    }
    Ok(center)
}

/// A two-set problem over [`ExactSet`]s.
#[derive(Debug, Clone)]
pub struct ExactProblem<T> {
    pub x: ExactSet<T>,
    pub y: ExactSet<T>,
    pub reference: Option<Point<T>>,
}

impl<T: Real> ExactProblem<T> {
    pub fn new(x: ExactSet<T>, y: ExactSet<T>) -> Result<Self> {
        if x.dim() != y.dim() {
            return input("sets live in different dimensions");
        }
        Ok(Self { x, y, reference: None })
    }

    pub fn with_reference(mut self, r: Point<T>) -> Self {
        self.reference = Some(r);
        self
    }

    pub fn ccrm_step(&self, z: &[T]) -> Result<Point<T>> {
        let w = self.y.project(&self.x.project(z)?)?;
        let pxw = self.x.project(&w)?;
        let half = T::from_f64(0.5);
        let zc: Point<T> = w.iter().zip(&pxw).map(|(a, b)| (*a + *b) * half).collect();
        let rx = self.x.reflect(&zc)?;
        let ry = self.y.reflect(&zc)?;
        circumcenter_real(&[zc, rx, ry])
    }

    pub fn map_step(&self, z: &[T]) -> Result<Point<T>> {
        self.y.project(&self.x.project(z)?)
    }

    pub fn crm_step(&self, z: &[T]) -> Result<Point<T>> {
        let rx = self.x.reflect(z)?;
        let ryrx = self.y.reflect(&rx)?;
        circumcenter_real(&[z.to_vec(), rx, ryrx])
    }

    pub fn step(&self, method: Method, z: &[T]) -> Result<Point<T>> {
        match method {
            Method::Ccrm => self.ccrm_step(z),
            Method::Map => self.map_step(z),
            Method::Crm => self.crm_step(z),
        }
    }

    pub fn residuals(&self, z: &[T]) -> Result<(T, T)> {
        Ok((self.x.distance(z)?, self.y.distance(z)?))
    }
}

#[derive(Debug, Clone)]
pub struct ExactTrace<T> {
    pub iterates: Vec<Point<T>>,
    pub residuals: Vec<(T, T)>,
    pub distances_to_reference: Option<Vec<T>>,
    pub termination: Termination,
}

impl<T: Real> ExactTrace<T> {
    /// Distances to the reference converted to f64.
    pub fn reference_distances_f64(&self) -> Option<Vec<f64>> {
        self.distances_to_reference
            .as_ref()
            .map(|d| d.iter().map(|x| x.to_f64()).collect())
    }
}

/// Same control flow as [`crate::solvers::run`], in the working precision.
pub fn run_exact<T: Real>(
    problem: &ExactProblem<T>,
    method: Method,
    z0: &[T],
    max_iter: usize,
    tol_feas: f64,
) -> Result<ExactTrace<T>> {
    if z0.len() != problem.x.dim() {
        return input("starting point has the wrong dimension");
    }
    if !(tol_feas > 0.0) || max_iter == 0 {
        return input("need tol_feas > 0 and max_iter >= 1");
    }
    let tol = T::from_f64(tol_feas);
    let mut trace = ExactTrace {
        iterates: vec![z0.to_vec()],
        residuals: vec![problem.residuals(z0)?],
        distances_to_reference: problem.reference.as_ref().map(|r| vec![distance(z0, r)]),
        termination: Termination::MaxIter,
    };
    let mut z = z0.to_vec();
    let mut steps = 0;
    loop {
        let (dx, dy) = *trace.residuals.last().expect("nonempty");
        if max(dx, dy) <= tol {
            trace.termination = Termination::Feasible;
            break;
        }
        if steps == max_iter {
            break;
        }
        let next = match problem.step(method, &z) {
            Ok(n) => n,
            Err(Error::Geometry(_)) => {
                trace.termination = Termination::Stagnation;
                break;
            }
            Err(e) => return Err(e),
        };
        if distance(&next, &z) <= T::from_f64(T::STEP_TOL) * (T::one() + norm(&z)) {
            trace.termination = Termination::Stagnation;
            break;
        }
        trace.residuals.push(problem.residuals(&next)?);
        if let (Some(list), Some(r)) = (trace.distances_to_reference.as_mut(), problem.reference.as_ref()) {
            list.push(distance(&next, r));
        }
        trace.iterates.push(next.clone());
        z = next;
        steps += 1;
    }
    Ok(trace)
}
