//! Ready-made feasibility problems with their analytic reference data.
//!
//! Every entry can be addressed by a short name with optional parameters,
//! `name:key=val,key=val`, through [`by_name`].

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::diagnostics::RateClass;
use crate::error::{input, Error, Result};
use crate::linalg::{smat, svec, svec_identity, svec_len, symmetric_eigh, Matrix, Vector};
use crate::sets::{dykstra_project, AffineSubspace, Set, DYKSTRA_MAX_ITER};
use crate::solvers::{FeasibilityProblem, KnownConstants, Method};

/// Names accepted by [`by_name`].
pub const NAMES: [&str; 7] = [
    "discs3d",
    "ellipses",
    "epigraph",
    "eq_ellipsoids",
    "socp",
    "sdp",
    "fixed_trace",
];

/// Rate a method is expected to show on an entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum ExpectedRate {
    Sublinear,
    Linear { constant: Option<f64> },
    Superlinear,
    Quadratic,
}

impl ExpectedRate {
    pub fn name(&self) -> &'static str {
        match self {
            ExpectedRate::Sublinear => "sublinear",
            ExpectedRate::Linear { .. } => "linear",
            ExpectedRate::Superlinear => "superlinear",
            ExpectedRate::Quadratic => "quadratic",
        }
    }

    /// Whether an observed classification is the expected class, with a
    /// linear constant (when one is stated) reproduced within 0.01.
    pub fn matches(&self, observed: &RateClass) -> bool {
        match (self, observed) {
            (ExpectedRate::Linear { constant: Some(c) }, RateClass::Linear { constant }) => (c - constant).abs() <= 1e-2,
            _ => self.name() == observed.name(),
        }
    }
}

/// Expected rates for MAP, CRM and cCRM.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ExpectedRates {
    pub map: Option<ExpectedRate>,
    pub crm: Option<ExpectedRate>,
    pub ccrm: Option<ExpectedRate>,
}

impl ExpectedRates {
    pub fn get(&self, method: Method) -> Option<ExpectedRate> {
        match method {
            Method::Map => self.map,
            Method::Crm => self.crm,
            Method::Ccrm => self.ccrm,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    /// Reference limit, curvatures and error-bound constant live on the problem.
    pub problem: FeasibilityProblem,
    pub suggested_z0: Vector,
    pub expected: ExpectedRates,
    /// Issues found while building the entry, such as a failed Slater probe.
    pub warnings: Vec<String>,
}

impl CatalogEntry {
    pub fn reference(&self) -> Option<&Vector> {
        self.problem.reference_solution.as_ref()
    }
}

fn v(x: &[f64]) -> Vector {
    Vector::from_column_slice(x)
}

/// Error-bound constant of two smooth boundaries crossing at a point where
/// their outward unit normals make the given inner product: the cosine of
/// half the angle between the normals.
pub fn corner_omega(normal_inner_product: f64) -> f64 {
    ((1.0 + normal_inner_product) / 2.0).sqrt()
}

/// Two radius-2 discs in the plane z₃ = 0 of R³ with centers √15 apart.
pub fn discs3d() -> Result<CatalogEntry> {
    let s15 = 15f64.sqrt();
    let plane = AffineSubspace::coordinate_plane(3, 2, 0.0)?;
    let x = Set::ball_in_affine(v(&[0.0, 0.0, 0.0]), 2.0, plane.clone())?;
    let y = Set::ball_in_affine(v(&[s15, 0.0, 0.0]), 2.0, plane.clone())?;
    // unit normals (√15/4, 1/4) and (−√15/4, 1/4) at z̄
    let omega = corner_omega(-15.0 / 16.0 + 1.0 / 16.0);
    let problem = FeasibilityProblem::new(x, y)?
        .with_hull(plane)?
        .with_reference(v(&[s15 / 2.0, 0.5, 0.0]))?
        .with_constants(KnownConstants {
            kappa_x: 0.5,
            kappa_y: 0.5,
            omega,
        });
    Ok(CatalogEntry {
        name: "discs3d".into(),
        problem,
        suggested_z0: v(&[s15 / 2.0, 4.0, 0.5]),
        expected: ExpectedRates {
            ccrm: Some(ExpectedRate::Quadratic),
            ..Default::default()
        },
        warnings: Vec::new(),
    })
}

/// Curvature of the ellipse x²/4 + y² = 1 at (2 cos t, sin t).
pub fn ellipse_curvature(t: f64) -> f64 {
    2.0 / (4.0 * t.sin().powi(2) + t.cos().powi(2)).powf(1.5)
}

/// X = {x²/4 + y² ≤ 1} and Y = {(x − 1)² + y²/4 ≤ 1} in the plane z₃ = 0.
///
/// The boundaries touch at (2, 0, 0) and cross at (2/15, ±√224/15, 0), where
/// the lens has an obtuse interior angle. Projections near the lens therefore
/// land in the other set and every method stops after finitely many steps, so
/// no rate is attached. The limit depends on the start, so there is no reference
/// point either.
pub fn ellipses() -> Result<CatalogEntry> {
    let plane = AffineSubspace::coordinate_plane(3, 2, 0.0)?;
    let x = Set::ellipsoid_in_affine(
        Matrix::from_diagonal(&v(&[0.25, 1.0, 1.0])),
        v(&[0.0, 0.0, 0.0]),
        plane.clone(),
    )?;
    let y = Set::ellipsoid_in_affine(
        Matrix::from_diagonal(&v(&[1.0, 0.25, 1.0])),
        v(&[1.0, 0.0, 0.0]),
        plane.clone(),
    )?;
    Ok(CatalogEntry {
        name: "ellipses".into(),
        problem: FeasibilityProblem::new(x, y)?.with_hull(plane)?,
        suggested_z0: v(&[0.0, 1.25, 0.5]),
        expected: ExpectedRates::default(),
        warnings: Vec::new(),
    })
}

/// Which second set accompanies the power epigraph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum YVariant {
    /// Y = {y ≤ 0}.
    Halfplane,
    /// Y′ = {y = 0}.
    Line,
}

impl YVariant {
    pub const ALL: [YVariant; 2] = [YVariant::Halfplane, YVariant::Line];

    pub fn as_str(self) -> &'static str {
        match self {
            YVariant::Halfplane => "halfplane",
            YVariant::Line => "line",
        }
    }
}

impl std::str::FromStr for YVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "halfplane" | "Y" => Ok(YVariant::Halfplane),
            "line" | "Y'" => Ok(YVariant::Line),
            other => input(format!("unknown epigraph variant '{other}' (halfplane or line)")),
        }
    }
}

/// Starting point used for the epigraph family: (0.5, 0) when β = 0, else
/// (1.2 β^{1/α}, 0), a point of Y′ just outside X.
pub fn epigraph_start(alpha: f64, beta: f64) -> [f64; 2] {
    if beta == 0.0 {
        [0.5, 0.0]
    } else {
        [1.2 * beta.powf(1.0 / alpha), 0.0]
    }
}

/// Limit of every method from [`epigraph_start`]: the crossing (β^{1/α}, 0).
pub fn epigraph_limit(alpha: f64, beta: f64) -> [f64; 2] {
    [beta.powf(1.0 / alpha), 0.0]
}

/// Smallest distance to the limit at which an epigraph step still carries
/// information in arithmetic with unit roundoff `epsilon`.
///
/// At β = 0 the foot of (x, 0) on the curve sits about αx^{2α−1} away from x
/// horizontally. Once that offset drops below roughly 1e3·ε·x the projection
/// returns x itself and every method stalls, so rate estimates must stop
/// there. For β > 0 the usual roundoff floor already applies.
pub fn epigraph_resolution(alpha: f64, beta: f64, epsilon: f64) -> f64 {
    if beta == 0.0 {
        (crate::diagnostics::FLOOR_FACTOR * epsilon / alpha).powf(1.0 / (2.0 * alpha - 2.0))
    } else {
        0.0
    }
}

/// Expected rates for the epigraph family.
pub fn epigraph_expected(alpha: f64, beta: f64) -> ExpectedRates {
    if beta == 0.0 {
        let c = Some(1.0 - 1.0 / alpha);
        ExpectedRates {
            map: Some(ExpectedRate::Sublinear),
            crm: Some(ExpectedRate::Linear { constant: c }),
            ccrm: Some(ExpectedRate::Linear { constant: c }),
        }
    } else {
        ExpectedRates {
            map: Some(ExpectedRate::Linear { constant: None }),
            crm: Some(ExpectedRate::Superlinear),
            ccrm: Some(if alpha >= 2.0 {
                ExpectedRate::Quadratic
            } else {
                ExpectedRate::Superlinear
            }),
        }
    }
}

/// X = {(x, y) : y ≥ |x|^α − β} with Y = {y ≤ 0} or Y′ = {y = 0}.
pub fn epigraph(alpha: f64, beta: f64, variant: YVariant) -> Result<CatalogEntry> {
    if !(alpha > 1.0) || !alpha.is_finite() {
        return input(format!("epigraph exponent must exceed 1, got {alpha}"));
    }
    if !(beta >= 0.0) || !beta.is_finite() {
        return input(format!("epigraph shift must be nonnegative, got {beta}"));
    }
    let x = Set::power_epigraph(alpha, beta)?;
    let y = match variant {
        YVariant::Halfplane => Set::halfspace(v(&[0.0, 1.0]), 0.0)?,
        YVariant::Line => Set::hyperplane(v(&[0.0, 1.0]), 0.0)?,
    };
    let mut problem = FeasibilityProblem::new(x, y)?.with_reference(v(&epigraph_limit(alpha, beta)))?;
    if beta > 0.0 {
        let x0 = beta.powf(1.0 / alpha);
        let slope = alpha * x0.powf(alpha - 1.0);
        let curv = alpha * (alpha - 1.0) * x0.powf(alpha - 2.0) / (1.0 + slope * slope).powf(1.5);
        problem = problem.with_constants(KnownConstants {
            kappa_x: curv,
            kappa_y: 0.0,
            omega: corner_omega(-1.0 / (1.0 + slope * slope).sqrt()),
        });
    }
    Ok(CatalogEntry {
        name: format!("epigraph:a={alpha},b={beta},y={}", variant.as_str()),
        problem,
        suggested_z0: v(&epigraph_start(alpha, beta)),
        expected: epigraph_expected(alpha, beta),
        warnings: Vec::new(),
    })
}

/// Ellipsoid {z : ‖B(z − c)‖ ≤ r}.
#[derive(Debug, Clone)]
pub struct EllipsoidSpec {
    pub map: Matrix,
    pub center: Vector,
    pub radius: f64,
}

impl EllipsoidSpec {
    /// Shape matrix Q with the set written as (z − c)ᵀQ(z − c) ≤ 1.
    pub fn shape(&self) -> Matrix {
        self.map.transpose() * &self.map / (self.radius * self.radius)
    }
}

/// Two ellipsoids sliced by L = {Az = b}, each sliced set realized exactly as
/// an ellipsoid of L.
///
/// A Slater point is sought with a Dykstra probe on the ellipsoids shrunk by
/// 0.1%; failure is recorded as a warning.
pub fn eq_constrained_ellipsoids(a: &Matrix, b: &Vector, first: &EllipsoidSpec, second: &EllipsoidSpec) -> Result<CatalogEntry> {
    let n = first.center.len();
    if a.ncols() != n && a.nrows() > 0 {
        return input("constraint matrix and ellipsoids have different dimensions");
    }
    let hull = if a.nrows() == 0 {
        AffineSubspace::whole_space(n)
    } else {
        AffineSubspace::with_full_row_rank(a.clone(), b.clone())?
    };
    let x = Set::ellipsoid_in_affine(first.shape(), first.center.clone(), hull.clone())?;
    let y = Set::ellipsoid_in_affine(second.shape(), second.center.clone(), hull.clone())?;
    let mut warnings = Vec::new();
    let shrunk = |e: &EllipsoidSpec| Set::ellipsoid_in_affine(e.shape() / 0.998, e.center.clone(), hull.clone());
    match (shrunk(first), shrunk(second)) {
        (Ok(sx), Ok(sy)) => {
            let start = hull.project(&((&first.center + &second.center) * 0.5))?;
            match dykstra_project(&[sx.clone(), sy.clone()], &start, 1e-12, DYKSTRA_MAX_ITER) {
                Ok(p) if sx.distance(&p)? <= 1e-9 && sy.distance(&p)? <= 1e-9 => {}
                _ => warnings.push("Slater probe failed: no strictly feasible point found".into()),
            }
        }
        _ => warnings.push("Slater probe failed: a shrunk ellipsoid misses the subspace".into()),
    }
    let mut problem = FeasibilityProblem::new(x, y)?;
    if !hull.is_whole_space() {
        problem = problem.with_hull(hull)?;
    }
    let z0 = &first.center + &second.center + Vector::from_element(n, 1.0);
    Ok(CatalogEntry {
        name: "eq_ellipsoids".into(),
        problem,
        suggested_z0: z0,
        expected: ExpectedRates {
            ccrm: Some(ExpectedRate::Quadratic),
            ..Default::default()
        },
        warnings,
    })
}

/// Fraction of r at which a default ball center sits outside X, leaving a thin
/// lens-shaped overlap whose rim corners are acute.
pub const DEFAULT_GAP: f64 = 0.92;

/// Places a radius-r ball of L at distance 0.92 r from X along the normal at
/// P_X(probe), and a start 1.5 r from its center along a tangent direction.
///
/// Returns (center, start).
fn thin_lens(x: &Set, hull: &AffineSubspace, probe: &Vector, r: f64) -> Result<(Vector, Vector)> {
    let foot = x.project(probe)?;
    let normal = probe - &foot;
    let nn = normal.norm();
    if nn <= 1e-12 * (1.0 + probe.norm()) {
        return input("probe point lies in X");
    }
    let nhat = normal / nn;
    let center = &foot + &nhat * (DEFAULT_GAP * r);
    let basis = hull.basis();
    for j in 0..basis.ncols() {
        let col = basis.column(j).into_owned();
        let t = &col - &nhat * nhat.dot(&col);
        if t.norm() > 1e-6 {
            let start = &center + t.normalize() * (1.5 * r);
            return Ok((center, start));
        }
    }
    input("the hull has no direction tangent to X at the probe")
}

/// Deterministic random instance in R⁴ with one equality constraint: a random
/// ellipsoid against a unit ball placed to overlap it in a thin lens.
pub fn eq_constrained_default(seed: u64) -> Result<CatalogEntry> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };
    let n = 4;
    let a = Matrix::from_fn(1, n, |_, _| normal());
    let b = Vector::from_element(1, 0.3);
    let hull = AffineSubspace::with_full_row_rank(a.clone(), b.clone())?;
    let first = EllipsoidSpec {
        map: Matrix::identity(n, n) + Matrix::from_fn(n, n, |_, _| 0.2 * normal()),
        center: hull.project(&Vector::from_fn(n, |_, _| 0.1 * normal()))?,
        radius: 1.0,
    };
    let x = Set::ellipsoid_in_affine(first.shape(), first.center.clone(), hull.clone())?;
    let probe = hull.project(&(&first.center + Vector::from_fn(n, |_, _| 3.0 * normal())))?;
    let (center, start) = thin_lens(&x, &hull, &probe, 1.0)?;
    let second = EllipsoidSpec {
        map: Matrix::identity(n, n),
        center,
        radius: 1.0,
    };
    let mut entry = eq_constrained_ellipsoids(&a, &b, &first, &second)?;
    entry.suggested_z0 = start;
    Ok(entry)
}

/// L = {Az = b}, X = {z : Cz + d ∈ K} ∩ L with K the second-order cone and an
/// orthogonal C, Y = ball ∩ L.
pub fn socp(a: &Matrix, b: &Vector, c: &Matrix, d: &Vector, ball_center: &Vector, ball_radius: f64) -> Result<CatalogEntry> {
    let n = c.ncols();
    let cone = Set::cone_preimage(c.clone(), d.clone())?;
    let (x, y, hull) = if a.nrows() == 0 {
        (cone, Set::ball(ball_center.clone(), ball_radius)?, None)
    } else {
        let hull = AffineSubspace::with_full_row_rank(a.clone(), b.clone())?;
        let x = Set::intersection(vec![cone, Set::affine(hull.clone())])?;
        let y = Set::ball_in_affine(ball_center.clone(), ball_radius, hull.clone())?;
        (x, y, Some(hull))
    };
    let mut problem = FeasibilityProblem::new(x, y)?;
    if let Some(h) = hull {
        problem = problem.with_hull(h)?;
    }
    let mut z0 = ball_center.clone();
    z0[n - 1] += 3.0 * ball_radius;
    Ok(CatalogEntry {
        name: "socp".into(),
        problem,
        suggested_z0: z0,
        expected: ExpectedRates {
            ccrm: Some(ExpectedRate::Quadratic),
            ..Default::default()
        },
        warnings: Vec::new(),
    })
}

/// Cone {‖(z₂, z₃)‖ ≤ z₁} sliced by the tilted plane z₁ − z₂/2 = 1, against a
/// ball of radius 0.8 in that plane overlapping the slice in a thin lens.
pub fn socp_default() -> Result<CatalogEntry> {
    let a = Matrix::from_row_slice(1, 3, &[1.0, -0.5, 0.0]);
    let b = v(&[1.0]);
    let hull = AffineSubspace::with_full_row_rank(a.clone(), b.clone())?;
    let x = Set::intersection(vec![
        Set::cone_preimage(Matrix::identity(3, 3), Vector::zeros(3))?,
        Set::affine(hull.clone()),
    ])?;
    let (center, start) = thin_lens(&x, &hull, &v(&[1.0, 0.0, 1.5]), 0.8)?;
    let mut entry = socp(&a, &b, &Matrix::identity(3, 3), &Vector::zeros(3), &center, 0.8)?;
    entry.suggested_z0 = start;
    Ok(entry)
}

/// Haar-random orthogonal matrix from the QR factors of a Gaussian matrix.
fn random_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let g = Matrix::from_fn(n, n, |_, _| StandardNormal.sample(rng));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Q diag(μ) Qᵀ in svec coordinates with a seeded random Q and a trace-one
/// spectrum μ lying well outside the matrix sets.
fn default_probe(mu: Vector, seed: u64) -> Result<Vector> {
    let n = mu.len();
    let q = random_orthogonal(n, &mut ChaCha8Rng::seed_from_u64(seed));
    Ok(svec(&crate::linalg::symmetrize(&(&q * Matrix::from_diagonal(&mu) * q.transpose()))))
}

/// 1/n + w with w linearly spaced from 1 to −1. Projected onto the spectral
/// simplex it keeps a single zero eigenvalue for n ≤ 3.
fn linear_spectrum(n: usize) -> Result<Vector> {
    if n < 2 {
        return input("matrix order must be at least 2");
    }
    Ok(Vector::from_fn(n, |i, _| 1.0 / n as f64 + 1.0 - 2.0 * i as f64 / (n - 1) as f64))
}

/// One dominant eigenvalue 1/n + 3/4 and the rest spread by ±0.05 around
/// their mean, so that capping at a clips a single eigenvalue.
fn leading_spectrum(n: usize) -> Result<Vector> {
    if n < 2 {
        return input("matrix order must be at least 2");
    }
    let rest = 1.0 / n as f64 - 0.75 / (n - 1) as f64;
    Ok(Vector::from_fn(n, |i, _| {
        if i == 0 {
            1.0 / n as f64 + 0.75
        } else if n == 2 {
            rest
        } else {
            rest + 0.05 - 0.1 * (i - 1) as f64 / (n - 2) as f64
        }
    }))
}

/// The affine subspace {s : ⟨svec(A_i), s⟩ = b_i} of flattened symmetric matrices.
fn trace_hull(ops: &[Matrix], b: &Vector, n: usize) -> Result<AffineSubspace> {
    if ops.len() != b.len() {
        return input("need one right-hand side per linear map");
    }
    let dim = svec_len(n);
    if ops.is_empty() {
        return Ok(AffineSubspace::whole_space(dim));
    }
    let mut a = Matrix::zeros(ops.len(), dim);
    for (i, op) in ops.iter().enumerate() {
        if op.nrows() != n || op.ncols() != n {
            return input("linear map matrices must be n × n");
        }
        a.row_mut(i).copy_from(&svec(op).transpose());
    }
    AffineSubspace::with_full_row_rank(a, b.clone())
}

/// Find Σ with A(Σ) = b, Σ ⪰ 0 and ‖Σ − Σ̂‖_F ≤ r, in svec coordinates.
///
/// X = PSD ∩ L through Dykstra's algorithm; Y = Frobenius ball ∩ L in closed form.
pub fn sdp_feasibility(ops: &[Matrix], b: &Vector, sigma_hat: &Matrix, r: f64, n: usize) -> Result<CatalogEntry> {
    if sigma_hat.nrows() != n || sigma_hat.ncols() != n {
        return input("Σ̂ must be n × n");
    }
    let hull = trace_hull(ops, b, n)?;
    let center = svec(sigma_hat);
    let (x, y) = if hull.is_whole_space() {
        (Set::psd_cone(n)?, Set::ball(center.clone(), r)?)
    } else {
        (
            Set::intersection(vec![Set::psd_cone(n)?, Set::affine(hull.clone())])?,
            Set::ball_in_affine(center.clone(), r, hull.clone())?,
        )
    };
    let mut problem = FeasibilityProblem::new(x, y)?;
    if !hull.is_whole_space() {
        problem = problem.with_hull(hull)?;
    }
    Ok(CatalogEntry {
        name: format!("sdp:n={n}"),
        problem,
        suggested_z0: center,
        expected: ExpectedRates {
            ccrm: Some(ExpectedRate::Quadratic),
            ..Default::default()
        },
        warnings: Vec::new(),
    })
}

/// One trace constraint tr Σ = 1 and a Frobenius ball of radius r overlapping
/// {Σ ⪰ 0, tr Σ = 1} in a thin lens.
pub fn sdp_default(n: usize, r: f64, seed: u64) -> Result<CatalogEntry> {
    let probe = default_probe(linear_spectrum(n)?, seed)?;
    let hull = trace_hull(&[Matrix::identity(n, n)], &v(&[1.0]), n)?;
    let x = Set::intersection(vec![Set::psd_cone(n)?, Set::affine(hull.clone())])?;
    let (center, start) = thin_lens(&x, &hull, &probe, r)?;
    let mut entry = sdp_feasibility(&[Matrix::identity(n, n)], &v(&[1.0]), &smat(&center)?, r, n)?;
    entry.suggested_z0 = start;
    Ok(entry)
}

/// X = {Σ : λ_max(Σ) ≤ a, tr Σ = 1}, Y = Frobenius ball ∩ {tr = 1}.
pub fn fixed_trace(a: f64, sigma_hat: &Matrix, r: f64, n: usize) -> Result<CatalogEntry> {
    if sigma_hat.nrows() != n || sigma_hat.ncols() != n {
        return input("Σ̂ must be n × n");
    }
    let x = Set::spectral_box_trace(n, a)?;
    let hull = trace_hull(&[Matrix::identity(n, n)], &v(&[1.0]), n)?;
    let center = svec(sigma_hat);
    let y = Set::ball_in_affine(center.clone(), r, hull.clone())?;
    let problem = FeasibilityProblem::new(x, y)?.with_hull(hull)?;
    Ok(CatalogEntry {
        name: format!("fixed_trace:n={n},a={a}"),
        problem,
        suggested_z0: center,
        expected: ExpectedRates {
            ccrm: Some(ExpectedRate::Quadratic),
            ..Default::default()
        },
        warnings: Vec::new(),
    })
}

/// A Frobenius ball of radius r in {tr = 1} overlapping {λ_max ≤ a, tr = 1}
/// in a thin lens.
pub fn fixed_trace_default(n: usize, a: f64, r: f64, seed: u64) -> Result<CatalogEntry> {
    let x = Set::spectral_box_trace(n, a)?;
    let hull = trace_hull(&[Matrix::identity(n, n)], &v(&[1.0]), n)?;
    let (center, start) = thin_lens(&x, &hull, &default_probe(leading_spectrum(n)?, seed)?, r)?;
    let mut entry = fixed_trace(a, &smat(&center)?, r, n)?;
    entry.suggested_z0 = start;
    Ok(entry)
}

/// Eigenvalues of the symmetric matrix stored in svec coordinates, ascending.
pub fn svec_eigenvalues(s: &Vector) -> Result<Vector> {
    Ok(symmetric_eigh(&smat(s)?)?.values)
}

/// Trace of the symmetric matrix stored in svec coordinates.
pub fn svec_trace(s: &Vector) -> Result<f64> {
    let n = crate::linalg::svec_order(s.len())?;
    Ok(svec_identity(n).dot(s))
}

fn parse_params(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for part in text.split(',').filter(|p| !p.trim().is_empty()) {
        let (k, val) = part
            .split_once('=')
            .ok_or_else(|| Error::Input(format!("parameter '{part}' is not key=value")))?;
        out.insert(k.trim().to_string(), val.trim().to_string());
    }
    Ok(out)
}

struct Params(BTreeMap<String, String>);

impl Params {
    fn num(&mut self, keys: &[&str], default: f64) -> Result<f64> {
        for k in keys {
            if let Some(s) = self.0.remove(*k) {
                return s
                    .parse()
                    .map_err(|_| Error::Input(format!("parameter {k}={s} is not a number")));
            }
        }
        Ok(default)
    }

    fn int(&mut self, keys: &[&str], default: u64) -> Result<u64> {
        for k in keys {
            if let Some(s) = self.0.remove(*k) {
                return s
                    .parse()
                    .map_err(|_| Error::Input(format!("parameter {k}={s} is not a nonnegative integer")));
            }
        }
        Ok(default)
    }

    fn text(&mut self, keys: &[&str]) -> Option<String> {
        keys.iter().find_map(|k| self.0.remove(*k))
    }

    fn finish(self, name: &str) -> Result<()> {
        match self.0.keys().next() {
            Some(k) => input(format!("unknown parameter '{k}' for {name}")),
            None => Ok(()),
        }
    }
}

pub const SDP_SEED: u64 = 7;
pub const FIXED_TRACE_SEED: u64 = 11;
pub const EQ_SEED: u64 = 3;

/// Resolves `name` or `name:key=val,...` to a catalog entry.
///
/// | name | parameters (defaults) |
/// |---|---|
/// | discs3d | none |
/// | ellipses | none |
/// | epigraph | a (2), b (0), y = halfplane or line (halfplane) |
/// | eq_ellipsoids | seed (3) |
/// | socp | none |
/// | sdp | n (3), r (1), seed (7) |
/// | fixed_trace | n (4), a (0.4), r (1), seed (11) |
pub fn by_name(spec: &str) -> Result<CatalogEntry> {
    let (name, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let mut p = Params(parse_params(rest)?);
    let entry = match name.trim() {
        "discs3d" => discs3d(),
        "ellipses" => ellipses(),
        "epigraph" => {
            let alpha = p.num(&["a", "alpha"], 2.0)?;
            let beta = p.num(&["b", "beta"], 0.0)?;
            let variant = match p.text(&["y", "variant"]) {
                Some(s) => s.parse()?,
                None => YVariant::Halfplane,
            };
            epigraph(alpha, beta, variant)
        }
        "eq_ellipsoids" => eq_constrained_default(p.int(&["seed"], EQ_SEED)?),
        "socp" => socp_default(),
        "sdp" => {
            let n = p.int(&["n"], 3)? as usize;
            let r = p.num(&["r"], 1.0)?;
            let seed = p.int(&["seed"], SDP_SEED)?;
            sdp_default(n, r, seed)
        }
        "fixed_trace" => {
            let n = p.int(&["n"], 4)? as usize;
            let a = p.num(&["a"], 0.4)?;
            let r = p.num(&["r"], 1.0)?;
            let seed = p.int(&["seed"], FIXED_TRACE_SEED)?;
            fixed_trace_default(n, a, r, seed)
        }
        other => {
            return input(format!(
                "unknown problem '{other}' (known: {})",
                NAMES.join(", ")
            ))
        }
    }?;
    p.finish(name)?;
    Ok(entry)
}
