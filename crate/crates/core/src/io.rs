//! File formats: JSON problem files, trace CSV and JSON, and run reports.
//!
//! A problem file looks like
//!
//! ```json
//! {
//!   "version": "1",
//!   "x": { "kind": "ball", "center": [0, 0], "radius": 1 },
//!   "y": { "kind": "halfspace", "normal": [0, 1], "offset": 0.5 },
//!   "hull": { "a": [[0, 0]], "b": [0] },
//!   "reference": [0, 0.5],
//!   "z0": [2, 2]
//! }
//! ```
//!
//! where `hull`, `reference`, `constants` and `z0` are optional. Matrices are
//! arrays of rows. Set kinds are the names returned by [`Set::kind`] plus
//! `ball_in_affine` and `ellipsoid_in_affine`, which build the sliced sets in
//! closed form.
//!
//! Trace CSV files have the columns `k, z1..zn, dist_X, dist_Y, dist_ref` and
//! print every float in shortest round-trip form, so reading a trace back
//! reproduces it bit for bit.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::catalog::{CatalogEntry, ExpectedRates};
use crate::circumcenter::CircumStatus;
use crate::diagnostics::{quad_constant_check_trace, rate_report, RateClass, RateOptions};
use crate::error::{input, Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::sets::{AffineSubspace, Set};
use crate::solvers::{FeasibilityProblem, KnownConstants, Method, SolveTrace, Termination};

pub const PROBLEM_VERSION: &str = "1";

/// Affine subspace {z : Az = b}. `dim` is only needed when `a` has no rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HullDescriptor {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetDescriptor {
    Halfspace {
        normal: Vec<f64>,
        offset: f64,
    },
    Hyperplane {
        normal: Vec<f64>,
        offset: f64,
    },
    AffineSubspace {
        #[serde(flatten)]
        hull: HullDescriptor,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Ellipsoid {
        shape: Vec<Vec<f64>>,
        center: Vec<f64>,
    },
    SecondOrderCone {
        dim: usize,
    },
    ConePreimage {
        map: Vec<Vec<f64>>,
        shift: Vec<f64>,
    },
    PowerEpigraph {
        alpha: f64,
        beta: f64,
    },
    PsdCone {
        order: usize,
    },
    SpectralBoxTrace {
        order: usize,
        bound: f64,
    },
    BallInAffine {
        center: Vec<f64>,
        radius: f64,
        hull: HullDescriptor,
    },
    EllipsoidInAffine {
        shape: Vec<Vec<f64>>,
        center: Vec<f64>,
        hull: HullDescriptor,
    },
    /// A set given in the coordinates of `hull`, placed into the ambient space.
    Lifted {
        inner: Box<SetDescriptor>,
        hull: HullDescriptor,
    },
    /// An ambient set viewed in the coordinates of `hull`.
    Embedded {
        inner: Box<SetDescriptor>,
        hull: HullDescriptor,
    },
    DykstraIntersection {
        sets: Vec<SetDescriptor>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tol: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_iter: Option<usize>,
    },
}

fn rows_of(m: &Matrix) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn matrix_from_rows(rows: &[Vec<f64>], cols: Option<usize>, what: &str) -> Result<Matrix> {
    let ncols = match rows.first() {
        Some(r) => r.len(),
        None => cols.ok_or_else(|| Error::Input(format!("{what}: an empty matrix needs an explicit dimension")))?,
    };
    if rows.iter().any(|r| r.len() != ncols) {
        return input(format!("{what}: rows have different lengths"));
    }
    Ok(Matrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

fn vector(x: &[f64]) -> Vector {
    Vector::from_column_slice(x)
}

impl HullDescriptor {
    pub fn from_subspace(l: &AffineSubspace) -> Self {
        Self {
            a: rows_of(l.a()),
            b: l.b().iter().copied().collect(),
            dim: (l.a().nrows() == 0).then_some(l.ambient_dim()),
        }
    }

    pub fn to_subspace(&self) -> Result<AffineSubspace> {
        let a = matrix_from_rows(&self.a, self.dim, "hull")?;
        if let Some(d) = self.dim {
            if d != a.ncols() {
                return input(format!("hull: dim {d} disagrees with {} matrix columns", a.ncols()));
            }
        }
        if a.nrows() == 0 {
            return Ok(AffineSubspace::whole_space(a.ncols()));
        }
        AffineSubspace::new(a, vector(&self.b))
    }
}

impl SetDescriptor {
    /// Describes an existing set. Sliced balls and ellipsoids come out in
    /// their general `lifted` form.
    pub fn from_set(set: &Set) -> Self {
        match set {
            Set::Halfspace(h) => SetDescriptor::Halfspace {
                normal: h.normal().iter().copied().collect(),
                offset: h.offset(),
            },
            Set::Hyperplane(h) => SetDescriptor::Hyperplane {
                normal: h.normal().iter().copied().collect(),
                offset: h.offset(),
            },
            Set::Affine(l) => SetDescriptor::AffineSubspace {
                hull: HullDescriptor::from_subspace(l),
            },
            Set::Ball(b) => SetDescriptor::Ball {
                center: b.center().iter().copied().collect(),
                radius: b.radius(),
            },
            Set::Ellipsoid(e) => SetDescriptor::Ellipsoid {
                shape: rows_of(e.shape()),
                center: e.center().iter().copied().collect(),
            },
            Set::SecondOrderCone(c) => SetDescriptor::SecondOrderCone { dim: c.dim() },
            Set::ConePreimage(c) => SetDescriptor::ConePreimage {
                map: rows_of(c.map()),
                shift: c.shift().iter().copied().collect(),
            },
            Set::PowerEpigraph(p) => SetDescriptor::PowerEpigraph {
                alpha: p.alpha(),
                beta: p.beta(),
            },
            Set::PsdCone(p) => SetDescriptor::PsdCone { order: p.order() },
            Set::SpectralBoxTrace(s) => SetDescriptor::SpectralBoxTrace {
                order: s.order(),
                bound: s.bound(),
            },
            Set::Lifted(l) => SetDescriptor::Lifted {
                inner: Box::new(Self::from_set(l.inner())),
                hull: HullDescriptor::from_subspace(l.hull()),
            },
            Set::Embedded(e) => SetDescriptor::Embedded {
                inner: Box::new(Self::from_set(e.inner())),
                hull: HullDescriptor::from_subspace(e.hull()),
            },
            Set::Intersection(i) => SetDescriptor::DykstraIntersection {
                sets: i.sets().iter().map(Self::from_set).collect(),
                tol: Some(i.tol()),
                max_iter: Some(i.max_iter()),
            },
        }
    }

    pub fn to_set(&self) -> Result<Set> {
        match self {
            SetDescriptor::Halfspace { normal, offset } => Set::halfspace(vector(normal), *offset),
            SetDescriptor::Hyperplane { normal, offset } => Set::hyperplane(vector(normal), *offset),
            SetDescriptor::AffineSubspace { hull } => Ok(Set::affine(hull.to_subspace()?)),
            SetDescriptor::Ball { center, radius } => Set::ball(vector(center), *radius),
            SetDescriptor::Ellipsoid { shape, center } => {
                Set::ellipsoid(matrix_from_rows(shape, Some(center.len()), "ellipsoid shape")?, vector(center))
            }
            SetDescriptor::SecondOrderCone { dim } => Set::second_order_cone(*dim),
            SetDescriptor::ConePreimage { map, shift } => {
                Set::cone_preimage(matrix_from_rows(map, Some(shift.len()), "cone map")?, vector(shift))
            }
            SetDescriptor::PowerEpigraph { alpha, beta } => Set::power_epigraph(*alpha, *beta),
            SetDescriptor::PsdCone { order } => Set::psd_cone(*order),
            SetDescriptor::SpectralBoxTrace { order, bound } => Set::spectral_box_trace(*order, *bound),
            SetDescriptor::BallInAffine { center, radius, hull } => {
                Set::ball_in_affine(vector(center), *radius, hull.to_subspace()?)
            }
            SetDescriptor::EllipsoidInAffine { shape, center, hull } => Set::ellipsoid_in_affine(
                matrix_from_rows(shape, Some(center.len()), "ellipsoid shape")?,
                vector(center),
                hull.to_subspace()?,
            ),
            SetDescriptor::Lifted { inner, hull } => Set::lifted(inner.to_set()?, hull.to_subspace()?),
            SetDescriptor::Embedded { inner, hull } => Set::embedded(inner.to_set()?, hull.to_subspace()?),
            SetDescriptor::DykstraIntersection { sets, tol, max_iter } => {
                let sets = sets.iter().map(Self::to_set).collect::<Result<Vec<_>>>()?;
                match (tol, max_iter) {
                    (None, None) => Set::intersection(sets),
                    _ => Set::intersection_with(
                        sets,
                        tol.unwrap_or(crate::sets::DYKSTRA_TOL),
                        max_iter.unwrap_or(crate::sets::DYKSTRA_MAX_ITER),
                    ),
                }
            }
        }
    }
}

/// Version 1 of the JSON problem format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFileV1 {
    pub version: String,
    pub x: SetDescriptor,
    pub y: SetDescriptor,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hull: Option<HullDescriptor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<KnownConstants>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z0: Option<Vec<f64>>,
}

impl ProblemFileV1 {
    pub fn from_problem(problem: &FeasibilityProblem, z0: Option<&Vector>) -> Self {
        Self {
            version: PROBLEM_VERSION.into(),
            x: SetDescriptor::from_set(&problem.x),
            y: SetDescriptor::from_set(&problem.y),
            hull: problem.common_hull.as_ref().map(HullDescriptor::from_subspace),
            reference: problem.reference_solution.as_ref().map(|z| z.iter().copied().collect()),
            constants: problem.known_constants,
            z0: z0.map(|z| z.iter().copied().collect()),
        }
    }

    pub fn from_entry(entry: &CatalogEntry) -> Self {
        Self::from_problem(&entry.problem, Some(&entry.suggested_z0))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: Self = serde_json::from_str(text).map_err(|e| Error::Input(format!("malformed problem file: {e}")))?;
        if file.version != PROBLEM_VERSION {
            return input(format!("unsupported problem file version '{}'", file.version));
        }
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem files contain only finite data")
    }

    /// Builds the problem and checks every dimension, returning the start if one is given.
    pub fn build(&self) -> Result<(FeasibilityProblem, Option<Vector>)> {
        let mut problem = FeasibilityProblem::new(self.x.to_set()?, self.y.to_set()?)?;
        if let Some(h) = &self.hull {
            problem = problem.with_hull(h.to_subspace()?)?;
        }
        if let Some(r) = &self.reference {
            problem = problem.with_reference(vector(r))?;
        }
        if let Some(c) = self.constants {
            problem = problem.with_constants(c);
        }
        let z0 = match &self.z0 {
            Some(z) if z.len() != problem.dim() => {
                return input(format!("z0 has length {} but the problem lives in R^{}", z.len(), problem.dim()))
            }
            Some(z) => Some(vector(z)),
            None => None,
        };
        Ok((problem, z0))
    }
}

/// Formats a float so that parsing it gives back the same bits.
fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Input(format!("{what}: '{s}' is not a number")))
}

/// Writes the trace as CSV. An empty `dist_ref` cell means no reference point.
pub fn write_trace_csv<W: Write>(trace: &SolveTrace, out: W) -> Result<()> {
    let n = trace.iterates.first().map_or(0, |z| z.len());
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["k".to_string()];
    header.extend((1..=n).map(|i| format!("z{i}")));
    header.extend(["dist_X", "dist_Y", "dist_ref"].map(String::from));
    w.write_record(&header).map_err(csv_err)?;
    for (k, z) in trace.iterates.iter().enumerate() {
        let mut row = vec![k.to_string()];
        row.extend(z.iter().map(|x| fmt_f64(*x)));
        let (dx, dy) = trace.residuals[k];
        row.push(fmt_f64(dx));
        row.push(fmt_f64(dy));
        row.push(trace.distances_to_reference.as_ref().map_or(String::new(), |d| fmt_f64(d[k])));
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Input(format!("cannot write trace: {e}")))?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Input(format!("trace CSV: {e}"))
}

/// Columns of a trace CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceTable {
    pub iterates: Vec<Vector>,
    pub residuals: Vec<(f64, f64)>,
    pub distances_to_reference: Option<Vec<f64>>,
}

pub fn read_trace_csv<R: Read>(input_data: R) -> Result<TraceTable> {
    let mut r = csv::Reader::from_reader(input_data);
    let header = r.headers().map_err(csv_err)?.clone();
    let cols = header.len();
    if cols < 4 || &header[0] != "k" || &header[cols - 3] != "dist_X" || &header[cols - 2] != "dist_Y" || &header[cols - 1] != "dist_ref" {
        return input("trace CSV: expected columns k, z1..zn, dist_X, dist_Y, dist_ref");
    }
    let n = cols - 4;
    let mut table = TraceTable {
        iterates: Vec::new(),
        residuals: Vec::new(),
        distances_to_reference: Some(Vec::new()),
    };
    for (row_no, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let k: usize = rec[0]
            .parse()
            .map_err(|_| Error::Input(format!("trace CSV: bad iteration index '{}'", &rec[0])))?;
        if k != row_no {
            return input(format!("trace CSV: row {row_no} has index {k}"));
        }
        let z = (0..n).map(|i| parse_f64(&rec[1 + i], "trace CSV")).collect::<Result<Vec<_>>>()?;
        table.iterates.push(vector(&z));
        table
            .residuals
            .push((parse_f64(&rec[n + 1], "dist_X")?, parse_f64(&rec[n + 2], "dist_Y")?));
        let d = &rec[n + 3];
        match (&mut table.distances_to_reference, d.is_empty()) {
            (Some(v), false) => v.push(parse_f64(d, "dist_ref")?),
            (Some(v), true) if v.is_empty() && row_no == 0 => table.distances_to_reference = None,
            (None, true) => {}
            _ => return input("trace CSV: dist_ref is filled in only some rows"),
        }
    }
    Ok(table)
}

/// Everything a run records, for the JSON trace output.
#[derive(Debug, Clone, Serialize)]
pub struct TraceJson {
    pub method: Method,
    pub termination: Termination,
    pub iterates: Vec<Vec<f64>>,
    pub dist_x: Vec<f64>,
    pub dist_y: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dist_ref: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub centralized_points: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub circum_status: Option<Vec<CircumStatus>>,
}

impl TraceJson {
    pub fn from_trace(trace: &SolveTrace) -> Self {
        let points = |v: &[Vector]| v.iter().map(|z| z.iter().copied().collect()).collect();
        Self {
            method: trace.method,
            termination: trace.termination,
            iterates: points(&trace.iterates),
            dist_x: trace.residuals.iter().map(|r| r.0).collect(),
            dist_y: trace.residuals.iter().map(|r| r.1).collect(),
            dist_ref: trace.distances_to_reference.clone(),
            centralized_points: trace.centralized_points.as_deref().map(points),
            circum_status: trace.circum_status.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportConstants {
    pub kappa_x: f64,
    pub kappa_y: f64,
    pub omega: f64,
    /// 4·max κ / ω.
    pub theorem_bound: f64,
    /// max κ / ω.
    pub sharper_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRatios {
    /// What the distances are measured to: "reference" or "last_iterate".
    pub measured_against: &'static str,
    pub distances: Vec<f64>,
    pub linear: Vec<f64>,
    pub quadratic: Vec<f64>,
    pub usable_range: Option<(usize, usize)>,
    pub floor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PassFlags {
    pub feasible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_rate: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub within_theorem_bound: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub within_sharper_bound: Option<bool>,
}

/// Summary of one run: rate classification, constants and checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub problem: String,
    pub method: Method,
    pub termination: Termination,
    pub iterations: usize,
    pub classification: Option<RateClass>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification_note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<&'static str>,
    pub constants: Option<ReportConstants>,
    pub ratios: ReportRatios,
    pub pass_flags: PassFlags,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl RunReport {
    /// Classifies the run and evaluates whichever checks the problem's data allows.
    ///
    /// Without a reference point, distances are measured to the last iterate
    /// and the last one is dropped.
    pub fn build(name: &str, problem: &FeasibilityProblem, expected: &ExpectedRates, trace: &SolveTrace) -> Self {
        let (measured_against, distances, z_bar) = match (&trace.distances_to_reference, &problem.reference_solution) {
            (Some(d), Some(z)) => ("reference", d.clone(), z.clone()),
            _ => {
                let last = trace.last().clone();
                let mut d: Vec<f64> = trace.iterates.iter().map(|z| (z - &last).norm()).collect();
                d.pop();
                ("last_iterate", d, last)
            }
        };
        let opts = RateOptions::with_limit(f64::EPSILON, z_bar.norm());
        let (classification, note, ratios) = match rate_report(&distances, &opts) {
            Ok(r) => (
                Some(r.classification),
                None,
                ReportRatios {
                    measured_against,
                    distances: distances.clone(),
                    linear: r.linear_ratios,
                    quadratic: r.quad_ratios,
                    usable_range: Some(r.usable_range),
                    floor: r.floor,
                },
            ),
            Err(e) => (
                None,
                Some(e.to_string()),
                ReportRatios {
                    measured_against,
                    distances: distances.clone(),
                    linear: Vec::new(),
                    quadratic: Vec::new(),
                    usable_range: None,
                    floor: opts.floor(),
                },
            ),
        };
        let expected_rate = expected.get(trace.method);
        let constants = problem.known_constants.map(|c| ReportConstants {
            kappa_x: c.kappa_x,
            kappa_y: c.kappa_y,
            omega: c.omega,
            theorem_bound: 4.0 * c.kappa() / c.omega,
            sharper_bound: c.kappa() / c.omega,
        });
        let quad_check = match (&classification, &constants) {
            (Some(RateClass::Quadratic { .. }), Some(_)) if measured_against == "reference" => {
                quad_constant_check_trace(trace, problem, &opts).ok()
            }
            _ => None,
        };
        RunReport {
            problem: name.to_string(),
            method: trace.method,
            termination: trace.termination,
            iterations: trace.len() - 1,
            classification,
            classification_note: note,
            expected: expected_rate.map(|e| e.name()),
            constants,
            ratios,
            pass_flags: PassFlags {
                feasible: trace.termination == Termination::Feasible,
                expected_rate: match (expected_rate, &classification) {
                    (Some(e), Some(c)) => Some(e.matches(c)),
                    (Some(_), None) => Some(false),
                    _ => None,
                },
                within_theorem_bound: quad_check.as_ref().map(|q| q.within_theorem),
                within_sharper_bound: quad_check.and_then(|q| q.within_sharper),
            },
            warnings: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// Writes a file through a temporary sibling and a rename, so that a failure
/// never leaves a partial file behind.
pub fn write_file_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| Error::Input(format!("'{}' is not a file path", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp", name.to_string_lossy()));
    let io_err = |e: std::io::Error| Error::Input(format!("cannot write '{}': {e}", path.display()));
    fs::write(&tmp, contents).map_err(io_err)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io_err(e)
    })
}

#[cfg(test)]
mod tests;
