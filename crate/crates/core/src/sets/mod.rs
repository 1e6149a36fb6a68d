//! Closed convex sets with exact projections, reflections, affine-hull data
//! and, where the relative boundary is smooth, a boundary descriptor
//! (g, ∇g, ∇²g) expressed in the coordinates of the affine hull.

mod affine;
mod basic;
mod cone;
mod dykstra;
mod ellipsoid;
mod epigraph;
mod spectral;

pub use affine::AffineSubspace;
pub use basic::{Ball, Halfspace, Hyperplane};
pub use cone::{project_soc, ConePreimage, SecondOrderCone};
pub use dykstra::{dykstra_project, DEFAULT_MAX_ITER as DYKSTRA_MAX_ITER, DEFAULT_TOL as DYKSTRA_TOL};
pub use ellipsoid::Ellipsoid;
pub use epigraph::{epigraph_offset, PowerEpigraph};
pub use spectral::{project_capped_simplex, PsdCone, SpectralBoxTrace};

use crate::error::{input, Error, Result};
use crate::linalg::{check_dim, check_finite_vec, Matrix, Vector};

/// Value, gradient and Hessian of a local defining function g of the boundary.
#[derive(Debug, Clone)]
pub struct BoundaryEval {
    pub g: f64,
    pub grad: Vector,
    pub hess: Matrix,
}

/// Intersection of sets, projected with Dykstra's algorithm.
#[derive(Debug, Clone)]
pub struct Intersection {
    sets: Vec<Set>,
    tol: f64,
    max_iter: usize,
}

impl Intersection {
    pub fn sets(&self) -> &[Set] {
        &self.sets
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn max_iter(&self) -> usize {
        self.max_iter
    }
}

/// A set living in the coordinates of an affine subspace L, viewed in the
/// ambient space: C = φ⁻¹(inner) with φ(z) = Bᵀ(z − anchor).
///
/// Projection goes through L first, which is exact because the set lies in L.
/// The inner set is assumed full-dimensional in L's coordinates.
#[derive(Debug, Clone)]
pub struct Lifted {
    inner: Box<Set>,
    hull: AffineSubspace,
}

impl Lifted {
    pub fn inner(&self) -> &Set {
        &self.inner
    }

    pub fn hull(&self) -> &AffineSubspace {
        &self.hull
    }
}

/// The image φ(C) of an ambient set C ⊂ L in L's coordinates.
#[derive(Debug, Clone)]
pub struct Embedded {
    inner: Box<Set>,
    hull: AffineSubspace,
}

impl Embedded {
    pub fn inner(&self) -> &Set {
        &self.inner
    }

    pub fn hull(&self) -> &AffineSubspace {
        &self.hull
    }
}

#[derive(Debug, Clone)]
pub enum Set {
    Halfspace(Halfspace),
    Hyperplane(Hyperplane),
    Affine(AffineSubspace),
    Ball(Ball),
    Ellipsoid(Ellipsoid),
    SecondOrderCone(SecondOrderCone),
    ConePreimage(ConePreimage),
    PowerEpigraph(PowerEpigraph),
    PsdCone(PsdCone),
    SpectralBoxTrace(SpectralBoxTrace),
    Lifted(Lifted),
    Embedded(Embedded),
    Intersection(Intersection),
}

impl Set {
    pub fn halfspace(normal: Vector, offset: f64) -> Result<Self> {
        Ok(Set::Halfspace(Halfspace::new(normal, offset)?))
    }

    pub fn hyperplane(normal: Vector, offset: f64) -> Result<Self> {
        Ok(Set::Hyperplane(Hyperplane::new(normal, offset)?))
    }

    pub fn affine(l: AffineSubspace) -> Self {
        Set::Affine(l)
    }

    pub fn ball(center: Vector, radius: f64) -> Result<Self> {
        Ok(Set::Ball(Ball::new(center, radius)?))
    }

    pub fn ellipsoid(shape: Matrix, center: Vector) -> Result<Self> {
        Ok(Set::Ellipsoid(Ellipsoid::new(shape, center)?))
    }

    pub fn second_order_cone(dim: usize) -> Result<Self> {
        Ok(Set::SecondOrderCone(SecondOrderCone::new(dim)?))
    }

    pub fn cone_preimage(map: Matrix, shift: Vector) -> Result<Self> {
        Ok(Set::ConePreimage(ConePreimage::new(map, shift)?))
    }

    pub fn power_epigraph(alpha: f64, beta: f64) -> Result<Self> {
        Ok(Set::PowerEpigraph(PowerEpigraph::new(alpha, beta)?))
    }

    pub fn psd_cone(order: usize) -> Result<Self> {
        Ok(Set::PsdCone(PsdCone::new(order)?))
    }

    pub fn spectral_box_trace(order: usize, bound: f64) -> Result<Self> {
        Ok(Set::SpectralBoxTrace(SpectralBoxTrace::new(order, bound)?))
    }

    /// Intersection with the default Dykstra settings.
    pub fn intersection(sets: Vec<Set>) -> Result<Self> {
        Self::intersection_with(sets, DYKSTRA_TOL, DYKSTRA_MAX_ITER)
    }

    pub fn intersection_with(sets: Vec<Set>, tol: f64, max_iter: usize) -> Result<Self> {
        let n = match sets.first() {
            Some(s) => s.dim(),
            None => return input("intersection of no sets"),
        };
        if sets.iter().any(|s| s.dim() != n) {
            return input("intersected sets live in different dimensions");
        }
        if !(tol > 0.0) || max_iter == 0 {
            return input("intersection needs tol > 0 and max_iter >= 1");
        }
        Ok(Set::Intersection(Intersection { sets, tol, max_iter }))
    }

    /// `inner` given in the coordinates of `hull`.
    pub fn lifted(inner: Set, hull: AffineSubspace) -> Result<Self> {
        if inner.dim() != hull.dim() {
            return input(format!(
                "inner set has dimension {} but the hull has dimension {}",
                inner.dim(),
                hull.dim()
            ));
        }
        Ok(Set::Lifted(Lifted {
            inner: Box::new(inner),
            hull,
        }))
    }

    /// `inner`, which must lie in `hull`, expressed in hull coordinates.
    pub fn embedded(inner: Set, hull: AffineSubspace) -> Result<Self> {
        if inner.dim() != hull.ambient_dim() {
            return input("embedded set and hull have different ambient dimensions");
        }
        Ok(Set::Embedded(Embedded {
            inner: Box::new(inner),
            hull,
        }))
    }

    /// Ball ∩ L, realized in closed form as a ball of L.
    pub fn ball_in_affine(center: Vector, radius: f64, hull: AffineSubspace) -> Result<Self> {
        check_dim(&center, hull.ambient_dim(), "ball center")?;
        check_finite_vec(&center, "ball center")?;
        let foot = hull.project(&center)?;
        let offset2 = (&center - &foot).norm_squared();
        let r2 = radius * radius - offset2;
        if !(r2 >= 0.0) {
            return input("ball does not meet the affine subspace");
        }
        let inner = Set::ball(hull.to_coords(&foot), r2.sqrt())?;
        Self::lifted(inner, hull)
    }

    /// {z ∈ L : (z − c)ᵀQ(z − c) ≤ 1}, realized in L's coordinates.
    ///
    /// With z = anchor + Bw the slice is (w − w₀)ᵀ(BᵀQB)(w − w₀) ≤ ρ, where
    /// w₀ minimizes the quadratic over L and ρ is what remains of the level.
    pub fn ellipsoid_in_affine(shape: Matrix, center: Vector, hull: AffineSubspace) -> Result<Self> {
        check_dim(&center, hull.ambient_dim(), "ellipsoid center")?;
        check_finite_vec(&center, "ellipsoid center")?;
        let n = hull.ambient_dim();
        if shape.nrows() != n || shape.ncols() != n {
            return input("ellipsoid shape does not match the ambient dimension");
        }
        let b = hull.basis();
        let reduced = hull.restrict_form(&shape);
        let reduced = (&reduced + reduced.transpose()) * 0.5;
        let shift = hull.anchor() - &center;
        let q = b.transpose() * (&shape * &shift);
        let w0 = match reduced.clone().cholesky() {
            Some(ch) => -ch.solve(&q),
            None => return input("ellipsoid shape is not positive definite on the subspace"),
        };
        let rho = 1.0 - shift.dot(&(&shape * &shift)) - q.dot(&w0);
        if !(rho > 0.0) {
            return input("ellipsoid does not meet the affine subspace in a set with nonempty relative interior");
        }
        let inner = Set::ellipsoid(reduced / rho, w0)?;
        Self::lifted(inner, hull)
    }

    /// Short name of the set family.
    pub fn kind(&self) -> &'static str {
        match self {
            Set::Halfspace(_) => "halfspace",
            Set::Hyperplane(_) => "hyperplane",
            Set::Affine(_) => "affine_subspace",
            Set::Ball(_) => "ball",
            Set::Ellipsoid(_) => "ellipsoid",
            Set::SecondOrderCone(_) => "second_order_cone",
            Set::ConePreimage(_) => "cone_preimage",
            Set::PowerEpigraph(_) => "power_epigraph",
            Set::PsdCone(_) => "psd_cone",
            Set::SpectralBoxTrace(_) => "spectral_box_trace",
            Set::Lifted(_) => "lifted",
            Set::Embedded(_) => "embedded",
            Set::Intersection(_) => "dykstra_intersection",
        }
    }

    /// Ambient dimension.
    pub fn dim(&self) -> usize {
        match self {
            Set::Halfspace(s) => s.dim(),
            Set::Hyperplane(s) => s.dim(),
            Set::Affine(s) => s.ambient_dim(),
            Set::Ball(s) => s.dim(),
            Set::Ellipsoid(s) => s.dim(),
            Set::SecondOrderCone(s) => s.dim(),
            Set::ConePreimage(s) => s.dim(),
            Set::PowerEpigraph(_) => 2,
            Set::PsdCone(s) => s.dim(),
            Set::SpectralBoxTrace(s) => s.dim(),
            Set::Lifted(s) => s.hull.ambient_dim(),
            Set::Embedded(s) => s.hull.dim(),
            Set::Intersection(s) => s.sets[0].dim(),
        }
    }

    /// Nearest point of the set.
    pub fn project(&self, z: &Vector) -> Result<Vector> {
        check_dim(z, self.dim(), "point")?;
        check_finite_vec(z, "point")?;
        match self {
            Set::Halfspace(s) => Ok(s.project(z)),
            Set::Hyperplane(s) => Ok(s.project(z)),
            Set::Affine(s) => s.project(z),
            Set::Ball(s) => Ok(s.project(z)),
            Set::Ellipsoid(s) => s.project(z),
            Set::SecondOrderCone(s) => Ok(s.project(z)),
            Set::ConePreimage(s) => Ok(s.project(z)),
            Set::PowerEpigraph(s) => s.project(z),
            Set::PsdCone(s) => s.project(z),
            Set::SpectralBoxTrace(s) => s.project(z),
            Set::Lifted(s) => {
                let w = s.inner.project(&s.hull.to_coords(z))?;
                Ok(s.hull.from_coords(&w))
            }
            Set::Embedded(s) => {
                let p = s.inner.project(&s.hull.from_coords(z))?;
                Ok(s.hull.to_coords(&p))
            }
            Set::Intersection(s) => dykstra_project(&s.sets, z, s.tol, s.max_iter),
        }
    }

    /// P(z) − z. Equal to `project(z) - z` up to rounding; sets whose
    /// projection is computed through an offset return it without cancellation.
    pub fn displacement(&self, z: &Vector) -> Result<Vector> {
        match self {
            Set::PowerEpigraph(s) => {
                check_dim(z, 2, "point")?;
                check_finite_vec(z, "point")?;
                s.displacement(z)
            }
            Set::Lifted(s) => {
                check_dim(z, self.dim(), "point")?;
                let w = s.hull.to_coords(z);
                let inner = s.inner.displacement(&w)?;
                // the part of z off the hull is removed as well
                let on_hull = s.hull.from_coords(&w);
                Ok(s.hull.basis() * inner + (on_hull - z))
            }
            _ => Ok(self.project(z)? - z),
        }
    }

    /// 2P(z) − z.
    pub fn reflect(&self, z: &Vector) -> Result<Vector> {
        Ok(self.project(z)? * 2.0 - z)
    }

    /// Euclidean distance to the set.
    pub fn distance(&self, z: &Vector) -> Result<f64> {
        Ok((self.project(z)? - z).norm())
    }

    pub fn contains(&self, z: &Vector, tol: f64) -> Result<bool> {
        Ok(self.distance(z)? <= tol)
    }

    /// Affine hull when it is a proper subspace; `None` for full-dimensional sets.
    pub fn affine_hull(&self) -> Option<AffineSubspace> {
        let hull = match self {
            Set::Hyperplane(h) => {
                let n = h.dim();
                AffineSubspace::new(Matrix::from_row_slice(1, n, h.normal().as_slice()), Vector::from_element(1, h.offset())).ok()
            }
            Set::Affine(l) => Some(l.clone()),
            Set::SpectralBoxTrace(s) => {
                let n = s.dim();
                let t = crate::linalg::svec_identity(s.order());
                AffineSubspace::new(Matrix::from_row_slice(1, n, t.as_slice()), Vector::from_element(1, 1.0)).ok()
            }
            Set::Lifted(s) => Some(s.hull.clone()),
            Set::Intersection(s) => {
                let hulls: Vec<AffineSubspace> = s.sets.iter().filter_map(|m| m.affine_hull()).collect();
                if hulls.is_empty() {
                    None
                } else {
                    let refs: Vec<&AffineSubspace> = hulls.iter().collect();
                    AffineSubspace::intersect(&refs).ok()
                }
            }
            _ => None,
        };
        hull.filter(|h| !h.is_whole_space())
    }

    /// True when [`Set::boundary_eval`] can succeed somewhere.
    pub fn has_boundary_descriptor(&self) -> bool {
        match self {
            Set::Hyperplane(_) | Set::Affine(_) => false,
            Set::Lifted(s) => s.inner.has_boundary_descriptor(),
            Set::Embedded(s) => s.inner.has_boundary_descriptor(),
            Set::Intersection(s) => s.boundary_member().is_ok(),
            _ => true,
        }
    }

    /// Boundary descriptor with gradient and Hessian restricted to the affine
    /// hull (expressed in the hull's orthonormal coordinates when present).
    pub fn boundary_eval(&self, z: &Vector) -> Result<BoundaryEval> {
        check_dim(z, self.dim(), "point")?;
        check_finite_vec(z, "point")?;
        let e = self.boundary_ambient(z)?;
        Ok(match self.affine_hull() {
            Some(h) => BoundaryEval {
                g: e.g,
                grad: h.restrict_vector(&e.grad),
                hess: h.restrict_form(&e.hess),
            },
            None => e,
        })
    }

    /// Descriptor in ambient coordinates.
    pub(crate) fn boundary_ambient(&self, z: &Vector) -> Result<BoundaryEval> {
        match self {
            Set::Halfspace(s) => Ok(s.boundary(z)),
            Set::Ball(s) => Ok(s.boundary(z)),
            Set::Ellipsoid(s) => Ok(s.boundary(z)),
            Set::SecondOrderCone(s) => s.boundary(z),
            Set::ConePreimage(s) => s.boundary(z),
            Set::PowerEpigraph(s) => s.boundary(z),
            Set::PsdCone(s) => s.boundary(z),
            Set::SpectralBoxTrace(s) => s.boundary(z),
            Set::Hyperplane(_) | Set::Affine(_) => Err(Error::Unsupported(format!(
                "a {} has no relative boundary",
                self.kind()
            ))),
            Set::Lifted(s) => {
                let e = s.inner.boundary_ambient(&s.hull.to_coords(z))?;
                let b = s.hull.basis();
                Ok(BoundaryEval {
                    g: e.g,
                    grad: b * e.grad,
                    hess: b * e.hess * b.transpose(),
                })
            }
            Set::Embedded(s) => {
                let e = s.inner.boundary_ambient(&s.hull.from_coords(z))?;
                Ok(BoundaryEval {
                    g: e.g,
                    grad: s.hull.restrict_vector(&e.grad),
                    hess: s.hull.restrict_form(&e.hess),
                })
            }
            Set::Intersection(s) => s.boundary_member()?.boundary_ambient(z),
        }
    }
}

impl Intersection {
    /// The single member that carries the boundary; all others must be affine.
    fn boundary_member(&self) -> Result<&Set> {
        let mut curved = self
            .sets
            .iter()
            .filter(|s| !matches!(s, Set::Affine(_) | Set::Hyperplane(_)));
        match (curved.next(), curved.next()) {
            (Some(s), None) if s.has_boundary_descriptor() => Ok(s),
            _ => Err(Error::Unsupported(
                "intersection boundary needs exactly one non-affine member with a descriptor".into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests;
