//! Extended-precision arithmetic for observing convergence rates below the
//! double-precision floor.
//!
//! [`DoubleDouble`] carries roughly 32 decimal digits. The [`Real`] trait lets
//! the small engine in [`engine`] run the same iterations in either f64 or
//! double-double, so quadratic tails such as 3e-11 → 5e-22 can be measured.

mod dd;
pub mod engine;
mod real;

pub use dd::DoubleDouble;
pub use engine::{circumcenter_real, run_exact, ExactProblem, ExactSet, ExactTrace, Point};
pub use real::Real;

use std::fmt;
use std::str::FromStr;

use crate::error::{input, Error};

/// Arithmetic used by the table reproductions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Precision {
    Double,
    Extended,
}

impl Precision {
    pub fn as_str(self) -> &'static str {
        match self {
            Precision::Double => "double",
            Precision::Extended => "extended",
        }
    }

    /// Unit roundoff of the arithmetic.
    pub fn epsilon(self) -> f64 {
        match self {
            Precision::Double => f64::EPSILON,
            Precision::Extended => DoubleDouble::EPSILON,
        }
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Precision {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "double" => Ok(Precision::Double),
            "extended" | "double-double" => Ok(Precision::Extended),
            other => input(format!("unknown precision '{other}' (expected double or extended)")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::Method;

    fn dd(x: f64) -> DoubleDouble {
        DoubleDouble::from_f64(x)
    }

    #[test]
    fn circumcenter_in_both_precisions() {
        let pts = vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![0.0, 2.0]];
        assert_eq!(circumcenter_real(&pts).unwrap(), vec![1.0, 1.0]);
        let ptsd: Vec<Point<DoubleDouble>> =
            pts.iter().map(|p| p.iter().map(|x| dd(*x)).collect()).collect();
        let c = circumcenter_real(&ptsd).unwrap();
        assert_eq!(c[0].to_f64(), 1.0);
        let col = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![3.0, 0.0]];
        assert!(matches!(circumcenter_real(&col), Err(Error::Geometry(_))));
    }

    #[test]
    fn epigraph_root_is_refined_to_double_double() {
        let x = dd(0.5);
        let d = engine::epigraph_offset_real(x, dd(0.0), 2.0).unwrap();
        let u = x - d;
        // residual of u(1 + 2u²) = x
        let r = u * (DoubleDouble::ONE + dd(2.0) * u * u) - x;
        assert!(r.to_f64().abs() < 1e-31);
        let d15 = engine::epigraph_offset_real(x, dd(-0.2), 1.5).unwrap();
        let u = x - d15;
        let f = u - x + dd(1.5) * u.powf(0.5) * (u.powf(1.5) + dd(0.2));
        assert!(f.to_f64().abs() < 1e-31);
    }

    #[test]
    fn double_engine_matches_the_main_solver() {
        use crate::linalg::Vector;
        use crate::sets::Set;
        use crate::solvers::{run, FeasibilityProblem, SolverConfig};
        let exact = ExactProblem::new(
            ExactSet::PowerEpigraph { alpha: 3.0, beta: 1.0 },
            ExactSet::Halfspace { normal: vec![0.0, 1.0], offset: 0.0 },
        )
        .unwrap();
        let main = FeasibilityProblem::new(
            Set::power_epigraph(3.0, 1.0).unwrap(),
            Set::halfspace(Vector::from_vec(vec![0.0, 1.0]), 0.0).unwrap(),
        )
        .unwrap();
        for m in Method::ALL {
            let a = run_exact(&exact, m, &[2.0, 0.5], 50, 1e-12).unwrap();
            let b = run(&main, &SolverConfig { max_iter: 50, ..SolverConfig::with_method(m) }, &Vector::from_vec(vec![2.0, 0.5])).unwrap();
            assert_eq!(a.iterates.len(), b.iterates.len(), "{m}");
            for (p, q) in a.iterates.iter().zip(&b.iterates) {
                assert!((p[0] - q[0]).abs() + (p[1] - q[1]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn precision_parsing() {
        assert_eq!("extended".parse::<Precision>().unwrap(), Precision::Extended);
        assert_eq!("double".parse::<Precision>().unwrap(), Precision::Double);
        assert!("quad".parse::<Precision>().is_err());
    }
}
