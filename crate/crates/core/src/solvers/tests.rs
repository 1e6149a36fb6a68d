use super::*;
use crate::linalg::{Matrix, Vector};

fn v(xs: &[f64]) -> Vector {
    Vector::from_vec(xs.to_vec())
}

fn complementary() -> FeasibilityProblem {
    FeasibilityProblem::new(
        Set::halfspace(v(&[0.0, 1.0]), 0.0).unwrap(),
        Set::halfspace(v(&[0.0, -1.0]), 0.0).unwrap(),
    )
    .unwrap()
}

fn discs() -> FeasibilityProblem {
    FeasibilityProblem::new(
        Set::ball(v(&[0.0, 0.0]), 2.0).unwrap(),
        Set::ball(v(&[15f64.sqrt(), 0.0]), 2.0).unwrap(),
    )
    .unwrap()
}

#[test]
fn feasible_points_are_fixed() {
    let p = discs();
    let z = v(&[15f64.sqrt() / 2.0, 0.1]);
    let s = p.ccrm_step(&z).unwrap();
    assert_eq!(s.next, z);
    assert_eq!(s.status, CircumStatus::CoincidentAll);
    assert_eq!(p.map_step(&z).unwrap(), z);
    assert_eq!(p.crm_step(&z).unwrap().0, z);
}

#[test]
fn complementary_halfspaces_take_one_step() {
    let p = complementary();
    let z = v(&[0.0, 1.0]);
    assert!((p.ccrm_step(&z).unwrap().next - v(&[0.0, 0.0])).norm() < 1e-15);
    assert!((p.crm_step(&z).unwrap().0 - v(&[0.0, 0.0])).norm() < 1e-15);
}

#[test]
fn map_lands_in_parallel_halfspaces_in_one_step() {
    let p = FeasibilityProblem::new(
        Set::halfspace(v(&[0.0, 1.0]), 1.0).unwrap(),
        Set::halfspace(v(&[0.0, -1.0]), 0.0).unwrap(),
    )
    .unwrap();
    let next = p.map_step(&v(&[2.0, 3.0])).unwrap();
    assert_eq!(next, v(&[2.0, 1.0]));
    let (dx, dy) = p.residuals(&next).unwrap();
    assert_eq!(dx.max(dy), 0.0);
}

fn epigraph(alpha: f64) -> FeasibilityProblem {
    FeasibilityProblem::new(
        Set::power_epigraph(alpha, 0.0).unwrap(),
        Set::halfspace(v(&[0.0, 1.0]), 0.0).unwrap(),
    )
    .unwrap()
}

#[test]
fn map_on_the_epigraph_solves_the_normal_equation() {
    let p = epigraph(2.0);
    for &x in &[0.1, 0.5, 1.0, 2.0] {
        let next = p.map_step(&v(&[x, 0.0])).unwrap();
        // bisection on u(1 + 2u²) = x
        let (mut lo, mut hi) = (0.0_f64, x);
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if m * (1.0 + 2.0 * m * m) < x {
                lo = m;
            } else {
                hi = m;
            }
        }
        assert!((next[0] - lo).abs() <= 1e-14 * (1.0 + lo));
        assert_eq!(next[1], 0.0);
    }
}

#[test]
fn crm_on_the_epigraph_contracts_by_one_half() {
    let p = epigraph(2.0);
    let mut cfg = SolverConfig::with_method(Method::Crm);
    cfg.max_iter = 40;
    let t = run(&p, &cfg, &v(&[0.5, 0.0])).unwrap();
    let xs: Vec<f64> = t.iterates.iter().map(|z| z[0]).collect();
    let last = xs[xs.len() - 1] / xs[xs.len() - 2];
    assert!((last - 0.5).abs() < 1e-3, "{last}");
}

#[test]
fn run_from_a_feasible_point() {
    let p = discs();
    let z = v(&[15f64.sqrt() / 2.0, 0.0]);
    for m in Method::ALL {
        let t = run(&p, &SolverConfig::with_method(m), &z).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.termination, Termination::Feasible);
    }
}

#[test]
fn run_terminations_and_records() {
    let p = discs().with_reference(v(&[15f64.sqrt() / 2.0, 0.5])).unwrap();
    let z0 = v(&[15f64.sqrt() / 2.0, 4.0]);
    let mut cfg = SolverConfig::default();
    cfg.record_internals = true;
    let t = run(&p, &cfg, &z0).unwrap();
    assert_eq!(t.termination, Termination::Feasible);
    assert!(*t.max_residuals().last().unwrap() <= cfg.tol_feas);
    assert_eq!(t.centralized_points.as_ref().unwrap().len(), t.len() - 1);
    assert_eq!(t.circum_status.as_ref().unwrap().len(), t.len() - 1);
    assert_eq!(t.distances_to_reference.as_ref().unwrap().len(), t.len());

    cfg.method = Method::Map;
    cfg.max_iter = 3;
    let t = run(&p, &cfg, &z0).unwrap();
    assert_eq!(t.termination, Termination::MaxIter);
    assert_eq!(t.len(), 4);
    assert!(t.centralized_points.is_none());

    // MAP into the tangential corner of two touching discs slows down until the
    // step guard fires
    let touching = FeasibilityProblem::new(
        Set::ball(v(&[0.0, 0.0]), 1.0).unwrap(),
        Set::ball(v(&[2.0, 0.0]), 1.0).unwrap(),
    )
    .unwrap();
    let mut cfg = SolverConfig::with_method(Method::Map);
    cfg.max_iter = 1_000_000;
    cfg.tol_feas = 1e-300;
    cfg.tol_step = 1e-4;
    let t = run(&touching, &cfg, &v(&[1.0, 1.0])).unwrap();
    assert_eq!(t.termination, Termination::Stagnation);
}

#[test]
fn run_validates_its_inputs() {
    let p = discs();
    let mut cfg = SolverConfig::default();
    cfg.tol_feas = 0.0;
    assert!(run(&p, &cfg, &v(&[0.0, 0.0])).is_err());
    let cfg = SolverConfig {
        max_iter: 0,
        ..SolverConfig::default()
    };
    assert!(run(&p, &cfg, &v(&[0.0, 0.0])).is_err());
    assert!(run(&p, &SolverConfig::default(), &v(&[0.0])).is_err());
    assert!(run(&p, &SolverConfig::default(), &v(&[f64::NAN, 0.0])).is_err());
    assert!("douglas".parse::<Method>().is_err());
    assert_eq!("CCRM".parse::<Method>().unwrap(), Method::Ccrm);
}

#[test]
fn isometry_reduction_requires_a_hull() {
    assert!(matches!(isometry_reduce(&discs()), Err(Error::Unsupported(_))));
    let whole = AffineSubspace::new(Matrix::zeros(0, 2), Vector::zeros(0)).unwrap();
    let p = discs().with_hull(whole).unwrap();
    let r = isometry_reduce(&p).unwrap();
    assert_eq!(r.problem.dim(), 2);
    let z = v(&[0.3, -1.2]);
    assert_eq!(r.to_reduced(&z), z);
    let a = run(&p, &SolverConfig::default(), &v(&[2.0, 3.0])).unwrap();
    let b = run(&r.problem, &SolverConfig::default(), &v(&[2.0, 3.0])).unwrap();
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iterates.iter().zip(&b.iterates) {
        assert!((x - y).norm() <= 1e-12);
    }
}

#[test]
fn declared_hull_is_checked() {
    let plane = AffineSubspace::coordinate_plane(2, 1, 0.0).unwrap();
    assert!(discs().with_hull(plane).is_err());
}
