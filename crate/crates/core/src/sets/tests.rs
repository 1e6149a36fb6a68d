use super::*;
use crate::linalg::{smat, svec, Matrix, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn v(xs: &[f64]) -> Vector {
    Vector::from_vec(xs.to_vec())
}

fn close(a: &Vector, b: &Vector, tol: f64) -> bool {
    (a - b).norm() <= tol
}

#[test]
fn projection_examples() {
    let ball = Set::ball(v(&[0.0, 0.0, 0.0]), 2.0).unwrap();
    assert!(close(&ball.project(&v(&[3.0, 0.0, 0.0])).unwrap(), &v(&[2.0, 0.0, 0.0]), 1e-15));

    let lower = Set::halfspace(v(&[0.0, 1.0]), 0.0).unwrap();
    assert_eq!(lower.project(&v(&[1.0, -5.0])).unwrap(), v(&[1.0, -5.0]));

    let ell = Set::ellipsoid(Matrix::from_diagonal(&v(&[0.25, 1.0])), v(&[0.0, 0.0])).unwrap();
    assert!(close(&ell.project(&v(&[4.0, 0.0])).unwrap(), &v(&[2.0, 0.0]), 1e-12));
    assert_eq!(ell.project(&v(&[0.5, 0.5])).unwrap(), v(&[0.5, 0.5]));
}

#[test]
fn ellipse_projection_matches_boundary_scan() {
    let ell = Set::ellipsoid(Matrix::from_diagonal(&v(&[0.25, 1.0])), v(&[0.0, 0.0])).unwrap();
    let z = v(&[3.0, 2.0]);
    let p = ell.project(&z).unwrap();
    // dense scan of the boundary parametrization (2 cos t, sin t), then local refinement
    let dist = |t: f64| ((2.0 * t.cos() - 3.0).powi(2) + (t.sin() - 2.0).powi(2)).sqrt();
    let steps = 200_000;
    let mut best_t = 0.0;
    for i in 0..steps {
        let t = std::f64::consts::TAU * i as f64 / steps as f64;
        if dist(t) < dist(best_t) {
            best_t = t;
        }
    }
    let (mut lo, mut hi) = (best_t - 1e-4, best_t + 1e-4);
    for _ in 0..200 {
        let (a, b) = (lo + (hi - lo) / 3.0, hi - (hi - lo) / 3.0);
        if dist(a) < dist(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    let t = 0.5 * (lo + hi);
    let scan = v(&[2.0 * t.cos(), t.sin()]);
    assert!(close(&p, &scan, 1e-6), "{p} vs {scan}");
}

#[test]
fn reflection_examples() {
    let lower = Set::halfspace(v(&[0.0, 1.0]), 0.0).unwrap();
    assert_eq!(lower.reflect(&v(&[0.0, 3.0])).unwrap(), v(&[0.0, -3.0]));
    assert_eq!(lower.reflect(&v(&[2.0, -1.0])).unwrap(), v(&[2.0, -1.0]));
    let ball = Set::ball(v(&[0.0, 0.0]), 2.0).unwrap();
    assert!(close(&ball.reflect(&v(&[4.0, 0.0])).unwrap(), &v(&[0.0, 0.0]), 1e-15));
}

#[test]
fn soc_examples() {
    let k = Set::second_order_cone(2).unwrap();
    assert_eq!(k.project(&v(&[1.0, 0.5])).unwrap(), v(&[1.0, 0.5]));
    assert_eq!(k.project(&v(&[-2.0, 0.0])).unwrap(), v(&[0.0, 0.0]));
    assert_eq!(k.project(&v(&[0.0, 0.0])).unwrap(), v(&[0.0, 0.0]));
    let p = k.project(&v(&[0.0, 2.0])).unwrap();
    assert!(close(&p, &v(&[1.0, 1.0]), 1e-15));
    // discretized cone: points (t, s) with |s| <= t on a fine grid of the two boundary rays
    let z = v(&[0.0, 2.0]);
    let mut best = f64::INFINITY;
    let mut best_w = v(&[0.0, 0.0]);
    for i in 0..=40_000 {
        let t = 4.0 * i as f64 / 40_000.0;
        for s in [t, -t] {
            let w = v(&[t, s]);
            let d = (&w - &z).norm();
            if d < best {
                best = d;
                best_w = w;
            }
        }
    }
    assert!(close(&p, &best_w, 1e-3));
}

#[test]
fn dykstra_examples() {
    let ball = Set::ball(v(&[0.0, 0.0]), 1.0).unwrap();
    let z = v(&[3.0, 1.0]);
    let single = dykstra_project(std::slice::from_ref(&ball), &z, 1e-12, 100).unwrap();
    assert_eq!(single, ball.project(&z).unwrap());

    let quadrant = [
        Set::halfspace(v(&[1.0, 0.0]), 0.0).unwrap(),
        Set::halfspace(v(&[0.0, 1.0]), 0.0).unwrap(),
    ];
    let p = dykstra_project(&quadrant, &v(&[1.0, 1.0]), 1e-12, 100).unwrap();
    assert!(close(&p, &v(&[0.0, 0.0]), 1e-12));
}

/// Projection onto the cap {‖z‖ ≤ 1, y ≤ h} by KKT case analysis.
fn cap_projection(z: &Vector, h: f64) -> Vector {
    let radial = if z.norm() > 1.0 { z / z.norm() } else { z.clone() };
    if radial[1] <= h {
        return radial;
    }
    let flat = v(&[z[0], h]);
    if flat.norm() <= 1.0 {
        return flat;
    }
    // both constraints active: corner of the cap on the side of z
    let x = (1.0 - h * h).sqrt();
    v(&[x * z[0].signum(), h])
}

#[test]
fn dykstra_matches_cap_projection() {
    let h = 0.5;
    let sets = vec![
        Set::ball(v(&[0.0, 0.0]), 1.0).unwrap(),
        Set::halfspace(v(&[0.0, 1.0]), h).unwrap(),
    ];
    let cap = Set::intersection(sets).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(181);
    for _ in 0..200 {
        let z = v(&[rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)]);
        let p = cap.project(&z).unwrap();
        let oracle = cap_projection(&z, h);
        assert!(close(&p, &oracle, 1e-9), "{z}: {p} vs {oracle}");
    }
}

#[test]
fn dykstra_reports_nonconvergence() {
    let sets = vec![
        Set::ball(v(&[0.0, 0.0]), 1.0).unwrap(),
        Set::ball(v(&[1.9, 0.0]), 1.0).unwrap(),
    ];
    let err = dykstra_project(&sets, &v(&[1.0, 3.0]), 1e-15, 3).unwrap_err();
    match err {
        Error::Convergence { residual, iterations, .. } => {
            assert_eq!(iterations, 3);
            assert!(residual > 0.0);
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn boundary_eval_examples() {
    let ball = Set::ball(v(&[0.0, 0.0]), 2.0).unwrap();
    let e = ball.boundary_eval(&v(&[2.0, 0.0])).unwrap();
    assert_eq!(e.g, 0.0);
    assert_eq!(e.grad, v(&[4.0, 0.0]));

    let a = Matrix::from_row_slice(2, 2, &[0.25, 0.1, 0.1, 1.0]);
    let ell = Set::ellipsoid(a.clone(), v(&[0.0, 0.0])).unwrap();
    let z = v(&[1.0, 0.5]);
    assert!(close(&ell.boundary_eval(&z).unwrap().grad, &(&a * &z * 2.0), 1e-15));

    let hs = Set::halfspace(v(&[1.0, 2.0]), 1.0).unwrap();
    assert_eq!(hs.boundary_eval(&v(&[5.0, -1.0])).unwrap().hess.amax(), 0.0);

    let hp = Set::hyperplane(v(&[1.0, 0.0]), 0.0).unwrap();
    assert!(matches!(hp.boundary_eval(&v(&[0.0, 1.0])), Err(Error::Unsupported(_))));
}

#[test]
fn disc_in_plane_is_closed_form_and_restricted() {
    let plane = AffineSubspace::coordinate_plane(3, 2, 0.0).unwrap();
    let disc = Set::ball_in_affine(v(&[0.0, 0.0, 0.0]), 2.0, plane).unwrap();
    let p = disc.project(&v(&[3.0, 4.0, 7.0])).unwrap();
    assert!(close(&p, &v(&[1.2, 1.6, 0.0]), 1e-14));
    let e = disc.boundary_eval(&v(&[2.0, 0.0, 0.0])).unwrap();
    assert_eq!(e.grad.len(), 2);
    assert!((e.grad.norm() - 4.0).abs() < 1e-14);
    assert_eq!(disc.affine_hull().unwrap().dim(), 2);

    // a ball cut off-center by the plane becomes a smaller disc
    let plane = AffineSubspace::coordinate_plane(3, 2, 0.0).unwrap();
    let cut = Set::ball_in_affine(v(&[0.0, 0.0, 0.6]), 1.0, plane).unwrap();
    let p = cut.project(&v(&[5.0, 0.0, 0.0])).unwrap();
    assert!(close(&p, &v(&[0.8, 0.0, 0.0]), 1e-14));
    let plane = AffineSubspace::coordinate_plane(3, 2, 0.0).unwrap();
    assert!(Set::ball_in_affine(v(&[0.0, 0.0, 2.0]), 1.0, plane).is_err());
}

#[test]
fn affine_and_hyperplane_reflections_are_involutions() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..1000 {
        let a = Matrix::from_fn(2, 4, |_, _| rng.random_range(-1.0..1.0));
        let b = Vector::from_fn(2, |_, _| rng.random_range(-1.0..1.0));
        let l = Set::affine(AffineSubspace::new(a, b).unwrap());
        let normal = Vector::from_fn(4, |_, _| rng.random_range(-1.0..1.0));
        let h = Set::hyperplane(normal, rng.random_range(-1.0..1.0)).unwrap();
        let z = Vector::from_fn(4, |_, _| rng.random_range(-3.0..3.0));
        for s in [&l, &h] {
            let back = s.reflect(&s.reflect(&z).unwrap()).unwrap();
            assert!(close(&back, &z, 1e-12 * (1.0 + z.norm())));
        }
    }
}

fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    let m = Matrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    m.qr().q()
}

fn random_spd(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    let m = Matrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    &m * m.transpose() + Matrix::identity(n, n) * 0.3
}

/// A roster of sets covering every oracle family.
fn roster(rng: &mut ChaCha8Rng) -> Vec<Set> {
    let plane = AffineSubspace::new(
        Matrix::from_row_slice(1, 4, &[1.0, 1.0, 0.0, -1.0]),
        v(&[0.5]),
    )
    .unwrap();
    let e_hull = AffineSubspace::coordinate_plane(3, 0, 0.2).unwrap();
    vec![
        Set::ball(v(&[0.5, -0.2, 0.1]), 1.5).unwrap(),
        Set::halfspace(v(&[1.0, -2.0, 0.5]), 0.3).unwrap(),
        Set::hyperplane(v(&[0.0, 1.0, 1.0]), -1.0).unwrap(),
        Set::affine(AffineSubspace::new(Matrix::from_row_slice(2, 4, &[1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 1.0]), v(&[1.0, -1.0])).unwrap()),
        Set::ellipsoid(random_spd(rng, 3), v(&[0.1, 0.2, -0.3])).unwrap(),
        Set::second_order_cone(3).unwrap(),
        Set::cone_preimage(random_orthogonal(rng, 3), v(&[0.5, 0.1, -0.2])).unwrap(),
        Set::power_epigraph(1.5, 0.0).unwrap(),
        Set::power_epigraph(2.0, 1.0).unwrap(),
        Set::power_epigraph(3.0, 0.5).unwrap(),
        Set::psd_cone(3).unwrap(),
        Set::spectral_box_trace(3, 0.5).unwrap(),
        Set::ball_in_affine(v(&[0.0, 0.3, 0.0, 0.0]), 2.0, plane).unwrap(),
        Set::ellipsoid_in_affine(random_spd(rng, 3), v(&[0.2, 0.0, 0.1]), e_hull).unwrap(),
        Set::intersection(vec![
            Set::ball(v(&[0.0, 0.0]), 1.0).unwrap(),
            Set::halfspace(v(&[1.0, 1.0]), 0.5).unwrap(),
        ])
        .unwrap(),
    ]
}

fn random_point(rng: &mut ChaCha8Rng, n: usize) -> Vector {
    Vector::from_fn(n, |_, _| rng.random_range(-3.0..3.0))
}

fn projection_tol(set: &Set) -> f64 {
    match set {
        Set::Intersection(_) => 1e-9,
        _ => 1e-10,
    }
}

#[test]
fn projections_are_nonexpansive_idempotent_and_obtuse() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let sets = roster(&mut rng);
    for set in &sets {
        let n = set.dim();
        let tol = projection_tol(set);
        for _ in 0..1000 {
            let z1 = random_point(&mut rng, n);
            let z2 = random_point(&mut rng, n);
            let p1 = set.project(&z1).unwrap();
            let p2 = set.project(&z2).unwrap();
            assert!(
                (&p1 - &p2).norm() <= (&z1 - &z2).norm() + tol,
                "{} nonexpansive",
                set.kind()
            );
            let pp = set.project(&p1).unwrap();
            assert!(close(&pp, &p1, tol * (1.0 + p1.norm())), "{} idempotent", set.kind());
            assert!(set.contains(&p1, tol * (1.0 + p1.norm())).unwrap());
            let s = p2;
            let inner = (&z1 - &p1).dot(&(&s - &p1));
            let scale = 1.0 + (&z1 - &p1).norm() * (&s - &p1).norm();
            assert!(inner <= tol * scale, "{} obtuse angle: {inner}", set.kind());
        }
    }
}

#[test]
fn membership_matches_fixed_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let sets = roster(&mut rng);
    for set in &sets {
        for _ in 0..200 {
            let z = random_point(&mut rng, set.dim());
            let p = set.project(&z).unwrap();
            let fixed = (&p - &z).norm() <= 1e-10;
            assert_eq!(set.contains(&z, 1e-10).unwrap(), fixed);
        }
    }
}

/// Central differences of g and ∇g along the hull coordinate directions.
fn check_descriptor(set: &Set, z: &Vector) {
    let e = set.boundary_eval(z).unwrap();
    let basis = match set.affine_hull() {
        Some(h) => h.basis().clone(),
        None => Matrix::identity(set.dim(), set.dim()),
    };
    let d = basis.ncols();
    let h = 1e-5 * (1.0 + z.norm());
    let scale_g = 1.0 + e.grad.amax();
    let scale_h = 1.0 + e.hess.amax();
    for i in 0..d {
        let dir = basis.column(i).into_owned() * h;
        let ep = set.boundary_eval(&(z + &dir)).unwrap();
        let em = set.boundary_eval(&(z - &dir)).unwrap();
        let fd_g = (ep.g - em.g) / (2.0 * h);
        assert!(
            (fd_g - e.grad[i]).abs() <= 1e-5 * scale_g,
            "{} grad[{i}]: {fd_g} vs {}",
            set.kind(),
            e.grad[i]
        );
        let fd_h = (ep.grad - em.grad) / (2.0 * h);
        for j in 0..d {
            assert!(
                (fd_h[j] - e.hess[(j, i)]).abs() <= 1e-5 * scale_h,
                "{} hess[{j},{i}]: {} vs {}",
                set.kind(),
                fd_h[j],
                e.hess[(j, i)]
            );
        }
    }
}

#[test]
fn boundary_descriptors_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let sets = roster(&mut rng);
    for set in sets.iter().filter(|s| s.has_boundary_descriptor()) {
        let mut checked = 0;
        while checked < 30 {
            let z = random_point(&mut rng, set.dim());
            let p = set.project(&z).unwrap();
            if (&p - &z).norm() < 1e-3 {
                continue;
            }
            match set.boundary_eval(&p) {
                Ok(e) => {
                    // projections from outside the hull may land in the relative interior
                    if e.g.abs() > 1e-8 * (1.0 + e.grad.norm()) {
                        assert!(e.g < 0.0, "{} g = {}", set.kind(), e.g);
                        continue;
                    }
                    assert!(e.grad.norm() > 0.0);
                    check_descriptor(set, &p);
                    checked += 1;
                }
                Err(Error::Regularity(_)) => continue,
                Err(other) => panic!("{}: {other}", set.kind()),
            }
        }
    }
}

#[test]
fn soc_apex_is_irregular_and_cone_preimage_requires_orthogonality() {
    let k = Set::second_order_cone(3).unwrap();
    assert!(matches!(k.boundary_eval(&v(&[0.0, 0.0, 0.0])), Err(Error::Regularity(_))));
    let skew = Matrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
    assert!(matches!(Set::cone_preimage(skew, v(&[0.0, 0.0])), Err(Error::Unsupported(_))));
}

#[test]
fn spectral_hull_and_projection_invariants() {
    let set = Set::spectral_box_trace(3, 0.5).unwrap();
    let hull = set.affine_hull().unwrap();
    assert_eq!(hull.dim(), 5);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..100 {
        let z = random_point(&mut rng, 6);
        let p = smat(&set.project(&z).unwrap()).unwrap();
        assert!((p.trace() - 1.0).abs() < 1e-12);
        let top = crate::linalg::symmetric_eigh(&p).unwrap().values[2];
        assert!(top <= 0.5 + 1e-10);
        assert!((p.transpose() - &p).amax() == 0.0);
    }
    let _ = svec(&Matrix::identity(2, 2));
}

#[test]
fn nearly_round_ellipsoids_project_like_balls() {
    // round-off sized off-diagonals make the Newton iterate land on the bracket edge
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for case in 0..400 {
        let n = 2 + case % 3;
        let scale = 1.0 + rng.random_range(0.0..8.0) * f64::EPSILON;
        let mut shape = Matrix::identity(n, n) * scale;
        for i in 0..n {
            for j in 0..i {
                let e = rng.random_range(-2e-17..2e-17);
                shape[(i, j)] = e;
                shape[(j, i)] = e;
            }
        }
        let center = random_point(&mut rng, n);
        let ell = Set::ellipsoid(shape, center.clone()).unwrap();
        for _ in 0..10 {
            let z = random_point(&mut rng, n) * 2.0;
            let d = &z - &center;
            let expected = if d.norm() * scale.sqrt() <= 1.0 { z.clone() } else { &center + &d / (d.norm() * scale.sqrt()) };
            let p = ell.project(&z).unwrap();
            assert!(close(&p, &expected, 1e-12), "case {case}: {p} vs {expected}");
        }
    }
}
