use super::*;
use crate::catalog::{by_name, NAMES};
use crate::solvers::{run, SolverConfig};

fn v(x: &[f64]) -> Vector {
    Vector::from_column_slice(x)
}

fn probes(n: usize) -> Vec<Vector> {
    (0..5)
        .map(|s| Vector::from_fn(n, |i, _| ((i * 7 + s * 3) as f64 * 0.37).sin() * (1.0 + s as f64)))
        .collect()
}

#[test]
fn catalog_entries_survive_a_json_round_trip() {
    for name in NAMES {
        let entry = by_name(name).unwrap();
        let text = ProblemFileV1::from_entry(&entry).to_json();
        let file = ProblemFileV1::parse(&text).unwrap();
        let (problem, z0) = file.build().unwrap();
        assert_eq!(z0.as_ref(), Some(&entry.suggested_z0), "{name}");
        assert_eq!(problem.reference_solution, entry.problem.reference_solution);
        assert_eq!(problem.known_constants, entry.problem.known_constants);
        assert_eq!(problem.common_hull.is_some(), entry.problem.common_hull.is_some());
        for z in probes(problem.dim()) {
            let a = problem.x.project(&z).unwrap();
            let b = entry.problem.x.project(&z).unwrap();
            assert!((a - b).norm() <= 1e-12, "{name} X");
            let a = problem.y.project(&z).unwrap();
            let b = entry.problem.y.project(&z).unwrap();
            assert!((&a - &b).norm() <= 1e-12, "{name} Y {}", (a - b).norm());
        }
    }
}

#[test]
fn handwritten_problem_file() {
    let text = r#"{
        "version": "1",
        "x": { "kind": "ball_in_affine", "center": [0, 0, 0], "radius": 2,
               "hull": { "a": [[0, 0, 1]], "b": [0] } },
        "y": { "kind": "dykstra_intersection", "sets": [
                 { "kind": "halfspace", "normal": [0, 1, 0], "offset": 1 },
                 { "kind": "affine_subspace", "a": [[0, 0, 1]], "b": [0] } ] },
        "hull": { "a": [[0, 0, 1]], "b": [0] },
        "z0": [0, 5, 1]
    }"#;
    let (problem, z0) = ProblemFileV1::parse(text).unwrap().build().unwrap();
    assert_eq!(problem.dim(), 3);
    let trace = run(&problem, &SolverConfig::default(), &z0.unwrap()).unwrap();
    assert_eq!(trace.termination, Termination::Feasible);
    let z = trace.last();
    assert!(z[1] <= 1.0 + 1e-9 && z.norm() <= 2.0 + 1e-9 && z[2].abs() <= 1e-12);
}

#[test]
fn whole_space_hull_keeps_its_dimension() {
    let hull = HullDescriptor::from_subspace(&AffineSubspace::whole_space(4));
    let json = serde_json::to_string(&hull).unwrap();
    let back: HullDescriptor = serde_json::from_str(&json).unwrap();
    assert_eq!(back.to_subspace().unwrap().ambient_dim(), 4);
}

#[test]
fn bad_problem_files_are_input_errors() {
    let ball = r#"{ "kind": "ball", "center": [0, 0], "radius": 1 }"#;
    let cases = [
        "not json".to_string(),
        format!(r#"{{ "version": "2", "x": {ball}, "y": {ball} }}"#),
        format!(r#"{{ "version": "1", "x": {ball} }}"#),
        format!(r#"{{ "version": "1", "x": {ball}, "y": {{ "kind": "blob" }} }}"#),
        format!(r#"{{ "version": "1", "x": {ball}, "y": {ball}, "extra": 1 }}"#),
        format!(r#"{{ "version": "1", "x": {ball}, "y": {{ "kind": "ball", "center": [0, 0], "radius": 1, "colour": 3 }} }}"#),
        format!(r#"{{ "version": "1", "x": {ball}, "y": {{ "kind": "ball", "center": [0, 0, 0], "radius": 1 }} }}"#),
        format!(r#"{{ "version": "1", "x": {ball}, "y": {ball}, "z0": [1, 2, 3] }}"#),
        format!(r#"{{ "version": "1", "x": {ball}, "y": {ball}, "hull": {{ "a": [[1, 0], [0]], "b": [0, 0] }} }}"#),
        format!(r#"{{ "version": "1", "x": {ball}, "y": {{ "kind": "ball", "center": [0, 0], "radius": -1 }} }}"#),
    ];
    for text in &cases {
        let result = ProblemFileV1::parse(text).and_then(|f| f.build());
        assert!(matches!(result, Err(Error::Input(_))), "{text}");
    }
}

fn synthetic_trace(with_reference: bool) -> SolveTrace {
    let iterates = vec![
        v(&[0.1, -2.5e-300, 1.0 / 3.0]),
        v(&[f64::MIN_POSITIVE, 5e-324, -0.0]),
        v(&[1e300, std::f64::consts::PI, 123456789.123456789]),
    ];
    SolveTrace {
        method: Method::Ccrm,
        residuals: vec![(0.7, 1e-17), (3.0000000000000004, 0.0), (2.2250738585072014e-308, 9.999999999999999e22)],
        distances_to_reference: with_reference.then(|| vec![3.54, 9.24e-2, 5.45e-22]),
        iterates,
        centralized_points: None,
        circum_status: None,
        termination: Termination::MaxIter,
    }
}

#[test]
fn trace_csv_round_trips_bit_for_bit() {
    for with_reference in [true, false] {
        let trace = synthetic_trace(with_reference);
        let mut buf = Vec::new();
        write_trace_csv(&trace, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("k,z1,z2,z3,dist_X,dist_Y,dist_ref\n"), "{text}");
        let table = read_trace_csv(buf.as_slice()).unwrap();
        for (a, b) in table.iterates.iter().zip(&trace.iterates) {
            for (x, y) in a.iter().zip(b.iter()) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
        for (a, b) in table.residuals.iter().zip(&trace.residuals) {
            assert_eq!((a.0.to_bits(), a.1.to_bits()), (b.0.to_bits(), b.1.to_bits()));
        }
        match (&table.distances_to_reference, &trace.distances_to_reference) {
            (Some(a), Some(b)) => assert!(a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())),
            (None, None) => {}
            other => panic!("{other:?}"),
        }
    }
}

#[test]
fn solver_trace_csv_round_trips() {
    let entry = by_name("discs3d").unwrap();
    let trace = run(&entry.problem, &SolverConfig::default(), &entry.suggested_z0).unwrap();
    let mut buf = Vec::new();
    write_trace_csv(&trace, &mut buf).unwrap();
    let table = read_trace_csv(buf.as_slice()).unwrap();
    assert_eq!(table.iterates, trace.iterates);
    assert_eq!(table.residuals, trace.residuals);
    assert_eq!(table.distances_to_reference, trace.distances_to_reference);
}

#[test]
fn malformed_trace_csv_is_rejected() {
    for text in [
        "a,b\n1,2\n",
        "k,z1,dist_X,dist_Y,dist_ref\n0,1,0,0,\n2,1,0,0,\n",
        "k,z1,dist_X,dist_Y,dist_ref\n0,x,0,0,\n",
        "k,z1,dist_X,dist_Y,dist_ref\n0,1,0,0,\n1,1,0,0,0.5\n",
    ] {
        assert!(read_trace_csv(text.as_bytes()).is_err(), "{text}");
    }
}

#[test]
fn trace_json_carries_internals() {
    let entry = by_name("discs3d").unwrap();
    let cfg = SolverConfig {
        record_internals: true,
        ..SolverConfig::default()
    };
    let trace = run(&entry.problem, &cfg, &entry.suggested_z0).unwrap();
    let json: serde_json::Value = serde_json::to_value(TraceJson::from_trace(&trace)).unwrap();
    assert_eq!(json["method"], "ccrm");
    assert_eq!(json["termination"], "feasible");
    assert_eq!(json["iterates"].as_array().unwrap().len(), trace.len());
    assert_eq!(json["centralized_points"].as_array().unwrap().len(), trace.len() - 1);
    assert_eq!(json["circum_status"][0], "nondegenerate");
}

#[test]
fn disc_report_is_quadratic_within_both_bounds() {
    let entry = by_name("discs3d").unwrap();
    let trace = run(&entry.problem, &SolverConfig::default(), &entry.suggested_z0).unwrap();
    let report = RunReport::build("discs3d", &entry.problem, &entry.expected, &trace);
    assert!(matches!(report.classification, Some(RateClass::Quadratic { .. })), "{report:?}");
    assert_eq!(report.pass_flags.expected_rate, Some(true));
    assert_eq!(report.pass_flags.within_theorem_bound, Some(true));
    assert!(report.pass_flags.feasible);
    let json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
    for key in ["classification", "constants", "ratios", "pass_flags"] {
        assert!(json.get(key).is_some(), "{key}");
    }
    assert_eq!(json["classification"]["class"], "quadratic");
    assert_eq!(json["constants"]["kappa_x"], 0.5);
}

#[test]
fn report_without_enough_points_says_why() {
    let entry = by_name("discs3d").unwrap();
    let z_bar = entry.reference().unwrap().clone();
    let trace = run(&entry.problem, &SolverConfig::default(), &z_bar).unwrap();
    let report = RunReport::build("discs3d", &entry.problem, &entry.expected, &trace);
    assert_eq!(report.iterations, 0);
    assert!(report.classification.is_none());
    assert!(report.classification_note.is_some());
    assert_eq!(report.pass_flags.expected_rate, Some(false));
}

#[test]
fn atomic_write_replaces_whole_files() {
    let dir = std::env::temp_dir().join(format!("ccrm-io-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join("out.txt");
    write_file_atomic(&path, b"first").unwrap();
    write_file_atomic(&path, b"second").unwrap();
    assert_eq!(fs::read_to_string(&path).unwrap(), "second");
    assert_eq!(fs::read_dir(&dir).unwrap().count(), 1);
    assert!(write_file_atomic(&dir.join("missing").join("x.txt"), b"x").is_err());
    fs::remove_dir_all(&dir).unwrap();
}
