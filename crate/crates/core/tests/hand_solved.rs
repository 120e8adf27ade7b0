//! Systems with closed-form solutions, used to check the solver.

use fewnomial::solver::{solve_real, SolveOptions};
use fewnomial::sparse_system::{eliminate_binomials, FewnomialSystem};

fn sys(text: &str) -> FewnomialSystem {
    FewnomialSystem::from_json(text).unwrap()
}

fn check(text: &str, positive: usize, real: usize, points: &[&[f64]]) {
    let s = solve_real(&sys(text), &SolveOptions::default()).unwrap();
    assert_eq!(s.count_positive(), positive, "{text}");
    assert_eq!(s.count_real(), real, "{text}");
    assert!(s.suspects.is_empty());
    for p in points {
        assert!(
            s.counted().any(|q| q.x.iter().zip(*p).all(|(a, b)| (a - b).abs() < 1e-9)),
            "missing {p:?}"
        );
    }
}

#[test]
fn worked_example() {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let psi = (1.0 - 5f64.sqrt()) / 2.0;
    check(
        include_str!("../../../data/worked_example.json"),
        1,
        2,
        &[&[phi, phi], &[psi, psi]],
    );
}

#[test]
fn product_and_sum() {
    // xy = 6, x + y = 5
    check(
        r#"{"n":2,"polys":[[{"e":[1,1],"c":"1"},{"e":[0,0],"c":"-6"}],[{"e":[1,0],"c":"1"},{"e":[0,1],"c":"1"},{"e":[0,0],"c":"-5"}]]}"#,
        2,
        2,
        &[&[2.0, 3.0], &[3.0, 2.0]],
    );
}

#[test]
fn circle_and_hyperbola() {
    // x^2 + y^2 = 5, xy = 2
    check(
        r#"{"n":2,"polys":[[{"e":[2,0],"c":"1"},{"e":[0,2],"c":"1"},{"e":[0,0],"c":"-5"}],[{"e":[1,1],"c":"1"},{"e":[0,0],"c":"-2"}]]}"#,
        2,
        4,
        &[&[1.0, 2.0], &[2.0, 1.0], &[-1.0, -2.0], &[-2.0, -1.0]],
    );
}

#[test]
fn separated_squares() {
    // x^2 = 2, y^2 = 3
    let (a, b) = (2f64.sqrt(), 3f64.sqrt());
    check(
        r#"{"n":2,"polys":[[{"e":[2,0],"c":"1"},{"e":[0,0],"c":"-2"}],[{"e":[0,2],"c":"1"},{"e":[0,0],"c":"-3"}]]}"#,
        1,
        4,
        &[&[a, b], &[-a, b], &[a, -b], &[-a, -b]],
    );
}

#[test]
fn cubic_with_three_positive_roots() {
    // (x - 1)(x - 2)(x - 3)
    check(
        r#"{"n":1,"polys":[[{"e":[3],"c":"1"},{"e":[2],"c":"-6"},{"e":[1],"c":"11"},{"e":[0],"c":"-6"}]]}"#,
        3,
        3,
        &[&[1.0], &[2.0], &[3.0]],
    );
}

#[test]
fn laurent_reciprocal() {
    // x + 1/x = 5/2, y = x
    check(
        r#"{"n":2,"polys":[[{"e":[1,0],"c":"1"},{"e":[-1,0],"c":"1"},{"e":[0,0],"c":"-5/2"}],[{"e":[0,1],"c":"1"},{"e":[1,0],"c":"-1"}]]}"#,
        2,
        2,
        &[&[2.0, 2.0], &[0.5, 0.5]],
    );
}

#[test]
fn symmetric_functions_in_three_variables() {
    // elementary symmetric functions of {1, 2, 3}
    let text = r#"{"n":3,"polys":[
        [{"e":[1,0,0],"c":"1"},{"e":[0,1,0],"c":"1"},{"e":[0,0,1],"c":"1"},{"e":[0,0,0],"c":"-6"}],
        [{"e":[1,1,0],"c":"1"},{"e":[0,1,1],"c":"1"},{"e":[1,0,1],"c":"1"},{"e":[0,0,0],"c":"-11"}],
        [{"e":[1,1,1],"c":"1"},{"e":[0,0,0],"c":"-6"}]]}"#;
    check(text, 6, 6, &[&[1.0, 2.0, 3.0], &[3.0, 1.0, 2.0], &[2.0, 3.0, 1.0]]);
}

#[test]
fn binomial_elimination_keeps_positive_count() {
    // xy = 2, x + y = 3
    let text = r#"{"n":2,"polys":[[{"e":[1,1],"c":"1"},{"e":[0,0],"c":"-2"}],[{"e":[1,0],"c":"1"},{"e":[0,1],"c":"1"},{"e":[0,0],"c":"-3"}]]}"#;
    let opts = SolveOptions::default();
    let before = solve_real(&sys(text), &opts).unwrap().count_positive();
    let reduced = eliminate_binomials(&sys(text)).unwrap();
    assert_eq!(reduced.n(), 1);
    assert_eq!(before, 2);
    assert_eq!(solve_real(&reduced, &opts).unwrap().count_positive(), before);
}
