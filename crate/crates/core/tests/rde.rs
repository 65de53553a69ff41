mod common;

use proptest::prelude::*;
use roughpaths::error::Error;
use roughpaths::path::SampledPath;
use roughpaths::rde::{
    linear_preset, solve, step_euler_n, step_simplified_euler_n, wong_zakai_solve, AffineConjugate, AffineFields,
    FiniteDifferenceFields, SchemeConfig, SchemeKind, SmoothNonlinear, VectorFieldSet, PRESET_START,
};
use roughpaths::tensor::TensorElement;

fn matvec(a: &[f64], y: &[f64]) -> Vec<f64> {
    let e = y.len();
    (0..e).map(|k| (0..e).map(|l| a[k * e + l] * y[l]).sum()).collect()
}

/// `exp(M) y` by its Taylor series, summed until the terms vanish.
fn expm_apply(m: &[f64], y: &[f64], terms: usize) -> Vec<f64> {
    let mut out = y.to_vec();
    let mut term = y.to_vec();
    for n in 1..=terms {
        term = matvec(m, &term).iter().map(|v| v / n as f64).collect();
        for (o, t) in out.iter_mut().zip(&term) {
            *o += t;
        }
    }
    out
}

fn combo(f: &AffineFields, dx: &[f64]) -> Vec<f64> {
    let mut m = vec![0.0; 4];
    for (i, &w) in dx.iter().enumerate() {
        for (a, b) in m.iter_mut().zip(f.matrix(i)) {
            *a += w * b;
        }
    }
    m
}

fn wiggly(k: usize) -> SampledPath {
    let t = SampledPath::uniform_times(k);
    let pts: Vec<Vec<f64>> = t.iter().map(|&s| vec![(7.0 * s).sin() * 0.8, s * s - 0.3 * s]).collect();
    SampledPath::from_points(t, &pts).unwrap()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // For linear fields on one straight segment the step-N scheme is the Taylor
    // polynomial of exp(Σ x^i A_i) applied to y.
    #[test]
    fn linear_step_is_truncated_exponential(a in -0.8f64..0.8, b in -0.8f64..0.8, y0 in -2.0f64..2.0, y1 in -2.0f64..2.0, level in 1usize..=4) {
        let f = linear_preset();
        let got = step_simplified_euler_n(&[y0, y1], &[a, b], &f, level).unwrap();
        let want = expm_apply(&combo(&f, &[a, b]), &[y0, y1], level);
        prop_assert!(dist(&got, &want) < 1e-13);
    }

    #[test]
    fn zero_increment_is_identity(y0 in -3.0f64..3.0, y1 in -3.0f64..3.0, level in 1usize..=4) {
        let sig = TensorElement::unit(2, level).unwrap();
        prop_assert_eq!(step_euler_n(&[y0, y1], &sig, &SmoothNonlinear, level).unwrap(), vec![y0, y1]);
    }

    #[test]
    fn constant_fields_add_the_increment(a in -2.0f64..2.0, b in -2.0f64..2.0, level in 1usize..=4) {
        let f = AffineFields::constant(vec![vec![1.0, 0.0], vec![0.5, 2.0]]).unwrap();
        let y = step_simplified_euler_n(&[0.1, 0.2], &[a, b], &f, level).unwrap();
        prop_assert!((y[0] - (0.1 + a + 0.5 * b)).abs() < 1e-14);
        prop_assert!((y[1] - (0.2 + 2.0 * b)).abs() < 1e-14);
    }
}

#[test]
fn runge_kutta_matches_matrix_exponential_at_fourth_order() {
    let f = linear_preset();
    let x = SampledPath::from_points(vec![0.0, 1.0], &[vec![0.0, 0.0], vec![1.2, -0.9]]).unwrap();
    let exact = expm_apply(&combo(&f, &[1.2, -0.9]), &PRESET_START, 60);
    let errs: Vec<f64> = [2usize, 4, 8, 16]
        .iter()
        .map(|&s| dist(wong_zakai_solve(&x, &f, &PRESET_START, s).unwrap().point(1), &exact))
        .collect();
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        assert!((12.0..20.0).contains(&ratio), "ratio {ratio} in {errs:?}");
    }
}

#[test]
fn deterministic_order_is_n_plus_one() {
    for level in 1..=3 {
        let fit = common::deterministic_order(level);
        let want = level as f64 + 1.0;
        assert!((fit.slope - want).abs() <= 0.3, "N={level}: slope {}", fit.slope);
    }
}

#[test]
fn solutions_are_affine_equivariant() {
    let a = vec![1.5, -0.4, 0.3, 0.8];
    let shift = vec![-0.7, 2.0];
    let w = AffineConjugate::new(SmoothNonlinear, a, shift).unwrap();
    let x = wiggly(32);
    let z0 = w.forward(&PRESET_START);
    for (kind, level) in [
        (SchemeKind::EulerN, 3),
        (SchemeKind::SimplifiedEulerN, 2),
        (SchemeKind::WongZakaiOde, 1),
    ] {
        let config = SchemeConfig {
            kind,
            level,
            partition: SampledPath::uniform_times(8),
            substeps: 4,
        };
        let y = solve(&config, &x, &SmoothNonlinear, &PRESET_START).unwrap();
        let z = solve(&config, &x, &w, &z0).unwrap();
        for j in 0..y.len() {
            let mapped = w.forward(y.point(j));
            assert!(dist(&mapped, z.point(j)) <= 1e-12 * (1.0 + mapped.iter().map(|v| v.abs()).sum::<f64>()), "{kind:?}");
        }
    }
}

#[test]
fn finite_difference_fields_track_analytic_ones() {
    let fd = FiniteDifferenceFields::new(2, 2, 1e-4, 3, |i, y, out| {
        let mut tmp = [0.0; 2];
        SmoothNonlinear.eval(i, y, &mut tmp);
        out.copy_from_slice(&tmp);
    })
    .unwrap();
    let x = wiggly(64);
    for level in 1..=3 {
        let config = SchemeConfig {
            kind: SchemeKind::EulerN,
            level,
            partition: SampledPath::uniform_times(16),
            substeps: 1,
        };
        let a = solve(&config, &x, &SmoothNonlinear, &PRESET_START).unwrap();
        let b = solve(&config, &x, &fd, &PRESET_START).unwrap();
        for j in 0..a.len() {
            let scale = a.point(j).iter().map(|v| v.abs()).fold(1.0f64, f64::max);
            assert!(dist(a.point(j), b.point(j)) <= 1e-6 * scale, "N={level}");
        }
    }
}

#[test]
fn single_interval_and_refinement() {
    let x = wiggly(64);
    let whole = SchemeConfig {
        kind: SchemeKind::SimplifiedEulerN,
        level: 2,
        partition: vec![0.0, 1.0],
        substeps: 1,
    };
    let y = solve(&whole, &x, &SmoothNonlinear, &PRESET_START).unwrap();
    let inc = x.increment(0.0, 1.0).unwrap();
    assert_eq!(y.point(1), &step_simplified_euler_n(&PRESET_START, &inc, &SmoothNonlinear, 2).unwrap()[..]);

    // Finer partitions approach the ODE solution along the same driver.
    let exact = wong_zakai_solve(&x, &SmoothNonlinear, &PRESET_START, 8).unwrap();
    let end = exact.point(exact.len() - 1);
    let err = |k: usize| {
        let c = SchemeConfig {
            kind: SchemeKind::EulerN,
            level: 2,
            partition: SampledPath::uniform_times(k),
            substeps: 1,
        };
        let y = solve(&c, &x, &SmoothNonlinear, &PRESET_START).unwrap();
        dist(y.point(y.len() - 1), end)
    };
    assert!(err(64) < err(16) && err(16) < err(4));
}

#[test]
fn contract_and_divergence_errors() {
    let x = wiggly(8);
    let base = SchemeConfig {
        kind: SchemeKind::SimplifiedEulerN,
        level: 2,
        partition: vec![0.0, 0.5, 1.0],
        substeps: 1,
    };
    assert!(solve(&base, &x, &SmoothNonlinear, &[1.0]).is_err());
    assert!(solve(&SchemeConfig { partition: vec![0.0], ..base.clone() }, &x, &SmoothNonlinear, &PRESET_START).is_err());
    assert!(solve(&SchemeConfig { partition: vec![0.5, 0.5, 1.0], ..base.clone() }, &x, &SmoothNonlinear, &PRESET_START).is_err());
    assert!(solve(&SchemeConfig { level: 0, ..base.clone() }, &x, &SmoothNonlinear, &PRESET_START).is_err());
    let one_d = SampledPath::from_points(vec![0.0, 1.0], &[vec![0.0], vec![1.0]]).unwrap();
    assert!(solve(&base, &one_d, &SmoothNonlinear, &PRESET_START).is_err());

    let grow = AffineFields::linear(vec![vec![1.0, 0.0, 0.0, 1.0], vec![0.0; 4]], 2).unwrap();
    let big = SampledPath::from_points(vec![0.0, 0.5, 1.0], &[vec![0.0, 0.0], vec![1.0, 0.0], vec![60.0, 0.0]]).unwrap();
    let ode = SchemeConfig {
        kind: SchemeKind::WongZakaiOde,
        level: 1,
        partition: vec![0.0, 0.5, 1.0],
        substeps: 16,
    };
    assert!(matches!(
        solve(&ode, &big, &grow, &PRESET_START),
        Err(Error::Divergence { segment: 1, .. })
    ));
}
