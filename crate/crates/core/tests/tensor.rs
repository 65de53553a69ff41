use proptest::prelude::*;
use roughpaths::tensor::{pvar_level_distances, rho_pvar_distance, unflatten, TensorElement};

/// Level-wise product written directly over multi-indices, kept independent of the
/// flattened kernels in the library.
fn naive_mul(g: &TensorElement, h: &TensorElement) -> Vec<Vec<f64>> {
    let (d, depth) = (g.dim(), g.depth());
    (0..=depth)
        .map(|n| {
            (0..d.pow(n as u32))
                .map(|flat| {
                    let w = unflatten(flat, d, n);
                    (0..=n)
                        .map(|i| g.coefficient(&w[..i]).unwrap() * h.coefficient(&w[i..]).unwrap())
                        .sum()
                })
                .collect()
        })
        .collect()
}

fn element(dim: usize, depth: usize) -> impl Strategy<Value = TensorElement> {
    let total: usize = (0..=depth).map(|n| dim.pow(n as u32)).sum();
    prop::collection::vec(-1.0f64..1.0, total).prop_map(move |flat| {
        let mut levels = Vec::new();
        let mut at = 0;
        for n in 0..=depth {
            let size = dim.pow(n as u32);
            levels.push(flat[at..at + size].to_vec());
            at += size;
        }
        levels[0][0] = 1.0;
        TensorElement::from_levels(dim, levels).unwrap()
    })
}

fn vector(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.5f64..1.5, dim)
}

fn max_gap(a: &TensorElement, b: &TensorElement) -> f64 {
    a.max_abs_diff(b).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_matches_naive_oracle(g in element(3, 3), h in element(3, 3)) {
        let fast = g.mul(&h).unwrap();
        for (n, level) in naive_mul(&g, &h).iter().enumerate() {
            for (a, b) in fast.level(n).iter().zip(level) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn associativity(g in element(2, 4), h in element(2, 4), k in element(2, 4)) {
        let left = g.mul(&h).unwrap().mul(&k).unwrap();
        let right = g.mul(&h.mul(&k).unwrap()).unwrap();
        prop_assert!(max_gap(&left, &right) < 1e-12);
    }

    #[test]
    fn unit_laws_are_exact(g in element(3, 3)) {
        let one = TensorElement::unit(3, 3).unwrap();
        prop_assert_eq!(one.mul(&g).unwrap(), g.clone());
        prop_assert_eq!(g.mul(&one).unwrap(), g);
    }

    #[test]
    fn exp_log_round_trip(v in vector(3)) {
        let l = TensorElement::exp(&v, 5).unwrap().log().unwrap();
        for (a, b) in l.level(1).iter().zip(&v) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        for n in 2..=5 {
            prop_assert!(l.level(n).iter().all(|x| x.abs() < 1e-12));
        }
    }

    #[test]
    fn inverse_of_exp_is_exp_of_negative(v in vector(2)) {
        let neg: Vec<f64> = v.iter().map(|x| -x).collect();
        let inv = TensorElement::exp(&v, 4).unwrap().inverse().unwrap();
        prop_assert!(max_gap(&inv, &TensorElement::exp(&neg, 4).unwrap()) < 1e-13);
    }

    #[test]
    fn group_like_times_inverse_is_unit(a in vector(2), b in vector(2), c in vector(2)) {
        let g = TensorElement::exp(&a, 4).unwrap()
            .mul(&TensorElement::exp(&b, 4).unwrap()).unwrap()
            .mul(&TensorElement::exp(&c, 4).unwrap()).unwrap();
        let e = g.mul(&g.inverse().unwrap()).unwrap();
        prop_assert!(max_gap(&e, &TensorElement::unit(2, 4).unwrap()) < 1e-12);
    }

    #[test]
    fn dilation_is_a_homomorphism(g in element(2, 4), h in element(2, 4), lambda in -2.0f64..2.0) {
        let left = g.mul(&h).unwrap().dilate(lambda);
        let right = g.dilate(lambda).mul(&h.dilate(lambda)).unwrap();
        prop_assert!(max_gap(&left, &right) < 1e-12);
    }

    #[test]
    fn level_two_symmetric_part_of_group_like(a in vector(3), b in vector(3)) {
        let g = TensorElement::exp(&a, 2).unwrap().mul(&TensorElement::exp(&b, 2).unwrap()).unwrap();
        let x = g.level(1);
        for i in 0..3 {
            for j in 0..3 {
                let sym = 0.5 * (g.level(2)[3 * i + j] + g.level(2)[3 * j + i]);
                prop_assert!((sym - 0.5 * x[i] * x[j]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn homogeneous_norm_of_exp_is_vector_norm(v in vector(3), depth in 1usize..6) {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assert!((TensorElement::exp(&v, depth).unwrap().homogeneous_norm() - norm).abs() < 1e-12);
    }

    #[test]
    fn pvar_distance_is_a_pseudo_metric(
        x in prop::collection::vec(vector(2), 6),
        y in prop::collection::vec(vector(2), 6),
        z in prop::collection::vec(vector(2), 6),
        p in 2.0f64..4.0,
    ) {
        let lift = |v: &Vec<Vec<f64>>| -> Vec<TensorElement> {
            v.iter().map(|i| TensorElement::exp(i, 2).unwrap()).collect()
        };
        let (x, y, z) = (lift(&x), lift(&y), lift(&z));
        let d = |a: &[TensorElement], b: &[TensorElement]| rho_pvar_distance(a, b, p).unwrap();
        prop_assert_eq!(d(&x, &y), d(&y, &x));
        prop_assert_eq!(d(&x, &x), 0.0);
        prop_assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z) + 1e-12);
    }
}

/// All sub-partitions of `0..=m` as lists of breakpoints.
fn sub_partitions(m: usize) -> Vec<Vec<usize>> {
    (0..1u32 << (m - 1))
        .map(|mask| {
            let mut pts = vec![0];
            pts.extend((1..m).filter(|i| mask & (1 << (i - 1)) != 0));
            pts.push(m);
            pts
        })
        .collect()
}

#[test]
fn pvar_matches_exhaustive_enumeration() {
    let xs = [[0.3, -0.2], [1.1, 0.4], [-0.7, 0.9]];
    let ys = [[0.1, 0.5], [0.2, -0.6], [0.4, 0.3]];
    let depth = 2;
    let x: Vec<_> = xs.iter().map(|v| TensorElement::exp(v, depth).unwrap()).collect();
    let y: Vec<_> = ys.iter().map(|v| TensorElement::exp(v, depth).unwrap()).collect();
    for p in [2.0, 2.5, 3.0] {
        let got = pvar_level_distances(&x, &y, p).unwrap();
        for n in 1..=depth {
            let q = p / n as f64;
            let mut best = 0.0f64;
            for pts in sub_partitions(3) {
                let mut total = 0.0;
                for w in pts.windows(2) {
                    // Chen products of the raw increments over [w0, w1].
                    let mut gx = TensorElement::unit(2, depth).unwrap();
                    let mut gy = gx.clone();
                    for i in w[0]..w[1] {
                        gx = gx.mul(&x[i]).unwrap();
                        gy = gy.mul(&y[i]).unwrap();
                    }
                    total += gx.sub(&gy).unwrap().level_norm(n).powf(q);
                }
                best = best.max(total);
            }
            assert!((got[n - 1] - best.powf(1.0 / q)).abs() < 1e-12, "n={n} p={p}");
        }
    }
}

#[test]
fn single_jump_distance() {
    let x: Vec<_> = [0.0, 0.0, 0.0]
        .iter()
        .map(|&v| TensorElement::exp(&[v], 1).unwrap())
        .collect();
    let mut y = x.clone();
    y[1] = TensorElement::exp(&[0.25], 1).unwrap();
    assert!((rho_pvar_distance(&x, &y, 1.5).unwrap() - 0.25).abs() < 1e-15);
    assert!(rho_pvar_distance(&x, &y, 0.5).is_err());
}

#[test]
fn antisymmetric_area_norm() {
    let a = 0.8;
    let g = TensorElement::from_levels(2, vec![vec![1.0], vec![0.0, 0.0], vec![0.0, a, -a, 0.0]]).unwrap();
    let want = (2.0 * a * 2f64.sqrt()).sqrt();
    assert!((g.homogeneous_norm() - want).abs() < 1e-14);
}

#[test]
fn contract_errors() {
    let g = TensorElement::unit(2, 2).unwrap();
    let h = TensorElement::unit(3, 2).unwrap();
    assert!(g.mul(&h).is_err());
    assert!(TensorElement::zero(2, 2).unwrap().inverse().is_err());
    assert!(g.scale(2.0).log().is_err());
    assert!(TensorElement::zero(10, 8).is_err());
}
