use proptest::prelude::*;
use roughpaths::gaussian::{sample_paths, uniform_partition, CovarianceModel, GaussianSampler};
use roughpaths::harness::fit_rate;
use roughpaths::path::SampledPath;
use roughpaths::signature::full_signature;
use roughpaths::young::{
    covariance_l2_identity_check, fubini_diag, interpolation_check, iterated_2d, l2_identity_from_samples,
    min_lift, v_infinity, young_integral_2d, GridFunction2D, GridFunctionND, GridRect,
};

fn grid_fn(n: usize) -> impl Strategy<Value = GridFunction2D> {
    prop::collection::vec(-1.0f64..1.0, n * n).prop_map(move |v| {
        let ax = uniform_partition(n - 1);
        GridFunction2D::new(ax.clone(), ax, v).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn young_sum_is_bilinear(f1 in grid_fn(6), f2 in grid_fn(6), g1 in grid_fn(6), g2 in grid_fn(6), a in -2.0f64..2.0) {
        let r = f1.full_rect();
        let combo = |p: &GridFunction2D, q: &GridFunction2D| {
            let v: Vec<f64> = p.values().iter().zip(q.values()).map(|(x, y)| a * x + y).collect();
            GridFunction2D::new(p.xs().to_vec(), p.ys().to_vec(), v).unwrap()
        };
        let i = |f: &GridFunction2D, g: &GridFunction2D| young_integral_2d(f, g, &r).unwrap();
        prop_assert!((i(&combo(&f1, &f2), &g1) - (a * i(&f1, &g1) + i(&f2, &g1))).abs() < 1e-12);
        prop_assert!((i(&f1, &combo(&g1, &g2)) - (a * i(&f1, &g1) + i(&f1, &g2))).abs() < 1e-12);
    }

    #[test]
    fn nd_increments_add_over_split_boxes(
        v in prop::collection::vec(-1.0f64..1.0, 4 * 4 * 4 * 4),
        cut in 1usize..3,
        axis in 0usize..4,
    ) {
        let ax = uniform_partition(3);
        let f = GridFunctionND::new(vec![ax.clone(), ax.clone(), ax.clone(), ax], v).unwrap();
        let whole = [(0, 3); 4];
        let (mut lo, mut hi) = (whole, whole);
        lo[axis] = (0, cut);
        hi[axis] = (cut, 3);
        let sum = f.rect_increment(&lo).unwrap() + f.rect_increment(&hi).unwrap();
        prop_assert!((sum - f.rect_increment(&whole).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn separable_4d_increment_factorizes(
        gv in prop::collection::vec(-1.0f64..1.0, 16),
        hv in prop::collection::vec(-1.0f64..1.0, 16),
        b in prop::collection::vec((0usize..4, 0usize..4), 4),
    ) {
        let ax = uniform_partition(3);
        let idx = |x: f64| (x * 3.0).round() as usize;
        let g = GridFunction2D::new(ax.clone(), ax.clone(), gv.clone()).unwrap();
        let h = GridFunction2D::new(ax.clone(), ax.clone(), hv.clone()).unwrap();
        let f = GridFunctionND::from_fn(vec![ax.clone(), ax.clone(), ax.clone(), ax.clone()], |p| {
            gv[idx(p[0]) * 4 + idx(p[1])] * hv[idx(p[2]) * 4 + idx(p[3])]
        }).unwrap();
        let bounds: Vec<(usize, usize)> = b.iter().map(|&(x, y)| (x.min(y), x.max(y))).collect();
        let want = g.increment(bounds[0].0, bounds[0].1, bounds[1].0, bounds[1].1)
            * h.increment(bounds[2].0, bounds[2].1, bounds[3].0, bounds[3].1);
        prop_assert!((f.rect_increment(&bounds).unwrap() - want).abs() < 1e-12);
    }
}

#[test]
fn nd_increment_examples() {
    let ax = uniform_partition(4);
    let c = GridFunctionND::from_fn(vec![ax.clone(), ax.clone(), ax.clone()], |_| 7.0).unwrap();
    assert_eq!(c.rect_increment(&[(0, 4), (1, 3), (2, 4)]).unwrap(), 0.0);
    let uv = GridFunctionND::from_fn(vec![ax.clone(), ax.clone()], |p| p[0] * p[1]).unwrap();
    assert!((uv.rect_increment(&[(1, 3), (0, 4)]).unwrap() - 0.5 * 1.0).abs() < 1e-15);
    assert!(uv.rect_increment(&[(3, 1), (0, 4)]).is_err());
    assert!(uv.rect_increment(&[(0, 5), (0, 4)]).is_err());
    let two = GridFunction2D::from_fn(ax.clone(), ax.clone(), |u, v| (u + 1.0).ln() * v.cos()).unwrap();
    let nd = GridFunctionND::from(&two);
    assert!((nd.rect_increment(&[(1, 4), (0, 2)]).unwrap() - two.increment(1, 4, 0, 2)).abs() < 1e-15);
}

#[test]
fn young_integral_examples() {
    let ax = uniform_partition(512);
    let uv = GridFunction2D::from_fn(ax.clone(), ax.clone(), |u, v| u * v).unwrap();
    let one = GridFunction2D::from_fn(ax.clone(), ax.clone(), |_, _| 1.0).unwrap();
    let r = uv.full_rect();
    assert!((young_integral_2d(&uv, &uv, &r).unwrap() - 0.25).abs() < 1e-2);
    assert!((young_integral_2d(&one, &uv, &r).unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(young_integral_2d(&uv, &one, &r).unwrap(), 0.0);
    let other = GridFunction2D::from_fn(uniform_partition(4), uniform_partition(4), |_, _| 0.0).unwrap();
    assert!(young_integral_2d(&uv, &other, &other.full_rect()).is_err());
}

#[test]
fn young_sums_converge_under_refinement() {
    let f = |u: f64, v: f64| (3.0 * u).sin() * (1.0 + v * v);
    let g = |u: f64, v: f64| (u * v).exp();
    let value = |k: usize| {
        let ax = uniform_partition(k);
        let fg = GridFunction2D::from_fn(ax.clone(), ax.clone(), f).unwrap();
        let gg = GridFunction2D::from_fn(ax.clone(), ax, g).unwrap();
        young_integral_2d(&fg, &gg, &fg.full_rect()).unwrap()
    };
    let pts: Vec<(f64, f64)> = [16usize, 32, 64, 128, 256]
        .iter()
        .map(|&k| (k as f64, (value(k) - value(2 * k)).abs()))
        .collect();
    let slope = fit_rate(&pts).unwrap().slope;
    assert!(slope > 0.5, "{slope}");
}

/// Four nested loops over cell pairs, with the inner sum restricted to cells strictly
/// below and to the left of the outer cell's lower corner.
fn brute_iterated(f: &GridFunction2D, g1: &GridFunction2D, g2: &GridFunction2D) -> f64 {
    let (nx, ny) = f.shape();
    let mut total = 0.0;
    for p in 0..nx - 1 {
        for q in 0..ny - 1 {
            let mut inner = 0.0;
            for a in 0..p {
                for b in 0..q {
                    inner += f.value(a, b) * g1.increment(a, a + 1, b, b + 1);
                }
            }
            total += inner * g2.increment(p, p + 1, q, q + 1);
        }
    }
    total
}

#[test]
fn iterated_integral_matches_nested_sums() {
    let bm = CovarianceModel::bm(1).unwrap();
    for k in [16, 32] {
        let r = bm.grid_covariance(&uniform_partition(k)).unwrap();
        let f = r.grid();
        let got = iterated_2d(f, &[f, f], &f.full_rect(), true).unwrap();
        let want = brute_iterated(f, f, f);
        assert!((got - want).abs() <= 1e-12 * want.abs(), "k={k}: {got} vs {want}");
    }
    // The 128 grid stays within 2% of a much finer grid.
    let at = |k: usize| {
        let r = bm.grid_covariance(&uniform_partition(k)).unwrap();
        iterated_2d(r.grid(), &[r.grid(), r.grid()], &r.grid().full_rect(), true).unwrap()
    };
    let (coarse, fine) = (at(128), at(512));
    assert!((coarse - fine).abs() <= 0.02 * fine, "{coarse} vs {fine}");
}

#[test]
fn iterated_integral_edge_cases() {
    let ax = uniform_partition(8);
    let f = GridFunction2D::from_fn(ax.clone(), ax.clone(), |u, v| u + v * v).unwrap();
    let g = GridFunction2D::from_fn(ax.clone(), ax.clone(), |u, v| (u - v).sin()).unwrap();
    let c = GridFunction2D::from_fn(ax.clone(), ax, |_, _| 4.0).unwrap();
    let r = f.full_rect();
    let one = iterated_2d(&f, &[&g], &r, false).unwrap();
    assert!((one - young_integral_2d(&f, &g, &r).unwrap()).abs() < 1e-15);
    assert_eq!(iterated_2d(&f, &[&c, &c, &c], &r, false).unwrap(), 0.0);
    assert!(iterated_2d(&f, &[&g, &g, &g, &g], &r, false).is_err());
    // Subtracting the initial edges removes everything from an additive integrand.
    let additive = GridFunction2D::from_fn(f.xs().to_vec(), f.ys().to_vec(), |u, v| u.exp() + v).unwrap();
    assert!(iterated_2d(&additive, &[&g], &r, true).unwrap().abs() < 1e-15);
}

#[test]
fn min_lift_reduces_to_intersections() {
    let ax = uniform_partition(4);
    let vals: Vec<f64> = (0..25).map(|i| ((i * 37 % 11) as f64 - 5.0) / 3.0).collect();
    let f = GridFunction2D::new(ax.clone(), ax, vals).unwrap();
    let lift = min_lift(&f).unwrap();
    let pairs: Vec<(usize, usize)> = (0..5).flat_map(|a| (a..5).map(move |b| (a, b))).collect();
    let meet = |p: (usize, usize), q: (usize, usize)| -> Option<(usize, usize)> {
        let (lo, hi) = (p.0.max(q.0), p.1.min(q.1));
        (lo <= hi).then_some((lo, hi))
    };
    let mut checked = 0;
    for &u1 in &pairs {
        for &u2 in &pairs {
            for &v1 in &pairs {
                for &v2 in &pairs {
                    let got = lift.rect_increment(&[u1, u2, v1, v2]).unwrap();
                    let want = match (meet(u1, u2), meet(v1, v2)) {
                        (Some(a), Some(b)) => f.increment(a.0, a.1, b.0, b.1),
                        _ => 0.0,
                    };
                    assert!((got - want).abs() < 1e-12);
                    checked += 1;
                }
            }
        }
    }
    assert_eq!(checked, 15usize.pow(4));
}

#[test]
fn interpolation_inequality() {
    let bm = CovarianceModel::bm(1).unwrap();
    let r = bm.grid_covariance(&uniform_partition(7)).unwrap();
    let (lhs, rhs) = interpolation_check(r.grid(), &r.grid().full_rect(), 1.0, 2.0).unwrap();
    assert!(lhs <= rhs + 1e-12, "{lhs} > {rhs}");

    let ax = uniform_partition(3);
    let c = GridFunction2D::from_fn(ax.clone(), ax.clone(), |_, _| 1.0).unwrap();
    assert_eq!(interpolation_check(&c, &c.full_rect(), 1.0, 2.0).unwrap(), (0.0, 0.0));

    // A single nonzero cell.
    let a = 0.7;
    let bump = GridFunction2D::from_fn(ax.clone(), ax, |u, v| if u >= 0.5 && v >= 0.5 { a } else { 0.0 }).unwrap();
    let (lhs, rhs) = interpolation_check(&bump, &bump.full_rect(), 1.0, 2.0).unwrap();
    assert!((lhs - a).abs() < 1e-15 && (rhs - a).abs() < 1e-15);
    assert_eq!(v_infinity(&bump, &bump.full_rect()).unwrap(), a);
    assert!(interpolation_check(&bump, &bump.full_rect(), 2.0, 2.0).is_err());
}

#[test]
fn covariance_identity_for_brownian_motion() {
    let bm = CovarianceModel::bm(2).unwrap();
    let c = covariance_l2_identity_check(&bm, 64, 4000, 5, 2).unwrap();
    assert!((c.young_value - 0.5).abs() <= 0.02, "{}", c.young_value);
    assert!((c.mc_estimate - 0.5).abs() <= 3.0 * c.mc_stderr + 0.02 * 0.5, "{c:?}");
    let half = CovarianceModel::fbm(0.5, 2).unwrap();
    assert_eq!(covariance_l2_identity_check(&half, 64, 200, 5, 1).unwrap(), covariance_l2_identity_check(&bm, 64, 200, 5, 1).unwrap());

    let times = uniform_partition(8);
    let zero_path = SampledPath::from_components(times.clone(), &[vec![0.0; 9], vec![0.0; 9]]).unwrap();
    let zero = GridFunction2D::from_fn(times.clone(), times, |_, _| 0.0).unwrap();
    let z = l2_identity_from_samples(&[zero_path], &zero, &zero).unwrap();
    assert_eq!((z.mc_estimate, z.young_value), (0.0, 0.0));
}

#[test]
fn fubini_examples() {
    let grid = uniform_partition(3999);
    let id = fubini_diag(&grid, &grid, &grid, 1.0).unwrap();
    assert!((id.iterated - 1.0 / 6.0).abs() < 1e-3);
    assert!((id.naive - 1.0 / 3.0).abs() < 1e-3);
    let zero = vec![0.0; grid.len()];
    let z = fubini_diag(&grid, &zero, &grid, 1.0).unwrap();
    assert_eq!((z.iterated, z.half_diagonal), (0.0, 0.0));
    assert!(fubini_diag(&grid, &zero[1..], &grid, 1.0).is_err());
}

#[test]
fn fubini_on_brownian_paths_matches_signatures() {
    let k = 512;
    let s = GaussianSampler::new(&CovarianceModel::bm(1).unwrap(), k).unwrap();
    let times = s.times().to_vec();
    for traj in 0..5 {
        let f = s.sample_component(9, traj, 0);
        let g = s.sample_component(9, traj + 100, 0);
        let d = fubini_diag(&times, &f, &g, 1.0).unwrap();
        assert!((d.iterated - d.half_diagonal).abs() <= 1e-6 * d.iterated.abs().max(1e-3));
        // ∫_{u<v} f(u) dg(u) dg(v) = f(0) S^{gg} + S^{fgg} for the path (f, g).
        let x = SampledPath::from_components(times.clone(), &[f.clone(), g.clone()]).unwrap();
        let sig = full_signature(&x, 3).unwrap();
        let want = f[0] * sig.coefficient(&[1, 1]).unwrap() + sig.coefficient(&[0, 1, 1]).unwrap();
        assert!((d.iterated - want).abs() <= 1e-10 * want.abs().max(1.0), "{} vs {want}", d.iterated);
        // Same path for both: the inner integral is g²/2, so the value is g(1)³/6.
        let dd = fubini_diag(&times, &g, &g, 1.0).unwrap();
        assert!((dd.iterated - g[k].powi(3) / 6.0).abs() < 1e-10);
    }
    let paths = sample_paths(&CovarianceModel::bm(1).unwrap(), 16, 1, 1, 1).unwrap();
    assert_eq!(paths[0].len(), 17);
}

#[test]
fn rect_validation() {
    let ax = uniform_partition(4);
    let f = GridFunction2D::from_fn(ax.clone(), ax, |u, v| u * v).unwrap();
    assert!(young_integral_2d(&f, &f, &GridRect::new(0, 5, 0, 4)).is_err());
    assert!(young_integral_2d(&f, &f, &GridRect::new(3, 1, 0, 4)).is_err());
    assert_eq!(young_integral_2d(&f, &f, &GridRect::new(2, 2, 0, 4)).unwrap(), 0.0);
}
