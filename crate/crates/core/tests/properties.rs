use proptest::prelude::*;
use spect_mb::io::{csv_string, parse_csv};
use spect_mb::phantoms::{Layer, Region};
use spect_mb::regularizers::{mb_penalty, mb_prox, tv_grad, tv_value, DiffOperator};
use spect_mb::{
    add_gaussian_noise, fidelity_value_grad, forward_point, multibang_project, project_discrete, AdmissibleSet,
    DirectedLine, Image, PhantomSpec, Point, Sinogram,
};

fn image(m: usize, vals: Vec<f64>) -> Image {
    Image::from_values(m, 1.0 / m as f64, vals).unwrap()
}

fn admissible() -> impl Strategy<Value = AdmissibleSet> {
    prop::collection::vec(0.0..3.0f64, 2..6).prop_filter_map("needs distinct values", |mut v| {
        v.sort_by(f64::total_cmp);
        v.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
        AdmissibleSet::new(v).ok()
    })
}

fn central_diff(g: impl Fn(&[f64]) -> f64, x: &[f64], i: usize, h: f64) -> f64 {
    let mut p = x.to_vec();
    let mut q = x.to_vec();
    p[i] += h;
    q[i] -= h;
    (g(&p) - g(&q)) / (2.0 * h)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn diff_operator_adjoint(m in 2usize..7, seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..m * m).map(|_| rng.random_range(-1.0..1.0)).collect();
        let y: Vec<[f64; 2]> = (0..m * m).map(|_| [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]).collect();
        let op = DiffOperator::new(m);
        let lhs: f64 = op.apply(&x).iter().zip(&y).map(|(a, b)| a[0] * b[0] + a[1] * b[1]).sum();
        let rhs: f64 = x.iter().zip(op.adjoint(&y)).map(|(a, b)| a * b).sum();
        prop_assert!((lhs - rhs).abs() < 1e-12 * (1.0 + lhs.abs()));
        let dx = op.apply(&x);
        let n2: f64 = dx.iter().map(|g| g[0] * g[0] + g[1] * g[1]).sum();
        let x2: f64 = x.iter().map(|v| v * v).sum();
        prop_assert!(n2 <= op.norm_sq_bound() * x2 + 1e-12);
    }

    #[test]
    fn tv_gradient_matches_differences(vals in prop::collection::vec(-1.0..1.0f64, 16), c in 1e-2..1.0f64) {
        let img = image(4, vals.clone());
        let g = tv_grad(&img, c);
        for i in 0..16 {
            let fd = central_diff(|v| tv_value(&image(4, v.to_vec()), c), &vals, i, 1e-6);
            prop_assert!((fd - g.values()[i]).abs() < 1e-6 * (1.0 + fd.abs()), "pixel {i}: {fd} vs {}", g.values()[i]);
        }
    }

    #[test]
    fn prox_is_no_worse_than_brute_force(t in -0.5..3.5f64, step in 0.01..2.0f64, set in admissible()) {
        let z = mb_prox(t, step, &set);
        let obj = |z: f64| 0.5 * (z - t) * (z - t) + step * mb_penalty(z, &set).value;
        prop_assert!(z >= set.min() && z <= set.max());
        let n = 30_000;
        let (lo, hi) = (set.min(), set.max());
        let brute = (0..=n).map(|k| obj(lo + (hi - lo) * k as f64 / n as f64)).fold(f64::INFINITY, f64::min);
        prop_assert!(obj(z) <= brute + 1e-12);
    }

    #[test]
    fn penalty_vanishes_exactly_on_the_set(set in admissible(), t in -0.5..3.5f64) {
        for &v in set.values() {
            prop_assert_eq!(mb_penalty(v, &set).value, 0.0);
        }
        let p = mb_penalty(t, &set);
        prop_assert_eq!(p.out_of_range, t < set.min() || t > set.max());
        prop_assert!(p.value >= 0.0);
    }

    #[test]
    fn projection_onto_set_is_idempotent(vals in prop::collection::vec(-1.0..4.0f64, 9), set in admissible()) {
        let once = multibang_project(&image(3, vals), &set);
        prop_assert!(once.values().iter().all(|v| set.contains(*v)));
        prop_assert_eq!(multibang_project(&once, &set), once);
    }

    #[test]
    fn fidelity_gradient_matches_differences(
        a in prop::collection::vec(0.0..2.0f64, 9),
        f in prop::collection::vec(0.0..2.0f64, 9),
        d in prop::collection::vec(0.0..1.0f64, 12),
    ) {
        let angles = [0.3, 1.4, 2.9, 4.4];
        let offsets = [-0.2, 0.05, 0.31];
        let sino = Sinogram::new(angles.to_vec(), offsets.to_vec(), d).unwrap();
        let (_, ga, gf) = fidelity_value_grad(&image(3, a.clone()), &image(3, f.clone()), &sino).unwrap();
        let value_a = |v: &[f64]| fidelity_value_grad(&image(3, v.to_vec()), &image(3, f.clone()), &sino).unwrap().0;
        let value_f = |v: &[f64]| fidelity_value_grad(&image(3, a.clone()), &image(3, v.to_vec()), &sino).unwrap().0;
        for i in 0..9 {
            let fa = central_diff(value_a, &a, i, 1e-6);
            let ff = central_diff(value_f, &f, i, 1e-6);
            prop_assert!((fa - ga.values()[i]).abs() < 1e-6 * (1.0 + fa.abs()));
            prop_assert!((ff - gf.values()[i]).abs() < 1e-6 * (1.0 + ff.abs()));
        }
    }

    #[test]
    fn discrete_projection_is_linear_in_source(
        a in prop::collection::vec(0.0..2.0f64, 16),
        f in prop::collection::vec(-1.0..1.0f64, 16),
        g in prop::collection::vec(-1.0..1.0f64, 16),
        k in -2.0..2.0f64,
    ) {
        let angles = [0.0, 0.7, 2.1, 5.0];
        let offsets = [-0.3, 0.0, 0.2];
        let a = image(4, a);
        let comb: Vec<f64> = f.iter().zip(&g).map(|(x, y)| k * x + y).collect();
        let pf = project_discrete(&a, &image(4, f), &angles, &offsets).unwrap();
        let pg = project_discrete(&a, &image(4, g), &angles, &offsets).unwrap();
        let pc = project_discrete(&a, &image(4, comb), &angles, &offsets).unwrap();
        for i in 0..pc.len() {
            let want = k * pf.data()[i] + pg.data()[i];
            prop_assert!((pc.data()[i] - want).abs() < 1e-12 * (1.0 + want.abs()));
        }
    }

    #[test]
    fn attenuation_only_lowers_nonnegative_sources(
        r in 0.2..0.9f64, a in 0.0..3.0f64, f in 0.0..2.0f64, omega in 0.0..std::f64::consts::TAU, s in -1.0..1.0f64,
    ) {
        let disk = |a| PhantomSpec::new(vec![Layer { region: Region::Disk { center: Point::new(0.1, -0.05), radius: r }, a, f }]).unwrap();
        let line = DirectedLine::from_sinogram(omega, s);
        let free = forward_point(&disk(0.0), &line);
        let att = forward_point(&disk(a), &line);
        prop_assert!(att <= free + 1e-15);
        prop_assert!(att >= 0.0);
        // without attenuation the direction of travel does not matter
        let back = forward_point(&disk(0.0), &DirectedLine::from_sinogram(omega + std::f64::consts::PI, -s));
        prop_assert!((free - back).abs() < 1e-12);
    }

    #[test]
    fn noise_is_reproducible_per_seed(seed in any::<u64>(), level in 0.0..0.2f64) {
        let s = Sinogram::new(vec![0.0, 1.0], vec![-0.5, 0.5], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let n1 = add_gaussian_noise(&s, level, seed).unwrap();
        prop_assert_eq!(&n1, &add_gaussian_noise(&s, level, seed).unwrap());
        if level > 0.0 {
            prop_assert_ne!(&n1, &add_gaussian_noise(&s, level, seed.wrapping_add(1)).unwrap());
        }
    }

    #[test]
    fn csv_round_trip_is_exact(rows in prop::collection::vec(prop::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 3), 1..8)) {
        let text = csv_string(&["a", "b", "c"], &rows);
        let (_, back) = parse_csv(&text).unwrap();
        prop_assert_eq!(&back, &rows);
        prop_assert_eq!(csv_string(&["a", "b", "c"], &back), text);
    }
}
