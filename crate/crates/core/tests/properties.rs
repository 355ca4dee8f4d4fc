use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use transhyp::families::{
    closing_slope, lemma_residual, make_cylinder, make_enneper, make_lemma_family, slope_constraint_residual,
    CylinderParams, EnneperParams,
};
use transhyp::hypersurface::{
    curvature_polynomials, frame_at, frame_at_oriented, g_r, s_r_closed, s_r_oracle_charpoly, s_r_oracle_eigen,
    Orientation, TranslationGraph,
};
use transhyp::profile::{derivative_consistency, Interval, Profile};
use transhyp::sympoly::{elementary_symmetric, maclaurin_check, newton_check, normalized_h, zero_propagation_check, SymInput};
use transhyp::verify::{random, scaled_discrepancy};

/// σ_r by brute force over all r-subsets.
fn sigma_by_subsets(v: &[f64], r: usize) -> f64 {
    let n = v.len();
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == r)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).map(|i| v[i]).product::<f64>())
        .sum()
}

/// G_r straight from its defining sum over subsets.
fn g_by_subsets(d: &[f64], h: &[f64], r: usize) -> f64 {
    let n = d.len();
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == r)
        .map(|m| {
            let prod: f64 = (0..n).filter(|i| m >> i & 1 == 1).map(|i| h[i]).product();
            let rest: f64 = (0..n).filter(|i| m >> i & 1 == 0).map(|i| d[i] * d[i]).sum();
            prod * (1.0 + rest)
        })
        .sum()
}

fn close(a: f64, b: f64, rel: f64, abs: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()) + abs
}

fn mixed_graph_and_point(seed: u64, n: usize) -> (TranslationGraph, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = random::mixed_graph(&mut rng, n).unwrap();
    let x = random::point_in(&mut rng, &g.domains(), 0.05, Interval::new(-2.0, 2.0).unwrap());
    (g, x)
}

fn custom_exp() -> Profile {
    let e: transhyp::profile::Evaluator = Arc::new(f64::exp);
    Profile::custom("exp", [e.clone(), e.clone(), e.clone(), e], Interval::REAL_LINE)
}

fn custom_sin() -> Profile {
    Profile::custom(
        "sin",
        [Arc::new(f64::sin), Arc::new(f64::cos), Arc::new(|x: f64| -x.sin()), Arc::new(|x: f64| -x.cos())],
        Interval::REAL_LINE,
    )
}

fn values(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0..3.0f64, 1..=max_len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn sigma_matches_subset_sum(v in values(8)) {
        let e = elementary_symmetric(&v);
        for r in 0..=v.len() {
            let want = sigma_by_subsets(&v, r);
            prop_assert!(close(e[r], want, 1e-10, 1e-10), "r={} {} vs {}", r, e[r], want);
        }
    }

    #[test]
    fn generating_function(v in values(8)) {
        let e = elementary_symmetric(&v);
        for t in [0.5, 1.0, 2.0] {
            let lhs: f64 = v.iter().map(|x| 1.0 + t * x).product();
            let rhs: f64 = e.iter().enumerate().map(|(k, s)| s * t.powi(k as i32)).sum();
            let scale: f64 = v.iter().map(|x| 1.0 + t * x.abs()).product();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn sigma_permutation_invariant(mut v in values(8), seed in any::<u64>()) {
        let e = elementary_symmetric(&v);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rand::seq::SliceRandom::shuffle(v.as_mut_slice(), &mut rng);
        prop_assert_eq!(e, elementary_symmetric(&v));
    }

    #[test]
    fn newton_on_random_vectors(v in prop::collection::vec(-3.0..3.0f64, 2..=8)) {
        let input = SymInput::new(v).unwrap();
        let rep = newton_check(&input, 1e-10).unwrap();
        prop_assert!(rep.holds);
        prop_assert!(rep.consistent());
    }

    #[test]
    fn maclaurin_on_positive_vectors(v in prop::collection::vec(0.01..3.0f64, 2..=8)) {
        let input = SymInput::new(v.clone()).unwrap();
        let rep = maclaurin_check(&input, v.len(), 1e-10).unwrap();
        prop_assert!(rep.is_applicable());
        prop_assert!(rep.holds());
    }

    #[test]
    fn newton_equality_on_constant_vectors(c in -3.0..3.0f64, n in 2usize..=8) {
        let input = SymInput::new(vec![c; n]).unwrap();
        let rep = newton_check(&input, 1e-10).unwrap();
        prop_assert!(rep.equality_detected);
        for r in 0..=n {
            prop_assert!(close(normalized_h(&input, r).unwrap(), c.powi(r as i32), 1e-12, 1e-12));
        }
    }

    #[test]
    fn zero_propagation_with_few_nonzeros(
        nonzero in prop::collection::vec(0.1..3.0f64, 0..4),
        zeros in 1usize..5,
        seed in any::<u64>(),
    ) {
        let k = nonzero.len();
        let mut v = nonzero.clone();
        v.extend(std::iter::repeat_n(0.0, zeros));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rand::seq::SliceRandom::shuffle(v.as_mut_slice(), &mut rng);
        let input = SymInput::new(v.clone()).unwrap();
        let e = elementary_symmetric(&v);
        // structurally, every σ_j with j > k is a sum of products containing a zero
        for (j, s) in e.iter().enumerate().skip(k + 1) {
            prop_assert_eq!(*s, 0.0, "j={}", j);
        }
        for r in (k + 1)..v.len() {
            let rep = zero_propagation_check(&input, r, 1e-12).unwrap();
            prop_assert!(rep.premise);
            prop_assert!(rep.holds);
        }
    }

    #[test]
    fn g_r_matches_subset_sum(
        pairs in prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 1..=10),
    ) {
        let (d, h): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let dp = curvature_polynomials(&d, &h);
        for r in 0..=d.len() {
            let want = g_by_subsets(&d, &h, r);
            let scale: f64 = (0..d.len()).map(|i| 1.0 + h[i].abs()).product::<f64>()
                * (1.0 + d.iter().map(|x| x * x).sum::<f64>());
            prop_assert!((dp[r] - want).abs() <= 1e-12 * scale, "r={} {} vs {}", r, dp[r], want);
        }
    }

    #[test]
    fn triple_agreement(seed in any::<u64>(), n in 2usize..=6) {
        let (g, x) = mixed_graph_and_point(seed, n);
        let f = frame_at(&g, &x).unwrap();
        for r in 1..=n {
            let closed = s_r_closed(&g, &x, r).unwrap();
            let eig = s_r_oracle_eigen(&f, r).unwrap();
            let cp = s_r_oracle_charpoly(&f, r).unwrap();
            prop_assert!(scaled_discrepancy(closed, eig, 1e-8, 1e-10) <= 1e-8, "r={} {} {}", r, closed, eig);
            prop_assert!(scaled_discrepancy(closed, cp, 1e-8, 1e-10) <= 1e-8, "r={} {} {}", r, closed, cp);
        }
    }

    #[test]
    fn metric_determinant_is_w_squared(seed in any::<u64>(), n in 2usize..=6) {
        let (g, x) = mixed_graph_and_point(seed, n);
        let f = frame_at(&g, &x).unwrap();
        let w2 = f.w * f.w;
        prop_assert!((f.metric_det() - w2).abs() <= 1e-9 * w2);
    }

    #[test]
    fn s_r_permutation_invariant(seed in any::<u64>(), n in 2usize..=6) {
        let (g, x) = mixed_graph_and_point(seed, n);
        let perm: Vec<usize> = (0..n).rev().collect();
        let gp = g.permuted(&perm).unwrap();
        let xp: Vec<f64> = perm.iter().map(|&i| x[i]).collect();
        for r in 1..=n {
            let a = s_r_closed(&g, &x, r).unwrap();
            let b = s_r_closed(&gp, &xp, r).unwrap();
            prop_assert!(close(a, b, 1e-12, 1e-14));
        }
    }

    #[test]
    fn zero_iff_g_r_zero(seed in any::<u64>(), n in 2usize..=6) {
        let (g, x) = mixed_graph_and_point(seed, n);
        let f = frame_at(&g, &x).unwrap();
        for r in 1..=n {
            let s = s_r_closed(&g, &x, r).unwrap();
            let gr = g_r(&g, &x, r).unwrap();
            prop_assert_eq!(s == 0.0, gr == 0.0);
            prop_assert_eq!(s.signum(), gr.signum());
            prop_assert!(close(s * f.w.powi(r as i32 + 2), gr, 1e-12, 1e-14));
        }
    }

    #[test]
    fn downward_orientation_flips_odd_r(seed in any::<u64>(), n in 2usize..=5) {
        let (g, x) = mixed_graph_and_point(seed, n);
        let up = frame_at(&g, &x).unwrap();
        let down = frame_at_oriented(&g, &x, Orientation::Downward).unwrap();
        for r in 0..=n {
            let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert_eq!(down.s[r], sign * up.s[r]);
        }
    }

    #[test]
    fn logcos_derivatives_consistent(
        slope in prop_oneof![-2.0..-0.3f64, 0.3..2.0f64],
        beta in 0.5..3.0f64,
        phase in -1.0..1.0f64,
    ) {
        let p = Profile::logcos(slope, beta, phase, 0.0).unwrap();
        let rep = derivative_consistency(&p, 50, 1e-6).unwrap();
        prop_assert!(rep.passed, "{:?}", rep);
    }

    #[test]
    fn closing_slope_satisfies_constraint(slopes in prop::collection::vec(prop_oneof![-3.0..-0.2f64, 0.2..3.0f64], 1..=5)) {
        match closing_slope(&slopes) {
            Ok(last) => {
                let mut all = slopes.clone();
                all.push(last);
                prop_assert!(slope_constraint_residual(&all) <= 1e-12);
            }
            Err(e) => {
                let degenerate = matches!(e, transhyp::Error::Degenerate { .. });
                prop_assert!(degenerate);
            }
        }
    }

    #[test]
    fn lemma_residual_small(
        slopes in prop::collection::vec(0.3..2.0f64, 1..=4),
        beta in 0.5..3.0f64,
        seed in any::<u64>(),
    ) {
        let m = slopes.len() + 1;
        let fam = make_lemma_family(m, beta, &slopes, &vec![0.0; m], 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random::point_in(&mut rng, &fam.domains(), 0.05, Interval::REAL_LINE);
        let (sum, largest) = lemma_residual(&fam, &x).unwrap();
        prop_assert!(sum.abs() <= 1e-9 * largest.max(1.0), "{} {}", sum, largest);
    }

    #[test]
    fn enneper_s_r_vanishes(
        r in 3usize..=4,
        extra in 1usize..=2,
        slopes in prop::collection::vec(prop_oneof![-2.0..-0.5f64, 0.5..2.0f64], 4),
        linear in prop::collection::vec(-1.0..1.0f64, 2),
        seed in any::<u64>(),
    ) {
        let n = r + extra;
        let p = EnneperParams {
            n,
            r,
            linear: linear[..n - r - 1].to_vec(),
            slopes: slopes[..r].to_vec(),
            phases: vec![0.1; r + 1],
            offset: 0.0,
        };
        let g = match make_enneper(&p) {
            Ok(g) => g,
            Err(_) => return Ok(()),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random::point_in(&mut rng, &g.domains(), 0.05, Interval::new(-2.0, 2.0).unwrap());
        let s = s_r_closed(&g, &x, r).unwrap();
        prop_assert!(s.abs() <= 1e-8, "{}", s);
    }

    #[test]
    fn cylinder_s_r_vanishes(
        n in 4usize..=6,
        r_off in 0usize..3,
        linear in prop::collection::vec(-2.0..2.0f64, 6),
        x in prop::collection::vec(-1.5..1.5f64, 6),
    ) {
        let r = 3 + r_off % (n - 3);
        let free = (0..r - 1).map(|i| if i % 2 == 0 { custom_exp() } else { custom_sin() }).collect();
        let g = make_cylinder(&CylinderParams { n, r, linear: linear[..n - r + 1].to_vec(), free, offset: 0.0 }).unwrap();
        for k in r..=n {
            let s = s_r_closed(&g, &x[..n], k).unwrap();
            prop_assert!(s.abs() <= 1e-10, "k={} {}", k, s);
        }
    }
}

#[test]
fn enneper_four_three_derived_slope() {
    let p = EnneperParams {
        n: 4,
        r: 3,
        linear: vec![],
        slopes: vec![1.0, 1.0, 1.0],
        phases: vec![0.0; 4],
        offset: 0.0,
    };
    assert!((p.effective_last_slope().unwrap() + 1.0 / 3.0).abs() < 1e-15);
    let g = make_enneper(&p).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let x = random::point_in(&mut rng, &g.domains(), 0.05, Interval::REAL_LINE);
        assert!(s_r_closed(&g, &x, 3).unwrap().abs() <= 1e-8);
    }
}
