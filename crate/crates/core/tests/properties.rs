mod common;

use std::f64::consts::PI;

use num_rational::Ratio;
use packbound::faer::{Mat, Side};
use packbound::graph::generators::{cap_graph, circle_code, code_graph, cycle, random};
use packbound::graph::{alpha_exact, parse_graph};
use packbound::hierarchy::{
    assemble_lasserre, inclusion_exclusion, indicator_solution, las_bound, moebius_recover_measure, theta_prime,
    zeta_transform,
};
use packbound::sdp::{export_sdpa, import_sdpa, solve, SolveStatus};
use packbound::sphere::{delsarte_lp_bound, gegenbauer_eval, GegenbauerEvaluator};
use packbound::{Graph, IndepSetBasis};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n, 0.0..=1.0f64, any::<u64>()).prop_map(|(n, p, seed)| random(n, p, seed).unwrap())
}

fn weighted_graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    graph_strategy(max_n).prop_flat_map(|g| {
        let n = g.n();
        proptest::collection::vec(0u8..5, n)
            .prop_map(move |w| g.clone().with_weights(w.into_iter().map(f64::from).collect()).unwrap())
    })
}

fn assert_simple(g: &Graph) {
    for u in 0..g.n() {
        assert!(!g.is_adjacent(u, u));
        assert!(g.weight(u) >= 0.0 && g.weight(u).is_finite());
        for v in 0..g.n() {
            assert_eq!(g.is_adjacent(u, v), g.is_adjacent(v, u));
        }
    }
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generators_give_simple_graphs(n in 1usize..12, m in 1usize..30, theta in 0.01..PI, t2 in 0.01..1.5f64, p in 0.0..=1.0f64, seed in any::<u64>()) {
        assert_simple(&random(n, p, seed).unwrap());
        assert_simple(&circle_code(m, theta).unwrap());
        assert_simple(&cap_graph(m, theta.min(1.5), t2).unwrap());
        if n >= 3 {
            let c = cycle(n).unwrap();
            assert_simple(&c);
            prop_assert!((0..n).all(|v| c.degree(v) == 2));
        }
    }

    #[test]
    fn code_graph_degree(q in 2usize..4, n in 1usize..6, d in 1usize..5) {
        let g = code_graph(q, n, d).unwrap();
        assert_simple(&g);
        prop_assert_eq!(g.n(), q.pow(n as u32));
        let expected: usize = (1..d.min(n + 1)).map(|k| binomial(n, k) * (q - 1).pow(k as u32)).sum();
        prop_assert!((0..g.n()).all(|v| g.degree(v) == expected));
    }

    #[test]
    fn alpha_matches_brute_force(g in weighted_graph_strategy(14)) {
        let exact = alpha_exact(&g, true).unwrap();
        prop_assert!((exact.value - common::brute_force_alpha(&g)).abs() < 1e-9);
        prop_assert!(g.is_independent(&exact.witness));
        prop_assert!((g.set_weight(&exact.witness) - exact.value).abs() < 1e-9);
        let unweighted = alpha_exact(&g, false).unwrap();
        prop_assert!(g.is_independent(&unweighted.witness));
        prop_assert_eq!(unweighted.witness.len() as f64, unweighted.value);
    }

    #[test]
    fn local_subgraph_drops_alpha(g in graph_strategy(14), e in any::<prop::sample::Index>()) {
        let e = e.index(g.n());
        let (local, keep) = g.local_subgraph(e).unwrap();
        prop_assert!(keep.iter().all(|&x| x != e && !g.is_adjacent(e, x)));
        let a = alpha_exact(&g, false).unwrap().value;
        let a_local = alpha_exact(&local, false).unwrap().value;
        prop_assert!(a_local + 1.0 <= a + 1e-12);
    }

    #[test]
    fn edge_list_round_trip(g in weighted_graph_strategy(12)) {
        let back = parse_graph(&g.to_edge_list()).unwrap();
        prop_assert_eq!(back.n(), g.n());
        prop_assert_eq!(back.edges().collect::<Vec<_>>(), g.edges().collect::<Vec<_>>());
        prop_assert_eq!(back.weights(), g.weights());
    }

    #[test]
    fn basis_is_canonical(g in graph_strategy(11), t in 0usize..5) {
        let b = IndepSetBasis::new(&g, t, 1 << 20).unwrap();
        let mut expected = common::brute_force_sets(&g, t);
        expected.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        prop_assert_eq!(b.sets(), &expected[..]);
        for (i, s) in b.sets().iter().enumerate() {
            prop_assert_eq!(b.index_of(s), Some(i));
            prop_assert!(b.stratum(s.len()).contains(&i));
        }
        prop_assert_eq!(b.set(0), &[] as &[usize]);
    }

    #[test]
    fn union_rule(g in graph_strategy(9), t in 1usize..3) {
        let program = assemble_lasserre(&g, t).unwrap();
        let bt = program.basis_t();
        let b2 = program.basis_2t();
        let y: Vec<f64> = (0..b2.len()).map(|i| i as f64 + 1.0).collect();
        let m = program.moment_matrix(&y);
        for i in 0..bt.len() {
            for j in 0..bt.len() {
                let mut u: Vec<usize> = bt.set(i).iter().chain(bt.set(j)).copied().collect();
                u.sort_unstable();
                u.dedup();
                let expected = if g.is_independent(&u) { b2.index_of(&u).unwrap() as f64 + 1.0 } else { 0.0 };
                prop_assert_eq!(m[(i, j)], expected);
            }
        }
    }

    #[test]
    fn moebius_round_trip_exact(g in graph_strategy(8), seed in any::<u64>()) {
        let a = alpha_exact(&g, false).unwrap().value as usize;
        let b = IndepSetBasis::new(&g, 2 * a, 1 << 20).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sigma: Vec<Ratio<i64>> = (0..b.len()).map(|_| Ratio::new(rng.random_range(-20..20), rng.random_range(1..12))).collect();
        let y = zeta_transform(&b, &sigma).unwrap();
        prop_assert_eq!(&moebius_recover_measure(&b, &y).unwrap(), &sigma);
        let back = zeta_transform(&b, &moebius_recover_measure(&b, &y).unwrap()).unwrap();
        prop_assert_eq!(back, y);
    }

    #[test]
    fn inclusion_exclusion_is_unit(g in graph_strategy(9), t in 0usize..4) {
        let b = IndepSetBasis::new(&g, t, 1 << 20).unwrap();
        for s in 0..b.len() {
            let v = inclusion_exclusion(&b, s);
            prop_assert!(v.iter().enumerate().all(|(i, &x)| x == i64::from(i == s)));
        }
    }

    #[test]
    fn gegenbauer_bounds(n in 2usize..12, k in 0usize..20, x in -1.0..=1.0f64) {
        let ev = GegenbauerEvaluator::new(n, k).unwrap();
        let [g, _, g2] = ev.eval_with_derivatives(x);
        let [g_one, _, g2_one] = ev.eval_with_derivatives(1.0);
        prop_assert!((g_one[k] - 1.0).abs() < 1e-12);
        prop_assert!(g[k].abs() <= 1.0 + 1e-9);
        prop_assert!(g2[k].abs() <= g2_one[k] * (1.0 + 1e-9) + 1e-9);
        prop_assert!((gegenbauer_eval(n, k, x).unwrap() - g[k]).abs() < 1e-12);
    }

    #[test]
    fn schoenberg_psd(n in 2usize..8, k in 0usize..10, count in 2usize..16, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<Vec<f64>> = (0..count)
            .map(|_| {
                let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                v.iter().map(|x| x / norm).collect()
            })
            .collect();
        let ev = GegenbauerEvaluator::new(n, k).unwrap();
        let m = Mat::from_fn(count, count, |i, j| {
            let ip: f64 = pts[i].iter().zip(&pts[j]).map(|(a, b)| a * b).sum();
            ev.eval_all(ip.clamp(-1.0, 1.0))[k]
        });
        let min = m.self_adjoint_eigenvalues(Side::Lower).unwrap()[0];
        prop_assert!(min >= -1e-9 * count as f64);
    }

    #[test]
    fn indicator_solutions_are_feasible(g in weighted_graph_strategy(10), t in 1usize..3, seed in any::<u64>()) {
        let program = assemble_lasserre(&g, t).unwrap();
        let sets = common::brute_force_sets(&g, g.n());
        let s = &sets[(seed % sets.len() as u64) as usize];
        let y = indicator_solution(&g, program.basis_2t(), s).unwrap();
        let check = program.check(&y, 1e-9).unwrap();
        prop_assert!(check.feasible);
        prop_assert!((check.objective - g.set_weight(s)).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sdpa_round_trip(seed in any::<u64>()) {
        let (p, _) = common::random_sdp(seed);
        let text = export_sdpa(&p);
        let back = import_sdpa(&text).unwrap();
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(export_sdpa(&back), text);
    }

    #[test]
    fn random_sdp_reaches_known_optimum(seed in any::<u64>()) {
        let (p, optimum) = common::random_sdp(seed);
        let s = solve(&p, 1e-8, 100).unwrap();
        prop_assert_eq!(s.status, SolveStatus::Optimal);
        prop_assert!(s.absolute_gap() <= 1e-6 * (1.0 + optimum.abs()));
        prop_assert!((s.dual_objective - optimum).abs() <= 1e-6 * (1.0 + optimum.abs()));
    }

    #[test]
    fn las_bounds_are_sound(g in weighted_graph_strategy(9), t in 1usize..3) {
        let r = las_bound(&g, t, 1e-8).unwrap();
        let alpha = common::brute_force_alpha(&g);
        let certified = r.certified_bound.expect("certified");
        prop_assert!(certified >= alpha - 1e-6);
        prop_assert!(r.verification_margin <= 1e-6);
    }

    #[test]
    fn theta_prime_matches_las_one(g in graph_strategy(10)) {
        let a = las_bound(&g, 1, 1e-9).unwrap();
        let b = theta_prime(&g, 1e-9).unwrap();
        prop_assert!((a.value - b.value).abs() <= 1e-6);
        prop_assert!(b.is_certified());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn delsarte_is_sound_on_regular_polygons(k in 3usize..9) {
        let theta = 2.0 * PI / k as f64;
        let (r, report) = delsarte_lp_bound(2, theta, k + 2, 10, 1e-10).unwrap();
        let certified = r.certified_bound.expect("certified");
        prop_assert!(report.passed);
        prop_assert!(certified >= k as f64 - 1e-6);
    }
}
