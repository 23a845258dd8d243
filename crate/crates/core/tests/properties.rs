use num_rational::Rational64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use subgraph_lg::constructions::{
    audit_flow_path, exact_stage_lengths, g1_stage_specs, g2_plan, materialize_flow_path, min_host_size, setup_type,
    hiding_type, loaded_type, half_loaded_type, final_type, Objective, StageKind,
};
use subgraph_lg::graph::{sample_bipartite, BipartiteType};
use subgraph_lg::graph::PatternGraph;
use subgraph_lg::learning::toy::{random_class_stage, random_layered, ToyConfig};
use subgraph_lg::lemmas::{balance_stages, reweight_by_classes, Params, StagePartition};
use subgraph_lg::optimizer::numeric::round_parameters;
use subgraph_lg::optimizer::{balance_plan, ratio, CostTerm, Point};
use subgraph_lg::scalar::Surd;

fn small_ratio() -> impl Strategy<Value = Rational64> {
    (-6i64..=6, 1i64..=5).prop_map(|(a, b)| ratio(a, b))
}

fn term() -> impl Strategy<Value = CostTerm> {
    (small_ratio(), small_ratio(), small_ratio(), small_ratio()).prop_map(|(a, b, c, d)| {
        CostTerm::n(a) * CostTerm::r(b) * CostTerm::s(c) * CostTerm::lambda(d)
    })
}

fn params() -> impl Strategy<Value = Params> {
    (1usize..=4).prop_flat_map(|h| (Just(2 * h), 1..2 * h)).prop_map(|(r, rs)| Params::new(r, rs).unwrap())
}

/// Connected patterns on 3 or 4 vertices.
fn pattern() -> impl Strategy<Value = PatternGraph> {
    prop_oneof![
        Just(PatternGraph::complete(3)),
        Just(PatternGraph::complete(4)),
        Just(PatternGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap()),
        Just(PatternGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap()),
        Just(PatternGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap()),
        Just(PatternGraph::from_edges(4, &[(0, 1), (1, 2), (2, 0), (2, 3)]).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exponent_of_product_is_sum(a in term(), b in term(), x in small_ratio(), t in small_ratio(), y in small_ratio()) {
        let prod = a.clone() * b.clone();
        prop_assert_eq!(prod.exponent_at(x, t, y), a.exponent_at(x, t, y) + b.exponent_at(x, t, y));
        prop_assert_eq!(prod.affine().at(x, t, y), prod.exponent_at(x, t, y));
    }

    #[test]
    fn evaluation_matches_exponent(a in term(), x in 1i64..5, t in 0i64..3) {
        // at n = 2^10, r = n^(x/5), s = n^(-t/5), λ = 1
        let (xr, tr) = (ratio(x, 5), ratio(t, 5));
        let n = 1024.0f64;
        let p = Point { n, r: n.powf(x as f64 / 5.0), s: n.powf(-(t as f64) / 5.0), lambda: 1.0 };
        let e = a.exponent_at(xr, tr, ratio(0, 1));
        let want = (*e.numer() as f64 / *e.denom() as f64) * n.ln();
        prop_assert!((a.ln_eval(&p) - want).abs() < 1e-9);
    }

    #[test]
    fn sampled_bipartite_graphs_have_their_type(p in params(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let types: Vec<BipartiteType> = vec![
            setup_type(p), half_loaded_type(p), loaded_type(p), hiding_type(p), final_type(p),
        ];
        for ty in types {
            let left: Vec<usize> = (0..ty.left_size()).collect();
            let right: Vec<usize> = (100..100 + ty.right_size()).collect();
            let edges = sample_bipartite(&ty, &left, &right, &mut rng).unwrap();
            prop_assert_eq!(ty.audit(&left, &right, &edges), Ok(()));
        }
    }

    #[test]
    fn rounded_density_is_feasible(n in 10.0f64..1e7, x in 0.05f64..0.95, t in 0.0f64..0.5) {
        let (r, rs) = round_parameters(n, x, t);
        prop_assert!(r % 2 == 0 && r >= 2);
        prop_assert!(rs >= 1 && rs < r);
        prop_assert!(Params::new(r, rs).is_ok());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn balancing_never_exceeds_stage_sum(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let toy = random_layered(&mut rng, &ToyConfig::default());
        let g = toy.graph.map_scalar(|x| Surd::rational(x.clone()));
        let partition = StagePartition::new(&g, toy.stages.clone()).unwrap();
        let balanced = balance_stages(&g, &partition).unwrap();
        for c in balanced.checks(&partition).unwrap() {
            prop_assert!(c.holds, "{:?}", c);
        }
    }

    #[test]
    fn class_reweighting_bounds_hold(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cs = random_class_stage(&mut rng, &ToyConfig::default());
        let out = reweight_by_classes(&cs.graph, &cs.stage, &cs.classes).unwrap();
        for c in out.checks().unwrap() {
            prop_assert!(c.holds, "{:?}", c);
        }
    }

    #[test]
    fn materialized_paths_pass_audit(h in pattern(), p in params(), g2 in any::<bool>(), seed in any::<u64>(), shift in 0usize..5) {
        let plan = if g2 { g2_plan(&h).unwrap() } else { g1_stage_specs(&h, h.k()).unwrap() };
        prop_assume!(p.r >= 4);
        let n = min_host_size(&plan, p) + shift;
        let witness: Vec<usize> = (0..h.k()).map(|i| (3 * i + seed as usize) % n).collect();
        prop_assume!({ let mut w = witness.clone(); w.sort(); w.dedup(); w.len() == h.k() });
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let path = materialize_flow_path(&plan, n, p, &witness, None, &mut rng).unwrap();
        let audit = audit_flow_path(&plan, &h, &path);
        prop_assert!(audit.passed(), "{:?}", audit.failures);
        prop_assert!(audit.certificate);
    }

    #[test]
    fn permuting_a_label_round_trips(p in params(), seed in any::<u64>()) {
        prop_assume!(p.r >= 4);
        let h = PatternGraph::complete(3);
        let plan = g1_stage_specs(&h, 3).unwrap();
        let n = min_host_size(&plan, p);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let path = materialize_flow_path(&plan, n, p, &[0, 1, 2], None, &mut rng).unwrap();
        let label = path.sink();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.rotate_left((seed % n as u64) as usize);
        let mut inverse = vec![0; n];
        for (v, &w) in perm.iter().enumerate() {
            inverse[w] = v;
        }
        let image = label.permute(&perm);
        prop_assert_eq!(image.validate(), Ok(()));
        prop_assert_eq!(image.edge_count(), label.edge_count());
        prop_assert_eq!(&image.permute(&inverse), label);
    }
}

#[test]
fn max_objective_is_below_sum() {
    let plans = [g1_stage_specs(&PatternGraph::complete(4), 4).unwrap(), g2_plan(&PatternGraph::complete(4)).unwrap()];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        use rand::Rng;
        let n = 10f64.powf(rng.gen_range(2.0..8.0));
        let r = n.powf(rng.gen_range(0.1..0.9));
        let s = rng.gen_range(0.01..1.0);
        let p = Point { n, r, s, lambda: rng.gen_range(1.0..r) };
        for plan in &plans {
            let costs = plan.stage_costs(&p, Objective::Sum);
            let max = plan.cost(&p, Objective::Max);
            let sum = plan.cost(&p, Objective::Sum);
            assert!(max <= sum * (1.0 + 1e-12));
            assert!(sum <= costs.len() as f64 * max * (1.0 + 1e-12));
        }
    }
}

#[test]
fn g2_prefix_matches_g1() {
    for h in [
        PatternGraph::complete(3),
        PatternGraph::complete(5),
        PatternGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap(),
    ] {
        let g1 = g1_stage_specs(&h, h.k() - 1).unwrap();
        let g2 = g2_plan(&h).unwrap();
        assert_eq!(&g2.stages[..g1.stages.len()], &g1.stages[..]);
        let last = g2.stages.last().unwrap();
        assert!(matches!(last.kind, StageKind::Collision));
        assert_eq!(g2.stages.len(), g1.stages.len() + 1);
    }
}

#[test]
fn balanced_exponent_is_below_trivial() {
    // every connected pattern on up to five vertices beats n^2
    for k in 3..=5 {
        for h in subgraph_lg::graph::census::pattern_classes(k) {
            if h.min_degree() == 0 {
                continue;
            }
            for plan in [g1_stage_specs(&h, k).unwrap(), g2_plan(&h).unwrap()] {
                if let Ok(b) = balance_plan(&plan) {
                    assert!(b.solution.total < Rational64::from_integer(2), "{:?}", h.edges());
                }
            }
        }
    }
}

#[test]
fn exact_lengths_scale_with_rs() {
    let h = PatternGraph::complete(3);
    let plan = g1_stage_specs(&h, 3).unwrap();
    let a = exact_stage_lengths(&plan, Params::new(8, 2).unwrap(), 1);
    let b = exact_stage_lengths(&plan, Params::new(8, 4).unwrap(), 1);
    // setup m·rs(r−2), then rs·deg(t) per vertex stage
    assert_eq!(a[0] * 2, b[0]);
    for t in 1..=3 {
        assert_eq!(a[t] * 2, b[t]);
    }
}
