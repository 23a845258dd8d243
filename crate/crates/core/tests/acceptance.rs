//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test --test acceptance -- --nocapture` (the target has no
//! libtest harness, so output is always shown). The process exits nonzero
//! when a criterion fails that is not listed in `KNOWN_RED`; known-red
//! criteria still print FAIL.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use subgraph_lg::constructions::materialize::audit_many;
use subgraph_lg::constructions::tiny::hiding_fixture;
use subgraph_lg::constructions::{g1_stage_specs, g2_plan, materialize_flow_path, vertex_ratio_audit, Objective};
use subgraph_lg::graph::census::pattern_classes;
use subgraph_lg::graph::PatternGraph;
use subgraph_lg::learning::toy::{random_class_stage, random_layered, ToyConfig};
use subgraph_lg::learning::{Builder, EdgeSet, Flow, LearningGraph};
use subgraph_lg::lemmas::{
    balance_stages, enumerated_edge_probability, reweight_by_classes, simple_stage_bound, uniform_edge_probability,
    uniform_stage_cost, verify_simple_stage_bound, Params, ProbabilityMode, StagePartition,
};
use subgraph_lg::optimizer::{
    balance_plan, compare_with_walk, numeric_optimize, ratio, theorem1_exponent, theorem2_exponent, theorem3_exponent,
    theorem3_t1, walk_dominance, Grid,
};
use subgraph_lg::scalar::{Scalar, SqrtScalar, Surd};

/// Criteria whose failure is analysed in the decisions ledger.
const KNOWN_RED: &[u32] = &[7];

/// The seed used by every Monte Carlo check, fixed before any run.
const SEED: u64 = 1;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn q(a: i64, b: i64) -> Rational64 {
    ratio(a, b)
}

fn c1() -> Outcome {
    let tri = theorem3_exponent(&PatternGraph::complete(3)).unwrap().total;
    let th1 = theorem1_exponent(3, 3);
    let th2 = theorem2_exponent(3, 2, 3);
    let ok = tri == q(35, 27) && th1 == q(21, 16) && th2 == q(35, 27);
    outcome(ok, format!("theorem3(triangle) = {tri}, theorem1(3,3) = {th1}, theorem2(3,2,3) = {th2}"))
}

fn c2() -> Outcome {
    let mut cases = 0;
    let mut bad = Vec::new();
    for k in 3..=12usize {
        for m in k - 1..=k * (k - 1) / 2 {
            cases += 1;
            // independent oracle: clear denominators by hand
            let (ki, mi) = (k as i64, m as i64);
            let lhs = theorem1_exponent(k, m);
            let rhs = Rational64::from_integer(2) - q(2, ki) - theorem3_t1(k, m);
            let oracle = Rational64::from_integer(2) - q(2 * ki * mi + 2 * ki + ki * ki, ki * (ki + 1) * (mi + 1));
            if lhs != rhs || lhs != oracle {
                bad.push(format!("(k={k}, m={m})"));
            }
        }
    }
    outcome(bad.is_empty(), format!("{cases} (k, m) pairs, mismatches: {bad:?}"))
}

fn c3() -> Outcome {
    let mut count = 0;
    let mut bad = Vec::new();
    for k in 3..=7usize {
        for h in pattern_classes(k) {
            count += 1;
            let th = theorem3_exponent(&h).unwrap();
            let walk = Rational64::from_integer(2) - q(2, k as i64);
            let g1 = balance_plan(&g1_stage_specs(&h, k).unwrap()).unwrap();
            let g2 = balance_plan(&g2_plan(&h).unwrap()).unwrap();
            let consistent = g1.solution.total == theorem1_exponent(k, h.m())
                && g2.solution.total == theorem2_exponent(k, h.min_degree(), h.m())
                && g1.dominance
                && g2.dominance
                && g2.guard == Some(true);
            if th.t <= Rational64::zero() || th.total >= walk || !consistent {
                bad.push(format!("{:?}", h.edges()));
            }
        }
    }
    outcome(bad.is_empty(), format!("{count} isomorphism classes with k <= 7, failures: {}", bad.len()))
}

/// `(C₀, C₁)` straight from the definitions, for a set whose flows all
/// carry one unit.
fn oracle_complexity(g: &LearningGraph<Surd>, set: &EdgeSet) -> (Surd, Surd) {
    let mut c0 = Surd::zero();
    for e in set.iter() {
        let edge = g.edge(e);
        c0 = c0 + Surd::from_u64(edge.length) * edge.weight.clone();
    }
    let mut c1 = Surd::zero();
    for y in 0..g.flows().len() {
        let mut sum = Surd::zero();
        for e in set.iter() {
            let edge = g.edge(e);
            let p = g.flows()[y].value(e);
            if !p.is_zero() && edge.length > 0 {
                sum = sum + Surd::from_u64(edge.length) * p.clone() * p / edge.weight.clone();
            }
        }
        if sum > c1 {
            c1 = sum;
        }
    }
    (c0, c1)
}

fn c4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let cfg = ToyConfig::default();
    let mut balanced_ok = 0;
    let mut skipped = 0;
    let mut failures = Vec::new();
    for i in 0..200 {
        let toy = random_layered(&mut rng, &cfg);
        assert!(toy.graph.vertex_count() <= 50 && toy.graph.depth() <= 5);
        let g = toy.graph.map_scalar(|x| Surd::rational(x.clone()));
        let partition = StagePartition::new(&g, toy.stages.clone()).unwrap();
        let balanced = match balance_stages(&g, &partition) {
            Ok(b) => b,
            Err(_) => {
                // a stage of zero-length edges has C₀ = 0 and nothing to balance
                skipped += 1;
                continue;
            }
        };
        let mut sum = Surd::zero();
        for stage in &toy.stages {
            let (c0, c1) = oracle_complexity(&g, stage);
            sum = sum + (c0 * c1).sqrt().expect("square root of a rational");
        }
        let (c0, c1) = oracle_complexity(&balanced.graph, &balanced.graph.all_edges());
        if c0 * c1 <= sum.clone() * sum {
            balanced_ok += 1;
        } else {
            failures.push(format!("balance #{i}"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut class_ok = 0;
    for i in 0..200 {
        let cs = random_class_stage(&mut rng, &cfg);
        let g = cs.graph.map_scalar(|x| Surd::rational(x.clone()));
        let out = reweight_by_classes(&g, &cs.stage, &cs.classes).unwrap();
        let mut max_sq = Surd::zero();
        for class in &cs.classes {
            let part = subgraph_lg::lemmas::descendant_edges(&g, class, &cs.stage);
            let mass = g.flow_value(&part, 0).unwrap();
            if mass.is_zero() {
                continue;
            }
            // C(E_i)² with flows normalized by p_y(E_i)
            let (c0, mut c1) = oracle_complexity(&g, &part);
            c1 = c1 / (mass.clone() * mass);
            let sq = c0 * c1;
            if sq > max_sq {
                max_sq = sq;
            }
        }
        let (c0, c1) = oracle_complexity(&out.graph, &out.stage);
        if c0 * c1 <= max_sq {
            class_ok += 1;
        } else {
            failures.push(format!("classes #{i}"));
        }
    }
    outcome(
        failures.is_empty() && balanced_ok + skipped == 200 && class_ok == 200,
        format!(
            "balance_stages {balanced_ok}/200 (skipped degenerate: {skipped}), reweight_by_classes {class_ok}/200, failures: {failures:?}"
        ),
    )
}

fn search(n: usize) -> LearningGraph<Surd> {
    let mut b = Builder::new();
    let root = b.add_opaque("root");
    let mut flows = Vec::new();
    for i in 0..n {
        let v = b.add_opaque(format!("v{i}"));
        let s = b.add_opaque(format!("s{i}"));
        let e0 = b.add_edge(root, v, Surd::one(), 0);
        let e1 = b.add_edge(v, s, Surd::one(), 1);
        flows.push(Flow::new(format!("y{i}"), [(e0, Surd::one()), (e1, Surd::one())]));
    }
    for f in flows {
        b.add_flow(f);
    }
    b.build().unwrap()
}

fn c5() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for n in [4usize, 16, 64] {
        let g = search(n);
        let vs: Vec<_> = g.out_edges(0).iter().map(|&e| g.edge(e).to).collect();
        let report = verify_simple_stage_bound(&g, &g.stage(1, 2), &vs).unwrap();
        let root = Surd::from_u64((n as f64).sqrt() as u64);
        let uniform = uniform_stage_cost(Surd::one(), 1, 1, &[Surd::from_u64(n as u64)]).unwrap();
        let hit = report.bound == root && uniform.cost == root && report.holds;
        ok &= hit;
        notes.push(format!("search N={n}: bound {}", report.bound));
    }
    // hiding stage: measured per-vertex C₀, C₁ against ℓd and ℓ/g
    let p = Params::new(4, 2).unwrap();
    let f = hiding_fixture(p).unwrap();
    let g = f.graph.map_scalar(|x| Surd::rational(x.clone()));
    let report = verify_simple_stage_bound(&g, &f.stage, &f.starts).unwrap();
    let v = f.starts.len() as u64;
    let w = report.w_count as u64;
    let vr = Surd::rational(BigRational::new(BigInt::from(v), BigInt::from(w)));
    let uniform = uniform_stage_cost(Surd::from_u64(f.length), f.degree, f.flow_degree, &[vr]).unwrap();
    let substituted = simple_stage_bound(
        &[Surd::from_u64(f.length * f.degree)],
        &[Surd::rational(BigRational::new(f.length.into(), f.flow_degree.into()))],
        v as usize,
        w as usize,
    )
    .unwrap();
    let hit = uniform.cost == report.bound && uniform.cost == substituted && report.holds;
    ok &= hit;
    notes.push(format!(
        "hiding r=4 rs=2: |V|={v} |W|={w} d={} g={} bound {} exact C^2 {}",
        f.degree,
        f.flow_degree,
        report.bound,
        report.exact_squared.to_text()
    ));
    // parametric fixtures
    for (l, d, gdeg, num, den) in [(1u64, 9u64, 1u64, 1i64, 1i64), (3, 12, 4, 7, 2), (2, 5, 5, 9, 4), (5, 8, 2, 50, 3)] {
        let r = BigRational::new(num.into(), den.into());
        let uniform = uniform_stage_cost(Surd::from_u64(l), d, gdeg, &[Surd::rational(r)]).unwrap();
        let simple = simple_stage_bound(
            &[Surd::from_u64(l * d)],
            &[Surd::rational(BigRational::new(l.into(), gdeg.into()))],
            num as usize,
            den as usize,
        )
        .unwrap();
        ok &= uniform.cost == simple;
    }
    outcome(ok, notes.join("; "))
}

fn c6() -> Outcome {
    let h = PatternGraph::complete(3);
    let p = Params::new(4, 2).unwrap();
    let witness = [0, 1, 2];
    let mut notes = Vec::new();
    let mut ok = true;
    for (i, plan) in [g1_stage_specs(&h, 3).unwrap(), g2_plan(&h).unwrap()].iter().enumerate() {
        let a = audit_many(plan, &h, 14, p, &witness, None, SEED + i as u64 * 1_000_003, 10_000);
        ok &= a.failed_paths == 0 && a.paths == 10_000;
        notes.push(format!(
            "{:?}: {} paths, {} failed, {} degree checks, {} length checks",
            plan.construction, a.paths, a.failed_paths, a.degree_checks, a.length_checks
        ));
    }
    outcome(ok, notes.join("; "))
}

fn c7() -> Outcome {
    let mut notes = Vec::new();
    // (a) plain probability equals s by enumeration
    let mut plain_ok = true;
    for r in [2usize, 4] {
        for rs in 1..r {
            let p = Params::new(r, rs).unwrap();
            plain_ok &= enumerated_edge_probability(p, ProbabilityMode::Plain) == p.s();
        }
    }
    notes.push(format!("plain = s for r <= 4: {}", word(plain_ok)));
    // (b) hidden probability at least s/4
    let p = Params::new(4, 2).unwrap();
    let hidden = uniform_edge_probability(p, ProbabilityMode::Hidden, 100_000, SEED);
    let est = hidden.estimate.unwrap();
    notes.push(format!(
        "hidden estimate {:.5} +- {:.5} vs s/4 = {}: {}",
        est.mean,
        est.std_error,
        hidden.bound,
        word(hidden.holds)
    ));
    // (c) vertex ratios of stages 1..u
    let h = PatternGraph::complete(3);
    let plan = g1_stage_specs(&h, 3).unwrap();
    let mut rng = subgraph_lg::rng::stream(SEED, u64::MAX);
    let path = materialize_flow_path(&plan, 14, p, &[0, 1, 2], None, &mut rng).unwrap();
    let audits = vertex_ratio_audit(&plan, &path, 10_000, SEED);
    let mut ratio_ok = true;
    for a in &audits {
        ratio_ok &= a.holds;
        notes.push(format!(
            "stage {}: {:.5} +- {:.5}, leading {:.5} (z {:.2}), exact {:.5} (z {:.2}): {}",
            a.stage,
            a.estimate.mean,
            a.estimate.std_error,
            a.leading,
            a.z_leading,
            a.exact,
            a.z_exact,
            word(a.holds)
        ));
    }
    outcome(plain_ok && hidden.holds && ratio_ok, notes.join("; "))
}

fn word(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}

fn c8() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for (h, target) in [(PatternGraph::complete(3), 35.0 / 27.0), (PatternGraph::complete(4), 59.0 / 40.0)] {
        let plan = g2_plan(&h).unwrap();
        let opt = numeric_optimize(&plan, 1e6, Objective::Max, Grid::default()).unwrap();
        ok &= opt.log_n <= target + 0.02 && opt.s <= 1.0;
        notes.push(format!(
            "K{}: r={} rs={} log_n={:.5} target {:.5}",
            h.k(),
            opt.r,
            opt.rs,
            opt.log_n,
            target
        ));
    }
    outcome(ok, notes.join("; "))
}

fn c9() -> Outcome {
    let rows = compare_with_walk(&PatternGraph::complete(3), "triangle", None, Grid::default()).unwrap();
    let walk = rows.iter().find(|r| r.method == "walk-balanced").unwrap();
    let triangle = walk.x.as_deref() == Some("3/5")
        && walk.setup.as_deref() == Some("6/5")
        && walk.update.as_deref() == Some("13/10")
        && walk.check.as_deref() == Some("13/10");
    let mut dominated = true;
    for k in 3..=7usize {
        for d in 1..k {
            let x = Rational64::from_integer(1) - q(1, k as i64);
            let (e, ok) = walk_dominance(k, d, x);
            dominated &= ok && e[0] == Rational64::from_integer(2) - q(2, k as i64);
        }
    }
    outcome(
        triangle && dominated,
        format!(
            "triangle at r = n^(3/5): S={} U={} C={}; C < S = U at r = n^(1-1/k) for all d < k <= 7: {}",
            walk.setup.as_deref().unwrap_or("-"),
            walk.update.as_deref().unwrap_or("-"),
            walk.check.as_deref().unwrap_or("-"),
            word(dominated)
        ),
    )
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome, Duration); 9] = [
        (1, "exponent reproduction", c1, Duration::from_secs(1)),
        (2, "algebraic identity", c2, Duration::from_secs(1)),
        (3, "positivity sweep", c3, Duration::from_secs(60)),
        (4, "lemma reweighting properties", c4, Duration::from_secs(60)),
        (5, "stage-cost bound soundness", c5, Duration::from_secs(60)),
        (6, "construction audit", c6, Duration::from_secs(60)),
        (7, "probability claims", c7, Duration::from_secs(60)),
        (8, "numeric balancing", c8, Duration::from_secs(120)),
        (9, "walk comparison", c9, Duration::from_secs(60)),
    ];
    let mut unexpected = Vec::new();
    for (id, name, run, budget) in criteria {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let pass = out.pass && elapsed <= budget;
        let status = if pass { "PASS" } else { "FAIL" };
        let note = if KNOWN_RED.contains(&id) && !pass { " (known red)" } else { "" };
        println!(
            "criterion {id} {name}: {status}{note} [{:.2}s of {}s] {}",
            elapsed.as_secs_f64(),
            budget.as_secs(),
            out.detail
        );
        if !pass && !KNOWN_RED.contains(&id) {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
