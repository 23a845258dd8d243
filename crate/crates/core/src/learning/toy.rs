//! Random layered learning graphs for property tests.
//!
//! Every vertex below the last layer has an out-edge, edges only join
//! consecutive layers, and flows are split with random rational proportions,
//! so every cut between two layers carries exactly one unit of each flow.

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use super::{Builder, EdgeId, EdgeSet, Flow, LearningGraph, VertexId};

#[derive(Debug, Clone)]
pub struct ToyConfig {
    /// Number of layers including the root layer.
    pub max_levels: usize,
    pub max_vertices: usize,
    pub max_flows: usize,
}

impl Default for ToyConfig {
    fn default() -> Self {
        ToyConfig {
            max_levels: 6,
            max_vertices: 50,
            max_flows: 4,
        }
    }
}

/// A toy graph with its consecutive-layer stage partition.
#[derive(Debug, Clone)]
pub struct ToyGraph {
    pub graph: LearningGraph<BigRational>,
    pub layers: Vec<Vec<VertexId>>,
    pub stages: Vec<EdgeSet>,
}

/// A stage whose start vertices are split into classes with `y`-independent
/// flow mass. Each class owns a disjoint part of the stage.
#[derive(Debug, Clone)]
pub struct ClassStage {
    pub graph: LearningGraph<BigRational>,
    pub stage: EdgeSet,
    pub classes: Vec<Vec<VertexId>>,
    pub masses: Vec<BigRational>,
}

fn random_weight<R: Rng + ?Sized>(rng: &mut R) -> BigRational {
    BigRational::new(rng.gen_range(1..=9).into(), rng.gen_range(1..=4).into())
}

/// Splits `total` over a random nonempty subset of `n` slots.
fn random_split<R: Rng + ?Sized>(rng: &mut R, total: &BigRational, n: usize) -> Vec<BigRational> {
    let mut parts: Vec<u32> = (0..n).map(|_| if rng.gen_bool(0.6) { rng.gen_range(1..=3) } else { 0 }).collect();
    if parts.iter().all(|&p| p == 0) {
        parts[rng.gen_range(0..n)] = 1;
    }
    let sum: u32 = parts.iter().sum();
    parts
        .into_iter()
        .map(|p| total * BigRational::new(p.into(), sum.into()))
        .collect()
}

/// Layer sizes after the root, at most `budget` vertices in total.
fn layer_sizes<R: Rng + ?Sized>(rng: &mut R, depth: usize, budget: usize) -> Vec<usize> {
    let cap = ((budget - 1) / depth).clamp(1, 8);
    (0..depth).map(|_| rng.gen_range(1..=cap)).collect()
}

/// Wires `from` to `to` so each `from` vertex has an out-edge and each `to`
/// vertex an in-edge, plus random extra edges.
fn wire<R: Rng + ?Sized>(
    rng: &mut R,
    b: &mut Builder<BigRational>,
    from: &[VertexId],
    to: &[VertexId],
    out: &mut [Vec<EdgeId>],
) {
    let mut pairs = std::collections::BTreeSet::new();
    for &u in from {
        pairs.insert((u, *to.choose(rng).unwrap()));
    }
    for &v in to {
        pairs.insert((*from.choose(rng).unwrap(), v));
    }
    for &u in from {
        for &v in to {
            if rng.gen_bool(0.25) {
                pairs.insert((u, v));
            }
        }
    }
    for (u, v) in pairs {
        let w = random_weight(rng);
        let e = b.add_edge(u, v, w, rng.gen_range(1..=3));
        out[u].push(e);
    }
}

/// Pushes the given inflows layer by layer along random splits.
fn propagate<R: Rng + ?Sized>(
    rng: &mut R,
    b: &Builder<BigRational>,
    layers: &[Vec<VertexId>],
    out: &[Vec<EdgeId>],
    mut inflow: Vec<BigRational>,
    values: &mut Vec<(EdgeId, BigRational)>,
    start_layer: usize,
) {
    for layer in &layers[start_layer..layers.len() - 1] {
        for &u in layer {
            if inflow[u].is_zero() {
                continue;
            }
            let split = random_split(rng, &inflow[u], out[u].len());
            for (&e, p) in out[u].iter().zip(split) {
                if !p.is_zero() {
                    let to = b.edges[e].to;
                    inflow[to] = &inflow[to] + &p;
                    values.push((e, p));
                }
            }
        }
    }
}

pub fn random_layered<R: Rng + ?Sized>(rng: &mut R, config: &ToyConfig) -> ToyGraph {
    let depth = rng.gen_range(1..config.max_levels.max(2));
    let sizes = layer_sizes(rng, depth, config.max_vertices);
    let mut b = Builder::new();
    let mut layers = vec![vec![b.add_opaque("root")]];
    for (i, &size) in sizes.iter().enumerate() {
        layers.push((0..size).map(|j| b.add_opaque(format!("v{}_{}", i + 1, j))).collect());
    }
    let mut out = vec![Vec::new(); b.vertex_count()];
    for i in 0..depth {
        wire(rng, &mut b, &layers[i].clone(), &layers[i + 1].clone(), &mut out);
    }
    for y in 0..rng.gen_range(1..=config.max_flows) {
        let mut inflow = vec![BigRational::zero(); b.vertex_count()];
        inflow[0] = BigRational::one();
        let mut values = Vec::new();
        propagate(rng, &b, &layers, &out, inflow, &mut values, 0);
        b.add_flow(Flow::new(format!("y{y}"), values));
    }
    let graph = b.build().expect("toy graph is well formed");
    let mut cuts = vec![0];
    for l in 1..depth {
        if rng.gen_bool(0.5) {
            cuts.push(l);
        }
    }
    cuts.push(depth);
    let stages = cuts.windows(2).map(|w| graph.stage(w[0], w[1])).collect();
    ToyGraph { graph, layers, stages }
}

/// Root, a first layer split into classes, then per-class disjoint layers.
/// Some classes receive no flow at all.
pub fn random_class_stage<R: Rng + ?Sized>(rng: &mut R, config: &ToyConfig) -> ClassStage {
    let depth = rng.gen_range(2..config.max_levels.max(3));
    let class_count = rng.gen_range(1..=4);
    let per_class_budget = (config.max_vertices - 1) / class_count;
    let mut b = Builder::new();
    let root = b.add_opaque("root");
    // class_layers[c][l] = vertices of class c at layer l + 1
    let mut class_layers: Vec<Vec<Vec<VertexId>>> = Vec::new();
    for c in 0..class_count {
        let sizes = layer_sizes(rng, depth, per_class_budget.max(depth + 1));
        let mut per = Vec::new();
        for (l, &size) in sizes.iter().enumerate() {
            per.push((0..size).map(|j| b.add_opaque(format!("c{c}_{}_{j}", l + 1))).collect::<Vec<_>>());
        }
        class_layers.push(per);
    }
    let mut out = vec![Vec::new(); b.vertex_count()];
    let mut root_edges = Vec::new();
    for per in &class_layers {
        for &v in &per[0] {
            let w = random_weight(rng);
            root_edges.push(b.add_edge(root, v, w, rng.gen_range(1..=3)));
        }
        for l in 0..depth - 1 {
            wire(rng, &mut b, &per[l].clone(), &per[l + 1].clone(), &mut out);
        }
    }
    let mut weights: Vec<u32> = (0..class_count).map(|_| if rng.gen_bool(0.25) { 0 } else { rng.gen_range(1..=4) }).collect();
    if weights.iter().all(|&w| w == 0) {
        weights[0] = 1;
    }
    let total: u32 = weights.iter().sum();
    let masses: Vec<BigRational> = weights.iter().map(|&w| BigRational::new(w.into(), total.into())).collect();

    // A layer list shared by all classes so propagation walks every class.
    let mut layers = vec![vec![root]];
    for l in 0..depth {
        layers.push(class_layers.iter().flat_map(|per| per[l].clone()).collect());
    }
    for y in 0..rng.gen_range(1..=config.max_flows) {
        let mut inflow = vec![BigRational::zero(); b.vertex_count()];
        let mut values = Vec::new();
        let mut edge_iter = root_edges.iter();
        for (c, per) in class_layers.iter().enumerate() {
            let edges: Vec<EdgeId> = edge_iter.by_ref().take(per[0].len()).copied().collect();
            if masses[c].is_zero() {
                continue;
            }
            for ((&e, &v), p) in edges.iter().zip(&per[0]).zip(random_split(rng, &masses[c], per[0].len())) {
                if !p.is_zero() {
                    inflow[v] = p.clone();
                    values.push((e, p));
                }
            }
        }
        propagate(rng, &b, &layers, &out, inflow, &mut values, 1);
        b.add_flow(Flow::new(format!("y{y}"), values));
    }
    let graph = b.build().expect("toy graph is well formed");
    let stage = graph.stage(1, depth);
    let classes = class_layers.iter().map(|per| per[0].clone()).collect();
    ClassStage {
        graph,
        stage,
        classes,
        masses,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn toy_graphs_are_valid_and_stages_carry_unit_flow() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let toy = random_layered(&mut rng, &ToyConfig::default());
            let g = &toy.graph;
            assert!(g.vertex_count() <= 50 && g.depth() < 6);
            assert!(g.validate(None).is_empty(), "{:?}", g.validate(None));
            let total: usize = toy.stages.iter().map(EdgeSet::len).sum();
            assert_eq!(total, g.edge_count());
            for stage in &toy.stages {
                for y in 0..g.flows().len() {
                    assert!(g.flow_value(stage, y).unwrap().is_one());
                }
            }
        }
    }

    #[test]
    fn class_stages_have_fixed_masses() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..50 {
            let cs = random_class_stage(&mut rng, &ToyConfig::default());
            let g = &cs.graph;
            assert!(g.vertex_count() <= 50);
            assert!(g.validate(None).is_empty());
            for y in 0..g.flows().len() {
                assert!(g.flow_value(&cs.stage, y).unwrap().is_one());
            }
        }
    }
}
