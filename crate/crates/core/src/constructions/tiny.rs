//! Fully explicit learning graphs at toy sizes, for checking the lemma
//! hypotheses on the real construction rather than on random graphs.

use std::collections::HashMap;

use itertools::Itertools;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{setup_type, ConstructionError, ConstructionPlan, StageKind};
use crate::graph::{enumerate_type, PartiteLabel};
use crate::learning::{Builder, EdgeSet, Flow, Label, LearningGraph, VertexId};
use crate::lemmas::Params;

/// Refuse to build graphs beyond this many vertices.
pub const VERTEX_LIMIT: usize = 200_000;

type Q = BigRational;

#[derive(Debug, Clone)]
pub struct ExplicitGraph {
    pub graph: LearningGraph<Q>,
    /// Edges of each plan stage.
    pub stages: Vec<EdgeSet>,
    /// Vertices at the start of each stage.
    pub stage_starts: Vec<Vec<VertexId>>,
}

fn label_vertex(b: &mut Builder<Q>, index: &mut HashMap<PartiteLabel, VertexId>, label: PartiteLabel) -> VertexId {
    if let Some(&v) = index.get(&label) {
        return v;
    }
    let vars = label.variables();
    let v = b.add_vertex(Label::Partite(label.clone()), Some(vars));
    index.insert(label, v);
    v
}

/// Matchings of size `size` in the complement of block `l` inside
/// `left × right`.
fn complement_matchings(label: &PartiteLabel, l: usize, left: &[usize], right: &[usize], size: usize) -> Vec<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    for xs in left.iter().copied().combinations(size) {
        for ys in right.iter().copied().permutations(size) {
            if xs.iter().zip(&ys).all(|(&x, &y)| !label.has_block_edge(l, x, y)) {
                out.push(xs.iter().copied().zip(ys).collect());
            }
        }
    }
    out
}

/// Every successor of `label` in stage `kind`.
fn successors(plan: &ConstructionPlan, n: usize, p: Params, kind: &StageKind, label: &PartiteLabel) -> Vec<PartiteLabel> {
    let blocks = &plan.loaded_edges;
    match *kind {
        StageKind::Setup => {
            let mut out = Vec::new();
            let ty = setup_type(p);
            let mut classes_choices = vec![Vec::<Vec<usize>>::new()];
            for _ in 0..plan.u {
                let mut next = Vec::new();
                for prefix in &classes_choices {
                    let used: Vec<usize> = prefix.iter().flatten().copied().collect();
                    let free: Vec<usize> = (0..n).filter(|v| !used.contains(v)).collect();
                    for c in free.into_iter().combinations(p.r - 1) {
                        let mut ext = prefix.clone();
                        ext.push(c);
                        next.push(ext);
                    }
                }
                classes_choices = next;
            }
            for classes in classes_choices {
                let per_block: Vec<Vec<Vec<(usize, usize)>>> = blocks
                    .iter()
                    .map(|&(i, j)| enumerate_type(&ty, &classes[i], &classes[j]))
                    .collect();
                for choice in per_block.iter().map(|v| v.iter()).multi_cartesian_product() {
                    let mut next = label.clone();
                    for (i, c) in classes.iter().enumerate() {
                        next.set_class(i, c.clone());
                    }
                    for (l, edges) in choice.into_iter().enumerate() {
                        next.set_block(l, edges.clone());
                    }
                    out.push(next);
                }
            }
            out
        }
        StageKind::LoadVertex { t } => {
            let c = t - 1;
            let used: Vec<usize> = label.classes().iter().flatten().copied().collect();
            (0..n)
                .filter(|v| !used.contains(v))
                .map(|b| {
                    let mut next = label.clone();
                    for (l, &(i, j)) in blocks.iter().enumerate() {
                        if i != c && j != c {
                            continue;
                        }
                        let other = if i == c { j } else { i };
                        for &v in label.class(other) {
                            if label.degree_in_block(l, v) == p.rs - 1 {
                                let (x, y) = if i == c { (b, v) } else { (v, b) };
                                next.add_block_edge(l, x, y);
                            }
                        }
                    }
                    next.insert_into_class(c, b);
                    next
                })
                .collect()
        }
        StageKind::Hiding => {
            let per_block: Vec<Vec<Vec<(usize, usize)>>> = blocks
                .iter()
                .enumerate()
                .map(|(l, &(i, j))| complement_matchings(label, l, label.class(i), label.class(j), p.r / 2))
                .collect();
            per_block
                .iter()
                .map(|v| v.iter())
                .multi_cartesian_product()
                .map(|choice| {
                    let mut next = label.clone();
                    for (l, m) in choice.into_iter().enumerate() {
                        for &(x, y) in m {
                            next.add_block_edge(l, x, y);
                        }
                    }
                    next
                })
                .collect()
        }
        StageKind::LoadEdge { t, edge: (i, j) } => {
            let l = t - 1;
            let low = |v: &usize| label.degree_in_block(l, *v) == p.rs;
            let left: Vec<usize> = label.class(i).iter().copied().filter(low).collect();
            let right: Vec<usize> = label.class(j).iter().copied().filter(low).collect();
            left.iter()
                .cartesian_product(&right)
                .filter(|(&x, &y)| !label.has_block_edge(l, x, y))
                .map(|(&x, &y)| {
                    let mut next = label.clone();
                    next.add_block_edge(l, x, y);
                    next
                })
                .collect()
        }
        _ => Vec::new(),
    }
}

/// Whether the step `from → to` of stage `kind` carries flow of `witness`.
fn follows_flow(plan: &ConstructionPlan, kind: &StageKind, witness: &[usize], from: &PartiteLabel, to: &PartiteLabel) -> bool {
    match *kind {
        StageKind::Setup => to.classes().iter().flatten().all(|v| !witness.contains(v)),
        StageKind::LoadVertex { t } => to.class(t - 1).contains(&witness[t - 1]),
        StageKind::Hiding => plan.loaded_edges.iter().enumerate().all(|(l, &(i, j))| {
            to.block(l)
                .iter()
                .filter(|e| !from.block(l).contains(e))
                .all(|&(x, y)| x != witness[i] && y != witness[j])
        }),
        StageKind::LoadEdge { t, edge: (i, j) } => to.has_block_edge(t - 1, witness[i], witness[j]),
        _ => false,
    }
}

/// The whole first construction for a plan, with one flow per ordered
/// witness and unit weights. Only sensible for tiny `n` and `r`.
pub fn explicit_g1(plan: &ConstructionPlan, n: usize, p: Params) -> Result<ExplicitGraph, ConstructionError> {
    let mut b: Builder<Q> = Builder::new();
    let mut index = HashMap::new();
    let root_label = PartiteLabel::empty(plan.u, plan.loaded_edges.clone());
    let root = label_vertex(&mut b, &mut index, root_label.clone());
    let mut frontier = vec![root];
    let mut labels: Vec<PartiteLabel> = vec![root_label];
    // (from, to, edge id) per stage
    let mut stage_edges: Vec<Vec<(VertexId, VertexId, usize)>> = Vec::new();
    let mut stage_starts = Vec::new();
    for st in &plan.stages {
        stage_starts.push(frontier.clone());
        let mut next = Vec::new();
        let mut edges = Vec::new();
        for &v in &frontier {
            let from = labels[v].clone();
            for succ in successors(plan, n, p, &st.kind, &from) {
                let len = succ.edge_count() - from.edge_count();
                let before = b.vertex_count();
                let w = label_vertex(&mut b, &mut index, succ.clone());
                if w == before {
                    labels.push(succ);
                    next.push(w);
                }
                let e = b.add_edge(v, w, Q::one(), len as u64);
                edges.push((v, w, e));
            }
            if b.vertex_count() > VERTEX_LIMIT {
                return Err(ConstructionError::InfeasibleParameters(format!(
                    "explicit graph exceeds {VERTEX_LIMIT} vertices"
                )));
            }
        }
        stage_edges.push(edges);
        frontier = next;
    }
    let mut out_by_vertex: HashMap<VertexId, Vec<(VertexId, usize, usize)>> = HashMap::new();
    for (s, edges) in stage_edges.iter().enumerate() {
        for &(v, w, e) in edges {
            out_by_vertex.entry(v).or_default().push((w, e, s));
        }
    }
    for witness in (0..n).permutations(plan.k) {
        let mut mass: HashMap<VertexId, Q> = HashMap::from([(root, Q::one())]);
        let mut values = Vec::new();
        let mut current = vec![root];
        for st in &plan.stages {
            let mut next = Vec::new();
            for v in current {
                let m = mass[&v].clone();
                let outs: Vec<(VertexId, usize)> = out_by_vertex
                    .get(&v)
                    .into_iter()
                    .flatten()
                    .filter(|&&(w, _, _)| follows_flow(plan, &st.kind, &witness, &labels[v], &labels[w]))
                    .map(|&(w, e, _)| (w, e))
                    .collect();
                if outs.is_empty() {
                    return Err(ConstructionError::WitnessClash(format!(
                        "flow of witness {witness:?} stops at stage {}",
                        st.id
                    )));
                }
                let share = m / Q::from_integer(outs.len().into());
                for (w, e) in outs {
                    values.push((e, share.clone()));
                    let slot = mass.entry(w).or_insert_with(Q::zero);
                    if slot.is_zero() {
                        next.push(w);
                    }
                    *slot += &share;
                }
            }
            current = next;
        }
        let name = format!("a={}", witness.iter().map(|v| v + 1).join(","));
        b.add_flow(Flow::new(name, values).with_witness(witness));
    }
    let graph = b.build().map_err(|e| ConstructionError::InfeasibleParameters(e.to_string()))?;
    let stages = stage_edges
        .iter()
        .map(|edges| EdgeSet::new(edges.iter().map(|&(_, _, e)| e)))
        .collect();
    Ok(ExplicitGraph {
        graph,
        stages,
        stage_starts,
    })
}

/// One hiding stage in isolation: the root leads to every `rs`-regular
/// block between fixed classes `{0..r−1}` and `{r..2r−1}`, and each of those
/// leads to every way of adding a matching of size `r/2`.
#[derive(Debug, Clone)]
pub struct HidingFixture {
    pub graph: LearningGraph<Q>,
    pub stage: EdgeSet,
    /// Start vertices of the stage.
    pub starts: Vec<VertexId>,
    /// Number of edges each start vertex adds.
    pub length: u64,
    /// Out-degree of every start vertex.
    pub degree: u64,
    /// Out-edges used by every flow through a start vertex.
    pub flow_degree: u64,
}

pub fn hiding_fixture(p: Params) -> Result<HidingFixture, ConstructionError> {
    let r = p.r;
    let left: Vec<usize> = (0..r).collect();
    let right: Vec<usize> = (r..2 * r).collect();
    let ty = crate::lemmas::plain_type(p);
    let mut b: Builder<Q> = Builder::new();
    let mut index = HashMap::new();
    let root = label_vertex(&mut b, &mut index, PartiteLabel::empty(2, vec![(0, 1)]));
    let mut starts = Vec::new();
    let mut start_labels = Vec::new();
    let mut root_edges = Vec::new();
    for edges in enumerate_type(&ty, &left, &right) {
        let mut label = PartiteLabel::empty(2, vec![(0, 1)]);
        label.set_class(0, left.clone());
        label.set_class(1, right.clone());
        label.set_block(0, edges);
        let v = label_vertex(&mut b, &mut index, label.clone());
        root_edges.push(b.add_edge(root, v, Q::one(), label.edge_count() as u64));
        starts.push(v);
        start_labels.push(label);
    }
    let mut stage = Vec::new();
    let mut outs: Vec<Vec<(usize, Vec<(usize, usize)>)>> = Vec::new();
    for (&v, label) in starts.iter().zip(&start_labels) {
        let mut list = Vec::new();
        for m in complement_matchings(label, 0, &left, &right, r / 2) {
            let mut next = label.clone();
            for &(x, y) in &m {
                next.add_block_edge(0, x, y);
            }
            let w = label_vertex(&mut b, &mut index, next);
            let e = b.add_edge(v, w, Q::one(), m.len() as u64);
            stage.push(e);
            list.push((e, m));
        }
        outs.push(list);
    }
    let degree = outs[0].len() as u64;
    let mut flow_degree = None;
    for (a1, a2) in left.iter().copied().cartesian_product(right.iter().copied()) {
        let carrying: Vec<usize> = (0..starts.len())
            .filter(|&s| !start_labels[s].has_block_edge(0, a1, a2))
            .collect();
        let share = Q::one() / Q::from_integer(carrying.len().into());
        let mut values = Vec::new();
        for &s in &carrying {
            values.push((root_edges[s], share.clone()));
            let used: Vec<usize> = outs[s]
                .iter()
                .filter(|(_, m)| m.iter().all(|&(x, y)| x != a1 && y != a2))
                .map(|(e, _)| *e)
                .collect();
            let g = used.len() as u64;
            if *flow_degree.get_or_insert(g) != g {
                return Err(ConstructionError::WitnessClash("flow degree differs between start vertices".into()));
            }
            let sub = &share / Q::from_integer(used.len().into());
            values.extend(used.into_iter().map(|e| (e, sub.clone())));
        }
        b.add_flow(Flow::new(format!("a=({},{})", a1 + 1, a2 + 1), values));
    }
    let graph = b.build().map_err(|e| ConstructionError::InfeasibleParameters(e.to_string()))?;
    Ok(HidingFixture {
        graph,
        stage: EdgeSet::new(stage),
        starts,
        length: (r / 2) as u64,
        degree,
        flow_degree: flow_degree.unwrap_or(0),
    })
}
