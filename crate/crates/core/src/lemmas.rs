//! Reweighting transformations, stage-cost bounds and symmetry checkers.
//!
//! Each transformation returns a new graph together with the quantities its
//! guarantee is stated in, so callers can assert the guarantee by exact
//! recomputation.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{enumerate_type, sample_bipartite, BipartiteType, PartiteLabel};
use crate::learning::{EdgeId, EdgeSet, Label, LearningGraph, LgError, VertexId, FLOAT_TOL};
use crate::rng::{self, Estimate};
use crate::scalar::{Scalar, SqrtScalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LemmaError {
    #[error(transparent)]
    Graph(#[from] LgError),
    #[error("stage {stage} is degenerate: {reason}")]
    DegenerateStage { stage: usize, reason: String },
    #[error("flows are inconsistent on class {class}: {detail}")]
    Inconsistent { class: usize, detail: String },
    #[error("hypothesis violated: {clause}")]
    HypothesisViolation { clause: String },
    #[error("not a stage partition: {0}")]
    NotAPartition(String),
    #[error("invalid arguments: {0}")]
    InvalidArguments(String),
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
}

/// Density parameters `r` and `rs = r·s`, checked against the lattice the
/// constructions need.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Params {
    pub r: usize,
    pub rs: usize,
}

impl Params {
    pub fn new(r: usize, rs: usize) -> Result<Self, LemmaError> {
        if !r.is_multiple_of(2) {
            return Err(LemmaError::Infeasible(format!("r must be even (got r = {r})")));
        }
        if r < 2 {
            return Err(LemmaError::Infeasible(format!("r/2 - 1 must be >= 0 (got r = {r})")));
        }
        if rs < 1 {
            return Err(LemmaError::Infeasible("rs must be a positive integer".into()));
        }
        if rs > r - 1 {
            return Err(LemmaError::Infeasible(format!(
                "r - 1 - rs must be >= 0 (got r = {r}, rs = {rs})"
            )));
        }
        Ok(Params { r, rs })
    }

    /// From a density `s`; `r·s` must be an integer.
    pub fn from_density(r: usize, s: &BigRational) -> Result<Self, LemmaError> {
        if !r.is_multiple_of(2) {
            return Err(LemmaError::Infeasible(format!("r must be even (got r = {r})")));
        }
        let rs = BigRational::from_integer(BigInt::from(r)) * s;
        if !rs.is_integer() {
            return Err(LemmaError::Infeasible(format!("r*s must be an integer (got r*s = {rs})")));
        }
        let rs = rs
            .to_integer()
            .try_into()
            .map_err(|_| LemmaError::Infeasible(format!("rs out of range (got {rs})")))?;
        Params::new(r, rs)
    }

    /// Largest feasible `rs ≤ r·s`, i.e. `s` rounded down onto the lattice.
    pub fn round_down(r: usize, s: f64) -> Result<Self, LemmaError> {
        let rs = ((r as f64) * s + 1e-9).floor().max(1.0) as usize;
        Params::new(r, rs.min(r.saturating_sub(1)))
    }

    pub fn s(&self) -> BigRational {
        BigRational::new(self.rs.into(), self.r.into())
    }

    pub fn s_f64(&self) -> f64 {
        self.rs as f64 / self.r as f64
    }
}

/// One line of a lemma report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub lemma: String,
    pub clause: String,
    pub measured: String,
    pub bound: String,
    pub holds: bool,
}

impl Check {
    fn new(lemma: &str, clause: &str, measured: impl ToString, bound: impl ToString, holds: bool) -> Self {
        Check {
            lemma: lemma.into(),
            clause: clause.into(),
            measured: measured.to_string(),
            bound: bound.to_string(),
            holds,
        }
    }
}

fn same<S: Scalar>(a: &S, b: &S) -> bool {
    if S::is_exact() {
        a == b
    } else {
        a.approx_eq(b, FLOAT_TOL)
    }
}

fn max_of<S: Scalar>(values: impl IntoIterator<Item = S>) -> S {
    values.into_iter().fold(S::zero(), |a, b| if b > a { b } else { a })
}

/// Stages `E_1, …, E_k` partitioning `ℰ`, each lying between two levels.
#[derive(Debug, Clone)]
pub struct StagePartition {
    stages: Vec<EdgeSet>,
}

impl StagePartition {
    pub fn new<S: Scalar>(g: &LearningGraph<S>, stages: Vec<EdgeSet>) -> Result<Self, LemmaError> {
        let mut seen = vec![false; g.edge_count()];
        for (i, stage) in stages.iter().enumerate() {
            if stage.is_empty() {
                return Err(LemmaError::NotAPartition(format!("stage {i} is empty")));
            }
            for e in stage.iter() {
                if std::mem::replace(&mut seen[e], true) {
                    return Err(LemmaError::NotAPartition(format!("edge {e} is in two stages")));
                }
            }
            let levels = |v| g.level(v).ok_or_else(|| LemmaError::NotAPartition(format!("vertex {v} is unreachable")));
            let mut lo = usize::MAX;
            let mut hi = 0;
            for e in stage.iter() {
                lo = lo.min(levels(g.edge(e).from)?);
                hi = hi.max(levels(g.edge(e).to)?);
            }
            if g.stage(lo, hi) != *stage {
                return Err(LemmaError::NotAPartition(format!(
                    "stage {i} is not the full edge set between levels {lo} and {hi}"
                )));
            }
        }
        if let Some(e) = seen.iter().position(|s| !s) {
            return Err(LemmaError::NotAPartition(format!("edge {e} is in no stage")));
        }
        Ok(StagePartition { stages })
    }

    pub fn stages(&self) -> &[EdgeSet] {
        &self.stages
    }
}

/// Output of [`balance_stages`].
#[derive(Debug, Clone)]
pub struct Balanced<S> {
    pub graph: LearningGraph<S>,
    /// Per-stage scale factor `α_i = √(C₁(E_i)/C₀(E_i))`.
    pub alphas: Vec<S>,
    /// `C(E_i)` under the original weights.
    pub stage_costs: Vec<S>,
}

impl<S: SqrtScalar> Balanced<S> {
    pub fn cost_sum(&self) -> S {
        self.stage_costs.iter().cloned().fold(S::zero(), |a, b| a + b)
    }

    /// Recomputes the guarantees on the reweighted graph.
    pub fn checks(&self, partition: &StagePartition) -> Result<Vec<Check>, LemmaError> {
        let g = &self.graph;
        let mut out = Vec::new();
        for (i, stage) in partition.stages().iter().enumerate() {
            let c0 = g.c0(stage)?;
            let ok = same(&c0, &self.stage_costs[i]);
            out.push(Check::new("balance_stages", &format!("C0'(E_{}) = C(E_{})", i + 1, i + 1), c0.to_text(), self.stage_costs[i].to_text(), ok));
        }
        let all = g.all_edges();
        let squared = g.complexity_squared(&all)?;
        let sum = self.cost_sum();
        let bound = sum.clone() * sum.clone();
        let ok = squared <= bound || (!S::is_exact() && squared.approx_eq(&bound, FLOAT_TOL));
        out.push(Check::new("balance_stages", "C'(E)^2 <= (sum C(E_i))^2", squared.to_text(), bound.to_text(), ok));
        Ok(out)
    }
}

/// Rescales each stage by `α_i = √(C₁(E_i)/C₀(E_i))`, after which
/// `C₀'(E_i) = C(E_i)` and `C'(ℰ) ≤ Σ C(E_i)`.
pub fn balance_stages<S: SqrtScalar>(
    g: &LearningGraph<S>,
    partition: &StagePartition,
) -> Result<Balanced<S>, LemmaError> {
    let mut alphas = Vec::new();
    let mut stage_costs = Vec::new();
    let mut factor = vec![S::one(); g.edge_count()];
    for (i, stage) in partition.stages().iter().enumerate() {
        let c0 = g.c0(stage)?;
        let c1 = g.c1(stage)?;
        if c0.is_zero() || c1.is_zero() {
            return Err(LemmaError::DegenerateStage {
                stage: i,
                reason: format!("C0 = {}, C1 = {}", c0.to_text(), c1.to_text()),
            });
        }
        let alpha = (c1 / c0.clone())
            .sqrt()
            .ok_or_else(|| LemmaError::InvalidArguments("scalar type has no square root for this stage".into()))?;
        for e in stage.iter() {
            factor[e] = alpha.clone();
        }
        stage_costs.push(c0 * alpha.clone());
        alphas.push(alpha);
    }
    let graph = g.reweighted(|e, w| w.clone() * factor[e].clone());
    Ok(Balanced {
        graph,
        alphas,
        stage_costs,
    })
}

/// `E_V^→`: edges of `within` leaving `vs` or any descendant of `vs`
/// reachable inside `within`.
pub fn descendant_edges<S: Scalar>(g: &LearningGraph<S>, vs: &[VertexId], within: &EdgeSet) -> EdgeSet {
    let mut seen: BTreeSet<VertexId> = vs.iter().copied().collect();
    let mut stack: Vec<VertexId> = vs.to_vec();
    let mut edges = Vec::new();
    while let Some(v) = stack.pop() {
        for &e in g.out_edges(v) {
            if within.contains(e) {
                edges.push(e);
                let to = g.edge(e).to;
                if seen.insert(to) {
                    stack.push(to);
                }
            }
        }
    }
    EdgeSet::new(edges)
}

/// Output of [`reweight_by_classes`].
#[derive(Debug, Clone)]
pub struct ClassReweighting<S> {
    pub graph: LearningGraph<S>,
    /// Old edge id to new edge id; `None` for deleted edges.
    pub edge_map: Vec<Option<EdgeId>>,
    /// The stage in the new graph.
    pub stage: EdgeSet,
    /// Flow mass `α_i` of each class.
    pub alphas: Vec<S>,
    /// `C(E_i)²` under the original weights; zero for deleted classes.
    pub class_costs_squared: Vec<S>,
}

impl<S: Scalar> ClassReweighting<S> {
    pub fn max_cost_squared(&self) -> S {
        max_of(self.class_costs_squared.iter().cloned())
    }

    /// The two halves of the guarantee and the guarantee itself.
    pub fn checks(&self) -> Result<Vec<Check>, LemmaError> {
        let g = &self.graph;
        let c0 = g.c0(&self.stage)?;
        let c1 = g.c1(&self.stage)?;
        let bound = self.max_cost_squared();
        let le = |a: &S, b: &S| a <= b || (!S::is_exact() && a.approx_eq(b, FLOAT_TOL));
        let product = c0.clone() * c1.clone();
        Ok(vec![
            Check::new("reweight_by_classes", "C1'(E) <= 1", c1.to_text(), "1", le(&c1, &S::one())),
            Check::new("reweight_by_classes", "C0'(E) <= max C(E_i)^2", c0.to_text(), bound.to_text(), le(&c0, &bound)),
            Check::new("reweight_by_classes", "C'(E)^2 <= max C(E_i)^2", product.to_text(), bound.to_text(), le(&product, &bound)),
        ])
    }
}

/// Reweights `w'(e) = α_i C₁(E_i) w(e)` on each class's descendant edges
/// `E_i`, deleting classes that carry no flow.
pub fn reweight_by_classes<S: Scalar>(
    g: &LearningGraph<S>,
    stage: &EdgeSet,
    classes: &[Vec<VertexId>],
) -> Result<ClassReweighting<S>, LemmaError> {
    let parts: Vec<EdgeSet> = classes.iter().map(|c| descendant_edges(g, c, stage)).collect();
    let mut owner: HashMap<EdgeId, usize> = HashMap::new();
    for (i, part) in parts.iter().enumerate() {
        for e in part.iter() {
            if let Some(j) = owner.insert(e, i) {
                return Err(LemmaError::HypothesisViolation {
                    clause: format!("descendant edge sets of classes {j} and {i} overlap at edge {e}"),
                });
            }
        }
    }
    if owner.len() != stage.len() {
        return Err(LemmaError::HypothesisViolation {
            clause: "classes do not cover the vertices at the beginning of the stage".into(),
        });
    }
    let mut alphas = Vec::new();
    for (i, part) in parts.iter().enumerate() {
        let mut alpha: Option<S> = None;
        for y in 0..g.flows().len() {
            let value = g.flow_value(part, y)?;
            match &alpha {
                None => alpha = Some(value),
                Some(a) if same(a, &value) => {}
                Some(a) => {
                    return Err(LemmaError::Inconsistent {
                        class: i,
                        detail: format!("flow 0 sends {} but flow {y} sends {}", a.to_text(), value.to_text()),
                    })
                }
            }
        }
        alphas.push(alpha.unwrap_or_else(S::zero));
    }
    let mut factor: Vec<Option<S>> = vec![None; g.edge_count()];
    let mut removed = Vec::new();
    let mut class_costs_squared = Vec::new();
    for (i, part) in parts.iter().enumerate() {
        if alphas[i].is_zero() {
            removed.extend(part.iter());
            class_costs_squared.push(S::zero());
            continue;
        }
        let c0 = g.c0(part)?;
        let c1 = g.c1(part)?;
        if c1.is_zero() {
            return Err(LemmaError::DegenerateStage {
                stage: i,
                reason: "class carries flow but has C1 = 0".into(),
            });
        }
        let f = alphas[i].clone() * c1.clone();
        for e in part.iter() {
            factor[e] = Some(f.clone());
        }
        class_costs_squared.push(c0 * c1);
    }
    let reweighted = g.reweighted(|e, w| match &factor[e] {
        Some(f) => w.clone() * f.clone(),
        None => w.clone(),
    });
    let (graph, edge_map) = reweighted.without_edges(&EdgeSet::new(removed));
    let new_stage = stage.iter().filter_map(|e| edge_map[e]).collect();
    Ok(ClassReweighting {
        graph,
        edge_map,
        stage: new_stage,
        alphas,
        class_costs_squared,
    })
}

/// `√(max C₀(E_v^→) · max C₁(E_v^→) · |V| / |W_y|)`.
pub fn simple_stage_bound<S: SqrtScalar>(
    c0_per_vertex: &[S],
    c1_per_vertex: &[S],
    v_count: usize,
    w_count: usize,
) -> Result<S, LemmaError> {
    if w_count == 0 || w_count > v_count {
        return Err(LemmaError::InvalidArguments(format!("need 0 < |W_y| <= |V| (got {w_count}, {v_count})")));
    }
    let inner = max_of(c0_per_vertex.iter().cloned())
        * max_of(c1_per_vertex.iter().cloned())
        * S::from_u64(v_count as u64)
        / S::from_u64(w_count as u64);
    inner
        .sqrt()
        .ok_or_else(|| LemmaError::InvalidArguments("scalar type has no square root for the bound".into()))
}

/// Result of checking the simple stage bound on an explicit graph.
#[derive(Debug, Clone)]
pub struct SimpleStageReport<S> {
    pub bound: S,
    /// Exact `C(E_V^→)²`.
    pub exact_squared: S,
    pub w_count: usize,
    pub holds: bool,
}

/// Checks the three hypotheses on an explicit graph, then compares the
/// bound with the exact `C(E_V^→)`.
pub fn verify_simple_stage_bound<S: SqrtScalar>(
    g: &LearningGraph<S>,
    stage: &EdgeSet,
    vs: &[VertexId],
) -> Result<SimpleStageReport<S>, LemmaError> {
    let parts: Vec<EdgeSet> = vs.iter().map(|&v| descendant_edges(g, &[v], stage)).collect();
    let mut seen = HashMap::new();
    for (i, part) in parts.iter().enumerate() {
        for e in part.iter() {
            if seen.insert(e, i).is_some() {
                return Err(LemmaError::HypothesisViolation {
                    clause: "(1) descendant edge sets of distinct vertices are disjoint".into(),
                });
            }
        }
    }
    let whole = descendant_edges(g, vs, stage);
    let mut w_count = None;
    for y in 0..g.flows().len() {
        let total = g.flow_value(&whole, y)?;
        let masses = parts.iter().map(|p| g.flow_value(p, y)).collect::<Result<Vec<_>, _>>()?;
        let positive: Vec<&S> = masses.iter().filter(|m| m.is_positive()).collect();
        match w_count {
            None => w_count = Some(positive.len()),
            Some(w) if w == positive.len() => {}
            Some(_) => {
                return Err(LemmaError::HypothesisViolation {
                    clause: "(2) |W_y| is independent of y".into(),
                })
            }
        }
        if !positive.is_empty() {
            let share = total / S::from_u64(positive.len() as u64);
            if positive.iter().any(|m| !same(*m, &share)) {
                return Err(LemmaError::HypothesisViolation {
                    clause: "(3) p_y(E_v) = p_y(E_V)/|W_y| for v in W_y".into(),
                });
            }
        }
    }
    let w_count = w_count.unwrap_or(0);
    let c0s = parts.iter().map(|p| g.c0(p)).collect::<Result<Vec<_>, _>>()?;
    let c1s = parts.iter().map(|p| g.c1(p)).collect::<Result<Vec<_>, _>>()?;
    let bound = simple_stage_bound(&c0s, &c1s, vs.len(), w_count)?;
    let exact_squared = g.complexity_squared(&whole)?;
    let bound_sq = bound.clone() * bound.clone();
    let holds = exact_squared <= bound_sq || (!S::is_exact() && exact_squared.approx_eq(&bound_sq, FLOAT_TOL));
    Ok(SimpleStageReport {
        bound,
        exact_squared,
        w_count,
        holds,
    })
}

/// A stage cost split into length, degree ratio and maximum vertex ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct StageCost<S> {
    pub length: S,
    pub degree_ratio: S,
    pub max_vertex_ratio: S,
    pub cost: S,
}

/// `max_i ℓ √((d/g) · ratio_i)` for a consecutive-level stage with unit weights.
pub fn uniform_stage_cost<S: SqrtScalar>(
    length: S,
    degree: u64,
    flow_degree: u64,
    vertex_ratios: &[S],
) -> Result<StageCost<S>, LemmaError> {
    if flow_degree == 0 {
        return Err(LemmaError::InvalidArguments("flow degree g must be positive".into()));
    }
    if degree < flow_degree {
        return Err(LemmaError::InvalidArguments(format!("need d >= g (got d = {degree}, g = {flow_degree})")));
    }
    if vertex_ratios.is_empty() {
        return Err(LemmaError::InvalidArguments("no vertex classes".into()));
    }
    let degree_ratio = S::from_u64(degree) / S::from_u64(flow_degree);
    let max_vertex_ratio = max_of(vertex_ratios.iter().cloned());
    let root = (degree_ratio.clone() * max_vertex_ratio.clone())
        .sqrt()
        .ok_or_else(|| LemmaError::InvalidArguments("scalar type has no square root for the cost".into()))?;
    Ok(StageCost {
        cost: length.clone() * root,
        length,
        degree_ratio,
        max_vertex_ratio,
    })
}

/// `τ(v)` for a host-vertex permutation `τ`, or `None` if the image is not a
/// vertex of the graph.
pub type VertexAction<'a> = dyn Fn(VertexId, &[usize]) -> Option<VertexId> + Sync + 'a;

/// The natural action on [`PartiteLabel`] vertices.
pub fn partite_action<S: Scalar>(g: &LearningGraph<S>) -> impl Fn(VertexId, &[usize]) -> Option<VertexId> + Sync + '_ {
    let index: HashMap<&PartiteLabel, VertexId> = g
        .vertices()
        .iter()
        .enumerate()
        .filter_map(|(v, x)| match &x.label {
            Label::Partite(p) => Some((p, v)),
            Label::Opaque(_) => None,
        })
        .collect();
    move |v, perm| match &g.vertex(v).label {
        Label::Partite(p) => index.get(&p.permute(perm)).copied(),
        Label::Opaque(_) => None,
    }
}

/// Orbit id of every vertex under the group generated by a transposition
/// and an `n`-cycle, i.e. all of `S_n`.
pub fn orbits<S: Scalar>(g: &LearningGraph<S>, n: usize, action: &VertexAction<'_>) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..g.vertex_count()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut generators = Vec::new();
    if n >= 2 {
        let mut swap: Vec<usize> = (0..n).collect();
        swap.swap(0, 1);
        generators.push(swap);
        generators.push((0..n).map(|i| (i + 1) % n).collect());
    }
    for v in 0..g.vertex_count() {
        for gen in &generators {
            if let Some(w) = action(v, gen) {
                let (a, b) = (find(&mut parent, v), find(&mut parent, w));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut ids = HashMap::new();
    (0..g.vertex_count())
        .map(|v| {
            let root = find(&mut parent, v);
            let next = ids.len();
            *ids.entry(root).or_insert(next)
        })
        .collect()
}

/// Flow out of and into each orbit: `orbit -> (p_y([u]^+), p_y([u]^-))`.
pub fn orbit_flow_masses<S: Scalar>(g: &LearningGraph<S>, orbit: &[usize], y: usize) -> BTreeMap<usize, (S, S)> {
    let mut out: BTreeMap<usize, (S, S)> = BTreeMap::new();
    for (e, p) in g.flows()[y].support() {
        let edge = g.edge(e);
        let a = out.entry(orbit[edge.from]).or_insert_with(|| (S::zero(), S::zero()));
        a.0 = a.0.clone() + p.clone();
        let b = out.entry(orbit[edge.to]).or_insert_with(|| (S::zero(), S::zero()));
        b.1 = b.1.clone() + p.clone();
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitivityReport {
    /// A permutation carrying the first flow onto the second.
    pub tau: Option<Vec<usize>>,
    pub candidates_tried: usize,
    /// Whether every permutation of `[n]` was tried.
    pub exhaustive: bool,
    /// Orbit masses agree between the two flows, checked when `tau` exists.
    pub consistent: Option<bool>,
}

/// Searches for `τ` with `p_y((u,v)) = p_{y'}((τu, τv))` on all edges. The
/// witness correspondence is tried first, then every permutation when
/// `n ≤ 8`.
pub fn check_transitive_action<S: Scalar>(
    g: &LearningGraph<S>,
    y: usize,
    y2: usize,
    n: usize,
    action: &VertexAction<'_>,
) -> Result<TransitivityReport, LemmaError> {
    let f1 = g.flow(y)?;
    let f2 = g.flow(y2)?;
    let edge_index: HashMap<(VertexId, VertexId), EdgeId> =
        g.edges().iter().enumerate().map(|(id, e)| ((e.from, e.to), id)).collect();
    let maps_flow = |perm: &[usize]| {
        g.edges().iter().enumerate().all(|(id, e)| {
            let image = action(e.from, perm)
                .zip(action(e.to, perm))
                .and_then(|key| edge_index.get(&key));
            match image {
                Some(&img) => same(&f1.value(id), &f2.value(img)),
                None => false,
            }
        })
    };
    let mut tried = 0;
    let mut found = None;
    if let (Some(w1), Some(w2)) = (&f1.witness, &f2.witness) {
        let mut perm = vec![usize::MAX; n];
        for (&a, &b) in w1.iter().zip(w2) {
            perm[a] = b;
        }
        let mut free = (0..n).filter(|v| !w2.contains(v));
        for slot in perm.iter_mut().filter(|p| **p == usize::MAX) {
            *slot = free.next().expect("witness images are distinct");
        }
        tried += 1;
        if maps_flow(&perm) {
            found = Some(perm);
        }
    }
    let exhaustive = found.is_none() && n <= 8;
    if exhaustive {
        for perm in (0..n).permutations(n) {
            tried += 1;
            if maps_flow(&perm) {
                found = Some(perm);
                break;
            }
        }
    }
    let consistent = found.as_ref().map(|_| {
        let orbit = orbits(g, n, action);
        let a = orbit_flow_masses(g, &orbit, y);
        let b = orbit_flow_masses(g, &orbit, y2);
        a.len() == b.len()
            && a.iter().all(|(k, (p, q))| b.get(k).is_some_and(|(p2, q2)| same(p, p2) && same(q, q2)))
    });
    Ok(TransitivityReport {
        tau: found,
        candidates_tried: tried,
        exhaustive: exhaustive || n <= 8,
        consistent,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetryViolation {
    pub clause: String,
    pub vertex: VertexId,
    pub flow: usize,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SymmetryReport {
    pub violations: Vec<SymmetryViolation>,
    pub vertices_checked: usize,
    /// `|W_{y,[u]}|` per orbit, when it is the same for every flow.
    pub support_sizes: BTreeMap<usize, usize>,
}

impl SymmetryReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn clause_count(&self, prefix: &str) -> usize {
        self.violations.iter().filter(|v| v.clause.starts_with(prefix)).count()
    }
}

/// Checks the uniform-splitting and in-degree hypotheses and the
/// uniform-inflow conclusion, given the orbit id of every vertex.
pub fn check_symmetry_hypotheses<S: Scalar>(g: &LearningGraph<S>, orbit: &[usize]) -> SymmetryReport {
    let mut report = SymmetryReport::default();
    let mut out_degree_seen: HashMap<usize, usize> = HashMap::new();
    let mut in_counts_seen: HashMap<usize, BTreeMap<usize, usize>> = HashMap::new();
    let mut sizes_per_flow: Vec<BTreeMap<usize, usize>> = Vec::new();
    let mut checked = BTreeSet::new();
    for (y, flow) in g.flows().iter().enumerate() {
        let mut inflow: HashMap<VertexId, S> = HashMap::new();
        inflow.insert(g.root(), S::one());
        for (e, p) in flow.support() {
            let to = g.edge(e).to;
            let entry = inflow.entry(to).or_insert_with(S::zero);
            *entry = entry.clone() + p.clone();
        }
        let mut class_inflow: HashMap<usize, S> = HashMap::new();
        let mut sizes: BTreeMap<usize, usize> = BTreeMap::new();
        let mut violation = |clause: &str, vertex, detail: String| {
            report.violations.push(SymmetryViolation {
                clause: clause.into(),
                vertex,
                flow: y,
                detail,
            })
        };
        let mut vertices: Vec<_> = inflow.iter().collect();
        vertices.sort_by_key(|(v, _)| **v);
        for (&u, incoming) in vertices {
            checked.insert(u);
            let carrying: Vec<S> = g
                .out_edges(u)
                .iter()
                .filter_map(|&e| flow.get(e).cloned())
                .collect();
            if !carrying.is_empty() {
                let share = incoming.clone() / S::from_u64(carrying.len() as u64);
                if carrying.iter().any(|p| !same(p, &share)) {
                    violation("hypothesis 1: uniform split", u, format!("{} outgoing flow values are not equal", carrying.len()));
                }
                let known = *out_degree_seen.entry(orbit[u]).or_insert(carrying.len());
                if known != carrying.len() {
                    violation(
                        "hypothesis 1: g+([u]) depends only on the class",
                        u,
                        format!("{} flow-carrying out-edges, another class member has {known}", carrying.len()),
                    );
                }
            }
            if u != g.root() {
                let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
                for &e in g.in_edges(u) {
                    *counts.entry(orbit[g.edge(e).from]).or_default() += 1;
                }
                let known = in_counts_seen.entry(orbit[u]).or_insert_with(|| counts.clone());
                if *known != counts {
                    violation(
                        "hypothesis 2: g-([w],[u]) depends only on the classes",
                        u,
                        format!("in-edge counts {counts:?} differ from {known:?}"),
                    );
                }
            }
            match class_inflow.get(&orbit[u]) {
                Some(a) if !same(a, incoming) => violation(
                    "conclusion: inflow is 0 or alpha_y([u])",
                    u,
                    format!("inflow {} but another class member receives {}", incoming.to_text(), a.to_text()),
                ),
                Some(_) => {}
                None => {
                    class_inflow.insert(orbit[u], incoming.clone());
                }
            }
            *sizes.entry(orbit[u]).or_default() += 1;
        }
        sizes_per_flow.push(sizes);
    }
    let mut all_orbits: BTreeSet<usize> = BTreeSet::new();
    for s in &sizes_per_flow {
        all_orbits.extend(s.keys());
    }
    for o in all_orbits {
        let values: BTreeSet<usize> = sizes_per_flow.iter().map(|s| s.get(&o).copied().unwrap_or(0)).collect();
        if values.len() == 1 {
            report.support_sizes.insert(o, *values.iter().next().unwrap());
        } else {
            report.violations.push(SymmetryViolation {
                clause: "conclusion: |W_y,[u]| is independent of y".into(),
                vertex: orbit.iter().position(|&x| x == o).unwrap_or(0),
                flow: 0,
                detail: format!("support sizes {values:?}"),
            });
        }
    }
    report.vertices_checked = checked.len();
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbabilityMode {
    /// A fixed edge lies in a random graph of type `({(r,rs)},{(r,rs)})`.
    Plain,
    /// A fixed edge lies in a random graph of the final hidden type and both
    /// its endpoints have degree `rs+1`.
    Hidden,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeProbability {
    pub mode: ProbabilityMode,
    pub params: Params,
    /// Exact probability when known (always for plain mode).
    pub exact: Option<String>,
    pub estimate: Option<Estimate>,
    /// `s` for plain mode, `s/4` for hidden mode.
    pub bound: f64,
    pub holds: bool,
}

/// The regular type `({(r,rs)},{(r,rs)})`.
pub fn plain_type(p: Params) -> BipartiteType {
    BipartiteType::symmetric(vec![(p.r, p.rs)]).expect("regular type is valid")
}

/// The type `({(r/2−1,rs),(r/2+1,rs+1)}, same)` reached after loading.
pub fn hidden_type(p: Params) -> BipartiteType {
    BipartiteType::symmetric(vec![(p.r / 2 - 1, p.rs), (p.r / 2 + 1, p.rs + 1)]).expect("hidden type is valid")
}

fn hidden_event(edges: &[(usize, usize)], p: Params) -> bool {
    let (y1, y2) = (0, p.r);
    edges.contains(&(y1, y2))
        && edges.iter().filter(|e| e.0 == y1).count() == p.rs + 1
        && edges.iter().filter(|e| e.1 == y2).count() == p.rs + 1
}

/// Probability of the event by enumerating every graph of the type. Left
/// side is `0..r`, right side `r..2r`, the fixed edge is `(0, r)`.
pub fn enumerated_edge_probability(p: Params, mode: ProbabilityMode) -> BigRational {
    let left: Vec<usize> = (0..p.r).collect();
    let right: Vec<usize> = (p.r..2 * p.r).collect();
    let ty = match mode {
        ProbabilityMode::Plain => plain_type(p),
        ProbabilityMode::Hidden => hidden_type(p),
    };
    let all = enumerate_type(&ty, &left, &right);
    let hits = all
        .iter()
        .filter(|g| match mode {
            ProbabilityMode::Plain => g.contains(&(0, p.r)),
            ProbabilityMode::Hidden => hidden_event(g, p),
        })
        .count();
    BigRational::new(hits.into(), all.len().into())
}

/// Plain mode returns `s` exactly; hidden mode samples random graphs of
/// the hidden type and checks the estimate against `s/4` within 3 standard
/// errors.
pub fn uniform_edge_probability(
    p: Params,
    mode: ProbabilityMode,
    samples: u64,
    seed: u64,
) -> EdgeProbability {
    match mode {
        ProbabilityMode::Plain => EdgeProbability {
            mode,
            params: p,
            exact: Some(p.s().to_string()),
            estimate: None,
            bound: p.s_f64(),
            holds: true,
        },
        ProbabilityMode::Hidden => {
            let ty = hidden_type(p);
            let left: Vec<usize> = (0..p.r).collect();
            let right: Vec<usize> = (p.r..2 * p.r).collect();
            let est = rng::estimate(seed, samples, |r| {
                let g = sample_bipartite(&ty, &left, &right, r).expect("hidden type is realizable");
                hidden_event(&g, p)
            });
            let bound = p.s_f64() / 4.0;
            EdgeProbability {
                mode,
                params: p,
                exact: None,
                estimate: Some(est),
                bound,
                holds: est.mean + 3.0 * est.std_error >= bound,
            }
        }
    }
}
