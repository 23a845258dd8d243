//! Staged learning-graph constructions for subgraph finding.
//!
//! Each construction exists in two forms. A [`ConstructionPlan`] lists one
//! [`StageSpec`] per stage, with leading-order cost terms valid at any `n`.
//! The [`materialize`] module builds concrete root-to-sink flow paths at
//! small `n` so every degree type and flow rule can be audited.

use num_rational::Rational64;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{BipartiteType, GraphError, PatternGraph};
use crate::lemmas::{LemmaError, Params};
use crate::optimizer::cost::{ratio, CostTerm, Point};

pub mod materialize;
pub mod tiny;

pub use materialize::{
    audit_flow_path, materialize_flow_path, vertex_ratio_audit, FlowPath, PathAudit, PathStep, VertexRatioAudit,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstructionError {
    #[error("infeasible parameters: {0}")]
    InfeasibleParameters(String),
    #[error("witness clash: {0}")]
    WitnessClash(String),
    #[error("the first {u} pattern vertices span no edge")]
    NoEdges { u: usize },
    #[error("u must satisfy 1 <= u <= k (got u = {u}, k = {k})")]
    BadPrefix { u: usize, k: usize },
    #[error("lambda must satisfy 1 <= lambda <= r (got lambda = {lambda}, r = {r})")]
    LambdaOutOfRange { lambda: f64, r: f64 },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl From<LemmaError> for ConstructionError {
    fn from(e: LemmaError) -> Self {
        ConstructionError::InfeasibleParameters(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    G1,
    G2,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StageKind {
    /// Choose the classes `A_i` and their sparse blocks.
    Setup,
    /// Add witness vertex `a_t` (1-based `t`) to `A_t`.
    LoadVertex { t: usize },
    /// Raise half of every class to degree `rs + 1` in each block.
    Hiding,
    /// Load the `t`-th pattern edge (1-based), `edge` in 0-based vertices.
    LoadEdge { t: usize, edge: (usize, usize) },
    /// Search for the last vertex plus the collision subroutine.
    Collision,
    /// Subroutine stage 0: pick `u` and load `λ` edges per neighbour class.
    CollisionSetup,
    /// Subroutine stage `t`: load one more edge into the `t`-th neighbour class.
    CollisionLoad { t: usize },
}

/// One stage: cost `length · √(degree_ratio · vertex_ratio)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageSpec {
    pub id: usize,
    #[serde(flatten)]
    pub kind: StageKind,
    pub length: CostTerm,
    pub degree_ratio: CostTerm,
    pub vertex_ratio: CostTerm,
    pub cost: CostTerm,
    pub description: String,
    /// Stages of the subroutine attached to each vertex, if any.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub subroutine: Vec<StageSpec>,
}

impl StageSpec {
    fn new(
        id: usize,
        kind: StageKind,
        length: CostTerm,
        degree_ratio: CostTerm,
        vertex_ratio: CostTerm,
        description: String,
    ) -> Self {
        let cost = &length * &(&degree_ratio * &vertex_ratio).sqrt();
        StageSpec {
            id,
            kind,
            length,
            degree_ratio,
            vertex_ratio,
            cost,
            description,
            subroutine: Vec::new(),
        }
    }

    /// Terms whose maximum is the stage cost at a concrete point. A stage
    /// with a subroutine costs `√(vertex ratio)` times each subroutine stage.
    pub fn cost_terms(&self) -> Vec<CostTerm> {
        if self.subroutine.is_empty() {
            vec![self.cost.clone()]
        } else {
            let scale = self.vertex_ratio.sqrt();
            self.subroutine.iter().map(|s| &scale * &s.cost).collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstructionPlan {
    pub construction: Construction,
    pub k: usize,
    /// Edges of the whole pattern, 0-based.
    pub pattern_edges: Vec<(usize, usize)>,
    pub min_degree: usize,
    /// Number of classes loaded by the first part.
    pub u: usize,
    /// Edges of the pattern among the first `u` vertices.
    pub loaded_edges: Vec<(usize, usize)>,
    pub stages: Vec<StageSpec>,
    /// Costs are leading order; constant factors are dropped.
    pub constants_dropped: bool,
}

impl ConstructionPlan {
    pub fn m(&self) -> usize {
        self.loaded_edges.len()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plan serializes")
    }

    /// Degree of pattern vertex `v` among the loaded edges.
    pub fn loaded_degree(&self, v: usize) -> usize {
        self.loaded_edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    /// Neighbours of the last pattern vertex, in increasing order.
    pub fn last_neighbors(&self) -> Vec<usize> {
        let last = self.k - 1;
        let mut out: Vec<usize> = self
            .pattern_edges
            .iter()
            .filter_map(|&(a, b)| (b == last).then_some(a).or((a == last).then_some(b)))
            .collect();
        out.sort_unstable();
        out
    }

    /// Stage costs at a concrete point; `objective` folds the terms of a
    /// subroutine stage the same way it folds stages.
    pub fn stage_costs(&self, p: &Point, objective: Objective) -> Vec<f64> {
        self.stages
            .iter()
            .map(|st| objective.fold(st.cost_terms().iter().map(|t| t.eval(p))))
            .collect()
    }

    pub fn cost(&self, p: &Point, objective: Objective) -> f64 {
        objective.fold(self.stage_costs(p, objective))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    Sum,
    Max,
}

impl Objective {
    pub fn fold(self, values: impl IntoIterator<Item = f64>) -> f64 {
        match self {
            Objective::Sum => values.into_iter().sum(),
            Objective::Max => values.into_iter().fold(0.0, f64::max),
        }
    }
}

fn one() -> CostTerm {
    CostTerm::one()
}

fn int(v: i64) -> Rational64 {
    Rational64::from_integer(v)
}

/// Stages `0 ..= u + m + 1` of the first construction loading the pattern
/// induced on vertices `1..=u`.
pub fn g1_stage_specs(h: &PatternGraph, u: usize) -> Result<ConstructionPlan, ConstructionError> {
    let k = h.k();
    if u < 1 || u > k {
        return Err(ConstructionError::BadPrefix { u, k });
    }
    let loaded = h.prefix_edges(u);
    if loaded.is_empty() {
        return Err(ConstructionError::NoEdges { u });
    }
    let m = loaded.len() as i64;
    let u_i = u as i64;
    let mut stages = Vec::new();
    stages.push(StageSpec::new(
        0,
        StageKind::Setup,
        CostTerm::s(int(1)) * CostTerm::r(int(2)),
        one(),
        one(),
        format!(
            "classes A_1..A_{u} of size r-1; each of the {m} blocks of type ({{(r-1-rs,rs),(rs,rs-1)}}, same)"
        ),
    ));
    for t in 1..=u_i {
        stages.push(StageSpec::new(
            t as usize,
            StageKind::LoadVertex { t: t as usize },
            CostTerm::s(int(1)) * CostTerm::r(int(1)),
            CostTerm::n(int(1)),
            CostTerm::n_over_r(int(t - 1)),
            format!(
                "add a_{t} to A_{t}; blocks {{{t},j}}, j>{t}: ({{(r-rs,rs),(rs,rs-1)}},{{(r-1,rs)}}); blocks {{i,{t}}}, i<{t}: ({{(r,rs)}},{{(r,rs)}})"
            ),
        ));
    }
    stages.push(StageSpec::new(
        u + 1,
        StageKind::Hiding,
        CostTerm::r(int(1)),
        one(),
        CostTerm::n_over_r(int(u_i)),
        "add r/2 disjoint edges per block: ({(r/2,rs),(r/2,rs+1)}, same)".into(),
    ));
    for (t, &(i, j)) in loaded.iter().enumerate() {
        let t = t as i64 + 1;
        stages.push(StageSpec::new(
            u + 1 + t as usize,
            StageKind::LoadEdge {
                t: t as usize,
                edge: (i, j),
            },
            one(),
            CostTerm::r(int(2)),
            CostTerm::n_over_r(int(u_i)) * CostTerm::s(int(-(t - 1))),
            format!(
                "load {{a_{},a_{}}} between degree-rs vertices of Q_{t}; Q_{t} becomes ({{(r/2-1,rs),(r/2+1,rs+1)}}, same)",
                i + 1,
                j + 1
            ),
        ));
    }
    Ok(ConstructionPlan {
        construction: Construction::G1,
        k,
        pattern_edges: h.edges().to_vec(),
        min_degree: h.min_degree(),
        u,
        loaded_edges: loaded,
        stages,
        constants_dropped: true,
    })
}

/// The first construction over vertices `1..k-1`, then one stage that finds
/// the last vertex with the collision subroutine.
pub fn g2_plan(h: &PatternGraph) -> Result<ConstructionPlan, ConstructionError> {
    let k = h.k();
    let d = h.min_degree();
    debug_assert_eq!(h.degree(k - 1), d);
    let mut plan = g1_stage_specs(h, k - 1)?;
    plan.construction = Construction::G2;
    let m_prime = plan.m() as i64;
    let dd = d as i64;
    let mut last = StageSpec::new(
        plan.stages.len(),
        StageKind::Collision,
        CostTerm::r(ratio(dd, dd + 1)),
        CostTerm::n(int(1)),
        CostTerm::s(int(-m_prime)) * CostTerm::n_over_r(int(k as i64 - 1)),
        format!("find a_{k} and its {d} linking edges by search plus {d}-wise collision"),
    );
    last.subroutine = collision_subroutine_specs(d);
    plan.stages.push(last);
    Ok(plan)
}

/// Subroutine stages: `λ√n`, then `√(nr)(r/λ)^{(t−1)/2}` for `t = 1..d`.
pub fn collision_subroutine_specs(d: usize) -> Vec<StageSpec> {
    let mut out = vec![StageSpec::new(
        0,
        StageKind::CollisionSetup,
        CostTerm::lambda(int(1)),
        CostTerm::n(int(1)),
        one(),
        "choose u outside every class; load lambda edges from u to degree-(rs+1) vertices of each neighbour class".into(),
    )];
    for t in 1..=d as i64 {
        out.push(StageSpec::new(
            t as usize,
            StageKind::CollisionLoad { t: t as usize },
            one(),
            CostTerm::r(int(1)),
            CostTerm::n(int(1)) * CostTerm::r(int(t - 1)) * CostTerm::lambda(int(-(t - 1))),
            format!("load one more edge between u and neighbour class {t}"),
        ));
    }
    out
}

/// Checks `1 ≤ λ ≤ r` before evaluating subroutine costs.
pub fn collision_costs(d: usize, p: &Point) -> Result<Vec<f64>, ConstructionError> {
    if !(1.0..=p.r).contains(&p.lambda) {
        return Err(ConstructionError::LambdaOutOfRange { lambda: p.lambda, r: p.r });
    }
    Ok(collision_subroutine_specs(d).iter().map(|s| s.cost.eval(p)).collect())
}

/// `λ* = r^{d/(d+1)}`.
pub fn optimal_lambda(d: usize) -> CostTerm {
    CostTerm::r(ratio(d as i64, d as i64 + 1))
}

/// `√n · r^{d/(d+1)}`, the subroutine cost at `λ*`.
pub fn optimal_collision_cost(d: usize) -> CostTerm {
    CostTerm::n(ratio(1, 2)) * CostTerm::r(ratio(d as i64, d as i64 + 1))
}

/// Setup, update and checking costs of the Johnson-graph walk.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WalkCosts {
    pub setup: CostTerm,
    pub update: CostTerm,
    pub check: CostTerm,
}

impl WalkCosts {
    /// Exponents of `(S, U, C)` at `r = n^x`.
    pub fn exponents_at(&self, x: Rational64) -> [Rational64; 3] {
        let z = Rational64::from_integer(0);
        [
            self.setup.exponent_at(x, z, z),
            self.update.exponent_at(x, z, z),
            self.check.exponent_at(x, z, z),
        ]
    }
}

pub fn quantum_walk_costs(k: usize, d: usize) -> WalkCosts {
    let half_k = ratio(k as i64 - 1, 2);
    WalkCosts {
        setup: CostTerm::r(int(2)),
        update: CostTerm::n_over_r(half_k) * CostTerm::r(ratio(3, 2)),
        check: CostTerm::n_over_r(half_k) * CostTerm::n(ratio(1, 2)) * CostTerm::r(ratio(d as i64, d as i64 + 1)),
    }
}

/// Exact number of edge slots each stage adds, in stage order. The
/// collision stage counts `d·λ + d`.
pub fn exact_stage_lengths(plan: &ConstructionPlan, p: Params, lambda: usize) -> Vec<u64> {
    let (r, rs) = (p.r as u64, p.rs as u64);
    plan.stages
        .iter()
        .map(|st| match st.kind {
            StageKind::Setup => plan.m() as u64 * rs * (r - 2),
            StageKind::LoadVertex { t } => rs * plan.loaded_degree(t - 1) as u64,
            StageKind::Hiding => plan.m() as u64 * r / 2,
            StageKind::LoadEdge { .. } => 1,
            StageKind::Collision => plan.min_degree as u64 * (lambda as u64 + 1),
            StageKind::CollisionSetup | StageKind::CollisionLoad { .. } => unreachable!("subroutine stage at top level"),
        })
        .collect()
}

/// Block type at stage `0`.
pub fn setup_type(p: Params) -> BipartiteType {
    BipartiteType::symmetric(vec![(p.r - 1 - p.rs, p.rs), (p.rs, p.rs - 1)]).expect("setup type is valid")
}

/// Block type between a loaded class `B_i` and an unloaded `A_j`.
pub fn half_loaded_type(p: Params) -> BipartiteType {
    BipartiteType::new(vec![(p.r - p.rs, p.rs), (p.rs, p.rs - 1)], vec![(p.r - 1, p.rs)]).expect("type is valid")
}

/// Block type between two loaded classes before hiding.
pub fn loaded_type(p: Params) -> BipartiteType {
    BipartiteType::symmetric(vec![(p.r, p.rs)]).expect("type is valid")
}

/// Block type after the hiding stage.
pub fn hiding_type(p: Params) -> BipartiteType {
    BipartiteType::symmetric(vec![(p.r / 2, p.rs), (p.r / 2, p.rs + 1)]).expect("type is valid")
}

/// Block type once its pattern edge is loaded.
pub fn final_type(p: Params) -> BipartiteType {
    crate::lemmas::hidden_type(p)
}

/// Smallest host size for which the flow of a materialized path is
/// nonempty: the `u` setup classes of size `r−1` must avoid all `k`
/// witness vertices.
pub fn min_host_size(plan: &ConstructionPlan, p: Params) -> usize {
    plan.u * (p.r - 1) + plan.k
}
