//! Learning graphs: rooted weighted DAGs with per-input unit flows.
//!
//! A [`LearningGraph`] is assembled with a [`Builder`] and is immutable
//! afterwards. Every complexity quantity is generic over [`Scalar`], so the
//! same code runs in floating point, exact rationals, or [`crate::scalar::Surd`].

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{is_certificate, witness_host, PartiteLabel, PatternGraph};
use crate::scalar::Scalar;

pub mod toy;

pub type VertexId = usize;
pub type EdgeId = usize;

/// Relative tolerance for conservation checks in floating-point mode.
pub const FLOAT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LgError {
    #[error("edge set is not flow preserving: flow {flow} is not conserved at vertex {vertex}")]
    NotFlowPreserving { flow: usize, vertex: VertexId },
    #[error("edge {0} has non-positive weight")]
    ZeroWeight(EdgeId),
    #[error("no flow with index {0}")]
    UnknownFlow(usize),
    #[error("edge {0} does not exist")]
    UnknownEdge(EdgeId),
    #[error("vertex {0} does not exist")]
    UnknownVertex(VertexId),
    #[error("vertex {0} has no variable set; cannot derive an edge length")]
    MissingVariables(VertexId),
    #[error("learning graph has no vertices")]
    Empty,
    #[error("malformed learning graph file: {0}")]
    Format(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Opaque(String),
    Partite(PartiteLabel),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Opaque(s) => f.write_str(s),
            Label::Partite(p) => write!(f, "{p}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Vertex {
    pub label: Label,
    /// `S(v)` as sorted variable indices. `None` for a plain learning graph
    /// whose edge lengths are given directly.
    pub vars: Option<Vec<usize>>,
}

#[derive(Debug, Clone)]
pub struct Edge<S> {
    pub from: VertexId,
    pub to: VertexId,
    pub weight: S,
    pub length: u64,
}

/// Unit flow `p_y` for one positive input, stored sparsely.
#[derive(Debug, Clone)]
pub struct Flow<S> {
    pub name: String,
    /// Host vertices `a_1, …, a_k` of the copy of the pattern this input holds.
    pub witness: Option<Vec<usize>>,
    values: BTreeMap<EdgeId, S>,
}

impl<S: Scalar> Flow<S> {
    pub fn new(name: impl Into<String>, values: impl IntoIterator<Item = (EdgeId, S)>) -> Self {
        let values = values.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        Flow {
            name: name.into(),
            witness: None,
            values,
        }
    }

    pub fn with_witness(mut self, witness: Vec<usize>) -> Self {
        self.witness = Some(witness);
        self
    }

    pub fn get(&self, e: EdgeId) -> Option<&S> {
        self.values.get(&e)
    }

    pub fn value(&self, e: EdgeId) -> S {
        self.values.get(&e).cloned().unwrap_or_else(S::zero)
    }

    /// Edges with nonzero flow, in id order.
    pub fn support(&self) -> impl Iterator<Item = (EdgeId, &S)> {
        self.values.iter().map(|(&e, v)| (e, v))
    }
}

/// A subset of `ℰ`, sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct EdgeSet(Vec<EdgeId>);

impl EdgeSet {
    pub fn new(edges: impl IntoIterator<Item = EdgeId>) -> Self {
        let mut v: Vec<_> = edges.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        EdgeSet(v)
    }

    pub fn ids(&self) -> &[EdgeId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.0.binary_search(&e).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.0.iter().copied()
    }
}

impl FromIterator<EdgeId> for EdgeSet {
    fn from_iter<I: IntoIterator<Item = EdgeId>>(iter: I) -> Self {
        EdgeSet::new(iter)
    }
}

#[derive(Debug, Clone)]
pub struct Builder<S> {
    vertices: Vec<Vertex>,
    edges: Vec<Edge<S>>,
    flows: Vec<Flow<S>>,
    root: VertexId,
}

impl<S: Scalar> Default for Builder<S> {
    fn default() -> Self {
        Builder {
            vertices: Vec::new(),
            edges: Vec::new(),
            flows: Vec::new(),
            root: 0,
        }
    }
}

impl<S: Scalar> Builder<S> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a vertex. The first vertex added is the root unless
    /// [`Builder::set_root`] says otherwise.
    pub fn add_vertex(&mut self, label: Label, vars: Option<Vec<usize>>) -> VertexId {
        let vars = vars.map(|mut v| {
            v.sort_unstable();
            v.dedup();
            v
        });
        self.vertices.push(Vertex { label, vars });
        self.vertices.len() - 1
    }

    pub fn add_opaque(&mut self, name: impl Into<String>) -> VertexId {
        self.add_vertex(Label::Opaque(name.into()), None)
    }

    pub fn set_root(&mut self, v: VertexId) {
        self.root = v;
    }

    pub fn add_edge(&mut self, from: VertexId, to: VertexId, weight: S, length: u64) -> EdgeId {
        self.edges.push(Edge {
            from,
            to,
            weight,
            length,
        });
        self.edges.len() - 1
    }

    /// Adds an edge whose length is `|S(to) \ S(from)|`.
    pub fn add_edge_auto(&mut self, from: VertexId, to: VertexId, weight: S) -> Result<EdgeId, LgError> {
        let vs = |v: VertexId| {
            self.vertices
                .get(v)
                .ok_or(LgError::UnknownVertex(v))?
                .vars
                .as_ref()
                .ok_or(LgError::MissingVariables(v))
        };
        let length = set_difference_len(vs(to)?, vs(from)?) as u64;
        Ok(self.add_edge(from, to, weight, length))
    }

    pub fn add_flow(&mut self, flow: Flow<S>) -> usize {
        self.flows.push(flow);
        self.flows.len() - 1
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn build(self) -> Result<LearningGraph<S>, LgError> {
        if self.vertices.is_empty() {
            return Err(LgError::Empty);
        }
        let n = self.vertices.len();
        if self.root >= n {
            return Err(LgError::UnknownVertex(self.root));
        }
        let mut out_edges = vec![Vec::new(); n];
        let mut in_edges = vec![Vec::new(); n];
        for (id, e) in self.edges.iter().enumerate() {
            for v in [e.from, e.to] {
                if v >= n {
                    return Err(LgError::UnknownVertex(v));
                }
            }
            out_edges[e.from].push(id);
            in_edges[e.to].push(id);
        }
        for f in &self.flows {
            if let Some((&e, _)) = f.values.range(self.edges.len()..).next() {
                return Err(LgError::UnknownEdge(e));
            }
        }
        let mut levels = vec![None; n];
        levels[self.root] = Some(0);
        let mut queue = VecDeque::from([self.root]);
        while let Some(v) = queue.pop_front() {
            let next = levels[v].map(|l| l + 1);
            for &e in &out_edges[v] {
                let w = self.edges[e].to;
                if levels[w].is_none() {
                    levels[w] = next;
                    queue.push_back(w);
                }
            }
        }
        Ok(LearningGraph {
            vertices: self.vertices,
            edges: self.edges,
            flows: self.flows,
            root: self.root,
            out_edges,
            in_edges,
            levels,
        })
    }
}

fn set_difference_len(a: &[usize], b: &[usize]) -> usize {
    a.iter().filter(|x| b.binary_search(x).is_err()).count()
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.binary_search(x).is_ok())
}

#[derive(Debug, Clone)]
pub struct LearningGraph<S> {
    vertices: Vec<Vertex>,
    edges: Vec<Edge<S>>,
    flows: Vec<Flow<S>>,
    root: VertexId,
    out_edges: Vec<Vec<EdgeId>>,
    in_edges: Vec<Vec<EdgeId>>,
    levels: Vec<Option<usize>>,
}

/// Per-vertex in/out bookkeeping of the subgraph induced by an edge set.
struct Induced {
    has_in: HashMap<VertexId, bool>,
    has_out: HashMap<VertexId, bool>,
}

impl Induced {
    fn is_source(&self, v: VertexId) -> bool {
        !self.has_in.get(&v).copied().unwrap_or(false)
    }

    fn is_internal(&self, v: VertexId) -> bool {
        self.has_in.get(&v).copied().unwrap_or(false) && self.has_out.get(&v).copied().unwrap_or(false)
    }
}

impl<S: Scalar> LearningGraph<S> {
    pub fn builder() -> Builder<S> {
        Builder::new()
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex(&self, v: VertexId) -> &Vertex {
        &self.vertices[v]
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edge(&self, e: EdgeId) -> &Edge<S> {
        &self.edges[e]
    }

    pub fn edges(&self) -> &[Edge<S>] {
        &self.edges
    }

    pub fn flows(&self) -> &[Flow<S>] {
        &self.flows
    }

    pub fn flow(&self, y: usize) -> Result<&Flow<S>, LgError> {
        self.flows.get(y).ok_or(LgError::UnknownFlow(y))
    }

    pub fn out_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.out_edges[v]
    }

    pub fn in_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.in_edges[v]
    }

    /// Distance from the root, `None` if unreachable.
    pub fn level(&self, v: VertexId) -> Option<usize> {
        self.levels[v]
    }

    pub fn depth(&self) -> usize {
        self.levels.iter().flatten().copied().max().unwrap_or(0)
    }

    pub fn all_edges(&self) -> EdgeSet {
        EdgeSet((0..self.edges.len()).collect())
    }

    /// The stage between levels `i` and `j`: edges leaving a vertex at level
    /// at least `i` and entering one at level at most `j`.
    pub fn stage(&self, i: usize, j: usize) -> EdgeSet {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| {
                matches!((self.levels[e.from], self.levels[e.to]), (Some(a), Some(b)) if a >= i && b <= j)
            })
            .map(|(id, _)| id)
            .collect()
    }

    /// Edges leaving vertices in `vs` and staying inside `within`.
    pub fn edges_out_of(&self, vs: &[VertexId], within: &EdgeSet) -> EdgeSet {
        vs.iter()
            .flat_map(|&v| self.out_edges[v].iter().copied())
            .filter(|&e| within.contains(e))
            .collect()
    }

    fn induced(&self, set: &EdgeSet) -> Induced {
        let mut has_in = HashMap::new();
        let mut has_out = HashMap::new();
        for e in set.iter() {
            let edge = &self.edges[e];
            has_out.insert(edge.from, true);
            has_in.insert(edge.to, true);
        }
        Induced { has_in, has_out }
    }

    fn conserved(a: &S, b: &S) -> bool {
        if S::is_exact() {
            a == b
        } else {
            a.approx_eq(b, FLOAT_TOL)
        }
    }

    fn check_conservation(&self, set: &EdgeSet, induced: &Induced, y: usize) -> Result<(), LgError> {
        let flow = self.flow(y)?;
        let mut balance: BTreeMap<VertexId, (S, S)> = BTreeMap::new();
        for e in set.iter() {
            let Some(p) = flow.get(e) else { continue };
            let edge = &self.edges[e];
            if induced.is_internal(edge.from) {
                let entry = balance.entry(edge.from).or_insert_with(|| (S::zero(), S::zero()));
                entry.1 = entry.1.clone() + p.clone();
            }
            if induced.is_internal(edge.to) {
                let entry = balance.entry(edge.to).or_insert_with(|| (S::zero(), S::zero()));
                entry.0 = entry.0.clone() + p.clone();
            }
        }
        for (v, (inflow, outflow)) in balance {
            if !Self::conserved(&inflow, &outflow) {
                return Err(LgError::NotFlowPreserving { flow: y, vertex: v });
            }
        }
        Ok(())
    }

    /// `p_y(E)`: the flow leaving the sources of the subgraph induced by `E`.
    pub fn flow_value(&self, set: &EdgeSet, y: usize) -> Result<S, LgError> {
        let induced = self.induced(set);
        self.check_conservation(set, &induced, y)?;
        Ok(self.source_flow(set, &induced, y))
    }

    fn source_flow(&self, set: &EdgeSet, induced: &Induced, y: usize) -> S {
        let flow = &self.flows[y];
        set.iter()
            .filter(|&e| induced.is_source(self.edges[e].from))
            .filter_map(|e| flow.get(e).cloned())
            .fold(S::zero(), |a, b| a + b)
    }

    pub fn is_flow_preserving(&self, set: &EdgeSet) -> bool {
        let induced = self.induced(set);
        (0..self.flows.len()).all(|y| self.check_conservation(set, &induced, y).is_ok())
    }

    fn check_weights(&self, set: &EdgeSet) -> Result<(), LgError> {
        match set.iter().find(|&e| !self.edges[e].weight.is_positive()) {
            Some(e) => Err(LgError::ZeroWeight(e)),
            None => Ok(()),
        }
    }

    /// Negative complexity `C₀(E) = Σ ℓ(e) w(e)`.
    pub fn c0(&self, set: &EdgeSet) -> Result<S, LgError> {
        self.check_weights(set)?;
        Ok(set
            .iter()
            .map(|e| S::from_u64(self.edges[e].length) * self.edges[e].weight.clone())
            .fold(S::zero(), |a, b| a + b))
    }

    /// Positive complexity of `E` under `p_y`; zero when `p_y(E) = 0`.
    pub fn c1y(&self, set: &EdgeSet, y: usize) -> Result<S, LgError> {
        self.check_weights(set)?;
        let p = self.flow_value(set, y)?;
        if p.is_zero() {
            return Ok(S::zero());
        }
        let flow = &self.flows[y];
        Ok(set
            .iter()
            .filter_map(|e| {
                let edge = &self.edges[e];
                let pe = flow.get(e)?;
                if edge.length == 0 {
                    return None;
                }
                let share = pe.clone() / p.clone();
                Some(S::from_u64(edge.length) / edge.weight.clone() * share.clone() * share)
            })
            .fold(S::zero(), |a, b| a + b))
    }

    /// `C₁(E)`, the maximum of [`LearningGraph::c1y`] over the stored flows.
    pub fn c1(&self, set: &EdgeSet) -> Result<S, LgError> {
        let values: Vec<S> = (0..self.flows.len())
            .into_par_iter()
            .map(|y| self.c1y(set, y))
            .collect::<Result<_, _>>()?;
        Ok(values.into_iter().fold(S::zero(), |a, b| if b > a { b } else { a }))
    }

    /// `C₀(E)·C₁(E)`, exact in exact scalar types.
    pub fn complexity_squared(&self, set: &EdgeSet) -> Result<S, LgError> {
        Ok(self.c0(set)? * self.c1(set)?)
    }

    /// `C(E) = √(C₀(E) C₁(E))` in floating point.
    pub fn complexity(&self, set: &EdgeSet) -> Result<f64, LgError> {
        Ok(self.complexity_squared(set)?.to_f64().max(0.0).sqrt())
    }

    /// Same structure and flows with every weight replaced by `f(edge, w)`.
    pub fn reweighted(&self, mut f: impl FnMut(EdgeId, &S) -> S) -> Self {
        let mut out = self.clone();
        for (id, e) in out.edges.iter_mut().enumerate() {
            e.weight = f(id, &e.weight);
        }
        out
    }

    /// Copy without the edges in `removed`. Returns the new graph and a map
    /// from old edge ids to new ones.
    pub fn without_edges(&self, removed: &EdgeSet) -> (Self, Vec<Option<EdgeId>>) {
        let mut map = vec![None; self.edges.len()];
        let mut b = Builder::new();
        b.vertices = self.vertices.clone();
        b.root = self.root;
        for (id, e) in self.edges.iter().enumerate() {
            if !removed.contains(id) {
                map[id] = Some(b.add_edge(e.from, e.to, e.weight.clone(), e.length));
            }
        }
        for f in &self.flows {
            let values = f.values.iter().filter_map(|(&e, v)| Some((map[e]?, v.clone())));
            let mut nf = Flow::new(f.name.clone(), values);
            nf.witness = f.witness.clone();
            b.add_flow(nf);
        }
        (b.build().expect("subgraph of a valid graph"), map)
    }

    /// Converts every scalar with `f`.
    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> LearningGraph<T> {
        LearningGraph {
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| Edge {
                    from: e.from,
                    to: e.to,
                    weight: f(&e.weight),
                    length: e.length,
                })
                .collect(),
            flows: self
                .flows
                .iter()
                .map(|fl| Flow {
                    name: fl.name.clone(),
                    witness: fl.witness.clone(),
                    values: fl.values.iter().map(|(&e, v)| (e, f(v))).collect(),
                })
                .collect(),
            root: self.root,
            out_edges: self.out_edges.clone(),
            in_edges: self.in_edges.clone(),
            levels: self.levels.clone(),
        }
    }

    fn topological_order(&self) -> Option<Vec<VertexId>> {
        let n = self.vertices.len();
        let mut indeg: Vec<usize> = self.in_edges.iter().map(Vec::len).collect();
        let mut queue: VecDeque<_> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &e in &self.out_edges[v] {
                let w = self.edges[e].to;
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    queue.push_back(w);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// Lists every violated definitional invariant. `certificate` is asked
    /// about each sink of each flow; pass `None` to skip that check.
    pub fn validate(&self, certificate: Option<&CertificateCheck<'_, S>>) -> ValidationReport {
        let mut issues = Vec::new();
        if self.topological_order().is_none() {
            issues.push(Issue::Cycle);
        }
        if !self.in_edges[self.root].is_empty() {
            issues.push(Issue::RootHasIncoming);
        }
        if self.vertices[self.root].vars.as_ref().is_some_and(|v| !v.is_empty()) {
            issues.push(Issue::RootVariables);
        }
        for v in 0..self.vertices.len() {
            if v != self.root && self.in_edges[v].is_empty() {
                issues.push(Issue::ExtraRoot { vertex: v });
            }
        }
        for (id, e) in self.edges.iter().enumerate() {
            if !e.weight.is_positive() {
                issues.push(Issue::NonPositiveWeight { edge: id });
            }
            if let (Some(a), Some(b)) = (&self.vertices[e.from].vars, &self.vertices[e.to].vars) {
                if !is_subset(a, b) {
                    issues.push(Issue::NotMonotone { edge: id });
                }
                let expected = set_difference_len(b, a) as u64;
                if expected != e.length {
                    issues.push(Issue::LengthMismatch {
                        edge: id,
                        expected,
                        actual: e.length,
                    });
                }
            }
        }
        for (y, flow) in self.flows.iter().enumerate() {
            let mut inflow: HashMap<VertexId, S> = HashMap::new();
            let mut outflow: HashMap<VertexId, S> = HashMap::new();
            for (e, p) in flow.support() {
                if *p < S::zero() {
                    issues.push(Issue::NegativeFlow { flow: y, edge: e });
                }
                let edge = &self.edges[e];
                let o = outflow.entry(edge.from).or_insert_with(S::zero);
                *o = o.clone() + p.clone();
                let i = inflow.entry(edge.to).or_insert_with(S::zero);
                *i = i.clone() + p.clone();
            }
            let total = outflow.get(&self.root).cloned().unwrap_or_else(S::zero);
            if !Self::conserved(&total, &S::one()) {
                issues.push(Issue::NotUnit {
                    flow: y,
                    value: total.to_text(),
                });
            }
            let touched: BTreeSet<VertexId> = inflow.keys().chain(outflow.keys()).copied().collect();
            for v in touched {
                if v == self.root {
                    continue;
                }
                let i = inflow.get(&v).cloned().unwrap_or_else(S::zero);
                match outflow.get(&v) {
                    Some(o) => {
                        if !Self::conserved(&i, o) {
                            issues.push(Issue::Conservation { flow: y, vertex: v });
                        }
                    }
                    None => {
                        if let Some(check) = certificate {
                            if !check(self, y, v) {
                                issues.push(Issue::MissingCertificate { flow: y, vertex: v });
                            }
                        }
                    }
                }
            }
        }
        ValidationReport { issues }
    }

    /// Writes the graph in the fixture JSON format.
    pub fn to_json(&self) -> String {
        let file = GraphFile {
            root: self.root,
            vertices: self
                .vertices
                .iter()
                .map(|v| VertexFile {
                    label: v.label.clone(),
                    vars: v.vars.clone(),
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeFile {
                    from: e.from,
                    to: e.to,
                    weight: e.weight.to_text(),
                    length: e.length,
                })
                .collect(),
            flows: self
                .flows
                .iter()
                .map(|f| FlowFile {
                    name: f.name.clone(),
                    witness: f.witness.clone(),
                    values: f.values.iter().map(|(e, v)| (*e, v.to_text())).collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, LgError> {
        let file: GraphFile = serde_json::from_str(text).map_err(|e| LgError::Format(e.to_string()))?;
        let parse = |s: &str| S::from_text(s).ok_or_else(|| LgError::Format(format!("bad number {s:?}")));
        let mut b = Builder::new();
        for v in file.vertices {
            b.add_vertex(v.label, v.vars);
        }
        b.set_root(file.root);
        for e in file.edges {
            b.add_edge(e.from, e.to, parse(&e.weight)?, e.length);
        }
        for f in file.flows {
            let values = f
                .values
                .into_iter()
                .map(|(e, v)| Ok((e, parse(&v)?)))
                .collect::<Result<Vec<_>, LgError>>()?;
            let mut flow = Flow::new(f.name, values);
            flow.witness = f.witness;
            b.add_flow(flow);
        }
        b.build()
    }
}

/// Sink certificate predicate: `(graph, flow index, sink vertex) -> ok`.
pub type CertificateCheck<'a, S> = dyn Fn(&LearningGraph<S>, usize, VertexId) -> bool + Sync + 'a;

/// Certificate check for graphs with [`PartiteLabel`] vertices: the sink's
/// queried slots must contain the copy of `h` on the flow's witness.
pub fn partite_certificate<S: Scalar>(
    h: &PatternGraph,
    n: usize,
) -> impl Fn(&LearningGraph<S>, usize, VertexId) -> bool + Sync + '_ {
    move |g, y, v| {
        let (Label::Partite(label), Some(witness)) = (&g.vertex(v).label, &g.flows()[y].witness) else {
            return false;
        };
        is_certificate(&label.edge_slots(), &witness_host(n, h, witness), h)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Issue {
    Cycle,
    RootHasIncoming,
    RootVariables,
    ExtraRoot { vertex: VertexId },
    NonPositiveWeight { edge: EdgeId },
    NotMonotone { edge: EdgeId },
    LengthMismatch { edge: EdgeId, expected: u64, actual: u64 },
    NegativeFlow { flow: usize, edge: EdgeId },
    NotUnit { flow: usize, value: String },
    Conservation { flow: usize, vertex: VertexId },
    MissingCertificate { flow: usize, vertex: VertexId },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn count(&self, pred: impl Fn(&Issue) -> bool) -> usize {
        self.issues.iter().filter(|i| pred(i)).count()
    }
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    root: VertexId,
    vertices: Vec<VertexFile>,
    edges: Vec<EdgeFile>,
    flows: Vec<FlowFile>,
}

#[derive(Serialize, Deserialize)]
struct VertexFile {
    label: Label,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    vars: Option<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct EdgeFile {
    from: VertexId,
    to: VertexId,
    weight: String,
    length: u64,
}

#[derive(Serialize, Deserialize)]
struct FlowFile {
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    witness: Option<Vec<usize>>,
    values: BTreeMap<EdgeId, String>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::from_ratio(a, b)
    }

    /// root -> a, root -> b, a -> c, b -> c with flow split evenly.
    fn diamond() -> LearningGraph<BigRational> {
        let mut b = Builder::new();
        let r = b.add_vertex(Label::Opaque("r".into()), Some(vec![]));
        let a = b.add_vertex(Label::Opaque("a".into()), Some(vec![1]));
        let bb = b.add_vertex(Label::Opaque("b".into()), Some(vec![2]));
        let c = b.add_vertex(Label::Opaque("c".into()), Some(vec![1, 2]));
        let e0 = b.add_edge_auto(r, a, q(1, 1)).unwrap();
        let e1 = b.add_edge_auto(r, bb, q(1, 1)).unwrap();
        let e2 = b.add_edge_auto(a, c, q(2, 1)).unwrap();
        let e3 = b.add_edge_auto(bb, c, q(2, 1)).unwrap();
        b.add_flow(Flow::new("y", [(e0, q(1, 2)), (e1, q(1, 2)), (e2, q(1, 2)), (e3, q(1, 2))]));
        b.add_flow(Flow::new("z", [(e0, q(1, 1)), (e2, q(1, 1))]));
        b.build().unwrap()
    }

    #[test]
    fn single_edge_formulae() {
        let mut b = Builder::new();
        let r = b.add_opaque("r");
        let s = b.add_opaque("s");
        let e = b.add_edge(r, s, 2.0, 3);
        b.add_flow(Flow::new("y", [(e, 1.0)]));
        let g = b.build().unwrap();
        let all = g.all_edges();
        assert_eq!(g.c0(&all).unwrap(), 6.0);
        assert_eq!(g.c1(&all).unwrap(), 1.5);
        assert_eq!(g.complexity(&all).unwrap(), 3.0);
    }

    #[test]
    fn flow_values_and_stages() {
        let g = diamond();
        let all = g.all_edges();
        assert_eq!(g.flow_value(&all, 0).unwrap(), q(1, 1));
        assert_eq!(g.flow_value(&g.stage(1, 2), 0).unwrap(), q(1, 1));
        assert_eq!(g.flow_value(&EdgeSet::new([0]), 0).unwrap(), q(1, 2));
        assert!(g.is_flow_preserving(&g.stage(0, 1)));
    }

    #[test]
    fn missing_edge_breaks_conservation() {
        // two parallel edges r -> a carrying half each, then a -> b
        let mut b = Builder::new();
        let r = b.add_opaque("r");
        let a = b.add_opaque("a");
        let c = b.add_opaque("b");
        let e0 = b.add_edge(r, a, q(1, 1), 1);
        let e1 = b.add_edge(r, a, q(1, 1), 1);
        let e2 = b.add_edge(a, c, q(1, 1), 1);
        b.add_flow(Flow::new("y", [(e0, q(1, 2)), (e1, q(1, 2)), (e2, q(1, 1))]));
        let g = b.build().unwrap();
        assert!(g.is_flow_preserving(&g.all_edges()));
        let broken = EdgeSet::new([e0, e2]);
        assert!(!g.is_flow_preserving(&broken));
        assert_eq!(
            g.flow_value(&broken, 0),
            Err(LgError::NotFlowPreserving { flow: 0, vertex: a })
        );
    }

    #[test]
    fn stage_decomposition_of_c1() {
        let g = diamond();
        for y in 0..2 {
            let whole = g.c1y(&g.all_edges(), y).unwrap();
            let parts = g.c1y(&g.stage(0, 1), y).unwrap() + g.c1y(&g.stage(1, 2), y).unwrap();
            assert_eq!(whole, parts);
        }
        // flow z: 1 + 1/2 ; flow y: 2 * 1/4 + 2 * 1/8
        assert_eq!(g.c1(&g.all_edges()).unwrap(), q(3, 2));
        assert_eq!(g.c0(&g.all_edges()).unwrap(), q(6, 1));
    }

    #[test]
    fn zero_weight_is_an_error() {
        let mut b = Builder::new();
        let r = b.add_opaque("r");
        let s = b.add_opaque("s");
        b.add_edge(r, s, 0.0, 1);
        let g = b.build().unwrap();
        assert_eq!(g.c0(&g.all_edges()), Err(LgError::ZeroWeight(0)));
    }

    #[test]
    fn validation_reports() {
        let g = diamond();
        assert!(g.validate(None).is_empty());
        let mut b = Builder::new();
        let r = b.add_vertex(Label::Opaque("r".into()), Some(vec![]));
        let a = b.add_vertex(Label::Opaque("a".into()), Some(vec![3, 4]));
        let e = b.add_edge(r, a, 1.0, 1);
        b.add_flow(Flow::new("y", [(e, 1.0)]));
        let report = b.build().unwrap().validate(None);
        assert_eq!(
            report.issues,
            vec![Issue::LengthMismatch {
                edge: 0,
                expected: 2,
                actual: 1
            }]
        );
    }

    #[test]
    fn json_round_trip() {
        let g = diamond();
        let text = g.to_json();
        let back = LearningGraph::<BigRational>::from_json(&text).unwrap();
        assert_eq!(back.to_json(), text);
        assert_eq!(back.c1(&back.all_edges()).unwrap(), q(3, 2));
    }
}
