//! Concrete root-to-sink flow paths for a fixed witness.
//!
//! A path is one sequence of labels along which the flow of the witness
//! travels. Random choices follow the flow rule of each stage, so a path
//! is a uniform sample from the flow's support.

use std::fmt::Write as _;

use rand::seq::{IteratorRandom, SliceRandom};
use rand::Rng;
use serde::Serialize;

use super::{
    exact_stage_lengths, final_type, half_loaded_type, hiding_type, loaded_type, min_host_size, setup_type,
    Construction, ConstructionError, ConstructionPlan, StageKind,
};
use crate::graph::{is_certificate, sample_bipartite, witness_host, BipartiteType, PartiteLabel, PatternGraph};
use crate::lemmas::Params;
use crate::rng::{self, Estimate};

/// Matchings are enumerated exactly while there are at most this many;
/// larger blocks fall back to rejection sampling.
const MATCHING_CAP: usize = 4096;
const REJECTION_TRIES: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathStep {
    /// Index of the plan stage.
    pub stage: usize,
    /// Subroutine stage inside the collision stage.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub substage: Option<usize>,
    pub kind: StageKind,
    /// `(class, host vertex)` pairs added.
    pub added_vertices: Vec<(usize, usize)>,
    /// `(block, x, y)` triples added.
    pub added_edges: Vec<(usize, usize, usize)>,
    pub label: PartiteLabel,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowPath {
    pub construction: Construction,
    pub n: usize,
    pub params: Params,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<usize>,
    pub witness: Vec<usize>,
    pub root: PartiteLabel,
    pub steps: Vec<PathStep>,
}

impl FlowPath {
    pub fn sink(&self) -> &PartiteLabel {
        self.steps.last().map_or(&self.root, |s| &s.label)
    }

    /// Label at the start of plan stage `stage`.
    pub fn label_before(&self, stage: usize) -> &PartiteLabel {
        self.steps
            .iter()
            .take_while(|s| s.stage < stage)
            .last()
            .map_or(&self.root, |s| &s.label)
    }

    /// Stage-annotated edge list, one line per added element.
    pub fn edge_log(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# construction={:?} n={} r={} rs={} witness={:?}",
            self.construction,
            self.n,
            self.params.r,
            self.params.rs,
            self.witness.iter().map(|v| v + 1).collect::<Vec<_>>()
        );
        for st in &self.steps {
            let tag = match st.substage {
                Some(sub) => format!("{}.{}", st.stage, sub),
                None => st.stage.to_string(),
            };
            for &(c, v) in &st.added_vertices {
                let _ = writeln!(out, "stage {tag}\tvertex\tX{}\t{}", c + 1, v + 1);
            }
            for &(l, x, y) in &st.added_edges {
                let _ = writeln!(out, "stage {tag}\tedge\tQ{}\t{}\t{}", l + 1, x + 1, y + 1);
            }
        }
        out
    }
}

fn check_inputs(plan: &ConstructionPlan, n: usize, p: Params, witness: &[usize]) -> Result<(), ConstructionError> {
    if witness.len() != plan.k {
        return Err(ConstructionError::WitnessClash(format!(
            "witness has {} vertices, pattern has {}",
            witness.len(),
            plan.k
        )));
    }
    let mut sorted = witness.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != witness.len() || sorted.last().is_some_and(|&v| v >= n) {
        return Err(ConstructionError::WitnessClash(format!("witness {witness:?} must be distinct vertices below n = {n}")));
    }
    let need = min_host_size(plan, p);
    if n < need {
        return Err(ConstructionError::InfeasibleParameters(format!(
            "n must be >= u(r-1) + k = {need} (got n = {n})"
        )));
    }
    Ok(())
}

/// `λ` used when materializing the collision stage: `⌊r^{d/(d+1)}⌋`
/// clipped to the available candidates.
pub fn default_lambda(p: Params, d: usize) -> usize {
    ((p.r as f64).powf(d as f64 / (d as f64 + 1.0)) + 1e-9).floor().max(1.0) as usize
}

pub fn materialize_flow_path<R: Rng + ?Sized>(
    plan: &ConstructionPlan,
    n: usize,
    p: Params,
    witness: &[usize],
    lambda: Option<usize>,
    rng: &mut R,
) -> Result<FlowPath, ConstructionError> {
    check_inputs(plan, n, p, witness)?;
    let u = plan.u;
    let class_count = match plan.construction {
        Construction::G1 => u,
        Construction::G2 => plan.k,
    };
    let mut pattern_edges = plan.loaded_edges.clone();
    let neighbors = plan.last_neighbors();
    if plan.construction == Construction::G2 {
        pattern_edges.extend(neighbors.iter().map(|&i| (i, plan.k - 1)));
    }
    let root = PartiteLabel::empty(class_count, pattern_edges);
    let mut label = root.clone();
    let mut steps = Vec::new();
    let m = plan.m();
    let mut used_lambda = None;

    for st in &plan.stages {
        let mut added_vertices = Vec::new();
        let mut added_edges = Vec::new();
        match &st.kind {
            StageKind::Setup => {
                let mut pool: Vec<usize> = (0..n).filter(|v| !witness.contains(v)).collect();
                pool.shuffle(rng);
                for i in 0..u {
                    let class = pool[i * (p.r - 1)..(i + 1) * (p.r - 1)].to_vec();
                    added_vertices.extend(class.iter().map(|&v| (i, v)));
                    label.set_class(i, class);
                }
                let ty = setup_type(p);
                for (l, &(i, j)) in plan.loaded_edges.iter().enumerate() {
                    let edges = sample_bipartite(&ty, label.class(i), label.class(j), rng)?;
                    added_edges.extend(edges.iter().map(|&(x, y)| (l, x, y)));
                    label.set_block(l, edges);
                }
            }
            StageKind::LoadVertex { t } => {
                let c = t - 1;
                let a = witness[c];
                for (l, &(i, j)) in plan.loaded_edges.iter().enumerate() {
                    if i != c && j != c {
                        continue;
                    }
                    let other = if i == c { j } else { i };
                    let targets: Vec<usize> = label
                        .class(other)
                        .iter()
                        .copied()
                        .filter(|&v| label.degree_in_block(l, v) == p.rs - 1)
                        .collect();
                    debug_assert_eq!(targets.len(), p.rs);
                    for v in targets {
                        let (x, y) = if i == c { (a, v) } else { (v, a) };
                        added_edges.push((l, x, y));
                    }
                }
                label.insert_into_class(c, a);
                added_vertices.push((c, a));
                for &(l, x, y) in &added_edges {
                    label.add_block_edge(l, x, y);
                }
            }
            StageKind::Hiding => {
                for (l, &(i, j)) in plan.loaded_edges.iter().enumerate() {
                    let matching = hiding_matching(&label, l, i, j, witness, p, rng)?;
                    for (x, y) in matching {
                        label.add_block_edge(l, x, y);
                        added_edges.push((l, x, y));
                    }
                }
            }
            StageKind::LoadEdge { t, edge: (i, j) } => {
                let l = t - 1;
                label.add_block_edge(l, witness[*i], witness[*j]);
                added_edges.push((l, witness[*i], witness[*j]));
            }
            StageKind::Collision => {
                let last = plan.k - 1;
                let a = witness[last];
                label.insert_into_class(last, a);
                // stage 0: λ edges into each neighbour class, avoiding a_i
                let candidates: Vec<Vec<usize>> = neighbors.iter().map(|&i| collision_candidates(&label, i, m)).collect();
                let room = candidates
                    .iter()
                    .zip(&neighbors)
                    .map(|(c, &i)| c.iter().filter(|&&v| v != witness[i]).count())
                    .min()
                    .unwrap_or(0);
                if room == 0 {
                    return Err(ConstructionError::WitnessClash(
                        "no candidate endpoints for the collision subroutine".into(),
                    ));
                }
                let lam = lambda.unwrap_or_else(|| default_lambda(p, plan.min_degree)).clamp(1, room);
                used_lambda = Some(lam);
                let mut sub_edges = Vec::new();
                for (q, (&i, cand)) in neighbors.iter().zip(&candidates).enumerate() {
                    let chosen = cand
                        .iter()
                        .copied()
                        .filter(|&v| v != witness[i])
                        .choose_multiple(rng, lam);
                    for v in chosen {
                        sub_edges.push((m + q, v, a));
                    }
                }
                for &(l, x, y) in &sub_edges {
                    label.add_block_edge(l, x, y);
                }
                steps.push(PathStep {
                    stage: st.id,
                    substage: Some(0),
                    kind: StageKind::CollisionSetup,
                    added_vertices: vec![(last, a)],
                    added_edges: sub_edges,
                    label: label.clone(),
                });
                for (q, &i) in neighbors.iter().enumerate() {
                    label.add_block_edge(m + q, witness[i], a);
                    steps.push(PathStep {
                        stage: st.id,
                        substage: Some(q + 1),
                        kind: StageKind::CollisionLoad { t: q + 1 },
                        added_vertices: Vec::new(),
                        added_edges: vec![(m + q, witness[i], a)],
                        label: label.clone(),
                    });
                }
                continue;
            }
            StageKind::CollisionSetup | StageKind::CollisionLoad { .. } => {
                unreachable!("subroutine stages are nested")
            }
        }
        steps.push(PathStep {
            stage: st.id,
            substage: None,
            kind: st.kind.clone(),
            added_vertices,
            added_edges,
            label: label.clone(),
        });
    }
    Ok(FlowPath {
        construction: plan.construction,
        n,
        params: p,
        lambda: used_lambda,
        witness: witness.to_vec(),
        root,
        steps,
    })
}

/// Vertices of `X_i` with degree `rs + 1` in every loaded block at `i`.
fn collision_candidates(label: &PartiteLabel, i: usize, m: usize) -> Vec<usize> {
    let blocks: Vec<usize> = (0..m)
        .filter(|&l| {
            let (a, b) = label.pattern_edges()[l];
            a == i || b == i
        })
        .collect();
    let max_deg = |v: usize| blocks.iter().map(|&l| label.degree_in_block(l, v)).collect::<Vec<_>>();
    let degs: Vec<Vec<usize>> = label.class(i).iter().map(|&v| max_deg(v)).collect();
    // loaded blocks all share the same rs; read it off the highest degree
    let top = degs.iter().flatten().copied().max().unwrap_or(0);
    label
        .class(i)
        .iter()
        .zip(&degs)
        .filter(|(_, d)| d.iter().all(|&x| x == top))
        .map(|(&v, _)| v)
        .collect()
}

/// A uniform matching of size `r/2` in the complement of block `l`,
/// avoiding `a_i` and `a_j`.
fn hiding_matching<R: Rng + ?Sized>(
    label: &PartiteLabel,
    l: usize,
    i: usize,
    j: usize,
    witness: &[usize],
    p: Params,
    rng: &mut R,
) -> Result<Vec<(usize, usize)>, ConstructionError> {
    let left: Vec<usize> = label.class(i).iter().copied().filter(|&v| v != witness[i]).collect();
    let right: Vec<usize> = label.class(j).iter().copied().filter(|&v| v != witness[j]).collect();
    let size = p.r / 2;
    let mut all = Vec::new();
    let mut current = Vec::new();
    let mut used = vec![false; right.len()];
    if enumerate_matchings(label, l, &left, &right, 0, size, &mut used, &mut current, &mut all) {
        return all
            .choose(rng)
            .cloned()
            .ok_or_else(|| ConstructionError::WitnessClash(format!("no hiding matching in block {}", l + 1)));
    }
    for _ in 0..REJECTION_TRIES {
        let xs: Vec<usize> = left.choose_multiple(rng, size).copied().collect();
        let mut ys: Vec<usize> = right.choose_multiple(rng, size).copied().collect();
        ys.shuffle(rng);
        if xs.iter().zip(&ys).all(|(&x, &y)| !label.has_block_edge(l, x, y)) {
            return Ok(xs.into_iter().zip(ys).collect());
        }
    }
    Err(ConstructionError::WitnessClash(format!(
        "hiding matching in block {} not found after {REJECTION_TRIES} tries",
        l + 1
    )))
}

/// Collects matchings choosing left vertices in increasing order. Returns
/// `false` once more than [`MATCHING_CAP`] are found.
#[allow(clippy::too_many_arguments)]
fn enumerate_matchings(
    label: &PartiteLabel,
    l: usize,
    left: &[usize],
    right: &[usize],
    from: usize,
    size: usize,
    used: &mut [bool],
    current: &mut Vec<(usize, usize)>,
    all: &mut Vec<Vec<(usize, usize)>>,
) -> bool {
    if current.len() == size {
        all.push(current.clone());
        return all.len() <= MATCHING_CAP;
    }
    if left.len() - from < size - current.len() {
        return true;
    }
    for xi in from..left.len() {
        let x = left[xi];
        for (yi, &y) in right.iter().enumerate() {
            if used[yi] || label.has_block_edge(l, x, y) {
                continue;
            }
            used[yi] = true;
            current.push((x, y));
            let ok = enumerate_matchings(label, l, left, right, xi + 1, size, used, current, all);
            current.pop();
            used[yi] = false;
            if !ok {
                return false;
            }
        }
    }
    true
}

/// Outcome of [`audit_flow_path`]; an empty `failures` list means the path
/// passed every check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathAudit {
    pub degree_checks: usize,
    pub length_checks: usize,
    pub certificate: bool,
    pub failures: Vec<String>,
}

impl PathAudit {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.certificate
    }
}

/// Expected type of block `l = (i, j)` after the step `kind`.
fn expected_type(plan: &ConstructionPlan, p: Params, kind: &StageKind, l: usize, after_hiding: bool) -> BipartiteType {
    let (i, j) = plan.loaded_edges[l];
    match *kind {
        StageKind::Setup => setup_type(p),
        StageKind::LoadVertex { t } => {
            if j < t {
                loaded_type(p)
            } else if i < t {
                half_loaded_type(p)
            } else {
                setup_type(p)
            }
        }
        StageKind::Hiding => hiding_type(p),
        StageKind::LoadEdge { t, .. } => {
            if l < t {
                final_type(p)
            } else {
                hiding_type(p)
            }
        }
        _ => {
            debug_assert!(after_hiding);
            final_type(p)
        }
    }
}

/// Degree-type, stage-length, witness-placement and certificate audit.
pub fn audit_flow_path(plan: &ConstructionPlan, h: &PatternGraph, path: &FlowPath) -> PathAudit {
    let p = path.params;
    let mut failures = Vec::new();
    let mut degree_checks = 0;
    let mut length_checks = 0;
    let lambda = path.lambda.unwrap_or(0);
    let lengths = exact_stage_lengths(plan, p, lambda);
    let m = plan.m();
    let mut prev = &path.root;
    let mut per_stage = vec![0u64; plan.stages.len()];
    for (idx, st) in path.steps.iter().enumerate() {
        let at = format!("step {idx} (stage {})", st.stage);
        if let Err(e) = st.label.validate() {
            failures.push(format!("{at}: {e}"));
        }
        // labels only grow, by exactly the recorded additions
        let grown = st.label.edge_count() == prev.edge_count() + st.added_edges.len()
            && st.label.used_vertices() == prev.used_vertices() + st.added_vertices.len()
            && prev.blocks().iter().enumerate().all(|(l, b)| b.iter().all(|&(x, y)| st.label.has_block_edge(l, x, y)))
            && st.added_edges.iter().all(|&(l, x, y)| st.label.has_block_edge(l, x, y) && !prev.has_block_edge(l, x, y));
        if !grown {
            failures.push(format!("{at}: label does not extend its predecessor by the recorded additions"));
        }
        per_stage[st.stage] += st.added_edges.len() as u64;
        for l in 0..m {
            let (i, j) = plan.loaded_edges[l];
            let ty = expected_type(plan, p, &st.kind, l, true);
            degree_checks += 1;
            if let Err(e) = ty.audit(st.label.class(i), st.label.class(j), st.label.block(l)) {
                failures.push(format!("{at}: block Q{} expected {ty}: {e}", l + 1));
            }
        }
        // linking blocks of the collision stage
        if let Some(sub) = st.substage {
            for (q, &i) in plan.last_neighbors().iter().enumerate() {
                let loaded = usize::from(q < sub);
                let deg = lambda + loaded;
                let r_i = st.label.class(i).len();
                let ty = BipartiteType::new(vec![(deg, 1), (r_i - deg, 0)], vec![(1, deg)]);
                degree_checks += 1;
                match ty {
                    Ok(ty) => {
                        if let Err(e) = ty.audit(st.label.class(i), st.label.class(plan.k - 1), st.label.block(m + q)) {
                            failures.push(format!("{at}: linking block Q{} expected {ty}: {e}", m + q + 1));
                        }
                    }
                    Err(e) => failures.push(format!("{at}: {e}")),
                }
            }
        }
        // flow rule: loaded witness vertices sit in their own classes
        for (c, &a) in path.witness.iter().enumerate() {
            if let Some(found) = st.label.class_of(a) {
                if found != c {
                    failures.push(format!("{at}: witness vertex {} in class {} instead of {}", a + 1, found + 1, c + 1));
                }
            }
        }
        prev = &st.label;
    }
    for (s, (&want, &got)) in lengths.iter().zip(&per_stage).enumerate() {
        length_checks += 1;
        if want != got {
            failures.push(format!("stage {s}: added {got} edge slots, expected {want}"));
        }
    }
    let answers = witness_host(path.n, h, &path.witness);
    let certificate = is_certificate(&path.sink().edge_slots(), &answers, h);
    if !certificate {
        failures.push("sink label is not a 1-certificate".into());
    }
    PathAudit {
        degree_checks,
        length_checks,
        certificate,
        failures,
    }
}

/// Summary of many independently seeded paths.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchAudit {
    pub paths: u64,
    pub failed_paths: u64,
    pub degree_checks: u64,
    pub length_checks: u64,
    pub first_failures: Vec<String>,
}

/// Materializes and audits `count` paths, path `i` drawing from stream `i`.
#[allow(clippy::too_many_arguments)]
pub fn audit_many(
    plan: &ConstructionPlan,
    h: &PatternGraph,
    n: usize,
    p: Params,
    witness: &[usize],
    lambda: Option<usize>,
    seed: u64,
    count: u64,
) -> BatchAudit {
    let results = rng::map_streams(seed, count, |_, r| {
        match materialize_flow_path(plan, n, p, witness, lambda, r) {
            Ok(path) => audit_flow_path(plan, h, &path),
            Err(e) => PathAudit {
                degree_checks: 0,
                length_checks: 0,
                certificate: false,
                failures: vec![e.to_string()],
            },
        }
    });
    let mut out = BatchAudit {
        paths: count,
        failed_paths: 0,
        degree_checks: 0,
        length_checks: 0,
        first_failures: Vec::new(),
    };
    for a in results {
        out.degree_checks += a.degree_checks as u64;
        out.length_checks += a.length_checks as u64;
        if !a.passed() {
            out.failed_paths += 1;
            if out.first_failures.len() < 5 {
                out.first_failures.extend(a.failures.into_iter().take(1));
            }
        }
    }
    out
}

/// Monte Carlo check of one stage's vertex ratio.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VertexRatioAudit {
    /// Plan stage `t` (loads `a_t`).
    pub stage: usize,
    /// Leading-order probability `(r/n)^{t−1}`.
    pub leading: f64,
    /// Exact probability `Π_{i<t−1} r/(n−i)`.
    pub exact: f64,
    pub estimate: Estimate,
    pub z_leading: f64,
    pub z_exact: f64,
    pub holds: bool,
}

/// For stages `t = 1..u`: the probability over a uniform permutation `σ`
/// that `a_i ∈ σ(B_i)` for every loaded class `i < t`, which is the inverse
/// vertex ratio at leading order.
pub fn vertex_ratio_audit(
    plan: &ConstructionPlan,
    path: &FlowPath,
    samples: u64,
    seed: u64,
) -> Vec<VertexRatioAudit> {
    let n = path.n;
    let r = path.params.r;
    (1..=plan.u)
        .map(|t| {
            let label = path.label_before(t + 1).clone();
            let witness = path.witness.clone();
            let est = rng::estimate(seed.wrapping_add(t as u64), samples, |rng| {
                let mut sigma: Vec<usize> = (0..n).collect();
                sigma.shuffle(rng);
                (0..t - 1).all(|i| label.class(i).iter().any(|&v| sigma[v] == witness[i]))
            });
            let leading = (r as f64 / n as f64).powi(t as i32 - 1);
            let exact: f64 = (0..t - 1).map(|i| r as f64 / (n - i) as f64).product();
            let z_leading = est.z_score(leading);
            VertexRatioAudit {
                stage: t,
                leading,
                exact,
                z_exact: est.z_score(exact),
                z_leading,
                holds: z_leading.abs() <= 3.0,
                estimate: est,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{g1_stage_specs, g2_plan};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fixture() -> (PatternGraph, Params) {
        (PatternGraph::complete(3), Params::new(4, 2).unwrap())
    }

    #[test]
    fn g1_path_passes_audit() {
        let (h, p) = fixture();
        let plan = g1_stage_specs(&h, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let path = materialize_flow_path(&plan, 14, p, &[0, 1, 2], None, &mut rng).unwrap();
            let audit = audit_flow_path(&plan, &h, &path);
            assert!(audit.passed(), "{:?}", audit.failures);
            let sink = path.sink();
            for &(i, j) in h.edges() {
                assert!(sink.edge_slots().contains(&(i, j)));
                let l = plan.loaded_edges.iter().position(|&e| e == (i, j)).unwrap();
                assert_eq!(sink.degree_in_block(l, i), 3);
                assert_eq!(sink.degree_in_block(l, j), 3);
            }
        }
    }

    #[test]
    fn g2_path_passes_audit() {
        let (h, p) = fixture();
        let plan = g2_plan(&h).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let path = materialize_flow_path(&plan, 14, p, &[0, 1, 2], None, &mut rng).unwrap();
            let audit = audit_flow_path(&plan, &h, &path);
            assert!(audit.passed(), "{:?}", audit.failures);
            assert_eq!(path.sink().class(2), &[2]);
            assert_eq!(path.lambda, Some(2));
        }
    }

    #[test]
    fn dense_and_larger_patterns() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = PatternGraph::complete(3);
        let p = Params::new(4, 3).unwrap();
        let plan = g1_stage_specs(&h, 3).unwrap();
        let path = materialize_flow_path(&plan, 14, p, &[3, 7, 11], None, &mut rng).unwrap();
        assert!(audit_flow_path(&plan, &h, &path).passed());
        let k4 = PatternGraph::complete(4);
        let p = Params::new(6, 2).unwrap();
        for plan in [g1_stage_specs(&k4, 4).unwrap(), g2_plan(&k4).unwrap()] {
            let n = min_host_size(&plan, p);
            let path = materialize_flow_path(&plan, n, p, &[0, 1, 2, 3], None, &mut rng).unwrap();
            let audit = audit_flow_path(&plan, &k4, &path);
            assert!(audit.passed(), "{:?}", audit.failures);
        }
    }

    #[test]
    fn too_small_host_is_rejected() {
        let (h, p) = fixture();
        let plan = g1_stage_specs(&h, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let err = materialize_flow_path(&plan, 11, p, &[0, 1, 2], None, &mut rng).unwrap_err();
        assert!(matches!(err, ConstructionError::InfeasibleParameters(_)));
        let err = materialize_flow_path(&plan, 14, p, &[0, 1, 1], None, &mut rng).unwrap_err();
        assert!(matches!(err, ConstructionError::WitnessClash(_)));
    }

    #[test]
    fn batches_are_deterministic() {
        let (h, p) = fixture();
        let plan = g1_stage_specs(&h, 3).unwrap();
        let a = audit_many(&plan, &h, 14, p, &[0, 1, 2], None, 9, 64);
        let b = audit_many(&plan, &h, 14, p, &[0, 1, 2], None, 9, 64);
        assert_eq!(a, b);
        assert_eq!(a.failed_paths, 0);
    }

    #[test]
    fn edge_log_lists_every_slot() {
        let (h, p) = fixture();
        let plan = g1_stage_specs(&h, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let path = materialize_flow_path(&plan, 14, p, &[0, 1, 2], None, &mut rng).unwrap();
        let log = path.edge_log();
        assert_eq!(log.lines().filter(|l| l.contains("\tedge\t")).count(), 33);
    }
}
