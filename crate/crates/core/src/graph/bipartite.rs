use std::collections::{BTreeMap, HashSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{pair_index, GraphError};

/// Degree-sequence descriptor of a bipartite graph between `Y₁` and `Y₂`:
/// `left` lists `(count, degree)` groups for `Y₁`, `right` for `Y₂`.
/// Groups with count zero are allowed and ignored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BipartiteType {
    pub left: Vec<(usize, usize)>,
    pub right: Vec<(usize, usize)>,
}

impl BipartiteType {
    pub fn new(left: Vec<(usize, usize)>, right: Vec<(usize, usize)>) -> Result<Self, GraphError> {
        let ty = BipartiteType { left, right };
        ty.validate()?;
        Ok(ty)
    }

    /// Same groups on both sides.
    pub fn symmetric(side: Vec<(usize, usize)>) -> Result<Self, GraphError> {
        Self::new(side.clone(), side)
    }

    fn validate(&self) -> Result<(), GraphError> {
        let (l, r) = (self.left_size(), self.right_size());
        if l == 0 || r == 0 {
            return Err(GraphError::BadType(format!("{self}: empty side")));
        }
        let (sl, sr) = (side_sum(&self.left), side_sum(&self.right));
        if sl != sr {
            return Err(GraphError::BadType(format!(
                "{self}: handshake fails ({sl} ≠ {sr})"
            )));
        }
        let too_big = |side: &[(usize, usize)], opposite: usize| {
            side.iter().any(|&(c, d)| c > 0 && d > opposite)
        };
        if too_big(&self.left, r) || too_big(&self.right, l) {
            return Err(GraphError::BadType(format!(
                "{self}: degree exceeds opposite side size"
            )));
        }
        Ok(())
    }

    pub fn left_size(&self) -> usize {
        self.left.iter().map(|g| g.0).sum()
    }

    pub fn right_size(&self) -> usize {
        self.right.iter().map(|g| g.0).sum()
    }

    pub fn edge_count(&self) -> usize {
        side_sum(&self.left)
    }

    pub fn left_degrees(&self) -> Vec<usize> {
        expand(&self.left)
    }

    pub fn right_degrees(&self) -> Vec<usize> {
        expand(&self.right)
    }

    /// Vertex-by-vertex degree audit of `edges` (pairs `(left, right)`).
    /// Returns a description of the first discrepancy.
    pub fn audit(&self, left: &[usize], right: &[usize], edges: &[(usize, usize)]) -> Result<(), String> {
        if left.len() != self.left_size() || right.len() != self.right_size() {
            return Err(format!(
                "side sizes ({}, {}) but type {self} needs ({}, {})",
                left.len(),
                right.len(),
                self.left_size(),
                self.right_size()
            ));
        }
        let mut deg: BTreeMap<usize, usize> = left.iter().chain(right).map(|&v| (v, 0)).collect();
        let mut seen = HashSet::new();
        for &(x, y) in edges {
            if !left.contains(&x) || !right.contains(&y) {
                return Err(format!("edge ({x}, {y}) leaves the block"));
            }
            if !seen.insert((x, y)) {
                return Err(format!("duplicate edge ({x}, {y})"));
            }
            *deg.get_mut(&x).unwrap() += 1;
            *deg.get_mut(&y).unwrap() += 1;
        }
        let histogram = |vs: &[usize]| {
            let mut h: BTreeMap<usize, usize> = BTreeMap::new();
            for v in vs {
                *h.entry(deg[v]).or_default() += 1;
            }
            h
        };
        let expected = |groups: &[(usize, usize)]| {
            let mut h: BTreeMap<usize, usize> = BTreeMap::new();
            for &(c, d) in groups {
                if c > 0 {
                    *h.entry(d).or_default() += c;
                }
            }
            h
        };
        let (hl, hr) = (histogram(left), histogram(right));
        if hl != expected(&self.left) || hr != expected(&self.right) {
            return Err(format!(
                "degree histogram left {hl:?} right {hr:?} does not match type {self}"
            ));
        }
        Ok(())
    }
}

impl fmt::Display for BipartiteType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |g: &[(usize, usize)]| {
            g.iter()
                .map(|(c, d)| format!("({c},{d})"))
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "({{{}}},{{{}}})", side(&self.left), side(&self.right))
    }
}

fn side_sum(groups: &[(usize, usize)]) -> usize {
    groups.iter().map(|&(c, d)| c * d).sum()
}

fn expand(groups: &[(usize, usize)]) -> Vec<usize> {
    groups
        .iter()
        .flat_map(|&(c, d)| std::iter::repeat_n(d, c))
        .collect()
}

/// Uniform sample of a bipartite graph of type `ty` on the given vertex sets.
///
/// Degrees are assigned to vertices by a uniform shuffle, then the
/// configuration model is run with rejection of multi-edges, which is uniform
/// over simple graphs with that degree sequence. Types denser than one half
/// are sampled through their complement.
pub fn sample_bipartite<R: Rng + ?Sized>(
    ty: &BipartiteType,
    left: &[usize],
    right: &[usize],
    rng: &mut R,
) -> Result<Vec<(usize, usize)>, GraphError> {
    if left.len() != ty.left_size() || right.len() != ty.right_size() {
        return Err(GraphError::BadType(format!(
            "{ty}: vertex sets of size ({}, {})",
            left.len(),
            right.len()
        )));
    }
    let (nl, nr) = (left.len(), right.len());
    let mut dl = ty.left_degrees();
    let mut dr = ty.right_degrees();
    dl.shuffle(rng);
    dr.shuffle(rng);
    let dense = 2 * ty.edge_count() > nl * nr;
    if dense {
        dl.iter_mut().for_each(|d| *d = nr - *d);
        dr.iter_mut().for_each(|d| *d = nl - *d);
    }
    let local = configuration_model(&dl, &dr, rng)
        .ok_or_else(|| GraphError::SamplingFailed(ty.to_string()))?;
    let mut edges = if dense {
        let present: HashSet<(usize, usize)> = local.into_iter().collect();
        let mut out = Vec::with_capacity(ty.edge_count());
        for x in 0..nl {
            for y in 0..nr {
                if !present.contains(&(x, y)) {
                    out.push((left[x], right[y]));
                }
            }
        }
        out
    } else {
        local.into_iter().map(|(x, y)| (left[x], right[y])).collect()
    };
    edges.sort_unstable();
    Ok(edges)
}

fn configuration_model<R: Rng + ?Sized>(
    dl: &[usize],
    dr: &[usize],
    rng: &mut R,
) -> Option<Vec<(usize, usize)>> {
    let stubs_left: Vec<usize> = dl
        .iter()
        .enumerate()
        .flat_map(|(v, &d)| std::iter::repeat_n(v, d))
        .collect();
    let mut stubs_right: Vec<usize> = dr
        .iter()
        .enumerate()
        .flat_map(|(v, &d)| std::iter::repeat_n(v, d))
        .collect();
    'attempt: for _ in 0..200_000 {
        stubs_right.shuffle(rng);
        let mut seen = HashSet::with_capacity(stubs_left.len());
        for (&x, &y) in stubs_left.iter().zip(&stubs_right) {
            if !seen.insert((x, y)) {
                continue 'attempt;
            }
        }
        return Some(stubs_left.iter().copied().zip(stubs_right.iter().copied()).collect());
    }
    None
}

/// All simple bipartite graphs with the exact per-vertex degree sequences,
/// as local index pairs `(left, right)`.
pub fn enumerate_degree_sequence(dl: &[usize], dr: &[usize]) -> Vec<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    if dl.iter().sum::<usize>() != dr.iter().sum::<usize>() {
        return out;
    }
    let mut capacity = dr.to_vec();
    let mut current = Vec::new();
    enumerate_rows(dl, 0, &mut capacity, &mut current, &mut out);
    out
}

fn enumerate_rows(
    dl: &[usize],
    row: usize,
    capacity: &mut [usize],
    current: &mut Vec<(usize, usize)>,
    out: &mut Vec<Vec<(usize, usize)>>,
) {
    if row == dl.len() {
        if capacity.iter().all(|&c| c == 0) {
            out.push(current.clone());
        }
        return;
    }
    let remaining: usize = dl[row..].iter().sum();
    if capacity.iter().sum::<usize>() != remaining {
        return;
    }
    choose_columns(dl, row, 0, dl[row], capacity, current, out);
}

fn choose_columns(
    dl: &[usize],
    row: usize,
    start: usize,
    need: usize,
    capacity: &mut [usize],
    current: &mut Vec<(usize, usize)>,
    out: &mut Vec<Vec<(usize, usize)>>,
) {
    if need == 0 {
        enumerate_rows(dl, row + 1, capacity, current, out);
        return;
    }
    for col in start..capacity.len() {
        if capacity.len() - col < need {
            break;
        }
        if capacity[col] == 0 {
            continue;
        }
        capacity[col] -= 1;
        current.push((row, col));
        choose_columns(dl, row, col + 1, need - 1, capacity, current, out);
        current.pop();
        capacity[col] += 1;
    }
}

/// Every bipartite graph of type `ty` on the given vertex sets.
pub fn enumerate_type(ty: &BipartiteType, left: &[usize], right: &[usize]) -> Vec<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    for dl in multiset_permutations(&ty.left_degrees()) {
        for dr in multiset_permutations(&ty.right_degrees()) {
            for g in enumerate_degree_sequence(&dl, &dr) {
                let mut edges: Vec<_> = g.into_iter().map(|(x, y)| (left[x], right[y])).collect();
                edges.sort_unstable();
                out.push(edges);
            }
        }
    }
    out
}

fn multiset_permutations(items: &[usize]) -> Vec<Vec<usize>> {
    let mut sorted = items.to_vec();
    sorted.sort_unstable();
    let mut out = vec![sorted.clone()];
    // next lexicographic permutation
    loop {
        let Some(i) = (1..sorted.len()).rev().find(|&i| sorted[i - 1] < sorted[i]) else {
            return out;
        };
        let j = (i..sorted.len()).rev().find(|&j| sorted[j] > sorted[i - 1]).unwrap();
        sorted.swap(i - 1, j);
        sorted[i..].reverse();
        out.push(sorted.clone());
    }
}

/// Label of an L-vertex: disjoint colour classes `X_1, …` over `[n]` and, for
/// each pattern edge `{i, j}`, a bipartite block between `X_i` and `X_j`.
///
/// Blocks exist only for pattern edges. Block edges are stored as
/// `(x ∈ X_i, y ∈ X_j)` and kept sorted so equal labels compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PartiteLabel {
    pattern_edges: Vec<(usize, usize)>,
    classes: Vec<Vec<usize>>,
    blocks: Vec<Vec<(usize, usize)>>,
}

impl PartiteLabel {
    /// Empty label with `class_count` empty classes.
    pub fn empty(class_count: usize, pattern_edges: Vec<(usize, usize)>) -> Self {
        let blocks = vec![Vec::new(); pattern_edges.len()];
        PartiteLabel {
            pattern_edges,
            classes: vec![Vec::new(); class_count],
            blocks,
        }
    }

    pub fn pattern_edges(&self) -> &[(usize, usize)] {
        &self.pattern_edges
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class(&self, i: usize) -> &[usize] {
        &self.classes[i]
    }

    pub fn blocks(&self) -> &[Vec<(usize, usize)>] {
        &self.blocks
    }

    pub fn block(&self, l: usize) -> &[(usize, usize)] {
        &self.blocks[l]
    }

    pub fn set_class(&mut self, i: usize, mut vertices: Vec<usize>) {
        vertices.sort_unstable();
        self.classes[i] = vertices;
    }

    pub fn insert_into_class(&mut self, i: usize, v: usize) {
        let pos = self.classes[i].binary_search(&v).unwrap_or_else(|p| p);
        self.classes[i].insert(pos, v);
    }

    pub fn set_block(&mut self, l: usize, mut edges: Vec<(usize, usize)>) {
        edges.sort_unstable();
        self.blocks[l] = edges;
    }

    pub fn add_block_edge(&mut self, l: usize, x: usize, y: usize) {
        let pos = self.blocks[l].binary_search(&(x, y)).unwrap_or_else(|p| p);
        self.blocks[l].insert(pos, (x, y));
    }

    pub fn has_block_edge(&self, l: usize, x: usize, y: usize) -> bool {
        self.blocks[l].binary_search(&(x, y)).is_ok()
    }

    pub fn degree_in_block(&self, l: usize, v: usize) -> usize {
        self.blocks[l].iter().filter(|&&(x, y)| x == v || y == v).count()
    }

    /// Which class holds `v`, if any.
    pub fn class_of(&self, v: usize) -> Option<usize> {
        self.classes.iter().position(|c| c.binary_search(&v).is_ok())
    }

    pub fn used_vertices(&self) -> usize {
        self.classes.iter().map(Vec::len).sum()
    }

    pub fn edge_count(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    /// Queried edge slots `S(label)`, normalized `(min, max)` and sorted.
    pub fn edge_slots(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<_> = self
            .blocks
            .iter()
            .flatten()
            .map(|&(x, y)| (x.min(y), x.max(y)))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// `S(label)` as sorted pair indices.
    pub fn variables(&self) -> Vec<usize> {
        let mut out: Vec<_> = self.edge_slots().into_iter().map(|(a, b)| pair_index(a, b)).collect();
        out.sort_unstable();
        out
    }

    /// Image under the host-vertex permutation `perm` (`v ↦ perm[v]`).
    pub fn permute(&self, perm: &[usize]) -> Self {
        let mut out = self.clone();
        for c in &mut out.classes {
            for v in c.iter_mut() {
                *v = perm[*v];
            }
            c.sort_unstable();
        }
        for b in &mut out.blocks {
            for e in b.iter_mut() {
                *e = (perm[e.0], perm[e.1]);
            }
            b.sort_unstable();
        }
        out
    }

    /// Checks disjoint classes and that block edges join the right classes.
    pub fn validate(&self) -> Result<(), String> {
        let mut seen = HashSet::new();
        for (i, c) in self.classes.iter().enumerate() {
            for &v in c {
                if !seen.insert(v) {
                    return Err(format!("vertex {v} appears twice (class {i})"));
                }
            }
        }
        for (l, (&(i, j), block)) in self.pattern_edges.iter().zip(&self.blocks).enumerate() {
            for &(x, y) in block {
                if self.classes.get(i).is_none_or(|c| c.binary_search(&x).is_err())
                    || self.classes.get(j).is_none_or(|c| c.binary_search(&y).is_err())
                {
                    return Err(format!("block {l} edge ({x}, {y}) not between X_{i} and X_{j}"));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for PartiteLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.classes.iter().enumerate() {
            write!(f, "X{}={:?} ", i + 1, c)?;
        }
        for (l, b) in self.blocks.iter().enumerate() {
            write!(f, "Q{}={:?} ", l + 1, b)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn type_validation() {
        assert!(BipartiteType::symmetric(vec![(1, 2), (2, 1)]).is_ok());
        assert!(BipartiteType::new(vec![(2, 1)], vec![(1, 1)]).is_err());
        assert!(BipartiteType::new(vec![(1, 3)], vec![(3, 1)]).is_ok());
        assert!(BipartiteType::new(vec![(1, 4)], vec![(2, 2)]).is_err());
        assert!(BipartiteType::new(vec![(0, 1)], vec![(1, 0)]).is_err());
    }

    #[test]
    fn enumeration_counts() {
        // 2-regular bipartite graphs on 4 + 4 labeled vertices: 90
        let ty = BipartiteType::symmetric(vec![(4, 2)]).unwrap();
        let all = enumerate_type(&ty, &[0, 1, 2, 3], &[4, 5, 6, 7]);
        assert_eq!(all.len(), 90);
        for g in &all {
            ty.audit(&[0, 1, 2, 3], &[4, 5, 6, 7], g).unwrap();
        }
        // one vertex of degree 2, two of degree 1, on both sides of 3 + 3
        let ty = BipartiteType::symmetric(vec![(1, 2), (2, 1)]).unwrap();
        let all = enumerate_type(&ty, &[0, 1, 2], &[3, 4, 5]);
        let unique: HashSet<_> = all.iter().cloned().collect();
        assert_eq!(unique.len(), all.len());
        let brute = brute_force_count(&ty, 3, 3);
        assert_eq!(all.len(), brute);
    }

    fn brute_force_count(ty: &BipartiteType, l: usize, r: usize) -> usize {
        let slots = l * r;
        (0u32..1 << slots)
            .filter(|mask| {
                let edges: Vec<_> = (0..slots)
                    .filter(|b| mask >> b & 1 == 1)
                    .map(|b| (b / r, l + b % r))
                    .collect();
                ty.audit(&(0..l).collect::<Vec<_>>(), &(l..l + r).collect::<Vec<_>>(), &edges)
                    .is_ok()
            })
            .count()
    }

    #[test]
    fn sampler_respects_type_and_covers_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for ty in [
            BipartiteType::symmetric(vec![(1, 2), (2, 1)]).unwrap(),
            BipartiteType::symmetric(vec![(1, 2), (3, 3)]).unwrap(),
            BipartiteType::symmetric(vec![(0, 3), (3, 2)]).unwrap(),
        ] {
            let (l, r): (Vec<_>, Vec<_>) = (
                (0..ty.left_size()).collect(),
                (10..10 + ty.right_size()).collect(),
            );
            let support = enumerate_type(&ty, &l, &r).len();
            let mut seen = HashSet::new();
            for _ in 0..4000 {
                let g = sample_bipartite(&ty, &l, &r, &mut rng).unwrap();
                ty.audit(&l, &r, &g).unwrap();
                seen.insert(g);
            }
            if support <= 200 {
                assert_eq!(seen.len(), support, "type {ty}");
            }
        }
    }

    #[test]
    fn label_permutation_and_slots() {
        let mut lab = PartiteLabel::empty(2, vec![(0, 1)]);
        lab.set_class(0, vec![3, 1]);
        lab.set_class(1, vec![0, 2]);
        lab.add_block_edge(0, 3, 0);
        lab.add_block_edge(0, 1, 2);
        lab.validate().unwrap();
        assert_eq!(lab.edge_slots(), vec![(0, 3), (1, 2)]);
        assert_eq!(lab.class_of(2), Some(1));
        let swapped = lab.permute(&[1, 0, 2, 3]);
        assert_eq!(swapped.class(0), &[0, 3]);
        assert_eq!(swapped.block(0), &[(0, 2), (3, 1)]);
        let mut bad = lab.clone();
        bad.add_block_edge(0, 0, 1);
        assert!(bad.validate().is_err());
    }
}
