//! Isomorphism classes of small pattern graphs.
//!
//! Classes are generated edge by edge from the empty graph and deduplicated by
//! a canonical form: vertices are first split into cells by colour refinement
//! (an isomorphism-invariant ordered partition), then the lexicographically
//! smallest adjacency word over all cell-respecting orderings is taken.

use std::collections::HashSet;

use itertools::Itertools;

use super::PatternGraph;

/// Upper-triangle adjacency bits; bit `pair_index(a, b)` is set for each edge.
pub type AdjacencyWord = u64;

fn bit(a: usize, b: usize) -> u64 {
    1u64 << super::pair_index(a, b)
}

fn has(word: AdjacencyWord, a: usize, b: usize) -> bool {
    a != b && word & bit(a, b) != 0
}

/// Ordered cells from colour refinement.
fn refined_cells(k: usize, word: AdjacencyWord) -> Vec<Vec<usize>> {
    let mut colour = vec![0usize; k];
    loop {
        let signatures: Vec<(usize, Vec<usize>)> = (0..k)
            .map(|v| {
                let mut nb: Vec<usize> = (0..k).filter(|&w| has(word, v, w)).map(|w| colour[w]).collect();
                nb.sort_unstable();
                (colour[v], nb)
            })
            .collect();
        let distinct: Vec<_> = signatures.iter().cloned().sorted().dedup().collect();
        let next: Vec<usize> = signatures
            .iter()
            .map(|s| distinct.binary_search(s).unwrap())
            .collect();
        let stable = distinct.len() == colour.iter().collect::<HashSet<_>>().len();
        colour = next;
        if stable {
            break;
        }
    }
    let classes = colour.iter().max().map_or(0, |m| m + 1);
    (0..classes)
        .map(|c| (0..k).filter(|&v| colour[v] == c).collect())
        .collect()
}

/// Canonical adjacency word of the graph on `k ≤ 11` vertices.
pub fn canonical_form(k: usize, word: AdjacencyWord) -> AdjacencyWord {
    let cells = refined_cells(k, word);
    let mut best = u64::MAX;
    for parts in cells
        .iter()
        .map(|c| c.iter().copied().permutations(c.len()))
        .multi_cartesian_product()
    {
        // position p gets vertex order[p]
        let order: Vec<usize> = parts.into_iter().flatten().collect();
        let mut out = 0u64;
        for p in 0..k {
            for q in p + 1..k {
                if has(word, order[p], order[q]) {
                    out |= bit(p, q);
                }
            }
        }
        best = best.min(out);
    }
    best
}

/// Canonical words of all graphs on `k` vertices, grouped by edge count.
pub fn all_classes(k: usize) -> Vec<Vec<AdjacencyWord>> {
    assert!(k <= 11, "adjacency words hold at most 11 vertices");
    let max_edges = k * k.saturating_sub(1) / 2;
    let mut levels = vec![vec![0u64]];
    for _ in 0..max_edges {
        let mut next = HashSet::new();
        for &w in levels.last().unwrap() {
            for a in 0..k {
                for b in a + 1..k {
                    if !has(w, a, b) {
                        next.insert(canonical_form(k, w | bit(a, b)));
                    }
                }
            }
        }
        let mut next: Vec<_> = next.into_iter().collect();
        next.sort_unstable();
        levels.push(next);
    }
    levels
}

/// One representative per isomorphism class of graphs on exactly `k ≥ 3`
/// vertices with no isolated vertex.
pub fn pattern_classes(k: usize) -> Vec<PatternGraph> {
    all_classes(k)
        .into_iter()
        .flatten()
        .filter_map(|w| {
            let edges: Vec<(usize, usize)> = (0..k)
                .flat_map(|b| (0..b).map(move |a| (a, b)))
                .filter(|&(a, b)| has(w, a, b))
                .collect();
            PatternGraph::from_edges(k, &edges).ok()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_counts_match_known_values() {
        // graphs on k vertices, all / without isolated vertices
        let all = [(3, 4), (4, 11), (5, 34), (6, 156)];
        for (k, count) in all {
            assert_eq!(all_classes(k).iter().map(Vec::len).sum::<usize>(), count, "k={k}");
        }
        let no_isolated = [(3, 2), (4, 7), (5, 23), (6, 122)];
        for (k, count) in no_isolated {
            assert_eq!(pattern_classes(k).len(), count, "k={k}");
        }
    }

    #[test]
    fn canonical_form_is_relabeling_invariant() {
        // 5-cycle vs a relabeled 5-cycle
        let c5: u64 = [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)].iter().map(|&(a, b)| bit(a, b)).sum();
        let other: u64 = [(0, 2), (2, 4), (4, 1), (1, 3), (3, 0)].iter().map(|&(a, b)| bit(a, b)).sum();
        assert_eq!(canonical_form(5, c5), canonical_form(5, other));
        let path: u64 = [(0, 1), (1, 2), (2, 3), (3, 4)].iter().map(|&(a, b)| bit(a, b)).sum();
        assert_ne!(canonical_form(5, c5), canonical_form(5, path));
    }
}
