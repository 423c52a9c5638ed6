//! Bipartite inclusion graphs, maximum matchings and Hall violators.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::ElementSet;

/// Left vertices are the sets being shifted, right vertices their candidate
/// replacements; `adj[i]` lists the right indices adjacent to left `i` in
/// ascending order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BipartiteGraph {
    pub left: Vec<ElementSet>,
    pub right: Vec<ElementSet>,
    pub adj: Vec<Vec<usize>>,
}

impl BipartiteGraph {
    pub fn new(left: Vec<ElementSet>, right: Vec<ElementSet>, mut adj: Vec<Vec<usize>>) -> Result<Self> {
        if adj.len() != left.len() {
            return Err(Error::Contract(format!(
                "{} adjacency lists for {} left vertices",
                adj.len(),
                left.len()
            )));
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
            if list.last().is_some_and(|&j| j >= right.len()) {
                return Err(Error::Contract("edge to a missing right vertex".into()));
            }
        }
        Ok(BipartiteGraph { left, right, adj })
    }

    /// Edge `(A, B)` whenever `B ⊊ A`.
    pub fn inclusion(left: Vec<ElementSet>, right: Vec<ElementSet>) -> Self {
        let adj = left
            .iter()
            .map(|&a| {
                (0..right.len())
                    .filter(|&j| right[j].is_proper_subset_of(a))
                    .collect()
            })
            .collect();
        BipartiteGraph { left, right, adj }
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    pub fn right_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.right.len()];
        for &j in self.adj.iter().flatten() {
            deg[j] += 1;
        }
        deg
    }

    pub fn max_right_degree(&self) -> usize {
        self.right_degrees().into_iter().max().unwrap_or(0)
    }

    /// Right vertices adjacent to some left vertex in `lefts`.
    pub fn neighborhood<'a>(&self, lefts: impl IntoIterator<Item = &'a usize>) -> BTreeSet<usize> {
        lefts
            .into_iter()
            .flat_map(|&i| self.adj[i].iter().copied())
            .collect()
    }

    fn induced(&self, lefts: &[usize], rights: &BTreeSet<usize>) -> (BipartiteGraph, Vec<usize>) {
        let rights: Vec<usize> = rights.iter().copied().collect();
        let adj = lefts
            .iter()
            .map(|&i| {
                self.adj[i]
                    .iter()
                    .filter_map(|j| rights.binary_search(j).ok())
                    .collect()
            })
            .collect();
        let g = BipartiteGraph {
            left: lefts.iter().map(|&i| self.left[i]).collect(),
            right: rights.iter().map(|&j| self.right[j]).collect(),
            adj,
        };
        (g, rights)
    }
}

/// `pairs[i]` is the right vertex matched to left `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Matching {
    pub pairs: Vec<Option<usize>>,
}

impl Matching {
    pub fn size(&self) -> usize {
        self.pairs.iter().flatten().count()
    }

    pub fn saturates_left(&self) -> bool {
        self.pairs.iter().all(Option::is_some)
    }
}

fn augment(g: &BipartiteGraph, u: usize, seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
    if let Some(&v) = g.adj[u].iter().find(|&&v| owner[v].is_none()) {
        owner[v] = Some(u);
        return true;
    }
    for &v in &g.adj[u] {
        if seen[v] {
            continue;
        }
        seen[v] = true;
        if owner[v].is_none_or(|w| augment(g, w, seen, owner)) {
            owner[v] = Some(u);
            return true;
        }
    }
    false
}

/// Maximum matching by augmenting paths, scanning vertices in index order.
pub fn max_matching(g: &BipartiteGraph) -> Matching {
    let mut owner = vec![None; g.right.len()];
    let mut seen = vec![false; g.right.len()];
    for u in 0..g.left.len() {
        seen.fill(false);
        augment(g, u, &mut seen, &mut owner);
    }
    let mut pairs = vec![None; g.left.len()];
    for (v, u) in owner.iter().enumerate() {
        if let Some(u) = u {
            pairs[*u] = Some(v);
        }
    }
    Matching { pairs }
}

/// `U₁ ⊂ left` and `V₁ = N(U₁)` of equal size, with a perfect matching
/// between them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HallDecomposition {
    pub u1: Vec<usize>,
    pub v1: Vec<usize>,
    pub matching: Vec<(usize, usize)>,
    /// `e(U₁, right) + e(left ∖ U₁, V₁)`
    pub lhs: usize,
    /// `|U₁| · Δ_right`
    pub rhs: usize,
}

fn violates(g: &BipartiteGraph, set: &BTreeSet<usize>) -> bool {
    g.neighborhood(set).len() < set.len()
}

/// For a graph with no left-saturating matching, returns `U₁, V₁` such that
/// `e(U₁, right) + e(left ∖ U₁, V₁) <= |U₁| Δ_right`.
///
/// A Hall violator is read off the alternating tree of an unmatched left
/// vertex, shrunk greedily to a minimal one `U₀`, and its last vertex dropped.
pub fn hall_decomposition(g: &BipartiteGraph) -> Result<HallDecomposition> {
    if let Some(i) = g.adj.iter().position(Vec::is_empty) {
        return Err(Error::Contract(format!("left vertex {i} has no neighbours")));
    }
    let m = max_matching(g);
    let Some(root) = m.pairs.iter().position(Option::is_none) else {
        return Err(Error::Contract("a left-saturating matching exists".into()));
    };
    let mut owner = vec![None; g.right.len()];
    for (u, v) in m.pairs.iter().enumerate() {
        if let Some(v) = v {
            owner[*v] = Some(u);
        }
    }
    let mut reach: BTreeSet<usize> = BTreeSet::from([root]);
    let mut stack = vec![root];
    while let Some(u) = stack.pop() {
        for &v in &g.adj[u] {
            if let Some(w) = owner[v] {
                if reach.insert(w) {
                    stack.push(w);
                }
            }
        }
    }
    debug_assert!(violates(g, &reach));

    let mut u0 = reach;
    for u in u0.clone() {
        u0.remove(&u);
        if !violates(g, &u0) {
            u0.insert(u);
        }
    }
    let last = *u0.iter().next_back().expect("violator is nonempty");
    u0.remove(&last);
    let u1: Vec<usize> = u0.into_iter().collect();
    let v1_set = g.neighborhood(&u1);
    if v1_set.len() != u1.len() {
        return Err(Error::Contract("shrunken violator is not minimal".into()));
    }
    let (sub, v1) = g.induced(&u1, &v1_set);
    let inner = max_matching(&sub);
    if !inner.saturates_left() {
        return Err(Error::Contract("no perfect matching on U1".into()));
    }
    let matching = inner
        .pairs
        .iter()
        .enumerate()
        .map(|(i, v)| (u1[i], v1[v.expect("saturated")]))
        .collect();

    let in_u1: BTreeSet<usize> = u1.iter().copied().collect();
    let lhs = (0..g.left.len())
        .map(|i| {
            if in_u1.contains(&i) {
                g.adj[i].len()
            } else {
                g.adj[i].iter().filter(|v| v1_set.contains(v)).count()
            }
        })
        .sum();
    let rhs = u1.len() * g.max_right_degree();
    if lhs > rhs {
        return Err(Error::Contract(format!("decomposition inequality fails: {lhs} > {rhs}")));
    }
    Ok(HallDecomposition {
        u1,
        v1,
        matching,
        lhs,
        rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(i: u32) -> ElementSet {
        ElementSet::raw(i)
    }

    fn graph(l: usize, r: usize, adj: Vec<Vec<usize>>) -> BipartiteGraph {
        BipartiteGraph::new((0..l as u32).map(s).collect(), (0..r as u32).map(s).collect(), adj).unwrap()
    }

    #[test]
    fn matching_examples() {
        let a = ElementSet::from_elements([1, 2, 3], 3).unwrap();
        let star = BipartiteGraph::inclusion(vec![a], a.subsets_of_size(2));
        assert_eq!(star.edge_count(), 3);
        assert_eq!(max_matching(&star).size(), 1);
        assert_eq!(max_matching(&graph(2, 1, vec![vec![0], vec![0]])).size(), 1);
        let k33 = graph(3, 3, vec![vec![0, 1, 2]; 3]);
        let m = max_matching(&k33);
        assert_eq!(m.size(), 3);
        assert_eq!(m.pairs, vec![Some(0), Some(1), Some(2)]);
    }

    #[test]
    fn augmenting_paths_are_used() {
        // greedy would match 0->0 and strand 1
        let g = graph(2, 2, vec![vec![0, 1], vec![0]]);
        assert_eq!(max_matching(&g).pairs, vec![Some(1), Some(0)]);
    }

    #[test]
    fn decomposition_examples() {
        let d = hall_decomposition(&graph(2, 1, vec![vec![0], vec![0]])).unwrap();
        assert_eq!((d.u1.len(), d.v1.clone()), (1, vec![0]));
        assert_eq!((d.lhs, d.rhs), (2, 2));

        let d = hall_decomposition(&graph(3, 2, vec![vec![0, 1]; 3])).unwrap();
        assert_eq!(d.u1, vec![0, 1]);
        assert_eq!(d.v1, vec![0, 1]);
        assert_eq!(d.matching.len(), 2);
        assert!(d.lhs <= d.rhs);

        assert!(matches!(
            hall_decomposition(&graph(2, 2, vec![vec![0], vec![1]])),
            Err(Error::Contract(_))
        ));
        assert!(hall_decomposition(&graph(2, 1, vec![vec![0], vec![]])).is_err());
    }

    fn arb_graph() -> impl Strategy<Value = BipartiteGraph> {
        (1usize..8, 1usize..8).prop_flat_map(|(l, r)| {
            proptest::collection::vec(proptest::collection::btree_set(0..r, 1..=r), l)
                .prop_map(move |adj| graph(l, r, adj.into_iter().map(|b| b.into_iter().collect()).collect()))
        })
    }

    fn brute_max(g: &BipartiteGraph) -> usize {
        fn go(g: &BipartiteGraph, i: usize, used: &mut Vec<bool>) -> usize {
            if i == g.left.len() {
                return 0;
            }
            let mut best = go(g, i + 1, used);
            for &v in &g.adj[i] {
                if !used[v] {
                    used[v] = true;
                    best = best.max(1 + go(g, i + 1, used));
                    used[v] = false;
                }
            }
            best
        }
        go(g, 0, &mut vec![false; g.right.len()])
    }

    proptest! {
        #[test]
        fn matching_is_maximum(g in arb_graph()) {
            let m = max_matching(&g);
            prop_assert_eq!(m.size(), brute_max(&g));
            let mut used = BTreeSet::new();
            for (i, v) in m.pairs.iter().enumerate() {
                if let Some(v) = v {
                    prop_assert!(g.adj[i].contains(v));
                    prop_assert!(used.insert(*v));
                }
            }
        }

        #[test]
        fn decomposition_contract(g in arb_graph()) {
            match hall_decomposition(&g) {
                Ok(d) => {
                    prop_assert!(!max_matching(&g).saturates_left());
                    prop_assert!(!d.u1.is_empty());
                    prop_assert_eq!(d.u1.len(), d.v1.len());
                    let n1: Vec<usize> = g.neighborhood(&d.u1).into_iter().collect();
                    prop_assert_eq!(&n1, &d.v1);
                    for &(u, v) in &d.matching {
                        prop_assert!(g.adj[u].contains(&v));
                    }
                    prop_assert!(d.lhs <= d.rhs);
                }
                Err(_) => prop_assert!(max_matching(&g).saturates_left()),
            }
        }
    }
}
