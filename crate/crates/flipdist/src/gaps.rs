//! Gap assignments, edge classes, pairings, and the cover forest.
//!
//! Under a linear labeling, gap `g_k` lies between points `k` and `k+1`. Every
//! valid tree induces a bijection `rho` from gaps to edges: each gap maps to
//! the unique shortest edge covering it. The assigned edge shares two, one, or
//! zero endpoints with its gap's endpoints (tiny / near / far). Two trees pair
//! up edge-wise through their shared gaps; the pairing drives every sequence
//! constructor in [`crate::flip`].

use crate::geom::{Edge, Tree};
use std::collections::BTreeMap;

/// How many endpoints an assigned edge shares with its gap's endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeClass {
    /// `e = (k, k+1)`: the edge closes its own gap.
    Tiny,
    /// Exactly one endpoint at `k` or `k+1`.
    Near,
    /// Neither endpoint at the gap.
    Far,
}

/// Classifies edge `e` relative to gap `k`. `e` need not cover `k`.
pub fn classify_edge(e: Edge, k: u32) -> EdgeClass {
    let shared = [e.a(), e.b()]
        .iter()
        .filter(|&&v| v == k || v == k + 1)
        .count();
    match shared {
        2 => EdgeClass::Tiny,
        1 => EdgeClass::Near,
        _ => EdgeClass::Far,
    }
}

/// The bijection gap -> shortest covering edge, with per-gap classes.
#[derive(Debug, Clone)]
pub struct GapAssignment {
    n: u32,
    rho: Vec<Edge>,
    classes: Vec<EdgeClass>,
}

impl GapAssignment {
    pub fn n(&self) -> u32 {
        self.n
    }

    /// The edge assigned to gap `k` (1-based, `1..n`).
    pub fn rho(&self, k: u32) -> Edge {
        self.rho[k as usize - 1]
    }

    pub fn class(&self, k: u32) -> EdgeClass {
        self.classes[k as usize - 1]
    }

    pub fn gaps(&self) -> impl Iterator<Item = u32> {
        1..self.n
    }

    /// Gaps whose assigned edge has the given class, ascending.
    pub fn gaps_with_class(&self, c: EdgeClass) -> Vec<u32> {
        self.gaps().filter(|&k| self.class(k) == c).collect()
    }
}

/// Computes the gap assignment of a valid tree. Each gap's shortest coverer is
/// unique and the assignment hits every edge exactly once; both facts hold for
/// every valid tree and are asserted.
pub fn compute_rho(t: &Tree) -> GapAssignment {
    let n = t.n();
    let mut rho = Vec::with_capacity(n.saturating_sub(1) as usize);
    let mut classes = Vec::with_capacity(n.saturating_sub(1) as usize);
    for k in 1..n {
        let mut best: Option<Edge> = None;
        let mut tie = false;
        for e in t.edges().filter(|e| e.covers_gap(k)) {
            match best {
                None => best = Some(e),
                Some(b) if e.len() < b.len() => {
                    best = Some(e);
                    tie = false;
                }
                Some(b) if e.len() == b.len() => tie = true,
                _ => {}
            }
        }
        let e = best.unwrap_or_else(|| panic!("gap {k} uncovered; tree invalid"));
        assert!(!tie, "two shortest coverers at gap {k}; tree invalid");
        rho.push(e);
        classes.push(classify_edge(e, k));
    }
    let distinct: std::collections::BTreeSet<Edge> = rho.iter().copied().collect();
    assert_eq!(
        distinct.len(),
        rho.len(),
        "gap assignment not injective; tree invalid"
    );
    GapAssignment { n, rho, classes }
}

/// Checks the bijection property on an arbitrary edge set without requiring a
/// valid tree: every gap has a unique shortest coverer and no edge is assigned
/// twice. Equivalent to tree validity for `n - 1` pairwise non-crossing edges;
/// crossing sets can slip through (see the unit tests for one).
pub fn rho_is_bijective(n: u32, edges: &[Edge]) -> bool {
    let mut assigned = std::collections::BTreeSet::new();
    for k in 1..n {
        let covering: Vec<Edge> = edges.iter().copied().filter(|e| e.covers_gap(k)).collect();
        let min_len = match covering.iter().map(|e| e.len()).min() {
            Some(m) => m,
            None => return false,
        };
        let shortest: Vec<Edge> = covering.into_iter().filter(|e| e.len() == min_len).collect();
        if shortest.len() != 1 || !assigned.insert(shortest[0]) {
            return false;
        }
    }
    true
}

/// Which cell of the pairing partition a gap falls into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PairKind {
    /// `e_i = e'_i`.
    Equal,
    /// `e_i != e'_i`, both near.
    NearNear,
    /// Everything else.
    Rest,
}

/// The per-gap pairing of two trees' assigned edges, partitioned into
/// equal pairs, distinct near-near pairs, and the rest.
#[derive(Debug, Clone)]
pub struct Pairing {
    n: u32,
    pairs: Vec<(Edge, Edge)>,
    kinds: Vec<PairKind>,
}

impl Pairing {
    pub fn n(&self) -> u32 {
        self.n
    }

    /// `(e_k, e'_k)` for gap `k`.
    pub fn pair(&self, k: u32) -> (Edge, Edge) {
        self.pairs[k as usize - 1]
    }

    pub fn kind(&self, k: u32) -> PairKind {
        self.kinds[k as usize - 1]
    }

    /// Gap indices of the given kind, ascending.
    pub fn gaps_of_kind(&self, kind: PairKind) -> Vec<u32> {
        (1..self.n)
            .filter(|&k| self.kind(k) == kind)
            .collect()
    }

    pub fn i_eq(&self) -> Vec<u32> {
        self.gaps_of_kind(PairKind::Equal)
    }

    pub fn i_n(&self) -> Vec<u32> {
        self.gaps_of_kind(PairKind::NearNear)
    }

    pub fn i_r(&self) -> Vec<u32> {
        self.gaps_of_kind(PairKind::Rest)
    }
}

/// Pairs two gap assignments over their shared gaps.
pub fn compute_pairing(ga_t: &GapAssignment, ga_tp: &GapAssignment) -> Pairing {
    assert_eq!(ga_t.n(), ga_tp.n(), "pairing requires equal point counts");
    let n = ga_t.n();
    let mut pairs = Vec::with_capacity(n.saturating_sub(1) as usize);
    let mut kinds = Vec::with_capacity(n.saturating_sub(1) as usize);
    for k in 1..n {
        let (e, ep) = (ga_t.rho(k), ga_tp.rho(k));
        pairs.push((e, ep));
        let kind = if e == ep {
            PairKind::Equal
        } else if ga_t.class(k) == EdgeClass::Near && ga_tp.class(k) == EdgeClass::Near {
            PairKind::NearNear
        } else {
            PairKind::Rest
        };
        kinds.push(kind);
    }
    Pairing { n, pairs, kinds }
}

/// Hasse forest of the cover order on a tree's edges: each edge's parent is
/// its unique minimal proper coverer; roots are the uncovered edges.
#[derive(Debug, Clone)]
pub struct CoverForest {
    parent: BTreeMap<Edge, Edge>,
    roots: Vec<Edge>,
}

impl CoverForest {
    pub fn parent(&self, e: Edge) -> Option<Edge> {
        self.parent.get(&e).copied()
    }

    /// Uncovered edges, ascending.
    pub fn roots(&self) -> &[Edge] {
        &self.roots
    }

    pub fn children(&self, e: Edge) -> Vec<Edge> {
        self.parent
            .iter()
            .filter(|&(_, &p)| p == e)
            .map(|(&c, _)| c)
            .collect()
    }
}

/// Builds the cover forest. The far edges of the tree's gap assignment each
/// have at least two children; this structural fact is asserted.
pub fn cover_forest(t: &Tree) -> CoverForest {
    let mut parent = BTreeMap::new();
    let mut roots = Vec::new();
    for e in t.edges() {
        // Proper coverers of e are totally ordered by cover, so the shortest
        // one is the Hasse parent and ties are impossible.
        let mut coverers: Vec<Edge> = t
            .edges()
            .filter(|&f| f != e && f.covers_edge(e))
            .collect();
        coverers.sort_by_key(|f| f.len());
        match coverers.first() {
            None => roots.push(e),
            Some(&p) => {
                if let Some(&second) = coverers.get(1) {
                    assert!(
                        second.len() > p.len() || second == p,
                        "cover upset of {e} not totally ordered"
                    );
                }
                parent.insert(e, p);
            }
        }
    }
    let forest = CoverForest { parent, roots };
    let ga = compute_rho(t);
    for k in ga.gaps() {
        if ga.class(k) == EdgeClass::Far {
            assert!(
                forest.children(ga.rho(k)).len() >= 2,
                "far edge {} must have two cover children",
                ga.rho(k)
            );
        }
    }
    forest
}

/// The two cover chains of a separated caterpillar under a cut avoiding its
/// hull edges.
#[derive(Debug, Clone)]
pub struct CaterpillarChains {
    /// The cyclic hull gap used to linearize (its hull edge is not in the tree).
    pub cut: u32,
    /// Edges covering the leftmost tiny edge, sorted by increasing cover.
    pub left_chain: Vec<Edge>,
    /// The remaining edges (they cover the rightmost tiny edge), increasing.
    pub right_chain: Vec<Edge>,
}

/// A tree is a separated caterpillar iff it has at most two hull edges. When it
/// is, the edges split into two cover chains anchored at the two tiny edges of
/// any linearization whose cut avoids the tree's hull edges; edges covering
/// both anchors go to the left chain. Chains are reported in original labels,
/// ordered by increasing length under the cut.
pub fn is_separated_caterpillar(t: &Tree) -> Option<CaterpillarChains> {
    let n = t.n();
    assert!(n >= 3, "chains are defined for three or more points");
    if t.boundary_edges(true).len() > 2 {
        return None;
    }
    // Some hull edge is free: a tree has n - 1 < n edges.
    let cut = (1..=n)
        .find(|&i| !t.contains(crate::geom::hull_edge_at_gap(n, i)))
        .expect("free hull gap");
    let f = crate::geom::cut_relabeling(n, cut);
    let inv = crate::geom::cut_relabeling_inverse(n, cut);
    let local = Tree::from_trusted(n, t.edges().map(|e| Edge::new(f(e.a()), f(e.b()))).collect());
    let (left_set, right_set) = linear_chain_split(&local);
    let order = |set: std::collections::BTreeSet<Edge>| -> Vec<Edge> {
        let mut v: Vec<Edge> = set.into_iter().collect();
        v.sort_by_key(|e| (e.len(), *e));
        v.into_iter()
            .map(|e| Edge::new(inv(e.a()), inv(e.b())))
            .collect()
    };
    Some(CaterpillarChains {
        cut,
        left_chain: order(left_set),
        right_chain: order(right_set),
    })
}

/// Splits an already-linearized separated caterpillar into its two cover
/// chains. The tree must carry no wrap edge `(1, n)`; its two tiny edges are
/// then its hull edges and serve as anchors. Every edge covers at least one
/// anchor; edges covering the lower anchor form the left chain.
pub(crate) fn linear_chain_split(
    t: &Tree,
) -> (
    std::collections::BTreeSet<Edge>,
    std::collections::BTreeSet<Edge>,
) {
    let n = t.n();
    assert!(n >= 3 && !t.contains(Edge::new(1, n)), "tree must be linearized");
    let tiny: Vec<Edge> = {
        let mut v: Vec<Edge> = t.edges().filter(|e| e.is_tiny()).collect();
        v.sort();
        v
    };
    assert_eq!(tiny.len(), 2, "separated caterpillar has two tiny edges");
    let (left_anchor, right_anchor) = (tiny[0], tiny[1]);
    let left: std::collections::BTreeSet<Edge> =
        t.edges().filter(|e| e.covers_edge(left_anchor)).collect();
    let right: std::collections::BTreeSet<Edge> =
        t.edges().filter(|e| !left.contains(e)).collect();
    for e in &right {
        assert!(
            e.covers_edge(right_anchor),
            "edge {e} covers neither tiny anchor; not a separated caterpillar"
        );
    }
    (left, right)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Tree;

    fn e(a: u32, b: u32) -> Edge {
        Edge::new(a, b)
    }

    fn tree(n: u32, edges: &[(u32, u32)]) -> Tree {
        Tree::new(n, edges.iter().map(|&(a, b)| e(a, b))).unwrap()
    }

    #[test]
    fn classes_count_shared_endpoints() {
        assert_eq!(classify_edge(e(2, 3), 2), EdgeClass::Tiny);
        assert_eq!(classify_edge(e(2, 5), 2), EdgeClass::Near);
        assert_eq!(classify_edge(e(1, 3), 2), EdgeClass::Near);
        assert_eq!(classify_edge(e(1, 5), 2), EdgeClass::Far);
    }

    #[test]
    fn gap_assignment_of_a_star() {
        let ga = compute_rho(&Tree::star(4, 1));
        assert_eq!(ga.rho(1), e(1, 2));
        assert_eq!(ga.rho(2), e(1, 3));
        assert_eq!(ga.rho(3), e(1, 4));
        assert_eq!(ga.class(1), EdgeClass::Tiny);
        assert_eq!(ga.class(2), EdgeClass::Near);
        assert_eq!(ga.class(3), EdgeClass::Near);
        assert_eq!(ga.gaps_with_class(EdgeClass::Near), vec![2, 3]);
    }

    #[test]
    fn gap_assignment_of_a_path_is_all_tiny() {
        let ga = compute_rho(&tree(5, &[(1, 2), (2, 3), (3, 4), (4, 5)]));
        for k in ga.gaps() {
            assert_eq!(ga.rho(k), e(k, k + 1));
            assert_eq!(ga.class(k), EdgeClass::Tiny);
        }
    }

    #[test]
    fn wrap_edge_is_assigned_near() {
        let ga = compute_rho(&tree(4, &[(1, 2), (2, 3), (1, 4)]));
        assert_eq!(ga.rho(3), e(1, 4));
        assert_eq!(ga.class(3), EdgeClass::Near);
    }

    #[test]
    fn bijectivity_fails_off_trees() {
        // Gap 3 uncovered.
        assert!(!rho_is_bijective(4, &[e(1, 2), e(1, 3), e(2, 3)]));
        // Crossing pair: both (1,3) and (2,4) are shortest at gap 2.
        assert!(!rho_is_bijective(4, &[e(1, 3), e(2, 4), e(1, 2)]));
        // Valid trees pass.
        assert!(rho_is_bijective(4, &[e(1, 2), e(1, 3), e(3, 4)]));
    }

    #[test]
    fn crossing_sets_can_still_be_bijective() {
        // (1,3) and (2,4) cross, yet gaps 1, 2, 3 get the distinct shortest
        // covers (1,3), (2,3), (2,4). Bijectivity certifies validity only
        // over non-crossing sets.
        let edges = [e(1, 3), e(2, 3), e(2, 4)];
        assert!(rho_is_bijective(4, &edges));
        assert!(Tree::new(4, edges).is_err());
    }

    #[test]
    fn pairing_partitions_gaps() {
        // Stars at opposite ends: tiny-vs-near pairs at the rims, near-near
        // pairs in the middle.
        let (s1, s5) = (Tree::star(5, 1), Tree::star(5, 5));
        let p = compute_pairing(&compute_rho(&s1), &compute_rho(&s5));
        assert_eq!(p.i_eq(), Vec::<u32>::new());
        assert_eq!(p.i_n(), vec![2, 3]);
        assert_eq!(p.i_r(), vec![1, 4]);
        assert_eq!(p.pair(2), (e(1, 3), e(2, 5)));
        assert_eq!(p.pair(3), (e(1, 4), e(3, 5)));

        let t = tree(6, &[(1, 2), (1, 3), (3, 5), (3, 6), (4, 5)]);
        let tp = tree(6, &[(1, 6), (2, 6), (3, 6), (4, 5), (4, 6)]);
        let p = compute_pairing(&compute_rho(&t), &compute_rho(&tp));
        assert_eq!(p.i_eq(), vec![4]);
        assert_eq!(p.i_n(), vec![2, 3, 5]);
        assert_eq!(p.i_r(), vec![1]);
        assert_eq!(p.pair(4), (e(4, 5), e(4, 5)));
        assert_eq!(p.pair(5), (e(3, 6), e(4, 6)));
    }

    #[test]
    fn identical_trees_pair_equal_everywhere() {
        let s = Tree::star(6, 2);
        let p = compute_pairing(&compute_rho(&s), &compute_rho(&s));
        assert_eq!(p.i_eq().len(), 5);
        assert!(p.i_n().is_empty() && p.i_r().is_empty());
    }

    #[test]
    fn cover_forest_parents_and_roots() {
        let t = tree(6, &[(1, 2), (1, 4), (3, 4), (4, 5), (5, 6)]);
        let f = cover_forest(&t);
        assert_eq!(f.roots(), &[e(1, 4), e(4, 5), e(5, 6)]);
        assert_eq!(f.parent(e(1, 2)), Some(e(1, 4)));
        assert_eq!(f.parent(e(3, 4)), Some(e(1, 4)));
        assert_eq!(f.parent(e(1, 4)), None);
        assert_eq!(f.children(e(1, 4)), vec![e(1, 2), e(3, 4)]);
        // Gap 2 is assigned the far edge (1, 4); all others are tiny.
        let ga = compute_rho(&t);
        assert_eq!(ga.class(2), EdgeClass::Far);
        assert_eq!(ga.gaps_with_class(EdgeClass::Tiny), vec![1, 3, 4, 5]);
        // Tiny edges outnumber the far-assigned ones by at least the root
        // count: 4 tiny, 3 roots, 1 far.
        assert_eq!(t.edges().filter(|e| e.is_tiny()).count(), 4);
        assert_eq!(ga.gaps_with_class(EdgeClass::Far).len(), 1);
    }

    #[test]
    fn caterpillar_chains_of_a_star() {
        let chains = is_separated_caterpillar(&Tree::star(6, 3)).unwrap();
        assert_eq!(chains.cut, 1);
        assert_eq!(chains.left_chain, vec![e(2, 3)]);
        assert_eq!(
            chains.right_chain,
            vec![e(3, 4), e(3, 5), e(3, 6), e(1, 3)]
        );
    }

    #[test]
    fn caterpillar_chains_of_mirrored_brooms() {
        let t = tree(
            8,
            &[(1, 5), (1, 6), (1, 7), (1, 8), (2, 5), (3, 5), (4, 5)],
        );
        let chains = is_separated_caterpillar(&t).unwrap();
        assert_eq!(chains.cut, 1);
        assert_eq!(chains.left_chain, vec![e(4, 5), e(3, 5), e(2, 5)]);
        assert_eq!(
            chains.right_chain,
            vec![e(1, 8), e(1, 7), e(1, 6), e(1, 5)]
        );
    }

    #[test]
    fn paths_are_not_separated() {
        assert!(is_separated_caterpillar(&tree(5, &[(1, 2), (2, 3), (3, 4), (4, 5)])).is_none());
    }
}
