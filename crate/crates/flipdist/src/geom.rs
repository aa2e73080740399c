//! Edges, trees, and instances on convexly positioned points.
//!
//! Labels are 1-based. An edge is stored with its smaller endpoint first; under
//! a linear labeling its length is the label difference, and the edges of the
//! convex hull are those of length 1 together with `(1, n)`. Gap `g_k` sits
//! between points `k` and `k+1` for `k < n`; the cyclic hull gap `n` sits
//! between `n` and `1`.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

/// A chord between two distinct points, normalized so `a < b`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "(u32, u32)", try_from = "(u32, u32)")]
pub struct Edge {
    a: u32,
    b: u32,
}

impl Edge {
    /// Builds the edge `{u, v}`. Panics if `u == v` or either label is 0.
    pub fn new(u: u32, v: u32) -> Edge {
        assert!(u != v, "self-loop ({u}, {v})");
        assert!(u >= 1 && v >= 1, "labels are 1-based");
        Edge {
            a: u.min(v),
            b: u.max(v),
        }
    }

    pub fn a(self) -> u32 {
        self.a
    }

    pub fn b(self) -> u32 {
        self.b
    }

    /// Length under the current linear labeling.
    pub fn len(self) -> u32 {
        self.b - self.a
    }

    /// Both endpoints consecutive: the hull edge of its own gap.
    pub fn is_tiny(self) -> bool {
        self.len() == 1
    }

    /// On the convex hull for point count `n` (length 1, or the wrap edge).
    pub fn is_hull(self, n: u32) -> bool {
        self.len() == 1 || (self.a == 1 && self.b == n)
    }

    /// Strict interleaving `a < c < b < d`; shared endpoints never cross.
    pub fn crosses(self, other: Edge) -> bool {
        let (e, f) = if self.a <= other.a {
            (self, other)
        } else {
            (other, self)
        };
        e.a < f.a && f.a < e.b && e.b < f.b
    }

    /// Covers gap `k` (between points `k` and `k+1`): `a <= k < b`.
    pub fn covers_gap(self, k: u32) -> bool {
        self.a <= k && k < self.b
    }

    /// Covers point `v`: `a <= v <= b`.
    pub fn covers_vertex(self, v: u32) -> bool {
        self.a <= v && v <= self.b
    }

    /// Covers both endpoints of `other`. Every edge covers itself.
    pub fn covers_edge(self, other: Edge) -> bool {
        self.a <= other.a && other.b <= self.b
    }

    /// Shares at least one endpoint with `other`.
    pub fn touches(self, other: Edge) -> bool {
        self.a == other.a || self.a == other.b || self.b == other.a || self.b == other.b
    }
}

impl fmt::Debug for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

impl From<Edge> for (u32, u32) {
    fn from(e: Edge) -> (u32, u32) {
        (e.a, e.b)
    }
}

impl TryFrom<(u32, u32)> for Edge {
    type Error = String;

    fn try_from((u, v): (u32, u32)) -> Result<Edge, String> {
        if u == v {
            return Err(format!("self-loop ({u}, {v})"));
        }
        if u < 1 || v < 1 {
            return Err(format!("labels are 1-based: ({u}, {v})"));
        }
        Ok(Edge::new(u, v))
    }
}

/// The hull edge closing cyclic hull gap `i` (`1..=n`): `(i, i+1)`, or `(1, n)`
/// for the wrap gap `n`.
pub fn hull_edge_at_gap(n: u32, i: u32) -> Edge {
    debug_assert!((1..=n).contains(&i) && n >= 2);
    if i < n {
        Edge::new(i, i + 1)
    } else {
        Edge::new(1, n)
    }
}

/// Why an edge set fails to be a non-crossing spanning tree.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("expected {expected} edges for {n} points, got {got}")]
    WrongEdgeCount { n: u32, expected: usize, got: usize },
    #[error("endpoint {0} out of range 1..={1}")]
    OutOfRange(u32, u32),
    #[error("duplicate edge {0}")]
    DuplicateEdge(Edge),
    #[error("edges {0} and {1} cross")]
    CrossingPair(Edge, Edge),
    #[error("edge set is disconnected (or contains a cycle)")]
    Disconnected,
}

/// A non-crossing spanning tree on `n` convexly positioned points.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tree {
    n: u32,
    edges: BTreeSet<Edge>,
}

impl Tree {
    /// Validates and builds a tree. See [`validate_tree`] for the checks.
    pub fn new(n: u32, edges: impl IntoIterator<Item = Edge>) -> Result<Tree, TreeError> {
        let edges: Vec<Edge> = edges.into_iter().collect();
        validate_tree(n, &edges)?;
        Ok(Tree {
            n,
            edges: edges.into_iter().collect(),
        })
    }

    /// Builds without validation. The caller guarantees tree validity.
    pub(crate) fn from_trusted(n: u32, edges: BTreeSet<Edge>) -> Tree {
        debug_assert!(validate_tree(n, &edges.iter().copied().collect::<Vec<_>>()).is_ok());
        Tree { n, edges }
    }

    /// The star joining `center` to every other point.
    pub fn star(n: u32, center: u32) -> Tree {
        assert!(n >= 2 && (1..=n).contains(&center));
        let edges = (1..=n)
            .filter(|&v| v != center)
            .map(|v| Edge::new(center, v))
            .collect();
        Tree::from_trusted(n, edges)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_set(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.edges.contains(&e)
    }

    /// Edges on the convex hull (`cyclic`) or the length-1 edges only.
    pub fn boundary_edges(&self, cyclic: bool) -> BTreeSet<Edge> {
        self.edges
            .iter()
            .copied()
            .filter(|e| if cyclic { e.is_hull(self.n) } else { e.is_tiny() })
            .collect()
    }
}

impl fmt::Debug for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tree(n={}, {:?})", self.n, self.edges)
    }
}

/// Checks that `edges` forms a non-crossing spanning tree on `n` points:
/// exactly `n - 1` distinct in-range edges, no crossing pair, connected.
pub fn validate_tree(n: u32, edges: &[Edge]) -> Result<(), TreeError> {
    let expected = n.saturating_sub(1) as usize;
    if edges.len() != expected {
        return Err(TreeError::WrongEdgeCount {
            n,
            expected,
            got: edges.len(),
        });
    }
    for &e in edges {
        if e.b > n {
            return Err(TreeError::OutOfRange(e.b, n));
        }
    }
    let mut seen = BTreeSet::new();
    for &e in edges {
        if !seen.insert(e) {
            return Err(TreeError::DuplicateEdge(e));
        }
    }
    for (i, &e) in edges.iter().enumerate() {
        for &f in &edges[i + 1..] {
            if e.crosses(f) {
                let (x, y) = if e < f { (e, f) } else { (f, e) };
                return Err(TreeError::CrossingPair(x, y));
            }
        }
    }
    // n - 1 distinct edges connect n points iff acyclic iff spanning tree.
    let mut dsu: Vec<u32> = (0..n).collect();
    fn find(dsu: &mut [u32], x: u32) -> u32 {
        let mut r = x;
        while dsu[r as usize] != r {
            r = dsu[r as usize];
        }
        let mut c = x;
        while dsu[c as usize] != r {
            let next = dsu[c as usize];
            dsu[c as usize] = r;
            c = next;
        }
        r
    }
    for &e in edges {
        let (ra, rb) = (find(&mut dsu, e.a - 1), find(&mut dsu, e.b - 1));
        if ra == rb {
            return Err(TreeError::Disconnected);
        }
        dsu[ra as usize] = rb;
    }
    Ok(())
}

/// Two trees on the same cyclically labeled point set, with the linear cut used
/// to open the cyclic order (hull gap index in `1..=n`; `n` leaves labels
/// unchanged).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub n: u32,
    pub t: Tree,
    pub tp: Tree,
    pub cut: u32,
}

/// Problems assembling an [`Instance`] from raw parts.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("first tree invalid: {0}")]
    TreeT(TreeError),
    #[error("second tree invalid: {0}")]
    TreeTPrime(TreeError),
    #[error("trees disagree on point count: {0} vs {1}")]
    MismatchedN(u32, u32),
}

impl Instance {
    /// Pairs two trees with the identity cut (gap `n`).
    pub fn new(t: Tree, tp: Tree) -> Result<Instance, InstanceError> {
        if t.n() != tp.n() {
            return Err(InstanceError::MismatchedN(t.n(), tp.n()));
        }
        let n = t.n();
        Ok(Instance { n, t, tp, cut: n })
    }

    pub fn common_edges(&self) -> BTreeSet<Edge> {
        self.t.edge_set() & self.tp.edge_set()
    }

    /// Common hull edges under the cyclic labeling.
    pub fn common_boundary(&self) -> BTreeSet<Edge> {
        self.common_edges()
            .into_iter()
            .filter(|e| e.is_hull(self.n))
            .collect()
    }

    /// Common non-hull edges under the cyclic labeling.
    pub fn common_chords(&self) -> BTreeSet<Edge> {
        self.common_edges()
            .into_iter()
            .filter(|e| !e.is_hull(self.n))
            .collect()
    }

    /// `|T - T'|`, the number of edges needing exchange.
    pub fn symmetric_difference_size(&self) -> usize {
        self.t
            .edges()
            .filter(|e| !self.tp.contains(*e))
            .count()
    }
}

/// Smallest cyclic hull gap whose hull edge lies in neither tree, or `None`
/// when the union of the trees covers the whole hull.
pub fn choose_cut(t: &Tree, tp: &Tree) -> Option<u32> {
    let n = t.n();
    (1..=n).find(|&i| {
        let h = hull_edge_at_gap(n, i);
        !t.contains(h) && !tp.contains(h)
    })
}

/// Point relabeling that opens the cyclic order at hull gap `i`, making point
/// `i + 1` the new `1` and point `i` the new `n`. `i = n` is the identity.
pub fn cut_relabeling(n: u32, i: u32) -> impl Fn(u32) -> u32 {
    debug_assert!((1..=n).contains(&i));
    move |v| ((v + n - i - 1) % n) + 1
}

/// Inverse of [`cut_relabeling`].
pub fn cut_relabeling_inverse(n: u32, i: u32) -> impl Fn(u32) -> u32 {
    debug_assert!((1..=n).contains(&i));
    move |v| ((v + i - 1) % n) + 1
}

fn relabel_tree(t: &Tree, f: impl Fn(u32) -> u32) -> Tree {
    let edges: BTreeSet<Edge> = t.edges().map(|e| Edge::new(f(e.a()), f(e.b()))).collect();
    Tree::from_trusted(t.n(), edges)
}

/// Applies the cut `i` to both trees, recording it on the result.
pub fn apply_cut(t: &Tree, tp: &Tree, i: u32) -> Instance {
    let n = t.n();
    let f = cut_relabeling(n, i);
    Instance {
        n,
        t: relabel_tree(t, &f),
        tp: relabel_tree(tp, &f),
        cut: i,
    }
}

/// A chord-free sub-instance produced by [`split_at_common_chords`], with the
/// map back to parent labels.
#[derive(Debug, Clone)]
pub struct Cell {
    pub inst: Instance,
    /// `orig_labels[k]` is the parent label of cell point `k + 1`.
    pub orig_labels: Vec<u32>,
}

/// Splits recursively at every common chord. Each cell keeps the cyclic order
/// of its consecutive point run; the splitting chord becomes a shared hull edge
/// of both cells. Every edge of `T △ T'` lands in exactly one cell, and over
/// all cells `Σ b(F) = b + 2c`, `Σ d(F) = d` with `c` common chords.
pub fn split_at_common_chords(inst: &Instance) -> Vec<Cell> {
    let mut out = Vec::new();
    let ident: Vec<u32> = (1..=inst.n).collect();
    split_rec(inst, &ident, &mut out);
    out
}

fn split_rec(inst: &Instance, labels: &[u32], out: &mut Vec<Cell>) {
    let chord = match inst.common_chords().into_iter().next() {
        Some(c) => c,
        None => {
            out.push(Cell {
                inst: inst.clone(),
                orig_labels: labels.to_vec(),
            });
            return;
        }
    };
    let n = inst.n;
    let (a, b) = (chord.a(), chord.b());
    let run1: Vec<u32> = (a..=b).collect();
    let run2: Vec<u32> = (b..=n).chain(1..=a).collect();
    for run in [run1, run2] {
        let pos: std::collections::HashMap<u32, u32> = run
            .iter()
            .enumerate()
            .map(|(idx, &v)| (v, idx as u32 + 1))
            .collect();
        let m = run.len() as u32;
        let keep = |t: &Tree| -> Tree {
            let edges: BTreeSet<Edge> = t
                .edges()
                .filter(|e| pos.contains_key(&e.a()) && pos.contains_key(&e.b()))
                .map(|e| Edge::new(pos[&e.a()], pos[&e.b()]))
                .collect();
            Tree::from_trusted(m, edges)
        };
        let sub = Instance {
            n: m,
            t: keep(&inst.t),
            tp: keep(&inst.tp),
            cut: m,
        };
        let sub_labels: Vec<u32> = run.iter().map(|&v| labels[v as usize - 1]).collect();
        split_rec(&sub, &sub_labels, out);
    }
}
