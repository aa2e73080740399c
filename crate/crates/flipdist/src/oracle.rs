//! Exact distances by exhaustive search, for small point counts.
//!
//! [`FlipGraphIndex`] enumerates every non-crossing spanning tree on `n`
//! points and materializes the flip graph: vertices are trees, arcs are single
//! valid exchanges. Distances, eccentricities, radius, and diameter then come
//! from breadth-first search. Trees are packed into 64-bit masks over the
//! lexicographic chord table, which caps the supported point count at 11
//! (55 chords); the default cap is lower because the tree count grows fast.

use crate::flip::{Flip, FlipSequence};
use crate::geom::{Edge, Tree};
use rayon::prelude::*;
use std::collections::BTreeSet;
use thiserror::Error;

/// Largest point count enumerated without an explicit opt-in.
pub const DEFAULT_POINT_LIMIT: u32 = 9;
/// Largest point count the mask representation supports at all.
pub const MAX_POINT_LIMIT: u32 = 11;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{0} points exceeds the default enumeration limit {DEFAULT_POINT_LIMIT}; opt in to larger sizes explicitly")]
    AboveDefaultLimit(u32),
    #[error("{0} points exceeds the supported maximum {MAX_POINT_LIMIT}")]
    AboveMaskWidth(u32),
}

fn check_limit(n: u32, allow_large: bool) -> Result<(), OracleError> {
    if n > MAX_POINT_LIMIT {
        return Err(OracleError::AboveMaskWidth(n));
    }
    if n > DEFAULT_POINT_LIMIT && !allow_large {
        return Err(OracleError::AboveDefaultLimit(n));
    }
    Ok(())
}

/// All chords on `n` points in lexicographic order.
fn chord_table(n: u32) -> Vec<Edge> {
    let mut v = Vec::with_capacity((n * (n - 1) / 2) as usize);
    for a in 1..=n {
        for b in a + 1..=n {
            v.push(Edge::new(a, b));
        }
    }
    v
}

/// `cross[i]` holds a set bit for every chord crossing chord `i`.
fn crossing_masks(chords: &[Edge]) -> Vec<u64> {
    let m = chords.len();
    let mut cross = vec![0u64; m];
    for i in 0..m {
        for j in i + 1..m {
            if chords[i].crosses(chords[j]) {
                cross[i] |= 1 << j;
                cross[j] |= 1 << i;
            }
        }
    }
    cross
}

struct MaskSpace {
    n: u32,
    chords: Vec<Edge>,
    cross: Vec<u64>,
}

impl MaskSpace {
    fn new(n: u32) -> MaskSpace {
        let chords = chord_table(n);
        let cross = crossing_masks(&chords);
        MaskSpace { n, chords, cross }
    }

    fn chord_id(&self, e: Edge) -> usize {
        self.chords.binary_search(&e).expect("edge within range")
    }

    fn mask_of(&self, t: &Tree) -> u64 {
        t.edges().fold(0u64, |m, e| m | 1 << self.chord_id(e))
    }

    fn tree_of(&self, mask: u64) -> Tree {
        let edges: BTreeSet<Edge> = (0..self.chords.len())
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| self.chords[i])
            .collect();
        Tree::from_trusted(self.n, edges)
    }

    /// Vertex set (bit `v-1`) of the component holding `root` in the forest
    /// given by `mask`.
    fn component(&self, mask: u64, root: u32) -> u32 {
        let mut side = 1u32 << (root - 1);
        loop {
            let mut grew = false;
            for i in 0..self.chords.len() {
                if mask >> i & 1 == 0 {
                    continue;
                }
                let (a, b) = (self.chords[i].a() - 1, self.chords[i].b() - 1);
                let (ina, inb) = (side >> a & 1 == 1, side >> b & 1 == 1);
                if ina != inb {
                    side |= 1 << a | 1 << b;
                    grew = true;
                }
            }
            if !grew {
                return side;
            }
        }
    }

    /// Masks one valid exchange away from `mask`.
    fn neighbor_masks(&self, mask: u64) -> Vec<u64> {
        let m = self.chords.len();
        let mut out = Vec::new();
        for e in 0..m {
            if mask >> e & 1 == 0 {
                continue;
            }
            let rest = mask & !(1 << e);
            let side = self.component(rest, self.chords[e].a());
            for f in 0..m {
                if mask >> f & 1 == 1 || self.cross[f] & rest != 0 {
                    continue;
                }
                let (a, b) = (self.chords[f].a() - 1, self.chords[f].b() - 1);
                if (side >> a & 1) != (side >> b & 1) {
                    out.push(rest | 1 << f);
                }
            }
        }
        out
    }
}

/// Every tree on `n` points, found by closing the star at point 1 under valid
/// exchanges. Deterministic order (ascending mask over the chord table).
pub fn enumerate_trees(n: u32, allow_large: bool) -> Result<Vec<Tree>, OracleError> {
    check_limit(n, allow_large)?;
    let space = MaskSpace::new(n);
    Ok(closure_masks(&space)
        .into_iter()
        .map(|m| space.tree_of(m))
        .collect())
}

fn closure_masks(space: &MaskSpace) -> Vec<u64> {
    let start = space.mask_of(&Tree::star(space.n, 1));
    let mut seen: BTreeSet<u64> = BTreeSet::from([start]);
    let mut frontier = vec![start];
    while let Some(mask) = frontier.pop() {
        for nb in space.neighbor_masks(mask) {
            if seen.insert(nb) {
                frontier.push(nb);
            }
        }
    }
    seen.into_iter().collect()
}

/// Every tree on `n` points by direct backtracking over the chord table:
/// extend a non-crossing acyclic edge set lexicographically and keep the
/// spanning ones. Independent of the exchange relation; meant to cross-check
/// [`enumerate_trees`] at small sizes.
pub fn enumerate_trees_direct(n: u32) -> Vec<Tree> {
    assert!((2..=8).contains(&n), "direct route is for cross-checks");
    let space = MaskSpace::new(n);
    let want = (n - 1) as usize;
    let mut chosen: Vec<usize> = Vec::new();
    // parent[v] drives a DSU rebuilt incrementally; undo by truncation.
    fn root(parent: &mut [u32], x: u32) -> u32 {
        if parent[x as usize] == x {
            x
        } else {
            let r = root(parent, parent[x as usize]);
            parent[x as usize] = r;
            r
        }
    }
    fn go(
        space: &MaskSpace,
        from: usize,
        mask: u64,
        chosen: &mut Vec<usize>,
        want: usize,
        found: &mut Vec<u64>,
    ) {
        if chosen.len() == want {
            let mut parent: Vec<u32> = (0..space.n).collect();
            let mut comps = space.n;
            for &i in chosen.iter() {
                let (ra, rb) = (
                    root(&mut parent, space.chords[i].a() - 1),
                    root(&mut parent, space.chords[i].b() - 1),
                );
                if ra != rb {
                    parent[ra as usize] = rb;
                    comps -= 1;
                }
            }
            if comps == 1 {
                found.push(mask);
            }
            return;
        }
        let m = space.chords.len();
        let need = want - chosen.len();
        for i in from..m {
            if m - i < need || space.cross[i] & mask != 0 {
                continue;
            }
            chosen.push(i);
            go(space, i + 1, mask | 1 << i, chosen, want, found);
            chosen.pop();
        }
    }
    let mut masks = Vec::new();
    go(&space, 0, 0, &mut chosen, want, &mut masks);
    masks.sort_unstable();
    masks.into_iter().map(|m| space.tree_of(m)).collect()
}

/// The full flip graph on `n` points with precomputed adjacency.
pub struct FlipGraphIndex {
    space: MaskSpace,
    masks: Vec<u64>,
    adj: Vec<Vec<u32>>,
}

impl FlipGraphIndex {
    pub fn build(n: u32, allow_large: bool) -> Result<FlipGraphIndex, OracleError> {
        check_limit(n, allow_large)?;
        let space = MaskSpace::new(n);
        let masks = closure_masks(&space);
        let id_of = |mask: u64| masks.binary_search(&mask).expect("closed under exchange") as u32;
        let adj: Vec<Vec<u32>> = masks
            .par_iter()
            .map(|&mask| {
                let mut nb: Vec<u32> = space
                    .neighbor_masks(mask)
                    .into_iter()
                    .map(id_of)
                    .collect();
                nb.sort_unstable();
                nb.dedup();
                nb
            })
            .collect();
        Ok(FlipGraphIndex { space, masks, adj })
    }

    pub fn n(&self) -> u32 {
        self.space.n
    }

    pub fn tree_count(&self) -> usize {
        self.masks.len()
    }

    pub fn tree(&self, id: usize) -> Tree {
        self.space.tree_of(self.masks[id])
    }

    pub fn id_of(&self, t: &Tree) -> usize {
        assert_eq!(t.n(), self.space.n);
        self.masks
            .binary_search(&self.space.mask_of(t))
            .expect("every tree is enumerated")
    }

    pub fn neighbors(&self, id: usize) -> &[u32] {
        &self.adj[id]
    }

    pub fn trees(&self) -> impl Iterator<Item = Tree> + '_ {
        self.masks.iter().map(|&m| self.space.tree_of(m))
    }

    fn bfs(&self, source: usize) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.masks.len()];
        dist[source] = 0;
        let mut frontier = vec![source as u32];
        let mut d = 0;
        while !frontier.is_empty() {
            d += 1;
            let mut next = Vec::new();
            for &v in &frontier {
                for &w in &self.adj[v as usize] {
                    if dist[w as usize] == u32::MAX {
                        dist[w as usize] = d;
                        next.push(w);
                    }
                }
            }
            frontier = next;
        }
        dist
    }

    /// Exchange distance between two trees, by bidirectional search.
    pub fn distance(&self, t: &Tree, tp: &Tree) -> u32 {
        let (s, g) = (self.id_of(t), self.id_of(tp));
        if s == g {
            return 0;
        }
        let count = self.masks.len();
        let mut dist = [vec![u32::MAX; count], vec![u32::MAX; count]];
        dist[0][s] = 0;
        dist[1][g] = 0;
        let mut frontier = [vec![s as u32], vec![g as u32]];
        let mut depth = [0u32, 0u32];
        let mut best = u32::MAX;
        loop {
            let side = if frontier[0].len() <= frontier[1].len() { 0 } else { 1 };
            depth[side] += 1;
            let mut next = Vec::new();
            for i in 0..frontier[side].len() {
                let v = frontier[side][i] as usize;
                for &w in &self.adj[v] {
                    let w = w as usize;
                    if dist[side][w] != u32::MAX {
                        continue;
                    }
                    dist[side][w] = depth[side];
                    if dist[1 - side][w] != u32::MAX {
                        best = best.min(depth[side] + dist[1 - side][w]);
                    }
                    next.push(w as u32);
                }
            }
            frontier[side] = next;
            if frontier[side].is_empty() || depth[0] + depth[1] >= best {
                assert_ne!(best, u32::MAX, "flip graph is connected");
                return best;
            }
        }
    }

    /// One shortest flip sequence from `t` to `tp`, by BFS parent walkback.
    pub fn shortest_sequence(&self, t: &Tree, tp: &Tree) -> FlipSequence {
        let (s, g) = (self.id_of(t), self.id_of(tp));
        let mut parent = vec![u32::MAX; self.masks.len()];
        parent[s] = s as u32;
        let mut frontier = vec![s as u32];
        'search: while !frontier.is_empty() {
            let mut next = Vec::new();
            for &v in &frontier {
                for &w in &self.adj[v as usize] {
                    if parent[w as usize] == u32::MAX {
                        parent[w as usize] = v;
                        if w as usize == g {
                            break 'search;
                        }
                        next.push(w);
                    }
                }
            }
            frontier = next;
        }
        assert_ne!(parent[g], u32::MAX, "flip graph is connected");
        let mut ids = vec![g];
        while *ids.last().unwrap() != s {
            ids.push(parent[*ids.last().unwrap()] as usize);
        }
        ids.reverse();
        let steps = ids
            .windows(2)
            .map(|w| {
                let (cur, nxt) = (self.tree(w[0]), self.tree(w[1]));
                let remove = cur.edges().find(|e| !nxt.contains(*e)).unwrap();
                let add = nxt.edges().find(|e| !cur.contains(*e)).unwrap();
                Flip::new(remove, add)
            })
            .collect();
        FlipSequence::manual(t.clone(), steps)
    }

    /// Longest distance from `t` to any tree. Also witnesses connectivity.
    pub fn eccentricity(&self, t: &Tree) -> u32 {
        let dist = self.bfs(self.id_of(t));
        let max = dist.iter().copied().max().unwrap();
        assert_ne!(max, u32::MAX, "flip graph is connected");
        max
    }

    /// Eccentricity of every tree, indexed like [`FlipGraphIndex::tree`].
    pub fn all_eccentricities(&self) -> Vec<u32> {
        (0..self.masks.len())
            .into_par_iter()
            .map(|s| {
                let dist = self.bfs(s);
                let max = dist.iter().copied().max().unwrap();
                assert_ne!(max, u32::MAX, "flip graph is connected");
                max
            })
            .collect()
    }

    pub fn radius(&self) -> u32 {
        self.all_eccentricities().into_iter().min().unwrap()
    }

    pub fn diameter(&self) -> u32 {
        self.all_eccentricities().into_iter().max().unwrap()
    }

    /// Distance from `t` to the star at `center`, which always equals the
    /// count of `t`'s edges missing from that star; asserted.
    pub fn star_distance_check(&self, t: &Tree, center: u32) -> u32 {
        let star = Tree::star(self.space.n, center);
        let got = self.distance(t, &star);
        let expected = t.edges().filter(|e| !star.contains(*e)).count() as u32;
        assert_eq!(got, expected, "star distance must match the edge difference");
        got
    }

    /// Distance from the star at `center` to any tree equals the number of
    /// tree edges missing from the star. Returns the trees violating this,
    /// with expected and observed distance; must come back empty.
    pub fn star_distance_violations(&self, center: u32) -> Vec<(Tree, u32, u32)> {
        let star = Tree::star(self.space.n, center);
        let dist = self.bfs(self.id_of(&star));
        let mut bad = Vec::new();
        for (id, &got) in dist.iter().enumerate() {
            let t = self.tree(id);
            let expected = t.edges().filter(|e| !star.contains(*e)).count() as u32;
            if got != expected {
                bad.push((t, expected, got));
            }
        }
        bad
    }
}
