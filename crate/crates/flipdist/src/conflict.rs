//! The conflict graph between near-near pairs and acyclic vertex subsets.
//!
//! For two trees under one linear cut, every gap whose pair consists of two
//! distinct near edges becomes a vertex. An arc `g_i -> g_j` records that the
//! direct exchange at `g_j` cannot happen while `e_i` is still present, for
//! one of three structural reasons (crossing, or a cover relation that would
//! break the tree). The largest vertex subset inducing an acyclic subgraph
//! determines how many pairs can be exchanged directly, which is what the
//! sequence length bounds in [`crate::flip`] trade on.

use crate::gaps::Pairing;
use crate::geom::Edge;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Which of the three arc conditions hold for one ordered gap pair. Multiple
/// conditions may coincide; all are recorded, though acyclicity computations
/// collapse them to a single arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ArcTypes {
    /// `e_i` crosses `e'_j`.
    pub crossing: bool,
    /// `e'_j` covers `e_i` and `e_i` covers `g_j`.
    pub cover_in: bool,
    /// `e_i` covers `e'_j` and `e'_j` covers `g_i`.
    pub cover_out: bool,
}

impl ArcTypes {
    pub fn any(self) -> bool {
        self.crossing || self.cover_in || self.cover_out
    }

    /// Type numbers as a sorted list, for display.
    pub fn numbers(self) -> Vec<u8> {
        let mut v = Vec::new();
        if self.crossing {
            v.push(1);
        }
        if self.cover_in {
            v.push(2);
        }
        if self.cover_out {
            v.push(3);
        }
        v
    }
}

/// Vertex classes: whether the pair's edges share an endpoint, and which is
/// longer when they do.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AbcClass {
    /// Adjacent, `e_i` longer.
    Above,
    /// Adjacent, `e_i` shorter.
    Below,
    /// Not adjacent.
    Crossing,
}

/// Directed conflict graph on the near-near gaps.
#[derive(Debug, Clone)]
pub struct ConflictGraph {
    verts: Vec<u32>,
    arcs: BTreeMap<(u32, u32), ArcTypes>,
    abc: BTreeMap<u32, AbcClass>,
    pairs: BTreeMap<u32, (Edge, Edge)>,
}

impl ConflictGraph {
    /// Vertex gaps, ascending.
    pub fn vertices(&self) -> &[u32] {
        &self.verts
    }

    pub fn vertex_count(&self) -> usize {
        self.verts.len()
    }

    /// Typed arcs, keyed by (from, to).
    pub fn arcs(&self) -> &BTreeMap<(u32, u32), ArcTypes> {
        &self.arcs
    }

    pub fn arc(&self, from: u32, to: u32) -> Option<ArcTypes> {
        self.arcs.get(&(from, to)).copied()
    }

    pub fn class(&self, gap: u32) -> AbcClass {
        self.abc[&gap]
    }

    /// The near-near pair at a vertex gap.
    pub fn pair(&self, gap: u32) -> (Edge, Edge) {
        self.pairs[&gap]
    }

    /// True if the arcs restricted to `verts` admit no directed cycle.
    pub fn is_acyclic_on(&self, verts: &BTreeSet<u32>) -> bool {
        topological_order(verts, &self.arcs).is_some()
    }

    /// Vertices of `class`, ascending.
    pub fn vertices_in_class(&self, class: AbcClass) -> Vec<u32> {
        self.verts
            .iter()
            .copied()
            .filter(|g| self.abc[g] == class)
            .collect()
    }

    /// DOT rendering: vertices colored by class, arcs labeled with type sets.
    pub fn to_dot(&self) -> String {
        use std::fmt::Write;
        let mut s = String::from("digraph conflict {\n");
        for &g in &self.verts {
            let color = match self.abc[&g] {
                AbcClass::Above => "orange",
                AbcClass::Below => "green",
                AbcClass::Crossing => "pink",
            };
            let (e, ep) = self.pairs[&g];
            let _ = writeln!(
                s,
                "  g{g} [label=\"g{g}\\n{e} | {ep}\", style=filled, fillcolor={color}];"
            );
        }
        for (&(i, j), &t) in &self.arcs {
            let label: Vec<String> = t.numbers().iter().map(|n| n.to_string()).collect();
            let _ = writeln!(s, "  g{i} -> g{j} [label=\"{}\"];", label.join(","));
        }
        s.push_str("}\n");
        s
    }
}

/// Builds the conflict graph from a pairing. The construction is checked
/// against its mirror: building from the swapped pairing must yield exactly
/// the reversed arc set.
pub fn build_conflict_graph(pairing: &Pairing) -> ConflictGraph {
    let cg = build_unchecked(pairing, false);
    let rev = build_unchecked(pairing, true);
    let flipped: BTreeSet<(u32, u32)> = rev.arcs.keys().map(|&(i, j)| (j, i)).collect();
    let own: BTreeSet<(u32, u32)> = cg.arcs.keys().copied().collect();
    assert_eq!(own, flipped, "swapping the trees must reverse every arc");
    cg
}

fn build_unchecked(pairing: &Pairing, swapped: bool) -> ConflictGraph {
    let verts = pairing.i_n();
    let pairs: BTreeMap<u32, (Edge, Edge)> = verts
        .iter()
        .map(|&g| {
            let (e, ep) = pairing.pair(g);
            (g, if swapped { (ep, e) } else { (e, ep) })
        })
        .collect();
    let mut arcs = BTreeMap::new();
    for &i in &verts {
        for &j in &verts {
            if i == j {
                continue;
            }
            let (ei, _) = pairs[&i];
            let (_, epj) = pairs[&j];
            let t = ArcTypes {
                crossing: ei.crosses(epj),
                cover_in: epj.covers_edge(ei) && ei.covers_gap(j),
                cover_out: ei.covers_edge(epj) && epj.covers_gap(i),
            };
            if t.any() {
                arcs.insert((i, j), t);
            }
        }
    }
    let abc = verts
        .iter()
        .map(|&g| {
            let (e, ep) = pairs[&g];
            let class = if !e.touches(ep) {
                AbcClass::Crossing
            } else if e.len() > ep.len() {
                AbcClass::Above
            } else {
                AbcClass::Below
            };
            (g, class)
        })
        .collect();
    ConflictGraph {
        verts,
        arcs,
        abc,
        pairs,
    }
}

/// Re-derives one arc's types directly from the pairing; used by tests as an
/// independent route.
pub fn arc_types_direct(pairing: &Pairing, i: u32, j: u32) -> ArcTypes {
    let (ei, _) = pairing.pair(i);
    let (_, epj) = pairing.pair(j);
    ArcTypes {
        crossing: ei.crosses(epj),
        cover_in: epj.covers_edge(ei) && ei.covers_gap(j),
        cover_out: ei.covers_edge(epj) && epj.covers_gap(i),
    }
}

/// How an acyclic subset was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcyclicMethod {
    Exact,
    AbcHeuristic,
    CaterpillarAb,
}

/// An acyclic vertex subset with a topological order of the induced subgraph.
#[derive(Debug, Clone)]
pub struct AcyclicCertificate {
    /// Subset vertices, ascending.
    pub vertices: Vec<u32>,
    /// The same vertices in an order where every induced arc points forward.
    pub topo_order: Vec<u32>,
    pub method: AcyclicMethod,
}

impl AcyclicCertificate {
    pub fn size(&self) -> usize {
        self.vertices.len()
    }

    /// Checks subset acyclicity and that the stored order is topological.
    pub fn check(&self, cg: &ConflictGraph) -> bool {
        let set: BTreeSet<u32> = self.vertices.iter().copied().collect();
        if set.len() != self.vertices.len() || self.topo_order.len() != self.vertices.len() {
            return false;
        }
        let pos: BTreeMap<u32, usize> = self
            .topo_order
            .iter()
            .enumerate()
            .map(|(idx, &g)| (g, idx))
            .collect();
        if pos.len() != set.len() || !pos.keys().all(|g| set.contains(g)) {
            return false;
        }
        cg.arcs
            .keys()
            .filter(|(i, j)| set.contains(i) && set.contains(j))
            .all(|&(i, j)| pos[&i] < pos[&j])
    }
}

/// Kahn's algorithm over the induced subgraph, smallest gap first. `None` on a
/// cycle.
pub fn topological_order(
    verts: &BTreeSet<u32>,
    arcs: &BTreeMap<(u32, u32), ArcTypes>,
) -> Option<Vec<u32>> {
    let mut indeg: BTreeMap<u32, usize> = verts.iter().map(|&v| (v, 0)).collect();
    let mut out: BTreeMap<u32, Vec<u32>> = verts.iter().map(|&v| (v, Vec::new())).collect();
    for &(i, j) in arcs.keys() {
        if verts.contains(&i) && verts.contains(&j) {
            out.get_mut(&i).unwrap().push(j);
            *indeg.get_mut(&j).unwrap() += 1;
        }
    }
    let mut ready: BTreeSet<u32> = indeg
        .iter()
        .filter(|&(_, &d)| d == 0)
        .map(|(&v, _)| v)
        .collect();
    let mut order = Vec::with_capacity(verts.len());
    while let Some(&v) = ready.iter().next() {
        ready.remove(&v);
        order.push(v);
        for &w in &out[&v] {
            let d = indeg.get_mut(&w).unwrap();
            *d -= 1;
            if *d == 0 {
                ready.insert(w);
            }
        }
    }
    (order.len() == verts.len()).then_some(order)
}

/// The three per-class certificates with the orders from the acyclicity proof:
/// adjacent-longer peeled by increasing `e_i` length, adjacent-shorter by
/// decreasing `e'_i` length, non-adjacent by a rightmost-endpoint sweep. Each
/// class being acyclic is a theorem; a violation is a bug.
///
/// The two adjacent classes run in opposite directions because swapping the
/// trees reverses every arc: a minimal `e_i` is a source within its class,
/// while a minimal `e'_i` is a sink.
pub fn abc_partition_orders(cg: &ConflictGraph) -> [AcyclicCertificate; 3] {
    let mut above = cg.vertices_in_class(AbcClass::Above);
    above.sort_by_key(|&g| (cg.pair(g).0.len(), g));
    let mut below = cg.vertices_in_class(AbcClass::Below);
    below.sort_by_key(|&g| (std::cmp::Reverse(cg.pair(g).1.len()), g));
    let crossing = crossing_sweep_order(cg);

    let make = |order: Vec<u32>| -> AcyclicCertificate {
        let mut vertices = order.clone();
        vertices.sort_unstable();
        let cert = AcyclicCertificate {
            vertices,
            topo_order: order,
            method: AcyclicMethod::AbcHeuristic,
        };
        assert!(cert.check(cg), "class order not topological");
        cert
    };
    let certs = [make(above), make(below), make(crossing)];
    let total: usize = certs.iter().map(|c| c.size()).sum();
    assert_eq!(total, cg.vertex_count(), "classes must partition the vertices");
    certs
}

/// Extraction order for the non-adjacent class. Thinking of `e_i` as an arc
/// above the spine and `e'_i` as one below, a region `Z_i` hangs over `Z_j`
/// when the upper arc of `i` passes over the lower arc of `j`; every induced
/// conflict arc points from the hanging region to the one below it. Repeatedly
/// take, among regions nothing hangs over, the one whose rightmost endpoint is
/// leftmost.
fn crossing_sweep_order(cg: &ConflictGraph) -> Vec<u32> {
    let hangs_over = |i: u32, j: u32| -> bool {
        let (ei, epi) = cg.pair(i);
        let (ej, epj) = cg.pair(j);
        // Upper arc of i over lower arc of j: open spans overlap.
        if ei.a().max(epj.a()) < ei.b().min(epj.b()) {
            return true;
        }
        // Upper over upper: strict nesting puts the outer arc on top.
        if ei != ej && ei.covers_edge(ej) {
            return true;
        }
        // Lower under lower: the inner arc hangs over the outer one.
        if epi != epj && epj.covers_edge(epi) {
            return true;
        }
        false
    };
    let mut rest: Vec<u32> = cg.vertices_in_class(AbcClass::Crossing);
    let mut order = Vec::with_capacity(rest.len());
    while !rest.is_empty() {
        let free: Vec<u32> = rest
            .iter()
            .copied()
            .filter(|&j| !rest.iter().any(|&i| i != j && hangs_over(i, j)))
            .collect();
        assert!(!free.is_empty(), "hang-over relation admits no minimum");
        let pick = free
            .into_iter()
            .min_by_key(|&g| {
                let (e, ep) = cg.pair(g);
                (e.b().max(ep.b()), g)
            })
            .unwrap();
        order.push(pick);
        rest.retain(|&g| g != pick);
    }
    order
}

/// Errors from the exact acyclic-subset solver.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AcyclicError {
    #[error("conflict graph has {0} vertices, exact budget is {1}")]
    BudgetExceeded(usize, usize),
}

/// Default vertex budget for [`max_acyclic_exact`].
pub const EXACT_BUDGET: usize = 24;

/// Exact maximum acyclic subset by branch and bound. Vertices are branched in
/// descending total-degree order (ties by gap index); a vertex whose inclusion
/// closes a 2-cycle with an already chosen one is skipped without branching,
/// and subtrees that cannot beat the incumbent are cut.
pub fn max_acyclic_exact(
    cg: &ConflictGraph,
    budget: usize,
) -> Result<AcyclicCertificate, AcyclicError> {
    let v = cg.vertex_count();
    if v > budget {
        return Err(AcyclicError::BudgetExceeded(v, budget));
    }
    let mut order: Vec<u32> = cg.vertices().to_vec();
    let degree = |g: u32| -> usize {
        cg.arcs
            .keys()
            .filter(|&&(i, j)| i == g || j == g)
            .count()
    };
    order.sort_by_key(|&g| (std::cmp::Reverse(degree(g)), g));

    let mutual = |a: u32, b: u32| -> bool {
        cg.arcs.contains_key(&(a, b)) && cg.arcs.contains_key(&(b, a))
    };

    fn search(
        cg: &ConflictGraph,
        order: &[u32],
        idx: usize,
        chosen: &mut Vec<u32>,
        best: &mut Vec<u32>,
        mutual: &dyn Fn(u32, u32) -> bool,
    ) {
        if chosen.len() + (order.len() - idx) <= best.len() {
            return;
        }
        if idx == order.len() {
            if chosen.len() > best.len() {
                *best = chosen.clone();
            }
            return;
        }
        let g = order[idx];
        let two_cycle = chosen.iter().any(|&c| mutual(c, g));
        if !two_cycle {
            chosen.push(g);
            let set: BTreeSet<u32> = chosen.iter().copied().collect();
            if cg.is_acyclic_on(&set) {
                search(cg, order, idx + 1, chosen, best, mutual);
            }
            chosen.pop();
        }
        search(cg, order, idx + 1, chosen, best, mutual);
    }

    let mut best = Vec::new();
    let mut chosen = Vec::new();
    search(cg, &order, 0, &mut chosen, &mut best, &mutual);
    best.sort_unstable();
    let set: BTreeSet<u32> = best.iter().copied().collect();
    let topo = topological_order(&set, &cg.arcs).expect("best subset must be acyclic");
    let cert = AcyclicCertificate {
        vertices: best,
        topo_order: topo,
        method: AcyclicMethod::Exact,
    };
    debug_assert!(cert.check(cg));
    Ok(cert)
}

/// Exact result when the graph fits the budget, otherwise the largest of the
/// three class certificates. The result always covers at least a third of the
/// vertices.
pub fn best_acyclic(cg: &ConflictGraph) -> AcyclicCertificate {
    let cert = match max_acyclic_exact(cg, EXACT_BUDGET) {
        Ok(c) => c,
        Err(AcyclicError::BudgetExceeded(..)) => abc_partition_orders(cg)
            .into_iter()
            .max_by_key(|c| c.size())
            .unwrap(),
    };
    assert!(
        cg.vertex_count() == 0 || 3 * cert.size() >= cg.vertex_count(),
        "acyclic subset must cover a third of the vertices"
    );
    cert
}

/// The two-chain split of the near-near gaps for a separated caterpillar under
/// a cut avoiding its hull edges. A gap joins the first certificate when its
/// tree edge sits in the left chain and covers its partner, or sits in the
/// right chain and does not; the rest join the second. Orders follow the
/// two-phase sweep that makes each side topological: left chain by increasing
/// length then right chain by decreasing length for the first side, mirrored
/// for the second. The larger side always reaches half the vertices.
pub fn caterpillar_ab_partition(
    pairing: &Pairing,
    left_chain: &BTreeSet<Edge>,
) -> [AcyclicCertificate; 2] {
    let cg = build_conflict_graph(pairing);
    let mut a = Vec::new();
    let mut b = Vec::new();
    for &g in cg.vertices() {
        let (e, ep) = cg.pair(g);
        let covers = e.covers_edge(ep);
        let in_left = left_chain.contains(&e);
        if in_left == covers {
            a.push(g);
        } else {
            b.push(g);
        }
    }
    let key_first = |g: &u32| -> (u8, i64, u32) {
        let (e, _) = cg.pair(*g);
        if left_chain.contains(&e) {
            (0, e.len() as i64, *g)
        } else {
            (1, -(e.len() as i64), *g)
        }
    };
    let key_second = |g: &u32| -> (u8, i64, u32) {
        let (e, _) = cg.pair(*g);
        if !left_chain.contains(&e) {
            (0, e.len() as i64, *g)
        } else {
            (1, -(e.len() as i64), *g)
        }
    };
    a.sort_by_key(key_first);
    b.sort_by_key(key_second);
    let make = |order: Vec<u32>| -> AcyclicCertificate {
        let mut vertices = order.clone();
        vertices.sort_unstable();
        let cert = AcyclicCertificate {
            vertices,
            topo_order: order,
            method: AcyclicMethod::CaterpillarAb,
        };
        assert!(cert.check(&cg), "caterpillar side order not topological");
        cert
    };
    let certs = [make(a), make(b)];
    let larger = certs.iter().map(|c| c.size()).max().unwrap_or(0);
    assert!(
         2 * larger >= cg.vertex_count(),
        "larger caterpillar side must cover half the vertices"
    );
    certs
}
