//! Point-multiplying construction for distance lower bounds.
//!
//! For each near-near gap of a base instance, [`build_blowup`] inserts `k`
//! extra points into that gap and fans them to the far endpoints of the two
//! paired edges. Any flip sequence between the blown-up trees must either
//! exchange one fan directly into the other (a direct gap) or route it
//! elsewhere first, roughly doubling its cost. Direct gaps embed acyclically
//! into the base conflict graph, so at most `ac(H)` of them exist; counting
//! flips gives the per-`k` lower bound `(k - 2n) * (2|V(H)| - ac(H))`.
//! [`concrete_threshold_check`] reports the smallest `k` at which that bound
//! beats the general upper bound, certifying the construction gap.

use crate::conflict::{build_conflict_graph, max_acyclic_exact, AcyclicError, ConflictGraph, EXACT_BUDGET};
use crate::flip::{verify_sequence, FlipSequence, VerifyError};
use crate::gaps::{compute_pairing, compute_rho, Pairing};
use crate::geom::{Edge, Tree};
use num_rational::Ratio;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BlowupError {
    #[error("instance has no near-near gaps; nothing to blow up")]
    NoNearNearPairs,
    #[error("conflict graph is empty; no lower bound beyond the trivial one")]
    EmptyConflictGraph,
    #[error("with {vertex_count} vertices and best acyclic set {max_acyclic}, the lower bound never beats the upper bound")]
    ThresholdNeverReached {
        vertex_count: usize,
        max_acyclic: usize,
    },
    #[error("sequence does not start at the blown-up first tree")]
    WrongStart,
    #[error("sequence fails verification: {0}")]
    SequenceRejected(VerifyError),
    #[error(transparent)]
    Acyclic(AcyclicError),
}

/// A base instance with `k` points fanned into every near-near gap.
#[derive(Debug, Clone)]
pub struct Blowup {
    pub k: u32,
    pub base_n: u32,
    /// Point count after insertion: `base_n + k * (near-near gaps)`.
    pub n: u32,
    /// First tree with fans attached, in blown-up labels.
    pub t: Tree,
    /// Second tree with fans attached, in blown-up labels.
    pub tp: Tree,
    /// `relabel[v - 1]` is the blown-up label of base point `v`.
    pub relabel: Vec<u32>,
    /// Base near-near gap to its fan edges in the first and second tree.
    pub fans: BTreeMap<u32, (Vec<Edge>, Vec<Edge>)>,
    /// Conflict graph of the base pairing.
    pub conflict: ConflictGraph,
    base_pairing: Pairing,
}

impl Blowup {
    pub fn base_pairing(&self) -> &Pairing {
        &self.base_pairing
    }
}

/// The endpoint of a near edge away from its gap.
fn far_endpoint(e: Edge, g: u32) -> u32 {
    if e.a() == g {
        e.b()
    } else {
        assert_eq!(e.b(), g + 1, "edge is not near for this gap");
        e.a()
    }
}

/// Inserts `k` points into every near-near gap of the instance, read in its
/// linear labeling, and fans them to the paired edges' far endpoints. Both
/// blown-up trees are validated, and every conflict arc is re-checked on the
/// fans: each fan edge of the arc's tail crosses each fan edge of its head.
pub fn build_blowup(t: &Tree, tp: &Tree, k: u32) -> Result<Blowup, BlowupError> {
    assert_eq!(t.n(), tp.n(), "point counts must match");
    assert!(k >= 1, "insert at least one point per gap");
    let base_n = t.n();
    let pairing = compute_pairing(&compute_rho(t), &compute_rho(tp));
    let near: Vec<u32> = pairing.i_n();
    if near.is_empty() {
        return Err(BlowupError::NoNearNearPairs);
    }
    let near_set: BTreeSet<u32> = near.iter().copied().collect();
    let relabel: Vec<u32> = (1..=base_n)
        .map(|v| v + k * near_set.iter().filter(|&&g| g < v).count() as u32)
        .collect();
    let map = |v: u32| relabel[v as usize - 1];
    let n = base_n + k * near.len() as u32;

    let mut edges_t: BTreeSet<Edge> = t.edges().map(|e| Edge::new(map(e.a()), map(e.b()))).collect();
    let mut edges_tp: BTreeSet<Edge> =
        tp.edges().map(|e| Edge::new(map(e.a()), map(e.b()))).collect();
    let mut fans = BTreeMap::new();
    for &g in &near {
        let (e, ep) = pairing.pair(g);
        let inserted: Vec<u32> = (1..=k).map(|i| map(g) + i).collect();
        let fan_t: Vec<Edge> = inserted
            .iter()
            .map(|&v| Edge::new(v, map(far_endpoint(e, g))))
            .collect();
        let fan_tp: Vec<Edge> = inserted
            .iter()
            .map(|&v| Edge::new(v, map(far_endpoint(ep, g))))
            .collect();
        edges_t.extend(fan_t.iter().copied());
        edges_tp.extend(fan_tp.iter().copied());
        fans.insert(g, (fan_t, fan_tp));
    }
    let t_big = Tree::new(n, edges_t).expect("fanning into free gaps keeps a valid tree");
    let tp_big = Tree::new(n, edges_tp).expect("fanning into free gaps keeps a valid tree");

    let conflict = build_conflict_graph(&pairing);
    for (&(i, j), _) in conflict.arcs() {
        let (fan_i, _) = &fans[&i];
        let (_, fan_j) = &fans[&j];
        for &a in fan_i {
            for &b in fan_j {
                assert!(
                    a.crosses(b),
                    "conflict arc {i} -> {j} must pit whole fans against each other"
                );
            }
        }
    }

    Ok(Blowup {
        k,
        base_n,
        n,
        t: t_big,
        tp: tp_big,
        relabel,
        fans,
        conflict,
        base_pairing: pairing,
    })
}

/// How a verified sequence between the blown-up trees treats each gap.
#[derive(Debug, Clone)]
pub struct SequenceAnalysis {
    /// Base gap to the first state index holding none of its first-tree fan.
    pub gamma: BTreeMap<u32, usize>,
    /// Gaps whose second-tree fan appears while the first-tree fan still does.
    pub direct: BTreeSet<u32>,
    pub indirect: BTreeSet<u32>,
    pub length: usize,
}

/// Replays a sequence between the blown-up trees and classifies every
/// near-near gap as direct or indirect. Checks along the way that conflict
/// arcs order the direct gaps by their fan-clearing times, which makes the
/// direct set acyclic in the conflict graph; both facts are asserted.
pub fn analyze_sequence(blowup: &Blowup, seq: &FlipSequence) -> Result<SequenceAnalysis, BlowupError> {
    if seq.start != blowup.t {
        return Err(BlowupError::WrongStart);
    }
    verify_sequence(seq, &blowup.tp, false).map_err(BlowupError::SequenceRejected)?;
    let states = seq.replay().expect("verified above");

    let mut gamma = BTreeMap::new();
    let mut direct = BTreeSet::new();
    let mut indirect = BTreeSet::new();
    for (&g, (fan_t, fan_tp)) in &blowup.fans {
        let clear = states
            .iter()
            .position(|s| fan_t.iter().all(|&e| !s.contains(e)))
            .expect("final tree holds no first-tree fan edge");
        gamma.insert(g, clear);
        let is_direct = states[..=clear]
            .iter()
            .any(|s| fan_tp.iter().any(|&e| s.contains(e)));
        if is_direct {
            direct.insert(g);
        } else {
            indirect.insert(g);
        }
    }
    assert_eq!(
        direct.len() + indirect.len(),
        blowup.fans.len(),
        "every near-near gap is classified"
    );
    for (&(i, j), _) in blowup.conflict.arcs() {
        if direct.contains(&i) && direct.contains(&j) {
            assert!(
                gamma[&i] < gamma[&j],
                "arc {i} -> {j} must clear its tail fan before its head fan"
            );
        }
    }
    assert!(
        blowup.conflict.is_acyclic_on(&direct),
        "direct gaps must induce an acyclic conflict subgraph"
    );
    Ok(SequenceAnalysis {
        gamma,
        direct,
        indirect,
        length: seq.len(),
    })
}

/// Exact lower-bound data for blowing up one base instance.
#[derive(Debug, Clone)]
pub struct LowerBoundCertificate {
    pub base_n: u32,
    /// Near-near gap count `|V(H)|`.
    pub vertex_count: usize,
    /// Exact largest acyclic-inducing vertex set in the conflict graph.
    pub max_acyclic: usize,
    /// `2 - max_acyclic / vertex_count`, the per-point asymptotic factor.
    pub coefficient: Ratio<i64>,
    /// Requested `k` values with the bound `(k - 2n) * (2 vH - ac)`, floored
    /// at zero.
    pub bounds: Vec<(u32, u64)>,
    /// Differing edges of the base pair; the blown-up pair differs in
    /// `base_d + k * vertex_count` edges, a trivial distance floor.
    pub base_d: usize,
}

impl LowerBoundCertificate {
    /// Edge difference of the `k`-blowup, valid as a distance bound on its
    /// own; display should show `max(bound, blown_d(k))`.
    pub fn blown_d(&self, k: u32) -> u64 {
        self.base_d as u64 + k as u64 * self.vertex_count as u64
    }
}

/// Distance between the blown-up trees is at least `(k - 2n)(2 vH - ac)`:
/// at most `ac` gaps can be direct, every other gap pays for its fan twice,
/// and `2n` absorbs the flips a fan can save by riding base-edge exchanges.
pub fn lower_bound_certificate(
    t: &Tree,
    tp: &Tree,
    ks: &[u32],
) -> Result<LowerBoundCertificate, BlowupError> {
    assert_eq!(t.n(), tp.n(), "point counts must match");
    let base_n = t.n();
    let pairing = compute_pairing(&compute_rho(t), &compute_rho(tp));
    let cg = build_conflict_graph(&pairing);
    let v = cg.vertex_count();
    if v == 0 {
        return Err(BlowupError::EmptyConflictGraph);
    }
    let cert = max_acyclic_exact(&cg, EXACT_BUDGET).map_err(BlowupError::Acyclic)?;
    let ac = cert.size();
    let coefficient = Ratio::new(2 * v as i64 - ac as i64, v as i64);
    let bounds = ks
        .iter()
        .map(|&k| (k, bound_for_k(base_n, v, ac, k)))
        .collect();
    let base_d = t.edges().filter(|e| !tp.contains(*e)).count();
    Ok(LowerBoundCertificate {
        base_n,
        vertex_count: v,
        max_acyclic: ac,
        coefficient,
        bounds,
        base_d,
    })
}

/// `(k - 2n) * (2 vH - ac)`, floored at zero.
pub fn bound_for_k(base_n: u32, vertex_count: usize, max_acyclic: usize, k: u32) -> u64 {
    assert!(max_acyclic <= vertex_count);
    let slack = k as i64 - 2 * base_n as i64;
    let weight = 2 * vertex_count as i64 - max_acyclic as i64;
    (slack * weight).max(0) as u64
}

/// Whether the lower bound at `k` strictly beats the general upper bound
/// `3/2 * n_k - 5` on the blown-up size `n_k = n + k * vH`, compared in
/// integers.
fn beats_upper_bound(n: i64, v: i64, ac: i64, k: i64) -> bool {
    2 * (k - 2 * n) * (2 * v - ac) > 3 * n + 3 * k * v - 10
}

fn smallest_beating_k(n: i64, v: i64, ac: i64) -> i64 {
    // k (v - 2 ac) > 4n (2v - ac) + 3n - 10, and v > 2 ac here.
    let c = v - 2 * ac;
    let r = 4 * n * (2 * v - ac) + 3 * n - 10;
    r.div_euclid(c) + 1
}

/// Smallest `k` at which blowing up this base beats the general upper bound
/// on the blown-up point count, or an error when no `k` ever does (the bound
/// weight `2 vH - ac` must exceed `3/2 vH`).
pub fn concrete_threshold_check(
    base_n: u32,
    vertex_count: usize,
    max_acyclic: usize,
) -> Result<u64, BlowupError> {
    assert!(vertex_count >= 1 && max_acyclic <= vertex_count);
    let (n, v, ac) = (base_n as i64, vertex_count as i64, max_acyclic as i64);
    if v <= 2 * ac {
        return Err(BlowupError::ThresholdNeverReached {
            vertex_count,
            max_acyclic,
        });
    }
    let k = smallest_beating_k(n, v, ac);
    assert!(beats_upper_bound(n, v, ac, k), "threshold must satisfy");
    assert!(!beats_upper_bound(n, v, ac, k - 1), "threshold must be least");
    assert!(k > 2 * n, "useful thresholds exceed the slack term");
    // A weaker conflict graph (larger acyclic set) can only push the
    // threshold up.
    if ac >= 1 {
        assert!(smallest_beating_k(n, v, ac - 1) <= k);
    }
    Ok(k as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flip::{build_sequence_careful, Flip};

    fn tree(n: u32, edges: &[(u32, u32)]) -> Tree {
        Tree::new(n, edges.iter().map(|&(a, b)| Edge::new(a, b))).unwrap()
    }

    #[test]
    fn blowing_up_opposed_stars_gives_larger_stars() {
        let (s1, s5) = (Tree::star(5, 1), Tree::star(5, 5));
        let b = build_blowup(&s1, &s5, 1).unwrap();
        assert_eq!(b.n, 7);
        assert_eq!(b.base_n, 5);
        assert_eq!(b.relabel, vec![1, 2, 4, 6, 7]);
        assert_eq!(b.t, Tree::star(7, 1));
        assert_eq!(b.tp, Tree::star(7, 7));
        let (fan_t, fan_tp) = &b.fans[&2];
        assert_eq!(fan_t, &vec![Edge::new(1, 3)]);
        assert_eq!(fan_tp, &vec![Edge::new(3, 7)]);
        let (fan_t, fan_tp) = &b.fans[&3];
        assert_eq!(fan_t, &vec![Edge::new(1, 5)]);
        assert_eq!(fan_tp, &vec![Edge::new(5, 7)]);
        // Larger k scales the same picture.
        let b3 = build_blowup(&s1, &s5, 3).unwrap();
        assert_eq!(b3.n, 11);
        assert_eq!(b3.t, Tree::star(11, 1));
        assert_eq!(b3.tp, Tree::star(11, 11));
        assert_eq!(b3.fans[&2].0.len(), 3);
    }

    #[test]
    fn bases_without_near_near_gaps_are_rejected() {
        let s = Tree::star(5, 1);
        assert_eq!(
            build_blowup(&s, &s, 1).unwrap_err(),
            BlowupError::NoNearNearPairs
        );
        // Distinct trees whose pairing still has no near-near gap.
        let path = tree(5, &[(1, 2), (2, 3), (3, 4), (4, 5)]);
        let tp = tree(5, &[(1, 2), (2, 3), (3, 5), (4, 5)]);
        assert_eq!(
            lower_bound_certificate(&path, &tp, &[1]).unwrap_err(),
            BlowupError::EmptyConflictGraph
        );
    }

    #[test]
    fn threshold_arithmetic_is_frozen() {
        assert_eq!(concrete_threshold_check(13, 9, 4).unwrap(), 758);
        // A conflict graph with no usable acyclic set lowers the threshold.
        assert_eq!(concrete_threshold_check(13, 9, 0).unwrap(), 108);
        assert_eq!(
            concrete_threshold_check(5, 2, 1).unwrap_err(),
            BlowupError::ThresholdNeverReached {
                vertex_count: 2,
                max_acyclic: 1
            }
        );
    }

    #[test]
    fn per_k_bounds_floor_at_zero() {
        assert_eq!(bound_for_k(13, 9, 4, 800), 10836);
        assert_eq!(bound_for_k(13, 9, 4, 27), 14);
        assert_eq!(bound_for_k(13, 9, 4, 26), 0);
        assert_eq!(bound_for_k(13, 9, 4, 25), 0);
    }

    #[test]
    fn certificates_carry_exact_fractions() {
        let (s1, s5) = (Tree::star(5, 1), Tree::star(5, 5));
        let cert = lower_bound_certificate(&s1, &s5, &[1, 10, 12]).unwrap();
        assert_eq!(cert.vertex_count, 2);
        // The single arc closes no cycle, so both gaps fit.
        assert_eq!(cert.max_acyclic, 2);
        assert_eq!(cert.coefficient, Ratio::new(1, 1));
        assert_eq!(cert.bounds, vec![(1, 0), (10, 0), (12, 4)]);
        assert_eq!(cert.base_d, 3);
        assert_eq!(cert.blown_d(1), 5);
        assert_eq!(cert.blown_d(12), 27);
    }

    #[test]
    fn analysis_classifies_every_gap() {
        let (s1, s5) = (Tree::star(5, 1), Tree::star(5, 5));
        let b = build_blowup(&s1, &s5, 1).unwrap();
        let seq = build_sequence_careful(&b.t, &b.tp).unwrap();
        let analysis = analyze_sequence(&b, &seq).unwrap();
        assert_eq!(analysis.direct.len() + analysis.indirect.len(), 2);
        assert_eq!(analysis.length, seq.len());
        // This construction exchanges both fans in place: every pair direct.
        assert_eq!(
            analysis.direct.iter().copied().collect::<Vec<_>>(),
            vec![2, 3]
        );
        assert!(analysis.indirect.is_empty());
        assert_eq!(analysis.gamma[&2], 4);
        assert_eq!(analysis.gamma[&3], 2);
        assert_eq!(analysis.length, 5);
    }

    #[test]
    fn routing_through_a_path_makes_every_gap_indirect() {
        // The path holds only hull edges, so no second-tree fan edge (all
        // chords) can appear before the first-tree fans are gone.
        let (s1, s5) = (Tree::star(5, 1), Tree::star(5, 5));
        let b = build_blowup(&s1, &s5, 1).unwrap();
        let path = tree(7, &[(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7)]);
        let first = build_sequence_careful(&b.t, &path).unwrap();
        let second = build_sequence_careful(&path, &b.tp).unwrap();
        let mut steps = first.steps;
        steps.extend(second.steps);
        let via_path = FlipSequence::manual(b.t.clone(), steps);
        let analysis = analyze_sequence(&b, &via_path).unwrap();
        assert!(analysis.direct.is_empty());
        assert_eq!(
            analysis.indirect.iter().copied().collect::<Vec<_>>(),
            vec![2, 3]
        );
    }

    #[test]
    fn analysis_rejects_foreign_sequences() {
        let (s1, s5) = (Tree::star(5, 1), Tree::star(5, 5));
        let b = build_blowup(&s1, &s5, 1).unwrap();
        let elsewhere = FlipSequence::manual(Tree::star(7, 2), Vec::new());
        assert_eq!(
            analyze_sequence(&b, &elsewhere).unwrap_err(),
            BlowupError::WrongStart
        );
        let unfinished = FlipSequence::manual(b.t.clone(), Vec::new());
        assert!(matches!(
            analyze_sequence(&b, &unfinished).unwrap_err(),
            BlowupError::SequenceRejected(VerifyError::FinalMismatch { .. })
        ));
        let _ = Flip::new(Edge::new(1, 2), Edge::new(1, 3));
    }

    #[test]
    fn constructed_sequences_respect_the_counting_bound() {
        // For k at least 2n, indirect gaps plus the pair count, scaled by the
        // slack, must stay under any verified sequence's length.
        let (s1, s5) = (Tree::star(5, 1), Tree::star(5, 5));
        for k in [10, 12, 14] {
            let b = build_blowup(&s1, &s5, k).unwrap();
            let seq = build_sequence_careful(&b.t, &b.tp).unwrap();
            let analysis = analyze_sequence(&b, &seq).unwrap();
            let pairs = b.fans.len();
            let slack = (k as usize).saturating_sub(2 * b.base_n as usize);
            assert!(
                slack * (analysis.indirect.len() + pairs) <= analysis.length,
                "k={k}: {} * {} > {}",
                slack,
                analysis.indirect.len() + pairs,
                analysis.length
            );
        }
    }
}
