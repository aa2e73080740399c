//! Randomized invariant checks: the gap-assignment characterization of
//! validity, structural counts on random trees, hull exchanges, and the
//! classification of optimal sequences on blown-up instances.

use std::collections::BTreeMap;

use flipdist::blowup::{analyze_sequence, build_blowup, BlowupError};
use flipdist::conflict::{abc_partition_orders, build_conflict_graph, AbcClass};
use flipdist::flip::{apply_flip, can_direct_flip, Flip};
use flipdist::gaps::{compute_pairing, compute_rho, cover_forest, rho_is_bijective, EdgeClass};
use flipdist::geom::{apply_cut, choose_cut, hull_edge_at_gap};
use flipdist::oracle::FlipGraphIndex;
use flipdist::random::{generate_random_instance, random_walk};
use flipdist::{Edge, Tree};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

fn chord_universe(n: u32) -> Vec<Edge> {
    let mut v = Vec::new();
    for a in 1..=n {
        for b in a + 1..=n {
            v.push(Edge::new(a, b));
        }
    }
    v
}

/// Random pairwise non-crossing edge set of size `n - 1`: a walk tree with a
/// few edges torn out and random compatible chords patched in. Often acyclic
/// and spanning, often not; never crossing.
fn noncrossing_set(n: u32, seed: u64, drops: usize) -> Vec<Edge> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = random_walk(n, 2 * n, &mut rng);
    let mut edges: Vec<Edge> = t.edges().collect();
    for _ in 0..drops.min(edges.len()) {
        let i = rng.random_range(0..edges.len());
        edges.swap_remove(i);
    }
    let universe = chord_universe(n);
    while edges.len() < (n - 1) as usize {
        let c = universe[rng.random_range(0..universe.len())];
        if !edges.contains(&c) && edges.iter().all(|e| !e.crosses(c)) {
            edges.push(c);
        }
    }
    edges
}

/// Random tree on up to a few hundred points in one pass: each point attaches
/// to a point still visible from outside the hull arc built so far, then the
/// labels get a random cyclic rotation so wrap edges appear too.
fn big_random_tree(n: u32, rng: &mut ChaCha8Rng) -> Tree {
    let mut visible = vec![1u32];
    let mut edges = Vec::with_capacity((n - 1) as usize);
    for i in 2..=n {
        let j = visible[rng.random_range(0..visible.len())];
        edges.push((j, i));
        while *visible.last().unwrap() > j {
            visible.pop();
        }
        visible.push(i);
    }
    let shift = rng.random_range(0..n);
    let rot = |v: u32| (v - 1 + shift) % n + 1;
    Tree::new(n, edges.iter().map(|&(a, b)| Edge::new(rot(a), rot(b)))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, ..ProptestConfig::default() })]

    /// Over non-crossing sets of `n - 1` edges, the unique-shortest-cover
    /// bijection holds exactly for the valid trees.
    #[test]
    fn bijectivity_characterizes_noncrossing_validity(
        n in 3u32..=10,
        seed in any::<u64>(),
        drops in 1usize..=3,
    ) {
        let edges = noncrossing_set(n, seed, drops);
        let bijective = rho_is_bijective(n, &edges);
        let valid = Tree::new(n, edges.iter().copied()).is_ok();
        prop_assert_eq!(bijective, valid);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 500, ..ProptestConfig::default() })]

    /// One direction needs no crossing assumption: valid trees are bijective.
    #[test]
    fn validity_implies_bijectivity(
        n in 3u32..=10,
        mask in any::<u64>(),
    ) {
        let universe = chord_universe(n);
        let edges: Vec<Edge> = universe
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> (i % 45) & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        if Tree::new(n, edges.iter().copied()).is_ok() {
            prop_assert!(rho_is_bijective(n, &edges));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 250, ..ProptestConfig::default() })]

    #[test]
    fn random_trees_keep_their_structural_counts(
        n in 3u32..=24,
        seed in any::<u64>(),
        steps in 0u32..=60,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_walk(n, steps, &mut rng);
        let edges: Vec<Edge> = t.edges().collect();
        prop_assert!(rho_is_bijective(n, &edges));
        // Two extreme points always have their cyclic neighbors attached.
        prop_assert!(t.boundary_edges(true).len() >= 2);
        let ga = compute_rho(&t);
        let forest = cover_forest(&t);
        let tiny = ga.gaps().filter(|&k| ga.class(k) == EdgeClass::Tiny).count();
        let far = ga.gaps().filter(|&k| ga.class(k) == EdgeClass::Far).count();
        // Leaves of the cover forest are the tiny edges; far edges branch.
        prop_assert!(far + forest.roots().len() <= tiny);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn cutting_at_a_free_gap_leaves_two_tiny_edges(
        n in 4u32..=20,
        seed in any::<u64>(),
    ) {
        let (t, tp) = generate_random_instance(n, seed, 2 * n);
        if let Some(g) = choose_cut(&t, &tp) {
            let lin = apply_cut(&t, &tp, g);
            for side in [&lin.t, &lin.tp] {
                let tiny = side.edges().filter(|e| e.is_tiny()).count();
                prop_assert!(tiny >= 2, "cut at {} left {} tiny edges", g, tiny);
            }
        }
    }
}

/// The structural counts again, on trees two hundred points wide.
#[test]
fn large_trees_keep_their_structural_counts() {
    (0u64..300).into_par_iter().for_each(|seed| {
        let n = 4 + (seed * 13 % 197) as u32;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = big_random_tree(n, &mut rng);
        assert!(t.boundary_edges(true).len() >= 2);
        let ga = compute_rho(&t);
        let forest = cover_forest(&t);
        let tiny = ga.gaps().filter(|&k| ga.class(k) == EdgeClass::Tiny).count();
        let far = ga.gaps().filter(|&k| ga.class(k) == EdgeClass::Far).count();
        assert!(far + forest.roots().len() <= tiny, "n={n}, seed {seed}");
    });
}

/// Each class of the adjacency partition induces an acyclic piece of the
/// conflict graph, checked two ways: a direct cycle search per class and the
/// certificate orders, on instances up to two hundred points.
#[test]
fn adjacency_classes_are_acyclic() {
    let ran: usize = (0u64..500)
        .into_par_iter()
        .map(|seed| {
            let n = 4 + (seed * 31 % 197) as u32;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = big_random_tree(n, &mut rng);
            let tp = big_random_tree(n, &mut rng);
            let Some(cut) = choose_cut(&t, &tp) else {
                return 0;
            };
            let lin = apply_cut(&t, &tp, cut);
            let pairing = compute_pairing(&compute_rho(&lin.t), &compute_rho(&lin.tp));
            let cg = build_conflict_graph(&pairing);
            for class in [AbcClass::Above, AbcClass::Below, AbcClass::Crossing] {
                let verts: std::collections::BTreeSet<u32> =
                    cg.vertices_in_class(class).into_iter().collect();
                assert!(
                    cg.is_acyclic_on(&verts),
                    "{class:?} has a cycle at n={n}, seed {seed}"
                );
            }
            for cert in abc_partition_orders(&cg) {
                assert!(cert.check(&cg), "stale order at n={n}, seed {seed}");
            }
            1
        })
        .sum();
    assert!(ran > 400, "only {ran} instances admitted a cut");
}

/// Exchanging a gap's assigned edge for its free hull edge is always a legal
/// single flip, at every free gap of every tree.
#[test]
fn hull_exchanges_are_always_direct() {
    (0u64..300).into_par_iter().for_each(|seed| {
        let n = 4 + (seed * 7919 % 197) as u32;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = big_random_tree(n, &mut rng);
        let ga = compute_rho(&t);
        for j in ga.gaps() {
            let h = hull_edge_at_gap(n, j);
            if t.contains(h) {
                continue;
            }
            can_direct_flip(&t, &ga, j, h)
                .unwrap_or_else(|b| panic!("gap {j} of n={n}, seed {seed}: {b:?}"));
            apply_flip(&t, Flip::new(ga.rho(j), h)).unwrap();
        }
    });
}

/// Point insertion must go through cleanly on any instance that has a
/// near-near gap; the fan crossing re-checks run inside the constructor.
#[test]
fn blowups_accept_every_base_with_near_pairs() {
    (0u64..100).into_par_iter().for_each(|seed| {
        let n = 5 + (seed % 8) as u32;
        let (t, tp) = generate_random_instance(n, seed, 4 * n);
        for k in 1..=3 {
            match build_blowup(&t, &tp, k) {
                Ok(bl) => {
                    assert_eq!(bl.n, bl.t.n());
                    assert_eq!(bl.n, bl.tp.n());
                    assert!(bl.n > n);
                }
                Err(BlowupError::NoNearNearPairs) => {}
                Err(other) => panic!("seed {seed}, k={k}: {other}"),
            }
        }
    });
}

/// Shortest sequences on blown-up instances must pass the full gap
/// classification: the analyzer asserts the arc ordering of first-clearing
/// times and that directly cleared gaps induce an acyclic subgraph.
#[test]
fn optimal_routes_on_blowups_classify_cleanly() {
    let mut indexes: BTreeMap<u32, FlipGraphIndex> = BTreeMap::new();
    let mut checked = 0usize;
    for n in 4..=6u32 {
        let trees = flipdist::oracle::enumerate_trees(n, false).unwrap();
        let mut pairs: Vec<(usize, usize)> = (0..trees.len())
            .flat_map(|i| (0..trees.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j)
            .collect();
        // Deterministic thinning keeps the run in seconds.
        let keep = 400.min(pairs.len());
        let mut state = 0x5eed_u64.wrapping_add(n as u64);
        for i in (1..pairs.len()).rev() {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            pairs.swap(i, (state >> 33) as usize % (i + 1));
        }
        pairs.truncate(keep);
        for (i, j) in pairs {
            for k in 1..=4u32 {
                let bl = match build_blowup(&trees[i], &trees[j], k) {
                    Ok(bl) if bl.n <= 8 => bl,
                    _ => continue,
                };
                let idx = indexes
                    .entry(bl.n)
                    .or_insert_with(|| FlipGraphIndex::build(bl.n, false).unwrap());
                let seq = idx.shortest_sequence(&bl.t, &bl.tp);
                let analysis = analyze_sequence(&bl, &seq).unwrap();
                let total = analysis.direct.len() + analysis.indirect.len();
                assert_eq!(total, bl.fans.len());
                checked += 1;
            }
        }
    }
    assert!(checked > 200, "only {checked} blowups were analyzable");
}
