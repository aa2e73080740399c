//! Seeded random instances for tests and batch drivers.
//!
//! Each tree is the endpoint of a random walk on the flip graph starting at
//! the star at point 1, choosing uniformly among all valid exchanges at every
//! step. The walk enumerates valid exchanges exactly, so the chain is the
//! uniform-neighbor walk on the true flip graph, and a fixed seed fully
//! determines the output.

use crate::flip::{apply_flip, Flip};
use crate::geom::{Edge, Tree};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Two independently walked trees on `n` points, deterministic per seed.
pub fn generate_random_instance(n: u32, seed: u64, steps: u32) -> (Tree, Tree) {
    assert!(n >= 3, "walks need at least one valid exchange");
    let mut seeder = ChaCha8Rng::seed_from_u64(seed);
    let s1 = seeder.random::<u64>();
    let s2 = seeder.random::<u64>();
    let t = random_walk(n, steps, &mut ChaCha8Rng::seed_from_u64(s1));
    let tp = random_walk(n, steps, &mut ChaCha8Rng::seed_from_u64(s2));
    (t, tp)
}

/// One random walk of `steps` uniform valid exchanges from the star at 1.
pub fn random_walk(n: u32, steps: u32, rng: &mut impl Rng) -> Tree {
    let mut cur = Tree::star(n, 1);
    // crossings[chord] counts current tree edges crossing it; kept incremental
    // so each step enumerates valid exchanges with O(1) per candidate.
    let mut crossings = vec![0u16; chord_count(n)];
    for (i, f) in chords(n).enumerate() {
        crossings[i] = cur.edges().filter(|&e| e.crosses(f)).count() as u16;
    }
    for _ in 0..steps {
        let options = valid_flips(&cur, &crossings);
        assert!(!options.is_empty(), "every tree has a valid exchange");
        let f = options[rng.random_range(0..options.len())];
        for (i, c) in chords(n).enumerate() {
            if c.crosses(f.remove) {
                crossings[i] -= 1;
            }
            if c.crosses(f.add) {
                crossings[i] += 1;
            }
        }
        cur = apply_flip(&cur, f).expect("enumerated exchange is valid");
    }
    cur
}

fn chord_count(n: u32) -> usize {
    (n as usize) * (n as usize - 1) / 2
}

fn chords(n: u32) -> impl Iterator<Item = Edge> {
    (1..=n).flat_map(move |a| (a + 1..=n).map(move |b| Edge::new(a, b)))
}

fn chord_index(n: u32, e: Edge) -> usize {
    let (a, b) = (e.a() as usize, e.b() as usize);
    let n = n as usize;
    (a - 1) * n - a * (a - 1) / 2 + (b - a) - 1
}

/// All valid exchanges on `t`, given the current crossing counts.
fn valid_flips(t: &Tree, crossings: &[u16]) -> Vec<Flip> {
    let n = t.n();
    let mut out = Vec::new();
    for e in t.edges() {
        let side = split_sides(t, e);
        for x in 1..=n {
            for y in x + 1..=n {
                // Reconnecting adds straddle the two components of t - e.
                if side[x as usize - 1] == side[y as usize - 1] {
                    continue;
                }
                let f = Edge::new(x, y);
                if t.contains(f) {
                    continue;
                }
                let mut c = crossings[chord_index(n, f)];
                if f.crosses(e) {
                    c -= 1;
                }
                if c == 0 {
                    out.push(Flip::new(e, f));
                }
            }
        }
    }
    out
}

/// Which of the two components of `t - e` each vertex lands in.
fn split_sides(t: &Tree, e: Edge) -> Vec<bool> {
    let n = t.n() as usize;
    let mut parent: Vec<u32> = (0..n as u32).collect();
    fn root(parent: &mut [u32], x: u32) -> u32 {
        let mut r = x;
        while parent[r as usize] != r {
            r = parent[r as usize];
        }
        let mut c = x;
        while parent[c as usize] != r {
            let nx = parent[c as usize];
            parent[c as usize] = r;
            c = nx;
        }
        r
    }
    for f in t.edges().filter(|&f| f != e) {
        let (ra, rb) = (root(&mut parent, f.a() - 1), root(&mut parent, f.b() - 1));
        parent[ra as usize] = rb;
    }
    let anchor = root(&mut parent, e.a() - 1);
    (0..n as u32).map(|v| root(&mut parent, v) == anchor).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::validate_tree;

    #[test]
    fn chord_indexing_matches_enumeration_order() {
        for n in [3, 5, 9] {
            for (i, c) in chords(n).enumerate() {
                assert_eq!(chord_index(n, c), i);
            }
            assert_eq!(chords(n).count(), chord_count(n));
        }
    }

    #[test]
    fn walks_are_deterministic_per_seed() {
        let a = generate_random_instance(12, 42, 60);
        let b = generate_random_instance(12, 42, 60);
        assert_eq!(a, b);
        let c = generate_random_instance(12, 43, 60);
        assert_ne!(a, c);
    }

    #[test]
    fn zero_steps_stay_at_the_star() {
        let (t, tp) = generate_random_instance(6, 9, 0);
        assert_eq!(t, Tree::star(6, 1));
        assert_eq!(tp, Tree::star(6, 1));
    }

    #[test]
    fn long_walks_stay_valid() {
        let (t, tp) = generate_random_instance(20, 7, 200);
        for tree in [&t, &tp] {
            let edges: Vec<Edge> = tree.edges().collect();
            validate_tree(20, &edges).unwrap();
        }
        assert_ne!(t, tp);
    }

    #[test]
    fn flip_enumeration_matches_exhaustive_validation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..8 {
            let n = 6;
            let t = random_walk(n, 12, &mut rng);
            let mut crossings = vec![0u16; chord_count(n)];
            for (i, f) in chords(n).enumerate() {
                crossings[i] = t.edges().filter(|&e| e.crosses(f)).count() as u16;
            }
            let listed: std::collections::BTreeSet<(Edge, Edge)> = valid_flips(&t, &crossings)
                .into_iter()
                .map(|f| (f.remove, f.add))
                .collect();
            let mut brute = std::collections::BTreeSet::new();
            for remove in t.edges() {
                for add in chords(n) {
                    if !t.contains(add) && apply_flip(&t, Flip::new(remove, add)).is_ok() {
                        brute.insert((remove, add));
                    }
                }
            }
            assert_eq!(listed, brute);
        }
    }
}
