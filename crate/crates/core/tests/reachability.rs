mod common;

use pushmean_core::model::{reachable_dead_ends, Configuration, Path, Wps};
use pushmean_core::oracle::bounded_reachable;
use pushmean_core::reachability::{dead_end_path, pre_star, reach_path, reachable};

const CAP: usize = 5;

fn some_targets(w: &Wps) -> Vec<Configuration> {
    // Small configurations over the alphabet, reachable or not.
    let mut out = Vec::new();
    for q in 0..w.num_states() {
        out.push(Configuration::new(vec![w.bottom], q));
        for z in 0..w.num_symbols() {
            if z == w.bottom {
                continue;
            }
            out.push(Configuration::new(vec![w.bottom, z], q));
            for y in 0..w.num_symbols() {
                if y != w.bottom {
                    out.push(Configuration::new(vec![w.bottom, z, y], q));
                }
            }
        }
    }
    out
}

#[test]
fn pre_star_contains_everything_bfs_finds() {
    for w in common::family().iter().take(120) {
        let init = w.initial_config();
        for c in bounded_reachable(w, &init, CAP).into_iter().take(40) {
            assert!(reachable(w, &init, &c), "missed {}", c.display(w));
        }
    }
}

#[test]
fn witness_paths_replay_to_their_target() {
    for w in common::family().iter().take(120) {
        let init = w.initial_config();
        for c in some_targets(w) {
            let via_bfs = bounded_reachable(w, &init, CAP).contains(&c);
            match reach_path(w, &init, &c, 10_000) {
                Some(edges) => assert_eq!(Path::new(init.clone(), edges).end(w).unwrap(), c),
                None => assert!(!via_bfs && !reachable(w, &init, &c)),
            }
        }
    }
}

#[test]
fn pre_star_accepts_only_predecessors() {
    // Whatever pre*(c) accepts within a small height must reach c, which a
    // forward search from that configuration confirms.
    for w in common::family().iter().take(60) {
        for target in some_targets(w).into_iter().take(6) {
            let a = pre_star(w, &target);
            for c in some_targets(w) {
                if a.accepts(&c) {
                    let fwd = bounded_reachable(w, &c, 12);
                    let found = fwd.contains(&target) || reach_path(w, &c, &target, 10_000).is_some();
                    assert!(found);
                }
            }
        }
    }
}

#[test]
fn dead_end_search_agrees_with_per_pair_check() {
    for w in common::family() {
        let path = dead_end_path(&w, 10_000);
        assert_eq!(path.is_some(), !reachable_dead_ends(&w).is_empty());
        if let Some(edges) = path {
            let end = Path::new(w.initial_config(), edges).end(&w).unwrap();
            let top = end.top().unwrap();
            assert!(w.edges.iter().all(|e| e.from != end.state || e.top != top));
        }
    }
}
