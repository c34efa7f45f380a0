#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pushmean_core::model::{Cmd, Wps, WpsBuilder};

pub const FAMILY_SEED: u64 = 0x5eed_2024;
pub const FAMILY_SIZE: usize = 300;

/// A random well-formed system with |Q| ≤ 3, |Γ| ≤ 3 (including ⊥),
/// |E| ≤ 12 and weights in [−2, 2].
pub fn random_wps(rng: &mut ChaCha8Rng) -> Wps {
    let nq = rng.gen_range(1..=3);
    let ng = rng.gen_range(1..=3);
    let states: Vec<String> = (0..nq).map(|i| format!("q{i}")).collect();
    let symbols: Vec<String> = std::iter::once("⊥".to_string()).chain((1..ng).map(|i| format!("g{i}"))).collect();
    let mut b = WpsBuilder::new("⊥", "q0");
    for s in &states {
        b.state(s);
    }
    for z in &symbols[1..] {
        b.symbol(z);
    }
    let ne = rng.gen_range(1..=12);
    for _ in 0..ne {
        let from = &states[rng.gen_range(0..nq)];
        let to = &states[rng.gen_range(0..nq)];
        let top = &symbols[rng.gen_range(0..ng)];
        let w = rng.gen_range(-2..=2i64);
        let kind = rng.gen_range(0..3);
        if kind == 2 && ng > 1 {
            let z = &symbols[rng.gen_range(1..ng)];
            b.edge(from, top, to, Cmd::Push(z), w);
        } else if kind == 1 && top != "⊥" {
            b.edge(from, top, to, Cmd::Pop, w);
        } else {
            b.edge(from, top, to, Cmd::Skip, w);
        }
    }
    b.build()
}

pub fn family() -> Vec<Wps> {
    let mut rng = ChaCha8Rng::seed_from_u64(FAMILY_SEED);
    (0..FAMILY_SIZE).map(|_| random_wps(&mut rng)).collect()
}

pub fn two_state() -> Wps {
    let mut b = WpsBuilder::new("⊥", "q1");
    b.push("q1", "⊥", "q1", "γ", -1);
    b.push("q1", "γ", "q1", "γ", -1);
    b.skip("q1", "γ", "q2", -1);
    b.pop("q2", "γ", "q2", 1);
    b.skip("q2", "⊥", "q1", -1);
    b.build()
}
