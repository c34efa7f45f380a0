//! Strategy scripts for `simulate`:
//!
//! - `first`: the applicable edge with the lowest index;
//! - `random:SEED`: uniform among applicable edges, seeded;
//! - `edges:I,J,...`: the listed edge indices in turn, cyclically;
//! - `doubling`: the escalating push strategy of the four-state
//!   `qI1/qI2/qII1/qII2` example.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pushmean_core::games::{doubling_strategy, Player, Strategy};
use pushmean_core::model::{Configuration, Wps};

use crate::{input_err, CliError};

fn applicable<'a>(wps: &'a Wps, c: &Configuration) -> impl Iterator<Item = usize> + 'a {
    let (q, top) = (c.state, c.top());
    (0..wps.edges.len()).filter(move |&i| wps.edges[i].from == q && Some(wps.edges[i].top) == top)
}

pub fn parse(spec: &str, player: Player, wps: &Wps) -> Result<Box<dyn Strategy>, CliError> {
    let (name, arg) = spec.split_once(':').unwrap_or((spec, ""));
    match (name, arg) {
        ("first", "") => Ok(Box::new(|w: &Wps, c: &Configuration, _: &[usize]| {
            applicable(w, c).next().expect("simulate only asks when a move exists")
        })),
        ("random", seed) => {
            let seed: u64 = seed.parse().map_err(|_| input_err(format!("script `{spec}`: seed must be an integer")))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok(Box::new(move |w: &Wps, c: &Configuration, _: &[usize]| {
                let opts: Vec<usize> = applicable(w, c).collect();
                opts[rng.gen_range(0..opts.len())]
            }))
        }
        ("edges", list) => {
            let seq: Vec<usize> = list
                .split(',')
                .map(|t| t.trim().parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|_| input_err(format!("script `{spec}`: expected comma-separated edge indices")))?;
            if let Some(&bad) = seq.iter().find(|&&e| e >= wps.edges.len()) {
                return Err(input_err(format!("script `{spec}`: edge {bad} does not exist")));
            }
            let mut k = 0;
            Ok(Box::new(move |_: &Wps, _: &Configuration, _: &[usize]| {
                let e = seq[k % seq.len()];
                k += 1;
                e
            }))
        }
        ("doubling", "") => {
            let needed = ["qI1", "qI2", "qII1", "qII2"];
            if let Some(s) = needed.iter().find(|s| wps.state_id(s).is_none()) {
                return Err(input_err(format!("script `doubling` needs state `{s}`")));
            }
            Ok(Box::new(doubling_strategy(player)))
        }
        _ => Err(input_err(format!("unknown script `{spec}` (first, random:SEED, edges:I,J,..., doubling)"))),
    }
}
