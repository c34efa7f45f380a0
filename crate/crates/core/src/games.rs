//! Weighted pushdown games and bounded play.
//!
//! Deciding these games is undecidable; what is offered here is the model,
//! strategies as callbacks, and finite-horizon simulation.

use alloc::vec::Vec;
use core::ops::Range;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::model::{apply_in_place, Configuration, ModelError, Path, State, Wps, WpsBuilder};
pub use crate::rsm::Player;

/// A pushdown system whose control states are split between two players.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wpg {
    pub wps: Wps,
    pub owner: Vec<Player>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GameError {
    #[error("{0} owner entries for {1} states")]
    OwnerMismatch(usize, usize),
    #[error("strategy chose edge {edge}, which is not applicable at step {step}")]
    StrategyMisbehaved { step: usize, edge: usize },
}

impl Wpg {
    pub fn new(wps: Wps, owner: Vec<Player>) -> Result<Wpg, GameError> {
        if owner.len() != wps.num_states() {
            return Err(GameError::OwnerMismatch(owner.len(), wps.num_states()));
        }
        Ok(Wpg { wps, owner })
    }

    /// Every state belongs to player 1.
    pub fn one_player(wps: Wps) -> Wpg {
        let owner = alloc::vec![Player::One; wps.num_states()];
        Wpg { wps, owner }
    }

    pub fn states_of(&self, p: Player) -> Vec<State> {
        (0..self.owner.len()).filter(|&q| self.owner[q] == p).collect()
    }
}

/// Picks the next edge. It sees the current configuration and the edges
/// taken so far (the full configuration history is their replay).
pub trait Strategy {
    fn choose(&mut self, wps: &Wps, current: &Configuration, history: &[usize]) -> usize;
}

impl<F: FnMut(&Wps, &Configuration, &[usize]) -> usize> Strategy for F {
    fn choose(&mut self, wps: &Wps, current: &Configuration, history: &[usize]) -> usize {
        self(wps, current, history)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Play {
    pub path: Path,
    /// `prefix_avgs[i]` is the average weight of the first `i + 1` edges.
    pub prefix_avgs: Vec<BigRational>,
    /// The play stopped because the owner of the current state had no move.
    pub dead_end: bool,
}

impl Play {
    pub fn max_avg(&self) -> Option<&BigRational> {
        self.prefix_avgs.iter().max()
    }

    pub fn min_avg(&self) -> Option<&BigRational> {
        self.prefix_avgs.iter().min()
    }
}

/// Plays `steps` rounds from the initial configuration, each chosen by the
/// owner of the current state.
pub fn simulate(
    g: &Wpg,
    s1: &mut dyn Strategy,
    s2: &mut dyn Strategy,
    steps: usize,
) -> Result<Play, GameError> {
    let wps = &g.wps;
    let heads = wps.edges_by_head();
    let ng = wps.num_symbols();
    let mut cur = wps.initial_config();
    let start = cur.clone();
    let mut edges = Vec::with_capacity(steps);
    let mut avgs = Vec::with_capacity(steps);
    let mut total = BigInt::zero();
    let mut dead_end = false;
    for i in 0..steps {
        let top = cur.top().expect("configurations keep the bottom symbol");
        if heads[cur.state * ng + top].is_empty() {
            dead_end = true;
            break;
        }
        let e = match g.owner[cur.state] {
            Player::One => s1.choose(wps, &cur, &edges),
            Player::Two => s2.choose(wps, &cur, &edges),
        };
        apply_in_place(wps, &mut cur, e, i).map_err(|_| GameError::StrategyMisbehaved { step: i, edge: e })?;
        edges.push(e);
        total += &wps.edges[e].weight;
        avgs.push(BigRational::new(total.clone(), BigInt::from(i + 1)));
    }
    Ok(Play { path: Path::new(start, edges), prefix_avgs: avgs, dead_end })
}

/// Edge ranges between consecutive visits to `anchor`.
pub fn iterations(wps: &Wps, play: &Path, anchor: &Configuration) -> Result<Vec<Range<usize>>, ModelError> {
    let mut cur = play.start.clone();
    let mut last = (cur == *anchor).then_some(0);
    let mut out = Vec::new();
    for (i, &e) in play.edges.iter().enumerate() {
        apply_in_place(wps, &mut cur, e, i)?;
        if cur == *anchor {
            if let Some(s) = last {
                out.push(s..i + 1);
            }
            last = Some(i + 1);
        }
    }
    Ok(out)
}

/// Weight of each completed iteration between visits to `anchor`.
pub fn iteration_sums(wps: &Wps, play: &Path, anchor: &Configuration) -> Result<Vec<BigInt>, ModelError> {
    Ok(iterations(wps, play, anchor)?
        .into_iter()
        .map(|r| play.edges[r].iter().map(|&e| &wps.edges[e].weight).sum())
        .collect())
}

/// The four-state game where player 1 pushes at −2 and pops at +4 while
/// player 2 pushes at +2 and pops at −4; each controls how long its own
/// push phase lasts.
pub fn doubling_game() -> Wpg {
    let mut b = WpsBuilder::new("⊥", "qI1");
    b.push("qI1", "⊥", "qI1", "γ", -2);
    b.push("qI1", "γ", "qI1", "γ", -2);
    b.skip("qI1", "γ", "qI2", 0);
    b.pop("qI2", "γ", "qI2", 4);
    b.skip("qI2", "⊥", "qII1", 0);
    b.push("qII1", "⊥", "qII1", "γ", 2);
    b.push("qII1", "γ", "qII1", "γ", 2);
    b.skip("qII1", "γ", "qII2", 0);
    b.pop("qII2", "γ", "qII2", -4);
    b.skip("qII2", "⊥", "qI1", 0);
    let wps = b.build();
    let owner = wps.states.iter().map(|s| if s.starts_with("qII") { Player::Two } else { Player::One }).collect();
    Wpg { wps, owner }
}

/// Escalating strategy for one side of [`doubling_game`]: each push phase pushes
/// `4·t + 1` symbols, `t` being the number of rounds played before the
/// phase started, so every phase outweighs the whole history before it.
pub fn doubling_strategy(player: Player) -> impl Strategy {
    let push_state = match player {
        Player::One => "qI1",
        Player::Two => "qII1",
    };
    let mut target = 0usize;
    move |wps: &Wps, cur: &Configuration, history: &[usize]| {
        let q = wps.state_id(push_state).expect("doubling_game state");
        let top = cur.top().expect("nonempty stack");
        if cur.state == q && top == wps.bottom {
            target = 4 * history.len() + 1;
        }
        let pushed = cur.height() - 1;
        let want_push = cur.state == q && pushed < target;
        wps.edges
            .iter()
            .position(|e| {
                e.from == cur.state
                    && e.top == top
                    && (cur.state != q || top == wps.bottom || want_push == (e.to == q))
            })
            .expect("every doubling_game configuration has a move")
    }
}
