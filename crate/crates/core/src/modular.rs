//! Verification and brute-force search of memoryless modular strategies.
//!
//! A strategy `σ` wins iff no play of the one-player graph `A^σ` violates
//! the objective. With `W` the pushdown system of `A^σ`, that is checked on
//! `−W` with the dual objective (`LimInf ≥ 0` fails iff some path has
//! `LimSup(−avg) > 0`, and so on).

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::decide::{decide_with, Flavor, Lasso, Objective, Relation};
use crate::model::{apply_in_place, Path, State, Symbol, Wps};
use crate::reachability::dead_end_path;
use crate::rsm::{apply_strategy, to_wps, ModularStrategy, Player, Position, PositionTable, RsmError, Target, Wrg};
use crate::witness::WITNESS_EDGE_LIMIT;

/// Default bound on the number of strategies `search_modular` will consider.
pub const DEFAULT_SEARCH_CAP: u128 = 1 << 24;

/// Steps of direct simulation tried before the general procedure when the
/// restricted system is deterministic.
const SIMULATION_STEPS: usize = 1 << 17;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ModularError {
    #[error(transparent)]
    Rsm(#[from] RsmError),
    #[error("module `{0}` has more than one entry node")]
    MultiEntryUnsupported(String),
    #[error("stack-bounded objectives are not supported for games")]
    UnsupportedObjective,
    #[error("search space of {size} strategies exceeds the cap of {cap}")]
    SearchSpaceTooLarge { size: u128, cap: u128 },
}

/// Why a strategy loses, as a path of the pushdown system of `A^σ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CounterWitness {
    /// A play `prefix · cycle^ω` violating the objective.
    Lasso(Lasso),
    /// A finite play ending where no move is possible.
    DeadEnd(Path),
    /// A violating play exists but none was extracted.
    Unwitnessed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModularVerdict {
    Winning,
    Losing {
        /// Pushdown system of `A^σ`, weights shifted so the threshold is 0.
        system: Wps,
        witness: CounterWitness,
    },
}

impl ModularVerdict {
    pub fn is_winning(&self) -> bool {
        matches!(self, ModularVerdict::Winning)
    }
}

fn check_supported(wrg: &Wrg, obj: &Objective) -> Result<(), ModularError> {
    if let Err(m) = wrg.is_single_entry() {
        return Err(ModularError::MultiEntryUnsupported(wrg.modules[m].name.clone()));
    }
    if obj.stack_bounded {
        return Err(ModularError::UnsupportedObjective);
    }
    Ok(())
}

/// Whether `σ` wins `obj` for player 1 from the initial node.
pub fn verify_modular(wrg: &Wrg, sigma: &ModularStrategy, obj: &Objective) -> Result<ModularVerdict, ModularError> {
    check_supported(wrg, obj)?;
    let norm = shift_weights(wrg, &obj.threshold);
    let restricted = apply_strategy(&norm, sigma)?;
    let table = PositionTable::new(&norm);
    let chosen = chosen_per_id(&norm, &table, sigma);
    let weights: Vec<BigInt> = norm.transitions.iter().map(|t| t.weight.clone()).collect();
    if follow_unique_play(&norm, &table, |i| chosen[i], &weights, obj.relation == Relation::Strict) == Some(true) {
        return Ok(ModularVerdict::Winning);
    }
    let (w, _) = to_wps(&restricted);
    Ok(verify_system(w, obj))
}

/// `w ↦ w·b − a` on every transition for the threshold `a/b`. Shifting the
/// graph rather than its pushdown translation keeps the extra bridge steps
/// of the translation at weight 0, which preserves the sign of every mean.
fn shift_weights(wrg: &Wrg, r: &BigRational) -> Wrg {
    let mut out = wrg.clone();
    if !r.is_zero() {
        for t in &mut out.transitions {
            t.weight = &t.weight * r.denom() - r.numer();
        }
    }
    out
}

fn chosen_per_id(wrg: &Wrg, table: &PositionTable, sigma: &ModularStrategy) -> Vec<Option<usize>> {
    let mut chosen = alloc::vec![None; table.len()];
    for (&p, &k) in sigma {
        if wrg.owner(p) == Player::One {
            chosen[table.id(p)] = Some(k);
        }
    }
    chosen
}

/// Follows the only play of the graph restricted by `pick` (the `k`-th
/// outgoing transition at ids where it returns `Some(k)`). `Some(won)` once
/// the play closes a cycle from a point the stack never drops below, or
/// reaches a dead end (lost); `None` if some position still has a choice or
/// no verdict shows up within the step budget.
fn follow_unique_play(
    wrg: &Wrg,
    table: &PositionTable,
    pick: impl Fn(usize) -> Option<usize>,
    weights: &[BigInt],
    strict: bool,
) -> Option<bool> {
    let mut stack: Vec<usize> = Vec::new();
    let mut pos = table.id(Position::Node(wrg.initial_entry));
    let mut taken: Vec<usize> = Vec::new();
    let mut floors: Vec<BTreeMap<(usize, Option<usize>), usize>> = Vec::new();
    for _ in 0..SIMULATION_STEPS {
        let h = stack.len();
        let key = (pos, stack.last().copied());
        floors.truncate(h + 1);
        if let Some(j) = floors.iter().rev().find_map(|m| m.get(&key).copied()) {
            let w: BigInt = taken[j..].iter().map(|&t| &weights[t]).sum();
            return Some(if strict { w.is_positive() } else { !w.is_negative() });
        }
        while floors.len() <= h {
            floors.push(BTreeMap::new());
        }
        floors[h].insert(key, taken.len());
        let outs = &table.out[pos];
        if pos < wrg.nodes.len() && !stack.is_empty() {
            if let Some(k) = table.exit_index(pos) {
                if !outs.is_empty() {
                    return None;
                }
                let b = stack.pop().expect("nonempty");
                pos = table.return_id(b, k);
                continue;
            }
        }
        let t = match pick(pos) {
            Some(k) => outs[k],
            None => match outs[..] {
                [] => return Some(false),
                [t] => t,
                _ => return None,
            },
        };
        taken.push(t);
        match wrg.transitions[t].target {
            Target::Node(v) => pos = v,
            Target::Call { boxed, entry } => {
                stack.push(boxed);
                pos = entry;
            }
        }
    }
    None
}

fn verify_system(w: Wps, obj: &Objective) -> ModularVerdict {
    let strict = obj.relation == Relation::Strict;
    let losing = |witness| ModularVerdict::Losing { system: w.clone(), witness };
    if let Some(edges) = dead_end_path(&w, WITNESS_EDGE_LIMIT) {
        return losing(CounterWitness::DeadEnd(Path::new(w.initial_config(), edges)));
    }
    if let Some(l) = deterministic_lasso(&w, SIMULATION_STEPS) {
        // The only play is `l`; its mean is the cycle mean.
        let cw = l.cycle_weight(&w);
        let fails = if strict { !cw.is_positive() } else { cw.is_negative() };
        return if fails { losing(CounterWitness::Lasso(l)) } else { ModularVerdict::Winning };
    }
    let neg = w.negated();
    let zero = BigRational::zero();
    let dual_flavor = match obj.flavor {
        Flavor::LimInfAvg => Flavor::LimSupAvg,
        Flavor::LimSupAvg => Flavor::LimInfAvg,
    };
    if strict {
        // Some play has mean ≤ 0: dual mean of −W ≥ 0.
        let dual = Objective::new(dual_flavor, Relation::NonStrict).with_threshold(zero.clone());
        if !decide_with(&neg, &dual, false).answer {
            return ModularVerdict::Winning;
        }
        // A cycle of weight < 0 or a stack-bounded one of weight ≤ 0 in W.
        let neg_cycle = Objective::new(dual_flavor, Relation::Strict).with_threshold(zero.clone());
        if let Some(l) = decide_with(&neg, &neg_cycle, true).witness {
            return losing(CounterWitness::Lasso(l));
        }
        let bounded = Objective::new(dual_flavor, Relation::NonStrict).with_threshold(zero).stack_bounded();
        match decide_with(&neg, &bounded, true).witness {
            Some(l) => losing(CounterWitness::Lasso(l)),
            None => losing(CounterWitness::Unwitnessed),
        }
    } else {
        let dual = Objective::new(dual_flavor, Relation::Strict).with_threshold(zero);
        let v = decide_with(&neg, &dual, true);
        match (v.answer, v.witness) {
            (false, _) => ModularVerdict::Winning,
            (true, Some(l)) => losing(CounterWitness::Lasso(l)),
            (true, None) => losing(CounterWitness::Unwitnessed),
        }
    }
}

/// When every configuration has at most one successor, follows the unique
/// play until some configuration repeats its state and top symbol at a
/// point from which the stack never dropped below it. Returns `None` if the
/// system branches or no repetition shows up within `limit` steps.
pub fn deterministic_lasso(w: &Wps, limit: usize) -> Option<Lasso> {
    let heads = w.edges_by_head();
    let ng = w.num_symbols();
    if heads.iter().any(|h| h.len() > 1) {
        return None;
    }
    let mut cur = w.initial_config();
    let mut edges: Vec<usize> = Vec::new();
    // floors[h]: (state, top) first seen at height h since the stack last
    // went below h, with the step index.
    let mut floors: Vec<BTreeMap<(State, Symbol), usize>> = Vec::new();
    for i in 0..=limit {
        let h = cur.height();
        let key = (cur.state, cur.top()?);
        floors.truncate(h + 1);
        let hit = floors.iter().rev().find_map(|m| m.get(&key).copied());
        if let Some(j) = hit {
            let prefix = Path::new(w.initial_config(), edges[..j].to_vec());
            let cycle = Path::new(prefix.end(w).ok()?, edges[j..].to_vec());
            return Some(Lasso { prefix, cycle });
        }
        while floors.len() <= h {
            floors.push(BTreeMap::new());
        }
        floors[h].insert(key, i);
        let &e = heads[cur.state * ng + key.1].first()?;
        apply_in_place(w, &mut cur, e, i).ok()?;
        edges.push(e);
    }
    None
}

/// Player-1 choice points of a graph in canonical order, with their
/// numbers of alternatives.
#[derive(Clone, Debug)]
pub struct ChoiceSpace {
    pub positions: Vec<Position>,
    pub arity: Vec<usize>,
}

impl ChoiceSpace {
    pub fn new(wrg: &Wrg) -> ChoiceSpace {
        let cps = wrg.choice_points();
        ChoiceSpace { positions: cps.iter().map(|(p, _)| *p).collect(), arity: cps.iter().map(|(_, t)| t.len()).collect() }
    }

    pub fn size(&self) -> u128 {
        self.arity.iter().fold(1u128, |a, &k| a.saturating_mul(k as u128))
    }

    pub fn strategy(&self, digits: &[usize]) -> ModularStrategy {
        self.positions.iter().copied().zip(digits.iter().copied()).collect()
    }
}

/// Number of memoryless modular strategies of `wrg` (saturating).
pub fn strategy_space_size(wrg: &Wrg) -> u128 {
    ChoiceSpace::new(wrg).size()
}

/// Lexicographic enumeration of strategies (first choice point most
/// significant), skipping every strategy that agrees with an earlier one on
/// all player-1 positions reachable under it. Unreachable choice points of
/// the yielded strategies are set to their first alternative.
pub struct Candidates<'a> {
    wrg: &'a Wrg,
    space: ChoiceSpace,
    table: PositionTable,
    /// Choice-point index of each position id.
    point: Vec<Option<usize>>,
    point_id: Vec<usize>,
    digits: Option<Vec<usize>>,
}

impl<'a> Candidates<'a> {
    pub fn new(wrg: &'a Wrg) -> Candidates<'a> {
        let space = ChoiceSpace::new(wrg);
        let table = PositionTable::new(wrg);
        let point_id: Vec<usize> = space.positions.iter().map(|&p| table.id(p)).collect();
        let mut point = alloc::vec![None; table.len()];
        for (c, &i) in point_id.iter().enumerate() {
            point[i] = Some(c);
        }
        let digits = Some(alloc::vec![0; space.positions.len()]);
        Candidates { wrg, space, table, point, point_id, digits }
    }

    pub fn space(&self) -> &ChoiceSpace {
        &self.space
    }

    /// Indices of choice points reachable under `digits`, ascending.
    fn reachable(&self, digits: &[usize]) -> Vec<usize> {
        let seen = self.table.reachable_in(self.wrg, |i| self.point[i].map(|c| digits[c]));
        (0..digits.len()).filter(|&c| seen[self.point_id[c]]).collect()
    }

    /// Increments `digits` at position `at`, carrying leftwards, and zeroes
    /// everything after it. `false` on overflow.
    fn increment(&self, digits: &mut [usize], at: usize) -> bool {
        for d in digits.iter_mut().skip(at + 1) {
            *d = 0;
        }
        let mut i = at;
        loop {
            digits[i] += 1;
            if digits[i] < self.space.arity[i] {
                return true;
            }
            digits[i] = 0;
            if i == 0 {
                return false;
            }
            i -= 1;
        }
    }

    /// The next candidate as one alternative index per choice point.
    pub fn next_digits(&mut self) -> Option<Vec<usize>> {
        loop {
            let mut digits = self.digits.take()?;
            let r = self.reachable(&digits);
            let canonical = digits.iter().enumerate().all(|(i, &d)| d == 0 || r.binary_search(&i).is_ok());
            let out = canonical.then(|| digits.clone());
            if let Some(&last) = r.last() {
                if self.increment(&mut digits, last) {
                    self.digits = Some(digits);
                }
            }
            if out.is_some() {
                return out;
            }
        }
    }
}

impl Iterator for Candidates<'_> {
    type Item = ModularStrategy;

    fn next(&mut self) -> Option<ModularStrategy> {
        self.next_digits().map(|d| self.space.strategy(&d))
    }
}

/// Repeated verification of strategies for one graph and objective.
pub struct Verifier<'a> {
    wrg: &'a Wrg,
    obj: Objective,
    norm: Wrg,
    table: PositionTable,
    weights: Vec<BigInt>,
    point_id: Vec<usize>,
}

impl<'a> Verifier<'a> {
    pub fn new(wrg: &'a Wrg, obj: &Objective) -> Result<Verifier<'a>, ModularError> {
        check_supported(wrg, obj)?;
        let norm = shift_weights(wrg, &obj.threshold);
        let table = PositionTable::new(&norm);
        let weights = norm.transitions.iter().map(|t| t.weight.clone()).collect();
        let point_id = ChoiceSpace::new(wrg).positions.iter().map(|&p| table.id(p)).collect();
        Ok(Verifier { wrg, obj: obj.clone(), norm, table, weights, point_id })
    }

    /// Whether the strategy given by one alternative per choice point (in
    /// [`ChoiceSpace`] order) wins.
    pub fn wins(&self, digits: &[usize]) -> Result<bool, ModularError> {
        let mut chosen = alloc::vec![None; self.table.len()];
        for (c, &i) in self.point_id.iter().enumerate() {
            chosen[i] = Some(digits[c]);
        }
        let strict = self.obj.relation == Relation::Strict;
        if let Some(won) = follow_unique_play(&self.norm, &self.table, |i| chosen[i], &self.weights, strict) {
            return Ok(won);
        }
        let sigma = ChoiceSpace::new(self.wrg).strategy(digits);
        Ok(verify_modular(self.wrg, &sigma, &self.obj)?.is_winning())
    }
}

/// The lexicographically first winning memoryless modular strategy, if any.
pub fn search_modular(wrg: &Wrg, obj: &Objective, cap: u128) -> Result<Option<ModularStrategy>, ModularError> {
    let verifier = Verifier::new(wrg, obj)?;
    let size = strategy_space_size(wrg);
    if size > cap {
        return Err(ModularError::SearchSpaceTooLarge { size, cap });
    }
    let mut cands = Candidates::new(wrg);
    while let Some(d) = cands.next_digits() {
        if verifier.wins(&d)? {
            return Ok(Some(cands.space().strategy(&d)));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rsm::{Target, WrgBuilder};

    /// One module, player 1 picks between a +1 self-loop and a −1 self-loop.
    fn choice() -> Wrg {
        let mut b = WrgBuilder::new();
        let m = b.module("m");
        let e = b.entry(m, "e", Player::One);
        let _x = b.exit(m, "x", Player::Two);
        let l = b.node(m, "l", Player::Two);
        let r = b.node(m, "r", Player::Two);
        b.transition(Position::Node(e), Target::Node(l), 0);
        b.transition(Position::Node(e), Target::Node(r), 0);
        b.transition(Position::Node(l), Target::Node(l), -1);
        b.transition(Position::Node(r), Target::Node(r), 1);
        b.initial(m, e);
        b.build()
    }

    #[test]
    fn picks_positive_loop() {
        let w = choice();
        let obj = Objective::new(Flavor::LimInfAvg, Relation::NonStrict);
        let s = search_modular(&w, &obj, DEFAULT_SEARCH_CAP).unwrap().unwrap();
        assert_eq!(s.values().copied().collect::<Vec<_>>(), alloc::vec![1]);
        let bad: ModularStrategy = [(Position::Node(0), 0)].into_iter().collect();
        match verify_modular(&w, &bad, &obj).unwrap() {
            ModularVerdict::Losing { system, witness: CounterWitness::Lasso(l) } => {
                l.check(&system).unwrap();
                assert!(l.cycle_weight(&system).is_negative());
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn candidates_skip_unreachable() {
        let w = choice();
        assert_eq!(Candidates::new(&w).count(), 2);
    }
}
