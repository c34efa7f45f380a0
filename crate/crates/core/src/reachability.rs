//! Backward reachability (pre*) by saturation of a configuration automaton.
//!
//! A configuration `(α, q)` is read top-first starting in automaton state
//! `q`; states `0..|Q|` of every [`ConfigAutomaton`] are the control states
//! of the system. Target automata never have transitions into control states.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use crate::model::{Configuration, StackCommand, State, Symbol, Wps};

type Trans = (usize, Symbol, usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Origin {
    Initial,
    Pop { edge: usize },
    Skip { edge: usize, via: Trans },
    Push { edge: usize, first: Trans, second: Trans },
}

#[derive(Clone, Debug)]
pub struct ConfigAutomaton {
    n_control: usize,
    n_states: usize,
    n_symbols: usize,
    origin: Vec<Option<Origin>>,
    finals: Vec<bool>,
}

impl ConfigAutomaton {
    /// Automaton with only the control states of `wps` and no transitions.
    pub fn empty(wps: &Wps) -> ConfigAutomaton {
        ConfigAutomaton::with_sizes(wps.num_states(), wps.num_symbols())
    }

    pub(crate) fn with_sizes(n_control: usize, n_symbols: usize) -> ConfigAutomaton {
        ConfigAutomaton {
            n_control,
            n_states: n_control,
            n_symbols,
            origin: alloc::vec![None; n_control * n_symbols * n_control],
            finals: alloc::vec![false; n_control],
        }
    }

    /// Accepts exactly `target`.
    pub fn single(wps: &Wps, target: &Configuration) -> ConfigAutomaton {
        let mut a = ConfigAutomaton::empty(wps);
        let mut cur = target.state;
        for &z in target.stack.iter().rev() {
            let next = a.add_state();
            a.add_transition(cur, z, next);
            cur = next;
        }
        a.set_final(cur);
        a
    }

    /// Accepts every configuration in control state `q` with top symbol `z`.
    pub fn top_is(wps: &Wps, q: State, z: Symbol) -> ConfigAutomaton {
        let mut a = ConfigAutomaton::empty(wps);
        let f = a.add_state();
        a.add_transition(q, z, f);
        for y in 0..wps.num_symbols() {
            a.add_transition(f, y, f);
        }
        a.set_final(f);
        a
    }

    /// Accepts every configuration whose control state and top symbol form
    /// one of `pairs`.
    pub fn top_in(wps: &Wps, pairs: &[(State, Symbol)]) -> ConfigAutomaton {
        let mut a = ConfigAutomaton::empty(wps);
        let f = a.add_state();
        for &(q, z) in pairs {
            a.add_transition(q, z, f);
        }
        for y in 0..wps.num_symbols() {
            a.add_transition(f, y, f);
        }
        a.set_final(f);
        a
    }

    pub fn add_state(&mut self) -> usize {
        let old = self.n_states;
        let new = old + 1;
        let mut origin = alloc::vec![None; new * self.n_symbols * new];
        for p in 0..old {
            for z in 0..self.n_symbols {
                for s in 0..old {
                    origin[(p * self.n_symbols + z) * new + s] = self.origin[self.idx(p, z, s)];
                }
            }
        }
        self.origin = origin;
        self.n_states = new;
        self.finals.push(false);
        old
    }

    /// Adds a transition of the target language. Transitions into control
    /// states are rejected since saturation relies on their absence.
    pub fn add_transition(&mut self, p: usize, z: Symbol, s: usize) {
        assert!(s >= self.n_control, "target automata must not enter control states");
        let i = self.idx(p, z, s);
        self.origin[i] = Some(Origin::Initial);
    }

    pub fn set_final(&mut self, s: usize) {
        self.finals[s] = true;
    }

    pub fn num_states(&self) -> usize {
        self.n_states
    }

    fn idx(&self, p: usize, z: Symbol, s: usize) -> usize {
        (p * self.n_symbols + z) * self.n_states + s
    }

    pub fn has_transition(&self, p: usize, z: Symbol, s: usize) -> bool {
        self.origin[self.idx(p, z, s)].is_some()
    }

    pub fn transition_count(&self) -> usize {
        self.origin.iter().filter(|o| o.is_some()).count()
    }

    /// Membership of `(α, q)`.
    pub fn accepts(&self, c: &Configuration) -> bool {
        self.accepting_run(c).is_some()
    }

    /// The lexicographically least accepting run (by target state) of `c`.
    fn accepting_run(&self, c: &Configuration) -> Option<Vec<Trans>> {
        if c.state >= self.n_control {
            return None;
        }
        let word: Vec<Symbol> = c.stack.iter().rev().copied().collect();
        if word.iter().any(|&z| z >= self.n_symbols) {
            return None;
        }
        // good[i][s]: reading word[i..] from s reaches a final state.
        let n = word.len();
        let mut good = alloc::vec![alloc::vec![false; self.n_states]; n + 1];
        good[n].clone_from(&self.finals);
        for i in (0..n).rev() {
            for s in 0..self.n_states {
                good[i][s] = (0..self.n_states).any(|t| good[i + 1][t] && self.has_transition(s, word[i], t));
            }
        }
        if !good[0][c.state] {
            return None;
        }
        let mut run = Vec::with_capacity(n);
        let mut cur = c.state;
        for i in 0..n {
            let next = (0..self.n_states).find(|&t| good[i + 1][t] && self.has_transition(cur, word[i], t))?;
            run.push((cur, word[i], next));
            cur = next;
        }
        Some(run)
    }

    /// Edges of a path from `from` into the target language, reconstructed
    /// from saturation provenance. `None` if `from` is not accepted or the
    /// path would exceed `max_len` edges.
    pub fn witness_path(&self, from: &Configuration, max_len: usize) -> Option<Vec<usize>> {
        let mut run: VecDeque<Trans> = self.accepting_run(from)?.into();
        let mut out = Vec::new();
        while let Some(&t) = run.front() {
            let origin = self.origin[self.idx(t.0, t.1, t.2)].expect("run uses present transitions");
            match origin {
                Origin::Initial => break,
                Origin::Pop { edge } => {
                    out.push(edge);
                    run.pop_front();
                }
                Origin::Skip { edge, via } => {
                    out.push(edge);
                    run[0] = via;
                }
                Origin::Push { edge, first, second } => {
                    out.push(edge);
                    run[0] = second;
                    run.push_front(first);
                }
            }
            if out.len() > max_len {
                return None;
            }
        }
        Some(out)
    }
}

/// Saturates `target` into an automaton for `pre*(L(target))`.
pub fn pre_star_automaton(wps: &Wps, target: &ConfigAutomaton) -> ConfigAutomaton {
    assert_eq!(target.n_control, wps.num_states(), "automaton does not match the system");
    let mut a = target.clone();
    let nq = wps.num_states();
    let ng = wps.num_symbols();
    // Rules indexed by the control state they move into.
    let mut skips_into: Vec<Vec<usize>> = alloc::vec![Vec::new(); nq * ng];
    let mut pushes_into: Vec<Vec<usize>> = alloc::vec![Vec::new(); nq * ng];
    let mut work: VecDeque<Trans> = VecDeque::new();
    for p in 0..a.n_states {
        for z in 0..ng {
            for s in 0..a.n_states {
                if a.has_transition(p, z, s) {
                    work.push_back((p, z, s));
                }
            }
        }
    }
    for (i, e) in wps.edges.iter().enumerate() {
        match e.command {
            StackCommand::Pop => {
                let idx = a.idx(e.from, e.top, e.to);
                if a.origin[idx].is_none() {
                    a.origin[idx] = Some(Origin::Pop { edge: i });
                    work.push_back((e.from, e.top, e.to));
                }
            }
            StackCommand::Skip => skips_into[e.to * ng + e.top].push(i),
            StackCommand::Push(z) => pushes_into[e.to * ng + z].push(i),
        }
    }
    // pending[r·ng + γ]: (p, edge, first) meaning (p,γ) behaves like a skip
    // into automaton state r once (r, γ, s) exists.
    let mut pending: Vec<Vec<(State, usize, Trans)>> = alloc::vec![Vec::new(); a.n_states * ng];

    let add = |a: &mut ConfigAutomaton, work: &mut VecDeque<Trans>, t: Trans, o: Origin| {
        let idx = a.idx(t.0, t.1, t.2);
        if a.origin[idx].is_none() {
            a.origin[idx] = Some(o);
            work.push_back(t);
        }
    };

    while let Some(t) = work.pop_front() {
        let (q, z, r) = t;
        if q < nq {
            for &e in &skips_into[q * ng + z] {
                let from = wps.edges[e].from;
                add(&mut a, &mut work, (from, z, r), Origin::Skip { edge: e, via: t });
            }
            for &e in &pushes_into[q * ng + z] {
                let (p, gamma) = (wps.edges[e].from, wps.edges[e].top);
                pending[r * ng + gamma].push((p, e, t));
                for s in 0..a.n_states {
                    if a.has_transition(r, gamma, s) {
                        add(&mut a, &mut work, (p, gamma, s), Origin::Push { edge: e, first: t, second: (r, gamma, s) });
                    }
                }
            }
        }
        let waiting = pending[r_index(q, z, ng)].clone();
        for (p, e, first) in waiting {
            add(&mut a, &mut work, (p, z, r), Origin::Push { edge: e, first, second: t });
        }
    }
    a
}

fn r_index(state: usize, z: Symbol, ng: usize) -> usize {
    state * ng + z
}

/// `pre*({target})`.
pub fn pre_star(wps: &Wps, target: &Configuration) -> ConfigAutomaton {
    pre_star_automaton(wps, &ConfigAutomaton::single(wps, target))
}

/// Whether `to` is reachable from `from` by a possibly empty path.
pub fn reachable(wps: &Wps, from: &Configuration, to: &Configuration) -> bool {
    pre_star(wps, to).accepts(from)
}

/// A path from `from` to `to`, if one exists within `max_len` edges of the
/// provenance reconstruction.
pub fn reach_path(wps: &Wps, from: &Configuration, to: &Configuration, max_len: usize) -> Option<Vec<usize>> {
    pre_star(wps, to).witness_path(from, max_len)
}

/// A path from the initial configuration to a configuration without
/// successors, if one is reachable.
pub fn dead_end_path(wps: &Wps, max_len: usize) -> Option<Vec<usize>> {
    let heads = wps.edges_by_head();
    let ng = wps.num_symbols();
    let dead: Vec<(State, Symbol)> = (0..wps.num_states())
        .flat_map(|q| (0..ng).map(move |z| (q, z)))
        .filter(|&(q, z)| heads[q * ng + z].is_empty())
        .collect();
    if dead.is_empty() {
        return None;
    }
    pre_star_automaton(wps, &ConfigAutomaton::top_in(wps, &dead)).witness_path(&wps.initial_config(), max_len)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Path, WpsBuilder};

    #[test]
    fn push_pop_reaches_back() {
        let mut b = WpsBuilder::new("⊥", "p");
        b.push("p", "⊥", "p", "γ", 0);
        b.pop("p", "γ", "r", 0);
        let w = b.build();
        let r = w.state_id("r").unwrap();
        let g = w.symbol_id("γ").unwrap();
        let target = Configuration::new(alloc::vec![0], r);
        let a = pre_star(&w, &target);
        assert!(a.accepts(&w.initial_config()));
        assert!(a.accepts(&Configuration::new(alloc::vec![0, g], w.state_id("p").unwrap())));
        assert!(!a.accepts(&Configuration::new(alloc::vec![0, g], r)));
        let path = a.witness_path(&w.initial_config(), 100).unwrap();
        assert_eq!(Path::new(w.initial_config(), path).end(&w).unwrap(), target);
    }
}
