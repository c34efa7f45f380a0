//! Expansion of summary values into concrete edge sequences.
//!
//! Every expansion runs at a fixed stack context: it starts at `(αγ, q1)`,
//! ends at `(αγ, q2)` and never pops `γ`, so the same edges work for any `α`.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::model::{Configuration, Path, Wps};
use crate::oracle::{find_pumpable_pair, pump};
use crate::reachability::pre_star_automaton;
use crate::reachability::ConfigAutomaton;
use crate::summary::{doubled_system, Analysis, OmegaSource, Proof, Step, Triple};

/// Upper bound on the length of any expanded witness.
pub const WITNESS_EDGE_LIMIT: usize = 2_000_000;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum WitnessError {
    #[error("the verdict is negative, so there is nothing to witness")]
    NoWitness,
    #[error("witness bookkeeping was not kept for this computation")]
    Unavailable,
    #[error("the witness would exceed {WITNESS_EDGE_LIMIT} edges")]
    TooLong,
}

pub(crate) struct Expander<'b, 'a> {
    pub an: &'b Analysis<'a, BigInt>,
}

fn weight(wps: &Wps, edges: &[usize]) -> BigInt {
    edges.iter().map(|&e| &wps.edges[e].weight).sum()
}

/// Smallest `k ≥ 0` with `base + k·step ≥ target`, for `step > 0`.
fn repetitions(base: &BigInt, target: &BigInt, step: &BigInt) -> BigInt {
    if base >= target {
        BigInt::zero()
    } else {
        (target - base).div_ceil(step)
    }
}

impl<'b, 'a> Expander<'b, 'a> {
    fn wps(&self) -> &'a Wps {
        self.an.engine.wps
    }

    fn guard(out: &[usize]) -> Result<(), WitnessError> {
        if out.len() > WITNESS_EDGE_LIMIT {
            Err(WitnessError::TooLong)
        } else {
            Ok(())
        }
    }

    fn steps(&self, steps: &[Step], level: u32, out: &mut Vec<usize>) -> Result<(), WitnessError> {
        for s in steps {
            match s {
                Step::Edge(e) => out.push(*e),
                Step::Sub(t) => self.at_level(*t, level - 1, &BigInt::zero(), out)?,
            }
            Self::guard(out)?;
        }
        Ok(())
    }

    /// A path for `t` within additional height `level`: its exact value if
    /// finite, weight at least `m` if `ω`.
    fn at_level(&self, t: Triple, level: u32, m: &BigInt, out: &mut Vec<usize>) -> Result<(), WitnessError> {
        let v = self.an.engine.value_at(t, level).ok_or(WitnessError::Unavailable)?;
        match &v.proof {
            Proof::Path(steps) => self.steps(steps, v.level, out),
            Proof::Cycle { to, cycle, from } => {
                let mut a = Vec::new();
                self.steps(to, v.level, &mut a)?;
                let mut c = Vec::new();
                self.steps(cycle, v.level, &mut c)?;
                let mut b = Vec::new();
                self.steps(from, v.level, &mut b)?;
                let wps = self.wps();
                let cw = weight(wps, &c);
                debug_assert!(cw.is_positive());
                let base = weight(wps, &a) + weight(wps, &b);
                let k = repetitions(&base, m, &cw);
                let k = usize::try_from(k).map_err(|_| WitnessError::TooLong)?;
                if k.saturating_mul(c.len()) > WITNESS_EDGE_LIMIT {
                    return Err(WitnessError::TooLong);
                }
                out.extend(a);
                for _ in 0..k {
                    out.extend_from_slice(&c);
                }
                out.extend(b);
                Self::guard(out)
            }
            Proof::ThroughOmega { to, via, from } => {
                let mut a = Vec::new();
                self.steps(to, v.level, &mut a)?;
                let mut b = Vec::new();
                self.steps(from, v.level, &mut b)?;
                let wps = self.wps();
                let rest = weight(wps, &a) + weight(wps, &b);
                out.extend(a);
                self.at_level(*via, v.level - 1, &(m - rest), out)?;
                out.extend(b);
                Self::guard(out)
            }
            Proof::Missing => Err(WitnessError::Unavailable),
        }
    }

    /// A path realizing the full summary value of `t`; weight at least `m`
    /// when that value is `ω`.
    pub fn summary(&self, t: Triple, m: &BigInt, out: &mut Vec<usize>) -> Result<(), WitnessError> {
        match self.an.source_of(t) {
            OmegaSource::Finite => self.at_level(t, self.an.d, m, out),
            OmegaSource::Level => self.at_level(t, self.an.d + 1, m, out),
            OmegaSource::Growth => self.growth(t, m, out),
            OmegaSource::Closure => self.closure(t, m, out),
        }
    }

    /// `s_d(t) < s_{d+1}(t)`: the level-`(d+1)` path is too high to be
    /// optimal at level `d`, so it has a pumpable pair. A non-positive pair
    /// is removed (weight does not drop) and the search repeats.
    fn growth(&self, t: Triple, m: &BigInt, out: &mut Vec<usize>) -> Result<(), WitnessError> {
        let wps = self.wps();
        let mut edges = Vec::new();
        self.at_level(t, self.an.d + 1, &BigInt::zero(), &mut edges)?;
        let start = context_config(wps, t.1, t.0);
        loop {
            let path = Path::new(start.clone(), edges);
            let pair = find_pumpable_pair(wps, &path).map_err(|_| WitnessError::Unavailable)?;
            let pw = weight(wps, &path.edges[pair.p1.clone()]) + weight(wps, &path.edges[pair.p2.clone()]);
            if pw.is_positive() {
                let base = weight(wps, &path.edges);
                let j = repetitions(&base, m, &pw) + 1u8;
                let j = usize::try_from(j).map_err(|_| WitnessError::TooLong)?;
                if j.saturating_mul(pair.p1.len() + pair.p2.len()) > WITNESS_EDGE_LIMIT {
                    return Err(WitnessError::TooLong);
                }
                out.extend(pump(&path, &pair, j).edges);
                return Self::guard(out);
            }
            edges = pump(&path, &pair, 0).edges;
        }
    }

    /// `ω` only after closure: a path in the doubled system through at
    /// least one `ω`-edge; the first `ω`-edge absorbs the missing weight.
    fn closure(&self, t: Triple, m: &BigInt, out: &mut Vec<usize>) -> Result<(), WitnessError> {
        let wps = self.wps();
        let nq = wps.num_states();
        let ng = wps.num_symbols();
        let dbl = doubled_system(wps, &self.an.star);
        let target = Configuration::new(alloc::vec![ng, t.1], t.2 + nq);
        let a = pre_star_automaton(&dbl.wps, &ConfigAutomaton::single(&dbl.wps, &target));
        let from = Configuration::new(alloc::vec![ng, t.1], t.0);
        let route = a.witness_path(&from, WITNESS_EDGE_LIMIT).ok_or(WitnessError::Unavailable)?;
        let mut parts: Vec<Result<usize, (Triple, Vec<usize>)>> = Vec::new();
        let mut total = BigInt::zero();
        for &de in &route {
            match dbl.tags[de] {
                Ok(e) => {
                    total += &wps.edges[e].weight;
                    parts.push(Ok(e));
                }
                Err(u) => {
                    let mut p = Vec::new();
                    self.summary(u, &BigInt::zero(), &mut p)?;
                    total += weight(wps, &p);
                    parts.push(Err((u, p)));
                }
            }
        }
        let first = parts.iter().position(Result::is_err).ok_or(WitnessError::Unavailable)?;
        if &total < m {
            if let Err((u, p)) = &parts[first] {
                let need = m - (&total - weight(wps, p));
                let mut q = Vec::new();
                self.summary(*u, &need, &mut q)?;
                parts[first] = Err((*u, q));
            }
        }
        for part in parts {
            match part {
                Ok(e) => out.push(e),
                Err((_, p)) => out.extend(p),
            }
            Self::guard(out)?;
        }
        Ok(())
    }
}

/// `(⊥γ, q)`, or `(⊥, q)` when `γ = ⊥`.
pub(crate) fn context_config(wps: &Wps, g: usize, q: usize) -> Configuration {
    if g == wps.bottom {
        Configuration::new(alloc::vec![g], q)
    } else {
        Configuration::new(alloc::vec![wps.bottom, g], q)
    }
}
