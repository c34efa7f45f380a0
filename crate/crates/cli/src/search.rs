//! `modular search` with candidate verification spread over threads. The
//! answer is the one the sequential search gives: candidates are taken in
//! enumeration order in batches, and the first winner of the earliest batch
//! that has one is returned.

use std::thread;

use pushmean_core::decide::Objective;
use pushmean_core::modular::{search_modular, strategy_space_size, Candidates, ModularError, Verifier};
use pushmean_core::rsm::{ModularStrategy, Wrg};

const BATCH_PER_JOB: usize = 16;

pub fn search(wrg: &Wrg, obj: &Objective, cap: u128, jobs: usize) -> Result<Option<ModularStrategy>, ModularError> {
    if jobs <= 1 {
        return search_modular(wrg, obj, cap);
    }
    let verifier = Verifier::new(wrg, obj)?;
    let size = strategy_space_size(wrg);
    if size > cap {
        return Err(ModularError::SearchSpaceTooLarge { size, cap });
    }
    let mut cands = Candidates::new(wrg);
    loop {
        let batch: Vec<Vec<usize>> = (0..jobs * BATCH_PER_JOB).map_while(|_| cands.next_digits()).collect();
        if batch.is_empty() {
            return Ok(None);
        }
        let chunk = batch.len().div_ceil(jobs);
        let verdicts: Vec<Result<bool, ModularError>> = thread::scope(|s| {
            let handles: Vec<_> = batch
                .chunks(chunk)
                .map(|part| {
                    let v = &verifier;
                    s.spawn(move || part.iter().map(|d| v.wins(d)).collect::<Vec<_>>())
                })
                .collect();
            handles.into_iter().flat_map(|h| h.join().expect("verifier thread panicked")).collect()
        });
        for (d, r) in batch.iter().zip(verdicts) {
            if r? {
                return Ok(Some(cands.space().strategy(d)));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use pushmean_core::decide::{Flavor, Relation};
    use pushmean_core::modular::DEFAULT_SEARCH_CAP;
    use pushmean_core::reductions::{sat_to_wrg, CnfFormula};

    #[test]
    fn parallel_matches_sequential() {
        let obj = Objective::new(Flavor::LimInfAvg, Relation::NonStrict);
        for clauses in [vec![[1, 2, 3], [-1, -2, -3], [1, -2, 3]], vec![[-1, -2, -3]; 3]] {
            let w = sat_to_wrg(&CnfFormula::new(3, clauses).unwrap());
            let seq = search(&w, &obj, DEFAULT_SEARCH_CAP, 1).unwrap();
            assert_eq!(search(&w, &obj, DEFAULT_SEARCH_CAP, 3).unwrap(), seq);
        }
    }
}
