use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pushmean_core::games::{doubling_game, doubling_strategy, iteration_sums, iterations, simulate, Player, Wpg};
use pushmean_core::reductions::{
    counter_strategy, wfa_nonuniversal_bounded, wfa_to_wpg, wfa_value, word_strategy, ReductionError, Wfa,
    WfaTransition,
};

fn random_wfa(rng: &mut ChaCha8Rng) -> Wfa {
    let ns = rng.gen_range(1..=3);
    let na = rng.gen_range(1..=2);
    let alphabet = (0..na).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
    let ts = (0..rng.gen_range(2..=8))
        .map(|_| WfaTransition {
            from: rng.gen_range(0..ns),
            letter: rng.gen_range(0..na),
            to: rng.gen_range(0..ns),
            weight: rng.gen_range(-1..=1),
        })
        .collect();
    Wfa::new(alphabet, ns, 0, ts).unwrap()
}

/// Least run weight by enumerating every run.
fn brute_value(a: &Wfa, word: &[usize]) -> Option<i64> {
    fn go(a: &Wfa, q: usize, word: &[usize]) -> Option<i64> {
        let Some((&l, rest)) = word.split_first() else { return Some(0) };
        a.transitions
            .iter()
            .filter(|t| t.from == q && t.letter == l)
            .filter_map(|t| go(a, t.to, rest).map(|v| v + t.weight))
            .min()
    }
    go(a, a.initial, word)
}

fn words(na: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 0..max {
        layer = layer
            .iter()
            .flat_map(|w: &Vec<usize>| {
                (0..na).map(move |l| {
                    let mut v = w.clone();
                    v.push(l);
                    v
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

#[test]
fn automaton_values_match_run_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xa11);
    for _ in 0..80 {
        let a = random_wfa(&mut rng);
        for w in words(a.alphabet.len(), 4) {
            assert_eq!(wfa_value(&a, &w), brute_value(&a, &w), "{w:?}");
        }
        for nu in -1..=2 {
            let expected = words(a.alphabet.len(), 4)
                .into_iter()
                .find(|w| (w.is_empty() && nu <= 0) || brute_value(&a, w).is_some_and(|v| v >= nu));
            assert_eq!(wfa_nonuniversal_bounded(&a, nu, 4), expected);
        }
    }
}

#[test]
fn automaton_inputs_are_validated() {
    let t = |weight| WfaTransition { from: 0, letter: 0, to: 0, weight };
    assert_eq!(Wfa::new(vec!["a".into()], 1, 0, vec![t(2)]), Err(ReductionError::WeightOutOfRange(2)));
    assert!(matches!(Wfa::new(vec!["$".into()], 1, 0, vec![]), Err(ReductionError::ReservedLetter(_))));
    let bad = WfaTransition { from: 0, letter: 1, to: 0, weight: 0 };
    assert_eq!(Wfa::new(vec!["a".into()], 1, 0, vec![bad]), Err(ReductionError::BadTransition(0)));
}

/// Under the word strategy, each iteration of the run gadget weighs exactly
/// the value player 2's run achieves on the word, and lasts `4n + 5` steps.
#[test]
fn word_iterations_weigh_the_word_value() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xb22);
    let mut runs = 0;
    for _ in 0..60 {
        let a = random_wfa(&mut rng);
        let g = wfa_to_wpg(&a);
        let anchor = g.game.wps.initial_config();
        for word in words(a.alphabet.len(), 3).into_iter().skip(1) {
            let Some(v) = brute_value(&a, &word) else { continue };
            let play = simulate(&g.game, &mut word_strategy(&g, &word), &mut counter_strategy(&g, &a), 400).unwrap();
            let its = iterations(&g.game.wps, &play.path, &anchor).unwrap();
            assert!(!its.is_empty());
            assert!(its.iter().all(|r| r.len() == 4 * word.len() + 5));
            let sums = iteration_sums(&g.game.wps, &play.path, &anchor).unwrap();
            assert!(sums.iter().all(|s| *s == BigInt::from(v)), "{word:?}: {sums:?} vs {v}");
            runs += 1;
        }
    }
    assert!(runs > 50);
}

#[test]
fn missing_runs_leave_player_two_stuck() {
    let a = Wfa::new(vec!["a".into(), "b".into()], 1, 0, vec![WfaTransition { from: 0, letter: 0, to: 0, weight: 0 }])
        .unwrap();
    let g = wfa_to_wpg(&a);
    let play = simulate(&g.game, &mut word_strategy(&g, &[1]), &mut counter_strategy(&g, &a), 100).unwrap();
    assert!(play.dead_end);
    assert_eq!(g.game.owner[play.path.end(&g.game.wps).unwrap().state], Player::Two);
}

#[test]
fn doubling_game_strategies_alternate_phases() {
    let g = doubling_game();
    let play = simulate(&g, &mut doubling_strategy(Player::One), &mut doubling_strategy(Player::Two), 2000).unwrap();
    assert!(!play.dead_end);
    let configs = play.path.configs(&g.wps).unwrap();
    // Phase lengths: push 4t+1, one skip, pop 4t+1, one skip.
    let bottom_visits: Vec<usize> =
        (1..configs.len()).filter(|&i| configs[i].height() == 1 && configs[i - 1].height() > 1).collect();
    assert!(bottom_visits.len() >= 3);
    let total: BigInt = play.path.edges.iter().map(|&e| g.wps.edges[e].weight.clone()).sum();
    assert_eq!(play.prefix_avgs.last().unwrap(), &BigRational::new(total, BigInt::from(2000)));
    let (max, min) = (play.max_avg().unwrap(), play.min_avg().unwrap());
    assert!(*max >= BigRational::from_integer(1.into()));
    assert!(*min <= BigRational::from_integer((-1).into()));
}

#[test]
fn owner_vector_must_cover_states() {
    let g = doubling_game();
    let short = g.owner[..2].to_vec();
    assert!(Wpg::new(g.wps.clone(), short).is_err());
    assert_eq!(Wpg::one_player(g.wps.clone()).states_of(Player::Two), Vec::<usize>::new());
    assert_eq!(g.states_of(Player::Two).len(), 2);
}
