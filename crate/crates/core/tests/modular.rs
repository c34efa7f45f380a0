use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pushmean_core::decide::{decide_with, Flavor, Objective, Relation};
use pushmean_core::model::{reachable_dead_ends, Wps};
use pushmean_core::modular::{
    search_modular, verify_modular, ChoiceSpace, CounterWitness, ModularError, ModularVerdict, DEFAULT_SEARCH_CAP,
};
use pushmean_core::reductions::{sat_to_wrg, strategy_from_assignment, CnfFormula, ReductionError};
use pushmean_core::rsm::{
    apply_strategy, to_wps, validate_wrg, ModularStrategy, Player, Position, Target, Wrg, WrgBuilder,
};

fn owner(rng: &mut ChaCha8Rng) -> Player {
    if rng.gen_bool(0.6) {
        Player::One
    } else {
        Player::Two
    }
}

/// `main` (entry, exit, two inner nodes, two boxes) and `sub` (entry, exit,
/// one inner node, optionally a recursive box), random transitions.
fn random_wrg(rng: &mut ChaCha8Rng) -> Wrg {
    let mut b = WrgBuilder::new();
    let main = b.module("main");
    let sub = b.module("sub");
    let e = b.entry(main, "e", owner(rng));
    let x = b.exit(main, "x", Player::Two);
    let u = b.node(main, "u", owner(rng));
    let v = b.node(main, "v", owner(rng));
    let se = b.entry(sub, "se", owner(rng));
    let sx = b.exit(sub, "sx", Player::Two);
    let s = b.node(sub, "s", owner(rng));
    let b1 = b.boxed(main, "b1", sub, owner(rng));
    let b2 = b.boxed(main, "b2", sub, owner(rng));
    let rec = rng.gen_bool(0.4).then(|| b.boxed(sub, "br", sub, owner(rng)));

    let mut main_src = vec![Position::Node(e), Position::Node(u), Position::Node(v)];
    main_src.extend([b1, b2].map(|bx| Position::Return { boxed: bx, exit: sx }));
    let mut main_dst = vec![Target::Node(x), Target::Node(u), Target::Node(v), Target::Node(e)];
    main_dst.extend([b1, b2].map(|bx| Target::Call { boxed: bx, entry: se }));
    let mut sub_src = vec![Position::Node(se), Position::Node(s)];
    let mut sub_dst = vec![Target::Node(sx), Target::Node(s), Target::Node(se)];
    if let Some(br) = rec {
        sub_src.push(Position::Return { boxed: br, exit: sx });
        sub_dst.push(Target::Call { boxed: br, entry: se });
    }
    let mut seen = BTreeSet::new();
    for (src, dst, n) in [(&main_src, &main_dst, 9), (&sub_src, &sub_dst, 5)] {
        for _ in 0..n {
            let (p, t) = (src[rng.gen_range(0..src.len())], dst[rng.gen_range(0..dst.len())]);
            if seen.insert((p, t)) {
                b.transition(p, t, rng.gen_range(-2..=2i64));
            }
        }
    }
    b.initial(main, e);
    b.build()
}

fn all_strategies(space: &ChoiceSpace) -> impl Iterator<Item = ModularStrategy> + '_ {
    (0..space.size()).map(move |mut k| {
        let mut digits = vec![0; space.arity.len()];
        for i in (0..digits.len()).rev() {
            let a = space.arity[i] as u128;
            digits[i] = (k % a) as usize;
            k /= a;
        }
        space.strategy(&digits)
    })
}

/// Winning iff no play of `A^σ` ends or violates the objective, read off
/// the translated system with the plain decision procedure.
fn oracle_wins(wrg: &Wrg, sigma: &ModularStrategy, obj: &Objective) -> bool {
    let (w, _) = to_wps(&apply_strategy(wrg, sigma).unwrap());
    if !reachable_dead_ends(&w).is_empty() {
        return false;
    }
    let dual = match obj.flavor {
        Flavor::LimInfAvg => Flavor::LimSupAvg,
        Flavor::LimSupAvg => Flavor::LimInfAvg,
    };
    let rel = match obj.relation {
        Relation::Strict => Relation::NonStrict,
        Relation::NonStrict => Relation::Strict,
    };
    !decide_with(&w.negated(), &Objective::new(dual, rel), false).answer
}

fn objectives() -> Vec<Objective> {
    let mut out = Vec::new();
    for f in [Flavor::LimInfAvg, Flavor::LimSupAvg] {
        for r in [Relation::NonStrict, Relation::Strict] {
            out.push(Objective::new(f, r));
        }
    }
    out
}

fn check_counter_witness(v: &ModularVerdict, obj: &Objective) {
    let ModularVerdict::Losing { system, witness } = v else { return };
    match witness {
        CounterWitness::Lasso(l) => {
            l.check(system).unwrap();
            let cw = l.cycle_weight(system);
            match obj.relation {
                Relation::NonStrict => assert!(cw.is_negative()),
                Relation::Strict => assert!(!cw.is_positive()),
            }
        }
        CounterWitness::DeadEnd(p) => {
            let end = p.end(system).unwrap();
            let top = end.top().unwrap();
            assert!(system.edges.iter().all(|e| e.from != end.state || e.top != top));
        }
        CounterWitness::Unwitnessed => {}
    }
}

#[test]
fn verdicts_match_the_translated_system() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x3c_3c);
    let mut checked = 0;
    for _ in 0..150 {
        let wrg = random_wrg(&mut rng);
        assert!(validate_wrg(&wrg).is_well_formed());
        let space = ChoiceSpace::new(&wrg);
        if space.size() > 64 {
            continue;
        }
        for sigma in all_strategies(&space) {
            for obj in objectives() {
                let v = verify_modular(&wrg, &sigma, &obj).unwrap();
                assert_eq!(v.is_winning(), oracle_wins(&wrg, &sigma, &obj), "{sigma:?} {obj:?}");
                check_counter_witness(&v, &obj);
                checked += 1;
            }
        }
    }
    assert!(checked > 1000, "only {checked} verdicts checked");
}

#[test]
fn search_returns_the_first_winner_in_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e_a2);
    for _ in 0..150 {
        let wrg = random_wrg(&mut rng);
        let space = ChoiceSpace::new(&wrg);
        if space.size() > 64 {
            continue;
        }
        for obj in objectives() {
            let expected = all_strategies(&space).find(|s| oracle_wins(&wrg, s, &obj));
            let found = search_modular(&wrg, &obj, DEFAULT_SEARCH_CAP).unwrap();
            match (&expected, &found) {
                (None, None) => {}
                (Some(e), Some(f)) => {
                    // Strategies may differ only where the winner never goes.
                    assert!(verify_modular(&wrg, f, &obj).unwrap().is_winning());
                    let reach = pushmean_core::rsm::reachable_positions(&wrg, |p| {
                        (wrg.owner(p) == Player::One).then(|| e[&p])
                    });
                    for p in reach.iter().filter(|p| wrg.owner(**p) == Player::One) {
                        assert_eq!(e.get(p), f.get(p));
                    }
                }
                _ => panic!("search {found:?}, enumeration {expected:?}"),
            }
        }
    }
}

#[test]
fn thresholds_match_shifted_weights() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e_57);
    for _ in 0..60 {
        let wrg = random_wrg(&mut rng);
        let space = ChoiceSpace::new(&wrg);
        if space.size() > 16 {
            continue;
        }
        let (p, q) = (rng.gen_range(-3..=3i64), rng.gen_range(1..=3i64));
        let mut shifted = wrg.clone();
        for t in &mut shifted.transitions {
            t.weight = &t.weight * q - p;
        }
        let r = num_rational::BigRational::new(BigInt::from(p), BigInt::from(q));
        for sigma in all_strategies(&space) {
            for obj in objectives() {
                let at_r = verify_modular(&wrg, &sigma, &obj.clone().with_threshold(r.clone())).unwrap();
                let at_0 = verify_modular(&shifted, &sigma, &obj).unwrap();
                assert_eq!(at_r.is_winning(), at_0.is_winning());
            }
        }
    }
}

#[test]
fn unsupported_inputs_are_rejected() {
    let mut b = WrgBuilder::new();
    let m = b.module("m");
    let e = b.entry(m, "e", Player::One);
    b.entry(m, "e2", Player::One);
    b.exit(m, "x", Player::One);
    b.transition(Position::Node(e), Target::Node(e), 0);
    b.initial(m, e);
    let multi = b.build();
    let obj = Objective::new(Flavor::LimInfAvg, Relation::NonStrict);
    assert!(matches!(search_modular(&multi, &obj, 10), Err(ModularError::MultiEntryUnsupported(_))));

    let phi = CnfFormula::new(3, vec![[1, 2, 3]; 4]).unwrap();
    let w = sat_to_wrg(&phi);
    let sigma = strategy_from_assignment(&phi, &[true, false, false]).unwrap();
    assert_eq!(verify_modular(&w, &sigma, &obj.clone().stack_bounded()), Err(ModularError::UnsupportedObjective));
    assert!(matches!(search_modular(&w, &obj, 100), Err(ModularError::SearchSpaceTooLarge { cap: 100, .. })));
    let mut bad = sigma.clone();
    bad.insert(Position::Node(w.initial_entry), 7);
    assert!(matches!(verify_modular(&w, &bad, &obj), Err(ModularError::Rsm(_))));
    assert_eq!(
        strategy_from_assignment(&phi, &[false, false, false]),
        Err(ReductionError::AssignmentNotSatisfying(0))
    );
    assert_eq!(
        strategy_from_assignment(&phi, &[true]),
        Err(ReductionError::AssignmentLength { got: 1, want: 3 })
    );
}

/// Entry-to-exit weight of `module` under a memoryless one-player strategy;
/// `None` if the play never exits.
fn exit_weight(wrg: &Wrg, sigma: &ModularStrategy, module: usize, active: &mut Vec<usize>) -> Option<i64> {
    if active.contains(&module) {
        return None;
    }
    active.push(module);
    let out = wrg.outgoing();
    let exits = &wrg.modules[module].exits;
    let mut pos = Position::Node(wrg.modules[module].entries[0]);
    let mut total = 0;
    let mut visited = BTreeSet::new();
    let result = loop {
        if let Position::Node(n) = pos {
            if exits.contains(&n) {
                break Some(total);
            }
        }
        if !visited.insert(pos) {
            break None;
        }
        let ts = &out[&pos];
        let t = &wrg.transitions[ts[sigma.get(&pos).copied().unwrap_or(0)]];
        total += t.weight.to_i64().unwrap();
        match t.target {
            Target::Node(v) => pos = Position::Node(v),
            Target::Call { boxed, .. } => {
                let callee = wrg.boxes[boxed].callee;
                match exit_weight(wrg, sigma, callee, active) {
                    Some(w) => total += w,
                    None => break None,
                }
                pos = Position::Return { boxed, exit: wrg.modules[callee].exits[0] };
            }
        }
    };
    active.pop();
    result
}

#[test]
fn literal_modules_never_gain_under_memoryless_choices() {
    let phi = CnfFormula::new(3, vec![[1, -2, 3], [-1, 2, -3]]).unwrap();
    let w = sat_to_wrg(&phi);
    let literal_modules: Vec<usize> = (0..w.modules.len()).filter(|&m| w.modules[m].name.contains('x')).collect();
    assert_eq!(literal_modules.len(), 6);
    let space = ChoiceSpace::new(&w);
    let mut exits = 0;
    for sigma in all_strategies(&space) {
        for &m in &literal_modules {
            if let Some(wt) = exit_weight(&w, &sigma, m, &mut Vec::new()) {
                assert!(wt <= 0, "{} exits with {wt}", w.modules[m].name);
                exits += 1;
            }
        }
    }
    assert!(exits > 0);

    // With memory: x1 takes True, ~x1 takes True, the inner x1 takes False.
    let by_name = |n: &str| w.node_id(n).unwrap();
    let weight = |src: Position, dst: Target| {
        w.transitions.iter().find(|t| t.source == src && t.target == dst).unwrap().weight.to_i64().unwrap()
    };
    let (x_en, x_ex, x_mid) = (by_name("x1.en"), by_name("x1.ex"), by_name("x1.mid"));
    let (n_en, n_ex, n_mid) = (by_name("~x1.en"), by_name("~x1.ex"), by_name("~x1.mid"));
    let (xb, nb) = (w.box_id("x1.b").unwrap(), w.box_id("~x1.b").unwrap());
    let path = weight(Position::Node(x_en), Target::Call { boxed: xb, entry: n_en })
        + weight(Position::Node(n_en), Target::Call { boxed: nb, entry: x_en })
        + weight(Position::Node(x_en), Target::Node(x_ex))
        + weight(Position::Return { boxed: nb, exit: x_ex }, Target::Node(n_mid))
        + weight(Position::Node(n_mid), Target::Node(n_ex))
        + weight(Position::Return { boxed: xb, exit: n_ex }, Target::Node(x_mid))
        + weight(Position::Node(x_mid), Target::Node(x_ex));
    assert_eq!(path, 1);
}

#[test]
fn translated_weights_cover_every_transition() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x71_a5);
    for _ in 0..50 {
        let wrg = random_wrg(&mut rng);
        let (w, map): (Wps, _) = to_wps(&wrg);
        assert_eq!(map.edge_transition.len(), w.edges.len());
        let covered: BTreeSet<usize> = map.edge_transition.iter().copied().collect();
        assert_eq!(covered.len(), wrg.transitions.len());
        for (e, &t) in w.edges.iter().zip(&map.edge_transition) {
            let bridge = map.state_node[e.from].is_none();
            let expected = if bridge { BigInt::from(0) } else { wrg.transitions[t].weight.clone() };
            assert_eq!(e.weight, expected);
        }
    }
}
