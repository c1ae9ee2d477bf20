//! Turn bookkeeping along fold chains against direct computation on the composite.

mod common;

use std::time::Instant;

use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use traintrack::pff::{
    decomposition_illegal_turns, decomposition_taken_turns, decomposition_taken_turns_prefix,
    parse_chain,
};
use traintrack::train_track::{gates_and_illegal_turns, taken_turns};

fn check(d: &traintrack::pff::PffDecomposition) {
    let words = substituted_images(d);
    assert_eq!(images_of(d.compose()), words, "composite of {}", d.to_dsl());
    assert_eq!(
        decomposition_taken_turns(d),
        turns_of(&words),
        "taken turns of {}",
        d.to_dsl()
    );
    let illegal = orbit_illegal_turns(&first_letters(&words));
    assert_eq!(
        decomposition_illegal_turns(d),
        illegal,
        "illegal turns of {}",
        d.to_dsl()
    );
    assert_eq!(
        gates_and_illegal_turns(d.compose()).unwrap().illegal_turns,
        illegal
    );
}

#[test]
fn seeded_chains_over_ranks_three_to_five() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut count = 0;
    for r in 3..=5 {
        for _ in 0..80 {
            let n = rng.gen_range(1..=10);
            check(&random_chain(&mut rng, r, n));
            count += 1;
        }
    }
    assert!(count >= 200);
    assert!(t.elapsed().as_secs() < 30);
}

#[test]
fn prefixes_agree_with_partial_composites() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let d = random_chain(&mut rng, 3, 6);
        for k in 1..=d.folds().len() {
            assert_eq!(
                decomposition_taken_turns_prefix(&d, k),
                taken_turns(&d.prefix(k))
            );
        }
    }
}

#[test]
fn rotations_compose_to_conjugates() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..40 {
        let d = random_chain(&mut rng, 4, 5);
        for k in 0..d.len() {
            let r = d.rotate(k).unwrap();
            check(&r);
            assert_eq!(
                parse_chain(&r.to_dsl(), r.start()).unwrap().compose(),
                r.compose()
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn any_chain_matches_direct_turns(seed in any::<u64>(), r in 3usize..=5, n in 1usize..=8) {
        let d = random_chain(&mut ChaCha8Rng::seed_from_u64(seed), r, n);
        check(&d);
    }

    #[test]
    fn chain_text_round_trips(seed in any::<u64>(), r in 3usize..=5, n in 1usize..=8) {
        let d = random_chain(&mut ChaCha8Rng::seed_from_u64(seed), r, n);
        let e = parse_chain(&d.to_dsl(), d.start()).unwrap();
        prop_assert_eq!(e.compose(), d.compose());
        prop_assert_eq!(e.to_dsl(), d.to_dsl());
    }
}
