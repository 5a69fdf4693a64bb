//! End-to-end checks of the signed pipeline against independent oracles.

use dscim::macro_sim::{
    simulate_column, term_c, term_d, to_unsigned, Compensation, MacroConfig, SamplerKind,
    SignedColumn, Simulator,
};
use dscim::oracles::{enumerate_expected_count, exact_psum};
use dscim::sng::{shift_value, Shift};
use proptest::prelude::*;

fn exhaustive(group_size: usize) -> MacroConfig {
    MacroConfig {
        group_size,
        bitstream_len: 65536,
        sampler: SamplerKind::Exhaustive,
        ..MacroConfig::dscim1()
    }
}

fn column() -> impl Strategy<Value = SignedColumn> {
    (
        proptest::collection::vec(any::<i8>(), 128),
        proptest::collection::vec(any::<i8>(), 128),
    )
        .prop_map(|(x, w)| SignedColumn::new(x, w).unwrap())
}

#[test]
fn signed_decomposition_all_pairs() {
    for x in i8::MIN..=i8::MAX {
        for w in i8::MIN..=i8::MAX {
            let b = to_unsigned(x) as i64 * to_unsigned(w) as i64;
            assert_eq!(b - term_c(&[x]) - term_d(&[w]), x as i64 * w as i64);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exhaustive_count_matches_enumeration(col in column(), g in prop::sample::select(vec![1usize, 4, 16, 64])) {
        let cfg = exhaustive(g);
        let r = simulate_column(&cfg, &col).unwrap();
        prop_assert_eq!(r.count, enumerate_expected_count(&col, &cfg).unwrap());
    }

    #[test]
    fn truncation_error_is_bounded(col in column(), g in prop::sample::select(vec![4usize, 16, 64])) {
        let cfg = exhaustive(g);
        let k = Shift::for_group_size(g).unwrap();
        let m = (1i64 << k.get()) - 1;
        let bound: i64 = col.x.iter().zip(&col.w).map(|(&x, &w)| {
            let a = shift_value(to_unsigned(x), k).shifted as i64;
            let b = shift_value(to_unsigned(w), k).shifted as i64;
            m * ((m + 1) * (a + b) + m)
        }).sum();
        let err = exact_psum(&col) - simulate_column(&cfg, &col).unwrap().psum_est;
        prop_assert!((0..=bound).contains(&err), "err {} bound {}", err, bound);
    }

    #[test]
    fn midpoint_raises_estimate(col in column()) {
        let plain = simulate_column(&exhaustive(64), &col).unwrap().psum_est;
        let comp = simulate_column(&exhaustive(64).with_compensation(Compensation::Midpoint), &col)
            .unwrap()
            .psum_est;
        prop_assert!(comp > plain);
    }

    #[test]
    fn prng_result_is_sum_of_groups(col in column()) {
        let cfg = MacroConfig::dscim1();
        let r = simulate_column(&cfg, &col).unwrap();
        prop_assert_eq!(r.per_cycle.iter().map(|&c| c as u64).sum::<u64>(), r.count);
        prop_assert!(r.per_cycle.iter().all(|&c| c <= 8));
        prop_assert_eq!(r.psum_est, r.term_b_est as i64 - r.term_c - r.term_d);
    }
}

#[test]
fn thread_count_does_not_change_results() {
    let acts: Vec<Vec<i8>> = (0..64)
        .map(|v| {
            (0..128)
                .map(|i| ((v * 37 + i * 11) % 256) as u8 as i8)
                .collect()
        })
        .collect();
    let weights: Vec<Vec<i8>> = (0..128)
        .map(|i| {
            (0..32)
                .map(|c| ((i * 7 + c * 29) % 256) as u8 as i8)
                .collect()
        })
        .collect();
    let sim = Simulator::new(MacroConfig::dscim2()).unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| sim.simulate_macro(&acts, &weights).unwrap())
    };
    assert_eq!(run(1), run(4));
}
