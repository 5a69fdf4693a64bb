//! Cycle-by-cycle accumulation of the per-cycle column sums.
//!
//! `activations` counts how often the wide adder fires, the proxy used for
//! accumulation energy.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AccumulatorKind {
    #[default]
    Direct,
    /// Four per-cycle outputs are latched and folded in with one adder firing.
    Latch4,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Accumulated {
    pub sum: u64,
    pub activations: u64,
}

pub fn accumulate_direct(per_cycle: &[u32]) -> Accumulated {
    Accumulated {
        sum: per_cycle.iter().map(|&v| v as u64).sum(),
        activations: per_cycle.len() as u64,
    }
}

/// Latch-cached accumulation. A partial quad left at the end of the stream is
/// flushed with one extra firing.
pub fn accumulate_latch4(per_cycle: &[u32]) -> Accumulated {
    let mut latches = [0u32; 4];
    let mut filled = 0;
    let mut acc = Accumulated {
        sum: 0,
        activations: 0,
    };
    for &v in per_cycle {
        latches[filled] = v;
        filled += 1;
        if filled == 4 {
            acc.sum += latches.iter().map(|&l| l as u64).sum::<u64>();
            acc.activations += 1;
            filled = 0;
        }
    }
    if filled > 0 {
        acc.sum += latches[..filled].iter().map(|&l| l as u64).sum::<u64>();
        acc.activations += 1;
    }
    acc
}

pub fn accumulate(kind: AccumulatorKind, per_cycle: &[u32]) -> Accumulated {
    match kind {
        AccumulatorKind::Direct => accumulate_direct(per_cycle),
        AccumulatorKind::Latch4 => accumulate_latch4(per_cycle),
    }
}

/// Adder firings for a stream of `cycles` outputs.
pub fn activations_for(kind: AccumulatorKind, cycles: usize) -> u64 {
    match kind {
        AccumulatorKind::Direct => cycles as u64,
        AccumulatorKind::Latch4 => cycles.div_ceil(4) as u64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn direct_examples() {
        assert_eq!(
            accumulate_direct(&[1, 0, 2]),
            Accumulated {
                sum: 3,
                activations: 3
            }
        );
        assert_eq!(
            accumulate_direct(&[0; 64]),
            Accumulated {
                sum: 0,
                activations: 64
            }
        );
        assert_eq!(accumulate_direct(&[8; 256]).sum, 8 * 256);
    }

    #[test]
    fn latch4_examples() {
        let r = accumulate_latch4(&[1; 7]);
        assert_eq!((r.sum, r.activations), (7, 2));
        let trace: Vec<u32> = (0..256).map(|i| i % 3).collect();
        let r = accumulate_latch4(&trace);
        assert_eq!(r.activations, 64);
        assert_eq!(r.sum, accumulate_direct(&trace).sum);
        assert_eq!(accumulate_latch4(&[]).activations, 0);
        assert_eq!(accumulate_latch4(&[5]).activations, 1);
    }

    proptest! {
        #[test]
        fn latch4_sum_matches_direct(trace in prop::collection::vec(0u32..=64, 0..600)) {
            let direct = accumulate_direct(&trace);
            let latched = accumulate_latch4(&trace);
            prop_assert_eq!(latched.sum, direct.sum);
            prop_assert_eq!(latched.activations, trace.len().div_ceil(4) as u64);
            prop_assert_eq!(latched.activations, activations_for(AccumulatorKind::Latch4, trace.len()));
        }
    }
}
