//! Ground-truth references and prior-art baselines.
//!
//! The baselines use per-row generators that are independent of each other
//! and of the LFSR catalog, so their errors come from OR saturation alone.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::macro_sim::{to_unsigned, MacroConfig, SignedColumn};
use crate::sng::shift_value;

pub fn exact_psum(col: &SignedColumn) -> i64 {
    col.x
        .iter()
        .zip(&col.w)
        .map(|(&x, &w)| x as i64 * w as i64)
        .sum()
}

/// Number of the 65536 sampling-map points that land in some row's
/// rectangle. Rectangles within a group are disjoint, so this is the plain
/// sum of `a_s * w_s`.
pub fn enumerate_expected_count(col: &SignedColumn, cfg: &MacroConfig) -> Result<u64> {
    let k = cfg.shift()?;
    Ok(col
        .x
        .iter()
        .zip(&col.w)
        .map(|(&x, &w)| {
            shift_value(to_unsigned(x), k).shifted as u64
                * shift_value(to_unsigned(w), k).shifted as u64
        })
        .sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SaturationPoint {
    pub n: u32,
    pub p: f64,
    pub expected_or: f64,
    pub ideal_sum: f64,
    pub rel_error: f64,
}

/// Relative undercount of an `n`-input OR whose inputs are independent
/// Bernoulli(`p`) bits, against the sum it is meant to approximate.
pub fn or_saturation_rel_error(n: u32, p: f64) -> Result<SaturationPoint> {
    if n == 0 {
        return Err(Error::Range {
            what: "OR fan-in",
            value: 0,
        });
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Config(format!("probability {p} outside [0, 1]")));
    }
    let expected_or = 1.0 - (1.0 - p).powi(n as i32);
    let ideal_sum = n as f64 * p;
    let rel_error = if p == 0.0 || n == 1 {
        0.0
    } else {
        1.0 - expected_or / ideal_sum
    };
    Ok(SaturationPoint {
        n,
        p,
        expected_or,
        ideal_sum,
        rel_error,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NaiveCount {
    pub or_count: u64,
    /// `sum(p_i) * cycles`.
    pub true_sum: f64,
}

fn row_rng(seed: u64, row: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(row as u64);
    rng
}

/// Uniform draw in `[0, 1)` with 53 bits.
fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

/// OR of independent per-row Bernoulli streams with probabilities `p`.
pub fn naive_scim_count(p: &[f64], cycles: usize, seed: u64) -> Result<NaiveCount> {
    if let Some(bad) = p.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::Config(format!("probability {bad} outside [0, 1]")));
    }
    let mut rngs: Vec<ChaCha8Rng> = (0..p.len()).map(|i| row_rng(seed, i)).collect();
    let mut or_count = 0;
    for _ in 0..cycles {
        let mut any = false;
        // every row draws each cycle so streams stay aligned
        for (rng, &pi) in rngs.iter_mut().zip(p) {
            any |= unit(rng) < pi;
        }
        or_count += any as u64;
    }
    Ok(NaiveCount {
        or_count,
        true_sum: p.iter().sum::<f64>() * cycles as f64,
    })
}

/// Conventional S-CIM: every row has its own random source, groups of
/// `group_size` rows are ORed with no remapping. Returns the total OR count.
pub fn independent_or_count(
    operands: &[(u8, u8)],
    group_size: usize,
    cycles: usize,
    seed: u64,
) -> u64 {
    assert!(group_size >= 1);
    let words = cycles.div_ceil(64);
    let mut total = 0u64;
    let mut ra = vec![0u8; cycles];
    let mut rw = vec![0u8; cycles];
    for (g, group) in operands.chunks(group_size).enumerate() {
        let mut or = vec![0u64; words];
        for (j, &(a, w)) in group.iter().enumerate() {
            let mut rng = row_rng(seed, g * group_size + j);
            rng.fill_bytes(&mut ra);
            rng.fill_bytes(&mut rw);
            for t in 0..cycles {
                if ra[t] < a && rw[t] < w {
                    or[t / 64] |= 1 << (t % 64);
                }
            }
        }
        total += or.iter().map(|w| w.count_ones() as u64).sum::<u64>();
    }
    total
}

/// Scales an unshifted OR count to the product domain, `C * 65536 / N`, rounded.
fn scale_count(count: u64, cycles: usize) -> i64 {
    let n = cycles as u128;
    ((count as u128 * 65536 + n / 2) / n) as i64
}

/// Naive unsigned OR-MAC estimate of `sum(a * w)`.
pub fn naive_unsigned_estimate(
    operands: &[(u8, u8)],
    group_size: usize,
    cycles: usize,
    seed: u64,
) -> i64 {
    scale_count(
        independent_or_count(operands, group_size, cycles, seed),
        cycles,
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipolarEstimate {
    pub pos_count: u64,
    pub neg_count: u64,
    pub estimate: i64,
}

/// Behavioral approximation of the sign-aware bipolar OR-MAC: unsigned
/// activations, positive and negative weights in separate OR paths, the
/// result is the difference of the two scaled counts. No remapping.
pub fn bipolar_mac_simulate(
    activations: &[u8],
    weights: &[i8],
    group_size: usize,
    cycles: usize,
    seed: u64,
) -> Result<BipolarEstimate> {
    if activations.len() != weights.len() {
        return Err(Error::Shape(format!(
            "{} activations vs {} weights",
            activations.len(),
            weights.len()
        )));
    }
    if cycles == 0 || group_size == 0 {
        return Err(Error::Config(
            "cycles and group size must be positive".into(),
        ));
    }
    let path = |positive: bool| -> Vec<(u8, u8)> {
        activations
            .iter()
            .zip(weights)
            .map(|(&a, &w)| {
                let mag = if (w > 0) == positive && w != 0 {
                    w.unsigned_abs()
                } else {
                    0
                };
                (a, mag)
            })
            .collect()
    };
    let pos_count = independent_or_count(&path(true), group_size, cycles, seed);
    let neg_count = independent_or_count(
        &path(false),
        group_size,
        cycles,
        seed ^ 0x9e37_79b9_7f4a_7c15,
    );
    Ok(BipolarEstimate {
        pos_count,
        neg_count,
        estimate: scale_count(pos_count, cycles) - scale_count(neg_count, cycles),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_psum_examples() {
        let col = SignedColumn::new(vec![1, -1], vec![127, 127]).unwrap();
        assert_eq!(exact_psum(&col), 0);
        let col = SignedColumn::new(vec![-128; 128], vec![127; 128]).unwrap();
        assert_eq!(exact_psum(&col), -2_080_768);
        let col = SignedColumn::new(vec![3, -7, 100], vec![-2, 5, 90]).unwrap();
        assert_eq!(exact_psum(&col), -6 - 35 + 9000);
    }

    #[test]
    fn enumerate_examples() {
        let exact = MacroConfig::exact();
        let col = SignedColumn::new(vec![72], vec![-28]).unwrap();
        assert_eq!(enumerate_expected_count(&col, &exact).unwrap(), 20000);
        let col = SignedColumn::new(vec![-128], vec![100]).unwrap();
        assert_eq!(enumerate_expected_count(&col, &exact).unwrap(), 0);
        let or4 = MacroConfig {
            group_size: 4,
            ..MacroConfig::dscim1()
        };
        // x' = w' = 254 -> a_s = w_s = 127
        let col = SignedColumn::new(vec![126; 4], vec![126; 4]).unwrap();
        assert_eq!(enumerate_expected_count(&col, &or4).unwrap(), 64516);
    }

    #[test]
    fn saturation_examples() {
        assert_eq!(or_saturation_rel_error(4, 0.5).unwrap().rel_error, 0.53125);
        for p in [0.0, 0.1, 0.5, 1.0] {
            assert_eq!(or_saturation_rel_error(1, p).unwrap().rel_error, 0.0);
        }
        assert!(or_saturation_rel_error(64, 1e-6).unwrap().rel_error < 1e-4);
        assert_eq!(or_saturation_rel_error(8, 0.0).unwrap().rel_error, 0.0);
        let r = or_saturation_rel_error(16, 0.1).unwrap();
        assert!((r.expected_or - (1.0 - 0.9f64.powi(16))).abs() < 1e-15);
        assert!((r.rel_error - 0.490_815).abs() < 1e-5);
        assert!(or_saturation_rel_error(0, 0.5).is_err());
        assert!(or_saturation_rel_error(4, 1.5).is_err());
    }

    #[test]
    fn saturation_monotone() {
        for n in 2..=64 {
            let mut last = 0.0;
            for i in 0..=100 {
                let e = or_saturation_rel_error(n, i as f64 / 100.0)
                    .unwrap()
                    .rel_error;
                assert!(e >= last && e < 1.0);
                last = e;
            }
        }
        for i in 1..=10 {
            let p = i as f64 / 10.0;
            let mut last = 0.0;
            for n in 2..=64 {
                let e = or_saturation_rel_error(n, p).unwrap().rel_error;
                assert!(e > last);
                last = e;
            }
        }
    }

    #[test]
    fn naive_count_examples() {
        let r = naive_scim_count(&[0.0; 16], 1000, 1).unwrap();
        assert_eq!(r.or_count, 0);
        let r = naive_scim_count(&[0.3], 20_000, 7).unwrap();
        let se = (0.3f64 * 0.7 / 20_000.0).sqrt();
        assert!((r.or_count as f64 / 20_000.0 - 0.3).abs() < 4.0 * se);
        assert!((r.true_sum - 6000.0).abs() < 1e-9);
        assert!(naive_scim_count(&[1.2], 10, 0).is_err());
    }

    #[test]
    fn bipolar_paths() {
        let acts = vec![200u8; 8];
        let r = bipolar_mac_simulate(&acts, &[10, 0, 127, 5, 0, 1, 2, 3], 4, 256, 3).unwrap();
        assert_eq!(r.neg_count, 0);
        let r = bipolar_mac_simulate(&acts, &[-10; 8], 4, 256, 3).unwrap();
        assert_eq!(r.pos_count, 0);
        assert!(r.estimate < 0);
        assert!(bipolar_mac_simulate(&acts, &[1; 7], 4, 256, 3).is_err());
    }

    #[test]
    fn bipolar_single_row_is_unbiased() {
        // one rectangle 200 x 100: E[count]/N = 20000/65536
        let trials = 400;
        let cycles = 256;
        let total: i64 = (0..trials)
            .map(|s| {
                bipolar_mac_simulate(&[200], &[100], 1, cycles, s)
                    .unwrap()
                    .estimate
            })
            .sum();
        let mean = total as f64 / trials as f64;
        let p = 20000.0 / 65536.0;
        let se = 65536.0 * (p * (1.0 - p) / cycles as f64).sqrt() / (trials as f64).sqrt();
        assert!((mean - 20000.0).abs() < 4.0 * se, "mean {mean}");
    }
}
