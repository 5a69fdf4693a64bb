//! Comparator-based stochastic number generation with sample-region
//! remapping.
//!
//! Operands are right-shifted by `k` bits so that each fits in one
//! `2^(8-k)`-wide slot of an axis. Row `j` of a `4^k`-row OR group owns the
//! slot pair `(j mod 2^k, j div 2^k)` of the 256x256 sampling map. Because the
//! rectangles of different rows never overlap, a shared `(RA, RW)` sample can
//! set at most one product bit per group.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Right-shift amount `k`, in `0..=3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Shift(u8);

impl Shift {
    pub const MAX: u8 = 3;

    pub fn new(k: u8) -> Result<Self> {
        if k > Self::MAX {
            return Err(Error::Range {
                what: "shift",
                value: k as i64,
            });
        }
        Ok(Self(k))
    }

    /// Shift matching an OR group of `group_size = 4^k` rows.
    pub fn for_group_size(group_size: usize) -> Result<Self> {
        match group_size {
            1 => Ok(Self(0)),
            4 => Ok(Self(1)),
            16 => Ok(Self(2)),
            64 => Ok(Self(3)),
            other => Err(Error::Config(format!(
                "group size {other} is not one of 1, 4, 16, 64"
            ))),
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    /// Regions per axis, `2^k`.
    pub fn regions(self) -> u16 {
        1 << self.0
    }

    /// Rows per OR group, `4^k`.
    pub fn group_size(self) -> usize {
        1 << (2 * self.0)
    }

    /// Width of one region along an axis, `2^(8-k)`.
    pub fn slot_width(self) -> u16 {
        256 >> self.0
    }
}

impl TryFrom<u8> for Shift {
    type Error = Error;

    fn try_from(k: u8) -> Result<Self> {
        Shift::new(k)
    }
}

impl From<Shift> for u8 {
    fn from(s: Shift) -> u8 {
        s.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ShiftedOperand {
    pub raw: u8,
    pub shifted: u8,
    pub k: Shift,
}

/// Truncating right shift of an unsigned operand.
pub fn shift_value(raw: u8, k: Shift) -> ShiftedOperand {
    ShiftedOperand {
        raw,
        shifted: raw >> k.get(),
        k,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RegionAssignment {
    pub row_in_group: usize,
    pub r_a: u8,
    pub r_w: u8,
    pub k: Shift,
}

pub fn region_of_row(j: usize, k: Shift) -> Result<RegionAssignment> {
    if j >= k.group_size() {
        return Err(Error::Range {
            what: "row index within group",
            value: j as i64,
        });
    }
    let per_axis = k.regions() as usize;
    Ok(RegionAssignment {
        row_in_group: j,
        r_a: (j % per_axis) as u8,
        r_w: (j / per_axis) as u8,
        k,
    })
}

/// Comparator realizations of the remapping.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComparatorMode {
    /// `(R XOR (r << (8-k))) < v_s`: region `r` is the slot starting at `r * 2^(8-k)`.
    #[default]
    XorMask,
    /// Bit-inverted data with a flipped comparator: region 1 is
    /// `R > !v_s`, i.e. the top `v_s` values of the axis. Only defined for
    /// two regions per axis (`k <= 1`).
    Reflect,
}

/// Sample values on one axis for which the comparator outputs 1.
pub fn axis_interval(v: ShiftedOperand, r: u8, mode: ComparatorMode) -> Range<u16> {
    debug_assert!((r as u16) < v.k.regions());
    let len = v.shifted as u16;
    match mode {
        ComparatorMode::XorMask => {
            let lo = r as u16 * v.k.slot_width();
            lo..lo + len
        }
        ComparatorMode::Reflect => {
            assert!(v.k.get() <= 1, "reflected comparators support k <= 1");
            if r == 0 {
                0..len
            } else {
                256 - len..256
            }
        }
    }
}

/// SNG comparator output for sample `sample` with the operand placed in region `r`.
pub fn axis_bit(v: ShiftedOperand, r: u8, sample: u8) -> bool {
    let mask = (r as u16) << (8 - v.k.get());
    ((sample as u16) ^ mask) < v.shifted as u16
}

/// Reflected comparator: `r = 0` compares `R < v_s`, `r = 1` compares `R > !v_s`.
pub fn axis_bit_reflected(v: ShiftedOperand, r: u8, sample: u8) -> bool {
    assert!(v.k.get() <= 1, "reflected comparators support k <= 1");
    if r == 0 {
        sample < v.shifted
    } else {
        sample > !v.shifted
    }
}

/// AND of the activation and weight comparator outputs for one row.
pub fn row_product_bit(
    a: ShiftedOperand,
    w: ShiftedOperand,
    assign: RegionAssignment,
    ra: u8,
    rw: u8,
) -> bool {
    debug_assert!(a.k == assign.k && w.k == assign.k);
    axis_bit(a, assign.r_a, ra) && axis_bit(w, assign.r_w, rw)
}
