//! 8-bit linear-feedback shift registers used as the shared activation and
//! weight random sources.
//!
//! Tap masks hold the low eight coefficients of a degree-8 characteristic
//! polynomial, `x^8` implied: bit `i` is the coefficient of `x^i`. So
//! `x^8 + x^4 + x^3 + x^2 + 1` is `0x1d`.
//!
//! Both register styles shift left. The Galois form multiplies the state by
//! `x` modulo the polynomial; the Fibonacci form shifts the parity of the
//! tapped bits into bit 0. With `zero_insert` on, the all-zero state is
//! spliced in after `0x80` (de Bruijn extension), giving a 256-state cycle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// State after which the all-zero state is inserted.
const ZERO_PREDECESSOR: u8 = 0x80;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LfsrStyle {
    Fibonacci,
    Galois,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "LfsrSpecRepr", into = "LfsrSpecRepr")]
pub struct LfsrSpec {
    pub style: LfsrStyle,
    pub taps: u8,
    pub seed: u8,
    pub zero_insert: bool,
}

impl LfsrSpec {
    pub const fn new(style: LfsrStyle, taps: u8, seed: u8) -> Self {
        Self {
            style,
            taps,
            seed,
            zero_insert: true,
        }
    }

    pub const fn with_seed(self, seed: u8) -> Self {
        Self { seed, ..self }
    }

    pub const fn with_zero_insert(self, zero_insert: bool) -> Self {
        Self {
            zero_insert,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.seed == 0 && !self.zero_insert {
            return Err(Error::InvalidSpec(
                "seed 0 is an absorbing state without zero insertion".into(),
            ));
        }
        Ok(())
    }

    /// One step of the plain register, without zero insertion.
    fn raw_step(&self, state: u8) -> u8 {
        match self.style {
            LfsrStyle::Galois => {
                let carry = state & 0x80 != 0;
                let shifted = state << 1;
                if carry {
                    shifted ^ self.taps
                } else {
                    shifted
                }
            }
            LfsrStyle::Fibonacci => {
                // coefficient of x^i taps register bit 7 - i
                let feedback = (state & self.taps.reverse_bits()).count_ones() as u8 & 1;
                (state << 1) | feedback
            }
        }
    }

    fn step(&self, state: u8) -> u8 {
        if self.zero_insert {
            match state {
                ZERO_PREDECESSOR => 0,
                0 => self.raw_step(ZERO_PREDECESSOR),
                s => self.raw_step(s),
            }
        } else {
            self.raw_step(state)
        }
    }
}

/// JSON form: `{"style": "galois", "taps_hex": "1d", "seed_hex": "01", "zero_insert": true}`.
#[derive(Serialize, Deserialize)]
struct LfsrSpecRepr {
    style: LfsrStyle,
    taps_hex: String,
    seed_hex: String,
    #[serde(default = "default_true")]
    zero_insert: bool,
}

fn default_true() -> bool {
    true
}

fn parse_hex_byte(s: &str) -> std::result::Result<u8, String> {
    let digits = s.trim_start_matches("0x").trim_start_matches("0X");
    u8::from_str_radix(digits, 16).map_err(|e| format!("bad hex byte {s:?}: {e}"))
}

impl TryFrom<LfsrSpecRepr> for LfsrSpec {
    type Error = String;

    fn try_from(r: LfsrSpecRepr) -> std::result::Result<Self, String> {
        let spec = LfsrSpec {
            style: r.style,
            taps: parse_hex_byte(&r.taps_hex)?,
            seed: parse_hex_byte(&r.seed_hex)?,
            zero_insert: r.zero_insert,
        };
        spec.validate().map_err(|e| e.to_string())?;
        Ok(spec)
    }
}

impl From<LfsrSpec> for LfsrSpecRepr {
    fn from(s: LfsrSpec) -> Self {
        LfsrSpecRepr {
            style: s.style,
            taps_hex: format!("{:02x}", s.taps),
            seed_hex: format!("{:02x}", s.seed),
            zero_insert: s.zero_insert,
        }
    }
}

/// Running generator. Copying a state forks an identical future.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrngState {
    spec: LfsrSpec,
    state: u8,
}

impl PrngState {
    pub fn new(spec: LfsrSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Self {
            spec,
            state: spec.seed,
        })
    }

    pub fn spec(&self) -> &LfsrSpec {
        &self.spec
    }

    pub fn register(&self) -> u8 {
        self.state
    }

    /// Advances the register and returns the new sample.
    pub fn next_sample(&mut self) -> u8 {
        self.state = self.spec.step(self.state);
        self.state
    }
}

impl Iterator for PrngState {
    type Item = u8;

    fn next(&mut self) -> Option<u8> {
        Some(self.next_sample())
    }
}

/// Pure-function form of a single step.
pub fn prng_next(state: PrngState) -> (PrngState, u8) {
    let mut next = state;
    let sample = next.next_sample();
    (next, sample)
}

/// First `n` samples drawn after the seed.
pub fn prng_sequence(spec: LfsrSpec, n: usize) -> Result<Vec<u8>> {
    Ok(PrngState::new(spec)?.take(n).collect())
}

/// Length of the cycle the seed's trajectory settles into.
pub fn period_check(spec: LfsrSpec) -> usize {
    let mut first_seen = [usize::MAX; 256];
    let mut state = spec.seed;
    let mut t = 0;
    loop {
        let seen = first_seen[state as usize];
        if seen != usize::MAX {
            return t - seen;
        }
        first_seen[state as usize] = t;
        state = spec.step(state);
        t += 1;
    }
}

/// The sixteen primitive polynomials of degree 8, as low-byte tap masks.
pub const PRIMITIVE_POLYNOMIALS: [u8; 16] = [
    0x1d, 0x2b, 0x2d, 0x4d, 0x5f, 0x63, 0x65, 0x69, 0x71, 0x87, 0x8d, 0xa9, 0xc3, 0xcf, 0xe7, 0xf5,
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub style: LfsrStyle,
    pub taps: u8,
}

impl CatalogEntry {
    pub const fn spec(&self, seed: u8) -> LfsrSpec {
        LfsrSpec::new(self.style, self.taps, seed)
    }
}

const fn build_catalog() -> [CatalogEntry; 32] {
    let mut out = [CatalogEntry {
        style: LfsrStyle::Galois,
        taps: 0,
    }; 32];
    let mut i = 0;
    while i < 16 {
        out[i] = CatalogEntry {
            style: LfsrStyle::Galois,
            taps: PRIMITIVE_POLYNOMIALS[i],
        };
        out[i + 16] = CatalogEntry {
            style: LfsrStyle::Fibonacci,
            taps: PRIMITIVE_POLYNOMIALS[i],
        };
        i += 1;
    }
    out
}

/// Maximal-length generators searched by seed optimization: every primitive
/// polynomial in Galois form (indices 0..16) then Fibonacci form (16..32).
pub const CATALOG: [CatalogEntry; 32] = build_catalog();
