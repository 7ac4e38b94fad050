//! Exact shrink factors for the region search and the dyadic rationals they
//! multiply.
//!
//! A [`LadderValue`] is either `2^(2^k)` (tower phase) or `1 + 2^-j`
//! (fraction phase). Stepping down the ladder takes an exact square root in
//! the tower phase and an over-approximate one in the fraction phase, so
//! `step(v)^2 >= v` always holds and no irrational arithmetic is needed.

use std::fmt;

use bnum::types::U1024;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest tower exponent whose value `2^(2^k)` fits the arithmetic here.
pub const MAX_TOWER_EXPONENT: u32 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "phase", content = "index", rename_all = "lowercase")]
pub enum LadderValue {
    /// `2^(2^k)`.
    Tower(u32),
    /// `1 + 2^-j`, `j >= 1`.
    Fraction(u32),
}

impl LadderValue {
    /// The next factor down: exact square root on the tower, then the
    /// `1 + 2^-j` sequence once the value reaches 2.
    pub fn step(self) -> LadderValue {
        match self {
            LadderValue::Tower(0) => LadderValue::Fraction(1),
            LadderValue::Tower(k) => LadderValue::Tower(k - 1),
            LadderValue::Fraction(j) => LadderValue::Fraction(j + 1),
        }
    }

    /// Squares a tower value. Fraction values are never squared.
    pub fn square(self) -> Option<LadderValue> {
        match self {
            LadderValue::Tower(k) if k < MAX_TOWER_EXPONENT => Some(LadderValue::Tower(k + 1)),
            _ => None,
        }
    }

    /// Value as `(numerator, log2 denominator)`.
    pub fn as_dyadic_parts(self) -> (u128, u32) {
        match self {
            LadderValue::Tower(k) => (1u128 << (1u32 << k), 0),
            LadderValue::Fraction(j) => ((1u128 << j) + 1, j),
        }
    }

    /// Nearest binary64 value, for display only.
    pub fn to_f64(self) -> f64 {
        match self {
            LadderValue::Tower(k) => 2f64.powi(1 << k),
            LadderValue::Fraction(j) => 1.0 + pow2(-(j as i32)),
        }
    }

    /// Exact test of `value >= 1 + delta` for a binary64 `delta` in `(0, 1)`.
    pub fn at_least_one_plus(self, delta: f64) -> bool {
        match self {
            LadderValue::Tower(_) => true,
            // 2^-j >= delta  <=>  delta * 2^j <= 1; scaling by 2^j is exact.
            LadderValue::Fraction(j) => delta * pow2(j as i32) <= 1.0,
        }
    }
}

impl fmt::Display for LadderValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LadderValue::Tower(k) => write!(f, "2^(2^{k})"),
            LadderValue::Fraction(j) => write!(f, "1+2^-{j}"),
        }
    }
}

fn pow2(e: i32) -> f64 {
    debug_assert!((-1022..=1023).contains(&e));
    f64::from_bits(((1023 + e) as u64) << 52)
}

/// A nonnegative dyadic rational `mantissa / 2^shift`, exact.
///
/// Mantissas that fit in 128 bits stay in a `u128`; wider ones spill into a
/// 1024-bit integer. The representation is canonical, so `==` is value
/// equality.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct Dyadic {
    mantissa: Mantissa,
    shift: u32,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mantissa {
    Narrow(u128),
    Wide(U1024),
}

impl Mantissa {
    fn wide(self) -> U1024 {
        match self {
            Mantissa::Narrow(v) => U1024::try_from(v).expect("u128 fits in 1024 bits"),
            Mantissa::Wide(v) => v,
        }
    }

    fn bit_width(self) -> u32 {
        match self {
            Mantissa::Narrow(v) => 128 - v.leading_zeros(),
            Mantissa::Wide(v) => v.bit_width(),
        }
    }

    fn trailing_zeros(self) -> u32 {
        match self {
            Mantissa::Narrow(0) => 0,
            Mantissa::Narrow(v) => v.trailing_zeros(),
            Mantissa::Wide(v) if v.is_zero() => 0,
            Mantissa::Wide(v) => v.trailing_zeros(),
        }
    }

    fn shr(self, s: u32) -> Mantissa {
        match self {
            Mantissa::Narrow(v) => Mantissa::Narrow(v.checked_shr(s).unwrap_or(0)),
            Mantissa::Wide(v) => Mantissa::Wide(v >> s).demoted(),
        }
    }

    /// `self * (2^s + add_self)`, given the caller checked the width.
    fn shl_add(self, s: u32, add_self: bool) -> Mantissa {
        let width = self.bit_width() + s + u32::from(add_self);
        match self {
            Mantissa::Narrow(v) if width <= 128 => {
                Mantissa::Narrow((v << s) + if add_self { v } else { 0 })
            }
            _ => {
                let w = self.wide();
                Mantissa::Wide((w << s) + if add_self { w } else { U1024::try_from(0u8).unwrap() })
                    .demoted()
            }
        }
    }

    fn demoted(self) -> Mantissa {
        match self {
            Mantissa::Wide(v) => match u128::try_from(v) {
                Ok(n) => Mantissa::Narrow(n),
                Err(_) => self,
            },
            narrow => narrow,
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dyadic({} / 2^{})", self.mantissa.wide(), self.shift)
    }
}

impl Dyadic {
    pub fn from_int(v: u128) -> Self {
        Dyadic {
            mantissa: Mantissa::Narrow(v),
            shift: 0,
        }
    }

    pub fn from_ladder(v: LadderValue) -> Self {
        let (num, shift) = v.as_dyadic_parts();
        Dyadic {
            mantissa: Mantissa::Narrow(num),
            shift,
        }
        .normalized()
    }

    /// `self * factor`, failing rather than losing bits.
    pub fn mul_ladder(&self, factor: LadderValue) -> Result<Dyadic> {
        let width = self.mantissa.bit_width();
        let (s, add_self, extra_shift) = match factor {
            LadderValue::Tower(k) => (1u32 << k, false, 0),
            // mantissa * (2^j + 1) / 2^(shift + j)
            LadderValue::Fraction(j) => (j, true, j),
        };
        if width + s + u32::from(add_self) > U1024::BITS {
            return Err(Error::Parameter("dyadic product exceeds 1024 bits".into()));
        }
        Ok(Dyadic {
            mantissa: self.mantissa.shl_add(s, add_self),
            shift: self.shift + extra_shift,
        }
        .normalized())
    }

    fn normalized(self) -> Dyadic {
        if self.shift == 0 {
            return self;
        }
        let tz = self.mantissa.trailing_zeros().min(self.shift);
        if tz == 0 {
            return self;
        }
        Dyadic {
            mantissa: self.mantissa.shr(tz),
            shift: self.shift - tz,
        }
    }

    /// `floor(self)`; `None` if it exceeds `u128`.
    pub fn floor(&self) -> Option<u128> {
        match self.mantissa.shr(self.shift) {
            Mantissa::Narrow(v) => Some(v),
            Mantissa::Wide(_) => None,
        }
    }

    /// `ceil(self)`; `None` if it exceeds `u128`.
    pub fn ceil(&self) -> Option<u128> {
        let floor = self.floor()?;
        if self.is_integer() {
            Some(floor)
        } else {
            floor.checked_add(1)
        }
    }

    /// Canonical form leaves a nonzero shift only on odd mantissas.
    pub fn is_integer(&self) -> bool {
        self.shift == 0 || self.mantissa.bit_width() == 0
    }

    pub fn shift(&self) -> u32 {
        self.shift
    }

    /// Little-endian 64-bit limbs of the mantissa, trailing zero limbs
    /// dropped.
    pub fn mantissa_limbs(&self) -> Vec<u64> {
        let mut limbs = Vec::new();
        let mut rest = self.mantissa.wide();
        let mask = U1024::try_from(u64::MAX).unwrap();
        while !rest.is_zero() {
            limbs.push(u64::try_from(rest & mask).unwrap());
            rest = rest >> 64u32;
        }
        limbs
    }

    pub fn to_f64(&self) -> f64 {
        let mut acc = 0.0;
        for (i, limb) in self.mantissa_limbs().iter().enumerate() {
            acc += *limb as f64 * 2f64.powi(64 * i as i32);
        }
        acc / 2f64.powi(self.shift as i32)
    }
}
