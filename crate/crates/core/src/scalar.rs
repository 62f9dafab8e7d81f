//! Coefficient fields.
//!
//! Everything above this module is written against [`Field`], so the same
//! polynomial and elimination code runs over the rationals (exact results)
//! and over a word-sized prime field (fast certificates).

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Zero};

/// A commutative field with exact arithmetic.
pub trait Field:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + FromPrimitive
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    /// Image of an integer under the canonical ring map.
    fn from_bigint(n: &BigInt) -> Self;

    fn inverse(&self) -> Self {
        Self::one() / self.clone()
    }
}

impl Field for BigRational {
    fn from_bigint(n: &BigInt) -> Self {
        BigRational::from_integer(n.clone())
    }
}

/// The Mersenne prime 2^61 - 1.
pub const MODULUS: u64 = (1 << 61) - 1;

/// Element of the prime field of order [`MODULUS`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ModP(u64);

impl ModP {
    pub fn new(v: u64) -> Self {
        ModP(v % MODULUS)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    #[inline]
    fn reduce(x: u128) -> u64 {
        // 2^61 = 1 (mod p), so fold the high bits onto the low ones.
        let lo = (x as u64) & MODULUS;
        let hi = (x >> 61) as u64;
        let s = lo + hi;
        let s = (s & MODULUS) + (s >> 61);
        if s >= MODULUS {
            s - MODULUS
        } else {
            s
        }
    }

    pub fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = ModP(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }
}

impl fmt::Debug for ModP {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for ModP {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Add for ModP {
    type Output = ModP;
    #[inline]
    fn add(self, rhs: ModP) -> ModP {
        let s = self.0 + rhs.0;
        ModP(if s >= MODULUS { s - MODULUS } else { s })
    }
}

impl Sub for ModP {
    type Output = ModP;
    #[inline]
    fn sub(self, rhs: ModP) -> ModP {
        ModP(if self.0 >= rhs.0 {
            self.0 - rhs.0
        } else {
            self.0 + MODULUS - rhs.0
        })
    }
}

impl Mul for ModP {
    type Output = ModP;
    #[inline]
    fn mul(self, rhs: ModP) -> ModP {
        ModP(Self::reduce(self.0 as u128 * rhs.0 as u128))
    }
}

impl Neg for ModP {
    type Output = ModP;
    fn neg(self) -> ModP {
        ModP(if self.0 == 0 { 0 } else { MODULUS - self.0 })
    }
}

impl Div for ModP {
    type Output = ModP;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: ModP) -> ModP {
        assert!(rhs.0 != 0, "division by zero in prime field");
        self * rhs.pow(MODULUS - 2)
    }
}

impl Zero for ModP {
    fn zero() -> Self {
        ModP(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl One for ModP {
    fn one() -> Self {
        ModP(1)
    }
}

impl FromPrimitive for ModP {
    fn from_i64(n: i64) -> Option<Self> {
        let r = n.rem_euclid(MODULUS as i64);
        Some(ModP(r as u64))
    }
    fn from_u64(n: u64) -> Option<Self> {
        Some(ModP::new(n))
    }
}

impl Field for ModP {
    fn from_bigint(n: &BigInt) -> Self {
        let m = BigInt::from(MODULUS);
        let r = ((n % &m) + &m) % &m;
        let (_, digits) = r.to_u64_digits();
        ModP(digits.first().copied().unwrap_or(0))
    }

    fn inverse(&self) -> Self {
        assert!(self.0 != 0, "inverse of zero in prime field");
        self.pow(MODULUS - 2)
    }
}
