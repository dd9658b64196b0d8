//! Exact dyadic rationals `n / 2^k`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

/// `numer / 2^shift`, kept reduced: either `shift == 0` or `numer` is odd.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Dyadic {
    numer: BigInt,
    shift: u64,
}

impl Dyadic {
    pub fn new(numer: impl Into<BigInt>, shift: u64) -> Self {
        let mut d = Dyadic { numer: numer.into(), shift };
        d.reduce();
        d
    }

    pub fn zero() -> Self {
        Dyadic::default()
    }

    pub fn one() -> Self {
        Dyadic::from_int(1)
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Dyadic { numer: n.into(), shift: 0 }
    }

    /// `2^e` for any signed exponent.
    pub fn pow2(e: i64) -> Self {
        if e >= 0 {
            Dyadic { numer: BigInt::one() << e as u64, shift: 0 }
        } else {
            Dyadic { numer: BigInt::one(), shift: e.unsigned_abs() }
        }
    }

    fn reduce(&mut self) {
        if self.numer.is_zero() {
            self.shift = 0;
            return;
        }
        let tz = self.numer.trailing_zeros().unwrap_or(0).min(self.shift);
        if tz > 0 {
            self.numer >>= tz;
            self.shift -= tz;
        }
    }

    pub fn numer(&self) -> &BigInt {
        &self.numer
    }

    /// Exponent `k` of the reduced denominator `2^k`.
    pub fn shift(&self) -> u64 {
        self.shift
    }

    pub fn is_zero(&self) -> bool {
        self.numer.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.shift == 0
    }

    pub fn is_negative(&self) -> bool {
        self.numer.is_negative()
    }

    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.numer.clone())
    }

    pub fn to_biguint(&self) -> Option<BigUint> {
        self.to_integer().and_then(|n| n.to_biguint())
    }

    /// `self * 2^e`.
    pub fn mul_pow2(&self, e: i64) -> Self {
        if e >= 0 {
            let e = e as u64;
            if e >= self.shift {
                Dyadic { numer: &self.numer << (e - self.shift), shift: 0 }
            } else {
                Dyadic::new(self.numer.clone(), self.shift - e)
            }
        } else {
            Dyadic::new(self.numer.clone(), self.shift + e.unsigned_abs())
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        Dyadic::new(num_traits::pow(self.numer.clone(), k as usize), self.shift * k as u64)
    }

    /// `self * 2^k` as an integer if it is one.
    pub fn scaled_integer(&self, k: u64) -> Option<BigInt> {
        self.mul_pow2(k as i64).to_integer()
    }

    /// Lossy, for display only.
    pub fn to_f64(&self) -> f64 {
        let n = self.numer.to_f64().unwrap_or(f64::NAN);
        n / 2f64.powi(self.shift as i32)
    }

    fn aligned(a: &Dyadic, b: &Dyadic) -> (BigInt, BigInt, u64) {
        let k = a.shift.max(b.shift);
        (&a.numer << (k - a.shift), &b.numer << (k - b.shift), k)
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        let (a, b, k) = Dyadic::aligned(self, rhs);
        Dyadic::new(a + b, k)
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        let (a, b, k) = Dyadic::aligned(self, rhs);
        Dyadic::new(a - b, k)
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.numer * &rhs.numer, self.shift + rhs.shift)
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { numer: -&self.numer, shift: self.shift }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for Dyadic {
            type Output = Dyadic;
            fn $f(self, rhs: Dyadic) -> Dyadic {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = Dyadic::aligned(self, other);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<i64> for Dyadic {
    fn from(n: i64) -> Self {
        Dyadic::from_int(n)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.shift == 0 {
            write!(f, "{}", self.numer)
        } else {
            write!(f, "{}/{}", self.numer, BigUint::one() << self.shift)
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl std::str::FromStr for Dyadic {
    type Err = crate::Error;

    /// Accepts `n` or `n/2^k` written as `n/d` with `d` a power of two.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || crate::Error::Parse(format!("not a dyadic rational: {s:?}"));
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let n: BigInt = n.parse().map_err(|_| bad())?;
        let d: BigUint = d.parse().map_err(|_| bad())?;
        if d.is_zero() || d.count_ones() != 1 {
            return Err(bad());
        }
        Ok(Dyadic::new(n, d.trailing_zeros().unwrap_or(0)))
    }
}

/// Serialized as the string `"n/d"`.
impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    #[test]
    fn reduces() {
        assert_eq!(Dyadic::new(4, 3), q("1/2"));
        assert_eq!(Dyadic::new(0, 7).shift(), 0);
        assert_eq!(Dyadic::new(-6, 1), Dyadic::from_int(-3));
    }

    #[test]
    fn arithmetic() {
        let a = q("3/4");
        assert_eq!(&a * &a * a.clone(), q("27/64"));
        assert_eq!(Dyadic::one() - q("27/64"), q("37/64"));
        assert_eq!(Dyadic::pow2(2) * q("37/64"), q("37/16"));
        assert_eq!(q("37/16").to_string(), "37/16");
        assert_eq!(q("1/2") + q("1/2"), Dyadic::one());
        assert_eq!(a.pow(3), q("27/64"));
        assert_eq!(Dyadic::pow2(-3), q("1/8"));
        assert_eq!(q("5/2").mul_pow2(3), Dyadic::from_int(20));
        assert_eq!(q("5").mul_pow2(-2), q("5/4"));
    }

    #[test]
    fn ordering() {
        assert!(q("37/16") < q("5/2"));
        assert!(q("2") <= q("37/16"));
        assert!(q("-1/2") < Dyadic::zero());
    }

    #[test]
    fn parse_rejects_non_dyadic() {
        assert!("1/3".parse::<Dyadic>().is_err());
        assert!("x".parse::<Dyadic>().is_err());
    }
}
