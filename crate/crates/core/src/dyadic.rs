//! Exact dyadic rationals m / 2^e with arbitrary-precision numerators.
//!
//! Kept canonical: either `e == 0` or `m` is odd. All arithmetic is exact;
//! there is no rounding anywhere in this crate.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    m: BigInt,
    e: u32,
}

impl Dyadic {
    /// Builds m / 2^e and reduces to canonical form.
    pub fn new(m: impl Into<BigInt>, e: u32) -> Self {
        let mut m: BigInt = m.into();
        let mut e = e;
        if m.is_zero() {
            return Dyadic { m, e: 0 };
        }
        while e > 0 && m.is_even() {
            m >>= 1;
            e -= 1;
        }
        Dyadic { m, e }
    }

    pub fn zero() -> Self {
        Dyadic { m: BigInt::zero(), e: 0 }
    }

    pub fn one() -> Self {
        Dyadic { m: BigInt::one(), e: 0 }
    }

    /// 2^s for any integer s, negative exponents included.
    pub fn power_of_two(s: i64) -> Self {
        if s >= 0 {
            Dyadic { m: BigInt::one() << s as usize, e: 0 }
        } else {
            Dyadic { m: BigInt::one(), e: (-s) as u32 }
        }
    }

    pub fn numer(&self) -> &BigInt {
        &self.m
    }

    pub fn exp(&self) -> u32 {
        self.e
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.e == 0
    }

    pub fn is_positive(&self) -> bool {
        self.m.is_positive()
    }

    /// If this value is 2^s for some integer s, returns s.
    pub fn as_power_of_two(&self) -> Option<i64> {
        if !self.m.is_positive() {
            return None;
        }
        if self.e > 0 {
            // canonical => m odd; only 1/2^e qualifies
            if self.m.is_one() {
                Some(-(self.e as i64))
            } else {
                None
            }
        } else {
            let bits = self.m.bits();
            if self.m == BigInt::one() << (bits - 1) as usize {
                Some(bits as i64 - 1)
            } else {
                None
            }
        }
    }

    /// Exact quotient, defined only when the result is again dyadic.
    pub fn div_exact(&self, rhs: &Dyadic) -> Option<Dyadic> {
        if rhs.is_zero() {
            return None;
        }
        // (m1/2^e1) / (m2/2^e2) = (m1/m2) * 2^(e2-e1); strip 2s from m2 first
        let mut d = rhs.m.clone();
        let mut shift = rhs.e as i64;
        while d.is_even() {
            d >>= 1;
            shift -= 1;
        }
        let (q, r) = self.m.div_rem(&d);
        if !r.is_zero() {
            return None;
        }
        let e = self.e as i64 - shift;
        if e >= 0 {
            Some(Dyadic::new(q, e as u32))
        } else {
            Some(Dyadic::new(q << (-e) as usize, 0))
        }
    }

    /// Smallest integer >= self.
    pub fn ceil(&self) -> BigInt {
        if self.e == 0 {
            self.m.clone()
        } else {
            let den = BigInt::one() << self.e as usize;
            self.m.div_ceil(&den)
        }
    }

    /// Largest integer <= self.
    pub fn floor(&self) -> BigInt {
        if self.e == 0 {
            self.m.clone()
        } else {
            let den = BigInt::one() << self.e as usize;
            self.m.div_floor(&den)
        }
    }
}

impl From<i64> for Dyadic {
    fn from(v: i64) -> Self {
        Dyadic { m: BigInt::from(v), e: 0 }
    }
}

impl From<BigInt> for Dyadic {
    fn from(v: BigInt) -> Self {
        Dyadic { m: v, e: 0 }
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        let e = self.e.max(rhs.e);
        let a = &self.m << (e - self.e) as usize;
        let b = &rhs.m << (e - rhs.e) as usize;
        Dyadic::new(a + b, e)
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        let e = self.e.max(rhs.e);
        let a = &self.m << (e - self.e) as usize;
        let b = &rhs.m << (e - rhs.e) as usize;
        Dyadic::new(a - b, e)
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.m * &rhs.m, self.e + rhs.e)
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { m: -&self.m, e: self.e }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for Dyadic {
            type Output = Dyadic;
            fn $method(self, rhs: Dyadic) -> Dyadic {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { m: -self.m, e: self.e }
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.e.max(other.e);
        let a = &self.m << (e - self.e) as usize;
        let b = &other.m << (e - other.e) as usize;
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.e == 0 {
            write!(f, "{}", self.m)
        } else {
            write!(f, "{}/2^{}", self.m, self.e)
        }
    }
}
