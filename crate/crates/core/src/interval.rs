//! Closed intervals with exact rational endpoints, for bounding the
//! transcendental constants in the Eisenstein coefficient.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

/// Binary digits kept when a square root is bounded.
const SQRT_BITS: u32 = 128;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: BigRational,
    pub hi: BigRational,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl Interval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi, "empty interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn point(v: BigRational) -> Self {
        Interval { lo: v.clone(), hi: v }
    }

    pub fn from_int(v: i64) -> Self {
        Interval::point(BigRational::from_integer(v.into()))
    }

    pub fn one() -> Self {
        Interval::point(BigRational::one())
    }

    pub fn contains(&self, v: &BigRational) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn add(&self, o: &Interval) -> Interval {
        Interval::new(&self.lo + &o.lo, &self.hi + &o.hi)
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Interval::new(lo, hi)
    }

    pub fn scale(&self, k: &BigRational) -> Interval {
        self.mul(&Interval::point(k.clone()))
    }

    /// `1 / self` for an interval of positive numbers.
    pub fn recip(&self) -> Interval {
        assert!(self.lo.is_positive(), "reciprocal of a non-positive interval");
        Interval::new(self.hi.recip(), self.lo.recip())
    }

    pub fn pow(&self, e: u32) -> Interval {
        (0..e).fold(Interval::one(), |acc, _| acc.mul(self))
    }

    /// Square root of an interval of non-negative numbers, rounded outward.
    pub fn sqrt(&self) -> Interval {
        assert!(!self.lo.is_negative(), "square root of a negative interval");
        Interval::new(sqrt_below(&self.lo), sqrt_above(&self.hi))
    }

    /// `pi` to well over 60 digits.
    pub fn pi() -> Interval {
        let digits = "314159265358979323846264338327950288419716939937510582097494459";
        let num: BigInt = digits.parse().unwrap();
        let den = BigInt::from(10).pow(digits.len() as u32 - 1);
        let lo = BigRational::new(num.clone(), den.clone());
        let hi = BigRational::new(num + 1, den);
        Interval::new(lo, hi)
    }

    /// `Gamma(r / 2)` for a positive integer `r`.
    pub fn gamma_half(r: u32) -> Interval {
        assert!(r > 0);
        if r % 2 == 0 {
            let k = r / 2;
            let f: BigInt = (1..k).map(BigInt::from).product();
            return Interval::point(BigRational::from_integer(f));
        }
        // Gamma(k + 1/2) = (2k)! / (4^k k!) sqrt(pi)
        let k = (r - 1) / 2;
        let num: BigInt = (1..=2 * k).map(BigInt::from).product();
        let kf: BigInt = (1..=k).map(BigInt::from).product();
        let den = BigInt::from(4).pow(k) * kf;
        Interval::pi().sqrt().scale(&BigRational::new(num, den))
    }

    /// `x^{r/2}` for an interval of non-negative `x`.
    pub fn pow_half(&self, r: u32) -> Interval {
        let whole = self.pow(r / 2);
        if r % 2 == 0 {
            whole
        } else {
            whole.mul(&self.sqrt())
        }
    }

    /// Endpoints as floats, nudged outward so the float interval still
    /// contains the exact one.
    pub fn to_f64_outward(&self) -> (f64, f64) {
        let nudge = |v: &BigRational, up: bool| {
            let f = v.to_f64().unwrap();
            let eps = f.abs() * 4.0 * f64::EPSILON + f64::MIN_POSITIVE;
            if up {
                f + eps
            } else {
                f - eps
            }
        };
        (nudge(&self.lo, false), nudge(&self.hi, true))
    }
}

fn scaled_isqrt(q: &BigRational) -> (BigInt, BigInt) {
    // sqrt(a/b) = sqrt(a b) / b; keep SQRT_BITS fractional bits
    let s = BigInt::one() << SQRT_BITS;
    let radicand = q.numer() * q.denom() * &s * &s;
    (radicand.sqrt(), q.denom() * s)
}

fn sqrt_below(q: &BigRational) -> BigRational {
    if q.is_zero() {
        return BigRational::zero();
    }
    let (r, d) = scaled_isqrt(q);
    BigRational::new(r, d)
}

fn sqrt_above(q: &BigRational) -> BigRational {
    if q.is_zero() {
        return BigRational::zero();
    }
    let (r, d) = scaled_isqrt(q);
    let exact = BigRational::new(r.clone(), d.clone());
    if &exact * &exact == *q {
        exact
    } else {
        BigRational::new(r + 1, d)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (lo, hi) = self.to_f64_outward();
        write!(f, "[{lo:.6e}, {hi:.6e}]")
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let (lo, hi) = self.to_f64_outward();
        [lo, hi].serialize(s)
    }
}

/// Bounds `Π_{p > cutoff} (1 ± p^{-2})` using `Σ_{k > P} k^{-2} < 1/P`:
/// the product lies in `[1 - 1/P, 1/(1 - 1/P)]`.
pub fn good_prime_tail(cutoff: u64) -> Interval {
    assert!(cutoff >= 2);
    let c = cutoff as i64;
    Interval::new(rat(c - 1, c), rat(c, c - 1))
}
