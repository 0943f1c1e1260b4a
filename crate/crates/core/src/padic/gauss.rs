//! Closed forms of the one- and two-variable Gauss integrals
//! `∫_{Z_p} e_p(sigma (b x^2 + c x)) dx` and the two dyadic block analogues.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::{check_prime, kronecker_two, legendre_rational, ord, ord_i, Ext};
use crate::arith::{mod_inverse, split_int};
use crate::error::{Error, Result};

/// A Gauss integral value: either zero or `e^{2 pi i turns} * p^{exponent2 / 2}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum GaussFactor {
    Zero,
    Value {
        /// Phase as a fraction of a full turn, reduced into `[0, 1)`.
        #[serde(serialize_with = "ser_rat")]
        turns: BigRational,
        /// Twice the exponent of `p`.
        exponent2: i64,
    },
}

fn ser_rat<S: serde::Serializer>(q: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

fn reduce_turns(q: BigRational) -> BigRational {
    let f = q.floor();
    q - f
}

impl GaussFactor {
    pub fn one() -> Self {
        GaussFactor::Value { turns: BigRational::zero(), exponent2: 0 }
    }

    fn value(turns: BigRational, exponent2: i64) -> Self {
        GaussFactor::Value { turns: reduce_turns(turns), exponent2 }
    }

    /// Floating-point `(re, im)` of the factor at the prime `p`.
    pub fn approx(&self, p: u64) -> (f64, f64) {
        match self {
            GaussFactor::Zero => (0.0, 0.0),
            GaussFactor::Value { turns, exponent2 } => {
                let modulus = (p as f64).powf(*exponent2 as f64 / 2.0);
                let angle = 2.0 * PI * turns.to_f64().unwrap();
                (modulus * angle.cos(), modulus * angle.sin())
            }
        }
    }
}

/// The `p`-adic fractional part of a rational, as a rational in `[0, 1)`.
pub fn frac_p(x: &BigRational, p: u64) -> BigRational {
    let v = match ord(x, p) {
        Ext::Inf => return BigRational::zero(),
        Ext::Fin(v) if v >= 0 => return BigRational::zero(),
        Ext::Fin(v) => v,
    };
    let pk = BigInt::from(p).pow((-v) as u32);
    // x = a / (p^k d) with d prime to p
    let d = x.denom() / &pk;
    let inv = mod_inverse(&d.mod_floor(&pk), &pk).expect("unit denominator");
    let r = (x.numer() * inv).mod_floor(&pk);
    BigRational::new(r, pk)
}

/// Turns of `e_p(x) = e^{-2 pi i frac_p(x)}`, in `[0, 1)`.
pub fn e_p_turns(x: &BigRational, p: u64) -> BigRational {
    reduce_turns(-frac_p(x, p))
}

fn split_sigma(sigma: &BigRational, p: u64) -> Result<(i64, BigRational)> {
    if sigma.is_zero() {
        return Err(Error::Domain("sigma must be nonzero".into()));
    }
    let t = ord(sigma, p).finite().unwrap();
    Ok((t, sigma / crate::arith::pow_rat(p, t)))
}

fn quarter_turns(k: i64) -> BigRational {
    BigRational::new(BigInt::from(k), BigInt::from(4))
}

/// `G_p(sigma; b, c) = ∫_{Z_p} e_p(sigma (b x^2 + c x)) dx`.
pub fn gauss_factor(sigma: &BigRational, b: &BigInt, c: &BigInt, p: u64) -> Result<GaussFactor> {
    check_prime(p)?;
    let (t, u) = split_sigma(sigma, p)?;
    let (ob, oc) = (ord_i(b, p), ord_i(c, p));
    let small_t = match ob.min(oc) {
        Ext::Inf => return Ok(GaussFactor::one()),
        Ext::Fin(v) => v,
    };
    let s = t + small_t;
    if s >= 0 {
        return Ok(GaussFactor::one());
    }
    if p == 2 {
        if ob > oc {
            return Ok(GaussFactor::Zero);
        }
        if ob == oc {
            return Ok(if s == -1 { GaussFactor::one() } else { GaussFactor::Zero });
        }
        if s == -1 {
            return Ok(GaussFactor::Zero);
        }
        let (_, ub) = split_int(b, 2);
        let uub = &u * BigRational::from_integer(ub);
        let arg = &uub / BigRational::from_integer(8.into())
            - sigma * BigRational::new(c * c, b * 4);
        let mut turns = e_p_turns(&arg, 2);
        if (1 + s) % 2 != 0 && kronecker_two(&uub) < 0 {
            turns += BigRational::new(1.into(), 2.into());
        }
        return Ok(GaussFactor::value(turns, 1 + s));
    }
    if ob > oc {
        return Ok(GaussFactor::Zero);
    }
    let arg = -(sigma * BigRational::new(c * c, b * 4));
    let mut turns = e_p_turns(&arg, p);
    // gamma_p(sigma b): trivial for an even valuation, eps^3 (unit/p) for odd
    if s % 2 != 0 {
        let (_, ub) = split_int(b, p);
        let unit = &u * BigRational::from_integer(ub);
        if p % 4 == 3 {
            turns += quarter_turns(3);
        }
        if legendre_rational(&unit, p)? < 0 {
            turns += quarter_turns(2);
        }
    }
    Ok(GaussFactor::value(turns, s))
}

fn block_common(
    sigma: &BigRational,
    b: &BigInt,
    c: &BigInt,
    d: &BigInt,
    p: u64,
) -> Result<std::result::Result<i64, GaussFactor>> {
    check_prime(p)?;
    let (t, _) = split_sigma(sigma, p)?;
    let ob = ord_i(b, p);
    let lin = ord_i(c, p).min(ord_i(d, p));
    let small_t = match ob.min(lin) {
        Ext::Inf => return Ok(Err(GaussFactor::one())),
        Ext::Fin(v) => v,
    };
    let s = t + small_t;
    if s >= 0 {
        return Ok(Err(GaussFactor::one()));
    }
    if ob > lin {
        return Ok(Err(GaussFactor::Zero));
    }
    Ok(Ok(s))
}

/// `G'(sigma; b, c, d) = ∫_{Z_p^2} e_p(sigma (b y1 y2 + c y1 + d y2)) dy`.
pub fn gauss_factor_hyperbolic(
    sigma: &BigRational,
    b: &BigInt,
    c: &BigInt,
    d: &BigInt,
    p: u64,
) -> Result<GaussFactor> {
    let s = match block_common(sigma, b, c, d, p)? {
        Ok(s) => s,
        Err(g) => return Ok(g),
    };
    let arg = -(sigma * BigRational::new(c * d, b.clone()));
    Ok(GaussFactor::value(e_p_turns(&arg, p), 2 * s))
}

/// `G''(sigma; b, c, d) = ∫_{Z_p^2} e_p(sigma (b (z1^2 + z1 z2 + z2^2) + c z1 + d z2)) dz`.
pub fn gauss_factor_anisotropic(
    sigma: &BigRational,
    b: &BigInt,
    c: &BigInt,
    d: &BigInt,
    p: u64,
) -> Result<GaussFactor> {
    let s = match block_common(sigma, b, c, d, p)? {
        Ok(s) => s,
        Err(g) => return Ok(g),
    };
    // completing the square leaves the constant -(c^2 + d^2 - cd) / (3b)
    let arg = -(sigma * BigRational::new(c * c + d * d - c * d, b * 3));
    let mut turns = e_p_turns(&arg, p);
    if s % 2 != 0 {
        turns += BigRational::new(BigInt::one(), 2.into());
    }
    Ok(GaussFactor::value(turns, 2 * s))
}
