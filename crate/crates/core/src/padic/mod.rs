//! Closed forms for the local density integrals
//! `I_p(n; phi) = ∫_{Q_p} ∫_{Z_p^r} e_p(sigma (phi(x) - n)) dx dsigma`
//! of a quadratic polynomial `phi`, for odd primes and for `p = 2`.
//!
//! Everything is exact: valuations and unit residues are read off rationals,
//! and the half-integral powers of `p` produced by the Gauss sums are carried
//! as doubled exponents until they cancel.

mod density;
mod gauss;
mod profile;
mod quadratic;

pub use density::{local_density, local_density_dyadic, local_density_odd, AssembledTerm, DensityValue, TermKind};
pub use gauss::{
    e_p_turns, gauss_factor, gauss_factor_anisotropic, gauss_factor_hyperbolic, GaussFactor,
};
pub use profile::{profile, BlockProfile, DensityProfile, DiagonalProfile, IndexClass};
pub use quadratic::{BlockTerm, DiagonalTerm, QuadraticPolynomial};

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::arith::{is_prime, ord_rat};
use crate::error::{Error, Result};

/// An integer or the formal symbol `+infinity` (`t <= inf`, `t + inf = inf`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ext {
    Fin(i64),
    Inf,
}

impl Ext {
    pub fn from_opt(v: Option<i64>) -> Self {
        v.map_or(Ext::Inf, Ext::Fin)
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            Ext::Fin(v) => Some(v),
            Ext::Inf => None,
        }
    }

    pub fn plus(self, k: i64) -> Ext {
        match self {
            Ext::Fin(v) => Ext::Fin(v + k),
            Ext::Inf => Ext::Inf,
        }
    }

    /// Minimum of an iterator; the empty minimum is `Inf`.
    pub fn min_of<I: IntoIterator<Item = Ext>>(it: I) -> Ext {
        it.into_iter().fold(Ext::Inf, std::cmp::min)
    }
}

impl PartialOrd for Ext {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ext {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Ext::Fin(a), Ext::Fin(b)) => a.cmp(b),
            (Ext::Fin(_), Ext::Inf) => Ordering::Less,
            (Ext::Inf, Ext::Fin(_)) => Ordering::Greater,
            (Ext::Inf, Ext::Inf) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::Fin(v) => write!(f, "{v}"),
            Ext::Inf => write!(f, "inf"),
        }
    }
}

impl Serialize for Ext {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Ext::Fin(v) => s.serialize_i64(*v),
            Ext::Inf => s.serialize_none(),
        }
    }
}

/// `ord_p` of a rational as an [`Ext`].
pub fn ord(q: &BigRational, p: u64) -> Ext {
    Ext::from_opt(ord_rat(q, p))
}

pub(crate) fn ord_i(n: &BigInt, p: u64) -> Ext {
    Ext::from_opt(crate::arith::ord_int(n, p))
}

pub(crate) fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// Legendre symbol `(a/p)` for an odd prime `p`.
pub fn legendre_symbol(a: &BigInt, p: u64) -> Result<i8> {
    check_prime(p)?;
    if p == 2 {
        return Err(Error::Domain("Legendre symbol needs an odd prime".into()));
    }
    let pb = BigInt::from(p);
    let r = a.mod_floor(&pb);
    if r.is_zero() {
        return Ok(0);
    }
    let e = r.modpow(&BigInt::from((p - 1) / 2), &pb);
    Ok(if e == BigInt::from(1) { 1 } else { -1 })
}

/// `(x/p)` for a rational `x` that is a `p`-adic unit (0 otherwise).
pub fn legendre_rational(x: &BigRational, p: u64) -> Result<i8> {
    Ok(legendre_symbol(x.numer(), p)? * legendre_symbol(x.denom(), p)?)
}

/// The extension of `(2/.)` to `Q_2`: the Hilbert symbol `(2, x)_2` on
/// 2-adic units, which is `+1` iff `x ≡ ±1 (mod 8)`, and `0` off the units.
pub fn kronecker_two(x: &BigRational) -> i8 {
    if x.is_zero() || ord_rat(x, 2) != Some(0) {
        return 0;
    }
    // an odd denominator is its own inverse modulo 8
    let r = (x.numer() * x.denom()).mod_floor(&BigInt::from(8)).to_u8().unwrap();
    if r == 1 || r == 7 {
        1
    } else {
        -1
    }
}
