//! Assembly of the local density from its profile.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::Serialize;

use super::{kronecker_two, legendre_rational, legendre_symbol, ord, profile, DensityProfile, Ext, QuadraticPolynomial};
use crate::arith::pow_rat;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TermKind {
    /// A summand of the level sum over `t`.
    Bulk,
    /// The odd-prime boundary term at `t = t_n + 1`.
    Boundary,
}

#[derive(Clone, Debug, Serialize)]
pub struct AssembledTerm {
    pub t: i64,
    pub kind: TermKind,
    /// Real sign after merging all phases: `-1`, `0` or `1`.
    pub sign: i8,
    /// Net integral exponent of `p` after the half powers cancel.
    pub exponent: i64,
    #[serde(serialize_with = "ser_rat")]
    pub contribution: BigRational,
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityValue {
    #[serde(serialize_with = "ser_rat")]
    pub value: BigRational,
    pub prime: u64,
    pub assembled_terms: Vec<AssembledTerm>,
}

fn ser_rat<S: serde::Serializer>(q: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

/// A unit complex number `i^k`, tracked modulo 4.
#[derive(Clone, Copy, Debug, Default)]
struct Phase(u8);

impl Phase {
    fn times_i(self, k: usize) -> Phase {
        Phase(((self.0 as usize + k) % 4) as u8)
    }

    fn times_sign(self, s: i8) -> Phase {
        if s < 0 {
            self.times_i(2)
        } else {
            self
        }
    }

    fn real_sign(self) -> Result<i8> {
        match self.0 {
            0 => Ok(1),
            2 => Ok(-1),
            _ => Err(Error::Consistency("non-real phase in an assembled term".into())),
        }
    }
}

fn half(exponent2: i64) -> Result<i64> {
    if exponent2 % 2 != 0 {
        return Err(Error::Consistency("half-integral power of p survived assembly".into()));
    }
    Ok(exponent2 / 2)
}

fn finish(value: BigRational, prime: u64, assembled_terms: Vec<AssembledTerm>) -> Result<DensityValue> {
    if value.is_negative() {
        return Err(Error::Consistency(format!("negative local density {value} at p = {prime}")));
    }
    Ok(DensityValue { value, prime, assembled_terms })
}

/// `I_p(n; phi)` for the prime `p`, choosing the odd or dyadic formula.
pub fn local_density(phi: &QuadraticPolynomial, n: &BigInt, p: u64) -> Result<DensityValue> {
    if p == 2 {
        local_density_dyadic(phi, n)
    } else {
        local_density_odd(phi, n, p)
    }
}

/// `epsilon_p^{3 ell} Π_{L_p(t)} (u_i / p)` as a phase.
fn delta_odd(pr: &DensityProfile, t: i64) -> Result<(Phase, usize)> {
    let p = pr.prime;
    let lag = pr.odd_lag_indices(t);
    let mut phase = Phase::default();
    if p % 4 == 3 {
        phase = phase.times_i(3 * lag.len());
    }
    for &i in &lag {
        phase = phase.times_sign(legendre_symbol(pr.diagonal[i].unit.as_ref().unwrap(), p)?);
    }
    Ok((phase, lag.len()))
}

pub fn local_density_odd(phi: &QuadraticPolynomial, n: &BigInt, p: u64) -> Result<DensityValue> {
    if p == 2 {
        return Err(Error::Domain("the odd-prime formula needs p > 2".into()));
    }
    let pr = profile(phi, n, p)?;
    if pr.t_d == Ext::Inf && pr.t_n == Ext::Inf {
        return Err(Error::ZeroTargetUnbounded);
    }
    let upper = pr.t_d.min(pr.t_n).finite().unwrap();
    let damp = BigRational::one() - pow_rat(p, -1);
    let mut value = BigRational::one();
    let mut terms = Vec::new();
    for t in 1..=upper {
        let (phase, ell) = delta_odd(&pr, t)?;
        if ell % 2 != 0 {
            continue;
        }
        let sign = phase.real_sign()?;
        let exponent = half(pr.tau_twice_odd(t))?;
        let contribution = &damp * pow_rat(p, exponent) * BigInt::from(sign);
        value += &contribution;
        terms.push(AssembledTerm { t, kind: TermKind::Bulk, sign, exponent, contribution });
    }
    if let (Ext::Fin(tn), true) = (pr.t_n, pr.t_n < pr.t_d) {
        let t = tn + 1;
        let (mut phase, ell) = delta_odd(&pr, t)?;
        let tau2 = pr.tau_twice_odd(t);
        let exponent2 = if ell % 2 == 0 {
            // omega = -1/p
            phase = phase.times_i(2);
            tau2 - 2
        } else {
            // omega = eps (u_n/p) / sqrt p
            if p % 4 == 3 {
                phase = phase.times_i(1);
            }
            phase = phase.times_sign(legendre_rational(pr.target_unit.as_ref().unwrap(), p)?);
            tau2 - 1
        };
        let sign = phase.real_sign()?;
        let exponent = half(exponent2)?;
        let contribution = pow_rat(p, exponent) * BigInt::from(sign);
        value += &contribution;
        terms.push(AssembledTerm { t, kind: TermKind::Boundary, sign, exponent, contribution });
    }
    finish(value, p, terms)
}

pub fn local_density_dyadic(phi: &QuadraticPolynomial, n: &BigInt) -> Result<DensityValue> {
    let pr = profile(phi, n, 2)?;
    if pr.t_d == Ext::Inf && pr.t_n == Ext::Inf {
        return Err(Error::ZeroTargetUnbounded);
    }
    let upper = pr.t_d.min(pr.t_n.plus(3)).finite().unwrap();
    let halfq = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut value = BigRational::one();
    let mut terms = Vec::new();
    for t in 1..=upper {
        if pr.is_excluded_dyadic_level(t) {
            continue;
        }
        let lag = pr.odd_lag_indices(t - 1);
        let units = BigRational::from_integer(pr.unit_product(&lag));
        let xi = pr.xi(t);
        let mut sign: i8 = if pr.ell_anisotropic(t) % 2 == 0 { 1 } else { -1 };
        let tau2 = pr.tau_twice_dyadic(t);
        let exponent2 = if lag.len() % 2 == 0 {
            match ord(&xi, 2) {
                Ext::Fin(v) if v < 2 => sign = 0,
                Ext::Fin(2) => sign = -sign,
                _ => {}
            }
            sign *= kronecker_two(&units);
            tau2
        } else {
            sign *= kronecker_two(&(&xi * &units));
            tau2 - 1
        };
        let exponent = half(exponent2)?;
        let contribution = &halfq * pow_rat(2, exponent) * BigInt::from(sign);
        value += &contribution;
        terms.push(AssembledTerm { t, kind: TermKind::Bulk, sign, exponent, contribution });
    }
    finish(value, 2, terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn val(phi: &QuadraticPolynomial, n: i64, p: u64) -> BigRational {
        local_density(phi, &BigInt::from(n), p).unwrap().value
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn odd_examples() {
        let lin = QuadraticPolynomial::diagonal(&[(3, 1)]);
        for n in 0..10 {
            assert_eq!(val(&lin, n, 3), rat(1, 1));
        }
        assert_eq!(val(&QuadraticPolynomial::diagonal(&[(1, 0)]), 1, 5), rat(2, 1));
        assert_eq!(val(&QuadraticPolynomial::diagonal(&[(1, 0), (1, 0)]), 1, 5), rat(4, 5));
    }

    #[test]
    fn dyadic_examples() {
        assert_eq!(val(&QuadraticPolynomial::diagonal(&[(1, 0)]), 1, 2), rat(4, 1));
    }

    #[test]
    fn unbounded_zero_target_is_rejected() {
        let phi = QuadraticPolynomial::diagonal(&[(1, 0)]);
        assert!(matches!(
            local_density(&phi, &BigInt::zero(), 5),
            Err(Error::ZeroTargetUnbounded)
        ));
        assert!(matches!(
            local_density(&phi, &BigInt::zero(), 2),
            Err(Error::ZeroTargetUnbounded)
        ));
    }
}
