//! Small integer helpers: primes, integer square roots, p-adic valuations.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = 17u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Primes `p <= bound` by a plain sieve of Eratosthenes.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Distinct prime divisors of `|n|` by trial division; `n` must be nonzero.
pub fn prime_divisors(n: &BigInt) -> Vec<u64> {
    assert!(!n.is_zero(), "prime_divisors of zero");
    let mut m = n.abs();
    let mut out = Vec::new();
    let mut d = 2u64;
    loop {
        let dd = BigInt::from(d);
        if &dd * &dd > m {
            break;
        }
        if (&m % &dd).is_zero() {
            out.push(d);
            while (&m % &dd).is_zero() {
                m /= &dd;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if !m.is_one() {
        out.push(m.to_u64().expect("prime divisor exceeds u64"));
    }
    out
}

pub fn isqrt_u128(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

pub fn lcm_u64(a: u64, b: u64) -> Option<u64> {
    (a / a.gcd(&b)).checked_mul(b)
}

/// `ord_p(n)`; `None` stands for `+infinity` (n = 0).
pub fn ord_int(n: &BigInt, p: u64) -> Option<i64> {
    if n.is_zero() {
        return None;
    }
    let pp = BigInt::from(p);
    let mut m = n.clone();
    let mut v = 0i64;
    loop {
        let (q, r) = m.div_rem(&pp);
        if !r.is_zero() {
            return Some(v);
        }
        m = q;
        v += 1;
    }
}

/// Splits `n = p^v * u` with `p` not dividing `u`; `n` nonzero.
pub fn split_int(n: &BigInt, p: u64) -> (i64, BigInt) {
    let v = ord_int(n, p).expect("split of zero");
    (v, n / BigInt::from(p).pow(v as u32))
}

pub fn ord_rat(q: &BigRational, p: u64) -> Option<i64> {
    if q.is_zero() {
        return None;
    }
    Some(ord_int(q.numer(), p).unwrap() - ord_int(q.denom(), p).unwrap())
}

/// Unit part of a nonzero rational: `q / p^{ord_p(q)}`.
pub fn unit_part_rat(q: &BigRational, p: u64) -> BigRational {
    let v = ord_rat(q, p).expect("unit part of zero");
    q / pow_rat(p, v)
}

/// `p^e` as an exact rational for any integer `e`.
pub fn pow_rat(p: u64, e: i64) -> BigRational {
    let base = BigInt::from(p).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        BigRational::from_integer(base)
    } else {
        BigRational::new(BigInt::one(), base)
    }
}

/// Residue of a `p`-integral rational modulo `modulus` (a power of `p`).
pub fn rat_mod(q: &BigRational, modulus: u64) -> u64 {
    let m = BigInt::from(modulus);
    let den = q.denom().mod_floor(&m);
    let inv = mod_inverse(&den, &m).expect("denominator not invertible modulo p-power");
    let r = (q.numer().mod_floor(&m) * inv).mod_floor(&m);
    r.to_u64().unwrap()
}

pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

/// Sum of divisors.
pub fn sigma(n: u64) -> u64 {
    (1..=n).filter(|d| n % d == 0).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_and_primality_agree() {
        let ps = primes_up_to(200);
        for n in 0..=200u64 {
            assert_eq!(ps.contains(&n), is_prime(n), "n = {n}");
        }
        assert!(is_prime(1_000_003));
        assert!(!is_prime(1_000_001));
    }

    #[test]
    fn divisors_of_composite() {
        assert_eq!(prime_divisors(&BigInt::from(-360)), vec![2, 3, 5]);
        assert_eq!(prime_divisors(&BigInt::from(97)), vec![97]);
        assert_eq!(prime_divisors(&BigInt::from(1)), Vec::<u64>::new());
    }

    #[test]
    fn valuations() {
        assert_eq!(ord_int(&BigInt::from(48), 2), Some(4));
        assert_eq!(ord_int(&BigInt::from(0), 3), None);
        let q = BigRational::new(BigInt::from(9), BigInt::from(50));
        assert_eq!(ord_rat(&q, 3), Some(2));
        assert_eq!(ord_rat(&q, 5), Some(-2));
        assert_eq!(unit_part_rat(&q, 5), BigRational::new(BigInt::from(9), BigInt::from(2)));
        // 9/2 mod 25 = 9 * 13 = 117 = 17 mod 25
        assert_eq!(rat_mod(&BigRational::new(BigInt::from(9), BigInt::from(2)), 25), 17);
    }

    #[test]
    fn isqrt_exact() {
        for n in 0..10_000u128 {
            let r = isqrt_u128(n);
            assert!(r * r <= n && (r + 1) * (r + 1) > n);
        }
        assert_eq!(isqrt_u128(u64::MAX as u128 * 4), 2 * (1u128 << 32) - 1);
    }
}
