//! Brute-force ground truth: congruence counts for local densities and
//! direct representation counts on shifted lattices.
//!
//! Everything here enumerates full residue systems; nothing is shared with
//! the closed forms in [`crate::padic`].

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{is_prime, ord_int, pow_rat};
use crate::error::{Error, Result};
use crate::lattice::ShiftedLattice;
use crate::padic::QuadraticPolynomial;

/// Cap on `p^{k r}` for the naive enumerator.
pub const NAIVE_BUDGET: u128 = 1_000_000_000;
/// Cap on the number of multiply-adds spent merging residue histograms.
pub const HISTOGRAM_BUDGET: u128 = 4_000_000_000;
/// How many levels past the starting one the stabilizer may try.
pub const STABILIZATION_LEVELS: u32 = 8;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CongruenceCount {
    pub prime: u64,
    pub level: u32,
    pub count: u128,
    /// `count * p^{k (1 - r)}`.
    #[serde(serialize_with = "ser_rat")]
    pub density: BigRational,
}

fn ser_rat<S: serde::Serializer>(q: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

fn modulus(p: u64, k: u32) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if k == 0 {
        return Err(Error::Domain("level must be positive".into()));
    }
    p.checked_pow(k)
        .filter(|&m| m <= 1 << 24)
        .ok_or_else(|| Error::BudgetExceeded(format!("modulus {p}^{k} too large")))
}

fn residue(v: &BigInt, m: u64) -> u64 {
    v.mod_floor(&BigInt::from(m)).to_u64().unwrap()
}

fn density_of(count: u128, p: u64, k: u32, rank: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(count)) * pow_rat(p, k as i64 * (1 - rank as i64))
}

/// Residue histogram of one component: `hist[v] = #{x : f(x) ≡ v}`.
type Histogram = Vec<u64>;

fn diagonal_histogram(b: u64, c: u64, m: u64) -> Histogram {
    let mut h = vec![0u64; m as usize];
    for x in 0..m as u128 {
        let v = (b as u128 * x % m as u128 * x + c as u128 * x) % m as u128;
        h[v as usize] += 1;
    }
    h
}

fn block_histogram(b: u64, c: u64, d: u64, m: u64, anisotropic: bool) -> Histogram {
    let mm = m as u128;
    let mut h = vec![0u64; m as usize];
    for y1 in 0..mm {
        for y2 in 0..mm {
            let q = if anisotropic { (y1 * y1 + y1 * y2 + y2 * y2) % mm } else { y1 * y2 % mm };
            let v = (b as u128 * q + c as u128 * y1 + d as u128 * y2) % mm;
            h[v as usize] += 1;
        }
    }
    h
}

fn support(h: &Histogram) -> u128 {
    h.iter().filter(|&&c| c != 0).count() as u128
}

fn mass(h: &Histogram) -> u128 {
    h.iter().map(|&c| c as u128).sum()
}

fn convolve(a: &Histogram, b: &Histogram) -> Histogram {
    let m = a.len();
    let mut out = vec![0u64; m];
    let nz: Vec<(usize, u64)> = b.iter().copied().enumerate().filter(|&(_, c)| c != 0).collect();
    for (i, &ca) in a.iter().enumerate() {
        if ca == 0 {
            continue;
        }
        let split = nz.partition_point(|&(j, _)| i + j < m);
        for &(j, cb) in &nz[..split] {
            out[i + j] += ca * cb;
        }
        for &(j, cb) in &nz[split..] {
            out[i + j - m] += ca * cb;
        }
    }
    out
}

fn point_histogram(m: u64) -> Histogram {
    let mut h = vec![0u64; m as usize];
    h[0] = 1;
    h
}

/// Counts `#{v mod m : Σ f_j(v_j) ≡ target}` from per-component histograms by
/// splitting the components into two halves and pairing residues.
fn count_from_histograms(hists: &[Histogram], target: u64, m: u64) -> Result<u128> {
    let mid = hists.len() / 2;
    let mut work: u128 = 0;
    let mut fold = |part: &[Histogram]| -> Result<Histogram> {
        let mut acc = point_histogram(m);
        for h in part {
            if mass(&acc) * mass(h) > u64::MAX as u128 {
                return Err(Error::BudgetExceeded(format!("counts modulo {m} overflow")));
            }
            work += support(&acc) * support(h);
            if work > HISTOGRAM_BUDGET {
                return Err(Error::BudgetExceeded(format!("histogram merge modulo {m}")));
            }
            acc = convolve(&acc, h);
        }
        Ok(acc)
    };
    let left = fold(&hists[..mid])?;
    let right = fold(&hists[mid..])?;
    let mut total = 0u128;
    for (v, &c) in left.iter().enumerate() {
        if c != 0 {
            let w = (target + m - v as u64 % m) % m;
            total += c as u128 * right[w as usize] as u128;
        }
    }
    Ok(total)
}

/// `N_k = #{x mod p^k : phi(x) ≡ n (mod p^k)}` and its normalized density.
pub fn count_congruence_solutions(
    phi: &QuadraticPolynomial,
    n: &BigInt,
    p: u64,
    k: u32,
) -> Result<CongruenceCount> {
    let m = modulus(p, k)?;
    let mut hists = Vec::new();
    for t in &phi.diagonal {
        hists.push(diagonal_histogram(residue(&t.b, m), residue(&t.c, m), m));
    }
    for (blocks, aniso) in [(&phi.hyperbolic, false), (&phi.anisotropic, true)] {
        for t in blocks {
            if (m as u128).pow(2) > HISTOGRAM_BUDGET {
                return Err(Error::BudgetExceeded(format!("block enumeration modulo {m}")));
            }
            hists.push(block_histogram(residue(&t.b, m), residue(&t.c, m), residue(&t.d, m), m, aniso));
        }
    }
    let count = count_from_histograms(&hists, residue(n, m), m)?;
    Ok(CongruenceCount { prime: p, level: k, count, density: density_of(count, p, k, phi.rank()) })
}

/// The same count by walking every point of `(Z/p^k)^r`; only for small cases.
pub fn count_congruence_solutions_naive(
    phi: &QuadraticPolynomial,
    n: &BigInt,
    p: u64,
    k: u32,
) -> Result<CongruenceCount> {
    let m = modulus(p, k)?;
    let r = phi.rank();
    let total = (m as u128).checked_pow(r as u32).filter(|&t| t <= NAIVE_BUDGET);
    let total = total.ok_or_else(|| Error::BudgetExceeded(format!("{m}^{r} points")))?;
    let modulus = BigInt::from(m);
    let target = n.mod_floor(&modulus);
    let mut point = vec![BigInt::zero(); r];
    let mut count = 0u128;
    for idx in 0..total {
        let mut rest = idx;
        for slot in point.iter_mut() {
            *slot = BigInt::from((rest % m as u128) as u64);
            rest /= m as u128;
        }
        if phi.evaluate(&point).mod_floor(&modulus) == target {
            count += 1;
        }
    }
    Ok(CongruenceCount { prime: p, level: k, count, density: density_of(count, p, k, r) })
}

fn max_ord<'a>(values: impl IntoIterator<Item = &'a BigInt>, p: u64) -> i64 {
    values.into_iter().filter_map(|v| ord_int(v, p)).max().unwrap_or(0)
}

/// Runs levels `k0, k0 + 1, ...` until two consecutive densities agree.
fn stabilize<F>(k0: u32, mut at_level: F) -> Result<CongruenceCount>
where
    F: FnMut(u32) -> Result<CongruenceCount>,
{
    let mut prev = at_level(k0)?;
    for k in k0 + 1..=k0 + STABILIZATION_LEVELS {
        let next = at_level(k)?;
        if next.density == prev.density {
            return Ok(prev);
        }
        prev = next;
    }
    Err(Error::NonStabilized(k0 + STABILIZATION_LEVELS))
}

/// Starting level: `2 * (largest coefficient valuation) + ord_p(n) + 3`.
pub fn starting_level(phi: &QuadraticPolynomial, n: &BigInt, p: u64) -> u32 {
    let coeffs = phi
        .diagonal
        .iter()
        .flat_map(|t| [&t.b, &t.c])
        .chain(phi.hyperbolic.iter().chain(&phi.anisotropic).flat_map(|t| [&t.b, &t.c, &t.d]));
    let v = max_ord(coeffs, p);
    let vn = ord_int(n, p).unwrap_or(0);
    (2 * v + vn + 3) as u32
}

/// The `p`-adic density `lim p^{k(1-r)} N_k`, read off once it stops moving.
pub fn stabilized_density(phi: &QuadraticPolynomial, n: &BigInt, p: u64) -> Result<CongruenceCount> {
    if phi.rank() == 0 {
        return Err(Error::Domain("empty polynomial".into()));
    }
    stabilize(starting_level(phi, n, p), |k| count_congruence_solutions(phi, n, p, k))
}

/// `p^{k(1-r)} #{y mod p^k : y_i ≡ shift_i mod p^{ord scale_i}, Σ alpha_i y_i^2 ≡ target}`,
/// the local density of the shifted lattice itself.
pub fn lattice_congruence_count(lat: &ShiftedLattice, target: &BigInt, p: u64, k: u32) -> Result<CongruenceCount> {
    let m = modulus(p, k)?;
    let mut hists = Vec::new();
    for ((&alpha, &scale), &shift) in lat.alphas.iter().zip(&lat.scales).zip(&lat.shifts) {
        let e = ord_int(&BigInt::from(scale), p).unwrap() as u32;
        if e > k {
            return Err(Error::Domain(format!("level {k} below the scale valuation {e}")));
        }
        let step = p.pow(e);
        let a = alpha % m;
        let mut h = vec![0u64; m as usize];
        let start = shift.rem_euclid(step as i64) as u64;
        let mut y = start;
        while y < m {
            let v = (a as u128 * (y as u128 * y as u128 % m as u128)) % m as u128;
            h[v as usize] += 1;
            y += step;
        }
        hists.push(h);
    }
    let count = count_from_histograms(&hists, residue(target, m), m)?;
    Ok(CongruenceCount { prime: p, level: k, count, density: density_of(count, p, k, lat.rank()) })
}

/// Stabilized lattice density `beta_p(target; X)`.
pub fn stabilized_lattice_density(lat: &ShiftedLattice, target: &BigInt, p: u64) -> Result<CongruenceCount> {
    let alphas: Vec<BigInt> = lat.alphas.iter().map(|&a| BigInt::from(a)).collect();
    let scales: Vec<BigInt> = lat.scales.iter().map(|&s| BigInt::from(s)).collect();
    let k0 = 2 * max_ord(&alphas, p) + 2 * max_ord(&scales, p) + ord_int(target, p).unwrap_or(0) + 3;
    stabilize(k0 as u32, |k| lattice_congruence_count(lat, target, p, k))
}

/// `r_X(k)`: vectors `v = Σ y_i e_i` with `y_i ≡ shift_i (mod scale_i)` and
/// `Q(v) = Σ alpha_i y_i^2 = k`, by bounded coordinate enumeration.
pub fn brute_rx(lat: &ShiftedLattice, k: u64) -> u64 {
    fn rec(lat: &ShiftedLattice, i: usize, rest: u128) -> u64 {
        let alpha = lat.alphas[i] as u128;
        let scale = lat.scales[i] as i128;
        let shift = lat.shifts[i] as i128;
        let bound = crate::arith::isqrt_u128(rest / alpha) as i128;
        if i + 1 == lat.alphas.len() {
            if rest % alpha != 0 {
                return 0;
            }
            let sq = rest / alpha;
            if bound as u128 * bound as u128 != sq {
                return 0;
            }
            let fits = |y: i128| (y - shift).rem_euclid(scale) == 0;
            return if bound == 0 { fits(0) as u64 } else { fits(bound) as u64 + fits(-bound) as u64 };
        }
        // smallest y >= -bound in the residue class
        let mut y = -bound + (shift + bound).rem_euclid(scale);
        let mut total = 0;
        while y <= bound {
            let used = alpha * (y * y) as u128;
            total += rec(lat, i + 1, rest - used);
            y += scale;
        }
        total
    }
    if lat.alphas.is_empty() {
        return (k == 0) as u64;
    }
    rec(lat, 0, k as u128)
}
