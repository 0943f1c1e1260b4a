//! Generalized polygonal numbers and sums of them.
//!
//! `P_m(x) = ((m - 2) x^2 - (m - 4) x) / 2` for every integer `x`. A sum
//! `F = a_1 P_{m_1} + ... + a_r P_{m_r}` is kept in canonical form (terms
//! sorted by `(a, m)`); representation counts do not depend on term order.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::isqrt_u128;
use crate::bitset::Bitset;
use crate::error::{Error, Result};

/// Exact `P_m(x)` over arbitrary-precision integers.
pub fn polygonal_number(m: &BigInt, x: &BigInt) -> Result<BigInt> {
    if *m < BigInt::from(3) {
        return Err(Error::Domain(format!("polygon parameter m = {m} must be >= 3")));
    }
    let twice = (m - 2u32) * x * x - (m - 4u32) * x;
    let (q, r) = twice.div_rem(&BigInt::from(2));
    debug_assert!(r.is_zero());
    Ok(q)
}

/// Machine-word `P_m(x)`; `None` on overflow.
pub(crate) fn polygonal_i128(m: u64, x: i64) -> Option<i128> {
    let m = m as i128;
    let x = x as i128;
    let sq = x.checked_mul(x)?;
    let twice = (m - 2).checked_mul(sq)?.checked_sub((m - 4).checked_mul(x)?)?;
    Some(twice / 2)
}

/// The integers `x` with `P_m(x) <= limit`, as an inclusive range.
///
/// Solves `(m-2) x^2 - (m-4) x <= 2 limit` with an integer square root and
/// then corrects the endpoints by direct evaluation.
pub fn argument_range(m: u64, limit: u64) -> (i64, i64) {
    assert!(m >= 3);
    let a = (m - 2) as i128;
    let b = (m as i128) - 4;
    // roots of a x^2 - b x - 2 limit = 0
    let disc = (b * b + 8 * a * limit as i128) as u128;
    let s = isqrt_u128(disc) as i128;
    let mut hi = ((b + s) / (2 * a)) as i64;
    let mut lo = ((b - s) / (2 * a)) as i64;
    let fits = |x: i64| polygonal_i128(m, x).is_some_and(|v| v <= limit as i128);
    while fits(hi + 1) {
        hi += 1;
    }
    while hi >= 0 && !fits(hi) {
        hi -= 1;
    }
    while fits(lo - 1) {
        lo -= 1;
    }
    while lo <= 0 && !fits(lo) {
        lo += 1;
    }
    (lo, hi)
}

fn check_polygon(m: u64) -> Result<()> {
    if m < 3 {
        return Err(Error::Domain(format!("polygon parameter m = {m} must be >= 3")));
    }
    Ok(())
}

/// `{ P_m(x) : x in Z } ∩ [0, bound]`, sorted and deduplicated.
pub fn values_up_to(m: u64, bound: u64) -> Result<Vec<u64>> {
    check_polygon(m)?;
    let (lo, hi) = argument_range(m, bound);
    let mut v: Vec<u64> = (lo..=hi)
        .map(|x| polygonal_i128(m, x).unwrap() as u64)
        .collect();
    v.sort_unstable();
    v.dedup();
    Ok(v)
}

/// `counts[v] = #{ x : P_m(x) = v }` for `v <= bound`.
pub fn value_multiplicities(m: u64, bound: u64) -> Result<Vec<u32>> {
    check_polygon(m)?;
    let mut counts = vec![0u32; bound as usize + 1];
    let (lo, hi) = argument_range(m, bound);
    for x in lo..=hi {
        counts[polygonal_i128(m, x).unwrap() as usize] += 1;
    }
    Ok(counts)
}

/// One summand `a * P_m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Term {
    pub coeff: u64,
    pub polygon: u64,
}

impl Term {
    pub fn new(coeff: u64, polygon: u64) -> Result<Self> {
        if coeff == 0 {
            return Err(Error::Domain("coefficients must be positive".into()));
        }
        check_polygon(polygon)?;
        Ok(Term { coeff, polygon })
    }
}

/// A sum `a_1 P_{m_1} + ... + a_r P_{m_r}` in canonical (sorted) form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PolygonalSum {
    terms: Vec<Term>,
}

impl PolygonalSum {
    pub fn new(mut terms: Vec<Term>) -> Result<Self> {
        for t in &terms {
            Term::new(t.coeff, t.polygon)?;
        }
        terms.sort();
        Ok(PolygonalSum { terms })
    }

    /// Builds a sum from `(a, m)` pairs.
    pub fn from_pairs(pairs: &[(u64, u64)]) -> Result<Self> {
        let terms = pairs
            .iter()
            .map(|&(a, m)| Term::new(a, m))
            .collect::<Result<Vec<_>>>()?;
        Self::new(terms)
    }

    /// The empty sum `F = 0`.
    pub fn zero() -> Self {
        PolygonalSum { terms: Vec::new() }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn pairs(&self) -> Vec<(u64, u64)> {
        self.terms.iter().map(|t| (t.coeff, t.polygon)).collect()
    }

    pub fn rank(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn with_term(&self, coeff: u64, polygon: u64) -> Result<Self> {
        let mut terms = self.terms.clone();
        terms.push(Term::new(coeff, polygon)?);
        Self::new(terms)
    }

    /// Replaces the polygon parameter of term `index` and re-canonicalizes.
    pub fn with_polygon(&self, index: usize, polygon: u64) -> Result<Self> {
        let mut terms = self.terms.clone();
        let t = terms
            .get_mut(index)
            .ok_or_else(|| Error::Domain(format!("term index {index} out of range")))?;
        t.polygon = polygon;
        Self::new(terms)
    }

    /// `lcm(m_i - 2)`, `None` on overflow; 1 for the empty sum.
    pub fn lcm_of_shifted_polygons(&self) -> Option<u64> {
        self.terms
            .iter()
            .try_fold(1u64, |acc, t| crate::arith::lcm_u64(acc, t.polygon - 2))
    }

    /// Evaluates `F(x)`.
    pub fn evaluate(&self, xs: &[i64]) -> Option<i128> {
        assert_eq!(xs.len(), self.terms.len());
        self.terms.iter().zip(xs).try_fold(0i128, |acc, (t, &x)| {
            acc.checked_add((t.coeff as i128).checked_mul(polygonal_i128(t.polygon, x)?)?)
        })
    }
}

impl Serialize for PolygonalSum {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Display for PolygonalSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            if t.coeff != 1 {
                write!(f, "{}*", t.coeff)?;
            }
            write!(f, "P{}", t.polygon)?;
        }
        Ok(())
    }
}

/// Grammar: `term := [int "*"] "P" int`, terms joined by `+`, whitespace
/// ignored. The literal `0` is the empty sum.
impl FromStr for PolygonalSum {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty sum expression".into()));
        }
        if compact == "0" {
            return Ok(PolygonalSum::zero());
        }
        let mut terms = Vec::new();
        for raw in compact.split('+') {
            if raw.is_empty() {
                return Err(Error::Parse(format!("empty term in {s:?}")));
            }
            let (coeff, rest) = match raw.split_once('*') {
                Some((c, r)) => (parse_uint(c, raw)?, r),
                None => (1, raw),
            };
            let poly = rest
                .strip_prefix('P')
                .or_else(|| rest.strip_prefix('p'))
                .ok_or_else(|| Error::Parse(format!("term {raw:?} must look like [a*]Pm")))?;
            let m = parse_uint(poly, raw)?;
            terms.push(
                Term::new(coeff, m).map_err(|e| Error::Parse(format!("term {raw:?}: {e}")))?,
            );
        }
        PolygonalSum::new(terms)
    }
}

fn parse_uint(s: &str, term: &str) -> Result<u64> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse(format!("bad integer {s:?} in term {term:?}")));
    }
    s.parse()
        .map_err(|_| Error::Parse(format!("integer {s:?} out of range in term {term:?}")))
}

/// `r_F(n)`: number of `x in Z^r` with `F(x) = n`.
///
/// Enumerates the first `r - 1` coordinates over the values that still fit the
/// remaining budget and looks the last one up in a multiplicity table.
pub fn representation_count(sum: &PolygonalSum, n: u64) -> u64 {
    let terms = sum.terms();
    if terms.is_empty() {
        return u64::from(n == 0);
    }
    // (value, multiplicity) lists for the leading terms, scaled by a_i
    let leading: Vec<Vec<(u64, u64)>> = terms[..terms.len() - 1]
        .iter()
        .map(|t| {
            let mult = value_multiplicities(t.polygon, n / t.coeff).unwrap();
            mult.iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(v, &c)| (v as u64 * t.coeff, c as u64))
                .collect()
        })
        .collect();
    let last = terms[terms.len() - 1];
    let last_mult = value_multiplicities(last.polygon, n / last.coeff).unwrap();

    fn go(
        level: usize,
        remaining: u64,
        leading: &[Vec<(u64, u64)>],
        last: Term,
        last_mult: &[u32],
    ) -> u64 {
        if level == leading.len() {
            if remaining % last.coeff != 0 {
                return 0;
            }
            return last_mult
                .get((remaining / last.coeff) as usize)
                .copied()
                .unwrap_or(0) as u64;
        }
        let mut total = 0;
        for &(v, c) in &leading[level] {
            if v > remaining {
                break;
            }
            total += c * go(level + 1, remaining - v, leading, last, last_mult);
        }
        total
    }
    go(0, n, &leading, last, &last_mult)
}

/// `[r_F(0), ..., r_F(bound)]` by convolving the per-term multiplicity tables.
pub fn representation_counts_up_to(sum: &PolygonalSum, bound: u64) -> Vec<u64> {
    let len = bound as usize + 1;
    let mut acc = vec![0u64; len];
    acc[0] = 1;
    for t in sum.terms() {
        let mult = value_multiplicities(t.polygon, bound / t.coeff).unwrap();
        let mut next = vec![0u64; len];
        for (v, &c) in mult.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let shift = v * t.coeff as usize;
            for k in 0..len - shift {
                if acc[k] != 0 {
                    next[k + shift] += acc[k] * c as u64;
                }
            }
        }
        acc = next;
    }
    acc
}

/// Shift amounts `a * P_m(x)` that fit below `len`.
pub fn term_shifts(term: Term, len: usize) -> Vec<usize> {
    let bound = (len as u64).saturating_sub(1) / term.coeff;
    values_up_to(term.polygon, bound)
        .unwrap()
        .into_iter()
        .map(|v| (v * term.coeff) as usize)
        .collect()
}

/// The set of integers in `[0, bound]` represented by `sum`.
pub fn represented_set(sum: &PolygonalSum, bound: u64) -> Bitset {
    let len = bound as usize + 1;
    let mut set = Bitset::new(len);
    set.set(0);
    for &t in sum.terms() {
        set = set.sumset(&term_shifts(t, len));
    }
    set
}

/// Least `1 <= k <= bound` with `r_F(k) = 0`, or `None` if every such `k` is
/// represented.
pub fn represents_all_up_to(sum: &PolygonalSum, bound: u64) -> Option<u64> {
    represented_set(sum, bound).first_zero_from(1).map(|k| k as u64)
}

/// Truant of `F` relative to a finite cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TruantResult {
    Truant(u64),
    CandidateUniversal { checked_up_to: u64 },
}

impl TruantResult {
    pub fn from_gap(gap: Option<u64>, cap: u64) -> Self {
        match gap {
            Some(v) => TruantResult::Truant(v),
            None => TruantResult::CandidateUniversal { checked_up_to: cap },
        }
    }

    pub fn value(self) -> Option<u64> {
        match self {
            TruantResult::Truant(v) => Some(v),
            TruantResult::CandidateUniversal { .. } => None,
        }
    }

    pub fn is_candidate_universal(self) -> bool {
        matches!(self, TruantResult::CandidateUniversal { .. })
    }
}

impl fmt::Display for TruantResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TruantResult::Truant(v) => write!(f, "truant {v}"),
            TruantResult::CandidateUniversal { checked_up_to } => {
                write!(f, "candidate universal up to {checked_up_to}")
            }
        }
    }
}

/// Smallest positive integer not represented by `sum`, searched up to `cap`.
pub fn truant(sum: &PolygonalSum, cap: u64) -> Result<TruantResult> {
    if cap == 0 {
        return Err(Error::Domain("cap must be >= 1".into()));
    }
    Ok(TruantResult::from_gap(represents_all_up_to(sum, cap), cap))
}

/// Helper for callers that already hold `set = represented_set(sum, cap)`.
pub fn truant_of_set(set: &Bitset, cap: u64) -> TruantResult {
    TruantResult::from_gap(set.first_zero_from(1).map(|k| k as u64), cap)
}

/// `BigInt` convenience wrapper around [`polygonal_number`] for small inputs.
pub fn polygonal_number_u64(m: u64, x: i64) -> Result<u64> {
    polygonal_number(&BigInt::from(m), &BigInt::from(x))
        .map(|v| v.to_u64().expect("P_m(x) is non-negative"))
}
