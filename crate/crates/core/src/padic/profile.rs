//! Valuation bookkeeping shared by the odd and dyadic density formulas.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use super::{ord, ord_i, Ext, QuadraticPolynomial};
use crate::arith::{split_int, unit_part_rat};
use crate::error::{Error, Result};

/// Which of the index sets a diagonal index falls in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum IndexClass {
    /// `ord_p(b) > ord_p(c)`: the linear part dominates (the set `D_p`).
    Linear,
    /// `ord_2(b) = ord_2(c)`; only used at `p = 2` (the set `E_2`).
    Balanced,
    /// `ord_p(b) <= ord_p(c)` for odd `p`, `<` for `p = 2` (the set `N_p`).
    Quadratic,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiagonalProfile {
    /// `t_i = min(ord b_i, ord c_i)`.
    pub t: Ext,
    pub class: IndexClass,
    /// `u_i = b_i / p^{ord b_i}` when `b_i != 0`.
    pub unit: Option<BigInt>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockProfile {
    /// `min(ord b, ord c, ord d)`.
    pub t: Ext,
    /// `ord b > min(ord c, ord d)`.
    pub linear: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityProfile {
    pub prime: u64,
    pub diagonal: Vec<DiagonalProfile>,
    pub hyperbolic: Vec<BlockProfile>,
    pub anisotropic: Vec<BlockProfile>,
    /// Cutoff coming from the linear-dominant (and balanced) indices.
    pub t_d: Ext,
    /// `n` plus the completing-the-square constants of the quadratic indices.
    #[serde(serialize_with = "ser_rat")]
    pub completed_target: BigRational,
    pub t_n: Ext,
    /// Unit part of the completed target, when it is nonzero.
    #[serde(serialize_with = "ser_opt_rat")]
    pub target_unit: Option<BigRational>,
}

fn ser_rat<S: serde::Serializer>(q: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

fn ser_opt_rat<S: serde::Serializer>(
    q: &Option<BigRational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match q {
        Some(q) => s.serialize_str(&q.to_string()),
        None => s.serialize_none(),
    }
}

fn block_profile(b: &BigInt, c: &BigInt, d: &BigInt, p: u64) -> BlockProfile {
    let (ob, oc, od) = (ord_i(b, p), ord_i(c, p), ord_i(d, p));
    let lin = oc.min(od);
    BlockProfile { t: ob.min(lin), linear: ob > lin }
}

/// Computes the index partition, cutoffs and completed target of `phi` at `p`.
pub fn profile(phi: &QuadraticPolynomial, n: &BigInt, p: u64) -> Result<DensityProfile> {
    super::check_prime(p)?;
    if phi.is_zero() {
        return Err(Error::Domain("phi must be nonzero".into()));
    }
    if p != 2 && phi.has_blocks() {
        return Err(Error::OddPrimeBlocks(p));
    }
    let dyadic = p == 2;
    let mut completed = BigRational::from_integer(n.clone());
    let mut cutoffs = Vec::new();
    let mut diagonal = Vec::with_capacity(phi.diagonal.len());
    for term in &phi.diagonal {
        let (ob, oc) = (ord_i(&term.b, p), ord_i(&term.c, p));
        let class = if ob > oc {
            IndexClass::Linear
        } else if dyadic && ob == oc {
            IndexClass::Balanced
        } else {
            IndexClass::Quadratic
        };
        let t = ob.min(oc);
        match class {
            IndexClass::Linear => cutoffs.push(t),
            IndexClass::Balanced => cutoffs.push(t.plus(1)),
            IndexClass::Quadratic => {
                if !term.b.is_zero() {
                    completed += BigRational::new(&term.c * &term.c, &term.b * 4);
                }
            }
        }
        let unit = (!term.b.is_zero()).then(|| split_int(&term.b, p).1);
        diagonal.push(DiagonalProfile { t, class, unit });
    }
    let mut hyperbolic = Vec::new();
    for blk in &phi.hyperbolic {
        let bp = block_profile(&blk.b, &blk.c, &blk.d, p);
        if bp.linear {
            cutoffs.push(bp.t);
        } else if !blk.b.is_zero() {
            completed += BigRational::new(&blk.c * &blk.d, blk.b.clone());
        }
        hyperbolic.push(bp);
    }
    let mut anisotropic = Vec::new();
    for blk in &phi.anisotropic {
        let bp = block_profile(&blk.b, &blk.c, &blk.d, p);
        if bp.linear {
            cutoffs.push(bp.t);
        } else if !blk.b.is_zero() {
            let num = &blk.c * &blk.c + &blk.d * &blk.d - &blk.c * &blk.d;
            completed += BigRational::new(num, &blk.b * 3);
        }
        anisotropic.push(bp);
    }
    let t_n = ord(&completed, p);
    let target_unit = (!completed.is_zero()).then(|| unit_part_rat(&completed, p));
    Ok(DensityProfile {
        prime: p,
        diagonal,
        hyperbolic,
        anisotropic,
        t_d: Ext::min_of(cutoffs),
        completed_target: completed,
        t_n,
        target_unit,
    })
}

impl DensityProfile {
    fn quadratic_indices(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.diagonal.iter().enumerate().filter_map(|(i, d)| {
            (d.class == IndexClass::Quadratic)
                .then_some(d.t.finite().map(|t| (i, t)))
                .flatten()
        })
    }

    /// Indices `i` of quadratic type with `t_i - t < 0` and odd.
    pub fn odd_lag_indices(&self, t: i64) -> Vec<usize> {
        self.quadratic_indices()
            .filter(|&(_, ti)| ti < t && (t - ti) % 2 != 0)
            .map(|(i, _)| i)
            .collect()
    }

    /// `ell_p(t)`, the size of [`Self::odd_lag_indices`].
    pub fn ell(&self, t: i64) -> usize {
        self.odd_lag_indices(t).len()
    }

    /// The same count over the anisotropic blocks of quadratic type.
    pub fn ell_anisotropic(&self, t: i64) -> usize {
        self.anisotropic
            .iter()
            .filter(|b| !b.linear)
            .filter_map(|b| b.t.finite())
            .filter(|&tk| tk < t && (t - tk) % 2 != 0)
            .count()
    }

    /// Twice the odd-prime exponent `tau_p(t) = t + Σ_{t_i < t} (t_i - t)/2`.
    pub fn tau_twice_odd(&self, t: i64) -> i64 {
        2 * t
            + self
                .quadratic_indices()
                .filter(|&(_, ti)| ti < t)
                .map(|(_, ti)| ti - t)
                .sum::<i64>()
    }

    /// Twice the dyadic exponent `tau_2(t)`.
    pub fn tau_twice_dyadic(&self, t: i64) -> i64 {
        let diag: i64 = self
            .quadratic_indices()
            .filter(|&(_, ti)| ti + 1 < t)
            .map(|(_, ti)| 1 + ti - t)
            .sum();
        let blocks: i64 = self
            .hyperbolic
            .iter()
            .chain(&self.anisotropic)
            .filter(|b| !b.linear)
            .filter_map(|b| b.t.finite())
            .filter(|&tb| tb < t)
            .map(|tb| tb - t)
            .sum();
        2 * t + diag + 2 * blocks
    }

    /// `xi_2(t) = Σ_{t_i + 1 < t} u_i - 2^{3-t} n_completed`.
    pub fn xi(&self, t: i64) -> BigRational {
        let units: BigInt = self
            .quadratic_indices()
            .filter(|&(_, ti)| ti + 1 < t)
            .map(|(i, _)| self.diagonal[i].unit.clone().unwrap())
            .sum();
        BigRational::from_integer(units)
            - &self.completed_target * crate::arith::pow_rat(2, 3 - t)
    }

    /// Whether `t = t_i + 1` for some quadratic-type index (skipped at `p = 2`).
    pub fn is_excluded_dyadic_level(&self, t: i64) -> bool {
        self.quadratic_indices().any(|(_, ti)| ti + 1 == t)
    }

    pub fn unit_product(&self, indices: &[usize]) -> BigInt {
        indices
            .iter()
            .map(|&i| self.diagonal[i].unit.clone().unwrap())
            .product()
    }

    /// Convenience for callers that want the unit part of the completed target.
    pub fn target_unit_or_err(&self) -> Result<&BigRational> {
        self.target_unit
            .as_ref()
            .ok_or_else(|| Error::Consistency("completed target is zero".into()))
    }

    /// Unit part of the completed target modulo `p` (or 8 at `p = 2`).
    pub fn target_unit_residue(&self) -> Option<u64> {
        let m = if self.prime == 2 { 8 } else { self.prime };
        self.target_unit
            .as_ref()
            .map(|u| crate::arith::rat_mod(&unit_part_rat(u, self.prime), m))
    }
}
