//! The shifted lattice attached to a sum of polygonal numbers, its local
//! densities, and rigorous intervals for the Eisenstein coefficient.
//!
//! For `F = Σ a_i P_{m_i}` put `Λ = lcm(m_i - 2)`, `α_i = a_i Λ / (m_i - 2)`,
//! `y_i = 2 (m_i - 2) x_i + (4 - m_i)`. Then `Σ α_i y_i^2 = 8 Λ F(x) + ρ`,
//! so `r_F(n) = r_X(μ n + ρ)` with `μ = 8Λ`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::{ord_int, pow_rat, primes_up_to};
use crate::error::{Error, Result};
use crate::interval::{good_prime_tail, Interval};
use crate::padic::{local_density, DensityValue, QuadraticPolynomial};
use crate::polygonal::{representation_count, PolygonalSum};

/// `X = ⊕ Z (scale_i e_i) + Σ shift_i e_i` inside the diagonal space with
/// Gram entries `alpha_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShiftedLattice {
    pub alphas: Vec<u64>,
    pub scales: Vec<u64>,
    pub shifts: Vec<i64>,
    pub lambda: u64,
    pub mu: u64,
    pub rho: u64,
}

fn overflow(what: &str) -> Error {
    Error::ResourceLimit(format!("{what} overflows 64 bits"))
}

/// Builds the shifted lattice of a nonempty sum.
pub fn lattice_from_sum(sum: &PolygonalSum) -> Result<ShiftedLattice> {
    if sum.is_empty() {
        return Err(Error::Domain("the empty sum has no lattice".into()));
    }
    let lambda = sum.lcm_of_shifted_polygons().ok_or_else(|| overflow("lcm(m_i - 2)"))?;
    let mu = lambda.checked_mul(8).ok_or_else(|| overflow("8 lambda"))?;
    let mut lat = ShiftedLattice { alphas: vec![], scales: vec![], shifts: vec![], lambda, mu, rho: 0 };
    for t in sum.terms() {
        let k = t.polygon - 2;
        let alpha = t.coeff.checked_mul(lambda / k).ok_or_else(|| overflow("alpha"))?;
        let d = t.polygon.abs_diff(4);
        let rho_i = alpha
            .checked_mul(d)
            .and_then(|v| v.checked_mul(d))
            .ok_or_else(|| overflow("rho"))?;
        lat.rho = lat.rho.checked_add(rho_i).ok_or_else(|| overflow("rho"))?;
        lat.alphas.push(alpha);
        lat.scales.push(2 * k);
        lat.shifts.push(4 - t.polygon as i64);
    }
    Ok(lat)
}

impl ShiftedLattice {
    pub fn rank(&self) -> usize {
        self.alphas.len()
    }

    /// `μ n + ρ`.
    pub fn target(&self, n: u64) -> BigInt {
        BigInt::from(self.mu) * n + self.rho
    }

    /// `Q(v) = Σ alpha_i y_i^2` for coordinates in the `e_i` basis.
    pub fn quadratic_form(&self, ys: &[i64]) -> BigInt {
        self.alphas
            .iter()
            .zip(ys)
            .map(|(&a, &y)| BigInt::from(a) * y * y)
            .sum()
    }

    /// Hessian `2 Gram` of the base lattice.
    pub fn hessian(&self) -> Vec<Vec<BigInt>> {
        let r = self.rank();
        (0..r)
            .map(|i| (0..r).map(|j| if i == j { BigInt::from(2 * self.alphas[i]) } else { BigInt::zero() }).collect())
            .collect()
    }
}

/// `[L_X^# : L_X] = Π 2 alpha_i`.
pub fn discriminant(lat: &ShiftedLattice) -> BigInt {
    lat.alphas.iter().map(|&a| BigInt::from(2 * a)).product()
}

/// Invariant factors of an integer matrix, by row and column reduction.
pub fn smith_normal_form(mut m: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    for k in 0..rows.min(cols) {
        // move a nonzero entry of least absolute value to (k, k)
        loop {
            let pivot = (k..rows)
                .flat_map(|i| (k..cols).map(move |j| (i, j)))
                .filter(|&(i, j)| !m[i][j].is_zero())
                .min_by_key(|&(i, j)| m[i][j].abs());
            let Some((pi, pj)) = pivot else {
                return diag_with_zeros(diag, rows.min(cols));
            };
            m.swap(k, pi);
            for row in m.iter_mut() {
                row.swap(k, pj);
            }
            let p = m[k][k].clone();
            let mut clean = true;
            for i in k + 1..rows {
                let q = &m[i][k] / &p;
                for j in k..cols {
                    let v = &q * &m[k][j];
                    m[i][j] -= v;
                }
                clean &= m[i][k].is_zero();
            }
            for j in k + 1..cols {
                let q = &m[k][j] / &p;
                for i in k..rows {
                    let v = &q * &m[i][k];
                    m[i][j] -= v;
                }
                clean &= m[k][j].is_zero();
            }
            if !clean {
                continue;
            }
            // enforce divisibility of the remaining block
            let bad = (k + 1..rows)
                .flat_map(|i| (k + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !(&m[i][j] % &p).is_zero());
            if let Some((i, _)) = bad {
                for j in k..cols {
                    let v = m[i][j].clone();
                    m[k][j] += v;
                }
                continue;
            }
            diag.push(p.abs());
            break;
        }
    }
    diag
}

fn diag_with_zeros(mut diag: Vec<BigInt>, len: usize) -> Vec<BigInt> {
    diag.resize(len, BigInt::zero());
    diag
}

/// `phi(x) = Σ (a_i (m_i - 2) x_i^2 - a_i (m_i - 4) x_i)`.
pub fn phi_of_sum(sum: &PolygonalSum) -> QuadraticPolynomial {
    let mut phi = QuadraticPolynomial::default();
    for t in sum.terms() {
        let a = t.coeff as i128;
        let m = t.polygon as i128;
        phi.diagonal.push(crate::padic::DiagonalTerm {
            b: BigInt::from(a * (m - 2)),
            c: BigInt::from(-a * (m - 4)),
        });
    }
    phi
}

/// `beta_p(μ n + ρ; X) = p^{ord_p(4Λ) - ord_p(Π μ_i)} I_p(2n; phi)`.
pub fn beta(sum: &PolygonalSum, n: u64, p: u64) -> Result<DensityValue> {
    let lat = lattice_from_sum(sum)?;
    let phi = phi_of_sum(sum);
    let mut dv = local_density(&phi, &(BigInt::from(n) * 2), p)?;
    let scale_ord: i64 = lat.scales.iter().map(|&s| ord_int(&BigInt::from(s), p).unwrap()).sum();
    let lambda_ord = ord_int(&(BigInt::from(lat.lambda) * 4), p).unwrap();
    dv.value *= pow_rat(p, lambda_ord - scale_ord);
    Ok(dv)
}

#[derive(Clone, Debug, Serialize)]
pub struct PrimeFactor {
    pub p: u64,
    #[serde(serialize_with = "ser_rat")]
    pub beta: BigRational,
}

fn ser_rat<S: serde::Serializer>(q: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

#[derive(Clone, Debug, Serialize)]
pub struct EisensteinInterval {
    pub n: u64,
    /// `μ n + ρ`.
    pub target: BigInt,
    pub lambda: u64,
    pub mu: u64,
    pub rho: u64,
    pub cutoff: u64,
    /// Exact factors at the primes dividing `2 Π a_i (m_i - 2) (μ n + ρ)`.
    pub bad_primes: Vec<PrimeFactor>,
    /// `c_r (2π)^{r/2} N^{r/2-1} / (disc^{1/2} Γ(r/2))`.
    pub prefactor: Interval,
    /// Product of all exact factors: every `p <= cutoff` and every bad prime.
    #[serde(serialize_with = "ser_rat")]
    pub local_product: BigRational,
    pub tail: Interval,
    pub eisenstein: Interval,
}

impl EisensteinInterval {
    pub fn lo(&self) -> &BigRational {
        &self.eisenstein.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.eisenstein.hi
    }
}

fn bad_prime_set(sum: &PolygonalSum, target: &BigInt) -> Vec<u64> {
    let mut m = target.clone() * 2;
    for t in sum.terms() {
        m *= BigInt::from(t.coeff) * BigInt::from(t.polygon - 2);
    }
    crate::arith::prime_divisors(&m)
}

/// The analytic prefactor of the Siegel–Minkowski formula for `Q(v) = target`.
pub fn prefactor(lat: &ShiftedLattice, target: &BigInt) -> Interval {
    let r = lat.rank() as u32;
    let c_r = if r == 2 { BigRational::new(1.into(), 2.into()) } else { BigRational::one() };
    let two_pi = Interval::pi().scale(&BigRational::from_integer(2.into()));
    let nt = Interval::point(BigRational::from_integer(target.clone()));
    // N^{r/2 - 1} = N^{(r-2)/2}
    let npow = nt.pow_half(r - 2);
    let disc = Interval::point(BigRational::from_integer(discriminant(lat))).sqrt();
    two_pi
        .pow_half(r)
        .mul(&npow)
        .scale(&c_r)
        .mul(&disc.mul(&Interval::gamma_half(r)).recip())
}

/// Interval for `a_{E_X}(μ n + ρ)`: exact local factors for `p <= cutoff`
/// and for every bad prime, `Π_{p > cutoff} (1 ± p^{-2})` bounds for the rest.
pub fn eisenstein_interval(sum: &PolygonalSum, n: u64, cutoff: u64) -> Result<EisensteinInterval> {
    if sum.rank() <= 4 {
        return Err(Error::RankTooSmall(sum.rank()));
    }
    let lat = lattice_from_sum(sum)?;
    let target = lat.target(n);
    let bad = bad_prime_set(sum, &target);
    // Bad primes above the cutoff have no two-sided bound, so they are always
    // handled exactly; the tail bound then covers a subset of the good primes.
    let mut exact = primes_up_to(cutoff);
    exact.extend(bad.iter().copied().filter(|&p| p > cutoff));
    let mut product = BigRational::one();
    let mut bad_primes = Vec::new();
    for p in exact {
        let b = beta(sum, n, p)?.value;
        if bad.contains(&p) {
            bad_primes.push(PrimeFactor { p, beta: b.clone() });
        }
        product *= b;
    }
    let pre = prefactor(&lat, &target);
    let tail = good_prime_tail(cutoff.max(2));
    let eisenstein = pre.scale(&product).mul(&tail);
    Ok(EisensteinInterval {
        n,
        target,
        lambda: lat.lambda,
        mu: lat.mu,
        rho: lat.rho,
        cutoff,
        bad_primes,
        prefactor: pre,
        local_product: product,
        tail,
        eisenstein,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CuspidalResidual {
    pub r_f: u64,
    pub eisenstein: EisensteinInterval,
    /// `[r_F(n) - hi, r_F(n) - lo]`.
    pub cuspidal: Interval,
}

pub fn cuspidal_residual(sum: &PolygonalSum, n: u64, cutoff: u64) -> Result<CuspidalResidual> {
    let eisenstein = eisenstein_interval(sum, n, cutoff)?;
    let r_f = representation_count(sum, n);
    let r = BigRational::from_integer(r_f.into());
    let cuspidal = Interval::new(&r - eisenstein.hi(), &r - eisenstein.lo());
    Ok(CuspidalResidual { r_f, eisenstein, cuspidal })
}
