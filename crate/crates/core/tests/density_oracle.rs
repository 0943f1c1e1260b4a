use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

use pgnl::lattice::{beta, lattice_from_sum};
use pgnl::oracle::{stabilized_density, stabilized_lattice_density};
use pgnl::padic::{local_density, QuadraticPolynomial};
use pgnl::{Error, PolygonalSum};

fn random_phi(rng: &mut impl Rng, p: u64) -> QuadraticPolynomial {
    let mut phi = QuadraticPolynomial::default();
    let mut rank = 0;
    let target = rng.gen_range(1..=4);
    while rank < target {
        let kind = if p == 2 { rng.gen_range(0..3) } else { 0 };
        let c = |rng: &mut dyn rand::RngCore| rng.gen_range(-6..=6i64);
        match kind {
            1 | 2 if rank + 2 <= 4 => {
                let (b, cc, d) = (c(rng), c(rng), c(rng));
                phi = if kind == 1 { phi.with_hyperbolic(b, cc, d) } else { phi.with_anisotropic(b, cc, d) };
                rank += 2;
            }
            _ => {
                phi = phi.with_diagonal(c(rng), c(rng));
                rank += 1;
            }
        }
    }
    phi
}

#[test]
fn closed_forms_agree_with_oracle() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(2024);
    let mut checked = 0;
    for _ in 0..200 {
        let p = [2u64, 3, 5, 7][rng.gen_range(0..4)];
        let phi = random_phi(&mut rng, p);
        if phi.is_zero() {
            continue;
        }
        let n = BigInt::from(rng.gen_range(-20..=20));
        let closed = match local_density(&phi, &n, p) {
            Ok(v) => v.value,
            Err(Error::ZeroTargetUnbounded) => continue,
            Err(e) => panic!("{e} for {phi:?}"),
        };
        let oracle = match stabilized_density(&phi, &n, p) {
            Ok(c) => c.density,
            Err(Error::BudgetExceeded(_)) => continue,
            Err(e) => panic!("oracle: {e} for {phi:?} n={n} p={p}"),
        };
        assert_eq!(closed, oracle, "p={p} n={n} phi={phi:?}");
        checked += 1;
    }
    assert!(checked >= 150, "only {checked} instances completed");
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

#[test]
fn four_squares_densities() {
    let f: PolygonalSum = "P4+P4+P4+P4".parse().unwrap();
    let lat = lattice_from_sum(&f).unwrap();
    // 1 - 1/p^2 at an odd prime not dividing n
    assert_eq!(beta(&f, 1, 3).unwrap().value, rat(8, 9));
    assert_eq!(beta(&f, 1, 5).unwrap().value, rat(24, 25));
    for n in [1u64, 2, 3, 6, 9] {
        for p in [2u64, 3] {
            let oracle = stabilized_lattice_density(&lat, &lat.target(n), p).unwrap().density;
            assert_eq!(beta(&f, n, p).unwrap().value, oracle, "n={n} p={p}");
        }
    }
}

#[test]
fn triangular_density_at_two() {
    let f: PolygonalSum = "P3".parse().unwrap();
    let lat = lattice_from_sum(&f).unwrap();
    let oracle = stabilized_lattice_density(&lat, &lat.target(1), 2).unwrap();
    assert_eq!(beta(&f, 1, 2).unwrap().value, oracle.density);
}

#[test]
fn depth_two_betas_match_oracle() {
    let sums = ["P3+P3", "P3+2*P5", "P5+3*P5", "P4+P7", "P5+2*P9", "P7+2*P5", "P8+P8"];
    for s in sums {
        let f: PolygonalSum = s.parse().unwrap();
        let lat = lattice_from_sum(&f).unwrap();
        for n in 0..=10u64 {
            for p in [2u64, 3, 5, 7] {
                let closed = beta(&f, n, p).unwrap().value;
                let oracle = match stabilized_lattice_density(&lat, &lat.target(n), p) {
                    Ok(c) => c.density,
                    Err(Error::BudgetExceeded(_)) => continue,
                    Err(e) => panic!("{s} n={n} p={p}: {e}"),
                };
                assert_eq!(closed, oracle, "{s} n={n} p={p}");
            }
        }
    }
}

#[test]
fn odd_prime_rejects_blocks() {
    let phi = QuadraticPolynomial::default().with_hyperbolic(1, 0, 0);
    assert!(matches!(local_density(&phi, &BigInt::from(1), 3), Err(Error::OddPrimeBlocks(3))));
    let phi = QuadraticPolynomial::diagonal(&[(1, 0)]);
    assert!(matches!(local_density(&phi, &BigInt::from(1), 9), Err(Error::NotPrime(9))));
}

fn arb_phi() -> impl Strategy<Value = (QuadraticPolynomial, u64)> {
    let coeff = -6i64..=6;
    (
        prop::sample::select(vec![2u64, 3, 5]),
        prop::collection::vec((coeff.clone(), coeff.clone()), 1..=2),
        prop::option::of((0..2u8, coeff.clone(), coeff.clone(), coeff)),
    )
        .prop_map(|(p, diag, block)| {
            let mut phi = QuadraticPolynomial::diagonal(&diag);
            if let (2, Some((kind, b, c, d))) = (p, block) {
                phi = if kind == 0 { phi.with_hyperbolic(b, c, d) } else { phi.with_anisotropic(b, c, d) };
            }
            (phi, p)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// `I_p(n; phi) = I_p(n - phi(v); phi(x + v) - phi(v))` for integer `v`.
    #[test]
    fn density_is_translation_invariant((phi, p) in arb_phi(), n in -12i64..=12, shift in prop::collection::vec(-3i64..=3, 4)) {
        prop_assume!(!phi.is_zero());
        let v: Vec<BigInt> = shift.iter().take(phi.rank()).map(|&s| BigInt::from(s)).collect();
        let (moved, constant) = phi.translate(&v);
        let n = BigInt::from(n);
        let a = local_density(&phi, &n, p);
        let b = local_density(&moved, &(&n - &constant), p);
        match (a, b) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a.value, b.value),
            (Err(Error::ZeroTargetUnbounded), _) | (_, Err(Error::ZeroTargetUnbounded)) => {}
            (a, b) => prop_assert!(false, "{:?} vs {:?}", a.map(|d| d.value), b.map(|d| d.value)),
        }
    }

    #[test]
    fn densities_are_non_negative((phi, p) in arb_phi(), n in 1i64..=30) {
        prop_assume!(!phi.is_zero());
        if let Ok(d) = local_density(&phi, &BigInt::from(n), p) {
            prop_assert!(d.value >= BigRational::from_integer(0.into()));
        }
    }
}
