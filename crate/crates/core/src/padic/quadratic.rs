use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

/// `b x^2 + c x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagonalTerm {
    pub b: BigInt,
    pub c: BigInt,
}

/// A 2-variable block `b * q(y1, y2) + c y1 + d y2` where `q` is either
/// `y1 y2` (hyperbolic) or `y1^2 + y1 y2 + y2^2` (anisotropic).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockTerm {
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

/// `phi(x, y, z) = Σ (b_i x_i^2 + c_i x_i) + Σ hyperbolic + Σ anisotropic`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticPolynomial {
    pub diagonal: Vec<DiagonalTerm>,
    pub hyperbolic: Vec<BlockTerm>,
    pub anisotropic: Vec<BlockTerm>,
}

impl QuadraticPolynomial {
    pub fn diagonal(terms: &[(i64, i64)]) -> Self {
        QuadraticPolynomial {
            diagonal: terms
                .iter()
                .map(|&(b, c)| DiagonalTerm { b: b.into(), c: c.into() })
                .collect(),
            ..Default::default()
        }
    }

    pub fn with_diagonal(mut self, b: i64, c: i64) -> Self {
        self.diagonal.push(DiagonalTerm { b: b.into(), c: c.into() });
        self
    }

    pub fn with_hyperbolic(mut self, b: i64, c: i64, d: i64) -> Self {
        self.hyperbolic.push(BlockTerm { b: b.into(), c: c.into(), d: d.into() });
        self
    }

    pub fn with_anisotropic(mut self, b: i64, c: i64, d: i64) -> Self {
        self.anisotropic.push(BlockTerm { b: b.into(), c: c.into(), d: d.into() });
        self
    }

    /// `r = #diagonal + 2 (#hyperbolic + #anisotropic)`.
    pub fn rank(&self) -> usize {
        self.diagonal.len() + 2 * (self.hyperbolic.len() + self.anisotropic.len())
    }

    pub fn has_blocks(&self) -> bool {
        !self.hyperbolic.is_empty() || !self.anisotropic.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.diagonal.iter().all(|t| t.b.is_zero() && t.c.is_zero())
            && self
                .hyperbolic
                .iter()
                .chain(&self.anisotropic)
                .all(|t| t.b.is_zero() && t.c.is_zero() && t.d.is_zero())
    }

    /// Evaluates `phi` at a point given in variable order
    /// `x_1..x_{r1}, y_{1,1}, y_{1,2}, ..., z_{1,1}, z_{1,2}, ...`.
    pub fn evaluate(&self, point: &[BigInt]) -> BigInt {
        assert_eq!(point.len(), self.rank());
        let mut it = point.iter();
        let mut acc = BigInt::zero();
        for t in &self.diagonal {
            let x = it.next().unwrap();
            acc += &t.b * x * x + &t.c * x;
        }
        for t in &self.hyperbolic {
            let (y1, y2) = (it.next().unwrap(), it.next().unwrap());
            acc += &t.b * y1 * y2 + &t.c * y1 + &t.d * y2;
        }
        for t in &self.anisotropic {
            let (z1, z2) = (it.next().unwrap(), it.next().unwrap());
            acc += &t.b * (z1 * z1 + z1 * z2 + z2 * z2) + &t.c * z1 + &t.d * z2;
        }
        acc
    }

    /// `phi(x + v)` expanded back into the same block shape.
    pub fn translate(&self, shift: &[BigInt]) -> (Self, BigInt) {
        assert_eq!(shift.len(), self.rank());
        let mut it = shift.iter();
        let mut out = QuadraticPolynomial::default();
        let mut constant = BigInt::zero();
        for t in &self.diagonal {
            let v = it.next().unwrap();
            // b (x+v)^2 + c (x+v) = b x^2 + (2bv + c) x + (b v^2 + c v)
            out.diagonal.push(DiagonalTerm { b: t.b.clone(), c: &t.b * v * 2 + &t.c });
            constant += &t.b * v * v + &t.c * v;
        }
        for t in &self.hyperbolic {
            let (v1, v2) = (it.next().unwrap(), it.next().unwrap());
            // b (y1+v1)(y2+v2) + c(y1+v1) + d(y2+v2)
            out.hyperbolic.push(BlockTerm {
                b: t.b.clone(),
                c: &t.b * v2 + &t.c,
                d: &t.b * v1 + &t.d,
            });
            constant += &t.b * v1 * v2 + &t.c * v1 + &t.d * v2;
        }
        for t in &self.anisotropic {
            let (v1, v2) = (it.next().unwrap(), it.next().unwrap());
            out.anisotropic.push(BlockTerm {
                b: t.b.clone(),
                c: &t.b * (v1 * 2 + v2) + &t.c,
                d: &t.b * (v2 * 2 + v1) + &t.d,
            });
            constant += &t.b * (v1 * v1 + v1 * v2 + v2 * v2) + &t.c * v1 + &t.d * v2;
        }
        (out, constant)
    }
}
