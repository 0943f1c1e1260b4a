//! Depth-two truants and the stability rule for large polygon parameters.
//!
//! If `F'` has finite truant `t'` and `F` is obtained by replacing `m_i` with
//! anything at least `4 + floor(t' / a_i)`, then every `P_{m_i}` value that
//! could matter below `t'` is one of `0, 1` (the next value is `m_i - 3 > t' / a_i`)
//! and the truant of `F` no longer depends on `m_i`. Tail cells of the table
//! are certified with exactly that rule, plus sampled spot checks.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::polygonal::{truant, PolygonalSum};

/// Offsets above a threshold at which the stable truant is re-checked.
pub const TAIL_SAMPLE_OFFSETS: [u64; 10] = [0, 1, 2, 3, 5, 8, 13, 50, 200, 1000];

/// `4 + floor(t' / a)`.
pub fn truant_threshold(t_prime: u64, coeff: u64) -> u64 {
    4 + t_prime / coeff
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StableTruant {
    pub threshold: u64,
    pub stable_truant: u64,
    /// `(m_i, truant)` spot checks at and above the threshold.
    pub samples: Vec<(u64, u64)>,
}

fn finite_truant(sum: &PolygonalSum, cap: u64) -> Result<u64> {
    truant(sum, cap)?.value().ok_or(Error::UniversalInput(cap))
}

/// Threshold and stable truant for raising the polygon of term `index` of
/// `f_prime`, spot-checked at [`TAIL_SAMPLE_OFFSETS`] above the threshold.
pub fn stable_truant_threshold(
    f_prime: &PolygonalSum,
    index: usize,
    cap: u64,
) -> Result<StableTruant> {
    let term = *f_prime
        .terms()
        .get(index)
        .ok_or_else(|| Error::Domain(format!("term index {index} out of range")))?;
    let t_prime = finite_truant(f_prime, cap)?;
    let threshold = truant_threshold(t_prime, term.coeff);
    let stable = finite_truant(&f_prime.with_polygon(index, threshold)?, cap)?;
    if stable > t_prime {
        return Err(Error::Consistency(format!(
            "stable truant {stable} exceeds the truant {t_prime} of {f_prime}"
        )));
    }
    let mut samples = Vec::new();
    for off in TAIL_SAMPLE_OFFSETS {
        let m = threshold + off;
        let t = finite_truant(&f_prime.with_polygon(index, m)?, cap)?;
        if t != stable {
            return Err(Error::Consistency(format!(
                "raising term {index} of {f_prime} to P{m} gives truant {t}, expected {stable}"
            )));
        }
        samples.push((m, t));
    }
    Ok(StableTruant { threshold, stable_truant: stable, samples })
}

/// A table header: one polygon parameter or an open tail `m >= L`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Param {
    Exact(u64),
    AtLeast(u64),
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Exact(m) => write!(f, "{m}"),
            Param::AtLeast(m) => write!(f, ">={m}"),
        }
    }
}

/// Truant of `sum_i coeffs[i] P_{params[i]}`, valid for every choice of
/// parameters in the tails. Tails are removed one at a time: pick some
/// `m' <= L` with truant `c'`; if the threshold `4 + c'/a` is at most `L` the
/// whole tail shares the truant at the threshold.
fn certify(coeffs: &[u64], params: &[Param], cap: u64) -> Result<u64> {
    let Some(i) = params.iter().position(|p| matches!(p, Param::AtLeast(_))) else {
        let pairs: Vec<(u64, u64)> = coeffs
            .iter()
            .zip(params)
            .map(|(&a, p)| match p {
                Param::Exact(m) => (a, *m),
                Param::AtLeast(_) => unreachable!(),
            })
            .collect();
        return finite_truant(&PolygonalSum::from_pairs(&pairs)?, cap);
    };
    let Param::AtLeast(lo) = params[i] else { unreachable!() };
    let with = |m: u64| {
        let mut p = params.to_vec();
        p[i] = Param::Exact(m);
        p
    };
    for m_prime in 3..=lo {
        let c_prime = match certify(coeffs, &with(m_prime), cap) {
            Ok(c) => c,
            Err(Error::UniversalInput(_)) => continue,
            Err(e) => return Err(e),
        };
        let threshold = truant_threshold(c_prime, coeffs[i]);
        if threshold > lo {
            continue;
        }
        let stable = certify(coeffs, &with(threshold), cap)?;
        if stable > c_prime {
            return Err(Error::Consistency(format!(
                "stable truant {stable} exceeds {c_prime} while certifying a tail"
            )));
        }
        for off in TAIL_SAMPLE_OFFSETS {
            let t = certify(coeffs, &with(lo + off), cap)?;
            if t != stable {
                return Err(Error::Consistency(format!(
                    "tail sample m = {} gives truant {t}, expected {stable}",
                    lo + off
                )));
            }
        }
        return Ok(stable);
    }
    Err(Error::Consistency(format!(
        "no parameter at most {lo} yields a threshold inside the tail"
    )))
}

/// One cell: the node `P_{m1} + a2 P_{m2}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Table2Cell {
    pub a2: u64,
    pub m1: Param,
    pub m2: Param,
    pub truant: u64,
}

impl Table2Cell {
    pub fn is_tail(&self) -> bool {
        matches!(self.m1, Param::AtLeast(_)) || matches!(self.m2, Param::AtLeast(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Table2 {
    pub cap: u64,
    pub cells: Vec<Table2Cell>,
}

impl Table2 {
    pub fn get(&self, a2: u64, m1: Param, m2: Param) -> Option<u64> {
        self.cells
            .iter()
            .find(|c| c.a2 == a2 && c.m1 == m1 && c.m2 == m2)
            .map(|c| c.truant)
    }

    pub fn finite_cells(&self) -> usize {
        self.cells.iter().filter(|c| !c.is_tail()).count()
    }

    pub fn tail_cells(&self) -> usize {
        self.cells.iter().filter(|c| c.is_tail()).count()
    }

    /// Cells of `self` whose truant differs from `other` (or is missing
    /// there), as `(cell, other value)`.
    pub fn diff<'a>(&'a self, other: &Table2) -> Vec<(&'a Table2Cell, Option<u64>)> {
        self.cells
            .iter()
            .filter_map(|c| {
                let o = other.get(c.a2, c.m1, c.m2);
                (o != Some(c.truant)).then_some((c, o))
            })
            .collect()
    }
}

const ROWS: [Param; 6] = [
    Param::Exact(3),
    Param::Exact(4),
    Param::Exact(5),
    Param::Exact(7),
    Param::Exact(8),
    Param::AtLeast(9),
];

fn columns(a2: u64) -> Vec<Param> {
    use Param::*;
    match a2 {
        1 => vec![Exact(3), Exact(4), Exact(5), Exact(7), Exact(8), AtLeast(9)],
        2 => vec![Exact(3), Exact(4), Exact(5), Exact(7), Exact(8), Exact(9), AtLeast(10)],
        _ => vec![Exact(5)],
    }
}

/// Published depth-two truants, row-major per coefficient block.
const EXPECTED: [(u64, [&[u64]; 6]); 3] = [
    (
        1,
        [
            &[5, 8, 9, 9, 12, 5],
            &[8, 3, 20, 3, 3, 3],
            &[9, 20, 11, 10, 4, 4],
            &[9, 3, 10, 3, 3, 3],
            &[12, 3, 4, 3, 3, 3],
            &[5, 3, 4, 3, 3, 3],
        ],
    ),
    (
        2,
        [
            &[4, 5, 10, 5, 4, 4, 4],
            &[4, 5, 6, 5, 4, 4, 4],
            &[9, 7, 8, 12, 6, 7, 6],
            &[4, 5, 6, 5, 4, 4, 4],
            &[4, 5, 6, 5, 4, 4, 4],
            &[4, 5, 6, 5, 4, 4, 4],
        ],
    ),
    (3, [&[6], &[6], &[9], &[6], &[6], &[6]]),
];

/// The embedded reference table.
pub fn expected_depth2_table() -> Table2 {
    let mut cells = Vec::new();
    for (a2, rows) in EXPECTED {
        for (row, values) in ROWS.iter().zip(rows) {
            for (col, &v) in columns(a2).iter().zip(values.iter()) {
                cells.push(Table2Cell { a2, m1: *col, m2: *row, truant: v });
            }
        }
    }
    Table2 { cap: 0, cells }
}

/// The largest value in the reference table; smaller caps cannot see it.
pub const TABLE2_MAX_VALUE: u64 = 20;

/// Computes every depth-two truant cell, certifying tails with the stability
/// rule. Also checks that a coefficient 3 occurs at depth two only above `P_5`.
pub fn depth2_table(cap: u64) -> Result<Table2> {
    if cap < TABLE2_MAX_VALUE {
        return Err(Error::Domain(format!(
            "cap below max table value {TABLE2_MAX_VALUE}"
        )));
    }
    for m1 in (3..=1000u64).filter(|&m| m != 6) {
        let t1 = finite_truant(&PolygonalSum::from_pairs(&[(1, m1)])?, cap)?;
        if (t1 >= 3) != (m1 == 5) || t1 > 3 {
            return Err(Error::Consistency(format!(
                "P{m1} has truant {t1}; only P5 should allow a second coefficient of 3"
            )));
        }
    }
    let mut cells = Vec::new();
    for a2 in 1..=3u64 {
        for row in ROWS {
            for col in columns(a2) {
                let truant = certify(&[1, a2], &[col, row], cap)?;
                cells.push(Table2Cell { a2, m1: col, m2: row, truant });
            }
        }
    }
    Ok(Table2 { cap, cells })
}
