//! Depth-three and depth-four scans over bounded polygon parameters.
//!
//! Work is split by depth-two parent `P_{m1} + a2 P_{m2}`. Each parent's
//! represented set is computed once; children are then judged with
//! [`Bitset::first_gap_of_sumset`], which stops at the first gap instead of
//! materializing the child's set. Rows are emitted in tree order regardless
//! of scheduling, so a scan can be resumed by skipping the rows already
//! written.

use std::fmt;

use serde::Serialize;

use crate::bitset::Bitset;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::polygonal::{represented_set, term_shifts, truant, truant_of_set, PolygonalSum, Term};

use super::child_terms;

pub const DEFAULT_SCAN_BUDGET: u64 = 10_000_000;

/// Parents handled per parallel batch.
const CHUNK: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowStatus {
    Truant(u64),
    CandidateUniversal,
    /// A depth-three node that is itself candidate universal; its children
    /// are not scanned.
    ParentUniversal,
}

impl RowStatus {
    pub fn label(self) -> &'static str {
        match self {
            RowStatus::Truant(_) => "truant",
            RowStatus::CandidateUniversal => "candidate_universal",
            RowStatus::ParentUniversal => "parent-universal",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanRow {
    /// `(a_i, m_i)` in tree order.
    pub terms: Vec<(u64, u64)>,
    pub status: RowStatus,
}

impl fmt::Display for ScanRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (a, m)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            if *a != 1 {
                write!(f, "{a}*")?;
            }
            write!(f, "P{m}")?;
        }
        match self.status {
            RowStatus::Truant(t) => write!(f, " truant {t}"),
            s => write!(f, " {}", s.label()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ScanOptions {
    /// Upper bounds on `m_1, m_2, ...`; length 3 or 4.
    pub bounds: Vec<u64>,
    pub cap: u64,
    /// Rows already produced by an earlier, interrupted run.
    pub skip_rows: u64,
    pub exec: Exec,
    /// Maximum number of rows evaluated in this run.
    pub budget: u64,
}

impl ScanOptions {
    pub fn new(bounds: Vec<u64>, cap: u64) -> Self {
        ScanOptions { bounds, cap, skip_rows: 0, exec: Exec::default(), budget: DEFAULT_SCAN_BUDGET }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ScanReport {
    pub rows: u64,
    pub max_finite_truant: Option<u64>,
    pub max_truant_node: Option<PolygonalSum>,
    pub candidate_universal_nodes: Vec<PolygonalSum>,
    pub parent_universal: u64,
}

impl ScanReport {
    pub fn absorb(&mut self, row: &ScanRow) {
        self.rows += 1;
        let sum = || PolygonalSum::from_pairs(&row.terms).expect("scan rows hold valid terms");
        match row.status {
            RowStatus::Truant(t) => {
                if self.max_finite_truant.map_or(true, |m| t > m) {
                    self.max_finite_truant = Some(t);
                    self.max_truant_node = Some(sum());
                }
            }
            RowStatus::CandidateUniversal => self.candidate_universal_nodes.push(sum()),
            RowStatus::ParentUniversal => self.parent_universal += 1,
        }
    }
}

/// Depth-two parents `(m1, a2, m2)` with `m1 <= b1`, `m2 <= b2` in tree order.
pub fn depth2_parents(b1: u64, b2: u64, cap: u64) -> Result<Vec<(u64, u64, u64)>> {
    let mut out = Vec::new();
    for m1 in (3..=b1).filter(|&m| m != 6) {
        let t1 = truant(&PolygonalSum::from_pairs(&[(1, m1)])?, cap)?
            .value()
            .ok_or(Error::Consistency(format!("P{m1} cannot be universal")))?;
        for (a2, m2) in child_terms(Some(Term::new(1, m1)?), t1, 3, b2) {
            out.push((m1, a2, m2));
        }
    }
    Ok(out)
}

struct Parent {
    pairs: Vec<(u64, u64)>,
    set: Bitset,
    truant: Option<u64>,
}

impl Parent {
    fn new(pairs: Vec<(u64, u64)>, set: Bitset, cap: u64) -> Self {
        let truant = truant_of_set(&set, cap).value();
        Parent { pairs, set, truant }
    }

    fn last(&self) -> Term {
        let &(a, m) = self.pairs.last().unwrap();
        Term { coeff: a, polygon: m }
    }

    fn child_terms(&self, bound: u64) -> Vec<(u64, u64)> {
        match self.truant {
            Some(t) => child_terms(Some(self.last()), t, 3, bound),
            None => Vec::new(),
        }
    }

    fn extend(&self, pairs: &[(u64, u64)]) -> Vec<(u64, u64)> {
        let mut v = self.pairs.clone();
        v.extend_from_slice(pairs);
        v
    }

    fn child_row(&self, a: u64, m: u64) -> ScanRow {
        let shifts = term_shifts(Term { coeff: a, polygon: m }, self.set.len());
        // the child represents everything the parent does below its truant
        let start = self.truant.unwrap() as usize;
        let status = match self.set.first_gap_of_sumset(&shifts, start) {
            Some(g) => RowStatus::Truant(g as u64),
            None => RowStatus::CandidateUniversal,
        };
        ScanRow { terms: self.extend(&[(a, m)]), status }
    }

    fn child(&self, a: u64, m: u64, cap: u64) -> Parent {
        let shifts = term_shifts(Term { coeff: a, polygon: m }, self.set.len());
        Parent::new(self.extend(&[(a, m)]), self.set.sumset(&shifts), cap)
    }
}

fn depth2_parent(&(m1, a2, m2): &(u64, u64, u64), cap: u64) -> Result<Parent> {
    let pairs = vec![(1, m1), (a2, m2)];
    let set = represented_set(&PolygonalSum::from_pairs(&pairs)?, cap);
    Ok(Parent::new(pairs, set, cap))
}

/// A scan of depth `bounds.len()` organised by depth-two parent.
struct Plan<'a> {
    opts: &'a ScanOptions,
}

impl Plan<'_> {
    fn depth(&self) -> usize {
        self.opts.bounds.len()
    }

    /// Rows a depth-`d` node produces: one per child at the last level, a
    /// single marker row if it is candidate universal below the last level.
    fn count(&self, node: &Parent) -> u64 {
        let level = node.pairs.len();
        if node.truant.is_none() {
            return 1;
        }
        let bound = self.opts.bounds[level];
        if level + 1 == self.depth() {
            return node.child_terms(bound).len() as u64;
        }
        node.child_terms(bound)
            .into_iter()
            .map(|(a, m)| self.count(&node.child(a, m, self.opts.cap)))
            .sum()
    }

    fn rows(&self, node: &Parent, out: &mut Vec<ScanRow>) {
        let level = node.pairs.len();
        if node.truant.is_none() {
            out.push(ScanRow { terms: node.pairs.clone(), status: RowStatus::ParentUniversal });
            return;
        }
        let bound = self.opts.bounds[level];
        for (a, m) in node.child_terms(bound) {
            if level + 1 == self.depth() {
                out.push(node.child_row(a, m));
            } else {
                self.rows(&node.child(a, m, self.opts.cap), out);
            }
        }
    }
}

/// Runs a depth-3 or depth-4 scan, handing each row to `sink` in tree order.
pub fn scan<F>(opts: &ScanOptions, mut sink: F) -> Result<ScanReport>
where
    F: FnMut(&ScanRow) -> Result<()>,
{
    let depth = opts.bounds.len();
    if !(3..=4).contains(&depth) {
        return Err(Error::Domain(format!("scan depth must be 3 or 4, got {depth}")));
    }
    if let Some(b) = opts.bounds.iter().find(|&&b| b < 3) {
        return Err(Error::Domain(format!("polygon bound {b} must be >= 3")));
    }
    if opts.cap == 0 {
        return Err(Error::Domain("cap must be >= 1".into()));
    }
    let plan = Plan { opts };
    let parents = depth2_parents(opts.bounds[0], opts.bounds[1], opts.cap)?;
    let mut report = ScanReport::default();

    // Skip whole parents while the resume point lies beyond them.
    let mut next = 0usize;
    let mut offset = 0u64;
    'skip: while next < parents.len() && offset < opts.skip_rows {
        let end = (next + CHUNK).min(parents.len());
        let counts = opts.exec.try_map(&parents[next..end], |p| {
            Ok::<_, Error>(plan.count(&depth2_parent(p, opts.cap)?))
        })?;
        for c in counts {
            if offset + c > opts.skip_rows {
                break 'skip;
            }
            offset += c;
            next += 1;
        }
    }
    let mut trim = opts.skip_rows.saturating_sub(offset);

    let mut evaluated = 0u64;
    while next < parents.len() {
        let end = (next + CHUNK).min(parents.len());
        let batches = opts.exec.try_map(&parents[next..end], |p| {
            let mut rows = Vec::new();
            plan.rows(&depth2_parent(p, opts.cap)?, &mut rows);
            Ok::<_, Error>(rows)
        })?;
        for rows in batches {
            evaluated += rows.len() as u64;
            let skip = trim.min(rows.len() as u64) as usize;
            trim -= skip as u64;
            for row in &rows[skip..] {
                sink(row)?;
                report.absorb(row);
            }
        }
        if evaluated > opts.budget {
            return Err(Error::ResourceLimit(format!(
                "scan evaluated {evaluated} rows, budget {}",
                opts.budget
            )));
        }
        next = end;
    }
    Ok(report)
}

/// Depth-three scan with bounds `(B1, B2, B3)`, collecting the report only.
pub fn scan_ternary(bounds: (u64, u64, u64), cap: u64, exec: Exec) -> Result<ScanReport> {
    let mut opts = ScanOptions::new(vec![bounds.0, bounds.1, bounds.2], cap);
    opts.exec = exec;
    scan(&opts, |_| Ok(()))
}

/// Depth-four scan with bounds `(B1, B2, B3, B4)`.
pub fn scan_quaternary(bounds: (u64, u64, u64, u64), cap: u64, exec: Exec) -> Result<ScanReport> {
    let mut opts = ScanOptions::new(vec![bounds.0, bounds.1, bounds.2, bounds.3], cap);
    opts.exec = exec;
    scan(&opts, |_| Ok(()))
}
