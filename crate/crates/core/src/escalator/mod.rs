//! Escalator trees over classes of polygonal sums.
//!
//! A class is bounded by `lcm(m_i - 2) <= lcm_bound` and optionally by a
//! minimum polygon parameter. The root is the empty sum (truant 1); a node
//! with truant `t` has children `F + a P_m` with `a_r <= a <= t`, `m != 6`
//! and `m_r <= m` when `a_r = a`. Candidate-universal nodes are leaves.
//!
//! Because children append terms in `(a, m)` order, every node's canonical
//! term list coincides with its insertion order, so no sum appears twice.

mod scan;
mod table;

pub use scan::{
    depth2_parents, scan, scan_quaternary, scan_ternary, RowStatus, ScanOptions, ScanReport,
    ScanRow, DEFAULT_SCAN_BUDGET,
};
pub use table::{
    depth2_table, expected_depth2_table, stable_truant_threshold, truant_threshold, Param,
    StableTruant, Table2, Table2Cell, TAIL_SAMPLE_OFFSETS,
};

use std::collections::BTreeSet;

use serde::Serialize;

use crate::arith::lcm_u64;
use crate::bitset::Bitset;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::polygonal::{represented_set, term_shifts, truant_of_set, PolygonalSum, Term, TruantResult};

/// Default cap on the number of materialized tree nodes.
pub const DEFAULT_NODE_BUDGET: usize = 2_000_000;

/// Which class of sums a tree ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ClassSpec {
    pub lcm_bound: u64,
    pub min_polygon: u64,
    pub cap: u64,
    pub depth_limit: Option<u32>,
}

impl ClassSpec {
    pub fn new(lcm_bound: u64, cap: u64) -> Result<Self> {
        Self::with_min_polygon(lcm_bound, 3, cap)
    }

    pub fn with_min_polygon(lcm_bound: u64, min_polygon: u64, cap: u64) -> Result<Self> {
        let spec = ClassSpec { lcm_bound, min_polygon, cap, depth_limit: None };
        spec.validate()?;
        Ok(spec)
    }

    pub fn depth_limited(mut self, depth: u32) -> Self {
        self.depth_limit = Some(depth);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.cap == 0 {
            return Err(Error::Domain("cap must be >= 1".into()));
        }
        if self.min_polygon < 3 {
            return Err(Error::Domain(format!(
                "min polygon {} must be >= 3",
                self.min_polygon
            )));
        }
        if self.lcm_bound < self.min_polygon - 2 {
            return Err(Error::Domain(format!(
                "lcm bound {} is below min polygon {} - 2",
                self.lcm_bound, self.min_polygon
            )));
        }
        Ok(())
    }

    /// Whether `sum` lies in the class.
    pub fn contains(&self, sum: &PolygonalSum) -> bool {
        sum.terms().iter().all(|t| t.polygon >= self.min_polygon)
            && sum.lcm_of_shifted_polygons().is_some_and(|l| l <= self.lcm_bound)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EscalatorNode {
    pub sum: PolygonalSum,
    pub truant: TruantResult,
    pub parent: Option<usize>,
    pub depth: u32,
}

impl EscalatorNode {
    pub fn root() -> Self {
        EscalatorNode {
            sum: PolygonalSum::zero(),
            truant: TruantResult::Truant(1),
            parent: None,
            depth: 0,
        }
    }
}

/// The `(a, m)` extensions allowed below a node with last term `last` and
/// truant `t`, restricted to `m <= max_polygon`. Order: `a` ascending, then
/// `m` ascending.
pub fn child_terms(
    last: Option<Term>,
    t: u64,
    min_polygon: u64,
    max_polygon: u64,
) -> Vec<(u64, u64)> {
    let a_lo = last.map_or(1, |l| l.coeff);
    let mut out = Vec::new();
    for a in a_lo..=t {
        let m_lo = match last {
            Some(l) if l.coeff == a => l.polygon.max(min_polygon),
            _ => min_polygon.max(3),
        };
        for m in m_lo..=max_polygon {
            if m != 6 {
                out.push((a, m));
            }
        }
    }
    out
}

fn class_child_terms(sum: &PolygonalSum, t: u64, spec: &ClassSpec) -> Vec<(u64, u64)> {
    let lcm = sum.lcm_of_shifted_polygons().unwrap_or(u64::MAX);
    let max_polygon = spec.lcm_bound.saturating_add(2);
    child_terms(sum.terms().last().copied(), t, spec.min_polygon, max_polygon)
        .into_iter()
        .filter(|&(_, m)| lcm_u64(lcm, m - 2).is_some_and(|l| l <= spec.lcm_bound))
        .collect()
}

/// Children of `node` in the class, each with its truant at `spec.cap`.
pub fn children(node: &EscalatorNode, spec: &ClassSpec) -> Result<Vec<EscalatorNode>> {
    let t = match node.truant {
        TruantResult::Truant(t) => t,
        TruantResult::CandidateUniversal { checked_up_to } => {
            return Err(Error::LeafNode(checked_up_to))
        }
    };
    let set = represented_set(&node.sum, spec.cap);
    class_child_terms(&node.sum, t, spec)
        .into_iter()
        .map(|(a, m)| {
            let term = Term::new(a, m)?;
            let child = set.sumset(&term_shifts(term, set.len()));
            Ok(EscalatorNode {
                sum: node.sum.with_term(a, m)?,
                truant: truant_of_set(&child, spec.cap),
                parent: None,
                depth: node.depth + 1,
            })
        })
        .collect()
}

/// Whether `sum` (in canonical order) is a node of the unrestricted
/// escalator tree, judged with truants at `cap`.
pub fn is_tree_node(sum: &PolygonalSum, cap: u64) -> bool {
    let mut set = Bitset::new(cap as usize + 1);
    set.set(0);
    let mut last: Option<Term> = None;
    for &term in sum.terms() {
        let Some(t) = truant_of_set(&set, cap).value() else {
            return false;
        };
        let ok_order = match last {
            None => true,
            Some(l) => (l.coeff, l.polygon) <= (term.coeff, term.polygon),
        };
        if term.polygon == 6 || term.coeff > t || !ok_order {
            return false;
        }
        set = set.sumset(&term_shifts(term, set.len()));
        last = Some(term);
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TruantSetReport {
    pub truants: BTreeSet<u64>,
    pub gamma: Option<u64>,
    /// True when every branch ended at a candidate-universal leaf; false when
    /// the depth limit cut a branch with a finite truant.
    pub complete: bool,
    pub node_count: usize,
    pub candidate_leaves: usize,
    pub truncated: usize,
}

#[derive(Clone, Debug)]
pub struct EscalatorTree {
    pub spec: ClassSpec,
    pub nodes: Vec<EscalatorNode>,
    pub children: Vec<Vec<usize>>,
    pub report: TruantSetReport,
}

/// Nested view of a tree for serialization.
#[derive(Clone, Debug, Serialize)]
pub struct TreeDump {
    pub sum: Vec<(u64, u64)>,
    pub truant: Option<u64>,
    pub checked_up_to: u64,
    pub depth: u32,
    pub children: Vec<TreeDump>,
}

impl EscalatorTree {
    pub fn root(&self) -> &EscalatorNode {
        &self.nodes[0]
    }

    pub fn at_depth(&self, depth: u32) -> impl Iterator<Item = &EscalatorNode> {
        self.nodes.iter().filter(move |n| n.depth == depth)
    }

    pub fn dump(&self) -> TreeDump {
        self.dump_from(0)
    }

    fn dump_from(&self, i: usize) -> TreeDump {
        let n = &self.nodes[i];
        TreeDump {
            sum: n.sum.pairs(),
            truant: n.truant.value(),
            checked_up_to: self.spec.cap,
            depth: n.depth,
            children: self.children[i].iter().map(|&c| self.dump_from(c)).collect(),
        }
    }
}

/// Breadth-first materialization of the escalator tree for `spec`.
///
/// Each frontier level is expanded in parallel; represented sets are carried
/// along so that a child costs one sumset against its parent's set.
pub fn build_tree(spec: &ClassSpec, exec: Exec, node_budget: usize) -> Result<EscalatorTree> {
    spec.validate()?;
    let len = spec.cap as usize + 1;
    let mut root_set = Bitset::new(len);
    root_set.set(0);

    let mut nodes = vec![EscalatorNode::root()];
    let mut kids: Vec<Vec<usize>> = vec![Vec::new()];
    let mut frontier: Vec<(usize, Bitset)> = vec![(0, root_set)];
    let mut truncated = 0usize;

    while !frontier.is_empty() {
        let mut groups: Vec<(usize, &Bitset, Vec<(u64, u64)>)> = Vec::new();
        let mut planned = 0usize;
        for (idx, set) in &frontier {
            let node = &nodes[*idx];
            let Some(t) = node.truant.value() else { continue };
            if spec.depth_limit.is_some_and(|d| node.depth >= d) {
                truncated += 1;
                continue;
            }
            let terms = class_child_terms(&node.sum, t, spec);
            planned += terms.len();
            groups.push((*idx, set, terms));
        }
        if nodes.len() + planned > node_budget {
            return Err(Error::ResourceLimit(format!(
                "escalator tree exceeds {node_budget} nodes"
            )));
        }
        let expanded = exec.try_map(&groups, |(idx, set, terms)| {
            let parent = &nodes[*idx];
            terms
                .iter()
                .map(|&(a, m)| {
                    let child = set.sumset(&term_shifts(Term::new(a, m)?, len));
                    let node = EscalatorNode {
                        sum: parent.sum.with_term(a, m)?,
                        truant: truant_of_set(&child, spec.cap),
                        parent: Some(*idx),
                        depth: parent.depth + 1,
                    };
                    Ok((node, child))
                })
                .collect::<Result<Vec<_>>>()
        })?;
        let mut next = Vec::new();
        for batch in expanded {
            for (node, set) in batch {
                let id = nodes.len();
                kids[node.parent.unwrap()].push(id);
                nodes.push(node);
                kids.push(Vec::new());
                next.push((id, set));
            }
        }
        frontier = next;
    }

    let truants: BTreeSet<u64> = nodes.iter().filter_map(|n| n.truant.value()).collect();
    let candidate_leaves = nodes.iter().filter(|n| n.truant.is_candidate_universal()).count();
    let report = TruantSetReport {
        gamma: truants.iter().next_back().copied(),
        truants,
        complete: truncated == 0,
        node_count: nodes.len(),
        candidate_leaves,
        truncated,
    };
    Ok(EscalatorTree { spec: *spec, nodes, children: kids, report })
}
