//! The checked-in list of ternary sums that are confirmed universal.

use crate::error::{Error, Result};
use crate::polygonal::PolygonalSum;

/// Raw corpus text, one canonical sum per line; `#` starts a comment.
pub const CONFIRMED_TERNARY: &str = include_str!("../data/table1_confirmed.txt");

pub const CONFIRMED_TERNARY_COUNT: usize = 197;

/// Parses corpus text in the checked-in format.
pub fn parse_corpus(text: &str) -> Result<Vec<PolygonalSum>> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i, l.split('#').next().unwrap().trim()))
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| {
            l.parse::<PolygonalSum>()
                .map_err(|e| Error::Parse(format!("corpus line {}: {e}", i + 1)))
        })
        .collect()
}

pub fn confirmed_ternary_sums() -> Vec<PolygonalSum> {
    parse_corpus(CONFIRMED_TERNARY).expect("embedded corpus parses")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn corpus_has_197_distinct_ternary_sums() {
        let sums = confirmed_ternary_sums();
        assert_eq!(sums.len(), CONFIRMED_TERNARY_COUNT);
        assert!(sums.iter().all(|s| s.rank() == 3));
        let distinct: HashSet<_> = sums.iter().collect();
        assert_eq!(distinct.len(), sums.len());
        assert!(sums.iter().all(|s| s.terms().iter().all(|t| t.polygon != 6)));
    }

    #[test]
    fn corpus_lines_are_canonical() {
        for line in CONFIRMED_TERNARY.lines().filter(|l| !l.starts_with('#')) {
            let s: PolygonalSum = line.parse().unwrap();
            assert_eq!(s.to_string(), line);
        }
    }

    #[test]
    fn bad_line_is_reported() {
        let err = parse_corpus("P3+P3+P3\nP3+\n").unwrap_err();
        assert!(err.to_string().contains("line 2"));
    }
}
