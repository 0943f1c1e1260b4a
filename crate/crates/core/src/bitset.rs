//! Fixed-length bitsets used by the representability sieve.

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bitset {
    words: Vec<u64>,
    len: usize,
}

impl Bitset {
    /// An empty set over `0..len`.
    pub fn new(len: usize) -> Self {
        Bitset {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn from_words(words: Vec<u64>, len: usize) -> Option<Self> {
        if words.len() != len.div_ceil(64) {
            return None;
        }
        let mut b = Bitset { words, len };
        b.clear_tail();
        Some(b)
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        i < self.len && (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i >> 6] |= 1 << (i & 63);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }

    /// Word `wi` of `self << shift` (bits shifted towards higher indices).
    #[inline]
    fn shifted_word(&self, wi: usize, shift: usize) -> u64 {
        let ws = shift >> 6;
        let bs = shift & 63;
        if wi < ws {
            return 0;
        }
        let src = wi - ws;
        let lo = self.words.get(src).copied().unwrap_or(0);
        if bs == 0 {
            lo
        } else {
            let hi_part = lo << bs;
            let carry = if src >= 1 {
                self.words.get(src - 1).copied().unwrap_or(0) >> (64 - bs)
            } else {
                0
            };
            hi_part | carry
        }
    }

    /// `self |= src << shift`, truncated to `self.len()`.
    pub fn or_shifted(&mut self, src: &Bitset, shift: usize) {
        if shift >= self.len {
            return;
        }
        let first = shift >> 6;
        for wi in first..self.words.len() {
            self.words[wi] |= src.shifted_word(wi, shift);
        }
        self.clear_tail();
    }

    /// The sumset `{ s + d : s in self, d in shifts }` truncated to `self.len()`.
    pub fn sumset(&self, shifts: &[usize]) -> Bitset {
        let mut out = Bitset::new(self.len);
        for &s in shifts {
            out.or_shifted(self, s);
        }
        out
    }

    /// Least index `>= start` that is not set, if any.
    pub fn first_zero_from(&self, start: usize) -> Option<usize> {
        if start >= self.len {
            return None;
        }
        let mut wi = start >> 6;
        let mut w = !self.words[wi] & (!0u64 << (start & 63));
        loop {
            if w != 0 {
                let i = wi * 64 + w.trailing_zeros() as usize;
                return (i < self.len).then_some(i);
            }
            wi += 1;
            if wi >= self.words.len() {
                return None;
            }
            w = !self.words[wi];
        }
    }

    /// Least index `>= start` missing from `self + shifts`, computed word by
    /// word so that sums with a small gap stop early.
    pub fn first_gap_of_sumset(&self, shifts: &[usize], start: usize) -> Option<usize> {
        if start >= self.len {
            return None;
        }
        let nwords = self.words.len();
        for wi in (start >> 6)..nwords {
            let mut acc = 0u64;
            for &s in shifts {
                acc |= self.shifted_word(wi, s);
                if acc == !0 {
                    break;
                }
            }
            let mut missing = !acc;
            if wi == start >> 6 {
                missing &= !0u64 << (start & 63);
            }
            if missing != 0 {
                let i = wi * 64 + missing.trailing_zeros() as usize;
                return (i < self.len).then_some(i);
            }
        }
        None
    }

    fn clear_tail(&mut self) {
        let r = self.len & 63;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive_sumset(a: &[usize], shifts: &[usize], len: usize) -> Vec<bool> {
        let mut out = vec![false; len];
        for &x in a {
            for &s in shifts {
                if x + s < len {
                    out[x + s] = true;
                }
            }
        }
        out
    }

    #[test]
    fn first_zero_basic() {
        let mut b = Bitset::new(130);
        for i in 0..128 {
            b.set(i);
        }
        assert_eq!(b.first_zero_from(0), Some(128));
        b.set(128);
        b.set(129);
        assert_eq!(b.first_zero_from(0), None);
    }

    proptest! {
        #[test]
        fn sumset_matches_naive(
            elems in prop::collection::vec(0usize..300, 0..40),
            shifts in prop::collection::vec(0usize..300, 1..10),
            len in 1usize..300,
        ) {
            let mut b = Bitset::new(len);
            let elems: Vec<usize> = elems.into_iter().filter(|&x| x < len).collect();
            for &x in &elems { b.set(x); }
            let s = b.sumset(&shifts);
            let naive = naive_sumset(&elems, &shifts, len);
            for i in 0..len {
                prop_assert_eq!(s.get(i), naive[i]);
            }
            let gap = naive.iter().position(|&x| !x);
            prop_assert_eq!(b.first_gap_of_sumset(&shifts, 0), gap);
            prop_assert_eq!(s.first_zero_from(0), gap);
        }
    }
}
