//! Fixed-width packed bit vectors.
//!
//! Contexts, extents, and intents are all sets over dense index ranges, so
//! everything downstream reduces to word-level AND/OR/subset tests on these.

const WORD_BITS: usize = 64;

/// A fixed-width set of `usize` indices packed into `u64` words.
///
/// The width is set at construction and never changes; bits at positions
/// `>= width` are always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitSet {
    width: usize,
    words: Vec<u64>,
}

impl BitSet {
    pub fn empty(width: usize) -> Self {
        let n = width.div_ceil(WORD_BITS);
        BitSet { width, words: vec![0; n] }
    }

    pub fn full(width: usize) -> Self {
        let mut s = Self::empty(width);
        for w in s.words.iter_mut() {
            *w = u64::MAX;
        }
        s.mask_tail();
        s
    }

    pub fn from_indices(width: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(width);
        for i in indices {
            s.insert(i);
        }
        s
    }

    fn mask_tail(&mut self) {
        let used = self.width % WORD_BITS;
        if used != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << used) - 1;
            }
        }
        if self.width == 0 {
            self.words.iter_mut().for_each(|w| *w = 0);
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Number of set bits.
    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Inserts index `i`. Panics if `i >= width`; widths are fixed invariants
    /// here, not growable capacities.
    pub fn insert(&mut self, i: usize) {
        assert!(i < self.width, "bit index {} out of width {}", i, self.width);
        self.words[i / WORD_BITS] |= 1u64 << (i % WORD_BITS);
    }

    pub fn remove(&mut self, i: usize) {
        assert!(i < self.width, "bit index {} out of width {}", i, self.width);
        self.words[i / WORD_BITS] &= !(1u64 << (i % WORD_BITS));
    }

    pub fn contains(&self, i: usize) -> bool {
        if i >= self.width {
            return false;
        }
        self.words[i / WORD_BITS] & (1u64 << (i % WORD_BITS)) != 0
    }

    pub fn is_subset(&self, other: &BitSet) -> bool {
        debug_assert_eq!(self.width, other.width);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn intersect_with(&mut self, other: &BitSet) {
        debug_assert_eq!(self.width, other.width);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn union_with(&mut self, other: &BitSet) {
        debug_assert_eq!(self.width, other.width);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersection(&self, other: &BitSet) -> BitSet {
        let mut out = self.clone();
        out.intersect_with(other);
        out
    }

    pub fn union(&self, other: &BitSet) -> BitSet {
        let mut out = self.clone();
        out.union_with(other);
        out
    }

    pub fn intersects(&self, other: &BitSet) -> bool {
        debug_assert_eq!(self.width, other.width);
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    /// All indices below `width` not in this set.
    pub fn complement(&self) -> BitSet {
        let mut out = self.clone();
        for w in out.words.iter_mut() {
            *w = !*w;
        }
        out.mask_tail();
        out
    }

    /// Keeps only bits at positions strictly below `i`.
    pub fn truncate_below(&mut self, i: usize) {
        for (k, w) in self.words.iter_mut().enumerate() {
            let lo = k * WORD_BITS;
            if lo >= i {
                *w = 0;
            } else if lo + WORD_BITS > i {
                *w &= (1u64 << (i - lo)) - 1;
            }
        }
    }

    /// Iterates set indices in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut rem = w;
            std::iter::from_fn(move || {
                if rem == 0 {
                    None
                } else {
                    let b = rem.trailing_zeros() as usize;
                    rem &= rem - 1;
                    Some(k * WORD_BITS + b)
                }
            })
        })
    }

    pub fn indices(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl std::fmt::Debug for BitSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BitSet[{}]{:?}", self.width, self.indices())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_and_full() {
        let e = BitSet::empty(70);
        assert_eq!(e.len(), 0);
        assert!(e.is_empty());
        let f = BitSet::full(70);
        assert_eq!(f.len(), 70);
        assert!(e.is_subset(&f));
        assert!(!f.is_subset(&e));
        assert!(f.contains(69));
        assert!(!f.contains(70));
    }

    #[test]
    fn insert_remove_contains() {
        let mut s = BitSet::empty(100);
        s.insert(0);
        s.insert(63);
        s.insert(64);
        s.insert(99);
        assert_eq!(s.indices(), vec![0, 63, 64, 99]);
        s.remove(64);
        assert_eq!(s.indices(), vec![0, 63, 99]);
        assert!(s.contains(63));
        assert!(!s.contains(64));
    }

    #[test]
    fn set_ops() {
        let a = BitSet::from_indices(10, [1, 3, 5]);
        let b = BitSet::from_indices(10, [3, 5, 7]);
        assert_eq!(a.intersection(&b).indices(), vec![3, 5]);
        assert_eq!(a.union(&b).indices(), vec![1, 3, 5, 7]);
        assert!(a.intersects(&b));
        assert!(!a.intersects(&BitSet::from_indices(10, [0, 2])));
        assert!(BitSet::from_indices(10, [3]).is_subset(&a));
    }

    #[test]
    fn complement_masks_tail() {
        let a = BitSet::from_indices(70, [0, 64, 69]);
        let c = a.complement();
        assert_eq!(c.len(), 67);
        assert!(!c.contains(0) && !c.contains(64) && !c.contains(69));
        assert!(c.contains(68));
        assert_eq!(a.union(&c), BitSet::full(70));
        assert!(a.intersection(&c).is_empty());
        assert_eq!(c.complement(), a);
    }

    #[test]
    fn truncate_below_word_boundaries() {
        let mut s = BitSet::full(130);
        s.truncate_below(65);
        assert_eq!(s.len(), 65);
        assert!(s.contains(64));
        assert!(!s.contains(65));
        let mut t = BitSet::full(130);
        t.truncate_below(0);
        assert!(t.is_empty());
    }

    #[test]
    fn zero_width() {
        let s = BitSet::empty(0);
        assert_eq!(s.len(), 0);
        assert_eq!(BitSet::full(0).len(), 0);
        assert!(!s.contains(0));
    }
}
