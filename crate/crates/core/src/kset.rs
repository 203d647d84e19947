use std::cmp::Ordering;
use std::fmt;

use crate::combinatorics::colex_cmp;
use crate::error::SetError;

/// A finite set of positive integers, stored sorted ascending.
///
/// Sets of equal size are ordered colexicographically; sets of different
/// sizes are ordered by size first.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct KSet {
    elems: Vec<u32>,
}

impl KSet {
    /// Builds a set from arbitrary-order elements, rejecting zero and duplicates.
    pub fn new(mut elems: Vec<u32>) -> Result<Self, SetError> {
        elems.sort_unstable();
        if elems.first() == Some(&0) {
            return Err(SetError::ZeroElement);
        }
        if let Some(w) = elems.windows(2).find(|w| w[0] == w[1]) {
            return Err(SetError::DuplicateElement(w[0]));
        }
        Ok(KSet { elems })
    }

    pub fn empty() -> Self {
        KSet { elems: Vec::new() }
    }

    pub(crate) fn from_sorted_unchecked(elems: Vec<u32>) -> Self {
        debug_assert!(elems.windows(2).all(|w| w[0] < w[1]));
        KSet { elems }
    }

    pub fn elements(&self) -> &[u32] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn max_element(&self) -> Option<u32> {
        self.elems.last().copied()
    }

    pub fn contains(&self, x: u32) -> bool {
        self.elems.binary_search(&x).is_ok()
    }

    pub fn is_subset_of(&self, other: &KSet) -> bool {
        let mut it = other.elems.iter();
        self.elems.iter().all(|x| it.by_ref().any(|y| y == x))
    }

    /// The set with `x` removed (unchanged if absent).
    pub fn without(&self, x: u32) -> KSet {
        KSet { elems: self.elems.iter().copied().filter(|&y| y != x).collect() }
    }

    /// The set with `x` added (unchanged if present).
    pub fn with(&self, x: u32) -> KSet {
        match self.elems.binary_search(&x) {
            Ok(_) => self.clone(),
            Err(pos) => {
                let mut e = self.elems.clone();
                e.insert(pos, x);
                KSet { elems: e }
            }
        }
    }

    pub fn union(&self, other: &KSet) -> KSet {
        let mut e: Vec<u32> = self.elems.iter().chain(other.elems.iter()).copied().collect();
        e.sort_unstable();
        e.dedup();
        KSet { elems: e }
    }

    pub fn difference(&self, other: &KSet) -> KSet {
        KSet { elems: self.elems.iter().copied().filter(|x| !other.contains(*x)).collect() }
    }

    pub fn intersection_size(&self, other: &KSet) -> usize {
        let (mut i, mut j, mut n) = (0, 0, 0);
        while i < self.elems.len() && j < other.elems.len() {
            match self.elems[i].cmp(&other.elems[j]) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    n += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        n
    }

    /// All subsets of size `len - 1`, in colex order.
    pub fn lower_shadow(&self) -> impl Iterator<Item = KSet> + '_ {
        // Dropping a larger element gives a colex-smaller set.
        (0..self.elems.len()).rev().map(move |skip| {
            let mut e = self.elems.clone();
            e.remove(skip);
            KSet { elems: e }
        })
    }

    /// Applies an element relabeling `x -> map(x)`.
    pub fn relabel(&self, map: impl Fn(u32) -> u32) -> KSet {
        let mut e: Vec<u32> = self.elems.iter().map(|&x| map(x)).collect();
        e.sort_unstable();
        KSet { elems: e }
    }
}

impl Ord for KSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.elems.len().cmp(&other.elems.len()).then_with(|| colex_cmp(&self.elems, &other.elems))
    }
}

impl PartialOrd for KSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for KSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.elems.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for KSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Half the symmetric difference of two sets of equal size.
pub fn distance(a: &KSet, b: &KSet) -> Result<usize, SetError> {
    if a.len() != b.len() {
        return Err(SetError::SizeMismatch { expected: a.len(), found: b.len() });
    }
    Ok(a.len() - a.intersection_size(b))
}
