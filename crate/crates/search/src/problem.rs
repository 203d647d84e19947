use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use shadowlab_core::combinatorics::binom_u128;
use shadowlab_core::family::construct_be;
use shadowlab_core::{KSet, SetFamily};

use crate::error::SearchError;

/// Largest ground set the bitmask search supports.
pub const MAX_GROUND: usize = 64;

/// Largest number of candidate `(r−1)`-sets or `r`-sets the search will index.
pub const MAX_UNIVERSE: u128 = 1 << 22;

/// Parameters of `f_n(r, k, b)`: the most `r`-subsets of `[n]` that can each
/// contain at least `k` members of some `b`-element family of
/// `(r−1)`-subsets of `[n]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SearchProblem {
    pub r: usize,
    pub k: usize,
    pub b: usize,
    pub n: usize,
}

impl SearchProblem {
    pub fn new(r: usize, k: usize, b: usize, n: usize) -> Result<Self, SearchError> {
        let p = SearchProblem { r, k, b, n };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        let SearchProblem { r, k, b, n } = *self;
        let bad = |m: String| Err(SearchError::InvalidProblem(m));
        if r < 2 {
            return bad(format!("r={r}: member size must be at least 2"));
        }
        if k < 1 || k > r {
            return bad(format!("k={k}: need 1 <= k <= r={r}"));
        }
        if n < r {
            return bad(format!("n={n}: ground set smaller than r={r}"));
        }
        if n > MAX_GROUND {
            return bad(format!("n={n}: ground sets above {MAX_GROUND} elements are not supported"));
        }
        let small = binom_u128(n as u128, (r - 1) as u64).unwrap_or(u128::MAX);
        let big = binom_u128(n as u128, r as u64).unwrap_or(u128::MAX);
        if b as u128 > small {
            return bad(format!("b={b} exceeds binom({n},{}) = {small}", r - 1));
        }
        if small > MAX_UNIVERSE || big > MAX_UNIVERSE {
            return bad(format!("[{n}] has too many {}- or {r}-subsets to index", r - 1));
        }
        Ok(())
    }

    /// The shifted-colex construction for these parameters, if it exists and
    /// fits inside `[n]`.
    pub fn be_family(&self) -> Option<SetFamily> {
        let be = construct_be(self.r, self.k, self.b).ok()?;
        (be.config.b.ground_max() as usize <= self.n).then_some(be.config.b)
    }
}

pub(crate) fn mask_of(s: &KSet) -> u64 {
    s.elements().iter().fold(0u64, |m, &e| m | (1u64 << (e - 1)))
}

pub(crate) fn set_of(mask: u64) -> KSet {
    let mut v = Vec::with_capacity(mask.count_ones() as usize);
    let mut m = mask;
    while m != 0 {
        v.push(m.trailing_zeros() + 1);
        m &= m - 1;
    }
    KSet::new(v).expect("bits are distinct and positive")
}

pub(crate) fn family_of(member_size: usize, masks: &[u64]) -> SetFamily {
    SetFamily::new(member_size, masks.iter().map(|&m| set_of(m))).expect("masks have the member size")
}

/// All `s`-subsets of `[n]` as masks, ascending (which is colex order).
fn subsets(n: usize, s: usize) -> Vec<u64> {
    let limit: u128 = 1u128 << n;
    let mut out = Vec::new();
    let mut x: u128 = (1u128 << s) - 1;
    while x < limit {
        out.push(x as u64);
        let c = x & x.wrapping_neg();
        let rr = x + c;
        x = (((rr ^ x) >> 2) / c) | rr;
    }
    out
}

/// Index of every candidate set and its containment relations.
pub(crate) struct Universe {
    pub problem: SearchProblem,
    /// `(r−1)`-subsets of `[n]` in colex order.
    pub small: Vec<u64>,
    pub small_rank: HashMap<u64, u32>,
    /// For each small set, the indices of the `r`-sets containing it.
    pub supers: Vec<Vec<u32>>,
    pub num_big: usize,
}

impl Universe {
    pub fn new(problem: SearchProblem) -> Result<Self, SearchError> {
        problem.validate()?;
        let SearchProblem { r, n, .. } = problem;
        let small = subsets(n, r - 1);
        let big = subsets(n, r);
        let big_rank: HashMap<u64, u32> = big.iter().enumerate().map(|(i, &m)| (m, i as u32)).collect();
        let small_rank = small.iter().enumerate().map(|(i, &m)| (m, i as u32)).collect();
        let supers = small
            .iter()
            .map(|&m| (0..n).filter(|&x| m & (1 << x) == 0).map(|x| big_rank[&(m | (1 << x))]).collect())
            .collect();
        Ok(Universe { problem, small, small_rank, supers, num_big: big.len() })
    }

    /// Number of `r`-sets meeting the cover condition for a set of small indices.
    pub fn count_a(&self, idxs: &[u32]) -> u64 {
        let mut cnt = vec![0u32; self.num_big];
        for &u in idxs {
            for &t in &self.supers[u as usize] {
                cnt[t as usize] += 1;
            }
        }
        cnt.iter().filter(|&&c| c as usize >= self.problem.k).count() as u64
    }
}

/// Mutable cover counters for a family under construction.
#[derive(Clone, Debug)]
pub(crate) struct CoverState {
    pub in_f: Vec<bool>,
    pub cnt: Vec<u8>,
    pub a: u64,
    pub size: usize,
}

impl CoverState {
    pub fn new(uni: &Universe) -> Self {
        CoverState { in_f: vec![false; uni.small.len()], cnt: vec![0; uni.num_big], a: 0, size: 0 }
    }

    pub fn add(&mut self, uni: &Universe, u: u32) {
        debug_assert!(!self.in_f[u as usize]);
        self.in_f[u as usize] = true;
        self.size += 1;
        let k = uni.problem.k as u8;
        for &t in &uni.supers[u as usize] {
            let c = &mut self.cnt[t as usize];
            *c += 1;
            if *c == k {
                self.a += 1;
            }
        }
    }

    pub fn remove(&mut self, uni: &Universe, u: u32) {
        debug_assert!(self.in_f[u as usize]);
        self.in_f[u as usize] = false;
        self.size -= 1;
        let k = uni.problem.k as u8;
        for &t in &uni.supers[u as usize] {
            let c = &mut self.cnt[t as usize];
            if *c == k {
                self.a -= 1;
            }
            *c -= 1;
        }
    }

    /// Largest `a` any completion with `rem` more sets could reach: each new
    /// set raises at most `n−r+1` counters, so at best the smallest positive
    /// deficits are filled first.
    pub fn completion_bound(&self, uni: &Universe, rem: usize) -> u64 {
        let SearchProblem { r, k, n, .. } = uni.problem;
        let mut hist = vec![0u64; k + 1];
        for &c in &self.cnt {
            let d = k.saturating_sub(c as usize);
            if d > 0 && d <= rem {
                hist[d] += 1;
            }
        }
        let mut capacity = (rem * (n - r + 1)) as u64;
        let mut extra = 0u64;
        for (d, &h) in hist.iter().enumerate().skip(1) {
            let take = h.min(capacity / d as u64);
            extra += take;
            capacity -= take * d as u64;
        }
        self.a + extra
    }
}
