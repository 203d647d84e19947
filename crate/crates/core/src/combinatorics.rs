//! Exact binomial arithmetic, cascade (binomial) decompositions, colex
//! ranking and the classical Kruskal–Katona formulas.
//!
//! Everything here works over arbitrary-precision naturals. A `u128` fast
//! path is taken whenever the intermediate products fit, which keeps the
//! common case (small indices, values below `2^64`) allocation free.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{CascadeError, SetError};
use crate::kset::KSet;

/// Arbitrary-precision non-negative integer.
pub type Natural = BigUint;

/// `binom(n, k)` computed in `u128`, or `None` if an intermediate overflowed.
pub fn binom_u128(n: u128, k: u64) -> Option<u128> {
    let k = k as u128;
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for j in 1..=k {
        // acc * (n - k + j) is divisible by j since acc = binom(n-k+j-1, j-1).
        acc = acc.checked_mul(n - k + j)? / j;
    }
    Some(acc)
}

/// Exact binomial coefficient; zero when `n < k`.
pub fn binom(n: &Natural, k: u64) -> Natural {
    if let Some(small) = n.to_u128() {
        if let Some(v) = binom_u128(small, k) {
            return BigUint::from(v);
        }
    }
    let kb = BigUint::from(k);
    if *n < kb {
        return BigUint::zero();
    }
    let rest = n - &kb;
    // Use the smaller of k and n - k; when n - k < k it fits in a u64.
    let k = match rest.to_u64() {
        Some(r) if r < k => r,
        _ => k,
    };
    let base = n - BigUint::from(k);
    let mut acc = BigUint::one();
    for j in 1..=k {
        acc = acc * (&base + BigUint::from(j)) / BigUint::from(j);
    }
    acc
}

/// Convenience wrapper for small arguments.
pub fn binom_u64(n: u64, k: u64) -> Natural {
    binom(&BigUint::from(n), k)
}

/// One term `binom(c, index)` of a cascade decomposition.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CascadeTerm {
    pub c: Natural,
    pub index: u64,
}

impl CascadeTerm {
    pub fn new(c: impl Into<Natural>, index: u64) -> Self {
        CascadeTerm { c: c.into(), index }
    }
}

/// The greedy decomposition `m = binom(c_s, s) + binom(c_{s-1}, s-1) + ...`
/// with `c_s > c_{s-1} > ...` and `c_i >= i`.
///
/// Zero-valued terms are omitted, so the indices form a contiguous run
/// `s, s-1, ..., t` and an empty term list represents zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CascadeRep {
    top_index: u64,
    terms: Vec<CascadeTerm>,
}

impl CascadeRep {
    /// Builds a representation from explicit terms, checking the canonical
    /// form invariants.
    pub fn from_terms(top_index: u64, terms: Vec<CascadeTerm>) -> Result<Self, CascadeError> {
        if top_index == 0 {
            return Err(CascadeError::ZeroTopIndex);
        }
        let mut expected = top_index;
        let mut prev_c: Option<&Natural> = None;
        for (pos, term) in terms.iter().enumerate() {
            if term.index != expected || term.index == 0 {
                return Err(CascadeError::NonContiguousIndex { position: pos, index: term.index, expected });
            }
            if term.c < BigUint::from(term.index) {
                return Err(CascadeError::ValueBelowIndex { position: pos });
            }
            if let Some(p) = prev_c {
                if term.c >= *p {
                    return Err(CascadeError::NotDecreasing { position: pos });
                }
            }
            prev_c = Some(&term.c);
            expected -= 1;
        }
        Ok(CascadeRep { top_index, terms })
    }

    pub fn top_index(&self) -> u64 {
        self.top_index
    }

    pub fn terms(&self) -> &[CascadeTerm] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when every index from the top down to 1 carries a non-zero term.
    pub fn is_full(&self) -> bool {
        self.terms.len() as u64 == self.top_index
    }
}

impl fmt::Display for CascadeRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "({},{})", t.c, t.index)?;
        }
        write!(f, "]")
    }
}

/// Largest `c` with `binom(c, i) <= rem`, for `rem >= 1`, `i >= 1`.
fn largest_c(rem: &Natural, i: u64) -> Natural {
    if let Some(r) = rem.to_u64() {
        if let Some(c) = largest_c_u128(r as u128, i) {
            return BigUint::from(c);
        }
    }
    // Exponential then binary search on BigUint.
    let mut lo = BigUint::from(i);
    let mut step = BigUint::one();
    let mut hi = &lo + &step;
    while binom(&hi, i) <= *rem {
        lo = hi.clone();
        step <<= 1;
        hi = &lo + &step;
    }
    // binom(lo) <= rem < binom(hi)
    while &hi - &lo > BigUint::one() {
        let mid: BigUint = (&lo + &hi) >> 1;
        if binom(&mid, i) <= *rem {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

fn largest_c_u128(rem: u128, i: u64) -> Option<u128> {
    // binom(c, i) ~ (c - (i-1)/2)^i / i!, so start from that estimate.
    let mut fact = 1f64;
    for j in 2..=i {
        fact *= j as f64;
    }
    let est = (rem as f64 * fact).powf(1.0 / i as f64) + (i as f64 - 1.0) / 2.0;
    let mut c = (est.floor() as u128).max(i as u128);
    let at_most = |c: u128| binom_u128(c, i).map(|v| v <= rem);
    while !at_most(c)? {
        c -= 1;
    }
    while at_most(c + 1)? {
        c += 1;
    }
    Some(c)
}

/// Greedy cascade decomposition of `m` with top index `s`.
pub fn cascade_decompose(m: &Natural, s: u64) -> Result<CascadeRep, CascadeError> {
    if s == 0 {
        return Err(CascadeError::ZeroTopIndex);
    }
    let mut rem = m.clone();
    let mut terms = Vec::new();
    let mut i = s;
    while i >= 1 && !rem.is_zero() {
        let c = largest_c(&rem, i);
        rem -= binom(&c, i);
        terms.push(CascadeTerm { c, index: i });
        i -= 1;
    }
    debug_assert!(rem.is_zero(), "index-1 term always absorbs the remainder");
    Ok(CascadeRep { top_index: s, terms })
}

/// `Σ binom(c_i, i)`; the exact inverse of [`cascade_decompose`].
pub fn cascade_eval(rep: &CascadeRep) -> Natural {
    rep.terms.iter().map(|t| binom(&t.c, t.index)).sum()
}

/// Validates raw terms and evaluates them.
pub fn cascade_eval_terms(top_index: u64, terms: Vec<CascadeTerm>) -> Result<Natural, CascadeError> {
    Ok(cascade_eval(&CascadeRep::from_terms(top_index, terms)?))
}

/// `Σ binom(c_i, i + delta)`.
pub fn cascade_shift(rep: &CascadeRep, delta: i64) -> Result<Natural, CascadeError> {
    let mut total = BigUint::zero();
    for t in &rep.terms {
        let shifted = t.index as i64 + delta;
        if shifted < 1 {
            return Err(CascadeError::IndexUnderflow { index: t.index, delta });
        }
        total += binom(&t.c, shifted as u64);
    }
    Ok(total)
}

/// Largest `a` such that some family of `a` r-sets has a shadow of size at
/// most `b` (classical Kruskal–Katona, `r >= 2`).
pub fn kk_max_a(b: &Natural, r: u64) -> Result<Natural, CascadeError> {
    if r < 2 {
        return Err(CascadeError::RankTooSmall { r });
    }
    let rep = cascade_decompose(b, r - 1)?;
    cascade_shift(&rep, 1)
}

/// Smallest possible shadow of `a` r-sets (classical Kruskal–Katona, `r >= 2`).
pub fn kk_min_b(a: &Natural, r: u64) -> Result<Natural, CascadeError> {
    if r < 2 {
        return Err(CascadeError::RankTooSmall { r });
    }
    let rep = cascade_decompose(a, r)?;
    let mut total = BigUint::zero();
    for t in rep.terms() {
        if t.index == 1 {
            // binom(c_0, 1) = c_0 > 0 contributes a single extra set.
            total += BigUint::one();
        } else {
            total += binom(&t.c, t.index - 1);
        }
    }
    Ok(total)
}

/// Colex comparison of two sorted element slices of equal length.
pub fn colex_cmp(a: &[u32], b: &[u32]) -> Ordering {
    debug_assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().rev().zip(b.iter().rev()) {
        match x.cmp(y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

/// Position of `s` in the colex order of `|s|`-sets; `{1..r}` has rank 0.
pub fn colex_rank(s: &KSet) -> Natural {
    s.elements()
        .iter()
        .enumerate()
        .map(|(j, &a)| binom_u64(u64::from(a) - 1, j as u64 + 1))
        .sum()
}

/// Inverse of [`colex_rank`].
pub fn colex_unrank(idx: &Natural, r: u64) -> Result<KSet, SetError> {
    if r == 0 {
        return if idx.is_zero() { Ok(KSet::empty()) } else { Err(SetError::RankOutOfRange) };
    }
    let rep = cascade_decompose(idx, r).expect("r >= 1");
    let mut elems = vec![0u32; r as usize];
    for t in rep.terms() {
        let v = (&t.c + BigUint::one()).to_u32().ok_or(SetError::ElementOverflow)?;
        elems[t.index as usize - 1] = v;
    }
    // Omitted (zero-valued) low terms correspond to c_j = j - 1.
    let lowest = rep.terms().last().map(|t| t.index).unwrap_or(r + 1);
    for j in 1..lowest {
        elems[j as usize - 1] = j as u32;
    }
    KSet::new(elems)
}

/// Iterator over all `r`-sets of positive integers in colex order.
#[derive(Clone, Debug)]
pub struct ColexIter {
    current: Option<Vec<u32>>,
}

impl ColexIter {
    pub fn new(r: usize) -> Self {
        ColexIter { current: Some((1..=r as u32).collect()) }
    }
}

impl Iterator for ColexIter {
    type Item = KSet;

    fn next(&mut self) -> Option<KSet> {
        let cur = self.current.take()?;
        let out = KSet::from_sorted_unchecked(cur.clone());
        if cur.is_empty() {
            return Some(out);
        }
        let mut next = cur;
        // Smallest j whose element can grow without colliding with j + 1.
        let r = next.len();
        let mut j = 0;
        while j + 1 < r && next[j] + 1 == next[j + 1] {
            j += 1;
        }
        next[j] = next[j].checked_add(1)?;
        for (t, slot) in next.iter_mut().enumerate().take(j) {
            *slot = t as u32 + 1;
        }
        self.current = Some(next);
        Some(out)
    }
}

/// The first `count` r-sets in colex order.
pub fn colex_segment(r: usize, count: usize) -> Vec<KSet> {
    if r == 0 {
        return if count == 0 { Vec::new() } else { vec![KSet::empty()] };
    }
    ColexIter::new(r).take(count).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(v: u64) -> Natural {
        BigUint::from(v)
    }

    fn terms(rep: &CascadeRep) -> Vec<(u64, u64)> {
        rep.terms().iter().map(|t| (t.c.to_u64().unwrap(), t.index)).collect()
    }

    #[test]
    fn binom_values() {
        assert_eq!(binom_u64(5, 3), n(10));
        assert_eq!(binom_u64(0, 1), n(0));
        assert_eq!(binom_u64(29, 3), n(3654));
        assert_eq!(binom_u64(0, 0), n(1));
        // past the u128 range
        let big = binom_u64(200, 100);
        assert_eq!(big.to_string(), "90548514656103281165404177077484163874504589675413336841320");
    }

    #[test]
    fn binom_bigint_matches_pascal() {
        let huge = BigUint::from(u128::MAX) + 17u32;
        for k in 0..5u64 {
            let lhs = binom(&(&huge + 1u32), k + 1);
            let rhs = binom(&huge, k + 1) + binom(&huge, k);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn decompose_examples() {
        assert_eq!(terms(&cascade_decompose(&n(13), 3).unwrap()), vec![(5, 3), (3, 2)]);
        assert_eq!(terms(&cascade_decompose(&n(1), 3).unwrap()), vec![(3, 3)]);
        assert_eq!(terms(&cascade_decompose(&n(10), 2).unwrap()), vec![(5, 2)]);
        assert!(cascade_decompose(&n(0), 4).unwrap().is_empty());
        assert_eq!(cascade_decompose(&n(5), 0), Err(CascadeError::ZeroTopIndex));
    }

    #[test]
    fn eval_examples() {
        let rep = CascadeRep::from_terms(3, vec![CascadeTerm::new(5u32, 3), CascadeTerm::new(3u32, 2)]).unwrap();
        assert_eq!(cascade_eval(&rep), n(13));
        assert_eq!(cascade_eval_terms(3, vec![]).unwrap(), n(0));
        assert_eq!(cascade_eval_terms(3, vec![CascadeTerm::new(3u32, 3)]).unwrap(), n(1));
    }

    #[test]
    fn eval_rejects_malformed() {
        let bad = |t: Vec<(u64, u64)>| {
            cascade_eval_terms(3, t.into_iter().map(|(c, i)| CascadeTerm::new(c, i)).collect())
        };
        assert!(matches!(bad(vec![(5, 3), (5, 2)]), Err(CascadeError::NotDecreasing { .. })));
        assert!(matches!(bad(vec![(2, 3)]), Err(CascadeError::ValueBelowIndex { .. })));
        assert!(matches!(bad(vec![(5, 3), (1, 1)]), Err(CascadeError::NonContiguousIndex { .. })));
        assert!(matches!(bad(vec![(5, 2)]), Err(CascadeError::NonContiguousIndex { .. })));
    }

    #[test]
    fn shift_examples() {
        let r = |t: Vec<(u64, u64)>, s| {
            CascadeRep::from_terms(s, t.into_iter().map(|(c, i)| CascadeTerm::new(c, i)).collect()).unwrap()
        };
        assert_eq!(cascade_shift(&r(vec![(5, 2)], 2), 1).unwrap(), n(10));
        assert_eq!(cascade_shift(&r(vec![(5, 3), (3, 2)], 3), 1).unwrap(), n(6));
        assert_eq!(cascade_shift(&r(vec![(3, 3)], 3), 0).unwrap(), n(1));
        assert!(matches!(
            cascade_shift(&r(vec![(5, 3), (3, 2), (1, 1)], 3), -1),
            Err(CascadeError::IndexUnderflow { index: 1, delta: -1 })
        ));
    }

    #[test]
    fn kk_examples() {
        assert_eq!(kk_max_a(&n(10), 3).unwrap(), n(10));
        assert_eq!(kk_max_a(&n(7), 3).unwrap(), n(4));
        assert_eq!(kk_max_a(&n(406), 3).unwrap(), n(3654));
        assert_eq!(kk_min_b(&n(10), 3).unwrap(), n(10));
        assert_eq!(kk_min_b(&n(4), 3).unwrap(), n(6));
        assert_eq!(kk_min_b(&n(5), 3).unwrap(), n(8));
        assert_eq!(kk_min_b(&n(0), 3).unwrap(), n(0));
        assert!(kk_max_a(&n(3), 1).is_err());
    }

    #[test]
    fn colex_examples() {
        let s = |v: &[u32]| KSet::new(v.to_vec()).unwrap();
        assert_eq!(colex_rank(&s(&[1, 2, 3, 4])), n(0));
        assert_eq!(colex_rank(&s(&[1, 2, 3, 6])), n(5));
        assert_eq!(colex_unrank(&n(2), 4).unwrap(), s(&[1, 2, 4, 5]));
        assert_eq!(colex_unrank(&n(0), 4).unwrap(), s(&[1, 2, 3, 4]));
    }

    #[test]
    fn colex_iter_matches_listed_prefix() {
        let listed: Vec<Vec<u32>> = vec![
            vec![1, 2, 3, 4],
            vec![1, 2, 3, 5],
            vec![1, 2, 4, 5],
            vec![1, 3, 4, 5],
            vec![2, 3, 4, 5],
            vec![1, 2, 3, 6],
            vec![1, 2, 4, 6],
            vec![1, 3, 4, 6],
        ];
        let got: Vec<Vec<u32>> = ColexIter::new(4).take(8).map(|s| s.elements().to_vec()).collect();
        assert_eq!(got, listed);
        for (i, s) in ColexIter::new(3).take(500).enumerate() {
            assert_eq!(colex_rank(&s), n(i as u64));
            assert_eq!(colex_unrank(&n(i as u64), 3).unwrap(), s);
        }
    }

    #[test]
    fn telescoping_identity() {
        for s in 1..=6u64 {
            for x in s..40 {
                let lhs: Natural = (0..s).map(|j| binom_u64(x - j, s - j)).sum();
                assert_eq!(lhs, binom_u64(x + 1, s) - 1u32, "x={x} s={s}");
            }
        }
    }

    #[test]
    fn decompose_large_values() {
        let m = binom_u64(1000, 7) + binom_u64(100, 6) + 12345u32;
        let rep = cascade_decompose(&m, 7).unwrap();
        assert_eq!(rep.terms()[0].c, n(1000));
        assert_eq!(rep.terms()[1].c, n(100));
        assert_eq!(cascade_eval(&rep), m);
        let huge = BigUint::from(3u32).pow(200);
        assert_eq!(cascade_eval(&cascade_decompose(&huge, 4).unwrap()), huge);
    }
}
