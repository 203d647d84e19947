//! Uniform set families, shadows, the cover condition and the
//! Bollobás–Eccles configuration.

use std::collections::HashSet;
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{cascade_decompose, cascade_shift, colex_segment, CascadeRep};
use crate::error::{FamilyError, FormatError, SetError};
use crate::kset::KSet;

/// A deduplicated family of equal-size sets, stored in colex order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SetFamily {
    member_size: usize,
    sets: Vec<KSet>,
}

impl SetFamily {
    pub fn new(member_size: usize, sets: impl IntoIterator<Item = KSet>) -> Result<Self, SetError> {
        let mut sets: Vec<KSet> = sets.into_iter().collect();
        if let Some(bad) = sets.iter().find(|s| s.len() != member_size) {
            return Err(SetError::SizeMismatch { expected: member_size, found: bad.len() });
        }
        sets.sort_unstable();
        sets.dedup();
        Ok(SetFamily { member_size, sets })
    }

    /// Builds a family from raw element lists.
    pub fn from_vecs(member_size: usize, sets: Vec<Vec<u32>>) -> Result<Self, SetError> {
        let sets = sets.into_iter().map(KSet::new).collect::<Result<Vec<_>, _>>()?;
        Self::new(member_size, sets)
    }

    pub fn empty(member_size: usize) -> Self {
        SetFamily { member_size, sets: Vec::new() }
    }

    /// The first `count` sets of size `member_size` in colex order.
    pub fn colex_initial(member_size: usize, count: usize) -> Self {
        SetFamily { member_size, sets: colex_segment(member_size, count) }
    }

    pub fn member_size(&self) -> usize {
        self.member_size
    }

    pub fn sets(&self) -> &[KSet] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, KSet> {
        self.sets.iter()
    }

    /// Largest element appearing in any member (0 for an empty family).
    pub fn ground_max(&self) -> u32 {
        self.sets.iter().filter_map(KSet::max_element).max().unwrap_or(0)
    }

    pub fn contains(&self, s: &KSet) -> bool {
        s.len() == self.member_size && self.sets.binary_search(s).is_ok()
    }

    pub fn position(&self, s: &KSet) -> Option<usize> {
        if s.len() != self.member_size {
            return None;
        }
        self.sets.binary_search(s).ok()
    }

    pub fn is_subfamily_of(&self, other: &SetFamily) -> bool {
        self.member_size == other.member_size && self.sets.iter().all(|s| other.contains(s))
    }

    /// Applies an element relabeling to every member.
    pub fn relabel(&self, map: impl Fn(u32) -> u32) -> SetFamily {
        let sets: Vec<KSet> = self.sets.iter().map(|s| s.relabel(&map)).collect();
        SetFamily::new(self.member_size, sets).expect("relabeling preserves sizes")
    }

    /// Adds a set, returning a new family.
    pub fn with_set(&self, s: KSet) -> Result<SetFamily, SetError> {
        let mut sets = self.sets.clone();
        sets.push(s);
        SetFamily::new(self.member_size, sets)
    }

    /// Removes a set, returning a new family.
    pub fn without_set(&self, s: &KSet) -> SetFamily {
        SetFamily { member_size: self.member_size, sets: self.sets.iter().filter(|t| *t != s).cloned().collect() }
    }

    /// Bit-exact JSON form: `{"r": 3, "sets": [[1,2,3],[1,2,4]]}`.
    pub fn to_json(&self) -> String {
        let mut out = String::new();
        write!(out, "{{\"r\": {}, \"sets\": [", self.member_size).unwrap();
        for (i, s) in self.sets.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push('[');
            for (j, x) in s.elements().iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                write!(out, "{x}").unwrap();
            }
            out.push(']');
        }
        out.push_str("]}");
        out
    }

    pub fn from_json(text: &str) -> Result<Self, FormatError> {
        let raw: FamilyJson = serde_json::from_str(text)?;
        raw.into_family()
    }
}

impl<'a> IntoIterator for &'a SetFamily {
    type Item = &'a KSet;
    type IntoIter = std::slice::Iter<'a, KSet>;

    fn into_iter(self) -> Self::IntoIter {
        self.sets.iter()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyJson {
    pub r: usize,
    pub sets: Vec<Vec<u32>>,
}

impl FamilyJson {
    pub fn into_family(self) -> Result<SetFamily, FormatError> {
        Ok(SetFamily::from_vecs(self.r, self.sets).map_err(FamilyError::from)?)
    }
}

impl From<&SetFamily> for FamilyJson {
    fn from(f: &SetFamily) -> Self {
        FamilyJson { r: f.member_size, sets: f.sets.iter().map(|s| s.elements().to_vec()).collect() }
    }
}

/// All `(r-1)`-subsets of members of `f`.
pub fn shadow(f: &SetFamily) -> Result<SetFamily, SetError> {
    if f.member_size == 0 {
        return Err(SetError::EmptyMembers);
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for s in &f.sets {
        for sub in s.lower_shadow() {
            if seen.insert(sub.clone()) {
                out.push(sub);
            }
        }
    }
    SetFamily::new(f.member_size - 1, out)
}

/// Per-member counts of `(r-1)`-subsets present in `B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverCounts {
    pub counts: Vec<usize>,
    pub min_count: Option<usize>,
}

/// Cover counts judged against a threshold `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverReport {
    pub counts: Vec<usize>,
    pub min_count: Option<usize>,
    pub threshold: usize,
    pub passed: bool,
    pub violating: Vec<KSet>,
}

pub fn cover_counts(a: &SetFamily, b: &SetFamily) -> Result<CoverCounts, FamilyError> {
    if a.member_size != b.member_size + 1 {
        return Err(FamilyError::RankMismatch { a: a.member_size, b: b.member_size });
    }
    let counts: Vec<usize> = a.sets.iter().map(|s| s.lower_shadow().filter(|sub| b.contains(sub)).count()).collect();
    let min_count = counts.iter().copied().min();
    Ok(CoverCounts { counts, min_count })
}

/// Checks that every member of `a` contains at least `k` members of `b`.
pub fn validate(a: &SetFamily, b: &SetFamily, k: usize) -> Result<CoverReport, FamilyError> {
    let CoverCounts { counts, min_count } = cover_counts(a, b)?;
    let violating: Vec<KSet> = a.sets.iter().zip(&counts).filter(|(_, &c)| c < k).map(|(s, _)| s.clone()).collect();
    Ok(CoverReport { passed: violating.is_empty(), counts, min_count, threshold: k, violating })
}

/// A pair of families `(A, B)` with the cover threshold `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    pub k: usize,
    pub a: SetFamily,
    pub b: SetFamily,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigurationJson {
    k: usize,
    #[serde(rename = "A")]
    a: FamilyJson,
    #[serde(rename = "B")]
    b: FamilyJson,
}

impl Configuration {
    pub fn new(k: usize, a: SetFamily, b: SetFamily) -> Result<Self, FamilyError> {
        if a.member_size != b.member_size + 1 {
            return Err(FamilyError::RankMismatch { a: a.member_size, b: b.member_size });
        }
        if k > a.member_size {
            return Err(FamilyError::BadThreshold { k, r: a.member_size });
        }
        Ok(Configuration { k, a, b })
    }

    /// Member size of `A`.
    pub fn r(&self) -> usize {
        self.a.member_size
    }

    pub fn validate(&self) -> CoverReport {
        validate(&self.a, &self.b, self.k).expect("sizes checked at construction")
    }

    /// `{"k": 3, "A": <family>, "B": <family>}`
    pub fn to_json(&self) -> String {
        format!("{{\"k\": {}, \"A\": {}, \"B\": {}}}", self.k, self.a.to_json(), self.b.to_json())
    }

    pub fn from_json(text: &str) -> Result<Self, FormatError> {
        let raw: ConfigurationJson = serde_json::from_str(text)?;
        let a = raw.a.into_family()?;
        let b = raw.b.into_family()?;
        Ok(Configuration::new(raw.k, a, b)?)
    }
}

/// Output of [`construct_be`] with the bookkeeping needed to audit it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BeConstruction {
    pub config: Configuration,
    pub rep: CascadeRep,
    /// The fixed `(r-k)`-set shared by every member.
    pub core: KSet,
}

/// The Bollobás–Eccles configuration: `B = {S ∪ Y}` over the first `b`
/// colex `(k-1)`-sets and `A = {S ∪ X}` over the first
/// `Σ binom(c_i, i+1)` colex `k`-sets, where `b = Σ binom(c_i, i)`.
///
/// `S` sits immediately above every element used by the `X`s and `Y`s.
pub fn construct_be(r: usize, k: usize, b: usize) -> Result<BeConstruction, FamilyError> {
    if k == 0 || k > r {
        return Err(FamilyError::BadThreshold { k, r });
    }
    if k == 1 {
        return Err(FamilyError::UnboundedConstruction);
    }
    let rep = cascade_decompose(&BigUint::from(b), (k - 1) as u64)?;
    let a = cascade_shift(&rep, 1)?.to_usize().expect("a <= binom-bounded b fits usize");
    let xs = colex_segment(k, a);
    let ys = colex_segment(k - 1, b);
    let ground = xs.iter().chain(ys.iter()).filter_map(KSet::max_element).max().unwrap_or(0);
    let core = KSet::new((ground + 1..=ground + (r - k) as u32).collect()).expect("consecutive elements");
    let fam_a = SetFamily::new(r, xs.iter().map(|x| x.union(&core)))?;
    let fam_b = SetFamily::new(r - 1, ys.iter().map(|y| y.union(&core)))?;
    Ok(BeConstruction { config: Configuration::new(k, fam_a, fam_b)?, rep, core })
}

/// The configuration with `B` = all `(k-1)`-subsets of `[c]` and `A` = all
/// `k`-subsets, padded by a common core to member size `r`.
pub fn canonical_configuration(r: usize, k: usize, c: usize) -> Result<Configuration, FamilyError> {
    let b = crate::combinatorics::binom_u64(c as u64, (k - 1) as u64);
    let b = b.to_usize().expect("small c");
    Ok(construct_be(r, k, b)?.config)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(r: usize, sets: &[&[u32]]) -> SetFamily {
        SetFamily::from_vecs(r, sets.iter().map(|s| s.to_vec()).collect()).unwrap()
    }

    #[test]
    fn shadow_examples() {
        let one = fam(4, &[&[1, 2, 3, 4]]);
        assert_eq!(shadow(&one).unwrap(), fam(3, &[&[1, 2, 3], &[1, 2, 4], &[1, 3, 4], &[2, 3, 4]]));
        let first5 = SetFamily::colex_initial(4, 5);
        let sh = shadow(&first5).unwrap();
        assert_eq!(sh.len(), 10);
        assert_eq!(sh, SetFamily::colex_initial(3, 10));
        assert!(shadow(&SetFamily::empty(3)).unwrap().is_empty());
        assert_eq!(shadow(&SetFamily::empty(0)), Err(SetError::EmptyMembers));
    }

    #[test]
    fn family_dedups_and_sorts() {
        let f = fam(2, &[&[2, 3], &[1, 2], &[3, 2]]);
        assert_eq!(f.len(), 2);
        assert_eq!(f.sets()[0].elements(), &[1, 2]);
        assert!(SetFamily::from_vecs(2, vec![vec![1, 2, 3]]).is_err());
    }

    #[test]
    fn cover_examples() {
        let a = fam(3, &[&[1, 2, 3]]);
        let full = fam(2, &[&[1, 2], &[1, 3], &[2, 3]]);
        let one = fam(2, &[&[1, 2]]);
        assert_eq!(cover_counts(&a, &full).unwrap().counts, vec![3]);
        assert_eq!(cover_counts(&a, &one).unwrap().counts, vec![1]);
        assert!(validate(&a, &full, 3).unwrap().passed);
        let r = validate(&a, &one, 2).unwrap();
        assert!(!r.passed);
        assert_eq!(r.violating, vec![KSet::new(vec![1, 2, 3]).unwrap()]);
        assert!(matches!(cover_counts(&a, &a), Err(FamilyError::RankMismatch { .. })));
    }

    #[test]
    fn be_5_3_6() {
        let be = construct_be(5, 3, 6).unwrap();
        assert_eq!(be.config.b.len(), 6);
        assert_eq!(be.config.a.len(), 4);
        assert_eq!(be.core, KSet::new(vec![5, 6]).unwrap());
        let counts = cover_counts(&be.config.a, &be.config.b).unwrap();
        assert!(counts.counts.iter().all(|&c| c == 3));
        assert!(be.config.validate().passed);
    }

    #[test]
    fn be_small_cases() {
        let be = construct_be(3, 3, 3).unwrap();
        assert_eq!((be.config.b.len(), be.config.a.len()), (3, 1));
        assert!(be.core.is_empty());
        let be = construct_be(5, 4, 13).unwrap();
        assert_eq!((be.config.b.len(), be.config.a.len()), (13, 6));
        assert!(be.config.validate().passed);
        assert!(matches!(construct_be(4, 0, 3), Err(FamilyError::BadThreshold { .. })));
        assert!(matches!(construct_be(4, 1, 3), Err(FamilyError::UnboundedConstruction)));
        assert!(matches!(construct_be(3, 4, 3), Err(FamilyError::BadThreshold { .. })));
        let empty = construct_be(4, 3, 0).unwrap();
        assert!(empty.config.a.is_empty() && empty.config.b.is_empty());
    }

    #[test]
    fn be_core_avoids_y_only_elements() {
        // 11 = binom(5,3) + binom(2,2): the Ys reach element 6 but no X does.
        let be = construct_be(5, 4, 11).unwrap();
        assert_eq!(be.config.a.len(), 5);
        assert_eq!(be.core, KSet::new(vec![7]).unwrap());
        assert!(be.config.validate().passed);
    }

    #[test]
    fn json_format_is_exact() {
        let f = fam(3, &[&[1, 2, 4], &[1, 2, 3]]);
        assert_eq!(f.to_json(), r#"{"r": 3, "sets": [[1,2,3],[1,2,4]]}"#);
        assert_eq!(SetFamily::from_json(&f.to_json()).unwrap(), f);
        let cfg = construct_be(3, 3, 3).unwrap().config;
        assert_eq!(
            cfg.to_json(),
            r#"{"k": 3, "A": {"r": 3, "sets": [[1,2,3]]}, "B": {"r": 2, "sets": [[1,2],[1,3],[2,3]]}}"#
        );
        assert_eq!(Configuration::from_json(&cfg.to_json()).unwrap(), cfg);
        assert!(SetFamily::from_json("{\"r\": 2, \"sets\": [[1,1]]}").is_err());
        assert!(SetFamily::from_json("{\"r\": 2, \"sets\": [[1,2]").is_err());
    }
}
