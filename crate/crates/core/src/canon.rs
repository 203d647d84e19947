//! Canonical relabeling of set families.
//!
//! Two routes are provided. [`canonical_form`] returns the least relabeling
//! under *all* permutations of the ground set (exhaustive for grounds of at
//! most [`FULL_SEARCH_LIMIT`] elements). [`canonical_labeling`] runs an
//! individualization–refinement search: it minimizes only over labelings
//! compatible with an isomorphism-invariant ordered partition of the ground
//! set, so its representative differs from the global minimum, but it is
//! still a complete invariant. The search module relies on the latter.
//!
//! Families are compared by their colex-sorted member lists, which for
//! bitmask-encoded sets is plain lexicographic order on sorted mask vectors.

use std::collections::BTreeMap;

use crate::family::SetFamily;
use crate::kset::KSet;

/// Largest ground set searched by full permutation enumeration.
pub const FULL_SEARCH_LIMIT: u32 = 9;

/// A canonical labeling: `label[e]` is the new 0-based label of element
/// index `e`, and `key` is the image family as sorted bitmasks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Labeling {
    pub key: Vec<u64>,
    pub label: Vec<u8>,
}

/// Least relabeling of `f` under permutations of `[ground_max]`.
///
/// Exhaustive for `ground_max <= 9`; above that the refinement
/// representative is returned.
pub fn canonical_form(f: &SetFamily) -> SetFamily {
    let m = f.ground_max();
    if m <= FULL_SEARCH_LIMIT {
        let masks = to_masks(f);
        let key = full_search(&masks, m as usize);
        from_masks(f.member_size(), &key)
    } else {
        canonical_form_refined(f)
    }
}

/// Refinement-based canonical representative.
pub fn canonical_form_refined(f: &SetFamily) -> SetFamily {
    let m = f.ground_max() as usize;
    let sets: Vec<Vec<usize>> = f.iter().map(|s| s.elements().iter().map(|&x| x as usize - 1).collect()).collect();
    if m <= 64 {
        let (key, _) = search_refined(&sets, m, |lab| mask_key(&sets, lab));
        from_masks(f.member_size(), &key)
    } else {
        let (key, _) = search_refined(&sets, m, |lab| wide_key(&sets, lab));
        SetFamily::new(f.member_size(), key).expect("relabeling preserves sizes")
    }
}

/// Canonical labeling of a family of bitmasks over `n <= 64` elements.
pub fn canonical_labeling(masks: &[u64], n: usize) -> Labeling {
    assert!(n <= 64, "bitmask families are limited to 64 elements");
    let sets: Vec<Vec<usize>> = masks.iter().map(|&m| bits(m).collect()).collect();
    let (key, lab) = search_refined(&sets, n, |lab| mask_key(&sets, lab));
    Labeling { key, label: lab.iter().map(|&l| l as u8).collect() }
}

/// Applies a 0-based element labeling to a mask.
pub fn relabel_mask(mask: u64, label: &[u8]) -> u64 {
    bits(mask).fold(0u64, |acc, e| acc | (1u64 << label[e]))
}

fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(b)
        }
    })
}

fn to_masks(f: &SetFamily) -> Vec<u64> {
    f.iter().map(|s| s.elements().iter().fold(0u64, |acc, &x| acc | (1u64 << (x - 1)))).collect()
}

fn from_masks(member_size: usize, masks: &[u64]) -> SetFamily {
    let sets = masks.iter().map(|&m| KSet::new(bits(m).map(|b| b as u32 + 1).collect()).expect("distinct bits"));
    SetFamily::new(member_size, sets).expect("uniform masks")
}

fn mask_key(sets: &[Vec<usize>], label: &[usize]) -> Vec<u64> {
    let mut key: Vec<u64> = sets.iter().map(|s| s.iter().fold(0u64, |acc, &e| acc | (1u64 << label[e]))).collect();
    key.sort_unstable();
    key
}

fn wide_key(sets: &[Vec<usize>], label: &[usize]) -> Vec<KSet> {
    let mut key: Vec<KSet> = sets
        .iter()
        .map(|s| KSet::new(s.iter().map(|&e| label[e] as u32 + 1).collect()).expect("labels are a permutation"))
        .collect();
    key.sort_unstable();
    key
}

/// Exhaustive minimum over all permutations of `m` elements (Heap's algorithm).
fn full_search(masks: &[u64], m: usize) -> Vec<u64> {
    let mut perm: Vec<u8> = (0..m as u8).collect();
    let image = |perm: &[u8]| {
        let mut key: Vec<u64> = masks.iter().map(|&x| relabel_mask(x, perm)).collect();
        key.sort_unstable();
        key
    };
    let mut best = image(&perm);
    let mut c = vec![0usize; m];
    let mut i = 0;
    while i < m {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            let cand = image(&perm);
            if cand < best {
                best = cand;
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    best
}

/// Element colours refined until stable. Colours are dense ranks of
/// isomorphism-invariant signatures, so cell order is itself invariant.
fn refine(sets: &[Vec<usize>], memberships: &[Vec<usize>], mut colour: Vec<usize>) -> Vec<usize> {
    let mut classes = count_distinct(&colour);
    loop {
        let sigs: Vec<(usize, Vec<Vec<usize>>)> = (0..colour.len())
            .map(|e| {
                let mut around: Vec<Vec<usize>> = memberships[e]
                    .iter()
                    .map(|&si| {
                        let mut cs: Vec<usize> = sets[si].iter().filter(|&&x| x != e).map(|&x| colour[x]).collect();
                        cs.sort_unstable();
                        cs
                    })
                    .collect();
                around.sort_unstable();
                (colour[e], around)
            })
            .collect();
        let mut ranks: BTreeMap<&(usize, Vec<Vec<usize>>), usize> = BTreeMap::new();
        for s in &sigs {
            ranks.insert(s, 0);
        }
        for (i, v) in ranks.values_mut().enumerate() {
            *v = i;
        }
        let next: Vec<usize> = sigs.iter().map(|s| ranks[s]).collect();
        let n = ranks.len();
        colour = next;
        if n == classes {
            return colour;
        }
        classes = n;
    }
}

fn count_distinct(colour: &[usize]) -> usize {
    let mut c = colour.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

fn search_refined<K: Ord + Clone>(
    sets: &[Vec<usize>],
    m: usize,
    key_of: impl Fn(&[usize]) -> K,
) -> (K, Vec<usize>) {
    // Only elements that occur matter; the rest take the top labels.
    let mut used = vec![false; m];
    for s in sets {
        for &e in s {
            used[e] = true;
        }
    }
    let support: Vec<usize> = (0..m).filter(|&e| used[e]).collect();
    let mut index = vec![usize::MAX; m];
    for (i, &e) in support.iter().enumerate() {
        index[e] = i;
    }
    let local: Vec<Vec<usize>> = sets.iter().map(|s| s.iter().map(|&e| index[e]).collect()).collect();
    let u = support.len();
    let widen = |lab: &[usize]| -> Vec<usize> {
        let mut full = vec![0usize; m];
        let mut next = u;
        for e in 0..m {
            if used[e] {
                full[e] = lab[index[e]];
            } else {
                full[e] = next;
                next += 1;
            }
        }
        full
    };

    let mut memberships = vec![Vec::new(); u];
    for (si, s) in local.iter().enumerate() {
        for &e in s {
            memberships[e].push(si);
        }
    }
    // Higher degree first.
    let max_deg = memberships.iter().map(Vec::len).max().unwrap_or(0);
    let initial: Vec<usize> = memberships.iter().map(|ms| max_deg - ms.len()).collect();
    let colour = refine(&local, &memberships, initial);
    let mut state = SearchState { first: None, best: None, generators: Vec::new() };
    let ctx = Ctx { sets: &local, memberships: &memberships, key_of: &|lab: &[usize]| key_of(&widen(lab)) };
    descend(&ctx, &mut Vec::new(), colour, &mut state);
    let (key, lab) = state.best.expect("at least one leaf");
    (key, widen(&lab))
}

struct Ctx<'a, K> {
    sets: &'a [Vec<usize>],
    memberships: &'a [Vec<usize>],
    key_of: &'a dyn Fn(&[usize]) -> K,
}

struct SearchState<K> {
    first: Option<(K, Vec<usize>)>,
    best: Option<(K, Vec<usize>)>,
    /// Automorphisms discovered from leaves with equal keys.
    generators: Vec<Vec<usize>>,
}

fn descend<K: Ord + Clone>(ctx: &Ctx<'_, K>, prefix: &mut Vec<usize>, colour: Vec<usize>, state: &mut SearchState<K>) {
    let m = colour.len();
    let mut counts = vec![0usize; m];
    for &c in &colour {
        counts[c] += 1;
    }
    // First (lowest-colour) non-singleton cell.
    let Some(cell) = (0..m).find(|&c| counts[c] > 1) else {
        leaf(ctx, colour, state);
        return;
    };
    let members: Vec<usize> = (0..m).filter(|&e| colour[e] == cell).collect();
    let mut explored: Vec<usize> = Vec::new();
    for &e in &members {
        if !explored.is_empty() {
            let orbit = orbit_ids(m, &state.generators, prefix);
            if explored.iter().any(|&x| orbit[x] == orbit[e]) {
                continue;
            }
        }
        let split: Vec<usize> = (0..m).map(|x| 2 * colour[x] + usize::from(x != e)).collect();
        let split = refine(ctx.sets, ctx.memberships, dense(split));
        prefix.push(e);
        descend(ctx, prefix, split, state);
        prefix.pop();
        explored.push(e);
    }
}

fn leaf<K: Ord + Clone>(ctx: &Ctx<'_, K>, labeling: Vec<usize>, state: &mut SearchState<K>) {
    let key = (ctx.key_of)(&labeling);
    for known in [&state.first, &state.best].into_iter().flatten() {
        if known.0 == key {
            // Both labelings give the same image: their quotient is an automorphism.
            let mut inverse = vec![0usize; labeling.len()];
            for (e, &l) in known.1.iter().enumerate() {
                inverse[l] = e;
            }
            let gamma: Vec<usize> = labeling.iter().map(|&l| inverse[l]).collect();
            if gamma.iter().enumerate().any(|(i, &g)| i != g) {
                state.generators.push(gamma);
            }
            break;
        }
    }
    if state.first.is_none() {
        state.first = Some((key.clone(), labeling.clone()));
    }
    if state.best.as_ref().is_none_or(|(b, _)| key < *b) {
        state.best = Some((key, labeling));
    }
}

/// Orbit representatives under the generators that fix `prefix` pointwise.
fn orbit_ids(m: usize, generators: &[Vec<usize>], prefix: &[usize]) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for g in generators.iter().filter(|g| prefix.iter().all(|&v| g[v] == v)) {
        for (x, &y) in g.iter().enumerate() {
            let (a, b) = (find(&mut parent, x), find(&mut parent, y));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    (0..m).map(|x| find(&mut parent, x)).collect()
}

fn dense(colour: Vec<usize>) -> Vec<usize> {
    let mut vals = colour.clone();
    vals.sort_unstable();
    vals.dedup();
    colour.iter().map(|c| vals.binary_search(c).unwrap()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(r: usize, sets: &[&[u32]]) -> SetFamily {
        SetFamily::from_vecs(r, sets.iter().map(|s| s.to_vec()).collect()).unwrap()
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(canonical_form(&fam(2, &[&[2, 3]])), fam(2, &[&[1, 2]]));
        let f = fam(2, &[&[1, 2], &[1, 3]]);
        assert_eq!(canonical_form(&f), f);
        assert_eq!(canonical_form(&fam(2, &[&[1, 3], &[2, 3]])), f);
        assert_eq!(canonical_form(&SetFamily::empty(3)), SetFamily::empty(3));
    }

    #[test]
    fn refined_agrees_on_small_examples() {
        assert_eq!(canonical_form_refined(&fam(2, &[&[2, 3]])), fam(2, &[&[1, 2]]));
        let f = fam(2, &[&[1, 2], &[1, 3]]);
        assert_eq!(canonical_form_refined(&fam(2, &[&[1, 3], &[2, 3]])), canonical_form_refined(&f));
    }

    #[test]
    fn full_search_matches_brute_force_oracle() {
        // Oracle: enumerate permutations with itertools-free recursion.
        fn perms(n: usize) -> Vec<Vec<u32>> {
            if n == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for p in perms(n - 1) {
                for pos in 0..=p.len() {
                    let mut q = p.clone();
                    q.insert(pos, n as u32);
                    out.push(q);
                }
            }
            out
        }
        let f = fam(3, &[&[1, 2, 4], &[2, 3, 5], &[1, 4, 5], &[3, 4, 5]]);
        let best = perms(5)
            .into_iter()
            .map(|p| f.relabel(|x| p[x as usize - 1]))
            .min_by(|x, y| x.sets().cmp(y.sets()))
            .unwrap();
        assert_eq!(canonical_form(&f), best);
    }

    #[test]
    fn wide_ground_uses_refinement() {
        let f = fam(2, &[&[1, 70], &[70, 71]]);
        let g = fam(2, &[&[5, 6], &[6, 100]]);
        assert_eq!(canonical_form(&f), canonical_form(&g));
        assert_eq!(canonical_form(&f), fam(2, &[&[1, 2], &[1, 3]]));
    }

    #[test]
    fn labeling_is_a_permutation() {
        let masks = [0b0111u64, 0b1011, 0b1110];
        let lab = canonical_labeling(&masks, 6);
        let mut seen = lab.label.clone();
        seen.sort_unstable();
        assert_eq!(seen, vec![0, 1, 2, 3, 4, 5]);
        let mut image: Vec<u64> = masks.iter().map(|&m| relabel_mask(m, &lab.label)).collect();
        image.sort_unstable();
        assert_eq!(image, lab.key);
    }
}
