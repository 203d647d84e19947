//! Exact pair accounting for 3-uniform incidence hypergraphs.
//!
//! Every ordered pair of distinct vertices is at distance 1, 2 or at least 3.
//! The error terms `ε₁ … ε₉` measure, per vertex, how far the configuration is
//! from the extremal one, and together they satisfy
//!
//! ```text
//! b(b-1) = 9a²/(2b) - 3a/2 + 6a
//!          + Σ_B [ε₁/2 + ε₂/8 + ε₃/4 + ε₄/4 + ε₅/2 + 3ε₆/4 + ε₇ + ε₈ + ε₉]
//! ```
//!
//! exactly. The per-vertex bracket is `γ(B)`.
//!
//! Conventions:
//! * A P₂ here is an unordered pair of distinct edges sharing an incident
//!   vertex (the centre). Each such pair has 2, 3 or 4 cross pairs of
//!   non-centre vertices at distance 2; `ε₂`/`ε₃` credit every one of the 4
//!   non-centre vertices of a pair with 3/4 such cross pairs.
//! * `ε₄ … ε₇` count distance-2 partners joined by exactly 3/2/1/0 paths
//!   through a common centre.
//! * `ε₈` counts distance-1 partners not joined by an edge; `ε₉` counts
//!   partners at distance 3 or more.

use std::collections::{BTreeMap, HashMap};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::AnalyticsError;
use crate::incidence::IncidenceHypergraph;
use crate::kset::KSet;

fn rat(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn frac(p: u64, q: u64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

fn require_k3(h: &IncidenceHypergraph) -> Result<(), AnalyticsError> {
    if h.k() != 3 {
        return Err(AnalyticsError::WrongK(h.k()));
    }
    Ok(())
}

/// Unordered pairs of distinct edges sharing an incident vertex, counted by
/// direct enumeration of edge pairs.
pub fn count_p2(h: &IncidenceHypergraph) -> Result<u64, AnalyticsError> {
    require_k3(h)?;
    let mut n = 0u64;
    for e1 in 0..h.num_edges() {
        for e2 in e1 + 1..h.num_edges() {
            let (x, y) = (h.incident_vertices(e1), h.incident_vertices(e2));
            if x.iter().any(|v| y.contains(v)) {
                n += 1;
            }
        }
    }
    Ok(n)
}

/// `Σ_B binom(deg(B), 2)`.
pub fn sum_degree_pairs(h: &IncidenceHypergraph) -> u64 {
    h.degrees().iter().map(|&d| (d * d.saturating_sub(1) / 2) as u64).sum()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexEpsilon {
    pub e1: BigRational,
    pub e2: u64,
    pub e3: u64,
    pub e4: u64,
    pub e5: u64,
    pub e6: u64,
    pub e7: u64,
    pub e8: u64,
    pub e9: u64,
}

impl VertexEpsilon {
    fn zero(e1: BigRational) -> Self {
        VertexEpsilon { e1, e2: 0, e3: 0, e4: 0, e5: 0, e6: 0, e7: 0, e8: 0, e9: 0 }
    }

    /// `γ(B)`: the weighted per-vertex error.
    pub fn gamma(&self) -> BigRational {
        &self.e1 / rat(2)
            + frac(self.e2, 8)
            + frac(self.e3, 4)
            + frac(self.e4, 4)
            + frac(self.e5, 2)
            + frac(3 * self.e6, 4)
            + rat(self.e7 + self.e8 + self.e9)
    }
}

/// Raw pair counts the profile is assembled from.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PairCounts {
    /// Unordered intersecting edge pairs.
    pub p2: u64,
    /// Intersecting edge pairs with 2, 3, 4 cross pairs at distance 2.
    pub p2_by_cross: [u64; 3],
    /// Ordered (path, endpoint, endpoint) triples with endpoints at distance 2.
    pub j: u64,
    pub ordered_distance1: u64,
    pub ordered_distance2: u64,
    pub ordered_far: u64,
    /// Ordered distance-2 pairs joined by 0..=4 paths.
    pub paths_histogram: [u64; 5],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpsilonProfile {
    pub a: u64,
    pub b: u64,
    pub vertices: Vec<VertexEpsilon>,
    pub sums: VertexEpsilon,
    pub counts: PairCounts,
}

/// Number of centre paths from `u` to each vertex at distance 2.
fn distance2_paths(h: &IncidenceHypergraph, u: usize) -> HashMap<usize, u32> {
    let mut out: HashMap<usize, u32> = HashMap::new();
    for &e1 in h.incident_edges(u) {
        for &c in h.incident_vertices(e1) {
            if c == u {
                continue;
            }
            for &e2 in h.incident_edges(c) {
                if e2 == e1 {
                    continue;
                }
                for &v in h.incident_vertices(e2) {
                    if v != c && h.vertex_distance(u, v) == 2 {
                        *out.entry(v).or_default() += 1;
                    }
                }
            }
        }
    }
    out
}

pub fn epsilon_profile(h: &IncidenceHypergraph) -> Result<EpsilonProfile, AnalyticsError> {
    require_k3(h)?;
    let b = h.num_vertices();
    if b == 0 {
        return Err(AnalyticsError::NoVertices);
    }
    let a = h.num_edges();
    let mean = BigRational::new(BigInt::from(3 * a), BigInt::from(b));
    let mut verts: Vec<VertexEpsilon> = h
        .degrees()
        .iter()
        .map(|&d| {
            let dev = rat(d as u64) - &mean;
            VertexEpsilon::zero(&dev * &dev)
        })
        .collect();
    let mut counts = PairCounts::default();

    for c in 0..b {
        let inc = h.incident_edges(c);
        for (i, &e1) in inc.iter().enumerate() {
            for &e2 in &inc[i + 1..] {
                let o1: Vec<usize> = h.incident_vertices(e1).iter().copied().filter(|&v| v != c).collect();
                let o2: Vec<usize> = h.incident_vertices(e2).iter().copied().filter(|&v| v != c).collect();
                let cross = o1.iter().flat_map(|&x| o2.iter().map(move |&y| (x, y))).filter(|&(x, y)| h.vertex_distance(x, y) == 2).count();
                if !(2..=4).contains(&cross) {
                    return Err(AnalyticsError::Invariant(format!(
                        "intersecting edges {e1},{e2} have {cross} cross pairs at distance 2"
                    )));
                }
                counts.p2 += 1;
                counts.p2_by_cross[cross - 2] += 1;
                for &v in o1.iter().chain(&o2) {
                    match cross {
                        3 => verts[v].e2 += 1,
                        4 => verts[v].e3 += 1,
                        _ => {}
                    }
                }
            }
        }
    }

    for u in 0..b {
        let paths = distance2_paths(h, u);
        for v in 0..b {
            if v == u {
                continue;
            }
            match h.vertex_distance(u, v) {
                1 => {
                    counts.ordered_distance1 += 1;
                    if h.edge_between(u, v).is_none() {
                        verts[u].e8 += 1;
                    }
                }
                2 => {
                    counts.ordered_distance2 += 1;
                    let p = paths.get(&v).copied().unwrap_or(0) as usize;
                    if p > 4 {
                        return Err(AnalyticsError::Invariant(format!("{p} paths between vertices {u} and {v}")));
                    }
                    counts.paths_histogram[p] += 1;
                    counts.j += p as u64;
                    match p {
                        3 => verts[u].e4 += 1,
                        2 => verts[u].e5 += 1,
                        1 => verts[u].e6 += 1,
                        0 => verts[u].e7 += 1,
                        _ => {}
                    }
                }
                _ => {
                    counts.ordered_far += 1;
                    verts[u].e9 += 1;
                }
            }
        }
    }

    let mut sums = VertexEpsilon::zero(BigRational::zero());
    for v in &verts {
        sums.e1 += &v.e1;
        sums.e2 += v.e2;
        sums.e3 += v.e3;
        sums.e4 += v.e4;
        sums.e5 += v.e5;
        sums.e6 += v.e6;
        sums.e7 += v.e7;
        sums.e8 += v.e8;
        sums.e9 += v.e9;
    }
    Ok(EpsilonProfile { a: a as u64, b: b as u64, vertices: verts, sums, counts })
}

impl EpsilonProfile {
    /// `|J|` assembled from the intersecting-pair side:
    /// `4·#P₂ + Σε₂/2 + Σε₃`.
    pub fn j_from_edge_pairs(&self) -> BigRational {
        rat(4 * self.counts.p2) + frac(self.sums.e2, 2) + rat(self.sums.e3)
    }

    /// `|J|` assembled from the distance-2 side:
    /// `4·#(ordered distance-2 pairs) - Σε₄ - 2Σε₅ - 3Σε₆ - 4Σε₇`.
    pub fn j_from_distance_pairs(&self) -> BigRational {
        let s = &self.sums;
        BigRational::from_integer(
            BigInt::from(4 * self.counts.ordered_distance2) - BigInt::from(s.e4 + 2 * s.e5 + 3 * s.e6 + 4 * s.e7),
        )
    }

    /// Largest `γ(B)` over all vertices.
    pub fn gamma_max(&self) -> BigRational {
        self.vertices.iter().map(VertexEpsilon::gamma).max().unwrap_or_else(BigRational::zero)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityReport {
    pub lhs: BigRational,
    pub rhs: BigRational,
    pub equal: bool,
    pub profile: EpsilonProfile,
}

/// Evaluates both sides of the pair-count identity in exact rationals.
pub fn identity_check(h: &IncidenceHypergraph) -> Result<IdentityReport, AnalyticsError> {
    let profile = epsilon_profile(h)?;
    let (a, b) = (profile.a, profile.b);
    let lhs = rat(b * (b - 1));
    let mut rhs = BigRational::new(BigInt::from(9 * a * a), BigInt::from(2 * b)) - frac(3 * a, 2) + rat(6 * a);
    rhs += profile.sums.gamma();
    Ok(IdentityReport { equal: lhs == rhs, lhs, rhs, profile })
}

/// `γ` at a single vertex.
pub fn k3_gamma(h: &IncidenceHypergraph, vertex: usize) -> Result<BigRational, AnalyticsError> {
    if vertex >= h.num_vertices() {
        return Err(AnalyticsError::UnknownVertex(vertex));
    }
    Ok(epsilon_profile(h)?.vertices[vertex].gamma())
}

/// Colour classes of the edges at a focus vertex `B`. An incident edge
/// `B ∪ {x}` meets its other two vertices as `B ∪ {x} ∖ {y}` and
/// `B ∪ {x} ∖ {z}`; its colour is `{y, z}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColourClassReport {
    pub focus: KSet,
    /// `(edge index, colour)` for every incident edge.
    pub colours: Vec<(usize, (u32, u32))>,
    /// Class sizes keyed by colour, ascending.
    pub classes: Vec<((u32, u32), usize)>,
    /// Size of the largest class.
    pub s: usize,
    /// Colour of the largest class (least colour on ties).
    pub chosen: Option<(u32, u32)>,
    /// `B ∖ {y, z}` for the chosen colour.
    pub core: Option<KSet>,
}

impl ColourClassReport {
    /// Number of unordered same-colour edge pairs.
    pub fn same_colour_pairs(&self) -> usize {
        self.classes.iter().map(|(_, n)| n * n.saturating_sub(1) / 2).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OctahedronReport {
    /// Distance-2 partners joined to the focus by all 4 paths.
    pub octahedra: usize,
    pub colour_report: ColourClassReport,
}

pub fn colour_classes(h: &IncidenceHypergraph, vertex: usize) -> Result<ColourClassReport, AnalyticsError> {
    require_k3(h)?;
    if vertex >= h.num_vertices() {
        return Err(AnalyticsError::UnknownVertex(vertex));
    }
    let focus = h.vertex(vertex).clone();
    let mut colours = Vec::new();
    let mut classes: BTreeMap<(u32, u32), usize> = BTreeMap::new();
    for &e in h.incident_edges(vertex) {
        let edge = h.edge(e);
        let removed: Vec<u32> = h
            .incident_vertices(e)
            .iter()
            .filter(|&&v| v != vertex)
            .map(|&v| {
                let d = edge.difference(h.vertex(v));
                d.elements()[0]
            })
            .collect();
        let colour = (removed[0].min(removed[1]), removed[0].max(removed[1]));
        colours.push((e, colour));
        *classes.entry(colour).or_default() += 1;
    }
    let classes: Vec<((u32, u32), usize)> = classes.into_iter().collect();
    let s = classes.iter().map(|&(_, n)| n).max().unwrap_or(0);
    let chosen = classes.iter().find(|&&(_, n)| n == s && s > 0).map(|&(c, _)| c);
    let core = chosen.map(|(y, z)| focus.without(y).without(z));
    Ok(ColourClassReport { focus, colours, classes, s, chosen, core })
}

pub fn octahedron_census(h: &IncidenceHypergraph, vertex: usize) -> Result<OctahedronReport, AnalyticsError> {
    let colour_report = colour_classes(h, vertex)?;
    let octahedra = distance2_paths(h, vertex).values().filter(|&&p| p == 4).count();
    Ok(OctahedronReport { octahedra, colour_report })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EdgeClasses {
    /// All incident vertices contain the core.
    pub nice: usize,
    /// Some, but not all, incident vertices contain the core.
    pub linking: usize,
    /// No incident vertex contains the core.
    pub outside: usize,
}

/// Splits edges by how many of their incident vertices contain `core`.
///
/// A linking edge through a vertex `T` that misses the core must equal
/// `T ∪ core`; a violation is reported as an error.
pub fn classify_edges(h: &IncidenceHypergraph, core: &KSet) -> Result<EdgeClasses, AnalyticsError> {
    let expected = h.r() - h.k();
    if core.len() != expected {
        return Err(AnalyticsError::CoreSize { expected, found: core.len() });
    }
    let mut out = EdgeClasses::default();
    for e in 0..h.num_edges() {
        let inc = h.incident_vertices(e);
        let inside = inc.iter().filter(|&&v| core.is_subset_of(h.vertex(v))).count();
        if inside == inc.len() {
            out.nice += 1;
        } else if inside == 0 {
            out.outside += 1;
        } else {
            out.linking += 1;
            for &v in inc.iter().filter(|&&v| !core.is_subset_of(h.vertex(v))) {
                if h.vertex(v).union(core) != *h.edge(e) {
                    return Err(AnalyticsError::Invariant(format!(
                        "linking edge {} through {} is not {} ∪ core",
                        h.edge(e),
                        h.vertex(v),
                        h.vertex(v)
                    )));
                }
            }
        }
    }
    Ok(out)
}

/// Renders a rational as `p/q` (or `p` for integers).
pub fn rational_string(q: &BigRational) -> String {
    if q.denom() == &BigInt::from(1) {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Exact `BigUint` to `BigRational`.
pub fn natural_to_rational(n: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(n.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{canonical_configuration, construct_be, shadow, Configuration, SetFamily};
    use crate::incidence::build_incidence;

    fn canonical(c: usize) -> IncidenceHypergraph {
        build_incidence(&canonical_configuration(3, 3, c).unwrap()).unwrap()
    }

    fn single_edge() -> IncidenceHypergraph {
        let a = SetFamily::from_vecs(3, vec![vec![1, 2, 3]]).unwrap();
        let b = shadow(&a).unwrap();
        build_incidence(&Configuration::new(3, a, b).unwrap()).unwrap()
    }

    #[test]
    fn p2_counts() {
        let h = canonical(4);
        assert_eq!(count_p2(&h).unwrap(), 6);
        assert_eq!(sum_degree_pairs(&h), 6);
        assert_eq!(count_p2(&single_edge()).unwrap(), 0);
        let a = SetFamily::from_vecs(3, vec![vec![1, 2, 3], vec![4, 5, 6]]).unwrap();
        let b = shadow(&a).unwrap();
        let h = build_incidence(&Configuration::new(3, a, b).unwrap()).unwrap();
        assert_eq!(count_p2(&h).unwrap(), 0);
    }

    #[test]
    fn canonical_c4_profile_is_zero() {
        let p = epsilon_profile(&canonical(4)).unwrap();
        assert!(p.sums.e1.is_zero());
        assert_eq!(
            [p.sums.e2, p.sums.e3, p.sums.e4, p.sums.e5, p.sums.e6, p.sums.e7, p.sums.e8, p.sums.e9],
            [0; 8]
        );
    }

    #[test]
    fn removing_an_edge_creates_uncovered_pairs() {
        let cfg = canonical_configuration(3, 3, 4).unwrap();
        let removed = KSet::new(vec![2, 3, 4]).unwrap();
        let cfg = Configuration::new(3, cfg.a.without_set(&removed), cfg.b).unwrap();
        let h = build_incidence(&cfg).unwrap();
        let p = epsilon_profile(&h).unwrap();
        assert_eq!(p.sums.e8, 6);
        let v = h.vertex_index(&KSet::new(vec![2, 3]).unwrap()).unwrap();
        assert!(k3_gamma(&h, v).unwrap() > BigRational::zero());
        assert!(identity_check(&h).unwrap().equal);
    }

    #[test]
    fn single_edge_has_no_far_pairs() {
        let h = single_edge();
        let p = epsilon_profile(&h).unwrap();
        assert!(p.vertices.iter().all(|v| v.e9 == 0));
        for v in 0..3 {
            assert!(k3_gamma(&h, v).unwrap().is_zero());
        }
        assert!(identity_check(&h).unwrap().equal);
    }

    #[test]
    fn identity_on_canonical_configurations() {
        let r = identity_check(&canonical(4)).unwrap();
        assert_eq!(r.lhs, rat(30));
        assert_eq!(r.rhs, rat(30));
        assert!(r.equal);
        assert!(identity_check(&canonical(5)).unwrap().equal);
    }

    #[test]
    fn gamma_zero_on_canonical() {
        for c in 4..=6 {
            let h = canonical(c);
            for v in 0..h.num_vertices() {
                assert!(k3_gamma(&h, v).unwrap().is_zero());
            }
        }
        assert_eq!(k3_gamma(&canonical(4), 99), Err(AnalyticsError::UnknownVertex(99)));
    }

    #[test]
    fn octahedra_and_colours() {
        let h = canonical(4);
        for v in 0..h.num_vertices() {
            let rep = octahedron_census(&h, v).unwrap();
            assert_eq!(rep.octahedra, 1);
            assert_eq!(rep.colour_report.classes.len(), 1);
            assert_eq!(rep.colour_report.s, 2);
        }
        let h = canonical(5);
        for v in 0..h.num_vertices() {
            let rep = octahedron_census(&h, v).unwrap();
            assert_eq!(rep.octahedra, 3);
            assert_eq!(rep.colour_report.classes.len(), 1);
            assert_eq!(rep.colour_report.s, 3);
            assert_eq!(rep.colour_report.s, h.degree(v));
        }
        let rep = octahedron_census(&single_edge(), 0).unwrap();
        assert_eq!(rep.octahedra, 0);
    }

    #[test]
    fn colour_core_recovers_padding() {
        let be = construct_be(5, 3, 6).unwrap();
        let h = build_incidence(&be.config).unwrap();
        let rep = colour_classes(&h, 0).unwrap();
        let (y, z) = rep.chosen.unwrap();
        assert_eq!(rep.core.unwrap(), h.vertex(0).without(y).without(z));
        assert!(be.core.is_subset_of(h.vertex(0)));
    }

    #[test]
    fn classify_examples() {
        let h = canonical(4);
        assert_eq!(classify_edges(&h, &KSet::empty()).unwrap(), EdgeClasses { nice: 4, linking: 0, outside: 0 });

        let be = construct_be(5, 3, 6).unwrap();
        let h = build_incidence(&be.config).unwrap();
        assert_eq!(classify_edges(&h, &be.core).unwrap(), EdgeClasses { nice: 4, linking: 0, outside: 0 });

        // Two foreign vertices and the edge through them and one nice vertex.
        let mut b: Vec<KSet> = be.config.b.sets().to_vec();
        b.push(KSet::new(vec![1, 2, 5, 7]).unwrap());
        b.push(KSet::new(vec![1, 2, 6, 7]).unwrap());
        let mut a: Vec<KSet> = be.config.a.sets().to_vec();
        a.push(KSet::new(vec![1, 2, 5, 6, 7]).unwrap());
        let cfg = Configuration::new(3, SetFamily::new(5, a).unwrap(), SetFamily::new(4, b).unwrap()).unwrap();
        let h = build_incidence(&cfg).unwrap();
        assert_eq!(classify_edges(&h, &be.core).unwrap(), EdgeClasses { nice: 4, linking: 1, outside: 0 });
        assert!(matches!(classify_edges(&h, &KSet::empty()), Err(AnalyticsError::CoreSize { .. })));
    }

    #[test]
    fn wrong_k_rejected() {
        let cfg = construct_be(4, 2, 3).unwrap().config;
        let h = build_incidence(&cfg).unwrap();
        assert_eq!(epsilon_profile(&h), Err(AnalyticsError::WrongK(2)));
        assert_eq!(count_p2(&h), Err(AnalyticsError::WrongK(2)));
    }
}
