//! The incidence hypergraph of a valid configuration: one vertex per member
//! of `B`, one edge per member of `A`, each edge wired to exactly `k` of the
//! `B`-members it contains.

use std::collections::HashMap;

use crate::error::IncidenceError;
use crate::family::Configuration;
use crate::kset::KSet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncidenceHypergraph {
    r: usize,
    k: usize,
    vertices: Vec<KSet>,
    edges: Vec<KSet>,
    /// Sorted vertex indices incident to each edge.
    incidence: Vec<Vec<usize>>,
    /// Sorted edge indices incident to each vertex.
    vertex_edges: Vec<Vec<usize>>,
    vertex_index: HashMap<KSet, usize>,
}

/// Builds the incidence hypergraph, wiring each edge to the `k` colex-smallest
/// members of `B` it contains.
pub fn build_incidence(config: &Configuration) -> Result<IncidenceHypergraph, IncidenceError> {
    let k = config.k;
    if k == 0 {
        return Err(IncidenceError::ZeroK);
    }
    let report = config.validate();
    if !report.passed {
        return Err(IncidenceError::CoverFailure { k, violations: report.violating.len() });
    }
    let vertices: Vec<KSet> = config.b.sets().to_vec();
    let edges: Vec<KSet> = config.a.sets().to_vec();
    let vertex_index: HashMap<KSet, usize> = vertices.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
    let mut incidence = Vec::with_capacity(edges.len());
    let mut vertex_edges = vec![Vec::new(); vertices.len()];
    for (ei, e) in edges.iter().enumerate() {
        // lower_shadow yields colex order, so the first k hits are the smallest.
        let chosen: Vec<usize> = e.lower_shadow().filter_map(|s| vertex_index.get(&s).copied()).take(k).collect();
        debug_assert_eq!(chosen.len(), k);
        let mut chosen = chosen;
        chosen.sort_unstable();
        for &v in &chosen {
            vertex_edges[v].push(ei);
        }
        incidence.push(chosen);
    }
    Ok(IncidenceHypergraph { r: config.r(), k, vertices, edges, incidence, vertex_edges, vertex_index })
}

impl IncidenceHypergraph {
    /// Member size of the edges.
    pub fn r(&self) -> usize {
        self.r
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of edges (`a`).
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Number of vertices (`b`).
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex(&self, v: usize) -> &KSet {
        &self.vertices[v]
    }

    pub fn edge(&self, e: usize) -> &KSet {
        &self.edges[e]
    }

    pub fn vertices(&self) -> &[KSet] {
        &self.vertices
    }

    pub fn edges(&self) -> &[KSet] {
        &self.edges
    }

    pub fn incident_vertices(&self, e: usize) -> &[usize] {
        &self.incidence[e]
    }

    pub fn incident_edges(&self, v: usize) -> &[usize] {
        &self.vertex_edges[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.vertex_edges[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.vertex_edges.iter().map(Vec::len).collect()
    }

    pub fn vertex_index(&self, s: &KSet) -> Option<usize> {
        self.vertex_index.get(s).copied()
    }

    pub fn is_incident(&self, v: usize, e: usize) -> bool {
        self.incidence[e].binary_search(&v).is_ok()
    }

    /// The edge incident to both `u` and `v`, if any. Two distinct vertices
    /// lie in at most one common edge (their union).
    pub fn edge_between(&self, u: usize, v: usize) -> Option<usize> {
        let (short, other) = if self.degree(u) <= self.degree(v) { (u, v) } else { (v, u) };
        self.vertex_edges[short].iter().copied().find(|&e| self.is_incident(other, e))
    }

    /// Distance between two vertices (half their symmetric difference).
    pub fn vertex_distance(&self, u: usize, v: usize) -> usize {
        let (a, b) = (&self.vertices[u], &self.vertices[v]);
        a.len() - a.intersection_size(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{canonical_configuration, construct_be, SetFamily};

    #[test]
    fn canonical_c4_degrees() {
        let h = build_incidence(&canonical_configuration(3, 3, 4).unwrap()).unwrap();
        assert_eq!((h.num_vertices(), h.num_edges()), (6, 4));
        assert!(h.degrees().iter().all(|&d| d == 2));
    }

    #[test]
    fn single_edge() {
        let a = SetFamily::from_vecs(3, vec![vec![1, 2, 3]]).unwrap();
        let b = crate::family::shadow(&a).unwrap();
        let h = build_incidence(&Configuration::new(3, a, b).unwrap()).unwrap();
        assert_eq!(h.degrees(), vec![1, 1, 1]);
    }

    #[test]
    fn be_matches_canonical_degrees() {
        let be = build_incidence(&construct_be(5, 3, 6).unwrap().config).unwrap();
        let canon = build_incidence(&canonical_configuration(3, 3, 4).unwrap()).unwrap();
        let mut d1 = be.degrees();
        let mut d2 = canon.degrees();
        d1.sort_unstable();
        d2.sort_unstable();
        assert_eq!(d1, d2);
        assert_eq!(d1.iter().sum::<usize>(), 3 * be.num_edges());
    }

    #[test]
    fn tie_break_takes_colex_smallest() {
        // All four 3-subsets of {1,2,3,4} present, k=3: drop {2,3,4}.
        let a = SetFamily::from_vecs(4, vec![vec![1, 2, 3, 4]]).unwrap();
        let b = crate::family::shadow(&a).unwrap();
        let h = build_incidence(&Configuration::new(3, a, b).unwrap()).unwrap();
        let chosen: Vec<&KSet> = h.incident_vertices(0).iter().map(|&v| h.vertex(v)).collect();
        assert!(!chosen.contains(&&KSet::new(vec![2, 3, 4]).unwrap()));
        assert_eq!(h.degrees(), vec![1, 1, 1, 0]);
    }

    #[test]
    fn rejects_invalid_configuration() {
        let a = SetFamily::from_vecs(3, vec![vec![1, 2, 3]]).unwrap();
        let b = SetFamily::from_vecs(2, vec![vec![1, 2]]).unwrap();
        let err = build_incidence(&Configuration::new(2, a, b).unwrap()).unwrap_err();
        assert_eq!(err, IncidenceError::CoverFailure { k: 2, violations: 1 });
    }

    #[test]
    fn rebuild_is_deterministic() {
        let cfg = construct_be(6, 4, 30).unwrap().config;
        assert_eq!(build_incidence(&cfg).unwrap(), build_incidence(&cfg).unwrap());
    }
}
