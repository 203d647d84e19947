//! Walks in the incidence hypergraph and the probability measures on them.
//!
//! A path of length `i` is an alternating sequence `v₀ e₁ v₁ … eᵢ vᵢ` where
//! every `vⱼ` is incident to `eⱼ` and `eⱼ₊₁`. Repetition is allowed, so
//! `|L₁| = a·k²`. The measure
//!
//! ```text
//! μᵢ(l) = 1 / (deg(v₁)·…·deg(vᵢ₋₁) · a · k^(i+1))
//! ```
//!
//! sums to one over `Lᵢ`, and `μ₀(v) = deg(v)/(ka)`.
//!
//! Weight only depends on the product of interior degrees, so distributions
//! are computed by dynamic programming over `(endpoint, product)` classes
//! rather than by listing paths.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::PathError;
use crate::incidence::IncidenceHypergraph;

/// Default ceiling on `|Lᵢ|` before any path-space computation is refused.
pub const DEFAULT_PATH_CAP: u128 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Path {
    /// `v₀ … vᵢ`.
    pub vertices: Vec<usize>,
    /// `e₁ … eᵢ`.
    pub edges: Vec<usize>,
}

impl Path {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn reversed(&self) -> Path {
        Path {
            vertices: self.vertices.iter().rev().copied().collect(),
            edges: self.edges.iter().rev().copied().collect(),
        }
    }

    pub fn start(&self) -> usize {
        self.vertices[0]
    }

    pub fn end(&self) -> usize {
        *self.vertices.last().expect("a path has at least one vertex")
    }

    /// Checks shape and incidence against `h`.
    pub fn check(&self, h: &IncidenceHypergraph) -> Result<(), PathError> {
        if self.vertices.len() != self.edges.len() + 1 {
            return Err(PathError::InvalidPath(format!(
                "{} vertices for {} edges",
                self.vertices.len(),
                self.edges.len()
            )));
        }
        if self.vertices.iter().any(|&v| v >= h.num_vertices()) || self.edges.iter().any(|&e| e >= h.num_edges()) {
            return Err(PathError::InvalidPath("index out of range".into()));
        }
        for (j, &e) in self.edges.iter().enumerate() {
            for v in [self.vertices[j], self.vertices[j + 1]] {
                if !h.is_incident(v, e) {
                    return Err(PathError::InvalidPath(format!("vertex {v} is not incident to edge {e}")));
                }
            }
        }
        Ok(())
    }

    /// No vertex and no edge occurs twice.
    pub fn is_self_avoiding(&self) -> bool {
        let mut vs = self.vertices.clone();
        let mut es = self.edges.clone();
        vs.sort_unstable();
        es.sort_unstable();
        vs.windows(2).all(|w| w[0] != w[1]) && es.windows(2).all(|w| w[0] != w[1])
    }
}

fn require_edges(h: &IncidenceHypergraph) -> Result<(), PathError> {
    if h.num_edges() == 0 {
        return Err(PathError::Empty);
    }
    Ok(())
}

/// Exact `|Lᵢ|` by counting walks ending at each vertex; saturates at
/// `u128::MAX`.
pub fn path_count(h: &IncidenceHypergraph, i: usize) -> u128 {
    if i == 0 {
        return h.num_vertices() as u128;
    }
    let mut ending = vec![1u128; h.num_vertices()];
    for _ in 0..i {
        let per_edge: Vec<u128> = (0..h.num_edges())
            .map(|e| h.incident_vertices(e).iter().fold(0u128, |s, &u| s.saturating_add(ending[u])))
            .collect();
        ending = (0..h.num_vertices())
            .map(|v| h.incident_edges(v).iter().fold(0u128, |s, &e| s.saturating_add(per_edge[e])))
            .collect();
    }
    ending.iter().fold(0u128, |s, &x| s.saturating_add(x))
}

fn check_cap(h: &IncidenceHypergraph, i: usize, cap: u128) -> Result<u128, PathError> {
    let estimate = path_count(h, i);
    if estimate > cap {
        return Err(PathError::TooLarge { length: i, estimate, cap });
    }
    Ok(estimate)
}

/// Calls `visit` on every path of length `i`, in lexicographic order of
/// `(v₀, e₁, v₁, …)`. Returns the number visited.
pub fn for_each_path(
    h: &IncidenceHypergraph,
    i: usize,
    cap: u128,
    mut visit: impl FnMut(&Path),
) -> Result<u128, PathError> {
    if i == 0 {
        return Err(PathError::LengthTooSmall { min: 1, got: 0 });
    }
    check_cap(h, i, cap)?;
    let mut path = Path { vertices: Vec::with_capacity(i + 1), edges: Vec::with_capacity(i) };
    let mut n = 0u128;
    for v0 in 0..h.num_vertices() {
        path.vertices.push(v0);
        extend(h, i, &mut path, &mut |p| {
            n += 1;
            visit(p);
        });
        path.vertices.pop();
    }
    Ok(n)
}

fn extend(h: &IncidenceHypergraph, i: usize, path: &mut Path, visit: &mut dyn FnMut(&Path)) {
    if path.edges.len() == i {
        visit(path);
        return;
    }
    let last = path.end();
    for &e in h.incident_edges(last) {
        path.edges.push(e);
        for &v in h.incident_vertices(e) {
            path.vertices.push(v);
            extend(h, i, path, visit);
            path.vertices.pop();
        }
        path.edges.pop();
    }
}

pub fn enumerate_paths(h: &IncidenceHypergraph, i: usize, cap: u128) -> Result<Vec<Path>, PathError> {
    let mut out = Vec::new();
    for_each_path(h, i, cap, |p| out.push(p.clone()))?;
    Ok(out)
}

fn rat(n: u128) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `μ₀(v) = deg(v)/(ka)`.
pub fn mu0(h: &IncidenceHypergraph, v: usize) -> Result<BigRational, PathError> {
    require_edges(h)?;
    Ok(BigRational::new(BigInt::from(h.degree(v)), BigInt::from(h.k() * h.num_edges())))
}

/// `μᵢ` by the closed form.
pub fn mu(h: &IncidenceHypergraph, path: &Path) -> Result<BigRational, PathError> {
    path.check(h)?;
    require_edges(h)?;
    let i = path.len();
    if i == 0 {
        return mu0(h, path.start());
    }
    let mut denom = BigInt::from(h.num_edges()) * BigInt::from(h.k()).pow(i as u32 + 1);
    for &v in &path.vertices[1..i] {
        denom *= BigInt::from(h.degree(v));
    }
    Ok(BigRational::new(BigInt::one(), denom))
}

/// `μᵢ` by peeling the last step: `μᵢ(l) = μᵢ₋₁(l′)/(deg(vᵢ₋₁)·k)`, with
/// `μ₁ = 1/(ak²)`.
pub fn mu_recursive(h: &IncidenceHypergraph, path: &Path) -> Result<BigRational, PathError> {
    path.check(h)?;
    require_edges(h)?;
    let i = path.len();
    if i == 0 {
        return mu0(h, path.start());
    }
    let mut m = BigRational::new(BigInt::one(), BigInt::from(h.num_edges() * h.k() * h.k()));
    for j in 2..=i {
        m /= BigRational::from_integer(BigInt::from(h.degree(path.vertices[j - 1]) * h.k()));
    }
    Ok(m)
}

/// Paths of one length sharing an endpoint and an interior degree product
/// (hence a weight).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightClass {
    pub end: usize,
    pub interior_product: u128,
    pub count: u128,
}

/// `μᵢ` summarized by weight classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathDistribution {
    pub length: usize,
    pub a: u128,
    pub k: u128,
    pub total_paths: u128,
    /// Sorted by `(end, interior_product)`.
    pub classes: Vec<WeightClass>,
}

impl PathDistribution {
    fn denominator(&self, product: u128) -> BigInt {
        if self.length == 0 {
            return BigInt::from(self.a * self.k);
        }
        BigInt::from(product) * BigInt::from(self.a) * BigInt::from(self.k).pow(self.length as u32 + 1)
    }

    /// Weight of a single path in the class.
    pub fn weight(&self, class: &WeightClass) -> BigRational {
        if self.length == 0 {
            // The class "product" holds the degree for length 0.
            return BigRational::new(BigInt::from(class.interior_product), self.denominator(1));
        }
        BigRational::new(BigInt::one(), self.denominator(class.interior_product))
    }

    fn class_mass(&self, c: &WeightClass) -> BigRational {
        self.weight(c) * rat(c.count)
    }

    /// `Σ μᵢ` over the whole space, exactly.
    pub fn total_weight(&self) -> BigRational {
        self.classes.iter().fold(BigRational::zero(), |s, c| s + self.class_mass(c))
    }

    /// Exact `Σ μᵢ` over paths ending at each vertex.
    pub fn endpoint_marginals(&self, num_vertices: usize) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); num_vertices];
        for c in &self.classes {
            out[c.end] += self.class_mass(c);
        }
        out
    }

    /// `D(μᵢ) = Σ −μ ln μ`, accumulated per class in a fixed order with
    /// compensated summation.
    pub fn entropy(&self) -> f64 {
        let ln_base = (self.a as f64).ln() + (self.length as f64 + 1.0) * (self.k as f64).ln();
        let mut acc = Neumaier::default();
        for c in &self.classes {
            let (mass, neg_ln_mu) = if self.length == 0 {
                let ln_ka = (self.a as f64).ln() + (self.k as f64).ln();
                let m = c.interior_product as f64 / (self.a * self.k) as f64;
                (m, ln_ka - (c.interior_product as f64).ln())
            } else {
                let neg_ln = ln_base + (c.interior_product as f64).ln();
                (c.count as f64 * (-neg_ln).exp(), neg_ln)
            };
            if mass > 0.0 {
                acc.add(mass * neg_ln_mu);
            }
        }
        acc.sum()
    }
}

/// Kahan–Babuška–Neumaier running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn sum(&self) -> f64 {
        self.sum + self.comp
    }
}

/// The distribution `μᵢ` (`i = 0` gives `μ₀` over vertices of positive degree).
pub fn path_distribution(h: &IncidenceHypergraph, i: usize, cap: u128) -> Result<PathDistribution, PathError> {
    require_edges(h)?;
    let total_paths = check_cap(h, i, cap)?;
    let (a, k) = (h.num_edges() as u128, h.k() as u128);
    let classes = if i == 0 {
        (0..h.num_vertices())
            .filter(|&v| h.degree(v) > 0)
            .map(|v| WeightClass { end: v, interior_product: h.degree(v) as u128, count: 1 })
            .collect()
    } else {
        // After one step: deg(v)·k paths end at v, interior product 1.
        let mut layer: Vec<BTreeMap<u128, u128>> = (0..h.num_vertices())
            .map(|v| {
                let mut m = BTreeMap::new();
                if h.degree(v) > 0 {
                    m.insert(1u128, (h.degree(v) as u128) * k);
                }
                m
            })
            .collect();
        for _ in 1..i {
            let mut next: Vec<BTreeMap<u128, u128>> = vec![BTreeMap::new(); h.num_vertices()];
            for (v, classes) in layer.iter().enumerate() {
                let d = h.degree(v) as u128;
                for (&p, &n) in classes {
                    let p2 = p.checked_mul(d).ok_or(PathError::TooLarge { length: i, estimate: u128::MAX, cap })?;
                    for &e in h.incident_edges(v) {
                        for &w in h.incident_vertices(e) {
                            *next[w].entry(p2).or_default() += n;
                        }
                    }
                }
            }
            layer = next;
        }
        layer
            .into_iter()
            .enumerate()
            .flat_map(|(end, m)| {
                m.into_iter().map(move |(interior_product, count)| WeightClass { end, interior_product, count })
            })
            .collect()
    };
    Ok(PathDistribution { length: i, a, k, total_paths, classes })
}

/// `D(μᵢ)`.
pub fn entropy(h: &IncidenceHypergraph, i: usize, cap: u128) -> Result<f64, PathError> {
    Ok(path_distribution(h, i, cap)?.entropy())
}

/// Statistics of the straight paths `Mᵢ`: those whose endpoints are at
/// distance exactly `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StraightStats {
    pub length: usize,
    pub m_size: u128,
    /// `Pᵢ = μᵢ(Mᵢ)`.
    pub p: BigRational,
    /// Largest number of straight paths joining one ordered endpoint pair.
    pub per_pair_max: u128,
    /// Ordered vertex pairs at distance `i`.
    pub distance_pairs: u128,
    /// For `i = k−1`: ordered pairs joined by exactly `(k−1)!²` paths.
    pub nice_pairs: Option<u128>,
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Straight paths visit vertices at distances `0, 1, …, i` from `v₀`, so the
/// search only follows steps that move one further away.
pub fn for_each_straight_path(h: &IncidenceHypergraph, i: usize, mut visit: impl FnMut(&Path)) {
    fn go(h: &IncidenceHypergraph, i: usize, path: &mut Path, visit: &mut dyn FnMut(&Path)) {
        let j = path.edges.len();
        if j == i {
            visit(path);
            return;
        }
        let (v0, last) = (path.start(), path.end());
        for &e in h.incident_edges(last) {
            path.edges.push(e);
            for &w in h.incident_vertices(e) {
                if h.vertex_distance(v0, w) == j + 1 {
                    path.vertices.push(w);
                    go(h, i, path, visit);
                    path.vertices.pop();
                }
            }
            path.edges.pop();
        }
    }
    let mut path = Path { vertices: Vec::with_capacity(i + 1), edges: Vec::with_capacity(i) };
    for v0 in 0..h.num_vertices() {
        path.vertices.push(v0);
        go(h, i, &mut path, &mut visit);
        path.vertices.pop();
    }
}

pub fn straight_stats(h: &IncidenceHypergraph, i: usize) -> Result<StraightStats, PathError> {
    if i == 0 {
        return Err(PathError::LengthTooSmall { min: 1, got: 0 });
    }
    if i >= h.k() {
        return Err(PathError::LengthTooLarge { i, k: h.k() });
    }
    require_edges(h)?;
    let mut by_product: BTreeMap<u128, u128> = BTreeMap::new();
    let mut per_pair: HashMap<(usize, usize), u128> = HashMap::new();
    let mut m_size = 0u128;
    for_each_straight_path(h, i, |p| {
        m_size += 1;
        let prod: u128 = p.vertices[1..i].iter().map(|&v| h.degree(v) as u128).product();
        *by_product.entry(prod).or_default() += 1;
        *per_pair.entry((p.start(), p.end())).or_default() += 1;
    });
    let base = BigInt::from(h.num_edges()) * BigInt::from(h.k()).pow(i as u32 + 1);
    let p = by_product
        .iter()
        .fold(BigRational::zero(), |s, (&prod, &n)| s + BigRational::new(BigInt::from(n), &base * BigInt::from(prod)));
    let mut distance_pairs = 0u128;
    for u in 0..h.num_vertices() {
        for v in 0..h.num_vertices() {
            if h.vertex_distance(u, v) == i {
                distance_pairs += 1;
            }
        }
    }
    let nice_pairs = (i + 1 == h.k()).then(|| {
        let target = factorial(i) * factorial(i);
        per_pair.values().filter(|&&n| n == target).count() as u128
    });
    Ok(StraightStats {
        length: i,
        m_size,
        p,
        per_pair_max: per_pair.values().copied().max().unwrap_or(0),
        distance_pairs,
        nice_pairs,
    })
}

/// `(ak²/b)ⁱ·b`.
pub fn path_count_lower_bound(h: &IncidenceHypergraph, i: usize) -> BigRational {
    let (a, k, b) = (h.num_edges() as u128, h.k() as u128, h.num_vertices() as u128);
    let ratio = BigRational::new(BigInt::from(a * k * k), BigInt::from(b));
    num_traits::pow(ratio, i) * rat(b)
}

/// `(k−1)!/((k−i−1)!·kⁱ)`, the straight-path probability of the extremal
/// configuration.
pub fn straight_probability_main_term(k: usize, i: usize) -> BigRational {
    BigRational::new(
        BigInt::from(factorial(k - 1) / factorial(k - i - 1)),
        BigInt::from(k as u128).pow(i as u32),
    )
}

/// `(k−1)!/((k−i−1)!kⁱ) − [(k−i)/k · i(i−1)/2]·b/(ka)`.
pub fn straight_probability_lower_bound(h: &IncidenceHypergraph, i: usize) -> BigRational {
    let (a, k, b) = (h.num_edges() as u128, h.k() as u128, h.num_vertices() as u128);
    let iu = i as u128;
    let correction = BigRational::new(BigInt::from((k - iu) * iu * (iu.saturating_sub(1)) * b), BigInt::from(2 * k * k * a));
    straight_probability_main_term(h.k(), i) - correction
}

/// `a·k^(j+1)·b^(j−1)`, the crude ceiling on `|Lⱼ|` for `j ≥ 2`.
pub fn path_count_crude_upper(h: &IncidenceHypergraph, j: usize) -> BigInt {
    let (a, k, b) = (h.num_edges(), h.k(), h.num_vertices());
    BigInt::from(a) * BigInt::from(k).pow(j as u32 + 1) * BigInt::from(b).pow(j.saturating_sub(1) as u32)
}

/// Everything checkable at one path length, with exact comparisons where the
/// quantities are exact.
#[derive(Clone, Debug, PartialEq)]
pub struct LengthReport {
    pub length: usize,
    pub l_size: u128,
    pub l_lower: BigRational,
    pub l_lower_holds: bool,
    /// `|Lᵢ| ≤ a·k^(i+1)·b^(i−1)` (checked for `i ≥ 2`).
    pub crude_upper_holds: Option<bool>,
    pub entropy: f64,
    /// `D(μᵢ₋₁) − D(μ₀) + ln(ak²)` (for `i ≥ 1`).
    pub entropy_predicted: Option<f64>,
    pub entropy_recursion_rel_err: Option<f64>,
    pub entropy_below_log_size: bool,
    pub marginals_exact: bool,
    pub total_weight_one: bool,
    /// Present when `1 ≤ i ≤ k−1`.
    pub straight: Option<StraightReport>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StraightReport {
    pub stats: StraightStats,
    pub p_lower: BigRational,
    pub p_lower_holds: bool,
    /// Advisory: `Pᵢ ≤ (k−1)!/((k−i−1)!kⁱ)`, not guaranteed in general.
    pub p_upper: BigRational,
    pub p_upper_holds: bool,
    pub per_pair_cap: u128,
    pub per_pair_cap_holds: bool,
    /// `(k−1)!/(k−i−1)!·(ak/b)ⁱ·b`, shown next to `|Mᵢ|` for comparison.
    pub m_reference: f64,
}

/// Reports for lengths `0..=max_len`.
pub fn path_reports(h: &IncidenceHypergraph, max_len: usize, cap: u128) -> Result<Vec<LengthReport>, PathError> {
    require_edges(h)?;
    let (a, k, b) = (h.num_edges(), h.k(), h.num_vertices());
    let mu0_dist = path_distribution(h, 0, cap)?;
    let d0 = mu0_dist.entropy();
    let ln_ak2 = ((a * k * k) as f64).ln();
    let expected_marginals: Vec<BigRational> = (0..b).map(|v| mu0(h, v)).collect::<Result<_, _>>()?;
    let mut out = Vec::with_capacity(max_len + 1);
    let mut prev: Option<f64> = None;
    for i in 0..=max_len {
        let dist = if i == 0 { mu0_dist.clone() } else { path_distribution(h, i, cap)? };
        let l_size = if i == 0 { b as u128 } else { dist.total_paths };
        let d = dist.entropy();
        let predicted = prev.map(|p| p - d0 + ln_ak2);
        let rel = predicted.map(|p| if d == 0.0 { (d - p).abs() } else { (d - p).abs() / d.abs() });
        let l_lower = path_count_lower_bound(h, i);
        let straight = if i >= 1 && i < k {
            let stats = straight_stats(h, i)?;
            let p_lower = straight_probability_lower_bound(h, i);
            let p_upper = straight_probability_main_term(k, i);
            let cap_i = factorial(i) * factorial(i);
            let m_reference = (factorial(k - 1) / factorial(k - i - 1)) as f64
                * ((a * k) as f64 / b as f64).powi(i as i32)
                * b as f64;
            Some(StraightReport {
                p_lower_holds: stats.p >= p_lower,
                p_upper_holds: stats.p <= p_upper,
                per_pair_cap_holds: stats.per_pair_max <= cap_i,
                stats,
                p_lower,
                p_upper,
                per_pair_cap: cap_i,
                m_reference,
            })
        } else {
            None
        };
        let marginals_exact = i == 0 || dist.endpoint_marginals(b) == expected_marginals;
        out.push(LengthReport {
            length: i,
            l_size,
            l_lower_holds: rat(l_size) >= l_lower,
            l_lower,
            crude_upper_holds: (i >= 2).then(|| BigInt::from(l_size) <= path_count_crude_upper(h, i)),
            entropy: d,
            entropy_predicted: if i >= 1 { predicted } else { None },
            entropy_recursion_rel_err: if i >= 1 { rel } else { None },
            entropy_below_log_size: d <= (l_size as f64).ln() * (1.0 + 1e-12) + 1e-12,
            marginals_exact,
            total_weight_one: dist.total_weight().is_one(),
            straight,
        });
        prev = Some(d);
    }
    Ok(out)
}

/// Lossy conversion for display.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}
