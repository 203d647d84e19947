//! Branch and bound over families of `(r−1)`-sets with isomorph rejection by
//! canonical augmentation.
//!
//! A node is a family `F`; its children are `F + S`. A child `C` is kept only
//! when deleting its *canonical last set* (the preimage of the largest set in
//! the canonical image of `C`) gives a family isomorphic to `F`, and only one
//! child per isomorphism class is kept among siblings. Every class of
//! `b`-families over `[n]` is then visited exactly once.
//!
//! The first few levels are expanded up front into a frontier; each frontier
//! subtree is an independent unit of work for the thread pool and for the
//! checkpoint log.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::Instant;

use rayon::prelude::*;
use shadowlab_core::bounds::k3_upper;
use shadowlab_core::canon::{canonical_form, canonical_labeling, relabel_mask};
use shadowlab_core::combinatorics::{binom_u128, kk_max_a};
use shadowlab_core::Natural;

use crate::certificate::SearchCertificate;
use crate::checkpoint::{self, CheckpointRecord, CheckpointWriter};
use crate::error::SearchError;
use crate::problem::{family_of, mask_of, CoverState, SearchProblem, Universe};
use crate::{SearchStrategy, SolveOptions};

fn to_u64_saturating(n: &Natural) -> u64 {
    match n.to_u64_digits()[..] {
        [] => 0,
        [x] => x,
        _ => u64::MAX,
    }
}

/// Exact upper bound on `f(r, k, b)` valid for every ground set.
pub fn global_cap(p: &SearchProblem) -> u64 {
    let b = Natural::from(p.b);
    let mut cap = u64::MAX;
    match p.k {
        2 => cap = cap.min(binom_u128(p.b as u128, 2).map_or(u64::MAX, |v| v.min(u64::MAX as u128) as u64)),
        3 => cap = cap.min(to_u64_saturating(&k3_upper(&b))),
        _ => {}
    }
    if p.k == p.r {
        // Every counted r-set has its whole shadow inside B.
        if let Ok(m) = kk_max_a(&b, p.r as u64) {
            cap = cap.min(to_u64_saturating(&m));
        }
    }
    cap
}

pub struct ExhaustiveStrategy;

impl SearchStrategy for ExhaustiveStrategy {
    fn name(&self) -> &'static str {
        "exhaustive"
    }

    fn description(&self) -> &'static str {
        "branch and bound over all families up to isomorphism; certifies optimality within [n]"
    }

    fn solve(&self, problem: &SearchProblem, opts: &SolveOptions) -> Result<SearchCertificate, SearchError> {
        run(problem, opts)
    }
}

#[derive(Clone)]
struct Node {
    masks: Vec<u64>,
    idxs: Vec<u32>,
    key: Vec<u64>,
    state: CoverState,
}

/// Best leaves found within one subtree.
#[derive(Clone, Debug, Default)]
struct SubResult {
    best_a: Option<u64>,
    /// Canonical form of the colex-least optimal family, as sorted masks.
    best: Option<Vec<u64>>,
    optima: BTreeSet<Vec<u64>>,
    seen: HashSet<Vec<u64>>,
    nodes: u64,
}

impl SubResult {
    fn offer(&mut self, a: u64, key: &[u64], masks: &[u64], ctx: &Ctx<'_>) {
        if self.best_a.is_some_and(|b| a < b) {
            return;
        }
        if self.best_a != Some(a) {
            self.best_a = Some(a);
            self.best = None;
            self.seen.clear();
            self.optima.clear();
        }
        if !self.seen.insert(key.to_vec()) {
            return;
        }
        let form = ctx.display_form(masks);
        if self.best.as_ref().is_none_or(|b| form < *b) {
            self.best = Some(form.clone());
        }
        if ctx.collect {
            self.optima.insert(form);
        }
    }

    fn merge(&mut self, other: SubResult) {
        self.nodes += other.nodes;
        let Some(a) = other.best_a else { return };
        match self.best_a {
            Some(mine) if mine > a => {}
            Some(mine) if mine == a => {
                if let Some(ob) = other.best {
                    if self.best.as_ref().is_none_or(|b| ob < *b) {
                        self.best = Some(ob);
                    }
                }
                self.optima.extend(other.optima);
            }
            _ => {
                self.best_a = Some(a);
                self.best = other.best;
                self.optima = other.optima;
            }
        }
    }
}

struct Ctx<'a> {
    uni: &'a Universe,
    incumbent: AtomicU64,
    nodes: AtomicU64,
    stop: AtomicBool,
    budget: u64,
    cap: u64,
    collect: bool,
}

impl Ctx<'_> {
    fn n(&self) -> usize {
        self.uni.problem.n
    }

    fn b(&self) -> usize {
        self.uni.problem.b
    }

    fn display_form(&self, masks: &[u64]) -> Vec<u64> {
        let r1 = self.uni.problem.r - 1;
        let canon = canonical_form(&family_of(r1, masks));
        let mut out: Vec<u64> = canon.iter().map(mask_of).collect();
        out.sort_unstable();
        out
    }

    /// Counts a node; false once the budget is spent.
    fn tick(&self, res: &mut SubResult) -> bool {
        if self.stop.load(Ordering::Relaxed) {
            return false;
        }
        let budget = self.budget;
        let counted = self.nodes.fetch_update(Ordering::Relaxed, Ordering::Relaxed, |n| (n < budget).then_some(n + 1));
        if counted.is_err() {
            self.stop.store(true, Ordering::Relaxed);
            return false;
        }
        res.nodes += 1;
        true
    }

    fn bound(&self, state: &CoverState, rem: usize) -> u64 {
        state.completion_bound(self.uni, rem).min(self.cap)
    }

    /// Children of `node` that pass the bound and the canonical-parent test,
    /// one per isomorphism class. Each child is passed to `visit`; returning
    /// false stops the scan.
    fn for_each_child(&self, node: &mut Node, mut visit: impl FnMut(&Ctx<'_>, &mut Node) -> bool) {
        let rem_after = self.b() - node.masks.len() - 1;
        let mut seen: HashSet<Vec<u64>> = HashSet::new();
        for u in 0..self.uni.small.len() as u32 {
            if node.state.in_f[u as usize] {
                continue;
            }
            node.state.add(self.uni, u);
            if self.bound(&node.state, rem_after) < self.incumbent.load(Ordering::Relaxed) {
                node.state.remove(self.uni, u);
                continue;
            }
            let m = self.uni.small[u as usize];
            let pos = node.masks.binary_search(&m).unwrap_err();
            let mut masks = node.masks.clone();
            masks.insert(pos, m);
            let lab = canonical_labeling(&masks, self.n());
            let top = *lab.key.last().expect("child is nonempty");
            let last = masks.iter().copied().find(|&x| relabel_mask(x, &lab.label) == top).expect("preimage exists");
            let accept = last == m || {
                let rest: Vec<u64> = masks.iter().copied().filter(|&x| x != last).collect();
                canonical_labeling(&rest, self.n()).key == node.key
            };
            if accept && seen.insert(lab.key.clone()) {
                let mut idxs = node.idxs.clone();
                idxs.push(u);
                let mut child = Node { masks, idxs, key: lab.key, state: node.state.clone() };
                node.state.remove(self.uni, u);
                if !visit(self, &mut child) {
                    return;
                }
            } else {
                node.state.remove(self.uni, u);
            }
        }
    }

    fn dfs(&self, node: &mut Node, res: &mut SubResult) -> bool {
        if !self.tick(res) {
            return false;
        }
        let j = node.masks.len();
        if j == self.b() {
            let a = node.state.a;
            if a >= self.incumbent.load(Ordering::Relaxed) {
                self.incumbent.fetch_max(a, Ordering::Relaxed);
                res.offer(a, &node.key, &node.masks, self);
            }
            return true;
        }
        if self.bound(&node.state, self.b() - j) < self.incumbent.load(Ordering::Relaxed) {
            return true;
        }
        let mut ok = true;
        self.for_each_child(node, |ctx, child| {
            ok = ctx.dfs(child, res);
            ok
        });
        ok
    }

    /// Expands the tree breadth-first to `depth`, returning the frontier.
    fn frontier(&self, root: Node, depth: usize, res: &mut SubResult) -> Vec<Node> {
        let mut level = vec![root];
        for _ in 0..depth {
            let mut next = Vec::new();
            for mut node in level {
                if !self.tick(res) {
                    return next;
                }
                self.for_each_child(&mut node, |_, child| {
                    next.push(child.clone());
                    true
                });
            }
            level = next;
        }
        level
    }
}

fn ranks(uni: &Universe, masks: &[u64]) -> Vec<u32> {
    masks.iter().map(|m| uni.small_rank[m]).collect()
}

fn unranks(uni: &Universe, ranks: &[u32]) -> Option<Vec<u64>> {
    ranks.iter().map(|&r| uni.small.get(r as usize).copied()).collect()
}

fn record_for(uni: &Universe, prefix: Vec<u32>, res: &SubResult) -> CheckpointRecord {
    let p = uni.problem;
    CheckpointRecord {
        prefix,
        status: "done".into(),
        r: p.r,
        k: p.k,
        b: p.b,
        n: p.n,
        best_a: res.best_a,
        best: res.best.as_ref().map(|m| ranks(uni, m)),
        optima: res.optima.iter().map(|m| ranks(uni, m)).collect(),
        nodes: res.nodes,
    }
}

fn result_from_record(uni: &Universe, rec: &CheckpointRecord) -> SubResult {
    let optima = rec.optima.iter().filter_map(|o| unranks(uni, o)).collect();
    SubResult {
        best_a: rec.best_a,
        best: rec.best.as_ref().and_then(|r| unranks(uni, r)),
        optima,
        seen: HashSet::new(),
        nodes: rec.nodes,
    }
}

pub fn run(problem: &SearchProblem, opts: &SolveOptions) -> Result<SearchCertificate, SearchError> {
    let started = Instant::now();
    let uni = Universe::new(*problem)?;
    let seed_a = problem.be_family().map(|f| {
        let idxs: Vec<u32> = f.iter().map(|s| uni.small_rank[&mask_of(s)]).collect();
        uni.count_a(&idxs)
    });
    let ctx = Ctx {
        uni: &uni,
        incumbent: AtomicU64::new(seed_a.unwrap_or(0)),
        nodes: AtomicU64::new(0),
        stop: AtomicBool::new(false),
        budget: opts.budget,
        cap: global_cap(problem),
        collect: opts.collect_optima,
    };

    let done: HashMap<Vec<u32>, CheckpointRecord> = match (&opts.checkpoint, opts.resume) {
        (Some(path), true) => checkpoint::load(path, problem)?,
        _ => HashMap::new(),
    };
    let writer = match &opts.checkpoint {
        Some(path) => Some(CheckpointWriter::open(path, !opts.resume)?),
        None => None,
    };
    for rec in done.values() {
        if let Some(a) = rec.best_a {
            ctx.incumbent.fetch_max(a, Ordering::Relaxed);
        }
    }

    let root = Node { masks: vec![], idxs: vec![], key: vec![], state: CoverState::new(&uni) };
    let mut total = SubResult::default();
    let depth = opts.frontier_depth.min(problem.b);
    let frontier = ctx.frontier(root, depth, &mut total);

    let process = |node: &Node| -> Result<SubResult, SearchError> {
        let prefix = ranks(&uni, &node.masks);
        if let Some(rec) = done.get(&prefix) {
            return Ok(result_from_record(&uni, rec));
        }
        let mut res = SubResult::default();
        let mut node = node.clone();
        if ctx.dfs(&mut node, &mut res) {
            if let Some(w) = &writer {
                w.append(&record_for(&uni, prefix, &res))?;
            }
        }
        Ok(res)
    };

    let results: Vec<Result<SubResult, SearchError>> = if opts.threads == 1 {
        frontier.iter().map(process).collect()
    } else {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if opts.threads > 1 {
            builder = builder.num_threads(opts.threads);
        }
        let pool = builder.build().map_err(|e| SearchError::ThreadPool(e.to_string()))?;
        pool.install(|| frontier.par_iter().map(process).collect())
    };
    for r in results {
        total.merge(r?);
    }

    let exhausted = !ctx.stop.load(Ordering::Relaxed);
    let (achieved_a, best) = match (total.best_a, total.best.clone()) {
        (Some(a), Some(best)) => (a, best),
        _ => fallback(&uni, &ctx, problem),
    };
    let r1 = problem.r - 1;
    let to_vecs = |masks: &[u64]| -> Vec<Vec<u32>> {
        family_of(r1, masks).iter().map(|s| s.elements().to_vec()).collect()
    };
    Ok(SearchCertificate {
        r: problem.r,
        k: problem.k,
        b: problem.b,
        n: problem.n,
        mode: "exhaustive".into(),
        best_b: to_vecs(&best),
        achieved_a,
        exhausted,
        nodes_visited: total.nodes,
        wall_time: opts.timing.then(|| started.elapsed().as_secs_f64()),
        checkpoint: opts.checkpoint.as_ref().map(|p| p.display().to_string()),
        optima: if opts.collect_optima { total.optima.iter().map(|m| to_vecs(m)).collect() } else { vec![] },
    })
}

/// Witness for a run stopped before any complete family was scored: the
/// seeded construction if it fits, else the first `b` sets in colex order.
fn fallback(uni: &Universe, ctx: &Ctx<'_>, problem: &SearchProblem) -> (u64, Vec<u64>) {
    let masks: Vec<u64> = match problem.be_family() {
        Some(f) => f.iter().map(mask_of).collect(),
        None => uni.small[..problem.b].to_vec(),
    };
    let idxs: Vec<u32> = masks.iter().map(|m| uni.small_rank[m]).collect();
    (uni.count_a(&idxs), ctx.display_form(&masks))
}
