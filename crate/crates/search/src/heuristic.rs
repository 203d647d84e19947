//! Local search: start from the shifted-colex construction (or a seeded
//! random family when it does not fit in `[n]`) and apply improving
//! single-set swaps until none is left or the budget runs out.

use std::time::Instant;

use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use shadowlab_core::canon::canonical_form;

use crate::certificate::SearchCertificate;
use crate::error::SearchError;
use crate::problem::{family_of, mask_of, CoverState, SearchProblem, Universe};
use crate::{SearchStrategy, SolveOptions};

pub struct HeuristicStrategy;

impl SearchStrategy for HeuristicStrategy {
    fn name(&self) -> &'static str {
        "heuristic"
    }

    fn description(&self) -> &'static str {
        "hill climbing by single-set swaps from the shifted-colex construction; no optimality claim"
    }

    fn solve(&self, problem: &SearchProblem, opts: &SolveOptions) -> Result<SearchCertificate, SearchError> {
        run(problem, opts)
    }
}

pub fn run(problem: &SearchProblem, opts: &SolveOptions) -> Result<SearchCertificate, SearchError> {
    let started = Instant::now();
    let uni = Universe::new(*problem)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let start: Vec<u32> = match problem.be_family() {
        Some(f) => f.iter().map(|s| uni.small_rank[&mask_of(s)]).collect(),
        None => {
            let mut v: Vec<u32> =
                index::sample(&mut rng, uni.small.len(), problem.b).into_iter().map(|i| i as u32).collect();
            v.sort_unstable();
            v
        }
    };
    let mut state = CoverState::new(&uni);
    for &u in &start {
        state.add(&uni, u);
    }

    let mut evals = 0u64;
    'climb: loop {
        let mut inside: Vec<u32> = (0..uni.small.len() as u32).filter(|&u| state.in_f[u as usize]).collect();
        let mut outside: Vec<u32> = (0..uni.small.len() as u32).filter(|&u| !state.in_f[u as usize]).collect();
        inside.shuffle(&mut rng);
        outside.shuffle(&mut rng);
        let current = state.a;
        for &out in &inside {
            state.remove(&uni, out);
            for &inn in &outside {
                if evals >= opts.budget {
                    state.add(&uni, out);
                    break 'climb;
                }
                evals += 1;
                state.add(&uni, inn);
                if state.a > current {
                    continue 'climb;
                }
                state.remove(&uni, inn);
            }
            state.add(&uni, out);
        }
        break;
    }

    let masks: Vec<u64> = (0..uni.small.len()).filter(|&u| state.in_f[u]).map(|u| uni.small[u]).collect();
    let canon = canonical_form(&family_of(problem.r - 1, &masks));
    Ok(SearchCertificate {
        r: problem.r,
        k: problem.k,
        b: problem.b,
        n: problem.n,
        mode: "heuristic".into(),
        best_b: canon.iter().map(|s| s.elements().to_vec()).collect(),
        achieved_a: state.a,
        exhausted: false,
        nodes_visited: evals,
        wall_time: opts.timing.then(|| started.elapsed().as_secs_f64()),
        checkpoint: None,
        optima: vec![],
    })
}
