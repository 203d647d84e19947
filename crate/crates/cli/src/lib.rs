//! Command-line frontend. [`run`] parses arguments, dispatches to the
//! library crates and writes JSON or CSV to `out`.
//!
//! Exit codes: `0` success, `1` a mathematical check failed, `2` usage or
//! input error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, Map, Value};

use shadowlab_core::analytics_k3::{classify_edges, identity_check, octahedron_census, rational_string};
use shadowlab_core::bounds::{conjecture_table, format_real, k3_upper, weak_k3_holds, BoundRow};
use shadowlab_core::combinatorics::{
    cascade_decompose, cascade_shift, colex_rank, colex_segment, colex_unrank, kk_max_a, kk_min_b, CascadeRep,
};
use shadowlab_core::entropy::{path_reports, LengthReport, DEFAULT_PATH_CAP};
use shadowlab_core::family::{canonical_configuration, construct_be, shadow};
use shadowlab_core::incidence::build_incidence;
use shadowlab_core::{Configuration, KSet, SetFamily};
use shadowlab_search::{sweep_n, verify_certificate, SearchProblem, SolveOptions, StrategyRegistry, DEFAULT_BUDGET};

#[derive(Parser, Debug)]
#[command(
    name = "shadowlab",
    version,
    about = "Exact tools for the generalized Kruskal-Katona shadow problem f(r,k,b)",
    long_about = "Exact tools for the generalized Kruskal-Katona shadow problem.\n\n\
        f(r,k,b) is the largest number of r-sets that can each contain at least k members of a \
        family of b sets of size r-1. The subcommands compute cascade decompositions, colex \
        ranks, shadows and constructions, check the k=3 pair-count identity and the path-entropy \
        bounds on concrete configurations, tabulate bounds, and search for f over a bounded ground set.\n\n\
        Exit status: 0 on success, 1 when a mathematical check fails, 2 on usage or input errors."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Greedy binomial (cascade) decomposition of an integer.
    #[command(long_about = "Writes m = binom(c_s,s) + binom(c_{s-1},s-1) + ... with c_s > c_{s-1} > ... \
        chosen greedily, which makes the decomposition unique. Also reports the Kruskal-Katona \
        values: the most s-sets a family of m (s-1)-sets can be the shadow of is obtained by \
        shifting every index up by one, and the fewest (s-1)-sets in the shadow of m s-sets \
        by shifting down.")]
    Decompose {
        /// The integer m to decompose.
        #[arg(long)]
        value: BigUint,
        /// Index s of the leading term.
        #[arg(long)]
        top_index: u64,
    },
    /// Colexicographic rank and unrank of finite sets.
    #[command(long_about = "Colex order compares two equal-size sets by their largest differing \
        element. Give --set to rank a set, --rank with --r to unrank, or --first with --r to \
        list an initial segment as a family.")]
    Colex(ColexArgs),
    /// Lower shadow of a family: all subsets with one element removed.
    Shadow(ShadowArgs),
    /// Writes a configuration (A, B, k) as JSON.
    #[command(long_about = "canonical: B = all (k-1)-subsets of [c] and A = all k-subsets, padded \
        to member size r by a common core.\n\
        be: the shifted-colex construction for b. B takes the first b colex (k-1)-sets and A the \
        first a colex k-sets, where a comes from shifting the cascade of b; both are padded by a \
        core placed above all their elements.")]
    Construct(ConstructArgs),
    /// Checks that every member of A contains at least k members of B.
    Validate {
        /// Configuration file {"k": .., "A": family, "B": family}.
        #[arg(long)]
        input: PathBuf,
    },
    /// k=3 pair-count identity, error terms, octahedra and colour classes.
    #[command(long_about = "For a k=3 configuration with a edges and b vertices, every ordered pair \
        of distinct vertices is sorted by its distance and by how it is joined by two-edge paths. \
        Counting them two ways gives b(b-1) = 9a^2/(2b) - 3a/2 + 6a + sum of per-vertex error terms, \
        evaluated here in exact rationals. Also reports per-vertex gamma, octahedra and the \
        colour classes of incident edges. Exits 1 if the identity or a consistency check fails.")]
    Analyze {
        #[arg(long)]
        input: PathBuf,
        /// Classify edges by a core set (comma-separated elements; no value means the empty set).
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        core: Option<Vec<u32>>,
    },
    /// Path spaces, their measures and entropies, and the exact counting bounds.
    #[command(long_about = "L_i is the set of alternating vertex-edge walks with i edges. The measure \
        mu_i picks a uniform edge and incident vertex pair, then extends by uniform steps; its \
        entropy D satisfies D(mu_i) = D(mu_{i-1}) - D(mu_0) + ln(ak^2). Straight paths M_i are \
        those whose endpoints lie at distance i. Reports |L_i|, |M_i|, P_i = mu_i(M_i), D(mu_i) and \
        the bounds |L_i| >= (ak^2/b)^i b, the P_i lower bound and the i!^2 per-pair cap. \
        Exits 1 if an exact bound fails or the recursion misses the tolerance.")]
    Entropy(EntropyArgs),
    /// Table of lower and upper bounds for f(k, b) over a range of b.
    #[command(long_about = "Columns: b; k; cascade of b with top index k-1; be_lower, the value of the \
        shifted-colex construction; k_specific_upper, the exact upper bound binom(b,2) for k=2 or the \
        pair-count bound for k=3; general_leading, the advisory leading term \
        b^(k/(k-1)) (k-1)!^(1/(k-1)) / k; theorem2_value, the shifted cascade when all k-1 terms are \
        present (exact only above an unknown threshold); gap = k_specific_upper - be_lower.")]
    Bounds(BoundsArgs),
    /// Computes f_n(r,k,b) over the ground set [n] and prints a certificate.
    Solve(SolveArgs),
    /// Runs solve for each n in a range and reports where the value settles.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
struct ColexArgs {
    /// Member size.
    #[arg(long)]
    r: Option<u64>,
    /// Set to rank, comma-separated.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["rank", "first"])]
    set: Option<Vec<u32>>,
    /// Zero-based colex index to unrank.
    #[arg(long, requires = "r", conflicts_with = "first")]
    rank: Option<BigUint>,
    /// List the first COUNT r-sets.
    #[arg(long, requires = "r")]
    first: Option<usize>,
}

#[derive(Args, Debug)]
struct ShadowArgs {
    /// Family file {"r": .., "sets": [[..], ..]}.
    #[arg(long, conflicts_with_all = ["r", "count"])]
    input: Option<PathBuf>,
    /// Use the first COUNT colex r-sets instead of a file.
    #[arg(long, requires = "count")]
    r: Option<usize>,
    #[arg(long, requires = "r")]
    count: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ConstructKind {
    Canonical,
    Be,
}

#[derive(Args, Debug)]
struct ConstructArgs {
    #[arg(long, value_enum)]
    kind: ConstructKind,
    #[arg(long)]
    r: usize,
    #[arg(long)]
    k: usize,
    /// Ground size for --kind canonical.
    #[arg(long, required_if_eq("kind", "canonical"))]
    c: Option<usize>,
    /// Size of B for --kind be.
    #[arg(long, required_if_eq("kind", "be"))]
    b: Option<usize>,
    /// Write here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EntropyArgs {
    #[arg(long)]
    input: PathBuf,
    /// Longest path length i to report.
    #[arg(long)]
    max_len: usize,
    /// Largest path space to enumerate; raise explicitly for big inputs.
    #[arg(long, default_value_t = DEFAULT_PATH_CAP)]
    cap: u128,
    /// Allowed relative error of the entropy recursion.
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    b_min: u64,
    #[arg(long)]
    b_max: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug, Clone)]
struct SearchFlags {
    /// exhaustive or heuristic.
    #[arg(long, default_value = "exhaustive")]
    mode: String,
    /// Node budget (exhaustive) or swap evaluations (heuristic).
    #[arg(long, env = "SHADOWLAB_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Worker threads, 0 for all cores. Node counts are reproducible only with 1.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Seed for the heuristic's random choices.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Include wall time in the output (makes it non-reproducible).
    #[arg(long)]
    timing: bool,
}

#[derive(Args, Debug)]
#[command(long_about = "Exhaustive mode enumerates b-families of (r-1)-subsets of [n] up to \
    isomorphism by canonical augmentation, pruning with completion bounds and the exact caps for \
    k=2 and k=3. Its certificate is marked exhausted when the space was covered within the budget; \
    otherwise it is the best family seen. Heuristic mode hill-climbs by single-set swaps from the \
    shifted-colex construction. The certificate is re-verified before printing; exits 1 if that fails.")]
struct SolveArgs {
    #[arg(long)]
    r: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    b: usize,
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    search: SearchFlags,
    /// Record finished subtrees here (one JSON object per line).
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Skip subtrees already recorded in the checkpoint.
    #[arg(long, requires = "checkpoint")]
    resume: bool,
    /// List every optimal family up to isomorphism.
    #[arg(long)]
    optima: bool,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    r: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    b: usize,
    #[arg(long)]
    n_min: usize,
    #[arg(long)]
    n_max: usize,
    #[command(flatten)]
    search: SearchFlags,
}

/// Why a command did not succeed.
enum Failure {
    /// Bad arguments or input: exit 2.
    Usage(String),
    /// Output was produced but a check failed: exit 1.
    Check { output: String, reason: String },
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

type Outcome = Result<String, Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match cli.command {
        Command::Decompose { value, top_index } => decompose(&value, top_index),
        Command::Colex(a) => colex(a),
        Command::Shadow(a) => shadow_cmd(a),
        Command::Construct(a) => construct(a),
        Command::Validate { input } => validate_cmd(&input),
        Command::Analyze { input, core } => analyze(&input, core),
        Command::Entropy(a) => entropy_cmd(a),
        Command::Bounds(a) => bounds_cmd(a),
        Command::Solve(a) => solve(a),
        Command::Sweep(a) => sweep(a),
    };
    match result {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            0
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Check { output, reason }) => {
            let _ = out.write_all(output.as_bytes());
            let _ = writeln!(err, "check failed: {reason}");
            1
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

/// An exact integer as a JSON number of any size.
fn num(n: impl std::fmt::Display) -> Value {
    serde_json::from_str(&n.to_string()).expect("decimal integers are valid JSON numbers")
}

fn read_input(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_config(path: &Path) -> Result<Configuration, Failure> {
    Configuration::from_json(&read_input(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn set_json(s: &KSet) -> Value {
    json!(s.elements())
}

fn terms_json(rep: &CascadeRep) -> Value {
    Value::Array(rep.terms().iter().map(|t| json!([num(&t.c), t.index])).collect())
}

fn decompose(value: &BigUint, s: u64) -> Outcome {
    if s == 0 {
        return Err(usage("--top-index must be at least 1"));
    }
    let rep = cascade_decompose(value, s).map_err(usage)?;
    let mut obj = Map::new();
    obj.insert("value".into(), num(value));
    obj.insert("top_index".into(), json!(s));
    obj.insert("terms".into(), terms_json(&rep));
    obj.insert("kk_max_a".into(), num(kk_max_a(value, s + 1).map_err(usage)?));
    if s >= 2 || value.bits() == 0 {
        obj.insert("kk_min_b".into(), num(kk_min_b(value, s).map_err(usage)?));
    }
    obj.insert("shift_up".into(), num(cascade_shift(&rep, 1).map_err(usage)?));
    Ok(pretty(&Value::Object(obj)))
}

fn colex(a: ColexArgs) -> Outcome {
    if let Some(elements) = a.set {
        let set = KSet::new(elements).map_err(usage)?;
        if let Some(r) = a.r {
            if r as usize != set.len() {
                return Err(usage(format!("--r {r} does not match a set of size {}", set.len())));
            }
        }
        return Ok(pretty(&json!({"r": set.len(), "set": set_json(&set), "rank": num(colex_rank(&set))})));
    }
    let r = a.r.ok_or_else(|| usage("give --set, or --r with --rank or --first"))?;
    if let Some(idx) = a.rank {
        let set = colex_unrank(&idx, r).map_err(usage)?;
        return Ok(pretty(&json!({"r": r, "set": set_json(&set), "rank": num(&idx)})));
    }
    if let Some(count) = a.first {
        let fam = SetFamily::new(r as usize, colex_segment(r as usize, count)).map_err(usage)?;
        return Ok(fam.to_json() + "\n");
    }
    Err(usage("give --rank or --first together with --r"))
}

fn shadow_cmd(a: ShadowArgs) -> Outcome {
    let fam = match (a.input, a.r, a.count) {
        (Some(path), _, _) => {
            SetFamily::from_json(&read_input(&path)?).map_err(|e| usage(format!("{}: {e}", path.display())))?
        }
        (None, Some(r), Some(count)) => SetFamily::new(r, colex_segment(r, count)).map_err(usage)?,
        _ => return Err(usage("give --input, or --r with --count")),
    };
    let sh = shadow(&fam).map_err(usage)?;
    Ok(sh.to_json() + "\n")
}

fn construct(a: ConstructArgs) -> Outcome {
    let config = match a.kind {
        ConstructKind::Canonical => canonical_configuration(a.r, a.k, a.c.expect("required by clap")),
        ConstructKind::Be => construct_be(a.r, a.k, a.b.expect("required by clap")).map(|be| be.config),
    }
    .map_err(usage)?;
    let text = config.to_json() + "\n";
    match a.output {
        Some(path) => {
            fs::write(&path, text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn validate_cmd(input: &Path) -> Outcome {
    let config = load_config(input)?;
    let rep = config.validate();
    let output = pretty(&json!({
        "k": config.k,
        "a": config.a.len(),
        "b": config.b.len(),
        "passed": rep.passed,
        "min_count": rep.min_count,
        "counts": rep.counts,
        "violating": rep.violating.iter().map(set_json).collect::<Vec<_>>(),
    }));
    if rep.passed {
        Ok(output)
    } else {
        Err(Failure::Check { output, reason: format!("{} members of A contain fewer than k={} members of B", rep.violating.len(), config.k) })
    }
}

fn analyze(input: &Path, core: Option<Vec<u32>>) -> Outcome {
    let config = load_config(input)?;
    let h = build_incidence(&config).map_err(usage)?;
    let report = identity_check(&h).map_err(usage)?;
    let p = &report.profile;
    let mut failures = Vec::new();
    if !report.equal {
        failures.push(format!("identity: lhs {} != rhs {}", rational_string(&report.lhs), rational_string(&report.rhs)));
    }
    let (j_edges, j_dist) = (p.j_from_edge_pairs(), p.j_from_distance_pairs());
    if j_edges != j_dist {
        failures.push("the two counts of distance-2 path endpoints disagree".into());
    }
    let mut vertices = Vec::with_capacity(h.num_vertices());
    for (v, eps) in p.vertices.iter().enumerate() {
        let census = octahedron_census(&h, v).map_err(usage)?;
        let cr = &census.colour_report;
        if census.octahedra > cr.same_colour_pairs() {
            failures.push(format!("vertex {v}: more octahedra than same-colour edge pairs"));
        }
        vertices.push(json!({
            "set": set_json(h.vertex(v)),
            "degree": h.degree(v),
            "gamma": rational_string(&eps.gamma()),
            "epsilon": epsilon_json(eps),
            "octahedra": census.octahedra,
            "colour_classes": cr.classes.len(),
            "s": cr.s,
            "same_colour_pairs": cr.same_colour_pairs(),
        }));
    }
    let (a, b) = (BigUint::from(p.a), BigUint::from(p.b));
    let mut obj = Map::new();
    obj.insert("a".into(), json!(p.a));
    obj.insert("b".into(), json!(p.b));
    obj.insert(
        "identity".into(),
        json!({"lhs": rational_string(&report.lhs), "rhs": rational_string(&report.rhs), "equal": report.equal}),
    );
    obj.insert("epsilon_sums".into(), epsilon_json(&p.sums));
    obj.insert("gamma_max".into(), json!(rational_string(&p.gamma_max())));
    let c = &p.counts;
    obj.insert(
        "pair_counts".into(),
        json!({
            "p2": c.p2,
            "p2_by_cross_pairs": {"2": c.p2_by_cross[0], "3": c.p2_by_cross[1], "4": c.p2_by_cross[2]},
            "j": c.j,
            "j_from_edge_pairs": rational_string(&j_edges),
            "j_from_distance_pairs": rational_string(&j_dist),
            "ordered_distance1": c.ordered_distance1,
            "ordered_distance2": c.ordered_distance2,
            "ordered_far": c.ordered_far,
            "distance2_by_paths": c.paths_histogram,
        }),
    );
    obj.insert("k3_upper".into(), num(k3_upper(&b)));
    obj.insert("weak_bound_holds".into(), json!(weak_k3_holds(&a, &b)));
    if let Some(elements) = core {
        let core = KSet::new(elements).map_err(usage)?;
        let classes = classify_edges(&h, &core).map_err(usage)?;
        obj.insert(
            "edge_classes".into(),
            json!({"core": set_json(&core), "nice": classes.nice, "linking": classes.linking, "outside": classes.outside}),
        );
    }
    obj.insert("vertices".into(), Value::Array(vertices));
    let output = pretty(&Value::Object(obj));
    if failures.is_empty() {
        Ok(output)
    } else {
        Err(Failure::Check { output, reason: failures.join("; ") })
    }
}

fn epsilon_json(e: &shadowlab_core::analytics_k3::VertexEpsilon) -> Value {
    json!({
        "e1": rational_string(&e.e1),
        "e2": e.e2, "e3": e.e3, "e4": e.e4, "e5": e.e5,
        "e6": e.e6, "e7": e.e7, "e8": e.e8, "e9": e.e9,
    })
}

fn entropy_cmd(args: EntropyArgs) -> Outcome {
    let config = load_config(&args.input)?;
    let h = build_incidence(&config).map_err(usage)?;
    let reports = path_reports(&h, args.max_len, args.cap).map_err(usage)?;
    let mut failures = Vec::new();
    let lengths: Vec<Value> = reports.iter().map(|r| length_json(r, args.tolerance, &mut failures)).collect();
    let output = pretty(&json!({
        "k": h.k(),
        "a": h.num_edges(),
        "b": h.num_vertices(),
        "lengths": lengths,
    }));
    if failures.is_empty() {
        Ok(output)
    } else {
        Err(Failure::Check { output, reason: failures.join("; ") })
    }
}

fn length_json(r: &LengthReport, tolerance: f64, failures: &mut Vec<String>) -> Value {
    let i = r.length;
    let mut fail = |cond: bool, what: &str| {
        if !cond {
            failures.push(format!("i={i}: {what}"));
        }
    };
    fail(r.l_lower_holds, "|L_i| below its lower bound");
    fail(r.crude_upper_holds.unwrap_or(true), "|L_i| above a k^(i+1) b^(i-1)");
    fail(r.marginals_exact, "endpoint marginals differ from mu_0");
    fail(r.total_weight_one, "measure does not sum to 1");
    fail(r.entropy_below_log_size, "entropy exceeds ln |L_i|");
    let rel_ok = r.entropy_recursion_rel_err.is_none_or(|e| e <= tolerance);
    fail(rel_ok, "entropy recursion outside tolerance");

    let mut bounds = Map::new();
    bounds.insert("L_lower".into(), json!(rational_string(&r.l_lower)));
    bounds.insert("L_lower_holds".into(), json!(r.l_lower_holds));
    if let Some(c) = r.crude_upper_holds {
        bounds.insert("L_crude_upper_holds".into(), json!(c));
    }
    bounds.insert("marginals_exact".into(), json!(r.marginals_exact));
    bounds.insert("total_weight_one".into(), json!(r.total_weight_one));
    bounds.insert("D_below_ln_L".into(), json!(r.entropy_below_log_size));
    if let (Some(pred), Some(rel)) = (r.entropy_predicted, r.entropy_recursion_rel_err) {
        bounds.insert("D_recursion".into(), json!(format_real(pred)));
        bounds.insert("D_recursion_rel_err".into(), json!(format_real(rel)));
        bounds.insert("D_recursion_holds".into(), json!(rel_ok));
    }
    let mut obj = Map::new();
    obj.insert("i".into(), json!(i));
    obj.insert("L".into(), num(r.l_size));
    if let Some(s) = &r.straight {
        fail(s.p_lower_holds, "P_i below its lower bound");
        fail(s.per_pair_cap_holds, "an endpoint pair has more than i!^2 straight paths");
        obj.insert("M".into(), num(s.stats.m_size));
        obj.insert("P".into(), json!(rational_string(&s.stats.p)));
        bounds.insert("P_lower".into(), json!(rational_string(&s.p_lower)));
        bounds.insert("P_lower_holds".into(), json!(s.p_lower_holds));
        bounds.insert("P_upper_advisory".into(), json!(rational_string(&s.p_upper)));
        bounds.insert("P_upper_advisory_holds".into(), json!(s.p_upper_holds));
        bounds.insert("per_pair_max".into(), num(s.stats.per_pair_max));
        bounds.insert("per_pair_cap".into(), num(s.per_pair_cap));
        bounds.insert("per_pair_cap_holds".into(), json!(s.per_pair_cap_holds));
        bounds.insert("distance_pairs".into(), num(s.stats.distance_pairs));
        if let Some(nice) = s.stats.nice_pairs {
            bounds.insert("nice_pairs".into(), num(nice));
        }
        bounds.insert("M_reference".into(), json!(format_real(s.m_reference)));
    }
    obj.insert("D".into(), json!(format_real(r.entropy)));
    obj.insert("bounds".into(), Value::Object(bounds));
    Value::Object(obj)
}

fn bound_row_json(row: &BoundRow) -> Value {
    let mut obj = Map::new();
    obj.insert("b".into(), num(&row.b));
    obj.insert("k".into(), json!(row.k));
    obj.insert("cascade".into(), terms_json(&row.cascade));
    obj.insert("be_lower".into(), num(&row.be_lower));
    obj.insert("k_specific_upper".into(), row.k_specific_upper.as_ref().map_or(Value::Null, num));
    obj.insert("k_specific_upper_status".into(), json!(if row.k_specific_upper.is_some() { "exact" } else { "unknown" }));
    obj.insert("general_leading".into(), json!(format_real(row.general_leading)));
    obj.insert("general_leading_status".into(), json!("advisory"));
    obj.insert("theorem2_value".into(), row.theorem2_value.as_ref().map_or(Value::Null, num));
    obj.insert("theorem2_status".into(), json!("exact above an unknown threshold"));
    obj.insert("gap".into(), row.gap().as_ref().map_or(Value::Null, num));
    Value::Object(obj)
}

fn bounds_csv(rows: &[BoundRow]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["b", "k", "cascade", "be_lower", "k_specific_upper", "general_leading", "theorem2_value", "gap"])?;
    let opt = |v: Option<&BigUint>| v.map(|x| x.to_string()).unwrap_or_default();
    for row in rows {
        let cascade: Vec<String> = row.cascade.terms().iter().map(|t| format!("binom({},{})", t.c, t.index)).collect();
        w.write_record([
            row.b.to_string(),
            row.k.to_string(),
            cascade.join("+"),
            row.be_lower.to_string(),
            opt(row.k_specific_upper.as_ref()),
            format_real(row.general_leading),
            opt(row.theorem2_value.as_ref()),
            opt(row.gap().as_ref()),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("all fields are ASCII"))
}

fn bounds_cmd(a: BoundsArgs) -> Outcome {
    if a.b_min == 0 || a.b_min > a.b_max {
        return Err(usage("need 1 <= --b-min <= --b-max"));
    }
    let rows = conjecture_table(a.k, a.b_min..=a.b_max).map_err(usage)?;
    let output = match a.format {
        Format::Json => pretty(&Value::Array(rows.iter().map(bound_row_json).collect())),
        Format::Csv => bounds_csv(&rows).map_err(usage)?,
    };
    let broken: Vec<String> = rows
        .iter()
        .filter(|r| r.k_specific_upper.as_ref().is_some_and(|u| u < &r.be_lower))
        .map(|r| format!("b={}: construction exceeds the exact upper bound", r.b))
        .collect();
    if broken.is_empty() {
        Ok(output)
    } else {
        Err(Failure::Check { output, reason: broken.join("; ") })
    }
}

fn options(flags: &SearchFlags) -> SolveOptions {
    SolveOptions {
        budget: flags.budget,
        threads: flags.threads,
        seed: flags.seed,
        timing: flags.timing,
        ..SolveOptions::default()
    }
}

fn solve(a: SolveArgs) -> Outcome {
    let problem = SearchProblem::new(a.r, a.k, a.b, a.n).map_err(usage)?;
    let opts = SolveOptions {
        checkpoint: a.checkpoint,
        resume: a.resume,
        collect_optima: a.optima,
        ..options(&a.search)
    };
    let registry = StrategyRegistry::with_defaults();
    let cert = registry.solve(&a.search.mode, &problem, &opts).map_err(usage)?;
    let output = cert.to_json() + "\n";
    let check = verify_certificate(&cert);
    if check.valid {
        Ok(output)
    } else {
        Err(Failure::Check { output, reason: check.diagnostics.join("; ") })
    }
}

fn sweep(a: SweepArgs) -> Outcome {
    if a.n_min > a.n_max {
        return Err(usage("need --n-min <= --n-max"));
    }
    let registry = StrategyRegistry::with_defaults();
    let report =
        sweep_n(a.r, a.k, a.b, a.n_min..=a.n_max, &a.search.mode, &options(&a.search), &registry).map_err(usage)?;
    let invalid: Vec<String> = report
        .rows
        .iter()
        .filter_map(|row| row.certificate.as_ref())
        .filter_map(|c| {
            let v = verify_certificate(c);
            (!v.valid).then(|| format!("n={}: {}", c.n, v.diagnostics.join(", ")))
        })
        .collect();
    let output = pretty(&serde_json::to_value(&report).expect("report serializes"));
    if invalid.is_empty() {
        Ok(output)
    } else {
        Err(Failure::Check { output, reason: invalid.join("; ") })
    }
}
