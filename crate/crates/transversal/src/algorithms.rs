//! The two factor-finding algorithms.
//!
//! **Column greedy.** Keep a t-partial factor of independent transversals;
//! to add part t, build the auxiliary bipartite graph between the n rows and
//! the n vertices of the next part (edge = "adding this vertex keeps the row
//! independent") and take any perfect matching. Every vertex of a row rules
//! out at most one vertex of the next part, so the auxiliary graph has
//! minimum degree ≥ n − t and Hall's condition holds outright whenever
//! n ≥ 2k − 2. Below that, the matching can fail — the failure value carries
//! the stage and a Hall witness.
//!
//! **Semi-random staging.** For n closer to k (down to roughly k ≤ 0.56·n)
//! the greedy's worst case bites, so stage t instead: trim the auxiliary
//! graph to exact left degree n − t, draw a uniformly random permutation
//! pairing, call it *good* when its aligned-edge count m_t lands within δn
//! of n − t, and if good, reshuffle with budget s_t = ⌊c·t + η·n⌋ against
//! the untrimmed graph. A successful reshuffle yields a perfect matching —
//! the next column. When a stage is not good (or its reshuffle fails), the
//! run falls back to extending along the raw pairing, which keeps the
//! bookkeeping uniform but may break row independence — so any fallback
//! marks the attempt failed, and the solver restarts with a fresh rng
//! stream. Randomness per stage is consumed strictly in the order trim →
//! pairing → reshuffle, which makes whole runs reproducible from one seed.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::analysis::check_c_condition;
use crate::matching::{
    BipartiteAdjacency, HallWitness, MatchingError, MatchingOutcome,
    perfect_matching_or_witness, random_pairing, reshuffle, trim_to_exact_degree,
};
use crate::model::{PartialFactor, SparsePartiteGraph};

/// Exact-enumeration cap for [`check_success_condition_exact`].
pub const EXACT_MODE_CAP: usize = 20;

// ======================================================================
// Parameters and reports
// ======================================================================

/// Errors from [`SolverParams::new`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("c = {c} rejected: need 2c²·ln((1+c)/c) ≥ 1 (c ⪆ 0.7777) and c ≤ 1")]
    InfeasibleC { c: f64 },
    #[error("need 0 < delta < eta, got delta = {delta}, eta = {eta}")]
    BadTolerances { delta: f64, eta: f64 },
    #[error("epsilon must be positive, got {epsilon}")]
    BadEpsilon { epsilon: f64 },
}

/// Tuning knobs of the semi-random solver.
///
/// The orderings are what matters: δ < η (goodness tolerance below the
/// reshuffle slack) and a slope c with 2c²·ln((1+c)/c) ≥ 1, which pins
/// c ∈ [0.7777, 1] — in practice 0.778 ≤ c ≤ 1. The intended regime is
/// k ≤ n(1−ε)/(1+c); ε is the headroom keeping runs away from the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverParams {
    c: f64,
    delta: f64,
    eta: f64,
    epsilon: f64,
    restarts: usize,
    seed: u64,
}

impl SolverParams {
    /// Validates and builds parameters. `restarts` counts retries after the
    /// first attempt, so the solver makes `restarts + 1` attempts in total.
    pub fn new(
        c: f64,
        delta: f64,
        eta: f64,
        epsilon: f64,
        restarts: usize,
        seed: u64,
    ) -> Result<Self, ParamError> {
        if !(c > 0.0 && c <= 1.0) || !check_c_condition(c) {
            return Err(ParamError::InfeasibleC { c });
        }
        if !(delta > 0.0 && delta < eta) {
            return Err(ParamError::BadTolerances { delta, eta });
        }
        if epsilon <= 0.0 {
            return Err(ParamError::BadEpsilon { epsilon });
        }
        Ok(SolverParams { c, delta, eta, epsilon, restarts, seed })
    }

    /// The default tuning (c = 0.778, δ = 0.02, η = 0.10, ε = 0.05,
    /// 20 restarts) with an explicit seed.
    pub fn default_with_seed(seed: u64) -> Self {
        SolverParams { c: 0.778, delta: 0.02, eta: 0.10, epsilon: 0.05, restarts: 20, seed }
    }

    /// Same parameters, different seed.
    pub fn with_seed(self, seed: u64) -> Self {
        SolverParams { seed, ..self }
    }

    /// Same parameters, different restart budget.
    pub fn with_restarts(self, restarts: usize) -> Self {
        SolverParams { restarts, ..self }
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn restarts(&self) -> usize {
        self.restarts
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The largest k this tuning is designed for: ⌊n(1−ε)/(1+c)⌋.
    pub fn max_design_k(&self, n: usize) -> usize {
        (n as f64 * (1.0 - self.epsilon) / (1.0 + self.c)).floor() as usize
    }
}

impl Default for SolverParams {
    fn default() -> Self {
        Self::default_with_seed(0)
    }
}

/// What happened at one stage of a semi-random run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StageReport {
    /// Stage index: the factor grew from t columns to t + 1.
    pub t: usize,
    /// Aligned-edge count of the random pairing against the trimmed graph.
    pub m_t: usize,
    /// Whether |m_t − (n − t)| ≤ δn.
    pub good: bool,
    /// Reshuffle budget ⌊c·t + η·n⌋.
    pub s_t: usize,
    /// Whether the reshuffle ran and perfected its leftover graph
    /// (always false when the stage was not good — no reshuffle runs then).
    pub reshuffle_success: bool,
    /// Whether the stage fell back to the raw pairing,
    /// = !(good && reshuffle_success).
    pub fallback_used: bool,
}

/// A stage could not even attempt its reshuffle: the matching is smaller
/// than the budget the reshuffle must release.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error, Serialize)]
pub enum StageError {
    #[error(
        "stage {t}: pairing carries m_t = {m_t} edges but the reshuffle budget is s_t = {s_t}; \
         parameters are outside the regime k(1+c) ≤ n(1−δ−η)"
    )]
    InsufficientMatching { t: usize, m_t: usize, s_t: usize },
}

// ======================================================================
// Auxiliary graph
// ======================================================================

/// The stage bipartite graph between the rows of a t-partial factor and the
/// vertices of part t: row j is adjacent to vertex v iff v conflicts with
/// none of the row's picks, i.e. the row extended by v stays independent.
///
/// Both minimum degrees are at least n − t: each of a row's t picks has at
/// most one neighbour in part t, and each vertex of part t has at most one
/// neighbour in each of the t earlier parts, hence conflicts with at most t
/// rows. Asserted on every call.
///
/// # Panics
/// If `f` does not fit `g` (t ≥ k or row count ≠ n).
pub fn build_auxiliary(g: &SparsePartiteGraph, f: &PartialFactor) -> BipartiteAdjacency {
    let (n, t) = (g.n(), f.t());
    assert!(t < g.k(), "no part left to match: t = {t}, k = {}", g.k());
    assert_eq!(f.row_count(), n, "factor row count must equal the part size");

    let mut b = BipartiteAdjacency::complete(n);
    for (j, row) in f.rows().iter().enumerate() {
        for (part, &pick) in row.iter().enumerate() {
            if let Some(v) = g.neighbor(part, pick, t) {
                b.clear_edge(j, v);
            }
        }
    }

    let floor = n.saturating_sub(t);
    debug_assert!(
        b.left_degrees().iter().chain(b.right_degrees().iter()).all(|&d| d >= floor),
        "auxiliary graph fell below its n − t degree floor"
    );
    b
}

// ======================================================================
// Column greedy
// ======================================================================

/// The column greedy got stuck: at stage `t` the auxiliary graph had no
/// perfect matching, certified by `witness`.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("greedy blocked at stage {t}: {} vertices of the next part share fewer neighbours", witness.right.len())]
pub struct GreedyFailure {
    /// Columns built when the extension failed.
    pub t: usize,
    /// Hall violator among the next part's vertices.
    pub witness: HallWitness,
}

/// Extends a partial factor column by column with perfect matchings of the
/// auxiliary graph until it covers `target_t` parts. Rows stay independent.
/// Deterministic: the matcher scans in a fixed order.
///
/// # Panics
/// If `f`'s rows are not independent in `g`, or `target_t > k`.
pub fn greedy_extend(
    g: &SparsePartiteGraph,
    mut f: PartialFactor,
    target_t: usize,
) -> Result<PartialFactor, GreedyFailure> {
    assert!(target_t <= g.k(), "cannot cover {target_t} of {} parts", g.k());
    assert!(
        f.rows().iter().all(|row| g.is_independent_transversal(row)),
        "greedy_extend needs an independent starting factor"
    );
    while f.t() < target_t {
        let b = build_auxiliary(g, &f);
        match perfect_matching_or_witness(&b) {
            MatchingOutcome::Perfect(matching) => {
                f = f
                    .extended(matching.pairs())
                    .expect("a perfect matching's rights form a permutation");
            }
            MatchingOutcome::Deficient(witness) => {
                return Err(GreedyFailure { t: f.t(), witness });
            }
        }
    }
    Ok(f)
}

/// Runs the column greedy from the trivial single-part factor to a full
/// factor. Succeeds for every instance with n ≥ 2k − 2; below that it may
/// fail, returning the stage and Hall witness as a value.
pub fn greedy_hall_factor(g: &SparsePartiteGraph) -> Result<PartialFactor, GreedyFailure> {
    let f = greedy_extend(g, PartialFactor::first_part(g.n()), g.k())?;
    debug_assert!(g.is_factor(&f), "greedy returned a non-factor");
    Ok(f)
}

// ======================================================================
// Semi-random staging
// ======================================================================

/// Runs one semi-random stage: trim, pair, judge goodness, reshuffle if
/// good, extend. Returns the grown factor (one more column — via the
/// reshuffled perfect matching on success, via the raw pairing on fallback)
/// and the stage report. The caller's rng is consumed in the order trim →
/// pairing → reshuffle.
///
/// Errors only when a good stage cannot fund its reshuffle (m_t < s_t),
/// which signals parameters outside the valid regime. Stages that merely
/// fall back are not errors; the report says so.
///
/// # Panics
/// If `f` does not fit `g`, like [`build_auxiliary`].
pub fn semirandom_stage(
    g: &SparsePartiteGraph,
    f: &PartialFactor,
    params: &SolverParams,
    rng: &mut impl Rng,
) -> Result<(PartialFactor, StageReport), StageError> {
    let (n, t) = (g.n(), f.t());
    let target_degree = n.saturating_sub(t);

    let b = build_auxiliary(g, f);
    let trimmed = trim_to_exact_degree(&b, target_degree, rng)
        .expect("auxiliary graph always meets its n − t degree floor");
    let pairing = random_pairing(&trimmed, rng);
    let m_t = pairing.flagged_count();

    let deviation = m_t.abs_diff(target_degree) as f64;
    let good = deviation <= params.delta * n as f64;
    let s_t = (params.c * t as f64 + params.eta * n as f64).floor() as usize;

    let mut reshuffle_success = false;
    let mut next = None;
    if good {
        // The reshuffle runs against the *untrimmed* graph: the pairing's
        // flagged edges live in the trimmed subgraph, so they are a matching
        // of the full graph too, and the leftover graph keeps every edge it
        // can get.
        let outcome = reshuffle(&b, &pairing, s_t, rng).map_err(|e| match e {
            MatchingError::InsufficientMatching { .. } => {
                StageError::InsufficientMatching { t, m_t, s_t }
            }
            other => unreachable!("reshuffle can only lack matching edges here: {other}"),
        })?;
        reshuffle_success = outcome.success;
        if let Some(matching) = outcome.final_matching {
            let extended = f
                .extended(matching.pairs())
                .expect("a perfect matching's rights form a permutation");
            debug_assert!(
                extended.rows().iter().all(|row| {
                    !g.is_independent_transversal(&row[..t]) || g.is_independent_transversal(row)
                }),
                "a perfect matching of the auxiliary graph must keep rows independent"
            );
            next = Some(extended);
        }
    }

    // Small stages cannot fail: with t ≤ ηn/3 the leftover graph's degrees
    // already force Hall's condition, so a good pairing guarantees success.
    if good && (t as f64) < params.eta * n as f64 / 3.0 {
        assert!(
            reshuffle_success,
            "stage {t}: reshuffle failed in the guaranteed regime t < ηn/3 — this is a bug"
        );
    }

    let fallback_used = !(good && reshuffle_success);
    let next = match next {
        Some(f_next) => f_next,
        // Fallback: extend along the raw pairing. The column is still a
        // permutation, but rows may stop being independent — the caller
        // treats the whole attempt as failed.
        None => f.extended(pairing.pairs()).expect("a pairing is a permutation"),
    };
    let report = StageReport { t, m_t, good, s_t, reshuffle_success, fallback_used };
    Ok((next, report))
}

/// A successful semi-random run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SemirandomRun {
    /// The factor; passes `is_factor` (asserted before returning).
    pub factor: PartialFactor,
    /// Per-stage reports of the successful attempt (empty on the greedy
    /// shortcut path).
    pub reports: Vec<StageReport>,
    /// Zero-based index of the attempt that succeeded.
    pub attempt: usize,
    /// Whether the greedy shortcut produced the factor instead of staging.
    pub via_greedy: bool,
}

/// All attempts of a semi-random run failed.
#[derive(Debug, Clone, PartialEq, Error, Serialize)]
#[error("all {attempts} attempts failed ({} stages reported in the last){}",
        last_reports.len(),
        stage_error.map(|e| format!("; last attempt aborted: {e}")).unwrap_or_default())]
pub struct SolverFailure {
    /// Total attempts made (restarts + 1, or fewer never — every budgeted
    /// attempt runs).
    pub attempts: usize,
    /// Stage reports of the final attempt.
    pub last_reports: Vec<StageReport>,
    /// Set when the final attempt aborted mid-run instead of finishing with
    /// fallbacks.
    pub stage_error: Option<StageError>,
}

/// Optional behaviour switches for [`semirandom_factor_with_options`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveOptions {
    /// When n ≥ 2k − 2, skip the staging and run the column greedy, which
    /// is guaranteed there. Off by default: the staged algorithm is the
    /// subject of study, not a component to be optimized away.
    pub greedy_shortcut: bool,
}

/// Runs the semi-random solver: up to `restarts + 1` attempts, each staging
/// t = 1 … k−1 from the trivial first column on its own rng stream
/// (stream i = attempt i of the seed). An attempt succeeds when no stage
/// fell back; the factor is then verified independent before returning.
pub fn semirandom_factor(
    g: &SparsePartiteGraph,
    params: &SolverParams,
) -> Result<SemirandomRun, SolverFailure> {
    semirandom_factor_with_options(g, params, SolveOptions::default())
}

/// [`semirandom_factor`] with explicit [`SolveOptions`].
pub fn semirandom_factor_with_options(
    g: &SparsePartiteGraph,
    params: &SolverParams,
    options: SolveOptions,
) -> Result<SemirandomRun, SolverFailure> {
    let (k, n) = (g.k(), g.n());

    if options.greedy_shortcut
        && n >= 2 * k - 2
        && let Ok(factor) = greedy_hall_factor(g)
    {
        return Ok(SemirandomRun { factor, reports: Vec::new(), attempt: 0, via_greedy: true });
    }

    let attempts = params.restarts() + 1;
    let mut last_reports = Vec::new();
    let mut last_error = None;

    for attempt in 0..attempts {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed());
        rng.set_stream(attempt as u64);

        let mut f = PartialFactor::first_part(n);
        let mut reports = Vec::with_capacity(k - 1);
        let mut aborted = None;
        let mut clean = true;

        for _t in 1..k {
            match semirandom_stage(g, &f, params, &mut rng) {
                Ok((next, report)) => {
                    clean &= !report.fallback_used;
                    reports.push(report);
                    f = next;
                }
                Err(e) => {
                    aborted = Some(e);
                    break;
                }
            }
        }

        match aborted {
            None if clean => {
                assert!(g.is_factor(&f), "clean semi-random run produced a non-factor");
                return Ok(SemirandomRun { factor: f, reports, attempt, via_greedy: false });
            }
            _ => {
                last_reports = reports;
                last_error = aborted;
            }
        }
    }

    Err(SolverFailure { attempts, last_reports, stage_error: last_error })
}

// ======================================================================
// Neighbourhood expansion checks
// ======================================================================

/// Errors from the exact expansion check.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConditionCheckError {
    #[error("exact enumeration is capped at m ≤ {cap}, got m = {m}")]
    ExactModeTooLarge { m: usize, cap: usize },
}

/// Exact check that **every** right subset W of size `w_size` has
/// |N(W)| ≥ `threshold`; enumerates all subsets, so the side is capped at
/// [`EXACT_MODE_CAP`]. This is the sufficient condition under which a
/// stage's reshuffle must succeed (with w_size = ⌊ct⌋ and threshold
/// n − ⌊ηn/7⌋).
pub fn check_success_condition_exact(
    b: &BipartiteAdjacency,
    w_size: usize,
    threshold: usize,
) -> Result<bool, ConditionCheckError> {
    let m = b.m();
    if m > EXACT_MODE_CAP {
        return Err(ConditionCheckError::ExactModeTooLarge { m, cap: EXACT_MODE_CAP });
    }
    if w_size > m {
        return Ok(true); // no such subset exists
    }
    let mut subset: Vec<usize> = Vec::with_capacity(w_size);
    Ok(expansion_holds(b, w_size, threshold, 0, &mut subset))
}

fn expansion_holds(
    b: &BipartiteAdjacency,
    w_size: usize,
    threshold: usize,
    from: usize,
    subset: &mut Vec<usize>,
) -> bool {
    if subset.len() == w_size {
        return b.neighborhood_of_rights(subset).len() >= threshold;
    }
    let remaining = w_size - subset.len();
    for r in from..=(b.m() - remaining) {
        subset.push(r);
        let ok = expansion_holds(b, w_size, threshold, r + 1, subset);
        subset.pop();
        if !ok {
            return false;
        }
    }
    true
}

/// Sampled version of [`check_success_condition_exact`]: draws `samples`
/// uniformly random subsets and checks only those. One-sided — `true` only
/// means no sampled subset violated the bound.
pub fn check_success_condition_sampled(
    b: &BipartiteAdjacency,
    w_size: usize,
    threshold: usize,
    samples: usize,
    rng: &mut impl Rng,
) -> bool {
    let m = b.m();
    if w_size > m {
        return true;
    }
    for _ in 0..samples {
        let subset = rand::seq::index::sample(rng, m, w_size).into_vec();
        if b.neighborhood_of_rights(&subset).len() < threshold {
            return false;
        }
    }
    true
}
