//! Factors of independent transversals in sparse k-partite graphs.
//!
//! This crate works with `[k, n, 1]`-graphs — k-partite graphs with parts of
//! size n where each pair of parts induces a matching — and asks when the
//! vertex set splits into n disjoint independent transversals (a *factor*).
//!
//! The pieces:
//!
//! * [`model`] — the graph and factor types and their invariants.
//! * [`format`] — a line-oriented text format and a JSON format, round-trip
//!   parseable.
//! * [`matching`] — dense bipartite matching: Hopcroft–Karp, Hall-violator
//!   witnesses, random pairings, and the reshuffling step the solver uses.
//! * [`constructions`] — extremal and random instance generators.
//! * [`algorithms`] — the greedy column-by-column solver and the semi-random
//!   reshuffling solver.
//! * [`exhaustive`] — complete small-case verification (every 4-part
//!   instance, plus a bounded brute-force solver).
//! * [`analysis`] — the numeric feasibility analysis behind the solver's
//!   constants.

pub mod algorithms;
pub mod analysis;
pub mod constructions;
pub mod exhaustive;
pub mod format;
pub mod matching;
pub mod model;

pub use algorithms::{
    ConditionCheckError, GreedyFailure, ParamError, SemirandomRun, SolveOptions, SolverFailure,
    SolverParams, StageError, StageReport,
};
pub use analysis::{AnalysisError, IntegralParams, NonpositivityReport};
pub use constructions::{ConstructionError, LatinSquare};
pub use exhaustive::{ExhaustiveError, SearchBudget, VerificationReport};
pub use format::FormatError;
pub use matching::{
    BipartiteAdjacency, HallWitness, MatchingError, MatchingOutcome, PairAssignment,
    ReshuffleOutcome, UNPAIRED,
};
pub use model::{ModelError, PartialFactor, SparsePartiteGraph, Transversal};

// The guide in book/ is part of the test suite: every fenced Rust snippet in
// its chapters compiles and runs as a doctest of this crate.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/model.md")]
    mod model {}
    #[doc = include_str!("../../../book/src/format.md")]
    mod format {}
    #[doc = include_str!("../../../book/src/constructions.md")]
    mod constructions {}
    #[doc = include_str!("../../../book/src/matching.md")]
    mod matching {}
    #[doc = include_str!("../../../book/src/greedy.md")]
    mod greedy {}
    #[doc = include_str!("../../../book/src/semirandom.md")]
    mod semirandom {}
    #[doc = include_str!("../../../book/src/exhaustive.md")]
    mod exhaustive {}
    #[doc = include_str!("../../../book/src/analysis.md")]
    mod analysis {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
