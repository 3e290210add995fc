//! Dense bipartite matching engine.
//!
//! Everything here works on square m×m bipartite graphs ([`BipartiteAdjacency`]):
//! maximum matching (Hopcroft–Karp), perfect-matching-or-Hall-witness,
//! uniformly random permutation pairings, degree trimming, and the
//! reshuffling primitive at the heart of the semi-random solver.
//!
//! Reshuffling, given a matching M of B with m′ edges and a budget s ≤ m′:
//! release s randomly chosen edges of M and keep the other m′ − s, collect
//! everything unkept (the unmatched vertices plus the released endpoints)
//! into a square *leftover graph* with m − m′ + s vertices a side, and try
//! to perfect-match it. On success the kept pairs plus the new matching form a perfect
//! matching of B. The s pairs must be released uniformly at random — the
//! solver's success guarantees lean on that, so the deterministic variant is
//! explicitly labelled as test-only.

use rand::prelude::*;
use rand::seq::index::sample;
use serde::Serialize;
use std::collections::VecDeque;
use std::fmt::Write as _;
use thiserror::Error;

/// Sentinel for "not paired".
pub const UNPAIRED: usize = usize::MAX;

/// Errors from matching-layer operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchingError {
    #[error("left vertex {left} has degree {degree}, below the trim target {needed}")]
    DegreeDeficit { left: usize, degree: usize, needed: usize },
    #[error("matching has {have} edges, fewer than the {need} the reshuffle must release")]
    InsufficientMatching { have: usize, need: usize },
    #[error("right vertex {right} paired to more than one left vertex")]
    DuplicateRight { right: usize },
    #[error("pair array has length {len}, expected {expected}")]
    WrongLength { len: usize, expected: usize },
}

// ======================================================================
// BipartiteAdjacency
// ======================================================================

/// Square bipartite graph on m left and m right vertices, dense storage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteAdjacency {
    m: usize,
    /// Row-major m×m booleans; `adj[l * m + r]` = edge between left l and right r.
    adj: Vec<bool>,
}

impl BipartiteAdjacency {
    /// Edgeless m×m graph (m = 0 is allowed; it has one empty matching).
    pub fn new(m: usize) -> Self {
        BipartiteAdjacency { m, adj: vec![false; m * m] }
    }

    /// Complete m×m graph.
    pub fn complete(m: usize) -> Self {
        BipartiteAdjacency { m, adj: vec![true; m * m] }
    }

    /// Side size.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Whether left l and right r are adjacent.
    #[inline]
    pub fn has_edge(&self, l: usize, r: usize) -> bool {
        self.adj[l * self.m + r]
    }

    /// Adds an edge.
    pub fn set_edge(&mut self, l: usize, r: usize) {
        self.adj[l * self.m + r] = true;
    }

    /// Removes an edge.
    pub fn clear_edge(&mut self, l: usize, r: usize) {
        self.adj[l * self.m + r] = false;
    }

    /// Right neighbours of a left vertex, ascending.
    pub fn neighbors_of_left(&self, l: usize) -> impl Iterator<Item = usize> + '_ {
        let row = &self.adj[l * self.m..(l + 1) * self.m];
        row.iter().enumerate().filter_map(|(r, &e)| e.then_some(r))
    }

    /// Degree of a left vertex.
    pub fn left_degree(&self, l: usize) -> usize {
        self.neighbors_of_left(l).count()
    }

    /// Degree of a right vertex.
    pub fn right_degree(&self, r: usize) -> usize {
        (0..self.m).filter(|&l| self.has_edge(l, r)).count()
    }

    /// All left degrees.
    pub fn left_degrees(&self) -> Vec<usize> {
        (0..self.m).map(|l| self.left_degree(l)).collect()
    }

    /// All right degrees.
    pub fn right_degrees(&self) -> Vec<usize> {
        (0..self.m).map(|r| self.right_degree(r)).collect()
    }

    /// Total edge count.
    pub fn edge_count(&self) -> usize {
        self.adj.iter().filter(|&&e| e).count()
    }

    /// All edges, row-major.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.m).flat_map(|l| self.neighbors_of_left(l).map(move |r| (l, r))).collect()
    }

    /// Left vertices adjacent to any of the given right vertices (sorted).
    pub fn neighborhood_of_rights(&self, rights: &[usize]) -> Vec<usize> {
        (0..self.m).filter(|&l| rights.iter().any(|&r| self.has_edge(l, r))).collect()
    }

    /// Subgraph induced by the given left and right vertex lists. Entry (a, b)
    /// of the result is the edge (lefts[a], rights[b]) of the original.
    ///
    /// # Panics
    /// If the lists have different lengths (the engine only handles square
    /// graphs) or repeat a vertex.
    pub fn induced(&self, lefts: &[usize], rights: &[usize]) -> BipartiteAdjacency {
        assert_eq!(lefts.len(), rights.len(), "induced subgraph must stay square");
        let mm = lefts.len();
        let mut out = BipartiteAdjacency::new(mm);
        for (a, &l) in lefts.iter().enumerate() {
            for (b, &r) in rights.iter().enumerate() {
                if self.has_edge(l, r) {
                    out.set_edge(a, b);
                }
            }
        }
        debug_assert_eq!(
            out.edge_count(),
            lefts
                .iter()
                .flat_map(|&l| rights.iter().map(move |&r| (l, r)))
                .filter(|&(l, r)| self.has_edge(l, r))
                .count(),
            "induced subgraph lost edges — repeated vertex in the lists?"
        );
        out
    }

    /// True iff `other` has no edge this graph lacks.
    pub fn contains(&self, other: &BipartiteAdjacency) -> bool {
        self.m == other.m && self.adj.iter().zip(&other.adj).all(|(&a, &b)| a || !b)
    }

    /// Debug rendering in the instance file's pair syntax (parts 0 = left,
    /// 1 = right). Not a valid instance file — left vertices repeat.
    pub fn dump(&self) -> String {
        let mut out = format!("# bipartite adjacency m={}\npair 0 1:", self.m);
        for (l, r) in self.edges() {
            write!(out, " {l}->{r}").unwrap();
        }
        out.push('\n');
        out
    }
}

// ======================================================================
// PairAssignment
// ======================================================================

/// A pairing of left to right vertices: permutations, partial matchings, and
/// everything in between.
///
/// `pairs[l]` is the right vertex assigned to left l (or [`UNPAIRED`]);
/// distinct left vertices get distinct right vertices. `edge_flags[l]` marks
/// the assigned pairs that are actual edges of the underlying adjacency, so
/// the flagged pairs always form a matching of it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairAssignment {
    pairs: Vec<usize>,
    edge_flags: Vec<bool>,
}

impl PairAssignment {
    /// Validates `pairs` against `b` and computes the edge flags.
    pub fn new(b: &BipartiteAdjacency, pairs: Vec<usize>) -> Result<Self, MatchingError> {
        if pairs.len() != b.m() {
            return Err(MatchingError::WrongLength { len: pairs.len(), expected: b.m() });
        }
        let mut taken = vec![false; b.m()];
        for &r in &pairs {
            if r == UNPAIRED {
                continue;
            }
            if r >= b.m() || taken[r] {
                return Err(MatchingError::DuplicateRight { right: r });
            }
            taken[r] = true;
        }
        let edge_flags =
            pairs.iter().enumerate().map(|(l, &r)| r != UNPAIRED && b.has_edge(l, r)).collect();
        Ok(PairAssignment { pairs, edge_flags })
    }

    /// Side size.
    pub fn m(&self) -> usize {
        self.pairs.len()
    }

    /// The raw pair array (entries may be [`UNPAIRED`]).
    pub fn pairs(&self) -> &[usize] {
        &self.pairs
    }

    /// Right vertex of left l, if assigned.
    pub fn right_of(&self, l: usize) -> Option<usize> {
        (self.pairs[l] != UNPAIRED).then_some(self.pairs[l])
    }

    /// Whether the pair at left l is a flagged edge.
    pub fn is_flagged(&self, l: usize) -> bool {
        self.edge_flags[l]
    }

    /// Number of flagged pairs — the size of the matching this assignment
    /// carries.
    pub fn flagged_count(&self) -> usize {
        self.edge_flags.iter().filter(|&&f| f).count()
    }

    /// Number of assigned pairs (flagged or not).
    pub fn assigned_count(&self) -> usize {
        self.pairs.iter().filter(|&&r| r != UNPAIRED).count()
    }

    /// The flagged pairs as (left, right), ascending in left.
    pub fn flagged_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.m()).filter(|&l| self.edge_flags[l]).map(|l| (l, self.pairs[l])).collect()
    }

    /// True iff every left vertex is paired along an edge of `b` and the
    /// rights are a permutation — a perfect matching of `b`.
    pub fn is_perfect_matching_of(&self, b: &BipartiteAdjacency) -> bool {
        if self.m() != b.m() {
            return false;
        }
        let mut seen = vec![false; b.m()];
        for (l, &r) in self.pairs.iter().enumerate() {
            if r == UNPAIRED || r >= b.m() || seen[r] || !b.has_edge(l, r) {
                return false;
            }
            seen[r] = true;
        }
        true
    }
}

// ======================================================================
// Maximum matching and Hall witnesses
// ======================================================================

/// Maximum-cardinality matching of `b`, Hopcroft–Karp with a fixed ascending
/// scan order, so the result is deterministic.
pub fn max_matching(b: &BipartiteAdjacency) -> PairAssignment {
    let m = b.m();
    let mut pair_l = vec![UNPAIRED; m];
    let mut pair_r = vec![UNPAIRED; m];
    let mut dist = vec![usize::MAX; m];
    let mut queue = VecDeque::new();

    loop {
        // BFS phase: layer left vertices by alternating-path distance from
        // the unmatched ones.
        dist.fill(usize::MAX);
        queue.clear();
        for l in 0..m {
            if pair_l[l] == UNPAIRED {
                dist[l] = 0;
                queue.push_back(l);
            }
        }
        let mut reachable_free_right = false;
        while let Some(l) = queue.pop_front() {
            for r in b.neighbors_of_left(l) {
                match pair_r[r] {
                    UNPAIRED => reachable_free_right = true,
                    l2 if dist[l2] == usize::MAX => {
                        dist[l2] = dist[l] + 1;
                        queue.push_back(l2);
                    }
                    _ => {}
                }
            }
        }
        if !reachable_free_right {
            break;
        }
        // DFS phase: augment along shortest alternating paths.
        for l in 0..m {
            if pair_l[l] == UNPAIRED {
                augment(b, l, &mut pair_l, &mut pair_r, &mut dist);
            }
        }
    }

    let flags = pair_l.iter().map(|&r| r != UNPAIRED).collect();
    PairAssignment { pairs: pair_l, edge_flags: flags }
}

fn augment(
    b: &BipartiteAdjacency,
    l: usize,
    pair_l: &mut [usize],
    pair_r: &mut [usize],
    dist: &mut [usize],
) -> bool {
    for r in b.neighbors_of_left(l) {
        let l2 = pair_r[r];
        if l2 == UNPAIRED || (dist[l2] == dist[l] + 1 && augment(b, l2, pair_l, pair_r, dist)) {
            pair_l[l] = r;
            pair_r[r] = l;
            return true;
        }
    }
    dist[l] = usize::MAX;
    false
}

/// A Hall violator on the right side: a set W of right vertices with fewer
/// than |W| left neighbours in total.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HallWitness {
    /// The violating right-vertex set, ascending.
    pub right: Vec<usize>,
}

impl HallWitness {
    /// N(W): all left vertices adjacent to the witness, ascending.
    pub fn neighborhood(&self, b: &BipartiteAdjacency) -> Vec<usize> {
        b.neighborhood_of_rights(&self.right)
    }
}

/// Result of [`perfect_matching_or_witness`]: exactly one of the two.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatchingOutcome {
    Perfect(PairAssignment),
    Deficient(HallWitness),
}

/// Either a perfect matching of `b`, or a right-side Hall violator
/// certifying that none exists.
///
/// The witness is read off a maximum matching: alternate from the unmatched
/// right vertices (any edge right→left, matched edge left→right) and take
/// every right vertex reached. Its full neighbourhood is exactly the reached
/// left set, which is smaller by the matching's deficiency.
pub fn perfect_matching_or_witness(b: &BipartiteAdjacency) -> MatchingOutcome {
    let m = b.m();
    let mm = max_matching(b);
    if mm.assigned_count() == m {
        return MatchingOutcome::Perfect(mm);
    }

    let mut right_to_left = vec![UNPAIRED; m];
    for (l, &r) in mm.pairs().iter().enumerate() {
        if r != UNPAIRED {
            right_to_left[r] = l;
        }
    }
    let mut right_seen = vec![false; m];
    let mut left_seen = vec![false; m];
    let mut queue: VecDeque<usize> = (0..m).filter(|&r| right_to_left[r] == UNPAIRED).collect();
    for &r in &queue {
        right_seen[r] = true;
    }
    while let Some(r) = queue.pop_front() {
        for l in 0..m {
            if b.has_edge(l, r) && !left_seen[l] {
                left_seen[l] = true;
                // l is matched, or the matching would not be maximum.
                let r2 = mm.pairs()[l];
                debug_assert_ne!(r2, UNPAIRED, "augmenting path survived a maximum matching");
                if !right_seen[r2] {
                    right_seen[r2] = true;
                    queue.push_back(r2);
                }
            }
        }
    }

    let right: Vec<usize> = (0..m).filter(|&r| right_seen[r]).collect();
    debug_assert!(
        b.neighborhood_of_rights(&right).len() < right.len(),
        "extracted witness is not a Hall violator"
    );
    MatchingOutcome::Deficient(HallWitness { right })
}

// ======================================================================
// Randomized operations
// ======================================================================

/// Pairs the left side with a uniformly random permutation of the right side
/// and flags the pairs that land on edges of `b`.
pub fn random_pairing(b: &BipartiteAdjacency, rng: &mut impl Rng) -> PairAssignment {
    let mut perm: Vec<usize> = (0..b.m()).collect();
    perm.shuffle(rng);
    let edge_flags = perm.iter().enumerate().map(|(l, &r)| b.has_edge(l, r)).collect();
    PairAssignment { pairs: perm, edge_flags }
}

/// Removes uniformly random surplus edges until every *left* degree is
/// exactly `d`. Right degrees may drop below `d`. Fails with
/// [`MatchingError::DegreeDeficit`] if some left degree starts below `d`.
pub fn trim_to_exact_degree(
    b: &BipartiteAdjacency,
    d: usize,
    rng: &mut impl Rng,
) -> Result<BipartiteAdjacency, MatchingError> {
    let mut out = b.clone();
    for l in 0..b.m() {
        let mut nbrs: Vec<usize> = b.neighbors_of_left(l).collect();
        if nbrs.len() < d {
            return Err(MatchingError::DegreeDeficit { left: l, degree: nbrs.len(), needed: d });
        }
        let surplus = nbrs.len() - d;
        let (removed, _) = nbrs.partial_shuffle(rng, surplus);
        for &r in removed.iter() {
            out.clear_edge(l, r);
        }
    }
    Ok(out)
}

// ======================================================================
// Reshuffling
// ======================================================================

/// How [`reshuffle_with_selection`] picks the s pairs to release.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairSelection {
    /// Uniformly at random. The solver's success guarantees hold only here.
    Random,
    /// The s flagged pairs with the smallest left indices. TESTING ONLY:
    /// deterministic replay for unit tests; no probabilistic guarantees.
    FirstForTesting,
}

/// Result of a reshuffle: the leftover graph's vertex sets, the pairs kept
/// out of it, and — on success — a perfect matching of the full graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReshuffleOutcome {
    /// Whether the leftover graph had a perfect matching.
    pub success: bool,
    /// Left vertices of the leftover graph, ascending.
    pub leftover_left: Vec<usize>,
    /// Right vertices of the leftover graph, ascending.
    pub leftover_right: Vec<usize>,
    /// The matched pairs retained outside the leftover graph, ascending in left.
    pub kept_pairs: Vec<(usize, usize)>,
    /// On success, a perfect matching of the input adjacency.
    pub final_matching: Option<PairAssignment>,
}

/// Reshuffles `assignment` against `b`, releasing `s` randomly selected
/// flagged pairs: see the module docs. Errors with
/// [`MatchingError::InsufficientMatching`] when fewer than `s` pairs are
/// flagged.
///
/// # Panics
/// If `assignment.m() != b.m()`.
pub fn reshuffle(
    b: &BipartiteAdjacency,
    assignment: &PairAssignment,
    s: usize,
    rng: &mut impl Rng,
) -> Result<ReshuffleOutcome, MatchingError> {
    reshuffle_with_selection(b, assignment, s, rng, PairSelection::Random)
}

/// [`reshuffle`] with an explicit pair-selection mode; see [`PairSelection`]
/// for why anything but `Random` is test-only.
pub fn reshuffle_with_selection(
    b: &BipartiteAdjacency,
    assignment: &PairAssignment,
    s: usize,
    rng: &mut impl Rng,
    selection: PairSelection,
) -> Result<ReshuffleOutcome, MatchingError> {
    let m = b.m();
    assert_eq!(assignment.m(), m, "assignment and adjacency sizes differ");
    let flagged = assignment.flagged_pairs();
    let m_prime = flagged.len();
    if m_prime < s {
        return Err(MatchingError::InsufficientMatching { have: m_prime, need: s });
    }

    // Split the flagged pairs into s released and m′ − s kept.
    let released: Vec<(usize, usize)> = match selection {
        PairSelection::Random => {
            sample(rng, m_prime, s).into_iter().map(|i| flagged[i]).collect()
        }
        PairSelection::FirstForTesting => flagged[..s].to_vec(),
    };
    let mut in_released_l = vec![false; m];
    let mut in_released_r = vec![false; m];
    for &(l, r) in &released {
        in_released_l[l] = true;
        in_released_r[r] = true;
    }
    let kept_pairs: Vec<(usize, usize)> =
        flagged.iter().copied().filter(|&(l, _)| !in_released_l[l]).collect();
    let mut matched_l = vec![false; m];
    let mut matched_r = vec![false; m];
    for &(l, r) in &kept_pairs {
        matched_l[l] = true;
        matched_r[r] = true;
    }

    // Leftover graph: everything not covered by a kept pair.
    let leftover_left: Vec<usize> = (0..m).filter(|&l| !matched_l[l]).collect();
    let leftover_right: Vec<usize> = (0..m).filter(|&r| !matched_r[r]).collect();
    debug_assert_eq!(leftover_left.len(), m - m_prime + s);
    debug_assert_eq!(leftover_right.len(), m - m_prime + s);

    let leftover = b.induced(&leftover_left, &leftover_right);
    let sub = max_matching(&leftover);
    let success = sub.assigned_count() == leftover.m();

    let final_matching = success.then(|| {
        let mut pairs = vec![UNPAIRED; m];
        for &(l, r) in &kept_pairs {
            pairs[l] = r;
        }
        for (a, &sub_r) in sub.pairs().iter().enumerate() {
            pairs[leftover_left[a]] = leftover_right[sub_r];
        }
        let full = PairAssignment { pairs, edge_flags: vec![true; m] };
        debug_assert!(full.is_perfect_matching_of(b), "reshuffle produced a non-matching");
        full
    });

    Ok(ReshuffleOutcome { success, leftover_left, leftover_right, kept_pairs, final_matching })
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;
    use proptest::prelude::*;
    use rand_chacha::ChaCha8Rng;

    /// Diagonal-only adjacency.
    fn identity(m: usize) -> BipartiteAdjacency {
        let mut b = BipartiteAdjacency::new(m);
        for i in 0..m {
            b.set_edge(i, i);
        }
        b
    }

    /// Random adjacency with independent edge probability p.
    fn random_adjacency(m: usize, p: f64, seed: u64) -> BipartiteAdjacency {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut b = BipartiteAdjacency::new(m);
        for l in 0..m {
            for r in 0..m {
                if rng.random_bool(p) {
                    b.set_edge(l, r);
                }
            }
        }
        b
    }

    /// Oracle: maximum matching size by scanning all m! permutations.
    fn brute_max_matching(b: &BipartiteAdjacency) -> usize {
        (0..b.m())
            .permutations(b.m())
            .map(|perm| perm.iter().enumerate().filter(|&(l, &r)| b.has_edge(l, r)).count())
            .max()
            .unwrap_or(0)
    }

    /// Oracle: is there a permutation all of whose pairs are edges?
    fn brute_has_perfect(b: &BipartiteAdjacency) -> bool {
        b.m() == 0 || brute_max_matching(b) == b.m()
    }

    #[test]
    fn max_matching_on_identity_is_the_diagonal() {
        let b = identity(5);
        let mm = max_matching(&b);
        assert_eq!(mm.pairs(), &[0, 1, 2, 3, 4]);
        assert!(mm.is_perfect_matching_of(&b));
    }

    #[test]
    fn max_matching_on_complete_is_perfect() {
        let b = BipartiteAdjacency::complete(6);
        assert!(max_matching(&b).is_perfect_matching_of(&b));
    }

    #[test]
    fn max_matching_on_empty_graph_and_zero_size() {
        assert_eq!(max_matching(&BipartiteAdjacency::new(4)).assigned_count(), 0);
        assert_eq!(max_matching(&BipartiteAdjacency::new(0)).m(), 0);
    }

    /// Complete 5×5 minus a 3×3 biclique: three right vertices share only
    /// two left neighbours, so the maximum matching has size 4 = m − 1 and
    /// the Hall witness is exactly that right triple.
    fn blocked_5x5() -> (BipartiteAdjacency, Vec<usize>, Vec<usize>) {
        let mut b = BipartiteAdjacency::complete(5);
        let starved_rights = vec![2, 3, 4];
        let blocked_lefts = vec![0, 1, 2];
        for &l in &blocked_lefts {
            for &r in &starved_rights {
                b.clear_edge(l, r);
            }
        }
        (b, starved_rights, blocked_lefts)
    }

    #[test]
    fn blocked_graph_max_matching_is_m_minus_one() {
        let (b, _, _) = blocked_5x5();
        let mm = max_matching(&b);
        assert_eq!(mm.assigned_count(), 4);
        assert_eq!(brute_max_matching(&b), 4);
    }

    #[test]
    fn witness_on_blocked_graph_is_the_starved_triple() {
        let (b, starved_rights, blocked_lefts) = blocked_5x5();
        match perfect_matching_or_witness(&b) {
            MatchingOutcome::Deficient(w) => {
                assert_eq!(w.right, starved_rights);
                let nbhd = w.neighborhood(&b);
                assert_eq!(nbhd.len(), 2);
                assert!(nbhd.iter().all(|l| !blocked_lefts.contains(l)));
            }
            MatchingOutcome::Perfect(_) => panic!("blocked graph cannot have a perfect matching"),
        }
    }

    #[test]
    fn witness_on_punctured_diagonal_is_the_isolated_right() {
        let mut b = identity(6);
        b.clear_edge(3, 3);
        match perfect_matching_or_witness(&b) {
            MatchingOutcome::Deficient(w) => {
                assert_eq!(w.right, vec![3]);
                assert!(w.neighborhood(&b).is_empty());
            }
            MatchingOutcome::Perfect(_) => panic!("right vertex 3 is isolated"),
        }
    }

    #[test]
    fn perfect_outcome_on_complete_graph() {
        match perfect_matching_or_witness(&BipartiteAdjacency::complete(4)) {
            MatchingOutcome::Perfect(mm) => {
                assert!(mm.is_perfect_matching_of(&BipartiteAdjacency::complete(4)))
            }
            MatchingOutcome::Deficient(_) => panic!("complete graph has a perfect matching"),
        }
    }

    #[test]
    fn pair_assignment_validates() {
        let b = identity(3);
        let pa = PairAssignment::new(&b, vec![0, 2, 1]).unwrap();
        assert_eq!(pa.flagged_count(), 1); // only (0,0) is an edge
        assert!(pa.is_flagged(0) && !pa.is_flagged(1));
        assert_eq!(pa.flagged_pairs(), vec![(0, 0)]);
        assert!(matches!(
            PairAssignment::new(&b, vec![0, 0, 1]),
            Err(MatchingError::DuplicateRight { right: 0 })
        ));
        assert!(matches!(
            PairAssignment::new(&b, vec![0, 1]),
            Err(MatchingError::WrongLength { len: 2, expected: 3 })
        ));
        let partial = PairAssignment::new(&b, vec![1, UNPAIRED, UNPAIRED]).unwrap();
        assert_eq!((partial.assigned_count(), partial.flagged_count()), (1, 0));
    }

    #[test]
    fn random_pairing_flags_extremes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let complete = BipartiteAdjacency::complete(7);
        let pa = random_pairing(&complete, &mut rng);
        assert_eq!(pa.flagged_count(), 7);
        let empty = BipartiteAdjacency::new(7);
        let pa = random_pairing(&empty, &mut rng);
        assert_eq!(pa.flagged_count(), 0);
        assert_eq!(pa.assigned_count(), 7); // still a full permutation
    }

    #[test]
    fn random_pairing_hits_expected_edge_count_on_regular_graphs() {
        // Circulant with every left (and right) degree exactly d: the
        // expected number of flagged pairs under a uniform permutation is d.
        let (m, d) = (20usize, 15usize);
        let mut b = BipartiteAdjacency::new(m);
        for l in 0..m {
            for off in 0..d {
                b.set_edge(l, (l + off) % m);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let trials = 1000;
        let total: usize = (0..trials).map(|_| random_pairing(&b, &mut rng).flagged_count()).sum();
        let mean = total as f64 / trials as f64;
        assert!((mean - d as f64).abs() <= 0.05 * m as f64, "mean {mean} strays from {d}");
    }

    #[test]
    fn trim_leaves_exact_graph_unchanged() {
        let b = identity(4);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = trim_to_exact_degree(&b, 1, &mut rng).unwrap();
        assert_eq!(t, b);
    }

    #[test]
    fn trim_complete_to_three() {
        let b = BipartiteAdjacency::complete(5);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let t = trim_to_exact_degree(&b, 3, &mut rng).unwrap();
        assert_eq!(t.left_degrees(), vec![3; 5]);
        assert!(b.contains(&t));
    }

    #[test]
    fn trim_reports_deficit() {
        let b = identity(4);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert!(matches!(
            trim_to_exact_degree(&b, 2, &mut rng),
            Err(MatchingError::DegreeDeficit { left: 0, degree: 1, needed: 2 })
        ));
    }

    #[test]
    fn reshuffle_releasing_everything_on_complete_graph() {
        let b = BipartiteAdjacency::complete(6);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let pa = random_pairing(&b, &mut rng); // all 6 pairs flagged
        let out = reshuffle(&b, &pa, 6, &mut rng).unwrap();
        assert!(out.success);
        assert_eq!(out.leftover_left, (0..6).collect::<Vec<_>>());
        assert_eq!(out.leftover_right, (0..6).collect::<Vec<_>>());
        assert!(out.kept_pairs.is_empty());
        assert!(out.final_matching.unwrap().is_perfect_matching_of(&b));
    }

    #[test]
    fn reshuffle_with_zero_budget_keeps_a_perfect_matching() {
        let b = identity(5);
        let pa = PairAssignment::new(&b, (0..5).collect()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let out = reshuffle(&b, &pa, 0, &mut rng).unwrap();
        assert!(out.success);
        assert!(out.leftover_left.is_empty() && out.leftover_right.is_empty());
        assert_eq!(out.kept_pairs.len(), 5);
        assert_eq!(out.final_matching.unwrap().pairs(), pa.pairs());
    }

    #[test]
    fn reshuffle_rejects_overdrawn_budget() {
        let b = identity(4);
        let pa = PairAssignment::new(&b, vec![0, 1, UNPAIRED, UNPAIRED]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        assert!(matches!(
            reshuffle(&b, &pa, 3, &mut rng),
            Err(MatchingError::InsufficientMatching { have: 2, need: 3 })
        ));
    }

    #[test]
    fn reshuffle_failure_on_starved_leftover_graph() {
        // 6×6: the assignment matches lefts 0..4 along the diagonal; lefts
        // 4, 5 and rights 4, 5 are unmatched. Rights 4 and 5 have no edges
        // at all, so every leftover graph is short two right vertices and
        // every reshuffle must fail, whatever the rng does.
        let mut b = BipartiteAdjacency::new(6);
        for l in 0..4 {
            b.set_edge(l, l);
        }
        b.set_edge(4, 0);
        b.set_edge(5, 0);
        b.set_edge(5, 1);
        let pa = PairAssignment::new(&b, vec![0, 1, 2, 3, UNPAIRED, UNPAIRED]).unwrap();
        assert_eq!(pa.flagged_count(), 4);
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let out = reshuffle(&b, &pa, 1, &mut rng).unwrap();
            assert!(!out.success, "seed {seed} cannot succeed: rights 4,5 are isolated");
            assert!(out.final_matching.is_none());
            assert_eq!(out.leftover_left.len(), 3);
            // Oracle: the leftover graph really has no perfect matching.
            let leftover = b.induced(&out.leftover_left, &out.leftover_right);
            assert!(!brute_has_perfect(&leftover));
        }
    }

    #[test]
    fn reshuffle_deterministic_selection_releases_lowest_lefts() {
        let b = BipartiteAdjacency::complete(5);
        let pa = PairAssignment::new(&b, vec![0, 1, 2, 3, 4]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let out =
            reshuffle_with_selection(&b, &pa, 2, &mut rng, PairSelection::FirstForTesting).unwrap();
        assert_eq!(out.leftover_left, vec![0, 1]);
        assert_eq!(out.leftover_right, vec![0, 1]);
        assert_eq!(out.kept_pairs, vec![(2, 2), (3, 3), (4, 4)]);
        assert!(out.success);
    }

    #[test]
    fn dump_uses_pair_syntax() {
        let b = identity(3);
        assert_eq!(b.dump(), "# bipartite adjacency m=3\npair 0 1: 0->0 1->1 2->2\n");
    }

    proptest! {
        /// Hopcroft–Karp agrees with the all-permutations oracle for m ≤ 7.
        #[test]
        fn max_matching_matches_brute_force(m in 0usize..=7, p in 0.05f64..0.95, seed in any::<u64>()) {
            let b = random_adjacency(m, p, seed);
            prop_assert_eq!(max_matching(&b).assigned_count(), brute_max_matching(&b));
        }

        /// The two outcomes are exclusive and each is sound.
        #[test]
        fn witness_is_sound(m in 1usize..=7, p in 0.05f64..0.95, seed in any::<u64>()) {
            let b = random_adjacency(m, p, seed);
            match perfect_matching_or_witness(&b) {
                MatchingOutcome::Perfect(mm) => {
                    prop_assert!(mm.is_perfect_matching_of(&b));
                    prop_assert!(brute_has_perfect(&b));
                }
                MatchingOutcome::Deficient(w) => {
                    prop_assert!(!w.right.is_empty());
                    prop_assert!(w.neighborhood(&b).len() < w.right.len());
                    prop_assert!(!brute_has_perfect(&b));
                }
            }
        }

        /// Trimming removes edges only, and hits the target degree exactly.
        #[test]
        fn trim_is_an_exact_subset(m in 1usize..12, d in 0usize..12, seed in any::<u64>()) {
            let b = random_adjacency(m, 0.7, seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
            match trim_to_exact_degree(&b, d, &mut rng) {
                Ok(t) => {
                    prop_assert!(b.contains(&t));
                    prop_assert_eq!(t.left_degrees(), vec![d; m]);
                }
                Err(MatchingError::DegreeDeficit { left, degree, needed }) => {
                    prop_assert_eq!(b.left_degree(left), degree);
                    prop_assert!(degree < needed);
                }
                Err(e) => return Err(TestCaseError::fail(format!("unexpected error {e:?}"))),
            }
        }

        /// Whenever a reshuffle succeeds, the assembled matching is perfect.
        #[test]
        fn reshuffle_success_yields_perfect_matching(
            m in 1usize..=9,
            p in 0.3f64..1.0,
            s_frac in 0.0f64..=1.0,
            seed in any::<u64>(),
        ) {
            let b = random_adjacency(m, p, seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed.rotate_left(17));
            let pa = random_pairing(&b, &mut rng);
            let s = ((pa.flagged_count() as f64) * s_frac) as usize;
            let out = reshuffle(&b, &pa, s, &mut rng).unwrap();
            prop_assert_eq!(out.leftover_left.len(), m - pa.flagged_count() + s);
            if out.success {
                let fm = out.final_matching.expect("success carries a matching");
                prop_assert!(fm.is_perfect_matching_of(&b));
                for (l, r) in out.kept_pairs {
                    prop_assert_eq!(fm.pairs()[l], r);
                }
            } else {
                prop_assert!(out.final_matching.is_none());
                let leftover = b.induced(&out.leftover_left, &out.leftover_right);
                prop_assert!(!brute_has_perfect(&leftover));
            }
        }
    }
}
