//! Core model: sparse partite graphs, transversals, and (partial) factors.
//!
//! A `[k, n, 1]`-graph is a k-partite graph with parts of size n in which the
//! bipartite graph induced by any pair of parts is a matching: every vertex
//! has at most one neighbour in each other part. Vertices are addressed as
//! `(part, index)` pairs, 0-based on both coordinates.
//!
//! A *transversal* picks one vertex from each of a prefix of parts; it is
//! *independent* when no two picked vertices are adjacent. A *t-partial
//! factor* is a set of n transversals of the first t parts that are pairwise
//! disjoint and cover all tn vertices — equivalently, each of the t columns
//! of the n×t pick matrix is a permutation of {0, …, n−1}. A full factor
//! (t = k) whose rows are all independent is a factor of independent
//! transversals: n disjoint independent transversals covering every vertex.

use serde::Serialize;
use thiserror::Error;

/// Sentinel in the per-pair index arrays: "no neighbour on this side".
const NO_NEIGHBOR: u32 = u32::MAX;

/// A transversal is just its picks: entry ℓ is the chosen vertex of part ℓ.
pub type Transversal = Vec<usize>;

/// Errors from constructing or validating model objects.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("invalid dimensions: k = {k}, n = {n} (need k ≥ 2, n ≥ 1)")]
    InvalidDimensions { k: usize, n: usize },
    #[error("part index {part} out of range (k = {k})")]
    PartOutOfRange { part: usize, k: usize },
    #[error("vertex index {index} out of range (n = {n})")]
    VertexOutOfRange { index: usize, n: usize },
    #[error("edge endpoints must lie in distinct parts (both in part {part})")]
    SamePart { part: usize },
    #[error(
        "matching violation: vertex ({part}, {index}) already has a neighbour \
         {existing} in part {other_part}, cannot also attach {requested}"
    )]
    MatchingViolation {
        part: usize,
        index: usize,
        other_part: usize,
        existing: usize,
        requested: usize,
    },
    #[error("prefix length {t} out of range (k = {k})")]
    PrefixOutOfRange { t: usize, k: usize },
    #[error("a partial factor needs at least one row and one covered part")]
    EmptyFactor,
    #[error("row {row} has length {len}, expected {expected}")]
    RaggedRow { row: usize, len: usize, expected: usize },
    #[error("column {part} of the partial factor is not a permutation of 0..{n}")]
    ColumnNotPermutation { part: usize, n: usize },
}

// ======================================================================
// SparsePartiteGraph
// ======================================================================

/// Matching between one unordered pair of parts, stored as index arrays with
/// a sentinel so neighbour lookup is O(1) in both directions.
#[derive(Debug, Clone, PartialEq, Eq)]
struct PairMatching {
    /// fwd[a] = neighbour of lower-part vertex a in the higher part.
    fwd: Vec<u32>,
    /// bwd[b] = neighbour of higher-part vertex b in the lower part.
    bwd: Vec<u32>,
}

impl PairMatching {
    fn empty(n: usize) -> Self {
        PairMatching { fwd: vec![NO_NEIGHBOR; n], bwd: vec![NO_NEIGHBOR; n] }
    }
}

/// A `[k, n, 1]`-graph: k parts of n vertices, every pair of parts inducing a
/// (possibly partial) matching.
///
/// The model deliberately accepts n < k: the lower-bound constructions need
/// degenerate shapes like `[k, k−1, 1]`, and it is the *algorithms* that may
/// fail there, not the data structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsePartiteGraph {
    k: usize,
    n: usize,
    /// Triangular array over unordered pairs {i, j}, i < j; see `pair_slot`.
    pairs: Vec<PairMatching>,
}

impl SparsePartiteGraph {
    /// Creates an edgeless graph with `k ≥ 2` parts of `n ≥ 1` vertices.
    pub fn new(k: usize, n: usize) -> Result<Self, ModelError> {
        if k < 2 || n < 1 || n >= NO_NEIGHBOR as usize {
            return Err(ModelError::InvalidDimensions { k, n });
        }
        Ok(Self::with_parts(k, n))
    }

    /// Internal constructor without the k ≥ 2 check: prefixes of length 1
    /// arise from `induced_prefix` and are trivially edgeless.
    fn with_parts(k: usize, n: usize) -> Self {
        let pair_count = k * (k.saturating_sub(1)) / 2;
        SparsePartiteGraph { k, n, pairs: vec![PairMatching::empty(n); pair_count] }
    }

    /// Number of parts.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Size of every part.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Position of unordered pair {i, j} (i < j) in the triangular array.
    fn pair_slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.k);
        i * (2 * self.k - i - 1) / 2 + (j - i - 1)
    }

    fn check_part(&self, part: usize) -> Result<(), ModelError> {
        if part >= self.k { Err(ModelError::PartOutOfRange { part, k: self.k }) } else { Ok(()) }
    }

    fn check_vertex(&self, index: usize) -> Result<(), ModelError> {
        if index >= self.n { Err(ModelError::VertexOutOfRange { index, n: self.n }) } else { Ok(()) }
    }

    /// Inserts the edge (i, a)–(j, b), keeping the pairwise-matching
    /// invariant. Re-inserting an existing edge is a no-op.
    pub fn add_edge(&mut self, i: usize, a: usize, j: usize, b: usize) -> Result<(), ModelError> {
        self.check_part(i)?;
        self.check_part(j)?;
        self.check_vertex(a)?;
        self.check_vertex(b)?;
        if i == j {
            return Err(ModelError::SamePart { part: i });
        }
        // Orient the pair so (lo, x) is the lower part.
        let (lo, x, hi, y) = if i < j { (i, a, j, b) } else { (j, b, i, a) };
        let slot = self.pair_slot(lo, hi);
        let pm = &self.pairs[slot];
        if pm.fwd[x] == y as u32 {
            return Ok(()); // idempotent duplicate
        }
        if pm.fwd[x] != NO_NEIGHBOR {
            return Err(ModelError::MatchingViolation {
                part: lo,
                index: x,
                other_part: hi,
                existing: pm.fwd[x] as usize,
                requested: y,
            });
        }
        if pm.bwd[y] != NO_NEIGHBOR {
            return Err(ModelError::MatchingViolation {
                part: hi,
                index: y,
                other_part: lo,
                existing: pm.bwd[y] as usize,
                requested: x,
            });
        }
        let pm = &mut self.pairs[slot];
        pm.fwd[x] = y as u32;
        pm.bwd[y] = x as u32;
        Ok(())
    }

    /// The unique neighbour of vertex `(i, a)` in part `j`, if any.
    ///
    /// # Panics
    /// If `i == j`, a part index is out of range, or `a ≥ n`.
    pub fn neighbor(&self, i: usize, a: usize, j: usize) -> Option<usize> {
        assert!(i != j && i < self.k && j < self.k, "neighbor: bad part pair ({i}, {j})");
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        let pm = &self.pairs[self.pair_slot(lo, hi)];
        let raw = if i < j { pm.fwd[a] } else { pm.bwd[a] };
        (raw != NO_NEIGHBOR).then_some(raw as usize)
    }

    /// Whether the edge (i, a)–(j, b) is present.
    pub fn has_edge(&self, i: usize, a: usize, j: usize, b: usize) -> bool {
        self.neighbor(i, a, j) == Some(b)
    }

    /// All edges between parts i < j as (a, b) pairs sorted by a.
    ///
    /// # Panics
    /// If `i ≥ j` or `j ≥ k`.
    pub fn pair_edges(&self, i: usize, j: usize) -> Vec<(usize, usize)> {
        assert!(i < j && j < self.k, "pair_edges wants i < j < k, got ({i}, {j})");
        let pm = &self.pairs[self.pair_slot(i, j)];
        (0..self.n).filter_map(|a| (pm.fwd[a] != NO_NEIGHBOR).then(|| (a, pm.fwd[a] as usize))).collect()
    }

    /// Total edge count over all pairs.
    pub fn edge_count(&self) -> usize {
        self.pairs
            .iter()
            .map(|pm| pm.fwd.iter().filter(|&&x| x != NO_NEIGHBOR).count())
            .sum()
    }

    /// True iff no two picked vertices are adjacent. `picks[ℓ]` is the chosen
    /// vertex of part ℓ; a prefix of parts (length ≤ k) is allowed.
    ///
    /// # Panics
    /// If `picks.len() > k` or any pick is ≥ n.
    pub fn is_independent_transversal(&self, picks: &[usize]) -> bool {
        assert!(picks.len() <= self.k, "transversal covers more parts than the graph has");
        for (l, &v) in picks.iter().enumerate() {
            assert!(v < self.n, "pick {v} out of range in part {l} (n = {})", self.n);
            for (l2, &w) in picks.iter().enumerate().skip(l + 1) {
                if self.neighbor(l, v, l2) == Some(w) {
                    return false;
                }
            }
        }
        true
    }

    /// True iff `f` is a full factor of independent transversals of this
    /// graph. Disjointness and coverage are structural in [`PartialFactor`];
    /// this checks independence of every row.
    ///
    /// # Panics
    /// If `f` does not match the graph's shape (t = k and n rows).
    pub fn is_factor(&self, f: &PartialFactor) -> bool {
        assert_eq!(f.t(), self.k, "is_factor needs a full factor (t = k)");
        assert_eq!(f.row_count(), self.n, "factor has wrong number of rows");
        f.rows().iter().all(|row| self.is_independent_transversal(row))
    }

    /// The subgraph induced by parts 0..t, with exactly the edges among them.
    pub fn induced_prefix(&self, t: usize) -> Result<SparsePartiteGraph, ModelError> {
        if t < 1 || t > self.k {
            return Err(ModelError::PrefixOutOfRange { t, k: self.k });
        }
        let mut out = SparsePartiteGraph::with_parts(t, self.n);
        for i in 0..t {
            for j in (i + 1)..t {
                let slot = out.pair_slot(i, j);
                out.pairs[slot] = self.pairs[self.pair_slot(i, j)].clone();
            }
        }
        Ok(out)
    }

    /// Structural self-check: every per-pair index array is a partial
    /// injection with both directions consistent. Cheap enough for tests.
    pub fn validate(&self) -> Result<(), ModelError> {
        for i in 0..self.k {
            for j in (i + 1)..self.k {
                let pm = &self.pairs[self.pair_slot(i, j)];
                for a in 0..self.n {
                    let y = pm.fwd[a];
                    if y != NO_NEIGHBOR {
                        if y as usize >= self.n {
                            return Err(ModelError::VertexOutOfRange { index: y as usize, n: self.n });
                        }
                        if pm.bwd[y as usize] != a as u32 {
                            return Err(ModelError::MatchingViolation {
                                part: i,
                                index: a,
                                other_part: j,
                                existing: pm.bwd[y as usize] as usize,
                                requested: a,
                            });
                        }
                    }
                }
                for b in 0..self.n {
                    let x = pm.bwd[b];
                    if x != NO_NEIGHBOR && pm.fwd[x as usize] != b as u32 {
                        return Err(ModelError::MatchingViolation {
                            part: j,
                            index: b,
                            other_part: i,
                            existing: pm.fwd[x as usize] as usize,
                            requested: b,
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

// ======================================================================
// PartialFactor
// ======================================================================

/// A t-partial factor of transversals: n rows of length t whose columns are
/// each a permutation of {0, …, n−1}.
///
/// The column-permutation invariant is exactly "rows are pairwise disjoint
/// and cover the first t parts"; it is enforced at construction and every
/// extension. Independence of the rows is a property of a *graph* and is
/// checked separately (`SparsePartiteGraph::is_factor`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartialFactor {
    t: usize,
    rows: Vec<Transversal>,
}

impl PartialFactor {
    /// Validates and wraps rows. Every row must have the same positive
    /// length, and each column must be a permutation of 0..rows.len().
    pub fn new(rows: Vec<Transversal>) -> Result<Self, ModelError> {
        let n = rows.len();
        if n == 0 {
            return Err(ModelError::EmptyFactor);
        }
        let t = rows[0].len();
        if t == 0 {
            return Err(ModelError::EmptyFactor);
        }
        for (j, row) in rows.iter().enumerate() {
            if row.len() != t {
                return Err(ModelError::RaggedRow { row: j, len: row.len(), expected: t });
            }
        }
        for l in 0..t {
            if !is_permutation(rows.iter().map(|r| r[l]), n) {
                return Err(ModelError::ColumnNotPermutation { part: l, n });
            }
        }
        Ok(PartialFactor { t, rows })
    }

    /// The trivial 1-partial factor: row j is vertex j of part 0.
    pub fn first_part(n: usize) -> Self {
        assert!(n >= 1, "a factor needs at least one row");
        PartialFactor { t: 1, rows: (0..n).map(|j| vec![j]).collect() }
    }

    /// Number of covered parts.
    pub fn t(&self) -> usize {
        self.t
    }

    /// Number of rows (= part size n).
    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    /// All rows, row j being the j-th transversal.
    pub fn rows(&self) -> &[Transversal] {
        &self.rows
    }

    /// One row.
    pub fn row(&self, j: usize) -> &[usize] {
        &self.rows[j]
    }

    /// Column ℓ (the picks of part ℓ across rows).
    pub fn column(&self, l: usize) -> Vec<usize> {
        assert!(l < self.t, "column {l} out of range (t = {})", self.t);
        self.rows.iter().map(|r| r[l]).collect()
    }

    /// Extends every row by one part: row j gains `next_picks[j]`. The new
    /// column must be a permutation, i.e. the extended rows stay disjoint.
    pub fn extended(&self, next_picks: &[usize]) -> Result<PartialFactor, ModelError> {
        let n = self.rows.len();
        if next_picks.len() != n {
            return Err(ModelError::RaggedRow { row: 0, len: next_picks.len(), expected: n });
        }
        if !is_permutation(next_picks.iter().copied(), n) {
            return Err(ModelError::ColumnNotPermutation { part: self.t, n });
        }
        let mut rows = self.rows.clone();
        for (row, &v) in rows.iter_mut().zip(next_picks) {
            row.push(v);
        }
        Ok(PartialFactor { t: self.t + 1, rows })
    }

    /// The n×t pick matrix, row-major (for serialization).
    pub fn as_matrix(&self) -> Vec<Vec<usize>> {
        self.rows.clone()
    }
}

fn is_permutation(values: impl Iterator<Item = usize>, n: usize) -> bool {
    let mut seen = vec![false; n];
    let mut count = 0usize;
    for v in values {
        if v >= n || seen[v] {
            return false;
        }
        seen[v] = true;
        count += 1;
    }
    count == n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn new_graph_smallest_legal_instance() {
        let g = SparsePartiteGraph::new(2, 1).unwrap();
        assert_eq!((g.k(), g.n(), g.edge_count()), (2, 1, 0));
        g.validate().unwrap();
    }

    #[test]
    fn new_graph_ambient_four_by_four() {
        let g = SparsePartiteGraph::new(4, 4).unwrap();
        assert_eq!((g.k(), g.n()), (4, 4));
    }

    #[test]
    fn new_graph_rejects_degenerate_dimensions() {
        assert!(matches!(
            SparsePartiteGraph::new(3, 0),
            Err(ModelError::InvalidDimensions { k: 3, n: 0 })
        ));
        assert!(matches!(SparsePartiteGraph::new(1, 5), Err(ModelError::InvalidDimensions { .. })));
    }

    #[test]
    fn add_edge_records_symmetrically() {
        let mut g = SparsePartiteGraph::new(2, 2).unwrap();
        g.add_edge(0, 0, 1, 0).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.neighbor(0, 0, 1), Some(0));
        assert_eq!(g.neighbor(1, 0, 0), Some(0));
        assert_eq!(g.neighbor(0, 1, 1), None);
        // Insertion order of the parts must not matter.
        let mut h = SparsePartiteGraph::new(2, 2).unwrap();
        h.add_edge(1, 0, 0, 0).unwrap();
        assert_eq!(g, h);
    }

    #[test]
    fn add_edge_enforces_matching_and_idempotence() {
        let mut g = SparsePartiteGraph::new(2, 2).unwrap();
        g.add_edge(0, 0, 1, 0).unwrap();
        g.add_edge(0, 0, 1, 0).unwrap(); // duplicate is fine
        assert_eq!(g.edge_count(), 1);
        let err = g.add_edge(0, 0, 1, 1).unwrap_err();
        assert!(matches!(err, ModelError::MatchingViolation { part: 0, index: 0, .. }));
        // Right-side degree is capped too.
        let err = g.add_edge(0, 1, 1, 0).unwrap_err();
        assert!(matches!(err, ModelError::MatchingViolation { part: 1, index: 0, .. }));
    }

    #[test]
    fn identity_pairings_from_one_anchor_part_coexist() {
        // One part matched identically to three others: a spanning forest of
        // matchings, no violation.
        let mut g = SparsePartiteGraph::new(4, 4).unwrap();
        for j in 1..4 {
            for v in 0..4 {
                g.add_edge(0, v, j, v).unwrap();
            }
        }
        assert_eq!(g.edge_count(), 12);
        g.validate().unwrap();
    }

    #[test]
    fn independent_transversal_on_edgeless_graph() {
        let g = SparsePartiteGraph::new(3, 3).unwrap();
        assert!(g.is_independent_transversal(&[0, 2, 1]));
        assert!(g.is_independent_transversal(&[1, 1])); // prefix is allowed
    }

    #[test]
    fn transversal_with_an_edge_is_dependent() {
        let mut g = SparsePartiteGraph::new(3, 2).unwrap();
        for i in 0..3 {
            for j in (i + 1)..3 {
                g.add_edge(i, 0, j, 0).unwrap();
            }
        }
        assert!(!g.is_independent_transversal(&[0, 0, 0]));
        assert!(g.is_independent_transversal(&[0, 1, 1]));
    }

    #[test]
    fn factor_of_edgeless_graph() {
        let g = SparsePartiteGraph::new(3, 3).unwrap();
        let f = PartialFactor::new((0..3).map(|j| vec![j, j, j]).collect()).unwrap();
        assert!(g.is_factor(&f));
    }

    #[test]
    fn induced_prefix_keeps_only_inner_edges() {
        let mut g = SparsePartiteGraph::new(5, 6).unwrap();
        for i in 0..5 {
            for j in (i + 1)..5 {
                g.add_edge(i, i, j, (i + j) % 6).unwrap();
            }
        }
        let h = g.induced_prefix(3).unwrap();
        assert_eq!((h.k(), h.n()), (3, 6));
        for i in 0..3 {
            for j in (i + 1)..3 {
                assert_eq!(h.pair_edges(i, j), g.pair_edges(i, j));
            }
        }
        // Edge count drops by exactly the edges touching parts 3 and 4.
        assert_eq!(h.edge_count(), 3);
        assert!(g.induced_prefix(5).unwrap() == g);
        assert!(matches!(g.induced_prefix(0), Err(ModelError::PrefixOutOfRange { .. })));
        assert!(matches!(g.induced_prefix(6), Err(ModelError::PrefixOutOfRange { .. })));
        // A 1-part prefix is legal and edgeless even though public
        // construction starts at k = 2.
        let p1 = g.induced_prefix(1).unwrap();
        assert_eq!((p1.k(), p1.edge_count()), (1, 0));
    }

    #[test]
    fn partial_factor_validates_columns() {
        assert!(PartialFactor::new(vec![]).is_err());
        assert!(PartialFactor::new(vec![vec![], vec![]]).is_err());
        let err = PartialFactor::new(vec![vec![0, 0], vec![1]]).unwrap_err();
        assert!(matches!(err, ModelError::RaggedRow { row: 1, .. }));
        // Column 1 repeats 0.
        let err = PartialFactor::new(vec![vec![0, 0], vec![1, 0]]).unwrap_err();
        assert!(matches!(err, ModelError::ColumnNotPermutation { part: 1, .. }));
        let f = PartialFactor::new(vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!((f.t(), f.row_count()), (2, 2));
        assert_eq!(f.column(1), vec![1, 0]);
    }

    #[test]
    fn first_part_and_extension() {
        let f = PartialFactor::first_part(3);
        assert_eq!((f.t(), f.row_count()), (1, 3));
        let f2 = f.extended(&[2, 0, 1]).unwrap();
        assert_eq!(f2.row(0), &[0, 2]);
        assert!(f.extended(&[0, 0, 1]).is_err());
        assert!(f.extended(&[0, 1]).is_err());
    }
}
