//! Instance generators: extremal lower-bound constructions and random
//! `[k, n, 1]`-graphs.
//!
//! * [`first_column_clique`] — the `[k, k−1, 1]`-graph whose index-0 vertices
//!   form a clique. Every independent transversal must spend its single
//!   index-0 vertex, and with only k−1 rows available a factor would need
//!   k ≥ n + 1 of them, so no factor exists: part size k−1 is too small for
//!   k parts.
//! * [`catlin`] — the `[k, k, 1]`-graph with identity matchings on the first
//!   k−2 indices and a swap on the last two. For odd k it has no factor even
//!   though n = k.
//! * [`latin_greedy_trap`] — the end-stage obstruction for the column-greedy
//!   solver at n = 2k−3: after k−1 stages, a row set F* and vertex set V*
//!   (k−1 of each) can exist where every vertex of V* conflicts with every
//!   row of F*, so V*'s neighbourhood in the stage bipartite graph has size
//!   only n − (k−1) = k−2 and Hall's condition fails. A companion generator
//!   ([`latin_greedy_trap_graph`]) emits the full graph plus the pinned
//!   (k−1)-stage history realizing that bipartite graph.
//! * [`random_knd1`] — independent uniform perfect matchings on every pair;
//!   the hard case, since removing edges only helps the solvers.

use rand::prelude::*;
use thiserror::Error;

use crate::matching::BipartiteAdjacency;
use crate::model::{PartialFactor, SparsePartiteGraph};

/// Errors from instance generators.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("the crossed-pair construction needs k ≥ 3, got {k}")]
    CatlinTooSmall { k: usize },
}

// ======================================================================
// Latin squares
// ======================================================================

/// A Latin square of order q: a q×q array whose rows and columns are all
/// permutations of {0, …, q−1}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatinSquare {
    q: usize,
    cells: Vec<usize>,
}

impl LatinSquare {
    /// The cyclic square L(a, b) = (a + b) mod q — the canonical choice
    /// wherever any Latin square would do.
    pub fn cyclic(q: usize) -> Self {
        assert!(q >= 1, "a Latin square needs positive order");
        let cells = (0..q).flat_map(|a| (0..q).map(move |b| (a + b) % q)).collect();
        LatinSquare { q, cells }
    }

    /// Order q.
    pub fn order(&self) -> usize {
        self.q
    }

    /// Cell (a, b).
    pub fn get(&self, a: usize, b: usize) -> usize {
        assert!(a < self.q && b < self.q, "cell ({a}, {b}) outside order-{} square", self.q);
        self.cells[a * self.q + b]
    }

    /// Checks the Latin property on both rows and columns.
    pub fn is_valid(&self) -> bool {
        fn line_ok(q: usize, line: impl Iterator<Item = usize>) -> bool {
            let mut seen = vec![false; q];
            let mut count = 0;
            for v in line {
                if v >= q || std::mem::replace(&mut seen[v], true) {
                    return false;
                }
                count += 1;
            }
            count == q
        }
        (0..self.q).all(|a| line_ok(self.q, (0..self.q).map(|b| self.get(a, b))))
            && (0..self.q).all(|b| line_ok(self.q, (0..self.q).map(|a| self.get(a, b))))
    }
}

// ======================================================================
// Lower-bound constructions
// ======================================================================

/// The `[k, k−1, 1]`-graph whose first-column vertices form a clique: for
/// every pair of parts, the single edge between the two index-0 vertices.
/// Has no factor, certifying that part size k−1 is not enough for k parts.
///
/// # Panics
/// If `k < 2`.
pub fn first_column_clique(k: usize) -> SparsePartiteGraph {
    assert!(k >= 2, "the clique construction needs k ≥ 2, got {k}");
    let mut g = SparsePartiteGraph::new(k, k - 1).expect("k ≥ 2 with n = k−1 ≥ 1 is valid");
    for i in 0..k {
        for j in (i + 1)..k {
            g.add_edge(i, 0, j, 0).expect("one edge per pair cannot violate the matching rule");
        }
    }
    g
}

/// The crossed-pair `[k, k, 1]`-graph: between every pair of parts, identity
/// edges on indices 0, …, k−3 plus the crossed edges (k−2, k−1) and
/// (k−1, k−2). Every pair induces a perfect matching. For odd k ≥ 3 this
/// graph has no factor, so part size k is still not always enough; for even
/// k the same edge rule is a useful negative control (a factor may exist),
/// which is why even orders build fine and only the CLI warns about them.
pub fn catlin(k: usize) -> Result<SparsePartiteGraph, ConstructionError> {
    if k < 3 {
        return Err(ConstructionError::CatlinTooSmall { k });
    }
    let mut g = SparsePartiteGraph::new(k, k).expect("k ≥ 3 square shape is valid");
    for i in 0..k {
        for j in (i + 1)..k {
            for t in 0..k - 2 {
                g.add_edge(i, t, j, t).expect("identity edges are a matching");
            }
            g.add_edge(i, k - 2, j, k - 1).expect("cross edge is fresh");
            g.add_edge(i, k - 1, j, k - 2).expect("cross edge is fresh");
        }
    }
    Ok(g)
}

/// The stage-k bipartite graph (left = the n rows built so far, right = the
/// last part) of the greedy trap at n = 2k−3, together with the Hall
/// violator W = V* (the first k−1 right vertices). Realized by building
/// [`latin_greedy_trap_graph`] and recording which row/vertex additions
/// stay independent; the first k−1 rows conflict with all of V*, so
/// |N(W)| = k−2 < |W|.
///
/// # Panics
/// If `k < 3`.
pub fn latin_greedy_trap(k: usize) -> (BipartiteAdjacency, Vec<usize>) {
    let (g, forced) = latin_greedy_trap_graph(k);
    let n = g.n();
    let last = g.k() - 1;
    let mut b = BipartiteAdjacency::new(n);
    for (row_idx, row) in forced.rows().iter().enumerate() {
        'rights: for v in 0..n {
            for (part, &pick) in row.iter().enumerate() {
                if g.has_edge(part, pick, last, v) {
                    continue 'rights;
                }
            }
            b.set_edge(row_idx, v);
        }
    }
    let witness: Vec<usize> = (0..k - 1).collect();
    debug_assert_eq!(
        b.neighborhood_of_rights(&witness).len(),
        k - 2,
        "trap must starve its witness down to k−2 neighbours"
    );
    (b, witness)
}

/// The full `[k, 2k−3, 1]`-graph behind [`latin_greedy_trap`], plus the
/// pinned (k−1)-stage history (row r picks vertex r in every earlier part).
///
/// Vertex v < k−1 of the last part conflicts with pinned row j < k−1 in
/// exactly one part, chosen by the cyclic Latin square as L(j, v); fixing
/// the part therefore fixes a distinct (row, vertex) matching, so the edge
/// rule respects the pairwise-matching invariant. The first k−1 parts have
/// no edges among themselves, which keeps the pinned history independent.
///
/// # Panics
/// If `k < 3`.
pub fn latin_greedy_trap_graph(k: usize) -> (SparsePartiteGraph, PartialFactor) {
    assert!(k >= 3, "the greedy trap needs k ≥ 3, got {k}");
    let n = 2 * k - 3;
    let q = k - 1;
    let square = LatinSquare::cyclic(q);
    let mut g = SparsePartiteGraph::new(k, n).expect("k ≥ 3, n = 2k−3 ≥ 3 is valid");
    for j in 0..q {
        for v in 0..q {
            g.add_edge(square.get(j, v), j, k - 1, v)
                .expect("Latin rows/columns keep per-part edges a matching");
        }
    }
    let forced = PartialFactor::new((0..n).map(|r| vec![r; k - 1]).collect())
        .expect("identity columns are permutations");
    (g, forced)
}

/// A random `[k, n, 1]`-graph: every pair of parts gets an independent,
/// uniformly random perfect matching.
///
/// # Panics
/// If `k < 2` or `n < 1`.
pub fn random_knd1(k: usize, n: usize, rng: &mut impl Rng) -> SparsePartiteGraph {
    let mut g = SparsePartiteGraph::new(k, n).expect("checked dimensions");
    let mut perm: Vec<usize> = (0..n).collect();
    for i in 0..k {
        for j in (i + 1)..k {
            perm.shuffle(rng);
            for (a, &b) in perm.iter().enumerate() {
                g.add_edge(i, a, j, b).expect("a permutation is a perfect matching");
            }
        }
    }
    g
}
