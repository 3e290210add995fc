//! Reading and writing instances.
//!
//! Two structurally identical renderings of a [`SparsePartiteGraph`]:
//!
//! * a line-oriented text format —
//!   ```text
//!   knd1 v1 k=4 n=4 base=0
//!   # comments and blank lines are ignored
//!   pair 0 1: 0->0 1->1 2->2 3->3
//!   pair 2 3: 0->2 1->3
//!   ```
//!   one line per nonempty pair with `i < j`, the header recording that
//!   indices are 0-based;
//! * a JSON form `{"k":…,"n":…,"pairs":[{"i":…,"j":…,"edges":[[a,b],…]},…]}`.
//!
//! Serialization is canonical (pairs lexicographic, edges sorted by source
//! index), so `parse ∘ serialize` and `serialize ∘ parse` are both
//! identities on valid input. Parsing reports the line (text) or pair entry
//! (JSON) of the first violation, including matching violations.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ModelError, SparsePartiteGraph};

/// Errors from parsing or file IO.
#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Graph { line: usize, source: ModelError },
    #[error("pairs[{entry}]: {source}")]
    JsonGraph { entry: usize, source: ModelError },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Canonical text rendering: header, then nonempty pairs in lexicographic
/// order with edges sorted by source index.
pub fn to_text(g: &SparsePartiteGraph) -> String {
    let mut out = String::new();
    writeln!(out, "knd1 v1 k={} n={} base=0", g.k(), g.n()).unwrap();
    for i in 0..g.k() {
        for j in (i + 1)..g.k() {
            let edges = g.pair_edges(i, j);
            if edges.is_empty() {
                continue;
            }
            write!(out, "pair {i} {j}:").unwrap();
            for (a, b) in edges {
                write!(out, " {a}->{b}").unwrap();
            }
            out.push('\n');
        }
    }
    out
}

/// Parses the text format. Blank lines and `#` comments are ignored; the
/// first significant line must be the header.
pub fn parse_text(text: &str) -> Result<SparsePartiteGraph, FormatError> {
    let syntax = |line: usize, message: String| FormatError::Syntax { line, message };
    let mut graph: Option<SparsePartiteGraph> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        match &mut graph {
            None => {
                // Header: knd1 v1 k=<k> n=<n> base=0
                if tokens.next() != Some("knd1") {
                    return Err(syntax(line, "expected header starting with 'knd1'".into()));
                }
                if tokens.next() != Some("v1") {
                    return Err(syntax(line, "unsupported format version (expected 'v1')".into()));
                }
                let k = parse_field(tokens.next(), "k", line)?;
                let n = parse_field(tokens.next(), "n", line)?;
                let base: usize = parse_field(tokens.next(), "base", line)?;
                if base != 0 {
                    return Err(syntax(line, format!("field 'base': only base=0 is supported, got {base}")));
                }
                if let Some(extra) = tokens.next() {
                    return Err(syntax(line, format!("unexpected trailing token '{extra}' in header")));
                }
                graph = Some(
                    SparsePartiteGraph::new(k, n)
                        .map_err(|source| FormatError::Graph { line, source })?,
                );
            }
            Some(g) => {
                if tokens.next() != Some("pair") {
                    return Err(syntax(line, "expected a 'pair <i> <j>: ...' line".into()));
                }
                let i: usize = parse_plain(tokens.next(), "i", line)?;
                let j_tok = tokens
                    .next()
                    .ok_or_else(|| syntax(line, "field 'j': missing".into()))?;
                let j_tok = j_tok
                    .strip_suffix(':')
                    .ok_or_else(|| syntax(line, "field 'j': expected trailing ':'".into()))?;
                let j: usize = j_tok
                    .parse()
                    .map_err(|_| syntax(line, format!("field 'j': not a number: '{j_tok}'")))?;
                if i >= j {
                    return Err(syntax(line, format!("pair must have i < j, got {i} {j}")));
                }
                for tok in tokens {
                    let (a, b) = tok
                        .split_once("->")
                        .ok_or_else(|| syntax(line, format!("edge token '{tok}': expected 'a->b'")))?;
                    let a: usize = a
                        .parse()
                        .map_err(|_| syntax(line, format!("edge token '{tok}': bad source index")))?;
                    let b: usize = b
                        .parse()
                        .map_err(|_| syntax(line, format!("edge token '{tok}': bad target index")))?;
                    g.add_edge(i, a, j, b)
                        .map_err(|source| FormatError::Graph { line, source })?;
                }
            }
        }
    }
    graph.ok_or_else(|| FormatError::Syntax { line: 0, message: "empty input: missing header".into() })
}

fn parse_field(tok: Option<&str>, name: &str, line: usize) -> Result<usize, FormatError> {
    let syntax = |message: String| FormatError::Syntax { line, message };
    let tok = tok.ok_or_else(|| syntax(format!("field '{name}': missing")))?;
    let value = tok
        .strip_prefix(name)
        .and_then(|rest| rest.strip_prefix('='))
        .ok_or_else(|| syntax(format!("field '{name}': expected '{name}=<value>', got '{tok}'")))?;
    value.parse().map_err(|_| syntax(format!("field '{name}': not a number: '{value}'")))
}

fn parse_plain(tok: Option<&str>, name: &str, line: usize) -> Result<usize, FormatError> {
    let syntax = |message: String| FormatError::Syntax { line, message };
    let tok = tok.ok_or_else(|| syntax(format!("field '{name}': missing")))?;
    tok.parse().map_err(|_| syntax(format!("field '{name}': not a number: '{tok}'")))
}

#[derive(Debug, Serialize, Deserialize)]
struct GraphDoc {
    k: usize,
    n: usize,
    pairs: Vec<PairDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
struct PairDoc {
    i: usize,
    j: usize,
    edges: Vec<(usize, usize)>,
}

/// Canonical JSON rendering (same ordering as the text form).
pub fn to_json(g: &SparsePartiteGraph) -> String {
    let doc = GraphDoc {
        k: g.k(),
        n: g.n(),
        pairs: (0..g.k())
            .flat_map(|i| ((i + 1)..g.k()).map(move |j| (i, j)))
            .filter_map(|(i, j)| {
                let edges = g.pair_edges(i, j);
                (!edges.is_empty()).then_some(PairDoc { i, j, edges })
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("graph doc always serializes");
    s.push('\n');
    s
}

/// Parses the JSON form.
pub fn parse_json(text: &str) -> Result<SparsePartiteGraph, FormatError> {
    let doc: GraphDoc = serde_json::from_str(text)?;
    let mut g = SparsePartiteGraph::new(doc.k, doc.n)
        .map_err(|source| FormatError::JsonGraph { entry: 0, source })?;
    for (entry, pair) in doc.pairs.iter().enumerate() {
        let wrap = |source| FormatError::JsonGraph { entry, source };
        if pair.i >= pair.j {
            return Err(wrap(ModelError::SamePart { part: pair.i }));
        }
        for &(a, b) in &pair.edges {
            g.add_edge(pair.i, a, pair.j, b).map_err(wrap)?;
        }
    }
    Ok(g)
}

/// Reads a graph from a file, dispatching on extension: `.json` selects the
/// JSON form, anything else the text form.
pub fn read_graph_file(path: impl AsRef<Path>) -> Result<SparsePartiteGraph, FormatError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    if has_json_extension(path) { parse_json(&text) } else { parse_text(&text) }
}

/// Writes a graph to a file, dispatching on extension like
/// [`read_graph_file`].
pub fn write_graph_file(path: impl AsRef<Path>, g: &SparsePartiteGraph) -> Result<(), FormatError> {
    let path = path.as_ref();
    let text = if has_json_extension(path) { to_json(g) } else { to_text(g) };
    std::fs::write(path, text)?;
    Ok(())
}

fn has_json_extension(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    /// Triangle across three parts of size 2, all at index 0.
    fn triangle_graph() -> SparsePartiteGraph {
        let mut g = SparsePartiteGraph::new(3, 2).unwrap();
        for i in 0..3 {
            for j in (i + 1)..3 {
                g.add_edge(i, 0, j, 0).unwrap();
            }
        }
        g
    }

    #[test]
    fn text_form_is_canonical() {
        let expected = "knd1 v1 k=3 n=2 base=0\n\
                        pair 0 1: 0->0\n\
                        pair 0 2: 0->0\n\
                        pair 1 2: 0->0\n";
        assert_eq!(to_text(&triangle_graph()), expected);
    }

    #[test]
    fn parse_accepts_comments_blanks_and_unsorted_input() {
        let text = "# instance with scrambled pair order\n\
                    knd1 v1 k=3 n=2 base=0\n\
                    \n\
                    pair 1 2: 0->0\n\
                    pair 0 2: 0->0   # inline comment\n\
                    pair 0 1: 0->0\n";
        let g = parse_text(text).unwrap();
        assert_eq!(g, triangle_graph());
        // Re-serializing canonicalizes.
        assert_eq!(to_text(&g), to_text(&triangle_graph()));
    }

    #[test]
    fn empty_edge_file_parses_to_edgeless_graph() {
        let g = parse_text("knd1 v1 k=2 n=2 base=0\n").unwrap();
        assert_eq!((g.k(), g.n(), g.edge_count()), (2, 2, 0));
    }

    #[test]
    fn repeated_left_endpoint_is_a_matching_violation_with_line() {
        let text = "knd1 v1 k=2 n=3 base=0\npair 0 1: 0->0 0->1\n";
        match parse_text(text).unwrap_err() {
            FormatError::Graph { line: 2, source: ModelError::MatchingViolation { .. } } => {}
            other => panic!("expected a matching violation on line 2, got {other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_line_and_field() {
        let cases: &[(&str, &str)] = &[
            ("", "missing header"),
            ("knd1 v2 k=2 n=2 base=0\n", "version"),
            ("knd1 v1 k=x n=2 base=0\n", "field 'k'"),
            ("knd1 v1 k=2 n=2 base=1\n", "base=0"),
            ("knd1 v1 k=2 n=2 base=0\nedge 0 1\n", "pair"),
            ("knd1 v1 k=2 n=2 base=0\npair 0 1 0->0\n", "':'"),
            ("knd1 v1 k=2 n=2 base=0\npair 1 0: 0->0\n", "i < j"),
            ("knd1 v1 k=2 n=2 base=0\npair 0 1: 0=>0\n", "a->b"),
        ];
        for (text, needle) in cases {
            let err = parse_text(text).unwrap_err();
            let msg = err.to_string();
            assert!(msg.contains(needle), "error {msg:?} should mention {needle:?}");
        }
    }

    #[test]
    fn out_of_range_vertex_reports_model_error() {
        let err = parse_text("knd1 v1 k=2 n=2 base=0\npair 0 1: 2->0\n").unwrap_err();
        assert!(matches!(
            err,
            FormatError::Graph { line: 2, source: ModelError::VertexOutOfRange { index: 2, n: 2 } }
        ));
    }

    #[test]
    fn json_round_trip_and_error_context() {
        let g = triangle_graph();
        let s = to_json(&g);
        assert_eq!(parse_json(&s).unwrap(), g);
        // Known rendering of the first pair object.
        assert!(s.contains("\"edges\": [\n        [\n          0,\n          0\n        ]\n      ]"));

        let bad = r#"{"k":2,"n":3,"pairs":[{"i":0,"j":1,"edges":[[0,0],[0,1]]}]}"#;
        match parse_json(bad).unwrap_err() {
            FormatError::JsonGraph { entry: 0, source: ModelError::MatchingViolation { .. } } => {}
            other => panic!("expected pair-entry matching violation, got {other:?}"),
        }
        assert!(matches!(parse_json("{"), Err(FormatError::Json(_))));
    }

    #[test]
    fn file_dispatch_by_extension() {
        let dir = tempfile::tempdir().unwrap();
        let g = triangle_graph();
        let text_path = dir.path().join("g.knd1");
        let json_path = dir.path().join("g.json");
        write_graph_file(&text_path, &g).unwrap();
        write_graph_file(&json_path, &g).unwrap();
        assert_eq!(std::fs::read_to_string(&text_path).unwrap(), to_text(&g));
        assert_eq!(std::fs::read_to_string(&json_path).unwrap(), to_json(&g));
        assert_eq!(read_graph_file(&text_path).unwrap(), g);
        assert_eq!(read_graph_file(&json_path).unwrap(), g);
    }

    /// Random graph whose pair matchings are random partial injections.
    fn random_partial_graph(k: usize, n: usize, seed: u64) -> SparsePartiteGraph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = SparsePartiteGraph::new(k, n).unwrap();
        let mut targets: Vec<usize> = (0..n).collect();
        for i in 0..k {
            for j in (i + 1)..k {
                targets.shuffle(&mut rng);
                for a in 0..n {
                    if rng.random_bool(0.5) {
                        g.add_edge(i, a, j, targets[a]).unwrap();
                    }
                }
            }
        }
        g
    }

    proptest! {
        #[test]
        fn text_round_trip(k in 2usize..6, n in 1usize..9, seed in any::<u64>()) {
            let g = random_partial_graph(k, n, seed);
            let s = to_text(&g);
            let h = parse_text(&s).unwrap();
            prop_assert_eq!(&h, &g);
            prop_assert_eq!(to_text(&h), s);
        }

        #[test]
        fn json_round_trip(k in 2usize..6, n in 1usize..9, seed in any::<u64>()) {
            let g = random_partial_graph(k, n, seed);
            let s = to_json(&g);
            let h = parse_json(&s).unwrap();
            prop_assert_eq!(&h, &g);
            prop_assert_eq!(to_json(&h), s);
        }
    }
}
