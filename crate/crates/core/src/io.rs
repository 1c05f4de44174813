//! Plain-text serialization of graphs, signal matrices, candidate pair
//! lists and recovered pair vectors.
//!
//! All formats are line-oriented UTF-8:
//! - lines starting with `#` are comments (writers accept caller-supplied
//!   comment lines, e.g. a manifest digest; readers skip them anywhere);
//! - the first content line of the tab-separated formats is the header
//!   `n=<count>` carrying the node count;
//! - floating-point values are written in shortest round-trip decimal form
//!   with a `.` separator, so write → read is lossless.
//!
//! Formats:
//! - **graph TSV** (`i<TAB>j<TAB>signed_weight`): one edge per line, sign
//!   recovered from the sign of the weight;
//! - **matrix CSV**: one node per row, one signal per column,
//!   comma-separated;
//! - **pair-list TSV** (`i<TAB>j`): a candidate edge set;
//! - **pair-vector TSV** (`i<TAB>j<TAB>lpos<TAB>lneg`): a recovered split
//!   pair, zero pairs omitted.
//!
//! Readers report malformed input as [`Error::Parse`] with the 1-based
//! line number; all lines (comments included) count.

use ndarray::Array2;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{Sign, SignedEdge, SignedGraph};
use crate::halfvec::{pair_iter, EdgeVector, LaplacianPairVec};
use crate::scalar::Scalar;
use crate::solver::fast::CandidateEdgeSet;

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn parse_err(path: &Path, line: usize, reason: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        reason: reason.into(),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(|e| io_err(path, e))?))
}

fn write_comments(out: &mut impl Write, path: &Path, comments: &[&str]) -> Result<()> {
    for c in comments {
        writeln!(out, "# {c}").map_err(|e| io_err(path, e))?;
    }
    Ok(())
}

/// Iterates content lines of a text file: `(1-based line number, text)`
/// with comments and blank lines skipped but counted.
fn content_lines(path: &Path) -> Result<Vec<(usize, String)>> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let mut lines = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| io_err(path, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        lines.push((idx + 1, trimmed.to_string()));
    }
    Ok(lines)
}

/// Parses the `n=<count>` header line.
fn parse_header(path: &Path, line: Option<&(usize, String)>) -> Result<usize> {
    let (no, text) = line.ok_or_else(|| parse_err(path, 1, "missing `n=<count>` header"))?;
    let value = text
        .strip_prefix("n=")
        .ok_or_else(|| parse_err(path, *no, format!("expected `n=<count>` header, found `{text}`")))?;
    value
        .parse::<usize>()
        .map_err(|_| parse_err(path, *no, format!("invalid node count `{value}`")))
}

fn parse_index(path: &Path, line: usize, field: &str, n: usize) -> Result<usize> {
    let idx = field
        .parse::<usize>()
        .map_err(|_| parse_err(path, line, format!("invalid node index `{field}`")))?;
    if idx >= n {
        return Err(parse_err(
            path,
            line,
            format!("node index {idx} out of range for n = {n}"),
        ));
    }
    Ok(idx)
}

fn parse_float(path: &Path, line: usize, field: &str) -> Result<f64> {
    field
        .parse::<f64>()
        .map_err(|_| parse_err(path, line, format!("invalid number `{field}`")))
}

// ---------------------------------------------------------------------------
// Graph TSV
// ---------------------------------------------------------------------------

/// Writes a signed graph as a TSV edge list: optional comments, the header
/// `n=<count>`, then one `i<TAB>j<TAB>signed_weight` line per edge.
pub fn write_graph_tsv<S: Scalar>(
    graph: &SignedGraph<S>,
    path: impl AsRef<Path>,
    comments: &[&str],
) -> Result<()> {
    let path = path.as_ref();
    let mut out = create(path)?;
    write_comments(&mut out, path, comments)?;
    writeln!(out, "n={}", graph.node_count()).map_err(|e| io_err(path, e))?;
    for e in graph.edges() {
        writeln!(out, "{}\t{}\t{}", e.i, e.j, e.signed_weight()).map_err(|e| io_err(path, e))?;
    }
    out.flush().map_err(|e| io_err(path, e))
}

/// Reads a signed graph from the TSV edge-list format of
/// [`write_graph_tsv`]. Edge signs come from the sign of the weight; zero
/// or non-finite weights, bad indices and duplicate pairs are parse errors.
pub fn read_graph_tsv<S: Scalar>(path: impl AsRef<Path>) -> Result<SignedGraph<S>> {
    let path = path.as_ref();
    let lines = content_lines(path)?;
    let n = parse_header(path, lines.first())?;
    let mut edges = Vec::with_capacity(lines.len().saturating_sub(1));
    let mut seen = std::collections::HashSet::new();
    for (no, text) in &lines[1..] {
        let fields: Vec<&str> = text.split('\t').collect();
        if fields.len() != 3 {
            return Err(parse_err(
                path,
                *no,
                format!("expected `i<TAB>j<TAB>signed_weight`, found {} field(s)", fields.len()),
            ));
        }
        let i = parse_index(path, *no, fields[0], n)?;
        let j = parse_index(path, *no, fields[1], n)?;
        if i == j {
            return Err(parse_err(path, *no, format!("self-loop on node {i}")));
        }
        let w = parse_float(path, *no, fields[2])?;
        if !w.is_finite() || w == 0.0 {
            return Err(parse_err(
                path,
                *no,
                format!("edge weight must be finite and nonzero, found `{}`", fields[2]),
            ));
        }
        let (lo, hi) = (i.min(j), i.max(j));
        if !seen.insert((lo, hi)) {
            return Err(parse_err(path, *no, format!("duplicate edge ({lo}, {hi})")));
        }
        let sign = if w > 0.0 { Sign::Positive } else { Sign::Negative };
        let edge = SignedEdge::new(lo, hi, S::from_f64_lossy(w.abs()), sign)
            .map_err(|e| parse_err(path, *no, e.to_string()))?;
        edges.push(edge);
    }
    SignedGraph::new(n, edges)
}

// ---------------------------------------------------------------------------
// Matrix CSV
// ---------------------------------------------------------------------------

/// Writes a signal matrix as delimited text: one node per row, one signal
/// per column, comma-separated with `.` decimals.
pub fn write_matrix_csv<S: Scalar>(
    x: &Array2<S>,
    path: impl AsRef<Path>,
    comments: &[&str],
) -> Result<()> {
    let path = path.as_ref();
    let mut out = create(path)?;
    write_comments(&mut out, path, comments)?;
    for row in x.rows() {
        let mut first = true;
        for v in row {
            if !first {
                write!(out, ",").map_err(|e| io_err(path, e))?;
            }
            write!(out, "{v}").map_err(|e| io_err(path, e))?;
            first = false;
        }
        writeln!(out).map_err(|e| io_err(path, e))?;
    }
    out.flush().map_err(|e| io_err(path, e))
}

/// Reads a signal matrix written by [`write_matrix_csv`]. Every row must
/// have the same number of columns; an input without any data rows is a
/// parse error.
pub fn read_matrix_csv<S: Scalar>(path: impl AsRef<Path>) -> Result<Array2<S>> {
    let path = path.as_ref();
    let lines = content_lines(path)?;
    if lines.is_empty() {
        return Err(parse_err(path, 1, "matrix has no data rows"));
    }
    let mut data: Vec<S> = Vec::new();
    let mut cols = None;
    for (no, text) in &lines {
        let fields: Vec<&str> = text.split(',').collect();
        match cols {
            None => cols = Some(fields.len()),
            Some(c) if c != fields.len() => {
                return Err(parse_err(
                    path,
                    *no,
                    format!("expected {c} column(s), found {}", fields.len()),
                ));
            }
            Some(_) => {}
        }
        for f in fields {
            data.push(S::from_f64_lossy(parse_float(path, *no, f.trim())?));
        }
    }
    let cols = cols.expect("at least one row parsed");
    let rows = lines.len();
    Array2::from_shape_vec((rows, cols), data).map_err(|_| {
        parse_err(path, 1, "row/column bookkeeping disagrees with cell count")
    })
}

// ---------------------------------------------------------------------------
// Candidate pair-list TSV
// ---------------------------------------------------------------------------

/// Writes a candidate edge set as a pair list: optional comments, the
/// header `n=<count>`, then one `i<TAB>j` line per unordered pair.
pub fn write_pairs_tsv(
    set: &CandidateEdgeSet,
    path: impl AsRef<Path>,
    comments: &[&str],
) -> Result<()> {
    let path = path.as_ref();
    let mut out = create(path)?;
    write_comments(&mut out, path, comments)?;
    writeln!(out, "n={}", set.node_count()).map_err(|e| io_err(path, e))?;
    for &(i, j) in set.pairs() {
        writeln!(out, "{i}\t{j}").map_err(|e| io_err(path, e))?;
    }
    out.flush().map_err(|e| io_err(path, e))
}

/// Reads a candidate edge set written by [`write_pairs_tsv`].
pub fn read_pairs_tsv(path: impl AsRef<Path>) -> Result<CandidateEdgeSet> {
    let path = path.as_ref();
    let lines = content_lines(path)?;
    let n = parse_header(path, lines.first())?;
    let mut pairs = Vec::with_capacity(lines.len().saturating_sub(1));
    for (no, text) in &lines[1..] {
        let fields: Vec<&str> = text.split('\t').collect();
        if fields.len() != 2 {
            return Err(parse_err(
                path,
                *no,
                format!("expected `i<TAB>j`, found {} field(s)", fields.len()),
            ));
        }
        let i = parse_index(path, *no, fields[0], n)?;
        let j = parse_index(path, *no, fields[1], n)?;
        if i == j {
            return Err(parse_err(path, *no, format!("self-pair on node {i}")));
        }
        pairs.push((i, j));
    }
    CandidateEdgeSet::from_pairs(n, pairs)
}

// ---------------------------------------------------------------------------
// Pair-vector TSV
// ---------------------------------------------------------------------------

/// Writes a recovered split pair: optional comments, the header
/// `n=<count>`, then one `i<TAB>j<TAB>lpos<TAB>lneg` line per pair where
/// either side is nonzero.
pub fn write_pair_vectors_tsv<S: Scalar>(
    pair: &LaplacianPairVec<S>,
    path: impl AsRef<Path>,
    comments: &[&str],
) -> Result<()> {
    let path = path.as_ref();
    let n = pair.node_count();
    let mut out = create(path)?;
    write_comments(&mut out, path, comments)?;
    writeln!(out, "n={n}").map_err(|e| io_err(path, e))?;
    for (e, (i, j)) in pair_iter(n).enumerate() {
        let p = pair.lpos.array()[e];
        let q = pair.lneg.array()[e];
        if p != S::zero() || q != S::zero() {
            writeln!(out, "{i}\t{j}\t{p}\t{q}").map_err(|e| io_err(path, e))?;
        }
    }
    out.flush().map_err(|e| io_err(path, e))
}

/// Reads a split pair written by [`write_pair_vectors_tsv`]; pairs absent
/// from the file are zero on both sides.
pub fn read_pair_vectors_tsv<S: Scalar>(path: impl AsRef<Path>) -> Result<LaplacianPairVec<S>> {
    let path = path.as_ref();
    let lines = content_lines(path)?;
    let n = parse_header(path, lines.first())?;
    let mut lpos = EdgeVector::zeros(n);
    let mut lneg = EdgeVector::zeros(n);
    let mut seen = std::collections::HashSet::new();
    for (no, text) in &lines[1..] {
        let fields: Vec<&str> = text.split('\t').collect();
        if fields.len() != 4 {
            return Err(parse_err(
                path,
                *no,
                format!("expected `i<TAB>j<TAB>lpos<TAB>lneg`, found {} field(s)", fields.len()),
            ));
        }
        let i = parse_index(path, *no, fields[0], n)?;
        let j = parse_index(path, *no, fields[1], n)?;
        if i >= j {
            return Err(parse_err(
                path,
                *no,
                format!("pairs must satisfy i < j, found ({i}, {j})"),
            ));
        }
        if !seen.insert((i, j)) {
            return Err(parse_err(path, *no, format!("duplicate pair ({i}, {j})")));
        }
        let p = parse_float(path, *no, fields[2])?;
        let q = parse_float(path, *no, fields[3])?;
        lpos.set(i, j, S::from_f64_lossy(p))
            .map_err(|e| parse_err(path, *no, e.to_string()))?;
        lneg.set(i, j, S::from_f64_lossy(q))
            .map_err(|e| parse_err(path, *no, e.to_string()))?;
    }
    LaplacianPairVec::new(lpos, lneg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use std::fs;

    fn tmp(name: &str) -> tempfile::TempDir {
        tempfile::Builder::new()
            .prefix(name)
            .tempdir()
            .expect("create temp dir")
    }

    fn sample_graph() -> SignedGraph<f64> {
        SignedGraph::new(
            4,
            vec![
                SignedEdge::new(0, 1, 1.5, Sign::Positive).unwrap(),
                SignedEdge::new(0, 3, 0.25, Sign::Negative).unwrap(),
                SignedEdge::new(2, 3, 1.0, Sign::Positive).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn graph_roundtrip_preserves_everything() {
        let dir = tmp("graph-roundtrip");
        let path = dir.path().join("graph.tsv");
        let g = sample_graph();
        write_graph_tsv(&g, &path, &["digest cafe1234"]).unwrap();
        let back: SignedGraph<f64> = read_graph_tsv(&path).unwrap();
        assert_eq!(back.node_count(), g.node_count());
        assert_eq!(back.edge_count(), g.edge_count());
        for (a, b) in back.edges().iter().zip(g.edges()) {
            assert_eq!((a.i, a.j, a.sign), (b.i, b.j, b.sign));
            assert_eq!(a.weight, b.weight);
        }
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# digest cafe1234\nn=4\n"));
        assert!(text.contains("0\t3\t-0.25"), "sign folded into weight: {text}");
    }

    #[test]
    fn graph_reader_reports_line_precise_errors() {
        let dir = tmp("graph-errors");
        let check = |name: &str, body: &str, needle: &str, line: usize| {
            let path = dir.path().join(name);
            fs::write(&path, body).unwrap();
            match read_graph_tsv::<f64>(&path) {
                Err(Error::Parse { line: l, reason, .. }) => {
                    assert_eq!(l, line, "line number for {name}: {reason}");
                    assert!(reason.contains(needle), "{name}: {reason}");
                }
                other => panic!("{name}: expected parse error, got {other:?}"),
            }
        };
        check("missing-header.tsv", "0\t1\t1.0\n", "header", 1);
        check("bad-count.tsv", "n=four\n", "node count", 1);
        check("bad-fields.tsv", "n=3\n0\t1\n", "field", 2);
        check("bad-index.tsv", "n=3\n0\t7\t1.0\n", "out of range", 2);
        check("self-loop.tsv", "n=3\n1\t1\t1.0\n", "self-loop", 2);
        check("zero-weight.tsv", "n=3\n0\t1\t0.0\n", "nonzero", 2);
        check("bad-weight.tsv", "n=3\n0\t1\tabc\n", "invalid number", 2);
        // The duplicate sits on line 4 because the comment line counts.
        check(
            "duplicate.tsv",
            "n=3\n0\t1\t1.0\n# interlude\n1\t0\t-2.0\n",
            "duplicate",
            4,
        );
    }

    #[test]
    fn graph_reader_accepts_comments_and_blanks_anywhere() {
        let dir = tmp("graph-comments");
        let path = dir.path().join("graph.tsv");
        fs::write(&path, "# top\n\nn=3\n# middle\n0\t2\t-1.0\n\n# tail\n").unwrap();
        let g: SignedGraph<f64> = read_graph_tsv(&path).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.edges()[0].sign, Sign::Negative);
    }

    #[test]
    fn missing_file_is_an_io_error() {
        let dir = tmp("missing");
        let path = dir.path().join("nope.tsv");
        assert!(matches!(
            read_graph_tsv::<f64>(&path),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn matrix_roundtrip_is_bitwise() {
        let dir = tmp("matrix-roundtrip");
        let path = dir.path().join("x.csv");
        let x = array![
            [0.1, -2.5e-17, 3.0],
            [f64::MIN_POSITIVE, 1.0 / 3.0, -0.0],
        ];
        write_matrix_csv(&x, &path, &[]).unwrap();
        let back: Array2<f64> = read_matrix_csv(&path).unwrap();
        assert_eq!(back.dim(), (2, 3));
        for (a, b) in back.iter().zip(x.iter()) {
            assert_eq!(a.to_bits(), b.to_bits(), "shortest decimal must roundtrip");
        }
    }

    #[test]
    fn matrix_reader_rejects_ragged_and_empty_inputs() {
        let dir = tmp("matrix-errors");
        let ragged = dir.path().join("ragged.csv");
        fs::write(&ragged, "1.0,2.0\n3.0\n").unwrap();
        match read_matrix_csv::<f64>(&ragged) {
            Err(Error::Parse { line, reason, .. }) => {
                assert_eq!(line, 2);
                assert!(reason.contains("column"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        let empty = dir.path().join("empty.csv");
        fs::write(&empty, "# only a comment\n").unwrap();
        assert!(read_matrix_csv::<f64>(&empty).is_err());
    }

    #[test]
    fn pair_list_roundtrip() {
        let dir = tmp("pairs-roundtrip");
        let path = dir.path().join("candidates.tsv");
        let set = CandidateEdgeSet::from_pairs(5, vec![(0, 1), (3, 2), (1, 4)]).unwrap();
        write_pairs_tsv(&set, &path, &["digest 99"]).unwrap();
        let back = read_pairs_tsv(&path).unwrap();
        assert_eq!(back.node_count(), 5);
        assert_eq!(back.pairs(), set.pairs());
    }

    #[test]
    fn pair_list_reader_rejects_malformed_rows() {
        let dir = tmp("pairs-errors");
        let path = dir.path().join("bad.tsv");
        fs::write(&path, "n=4\n0\t1\t9\n").unwrap();
        match read_pairs_tsv(&path) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn pair_vector_roundtrip_skips_zeros() {
        let dir = tmp("pairvec-roundtrip");
        let path = dir.path().join("pair.tsv");
        let mut lpos = EdgeVector::<f64>::zeros(4);
        let mut lneg = EdgeVector::<f64>::zeros(4);
        lpos.set(0, 1, -2.5).unwrap();
        lpos.set(1, 3, -1.5).unwrap();
        lneg.set(2, 3, -4.0).unwrap();
        let pair = LaplacianPairVec::new(lpos, lneg).unwrap();
        write_pair_vectors_tsv(&pair, &path, &[]).unwrap();

        let text = fs::read_to_string(&path).unwrap();
        // Header plus the three nonzero pairs; zero pairs are implicit.
        assert_eq!(text.lines().count(), 4);

        let back: LaplacianPairVec<f64> = read_pair_vectors_tsv(&path).unwrap();
        assert_eq!(back, pair);
    }

    #[test]
    fn pair_vector_reader_rejects_disorder_and_duplicates() {
        let dir = tmp("pairvec-errors");
        let swapped = dir.path().join("swapped.tsv");
        fs::write(&swapped, "n=3\n2\t1\t-1.0\t0.0\n").unwrap();
        match read_pair_vectors_tsv::<f64>(&swapped) {
            Err(Error::Parse { line, reason, .. }) => {
                assert_eq!(line, 2);
                assert!(reason.contains("i < j"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        let dup = dir.path().join("dup.tsv");
        fs::write(&dup, "n=3\n0\t1\t-1.0\t0.0\n0\t1\t-2.0\t0.0\n").unwrap();
        match read_pair_vectors_tsv::<f64>(&dup) {
            Err(Error::Parse { line, reason, .. }) => {
                assert_eq!(line, 3);
                assert!(reason.contains("duplicate"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn f32_reads_match_f32_writes() {
        let dir = tmp("f32");
        let path = dir.path().join("x.csv");
        let x = array![[0.1f32, 2.718_281_8], [-1.0e-7, 42.0]];
        write_matrix_csv(&x, &path, &[]).unwrap();
        let back: Array2<f32> = read_matrix_csv(&path).unwrap();
        for (a, b) in back.iter().zip(x.iter()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
