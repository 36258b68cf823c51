//! METIS graph files and KaHIP-style partition files.
//!
//! Graph files: the first non-comment line is `n m [fmt [ncon]]`, followed by
//! exactly `n` vertex lines. Line `i` lists the 1-based neighbors of vertex
//! `i`, preceded by its weight when `fmt` sets the vertex-weight digit and with
//! an edge weight after every neighbor when `fmt` sets the edge-weight digit.
//! Lines starting with `%` are comments. A self-loop is listed once, on its own
//! vertex line, and counts as one edge in `m`.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{DoublyWeightedGraph, Partition};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetisHeader {
    pub n: usize,
    pub m: usize,
    pub vertex_weights: bool,
    pub edge_weights: bool,
    pub ncon: usize,
}

impl MetisHeader {
    fn parse(line: &str, line_no: usize) -> Result<Self> {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() < 2 || fields.len() > 4 {
            return Err(Error::parse(line_no, "header must be `n m [fmt [ncon]]`"));
        }
        let n = parse_count(fields[0], line_no, "vertex count")?;
        let m = parse_count(fields[1], line_no, "edge count")?;
        if n == 0 {
            return Err(Error::parse(line_no, "vertex count must be positive"));
        }
        let fmt = fields.get(2).copied().unwrap_or("0");
        if fmt.len() > 3 || !fmt.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(Error::parse(line_no, format!("invalid fmt flag `{fmt}`")));
        }
        let padded = format!("{fmt:0>3}");
        let bits = padded.as_bytes();
        if bits[0] == b'1' {
            return Err(Error::parse(line_no, "vertex sizes (fmt 1xx) are not supported"));
        }
        let vertex_weights = bits[1] == b'1';
        let edge_weights = bits[2] == b'1';
        let ncon = match fields.get(3) {
            Some(s) => parse_count(s, line_no, "ncon")?,
            None => 1,
        };
        if ncon != 1 {
            return Err(Error::parse(line_no, "only a single vertex-weight constraint is supported"));
        }
        Ok(Self {
            n,
            m,
            vertex_weights,
            edge_weights,
            ncon,
        })
    }
}

fn parse_count(token: &str, line_no: usize, what: &str) -> Result<usize> {
    token
        .parse()
        .map_err(|_| Error::parse(line_no, format!("invalid {what} `{token}`")))
}

fn parse_weight(token: Option<&str>, line_no: usize, what: &str) -> Result<f64> {
    let token = token.ok_or_else(|| Error::parse(line_no, format!("missing {what}")))?;
    let w: f64 = token
        .parse()
        .map_err(|_| Error::parse(line_no, format!("invalid {what} `{token}`")))?;
    if !(w.is_finite() && w > 0.0) {
        return Err(Error::parse(line_no, format!("{what} must be positive, got `{token}`")));
    }
    Ok(w)
}

fn is_comment(line: &str) -> bool {
    line.trim_start().starts_with('%')
}

/// Parses a METIS graph. Files without vertex weights get `M = I`.
pub fn parse_metis<R: BufRead>(reader: R) -> Result<DoublyWeightedGraph> {
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (header_line, header) = loop {
        match lines.next() {
            Some((no, line)) => {
                let line = line?;
                if is_comment(&line) || line.trim().is_empty() {
                    continue;
                }
                break (no, MetisHeader::parse(&line, no)?);
            }
            None => return Err(Error::parse(0, "missing header line")),
        }
    };

    let n = header.n;
    let mut vertex_weights = vec![1.0; n];
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
    let mut row_lines = Vec::with_capacity(n);
    let mut last_line = header_line;

    while rows.len() < n {
        let Some((no, line)) = lines.next() else {
            return Err(Error::parse(
                last_line,
                format!("expected {n} vertex lines, found {}", rows.len()),
            ));
        };
        let line = line?;
        last_line = no;
        if is_comment(&line) {
            continue;
        }
        let v = rows.len();
        let mut tokens = line.split_whitespace();
        if header.vertex_weights {
            vertex_weights[v] = parse_weight(tokens.next(), no, "vertex weight")?;
        }
        let mut row = Vec::new();
        while let Some(tok) = tokens.next() {
            let id: usize = tok
                .parse()
                .map_err(|_| Error::parse(no, format!("invalid neighbor id `{tok}`")))?;
            if id == 0 || id > n {
                return Err(Error::parse(no, format!("neighbor id {id} out of range [1, {n}]")));
            }
            let w = if header.edge_weights {
                parse_weight(tokens.next(), no, "edge weight")?
            } else {
                1.0
            };
            row.push((id - 1, w));
        }
        row.sort_by_key(|&(u, _)| u);
        if let Some(pair) = row.windows(2).find(|p| p[0].0 == p[1].0) {
            return Err(Error::parse(no, format!("neighbor {} listed twice", pair[0].0 + 1)));
        }
        rows.push(row);
        row_lines.push(no);
    }

    for (no, line) in lines {
        let line = line?;
        if !is_comment(&line) && !line.trim().is_empty() {
            return Err(Error::parse(no, "unexpected data after the last vertex line"));
        }
    }

    let mut loops = 0;
    let mut off_diagonal = 0;
    for (v, row) in rows.iter().enumerate() {
        for &(u, w) in row {
            if u == v {
                loops += 1;
                continue;
            }
            off_diagonal += 1;
            match rows[u].binary_search_by_key(&v, |&(x, _)| x) {
                Ok(pos) if rows[u][pos].1 == w => {}
                Ok(pos) => {
                    return Err(Error::parse(
                        row_lines[v],
                        format!(
                            "edge ({}, {}) has weight {w} but the reverse entry has {}",
                            v + 1,
                            u + 1,
                            rows[u][pos].1
                        ),
                    ))
                }
                Err(_) => {
                    return Err(Error::parse(
                        row_lines[v],
                        format!("edge ({}, {}) is not listed by vertex {}", v + 1, u + 1, u + 1),
                    ))
                }
            }
        }
    }
    let stored = off_diagonal / 2 + loops;
    if stored != header.m {
        return Err(Error::parse(
            header_line,
            format!("header declares {} edges but the file lists {stored}", header.m),
        ));
    }

    let mut xadj = Vec::with_capacity(n + 1);
    let mut adjncy = Vec::with_capacity(off_diagonal + loops);
    let mut adjwgt = Vec::with_capacity(off_diagonal + loops);
    xadj.push(0);
    for row in rows {
        for (u, w) in row {
            adjncy.push(u);
            adjwgt.push(w);
        }
        xadj.push(adjncy.len());
    }
    DoublyWeightedGraph::from_csr(vertex_weights, xadj, adjncy, adjwgt)
}

pub fn read_metis_file(path: impl AsRef<Path>) -> Result<DoublyWeightedGraph> {
    let file = File::open(path)?;
    parse_metis(BufReader::new(file))
}

/// Writes `g` in METIS format. Weights are emitted only when some weight
/// differs from 1; values use the shortest representation that parses back
/// to the same `f64`.
pub fn emit_metis<W: Write>(g: &DoublyWeightedGraph, mut out: W) -> Result<()> {
    let vertex_weights = g.vertex_weights().iter().any(|&m| m != 1.0);
    let edge_weights = g.edges().any(|(_, _, w)| w != 1.0);
    if g.edges().any(|(_, _, w)| w <= 0.0) {
        return Err(Error::Unsupported("METIS cannot represent zero-weight edges".into()));
    }
    write!(out, "{} {}", g.n(), g.edge_count())?;
    match (vertex_weights, edge_weights) {
        (false, false) => writeln!(out)?,
        (false, true) => writeln!(out, " 1")?,
        (true, false) => writeln!(out, " 10")?,
        (true, true) => writeln!(out, " 11")?,
    }
    for v in 0..g.n() {
        let mut fields = Vec::with_capacity(2 * g.row_len(v) + 1);
        if vertex_weights {
            fields.push(g.vertex_weight(v).to_string());
        }
        for (u, w) in g.neighbors(v) {
            fields.push((u + 1).to_string());
            if edge_weights {
                fields.push(w.to_string());
            }
        }
        writeln!(out, "{}", fields.join(" "))?;
    }
    Ok(())
}

/// One 0-based block id per line.
pub fn write_partition<W: Write>(p: &Partition, mut out: W) -> std::io::Result<()> {
    for &b in p.assignment() {
        writeln!(out, "{b}")?;
    }
    Ok(())
}

/// Reads a partition file; `k` is one more than the largest block id.
pub fn read_partition<R: BufRead>(reader: R) -> Result<Partition> {
    let mut assignment = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let b: usize = t
            .parse()
            .map_err(|_| Error::parse(i + 1, format!("invalid block id `{t}`")))?;
        assignment.push(b);
    }
    let k = assignment.iter().max().map_or(1, |&m| m + 1);
    Partition::new_allow_empty(k, assignment)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn parse(s: &str) -> Result<DoublyWeightedGraph> {
        parse_metis(s.as_bytes())
    }

    #[test]
    fn minimal_unweighted_file() {
        let g = parse("3 2\n2\n1 3\n2\n").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.vertex_weights(), &[1.0; 3]);
        assert_eq!(g.edge_weight(0, 1), Some(1.0));
        assert_eq!(g.edge_weight(1, 2), Some(1.0));
        assert_eq!(g.edge_weight(0, 2), None);
    }

    #[test]
    fn edge_weighted_file() {
        let g = parse("3 2 1\n2 5\n1 5 3 7\n2 7\n").unwrap();
        assert_eq!(g.edge_weight(0, 1), Some(5.0));
        assert_eq!(g.edge_weight(2, 1), Some(7.0));
        assert_eq!(g.degrees(), &[5.0, 12.0, 7.0]);
    }

    #[test]
    fn vertex_weighted_file() {
        let g = parse("2 1 11\n3 2 4\n0.5 1 4\n").unwrap();
        assert_eq!(g.vertex_weights(), &[3.0, 0.5]);
        assert_eq!(g.edge_weight(0, 1), Some(4.0));
        let g = parse("2 1 10\n3 2\n2 1\n").unwrap();
        assert_eq!(g.vertex_weights(), &[3.0, 2.0]);
    }

    #[test]
    fn comments_and_trailing_whitespace() {
        let g = parse("% a comment\n3 2   \n% inner\n2  \n1 3\n2\n\n\n% tail\n").unwrap();
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn blank_vertex_lines_are_isolated_vertices() {
        let g = parse("3 1\n2\n1\n\n").unwrap();
        assert_eq!(g.row_len(2), 0);
    }

    #[test]
    fn self_loops_round_trip() {
        let g = parse("2 2 1\n1 3 2 1\n1 1\n").unwrap();
        assert_eq!(g.self_loop(0), 3.0);
        let mut buf = Vec::new();
        emit_metis(&g, &mut buf).unwrap();
        assert_eq!(parse(std::str::from_utf8(&buf).unwrap()).unwrap(), g);
    }

    fn parse_error_line(s: &str) -> usize {
        match parse(s) {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(parse_error_line("3 3\n2\n1 3\n2\n"), 1);
        assert_eq!(parse_error_line("3 2\n2\n1 4\n2\n"), 3);
        assert_eq!(parse_error_line("3 2\n2\n1 3\n\n"), 3);
        assert_eq!(parse_error_line("3 2 1\n2 5\n1 6 3 7\n2 7\n"), 2);
        assert_eq!(parse_error_line("3 2 1\n2 0\n1 0 3 7\n2 7\n"), 2);
        assert_eq!(parse_error_line("2 1\n2 2\n1\n"), 2);
        assert_eq!(parse_error_line("2 1 10\n-1 2\n1 1\n"), 2);
        assert_eq!(parse_error_line("3 2\n2\n1 3\n"), 3);
        assert_eq!(parse_error_line("2 1\n2\n1\n7\n"), 4);
        assert_eq!(parse_error_line("2 1 100\n2\n1\n"), 1);
        assert_eq!(parse_error_line("2 1\n2\n1 x\n"), 3);
    }

    #[test]
    fn partition_files() {
        let p = Partition::new(2, vec![0, 1, 1]).unwrap();
        let mut buf = Vec::new();
        write_partition(&p, &mut buf).unwrap();
        assert_eq!(buf, b"0\n1\n1\n");
        assert_eq!(read_partition(buf.as_slice()).unwrap(), p);

        let mut buf = Vec::new();
        write_partition(&Partition::trivial(2), &mut buf).unwrap();
        assert_eq!(buf, b"0\n0\n");
    }

    fn arb_graph() -> impl Strategy<Value = DoublyWeightedGraph> {
        (1usize..40).prop_flat_map(|n| {
            (
                proptest::collection::vec((0..n, 0..n, 1u32..1000, any::<bool>()), 0..3 * n),
                proptest::collection::vec(0.01f64..100.0, n),
                any::<bool>(),
            )
                .prop_map(move |(edges, weights, unit_m)| {
                    let edges = edges
                        .into_iter()
                        .map(|(i, j, w, unit)| (i, j, if unit { 1.0 } else { f64::from(w) / 7.0 }));
                    let g = DoublyWeightedGraph::from_edges(n, edges).unwrap();
                    if unit_m {
                        g
                    } else {
                        g.with_vertex_weights(weights).unwrap()
                    }
                })
        })
    }

    proptest! {
        #[test]
        fn parse_inverts_emit(g in arb_graph()) {
            let mut buf = Vec::new();
            emit_metis(&g, &mut buf).unwrap();
            let back = parse(std::str::from_utf8(&buf).unwrap()).unwrap();
            prop_assert_eq!(back, g);
        }
    }
}
