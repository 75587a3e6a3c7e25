use super::{Graph, WeightFunction};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Lines with their 1-based numbers, comments and blank lines removed.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let body = line.split('#').next().unwrap_or("").trim();
        (!body.is_empty()).then_some((i + 1, body))
    })
}

fn parse_usize(line: usize, tok: Option<&str>, what: &str) -> Result<usize> {
    let tok = tok.ok_or_else(|| Error::parse(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| Error::parse(line, format!("{what} `{tok}` is not a non-negative integer")))
}

/// Parses `n m` followed by `m` lines `u v` (0-based); `#` starts a comment.
pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| Error::parse(1, "empty graph file"))?;
    let mut tok = header.split_whitespace();
    let n = parse_usize(hline, tok.next(), "vertex count")?;
    let m = parse_usize(hline, tok.next(), "edge count")?;
    if tok.next().is_some() {
        return Err(Error::parse(hline, "header must be `n m`"));
    }
    let mut edges = Vec::with_capacity(m);
    for (line, body) in lines {
        let mut tok = body.split_whitespace();
        let u = parse_usize(line, tok.next(), "endpoint")?;
        let v = parse_usize(line, tok.next(), "endpoint")?;
        if tok.next().is_some() {
            return Err(Error::parse(line, "edge line must be `u v`"));
        }
        if u >= n || v >= n {
            return Err(Error::parse(line, format!("endpoint out of range for n = {n}")));
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(Error::parse(
            hline,
            format!("header announces {m} edges, found {}", edges.len()),
        ));
    }
    Graph::from_edges(n, edges)
}

/// Inverse of [`parse_graph`].
pub fn format_graph(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.m());
    for &(u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

/// One decimal per line, one line per vertex.
pub fn parse_weights<T: Scalar>(text: &str, n: usize) -> Result<WeightFunction<T>> {
    let mut values = Vec::with_capacity(n);
    let mut last = 0;
    for (line, body) in content_lines(text) {
        let x: f64 = body
            .parse()
            .map_err(|_| Error::parse(line, format!("weight `{body}` is not a number")))?;
        if !x.is_finite() || x < 0.0 {
            return Err(Error::parse(line, format!("weight {x} must be finite and non-negative")));
        }
        values.push(T::lit(x));
        last = line;
    }
    if values.len() != n {
        return Err(Error::parse(
            last.max(1),
            format!("expected {n} weights, found {}", values.len()),
        ));
    }
    WeightFunction::new(values)
}

pub fn format_weights<T: Scalar>(s: &WeightFunction<T>) -> String {
    s.values().iter().map(|x| format!("{x}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, Family};

    #[test]
    fn round_trip() {
        let g = generate(&Family::Grid2d { side: 3 }).unwrap();
        let text = format_graph(&g);
        assert_eq!(parse_graph(&text).unwrap(), g);
    }

    #[test]
    fn comments_and_errors() {
        let g = parse_graph("# path\n3 2\n0 1 # first\n\n1 2\n").unwrap();
        assert_eq!(g.m(), 2);
        let err = parse_graph("3 2\n0 1\n1 x\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        assert!(matches!(parse_graph("3 3\n0 1\n1 2\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_graph("3 1\n0 1\n"), Err(Error::Disconnected)));
    }

    #[test]
    fn weights() {
        let s = parse_weights::<f64>("1.5\n# skip\n2\n0\n", 3).unwrap();
        assert_eq!(s.values(), &[1.5, 2.0, 0.0]);
        assert!(parse_weights::<f64>("1\n-2\n", 2).is_err());
        assert!(parse_weights::<f64>("1\n", 2).is_err());
        assert_eq!(parse_weights::<f64>(&format_weights(&s), 3).unwrap(), s);
    }
}
