//! Plain-text matrix files.
//!
//! ```text
//! # optional comments
//! 2 2
//! 0 0
//! 0 1
//! ```
//!
//! The header is `n q` for a square matrix or `r n q` for an `r × n` one;
//! lines starting with `#` and blank lines are ignored.

use crate::error::{Error, Result};
use crate::matrix::LogMatrix;

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push(Token {
                    text: &line[s..i],
                    column: line[..s].chars().count() + 1,
                });
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: &line[s..],
            column: line[..s].chars().count() + 1,
        });
    }
    out
}

fn number(tok: &Token<'_>, line: usize, what: &str) -> Result<u32> {
    tok.text
        .parse::<u32>()
        .map_err(|_| Error::parse(line, tok.column, format!("expected {what}, found `{}`", tok.text)))
}

pub fn parse_matrix(text: &str) -> Result<LogMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let Some((hline, header)) = lines.next() else {
        return Err(Error::parse(1, 1, "missing header"));
    };
    let head = tokens(header);
    let (rows, n, q) = match head.as_slice() {
        [n, q] => {
            let n = number(n, hline, "order n")? as usize;
            (n, n, q)
        }
        [r, n, q] => (
            number(r, hline, "row count r")? as usize,
            number(n, hline, "order n")? as usize,
            q,
        ),
        _ => {
            return Err(Error::parse(
                hline,
                1,
                "header must be `n q` or `r n q`",
            ))
        }
    };
    let qval = number(q, hline, "modulus q")?;
    if !(2..=255).contains(&qval) {
        return Err(Error::parse(hline, q.column, format!("modulus {qval} outside 2..=255")));
    }
    if n == 0 {
        return Err(Error::parse(hline, 1, "order must be positive"));
    }
    if rows == 0 {
        return Err(Error::parse(hline, 1, "row count must be positive"));
    }
    let mut data = Vec::with_capacity(rows * n);
    let mut last_line = hline;
    for k in 0..rows {
        let Some((lno, line)) = lines.next() else {
            return Err(Error::parse(
                last_line + 1,
                1,
                format!("expected {rows} rows, found {k}"),
            ));
        };
        last_line = lno;
        let toks = tokens(line);
        if toks.len() != n {
            let column = toks.get(n).map_or(line.chars().count() + 1, |t| t.column);
            return Err(Error::parse(
                lno,
                column,
                format!("expected {n} entries, found {}", toks.len()),
            ));
        }
        for t in &toks {
            let v = number(t, lno, "residue")?;
            if v >= qval {
                return Err(Error::parse(
                    lno,
                    t.column,
                    format!("residue out of range: {v} is not below {qval}"),
                ));
            }
            data.push(v as u8);
        }
    }
    if let Some((lno, _)) = lines.next() {
        return Err(Error::parse(lno, 1, format!("unexpected line after {rows} rows")));
    }
    let rows_vec = data.chunks(n).map(<[u8]>::to_vec).collect::<Vec<_>>();
    LogMatrix::new(qval, rows_vec)
}

pub fn write_matrix(m: &LogMatrix) -> String {
    let mut out = if m.is_square() {
        format!("{} {}\n", m.ncols(), m.q())
    } else {
        format!("{} {} {}\n", m.nrows(), m.ncols(), m.q())
    };
    for row in m.rows() {
        let line: Vec<String> = row.iter().map(u8::to_string).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples() {
        let m = parse_matrix("2 2\n0 0\n0 1\n").unwrap();
        assert_eq!(m, LogMatrix::new(2, vec![vec![0, 0], vec![0, 1]]).unwrap());
        let c = parse_matrix("# comment\n\n2 2\n# inside\n0 0\n0 1").unwrap();
        assert_eq!(c, m);
        let r = parse_matrix("1 3 3\n0 1 2\n").unwrap();
        assert_eq!((r.nrows(), r.ncols()), (1, 3));
    }

    #[test]
    fn diagnostics() {
        let e = parse_matrix("2 2\n0 2\n0 1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, column: 3, .. }), "{e}");
        assert!(e.to_string().contains("residue out of range"));
        assert!(matches!(
            parse_matrix("2 2\n0 0\n").unwrap_err(),
            Error::Parse { line: 3, .. }
        ));
        assert!(matches!(
            parse_matrix("2 2\n0 0 0\n0 1\n").unwrap_err(),
            Error::Parse { line: 2, column: 5, .. }
        ));
        assert!(matches!(
            parse_matrix("x 2\n").unwrap_err(),
            Error::Parse { line: 1, column: 1, .. }
        ));
        assert!(matches!(
            parse_matrix("2 2\n0 0\n0 1\n1 1\n").unwrap_err(),
            Error::Parse { line: 4, .. }
        ));
        assert!(parse_matrix("").is_err());
    }

    #[test]
    fn write_examples() {
        let m = LogMatrix::fourier(3).unwrap();
        assert_eq!(write_matrix(&m), "3 3\n0 0 0\n0 1 2\n0 2 1\n");
        let r = LogMatrix::new(4, vec![vec![0, 1, 2]]).unwrap();
        assert_eq!(write_matrix(&r), "1 3 4\n0 1 2\n");
        assert_eq!(parse_matrix(&write_matrix(&r)).unwrap(), r);
    }
}
