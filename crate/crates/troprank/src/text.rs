//! Matrix text format: line 1 holds `m n`, then m lines of n whitespace
//! separated tokens. A token is a signed decimal integer, a `p/q` rational,
//! or `inf` for +∞. Writers emit lowest-terms rationals and `inf`.

use crate::error::{Error, Result};
use crate::matrix::TropMatrix;
use crate::value::parse_token;

/// Parse a matrix from its text form. Errors carry 1-based line and token
/// positions.
pub fn parse_matrix(input: &str) -> Result<TropMatrix> {
    let mut lines = input.lines().enumerate();
    let (header_no, header) = loop {
        match lines.next() {
            Some((no, line)) if !line.trim().is_empty() => break (no, line),
            Some(_) => continue,
            None => {
                return Err(Error::Parse { line: 1, column: 1, detail: "empty input, expected `m n` header".into() })
            }
        }
    };
    let dims: Vec<&str> = header.split_whitespace().collect();
    if dims.len() != 2 {
        return Err(Error::Parse {
            line: header_no + 1,
            column: 1,
            detail: format!("expected header `m n`, got {header:?}"),
        });
    }
    let m: usize = dims[0].parse().map_err(|_| Error::Parse {
        line: header_no + 1,
        column: 1,
        detail: format!("bad row count {:?}", dims[0]),
    })?;
    let n: usize = dims[1].parse().map_err(|_| Error::Parse {
        line: header_no + 1,
        column: 2,
        detail: format!("bad column count {:?}", dims[1]),
    })?;
    if m == 0 || n == 0 {
        return Err(Error::Parse {
            line: header_no + 1,
            column: 1,
            detail: "matrix dimensions must be positive".into(),
        });
    }
    let mut entries = Vec::with_capacity(m * n);
    let mut filled_rows = 0usize;
    for (no, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        if filled_rows == m {
            return Err(Error::Parse {
                line: no + 1,
                column: 1,
                detail: format!("unexpected extra row, matrix has {m} rows"),
            });
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != n {
            return Err(Error::Parse {
                line: no + 1,
                column: toks.len().min(n) + 1,
                detail: format!("expected {n} entries, found {}", toks.len()),
            });
        }
        for (col, tok) in toks.iter().enumerate() {
            let v = parse_token(tok).map_err(|detail| Error::Parse { line: no + 1, column: col + 1, detail })?;
            entries.push(v);
        }
        filled_rows += 1;
    }
    if filled_rows != m {
        return Err(Error::Parse {
            line: header_no + 1 + filled_rows + 1,
            column: 1,
            detail: format!("expected {m} rows, found {filled_rows}"),
        });
    }
    TropMatrix::new(m, n, entries)
}

/// Render a matrix in the text format (re-parses to an identical matrix).
pub fn write_matrix(a: &TropMatrix) -> String {
    let mut out = format!("{} {}\n", a.rows(), a.cols());
    for i in 0..a.rows() {
        let row: Vec<String> = a.row(i).iter().map(|v| v.to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::TropValue;

    #[test]
    fn parse_and_write_round_trip() {
        let text = "2 3\n0 -1/2 inf\n7 3/4 -2\n";
        let m = parse_matrix(text).unwrap();
        assert_eq!(m.rows(), 2);
        assert_eq!(m.cols(), 3);
        assert_eq!(*m.get(0, 2), TropValue::Infinity);
        assert_eq!(write_matrix(&m), text);
        assert_eq!(parse_matrix(&write_matrix(&m)).unwrap(), m);
    }

    #[test]
    fn parse_errors_carry_positions() {
        match parse_matrix("2 2\n0 1\n0 oops\n") {
            Err(Error::Parse { line: 3, column: 2, .. }) => {}
            other => panic!("expected parse error at 3:2, got {other:?}"),
        }
        match parse_matrix("2 2\n0 1 2\n3 4\n") {
            Err(Error::Parse { line: 2, .. }) => {}
            other => panic!("expected row-width error at line 2, got {other:?}"),
        }
        match parse_matrix("2 2\n0 1\n") {
            Err(Error::Parse { .. }) => {}
            other => panic!("expected missing-row error, got {other:?}"),
        }
    }
}
