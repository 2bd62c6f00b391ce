use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

use super::Matrix;

/// Reads the text matrix format: a `<rows> <cols>` header line followed by
/// `rows` lines of `cols` whitespace-separated decimals.
pub fn read_matrix<R: Read>(reader: R) -> Result<Matrix> {
    let mut lines = BufReader::new(reader).lines().enumerate();
    let (rows, cols) = loop {
        let Some((idx, line)) = lines.next() else {
            return Err(Error::parse(1, "missing header line"));
        };
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let dims = (
            parts.next().and_then(|s| s.parse::<usize>().ok()),
            parts.next().and_then(|s| s.parse::<usize>().ok()),
        );
        match (dims, parts.next()) {
            ((Some(r), Some(c)), None) if r > 0 && c > 0 => break (r, c),
            _ => return Err(Error::parse(idx + 1, "expected header \"<rows> <cols>\"")),
        }
    };

    let mut data = Vec::with_capacity(rows * cols);
    let mut seen_rows = 0;
    for (idx, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if seen_rows == rows {
            return Err(Error::parse(idx + 1, format!("more than {rows} data rows")));
        }
        let before = data.len();
        for tok in line.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|_| Error::parse(idx + 1, format!("invalid number {tok:?}")))?;
            if !v.is_finite() {
                return Err(Error::parse(idx + 1, format!("non-finite value {tok:?}")));
            }
            data.push(v);
        }
        if data.len() - before != cols {
            return Err(Error::parse(
                idx + 1,
                format!("expected {cols} values, found {}", data.len() - before),
            ));
        }
        seen_rows += 1;
    }
    if seen_rows != rows {
        return Err(Error::parse(
            seen_rows + 2,
            format!("expected {rows} data rows, found {seen_rows}"),
        ));
    }
    Matrix::new(rows, cols, data)
}

/// Writes with 17 significant digits so that reading back is bit-exact.
pub fn write_matrix<W: Write>(mut writer: W, m: &Matrix) -> Result<()> {
    writeln!(writer, "{} {}", m.rows(), m.cols())?;
    for i in 0..m.rows() {
        let line: Vec<String> = m.row(i).iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(writer, "{}", line.join(" "))?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_matrix_file(path: impl AsRef<Path>) -> Result<Matrix> {
    read_matrix(File::open(path)?)
}

pub fn write_matrix_file(path: impl AsRef<Path>, m: &Matrix) -> Result<()> {
    write_matrix(BufWriter::new(File::create(path)?), m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_simple() {
        let m = read_matrix("2 2\n1 2\n3 4.5\n".as_bytes()).unwrap();
        assert_eq!(m, Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.5]]));
    }

    #[test]
    fn parse_errors_carry_line() {
        let cases = [
            ("", 1),
            ("2 x\n", 1),
            ("2 2\n1 2\n3\n", 3),
            ("1 2\n1 nan\n", 2),
            ("1 1\n1\n2\n", 3),
            ("2 1\n1\n", 3),
        ];
        for (text, line) in cases {
            match read_matrix(text.as_bytes()) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: expected parse error, got {other:?}"),
            }
        }
    }

    proptest! {
        #[test]
        fn write_read_is_bit_exact(
            rows in 1usize..5,
            cols in 1usize..5,
            seed in proptest::collection::vec(-1e300f64..1e300, 16),
            tiny in proptest::collection::vec(-1e-300f64..1e-300, 16),
        ) {
            let m = Matrix::from_fn(rows, cols, |i, j| {
                let k = i * cols + j;
                if k % 2 == 0 { seed[k] } else { tiny[k] }
            });
            let mut buf = Vec::new();
            write_matrix(&mut buf, &m).unwrap();
            let back = read_matrix(buf.as_slice()).unwrap();
            for (a, b) in m.as_slice().iter().zip(back.as_slice()) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }
}
