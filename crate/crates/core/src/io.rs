//! Text formats for real-valued series and bit series.
//!
//! Real series: UTF-8, one decimal number per line; blank lines and lines
//! starting with `#` are skipped. Bit series: a single line of `0`/`1`
//! characters terminated by a newline.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::chain::BitSeries;
use crate::error::{Error, Result};

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn parse_real_series(text: &str, path: &Path) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            line: lineno + 1,
            message: format!("not a decimal number: {line:?}"),
        })?;
        if !v.is_finite() {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: lineno + 1,
                message: "non-finite value".into(),
            });
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err(Error::EmptySeries);
    }
    Ok(out)
}

pub fn read_real_series(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_real_series(&text, path)
}

pub fn parse_bits(text: &str, path: &Path) -> Result<BitSeries> {
    let body = text.strip_suffix('\n').unwrap_or(text);
    let body = body.strip_suffix('\r').unwrap_or(body);
    body.parse().map_err(|e| match e {
        Error::InvalidBit { position, value } => Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            message: format!("invalid bit {value:?} at column {position}"),
        },
        other => other,
    })
}

pub fn read_bits(path: &Path) -> Result<BitSeries> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_bits(&text, path)
}

pub fn write_bits(path: &Path, bits: &BitSeries) -> Result<()> {
    write_atomic(path, format!("{bits}\n").as_bytes())
}

/// Writes `contents` to a temporary file next to `path` and renames it into
/// place, so readers never observe a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(path))?;
    tmp.write_all(contents).map_err(io_err(path))?;
    tmp.as_file().sync_all().map_err(io_err(path))?;
    tmp.persist(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e.error,
    })?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_series_skips_comments_and_blanks() {
        let text = "# heart rate\n60\n\n80.5\n  # another\n-1e2\n";
        let v = parse_real_series(text, Path::new("x")).unwrap();
        assert_eq!(v, vec![60.0, 80.5, -100.0]);
    }

    #[test]
    fn real_series_reports_line() {
        let err = parse_real_series("1\n2\nabc\n", Path::new("hr.txt")).unwrap_err();
        assert_eq!(err.to_string(), "hr.txt:3: not a decimal number: \"abc\"");
        assert!(parse_real_series("1\nNaN\n", Path::new("x")).is_err());
        assert!(matches!(
            parse_real_series("# only\n", Path::new("x")),
            Err(Error::EmptySeries)
        ));
    }

    #[test]
    fn bits_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("z.bits");
        let bits: BitSeries = "0110100".parse().unwrap();
        write_bits(&p, &bits).unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "0110100\n");
        assert_eq!(read_bits(&p).unwrap(), bits);
    }

    #[test]
    fn bits_reject_garbage() {
        assert!(parse_bits("01x\n", Path::new("x")).is_err());
        assert!(parse_bits("01\n01\n", Path::new("x")).is_err());
        assert!(parse_bits("\n", Path::new("x")).is_err());
    }
}
