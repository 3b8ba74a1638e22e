//! The `.mag` text format: a `magma <n>` header followed by `n` rows of `n`
//! whitespace-separated entries.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::magma::Magma;

pub fn parse_mag(text: &str) -> Result<Magma> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("empty input".into()))?;
    let mut words = header.split_whitespace();
    if words.next() != Some("magma") {
        return Err(Error::Parse("expected header `magma <n>`".into()));
    }
    let n: usize = words
        .next()
        .ok_or_else(|| Error::Parse("missing order in header".into()))?
        .parse()
        .map_err(|e| Error::Parse(format!("bad order: {e}")))?;
    if words.next().is_some() {
        return Err(Error::Parse("trailing tokens in header".into()));
    }
    if n == 0 {
        return Err(Error::Parse("order must be positive".into()));
    }
    let body: Vec<&str> = lines.collect();
    let used = body
        .iter()
        .rposition(|l| !l.trim().is_empty())
        .map_or(0, |i| i + 1);
    if used != n {
        return Err(Error::Parse(format!("expected {n} rows, found {used}")));
    }
    let mut rows = Vec::with_capacity(n);
    for (i, line) in body[..used].iter().enumerate() {
        let row = line
            .split_whitespace()
            .map(|w| {
                w.parse::<usize>()
                    .map_err(|e| Error::Parse(format!("row {i}: bad entry {w:?}: {e}")))
            })
            .collect::<Result<Vec<usize>>>()?;
        if row.len() != n {
            return Err(Error::Parse(format!("row {i}: expected {n} entries, found {}", row.len())));
        }
        rows.push(row);
    }
    Magma::from_table(n, &rows)
}

pub fn format_mag(m: &Magma) -> String {
    let n = m.order();
    let mut s = format!("magma {n}\n");
    for x in 0..n {
        let row: Vec<String> = m.row(x).iter().map(usize::to_string).collect();
        let _ = writeln!(s, "{}", row.join(" "));
    }
    s
}

/// Accepts `.mag` text or the JSON form `{"order":…,"table":[[…]]}`.
pub fn parse_magma_any(text: &str) -> Result<Magma> {
    if text.trim_start().starts_with('{') {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    } else {
        parse_mag(text)
    }
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::Io(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let m = Magma::from_table(2, &[vec![1, 0], vec![0, 1]]).unwrap();
        let text = format_mag(&m);
        assert_eq!(text, "magma 2\n1 0\n0 1\n");
        assert_eq!(parse_mag(&text).unwrap(), m);
        assert_eq!(parse_mag(&(text + "\n\n")).unwrap(), m);
    }

    #[test]
    fn strictness() {
        assert!(parse_mag("magma 2\n0 1\n").is_err());
        assert!(parse_mag("magma 2\n0 1\n1\n").is_err());
        assert!(parse_mag("magma 2\n0 1\n1 x\n").is_err());
        assert!(parse_mag("mgma 1\n0\n").is_err());
        assert!(parse_mag("magma 1\n\n0\n").is_err());
        assert!(matches!(
            parse_mag("magma 2\n0 1\n1 2\n"),
            Err(Error::EntryOutOfRange { .. })
        ));
    }

    #[test]
    fn json_form() {
        let m = parse_magma_any(r#"{"order":1,"table":[[0]]}"#).unwrap();
        assert_eq!(m, Magma::trivial());
    }
}
