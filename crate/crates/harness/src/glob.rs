//! Minimal filename globbing: `*` wildcards in the final path component.

use crate::HarnessError;
use std::path::PathBuf;

/// Matches `pattern` (with `*` wildcards) against `text`.
pub fn wildcard_match(pattern: &str, text: &str) -> bool {
    let p: Vec<u8> = pattern.bytes().collect();
    let t: Vec<u8> = text.bytes().collect();
    let (mut pi, mut ti) = (0usize, 0usize);
    let (mut star, mut mark) = (usize::MAX, 0usize);
    while ti < t.len() {
        if pi < p.len() && (p[pi] == t[ti]) {
            pi += 1;
            ti += 1;
        } else if pi < p.len() && p[pi] == b'*' {
            star = pi;
            mark = ti;
            pi += 1;
        } else if star != usize::MAX {
            pi = star + 1;
            mark += 1;
            ti = mark;
        } else {
            return false;
        }
    }
    while pi < p.len() && p[pi] == b'*' {
        pi += 1;
    }
    pi == p.len()
}

/// Expands a pattern whose directory part is literal and whose file name
/// may contain `*`. Returns matches sorted by path.
pub fn expand_glob(pattern: &str) -> Result<Vec<PathBuf>, HarnessError> {
    let path = PathBuf::from(pattern);
    let (dir, file_pattern) = match (path.parent(), path.file_name()) {
        (Some(d), Some(f)) => (
            if d.as_os_str().is_empty() {
                PathBuf::from(".")
            } else {
                d.to_path_buf()
            },
            f.to_string_lossy().to_string(),
        ),
        _ => return Err(HarnessError::Usage(format!("bad checkpoint pattern {pattern:?}"))),
    };
    if dir.to_string_lossy().contains('*') {
        return Err(HarnessError::Usage(
            "wildcards are only supported in the file name component".into(),
        ));
    }
    if !file_pattern.contains('*') {
        // Literal path: report it whether or not it exists; the reader
        // produces the precise error.
        return Ok(vec![path]);
    }
    let mut matches = Vec::new();
    let entries = std::fs::read_dir(&dir).map_err(|e| crate::io_err(&dir, e))?;
    for entry in entries {
        let entry = entry.map_err(|e| crate::io_err(&dir, e))?;
        let name = entry.file_name().to_string_lossy().to_string();
        if wildcard_match(&file_pattern, &name) {
            matches.push(entry.path());
        }
    }
    matches.sort();
    Ok(matches)
}
