//! Flat `key = value` configuration files whose keys mirror the CLI flags.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Parses `key = value` lines. Blank lines and lines starting with `#` are skipped;
/// keys are normalized to the flag spelling (`ref_mesh` becomes `ref-mesh`).
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", n + 1)))?;
        let key = k.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() {
            return Err(Error::Parse(format!("line {}: empty key", n + 1)));
        }
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

/// Comma-separated unsigned integers, e.g. `8,16,32`.
pub fn parse_usize_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad integer {p:?} in list {s:?}")))
        })
        .collect()
}

/// `lo,hi`.
pub fn parse_band(s: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = s.split(',').collect();
    let bad = || Error::Parse(format!("expected a band lo,hi, got {s:?}"));
    if parts.len() != 2 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_files() {
        let c = parse_config("# comment\nmodel = fbm\n\nref_mesh=1024\n--seed = 5\n").unwrap();
        assert_eq!(c["model"], "fbm");
        assert_eq!(c["ref-mesh"], "1024");
        assert_eq!(c["seed"], "5");
        assert!(parse_config("nonsense").is_err());
    }

    #[test]
    fn lists_and_bands() {
        assert_eq!(parse_usize_list("8, 16,32").unwrap(), vec![8, 16, 32]);
        assert!(parse_usize_list("8,x").is_err());
        assert_eq!(parse_band("0.2,0.4").unwrap(), (0.2, 0.4));
        assert!(parse_band("0.4,0.2").is_err());
    }
}
