//! Matrix files and configuration.

use std::path::Path;

use dimgroup::arith::Rat;
use dimgroup::decide::Config;
use dimgroup::exactmat::{IntMatrix, RatMatrix};
use num_bigint::BigInt;
use serde_json::Value;

/// Failures that map to exit code 2.
#[derive(Debug)]
pub struct ParseError(pub String);

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn err<T>(msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError(msg.into()))
}

/// Rows of exact-value tokens, from either format.
fn parse_cells(text: &str) -> Result<Vec<Vec<String>>, ParseError> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('[') {
        let v: Value = serde_json::from_str(trimmed).map_err(|e| ParseError(format!("bad JSON matrix: {}", e)))?;
        let Value::Array(rows) = v else { return err("JSON matrix must be an array of arrays") };
        let mut out = Vec::with_capacity(rows.len());
        for row in rows {
            let Value::Array(cells) = row else { return err("JSON matrix must be an array of arrays") };
            let mut r = Vec::with_capacity(cells.len());
            for c in cells {
                match c {
                    Value::Number(n) if n.is_i64() || n.is_u64() => r.push(n.to_string()),
                    Value::String(s) => r.push(s),
                    other => return err(format!("matrix entry {} is not an exact number", other)),
                }
            }
            out.push(r);
        }
        if out.iter().any(|r| r.len() != out[0].len()) {
            return err("ragged matrix rows");
        }
        return Ok(out);
    }
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines.next().ok_or_else(|| ParseError("empty matrix file".into()))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| ParseError(format!("bad dimension {:?}", t))))
        .collect::<Result<_, _>>()?;
    let [n, m] = dims[..] else { return err("first line must be \"N M\"") };
    let rows: Vec<Vec<String>> = lines.map(|l| l.split_whitespace().map(String::from).collect()).collect();
    if rows.len() != n || rows.iter().any(|r| r.len() != m) {
        return err(format!("expected {} rows of {} entries", n, m));
    }
    Ok(rows)
}

/// Reads a path, or a literal JSON matrix if the argument starts with '['.
fn source(arg: &str) -> Result<String, ParseError> {
    if arg.trim_start().starts_with('[') {
        return Ok(arg.to_string());
    }
    std::fs::read_to_string(arg).map_err(|e| ParseError(format!("{}: {}", arg, e)))
}

pub fn parse_int_matrix(text: &str) -> Result<IntMatrix, ParseError> {
    let cells = parse_cells(text)?;
    let rows = cells.len();
    let cols = cells.first().map_or(0, Vec::len);
    let data = cells
        .iter()
        .flatten()
        .map(|t| t.parse::<BigInt>().map_err(|_| ParseError(format!("{:?} is not an integer", t))))
        .collect::<Result<_, _>>()?;
    Ok(IntMatrix::new(rows, cols, data))
}

pub fn parse_rat_matrix(text: &str) -> Result<RatMatrix, ParseError> {
    let cells = parse_cells(text)?;
    let rows = cells.len();
    let cols = cells.first().map_or(0, Vec::len);
    let data = cells
        .iter()
        .flatten()
        .map(|t| match t.parse::<Rat>() {
            Ok(q) => Ok(q),
            Err(_) => err(format!("{:?} is not a rational number", t)),
        })
        .collect::<Result<_, _>>()?;
    Ok(RatMatrix::new(rows, cols, data))
}

pub fn read_int_matrix(arg: &str) -> Result<IntMatrix, ParseError> {
    parse_int_matrix(&source(arg)?)
}

pub fn read_rat_matrix(arg: &str) -> Result<RatMatrix, ParseError> {
    parse_rat_matrix(&source(arg)?)
}

/// Text form accepted by `parse_int_matrix`.
#[cfg(test)]
pub fn format_matrix_file(a: &IntMatrix) -> String {
    let mut s = format!("{} {}\n", a.rows(), a.cols());
    for i in 0..a.rows() {
        let row: Vec<String> = (0..a.cols()).map(|j| a[(i, j)].to_string()).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

pub const CONFIG_ENV: &str = "DIMGROUP_CONFIG";
const DEFAULT_CONFIG: &str = "dimgroup.json";

fn uint(v: &Value, key: &str) -> Result<u64, ParseError> {
    v.as_u64().ok_or_else(|| ParseError(format!("config key {} must be a nonnegative integer", key)))
}

/// Applies a JSON object of overrides to the defaults.
pub fn config_from_json(text: &str) -> Result<Config, ParseError> {
    let v: Value = serde_json::from_str(text).map_err(|e| ParseError(format!("bad config: {}", e)))?;
    let Value::Object(map) = v else { return err("config must be a JSON object") };
    let mut cfg = Config::default();
    for (key, val) in &map {
        let small = |x: u64| u32::try_from(x).map_err(|_| ParseError(format!("config key {} too large", key)));
        match key.as_str() {
            "height" => cfg.height = small(uint(val, key)?)?,
            "precision" => cfg.precision = if val.is_null() { None } else { Some(small(uint(val, key)?)?) },
            "exp_bound" => cfg.exp_bound = if val.is_null() { None } else { Some(small(uint(val, key)?)?) },
            "k_max" => cfg.k_max = small(uint(val, key)?)?,
            "l_max" => cfg.l_max = small(uint(val, key)?)?,
            "n_max" => cfg.n_max = small(uint(val, key)?)?,
            "factorization_entry_bound" => {
                cfg.factorization_entry_bound = if val.is_null() { None } else { Some(small(uint(val, key)?)?) }
            }
            "candidate_cap" => cfg.candidate_cap = uint(val, key)? as usize,
            other => return err(format!("unknown config key {}", other)),
        }
    }
    Ok(cfg)
}

/// `$DIMGROUP_CONFIG` if set, else ./dimgroup.json if present, else defaults.
pub fn load_config() -> Result<Config, ParseError> {
    let path: std::path::PathBuf = match std::env::var_os(CONFIG_ENV) {
        Some(p) => p.into(),
        None if Path::new(DEFAULT_CONFIG).exists() => DEFAULT_CONFIG.into(),
        None => return Ok(Config::default()),
    };
    let text = std::fs::read_to_string(&path).map_err(|e| ParseError(format!("{}: {}", path.display(), e)))?;
    config_from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_and_json_agree() {
        let a = parse_int_matrix("2 2\n1 1\n2 0\n").unwrap();
        let b = parse_int_matrix("[[1, 1], [2, 0]]").unwrap();
        assert_eq!(a, b);
        assert_eq!(parse_int_matrix(&format_matrix_file(&a)).unwrap(), a);
    }

    #[test]
    fn big_entries_round_trip() {
        let text = "1 2\n123456789012345678901234567890 -7\n";
        let a = parse_int_matrix(text).unwrap();
        assert_eq!(format_matrix_file(&a), text);
        assert_eq!(parse_int_matrix("[[\"123456789012345678901234567890\", -7]]").unwrap(), a);
    }

    #[test]
    fn malformed_input() {
        assert!(parse_int_matrix("2 2\n1 1\n").is_err());
        assert!(parse_int_matrix("[[1, 2], [3]]").is_err());
        assert!(parse_int_matrix("[[1.5]]").is_err());
        assert!(parse_int_matrix("1 1\nx\n").is_err());
        assert!(parse_rat_matrix("1 1\n1/0\n").is_err());
        assert_eq!(parse_rat_matrix("1 2\n3/2 -1\n").unwrap().rows(), 1);
    }

    #[test]
    fn config_overrides() {
        let cfg = config_from_json(r#"{"height": 3, "precision": 12, "exp_bound": null}"#).unwrap();
        assert_eq!((cfg.height, cfg.precision, cfg.exp_bound), (3, Some(12), None));
        assert!(config_from_json(r#"{"colour": 1}"#).is_err());
        assert!(config_from_json(r#"{"height": -1}"#).is_err());
    }
}
