//! Output formatting, manifests, and guarded file writing.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::Serialize;
use serde_json::Value;

/// Environment variable holding the default output directory.
pub const OUT_DIR_ENV: &str = "CVAR_OUT_DIR";

/// Marker wrapper distinguishing usage/configuration errors (exit 2) from
/// runtime failures (exit 1).
#[derive(Debug)]
pub struct UsageError(pub anyhow::Error);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        // Keep the full cause chain visible wherever the error surfaces.
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for UsageError {}

/// Wraps an error as a usage error.
pub fn usage(err: anyhow::Error) -> anyhow::Error {
    anyhow::Error::new(UsageError(err))
}

/// Rounds to 12 significant digits and prints the shortest representation.
pub fn g12(x: f64) -> String {
    round12(x).to_string()
}

fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let exp = x.abs().log10().floor() as i32;
    let scale = 10f64.powi(11 - exp);
    if !scale.is_finite() || scale == 0.0 {
        return x;
    }
    (x * scale).round() / scale
}

/// Rounds every number in a JSON tree to 12 significant digits.
pub fn round_json(value: &mut Value) {
    match value {
        Value::Number(n) => {
            if let Some(f) = n.as_f64() {
                if n.is_f64() {
                    if let Some(rounded) = serde_json::Number::from_f64(round12(f)) {
                        *value = Value::Number(rounded);
                    }
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

/// Resolves the output directory from the flag or the environment.
pub fn resolve_out_dir(flag: &Option<PathBuf>) -> anyhow::Result<PathBuf> {
    if let Some(dir) = flag {
        return Ok(dir.clone());
    }
    if let Ok(dir) = std::env::var(OUT_DIR_ENV) {
        if !dir.is_empty() {
            return Ok(PathBuf::from(dir));
        }
    }
    bail!("no output directory: pass --out or set {OUT_DIR_ENV}");
}

/// Writes `content` to `dir/name`, refusing to overwrite unless forced.
pub fn write_output(dir: &Path, name: &str, content: &str, force: bool) -> anyhow::Result<PathBuf> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;
    let path = dir.join(name);
    if path.exists() && !force {
        return Err(usage(anyhow::anyhow!(
            "refusing to overwrite {} (pass --force to allow)",
            path.display()
        )));
    }
    std::fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

/// Serializes a value as pretty JSON with 12-significant-digit numbers and a
/// trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> anyhow::Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_json(&mut v);
    Ok(format!("{}\n", serde_json::to_string_pretty(&v)?))
}

/// Every emitted JSON document carries this version marker.
#[derive(Serialize)]
pub struct Versioned<T: Serialize> {
    pub schema_version: u32,
    #[serde(flatten)]
    pub payload: T,
}

impl<T: Serialize> Versioned<T> {
    pub fn new(payload: T) -> Self {
        Self {
            schema_version: 1,
            payload,
        }
    }
}

/// Reproducibility record written alongside every file-producing command.
#[derive(Serialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub command: Vec<String>,
    pub seed: Option<u64>,
    pub config: Value,
}

pub fn write_manifest(
    dir: &Path,
    seed: Option<u64>,
    config: Value,
    force: bool,
) -> anyhow::Result<()> {
    let manifest = RunManifest {
        schema_version: 1,
        tool: "cvar",
        version: env!("CARGO_PKG_VERSION"),
        command: std::env::args().collect(),
        seed,
        config,
    };
    let text = to_json_string(&manifest)?;
    write_output(dir, "run_manifest.json", &text, force)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g12_is_stable_and_short() {
        assert_eq!(g12(0.7), "0.7");
        assert_eq!(g12(0.0), "0");
        assert_eq!(g12(-4.0), "-4");
        assert_eq!(g12(1.0 / 3.0), "0.333333333333");
        assert_eq!(g12(277.25887222397812), "277.258872224");
    }

    #[test]
    fn round_json_walks_nested_trees() {
        let mut v = serde_json::json!({"a": [0.1234567890123456], "b": {"c": 2.0}});
        round_json(&mut v);
        assert_eq!(v["a"][0], serde_json::json!(0.123456789012));
        assert_eq!(v["b"]["c"], serde_json::json!(2.0));
    }
}
