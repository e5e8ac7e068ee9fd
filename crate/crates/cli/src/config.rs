use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use qpinem::{Error, Result};

pub const OUT_DIR_ENV: &str = "QPINEM_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

pub fn load(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)?;
    let v: Value =
        serde_json::from_str(&text).map_err(|e| Error::invalid(format!("config {}: {e}", path.display())))?;
    if !v.is_object() {
        return Err(Error::invalid(format!("config {} must be a JSON object", path.display())));
    }
    Ok(v)
}

/// Subcommand section of the config file, defaults where absent.
pub fn section<T: DeserializeOwned + Default>(file: &Value, name: &str) -> Result<T> {
    match file.get(name) {
        None => Ok(T::default()),
        Some(v) => {
            serde_json::from_value(v.clone()).map_err(|e| Error::invalid(format!("config section '{name}': {e}")))
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Common {
    pub out_dir: PathBuf,
    pub format: Format,
    pub seed: u64,
    pub svg: bool,
}

#[derive(Deserialize, Default)]
#[serde(default)]
struct CommonFile {
    out_dir: Option<PathBuf>,
    format: Option<Format>,
    seed: Option<u64>,
    svg: Option<bool>,
}

impl Common {
    /// flags > config file > environment > built-in defaults.
    pub fn resolve(
        file: &Value,
        out_dir: Option<PathBuf>,
        format: Option<Format>,
        seed: Option<u64>,
        svg: bool,
    ) -> Result<Self> {
        let top = Value::Object(
            file.as_object()
                .map(|o| o.iter().filter(|(k, _)| matches!(k.as_str(), "out_dir" | "format" | "seed" | "svg")))
                .into_iter()
                .flatten()
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        );
        let f: CommonFile = serde_json::from_value(top).map_err(|e| Error::invalid(format!("config: {e}")))?;
        let env_dir = std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from);
        Ok(Common {
            out_dir: out_dir.or(f.out_dir).or(env_dir).unwrap_or_else(|| PathBuf::from("qpinem-out")),
            format: format.or(f.format).unwrap_or_default(),
            seed: seed.or(f.seed).unwrap_or(1),
            svg: svg || f.svg.unwrap_or(false),
        })
    }
}

/// Copies every `Some` flag over the resolved parameter.
macro_rules! overlay {
    ($params:expr, $args:expr; $($field:ident),* $(,)?) => {
        $( if let Some(v) = $args.$field.clone() { $params.$field = v; } )*
    };
}
pub(crate) use overlay;

/// Comma-separated list flag.
pub fn parse_list<T: std::str::FromStr>(s: &str) -> std::result::Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse::<T>().map_err(|e| format!("'{p}': {e}")))
        .collect()
}
