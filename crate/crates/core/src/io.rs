//! Small helpers shared by the serializers.

use std::fs;
use std::path::Path;

use crate::Result;

pub fn write_string(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    fs::write(path, contents)?;
    Ok(())
}

pub fn read_string(path: &Path) -> Result<String> {
    Ok(fs::read_to_string(path)?)
}

/// Shortest round-trip decimal representation, so emitted files are byte-stable.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}
