use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use qpinem::io::write_string;
use qpinem::Result;

use crate::config::Common;

#[derive(Serialize)]
struct Artifact {
    file: String,
    bytes: usize,
}

#[derive(Serialize)]
struct Manifest<'a, C: Serialize> {
    tool: &'static str,
    version: &'static str,
    library_version: &'static str,
    subcommand: &'a str,
    common: &'a Common,
    config: &'a C,
    artifacts: &'a [Artifact],
    created_unix: u64,
}

/// Collects the data files of one run and writes the manifest beside them.
pub struct Output {
    dir: PathBuf,
    artifacts: Vec<Artifact>,
}

impl Output {
    pub fn new(common: &Common) -> Self {
        Output { dir: common.out_dir.clone(), artifacts: Vec::new() }
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        write_string(&self.dir.join(name), contents)?;
        self.artifacts.push(Artifact { file: name.to_string(), bytes: contents.len() });
        Ok(())
    }

    pub fn finish<C: Serialize>(self, subcommand: &str, common: &Common, config: &C) -> Result<()> {
        let created_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let manifest = Manifest {
            tool: "qpinem",
            version: env!("CARGO_PKG_VERSION"),
            library_version: qpinem::VERSION,
            subcommand,
            common,
            config,
            artifacts: &self.artifacts,
            created_unix,
        };
        write_string(&self.dir.join("manifest.json"), &serde_json::to_string_pretty(&manifest)?)?;
        for a in &self.artifacts {
            say!("wrote {}", self.dir.join(&a.file).display());
        }
        Ok(())
    }
}
