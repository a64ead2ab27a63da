//! Options file. Command-line flags override every value set here.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Options {
    pub catalog: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub rules: Option<PathBuf>,
    pub skip: Option<String>,
    pub all_matches: Option<bool>,
    pub inline: Option<bool>,
    pub out: Option<PathBuf>,
    pub pretagged: Option<bool>,
    pub parallel: Option<bool>,
    pub mark_open: Option<String>,
    pub mark_close: Option<String>,
    pub abbreviations: Option<Vec<String>>,
}

impl Options {
    /// Relative paths inside the file are taken relative to the file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read options file {}", path.display()))?;
        let mut options: Options =
            toml::from_str(&text).with_context(|| format!("invalid options file {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let paths = [&mut options.catalog, &mut options.lexicon, &mut options.rules, &mut options.out];
        for p in paths.into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(options)
    }
}
