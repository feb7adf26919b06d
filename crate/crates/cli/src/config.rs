//! Flat TOML configuration files. Every key mirrors a flag name with dashes
//! replaced by underscores, e.g. `max_trials = 100`.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::de::DeserializeOwned;

use crate::args::{CommonArgs, Format};

const COMMON_KEYS: [&str; 4] = ["seed", "out", "format", "no_persist"];

#[derive(Debug, Default)]
pub struct FileConfig {
    table: toml::Table,
    origin: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text, Some(path.to_owned()))
    }

    pub fn parse(text: &str, origin: Option<PathBuf>) -> Result<Self> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| anyhow!("invalid config: {}", e.message()))?;
        Ok(Self { table, origin })
    }

    fn name(&self) -> String {
        self.origin
            .as_ref()
            .map(|p| p.display().to_string())
            .unwrap_or_else(|| "config".into())
    }

    /// Rejects keys that neither the command nor the common flags know.
    pub fn check_keys(&self, command_keys: &[&str]) -> Result<()> {
        for key in self.table.keys() {
            if !command_keys.contains(&key.as_str()) && !COMMON_KEYS.contains(&key.as_str()) {
                bail!("{}: unknown key {key:?}", self.name());
            }
        }
        Ok(())
    }

    /// The flag if given, else the config value under `key`.
    pub fn pick<T: DeserializeOwned>(&self, flag: Option<T>, key: &str) -> Result<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        self.table
            .get(key)
            .map(|v| {
                v.clone()
                    .try_into::<T>()
                    .map_err(|e| anyhow!("{}: bad value for {key:?}: {}", self.name(), e.message()))
            })
            .transpose()
    }

    pub fn pick_or<T: DeserializeOwned>(
        &self,
        flag: Option<T>,
        key: &str,
        default: T,
    ) -> Result<T> {
        Ok(self.pick(flag, key)?.unwrap_or(default))
    }

    pub fn require<T: DeserializeOwned>(&self, flag: Option<T>, key: &str) -> Result<T> {
        self.pick(flag, key)?
            .ok_or_else(|| anyhow!("missing required value --{}", key.replace('_', "-")))
    }

    pub fn switch(&self, flag: bool, key: &str) -> Result<bool> {
        Ok(flag || self.pick::<bool>(None, key)?.unwrap_or(false))
    }
}

/// Common settings after merging flags with the config file.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub persist: bool,
}

pub fn resolve_common(common: &CommonArgs, cfg: &FileConfig) -> Result<Resolved> {
    Ok(Resolved {
        seed: cfg.pick_or(common.seed, "seed", 0)?,
        out: cfg.pick(common.out.clone(), "out")?,
        format: cfg.pick_or(common.format, "format", Format::Json)?,
        persist: !cfg.switch(common.no_persist, "no_persist")?,
    })
}
