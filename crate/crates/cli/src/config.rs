//! Settings resolved from defaults, a `key = value` file, the environment and flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};

pub const CACHE_ENV: &str = "DELTASUM_CACHE";

#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub cache_dir: PathBuf,
    pub workers: usize,
    /// Scales the quadrature tolerance of `integral`.
    pub default_tolerance_scale: f64,
    pub seed: u64,
}

impl Default for CliConfig {
    fn default() -> Self {
        CliConfig {
            cache_dir: PathBuf::from(".deltasum-cache"),
            workers: 1,
            default_tolerance_scale: 1.0,
            seed: 1,
        }
    }
}

/// Flag values that override everything else.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub cache_dir: Option<PathBuf>,
    pub workers: Option<usize>,
    pub tolerance_scale: Option<f64>,
    pub seed: Option<u64>,
}

impl CliConfig {
    #[cfg(test)]
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let mut cfg = CliConfig::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    fn apply_text(&mut self, text: &str) -> anyhow::Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("config line {}: expected `key = value`", i + 1);
            };
            let (key, value) = (key.trim(), value.trim());
            let bad = |e: &dyn std::fmt::Display| anyhow::anyhow!("config line {}: {key}: {e}", i + 1);
            match key {
                "cache_dir" => self.cache_dir = PathBuf::from(value),
                "workers" => self.workers = value.parse().map_err(|e| bad(&e))?,
                "default_tolerance_scale" => {
                    self.default_tolerance_scale = value.parse().map_err(|e| bad(&e))?
                }
                "seed" => self.seed = value.parse().map_err(|e| bad(&e))?,
                other => bail!("config line {}: unknown key `{other}`", i + 1),
            }
        }
        Ok(())
    }

    /// Defaults, then `file`, then `DELTASUM_CACHE`, then flags.
    pub fn resolve(
        file: Option<&Path>,
        env_cache: Option<String>,
        flags: &Overrides,
    ) -> anyhow::Result<Self> {
        let mut cfg = CliConfig::default();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            cfg.apply_text(&text)?;
        }
        if let Some(dir) = env_cache.filter(|d| !d.is_empty()) {
            cfg.cache_dir = PathBuf::from(dir);
        }
        if let Some(dir) = &flags.cache_dir {
            cfg.cache_dir = dir.clone();
        }
        if let Some(w) = flags.workers {
            cfg.workers = w;
        }
        if let Some(s) = flags.tolerance_scale {
            cfg.default_tolerance_scale = s;
        }
        if let Some(s) = flags.seed {
            cfg.seed = s;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.workers == 0 {
            bail!("workers must be at least 1");
        }
        if !(self.default_tolerance_scale > 0.0 && self.default_tolerance_scale.is_finite()) {
            bail!("default_tolerance_scale must be positive");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_keys() {
        let cfg = CliConfig::parse(
            "# comment\ncache_dir = /tmp/x\nworkers = 4\n\ndefault_tolerance_scale = 2.5\nseed = 9 # trailing\n",
        )
        .unwrap();
        assert_eq!(cfg.cache_dir, PathBuf::from("/tmp/x"));
        assert_eq!((cfg.workers, cfg.seed), (4, 9));
        assert_eq!(cfg.default_tolerance_scale, 2.5);
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        assert!(CliConfig::parse("threads = 2").is_err());
        assert!(CliConfig::parse("workers 2").is_err());
        assert!(CliConfig::parse("workers = two").is_err());
    }

    #[test]
    fn precedence() {
        let dir = std::env::temp_dir().join(format!("deltasum-cfg-{}", std::process::id()));
        std::fs::write(&dir, "cache_dir = from-file\nworkers = 3\nseed = 5\n").unwrap();
        let none = Overrides::default();
        let cfg = CliConfig::resolve(Some(&dir), None, &none).unwrap();
        assert_eq!(cfg.cache_dir, PathBuf::from("from-file"));
        let cfg = CliConfig::resolve(Some(&dir), Some("from-env".into()), &none).unwrap();
        assert_eq!(cfg.cache_dir, PathBuf::from("from-env"));
        let flags = Overrides {
            cache_dir: Some("from-flag".into()),
            seed: Some(7),
            ..Default::default()
        };
        let cfg = CliConfig::resolve(Some(&dir), Some("from-env".into()), &flags).unwrap();
        assert_eq!(cfg.cache_dir, PathBuf::from("from-flag"));
        assert_eq!((cfg.workers, cfg.seed), (3, 7));
        std::fs::remove_file(dir).unwrap();
        let zero = Overrides {
            workers: Some(0),
            ..Default::default()
        };
        assert!(CliConfig::resolve(None, None, &zero).is_err());
    }
}
