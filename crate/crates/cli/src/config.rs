//! Run configuration: defaults, `polyak-lab.toml`, `VKFT_*` environment
//! overrides, then command-line flags, in increasing precedence.

use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Table,
}

impl Format {
    pub fn parse(s: &str) -> Option<Format> {
        match s {
            "json" => Some(Format::Json),
            "table" => Some(Format::Table),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub cache_dir: Option<PathBuf>,
    pub ceiling: usize,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub parallelism: usize,
    /// Reserved for randomized property suites; accepted and recorded but
    /// the verification pipeline itself is deterministic.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            cache_dir: None,
            ceiling: 6,
            output: None,
            format: Format::Json,
            parallelism: 0,
            seed: 0,
        }
    }
}

pub struct ConfigError(pub String);

impl RunConfig {
    /// Loads `polyak-lab.toml` (when present) and applies `VKFT_*`
    /// environment overrides.
    pub fn load(config_path: Option<&PathBuf>) -> Result<RunConfig, ConfigError> {
        let mut cfg = RunConfig::default();
        let path = config_path.cloned().unwrap_or_else(|| PathBuf::from("polyak-lab.toml"));
        if path.exists() {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
            let table: toml::Table = text
                .parse()
                .map_err(|e| ConfigError(format!("bad config {}: {e}", path.display())))?;
            cfg.apply_table(&table)?;
        } else if config_path.is_some() {
            return Err(ConfigError(format!("config file {} does not exist", path.display())));
        }
        cfg.apply_env()?;
        Ok(cfg)
    }

    fn apply_table(&mut self, table: &toml::Table) -> Result<(), ConfigError> {
        for (key, value) in table {
            match key.as_str() {
                "cache_dir" => {
                    self.cache_dir = Some(PathBuf::from(
                        value.as_str().ok_or_else(|| ConfigError("cache_dir must be a string".into()))?,
                    ))
                }
                "ceiling" => {
                    self.ceiling = value
                        .as_integer()
                        .filter(|v| *v >= 0)
                        .ok_or_else(|| ConfigError("ceiling must be a non-negative integer".into()))?
                        as usize
                }
                "output" => {
                    self.output = Some(PathBuf::from(
                        value.as_str().ok_or_else(|| ConfigError("output must be a string".into()))?,
                    ))
                }
                "format" => {
                    self.format = value
                        .as_str()
                        .and_then(Format::parse)
                        .ok_or_else(|| ConfigError("format must be \"json\" or \"table\"".into()))?
                }
                "parallelism" => {
                    self.parallelism = value
                        .as_integer()
                        .filter(|v| *v >= 0)
                        .ok_or_else(|| ConfigError("parallelism must be a non-negative integer".into()))?
                        as usize
                }
                "seed" => {
                    self.seed = value
                        .as_integer()
                        .filter(|v| *v >= 0)
                        .ok_or_else(|| ConfigError("seed must be a non-negative integer".into()))?
                        as u64
                }
                other => return Err(ConfigError(format!("unknown config key {other:?}"))),
            }
        }
        Ok(())
    }

    fn apply_env(&mut self) -> Result<(), ConfigError> {
        if let Ok(v) = std::env::var("VKFT_CACHE_DIR") {
            self.cache_dir = Some(PathBuf::from(v));
        }
        if let Ok(v) = std::env::var("VKFT_CEILING") {
            self.ceiling =
                v.parse().map_err(|_| ConfigError("VKFT_CEILING must be an integer".into()))?;
        }
        if let Ok(v) = std::env::var("VKFT_OUTPUT") {
            self.output = Some(PathBuf::from(v));
        }
        if let Ok(v) = std::env::var("VKFT_FORMAT") {
            self.format =
                Format::parse(&v).ok_or_else(|| ConfigError("VKFT_FORMAT must be json or table".into()))?;
        }
        if let Ok(v) = std::env::var("VKFT_PARALLELISM") {
            self.parallelism =
                v.parse().map_err(|_| ConfigError("VKFT_PARALLELISM must be an integer".into()))?;
        }
        if let Ok(v) = std::env::var("VKFT_SEED") {
            self.seed = v.parse().map_err(|_| ConfigError("VKFT_SEED must be an integer".into()))?;
        }
        Ok(())
    }
}
