//! Settings resolved as flag > config file > `LOGVOL_*` environment variable > default.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use logvol::estimation::OptimConfig;
use serde::Deserialize;

use crate::args::OptimArgs;
use crate::Failure;

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub restarts: Option<usize>,
    pub max_iters: Option<usize>,
    pub tol: Option<f64>,
    pub ridge: Option<f64>,
    pub threads: Option<usize>,
    pub cache_dir: Option<PathBuf>,
    pub timeout_secs: Option<u64>,
}

impl ConfigFile {
    /// Reads `path`, or the file named by `LOGVOL_CONFIG`, or nothing.
    pub fn load(path: Option<&Path>) -> Result<Self, Failure> {
        let from_env = std::env::var_os("LOGVOL_CONFIG").map(PathBuf::from);
        let Some(path) = path.map(Path::to_path_buf).or(from_env) else {
            return Ok(Self::default());
        };
        let bytes = std::fs::read(&path).map_err(|e| Failure::io(&path, e))?;
        serde_json::from_slice(&bytes).map_err(|e| Failure::Usage(format!("config {}: {e}", path.display())))
    }
}

fn env<T: FromStr>(key: &str) -> Result<Option<T>, Failure> {
    match std::env::var(key) {
        Ok(v) => v
            .parse()
            .map(Some)
            .map_err(|_| Failure::Usage(format!("environment variable {key} has an invalid value '{v}'"))),
        Err(_) => Ok(None),
    }
}

fn pick<T: FromStr>(flag: Option<T>, file: Option<T>, key: &str) -> Result<Option<T>, Failure> {
    Ok(match flag.or(file) {
        Some(v) => Some(v),
        None => env(key)?,
    })
}

#[derive(Debug, Clone)]
pub struct Settings {
    pub seed: u64,
    pub optim: OptimConfig,
    pub threads: Option<usize>,
    pub cache_dir: Option<PathBuf>,
    pub timeout_secs: u64,
}

impl Settings {
    pub fn resolve(flags: &OptimArgs, threads: Option<usize>, file: &ConfigFile, d: OptimConfig) -> Result<Self, Failure> {
        let seed = pick(flags.seed, file.seed, "LOGVOL_SEED")?.unwrap_or(0);
        let optim = OptimConfig {
            max_iters: pick(flags.max_iters, file.max_iters, "LOGVOL_MAX_ITERS")?.unwrap_or(d.max_iters),
            tol: pick(flags.tol, file.tol, "LOGVOL_TOL")?.unwrap_or(d.tol),
            restarts: pick(flags.restarts, file.restarts, "LOGVOL_RESTARTS")?.unwrap_or(d.restarts),
            ridge: pick(flags.ridge, file.ridge, "LOGVOL_RIDGE")?.unwrap_or(d.ridge),
            seed,
            ..d
        };
        Ok(Self {
            seed,
            optim,
            threads: pick(threads, file.threads, "LOGVOL_THREADS")?,
            cache_dir: pick(None, file.cache_dir.clone(), logvol::ingest::CACHE_DIR_ENV)?,
            timeout_secs: pick(None, file.timeout_secs, "LOGVOL_TIMEOUT_SECS")?.unwrap_or(60),
        })
    }
}
