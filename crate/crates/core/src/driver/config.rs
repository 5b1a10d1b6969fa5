use std::path::PathBuf;

use super::afem::AfemConfig;
use super::benchmarks::{benchmark, twowell_benchmark, Benchmark, BenchmarkId, TWOWELL_ALPHA};
use crate::error::{Error, Result};
use crate::mesh::io::read_mesh;

/// Environment variable with the number of worker threads (0 = automatic).
pub const THREADS_ENV: &str = "HHO_NUM_THREADS";

/// Everything a `run` needs. Filled from a `key = value` file and then
/// from command line flags, which go through the same [`RunSettings::set`].
#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    pub problem: Option<BenchmarkId>,
    pub afem: AfemConfig,
    /// Weight of the lower-order term of the two-well benchmark.
    pub alpha: f64,
    pub out: Option<PathBuf>,
    /// Replaces the initial mesh of the benchmark.
    pub mesh: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            problem: None,
            afem: AfemConfig::default(),
            alpha: TWOWELL_ALPHA,
            out: None,
            mesh: None,
            threads: None,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Config(format!("invalid value '{value}' for '{key}'")))
}

impl RunSettings {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "problem" => self.problem = Some(value.parse()?),
            "k" => self.afem.k = parse(key, value)?,
            "theta" => self.afem.theta = parse(key, value)?,
            "max_ndof" => self.afem.max_ndof = parse::<f64>(key, value)? as usize,
            "max_levels" => self.afem.max_levels = parse(key, value)?,
            "poincare" => self.afem.poincare = Some(parse(key, value)?),
            "friedrichs" => self.afem.friedrichs = Some(parse(key, value)?),
            "solver_tol" => self.afem.solver.gradient_tol = parse(key, value)?,
            "max_iter" => self.afem.solver.max_iter = parse(key, value)?,
            "alpha" => self.alpha = parse(key, value)?,
            "out" => self.out = Some(value.into()),
            "mesh" => self.mesh = Some(value.into()),
            "threads" => self.threads = Some(parse(key, value)?),
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Applies a config file: one `key = value` per line, `#` starts a comment.
    pub fn apply_config(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected 'key = value'", i + 1)))?;
            self.set(key, value)?;
        }
        Ok(())
    }

    pub fn benchmark(&self) -> Result<Benchmark> {
        let id = self.problem.ok_or_else(|| Error::Config("no problem given".into()))?;
        let mut bench = match id {
            BenchmarkId::TwoWell => {
                if !(self.alpha > 0.0) {
                    return Err(Error::Config(format!("alpha = {} must be positive", self.alpha)));
                }
                twowell_benchmark(self.alpha)
            }
            _ => benchmark(id),
        };
        if let Some(path) = &self.mesh {
            bench.mesh = read_mesh(path)?;
        }
        self.afem.validate()?;
        Ok(bench)
    }
}

/// Sizes the global thread pool from `threads` or, if unset, from
/// `HHO_NUM_THREADS`; 0 leaves the choice to rayon. Only the first call in a
/// process has an effect.
pub fn init_threads(threads: Option<usize>) -> Result<()> {
    let n = match threads {
        Some(n) => n,
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => parse(THREADS_ENV, &v)?,
            Err(_) => 0,
        },
    };
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}
