use std::path::PathBuf;

use apgen_core::orbits::OrbitSelector;
use apgen_core::par::Execution;

use crate::error::AppError;

/// Environment variable naming the cache directory.
pub const CACHE_ENV: &str = "APGEN_CACHE_DIR";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    /// `None` disables persistence.
    pub cache_dir: Option<PathBuf>,
    pub format: Format,
    pub workers: Option<usize>,
    pub exec: Execution,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { cache_dir: None, format: Format::Csv, workers: None, exec: Execution::available() }
    }
}

impl RunConfig {
    /// The flag wins over the environment.
    pub fn resolve(cache_flag: Option<PathBuf>, format: Format, workers: Option<usize>) -> Result<Self, AppError> {
        if workers == Some(0) {
            return Err(AppError::Usage("--workers must be at least 1".into()));
        }
        let cache_dir = cache_flag.or_else(|| std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from));
        let exec = if workers == Some(1) { Execution::Sequential } else { Execution::available() };
        Ok(RunConfig { cache_dir, format, workers, exec })
    }
}

/// Orbit choice from `--orbit` / `--orbit-degree`; `None` means all orbits.
pub fn selector(label: Option<String>, degree: Option<usize>) -> Option<OrbitSelector> {
    label.map(OrbitSelector::Label).or(degree.map(OrbitSelector::Degree))
}

/// Integers written plainly or as `1e5`.
pub fn parse_count(s: &str) -> Result<u64, String> {
    if let Some((m, e)) = s.split_once(['e', 'E']) {
        let m: u64 = m.parse().map_err(|_| format!("bad number {s}"))?;
        let e: u32 = e.parse().map_err(|_| format!("bad exponent in {s}"))?;
        return 10u64.checked_pow(e).and_then(|t| t.checked_mul(m)).ok_or_else(|| format!("{s} overflows"));
    }
    s.parse().map_err(|_| format!("bad number {s}"))
}

pub fn check_bound(bound: u64) -> Result<u64, AppError> {
    if bound < 2 {
        return Err(AppError::Usage(format!("bound must be at least 2, got {bound}")));
    }
    Ok(bound)
}

/// Comma separated, strictly ascending, each at least 2.
pub fn parse_grid(s: &str) -> Result<Vec<u64>, AppError> {
    let grid = s
        .split(',')
        .map(|t| parse_count(t.trim()).map_err(AppError::Usage).and_then(check_bound))
        .collect::<Result<Vec<u64>, _>>()?;
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(AppError::Usage(format!("grid must be strictly ascending: {s}")));
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_grids() {
        assert_eq!(parse_count("1e5"), Ok(100_000));
        assert_eq!(parse_count("3e2"), Ok(300));
        assert_eq!(parse_count("1000"), Ok(1000));
        assert!(parse_count("x").is_err());
        assert_eq!(parse_grid("100, 1e3,5000").unwrap(), vec![100, 1000, 5000]);
        assert!(parse_grid("100,100").is_err());
        assert!(parse_grid("1").is_err());
        assert!(RunConfig::resolve(None, Format::Csv, Some(0)).is_err());
    }
}
