//! Size guard for exhaustive enumerations.

use std::sync::OnceLock;

use thiserror::Error;

pub const DEFAULT_MAX_ENUM: u64 = 1 << 24;
pub const ENV_VAR: &str = "GUARD_MAX_ENUM";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("enumeration of {q}^{k} items exceeds the limit of {limit}")]
pub struct TooLarge {
    pub q: u64,
    pub k: usize,
    pub limit: u64,
}

/// Current limit; read from the environment once per process.
pub fn max_enum() -> u64 {
    static LIMIT: OnceLock<u64> = OnceLock::new();
    *LIMIT.get_or_init(|| {
        std::env::var(ENV_VAR)
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .unwrap_or(DEFAULT_MAX_ENUM)
    })
}

/// `q^k` if it does not exceed the limit.
pub fn check(q: u64, k: usize) -> Result<u64, TooLarge> {
    check_with(q, k, max_enum())
}

pub fn check_with(q: u64, k: usize, limit: u64) -> Result<u64, TooLarge> {
    u32::try_from(k)
        .ok()
        .and_then(|k| q.checked_pow(k))
        .filter(|&n| n <= limit)
        .ok_or(TooLarge { q, k, limit })
}
