//! Enumeration bounds. Defaults can be overridden through environment
//! variables `WEILINV_MAX_ORDER`, `WEILINV_MAX_LEVEL` and `WEILINV_MAX_CYCLO_ORDER`.

use std::sync::OnceLock;

pub const DEFAULT_MAX_ORDER: u64 = 10_000;
pub const DEFAULT_MAX_LEVEL: u64 = 60;
pub const DEFAULT_MAX_CYCLO_ORDER: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    /// Largest |D| for brute-force loops.
    pub max_order: u64,
    /// Largest level N for SL2(Z/N) enumeration.
    pub max_level: u64,
    /// Largest cyclotomic order M.
    pub max_cyclo_order: u64,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_order: DEFAULT_MAX_ORDER,
            max_level: DEFAULT_MAX_LEVEL,
            max_cyclo_order: DEFAULT_MAX_CYCLO_ORDER,
        }
    }
}

fn env_u64(key: &str) -> Option<u64> {
    std::env::var(key).ok()?.trim().parse().ok().filter(|&v| v > 0)
}

impl Bounds {
    pub fn from_env() -> Self {
        let d = Bounds::default();
        Bounds {
            max_order: env_u64("WEILINV_MAX_ORDER").unwrap_or(d.max_order),
            max_level: env_u64("WEILINV_MAX_LEVEL").unwrap_or(d.max_level),
            max_cyclo_order: env_u64("WEILINV_MAX_CYCLO_ORDER").unwrap_or(d.max_cyclo_order),
        }
    }
}

/// Process-wide bounds, read once from the environment.
pub fn bounds() -> Bounds {
    static B: OnceLock<Bounds> = OnceLock::new();
    *B.get_or_init(Bounds::from_env)
}
