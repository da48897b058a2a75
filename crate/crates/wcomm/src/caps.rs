//! Size caps for constructed objects.
//!
//! Free-algebra closures and power constructions can explode
//! combinatorially; they must fail loudly instead of hanging. The caps are
//! ordinary data threaded through the calls that need them, with defaults
//! chosen for desk-scale corpora and environment-variable overrides for the
//! CLI (`WCOMM_ALGEBRA_CAP`, `WCOMM_FREE_CAP`).

/// Environment variable overriding [`Caps::algebra_cap`].
pub const ALGEBRA_CAP_ENV: &str = "WCOMM_ALGEBRA_CAP";
/// Environment variable overriding [`Caps::free_cap`].
pub const FREE_CAP_ENV: &str = "WCOMM_FREE_CAP";

/// Byte budget for materialized free-algebra vectors. Long vectors shrink
/// the effective element cap so a closure cannot silently eat all memory;
/// the cap reported in errors is the effective one.
pub(crate) const VECTOR_MEMORY_BUDGET: usize = 1 << 29; // 512 MiB

/// Size limits for constructed algebras and free-algebra closures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Maximum number of elements in a constructed algebra or power, and
    /// also the maximum number of entries in any single materialized
    /// operation table.
    pub algebra_cap: usize,
    /// Maximum number of elements materialized by a free-algebra closure.
    pub free_cap: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            algebra_cap: 1 << 20,
            free_cap: 200_000,
        }
    }
}

impl Caps {
    /// Default caps overridden by `WCOMM_ALGEBRA_CAP` / `WCOMM_FREE_CAP`
    /// when those parse as positive integers.
    pub fn from_env() -> Caps {
        let mut caps = Caps::default();
        if let Some(v) = read_env(ALGEBRA_CAP_ENV) {
            caps.algebra_cap = v;
        }
        if let Some(v) = read_env(FREE_CAP_ENV) {
            caps.free_cap = v;
        }
        caps
    }

    /// Effective element cap for a closure whose vectors have `coords`
    /// components: the configured cap, shrunk when vectors are so long that
    /// the configured cap would not fit the memory budget.
    pub(crate) fn effective_free_cap(&self, coords: usize) -> usize {
        let bytes_per = coords.max(1) * std::mem::size_of::<crate::algebra::El>();
        self.free_cap.min((VECTOR_MEMORY_BUDGET / bytes_per).max(1))
    }
}

fn read_env(name: &str) -> Option<usize> {
    std::env::var(name)
        .ok()?
        .trim()
        .parse::<usize>()
        .ok()
        .filter(|&v| v > 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let caps = Caps::default();
        assert_eq!(caps.algebra_cap, 1 << 20);
        assert_eq!(caps.free_cap, 200_000);
    }

    #[test]
    fn long_vectors_shrink_the_effective_cap() {
        let caps = Caps::default();
        assert_eq!(caps.effective_free_cap(1), 200_000);
        let coords = 1 << 20;
        assert!(caps.effective_free_cap(coords) < 200_000);
        assert!(caps.effective_free_cap(coords) >= 1);
    }
}
