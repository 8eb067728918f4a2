use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};

/// Default cap on elementary field operations for one run.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// An operation budget. Exhaustive routines charge their full estimated cost
/// up front and refuse to start when it would be exceeded.
#[derive(Debug)]
pub struct Budget {
    limit: u64,
    used: AtomicU64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(DEFAULT_BUDGET)
    }
}

impl Budget {
    pub fn new(limit: u64) -> Self {
        Budget { limit, used: AtomicU64::new(0) }
    }

    pub fn unlimited() -> Self {
        Budget::new(u64::MAX)
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn used(&self) -> u64 {
        self.used.load(Ordering::Relaxed)
    }

    pub fn charge(&self, units: u128) -> Result<()> {
        let mut current = self.used.load(Ordering::Relaxed);
        loop {
            let next = current as u128 + units;
            if next > self.limit as u128 {
                return Err(Error::BudgetExceeded { needed: next, limit: self.limit });
            }
            match self.used.compare_exchange(current, next as u64, Ordering::Relaxed, Ordering::Relaxed) {
                Ok(_) => return Ok(()),
                Err(actual) => current = actual,
            }
        }
    }
}

/// `q^k` as u128, saturating.
pub(crate) fn qpow(q: u32, k: usize) -> u128 {
    (q as u128).checked_pow(k as u32).unwrap_or(u128::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refuses_instead_of_truncating() {
        let b = Budget::new(10);
        b.charge(6).unwrap();
        assert!(matches!(b.charge(5), Err(Error::BudgetExceeded { needed: 11, limit: 10 })));
        assert_eq!(b.used(), 6);
        b.charge(4).unwrap();
        assert_eq!(b.used(), 10);
    }
}
