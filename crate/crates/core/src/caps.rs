use crate::error::{Error, Result};
use std::time::{Duration, Instant};

/// Hard resource limits. Exceeding a cap is an error, never a silent truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Largest function or condition arity accepted by minion operations.
    pub arity_cap: usize,
    /// Largest number of table cells (or materialized tuples) per object.
    pub cell_cap: usize,
    /// Largest domain size a construction may produce.
    pub size_cap: usize,
    /// Largest number of chains a chain-enumerating check may visit.
    pub chain_cap: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            arity_cap: 8,
            cell_cap: 1_000_000,
            size_cap: 1_000_000,
            chain_cap: 10_000_000,
        }
    }
}

impl Caps {
    pub fn check_cells(&self, what: &'static str, requested: usize) -> Result<()> {
        if requested > self.cell_cap {
            return Err(Error::SizeCapExceeded {
                what,
                requested: requested as u128,
                cap: self.cell_cap as u128,
            });
        }
        Ok(())
    }

    pub fn check_size(&self, what: &'static str, requested: usize) -> Result<()> {
        if requested > self.size_cap {
            return Err(Error::SizeCapExceeded {
                what,
                requested: requested as u128,
                cap: self.size_cap as u128,
            });
        }
        Ok(())
    }

    pub fn check_arity(&self, what: &'static str, requested: usize) -> Result<()> {
        if requested > self.arity_cap {
            return Err(Error::SizeCapExceeded {
                what,
                requested: requested as u128,
                cap: self.arity_cap as u128,
            });
        }
        Ok(())
    }
}

/// Wall-clock budget. `Deadline::none()` never expires.
#[derive(Clone, Copy, Debug, Default)]
pub struct Deadline(Option<Instant>);

impl Deadline {
    pub fn none() -> Self {
        Deadline(None)
    }

    pub fn after(budget: Duration) -> Self {
        Deadline(Some(Instant::now() + budget))
    }

    pub fn after_secs(secs: u64) -> Self {
        Self::after(Duration::from_secs(secs))
    }

    pub fn expired(&self) -> bool {
        match self.0 {
            Some(t) => Instant::now() >= t,
            None => false,
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.expired() {
            Err(Error::DeadlineExceeded)
        } else {
            Ok(())
        }
    }
}

/// `base^exp` guarded against overflow and against a cap; `what` names the object for diagnostics.
pub fn checked_pow(base: usize, exp: usize, cap: usize, what: &'static str) -> Result<usize> {
    let mut acc: usize = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base).ok_or(Error::SizeCapExceeded {
            what,
            requested: u128::MAX,
            cap: cap as u128,
        })?;
        if acc > cap {
            return Err(Error::SizeCapExceeded {
                what,
                requested: acc as u128,
                cap: cap as u128,
            });
        }
    }
    Ok(acc)
}
