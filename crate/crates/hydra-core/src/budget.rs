//! Resource budgets.
//!
//! Battle lengths, endomorphism images and Ackermann values grow faster
//! than any primitive recursive bound, so every loop that can grow a word
//! or a counter checks a [`Budget`] and fails with `BudgetExceeded`
//! instead of exhausting memory or spinning forever.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Maximum letter-length of any produced word.
    pub max_letter_len: u64,
    /// Maximum number of runs in any produced word.
    pub max_runs: u64,
    /// Maximum number of loop iterations (battle steps, Ackermann
    /// applications, enumeration nodes).
    pub max_steps: u64,
    /// Maximum bit size of a big-integer value.
    pub max_bits: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_letter_len: 1_000_000,
            max_runs: 1_000_000,
            max_steps: 1_000_000,
            max_bits: 1_000_000,
        }
    }
}

impl Budget {
    pub fn check_len(&self, len: u128, what: &str) -> Result<()> {
        if len > self.max_letter_len as u128 {
            return Err(Error::budget(format!("{what} (letter-length {len})")));
        }
        Ok(())
    }

    pub fn check_runs(&self, runs: usize, what: &str) -> Result<()> {
        if runs as u64 > self.max_runs {
            return Err(Error::budget(format!("{what} (run count {runs})")));
        }
        Ok(())
    }

    pub fn check_steps(&self, steps: u64, what: &str) -> Result<()> {
        if steps > self.max_steps {
            return Err(Error::budget(format!("{what} (step count {steps})")));
        }
        Ok(())
    }

    pub fn check_bits(&self, bits: u64, what: &str) -> Result<()> {
        if bits > self.max_bits {
            return Err(Error::budget(format!("{what} ({bits} bits)")));
        }
        Ok(())
    }
}
