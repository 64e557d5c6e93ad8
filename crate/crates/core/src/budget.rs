use std::time::{Duration, Instant};

use crate::error::{ForestSimError, Result};

/// Wall-clock allowance for long-running computations.
///
/// Long loops call [`Budget::check`] between units of work and bail out with
/// [`ForestSimError::Interrupted`] once the deadline has passed.
#[derive(Debug, Clone, Copy, Default)]
pub struct Budget {
    deadline: Option<Instant>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Self { deadline: None }
    }

    pub fn with_timeout(timeout: Duration) -> Self {
        Self {
            deadline: Some(Instant::now() + timeout),
        }
    }

    pub fn until(deadline: Instant) -> Self {
        Self {
            deadline: Some(deadline),
        }
    }

    pub fn is_exhausted(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    pub fn check(&self) -> Result<()> {
        if self.is_exhausted() {
            Err(ForestSimError::Interrupted)
        } else {
            Ok(())
        }
    }
}
