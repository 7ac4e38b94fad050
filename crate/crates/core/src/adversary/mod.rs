//! Executable lower-bound constructions.
//!
//! Each referee owns the query channel an algorithm reads through, so query
//! budgets are enforced here rather than trusted, and every answer the
//! algorithm sees is recorded.
//!
//! * [`blocks`]: two block-structured lists agreeing on every queried block
//!   whose sums differ by more than any `d`-approximation can absorb.
//! * [`interval`]: an adaptive 0/1 adversary that keeps two lists alive
//!   until the algorithm commits to a region.
//! * [`negative`]: one negative head makes every unqueried element decisive.

pub mod algorithms;
pub mod blocks;
pub mod interval;
pub mod negative;

use serde::Serialize;

use crate::access::{Ext, SortedAccess};
use crate::error::{Error, Result};

pub use algorithms::{RegionFinder, SumEstimator};
pub use blocks::{build_block_lists, referee_block_game, BlockGameReport, BlockList, BlockListSpec, Prefix};
pub use interval::{referee_region_game, FinalizedPair, IntervalAdversary, RegionGameReport};
pub use negative::negative_list_pair;

/// How a game ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// The answer is wrong for at least one of the two consistent lists.
    Defeated,
    /// The answer is valid for both lists.
    NotDefeated,
    /// The algorithm asked for more queries than its budget allowed.
    BudgetViolation,
}

/// Query channel with a hard budget and a transcript.
pub struct Budgeted<A> {
    inner: A,
    budget: Option<u64>,
    transcript: Vec<(u64, f64)>,
}

impl<A: SortedAccess> Budgeted<A> {
    pub fn new(inner: A, budget: Option<u64>) -> Self {
        Budgeted {
            inner,
            budget,
            transcript: Vec::new(),
        }
    }

    pub fn used(&self) -> u64 {
        self.transcript.len() as u64
    }

    pub fn transcript(&self) -> &[(u64, f64)] {
        &self.transcript
    }

    pub fn into_parts(self) -> (A, Vec<(u64, f64)>) {
        (self.inner, self.transcript)
    }
}

impl<A: SortedAccess> SortedAccess for Budgeted<A> {
    fn len(&self) -> u64 {
        self.inner.len()
    }

    fn get(&mut self, i: i64) -> Result<Ext> {
        if i <= 0 {
            return Ok(Ext::NegInf);
        }
        if let Some(budget) = self.budget {
            if self.used() >= budget {
                return Err(Error::BudgetExceeded { budget });
            }
        }
        let v = self.inner.get(i)?;
        if let Ext::Finite(x) = v {
            self.transcript.push((i as u64, x));
        }
        Ok(v)
    }
}

/// `log2 log2 n - log2 log2 (d+1)`: queries any `d`-approximate 1-region
/// finder must make on lists of length `n`.
pub fn region_query_lower_bound(n: u64, d: f64) -> f64 {
    (n as f64).log2().log2() - (d + 1.0).log2().log2()
}
