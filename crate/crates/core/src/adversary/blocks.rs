//! Block-structured hard lists for sum estimation.
//!
//! `L1 = L0 R_1 ... R_m` where block `R_i` holds `c^(m-i)` copies of `c^i`
//! and `c = (4+delta) d^2`. Every block contributes exactly `c^m`. The twin
//! list `L2` lifts each block the algorithm never queried to the next level
//! `c^(i+1)`, adding `(c-1) c^m` per lifted block while agreeing with `L1` on
//! every query. With at most `3m/4` queries at least `m/4` blocks are lifted,
//! and no single answer is within a factor `d` of both sums.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::access::SortedView;
use crate::adversary::algorithms::SumEstimator;
use crate::adversary::{Budgeted, Verdict};
use crate::error::{Error, Result};

/// What precedes the blocks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "len", rename_all = "lowercase")]
pub enum Prefix {
    /// `t` zeros; the regime where `log(x_max/x_min)` is the smaller term.
    Zeros(u64),
    /// One element `h = delta c / n^2`; the regime where `log n` is smaller.
    Tiny,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockListSpec {
    pub d: f64,
    pub delta: f64,
    pub m: u32,
    pub prefix: Prefix,
}

impl BlockListSpec {
    pub fn new(d: f64, delta: f64, m: u32, prefix: Prefix) -> Result<Self> {
        let spec = BlockListSpec { d, delta, m, prefix };
        spec.base()?;
        Ok(spec)
    }

    /// `c = (4+delta) d^2`, required to be an integer `>= 5`.
    pub fn base(&self) -> Result<u64> {
        if !(self.d > 1.0) || !self.d.is_finite() {
            return Err(Error::Parameter(format!("d must exceed 1, got {}", self.d)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Parameter(format!("delta must lie in (0,1), got {}", self.delta)));
        }
        if self.m == 0 {
            return Err(Error::Parameter("m must be positive".into()));
        }
        let d = exact(self.d);
        let c = (BigRational::from_integer(4.into()) + exact(self.delta)) * &d * &d;
        if !c.is_integer() {
            return Err(Error::Parameter(format!(
                "(4+delta)d^2 = {c} is not an integer; choose delta so that block sizes c^(m-i) are whole"
            )));
        }
        let c = c
            .to_integer()
            .to_u64()
            .filter(|&c| c >= 5)
            .ok_or_else(|| Error::Parameter(format!("c = {c} must be an integer in [5, 2^64)")))?;
        Ok(c)
    }
}

fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

/// One concrete list of the pair, described block by block.
#[derive(Debug, Clone)]
pub struct BlockList {
    c: u64,
    prefix_len: u64,
    prefix_value: BigRational,
    /// Start position (1-based) of each block, then one past the end.
    starts: Vec<u64>,
    /// Value exponent of each block: block `i` holds `c^levels[i]`.
    levels: Vec<u32>,
}

impl BlockList {
    pub fn len(&self) -> u64 {
        *self.starts.last().unwrap() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn blocks(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    /// Block index (0-based) holding position `p`, if any.
    pub fn block_of(&self, p: u64) -> Option<usize> {
        if p <= self.prefix_len || p > self.len() {
            return None;
        }
        Some(self.starts.partition_point(|&s| s <= p) - 1)
    }

    pub fn value(&self, p: u64) -> BigRational {
        match self.block_of(p) {
            Some(k) => BigRational::from_integer(BigUint::from(self.c).pow(self.levels[k]).into()),
            None => self.prefix_value.clone(),
        }
    }

    pub fn sum(&self) -> BigRational {
        let mut total = &self.prefix_value * BigRational::from_integer(self.prefix_len.into());
        for (k, &level) in self.levels.iter().enumerate() {
            let count = self.starts[k + 1] - self.starts[k];
            total += BigRational::from_integer((BigUint::from(count) * BigUint::from(self.c).pow(level)).into());
        }
        total
    }

    /// Generator-backed view; values above `2^53` are rounded to binary64.
    pub fn view(&self) -> SortedView {
        let len = self.len();
        let list = Arc::new(self.clone());
        let prefix = self.prefix_value.to_f64().unwrap_or(0.0);
        let powers: Vec<f64> = self.levels.iter().map(|&l| (self.c as f64).powi(l as i32)).collect();
        SortedView::from_fn(len, move |p| match list.block_of(p) {
            Some(k) => powers[k],
            None => prefix,
        })
    }

    /// All values, for short lists.
    pub fn materialize(&self) -> Vec<BigRational> {
        (1..=self.len()).map(|p| self.value(p)).collect()
    }
}

/// Builds `L1` and, from the queried positions, its twin `L2`.
pub fn build_block_lists(spec: &BlockListSpec, queried: &BTreeSet<u64>) -> Result<(BlockList, BlockList)> {
    let c = spec.base()?;
    let m = spec.m;
    let mut starts = Vec::with_capacity(m as usize + 1);
    let (prefix_len, prefix_value) = match spec.prefix {
        Prefix::Zeros(t) => (t, BigRational::zero()),
        Prefix::Tiny => (1, BigRational::zero()),
    };
    let mut pos = prefix_len as u128 + 1;
    for i in 1..=m {
        starts.push(u64::try_from(pos).ok().filter(|&p| p <= i64::MAX as u64).ok_or_else(too_long)?);
        let len = (c as u128).checked_pow(m - i).ok_or_else(too_long)?;
        pos = pos.checked_add(len).ok_or_else(too_long)?;
    }
    starts.push(u64::try_from(pos).ok().filter(|&p| p <= i64::MAX as u64).ok_or_else(too_long)?);
    let total = pos - 1;

    let prefix_value = match spec.prefix {
        Prefix::Zeros(_) => prefix_value,
        Prefix::Tiny => exact(spec.delta) * BigRational::from_integer(c.into())
            / BigRational::from_integer(BigUint::from(total).pow(2).into()),
    };

    let l1 = BlockList {
        c,
        prefix_len,
        prefix_value,
        starts,
        levels: (1..=m).collect(),
    };
    if let Some(&p) = queried.iter().next_back() {
        if p > l1.len() || queried.contains(&0) {
            return Err(Error::OutOfRange {
                index: p as i64,
                len: l1.len(),
            });
        }
    }
    let mut touched = vec![false; m as usize];
    for &p in queried {
        if let Some(k) = l1.block_of(p) {
            touched[k] = true;
        }
    }
    let mut l2 = l1.clone();
    for (level, hit) in l2.levels.iter_mut().zip(&touched) {
        if !hit {
            *level += 1;
        }
    }
    Ok((l1, l2))
}

fn too_long() -> Error {
    Error::Parameter("block list longer than 2^63 positions".into())
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockGameReport {
    pub algorithm: String,
    pub spec: BlockListSpec,
    pub c: u64,
    pub n: u64,
    pub budget: Option<u64>,
    pub queries: u64,
    pub untouched_blocks: u32,
    pub estimate: Option<f64>,
    /// Exact sums, as decimal strings of reduced fractions.
    pub sum_l1: String,
    pub sum_l2: String,
    pub fails_on_l1: bool,
    pub fails_on_l2: bool,
    /// Whether the budget alone forces defeat: even the fewest possible
    /// lifted blocks push `S2/d` above `d S1`.
    pub forced: bool,
    /// Whether re-running on `L2` reproduced the transcript and the answer.
    pub replay_consistent: Option<bool>,
    pub verdict: Verdict,
}

fn within_factor(estimate: &BigRational, sum: &BigRational, d: &BigRational) -> bool {
    sum / d <= *estimate && *estimate <= sum * d
}

/// Plays `algorithm` on `L1` through a budgeted channel, builds `L2` from
/// its transcript and judges its single answer against both sums.
pub fn referee_block_game(
    algorithm: &mut dyn SumEstimator,
    spec: &BlockListSpec,
    budget: Option<u64>,
) -> Result<BlockGameReport> {
    let (l1, _) = build_block_lists(spec, &BTreeSet::new())?;
    let c = spec.base()?;
    let d = exact(spec.d);
    let sum_l1 = l1.sum();

    // Fewest blocks the budget can leave untouched, and whether that already
    // forces S2 > d^2 S1.
    let min_untouched = budget.map(|b| (spec.m as u64).saturating_sub(b));
    let forced = min_untouched.is_some_and(|u| {
        let lift = BigRational::from_integer((BigUint::from(c).pow(spec.m) * BigUint::from(c - 1) * BigUint::from(u)).into());
        (&sum_l1 + lift) > &d * &d * &sum_l1
    });

    let mut channel = Budgeted::new(l1.view(), budget);
    let answer = algorithm.estimate(&mut channel);
    let queries = channel.used();
    let transcript = channel.transcript().to_vec();
    let queried: BTreeSet<u64> = transcript.iter().map(|&(p, _)| p).collect();
    let (_, l2) = build_block_lists(spec, &queried)?;
    let untouched = l2.levels.iter().zip(&l1.levels).filter(|(a, b)| a != b).count() as u32;
    let sum_l2 = l2.sum();

    let mut report = BlockGameReport {
        algorithm: algorithm.name().to_string(),
        spec: spec.clone(),
        c,
        n: l1.len(),
        budget,
        queries,
        untouched_blocks: untouched,
        estimate: None,
        sum_l1: sum_l1.to_string(),
        sum_l2: sum_l2.to_string(),
        fails_on_l1: false,
        fails_on_l2: false,
        forced,
        replay_consistent: None,
        verdict: Verdict::BudgetViolation,
    };
    let estimate = match answer {
        Ok(s) => s,
        Err(Error::BudgetExceeded { .. }) => return Ok(report),
        Err(e) => return Err(e),
    };
    report.estimate = Some(estimate);
    let s = BigRational::from_float(estimate);
    report.fails_on_l1 = !s.as_ref().is_some_and(|s| within_factor(s, &sum_l1, &d));
    report.fails_on_l2 = !s.as_ref().is_some_and(|s| within_factor(s, &sum_l2, &d));
    report.verdict = if report.fails_on_l1 || report.fails_on_l2 {
        Verdict::Defeated
    } else {
        Verdict::NotDefeated
    };

    let mut replay = Budgeted::new(l2.view(), budget);
    let again = algorithm.estimate(&mut replay);
    report.replay_consistent = Some(again.ok() == Some(estimate) && replay.transcript() == transcript.as_slice());
    Ok(report)
}

/// `(delta+1) m c^m`.
pub fn l1_sum_bound(spec: &BlockListSpec) -> Result<BigRational> {
    let c = spec.base()?;
    Ok((exact(spec.delta) + BigRational::one())
        * BigRational::from_integer((BigUint::from(spec.m) * BigUint::from(c).pow(spec.m)).into()))
}

/// `(m - beta m) c^(m+1)` with `beta = 3/4`.
pub fn l2_sum_bound(spec: &BlockListSpec) -> Result<BigRational> {
    let c = spec.base()?;
    let quarter_m = BigRational::new(BigUint::from(spec.m).into(), 4.into());
    Ok(quarter_m * BigRational::from_integer(BigUint::from(c).pow(spec.m + 1).into()))
}

/// `floor(3m/4)`.
pub fn block_budget(m: u32) -> u64 {
    (3 * m as u64) / 4
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::algorithms::{ConstantEstimator, ExactScanner};

    fn int(v: u64) -> BigRational {
        BigRational::from_integer(v.into())
    }

    fn spec(m: u32) -> BlockListSpec {
        BlockListSpec::new(2.0, 0.5, m, Prefix::Zeros(0)).unwrap()
    }

    #[test]
    fn base_is_eighteen() {
        assert_eq!(spec(2).base().unwrap(), 18);
        assert!(BlockListSpec::new(2.0, 0.3, 2, Prefix::Zeros(0)).is_err());
        assert!(BlockListSpec::new(1.0, 0.5, 2, Prefix::Zeros(0)).is_err());
    }

    #[test]
    fn two_blocks_no_queries() {
        let (l1, l2) = build_block_lists(&spec(2), &BTreeSet::new()).unwrap();
        let mut want = vec![int(18); 18];
        want.push(int(324));
        assert_eq!(l1.materialize(), want);
        let mut lifted = vec![int(324); 18];
        lifted.push(int(5832));
        assert_eq!(l2.materialize(), lifted);
    }

    #[test]
    fn queried_block_is_kept() {
        let queried: BTreeSet<u64> = [5].into();
        let (l1, l2) = build_block_lists(&spec(2), &queried).unwrap();
        assert_eq!(l2.levels(), &[1, 3]);
        assert_eq!(l1.value(5), l2.value(5));
        assert_eq!(l2.value(19), int(5832));
    }

    #[test]
    fn all_blocks_queried_gives_identical_twin() {
        let queried: BTreeSet<u64> = [1, 19].into();
        let (l1, l2) = build_block_lists(&spec(2), &queried).unwrap();
        assert_eq!(l1.materialize(), l2.materialize());
    }

    #[test]
    fn prefixes() {
        let s = BlockListSpec::new(2.0, 0.5, 2, Prefix::Zeros(3)).unwrap();
        let (l1, _) = build_block_lists(&s, &BTreeSet::new()).unwrap();
        assert_eq!(l1.len(), 22);
        assert_eq!(l1.value(3), int(0));
        assert_eq!(l1.value(4), int(18));
        let s = BlockListSpec::new(2.0, 0.5, 2, Prefix::Tiny).unwrap();
        let (l1, _) = build_block_lists(&s, &BTreeSet::new()).unwrap();
        assert_eq!(l1.len(), 20);
        // h = 0.5 * 18 / 20^2
        assert_eq!(l1.value(1), BigRational::new(9.into(), 400.into()));
    }

    #[test]
    fn lists_are_sorted_and_agree_on_queries() {
        let s = spec(4);
        let queried: BTreeSet<u64> = [2, 330, 5000].into();
        let (l1, l2) = build_block_lists(&s, &queried).unwrap();
        for l in [&l1, &l2] {
            let xs = l.materialize();
            assert!(xs.windows(2).all(|w| w[0] <= w[1]));
        }
        for &p in &queried {
            assert_eq!(l1.value(p), l2.value(p));
        }
    }

    #[test]
    fn scanner_over_budget_is_aborted() {
        let report = referee_block_game(&mut ExactScanner, &spec(8), Some(3)).unwrap();
        assert_eq!(report.verdict, Verdict::BudgetViolation);
        assert_eq!(report.queries, 3);
    }

    #[test]
    fn constant_zero_fails_on_l1() {
        let report = referee_block_game(&mut ConstantEstimator(0.0), &spec(4), Some(3)).unwrap();
        assert_eq!(report.verdict, Verdict::Defeated);
        assert!(report.fails_on_l1);
        assert_eq!(report.replay_consistent, Some(true));
    }

    #[test]
    fn sum_bounds_hold() {
        let s = spec(16);
        let (l1, l2) = build_block_lists(&s, &(1..=12u64).collect()).unwrap();
        assert!(l1.sum() <= l1_sum_bound(&s).unwrap());
        assert!(l2.sum() >= l2_sum_bound(&s).unwrap());
    }
}
