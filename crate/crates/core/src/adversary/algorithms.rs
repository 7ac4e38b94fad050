//! Built-in algorithms the referees can be played against.

use crate::access::{Region, SortedAccess};
use crate::error::{Error, Result};
use crate::oracle::exact_sum;
use crate::region::approximate_region;
use crate::sum::approximate_sum;

/// Estimates the sum of a sorted nonnegative list through a query channel.
pub trait SumEstimator {
    fn name(&self) -> &str;
    fn estimate(&mut self, list: &mut dyn SortedAccess) -> Result<f64>;
}

/// Finds an approximate 1-region of a sorted 0/1 list.
pub trait RegionFinder {
    fn name(&self) -> &str;
    fn find(&mut self, list: &mut dyn SortedAccess) -> Result<Region>;
}

fn read(list: &mut dyn SortedAccess, p: u64) -> Result<f64> {
    Ok(list.get(p as i64)?.finite().unwrap_or(f64::NEG_INFINITY))
}

fn exhausted(used: u64, budget: Option<u64>) -> bool {
    budget.is_some_and(|b| used >= b)
}

/// Reads every element.
pub struct ExactScanner;

impl SumEstimator for ExactScanner {
    fn name(&self) -> &str {
        "exact-scan"
    }

    fn estimate(&mut self, list: &mut dyn SortedAccess) -> Result<f64> {
        let n = list.len();
        exact_sum(list, n)
    }
}

/// Answers a fixed value without looking.
pub struct ConstantEstimator(pub f64);

impl SumEstimator for ConstantEstimator {
    fn name(&self) -> &str {
        "constant-output"
    }

    fn estimate(&mut self, _list: &mut dyn SortedAccess) -> Result<f64> {
        Ok(self.0)
    }
}

/// Samples positions `n, n-1, n-3, n-7, ...` (gaps doubling) and sums the
/// staircase they define.
pub struct PrefixSampler {
    pub budget: Option<u64>,
}

impl SumEstimator for PrefixSampler {
    fn name(&self) -> &str {
        "prefix-sampler"
    }

    fn estimate(&mut self, list: &mut dyn SortedAccess) -> Result<f64> {
        let n = list.len();
        if n == 0 {
            return Ok(0.0);
        }
        let mut used = 0;
        let mut prev_pos = n;
        let mut last = read(list, n)?;
        used += 1;
        let mut total = last;
        let mut gap = 1u64;
        while !exhausted(used, self.budget) && prev_pos > gap {
            let pos = prev_pos - gap;
            let v = read(list, pos)?;
            used += 1;
            total += v * gap as f64;
            prev_pos = pos;
            last = v;
            gap = gap.saturating_mul(2);
        }
        // Unsampled prefix [1, prev_pos - 1]: half its upper bound.
        total += last * (prev_pos - 1) as f64 / 2.0;
        Ok(total)
    }
}

/// Reads the last `budget` elements exactly and extrapolates the rest at
/// half the smallest value seen.
pub struct TruncatedScan {
    pub budget: u64,
}

impl SumEstimator for TruncatedScan {
    fn name(&self) -> &str {
        "truncated-scan"
    }

    fn estimate(&mut self, list: &mut dyn SortedAccess) -> Result<f64> {
        let n = list.len();
        let reads = self.budget.min(n);
        let mut total = 0.0;
        let mut smallest = 0.0;
        for p in (n - reads + 1..=n).rev() {
            smallest = read(list, p)?;
            total += smallest;
        }
        Ok(total + smallest * (n - reads) as f64 / 2.0)
    }
}

/// The sublinear `(1+eps)` approximation.
pub struct ApproxSum {
    pub epsilon: f64,
}

impl SumEstimator for ApproxSum {
    fn name(&self) -> &str {
        "approximate-sum"
    }

    fn estimate(&mut self, list: &mut dyn SortedAccess) -> Result<f64> {
        let n = list.len();
        Ok(approximate_sum(list, self.epsilon, n)?.estimate)
    }
}

/// Binary search for the first 1, stopping after `budget` probes and
/// answering the widest region still consistent with what it saw.
pub struct BinarySearchFinder {
    pub budget: Option<u64>,
}

impl RegionFinder for BinarySearchFinder {
    fn name(&self) -> &str {
        if self.budget.is_some() {
            "truncated-binsearch"
        } else {
            "full-binsearch"
        }
    }

    fn find(&mut self, list: &mut dyn SortedAccess) -> Result<Region> {
        let n = list.len();
        // First 1 lies in [lo, hi]; hi = n + 1 means "no 1 at all".
        let (mut lo, mut hi) = (1u64, n + 1);
        let mut used = 0;
        while lo < hi && !exhausted(used, self.budget) {
            let mid = lo + (hi - lo) / 2;
            used += 1;
            if read(list, mid)? >= 1.0 {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        Ok(Region::span(lo, n).unwrap_or(Region::Empty))
    }
}

/// Exponential search leftwards from the end (offsets 1, 3, 7, ...), then
/// bisection, truncated after `budget` probes.
pub struct GallopFinder {
    pub budget: Option<u64>,
}

impl RegionFinder for GallopFinder {
    fn name(&self) -> &str {
        if self.budget.is_some() {
            "truncated-gallop"
        } else {
            "gallop"
        }
    }

    fn find(&mut self, list: &mut dyn SortedAccess) -> Result<Region> {
        let n = list.len();
        let (mut lo, mut hi) = (1u64, n + 1);
        let mut used = 0;
        let mut offset = 0u64;
        // Gallop: shrink hi while probes keep hitting 1s.
        while !exhausted(used, self.budget) && offset < n {
            let p = n - offset;
            used += 1;
            if read(list, p)? >= 1.0 {
                hi = p;
                offset = offset * 2 + 1;
            } else {
                lo = p + 1;
                break;
            }
        }
        while lo < hi && !exhausted(used, self.budget) {
            let mid = lo + (hi - lo) / 2;
            used += 1;
            if read(list, mid)? >= 1.0 {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        Ok(Region::span(lo, n).unwrap_or(Region::Empty))
    }
}

/// The `(1+delta)`-approximate region search with threshold 1.
pub struct ApproxRegionFinder {
    pub delta: f64,
}

impl RegionFinder for ApproxRegionFinder {
    fn name(&self) -> &str {
        "approximate-region"
    }

    fn find(&mut self, list: &mut dyn SortedAccess) -> Result<Region> {
        let n = list.len();
        approximate_region(list, 1.0, self.delta, n)
    }
}

/// Always answers `[1, n]`.
pub struct WholeListFinder;

impl RegionFinder for WholeListFinder {
    fn name(&self) -> &str {
        "constant-output"
    }

    fn find(&mut self, list: &mut dyn SortedAccess) -> Result<Region> {
        Ok(Region::span(1, list.len()).unwrap_or(Region::Empty))
    }
}

/// Accuracy handed to the built-in approximations for a target factor `d`.
fn accuracy_for(d: f64) -> f64 {
    (d - 1.0).clamp(1e-6, 0.5)
}

pub const REGION_FINDERS: &[&str] = &[
    "truncated-binsearch",
    "full-binsearch",
    "truncated-gallop",
    "approximate-region",
    "constant-output",
];

pub const SUM_ESTIMATORS: &[&str] = &[
    "prefix-sampler",
    "truncated-scan",
    "exact-scan",
    "approximate-sum",
    "constant-output",
];

fn unknown(kind: &str, name: &str, known: &[&str]) -> Error {
    Error::Parameter(format!("unknown {kind} algorithm '{name}'; expected one of {}", known.join(", ")))
}

/// Looks up a built-in region finder. Truncated finders stop after `budget`.
pub fn region_finder(name: &str, budget: Option<u64>, d: f64) -> Result<Box<dyn RegionFinder>> {
    Ok(match name {
        "truncated-binsearch" => Box::new(BinarySearchFinder {
            budget: Some(budget.unwrap_or(0)),
        }),
        "full-binsearch" => Box::new(BinarySearchFinder { budget: None }),
        "truncated-gallop" => Box::new(GallopFinder {
            budget: Some(budget.unwrap_or(0)),
        }),
        "approximate-region" => Box::new(ApproxRegionFinder { delta: accuracy_for(d) }),
        "constant-output" => Box::new(WholeListFinder),
        _ => return Err(unknown("region", name, REGION_FINDERS)),
    })
}

/// Looks up a built-in sum estimator. Sampling estimators stop after `budget`.
pub fn sum_estimator(name: &str, budget: Option<u64>, d: f64) -> Result<Box<dyn SumEstimator>> {
    Ok(match name {
        "prefix-sampler" => Box::new(PrefixSampler { budget }),
        "truncated-scan" => Box::new(TruncatedScan {
            budget: budget.unwrap_or(0),
        }),
        "exact-scan" => Box::new(ExactScanner),
        "approximate-sum" => Box::new(ApproxSum { epsilon: accuracy_for(d) }),
        "constant-output" => Box::new(ConstantEstimator(0.0)),
        _ => return Err(unknown("sum", name, SUM_ESTIMATORS)),
    })
}
