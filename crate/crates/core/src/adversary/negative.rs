//! Lists with one negative head, where every element is decisive.

use crate::error::{Error, Result};

/// Builds `X = [-m(m+1), 2, 4, ..., 2m]` (sum 0) and a copy `Y` with
/// position `skipped` raised by 1 (sum 1). Both are sorted and agree
/// everywhere except `skipped`, so any algorithm that never reads
/// `skipped` answers both the same, yet no multiplicative factor relates
/// 0 and 1.
pub fn negative_list_pair(m: u64, skipped: u64) -> Result<(Vec<f64>, Vec<f64>)> {
    if m == 0 {
        return Err(Error::Parameter("m must be at least 1".into()));
    }
    if skipped == 0 || skipped > m + 1 {
        return Err(Error::Parameter(format!("skipped position must lie in [1, {}], got {skipped}", m + 1)));
    }
    let head = m
        .checked_mul(m + 1)
        .filter(|&h| h <= 1 << 53)
        .ok_or_else(|| Error::Parameter(format!("m = {m} is too large for exact doubles")))?;
    let mut x = Vec::with_capacity(m as usize + 1);
    x.push(-(head as f64));
    x.extend((1..=m).map(|i| (2 * i) as f64));
    let mut y = x.clone();
    y[(skipped - 1) as usize] += 1.0;
    Ok((x, y))
}
