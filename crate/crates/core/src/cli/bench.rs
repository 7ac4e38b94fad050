//! Approximate vs brute-force summation over a function-backed list.
//!
//! The shrinking factors `2^(2^k)` and `1 + 2^-j` are not tabulated: the
//! ladder holds them as exact dyadic values, which covers every entry a
//! precomputed power table would.

use std::time::Instant;

use serde::Serialize;

use crate::access::{SortedAccess, SortedView};
use crate::error::{Error, Result};
use crate::oracle::{exact_sum, SumCertificate};
use crate::sum::approximate_sum;

pub const DEFAULT_N: u64 = 10_000_000;
pub const DEFAULT_REPEATS: u32 = 100;
pub const DEFAULT_EPSILONS: [f64; 4] = [0.1, 0.01, 0.001, 0.0001];

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub epsilon: f64,
    pub queries: u64,
    pub exact_queries: u64,
    pub cycles: u64,
    pub estimate: f64,
    pub exact: f64,
    pub verdict: &'static str,
    pub median_ms: f64,
    pub exact_median_ms: f64,
    /// `exact_median_ms / median_ms`.
    pub speedup: f64,
    pub below_hundredth: bool,
    pub may_exceed_brute_force: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub generator: String,
    pub n: u64,
    pub repeats: u32,
    pub rows: Vec<BenchRow>,
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let k = xs.len();
    if k % 2 == 1 {
        xs[k / 2]
    } else {
        (xs[k / 2 - 1] + xs[k / 2]) / 2.0
    }
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Runs each epsilon `repeats` times against `repeats` brute-force passes.
/// Repeats run one after another so timings do not compete for cores.
pub fn run_bench(view: &SortedView, generator: &str, epsilons: &[f64], repeats: u32) -> Result<BenchReport> {
    if repeats == 0 {
        return Err(Error::Parameter("repeats must be at least 1".into()));
    }
    let n = view.len();
    if n == 0 {
        return Err(Error::Parameter("bench needs a nonempty list".into()));
    }

    let mut exact_times = Vec::with_capacity(repeats as usize);
    let mut exact = 0.0;
    for _ in 0..repeats {
        let mut v = view.fresh();
        let t = Instant::now();
        exact = std::hint::black_box(exact_sum(&mut v, n)?);
        exact_times.push(ms(t));
    }
    let exact_median_ms = median(exact_times);

    let mut rows = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let mut times = Vec::with_capacity(repeats as usize);
        let mut last = None;
        for _ in 0..repeats {
            let mut v = view.fresh();
            let t = Instant::now();
            let out = std::hint::black_box(approximate_sum(&mut v, eps, n)?);
            times.push(ms(t));
            last = Some((out, v.queries()));
        }
        let (out, queries) = last.expect("repeats >= 1");
        let median_ms = median(times);
        rows.push(BenchRow {
            epsilon: eps,
            queries,
            exact_queries: n,
            cycles: out.cycles,
            estimate: out.estimate,
            exact,
            verdict: if SumCertificate::new(exact, out.estimate, eps).pass { "pass" } else { "fail" },
            median_ms,
            exact_median_ms,
            speedup: exact_median_ms / median_ms,
            below_hundredth: queries * 100 < n,
            may_exceed_brute_force: queries >= n,
        });
    }
    Ok(BenchReport {
        generator: generator.to_string(),
        n,
        repeats,
        rows,
    })
}
