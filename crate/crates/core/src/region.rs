//! Approximate b-region search.
//!
//! Given a nondecreasing list `X[1..n]` and a threshold `b`, finds a suffix
//! `[s, n]` that holds every position with `X[j] >= b` and in which at least
//! a `1/(1+delta)` fraction of positions are `>= b`, using
//! `O(log 1/delta + log log n)` queries.
//!
//! The search squares a shrink factor `m` until the suffix of length `m^2`
//! overshoots the region, then walks `m` back down the [`LadderValue`]
//! ladder, keeping `r <= s < m r` for the true region size `s` after every
//! step.

use serde::Serialize;

use crate::access::{Region, SortedAccess};
use crate::error::{Error, Result};
use crate::ladder::{Dyadic, LadderValue};

/// Longest list the exact arithmetic is validated for.
pub const MAX_REGION_LEN: u64 = 1 << 48;

/// Smallest accuracy parameter accepted.
pub const MIN_DELTA: f64 = 1.0 / (1u64 << 40) as f64;

/// Which exit the search took.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegionExit {
    /// `X[n] < b`.
    NoneAbove,
    /// `X[n-1] < b <= X[n]`.
    LastOnly,
    /// `X[1] >= b`.
    Whole,
    /// Both search phases ran.
    Searched,
}

/// One shrinking step of the second phase.
#[derive(Debug, Clone)]
pub struct LadderStep {
    /// `m_{i+1}`.
    pub factor: LadderValue,
    /// `r_i` before the step.
    pub lower: Dyadic,
    /// `floor(m_{i+1} * r_i)`.
    pub reach: u128,
    /// `ceil(m_{i+1} * r_i)`, the suffix length actually probed.
    pub probe: u128,
    /// Whether `X[n - probe + 1] >= b`, i.e. `r_{i+1} = m_{i+1} r_i`.
    pub accepted: bool,
}

/// Full record of one search, for invariant checking and exactness audits.
#[derive(Debug, Clone)]
pub struct RegionTrace {
    pub n: u64,
    pub exit: RegionExit,
    /// Tower value at the end of the first phase.
    pub expanded: Option<LadderValue>,
    /// Number of squaring cycles in the first phase.
    pub expand_cycles: u32,
    pub steps: Vec<LadderStep>,
    /// Final `m_i`, `r_i` and `floor(m_i r_i)`.
    pub final_factor: Option<LadderValue>,
    pub final_lower: Option<Dyadic>,
    pub final_reach: Option<u128>,
}

impl RegionTrace {
    fn early(n: u64, exit: RegionExit) -> Self {
        RegionTrace {
            n,
            exit,
            expanded: None,
            expand_cycles: 0,
            steps: Vec::new(),
            final_factor: None,
            final_lower: None,
            final_reach: None,
        }
    }
}

fn check_params<A: SortedAccess + ?Sized>(view: &A, b: f64, delta: f64, n: u64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Parameter(format!("delta must lie in (0,1), got {delta}")));
    }
    if delta < MIN_DELTA {
        return Err(Error::Parameter(format!(
            "delta {delta} below the supported minimum 2^-40"
        )));
    }
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::Parameter(format!("threshold b must be positive and finite, got {b}")));
    }
    if n == 0 || n > view.len() {
        return Err(Error::Parameter(format!(
            "n must lie in [1, {}], got {n}",
            view.len()
        )));
    }
    if n > MAX_REGION_LEN {
        return Err(Error::Parameter(format!("n = {n} exceeds the supported 2^48")));
    }
    Ok(())
}

/// `(1+delta)`-approximate `b`-region of `X[1..n]`.
pub fn approximate_region<A: SortedAccess + ?Sized>(
    view: &mut A,
    b: f64,
    delta: f64,
    n: u64,
) -> Result<Region> {
    search(view, b, delta, n, None)
}

/// [`approximate_region`] plus the full step record.
pub fn approximate_region_traced<A: SortedAccess + ?Sized>(
    view: &mut A,
    b: f64,
    delta: f64,
    n: u64,
) -> Result<(Region, RegionTrace)> {
    let mut trace = RegionTrace::early(n, RegionExit::Searched);
    let region = search(view, b, delta, n, Some(&mut trace))?;
    Ok((region, trace))
}

/// Position `n - reach + 1`, clamped into the sentinel range when negative.
#[inline]
fn back_from(n: u64, reach: u128) -> i64 {
    let p = n as i128 - reach as i128 + 1;
    p.max(0) as i64
}

fn search<A: SortedAccess + ?Sized>(
    view: &mut A,
    b: f64,
    delta: f64,
    n: u64,
    mut trace: Option<&mut RegionTrace>,
) -> Result<Region> {
    check_params(view, b, delta, n)?;
    let last = n as i64;

    let mut finish_early = |exit, region| {
        if let Some(t) = trace.as_deref_mut() {
            *t = RegionTrace::early(n, exit);
        }
        Ok(region)
    };
    if !view.get(last)?.at_least(b) {
        return finish_early(RegionExit::NoneAbove, Region::Empty);
    }
    if !view.get(last - 1)?.at_least(b) {
        return finish_early(RegionExit::LastOnly, Region::Span { lo: n, hi: n });
    }
    if view.get(1)?.at_least(b) {
        return finish_early(RegionExit::Whole, Region::Span { lo: 1, hi: n });
    }

    // Phase 1: square m = 2^(2^k) while the suffix of length m^2 is all >= b.
    let mut m = LadderValue::Tower(0);
    let mut expand_cycles = 0;
    loop {
        let squared = m
            .square()
            .ok_or_else(|| Error::Internal("tower exponent exceeded its bound".into()))?;
        let (len, _) = squared.as_dyadic_parts();
        expand_cycles += 1;
        if view.get(back_from(n, len))?.at_least(b) {
            m = squared;
        } else {
            break;
        }
    }

    // Phase 2: shrink m down the ladder, advancing r when the probe hits.
    let (start, _) = m.as_dyadic_parts();
    let mut lower = Dyadic::from_int(start);
    let mut steps = Vec::new();
    while m.at_least_one_plus(delta) {
        let next = m.step();
        let product = lower.mul_ladder(next)?;
        let (reach, probe) = product
            .floor()
            .zip(product.ceil())
            .ok_or_else(|| Error::Internal("probe offset exceeds 128 bits".into()))?;
        // Probing the ceiling accepts exactly when m r <= s, so r never
        // exceeds the region size even when it is fractional.
        let accepted = view.get(back_from(n, probe))?.at_least(b);
        if trace.is_some() {
            steps.push(LadderStep {
                factor: next,
                lower,
                reach,
                probe,
                accepted,
            });
        }
        if accepted {
            lower = product;
        }
        m = next;
    }

    let reach = lower
        .mul_ladder(m)?
        .floor()
        .ok_or_else(|| Error::Internal("region length exceeds 128 bits".into()))?;
    if reach == 0 {
        return Err(Error::Internal("empty region after a successful search".into()));
    }
    // m r can overshoot n when only a short prefix lies below b; [1, n] is
    // then still within the (1+delta) bound.
    let size = reach.min(n as u128) as u64;
    if let Some(t) = trace {
        *t = RegionTrace {
            n,
            exit: RegionExit::Searched,
            expanded: Some(LadderValue::Tower(start.trailing_zeros().trailing_zeros())),
            expand_cycles,
            steps,
            final_factor: Some(m),
            final_lower: Some(lower),
            final_reach: Some(reach),
        };
    }
    Ok(Region::Span {
        lo: n - size + 1,
        hi: n,
    })
}
