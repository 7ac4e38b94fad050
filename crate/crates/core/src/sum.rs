//! `(1+eps)`-approximate summation of sorted nonnegative lists.
//!
//! The list is peeled from the right into regions `R_1, R_2, ...`: each
//! `R_i` is an approximate region of values at least `b_i = X[r_i']/(1+delta)`
//! inside `X[1..r_i']`, and contributes `|R_i| * b_i`. Peeling stops once
//! the next right end falls below `delta * X[n] / (3n)`; what is left sums to
//! less than `delta * X[n] / 3`.

use serde::Serialize;

use crate::access::{Ext, Region, SortedAccess};
use crate::error::{Error, Result};
use crate::region::approximate_region;

/// One peeled region with its threshold and contribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SumEntry {
    pub region: Region,
    pub threshold: f64,
    pub partial: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SumBreakdown {
    pub entries: Vec<SumEntry>,
    pub estimate: f64,
    pub cycles: u64,
    pub epsilon: f64,
    pub delta: f64,
}

/// Internal region accuracy used for a requested `eps`.
///
/// With the tail below `delta X[n]/3 <= delta S/3`, the estimate is at least
/// `S (1 - delta/3) / (1 + delta)`, which is `>= S / (1+eps)` exactly when
/// `delta <= 3 eps / (4 + eps)`.
pub fn internal_delta(epsilon: f64) -> f64 {
    3.0 * epsilon / (4.0 + epsilon)
}

/// Rejects negative reads; they void every sublinear guarantee.
struct NonNegative<'a, A: ?Sized> {
    inner: &'a mut A,
}

impl<A: SortedAccess + ?Sized> SortedAccess for NonNegative<'_, A> {
    fn len(&self) -> u64 {
        self.inner.len()
    }

    fn get(&mut self, i: i64) -> Result<Ext> {
        let v = self.inner.get(i)?;
        match v {
            Ext::Finite(x) if x < 0.0 || x.is_nan() => Err(Error::InputContract {
                index: i as u64,
                reason: format!("negative element {x}; sorted lists with negative entries admit no sublinear approximation"),
            }),
            _ => Ok(v),
        }
    }
}

fn finite(v: Ext) -> f64 {
    v.finite().unwrap_or(f64::NEG_INFINITY)
}

/// Approximates `X[1] + ... + X[n]` within a factor `1+eps`.
pub fn approximate_sum<A: SortedAccess + ?Sized>(
    view: &mut A,
    epsilon: f64,
    n: u64,
) -> Result<SumBreakdown> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Parameter(format!("epsilon must lie in (0,1), got {epsilon}")));
    }
    if n == 0 || n > view.len() {
        return Err(Error::Parameter(format!(
            "n must lie in [1, {}], got {n}",
            view.len()
        )));
    }
    let delta = internal_delta(epsilon);
    let mut view = NonNegative { inner: view };
    let mut out = SumBreakdown {
        entries: Vec::new(),
        estimate: 0.0,
        cycles: 0,
        epsilon,
        delta,
    };

    let top = finite(view.get(n as i64)?);
    if top == 0.0 {
        return Ok(out);
    }
    let floor = delta * top / (3.0 * n as f64);

    let mut right = n;
    let mut right_value = top;
    while right >= 1 && right_value >= floor {
        let threshold = right_value / (1.0 + delta);
        let region = approximate_region(&mut view, threshold, delta, right)?;
        let Some((lo, hi)) = region.bounds() else {
            return Err(Error::Internal(format!(
                "no position of X[1..{right}] reaches {threshold} although X[{right}] = {right_value}"
            )));
        };
        let partial = (hi - lo + 1) as f64 * threshold;
        out.entries.push(SumEntry {
            region,
            threshold,
            partial,
        });
        out.estimate += partial;
        out.cycles += 1;

        right = lo - 1;
        if right >= 1 {
            right_value = finite(view.get(right as i64)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::access::SortedView;

    #[test]
    fn all_zero_list() {
        let mut v = SortedView::from_vec(vec![0.0; 50]).unwrap();
        let out = approximate_sum(&mut v, 0.3, 50).unwrap();
        assert_eq!(out.estimate, 0.0);
        assert_eq!(out.cycles, 0);
        assert_eq!(v.queries(), 1);
    }

    #[test]
    fn single_element() {
        let mut v = SortedView::from_vec(vec![8.0]).unwrap();
        let out = approximate_sum(&mut v, 0.4, 1).unwrap();
        let delta = internal_delta(0.4);
        assert_eq!(out.delta, delta);
        assert_eq!(out.cycles, 1);
        assert_eq!(out.entries[0].region, Region::Span { lo: 1, hi: 1 });
        assert_eq!(out.estimate, 8.0 / (1.0 + delta));
    }

    #[test]
    fn linear_hundred() {
        let mut v = SortedView::from_fn(100, |i| i as f64);
        let out = approximate_sum(&mut v, 0.1, 100).unwrap();
        assert!(out.estimate >= 5050.0 / 1.1 && out.estimate <= 5050.0 * 1.1, "{}", out.estimate);
    }

    #[test]
    fn regions_chain_right_to_left() {
        let mut v = SortedView::from_fn(10_000, |i| (i as f64).sqrt());
        let out = approximate_sum(&mut v, 0.2, 10_000).unwrap();
        let mut right = 10_000;
        for e in &out.entries {
            let (lo, hi) = e.region.bounds().unwrap();
            assert_eq!(hi, right);
            assert_eq!(e.partial, (hi - lo + 1) as f64 * e.threshold);
            right = lo - 1;
        }
        for w in out.entries.windows(2) {
            assert!(w[1].threshold < w[0].threshold / (1.0 + out.delta));
        }
        let total: f64 = out.entries.iter().map(|e| e.partial).sum();
        assert!((total - out.estimate).abs() <= 1e-9 * total);
    }

    #[test]
    fn negative_elements_are_rejected() {
        let mut v = SortedView::from_vec(vec![-12.0, 2.0, 4.0, 6.0]).unwrap();
        let err = approximate_sum(&mut v, 0.5, 4).unwrap_err();
        assert!(matches!(err, Error::InputContract { index: 1, .. }), "{err}");
    }

    #[test]
    fn rejects_bad_epsilon() {
        let mut v = SortedView::from_vec(vec![1.0]).unwrap();
        for eps in [0.0, 1.0, 2.0, -0.1, f64::NAN] {
            assert!(matches!(approximate_sum(&mut v, eps, 1), Err(Error::Parameter(_))));
        }
    }

    #[test]
    fn tail_just_above_the_cutoff_is_still_covered() {
        // Two small values sit between the cutoff and (1+delta) times it.
        // Stopping on the threshold b_i instead of X[r'] would drop them and
        // undershoot S/(1+eps).
        let eps = 0.5;
        let delta = internal_delta(eps);
        let cutoff = delta / 9.0;
        let a = cutoff * (1.0 + delta / 2.0);
        let xs = vec![a, a, 1.0];
        let s: f64 = xs.iter().sum();
        let mut v = SortedView::from_vec(xs).unwrap();
        let out = approximate_sum(&mut v, eps, 3).unwrap();
        assert!(out.estimate >= s / (1.0 + eps) && out.estimate <= s * (1.0 + eps));
    }
}
