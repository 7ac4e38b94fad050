//! Brute-force references and certificate checkers.

use serde::Serialize;

use crate::access::{Region, SortedAccess};
use crate::error::{Error, Result};

/// `X[1] + ... + X[n]`, left to right in binary64. Exactly `n` queries.
pub fn exact_sum<A: SortedAccess + ?Sized>(view: &mut A, n: u64) -> Result<f64> {
    if n > view.len() {
        return Err(Error::OutOfRange {
            index: n as i64,
            len: view.len(),
        });
    }
    let mut total = 0.0;
    for i in 1..=n {
        total += view.get(i as i64)?.finite().unwrap_or(0.0);
    }
    Ok(total)
}

/// Exact `b`-region of `X[1..n]` by a right-to-left scan.
pub fn exact_b_region<A: SortedAccess + ?Sized>(view: &mut A, b: f64, n: u64) -> Result<Region> {
    let mut lo = n + 1;
    while lo > 1 && view.get(lo as i64 - 1)?.at_least(b) {
        lo -= 1;
    }
    Ok(Region::span(lo, n).unwrap_or(Region::Empty))
}

/// Exact `b`-region of `X[1..n]` by binary search; `O(log n)` queries.
pub fn exact_b_region_bisect<A: SortedAccess + ?Sized>(view: &mut A, b: f64, n: u64) -> Result<Region> {
    // Smallest p in [1, n+1] with X[p] >= b, where X[n+1] counts as a hit.
    let (mut lo, mut hi) = (1u64, n + 1);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if view.get(mid as i64)?.at_least(b) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(Region::span(lo, n).unwrap_or(Region::Empty))
}

/// Outcome of a region certificate check.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum RegionVerdict {
    Pass,
    Fail { position: u64, reason: String },
}

impl RegionVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, RegionVerdict::Pass)
    }
}

fn hits_enough(hits: u64, size: u64, delta: f64) -> bool {
    hits as f64 * (1.0 + delta) >= size as f64
}

fn certificate_shape(region: Region, n: u64) -> Result<Option<u64>> {
    match region {
        Region::Empty => Ok(None),
        Region::Span { lo, hi } if hi == n && lo >= 1 => Ok(Some(lo)),
        Region::Span { lo, hi } => Err(Error::MalformedCertificate(format!(
            "region [{lo},{hi}] does not end at n = {n}"
        ))),
    }
}

/// Checks that `region` is a `(1+delta)`-approximate `b`-region of
/// `X[1..n]` by reading every position.
pub fn verify_region_certificate<A: SortedAccess + ?Sized>(
    view: &mut A,
    b: f64,
    delta: f64,
    region: Region,
    n: u64,
) -> Result<RegionVerdict> {
    let Some(start) = certificate_shape(region, n)? else {
        return Ok(if n >= 1 && view.get(n as i64)?.at_least(b) {
            RegionVerdict::Fail {
                position: n,
                reason: format!("X[{n}] >= b but the region is empty"),
            }
        } else {
            RegionVerdict::Pass
        });
    };
    for j in (1..start).rev() {
        if view.get(j as i64)?.at_least(b) {
            return Ok(RegionVerdict::Fail {
                position: j,
                reason: format!("X[{j}] >= b lies left of the region"),
            });
        }
    }
    let mut hits = 0u64;
    for j in start..=n {
        if view.get(j as i64)?.at_least(b) {
            hits += 1;
        }
    }
    let size = n - start + 1;
    Ok(if hits_enough(hits, size, delta) {
        RegionVerdict::Pass
    } else {
        RegionVerdict::Fail {
            position: start,
            reason: format!("{hits} of {size} positions reach b, fewer than size/(1+delta)"),
        }
    })
}

/// Same verdict as [`verify_region_certificate`] for sorted inputs, using
/// binary search so it stays cheap on very long generator views.
pub fn verify_region_certificate_sorted<A: SortedAccess + ?Sized>(
    view: &mut A,
    b: f64,
    delta: f64,
    region: Region,
    n: u64,
) -> Result<RegionVerdict> {
    let shape = certificate_shape(region, n)?;
    let exact = exact_b_region_bisect(view, b, n)?;
    let Some(start) = shape else {
        return Ok(match exact {
            Region::Empty => RegionVerdict::Pass,
            _ => RegionVerdict::Fail {
                position: n,
                reason: format!("X[{n}] >= b but the region is empty"),
            },
        });
    };
    if let Some((first, _)) = exact.bounds() {
        if first < start {
            return Ok(RegionVerdict::Fail {
                position: start - 1,
                reason: format!("X[{}] >= b lies left of the region", start - 1),
            });
        }
    }
    let size = n - start + 1;
    let hits = exact.size();
    Ok(if hits_enough(hits, size, delta) {
        RegionVerdict::Pass
    } else {
        RegionVerdict::Fail {
            position: start,
            reason: format!("{hits} of {size} positions reach b, fewer than size/(1+delta)"),
        }
    })
}

/// Whether an estimate lies in the `(1+eps)` sandwich around the exact sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SumCertificate {
    pub exact: f64,
    pub estimate: f64,
    pub epsilon: f64,
    pub pass: bool,
    /// `estimate / exact`; 1 when both are zero.
    pub ratio: f64,
}

impl SumCertificate {
    pub fn new(exact: f64, estimate: f64, epsilon: f64) -> Self {
        let pass = if exact == 0.0 {
            estimate == 0.0
        } else {
            exact / (1.0 + epsilon) <= estimate && estimate <= (1.0 + epsilon) * exact
        };
        let ratio = if exact == 0.0 {
            if estimate == 0.0 {
                1.0
            } else {
                f64::INFINITY
            }
        } else {
            estimate / exact
        };
        SumCertificate {
            exact,
            estimate,
            epsilon,
            pass,
            ratio,
        }
    }
}

/// Certifies `estimate` against [`exact_sum`] of `X[1..n]`.
pub fn verify_sum<A: SortedAccess + ?Sized>(
    view: &mut A,
    n: u64,
    estimate: f64,
    epsilon: f64,
) -> Result<SumCertificate> {
    let exact = exact_sum(view, n)?;
    Ok(SumCertificate::new(exact, estimate, epsilon))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::access::SortedView;

    fn view(xs: &[f64]) -> SortedView {
        SortedView::from_vec(xs.to_vec()).unwrap()
    }

    #[test]
    fn exact_sums() {
        let mut v = view(&[1., 2., 3.]);
        assert_eq!(exact_sum(&mut v, 3).unwrap(), 6.0);
        assert_eq!(v.queries(), 3);
        assert_eq!(exact_sum(&mut view(&[]), 0).unwrap(), 0.0);
        let mut lin = SortedView::from_fn(100, |i| i as f64);
        assert_eq!(exact_sum(&mut lin, 100).unwrap(), 5050.0);
    }

    #[test]
    fn exact_regions() {
        let xs = [1., 2., 3., 4.];
        for f in [exact_b_region::<SortedView>, exact_b_region_bisect::<SortedView>] {
            assert_eq!(f(&mut view(&xs), 3.0, 4).unwrap(), Region::Span { lo: 3, hi: 4 });
            assert_eq!(f(&mut view(&xs), 5.0, 4).unwrap(), Region::Empty);
            assert_eq!(f(&mut view(&[6., 7., 8.]), 0.5, 3).unwrap(), Region::Span { lo: 1, hi: 3 });
        }
    }

    #[test]
    fn region_certificates() {
        let r = Region::Span { lo: 2, hi: 4 };
        let xs = [0., 0., 7., 9.];
        assert_eq!(verify_region_certificate(&mut view(&xs), 5.0, 1.0, r, 4).unwrap(), RegionVerdict::Pass);
        assert!(!verify_region_certificate(&mut view(&xs), 5.0, 0.1, r, 4).unwrap().passed());
        let r = Region::Span { lo: 3, hi: 4 };
        let v = verify_region_certificate(&mut view(&[0., 7., 8., 9.]), 5.0, 1.0, r, 4).unwrap();
        assert!(matches!(v, RegionVerdict::Fail { position: 2, .. }));
    }

    #[test]
    fn sorted_checker_agrees_on_examples() {
        let cases = [
            ([0., 0., 7., 9.], 1.0, Region::Span { lo: 2, hi: 4 }),
            ([0., 0., 7., 9.], 0.1, Region::Span { lo: 2, hi: 4 }),
            ([0., 7., 8., 9.], 1.0, Region::Span { lo: 3, hi: 4 }),
            ([0., 7., 8., 9.], 1.0, Region::Empty),
            ([0., 1., 2., 3.], 1.0, Region::Empty),
        ];
        for (xs, delta, r) in cases {
            let full = verify_region_certificate(&mut view(&xs), 5.0, delta, r, 4).unwrap();
            let fast = verify_region_certificate_sorted(&mut view(&xs), 5.0, delta, r, 4).unwrap();
            assert_eq!(full, fast);
        }
    }

    #[test]
    fn malformed_certificate() {
        let err = verify_region_certificate(&mut view(&[1., 2., 3.]), 1.0, 0.5, Region::Span { lo: 1, hi: 2 }, 3);
        assert!(matches!(err, Err(Error::MalformedCertificate(_))));
    }

    #[test]
    fn sum_certificates() {
        assert!(SumCertificate::new(100.0, 100.0, 0.1).pass);
        assert!(SumCertificate::new(100.0, 100.0 / 1.1, 0.1).pass);
        assert!(SumCertificate::new(100.0, 100.0 * 1.1, 0.1).pass);
        assert!(!SumCertificate::new(100.0, 50.0, 0.1).pass);
        assert!(SumCertificate::new(0.0, 0.0, 0.1).pass);
        assert!(!SumCertificate::new(0.0, 1e-300, 0.1).pass);
        let c = verify_sum(&mut view(&[1., 2., 3.]), 3, 6.0, 0.0).unwrap();
        assert!(c.pass);
        assert_eq!(c.ratio, 1.0);
    }
}
