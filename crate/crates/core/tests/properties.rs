use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use sortsum::access::{Ext, Region, SortedAccess, SortedView};
use sortsum::adversary::{build_block_lists, BlockListSpec, IntervalAdversary, Prefix};
use sortsum::oracle::{exact_b_region, exact_b_region_bisect, exact_sum, verify_region_certificate};
use sortsum::region::{approximate_region, approximate_region_traced, RegionExit};
use sortsum::sum::approximate_sum;
use sortsum::Dyadic;

/// Counts in-range reads independently of the view's own ledger.
struct Counting<'a> {
    inner: &'a mut SortedView,
    reads: u64,
}

impl SortedAccess for Counting<'_> {
    fn len(&self) -> u64 {
        self.inner.len()
    }

    fn get(&mut self, i: i64) -> sortsum::Result<Ext> {
        if i >= 1 && i as u64 <= self.inner.len() {
            self.reads += 1;
        }
        self.inner.get(i)
    }
}

/// Sorted nonnegative lists with runs of equal values and zeros.
fn sorted_list(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((0u8..4, 0.0f64..10.0), 1..max_len).prop_map(|steps| {
        let mut acc = 0.0;
        steps
            .into_iter()
            .map(|(kind, step)| {
                if kind != 0 {
                    acc += step;
                }
                acc
            })
            .collect()
    })
}

fn dyadic_value(d: &Dyadic) -> BigRational {
    let mut numer = BigInt::from(0);
    for (k, limb) in d.mantissa_limbs().iter().enumerate() {
        numer += BigInt::from(*limb) << (64 * k);
    }
    BigRational::new(numer, BigInt::from(1) << d.shift())
}

fn ladder_value(v: sortsum::LadderValue) -> BigRational {
    let (mant, shift) = v.as_dyadic_parts();
    BigRational::new(BigInt::from(mant), BigInt::from(1) << shift)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn metering_counts_every_in_range_read(xs in sorted_list(400), b_frac in 0.01f64..1.1, delta in 0.01f64..0.9) {
        let n = xs.len() as u64;
        let b = (xs[xs.len() - 1] * b_frac).max(1e-9);
        let mut view = SortedView::from_vec(xs).unwrap();
        let mut counting = Counting { inner: &mut view, reads: 0 };
        approximate_region(&mut counting, b, delta, n).unwrap();
        let reads = counting.reads;
        prop_assert_eq!(view.queries(), reads);
    }

    #[test]
    fn sentinel_reads_are_neutral(xs in sorted_list(50), i in -1000i64..=0) {
        let mut view = SortedView::from_vec(xs).unwrap();
        prop_assert_eq!(view.get(i).unwrap(), Ext::NegInf);
        prop_assert_eq!(view.queries(), 0);
    }

    #[test]
    fn generator_and_array_views_agree(xs in sorted_list(300), b_frac in 0.01f64..1.1, eps in 0.01f64..0.9) {
        let n = xs.len() as u64;
        let b = (xs[xs.len() - 1] * b_frac).max(1e-9);
        let shared = std::sync::Arc::new(xs.clone());
        let make_fn = || {
            let s = shared.clone();
            SortedView::from_fn(n, move |i| s[(i - 1) as usize])
        };
        let mut arr = SortedView::from_vec(xs.clone()).unwrap();
        let mut gen = make_fn();
        prop_assert_eq!(
            approximate_region(&mut arr, b, eps, n).unwrap(),
            approximate_region(&mut gen, b, eps, n).unwrap()
        );
        prop_assert_eq!(arr.queries(), gen.queries());
        let mut arr = SortedView::from_vec(xs).unwrap();
        let mut gen = make_fn();
        let sa = approximate_sum(&mut arr, eps, n).unwrap();
        let sg = approximate_sum(&mut gen, eps, n).unwrap();
        prop_assert_eq!(sa.estimate, sg.estimate);
        prop_assert_eq!(arr.queries(), gen.queries());
    }

    #[test]
    fn region_certificate_and_containment(xs in sorted_list(500), delta in 0.001f64..0.99, b_frac in 0.001f64..1.2) {
        let n = xs.len() as u64;
        let b = (xs[xs.len() - 1] * b_frac).max(1e-9);
        let mut view = SortedView::from_vec(xs).unwrap();
        let region = approximate_region(&mut view, b, delta, n).unwrap();
        let exact = exact_b_region(&mut view.fresh(), b, n).unwrap();
        prop_assert!(exact.is_subset_of(&region), "{} not within {}", exact, region);
        let verdict = verify_region_certificate(&mut view.fresh(), b, delta, region, n).unwrap();
        prop_assert!(verdict.passed(), "{:?}", verdict);
    }

    #[test]
    fn search_phases_bracket_the_exact_size(s in 0u64..5000, extra in 0u64..5000, delta in 0.001f64..0.99) {
        // s ones after the zeros: the exact region has size s.
        let n = s + extra + 1;
        let zeros = n - s;
        let mut view = SortedView::from_fn(n, move |i| if i > zeros { 1.0 } else { 0.0 });
        let (region, trace) = approximate_region_traced(&mut view, 1.0, delta, n).unwrap();
        prop_assert!(region.size() >= s);
        prop_assert!(region.size() as f64 <= (1.0 + delta) * s as f64);
        if trace.exit == RegionExit::Searched {
            let m = ladder_value(trace.expanded.unwrap());
            let s_big = BigRational::from_integer(BigInt::from(s));
            // Phase 1 stops with M <= s < M^2.
            prop_assert!(m <= s_big);
            prop_assert!(&m * &m > s_big);
            for step in &trace.steps {
                prop_assert!(dyadic_value(&step.lower) <= s_big);
                prop_assert_eq!(step.accepted, step.probe <= s as u128);
            }
            let reach = trace.final_reach.unwrap();
            prop_assert!(reach >= s as u128);
            prop_assert_eq!(region.size() as u128, reach.min(n as u128));
        }
    }

    #[test]
    fn probes_floor_exactly(xs in sorted_list(2000), b_frac in 0.001f64..1.0, delta in 0.0001f64..0.99) {
        let n = xs.len() as u64;
        let b = (xs[xs.len() - 1] * b_frac).max(1e-9);
        let mut view = SortedView::from_vec(xs).unwrap();
        let (_, trace) = approximate_region_traced(&mut view, b, delta, n).unwrap();
        for step in &trace.steps {
            let product = dyadic_value(&step.lower) * ladder_value(step.factor);
            prop_assert_eq!(BigInt::from(step.reach), product.floor().to_integer());
            prop_assert_eq!(BigInt::from(step.probe), product.ceil().to_integer());
        }
    }

    #[test]
    fn linear_and_bisect_oracles_agree(xs in sorted_list(300), b_frac in 0.0f64..1.2) {
        let n = xs.len() as u64;
        let b = xs[xs.len() - 1] * b_frac;
        let view = SortedView::from_vec(xs).unwrap();
        prop_assert_eq!(
            exact_b_region(&mut view.fresh(), b, n).unwrap(),
            exact_b_region_bisect(&mut view.fresh(), b, n).unwrap()
        );
    }

    #[test]
    fn sum_regions_chain_cover_and_leave_a_small_tail(xs in sorted_list(800), eps in 0.01f64..0.99) {
        let n = xs.len() as u64;
        let mut view = SortedView::from_vec(xs.clone()).unwrap();
        let out = approximate_sum(&mut view, eps, n).unwrap();
        let exact = exact_sum(&mut view.fresh(), n).unwrap();
        prop_assert!(out.estimate >= exact / (1.0 + eps) * (1.0 - 1e-12), "{} vs {}", out.estimate, exact);
        prop_assert!(out.estimate <= exact * (1.0 + eps) * (1.0 + 1e-12), "{} vs {}", out.estimate, exact);

        let mut right = n;
        for e in &out.entries {
            let (lo, hi) = e.region.bounds().unwrap();
            prop_assert_eq!(hi, right);
            // Every element of an entry's exact region pays at least b_i.
            let in_region: f64 = xs[(lo - 1) as usize..hi as usize].iter().sum();
            let exact_part = exact_b_region(&mut view.fresh(), e.threshold, hi).unwrap();
            prop_assert!(exact_part.is_subset_of(&e.region));
            prop_assert!(e.partial <= in_region * (1.0 + out.delta) * (1.0 + 1e-12));
            right = lo - 1;
        }
        let top = xs[xs.len() - 1];
        let tail: f64 = xs[..right as usize].iter().sum();
        prop_assert!(tail <= out.delta * top / 3.0 * (1.0 + 1e-12) + 0.0, "tail {} top {}", tail, top);
    }

    #[test]
    fn adversary_keeps_its_invariants(n in 2u64..1_000_000, queries in prop::collection::vec(1u64..1_000_000, 0..40)) {
        let mut adv = IntervalAdversary::new(n).unwrap();
        let (mut a_prev, mut b_prev) = (1, n);
        for q in queries {
            let p = 1 + q % n;
            let bit = adv.answer(p).unwrap();
            let (Region::Span { lo: a, .. }, Region::Span { lo: b, .. }) = (adv.interval(), adv.ones()) else {
                unreachable!()
            };
            prop_assert!(a >= a_prev && b <= b_prev && a < b);
            prop_assert_eq!(bit, u8::from(p >= b));
            prop_assert!(adv.size_invariant_holds());
            a_prev = a;
            b_prev = b;
        }
        let pair = adv.finalize();
        prop_assert!(pair.replays(adv.transcript()));
        for which in [1, 2] {
            let list = pair.materialize(which);
            prop_assert!(list.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn block_twins_agree_on_queries(m in 1u32..5, raw in prop::collection::btree_set(1u64..10_000, 0..6), tiny in any::<bool>()) {
        let prefix = if tiny { Prefix::Tiny } else { Prefix::Zeros(3) };
        let spec = BlockListSpec::new(2.0, 0.5, m, prefix).unwrap();
        let (l1, _) = build_block_lists(&spec, &BTreeSet::new()).unwrap();
        let queried: BTreeSet<u64> = raw.into_iter().map(|p| 1 + (p - 1) % l1.len()).collect();
        let (l1, l2) = build_block_lists(&spec, &queried).unwrap();
        for &p in &queried {
            prop_assert_eq!(l1.value(p), l2.value(p));
        }
        let v2 = l2.materialize();
        prop_assert!(v2.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(l2.sum() >= l1.sum());
    }
}
