//! Adaptive adversary for approximate 1-regions of sorted 0/1 lists.
//!
//! The referee keeps an interval `I = [a, n]` and a suffix `I_R = [b, n]`
//! with `a < b`: positions `<= a` are decided 0, positions `>= b` decided 1,
//! everything between is open. A query between the two either moves `a` up
//! (answer 0) or `b` down (answer 1), whichever keeps `|I| / |I_R|` at least
//! the square root of its previous value. After `j` answers
//! `|I| >= n^(1/2^j) |I_R|`, so a short transcript leaves two lists, ones on
//! `[b, n]` and ones on `[a+1, n]`, too far apart for one region to fit both.

use serde::Serialize;

use num_bigint::BigUint;

use crate::access::{Ext, Region, SortedAccess, SortedView};
use crate::adversary::algorithms::RegionFinder;
use crate::adversary::{region_query_lower_bound, Verdict};
use crate::error::{Error, Result};

/// Which branch answered a query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnswerCase {
    /// `p <= a`: already 0.
    DecidedZero,
    /// `p >= b`: already 1.
    DecidedOne,
    /// `|[p,n]|^2 >= |I| |I_R|`: `I` shrinks to `[p, n]`, answer 0.
    ShrinkInterval,
    /// Otherwise: `I_R` grows to `[p, n]`, answer 1.
    GrowOnes,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalAdversary {
    n: u64,
    a: u64,
    b: u64,
    answers: Vec<(u64, u8, AnswerCase)>,
}

impl IntervalAdversary {
    /// Stage 0: `I = [1, n]`, `I_R = [n, n]`, position 1 is 0 and `n` is 1.
    pub fn new(n: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Parameter(format!("the 1-region game needs n >= 2, got {n}")));
        }
        Ok(IntervalAdversary {
            n,
            a: 1,
            b: n,
            answers: Vec::new(),
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Number of answered queries, `j`.
    pub fn stage(&self) -> u64 {
        self.answers.len() as u64
    }

    /// `I_j = [a_j, n]`.
    pub fn interval(&self) -> Region {
        Region::Span { lo: self.a, hi: self.n }
    }

    /// `I_j^R = [b_j, n]`.
    pub fn ones(&self) -> Region {
        Region::Span { lo: self.b, hi: self.n }
    }

    pub fn transcript(&self) -> impl Iterator<Item = (u64, u8)> + '_ {
        self.answers.iter().map(|&(p, bit, _)| (p, bit))
    }

    pub fn cases(&self) -> impl Iterator<Item = AnswerCase> + '_ {
        self.answers.iter().map(|&(_, _, c)| c)
    }

    pub fn decided(&self, p: u64) -> Option<u8> {
        if p <= self.a {
            Some(0)
        } else if p >= self.b {
            Some(1)
        } else {
            None
        }
    }

    /// Answers a query at `p` and advances one stage.
    pub fn answer(&mut self, p: u64) -> Result<u8> {
        if p == 0 || p > self.n {
            return Err(Error::OutOfRange {
                index: p as i64,
                len: self.n,
            });
        }
        let (bit, case) = if p <= self.a {
            (0, AnswerCase::DecidedZero)
        } else if p >= self.b {
            (1, AnswerCase::DecidedOne)
        } else {
            let suffix = (self.n - p + 1) as u128;
            let whole = (self.n - self.a + 1) as u128;
            let ones = (self.n - self.b + 1) as u128;
            // |[p,n]| / |I_R| >= sqrt(|I| / |I_R|), squared.
            if suffix * suffix >= whole * ones {
                self.a = p;
                (0, AnswerCase::ShrinkInterval)
            } else {
                self.b = p;
                (1, AnswerCase::GrowOnes)
            }
        };
        self.answers.push((p, bit, case));
        Ok(bit)
    }

    /// Whether `|I_j| >= n^(1/2^j) |I_j^R|` holds for the current stage.
    pub fn size_invariant_holds(&self) -> bool {
        ratio_power_at_least(self.n - self.a + 1, self.n - self.b + 1, self.stage(), self.n)
    }

    /// Final stage: fills the open positions both ways.
    pub fn finalize(&self) -> FinalizedPair {
        FinalizedPair {
            n: self.n,
            l1_first_one: self.b,
            l2_first_one: self.a + 1,
        }
    }
}

/// `(num/den)^(2^j) >= n` for `num >= den >= 1`.
fn ratio_power_at_least(num: u64, den: u64, j: u64, n: u64) -> bool {
    if n <= 1 {
        return true;
    }
    if num == den {
        return false;
    }
    // Exact for small j; 2^j-th powers of 64-bit numbers stay small.
    if j <= 6 {
        let e = 1u32 << j;
        return BigUint::from(num).pow(e) >= BigUint::from(n) * BigUint::from(den).pow(e);
    }
    // For j >= 7 the root n^(1/2^j) <= 2^(64/128) is irrational unless it is
    // 1, so ties cannot occur; compare logarithms.
    let lhs = ((num - den) as f64 / den as f64).ln_1p() * 2f64.powi(j.min(1000) as i32);
    lhs >= (n as f64).ln()
}

/// The two lists left after the final stage. Each is zeros followed by
/// ones; `L1` has ones on `I^R = [b, n]`, `L2` on `[a+1, n]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FinalizedPair {
    pub n: u64,
    pub l1_first_one: u64,
    pub l2_first_one: u64,
}

impl FinalizedPair {
    fn first_one(&self, which: usize) -> u64 {
        if which == 1 {
            self.l1_first_one
        } else {
            self.l2_first_one
        }
    }

    /// Value of list `which` (1 or 2) at `p`.
    pub fn value(&self, which: usize, p: u64) -> u8 {
        u8::from(p >= self.first_one(which))
    }

    pub fn materialize(&self, which: usize) -> Vec<u8> {
        (1..=self.n).map(|p| self.value(which, p)).collect()
    }

    pub fn view(&self, which: usize) -> SortedView {
        let first = self.first_one(which);
        SortedView::from_fn(self.n, move |p| if p >= first { 1.0 } else { 0.0 })
    }

    /// Whether both lists reproduce every recorded answer.
    pub fn replays(&self, transcript: impl IntoIterator<Item = (u64, u8)>) -> bool {
        transcript
            .into_iter()
            .all(|(p, bit)| self.value(1, p) == bit && self.value(2, p) == bit)
    }

    /// Whether `region` is a `d`-approximate 1-region of list `which`.
    pub fn accepts(&self, which: usize, region: Region, d: f64) -> bool {
        let first = self.first_one(which);
        match region {
            Region::Span { lo, hi } if hi == self.n && lo <= first => {
                let ones = self.n - first + 1;
                ones as f64 * d >= region.size() as f64
            }
            _ => false,
        }
    }
}

/// Query channel answering through the adversary.
struct AdversaryChannel<'a> {
    adversary: &'a mut IntervalAdversary,
    budget: Option<u64>,
}

impl SortedAccess for AdversaryChannel<'_> {
    fn len(&self) -> u64 {
        self.adversary.n
    }

    fn get(&mut self, i: i64) -> Result<Ext> {
        if i <= 0 {
            return Ok(Ext::NegInf);
        }
        if let Some(budget) = self.budget {
            if self.adversary.stage() >= budget {
                return Err(Error::BudgetExceeded { budget });
            }
        }
        Ok(Ext::Finite(f64::from(self.adversary.answer(i as u64)?)))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RegionGameReport {
    pub algorithm: String,
    pub n: u64,
    pub d: f64,
    pub budget: Option<u64>,
    pub queries: u64,
    /// `log2 log2 n - log2 log2 (d+1)`.
    pub lower_bound: f64,
    pub output: Option<Region>,
    /// `I_m` and `I_m^R` after the last query.
    pub interval: Region,
    pub ones: Region,
    pub lists: FinalizedPair,
    /// `|D| / d <= |I_m^R|`, necessary for `D` to serve `L1`.
    pub fits_l1_bound: bool,
    /// `|I_m| - 1 <= |D|`, necessary for `D` to serve `L2`.
    pub fits_l2_bound: bool,
    pub valid_on_l1: bool,
    pub valid_on_l2: bool,
    /// Re-running on the list the answer fails reproduced the same
    /// transcript and answer.
    pub replay_consistent: Option<bool>,
    pub verdict: Verdict,
}

/// Plays `algorithm` against the adaptive adversary on lists of length `n`.
pub fn referee_region_game(
    algorithm: &mut dyn RegionFinder,
    n: u64,
    d: f64,
    budget: Option<u64>,
) -> Result<RegionGameReport> {
    if !(d > 1.0) || !d.is_finite() {
        return Err(Error::Parameter(format!("d must exceed 1, got {d}")));
    }
    let mut adversary = IntervalAdversary::new(n)?;
    let outcome = algorithm.find(&mut AdversaryChannel {
        adversary: &mut adversary,
        budget,
    });
    let lists = adversary.finalize();
    let mut report = RegionGameReport {
        algorithm: algorithm.name().to_string(),
        n,
        d,
        budget,
        queries: adversary.stage(),
        lower_bound: region_query_lower_bound(n, d),
        output: None,
        interval: adversary.interval(),
        ones: adversary.ones(),
        lists,
        fits_l1_bound: false,
        fits_l2_bound: false,
        valid_on_l1: false,
        valid_on_l2: false,
        replay_consistent: None,
        verdict: Verdict::BudgetViolation,
    };
    let region = match outcome {
        Ok(r) => r,
        Err(Error::BudgetExceeded { .. }) => return Ok(report),
        Err(e) => return Err(e),
    };
    report.output = Some(region);
    let size = region.size();
    report.fits_l1_bound = size as f64 / d <= adversary.ones().size() as f64;
    report.fits_l2_bound = adversary.interval().size() - 1 <= size;
    report.valid_on_l1 = lists.accepts(1, region, d);
    report.valid_on_l2 = lists.accepts(2, region, d);
    report.verdict = if report.valid_on_l1 && report.valid_on_l2 {
        Verdict::NotDefeated
    } else {
        Verdict::Defeated
    };

    // Replay on the concrete list the answer fails (L1 when both pass).
    let which = if report.valid_on_l1 { 2 } else { 1 };
    let mut concrete = lists.view(which).with_transcript();
    let again = algorithm.find(&mut concrete);
    let seen: Vec<(u64, u8)> = concrete
        .ledger()
        .transcript()
        .unwrap_or_default()
        .iter()
        .map(|&(p, v)| (p, v as u8))
        .collect();
    let original: Vec<(u64, u8)> = adversary.transcript().collect();
    report.replay_consistent = Some(again.ok() == Some(region) && seen == original);
    Ok(report)
}
