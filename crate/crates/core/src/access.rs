//! Metered read-only access to sorted lists.
//!
//! Every algorithm in this crate reads its input through [`SortedAccess`].
//! Positions are 1-based. Positions `<= 0` read as [`Ext::NegInf`] and are
//! free; every in-range read is one query.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A list value extended with the `-inf` sentinel used left of position 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ext {
    NegInf,
    Finite(f64),
}

impl Ext {
    pub fn finite(self) -> Option<f64> {
        match self {
            Ext::NegInf => None,
            Ext::Finite(v) => Some(v),
        }
    }

    /// `self >= b` with `-inf` below every finite threshold.
    #[inline]
    pub fn at_least(self, b: f64) -> bool {
        match self {
            Ext::NegInf => false,
            Ext::Finite(v) => v >= b,
        }
    }
}

impl PartialOrd for Ext {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Ext::NegInf, Ext::NegInf) => Some(Ordering::Equal),
            (Ext::NegInf, Ext::Finite(_)) => Some(Ordering::Less),
            (Ext::Finite(_), Ext::NegInf) => Some(Ordering::Greater),
            (Ext::Finite(a), Ext::Finite(b)) => a.partial_cmp(b),
        }
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::NegInf => f.write_str("-inf"),
            Ext::Finite(v) => write!(f, "{v}"),
        }
    }
}

/// A closed interval `[lo, hi]` of 1-based positions, or the empty region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Region {
    Empty,
    Span { lo: u64, hi: u64 },
}

impl Region {
    /// `[lo, hi]`; `None` when `lo > hi` or `lo == 0`.
    pub fn span(lo: u64, hi: u64) -> Option<Region> {
        (lo >= 1 && lo <= hi).then_some(Region::Span { lo, hi })
    }

    pub fn size(&self) -> u64 {
        region_size(*self)
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Region::Empty)
    }

    pub fn bounds(&self) -> Option<(u64, u64)> {
        match *self {
            Region::Empty => None,
            Region::Span { lo, hi } => Some((lo, hi)),
        }
    }

    pub fn contains(&self, p: u64) -> bool {
        matches!(*self, Region::Span { lo, hi } if lo <= p && p <= hi)
    }

    pub fn is_subset_of(&self, other: &Region) -> bool {
        match (*self, *other) {
            (Region::Empty, _) => true,
            (Region::Span { .. }, Region::Empty) => false,
            (Region::Span { lo, hi }, Region::Span { lo: olo, hi: ohi }) => olo <= lo && hi <= ohi,
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::Empty => f.write_str("empty"),
            Region::Span { lo, hi } => write!(f, "[{lo},{hi}]"),
        }
    }
}

/// Number of integer positions in `r`.
pub fn region_size(r: Region) -> u64 {
    match r {
        Region::Empty => 0,
        Region::Span { lo, hi } => hi - lo + 1,
    }
}

/// Counts in-range reads; optionally records them.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct QueryLedger {
    count: u64,
    transcript: Option<Vec<(u64, f64)>>,
}

impl QueryLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn recording() -> Self {
        QueryLedger {
            count: 0,
            transcript: Some(Vec::new()),
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn transcript(&self) -> Option<&[(u64, f64)]> {
        self.transcript.as_deref()
    }

    #[inline]
    pub fn record(&mut self, position: u64, value: f64) {
        self.count += 1;
        if let Some(t) = self.transcript.as_mut() {
            t.push((position, value));
        }
    }

    pub fn reset(&mut self) {
        self.count = 0;
        if let Some(t) = self.transcript.as_mut() {
            t.clear();
        }
    }

    /// Distinct positions in the transcript, ascending. Repeated reads of
    /// one position count once here but every time in [`count`](Self::count).
    pub fn distinct_positions(&self) -> Option<Vec<u64>> {
        self.transcript.as_ref().map(|t| {
            let mut ps: Vec<u64> = t.iter().map(|&(p, _)| p).collect();
            ps.sort_unstable();
            ps.dedup();
            ps
        })
    }
}

/// Random access to a nondecreasing list through a query channel.
///
/// `get(i)` for `i <= 0` must return [`Ext::NegInf`] without charging a
/// query; `i > len()` is a contract violation.
pub trait SortedAccess {
    fn len(&self) -> u64;

    fn get(&mut self, i: i64) -> Result<Ext>;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl<T: SortedAccess + ?Sized> SortedAccess for &mut T {
    fn len(&self) -> u64 {
        (**self).len()
    }

    fn get(&mut self, i: i64) -> Result<Ext> {
        (**self).get(i)
    }
}

/// Index → value generator backing a [`SortedView`].
pub type GeneratorFn = dyn Fn(u64) -> f64 + Send + Sync;

#[derive(Clone)]
enum Source {
    Array(Arc<[f64]>),
    Generator(Arc<GeneratorFn>),
}

/// A metered view over an in-memory array or a pure generator function.
#[derive(Clone)]
pub struct SortedView {
    len: u64,
    source: Source,
    ledger: QueryLedger,
}

impl fmt::Debug for SortedView {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.source {
            Source::Array(_) => "array",
            Source::Generator(_) => "generator",
        };
        f.debug_struct("SortedView")
            .field("len", &self.len)
            .field("source", &kind)
            .field("queries", &self.ledger.count)
            .finish()
    }
}

impl SortedView {
    /// Array-backed view. Ordering is validated in debug builds only; use
    /// [`validated`](Self::validated) for untrusted input.
    pub fn from_vec(values: Vec<f64>) -> Result<Self> {
        if cfg!(debug_assertions) {
            check_sorted(&values)?;
        }
        Ok(Self::from_vec_unchecked(values))
    }

    /// Array-backed view, always validated.
    pub fn validated(values: Vec<f64>) -> Result<Self> {
        check_sorted(&values)?;
        Ok(Self::from_vec_unchecked(values))
    }

    pub fn from_vec_unchecked(values: Vec<f64>) -> Self {
        SortedView {
            len: values.len() as u64,
            source: Source::Array(values.into()),
            ledger: QueryLedger::new(),
        }
    }

    /// Generator-backed view of length `len`; `f` receives 1-based positions
    /// and is trusted to be nondecreasing (see [`spot_check`](Self::spot_check)).
    pub fn from_fn<F>(len: u64, f: F) -> Self
    where
        F: Fn(u64) -> f64 + Send + Sync + 'static,
    {
        SortedView {
            len,
            source: Source::Generator(Arc::new(f)),
            ledger: QueryLedger::new(),
        }
    }

    pub fn from_shared_fn(len: u64, f: Arc<GeneratorFn>) -> Self {
        SortedView {
            len,
            source: Source::Generator(f),
            ledger: QueryLedger::new(),
        }
    }

    /// Enables transcript recording (clears the ledger).
    pub fn with_transcript(mut self) -> Self {
        self.ledger = QueryLedger::recording();
        self
    }

    pub fn is_generator(&self) -> bool {
        matches!(self.source, Source::Generator(_))
    }

    pub fn ledger(&self) -> &QueryLedger {
        &self.ledger
    }

    pub fn queries(&self) -> u64 {
        self.ledger.count
    }

    pub fn reset_ledger(&mut self) {
        self.ledger.reset();
    }

    /// A copy sharing the source with a fresh ledger of the same kind.
    pub fn fresh(&self) -> Self {
        let ledger = if self.ledger.transcript.is_some() {
            QueryLedger::recording()
        } else {
            QueryLedger::new()
        };
        SortedView {
            len: self.len,
            source: self.source.clone(),
            ledger,
        }
    }

    #[inline]
    fn raw(&self, p: u64) -> f64 {
        match &self.source {
            Source::Array(a) => a[(p - 1) as usize],
            Source::Generator(f) => f(p),
        }
    }

    /// Samples `O(log n)` adjacent pairs, geometrically spaced from both
    /// ends, without touching the ledger.
    pub fn spot_check(&self) -> Result<()> {
        if self.len < 2 {
            return Ok(());
        }
        let mut offsets = Vec::new();
        let mut step = 1u64;
        while step < self.len {
            offsets.push(step);
            step = step.saturating_mul(2);
        }
        for off in offsets {
            for p in [off, self.len - off] {
                if p >= 1 && p < self.len {
                    let (a, b) = (self.raw(p), self.raw(p + 1));
                    if a.is_nan() || b.is_nan() || a > b {
                        return Err(Error::InputContract {
                            index: p + 1,
                            reason: format!("generator decreases: x({p})={a} > x({})={b}", p + 1),
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

impl SortedAccess for SortedView {
    fn len(&self) -> u64 {
        self.len
    }

    #[inline]
    fn get(&mut self, i: i64) -> Result<Ext> {
        if i <= 0 {
            return Ok(Ext::NegInf);
        }
        let p = i as u64;
        if p > self.len {
            return Err(Error::OutOfRange {
                index: i,
                len: self.len,
            });
        }
        let v = self.raw(p);
        self.ledger.record(p, v);
        Ok(Ext::Finite(v))
    }
}

/// First position (1-based) breaking nondecreasing order, or holding NaN.
pub fn first_inversion(values: &[f64]) -> Option<u64> {
    if let Some(i) = values.iter().position(|v| v.is_nan()) {
        return Some(i as u64 + 1);
    }
    values
        .windows(2)
        .position(|w| w[0] > w[1])
        .map(|i| i as u64 + 2)
}

fn check_sorted(values: &[f64]) -> Result<()> {
    match first_inversion(values) {
        None => Ok(()),
        Some(index) => Err(Error::InputContract {
            index,
            reason: "list is not nondecreasing".into(),
        }),
    }
}
