//! Query-metered approximate summation of sorted nonnegative lists.
//!
//! * [`access`]: metered views, regions and the query ledger.
//! * [`region`]: approximate b-region search in `O(log 1/delta + log log n)` queries.
//! * [`sum`]: `(1+eps)`-approximate sums built from region searches.
//! * [`oracle`]: brute-force references and certificate checkers.
//! * [`adversary`]: executable lower-bound referees.
//! * [`cli`]: the `sortsum` command-line front end.

pub mod access;
pub mod adversary;
pub mod cli;
pub mod error;
pub mod ladder;
pub mod oracle;
pub mod region;
pub mod sum;

pub use access::{Ext, QueryLedger, Region, SortedAccess, SortedView};
pub use error::{Error, Result};
pub use ladder::{Dyadic, LadderValue};
pub use oracle::{exact_b_region, exact_sum, verify_region_certificate, verify_sum, SumCertificate};
pub use region::{approximate_region, approximate_region_traced, RegionTrace};
pub use sum::{approximate_sum, SumBreakdown, SumEntry};
