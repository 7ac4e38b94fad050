//! The `sortsum` command line.
//!
//! Exit codes: 0 success or pass, 1 failed verdict or defeated algorithm,
//! 2 usage or input error.

pub mod bench;
pub mod render;
pub mod source;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::access::{Region, SortedAccess, SortedView};
use crate::adversary::algorithms::{region_finder, sum_estimator};
use crate::adversary::blocks::{block_budget, l1_sum_bound, l2_sum_bound};
use crate::adversary::{
    negative_list_pair, referee_block_game, referee_region_game, BlockGameReport, BlockListSpec, Budgeted, Prefix,
    RegionGameReport, Verdict,
};
use crate::error::{Error, Result};
use crate::oracle::{exact_b_region_bisect, exact_sum, verify_region_certificate_sorted, SumCertificate};
use crate::region::{approximate_region_traced, RegionExit};
use crate::sum::{approximate_sum, SumEntry};

use render::{render, render_table, Format};
use source::Source;

#[derive(Debug, Parser)]
#[command(name = "sortsum", version, about = "Sublinear-query sums and regions of sorted lists")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// (1+eps)-approximate sum of X[1..n].
    Sum(SumArgs),
    /// (1+delta)-approximate b-region of X[1..n].
    Region(RegionArgs),
    /// Approximate vs brute-force timing over a generated list.
    Bench(BenchArgs),
    /// Play a lower-bound referee against a built-in algorithm.
    Adversary {
        #[command(subcommand)]
        game: Game,
    },
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Synthetic input, e.g. `linear:1000` or `geometric:1.01:5000`.
    #[arg(long)]
    pub generator: Option<String>,
    /// Text file (one number per line, `#` comments) or `.bin` file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Use only the first n elements.
    #[arg(long = "n")]
    pub n: Option<u64>,
    /// Seed for randomized generators.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SumArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub epsilon: f64,
    /// Also compute the exact sum and a verdict.
    #[arg(long)]
    pub exact: bool,
    /// Include every region with its threshold and contribution.
    #[arg(long)]
    pub breakdown: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct RegionArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Threshold b.
    #[arg(long = "b")]
    pub b: f64,
    #[arg(long)]
    pub delta: f64,
    /// Also compute the exact region and check the certificate.
    #[arg(long)]
    pub exact: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// List x(i), default `linear:<n>`.
    #[arg(long)]
    pub generator: Option<String>,
    #[arg(long = "n", default_value_t = bench::DEFAULT_N)]
    pub n: u64,
    /// Repetitions k per setting.
    #[arg(long, default_value_t = bench::DEFAULT_REPEATS)]
    pub repeats: u32,
    /// Comma-separated accuracies.
    #[arg(long, value_delimiter = ',', default_values_t = bench::DEFAULT_EPSILONS)]
    pub epsilons: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Subcommand)]
pub enum Game {
    /// Block-structured lists against a sum estimator.
    Block(BlockArgs),
    /// Adaptive 0/1 adversary against a region finder.
    Region(RegionGameArgs),
    /// One negative head against a sum estimator.
    Negative(NegativeArgs),
}

#[derive(Debug, Args)]
pub struct BlockArgs {
    #[arg(long = "d", default_value_t = 2.0)]
    pub d: f64,
    #[arg(long, default_value_t = 0.5)]
    pub delta: f64,
    #[arg(long = "m", default_value_t = 16)]
    pub m: u32,
    /// Query budget, default floor(3m/4).
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long, default_value = "prefix-sampler")]
    pub algo: String,
    /// `zeros:<t>` or `tiny`.
    #[arg(long, default_value = "zeros:0")]
    pub prefix: String,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct RegionGameArgs {
    #[arg(long = "n", default_value_t = 1 << 32)]
    pub n: u64,
    #[arg(long = "d", default_value_t = 3.0)]
    pub d: f64,
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long, default_value = "truncated-binsearch")]
    pub algo: String,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct NegativeArgs {
    #[arg(long = "m", default_value_t = 1000)]
    pub m: u64,
    /// Position raised by one; default: the first one the algorithm skipped.
    #[arg(long)]
    pub skip: Option<u64>,
    /// Query budget, default m.
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long, default_value = "prefix-sampler")]
    pub algo: String,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Result of one subcommand: rendered text and exit status.
struct Outcome {
    text: String,
    code: i32,
}

fn finish(text: String, ok: bool) -> Result<Outcome> {
    Ok(Outcome {
        text,
        code: if ok { 0 } else { 1 },
    })
}

/// Parses `args` (program name first), runs, and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                2
            } else {
                let _ = write!(out, "{}", e.render());
                0
            };
            return code;
        }
    };
    match execute(cli.command) {
        Ok(o) => {
            let _ = out.write_all(o.text.as_bytes());
            o.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn execute(command: Command) -> Result<Outcome> {
    match command {
        Command::Sum(a) => cmd_sum(a),
        Command::Region(a) => cmd_region(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Adversary { game } => match game {
            Game::Block(a) => cmd_block(a),
            Game::Region(a) => cmd_region_game(a),
            Game::Negative(a) => cmd_negative(a),
        },
    }
}

struct Prepared {
    view: SortedView,
    label: String,
    n: u64,
    first_negative: Option<u64>,
}

fn prepare(input: &InputArgs) -> Result<Prepared> {
    let source = Source::from_flags(input.generator.as_deref(), input.input.as_deref())?;
    let opened = source.open(input.seed)?;
    let len = opened.view.len();
    let n = input.n.unwrap_or(len);
    if n == 0 || n > len {
        return Err(Error::Parameter(format!("--n must lie in [1, {len}], got {n}")));
    }
    Ok(Prepared {
        view: opened.view,
        label: opened.label,
        n,
        first_negative: opened.first_negative.filter(|&p| p <= n),
    })
}

fn elapsed_ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Machine-readable outcome of `sum`.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub source: String,
    pub n: u64,
    pub epsilon: f64,
    pub delta: f64,
    pub estimate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<f64>,
    pub queries: u64,
    pub cycles: u64,
    pub regions: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub breakdown: Option<Vec<SumEntry>>,
    pub wall_time_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<&'static str>,
}

fn cmd_sum(a: SumArgs) -> Result<Outcome> {
    let Prepared {
        mut view,
        label,
        n,
        first_negative,
    } = prepare(&a.input)?;
    if let Some(index) = first_negative {
        return Err(Error::InputContract {
            index,
            reason: "negative element: no sublinear time approximation algorithm exists for sorted lists with negative entries".into(),
        });
    }
    let t = Instant::now();
    let out = approximate_sum(&mut view, a.epsilon, n)?;
    let wall_time_ms = elapsed_ms(t);
    let queries = view.queries();

    let certificate = if a.exact {
        let mut fresh = view.fresh();
        Some(SumCertificate::new(exact_sum(&mut fresh, n)?, out.estimate, a.epsilon))
    } else {
        None
    };
    let report = RunReport {
        source: label,
        n,
        epsilon: a.epsilon,
        delta: out.delta,
        estimate: out.estimate,
        exact: certificate.map(|c| c.exact),
        queries,
        cycles: out.cycles,
        regions: out.entries.len() as u64,
        breakdown: a.breakdown.then(|| out.entries.clone()),
        wall_time_ms,
        ratio: certificate.map(|c| c.ratio),
        verdict: certificate.map(|c| if c.pass { "pass" } else { "fail" }),
    };
    finish(render(&report, a.output.format)?, certificate.is_none_or(|c| c.pass))
}

#[derive(Debug, Clone, Serialize)]
pub struct RegionReport {
    pub source: String,
    pub n: u64,
    pub b: f64,
    pub delta: f64,
    pub region: Region,
    pub size: u64,
    pub queries: u64,
    pub exit: RegionExit,
    pub expand_cycles: u32,
    pub ladder_steps: u64,
    pub wall_time_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_region: Option<Region>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contains_exact: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<&'static str>,
}

fn cmd_region(a: RegionArgs) -> Result<Outcome> {
    let Prepared { mut view, label, n, .. } = prepare(&a.input)?;
    let t = Instant::now();
    let (region, trace) = approximate_region_traced(&mut view, a.b, a.delta, n)?;
    let wall_time_ms = elapsed_ms(t);
    let queries = view.queries();

    let (exact_region, contains_exact, verdict) = if a.exact {
        let mut fresh = view.fresh();
        let exact = exact_b_region_bisect(&mut fresh, a.b, n)?;
        let cert = verify_region_certificate_sorted(&mut fresh, a.b, a.delta, region, n)?;
        let contains = exact.is_subset_of(&region);
        (Some(exact), Some(contains), Some(if cert.passed() && contains { "pass" } else { "fail" }))
    } else {
        (None, None, None)
    };
    let report = RegionReport {
        source: label,
        n,
        b: a.b,
        delta: a.delta,
        region,
        size: region.size(),
        queries,
        exit: trace.exit,
        expand_cycles: trace.expand_cycles,
        ladder_steps: trace.steps.len() as u64,
        wall_time_ms,
        exact_region,
        contains_exact,
        verdict,
    };
    finish(render(&report, a.output.format)?, verdict != Some("fail"))
}

fn cmd_bench(a: BenchArgs) -> Result<Outcome> {
    let spec = a.generator.clone().unwrap_or_else(|| format!("linear:{}", a.n));
    let opened = Source::Generator(spec.parse()?).open(a.seed)?;
    let report = bench::run_bench(&opened.view, &opened.label, &a.epsilons, a.repeats)?;
    let ok = report.rows.iter().all(|r| r.verdict == "pass");
    finish(render_table(&report, "rows", a.output.format)?, ok)
}

fn parse_prefix(s: &str) -> Result<Prefix> {
    if s == "tiny" {
        return Ok(Prefix::Tiny);
    }
    s.strip_prefix("zeros:")
        .and_then(|t| t.parse().ok())
        .map(Prefix::Zeros)
        .ok_or_else(|| Error::Parameter(format!("prefix must be 'tiny' or 'zeros:<t>', got '{s}'")))
}

#[derive(Debug, Clone, Serialize)]
struct BlockOutcome {
    #[serde(flatten)]
    game: BlockGameReport,
    /// `(delta+1) m c^m`.
    l1_bound: String,
    /// `(m/4) c^(m+1)`.
    l2_bound: String,
    l1_within_bound: bool,
    l2_meets_bound: bool,
}

fn cmd_block(a: BlockArgs) -> Result<Outcome> {
    let spec = BlockListSpec::new(a.d, a.delta, a.m, parse_prefix(&a.prefix)?)?;
    let budget = a.budget.unwrap_or(block_budget(a.m));
    let mut algo = sum_estimator(&a.algo, Some(budget), a.d)?;
    let game = referee_block_game(algo.as_mut(), &spec, Some(budget))?;

    let s1: num_rational::BigRational = game.sum_l1.parse().map_err(|_| Error::Internal("sum_l1".into()))?;
    let s2: num_rational::BigRational = game.sum_l2.parse().map_err(|_| Error::Internal("sum_l2".into()))?;
    let (b1, b2) = (l1_sum_bound(&spec)?, l2_sum_bound(&spec)?);
    let outcome = BlockOutcome {
        l1_within_bound: s1 <= b1,
        l2_meets_bound: s2 >= b2,
        l1_bound: b1.to_string(),
        l2_bound: b2.to_string(),
        game,
    };
    let ok = outcome.game.verdict == Verdict::NotDefeated;
    finish(render(&outcome, a.output.format)?, ok)
}

fn cmd_region_game(a: RegionGameArgs) -> Result<Outcome> {
    let mut algo = region_finder(&a.algo, a.budget, a.d)?;
    let report: RegionGameReport = referee_region_game(algo.as_mut(), a.n, a.d, a.budget)?;
    let ok = report.verdict == Verdict::NotDefeated;
    finish(render(&report, a.output.format)?, ok)
}

#[derive(Debug, Clone, Serialize)]
pub struct NegativeReport {
    pub algorithm: String,
    pub m: u64,
    pub budget: Option<u64>,
    pub queries: u64,
    pub skipped: u64,
    pub sum_x: f64,
    pub sum_y: f64,
    pub agree_elsewhere: bool,
    pub estimate_x: Option<f64>,
    pub estimate_y: Option<f64>,
    pub verdict: Verdict,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

fn cmd_negative(a: NegativeArgs) -> Result<Outcome> {
    let budget = Some(a.budget.unwrap_or(a.m));
    let mut algo = sum_estimator(&a.algo, budget, 2.0)?;
    let (x, _) = negative_list_pair(a.m, 1)?;
    let len = x.len() as u64;

    let mut channel = Budgeted::new(SortedView::from_vec_unchecked(x.clone()), budget);
    let first = algo.estimate(&mut channel);
    let queried: Vec<u64> = channel.transcript().iter().map(|&(p, _)| p).collect();
    let queries = channel.used();
    let skipped = match a.skip {
        Some(s) => s,
        None => (1..=len).find(|p| !queried.contains(p)).unwrap_or(len),
    };
    let (x, y) = negative_list_pair(a.m, skipped)?;
    let sum_x = exact_sum(&mut SortedView::from_vec_unchecked(x.clone()), len)?;
    let sum_y = exact_sum(&mut SortedView::from_vec_unchecked(y.clone()), len)?;
    let agree_elsewhere = (0..x.len()).all(|i| i as u64 + 1 == skipped || x[i] == y[i]);

    let (estimate_x, estimate_y, verdict) = match first {
        Err(Error::BudgetExceeded { .. }) => (None, None, Verdict::BudgetViolation),
        Err(e) => return Err(e),
        Ok(sx) => {
            let mut channel = Budgeted::new(SortedView::from_vec_unchecked(y.clone()), budget);
            let sy = algo.estimate(&mut channel)?;
            // No factor relates 0 to 1; equal answers are wrong for one list.
            let ok_x = sx == 0.0;
            let ok_y = sy > 0.0;
            let verdict = if ok_x && ok_y { Verdict::NotDefeated } else { Verdict::Defeated };
            (Some(sx), Some(sy), verdict)
        }
    };
    let report = NegativeReport {
        algorithm: algo.name().to_string(),
        m: a.m,
        budget,
        queries,
        skipped,
        sum_x,
        sum_y,
        agree_elsewhere,
        estimate_x,
        estimate_y,
        verdict,
        x,
        y,
    };
    finish(render(&report, a.output.format)?, verdict == Verdict::NotDefeated)
}
