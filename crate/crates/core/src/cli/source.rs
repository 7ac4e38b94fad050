//! Input sources: synthetic generators and files.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::access::{first_inversion, SortedView};
use crate::error::{Error, Result};

/// A synthetic nondecreasing nonnegative sequence, `kind:params`.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec {
    /// `linear:n`, `x(i) = i`.
    Linear { n: u64 },
    /// `constant:v:n`.
    Constant { value: f64, n: u64 },
    /// `geometric:ratio:n`, `x(i) = ratio^(i-n)`.
    Geometric { ratio: f64, n: u64 },
    /// `powerblocks:c:m`, block `i` holds `c^(m-i)` copies of `c^i`.
    PowerBlocks { c: u64, m: u32 },
    /// `zipf-like:s:n`, `x(i) = (n-i+1)^(-s)`.
    ZipfLike { s: f64, n: u64 },
    /// `spike:v:n`, zeros and a final `v`.
    Spike { value: f64, n: u64 },
    /// `zeros:k:n`, `k` zeros then `1, 2, ...`.
    Zeros { k: u64, n: u64 },
    /// `noisy-linear:n`, `x(i) = i + u_i` with seeded `u_i` in `[0,1)`.
    NoisyLinear { n: u64 },
}

pub const GENERATOR_KINDS: &str =
    "linear:n, constant:v:n, geometric:ratio:n, powerblocks:c:m, zipf-like:s:n, spike:v:n, zeros:k:n, noisy-linear:n";

fn field<T: FromStr>(spec: &str, parts: &[&str], i: usize, name: &str) -> Result<T> {
    parts
        .get(i)
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| Error::Parameter(format!("generator '{spec}': missing or invalid {name}")))
}

impl FromStr for GeneratorSpec {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.split(':').collect();
        let arity = |k: usize| -> Result<()> {
            if parts.len() == k + 1 {
                Ok(())
            } else {
                Err(Error::Parameter(format!("generator '{spec}' expects {k} parameter(s)")))
            }
        };
        let g = match parts[0] {
            "linear" => {
                arity(1)?;
                GeneratorSpec::Linear { n: field(spec, &parts, 1, "n")? }
            }
            "constant" => {
                arity(2)?;
                GeneratorSpec::Constant {
                    value: field(spec, &parts, 1, "value")?,
                    n: field(spec, &parts, 2, "n")?,
                }
            }
            "geometric" => {
                arity(2)?;
                GeneratorSpec::Geometric {
                    ratio: field(spec, &parts, 1, "ratio")?,
                    n: field(spec, &parts, 2, "n")?,
                }
            }
            "powerblocks" => {
                arity(2)?;
                GeneratorSpec::PowerBlocks {
                    c: field(spec, &parts, 1, "c")?,
                    m: field(spec, &parts, 2, "m")?,
                }
            }
            "zipf-like" => {
                arity(2)?;
                GeneratorSpec::ZipfLike {
                    s: field(spec, &parts, 1, "s")?,
                    n: field(spec, &parts, 2, "n")?,
                }
            }
            "spike" => {
                arity(2)?;
                GeneratorSpec::Spike {
                    value: field(spec, &parts, 1, "value")?,
                    n: field(spec, &parts, 2, "n")?,
                }
            }
            "zeros" => {
                arity(2)?;
                GeneratorSpec::Zeros {
                    k: field(spec, &parts, 1, "k")?,
                    n: field(spec, &parts, 2, "n")?,
                }
            }
            "noisy-linear" => {
                arity(1)?;
                GeneratorSpec::NoisyLinear { n: field(spec, &parts, 1, "n")? }
            }
            other => {
                return Err(Error::Parameter(format!(
                    "unknown generator kind '{other}'; expected one of {GENERATOR_KINDS}"
                )))
            }
        };
        g.check()?;
        Ok(g)
    }
}

fn nonnegative(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} must be finite and nonnegative, got {v}")))
    }
}

impl GeneratorSpec {
    fn check(&self) -> Result<()> {
        match *self {
            GeneratorSpec::Constant { value, .. } | GeneratorSpec::Spike { value, .. } => nonnegative("value", value)?,
            GeneratorSpec::Geometric { ratio, .. } => {
                if !(ratio >= 1.0 && ratio.is_finite()) {
                    return Err(Error::Parameter(format!("ratio must be at least 1, got {ratio}")));
                }
            }
            GeneratorSpec::ZipfLike { s, .. } => nonnegative("s", s)?,
            GeneratorSpec::Zeros { k, n } if k > n => {
                return Err(Error::Parameter(format!("zeros:{k}:{n} has more zeros than elements")));
            }
            GeneratorSpec::PowerBlocks { c, m } => {
                if c < 2 || m == 0 {
                    return Err(Error::Parameter("powerblocks needs c >= 2 and m >= 1".into()));
                }
                self.power_block_starts()?;
            }
            _ => {}
        }
        Ok(())
    }

    /// Start of each block, then one past the end.
    fn power_block_starts(&self) -> Result<Vec<u64>> {
        let GeneratorSpec::PowerBlocks { c, m } = *self else {
            return Ok(Vec::new());
        };
        let mut starts = vec![1u64];
        let mut pos = 1u64;
        for i in 1..=m {
            pos = c
                .checked_pow(m - i)
                .and_then(|len| pos.checked_add(len))
                .filter(|&p| p <= i64::MAX as u64)
                .ok_or_else(|| Error::Parameter(format!("powerblocks:{c}:{m} is longer than 2^63")))?;
            starts.push(pos);
        }
        Ok(starts)
    }

    pub fn len(&self) -> u64 {
        match *self {
            GeneratorSpec::Linear { n }
            | GeneratorSpec::Constant { n, .. }
            | GeneratorSpec::Geometric { n, .. }
            | GeneratorSpec::ZipfLike { n, .. }
            | GeneratorSpec::Spike { n, .. }
            | GeneratorSpec::Zeros { n, .. }
            | GeneratorSpec::NoisyLinear { n } => n,
            GeneratorSpec::PowerBlocks { .. } => self.power_block_starts().map_or(0, |s| s[s.len() - 1] - 1),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Function-backed view using `O(1)` memory (`O(m)` for power blocks).
    pub fn view(&self, seed: u64) -> SortedView {
        let n = self.len();
        match *self {
            GeneratorSpec::Linear { .. } => SortedView::from_fn(n, |i| i as f64),
            GeneratorSpec::Constant { value, .. } => SortedView::from_fn(n, move |_| value),
            GeneratorSpec::Geometric { ratio, .. } => {
                SortedView::from_fn(n, move |i| ratio.powf(-((n - i) as f64)))
            }
            GeneratorSpec::PowerBlocks { c, .. } => {
                let starts = Arc::new(self.power_block_starts().expect("checked at parse time"));
                SortedView::from_fn(n, move |i| {
                    let level = starts.partition_point(|&s| s <= i);
                    (c as f64).powi(level as i32)
                })
            }
            GeneratorSpec::ZipfLike { s, .. } => {
                SortedView::from_fn(n, move |i| ((n - i + 1) as f64).powf(-s))
            }
            GeneratorSpec::Spike { value, .. } => {
                SortedView::from_fn(n, move |i| if i == n { value } else { 0.0 })
            }
            GeneratorSpec::Zeros { k, .. } => {
                SortedView::from_fn(n, move |i| i.saturating_sub(k) as f64)
            }
            GeneratorSpec::NoisyLinear { .. } => {
                let base = ChaCha8Rng::seed_from_u64(seed);
                SortedView::from_fn(n, move |i| {
                    let mut rng = base.clone();
                    rng.set_word_pos(2 * i as u128);
                    // 53 random bits in [0, 1).
                    i as f64 + (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
                })
            }
        }
    }
}

/// Reads a list: `.bin` files hold a little-endian `u64` count followed by
/// that many little-endian `f64`; anything else is text with one number per
/// line and `#` comments.
pub fn read_list(path: &Path) -> Result<Vec<f64>> {
    let io = |e: std::io::Error| Error::Parameter(format!("cannot read {}: {e}", path.display()));
    if path.extension().is_some_and(|e| e == "bin") {
        parse_binary(&fs::read(path).map_err(io)?, path)
    } else {
        parse_text(&fs::read_to_string(path).map_err(io)?, path)
    }
}

fn parse_text(text: &str, path: &Path) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let v: f64 = body.parse().map_err(|_| {
            Error::Parameter(format!("{}:{}: not a number: '{body}'", path.display(), lineno + 1))
        })?;
        out.push(v);
    }
    Ok(out)
}

fn parse_binary(bytes: &[u8], path: &Path) -> Result<Vec<f64>> {
    let bad = |what: String| Error::Parameter(format!("{}: {what}", path.display()));
    let (head, body) = bytes
        .split_first_chunk::<8>()
        .ok_or_else(|| bad("missing 8-byte length header".into()))?;
    let count = u64::from_le_bytes(*head);
    if body.len() as u64 != count.saturating_mul(8) {
        return Err(bad(format!("header declares {count} values but {} bytes follow", body.len())));
    }
    Ok(body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

/// Writes `values` in the binary format read by [`read_list`].
pub fn write_binary(path: &Path, values: &[f64]) -> std::io::Result<()> {
    let mut bytes = Vec::with_capacity(8 + 8 * values.len());
    bytes.extend_from_slice(&(values.len() as u64).to_le_bytes());
    for v in values {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, bytes)
}

/// Where the list comes from.
#[derive(Debug, Clone)]
pub enum Source {
    Generator(GeneratorSpec),
    File(PathBuf),
}

/// An opened source.
pub struct Opened {
    pub view: SortedView,
    pub label: String,
    /// Position of the first negative element of a file input.
    pub first_negative: Option<u64>,
}

impl Source {
    pub fn from_flags(generator: Option<&str>, input: Option<&Path>) -> Result<Source> {
        match (generator, input) {
            (Some(g), None) => Ok(Source::Generator(g.parse()?)),
            (None, Some(p)) => Ok(Source::File(p.to_path_buf())),
            (Some(_), Some(_)) => Err(Error::Parameter("give either --generator or --input, not both".into())),
            (None, None) => Err(Error::Parameter("an input is required: --generator <spec> or --input <path>".into())),
        }
    }

    /// Opens the source. File inputs are checked for order in full.
    pub fn open(&self, seed: u64) -> Result<Opened> {
        match self {
            Source::Generator(g) => Ok(Opened {
                view: g.view(seed),
                label: generator_label(g),
                first_negative: None,
            }),
            Source::File(path) => {
                let values = read_list(path)?;
                if let Some(index) = first_inversion(&values) {
                    return Err(Error::InputContract {
                        index,
                        reason: format!(
                            "{} is not nondecreasing (X[{}] = {} follows {})",
                            path.display(),
                            index,
                            values[index as usize - 1],
                            if index >= 2 { values[index as usize - 2].to_string() } else { "nothing".into() }
                        ),
                    });
                }
                let first_negative = values.iter().position(|&v| v < 0.0).map(|i| i as u64 + 1);
                Ok(Opened {
                    view: SortedView::from_vec_unchecked(values),
                    label: path.display().to_string(),
                    first_negative,
                })
            }
        }
    }
}

fn generator_label(g: &GeneratorSpec) -> String {
    match *g {
        GeneratorSpec::Linear { n } => format!("linear:{n}"),
        GeneratorSpec::Constant { value, n } => format!("constant:{value}:{n}"),
        GeneratorSpec::Geometric { ratio, n } => format!("geometric:{ratio}:{n}"),
        GeneratorSpec::PowerBlocks { c, m } => format!("powerblocks:{c}:{m}"),
        GeneratorSpec::ZipfLike { s, n } => format!("zipf-like:{s}:{n}"),
        GeneratorSpec::Spike { value, n } => format!("spike:{value}:{n}"),
        GeneratorSpec::Zeros { k, n } => format!("zeros:{k}:{n}"),
        GeneratorSpec::NoisyLinear { n } => format!("noisy-linear:{n}"),
    }
}
