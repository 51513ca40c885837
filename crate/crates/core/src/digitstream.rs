//! Digit expansions of floor(f(n)) concatenated over integers or primes,
//! plus block-occurrence counting in two modes: across the flat string and
//! restricted to single items (optionally zero-padded to a common length).

use crate::certnum::{eval_floor_power, EvalError, PseudoPolynomial};
use crate::primes::PrimeStream;
use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;
use std::io::{self, Read, Write};
use std::path::Path;

/// Hard cap on block length; dense count tables and the discrepancy sup
/// both walk all q^ell patterns.
pub const MAX_BLOCK_LEN: u32 = 12;
/// Cap on the dense table size q^ell (entries).
pub const MAX_TABLE_SIZE: u64 = 1 << 24;
/// Bases are limited by the one-byte-per-digit stream and cache layout.
pub const MAX_BASE: u32 = 256;

/// Arguments per parallel generation batch. Fixed so digit output is
/// identical for every thread count.
const GEN_CHUNK: usize = 4096;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DigitError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("base {0} outside supported range 2..=256")]
    BaseRange(u32),
    #[error("block length {0} outside 1..={MAX_BLOCK_LEN}")]
    BlockLength(u32),
    #[error("digit {digit} not a base-{base} digit")]
    DigitRange { digit: u8, base: u32 },
    #[error("dense table for base {base}, block length {ell} exceeds {MAX_TABLE_SIZE} entries")]
    TableTooLarge { base: u32, ell: u32 },
}

fn check_base(q: u32) -> Result<(), DigitError> {
    if !(2..=MAX_BASE).contains(&q) {
        return Err(DigitError::BaseRange(q));
    }
    Ok(())
}

/// Which argument sequence feeds the concatenation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Integers,
    Primes,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Integers => "integers",
            Mode::Primes => "primes",
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Most-significant-first base-q expansion of one value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitString {
    pub base: u32,
    pub digits: Vec<u8>,
}

impl DigitString {
    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Value the digits encode.
    pub fn value(&self) -> BigUint {
        let mut acc = BigUint::zero();
        for &d in &self.digits {
            acc = acc * self.base + BigUint::from(d);
        }
        acc
    }
}

/// Base-q expansion of m, most significant digit first; 0 renders as [0].
pub fn digits_of(m: &BigUint, q: u32) -> DigitString {
    assert!((2..=MAX_BASE).contains(&q), "base out of range");
    DigitString {
        base: q,
        digits: m.to_radix_be(q),
    }
}

/// Number of base-q digits, with length 1 for m = 0.
pub fn digit_length(m: &BigUint, q: u32) -> usize {
    if m.is_zero() {
        1
    } else {
        m.to_radix_be(q).len()
    }
}

/// A materialized prefix of the concatenated expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct DigitStream {
    pub base: u32,
    pub mode: Mode,
    pub digits: Vec<u8>,
    /// Offset where each item's expansion begins, in argument order.
    pub item_starts: Vec<usize>,
    /// Argument of the last (possibly cut) item.
    pub last_arg: u64,
    /// True when the final item's expansion was cut by the digit budget.
    pub truncated: bool,
    /// Total precision-ladder escalations over the items actually consumed.
    pub escalations: u64,
}

impl DigitStream {
    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Start and end offsets of item i's digits within the stream.
    fn item_span(&self, i: usize) -> (usize, usize) {
        let start = self.item_starts[i];
        let end = if i + 1 < self.item_starts.len() {
            self.item_starts[i + 1]
        } else {
            self.digits.len()
        };
        (start, end)
    }
}

fn mode_args(mode: Mode) -> Box<dyn Iterator<Item = u64>> {
    match mode {
        Mode::Integers => Box::new(1u64..),
        Mode::Primes => Box::new(PrimeStream::new()),
    }
}

/// Renders floor(f(n)) digit strings for a batch of arguments in parallel;
/// chunk boundaries are fixed, so output does not depend on thread count.
fn render_batch(
    f: &PseudoPolynomial,
    q: u32,
    args: &[u64],
    max_bits: u32,
) -> Result<Vec<(DigitString, u32)>, EvalError> {
    args.par_iter()
        .map(|&n| eval_floor_power(f, n, max_bits).map(|(v, c)| (digits_of(&v, q), c.escalations)))
        .collect()
}

/// First L digits of the concatenation of base-q expansions of floor(f(n))
/// over the mode's argument sequence.
pub fn stream_digits(
    f: &PseudoPolynomial,
    q: u32,
    mode: Mode,
    l: usize,
    max_bits: u32,
) -> Result<DigitStream, DigitError> {
    check_base(q)?;
    assert!(l >= 1, "need a positive digit budget");
    let mut digits = Vec::with_capacity(l);
    let mut item_starts = Vec::new();
    let mut escalations = 0u64;
    let mut args = mode_args(mode);
    let (last_arg, truncated) = 'outer: loop {
        let batch: Vec<u64> = args.by_ref().take(GEN_CHUNK).collect();
        let rendered = render_batch(f, q, &batch, max_bits)?;
        for (&n, (ds, esc)) in batch.iter().zip(&rendered) {
            item_starts.push(digits.len());
            escalations += u64::from(*esc);
            let remaining = l - digits.len();
            if ds.len() >= remaining {
                digits.extend_from_slice(&ds.digits[..remaining]);
                break 'outer (n, ds.len() > remaining);
            }
            digits.extend_from_slice(&ds.digits);
        }
    };
    Ok(DigitStream {
        base: q,
        mode,
        digits,
        item_starts,
        last_arg,
        truncated,
        escalations,
    })
}

/// The unique N whose item completes the L-digit budget: the length sum over
/// arguments <= N-1 falls short of L and the sum through N reaches it.
pub fn cutoff_arg(
    f: &PseudoPolynomial,
    q: u32,
    l: u64,
    mode: Mode,
    max_bits: u32,
) -> Result<u64, DigitError> {
    check_base(q)?;
    assert!(l >= 1);
    let mut args = mode_args(mode);
    let mut total = 0u64;
    loop {
        let batch: Vec<u64> = args.by_ref().take(GEN_CHUNK).collect();
        let lens: Vec<usize> = batch
            .par_iter()
            .map(|&n| {
                eval_floor_power(f, n, max_bits).map(|(v, _)| digit_length(&v, q))
            })
            .collect::<Result<_, _>>()?;
        for (&n, &len) in batch.iter().zip(&lens) {
            total += len as u64;
            if total >= l {
                return Ok(n);
            }
        }
    }
}

/// Largest expansion length over primes p <= n. Every prime is inspected;
/// nothing assumes f is monotone.
pub fn max_length(
    f: &PseudoPolynomial,
    q: u32,
    n: u64,
    max_bits: u32,
) -> Result<usize, DigitError> {
    check_base(q)?;
    assert!(n >= 2);
    let primes: Vec<u64> = crate::primes::primes_upto(n).collect();
    let j = primes
        .par_iter()
        .map(|&p| eval_floor_power(f, p, max_bits).map(|(v, _)| digit_length(&v, q)))
        .try_reduce(|| 0usize, |a, b| Ok(a.max(b)))?;
    Ok(j)
}

/// A fixed digit block d_1 ... d_ell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPattern {
    pub base: u32,
    pub digits: Vec<u8>,
}

impl BlockPattern {
    pub fn new(base: u32, digits: Vec<u8>) -> Result<Self, DigitError> {
        check_base(base)?;
        let ell = digits.len() as u32;
        if !(1..=MAX_BLOCK_LEN).contains(&ell) {
            return Err(DigitError::BlockLength(ell));
        }
        for &d in &digits {
            if d as u32 >= base {
                return Err(DigitError::DigitRange { digit: d, base });
            }
        }
        Ok(BlockPattern { base, digits })
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The pattern read as a base-q integer; the dense-table index.
    pub fn index(&self) -> u64 {
        self.digits
            .iter()
            .fold(0u64, |acc, &d| acc * self.base as u64 + d as u64)
    }
}

/// How occurrences are admitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountMode {
    /// Occurrences anywhere in the flat digit string.
    CrossBoundary,
    /// Occurrences lying fully inside a single item's expansion.
    WithinItem,
}

/// Occurrences of `pattern` in `digits` scanned with a rolling window.
fn count_in_slice(digits: &[u8], base: u32, pattern_idx: u64, ell: usize) -> u64 {
    if digits.len() < ell {
        return 0;
    }
    let q = base as u64;
    let modulus = q.pow(ell as u32);
    let mut roll = 0u64;
    let mut count = 0u64;
    for (i, &d) in digits.iter().enumerate() {
        roll = (roll * q + d as u64) % modulus;
        if i + 1 >= ell && roll == pattern_idx {
            count += 1;
        }
    }
    count
}

/// Counts occurrences of one pattern in a stream prefix.
pub fn count_blocks(stream: &DigitStream, pattern: &BlockPattern, mode: CountMode) -> u64 {
    assert_eq!(
        stream.base, pattern.base,
        "pattern base must match stream base"
    );
    let ell = pattern.len();
    let idx = pattern.index();
    match mode {
        CountMode::CrossBoundary => count_in_slice(&stream.digits, stream.base, idx, ell),
        CountMode::WithinItem => (0..stream.item_starts.len())
            .map(|i| {
                let (s, e) = stream.item_span(i);
                count_in_slice(&stream.digits[s..e], stream.base, idx, ell)
            })
            .sum(),
    }
}

/// Occurrence counts for every length-ell block at once, mergeable across
/// adjacent chunks by carrying ell-1 digits of state on each side.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockCounter {
    base: u32,
    ell: u32,
    counts: Vec<u64>,
    digits_seen: u64,
    head: Vec<u8>,
    tail: Vec<u8>,
    roll: u64,
}

impl BlockCounter {
    pub fn new(base: u32, ell: u32) -> Result<Self, DigitError> {
        check_base(base)?;
        if !(1..=MAX_BLOCK_LEN).contains(&ell) {
            return Err(DigitError::BlockLength(ell));
        }
        let size = (base as u64).checked_pow(ell).filter(|&s| s <= MAX_TABLE_SIZE);
        let size = size.ok_or(DigitError::TableTooLarge { base, ell })?;
        Ok(BlockCounter {
            base,
            ell,
            counts: vec![0; size as usize],
            digits_seen: 0,
            head: Vec::new(),
            tail: Vec::new(),
            roll: 0,
        })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn digits_seen(&self) -> u64 {
        self.digits_seen
    }

    /// Number of length-ell windows seen so far.
    pub fn window_count(&self) -> u64 {
        self.digits_seen.saturating_sub(self.ell as u64 - 1)
    }

    pub fn push(&mut self, d: u8) {
        debug_assert!((d as u32) < self.base);
        let window = self.roll * self.base as u64 + d as u64;
        self.digits_seen += 1;
        if self.digits_seen >= self.ell as u64 {
            self.counts[window as usize] += 1;
        }
        let keep = (self.ell - 1) as usize;
        if keep > 0 {
            if self.tail.len() == keep {
                self.tail.remove(0);
            }
            self.tail.push(d);
            if self.head.len() < keep {
                self.head.push(d);
            }
            self.roll = window % (self.base as u64).pow(self.ell - 1);
        }
    }

    pub fn push_all(&mut self, digits: &[u8]) {
        for &d in digits {
            self.push(d);
        }
    }

    /// Fresh counter over one digit slice.
    pub fn count_all(base: u32, ell: u32, digits: &[u8]) -> Result<Self, DigitError> {
        let mut c = BlockCounter::new(base, ell)?;
        c.push_all(digits);
        Ok(c)
    }

    /// Concatenation semantics: the result counts the digit string
    /// self ++ other, re-counting only the windows that span the seam.
    pub fn merge(mut self, other: &BlockCounter) -> BlockCounter {
        assert_eq!(self.base, other.base);
        assert_eq!(self.ell, other.ell);
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        let ell = self.ell as usize;
        let cut = self.tail.len();
        let joined: Vec<u8> = self.tail.iter().chain(other.head.iter()).copied().collect();
        if joined.len() >= ell {
            let q = self.base as u64;
            let modulus = q.pow(self.ell);
            let mut roll = 0u64;
            for (i, &d) in joined.iter().enumerate() {
                roll = (roll * q + d as u64) % modulus;
                if i + 1 >= ell {
                    let s = i + 1 - ell;
                    if s < cut && i >= cut {
                        self.counts[roll as usize] += 1;
                    }
                }
            }
        }
        let keep = ell - 1;
        let total = self.digits_seen + other.digits_seen;
        let head = if self.digits_seen >= keep as u64 {
            std::mem::take(&mut self.head)
        } else {
            let mut h = std::mem::take(&mut self.head);
            h.extend(other.head.iter().take(keep - h.len()));
            h
        };
        let tail = if other.digits_seen >= keep as u64 {
            other.tail.clone()
        } else {
            let mut t: Vec<u8> = self.tail.iter().chain(other.tail.iter()).copied().collect();
            if t.len() > keep {
                t.drain(..t.len() - keep);
            }
            t
        };
        let roll = tail
            .iter()
            .fold(0u64, |acc, &d| acc * self.base as u64 + d as u64);
        BlockCounter {
            base: self.base,
            ell: self.ell,
            counts: self.counts,
            digits_seen: total,
            head,
            tail,
            roll,
        }
    }
}

/// Sum over primes p <= n of occurrences of `pattern` in the expansion of
/// floor(f(p)) left-padded with zeros to the common length J = max_length.
pub fn padded_block_count(
    f: &PseudoPolynomial,
    q: u32,
    n: u64,
    pattern: &BlockPattern,
    max_bits: u32,
) -> Result<u64, DigitError> {
    check_base(q)?;
    assert_eq!(pattern.base, q);
    assert!(n >= 2);
    let j = max_length(f, q, n, max_bits)?;
    let ell = pattern.len();
    let idx = pattern.index();
    let primes: Vec<u64> = crate::primes::primes_upto(n).collect();
    primes
        .par_iter()
        .map(|&p| -> Result<u64, EvalError> {
            let (v, _) = eval_floor_power(f, p, max_bits)?;
            let ds = digits_of(&v, q);
            let mut padded = vec![0u8; j.saturating_sub(ds.len())];
            padded.extend_from_slice(&ds.digits);
            Ok(count_in_slice(&padded, q, idx, ell))
        })
        .try_reduce(|| 0u64, |a, b| Ok(a + b))
        .map_err(DigitError::from)
}

/// FNV-1a over the stream parameters; cache files carry it so a cache is
/// only reused for the exact construction that wrote it.
pub fn param_hash(f: &PseudoPolynomial, q: u32, mode: Mode) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    eat(f.canonical_string().as_bytes());
    eat(&q.to_le_bytes());
    eat(&[match mode {
        Mode::Integers => 0,
        Mode::Primes => 1,
    }]);
    h
}

const CACHE_MAGIC: &[u8; 8] = b"NDSTRM01";

/// Header + digits of a cached stream prefix.
#[derive(Debug, Clone, PartialEq)]
pub struct DigitCacheFile {
    pub base: u64,
    pub mode: u64,
    pub len: u64,
    pub param_hash: u64,
    pub digits: Vec<u8>,
}

/// Writes magic, four little-endian u64 header fields {base, mode, L,
/// parameter hash}, then one byte per digit.
pub fn write_digit_cache(path: &Path, stream: &DigitStream, hash: u64) -> io::Result<()> {
    let mut out = Vec::with_capacity(40 + stream.digits.len());
    out.extend_from_slice(CACHE_MAGIC);
    out.extend_from_slice(&(stream.base as u64).to_le_bytes());
    let mode = match stream.mode {
        Mode::Integers => 0u64,
        Mode::Primes => 1u64,
    };
    out.extend_from_slice(&mode.to_le_bytes());
    out.extend_from_slice(&(stream.digits.len() as u64).to_le_bytes());
    out.extend_from_slice(&hash.to_le_bytes());
    out.extend_from_slice(&stream.digits);
    let tmp = path.with_extension("tmp");
    {
        let mut fh = std::fs::File::create(&tmp)?;
        fh.write_all(&out)?;
        fh.sync_all()?;
    }
    std::fs::rename(&tmp, path)
}

pub fn read_digit_cache(path: &Path) -> io::Result<DigitCacheFile> {
    let mut fh = std::fs::File::open(path)?;
    let mut header = [0u8; 40];
    fh.read_exact(&mut header)?;
    if &header[..8] != CACHE_MAGIC {
        return Err(io::Error::new(
            io::ErrorKind::InvalidData,
            "bad digit cache magic",
        ));
    }
    let word = |i: usize| {
        u64::from_le_bytes(header[8 + 8 * i..16 + 8 * i].try_into().unwrap())
    };
    let (base, mode, len, param_hash) = (word(0), word(1), word(2), word(3));
    let mut digits = Vec::new();
    fh.read_to_end(&mut digits)?;
    if digits.len() as u64 != len {
        return Err(io::Error::new(
            io::ErrorKind::InvalidData,
            "digit cache length mismatch",
        ));
    }
    Ok(DigitCacheFile {
        base,
        mode,
        len,
        param_hash,
        digits,
    })
}
