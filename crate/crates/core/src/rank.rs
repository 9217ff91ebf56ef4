//! Exact ranks `G*(x|y)` by conditional-type counting.
//!
//! With `y` fixed, the posterior of `x` depends only on the conditional type
//! of `x` given `y`. The rank of `x` is therefore one plus the sizes of all
//! strictly heavier conditional type classes, plus the number of sequences in
//! tied classes that come lexicographically before `x`. No list is ever built,
//! so `n` can go far past what the enumeration oracle accepts.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Sub};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::info::{Channel, Pmf};
use crate::numeric::log2_biguint;
use crate::order::{sequence_from_index, sequence_index, PairWeights};

/// Largest number of `(x, y)` cells for which a full rank table is cached.
const LOOKUP_CELLS: f64 = 65_536.0;

/// Log gaps beyond this are decided without exact comparison.
const FAST_GAP: f64 = 1e-9;

/// A position in an optimal guessing list.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactRank(pub BigUint);

impl ExactRank {
    pub fn log2(&self) -> f64 {
        log2_biguint(&self.0)
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for ExactRank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Serialize for ExactRank {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl From<u64> for ExactRank {
    fn from(v: u64) -> Self {
        ExactRank(BigUint::from(v))
    }
}

/// Joint counts `n(a, b)` of a pair of sequences, flattened as `a·|Y| + b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConditionalType {
    nx: usize,
    ny: usize,
    counts: Vec<u32>,
}

impl ConditionalType {
    pub fn new(nx: usize, ny: usize, counts: Vec<u32>) -> Result<Self> {
        if counts.len() != nx * ny {
            return Err(Error::LengthMismatch(format!(
                "{} counts for a {nx}x{ny} type",
                counts.len()
            )));
        }
        Ok(ConditionalType { nx, ny, counts })
    }

    pub fn of_pair(x: &[usize], y: &[usize], nx: usize, ny: usize) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch(format!(
                "x has length {}, y has length {}",
                x.len(),
                y.len()
            )));
        }
        let mut counts = vec![0u32; nx * ny];
        for (&a, &b) in x.iter().zip(y) {
            if a >= nx || b >= ny {
                return Err(Error::param("sequence", "symbol outside the alphabet"));
            }
            counts[a * ny + b] += 1;
        }
        Ok(ConditionalType { nx, ny, counts })
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn count(&self, a: usize, b: usize) -> u32 {
        self.counts[a * self.ny + b]
    }

    pub fn n(&self) -> u32 {
        self.counts.iter().sum()
    }

    /// x-counts within the block of positions where `y = b`.
    pub fn block(&self, b: usize) -> Vec<u32> {
        (0..self.nx).map(|a| self.count(a, b)).collect()
    }

    /// Empirical distribution of `y`.
    pub fn y_type(&self) -> Vec<f64> {
        let n = self.n() as f64;
        (0..self.ny)
            .map(|b| self.block(b).iter().sum::<u32>() as f64 / n)
            .collect()
    }

    /// Empirical rows `P̂(x|y=b)`, `None` for empty blocks.
    pub fn x_given_y(&self) -> Vec<Option<Vec<f64>>> {
        (0..self.ny)
            .map(|b| {
                let block = self.block(b);
                let total: u32 = block.iter().sum();
                (total > 0).then(|| block.iter().map(|&c| c as f64 / total as f64).collect())
            })
            .collect()
    }
}

/// Number of `x` sequences of type `t` for a fixed `y` of matching `y`-type:
/// the product over `y`-blocks of multinomial coefficients.
pub fn class_size(t: &ConditionalType) -> BigUint {
    let mut size = BigUint::one();
    for b in 0..t.ny {
        size *= multinomial_big(&t.block(b));
    }
    size
}

fn multinomial_big(parts: &[u32]) -> BigUint {
    let mut result = BigUint::one();
    let mut total = 0u32;
    for &p in parts {
        for i in 1..=p {
            total += 1;
            result = result * BigUint::from(total) / BigUint::from(i);
        }
    }
    result
}

/// Integer arithmetic the counting needs, from machine words up to `BigUint`.
/// `BigUint` otherwise.
trait Count: Clone + Zero + One + Add<Output = Self> + AddAssign + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> {
    fn from_u32(v: u32) -> Self;
    fn to_big(&self) -> BigUint;
}

impl Count for u64 {
    fn from_u32(v: u32) -> Self {
        v as u64
    }
    fn to_big(&self) -> BigUint {
        BigUint::from(*self)
    }
}

impl Count for u128 {
    fn from_u32(v: u32) -> Self {
        v as u128
    }
    fn to_big(&self) -> BigUint {
        BigUint::from(*self)
    }
}

impl Count for BigUint {
    fn from_u32(v: u32) -> Self {
        BigUint::from(v)
    }
    fn to_big(&self) -> BigUint {
        self.clone()
    }
}

fn multinomial<C: Count>(parts: &[u32]) -> C {
    let mut result = C::one();
    let mut total = 0u32;
    for &p in parts {
        for i in 1..=p {
            total += 1;
            result = result * C::from_u32(total) / C::from_u32(i);
        }
    }
    result
}

/// One candidate x-composition of a y-block.
#[derive(Debug, Clone)]
struct BlockComposition {
    parts: Vec<u32>,
    log2: f64,
}

/// Compositions of `total` into `k` ordered nonnegative parts.
fn compositions(total: u32, k: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = vec![0u32; k];
    fn rec(pos: usize, left: u32, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        let k = current.len();
        if pos == k - 1 {
            current[pos] = left;
            out.push(current.clone());
            return;
        }
        for v in (0..=left).rev() {
            current[pos] = v;
            rec(pos + 1, left - v, current, out);
        }
    }
    rec(0, total, &mut current, &mut out);
    out
}

/// Narrowest integer type that holds every intermediate count. Counts are
/// at most `|X|^n` and get multiplied by at most `n` before dividing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Width {
    U64,
    U128,
    Big,
}

impl Width {
    fn for_problem(n: usize, nx: usize) -> Self {
        let bits = n as f64 * (nx as f64).log2() + ((n + 1) as f64).log2();
        if bits < 63.0 {
            Width::U64
        } else if bits < 127.0 {
            Width::U128
        } else {
            Width::Big
        }
    }
}

/// Rank oracle for a fixed prior, channel and length.
#[derive(Debug, Clone)]
pub struct RankEngine {
    weights: PairWeights,
    n: usize,
    width: Width,
    y_positive: Vec<bool>,
    lookup: Option<Vec<u64>>,
}

impl RankEngine {
    pub fn new(p_x: &Pmf, w: &Channel, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n", "must be at least 1"));
        }
        let weights = PairWeights::new(p_x, w)?;
        let (nx, ny) = (weights.nx(), weights.ny());
        let y_positive = (0..ny)
            .map(|b| (0..nx).any(|a| !weights.is_zero(a, b)))
            .collect();
        let width = Width::for_problem(n, nx);
        let mut engine = RankEngine {
            weights,
            n,
            width,
            y_positive,
            lookup: None,
        };
        let cells = (nx as f64).powi(n as i32) * (ny as f64).powi(n as i32);
        if cells <= LOOKUP_CELLS {
            engine.lookup = Some(engine.build_lookup());
        }
        Ok(engine)
    }

    /// Engine for guessing without side information.
    pub fn without_side_info(p_x: &Pmf, n: usize) -> Result<Self> {
        Self::new(p_x, &Channel::useless(p_x.alphabet().clone()), n)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn build_lookup(&self) -> Vec<u64> {
        let (nx, ny) = (self.weights.nx(), self.weights.ny());
        let total_x = nx.pow(self.n as u32);
        let total_y = ny.pow(self.n as u32);
        let mut table = vec![0u64; total_x * total_y];
        for yi in 0..total_y {
            let y = sequence_from_index(yi as u64, ny, self.n);
            if !self.y_is_possible(&y) {
                continue;
            }
            for xi in 0..total_x {
                let x = sequence_from_index(xi as u64, nx, self.n);
                table[yi * total_x + xi] = self.count_rank::<u64>(&x, &y);
            }
        }
        table
    }

    fn y_is_possible(&self, y: &[usize]) -> bool {
        y.iter().all(|&b| self.y_positive[b])
    }

    fn validate(&self, x: &[usize], y: &[usize]) -> Result<()> {
        if x.len() != self.n || y.len() != self.n {
            return Err(Error::LengthMismatch(format!(
                "engine built for n = {}, got |x| = {}, |y| = {}",
                self.n,
                x.len(),
                y.len()
            )));
        }
        if x.iter().any(|&a| a >= self.weights.nx()) || y.iter().any(|&b| b >= self.weights.ny()) {
            return Err(Error::param("sequence", "symbol outside the alphabet"));
        }
        if !self.y_is_possible(y) {
            return Err(Error::ZeroProbability(
                "side-information sequence cannot occur".into(),
            ));
        }
        Ok(())
    }

    /// `G*(x|y)`.
    pub fn rank(&self, x: &[usize], y: &[usize]) -> Result<ExactRank> {
        self.validate(x, y)?;
        if let Some(r) = self.cached(x, y) {
            return Ok(ExactRank(BigUint::from(r)));
        }
        Ok(ExactRank(match self.width {
            Width::U64 => self.count_rank::<u64>(x, y).to_big(),
            Width::U128 => self.count_rank::<u128>(x, y).to_big(),
            Width::Big => self.count_rank::<BigUint>(x, y),
        }))
    }

    /// `log2 G*(x|y)`, skipping the big-integer conversion when possible.
    pub fn rank_log2(&self, x: &[usize], y: &[usize]) -> Result<f64> {
        self.validate(x, y)?;
        if let Some(r) = self.cached(x, y) {
            return Ok((r as f64).log2());
        }
        Ok(match self.width {
            Width::U64 => (self.count_rank::<u64>(x, y) as f64).log2(),
            Width::U128 => (self.count_rank::<u128>(x, y) as f64).log2(),
            Width::Big => log2_biguint(&self.count_rank::<BigUint>(x, y)),
        })
    }

    fn cached(&self, x: &[usize], y: &[usize]) -> Option<u64> {
        self.lookup.as_ref().map(|table| {
            let nx = self.weights.nx();
            let total_x = nx.pow(self.n as u32);
            let xi = sequence_index(x, nx) as usize;
            let yi = sequence_index(y, self.weights.ny()) as usize;
            table[yi * total_x + xi]
        })
    }

    /// The run of positions shared by every sequence tied with `x` given `y`,
    /// as an inclusive range. Only this run, not the offset inside it, is a
    /// function of the conditional type alone.
    pub fn tie_run(&self, x: &[usize], y: &[usize]) -> Result<(ExactRank, ExactRank)> {
        self.validate(x, y)?;
        let (heavier, tied) = self.classify::<BigUint>(x, y);
        let first = heavier.clone() + BigUint::one();
        let mut last = heavier;
        for t in &tied {
            last += class_size(&ConditionalType::new(self.weights.nx(), self.weights.ny(), t.clone())?);
        }
        Ok((ExactRank(first), ExactRank(last)))
    }

    fn count_rank<C: Count>(&self, x: &[usize], y: &[usize]) -> C {
        let (nx, ny) = (self.weights.nx(), self.weights.ny());
        if x.iter().zip(y).any(|(&a, &b)| self.weights.is_zero(a, b)) {
            return self.impossible_rank(x, y);
        }
        let (heavier, tied) = self.classify::<C>(x, y);
        let mut rank = C::one();
        rank += heavier;
        for t in &tied {
            rank += lex_count::<C>(t, x, y, nx, ny);
        }
        rank
    }

    /// Zero-probability sequences form one tie class after every possible
    /// one, so `x` sits after all `Π |A(y_i)|` possible sequences, offset by
    /// the impossible sequences before it in lexicographic order. `A(b)` is
    /// the set of inputs that can produce `b`.
    fn impossible_rank<C: Count>(&self, x: &[usize], y: &[usize]) -> C {
        let nx = self.weights.nx();
        let allowed_below = |a: usize, b: usize| (0..a).filter(|&c| !self.weights.is_zero(c, b)).count() as u32;
        // suffix[i] = number of possible completions of positions i..n.
        let mut suffix = vec![C::one(); x.len() + 1];
        for i in (0..x.len()).rev() {
            suffix[i] = suffix[i + 1].clone() * C::from_u32(allowed_below(nx, y[i]));
        }
        let mut before_all = C::zero();
        for &a in x {
            before_all = before_all * C::from_u32(nx as u32) + C::from_u32(a as u32);
        }
        // A possible predecessor agrees with x on a possible prefix.
        let mut before_possible = C::zero();
        for (i, (&a, &b)) in x.iter().zip(y).enumerate() {
            before_possible += C::from_u32(allowed_below(a, b)) * suffix[i + 1].clone();
            if self.weights.is_zero(a, b) {
                break;
            }
        }
        C::one() + suffix[0].clone() + before_all - before_possible
    }

    /// Total size of strictly heavier classes, and the tied types.
    fn classify<C: Count>(&self, x: &[usize], y: &[usize]) -> (C, Vec<Vec<u32>>) {
        let (nx, ny) = (self.weights.nx(), self.weights.ny());
        let target = ConditionalType::of_pair(x, y, nx, ny).expect("validated");
        let target_log = self.weights.type_log2(target.counts());
        let target_possible = target_log > f64::NEG_INFINITY;

        // Candidate compositions per block, with zero-weight ones dropped when
        // they cannot tie with the target.
        let mut blocks: Vec<Vec<BlockComposition>> = Vec::with_capacity(ny);
        for b in 0..ny {
            let size = target.block(b).iter().sum::<u32>();
            let comps = compositions(size, nx)
                .into_iter()
                .filter_map(|parts| {
                    let mut log2 = 0.0;
                    for (a, &c) in parts.iter().enumerate() {
                        if c > 0 {
                            let l = self.weights.log2(a, b);
                            if l == f64::NEG_INFINITY {
                                log2 = f64::NEG_INFINITY;
                                break;
                            }
                            log2 += c as f64 * l;
                        }
                    }
                    if target_possible && log2 == f64::NEG_INFINITY {
                        None
                    } else {
                        Some(BlockComposition { parts, log2 })
                    }
                })
                .collect();
            blocks.push(comps);
        }

        let mut heavier = C::zero();
        let mut tied: Vec<Vec<u32>> = Vec::new();
        let mut choice = vec![0usize; ny];
        let mut counts = vec![0u32; nx * ny];
        'outer: loop {
            let log2: f64 = (0..ny).map(|b| blocks[b][choice[b]].log2).sum();
            let fill = |counts: &mut Vec<u32>| {
                for b in 0..ny {
                    for (a, &c) in blocks[b][choice[b]].parts.iter().enumerate() {
                        counts[a * ny + b] = c;
                    }
                }
            };
            let ord = if !target_possible {
                if log2 == f64::NEG_INFINITY {
                    Ordering::Equal
                } else {
                    Ordering::Greater
                }
            } else {
                let gap = log2 - target_log;
                if gap.abs() > FAST_GAP * (1.0 + target_log.abs()) {
                    if gap > 0.0 {
                        Ordering::Greater
                    } else {
                        Ordering::Less
                    }
                } else {
                    fill(&mut counts);
                    self.weights
                        .compare_types(&counts, log2, target.counts(), target_log)
                }
            };
            match ord {
                Ordering::Greater => {
                    let mut size = C::one();
                    for b in 0..ny {
                        size = size * multinomial::<C>(&blocks[b][choice[b]].parts);
                    }
                    heavier += size;
                }
                Ordering::Equal => {
                    fill(&mut counts);
                    tied.push(counts.clone());
                }
                Ordering::Less => {}
            }
            for b in (0..ny).rev() {
                choice[b] += 1;
                if choice[b] < blocks[b].len() {
                    continue 'outer;
                }
                choice[b] = 0;
            }
            break;
        }
        (heavier, tied)
    }
}

/// Number of sequences with conditional type `t` given `y` that precede `x`
/// lexicographically.
fn lex_count<C: Count>(t: &[u32], x: &[usize], y: &[usize], nx: usize, ny: usize) -> C {
    let mut rem = t.to_vec();
    let mut totals: Vec<u32> = (0..ny)
        .map(|b| (0..nx).map(|a| rem[a * ny + b]).sum())
        .collect();
    let mut members = C::one();
    for b in 0..ny {
        let block: Vec<u32> = (0..nx).map(|a| rem[a * ny + b]).collect();
        members = members * multinomial::<C>(&block);
    }
    let mut count = C::zero();
    for (&xi, &b) in x.iter().zip(y) {
        let tot = totals[b];
        for a in 0..xi {
            let r = rem[a * ny + b];
            if r > 0 {
                count += members.clone() * C::from_u32(r) / C::from_u32(tot);
            }
        }
        let r = rem[xi * ny + b];
        if r == 0 {
            break;
        }
        members = members * C::from_u32(r) / C::from_u32(tot);
        rem[xi * ny + b] -= 1;
        totals[b] -= 1;
    }
    count
}

/// `G*(x)` for i.i.d. `x` with no side information.
pub fn rank_no_side_info(x: &[usize], p_x: &Pmf) -> Result<ExactRank> {
    RankEngine::without_side_info(p_x, x.len())?.rank(x, &vec![0; x.len()])
}

/// `G*(x|y)` under the product model `p_x`, `w`.
pub fn rank_given_side_info(x: &[usize], y: &[usize], p_x: &Pmf, w: &Channel) -> Result<ExactRank> {
    RankEngine::new(p_x, w, x.len())?.rank(x, y)
}
