//! Password reuse toy: sister passwords through a per-character substitution
//! channel, majority pooling with erasures, and guesses-to-success curves.
//!
//! All guessing here treats letters as equally likely, so enumeration orders
//! are lexicographic rather than frequency weighted.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

pub const LETTERS: usize = 26;
pub const ERASED: char = '?';
pub const DEFAULT_FLIP_PROB: f64 = 0.3;

fn is_lowercase_word(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_lowercase())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PasswordCorpus {
    entries: Vec<(String, f64)>,
}

impl PasswordCorpus {
    pub fn new(entries: impl IntoIterator<Item = (String, f64)>) -> Result<Self> {
        let mut merged: HashMap<String, f64> = HashMap::new();
        for (pw, weight) in entries {
            if !is_lowercase_word(&pw) {
                return Err(Error::Parse(format!("{pw:?} is not a nonempty a-z string")));
            }
            if !(weight >= 0.0) || !weight.is_finite() {
                return Err(Error::param("weight", format!("{weight} for {pw:?}")));
            }
            *merged.entry(pw).or_default() += weight;
        }
        if merged.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let mut entries: Vec<(String, f64)> = merged.into_iter().collect();
        entries.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        Ok(PasswordCorpus { entries })
    }

    pub fn entries(&self) -> &[(String, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.entries.iter().map(|e| e.1).sum()
    }

    pub fn truncate(&mut self, top_k: usize) {
        self.entries.truncate(top_k);
    }

    /// Parse a corpus from text: plain lines count one each, and
    /// `count<TAB>password` lines add `count`. Non-lowercase lines are dropped.
    pub fn parse(text: &str, top_k: Option<usize>, length: Option<usize>) -> Result<Self> {
        let mut counts: HashMap<String, f64> = HashMap::new();
        for raw in text.lines() {
            let line = raw.trim_end_matches('\r');
            let (weight, pw) = match line.split_once('\t') {
                Some((count, pw)) => match count.trim().parse::<f64>() {
                    Ok(c) if c >= 0.0 && c.is_finite() => (c, pw),
                    _ => continue,
                },
                None => (1.0, line),
            };
            if !is_lowercase_word(pw) || length.is_some_and(|l| pw.len() != l) {
                continue;
            }
            *counts.entry(pw.to_string()).or_default() += weight;
        }
        let mut corpus = Self::new(counts)?;
        if let Some(k) = top_k {
            if k == 0 {
                return Err(Error::param("top_k", "must be at least 1"));
            }
            corpus.truncate(k);
        }
        Ok(corpus)
    }

    /// Seeded synthetic corpus: `size` distinct random words with Zipf weights
    /// `1/rank`, lengths drawn uniformly from `min_len..=max_len`.
    pub fn synthetic(size: usize, min_len: usize, max_len: usize, seed: u64) -> Result<Self> {
        if size == 0 {
            return Err(Error::EmptyCorpus);
        }
        if min_len == 0 || min_len > max_len {
            return Err(Error::param("length", format!("bad range {min_len}..={max_len}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut seen = std::collections::HashSet::new();
        let mut words = Vec::with_capacity(size);
        let mut attempts = 0usize;
        while words.len() < size {
            attempts += 1;
            if attempts > 100 * size + 1000 {
                return Err(Error::Infeasible(format!(
                    "cannot draw {size} distinct words of length {min_len}..={max_len}"
                )));
            }
            let len = rng.random_range(min_len..=max_len);
            let w: String = (0..len)
                .map(|_| (b'a' + rng.random_range(0..LETTERS as u8)) as char)
                .collect();
            if seen.insert(w.clone()) {
                words.push(w);
            }
        }
        Self::new(
            words
                .into_iter()
                .enumerate()
                .map(|(i, w)| (w, 1.0 / (i + 1) as f64)),
        )
    }
}

pub fn load_corpus(path: impl AsRef<Path>, top_k: Option<usize>, length: Option<usize>) -> Result<PasswordCorpus> {
    PasswordCorpus::parse(&std::fs::read_to_string(path)?, top_k, length)
}

fn check_lowercase(s: &str, what: &str) -> Result<()> {
    if is_lowercase_word(s) {
        Ok(())
    } else {
        Err(Error::Parse(format!("{what} {s:?} is not a nonempty a-z string")))
    }
}

fn check_lengths(a: &str, b: &str) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(format!(
            "{a:?} has length {} but {b:?} has length {}",
            a.len(),
            b.len()
        )));
    }
    Ok(())
}

/// `m` noisy copies of `password`: each character is independently replaced,
/// with probability `flip_prob`, by a uniform choice among the other 25 letters.
pub fn gen_sisters(password: &str, m: usize, flip_prob: f64, seed: u64) -> Result<Vec<String>> {
    check_lowercase(password, "password")?;
    if !(0.0..=1.0).contains(&flip_prob) {
        return Err(Error::param("flip_prob", format!("{flip_prob} is outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..m).map(|_| sister(password, flip_prob, &mut rng)).collect())
}

fn sister(password: &str, flip_prob: f64, rng: &mut impl Rng) -> String {
    password
        .bytes()
        .map(|c| {
            if flip_prob > 0.0 && rng.random::<f64>() < flip_prob {
                let mut other = b'a' + rng.random_range(0..LETTERS as u8 - 1);
                if other >= c {
                    other += 1;
                }
                other as char
            } else {
                c as char
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct PooledPattern(String);

impl PooledPattern {
    pub fn new(pattern: impl Into<String>) -> Result<Self> {
        let p = pattern.into();
        if p.is_empty() || !p.bytes().all(|b| b.is_ascii_lowercase() || b == ERASED as u8) {
            return Err(Error::Parse(format!("{p:?} is not a pattern over a-z and '?'")));
        }
        Ok(PooledPattern(p))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn erasures(&self) -> usize {
        self.0.bytes().filter(|&b| b == ERASED as u8).count()
    }
}

impl fmt::Display for PooledPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Per position, the letter carried by strictly more than half the sisters, else `?`.
pub fn pool_sisters<S: AsRef<str>>(sisters: &[S]) -> Result<PooledPattern> {
    let first = sisters
        .first()
        .ok_or_else(|| Error::param("sisters", "need at least one"))?
        .as_ref();
    for s in sisters {
        check_lowercase(s.as_ref(), "sister")?;
        check_lengths(first, s.as_ref())?;
    }
    let m = sisters.len();
    let pattern = (0..first.len())
        .map(|i| {
            let mut counts = [0usize; LETTERS];
            for s in sisters {
                counts[(s.as_ref().as_bytes()[i] - b'a') as usize] += 1;
            }
            match counts.iter().position(|&c| 2 * c > m) {
                Some(letter) => (b'a' + letter as u8) as char,
                None => ERASED,
            }
        })
        .collect::<String>();
    PooledPattern::new(pattern)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "outcome", content = "guesses")]
pub enum GuessOutcome {
    Found(u64),
    Exhausted,
    /// The pooled pattern fixes a letter the secret does not have.
    Mismatch,
}

impl GuessOutcome {
    pub fn guesses(self) -> Option<u64> {
        match self {
            GuessOutcome::Found(g) => Some(g),
            _ => None,
        }
    }
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// 0-based index of a sorted position subset among all `d`-subsets of `0..len`
/// in lexicographic order.
fn combination_index(positions: &[usize], len: usize) -> u128 {
    let d = positions.len();
    let mut index = 0u128;
    let mut start = 0usize;
    for (j, &p) in positions.iter().enumerate() {
        for skipped in start..p {
            index += binomial((len - skipped - 1) as u64, (d - j - 1) as u64);
        }
        start = p + 1;
    }
    index
}

/// Guesses until `secret` is hit when walking Hamming shells around `sister`:
/// shell by shell, position subsets in lexicographic order, and within a
/// subset the substituted letters in a-z order skipping the sister's letter.
pub fn decentralized_guess_count(secret: &str, sister: &str, budget: u64) -> Result<GuessOutcome> {
    check_lowercase(secret, "secret")?;
    check_lowercase(sister, "sister")?;
    check_lengths(secret, sister)?;
    let len = secret.len();
    let (s, t) = (secret.as_bytes(), sister.as_bytes());
    let diff: Vec<usize> = (0..len).filter(|&i| s[i] != t[i]).collect();
    let d = diff.len();
    let others = (LETTERS - 1) as u128;
    let mut index: u128 = (0..d)
        .map(|e| binomial(len as u64, e as u64) * others.pow(e as u32))
        .sum();
    index += combination_index(&diff, len) * others.pow(d as u32);
    // Letters within the subset form a base-25 number, first position most significant.
    let mut within = 0u128;
    for &p in &diff {
        let mut digit = (s[p] - b'a') as u128;
        if s[p] > t[p] {
            digit -= 1;
        }
        within = within * others + digit;
    }
    index += within + 1;
    Ok(if index <= budget as u128 {
        GuessOutcome::Found(index as u64)
    } else {
        GuessOutcome::Exhausted
    })
}

/// Guesses until `secret` is hit when filling the erased positions of
/// `pattern` over all 26^e completions in lexicographic order.
pub fn centralized_guess_count(secret: &str, pattern: &PooledPattern, budget: u64) -> Result<GuessOutcome> {
    check_lowercase(secret, "secret")?;
    check_lengths(secret, pattern.as_str())?;
    let mut index = 0u128;
    for (&c, &p) in secret.as_bytes().iter().zip(pattern.as_str().as_bytes()) {
        if p == ERASED as u8 {
            index = index.saturating_mul(LETTERS as u128) + (c - b'a') as u128;
        } else if p != c {
            return Ok(GuessOutcome::Mismatch);
        }
    }
    let index = index.saturating_add(1);
    Ok(if index <= budget as u128 {
        GuessOutcome::Found(index as u64)
    } else {
        GuessOutcome::Exhausted
    })
}

/// Test enumerator for the Hamming-shell order, up to `max_shell`.
pub fn hamming_shell_candidates(sister: &str, max_shell: usize) -> Vec<String> {
    let t = sister.as_bytes();
    let len = t.len();
    let mut out = Vec::new();
    for d in 0..=max_shell.min(len) {
        for subset in combinations(len, d) {
            let total = (LETTERS - 1).pow(d as u32);
            for code in 0..total {
                let mut word = t.to_vec();
                let mut rest = code;
                for &p in subset.iter().rev() {
                    let mut letter = b'a' + (rest % (LETTERS - 1)) as u8;
                    rest /= LETTERS - 1;
                    if letter >= t[p] {
                        letter += 1;
                    }
                    word[p] = letter;
                }
                out.push(String::from_utf8(word).expect("ascii"));
            }
        }
    }
    out
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn go(start: usize, n: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            if n - i < k - current.len() {
                break;
            }
            current.push(i);
            go(i + 1, n, k, current, out);
            current.pop();
        }
    }
    go(0, n, k, &mut current, &mut out);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ToyStrategy {
    Single,
    Decentralized,
    Centralized,
}

impl ToyStrategy {
    pub const ALL: [ToyStrategy; 3] = [ToyStrategy::Single, ToyStrategy::Decentralized, ToyStrategy::Centralized];

    pub fn name(self) -> &'static str {
        match self {
            ToyStrategy::Single => "single",
            ToyStrategy::Decentralized => "decentralized",
            ToyStrategy::Centralized => "centralized",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ToyConfig {
    pub m: usize,
    pub flip_prob: f64,
    pub seed: u64,
}

impl Default for ToyConfig {
    fn default() -> Self {
        ToyConfig {
            m: 3,
            flip_prob: DEFAULT_FLIP_PROB,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuccessCurve {
    pub strategy: ToyStrategy,
    /// `(budget, fraction_recovered)`, budgets ascending.
    pub points: Vec<(u64, f64)>,
}

impl SuccessCurve {
    /// Smallest listed budget recovering at least `target` of the weight.
    pub fn budget_to(&self, target: f64) -> Option<u64> {
        self.points.iter().find(|p| p.1 >= target).map(|p| p.0)
    }
}

/// Per-entry guess counts (`None` when never recovered) for every strategy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntryOutcome {
    pub password: String,
    pub weight: f64,
    pub single: Option<u64>,
    pub decentralized: Option<u64>,
    pub centralized: Option<u64>,
}

impl EntryOutcome {
    pub fn get(&self, strategy: ToyStrategy) -> Option<u64> {
        match strategy {
            ToyStrategy::Single => self.single,
            ToyStrategy::Decentralized => self.decentralized,
            ToyStrategy::Centralized => self.centralized,
        }
    }
}

fn entry_seed(master: u64, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index as u64);
    rng.random()
}

/// Runs all strategies on every corpus entry; the single-agent attacker
/// uses the first of the `m` sisters.
pub fn run_toy(corpus: &PasswordCorpus, config: &ToyConfig) -> Result<Vec<EntryOutcome>> {
    if config.m == 0 {
        return Err(Error::param("m", "must be at least 1"));
    }
    corpus
        .entries()
        .par_iter()
        .enumerate()
        .map(|(i, (pw, weight))| {
            let sisters = gen_sisters(pw, config.m, config.flip_prob, entry_seed(config.seed, i))?;
            let counts = sisters
                .iter()
                .map(|s| decentralized_guess_count(pw, s, u64::MAX).map(GuessOutcome::guesses))
                .collect::<Result<Vec<_>>>()?;
            let pattern = pool_sisters(&sisters)?;
            Ok(EntryOutcome {
                password: pw.clone(),
                weight: *weight,
                single: counts[0],
                decentralized: counts.iter().flatten().min().copied(),
                centralized: centralized_guess_count(pw, &pattern, u64::MAX)?.guesses(),
            })
        })
        .collect()
}

/// Weighted fraction of entries recovered within each budget, per strategy.
pub fn success_curve(corpus: &PasswordCorpus, config: &ToyConfig, budgets: &[u64]) -> Result<Vec<SuccessCurve>> {
    if budgets.contains(&0) {
        return Err(Error::param("budgets", "must be positive"));
    }
    let outcomes = run_toy(corpus, config)?;
    Ok(curves_from_outcomes(&outcomes, budgets))
}

pub fn curves_from_outcomes(outcomes: &[EntryOutcome], budgets: &[u64]) -> Vec<SuccessCurve> {
    let mut budgets = budgets.to_vec();
    budgets.sort_unstable();
    budgets.dedup();
    let total: f64 = outcomes.iter().map(|o| o.weight).sum();
    ToyStrategy::ALL
        .iter()
        .map(|&strategy| {
            let mut hits: Vec<(u64, f64)> = outcomes
                .iter()
                .filter_map(|o| o.get(strategy).map(|g| (g, o.weight)))
                .collect();
            hits.sort_unstable_by_key(|h| h.0);
            let mut acc = 0.0;
            let mut next = 0;
            let points = budgets
                .iter()
                .map(|&b| {
                    while next < hits.len() && hits[next].0 <= b {
                        acc += hits[next].1;
                        next += 1;
                    }
                    (b, if total > 0.0 { (acc / total).min(1.0) } else { 0.0 })
                })
                .collect();
            SuccessCurve { strategy, points }
        })
        .collect()
}

/// Exact smallest budget at which `strategy` recovers at least `target` of the weight.
pub fn budget_to_fraction(outcomes: &[EntryOutcome], strategy: ToyStrategy, target: f64) -> Option<u64> {
    let total: f64 = outcomes.iter().map(|o| o.weight).sum();
    let mut hits: Vec<(u64, f64)> = outcomes
        .iter()
        .filter_map(|o| o.get(strategy).map(|g| (g, o.weight)))
        .collect();
    hits.sort_unstable_by_key(|h| h.0);
    let mut acc = 0.0;
    for (g, w) in hits {
        acc += w;
        if acc >= target * total * (1.0 - 1e-12) {
            return Some(g);
        }
    }
    None
}

/// Log-spaced budgets 1, 2, 5, 10, 20, 50, ... up to `max`.
pub fn default_budgets(max: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut decade = 1u64;
    'outer: loop {
        for step in [1, 2, 5] {
            let b = decade.saturating_mul(step);
            if b > max {
                break 'outer;
            }
            out.push(b);
        }
        if decade > max / 10 {
            break;
        }
        decade *= 10;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn corpus_parsing() {
        let c = PasswordCorpus::parse("abc\nabc\nzzz\n", None, None).unwrap();
        assert_eq!(c.entries(), &[("abc".to_string(), 2.0), ("zzz".to_string(), 1.0)]);
        let top = PasswordCorpus::parse("abc\nabc\nzzz\n", Some(1), None).unwrap();
        assert_eq!(top.len(), 1);
        assert_eq!(top.entries()[0].0, "abc");
        let c = PasswordCorpus::parse("Abc\nab1\nok\n5\tfive\nbad\tx y\n", None, None).unwrap();
        assert_eq!(c.entries(), &[("five".to_string(), 5.0), ("ok".to_string(), 1.0)]);
        let c = PasswordCorpus::parse("ab\nabc\n", None, Some(3)).unwrap();
        assert_eq!(c.len(), 1);
        assert!(matches!(PasswordCorpus::parse("ABC\n", None, None), Err(Error::EmptyCorpus)));
    }

    #[test]
    fn ties_sort_lexicographically() {
        let c = PasswordCorpus::parse("b\na\nc\nc\n", None, None).unwrap();
        let names: Vec<&str> = c.entries().iter().map(|e| e.0.as_str()).collect();
        assert_eq!(names, ["c", "a", "b"]);
    }

    #[test]
    fn synthetic_corpus_is_seeded() {
        let a = PasswordCorpus::synthetic(100, 6, 8, 4).unwrap();
        assert_eq!(a, PasswordCorpus::synthetic(100, 6, 8, 4).unwrap());
        assert_ne!(a, PasswordCorpus::synthetic(100, 6, 8, 5).unwrap());
        assert_eq!(a.len(), 100);
        assert!(a.entries().windows(2).all(|w| w[0].1 >= w[1].1));
    }

    #[test]
    fn sister_extremes() {
        assert_eq!(gen_sisters("password", 3, 0.0, 1).unwrap(), vec!["password"; 3]);
        for s in gen_sisters("password", 5, 1.0, 2).unwrap() {
            assert!(s.bytes().zip("password".bytes()).all(|(a, b)| a != b));
        }
        assert_eq!(gen_sisters("abc", 4, 0.3, 9).unwrap(), gen_sisters("abc", 4, 0.3, 9).unwrap());
        assert!(gen_sisters("abc", 1, 1.5, 0).is_err());
    }

    #[test]
    fn sister_hamming_distance_is_binomial() {
        let (p, len, seeds) = (0.3, 10usize, 10_000u64);
        let total: usize = (0..seeds)
            .map(|seed| {
                let s = &gen_sisters("abcdefghij", 1, p, seed).unwrap()[0];
                s.bytes().zip("abcdefghij".bytes()).filter(|(a, b)| a != b).count()
            })
            .sum();
        let mean = total as f64 / seeds as f64;
        let sd = (len as f64 * p * (1.0 - p) / seeds as f64).sqrt();
        assert!((mean - p * len as f64).abs() < 3.0 * sd, "{mean}");
    }

    #[test]
    fn pooling_examples() {
        assert_eq!(pool_sisters(&["wasswgrd", "phssyotd", "password"]).unwrap().as_str(), "password");
        assert_eq!(pool_sisters(&["rockyeu", "rockyou", "hozkyxu"]).unwrap().as_str(), "rocky?u");
        assert_eq!(pool_sisters(&["abc"]).unwrap().as_str(), "abc");
        // Two of four is not a strict majority.
        assert_eq!(pool_sisters(&["ab", "ab", "cd", "ce"]).unwrap().as_str(), "??");
        assert!(pool_sisters(&["ab", "abc"]).is_err());
        assert!(pool_sisters::<&str>(&[]).is_err());
    }

    #[test]
    fn decentralized_examples() {
        assert_eq!(decentralized_guess_count("hello", "hello", 10).unwrap(), GuessOutcome::Found(1));
        // Last position changed to 'z': after the shell-0 guess and the 25 guesses
        // for each earlier position, 'z' is the 25th non-sister letter.
        let len = 5u64;
        let got = decentralized_guess_count("hellz", "hello", u64::MAX).unwrap();
        assert_eq!(got, GuessOutcome::Found(1 + 25 * (len - 1) + 25));
        assert_eq!(decentralized_guess_count("hellz", "hello", 100).unwrap(), GuessOutcome::Exhausted);
        assert!(decentralized_guess_count("hell", "hello", 1).is_err());
    }

    #[test]
    fn decentralized_closed_form_matches_enumeration() {
        let sister = "kqa";
        let all = hamming_shell_candidates(sister, 2);
        assert_eq!(all.len(), 1 + 3 * 25 + 3 * 625);
        let mut seen = std::collections::HashSet::new();
        for (i, cand) in all.iter().enumerate() {
            assert!(seen.insert(cand.clone()));
            let got = decentralized_guess_count(cand, sister, u64::MAX).unwrap();
            assert_eq!(got, GuessOutcome::Found(i as u64 + 1), "{cand}");
        }
    }

    #[test]
    fn centralized_examples() {
        let exact = PooledPattern::new("abc").unwrap();
        assert_eq!(centralized_guess_count("abc", &exact, 1).unwrap(), GuessOutcome::Found(1));
        let p = PooledPattern::new("rocky?u").unwrap();
        assert_eq!(centralized_guess_count("rockyou", &p, 100).unwrap(), GuessOutcome::Found(15));
        assert_eq!(centralized_guess_count("rockxou", &p, 100).unwrap(), GuessOutcome::Mismatch);
        assert_eq!(centralized_guess_count("rockyou", &p, 14).unwrap(), GuessOutcome::Exhausted);
    }

    #[test]
    fn centralized_enumeration_covers_all_completions() {
        let p = PooledPattern::new("a??b").unwrap();
        let mut hit = vec![false; 26 * 26];
        for x in b'a'..=b'z' {
            for y in b'a'..=b'z' {
                let s = format!("a{}{}b", x as char, y as char);
                let g = centralized_guess_count(&s, &p, u64::MAX).unwrap().guesses().unwrap();
                assert!(!hit[g as usize - 1]);
                hit[g as usize - 1] = true;
            }
        }
        assert!(hit.iter().all(|&h| h));
    }

    #[test]
    fn noiseless_curves_are_perfect_at_one_guess() {
        let corpus = PasswordCorpus::synthetic(50, 5, 7, 1).unwrap();
        let cfg = ToyConfig { flip_prob: 0.0, ..ToyConfig::default() };
        for curve in success_curve(&corpus, &cfg, &[1, 10]).unwrap() {
            assert_eq!(curve.points[0], (1, 1.0));
        }
    }

    #[test]
    fn curves_are_monotone_and_decentralized_beats_single() {
        let corpus = PasswordCorpus::synthetic(200, 6, 8, 3).unwrap();
        let cfg = ToyConfig { seed: 5, ..ToyConfig::default() };
        let outcomes = run_toy(&corpus, &cfg).unwrap();
        for o in &outcomes {
            if let (Some(d), Some(s)) = (o.decentralized, o.single) {
                assert!(d <= s);
            }
        }
        for curve in curves_from_outcomes(&outcomes, &default_budgets(1 << 40)) {
            assert!(curve.points.windows(2).all(|w| w[0].1 <= w[1].1));
        }
    }

    #[test]
    fn budget_grid() {
        assert_eq!(default_budgets(100), vec![1, 2, 5, 10, 20, 50, 100]);
        assert_eq!(default_budgets(1), vec![1]);
    }

    proptest! {
        #[test]
        fn pooled_letters_hold_a_majority(seed in 0u64..10_000, m in 1usize..6) {
            let sisters = gen_sisters("abcdef", m, 0.5, seed).unwrap();
            let pattern = pool_sisters(&sisters).unwrap();
            for (i, c) in pattern.as_str().bytes().enumerate() {
                if c != b'?' {
                    let votes = sisters.iter().filter(|s| s.as_bytes()[i] == c).count();
                    prop_assert!(votes >= (m + 1).div_ceil(2));
                    prop_assert!(2 * votes > m);
                }
            }
        }
    }
}
