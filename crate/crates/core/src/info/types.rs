use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Simplex tolerance shared by every distribution check.
pub const PROB_TOL: f64 = 1e-12;

/// Ordered set of distinct symbol labels. The order is the canonical
/// lexicographic order used for tie-breaking everywhere.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Self> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::InvalidDistribution("alphabet is empty".into()));
        }
        for (i, s) in symbols.iter().enumerate() {
            if symbols[..i].contains(s) {
                return Err(Error::InvalidDistribution(format!(
                    "duplicate alphabet symbol `{s}`"
                )));
            }
        }
        Ok(Alphabet { symbols })
    }

    pub fn binary() -> Self {
        Alphabet {
            symbols: vec!["0".into(), "1".into()],
        }
    }

    /// Symbols `0..size` labelled by their index.
    pub fn indexed(size: usize) -> Result<Self> {
        Alphabet::new((0..size).map(|i| i.to_string()))
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn symbol(&self, index: usize) -> &str {
        &self.symbols[index]
    }

    pub fn index_of(&self, symbol: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == symbol)
    }

    /// Parse a sequence of symbols. Single-character alphabets accept a bare
    /// string ("0?1"); otherwise symbols are comma separated.
    pub fn parse_sequence(&self, text: &str) -> Result<Vec<usize>> {
        let single_char = self.symbols.iter().all(|s| s.chars().count() == 1);
        let tokens: Vec<String> = if single_char && !text.contains(',') {
            text.chars().map(|c| c.to_string()).collect()
        } else {
            text.split(',').map(|t| t.trim().to_string()).collect()
        };
        tokens
            .iter()
            .map(|t| {
                self.index_of(t)
                    .ok_or_else(|| Error::Parse(format!("unknown symbol `{t}`")))
            })
            .collect()
    }

    pub fn format_sequence(&self, seq: &[usize]) -> String {
        let single_char = self.symbols.iter().all(|s| s.chars().count() == 1);
        let parts: Vec<&str> = seq.iter().map(|&i| self.symbol(i)).collect();
        if single_char {
            parts.concat()
        } else {
            parts.join(",")
        }
    }
}

/// Logarithm base for reported measures. Everything is computed in bits; nats
/// apply a single `ln 2` factor to final values.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    #[default]
    Bits,
    Nats,
}

impl LogBase {
    pub fn from_bits(self, bits: f64) -> f64 {
        match self {
            LogBase::Bits => bits,
            LogBase::Nats => bits * std::f64::consts::LN_2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LogBase::Bits => "bits",
            LogBase::Nats => "nats",
        }
    }
}

fn check_simplex(probs: &[f64], what: &str) -> Result<()> {
    let mut total = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        if !p.is_finite() || p < 0.0 {
            return Err(Error::InvalidDistribution(format!(
                "{what}: entry {i} is {p}, expected a finite nonnegative value"
            )));
        }
        total += p;
    }
    if (total - 1.0).abs() > PROB_TOL {
        return Err(Error::InvalidDistribution(format!(
            "{what}: entries sum to {total}, expected 1"
        )));
    }
    Ok(())
}

/// Probability mass function over a finite alphabet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pmf {
    alphabet: Alphabet,
    probs: Vec<f64>,
}

impl Pmf {
    /// Validates; never renormalizes.
    pub fn new(alphabet: Alphabet, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != alphabet.len() {
            return Err(Error::AlphabetMismatch(format!(
                "{} probabilities for an alphabet of {} symbols",
                probs.len(),
                alphabet.len()
            )));
        }
        check_simplex(&probs, "pmf")?;
        Ok(Pmf { alphabet, probs })
    }

    pub fn uniform(alphabet: Alphabet) -> Self {
        let k = alphabet.len();
        Pmf {
            alphabet,
            probs: vec![1.0 / k as f64; k],
        }
    }

    /// Bern(p) on {0, 1}, so that P(1) = p.
    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::param("p", format!("{p} is outside [0, 1]")));
        }
        Pmf::new(Alphabet::binary(), vec![1.0 - p, p])
    }

    pub fn point_mass(alphabet: Alphabet, index: usize) -> Result<Self> {
        if index >= alphabet.len() {
            return Err(Error::param("index", "outside the alphabet"));
        }
        let mut probs = vec![0.0; alphabet.len()];
        probs[index] = 1.0;
        Ok(Pmf { alphabet, probs })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, index: usize) -> f64 {
        self.probs[index]
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// Row-stochastic transition matrix `w(y|x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    input: Alphabet,
    output: Alphabet,
    rows: Vec<Vec<f64>>,
}

impl Channel {
    pub fn new(input: Alphabet, output: Alphabet, rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.len() != input.len() {
            return Err(Error::AlphabetMismatch(format!(
                "{} rows for an input alphabet of {} symbols",
                rows.len(),
                input.len()
            )));
        }
        for (x, row) in rows.iter().enumerate() {
            if row.len() != output.len() {
                return Err(Error::AlphabetMismatch(format!(
                    "row {x} has {} entries for an output alphabet of {} symbols",
                    row.len(),
                    output.len()
                )));
            }
            check_simplex(row, &format!("channel row {x}"))?;
        }
        Ok(Channel {
            input,
            output,
            rows,
        })
    }

    /// Identity channel: the output reveals the input.
    pub fn noiseless(alphabet: Alphabet) -> Self {
        let k = alphabet.len();
        let rows = (0..k)
            .map(|x| (0..k).map(|y| if x == y { 1.0 } else { 0.0 }).collect())
            .collect();
        Channel {
            input: alphabet.clone(),
            output: alphabet,
            rows,
        }
    }

    /// Single-output channel: no side information at all.
    pub fn useless(input: Alphabet) -> Self {
        let rows = vec![vec![1.0]; input.len()];
        Channel {
            input,
            output: Alphabet {
                symbols: vec!["-".into()],
            },
            rows,
        }
    }

    pub fn input(&self) -> &Alphabet {
        &self.input
    }

    pub fn output(&self) -> &Alphabet {
        &self.output
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.rows[x]
    }

    pub fn prob(&self, x: usize, y: usize) -> f64 {
        self.rows[x][y]
    }

    pub fn row_pmf(&self, x: usize) -> Pmf {
        Pmf {
            alphabet: self.output.clone(),
            probs: self.rows[x].clone(),
        }
    }
}

/// Joint distribution on `X × Y`, stored as a `|X| × |Y|` matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    x: Alphabet,
    y: Alphabet,
    matrix: Vec<Vec<f64>>,
}

impl JointDistribution {
    pub fn new(x: Alphabet, y: Alphabet, matrix: Vec<Vec<f64>>) -> Result<Self> {
        if matrix.len() != x.len() || matrix.iter().any(|r| r.len() != y.len()) {
            return Err(Error::AlphabetMismatch(format!(
                "joint matrix is not {}x{}",
                x.len(),
                y.len()
            )));
        }
        let flat: Vec<f64> = matrix.iter().flatten().copied().collect();
        check_simplex(&flat, "joint distribution")?;
        Ok(JointDistribution { x, y, matrix })
    }

    /// `P_X(x) w(y|x)`.
    pub fn from_channel(p_x: &Pmf, w: &Channel) -> Result<Self> {
        if p_x.alphabet() != w.input() {
            return Err(Error::AlphabetMismatch(
                "prior and channel input alphabets differ".into(),
            ));
        }
        let matrix = (0..p_x.len())
            .map(|x| w.row(x).iter().map(|&wy| p_x.prob(x) * wy).collect())
            .collect();
        Ok(JointDistribution {
            x: p_x.alphabet().clone(),
            y: w.output().clone(),
            matrix,
        })
    }

    pub fn x_alphabet(&self) -> &Alphabet {
        &self.x
    }

    pub fn y_alphabet(&self) -> &Alphabet {
        &self.y
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.matrix
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.matrix[x][y]
    }

    pub fn x_marginal(&self) -> Vec<f64> {
        self.matrix.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn y_marginal(&self) -> Vec<f64> {
        (0..self.y.len())
            .map(|y| self.matrix.iter().map(|r| r[y]).sum())
            .collect()
    }

    pub fn x_marginal_pmf(&self) -> Pmf {
        Pmf {
            alphabet: self.x.clone(),
            probs: self.x_marginal(),
        }
    }

    pub fn y_marginal_pmf(&self) -> Pmf {
        Pmf {
            alphabet: self.y.clone(),
            probs: self.y_marginal(),
        }
    }

    /// Rows `Q(y|x)`; `None` where the X-marginal vanishes.
    pub fn y_given_x(&self) -> Vec<Option<Vec<f64>>> {
        self.matrix
            .iter()
            .map(|row| {
                let total: f64 = row.iter().sum();
                (total > 0.0).then(|| row.iter().map(|v| v / total).collect())
            })
            .collect()
    }

    /// Rows `Q(x|y)` indexed by `y`; `None` where the Y-marginal vanishes.
    pub fn x_given_y(&self) -> Vec<Option<Vec<f64>>> {
        let p_y = self.y_marginal();
        (0..self.y.len())
            .map(|y| {
                (p_y[y] > 0.0).then(|| self.matrix.iter().map(|r| r[y] / p_y[y]).collect())
            })
            .collect()
    }
}
