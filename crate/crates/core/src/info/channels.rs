use std::path::Path;

use serde::{Deserialize, Serialize};

use super::types::{Alphabet, Channel, JointDistribution, Pmf};
use crate::error::{Error, Result};

/// Default cap on `|Y|^m` for product channels.
pub const DEFAULT_PRODUCT_CAP: u64 = 1_000_000;

/// Erasure symbol of the binary erasure channel.
pub const ERASURE: &str = "?";

fn unit_interval(name: &'static str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::param(name, format!("{v} is outside [0, 1]")))
    }
}

/// BEC(ε): outputs `0, 1, ?`.
pub fn bec(epsilon: f64) -> Result<Channel> {
    unit_interval("epsilon", epsilon)?;
    Channel::new(
        Alphabet::binary(),
        Alphabet::new(["0", "1", ERASURE])?,
        vec![
            vec![1.0 - epsilon, 0.0, epsilon],
            vec![0.0, 1.0 - epsilon, epsilon],
        ],
    )
}

/// BSC(δ): flips the input bit with probability δ.
pub fn bsc(delta: f64) -> Result<Channel> {
    unit_interval("delta", delta)?;
    Channel::new(
        Alphabet::binary(),
        Alphabet::binary(),
        vec![vec![1.0 - delta, delta], vec![delta, 1.0 - delta]],
    )
}

/// `m` conditionally independent uses of `w`, viewed as one channel
/// `X → Y^m`. Output tuples are enumerated lexicographically, first
/// coordinate most significant.
pub fn product_channel(w: &Channel, m: usize) -> Result<Channel> {
    product_channel_capped(w, m, DEFAULT_PRODUCT_CAP)
}

pub fn product_channel_capped(w: &Channel, m: usize, cap: u64) -> Result<Channel> {
    if m == 0 {
        return Err(Error::param("m", "must be at least 1"));
    }
    if m == 1 {
        return Ok(w.clone());
    }
    let ny = w.output().len();
    let outputs = (ny as f64).powi(m as i32);
    if outputs > cap as f64 {
        return Err(Error::CapExceeded {
            what: "product channel output alphabet",
            required: outputs,
            cap,
        });
    }
    let outputs = outputs as usize;
    let labels: Vec<String> = (0..outputs)
        .map(|idx| {
            let digits = tuple_digits(idx, ny, m);
            let parts: Vec<&str> = digits.iter().map(|&d| w.output().symbol(d)).collect();
            format!("({})", parts.join(","))
        })
        .collect();
    let rows = (0..w.input().len())
        .map(|x| {
            (0..outputs)
                .map(|idx| {
                    tuple_digits(idx, ny, m)
                        .iter()
                        .map(|&d| w.prob(x, d))
                        .product()
                })
                .collect()
        })
        .collect();
    Channel::new(w.input().clone(), Alphabet::new(labels)?, rows)
}

/// Digits of `index` in base `radix`, most significant first, padded to `len`.
pub fn tuple_digits(mut index: usize, radix: usize, len: usize) -> Vec<usize> {
    let mut digits = vec![0; len];
    for slot in digits.iter_mut().rev() {
        *slot = index % radix;
        index /= radix;
    }
    digits
}

/// Inverse of [`tuple_digits`].
pub fn tuple_index(digits: &[usize], radix: usize) -> usize {
    digits.iter().fold(0, |acc, &d| acc * radix + d)
}

/// `P(y) = Σ_x P_X(x) w(y|x)`.
pub fn output_marginal(p_x: &Pmf, w: &Channel) -> Result<Pmf> {
    Ok(JointDistribution::from_channel(p_x, w)?.y_marginal_pmf())
}

/// `P_{X|Y}(·|y)` by Bayes' rule.
pub fn posterior(p_x: &Pmf, w: &Channel, y: usize) -> Result<Pmf> {
    if p_x.alphabet() != w.input() {
        return Err(Error::AlphabetMismatch(
            "prior and channel input alphabets differ".into(),
        ));
    }
    if y >= w.output().len() {
        return Err(Error::param("y", "outside the output alphabet"));
    }
    let joint: Vec<f64> = (0..p_x.len()).map(|x| p_x.prob(x) * w.prob(x, y)).collect();
    let p_y: f64 = joint.iter().sum();
    if p_y <= 0.0 {
        return Err(Error::ZeroProbability(format!(
            "output `{}` has zero marginal probability",
            w.output().symbol(y)
        )));
    }
    let probs: Vec<f64> = joint.iter().map(|j| j / p_y).collect();
    // Bayes output sums to 1 up to rounding; that rounding is not a caller error.
    let total: f64 = probs.iter().sum();
    let probs = if (total - 1.0).abs() > super::types::PROB_TOL {
        probs.iter().map(|p| p / total).collect()
    } else {
        probs
    };
    Pmf::new(p_x.alphabet().clone(), probs)
}

/// JSON document describing a prior and a channel:
/// `{"px": [...], "alphabet_x": [...], "alphabet_y": [...], "w": [[...], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelModel {
    pub px: Vec<f64>,
    pub alphabet_x: Vec<String>,
    pub alphabet_y: Vec<String>,
    pub w: Vec<Vec<f64>>,
}

impl ChannelModel {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn build(&self) -> Result<(Pmf, Channel)> {
        let ax = Alphabet::new(self.alphabet_x.iter().cloned())?;
        let ay = Alphabet::new(self.alphabet_y.iter().cloned())?;
        let px = Pmf::new(ax.clone(), self.px.clone())?;
        let w = Channel::new(ax, ay, self.w.clone())?;
        Ok((px, w))
    }

    pub fn from_parts(p_x: &Pmf, w: &Channel) -> Self {
        ChannelModel {
            px: p_x.probs().to_vec(),
            alphabet_x: p_x.alphabet().symbols().to_vec(),
            alphabet_y: w.output().symbols().to_vec(),
            w: w.rows().to_vec(),
        }
    }
}
