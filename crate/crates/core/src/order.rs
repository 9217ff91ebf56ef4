//! The canonical guessing order: by posterior probability descending, ties
//! broken by ascending lexicographic order of the sequence.
//!
//! For i.i.d. sequences the probability of `x` given `y` is a function of the
//! joint type of `(x, y)`, namely `Π J(a,b)^{n(a,b)}` with
//! `J(a,b) = P_X(a) w(b|a)`. Comparisons use that product in floating-point
//! log domain when the gap is unambiguous and fall back to exact dyadic
//! arithmetic otherwise, so ties are detected exactly.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::info::{Channel, Pmf};
use crate::numeric::Dyadic;

/// Log-domain gaps at or below this (relative) size are settled exactly.
const EXACT_FALLBACK_GAP: f64 = 1e-9;

/// Per-letter joint weights `J(a,b)` in log and exact form.
#[derive(Debug, Clone)]
pub struct PairWeights {
    nx: usize,
    ny: usize,
    log2: Vec<f64>,
    exact: Vec<Dyadic>,
    linear: Vec<f64>,
}

impl PairWeights {
    pub fn new(p_x: &Pmf, w: &Channel) -> Result<Self> {
        if p_x.alphabet() != w.input() {
            return Err(Error::AlphabetMismatch(
                "prior and channel input alphabets differ".into(),
            ));
        }
        let nx = p_x.len();
        let ny = w.output().len();
        let mut log2 = Vec::with_capacity(nx * ny);
        let mut exact = Vec::with_capacity(nx * ny);
        let mut linear = Vec::with_capacity(nx * ny);
        for a in 0..nx {
            for b in 0..ny {
                let (pa, wb) = (p_x.prob(a), w.prob(a, b));
                linear.push(pa * wb);
                exact.push(Dyadic::from_f64(pa).mul(&Dyadic::from_f64(wb)));
                log2.push(if pa > 0.0 && wb > 0.0 {
                    pa.log2() + wb.log2()
                } else {
                    f64::NEG_INFINITY
                });
            }
        }
        Ok(PairWeights {
            nx,
            ny,
            log2,
            exact,
            linear,
        })
    }

    /// Weights for guessing without side information (one dummy output).
    pub fn without_side_info(p_x: &Pmf) -> Self {
        Self::new(p_x, &Channel::useless(p_x.alphabet().clone())).expect("alphabets match")
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    #[inline]
    pub fn cell(&self, a: usize, b: usize) -> usize {
        a * self.ny + b
    }

    #[inline]
    pub fn log2(&self, a: usize, b: usize) -> f64 {
        self.log2[self.cell(a, b)]
    }

    #[inline]
    pub fn linear(&self, a: usize, b: usize) -> f64 {
        self.linear[self.cell(a, b)]
    }

    pub fn is_zero(&self, a: usize, b: usize) -> bool {
        self.log2(a, b) == f64::NEG_INFINITY
    }

    /// `log2 Π J^counts` over flattened pair counts.
    pub fn type_log2(&self, counts: &[u32]) -> f64 {
        let mut total = 0.0;
        for (c, &n) in counts.iter().enumerate() {
            if n > 0 {
                let l = self.log2[c];
                if l == f64::NEG_INFINITY {
                    return f64::NEG_INFINITY;
                }
                total += n as f64 * l;
            }
        }
        total
    }

    pub fn type_exact(&self, counts: &[u32]) -> Dyadic {
        let mut acc = Dyadic::one();
        for (c, &n) in counts.iter().enumerate() {
            if n > 0 {
                acc = acc.mul(&self.exact[c].pow(n));
                if acc.is_zero() {
                    break;
                }
            }
        }
        acc
    }

    /// Exact comparison of the weights of two joint types, with their
    /// precomputed log weights.
    pub fn compare_types(&self, a: &[u32], log_a: f64, b: &[u32], log_b: f64) -> Ordering {
        if a == b {
            return Ordering::Equal;
        }
        match (log_a == f64::NEG_INFINITY, log_b == f64::NEG_INFINITY) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        let gap = log_a - log_b;
        if gap.abs() > EXACT_FALLBACK_GAP * (1.0 + log_a.abs().max(log_b.abs())) {
            return if gap > 0.0 {
                Ordering::Greater
            } else {
                Ordering::Less
            };
        }
        self.type_exact(a).cmp(&self.type_exact(b))
    }
}

/// Lexicographic index of a sequence over an alphabet of size `k`
/// (first symbol most significant).
pub fn sequence_index(seq: &[usize], k: usize) -> u64 {
    seq.iter().fold(0u64, |acc, &s| acc * k as u64 + s as u64)
}

/// Inverse of [`sequence_index`].
pub fn sequence_from_index(mut index: u64, k: usize, n: usize) -> Vec<usize> {
    let mut seq = vec![0; n];
    for slot in seq.iter_mut().rev() {
        *slot = (index % k as u64) as usize;
        index /= k as u64;
    }
    seq
}

/// `k^n` as a float, for cap checks that must not overflow.
pub fn count_sequences(k: usize, n: usize) -> f64 {
    (k as f64).powi(n as i32)
}
