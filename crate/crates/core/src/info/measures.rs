//! Shannon, Rényi and divergence measures. All internal arithmetic is base 2;
//! the `LogBase` argument only scales the returned value.

use super::types::{Channel, LogBase, Pmf};
use crate::error::{Error, Result};

/// Orders closer than this to 1 take the Shannon branch.
pub const RENYI_SHANNON_BAND: f64 = 1e-9;

pub(crate) fn entropy_bits(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

pub(crate) fn renyi_bits(probs: &[f64], alpha: f64) -> f64 {
    if (alpha - 1.0).abs() < RENYI_SHANNON_BAND {
        return entropy_bits(probs);
    }
    let s: f64 = probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p.powf(alpha))
        .sum();
    s.log2() / (1.0 - alpha)
}

/// `Σ p log(p/q)` with `0 log(0/q) = 0` and `p log(p/0) = +∞`.
pub(crate) fn kl_bits(p: &[f64], q: &[f64]) -> f64 {
    let mut total = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        if a > 0.0 {
            if b <= 0.0 {
                return f64::INFINITY;
            }
            total += a * (a / b).log2();
        }
    }
    total.max(0.0)
}

/// Binary entropy `H(p)` in bits.
pub fn binary_entropy(p: f64) -> f64 {
    entropy_bits(&[p, 1.0 - p])
}

/// Binary divergence `D(a‖b)` in bits, extended continuously at the endpoints.
pub fn binary_divergence(a: f64, b: f64) -> f64 {
    kl_bits(&[a, 1.0 - a], &[b, 1.0 - b])
}

/// Binary Rényi entropy `H_α(Bern(p))` in bits.
pub fn binary_renyi(p: f64, alpha: f64) -> f64 {
    renyi_bits(&[p, 1.0 - p], alpha)
}

pub fn entropy(p: &Pmf, base: LogBase) -> f64 {
    base.from_bits(entropy_bits(p.probs()))
}

pub fn renyi_entropy(p: &Pmf, alpha: f64, base: LogBase) -> Result<f64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::param("alpha", format!("{alpha} must be positive")));
    }
    Ok(base.from_bits(renyi_bits(p.probs(), alpha)))
}

pub fn kl_divergence(p: &Pmf, q: &Pmf, base: LogBase) -> Result<f64> {
    if p.alphabet() != q.alphabet() {
        return Err(Error::AlphabetMismatch(
            "divergence between pmfs on different alphabets".into(),
        ));
    }
    Ok(base.from_bits(kl_bits(p.probs(), q.probs())))
}

/// `H(Q|P) = −Σ_c P(c) Σ_t Q(t|c) log Q(t|c)` over conditional rows
/// `rows[c]`. Rows carrying zero weight are never read.
pub fn conditional_entropy(rows: &[Vec<f64>], weights: &Pmf, base: LogBase) -> Result<f64> {
    if rows.len() != weights.len() {
        return Err(Error::AlphabetMismatch(format!(
            "{} conditional rows for {} weights",
            rows.len(),
            weights.len()
        )));
    }
    let bits = rows
        .iter()
        .zip(weights.probs())
        .filter(|(_, &w)| w > 0.0)
        .map(|(row, &w)| w * entropy_bits(row))
        .sum();
    Ok(base.from_bits(bits))
}

/// `D(Q_{Y|X} ‖ P_{Y|X} | P_X)`; a diverging row only matters if it carries weight.
pub fn weighted_kl(q_yx: &Channel, p_yx: &Channel, p_x: &Pmf, base: LogBase) -> Result<f64> {
    if q_yx.input() != p_yx.input()
        || q_yx.output() != p_yx.output()
        || q_yx.input() != p_x.alphabet()
    {
        return Err(Error::AlphabetMismatch(
            "weighted divergence needs matching channel and weight alphabets".into(),
        ));
    }
    let mut total = 0.0;
    for (x, &w) in p_x.probs().iter().enumerate() {
        if w > 0.0 {
            let d = kl_bits(q_yx.row(x), p_yx.row(x));
            if d.is_infinite() {
                return Ok(f64::INFINITY);
            }
            total += w * d;
        }
    }
    Ok(base.from_bits(total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::types::Alphabet;

    fn bern(p: f64) -> Pmf {
        Pmf::bernoulli(p).unwrap()
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&bern(0.5), LogBase::Bits), 1.0);
        assert_eq!(entropy(&bern(0.0), LogBase::Bits), 0.0);
        // −0.11 log2 0.11 − 0.89 log2 0.89
        assert!((entropy(&bern(0.11), LogBase::Bits) - 0.499_915_958_164_528).abs() < 1e-12);
        assert!((entropy(&bern(0.5), LogBase::Nats) - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn renyi_examples() {
        let u = Pmf::uniform(Alphabet::indexed(5).unwrap());
        for alpha in [0.25, 0.5, 2.0, 7.0] {
            let h = renyi_entropy(&u, alpha, LogBase::Bits).unwrap();
            assert!((h - 5f64.log2()).abs() < 1e-12);
        }
        let expected = 2.0 * (0.11f64.sqrt() + 0.89f64.sqrt()).log2();
        let h = renyi_entropy(&bern(0.11), 0.5, LogBase::Bits).unwrap();
        assert!((h - expected).abs() < 1e-14);
        assert!((h - 0.7010).abs() < 1e-3);
        let near = renyi_entropy(&bern(0.3), 0.999_999, LogBase::Bits).unwrap();
        assert!((near - binary_entropy(0.3)).abs() < 1e-5);
        assert!(renyi_entropy(&bern(0.3), 0.0, LogBase::Bits).is_err());
        assert!(renyi_entropy(&bern(0.3), -1.0, LogBase::Bits).is_err());
    }

    #[test]
    fn kl_examples() {
        let p = bern(0.3);
        assert_eq!(kl_divergence(&p, &p, LogBase::Bits).unwrap(), 0.0);
        let d = kl_divergence(&bern(0.5), &bern(0.25), LogBase::Bits).unwrap();
        assert!((d - 0.207_518_749_639_422).abs() < 1e-12);
        let point = Pmf::point_mass(Alphabet::binary(), 0).unwrap();
        assert!(kl_divergence(&bern(0.5), &point, LogBase::Bits)
            .unwrap()
            .is_infinite());
        let other = Pmf::uniform(Alphabet::new(["a", "b"]).unwrap());
        assert!(kl_divergence(&bern(0.5), &other, LogBase::Bits).is_err());
    }

    #[test]
    fn conditional_entropy_examples() {
        let w = Pmf::uniform(Alphabet::binary());
        let det = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert_eq!(conditional_entropy(&det, &w, LogBase::Bits).unwrap(), 0.0);
        let uni = vec![vec![0.25; 4], vec![0.25; 4]];
        assert!((conditional_entropy(&uni, &w, LogBase::Bits).unwrap() - 2.0).abs() < 1e-15);
        let bsc_post = vec![vec![0.8, 0.2], vec![0.2, 0.8]];
        let h = conditional_entropy(&bsc_post, &w, LogBase::Bits).unwrap();
        assert!((h - binary_entropy(0.2)).abs() < 1e-15);
        assert!((h - 0.7219).abs() < 1e-4);
        assert!(conditional_entropy(&det, &Pmf::uniform(Alphabet::indexed(3).unwrap()), LogBase::Bits).is_err());
    }

    #[test]
    fn weighted_kl_examples() {
        let b = Alphabet::binary();
        let q = Channel::new(b.clone(), b.clone(), vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let p = Channel::new(b.clone(), b.clone(), vec![vec![0.75, 0.25], vec![0.25, 0.75]]).unwrap();
        let u = Pmf::uniform(b.clone());
        assert_eq!(weighted_kl(&q, &q, &u, LogBase::Bits).unwrap(), 0.0);
        let d = weighted_kl(&q, &p, &u, LogBase::Bits).unwrap();
        assert!((d - binary_divergence(0.5, 0.25)).abs() < 1e-15);

        let diverging = Channel::new(b.clone(), b.clone(), vec![vec![1.0, 0.0], vec![0.5, 0.5]]).unwrap();
        let target = Channel::new(b.clone(), b.clone(), vec![vec![0.0, 1.0], vec![0.5, 0.5]]).unwrap();
        let skip_x0 = Pmf::point_mass(b, 1).unwrap();
        assert_eq!(weighted_kl(&diverging, &target, &skip_x0, LogBase::Bits).unwrap(), 0.0);
        assert!(weighted_kl(&diverging, &target, &u, LogBase::Bits)
            .unwrap()
            .is_infinite());
    }
}
