//! Exponents for the binary erasure and binary symmetric channels with a
//! uniform binary source.

use super::{check_m, check_rho, check_unit, ExponentMethod, ExponentResult, Maximizer};
use crate::error::{Error, Result};
use crate::info::{binary_divergence, binary_renyi};
use crate::optimize::maximize_scalar;

/// Largest allowed gap between an analytic form and its scalar optimization.
pub const AGREEMENT_TOL: f64 = 1e-9;

/// `sup_{λ∈[0,1]} a·λ + b·(1−λ) − c·D(λ‖q)` by grid and golden section.
fn legendre_scalar(a: f64, b: f64, c: f64, q: f64) -> (f64, f64) {
    let r = maximize_scalar(|l| a * l + b * (1.0 - l) - c * binary_divergence(l, q), 0.0, 1.0);
    (r.argmax, r.value)
}

fn agree(what: &'static str, scalar: f64, analytic: f64) -> Result<()> {
    if (scalar - analytic).abs() > AGREEMENT_TOL {
        return Err(Error::RouteDisagreement {
            what,
            first: scalar,
            second: analytic,
            tolerance: AGREEMENT_TOL,
        });
    }
    Ok(())
}

/// Centralized BEC exponent `max_λ ρλ − D(λ‖ε^m)`; `λ` is the fraction of
/// positions erased at every agent.
pub fn bec_centralized_exponent(epsilon: f64, m: usize, rho: f64) -> Result<ExponentResult> {
    check_unit("epsilon", epsilon)?;
    check_m(m)?;
    check_rho(rho)?;
    let q = epsilon.powi(m as i32);
    let (lambda, scalar) = legendre_scalar(rho, 0.0, 1.0, q);
    let analytic = (1.0 - q + q * rho.exp2()).log2();
    agree("centralized BEC exponent", scalar, analytic)?;
    ExponentResult::new(
        scalar,
        rho,
        2,
        Maximizer {
            lambda: Some(lambda),
            ..Maximizer::default()
        },
        ExponentMethod::ScalarOptimize,
    )
}

/// Centralized BSC exponent for two agents. `λ` is the fraction of positions
/// where the two observations disagree (probability `2δ(1−δ)`); those positions
/// are uniform given the observations, the rest are flipped with probability
/// `δ̃ = δ² / (1 − 2δ(1−δ))`.
pub fn bsc_centralized_exponent_m2(delta: f64, rho: f64) -> Result<ExponentResult> {
    check_unit("delta", delta)?;
    check_rho(rho)?;
    let q = 2.0 * delta * (1.0 - delta);
    let delta_tilde = if q < 1.0 { delta * delta / (1.0 - q) } else { 0.5 };
    let h = binary_renyi(delta_tilde, 1.0 / (1.0 + rho));
    let (lambda, scalar) = legendre_scalar(rho, rho * h, 1.0, q);
    let analytic = (q * rho.exp2() + (1.0 - q) * (rho * h).exp2()).log2();
    agree("centralized BSC exponent", scalar, analytic)?;
    ExponentResult::new(
        scalar,
        rho,
        2,
        Maximizer {
            lambda: Some(lambda),
            ..Maximizer::default()
        },
        ExponentMethod::ScalarOptimize,
    )
}

/// Flip probability of a majority vote over `m` BSC(δ) observations, with
/// ties at even `m` settled by a fair coin.
pub fn majority_flip_probability(delta: f64, m: usize) -> Result<f64> {
    check_unit("delta", delta)?;
    check_m(m)?;
    let mut total = 0.0;
    let mut binom = 1.0f64;
    for k in 0..=m {
        if k > 0 {
            binom = binom * (m - k + 1) as f64 / k as f64;
        }
        let p = binom * delta.powi(k as i32) * (1.0 - delta).powi((m - k) as i32);
        if 2 * k > m {
            total += p;
        } else if 2 * k == m {
            total += 0.5 * p;
        }
    }
    Ok(total.clamp(0.0, 1.0))
}

/// Upper bound on the centralized BSC exponent: pool by majority vote and
/// guess against the resulting BSC(δ_m).
pub fn majority_collapse_bound(delta: f64, m: usize, rho: f64) -> Result<ExponentResult> {
    check_rho(rho)?;
    let dm = majority_flip_probability(delta, m)?;
    let bits = rho * binary_renyi(dm, 1.0 / (1.0 + rho));
    ExponentResult::new(bits, rho, 2, Maximizer::default(), ExponentMethod::ClosedForm)
}

/// Decentralized BEC exponent `sup_λ ρλ − m D(λ‖ε)`.
pub fn bec_decentralized_exponent(epsilon: f64, m: usize, rho: f64) -> Result<ExponentResult> {
    check_unit("epsilon", epsilon)?;
    check_m(m)?;
    check_rho(rho)?;
    let (lambda, scalar) = legendre_scalar(rho, 0.0, m as f64, epsilon);
    let analytic = m as f64 * (1.0 - epsilon + epsilon * (rho / m as f64).exp2()).log2();
    agree("decentralized BEC exponent", scalar, analytic)?;
    ExponentResult::new(
        scalar,
        rho,
        2,
        Maximizer {
            lambda: Some(lambda),
            ..Maximizer::default()
        },
        ExponentMethod::ScalarOptimize,
    )
}

/// Decentralized BSC exponent `ρ H_{m/(ρ+m)}(δ)`.
pub fn bsc_decentralized_exponent(delta: f64, m: usize, rho: f64) -> Result<ExponentResult> {
    check_unit("delta", delta)?;
    check_m(m)?;
    check_rho(rho)?;
    let bits = rho * binary_renyi(delta, m as f64 / (rho + m as f64));
    ExponentResult::new(bits, rho, 2, Maximizer::default(), ExponentMethod::ClosedForm)
}

/// Exponent of a source made of a uniform binary block of relative length `λ`
/// followed by an i.i.d. Bern(p) block: `λρ + (1−λ)ρ H_{1/(1+ρ)}(p)`.
pub fn concatenation_exponent(lambda: f64, p: f64, rho: f64) -> Result<f64> {
    check_unit("lambda", lambda)?;
    check_unit("p", p)?;
    check_rho(rho)?;
    Ok(lambda * rho + (1.0 - lambda) * rho * binary_renyi(p, 1.0 / (1.0 + rho)))
}
