//! Seeded Monte Carlo estimates of guesswork moments, plus exact finite
//! checks of the soft-elimination and concatenation constructions.
//!
//! Trial `t` draws its secret from the ChaCha8 stream `(master_seed, t)` at
//! word offset 0 and agent `i`'s observation from the same stream at offset
//! `(i + 1) << 40`. Agent `i`'s noise is therefore identical across runs that
//! differ only in `m` or in strategy, and results do not depend on how trials
//! are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::info::{product_channel, tuple_index, Channel, Pmf};
use crate::numeric::Log2Sum;
use crate::oracle::{optimal_order, MomentReport, OracleConfig};
use crate::rank::{ExactRank, RankEngine};

/// Word offset between consecutive agents' sub-streams.
const AGENT_STRIDE: u128 = 1 << 40;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrialRecord {
    pub trial_index: u64,
    pub agent_ranks: Vec<ExactRank>,
    pub min_rank: ExactRank,
    pub pooled_rank: Option<ExactRank>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationSummary {
    pub n: usize,
    pub m: usize,
    pub rho: f64,
    pub trials: u64,
    pub master_seed: u64,
    pub centralized: bool,
    /// `log2` of the empirical mean of `rank^ρ`.
    pub log2_mean: f64,
    /// Empirical mean of `rank^ρ`; `inf` if it overflows a double.
    pub mean: f64,
    /// Standard error of `mean`.
    pub std_error: f64,
    pub per_symbol_exponent: f64,
    /// `(1/n)(se/mean)/ln 2`.
    pub exponent_std_error: f64,
}

impl SimulationSummary {
    fn from_log_terms(
        n: usize,
        m: usize,
        rho: f64,
        master_seed: u64,
        centralized: bool,
        terms: &[f64],
    ) -> Self {
        let trials = terms.len() as u64;
        let mut first = Log2Sum::new();
        let mut second = Log2Sum::new();
        for &t in terms {
            first.add_log2(t);
            second.add_log2(2.0 * t);
        }
        let log_t = (trials as f64).log2();
        let log2_mean = first.log2() - log_t;
        // Relative variance, computed around the mean so nothing overflows.
        let ratio = (second.log2() - log_t - 2.0 * log2_mean).exp2();
        let rel_var = if trials > 1 {
            ((ratio - 1.0) * trials as f64 / (trials as f64 - 1.0)).max(0.0)
        } else {
            0.0
        };
        let rel_se = (rel_var / trials as f64).sqrt();
        SimulationSummary {
            n,
            m,
            rho,
            trials,
            master_seed,
            centralized,
            log2_mean,
            mean: log2_mean.exp2(),
            std_error: log2_mean.exp2() * rel_se,
            per_symbol_exponent: log2_mean / n as f64,
            exponent_std_error: rel_se / n as f64 / std::f64::consts::LN_2,
        }
    }
}

fn stream(master_seed: u64, trial: u64, slot: u128) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng.set_word_pos(slot * AGENT_STRIDE);
    rng
}

fn draw(rng: &mut ChaCha8Rng, cumulative: &[f64]) -> usize {
    let u: f64 = rng.random();
    cumulative
        .iter()
        .position(|&c| u < c)
        .unwrap_or_else(|| {
            // Rounding in the cumulative sum: fall back to the last positive cell.
            cumulative.len() - 1
        })
}

fn cumulative(probs: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out: Vec<f64> = probs
        .iter()
        .map(|&p| {
            acc += p;
            acc
        })
        .collect();
    // Zero-probability tail cells must never be drawn.
    if let Some(last) = probs.iter().rposition(|&p| p > 0.0) {
        for c in out.iter_mut().skip(last) {
            *c = f64::INFINITY;
        }
    }
    out
}

/// Draws for one trial: secret and each agent's observation.
struct Sampler {
    px: Vec<f64>,
    rows: Vec<Vec<f64>>,
}

impl Sampler {
    fn new(p_x: &Pmf, w: &Channel) -> Self {
        Sampler {
            px: cumulative(p_x.probs()),
            rows: w.rows().iter().map(|r| cumulative(r)).collect(),
        }
    }

    fn secret(&self, master_seed: u64, trial: u64, n: usize) -> Vec<usize> {
        let mut rng = stream(master_seed, trial, 0);
        (0..n).map(|_| draw(&mut rng, &self.px)).collect()
    }

    fn observation(&self, master_seed: u64, trial: u64, agent: usize, x: &[usize]) -> Vec<usize> {
        let mut rng = stream(master_seed, trial, agent as u128 + 1);
        x.iter().map(|&a| draw(&mut rng, &self.rows[a])).collect()
    }
}

fn check_sim(n: usize, m: usize, rho: f64, trials: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::param("n", "must be at least 1"));
    }
    if m == 0 {
        return Err(Error::param("m", "must be at least 1"));
    }
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::param("rho", format!("{rho} must be positive")));
    }
    if trials == 0 {
        return Err(Error::param("trials", "must be at least 1"));
    }
    Ok(())
}

/// Ranks for one trial under both strategies (pooled only when `pooled` is given).
pub fn trial_record(
    p_x: &Pmf,
    w: &Channel,
    n: usize,
    m: usize,
    master_seed: u64,
    trial: u64,
    pooled: Option<&Channel>,
) -> Result<TrialRecord> {
    let sampler = Sampler::new(p_x, w);
    let engine = RankEngine::new(p_x, w, n)?;
    let x = sampler.secret(master_seed, trial, n);
    let ys: Vec<Vec<usize>> = (0..m).map(|i| sampler.observation(master_seed, trial, i, &x)).collect();
    let agent_ranks = ys
        .iter()
        .map(|y| engine.rank(&x, y))
        .collect::<Result<Vec<_>>>()?;
    let min_rank = agent_ranks.iter().min().cloned().expect("m >= 1");
    let pooled_rank = match pooled {
        Some(channel) => {
            let y = pool(&ys, w.output().len());
            Some(RankEngine::new(p_x, channel, n)?.rank(&x, &y)?)
        }
        None => None,
    };
    Ok(TrialRecord {
        trial_index: trial,
        agent_ranks,
        min_rank,
        pooled_rank,
    })
}

/// Per-position tuple index of the agents' observations.
fn pool(ys: &[Vec<usize>], ny: usize) -> Vec<usize> {
    let n = ys[0].len();
    (0..n)
        .map(|i| {
            let digits: Vec<usize> = ys.iter().map(|y| y[i]).collect();
            tuple_index(&digits, ny)
        })
        .collect()
}

/// Monte Carlo estimate of `E[min_i G*(X|Y_i)^ρ]`.
pub fn simulate_decentralized(
    p_x: &Pmf,
    w: &Channel,
    n: usize,
    m: usize,
    rho: f64,
    trials: u64,
    master_seed: u64,
) -> Result<SimulationSummary> {
    check_sim(n, m, rho, trials)?;
    let sampler = Sampler::new(p_x, w);
    let engine = RankEngine::new(p_x, w, n)?;
    let terms: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<f64> {
            let x = sampler.secret(master_seed, t, n);
            let mut best = f64::INFINITY;
            for i in 0..m {
                let y = sampler.observation(master_seed, t, i, &x);
                best = best.min(engine.rank_log2(&x, &y)?);
            }
            Ok(rho * best)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SimulationSummary::from_log_terms(n, m, rho, master_seed, false, &terms))
}

/// Monte Carlo estimate of the pooled moment `E[G*(X|Y_1..Y_m)^ρ]`.
pub fn simulate_centralized(
    p_x: &Pmf,
    w: &Channel,
    n: usize,
    m: usize,
    rho: f64,
    trials: u64,
    master_seed: u64,
) -> Result<SimulationSummary> {
    check_sim(n, m, rho, trials)?;
    let sampler = Sampler::new(p_x, w);
    let pooled = product_channel(w, m)?;
    let engine = RankEngine::new(p_x, &pooled, n)?;
    let ny = w.output().len();
    let terms: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<f64> {
            let x = sampler.secret(master_seed, t, n);
            let ys: Vec<Vec<usize>> = (0..m).map(|i| sampler.observation(master_seed, t, i, &x)).collect();
            Ok(rho * engine.rank_log2(&x, &pool(&ys, ny))?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SimulationSummary::from_log_terms(n, m, rho, master_seed, true, &terms))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of `log2 moment` about the fitted line.
    pub rms_residual: f64,
    pub max_residual: f64,
}

/// Least-squares fit of `log2 moment = slope · n + intercept`.
pub fn exponent_fit(points: &[(usize, f64)]) -> Result<ExponentFit> {
    if points.len() < 3 {
        return Err(Error::param("points", "an exponent fit needs at least three lengths"));
    }
    let k = points.len() as f64;
    let mean_n = points.iter().map(|p| p.0 as f64).sum::<f64>() / k;
    let mean_v = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 as f64 - mean_n).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::param("points", "lengths must not all be equal"));
    }
    let sxy: f64 = points
        .iter()
        .map(|p| (p.0 as f64 - mean_n) * (p.1 - mean_v))
        .sum();
    let slope = sxy / sxx;
    let intercept = mean_v - slope * mean_n;
    let residuals: Vec<f64> = points
        .iter()
        .map(|p| p.1 - (slope * p.0 as f64 + intercept))
        .collect();
    Ok(ExponentFit {
        slope,
        intercept,
        rms_residual: (residuals.iter().map(|r| r * r).sum::<f64>() / k).sqrt(),
        max_residual: residuals.iter().fold(0.0, |a, r| a.max(r.abs())),
    })
}

/// Fit over simulation summaries, using their `log2_mean`.
pub fn exponent_fit_summaries(summaries: &[SimulationSummary]) -> Result<ExponentFit> {
    let points: Vec<(usize, f64)> = summaries.iter().map(|s| (s.n, s.log2_mean)).collect();
    exponent_fit(&points)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SoftEliminationCheck {
    pub n: usize,
    pub k: usize,
    pub rho: f64,
    pub moment_u_n: f64,
    pub moment_v: f64,
    pub moment_u_n_minus_1: f64,
    /// `E[G(U_N)^ρ] > E[G(V)^ρ] ≥ E[G(U_{N−1})^ρ]`.
    pub inequalities_hold: bool,
}

fn uniform_moment(size: usize, rho: f64) -> f64 {
    (1..=size).map(|i| (i as f64).powf(rho)).sum::<f64>() / size as f64
}

/// Soft elimination of the uniform distribution on `N` points: the last
/// point's mass `1/N` is removed and the last `K` points (indices
/// `N−K+1..N`) each carry `(K−1)/(K(N−1))`, the rest `1/(N−1)`.
pub fn soft_elimination_probs(n: usize, k: usize) -> Result<Vec<f64>> {
    if n < 2 || k < 2 || k > n {
        return Err(Error::param("K", format!("need 2 <= K <= N, got N = {n}, K = {k}")));
    }
    let head = 1.0 / (n - 1) as f64;
    let tail = (k - 1) as f64 / (k as f64 * (n - 1) as f64);
    let probs: Vec<f64> = (1..=n).map(|i| if i > n - k { tail } else { head }).collect();
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidDistribution(format!(
            "soft elimination masses sum to {total}"
        )));
    }
    Ok(probs)
}

pub fn soft_elimination_check(n: usize, k: usize, rho: f64) -> Result<SoftEliminationCheck> {
    if !(rho > 0.0) {
        return Err(Error::param("rho", format!("{rho} must be positive")));
    }
    let mut probs = soft_elimination_probs(n, k)?;
    probs.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    let moment_v: f64 = probs
        .iter()
        .enumerate()
        .map(|(i, p)| p * ((i + 1) as f64).powf(rho))
        .sum();
    let moment_u_n = uniform_moment(n, rho);
    let moment_u_n_minus_1 = uniform_moment(n - 1, rho);
    Ok(SoftEliminationCheck {
        n,
        k,
        rho,
        moment_u_n,
        moment_v,
        moment_u_n_minus_1,
        inequalities_hold: moment_u_n > moment_v && moment_v >= moment_u_n_minus_1,
    })
}

/// Exact moment of a uniform binary block of length `round(λn)` followed by
/// an i.i.d. Bern(p) block, guessed by listing the Bern(p) block in optimal
/// order and, for each of its entries, every completion of the uniform block.
pub fn concatenation_moment_exact(
    lambda: f64,
    p: f64,
    n: usize,
    rho: f64,
    config: &OracleConfig,
) -> Result<MomentReport> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::param("lambda", format!("{lambda} is outside [0, 1]")));
    }
    if !(rho > 0.0) {
        return Err(Error::param("rho", format!("{rho} must be positive")));
    }
    if n == 0 {
        return Err(Error::param("n", "must be at least 1"));
    }
    let uniform_len = (lambda * n as f64).round() as usize;
    let rest = n - uniform_len;
    if (n as f64) > 63.0 || 2f64.powi(n as i32) > config.cap as f64 {
        return Err(Error::CapExceeded {
            what: "concatenated source enumeration",
            required: 2f64.powi(n as i32),
            cap: config.cap,
        });
    }
    let block = 1u64 << uniform_len;
    let (ranks_probs, v_count): (Vec<f64>, usize) = if rest == 0 {
        (vec![1.0], 1)
    } else {
        let order = optimal_order(&Pmf::bernoulli(p)?, rest, config)?;
        (order.probs().to_vec(), order.len())
    };
    let mut total = Log2Sum::new();
    let uniform_log = -(uniform_len as f64);
    for (v_rank, &pv) in ranks_probs.iter().enumerate().take(v_count) {
        if pv <= 0.0 {
            continue;
        }
        let base = v_rank as u64 * block;
        let mut inner = Log2Sum::new();
        for j in 1..=block {
            inner.add_log2(rho * ((base + j) as f64).log2());
        }
        total.add_log2(pv.log2() + uniform_log + inner.log2());
    }
    Ok(MomentReport::from_log2(n, rho, total.log2()))
}
