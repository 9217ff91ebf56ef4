//! Decentralized exponent for a general discrete memoryless channel.
//!
//! A secret of joint type `Q̂` (with an agent's observation) sits at list
//! position about `2^{n A(Q̂)}`, where `A(Q̂)` is the largest `α` for which
//! the entropy-constrained problem solved by [`solve_threshold`] still has
//! objective at most `−Σ Q̂(x,y) log P(x|y)`. The exponent is the supremum of
//! `ρ A(Q̂) − D(Q̂_X‖P_X) − m D(Q̂_{Y|X}‖W|Q̂_X)` over joint types, found by a
//! simplex grid search followed by local pairwise mass transfers.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_m, check_rho, ExponentMethod, ExponentResult, Maximizer};
use crate::error::{Error, Result};
use crate::info::{Channel, JointDistribution, Pmf};
use crate::optimize::maximize_scalar_with;

/// Largest input or output alphabet the grid search accepts.
pub const DMC_ALPHABET_GUARD: usize = 4;

const BISECTION_STEPS: usize = 80;

/// Solution of `min L(Q)` subject to `H(Q|P̂_Y) ≥ α` over the tilted family
/// `Q_s(x|y) ∝ P(x|y)^s`. `s = ∞` marks the vertex solution (uniform over the
/// per-row maximizers).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TiltedSolution {
    pub s: f64,
    pub q: Vec<Vec<f64>>,
    pub achieved_h: f64,
    pub objective: f64,
}

/// Rows of `log2 P(x|y)` with the weights `P̂_Y`, evaluated along the tilt.
struct Tilt<'a> {
    log_rows: &'a [Vec<f64>],
}

impl Tilt<'_> {
    /// Row `y` of `Q_s`, with its entropy and linear cost. `t = s/(1+s)`.
    fn row(&self, y: usize, t: f64) -> (Vec<f64>, f64, f64) {
        let logs = &self.log_rows[y];
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let q: Vec<f64> = if t >= 1.0 {
            let ties = logs.iter().filter(|&&l| l == top).count() as f64;
            logs.iter().map(|&l| if l == top { 1.0 / ties } else { 0.0 }).collect()
        } else {
            let s = t / (1.0 - t);
            let raw: Vec<f64> = logs
                .iter()
                .map(|&l| if l.is_finite() { (s * (l - top)).exp2() } else { 0.0 })
                .collect();
            let z: f64 = raw.iter().sum();
            raw.iter().map(|v| v / z).collect()
        };
        let mut h = 0.0;
        let mut cost = 0.0;
        for (&qx, &l) in q.iter().zip(logs) {
            if qx > 0.0 {
                h -= qx * qx.log2();
                cost -= qx * l;
            }
        }
        (q, h, cost)
    }

    /// `(H, L)` of the whole tilted conditional under weights `p_y`.
    fn totals(&self, p_y: &[f64], t: f64) -> (f64, f64) {
        let mut h = 0.0;
        let mut cost = 0.0;
        for (y, &w) in p_y.iter().enumerate() {
            if w > 0.0 {
                let (_, hy, cy) = self.row(y, t);
                h += w * hy;
                cost += w * cy;
            }
        }
        (h, cost)
    }
}

fn log_rows(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    rows.iter()
        .map(|r| r.iter().map(|&p| if p > 0.0 { p.log2() } else { f64::NEG_INFINITY }).collect())
        .collect()
}

/// Minimize `−Σ_y P̂(y) Σ_x Q(x|y) log P(x|y)` subject to
/// `H(Q|P̂_Y) ≥ alpha` (bits).
pub fn solve_threshold(alpha: f64, p_hat_y: &Pmf, posterior: &[Vec<f64>]) -> Result<TiltedSolution> {
    if posterior.len() != p_hat_y.len() {
        return Err(Error::AlphabetMismatch(format!(
            "{} posterior rows for {} output symbols",
            posterior.len(),
            p_hat_y.len()
        )));
    }
    let nx = posterior.first().map_or(0, Vec::len);
    let max_h = (nx as f64).log2();
    if alpha > max_h + 1e-12 {
        return Err(Error::Infeasible(format!(
            "alpha {alpha} exceeds log|X| = {max_h}"
        )));
    }
    let logs = log_rows(posterior);
    let tilt = Tilt { log_rows: &logs };
    let p_y = p_hat_y.probs();
    let (h_vertex, _) = tilt.totals(p_y, 1.0);
    let (h_flat, _) = tilt.totals(p_y, 0.0);
    let t = if alpha <= h_vertex {
        1.0
    } else if alpha > h_flat + 1e-12 {
        return Err(Error::Infeasible(format!(
            "alpha {alpha} exceeds the largest entropy {h_flat} on the posterior support"
        )));
    } else if alpha >= h_flat - 1e-12 {
        // H is flat to second order at s = 0, so bisection cannot get closer.
        0.0
    } else {
        // H decreases in t; keep the constraint satisfied at `lo`.
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if tilt.totals(p_y, mid).0 >= alpha {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    let q: Vec<Vec<f64>> = (0..posterior.len()).map(|y| tilt.row(y, t).0).collect();
    let (achieved_h, objective) = tilt.totals(p_y, t);
    let s = if t >= 1.0 { f64::INFINITY } else { t / (1.0 - t) };
    Ok(TiltedSolution {
        s,
        q,
        achieved_h,
        objective,
    })
}

/// Model quantities reused across every objective evaluation.
struct Problem {
    nx: usize,
    ny: usize,
    m: f64,
    rho: f64,
    /// Cells `(x, y)` with `P_X(x) w(y|x) > 0`.
    active: Vec<(usize, usize)>,
    log_px: Vec<f64>,
    log_w: Vec<Vec<f64>>,
    log_post: Vec<Vec<f64>>,
}

impl Problem {
    fn new(p_x: &Pmf, w: &Channel, m: usize, rho: f64) -> Result<Self> {
        let joint = JointDistribution::from_channel(p_x, w)?;
        let (nx, ny) = (p_x.len(), w.output().len());
        let active = (0..nx)
            .flat_map(|x| (0..ny).map(move |y| (x, y)))
            .filter(|&(x, y)| joint.get(x, y) > 0.0)
            .collect();
        let posterior: Vec<Vec<f64>> = joint
            .x_given_y()
            .into_iter()
            .map(|row| row.unwrap_or_else(|| vec![0.0; nx]))
            .collect();
        Ok(Problem {
            nx,
            ny,
            m: m as f64,
            rho,
            active,
            log_px: p_x.probs().iter().map(|p| p.log2()).collect(),
            log_w: w.rows().iter().map(|r| r.iter().map(|p| p.log2()).collect()).collect(),
            log_post: log_rows(&posterior),
        })
    }

    fn joint_of(&self, v: &[f64]) -> Vec<Vec<f64>> {
        let mut q = vec![vec![0.0; self.ny]; self.nx];
        for (&(x, y), &mass) in self.active.iter().zip(v) {
            q[x][y] = mass;
        }
        q
    }

    /// `A(Q̂)`: the list exponent of a sequence of joint type `Q̂`.
    fn list_exponent(&self, q: &[Vec<f64>]) -> f64 {
        let p_y: Vec<f64> = (0..self.ny).map(|y| (0..self.nx).map(|x| q[x][y]).sum()).collect();
        let mut cost = 0.0;
        for &(x, y) in &self.active {
            if q[x][y] > 0.0 {
                cost -= q[x][y] * self.log_post[y][x];
            }
        }
        let tilt = Tilt { log_rows: &self.log_post };
        let (h_flat, l_flat) = tilt.totals(&p_y, 0.0);
        if cost >= l_flat {
            return h_flat;
        }
        let (h_vertex, l_vertex) = tilt.totals(&p_y, 1.0);
        if cost <= l_vertex {
            return h_vertex;
        }
        // L decreases in t; find L(t) = cost.
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if tilt.totals(&p_y, mid).1 > cost {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        tilt.totals(&p_y, 0.5 * (lo + hi)).0
    }

    /// Objective and `A(Q̂)` at active-cell masses `v` (summing to 1).
    fn objective(&self, v: &[f64]) -> (f64, f64) {
        let q = self.joint_of(v);
        let q_x: Vec<f64> = q.iter().map(|r| r.iter().sum()).collect();
        let mut penalty = 0.0;
        for &(x, y) in &self.active {
            let mass = q[x][y];
            if mass > 0.0 {
                let log_qx = q_x[x].log2();
                let log_qyx = mass.log2() - log_qx;
                penalty += mass * ((log_qx - self.log_px[x]) + self.m * (log_qyx - self.log_w[x][y]));
            }
        }
        let a = self.list_exponent(&q);
        (self.rho * a - penalty, a)
    }
}

/// Tuning of the general-channel optimizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DmcOptions {
    /// Target spacing of the local refinement, and the finest coarse grid used.
    pub resolution: f64,
    /// Largest number of coarse grid points evaluated.
    pub grid_budget: usize,
    /// Number of best grid points refined locally.
    pub candidates: usize,
}

impl Default for DmcOptions {
    fn default() -> Self {
        DmcOptions {
            resolution: 1e-3,
            grid_budget: 200_000,
            candidates: 8,
        }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// All compositions of `total` into `parts` nonnegative integers.
fn grid_points(total: usize, parts: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = vec![0u32; parts];
    fn rec(pos: usize, left: usize, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos + 1 == current.len() {
            current[pos] = left as u32;
            out.push(current.clone());
            return;
        }
        for v in 0..=left {
            current[pos] = v as u32;
            rec(pos + 1, left - v, current, out);
        }
    }
    rec(0, total, &mut current, &mut out);
    out
}

pub fn dmc_decentralized_exponent(
    p_x: &Pmf,
    w: &Channel,
    m: usize,
    rho: f64,
    resolution: f64,
) -> Result<ExponentResult> {
    dmc_decentralized_exponent_with(
        p_x,
        w,
        m,
        rho,
        &DmcOptions {
            resolution,
            ..DmcOptions::default()
        },
    )
}

pub fn dmc_decentralized_exponent_with(
    p_x: &Pmf,
    w: &Channel,
    m: usize,
    rho: f64,
    options: &DmcOptions,
) -> Result<ExponentResult> {
    check_m(m)?;
    check_rho(rho)?;
    let (nx, ny) = (p_x.len(), w.output().len());
    let largest = nx.max(ny);
    if largest > DMC_ALPHABET_GUARD {
        return Err(Error::CapExceeded {
            what: "general-channel optimizer alphabet size",
            required: largest as f64,
            cap: DMC_ALPHABET_GUARD as u64,
        });
    }
    let problem = Problem::new(p_x, w, m, rho)?;
    let d = problem.active.len();

    // Finest grid that fits the budget, but no finer than the resolution.
    let finest = (1.0 / options.resolution).round().max(1.0) as usize;
    let mut k = 1usize;
    while k < finest && binomial(k + 1 + d - 1, d - 1) <= options.grid_budget as f64 {
        k += 1;
    }
    let spacing = 1.0 / k as f64;
    if !(options.resolution > 0.0) || options.resolution > 0.25 || (k < 2 && d > 1) {
        return Err(Error::param(
            "resolution",
            format!(
                "resolution {} with grid spacing {spacing} cannot bracket a maximizer",
                options.resolution
            ),
        ));
    }

    let points = grid_points(k, d);
    let values: Vec<f64> = points
        .par_iter()
        .map(|p| {
            let v: Vec<f64> = p.iter().map(|&c| c as f64 * spacing).collect();
            problem.objective(&v).0
        })
        .collect();
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b)));

    let refined: Vec<(Vec<f64>, f64)> = order
        .iter()
        .take(options.candidates.max(1))
        .map(|&i| {
            let start: Vec<f64> = points[i].iter().map(|&c| c as f64 * spacing).collect();
            refine(&problem, start, spacing, options.resolution)
        })
        .collect();
    let (best_v, best_value) = refined
        .into_iter()
        .fold(None::<(Vec<f64>, f64)>, |acc, cand| match acc {
            Some(a) if a.1 >= cand.1 => Some(a),
            _ => Some(cand),
        })
        .expect("at least one candidate");

    let (_, alpha) = problem.objective(&best_v);
    let joint = JointDistribution::new(
        p_x.alphabet().clone(),
        w.output().clone(),
        problem.joint_of(&best_v),
    )
    .ok();
    ExponentResult::new(
        best_value,
        rho,
        nx,
        Maximizer {
            lambda: None,
            alpha: Some(alpha),
            joint,
        },
        ExponentMethod::TypeGrid,
    )
}

/// Pairwise mass transfers with golden-section line searches, shrinking the
/// transfer radius once a sweep stops improving.
fn refine(problem: &Problem, mut v: Vec<f64>, spacing: f64, resolution: f64) -> (Vec<f64>, f64) {
    let d = v.len();
    let mut best = problem.objective(&v).0;
    let mut radius = spacing;
    let floor = resolution * 1e-3;
    for _ in 0..400 {
        let mut improved = false;
        for i in 0..d {
            for j in 0..d {
                if i == j {
                    continue;
                }
                let hi = v[i].min(radius);
                let lo = -(v[j].min(radius));
                if hi - lo <= 0.0 {
                    continue;
                }
                let eval = |u: f64| {
                    let mut trial = v.clone();
                    trial[i] = (trial[i] - u).max(0.0);
                    trial[j] = (trial[j] + u).max(0.0);
                    problem.objective(&trial).0
                };
                let r = maximize_scalar_with(eval, lo, hi, (hi - lo) / 8.0, 1e-13 * (1.0 + radius));
                if r.value > best + 1e-14 {
                    v[i] = (v[i] - r.argmax).max(0.0);
                    v[j] = (v[j] + r.argmax).max(0.0);
                    best = r.value;
                    improved = true;
                }
            }
        }
        if !improved {
            radius /= 4.0;
            if radius < floor {
                break;
            }
        }
    }
    let total: f64 = v.iter().sum();
    for x in v.iter_mut() {
        *x /= total;
    }
    let value = problem.objective(&v).0;
    (v, value)
}

/// `A(Q̂)` for an external joint type: the exponent of the list position of
/// a sequence whose joint type with the observation is `q_hat`.
pub fn list_exponent(q_hat: &JointDistribution, p_x: &Pmf, w: &Channel) -> Result<f64> {
    if q_hat.x_alphabet() != p_x.alphabet() || q_hat.y_alphabet() != w.output() {
        return Err(Error::AlphabetMismatch("joint type alphabets differ from the model".into()));
    }
    let problem = Problem::new(p_x, w, 1, 1.0)?;
    Ok(problem.list_exponent(q_hat.matrix()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::{bec_decentralized_exponent, bsc_decentralized_exponent, conditional_exponent};
    use crate::info::{bec, bsc, Alphabet, LogBase};

    fn uniform() -> Pmf {
        Pmf::uniform(Alphabet::binary())
    }

    #[test]
    fn threshold_endpoints() {
        let p_y = Pmf::new(Alphabet::indexed(2).unwrap(), vec![0.4, 0.6]).unwrap();
        let rows = vec![vec![0.7, 0.2, 0.1], vec![0.5, 0.25, 0.25]];
        let max_h = 3f64.log2();
        let top = solve_threshold(max_h, &p_y, &rows).unwrap();
        let expected: f64 = p_y.probs().iter().zip(&rows)
            .map(|(w, r)| -w * r.iter().map(|p| p.log2()).sum::<f64>() / 3.0)
            .sum();
        assert!((top.objective - expected).abs() < 1e-9, "{top:?} {expected}");
        for row in &top.q {
            assert!(row.iter().all(|&q| (q - 1.0 / 3.0).abs() < 1e-6));
        }
        let bottom = solve_threshold(0.0, &p_y, &rows).unwrap();
        let vertex = -(0.4 * 0.7f64.log2() + 0.6 * 0.5f64.log2());
        assert!((bottom.objective - vertex).abs() < 1e-12);
        assert!(bottom.s.is_infinite());
        assert!(solve_threshold(max_h + 0.1, &p_y, &rows).is_err());

        let flat = vec![vec![0.25; 4]; 2];
        for alpha in [0.0, 0.7, 1.5, 2.0] {
            let sol = solve_threshold(alpha, &p_y, &flat).unwrap();
            assert!((sol.objective - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn threshold_is_monotone_and_binding() {
        let p_y = Pmf::new(Alphabet::indexed(2).unwrap(), vec![0.3, 0.7]).unwrap();
        let rows = vec![vec![0.6, 0.3, 0.1], vec![0.8, 0.15, 0.05]];
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=30 {
            let alpha = 3f64.log2() * i as f64 / 30.0;
            let sol = solve_threshold(alpha, &p_y, &rows).unwrap();
            assert!(sol.objective >= prev - 1e-12);
            if sol.s.is_finite() {
                assert!((sol.achieved_h - alpha).abs() < 1e-9);
            }
            for row in &sol.q {
                assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
            prev = sol.objective;
        }
    }

    #[test]
    fn list_exponent_matches_an_alpha_search() {
        let p_x = Pmf::new(Alphabet::indexed(3).unwrap(), vec![0.5, 0.3, 0.2]).unwrap();
        let w = Channel::new(
            p_x.alphabet().clone(),
            Alphabet::binary(),
            vec![vec![0.9, 0.1], vec![0.4, 0.6], vec![0.2, 0.8]],
        )
        .unwrap();
        let problem = Problem::new(&p_x, &w, 1, 1.0).unwrap();
        let q = vec![vec![0.2, 0.1], vec![0.15, 0.25], vec![0.1, 0.2]];
        let a = problem.list_exponent(&q);

        let cost: f64 = -(0..3)
            .flat_map(|x| (0..2).map(move |y| (x, y)))
            .map(|(x, y)| q[x][y] * problem.log_post[y][x])
            .sum::<f64>();
        let p_y = Pmf::new(Alphabet::binary(), vec![0.45, 0.55]).unwrap();
        let rows: Vec<Vec<f64>> = problem
            .log_post
            .iter()
            .map(|r| r.iter().map(|l| l.exp2()).collect())
            .collect();
        let (mut lo, mut hi) = (0.0, 3f64.log2());
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if solve_threshold(mid, &p_y, &rows).unwrap().objective <= cost {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((a - lo).abs() < 1e-7, "{a} vs {lo}");

        let q_hat = JointDistribution::new(p_x.alphabet().clone(), Alphabet::binary(), q).unwrap();
        assert!((list_exponent(&q_hat, &p_x, &w).unwrap() - a).abs() < 1e-15);
    }

    #[test]
    fn reproduces_the_single_agent_exponent() {
        let p_x = Pmf::new(Alphabet::indexed(3).unwrap(), vec![0.5, 0.3, 0.2]).unwrap();
        let w = Channel::new(
            p_x.alphabet().clone(),
            Alphabet::binary(),
            vec![vec![0.9, 0.1], vec![0.4, 0.6], vec![0.2, 0.8]],
        )
        .unwrap();
        let opts = DmcOptions { grid_budget: 20_000, ..DmcOptions::default() };
        let got = dmc_decentralized_exponent_with(&p_x, &w, 1, 1.0, &opts).unwrap();
        let want = conditional_exponent(&p_x, &w, 1.0, LogBase::Bits).unwrap().value;
        assert!((got.value - want).abs() < 5e-3, "{} vs {}", got.value, want);
        assert!(got.maximizer.joint.is_some());
    }

    #[test]
    fn reproduces_binary_closed_forms() {
        let opts = DmcOptions { grid_budget: 20_000, ..DmcOptions::default() };
        let b = dmc_decentralized_exponent_with(&uniform(), &bec(0.5).unwrap(), 2, 1.0, &opts).unwrap();
        let want = bec_decentralized_exponent(0.5, 2, 1.0).unwrap().value;
        assert!((b.value - want).abs() < 5e-3, "{} vs {}", b.value, want);
        let s = dmc_decentralized_exponent_with(&uniform(), &bsc(0.2).unwrap(), 2, 1.0, &opts).unwrap();
        let want = bsc_decentralized_exponent(0.2, 2, 1.0).unwrap().value;
        assert!((s.value - want).abs() < 5e-3, "{} vs {}", s.value, want);
    }

    #[test]
    fn guards() {
        let big = Pmf::uniform(Alphabet::indexed(5).unwrap());
        let w = Channel::noiseless(Alphabet::indexed(5).unwrap());
        assert!(dmc_decentralized_exponent(&big, &w, 2, 1.0, 1e-3).unwrap_err().is_guard());
        assert!(dmc_decentralized_exponent(&uniform(), &bsc(0.1).unwrap(), 2, 1.0, 0.5).is_err());
    }
}
