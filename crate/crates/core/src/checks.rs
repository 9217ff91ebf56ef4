//! The acceptance suite as library calls, shared by the `check` subcommand
//! and the acceptance test target.
//!
//! Every criterion computes its quantities, compares them at a fixed
//! tolerance, and reports pass or fail with the numbers behind the verdict.
//! Errors raised while computing count as failures.

use std::time::Instant;

use serde::Serialize;

use crate::error::Result;
use crate::exponents::{
    bec_centralized_exponent, bec_decentralized_exponent, bsc_centralized_exponent_m2,
    bsc_decentralized_exponent, dmc_decentralized_exponent, majority_collapse_bound, sweep, Family, Series,
    Strategy,
};
use crate::info::{bec, binary_entropy, binary_renyi, bsc, Alphabet, LogBase, Pmf};
use crate::oracle::{
    centralized_moment_exact, conditional_moment_exact, decentralized_moment_exact, rank_table, OracleConfig,
};
use crate::rank::RankEngine;
use crate::sim::{concatenation_moment_exact, simulate_decentralized, soft_elimination_check};
use crate::toy::{budget_to_fraction, run_toy, PasswordCorpus, ToyConfig, ToyStrategy};

/// Seeded synthetic corpus used by the toy criterion.
pub const TOY_CORPUS_SIZE: usize = 1000;
pub const TOY_CORPUS_LENGTHS: (usize, usize) = (6, 10);
pub const TOY_SEED: u64 = 0;

#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: usize,
    pub suite: &'static str,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
    pub time_limit_seconds: Option<f64>,
}

impl CriterionReport {
    pub fn line(&self) -> String {
        format!(
            "{} C{:02} {} ({:.2}s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.seconds,
            self.detail
        )
    }
}

type Verdict = Result<(bool, String)>;

pub struct Criterion {
    pub id: usize,
    pub suite: &'static str,
    pub title: &'static str,
    pub time_limit_seconds: Option<f64>,
    run: fn() -> Verdict,
}

impl Criterion {
    pub fn run(&self) -> CriterionReport {
        let start = Instant::now();
        let verdict = (self.run)();
        let seconds = start.elapsed().as_secs_f64();
        let (mut passed, mut detail) = verdict.unwrap_or_else(|e| (false, format!("error: {e}")));
        if let Some(limit) = self.time_limit_seconds {
            if seconds >= limit {
                passed = false;
                detail.push_str(&format!("; took {seconds:.2}s, limit {limit}s"));
            }
        }
        CriterionReport {
            id: self.id,
            suite: self.suite,
            title: self.title,
            passed,
            detail,
            seconds,
            time_limit_seconds: self.time_limit_seconds,
        }
    }
}

pub const CRITERIA: [Criterion; 13] = [
    Criterion {
        id: 1,
        suite: "closed-forms",
        title: "centralized BEC optimizer equals log2(1+eps^m)",
        time_limit_seconds: Some(1.0),
        run: c01_bec_centralized,
    },
    Criterion {
        id: 2,
        suite: "closed-forms",
        title: "centralized BSC m=2 equals log2(1+4d(1-d))",
        time_limit_seconds: Some(1.0),
        run: c02_bsc_centralized,
    },
    Criterion {
        id: 3,
        suite: "dmc",
        title: "general-channel optimizer matches BEC/BSC closed forms",
        time_limit_seconds: Some(120.0),
        run: c03_dmc_cross_check,
    },
    Criterion {
        id: 4,
        suite: "oracle-rank",
        title: "type-counting ranks equal enumerated positions",
        time_limit_seconds: Some(60.0),
        run: c04_oracle_rank,
    },
    Criterion {
        id: 5,
        suite: "finite-values",
        title: "exact BEC moments at n=1",
        time_limit_seconds: None,
        run: c05_finite_values,
    },
    Criterion {
        id: 6,
        suite: "convergence",
        title: "decentralized BSC moments approach rho*H_{m/(rho+m)}",
        time_limit_seconds: Some(120.0),
        run: c06_convergence,
    },
    Criterion {
        id: 7,
        suite: "soft-elimination",
        title: "soft elimination sits between uniforms",
        time_limit_seconds: Some(10.0),
        run: c07_soft_elimination,
    },
    Criterion {
        id: 8,
        suite: "concatenation",
        title: "concatenated source moment at n=12",
        time_limit_seconds: Some(10.0),
        run: c08_concatenation,
    },
    Criterion {
        id: 9,
        suite: "majority",
        title: "majority collapse bound decreases below 0.05 bits",
        time_limit_seconds: Some(1.0),
        run: c09_majority,
    },
    Criterion {
        id: 10,
        suite: "limits",
        title: "decentralized exponents at m=64 near H(X|Y)",
        time_limit_seconds: None,
        run: c10_limits,
    },
    Criterion {
        id: 11,
        suite: "monte-carlo",
        title: "Monte Carlo BEC estimate within 3 standard errors",
        time_limit_seconds: Some(30.0),
        run: c11_monte_carlo,
    },
    Criterion {
        id: 12,
        suite: "figure-shape",
        title: "centralized m=2 below every decentralized m<=8",
        time_limit_seconds: None,
        run: c12_figure_shape,
    },
    Criterion {
        id: 13,
        suite: "toy",
        title: "toy budget-to-50% ordering",
        time_limit_seconds: Some(300.0),
        run: c13_toy,
    },
];

pub fn suites() -> Vec<&'static str> {
    let mut out: Vec<&'static str> = Vec::new();
    for c in &CRITERIA {
        if !out.contains(&c.suite) {
            out.push(c.suite);
        }
    }
    out
}

/// Criteria in a suite, or all of them for `"all"`; `None` for an unknown name.
pub fn select(suite: &str) -> Option<Vec<&'static Criterion>> {
    if suite == "all" {
        return Some(CRITERIA.iter().collect());
    }
    let chosen: Vec<&Criterion> = CRITERIA.iter().filter(|c| c.suite == suite).collect();
    (!chosen.is_empty()).then_some(chosen)
}

pub fn criterion(id: usize) -> Option<&'static Criterion> {
    CRITERIA.iter().find(|c| c.id == id)
}

fn uniform() -> Pmf {
    Pmf::uniform(Alphabet::binary())
}

fn tenths(lo: usize, hi: usize) -> Vec<f64> {
    (lo..=hi).map(|i| i as f64 / 10.0).collect()
}

fn c01_bec_centralized() -> Verdict {
    let mut worst: f64 = 0.0;
    for eps in tenths(1, 9) {
        for m in 1..=3 {
            let v = bec_centralized_exponent(eps, m, 1.0)?.value;
            worst = worst.max((v - (1.0 + eps.powi(m as i32)).log2()).abs());
        }
    }
    Ok((worst <= 1e-8, format!("max |diff| = {worst:.3e} (tol 1e-8)")))
}

fn c02_bsc_centralized() -> Verdict {
    let mut worst: f64 = 0.0;
    for i in 1..=9 {
        let d = i as f64 * 0.05;
        let v = bsc_centralized_exponent_m2(d, 1.0)?.value;
        worst = worst.max((v - (1.0 + 4.0 * d * (1.0 - d)).log2()).abs());
    }
    Ok((worst <= 1e-6, format!("max |diff| = {worst:.3e} (tol 1e-6)")))
}

fn c03_dmc_cross_check() -> Verdict {
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for m in 1..=2 {
        let got = dmc_decentralized_exponent(&uniform(), &bec(0.5)?, m, 1.0, 1e-3)?.value;
        let want = bec_decentralized_exponent(0.5, m, 1.0)?.value;
        worst = worst.max((got - want).abs());
        parts.push(format!("bec m={m}: {got:.6} vs {want:.6}"));
        let got = dmc_decentralized_exponent(&uniform(), &bsc(0.2)?, m, 1.0, 1e-3)?.value;
        let want = bsc_decentralized_exponent(0.2, m, 1.0)?.value;
        worst = worst.max((got - want).abs());
        parts.push(format!("bsc m={m}: {got:.6} vs {want:.6}"));
    }
    Ok((worst <= 5e-3, format!("{}; max |diff| = {worst:.2e} (tol 5e-3)", parts.join(", "))))
}

fn c04_oracle_rank() -> Verdict {
    let config = OracleConfig::default();
    let priors = [uniform()];
    let channels = [("bsc(0.3)", bsc(0.3)?), ("bec(0.4)", bec(0.4)?)];
    let mut pairs = 0u64;
    let mut mismatches = 0u64;
    for prior in &priors {
        for (_, w) in &channels {
            for n in 1..=8 {
                let table = rank_table(prior, w, n, &config)?;
                let engine = RankEngine::new(prior, w, n)?;
                let ny = w.output().len();
                for (yi, column) in table.iter().enumerate() {
                    let y = crate::order::sequence_from_index(yi as u64, ny, n);
                    for (xi, &want) in column.iter().enumerate() {
                        let x = crate::order::sequence_from_index(xi as u64, 2, n);
                        pairs += 1;
                        match engine.rank(&x, &y) {
                            Ok(r) if r.to_u64() == Some(want as u64) => {}
                            // Impossible observations have no list; skip them on both sides.
                            Err(crate::Error::ZeroProbability(_)) if zero_column(prior, w, &y) => pairs -= 1,
                            _ => mismatches += 1,
                        }
                    }
                }
            }
        }
    }
    Ok((
        mismatches == 0,
        format!("{mismatches} mismatches over {pairs} (x, y) pairs, n <= 8"),
    ))
}

fn zero_column(p_x: &Pmf, w: &crate::info::Channel, y: &[usize]) -> bool {
    y.iter()
        .any(|&b| (0..p_x.len()).all(|a| p_x.prob(a) * w.prob(a, b) == 0.0))
}

fn c05_finite_values() -> Verdict {
    let config = OracleConfig::default();
    let w = bec(0.5)?;
    let c = centralized_moment_exact(&uniform(), &w, 1, 2, 1.0, &config)?.moment;
    let d = decentralized_moment_exact(&uniform(), &w, 1, 2, 1.0, &config)?.moment;
    let s = conditional_moment_exact(&uniform(), &w, 1, 1.0, &config)?.moment;
    let ok = (c - 1.125).abs() <= 1e-12 && (d - 1.125).abs() <= 1e-12 && (s - 1.25).abs() <= 1e-12;
    Ok((ok, format!("centralized {c}, decentralized {d}, conditional {s} (tol 1e-12)")))
}

fn c06_convergence() -> Verdict {
    let config = OracleConfig::default();
    let (delta, m, rho) = (0.25, 2, 1.0);
    let target = rho * binary_renyi(delta, m as f64 / (rho + m as f64));
    let w = bsc(delta)?;
    let mut values = Vec::new();
    for n in 2..=10 {
        values.push(decentralized_moment_exact(&uniform(), &w, n, m, rho, &config)?.per_symbol_exponent);
    }
    let gaps: Vec<f64> = values.iter().map(|v| (v - target).abs()).collect();
    let monotone = gaps.windows(2).all(|g| g[1] < g[0]);
    let last = *values.last().expect("nonempty");
    let close = (last - target).abs() <= 0.1;
    Ok((
        close && monotone,
        format!(
            "n=10 value {last:.6} vs limit {target:.6} (tol 0.1), gaps shrink monotonically: {monotone}; n=2..10: {}",
            values.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>().join(" ")
        ),
    ))
}

fn c07_soft_elimination() -> Verdict {
    let mut checked = 0usize;
    let mut failures = Vec::new();
    for n in 3..=64 {
        for k in 2..=n {
            for rho in [0.5, 1.0, 2.0] {
                checked += 1;
                let c = soft_elimination_check(n, k, rho)?;
                if !c.inequalities_hold {
                    failures.push((n, k, rho));
                }
            }
        }
    }
    let detail = match failures.first() {
        None => format!("all {checked} (N, K, rho) cases hold"),
        Some(&(n, k, rho)) => {
            let all_full = failures.iter().all(|f| f.0 == f.1);
            format!(
                "{} of {checked} cases fail, first at N={n} K={k} rho={rho}{}",
                failures.len(),
                if all_full { "; every failure has K = N, where V is uniform on N points" } else { "" }
            )
        }
    };
    Ok((failures.is_empty(), detail))
}

fn c08_concatenation() -> Verdict {
    let target = 0.96041;
    let r = concatenation_moment_exact(0.5, 0.2, 12, 1.0, &OracleConfig::default())?;
    let module = crate::exponents::concatenation_exponent(0.5, 0.2, 1.0)?;
    let v = r.per_symbol_exponent;
    Ok((
        (v - target).abs() <= 0.1,
        format!("n=12 exponent {v:.6} vs {target} (tol 0.1); the limit computes to {module:.6}"),
    ))
}

fn c09_majority() -> Verdict {
    let bounds: Vec<f64> = [1, 3, 5, 7]
        .iter()
        .map(|&m| majority_collapse_bound(0.1, m, 1.0).map(|r| r.value))
        .collect::<Result<_>>()?;
    let decreasing = bounds.windows(2).all(|b| b[1] < b[0]);
    let last = bounds[3];
    Ok((
        decreasing && last < 0.05,
        format!(
            "bounds m=1,3,5,7: {}; strictly decreasing: {decreasing}; m=7 bound {last:.6} (need < 0.05)",
            bounds.iter().map(|b| format!("{b:.6}")).collect::<Vec<_>>().join(" ")
        ),
    ))
}

fn c10_limits() -> Verdict {
    let e = bec_decentralized_exponent(0.5, 64, 1.0)?.value;
    let d = bsc_decentralized_exponent(0.2, 64, 1.0)?.value;
    let h = binary_entropy(0.2);
    Ok((
        (e - 0.5).abs() <= 0.01 && (d - h).abs() <= 0.01,
        format!("bec {e:.6} vs 0.5, bsc {d:.6} vs {h:.6} (tol 0.01)"),
    ))
}

fn c11_monte_carlo() -> Verdict {
    let w = bec(0.5)?;
    let mut within = 0;
    for seed in 1..=20u64 {
        let s = simulate_decentralized(&uniform(), &w, 1, 1, 1.0, 1_000_000, seed)?;
        if (s.mean - 1.25).abs() <= 3.0 * s.std_error {
            within += 1;
        }
    }
    Ok((within >= 19, format!("{within}/20 seeds within 3 standard errors of 1.25 (need 19)")))
}

fn c12_figure_shape() -> Verdict {
    let series = Series::figure_default(8);
    let mut violations = Vec::new();
    let mut checked = 0;
    for (family, lo, hi) in [(Family::Bec, 0.2, 0.8), (Family::Bsc, 0.1, 0.4)] {
        let grid: Vec<f64> = family
            .default_grid()
            .into_iter()
            .filter(|&p| p >= lo - 1e-12 && p <= hi + 1e-12)
            .collect();
        let rows = sweep(family, &grid, &series, 1.0, LogBase::Bits)?;
        for chunk in rows.chunks(series.len()) {
            let central = chunk[0].result.value;
            debug_assert_eq!(chunk[0].series.strategy, Strategy::Centralized);
            for row in &chunk[1..] {
                checked += 1;
                if !(central < row.result.value) {
                    violations.push(format!("{family:?} {} m={}", chunk[0].param, row.series.m));
                }
            }
        }
    }
    Ok((
        violations.is_empty(),
        if violations.is_empty() {
            format!("{checked} comparisons on eps in [0.2, 0.8] and delta in [0.1, 0.4]")
        } else {
            format!("violations: {}", violations.join(", "))
        },
    ))
}

fn c13_toy() -> Verdict {
    let (lo, hi) = TOY_CORPUS_LENGTHS;
    let corpus = PasswordCorpus::synthetic(TOY_CORPUS_SIZE, lo, hi, TOY_SEED)?;
    let config = ToyConfig {
        m: 3,
        flip_prob: 0.3,
        seed: TOY_SEED,
    };
    let outcomes = run_toy(&corpus, &config)?;
    let budget = |s| budget_to_fraction(&outcomes, s, 0.5);
    let (c, d, s) = (
        budget(ToyStrategy::Centralized),
        budget(ToyStrategy::Decentralized),
        budget(ToyStrategy::Single),
    );
    let ok = match (c, d, s) {
        (Some(c), Some(d), Some(s)) => c < d && d < s && 5 * c <= d,
        _ => false,
    };
    Ok((
        ok,
        format!("budget to 50%: centralized {c:?}, decentralized(3) {d:?}, single {s:?}"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_is_complete() {
        let ids: Vec<usize> = CRITERIA.iter().map(|c| c.id).collect();
        assert_eq!(ids, (1..=13).collect::<Vec<_>>());
        assert_eq!(select("all").unwrap().len(), 13);
        assert_eq!(select("closed-forms").unwrap().len(), 2);
        assert!(select("nope").is_none());
        assert!(suites().contains(&"soft-elimination"));
    }

    #[test]
    fn cheap_criteria_report() {
        for id in [1, 2, 5, 9, 10] {
            let r = criterion(id).unwrap().run();
            assert!(r.line().contains(&format!("C{id:02}")));
        }
    }
}
