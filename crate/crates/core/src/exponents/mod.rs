//! Asymptotic guesswork exponents `lim (1/n) log E[G^ρ]`.
//!
//! Closed forms for the binary erasure and symmetric channels live in
//! [`binary`]; the general decentralized exponent and its entropy-constrained
//! inner problem live in [`dmc`]. Values are computed in bits and converted
//! to the requested [`LogBase`] at the very end.

mod binary;
mod dmc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::{
    bec, bsc, product_channel, renyi_bits, Alphabet, Channel, JointDistribution, LogBase, Pmf,
};

pub use binary::{
    bec_centralized_exponent, bec_decentralized_exponent, bsc_centralized_exponent_m2,
    bsc_decentralized_exponent, concatenation_exponent, majority_collapse_bound,
    majority_flip_probability, AGREEMENT_TOL,
};
pub use dmc::{
    dmc_decentralized_exponent, dmc_decentralized_exponent_with, list_exponent, solve_threshold,
    DmcOptions, TiltedSolution, DMC_ALPHABET_GUARD,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExponentMethod {
    ClosedForm,
    ScalarOptimize,
    TypeGrid,
}

impl ExponentMethod {
    pub fn name(self) -> &'static str {
        match self {
            ExponentMethod::ClosedForm => "closed-form",
            ExponentMethod::ScalarOptimize => "scalar-optimize",
            ExponentMethod::TypeGrid => "type-grid",
        }
    }
}

/// Optimizer diagnostics; fields a method does not produce stay `None`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Maximizer {
    pub lambda: Option<f64>,
    pub alpha: Option<f64>,
    pub joint: Option<JointDistribution>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentResult {
    pub value: f64,
    pub maximizer: Maximizer,
    pub method: ExponentMethod,
    pub base: LogBase,
}

impl ExponentResult {
    /// Build from a value in bits, checking it lies in `[0, ρ log|X|]`.
    pub(crate) fn new(
        bits: f64,
        rho: f64,
        nx: usize,
        maximizer: Maximizer,
        method: ExponentMethod,
    ) -> Result<Self> {
        let upper = rho * (nx as f64).log2();
        let slack = 1e-9 * (1.0 + upper);
        if !bits.is_finite() || bits < -slack || bits > upper + slack {
            return Err(Error::Infeasible(format!(
                "exponent {bits} outside [0, {upper}]"
            )));
        }
        Ok(ExponentResult {
            value: bits.clamp(0.0, upper),
            maximizer,
            method,
            base: LogBase::Bits,
        })
    }

    pub fn in_base(mut self, base: LogBase) -> Self {
        if self.base != base {
            let bits = match self.base {
                LogBase::Bits => self.value,
                LogBase::Nats => self.value / std::f64::consts::LN_2,
            };
            self.value = base.from_bits(bits);
            self.base = base;
        }
        self
    }
}

pub(crate) fn check_rho(rho: f64) -> Result<()> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::param("rho", format!("{rho} must be positive")));
    }
    Ok(())
}

pub(crate) fn check_m(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::param("m", "must be at least 1"));
    }
    Ok(())
}

pub(crate) fn check_unit(name: &'static str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::param(name, format!("{v} is outside [0, 1]")));
    }
    Ok(())
}

/// `ρ H_{1/(1+ρ)}(P_X)`.
pub fn arikan_exponent(p_x: &Pmf, rho: f64, base: LogBase) -> Result<ExponentResult> {
    check_rho(rho)?;
    let bits = rho * renyi_bits(p_x.probs(), 1.0 / (1.0 + rho));
    Ok(ExponentResult::new(bits, rho, p_x.len(), Maximizer::default(), ExponentMethod::ClosedForm)?
        .in_base(base))
}

/// Exponent of `E[G*(X|Y)^ρ]`:
/// `log Σ_y (Σ_x P(x, y)^{1/(1+ρ)})^{1+ρ}`.
pub fn conditional_exponent(p_x: &Pmf, w: &Channel, rho: f64, base: LogBase) -> Result<ExponentResult> {
    check_rho(rho)?;
    let bits = conditional_exponent_bits(p_x, w, rho)?;
    Ok(ExponentResult::new(bits, rho, p_x.len(), Maximizer::default(), ExponentMethod::ClosedForm)?
        .in_base(base))
}

pub(crate) fn conditional_exponent_bits(p_x: &Pmf, w: &Channel, rho: f64) -> Result<f64> {
    let joint = JointDistribution::from_channel(p_x, w)?;
    let a = 1.0 / (1.0 + rho);
    let mut total = 0.0;
    for y in 0..w.output().len() {
        let inner: f64 = (0..p_x.len())
            .map(|x| joint.get(x, y))
            .filter(|&v| v > 0.0)
            .map(|v| v.powf(a))
            .sum();
        total += inner.powf(1.0 + rho);
    }
    Ok(total.log2())
}

/// `H(X|Y)`, the large-`m` limit of the decentralized exponent at `ρ`-scale 1.
pub fn decentralized_limit(p_x: &Pmf, w: &Channel, base: LogBase) -> Result<f64> {
    let joint = JointDistribution::from_channel(p_x, w)?;
    let p_y = joint.y_marginal();
    let mut bits = 0.0;
    for (row, &py) in joint.x_given_y().iter().zip(&p_y) {
        if let Some(row) = row {
            bits += py * crate::info::entropy_bits(row);
        }
    }
    Ok(base.from_bits(bits))
}

/// Side-information channel family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Bec(f64),
    Bsc(f64),
    Explicit { p_x: Pmf, w: Channel },
}

impl Model {
    /// Prior and channel; the binary families use a uniform prior.
    pub fn parts(&self) -> Result<(Pmf, Channel)> {
        match self {
            Model::Bec(e) => Ok((Pmf::uniform(Alphabet::binary()), bec(*e)?)),
            Model::Bsc(d) => Ok((Pmf::uniform(Alphabet::binary()), bsc(*d)?)),
            Model::Explicit { p_x, w } => Ok((p_x.clone(), w.clone())),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Model::Bec(e) => format!("bec({e})"),
            Model::Bsc(d) => format!("bsc({d})"),
            Model::Explicit { .. } => "custom".into(),
        }
    }
}

/// How the observations are used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// One agent with one observation.
    Single,
    /// All `m` observations pooled by one guesser.
    Centralized,
    /// `m` independent guessers; cost is the first success.
    Decentralized,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Single => "single",
            Strategy::Centralized => "centralized",
            Strategy::Decentralized => "decentralized",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentQuery {
    pub model: Model,
    pub rho: f64,
    pub m: usize,
    pub base: LogBase,
}

impl ExponentQuery {
    pub fn new(model: Model, rho: f64, m: usize) -> Self {
        ExponentQuery {
            model,
            rho,
            m,
            base: LogBase::Bits,
        }
    }

    /// Evaluate with the most direct method available for the model.
    pub fn evaluate(&self, strategy: Strategy, options: &DmcOptions) -> Result<ExponentResult> {
        check_rho(self.rho)?;
        check_m(self.m)?;
        let (rho, m) = (self.rho, self.m);
        let result = match (&self.model, strategy) {
            (_, Strategy::Single) => {
                let (p_x, w) = self.model.parts()?;
                conditional_exponent(&p_x, &w, rho, LogBase::Bits)?
            }
            (Model::Bec(e), Strategy::Centralized) => bec_centralized_exponent(*e, m, rho)?,
            (Model::Bec(e), Strategy::Decentralized) => bec_decentralized_exponent(*e, m, rho)?,
            (Model::Bsc(d), Strategy::Centralized) => match m {
                1 => conditional_exponent(&Pmf::uniform(Alphabet::binary()), &bsc(*d)?, rho, LogBase::Bits)?,
                2 => bsc_centralized_exponent_m2(*d, rho)?,
                _ => {
                    return Err(Error::CapExceeded {
                        what: "centralized BSC exponent (closed form only for m <= 2; use majority_collapse_bound)",
                        required: m as f64,
                        cap: 2,
                    })
                }
            },
            (Model::Bsc(d), Strategy::Decentralized) => bsc_decentralized_exponent(*d, m, rho)?,
            (Model::Explicit { p_x, w }, Strategy::Centralized) => {
                conditional_exponent(p_x, &product_channel(w, m)?, rho, LogBase::Bits)?
            }
            (Model::Explicit { p_x, w }, Strategy::Decentralized) => {
                if m == 1 {
                    conditional_exponent(p_x, w, rho, LogBase::Bits)?
                } else {
                    dmc_decentralized_exponent_with(p_x, w, m, rho, options)?
                }
            }
        };
        Ok(result.in_base(self.base))
    }
}

/// Channel family swept by [`sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Bec,
    Bsc,
}

impl Family {
    pub fn model(self, param: f64) -> Model {
        match self {
            Family::Bec => Model::Bec(param),
            Family::Bsc => Model::Bsc(param),
        }
    }

    /// Default parameter grid: `ε ∈ {0, 0.1, .., 1}` or `δ ∈ {0, 0.05, .., 0.5}`.
    pub fn default_grid(self) -> Vec<f64> {
        match self {
            Family::Bec => (0..=10).map(|i| i as f64 / 10.0).collect(),
            Family::Bsc => (0..=10).map(|i| i as f64 / 20.0).collect(),
        }
    }
}

/// One curve of a sweep: a strategy at a fixed number of agents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Series {
    pub strategy: Strategy,
    pub m: usize,
}

impl Series {
    /// Centralized with two agents, then decentralized with `1..=max_m` agents.
    pub fn figure_default(max_m: usize) -> Vec<Series> {
        std::iter::once(Series {
            strategy: Strategy::Centralized,
            m: 2,
        })
        .chain((1..=max_m).map(|m| Series {
            strategy: Strategy::Decentralized,
            m,
        }))
        .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub family: Family,
    pub param: f64,
    pub series: Series,
    pub rho: f64,
    pub result: ExponentResult,
}

/// Exponents for every `(param, series)` pair, parameters outermost.
pub fn sweep(family: Family, params: &[f64], series: &[Series], rho: f64, base: LogBase) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(params.len() * series.len());
    for &param in params {
        for &s in series {
            let query = ExponentQuery {
                model: family.model(param),
                rho,
                m: s.m,
                base,
            };
            rows.push(SweepRow {
                family,
                param,
                series: s,
                rho,
                result: query.evaluate(s.strategy, &DmcOptions::default())?,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform() -> Pmf {
        Pmf::uniform(Alphabet::binary())
    }

    #[test]
    fn sweep_layout() {
        let series = Series::figure_default(3);
        let rows = sweep(Family::Bec, &[0.0, 0.5], &series, 1.0, LogBase::Bits).unwrap();
        assert_eq!(rows.len(), 8);
        assert_eq!(rows[0].series.strategy, Strategy::Centralized);
        assert!((rows[4].result.value - (1.25f64).log2()).abs() < 1e-9);
        assert_eq!(Family::Bsc.default_grid().last(), Some(&0.5));
    }

    #[test]
    fn arikan_examples() {
        let v = arikan_exponent(&uniform(), 1.0, LogBase::Bits).unwrap().value;
        assert!((v - 1.0).abs() < 1e-15);
        let v = arikan_exponent(&Pmf::bernoulli(0.11).unwrap(), 1.0, LogBase::Bits).unwrap().value;
        assert!((v - 2.0 * (0.11f64.sqrt() + 0.89f64.sqrt()).log2()).abs() < 1e-14);
        let v = arikan_exponent(&Pmf::bernoulli(0.3).unwrap(), 1e-9, LogBase::Bits).unwrap().value;
        assert!(v < 1e-8);
        let nats = arikan_exponent(&uniform(), 1.0, LogBase::Nats).unwrap();
        assert!((nats.value - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn conditional_examples() {
        let u = uniform();
        let v = conditional_exponent(&u, &Channel::noiseless(Alphabet::binary()), 1.0, LogBase::Bits).unwrap();
        assert!(v.value.abs() < 1e-15);
        for d in [0.05, 0.2, 0.4] {
            let v = conditional_exponent(&u, &bsc(d).unwrap(), 1.0, LogBase::Bits).unwrap().value;
            assert!((v - crate::info::binary_renyi(d, 0.5)).abs() < 1e-12);
        }
        for e in [0.0, 0.3, 0.9, 1.0] {
            let v = conditional_exponent(&u, &bec(e).unwrap(), 1.0, LogBase::Bits).unwrap().value;
            assert!((v - (1.0 + e).log2()).abs() < 1e-12);
        }
    }

    #[test]
    fn decentralized_limit_examples() {
        let u = uniform();
        assert!((decentralized_limit(&u, &bec(0.35).unwrap(), LogBase::Bits).unwrap() - 0.35).abs() < 1e-15);
        let h = decentralized_limit(&u, &bsc(0.2).unwrap(), LogBase::Bits).unwrap();
        assert!((h - crate::info::binary_entropy(0.2)).abs() < 1e-12);
        let z = decentralized_limit(&u, &Channel::noiseless(Alphabet::binary()), LogBase::Bits).unwrap();
        assert_eq!(z, 0.0);
    }

    #[test]
    fn query_dispatch() {
        let opts = DmcOptions::default();
        let q = ExponentQuery::new(Model::Bec(0.5), 1.0, 2);
        let c = q.evaluate(Strategy::Centralized, &opts).unwrap();
        assert!((c.value - 1.25f64.log2()).abs() < 1e-9);
        let q = ExponentQuery::new(Model::Bsc(0.5), 1.0, 3);
        assert!((q.evaluate(Strategy::Decentralized, &opts).unwrap().value - 1.0).abs() < 1e-12);
        assert!(q.evaluate(Strategy::Centralized, &opts).unwrap_err().is_guard());

        let (p_x, w) = Model::Bec(0.5).parts().unwrap();
        let custom = ExponentQuery::new(Model::Explicit { p_x, w }, 1.0, 2);
        let pooled = custom.evaluate(Strategy::Centralized, &opts).unwrap();
        assert!((pooled.value - c.value).abs() < 1e-9);
    }
}
