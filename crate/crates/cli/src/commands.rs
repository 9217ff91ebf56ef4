use guesswork_core::checks;
use guesswork_core::exponents::{sweep, DmcOptions, ExponentQuery, Family, Maximizer, Series, Strategy};
use guesswork_core::oracle::{
    centralized_moment_exact, conditional_moment_exact, decentralized_moment_exact, OracleConfig,
};
use guesswork_core::sim::{exponent_fit_summaries, simulate_centralized, simulate_decentralized};
use guesswork_core::toy::{self, PasswordCorpus, ToyConfig, ToyStrategy};
use guesswork_core::{ChannelModel, Error, LogBase, Model, Pmf, RankEngine, Result};
use serde_json::{json, Value};

use crate::output::Table;
use crate::{
    BaseArg, ChannelArgs, ChannelKind, CheckArgs, Command, ExponentArgs, LengthArgs, MomentArgs, RankArgs,
    SimulateArgs, StrategyArg, ToyArgs,
};

/// Synthetic toy corpus word lengths; matches the acceptance suite.
const SYNTHETIC_LENGTHS: (usize, usize) = checks::TOY_CORPUS_LENGTHS;
const DEFAULT_MAX_BUDGET: u64 = 10_000_000;
const DEFAULT_SWEEP_AGENTS: usize = 8;

pub struct Outcome {
    pub text: String,
    pub code: u8,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, code: 0 }
    }
}

pub fn run(command: Command) -> Result<Outcome> {
    match command {
        Command::Exponent(a) => exponent(&a),
        Command::Moment(a) => moment(&a),
        Command::Simulate(a) => simulate(&a),
        Command::Toy(a) => toy_curves(&a),
        Command::Check(a) => check(&a),
        Command::Rank(a) => rank(&a),
    }
}

fn model(args: &ChannelArgs) -> Result<Model> {
    match args.channel {
        ChannelKind::Bec => Ok(Model::Bec(required_param(args)?)),
        ChannelKind::Bsc => Ok(Model::Bsc(required_param(args)?)),
        ChannelKind::Custom => {
            let path = args
                .channel_file
                .as_ref()
                .ok_or_else(|| Error::InvalidParameter {
                    name: "channel-file",
                    reason: "required for --channel custom".into(),
                })?;
            let (p_x, w) = ChannelModel::load(path)?.build()?;
            Ok(Model::Explicit { p_x, w })
        }
    }
}

fn required_param(args: &ChannelArgs) -> Result<f64> {
    args.param.ok_or_else(|| Error::InvalidParameter {
        name: "param",
        reason: "required for bec and bsc".into(),
    })
}

fn channel_json(args: &ChannelArgs) -> Value {
    json!({
        "channel": format!("{:?}", args.channel).to_lowercase(),
        "param": args.param,
        "channel_file": args.channel_file.as_ref().map(|p| p.display().to_string()),
    })
}

fn strategy(s: StrategyArg) -> Strategy {
    match s {
        StrategyArg::Single => Strategy::Single,
        StrategyArg::Centralized => Strategy::Centralized,
        StrategyArg::Decentralized => Strategy::Decentralized,
    }
}

fn base(b: BaseArg) -> LogBase {
    match b {
        BaseArg::Bits => LogBase::Bits,
        BaseArg::Nats => LogBase::Nats,
    }
}

fn maximizer_cells(m: &Maximizer) -> (Value, Value) {
    (json!(m.lambda), json!(m.alpha))
}

fn exponent(a: &ExponentArgs) -> Result<Outcome> {
    let log_base = base(a.base);
    let mut table = Table::new(
        "exponent",
        vec!["model", "param", "strategy", "m", "rho", "value", "method", "lambda", "alpha", "base"],
    );
    table.meta(
        "config",
        json!({
            "channel": channel_json(&a.channel),
            "rho": a.common.rho,
            "m": a.m,
            "strategy": strategy(a.strategy).name(),
            "base": log_base.name(),
            "resolution": a.resolution,
            "sweep": a.sweep,
        }),
    );
    if a.sweep {
        let family = match a.channel.channel {
            ChannelKind::Bec => Family::Bec,
            ChannelKind::Bsc => Family::Bsc,
            ChannelKind::Custom => {
                return Err(Error::InvalidParameter {
                    name: "channel",
                    reason: "--sweep needs bec or bsc".into(),
                })
            }
        };
        let grid = family.default_grid();
        let series = Series::figure_default(a.m.unwrap_or(DEFAULT_SWEEP_AGENTS));
        table.meta("grid", json!(grid));
        for row in sweep(family, &grid, &series, a.common.rho, log_base)? {
            let (lambda, alpha) = maximizer_cells(&row.result.maximizer);
            table.push(vec![
                json!(format!("{family:?}").to_lowercase()),
                json!(row.param),
                json!(row.series.strategy.name()),
                json!(row.series.m),
                json!(row.rho),
                json!(row.result.value),
                json!(row.result.method.name()),
                lambda,
                alpha,
                json!(log_base.name()),
            ]);
        }
    } else {
        let model = model(&a.channel)?;
        let m = a.m.unwrap_or(1);
        let query = ExponentQuery {
            model: model.clone(),
            rho: a.common.rho,
            m,
            base: log_base,
        };
        let options = DmcOptions {
            resolution: a.resolution,
            ..DmcOptions::default()
        };
        let result = query.evaluate(strategy(a.strategy), &options)?;
        let (lambda, alpha) = maximizer_cells(&result.maximizer);
        table.push(vec![
            json!(model.name()),
            json!(a.channel.param),
            json!(strategy(a.strategy).name()),
            json!(m),
            json!(a.common.rho),
            json!(result.value),
            json!(result.method.name()),
            lambda,
            alpha,
            json!(log_base.name()),
        ]);
    }
    Ok(Outcome::ok(table.render(a.common.output)))
}

fn lengths(args: &LengthArgs) -> Result<Vec<usize>> {
    if let Some(n) = args.n {
        return Ok(vec![n]);
    }
    let spec = args.n_grid.as_deref().unwrap_or_default();
    let bad = || Error::InvalidParameter {
        name: "n-grid",
        reason: format!("expected a:b:step with 1 <= a <= b and step >= 1, got {spec:?}"),
    };
    let parts: Vec<usize> = spec
        .split(':')
        .map(|p| p.trim().parse::<usize>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    let (lo, hi, step) = match parts[..] {
        [lo, hi] => (lo, hi, 1),
        [lo, hi, step] => (lo, hi, step),
        _ => return Err(bad()),
    };
    if lo == 0 || lo > hi || step == 0 {
        return Err(bad());
    }
    Ok((lo..=hi).step_by(step).collect())
}

fn moment(a: &MomentArgs) -> Result<Outcome> {
    let model = model(&a.channel)?;
    let (p_x, w) = model.parts()?;
    let config = OracleConfig::default();
    let strat = strategy(a.strategy);
    let mut table = Table::new(
        "moment",
        vec!["model", "strategy", "n", "m", "rho", "moment", "log2_moment", "per_symbol_exponent"],
    );
    table.meta(
        "config",
        json!({
            "channel": channel_json(&a.channel),
            "rho": a.common.rho,
            "m": a.m,
            "strategy": strat.name(),
            "enumeration_cap": config.cap,
            "product_cap": config.product_cap,
        }),
    );
    for n in lengths(&a.lengths)? {
        let (m, report) = match strat {
            Strategy::Single => (1, conditional_moment_exact(&p_x, &w, n, a.common.rho, &config)?),
            Strategy::Centralized => (a.m, centralized_moment_exact(&p_x, &w, n, a.m, a.common.rho, &config)?),
            Strategy::Decentralized => (
                a.m,
                decentralized_moment_exact(&p_x, &w, n, a.m, a.common.rho, &config)?,
            ),
        };
        table.push(vec![
            json!(model.name()),
            json!(strat.name()),
            json!(n),
            json!(m),
            json!(a.common.rho),
            json!(report.moment),
            json!(report.log2_moment),
            json!(report.per_symbol_exponent),
        ]);
    }
    Ok(Outcome::ok(table.render(a.common.output)))
}

fn simulate(a: &SimulateArgs) -> Result<Outcome> {
    let model = model(&a.channel)?;
    let (p_x, w) = model.parts()?;
    let strat = strategy(a.strategy);
    let m = if strat == Strategy::Single { 1 } else { a.m };
    let mut table = Table::new(
        "simulate",
        vec![
            "model",
            "strategy",
            "n",
            "m",
            "rho",
            "trials",
            "seed",
            "mean",
            "std_error",
            "log2_mean",
            "per_symbol_exponent",
            "exponent_std_error",
        ],
    );
    let ns = lengths(&a.lengths)?;
    let mut summaries = Vec::with_capacity(ns.len());
    for &n in &ns {
        let s = match strat {
            Strategy::Centralized => simulate_centralized(&p_x, &w, n, m, a.common.rho, a.trials, a.seed)?,
            _ => simulate_decentralized(&p_x, &w, n, m, a.common.rho, a.trials, a.seed)?,
        };
        table.push(vec![
            json!(model.name()),
            json!(strat.name()),
            json!(n),
            json!(m),
            json!(a.common.rho),
            json!(s.trials),
            json!(s.master_seed),
            json!(s.mean),
            json!(s.std_error),
            json!(s.log2_mean),
            json!(s.per_symbol_exponent),
            json!(s.exponent_std_error),
        ]);
        summaries.push(s);
    }
    table.meta(
        "config",
        json!({
            "channel": channel_json(&a.channel),
            "rho": a.common.rho,
            "m": m,
            "strategy": strat.name(),
            "n": ns,
            "trials": a.trials,
            "seed": a.seed,
        }),
    );
    if summaries.len() >= 3 {
        table.meta("exponent_fit", json!(exponent_fit_summaries(&summaries)?));
    }
    Ok(Outcome::ok(table.render(a.common.output)))
}

fn toy_curves(a: &ToyArgs) -> Result<Outcome> {
    if a.top_k == 0 {
        return Err(Error::InvalidParameter {
            name: "top-k",
            reason: "must be at least 1".into(),
        });
    }
    let corpus = match &a.corpus {
        Some(path) => toy::load_corpus(path, Some(a.top_k), None)?,
        None => PasswordCorpus::synthetic(a.top_k, SYNTHETIC_LENGTHS.0, SYNTHETIC_LENGTHS.1, a.seed)?,
    };
    let config = ToyConfig {
        m: a.m,
        flip_prob: a.flip_prob,
        seed: a.seed,
    };
    let budgets = a
        .budgets
        .clone()
        .unwrap_or_else(|| toy::default_budgets(DEFAULT_MAX_BUDGET));
    if budgets.contains(&0) {
        return Err(Error::InvalidParameter {
            name: "budgets",
            reason: "must be positive".into(),
        });
    }
    let outcomes = toy::run_toy(&corpus, &config)?;
    let mut table = Table::new("toy", vec!["strategy", "budget", "fraction_recovered"]);
    for curve in toy::curves_from_outcomes(&outcomes, &budgets) {
        for (budget, fraction) in &curve.points {
            table.push(vec![json!(curve.strategy.name()), json!(budget), json!(fraction)]);
        }
    }
    let to_half: serde_json::Map<String, Value> = ToyStrategy::ALL
        .iter()
        .map(|&s| (s.name().to_string(), json!(toy::budget_to_fraction(&outcomes, s, 0.5))))
        .collect();
    table.meta("seed", json!(a.seed));
    table.meta("flip_prob", json!(a.flip_prob));
    table.meta("m", json!(a.m));
    table.meta("top_k", json!(a.top_k));
    table.meta(
        "corpus",
        json!(match &a.corpus {
            Some(p) => p.display().to_string(),
            None => format!("synthetic(lengths {}..={})", SYNTHETIC_LENGTHS.0, SYNTHETIC_LENGTHS.1),
        }),
    );
    table.meta("entries", json!(corpus.len()));
    table.meta("substitution", json!("uniform over the other 25 letters"));
    table.meta("budget_to_half", Value::Object(to_half));
    Ok(Outcome::ok(table.render(a.output)))
}

fn check(a: &CheckArgs) -> Result<Outcome> {
    let chosen = checks::select(&a.suite).ok_or_else(|| Error::InvalidParameter {
        name: "suite",
        reason: format!("unknown suite {:?}; known: all, {}", a.suite, checks::suites().join(", ")),
    })?;
    let mut table = Table::new("check", vec!["criterion", "suite", "result", "seconds", "detail"]);
    table.meta("config", json!({ "suite": a.suite }));
    let mut failed = 0;
    for c in chosen {
        let r = c.run();
        eprintln!("{}", r.line());
        if !r.passed {
            failed += 1;
        }
        table.push(vec![
            json!(format!("C{:02}", r.id)),
            json!(r.suite),
            json!(if r.passed { "PASS" } else { "FAIL" }),
            json!(r.seconds),
            json!(r.detail),
        ]);
    }
    table.meta("failed", json!(failed));
    Ok(Outcome {
        text: table.render(a.output),
        code: if failed > 0 { 3 } else { 0 },
    })
}

fn rank(a: &RankArgs) -> Result<Outcome> {
    let model = model(&a.channel)?;
    let (p_x, w): (Pmf, _) = model.parts()?;
    let x = p_x.alphabet().parse_sequence(&a.x)?;
    let y = w.output().parse_sequence(&a.y)?;
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(format!("|x| = {}, |y| = {}", x.len(), y.len())));
    }
    let engine = RankEngine::new(&p_x, &w, x.len())?;
    let r = engine.rank(&x, &y)?;
    let (first, last) = engine.tie_run(&x, &y)?;
    let mut table = Table::new("rank", vec!["x", "y", "rank", "log2_rank", "tie_first", "tie_last"]);
    table.meta("config", json!({ "channel": channel_json(&a.channel) }));
    table.push(vec![
        json!(a.x),
        json!(a.y),
        json!(r.to_string()),
        json!(r.log2()),
        json!(first.to_string()),
        json!(last.to_string()),
    ]);
    Ok(Outcome::ok(table.render(a.output)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g = |s: &str| {
            lengths(&LengthArgs {
                n: None,
                n_grid: Some(s.into()),
            })
        };
        assert_eq!(g("2:10:4").unwrap(), vec![2, 6, 10]);
        assert_eq!(g("3:5").unwrap(), vec![3, 4, 5]);
        assert!(g("0:3:1").is_err());
        assert!(g("5:3:1").is_err());
        assert!(g("a:b").is_err());
    }
}
