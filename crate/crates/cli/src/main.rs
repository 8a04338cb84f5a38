//! `corr-auction`: command line front end for the auction solvers.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use auction_core::continuous::{certify, solve_continuous_with, ContinuousOptions};
use auction_core::curve::{curve_csv_exact, revenue_curve};
use auction_core::density::{check_oracle, DensityOracle, FnOracle, GaussianBump, ProductBeta, Uniform};
use auction_core::hardness::construction::{catsat_to_instance, ConstantsProfile};
use auction_core::hardness::{max3sat_to_catsat, parse_dimacs};
use auction_core::io::{mechanism_from_json, prior_from_json, prior_to_json, to_json, MechanismDoc, SCHEMA};
use auction_core::mech::{expected_revenue, verify_truthful, AllocationPair, Truthfulness};
use auction_core::multi::{best_pair, brute_force_n};
use auction_core::mwis::{build_conflict_instance, check_duality, extract_transshipment, solve_mwis_lex, EdgeEncoding, EdgeRule};
use auction_core::priors::{mpc_discrete, JointPrior};
use auction_core::rational::{format_q, q, Q};
use auction_core::solve2::{brute_force2, solve_discrete2_with};
use auction_core::{AuctionError, Result as CoreResult};
use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

/// Exit code for a mechanism that fails the truthfulness scan.
const EXIT_VIOLATION: u8 = 2;
/// Exit code for malformed command lines.
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "corr-auction", version, about = "Revenue-optimal deterministic auctions for correlated bidders")]
struct Cli {
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Encoding {
    Direct,
    Dominance,
}

#[derive(Clone, Copy, ValueEnum)]
enum Profile {
    Published,
    Repaired,
}

#[derive(Subcommand)]
enum Command {
    /// Exact optimal two-bidder auction.
    Solve2 {
        prior: PathBuf,
        #[arg(long, value_enum, default_value = "direct")]
        encoding: Encoding,
    },
    /// Exhaustive optimum (small grids only).
    Brute { prior: PathBuf },
    /// Near-optimal auction for a continuous density on the unit square.
    Continuous {
        /// `uniform`, `product-beta(a,b[,floor])` or `gaussian-bump(cx,cy,sigma,floor)`.
        #[arg(long)]
        oracle: String,
        /// Declared Lipschitz constant; must be at least the oracle's own bound.
        #[arg(long)]
        lipschitz: Option<f64>,
        #[arg(long)]
        epsilon: f64,
        /// Override the grid side chosen from the error budget.
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Best two-bidder sub-auction of a multi-bidder prior.
    Pairs { prior: PathBuf },
    /// Three-bidder hardness instance from a 3-CNF formula.
    Reduce {
        cnf: PathBuf,
        #[arg(long, value_enum, default_value = "published")]
        profile: Profile,
        /// Bookkeeping output; defaults to `<out>.bookkeeping.json` when `--out` is set.
        #[arg(long)]
        sidecar: Option<PathBuf>,
    },
    /// Truthfulness scan of a mechanism, plus its revenue under a prior.
    Verify { mechanism: PathBuf, prior: PathBuf },
    /// Revenue curve of one bidder along a line, as CSV.
    Curve {
        prior: PathBuf,
        #[arg(long)]
        bidder: usize,
        /// Grid indices of the other bidders, comma separated, in bidder order.
        #[arg(long, value_delimiter = ',')]
        fix: Vec<usize>,
    },
    /// Primal/dual certificate of the two-bidder optimum (per pair for more bidders).
    Certify { prior: PathBuf },
    /// Random rational prior for experiments.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        bidders: usize,
        #[arg(long, default_value_t = 3)]
        levels: usize,
        /// Probability that a grid point carries mass.
        #[arg(long, default_value_t = 1.0)]
        density: f64,
    },
}

enum Outcome {
    Json(Value),
    Text(String),
    Violation(Value),
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_prior(path: &Path) -> anyhow::Result<JointPrior> {
    Ok(prior_from_json(&read(path)?)?)
}

fn opt_index(k: usize, never: usize) -> Value {
    if k == never {
        Value::Null
    } else {
        json!(k)
    }
}

fn pair_json(pair: &AllocationPair) -> Value {
    let (n1, n2) = pair.shape();
    json!({
        "alpha": pair.alpha().iter().map(|&a| opt_index(a, n1)).collect::<Vec<_>>(),
        "beta": pair.beta().iter().map(|&b| opt_index(b, n2)).collect::<Vec<_>>(),
    })
}

fn discrete_certificate(prior: &JointPrior) -> CoreResult<Value> {
    let f = mpc_discrete(prior, 0)?;
    let g = mpc_discrete(prior, 1)?;
    let inst = build_conflict_instance(&f, &g, EdgeRule::Weak)?;
    let sol = solve_mwis_lex(&inst);
    let plan = extract_transshipment(&inst, &sol)?;
    let report = check_duality(&inst, &sol, &plan);
    Ok(json!({
        "primal": format_q(&report.primal),
        "dual": format_q(&report.dual),
        "gap": format_q(&report.gap),
        "epsilon_budget": "0",
        "passed": report.passed(),
        "primal_issue": report.primal_issue,
        "dual_issue": report.dual_issue,
    }))
}

fn q_str(x: &Q) -> Value {
    Value::String(format_q(x))
}

fn solve2_cmd(prior: &Path, encoding: Encoding) -> anyhow::Result<Outcome> {
    let prior = load_prior(prior)?;
    let enc = match encoding {
        Encoding::Direct => EdgeEncoding::Direct,
        Encoding::Dominance => EdgeEncoding::Dominance,
    };
    let sol = solve_discrete2_with(&prior, enc)?;
    let mut out = json!({
        "schema": SCHEMA,
        "command": "solve2",
        "revenue": q_str(&sol.revenue),
        "mechanism": MechanismDoc::from_mechanism(&sol.mechanism),
        "certificate": discrete_certificate(&prior)?,
    });
    merge(&mut out, pair_json(&sol.pair));
    Ok(Outcome::Json(out))
}

fn merge(target: &mut Value, extra: Value) {
    if let (Value::Object(t), Value::Object(e)) = (target, extra) {
        t.extend(e);
    }
}

fn brute_cmd(prior: &Path) -> anyhow::Result<Outcome> {
    let prior = load_prior(prior)?;
    let (revenue, mech) = if prior.bidders() == 2 {
        brute_force2(&prior)?
    } else {
        brute_force_n(&prior)?
    };
    Ok(Outcome::Json(json!({
        "schema": SCHEMA,
        "command": "brute",
        "revenue": q_str(&revenue),
        "mechanism": MechanismDoc::from_mechanism(&mech),
    })))
}

fn split_call(spec: &str) -> anyhow::Result<(&str, Vec<f64>)> {
    let spec = spec.trim();
    let Some((name, rest)) = spec.split_once('(') else {
        return Ok((spec, Vec::new()));
    };
    let args = rest
        .strip_suffix(')')
        .ok_or_else(|| anyhow!("missing ')' in oracle {spec:?}"))?;
    let values = args
        .split(',')
        .map(|a| a.trim().parse::<f64>().with_context(|| format!("bad oracle argument {a:?}")))
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok((name.trim(), values))
}

fn builtin_oracle(spec: &str) -> anyhow::Result<Box<dyn DensityOracle>> {
    let (name, args) = split_call(spec)?;
    Ok(match (name, args.as_slice()) {
        ("uniform", []) => Box::new(Uniform),
        ("product-beta", &[a, b]) => Box::new(ProductBeta::new(a, b, 0.0)?),
        ("product-beta", &[a, b, floor]) => Box::new(ProductBeta::new(a, b, floor)?),
        ("gaussian-bump", &[c, sigma, floor]) => Box::new(GaussianBump::new(c, c, sigma, floor)?),
        ("gaussian-bump", &[cx, cy, sigma, floor]) => Box::new(GaussianBump::new(cx, cy, sigma, floor)?),
        _ => bail!("unknown oracle {spec:?}; expected uniform, product-beta(a,b[,floor]) or gaussian-bump(cx,cy,sigma,floor)"),
    })
}

fn continuous_cmd(spec: &str, lipschitz: Option<f64>, epsilon: f64, resolution: Option<usize>) -> anyhow::Result<Outcome> {
    let base = builtin_oracle(spec)?;
    let declared = match lipschitz {
        Some(l) if l < base.lipschitz() => {
            return Err(AuctionError::InvalidParameter(format!(
                "declared Lipschitz constant {l} is below the oracle's bound {}",
                base.lipschitz()
            ))
            .into())
        }
        Some(l) => l,
        None => base.lipschitz(),
    };
    let name = base.describe();
    let min = base.min_density();
    let oracle = FnOracle::new(move |x, y| base.density(x, y), declared, min, name);
    check_oracle(&oracle)?;
    let options = ContinuousOptions { resolution, sub: None };
    let sol = solve_continuous_with(&oracle, epsilon, &options)?;
    let cert = certify(&sol)?;
    let n = sol.n() as i64;
    let thresholds = |ks: &[usize]| -> Vec<Value> {
        ks.iter()
            .map(|&k| if k as i64 == n { Value::Null } else { q_str(&q(k as i64, n)) })
            .collect()
    };
    Ok(Outcome::Json(json!({
        "schema": SCHEMA,
        "command": "continuous",
        "oracle": oracle.describe(),
        "revenue": sol.revenue,
        "grid": n,
        "alpha": thresholds(sol.pair.alpha()),
        "beta": thresholds(sol.pair.beta()),
        "overlap_rule": sol.overlap_rule,
        "overlap_cells": sol.overlap_cells,
        "budget": sol.budget,
        "certificate": cert,
        "certificate_passed": cert.passed(),
    })))
}

fn pairs_cmd(prior: &Path) -> anyhow::Result<Outcome> {
    let prior = load_prior(prior)?;
    let bp = best_pair(&prior)?;
    let table: Vec<Value> = bp
        .table
        .iter()
        .map(|((a, b), r)| json!({"pair": [a, b], "revenue": q_str(r)}))
        .collect();
    Ok(Outcome::Json(json!({
        "schema": SCHEMA,
        "command": "pairs",
        "pair": [bp.pair.0, bp.pair.1],
        "revenue": q_str(&bp.revenue),
        "table": table,
        "mechanism": MechanismDoc::from_mechanism(&bp.mechanism),
    })))
}

fn reduce_cmd(cnf: &Path, profile: Profile, sidecar: Option<PathBuf>, out: Option<&Path>) -> anyhow::Result<Outcome> {
    let cnf = parse_dimacs(&read(cnf)?)?;
    let formula = max3sat_to_catsat(&cnf)?;
    let profile = match profile {
        Profile::Published => ConstantsProfile::Published,
        Profile::Repaired => ConstantsProfile::Repaired,
    };
    let inst = catsat_to_instance(&formula, profile)?;
    let factor = inst.prior.total_mass().clone();
    let rho = match formula.max_satisfied() {
        Ok((s, _)) if formula.m() > 0 => Some(q(s as i64, formula.m() as i64)),
        _ => None,
    };
    let book = json!({
        "schema": SCHEMA,
        "command": "reduce",
        "cnf": cnf,
        "formula": formula,
        "profile": profile,
        "constants": inst.constants.iter().map(q_str).collect::<Vec<_>>(),
        "h": inst.h.iter().map(q_str).collect::<Vec<_>>(),
        "normalization": q_str(&factor),
        "literals": inst.literals,
        "clauses": inst.clauses,
        "scaffolding": inst.scaffolding,
        "inequalities": inst.inequalities,
        "scaffold_profit": q_str(&inst.scaffold_profit),
        "cost1": q_str(&inst.cost1()),
        "rho": rho.as_ref().map(q_str),
        "cost2": rho.as_ref().map(|r| q_str(&inst.cost2(r))),
    });
    let sidecar = sidecar.or_else(|| out.map(|o| o.with_extension("bookkeeping.json")));
    if let Some(path) = sidecar {
        fs::write(&path, to_json(&book)).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(Outcome::Text(prior_to_json(&inst.prior.normalized())))
}

fn verify_cmd(mechanism: &Path, prior: &Path) -> anyhow::Result<Outcome> {
    let mech = mechanism_from_json(&read(mechanism)?)?;
    let prior = load_prior(prior)?;
    if mech.grid != *prior.grid() {
        return Err(AuctionError::InvalidParameter("mechanism and prior use different value grids".into()).into());
    }
    let verdict = verify_truthful(&mech);
    let revenue = expected_revenue(&mech, &prior)?;
    let mut out = json!({
        "schema": SCHEMA,
        "command": "verify",
        "revenue": q_str(&revenue),
    });
    Ok(match verdict {
        Truthfulness::Pass => {
            merge(&mut out, json!({"truthful": true}));
            Outcome::Json(out)
        }
        Truthfulness::Violated(v) => {
            merge(
                &mut out,
                json!({
                    "truthful": false,
                    "violation": {
                        "kind": format!("{:?}", v.kind),
                        "bidder": v.bidder,
                        "point": v.point,
                        "deviation": v.deviation,
                        "truthful_utility": q_str(&v.truthful_utility),
                        "deviation_utility": v.deviation_utility.as_ref().map(q_str),
                    }
                }),
            );
            Outcome::Violation(out)
        }
    })
}

fn curve_cmd(prior: &Path, bidder: usize, fix: &[usize]) -> anyhow::Result<Outcome> {
    let prior = load_prior(prior)?;
    let curve = revenue_curve(&prior, bidder, fix)?;
    Ok(Outcome::Text(curve_csv_exact(&curve)))
}

fn certify_cmd(prior: &Path) -> anyhow::Result<Outcome> {
    let prior = load_prior(prior)?;
    let n = prior.bidders();
    if n < 2 {
        return Err(AuctionError::WrongBidderCount { expected: 2, found: n }.into());
    }
    let mut reports = Vec::new();
    let mut all_passed = true;
    let mut worst_gap = Q::from_integer(0.into());
    for a in 0..n {
        for b in a + 1..n {
            let marginal = if n == 2 { prior.clone() } else { prior.marginalize((a, b))? };
            let cert = discrete_certificate(&marginal)?;
            all_passed &= cert["passed"] == json!(true);
            let gap = auction_core::rational::parse_q(cert["gap"].as_str().unwrap_or("0"))?;
            if gap > worst_gap {
                worst_gap = gap;
            }
            reports.push(json!({"pair": [a, b], "certificate": cert}));
        }
    }
    Ok(Outcome::Json(json!({
        "schema": SCHEMA,
        "command": "certify",
        "gap": q_str(&worst_gap),
        "passed": all_passed,
        "pairs": reports,
    })))
}

fn gen_cmd(seed: u64, bidders: usize, levels: usize, density: f64) -> anyhow::Result<Outcome> {
    if bidders == 0 || levels == 0 {
        bail!("need at least one bidder and one level");
    }
    if !(0.0..=1.0).contains(&density) {
        bail!("density must lie in [0, 1]");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<Vec<Q>> = (0..bidders)
        .map(|_| {
            let mut v = Vec::with_capacity(levels);
            let mut x = 0i64;
            for _ in 0..levels {
                x += rng.gen_range(1..=4);
                v.push(q(x, 1));
            }
            v
        })
        .collect();
    let total: usize = (0..bidders).map(|_| levels).product();
    let mut masses: Vec<i64> = (0..total)
        .map(|_| if rng.gen_bool(density) { rng.gen_range(1..=9) } else { 0 })
        .collect();
    if masses.iter().all(|&m| m == 0) {
        masses[rng.gen_range(0..total)] = 1;
    }
    let sum: i64 = masses.iter().sum();
    let grid = auction_core::priors::ValueGrid::new(values)?;
    let prior = JointPrior::new(grid, masses.into_iter().map(|m| q(m, sum)).collect())?;
    Ok(Outcome::Text(prior_to_json(&prior)))
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    let out = cli.out.as_deref();
    match cli.command {
        Command::Solve2 { prior, encoding } => solve2_cmd(&prior, encoding),
        Command::Brute { prior } => brute_cmd(&prior),
        Command::Continuous {
            oracle,
            lipschitz,
            epsilon,
            resolution,
        } => continuous_cmd(&oracle, lipschitz, epsilon, resolution),
        Command::Pairs { prior } => pairs_cmd(&prior),
        Command::Reduce { cnf, profile, sidecar } => reduce_cmd(&cnf, profile, sidecar, out),
        Command::Verify { mechanism, prior } => verify_cmd(&mechanism, &prior),
        Command::Curve { prior, bidder, fix } => curve_cmd(&prior, bidder, &fix),
        Command::Certify { prior } => certify_cmd(&prior),
        Command::Gen {
            seed,
            bidders,
            levels,
            density,
        } => gen_cmd(seed, bidders, levels, density),
    }
}

fn emit(text: &str, out: Option<&Path>) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
                _ => Ok(()),
            }
        }
    }
}

fn error_json(err: &anyhow::Error) -> Value {
    let kind = match err.downcast_ref::<AuctionError>() {
        Some(e) => format!("{e:?}").split(['(', ' ', '{']).next().unwrap_or("Error").to_string(),
        None => "Error".to_string(),
    };
    json!({
        "schema": SCHEMA,
        "error": {"kind": kind, "message": format!("{err:#}")},
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let out = cli.out.clone();
    let result = run(cli).and_then(|outcome| match outcome {
        Outcome::Json(v) => emit(&to_json(&v), out.as_deref()).map(|_| ExitCode::SUCCESS),
        Outcome::Text(t) => emit(&t, out.as_deref()).map(|_| ExitCode::SUCCESS),
        Outcome::Violation(v) => emit(&to_json(&v), out.as_deref()).map(|_| ExitCode::from(EXIT_VIOLATION)),
    });
    match result {
        Ok(code) => code,
        Err(err) => {
            let _ = emit(&to_json(&error_json(&err)), None);
            ExitCode::FAILURE
        }
    }
}
