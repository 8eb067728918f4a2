//! `bandlab`: exhaustive experiments on band quadratic digit forms over F_q[t].

mod config;
mod output;

use std::process::ExitCode;

use bandlab::budget::Budget;
use bandlab::ranklab::{self, delta_a, radical_via_gap, type_i_rank_check, type_ii_rank_check};
use bandlab::sieve::{self, VaughanParams};
use bandlab::verify::{run_suite, Suite, VerifyParams};
use bandlab::Character;
use clap::{Parser, Subcommand, ValueEnum};
use num_rational::Rational64;
use serde_json::{json, Value};

use config::{config_err, CliError, CliResult, GlobalArgs, RunConfig};
use output::{write_report, Report};

const POLY_HELP: &str = "Polynomials are written c_k t^k + ... + c_0 with integer coefficients \
(reduced mod p) or residue tuples (a_0,...,a_{e-1}) over extension fields, e.g. \"t^4 - 1\" or \
\"(0,1)t^2 + 2t + 1\". The `*` before t is optional.";

#[derive(Parser)]
#[command(name = "bandlab", version, about = "Exact finite-field experiments for band quadratic digit forms", after_help = POLY_HELP)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Weight {
    Irreducible,
    VonMangoldt,
}

#[derive(Subcommand)]
enum Command {
    /// Count irreducibles of degree n by the value of Q_A.
    Scan {
        #[arg(long)]
        n: Option<usize>,
        /// Restrict output to these values (repeatable).
        #[arg(long)]
        gamma: Vec<String>,
    },
    /// Exact character sum over P(n) or the von Mangoldt sum over M(n).
    Charsum {
        #[arg(long)]
        n: Option<usize>,
        /// Character scale a in psi(a x); 0 selects the trivial character.
        #[arg(long)]
        scale: Option<String>,
        #[arg(long, value_enum)]
        weight: Option<Weight>,
    },
    /// Type I and Type II Vaughan sums.
    Sigma {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        u: Option<usize>,
        #[arg(long)]
        v: Option<usize>,
        #[arg(long)]
        scale: Option<String>,
    },
    /// Polar rank of h -> Q(g h) on V_N, or of the pair difference when --g2 is given.
    Rank {
        #[arg(long)]
        g: Option<String>,
        #[arg(long)]
        g2: Option<String>,
        #[arg(long = "N")]
        big_n: Option<usize>,
    },
    /// Radical of h -> Q(g h) on V_N, directly and through the gap system.
    Radical {
        #[arg(long)]
        g: Option<String>,
        #[arg(long = "N")]
        big_n: Option<usize>,
    },
    /// Incidence count over R_d x V_N, evaluated both ways.
    Incidence {
        #[arg(long)]
        d: Option<usize>,
        #[arg(long = "N")]
        big_n: Option<usize>,
    },
    /// Monic solutions of a* a = b* b.
    Reciprocal {
        #[arg(long)]
        b: Option<String>,
    },
    /// Sum of q^(Delta/2) over g in M(kappa) with g(0) != 0.
    CentralHalf {
        #[arg(long)]
        kappa: Option<usize>,
        #[arg(long = "N")]
        big_n: Option<usize>,
    },
    /// Run a named verification suite; exit 1 if any case fails.
    Verify {
        /// gap, delta-symbol, typeII-rank, typeI-rank, reciprocal, gauss,
        /// monic-slice, incidence, appendix-A, exponents
        suite: String,
        #[arg(long = "max-deg")]
        max_deg: Option<usize>,
        #[arg(long = "max-N")]
        max_n: Option<usize>,
        #[arg(long = "max-d")]
        max_d: Option<usize>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Exact exponent bookkeeping for the cutoffs u, v (fractions of n).
    AuditExponents {
        #[arg(long)]
        u: Option<String>,
        #[arg(long)]
        v: Option<String>,
        /// Largest denominator in the grid search.
        #[arg(long)]
        grid: Option<i64>,
    },
}

enum Outcome {
    Pass,
    Fail,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(CliError::Budget(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> CliResult<Outcome> {
    let cfg = RunConfig::resolve(&cli.global)?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build_global()
        .map_err(|e| config_err(format!("cannot start worker pool: {e}")))?;
    let budget = Budget::new(cfg.budget);
    let (report, outcome) = match cli.command {
        Command::Scan { n, gamma } => (cmd_scan(&cfg, &budget, n, gamma)?, Outcome::Pass),
        Command::Charsum { n, scale, weight } => (cmd_charsum(&cfg, &budget, n, scale, weight)?, Outcome::Pass),
        Command::Sigma { n, u, v, scale } => (cmd_sigma(&cfg, &budget, n, u, v, scale)?, Outcome::Pass),
        Command::Rank { g, g2, big_n } => (cmd_rank(&cfg, g, g2, big_n)?, Outcome::Pass),
        Command::Radical { g, big_n } => (cmd_radical(&cfg, g, big_n)?, Outcome::Pass),
        Command::Incidence { d, big_n } => (cmd_incidence(&cfg, &budget, d, big_n)?, Outcome::Pass),
        Command::Reciprocal { b } => (cmd_reciprocal(&cfg, &budget, b)?, Outcome::Pass),
        Command::CentralHalf { kappa, big_n } => (cmd_central_half(&cfg, &budget, kappa, big_n)?, Outcome::Pass),
        Command::Verify { suite, max_deg, max_n, max_d, samples } => {
            cmd_verify(&cfg, &budget, &suite, max_deg, max_n, max_d, samples)?
        }
        Command::AuditExponents { u, v, grid } => cmd_audit(&cfg, u, v, grid)?,
    };
    write_report(&report, cfg.format, cfg.out.as_deref())?;
    Ok(outcome)
}

fn character(cfg: &RunConfig, scale: Option<String>) -> CliResult<(Character, String)> {
    let s: String = cfg.file.pick(scale, "scale")?.unwrap_or_else(|| "1".into());
    let a = cfg.element(&s)?;
    Ok((Character::from_scale(a), cfg.fq().format_element(a)))
}

fn cmd_scan(cfg: &RunConfig, budget: &Budget, n: Option<usize>, gamma: Vec<String>) -> CliResult<Report> {
    let n: usize = cfg.file.require(n, "n")?;
    let gamma = if gamma.is_empty() { cfg.file.get::<Vec<String>>("gamma")?.unwrap_or_default() } else { gamma };
    let gammas = gamma.iter().map(|g| cfg.element(g)).collect::<CliResult<Vec<_>>>()?;
    let fq = cfg.fq();
    let res = sieve::scan_counts(&cfg.form(), n, (!gammas.is_empty()).then_some(&gammas[..]), budget)?;
    let names: Vec<String> = gammas.iter().map(|&g| fq.format_element(g)).collect();
    let mut report = Report::new(cfg.echo("scan", json!({ "n": n, "gamma": names })));
    for (g, count) in &res.counts {
        report.push(json!({
            "gamma": fq.format_element(*g),
            "count": count,
            "total": res.total,
            "reference": res.reference(fq.q()),
            "budget_used": budget.used(),
        }));
    }
    Ok(report)
}

fn cmd_charsum(
    cfg: &RunConfig,
    budget: &Budget,
    n: Option<usize>,
    scale: Option<String>,
    weight: Option<Weight>,
) -> CliResult<Report> {
    let n: usize = cfg.file.require(n, "n")?;
    let (ch, scale) = character(cfg, scale)?;
    let weight = match weight {
        Some(w) => w,
        None => match cfg.file.get::<String>("weight")? {
            None => Weight::Irreducible,
            Some(s) => Weight::from_str(&s, true).map_err(config_err)?,
        },
    };
    let form = cfg.form();
    let res = match weight {
        Weight::Irreducible => sieve::charsum_irreducible(&form, n, ch, budget)?,
        Weight::VonMangoldt => sieve::charsum_vonmangoldt(&form, n, ch, budget)?,
    };
    let wname = weight.to_possible_value().unwrap().get_name().to_string();
    let mut report = Report::new(cfg.echo("charsum", json!({ "n": n, "scale": scale, "weight": wname })));
    let mut row = json!({
        "counts": res.counts.counts(),
        "weight_total": res.weight,
        "magnitude": res.magnitude,
        "phase": res.phase,
    });
    if weight == Weight::VonMangoldt {
        let irr = sieve::charsum_irreducible(&form, n, ch, budget)?.counts;
        let corr = sieve::prime_power_correction(&form, n, ch, budget)?;
        row["prime_power_correction"] = json!(corr.counts());
        row["decomposition_exact"] = json!(res.counts.sub(&irr.scaled(n as i64)).same_value(&corr));
    }
    row["budget_used"] = json!(budget.used());
    report.push(row);
    Ok(report)
}

fn cmd_sigma(
    cfg: &RunConfig,
    budget: &Budget,
    n: Option<usize>,
    u: Option<usize>,
    v: Option<usize>,
    scale: Option<String>,
) -> CliResult<Report> {
    let n: usize = cfg.file.require(n, "n")?;
    let params = match (cfg.file.pick(u, "u")?, cfg.file.pick(v, "v")?) {
        (Some(u), Some(v)) => VaughanParams::new(n, u, v)?,
        (None, None) => VaughanParams::standard(n)?,
        _ => return Err(config_err("give both --u and --v, or neither")),
    };
    let (ch, scale) = character(cfg, scale)?;
    let form = cfg.form();
    let s1 = sieve::sigma1(&form, params, ch, budget)?;
    let s2 = sieve::sigma2(&form, params, ch, budget)?;
    let echo = json!({ "n": n, "u": params.u, "v": params.v, "scale": scale });
    let mut report = Report::new(cfg.echo("sigma", echo));
    for (k, t) in s1.table.iter().enumerate() {
        report.push(json!({ "kind": "sigma1_term", "k": k, "value": t }));
    }
    report.push(json!({ "kind": "sigma1", "value": s1.value }));
    report.push(json!({
        "kind": "sigma2",
        "value": s2.value,
        "i": s2.witness_i,
        "g1": cfg.format_poly(&s2.witness_g1),
        "max_exceptional": s2.rows.iter().map(|r| r.exceptional).max(),
        "exceptional_within_tau": s2.exceptional_ok(),
        "budget_used": budget.used(),
    }));
    Ok(report)
}

fn cmd_rank(cfg: &RunConfig, g: Option<String>, g2: Option<String>, big_n: Option<usize>) -> CliResult<Report> {
    let gs: String = cfg.file.require(g, "g")?;
    let n: usize = cfg.file.require(big_n, "N")?;
    let g = cfg.poly(&gs)?;
    let form = cfg.form();
    let g2s: Option<String> = cfg.file.pick(g2, "g2")?;
    let mut report = Report::new(cfg.echo("rank", json!({ "g": gs, "g2": g2s, "N": n })));
    match g2s {
        None => {
            let chk = type_i_rank_check(&form, &g, n)?;
            report.push(json!({
                "g": cfg.format_poly(&g),
                "N": n,
                "rank": chk.rank,
                "floor": chk.floor,
                "delta": n + 1 - chk.rank,
                "ok": chk.ok(),
            }));
        }
        Some(s) => {
            let g2 = cfg.poly(&s)?;
            let row = match type_ii_rank_check(&form, &g, &g2, n) {
                Ok(chk) => json!({ "rank": chk.rank, "floor": chk.floor, "ok": chk.ok(), "exceptional": false }),
                Err(bandlab::Error::ExceptionalPair) => json!({ "exceptional": true }),
                Err(e) => return Err(e.into()),
            };
            let mut row = row;
            row["g1"] = json!(cfg.format_poly(&g));
            row["g2"] = json!(cfg.format_poly(&g2));
            row["i"] = json!(n);
            report.push(row);
        }
    }
    Ok(report)
}

fn cmd_radical(cfg: &RunConfig, g: Option<String>, big_n: Option<usize>) -> CliResult<Report> {
    let gs: String = cfg.file.require(g, "g")?;
    let n: usize = cfg.file.require(big_n, "N")?;
    let g = cfg.poly(&gs)?;
    let form = cfg.form();
    let direct = delta_a(&form, &g, n)?;
    let gap = radical_via_gap(&form, &g, n)?;
    let mut report = Report::new(cfg.echo("radical", json!({ "g": gs, "N": n })));
    report.push(json!({
        "g": cfg.format_poly(&g),
        "N": n,
        "delta": direct.dimension,
        "basis": direct.basis.iter().map(|h| cfg.format_poly(h)).collect::<Vec<_>>(),
        "delta_gap": gap.dimension,
        "same_span": direct.same_span(cfg.fq(), &gap),
    }));
    Ok(report)
}

fn cmd_incidence(cfg: &RunConfig, budget: &Budget, d: Option<usize>, big_n: Option<usize>) -> CliResult<Report> {
    let d: usize = cfg.file.require(d, "d")?;
    let n: usize = cfg.file.require(big_n, "N")?;
    let rep = ranklab::incidence_sum(cfg.fq(), d, n, budget)?;
    let mut report = Report::new(cfg.echo("incidence", json!({ "d": d, "N": n })));
    report.push(json!({
        "d": d,
        "N": n,
        "by_symbol": rep.by_symbol.to_string(),
        "by_multiplier": rep.by_multiplier.to_string(),
        "agree": rep.agrees(),
        "observed_exponent": rep.observed_exponent,
        "reference_exponent": rep.reference_exponent,
        "budget_used": budget.used(),
    }));
    Ok(report)
}

fn cmd_reciprocal(cfg: &RunConfig, budget: &Budget, b: Option<String>) -> CliResult<Report> {
    let bs: String = cfg.file.require(b, "b")?;
    let b = cfg.poly(&bs)?;
    let rep = sieve::reciprocal_solutions(&cfg.ring, &b, budget)?;
    let candidates: Vec<Value> = rep
        .candidates
        .iter()
        .map(|c| {
            json!({
                "divisor": cfg.format_poly(&c.divisor),
                "candidate": c.candidate.as_ref().map(|a| cfg.format_poly(a)),
                "is_solution": c.is_solution,
            })
        })
        .collect();
    let mut report = Report::new(cfg.echo("reciprocal", json!({ "b": bs })));
    report.push(json!({
        "b": cfg.format_poly(&b),
        "tau": rep.tau,
        "solutions": rep.solutions.iter().map(|a| cfg.format_poly(a)).collect::<Vec<_>>(),
        "count": rep.solutions.len(),
        "within_tau": rep.within_tau(),
        "constructive": rep.matches_construction(&cfg.ring, &b),
        "candidates": candidates,
    }));
    Ok(report)
}

fn cmd_central_half(cfg: &RunConfig, budget: &Budget, kappa: Option<usize>, big_n: Option<usize>) -> CliResult<Report> {
    let kappa: usize = cfg.file.require(kappa, "kappa")?;
    let n: usize = cfg.file.require(big_n, "N")?;
    let rep = sieve::central_half_sum(&cfg.form(), kappa, n, budget)?;
    let mut report = Report::new(cfg.echo("central-half", json!({ "kappa": kappa, "N": n })));
    report.push(json!({
        "kappa": kappa,
        "N": n,
        "integer_part": rep.sum.integer.to_string(),
        "sqrt_q_part": rep.sum.sqrt_q.to_string(),
        "observed_exponent": rep.observed_exponent,
        "reference_exponent": rep.reference_exponent,
        "max_fiber": rep.max_fiber,
        "fibers_within_tau": rep.fibers_ok,
        "budget_used": budget.used(),
    }));
    Ok(report)
}

fn cmd_verify(
    cfg: &RunConfig,
    budget: &Budget,
    suite: &str,
    max_deg: Option<usize>,
    max_n: Option<usize>,
    max_d: Option<usize>,
    samples: Option<usize>,
) -> CliResult<(Report, Outcome)> {
    let suite: Suite = suite.parse()?;
    let mut params = VerifyParams::defaults(cfg.fq());
    if cfg.band_given {
        params.bands = vec![cfg.band.clone()];
    }
    params.max_deg = cfg.file.pick(max_deg, "max-deg")?.unwrap_or(params.max_deg);
    params.max_n = cfg.file.pick(max_n, "max-N")?.unwrap_or(params.max_n);
    params.max_d = cfg.file.pick(max_d, "max-d")?.unwrap_or(params.max_d);
    params.samples = cfg.file.pick(samples, "samples")?.unwrap_or(params.samples);
    params.seed = cfg.seed;
    let rep = run_suite(&cfg.ring, suite, &params, budget)?;
    eprintln!("suite {}", rep.suite);
    for c in &rep.cases {
        eprintln!("  {:<4} {:<22} {}", if c.ok { "ok" } else { "FAIL" }, c.case, c.detail);
    }
    eprintln!("{}", if rep.ok { "PASS" } else { "FAIL" });
    let echo = json!({
        "suite": rep.suite,
        "max_deg": params.max_deg,
        "max_N": params.max_n,
        "max_d": params.max_d,
        "samples": params.samples,
    });
    let mut report = Report::new(cfg.echo("verify", echo));
    for c in &rep.cases {
        report.push(json!({ "suite": rep.suite, "case": c.case, "detail": c.detail, "ok": c.ok }));
    }
    Ok((report, if rep.ok { Outcome::Pass } else { Outcome::Fail }))
}

fn parse_fraction(s: &str) -> CliResult<Rational64> {
    let bad = || config_err(format!("bad fraction {s:?}"));
    match s.split_once('/') {
        Some((a, b)) => {
            let (a, b): (i64, i64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
            if b == 0 {
                return Err(bad());
            }
            Ok(Rational64::new(a, b))
        }
        None => Ok(Rational64::from_integer(s.trim().parse().map_err(|_| bad())?)),
    }
}

fn cmd_audit(cfg: &RunConfig, u: Option<String>, v: Option<String>, grid: Option<i64>) -> CliResult<(Report, Outcome)> {
    let u = parse_fraction(&cfg.file.pick(u, "u")?.unwrap_or_else(|| "1/5".into()))?;
    let v = parse_fraction(&cfg.file.pick(v, "v")?.unwrap_or_else(|| "7/10".into()))?;
    let grid: i64 = cfg.file.pick(grid, "grid")?.unwrap_or(20);
    if grid < 1 {
        return Err(config_err("--grid must be at least 1"));
    }
    let a = sieve::exponent_audit(u, v)?;
    let (best, argmin) = sieve::exponent_grid_search(grid);
    let mut report = Report::new(cfg.echo("audit-exponents", json!({ "u": u.to_string(), "v": v.to_string(), "grid": grid })));
    report.push(json!({
        "kind": "audit",
        "type_i": a.type_i.to_string(),
        "type_ii_low": a.type_ii_low.to_string(),
        "type_ii_high": a.type_ii_high.to_string(),
        "max": a.max.to_string(),
        "saves": a.saves(),
    }));
    report.push(json!({
        "kind": "grid",
        "min": best.to_string(),
        "argmin": argmin.iter().map(|(u, v)| format!("{u},{v}")).collect::<Vec<_>>(),
        "optimal": a.max == best,
    }));
    Ok((report, Outcome::Pass))
}
