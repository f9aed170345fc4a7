use std::fs;

use qqd::balance::{balance_pattern_rowform, qqd_from_balance};
use qqd::bounds::{full_factorial_qqd, lb};
use qqd::design::io::{parse_any, to_text};
use qqd::discrepancy::{
    dd, qqd_squared, qqd_squared_quadratic, swd, wd_squared, SliceScale, SwdMode, QUADRATIC_FORM_CAP,
};
use qqd::reproduce::reproduce;
use qqd::search::{search_uniform, SearchConfig, Termination};
use qqd::{Config64, Design64, DesignSpec, Error};
use serde_json::{json, Value};

use crate::{Cli, Command, Criterion, EvalArgs, SearchArgs, SpecArgs, SwdModeArg, SwdScaleArg};

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_DOMAIN: u8 = 2;
pub const EXIT_REPRODUCE: u8 = 3;
pub const EXIT_BUDGET: u8 = 4;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } | Error::Entry { .. } => EXIT_USAGE,
            _ => EXIT_DOMAIN,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

type Outcome = Result<u8, Failure>;

pub fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Eval(args) => eval(cli, args),
        Command::Bounds(args) => bounds(cli, args),
        Command::Balance { file } => balance(cli, file),
        Command::Compare { files } => compare(cli, files),
        Command::Search(args) => search(cli, args),
        Command::Reproduce => reproduce_all(cli),
    }
}

fn read_design(path: &str) -> Result<Design64, Failure> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{path}: {e}")))?;
    parse_any(&text).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{path}: {}", f.message);
        f
    })
}

/// Parses `2,4,4` or `2x7,4x7` (also `2×7`).
pub fn parse_levels(text: &str) -> Result<Vec<usize>, Failure> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (level, times) = match part.split_once(['x', '×', '*']) {
            Some((l, t)) => (l.trim(), t.trim()),
            None => (part, "1"),
        };
        let level: usize = level.parse().map_err(|_| usage(format!("bad level count `{part}`")))?;
        let times: usize = times.parse().map_err(|_| usage(format!("bad repeat count `{part}`")))?;
        out.extend(std::iter::repeat_n(level, times));
    }
    Ok(out)
}

fn spec_from(args: &SpecArgs) -> Result<DesignSpec, Failure> {
    let levels = parse_levels(&args.levels)?;
    Ok(DesignSpec::new(args.n, args.p, args.q, levels)?)
}

fn print_json(value: &Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("json values serialize")
    );
}

fn fmt6(x: f64) -> String {
    format!("{x:.6}")
}

fn eval(cli: &Cli, args: &EvalArgs) -> Outcome {
    let design = read_design(&args.file)?;
    let mut config = Config64::with_weights(args.a, args.b)?;
    if let Some(tol) = cli.tol {
        config.tol_equiv = tol;
    }
    let mode = match args.swd_mode {
        SwdModeArg::Wd => SwdMode::Wd,
        SwdModeArg::WdSquared => SwdMode::WdSquared,
    };
    let scale = match args.swd_scale {
        SwdScaleArg::Stored => SliceScale::Stored,
        SwdScaleArg::LevelEndpoints => SliceScale::LevelEndpoints,
    };
    let (name, value) = match args.criterion {
        Criterion::Qqd => ("qqd_squared", qqd_squared(&design, &config)),
        Criterion::Wd => ("wd_squared", wd_squared(&design)?),
        Criterion::Dd => ("dd_squared", dd(&design, &config)?),
        Criterion::Swd => ("swd", swd(&design, mode, scale)?),
    };
    let cross = if args.criterion == Criterion::Qqd {
        match qqd_squared_quadratic(&design, &config) {
            Ok(v) => Some(Ok(v)),
            Err(Error::Capacity(_)) => Some(Err(format!("skipped: level combinations exceed {QUADRATIC_FORM_CAP}"))),
            Err(e) => Some(Err(format!("skipped: {e}"))),
        }
    } else {
        None
    };
    let agrees = match &cross {
        Some(Ok(v)) => Some((v - value).abs() < config.tol_equiv),
        _ => None,
    };

    if cli.json {
        let mut out = json!({ "file": args.file, "criterion": name, "value": value });
        if args.criterion == Criterion::Swd {
            out["swd_mode"] = json!(mode);
            out["swd_scale"] = json!(scale);
        }
        match &cross {
            Some(Ok(v)) => {
                out["quadratic_form"] = json!(v);
                out["agrees"] = json!(agrees);
            }
            Some(Err(reason)) => out["quadratic_form"] = json!(reason),
            None => {}
        }
        print_json(&out);
    } else {
        println!("{name}: {}", fmt6(value));
        match &cross {
            Some(Ok(v)) => println!(
                "quadratic form: {} ({})",
                fmt6(*v),
                if agrees == Some(true) { "agrees" } else { "DISAGREES" }
            ),
            Some(Err(reason)) => println!("quadratic form: {reason}"),
            None => {}
        }
    }
    Ok(if agrees == Some(false) { EXIT_DOMAIN } else { 0 })
}

fn bounds(cli: &Cli, args: &SpecArgs) -> Outcome {
    let spec = spec_from(args)?;
    spec.require_utype_feasible()?;
    let bound = lb::<f64>(&spec)?;
    let reference = spec
        .combinations()
        .ok()
        .filter(|&m| spec.runs() % m == 0)
        .map(|_| full_factorial_qqd(&spec, &Config64::default()));
    if cli.json {
        print_json(&json!({
            "spec": spec,
            "lb1": bound.lb1,
            "lb2": bound.lb2,
            "lb": bound.value,
            "source": bound.source,
            "full_factorial": reference,
        }));
    } else {
        println!("LB1: {}", fmt6(bound.lb1));
        println!("LB2: {}", bound.lb2.map_or("n/a".to_string(), fmt6));
        println!("LB:  {} ({:?})", fmt6(bound.value), bound.source);
        if let Some(v) = reference {
            println!("full factorial: {}", fmt6(v));
        }
    }
    Ok(0)
}

fn balance(cli: &Cli, file: &str) -> Outcome {
    let design = read_design(file)?;
    let pattern = balance_pattern_rowform(&design)?;
    let theorem = qqd_from_balance(&design).ok();
    if cli.json {
        print_json(&json!({
            "file": file,
            "balance_pattern": pattern.aggregate,
            "strength": pattern.strength(),
            "qqd_squared_from_balance": theorem,
        }));
    } else {
        for (k, b) in pattern.aggregate.iter().enumerate() {
            println!("B_{}: {}", k + 1, fmt6(*b));
        }
        println!("strength: {}", pattern.strength());
        if let Some(v) = theorem {
            println!("qqd_squared from balance pattern: {}", fmt6(v));
        }
    }
    Ok(0)
}

fn compare(cli: &Cli, files: &[String]) -> Outcome {
    let designs = files.iter().map(|f| read_design(f)).collect::<Result<Vec<_>, _>>()?;
    let spec = designs[0].spec().clone();
    if let Some((file, d)) = files.iter().zip(&designs).find(|(_, d)| d.spec() != &spec) {
        return Err(Failure {
            code: EXIT_DOMAIN,
            message: format!("{file}: spec {:?} differs from {:?}", d.spec(), spec),
        });
    }
    let tol = cli.tol.unwrap_or(Config64::default().tol_equiv);
    let bound = lb::<f64>(&spec).ok().map(|b| b.value);
    let config = Config64::default();
    let mut rows: Vec<(usize, f64)> = designs.iter().map(|d| qqd_squared(d, &config)).enumerate().collect();
    rows.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    // competition ranking: ties share the rank of the first member
    let mut ranks = Vec::with_capacity(rows.len());
    for (pos, row) in rows.iter().enumerate() {
        let tied = pos > 0 && (row.1 - rows[pos - 1].1).abs() <= tol;
        ranks.push(if tied { ranks[pos - 1] } else { pos + 1 });
    }
    let tie = |pos: usize| ranks.iter().filter(|&&r| r == ranks[pos]).count() > 1;
    if cli.json {
        let table: Vec<Value> = rows
            .iter()
            .enumerate()
            .map(|(pos, (idx, v))| {
                json!({
                    "rank": ranks[pos],
                    "file": files[*idx],
                    "qqd_squared": v,
                    "gap": bound.map(|b| v - b),
                    "tie": tie(pos),
                })
            })
            .collect();
        print_json(&json!({ "lower_bound": bound, "ranking": table }));
    } else {
        println!("{:<5} {:<12} {:<12} file", "rank", "qqd_squared", "gap");
        for (pos, (idx, v)) in rows.iter().enumerate() {
            let gap = bound.map_or("n/a".to_string(), |b| fmt6(v - b));
            let mark = if tie(pos) { " (tie)" } else { "" };
            println!("{:<5} {:<12} {:<12} {}{mark}", ranks[pos], fmt6(*v), gap, files[*idx]);
        }
    }
    Ok(0)
}

fn search(cli: &Cli, args: &SearchArgs) -> Outcome {
    let spec = spec_from(&args.spec)?;
    let mut config = SearchConfig {
        budget: args.budget,
        restarts: args.restarts,
        seed: args.seed,
        stop_at_bound: !args.no_stop_at_bound,
        ..SearchConfig::default()
    };
    if let Some(tol) = cli.tol {
        config.bound_tol = tol;
    }
    let result = search_uniform(&spec, &config)?;
    let text = to_text(&result.best_design);
    if let Some(path) = &args.out {
        fs::write(path, &text).map_err(|e| usage(format!("{path}: {e}")))?;
    }
    let attained = result.attained_bound(config.bound_tol);
    if cli.json {
        let mut out = serde_json::to_value(&result).expect("search result serializes");
        out["design"] = qqd::design::io::to_json_value(&result.best_design);
        out["attained_bound"] = json!(attained);
        print_json(&out);
    } else {
        println!("best qqd_squared: {}", fmt6(result.best_value));
        println!(
            "lower bound:      {} ({:?})",
            fmt6(result.bound.value),
            result.bound.source
        );
        println!("gap:              {}", fmt6(result.gap));
        let why = match result.terminated_by {
            Termination::Bound => "bound",
            Termination::Budget => "budget",
            Termination::Schedule => "schedule",
        };
        println!(
            "terminated by:    {why} after {} iterations (restart {})",
            result.iterations, result.restart
        );
        if args.out.is_none() {
            print!("{text}");
        }
    }
    Ok(if attained { 0 } else { EXIT_BUDGET })
}

fn reproduce_all(cli: &Cli) -> Outcome {
    let report = reproduce(cli.tol)?;
    if cli.json {
        print_json(&json!({
            "passed": report.passed(),
            "swd_variant": report.swd_variant,
            "checks": report.checks,
        }));
    } else {
        println!(
            "{:<38} {:>10} {:>12} {:>10}  result",
            "check", "reference", "computed", "|diff|"
        );
        for c in &report.checks {
            let status = match (c.counted, c.pass) {
                (false, _) => "info",
                (true, true) => "pass",
                (true, false) => "FAIL",
            };
            println!(
                "{:<38} {:>10.4} {:>12.6} {:>10.2e}  {status}",
                c.id,
                c.reference,
                c.computed,
                c.error()
            );
            if let Some(note) = &c.note {
                println!("    {note}");
            }
        }
        let failed = report.failures().count();
        println!("{} of {} checks passed", report.counted() - failed, report.counted());
    }
    Ok(if report.passed() { 0 } else { EXIT_REPRODUCE })
}
