use std::io::Write;
use std::sync::Arc;

use mql_core::adversaries::{self, HonestOracle};
use mql_core::questioners::{self, bounds, Optimal};
use mql_core::solver::{solve as solve_instance, worst_case_count, ExactSolver};
use mql_core::verify::{VerifyOptions, Verifier};
use mql_core::{run, AnswerSource, Coloring, Error, Model, Questioner, SolveOptions, Tracking, Verdict};
use serde::Serialize;
use serde_json::json;

use crate::{Format, PlayArgs, SolveArgs, TableArgs, VerifyArgs};

pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Inconsistent | Error::Unsatisfiable | Error::EmptyKnowledge | Error::NoVerdict => 1,
            Error::CeilingExceeded { .. } | Error::InvalidAnswer(_) | Error::Json(_) => 1,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: 2, message: e.to_string() }
    }
}

type Outcome = Result<u8, Failure>;

fn label(model: Model, k: usize, n: usize) -> String {
    match model {
        Model::Yn => format!("q_{k}({n})"),
        Model::Pairing => format!("q^p_{k}({n})"),
    }
}

/// A closed stdout is not an error worth reporting.
fn print_json(value: &impl Serialize) {
    let _ = writeln!(std::io::stdout().lock(), "{}", serde_json::to_string_pretty(value).expect("serializable"));
}

pub fn solve(args: &SolveArgs) -> Outcome {
    let options = SolveOptions { threads: args.common.threads.max(1), ..Default::default() };
    let solution = solve_instance(args.n, args.k, args.model, &options, args.strategy_out.is_some())?;
    if let Some(path) = &args.strategy_out {
        let body = solution.strategy.as_ref().map_or_else(|| "null".to_string(), |s| s.to_json());
        std::fs::write(path, body + "\n")?;
    }
    match args.common.format() {
        Format::Json => print_json(&json!({
            "n": solution.n,
            "k": solution.k,
            "model": solution.model,
            "value": solution.value,
            "stats": solution.stats,
        })),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(std::io::stdout());
            w.write_record(["n", "k", "model", "solvable", "queries"]).map_err(csv_failure)?;
            let queries = solution.value.queries.map_or(String::new(), |q| q.to_string());
            let row = [solution.n.to_string(), solution.k.to_string(), solution.model.to_string(), solution.value.solvable.to_string(), queries];
            w.write_record(&row).map_err(csv_failure)?;
            w.flush()?;
        }
        Format::Text => println!("{} = {}", label(args.model, args.k, args.n), solution.value),
    }
    Ok(0)
}

fn csv_failure(e: csv::Error) -> Failure {
    Failure::usage(format!("csv: {e}"))
}

/// Picks the model from the flags, the questioner or the adversary.
fn play_model(args: &PlayArgs, questioner: Option<&dyn Questioner>) -> Model {
    if let Some(m) = args.model {
        return m;
    }
    if let Some(q) = questioner {
        match (q.supports(Model::Yn), q.supports(Model::Pairing)) {
            (true, false) => return Model::Yn,
            (false, true) => return Model::Pairing,
            _ => {}
        }
    }
    match args.adversary.as_str() {
        "greedy" => Model::Pairing,
        _ => Model::Yn,
    }
}

pub fn play(args: &PlayArgs) -> Outcome {
    let n = args.n;
    let scripted = questioners::by_name(&args.questioner);
    if scripted.is_none() && args.questioner != "optimal" {
        return Err(Failure::usage(format!("unknown questioner {:?}", args.questioner)));
    }
    let model = play_model(args, scripted.as_deref());
    let k = args.k.or(scripted.as_ref().map(|q| q.arity())).unwrap_or(3);
    let needs_solver = args.questioner == "optimal" || args.adversary == "exact";
    let solver = if needs_solver {
        let s = Arc::new(ExactSolver::new(n, k, model, &SolveOptions { threads: args.common.threads.max(1), ..Default::default() })?);
        s.game_value()?;
        Some(s)
    } else {
        None
    };
    let questioner: Box<dyn Questioner> = match scripted {
        Some(q) => q,
        None => Box::new(Optimal::new(solver.clone().expect("built above"))),
    };
    if questioner.arity() != k {
        return Err(Failure::usage(format!("{} asks {}-queries, not {k}", questioner.name(), questioner.arity())));
    }

    let mut honest_coloring: Option<Coloring> = None;
    let mut source: Box<dyn AnswerSource> = if args.adversary == "honest" {
        let spec = args.coloring.as_deref().ok_or_else(|| Failure::usage("honest adversary needs --coloring"))?;
        let c: Coloring = spec.parse()?;
        if c.n() != n {
            return Err(Failure::usage(format!("coloring has {} balls, expected {n}", c.n())));
        }
        honest_coloring = Some(c);
        Box::new(HonestOracle::new(c, model))
    } else {
        if let Some(spec) = args.adversary.strip_prefix("honest:") {
            honest_coloring = Some(spec.parse()?);
        }
        adversaries::by_name(&args.adversary, model, n, solver.clone())?
    };

    let r = run(questioner.as_ref(), source.as_mut(), model, n, Tracking::On)?;
    let correct = honest_coloring.map(|c| r.verdict.is_correct_for(&c) && r.verdict.same_kind(&c.ground_truth()));
    match args.common.format() {
        Format::Json => print_json(&json!({
            "questioner": questioner.name(),
            "adversary": args.adversary,
            "transcript": r.transcript,
            "verdict": r.verdict,
            "queries": r.query_count,
            "gap": r.gap,
            "certified": r.certified,
            "correct": correct,
        })),
        _ => {
            println!("{}", r.transcript.to_json());
            println!("verdict: {}", verdict_text(&r.verdict));
            println!("queries: {}", r.query_count);
            if let Some(gap) = r.gap {
                println!("gap: {gap}");
            }
            if let Some(ok) = correct {
                println!("correct: {ok}");
            }
        }
    }
    if correct == Some(false) || r.certified == Some(false) {
        return Ok(1);
    }
    Ok(0)
}

fn verdict_text(v: &Verdict) -> String {
    match v {
        Verdict::NoMajority => "no majority".into(),
        Verdict::Majority { ball } => format!("majority {}", ball.0),
        Verdict::Unknown => "unknown".into(),
    }
}

#[derive(Serialize)]
struct Row {
    n: usize,
    model: Model,
    lower: Option<usize>,
    upper: Option<usize>,
    exact: Option<u32>,
    measured: Option<usize>,
    strategy: &'static str,
    note: String,
}

pub fn table(args: &TableArgs) -> Outcome {
    if args.from > args.to {
        return Err(Failure::usage("--from exceeds --to"));
    }
    let (strategy, questioner): (&'static str, Box<dyn Questioner>) = match args.model {
        Model::Yn => ("majority3", Box::new(questioners::Majority3::PLAIN)),
        Model::Pairing => ("pairing-bins", Box::new(questioners::PairingBins)),
    };
    let options = SolveOptions { threads: args.common.threads.max(1), ..Default::default() };
    let mut rows = Vec::new();
    for n in args.from.max(3)..=args.to {
        let mut notes = Vec::new();
        let (lower, upper) = match args.model {
            Model::Yn if n >= 4 => (Some(bounds::yn3_lower(n)), Some(bounds::majority3_upper(n))),
            Model::Yn => (None, None),
            Model::Pairing => (Some(bounds::pairing3_exact(n)), Some(bounds::pairing3_exact(n))),
        };
        let exact = if n <= args.max_exact {
            match ExactSolver::new(n, 3, args.model, &options).and_then(|s| s.game_value()) {
                Ok(v) => v.queries,
                Err(e) => {
                    notes.push(format!("exact: {e}"));
                    None
                }
            }
        } else {
            notes.push("exact not computed".into());
            None
        };
        let measured = if n <= args.max_measured && n >= questioner.min_balls() {
            match worst_case_count(questioner.as_ref(), n, 3, args.model) {
                Ok(w) if w.all_correct => Some(w.max_queries),
                Ok(_) => {
                    notes.push("measured: wrong verdict".into());
                    None
                }
                Err(e) => {
                    notes.push(format!("measured: {e}"));
                    None
                }
            }
        } else {
            notes.push("measured not computed".into());
            None
        };
        rows.push(Row { n, model: args.model, lower, upper, exact, measured, strategy, note: notes.join("; ") });
    }
    for row in rows.iter().filter(|r| !r.note.is_empty()) {
        eprintln!("warning: n = {}: {}", row.n, row.note);
    }
    let cell = |v: Option<String>| v.unwrap_or_default();
    match args.common.format() {
        Format::Json => print_json(&json!({ "rows": rows })),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(std::io::stdout());
            w.write_record(["n", "model", "lower", "upper", "exact", &format!("measured_{strategy}"), "note"]).map_err(csv_failure)?;
            for r in &rows {
                w.write_record([
                    r.n.to_string(),
                    r.model.to_string(),
                    cell(r.lower.map(|v| v.to_string())),
                    cell(r.upper.map(|v| v.to_string())),
                    cell(r.exact.map(|v| v.to_string())),
                    cell(r.measured.map(|v| v.to_string())),
                    r.note.clone(),
                ])
                .map_err(csv_failure)?;
            }
            w.flush()?;
        }
        Format::Text => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{:>3} {:>7} {:>5} {:>5} {:>5} {:>8}", "n", "model", "lower", "upper", "exact", "measured")?;
            for r in &rows {
                let show = |v: Option<String>| v.unwrap_or_else(|| "-".into());
                writeln!(
                    out,
                    "{:>3} {:>7} {:>5} {:>5} {:>5} {:>8}",
                    r.n,
                    r.model.to_string(),
                    show(r.lower.map(|v| v.to_string())),
                    show(r.upper.map(|v| v.to_string())),
                    show(r.exact.map(|v| v.to_string())),
                    show(r.measured.map(|v| v.to_string())),
                )?;
            }
        }
    }
    Ok(0)
}

pub fn verify(args: &VerifyArgs) -> Outcome {
    let mut options = VerifyOptions { fast: args.fast, threads: args.common.threads.max(1), ..Default::default() };
    if let Some(seed) = args.seed {
        options.seed = seed;
    }
    let verifier = Verifier::new(options);
    let json = args.common.format() == Format::Json;
    let mut checks = Vec::new();
    for (id, _) in mql_core::verify::CHECKS {
        let check = verifier.run(id);
        if !json {
            let status = if check.passed { "PASS" } else { "FAIL" };
            println!("{status} {} {} ({:.1}s)", check.id, check.name, check.seconds);
            for f in &check.failures {
                println!("    {f}");
            }
        }
        checks.push(check);
    }
    let passed = checks.iter().all(|c| c.passed);
    if json {
        print_json(&json!({ "passed": passed, "fast": args.fast, "checks": checks }));
    }
    Ok(if passed { 0 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(Failure::from(Error::Inconsistent).code, 1);
        assert_eq!(Failure::from(Error::NoVerdict).code, 1);
        assert_eq!(Failure::from(Error::CeilingExceeded { ceiling: 3 }).code, 1);
        assert_eq!(Failure::from(Error::TooLarge("n".into())).code, 2);
        assert_eq!(Failure::from(Error::Precondition("k".into())).code, 2);
    }

    #[test]
    fn labels() {
        assert_eq!(label(Model::Yn, 3, 6), "q_3(6)");
        assert_eq!(label(Model::Pairing, 3, 7), "q^p_3(7)");
    }
}
