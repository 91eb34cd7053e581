//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

use common::{CORPUS_STEP_BUDGET, KbShape, corpus, invariant_violation, random_kb};
use shoq::oracle::{OracleAnswer, brute_force_sat};
use shoq::{check, parse_kb};
use shoq_core::extract::extract_model;
use shoq_core::graph::Status;
use shoq_core::ilp::{self, Constraint, Feasibility, Problem};
use shoq_core::{Concept, EngineConfig, Formula, Individual, KnowledgeBase, Verdict, run};

const EXAMPLE_TIME_LIMIT: Duration = Duration::from_secs(1);
const ILP_TIME_LIMIT: Duration = Duration::from_secs(30);
const SAT_SUITE_TIME_LIMIT: Duration = Duration::from_secs(300);

const ILP_INSTANCES: usize = 1000;
const ILP_MAX_VARS: usize = 6;
const ILP_MAX_CONSTRAINTS: usize = 5;
const ILP_MAX_BOUND: u32 = 5;
/// Per-variable cap for the exhaustive reference, well above any bound.
const GENEROUS_CAP: u32 = 10;

const RANDOM_KBS: u64 = 500;
const ORACLE_DOMAIN: usize = 4;

const FAMILY_MAX_N: u32 = 20;

type Outcome = Result<String, String>;

fn traced() -> EngineConfig {
    EngineConfig { trace: true, ..EngineConfig::default() }
}

fn corpus_kb(name: &str) -> KnowledgeBase {
    let (_, text) = corpus().into_iter().find(|(n, _)| n == name).expect("corpus file");
    parse_kb(&text).unwrap()
}

fn require(cond: bool, what: &str) -> Result<(), String> {
    if cond { Ok(()) } else { Err(what.to_string()) }
}

fn within(start: Instant, limit: Duration) -> Result<Duration, String> {
    let t = start.elapsed();
    require(t < limit, &format!("took {t:?}, limit {limit:?}"))?;
    Ok(t)
}

fn example_one() -> Outcome {
    let kb = corpus_kb("example1.kb");
    require(kb.abox().len() == 8, "ABox should hold 8 formulas")?;
    let start = Instant::now();
    let out = run(&kb, &traced()).map_err(|e| e.to_string())?;
    let t = within(start, EXAMPLE_TIME_LIMIT)?;
    require(out.verdict == Verdict::Unsatisfiable, "expected UNSAT")?;
    let trace = out.trace.render();
    let has = |s: &str| require(trace.contains(s), &format!("trace lacks `{s}`"));
    has("UPS1 v3: unexpanded -> closed")?;
    let v4 = trace.lines().find(|l| l.trim_start().starts_with("v4 complex state")).ok_or("no state v4")?;
    for residual in ["a:⪰1 r.∃r.(A ⊔ {a})", "a:⪰2 r.∀r.¬A", "a:⪯2 r.B"] {
        require(v4.contains(residual), &format!("v4 lacks {residual}"))?;
    }
    has("TF v4 -> v5, v6, v7")?;
    has("  x5 + x7 >= 1\n  x6 + x7 >= 2\n")?;
    has("  x5 + x6 + x7 <= 2\n")?;
    has("UPS3.3 v4: f-expanded -> closed-wrt({v4})\nUPS1 v4: closed-wrt({v4}) -> closed\n")?;
    Ok(format!("{} nodes, {t:?}", out.graph.len()))
}

fn example_two() -> Outcome {
    let kb = corpus_kb("example2.kb");
    let start = Instant::now();
    let out = run(&kb, &traced()).map_err(|e| e.to_string())?;
    let ex = extract_model(&kb, &out).map_err(|e| e.to_string())?;
    ex.model.check_model(&kb).map_err(|e| e.to_string())?;
    let t = within(start, EXAMPLE_TIME_LIMIT)?;
    require(out.verdict == Verdict::Satisfiable, "expected SAT")?;
    let trace = out.trace.render();
    let has = |s: &str| require(trace.contains(s), &format!("trace lacks `{s}`"));
    has("DN v2 -> v14, v15")?;
    has("TF v16 -> v5 (cached), v6 (cached), v7 (cached)")?;
    let g = &out.graph;
    let a = Individual::new("a");
    let with = |v: usize, c: Concept| g.node(v).label.contains(&Formula::Instance(a.clone(), c));
    require(with(14, Concept::NegAtomic("A".into())), "v14 lacks a:¬A")?;
    require(with(15, Concept::atomic("A")), "v15 lacks a:A")?;
    require(g.node(15).status == Status::Closed, "the a:A branch stays undecided")?;
    Ok(format!("model with {} elements, {t:?}", ex.model.domain))
}

fn random_problem(rng: &mut StdRng) -> Problem {
    let n = rng.random_range(1..=ILP_MAX_VARS);
    let mut p = Problem::new(n);
    for _ in 0..rng.random_range(1..=ILP_MAX_CONSTRAINTS) {
        let vars: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.5)).collect();
        let vars = if vars.is_empty() { vec![rng.random_range(0..n)] } else { vars };
        let bound = rng.random_range(0..=ILP_MAX_BOUND);
        p.push(match rng.random_range(0..5) {
            0 | 1 => Constraint::ge(vars, bound),
            2 | 3 => Constraint::le(vars, bound),
            _ => Constraint::eq0(vars[0]),
        });
    }
    p
}

fn ilp_instances() -> Vec<Problem> {
    let mut rng = StdRng::seed_from_u64(7);
    (0..ILP_INSTANCES).map(|_| random_problem(&mut rng)).collect()
}

fn ilp_differential(problems: &[Problem]) -> Outcome {
    let start = Instant::now();
    let (mut lemma1, mut lemma2, mut feasible) = (0, 0, 0);
    for (i, p) in problems.iter().enumerate() {
        let res = ilp::check_feasibility(p).map_err(|e| format!("instance {i}: {e}"))?;
        if let Feasibility::Feasible(x) = &res {
            require(p.satisfied_by(x), &format!("instance {i}: witness violates a constraint"))?;
            feasible += 1;
        }
        let expected = ilp::oracle_enumerate(p, GENEROUS_CAP);
        require(res.is_feasible() == expected, &format!("instance {i}: enumeration says {expected}\n{p:?}"))?;
        if let Ok(b) = ilp::oracle_lemma1(p, ILP_MAX_BOUND) {
            require(b == expected, &format!("instance {i}: distribution oracle says {b}"))?;
            lemma1 += 1;
        }
        if let Ok(b) = ilp::oracle_lemma2(p, ILP_MAX_BOUND) {
            require(b == expected, &format!("instance {i}: upper-bound oracle says {b}"))?;
            lemma2 += 1;
        }
    }
    let t = within(start, ILP_TIME_LIMIT)?;
    Ok(format!("{} instances ({feasible} feasible), {lemma1}/{lemma2} oracle comparisons, {t:?}", problems.len()))
}

fn cap_validation(problems: &[Problem]) -> Outcome {
    let mut checked = 0;
    for (i, p) in problems.iter().enumerate() {
        if ilp::oracle_enumerate(p, GENEROUS_CAP) {
            checked += 1;
            require(ilp::oracle_enumerate(p, p.derived_cap()), &format!("instance {i}: no solution within the cap"))?;
        }
    }
    Ok(format!("{checked} feasible instances, 0 counterexamples"))
}

/// Criteria 5 and 6 share the random KBs.
struct RandomSuite {
    differential: Outcome,
    invariants: Result<usize, String>,
}

fn random_suite() -> RandomSuite {
    let start = Instant::now();
    let shape = KbShape::default();
    let (mut sat, mut witnesses) = (0, 0);
    let mut invariants: Result<usize, String> = Ok(0);
    let mut failure = None;
    for seed in 0..RANDOM_KBS {
        let text = random_kb(seed, &shape);
        let kb = parse_kb(&text).unwrap();
        let checked = match check(&kb, &EngineConfig::default()) {
            Ok(c) => c,
            Err(e) => {
                failure.get_or_insert(format!("seed {seed}: {e}\n{text}"));
                continue;
            }
        };
        if let Ok(n) = &mut invariants {
            match invariant_violation(&kb, &checked.outcome) {
                None => *n += 1,
                Some(v) => invariants = Err(format!("seed {seed}: {v}")),
            }
        }
        if checked.verdict() == Verdict::Satisfiable {
            sat += 1;
        }
        match brute_force_sat(&kb, ORACLE_DOMAIN) {
            Ok(OracleAnswer::SatWitness(_)) => {
                witnesses += 1;
                if checked.verdict() != Verdict::Satisfiable {
                    failure.get_or_insert(format!("seed {seed}: bounded model exists but the answer is UNSAT\n{text}"));
                }
            }
            Ok(OracleAnswer::NoModelUpTo(_)) => {}
            Err(e) => {
                failure.get_or_insert(format!("seed {seed}: oracle failed: {e}"));
            }
        }
    }
    let differential = match (failure, within(start, SAT_SUITE_TIME_LIMIT)) {
        (Some(f), _) => Err(f),
        (None, Err(e)) => Err(e),
        (None, Ok(t)) => {
            Ok(format!("{RANDOM_KBS} KBs, {sat} SAT with verified models, {witnesses} bounded witnesses, {t:?}"))
        }
    };
    RandomSuite { differential, invariants }
}

fn structural(random: Result<usize, String>) -> Outcome {
    let mut n = 0;
    for (name, text) in corpus() {
        let kb = parse_kb(&text).unwrap();
        let out = run(&kb, &EngineConfig::default()).map_err(|e| format!("{name}: {e}"))?;
        if let Some(v) = invariant_violation(&kb, &out) {
            return Err(format!("{name}: {v}"));
        }
        n += 1;
    }
    let random = random?;
    Ok(format!("{n} corpus runs and {random} random runs"))
}

fn determinism() -> Outcome {
    let files = corpus();
    for (name, text) in &files {
        let kb = parse_kb(text).unwrap();
        let first = run(&kb, &traced()).map_err(|e| e.to_string())?.trace.render();
        let second = run(&kb, &traced()).map_err(|e| e.to_string())?.trace.render();
        require(first == second, &format!("{name}: traces differ"))?;
    }
    Ok(format!("{} corpus files", files.len()))
}

fn termination() -> Outcome {
    let config = EngineConfig { max_steps: Some(CORPUS_STEP_BUDGET), ..EngineConfig::default() };
    let mut most = 0;
    for (name, text) in corpus() {
        let out = run(&parse_kb(&text).unwrap(), &config).map_err(|e| format!("{name}: {e}"))?;
        most = most.max(out.stats.steps);
    }
    let mut vars = Vec::new();
    for n in 1..=FAMILY_MAX_N {
        let text = format!(
            "abox a : atleast {n} r A\nabox a : atleast {n} r B\nabox a : atmost {n} r top\nabox a : only r some r C\n"
        );
        let out = run(&parse_kb(&text).unwrap(), &EngineConfig::default()).map_err(|e| format!("n = {n}: {e}"))?;
        require(out.verdict == Verdict::Satisfiable, &format!("n = {n}: expected SAT"))?;
        vars.push(out.stats.max_ilp_vars);
    }
    // Cloning successors per unit of n would grow the counts with n.
    require(vars.iter().all(|&v| v <= vars[0]), &format!("ILP variables grow with n: {vars:?}"))?;
    Ok(format!(
        "corpus needs at most {most} of {CORPUS_STEP_BUDGET} steps; ILP variables for n = 1..{FAMILY_MAX_N}: {vars:?}"
    ))
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |id: u32, title: &str, outcome: Outcome| match outcome {
        Ok(detail) => println!("PASS {id} {title}: {detail}"),
        Err(why) => {
            failed += 1;
            println!("FAIL {id} {title}: {why}");
        }
    };
    report(1, "worked example, unsatisfiable", example_one());
    report(2, "worked example, satisfiable", example_two());
    let problems = ilp_instances();
    report(3, "integer feasibility differential", ilp_differential(&problems));
    report(4, "minimal solution cap", cap_validation(&problems));
    let suite = random_suite();
    report(5, "random KBs against bounded models", suite.differential);
    report(6, "structural invariants", structural(suite.invariants));
    report(7, "deterministic traces", determinism());
    report(8, "termination ceiling and ILP growth", termination());
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
