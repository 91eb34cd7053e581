use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use shoq::oracle::{OracleAnswer, brute_force_sat};
use shoq::{dot, parse_kb, verify};
use shoq_core::{EngineConfig, EngineError, KnowledgeBase, Verdict, run};

const SAT: u8 = 0;
const UNSAT: u8 = 1;
const INPUT_ERROR: u8 = 2;
const INCONCLUSIVE: u8 = 3;

/// Decide satisfiability of a SHOQ knowledge base.
#[derive(Parser, Debug)]
#[command(version)]
struct Args {
    /// Knowledge base file.
    input: PathBuf,
    /// Print every rule application and status change.
    #[arg(long)]
    trace: bool,
    /// Write a verified model here when satisfiable.
    #[arg(long, value_name = "FILE")]
    model: Option<PathBuf>,
    /// Write the final tableau graph in Graphviz format.
    #[arg(long, value_name = "FILE")]
    dot: Option<PathBuf>,
    /// Print graph size, rule counts and integer feasibility calls.
    #[arg(long)]
    stats: bool,
    /// Search-node budget per integer feasibility check.
    #[arg(long, value_name = "N", default_value_t = shoq_core::ilp::DEFAULT_NODE_BUDGET,
          value_parser = clap::value_parser!(u64).range(1..))]
    ilp_node_budget: u64,
    /// Give up after this many expansion steps.
    #[arg(long, value_name = "N")]
    max_steps: Option<u64>,
    /// Cross-check the answer by bounded model search (small inputs only).
    #[arg(long)]
    oracle_check: bool,
}

fn oracle_applies(kb: &KnowledgeBase) -> bool {
    kb.individuals().len() <= 3 && kb.roles().count() <= 2
}

fn print_stats(s: &shoq_core::engine::Stats) {
    println!("nodes: {}", s.nodes);
    println!("edges: {}", s.edges);
    println!("steps: {}", s.steps);
    println!("cache hits: {}", s.cache_hits);
    println!("ilp calls: {} ({} memoized)", s.ilp_checks, s.ilp_memo_hits);
    println!("max ilp variables: {}", s.max_ilp_vars);
    for (rule, n) in &s.rules {
        println!("rule {rule}: {n}");
    }
}

fn write_file(path: &PathBuf, text: &str) -> Result<(), u8> {
    std::fs::write(path, text).map_err(|e| {
        eprintln!("error: cannot write {}: {e}", path.display());
        INPUT_ERROR
    })
}

fn main_inner(args: Args) -> Result<u8, u8> {
    let text = std::fs::read_to_string(&args.input).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", args.input.display());
        INPUT_ERROR
    })?;
    let kb = parse_kb(&text).map_err(|e| {
        eprintln!("error: {}: {e}", args.input.display());
        INPUT_ERROR
    })?;
    let config = EngineConfig { ilp_node_budget: args.ilp_node_budget, max_steps: args.max_steps, trace: args.trace };
    let outcome = match run(&kb, &config) {
        Ok(o) => o,
        Err(e @ (EngineError::IlpBudget { .. } | EngineError::StepLimit { .. })) => {
            eprintln!("inconclusive: {e}");
            return Err(INCONCLUSIVE);
        }
        Err(e) => {
            eprintln!("inconclusive: internal defect: {e}");
            return Err(INCONCLUSIVE);
        }
    };
    if args.trace {
        print!("{}", outcome.trace.render());
    }
    if let Some(path) = &args.dot {
        write_file(path, &dot::to_dot(&outcome.graph))?;
    }
    let checked = verify(&kb, outcome).map_err(|e| {
        eprintln!("inconclusive: internal defect: {e}");
        INCONCLUSIVE
    })?;
    let outcome = &checked.outcome;
    if args.oracle_check {
        if oracle_applies(&kb) {
            match brute_force_sat(&kb, 4) {
                Ok(OracleAnswer::SatWitness(_)) if outcome.verdict == Verdict::Unsatisfiable => {
                    eprintln!("inconclusive: internal defect: bounded search found a model of an UNSAT answer");
                    return Err(INCONCLUSIVE);
                }
                Ok(OracleAnswer::SatWitness(i)) => eprintln!("oracle: model with {} elements", i.domain),
                Ok(OracleAnswer::NoModelUpTo(k)) => eprintln!("oracle: no model with at most {k} elements"),
                Err(e) => eprintln!("oracle: skipped ({e})"),
            }
        } else {
            eprintln!("oracle: skipped (input too large)");
        }
    }
    let code = match outcome.verdict {
        Verdict::Satisfiable => {
            let ex = checked.extraction.as_ref().expect("satisfiable runs carry a verified model");
            if let Some(path) = &args.model {
                write_file(path, &ex.model.to_string())?;
            }
            println!("SAT");
            SAT
        }
        Verdict::Unsatisfiable => {
            println!("UNSAT");
            UNSAT
        }
    };
    if args.stats {
        print_stats(&outcome.stats);
    }
    Ok(code)
}

fn main() -> ExitCode {
    let args = Args::parse();
    ExitCode::from(main_inner(args).unwrap_or_else(|code| code))
}
