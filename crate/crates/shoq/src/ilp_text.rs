//! Standalone text form of integer feasibility problems.
//!
//! One constraint per line: `x1 + x3 >= 2`, `x2 <= 1` or `x4 = 0`. Variables
//! are `x` followed by a 1-based index; the problem has as many variables as
//! the largest index used. `#` starts a comment.

use std::fmt::Write;

use shoq_core::ilp::{Constraint, Problem, Sense};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {msg}")]
pub struct IlpTextError {
    pub line: usize,
    pub msg: String,
}

fn var_index(tok: &str) -> Option<usize> {
    let k: usize = tok.strip_prefix('x')?.parse().ok()?;
    k.checked_sub(1)
}

pub fn parse_problem(text: &str) -> Result<Problem, IlpTextError> {
    let mut rows = Vec::new();
    let mut num_vars = 0;
    for (i, raw) in text.lines().enumerate() {
        let err = |msg: String| IlpTextError { line: i + 1, msg };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (lhs, op, rhs) = [">=", "<=", "="]
            .iter()
            .find_map(|op| line.split_once(op).map(|(l, r)| (l, *op, r)))
            .ok_or_else(|| err("expected `>=`, `<=` or `=`".into()))?;
        let vars = lhs
            .split('+')
            .map(|t| var_index(t.trim()).ok_or_else(|| err(format!("bad variable `{}`", t.trim()))))
            .collect::<Result<Vec<_>, _>>()?;
        let bound: u32 = rhs.trim().parse().map_err(|_| err(format!("bad bound `{}`", rhs.trim())))?;
        num_vars = vars.iter().fold(num_vars, |m, &j| m.max(j + 1));
        let c = match op {
            ">=" => Constraint::ge(vars, bound),
            "<=" => Constraint::le(vars, bound),
            _ if vars.len() == 1 && bound == 0 => Constraint::eq0(vars[0]),
            _ => return Err(err("`=` takes a single variable and bound 0".into())),
        };
        rows.push(c);
    }
    let mut p = Problem::new(num_vars);
    for c in rows {
        p.push(c);
    }
    Ok(p)
}

pub fn print_problem(p: &Problem) -> String {
    let mut out = String::new();
    for c in &p.constraints {
        let lhs: Vec<String> = c.vars.iter().map(|j| format!("x{}", j + 1)).collect();
        let op = match c.sense {
            Sense::Ge => ">=",
            Sense::Le => "<=",
            Sense::Eq0 => "=",
        };
        let _ = writeln!(out, "{} {op} {}", lhs.join(" + "), c.bound);
    }
    out
}
