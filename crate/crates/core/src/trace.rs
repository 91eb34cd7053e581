//! Rule-application trace.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::{self, Write};

use crate::graph::{EdgeLabel, Label, NodeId, NodeType, SType, Status};
use crate::ilp::{Problem, Sense};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    Init,
    Us1,
    Us2,
    Us3,
    Dn,
    Nus(u8),
    Fs,
    Tp,
    Tf,
    Ups1,
    Ups2,
    Ups3(u8),
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Init => f.write_str("Init"),
            Rule::Us1 => f.write_str("US1"),
            Rule::Us2 => f.write_str("US2"),
            Rule::Us3 => f.write_str("US3"),
            Rule::Dn => f.write_str("DN"),
            Rule::Nus(k) => write!(f, "NUS.{k}"),
            Rule::Fs => f.write_str("FS"),
            Rule::Tp => f.write_str("TP"),
            Rule::Tf => f.write_str("TF"),
            Rule::Ups1 => f.write_str("UPS1"),
            Rule::Ups2 => f.write_str("UPS2"),
            Rule::Ups3(k) => write!(f, "UPS3.{k}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Event {
    /// A rule was applied to `node`; `targets` lists connected successors
    /// and whether each was freshly created.
    Applied {
        rule: Rule,
        node: NodeId,
        targets: Vec<(NodeId, bool)>,
    },
    Created {
        node: NodeId,
        ty: NodeType,
        stype: SType,
        label: Label,
    },
    Status {
        rule: Rule,
        node: NodeId,
        from: Status,
        to: Status,
    },
    EdgeDeleted {
        from: NodeId,
        to: NodeId,
    },
    BecameState {
        node: NodeId,
    },
    Constraints {
        node: NodeId,
        vars: Vec<(NodeId, EdgeLabel)>,
        problem: Problem,
    },
}

/// Names variables `x{w}` after their target node, with a suffix when one
/// node is the target of several variables.
pub fn var_names(vars: &[(NodeId, EdgeLabel)]) -> Vec<String> {
    let mut count: BTreeMap<NodeId, usize> = BTreeMap::new();
    for (w, _) in vars {
        *count.entry(*w).or_default() += 1;
    }
    let mut seen: BTreeMap<NodeId, usize> = BTreeMap::new();
    vars.iter()
        .map(|(w, _)| {
            if count[w] == 1 {
                alloc::format!("x{w}")
            } else {
                let k = seen.entry(*w).or_default();
                *k += 1;
                alloc::format!("x{w}_{k}")
            }
        })
        .collect()
}

/// Renders a system with the given variable names, one constraint per line.
pub fn render_system(names: &[String], problem: &Problem, out: &mut String) {
    for name in names {
        let _ = writeln!(out, "  {name} >= 0");
    }
    for c in &problem.constraints {
        out.push_str("  ");
        for (i, &j) in c.vars.iter().enumerate() {
            if i > 0 {
                out.push_str(" + ");
            }
            out.push_str(&names[j]);
        }
        if c.vars.is_empty() {
            out.push('0');
        }
        let _ = match c.sense {
            Sense::Ge => writeln!(out, " >= {}", c.bound),
            Sense::Le => writeln!(out, " <= {}", c.bound),
            Sense::Eq0 => writeln!(out, " = 0"),
        };
    }
}

fn write_label(label: &Label, out: &mut String) {
    out.push('{');
    for (i, f) in label.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{f}");
    }
    out.push('}');
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        match self {
            Event::Applied { rule, node, targets } => {
                let _ = write!(s, "{rule} v{node}");
                for (i, (w, fresh)) in targets.iter().enumerate() {
                    s.push_str(if i == 0 { " -> " } else { ", " });
                    let _ = write!(s, "v{w}{}", if *fresh { "" } else { " (cached)" });
                }
            }
            Event::Created { node, ty, stype, label } => {
                let ty = match ty {
                    NodeType::State => "state",
                    NodeType::NonState => "non-state",
                };
                let stype = match stype {
                    SType::Complex => "complex",
                    SType::Simple => "simple",
                };
                let _ = write!(s, "  v{node} {stype} {ty} ");
                write_label(label, &mut s);
            }
            Event::Status { rule, node, from, to } => {
                let _ = write!(s, "{rule} v{node}: {from} -> {to}");
            }
            Event::EdgeDeleted { from, to } => {
                let _ = write!(s, "  delete edge v{from} -> v{to}");
            }
            Event::BecameState { node } => {
                let _ = write!(s, "  v{node} becomes a state");
            }
            Event::Constraints { node, vars, problem } => {
                let names = var_names(vars);
                let _ = writeln!(s, "  ILConstraints(v{node}):");
                for (name, (w, e)) in names.iter().zip(vars) {
                    let _ = writeln!(s, "  {name} = (v{w}, {e})");
                }
                render_system(&names, problem, &mut s);
                s.pop();
            }
        }
        f.write_str(&s)
    }
}

/// An ordered event log. Recording is a no-op unless enabled.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    enabled: bool,
    events: Vec<Event>,
}

impl Trace {
    pub fn new(enabled: bool) -> Self {
        Trace { enabled, events: Vec::new() }
    }

    pub fn enabled(&self) -> bool {
        self.enabled
    }

    pub fn push(&mut self, e: impl FnOnce() -> Event) {
        if self.enabled {
            self.events.push(e());
        }
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for e in &self.events {
            let _ = writeln!(s, "{e}");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::EdgeKind;
    use crate::ilp::Constraint;
    use crate::syntax::Role;

    fn cf(w: NodeId) -> (NodeId, EdgeLabel) {
        (w, EdgeLabel { kind: EdgeKind::CheckingFeasibility, roles: [Role::new("r")].into(), ind: None })
    }

    #[test]
    fn names_follow_targets() {
        let vars = [cf(5), cf(6), cf(6)];
        assert_eq!(var_names(&vars), ["x5", "x6_1", "x6_2"]);
    }

    #[test]
    fn renders_system() {
        let mut p = Problem::new(2);
        p.push(Constraint::ge([0, 1], 2)).push(Constraint::le([1], 3)).push(Constraint::eq0(0));
        let mut out = String::new();
        render_system(&["x5".into(), "x7".into()], &p, &mut out);
        assert_eq!(out, "  x5 >= 0\n  x7 >= 0\n  x5 + x7 >= 2\n  x7 <= 3\n  x5 = 0\n");
    }

    #[test]
    fn disabled_trace_records_nothing() {
        let mut t = Trace::new(false);
        t.push(|| Event::EdgeDeleted { from: 1, to: 2 });
        assert!(t.events().is_empty());
    }
}
