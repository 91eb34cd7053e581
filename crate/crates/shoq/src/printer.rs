//! Writes knowledge bases back in the text format read by [`crate::parser`].
//!
//! TBox members are stored as global concepts, so each prints as
//! `tbox top sub C`. Internal residual forms have no text syntax.

use std::fmt::Write;

use shoq_core::syntax::Formula;
use shoq_core::{Concept, KnowledgeBase, RoleAxiom};

/// Text form of an input concept. `None` if it contains an internal form.
pub fn concept_text(c: &Concept) -> Option<String> {
    let mut out = String::new();
    write_concept(c, &mut out).then_some(out)
}

fn write_concept(c: &Concept, out: &mut String) -> bool {
    match c {
        Concept::Top => out.push_str("top"),
        Concept::Bot => out.push_str("bot"),
        Concept::Atomic(a) => out.push_str(a.as_str()),
        Concept::NegAtomic(a) => {
            let _ = write!(out, "not {a}");
        }
        Concept::Nominal(a) => {
            let _ = write!(out, "one {a}");
        }
        Concept::NegNominal(a) => {
            let _ = write!(out, "not one {a}");
        }
        Concept::And(l, r) | Concept::Or(l, r) => {
            let op = if matches!(c, Concept::And(..)) { " and " } else { " or " };
            out.push('(');
            let ok = write_concept(l, out);
            out.push_str(op);
            let ok = ok && write_concept(r, out);
            out.push(')');
            return ok;
        }
        Concept::Exists(r, c) => {
            let _ = write!(out, "some {r} ");
            return write_concept(c, out);
        }
        Concept::Forall(r, c) => {
            let _ = write!(out, "only {r} ");
            return write_concept(c, out);
        }
        Concept::AtLeast(n, r, c) => {
            let _ = write!(out, "atleast {n} {r} ");
            return write_concept(c, out);
        }
        Concept::AtMost(n, r, c) => {
            let _ = write!(out, "atmost {n} {r} ");
            return write_concept(c, out);
        }
        Concept::PrecEq(..) | Concept::SuccEq(..) => return false,
    }
    true
}

/// Prints `kb` as parser input: RBox axioms in input order, then the TBox,
/// then the ABox, each in canonical order.
pub fn print_kb(kb: &KnowledgeBase) -> String {
    let mut out = String::new();
    for ax in kb.role_axioms() {
        let _ = match ax {
            RoleAxiom::Sub(r, s) => writeln!(out, "rbox {r} sub {s}"),
            RoleAxiom::Trans(r) => writeln!(out, "rbox trans {r}"),
        };
    }
    for c in kb.tbox() {
        let text = concept_text(c).expect("validated KBs have no internal forms");
        let _ = writeln!(out, "tbox top sub {text}");
    }
    if kb.is_augmented() {
        return out;
    }
    for f in kb.abox() {
        let _ = match f {
            Formula::Instance(a, c) => {
                let text = concept_text(c).expect("validated KBs have no internal forms");
                writeln!(out, "abox {a} : {text}")
            }
            Formula::RoleAssertion(r, a, b) => writeln!(out, "abox {r}({a}, {b})"),
            Formula::NotEq(a, b) => writeln!(out, "abox {a} != {b}"),
            other => unreachable!("validated KBs never contain {other}"),
        };
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_kb;

    #[test]
    fn concept_forms() {
        let c = Concept::and(
            Concept::or(Concept::NegAtomic("A".into()), Concept::NegNominal("a".into())),
            Concept::at_most(2, "r", Concept::exists("s", Concept::Top)),
        );
        assert_eq!(concept_text(&c).unwrap(), "((not A or not one a) and atmost 2 r some s top)");
        assert_eq!(concept_text(&Concept::SuccEq(1, "r".into(), Concept::Top.into())), None);
    }

    #[test]
    fn prints_every_section() {
        let text = "rbox r sub s\nrbox trans s\ntbox top sub only r A\nabox a : one b\nabox r(a, b)\nabox a != b\n";
        assert_eq!(print_kb(&parse_kb(text).unwrap()), text);
    }

    #[test]
    fn augmented_abox_is_not_printed() {
        let kb = parse_kb("tbox A sub B").unwrap();
        assert_eq!(print_kb(&kb), "tbox top sub (not A or B)\n");
        assert_eq!(parse_kb(&print_kb(&kb)).unwrap(), kb);
    }
}
