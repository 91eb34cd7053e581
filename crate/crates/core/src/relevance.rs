//! Depth-0 occurrence analysis and the relevant `≤1 r.{a}` concepts.

use alloc::collections::BTreeSet;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::kb::RBoxClosure;
use crate::syntax::{Concept, Formula, Individual, Role};

/// Pushes `c` and everything reachable from it through `⊓`/`⊔`.
fn depth0<'a>(c: &'a Concept, out: &mut Vec<&'a Concept>) {
    out.push(c);
    if let Concept::And(l, r) | Concept::Or(l, r) = c {
        depth0(l, out);
        depth0(r, out);
    }
}

fn depth0_all<'a>(xs: impl IntoIterator<Item = &'a Concept>) -> Vec<&'a Concept> {
    let mut out = Vec::new();
    for x in xs {
        depth0(x, &mut out);
    }
    out
}

/// True iff `phi` occurs in some member of `xs` outside every negation,
/// quantifier and number restriction.
pub fn occurs_positively_depth0<'a>(phi: &Concept, xs: impl IntoIterator<Item = &'a Concept>) -> bool {
    depth0_all(xs).into_iter().any(|c| c == phi)
}

fn nominals_at_depth0<'a>(
    xs: impl IntoIterator<Item = &'a Concept>,
    negated_too: bool,
    out: &mut BTreeSet<Individual>,
) {
    for c in depth0_all(xs) {
        match c {
            Concept::Nominal(a) => {
                out.insert(a.clone());
            }
            Concept::NegNominal(a) if negated_too => {
                out.insert(a.clone());
            }
            _ => {}
        }
    }
}

/// The concepts `≤1 r.{a}` relevant w.r.t. `tbox` and `x`.
pub fn relevant_atmost_one(tbox: &[Concept], x: &[Concept], rbox: &RBoxClosure) -> BTreeSet<Concept> {
    relevant_in_scope(tbox, tbox, x, rbox)
}

/// Like [`relevant_atmost_one`], but the `∀`/`≤` nominal clauses look for
/// their concept in `scope` instead of only in the TBox.
pub fn relevant_in_scope(tbox: &[Concept], scope: &[Concept], x: &[Concept], rbox: &RBoxClosure) -> BTreeSet<Concept> {
    let dx = depth0_all(x);
    let dscope = depth0_all(scope);

    // (s1, C1, s2, C2) candidates from the first group of conditions.
    let mut witnesses = Vec::new();
    for c in &dx {
        if let Concept::AtLeast(m, s, d) = c
            && *m >= 2
        {
            witnesses.push((s, d, s, d));
        }
    }
    fn single(c: &Concept) -> Option<(&Role, &Arc<Concept>)> {
        match c {
            Concept::Exists(s, d) | Concept::AtLeast(1, s, d) => Some((s, d)),
            _ => None,
        }
    }
    let singles: Vec<_> = {
        let mut seen = BTreeSet::new();
        dx.iter().filter(|c| seen.insert(**c)).filter_map(|c| single(c).map(|w| (*c, w))).collect()
    };
    for (i, (c1, (s1, d1))) in singles.iter().enumerate() {
        for (c2, (s2, d2)) in &singles[i + 1..] {
            if c1 != c2 {
                witnesses.push((*s1, *d1, *s2, *d2));
            }
        }
    }

    let mut out = BTreeSet::new();
    let mut tbox_nominals = BTreeSet::new();
    nominals_at_depth0(tbox, false, &mut tbox_nominals);
    for (s1, c1, s2, c2) in witnesses {
        let mut nominals = tbox_nominals.clone();
        nominals_at_depth0([&**c1, &**c2], false, &mut nominals);
        for c in &dscope {
            match c {
                Concept::Forall(r, d) if rbox.is_sub(s1, r) && rbox.is_sub(s2, r) => {
                    nominals_at_depth0([&**d], false, &mut nominals);
                }
                Concept::AtMost(_, r, d) if rbox.is_sub(s1, r) && rbox.is_sub(s2, r) => {
                    nominals_at_depth0([&**d], true, &mut nominals);
                }
                _ => {}
            }
        }
        if nominals.is_empty() {
            continue;
        }
        for r in rbox.supers(s1) {
            if !rbox.is_sub(s2, r) {
                continue;
            }
            for a in &nominals {
                out.insert(Concept::AtMost(1, r.clone(), Arc::new(Concept::Nominal(a.clone()))));
            }
        }
    }
    out
}

/// The assertions `a:≤1 r.{b}` relevant w.r.t. `tbox` and `{C | a:C ∈ x}`.
pub fn assertion_relevant_atmost_one(
    tbox: &[Concept],
    x: &BTreeSet<Formula>,
    a: &Individual,
    rbox: &RBoxClosure,
) -> BTreeSet<Formula> {
    let concepts = concepts_of(x, a);
    relevant_atmost_one(tbox, &concepts, rbox).into_iter().map(|c| Formula::Instance(a.clone(), c)).collect()
}

/// `{C | a:C ∈ x}`.
pub fn concepts_of(x: &BTreeSet<Formula>, a: &Individual) -> Vec<Concept> {
    x.iter()
        .filter_map(|f| match f {
            Formula::Instance(b, c) if b == a => Some(c.clone()),
            _ => None,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::RoleAxiom;
    use crate::syntax::Role;
    use alloc::vec;

    fn rbox(roles: &[&str], axioms: &[RoleAxiom]) -> RBoxClosure {
        RBoxClosure::build(axioms, roles.iter().map(|r| Role::new(r)))
    }

    #[test]
    fn depth0_examples() {
        let a = Concept::atomic("A");
        assert!(occurs_positively_depth0(&a, &[Concept::and(a.clone(), Concept::atomic("B"))]));
        assert!(!occurs_positively_depth0(&a, &[Concept::exists("r", a.clone())]));
        let na = Concept::nominal("a");
        assert!(!occurs_positively_depth0(&na, &[Concept::at_least(2, "r", na.clone())]));
        assert!(occurs_positively_depth0(&na, core::slice::from_ref(&na)));
    }

    #[test]
    fn at_least_two_nominal_filler() {
        let x = vec![Concept::at_least(2, "r", Concept::nominal("a"))];
        let out = relevant_atmost_one(&[], &x, &rbox(&["r"], &[]));
        assert_eq!(out.into_iter().collect::<Vec<_>>(), vec![Concept::at_most(1, "r", Concept::nominal("a"))]);
    }

    #[test]
    fn disjunction_is_irrelevant() {
        let x = vec![Concept::or(Concept::atomic("A"), Concept::atomic("B"))];
        assert!(relevant_atmost_one(&[], &x, &rbox(&["r"], &[])).is_empty());
    }

    #[test]
    fn two_distinct_existentials() {
        let x = vec![Concept::exists("r", Concept::nominal("a")), Concept::at_least(1, "r", Concept::atomic("B"))];
        let out = relevant_atmost_one(&[], &x, &rbox(&["r"], &[]));
        assert_eq!(out.into_iter().collect::<Vec<_>>(), vec![Concept::at_most(1, "r", Concept::nominal("a"))]);
    }

    #[test]
    fn superroles_are_covered() {
        let rb = rbox(&["r", "s"], &[RoleAxiom::Sub(Role::new("r"), Role::new("s"))]);
        let x = vec![Concept::at_least(2, "r", Concept::nominal("a"))];
        let out = relevant_atmost_one(&[], &x, &rb);
        assert!(out.contains(&Concept::at_most(1, "s", Concept::nominal("a"))));
        assert!(out.contains(&Concept::at_most(1, "r", Concept::nominal("a"))));
    }

    #[test]
    fn forall_nominal_only_counts_in_scope() {
        let x = vec![Concept::at_least(2, "r", Concept::Top), Concept::forall("r", Concept::nominal("b"))];
        let rb = rbox(&["r"], &[]);
        assert!(relevant_atmost_one(&[], &x, &rb).is_empty());
        let out = relevant_in_scope(&[], &x, &x, &rb);
        assert!(out.contains(&Concept::at_most(1, "r", Concept::nominal("b"))));
    }

    #[test]
    fn assertion_variant() {
        let a = Individual::new("a");
        let rb = rbox(&["r"], &[]);
        let x: BTreeSet<_> = [Formula::Instance(a.clone(), Concept::at_least(2, "r", Concept::nominal("b")))].into();
        let out = assertion_relevant_atmost_one(&[], &x, &a, &rb);
        assert_eq!(
            out.into_iter().collect::<Vec<_>>(),
            vec![Formula::Instance(a.clone(), Concept::at_most(1, "r", Concept::nominal("b")))]
        );
        let y: BTreeSet<_> = [Formula::RoleAssertion(Role::new("r"), a.clone(), Individual::new("b"))].into();
        assert!(assertion_relevant_atmost_one(&[], &y, &a, &rb).is_empty());
        let z: BTreeSet<_> = [Formula::Instance(a.clone(), Concept::atomic("A"))].into();
        assert!(assertion_relevant_atmost_one(&[], &z, &a, &rb).is_empty());
    }
}
