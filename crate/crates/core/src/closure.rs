//! The finite formula set every tableau label is drawn from.

use alloc::collections::BTreeSet;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::kb::KnowledgeBase;
use crate::syntax::{Concept, Formula, Individual, Role};

/// A closure set together with the parameters it was built from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureSet {
    pub formulas: BTreeSet<Formula>,
    /// The size measure `N` used for the `⪯`/`⪰` counters.
    pub size: usize,
}

impl ClosureSet {
    pub fn contains(&self, f: &Formula) -> bool {
        self.formulas.contains(f)
    }

    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    /// Concepts appearing as `C` (untagged) members.
    pub fn concepts(&self) -> impl Iterator<Item = &Concept> {
        self.formulas.iter().filter_map(|f| match f {
            Formula::ConceptOnly(c) => Some(c),
            _ => None,
        })
    }
}

/// The smallest set closed under the eleven closure items.
pub fn closure(kb: &KnowledgeBase) -> ClosureSet {
    build(kb, false)
}

/// Like [`closure`] but additionally closed under renaming one individual
/// into another inside concepts, which merges produce.
pub fn closure_with_renaming(kb: &KnowledgeBase) -> ClosureSet {
    build(kb, true)
}

fn build(kb: &KnowledgeBase, renaming: bool) -> ClosureSet {
    let n = kb.size();
    let inds: Vec<Individual> = kb.individuals().to_vec();
    let roles: Vec<Role> = kb.roles().cloned().collect();
    let rbox = kb.rbox();

    let mut concepts: BTreeSet<Concept> = BTreeSet::new();
    let mut todo: Vec<Concept> = Vec::new();
    let seed = |c: &Concept, todo: &mut Vec<Concept>| c.visit(&mut |d| todo.push(d.clone()));
    for c in kb.tbox() {
        seed(c, &mut todo);
    }
    for f in kb.abox() {
        if let Some(c) = f.concept() {
            seed(c, &mut todo);
        }
    }
    for r in &roles {
        for a in &inds {
            todo.push(Concept::AtMost(1, r.clone(), Arc::new(Concept::Nominal(a.clone()))));
        }
    }

    while let Some(c) = todo.pop() {
        if !concepts.insert(c.clone()) {
            continue;
        }
        if !c.is_internal() {
            todo.push(c.negate().expect("checked not internal"));
        }
        match &c {
            Concept::Forall(s, d) => {
                for r in rbox.subs(s) {
                    todo.push(Concept::Forall(r.clone(), d.clone()));
                }
            }
            Concept::AtMost(0, s, d) => {
                todo.push(Concept::Forall(s.clone(), Arc::new(d.negate().expect("input concept"))));
            }
            Concept::Exists(r, d) if kb.is_numeric(r) => {
                todo.push(Concept::SuccEq(1, r.clone(), d.clone()));
            }
            _ => {}
        }
        match &c {
            Concept::AtLeast(k, r, d) => {
                for m in 0..=(*k as usize).min(n) {
                    if (m as u32) < *k {
                        todo.push(Concept::SuccEq(k - m as u32, r.clone(), d.clone()));
                    }
                }
            }
            Concept::AtMost(k, r, d) => {
                for m in 0..=(*k as usize).min(n) {
                    todo.push(Concept::PrecEq(k - m as u32, r.clone(), d.clone()));
                }
            }
            _ => {}
        }
        if renaming && c.has_nominal() {
            for from in &inds {
                for to in &inds {
                    if from != to {
                        todo.push(c.map_individuals(&|x| if x == from { to.clone() } else { x.clone() }));
                    }
                }
            }
        }
    }

    let mut formulas: BTreeSet<Formula> = kb.abox().clone();
    for c in &concepts {
        formulas.insert(Formula::ConceptOnly(c.clone()));
        for a in &inds {
            formulas.insert(Formula::Instance(a.clone(), c.clone()));
        }
    }
    for a in &inds {
        for b in &inds {
            formulas.insert(Formula::Eq(a.clone(), b.clone()));
            formulas.insert(Formula::NotEq(a.clone(), b.clone()));
            for r in &roles {
                formulas.insert(Formula::RoleAssertion(r.clone(), a.clone(), b.clone()));
                formulas.insert(Formula::NegRoleAssertion(r.clone(), a.clone(), b.clone()));
            }
        }
    }
    ClosureSet { formulas, size: n }
}

/// Checks each closure item directly; returns the first item number that fails.
pub fn check_closure_properties(kb: &KnowledgeBase, set: &ClosureSet) -> Result<(), usize> {
    let inds = kb.individuals();
    let roles: Vec<&Role> = kb.roles().collect();
    let has = |c: Concept| set.contains(&Formula::ConceptOnly(c));
    let mut all_sub = true;
    let mut check_sub = |c: &Concept| c.visit(&mut |d| all_sub &= set.contains(&Formula::ConceptOnly(d.clone())));
    for c in kb.tbox() {
        check_sub(c);
    }
    for f in kb.abox() {
        if let Some(c) = f.concept() {
            check_sub(c);
        }
    }
    if !all_sub {
        return Err(1);
    }
    for r in &roles {
        for a in inds {
            if !has(Concept::AtMost(1, (*r).clone(), Arc::new(Concept::Nominal(a.clone())))) {
                return Err(2);
            }
        }
    }
    let n = set.size;
    for c in set.concepts() {
        match c {
            Concept::Forall(s, d) => {
                if kb.rbox().subs(s).any(|r| !has(Concept::Forall(r.clone(), d.clone()))) {
                    return Err(3);
                }
            }
            Concept::AtMost(0, s, d) if !has(Concept::Forall(s.clone(), Arc::new(d.negate().unwrap()))) => {
                return Err(4);
            }
            Concept::Exists(r, d) if kb.is_numeric(r) && !has(Concept::SuccEq(1, r.clone(), d.clone())) => {
                return Err(6);
            }
            Concept::AtLeast(k, r, d) => {
                let missing = (0..=n.min(*k as usize))
                    .filter(|m| (*m as u32) < *k)
                    .any(|m| !has(Concept::SuccEq(k - m as u32, r.clone(), d.clone())));
                if missing {
                    return Err(7);
                }
            }
            _ => {}
        }
        if let Concept::AtMost(k, r, d) = c
            && (0..=n.min(*k as usize)).any(|m| !has(Concept::PrecEq(k - m as u32, r.clone(), d.clone())))
        {
            return Err(8);
        }
        if !c.is_internal() && !has(c.negate().unwrap()) {
            return Err(5);
        }
        if inds.iter().any(|a| !set.contains(&Formula::Instance(a.clone(), c.clone()))) {
            return Err(9);
        }
    }
    if kb.abox().iter().any(|f| !set.contains(f)) {
        return Err(8);
    }
    for a in inds {
        for b in inds {
            if !set.contains(&Formula::Eq(a.clone(), b.clone())) || !set.contains(&Formula::NotEq(a.clone(), b.clone()))
            {
                return Err(10);
            }
            for r in &roles {
                let pos = Formula::RoleAssertion((*r).clone(), a.clone(), b.clone());
                let neg = Formula::NegRoleAssertion((*r).clone(), a.clone(), b.clone());
                if !set.contains(&pos) || !set.contains(&neg) {
                    return Err(11);
                }
            }
        }
    }
    Ok(())
}
