//! Finite interpretations, their evaluation, and model graphs.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::kb::{KnowledgeBase, RoleAxiom};
use crate::syntax::{Concept, ConceptName, Formula, Individual, Role};

pub type Element = usize;
pub type Relation = BTreeSet<(Element, Element)>;

/// A finite interpretation over the domain `0..domain`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Interpretation {
    pub domain: usize,
    pub individuals: BTreeMap<Individual, Element>,
    pub concepts: BTreeMap<ConceptName, BTreeSet<Element>>,
    pub roles: BTreeMap<Role, Relation>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ModelViolation {
    #[error("the domain is empty")]
    EmptyDomain,
    #[error("individual {0} is not interpreted")]
    Unmapped(Individual),
    #[error("role inclusion {0} ⊑ {1} does not hold")]
    RoleInclusion(Role, Role),
    #[error("role {0} is not transitive")]
    NotTransitive(Role),
    #[error("element {element} violates the TBox concept {concept}")]
    TBox { concept: Concept, element: Element },
    #[error("assertion {0} does not hold")]
    Assertion(Formula),
}

impl Interpretation {
    pub fn role(&self, r: &Role) -> impl Iterator<Item = &(Element, Element)> {
        self.roles.get(r).into_iter().flatten()
    }

    fn successors(&self, r: &Role, x: Element) -> impl Iterator<Item = Element> + '_ {
        self.roles.get(r).into_iter().flat_map(move |rel| rel.range((x, 0)..=(x, usize::MAX)).map(|p| p.1))
    }

    fn ind(&self, a: &Individual) -> Option<Element> {
        self.individuals.get(a).copied()
    }

    /// The extension of `c`. Unknown individuals make nominals empty.
    pub fn extension(&self, c: &Concept) -> BTreeSet<Element> {
        let all = || (0..self.domain).collect::<BTreeSet<_>>();
        let count =
            |x: Element, r: &Role, ext: &BTreeSet<Element>| self.successors(r, x).filter(|y| ext.contains(y)).count();
        match c {
            Concept::Top => all(),
            Concept::Bot => BTreeSet::new(),
            Concept::Atomic(a) => self.concepts.get(a).cloned().unwrap_or_default(),
            Concept::NegAtomic(a) => {
                let ext = self.concepts.get(a).cloned().unwrap_or_default();
                all().difference(&ext).copied().collect()
            }
            Concept::Nominal(a) => self.ind(a).into_iter().collect(),
            Concept::NegNominal(a) => {
                let mut s = all();
                if let Some(x) = self.ind(a) {
                    s.remove(&x);
                }
                s
            }
            Concept::And(l, r) => self.extension(l).intersection(&self.extension(r)).copied().collect(),
            Concept::Or(l, r) => self.extension(l).union(&self.extension(r)).copied().collect(),
            Concept::Exists(r, d) => {
                let ext = self.extension(d);
                all().into_iter().filter(|&x| count(x, r, &ext) >= 1).collect()
            }
            Concept::Forall(r, d) => {
                let ext = self.extension(d);
                all().into_iter().filter(|&x| self.successors(r, x).all(|y| ext.contains(&y))).collect()
            }
            Concept::AtLeast(n, r, d) | Concept::SuccEq(n, r, d) => {
                let ext = self.extension(d);
                all().into_iter().filter(|&x| count(x, r, &ext) >= *n as usize).collect()
            }
            Concept::AtMost(n, r, d) | Concept::PrecEq(n, r, d) => {
                let ext = self.extension(d);
                all().into_iter().filter(|&x| count(x, r, &ext) <= *n as usize).collect()
            }
        }
    }

    pub fn satisfies(&self, f: &Formula) -> bool {
        let pair = |r: &Role, a: &Individual, b: &Individual| match (self.ind(a), self.ind(b)) {
            (Some(x), Some(y)) => Some(self.roles.get(r).is_some_and(|rel| rel.contains(&(x, y)))),
            _ => None,
        };
        match f {
            Formula::ConceptOnly(c) => self.extension(c).len() == self.domain,
            Formula::Instance(a, c) => self.ind(a).is_some_and(|x| self.extension(c).contains(&x)),
            Formula::RoleAssertion(r, a, b) => pair(r, a, b) == Some(true),
            Formula::NegRoleAssertion(r, a, b) => pair(r, a, b) == Some(false),
            Formula::Eq(a, b) => self.ind(a).is_some() && self.ind(a) == self.ind(b),
            Formula::NotEq(a, b) => self.ind(a).is_some() && self.ind(b).is_some() && self.ind(a) != self.ind(b),
        }
    }

    /// Checks that this is a model of the RBox, TBox and ABox of `kb`.
    pub fn check_model(&self, kb: &KnowledgeBase) -> Result<(), ModelViolation> {
        if self.domain == 0 {
            return Err(ModelViolation::EmptyDomain);
        }
        for a in kb.individuals() {
            if self.ind(a).is_none_or(|x| x >= self.domain) {
                return Err(ModelViolation::Unmapped(a.clone()));
            }
        }
        for ax in kb.role_axioms() {
            match ax {
                RoleAxiom::Sub(r, s) => {
                    if self.role(r).any(|p| !self.roles.get(s).is_some_and(|rel| rel.contains(p))) {
                        return Err(ModelViolation::RoleInclusion(r.clone(), s.clone()));
                    }
                }
                RoleAxiom::Trans(r) => {
                    for &(x, y) in self.role(r) {
                        if self.successors(r, y).any(|z| !self.roles[r].contains(&(x, z))) {
                            return Err(ModelViolation::NotTransitive(r.clone()));
                        }
                    }
                }
            }
        }
        for c in kb.tbox() {
            let ext = self.extension(c);
            if let Some(x) = (0..self.domain).find(|x| !ext.contains(x)) {
                return Err(ModelViolation::TBox { concept: c.clone(), element: x });
            }
        }
        for f in kb.abox() {
            if !self.satisfies(f) {
                return Err(ModelViolation::Assertion(f.clone()));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "domain: {}", self.domain)?;
        for (a, x) in &self.individuals {
            writeln!(f, "individual {a} = d{x}")?;
        }
        for (name, ext) in &self.concepts {
            write!(f, "concept {name} = {{")?;
            for (i, x) in ext.iter().enumerate() {
                write!(f, "{}d{x}", if i > 0 { ", " } else { "" })?;
            }
            writeln!(f, "}}")?;
        }
        for (r, rel) in &self.roles {
            write!(f, "role {r} = {{")?;
            for (i, (x, y)) in rel.iter().enumerate() {
                write!(f, "{}(d{x}, d{y})", if i > 0 { ", " } else { "" })?;
            }
            writeln!(f, "}}")?;
        }
        Ok(())
    }
}

/// `⟨Δ, I, C, E⟩` with `Δ = 0..labels.len()`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ModelGraph {
    pub individuals: BTreeMap<Individual, Element>,
    pub labels: Vec<BTreeSet<Concept>>,
    pub edges: BTreeMap<Role, Relation>,
}

/// A failed consistency or saturation condition, numbered 1 to 13.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionFailure {
    pub condition: u8,
    pub detail: String,
}

impl fmt::Display for ConditionFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "condition ({}) fails: {}", self.condition, self.detail)
    }
}

impl ModelGraph {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn add_element(&mut self, label: BTreeSet<Concept>) -> Element {
        self.labels.push(label);
        self.labels.len() - 1
    }

    pub fn add_edge(&mut self, r: &Role, x: Element, y: Element) {
        self.edges.entry(r.clone()).or_default().insert((x, y));
    }

    fn has_edge(&self, r: &Role, x: Element, y: Element) -> bool {
        self.edges.get(r).is_some_and(|rel| rel.contains(&(x, y)))
    }

    fn succ(&self, r: &Role, x: Element) -> impl Iterator<Item = Element> + '_ {
        self.edges.get(r).into_iter().flat_map(move |rel| rel.range((x, 0)..=(x, usize::MAX)).map(|p| p.1))
    }

    /// Checks conditions 1 to 12 for every element, and 13: `Δ` is non-empty,
    /// every individual of `kb` is mapped into `Δ`, and edges stay inside `Δ`.
    pub fn check(&self, kb: &KnowledgeBase) -> Result<(), ConditionFailure> {
        let fail = |condition: u8, detail: String| Err(ConditionFailure { condition, detail });
        let rbox = kb.rbox();
        if self.labels.is_empty() {
            return fail(13, String::from("empty domain"));
        }
        for a in kb.individuals() {
            if self.individuals.get(a).is_none_or(|&x| x >= self.len()) {
                return fail(13, format!("individual {a} unmapped"));
            }
        }
        for (r, rel) in &self.edges {
            if rel.iter().any(|&(x, y)| x >= self.len() || y >= self.len()) {
                return fail(13, format!("{r} edge leaves the domain"));
            }
            for &(x, y) in rel {
                if let Some(s) = rbox.supers(r).find(|s| !self.has_edge(s, x, y)) {
                    return fail(2, format!("({x}, {y}) in E({r}) but not in E({s})"));
                }
            }
        }
        for (x, cx) in self.labels.iter().enumerate() {
            for c in cx {
                if *c == Concept::Bot || c.negate().is_ok_and(|n| cx.contains(&n)) {
                    return fail(1, format!("d{x} contains {c} and its negation or ⊥"));
                }
                match c {
                    Concept::Nominal(a) if self.individuals.get(a) != Some(&x) => {
                        return fail(3, format!("{{{a}}} in C(d{x})"));
                    }
                    Concept::And(l, r) if !(cx.contains(l) && cx.contains(r)) => {
                        return fail(4, format!("{c} at d{x}"));
                    }
                    Concept::Or(l, r) if !(cx.contains(l) || cx.contains(r)) => {
                        return fail(5, format!("{c} at d{x}"));
                    }
                    Concept::Forall(s, d) => {
                        if let Some(r) = rbox.subs(s).find(|r| !cx.contains(&Concept::Forall((*r).clone(), d.clone())))
                        {
                            return fail(6, format!("{c} at d{x} lacks ∀{r}"));
                        }
                        for y in self.succ(s, x) {
                            if !self.labels[y].contains(d) {
                                return fail(7, format!("{c} at d{x}, successor d{y}"));
                            }
                            if rbox.is_transitive(s) && !self.labels[y].contains(c) {
                                return fail(8, format!("{c} at d{x}, successor d{y}"));
                            }
                        }
                    }
                    Concept::Exists(r, d) if !self.succ(r, x).any(|y| self.labels[y].contains(d)) => {
                        return fail(9, format!("{c} at d{x}"));
                    }
                    Concept::AtLeast(n, r, d) => {
                        let k = self.succ(r, x).filter(|&y| self.labels[y].contains(d)).count();
                        if k < *n as usize {
                            return fail(10, format!("{c} at d{x} has {k}"));
                        }
                    }
                    Concept::AtMost(n, r, d) => {
                        let k = self.succ(r, x).filter(|&y| self.labels[y].contains(d)).count();
                        if k > *n as usize {
                            return fail(11, format!("{c} at d{x} has {k}"));
                        }
                        let dn = d.negate().expect("input concept");
                        if let Some(y) =
                            self.succ(r, x).find(|&y| !self.labels[y].contains(d) && !self.labels[y].contains(&dn))
                        {
                            return fail(12, format!("{c} at d{x} undecided at d{y}"));
                        }
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }

    /// The interpretation read off this graph: concept names from labels,
    /// roles closed under role inclusions and transitivity.
    pub fn corresponding_model(&self, kb: &KnowledgeBase) -> Interpretation {
        let rbox = kb.rbox();
        let mut roles: BTreeMap<Role, Relation> = BTreeMap::new();
        for r in rbox.roles().chain(self.edges.keys()) {
            roles.entry(r.clone()).or_default().extend(self.edges.get(r).into_iter().flatten().copied());
        }
        loop {
            let mut changed = false;
            let names: Vec<Role> = roles.keys().cloned().collect();
            for r in &names {
                let pairs: Vec<(Element, Element)> = roles[r].iter().copied().collect();
                for s in rbox.supers(r).filter(|s| *s != r).cloned().collect::<Vec<_>>() {
                    let target = roles.entry(s).or_default();
                    for p in &pairs {
                        changed |= target.insert(*p);
                    }
                }
                if rbox.is_transitive(r) {
                    let rel = &roles[r];
                    let extra: Vec<(Element, Element)> = rel
                        .iter()
                        .flat_map(|&(x, y)| rel.range((y, 0)..=(y, usize::MAX)).map(move |&(_, z)| (x, z)))
                        .filter(|p| !rel.contains(p))
                        .collect();
                    let rel = roles.get_mut(r).expect("present");
                    for p in extra {
                        changed |= rel.insert(p);
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let mut concepts: BTreeMap<ConceptName, BTreeSet<Element>> = BTreeMap::new();
        for name in kb.concept_names() {
            concepts.insert(name.clone(), BTreeSet::new());
        }
        for (x, cx) in self.labels.iter().enumerate() {
            for c in cx {
                if let Concept::Atomic(a) = c {
                    concepts.entry(a.clone()).or_default().insert(x);
                }
            }
        }
        Interpretation { domain: self.len(), individuals: self.individuals.clone(), concepts, roles }
    }
}
