//! Knowledge bases and the closed role hierarchy.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::syntax::{Concept, ConceptExpr, ConceptName, Formula, Individual, Role, nnf};

/// An RBox axiom as written.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum RoleAxiom {
    /// `r ⊑ s`
    Sub(Role, Role),
    Trans(Role),
}

/// `ext(R)`: the reflexive-transitive subrole relation plus transitivity flags.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct RBoxClosure {
    supers: BTreeMap<Role, BTreeSet<Role>>,
    subs: BTreeMap<Role, BTreeSet<Role>>,
    transitive: BTreeSet<Role>,
}

impl RBoxClosure {
    pub fn build(axioms: &[RoleAxiom], mentioned: impl IntoIterator<Item = Role>) -> Self {
        let mut supers: BTreeMap<Role, BTreeSet<Role>> = BTreeMap::new();
        let mut transitive = BTreeSet::new();
        let touch = |r: &Role, supers: &mut BTreeMap<Role, BTreeSet<Role>>| {
            supers.entry(r.clone()).or_insert_with(|| [r.clone()].into());
        };
        for r in mentioned {
            touch(&r, &mut supers);
        }
        for ax in axioms {
            match ax {
                RoleAxiom::Sub(r, s) => {
                    touch(r, &mut supers);
                    touch(s, &mut supers);
                    supers.get_mut(r).unwrap().insert(s.clone());
                }
                RoleAxiom::Trans(r) => {
                    touch(r, &mut supers);
                    transitive.insert(r.clone());
                }
            }
        }
        loop {
            let mut changed = false;
            let roles: Vec<Role> = supers.keys().cloned().collect();
            for r in &roles {
                let direct: Vec<Role> = supers[r].iter().cloned().collect();
                for s in direct {
                    let indirect: Vec<Role> = supers[&s].iter().cloned().collect();
                    let set = supers.get_mut(r).unwrap();
                    for t in indirect {
                        changed |= set.insert(t);
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let mut subs: BTreeMap<Role, BTreeSet<Role>> = BTreeMap::new();
        for (r, ss) in &supers {
            for s in ss {
                subs.entry(s.clone()).or_default().insert(r.clone());
            }
        }
        RBoxClosure { supers, subs, transitive }
    }

    pub fn roles(&self) -> impl Iterator<Item = &Role> {
        self.supers.keys()
    }

    /// `r ⊑ s` in the closure; reflexive on every role.
    pub fn is_sub(&self, r: &Role, s: &Role) -> bool {
        r == s || self.supers.get(r).is_some_and(|ss| ss.contains(s))
    }

    /// All `s` with `r ⊑ s`, including `r`.
    pub fn supers<'a>(&'a self, r: &'a Role) -> impl Iterator<Item = &'a Role> + 'a {
        let known = self.supers.get(r);
        known.into_iter().flatten().chain(known.is_none().then_some(r))
    }

    /// All `r` with `r ⊑ s`, including `s`.
    pub fn subs<'a>(&'a self, s: &'a Role) -> impl Iterator<Item = &'a Role> + 'a {
        let known = self.subs.get(s);
        known.into_iter().flatten().chain(known.is_none().then_some(s))
    }

    pub fn is_transitive(&self, r: &Role) -> bool {
        self.transitive.contains(r)
    }

    pub fn transitive_roles(&self) -> &BTreeSet<Role> {
        &self.transitive
    }

    /// Neither transitive nor with a transitive subrole.
    pub fn is_simple(&self, r: &Role) -> bool {
        self.subs(r).all(|s| !self.is_transitive(s))
    }

    /// Number of pairs in the subrole relation.
    pub fn pair_count(&self) -> usize {
        self.supers.values().map(BTreeSet::len).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KbError {
    #[error("non-simple role {role} in number restriction {concept}")]
    NonSimpleRole { role: Role, concept: Concept },
    #[error("internal residual form {0} is not allowed in input")]
    InternalForm(Concept),
    #[error("assertion {0} is not allowed in input")]
    UnsupportedAssertion(Formula),
}

/// A validated knowledge base ⟨R, T, A⟩ with the TBox as global concepts.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct KnowledgeBase {
    rbox: RBoxClosure,
    role_axioms: Vec<RoleAxiom>,
    tbox: BTreeSet<Concept>,
    abox: BTreeSet<Formula>,
    individuals: Vec<Individual>,
    numeric: BTreeSet<Role>,
    concept_names: BTreeSet<ConceptName>,
    augmented: bool,
}

impl KnowledgeBase {
    pub fn rbox(&self) -> &RBoxClosure {
        &self.rbox
    }

    /// Role axioms as given, without duplicates.
    pub fn role_axioms(&self) -> &[RoleAxiom] {
        &self.role_axioms
    }

    pub fn tbox(&self) -> &BTreeSet<Concept> {
        &self.tbox
    }

    pub fn abox(&self) -> &BTreeSet<Formula> {
        &self.abox
    }

    /// Individuals in first-occurrence order.
    pub fn individuals(&self) -> &[Individual] {
        &self.individuals
    }

    pub fn concept_names(&self) -> &BTreeSet<ConceptName> {
        &self.concept_names
    }

    /// True if the ABox was empty and `aux:⊤` was added.
    pub fn is_augmented(&self) -> bool {
        self.augmented
    }

    pub fn is_simple(&self, r: &Role) -> bool {
        self.rbox.is_simple(r)
    }

    pub fn is_numeric(&self, r: &Role) -> bool {
        self.numeric.contains(r)
    }

    pub fn roles(&self) -> impl Iterator<Item = &Role> {
        self.rbox.roles()
    }

    /// Position in first-occurrence order; unknown names sort last.
    pub fn individual_rank(&self, a: &Individual) -> usize {
        self.individuals.iter().position(|b| b == a).unwrap_or(usize::MAX)
    }

    /// The size measure N: symbols over all axioms and assertions.
    pub fn size(&self) -> usize {
        let axioms = self.role_axioms.len() * 3;
        let tbox: usize = self.tbox.iter().map(Concept::size).sum();
        let abox: usize = self
            .abox
            .iter()
            .map(|f| match f {
                Formula::Instance(_, c) => 2 + c.size(),
                _ => 3,
            })
            .sum();
        (axioms + tbox + abox).max(1)
    }
}

/// Collects axioms in input order and produces a [`KnowledgeBase`].
#[derive(Clone, Debug, Default)]
pub struct KbBuilder {
    axioms: Vec<RoleAxiom>,
    tbox: Vec<Concept>,
    abox: Vec<Formula>,
    order: Vec<Individual>,
}

impl KbBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn note(&mut self, a: &Individual) {
        if !self.order.contains(a) {
            self.order.push(a.clone());
        }
    }

    fn note_concept(&mut self, c: &Concept) {
        let mut found = Vec::new();
        c.visit(&mut |c| {
            if let Concept::Nominal(a) | Concept::NegNominal(a) = c {
                found.push(a.clone());
            }
        });
        for a in &found {
            self.note(a);
        }
    }

    pub fn role_axiom(&mut self, ax: RoleAxiom) -> &mut Self {
        if !self.axioms.contains(&ax) {
            self.axioms.push(ax);
        }
        self
    }

    /// Adds a global concept (an axiom `⊤ ⊑ C`).
    pub fn tbox_concept(&mut self, c: Concept) -> &mut Self {
        self.note_concept(&c);
        self.tbox.push(c);
        self
    }

    /// `C ⊑ D`, encoded as `¬C ⊔ D` (or just `D` when `C` is `⊤`).
    pub fn subsumption(&mut self, c: &ConceptExpr, d: &ConceptExpr) -> &mut Self {
        let encoded = match nnf(c) {
            Concept::Top => nnf(d),
            lhs => Concept::or(lhs.negate().expect("nnf output has no internal forms"), nnf(d)),
        };
        self.tbox_concept(encoded)
    }

    /// `C ≐ D`, encoded as `(¬C ⊔ D) ⊓ (¬D ⊔ C)`.
    pub fn equivalence(&mut self, c: &ConceptExpr, d: &ConceptExpr) -> &mut Self {
        let (c, d) = (nnf(c), nnf(d));
        let neg = |x: &Concept| x.negate().expect("nnf output has no internal forms");
        let encoded = Concept::and(Concept::or(neg(&c), d.clone()), Concept::or(neg(&d), c));
        self.tbox_concept(encoded)
    }

    pub fn assertion(&mut self, f: Formula) -> &mut Self {
        let mut found = Vec::new();
        f.individuals(&mut |a| found.push(a.clone()));
        for a in &found {
            self.note(a);
        }
        self.abox.push(f);
        self
    }

    pub fn build(&self) -> Result<KnowledgeBase, KbError> {
        let mut abox: BTreeSet<Formula> = BTreeSet::new();
        for f in &self.abox {
            match f {
                Formula::Instance(..) | Formula::RoleAssertion(..) | Formula::NotEq(..) => {
                    abox.insert(f.clone());
                }
                _ => return Err(KbError::UnsupportedAssertion(f.clone())),
            }
        }
        let tbox: BTreeSet<Concept> = self.tbox.iter().cloned().collect();
        let mut order = self.order.clone();
        let mut augmented = false;
        if abox.is_empty() {
            let mut name = String::from("aux");
            let mut k = 0;
            while order.iter().any(|a| a.as_str() == name) {
                k += 1;
                name = alloc::format!("aux{k}");
            }
            let aux = Individual::new(&name);
            order.push(aux.clone());
            abox.insert(Formula::Instance(aux, Concept::Top));
            augmented = true;
        }

        let mut roles = BTreeSet::new();
        let mut names = BTreeSet::new();
        let mut restricted = Vec::new();
        let mut scan = |c: &Concept, roles: &mut BTreeSet<Role>| {
            let mut err = None;
            c.visit(&mut |c| match c {
                Concept::Atomic(a) | Concept::NegAtomic(a) => {
                    names.insert(a.clone());
                }
                Concept::Exists(r, _) | Concept::Forall(r, _) => {
                    roles.insert(r.clone());
                }
                Concept::AtLeast(_, r, _) | Concept::AtMost(_, r, _) => {
                    roles.insert(r.clone());
                    restricted.push((r.clone(), c.clone()));
                }
                Concept::PrecEq(..) | Concept::SuccEq(..) => err = Some(KbError::InternalForm(c.clone())),
                _ => {}
            });
            err.map_or(Ok(()), Err)
        };
        for c in &tbox {
            scan(c, &mut roles)?;
        }
        for f in &abox {
            match f {
                Formula::Instance(_, c) => scan(c, &mut roles)?,
                Formula::RoleAssertion(r, ..) => {
                    roles.insert(r.clone());
                }
                _ => {}
            }
        }
        let rbox = RBoxClosure::build(&self.axioms, roles);
        for (r, c) in &restricted {
            if !rbox.is_simple(r) {
                return Err(KbError::NonSimpleRole { role: r.clone(), concept: c.clone() });
            }
        }
        let mut numeric = BTreeSet::new();
        for (r, _) in &restricted {
            for s in rbox.subs(r) {
                numeric.insert(s.clone());
            }
        }
        Ok(KnowledgeBase {
            rbox,
            role_axioms: self.axioms.clone(),
            tbox,
            abox,
            individuals: order,
            numeric,
            concept_names: names,
            augmented,
        })
    }
}

/// Re-runs validation on an existing KB.
pub fn validate(kb: &KnowledgeBase) -> Result<(), KbError> {
    let mut b = KbBuilder::new();
    for ax in kb.role_axioms() {
        b.role_axiom(ax.clone());
    }
    for c in kb.tbox() {
        b.tbox_concept(c.clone());
    }
    for f in kb.abox() {
        b.assertion(f.clone());
    }
    b.build().map(|_| ())
}

impl fmt::Display for RoleAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RoleAxiom::Sub(r, s) => write!(f, "{r} ⊑ {s}"),
            RoleAxiom::Trans(r) => write!(f, "Trans({r})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Role {
        Role::new(s)
    }

    #[test]
    fn closure_is_transitive_and_reflexive() {
        let rb = RBoxClosure::build(&[RoleAxiom::Sub(r("r"), r("s")), RoleAxiom::Sub(r("s"), r("t"))], []);
        assert!(rb.is_sub(&r("r"), &r("t")));
        assert!(rb.is_sub(&r("s"), &r("s")));
        assert!(!rb.is_sub(&r("t"), &r("r")));
        let only = RBoxClosure::build(&[], [r("r")]);
        assert_eq!(only.pair_count(), 1);
    }

    #[test]
    fn simplicity() {
        let rb = RBoxClosure::build(&[RoleAxiom::Trans(r("t")), RoleAxiom::Sub(r("r"), r("t"))], []);
        assert!(rb.is_simple(&r("r")));
        assert!(!rb.is_simple(&r("t")));
        assert_eq!(rb.transitive_roles().iter().cloned().collect::<Vec<_>>(), [r("t")]);
        let rb = RBoxClosure::build(&[RoleAxiom::Trans(r("s")), RoleAxiom::Sub(r("s"), r("r"))], []);
        assert!(!rb.is_simple(&r("r")));
        assert!(RBoxClosure::default().is_simple(&r("r")));
    }

    #[test]
    fn non_simple_role_rejected() {
        let mut b = KbBuilder::new();
        b.role_axiom(RoleAxiom::Trans(r("r")));
        b.assertion(Formula::Instance(Individual::new("a"), Concept::at_least(1, "r", Concept::atomic("A"))));
        assert!(matches!(b.build(), Err(KbError::NonSimpleRole { .. })));

        let mut b = KbBuilder::new();
        b.role_axiom(RoleAxiom::Trans(r("t"))).role_axiom(RoleAxiom::Sub(r("r"), r("t")));
        b.assertion(Formula::Instance(Individual::new("a"), Concept::at_most(2, "r", Concept::atomic("A"))));
        assert!(b.build().is_ok());
    }

    #[test]
    fn empty_abox_is_augmented() {
        let kb = KbBuilder::new().build().unwrap();
        assert!(kb.is_augmented());
        let aux = Formula::Instance(Individual::new("aux"), Concept::Top);
        assert_eq!(kb.abox().iter().collect::<Vec<_>>(), [&aux]);
    }

    #[test]
    fn numeric_roles_close_downward() {
        let mut b = KbBuilder::new();
        b.role_axiom(RoleAxiom::Sub(r("s"), r("r")));
        b.assertion(Formula::Instance(Individual::new("a"), Concept::at_least(2, "r", Concept::atomic("C"))));
        b.assertion(Formula::Instance(Individual::new("a"), Concept::exists("q", Concept::Top)));
        let kb = b.build().unwrap();
        assert!(kb.is_numeric(&r("s")));
        assert!(kb.is_numeric(&r("r")));
        assert!(!kb.is_numeric(&r("q")));
    }

    #[test]
    fn subsumption_encoding() {
        let mut b = KbBuilder::new();
        let a = ConceptExpr::Name(ConceptName::new("A"));
        let bb = ConceptExpr::Name(ConceptName::new("B"));
        b.subsumption(&a, &bb);
        b.subsumption(&ConceptExpr::Top, &bb);
        let kb = b.build().unwrap();
        let want: BTreeSet<Concept> =
            [Concept::or(Concept::NegAtomic(ConceptName::new("A")), Concept::atomic("B")), Concept::atomic("B")].into();
        assert_eq!(kb.tbox(), &want);
    }

    #[test]
    fn individuals_in_first_occurrence_order() {
        let mut b = KbBuilder::new();
        b.assertion(Formula::Instance(Individual::new("z"), Concept::nominal("y")));
        b.assertion(Formula::RoleAssertion(r("r"), Individual::new("x"), Individual::new("z")));
        let kb = b.build().unwrap();
        let names: Vec<&str> = kb.individuals().iter().map(Individual::as_str).collect();
        assert_eq!(names, ["z", "y", "x"]);
    }
}
