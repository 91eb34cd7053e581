//! Concepts, formulas and negation normal form.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use core::fmt;

macro_rules! name_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(Arc<str>);

        impl $name {
            /// Panics on an empty name.
            pub fn new(name: &str) -> Self {
                assert!(!name.is_empty(), "names must be nonempty");
                Self(Arc::from(name))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl From<&str> for $name {
            fn from(name: &str) -> Self {
                Self::new(name)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }
    };
}

name_type!(
    /// A role name.
    Role
);
name_type!(
    /// An individual name.
    Individual
);
name_type!(
    /// An atomic concept name.
    ConceptName
);

/// A concept in negation normal form.
///
/// The derived ordering is structural and is what makes label sets canonical.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Concept {
    Top,
    Bot,
    Atomic(ConceptName),
    NegAtomic(ConceptName),
    Nominal(Individual),
    /// ¬{a}; nominals count as atomic for NNF purposes.
    NegNominal(Individual),
    And(Arc<Concept>, Arc<Concept>),
    Or(Arc<Concept>, Arc<Concept>),
    Exists(Role, Arc<Concept>),
    Forall(Role, Arc<Concept>),
    AtLeast(u32, Role, Arc<Concept>),
    AtMost(u32, Role, Arc<Concept>),
    /// Residual at-most restriction that ignores named witnesses (internal).
    PrecEq(u32, Role, Arc<Concept>),
    /// Residual at-least restriction that ignores named witnesses (internal).
    SuccEq(u32, Role, Arc<Concept>),
}

/// Negating an internal residual form is undefined.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("internal residual form {0} has no negation")]
pub struct InternalFormError(pub Concept);

impl Concept {
    pub fn atomic(name: &str) -> Self {
        Concept::Atomic(ConceptName::new(name))
    }

    pub fn nominal(ind: &str) -> Self {
        Concept::Nominal(Individual::new(ind))
    }

    pub fn and(c: Concept, d: Concept) -> Self {
        Concept::And(Arc::new(c), Arc::new(d))
    }

    pub fn or(c: Concept, d: Concept) -> Self {
        Concept::Or(Arc::new(c), Arc::new(d))
    }

    pub fn exists(r: &str, c: Concept) -> Self {
        Concept::Exists(Role::new(r), Arc::new(c))
    }

    pub fn forall(r: &str, c: Concept) -> Self {
        Concept::Forall(Role::new(r), Arc::new(c))
    }

    pub fn at_least(n: u32, r: &str, c: Concept) -> Self {
        Concept::AtLeast(n, Role::new(r), Arc::new(c))
    }

    pub fn at_most(n: u32, r: &str, c: Concept) -> Self {
        Concept::AtMost(n, Role::new(r), Arc::new(c))
    }

    pub fn is_internal(&self) -> bool {
        matches!(self, Concept::PrecEq(..) | Concept::SuccEq(..))
    }

    /// True if an internal form occurs anywhere inside.
    pub fn contains_internal(&self) -> bool {
        match self {
            Concept::PrecEq(..) | Concept::SuccEq(..) => true,
            Concept::And(c, d) | Concept::Or(c, d) => c.contains_internal() || d.contains_internal(),
            Concept::Exists(_, c) | Concept::Forall(_, c) | Concept::AtLeast(_, _, c) | Concept::AtMost(_, _, c) => {
                c.contains_internal()
            }
            _ => false,
        }
    }

    /// The NNF of the complement.
    pub fn negate(&self) -> Result<Concept, InternalFormError> {
        Ok(match self {
            Concept::Top => Concept::Bot,
            Concept::Bot => Concept::Top,
            Concept::Atomic(a) => Concept::NegAtomic(a.clone()),
            Concept::NegAtomic(a) => Concept::Atomic(a.clone()),
            Concept::Nominal(a) => Concept::NegNominal(a.clone()),
            Concept::NegNominal(a) => Concept::Nominal(a.clone()),
            Concept::And(c, d) => Concept::or(c.negate()?, d.negate()?),
            Concept::Or(c, d) => Concept::and(c.negate()?, d.negate()?),
            Concept::Exists(r, c) => Concept::Forall(r.clone(), Arc::new(c.negate()?)),
            Concept::Forall(r, c) => Concept::Exists(r.clone(), Arc::new(c.negate()?)),
            Concept::AtLeast(0, ..) => Concept::Bot,
            Concept::AtLeast(n, r, c) => Concept::AtMost(n - 1, r.clone(), c.clone()),
            Concept::AtMost(n, r, c) => Concept::AtLeast(n.saturating_add(1), r.clone(), c.clone()),
            Concept::PrecEq(..) | Concept::SuccEq(..) => return Err(InternalFormError(self.clone())),
        })
    }

    /// Applies `f` to every individual occurring in a nominal.
    pub fn map_individuals(&self, f: &dyn Fn(&Individual) -> Individual) -> Concept {
        match self {
            Concept::Nominal(a) => Concept::Nominal(f(a)),
            Concept::NegNominal(a) => Concept::NegNominal(f(a)),
            Concept::And(c, d) => Concept::and(c.map_individuals(f), d.map_individuals(f)),
            Concept::Or(c, d) => Concept::or(c.map_individuals(f), d.map_individuals(f)),
            Concept::Exists(r, c) => Concept::Exists(r.clone(), Arc::new(c.map_individuals(f))),
            Concept::Forall(r, c) => Concept::Forall(r.clone(), Arc::new(c.map_individuals(f))),
            Concept::AtLeast(n, r, c) => Concept::AtLeast(*n, r.clone(), Arc::new(c.map_individuals(f))),
            Concept::AtMost(n, r, c) => Concept::AtMost(*n, r.clone(), Arc::new(c.map_individuals(f))),
            Concept::PrecEq(n, r, c) => Concept::PrecEq(*n, r.clone(), Arc::new(c.map_individuals(f))),
            Concept::SuccEq(n, r, c) => Concept::SuccEq(*n, r.clone(), Arc::new(c.map_individuals(f))),
            other => other.clone(),
        }
    }

    /// True if the concept mentions any nominal.
    pub fn has_nominal(&self) -> bool {
        match self {
            Concept::Nominal(_) | Concept::NegNominal(_) => true,
            Concept::And(c, d) | Concept::Or(c, d) => c.has_nominal() || d.has_nominal(),
            Concept::Exists(_, c)
            | Concept::Forall(_, c)
            | Concept::AtLeast(_, _, c)
            | Concept::AtMost(_, _, c)
            | Concept::PrecEq(_, _, c)
            | Concept::SuccEq(_, _, c) => c.has_nominal(),
            _ => false,
        }
    }

    /// Calls `f` on this concept and every subconcept, outermost first.
    pub fn visit(&self, f: &mut dyn FnMut(&Concept)) {
        f(self);
        match self {
            Concept::And(c, d) | Concept::Or(c, d) => {
                c.visit(f);
                d.visit(f);
            }
            Concept::Exists(_, c)
            | Concept::Forall(_, c)
            | Concept::AtLeast(_, _, c)
            | Concept::AtMost(_, _, c)
            | Concept::PrecEq(_, _, c)
            | Concept::SuccEq(_, _, c) => c.visit(f),
            _ => {}
        }
    }

    /// Number of symbols, used as the size measure of a KB.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |c| {
            n += match c {
                Concept::NegAtomic(_) | Concept::NegNominal(_) => 2,
                Concept::Exists(..) | Concept::Forall(..) => 2,
                Concept::AtLeast(..) | Concept::AtMost(..) | Concept::PrecEq(..) | Concept::SuccEq(..) => 3,
                _ => 1,
            }
        });
        n
    }
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Concept::Top => f.write_str("⊤"),
            Concept::Bot => f.write_str("⊥"),
            Concept::Atomic(a) => write!(f, "{a}"),
            Concept::NegAtomic(a) => write!(f, "¬{a}"),
            Concept::Nominal(a) => write!(f, "{{{a}}}"),
            Concept::NegNominal(a) => write!(f, "¬{{{a}}}"),
            Concept::And(c, d) => write!(f, "({c} ⊓ {d})"),
            Concept::Or(c, d) => write!(f, "({c} ⊔ {d})"),
            Concept::Exists(r, c) => write!(f, "∃{r}.{c}"),
            Concept::Forall(r, c) => write!(f, "∀{r}.{c}"),
            Concept::AtLeast(n, r, c) => write!(f, "≥{n} {r}.{c}"),
            Concept::AtMost(n, r, c) => write!(f, "≤{n} {r}.{c}"),
            Concept::PrecEq(n, r, c) => write!(f, "⪯{n} {r}.{c}"),
            Concept::SuccEq(n, r, c) => write!(f, "⪰{n} {r}.{c}"),
        }
    }
}

impl fmt::Debug for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A concept with unrestricted negation, as written in input.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ConceptExpr {
    Top,
    Bot,
    Name(ConceptName),
    Nominal(Individual),
    Not(Box<ConceptExpr>),
    And(Box<ConceptExpr>, Box<ConceptExpr>),
    Or(Box<ConceptExpr>, Box<ConceptExpr>),
    Exists(Role, Box<ConceptExpr>),
    Forall(Role, Box<ConceptExpr>),
    AtLeast(u32, Role, Box<ConceptExpr>),
    AtMost(u32, Role, Box<ConceptExpr>),
}

impl ConceptExpr {
    /// Converts an NNF concept back to an expression. `None` for internal forms.
    pub fn from_concept(c: &Concept) -> Option<ConceptExpr> {
        let b = |c: &Concept| ConceptExpr::from_concept(c).map(Box::new);
        Some(match c {
            Concept::Top => ConceptExpr::Top,
            Concept::Bot => ConceptExpr::Bot,
            Concept::Atomic(a) => ConceptExpr::Name(a.clone()),
            Concept::NegAtomic(a) => ConceptExpr::Not(Box::new(ConceptExpr::Name(a.clone()))),
            Concept::Nominal(a) => ConceptExpr::Nominal(a.clone()),
            Concept::NegNominal(a) => ConceptExpr::Not(Box::new(ConceptExpr::Nominal(a.clone()))),
            Concept::And(c, d) => ConceptExpr::And(b(c)?, b(d)?),
            Concept::Or(c, d) => ConceptExpr::Or(b(c)?, b(d)?),
            Concept::Exists(r, c) => ConceptExpr::Exists(r.clone(), b(c)?),
            Concept::Forall(r, c) => ConceptExpr::Forall(r.clone(), b(c)?),
            Concept::AtLeast(n, r, c) => ConceptExpr::AtLeast(*n, r.clone(), b(c)?),
            Concept::AtMost(n, r, c) => ConceptExpr::AtMost(*n, r.clone(), b(c)?),
            Concept::PrecEq(..) | Concept::SuccEq(..) => return None,
        })
    }
}

/// Negation normal form of an input expression.
///
/// `≥0 r.C` is rewritten to `⊤`, which keeps negation an involution on the
/// output. `¬(≤n r.C)` saturates at `u32::MAX`; the parser rejects that bound.
pub fn nnf(e: &ConceptExpr) -> Concept {
    to_nnf(e, false)
}

fn to_nnf(e: &ConceptExpr, neg: bool) -> Concept {
    let sub = |c: &ConceptExpr| Arc::new(to_nnf(c, false));
    match (e, neg) {
        (ConceptExpr::Not(c), _) => to_nnf(c, !neg),
        (ConceptExpr::Top, false) | (ConceptExpr::Bot, true) => Concept::Top,
        (ConceptExpr::Top, true) | (ConceptExpr::Bot, false) => Concept::Bot,
        (ConceptExpr::Name(a), false) => Concept::Atomic(a.clone()),
        (ConceptExpr::Name(a), true) => Concept::NegAtomic(a.clone()),
        (ConceptExpr::Nominal(a), false) => Concept::Nominal(a.clone()),
        (ConceptExpr::Nominal(a), true) => Concept::NegNominal(a.clone()),
        (ConceptExpr::And(c, d), false) => Concept::and(to_nnf(c, false), to_nnf(d, false)),
        (ConceptExpr::And(c, d), true) => Concept::or(to_nnf(c, true), to_nnf(d, true)),
        (ConceptExpr::Or(c, d), false) => Concept::or(to_nnf(c, false), to_nnf(d, false)),
        (ConceptExpr::Or(c, d), true) => Concept::and(to_nnf(c, true), to_nnf(d, true)),
        (ConceptExpr::Exists(r, c), false) => Concept::Exists(r.clone(), sub(c)),
        (ConceptExpr::Exists(r, c), true) => Concept::Forall(r.clone(), Arc::new(to_nnf(c, true))),
        (ConceptExpr::Forall(r, c), false) => Concept::Forall(r.clone(), sub(c)),
        (ConceptExpr::Forall(r, c), true) => Concept::Exists(r.clone(), Arc::new(to_nnf(c, true))),
        (ConceptExpr::AtLeast(0, ..), false) => Concept::Top,
        (ConceptExpr::AtLeast(0, ..), true) => Concept::Bot,
        (ConceptExpr::AtLeast(n, r, c), false) => Concept::AtLeast(*n, r.clone(), sub(c)),
        (ConceptExpr::AtLeast(n, r, c), true) => Concept::AtMost(n - 1, r.clone(), sub(c)),
        (ConceptExpr::AtMost(n, r, c), false) => Concept::AtMost(*n, r.clone(), sub(c)),
        (ConceptExpr::AtMost(n, r, c), true) => Concept::AtLeast(n.saturating_add(1), r.clone(), sub(c)),
    }
}

/// A concept, or an extended ABox assertion.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    /// A concept not attached to an individual (labels of simple nodes).
    ConceptOnly(Concept),
    Instance(Individual, Concept),
    RoleAssertion(Role, Individual, Individual),
    NegRoleAssertion(Role, Individual, Individual),
    Eq(Individual, Individual),
    NotEq(Individual, Individual),
}

/// `negate_formula` only applies to concept-shaped formulas.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormulaNegationError {
    #[error("formula {0} is not of the form a:C")]
    NotConceptShaped(Formula),
    #[error(transparent)]
    Internal(#[from] InternalFormError),
}

impl Formula {
    /// `α:C` where `α` is an individual or nothing.
    pub fn tagged(alpha: Option<&Individual>, c: Concept) -> Formula {
        match alpha {
            Some(a) => Formula::Instance(a.clone(), c),
            None => Formula::ConceptOnly(c),
        }
    }

    /// Splits `α:C` into its parts.
    pub fn as_tagged(&self) -> Option<(Option<&Individual>, &Concept)> {
        match self {
            Formula::ConceptOnly(c) => Some((None, c)),
            Formula::Instance(a, c) => Some((Some(a), c)),
            _ => None,
        }
    }

    pub fn concept(&self) -> Option<&Concept> {
        self.as_tagged().map(|(_, c)| c)
    }

    /// True for the internal ⪯/⪰ assertions excluded from full labels.
    pub fn is_internal(&self) -> bool {
        self.concept().is_some_and(Concept::is_internal)
    }

    pub fn negate(&self) -> Result<Formula, FormulaNegationError> {
        match self {
            Formula::ConceptOnly(c) => Ok(Formula::ConceptOnly(c.negate()?)),
            Formula::Instance(a, c) => Ok(Formula::Instance(a.clone(), c.negate()?)),
            _ => Err(FormulaNegationError::NotConceptShaped(self.clone())),
        }
    }

    /// Applies `f` to every individual. With `keep_eq`, `≐` assertions are left alone.
    pub fn map_individuals(&self, f: &dyn Fn(&Individual) -> Individual, keep_eq: bool) -> Formula {
        match self {
            Formula::ConceptOnly(c) => Formula::ConceptOnly(c.map_individuals(f)),
            Formula::Instance(a, c) => Formula::Instance(f(a), c.map_individuals(f)),
            Formula::RoleAssertion(r, a, b) => Formula::RoleAssertion(r.clone(), f(a), f(b)),
            Formula::NegRoleAssertion(r, a, b) => Formula::NegRoleAssertion(r.clone(), f(a), f(b)),
            Formula::Eq(a, b) if keep_eq => Formula::Eq(a.clone(), b.clone()),
            Formula::Eq(a, b) => Formula::Eq(f(a), f(b)),
            Formula::NotEq(a, b) => Formula::NotEq(f(a), f(b)),
        }
    }

    /// Replaces `from` by `to` everywhere except inside `≐`.
    pub fn rename(&self, from: &Individual, to: &Individual) -> Formula {
        let f = |x: &Individual| if x == from { to.clone() } else { x.clone() };
        self.map_individuals(&f, true)
    }

    /// Substitutes through a replacement map; unmapped names stay.
    pub fn substitute(&self, map: &BTreeMap<Individual, Individual>) -> Formula {
        let f = |x: &Individual| map.get(x).cloned().unwrap_or_else(|| x.clone());
        self.map_individuals(&f, false)
    }

    /// Calls `f` on each individual occurring in the formula.
    pub fn individuals(&self, f: &mut dyn FnMut(&Individual)) {
        let in_concept = |c: &Concept, f: &mut dyn FnMut(&Individual)| {
            c.visit(&mut |c| {
                if let Concept::Nominal(a) | Concept::NegNominal(a) = c {
                    f(a)
                }
            })
        };
        match self {
            Formula::ConceptOnly(c) => in_concept(c, f),
            Formula::Instance(a, c) => {
                f(a);
                in_concept(c, f);
            }
            Formula::RoleAssertion(_, a, b)
            | Formula::NegRoleAssertion(_, a, b)
            | Formula::Eq(a, b)
            | Formula::NotEq(a, b) => {
                f(a);
                f(b);
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::ConceptOnly(c) => write!(f, "{c}"),
            Formula::Instance(a, c) => write!(f, "{a}:{c}"),
            Formula::RoleAssertion(r, a, b) => write!(f, "{r}({a},{b})"),
            Formula::NegRoleAssertion(r, a, b) => write!(f, "¬{r}({a},{b})"),
            Formula::Eq(a, b) => write!(f, "{a}≐{b}"),
            Formula::NotEq(a, b) => write!(f, "{a}≢{b}"),
        }
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn name(s: &str) -> Box<ConceptExpr> {
        Box::new(ConceptExpr::Name(ConceptName::new(s)))
    }

    fn not(e: ConceptExpr) -> ConceptExpr {
        ConceptExpr::Not(Box::new(e))
    }

    #[test]
    fn de_morgan() {
        let e = not(ConceptExpr::And(name("A"), name("B")));
        assert_eq!(nnf(&e).to_string(), "(¬A ⊔ ¬B)");
    }

    #[test]
    fn quantifier_duality() {
        let e = not(ConceptExpr::Exists(Role::new("r"), name("A")));
        assert_eq!(nnf(&e), Concept::forall("r", Concept::NegAtomic(ConceptName::new("A"))));
    }

    #[test]
    fn number_restriction_duality() {
        let e = not(ConceptExpr::AtMost(2, Role::new("s"), name("A")));
        assert_eq!(nnf(&e), Concept::at_least(3, "s", Concept::atomic("A")));
        let e = not(ConceptExpr::AtLeast(0, Role::new("s"), name("A")));
        assert_eq!(nnf(&e), Concept::Bot);
    }

    #[test]
    fn top_and_bot() {
        assert_eq!(nnf(&not(ConceptExpr::Top)), Concept::Bot);
        assert_eq!(nnf(&not(ConceptExpr::Bot)), Concept::Top);
    }

    #[test]
    fn negate_examples() {
        let a = Concept::atomic("A");
        assert_eq!(a.negate().unwrap(), Concept::NegAtomic(ConceptName::new("A")));
        let fb = Concept::forall("r", Concept::atomic("B"));
        assert_eq!(fb.negate().unwrap().to_string(), "∃r.¬B");
        let ge1 = Concept::at_least(1, "s", Concept::atomic("C"));
        assert_eq!(ge1.negate().unwrap(), Concept::at_most(0, "s", Concept::atomic("C")));
    }

    #[test]
    fn internal_forms_have_no_negation() {
        let c = Concept::PrecEq(2, Role::new("r"), Arc::new(Concept::Top));
        assert!(c.negate().is_err());
    }

    #[test]
    fn negate_formula_examples() {
        let a = Individual::new("a");
        let f = Formula::Instance(a.clone(), Concept::or(Concept::atomic("A"), Concept::atomic("B")));
        assert_eq!(f.negate().unwrap().to_string(), "a:(¬A ⊓ ¬B)");
        let g = Formula::ConceptOnly(Concept::exists("r", Concept::atomic("A")));
        assert_eq!(g.negate().unwrap().to_string(), "∀r.¬A");
        let h = Formula::RoleAssertion(Role::new("r"), a.clone(), a);
        assert!(h.negate().is_err());
    }

    #[test]
    fn rename_keeps_equalities() {
        let (a, b) = (Individual::new("a"), Individual::new("b"));
        let eq = Formula::Eq(a.clone(), b.clone());
        assert_eq!(eq.rename(&b, &a), eq);
        let inst = Formula::Instance(b.clone(), Concept::exists("r", Concept::Nominal(b.clone())));
        assert_eq!(inst.rename(&b, &a).to_string(), "a:∃r.{a}");
    }
}
