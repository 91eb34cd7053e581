//! Bounded-domain model search, used as a reference answer in tests.
//!
//! For each domain size and each way of mapping individuals onto elements,
//! the question "is there an interpretation of the concept and role names
//! making this a model" is a propositional problem. Each subconcept at each
//! element gets a literal equivalent to its truth value.

use std::collections::HashMap;

use shoq_core::model::{Element, Interpretation};
use shoq_core::syntax::Formula;
use shoq_core::{Concept, Individual, KnowledgeBase, Role, RoleAxiom};
use varisat::{ExtendFormula, Lit, Solver};

/// Largest domain the oracle agrees to search.
pub const MAX_DOMAIN: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleAnswer {
    SatWitness(Interpretation),
    NoModelUpTo(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("domain bound {0} exceeds the oracle limit of {MAX_DOMAIN}")]
    TooLarge(usize),
    #[error("SAT solver failure: {0}")]
    Solver(String),
    #[error("decoded interpretation is not a model: {0}")]
    Defect(String),
}

/// Searches for a model with at most `max_domain` elements.
pub fn brute_force_sat(kb: &KnowledgeBase, max_domain: usize) -> Result<OracleAnswer, OracleError> {
    if max_domain > MAX_DOMAIN {
        return Err(OracleError::TooLarge(max_domain));
    }
    let inds = kb.individuals();
    for n in 1..=max_domain {
        let mut mapping = vec![0; inds.len()];
        loop {
            if let Some(model) = solve_with(kb, n, &mapping)? {
                model.check_model(kb).map_err(|e| OracleError::Defect(e.to_string()))?;
                return Ok(OracleAnswer::SatWitness(model));
            }
            if !next_mapping(&mut mapping, n) {
                break;
            }
        }
    }
    Ok(OracleAnswer::NoModelUpTo(max_domain))
}

/// Steps through restricted-growth strings with values below `n`: element
/// names are interchangeable, so individuals are placed on the lowest
/// unused element first.
fn next_mapping(m: &mut [Element], n: usize) -> bool {
    for i in (1..m.len()).rev() {
        let ceiling = m[..i].iter().max().map_or(0, |x| x + 1);
        if m[i] < ceiling && m[i] + 1 < n {
            m[i] += 1;
            for x in &mut m[i + 1..] {
                *x = 0;
            }
            return true;
        }
    }
    false
}

struct Encoder<'k> {
    kb: &'k KnowledgeBase,
    solver: Solver<'static>,
    n: usize,
    mapping: HashMap<Individual, Element>,
    truth: Lit,
    names: HashMap<(String, Element), Lit>,
    roles: HashMap<(Role, Element, Element), Lit>,
    memo: HashMap<(Concept, Element), Lit>,
}

impl Encoder<'_> {
    fn constant(&self, b: bool) -> Lit {
        if b { self.truth } else { !self.truth }
    }

    fn name(&mut self, a: &str, x: Element) -> Lit {
        if let Some(&l) = self.names.get(&(a.to_string(), x)) {
            return l;
        }
        let l = self.solver.new_var().positive();
        self.names.insert((a.to_string(), x), l);
        l
    }

    fn role(&mut self, r: &Role, x: Element, y: Element) -> Lit {
        if let Some(&l) = self.roles.get(&(r.clone(), x, y)) {
            return l;
        }
        let l = self.solver.new_var().positive();
        self.roles.insert((r.clone(), x, y), l);
        l
    }

    fn fresh(&mut self) -> Lit {
        self.solver.new_var().positive()
    }

    /// `out ↔ (a ∧ b)`
    fn and_gate(&mut self, a: Lit, b: Lit) -> Lit {
        let out = self.fresh();
        self.solver.add_clause(&[!out, a]);
        self.solver.add_clause(&[!out, b]);
        self.solver.add_clause(&[out, !a, !b]);
        out
    }

    /// `out ↔ ⋁ lits`
    fn or_gate(&mut self, lits: &[Lit]) -> Lit {
        let out = self.fresh();
        let mut big = vec![!out];
        big.extend_from_slice(lits);
        self.solver.add_clause(&big);
        for &l in lits {
            self.solver.add_clause(&[out, !l]);
        }
        out
    }

    /// `out ↔ at least k of lits`
    fn at_least(&mut self, k: usize, lits: &[Lit]) -> Lit {
        if k == 0 {
            return self.truth;
        }
        if k > lits.len() {
            return !self.truth;
        }
        let out = self.fresh();
        // Every (m - k + 1)-subset contains a true literal iff at least k hold.
        for sub in subsets(lits.len(), lits.len() - k + 1) {
            let mut clause = vec![!out];
            clause.extend(sub.iter().map(|&i| lits[i]));
            self.solver.add_clause(&clause);
        }
        for sub in subsets(lits.len(), k) {
            let mut clause = vec![out];
            clause.extend(sub.iter().map(|&i| !lits[i]));
            self.solver.add_clause(&clause);
        }
        out
    }

    /// Literals `r(x, y) ∧ C(y)` for every `y`.
    fn witnesses(&mut self, r: &Role, c: &Concept, x: Element) -> Vec<Lit> {
        (0..self.n)
            .map(|y| {
                let edge = self.role(r, x, y);
                let fill = self.concept(c, y);
                self.and_gate(edge, fill)
            })
            .collect()
    }

    fn concept(&mut self, c: &Concept, x: Element) -> Lit {
        if let Some(&l) = self.memo.get(&(c.clone(), x)) {
            return l;
        }
        let l = match c {
            Concept::Top => self.truth,
            Concept::Bot => !self.truth,
            Concept::Atomic(a) => self.name(a.as_str(), x),
            Concept::NegAtomic(a) => !self.name(a.as_str(), x),
            Concept::Nominal(a) => self.constant(self.mapping.get(a) == Some(&x)),
            Concept::NegNominal(a) => self.constant(self.mapping.get(a) != Some(&x)),
            Concept::And(c, d) => {
                let (c, d) = (self.concept(c, x), self.concept(d, x));
                self.and_gate(c, d)
            }
            Concept::Or(c, d) => {
                let (c, d) = (self.concept(c, x), self.concept(d, x));
                self.or_gate(&[c, d])
            }
            Concept::Exists(r, c) => {
                let w = self.witnesses(r, c, x);
                self.or_gate(&w)
            }
            Concept::Forall(r, c) => {
                let neg = c.negate().expect("input concepts have no internal forms");
                let w = self.witnesses(r, &neg, x);
                !self.or_gate(&w)
            }
            Concept::AtLeast(k, r, c) => {
                let w = self.witnesses(r, c, x);
                self.at_least(*k as usize, &w)
            }
            Concept::AtMost(k, r, c) => {
                let w = self.witnesses(r, c, x);
                !self.at_least(*k as usize + 1, &w)
            }
            Concept::PrecEq(..) | Concept::SuccEq(..) => unreachable!("input concepts have no internal forms"),
        };
        self.memo.insert((c.clone(), x), l);
        l
    }

    fn rbox(&mut self) {
        let roles: Vec<Role> = self.kb.rbox().roles().cloned().collect();
        for r in &roles {
            for s in &roles {
                if r != s && self.kb.rbox().is_sub(r, s) {
                    for (x, y) in pairs(self.n) {
                        let (rl, sl) = (self.role(r, x, y), self.role(s, x, y));
                        self.solver.add_clause(&[!rl, sl]);
                    }
                }
            }
        }
        for ax in self.kb.role_axioms() {
            if let RoleAxiom::Trans(r) = ax {
                for (x, y) in pairs(self.n) {
                    for z in 0..self.n {
                        let (a, b, c) = (self.role(r, x, y), self.role(r, y, z), self.role(r, x, z));
                        self.solver.add_clause(&[!a, !b, c]);
                    }
                }
            }
        }
    }

    fn decode(&self, model: &[Lit]) -> Interpretation {
        let holds = |l: Lit| model[l.var().index()].is_positive() == l.is_positive();
        let mut i = Interpretation { domain: self.n, ..Interpretation::default() };
        for (a, x) in &self.mapping {
            i.individuals.insert(a.clone(), *x);
        }
        for a in self.kb.concept_names() {
            let ext = (0..self.n).filter(|&x| self.names.get(&(a.as_str().to_string(), x)).is_some_and(|&l| holds(l)));
            i.concepts.insert(a.clone(), ext.collect());
        }
        for r in self.kb.rbox().roles() {
            let rel = pairs(self.n).filter(|&(x, y)| self.roles.get(&(r.clone(), x, y)).is_some_and(|&l| holds(l)));
            i.roles.insert(r.clone(), rel.collect());
        }
        i
    }
}

fn pairs(n: usize) -> impl Iterator<Item = (Element, Element)> {
    (0..n).flat_map(move |x| (0..n).map(move |y| (x, y)))
}

/// All `k`-element subsets of `0..m`, as sorted index lists.
fn subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            go(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    go(0, m, k, &mut cur, &mut out);
    out
}

fn solve_with(kb: &KnowledgeBase, n: usize, m: &[Element]) -> Result<Option<Interpretation>, OracleError> {
    let mapping: HashMap<Individual, Element> = kb.individuals().iter().cloned().zip(m.iter().copied()).collect();
    for f in kb.abox() {
        if let Formula::NotEq(a, b) = f
            && mapping[a] == mapping[b]
        {
            return Ok(None);
        }
    }
    let mut solver = Solver::new();
    let truth = solver.new_var().positive();
    solver.add_clause(&[truth]);
    let mut enc =
        Encoder { kb, solver, n, mapping, truth, names: HashMap::new(), roles: HashMap::new(), memo: HashMap::new() };
    for a in kb.concept_names() {
        for x in 0..n {
            enc.name(a.as_str(), x);
        }
    }
    for r in kb.rbox().roles() {
        for (x, y) in pairs(n) {
            enc.role(r, x, y);
        }
    }
    enc.rbox();
    for c in kb.tbox() {
        for x in 0..n {
            let l = enc.concept(c, x);
            enc.solver.add_clause(&[l]);
        }
    }
    for f in kb.abox() {
        match f {
            Formula::Instance(a, c) => {
                let l = enc.concept(c, enc.mapping[a]);
                enc.solver.add_clause(&[l]);
            }
            Formula::RoleAssertion(r, a, b) => {
                let l = enc.role(r, enc.mapping[a], enc.mapping[b]);
                enc.solver.add_clause(&[l]);
            }
            _ => {}
        }
    }
    match enc.solver.solve() {
        Ok(true) => {
            let model = enc.solver.model().expect("a model after a satisfiable solve");
            Ok(Some(enc.decode(&model)))
        }
        Ok(false) => Ok(None),
        Err(e) => Err(OracleError::Solver(e.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_kb;

    fn answer(text: &str, k: usize) -> OracleAnswer {
        brute_force_sat(&parse_kb(text).unwrap(), k).unwrap()
    }

    #[test]
    fn single_concept() {
        match answer("abox a : A", 3) {
            OracleAnswer::SatWitness(i) => assert_eq!(i.domain, 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn contradiction() {
        assert_eq!(answer("abox a : (A and not A)", 4), OracleAnswer::NoModelUpTo(4));
    }

    #[test]
    fn counting_needs_room() {
        assert_eq!(answer("abox a : atleast 3 r not one a", 3), OracleAnswer::NoModelUpTo(3));
        assert!(matches!(answer("abox a : atleast 3 r not one a", 4), OracleAnswer::SatWitness(_)));
        assert_eq!(answer("abox a : (atleast 2 r top and only r one b)", 4), OracleAnswer::NoModelUpTo(4));
    }

    #[test]
    fn role_axioms_respected() {
        let kb = "rbox r sub s\nrbox trans s\nabox r(a, b)\nabox r(b, c)\nabox a : only s A\nabox c : not A";
        assert_eq!(answer(kb, 4), OracleAnswer::NoModelUpTo(4));
    }

    #[test]
    fn inequality_forces_distinct_elements() {
        match answer("abox a != b", 3) {
            OracleAnswer::SatWitness(i) => assert_eq!(i.domain, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn mappings_are_restricted_growth() {
        let mut m = vec![0, 0, 0];
        let mut seen = vec![m.clone()];
        while next_mapping(&mut m, 2) {
            seen.push(m.clone());
        }
        assert_eq!(seen, [[0, 0, 0], [0, 0, 1], [0, 1, 0], [0, 1, 1]]);
        assert_eq!(subsets(4, 2).len(), 6);
    }

    #[test]
    fn rejects_large_domains() {
        let kb = parse_kb("abox a : A").unwrap();
        assert_eq!(brute_force_sat(&kb, 7), Err(OracleError::TooLarge(7)));
    }
}
