//! Expansion rules.

use alloc::collections::BTreeSet;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::engine::{DN_QUIET, Engine};
use crate::graph::{EdgeKind, EdgeLabel, IlConstraints, IndRepl, Label, NodeId, NodeType, SType, Status};
use crate::ilp::{Constraint, Problem};
use crate::kb::KnowledgeBase;
use crate::relevance::{concepts_of, relevant_in_scope};
use crate::syntax::{Concept, Formula, Individual, Role};
use crate::trace::{Event, Rule};

fn neg(c: &Concept) -> Concept {
    c.negate().expect("label concepts outside ⪯/⪰ are negatable")
}

fn neg_f(f: &Formula) -> Formula {
    f.negate().expect("concept-shaped formula")
}

fn has_ineq(label: &Label, a: &Individual, b: &Individual) -> bool {
    label.contains(&Formula::NotEq(a.clone(), b.clone())) || label.contains(&Formula::NotEq(b.clone(), a.clone()))
}

/// Individuals `b` with `{s(a,b), b:C} ⊆ full`.
fn counted<'f>(full: &'f Label, s: &Role, a: &Individual, c: &Concept) -> Vec<&'f Individual> {
    full.iter()
        .filter_map(|f| match f {
            Formula::RoleAssertion(r, x, b) if r == s && x == a => Some(b),
            _ => None,
        })
        .filter(|b| full.contains(&Formula::Instance((*b).clone(), c.clone())))
        .collect()
}

fn has_clique(inds: &[&Individual], size: usize, label: &Label) -> bool {
    fn grow(inds: &[&Individual], chosen: &mut Vec<usize>, from: usize, size: usize, label: &Label) -> bool {
        if chosen.len() == size {
            return true;
        }
        for i in from..inds.len() {
            if chosen.iter().all(|&j| has_ineq(label, inds[i], inds[j])) {
                chosen.push(i);
                if grow(inds, chosen, i + 1, size, label) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    size <= inds.len() && grow(inds, &mut Vec::new(), 0, size, label)
}

/// `a:≤n s.C` with `n+1` pairwise distinct counted successors.
pub(crate) fn counting_clash(_kb: &KnowledgeBase, label: &Label, full: &Label) -> bool {
    label.iter().any(|f| match f {
        Formula::Instance(a, Concept::AtMost(n, s, c)) => {
            let bs = counted(full, s, a, c);
            has_clique(&bs, *n as usize + 1, label)
        }
        _ => false,
    })
}

/// Target concepts of a transition along `r` from `α`: `{D} ∪ {D' | α:∀r.D'}
/// ∪ {∀s.D' | α:∀s.D', r ⊑ s, Trans(s)} ∪ T`.
fn transition_label(
    kb: &KnowledgeBase,
    gamma: &Label,
    alpha: Option<&Individual>,
    r: &Role,
    d: &Concept,
) -> BTreeSet<Concept> {
    let rbox = kb.rbox();
    let mut y: BTreeSet<Concept> = kb.tbox().clone();
    y.insert(d.clone());
    for f in gamma {
        if let Some((beta, Concept::Forall(s, d2))) = f.as_tagged() {
            if beta != alpha {
                continue;
            }
            if s == r {
                y.insert(d2.as_ref().clone());
            }
            if rbox.is_sub(r, s) && rbox.is_transitive(s) {
                y.insert(Concept::Forall(s.clone(), d2.clone()));
            }
        }
    }
    y
}

fn clash_free(y: &BTreeSet<Concept>) -> bool {
    !y.iter().any(|c| c.negate().is_ok_and(|n| y.contains(&n)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Tuple {
    roles: BTreeSet<Role>,
    concepts: BTreeSet<Concept>,
    alpha: Option<Individual>,
}

impl Engine<'_> {
    #[allow(clippy::too_many_arguments)]
    fn connect(
        &mut self,
        v: NodeId,
        ty: NodeType,
        stype: SType,
        label: Label,
        rfmls: Label,
        repl: Option<IndRepl>,
        elabel: Option<EdgeLabel>,
    ) -> (NodeId, bool) {
        let c = self.graph.con_to_succ(Some(v), ty, stype, label, rfmls, repl, elabel);
        if !c.created {
            self.stats.cache_hits += 1;
        }
        (c.node, c.created)
    }

    fn applied(&mut self, rule: Rule, v: NodeId, targets: Vec<(NodeId, bool)>) {
        self.count_rule(rule);
        let fresh: Vec<NodeId> = targets.iter().filter(|t| t.1).map(|t| t.0).collect();
        self.trace.push(|| Event::Applied { rule, node: v, targets });
        for w in fresh {
            self.record_created(w);
        }
    }

    fn repl_of(&self, v: NodeId) -> Option<IndRepl> {
        let n = self.graph.node(v);
        n.is_complex().then(|| n.ind_repl.clone())
    }

    /// US1, US2 and US3, in that order.
    pub(crate) fn try_unary(&mut self, v: NodeId) -> bool {
        if self.graph.node(v).status != Status::Unexpanded {
            return false;
        }
        self.us1(v) || self.us2(v) || self.us3(v)
    }

    fn us1(&mut self, v: NodeId) -> bool {
        let node = self.graph.node(v);
        let rbox = self.kb.rbox();
        let label = node.label.clone();
        let mut x = node.rfmls.clone();
        let mut add = Label::new();
        for f in label.iter() {
            match f {
                Formula::RoleAssertion(r, a, b) => {
                    for s in rbox.supers(r) {
                        add.insert(Formula::RoleAssertion(s.clone(), a.clone(), b.clone()));
                    }
                    continue;
                }
                Formula::Instance(a, Concept::NegNominal(b)) => {
                    x.insert(f.clone());
                    add.insert(Formula::NotEq(a.clone(), b.clone()));
                    continue;
                }
                _ => {}
            }
            let Some((alpha, c)) = f.as_tagged() else { continue };
            match c {
                Concept::And(l, r) => {
                    x.insert(f.clone());
                    add.insert(Formula::tagged(alpha, l.as_ref().clone()));
                    add.insert(Formula::tagged(alpha, r.as_ref().clone()));
                }
                Concept::AtLeast(0, _, _) => {
                    x.insert(f.clone());
                }
                Concept::AtMost(0, s, d) => {
                    x.insert(f.clone());
                    add.insert(Formula::tagged(alpha, Concept::Forall(s.clone(), Arc::new(neg(d)))));
                }
                Concept::Forall(s, d) => {
                    for r in rbox.subs(s) {
                        add.insert(Formula::tagged(alpha, Concept::Forall(r.clone(), d.clone())));
                    }
                    if let Some(a) = alpha {
                        for g in label.iter() {
                            if let Formula::RoleAssertion(r, x0, b) = g
                                && r == s
                                && x0 == a
                            {
                                add.insert(Formula::Instance(b.clone(), d.as_ref().clone()));
                                if rbox.is_transitive(r) {
                                    add.insert(Formula::Instance(b.clone(), c.clone()));
                                }
                            }
                        }
                    }
                }
                _ => {}
            }
        }
        let mut next: Label = label.iter().chain(add.iter()).filter(|f| !x.contains(f)).cloned().collect();
        if next.is_subset(&label) {
            return false;
        }
        next.retain(|f| !x.contains(f));
        let (stype, repl) = (node.stype, self.repl_of(v));
        let t = self.connect(v, NodeType::NonState, stype, next, x, repl, None);
        self.applied(Rule::Us1, v, alloc::vec![t]);
        self.set_status(Rule::Us1, v, Status::FExpanded);
        true
    }

    fn us2(&mut self, v: NodeId) -> bool {
        let node = self.graph.node(v);
        if !node.is_complex() {
            return false;
        }
        let Some((a, b)) = node.label.iter().find_map(|f| match f {
            Formula::Instance(a, Concept::Nominal(b)) => Some((a.clone(), b.clone())),
            _ => None,
        }) else {
            return false;
        };
        let trigger = Formula::Instance(a.clone(), Concept::Nominal(b.clone()));
        let mut x: Label = node.label.iter().filter(|f| **f != trigger).map(|f| f.rename(&b, &a)).collect();
        x.insert(Formula::Eq(a.clone(), b.clone()));
        x.insert(Formula::Eq(b.clone(), a.clone()));
        let to_a = |i: &Individual| if *i == b { a.clone() } else { i.clone() };
        let mut y: Label = node.rfmls.iter().map(|f| f.map_individuals(&to_a, false)).collect();
        y.insert(Formula::Instance(a.clone(), Concept::Nominal(a.clone())));
        let mut repl = node.ind_repl.clone();
        for target in repl.values_mut() {
            if *target == b {
                *target = a.clone();
            }
        }
        repl.insert(b, a);
        let t = self.connect(v, NodeType::NonState, SType::Complex, x, y, Some(repl), None);
        self.applied(Rule::Us2, v, alloc::vec![t]);
        self.set_status(Rule::Us2, v, Status::FExpanded);
        true
    }

    /// `≤1 r.{a}` only matters when `r` is handled by TF; for any other role
    /// it can be neither violated nor decided.
    fn numeric(&self, c: &Concept) -> bool {
        matches!(c, Concept::AtMost(_, r, _) if self.kb.is_numeric(r))
    }

    fn us3(&mut self, v: NodeId) -> bool {
        let node = self.graph.node(v);
        if node.is_state() {
            return false;
        }
        let rbox = self.kb.rbox();
        let mut x = Label::new();
        match node.stype {
            SType::Simple => {
                let cs: Vec<Concept> = node.label.iter().filter_map(|f| f.concept().cloned()).collect();
                let mut scope = self.tbox.clone();
                scope.extend(cs.iter().cloned());
                for c in relevant_in_scope(&self.tbox, &scope, &cs, rbox).into_iter().filter(|c| self.numeric(c)) {
                    x.insert(Formula::ConceptOnly(c));
                }
            }
            SType::Complex => {
                let subjects: BTreeSet<&Individual> = node
                    .label
                    .iter()
                    .filter_map(|f| match f {
                        Formula::Instance(a, _) => Some(a),
                        _ => None,
                    })
                    .collect();
                for a in subjects {
                    let cs = concepts_of(&node.label, a);
                    let mut scope = self.tbox.clone();
                    scope.extend(cs.iter().cloned());
                    // TBox nominals may name individuals merged away on this branch.
                    for c in relevant_in_scope(&self.tbox, &scope, &cs, rbox).into_iter().filter(|c| self.numeric(c)) {
                        x.insert(Formula::Instance(a.clone(), c).substitute(&node.ind_repl));
                    }
                }
            }
        }
        if x.is_subset(&node.label) {
            return false;
        }
        let mut next = node.label.as_ref().clone();
        next.extend(x);
        let (stype, rf, repl) = (node.stype, node.rfmls.clone(), self.repl_of(v));
        let t = self.connect(v, NodeType::NonState, stype, next, rf, repl, None);
        self.applied(Rule::Us3, v, alloc::vec![t]);
        self.set_status(Rule::Us3, v, Status::FExpanded);
        true
    }

    /// Individuals substituted into the complex state `u`: `{subst(a:C) | C ∈ Label(v)}`
    /// without the trivial `x:{x}`.
    fn dn_transfer(&self, v: NodeId, a: &Individual, u: NodeId) -> Label {
        let un = self.graph.node(u);
        self.graph
            .node(v)
            .label
            .iter()
            .filter_map(|f| f.concept())
            .map(|c| Formula::Instance(a.clone(), c.clone()).substitute(&un.ind_repl))
            .filter(|f| !matches!(f, Formula::Instance(x, Concept::Nominal(y)) if x == y))
            .collect()
    }

    pub(crate) fn try_dn(&mut self, v: NodeId) -> bool {
        let node = self.graph.node(v);
        if node.is_complex() {
            return false;
        }
        let Some(a) = node.nominal().cloned() else { return false };
        let fresh = match node.status {
            Status::Unexpanded => true,
            Status::Blocked | Status::ClosedWrt(_) => false,
            _ => return false,
        };
        if !fresh && self.states_quiet(DN_QUIET, v) {
            return false;
        }
        let status = self.graph.node(v).status.clone();
        let states: Vec<NodeId> = self.reach().states_for(v).filter(|&u| !status.is_closed_wrt(u)).collect();
        let mut work = Vec::new();
        for u in states {
            if self.dn_settled.get(&(v, u)).is_some_and(|&at| at >= self.graph.touched(u)) {
                continue;
            }
            let x = self.dn_transfer(v, &a, u);
            let un = self.graph.node(u);
            if x.iter().all(|f| un.full_contains(f)) {
                self.dn_settled.insert((v, u), self.graph.clock());
            } else {
                work.push((u, x));
            }
        }
        if !fresh && work.is_empty() {
            self.record_quiet(DN_QUIET, v);
            return false;
        }
        self.applied(Rule::Dn, v, Vec::new());
        for (u, x) in work {
            let missing: Vec<Formula> = {
                let un = self.graph.node(u);
                x.iter().filter(|f| !un.full_contains(f)).cloned().collect()
            };
            let preds: Vec<NodeId> = self.graph.node(u).predecessors().to_vec();
            for u0 in preds {
                debug_assert_eq!(self.graph.node(u0).successors(), &[u]);
                self.graph.delete_edge(u0, u);
                self.trace.push(|| Event::EdgeDeleted { from: u0, to: u });
                let n0 = self.graph.node(u0);
                let (base, rf, repl) = (n0.label.as_ref().clone(), n0.rfmls.clone(), n0.ind_repl.clone());
                let mut targets = Vec::new();
                let mut with_x = base.clone();
                with_x.extend(x.iter().cloned());
                targets.push(self.connect(
                    u0,
                    NodeType::NonState,
                    SType::Complex,
                    with_x,
                    rf.clone(),
                    Some(repl.clone()),
                    None,
                ));
                for phi in &missing {
                    let mut alt = base.clone();
                    alt.insert(neg_f(phi));
                    targets.push(self.connect(
                        u0,
                        NodeType::NonState,
                        SType::Complex,
                        alt,
                        rf.clone(),
                        Some(repl.clone()),
                        None,
                    ));
                }
                self.applied(Rule::Dn, u0, targets);
            }
        }
        if fresh {
            self.set_status(Rule::Dn, v, Status::Blocked);
        }
        true
    }

    pub(crate) fn try_nus(&mut self, v: NodeId) -> bool {
        let node = self.graph.node(v);
        if node.is_state() || node.status != Status::Unexpanded {
            return false;
        }
        let Some((k, branches, rfmls, repls)) = self.nus_branches(v) else { return false };
        let mut targets = Vec::new();
        let stype = self.graph.node(v).stype;
        for (label, (rf, repl)) in branches.into_iter().zip(rfmls.into_iter().zip(repls)) {
            targets.push(self.connect(v, NodeType::NonState, stype, label, rf, repl, None));
        }
        self.applied(Rule::Nus(k), v, targets);
        self.set_status(Rule::Nus(k), v, Status::FExpanded);
        true
    }

    #[allow(clippy::type_complexity)]
    fn nus_branches(&self, v: NodeId) -> Option<(u8, Vec<Label>, Vec<Label>, Vec<Option<IndRepl>>)> {
        let node = self.graph.node(v);
        let label = node.label.as_ref();
        let full = node.full_label();
        let repl = self.repl_of(v);
        let two = |a: Label, b: Label, rf: &Label| {
            (alloc::vec![a, b], alloc::vec![rf.clone(), rf.clone()], alloc::vec![repl.clone(), repl.clone()])
        };

        // 1: disjunction.
        for f in label {
            if let Some((alpha, Concept::Or(c, d))) = f.as_tagged() {
                let fc = Formula::tagged(alpha, c.as_ref().clone());
                let fd = Formula::tagged(alpha, d.as_ref().clone());
                if full.contains(&fc) || full.contains(&fd) {
                    continue;
                }
                let mut base = label.clone();
                base.remove(f);
                let (mut l1, mut l2) = (base.clone(), base);
                l1.insert(fc);
                l2.insert(fd);
                let mut rf = node.rfmls.clone();
                rf.insert(f.clone());
                let (ls, rfs, reps) = two(l1, l2, &rf);
                return Some((1, ls, rfs, reps));
            }
        }
        if !node.is_complex() {
            return None;
        }

        // 2: choose the qualifying concept at each role successor.
        for f in label {
            let (a, s, c) = match f {
                Formula::Instance(a, Concept::AtMost(_, s, c)) => (a, s, c),
                Formula::Instance(a, Concept::AtLeast(_, s, c) | Concept::Exists(s, c)) if self.kb.is_numeric(s) => {
                    (a, s, c)
                }
                _ => continue,
            };
            for g in label {
                let Formula::RoleAssertion(r, x, b) = g else { continue };
                if r != s || x != a {
                    continue;
                }
                let pos = Formula::Instance(b.clone(), c.as_ref().clone());
                let negf = neg_f(&pos);
                if full.contains(&pos) || full.contains(&negf) {
                    continue;
                }
                let (mut l1, mut l2) = (label.clone(), label.clone());
                l1.insert(pos);
                l2.insert(negf);
                let (ls, rfs, reps) = two(l1, l2, &node.rfmls);
                return Some((2, ls, rfs, reps));
            }
        }

        // 3: merge or distinguish two counted successors.
        for f in full.iter() {
            let Formula::Instance(a, Concept::AtMost(_, s, c)) = f else { continue };
            let mut bs = counted(&full, s, a, c);
            bs.sort_by_key(|b| (self.kb.individual_rank(b), (*b).clone()));
            bs.dedup();
            for i in 0..bs.len() {
                for j in i + 1..bs.len() {
                    let (b, b2) = (bs[i], bs[j]);
                    if has_ineq(label, b, b2) {
                        continue;
                    }
                    let mut l1 = label.clone();
                    l1.insert(Formula::NotEq(b.clone(), b2.clone()));
                    l1.insert(Formula::NotEq(b2.clone(), b.clone()));
                    let mut l2: Label = label.iter().map(|f| f.rename(b2, b)).collect();
                    l2.insert(Formula::Eq(b.clone(), b2.clone()));
                    l2.insert(Formula::Eq(b2.clone(), b.clone()));
                    let to_b = |x: &Individual| if x == b2 { b.clone() } else { x.clone() };
                    let rf2: Label = node.rfmls.iter().map(|f| f.map_individuals(&to_b, false)).collect();
                    let mut repl2 = node.ind_repl.clone();
                    for t in repl2.values_mut() {
                        if t == b2 {
                            *t = b.clone();
                        }
                    }
                    repl2.insert(b2.clone(), b.clone());
                    return Some((
                        3,
                        alloc::vec![l1, l2],
                        alloc::vec![node.rfmls.clone(), rf2],
                        alloc::vec![repl.clone(), Some(repl2)],
                    ));
                }
            }
        }

        // 4: decide sub-role assertions under an at-most restriction.
        let rbox = self.kb.rbox();
        for f in label {
            let Formula::Instance(a, Concept::AtMost(_, r, _)) = f else { continue };
            for g in label {
                let Formula::RoleAssertion(r2, x, b) = g else { continue };
                if r2 != r || x != a {
                    continue;
                }
                for h in label {
                    let s = match h {
                        Formula::Instance(y, Concept::AtLeast(_, s, _) | Concept::Exists(s, _)) if y == a => s,
                        _ => continue,
                    };
                    if !rbox.is_sub(s, r) {
                        continue;
                    }
                    let pos = Formula::RoleAssertion(s.clone(), a.clone(), b.clone());
                    let negf = Formula::NegRoleAssertion(s.clone(), a.clone(), b.clone());
                    if label.contains(&pos) || label.contains(&negf) {
                        continue;
                    }
                    let (mut l1, mut l2) = (label.clone(), label.clone());
                    l1.insert(pos);
                    l2.insert(negf);
                    let (ls, rfs, reps) = two(l1, l2, &node.rfmls);
                    return Some((4, ls, rfs, reps));
                }
            }
        }
        None
    }

    pub(crate) fn try_fs(&mut self, v: NodeId) -> bool {
        let node = self.graph.node(v);
        if node.is_state() || node.status != Status::Unexpanded {
            return false;
        }
        if !node.is_complex() {
            self.graph.set_type(v, NodeType::State);
            self.count_rule(Rule::Fs);
            self.trace.push(|| Event::BecameState { node: v });
            return true;
        }
        let full = node.full_label();
        let mut x = node.label.as_ref().clone();
        for f in node.label.iter() {
            if let Formula::Instance(a, Concept::AtMost(n, s, d)) = f {
                let m = counted(&full, s, a, d).len() as u32;
                debug_assert!(m <= *n, "counting clash left undetected");
                x.insert(Formula::Instance(a.clone(), Concept::PrecEq(n.saturating_sub(m), s.clone(), d.clone())));
            }
            let ge = match f {
                Formula::Instance(a, Concept::AtLeast(n, s, d)) => Some((a, *n, s, d)),
                Formula::Instance(a, Concept::Exists(s, d)) => Some((a, 1, s, d)),
                _ => None,
            };
            if let Some((a, n, s, d)) = ge {
                let m = counted(&full, s, a, d).len() as u32;
                if self.kb.is_numeric(s) && n > m {
                    x.insert(Formula::Instance(a.clone(), Concept::SuccEq(n - m, s.clone(), d.clone())));
                }
            }
        }
        let (rf, repl) = (node.rfmls.clone(), node.ind_repl.clone());
        let t = self.connect(v, NodeType::State, SType::Complex, x, rf, Some(repl), None);
        self.applied(Rule::Fs, v, alloc::vec![t]);
        self.set_status(Rule::Fs, v, Status::FExpanded);
        true
    }

    pub(crate) fn try_tp(&mut self, v: NodeId) -> bool {
        let node = self.graph.node(v);
        if !node.is_state() || node.status != Status::Unexpanded {
            return false;
        }
        let label = node.label.clone();
        let mut targets = Vec::new();
        for f in label.iter() {
            let Some((alpha, Concept::Exists(r, d))) = f.as_tagged() else { continue };
            if self.kb.is_numeric(r) {
                continue;
            }
            let y = transition_label(self.kb, &label, alpha, r, d);
            let e = EdgeLabel {
                kind: EdgeKind::TestingClosedness,
                roles: self.kb.rbox().supers(r).cloned().collect(),
                ind: alpha.cloned(),
            };
            let y: Label = y.into_iter().map(Formula::ConceptOnly).collect();
            targets.push(self.connect(v, NodeType::NonState, SType::Simple, y, Label::new(), None, Some(e)));
        }
        self.applied(Rule::Tp, v, targets);
        self.set_status(Rule::Tp, v, Status::PExpanded);
        true
    }

    /// `Γ`: the label, with number restrictions of simple states lifted to `⪯`/`⪰`.
    fn gamma(&self, v: NodeId) -> Label {
        let node = self.graph.node(v);
        let mut gamma = node.label.as_ref().clone();
        if !node.is_complex() {
            for f in node.label.iter() {
                let lifted = match f {
                    Formula::ConceptOnly(Concept::AtMost(n, r, c)) => Concept::PrecEq(*n, r.clone(), c.clone()),
                    Formula::ConceptOnly(Concept::AtLeast(n, r, c)) => Concept::SuccEq(*n, r.clone(), c.clone()),
                    Formula::ConceptOnly(Concept::Exists(r, c)) if self.kb.is_numeric(r) => {
                        Concept::SuccEq(1, r.clone(), c.clone())
                    }
                    _ => continue,
                };
                gamma.insert(Formula::ConceptOnly(lifted));
            }
        }
        gamma
    }

    pub(crate) fn try_tf(&mut self, v: NodeId) -> bool {
        let node = self.graph.node(v);
        if !node.is_state() || node.status != Status::PExpanded {
            return false;
        }
        let gamma = self.gamma(v);
        let rbox = self.kb.rbox();
        let mut tuples: Vec<Tuple> = Vec::new();
        for f in &gamma {
            let Some((alpha, Concept::SuccEq(_, r, d))) = f.as_tagged() else { continue };
            let t = Tuple {
                roles: rbox.supers(r).cloned().collect(),
                concepts: transition_label(self.kb, &gamma, alpha, r, d),
                alpha: alpha.cloned(),
            };
            if !tuples.contains(&t) {
                tuples.push(t);
            }
        }
        let at_most: Vec<(Option<Individual>, Role, Concept)> = gamma
            .iter()
            .filter_map(|f| match f.as_tagged() {
                Some((alpha, Concept::PrecEq(_, r, c))) => Some((alpha.cloned(), r.clone(), c.as_ref().clone())),
                _ => None,
            })
            .collect();
        for (alpha, r, c) in &at_most {
            let cn = neg(c);
            let mut next = Vec::new();
            for t in tuples {
                if t.alpha == *alpha && t.roles.contains(r) && !t.concepts.contains(c) && !t.concepts.contains(&cn) {
                    for extra in [c, &cn] {
                        let mut u = t.clone();
                        u.concepts.insert(extra.clone());
                        if !next.contains(&u) {
                            next.push(u);
                        }
                    }
                } else if !next.contains(&t) {
                    next.push(t);
                }
            }
            tuples = next;
        }
        loop {
            let mut added = false;
            for (alpha, r, c) in &at_most {
                let idx: Vec<usize> = (0..tuples.len())
                    .filter(|&i| {
                        tuples[i].alpha == *alpha && tuples[i].roles.contains(r) && tuples[i].concepts.contains(c)
                    })
                    .collect();
                for (k, &i) in idx.iter().enumerate() {
                    for &j in &idx[k + 1..] {
                        let merged = Tuple {
                            roles: tuples[i].roles.union(&tuples[j].roles).cloned().collect(),
                            concepts: tuples[i].concepts.union(&tuples[j].concepts).cloned().collect(),
                            alpha: alpha.clone(),
                        };
                        if clash_free(&merged.concepts) && !tuples.contains(&merged) {
                            tuples.push(merged);
                            added = true;
                        }
                    }
                }
            }
            if !added {
                break;
            }
        }

        let mut targets = Vec::new();
        for t in &tuples {
            let e = EdgeLabel { kind: EdgeKind::CheckingFeasibility, roles: t.roles.clone(), ind: t.alpha.clone() };
            let y: Label = t.concepts.iter().cloned().map(Formula::ConceptOnly).collect();
            targets.push(self.connect(v, NodeType::NonState, SType::Simple, y, Label::new(), None, Some(e)));
        }

        let mut vars = Vec::new();
        for &w in self.graph.node(v).successors() {
            for e in self.graph.elabels(v, w) {
                if e.kind == EdgeKind::CheckingFeasibility {
                    vars.push((w, e.clone()));
                }
            }
        }
        let mut problem = Problem::new(vars.len());
        for f in &gamma {
            let Some((alpha, c)) = f.as_tagged() else { continue };
            let (ge, n, r, d) = match c {
                Concept::SuccEq(n, r, d) => (true, *n, r, d),
                Concept::PrecEq(n, r, d) => (false, *n, r, d),
                _ => continue,
            };
            let member = Formula::ConceptOnly(d.as_ref().clone());
            let sum: Vec<usize> = vars
                .iter()
                .enumerate()
                .filter(|(_, (w, e))| {
                    e.roles.contains(r) && e.ind.as_ref() == alpha && self.graph.node(*w).label.contains(&member)
                })
                .map(|(j, _)| j)
                .collect();
            problem.push(if ge { Constraint::ge(sum, n) } else { Constraint::le(sum, n) });
        }
        self.stats.max_ilp_vars = self.stats.max_ilp_vars.max(vars.len());
        let il = IlConstraints { vars, problem };
        self.applied(Rule::Tf, v, targets);
        self.trace.push(|| Event::Constraints { node: v, vars: il.vars.clone(), problem: il.problem.clone() });
        *self.graph.il_mut(v) = il;
        self.ilp_memo.retain(|(w, _), _| *w != v);
        self.set_status(Rule::Tf, v, Status::FExpanded);
        true
    }
}
