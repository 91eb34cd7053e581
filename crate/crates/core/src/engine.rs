//! The tableau driver: initialization, rule scheduling and status propagation.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::graph::{Graph, Label, NodeId, NodeType, Reach, SType, Status};
use crate::ilp::{self, Feasibility};
use crate::kb::KnowledgeBase;
use crate::syntax::{Concept, Formula};
use crate::trace::{Event, Rule, Trace};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EngineConfig {
    /// Search-node budget for each integer feasibility check.
    pub ilp_node_budget: u64,
    /// Maximum number of expansion rule applications.
    pub max_steps: Option<u64>,
    pub trace: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { ilp_node_budget: ilp::DEFAULT_NODE_BUDGET, max_steps: None, trace: false }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Satisfiable,
    Unsatisfiable,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub steps: u64,
    pub nodes: usize,
    pub edges: usize,
    pub cache_hits: u64,
    pub ilp_checks: u64,
    pub ilp_memo_hits: u64,
    pub max_ilp_vars: usize,
    pub rules: BTreeMap<String, u64>,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub verdict: Verdict,
    pub graph: Graph,
    pub trace: Trace,
    pub stats: Stats,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("integer feasibility check at v{node} exceeded its budget of {budget} search nodes")]
    IlpBudget { node: NodeId, budget: u64 },
    #[error("step limit of {limit} rule applications reached")]
    StepLimit { limit: u64, stats: Box<Stats> },
    #[error("internal invariant violated: {0}")]
    Defect(String),
}

/// Decides satisfiability of `kb`.
pub fn run(kb: &KnowledgeBase, config: &EngineConfig) -> Result<RunOutcome, EngineError> {
    let mut engine = Engine::new(kb, config);
    engine.init();
    loop {
        engine.propagate()?;
        if !engine.graph.root().status.is_undecided() {
            break;
        }
        if let Some(limit) = config.max_steps
            && engine.stats.steps >= limit
        {
            engine.finish_stats();
            return Err(EngineError::StepLimit { limit, stats: Box::new(engine.stats) });
        }
        if !engine.step()? {
            break;
        }
        engine.stats.steps += 1;
    }
    let verdict = match engine.graph.root().status {
        Status::Closed => Verdict::Unsatisfiable,
        _ => Verdict::Satisfiable,
    };
    engine.finish_stats();
    Ok(RunOutcome { verdict, graph: engine.graph, trace: engine.trace, stats: engine.stats })
}

pub(crate) struct Engine<'a> {
    pub(crate) kb: &'a KnowledgeBase,
    pub(crate) config: &'a EngineConfig,
    pub(crate) graph: Graph,
    pub(crate) trace: Trace,
    pub(crate) stats: Stats,
    pub(crate) tbox: Vec<Concept>,
    reach: Option<(u64, Reach)>,
    pub(crate) ilp_memo: BTreeMap<(NodeId, BTreeSet<usize>), bool>,
    /// `rfmls.len()` of nodes already found clash-free.
    clash_free: BTreeMap<NodeId, usize>,
    /// Nodes where UPS3 last found nothing to do: the clock after that
    /// evaluation and the reachability answers it used.
    ups3_quiet: BTreeMap<NodeId, (u64, Vec<(NodeId, bool)>)>,
    via_log: Vec<(NodeId, bool)>,
    /// `(v, u)` pairs where DN found nothing to transfer, with the clock.
    pub(crate) dn_settled: BTreeMap<(NodeId, NodeId), u64>,
    /// Same for UPS2: `(v, u)` pairs without a contradiction.
    ups2_settled: BTreeMap<(NodeId, NodeId), u64>,
    /// Nominal nodes where DN (index 0) or UPS2 (index 1) last did nothing:
    /// the clock then and the states `v` could affect the root through.
    states_quiet: [BTreeMap<NodeId, (u64, Vec<NodeId>)>; 2],
}

pub(crate) const DN_QUIET: usize = 0;
const UPS2_QUIET: usize = 1;

impl<'a> Engine<'a> {
    /// Whether the check `which` at `v` would again find nothing to do.
    pub(crate) fn states_quiet(&mut self, which: usize, v: NodeId) -> bool {
        self.reach();
        let reach = &self.reach.as_ref().expect("just computed").1;
        let g = &self.graph;
        self.states_quiet[which].get(&v).is_some_and(|(at, states)| {
            g.touched(v) <= *at
                && reach.states_for(v).eq(states.iter().copied())
                && states.iter().all(|&u| g.touched(u) <= *at)
        })
    }

    pub(crate) fn record_quiet(&mut self, which: usize, v: NodeId) {
        let states = self.reach().states_for(v).collect();
        let at = self.graph.clock();
        self.states_quiet[which].insert(v, (at, states));
    }

    fn new(kb: &'a KnowledgeBase, config: &'a EngineConfig) -> Self {
        Engine {
            kb,
            config,
            graph: Graph::new(),
            trace: Trace::new(config.trace),
            stats: Stats::default(),
            tbox: kb.tbox().iter().cloned().collect(),
            reach: None,
            ilp_memo: BTreeMap::new(),
            clash_free: BTreeMap::new(),
            ups3_quiet: BTreeMap::new(),
            via_log: Vec::new(),
            dn_settled: BTreeMap::new(),
            ups2_settled: BTreeMap::new(),
            states_quiet: Default::default(),
        }
    }

    fn finish_stats(&mut self) {
        self.stats.nodes = self.graph.len();
        self.stats.edges = self.graph.edge_count();
    }

    fn init(&mut self) {
        let mut label: Label = self.kb.abox().clone();
        for a in self.kb.individuals() {
            for c in &self.tbox {
                label.insert(Formula::Instance(a.clone(), c.clone()));
            }
        }
        let root =
            self.graph.con_to_succ(None, NodeType::NonState, SType::Complex, label, Label::new(), None, None).node;
        self.trace.push(|| Event::Applied { rule: Rule::Init, node: root, targets: Vec::new() });
        self.record_created(root);
    }

    pub(crate) fn record_created(&mut self, v: NodeId) {
        let g = &self.graph;
        self.trace.push(|| {
            let n = g.node(v);
            Event::Created { node: v, ty: n.ty, stype: n.stype, label: n.label.as_ref().clone() }
        });
    }

    pub(crate) fn count_rule(&mut self, rule: Rule) {
        *self.stats.rules.entry(alloc::format!("{rule}")).or_default() += 1;
    }

    pub(crate) fn reach(&mut self) -> &Reach {
        let version = self.graph.version();
        if self.reach.as_ref().is_none_or(|(v, _)| *v != version) {
            self.reach = Some((version, self.graph.reach()));
        }
        &self.reach.as_ref().expect("just computed").1
    }

    pub(crate) fn set_status(&mut self, rule: Rule, v: NodeId, to: Status) -> bool {
        let from = self.graph.node(v).status.clone();
        if !self.graph.set_status(v, to.clone()) {
            return false;
        }
        self.trace.push(|| Event::Status { rule, node: v, from, to });
        true
    }

    pub(crate) fn set_closed_wrt(&mut self, rule: Rule, v: NodeId, u: NodeId) -> bool {
        if self.graph.node(v).status.is_closed_wrt(u) {
            return false;
        }
        let from = self.graph.node(v).status.clone();
        if !self.graph.set_closed_wrt(v, u) {
            return false;
        }
        let to = self.graph.node(v).status.clone();
        self.trace.push(|| Event::Status { rule, node: v, from, to });
        if u == v {
            self.set_status(Rule::Ups1, v, Status::Closed);
        }
        true
    }

    /// Feasibility of `ILConstraints(v)` plus `x = 0` for `zeros`.
    pub(crate) fn feasible_with(&mut self, v: NodeId, zeros: BTreeSet<usize>) -> Result<bool, EngineError> {
        let il = &self.graph.node(v).il;
        let mut key_zeros = il.zeros();
        key_zeros.extend(zeros.iter().copied());
        let key = (v, key_zeros);
        if let Some(&r) = self.ilp_memo.get(&key) {
            self.stats.ilp_memo_hits += 1;
            return Ok(r);
        }
        let problem = il.with_zeros(zeros);
        self.stats.ilp_checks += 1;
        let budget = self.config.ilp_node_budget;
        let res = ilp::check_feasibility_with_budget(&problem, budget)
            .map_err(|_| EngineError::IlpBudget { node: v, budget })?;
        let ok = matches!(res, Feasibility::Feasible(_));
        self.ilp_memo.insert(key, ok);
        Ok(ok)
    }

    /// Applies the update rules until nothing changes.
    fn propagate(&mut self) -> Result<(), EngineError> {
        loop {
            let mut changed = false;
            for v in 0..self.graph.len() {
                changed |= self.ups1(v);
            }
            for v in 0..self.graph.len() {
                changed |= self.ups2(v);
            }
            for v in (0..self.graph.len()).rev() {
                changed |= self.ups3(v)?;
            }
            if !changed {
                return Ok(());
            }
        }
    }

    /// One expansion rule application; false when none applies.
    fn step(&mut self) -> Result<bool, EngineError> {
        let order = self.graph.preorder();
        for &v in &order {
            if self.try_unary(v) {
                return Ok(true);
            }
        }
        for &v in &order {
            if self.try_dn(v) || self.try_nus(v) || self.try_fs(v) || self.try_tp(v) || self.try_tf(v) {
                return Ok(true);
            }
        }
        Ok(false)
    }

    // UPS1: clashes, and f-expanded states without successors.
    fn ups1(&mut self, v: NodeId) -> bool {
        let node = self.graph.node(v);
        if !node.status.is_undecided() {
            return false;
        }
        if node.status.is_closed_wrt(v) {
            return self.set_status(Rule::Ups1, v, Status::Closed);
        }
        if node.is_state() && node.status == Status::FExpanded && node.successors().is_empty() {
            return self.set_status(Rule::Ups1, v, Status::Open);
        }
        if self.clash_free.get(&v) == Some(&node.rfmls.len()) {
            return false;
        }
        if self.has_clash(v) {
            return self.set_status(Rule::Ups1, v, Status::Closed);
        }
        let n = self.graph.node(v).rfmls.len();
        self.clash_free.insert(v, n);
        false
    }

    fn has_clash(&self, v: NodeId) -> bool {
        let node = self.graph.node(v);
        let full = node.full_label();
        for f in &full {
            match f {
                Formula::ConceptOnly(Concept::Bot) | Formula::Instance(_, Concept::Bot) => return true,
                Formula::NotEq(a, b) if a == b => return true,
                Formula::RoleAssertion(r, a, b)
                    if full.contains(&Formula::NegRoleAssertion(r.clone(), a.clone(), b.clone())) =>
                {
                    return true;
                }
                _ => {}
            }
            if let Some((alpha, c)) = f.as_tagged()
                && let Ok(neg) = c.negate()
                && full.contains(&Formula::tagged(alpha, neg))
            {
                return true;
            }
        }
        !node.is_state() && node.is_complex() && crate::rules::counting_clash(self.kb, &node.label, &full)
    }

    // UPS2: a nominal node contradicting a complex state it hangs below.
    fn ups2(&mut self, v: NodeId) -> bool {
        let node = self.graph.node(v);
        if node.is_complex() || !node.status.is_undecided() {
            return false;
        }
        let Some(a) = node.nominal().cloned() else { return false };
        if self.states_quiet(UPS2_QUIET, v) {
            return false;
        }
        let label = self.graph.node(v).label.clone();
        let states: Vec<NodeId> = self.reach().states_for(v).collect();
        let mut changed = false;
        for u in states {
            if self.graph.node(v).status.is_closed_wrt(u)
                || self.ups2_settled.get(&(v, u)).is_some_and(|&at| at >= self.graph.touched(u))
            {
                continue;
            }
            let un = self.graph.node(u);
            let hit = label.iter().filter_map(Formula::concept).any(|c| {
                c.negate()
                    .is_ok_and(|neg| un.full_contains(&Formula::Instance(a.clone(), neg).substitute(&un.ind_repl)))
            });
            if hit {
                changed |= self.set_closed_wrt(Rule::Ups2, v, u);
            } else {
                self.ups2_settled.insert((v, u), self.graph.clock());
            }
        }
        if !changed {
            self.record_quiet(UPS2_QUIET, v);
        }
        changed
    }

    // UPS3: propagation of statuses from successors. Skipped when nothing
    // it reads has changed since it last returned false.
    fn ups3(&mut self, v: NodeId) -> Result<bool, EngineError> {
        if let Some((at, log)) = self.ups3_quiet.remove(&v) {
            let g = &self.graph;
            let mut stale = g.touched(v) > at || g.node(v).successors().iter().any(|&w| g.touched(w) > at);
            if !stale && !log.is_empty() {
                let reach = self.reach();
                stale = log.iter().any(|&(u, b)| reach.may_affect_via(v, u) != b);
            }
            if !stale {
                self.ups3_quiet.insert(v, (at, log));
                return Ok(false);
            }
        }
        self.via_log.clear();
        let changed = self.ups3_eval(v)?;
        if !changed {
            let log = core::mem::take(&mut self.via_log);
            self.ups3_quiet.insert(v, (self.graph.clock(), log));
        }
        Ok(changed)
    }

    fn logged_may_affect_via(&mut self, v: NodeId, u: NodeId) -> bool {
        let b = self.reach().may_affect_via(v, u);
        self.via_log.push((u, b));
        b
    }

    fn ups3_eval(&mut self, v: NodeId) -> Result<bool, EngineError> {
        let node = self.graph.node(v);
        if matches!(node.status, Status::Unexpanded | Status::Closed | Status::Open) {
            return Ok(false);
        }
        let succs: Vec<NodeId> = node.successors().to_vec();
        if succs.is_empty() {
            return Ok(false);
        }
        if !node.is_state() {
            let st = |w: &NodeId| self.graph.node(*w).status.clone();
            if succs.iter().any(|w| st(w) == Status::Open) {
                return Ok(self.set_status(Rule::Ups3(1), v, Status::Open));
            }
            if succs.iter().all(|w| st(w) == Status::Closed) {
                return Ok(self.set_status(Rule::Ups3(1), v, Status::Closed));
            }
            let mut common: Option<BTreeSet<NodeId>> = None;
            for w in &succs {
                match st(w) {
                    Status::Closed => {}
                    Status::ClosedWrt(us) => {
                        common = Some(match common {
                            None => us,
                            Some(c) => c.intersection(&us).copied().collect(),
                        });
                    }
                    _ => return Ok(false),
                }
            }
            let mut changed = false;
            for u in common.unwrap_or_default() {
                changed |= self.set_closed_wrt(Rule::Ups3(1), v, u);
            }
            return Ok(changed);
        }
        self.ups3_state(v, &succs)
    }

    fn ups3_state(&mut self, v: NodeId, succs: &[NodeId]) -> Result<bool, EngineError> {
        use crate::graph::EdgeKind::*;
        // Closed successors.
        for &w in succs {
            if self.graph.node(w).status != Status::Closed {
                continue;
            }
            let labels: Vec<_> = self.graph.elabels(v, w).cloned().collect();
            if labels.iter().any(|e| e.kind == TestingClosedness) {
                return Ok(self.set_status(Rule::Ups3(2), v, Status::Closed));
            }
            let il = &self.graph.node(v).il;
            let existing = il.zeros();
            let fresh: Vec<usize> =
                labels.iter().filter_map(|e| il.var(w, e)).filter(|j| !existing.contains(j)).collect();
            for j in fresh {
                self.graph.il_mut(v).problem.push(ilp::Constraint::eq0(j));
            }
        }
        if !self.feasible_with(v, BTreeSet::new())? {
            return Ok(self.set_status(Rule::Ups3(2), v, Status::Closed));
        }

        // Successors closed w.r.t. a complex state above v.
        let mut us: BTreeSet<NodeId> = BTreeSet::new();
        for &w in succs {
            if let Status::ClosedWrt(ws) = &self.graph.node(w).status {
                us.extend(ws.iter().copied());
            }
        }
        let mut changed = false;
        for u in us {
            if self.graph.node(v).status.is_closed_wrt(u) || !self.logged_may_affect_via(v, u) {
                continue;
            }
            let mut zeros = BTreeSet::new();
            let mut tc_hit = false;
            for &w in succs {
                if !self.graph.node(w).status.is_closed_wrt(u) {
                    continue;
                }
                for e in self.graph.elabels(v, w) {
                    match e.kind {
                        TestingClosedness => tc_hit = true,
                        CheckingFeasibility => {
                            zeros.extend(self.graph.node(v).il.var(w, e));
                        }
                    }
                }
            }
            if tc_hit || !self.feasible_with(v, zeros)? {
                changed |= self.set_closed_wrt(Rule::Ups3(3), v, u);
            }
        }
        if changed {
            return Ok(true);
        }

        // Open.
        if self.graph.node(v).status != Status::FExpanded {
            return Ok(false);
        }
        let mut zeros = BTreeSet::new();
        for &w in succs {
            let open = self.graph.node(w).status == Status::Open;
            for e in self.graph.elabels(v, w) {
                match e.kind {
                    TestingClosedness if !open => return Ok(false),
                    CheckingFeasibility if !open => {
                        zeros.extend(self.graph.node(v).il.var(w, e));
                    }
                    _ => {}
                }
            }
        }
        if self.feasible_with(v, zeros)? {
            return Ok(self.set_status(Rule::Ups3(4), v, Status::Open));
        }
        Ok(false)
    }
}
