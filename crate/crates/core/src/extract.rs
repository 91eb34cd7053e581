//! Reading a finite model off a tableau whose root is not closed.
//!
//! Named elements come from the individuals kept by the terminal complex
//! state `u` of a saturation path of the root. Every other element stands
//! for a simple state `f(z)`; its successors are chosen by a fixed solution
//! of the state's integer constraints. Elements are memoized by
//! `(saturation path, copy index)`, so the result is finite even though the
//! tableau graph has cycles.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec::Vec;

use crate::engine::{RunOutcome, Verdict};
use crate::graph::{EdgeKind, Graph, NodeId, Status};
use crate::ilp::{self, Constraint, Feasibility};
use crate::kb::KnowledgeBase;
use crate::model::{Element, Interpretation, ModelGraph};
use crate::syntax::{Concept, Formula, Individual};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ExtractError {
    #[error("the root is closed")]
    RootClosed,
    #[error("no admissible successor from v{0}")]
    DeadEnd(NodeId),
    #[error("constraints of v{0} have no solution")]
    Infeasible(NodeId),
    #[error("integer feasibility budget exceeded at v{0}")]
    Budget(NodeId),
    #[error("testingClosedness successor v{1} of v{0} is closed")]
    ClosedTransition(NodeId, NodeId),
    #[error("blocked node v{0} names no individual kept by the terminal state")]
    BadBlockedTarget(NodeId),
}

#[derive(Clone, Debug)]
pub struct Extraction {
    /// Saturation path of the root; its last node is `u`.
    pub root_path: Vec<NodeId>,
    pub model_graph: ModelGraph,
    /// The simple state each anonymous element was made from.
    pub origin: Vec<Option<NodeId>>,
    pub model: Interpretation,
}

/// Builds the model graph and its corresponding model for a satisfiable run.
pub fn extract_model(kb: &KnowledgeBase, outcome: &RunOutcome) -> Result<Extraction, ExtractError> {
    if outcome.verdict == Verdict::Unsatisfiable {
        return Err(ExtractError::RootClosed);
    }
    Extractor::new(kb, &outcome.graph).run()
}

fn admissible(status: &Status, u: NodeId, open: bool) -> bool {
    if open { *status == Status::Open } else { *status != Status::Closed && !status.is_closed_wrt(u) }
}

/// Shortest path from `w0` to a node accepted by `end`, where `step(x, y)`
/// says whether `y` may follow `x`. Ties go to smaller node ids. Caching can
/// close cycles among non-states, so a greedy walk could loop forever.
fn shortest_path(
    g: &Graph,
    w0: NodeId,
    end: impl Fn(NodeId) -> bool,
    step: impl Fn(NodeId, NodeId) -> bool,
) -> Result<Vec<NodeId>, ExtractError> {
    let mut parent: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    let mut queue = VecDeque::from([w0]);
    let mut seen = BTreeSet::from([w0]);
    while let Some(x) = queue.pop_front() {
        if end(x) {
            let mut path = alloc::vec![x];
            let mut y = x;
            while let Some(&p) = parent.get(&y) {
                path.push(p);
                y = p;
            }
            path.reverse();
            return Ok(path);
        }
        let mut next: Vec<NodeId> = g.node(x).successors().iter().copied().filter(|&y| step(x, y)).collect();
        next.sort_unstable();
        for y in next {
            if seen.insert(y) {
                parent.insert(y, x);
                queue.push_back(y);
            }
        }
    }
    Err(ExtractError::DeadEnd(w0))
}

/// Saturation path of the root: non-closed nodes down to a state, keeping
/// to open nodes once an open node is entered.
pub fn root_saturation_path(g: &Graph) -> Result<Vec<NodeId>, ExtractError> {
    if g.node(Graph::ROOT).status == Status::Closed {
        return Err(ExtractError::RootClosed);
    }
    shortest_path(
        g,
        Graph::ROOT,
        |x| g.node(x).is_state(),
        |x, y| {
            let st = &g.node(y).status;
            if g.node(x).status == Status::Open { *st == Status::Open } else { *st != Status::Closed }
        },
    )
}

/// Saturation path of `w0` w.r.t. `u`. Ends at a state, or at a nominal
/// node that was never expanded.
pub fn saturation_path(g: &Graph, w0: NodeId, u: NodeId, open: bool) -> Result<Vec<NodeId>, ExtractError> {
    shortest_path(
        g,
        w0,
        |x| {
            let n = g.node(x);
            n.is_state() || (n.nominal().is_some() && n.successors().is_empty())
        },
        |x, y| admissible(&g.node(y).status, u, open || g.node(x).status == Status::Open),
    )
}

struct Extractor<'a> {
    kb: &'a KnowledgeBase,
    g: &'a Graph,
    u: NodeId,
    rep: BTreeMap<Individual, Individual>,
    mg: ModelGraph,
    origin: Vec<Option<NodeId>>,
    memo: BTreeMap<(Vec<NodeId>, usize), Element>,
    queue: VecDeque<Element>,
}

impl<'a> Extractor<'a> {
    fn new(kb: &'a KnowledgeBase, g: &'a Graph) -> Self {
        Extractor {
            kb,
            g,
            u: 0,
            rep: BTreeMap::new(),
            mg: ModelGraph::default(),
            origin: Vec::new(),
            memo: BTreeMap::new(),
            queue: VecDeque::new(),
        }
    }

    fn rep_of(&self, a: &Individual) -> Individual {
        let mut x = a.clone();
        for _ in 0..=self.rep.len() {
            match self.rep.get(&x) {
                Some(y) if *y != x => x = y.clone(),
                _ => break,
            }
        }
        x
    }

    /// Substituted concepts of the full labels along `path`. A cached node
    /// reached again only gains reduced formulas itself, not in its
    /// descendants, so the last node alone can miss some of them.
    fn subst_concepts(&self, path: &[NodeId]) -> BTreeSet<Concept> {
        path.iter()
            .flat_map(|&v| self.g.node(v).full_label())
            .filter_map(|f| f.concept().cloned())
            .map(|c| c.map_individuals(&|x| self.rep_of(x)))
            .collect()
    }

    fn run(mut self) -> Result<Extraction, ExtractError> {
        let root_path = root_saturation_path(self.g)?;
        self.u = *root_path.last().expect("non-empty");
        let un = self.g.node(self.u);
        self.rep = un.ind_repl.clone();
        let full: BTreeSet<Formula> = root_path.iter().flat_map(|&v| self.g.node(v).full_label()).collect();

        let mut named: BTreeMap<Individual, Element> = BTreeMap::new();
        let mut kept: Vec<Individual> = Vec::new();
        for a in self.kb.individuals() {
            let r = self.rep_of(a);
            if !kept.contains(&r) {
                kept.push(r);
            }
        }
        for a in &kept {
            let ca: BTreeSet<Concept> = full
                .iter()
                .filter_map(|f| match f {
                    Formula::Instance(b, c) if self.rep_of(b) == *a => Some(c.map_individuals(&|x| self.rep_of(x))),
                    _ => None,
                })
                .collect();
            let x = self.mg.add_element(ca);
            self.origin.push(None);
            named.insert(a.clone(), x);
            self.queue.push_back(x);
        }
        for a in self.kb.individuals() {
            let x = named[&self.rep_of(a)];
            self.mg.individuals.insert(a.clone(), x);
        }
        for f in &full {
            if let Formula::RoleAssertion(r, a, b) = f {
                let (x, y) = (named[&self.rep_of(a)], named[&self.rep_of(b)]);
                self.mg.add_edge(r, x, y);
            }
        }

        while let Some(y) = self.queue.pop_front() {
            self.resolve(y, &named)?;
        }
        let model = self.mg.corresponding_model(self.kb);
        Ok(Extraction { root_path, model_graph: self.mg, origin: self.origin, model })
    }

    fn resolve(&mut self, y: Element, named: &BTreeMap<Individual, Element>) -> Result<(), ExtractError> {
        let g = self.g;
        let u = self.u;
        let (v, ind) = match self.origin[y] {
            Some(v) => (v, None),
            None => {
                let a = named.iter().find(|(_, x)| **x == y).map(|(a, _)| a.clone()).expect("named element");
                (u, Some(a))
            }
        };
        let open = g.node(v).status == Status::Open;
        let vn = g.node(v);
        let mut pairs = Vec::new();
        for &w in vn.successors() {
            for e in g.elabels(v, w) {
                if ind.is_some() && e.ind != ind {
                    continue;
                }
                pairs.push((w, e.clone()));
            }
        }

        let mut problem = vn.il.problem.clone();
        let mut paths: Vec<Option<Vec<NodeId>>> = Vec::new();
        for (w, e) in &pairs {
            let usable = admissible(&g.node(*w).status, u, open);
            match e.kind {
                EdgeKind::TestingClosedness if !usable => return Err(ExtractError::ClosedTransition(v, *w)),
                EdgeKind::CheckingFeasibility if !usable => {
                    if let Some(j) = vn.il.var(*w, e) {
                        problem.push(Constraint::eq0(j));
                    }
                    paths.push(None);
                    continue;
                }
                _ => {}
            }
            let path = saturation_path(g, *w, u, open)?;
            let end = g.node(*path.last().expect("non-empty"));
            if !end.is_state()
                && e.kind == EdgeKind::CheckingFeasibility
                && let Some(j) = vn.il.var(*w, e)
            {
                problem.push(Constraint::le([j], 1));
            }
            paths.push(Some(path));
        }
        let solution = match ilp::check_feasibility(&problem).map_err(|_| ExtractError::Budget(v))? {
            Feasibility::Feasible(x) => x,
            Feasibility::Infeasible => return Err(ExtractError::Infeasible(v)),
        };

        let mut copies: BTreeMap<Vec<NodeId>, usize> = BTreeMap::new();
        for ((w, e), path) in pairs.iter().zip(paths) {
            let Some(path) = path else { continue };
            let n = match e.kind {
                EdgeKind::TestingClosedness => 1,
                EdgeKind::CheckingFeasibility => vn.il.var(*w, e).map_or(0, |j| solution[j]),
            };
            if n == 0 {
                continue;
            }
            let wh = *path.last().expect("non-empty");
            if !g.node(wh).is_state() {
                let a = g.node(wh).nominal().expect("blocked-like node carries a nominal");
                let target = named.get(&self.rep_of(a)).copied().ok_or(ExtractError::BadBlockedTarget(wh))?;
                for r in &e.roles {
                    self.mg.add_edge(r, y, target);
                }
                // Residual formulas of the blocked node follow from its label,
                // which the terminal state already contains.
                let extra = self.subst_concepts(&path);
                self.mg.labels[target].extend(extra);
                continue;
            }
            for _ in 0..n {
                let k = copies.entry(path.clone()).or_default();
                let idx = *k;
                *k += 1;
                let key = (path.clone(), idx);
                let z = match self.memo.get(&key) {
                    Some(&z) => z,
                    None => {
                        let z = self.mg.add_element(self.subst_concepts(&path));
                        self.origin.push(Some(wh));
                        self.memo.insert(key, z);
                        self.queue.push_back(z);
                        z
                    }
                };
                for r in &e.roles {
                    self.mg.add_edge(r, y, z);
                }
            }
        }
        Ok(())
    }
}
