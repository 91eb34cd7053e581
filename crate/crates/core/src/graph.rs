//! The and-or tableau graph with global caching.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::ilp::{Constraint, Problem};
use crate::syntax::{Formula, Individual, Role};

pub type NodeId = usize;
pub type Label = BTreeSet<Formula>;
pub type IndRepl = BTreeMap<Individual, Individual>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeType {
    State,
    NonState,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SType {
    Complex,
    Simple,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Status {
    Unexpanded,
    PExpanded,
    FExpanded,
    Closed,
    Open,
    Blocked,
    ClosedWrt(BTreeSet<NodeId>),
}

impl Status {
    pub fn is_closed_wrt(&self, u: NodeId) -> bool {
        matches!(self, Status::ClosedWrt(us) if us.contains(&u))
    }

    /// Neither closed nor open.
    pub fn is_undecided(&self) -> bool {
        !matches!(self, Status::Closed | Status::Open)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Unexpanded => f.write_str("unexpanded"),
            Status::PExpanded => f.write_str("p-expanded"),
            Status::FExpanded => f.write_str("f-expanded"),
            Status::Closed => f.write_str("closed"),
            Status::Open => f.write_str("open"),
            Status::Blocked => f.write_str("blocked"),
            Status::ClosedWrt(us) => {
                f.write_str("closed-wrt({")?;
                for (i, u) in us.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "v{u}")?;
                }
                f.write_str("})")
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeKind {
    TestingClosedness,
    CheckingFeasibility,
}

/// `⟨π_T, π_R, π_I⟩`
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeLabel {
    pub kind: EdgeKind,
    pub roles: BTreeSet<Role>,
    pub ind: Option<Individual>,
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            EdgeKind::TestingClosedness => "testingClosedness",
            EdgeKind::CheckingFeasibility => "checkingFeasibility",
        };
        write!(f, "⟨{kind}, {{")?;
        for (i, r) in self.roles.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{r}")?;
        }
        match &self.ind {
            Some(a) => write!(f, "}}, {a}⟩"),
            None => f.write_str("}, null⟩"),
        }
    }
}

/// Integer constraints of a state over `x_{w,e}` variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IlConstraints {
    pub vars: Vec<(NodeId, EdgeLabel)>,
    pub problem: Problem,
}

impl IlConstraints {
    pub fn var(&self, w: NodeId, e: &EdgeLabel) -> Option<usize> {
        self.vars.iter().position(|(x, f)| *x == w && f == e)
    }

    /// Variables forced to zero by `x = 0` constraints.
    pub fn zeros(&self) -> BTreeSet<usize> {
        self.problem.constraints.iter().filter(|c| c.sense == crate::ilp::Sense::Eq0).map(|c| c.vars[0]).collect()
    }

    /// The system plus `x = 0` for each listed variable.
    pub fn with_zeros(&self, zeros: impl IntoIterator<Item = usize>) -> Problem {
        let mut p = self.problem.clone();
        for j in zeros {
            p.push(Constraint::eq0(j));
        }
        p
    }
}

#[derive(Clone, Debug)]
pub struct Node {
    pub id: NodeId,
    pub ty: NodeType,
    pub stype: SType,
    pub status: Status,
    pub label: Arc<Label>,
    pub rfmls: Label,
    /// Only meaningful on complex nodes.
    pub ind_repl: IndRepl,
    /// Only meaningful on states.
    pub il: IlConstraints,
    succs: Vec<NodeId>,
    preds: Vec<NodeId>,
}

impl Node {
    pub fn successors(&self) -> &[NodeId] {
        &self.succs
    }

    pub fn predecessors(&self) -> &[NodeId] {
        &self.preds
    }

    pub fn is_state(&self) -> bool {
        self.ty == NodeType::State
    }

    pub fn is_complex(&self) -> bool {
        self.stype == SType::Complex
    }

    /// `Label ∪ RFmls` without the internal `⪯`/`⪰` assertions.
    pub fn full_label(&self) -> Label {
        full_label(&self.label, &self.rfmls)
    }

    pub fn full_contains(&self, f: &Formula) -> bool {
        !f.is_internal() && (self.label.contains(f) || self.rfmls.contains(f))
    }

    /// First `{a}` occurring as a member of a simple label.
    pub fn nominal(&self) -> Option<&Individual> {
        self.label.iter().find_map(|f| match f {
            Formula::ConceptOnly(crate::syntax::Concept::Nominal(a)) => Some(a),
            _ => None,
        })
    }
}

pub fn full_label(label: &Label, rfmls: &Label) -> Label {
    label.iter().chain(rfmls.iter()).filter(|f| !f.is_internal()).cloned().collect()
}

type CacheKey = (SType, Option<NodeType>, Arc<Label>);

/// Result of [`Graph::con_to_succ`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Connected {
    pub node: NodeId,
    pub created: bool,
}

#[derive(Clone, Debug, Default)]
pub struct Graph {
    nodes: Vec<Node>,
    elabels: BTreeMap<(NodeId, NodeId), BTreeSet<EdgeLabel>>,
    cache: BTreeMap<CacheKey, NodeId>,
    version: u64,
    /// Per node, the clock value of its last change (see [`Graph::touched`]).
    touched: Vec<u64>,
    clock: u64,
    transitions: Vec<(NodeId, Status, Status)>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub const ROOT: NodeId = 0;

    pub fn root(&self) -> &Node {
        &self.nodes[Self::ROOT]
    }

    pub fn node(&self, v: NodeId) -> &Node {
        &self.nodes[v]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Bumped on every change that can affect [`Graph::reach`].
    pub fn version(&self) -> u64 {
        self.version
    }

    /// Clock value of the last change to `v`'s status, type, successors,
    /// edge labels, residual formulas, IndRepl or ILConstraints.
    pub fn touched(&self, v: NodeId) -> u64 {
        self.touched[v]
    }

    /// Current value of the change clock.
    pub fn clock(&self) -> u64 {
        self.clock
    }

    fn touch(&mut self, v: NodeId) {
        self.clock += 1;
        self.touched[v] = self.clock;
    }

    pub fn edge_count(&self) -> usize {
        self.nodes.iter().map(|n| n.succs.len()).sum()
    }

    pub fn elabels(&self, v: NodeId, w: NodeId) -> impl Iterator<Item = &EdgeLabel> {
        self.elabels.get(&(v, w)).into_iter().flatten()
    }

    /// Every status change so far as `(node, from, to)`.
    pub fn transitions(&self) -> &[(NodeId, Status, Status)] {
        &self.transitions
    }

    fn key(ty: NodeType, stype: SType, label: Arc<Label>) -> CacheKey {
        match stype {
            SType::Simple => (stype, None, label),
            SType::Complex => (stype, Some(ty), label),
        }
    }

    /// Connects `v` to a node with the given contents, reusing a cached
    /// node with an equal label when there is one.
    #[allow(clippy::too_many_arguments)]
    pub fn con_to_succ(
        &mut self,
        v: Option<NodeId>,
        ty: NodeType,
        stype: SType,
        label: Label,
        rfmls: Label,
        ind_repl: Option<IndRepl>,
        elabel: Option<EdgeLabel>,
    ) -> Connected {
        let label = Arc::new(label);
        let key = Self::key(ty, stype, label.clone());
        if let Some(v) = v
            && let Some(&w) = self.cache.get(&key)
        {
            self.add_edge(v, w, elabel);
            let before = self.nodes[w].rfmls.len();
            self.nodes[w].rfmls.extend(rfmls);
            if self.nodes[w].rfmls.len() != before {
                self.touch(w);
            }
            return Connected { node: w, created: false };
        }
        let id = self.nodes.len();
        let ind_repl = match (ind_repl, stype) {
            (Some(m), _) => m,
            (None, SType::Complex) => {
                let mut m = IndRepl::new();
                for f in label.iter() {
                    f.individuals(&mut |a| {
                        m.insert(a.clone(), a.clone());
                    });
                }
                m
            }
            (None, SType::Simple) => IndRepl::new(),
        };
        self.nodes.push(Node {
            id,
            ty,
            stype,
            status: Status::Unexpanded,
            label,
            rfmls,
            ind_repl,
            il: IlConstraints::default(),
            succs: Vec::new(),
            preds: Vec::new(),
        });
        self.cache.entry(key).or_insert(id);
        self.touched.push(0);
        self.touch(id);
        if let Some(v) = v {
            self.add_edge(v, id, elabel);
        }
        self.version += 1;
        Connected { node: id, created: true }
    }

    fn add_edge(&mut self, v: NodeId, w: NodeId, elabel: Option<EdgeLabel>) {
        debug_assert!(
            !(self.nodes[v].stype == SType::Simple && self.nodes[w].stype == SType::Complex),
            "simple to complex edge"
        );
        if !self.nodes[v].succs.contains(&w) {
            self.nodes[v].succs.push(w);
            self.nodes[w].preds.push(v);
            self.version += 1;
            self.touch(v);
        }
        if self.nodes[v].is_state() {
            let e = elabel.expect("edges leaving a state carry labels");
            if self.elabels.entry((v, w)).or_default().insert(e) {
                self.touch(v);
            }
        }
    }

    /// Removes the edge and its labels.
    pub fn delete_edge(&mut self, v: NodeId, w: NodeId) {
        self.nodes[v].succs.retain(|&x| x != w);
        self.nodes[w].preds.retain(|&x| x != v);
        self.elabels.remove(&(v, w));
        self.version += 1;
        self.touch(v);
    }

    pub fn set_status(&mut self, v: NodeId, status: Status) -> bool {
        if self.nodes[v].status == status {
            return false;
        }
        let old = core::mem::replace(&mut self.nodes[v].status, status.clone());
        let closed_wrt = |s: &Status| match s {
            Status::ClosedWrt(us) => Some(us.clone()),
            _ => None,
        };
        if old.is_undecided() != status.is_undecided() || closed_wrt(&old) != closed_wrt(&status) {
            self.version += 1;
        }
        self.transitions.push((v, old, status));
        self.touch(v);
        true
    }

    /// Adds `u` to the closed-wrt set of `v`. Returns whether anything changed.
    pub fn set_closed_wrt(&mut self, v: NodeId, u: NodeId) -> bool {
        let next = match &self.nodes[v].status {
            Status::ClosedWrt(us) if us.contains(&u) => return false,
            Status::ClosedWrt(us) => {
                let mut us = us.clone();
                us.insert(u);
                Status::ClosedWrt(us)
            }
            _ => Status::ClosedWrt([u].into()),
        };
        self.set_status(v, next)
    }

    pub fn set_type(&mut self, v: NodeId, ty: NodeType) {
        self.nodes[v].ty = ty;
        self.version += 1;
        self.touch(v);
    }

    pub fn ind_repl_mut(&mut self, v: NodeId) -> &mut IndRepl {
        self.touch(v);
        &mut self.nodes[v].ind_repl
    }

    pub fn il_mut(&mut self, v: NodeId) -> &mut IlConstraints {
        self.touch(v);
        &mut self.nodes[v].il
    }

    /// Reachability from the root along paths that may affect its status.
    pub fn reach(&self) -> Reach {
        let mut complex = BTreeSet::new();
        let mut via: BTreeMap<NodeId, BTreeSet<NodeId>> = BTreeMap::new();
        if self.nodes.is_empty() {
            return Reach { complex, via, states_of: BTreeMap::new() };
        }
        let mut stack = alloc::vec![Self::ROOT];
        complex.insert(Self::ROOT);
        while let Some(x) = stack.pop() {
            let node = &self.nodes[x];
            let passable = node.status.is_undecided() && !(node.is_state() && node.status.is_closed_wrt(x));
            if !passable {
                continue;
            }
            if node.is_state() {
                via.insert(x, self.simple_reach(x));
                continue;
            }
            for &w in &node.succs {
                if complex.insert(w) {
                    stack.push(w);
                }
            }
        }
        let mut states_of: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
        for (&u, s) in &via {
            for &v in s {
                states_of.entry(v).or_default().push(u);
            }
        }
        Reach { complex, via, states_of }
    }

    fn simple_reach(&self, u: NodeId) -> BTreeSet<NodeId> {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<NodeId> = self.nodes[u].succs.clone();
        seen.extend(stack.iter().copied());
        while let Some(x) = stack.pop() {
            let st = &self.nodes[x].status;
            if !st.is_undecided() || st.is_closed_wrt(u) {
                continue;
            }
            for &w in &self.nodes[x].succs {
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        seen
    }

    /// Depth-first preorder from the root over nodes that may affect it,
    /// following successors in insertion order. A simple node is listed
    /// once per complex state it is reached through.
    pub fn preorder(&self) -> Vec<NodeId> {
        let mut out = Vec::new();
        // One visited bitmap per context.
        let mut seen: BTreeMap<Option<NodeId>, Vec<bool>> = BTreeMap::new();
        let n = self.nodes.len();
        let mut stack: Vec<(NodeId, Option<NodeId>)> = alloc::vec![(Self::ROOT, None)];
        while let Some((x, ctx)) = stack.pop() {
            let marks = seen.entry(ctx).or_insert_with(|| alloc::vec![false; n]);
            if core::mem::replace(&mut marks[x], true) {
                continue;
            }
            out.push(x);
            let node = &self.nodes[x];
            let ctx = if node.is_complex() && node.is_state() { Some(x) } else { ctx };
            let passable = node.status.is_undecided() && ctx.is_none_or(|u| !node.status.is_closed_wrt(u));
            if !passable {
                continue;
            }
            let marks = seen.get(&ctx);
            for &w in node.succs.iter().rev() {
                if !marks.is_some_and(|m| m[w]) {
                    stack.push((w, ctx));
                }
            }
        }
        out
    }

    /// Structural checks: cache uniqueness, layer discipline, edge labels
    /// exactly on edges leaving states. Returns a description of the first
    /// violation.
    pub fn check_structure(&self) -> Result<(), alloc::string::String> {
        use alloc::format;
        let mut seen: BTreeMap<CacheKey, NodeId> = BTreeMap::new();
        for n in &self.nodes {
            if let Some(other) = seen.insert(Self::key(n.ty, n.stype, n.label.clone()), n.id) {
                return Err(format!("v{} and v{} share a cached label", other, n.id));
            }
            for &w in &n.succs {
                let m = &self.nodes[w];
                if n.stype == SType::Simple && m.stype == SType::Complex {
                    return Err(format!("simple v{} has complex successor v{w}", n.id));
                }
                if n.stype == SType::Complex && m.stype == SType::Simple && !n.is_state() {
                    return Err(format!("complex non-state v{} has simple successor v{w}", n.id));
                }
                if n.is_complex() && n.is_state() && m.is_complex() {
                    return Err(format!("complex state v{} has complex successor v{w}", n.id));
                }
                let labelled = self.elabels.get(&(n.id, w)).is_some_and(|s| !s.is_empty());
                if labelled != n.is_state() {
                    return Err(format!("edge v{} -> v{w} labels do not match source type", n.id));
                }
                for e in self.elabels(n.id, w) {
                    if e.ind.is_none() != (n.stype == SType::Simple) {
                        return Err(format!("edge v{} -> v{w} has wrong individual tag", n.id));
                    }
                }
            }
            let wrong_shape = n.label.iter().any(|f| match n.stype {
                SType::Simple => !matches!(f, Formula::ConceptOnly(_)),
                SType::Complex => matches!(f, Formula::ConceptOnly(_)),
            });
            if wrong_shape {
                return Err(format!("v{} has a label formula of the wrong shape", n.id));
            }
            match &n.status {
                Status::PExpanded if !n.is_state() => return Err(format!("non-state v{} is p-expanded", n.id)),
                Status::Blocked if n.is_complex() || n.nominal().is_none() => {
                    return Err(format!("v{} is blocked without being a nominal simple node", n.id));
                }
                Status::ClosedWrt(us)
                    if (us.is_empty()
                        || us.iter().any(|&u| !(self.nodes[u].is_state() && self.nodes[u].is_complex()))) =>
                {
                    return Err(format!("v{} is closed w.r.t. a non complex state", n.id));
                }
                _ => {}
            }
        }
        if let Some(root) = self.nodes.first()
            && (root.is_state() || !root.is_complex())
        {
            return Err(alloc::string::String::from("root is not a complex non-state"));
        }
        Ok(())
    }

    /// Checks that closed and open never change and blocked only becomes
    /// closed or closed-wrt.
    pub fn check_status_monotonicity(&self) -> Result<(), alloc::string::String> {
        for (v, from, to) in &self.transitions {
            let ok = match from {
                Status::Closed | Status::Open => false,
                Status::Blocked => matches!(to, Status::Closed | Status::ClosedWrt(_)),
                _ => true,
            };
            if !ok {
                return Err(alloc::format!("v{v}: {from} -> {to}"));
            }
        }
        Ok(())
    }
}

/// Which nodes may affect the root, and through which complex states.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Reach {
    /// Complex nodes with a qualifying path from the root.
    pub complex: BTreeSet<NodeId>,
    /// For each passable complex state, the simple nodes reached through it.
    pub via: BTreeMap<NodeId, BTreeSet<NodeId>>,
    /// Inverse of `via`, states in ascending order.
    states_of: BTreeMap<NodeId, Vec<NodeId>>,
}

impl Reach {
    pub fn may_affect(&self, v: NodeId) -> bool {
        self.complex.contains(&v) || self.states_of.contains_key(&v)
    }

    /// `v` may affect the root via a path through the complex state `u`.
    pub fn may_affect_via(&self, v: NodeId, u: NodeId) -> bool {
        (v == u && self.complex.contains(&u)) || self.via.get(&u).is_some_and(|s| s.contains(&v))
    }

    /// Complex states `u` such that `v` may affect the root through `u`.
    pub fn states_for(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.states_of.get(&v).into_iter().flatten().copied()
    }
}
