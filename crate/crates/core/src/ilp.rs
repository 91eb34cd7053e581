//! Integer feasibility for 0/1-coefficient linear systems.
//!
//! Every variable is a nonnegative integer. Constraints are `Σ x ≥ b`,
//! `Σ x ≤ b` or `x = 0`. [`check_feasibility`] decomposes the system into
//! independent components and runs a depth-first branch-and-bound on each.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sense {
    Ge,
    Le,
    /// A single variable forced to zero.
    Eq0,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Constraint {
    pub vars: Vec<usize>,
    pub sense: Sense,
    pub bound: u32,
}

impl Constraint {
    pub fn ge(vars: impl IntoIterator<Item = usize>, bound: u32) -> Self {
        Self::new(vars, Sense::Ge, bound)
    }

    pub fn le(vars: impl IntoIterator<Item = usize>, bound: u32) -> Self {
        Self::new(vars, Sense::Le, bound)
    }

    pub fn eq0(var: usize) -> Self {
        Constraint { vars: vec![var], sense: Sense::Eq0, bound: 0 }
    }

    fn new(vars: impl IntoIterator<Item = usize>, sense: Sense, bound: u32) -> Self {
        let set: BTreeSet<usize> = vars.into_iter().collect();
        Constraint { vars: set.into_iter().collect(), sense, bound }
    }

    pub fn holds(&self, x: &[u32]) -> bool {
        let sum: u64 = self.vars.iter().map(|&j| u64::from(x[j])).sum();
        match self.sense {
            Sense::Ge => sum >= u64::from(self.bound),
            Sense::Le => sum <= u64::from(self.bound),
            Sense::Eq0 => sum == 0,
        }
    }
}

/// A feasibility problem over variables `0..num_vars`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Problem {
    pub num_vars: usize,
    pub constraints: Vec<Constraint>,
}

impl Problem {
    pub fn new(num_vars: usize) -> Self {
        Problem { num_vars, constraints: Vec::new() }
    }

    pub fn push(&mut self, c: Constraint) -> &mut Self {
        debug_assert!(c.vars.iter().all(|&j| j < self.num_vars));
        self.constraints.push(c);
        self
    }

    pub fn with(mut self, c: Constraint) -> Self {
        self.push(c);
        self
    }

    pub fn satisfied_by(&self, x: &[u32]) -> bool {
        x.len() == self.num_vars && self.constraints.iter().all(|c| c.holds(x))
    }

    /// Largest `≥` bound, 0 without `≥` constraints. Some solution exists
    /// with every variable at most this value whenever any solution does.
    pub fn derived_cap(&self) -> u32 {
        self.constraints.iter().filter(|c| c.sense == Sense::Ge).map(|c| c.bound).max().unwrap_or(0)
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, j) in self.vars.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "x{j}")?;
        }
        if self.vars.is_empty() {
            f.write_str("0")?;
        }
        match self.sense {
            Sense::Ge => write!(f, " >= {}", self.bound),
            Sense::Le => write!(f, " <= {}", self.bound),
            Sense::Eq0 => f.write_str(" = 0"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(Vec<u32>),
    Infeasible,
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("integer feasibility search exceeded its budget of {budget} nodes")]
pub struct BudgetExceeded {
    pub budget: u64,
}

pub const DEFAULT_NODE_BUDGET: u64 = 1_000_000;

/// Splits the variables into groups linked by shared constraints. Returns
/// one subproblem per group, with variables renumbered, and the original
/// indices of each group's variables.
pub fn decompose(p: &Problem) -> Vec<(Problem, Vec<usize>)> {
    let mut parent: Vec<usize> = (0..p.num_vars).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for c in &p.constraints {
        for w in c.vars.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; p.num_vars];
    for j in 0..p.num_vars {
        let root = find(&mut parent, j);
        if slot[root] == usize::MAX {
            slot[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[root]].push(j);
    }
    let mut out: Vec<(Problem, Vec<usize>)> = groups.into_iter().map(|vars| (Problem::new(vars.len()), vars)).collect();
    let mut local = vec![0usize; p.num_vars];
    for (_, vars) in &out {
        for (i, &j) in vars.iter().enumerate() {
            local[j] = i;
        }
    }
    for c in &p.constraints {
        let renamed = Constraint { vars: c.vars.iter().map(|&j| local[j]).collect(), ..c.clone() };
        match c.vars.first() {
            Some(&j) => out[slot[find(&mut parent, j)]].0.constraints.push(renamed),
            // An empty `≥ b` with b > 0 makes everything infeasible; keep it somewhere.
            None if !c.holds(&[]) => {
                if out.is_empty() {
                    out.push((Problem::new(0), Vec::new()));
                }
                out[0].0.constraints.push(renamed);
            }
            None => {}
        }
    }
    out
}

/// Decides feasibility with the default node budget.
pub fn check_feasibility(p: &Problem) -> Result<Feasibility, BudgetExceeded> {
    check_feasibility_with_budget(p, DEFAULT_NODE_BUDGET)
}

pub fn check_feasibility_with_budget(p: &Problem, budget: u64) -> Result<Feasibility, BudgetExceeded> {
    let mut zero = vec![false; p.num_vars];
    for c in &p.constraints {
        if c.sense == Sense::Eq0 || (c.sense == Sense::Le && c.bound == 0) {
            for &j in &c.vars {
                zero[j] = true;
            }
        }
    }
    let mut reduced = Problem::new(p.num_vars);
    for c in &p.constraints {
        if c.sense == Sense::Eq0 {
            continue;
        }
        let vars: Vec<usize> = c.vars.iter().copied().filter(|&j| !zero[j]).collect();
        reduced.constraints.push(Constraint { vars, ..c.clone() });
    }

    let mut x = vec![0u32; p.num_vars];
    let mut nodes = 0u64;
    for (sub, vars) in decompose(&reduced) {
        match branch_and_bound(&sub, budget, &mut nodes)? {
            Some(values) => {
                for (i, v) in values.into_iter().enumerate() {
                    x[vars[i]] = v;
                }
            }
            None => return Ok(Feasibility::Infeasible),
        }
    }
    debug_assert!(p.satisfied_by(&x));
    Ok(Feasibility::Feasible(x))
}

fn branch_and_bound(p: &Problem, budget: u64, nodes: &mut u64) -> Result<Option<Vec<u32>>, BudgetExceeded> {
    let n = p.num_vars;
    let cap = p.derived_cap();
    let mut ub = vec![cap; n];
    let mut member: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, c) in p.constraints.iter().enumerate() {
        if c.vars.is_empty() && !c.holds(&[]) {
            return Ok(None);
        }
        for &j in &c.vars {
            member[j].push(i);
            if c.sense == Sense::Le {
                ub[j] = ub[j].min(c.bound);
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&j| (core::cmp::Reverse(member[j].len()), j));

    // Per constraint: sum of assigned values and sum of upper bounds of the unassigned.
    let mut assigned = vec![0u64; p.constraints.len()];
    let mut open_ub = vec![0u64; p.constraints.len()];
    for (i, c) in p.constraints.iter().enumerate() {
        open_ub[i] = c.vars.iter().map(|&j| u64::from(ub[j])).sum();
    }
    let mut x = vec![0u32; n];

    struct Search<'a> {
        p: &'a Problem,
        order: Vec<usize>,
        member: Vec<Vec<usize>>,
        ub: Vec<u32>,
        assigned: Vec<u64>,
        open_ub: Vec<u64>,
        budget: u64,
    }

    impl Search<'_> {
        fn viable(&self, i: usize) -> bool {
            let c = &self.p.constraints[i];
            let b = u64::from(c.bound);
            match c.sense {
                Sense::Ge => self.assigned[i] + self.open_ub[i] >= b,
                Sense::Le | Sense::Eq0 => self.assigned[i] <= b,
            }
        }

        fn go(&mut self, depth: usize, x: &mut [u32], nodes: &mut u64) -> Result<bool, BudgetExceeded> {
            *nodes += 1;
            if *nodes > self.budget {
                return Err(BudgetExceeded { budget: self.budget });
            }
            if depth == self.order.len() {
                return Ok(true);
            }
            let j = self.order[depth];
            let mut hi = self.ub[j];
            let mut need = 0u64;
            for &i in &self.member[j] {
                let c = &self.p.constraints[i];
                match c.sense {
                    Sense::Le | Sense::Eq0 => {
                        let slack = u64::from(c.bound).saturating_sub(self.assigned[i]);
                        hi = hi.min(slack.min(u64::from(u32::MAX)) as u32);
                    }
                    Sense::Ge => {
                        // What the other open members can still contribute.
                        let others = self.open_ub[i] - u64::from(self.ub[j]);
                        let short = u64::from(c.bound).saturating_sub(self.assigned[i] + others);
                        need = need.max(short);
                    }
                }
            }
            if need > u64::from(hi) {
                return Ok(false);
            }
            for i in self.member[j].clone() {
                self.open_ub[i] -= u64::from(self.ub[j]);
            }
            let mut found = false;
            for val in need as u32..=hi {
                for &i in &self.member[j] {
                    self.assigned[i] += u64::from(val);
                }
                x[j] = val;
                let ok = self.member[j].iter().all(|&i| self.viable(i));
                let r = if ok { self.go(depth + 1, x, nodes) } else { Ok(false) };
                for &i in &self.member[j] {
                    self.assigned[i] -= u64::from(val);
                }
                match r {
                    Ok(true) => {
                        found = true;
                        break;
                    }
                    Ok(false) => {}
                    Err(e) => return Err(e),
                }
            }
            if !found {
                x[j] = 0;
            }
            for i in self.member[j].clone() {
                self.open_ub[i] += u64::from(self.ub[j]);
            }
            Ok(found)
        }
    }

    let mut s = Search { p, order, member, ub, assigned: core::mem::take(&mut assigned), open_ub, budget };
    if !(0..p.constraints.len()).all(|i| s.viable(i)) {
        return Ok(None);
    }
    Ok(s.go(0, &mut x, nodes)?.then_some(x))
}

/// Exhaustive scan of `[0, cap]^n`.
pub fn oracle_enumerate(p: &Problem, cap: u32) -> bool {
    let mut x = vec![0u32; p.num_vars];
    loop {
        if p.satisfied_by(&x) {
            return true;
        }
        let mut k = 0;
        loop {
            if k == x.len() {
                return false;
            }
            if x[k] < cap {
                x[k] += 1;
                break;
            }
            x[k] = 0;
            k += 1;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("bound {bound} exceeds the declared limit {limit}")]
pub struct PreconditionViolated {
    pub bound: u32,
    pub limit: u32,
}

/// Deterministic version of the nondeterministic distribution procedure:
/// every constraint's bound is split among its variables in all possible
/// ways, each split yields per-variable lower or upper bounds, and the
/// problem is feasible iff some combination has consistent bounds.
///
/// Requires every bound to be at most `limit`.
pub fn oracle_lemma1(p: &Problem, limit: u32) -> Result<bool, PreconditionViolated> {
    for c in &p.constraints {
        if c.bound > limit {
            return Err(PreconditionViolated { bound: c.bound, limit });
        }
    }
    // Upper-bound constraints first: they prune earlier.
    let mut cons: Vec<&Constraint> = p.constraints.iter().collect();
    cons.sort_by_key(|c| c.sense == Sense::Ge);
    let mut lo = vec![0u32; p.num_vars];
    let mut hi = vec![u32::MAX; p.num_vars];
    Ok(distribute(&cons, 0, &mut lo, &mut hi))
}

fn distribute(cons: &[&Constraint], i: usize, lo: &mut [u32], hi: &mut [u32]) -> bool {
    let Some(c) = cons.get(i) else {
        return lo.iter().zip(hi.iter()).all(|(l, h)| l <= h);
    };
    if c.vars.is_empty() {
        return c.holds(&[]) && distribute(cons, i + 1, lo, hi);
    }
    let mut parts = vec![0u32; c.vars.len()];
    compositions(0, c.bound, &mut parts, &mut |parts| {
        let saved: Vec<(u32, u32)> = c.vars.iter().map(|&j| (lo[j], hi[j])).collect();
        let mut ok = true;
        for (k, &j) in c.vars.iter().enumerate() {
            match c.sense {
                Sense::Ge => lo[j] = lo[j].max(parts[k]),
                Sense::Le | Sense::Eq0 => hi[j] = hi[j].min(parts[k]),
            }
            ok &= lo[j] <= hi[j];
        }
        let found = ok && distribute(cons, i + 1, lo, hi);
        for (k, &j) in c.vars.iter().enumerate() {
            (lo[j], hi[j]) = saved[k];
        }
        found
    })
}

/// Enumerates ways to write `left` as an ordered sum over the remaining slots.
fn compositions(k: usize, left: u32, parts: &mut [u32], f: &mut dyn FnMut(&[u32]) -> bool) -> bool {
    if k + 1 == parts.len() {
        parts[k] = left;
        return f(parts);
    }
    for v in 0..=left {
        parts[k] = v;
        if compositions(k + 1, left - v, parts, f) {
            return true;
        }
    }
    false
}

/// Variant for systems whose `≤` bounds are small: split each `≤` bound,
/// cap each variable by the least share it received, then check the `≥`
/// constraints with the uncapped variables left free.
///
/// Requires every `≤` bound to be at most `limit`.
pub fn oracle_lemma2(p: &Problem, limit: u32) -> Result<bool, PreconditionViolated> {
    let mut les: Vec<&Constraint> = Vec::new();
    for c in &p.constraints {
        if c.sense != Sense::Ge {
            if c.bound > limit {
                return Err(PreconditionViolated { bound: c.bound, limit });
            }
            les.push(c);
        }
    }
    let mut shares: Vec<Vec<u32>> = les.iter().map(|c| vec![0; c.vars.len()]).collect();
    Ok(split_le(p, &les, 0, &mut shares))
}

fn split_le(p: &Problem, les: &[&Constraint], i: usize, shares: &mut Vec<Vec<u32>>) -> bool {
    if i == les.len() {
        let mut d: Vec<Option<u32>> = vec![None; p.num_vars];
        for (c, s) in les.iter().zip(shares.iter()) {
            for (k, &j) in c.vars.iter().enumerate() {
                d[j] = Some(d[j].map_or(s[k], |v| v.min(s[k])));
            }
        }
        return p.constraints.iter().filter(|c| c.sense == Sense::Ge).all(|c| {
            c.vars.iter().any(|&j| d[j].is_none())
                || c.vars.iter().map(|&j| u64::from(d[j].unwrap())).sum::<u64>() >= u64::from(c.bound)
        });
    }
    let c = les[i];
    if c.vars.is_empty() {
        return split_le(p, les, i + 1, shares);
    }
    let mut parts = vec![0u32; c.vars.len()];
    compositions(0, c.bound, &mut parts, &mut |parts| {
        shares[i].copy_from_slice(parts);
        split_le(p, les, i + 1, shares)
    })
}
