#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

pub struct KbShape {
    pub individuals: usize,
    pub roles: usize,
    pub names: usize,
    pub max_number: u32,
    pub nominal_p: f64,
    pub depth: u32,
}

impl Default for KbShape {
    fn default() -> Self {
        KbShape { individuals: 2, roles: 2, names: 2, max_number: 3, nominal_p: 0.3, depth: 2 }
    }
}

const INDS: [&str; 3] = ["a", "b", "c"];
const ROLES: [&str; 3] = ["r", "s", "t"];
const NAMES: [&str; 3] = ["A", "B", "C"];

struct Gen<'a> {
    rng: StdRng,
    shape: &'a KbShape,
    simple: Vec<&'static str>,
}

impl Gen<'_> {
    fn pick<T: Copy>(&mut self, xs: &[T]) -> T {
        xs[self.rng.random_range(0..xs.len())]
    }

    fn role(&mut self) -> &'static str {
        let n = self.shape.roles;
        self.pick(&ROLES[..n])
    }

    fn ind(&mut self) -> &'static str {
        let n = self.shape.individuals;
        self.pick(&INDS[..n])
    }

    fn concept(&mut self, depth: u32) -> String {
        let leaf = depth == 0 || self.rng.random_bool(0.3);
        if leaf {
            if self.rng.random_bool(self.shape.nominal_p) {
                let a = self.ind();
                return if self.rng.random_bool(0.3) { format!("not one {a}") } else { format!("one {a}") };
            }
            let n = self.shape.names;
            let a = self.pick(&NAMES[..n]);
            return match self.rng.random_range(0..8) {
                0 => "top".into(),
                1 => "bot".into(),
                2 | 3 => format!("not {a}"),
                _ => a.into(),
            };
        }
        let d = depth - 1;
        match self.rng.random_range(0..7) {
            0 => format!("({} and {})", self.concept(d), self.concept(d)),
            1 => format!("({} or {})", self.concept(d), self.concept(d)),
            2 => format!("some {} {}", self.role(), self.concept(d)),
            3 => format!("only {} {}", self.role(), self.concept(d)),
            4 => format!("not {}", self.concept(d)),
            k if self.simple.is_empty() => {
                let q = if k == 5 { "some" } else { "only" };
                format!("{q} {} {}", self.role(), self.concept(d))
            }
            k => {
                let q = if k == 5 { "atleast" } else { "atmost" };
                let n = self.rng.random_range(0..=self.shape.max_number);
                let simple = self.simple.clone();
                let r = self.pick(&simple);
                format!("{q} {n} {r} {}", self.concept(d))
            }
        }
    }
}

/// A random knowledge base in the text format, with at most one
/// transitivity and one subrole axiom. Number restrictions only use simple
/// roles, so the result always validates.
pub fn random_kb(seed: u64, shape: &KbShape) -> String {
    let mut g = Gen { rng: StdRng::seed_from_u64(seed), shape, simple: Vec::new() };
    let mut out = String::new();
    let roles = &ROLES[..shape.roles];
    let mut trans = None;
    let mut sub = None;
    if g.rng.random_bool(0.4) {
        let r = g.role();
        trans = Some(r);
        out.push_str(&format!("rbox trans {r}\n"));
    }
    if roles.len() > 1 && g.rng.random_bool(0.4) {
        let (r, s) = (g.role(), g.role());
        if r != s {
            sub = Some((r, s));
            out.push_str(&format!("rbox {r} sub {s}\n"));
        }
    }
    g.simple = roles
        .iter()
        .copied()
        .filter(|&r| Some(r) != trans && !matches!(sub, Some((x, y)) if y == r && Some(x) == trans))
        .collect();
    if g.rng.random_bool(0.3) {
        let (c, d) = (g.concept(1), g.concept(shape.depth.min(2)));
        out.push_str(&format!("tbox {c} sub {d}\n"));
    }
    for _ in 0..g.rng.random_range(1..=3) {
        let a = g.ind();
        let c = g.concept(shape.depth);
        out.push_str(&format!("abox {a} : {c}\n"));
    }
    if shape.individuals > 1 && g.rng.random_bool(0.3) {
        let (r, a, b) = (g.role(), g.ind(), g.ind());
        out.push_str(&format!("abox {r}({a}, {b})\n"));
    }
    if shape.individuals > 1 && g.rng.random_bool(0.15) {
        let (a, b) = (g.ind(), g.ind());
        out.push_str(&format!("abox {a} != {b}\n"));
    }
    out
}

/// Corpus files as `(file name, text)`, sorted by name.
pub fn corpus() -> Vec<(String, String)> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/corpus");
    let mut out: Vec<(String, String)> = std::fs::read_dir(dir)
        .expect("corpus directory")
        .map(|e| {
            let path = e.expect("corpus entry").path();
            let name = path.file_name().unwrap().to_string_lossy().into_owned();
            (name, std::fs::read_to_string(&path).expect("corpus file"))
        })
        .filter(|(name, _)| name.ends_with(".kb"))
        .collect();
    out.sort();
    out
}

/// Corpus files with a model; every other corpus file is unsatisfiable.
pub const SATISFIABLE: [&str; 8] = [
    "counting_split.kb",
    "equivalence.kb",
    "example2.kb",
    "exists.kb",
    "nominal_sat.kb",
    "tbox_cycle.kb",
    "transitive_loop.kb",
    "trivial.kb",
];

/// Every corpus file finishes within this many expansion steps.
pub const CORPUS_STEP_BUDGET: u64 = 500;

/// Closure size bound factor: `|closure| <= CLOSURE_FACTOR * N^3`.
pub const CLOSURE_FACTOR: usize = 4;

/// Structural invariants of a finished run. Returns the first violation.
pub fn invariant_violation(kb: &shoq_core::KnowledgeBase, out: &shoq_core::RunOutcome) -> Option<String> {
    use shoq_core::closure::{closure, closure_with_renaming};
    let g = &out.graph;
    if let Err(e) = g.check_structure() {
        return Some(e);
    }
    if let Err(e) = g.check_status_monotonicity() {
        return Some(format!("status regression {e}"));
    }
    let cl = closure_with_renaming(kb);
    for n in g.nodes() {
        if let Some(f) = n.label.iter().chain(&n.rfmls).find(|f| !cl.contains(f)) {
            return Some(format!("v{}: {f} outside the closure", n.id));
        }
    }
    let cube = kb.size().pow(3);
    for (name, len) in [("closure", closure(kb).len()), ("renamed closure", cl.len())] {
        if len > CLOSURE_FACTOR * cube {
            return Some(format!("{name} has {len} members, N = {}", kb.size()));
        }
    }
    None
}
