use proptest::prelude::*;
use proptest::sample::select;

use shoq_core::closure::closure_with_renaming;
use shoq_core::extract::extract_model;
use shoq_core::ilp::{self, Constraint, Feasibility, Problem};
use shoq_core::syntax::{ConceptExpr, nnf};
use shoq_core::{
    ConceptName, EngineConfig, EngineError, Formula, Individual, KbBuilder, KnowledgeBase, RBoxClosure, Role,
    RoleAxiom, Verdict, run,
};

fn expr() -> impl Strategy<Value = ConceptExpr> {
    let leaf = prop_oneof![
        Just(ConceptExpr::Top),
        Just(ConceptExpr::Bot),
        select(vec!["A", "B"]).prop_map(|n| ConceptExpr::Name(ConceptName::new(n))),
        select(vec!["a", "b"]).prop_map(|a| ConceptExpr::Nominal(Individual::new(a))),
    ];
    leaf.prop_recursive(3, 24, 2, |inner| {
        let role = || select(vec!["r", "s"]).prop_map(Role::new);
        let b = Box::new;
        prop_oneof![
            inner.clone().prop_map(move |c| ConceptExpr::Not(b(c))),
            (inner.clone(), inner.clone()).prop_map(move |(c, d)| ConceptExpr::And(b(c), b(d))),
            (inner.clone(), inner.clone()).prop_map(move |(c, d)| ConceptExpr::Or(b(c), b(d))),
            (role(), inner.clone()).prop_map(move |(r, c)| ConceptExpr::Exists(r, b(c))),
            (role(), inner.clone()).prop_map(move |(r, c)| ConceptExpr::Forall(r, b(c))),
            // Number restrictions only on r, which stays simple below.
            (0u32..4, inner.clone()).prop_map(move |(n, c)| ConceptExpr::AtLeast(n, Role::new("r"), b(c))),
            (0u32..4, inner).prop_map(move |(n, c)| ConceptExpr::AtMost(n, Role::new("r"), b(c))),
        ]
    })
}

/// Random small KBs. `s` may be transitive and `r ⊑ s`, so `r` stays simple.
fn kb() -> impl Strategy<Value = KnowledgeBase> {
    let assertion = (select(vec!["a", "b"]), expr());
    (prop::collection::vec(assertion, 1..=3), any::<bool>(), any::<bool>(), prop::option::of(expr())).prop_map(
        |(asserts, trans, sub, tbox)| {
            let mut b = KbBuilder::new();
            if trans {
                b.role_axiom(RoleAxiom::Trans(Role::new("s")));
            }
            if sub {
                b.role_axiom(RoleAxiom::Sub(Role::new("r"), Role::new("s")));
            }
            if let Some(t) = tbox {
                b.subsumption(&ConceptExpr::Top, &t);
            }
            for (a, e) in asserts {
                b.assertion(Formula::Instance(Individual::new(a), nnf(&e)));
            }
            b.build().expect("number restrictions only use the simple role r")
        },
    )
}

fn problem() -> impl Strategy<Value = Problem> {
    (1usize..=5).prop_flat_map(|n| {
        let row = (prop::sample::subsequence((0..n).collect::<Vec<_>>(), 1..=n), 0u32..=4, 0u8..5).prop_map(
            |(vars, bound, kind)| match kind {
                0 | 1 => Constraint::ge(vars, bound),
                2 | 3 => Constraint::le(vars, bound),
                _ => Constraint::eq0(vars[0]),
            },
        );
        prop::collection::vec(row, 0..=4).prop_map(move |rows| {
            let mut p = Problem::new(n);
            for c in rows {
                p.push(c);
            }
            p
        })
    })
}

fn feasible(p: &Problem) -> bool {
    ilp::check_feasibility(p).expect("small problems fit the default budget").is_feasible()
}

proptest! {
    #[test]
    fn nnf_is_idempotent(e in expr()) {
        let c = nnf(&e);
        prop_assert!(!c.contains_internal());
        prop_assert_eq!(nnf(&ConceptExpr::from_concept(&c).unwrap()), c);
    }

    #[test]
    fn negation_is_an_involution(e in expr()) {
        let c = nnf(&e);
        let neg = c.negate().unwrap();
        prop_assert_eq!(&neg, &nnf(&ConceptExpr::Not(Box::new(e))));
        prop_assert_eq!(neg.negate().unwrap(), c);
    }

    #[test]
    fn feasibility_matches_enumeration(p in problem()) {
        let res = ilp::check_feasibility(&p).unwrap();
        if let Feasibility::Feasible(x) = &res {
            prop_assert!(p.satisfied_by(x));
        }
        prop_assert_eq!(res.is_feasible(), ilp::oracle_enumerate(&p, p.derived_cap()));
    }

    #[test]
    fn extra_constraints_never_restore_feasibility(p in problem(), var in 0usize..5, bound in 0u32..4) {
        let q = p.clone().with(Constraint::le([var % p.num_vars], bound));
        prop_assert!(!feasible(&q) || feasible(&p));
    }

    #[test]
    fn components_decide_together(p in problem()) {
        let parts = ilp::decompose(&p);
        let mut seen = std::collections::BTreeSet::new();
        for (_, vars) in &parts {
            for &j in vars {
                prop_assert!(seen.insert(j), "x{} in two components", j);
            }
        }
        prop_assert_eq!(feasible(&p), parts.iter().all(|(q, _)| feasible(q)));
    }

    #[test]
    fn rbox_closure_is_idempotent(
        axioms in prop::collection::vec(
            (select(vec!["r", "s", "t"]), select(vec!["r", "s", "t"]), any::<bool>()).prop_map(|(r, s, trans)| {
                if trans { RoleAxiom::Trans(Role::new(r)) } else { RoleAxiom::Sub(Role::new(r), Role::new(s)) }
            }),
            0..5,
        )
    ) {
        let once = RBoxClosure::build(&axioms, []);
        let mut derived = Vec::new();
        for r in once.roles() {
            for s in once.supers(r) {
                derived.push(RoleAxiom::Sub(r.clone(), s.clone()));
                for t in once.supers(s) {
                    prop_assert!(once.is_sub(r, t));
                }
            }
            if once.is_transitive(r) {
                derived.push(RoleAxiom::Trans(r.clone()));
            }
        }
        prop_assert_eq!(RBoxClosure::build(&derived, once.roles().cloned()), once);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn runs_keep_graph_invariants(kb in kb()) {
        let config = EngineConfig { max_steps: Some(20_000), ..EngineConfig::default() };
        let out = match run(&kb, &config) {
            Err(EngineError::StepLimit { .. }) => return Ok(()),
            other => other.unwrap(),
        };
        let g = &out.graph;
        prop_assert_eq!(g.check_structure(), Ok(()));
        prop_assert_eq!(g.check_status_monotonicity(), Ok(()));
        let cl = closure_with_renaming(&kb);
        for n in g.nodes() {
            for f in n.label.iter().chain(&n.rfmls) {
                prop_assert!(cl.contains(f), "v{}: {} outside the closure", n.id, f);
            }
        }
        if out.verdict == Verdict::Satisfiable {
            let ex = extract_model(&kb, &out).unwrap();
            prop_assert_eq!(ex.model_graph.check(&kb), Ok(()));
            prop_assert_eq!(ex.model.check_model(&kb), Ok(()));
        }
    }
}
