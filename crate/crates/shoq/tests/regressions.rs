//! Inputs that once produced wrong answers or broken models.

use shoq::{check, parse_kb};
use shoq_core::{EngineConfig, Verdict};

fn verdict(text: &str) -> Verdict {
    let kb = parse_kb(text).unwrap();
    let checked = check(&kb, &EngineConfig::default()).unwrap();
    if let Some(ex) = &checked.extraction {
        assert_eq!(ex.model.check_model(&kb), Ok(()));
    }
    checked.verdict()
}

#[test]
fn ge2_forall_nominal_is_unsat() {
    assert_eq!(verdict("abox a : atleast 2 r top\nabox a : only r one b\n"), Verdict::Unsatisfiable);
}

// A state's cached feasibility answer must not survive installing its
// ILConstraints.
#[test]
fn self_loop_counting_is_unsat() {
    let text = "abox a : (some s not B and atleast 3 r one a)\nabox a : B\n";
    assert_eq!(verdict(text), Verdict::Unsatisfiable);
}

// ≤1 r.{a} is only relevant for numeric roles.
#[test]
fn transitive_superrole_with_nominals() {
    let text = "rbox trans r\nrbox s sub r\nabox b : not some s B\n\
                abox a : some r not not one b\nabox a : some r some s one a\n";
    assert_eq!(verdict(text), Verdict::Satisfiable);
}

// TBox nominals must follow merges on the branch.
#[test]
fn tbox_nominal_after_merge() {
    let text = "rbox trans r\nrbox s sub r\ntbox not one b sub only s atmost 3 s not B\n\
                abox a : atleast 2 s (top or A)\nabox s(a, b)\n";
    assert_eq!(verdict(text), Verdict::Satisfiable);
}

// Residual formulas added when a cached node is reused must reach the
// elements built below it.
#[test]
fn residuals_on_cache_reuse() {
    let text = "rbox trans s\ntbox only r not A sub B\nabox b : some r (one a or A)\n\
                abox a : not B\nabox b : only s (one a and top)\n";
    assert_eq!(verdict(text), Verdict::Satisfiable);
}
