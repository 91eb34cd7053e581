mod common;

use proptest::prelude::*;
use shoq::parse_kb;
use shoq::parser::parse_concept;
use shoq::printer::{concept_text, print_kb};
use shoq_core::syntax::nnf;

proptest! {
    #[test]
    fn printing_is_a_fixed_point(seed in any::<u64>(), depth in 1u32..=3) {
        let shape = common::KbShape { depth, ..common::KbShape::default() };
        let kb = parse_kb(&common::random_kb(seed, &shape)).unwrap();
        let printed = print_kb(&kb);
        let again = parse_kb(&printed).unwrap();
        // Individual ranks follow first occurrence, which printing may reorder.
        prop_assert_eq!(again.role_axioms(), kb.role_axioms());
        prop_assert_eq!(again.tbox(), kb.tbox());
        prop_assert_eq!(again.abox(), kb.abox());
        prop_assert_eq!(print_kb(&again), printed);
    }

    #[test]
    fn concepts_survive_printing(seed in any::<u64>()) {
        let kb = parse_kb(&common::random_kb(seed, &common::KbShape::default())).unwrap();
        for f in kb.abox() {
            if let Some(c) = f.concept() {
                let text = concept_text(c).unwrap();
                prop_assert_eq!(&nnf(&parse_concept(&text).unwrap()), c);
            }
        }
    }
}
