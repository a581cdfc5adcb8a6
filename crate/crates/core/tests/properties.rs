use std::sync::Arc;

use fmtk_core::counterexample::{build_a, build_b, phi, random_near_model};
use fmtk_core::logic::{
    classify_prefix, evaluate, evaluate_naive, evaluate_sentence, parse, to_prenex, Assignment, CompiledFormula,
};
use fmtk_core::random::{
    random_formula, random_relabel, random_sentence, random_structure, random_subset, seeded, var_pool,
};
use fmtk_core::structure::parse_structure;
use fmtk_core::Vocabulary;
use proptest::prelude::*;
use rand::Rng;

fn vocab() -> Arc<Vocabulary> {
    Arc::new(Vocabulary::of(&[("E", 2), ("P", 1), ("T", 3)], &["c", "d"]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn compiled_agrees_with_naive(seed in any::<u64>()) {
        let v = vocab();
        let mut rng = seeded(seed);
        let s = random_structure(&v, rng.gen_range(1..=4), 0.35, &mut rng);
        let f = random_formula(&v, &var_pool(3), 5, &mut rng);
        let a: Assignment = f.free_vars().into_iter().map(|x| (x, rng.gen_range(1..=s.size() as u32))).collect();
        prop_assert_eq!(evaluate(&s, &f, &a).unwrap(), evaluate_naive(&s, &f, &a).unwrap(), "{}", f);
    }

    #[test]
    fn prenex_form_is_prenex_and_equivalent(seed in any::<u64>()) {
        let v = vocab();
        let mut rng = seeded(seed);
        let f = random_sentence(&v, 5, &mut rng);
        let p = to_prenex(&f);
        prop_assert!(p.is_sentence());
        let class = classify_prefix(&p).unwrap();
        prop_assert_eq!(class.quantifier_count(), p.quantifier_count());
        prop_assert!(p.quantifier_count() <= f.quantifier_count());
        for _ in 0..4 {
            let s = random_structure(&v, rng.gen_range(1..=4), 0.4, &mut rng);
            let expected = evaluate_naive(&s, &f, &Assignment::new()).unwrap();
            prop_assert_eq!(evaluate_naive(&s, &p, &Assignment::new()).unwrap(), expected, "{} vs {}", f, p);
        }
    }

    #[test]
    fn rendering_round_trips(seed in any::<u64>()) {
        let v = vocab();
        let mut rng = seeded(seed);
        let f = random_formula(&v, &var_pool(3), 5, &mut rng);
        prop_assert_eq!(parse(&f.to_string(), &v).unwrap(), f);
    }

    #[test]
    fn structure_text_round_trips(seed in any::<u64>()) {
        let v = vocab();
        let mut rng = seeded(seed);
        let s = random_structure(&v, rng.gen_range(1..=6), 0.3, &mut rng);
        prop_assert_eq!(parse_structure(&s.to_text().unwrap()).unwrap(), s);
    }

    #[test]
    fn isomorphic_copies_agree(seed in any::<u64>()) {
        let v = vocab();
        let mut rng = seeded(seed);
        let s = random_structure(&v, rng.gen_range(1..=5), 0.4, &mut rng);
        let t = random_relabel(&s, &mut rng);
        let f = random_sentence(&v, 5, &mut rng);
        prop_assert_eq!(evaluate_sentence(&s, &f).unwrap(), evaluate_sentence(&t, &f).unwrap());
    }

    // phi(k) is hereditary, so its negation survives every extension
    #[test]
    fn negated_phi_is_extension_closed(seed in any::<u64>(), k in 0usize..3) {
        let mut rng = seeded(seed);
        let big = random_near_model(rng.gen_range(1..=6), &mut rng);
        let small = big.induced_substructure(&random_subset(&big, &mut rng)).unwrap();
        let f = CompiledFormula::new(&phi(k), big.vocab()).unwrap();
        if !f.check(&small) {
            prop_assert!(!f.check(&big));
        }
    }
}

#[test]
fn generic_prenex_of_phi_separates_the_grid() {
    for k in 0..4 {
        let p = to_prenex(&phi(k));
        assert!(classify_prefix(&p).unwrap().quantifier_count() > k);
        assert!(evaluate_sentence(&build_a(1, k).unwrap(), &p).unwrap());
        for i in 0..=k {
            assert!(!evaluate_sentence(&build_b(1, k, i).unwrap(), &p).unwrap());
        }
    }
}
