mod common;

use common::terms_upto_size;
use eqgen::grammar::Letter;
use eqgen::term::{alpha_equivalent, compose, generalizes, lgg_syntactic, match_syntactic};
use eqgen::{Substitution, Sym, Term};
use proptest::prelude::*;

const VARS: [&str; 3] = ["vx", "vy", "vz"];

fn term_with_vars() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        Just(Term::constant("a")),
        Just(Term::constant("b")),
        prop::sample::select(&VARS[..]).prop_map(Term::var),
    ];
    leaf.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|x| Term::app("f", vec![x])),
            (inner.clone(), inner).prop_map(|(x, y)| Term::app("g", vec![x, y])),
        ]
    })
}

fn ground_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![Just(Term::constant("a")), Just(Term::constant("b"))];
    leaf.prop_recursive(3, 8, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|x| Term::app("f", vec![x])),
            (inner.clone(), inner).prop_map(|(x, y)| Term::app("g", vec![x, y])),
        ]
    })
    .prop_filter("size at most 4", |t| t.size() <= 4)
}

fn substitution() -> impl Strategy<Value = Substitution> {
    prop::collection::vec(prop::option::of(term_with_vars()), VARS.len()).prop_map(|images| {
        let mut s = Substitution::new();
        for (x, image) in VARS.iter().zip(images) {
            if let Some(t) = image {
                s.insert(Sym::new(x), t);
            }
        }
        s
    })
}

fn generalization_letters() -> Vec<Letter> {
    vec![
        Letter::Sym(Sym::new("a"), 0),
        Letter::Sym(Sym::new("b"), 0),
        Letter::Sym(Sym::new("f"), 1),
        Letter::Sym(Sym::new("g"), 2),
        Letter::Leaf(Sym::new("vx")),
        Letter::Leaf(Sym::new("vy")),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn composition_law(t in term_with_vars(), s1 in substitution(), s2 in substitution()) {
        prop_assert_eq!(compose(&s1, &s2).apply(&t), s2.apply(&s1.apply(&t)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lgg_is_the_least_common_generalization(t1 in ground_term(), t2 in ground_term()) {
        let (lgg, matchers) = lgg_syntactic(&[t1.clone(), t2.clone()]);
        prop_assert!(match_syntactic(&lgg, &t1).is_some());
        prop_assert!(match_syntactic(&lgg, &t2).is_some());
        prop_assert_eq!(matchers[0].apply(&lgg), t1.clone());
        prop_assert_eq!(matchers[1].apply(&lgg), t2.clone());
        for candidate in terms_upto_size(&generalization_letters(), 5) {
            if generalizes(&candidate, &t1) && generalizes(&candidate, &t2) {
                prop_assert!(generalizes(&candidate, &lgg), "{} does not generalize {}", candidate, lgg);
            }
        }
    }

    #[test]
    fn repeated_inputs_do_not_change_the_lgg(t1 in ground_term(), t2 in ground_term()) {
        let (twice, _) = lgg_syntactic(&[t1.clone(), t2.clone(), t1.clone()]);
        let (once, _) = lgg_syntactic(&[t1, t2]);
        prop_assert!(alpha_equivalent(&twice, &once), "{} vs {}", twice, once);
    }
}
