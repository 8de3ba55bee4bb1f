mod common;

use common::{oracle_member, two_class, two_class_grammar};
use eqgen::automata::{membership, WeightMap};
use eqgen::carriers::peano;
use eqgen::congruence::finite_quotient;
use eqgen::egen::{egen, maximal_sets, universal_substitutions};
use eqgen::enumerate::{enumerate, Limits};
use eqgen::{Substitution, Sym, Term};
use proptest::prelude::*;

fn peano_term(vars: &'static [&'static str]) -> impl Strategy<Value = Term> {
    let leaf = if vars.is_empty() {
        Just(Term::numeral(0)).boxed()
    } else {
        prop_oneof![
            Just(Term::numeral(0)),
            prop::sample::select(vars).prop_map(Term::var)
        ]
        .boxed()
    };
    leaf.prop_recursive(2, 8, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|x| Term::app("s", vec![x])),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Term::app("+", vec![x, y])),
            (inner.clone(), inner).prop_map(|(x, y)| Term::app("*", vec![x, y])),
        ]
    })
}

fn ground_pair() -> impl Strategy<Value = Substitution> {
    (peano_term(&[]), peano_term(&[]))
        .prop_map(|(x, y)| Substitution::from_pairs([("vx", x), ("vy", y)]))
}

#[test]
fn sampled_members_hit_every_input_class() {
    let cg = finite_quotient(&peano(3, true, &["+", "*"]).unwrap()).unwrap();
    for (a, b) in [(0, 1), (2, 3), (1, 1), (0, 3)] {
        let roots = [cg.classes[a], cg.classes[b]];
        let r = egen(&cg, &roots).unwrap();
        let members =
            enumerate(&r.grammar, r.root, &WeightMap::size(), Limits::count(100)).unwrap();
        assert_eq!(members.len(), 100);
        for (_, t) in &members {
            for (root, tau) in roots.iter().zip(&r.universal.taus) {
                assert!(
                    membership(&cg.grammar, *root, &tau.apply(t)).unwrap(),
                    "{t} under {tau}"
                );
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn normalized_substitutions_keep_membership(
        t in peano_term(&["vx", "vy"]),
        sigma in ground_pair(),
        which in 0usize..3,
    ) {
        let g = two_class_grammar();
        let maps = maximal_sets(&two_class()).unwrap();
        let nt = g.nonterminals().nth(which).unwrap();
        if oracle_member(&g, nt, &sigma.apply(&t)) {
            let normal = maps.normalize_subst(&sigma);
            prop_assert!(oracle_member(&g, nt, &normal.apply(&t)), "{} under {}", t, normal);
        }
    }

    #[test]
    fn universal_substitutions_reach_every_instance(
        t in peano_term(&["vx", "vy"]),
        first in ground_pair(),
        second in ground_pair(),
        which in 0usize..3,
    ) {
        let g = two_class_grammar();
        let maps = maximal_sets(&two_class()).unwrap();
        let universal = universal_substitutions(&maps, 2).unwrap();
        let nt = g.nonterminals().nth(which).unwrap();
        let mut sigma = Substitution::new();
        for x in ["vx", "vy"].map(Sym::new) {
            let tuple = [maps.classify(first.get(x).unwrap()), maps.classify(second.get(x).unwrap())];
            sigma.insert(x, Term::Var(universal.var_for(&tuple)));
        }
        for (given, tau) in [&first, &second].into_iter().zip(&universal.taus) {
            if oracle_member(&g, nt, &given.apply(&t)) {
                prop_assert!(oracle_member(&g, nt, &tau.apply(&sigma.apply(&t))));
            }
        }
    }
}
