mod common;

use common::{all_terms, oracle_member, random_grammar, small_letters};
use eqgen::automata::{min_weight, simplify, WeightMap};
use eqgen::enumerate::{enumerate, Limits};
use eqgen::TreeGrammar;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn grammar(seed: u64) -> TreeGrammar {
    random_grammar(&mut ChaCha8Rng::seed_from_u64(seed), 3, "N")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn min_weight_matches_the_first_enumerated_term(seed in any::<u64>()) {
        let g = grammar(seed);
        let weights = WeightMap::size();
        let minima = min_weight(&g, &weights);
        for nt in g.nonterminals() {
            let first = enumerate(&g, nt, &weights, Limits::count(1)).unwrap();
            match (&minima[nt.index()], first.first()) {
                (Some((w, _)), Some((first_w, _))) => prop_assert_eq!(w, first_w),
                (None, None) => {}
                (m, f) => prop_assert!(false, "min_weight {:?} but first {:?}", m, f),
            }
        }
    }

    #[test]
    fn enumeration_is_sorted_and_duplicate_free(seed in any::<u64>()) {
        let g = grammar(seed);
        let root = g.nonterminals().next().unwrap();
        let out = enumerate(&g, root, &WeightMap::size(), Limits::count(200)).unwrap();
        for pair in out.windows(2) {
            prop_assert!(pair[0].0 <= pair[1].0);
        }
        let distinct: std::collections::BTreeSet<_> = out.iter().map(|(_, t)| t.clone()).collect();
        prop_assert_eq!(distinct.len(), out.len());
        for (w, t) in &out {
            prop_assert_eq!(*w, WeightMap::size().term(t));
            prop_assert!(oracle_member(&g, root, t));
        }
    }

    #[test]
    fn simplify_preserves_root_languages(seed in any::<u64>()) {
        let g = grammar(seed);
        let roots: Vec<_> = g.nonterminals().take(2).collect();
        let s = simplify(&g, &roots);
        for term in all_terms(&small_letters(), 4) {
            for root in &roots {
                let before = oracle_member(&g, *root, &term);
                let after = s.get(*root).is_some_and(|r| oracle_member(&s.grammar, r, &term));
                prop_assert_eq!(before, after, "{} at {:?}", term, root);
            }
        }
    }

    #[test]
    fn printed_grammars_reparse_identically(seed in any::<u64>()) {
        let g = grammar(seed);
        let text = g.to_string();
        let again = TreeGrammar::parse(&text, Some(g.signature())).unwrap();
        prop_assert_eq!(again.to_string(), text);
    }
}
