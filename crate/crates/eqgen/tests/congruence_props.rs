mod common;

use std::collections::HashMap;

use common::{
    all_terms, oracle_member, random_grammar, random_ground, small_letters, small_signature,
};
use eqgen::carriers::{booleans, peano, words, CarrierSpec};
use eqgen::congruence::{
    finite_quotient, from_convergent_rs, from_ground_equations, normal_form_grammar, truncate,
};
use eqgen::grammar::{Alt, Letter};
use eqgen::theory::EquationalTheory;
use eqgen::{Sym, Term};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Congruence closure over a subterm-closed universe by repeated
/// union-find passes until no argument-wise congruent pair is left apart.
struct Closure {
    index: HashMap<Term, usize>,
    parent: Vec<usize>,
}

impl Closure {
    fn new(universe: &[Term], equations: &[(Term, Term)]) -> Self {
        let index = universe
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, t)| (t, i))
            .collect();
        let mut c = Closure {
            index,
            parent: (0..universe.len()).collect(),
        };
        for (l, r) in equations {
            c.union(l, r);
        }
        loop {
            let mut changed = false;
            for a in universe {
                for b in universe {
                    if c.find_term(a) != c.find_term(b) && c.congruent_args(a, b) {
                        c.union(a, b);
                        changed = true;
                    }
                }
            }
            if !changed {
                return c;
            }
        }
    }

    fn find(&self, mut i: usize) -> usize {
        while self.parent[i] != i {
            i = self.parent[i];
        }
        i
    }

    fn find_term(&self, t: &Term) -> usize {
        self.find(self.index[t])
    }

    fn union(&mut self, a: &Term, b: &Term) {
        let (ra, rb) = (self.find_term(a), self.find_term(b));
        self.parent[ra] = rb;
    }

    fn congruent_args(&self, a: &Term, b: &Term) -> bool {
        a.head() == b.head()
            && a.args().len() == b.args().len()
            && !a.args().is_empty()
            && a.args()
                .iter()
                .zip(b.args())
                .all(|(x, y)| self.find_term(x) == self.find_term(y))
    }
}

#[test]
fn ground_equation_classes_match_brute_force_closure() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let terms = all_terms(&small_letters(), 3);
    for _ in 0..12 {
        let equations: Vec<(Term, Term)> = (0..2)
            .map(|_| (random_ground(&mut rng, 3), random_ground(&mut rng, 2)))
            .collect();
        let (cg, class_of) = from_ground_equations(&small_signature(), &equations).unwrap();
        let mut universe = terms.clone();
        for (l, r) in &equations {
            for sub in l.subterms().into_iter().chain(r.subterms()) {
                if !universe.contains(sub) {
                    universe.push(sub.clone());
                }
            }
        }
        let closure = Closure::new(&universe, &equations);
        for (rep, nt) in &class_of {
            for t in &terms {
                let expected = closure.find_term(t) == closure.find_term(rep);
                assert_eq!(
                    oracle_member(&cg.grammar, *nt, t),
                    expected,
                    "{t} vs class of {rep} under {equations:?}"
                );
            }
        }
    }
}

fn assert_quotient_is_congruence(spec: &CarrierSpec) {
    let cg = finite_quotient(spec).unwrap();
    let position: HashMap<_, usize> = cg
        .classes
        .iter()
        .enumerate()
        .map(|(i, nt)| (*nt, i))
        .collect();
    for (value, nt) in cg.classes.iter().enumerate() {
        for alt in cg.grammar.rule(*nt) {
            if let Alt::App(f, args) = alt {
                let arg_values: Vec<usize> = args.iter().map(|a| position[a]).collect();
                assert_eq!(spec.eval(*f, &arg_values), Some(value), "{f}{arg_values:?}");
            }
        }
    }
    let letters: Vec<Letter> = spec
        .signature
        .symbols()
        .map(|(s, i)| Letter::Sym(s, i.arity))
        .collect();
    for t in all_terms(&letters, 3).into_iter().take(5000) {
        let Some(value) = spec.eval_term(&t) else {
            continue;
        };
        assert!(
            oracle_member(&cg.grammar, cg.classes[value], &t),
            "{t} outside its class"
        );
    }
}

#[test]
fn finite_quotients_are_congruences() {
    assert_quotient_is_congruence(&peano(3, true, &["+", "*"]).unwrap());
    assert_quotient_is_congruence(&peano(4, false, &["+"]).unwrap());
    assert_quotient_is_congruence(&booleans(&["not", "and", "or"]).unwrap());
    assert_quotient_is_congruence(&words(&["b", "d"], 2).unwrap());
}

#[test]
fn convergent_rewriting_alternatives_normalize_to_their_class() {
    let th = EquationalTheory::builtin("peano", None).unwrap();
    let rules = th.rewrite_system().unwrap();
    let cg = from_convergent_rs(&th.signature, &rules, 5, 1000).unwrap();
    let mut checked = 0;
    for (nt, rep) in cg.classes.iter().zip(&cg.representatives) {
        for alt in cg.grammar.rule(*nt) {
            if let Alt::App(f, args) = alt {
                let args: Vec<Term> = args
                    .iter()
                    .map(|a| cg.representative(*a).unwrap().clone())
                    .collect();
                assert_eq!(&rules.normalize(&Term::App(*f, args), 1000).unwrap(), rep);
                checked += 1;
            }
        }
    }
    assert!(checked > 0);
}

#[test]
fn normal_form_grammar_accepts_exactly_the_redex_free_terms() {
    let th = EquationalTheory::builtin("peano", None).unwrap();
    let rules = th.rewrite_system().unwrap();
    let (g, root) = normal_form_grammar(&th.signature, &rules, &[Sym::new("vx")]).unwrap();
    let letters = [
        Letter::Sym(Sym::new("0"), 0),
        Letter::Sym(Sym::new("s"), 1),
        Letter::Sym(Sym::new("+"), 2),
        Letter::Sym(Sym::new("*"), 2),
        Letter::Leaf(Sym::new("vx")),
    ];
    for t in all_terms(&letters, 3) {
        assert_eq!(oracle_member(&g, root, &t), !rules.has_redex(&t), "{t}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn truncation_only_shrinks_languages(seed in any::<u64>(), keep in 1usize..3) {
        let g = random_grammar(&mut ChaCha8Rng::seed_from_u64(seed), 3, "N");
        let small = truncate(&g, keep).unwrap();
        for t in all_terms(&small_letters(), 3) {
            for nt in g.nonterminals() {
                if oracle_member(&small, nt, &t) {
                    prop_assert!(oracle_member(&g, nt, &t));
                }
            }
        }
    }
}
