mod common;

use std::collections::{BTreeSet, HashMap};

use common::t;
use eqgen::automata::{instance_in_class, WeightMap};
use eqgen::carriers::{peano, words};
use eqgen::congruence::finite_quotient;
use eqgen::enumerate::Limits;
use eqgen::learn::{
    hyp_determinate, hyp_set, lgg_ce, plotkin_lgg, remove_det_literals, Clause, HornClause, Literal,
};
use eqgen::syntax::{parse_term_with, ParseOptions};
use eqgen::term::{is_constructor_term, tuple_arity};
use eqgen::{Substitution, Sym, Term};
use proptest::prelude::*;

fn all_assignments(vars: &[Sym], values: &[Term]) -> Vec<Substitution> {
    let mut out = vec![Substitution::new()];
    for x in vars {
        out = out
            .into_iter()
            .flat_map(|s| {
                values.iter().map(move |v| {
                    let mut next = s.clone();
                    next.insert(*x, v.clone());
                    next
                })
            })
            .collect();
    }
    out
}

#[test]
fn hypotheses_respect_positive_and_negative_examples() {
    let spec = peano(1, true, &["+", "*"]).unwrap();
    let mut cg = finite_quotient(&spec).unwrap();
    let pos = [t("(0,0)"), t("(0,s(0))")];
    let neg = [t("(s(0),0)")];
    let h = hyp_set(&mut cg, &pos, &neg, 1 << 16).unwrap();
    let members = h.enumerate(&WeightMap::size(), Limits::new(60, 5)).unwrap();
    assert!(!members.is_empty());
    let pos_classes: Vec<_> = pos.iter().map(|p| cg.class_nt_of(p).unwrap()).collect();
    let values = cg.representatives.clone();
    for (_, hyp) in &members {
        for class in &pos_classes {
            assert!(
                instance_in_class(hyp, &cg.grammar, *class),
                "{hyp} misses a positive"
            );
        }
        let vars: Vec<Sym> = hyp.vars().into_iter().collect();
        for sigma in all_assignments(&vars, &values) {
            let instance = sigma.apply(hyp);
            let hits = neg.iter().any(|n| {
                instance
                    .args()
                    .iter()
                    .zip(n.args())
                    .all(|(a, b)| spec.eval_term(a) == spec.eval_term(b))
            });
            assert!(!hits, "{hyp} has instance {instance} in a negative class");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn determinate_patterns_match_their_inputs(a in 0usize..3, b in 0usize..3, c in 0usize..3) {
        let mut cg = finite_quotient(&peano(6, true, &["+"]).unwrap()).unwrap();
        let example = |x: usize, y: usize| (Term::tuple(vec![Term::numeral(x), Term::numeral(y)]), Term::numeral(x + y));
        let positives = [example(a, b), example(b, c)];
        let set = hyp_determinate(&mut cg, &positives, &[]).unwrap();
        let signature = cg.grammar.signature().clone();
        for entry in &set.entries {
            // Tuples group the inputs and count as constructors.
            prop_assert!(tuple_arity(entry.pattern.head()).is_some());
            prop_assert!(entry.pattern.args().iter().all(|x| is_constructor_term(x, &signature)));
            for (index, matcher) in entry.indices.iter().zip(&entry.matchers) {
                if let Some((input, _)) = positives.get(*index) {
                    prop_assert_eq!(&matcher.apply(&entry.pattern), input);
                }
            }
            let allowed = entry.pattern.vars();
            for (_, body) in entry.stream(&[], &WeightMap::size(), Limits::new(20, 6)).unwrap() {
                prop_assert!(body.vars().is_subset(&allowed), "{} uses variables outside {}", body, entry.pattern);
            }
        }
    }
}

/// Flattened append clauses: `a(x, y, z)` reads as `z = x ++ y`.
#[test]
fn removing_determinate_literals_from_the_classical_lgg_lands_in_the_constrained_set() {
    let mut cg = finite_quotient(&words(&["b", "d"], 3).unwrap()).unwrap();
    let opts = ParseOptions::new().with_signature(cg.grammar.signature());
    let term = |s: &str| parse_term_with(s, &opts).unwrap();
    let flat = |head: &str, appends: &[&str], qs: &[&str]| {
        let head = Literal::pos("p0", term(head));
        let mut body: Vec<Literal> = appends.iter().map(|a| Literal::pos("a", term(a))).collect();
        body.extend(qs.iter().map(|q| Literal::pos("q", term(q))));
        (head, body)
    };
    let qs = ["(ε,d)", "(a(b,b),d)"];
    let (h1, b1) = flat(
        "(b,a(b,a(b,b)))",
        &["(b,b,a(b,b))", "(a(b,b),b,a(b,a(b,b)))"],
        &qs,
    );
    let (h2, b2) = flat("(ε,b)", &["(ε,ε,ε)", "(ε,b,b)"], &qs);

    let classical = plotkin_lgg(&Clause::horn(h1.clone(), b1), &Clause::horn(h2.clone(), b2));
    let head = classical
        .literals
        .iter()
        .find(|l| l.positive)
        .unwrap()
        .clone();
    let body: Vec<Literal> = classical
        .literals
        .iter()
        .filter(|l| !l.positive)
        .map(|l| Literal {
            positive: true,
            ..l.clone()
        })
        .collect();
    let input_vars: BTreeSet<Sym> = head.arg.args()[0].vars();
    // Cross pairs of literals introduce variables that neither the head
    // input nor any append output determines; such literals have no
    // counterpart in a constrained clause and are left out.
    let mut known = input_vars.clone();
    loop {
        let before = known.len();
        for l in body.iter().filter(|l| l.predicate == Sym::new("a")) {
            let (inputs, output) = l.arg.args().split_at(2);
            if inputs.iter().all(|x| x.vars().is_subset(&known)) {
                known.extend(output[0].vars());
            }
        }
        if known.len() == before {
            break;
        }
    }
    let body: Vec<Literal> = body
        .into_iter()
        .filter(|l| l.arg.vars().is_subset(&known))
        .collect();
    let defs = HashMap::from([(Sym::new("a"), Sym::new("a"))]);
    let reduced = remove_det_literals(&HornClause::new(head, body), &defs, &input_vars).unwrap();

    let constrained = lgg_ce(
        &mut cg,
        &HornClause::new(h1, qs.iter().map(|q| Literal::pos("q", term(q))).collect()),
        &HornClause::new(h2, qs.iter().map(|q| Literal::pos("q", term(q))).collect()),
    )
    .unwrap();
    assert!(!reduced.body.is_empty());
    assert!(constrained.admits(&reduced), "{reduced} not admitted");
}
