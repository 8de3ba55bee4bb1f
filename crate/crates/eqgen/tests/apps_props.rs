mod common;

use common::t;
use eqgen::apps::editor::{
    editor_grammar, editor_suggest, Command, EditorWorld, Position, SAMPLE_SCREEN,
};
use eqgen::apps::lemma::{suggest_lemmas, LemmaTask};
use eqgen::apps::series::{replay, series_law, SeriesTask};
use eqgen::automata::WeightMap;
use eqgen::enumerate::Limits;
use eqgen::theory::EquationalTheory;
use eqgen::{Substitution, Term};

const STEP_LIMIT: usize = 10_000;

fn check_lemmas(theory: &str, bound: u64, rhs: &str, samples: Vec<Substitution>, count: usize) {
    let th = EquationalTheory::builtin(theory, Some(bound)).unwrap();
    let mut cg = th.compile().unwrap();
    let rules = th.rewrite_system().unwrap();
    let task = LemmaTask::new(t(rhs), samples);
    let found: Vec<Term> = suggest_lemmas(&mut cg, &th.signature, &rules, &task)
        .unwrap()
        .stream(&WeightMap::size(), Limits::count(count))
        .unwrap()
        .map(|(_, x)| x)
        .collect();
    assert!(!found.is_empty());
    for lemma in &found {
        assert!(!rules.has_redex(lemma), "{lemma} is not in normal form");
        for sigma in &task.samples {
            let left = rules
                .normalize(&sigma.apply(&task.rhs), STEP_LIMIT)
                .unwrap();
            let right = rules.normalize(&sigma.apply(lemma), STEP_LIMIT).unwrap();
            assert_eq!(
                left, right,
                "{lemma} differs from {} under {sigma}",
                task.rhs
            );
        }
    }
}

#[test]
fn lemma_candidates_agree_on_every_sample() {
    let numbers = |x: usize, y: usize| {
        Substitution::from_pairs([("vx", Term::numeral(x)), ("vy", Term::numeral(y))])
    };
    check_lemmas(
        "peano",
        6,
        "vx+vy",
        vec![numbers(0, 1), numbers(2, 0), numbers(1, 2)],
        20,
    );
    check_lemmas(
        "peano",
        8,
        "vx*s(vy)",
        vec![numbers(0, 1), numbers(2, 0), numbers(1, 2)],
        20,
    );
    let words = |x: &str, y: &str| Substitution::from_pairs([("vx", t(x)), ("vy", t(y))]);
    check_lemmas(
        "lists",
        3,
        "rv(ap(vx,vy))",
        vec![
            words("nil", "cons(b,nil)"),
            words("cons(a,nil)", "nil"),
            words("cons(b,cons(a,nil))", "cons(a,nil)"),
        ],
        20,
    );
}

#[test]
fn series_laws_replay_on_their_windows() {
    for (theory, bound, series) in [
        ("peano", 12, "0;1,4,9"),
        ("peano", 8, "1,1;2,3,5"),
        ("peano-if", 6, "0,1;2,1,4,1"),
    ] {
        let th = EquationalTheory::builtin(theory, Some(bound)).unwrap();
        let mut cg = th.compile().unwrap();
        let task = SeriesTask::parse(series, None).unwrap();
        let laws = series_law(&mut cg, &task).unwrap();
        let found: Vec<Term> = laws
            .stream(&WeightMap::size(), Limits::count(10))
            .unwrap()
            .map(|(_, x)| x)
            .collect();
        assert!(!found.is_empty(), "{series}");
        for law in &found {
            assert!(
                replay(&mut cg, &laws, law, &task.windows()).unwrap(),
                "{law} on {series}"
            );
        }
    }
}

#[test]
fn editor_suggestions_reach_the_target() {
    let world = EditorWorld::new(SAMPLE_SCREEN, Command::ALL.to_vec());
    let eg = editor_grammar(&world);
    let pos = |s: &str| Position::parse(s).unwrap();
    for moves in [
        vec![(pos("k2"), pos("b2"))],
        vec![(pos("m2"), pos("o2")), (pos("n4"), pos("v4"))],
    ] {
        let suggestions = editor_suggest(&eg, &moves).unwrap();
        let found: Vec<Term> = suggestions
            .stream(&world.weights(false), Limits::count(50))
            .unwrap()
            .map(|(_, x)| x)
            .collect();
        assert_eq!(found.len(), 50);
        for command in &found {
            for (start, end) in &moves {
                assert_eq!(
                    world.eval(command, *start),
                    Some(*end),
                    "{command} from {start}"
                );
            }
        }
    }
}
