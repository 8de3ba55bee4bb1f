//! Brute-force oracles and generators shared by the integration tests.
#![allow(dead_code)]

use eqgen::congruence::ClassGrammar;
use eqgen::grammar::{Alt, Letter};
use eqgen::syntax::parse_term;
use eqgen::{Nt, Signature, Sym, Term, TreeGrammar};
use rand::Rng;

/// Classes of `0` and `s(0)` over `+` and `*`; `Nt` accepts every ground
/// term.
pub const TWO_CLASS: &str = "\
N0 ::= 0 | N0+N0 | N0*Nt | Nt*N0
N1 ::= s(N0) | N0+N1 | N1+N0 | N1*N1
Nt ::= 0 | s(Nt) | Nt+Nt | Nt*Nt
";

pub fn t(text: &str) -> Term {
    parse_term(text).unwrap()
}

pub fn two_class_grammar() -> TreeGrammar {
    TreeGrammar::parse(TWO_CLASS, None).unwrap()
}

pub fn two_class() -> ClassGrammar {
    let g = two_class_grammar();
    let classes = vec![g.nt("N0").unwrap(), g.nt("N1").unwrap()];
    ClassGrammar::new(g, classes).unwrap()
}

/// Membership by direct recursion over the rules, independent of the
/// bottom-up recognizer in the library.
pub fn oracle_member(g: &TreeGrammar, nt: Nt, term: &Term) -> bool {
    g.rule(nt).iter().any(|alt| match (alt, term) {
        (Alt::Leaf(x), Term::Var(y)) => x == y,
        (Alt::App(f, args), Term::App(h, items)) => {
            f == h
                && args.len() == items.len()
                && args.iter().zip(items).all(|(a, i)| oracle_member(g, *a, i))
        }
        _ => false,
    })
}

/// Every term over `letters` of depth at most `depth` (leaves have depth 1).
pub fn all_terms(letters: &[Letter], depth: usize) -> Vec<Term> {
    let mut levels: Vec<Term> = Vec::new();
    for _ in 0..depth {
        let mut next = Vec::new();
        for l in letters {
            match *l {
                Letter::Leaf(x) => next.push(Term::Var(x)),
                Letter::Sym(f, 0) => next.push(Term::App(f, Vec::new())),
                Letter::Sym(f, n) => {
                    for args in product(&levels, n) {
                        next.push(Term::App(f, args));
                    }
                }
            }
        }
        levels = next;
    }
    levels
}

fn product(items: &[Term], n: usize) -> Vec<Vec<Term>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                items.iter().map(move |i| {
                    let mut p = prefix.clone();
                    p.push(i.clone());
                    p
                })
            })
            .collect();
    }
    out
}

/// Every term of size at most `size` over the letters.
pub fn terms_upto_size(letters: &[Letter], size: usize) -> Vec<Term> {
    let mut by_size: Vec<Vec<Term>> = vec![Vec::new(); size + 1];
    for s in 1..=size {
        let mut here = Vec::new();
        for l in letters {
            match *l {
                Letter::Leaf(x) if s == 1 => here.push(Term::Var(x)),
                Letter::Sym(f, 0) if s == 1 => here.push(Term::App(f, Vec::new())),
                Letter::Sym(f, n) if n > 0 && s > n => {
                    for args in splits(&by_size, s - 1, n) {
                        here.push(Term::App(f, args));
                    }
                }
                _ => {}
            }
        }
        by_size[s] = here;
    }
    by_size.into_iter().flatten().collect()
}

fn splits(by_size: &[Vec<Term>], total: usize, parts: usize) -> Vec<Vec<Term>> {
    if parts == 0 {
        return if total == 0 {
            vec![Vec::new()]
        } else {
            Vec::new()
        };
    }
    let mut out = Vec::new();
    for first in 1..=total.saturating_sub(parts - 1) {
        for head in &by_size[first] {
            for mut rest in splits(by_size, total - first, parts - 1) {
                rest.insert(0, head.clone());
                out.push(rest);
            }
        }
    }
    out
}

pub fn small_signature() -> Signature {
    Signature::new()
        .with("a", 0, true)
        .with("b", 0, true)
        .with("f", 1, true)
        .with("g", 2, true)
}

pub fn small_letters() -> Vec<Letter> {
    vec![
        Letter::Sym(Sym::new("a"), 0),
        Letter::Sym(Sym::new("b"), 0),
        Letter::Sym(Sym::new("f"), 1),
        Letter::Sym(Sym::new("g"), 2),
    ]
}

/// A random grammar over the small signature with `nts` nonterminals.
pub fn random_grammar(rng: &mut impl Rng, nts: usize, prefix: &str) -> TreeGrammar {
    let mut g = TreeGrammar::new(small_signature());
    let ids: Vec<Nt> = (0..nts)
        .map(|i| g.add_nonterminal(&format!("{prefix}{i}")))
        .collect();
    for nt in &ids {
        for _ in 0..rng.gen_range(1..=4) {
            let alt = match rng.gen_range(0..4) {
                0 => Alt::App(Sym::new("a"), Vec::new()),
                1 => Alt::App(Sym::new("b"), Vec::new()),
                2 => Alt::App(Sym::new("f"), vec![ids[rng.gen_range(0..nts)]]),
                _ => Alt::App(
                    Sym::new("g"),
                    vec![ids[rng.gen_range(0..nts)], ids[rng.gen_range(0..nts)]],
                ),
            };
            g.add_alt(*nt, alt);
        }
    }
    g
}

/// A random ground term over the small signature.
pub fn random_ground(rng: &mut impl Rng, depth: usize) -> Term {
    if depth <= 1 || rng.gen_bool(0.3) {
        return Term::constant(if rng.gen_bool(0.5) { "a" } else { "b" });
    }
    if rng.gen_bool(0.5) {
        Term::app("f", vec![random_ground(rng, depth - 1)])
    } else {
        Term::app(
            "g",
            vec![random_ground(rng, depth - 1), random_ground(rng, depth - 1)],
        )
    }
}
