//! Construction laws for series: from the last `k` elements of a series,
//! terms computing each element from its place and its predecessors.
//!
//! Each of the `k` windows becomes a determinate example
//! `cons(l, cons(e_{l-1}, ... cons(e_0, nil)))` ↦ `e_l`, the predecessors
//! listed most recent first. Laws are terms over `v_p` (the place `l`)
//! and `v_1, v_2, ...` (the previous elements).

use crate::automata::{lift, WeightMap};
use crate::congruence::ClassGrammar;
use crate::enumerate::{Enumerator, Limits};
use crate::error::{Error, Result};
use crate::grammar::{Nt, TreeGrammar};
use crate::syntax::parse_term;
use crate::term::{lgg_syntactic, Substitution, Sym, Term};

#[derive(Clone, Debug)]
pub struct SeriesTask {
    pub series: Vec<Term>,
    pub k: usize,
}

impl SeriesTask {
    pub fn new(series: Vec<Term>, k: usize) -> Result<Self> {
        if k == 0 || k >= series.len() {
            return Err(Error::Invalid(format!(
                "k must be between 1 and {} for a series of {} elements",
                series.len().saturating_sub(1),
                series.len()
            )));
        }
        Ok(SeriesTask { series, k })
    }

    /// Reads `0;1,4,9`: elements before `;` are context, the `k` elements
    /// after it are explained. Without `;` the given `k` is used.
    pub fn parse(text: &str, k: Option<usize>) -> Result<Self> {
        let (head, tail) = match text.split_once(';') {
            Some((h, t)) => (h, Some(t)),
            None => (text, None),
        };
        let mut series = Vec::new();
        for part in head
            .split(',')
            .chain(tail.into_iter().flat_map(|t| t.split(',')))
        {
            let part = part.trim();
            if !part.is_empty() {
                series.push(parse_term(part)?);
            }
        }
        let implied = tail.map(|t| t.split(',').filter(|p| !p.trim().is_empty()).count());
        let k = match (k, implied) {
            (Some(k), Some(i)) if k != i => {
                return Err(Error::Invalid(format!(
                    "k = {k} but {i} elements follow `;`"
                )))
            }
            (Some(k), _) => k,
            (None, Some(i)) => i,
            (None, None) => {
                return Err(Error::Invalid(
                    "give k or mark the explained elements with `;`".into(),
                ))
            }
        };
        SeriesTask::new(series, k)
    }

    /// The window for place `l`: its input term and the element to produce.
    pub fn window(&self, place: usize) -> (Term, Term) {
        let mut list = Term::constant("nil");
        for e in &self.series[..place] {
            list = Term::app("cons", vec![e.clone(), list]);
        }
        (
            Term::app("cons", vec![Term::numeral(place), list]),
            self.series[place].clone(),
        )
    }

    pub fn windows(&self) -> Vec<(Term, Term)> {
        (self.series.len() - self.k..self.series.len())
            .map(|p| self.window(p))
            .collect()
    }
}

/// Laws for a series as a lazy intersection of lifted class grammars, one
/// per window, over the slot variables `v_p, v_1, v_2, ...`.
#[derive(Clone, Debug)]
pub struct SeriesLaws {
    /// Syntactic lgg of the window inputs.
    pub pattern: Term,
    /// Slot variables, the place first, then the previous elements.
    pub slots: Vec<Sym>,
    pub conjuncts: Vec<(TreeGrammar, Nt)>,
}

impl SeriesLaws {
    pub fn stream<'a>(&'a self, weights: &WeightMap, limits: Limits) -> Result<Enumerator<'a>> {
        let parts: Vec<(&TreeGrammar, Nt)> = self.conjuncts.iter().map(|(g, r)| (g, *r)).collect();
        Enumerator::new(&parts, weights, limits)
    }
}

/// Slot values of a window input: the place, then the previous elements,
/// at most `depth` of them.
fn slot_values(input: &Term, depth: usize) -> Vec<Term> {
    let mut out = Vec::with_capacity(depth + 1);
    let mut cur = input;
    while let Term::App(f, items) = cur {
        if f.as_str() != "cons" || items.len() != 2 || out.len() > depth {
            break;
        }
        out.push(items[0].clone());
        cur = &items[1];
    }
    out
}

fn list_depth(t: &Term) -> usize {
    match t {
        Term::App(f, items) if f.as_str() == "cons" && items.len() == 2 => {
            1 + list_depth(&items[1])
        }
        _ => 0,
    }
}

/// Learns the laws for `task` over the class grammar of the theory.
///
/// The slots present in every window are those of the syntactic lgg of
/// the inputs; each becomes a variable bound to the slot's value in each
/// window.
pub fn series_law(cg: &mut ClassGrammar, task: &SeriesTask) -> Result<SeriesLaws> {
    let windows = task.windows();
    let targets = windows
        .iter()
        .map(|(_, out)| cg.class_nt_of(out))
        .collect::<Result<Vec<_>>>()?;
    let inputs: Vec<Term> = windows.iter().map(|(i, _)| i.clone()).collect();
    let (pattern, _) = lgg_syntactic(&inputs);
    let depth = list_depth(&pattern) - 1;
    let slots: Vec<Sym> = std::iter::once(Sym::new("v_p"))
        .chain((1..=depth).map(|i| Sym::new(&format!("v_{i}"))))
        .collect();
    let mut conjuncts = Vec::with_capacity(windows.len());
    for ((input, _), target) in windows.iter().zip(targets) {
        let sigma = Substitution::from_pairs(slots.iter().copied().zip(slot_values(input, depth)));
        conjuncts.push((lift(&cg.grammar, &sigma), target));
    }
    Ok(SeriesLaws {
        pattern,
        slots,
        conjuncts,
    })
}

/// Whether `law` computes the element of every window, checked in the
/// class grammar.
pub fn replay(
    cg: &mut ClassGrammar,
    laws: &SeriesLaws,
    law: &Term,
    windows: &[(Term, Term)],
) -> Result<bool> {
    let depth = laws.slots.len() - 1;
    for (input, output) in windows {
        let values = slot_values(input, depth);
        if values.len() < laws.slots.len() {
            return Ok(false);
        }
        let sigma = Substitution::from_pairs(laws.slots.iter().copied().zip(values));
        if cg.class_nt_of(&sigma.apply(law))? != cg.class_nt_of(output)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::EquationalTheory;

    #[test]
    fn parsing_and_windows() {
        let task = SeriesTask::parse("0;1,4,9", None).unwrap();
        assert_eq!(task.k, 3);
        assert!(SeriesTask::parse("0;1,4,9", Some(2)).is_err());
        let (input, out) = task.window(1);
        assert_eq!(input.to_string(), "cons(s(0),cons(0,nil))");
        assert_eq!(out, Term::numeral(1));
    }

    #[test]
    fn fibonacci_like() {
        let th = EquationalTheory::builtin("peano", Some(8)).unwrap();
        let mut cg = th.compile().unwrap();
        let task = SeriesTask::parse("1,1;2,3,5", None).unwrap();
        let laws = series_law(&mut cg, &task).unwrap();
        let found: Vec<Term> = laws
            .stream(&WeightMap::size(), Limits::count(5))
            .unwrap()
            .map(|(_, t)| t)
            .collect();
        assert!(found.contains(&parse_term("v_1+v_2").unwrap()), "{found:?}");
        for t in &found {
            assert!(replay(&mut cg, &laws, t, &task.windows()).unwrap());
        }
    }

    fn first_laws(theory: &str, bound: u64, series: &str, count: usize) -> Vec<Term> {
        let th = EquationalTheory::builtin(theory, Some(bound)).unwrap();
        let mut cg = th.compile().unwrap();
        let task = SeriesTask::parse(series, None).unwrap();
        let laws = series_law(&mut cg, &task).unwrap();
        let found: Vec<Term> = laws
            .stream(&WeightMap::size(), Limits::count(count))
            .unwrap()
            .map(|(_, t)| t)
            .collect();
        found
    }

    #[test]
    fn squares() {
        let found = first_laws("peano", 12, "0;1,4,9", 5);
        assert!(found.contains(&parse_term("v_p*v_p").unwrap()));
    }

    #[test]
    fn alternating() {
        let found = first_laws("peano-if", 6, "0,1;2,1,4,1", 30);
        assert!(found.contains(&parse_term("if(ev(v_p),v_p,1)").unwrap()));
    }

    #[test]
    fn constant_tail_is_explained_by_the_previous_element() {
        let found = first_laws("peano", 6, "1,2,2,3,3,3,4;4,4,4", 5);
        assert_eq!(found.first(), Some(&parse_term("v_1").unwrap()));
    }
}
