//! Lemma candidates for an equational proof: given a term `t1` and a few
//! ground samples of its variables, every `t2` that agrees with `t1` on all
//! samples modulo the theory.

use std::collections::{BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::automata::{rename_leaves, WeightMap};
use crate::congruence::{
    normal_form_grammar, partial_normal_form_grammar, var_set_grammar, ClassGrammar,
};
use crate::enumerate::{Enumerator, Limits};
use crate::error::{Error, Result};
use crate::grammar::{Nt, TreeGrammar};
use crate::learn::hyp_determinate;
use crate::rewrite::RewriteSystem;
use crate::term::{lgg_syntactic, Signature, Substitution, Sym, Term};

#[derive(Clone, Debug)]
pub struct LemmaTask {
    pub rhs: Term,
    pub samples: Vec<Substitution>,
    /// Keep only candidates in normal form with respect to the theory's
    /// rewrite rules.
    pub require_normal_form: bool,
    /// Variables every candidate must contain.
    pub var_lower: Vec<Sym>,
    /// Variables a candidate may contain; defaults to those of `rhs`.
    pub var_upper: Option<Vec<Sym>>,
}

impl LemmaTask {
    pub fn new(rhs: Term, samples: Vec<Substitution>) -> Self {
        LemmaTask {
            rhs,
            samples,
            require_normal_form: true,
            var_lower: Vec::new(),
            var_upper: None,
        }
    }

    pub fn vars(&self) -> Vec<Sym> {
        self.rhs.vars_in_order()
    }

    fn input(&self, sigma: &Substitution) -> Term {
        let vals: Vec<Term> = self
            .vars()
            .iter()
            .map(|x| sigma.apply(&Term::Var(*x)))
            .collect();
        pack(vals)
    }
}

fn pack(mut items: Vec<Term>) -> Term {
    if items.len() == 1 {
        items.pop().unwrap()
    } else {
        Term::tuple(items)
    }
}

/// Whether the syntactic lgg of the sample tuples is a tuple of distinct
/// variables, so that it can be renamed back to the variables of `rhs`.
pub fn samples_invertible(vars: &[Sym], samples: &[Substitution]) -> bool {
    let inputs: Vec<Term> = samples
        .iter()
        .map(|s| pack(vars.iter().map(|x| s.apply(&Term::Var(*x))).collect()))
        .collect();
    let (pattern, _) = lgg_syntactic(&inputs);
    pattern_renaming(&pattern, vars).is_some()
}

fn pattern_renaming(pattern: &Term, vars: &[Sym]) -> Option<HashMap<Sym, Sym>> {
    let parts: Vec<&Term> = if vars.len() == 1 {
        vec![pattern]
    } else {
        match pattern {
            Term::App(_, items) if items.len() == vars.len() => items.iter().collect(),
            _ => return None,
        }
    };
    let mut map = HashMap::new();
    for (p, x) in parts.iter().zip(vars) {
        match p {
            Term::Var(v) if !map.contains_key(v) => {
                map.insert(*v, *x);
            }
            _ => return None,
        }
    }
    Some(map)
}

/// Draws `count` substitutions from `values`, each variable taking
/// pairwise distinct values across the samples, retrying until the samples
/// are invertible. Deterministic for a given seed.
pub fn sample_substitutions(
    vars: &[Sym],
    values: &[Term],
    count: usize,
    seed: u64,
) -> Result<Vec<Substitution>> {
    if count < 2 || values.len() < count {
        return Err(Error::Invalid(format!(
            "need at least two samples and as many distinct values as samples ({count} samples, {} values)",
            values.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..1000 {
        let columns: Vec<Vec<&Term>> = vars
            .iter()
            .map(|_| values.choose_multiple(&mut rng, count).collect())
            .collect();
        let samples: Vec<Substitution> = (0..count)
            .map(|i| {
                Substitution::from_pairs(
                    vars.iter()
                        .zip(&columns)
                        .map(|(x, col)| (*x, col[i].clone())),
                )
            })
            .collect();
        if samples_invertible(vars, &samples) {
            return Ok(samples);
        }
    }
    Err(Error::Invalid(
        "could not draw sufficiently different samples; supply them explicitly".into(),
    ))
}

/// The candidate language as a lazy intersection.
#[derive(Clone, Debug)]
pub struct LemmaCandidates {
    pub conjuncts: Vec<(TreeGrammar, Nt)>,
}

impl LemmaCandidates {
    pub fn stream<'a>(&'a self, weights: &WeightMap, limits: Limits) -> Result<Enumerator<'a>> {
        let parts: Vec<(&TreeGrammar, Nt)> = self.conjuncts.iter().map(|(g, r)| (g, *r)).collect();
        Enumerator::new(&parts, weights, limits)
    }
}

/// Builds the candidate set for `task`. `signature` and `rules` describe
/// the theory for the normal-form and variable filters.
pub fn suggest_lemmas(
    cg: &mut ClassGrammar,
    signature: &Signature,
    rules: &RewriteSystem,
    task: &LemmaTask,
) -> Result<LemmaCandidates> {
    let vars = task.vars();
    if vars.is_empty() {
        return Err(Error::Invalid("the term has no variables".into()));
    }
    if task.samples.is_empty() {
        return Err(Error::Invalid(
            "at least one sample substitution is required".into(),
        ));
    }
    for s in &task.samples {
        if let Some(x) = vars
            .iter()
            .find(|x| s.get(**x).is_none_or(|t| !t.is_ground()))
        {
            return Err(Error::Invalid(format!(
                "sample `{s}` does not bind `{x}` to a ground term"
            )));
        }
    }
    let pairs: Vec<(Term, Term)> = task
        .samples
        .iter()
        .map(|s| (task.input(s), s.apply(&task.rhs)))
        .collect();
    let set = hyp_determinate(cg, &pairs, &[])?;
    let entry = set
        .entries
        .into_iter()
        .next()
        .expect("one index set without negatives");
    let renaming = pattern_renaming(&entry.pattern, &vars).ok_or_else(|| {
        Error::Invalid(
            "samples are not sufficiently different; resample with distinct values per variable"
                .into(),
        )
    })?;
    let mut conjuncts: Vec<(TreeGrammar, Nt)> = entry
        .positives
        .iter()
        .map(|(g, r)| (rename_leaves(g, &renaming), *r))
        .collect();
    if task.require_normal_form && !rules.is_empty() {
        let (g, r) = if rules.is_left_linear() {
            normal_form_grammar(signature, rules, &vars)?
        } else {
            partial_normal_form_grammar(signature, rules, &vars)
        };
        conjuncts.push((g, r));
    }
    let upper = task.var_upper.clone().unwrap_or_else(|| vars.clone());
    let allowed: BTreeSet<Sym> = upper.iter().copied().collect();
    if !task.var_lower.is_empty() || allowed != vars.iter().copied().collect() {
        conjuncts.push(var_set_grammar(signature, &task.var_lower, &upper)?);
    }
    Ok(LemmaCandidates { conjuncts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;
    use crate::theory::EquationalTheory;

    fn subst(pairs: &[(&str, usize)]) -> Substitution {
        Substitution::from_pairs(pairs.iter().map(|(x, n)| (Sym::new(x), Term::numeral(*n))))
    }

    #[test]
    fn single_variable_starts_with_itself() {
        let th = EquationalTheory::builtin("peano", Some(6)).unwrap();
        let mut cg = th.compile().unwrap();
        let task = LemmaTask::new(
            parse_term("vx").unwrap(),
            vec![subst(&[("vx", 0)]), subst(&[("vx", 3)])],
        );
        let c =
            suggest_lemmas(&mut cg, &th.signature, &th.rewrite_system().unwrap(), &task).unwrap();
        let first = c
            .stream(&WeightMap::size(), Limits::count(1))
            .unwrap()
            .next()
            .unwrap();
        assert_eq!(first.1, parse_term("vx").unwrap());
    }

    #[test]
    fn identical_samples_are_rejected() {
        let th = EquationalTheory::builtin("peano", Some(6)).unwrap();
        let mut cg = th.compile().unwrap();
        let rhs = parse_term("vx+vy").unwrap();
        let same = subst(&[("vx", 1), ("vy", 1)]);
        let task = LemmaTask::new(rhs, vec![same.clone(), same]);
        let err = suggest_lemmas(&mut cg, &th.signature, &th.rewrite_system().unwrap(), &task)
            .unwrap_err();
        assert!(err.to_string().contains("sufficiently different"));
    }

    #[test]
    fn drawn_samples_are_invertible_and_reproducible() {
        let vars = [Sym::new("vx"), Sym::new("vy")];
        let values: Vec<Term> = (0..4).map(Term::numeral).collect();
        let a = sample_substitutions(&vars, &values, 3, 7).unwrap();
        let b = sample_substitutions(&vars, &values, 3, 7).unwrap();
        assert_eq!(a, b);
        assert!(samples_invertible(&vars, &a));
    }

    #[test]
    fn distributivity_candidate() {
        let th = EquationalTheory::builtin("peano", Some(10)).unwrap();
        let mut cg = th.compile().unwrap();
        let samples = vec![
            subst(&[("vx", 0), ("vy", 3), ("vz", 2)]),
            subst(&[("vx", 2), ("vy", 1), ("vz", 0)]),
            subst(&[("vx", 1), ("vy", 0), ("vz", 1)]),
        ];
        let mut task = LemmaTask::new(parse_term("vx*(vy*vz)+vx*vy").unwrap(), samples);
        task.var_lower = task.vars();
        let c =
            suggest_lemmas(&mut cg, &th.signature, &th.rewrite_system().unwrap(), &task).unwrap();
        let found: Vec<Term> = c
            .stream(&WeightMap::size(), Limits::count(20))
            .unwrap()
            .map(|(_, t)| t)
            .collect();
        assert!(found.contains(&parse_term("vx*(vy*vz+vy)").unwrap()));
    }

    #[test]
    fn reverse_of_append() {
        let th = EquationalTheory::builtin("lists", Some(3)).unwrap();
        let mut cg = th.compile().unwrap();
        let list = |s: &str| parse_term(s).unwrap();
        let pair = |x: &str, y: &str| {
            Substitution::from_pairs([(Sym::new("vx"), list(x)), (Sym::new("vy"), list(y))])
        };
        let samples = vec![
            pair("nil", "cons(b,nil)"),
            pair("cons(a,nil)", "nil"),
            pair("cons(b,cons(a,nil))", "cons(a,nil)"),
        ];
        let task = LemmaTask::new(list("ap(rv(vx),rv(vy))"), samples);
        let c =
            suggest_lemmas(&mut cg, &th.signature, &th.rewrite_system().unwrap(), &task).unwrap();
        let found: Vec<Term> = c
            .stream(&WeightMap::size(), Limits::count(50))
            .unwrap()
            .map(|(_, t)| t)
            .collect();
        assert!(found.contains(&list("rv(ap(vy,vx))")));
    }
}
