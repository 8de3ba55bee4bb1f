//! E-generalization over class grammars.
//!
//! Constrained E-generalization lifts a class grammar by each target
//! substitution and intersects the lifted roots. The unconstrained variant
//! first computes the maximal nonterminal sets of the grammar and uses the
//! universal substitutions built from them.

use std::collections::BTreeSet;

use crate::automata::{intersect, lift, simplify, Recognizer, WeightMap};
use crate::congruence::ClassGrammar;
use crate::enumerate::{Enumerator, Limits};
use crate::error::{Error, Result};
use crate::grammar::{Nt, TreeGrammar};
use crate::term::{Substitution, Sym, Term};

/// More auxiliaries than this make the maximal-set search refuse.
const MAX_AUXILIARIES: usize = 16;

/// Maximal nonterminal sets of a class grammar with a representative per
/// set, in canonical order (by class, then by auxiliary subset).
#[derive(Clone, Debug)]
pub struct NormalFormMaps {
    grammar: TreeGrammar,
    pub sets: Vec<BTreeSet<Nt>>,
    pub representatives: Vec<Term>,
    relevant: BTreeSet<Nt>,
}

impl NormalFormMaps {
    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// The set used for terms that lie in no set of the grammar.
    pub fn default_set(&self) -> usize {
        0
    }

    /// Index of the first maximal set containing every nonterminal that
    /// accepts `t`.
    pub fn classify(&self, t: &Term) -> usize {
        self.classify_with(&Recognizer::new(&self.grammar), t)
    }

    fn classify_with(&self, rec: &Recognizer<'_>, t: &Term) -> usize {
        let states: BTreeSet<Nt> = rec
            .states(t)
            .intersection(&self.relevant)
            .copied()
            .collect();
        if states.is_empty() {
            return self.default_set();
        }
        self.sets
            .iter()
            .position(|set| states.is_subset(set))
            .unwrap_or(self.default_set())
    }

    pub fn class_of(&self, set: usize) -> &Term {
        &self.representatives[set]
    }

    /// Replaces every binding by the representative of its maximal set.
    pub fn normalize_subst(&self, sigma: &Substitution) -> Substitution {
        let rec = Recognizer::new(&self.grammar);
        Substitution::from_pairs(
            sigma
                .iter()
                .map(|(x, t)| (x, self.representatives[self.classify_with(&rec, t)].clone())),
        )
    }

    pub fn set_names(&self, set: usize) -> Vec<&str> {
        self.sets[set]
            .iter()
            .map(|n| self.grammar.name(*n))
            .collect()
    }
}

/// Witness of minimal size for the intersection of the given nonterminals.
fn intersection_witness(g: &TreeGrammar, nts: &BTreeSet<Nt>) -> Result<Option<Term>> {
    let conjuncts: Vec<(&TreeGrammar, Nt)> = nts.iter().map(|n| (g, *n)).collect();
    let mut it = Enumerator::new(&conjuncts, &WeightMap::size(), Limits::count(1))?;
    Ok(it.next().map(|(_, t)| t))
}

/// Computes the maximal nonterminal sets. Each set holds one class
/// nonterminal and every auxiliary compatible with it.
pub fn maximal_sets(cg: &ClassGrammar) -> Result<NormalFormMaps> {
    let g = &cg.grammar;
    let aux = cg.auxiliaries();
    if aux.len() > MAX_AUXILIARIES {
        return Err(Error::Budget(format!(
            "{} auxiliary nonterminals exceed the maximal-set search limit of {MAX_AUXILIARIES}",
            aux.len()
        )));
    }
    let mut sets = Vec::new();
    let mut representatives = Vec::new();
    for (ci, class) in cg.classes.iter().enumerate() {
        if aux.is_empty() {
            sets.push(BTreeSet::from([*class]));
            representatives.push(cg.representatives[ci].clone());
            continue;
        }
        // Depth-first include/exclude search; supersets of an empty
        // intersection are never explored.
        let mut found: Vec<(BTreeSet<Nt>, Term)> = Vec::new();
        let mut stack: Vec<(usize, BTreeSet<Nt>, Term)> =
            vec![(0, BTreeSet::from([*class]), cg.representatives[ci].clone())];
        while let Some((pos, current, witness)) = stack.pop() {
            if pos == aux.len() {
                found.push((current, witness));
                continue;
            }
            stack.push((pos + 1, current.clone(), witness.clone()));
            let mut extended = current;
            extended.insert(aux[pos]);
            let rec = Recognizer::new(g);
            if rec.states(&witness).contains(&aux[pos]) {
                stack.push((pos + 1, extended, witness));
            } else if let Some(w) = intersection_witness(g, &extended)? {
                stack.push((pos + 1, extended, w));
            }
        }
        let maximal: Vec<&(BTreeSet<Nt>, Term)> = found
            .iter()
            .filter(|(s, _)| {
                !found
                    .iter()
                    .any(|(o, _)| o.len() > s.len() && s.is_subset(o))
            })
            .collect();
        let mut keyed: Vec<(Vec<Nt>, BTreeSet<Nt>, Term)> = Vec::new();
        for (set, witness) in maximal {
            if keyed.iter().any(|(_, s, _)| s == set) {
                continue;
            }
            let rep = if set.len() == 1 {
                cg.representatives[ci].clone()
            } else {
                intersection_witness(g, set)?.unwrap_or_else(|| witness.clone())
            };
            keyed.push((set.iter().copied().collect(), set.clone(), rep));
        }
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        for (_, set, rep) in keyed {
            sets.push(set);
            representatives.push(rep);
        }
    }
    if sets.is_empty() {
        return Err(Error::Invalid("class grammar has no classes".into()));
    }
    let relevant = cg.classes.iter().chain(&aux).copied().collect();
    Ok(NormalFormMaps {
        grammar: g.clone(),
        sets,
        representatives,
        relevant,
    })
}

/// The n substitutions mapping `v_{NN1..NNn}` to the representative of the
/// i-th component, one variable per n-tuple of maximal sets.
#[derive(Clone, Debug)]
pub struct UniversalSubstitutions {
    pub arity: usize,
    pub vars: Vec<Sym>,
    pub tuples: Vec<Vec<usize>>,
    pub taus: Vec<Substitution>,
    set_count: usize,
}

/// Name of the variable for a tuple of maximal-set indices, `v01` style
/// when every index is a single digit.
pub fn tuple_var_name(tuple: &[usize], set_count: usize) -> Sym {
    if set_count <= 10 {
        let digits: String = tuple.iter().map(|i| i.to_string()).collect();
        Sym::new(&format!("v{digits}"))
    } else {
        let parts: Vec<String> = tuple.iter().map(|i| i.to_string()).collect();
        Sym::new(&format!("v_{{{}}}", parts.join(",")))
    }
}

impl UniversalSubstitutions {
    pub fn var_for(&self, tuple: &[usize]) -> Sym {
        tuple_var_name(tuple, self.set_count)
    }

    /// The tuple of set indices a variable stands for.
    pub fn tuple_of(&self, var: Sym) -> Option<&[usize]> {
        self.vars
            .iter()
            .position(|v| *v == var)
            .map(|i| self.tuples[i].as_slice())
    }
}

pub fn universal_substitutions(maps: &NormalFormMaps, n: usize) -> Result<UniversalSubstitutions> {
    if n == 0 {
        return Err(Error::Invalid(
            "universal substitutions need at least one term".into(),
        ));
    }
    let k = maps.len();
    let total = k
        .checked_pow(n as u32)
        .filter(|t| *t <= 1 << 20)
        .ok_or_else(|| Error::Budget(format!("{k}^{n} universal variables are too many")))?;
    let mut vars = Vec::with_capacity(total);
    let mut tuples = Vec::with_capacity(total);
    let mut taus = vec![Substitution::new(); n];
    for code in 0..total {
        let mut tuple = vec![0; n];
        let mut rest = code;
        for slot in tuple.iter_mut().rev() {
            *slot = rest % k;
            rest /= k;
        }
        let var = tuple_var_name(&tuple, k);
        for (tau, set) in taus.iter_mut().zip(&tuple) {
            tau.insert(var, maps.class_of(*set).clone());
        }
        vars.push(var);
        tuples.push(tuple);
    }
    Ok(UniversalSubstitutions {
        arity: n,
        vars,
        tuples,
        taus,
        set_count: k,
    })
}

/// The lifted grammars `G^σi` with their roots, ready for lazy intersection
/// by an [`Enumerator`].
pub fn lifted_conjuncts(
    g: &TreeGrammar,
    targets: &[(Nt, Substitution)],
) -> Result<Vec<(TreeGrammar, Nt)>> {
    check_common_domain(targets)?;
    Ok(targets
        .iter()
        .map(|(root, sigma)| (lift(g, sigma), *root))
        .collect())
}

fn check_common_domain(targets: &[(Nt, Substitution)]) -> Result<()> {
    let Some((_, first)) = targets.first() else {
        return Err(Error::Invalid(
            "E-generalization needs at least one target".into(),
        ));
    };
    let domain: BTreeSet<Sym> = first.domain().collect();
    for (_, sigma) in targets {
        if sigma.domain().collect::<BTreeSet<_>>() != domain {
            return Err(Error::Invalid(
                "target substitutions must share their domain".into(),
            ));
        }
        if !sigma.is_ground() {
            return Err(Error::Invalid(format!(
                "target substitution {sigma} is not ground"
            )));
        }
    }
    Ok(())
}

/// Grammar whose root generates every `t` with `tσi ∈ L(Ni)` for all
/// targets `(Ni, σi)`.
pub fn constrained_egen(
    g: &TreeGrammar,
    targets: &[(Nt, Substitution)],
) -> Result<(TreeGrammar, Nt)> {
    let lifted = lifted_conjuncts(g, targets)?;
    let mut iter = lifted.into_iter();
    let (first, root) = iter.next().expect("checked nonempty");
    let s = simplify(&first, &[root]);
    let mut acc_root = s.get(root).expect("root kept");
    let mut acc = s.grammar;
    for (next, r) in iter {
        let prod = intersect(&acc, &next, &[(acc_root, r)])?;
        acc_root = prod.get(acc_root, r).expect("root pair");
        acc = prod.grammar;
    }
    Ok((acc, acc_root))
}

/// Result of [`egen`].
#[derive(Clone, Debug)]
pub struct Generalization {
    pub grammar: TreeGrammar,
    pub root: Nt,
    pub maps: NormalFormMaps,
    pub universal: UniversalSubstitutions,
}

/// Complete set of E-generalizations of the classes at `roots`.
pub fn egen(cg: &ClassGrammar, roots: &[Nt]) -> Result<Generalization> {
    let maps = maximal_sets(cg)?;
    let universal = universal_substitutions(&maps, roots.len())?;
    let targets: Vec<(Nt, Substitution)> = roots
        .iter()
        .copied()
        .zip(universal.taus.iter().cloned())
        .collect();
    let (grammar, root) = constrained_egen(&cg.grammar, &targets)?;
    Ok(Generalization {
        grammar,
        root,
        maps,
        universal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::membership;
    use crate::carriers::peano;
    use crate::congruence::finite_quotient;
    use crate::enumerate::enumerate;
    use crate::syntax::parse_term;

    const TWO_CLASS: &str = "\
N0 ::= 0 | N0+N0 | N0*Nt | Nt*N0
N1 ::= s(N0) | N0+N1 | N1+N0 | N1*N1
Nt ::= 0 | s(Nt) | Nt+Nt | Nt*Nt
";

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn two_class() -> ClassGrammar {
        let g = TreeGrammar::parse(TWO_CLASS, None).unwrap();
        let classes = vec![g.nt("N0").unwrap(), g.nt("N1").unwrap()];
        ClassGrammar::new(g, classes).unwrap()
    }

    #[test]
    fn two_class_maximal_sets() {
        let cg = two_class();
        let maps = maximal_sets(&cg).unwrap();
        assert_eq!(maps.len(), 2);
        assert_eq!(maps.set_names(0), ["N0", "Nt"]);
        assert_eq!(maps.set_names(1), ["N1", "Nt"]);
        assert_eq!(maps.class_of(0), &t("0"));
        assert_eq!(maps.class_of(1), &t("s(0)"));
        assert_eq!(maps.classify(&t("s(0)*s(0)")), 1);
        assert_eq!(maps.classify(&t("s(s(0))")), 0);
    }

    #[test]
    fn two_class_universal_substitutions() {
        let maps = maximal_sets(&two_class()).unwrap();
        let u = universal_substitutions(&maps, 2).unwrap();
        assert_eq!(
            u.taus[0].to_string(),
            "{v00 ↦ 0, v01 ↦ 0, v10 ↦ s(0), v11 ↦ s(0)}"
        );
        assert_eq!(
            u.taus[1].to_string(),
            "{v00 ↦ 0, v01 ↦ s(0), v10 ↦ 0, v11 ↦ s(0)}"
        );
        assert_eq!(universal_substitutions(&maps, 3).unwrap().vars.len(), 8);
    }

    #[test]
    fn two_class_egen() {
        let cg = two_class();
        let roots = [cg.classes[0], cg.classes[1]];
        let r = egen(&cg, &roots).unwrap();
        for member in ["v01*v01", "v01*s(v10+v10)", "v01", "s(0)*v01"] {
            assert!(
                membership(&r.grammar, r.root, &t(member)).unwrap(),
                "{member}"
            );
        }
        for non in ["0", "v00", "v10"] {
            assert!(!membership(&r.grammar, r.root, &t(non)).unwrap(), "{non}");
        }
    }

    #[test]
    fn constrained_by_given_substitutions() {
        let cg = two_class();
        let s1 = Substitution::from_pairs([(Sym::new("vx"), t("0+0")), (Sym::new("vy"), t("0"))]);
        let s2 = Substitution::from_pairs([
            (Sym::new("vx"), t("s(0)")),
            (Sym::new("vy"), t("s(0)*s(0)")),
        ]);
        let (g, root) =
            constrained_egen(&cg.grammar, &[(cg.classes[0], s1), (cg.classes[1], s2)]).unwrap();
        assert!(membership(&g, root, &t("vx*vy")).unwrap());
    }

    #[test]
    fn deterministic_grammar_needs_no_intersections() {
        let cg = finite_quotient(&peano(2, true, &["+"]).unwrap()).unwrap();
        let maps = maximal_sets(&cg).unwrap();
        assert_eq!(maps.len(), cg.classes.len());
    }

    #[test]
    fn zero_and_four_give_a_square() {
        let cg = finite_quotient(&peano(4, true, &["+", "*"]).unwrap()).unwrap();
        let four = cg.find_class(&Term::numeral(4)).unwrap();
        let r = egen(&cg, &[cg.classes[0], four]).unwrap();
        let found = enumerate(&r.grammar, r.root, &WeightMap::size(), Limits::count(50)).unwrap();
        assert!(found.iter().any(|(_, m)| {
            matches!(m, Term::App(f, a) if f.as_str() == "*" && a[0] == a[1] && a[0].is_var())
        }));
    }

    #[test]
    fn same_class_twice_gives_the_diagonal_variable() {
        let cg = finite_quotient(&peano(2, false, &["+"]).unwrap()).unwrap();
        let r = egen(&cg, &[cg.classes[1], cg.classes[1]]).unwrap();
        assert!(membership(&r.grammar, r.root, &t("v11")).unwrap());
        assert!(membership(&r.grammar, r.root, &t("s(0)")).unwrap());
    }
}
