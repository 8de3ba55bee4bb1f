//! Grammars whose nonterminals generate congruence classes.
//!
//! Three constructions are offered: congruence closure of finitely many
//! ground equations, evaluation tables over a finite carrier, and normal
//! forms of a convergent rewrite system. The module also builds the filter
//! grammars used by the applications (normal forms, variable sets) and the
//! cut-off approximation.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::automata::{complement, full_language, min_weight, Recognizer, WeightMap};
use crate::carriers::CarrierSpec;
use crate::error::{Error, Result};
use crate::grammar::{Alt, Letter, Nt, TreeGrammar};
use crate::rewrite::RewriteSystem;
use crate::term::{tuple_arity, Signature, Sym, Term};

/// A grammar together with the nonterminals that stand for congruence
/// classes and one representative ground term per class.
///
/// Other nonterminals are auxiliaries (as in a grammar for "any term").
/// Tuple nonterminals are added on demand so that tupled arguments of
/// n-ary predicates get a class of their own.
#[derive(Clone, Debug)]
pub struct ClassGrammar {
    pub grammar: TreeGrammar,
    pub classes: Vec<Nt>,
    pub representatives: Vec<Term>,
    tuples: HashMap<Vec<Nt>, Nt>,
}

impl ClassGrammar {
    /// Wraps a grammar, computing the lightest member of each class as its
    /// representative. Every class must be nonempty.
    pub fn new(grammar: TreeGrammar, classes: Vec<Nt>) -> Result<Self> {
        let best = min_weight(&grammar, &WeightMap::size());
        let mut representatives = Vec::with_capacity(classes.len());
        for nt in &classes {
            match &best[nt.index()] {
                Some((_, t)) if t.is_ground() => representatives.push(t.clone()),
                _ => {
                    return Err(Error::Theory(format!(
                        "class `{}` has no ground member",
                        grammar.name(*nt)
                    )))
                }
            }
        }
        Ok(ClassGrammar {
            grammar,
            classes,
            representatives,
            tuples: HashMap::new(),
        })
    }

    /// Like [`ClassGrammar::new`] with the representatives supplied by the
    /// caller; each one must belong to its class.
    pub fn with_representatives(
        grammar: TreeGrammar,
        classes: Vec<Nt>,
        reps: Vec<Term>,
    ) -> Result<Self> {
        if reps.len() != classes.len() {
            return Err(Error::Invalid(
                "one representative per class is required".into(),
            ));
        }
        let rec = Recognizer::new(&grammar);
        for (nt, t) in classes.iter().zip(&reps) {
            if !rec.accepts(*nt, t) {
                return Err(Error::Theory(format!(
                    "representative `{t}` is not in class `{}`",
                    grammar.name(*nt)
                )));
            }
        }
        Ok(ClassGrammar {
            grammar,
            classes,
            representatives: reps,
            tuples: HashMap::new(),
        })
    }

    /// Class nonterminal accepting `t`, if any.
    pub fn find_class(&self, t: &Term) -> Option<Nt> {
        let states = Recognizer::new(&self.grammar).states(t);
        self.classes.iter().copied().find(|c| states.contains(c))
    }

    /// Nonterminal generating the class of `t`. A tuple whose components
    /// have classes gets a tuple nonterminal built from them.
    pub fn class_nt_of(&mut self, t: &Term) -> Result<Nt> {
        if let Some(nt) = self.find_class(t) {
            return Ok(nt);
        }
        if let Term::App(f, args) = t {
            if tuple_arity(*f) == Some(args.len()) && !args.is_empty() {
                let parts = args
                    .iter()
                    .map(|a| self.class_nt_of(a))
                    .collect::<Result<Vec<_>>>()?;
                return Ok(self.tuple_nt(&parts));
            }
        }
        Err(Error::Invalid(format!(
            "term `{t}` lies outside every class of the grammar"
        )))
    }

    /// Nonterminal producing exactly the tuples of the given components.
    pub fn tuple_nt(&mut self, parts: &[Nt]) -> Nt {
        if let Some(nt) = self.tuples.get(parts) {
            return *nt;
        }
        let sym = self.grammar.signature_mut().ensure_tuple(parts.len());
        let names: Vec<&str> = parts.iter().map(|p| self.grammar.name(*p)).collect();
        let name = format!("T_{}", names.join("_"));
        let nt = self.grammar.add_nonterminal(&name);
        self.grammar.push_alt(nt, Alt::App(sym, parts.to_vec()));
        self.tuples.insert(parts.to_vec(), nt);
        nt
    }

    /// Whether `nt` was created by [`ClassGrammar::tuple_nt`].
    pub fn is_tuple_nt(&self, nt: Nt) -> bool {
        self.tuples.values().any(|t| *t == nt)
    }

    /// Nonterminals that are neither classes nor tuple nonterminals.
    pub fn auxiliaries(&self) -> Vec<Nt> {
        self.grammar
            .nonterminals()
            .filter(|n| !self.classes.contains(n) && !self.is_tuple_nt(*n))
            .collect()
    }

    pub fn representative(&self, class: Nt) -> Option<&Term> {
        self.classes
            .iter()
            .position(|c| *c == class)
            .map(|i| &self.representatives[i])
    }
}

/// Makes a nonterminal name out of arbitrary text, keeping characters the
/// grammar text format accepts in identifiers.
pub fn ident_safe(text: &str) -> String {
    text.chars()
        .map(|c| {
            if c.is_alphanumeric() || c == '_' || c == '\'' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn class_name_for(t: &Term) -> String {
    match t.as_numeral() {
        Some(n) => format!("N{n}"),
        None => format!("N_{}", ident_safe(&t.to_string())),
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Deterministic grammar for the congruence generated by ground equations,
/// with one nonterminal per class of the subterm closure. Also returns the
/// nonterminal of every subterm occurring in the equations.
///
/// Terms built from the signature but outside the subterm closure belong
/// to no class; the caller adds the missing symbols only if it wants them.
pub fn from_ground_equations(
    sig: &Signature,
    equations: &[(Term, Term)],
) -> Result<(ClassGrammar, BTreeMap<Term, Nt>)> {
    let mut universe: BTreeSet<Term> = BTreeSet::new();
    for (l, r) in equations {
        for side in [l, r] {
            if !side.is_ground() {
                return Err(Error::Invalid(format!(
                    "equation side `{side}` is not ground"
                )));
            }
            sig.check_term(side)?;
            universe.extend(side.subterms().into_iter().cloned());
        }
    }
    let terms: Vec<Term> = universe.into_iter().collect();
    let index: HashMap<&Term, usize> = terms.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let mut uf = UnionFind::new(terms.len());
    for (l, r) in equations {
        uf.union(index[l], index[r]);
    }
    // Congruence propagation: merge applications with equal heads and
    // pairwise merged arguments until nothing changes.
    loop {
        let mut signatures: HashMap<(Sym, Vec<usize>), usize> = HashMap::new();
        let mut changed = false;
        for (i, t) in terms.iter().enumerate() {
            let Term::App(f, args) = t else { continue };
            let key = (
                *f,
                args.iter().map(|a| uf.find(index[a])).collect::<Vec<_>>(),
            );
            match signatures.get(&key) {
                Some(&j) => changed |= uf.union(i, j),
                None => {
                    signatures.insert(key, i);
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..terms.len() {
        members.entry(uf.find(i)).or_default().push(i);
    }
    let smallest = |ids: &[usize]| -> Term {
        ids.iter()
            .map(|i| &terms[*i])
            .min_by(|a, b| a.size().cmp(&b.size()).then_with(|| a.cmp(b)))
            .expect("nonempty class")
            .clone()
    };
    let mut classes: Vec<(Term, usize)> = members
        .iter()
        .map(|(root, ids)| (smallest(ids), *root))
        .collect();
    classes.sort();
    let mut g = TreeGrammar::new(sig.clone());
    let mut nt_of_root: HashMap<usize, Nt> = HashMap::new();
    let mut class_nts = Vec::new();
    let mut reps = Vec::new();
    for (rep, root) in &classes {
        let nt = g.add_nonterminal(&class_name_for(rep));
        nt_of_root.insert(*root, nt);
        class_nts.push(nt);
        reps.push(rep.clone());
    }
    let mut map = BTreeMap::new();
    for (i, t) in terms.iter().enumerate() {
        let target = nt_of_root[&uf.find(i)];
        map.insert(t.clone(), target);
        let Term::App(f, args) = t else { continue };
        let arg_nts = args
            .iter()
            .map(|a| nt_of_root[&uf.find(index[a])])
            .collect();
        g.add_alt(target, Alt::App(*f, arg_nts));
    }
    for nt in &class_nts {
        let mut rule = g.rule(*nt).to_vec();
        rule.sort_by_key(|a| (a.args().len(), a.letter()));
        g.set_rule(*nt, rule);
    }
    let cg = ClassGrammar::with_representatives(g, class_nts, reps)?;
    Ok((cg, map))
}

/// Class grammar of a finite carrier: for every symbol and every tuple of
/// argument classes whose value is defined, an alternative is added to the
/// rule of the result class.
pub fn finite_quotient(spec: &CarrierSpec) -> Result<ClassGrammar> {
    let n = spec.len();
    let mut g = TreeGrammar::new(spec.signature.clone());
    let classes: Vec<Nt> = spec
        .class_names
        .iter()
        .map(|c| g.add_nonterminal(c))
        .collect();
    let symbols: Vec<(Sym, usize)> = spec
        .signature
        .symbols()
        .map(|(s, i)| (s, i.arity))
        .collect();
    for (sym, arity) in symbols {
        let mut tuple = vec![0usize; arity];
        'tuples: loop {
            if let Some(target) = spec.eval(sym, &tuple) {
                if target >= n {
                    return Err(Error::Theory(format!(
                        "evaluator of `{sym}` returned an unknown class"
                    )));
                }
                g.push_alt(
                    classes[target],
                    Alt::App(sym, tuple.iter().map(|c| classes[*c]).collect()),
                );
            }
            for pos in (0..arity).rev() {
                tuple[pos] += 1;
                if tuple[pos] < n {
                    continue 'tuples;
                }
                tuple[pos] = 0;
            }
            break;
        }
    }
    let best = min_weight(&g, &WeightMap::size());
    let mut reps = Vec::with_capacity(n);
    for (i, given) in spec.representatives.iter().enumerate() {
        let rep = match given {
            Some(t) => {
                if spec.eval_term(t) != Some(i) {
                    return Err(Error::Theory(format!(
                        "representative `{t}` does not evaluate to class `{}`",
                        spec.class_names[i]
                    )));
                }
                t.clone()
            }
            None => match &best[classes[i].index()] {
                Some((_, t)) => t.clone(),
                None => {
                    return Err(Error::Theory(format!(
                        "carrier class `{}` has no term",
                        spec.class_names[i]
                    )))
                }
            },
        };
        reps.push(rep);
    }
    Ok(ClassGrammar {
        grammar: g,
        classes,
        representatives: reps,
        tuples: HashMap::new(),
    })
}

/// All ground terms over `sig` with at most `max_size` symbols, by size.
fn ground_terms_upto(sig: &Signature, max_size: usize) -> Vec<Vec<Term>> {
    let symbols: Vec<(Sym, usize)> = sig.symbols().map(|(s, i)| (s, i.arity)).collect();
    let mut by_size: Vec<Vec<Term>> = vec![Vec::new(); max_size + 1];
    for size in 1..=max_size {
        let mut level = Vec::new();
        for &(f, arity) in &symbols {
            if arity == 0 {
                if size == 1 {
                    level.push(Term::App(f, Vec::new()));
                }
                continue;
            }
            // Distribute size - 1 among the arguments.
            let mut stack: Vec<(Vec<Term>, usize)> = vec![(Vec::new(), size - 1)];
            while let Some((prefix, rest)) = stack.pop() {
                let remaining_args = arity - prefix.len();
                if remaining_args == 0 {
                    if rest == 0 {
                        level.push(Term::App(f, prefix));
                    }
                    continue;
                }
                for s in 1..=rest.saturating_sub(remaining_args - 1) {
                    for t in &by_size[s] {
                        let mut next = prefix.clone();
                        next.push(t.clone());
                        stack.push((next, rest - s));
                    }
                }
            }
        }
        level.sort();
        by_size[size] = level;
    }
    by_size
}

/// Class grammar from a convergent rewrite system: one nonterminal per
/// normal form of size at most `max_size`, and `f(N_t1..N_tn)` in the rule
/// of `N_nf(f(t1..tn))` whenever that normal form is within the bound.
pub fn from_convergent_rs(
    sig: &Signature,
    rules: &RewriteSystem,
    max_size: usize,
    step_limit: usize,
) -> Result<ClassGrammar> {
    let normal_forms: Vec<Term> = ground_terms_upto(sig, max_size)
        .into_iter()
        .flatten()
        .filter(|t| !rules.has_redex(t))
        .collect();
    let index: HashMap<&Term, usize> = normal_forms
        .iter()
        .enumerate()
        .map(|(i, t)| (t, i))
        .collect();
    let mut g = TreeGrammar::new(sig.clone());
    let classes: Vec<Nt> = normal_forms
        .iter()
        .map(|t| g.add_nonterminal(&class_name_for(t)))
        .collect();
    let symbols: Vec<(Sym, usize)> = sig.symbols().map(|(s, i)| (s, i.arity)).collect();
    let count = normal_forms.len();
    for (f, arity) in symbols {
        let mut tuple = vec![0usize; arity];
        'tuples: loop {
            let args: Vec<Term> = tuple.iter().map(|i| normal_forms[*i].clone()).collect();
            let nf = rules.normalize(&Term::App(f, args), step_limit)?;
            if let Some(&target) = index.get(&nf) {
                g.push_alt(
                    classes[target],
                    Alt::App(f, tuple.iter().map(|i| classes[*i]).collect()),
                );
            }
            for pos in (0..arity).rev() {
                tuple[pos] += 1;
                if tuple[pos] < count {
                    continue 'tuples;
                }
                tuple[pos] = 0;
            }
            break;
        }
    }
    Ok(ClassGrammar {
        grammar: g,
        classes,
        representatives: normal_forms,
        tuples: HashMap::new(),
    })
}

/// Keeps at most `max_alternatives` alternatives per rule, preferring
/// constants and leaves, then constructor applications. The languages
/// shrink, so results computed from the truncated grammar stay sound.
pub fn truncate(g: &TreeGrammar, max_alternatives: usize) -> Result<TreeGrammar> {
    if max_alternatives == 0 {
        return Err(Error::Invalid(
            "at least one alternative per rule must survive".into(),
        ));
    }
    let sig = g.signature();
    let priority = |alt: &Alt| match alt {
        Alt::Leaf(_) => 0,
        Alt::App(_, args) if args.is_empty() => 0,
        Alt::App(f, _) if sig.is_constructor(*f) => 1,
        Alt::App(..) => 2,
    };
    let mut out = g.clone();
    for nt in g.nonterminals() {
        let mut rule: Vec<Alt> = g.rule(nt).to_vec();
        if rule.len() <= max_alternatives {
            continue;
        }
        rule.sort_by_key(|a| priority(a));
        rule.truncate(max_alternatives);
        out.set_rule(nt, rule);
    }
    Ok(out)
}

/// Grammar of the terms over `sig` and `leaves` without any redex of
/// `rules`. Requires left-linear rules.
pub fn normal_form_grammar(
    sig: &Signature,
    rules: &RewriteSystem,
    leaves: &[Sym],
) -> Result<(TreeGrammar, Nt)> {
    if let Some(bad) = rules.rules.iter().find(|r| !r.is_left_linear()) {
        return Err(Error::Theory(format!(
            "rule `{} -> {}` is not left-linear; use the partial normal-form filter instead",
            bad.lhs, bad.rhs
        )));
    }
    Ok(redex_free_grammar(sig, rules, leaves))
}

/// Variant of [`normal_form_grammar`] that ignores non-left-linear rules.
/// Its language is a superset of the normal forms; callers check redexes
/// of the skipped rules themselves.
pub fn partial_normal_form_grammar(
    sig: &Signature,
    rules: &RewriteSystem,
    leaves: &[Sym],
) -> (TreeGrammar, Nt) {
    let linear = RewriteSystem::new(
        rules
            .rules
            .iter()
            .filter(|r| r.is_left_linear())
            .cloned()
            .collect(),
    );
    redex_free_grammar(sig, &linear, leaves)
}

fn redex_free_grammar(sig: &Signature, rules: &RewriteSystem, leaves: &[Sym]) -> (TreeGrammar, Nt) {
    let (mut g, any) = full_language(sig, leaves);
    let red = g.add_nonterminal("Red");

    fn pattern(g: &mut TreeGrammar, any: Nt, t: &Term, counter: &mut usize) -> Nt {
        match t {
            Term::Var(_) => any,
            Term::App(f, args) => {
                let nts = args.iter().map(|a| pattern(g, any, a, counter)).collect();
                *counter += 1;
                let nt = g.add_nonterminal(&format!("P{counter}"));
                g.push_alt(nt, Alt::App(*f, nts));
                nt
            }
        }
    }

    let mut counter = 0;
    for rule in &rules.rules {
        if let Term::App(f, args) = &rule.lhs {
            let nts = args
                .iter()
                .map(|a| pattern(&mut g, any, a, &mut counter))
                .collect();
            g.add_alt(red, Alt::App(*f, nts));
        }
    }
    for (f, info) in sig.symbols() {
        for pos in 0..info.arity {
            let mut args = vec![any; info.arity];
            args[pos] = red;
            g.push_alt(red, Alt::App(f, args));
        }
    }
    let mut alphabet: BTreeSet<Letter> = sig
        .symbols()
        .map(|(f, i)| Letter::Sym(f, i.arity))
        .collect();
    alphabet.extend(leaves.iter().map(|x| Letter::Leaf(*x)));
    complement(&g, red, &alphabet)
}

/// Grammar of the terms over `sig` whose variables (drawn from `upper`)
/// include all of `lower`.
pub fn var_set_grammar(sig: &Signature, lower: &[Sym], upper: &[Sym]) -> Result<(TreeGrammar, Nt)> {
    if let Some(x) = lower.iter().find(|x| !upper.contains(x)) {
        return Err(Error::Invalid(format!(
            "variable `{x}` is required but not allowed"
        )));
    }
    let k = upper.len();
    if k > 12 {
        return Err(Error::Budget(format!(
            "{k} variables exceed the variable-set grammar limit of 12"
        )));
    }
    let subsets = 1usize << k;
    let mut g = TreeGrammar::new(sig.clone());
    let nts: Vec<Nt> = (0..subsets)
        .map(|mask| {
            let names: Vec<&str> = (0..k)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| upper[i].as_str())
                .collect();
            g.add_nonterminal(&format!("S_{}", ident_safe(&names.join("_"))))
        })
        .collect();
    for (i, x) in upper.iter().enumerate() {
        g.push_alt(nts[1 << i], Alt::Leaf(*x));
    }
    let symbols: Vec<(Sym, usize)> = sig.symbols().map(|(s, i)| (s, i.arity)).collect();
    for (f, arity) in symbols {
        let mut tuple = vec![0usize; arity];
        'tuples: loop {
            let mask = tuple.iter().fold(0, |m, s| m | s);
            g.push_alt(
                nts[mask],
                Alt::App(f, tuple.iter().map(|s| nts[*s]).collect()),
            );
            for pos in (0..arity).rev() {
                tuple[pos] += 1;
                if tuple[pos] < subsets {
                    continue 'tuples;
                }
                tuple[pos] = 0;
            }
            break;
        }
    }
    let required = lower
        .iter()
        .map(|x| 1usize << upper.iter().position(|u| u == x).expect("checked above"))
        .fold(0, |m, b| m | b);
    let root = g.add_nonterminal("Vars");
    for (mask, nt) in nts.iter().enumerate().take(subsets) {
        if mask & required == required {
            let alts = g.rule(*nt).to_vec();
            for alt in alts {
                g.push_alt(root, alt);
            }
        }
    }
    Ok((g, root))
}
