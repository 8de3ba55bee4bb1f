//! Learning predicate definitions from examples modulo a theory.
//!
//! * [`hyp_set`] / [`learn_atom`]: regular sets of atom hypotheses from
//!   positive and negative examples, via universal substitutions.
//! * [`hyp_determinate`] / [`learn_atom_determinate`]: determinate
//!   hypotheses `p(s, t)` where `s` is the syntactic lgg of the inputs.
//! * [`lgg_e`] and [`lgg_ce`]: clausal generalization.
//! * [`e_subsumes`] and [`remove_det_literals`].

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::automata::{
    difference, instance_in_class, is_empty, lift, try_difference, union, Recognizer, WeightMap,
};
use crate::congruence::ClassGrammar;
use crate::egen::{
    constrained_egen, maximal_sets, universal_substitutions, UniversalSubstitutions,
};
use crate::enumerate::{Enumerator, Limits};
use crate::error::{Error, Result};
use crate::grammar::{Nt, TreeGrammar};
use crate::syntax::{parse_term_list, parse_term_with, ParseOptions};
use crate::term::{generalizes, lgg_syntactic, tuple_arity, Signature, Substitution, Sym, Term};

/// Default cap on the number of substitutions tried against negatives.
pub const DEFAULT_SUBSTITUTION_BUDGET: usize = 4096;

/// Most negative examples [`hyp_determinate`] accepts; candidate index
/// sets are all subsets of the negatives.
const MAX_DETERMINATE_NEGATIVES: usize = 16;

/// `p(t)` or `¬p(t)`; n-ary predicates take a tuple argument.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub positive: bool,
    pub predicate: Sym,
    pub arg: Term,
}

impl Literal {
    pub fn pos(predicate: &str, arg: Term) -> Self {
        Literal {
            positive: true,
            predicate: Sym::new(predicate),
            arg,
        }
    }

    pub fn neg(predicate: &str, arg: Term) -> Self {
        Literal {
            positive: false,
            predicate: Sym::new(predicate),
            arg,
        }
    }

    /// Whether both literals have the same sign and predicate.
    pub fn fits(&self, other: &Literal) -> bool {
        self.positive == other.positive && self.predicate == other.predicate
    }

    pub fn apply(&self, sigma: &Substitution) -> Literal {
        Literal {
            arg: sigma.apply(&self.arg),
            ..self.clone()
        }
    }

    /// Reads `p(a, b)` (argument tupled) or `p(a)`, optionally prefixed
    /// by `¬` or `~`.
    pub fn parse(text: &str, options: &ParseOptions) -> Result<Literal> {
        let text = text.trim();
        let (positive, rest) = match text.strip_prefix('¬').or_else(|| text.strip_prefix('~')) {
            Some(r) => (false, r.trim_start()),
            None => (true, text),
        };
        let term = parse_term_with(rest, options)?;
        let Term::App(pred, args) = term else {
            return Err(Error::parse(1, 1, format!("`{rest}` is not a literal")));
        };
        Ok(Literal {
            positive,
            predicate: pred,
            arg: tuple_args(args)?,
        })
    }

    /// The literal as a term `p(arg)` with the tuple spread out again.
    pub fn as_atom(&self) -> Term {
        Term::App(self.predicate, spread(&self.arg))
    }
}

fn tuple_args(mut args: Vec<Term>) -> Result<Term> {
    match args.len() {
        0 => Err(Error::Invalid(
            "nullary predicates are not supported".into(),
        )),
        1 => Ok(args.pop().unwrap()),
        _ => Ok(Term::tuple(args)),
    }
}

fn spread(arg: &Term) -> Vec<Term> {
    match arg {
        Term::App(f, items) if items.len() >= 2 && tuple_arity(*f) == Some(items.len()) => {
            items.clone()
        }
        other => vec![other.clone()],
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            write!(f, "¬")?;
        }
        let args: Vec<String> = spread(&self.arg).iter().map(|a| a.to_string()).collect();
        write!(f, "{}({})", self.predicate, args.join(","))
    }
}

/// A finite set of literals.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Clause {
    pub literals: Vec<Literal>,
}

impl Clause {
    /// Builds a clause, dropping literals that occur twice.
    pub fn new(literals: Vec<Literal>) -> Self {
        let mut out: Vec<Literal> = Vec::with_capacity(literals.len());
        for l in literals {
            if !out.contains(&l) {
                out.push(l);
            }
        }
        Clause { literals: out }
    }

    pub fn horn(head: Literal, body: Vec<Literal>) -> Self {
        let mut lits = vec![head];
        lits.extend(body.into_iter().map(|l| Literal {
            positive: false,
            ..l
        }));
        Clause::new(lits)
    }

    pub fn is_ground(&self) -> bool {
        self.literals.iter().all(|l| l.arg.is_ground())
    }

    pub fn apply(&self, sigma: &Substitution) -> Clause {
        Clause::new(self.literals.iter().map(|l| l.apply(sigma)).collect())
    }

    /// Drops literals congruent to an earlier one of the same sign and
    /// predicate.
    pub fn without_congruent(&self, cg: &mut ClassGrammar) -> Result<Clause> {
        let mut kept: Vec<(Literal, Nt)> = Vec::new();
        for l in &self.literals {
            let class = cg.class_nt_of(&l.arg)?;
            if !kept.iter().any(|(k, c)| k.fits(l) && *c == class) {
                kept.push((l.clone(), class));
            }
        }
        Ok(Clause {
            literals: kept.into_iter().map(|(l, _)| l).collect(),
        })
    }

    /// Replaces variables by fresh constants named after them.
    pub fn skolemize(&self) -> Clause {
        let mut sigma = Substitution::new();
        for l in &self.literals {
            for x in l.arg.vars() {
                sigma.insert(x, Term::constant(&format!("sk_{x}")));
            }
        }
        self.apply(&sigma)
    }

    /// Parses `L1 ∨ L2 ...` or the Horn form `H ← B1 ∧ B2` (also `:-`
    /// and `,` / `&`).
    pub fn parse(text: &str, options: &ParseOptions) -> Result<Clause> {
        let arrow = text
            .find('←')
            .map(|i| (i, '←'.len_utf8()))
            .or_else(|| text.find(":-").map(|i| (i, 2)));
        if let Some((i, len)) = arrow {
            let head = Literal::parse(&text[..i], options)?;
            let body_text = text[i + len..].trim();
            let body = if body_text.is_empty() || body_text == "true" {
                Vec::new()
            } else {
                split_top_level(body_text, &['∧', '&'])
                    .iter()
                    .map(|p| Literal::parse(p, options))
                    .collect::<Result<Vec<_>>>()?
            };
            return Ok(Clause::horn(head, body));
        }
        let lits = split_top_level(text, &['∨', '|'])
            .iter()
            .map(|p| Literal::parse(p, options))
            .collect::<Result<Vec<_>>>()?;
        Ok(Clause::new(lits))
    }
}

fn split_top_level(text: &str, seps: &[char]) -> Vec<String> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in text.chars() {
        match c {
            '(' | '⟨' => depth += 1,
            ')' | '⟩' => depth -= 1,
            _ => {}
        }
        if depth == 0 && seps.contains(&c) {
            parts.push(std::mem::take(&mut cur));
        } else {
            cur.push(c);
        }
    }
    parts.push(cur);
    parts
        .into_iter()
        .map(|p| p.trim().to_owned())
        .filter(|p| !p.is_empty())
        .collect()
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let heads: Vec<&Literal> = self.literals.iter().filter(|l| l.positive).collect();
        if heads.len() == 1 {
            write!(f, "{}", heads[0])?;
            let body: Vec<String> = self
                .literals
                .iter()
                .filter(|l| !l.positive)
                .map(|l| {
                    Literal {
                        positive: true,
                        ..l.clone()
                    }
                    .to_string()
                })
                .collect();
            if !body.is_empty() {
                write!(f, " ← {}", body.join(" ∧ "))?;
            }
            Ok(())
        } else {
            let all: Vec<String> = self.literals.iter().map(|l| l.to_string()).collect();
            write!(f, "{}", all.join(" ∨ "))
        }
    }
}

/// Positive and negative examples of one predicate.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Examples {
    pub predicate: Option<Sym>,
    pub positives: Vec<Term>,
    pub negatives: Vec<Term>,
    /// Input/output pairs for the determinate mode, written `p(s -> t)`.
    pub positive_pairs: Vec<(Term, Term)>,
    pub negative_pairs: Vec<(Term, Term)>,
}

impl Examples {
    /// Reads lines `+ p(args)` and `- p(args)`; determinate examples are
    /// written `+ p(s -> t)`. `#` starts a comment.
    pub fn parse(text: &str, options: &ParseOptions) -> Result<Examples> {
        let mut ex = Examples::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = |e: Error| match e {
                Error::Parse {
                    column, message, ..
                } => Error::parse(lineno + 1, column, message),
                other => other,
            };
            let (positive, rest) = if let Some(r) = line.strip_prefix('+') {
                (true, r.trim())
            } else if let Some(r) = line.strip_prefix('-') {
                (false, r.trim())
            } else {
                return Err(Error::parse(
                    lineno + 1,
                    1,
                    "example lines start with `+` or `-`",
                ));
            };
            let open = rest
                .find('(')
                .ok_or_else(|| Error::parse(lineno + 1, 1, "expected `p(...)`"))?;
            let close = rest
                .rfind(')')
                .filter(|c| *c > open)
                .ok_or_else(|| Error::parse(lineno + 1, 1, "unclosed example"))?;
            let pred = Sym::new(rest[..open].trim());
            match ex.predicate {
                Some(p) if p != pred => {
                    return Err(Error::parse(
                        lineno + 1,
                        1,
                        format!("examples mix `{p}` and `{pred}`"),
                    ))
                }
                _ => ex.predicate = Some(pred),
            }
            let inner = &rest[open + 1..close];
            if let Some(i) = inner.find("->") {
                let s = parse_term_with(&inner[..i], options).map_err(at)?;
                let t = parse_term_with(&inner[i + 2..], options).map_err(at)?;
                if positive {
                    ex.positive_pairs.push((s, t));
                } else {
                    ex.negative_pairs.push((s, t));
                }
            } else {
                let args = parse_term_list(inner, options).map_err(at)?;
                let arg = tuple_args(args)?;
                if positive {
                    ex.positives.push(arg);
                } else {
                    ex.negatives.push(arg);
                }
            }
        }
        Ok(ex)
    }
}

fn check_ground(terms: &[Term]) -> Result<()> {
    match terms.iter().find(|t| !t.is_ground()) {
        Some(t) => Err(Error::Invalid(format!("example `{t}` is not ground"))),
        None => Ok(()),
    }
}

/// The regular set `H+ ∖ H−` of hypotheses, with the universal
/// substitutions its variables refer to.
///
/// `H−` is kept as its lifted components: the determinized union is
/// usually far too large to build, while membership and enumeration only
/// need to run each component on a candidate.
#[derive(Clone, Debug)]
pub struct HypothesisSet {
    pub grammar: TreeGrammar,
    pub root: Nt,
    pub negatives: Vec<(TreeGrammar, Nt)>,
    pub universal: UniversalSubstitutions,
}

impl HypothesisSet {
    pub fn contains(&self, t: &Term) -> bool {
        Recognizer::new(&self.grammar).accepts(self.root, t)
            && !self
                .negatives
                .iter()
                .any(|(g, r)| Recognizer::new(g).accepts(*r, t))
    }

    /// Members by ascending weight. `limits.max_count` counts members
    /// surviving the negative filter.
    pub fn stream<'a>(
        &'a self,
        weights: &WeightMap,
        limits: Limits,
    ) -> Result<impl Iterator<Item = (u64, Term)> + 'a> {
        let inner = Enumerator::new(
            &[(&self.grammar, self.root)],
            weights,
            Limits {
                max_count: None,
                max_weight: limits.max_weight,
            },
        )?;
        let negatives: Vec<(Recognizer<'a>, Nt)> = self
            .negatives
            .iter()
            .map(|(g, r)| (Recognizer::new(g), *r))
            .collect();
        let filtered =
            inner.filter(move |(_, t)| !negatives.iter().any(|(rec, r)| rec.accepts(*r, t)));
        Ok(filtered.take(limits.max_count.unwrap_or(usize::MAX)))
    }

    pub fn enumerate(&self, weights: &WeightMap, limits: Limits) -> Result<Vec<(u64, Term)>> {
        Ok(self.stream(weights, limits)?.collect())
    }

    /// A single grammar for the set, refusing once the determinized `H−`
    /// would exceed `max_states` states.
    pub fn materialize(&self, max_states: usize) -> Result<(TreeGrammar, Nt)> {
        if self.negatives.is_empty() {
            return Ok((self.grammar.clone(), self.root));
        }
        let parts: Vec<(&TreeGrammar, Nt)> = self.negatives.iter().map(|(g, r)| (g, *r)).collect();
        let (minus, minus_root) = union(&parts, "Neg")?;
        try_difference(&self.grammar, self.root, &minus, minus_root, max_states)
    }
}

/// Every `t` whose instances under the universal substitutions hit the
/// positive classes, minus every `t` one of whose instances (over the
/// class representatives) hits a negative class.
pub fn hyp_set(
    cg: &mut ClassGrammar,
    positives: &[Term],
    negatives: &[Term],
    budget: usize,
) -> Result<HypothesisSet> {
    if positives.is_empty() {
        return Err(Error::Invalid(
            "at least one positive example is required".into(),
        ));
    }
    check_ground(positives)?;
    check_ground(negatives)?;
    let pos_roots = positives
        .iter()
        .map(|t| cg.class_nt_of(t))
        .collect::<Result<Vec<_>>>()?;
    let neg_roots = negatives
        .iter()
        .map(|t| cg.class_nt_of(t))
        .collect::<Result<Vec<_>>>()?;
    let maps = maximal_sets(cg)?;
    let universal = universal_substitutions(&maps, positives.len())?;
    let targets: Vec<(Nt, Substitution)> = pos_roots
        .iter()
        .copied()
        .zip(universal.taus.iter().cloned())
        .collect();
    let (grammar, root) = constrained_egen(&cg.grammar, &targets)?;
    let mut lifted = Vec::new();
    if !neg_roots.is_empty() {
        let k = maps.len();
        let vars = &universal.vars;
        let count = k.checked_pow(vars.len() as u32).filter(|c| *c <= budget).ok_or_else(|| {
            Error::Budget(format!(
                "{k}^{} substitutions exceed the budget of {budget}; use the determinate learner or fewer classes",
                vars.len()
            ))
        })?;
        for code in 0..count {
            let mut rest = code;
            let mut sigma = Substitution::new();
            for v in vars.iter().rev() {
                sigma.insert(*v, maps.class_of(rest % k).clone());
                rest /= k;
            }
            let g = lift(&cg.grammar, &sigma);
            for root in &neg_roots {
                if !is_empty(&g, *root) {
                    lifted.push((g.clone(), *root));
                }
            }
        }
    }
    Ok(HypothesisSet {
        grammar,
        root,
        negatives: lifted,
        universal,
    })
}

/// Atom hypotheses `p(t)` for the given examples.
#[derive(Clone, Debug)]
pub struct AtomHypotheses {
    pub predicate: Sym,
    pub set: HypothesisSet,
}

impl AtomHypotheses {
    pub fn contains(&self, atom: &Literal) -> bool {
        atom.predicate == self.predicate && self.set.contains(&atom.arg)
    }

    pub fn atom(&self, arg: &Term) -> Literal {
        Literal {
            positive: true,
            predicate: self.predicate,
            arg: arg.clone(),
        }
    }
}

pub fn learn_atom(
    cg: &mut ClassGrammar,
    predicate: Sym,
    positives: &[Term],
    negatives: &[Term],
    budget: usize,
) -> Result<AtomHypotheses> {
    Ok(AtomHypotheses {
        predicate,
        set: hyp_set(cg, positives, negatives, budget)?,
    })
}

/// One maximal index set `I` of the determinate construction: the pattern
/// `s_I`, its matchers, and the lifted classes bounding `T_I`.
#[derive(Clone, Debug)]
pub struct DeterminateHypothesis {
    /// Indices into positives followed by negatives.
    pub indices: Vec<usize>,
    pub pattern: Term,
    pub matchers: Vec<Substitution>,
    pub positives: Vec<(TreeGrammar, Nt)>,
    pub negatives: Vec<(TreeGrammar, Nt)>,
}

impl DeterminateHypothesis {
    pub fn contains(&self, t: &Term) -> bool {
        self.positives
            .iter()
            .all(|(g, r)| Recognizer::new(g).accepts(*r, t))
            && !self
                .negatives
                .iter()
                .any(|(g, r)| Recognizer::new(g).accepts(*r, t))
    }

    /// Members of `T_I`, further intersected with `extra` languages, by
    /// ascending weight. Only `limits.max_weight` bounds the underlying
    /// enumeration; `limits.max_count` counts surviving members.
    pub fn stream<'a>(
        &'a self,
        extra: &[(&'a TreeGrammar, Nt)],
        weights: &WeightMap,
        limits: Limits,
    ) -> Result<impl Iterator<Item = (u64, Term)> + 'a> {
        let mut conjuncts: Vec<(&TreeGrammar, Nt)> =
            self.positives.iter().map(|(g, r)| (g, *r)).collect();
        conjuncts.extend_from_slice(extra);
        let inner = Enumerator::new(
            &conjuncts,
            weights,
            Limits {
                max_count: None,
                max_weight: limits.max_weight,
            },
        )?;
        let negatives: Vec<(Recognizer<'a>, Nt)> = self
            .negatives
            .iter()
            .map(|(g, r)| (Recognizer::new(g), *r))
            .collect();
        let filtered =
            inner.filter(move |(_, t)| !negatives.iter().any(|(rec, r)| rec.accepts(*r, t)));
        Ok(filtered.take(limits.max_count.unwrap_or(usize::MAX)))
    }

    /// A grammar for `T_I`.
    pub fn materialize(&self) -> Result<(TreeGrammar, Nt)> {
        let mut iter = self.positives.iter();
        let (first, r0) = iter.next().expect("at least one positive");
        let mut acc = (first.clone(), *r0);
        for (g, r) in iter {
            let prod = crate::automata::intersect(&acc.0, g, &[(acc.1, *r)])?;
            let root = prod.get(acc.1, *r).expect("root pair");
            acc = (prod.grammar, root);
        }
        for (g, r) in &self.negatives {
            acc = difference(&acc.0, acc.1, g, *r)?;
        }
        Ok(acc)
    }
}

/// All maximal index sets with their hypothesis languages.
#[derive(Clone, Debug)]
pub struct DeterminateHypothesisSet {
    pub entries: Vec<DeterminateHypothesis>,
}

impl DeterminateHypothesisSet {
    /// Whether `(s, t)` is a member, up to consistent renaming of the
    /// pattern variables.
    pub fn contains(&self, s: &Term, t: &Term) -> bool {
        self.entries.iter().any(|e| {
            crate::term::renaming_between(s, &e.pattern)
                .is_some_and(|rho| e.contains(&rho.apply(t)))
        })
    }
}

/// Determinate hypotheses for input/output pairs. For each maximal set of
/// indices the inputs are generalized syntactically and the outputs modulo
/// the theory under the resulting matchers.
pub fn hyp_determinate(
    cg: &mut ClassGrammar,
    positives: &[(Term, Term)],
    negatives: &[(Term, Term)],
) -> Result<DeterminateHypothesisSet> {
    if positives.is_empty() {
        return Err(Error::Invalid(
            "at least one positive example is required".into(),
        ));
    }
    if negatives.len() > MAX_DETERMINATE_NEGATIVES {
        return Err(Error::Budget(format!(
            "more than {MAX_DETERMINATE_NEGATIVES} negative examples for the determinate learner"
        )));
    }
    let all: Vec<&(Term, Term)> = positives.iter().chain(negatives).collect();
    for (s, t) in &all {
        check_ground(&[s.clone(), t.clone()])?;
    }
    let roots = all
        .iter()
        .map(|(_, t)| cg.class_nt_of(t))
        .collect::<Result<Vec<_>>>()?;
    let n = positives.len();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut entries = Vec::new();
    for mask in 0u32..(1 << negatives.len()) {
        let mut indices: Vec<usize> = (0..n).collect();
        indices.extend(
            (0..negatives.len())
                .filter(|j| mask >> j & 1 == 1)
                .map(|j| n + j),
        );
        let inputs: Vec<Term> = indices.iter().map(|i| all[*i].0.clone()).collect();
        let (pattern, matchers) = lgg_syntactic(&inputs);
        let closure: Vec<usize> = (0..n)
            .chain((n..all.len()).filter(|j| generalizes(&pattern, &all[*j].0)))
            .collect();
        if closure != indices || !seen.insert(indices.clone()) {
            continue;
        }
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for (pos_in_i, i) in indices.iter().enumerate() {
            let lifted = (lift(&cg.grammar, &matchers[pos_in_i]), roots[*i]);
            if *i < n {
                pos.push(lifted);
            } else {
                neg.push(lifted);
            }
        }
        entries.push(DeterminateHypothesis {
            indices,
            pattern,
            matchers,
            positives: pos,
            negatives: neg,
        });
    }
    Ok(DeterminateHypothesisSet { entries })
}

/// Determinate hypotheses for literal examples `p(⟨s, t⟩)`. The inputs must
/// be constructor terms so that every hypothesis is determinate.
pub fn learn_atom_determinate(
    cg: &mut ClassGrammar,
    positives: &[(Term, Term)],
    negatives: &[(Term, Term)],
) -> Result<DeterminateHypothesisSet> {
    let sig = cg.grammar.signature().clone();
    for (s, _) in positives.iter().chain(negatives) {
        if !is_constructor_over(s, &sig) {
            return Err(Error::Invalid(format!(
                "input `{s}` is not a constructor term"
            )));
        }
    }
    hyp_determinate(cg, positives, negatives)
}

fn is_constructor_over(t: &Term, sig: &Signature) -> bool {
    match t {
        Term::Var(_) => true,
        Term::App(f, args) => {
            (sig.is_constructor(*f) || tuple_arity(*f) == Some(args.len()) || !sig.contains(*f))
                && args.iter().all(|a| is_constructor_over(a, sig))
        }
    }
}

/// One generalized literal position: every member term of the language
/// may be used as the argument of the literal.
#[derive(Clone, Debug)]
pub struct Slot {
    pub positive: bool,
    pub predicate: Sym,
    pub grammar: TreeGrammar,
    pub root: Nt,
}

impl Slot {
    pub fn contains(&self, lit: &Literal) -> bool {
        lit.positive == self.positive
            && lit.predicate == self.predicate
            && Recognizer::new(&self.grammar).accepts(self.root, &lit.arg)
    }

    pub fn is_empty(&self) -> bool {
        is_empty(&self.grammar, self.root)
    }

    /// The heaviest member under `weights` among at most `limit` members,
    /// together with how many members share that weight.
    pub fn heaviest(
        &self,
        weights: &WeightMap,
        limit: usize,
    ) -> Result<Option<(u64, Term, usize)>> {
        let mut best: Option<(u64, Term, usize)> = None;
        for (w, t) in Enumerator::new(&[(&self.grammar, self.root)], weights, Limits::count(limit))?
        {
            best = match best {
                Some((bw, bt, c)) if bw == w => Some((bw, bt, c + 1)),
                Some(b) if b.0 > w => Some(b),
                _ => Some((w, t, 1)),
            };
        }
        Ok(best)
    }
}

/// Clause hypotheses: one literal per slot, each argument drawn from the
/// slot language. All slots share the variables of the universal
/// substitutions, so choices in different slots combine freely.
#[derive(Clone, Debug)]
pub struct ClauseHypotheses {
    pub slots: Vec<Slot>,
    pub universal: UniversalSubstitutions,
    /// Literal index pairs `(i, j)` of `C1` and `C2` behind each slot.
    pub pairs: Vec<(usize, usize)>,
}

impl ClauseHypotheses {
    /// Whether every literal of `clause` can be placed in a distinct slot.
    pub fn admits(&self, clause: &Clause) -> bool {
        fn place(lits: &[Literal], slots: &[Slot], used: &mut Vec<bool>) -> bool {
            let Some((first, rest)) = lits.split_first() else {
                return true;
            };
            for (i, s) in slots.iter().enumerate() {
                if !used[i] && s.contains(first) {
                    used[i] = true;
                    if place(rest, slots, used) {
                        return true;
                    }
                    used[i] = false;
                }
            }
            false
        }
        place(
            &clause.literals,
            &self.slots,
            &mut vec![false; self.slots.len()],
        )
    }
}

/// Fitting literal pairs of two clauses, in literal order.
pub fn fitting_pairs(c1: &Clause, c2: &Clause) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (i, l1) in c1.literals.iter().enumerate() {
        for (j, l2) in c2.literals.iter().enumerate() {
            if l1.fits(l2) {
                out.push((i, j));
            }
        }
    }
    out
}

/// Clauses E-subsuming both ground clauses: for every fitting literal pair
/// a slot generalizing the two arguments under the universal
/// substitutions.
pub fn lgg_e(cg: &mut ClassGrammar, c1: &Clause, c2: &Clause) -> Result<ClauseHypotheses> {
    if !c1.is_ground() || !c2.is_ground() {
        return Err(Error::Invalid("lgg_E expects ground clauses".into()));
    }
    let pairs = fitting_pairs(c1, c2);
    let mut roots = Vec::with_capacity(pairs.len());
    for (i, j) in &pairs {
        let r1 = cg.class_nt_of(&c1.literals[*i].arg)?;
        let r2 = cg.class_nt_of(&c2.literals[*j].arg)?;
        roots.push((r1, r2));
    }
    let maps = maximal_sets(cg)?;
    let universal = universal_substitutions(&maps, 2)?;
    let mut slots = Vec::with_capacity(pairs.len());
    for ((i, _), (r1, r2)) in pairs.iter().zip(&roots) {
        let targets = [
            (*r1, universal.taus[0].clone()),
            (*r2, universal.taus[1].clone()),
        ];
        let (grammar, root) = constrained_egen(&cg.grammar, &targets)?;
        let lit = &c1.literals[*i];
        slots.push(Slot {
            positive: lit.positive,
            predicate: lit.predicate,
            grammar,
            root,
        });
    }
    Ok(ClauseHypotheses {
        slots,
        universal,
        pairs,
    })
}

/// Plotkin's least general generalization of two clauses: the syntactic
/// lgg of all fitting literal pairs with shared variable naming.
pub fn plotkin_lgg(c1: &Clause, c2: &Clause) -> Clause {
    let pairs = fitting_pairs(c1, c2);
    if pairs.is_empty() {
        return Clause::default();
    }
    let left: Vec<Term> = pairs
        .iter()
        .map(|(i, _)| c1.literals[*i].arg.clone())
        .collect();
    let right: Vec<Term> = pairs
        .iter()
        .map(|(_, j)| c2.literals[*j].arg.clone())
        .collect();
    let (g, _) = lgg_syntactic(&[Term::tuple(left), Term::tuple(right)]);
    let args = g.args().to_vec();
    Clause::new(
        pairs
            .iter()
            .zip(args)
            .map(|((i, _), arg)| Literal {
                arg,
                ..c1.literals[*i].clone()
            })
            .collect(),
    )
}

/// A Horn clause `p0(s0, t0) ← q1(t1) ∧ ... ∧ qk(tk)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HornClause {
    pub head: Literal,
    pub body: Vec<Literal>,
}

impl HornClause {
    pub fn new(head: Literal, body: Vec<Literal>) -> Self {
        HornClause { head, body }
    }

    pub fn parse(text: &str, options: &ParseOptions) -> Result<HornClause> {
        let clause = Clause::parse(text, options)?;
        let mut heads = clause.literals.iter().filter(|l| l.positive);
        let head = heads
            .next()
            .ok_or_else(|| Error::Invalid("Horn clause without head".into()))?
            .clone();
        if heads.next().is_some() {
            return Err(Error::Invalid(
                "Horn clause with two positive literals".into(),
            ));
        }
        let body = clause
            .literals
            .iter()
            .filter(|l| !l.positive)
            .map(|l| Literal {
                positive: true,
                ..l.clone()
            })
            .collect();
        Ok(HornClause { head, body })
    }

    pub fn to_clause(&self) -> Clause {
        Clause::horn(self.head.clone(), self.body.clone())
    }

    fn head_pair(&self) -> Result<(Term, Term)> {
        match &self.head.arg {
            Term::App(f, items) if items.len() == 2 && tuple_arity(*f) == Some(2) => {
                Ok((items[0].clone(), items[1].clone()))
            }
            other => Err(Error::Invalid(format!(
                "head argument `{other}` is not an input/output pair"
            ))),
        }
    }
}

impl fmt::Display for HornClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if !self.body.is_empty() {
            let body: Vec<String> = self.body.iter().map(|l| l.to_string()).collect();
            write!(f, " ← {}", body.join(" ∧ "))?;
        }
        Ok(())
    }
}

/// Constrained clauses E-subsuming two ground Horn clauses with determinate
/// heads `p0(s0i, t0i)`.
#[derive(Clone, Debug)]
pub struct ConstrainedClauses {
    pub predicate: Sym,
    /// Syntactic lgg of the head inputs; every member has this input.
    pub pattern: Term,
    pub matchers: Vec<Substitution>,
    pub head: Slot,
    pub body: Vec<Slot>,
    /// Body literal index pairs behind each kept slot.
    pub pairs: Vec<(usize, usize)>,
    /// Fitting pairs whose slot language was empty and got dropped.
    pub dropped: Vec<(usize, usize)>,
}

impl ConstrainedClauses {
    /// Whether the clause is a member: same head input, head output in the
    /// head language, and each body literal in some body slot.
    pub fn admits(&self, clause: &HornClause) -> bool {
        let Ok((s, t)) = clause.head_pair() else {
            return false;
        };
        if clause.head.predicate != self.predicate || s != self.pattern {
            return false;
        }
        if !Recognizer::new(&self.head.grammar).accepts(self.head.root, &t) {
            return false;
        }
        clause
            .body
            .iter()
            .all(|l| self.body.iter().any(|slot| slot.contains(l)))
    }
}

/// Constrained-clause generalization of two ground Horn clauses. The head
/// inputs are generalized syntactically, all other arguments modulo the
/// theory under the same matchers. Body pairs with an empty language
/// cannot contribute a literal and are dropped.
pub fn lgg_ce(
    cg: &mut ClassGrammar,
    c1: &HornClause,
    c2: &HornClause,
) -> Result<ConstrainedClauses> {
    if c1.head.predicate != c2.head.predicate {
        return Err(Error::Invalid(format!(
            "head predicates `{}` and `{}` differ",
            c1.head.predicate, c2.head.predicate
        )));
    }
    let (s1, t1) = c1.head_pair()?;
    let (s2, t2) = c2.head_pair()?;
    check_ground(&[s1.clone(), t1.clone(), s2.clone(), t2.clone()])?;
    let (pattern, matchers) = lgg_syntactic(&[s1, s2]);
    let lifted1 = lift(&cg.grammar, &matchers[0]);
    let lifted2 = lift(&cg.grammar, &matchers[1]);
    let slot_for = |cg: &mut ClassGrammar,
                    a: &Term,
                    b: &Term,
                    positive: bool,
                    predicate: Sym|
     -> Result<Slot> {
        let r1 = cg.class_nt_of(a)?;
        let r2 = cg.class_nt_of(b)?;
        // Tuple nonterminals may have been added; lift again if so.
        let (g1, g2) = if r1.index() < lifted1.len() && r2.index() < lifted2.len() {
            (lifted1.clone(), lifted2.clone())
        } else {
            (
                lift(&cg.grammar, &matchers[0]),
                lift(&cg.grammar, &matchers[1]),
            )
        };
        let prod = crate::automata::intersect(&g1, &g2, &[(r1, r2)])?;
        let root = prod.get(r1, r2).expect("root pair");
        Ok(Slot {
            positive,
            predicate,
            grammar: prod.grammar,
            root,
        })
    };
    let head = slot_for(cg, &t1, &t2, true, c1.head.predicate)?;
    let mut body = Vec::new();
    let mut pairs = Vec::new();
    let mut dropped = Vec::new();
    for (i, l1) in c1.body.iter().enumerate() {
        for (j, l2) in c2.body.iter().enumerate() {
            if !l1.fits(l2) {
                continue;
            }
            check_ground(&[l1.arg.clone(), l2.arg.clone()])?;
            let slot = slot_for(cg, &l1.arg, &l2.arg, l1.positive, l1.predicate)?;
            if slot.is_empty() {
                dropped.push((i, j));
            } else {
                body.push(slot);
                pairs.push((i, j));
            }
        }
    }
    Ok(ConstrainedClauses {
        predicate: c1.head.predicate,
        pattern,
        matchers,
        head,
        body,
        pairs,
        dropped,
    })
}

/// Whether some σ maps every literal of `c1` onto a literal of the ground
/// clause `c2` congruent to it. Variables shared between literals are
/// handled by tupling the chosen literal arguments.
pub fn e_subsumes(cg: &mut ClassGrammar, c1: &Clause, c2: &Clause) -> Result<bool> {
    if !c2.is_ground() {
        return Err(Error::Invalid(
            "the subsumed clause must be ground; skolemize it first".into(),
        ));
    }
    let candidates: Vec<Vec<usize>> = c1
        .literals
        .iter()
        .map(|l| {
            (0..c2.literals.len())
                .filter(|j| l.fits(&c2.literals[*j]))
                .collect()
        })
        .collect();
    if candidates.iter().any(Vec::is_empty) {
        return Ok(false);
    }
    if c1.literals.is_empty() {
        return Ok(true);
    }
    let pattern = Term::tuple(c1.literals.iter().map(|l| l.arg.clone()).collect());
    let mut choice = vec![0usize; candidates.len()];
    loop {
        let target = Term::tuple(
            choice
                .iter()
                .zip(&candidates)
                .map(|(c, cands)| c2.literals[cands[*c]].arg.clone())
                .collect(),
        );
        let nt = cg.class_nt_of(&target)?;
        if instance_in_class(&pattern, &cg.grammar, nt) {
            return Ok(true);
        }
        let mut pos = 0;
        loop {
            if pos == choice.len() {
                return Ok(false);
            }
            choice[pos] += 1;
            if choice[pos] < candidates[pos].len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

/// Replaces the outputs of determinate body literals by the function
/// terms computing them and drops those literals.
///
/// `det_defs` maps a determinate predicate `q` to a function symbol `g`
/// with `q(a1, ..., ak, x) ⇔ g(a1, ..., ak) = x`; the last argument of such
/// a literal is its output. `input_vars` are the variables of the head
/// input `s0`.
pub fn remove_det_literals(
    clause: &HornClause,
    det_defs: &HashMap<Sym, Sym>,
    input_vars: &BTreeSet<Sym>,
) -> Result<HornClause> {
    let mut known: BTreeSet<Sym> = input_vars.clone();
    let mut steps: Vec<(Sym, Term)> = Vec::new();
    let mut rest: Vec<Literal> = Vec::new();
    for lit in &clause.body {
        let Some(g) = det_defs.get(&lit.predicate) else {
            rest.push(lit.clone());
            continue;
        };
        let mut args = spread(&lit.arg);
        let output = args.pop().filter(|_| !args.is_empty());
        let Some(Term::Var(x)) = output else {
            return Err(Error::Invalid(format!(
                "determinate literal `{lit}` has no output variable"
            )));
        };
        if input_vars.contains(&x) || steps.iter().any(|(y, _)| *y == x) {
            return Err(Error::Invalid(format!(
                "output variable `{x}` of `{lit}` is not fresh"
            )));
        }
        if let Some(bad) = args
            .iter()
            .flat_map(|a| a.vars())
            .find(|v| !known.contains(v))
        {
            return Err(Error::Invalid(format!(
                "input variable `{bad}` of `{lit}` is not bound by the head input or earlier outputs"
            )));
        }
        known.insert(x);
        steps.push((x, Term::App(*g, args)));
    }
    for lit in &rest {
        if let Some(bad) = lit.arg.vars().into_iter().find(|v| !known.contains(v)) {
            return Err(Error::Invalid(format!(
                "variable `{bad}` of `{lit}` is unbound"
            )));
        }
    }
    let apply_all = |t: &Term| -> Term {
        steps.iter().rev().fold(t.clone(), |acc, (x, g)| {
            Substitution::from_pairs([(*x, g.clone())]).apply(&acc)
        })
    };
    Ok(HornClause {
        head: Literal {
            arg: apply_all(&clause.head.arg),
            ..clause.head.clone()
        },
        body: rest
            .iter()
            .map(|l| Literal {
                arg: apply_all(&l.arg),
                ..l.clone()
            })
            .collect(),
    })
}

/// Groups examples by predicate for callers juggling several relations.
pub fn by_predicate(literals: &[Literal]) -> BTreeMap<Sym, Vec<Term>> {
    let mut out: BTreeMap<Sym, Vec<Term>> = BTreeMap::new();
    for l in literals {
        out.entry(l.predicate).or_default().push(l.arg.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carriers::words;
    use crate::congruence::{finite_quotient, from_ground_equations};
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

    const HYPOTHESES: [&str; 6] = [
        "(v00, v01)",
        "(v00, v01*v01)",
        "(v00*v00, v01)",
        "(v00*v01, v11*v01)",
        "(0, v01)",
        "(v00, v00+v01)",
    ];

    #[test]
    fn less_or_equal_hypotheses() {
        let pos = [t("(0,0)"), t("(0,s(0))")];
        let mut cg = two_class();
        let h = hyp_set(&mut cg, &pos, &[], DEFAULT_SUBSTITUTION_BUDGET).unwrap();
        for hyp in HYPOTHESES {
            assert!(h.contains(&t(hyp)), "{hyp}");
        }
        let mut cg = two_class();
        let h = hyp_set(&mut cg, &pos, &[t("(s(0),0)")], DEFAULT_SUBSTITUTION_BUDGET).unwrap();
        for (i, hyp) in HYPOTHESES.iter().enumerate() {
            assert_eq!(h.contains(&t(hyp)), i >= 4, "{hyp}");
        }
    }

    #[test]
    fn budget_is_enforced() {
        let mut cg = two_class();
        let err = hyp_set(&mut cg, &[t("(0,0)"), t("(0,s(0))")], &[t("(s(0),0)")], 10).unwrap_err();
        assert!(matches!(err, Error::Budget(_)));
    }

    #[test]
    fn maximal_index_sets() {
        let sig = Signature::new()
            .with("a", 0, true)
            .with("b", 0, true)
            .with("c", 0, true)
            .with("+", 2, true)
            .with("ta", 0, false)
            .with("tb", 0, false)
            .with("tc", 0, false);
        let eqs = [(t("ta"), t("ta")), (t("tb"), t("tb")), (t("tc"), t("tc"))];
        let (mut cg, _) = from_ground_equations(&sig, &eqs).unwrap();
        let set = hyp_determinate(
            &mut cg,
            &[(t("a+a"), t("ta"))],
            &[(t("b+b"), t("tb")), (t("b+c"), t("tc"))],
        )
        .unwrap();
        let sets: Vec<Vec<usize>> = set.entries.iter().map(|e| e.indices.clone()).collect();
        assert!(sets.contains(&vec![0, 1]));
        assert!(sets.contains(&vec![0, 1, 2]));
        assert!(!sets.contains(&vec![0, 2]));
    }

    #[test]
    fn single_determinate_example() {
        let mut cg = finite_quotient(&crate::carriers::peano(3, false, &["+"]).unwrap()).unwrap();
        let set = hyp_determinate(&mut cg, &[(t("(s(0),0)"), t("s(0)"))], &[]).unwrap();
        assert_eq!(set.entries.len(), 1);
        assert!(set.contains(&t("(s(0),0)"), &t("s(0)")));
        assert!(set.contains(&t("(s(0),0)"), &t("0+s(0)")));
    }

    #[test]
    fn plotkin_special_case() {
        let sig = Signature::new()
            .with("a", 0, true)
            .with("b", 0, true)
            .with("c", 0, true);
        let (mut cg, _) = from_ground_equations(
            &sig,
            &[(t("a"), t("a")), (t("b"), t("b")), (t("c"), t("c"))],
        )
        .unwrap();
        let c1 = Clause::new(vec![Literal::pos("p", t("(a,b)"))]);
        let c2 = Clause::new(vec![Literal::pos("p", t("(a,c)"))]);
        let h = lgg_e(&mut cg, &c1, &c2).unwrap();
        assert_eq!(h.slots.len(), 1);
        let (_, best, ties) = h.slots[0]
            .heaviest(&WeightMap::unit(), 1000)
            .unwrap()
            .unwrap();
        assert_eq!(ties, 1);
        let plotkin = plotkin_lgg(&c1, &c2);
        assert!(crate::term::alpha_equivalent(
            &best,
            &plotkin.literals[0].arg
        ));
        assert_eq!(plotkin.to_string(), "p(a,v_{b,c})");
    }

    #[test]
    fn subsumption_without_theory() {
        let c1 = Clause::parse("¬p(vx) ∨ p(f(vx))", &ParseOptions::new()).unwrap();
        let c2 = Clause::parse("¬p(vx) ∨ p(f(f(vx)))", &ParseOptions::new())
            .unwrap()
            .skolemize();
        let sig = Signature::new().with("sk_vx", 0, true).with("f", 1, true);
        let terms: Vec<(Term, Term)> = c2
            .literals
            .iter()
            .map(|l| (l.arg.clone(), l.arg.clone()))
            .collect();
        let (mut cg, _) = from_ground_equations(&sig, &terms).unwrap();
        assert!(!e_subsumes(&mut cg, &c1, &c2).unwrap());
        assert!(e_subsumes(&mut cg, &c2, &c2).unwrap());
    }

    #[test]
    fn determinate_literal_removal() {
        let opts = ParseOptions::new();
        let c = HornClause::parse("d(vv,vw) ← s(vw,vu) ∧ p(vu,vv) ∧ f(vv)", &opts).unwrap();
        let defs = HashMap::from([(Sym::new("s"), Sym::new("spouse"))]);
        let inputs = BTreeSet::from([Sym::new("vv"), Sym::new("vw")]);
        let out = remove_det_literals(&c, &defs, &inputs).unwrap();
        assert_eq!(out.to_string(), "d(vv,vw) ← p(spouse(vw),vv) ∧ f(vv)");
        let plain = HornClause::parse("d(vv,vw) ← f(vv)", &opts).unwrap();
        assert_eq!(remove_det_literals(&plain, &defs, &inputs).unwrap(), plain);
        let bad = HornClause::parse("d(vv,vw) ← s(vz,vu)", &opts).unwrap();
        assert!(remove_det_literals(&bad, &defs, &inputs).is_err());
    }

    #[test]
    fn append_chain_removal() {
        let opts = ParseOptions::new();
        let c = HornClause::parse(
            "p0(v_{b,ε},v_{bbb,b}) ← a(v_{b,ε},v_{b,ε},v_{bb,ε}) ∧ a(v_{bb,ε},b,v_{bbb,b}) ∧ q(v_{bb,ε},d)",
            &opts,
        )
        .unwrap();
        let defs = HashMap::from([(Sym::new("a"), Sym::new("a"))]);
        let out = remove_det_literals(&c, &defs, &BTreeSet::from([Sym::new("v_{b,ε}")])).unwrap();
        assert_eq!(
            out.to_string(),
            "p0(v_{b,ε},a(a(v_{b,ε},v_{b,ε}),b)) ← q(a(v_{b,ε},v_{b,ε}),d)"
        );
    }

    #[test]
    fn append_lgg_ce() {
        let mut cg = finite_quotient(&words(&["b", "d"], 3).unwrap()).unwrap();
        let opts = ParseOptions::new().with_signature(cg.grammar.signature());
        let c1 = HornClause::parse("p0(b,a(b,a(b,b))) ← q(ε,d) ∧ q(a(b,b),d)", &opts).unwrap();
        let c2 = HornClause::parse("p0(ε,b) ← q(ε,d) ∧ q(a(b,b),d)", &opts).unwrap();
        let result = lgg_ce(&mut cg, &c1, &c2).unwrap();
        assert_eq!(result.pattern.to_string(), "v_{b,ε}");
        let expected = HornClause::parse(
            "p0(v_{b,ε}, a(a(v_{b,ε},v_{b,ε}),b)) ← q(a(v_{b,ε},v_{b,ε}),d)",
            &opts,
        )
        .unwrap();
        assert!(result.admits(&expected));
        assert!(!result.dropped.is_empty());
        let atoms_only = lgg_ce(
            &mut cg,
            &HornClause::parse("p0(b,a(b,a(b,b)))", &opts).unwrap(),
            &HornClause::parse("p0(ε,b)", &opts).unwrap(),
        )
        .unwrap();
        assert!(atoms_only.body.is_empty());
    }

    #[test]
    fn example_file_format() {
        let text = "# comment\n+ p((0,0))\n+ p(0, s(0))\n- p((s(0),0))\n+ p((0,0) -> s(0))\n";
        let ex = Examples::parse(text, &ParseOptions::new()).unwrap();
        assert_eq!(ex.positives, vec![t("(0,0)"), t("(0,s(0))")]);
        assert_eq!(ex.negatives, vec![t("(s(0),0)")]);
        assert_eq!(ex.positive_pairs, vec![(t("(0,0)"), t("s(0)"))]);
        assert!(Examples::parse("p(0)", &ParseOptions::new()).is_err());
    }
}
