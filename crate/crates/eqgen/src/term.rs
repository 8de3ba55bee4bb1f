//! First-order terms over interned symbols, substitutions, syntactic
//! matching and least general generalization.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};

/// An interned identifier used for function symbols, predicates and variables.
///
/// Two `Sym`s are equal iff they were interned from the same string, so
/// equality and hashing work on the pointer. Ordering is by name.
#[derive(Clone, Copy)]
pub struct Sym(&'static str);

fn interner() -> &'static Mutex<HashSet<&'static str>> {
    static POOL: OnceLock<Mutex<HashSet<&'static str>>> = OnceLock::new();
    POOL.get_or_init(|| Mutex::new(HashSet::new()))
}

impl Sym {
    pub fn new(name: &str) -> Sym {
        let mut pool = interner().lock().expect("symbol interner poisoned");
        if let Some(existing) = pool.get(name) {
            return Sym(existing);
        }
        let leaked: &'static str = Box::leak(name.to_owned().into_boxed_str());
        pool.insert(leaked);
        Sym(leaked)
    }

    pub fn as_str(&self) -> &'static str {
        self.0
    }
}

impl PartialEq for Sym {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.0.as_ptr(), other.0.as_ptr()) && self.0.len() == other.0.len()
    }
}

impl Eq for Sym {}

impl Hash for Sym {
    fn hash<H: Hasher>(&self, state: &mut H) {
        (self.0.as_ptr() as usize).hash(state);
    }
}

impl PartialOrd for Sym {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Sym {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            Ordering::Equal
        } else {
            self.0.cmp(other.0)
        }
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}

impl fmt::Debug for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<&str> for Sym {
    fn from(name: &str) -> Self {
        Sym::new(name)
    }
}

/// Symbol used for the n-ary tupling constructor `(t1,...,tn)`.
pub fn tuple_symbol(arity: usize) -> Sym {
    Sym::new(&format!("tup{arity}"))
}

/// Returns the arity if `sym` is a tupling constructor name.
pub fn tuple_arity(sym: Sym) -> Option<usize> {
    sym.as_str().strip_prefix("tup")?.parse().ok()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymbolInfo {
    pub arity: usize,
    pub constructor: bool,
}

/// Function symbols with arities and constructor flags, plus predicate names.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    symbols: BTreeMap<Sym, SymbolInfo>,
    predicates: BTreeMap<Sym, bool>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builder-style insertion that panics on arity conflicts; meant for
    /// statically known signatures.
    pub fn with(mut self, name: &str, arity: usize, constructor: bool) -> Self {
        self.add_symbol(Sym::new(name), arity, constructor)
            .expect("conflicting symbol declaration");
        self
    }

    pub fn add_symbol(&mut self, sym: Sym, arity: usize, constructor: bool) -> Result<()> {
        match self.symbols.get_mut(&sym) {
            Some(info) if info.arity != arity => Err(Error::Theory(format!(
                "symbol `{sym}` declared with arity {} and {arity}",
                info.arity
            ))),
            Some(info) => {
                info.constructor |= constructor;
                Ok(())
            }
            None => {
                self.symbols.insert(sym, SymbolInfo { arity, constructor });
                Ok(())
            }
        }
    }

    pub fn add_predicate(&mut self, pred: Sym, negatable: bool) {
        self.predicates.insert(pred, negatable);
    }

    pub fn predicates(&self) -> impl Iterator<Item = (Sym, bool)> + '_ {
        self.predicates.iter().map(|(p, n)| (*p, *n))
    }

    pub fn info(&self, sym: Sym) -> Option<SymbolInfo> {
        self.symbols.get(&sym).copied()
    }

    pub fn arity(&self, sym: Sym) -> Option<usize> {
        self.info(sym).map(|i| i.arity)
    }

    pub fn contains(&self, sym: Sym) -> bool {
        self.symbols.contains_key(&sym)
    }

    pub fn is_constructor(&self, sym: Sym) -> bool {
        self.info(sym).is_some_and(|i| i.constructor)
    }

    pub fn symbols(&self) -> impl Iterator<Item = (Sym, SymbolInfo)> + '_ {
        self.symbols.iter().map(|(s, i)| (*s, *i))
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Union of two signatures; fails when a shared name has two arities.
    pub fn merge(&mut self, other: &Signature) -> Result<()> {
        for (sym, info) in other.symbols() {
            self.add_symbol(sym, info.arity, info.constructor)?;
        }
        for (p, n) in other.predicates() {
            self.predicates.insert(p, n);
        }
        Ok(())
    }

    /// Checks that every application in `t` uses a declared symbol with the
    /// declared arity.
    pub fn check_term(&self, t: &Term) -> Result<()> {
        match t {
            Term::Var(_) => Ok(()),
            Term::App(f, args) => {
                match self.arity(*f) {
                    None => return Err(Error::UnknownSymbol(f.to_string())),
                    Some(n) if n != args.len() => {
                        return Err(Error::Arity {
                            symbol: f.to_string(),
                            expected: n,
                            found: args.len(),
                        })
                    }
                    _ => {}
                }
                args.iter().try_for_each(|a| self.check_term(a))
            }
        }
    }

    /// Makes sure the tupling constructor of the given arity is declared.
    pub fn ensure_tuple(&mut self, arity: usize) -> Sym {
        let sym = tuple_symbol(arity);
        self.add_symbol(sym, arity, true)
            .expect("tuple symbol already declared with a different arity");
        sym
    }
}

/// A first-order term: a variable or a symbol applied to argument terms.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Sym),
    App(Sym, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(Sym::new(name))
    }

    pub fn constant(name: &str) -> Term {
        Term::App(Sym::new(name), Vec::new())
    }

    pub fn app(name: &str, args: Vec<Term>) -> Term {
        Term::App(Sym::new(name), args)
    }

    pub fn tuple(items: Vec<Term>) -> Term {
        Term::App(tuple_symbol(items.len()), items)
    }

    /// `s^n(0)`, the Peano numeral for `n`.
    pub fn numeral(n: usize) -> Term {
        let mut t = Term::constant("0");
        for _ in 0..n {
            t = Term::App(Sym::new("s"), vec![t]);
        }
        t
    }

    /// Inverse of [`Term::numeral`].
    pub fn as_numeral(&self) -> Option<usize> {
        let mut n = 0;
        let mut cur = self;
        loop {
            match cur {
                Term::App(f, args) if args.is_empty() && f.as_str() == "0" => return Some(n),
                Term::App(f, args) if args.len() == 1 && f.as_str() == "s" => {
                    n += 1;
                    cur = &args[0];
                }
                _ => return None,
            }
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn head(&self) -> Sym {
        match self {
            Term::Var(x) => *x,
            Term::App(f, _) => *f,
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Var(_) => &[],
            Term::App(_, args) => args,
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn size(&self) -> usize {
        1 + self.args().iter().map(Term::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.args().iter().map(Term::depth).max().unwrap_or(0)
    }

    pub fn vars(&self) -> BTreeSet<Sym> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Sym>) {
        match self {
            Term::Var(x) => {
                out.insert(*x);
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Variables in order of first occurrence (left to right, depth first).
    pub fn vars_in_order(&self) -> Vec<Sym> {
        fn walk(t: &Term, seen: &mut Vec<Sym>) {
            match t {
                Term::Var(x) => {
                    if !seen.contains(x) {
                        seen.push(*x);
                    }
                }
                Term::App(_, args) => args.iter().for_each(|a| walk(a, seen)),
            }
        }
        let mut seen = Vec::new();
        walk(self, &mut seen);
        seen
    }

    /// All function symbols occurring in the term.
    pub fn symbols(&self) -> BTreeSet<Sym> {
        fn walk(t: &Term, out: &mut BTreeSet<Sym>) {
            if let Term::App(f, args) = t {
                out.insert(*f);
                args.iter().for_each(|a| walk(a, out));
            }
        }
        let mut out = BTreeSet::new();
        walk(self, &mut out);
        out
    }

    /// Every subterm, outermost first.
    pub fn subterms(&self) -> Vec<&Term> {
        let mut out = vec![self];
        let mut i = 0;
        while i < out.len() {
            let t = out[i];
            out.extend(t.args().iter());
            i += 1;
        }
        out
    }

    /// Replaces variables according to `f`; unmapped variables stay.
    pub fn map_vars(&self, f: &impl Fn(Sym) -> Option<Term>) -> Term {
        match self {
            Term::Var(x) => f(*x).unwrap_or_else(|| self.clone()),
            Term::App(g, args) => Term::App(*g, args.iter().map(|a| a.map_vars(f)).collect()),
        }
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Deterministic total order used as the tie-break during enumeration:
/// variables before applications, then symbol name, then arguments
/// lexicographically.
impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Term::Var(x), Term::Var(y)) => x.cmp(y),
            (Term::Var(_), Term::App(..)) => Ordering::Less,
            (Term::App(..), Term::Var(_)) => Ordering::Greater,
            (Term::App(f, xs), Term::App(g, ys)) => f
                .cmp(g)
                .then_with(|| xs.len().cmp(&ys.len()))
                .then_with(|| xs.iter().cmp(ys.iter())),
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A finite map from variables to terms.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Substitution {
    bindings: BTreeMap<Sym, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, Term)>,
        S: Into<Sym>,
    {
        let mut s = Self::new();
        for (x, t) in pairs {
            s.insert(x.into(), t);
        }
        s
    }

    pub fn insert(&mut self, var: Sym, term: Term) -> Option<Term> {
        self.bindings.insert(var, term)
    }

    pub fn get(&self, var: Sym) -> Option<&Term> {
        self.bindings.get(&var)
    }

    pub fn domain(&self) -> impl Iterator<Item = Sym> + '_ {
        self.bindings.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Sym, &Term)> + '_ {
        self.bindings.iter().map(|(x, t)| (*x, t))
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn is_ground(&self) -> bool {
        self.bindings.values().all(Term::is_ground)
    }

    pub fn apply(&self, t: &Term) -> Term {
        apply_subst(t, self)
    }

    /// The substitution that applies `self` first and `then` afterwards.
    pub fn compose(&self, then: &Substitution) -> Substitution {
        compose(self, then)
    }

    /// Whether the substitution maps its domain injectively onto variables.
    pub fn is_renaming(&self) -> bool {
        let mut targets = HashSet::new();
        self.bindings
            .values()
            .all(|t| matches!(t, Term::Var(y) if targets.insert(*y)))
    }

    /// Inverse of a renaming; `None` if the substitution is not one.
    pub fn invert_renaming(&self) -> Option<Substitution> {
        if !self.is_renaming() {
            return None;
        }
        Some(Substitution::from_pairs(self.bindings.iter().map(
            |(x, t)| {
                let Term::Var(y) = t else { unreachable!() };
                (*y, Term::Var(*x))
            },
        )))
    }
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (x, t)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x} ↦ {t}")?;
        }
        f.write_str("}")
    }
}

pub fn apply_subst(t: &Term, s: &Substitution) -> Term {
    if s.is_empty() {
        return t.clone();
    }
    t.map_vars(&|x| s.get(x).cloned())
}

/// Composition: `apply(t, compose(s1, s2)) == apply(apply(t, s1), s2)`.
pub fn compose(s1: &Substitution, s2: &Substitution) -> Substitution {
    let mut out = Substitution::new();
    for (x, t) in s1.iter() {
        let image = apply_subst(t, s2);
        if image != Term::Var(x) {
            out.insert(x, image);
        }
    }
    for (y, t) in s2.iter() {
        if s1.get(y).is_none() && *t != Term::Var(y) {
            out.insert(y, t.clone());
        }
    }
    out
}

/// One-sided syntactic matching: the minimal `σ` with `pattern σ = target`.
pub fn match_syntactic(pattern: &Term, target: &Term) -> Option<Substitution> {
    fn go(p: &Term, t: &Term, acc: &mut Substitution) -> bool {
        match p {
            Term::Var(x) => match acc.get(*x) {
                Some(bound) => bound == t,
                None => {
                    acc.insert(*x, t.clone());
                    true
                }
            },
            Term::App(f, ps) => match t {
                Term::App(g, ts) if f == g && ps.len() == ts.len() => {
                    ps.iter().zip(ts).all(|(p, t)| go(p, t, acc))
                }
                _ => false,
            },
        }
    }
    let mut acc = Substitution::new();
    go(pattern, target, &mut acc).then_some(acc)
}

/// Whether `general` can be instantiated to `specific`.
pub fn generalizes(general: &Term, specific: &Term) -> bool {
    match_syntactic(general, specific).is_some()
}

/// Canonical name for the variable abstracting the tuple `parts`.
pub fn generalization_var_name(parts: &[Term]) -> Sym {
    let inner: Vec<String> = parts.iter().map(|t| t.to_string()).collect();
    Sym::new(&format!("v_{{{}}}", inner.join(",")))
}

/// Most specific common generalization of a nonempty list of terms.
///
/// Variables are named `v_{t1,...,tn}` after the subterms they abstract, so
/// the same tuple of disagreeing subterms is always mapped to one variable.
pub fn lgg_syntactic(terms: &[Term]) -> (Term, Vec<Substitution>) {
    assert!(!terms.is_empty(), "lgg of an empty list");
    let mut table: HashMap<Vec<Term>, Sym> = HashMap::new();
    let mut substs = vec![Substitution::new(); terms.len()];
    let refs: Vec<&Term> = terms.iter().collect();
    let g = lgg_rec(&refs, &mut table, &mut substs);
    (g, substs)
}

fn lgg_rec(
    terms: &[&Term],
    table: &mut HashMap<Vec<Term>, Sym>,
    substs: &mut [Substitution],
) -> Term {
    let first = terms[0];
    if terms.iter().all(|t| *t == first) {
        return first.clone();
    }
    if let Term::App(f, args) = first {
        let same_head = terms
            .iter()
            .all(|t| matches!(t, Term::App(g, a) if g == f && a.len() == args.len()));
        if same_head {
            let children = (0..args.len())
                .map(|i| {
                    let column: Vec<&Term> = terms.iter().map(|t| &t.args()[i]).collect();
                    lgg_rec(&column, table, substs)
                })
                .collect();
            return Term::App(*f, children);
        }
    }
    let key: Vec<Term> = terms.iter().map(|t| (*t).clone()).collect();
    let var = *table
        .entry(key.clone())
        .or_insert_with(|| generalization_var_name(&key));
    for (s, t) in substs.iter_mut().zip(key) {
        s.insert(var, t);
    }
    Term::Var(var)
}

/// True iff every symbol of `t` is a constructor of `sig`.
pub fn is_constructor_term(t: &Term, sig: &Signature) -> bool {
    match t {
        Term::Var(_) => true,
        Term::App(f, args) => {
            sig.is_constructor(*f) && args.iter().all(|a| is_constructor_term(a, sig))
        }
    }
}

/// Equality up to a consistent bijective renaming of variables.
pub fn alpha_equivalent(a: &Term, b: &Term) -> bool {
    fn go(a: &Term, b: &Term, fwd: &mut HashMap<Sym, Sym>, bwd: &mut HashMap<Sym, Sym>) -> bool {
        match (a, b) {
            (Term::Var(x), Term::Var(y)) => {
                let f = *fwd.entry(*x).or_insert(*y);
                let g = *bwd.entry(*y).or_insert(*x);
                f == *y && g == *x
            }
            (Term::App(f, xs), Term::App(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| go(x, y, fwd, bwd))
            }
            _ => false,
        }
    }
    go(a, b, &mut HashMap::new(), &mut HashMap::new())
}

/// The variable renaming mapping `a` onto `b`, if they are alpha-equivalent.
pub fn renaming_between(a: &Term, b: &Term) -> Option<Substitution> {
    if !alpha_equivalent(a, b) {
        return None;
    }
    match_syntactic(a, b)
}
