//! Regular tree grammars with one rule per nonterminal, and their text format.

use std::collections::{BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::syntax::{infix_info, parse_term_with, ParseOptions};
use crate::term::{tuple_arity, Signature, Sym, Term};

/// Nonterminal handle, an index into the owning grammar.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Nt(pub u32);

impl Nt {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Right-hand side alternative of a rule.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Alt {
    /// `f(N1, ..., Nk)`; constants have no arguments.
    App(Sym, Vec<Nt>),
    /// A variable produced as a leaf (only in lifted grammars).
    Leaf(Sym),
}

impl Alt {
    pub fn letter(&self) -> Letter {
        match self {
            Alt::App(f, args) => Letter::Sym(*f, args.len()),
            Alt::Leaf(x) => Letter::Leaf(*x),
        }
    }

    pub fn args(&self) -> &[Nt] {
        match self {
            Alt::App(_, args) => args,
            Alt::Leaf(_) => &[],
        }
    }
}

/// The label of a tree node as seen by automaton algorithms. Variable leaves
/// behave like extra constants.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Letter {
    Sym(Sym, usize),
    Leaf(Sym),
}

impl Letter {
    pub fn arity(self) -> usize {
        match self {
            Letter::Sym(_, n) => n,
            Letter::Leaf(_) => 0,
        }
    }

    pub fn of_term(t: &Term) -> Letter {
        match t {
            Term::Var(x) => Letter::Leaf(*x),
            Term::App(f, args) => Letter::Sym(*f, args.len()),
        }
    }

    pub fn make_alt(self, args: Vec<Nt>) -> Alt {
        match self {
            Letter::Sym(f, _) => Alt::App(f, args),
            Letter::Leaf(x) => Alt::Leaf(x),
        }
    }
}

/// A regular tree grammar `⟨Σ, NT, R⟩` with exactly one rule per nonterminal.
#[derive(Clone, Debug, Default)]
pub struct TreeGrammar {
    sig: Signature,
    names: Vec<String>,
    by_name: HashMap<String, Nt>,
    rules: Vec<Vec<Alt>>,
}

impl TreeGrammar {
    pub fn new(sig: Signature) -> Self {
        TreeGrammar {
            sig,
            ..Default::default()
        }
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn signature_mut(&mut self) -> &mut Signature {
        &mut self.sig
    }

    /// Adds a nonterminal with an empty rule. Name clashes are resolved by
    /// appending primes.
    pub fn add_nonterminal(&mut self, name: &str) -> Nt {
        let mut name = name.to_owned();
        while self.by_name.contains_key(&name) {
            name.push('\'');
        }
        let nt = Nt(self.names.len() as u32);
        self.by_name.insert(name.clone(), nt);
        self.names.push(name);
        self.rules.push(Vec::new());
        nt
    }

    /// Adds an alternative unless it is already present.
    pub fn add_alt(&mut self, nt: Nt, alt: Alt) {
        let rule = &mut self.rules[nt.index()];
        if !rule.contains(&alt) {
            rule.push(alt);
        }
    }

    /// Adds an alternative without the duplicate check; callers guarantee
    /// uniqueness.
    pub fn push_alt(&mut self, nt: Nt, alt: Alt) {
        self.rules[nt.index()].push(alt);
    }

    pub fn set_rule(&mut self, nt: Nt, alts: Vec<Alt>) {
        self.rules[nt.index()] = alts;
    }

    pub fn rule(&self, nt: Nt) -> &[Alt] {
        &self.rules[nt.index()]
    }

    pub fn name(&self, nt: Nt) -> &str {
        &self.names[nt.index()]
    }

    pub fn nt(&self, name: &str) -> Option<Nt> {
        self.by_name.get(name).copied()
    }

    /// Like [`TreeGrammar::nt`] but reports unknown names as errors.
    pub fn lookup(&self, name: &str) -> Result<Nt> {
        self.nt(name)
            .ok_or_else(|| Error::UnknownNonterminal(name.to_owned()))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn nonterminals(&self) -> impl Iterator<Item = Nt> {
        (0..self.names.len() as u32).map(Nt)
    }

    /// Total number of alternatives, the usual size measure `|G|`.
    pub fn size(&self) -> usize {
        self.rules.iter().map(Vec::len).sum()
    }

    pub fn letters(&self) -> BTreeSet<Letter> {
        self.rules.iter().flatten().map(Alt::letter).collect()
    }

    /// Variables occurring as leaves anywhere in the grammar.
    pub fn leaves(&self) -> BTreeSet<Sym> {
        self.rules
            .iter()
            .flatten()
            .filter_map(|a| match a {
                Alt::Leaf(x) => Some(*x),
                Alt::App(..) => None,
            })
            .collect()
    }

    /// Copies every rule of `other` into `self` under fresh nonterminals and
    /// returns the mapping from `other`'s nonterminals.
    pub fn import(&mut self, other: &TreeGrammar) -> Result<Vec<Nt>> {
        self.sig.merge(&other.sig)?;
        let map: Vec<Nt> = other
            .nonterminals()
            .map(|n| self.add_nonterminal(other.name(n)))
            .collect();
        for n in other.nonterminals() {
            let alts = other
                .rule(n)
                .iter()
                .map(|a| match a {
                    Alt::App(f, args) => {
                        Alt::App(*f, args.iter().map(|c| map[c.index()]).collect())
                    }
                    Alt::Leaf(x) => Alt::Leaf(*x),
                })
                .collect();
            self.rules[map[n.index()].index()] = alts;
        }
        Ok(map)
    }

    /// Renders one alternative in the text format.
    pub fn alt_to_string(&self, alt: &Alt) -> String {
        match alt {
            Alt::Leaf(x) => x.to_string(),
            Alt::App(f, args) if args.is_empty() => f.to_string(),
            Alt::App(f, args) => {
                let names: Vec<&str> = args.iter().map(|a| self.name(*a)).collect();
                if args.len() >= 2 && tuple_arity(*f) == Some(args.len()) {
                    format!("({})", names.join(","))
                } else if args.len() == 2 && infix_info(*f).is_some() {
                    format!("{}{}{}", names[0], f, names[1])
                } else {
                    format!("{}({})", f, names.join(","))
                }
            }
        }
    }

    /// Parses the text format. Without a signature one is inferred from the
    /// alternatives.
    pub fn parse(text: &str, sig: Option<&Signature>) -> Result<TreeGrammar> {
        parse_grammar(text, sig)
    }
}

impl fmt::Display for TreeGrammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let leaves = self.leaves();
        if !leaves.is_empty() {
            let list: Vec<&str> = leaves.iter().map(|x| x.as_str()).collect();
            writeln!(f, "vars {}", list.join(", "))?;
        }
        for nt in self.nonterminals() {
            let mut line = String::new();
            write!(line, "{} ::=", self.name(nt))?;
            for (i, alt) in self.rule(nt).iter().enumerate() {
                line.push_str(if i == 0 { " " } else { " | " });
                line.push_str(&self.alt_to_string(alt));
            }
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn parse_grammar(text: &str, sig: Option<&Signature>) -> Result<TreeGrammar> {
    let mut declared_leaves: Option<BTreeSet<Sym>> = None;
    let mut rules: Vec<(usize, String, String)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("vars ") {
            let set = declared_leaves.get_or_insert_with(BTreeSet::new);
            set.extend(
                rest.split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(Sym::new),
            );
            continue;
        }
        let Some((lhs, rhs)) = line.split_once("::=") else {
            return Err(Error::parse(
                lineno + 1,
                1,
                "expected `NAME ::= alternatives`",
            ));
        };
        rules.push((lineno + 1, lhs.trim().to_owned(), rhs.trim().to_owned()));
    }

    let mut g = TreeGrammar::new(sig.cloned().unwrap_or_default());
    for (lineno, name, _) in &rules {
        if name.is_empty() || g.nt(name).is_some() {
            return Err(Error::parse(
                *lineno,
                1,
                format!("missing or duplicate nonterminal `{name}`"),
            ));
        }
        g.add_nonterminal(name);
    }
    let options = ParseOptions {
        all_bare_as_vars: true,
        ..Default::default()
    };
    for (idx, (lineno, _, rhs)) in rules.iter().enumerate() {
        let nt = Nt(idx as u32);
        if rhs.is_empty() {
            continue;
        }
        for piece in rhs.split('|') {
            let piece = piece.trim();
            let term = parse_term_with(piece, &options).map_err(|e| match e {
                Error::Parse {
                    column, message, ..
                } => Error::parse(*lineno, column, message),
                other => other,
            })?;
            let alt = interpret_alt(&g, &term, declared_leaves.as_ref(), sig.is_some())
                .map_err(|m| Error::parse(*lineno, 1, m))?;
            if let Alt::App(f, args) = &alt {
                if sig.is_some() {
                    match g.sig.arity(*f) {
                        Some(n) if n == args.len() => {}
                        Some(n) => {
                            return Err(Error::Arity {
                                symbol: f.to_string(),
                                expected: n,
                                found: args.len(),
                            })
                        }
                        None => return Err(Error::UnknownSymbol(f.to_string())),
                    }
                } else {
                    let ctor = tuple_arity(*f) == Some(args.len());
                    g.sig.add_symbol(*f, args.len(), ctor)?;
                }
            }
            g.add_alt(nt, alt);
        }
    }
    Ok(g)
}

fn interpret_alt(
    g: &TreeGrammar,
    term: &Term,
    declared_leaves: Option<&BTreeSet<Sym>>,
    have_sig: bool,
) -> std::result::Result<Alt, String> {
    match term {
        Term::Var(x) => {
            let is_leaf = match declared_leaves {
                Some(set) => set.contains(x),
                None => x.as_str().starts_with('v') && !(have_sig && g.sig.contains(*x)),
            };
            if is_leaf {
                Ok(Alt::Leaf(*x))
            } else if g.nt(x.as_str()).is_some() {
                Err(format!("chain rule to `{x}` is not supported"))
            } else {
                Ok(Alt::App(*x, Vec::new()))
            }
        }
        Term::App(f, args) => {
            let mut nts = Vec::with_capacity(args.len());
            for a in args {
                match a {
                    Term::Var(n) => match g.nt(n.as_str()) {
                        Some(nt) => nts.push(nt),
                        None => return Err(format!("unknown nonterminal `{n}`")),
                    },
                    other => return Err(format!("argument `{other}` is not a nonterminal")),
                }
            }
            Ok(Alt::App(*f, nts))
        }
    }
}
