//! Equational theories: a small text format, the built-in theories, and
//! compilation into class grammars.
//!
//! ```text
//! sig plus/2, s/1 ctor, 0/0 ctor
//! eq plus(X, 0) = X
//! eq plus(X, s(Y)) = s(plus(X, Y))
//! carrier peano 0..6 absorb ops +,*
//! builtin lists b,c len<=4 ops ap,rv
//! nf-size 7
//! ```
//!
//! `eq` lines are oriented left to right for rewriting; `axiom` lines are
//! used by ground congruence closure only. Identifiers starting with an
//! uppercase letter or `v` are variables.

use crate::carriers::{self, CarrierSpec};
use crate::congruence::{finite_quotient, from_convergent_rs, from_ground_equations, ClassGrammar};
use crate::error::{Error, Result};
use crate::rewrite::{RewriteRule, RewriteSystem};
use crate::syntax::{parse_term_with, ParseOptions};
use crate::term::{Signature, Sym, Term};

/// Default size bound on normal forms for theories given by a convergent
/// rewrite system.
pub const DEFAULT_NF_SIZE: usize = 7;

const STEP_LIMIT: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Carrier {
    Peano {
        bound: u64,
        absorb: bool,
        ops: Vec<String>,
    },
    Booleans {
        ops: Vec<String>,
    },
    Words {
        letters: Vec<String>,
        max_len: usize,
    },
    Lists {
        letters: Vec<String>,
        max_len: usize,
        ops: Vec<String>,
    },
    Cube,
    Attributes {
        values: Vec<String>,
    },
}

fn strs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

impl Carrier {
    pub fn spec(&self) -> Result<CarrierSpec> {
        match self {
            Carrier::Peano { bound, absorb, ops } => carriers::peano(*bound, *absorb, &strs(ops)),
            Carrier::Booleans { ops } => carriers::booleans(&strs(ops)),
            Carrier::Words { letters, max_len } => carriers::words(&strs(letters), *max_len),
            Carrier::Lists {
                letters,
                max_len,
                ops,
            } => carriers::lists(&strs(letters), *max_len, &strs(ops)),
            Carrier::Cube => Ok(carriers::cube()),
            Carrier::Attributes { values } => carriers::attributes(&strs(values)),
        }
    }

    /// Replaces the size parameter: the largest number for Peano, the
    /// longest word or list otherwise.
    pub fn with_bound(self, bound: u64) -> Carrier {
        match self {
            Carrier::Peano { absorb, ops, .. } => Carrier::Peano { bound, absorb, ops },
            Carrier::Words { letters, .. } => Carrier::Words {
                letters,
                max_len: bound as usize,
            },
            Carrier::Lists { letters, ops, .. } => Carrier::Lists {
                letters,
                max_len: bound as usize,
                ops,
            },
            other => other,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    pub lhs: Term,
    pub rhs: Term,
    /// Usable as the rewrite rule `lhs -> rhs`.
    pub oriented: bool,
}

#[derive(Clone, Debug, Default)]
pub struct EquationalTheory {
    pub name: String,
    pub signature: Signature,
    pub equations: Vec<Equation>,
    pub carrier: Option<Carrier>,
    pub nf_size: Option<usize>,
}

/// Names accepted by [`EquationalTheory::builtin`].
pub const BUILTIN_NAMES: &[&str] = &[
    "peano",
    "peano-if",
    "peano-div",
    "peano-lt",
    "peano-maxmin",
    "peano-dp",
    "bool",
    "words",
    "lists",
    "lists-ln",
    "cube",
];

fn rules(text: &[(&str, &str)]) -> Vec<Equation> {
    text.iter()
        .map(|(l, r)| Equation {
            lhs: parse_term_with(l, &ParseOptions::new()).expect("built-in rule"),
            rhs: parse_term_with(r, &ParseOptions::new()).expect("built-in rule"),
            oriented: true,
        })
        .collect()
}

const PLUS_TIMES: &[(&str, &str)] = &[
    ("vx+0", "vx"),
    ("vx+s(vy)", "s(vx+vy)"),
    ("vx*0", "0"),
    ("vx*s(vy)", "vx*vy+vx"),
];

const IF_EV: &[(&str, &str)] = &[
    ("if(0,vy,vz)", "vz"),
    ("if(s(vx),vy,vz)", "vy"),
    ("ev(0)", "s(0)"),
    ("ev(s(0))", "0"),
    ("ev(s(s(vx)))", "ev(vx)"),
];

const DP: &[(&str, &str)] = &[("dp(0)", "0"), ("dp(s(vx))", "s(s(dp(vx)))")];

const MINUS: &[(&str, &str)] = &[("vx-0", "vx"), ("0-vx", "0"), ("s(vx)-s(vy)", "vx-vy")];

const LESS: &[(&str, &str)] = &[("vx<0", "0"), ("0<s(vy)", "s(0)"), ("s(vx)<s(vy)", "vx<vy")];

const MAX_MIN: &[(&str, &str)] = &[
    ("max(0,vy)", "vy"),
    ("max(s(vx),0)", "s(vx)"),
    ("max(s(vx),s(vy))", "s(max(vx,vy))"),
    ("min(0,vy)", "0"),
    ("min(s(vx),0)", "0"),
    ("min(s(vx),s(vy))", "s(min(vx,vy))"),
];

const LIST_RULES: &[(&str, &str)] = &[
    ("ap(nil,vy)", "vy"),
    ("ap(cons(vx,vy),vz)", "cons(vx,ap(vy,vz))"),
    ("rv(nil)", "nil"),
    ("rv(cons(vx,vy))", "ap(rv(vy),cons(vx,nil))"),
];

const LENGTH_RULES: &[(&str, &str)] = &[
    ("ln(nil)", "0"),
    ("ln(cons(vx,vy))", "s(ln(vy))"),
    ("vx+0", "vx"),
    ("vx+s(vy)", "s(vx+vy)"),
];

fn owned(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

impl EquationalTheory {
    /// A built-in theory; `bound` overrides the default carrier size.
    pub fn builtin(name: &str, bound: Option<u64>) -> Result<EquationalTheory> {
        let peano = |ops: &[&str], default: u64| Carrier::Peano {
            bound: bound.unwrap_or(default),
            absorb: true,
            ops: owned(ops),
        };
        let (carrier, eqs): (Carrier, Vec<Equation>) = match name {
            "peano" => (peano(&["+", "*"], 6), rules(PLUS_TIMES)),
            "peano-if" => (
                peano(&["+", "*", "if", "ev"], 6),
                [rules(PLUS_TIMES), rules(IF_EV)].concat(),
            ),
            "peano-div" => (
                peano(&["+", "-", "*", "/", "//", "mod"], 6),
                [rules(PLUS_TIMES), rules(MINUS)].concat(),
            ),
            "peano-lt" => (
                peano(&["+", "*", "<"], 6),
                [rules(PLUS_TIMES), rules(LESS)].concat(),
            ),
            "peano-maxmin" => (
                peano(&["+", "*", "<", "max", "min"], 6),
                [rules(PLUS_TIMES), rules(LESS), rules(MAX_MIN)].concat(),
            ),
            "peano-dp" => (
                peano(&["+", "*", "dp"], 6),
                [rules(PLUS_TIMES), rules(DP)].concat(),
            ),
            "bool" => (
                Carrier::Booleans {
                    ops: owned(&["not", "and", "or", "imp"]),
                },
                Vec::new(),
            ),
            "words" => (
                Carrier::Words {
                    letters: owned(&["b", "d"]),
                    max_len: bound.unwrap_or(3) as usize,
                },
                Vec::new(),
            ),
            "lists" => (
                Carrier::Lists {
                    letters: owned(&["a", "b"]),
                    max_len: bound.unwrap_or(3) as usize,
                    ops: owned(&["ap", "rv"]),
                },
                rules(LIST_RULES),
            ),
            "lists-ln" => (
                Carrier::Lists {
                    letters: owned(&["a", "b"]),
                    max_len: bound.unwrap_or(3) as usize,
                    ops: owned(&["ap", "rv", "ln"]),
                },
                [rules(LIST_RULES), rules(LENGTH_RULES)].concat(),
            ),
            "cube" => (Carrier::Cube, Vec::new()),
            other => {
                return Err(Error::Theory(format!(
                    "unknown built-in theory `{other}` (known: {})",
                    BUILTIN_NAMES.join(", ")
                )))
            }
        };
        let signature = carrier.spec()?.signature;
        Ok(EquationalTheory {
            name: name.to_owned(),
            signature,
            equations: eqs,
            carrier: Some(carrier),
            nf_size: None,
        })
    }

    pub fn parse(text: &str) -> Result<EquationalTheory> {
        let mut theory = EquationalTheory {
            name: "file".into(),
            ..Default::default()
        };
        let mut pending: Vec<(usize, String, bool)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            match keyword {
                "sig" => {
                    for decl in rest.split(',').map(str::trim).filter(|d| !d.is_empty()) {
                        let (name_arity, ctor) = match decl.strip_suffix("ctor") {
                            Some(d) => (d.trim(), true),
                            None => (decl, false),
                        };
                        let (name, arity) = name_arity.rsplit_once('/').ok_or_else(|| {
                            Error::parse(
                                lineno,
                                1,
                                format!("expected `name/arity`, found `{decl}`"),
                            )
                        })?;
                        let arity: usize = arity.trim().parse().map_err(|_| {
                            Error::parse(lineno, 1, format!("bad arity in `{decl}`"))
                        })?;
                        theory
                            .signature
                            .add_symbol(Sym::new(name.trim()), arity, ctor)?;
                    }
                }
                "eq" | "axiom" => pending.push((lineno, rest.to_owned(), keyword == "eq")),
                "carrier" | "builtin" => {
                    let carrier = parse_carrier(rest).map_err(|m| Error::parse(lineno, 1, m))?;
                    theory.signature.merge(&carrier.spec()?.signature)?;
                    theory.carrier = Some(carrier);
                }
                "nf-size" => {
                    theory.nf_size = Some(
                        rest.parse()
                            .map_err(|_| Error::parse(lineno, 1, format!("bad size `{rest}`")))?,
                    );
                }
                "name" => theory.name = rest.to_owned(),
                other => {
                    return Err(Error::parse(
                        lineno,
                        1,
                        format!("unknown directive `{other}`"),
                    ))
                }
            }
        }
        let mut options = Self::options_for(&theory.signature);
        options.uppercase_vars = true;
        for (lineno, text, oriented) in pending {
            let (l, r) = text
                .split_once(" = ")
                .or_else(|| text.split_once('='))
                .ok_or_else(|| Error::parse(lineno, 1, "expected `lhs = rhs`"))?;
            let at = |e: Error| match e {
                Error::Parse {
                    column, message, ..
                } => Error::parse(lineno, column, message),
                other => other,
            };
            let lhs = parse_term_with(l, &options).map_err(at)?;
            let rhs = parse_term_with(r, &options).map_err(at)?;
            theory.signature.check_term(&lhs)?;
            theory.signature.check_term(&rhs)?;
            theory.equations.push(Equation { lhs, rhs, oriented });
        }
        Ok(theory)
    }

    fn options_for(sig: &Signature) -> ParseOptions {
        ParseOptions::new().with_signature(sig)
    }

    /// Parse options for terms over this theory: its constants stay
    /// constants, `v`-prefixed names are variables.
    pub fn parse_options(&self) -> ParseOptions {
        Self::options_for(&self.signature)
    }

    pub fn parse_term(&self, text: &str) -> Result<Term> {
        let t = parse_term_with(text, &self.parse_options())?;
        self.signature.check_term(&t)?;
        Ok(t)
    }

    /// The oriented equations as rewrite rules.
    pub fn rewrite_system(&self) -> Result<RewriteSystem> {
        let rules = self
            .equations
            .iter()
            .filter(|e| e.oriented)
            .map(|e| RewriteRule::new(e.lhs.clone(), e.rhs.clone()))
            .collect::<Result<Vec<_>>>()?;
        Ok(RewriteSystem::new(rules))
    }

    /// The class grammar: from the carrier if one is given, by congruence
    /// closure if all equations are ground, and otherwise from the oriented
    /// equations read as a convergent rewrite system.
    pub fn compile(&self) -> Result<ClassGrammar> {
        if let Some(carrier) = &self.carrier {
            return finite_quotient(&carrier.spec()?);
        }
        if self
            .equations
            .iter()
            .all(|e| e.lhs.is_ground() && e.rhs.is_ground())
        {
            let eqs: Vec<(Term, Term)> = self
                .equations
                .iter()
                .map(|e| (e.lhs.clone(), e.rhs.clone()))
                .collect();
            return Ok(from_ground_equations(&self.signature, &eqs)?.0);
        }
        if let Some(e) = self
            .equations
            .iter()
            .find(|e| !e.oriented && !(e.lhs.is_ground() && e.rhs.is_ground()))
        {
            return Err(Error::Theory(format!(
                "axiom `{} = {}` has variables; only oriented `eq` lines may",
                e.lhs, e.rhs
            )));
        }
        from_convergent_rs(
            &self.signature,
            &self.rewrite_system()?,
            self.nf_size.unwrap_or(DEFAULT_NF_SIZE),
            STEP_LIMIT,
        )
    }
}

fn parse_list(text: &str) -> Vec<String> {
    text.split(',')
        .map(|s| s.trim().to_owned())
        .filter(|s| !s.is_empty())
        .collect()
}

/// `peano 0..6 absorb ops +,*`, `bool ops not,and`, `words b,d len<=3`,
/// `lists b,c len<=4 ops ap,rv`, `cube`, `attributes red,blue`.
fn parse_carrier(text: &str) -> std::result::Result<Carrier, String> {
    let mut words: Vec<&str> = text.split_whitespace().collect();
    if words.is_empty() {
        return Err("missing carrier kind".into());
    }
    let kind = words.remove(0);
    let mut ops: Option<Vec<String>> = None;
    let mut len: Option<usize> = None;
    let mut range: Option<u64> = None;
    let mut absorb = false;
    let mut items: Option<Vec<String>> = None;
    let mut i = 0;
    while i < words.len() {
        let w = words[i];
        if w == "ops" {
            let list = words.get(i + 1).ok_or("`ops` needs a list")?;
            ops = Some(parse_list(list));
            i += 2;
            continue;
        }
        if w == "absorb" {
            absorb = true;
        } else if let Some(n) = w.strip_prefix("len<=") {
            len = Some(n.parse().map_err(|_| format!("bad length `{n}`"))?);
        } else if let Some((lo, hi)) = w.split_once("..") {
            if lo != "0" {
                return Err(format!("ranges start at 0, found `{w}`"));
            }
            range = Some(hi.parse().map_err(|_| format!("bad bound `{hi}`"))?);
        } else if items.is_none() {
            items = Some(parse_list(w));
        } else {
            return Err(format!("unexpected `{w}`"));
        }
        i += 1;
    }
    Ok(match kind {
        "peano" => Carrier::Peano {
            bound: range.ok_or("peano needs a range `0..N`")?,
            absorb,
            ops: ops.unwrap_or_else(|| owned(&["+", "*"])),
        },
        "bool" => Carrier::Booleans {
            ops: ops.unwrap_or_else(|| owned(&["not", "and", "or", "imp"])),
        },
        "words" => Carrier::Words {
            letters: items.ok_or("words needs letters")?,
            max_len: len.unwrap_or(3),
        },
        "lists" => Carrier::Lists {
            letters: items.ok_or("lists needs element constants")?,
            max_len: len.unwrap_or(3),
            ops: ops.unwrap_or_else(|| owned(&["ap", "rv"])),
        },
        "cube" => Carrier::Cube,
        "attributes" => Carrier::Attributes {
            values: items.unwrap_or_default(),
        },
        other => return Err(format!("unknown carrier `{other}`")),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn carrier_directive() {
        let th = EquationalTheory::parse("carrier peano 0..4 absorb ops +,*\n").unwrap();
        assert_eq!(
            th.carrier,
            Some(Carrier::Peano {
                bound: 4,
                absorb: true,
                ops: owned(&["+", "*"])
            })
        );
        let cg = th.compile().unwrap();
        assert_eq!(cg.classes.len(), 6);
    }

    #[test]
    fn rewrite_theory() {
        let text = "sig plus/2, s/1 ctor, 0/0 ctor\neq plus(X,0) = X\neq plus(X,s(Y)) = s(plus(X,Y))\nnf-size 4\n";
        let th = EquationalTheory::parse(text).unwrap();
        assert_eq!(th.equations.len(), 2);
        let rs = th.rewrite_system().unwrap();
        let t = th.parse_term("plus(s(0),s(0))").unwrap();
        assert_eq!(rs.normalize(&t, 100).unwrap(), Term::numeral(2));
        let mut cg = th.compile().unwrap();
        let a = cg.class_nt_of(&t).unwrap();
        let b = cg.class_nt_of(&Term::numeral(2)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ground_theory() {
        let th = EquationalTheory::parse("sig a/0, b/0, f/1\naxiom f(a) = b\n").unwrap();
        let mut cg = th.compile().unwrap();
        let fa = cg.class_nt_of(&th.parse_term("f(a)").unwrap()).unwrap();
        let b = cg.class_nt_of(&th.parse_term("b").unwrap()).unwrap();
        assert_eq!(fa, b);
    }

    #[test]
    fn errors_carry_lines() {
        let err = EquationalTheory::parse("sig a/0\nfrobnicate\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!(EquationalTheory::parse("eq q(X) = X\n").is_err());
        assert!(matches!(
            EquationalTheory::builtin("nope", None),
            Err(Error::Theory(_))
        ));
    }

    #[test]
    fn builtins_compile() {
        for name in BUILTIN_NAMES {
            let th = EquationalTheory::builtin(name, Some(3)).unwrap();
            th.compile().unwrap();
            th.rewrite_system().unwrap();
        }
    }
}
