//! Finite carriers: evaluation tables over named classes from which
//! congruence-class grammars are generated, plus the built-in theories
//! (Peano arithmetic, booleans, lists, words, cube rotations, attributes).

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::term::{Signature, Sym, Term};

/// Maps a symbol applied to argument classes to the result class, or
/// `None` where the operation is undefined.
pub type Evaluator = Arc<dyn Fn(Sym, &[usize]) -> Option<usize> + Send + Sync>;

/// A finite model with one class per element.
#[derive(Clone)]
pub struct CarrierSpec {
    pub signature: Signature,
    pub class_names: Vec<String>,
    /// Normal-form representative per class; classes without one (such as
    /// an absorbing overflow class) get the lightest term of their class.
    pub representatives: Vec<Option<Term>>,
    /// Index of the overflow class standing for all values beyond the
    /// carrier bound.
    pub absorbing: Option<usize>,
    pub evaluator: Evaluator,
}

impl fmt::Debug for CarrierSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CarrierSpec")
            .field("classes", &self.class_names)
            .field("absorbing", &self.absorbing)
            .finish()
    }
}

impl CarrierSpec {
    pub fn len(&self) -> usize {
        self.class_names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.class_names.is_empty()
    }

    pub fn eval(&self, sym: Sym, args: &[usize]) -> Option<usize> {
        (self.evaluator)(sym, args)
    }

    /// Evaluates a ground term bottom-up.
    pub fn eval_term(&self, t: &Term) -> Option<usize> {
        match t {
            Term::Var(_) => None,
            Term::App(f, args) => {
                let vals = args
                    .iter()
                    .map(|a| self.eval_term(a))
                    .collect::<Option<Vec<_>>>()?;
                self.eval(*f, &vals)
            }
        }
    }

    /// Class index by name.
    pub fn class(&self, name: &str) -> Option<usize> {
        self.class_names.iter().position(|n| n == name)
    }
}

/// Operators understood by the Peano carrier.
pub const PEANO_OPS: &[(&str, usize)] = &[
    ("+", 2),
    ("*", 2),
    ("-", 2),
    ("/", 2),
    ("//", 2),
    ("mod", 2),
    ("<", 2),
    ("=", 2),
    ("max", 2),
    ("min", 2),
    ("dp", 1),
    ("if", 3),
    ("ev", 1),
];

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Val {
    Num(u64),
    Top,
}

fn peano_apply(op: &str, args: &[Val]) -> Option<Val> {
    use Val::{Num, Top};
    let v = match (op, args) {
        ("0", []) => Num(0),
        ("s", [Num(a)]) => Num(a + 1),
        ("s", [Top]) => Top,
        ("+", [Num(a), Num(b)]) => Num(a + b),
        ("+", [_, _]) => Top,
        ("*", [Num(0), _]) | ("*", [_, Num(0)]) => Num(0),
        ("*", [Num(a), Num(b)]) => Num(a * b),
        ("*", [_, _]) => Top,
        ("-", [Num(a), Num(b)]) => Num(a.saturating_sub(*b)),
        ("-", [Num(_), Top]) => Num(0),
        ("-", [Top, Num(0)]) => Top,
        ("-", [Top, _]) => return None,
        ("/", [Num(a), Num(b)]) if *b != 0 && a % b == 0 => Num(a / b),
        ("/", [Num(0), Top]) => Num(0),
        ("/", [Top, Num(1)]) => Top,
        ("/", [_, _]) => return None,
        ("//", [Num(a), Num(b)]) if *b != 0 => Num(a / b),
        ("//", [Num(_), Top]) => Num(0),
        ("//", [Top, Num(1)]) => Top,
        ("//", [_, _]) => return None,
        ("mod", [Num(a), Num(b)]) if *b != 0 => Num(a % b),
        ("mod", [Num(a), Top]) => Num(*a),
        ("mod", [Top, Num(1)]) => Num(0),
        ("mod", [_, _]) => return None,
        ("<", [Num(a), Num(b)]) => Num(u64::from(a < b)),
        ("<", [Num(_), Top]) => Num(1),
        ("<", [Top, Num(_)]) => Num(0),
        ("<", [Top, Top]) => return None,
        ("=", [Num(a), Num(b)]) => Num(u64::from(a == b)),
        ("=", [Top, Top]) => return None,
        ("=", [_, _]) => Num(0),
        ("max", [Num(a), Num(b)]) => Num(*a.max(b)),
        ("max", [_, _]) => Top,
        ("min", [Num(a), Num(b)]) => Num(*a.min(b)),
        ("min", [Num(a), Top]) | ("min", [Top, Num(a)]) => Num(*a),
        ("min", [Top, Top]) => Top,
        ("dp", [Num(a)]) => Num(2 * a),
        ("dp", [Top]) => Top,
        ("ev", [Num(a)]) => Num(u64::from(a % 2 == 0)),
        ("ev", [Top]) => return None,
        ("if", [Num(0), _, z]) => *z,
        ("if", [_, y, _]) => *y,
        _ => return None,
    };
    Some(v)
}

/// Natural numbers `0..=bound` in `0`-`s` notation, optionally with an
/// absorbing class for all larger values, and the chosen operators.
pub fn peano(bound: u64, absorb: bool, ops: &[&str]) -> Result<CarrierSpec> {
    let mut sig = Signature::new().with("0", 0, true).with("s", 1, true);
    for op in ops {
        let Some((name, arity)) = PEANO_OPS.iter().find(|(n, _)| n == op) else {
            return Err(Error::Theory(format!(
                "operator `{op}` is not part of the peano carrier"
            )));
        };
        sig.add_symbol(Sym::new(name), *arity, false)?;
    }
    let n = bound as usize + 1;
    let mut class_names: Vec<String> = (0..n).map(|i| format!("N{i}")).collect();
    let mut representatives: Vec<Option<Term>> = (0..n).map(|i| Some(Term::numeral(i))).collect();
    let top = absorb.then_some(n);
    if absorb {
        class_names.push("Ntop".into());
        representatives.push(None);
    }
    let allowed: Vec<Sym> = sig.symbols().map(|(s, _)| s).collect();
    let evaluator: Evaluator = Arc::new(move |sym: Sym, args: &[usize]| {
        if !allowed.contains(&sym) {
            return None;
        }
        let vals: Vec<Val> = args
            .iter()
            .map(|a| {
                if Some(*a) == top {
                    Val::Top
                } else {
                    Val::Num(*a as u64)
                }
            })
            .collect();
        match peano_apply(sym.as_str(), &vals)? {
            Val::Num(v) if v <= bound => Some(v as usize),
            Val::Num(_) | Val::Top => top,
        }
    });
    Ok(CarrierSpec {
        signature: sig,
        class_names,
        representatives,
        absorbing: top,
        evaluator,
    })
}

/// Two-element boolean algebra with the chosen junctors among
/// `not`, `and`, `or`, `imp`, `eq`.
pub fn booleans(ops: &[&str]) -> Result<CarrierSpec> {
    let mut sig = Signature::new()
        .with("false", 0, true)
        .with("true", 0, true);
    for op in ops {
        let arity = match *op {
            "not" => 1,
            "and" | "or" | "imp" | "eq" => 2,
            other => return Err(Error::Theory(format!("unknown boolean junctor `{other}`"))),
        };
        sig.add_symbol(Sym::new(op), arity, false)?;
    }
    let allowed: Vec<Sym> = sig.symbols().map(|(s, _)| s).collect();
    let evaluator: Evaluator = Arc::new(move |sym: Sym, args: &[usize]| {
        if !allowed.contains(&sym) {
            return None;
        }
        let b = |i: usize| args[i] == 1;
        let r = match (sym.as_str(), args.len()) {
            ("false", 0) => false,
            ("true", 0) => true,
            ("not", 1) => !b(0),
            ("and", 2) => b(0) && b(1),
            ("or", 2) => b(0) || b(1),
            ("imp", 2) => !b(0) || b(1),
            ("eq", 2) => b(0) == b(1),
            _ => return None,
        };
        Some(usize::from(r))
    });
    Ok(CarrierSpec {
        signature: sig,
        class_names: vec!["Nfalse".into(), "Ntrue".into()],
        representatives: vec![Some(Term::constant("false")), Some(Term::constant("true"))],
        absorbing: None,
        evaluator,
    })
}

fn words_upto(letters: &[String], max_len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for i in 0..letters.len() {
                let mut v: Vec<usize> = w.clone();
                v.push(i);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn word_name(letters: &[String], w: &[usize]) -> String {
    if w.is_empty() {
        "ε".to_owned()
    } else {
        w.iter().map(|i| letters[*i].as_str()).collect()
    }
}

/// Free monoid over single-letter constants: words up to `max_len`, the
/// empty word `ε` and concatenation `a`.
pub fn words(letters: &[&str], max_len: usize) -> Result<CarrierSpec> {
    let letters: Vec<String> = letters.iter().map(|s| s.to_string()).collect();
    let mut sig = Signature::new().with("ε", 0, true).with("a", 2, false);
    for l in &letters {
        sig.add_symbol(Sym::new(l), 0, true)?;
    }
    let all = words_upto(&letters, max_len);
    let index: HashMap<Vec<usize>, usize> = all
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, w)| (w, i))
        .collect();
    let class_names = all
        .iter()
        .map(|w| format!("N_{}", word_name(&letters, w)))
        .collect();
    let representatives = all
        .iter()
        .map(|w| {
            let mut parts: Vec<Term> = w.iter().map(|i| Term::constant(&letters[*i])).collect();
            Some(match parts.len() {
                0 => Term::constant("ε"),
                _ => {
                    let mut t = parts.pop().unwrap();
                    while let Some(h) = parts.pop() {
                        t = Term::app("a", vec![h, t]);
                    }
                    t
                }
            })
        })
        .collect();
    let table = all.clone();
    let letter_syms: Vec<Sym> = letters.iter().map(|l| Sym::new(l)).collect();
    let evaluator: Evaluator =
        Arc::new(move |sym: Sym, args: &[usize]| match (sym.as_str(), args) {
            ("ε", []) => Some(0),
            ("a", [x, y]) => {
                let mut w = table[*x].clone();
                w.extend(&table[*y]);
                index.get(&w).copied()
            }
            (_, []) => letter_syms
                .iter()
                .position(|l| *l == sym)
                .map(|i| index[&vec![i]]),
            _ => None,
        });
    Ok(CarrierSpec {
        signature: sig,
        class_names,
        representatives,
        absorbing: None,
        evaluator,
    })
}

/// Cons lists over element constants, with `ap` (append), `rv` (reverse)
/// and `ln` (length into `0`-`s` numbers with `+`). Lists longer than
/// `max_len` are outside the carrier.
pub fn lists(letters: &[&str], max_len: usize, ops: &[&str]) -> Result<CarrierSpec> {
    let letters: Vec<String> = letters.iter().map(|s| s.to_string()).collect();
    let mut sig = Signature::new().with("nil", 0, true).with("cons", 2, true);
    for l in &letters {
        sig.add_symbol(Sym::new(l), 0, true)?;
    }
    let with_numbers = ops.contains(&"ln");
    for op in ops {
        let arity = match *op {
            "ap" => 2,
            "rv" | "ln" => 1,
            other => return Err(Error::Theory(format!("unknown list operator `{other}`"))),
        };
        sig.add_symbol(Sym::new(op), arity, false)?;
    }
    if with_numbers {
        sig.add_symbol(Sym::new("0"), 0, true)?;
        sig.add_symbol(Sym::new("s"), 1, true)?;
        sig.add_symbol(Sym::new("+"), 2, false)?;
    }
    let all = words_upto(&letters, max_len);
    let index: HashMap<Vec<usize>, usize> = all
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, w)| (w, i))
        .collect();
    // Class layout: elements, then lists, then numbers.
    let ne = letters.len();
    let nl = all.len();
    let nn = if with_numbers { max_len + 1 } else { 0 };
    let mut class_names: Vec<String> = letters.iter().map(|l| format!("E_{l}")).collect();
    class_names.extend(all.iter().map(|w| format!("L_{}", word_name(&letters, w))));
    class_names.extend((0..nn).map(|i| format!("N{i}")));
    let mut representatives: Vec<Option<Term>> =
        letters.iter().map(|l| Some(Term::constant(l))).collect();
    for w in &all {
        let mut t = Term::constant("nil");
        for i in w.iter().rev() {
            t = Term::app("cons", vec![Term::constant(&letters[*i]), t]);
        }
        representatives.push(Some(t));
    }
    representatives.extend((0..nn).map(|i| Some(Term::numeral(i))));
    let table = all.clone();
    let letter_syms: Vec<Sym> = letters.iter().map(|l| Sym::new(l)).collect();
    let allowed: Vec<Sym> = sig.symbols().map(|(s, _)| s).collect();
    let evaluator: Evaluator = Arc::new(move |sym: Sym, args: &[usize]| {
        if !allowed.contains(&sym) {
            return None;
        }
        let list = |c: usize| (ne..ne + nl).contains(&c).then(|| &table[c - ne]);
        let num = |c: usize| (ne + nl..ne + nl + nn).contains(&c).then(|| c - ne - nl);
        let of_list = |w: Vec<usize>| index.get(&w).map(|i| i + ne);
        let of_num = |n: usize| (n < nn).then_some(ne + nl + n);
        match (sym.as_str(), args) {
            ("nil", []) => Some(ne),
            ("cons", [e, l]) if *e < ne => {
                let mut w = vec![*e];
                w.extend(list(*l)?);
                of_list(w)
            }
            ("ap", [x, y]) => {
                let mut w = list(*x)?.clone();
                w.extend(list(*y)?);
                of_list(w)
            }
            ("rv", [x]) => of_list(list(*x)?.iter().rev().copied().collect()),
            ("ln", [x]) => of_num(list(*x)?.len()),
            ("0", []) => of_num(0),
            ("s", [x]) => of_num(num(*x)? + 1),
            ("+", [x, y]) => of_num(num(*x)? + num(*y)?),
            (_, []) => letter_syms.iter().position(|l| *l == sym),
            _ => None,
        }
    });
    Ok(CarrierSpec {
        signature: sig,
        class_names,
        representatives,
        absorbing: None,
        evaluator,
    })
}

type Matrix = [[i8; 3]; 3];

fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let mut out = [[0i8; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

/// Generators of the cube rotation group: quarter turns left/right about
/// the vertical axis, up/down about the lateral axis, clockwise and
/// counter-clockwise about the viewing axis.
fn cube_generators() -> Vec<(&'static str, Matrix)> {
    let rz: Matrix = [[0, -1, 0], [1, 0, 0], [0, 0, 1]];
    let rz_inv: Matrix = [[0, 1, 0], [-1, 0, 0], [0, 0, 1]];
    let rx: Matrix = [[1, 0, 0], [0, 0, -1], [0, 1, 0]];
    let rx_inv: Matrix = [[1, 0, 0], [0, 0, 1], [0, -1, 0]];
    let ry: Matrix = [[0, 0, 1], [0, 1, 0], [-1, 0, 0]];
    let ry_inv: Matrix = [[0, 0, -1], [0, 1, 0], [1, 0, 0]];
    vec![
        ("lf", rz),
        ("rg", rz_inv),
        ("up", rx),
        ("dn", rx_inv),
        ("cl", ry),
        ("cc", ry_inv),
    ]
}

/// The 24 orientations of a cube reachable from the initial orientation
/// `o` by the six named quarter turns.
pub fn cube() -> CarrierSpec {
    let gens = cube_generators();
    let identity: Matrix = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
    let mut elems: Vec<Matrix> = vec![identity];
    let mut reps: Vec<Term> = vec![Term::constant("o")];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for (name, g) in &gens {
            let m = mat_mul(g, &elems[i]);
            if !elems.contains(&m) {
                elems.push(m);
                reps.push(Term::app(name, vec![reps[i].clone()]));
                queue.push_back(elems.len() - 1);
            }
        }
    }
    let mut sig = Signature::new().with("o", 0, true);
    for (name, _) in &gens {
        sig.add_symbol(Sym::new(name), 1, false)
            .expect("fresh symbol");
    }
    let table = elems.clone();
    let evaluator: Evaluator = Arc::new(move |sym: Sym, args: &[usize]| {
        if sym.as_str() == "o" && args.is_empty() {
            return Some(0);
        }
        let (_, g) = gens.iter().find(|(n, _)| *n == sym.as_str())?;
        let m = mat_mul(g, &table[*args.first()?]);
        table.iter().position(|e| *e == m)
    });
    CarrierSpec {
        signature: sig,
        class_names: (0..elems.len()).map(|i| format!("C{i}")).collect(),
        representatives: reps.into_iter().map(Some).collect(),
        absorbing: None,
        evaluator,
    }
}

/// Attribute values as constants, with `=` comparing values into `y`/`n`
/// and the junctors `and`, `or`, `not` over `y`/`n`.
pub fn attributes(values: &[&str]) -> Result<CarrierSpec> {
    let mut names: Vec<String> = vec!["y".into(), "n".into()];
    for v in values {
        if !names.iter().any(|n| n == v) {
            names.push(v.to_string());
        }
    }
    let mut sig = Signature::new();
    for n in &names {
        sig.add_symbol(Sym::new(n), 0, true)?;
    }
    sig.add_symbol(Sym::new("="), 2, false)?;
    sig.add_symbol(Sym::new("and"), 2, false)?;
    sig.add_symbol(Sym::new("or"), 2, false)?;
    sig.add_symbol(Sym::new("not"), 1, false)?;
    let syms: Vec<Sym> = names.iter().map(|n| Sym::new(n)).collect();
    let evaluator: Evaluator = Arc::new(move |sym: Sym, args: &[usize]| {
        let yes = |b: bool| Some(if b { 0 } else { 1 });
        let boolean = |c: usize| (c < 2).then_some(c == 0);
        match (sym.as_str(), args) {
            ("=", [a, b]) => yes(a == b),
            ("and", [a, b]) => yes(boolean(*a)? && boolean(*b)?),
            ("or", [a, b]) => yes(boolean(*a)? || boolean(*b)?),
            ("not", [a]) => yes(!boolean(*a)?),
            (_, []) => syms.iter().position(|s| *s == sym),
            _ => None,
        }
    });
    Ok(CarrierSpec {
        signature: sig,
        class_names: names.iter().map(|n| format!("N_{n}")).collect(),
        representatives: names.iter().map(|n| Some(Term::constant(n))).collect(),
        absorbing: None,
        evaluator,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;

    #[test]
    fn peano_overflow_semantics() {
        let spec = peano(4, true, &["+", "*", "-", "if", "ev", "//", "mod", "/"]).unwrap();
        let top = spec.absorbing.unwrap();
        let ev = |s: &str| spec.eval_term(&parse_term(s).unwrap());
        assert_eq!(ev("2*2"), Some(4));
        assert_eq!(ev("3+2"), Some(top));
        assert_eq!(ev("0*(3+2)"), Some(0));
        assert_eq!(ev("(3+2)-1"), None);
        assert_eq!(ev("1-(3+2)"), Some(0));
        assert_eq!(ev("if(3+2,1,2)"), Some(1));
        assert_eq!(ev("if(0,1,2)"), Some(2));
        assert_eq!(ev("ev(2)"), Some(1));
        assert_eq!(ev("3//2"), Some(1));
        assert_eq!(ev("3/2"), None);
        assert_eq!(ev("4/2"), Some(2));
        assert_eq!(ev("mod(3,2)"), Some(1));
    }

    #[test]
    fn bounded_peano_is_partial() {
        let spec = peano(3, false, &["+"]).unwrap();
        assert_eq!(spec.eval_term(&parse_term("2+2").unwrap()), None);
        assert!(spec.absorbing.is_none());
    }

    #[test]
    fn boolean_tables() {
        let spec = booleans(&["and", "not"]).unwrap();
        let t = |s: &str| spec.eval_term(&parse_term(s).unwrap());
        assert_eq!(t("and(true,false)"), Some(0));
        assert_eq!(t("not(false)"), Some(1));
    }

    #[test]
    fn cube_group_has_24_elements() {
        let c = cube();
        assert_eq!(c.len(), 24);
        let t = |s: &str| c.eval_term(&parse_term(s).unwrap());
        // Conjugation identity relating the generators.
        assert_eq!(t("lf(cc(o))"), t("up(lf(o))"));
        assert_eq!(t("lf(rg(o))"), Some(0));
    }

    #[test]
    fn word_and_list_carriers() {
        let w = words(&["b"], 3).unwrap();
        assert_eq!(w.len(), 4);
        assert_eq!(w.class_names[2], "N_bb");
        let t = |s: &str| w.eval_term(&parse_term(s).unwrap());
        assert_eq!(t("a(a(b,ε),b)"), Some(2));
        assert_eq!(t("a(a(b,b),a(b,b))"), None);
        let l = lists(&["b", "c"], 2, &["ap", "rv", "ln"]).unwrap();
        let t = |s: &str| l.eval_term(&parse_term(s).unwrap());
        assert_eq!(t("rv(cons(b,cons(c,nil)))"), t("cons(c,cons(b,nil))"));
        assert_eq!(t("ln(cons(b,nil))"), t("s(0)"));
    }

    #[test]
    fn attribute_equality() {
        let a = attributes(&["sq", "oc"]).unwrap();
        let t = |s: &str| a.eval_term(&parse_term(s).unwrap());
        assert_eq!(t("sq=sq"), Some(0));
        assert_eq!(t("and(sq=oc,y)"), Some(1));
    }
}
