//! Text syntax for terms: a small Pratt-style parser with infix sugar and a
//! printer that emits the minimal number of parentheses.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::term::{tuple_arity, tuple_symbol, Signature, Sym, Term};

/// Binary operators written infix: (name, precedence level, left associative).
const INFIX: &[(&str, u8, bool)] = &[
    ("<", 0, false),
    ("=", 0, false),
    ("+", 1, true),
    ("-", 1, true),
    ("*", 2, true),
    ("/", 2, true),
    ("//", 2, true),
];

pub fn infix_info(sym: Sym) -> Option<(u8, bool)> {
    INFIX
        .iter()
        .find(|(name, _, _)| *name == sym.as_str())
        .map(|(_, level, left)| (*level, *left))
}

/// How bare identifiers (no argument list) are read.
#[derive(Clone, Debug, Default)]
pub struct ParseOptions {
    /// Names that are always variables.
    pub declared_vars: BTreeSet<Sym>,
    /// Known symbols; a bare identifier found here is a constant.
    pub signature: Option<Signature>,
    /// Read digit strings other than `0` as Peano numerals `s^n(0)`.
    pub numerals: bool,
    /// Treat identifiers starting with an uppercase letter as variables.
    pub uppercase_vars: bool,
    /// Read every bare identifier as a variable (used by the grammar reader).
    pub all_bare_as_vars: bool,
}

impl ParseOptions {
    pub fn new() -> Self {
        ParseOptions {
            numerals: true,
            ..Default::default()
        }
    }

    pub fn with_vars<I: IntoIterator<Item = Sym>>(mut self, vars: I) -> Self {
        self.declared_vars.extend(vars);
        self
    }

    pub fn with_signature(mut self, sig: &Signature) -> Self {
        self.signature = Some(sig.clone());
        self
    }

    fn is_variable(&self, name: &str) -> bool {
        let sym = Sym::new(name);
        if self.all_bare_as_vars || self.declared_vars.contains(&sym) {
            return true;
        }
        if self.signature.as_ref().is_some_and(|s| s.contains(sym)) {
            return false;
        }
        let first = name.chars().next().unwrap_or('0');
        first == 'v' || (self.uppercase_vars && first.is_uppercase())
    }
}

/// Parses a term with default options: `v`-prefixed identifiers are
/// variables, numerals are expanded.
pub fn parse_term(text: &str) -> Result<Term> {
    parse_term_with(text, &ParseOptions::new())
}

pub fn parse_term_with(text: &str, options: &ParseOptions) -> Result<Term> {
    let tokens = lex(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        options,
    };
    let term = parser.expr(0)?;
    parser.expect_end()?;
    Ok(term)
}

/// Parses a comma separated list of terms at top level.
pub fn parse_term_list(text: &str, options: &ParseOptions) -> Result<Vec<Term>> {
    let tokens = lex(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        options,
    };
    let mut out = vec![parser.expr(0)?];
    while parser.eat(&Tok::Comma) {
        out.push(parser.expr(0)?);
    }
    parser.expect_end()?;
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Op(&'static str),
    LParen,
    RParen,
    LAngle,
    RAngle,
    Comma,
    End,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '\'' | '.' | '^')
}

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1usize, 1usize);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        let mut advance = |n: usize, i: &mut usize| {
            for _ in 0..n {
                if chars[*i] == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
                *i += 1;
            }
        };
        if c.is_whitespace() {
            advance(1, &mut i);
            continue;
        }
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '⟨' => Tok::LAngle,
            '⟩' => Tok::RAngle,
            ',' => Tok::Comma,
            '+' => Tok::Op("+"),
            '-' => Tok::Op("-"),
            '*' => Tok::Op("*"),
            '<' => Tok::Op("<"),
            '=' => Tok::Op("="),
            '/' if chars.get(i + 1) == Some(&'/') => {
                out.push(Spanned {
                    tok: Tok::Op("//"),
                    line: start_line,
                    column: start_col,
                });
                advance(2, &mut i);
                continue;
            }
            '/' => Tok::Op("/"),
            c if is_ident_char(c) => {
                let mut name = String::new();
                let mut j = i;
                while j < chars.len() && is_ident_char(chars[j]) {
                    name.push(chars[j]);
                    j += 1;
                    if chars[j - 1] == '_' && chars.get(j) == Some(&'{') {
                        let mut depth = 0usize;
                        loop {
                            let Some(&d) = chars.get(j) else {
                                return Err(Error::parse(
                                    start_line,
                                    start_col,
                                    "unclosed `{` in identifier",
                                ));
                            };
                            name.push(d);
                            j += 1;
                            match d {
                                '{' => depth += 1,
                                '}' => {
                                    depth -= 1;
                                    if depth == 0 {
                                        break;
                                    }
                                }
                                _ => {}
                            }
                        }
                    }
                }
                out.push(Spanned {
                    tok: Tok::Ident(name),
                    line: start_line,
                    column: start_col,
                });
                let n = j - i;
                advance(n, &mut i);
                continue;
            }
            other => {
                return Err(Error::parse(
                    start_line,
                    start_col,
                    format!("unexpected character `{other}`"),
                ))
            }
        };
        out.push(Spanned {
            tok,
            line: start_line,
            column: start_col,
        });
        advance(1, &mut i);
    }
    out.push(Spanned {
        tok: Tok::End,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Spanned>,
    pos: usize,
    options: &'a ParseOptions,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn error(&self, message: impl Into<String>) -> Error {
        let t = &self.tokens[self.pos];
        Error::parse(t.line, t.column, message)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok, what: &str) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    fn expect_end(&self) -> Result<()> {
        match self.peek() {
            Tok::End => Ok(()),
            other => Err(self.error(format!("unexpected trailing token {other:?}"))),
        }
    }

    fn expr(&mut self, min_level: u8) -> Result<Term> {
        let mut lhs = self.atom()?;
        while let Tok::Op(op) = *self.peek() {
            let sym = Sym::new(op);
            let (level, left_assoc) = infix_info(sym).expect("lexer only emits known operators");
            if level < min_level {
                break;
            }
            self.pos += 1;
            let rhs = self.expr(level + 1)?;
            lhs = Term::App(sym, vec![lhs, rhs]);
            if !left_assoc {
                if let Tok::Op(next) = *self.peek() {
                    if infix_info(Sym::new(next)).is_some_and(|(l, _)| l == level) {
                        return Err(self.error(format!("operator `{op}` is not associative")));
                    }
                }
            }
        }
        Ok(lhs)
    }

    fn atom(&mut self) -> Result<Term> {
        match self.peek().clone() {
            Tok::LParen | Tok::LAngle => {
                let close = if self.eat(&Tok::LParen) {
                    Tok::RParen
                } else {
                    self.pos += 1;
                    Tok::RAngle
                };
                let mut items = vec![self.expr(0)?];
                while self.eat(&Tok::Comma) {
                    items.push(self.expr(0)?);
                }
                self.expect(&close, "closing bracket")?;
                if items.len() == 1 && close == Tok::RParen {
                    Ok(items.pop().unwrap())
                } else {
                    Ok(Term::App(tuple_symbol(items.len()), items))
                }
            }
            Tok::Ident(name) => {
                self.pos += 1;
                if self.eat(&Tok::LParen) {
                    let mut args = Vec::new();
                    if !self.eat(&Tok::RParen) {
                        args.push(self.expr(0)?);
                        while self.eat(&Tok::Comma) {
                            args.push(self.expr(0)?);
                        }
                        self.expect(&Tok::RParen, "`)`")?;
                    }
                    return Ok(Term::App(Sym::new(&name), args));
                }
                if self.options.numerals && !self.options.all_bare_as_vars {
                    if let Ok(n) = name.parse::<usize>() {
                        return Ok(Term::numeral(n));
                    }
                }
                if self.options.is_variable(&name) {
                    Ok(Term::Var(Sym::new(&name)))
                } else {
                    Ok(Term::App(Sym::new(&name), Vec::new()))
                }
            }
            other => Err(self.error(format!("expected a term, found {other:?}"))),
        }
    }
}

fn write_term(t: &Term, f: &mut fmt::Formatter<'_>, min_level: u8) -> fmt::Result {
    match t {
        Term::Var(x) => f.write_str(x.as_str()),
        Term::App(sym, args) => {
            if args.len() >= 2 && tuple_arity(*sym) == Some(args.len()) {
                f.write_str("(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write_term(a, f, 0)?;
                }
                return f.write_str(")");
            }
            if args.len() == 2 {
                if let Some((level, left_assoc)) = infix_info(*sym) {
                    let parens = level < min_level;
                    if parens {
                        f.write_str("(")?;
                    }
                    write_term(&args[0], f, if left_assoc { level } else { level + 1 })?;
                    f.write_str(sym.as_str())?;
                    write_term(&args[1], f, level + 1)?;
                    if parens {
                        f.write_str(")")?;
                    }
                    return Ok(());
                }
            }
            f.write_str(sym.as_str())?;
            if !args.is_empty() {
                f.write_str("(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write_term(a, f, 0)?;
                }
                f.write_str(")")?;
            }
            Ok(())
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(self, f, 0)
    }
}

/// Whether the printer writes `sym` between its two arguments.
pub fn is_infix(sym: Sym) -> bool {
    infix_info(sym).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_and_associativity() {
        let t = parse_term("0+s(0)*s(0)").unwrap();
        assert_eq!(t.head().as_str(), "+");
        let t = parse_term("va-vb-vc").unwrap();
        assert_eq!(t.to_string(), "va-vb-vc");
        assert_eq!(t.args()[0].head().as_str(), "-");
        let t = parse_term("va-(vb-vc)").unwrap();
        assert_eq!(t.to_string(), "va-(vb-vc)");
        assert!(parse_term("va<vb<vc").is_err());
    }

    #[test]
    fn printing_is_minimal() {
        for s in [
            "vx*(vy*vz+vy)",
            "vx*(vy*vz)+vx*vy",
            "(va+vb)*vc",
            "f(va,(vb,vc))",
            "0",
        ] {
            assert_eq!(parse_term(s).unwrap().to_string(), s);
        }
    }

    #[test]
    fn numerals_and_tuples() {
        assert_eq!(parse_term("2").unwrap(), Term::numeral(2));
        let t = parse_term("⟨0,vx⟩").unwrap();
        assert_eq!(t.to_string(), "(0,vx)");
    }

    #[test]
    fn braced_names() {
        let t = parse_term("v_{0,s(s(0))}*v_{0,s(s(0))}").unwrap();
        assert!(t.args()[0].is_var());
        assert_eq!(t.args()[0].head().as_str(), "v_{0,s(s(0))}");
    }

    #[test]
    fn declared_and_signature_names() {
        let opts = ParseOptions::new().with_vars([Sym::new("x")]);
        assert!(parse_term_with("x", &opts).unwrap().is_var());
        assert!(!parse_term("x").unwrap().is_var());
        let sig = Signature::new().with("vel", 0, true);
        let opts = ParseOptions::new().with_signature(&sig);
        assert!(!parse_term_with("vel", &opts).unwrap().is_var());
    }

    #[test]
    fn errors_carry_position() {
        match parse_term("f(0,").unwrap_err() {
            Error::Parse { line, column, .. } => assert_eq!((line, column), (1, 5)),
            other => panic!("{other:?}"),
        }
    }
}
