//! Cursor-movement commands of a screen editor as a tree grammar over the
//! positions of a file, and command suggestions for observed movements.

use std::collections::HashMap;
use std::fmt;

use crate::automata::WeightMap;
use crate::enumerate::{Enumerator, Limits};
use crate::error::{Error, Result};
use crate::grammar::{Alt, Nt, TreeGrammar};
use crate::term::{Signature, Sym, Term};

/// The sample screen used in the tests and the CLI documentation.
pub const SAMPLE_SCREEN: &str = "\
CURSOR MOTION COMMANDS:
l left    H home
r right   m matching ()
u up      W next word
d down    B prev word
";

/// Column and line, both starting at 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position {
    pub column: usize,
    pub line: usize,
}

impl Position {
    pub fn new(column: usize, line: usize) -> Self {
        Position { column, line }
    }

    /// Reads `b2` style names: column letters, then the line number.
    pub fn parse(text: &str) -> Result<Position> {
        let split = text
            .find(|c: char| c.is_ascii_digit())
            .unwrap_or(text.len());
        let (letters, digits) = text.split_at(split);
        if letters.is_empty() || !letters.chars().all(|c| c.is_ascii_lowercase()) {
            return Err(Error::Invalid(format!("bad position `{text}`")));
        }
        let column = letters
            .bytes()
            .fold(0usize, |acc, b| acc * 26 + (b - b'a' + 1) as usize);
        let line = digits
            .parse()
            .map_err(|_| Error::Invalid(format!("bad line in position `{text}`")))?;
        Ok(Position { column, line })
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut letters = Vec::new();
        let mut n = self.column;
        while n > 0 {
            n -= 1;
            letters.push((b'a' + (n % 26) as u8) as char);
            n /= 26;
        }
        let col: String = letters.into_iter().rev().collect();
        write!(f, "{col}{}", self.line)
    }
}

/// Movement commands. `H` is nullary; the others map a position to a
/// position where defined.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Command {
    Left,
    Right,
    Up,
    Down,
    NextWord,
    PrevWord,
    Home,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Left,
        Command::Right,
        Command::Up,
        Command::Down,
        Command::NextWord,
        Command::PrevWord,
        Command::Home,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Command::Left => "l",
            Command::Right => "r",
            Command::Up => "u",
            Command::Down => "d",
            Command::NextWord => "W",
            Command::PrevWord => "B",
            Command::Home => "H",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Command> {
        Command::ALL.into_iter().find(|c| c.symbol() == s)
    }

    /// Keys pressed, counting the shift key.
    pub fn keystrokes(self) -> u64 {
        match self {
            Command::NextWord | Command::PrevWord | Command::Home => 2,
            _ => 1,
        }
    }
}

/// File contents, padded to a rectangle, and the available commands.
#[derive(Clone, Debug)]
pub struct EditorWorld {
    pub lines: Vec<Vec<char>>,
    pub commands: Vec<Command>,
}

fn is_space(c: char) -> bool {
    c.is_whitespace()
}

impl EditorWorld {
    pub fn new(text: &str, commands: Vec<Command>) -> Self {
        let mut lines: Vec<Vec<char>> = text.lines().map(|l| l.chars().collect()).collect();
        let width = lines.iter().map(Vec::len).max().unwrap_or(0);
        for l in &mut lines {
            l.resize(width, ' ');
        }
        EditorWorld { lines, commands }
    }

    pub fn width(&self) -> usize {
        self.lines.first().map_or(0, Vec::len)
    }

    pub fn positions(&self) -> impl Iterator<Item = Position> + '_ {
        (1..=self.lines.len())
            .flat_map(move |line| (1..=self.width()).map(move |column| Position { column, line }))
    }

    pub fn contains(&self, p: Position) -> bool {
        (1..=self.lines.len()).contains(&p.line) && (1..=self.width()).contains(&p.column)
    }

    fn ch(&self, column: usize, line: usize) -> char {
        self.lines[line - 1][column - 1]
    }

    fn word_start(&self, column: usize, line: usize) -> bool {
        !is_space(self.ch(column, line)) && (column == 1 || is_space(self.ch(column - 1, line)))
    }

    /// The effect of a unary command, `None` where undefined.
    pub fn apply(&self, cmd: Command, p: Position) -> Option<Position> {
        let Position { column, line } = p;
        let q = match cmd {
            Command::Left => Position::new(column.checked_sub(1)?, line),
            Command::Right => Position::new(column + 1, line),
            Command::Up => Position::new(column, line.checked_sub(1)?),
            Command::Down => Position::new(column, line + 1),
            Command::NextWord => {
                let next = (column + 1..=self.width()).find(|&c| self.word_start(c, line))?;
                Position::new(next, line)
            }
            Command::PrevWord => {
                let prev = (1..column).rev().find(|&c| self.word_start(c, line))?;
                Position::new(prev, line)
            }
            Command::Home => return None,
        };
        self.contains(q).then_some(q)
    }

    /// Evaluates a command term with `x` bound to `start`.
    pub fn eval(&self, t: &Term, start: Position) -> Option<Position> {
        match t {
            Term::Var(_) => Some(start),
            Term::App(f, args) => {
                let cmd = Command::from_symbol(f.as_str())?;
                match (cmd, args.as_slice()) {
                    (Command::Home, []) => Some(Position::new(1, 1)),
                    (_, [inner]) => self.apply(cmd, self.eval(inner, start)?),
                    _ => None,
                }
            }
        }
    }

    /// Weights for the commands of this world: one per command, or the
    /// keystroke count.
    pub fn weights(&self, keystrokes: bool) -> WeightMap {
        let mut w = WeightMap::unit();
        for c in &self.commands {
            w = w.with_symbol(c.symbol(), if keystrokes { c.keystrokes() } else { 1 });
        }
        w
    }
}

/// One nonterminal per position; `c(N_q)` is an alternative of `N_c(q)`.
#[derive(Clone, Debug)]
pub struct EditorGrammar {
    pub grammar: TreeGrammar,
    pub positions: HashMap<Position, Nt>,
}

pub fn editor_grammar(world: &EditorWorld) -> EditorGrammar {
    let mut sig = Signature::new();
    for c in &world.commands {
        let arity = usize::from(*c != Command::Home);
        sig.add_symbol(Sym::new(c.symbol()), arity, false)
            .expect("distinct commands");
    }
    let mut g = TreeGrammar::new(sig);
    let mut positions = HashMap::new();
    for p in world.positions() {
        positions.insert(p, g.add_nonterminal(&p.to_string()));
    }
    for c in &world.commands {
        if *c == Command::Home {
            if let Some(nt) = positions.get(&Position::new(1, 1)) {
                g.push_alt(*nt, Alt::App(Sym::new(c.symbol()), Vec::new()));
            }
            continue;
        }
        for p in world.positions() {
            if let Some(q) = world.apply(*c, p) {
                g.push_alt(
                    positions[&q],
                    Alt::App(Sym::new(c.symbol()), vec![positions[&p]]),
                );
            }
        }
    }
    EditorGrammar {
        grammar: g,
        positions,
    }
}

/// The variable standing for the start position.
pub const CURSOR_VAR: &str = "x";

/// Command sequences achieving every movement, as terms over `x`.
#[derive(Clone, Debug)]
pub struct EditorSuggestions {
    pub conjuncts: Vec<(TreeGrammar, Nt)>,
}

impl EditorSuggestions {
    pub fn stream<'a>(&'a self, weights: &WeightMap, limits: Limits) -> Result<Enumerator<'a>> {
        let parts: Vec<(&TreeGrammar, Nt)> = self.conjuncts.iter().map(|(g, r)| (g, *r)).collect();
        Enumerator::new(&parts, weights, limits)
    }
}

pub fn editor_suggest(
    eg: &EditorGrammar,
    moves: &[(Position, Position)],
) -> Result<EditorSuggestions> {
    if moves.is_empty() {
        return Err(Error::Invalid("at least one movement is required".into()));
    }
    let x = Sym::new(CURSOR_VAR);
    let mut conjuncts = Vec::with_capacity(moves.len());
    for (start, end) in moves {
        let lookup = |p: &Position| {
            eg.positions
                .get(p)
                .copied()
                .ok_or_else(|| Error::Invalid(format!("position {p} is outside the file")))
        };
        let (s, e) = (lookup(start)?, lookup(end)?);
        let mut g = eg.grammar.clone();
        g.add_alt(s, Alt::Leaf(x));
        conjuncts.push((g, e));
    }
    Ok(EditorSuggestions { conjuncts })
}
