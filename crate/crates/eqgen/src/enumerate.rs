//! Weight-ordered enumeration of `L(N1) ∩ ... ∩ L(Nm)` without building the
//! product grammar.
//!
//! Product states are tuples of component nonterminals. For each weight `w`
//! the enumerator first computes, bottom-up, which product states have a
//! term of exactly that weight. Terms of the root state are then expanded
//! top-down with memoization, joining child candidates against those
//! per-weight levels through argument tries of every component.

use std::collections::{HashMap, HashSet};
use std::rc::Rc;

use crate::automata::{max_weight_finite, productive, WeightMap};
use crate::error::{Error, Result};
use crate::grammar::{Letter, Nt, TreeGrammar};
use crate::term::Term;

/// Stopping conditions for enumeration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Limits {
    pub max_count: Option<usize>,
    pub max_weight: Option<u64>,
}

impl Limits {
    pub fn count(n: usize) -> Self {
        Limits {
            max_count: Some(n),
            max_weight: None,
        }
    }

    pub fn new(max_count: usize, max_weight: u64) -> Self {
        Limits {
            max_count: Some(max_count),
            max_weight: Some(max_weight),
        }
    }
}

const ANY: u32 = u32::MAX;

/// Argument prefixes of every alternative, keyed by letter and owner (and
/// once more under `ANY` for bottom-up parent lookups).
#[derive(Default)]
struct ArgTrie {
    roots: HashMap<(u32, u32), u32>,
    next: HashMap<(u32, Nt), u32>,
    children: Vec<Vec<Nt>>,
    owners: Vec<Vec<Nt>>,
}

impl ArgTrie {
    fn node(&mut self) -> u32 {
        self.children.push(Vec::new());
        self.owners.push(Vec::new());
        (self.children.len() - 1) as u32
    }

    fn insert(&mut self, letter: u32, owner: u32, args: &[Nt], real_owner: Nt) {
        let mut cur = match self.roots.get(&(letter, owner)) {
            Some(n) => *n,
            None => {
                let n = self.node();
                self.roots.insert((letter, owner), n);
                n
            }
        };
        for a in args {
            cur = match self.next.get(&(cur, *a)) {
                Some(n) => *n,
                None => {
                    let n = self.node();
                    self.next.insert((cur, *a), n);
                    self.children[cur as usize].push(*a);
                    n
                }
            };
        }
        if !self.owners[cur as usize].contains(&real_owner) {
            self.owners[cur as usize].push(real_owner);
        }
    }
}

struct Component<'g> {
    grammar: &'g TreeGrammar,
    trie: ArgTrie,
    useful: Vec<bool>,
}

#[derive(Default)]
struct Level {
    states: Vec<u32>,
    members: HashSet<u32>,
    by_first: HashMap<Nt, Vec<u32>>,
}

/// Streaming enumerator; yields `(weight, term)` in ascending weight and,
/// within a weight, in the canonical term order.
pub struct Enumerator<'g> {
    comps: Vec<Component<'g>>,
    root: Vec<Nt>,
    letters: Vec<Letter>,
    letter_weight: Vec<u64>,
    states: Vec<Box<[Nt]>>,
    state_ids: HashMap<Box<[Nt]>, u32>,
    levels: Vec<Level>,
    memo: HashMap<(u32, u64), Rc<Vec<Term>>>,
    max_arity: u64,
    max_letter_weight: u64,
    last_nonempty: Option<u64>,
    stop_weight: Option<u64>,
    limits: Limits,
    emitted: usize,
    current: u64,
    buffer: Rc<Vec<Term>>,
    cursor: usize,
    done: bool,
}

impl<'g> Enumerator<'g> {
    /// Enumerates the intersection of the languages of the given roots.
    pub fn new(
        conjuncts: &[(&'g TreeGrammar, Nt)],
        weights: &WeightMap,
        limits: Limits,
    ) -> Result<Self> {
        if conjuncts.is_empty() {
            return Err(Error::Invalid(
                "enumeration needs at least one grammar".into(),
            ));
        }
        let mut letter_ids: HashMap<Letter, u32> = HashMap::new();
        let mut letters = Vec::new();
        for (g, _) in conjuncts {
            for l in g.letters() {
                letter_ids.entry(l).or_insert_with(|| {
                    letters.push(l);
                    (letters.len() - 1) as u32
                });
            }
        }
        let letter_weight: Vec<u64> = letters.iter().map(|l| weights.letter(*l)).collect();
        for (l, w) in letters.iter().zip(&letter_weight) {
            if l.arity() > 0 && *w == 0 {
                return Err(Error::Invalid(format!(
                    "symbol {l:?} of positive arity has weight 0"
                )));
            }
        }
        let mut comps = Vec::new();
        let mut stop_weight: Option<u64> = None;
        for (g, root) in conjuncts {
            let mut trie = ArgTrie::default();
            for nt in g.nonterminals() {
                for alt in g.rule(nt) {
                    let l = letter_ids[&alt.letter()];
                    trie.insert(l, ANY, alt.args(), nt);
                    trie.insert(l, nt.0, alt.args(), nt);
                }
            }
            let prod = productive(g);
            let useful = reachable_from(g, *root, &prod);
            if let Some(bound) = max_weight_finite(g, *root, weights) {
                stop_weight = Some(stop_weight.map_or(bound, |b| b.min(bound)));
            }
            if !prod[root.index()] {
                stop_weight = Some(0);
            }
            comps.push(Component {
                grammar: g,
                trie,
                useful,
            });
        }
        let max_arity = letters.iter().map(|l| l.arity() as u64).max().unwrap_or(0);
        let max_letter_weight = letter_weight.iter().copied().max().unwrap_or(0);
        let empty_root = comps
            .iter()
            .zip(conjuncts)
            .any(|(c, (_, r))| !c.useful[r.index()]);
        Ok(Enumerator {
            root: conjuncts.iter().map(|(_, r)| *r).collect(),
            comps,
            letters,
            letter_weight,
            states: Vec::new(),
            state_ids: HashMap::new(),
            levels: Vec::new(),
            memo: HashMap::new(),
            max_arity,
            max_letter_weight,
            last_nonempty: None,
            stop_weight,
            limits,
            emitted: 0,
            current: 0,
            buffer: Rc::new(Vec::new()),
            cursor: 0,
            done: empty_root,
        })
    }

    fn intern(&mut self, tuple: &[Nt]) -> u32 {
        if let Some(id) = self.state_ids.get(tuple) {
            return *id;
        }
        let id = self.states.len() as u32;
        let boxed: Box<[Nt]> = tuple.into();
        self.states.push(boxed.clone());
        self.state_ids.insert(boxed, id);
        id
    }

    /// True once no term of weight greater than the current one can exist.
    fn exhausted(&self, w: u64) -> bool {
        if let Some(stop) = self.stop_weight {
            if w > stop {
                return true;
            }
        }
        if let Some(max) = self.limits.max_weight {
            if w > max {
                return true;
            }
        }
        // The lightest term heavier than the last nonempty level W has all
        // children of weight at most W, hence weight at most K·W + A.
        let last = self.last_nonempty.unwrap_or(0);
        let horizon = self.max_arity * last + self.max_letter_weight;
        if self.last_nonempty.is_none() {
            return w > self.max_letter_weight;
        }
        w > horizon
    }

    /// Computes the level of weight `w`; lower levels must exist.
    fn build_level(&mut self, w: u64) {
        debug_assert_eq!(self.levels.len() as u64, w);
        let m = self.comps.len();
        let mut found: Vec<Vec<Nt>> = Vec::new();
        for (lid, letter) in self.letters.iter().enumerate() {
            let c = self.letter_weight[lid];
            if c > w {
                continue;
            }
            let k = letter.arity();
            let mut nodes = Vec::with_capacity(m);
            let mut ok = true;
            for comp in &self.comps {
                match comp.trie.roots.get(&(lid as u32, ANY)) {
                    Some(n) => nodes.push(*n),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue;
            }
            if k == 0 {
                if c == w {
                    self.collect_parents(&nodes, &mut found);
                }
                continue;
            }
            let mut chosen = Vec::with_capacity(k);
            self.join(k, w - c, &nodes, &mut chosen, &mut |this, nodes, _| {
                this.collect_parents(nodes, &mut found);
            });
        }
        let mut level = Level::default();
        for tuple in found {
            let id = self.intern(&tuple);
            if level.members.insert(id) {
                level.states.push(id);
                level.by_first.entry(tuple[0]).or_default().push(id);
            }
        }
        if !level.states.is_empty() {
            self.last_nonempty = Some(w);
        }
        self.levels.push(level);
    }

    fn collect_parents(&self, nodes: &[u32], found: &mut Vec<Vec<Nt>>) {
        let lists: Vec<Vec<Nt>> = self
            .comps
            .iter()
            .zip(nodes)
            .map(|(comp, n)| {
                comp.trie.owners[*n as usize]
                    .iter()
                    .copied()
                    .filter(|o| comp.useful[o.index()])
                    .collect()
            })
            .collect();
        if lists.iter().any(Vec::is_empty) {
            return;
        }
        let mut idx = vec![0usize; lists.len()];
        loop {
            found.push(idx.iter().zip(&lists).map(|(i, l)| l[*i]).collect());
            let mut p = 0;
            while p < idx.len() {
                idx[p] += 1;
                if idx[p] < lists[p].len() {
                    break;
                }
                idx[p] = 0;
                p += 1;
            }
            if p == idx.len() {
                break;
            }
        }
    }

    /// Enumerates child tuples `(state, weight)` for the remaining argument
    /// positions whose weights sum to `remaining`, walking every component's
    /// trie in lockstep from `nodes`.
    fn join(
        &self,
        k: usize,
        remaining: u64,
        nodes: &[u32],
        chosen: &mut Vec<(u32, u64)>,
        emit: &mut dyn FnMut(&Self, &[u32], &[(u32, u64)]),
    ) {
        let pos = chosen.len();
        if pos == k {
            if remaining == 0 {
                emit(self, nodes, chosen);
            }
            return;
        }
        let last = pos + 1 == k;
        let lo = if last { remaining } else { 0 };
        for wi in lo..=remaining {
            let Some(level) = self.levels.get(wi as usize) else {
                continue;
            };
            if level.states.is_empty() {
                continue;
            }
            let first_trie = &self.comps[0].trie;
            for a in &first_trie.children[nodes[0] as usize] {
                let Some(group) = level.by_first.get(a) else {
                    continue;
                };
                let n0 = first_trie.next[&(nodes[0], *a)];
                'cand: for &sid in group {
                    let tuple = &self.states[sid as usize];
                    let mut next_nodes = Vec::with_capacity(nodes.len());
                    next_nodes.push(n0);
                    for (j, comp) in self.comps.iter().enumerate().skip(1) {
                        match comp.trie.next.get(&(nodes[j], tuple[j])) {
                            Some(n) => next_nodes.push(*n),
                            None => continue 'cand,
                        }
                    }
                    chosen.push((sid, wi));
                    self.join(k, remaining - wi, &next_nodes, chosen, emit);
                    chosen.pop();
                }
            }
        }
    }

    fn ensure_levels(&mut self, w: u64) {
        while self.levels.len() as u64 <= w {
            let next = self.levels.len() as u64;
            self.build_level(next);
        }
    }

    /// All terms of weight exactly `w` in the product state `state`, sorted.
    fn terms(&mut self, state: u32, w: u64) -> Rc<Vec<Term>> {
        if let Some(found) = self.memo.get(&(state, w)) {
            return found.clone();
        }
        let present = self
            .levels
            .get(w as usize)
            .is_some_and(|l| l.members.contains(&state));
        if !present {
            return Rc::new(Vec::new());
        }
        let tuple = self.states[state as usize].clone();
        let mut expansions: Vec<(usize, Vec<(u32, u64)>)> = Vec::new();
        for lid in 0..self.letters.len() {
            let c = self.letter_weight[lid];
            if c > w {
                continue;
            }
            let mut nodes = Vec::with_capacity(tuple.len());
            for (comp, nt) in self.comps.iter().zip(tuple.iter()) {
                match comp.trie.roots.get(&(lid as u32, nt.0)) {
                    Some(n) => nodes.push(*n),
                    None => break,
                }
            }
            if nodes.len() < tuple.len() {
                continue;
            }
            let k = self.letters[lid].arity();
            if k == 0 {
                if c == w {
                    expansions.push((lid, Vec::new()));
                }
                continue;
            }
            let mut chosen = Vec::with_capacity(k);
            let mut local = Vec::new();
            self.join(k, w - c, &nodes, &mut chosen, &mut |_, _, children| {
                local.push(children.to_vec());
            });
            expansions.extend(local.into_iter().map(|ch| (lid, ch)));
        }
        let mut out = Vec::new();
        for (lid, children) in expansions {
            let letter = self.letters[lid];
            let parts: Vec<Rc<Vec<Term>>> =
                children.iter().map(|(s, cw)| self.terms(*s, *cw)).collect();
            if parts.iter().any(|p| p.is_empty()) {
                continue;
            }
            let mut idx = vec![0usize; parts.len()];
            loop {
                let args: Vec<Term> = idx.iter().zip(&parts).map(|(i, p)| p[*i].clone()).collect();
                out.push(match letter {
                    Letter::Sym(f, _) => Term::App(f, args),
                    Letter::Leaf(x) => Term::Var(x),
                });
                let mut p = 0;
                while p < idx.len() {
                    idx[p] += 1;
                    if idx[p] < parts[p].len() {
                        break;
                    }
                    idx[p] = 0;
                    p += 1;
                }
                if p == idx.len() {
                    break;
                }
            }
        }
        out.sort();
        out.dedup();
        let out = Rc::new(out);
        self.memo.insert((state, w), out.clone());
        out
    }

    /// Number of distinct product states discovered so far.
    pub fn explored_states(&self) -> usize {
        self.states.len()
    }

    /// The grammar of component `i`.
    pub fn component(&self, i: usize) -> &'g TreeGrammar {
        self.comps[i].grammar
    }
}

impl Iterator for Enumerator<'_> {
    type Item = (u64, Term);

    fn next(&mut self) -> Option<(u64, Term)> {
        loop {
            if self.done {
                return None;
            }
            if self.limits.max_count.is_some_and(|n| self.emitted >= n) {
                self.done = true;
                return None;
            }
            if self.cursor < self.buffer.len() {
                let t = self.buffer[self.cursor].clone();
                self.cursor += 1;
                self.emitted += 1;
                return Some((self.current - 1, t));
            }
            let w = self.current;
            if self.exhausted(w) {
                self.done = true;
                return None;
            }
            self.ensure_levels(w);
            let root = self.root.clone();
            let found = self.state_ids.get(root.as_slice()).copied();
            self.buffer = match found {
                Some(id) => self.terms(id, w),
                None => Rc::new(Vec::new()),
            };
            self.cursor = 0;
            self.current = w + 1;
        }
    }
}

fn reachable_from(g: &TreeGrammar, root: Nt, prod: &[bool]) -> Vec<bool> {
    let mut seen = vec![false; g.len()];
    if !prod[root.index()] {
        return seen;
    }
    seen[root.index()] = true;
    let mut stack = vec![root];
    while let Some(nt) = stack.pop() {
        for alt in g.rule(nt) {
            if alt.args().iter().all(|a| prod[a.index()]) {
                for a in alt.args() {
                    if !seen[a.index()] {
                        seen[a.index()] = true;
                        stack.push(*a);
                    }
                }
            }
        }
    }
    seen
}

/// Collects the enumeration of a single nonterminal's language.
pub fn enumerate(
    g: &TreeGrammar,
    nt: Nt,
    weights: &WeightMap,
    limits: Limits,
) -> Result<Vec<(u64, Term)>> {
    Ok(Enumerator::new(&[(g, nt)], weights, limits)?.collect())
}

/// Collects the enumeration of an intersection of languages.
pub fn enumerate_all(
    conjuncts: &[(&TreeGrammar, Nt)],
    weights: &WeightMap,
    limits: Limits,
) -> Result<Vec<(u64, Term)>> {
    Ok(Enumerator::new(conjuncts, weights, limits)?.collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::intersect;
    use crate::syntax::parse_term;

    #[test]
    fn peano_prefix() {
        let g = TreeGrammar::parse("N ::= 0 | s(N)", None).unwrap();
        let out = enumerate(&g, g.nt("N").unwrap(), &WeightMap::unit(), Limits::count(3)).unwrap();
        let terms: Vec<String> = out.iter().map(|(_, t)| t.to_string()).collect();
        assert_eq!(terms, ["0", "s(0)", "s(s(0))"]);
    }

    #[test]
    fn empty_and_finite_languages_terminate() {
        let g = TreeGrammar::parse("A ::= f(A)\nB ::= a | g(C,C)\nC ::= b | c", None).unwrap();
        assert!(enumerate(
            &g,
            g.nt("A").unwrap(),
            &WeightMap::unit(),
            Limits::default()
        )
        .unwrap()
        .is_empty());
        let all = enumerate(
            &g,
            g.nt("B").unwrap(),
            &WeightMap::unit(),
            Limits::default(),
        )
        .unwrap();
        assert_eq!(all.len(), 5);
    }

    #[test]
    fn lazy_product_agrees_with_materialized_product() {
        let two_class = "N0 ::= 0 | N0+N0 | N0*Nt | Nt*N0\nN1 ::= s(N0) | N0+N1 | N1+N0 | N1*N1\nNt ::= 0 | s(Nt) | Nt+Nt | Nt*Nt\n";
        let g = TreeGrammar::parse(two_class, None).unwrap();
        let (n0, nt) = (g.nt("N0").unwrap(), g.nt("Nt").unwrap());
        let lazy = enumerate_all(
            &[(&g, n0), (&g, nt)],
            &WeightMap::unit(),
            Limits::new(200, 6),
        )
        .unwrap();
        let p = intersect(&g, &g, &[(n0, nt)]).unwrap();
        let eager = enumerate(
            &p.grammar,
            p.get(n0, nt).unwrap(),
            &WeightMap::unit(),
            Limits::new(200, 6),
        )
        .unwrap();
        assert_eq!(lazy, eager);
        assert!(lazy
            .iter()
            .any(|(_, t)| *t == parse_term("0*s(0)").unwrap()));
        assert!(lazy
            .windows(2)
            .all(|w| (w[0].0, &w[0].1) < (w[1].0, &w[1].1)));
    }

    #[test]
    fn zero_weight_operator_is_rejected() {
        let g = TreeGrammar::parse("N ::= 0 | s(N)", None).unwrap();
        let w = WeightMap::unit().with_symbol("s", 0);
        assert!(Enumerator::new(&[(&g, g.nt("N").unwrap())], &w, Limits::default()).is_err());
    }
}
