//! Standard tree-automaton algorithms on [`TreeGrammar`]s: membership,
//! emptiness, finiteness, simplification, products, subset construction,
//! complement and difference, lifting, minimal weights and instance tests.
//!
//! Variable leaves are handled as extra constants throughout.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::grammar::{Alt, Letter, Nt, TreeGrammar};
use crate::term::{Signature, Substitution, Sym, Term};

/// Per-symbol weights used to order terms.
#[derive(Clone, Debug)]
pub struct WeightMap {
    symbol_default: u64,
    leaf_default: u64,
    symbols: HashMap<Sym, u64>,
    leaves: HashMap<Sym, u64>,
}

impl Default for WeightMap {
    fn default() -> Self {
        WeightMap {
            symbol_default: 1,
            leaf_default: 0,
            symbols: HashMap::new(),
            leaves: HashMap::new(),
        }
    }
}

impl WeightMap {
    /// Every symbol weighs 1, variable leaves weigh 0.
    pub fn unit() -> Self {
        Self::default()
    }

    /// Term size: every node, leaves included, weighs 1.
    pub fn size() -> Self {
        WeightMap {
            leaf_default: 1,
            ..Self::default()
        }
    }

    pub fn with_symbol(mut self, sym: &str, weight: u64) -> Self {
        self.symbols.insert(Sym::new(sym), weight);
        self
    }

    pub fn with_leaf(mut self, var: Sym, weight: u64) -> Self {
        self.leaves.insert(var, weight);
        self
    }

    pub fn with_leaf_default(mut self, weight: u64) -> Self {
        self.leaf_default = weight;
        self
    }

    pub fn symbol(&self, sym: Sym) -> u64 {
        self.symbols
            .get(&sym)
            .copied()
            .unwrap_or(self.symbol_default)
    }

    pub fn leaf(&self, var: Sym) -> u64 {
        self.leaves.get(&var).copied().unwrap_or(self.leaf_default)
    }

    pub fn letter(&self, letter: Letter) -> u64 {
        match letter {
            Letter::Sym(f, _) => self.symbol(f),
            Letter::Leaf(x) => self.leaf(x),
        }
    }

    pub fn term(&self, t: &Term) -> u64 {
        match t {
            Term::Var(x) => self.leaf(*x),
            Term::App(f, args) => self.symbol(*f) + args.iter().map(|a| self.term(a)).sum::<u64>(),
        }
    }
}

/// Alternatives grouped by letter, each entry being `(owner, alternative index)`.
fn alts_by_letter(g: &TreeGrammar) -> HashMap<Letter, Vec<(Nt, usize)>> {
    let mut map: HashMap<Letter, Vec<(Nt, usize)>> = HashMap::new();
    for nt in g.nonterminals() {
        for (i, alt) in g.rule(nt).iter().enumerate() {
            map.entry(alt.letter()).or_default().push((nt, i));
        }
    }
    map
}

fn states_rec(
    g: &TreeGrammar,
    index: &HashMap<Letter, Vec<(Nt, usize)>>,
    t: &Term,
    strict: bool,
) -> Result<BTreeSet<Nt>> {
    if let Term::App(f, args) = t {
        if strict && g.signature().arity(*f) != Some(args.len()) {
            return Err(Error::UnknownSymbol(format!("{f}/{}", args.len())));
        }
    }
    let children = t
        .args()
        .iter()
        .map(|a| states_rec(g, index, a, strict))
        .collect::<Result<Vec<_>>>()?;
    let mut out = BTreeSet::new();
    if let Some(entries) = index.get(&Letter::of_term(t)) {
        for &(owner, i) in entries {
            let alt = &g.rule(owner)[i];
            if alt
                .args()
                .iter()
                .zip(&children)
                .all(|(a, set)| set.contains(a))
            {
                out.insert(owner);
            }
        }
    }
    Ok(out)
}

/// The set `{N : t ∈ L(N)}`. Symbols outside the signature are an error.
pub fn states_of(g: &TreeGrammar, t: &Term) -> Result<BTreeSet<Nt>> {
    states_rec(g, &alts_by_letter(g), t, true)
}

/// Like [`states_of`] but foreign symbols simply produce no states.
pub fn states_of_lenient(g: &TreeGrammar, t: &Term) -> BTreeSet<Nt> {
    states_rec(g, &alts_by_letter(g), t, false).unwrap_or_default()
}

pub fn membership(g: &TreeGrammar, nt: Nt, t: &Term) -> Result<bool> {
    Ok(states_of(g, t)?.contains(&nt))
}

/// Reusable membership oracle that indexes the grammar once.
pub struct Recognizer<'g> {
    grammar: &'g TreeGrammar,
    index: HashMap<Letter, Vec<(Nt, usize)>>,
}

impl<'g> Recognizer<'g> {
    pub fn new(grammar: &'g TreeGrammar) -> Self {
        Recognizer {
            grammar,
            index: alts_by_letter(grammar),
        }
    }

    pub fn states(&self, t: &Term) -> BTreeSet<Nt> {
        states_rec(self.grammar, &self.index, t, false).unwrap_or_default()
    }

    pub fn accepts(&self, nt: Nt, t: &Term) -> bool {
        self.states(t).contains(&nt)
    }
}

/// Nonterminals with a nonempty language.
pub fn productive(g: &TreeGrammar) -> Vec<bool> {
    let n = g.len();
    let mut prod = vec![false; n];
    let mut users: Vec<Vec<(Nt, usize)>> = vec![Vec::new(); n];
    let mut missing: Vec<Vec<usize>> = Vec::with_capacity(n);
    let mut queue = VecDeque::new();
    for nt in g.nonterminals() {
        let mut counts = Vec::with_capacity(g.rule(nt).len());
        for (i, alt) in g.rule(nt).iter().enumerate() {
            counts.push(alt.args().len());
            for a in alt.args() {
                users[a.index()].push((nt, i));
            }
            if alt.args().is_empty() && !prod[nt.index()] {
                prod[nt.index()] = true;
                queue.push_back(nt);
            }
        }
        missing.push(counts);
    }
    while let Some(done) = queue.pop_front() {
        for &(owner, i) in &users[done.index()] {
            let c = &mut missing[owner.index()][i];
            *c -= 1;
            if *c == 0 && !prod[owner.index()] {
                prod[owner.index()] = true;
                queue.push_back(owner);
            }
        }
    }
    prod
}

pub fn is_empty(g: &TreeGrammar, nt: Nt) -> bool {
    !productive(g)[nt.index()]
}

fn productive_alt(prod: &[bool], alt: &Alt) -> bool {
    alt.args().iter().all(|a| prod[a.index()])
}

/// Nonterminals reachable from `roots` through alternatives whose arguments
/// are all productive.
fn useful_reachable(g: &TreeGrammar, roots: &[Nt], prod: &[bool]) -> Vec<bool> {
    let mut seen = vec![false; g.len()];
    let mut stack: Vec<Nt> = roots.iter().copied().filter(|r| prod[r.index()]).collect();
    for r in &stack {
        seen[r.index()] = true;
    }
    while let Some(nt) = stack.pop() {
        for alt in g.rule(nt) {
            if productive_alt(prod, alt) {
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

/// Result of [`simplify`]: the trimmed grammar and where each old
/// nonterminal went (`None` if dropped).
#[derive(Clone, Debug)]
pub struct Simplified {
    pub grammar: TreeGrammar,
    pub map: Vec<Option<Nt>>,
}

impl Simplified {
    pub fn get(&self, old: Nt) -> Option<Nt> {
        self.map[old.index()]
    }
}

/// Removes unproductive and unreachable nonterminals. A root whose language
/// is empty survives as a nonterminal with an empty rule.
pub fn simplify(g: &TreeGrammar, roots: &[Nt]) -> Simplified {
    let prod = productive(g);
    let mut keep = useful_reachable(g, roots, &prod);
    for r in roots {
        keep[r.index()] = true;
    }
    let mut out = TreeGrammar::new(g.signature().clone());
    let mut map = vec![None; g.len()];
    for nt in g.nonterminals() {
        if keep[nt.index()] {
            map[nt.index()] = Some(out.add_nonterminal(g.name(nt)));
        }
    }
    for nt in g.nonterminals() {
        let Some(new) = map[nt.index()] else { continue };
        if !prod[nt.index()] {
            continue;
        }
        for alt in g.rule(nt) {
            if !productive_alt(&prod, alt) {
                continue;
            }
            let alt = match alt {
                Alt::App(f, args) => Alt::App(
                    *f,
                    args.iter()
                        .map(|a| map[a.index()].expect("reachable child"))
                        .collect(),
                ),
                Alt::Leaf(x) => Alt::Leaf(*x),
            };
            out.push_alt(new, alt);
        }
    }
    Simplified { grammar: out, map }
}

/// Whether `L(nt)` is finite; an empty language counts as finite.
pub fn is_finite(g: &TreeGrammar, nt: Nt) -> bool {
    let prod = productive(g);
    if !prod[nt.index()] {
        return true;
    }
    let live = useful_reachable(g, &[nt], &prod);
    // Depth-first cycle search over the live part.
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }
    let mut mark = vec![Mark::New; g.len()];
    let mut stack: Vec<(Nt, Vec<Nt>)> = Vec::new();
    let succ = |n: Nt| -> Vec<Nt> {
        let mut v: Vec<Nt> = g
            .rule(n)
            .iter()
            .filter(|a| productive_alt(&prod, a))
            .flat_map(|a| a.args().iter().copied())
            .filter(|a| live[a.index()])
            .collect();
        v.sort();
        v.dedup();
        v
    };
    mark[nt.index()] = Mark::Active;
    stack.push((nt, succ(nt)));
    while let Some((_, next)) = stack.last_mut() {
        match next.pop() {
            Some(child) => match mark[child.index()] {
                Mark::Active => return false,
                Mark::Done => {}
                Mark::New => {
                    mark[child.index()] = Mark::Active;
                    let s = succ(child);
                    stack.push((child, s));
                }
            },
            None => {
                let (n, _) = stack.pop().unwrap();
                mark[n.index()] = Mark::Done;
            }
        }
    }
    true
}

/// Maximal weight of a term in a finite nonempty language.
pub fn max_weight_finite(g: &TreeGrammar, nt: Nt, weights: &WeightMap) -> Option<u64> {
    if !is_finite(g, nt) {
        return None;
    }
    let prod = productive(g);
    if !prod[nt.index()] {
        return None;
    }
    fn go(
        g: &TreeGrammar,
        n: Nt,
        prod: &[bool],
        w: &WeightMap,
        memo: &mut HashMap<Nt, u64>,
    ) -> u64 {
        if let Some(v) = memo.get(&n) {
            return *v;
        }
        let best = g
            .rule(n)
            .iter()
            .filter(|a| productive_alt(prod, a))
            .map(|a| {
                w.letter(a.letter())
                    + a.args()
                        .iter()
                        .map(|c| go(g, *c, prod, w, memo))
                        .sum::<u64>()
            })
            .max()
            .unwrap_or(0);
        memo.insert(n, best);
        best
    }
    Some(go(g, nt, &prod, weights, &mut HashMap::new()))
}

/// A product grammar together with the pairing of input nonterminals.
#[derive(Clone, Debug)]
pub struct Product {
    pub grammar: TreeGrammar,
    pub pairs: HashMap<(Nt, Nt), Nt>,
}

impl Product {
    pub fn get(&self, a: Nt, b: Nt) -> Option<Nt> {
        self.pairs.get(&(a, b)).copied()
    }
}

/// Product construction. `L(N12) = L(N1) ∩ L(N2)` for every materialized
/// pair; only productive pairs reachable from `root_pairs` are built, so
/// the result needs no further simplification. Requested roots always get
/// a nonterminal, possibly with an empty rule.
pub fn intersect(g1: &TreeGrammar, g2: &TreeGrammar, root_pairs: &[(Nt, Nt)]) -> Result<Product> {
    let mut sig = g1.signature().clone();
    sig.merge(g2.signature())?;

    let mut parents1: HashMap<(Nt, usize), Vec<(Nt, usize)>> = HashMap::new();
    for nt in g1.nonterminals() {
        for (i, alt) in g1.rule(nt).iter().enumerate() {
            for (pos, a) in alt.args().iter().enumerate() {
                parents1.entry((*a, pos)).or_default().push((nt, i));
            }
        }
    }
    let mut parents2: HashMap<(Nt, usize, Letter), Vec<(Nt, usize)>> = HashMap::new();
    for nt in g2.nonterminals() {
        for (i, alt) in g2.rule(nt).iter().enumerate() {
            for (pos, a) in alt.args().iter().enumerate() {
                parents2
                    .entry((*a, pos, alt.letter()))
                    .or_default()
                    .push((nt, i));
            }
        }
    }

    let mut productive: HashSet<(Nt, Nt)> = HashSet::new();
    let mut queue = VecDeque::new();
    let leaves2 = alts_by_letter(g2);
    for nt1 in g1.nonterminals() {
        for alt in g1.rule(nt1).iter().filter(|a| a.args().is_empty()) {
            for &(nt2, _) in leaves2.get(&alt.letter()).into_iter().flatten() {
                if productive.insert((nt1, nt2)) {
                    queue.push_back((nt1, nt2));
                }
            }
        }
    }
    let max_arity = g1.letters().iter().map(|l| l.arity()).max().unwrap_or(0);
    while let Some((a, b)) = queue.pop_front() {
        for pos in 0..max_arity {
            let Some(ps1) = parents1.get(&(a, pos)) else {
                continue;
            };
            for &(o1, i1) in ps1 {
                let alt1 = &g1.rule(o1)[i1];
                let Some(ps2) = parents2.get(&(b, pos, alt1.letter())) else {
                    continue;
                };
                for &(o2, i2) in ps2 {
                    if productive.contains(&(o1, o2)) {
                        continue;
                    }
                    let alt2 = &g2.rule(o2)[i2];
                    let ok = alt1
                        .args()
                        .iter()
                        .zip(alt2.args())
                        .all(|(x, y)| productive.contains(&(*x, *y)));
                    if ok {
                        productive.insert((o1, o2));
                        queue.push_back((o1, o2));
                    }
                }
            }
        }
    }

    let mut out = TreeGrammar::new(sig);
    let mut pairs: HashMap<(Nt, Nt), Nt> = HashMap::new();
    let mut work = VecDeque::new();
    let mut intern = |out: &mut TreeGrammar, work: &mut VecDeque<(Nt, Nt)>, p: (Nt, Nt)| -> Nt {
        *pairs.entry(p).or_insert_with(|| {
            work.push_back(p);
            out.add_nonterminal(&format!("{}_{}", g1.name(p.0), g2.name(p.1)))
        })
    };
    for &p in root_pairs {
        intern(&mut out, &mut work, p);
    }
    while let Some((a, b)) = work.pop_front() {
        if !productive.contains(&(a, b)) {
            continue;
        }
        let me = intern(&mut out, &mut work, (a, b));
        let mut by_letter: HashMap<Letter, Vec<&Alt>> = HashMap::new();
        for alt in g2.rule(b) {
            by_letter.entry(alt.letter()).or_default().push(alt);
        }
        let mut seen = HashSet::new();
        for alt1 in g1.rule(a) {
            for alt2 in by_letter.get(&alt1.letter()).into_iter().flatten() {
                let arg_pairs: Vec<(Nt, Nt)> = alt1
                    .args()
                    .iter()
                    .copied()
                    .zip(alt2.args().iter().copied())
                    .collect();
                if !arg_pairs.iter().all(|p| productive.contains(p)) {
                    continue;
                }
                let args: Vec<Nt> = arg_pairs
                    .iter()
                    .map(|p| intern(&mut out, &mut work, *p))
                    .collect();
                let alt = alt1.letter().make_alt(args);
                if seen.insert(alt.clone()) {
                    out.push_alt(me, alt);
                }
            }
        }
    }
    Ok(Product {
        grammar: out,
        pairs,
    })
}

/// A bottom-up deterministic automaton obtained by subset construction.
#[derive(Clone, Debug)]
pub struct Dfta {
    /// Subset of original nonterminals represented by each state.
    pub states: Vec<BTreeSet<Nt>>,
    /// Transitions in discovery order.
    pub transitions: Vec<(Letter, Vec<u32>, u32)>,
    index: HashMap<(Letter, Vec<u32>), u32>,
    /// The empty-set state, present only in complete automata.
    pub sink: Option<u32>,
}

impl Dfta {
    pub fn step(&self, letter: Letter, children: &[u32]) -> Option<u32> {
        self.index.get(&(letter, children.to_vec())).copied()
    }

    /// Runs the automaton on `t`; `None` if no transition applies.
    pub fn run(&self, t: &Term) -> Option<u32> {
        let children = t
            .args()
            .iter()
            .map(|a| self.run(a))
            .collect::<Option<Vec<_>>>()?;
        self.step(Letter::of_term(t), &children)
    }
}

/// Subset construction over reachable states. With `alphabet` given the
/// automaton is complete over it (including an explicit sink).
pub fn determinize_automaton(g: &TreeGrammar, alphabet: Option<&BTreeSet<Letter>>) -> Dfta {
    determinize_bounded(g, alphabet, usize::MAX).expect("unbounded")
}

/// [`determinize_automaton`] that gives up once more than `max_states`
/// subset states have been discovered.
pub fn determinize_bounded(
    g: &TreeGrammar,
    alphabet: Option<&BTreeSet<Letter>>,
    max_states: usize,
) -> Result<Dfta> {
    let complete = alphabet.is_some();
    let letters: BTreeSet<Letter> = match alphabet {
        Some(a) => a.clone(),
        None => g.letters(),
    };
    let by_letter = alts_by_letter(g);
    let mut states: Vec<BTreeSet<Nt>> = Vec::new();
    let mut state_index: HashMap<BTreeSet<Nt>, u32> = HashMap::new();
    let mut transitions = Vec::new();
    let mut index: HashMap<(Letter, Vec<u32>), u32> = HashMap::new();
    let mut sink = None;
    if complete {
        states.push(BTreeSet::new());
        state_index.insert(BTreeSet::new(), 0);
        sink = Some(0);
    }
    loop {
        let known = states.len();
        for &letter in &letters {
            let k = letter.arity();
            if k > 0 && known == 0 {
                continue;
            }
            let mut tuple = vec![0u32; k];
            loop {
                let key = (letter, tuple.clone());
                if !index.contains_key(&key) {
                    let mut target = BTreeSet::new();
                    for &(owner, i) in by_letter.get(&letter).into_iter().flatten() {
                        let alt = &g.rule(owner)[i];
                        if alt
                            .args()
                            .iter()
                            .zip(&tuple)
                            .all(|(a, s)| states[*s as usize].contains(a))
                        {
                            target.insert(owner);
                        }
                    }
                    if complete || !target.is_empty() {
                        let id = match state_index.get(&target) {
                            Some(id) => *id,
                            None => {
                                if states.len() >= max_states {
                                    return Err(Error::Budget(format!(
                                        "determinization needs more than {max_states} states"
                                    )));
                                }
                                let id = states.len() as u32;
                                states.push(target.clone());
                                state_index.insert(target, id);
                                id
                            }
                        };
                        index.insert(key.clone(), id);
                        transitions.push((letter, key.1, id));
                    }
                }
                // Advance the odometer over the states known at round start.
                let mut pos = 0;
                loop {
                    if pos == k {
                        break;
                    }
                    tuple[pos] += 1;
                    if (tuple[pos] as usize) < known {
                        break;
                    }
                    tuple[pos] = 0;
                    pos += 1;
                }
                if pos == k {
                    break;
                }
            }
        }
        if states.len() == known {
            break;
        }
    }
    Ok(Dfta {
        states,
        transitions,
        index,
        sink,
    })
}

fn state_name(g: &TreeGrammar, set: &BTreeSet<Nt>) -> String {
    if set.is_empty() {
        return "sink".to_owned();
    }
    set.iter().map(|n| g.name(*n)).collect::<Vec<_>>().join(".")
}

fn dfta_grammar(g: &TreeGrammar, dfta: &Dfta) -> TreeGrammar {
    let mut out = TreeGrammar::new(g.signature().clone());
    for s in &dfta.states {
        out.add_nonterminal(&state_name(g, s));
    }
    for (letter, children, target) in &dfta.transitions {
        let args = children.iter().map(|c| Nt(*c)).collect();
        out.push_alt(Nt(*target), letter.make_alt(args));
    }
    out
}

/// Deterministic grammar with one nonterminal per reachable nonempty subset
/// state; also returns the subset each nonterminal stands for.
pub fn determinize(g: &TreeGrammar) -> (TreeGrammar, Vec<BTreeSet<Nt>>) {
    let dfta = determinize_automaton(g, None);
    (dfta_grammar(g, &dfta), dfta.states)
}

/// Grammar for the terms over `alphabet` that are not in `L(root)`.
pub fn complement(g: &TreeGrammar, root: Nt, alphabet: &BTreeSet<Letter>) -> (TreeGrammar, Nt) {
    complement_bounded(g, root, alphabet, usize::MAX).expect("unbounded")
}

fn complement_bounded(
    g: &TreeGrammar,
    root: Nt,
    alphabet: &BTreeSet<Letter>,
    max_states: usize,
) -> Result<(TreeGrammar, Nt)> {
    let dfta = determinize_bounded(g, Some(alphabet), max_states)?;
    let mut out = dfta_grammar(g, &dfta);
    let co = out.add_nonterminal(&format!("co_{}", g.name(root)));
    for (letter, children, target) in &dfta.transitions {
        if !dfta.states[*target as usize].contains(&root) {
            let args = children.iter().map(|c| Nt(*c)).collect();
            out.push_alt(co, letter.make_alt(args));
        }
    }
    for letter in alphabet {
        if let Letter::Sym(f, n) = letter {
            let _ = out.signature_mut().add_symbol(*f, *n, false);
        }
    }
    let s = simplify(&out, &[co]);
    let root = s.get(co).expect("root kept");
    Ok((s.grammar, root))
}

/// `L(r1) ∖ L(r2)`.
pub fn difference(g1: &TreeGrammar, r1: Nt, g2: &TreeGrammar, r2: Nt) -> Result<(TreeGrammar, Nt)> {
    try_difference(g1, r1, g2, r2, usize::MAX)
}

/// [`difference`] with a cap on the states of the determinized subtrahend.
pub fn try_difference(
    g1: &TreeGrammar,
    r1: Nt,
    g2: &TreeGrammar,
    r2: Nt,
    max_states: usize,
) -> Result<(TreeGrammar, Nt)> {
    let mut alphabet = g1.letters();
    alphabet.extend(g2.letters());
    let (comp, co) = complement_bounded(g2, r2, &alphabet, max_states)?;
    let prod = intersect(g1, &comp, &[(r1, co)])?;
    let root = prod.get(r1, co).expect("root pair");
    Ok((prod.grammar, root))
}

/// Grammar `G^σ`: same nonterminals, with `x` added as a leaf of every `N`
/// such that `xσ ∈ L(N)`.
pub fn lift(g: &TreeGrammar, sigma: &Substitution) -> TreeGrammar {
    let rec = Recognizer::new(g);
    let mut leaves: Vec<Vec<Alt>> = vec![Vec::new(); g.len()];
    for (x, t) in sigma.iter() {
        for nt in rec.states(t) {
            leaves[nt.index()].push(Alt::Leaf(x));
        }
    }
    let mut out = g.clone();
    for nt in g.nonterminals() {
        let mut rule = std::mem::take(&mut leaves[nt.index()]);
        rule.extend(
            g.rule(nt)
                .iter()
                .filter(|a| !matches!(a, Alt::Leaf(x) if sigma.get(*x).is_some()))
                .cloned(),
        );
        out.set_rule(nt, rule);
    }
    out
}

/// Minimal weight and a witness attaining it, per nonterminal.
pub fn min_weight(g: &TreeGrammar, weights: &WeightMap) -> Vec<Option<(u64, Term)>> {
    let n = g.len();
    let mut best: Vec<Option<(u64, Term)>> = vec![None; n];
    let mut uses: Vec<Vec<(Nt, usize)>> = vec![Vec::new(); n];
    let mut missing: Vec<Vec<usize>> = Vec::with_capacity(n);
    let mut heap = BinaryHeap::new();
    for nt in g.nonterminals() {
        let mut counts = Vec::new();
        for (i, alt) in g.rule(nt).iter().enumerate() {
            counts.push(alt.args().len());
            for a in alt.args() {
                uses[a.index()].push((nt, i));
            }
            if alt.args().is_empty() {
                heap.push(Reverse((weights.letter(alt.letter()), nt, i)));
            }
        }
        missing.push(counts);
    }
    while let Some(Reverse((w, nt, i))) = heap.pop() {
        if best[nt.index()].is_some() {
            continue;
        }
        let alt = &g.rule(nt)[i];
        let witness = match alt {
            Alt::Leaf(x) => Term::Var(*x),
            Alt::App(f, args) => Term::App(
                *f,
                args.iter()
                    .map(|a| best[a.index()].as_ref().expect("finalized child").1.clone())
                    .collect(),
            ),
        };
        best[nt.index()] = Some((w, witness));
        for &(owner, j) in &uses[nt.index()] {
            let c = &mut missing[owner.index()][j];
            *c -= 1;
            if *c == 0 && best[owner.index()].is_none() {
                let alt = &g.rule(owner)[j];
                let cost = weights.letter(alt.letter())
                    + alt
                        .args()
                        .iter()
                        .map(|a| best[a.index()].as_ref().unwrap().0)
                        .sum::<u64>();
                heap.push(Reverse((cost, owner, j)));
            }
        }
    }
    best
}

/// Whether some instance `tσ` (with `σ` ranging over terms of the grammar's
/// alphabet, leaves included) lies in `L(nt)`.
pub fn instance_in_class(t: &Term, g: &TreeGrammar, nt: Nt) -> bool {
    if t.is_ground() {
        return Recognizer::new(g).accepts(nt, t);
    }
    let dfta = determinize_automaton(g, None);
    if dfta.states.is_empty() {
        return false;
    }
    let mut by_letter: HashMap<Letter, Vec<(&[u32], u32)>> = HashMap::new();
    for (letter, children, target) in &dfta.transitions {
        by_letter
            .entry(*letter)
            .or_default()
            .push((children, *target));
    }
    let mut occurrences: HashMap<Sym, usize> = HashMap::new();
    for sub in t.subterms() {
        if let Term::Var(x) = sub {
            *occurrences.entry(*x).or_default() += 1;
        }
    }
    let repeated: Vec<Sym> = t
        .vars_in_order()
        .into_iter()
        .filter(|x| occurrences[x] > 1)
        .collect();
    let all: BTreeSet<u32> = (0..dfta.states.len() as u32).collect();

    fn eval(
        t: &Term,
        fixed: &HashMap<Sym, u32>,
        all: &BTreeSet<u32>,
        by_letter: &HashMap<Letter, Vec<(&[u32], u32)>>,
    ) -> BTreeSet<u32> {
        match t {
            Term::Var(x) => match fixed.get(x) {
                Some(s) => BTreeSet::from([*s]),
                None => all.clone(),
            },
            Term::App(..) => {
                let children: Vec<BTreeSet<u32>> = t
                    .args()
                    .iter()
                    .map(|a| eval(a, fixed, all, by_letter))
                    .collect();
                if children.iter().any(BTreeSet::is_empty) {
                    return BTreeSet::new();
                }
                by_letter
                    .get(&Letter::of_term(t))
                    .into_iter()
                    .flatten()
                    .filter(|(cs, _)| cs.iter().zip(&children).all(|(c, set)| set.contains(c)))
                    .map(|(_, target)| *target)
                    .collect()
            }
        }
    }

    let k = repeated.len();
    let count = dfta.states.len() as u32;
    let mut assignment = vec![0u32; k];
    loop {
        let fixed: HashMap<Sym, u32> = repeated
            .iter()
            .copied()
            .zip(assignment.iter().copied())
            .collect();
        if eval(t, &fixed, &all, &by_letter)
            .iter()
            .any(|s| dfta.states[*s as usize].contains(&nt))
        {
            return true;
        }
        let mut pos = 0;
        while pos < k {
            assignment[pos] += 1;
            if assignment[pos] < count {
                break;
            }
            assignment[pos] = 0;
            pos += 1;
        }
        if pos == k {
            return false;
        }
    }
}

/// Grammar with a single nonterminal producing every term over `sig`
/// (plus the given leaves).
pub fn full_language(sig: &Signature, leaves: &[Sym]) -> (TreeGrammar, Nt) {
    let mut g = TreeGrammar::new(sig.clone());
    let any = g.add_nonterminal("Any");
    for x in leaves {
        g.push_alt(any, Alt::Leaf(*x));
    }
    for (f, info) in sig.symbols() {
        g.push_alt(any, Alt::App(f, vec![any; info.arity]));
    }
    (g, any)
}

/// The same grammar with variable leaves renamed; unmapped leaves stay.
pub fn rename_leaves(g: &TreeGrammar, names: &HashMap<Sym, Sym>) -> TreeGrammar {
    let mut out = g.clone();
    for nt in g.nonterminals() {
        let rule = g
            .rule(nt)
            .iter()
            .map(|a| match a {
                Alt::Leaf(x) => Alt::Leaf(names.get(x).copied().unwrap_or(*x)),
                other => other.clone(),
            })
            .collect();
        out.set_rule(nt, rule);
    }
    out
}

/// A grammar whose root produces the union of the given root languages.
pub fn union(parts: &[(&TreeGrammar, Nt)], name: &str) -> Result<(TreeGrammar, Nt)> {
    let mut sig = Signature::new();
    for (g, _) in parts {
        sig.merge(g.signature())?;
    }
    let mut out = TreeGrammar::new(sig);
    let root = out.add_nonterminal(name);
    for (g, r) in parts {
        let map = out.import(g)?;
        for alt in g.rule(*r) {
            let alt = match alt {
                Alt::App(f, args) => Alt::App(*f, args.iter().map(|a| map[a.index()]).collect()),
                Alt::Leaf(x) => Alt::Leaf(*x),
            };
            out.add_alt(root, alt);
        }
    }
    Ok((out, root))
}
