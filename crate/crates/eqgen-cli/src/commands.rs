use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use eqgen::apps::editor::{
    editor_grammar, editor_suggest, Command as EditorCommand, EditorWorld, Position, SAMPLE_SCREEN,
};
use eqgen::apps::lemma::{sample_substitutions, suggest_lemmas, LemmaTask};
use eqgen::apps::series::{series_law, SeriesTask};
use eqgen::automata::{
    determinize, difference, intersect, is_empty, membership, simplify, union, WeightMap,
};
use eqgen::egen::egen;
use eqgen::enumerate::{Enumerator, Limits};
use eqgen::learn::{
    learn_atom, learn_atom_determinate, lgg_ce, lgg_e, Clause, Examples, HornClause, Literal, Slot,
    DEFAULT_SUBSTITUTION_BUDGET,
};
use eqgen::syntax::{parse_term_with, ParseOptions};
use eqgen::theory::EquationalTheory;
use eqgen::{Error, Nt, Substitution, Sym, Term, TreeGrammar};
use serde::Deserialize;
use serde_json::json;

use crate::args::{Cli, Command, Common, EditorArgs, GrammarOp, GrammarOpArgs, LemmaArgs, Weights};
use crate::output::{Report, Section};

/// Why an invocation did not succeed.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Library(Error),
    Empty(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Library(e) => match e {
                Error::Parse { .. }
                | Error::UnknownSymbol(_)
                | Error::Arity { .. }
                | Error::UnknownNonterminal(_) => 1,
                Error::Theory(_) | Error::Budget(_) | Error::Invalid(_) => 2,
            },
            Failure::Empty(_) => 3,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Library(e)
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

pub fn run(cli: &Cli, out: &mut impl Write) -> Outcome<()> {
    let common = &cli.common;
    let report = match &cli.command {
        Command::Classgrammar => classgrammar(common)?,
        Command::Antiunify { terms } => antiunify(common, terms)?,
        Command::LearnAtom { examples } => learn_atom_cmd(common, examples)?,
        Command::LearnDet { examples } => learn_det(common, examples)?,
        Command::Lgg { first, second } => lgg(common, first, second)?,
        Command::LggCe { first, second } => lgg_ce_cmd(common, first, second)?,
        Command::Lemma(args) => lemma(common, args)?,
        Command::Series { series, k } => series_cmd(common, series, *k)?,
        Command::Editor(args) => editor(common, args)?,
        Command::GrammarOp(args) => grammar_op(common, args)?,
    };
    report
        .write(out, common.json)
        .map_err(|e| Failure::Usage(format!("cannot write output: {e}")))?;
    if report.is_empty() {
        return Err(Failure::Empty("empty result".into()));
    }
    Ok(())
}

fn read(path: &Path) -> Outcome<String> {
    fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read `{}`: {e}", path.display())))
}

fn theory_from(
    builtin: Option<&str>,
    file: Option<&Path>,
    carrier: Option<u64>,
) -> Outcome<EquationalTheory> {
    match (builtin, file) {
        (Some(name), _) => Ok(EquationalTheory::builtin(name, carrier)?),
        (None, Some(path)) => {
            let mut th = EquationalTheory::parse(&read(path)?)?;
            if let Some(bound) = carrier {
                th.carrier = th.carrier.map(|c| c.with_bound(bound));
            }
            Ok(th)
        }
        (None, None) => Err(Failure::Usage(
            "give a theory with --builtin NAME or --theory FILE".into(),
        )),
    }
}

fn theory(common: &Common) -> Outcome<EquationalTheory> {
    theory_from(
        common.builtin.as_deref(),
        common.theory.as_deref(),
        common.carrier,
    )
}

fn limits(common: &Common) -> Limits {
    Limits {
        max_count: Some(common.limit as usize),
        max_weight: common.max_weight,
    }
}

fn weights(common: &Common) -> Outcome<WeightMap> {
    match common.weights.unwrap_or(Weights::Size) {
        Weights::Size => Ok(WeightMap::size()),
        Weights::Unit => Ok(WeightMap::unit()),
        Weights::Keystrokes => Err(Failure::Usage(
            "keystroke weights only apply to `editor`".into(),
        )),
    }
}

fn ground_term(th: &EquationalTheory, text: &str) -> Outcome<Term> {
    let t = th.parse_term(text)?;
    if !t.is_ground() {
        return Err(Failure::Library(Error::Invalid(format!(
            "`{t}` is not ground"
        ))));
    }
    Ok(t)
}

fn rendered(
    items: impl Iterator<Item = (u64, Term)>,
    show: impl Fn(&Term) -> String,
) -> Vec<(u64, String)> {
    items.map(|(w, t)| (w, show(&t))).collect()
}

fn classgrammar(common: &Common) -> Outcome<Report> {
    let cg = theory(common)?.compile()?;
    let roots = cg
        .classes
        .iter()
        .map(|c| cg.grammar.name(*c).to_owned())
        .collect();
    Ok(Report::Grammar {
        command: "classgrammar",
        text: cg.grammar.to_string(),
        roots,
    })
}

fn antiunify(common: &Common, terms: &[String]) -> Outcome<Report> {
    let th = theory(common)?;
    let mut cg = th.compile()?;
    let mut roots = Vec::with_capacity(terms.len());
    for text in terms {
        let t = ground_term(&th, text)?;
        roots.push(cg.class_nt_of(&t)?);
    }
    let generalization = egen(&cg, &roots)?;
    let stream = Enumerator::new(
        &[(&generalization.grammar, generalization.root)],
        &weights(common)?,
        limits(common),
    )?;
    Ok(Report::ranked(
        "antiunify",
        rendered(stream, Term::to_string),
    ))
}

fn examples(th: &EquationalTheory, path: &Path) -> Outcome<Examples> {
    Ok(Examples::parse(&read(path)?, &th.parse_options())?)
}

fn learn_atom_cmd(common: &Common, path: &Path) -> Outcome<Report> {
    let th = theory(common)?;
    let mut cg = th.compile()?;
    let ex = examples(&th, path)?;
    let predicate = ex
        .predicate
        .ok_or_else(|| Failure::Library(Error::Invalid("the example file is empty".into())))?;
    let learned = learn_atom(
        &mut cg,
        predicate,
        &ex.positives,
        &ex.negatives,
        DEFAULT_SUBSTITUTION_BUDGET,
    )?;
    let stream = learned.set.stream(&weights(common)?, limits(common))?;
    Ok(Report::ranked(
        "learn-atom",
        rendered(stream, |t| learned.atom(t).to_string()),
    ))
}

fn learn_det(common: &Common, path: &Path) -> Outcome<Report> {
    let th = theory(common)?;
    let mut cg = th.compile()?;
    let ex = examples(&th, path)?;
    let predicate = ex
        .predicate
        .ok_or_else(|| Failure::Library(Error::Invalid("the example file is empty".into())))?;
    let set = learn_atom_determinate(&mut cg, &ex.positive_pairs, &ex.negative_pairs)?;
    let weights = weights(common)?;
    let mut sections = Vec::with_capacity(set.entries.len());
    for entry in &set.entries {
        let stream = entry.stream(&[], &weights, limits(common))?;
        let results = rendered(stream, |t| format!("{predicate}({} -> {t})", entry.pattern));
        let indices: Vec<usize> = entry.indices.iter().map(|i| i + 1).collect();
        let label = format!(
            "examples {{{}}}, input {}",
            indices
                .iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join(","),
            entry.pattern
        );
        sections.push(
            Section::labelled(label, results)
                .with_meta("examples", json!(indices))
                .with_meta("input", json!(entry.pattern.to_string())),
        );
    }
    Ok(Report::Ranked {
        command: "learn-det",
        sections,
    })
}

fn slot_section(
    label: String,
    slot: &Slot,
    show: impl Fn(&Term) -> String,
    common: &Common,
) -> Outcome<Section> {
    let stream = Enumerator::new(
        &[(&slot.grammar, slot.root)],
        &weights(common)?,
        limits(common),
    )?;
    Ok(Section::labelled(label, rendered(stream, show)))
}

fn lgg(common: &Common, first: &str, second: &str) -> Outcome<Report> {
    let th = theory(common)?;
    let mut cg = th.compile()?;
    let opts = th.parse_options();
    let c1 = Clause::parse(first, &opts)?;
    let c2 = Clause::parse(second, &opts)?;
    let result = lgg_e(&mut cg, &c1, &c2)?;
    let mut sections = Vec::with_capacity(result.slots.len());
    for (slot, (i, j)) in result.slots.iter().zip(&result.pairs) {
        let label = format!("literals {} and {}", c1.literals[*i], c2.literals[*j]);
        let show = |t: &Term| {
            Literal {
                positive: slot.positive,
                predicate: slot.predicate,
                arg: t.clone(),
            }
            .to_string()
        };
        sections.push(
            slot_section(label, slot, show, common)?.with_meta("pair", json!([i + 1, j + 1])),
        );
    }
    Ok(Report::Ranked {
        command: "lgg",
        sections,
    })
}

fn lgg_ce_cmd(common: &Common, first: &str, second: &str) -> Outcome<Report> {
    let th = theory(common)?;
    let mut cg = th.compile()?;
    let opts = th.parse_options();
    let c1 = HornClause::parse(first, &opts)?;
    let c2 = HornClause::parse(second, &opts)?;
    let result = lgg_ce(&mut cg, &c1, &c2)?;
    let pattern = result.pattern.clone();
    let head_show = |t: &Term| {
        Literal::pos(
            result.predicate.as_str(),
            Term::tuple(vec![pattern.clone(), t.clone()]),
        )
        .to_string()
    };
    let mut sections = vec![slot_section(
        format!("head, input {pattern}"),
        &result.head,
        head_show,
        common,
    )?
    .with_meta("input", json!(pattern.to_string()))];
    for (slot, (i, j)) in result.body.iter().zip(&result.pairs) {
        let label = format!("body literals {} and {}", c1.body[*i], c2.body[*j]);
        let show = |t: &Term| Literal::pos(slot.predicate.as_str(), t.clone()).to_string();
        sections.push(
            slot_section(label, slot, show, common)?.with_meta("pair", json!([i + 1, j + 1])),
        );
    }
    Ok(Report::Ranked {
        command: "lgg-ce",
        sections,
    })
}

/// A lemma task file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct LemmaFile {
    builtin: Option<String>,
    theory: Option<String>,
    carrier: Option<u64>,
    term: Option<String>,
    vars: Option<Vec<String>>,
    #[serde(default)]
    samples: Vec<BTreeMap<String, toml::Value>>,
    all_vars: Option<bool>,
    normal_form: Option<bool>,
}

/// Splits at commas outside parentheses.
fn split_top(text: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '(' | '⟨' => depth += 1,
            ')' | '⟩' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&text[start..]);
    parts
        .into_iter()
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .collect()
}

fn lemma_vars(
    th: &EquationalTheory,
    text: &str,
    declared: &[String],
) -> Outcome<(ParseOptions, Term)> {
    let mut opts = th.parse_options();
    if declared.is_empty() {
        let probe = parse_term_with(text, &opts)?;
        let free: Vec<Sym> = probe
            .symbols()
            .into_iter()
            .filter(|s| !th.signature.contains(*s))
            .collect();
        opts = opts.with_vars(free);
    } else {
        opts = opts.with_vars(declared.iter().map(|v| Sym::new(v)));
    }
    let t = parse_term_with(text, &opts)?;
    th.signature.check_term(&t)?;
    Ok((opts, t))
}

fn sample_value(th: &EquationalTheory, value: &toml::Value) -> Outcome<Term> {
    match value {
        toml::Value::Integer(n) if *n >= 0 => Ok(Term::numeral(*n as usize)),
        toml::Value::String(s) => ground_term(th, s),
        other => Err(Failure::Usage(format!("bad sample value `{other}`"))),
    }
}

fn lemma(common: &Common, args: &LemmaArgs) -> Outcome<Report> {
    let file: LemmaFile = match &args.task {
        Some(path) => toml::from_str(&read(path)?)
            .map_err(|e| Failure::Usage(format!("bad task file: {e}")))?,
        None => LemmaFile::default(),
    };
    let builtin = common.builtin.as_deref().or(file.builtin.as_deref());
    let theory_path = common
        .theory
        .clone()
        .or(file.theory.as_ref().map(Into::into));
    let th = theory_from(
        builtin,
        theory_path.as_deref(),
        common.carrier.or(file.carrier),
    )?;
    let mut cg = th.compile()?;
    let text = args
        .term
        .as_deref()
        .or(file.term.as_deref())
        .ok_or_else(|| Failure::Usage("give the term to find lemmas for".into()))?;
    let declared = if args.vars.is_empty() {
        file.vars.clone().unwrap_or_default()
    } else {
        args.vars.clone()
    };
    let (_, rhs) = lemma_vars(&th, text, &declared)?;
    let vars = rhs.vars_in_order();
    let mut samples = Vec::new();
    for spec in &args.samples {
        let mut sigma = Substitution::new();
        for binding in split_top(spec) {
            let (name, value) = binding.split_once('=').ok_or_else(|| {
                Failure::Usage(format!("expected `var=value`, found `{binding}`"))
            })?;
            sigma.insert(Sym::new(name.trim()), ground_term(&th, value)?);
        }
        samples.push(sigma);
    }
    if samples.is_empty() {
        for table in &file.samples {
            let mut sigma = Substitution::new();
            for (name, value) in table {
                sigma.insert(Sym::new(name), sample_value(&th, value)?);
            }
            samples.push(sigma);
        }
    }
    if samples.is_empty() {
        let values = if args.values.is_empty() {
            cg.representatives.clone()
        } else {
            args.values
                .iter()
                .map(|v| ground_term(&th, v))
                .collect::<Outcome<Vec<_>>>()?
        };
        samples = sample_substitutions(&vars, &values, args.draw, common.seed)?;
    }
    let mut task = LemmaTask::new(rhs, samples);
    task.require_normal_form = !args.no_normal_form && file.normal_form.unwrap_or(true);
    if args.all_vars || file.all_vars.unwrap_or(false) {
        task.var_lower = vars;
    }
    let candidates = suggest_lemmas(&mut cg, &th.signature, &th.rewrite_system()?, &task)?;
    let stream = candidates.stream(&weights(common)?, limits(common))?;
    Ok(Report::ranked("lemma", rendered(stream, Term::to_string)))
}

fn series_cmd(common: &Common, text: &str, k: Option<usize>) -> Outcome<Report> {
    let mut cg = theory(common)?.compile()?;
    let task = SeriesTask::parse(text, k)?;
    let laws = series_law(&mut cg, &task)?;
    let stream = laws.stream(&weights(common)?, limits(common))?;
    Ok(Report::ranked("series", rendered(stream, Term::to_string)))
}

fn editor(common: &Common, args: &EditorArgs) -> Outcome<Report> {
    let text = match &args.file {
        Some(path) => read(path)?,
        None => SAMPLE_SCREEN.to_owned(),
    };
    let commands = match &args.commands {
        Some(names) => names
            .chars()
            .map(|c| {
                EditorCommand::from_symbol(&c.to_string())
                    .ok_or_else(|| Failure::Usage(format!("unknown editor command `{c}`")))
            })
            .collect::<Outcome<Vec<_>>>()?,
        None => EditorCommand::ALL.to_vec(),
    };
    let world = EditorWorld::new(&text, commands);
    let eg = editor_grammar(&world);
    if args.grammar {
        return Ok(Report::Grammar {
            command: "editor",
            text: eg.grammar.to_string(),
            roots: Vec::new(),
        });
    }
    let mut moves = Vec::with_capacity(args.moves.len());
    for m in &args.moves {
        let (from, to) = m
            .split_once(':')
            .ok_or_else(|| Failure::Usage(format!("expected `start:end`, found `{m}`")))?;
        moves.push((Position::parse(from.trim())?, Position::parse(to.trim())?));
    }
    let weights = match common.weights {
        Some(Weights::Keystrokes) => world.weights(true),
        Some(Weights::Size) => WeightMap::size(),
        Some(Weights::Unit) | None => world.weights(false),
    };
    let suggestions = editor_suggest(&eg, &moves)?;
    let stream = suggestions.stream(&weights, limits(common))?;
    Ok(Report::ranked("editor", rendered(stream, Term::to_string)))
}

fn root_of(g: &TreeGrammar, roots: &[String], i: usize) -> Outcome<Nt> {
    match roots.get(i) {
        Some(name) => Ok(g.lookup(name)?),
        None => g.nonterminals().next().ok_or_else(|| {
            Failure::Library(Error::Invalid("the grammar has no nonterminals".into()))
        }),
    }
}

fn grammar_report(g: &TreeGrammar, root: Nt) -> Outcome<Report> {
    if is_empty(g, root) {
        return Err(Failure::Empty(format!(
            "the language of `{}` is empty",
            g.name(root)
        )));
    }
    let s = simplify(g, &[root]);
    let root = s.get(root).expect("root kept");
    Ok(Report::Grammar {
        command: "grammar-op",
        text: s.grammar.to_string(),
        roots: vec![s.grammar.name(root).to_owned()],
    })
}

fn grammar_op(common: &Common, args: &GrammarOpArgs) -> Outcome<Report> {
    let grammars = args
        .files
        .iter()
        .map(|p| Ok(TreeGrammar::parse(&read(p)?, None)?))
        .collect::<Outcome<Vec<_>>>()?;
    let roots = grammars
        .iter()
        .enumerate()
        .map(|(i, g)| root_of(g, &args.roots, i))
        .collect::<Outcome<Vec<_>>>()?;
    let binary = matches!(
        args.op,
        GrammarOp::Intersect | GrammarOp::Difference | GrammarOp::Union
    );
    if binary != (grammars.len() == 2) {
        return Err(Failure::Usage(format!(
            "`{:?}` takes {} grammar file(s)",
            args.op,
            if binary { 2 } else { 1 }
        )));
    }
    let (g, r) = (&grammars[0], roots[0]);
    match args.op {
        GrammarOp::Intersect => {
            let prod = intersect(g, &grammars[1], &[(r, roots[1])])?;
            grammar_report(&prod.grammar, prod.get(r, roots[1]).expect("root pair"))
        }
        GrammarOp::Difference => {
            let (d, root) = difference(g, r, &grammars[1], roots[1])?;
            grammar_report(&d, root)
        }
        GrammarOp::Union => {
            let (u, root) = union(&[(g, r), (&grammars[1], roots[1])], "Union")?;
            grammar_report(&u, root)
        }
        GrammarOp::Enumerate => {
            let stream = Enumerator::new(&[(g, r)], &weights(common)?, limits(common))?;
            Ok(Report::ranked(
                "grammar-op",
                rendered(stream, Term::to_string),
            ))
        }
        GrammarOp::Member => {
            let text = args
                .term
                .as_deref()
                .ok_or_else(|| Failure::Usage("`member` needs --term".into()))?;
            let mut opts = ParseOptions::new().with_signature(g.signature());
            opts.declared_vars.extend(g.leaves());
            let t = parse_term_with(text, &opts)?;
            Ok(Report::Verdict {
                command: "grammar-op",
                holds: membership(g, r, &t)?,
            })
        }
        GrammarOp::Empty => Ok(Report::Verdict {
            command: "grammar-op",
            holds: is_empty(g, r),
        }),
        GrammarOp::Simplify => grammar_report(g, r),
        GrammarOp::Determinize => {
            let (d, _) = determinize(g);
            Ok(Report::Grammar {
                command: "grammar-op",
                text: d.to_string(),
                roots: Vec::new(),
            })
        }
    }
}
