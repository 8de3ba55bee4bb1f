use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// E-generalization with regular tree grammars.
#[derive(Parser, Debug)]
#[command(name = "eqgen", version, about)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct Common {
    /// Theory file (`sig`, `eq`, `carrier` directives).
    #[arg(long, global = true, conflicts_with = "builtin")]
    pub theory: Option<PathBuf>,
    /// Built-in theory, e.g. `peano`, `peano-if`, `lists`, `cube`.
    #[arg(long, global = true)]
    pub builtin: Option<String>,
    /// Carrier size: the largest number for Peano carriers, the longest
    /// word or list otherwise.
    #[arg(long, global = true)]
    pub carrier: Option<u64>,
    /// Maximum number of results.
    #[arg(long, global = true, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    pub limit: u64,
    /// Maximum result weight.
    #[arg(long, global = true)]
    pub max_weight: Option<u64>,
    /// Term weights for the enumeration order.
    #[arg(long, global = true, value_enum)]
    pub weights: Option<Weights>,
    /// Print JSON instead of `weight<TAB>term` lines.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for drawing lemma samples.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Weights {
    /// Every symbol and variable weighs 1.
    Size,
    /// Symbols weigh 1, variables 0.
    Unit,
    /// Editor commands weigh their keystroke count.
    Keystrokes,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the congruence-class grammar of the theory.
    Classgrammar,
    /// E-generalize ground terms.
    Antiunify {
        #[arg(required = true, num_args = 1..)]
        terms: Vec<String>,
    },
    /// Learn atom hypotheses from an example file.
    LearnAtom { examples: PathBuf },
    /// Learn determinate hypotheses from `p(s -> t)` examples.
    LearnDet { examples: PathBuf },
    /// E-generalize two ground clauses.
    Lgg { first: String, second: String },
    /// Constrained-clause generalization of two ground Horn clauses.
    LggCe { first: String, second: String },
    /// Lemma candidates for a term.
    Lemma(LemmaArgs),
    /// Construction laws for a series such as `0;1,4,9`.
    Series {
        series: String,
        /// Number of trailing elements to explain.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Suggest cursor-movement commands.
    Editor(EditorArgs),
    /// Operations on grammar files.
    GrammarOp(GrammarOpArgs),
}

#[derive(Args, Debug)]
pub struct LemmaArgs {
    /// The term `t1`; see `--vars` for which names are variables.
    pub term: Option<String>,
    /// TOML task file naming theory, term, samples and filters.
    #[arg(long)]
    pub task: Option<PathBuf>,
    /// Variables of the term; defaults to every name outside the signature.
    #[arg(long, value_delimiter = ',')]
    pub vars: Vec<String>,
    /// A sample substitution, e.g. `x=0,y=3,z=2`. Repeatable.
    #[arg(long = "sample")]
    pub samples: Vec<String>,
    /// Draw this many samples when none are given.
    #[arg(long, default_value_t = 3)]
    pub draw: usize,
    /// Values to draw samples from; defaults to the class representatives.
    #[arg(long, value_delimiter = ';')]
    pub values: Vec<String>,
    /// Require every variable of the term in each candidate.
    #[arg(long)]
    pub all_vars: bool,
    /// Keep candidates that are not in normal form.
    #[arg(long)]
    pub no_normal_form: bool,
}

#[derive(Args, Debug)]
pub struct EditorArgs {
    /// Movements `start:end`, e.g. `k2:b2`.
    #[arg(required = true, num_args = 1..)]
    pub moves: Vec<String>,
    /// Text file shown on screen; defaults to the built-in sample screen.
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Command subset to use, e.g. `lrud`; defaults to all of `lrudWBH`.
    #[arg(long)]
    pub commands: Option<String>,
    /// Print the position grammar instead of suggestions.
    #[arg(long)]
    pub grammar: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GrammarOp {
    Intersect,
    Difference,
    Union,
    Enumerate,
    Member,
    Empty,
    Simplify,
    Determinize,
}

#[derive(Args, Debug)]
pub struct GrammarOpArgs {
    #[arg(value_enum)]
    pub op: GrammarOp,
    #[arg(required = true, num_args = 1..=2)]
    pub files: Vec<PathBuf>,
    /// Root nonterminals, one per grammar file.
    #[arg(long, value_delimiter = ',')]
    pub roots: Vec<String>,
    /// Term to test with `member`.
    #[arg(long)]
    pub term: Option<String>,
}
