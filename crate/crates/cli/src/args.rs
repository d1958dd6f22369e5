use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub const DEFAULT_SEED: u64 = 20_240_917;

#[derive(Parser, Debug)]
#[command(
    name = "conformal-forge",
    version,
    about = "Exact checks for quadratic Lie conformal algebras built from Gel'fand-Dorfman data"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Novikov, Lie and GD-compatibility axioms on every tuple of the window.
    CheckAxioms(Common),
    /// Skew-symmetry and Jacobi for the λ-bracket on every tuple of the window.
    CheckConformal(Common),
    /// The four-variable identity for the symmetrized product.
    CheckTortken {
        #[command(flatten)]
        common: Common,
        /// printed | corrected
        #[arg(long, default_value = "corrected")]
        variant: String,
    },
    /// Table of mode brackets [a[m], b[n]].
    Coeff {
        #[command(flatten)]
        common: Common,
        /// Mode range "lo..hi".
        #[arg(long, default_value = "-1..1", allow_hyphen_values = true)]
        modes: String,
        /// Draw this many seeded random pairs instead of the full box.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Mode brackets against the closed-form formulas, plus sampled Jacobi.
    CoeffCrosscheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "-3..3", allow_hyphen_values = true)]
        modes: String,
        /// Seeded random pairs and triples; omit for the full box of pairs.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Which window elements lie in the span of all products x∗y.
    StarSpan {
        #[command(flatten)]
        common: Common,
        /// Target window; defaults to --window.
        #[arg(long, allow_hyphen_values = true)]
        targets: Option<String>,
    },
    /// Truncated ideal closure of the given generators.
    Closure {
        #[command(flatten)]
        common: Common,
        /// novikov | lie | nj | gd | conformal
        #[arg(long, default_value = "conformal")]
        kind: String,
        /// Generator such as "x_{(0)} + 2·∂ x_{(1)}"; repeatable.
        #[arg(long = "generator", required = true, allow_hyphen_values = true)]
        generators: Vec<String>,
        /// project | sound
        #[arg(long, default_value = "project")]
        policy: String,
    },
    /// Whether a candidate span is stable under the required products.
    IsIdeal {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "nj")]
        kind: String,
        #[arg(long, value_enum)]
        candidate: Candidate,
        /// Index removed by the `drop` candidate (default: the zero index).
        #[arg(long)]
        drop: Option<String>,
        /// Spanning elements for the `span` candidate; repeatable.
        #[arg(long = "element", allow_hyphen_values = true)]
        elements: Vec<String>,
    },
    /// Star-span, annihilator and seeded closure trials.
    SimplicityEvidence {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// The explicit isomorphism between A3 and Osborn's presentation.
    OsbornIso(Common),
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::CheckAxioms(c) | Command::CheckConformal(c) | Command::OsbornIso(c) => c,
            Command::CheckTortken { common, .. }
            | Command::Coeff { common, .. }
            | Command::CoeffCrosscheck { common, .. }
            | Command::StarSpan { common, .. }
            | Command::Closure { common, .. }
            | Command::IsIdeal { common, .. }
            | Command::SimplicityEvidence { common, .. } => common,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Candidate {
    /// Basis vectors x_α with α ≠ −2b.
    J,
    /// J together with every ∂^k x_α, k ≥ 1.
    B,
    /// The whole truncation.
    Full,
    /// Every ∂-free basis vector except --drop.
    Drop,
    /// The span of --element values.
    Span,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expect {
    Pass,
    Fail,
    /// No expectation; any verdict exits 0.
    None,
}

#[derive(Args, Debug)]
pub struct Common {
    /// Vir, Cur, A1, CL1, A2, CL2, A3, CL3, CL3_b0, OsbornA, or `table`.
    #[arg(long)]
    pub family: Option<String>,
    /// Generators of Δ, e.g. "1" or "1,i".
    #[arg(long, default_value = "1")]
    pub delta: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub b: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub c: String,
    /// Replace the bracket by k(a∘b − b∘a) (A1, A2, A3, OsbornA).
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<String>,
    /// Images of the Δ generators under φ, e.g. "1/5" or "1,0".
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<String>,
    /// Skew form Gram matrix, rows separated by ';', e.g. "0,1;-1,0".
    #[arg(long, allow_hyphen_values = true)]
    pub form: Option<String>,
    /// JSON structure table (Lie table for Cur, full GD data for `table`).
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Build CL2 even when 2b ∈ Δ.
    #[arg(long = "override")]
    pub allow_2b_in_delta: bool,
    /// "a..b" per component, joined by " x "; names or `all` for tables.
    #[arg(long, allow_hyphen_values = true)]
    pub window: Option<String>,
    /// Extended window for closures; defaults to pairwise sums of --window.
    #[arg(long, allow_hyphen_values = true)]
    pub window_ext: Option<String>,
    /// Bound on ∂-degrees in truncations.
    #[arg(long, default_value_t = 2)]
    pub dpow: u32,
    /// Overridden by CONFORMAL_FORGE_SEED when set.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Write reports here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Override the built-in expectation used for the exit code.
    #[arg(long, value_enum)]
    pub expect: Option<Expect>,
}
