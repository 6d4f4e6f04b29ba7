//! `restrule`: batch front end for the restriction-rule workbench.

mod commands;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "restrule",
    version,
    about = "Restriction rules over finite structures"
)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Args, Clone, Default)]
pub struct Source {
    /// Structure file (`structure <name> over <vocab>`).
    #[arg(long)]
    pub structure: Option<PathBuf>,
    /// Vocabulary file; overrides the one named in file headers.
    #[arg(long)]
    pub vocab: Option<PathBuf>,
}

#[derive(Args, Clone, Default)]
pub struct System {
    /// Theta file: one formula with one free variable per line.
    #[arg(long)]
    pub theta: Option<PathBuf>,
    /// `classical`, `s-rule:<terms file>` or `theta-rule:<theta file>`.
    #[arg(long)]
    pub rule: Option<String>,
    /// Relativization predicate for the (Θ,U)-rule.
    #[arg(long, value_name = "U")]
    pub relativize: Option<String>,
}

#[derive(Args, Clone, Default)]
pub struct Budget {
    #[arg(long)]
    pub max_width: Option<usize>,
    #[arg(long)]
    pub max_block: Option<usize>,
}

#[derive(Args, Clone, Default)]
pub struct Saturation {
    #[arg(long)]
    pub theory: Option<PathBuf>,
    /// `depth:<n>` or a file of sentences.
    #[arg(long, default_value = "depth:2")]
    pub universe: String,
    /// Number of restriction layers, or `fixpoint`.
    #[arg(long, default_value = "fixpoint")]
    pub steps: String,
}

#[derive(Subcommand)]
enum Verb {
    /// Parse a sentence and print it in normal form.
    Parse {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        theory: Option<PathBuf>,
        #[arg(long)]
        sentence: String,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Evaluate a sentence in a structure.
    Eval {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        sentence: String,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// The pointwise definable part with defining formulas.
    Pd {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// The diagram Dg(A) in theory format.
    Diagram {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// The generalized diagram Dg_Θ(A), or Dg^U_Θ(A) with --relativize.
    Gdiagram {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        theta: Option<PathBuf>,
        #[arg(long, value_name = "U")]
        relativize: Option<String>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Decide a sentence from the diagram and emit its derivation.
    Decide {
        #[command(flatten)]
        src: Source,
        #[command(flatten)]
        sys: System,
        #[command(flatten)]
        budget: Budget,
        #[arg(long)]
        sentence: String,
        #[arg(long)]
        emit_proof: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Saturate a theory and report the fixpoint.
    Saturate {
        #[command(flatten)]
        src: Source,
        #[command(flatten)]
        sys: System,
        #[command(flatten)]
        sat: Saturation,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Print every stage of a saturation.
    Tower {
        #[command(flatten)]
        src: Source,
        #[command(flatten)]
        sys: System,
        #[command(flatten)]
        sat: Saturation,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Check a JSON proof trace against a theory or a structure's diagram.
    CheckProof {
        proof: PathBuf,
        #[command(flatten)]
        src: Source,
        #[command(flatten)]
        sys: System,
        #[command(flatten)]
        budget: Budget,
        #[arg(long)]
        theory: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Check a modal Hilbert derivation.
    GlpCheck {
        proof: PathBuf,
        #[arg(long, default_value_t = restrule::glp::DEFAULT_DELTA)]
        delta: usize,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Interpret a modal formula over a saturation tower.
    GlpInterp {
        formula: String,
        /// `p=<sentence>`, repeatable.
        #[arg(long = "assign", value_name = "VAR=SENTENCE")]
        assign: Vec<String>,
        #[command(flatten)]
        src: Source,
        #[command(flatten)]
        sys: System,
        #[command(flatten)]
        sat: Saturation,
        #[arg(long, default_value_t = restrule::glp::DEFAULT_DELTA)]
        delta: usize,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

/// A failed command: exit status 1 for domain errors, 2 for usage errors.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn domain(message: impl ToString) -> Self {
        Failure {
            code: 1,
            message: message.to_string(),
        }
    }

    pub fn usage(message: impl ToString) -> Self {
        Failure {
            code: 2,
            message: message.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.verb {
        Verb::Parse {
            src,
            theory,
            sentence,
            json,
        } => commands::parse(&src, theory.as_deref(), &sentence, json.as_deref()),
        Verb::Eval {
            src,
            sentence,
            json,
        } => commands::eval(&src, &sentence, json.as_deref()),
        Verb::Pd { src, json } => commands::pd(&src, json.as_deref()),
        Verb::Diagram { src, json } => commands::diagram(&src, json.as_deref()),
        Verb::Gdiagram {
            src,
            theta,
            relativize,
            json,
        } => commands::gdiagram(
            &src,
            theta.as_deref(),
            relativize.as_deref(),
            json.as_deref(),
        ),
        Verb::Decide {
            src,
            sys,
            budget,
            sentence,
            emit_proof,
            json,
        } => commands::decide(
            &src,
            &sys,
            &budget,
            &sentence,
            emit_proof.as_deref(),
            json.as_deref(),
        ),
        Verb::Saturate {
            src,
            sys,
            sat,
            json,
        } => commands::saturate(&src, &sys, &sat, false, json.as_deref()),
        Verb::Tower {
            src,
            sys,
            sat,
            json,
        } => commands::saturate(&src, &sys, &sat, true, json.as_deref()),
        Verb::CheckProof {
            proof,
            src,
            sys,
            budget,
            theory,
            json,
        } => commands::check_proof(
            &proof,
            &src,
            &sys,
            &budget,
            theory.as_deref(),
            json.as_deref(),
        ),
        Verb::GlpCheck { proof, delta, json } => {
            commands::glp_check(&proof, delta, json.as_deref())
        }
        Verb::GlpInterp {
            formula,
            assign,
            src,
            sys,
            sat,
            delta,
            json,
        } => commands::glp_interp(&formula, &assign, &src, &sys, &sat, delta, json.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
