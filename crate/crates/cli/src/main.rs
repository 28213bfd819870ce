//! `dtlf`: decide entailments, check refinement judgments, evaluate terms.
//!
//! Exit codes: 0 for a positive verdict, 1 for a negative or unknown one,
//! 2 for malformed input.

mod commands;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "dtlf", version, about = "Refinement type checking over a domain-theoretic logic")]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
    /// Truncation depth of temporal schemas (overrides file directives).
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// Longest Kleene chain tried for an unannotated fix (overrides file directives).
    #[arg(long, global = true)]
    pub nfix: Option<usize>,
    /// Unrolling depth of fix during evaluation (overrides file directives).
    #[arg(long, global = true)]
    pub fuel: Option<u32>,
    /// Rank of the finite-element universe used by the oracle and by eval.
    #[arg(long, global = true, default_value_t = 2)]
    pub rank: usize,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Base type declarations, lines `base Name = c1 c2 ...`.
    #[arg(long, global = true)]
    pub bases: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Decide `tau ; psi ; phi`, that is psi |- phi at tau after truncation.
    Entail {
        /// A file, `-` for stdin, or the input text itself.
        input: String,
    },
    /// Decide whether the conjunctive formula of `tau ; phi` is satisfiable.
    Consistent { input: String },
    /// Compile the formula of `tau ; phi` to finite elements.
    Compile { input: String },
    /// Check the judgments of judgment files (or one judgment given inline).
    Check {
        #[arg(required = true)]
        inputs: Vec<String>,
        /// Omit derivation traces from text output.
        #[arg(long)]
        brief: bool,
    },
    /// Evaluate a closed term to a finite approximation.
    Eval {
        term: String,
        /// Also decide whether the value is known to satisfy this formula.
        #[arg(long)]
        member: Option<String>,
    },
    /// Compare the decision procedures against the semantic oracle.
    Oracle {
        /// A single `tau ; phi` or `tau ; psi ; phi` query.
        input: Option<String>,
        /// Sweep every pair of conjunctive formulas at this type.
        #[arg(long, conflicts_with = "input")]
        sweep: Option<String>,
        /// Largest formula size of the sweep.
        #[arg(long, default_value_t = 4)]
        size: usize,
    },
    /// Check the bundled judgment corpus.
    Corpus {
        /// Bundled file names; all of them when empty.
        names: Vec<String>,
        /// Run sequentially instead of on the thread pool.
        #[arg(long)]
        sequential: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    // write errors (a closed pipe) are not worth a panic
    let emit = |s: &str| {
        let _ = std::io::stdout().lock().write_all(s.as_bytes());
    };
    let pretty = |v: &serde_json::Value| serde_json::to_string_pretty(v).unwrap_or_default() + "\n";
    match commands::run(&cli) {
        Ok(out) => {
            emit(&if json { pretty(&out.json) } else { out.text });
            ExitCode::from(if out.ok { 0 } else { 1 })
        }
        Err(e) => {
            if json {
                emit(&pretty(&serde_json::json!({ "error": e.to_string() })));
            }
            eprintln!("dtlf: {e}");
            ExitCode::from(2)
        }
    }
}
