//! Command-line front end for `gglogic-core`: file formats and subcommands.
//!
//! Exit codes: 0 success or valid, 1 semantic failure, 2 parse or IO error,
//! 3 unknown symbol, 4 resource cap exceeded.

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use gglogic_core::lindenbaum::DEFAULT_CLOSURE_CAP;

pub mod commands;
pub mod error;
pub mod formats;

pub use commands::Outcome;
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "gglogic",
    version,
    about = "Workbench for frame-valued geometric logic"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Finite frames
    Frame {
        #[command(subcommand)]
        action: FrameAction,
    },
    /// Print the grade of a formula under an assignment
    Eval {
        interpretation: PathBuf,
        formula: String,
        /// Assignment such as `default=a,x1=b`
        #[arg(long, default_value = "")]
        assign: String,
    },
    /// Sequent validity in one interpretation
    Sequent {
        #[command(subcommand)]
        action: SequentAction,
    },
    /// Soundness fuzzing of the inference rules
    Rules {
        #[command(subcommand)]
        action: RulesAction,
    },
    /// Topological systems of formula classes
    Lindenbaum {
        #[command(subcommand)]
        action: LindenbaumAction,
    },
    /// L-topological systems
    System {
        #[command(subcommand)]
        action: SystemAction,
    },
    /// L-topologies of systems
    Topology {
        #[command(subcommand)]
        action: TopologyAction,
    },
    /// Theories of finite L-spaces
    Space {
        #[command(subcommand)]
        action: SpaceAction,
    },
    /// Check a propositional theory against a space
    Theory {
        #[command(subcommand)]
        action: TheoryAction,
    },
    /// Proof trees
    Derivation {
        #[command(subcommand)]
        action: DerivationAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum FrameAction {
    /// Validate a frame file
    Check {
        frame: PathBuf,
        /// Largest accepted frame
        #[arg(long, default_value_t = 64)]
        cap: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum SequentAction {
    /// VALID, or INVALID with the least failing assignment
    Check {
        interpretation: PathBuf,
        sequent: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum RulesAction {
    /// Fuzz every rule schema against random interpretations
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Cases per rule
        #[arg(long, default_value_t = 200)]
        cases: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum LindenbaumAction {
    /// Build the system generated by the formulas in a file, one per line
    Build {
        interpretation: PathBuf,
        generators: PathBuf,
        /// Explicit point, such as `x1=a`; repeatable. Defaults to every
        /// assignment of the generators' free variables.
        #[arg(long = "point")]
        points: Vec<String>,
        /// Largest accepted closure
        #[arg(long, default_value_t = DEFAULT_CLOSURE_CAP)]
        cap: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum SystemAction {
    /// Check the meet and join clauses
    Check { system: PathBuf },
    /// Check that distinct algebra elements are separated by points
    Spatial { system: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum TopologyAction {
    /// Extract the L-topology of a system as a space file
    Extract {
        system: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum SpaceAction {
    /// Emit the theory of a space and check its induced model
    Theorize {
        space: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum TheoryAction {
    /// Check every axiom at every point of a space
    Check { space: PathBuf, theory: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum DerivationAction {
    /// Check every node of a derivation file
    Check { derivation: PathBuf },
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    use Command::*;
    match &cli.command {
        Frame {
            action: FrameAction::Check { frame, cap },
        } => commands::frame_check(frame, *cap),
        Eval {
            interpretation,
            formula,
            assign,
        } => commands::eval(interpretation, assign, formula),
        Sequent {
            action:
                SequentAction::Check {
                    interpretation,
                    sequent,
                },
        } => commands::sequent_check(interpretation, sequent),
        Rules {
            action: RulesAction::Fuzz { seed, cases, out },
        } => commands::rules_fuzz(*seed, *cases, out.as_deref()),
        Lindenbaum {
            action:
                LindenbaumAction::Build {
                    interpretation,
                    generators,
                    points,
                    cap,
                    out,
                },
        } => commands::lindenbaum_build(interpretation, generators, points, *cap, out.as_deref()),
        System {
            action: SystemAction::Check { system },
        } => commands::system_check(system),
        System {
            action: SystemAction::Spatial { system },
        } => commands::system_spatial(system),
        Topology {
            action: TopologyAction::Extract { system, out },
        } => commands::topology_extract(system, out.as_deref()),
        Space {
            action: SpaceAction::Theorize { space, out },
        } => commands::space_theorize(space, out.as_deref()),
        Theory {
            action: TheoryAction::Check { space, theory },
        } => commands::theory_check(space, theory),
        Derivation {
            action: DerivationAction::Check { derivation },
        } => commands::derivation_check(derivation),
    }
}

/// Parses `args` (including the program name) and runs the command. Usage
/// errors exit with 2.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    match run(&cli) {
        Ok(outcome) => outcome,
        Err(e) => Outcome {
            code: e.exit_code(),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}
