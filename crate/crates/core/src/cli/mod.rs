//! Command-line front end: expression syntax, evaluation and verbs.

pub mod commands;
pub mod eval;
pub mod syntax;

pub use commands::{execute, Outcome};

/// Run with the process arguments and return the exit code.
pub fn run() -> i32 {
    let out = execute(std::env::args_os());
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    out.exit
}
