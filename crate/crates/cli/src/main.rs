mod commands;
mod report;
mod scan;

use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use report::Format;

#[derive(Debug, Parser)]
#[command(name = "shuffle", version, about = "Shuffle algebra of power series over prime fields")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Clone, Args)]
pub struct Opts {
    /// Characteristic of the coefficient field.
    #[arg(long = "p", global = true, default_value_t = 2)]
    pub p: u32,
    /// Number of coefficients kept for one-variable series.
    #[arg(long, global = true, default_value_t = 64)]
    pub order: usize,
    /// Look for a fraction of at most this degree in the result.
    #[arg(long, global = true, value_name = "CAP")]
    pub reconstruct: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    pub format: Format,
    /// Seed for randomized generators.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Registered form to use (see `forms`).
    #[arg(long, global = true)]
    pub form: Option<String>,
    /// Registered inverse solver to use (see `forms`).
    #[arg(long, global = true)]
    pub solver: Option<String>,
    /// Leave timings out so identical jobs give identical reports.
    #[arg(long, global = true)]
    pub no_timing: bool,
    /// Words shorter than this are kept for NC series.
    #[arg(long, global = true, default_value_t = 8)]
    pub nc_order: usize,
    /// Number of NC variables; inferred from the input by default.
    #[arg(long, global = true)]
    pub vars: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Apply σ (or the form given by --form).
    Sigma { expr: String },
    /// Solve σ(Z) = A for Z with constant term 1.
    SigmaInv { expr: String },
    /// Apply σ̃ (p = 2).
    SigmaTilde { expr: String },
    /// Solve σ̃(Z) = A (p = 2).
    SigmaTildeInv { expr: String },
    /// Apply ψ (p = 2).
    Psi { expr: String },
    /// Solve ψ(Z) = A (p = 2).
    PsiInv { expr: String },
    /// Shuffle product of two series.
    Shuffle { a: String, b: String },
    /// Inverse for the shuffle product.
    ShuffleInv { expr: String },
    /// Evaluate an expression and print its expansion.
    Expand { expr: String },
    /// Find a fraction matching a series (degree cap from --reconstruct, default 16).
    Reconstruct { expr: String },
    /// Size of the σ-orbit of a polynomial over F_2.
    Orbit {
        poly: String,
        #[arg(long, default_value_t = 1 << 16)]
        budget: usize,
    },
    /// Degrees of the certified fractions σ^n(A) for n in a range.
    Growth {
        expr: String,
        #[arg(long, default_value_t = -4, allow_negative_numbers = true)]
        from: i64,
        #[arg(long, default_value_t = 4, allow_negative_numbers = true)]
        to: i64,
        #[arg(long, default_value_t = 128)]
        cap: usize,
    },
    /// Closure of a series under decimation.
    Kernel {
        expr: String,
        #[arg(long, default_value_t = 64)]
        cap: usize,
    },
    /// Rational, algebraic or unknown, as far as the prefix shows.
    Classify {
        expr: String,
        #[arg(long, default_value_t = 64)]
        kernel_cap: usize,
        #[arg(long, default_value_t = 64)]
        degree_cap: usize,
    },
    /// σ of a series in non-commuting variables x1, x2, ...
    NcSigma { expr: String },
    /// Solve σ(Z) = A in non-commuting variables.
    NcSigmaInv { expr: String },
    /// Shuffle product in non-commuting variables.
    NcShuffle { a: String, b: String },
    /// Shuffle inverse in non-commuting variables.
    NcShuffleInv { expr: String },
    /// Closure of an NC series under the shifts.
    NcClosure {
        expr: String,
        #[arg(long, default_value_t = 64)]
        cap: usize,
    },
    /// Hankel rank of an NC series; balanced blocks unless both sizes are given.
    NcHankel {
        expr: String,
        #[arg(long, requires = "cols")]
        rows: Option<usize>,
        #[arg(long, requires = "rows")]
        cols: Option<usize>,
    },
    /// Check the bundled identity table.
    #[command(alias = "verify-paper")]
    VerifyCorpus {
        /// Check a single entry.
        #[arg(long)]
        id: Option<String>,
    },
    /// Search rational preimages over a family of inputs.
    Scan(scan::ScanArgs),
    /// List the registered forms and solvers.
    Forms,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let result = match cli.cmd {
        Cmd::Scan(ref args) => scan::run(&cli.opts, args, &mut out),
        ref cmd => commands::run(&cli.opts, cmd).and_then(|r| {
            r.render(cli.opts.format, &mut out)?;
            Ok(r.status)
        }),
    };
    let _ = out.flush();
    match result {
        Ok(status) => ExitCode::from(status.exit_code()),
        // output piped into `head` and friends
        Err(e) if e.downcast_ref::<io::Error>().is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
