//! `satdrw`: Witt vectors, de Rham complexes and certified top-form vanishing.
//!
//! Exit codes: 0 success, 1 internal defect, 2 parse error,
//! 3 input outside the vanishing hypotheses, 4 failed verification.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod session;

use session::{Format, OrderArg, Preset, Session};

#[derive(Parser)]
#[command(name = "satdrw", version, about = "Witt vectors, de Rham complexes and certified top-form vanishing over F_p")]
struct Cli {
    /// Characteristic (default 2; a presentation on stdin carries its own)
    #[arg(long, global = true)]
    p: Option<u64>,
    /// Coefficient exponent N for Z/p^N (Dieudonné models; rings need 1)
    #[arg(long = "coeff-exp", global = true)]
    coeff_exp: Option<u32>,
    #[arg(long, global = true, value_enum)]
    order: Option<OrderArg>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long, global = true, value_enum)]
    preset: Option<Preset>,
    /// Comma-separated variable names, e.g. `x,y`
    #[arg(long, global = true, value_delimiter = ',')]
    vars: Option<Vec<String>>,
    /// Ideal generator (repeatable)
    #[arg(long, global = true)]
    ideal: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Truncated Witt vector arithmetic over the session ring
    Witt {
        /// Integer coordinates instead of ring elements
        #[arg(long)]
        integers: bool,
        #[command(subcommand)]
        op: WittOp,
    },
    /// Certificate that dx_1^...^dx_n vanishes in W_1 Omega^n
    Certify {
        /// Replay a certificate file instead of building one
        #[arg(long)]
        verify: Option<PathBuf>,
    },
    /// Differential p-closure of the ideal
    Closure,
    /// Kernel of k[t_1..t_n] -> R, t_i -> g_i
    Kernel {
        tuple: Vec<String>,
        /// Also certify dg_1^...^dg_n = 0
        #[arg(long)]
        certify: bool,
    },
    /// Krull dimension: the degree above which W Omega vanishes
    Dim,
    /// Top form in Omega^n and W_1 Omega^n
    OmegaTop,
    /// Checks on a finite Dieudonné complex model
    DieudonneCheck {
        /// `a1` or a path to a model JSON file
        #[arg(long, default_value = "a1")]
        model: String,
        #[arg(long, default_value_t = 4)]
        wmax: u64,
        /// Largest level r for the W_r comparisons (at most N)
        #[arg(long)]
        rmax: Option<u32>,
    },
    /// Random nonzero ideals drawn from the seed
    Sample {
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 3)]
        max_vars: usize,
        #[arg(long, default_value_t = 4)]
        max_degree: u32,
    },
}

/// Vectors are comma-separated coordinates, `(x, 1)` or `x,1`, or Witt vector JSON.
#[derive(Subcommand)]
pub enum WittOp {
    Add { x: String, y: String },
    Sub { x: String, y: String },
    Mul { x: String, y: String },
    Neg { x: String },
    /// Teichmüller lift [g]
    Teich {
        g: String,
        #[arg(short, long, default_value_t = 3)]
        level: usize,
    },
    /// F: W_r -> W_{r-1}
    Frobenius { x: String },
    Verschiebung { x: String },
    Ghost { x: String },
    /// F([g]) = [g]^p = [g^p]
    CheckFrobenius {
        g: String,
        #[arg(short, long, default_value_t = 3)]
        level: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let s = Session {
        p: cli.p,
        coeff_exp: cli.coeff_exp,
        order: cli.order,
        seed: cli.seed,
        format: cli.format,
        preset: cli.preset,
        vars: cli.vars,
        ideal: cli.ideal,
    };
    let result = match &cli.command {
        Command::Witt { integers, op } => commands::witt(&s, *integers, op),
        Command::Certify { verify } => commands::certify(&s, verify.as_ref()),
        Command::Closure => commands::closure(&s),
        Command::Kernel { tuple, certify } => commands::kernel(&s, tuple, *certify),
        Command::Dim => commands::dim(&s),
        Command::OmegaTop => commands::omega_top(&s),
        Command::DieudonneCheck { model, wmax, rmax } => commands::dieudonne_check(&s, model, *wmax, *rmax),
        Command::Sample { count, max_vars, max_degree } => commands::sample(&s, *count, *max_vars, *max_degree),
    };
    match result {
        Ok(text) => {
            println!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
