mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{load_config, OutputFormat, Overrides};

#[derive(Parser, Debug)]
#[command(name = "symval", version, about = "Symmetric-power L-functions and their special values")]
pub struct Cli {
    /// TOML config file (default: $SYMVAL_CONFIG)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// working precision in bits
    #[arg(long, global = true)]
    prec: Option<u32>,
    /// maximum number of Dirichlet coefficients
    #[arg(long, global = true)]
    budget: Option<usize>,
    /// partial | naive
    #[arg(long, global = true)]
    bad_prime_mode: Option<String>,
    /// e.g. 10^30
    #[arg(long, global = true)]
    height_cap: Option<String>,
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    #[arg(long, global = true)]
    parallelism: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Critical integers of Sym^n for weight k
    Critical {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
    },
    /// Predicted period exponents at a critical m, or the folded exponent of a pair
    Predict {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        m: i64,
        /// second point; prints the ratio exponent for (m, m2)
        #[arg(long)]
        m2: Option<i64>,
    },
    /// Local Sym^n Euler factor at p
    Euler {
        #[command(flatten)]
        form: FormArgs,
        #[arg(long)]
        p: u64,
    },
    /// Dirichlet coefficients of Sym^n
    Coeffs {
        #[command(flatten)]
        form: FormArgs,
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
    /// L-values at the given points
    Lvalue {
        #[command(flatten)]
        source: LArgs,
        /// evaluation point, e.g. 12 or 6.5+2i; repeatable
        #[arg(long = "s", required = true, allow_hyphen_values = true)]
        points: Vec<String>,
        /// also write the values to this CSV file
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Functional-equation self-check
    Fecheck {
        #[command(flatten)]
        source: LArgs,
        #[arg(long, default_value_t = 5)]
        samples: usize,
    },
    /// Verification harnesses
    Verify {
        #[command(subcommand)]
        test: VerifyCommand,
    },
    /// Euler-factor check of the dihedral decomposition
    Dihedral {
        #[command(flatten)]
        hecke: HeckeArgs,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 200)]
        bound: u64,
    },
    /// Cuspidal range and cohomological weights
    Cohomology {
        /// print b_n and t_n
        #[arg(long)]
        range: Option<u32>,
        /// "n,k,s,eps" with s rational
        #[arg(long)]
        clozel: Option<String>,
        /// "w;l1,l2,..."
        #[arg(long, allow_hyphen_values = true)]
        admissible: Option<String>,
        /// "k1,k2"
        #[arg(long)]
        rankin: Option<String>,
    },
    /// Dirichlet character data and Gauss sums
    Character {
        /// e.g. 5:[2]
        #[arg(long = "char")]
        character: Option<String>,
        /// list the primitive characters of this modulus
        #[arg(long)]
        modulus: Option<u64>,
    },
}

#[derive(Subcommand, Debug)]
pub enum VerifyCommand {
    /// Period-cancelling ratios L(m1)/L(m2)
    Deligne {
        #[arg(long, default_value = "delta")]
        form: String,
        #[arg(long)]
        n: u32,
        /// "m1,m2;m1,m2"; all cancelling pairs when omitted
        #[arg(long)]
        pairs: Option<String>,
        /// confirmation precision (default twice --prec)
        #[arg(long)]
        confirm: Option<u32>,
    },
    /// Twisted against untwisted values
    Twist {
        #[arg(long, default_value = "delta")]
        form: String,
        #[arg(long)]
        n: u32,
        #[arg(long = "char")]
        character: String,
        /// critical points, comma separated
        #[arg(long, allow_hyphen_values = true)]
        m: String,
        #[arg(long)]
        confirm: Option<u32>,
    },
    /// Dihedral decomposition at the level of values
    Dihedral {
        #[command(flatten)]
        hecke: HeckeArgs,
        #[arg(long)]
        n: u32,
        #[arg(long = "s", allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value_t = 1000)]
        bound: u64,
        /// bad-prime mode of the right-hand side (default: same as the left)
        #[arg(long)]
        rhs_mode: Option<String>,
        /// drop the one-dimensional summand (fault injection)
        #[arg(long)]
        omit_abelian: bool,
    },
}

#[derive(Args, Debug, Clone)]
pub struct FormArgs {
    /// built-in name (delta, e4delta, e6delta) or a JSON file
    #[arg(long, default_value = "delta")]
    pub form: String,
    #[arg(long, default_value_t = 1)]
    pub n: u32,
    /// twisting character, e.g. 5:[2]
    #[arg(long = "char")]
    pub character: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct LArgs {
    #[command(flatten)]
    pub form: FormArgs,
    /// use the Riemann zeta function
    #[arg(long, conflicts_with = "dirichlet")]
    pub zeta: bool,
    /// use L(s, chi) for a primitive character
    #[arg(long)]
    pub dirichlet: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct HeckeArgs {
    #[arg(long, default_value_t = -4, allow_hyphen_values = true)]
    pub disc: i64,
    #[arg(long, default_value_t = 1)]
    pub u: u32,
    #[arg(long, default_value = "(1+i)^3")]
    pub conductor: String,
}

const EXIT_FAIL: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_USAGE: u8 = 64;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let overrides = Overrides {
        precision_bits: cli.prec,
        coefficient_budget: cli.budget,
        bad_prime_mode: cli.bad_prime_mode.clone(),
        height_cap: cli.height_cap.clone(),
        output_format: cli.format,
        parallelism: cli.parallelism,
    };
    let cfg = match load_config(cli.config.as_deref(), &overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("symval: {e}");
            return ExitCode::from(EXIT_FAIL);
        }
    };
    match commands::run(&cli.command, &cfg) {
        Ok(out) => {
            print!("{}", out.render(cfg.output_format));
            match out.status {
                Some(symval_core::verify::Status::Fail) => ExitCode::from(EXIT_FAIL),
                Some(symval_core::verify::Status::Inconclusive) => ExitCode::from(EXIT_INCONCLUSIVE),
                _ => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("symval: {e}");
            ExitCode::from(EXIT_FAIL)
        }
    }
}
