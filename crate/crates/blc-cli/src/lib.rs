//! Command-line surface over the `blc` library: exact counts, term
//! codecs, rank/unrank, uniform and Boltzmann sampling, typability
//! tables, and the growth-law numbers.

use std::ffi::OsString;
use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;

use blc::analytic;
use blc::boltzmann::{
    sample_free, sample_window, tune, RandomSource, SamplerParams,
};
use blc::counting::{CountTable, FreeBound};
use blc::term::{BitString, Term};
use blc::types::count_typable;
use blc::unrank::{rank, sample_uniform, sample_uniform_typable, unrank};

const WINDOW_MAX_ATTEMPTS: u64 = 1_000_000;

#[derive(Parser)]
#[command(
    name = "blc",
    version,
    about = "Count, rank, and randomly generate binary lambda calculus terms"
)]
struct Cli {
    /// Seed for the random generator; fresh entropy when omitted.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output format for the table commands.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Clone, Copy)]
struct Window {
    lo: u64,
    hi: u64,
}

fn parse_free_bound(s: &str) -> Result<FreeBound, String> {
    s.parse().map_err(|e: blc::counting::FreeBoundParseError| e.to_string())
}

fn parse_zero_or_inf(s: &str) -> Result<FreeBound, String> {
    match parse_free_bound(s)? {
        b @ (FreeBound::Unbounded | FreeBound::AtMost(0)) => Ok(b),
        FreeBound::AtMost(_) => Err("typable tables support only --m 0 or --m inf".into()),
    }
}

fn parse_biguint(s: &str) -> Result<BigUint, String> {
    s.parse().map_err(|_| format!("{s:?} is not a non-negative integer"))
}

fn parse_window(s: &str) -> Result<Window, String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| "expected <lo>:<hi>".to_string())?;
    let lo: u64 = lo.parse().map_err(|_| format!("bad window lower bound {lo:?}"))?;
    let hi: u64 = hi.parse().map_err(|_| format!("bad window upper bound {hi:?}"))?;
    if lo == 0 {
        return Err("window lower bound must be positive".into());
    }
    if lo > hi {
        return Err(format!("window lower bound {lo} exceeds upper bound {hi}"));
    }
    Ok(Window { lo, hi })
}

#[derive(Subcommand)]
enum Command {
    /// Print S(m, n), the number of terms of size n with at most m free indices.
    Count {
        /// Free-index bound: a number or "inf".
        #[arg(long, value_parser = parse_free_bound)]
        m: FreeBound,
        #[arg(long)]
        n: u64,
    },
    /// Print S(m, n) for n = 0..=max-n, one value per line.
    Table {
        #[arg(long, value_parser = parse_free_bound)]
        m: FreeBound,
        #[arg(long)]
        max_n: u64,
    },
    /// Print the k-th term (1-based) of the class, as text and as its code.
    Unrank {
        #[arg(long, value_parser = parse_free_bound)]
        m: FreeBound,
        #[arg(long)]
        n: u64,
        #[arg(long, value_parser = parse_biguint)]
        k: BigUint,
    },
    /// Print the rank of a term within its class.
    Rank {
        #[arg(long, value_parser = parse_free_bound)]
        m: FreeBound,
        #[arg(long)]
        term: String,
    },
    /// Print the binary code of a term.
    Encode {
        #[arg(long)]
        term: String,
    },
    /// Decode a binary code back into a term.
    Decode {
        #[arg(long)]
        bits: String,
    },
    /// Draw uniformly random terms of an exact size.
    Sample {
        #[arg(long, value_parser = parse_free_bound)]
        m: FreeBound,
        #[arg(long)]
        n: u64,
        /// Keep drawing until the term is simply typable.
        #[arg(long)]
        typable: bool,
        #[arg(long, default_value_t = 1)]
        count: u64,
        /// Print codes instead of term text.
        #[arg(long)]
        bits: bool,
    },
    /// Draw Boltzmann-distributed terms; sizes are reported with each term.
    Boltzmann {
        /// Tune the parameter for this mean output size.
        #[arg(long, conflicts_with_all = ["x", "rho"])]
        mean: Option<f64>,
        /// Use this parameter value directly.
        #[arg(long, conflicts_with = "rho")]
        x: Option<f64>,
        /// Sample at the singularity (the default): heavy-tailed sizes.
        #[arg(long)]
        rho: bool,
        /// Retry until a draw stays within this size ceiling.
        #[arg(long, conflicts_with = "window")]
        uplimit: Option<u64>,
        /// Retry until a draw lands in <lo>:<hi>.
        #[arg(long, value_parser = parse_window)]
        window: Option<Window>,
        #[arg(long, default_value_t = 1)]
        count: u64,
        /// Print codes instead of term text.
        #[arg(long)]
        bits: bool,
    },
    /// Print the Boltzmann parameter whose mean output size is the target.
    Tune {
        #[arg(long)]
        mean: f64,
    },
    /// Print T(m, n), the typable-term counts, for n = 0..=max-n.
    TypableTable {
        /// Only 0 (closed terms) or "inf" (all terms).
        #[arg(long, value_parser = parse_zero_or_inf)]
        m: FreeBound,
        #[arg(long)]
        max_n: u64,
    },
    /// Print the growth-law constants, optionally with a convergence check.
    Asymptotics {
        /// Also print S(inf, n) * rho^n * n^(3/2) at this n.
        #[arg(long)]
        check_n: Option<u64>,
    },
    /// CSV of S(m, n) * rho^n * n^(3/2) for m <= max-m, 1 <= n <= max-n.
    RatioTable {
        #[arg(long)]
        max_m: u64,
        #[arg(long)]
        max_n: u64,
    },
}

/// Parses `args` and executes one command, writing results to `out` and
/// diagnostics to `err`. Returns the process exit code: 0 on success, 1 on
/// any user-level error.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return if e.use_stderr() {
                let _ = write!(err, "{e}");
                1
            } else {
                // --help and --version land here
                let _ = write!(out, "{e}");
                0
            };
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(message) => {
            let _ = writeln!(err, "error: {message}");
            1
        }
    }
}

fn rng_from(seed: Option<u64>) -> RandomSource {
    RandomSource::from_seed(seed.unwrap_or_else(rand::random))
}

fn render(t: &Term, bits: bool) -> String {
    if bits {
        t.encode().to_string()
    } else {
        t.to_string()
    }
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<(), String> {
    let mut table = CountTable::new();
    let io_err = |e: std::io::Error| format!("write failed: {e}");
    match cli.command {
        Command::Count { m, n } => {
            let value = match m {
                FreeBound::Unbounded => table.count_all(n),
                FreeBound::AtMost(m) => table.count(m, n),
            };
            writeln!(out, "{value}").map_err(io_err)?;
        }
        Command::Table { m, max_n } => {
            if cli.format == Format::Csv {
                writeln!(out, "n,count").map_err(io_err)?;
            }
            for n in 0..=max_n {
                let value = match m {
                    FreeBound::Unbounded => table.count_all(n),
                    FreeBound::AtMost(m) => table.count(m, n),
                };
                match cli.format {
                    Format::Text => writeln!(out, "{value}"),
                    Format::Csv => writeln!(out, "{n},{value}"),
                }
                .map_err(io_err)?;
            }
        }
        Command::Unrank { m, n, k } => {
            let t = unrank(&mut table, m.resolve(n), n, &k).map_err(|e| e.to_string())?;
            writeln!(out, "{t}").map_err(io_err)?;
            writeln!(out, "{}", t.encode()).map_err(io_err)?;
        }
        Command::Rank { m, term } => {
            let t: Term = term.parse().map_err(|e: blc::term::SyntaxError| e.to_string())?;
            let k = rank(&mut table, m.resolve(t.size()), &t).map_err(|e| e.to_string())?;
            writeln!(out, "{k}").map_err(io_err)?;
        }
        Command::Encode { term } => {
            let t: Term = term.parse().map_err(|e: blc::term::SyntaxError| e.to_string())?;
            writeln!(out, "{}", t.encode()).map_err(io_err)?;
        }
        Command::Decode { bits } => {
            let bits: BitString =
                bits.parse().map_err(|e: blc::term::BitParseError| e.to_string())?;
            let t = bits.decode().map_err(|e| e.to_string())?;
            writeln!(out, "{t}").map_err(io_err)?;
        }
        Command::Sample { m, n, typable, count, bits } => {
            let m = m.resolve(n);
            let mut rng = rng_from(cli.seed);
            for _ in 0..count {
                let t = if typable {
                    sample_uniform_typable(&mut table, m, n, &mut rng)
                } else {
                    sample_uniform(&mut table, m, n, &mut rng)
                }
                .map_err(|e| e.to_string())?;
                writeln!(out, "{}", render(&t, bits)).map_err(io_err)?;
            }
        }
        Command::Boltzmann { mean, x, rho: _, uplimit, window, count, bits } => {
            let params = if let Some(mean) = mean {
                if !mean.is_finite() || mean < 2.0 {
                    return Err(format!("mean size must be a finite number >= 2, got {mean}"));
                }
                SamplerParams::new(tune(mean)).map_err(|e| e.to_string())?
            } else if let Some(x) = x {
                SamplerParams::new(x).map_err(|e| e.to_string())?
            } else {
                SamplerParams::at_singularity()
            };
            let mut rng = rng_from(cli.seed);
            for _ in 0..count {
                let t = match (window, uplimit) {
                    (Some(w), _) => {
                        sample_window(&params, w.lo, w.hi, &mut rng, WINDOW_MAX_ATTEMPTS)
                            .map_err(|e| e.to_string())?
                    }
                    (None, Some(limit)) => {
                        sample_window(&params, 1, limit, &mut rng, WINDOW_MAX_ATTEMPTS)
                            .map_err(|e| e.to_string())?
                    }
                    (None, None) => sample_free(&params, &mut rng),
                };
                writeln!(out, "{}\t{}", t.size(), render(&t, bits)).map_err(io_err)?;
            }
        }
        Command::Tune { mean } => {
            if !mean.is_finite() || mean < 2.0 {
                return Err(format!("mean size must be a finite number >= 2, got {mean}"));
            }
            writeln!(out, "{:.15}", tune(mean)).map_err(io_err)?;
        }
        Command::TypableTable { m, max_n } => {
            if cli.format == Format::Csv {
                writeln!(out, "n,count").map_err(io_err)?;
            }
            for n in 0..=max_n {
                let value = count_typable(&mut table, m, n);
                match cli.format {
                    Format::Text => writeln!(out, "{value}"),
                    Format::Csv => writeln!(out, "{n},{value}"),
                }
                .map_err(io_err)?;
            }
        }
        Command::Asymptotics { check_n } => {
            let checks: Vec<u64> = check_n.into_iter().collect();
            let report = analytic::report(&mut table, &checks);
            writeln!(out, "rho = {:.15}", report.rho).map_err(io_err)?;
            writeln!(out, "1/rho = {:.15}", report.inv_rho).map_err(io_err)?;
            writeln!(out, "c_tilde = {:.15}", report.c_tilde).map_err(io_err)?;
            writeln!(out, "C = {:.15}", report.c).map_err(io_err)?;
            for (n, ratio) in report.convergence {
                writeln!(out, "growth_ratio({n}) = {ratio:.15}").map_err(io_err)?;
            }
        }
        Command::RatioTable { max_m, max_n } => {
            writeln!(out, "m,n,ratio").map_err(io_err)?;
            for (m, n, ratio) in analytic::ratio_table(&mut table, max_m, max_n) {
                writeln!(out, "{m},{n},{ratio:.9e}").map_err(io_err)?;
            }
        }
    }
    Ok(())
}
