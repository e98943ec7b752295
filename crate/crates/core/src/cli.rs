//! Command-line front end. Exit codes: 0 success, 1 domain failure (with a
//! `reason=` line), 2 usage or input error.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::bench::{loglog_slope, run_bench, write_csv, BenchConfig};
use crate::conjugacy::{csp_solve, csp_solve_parallel, Conjugator, CspInstance, CspOutcome};
use crate::dlog::dlog_csp_solve;
use crate::error::Error;
use crate::linalg::{IntMatrix, Rat};
use crate::linsolver::{solve_in_b, BSolveStatus};
use crate::membership::{is_in_b, Verdict};
use crate::presentation::{parse_spec, GroupSpec};
use crate::words::{collect, from_semidirect, parse_word, word_to_semidirect, SemidirectElem};

#[derive(Parser, Debug)]
#[command(
    name = "metacsp",
    version,
    about = "Conjugacy search in split metabelian groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a spec file and print its derived constants.
    Validate { spec: PathBuf },
    /// Collect a word into normal form.
    Collect { spec: PathBuf, word: String },
    /// Print the (v, x) representation of a word.
    ToVec { spec: PathBuf, word: String },
    /// Normal form of the element (v, x).
    FromVec {
        spec: PathBuf,
        #[arg(allow_hyphen_values = true)]
        v: String,
        #[arg(allow_hyphen_values = true)]
        x: String,
    },
    /// Decide whether v lies in B.
    Member {
        spec: PathBuf,
        #[arg(allow_hyphen_values = true)]
        v: String,
    },
    /// Print the stabilization exponent alpha.
    Alpha { spec: PathBuf },
    /// Solve N X = u for X in B; N is a JSON matrix file.
    Solve {
        spec: PathBuf,
        n: PathBuf,
        #[arg(allow_hyphen_values = true)]
        u: String,
    },
    /// Find h with h g h^-1 = g1.
    Csp {
        spec: PathBuf,
        g: String,
        g1: String,
        #[arg(long, default_value_t = 20)]
        max_len: u64,
        #[arg(long)]
        parallel: Option<usize>,
    },
    /// Conjugacy through the discrete-log reduction (genBS, x = q1).
    Dlog {
        spec: PathBuf,
        g: String,
        g1: String,
        #[arg(long, default_value_t = 16)]
        lift_cap: u64,
    },
    /// Time csp on random conjugate pairs and write CSV rows.
    Bench {
        spec: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        lengths: Vec<u64>,
        #[arg(long, default_value_t = 3)]
        trials: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        max_len: u64,
        #[arg(long)]
        parallel: Option<usize>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CliOutput {
    fn ok(stdout: String) -> Self {
        CliOutput {
            code: 0,
            stdout,
            stderr: String::new(),
        }
    }

    fn failure(reason: &str, detail: impl std::fmt::Display) -> Self {
        CliOutput {
            code: 1,
            stdout: format!("reason={reason} {detail}\n"),
            stderr: String::new(),
        }
    }

    fn usage(msg: impl std::fmt::Display) -> Self {
        CliOutput {
            code: 2,
            stdout: String::new(),
            stderr: format!("{msg}\n"),
        }
    }
}

/// Errors from malformed input are usage errors; the rest are domain failures.
fn from_error(e: Error) -> CliOutput {
    let reason = match &e {
        Error::MalformedSpec(_)
        | Error::BadMatrixShape { .. }
        | Error::SingularAction { .. }
        | Error::NonCommuting { .. }
        | Error::WordSyntax { .. }
        | Error::GeneratorOutOfRange { .. }
        | Error::DimensionMismatch { .. }
        | Error::SystemShape(_)
        | Error::Parse(_)
        | Error::Io(_) => return CliOutput::usage(format!("error: {e}")),
        Error::ExponentOverflow(_) => "exponent-overflow",
        Error::NotInZd => "not-in-Zd",
        Error::NotInB => "not-in-B",
        Error::NotSublattice => "not-sublattice",
        Error::SystemNotCommuting(_) => "system-not-commuting",
        Error::QPartsDiffer => "q-parts-differ",
        Error::SingularNx => "singular-nx",
        Error::TrivialX => "trivial-x",
        Error::NoStabilization(_) => "no-stabilization",
        Error::NotGenBs(_) => "not-genbs",
        Error::XNotQ1 => "x-not-q1",
        Error::NotCoprime { .. } => "not-coprime",
        Error::ModulusTooLarge => "modulus-too-large",
    };
    CliOutput::failure(reason, e)
}

fn load_spec(path: &Path) -> Result<GroupSpec, Error> {
    parse_spec(&fs::read_to_string(path)?)
}

pub fn parse_rat_vec(text: &str) -> Result<Vec<Rat>, Error> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<Rat>()
                .map_err(|_| Error::Parse(format!("bad rational {:?}", t.trim())))
        })
        .collect()
}

pub fn parse_int_vec(text: &str) -> Result<Vec<i64>, Error> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| Error::Parse(format!("bad integer {:?}", t.trim())))
        })
        .collect()
}

fn load_matrix(path: &Path) -> Result<IntMatrix, Error> {
    let text = fs::read_to_string(path)?;
    let rows: Vec<Vec<i64>> =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("matrix file: {e}")))?;
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Parse("matrix rows have different lengths".into()));
    }
    let refs: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
    Ok(IntMatrix::from_i64(&refs))
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn word_or_one(w: String) -> String {
    if w.is_empty() {
        "1".into()
    } else {
        w
    }
}

fn element(spec: &GroupSpec, word: &str) -> Result<SemidirectElem, Error> {
    word_to_semidirect(&parse_word(word)?, spec)
}

fn describe_conjugator(spec: &GroupSpec, conj: &Conjugator) -> Result<String, Error> {
    let nf = from_semidirect(&conj.as_element(), spec)?;
    Ok(format!(
        "conjugator={} c={} y={}\n",
        word_or_one(nf.to_string()),
        join(&conj.c),
        join(&conj.y)
    ))
}

fn execute(command: Command) -> Result<CliOutput, Error> {
    Ok(match command {
        Command::Validate { spec } => {
            let spec = load_spec(&spec)?;
            let class = spec.classify();
            let uni = class
                .unitriangular
                .map_or("none".to_string(), |(a, b)| format!("{a},{b}"));
            CliOutput::ok(format!(
                "ok n={} s={} d={} alpha={} polycyclic={} unitriangular={}\n",
                spec.n(),
                spec.s(),
                spec.d(),
                spec.alpha(),
                class.polycyclic,
                uni
            ))
        }
        Command::Collect { spec, word } => {
            let spec = load_spec(&spec)?;
            let nf = collect(&parse_word(&word)?, &spec)?;
            CliOutput::ok(format!("{}\n", word_or_one(nf.to_string())))
        }
        Command::ToVec { spec, word } => {
            let spec = load_spec(&spec)?;
            let g = element(&spec, &word)?;
            CliOutput::ok(format!("v={} x={}\n", join(&g.v), join(&g.x)))
        }
        Command::FromVec { spec, v, x } => {
            let spec = load_spec(&spec)?;
            let g = SemidirectElem::new(parse_rat_vec(&v)?, parse_int_vec(&x)?);
            if g.v.len() != spec.s() {
                return Err(Error::DimensionMismatch {
                    expected: spec.s(),
                    got: g.v.len(),
                });
            }
            let nf = from_semidirect(&g, &spec)?;
            CliOutput::ok(format!("{}\n", word_or_one(nf.to_string())))
        }
        Command::Member { spec, v } => {
            let spec = load_spec(&spec)?;
            match is_in_b(&parse_rat_vec(&v)?, &spec)? {
                Verdict::InB { witness, .. } => CliOutput::ok(format!("in-B witness={witness}\n")),
                Verdict::NotInZd => {
                    CliOutput::failure("not-in-Zd", "denominator has a prime not dividing d")
                }
                Verdict::FailsPowerTest {
                    tested_exponent, ..
                } => {
                    CliOutput::failure("not-in-B", format!("M^{tested_exponent} v is not integral"))
                }
            }
        }
        Command::Alpha { spec } => CliOutput::ok(format!("{}\n", load_spec(&spec)?.alpha())),
        Command::Solve { spec, n, u } => {
            let spec = load_spec(&spec)?;
            let n = load_matrix(&n)?;
            let out = solve_in_b(&n, &parse_rat_vec(&u)?, &spec)?;
            match (out.status, out.solution) {
                (BSolveStatus::Solved, Some(v)) => {
                    CliOutput::ok(format!("solved v={}\n", join(&v)))
                }
                (status, _) => CliOutput::failure(&status.to_string(), "no solution in B"),
            }
        }
        Command::Csp {
            spec,
            g,
            g1,
            max_len,
            parallel,
        } => {
            let spec = load_spec(&spec)?;
            let inst = CspInstance::new(&spec, element(&spec, &g)?, element(&spec, &g1)?)?;
            let out = match parallel {
                Some(k) => csp_solve_parallel(&inst, max_len, k)?,
                None => csp_solve(&inst, max_len)?,
            };
            match out {
                CspOutcome::Found(conj) => CliOutput::ok(describe_conjugator(&spec, &conj)?),
                CspOutcome::NotFound { max_len } => {
                    CliOutput::failure("not-found", format!("max_len={max_len}"))
                }
            }
        }
        Command::Dlog {
            spec,
            g,
            g1,
            lift_cap,
        } => {
            let spec = load_spec(&spec)?;
            let inst = CspInstance::new(&spec, element(&spec, &g)?, element(&spec, &g1)?)?;
            match dlog_csp_solve(&inst, lift_cap)? {
                Some(conj) => CliOutput::ok(describe_conjugator(&spec, &conj)?),
                None => CliOutput::failure("not-found", "congruence has no solution"),
            }
        }
        Command::Bench {
            spec,
            lengths,
            trials,
            out,
            seed,
            max_len,
            parallel,
        } => {
            let spec = load_spec(&spec)?;
            let cfg = BenchConfig {
                lengths,
                trials,
                seed,
                max_len,
                threads: parallel,
            };
            let rows = run_bench(&spec, &cfg)?;
            write_csv(&rows, fs::File::create(&out)?)?;
            let slope = loglog_slope(&rows).map_or("n/a".to_string(), |s| format!("{s:.3}"));
            let missed = rows.iter().filter(|r| r.conjugator_len < 0).count();
            CliOutput::ok(format!(
                "rows={} not_found={} loglog_slope={} out={}\n",
                rows.len(),
                missed,
                slope,
                out.display()
            ))
        }
    })
}

/// Runs the CLI on `args` (including the program name).
pub fn run<I, T>(args: I) -> CliOutput
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
                CliOutput::ok(text)
            } else {
                CliOutput::usage(text.trim_end())
            };
        }
    };
    execute(cli.command).unwrap_or_else(from_error)
}
