//! The `solvkit` command line.
//!
//! Exit codes: 0 success, 1 semantic negative (NOT-EQUAL, VIOLATED, no
//! solution, not primitive, inconsistent), 2 usage or parse error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

use crate::closure::{
    analyze, bounded_search, cyclic_retract, d_extraction, verify_retraction, ClosureError, EquationSystem,
    SearchBounds, SearchOutcome, Subgroup,
};
use crate::groupring::{parse_laurent, DEFAULT_OMEGA_CAP};
use crate::lattice::{is_primitive, smith_normal_form, unimodular_complete, IntMatrix};
use crate::magnus::{embed, fox, to_abelian, GroupContext, DEFAULT_MAX_CLASS};
use crate::nilq5::{eq19_scan, lemma7_scan};
use crate::words::{parse_word, Word};
use crate::Error;

pub const MAX_CLASS_ENV: &str = "SOLVKIT_MAX_CLASS";

#[derive(Debug, Parser)]
#[command(name = "solvkit", version, about = "Exact computation in free solvable groups S_{r,d}")]
struct Cli {
    #[command(flatten)]
    session: SessionArgs,
    #[command(subcommand)]
    command: Command,
}

/// Group and session flags shared by every command.
#[derive(Debug, Args, Clone)]
struct SessionArgs {
    /// Rank r
    #[arg(short = 'r', long = "rank", global = true, default_value_t = 2)]
    rank: usize,
    /// Derived length d
    #[arg(short = 'd', long = "class", global = true, default_value_t = 2)]
    class: usize,
    /// Search word length L
    #[arg(short = 'L', long = "length", global = true, default_value_t = 4)]
    length: usize,
    /// Search exponent cap
    #[arg(long = "cap", global = true, default_value_t = 3)]
    cap: usize,
    /// Emit key=value records
    #[arg(long, global = true)]
    machine: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Normal form of a word, or equality test with --eq
    Nf {
        word: String,
        #[arg(long = "eq")]
        eq: Option<String>,
    },
    /// Fox derivative of a word along one axis
    Fox {
        word: String,
        #[arg(long, default_value_t = 1)]
        axis: usize,
        /// Push the value to Z[Z^r]
        #[arg(long)]
        abelian: bool,
    },
    /// Augmentation valuation of a Laurent polynomial
    Omega {
        expr: String,
        #[arg(long, default_value_t = DEFAULT_OMEGA_CAP)]
        trunc: u32,
    },
    /// Smith normal form of a matrix file (comma-separated rows)
    Snf { file: PathBuf },
    /// Primitivity of an integer vector, with a unimodular completion
    Primitive { vector: String },
    /// Cyclic retraction onto <h>
    Retract { word: String },
    /// Closure report for a subgroup file
    Analyze {
        file: PathBuf,
        /// Try to certify conditional verdicts by bounded search
        #[arg(long)]
        search: bool,
    },
    /// Bounded search for an H-solution of a split system
    Search { subgroup: PathBuf, equations: PathBuf },
    /// Exhaustive scans in the class-5 metabelian quotient
    Scan {
        kind: ScanKind,
        #[arg(short = 'B', long = "bound")]
        bound: i64,
    },
    /// Recover d with c_i = d^(1-a_i) in M_r
    Dextract {
        #[arg(required = true)]
        words: Vec<String>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScanKind {
    Lemma7,
    Eq19,
}

struct Outcome {
    code: i32,
}

impl Outcome {
    fn ok() -> Self {
        Outcome { code: 0 }
    }

    fn negative() -> Self {
        Outcome { code: 1 }
    }

    fn when(ok: bool) -> Self {
        if ok {
            Self::ok()
        } else {
            Self::negative()
        }
    }
}

fn class_limit() -> Result<usize, Error> {
    match std::env::var(MAX_CLASS_ENV) {
        Err(_) => Ok(DEFAULT_MAX_CLASS),
        Ok(v) => v.trim().parse().map_err(|_| Error::Usage(format!("{MAX_CLASS_ENV} must be a positive integer, got '{v}'"))),
    }
}

fn context(s: &SessionArgs) -> Result<GroupContext, Error> {
    Ok(GroupContext::with_class_limit(s.rank, s.class, class_limit()?)?)
}

fn word(text: &str, ctx: GroupContext) -> Result<Word, Error> {
    let w = parse_word(text, Some(ctx.rank()))?;
    if w.has_variables() {
        return Err(Error::Usage(format!("'{text}' uses unknowns; expected a word in z_1..z_{}", ctx.rank())));
    }
    Ok(w)
}

fn read(path: &PathBuf) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{rendered}");
            } else {
                let _ = write!(out, "{rendered}");
            }
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(o) => o.code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<Outcome, Error> {
    let s = &cli.session;
    let m = s.machine;
    let bounds = SearchBounds { max_length: s.length, exponent_cap: s.cap };
    if s.cap == 0 {
        return Err(Error::Usage("--cap must be positive".into()));
    }
    match &cli.command {
        Command::Nf { word: text, eq } => {
            let ctx = context(s)?;
            let a = embed(&word(text, ctx)?, ctx)?;
            match eq {
                None => {
                    if m {
                        writeln!(out, "nf={a}")?;
                    } else {
                        writeln!(out, "{a}")?;
                    }
                    Ok(Outcome::ok())
                }
                Some(other) => {
                    let b = embed(&word(other, ctx)?, ctx)?;
                    let equal = a == b;
                    if m {
                        writeln!(out, "equal={equal}")?;
                    } else {
                        writeln!(out, "{}", if equal { "EQUAL" } else { "NOT-EQUAL" })?;
                    }
                    Ok(Outcome::when(equal))
                }
            }
        }
        Command::Fox { word: text, axis, abelian } => {
            let ctx = context(s)?;
            let w = word(text, ctx)?;
            let value = fox(&w, *axis, ctx)?;
            let shown = if *abelian { to_abelian(&value).to_string() } else { value.to_string() };
            if m {
                writeln!(out, "axis={axis}\nfox={shown}")?;
            } else {
                writeln!(out, "{shown}")?;
            }
            Ok(Outcome::ok())
        }
        Command::Omega { expr, trunc } => {
            if *trunc == 0 {
                return Err(Error::Usage("--trunc must be positive".into()));
            }
            let l = parse_laurent(expr, s.rank)?;
            let v = l.omega(*trunc)?;
            if m {
                writeln!(out, "omega={v}")?;
            } else {
                writeln!(out, "{v}")?;
            }
            Ok(Outcome::ok())
        }
        Command::Snf { file } => {
            let a = IntMatrix::parse(&read(file)?)?;
            let snf = smith_normal_form(&a);
            let factors: Vec<String> = snf.invariant_factors().iter().map(BigInt::to_string).collect();
            if m {
                writeln!(out, "rank={}\ninvariant-factors={}", snf.rank(), factors.join(","))?;
            } else {
                write!(out, "D:\n{}U:\n{}V:\n{}", snf.d, snf.u, snf.v)?;
                writeln!(out, "rank={}\ninvariant-factors={}", snf.rank(), factors.join(","))?;
            }
            Ok(Outcome::ok())
        }
        Command::Primitive { vector } => {
            let v = vector
                .split(',')
                .map(|t| t.trim().parse::<BigInt>().map_err(|_| Error::Usage(format!("bad integer '{}'", t.trim()))))
                .collect::<Result<Vec<_>, _>>()?;
            let p = is_primitive(&v)?;
            if m {
                writeln!(out, "primitive={p}")?;
            } else {
                writeln!(out, "{}", if p { "PRIMITIVE" } else { "NOT-PRIMITIVE" })?;
            }
            if p {
                let c = unimodular_complete(&v)?;
                if m {
                    for (i, row) in c.to_rows().iter().enumerate() {
                        let row: Vec<String> = row.iter().map(BigInt::to_string).collect();
                        writeln!(out, "completion.{}={}", i + 1, row.join(","))?;
                    }
                } else {
                    write!(out, "completion:\n{c}")?;
                }
            }
            Ok(Outcome::when(p))
        }
        Command::Retract { word: text } => {
            let ctx = context(s)?;
            let h = word(text, ctx)?;
            match cyclic_retract(&h, ctx) {
                Ok(rho) => {
                    let sub = Subgroup::new(ctx, vec![h])?;
                    let verified = verify_retraction(&rho, &sub, None)? && rho.is_idempotent()?;
                    for (i, w) in rho.words().iter().enumerate() {
                        if m {
                            writeln!(out, "retraction.z{}={w}", i + 1)?;
                        } else {
                            writeln!(out, "z{} -> {w}", i + 1)?;
                        }
                    }
                    writeln!(out, "verified={verified}")?;
                    Ok(Outcome::when(verified))
                }
                Err(ClosureError::NotPrimitive(g)) => {
                    if m {
                        writeln!(out, "primitive=false\ngcd={g}")?;
                    } else {
                        writeln!(out, "NOT-PRIMITIVE gcd={g}")?;
                    }
                    Ok(Outcome::negative())
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Analyze { file, search } => {
            let ctx = context(s)?;
            let h = Subgroup::parse(&read(file)?, ctx)?;
            let rep = analyze(&h, search.then_some(bounds))?;
            write!(out, "{}", if m { rep.to_machine() } else { rep.to_text() })?;
            Ok(Outcome::ok())
        }
        Command::Search { subgroup, equations } => {
            let ctx = context(s)?;
            let h = Subgroup::parse(&read(subgroup)?, ctx)?;
            let sys = EquationSystem::parse(&read(equations)?, ctx.rank())?;
            match bounded_search(&sys, &h, bounds)? {
                SearchOutcome::Found(xs) => {
                    for (i, x) in xs.iter().enumerate() {
                        let z = h.expand(x)?;
                        if m {
                            writeln!(out, "x{}={x}\nx{}.expanded={z}", i + 1, i + 1)?;
                        } else {
                            writeln!(out, "x{} = {x}    # {z}", i + 1)?;
                        }
                    }
                    writeln!(out, "{}", if m { "found=true" } else { "FOUND" })?;
                    Ok(Outcome::ok())
                }
                SearchOutcome::NoneFound => {
                    if m {
                        writeln!(out, "found=false\nbounds={bounds}")?;
                    } else {
                        writeln!(out, "none found <= bounds ({bounds})")?;
                    }
                    Ok(Outcome::negative())
                }
            }
        }
        Command::Scan { kind, bound } => {
            if *bound < 1 {
                return Err(Error::Usage("-B must be at least 1".into()));
            }
            match kind {
                ScanKind::Lemma7 => {
                    let rep = lemma7_scan(*bound);
                    write!(out, "{rep}")?;
                    Ok(Outcome::when(rep.confirmed()))
                }
                ScanKind::Eq19 => {
                    if s.rank < 2 {
                        return Err(Error::Usage("eq19 needs rank at least 2".into()));
                    }
                    let rep = eq19_scan(s.rank, *bound, 2);
                    write!(out, "{rep}")?;
                    Ok(Outcome::when(rep.confirmed()))
                }
            }
        }
        Command::Dextract { words } => {
            let ctx = context(s)?;
            let cs = words.iter().map(|t| Ok(embed(&word(t, ctx)?, ctx)?)).collect::<Result<Vec<_>, Error>>()?;
            match d_extraction(&cs) {
                Ok(d) => {
                    writeln!(out, "{}{d}", if m { "d=" } else { "d = " })?;
                    Ok(Outcome::ok())
                }
                Err(ClosureError::Inconsistent(why)) => {
                    if m {
                        writeln!(out, "consistent=false\nreason={why}")?;
                    } else {
                        writeln!(out, "INCONSISTENT: {why}")?;
                    }
                    Ok(Outcome::negative())
                }
                Err(e) => Err(e.into()),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["solvkit"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn nf_examples() {
        assert_eq!(call(&["nf", "-r", "2", "-d", "2", "[z1,z2]*[z2,z1]"]).1, "d2:d1:(0,0)|[0;0]\n");
        assert_eq!(call(&["nf", "-r", "2", "-d", "2", "--eq", "[[z1,z2],[z1*z2,z2*z1]]", "1"]), (0, "EQUAL\n".into(), String::new()));
        assert_eq!(call(&["nf", "-r", "2", "-d", "3", "--eq", "[[z1,z2],[z1*z2,z2*z1]]", "1"]).0, 1);
    }

    #[test]
    fn error_codes() {
        let (code, _, err) = call(&["nf", "[z1,z2"]);
        assert_eq!(code, 2);
        assert!(err.contains("position"), "{err}");
        assert_eq!(call(&["nf", "-r", "2", "z3"]).0, 2);
        assert_eq!(call(&["nf", "-d", "5", "z1"]).0, 2);
        assert_eq!(call(&["scan", "lemma7", "-B", "0"]).0, 2);
        assert_eq!(call(&["bogus"]).0, 2);
        assert_eq!(call(&["--help"]).0, 0);
    }

    #[test]
    fn machine_mode() {
        assert_eq!(call(&["--machine", "omega", "1 - a1"]).1, "omega=1\n");
        assert_eq!(call(&["primitive", "--machine", "2,4"]), (1, "primitive=false\n".into(), String::new()));
    }
}
