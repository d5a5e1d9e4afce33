//! The `vpc` command line.

use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::checker;
use crate::equiv::{bb_div_equiv, explore, stratified_equiv, EquivError};
use crate::godel::{decode_program, decode_term, encode_program, encode_term, Code};
use crate::hovpc::{parse_ho, translate, HoEnv};
use crate::lts::{direct_transitions, Action, DirectState, DEFAULT_FUEL};
use crate::smn;
use crate::syntax::{desugar, parse_source, print_program, Dialect, Nat, Program, TypeSig};
use crate::universal::{self, config_steps, StepKind};

const USAGE: i32 = 2;
const FAILED: i32 = 1;

#[derive(Parser, Debug)]
#[command(name = "vpc", version, about = "Value-passing process calculus toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Type signature `i=<n>;g=<name>,...`.
    #[arg(long, global = true)]
    sig: Option<String>,
    /// Largest value offered to inputs.
    #[arg(long, global = true, default_value_t = 1)]
    vbound: u64,
    /// Largest number of explored states.
    #[arg(long, global = true, default_value_t = 2000)]
    cap: usize,
    /// Exploration depth (for `strat-bisim`, the approximant index).
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Seed for randomized runs.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Calculus of codes: `p` (definitions) or `bang` (replication).
    #[arg(long, global = true, default_value = "p")]
    dialect: Dialect,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a source file and print it back.
    Parse {
        file: PathBuf,
        /// Remove `if … else`, `case` and `let`.
        #[arg(long)]
        desugar: bool,
    },
    /// Print the Gödel code of a program (normal index when `--sig` is given).
    Encode {
        file: PathBuf,
        /// Encode only the main term, in the chosen dialect.
        #[arg(long)]
        term: bool,
    },
    /// Print the program (or term) with the given code.
    Decode {
        /// Decimal code, or a file holding one.
        code: String,
        #[arg(long)]
        term: bool,
    },
    /// Normalize a code under `--sig`, or report the type violation.
    Normalize {
        code: String,
        /// Treat the code as a program index instead of a term.
        #[arg(long)]
        program: bool,
    },
    /// Print a trace of the direct semantics.
    Run {
        file: PathBuf,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        /// Choose each transition from stdin.
        #[arg(long)]
        interactive: bool,
        /// Mark τ-steps that preserve behaviour as deterministic.
        #[arg(long)]
        classify: bool,
    },
    /// Run the universal process on a program code.
    Universal {
        /// Source file or code file. With `--code` this slot may hold the mode.
        file: Option<PathBuf>,
        #[arg(long)]
        code: Option<String>,
        #[arg(value_enum, default_value_t = Mode::Run)]
        mode: Mode,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        #[arg(long)]
        classify: bool,
    },
    /// Divergence-preserving branching bisimilarity of two programs.
    Bisim { left: PathBuf, right: PathBuf },
    /// Depth-bounded approximation of branching bisimilarity.
    StratBisim { left: PathBuf, right: PathBuf },
    /// Partially apply a definition.
    Smn {
        file: PathBuf,
        /// Definition to apply.
        #[arg(long)]
        def: String,
        /// Comma-separated values for the leading parameters.
        #[arg(long, value_delimiter = ',')]
        fix: Vec<u64>,
    },
    /// Translate a higher-order term into first-order VPC.
    HoTranslate { file: PathBuf },
    /// Dump the explored transition graph of a program.
    GraphDump { file: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Run,
    Dump,
}

/// Outcome of a subcommand: exit code 0 on success.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl ToString) -> Self {
        Failure {
            code: USAGE,
            message: message.to_string(),
        }
    }
}

type CmdResult = Result<i32, Failure>;

/// Entry point of the binary.
pub fn main() -> i32 {
    let stdin = io::stdin();
    let mut input = stdin.lock();
    run_cli(std::env::args(), &mut io::stdout(), &mut io::stderr(), &mut input)
}

/// Runs one invocation with explicit streams and returns the exit code.
pub fn run_cli<I, S>(
    argv: I,
    out: &mut dyn Write,
    err: &mut dyn Write,
    input: &mut dyn BufRead,
) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    match dispatch(&cli, out, input) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write, input: &mut dyn BufRead) -> CmdResult {
    match &cli.command {
        Command::Parse { file, desugar: d } => {
            let p = load(file)?;
            let p = if *d { desugar(&p) } else { p };
            emit(out, &print_program(&p))
        }
        Command::Encode { file, term } => {
            let p = load(file)?;
            let code = if *term {
                encode_term(&p.main, cli.dialect).map_err(Failure::usage)?
            } else if let Some(sig) = sig(cli)? {
                let p = checker::normalize_program(&p, &sig).map_err(|v| Failure {
                    code: FAILED,
                    message: v.to_string(),
                })?;
                encode_program(&p).map_err(Failure::usage)?
            } else {
                encode_program(&p).map_err(Failure::usage)?
            };
            emit(out, &format!("{code}\n"))
        }
        Command::Decode { code, term } => {
            let z = read_code(code)?;
            let text = if *term {
                format!("{}\n", decode_term(&z, cli.dialect).map_err(Failure::usage)?)
            } else {
                print_program(&decode_program(&z).map_err(Failure::usage)?)
            };
            emit(out, &text)
        }
        Command::Normalize { code, program } => {
            let z = read_code(code)?;
            let sig = required_sig(cli)?;
            let result = if *program {
                decode_program(&z)
                    .map_err(Failure::usage)
                    .and_then(|p| {
                        checker::normalize_program(&p, &sig)
                            .map_err(|v| Failure { code: FAILED, message: v.to_string() })
                    })
                    .and_then(|p| encode_program(&p).map_err(Failure::usage))
            } else {
                checker::normalize(&z, &sig, cli.dialect).map_err(|v| Failure {
                    code: FAILED,
                    message: v.to_string(),
                })
            };
            let z = result?;
            emit(out, &format!("{z}\n"))
        }
        Command::Run {
            file,
            steps,
            interactive,
            classify,
        } => {
            let p = load(file)?;
            let start = DirectState::of_program(&p);
            let mut stepper = DirectStepper { vbound: cli.vbound };
            trace(cli, &mut stepper, start, *steps, *interactive, *classify, out, input)
        }
        Command::Universal {
            file,
            code,
            mode,
            steps,
            classify,
        } => {
            // `universal --code C dump` puts the mode in the first positional slot.
            let mode = match (code, file.as_ref().and_then(|f| f.to_str())) {
                (Some(_), Some(m)) => Mode::from_str(m, true).map_err(Failure::usage)?,
                _ => *mode,
            };
            let z = match (code, file) {
                (Some(c), _) => read_code(c)?,
                (None, Some(f)) => code_from_file(f)?,
                (None, None) => return Err(Failure::usage("give a file or --code")),
            };
            let sig = required_sig(cli)?;
            let cfg = universal::boot_universal(&z, &sig);
            match mode {
                Mode::Dump => {
                    let g = explore(&DirectState::engine(cfg), cli.vbound, cli.cap, depth(cli))
                        .map_err(Failure::usage)?;
                    emit(out, &g.dump())
                }
                Mode::Run => {
                    let mut stepper = EngineStepper { vbound: cli.vbound };
                    trace(cli, &mut stepper, cfg, *steps, false, *classify, out, input)
                }
            }
        }
        Command::Bisim { left, right } => {
            let (l, r) = (load(left)?, load(right)?);
            let explore_one = |p: &Program| {
                explore(&DirectState::of_program(p), cli.vbound, cli.cap, depth(cli))
                    .map_err(Failure::usage)
            };
            let (g1, g2) = (explore_one(&l)?, explore_one(&r)?);
            match bb_div_equiv(&g1, &g2) {
                Ok(v) if v.equivalent => emit(out, "equivalent\n"),
                Ok(v) => {
                    let why = v.witness.map(|w| w.reason).unwrap_or_default();
                    emit(out, &format!("not equivalent: {why}\n"))?;
                    Ok(FAILED)
                }
                Err(EquivError::TruncatedInput) => Err(Failure::usage(
                    "state space exceeds --cap; try strat-bisim",
                )),
                Err(e) => Err(Failure::usage(e)),
            }
        }
        Command::StratBisim { left, right } => {
            let (l, r) = (load(left)?, load(right)?);
            let n = cli.depth.unwrap_or(8);
            let same = stratified_equiv(
                &DirectState::of_program(&l),
                &DirectState::of_program(&r),
                n,
                cli.vbound,
            )
            .map_err(Failure::usage)?;
            if same {
                emit(out, &format!("equivalent up to depth {n}\n"))
            } else {
                emit(out, &format!("not equivalent at depth {n}\n"))?;
                Ok(FAILED)
            }
        }
        Command::Smn { file, def, fix } => {
            let p = load(file)?;
            let j = p
                .def_id(def)
                .ok_or_else(|| Failure::usage(format!("no definition `{def}`")))?;
            let sig = required_sig(cli)?;
            let z = smn::encode_def(&p.defs, j, &sig).map_err(|e| Failure {
                code: FAILED,
                message: e.to_string(),
            })?;
            let arity = p.defs[j.0 as usize - 1].params.len();
            if fix.len() > arity {
                return Err(Failure::usage(format!(
                    "`{def}` takes {arity} parameters, {} given",
                    fix.len()
                )));
            }
            let vals: Vec<Nat> = fix.iter().map(|&v| Nat::from(v)).collect();
            let z2 = smn::smn(&z, fix.len(), arity - fix.len(), &vals).map_err(Failure::usage)?;
            emit(out, &format!("{z}\n{z2}\n"))
        }
        Command::HoTranslate { file } => {
            let text = read(file)?;
            let src = parse_ho(&text).map_err(Failure::usage)?;
            let t = translate(&src.term, &HoEnv::new()).map_err(Failure::usage)?;
            emit(out, &format!("{t}\n"))
        }
        Command::GraphDump { file } => {
            let p = load(file)?;
            let g = explore(&DirectState::of_program(&p), cli.vbound, cli.cap, depth(cli))
                .map_err(Failure::usage)?;
            emit(out, &g.dump())
        }
    }
}

fn emit(out: &mut dyn Write, text: &str) -> CmdResult {
    out.write_all(text.as_bytes())
        .map_err(|e| Failure::usage(format!("write failed: {e}")))?;
    Ok(0)
}

fn depth(cli: &Cli) -> usize {
    cli.depth.unwrap_or(usize::MAX)
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Program, Failure> {
    parse_source(&read(path)?).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn parse_decimal(s: &str) -> Option<Code> {
    let s = s.trim();
    (!s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())).then(|| s.parse().ok())?
}

fn read_code(arg: &str) -> Result<Code, Failure> {
    match parse_decimal(arg) {
        Some(z) => Ok(z),
        None => {
            let text = read(Path::new(arg))?;
            parse_decimal(&text).ok_or_else(|| Failure::usage(format!("{arg}: not a decimal code")))
        }
    }
}

// A file holding either a decimal code or program source.
fn code_from_file(path: &Path) -> Result<Code, Failure> {
    let text = read(path)?;
    if let Some(z) = parse_decimal(&text) {
        return Ok(z);
    }
    let p = parse_source(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    encode_program(&p).map_err(Failure::usage)
}

fn sig(cli: &Cli) -> Result<Option<TypeSig>, Failure> {
    cli.sig
        .as_deref()
        .map(|s| s.parse::<TypeSig>().map_err(Failure::usage))
        .transpose()
}

fn required_sig(cli: &Cli) -> Result<TypeSig, Failure> {
    sig(cli)?.ok_or_else(|| Failure::usage("this command needs --sig"))
}

/// Something that can be stepped and printed in a trace.
trait Stepper {
    type State: Clone;
    fn steps(&mut self, s: &Self::State) -> Result<Vec<(String, bool, Self::State)>, Failure>;
    fn as_direct(&self, s: &Self::State) -> DirectState;
}

struct DirectStepper {
    vbound: u64,
}

impl Stepper for DirectStepper {
    type State = DirectState;

    fn steps(&mut self, s: &DirectState) -> Result<Vec<(String, bool, DirectState)>, Failure> {
        Ok(direct_transitions(s, self.vbound, DEFAULT_FUEL)
            .map_err(Failure::usage)?
            .into_iter()
            .map(|(a, t)| (a.to_string(), a == Action::Tau, t))
            .collect())
    }

    fn as_direct(&self, s: &DirectState) -> DirectState {
        s.clone()
    }
}

struct EngineStepper {
    vbound: u64,
}

impl Stepper for EngineStepper {
    type State = universal::Config;

    fn steps(
        &mut self,
        s: &universal::Config,
    ) -> Result<Vec<(String, bool, universal::Config)>, Failure> {
        Ok(config_steps(s, self.vbound)
            .into_iter()
            .map(|(a, kind, c)| {
                let label = match kind {
                    StepKind::DefCall => "tau (defcall)".to_string(),
                    StepKind::Ordinary => a.to_string(),
                };
                (label, a == Action::Tau, c)
            })
            .collect())
    }

    fn as_direct(&self, s: &universal::Config) -> DirectState {
        DirectState::engine(s.clone())
    }
}

#[allow(clippy::too_many_arguments)]
fn trace<S: Stepper>(
    cli: &Cli,
    stepper: &mut S,
    start: S::State,
    steps: usize,
    interactive: bool,
    classify: bool,
    out: &mut dyn Write,
    input: &mut dyn BufRead,
) -> CmdResult {
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let mut state = start;
    for n in 1..=steps {
        let options = stepper.steps(&state)?;
        if options.is_empty() {
            emit(out, "halted\n")?;
            return Ok(0);
        }
        let pick = if interactive {
            for (i, (label, _, _)) in options.iter().enumerate() {
                emit(out, &format!("[{i}] {label}\n"))?;
            }
            match choose(input, options.len()) {
                Some(i) => i,
                None => return Ok(0),
            }
        } else {
            rng.gen_range(0..options.len())
        };
        let (label, tau, next) = options[pick].clone();
        let mut line = format!("step {n}: {label}");
        if classify && tau {
            let same = behaves_alike(
                &stepper.as_direct(&state),
                &stepper.as_direct(&next),
                cli.vbound,
                cli.cap,
            );
            line.push_str(if same { " deterministic" } else { " nondet" });
        }
        line.push('\n');
        emit(out, &line)?;
        state = next;
    }
    Ok(0)
}

// Reads a transition index; `None` on end of input or `q`.
fn choose(input: &mut dyn BufRead, n: usize) -> Option<usize> {
    loop {
        let mut line = String::new();
        if input.read_line(&mut line).ok()? == 0 {
            return None;
        }
        let line = line.trim();
        if line == "q" {
            return None;
        }
        if let Ok(i) = line.parse::<usize>() {
            if i < n {
                return Some(i);
            }
        }
    }
}

// A τ-step is deterministic when it does not change behaviour up to
// bisimilarity on the explored graphs; truncated graphs count as changed.
fn behaves_alike(a: &DirectState, b: &DirectState, vbound: u64, cap: usize) -> bool {
    let ga = explore(a, vbound, cap, usize::MAX);
    let gb = explore(b, vbound, cap, usize::MAX);
    match (ga, gb) {
        (Ok(ga), Ok(gb)) => bb_div_equiv(&ga, &gb).map(|v| v.equivalent).unwrap_or(false),
        _ => false,
    }
}
