use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use odca::analysis::{coverable_equiv, covers, is_regular, CoverStage, Covering, Regularity};
use odca::boolean::{bool_equiv, bool_eval, determinize, BooleanOdca};
use odca::equiv::{bound_is_complete, odca_equiv, EquivVerdict};
use odca::exactla::format_rational;
use odca::format::{self, ConfigSpec, Document};
use odca::model::{eval, Configuration, WeightedOdca};
use odca::reach::{counter_bound_cover, counter_bound_reach, covs_cover, covs_reach};
use odca::translate::{check_counter_determinacy, oca_eval, oca_to_odca, odca_to_oca};
use odca::{oracle, Error, VectorSpace};

const DEFAULT_COUNTER_CAP: usize = 1_000_000;

#[derive(Parser)]
#[command(name = "odca", version, about = "Weighted one-deterministic-counter automata")]
struct Cli {
    /// Accept counter values above 1000000.
    #[arg(long, global = true)]
    allow_large_counters: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the weight of a word.
    Eval { file: PathBuf, word: String },
    /// Decide equivalence of two weighted ODCAs.
    Equiv {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Decide equivalence of two boolean ODCAs.
    BoolEquiv {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Search for a configuration outside a vector space.
    Reach(ReachArgs),
    /// Decide whether a weighted ODCA is equivalent to a finite weighted automaton.
    Regular { file: PathBuf },
    /// Decide whether A covers B.
    Cover {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Decide whether A and B cover each other.
    CoverableEquiv {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Determinize a boolean ODCA.
    Determinize {
        file: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Translate a weighted OCA into an ODCA or back.
    Translate {
        file: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Brute-force reference procedures.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Generate a random weighted ODCA.
    Random(RandomArgs),
}

#[derive(Args)]
struct ReachArgs {
    file: PathBuf,
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    space: PathBuf,
    /// Comma-separated counter state names.
    #[arg(long)]
    targets: String,
    /// Target counter value, or "any" for coverability.
    #[arg(long, default_value = "any")]
    counter: String,
    #[arg(long)]
    bound: Option<usize>,
}

#[derive(Args)]
struct RandomArgs {
    #[arg(long)]
    states: usize,
    #[arg(long)]
    counter_states: usize,
    /// Alphabet size.
    #[arg(long)]
    alphabet: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Compare two machines on all words up to a length.
    Equiv {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
    },
    /// Enumerate words for a reachability instance.
    Reach {
        #[command(flatten)]
        query: ReachArgs,
        #[arg(long, default_value_t = 8)]
        word_cap: usize,
        #[arg(long, default_value_t = 12)]
        counter_cap: usize,
    },
    /// Rank of the Hankel matrix on words up to a length.
    Hankel {
        file: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_len: usize,
    },
    /// Generate a random weighted ODCA.
    Random(RandomArgs),
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ResourceCap { .. } | Error::DeadlineExceeded => 3,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

type Outcome = Result<u8, Failure>;

fn read(path: &Path) -> Result<Document, Failure> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    format::parse_document(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn read_weighted(path: &Path) -> Result<WeightedOdca, Failure> {
    match read(path)? {
        Document::WeightedOdca(m) => Ok(m),
        d => Err(usage(format!(
            "{}: expected weighted-odca, found {}",
            path.display(),
            d.type_name()
        ))),
    }
}

fn read_boolean(path: &Path) -> Result<BooleanOdca, Failure> {
    match read(path)? {
        Document::BooleanOdca(m) => Ok(m),
        d => Err(usage(format!(
            "{}: expected boolean-odca, found {}",
            path.display(),
            d.type_name()
        ))),
    }
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn report(verdict: &str, witness: Value, bound_used: Value, complete: bool, yes: bool) -> u8 {
    let out = json!({
        "verdict": verdict,
        "witness": witness,
        "bound_used": bound_used,
        "complete": complete,
    });
    println!("{}", serde_json::to_string_pretty(&out).expect("json"));
    if yes {
        0
    } else {
        1
    }
}

struct Limits {
    allow_large: bool,
}

impl Limits {
    fn check(&self, what: &str, value: usize) -> Result<(), Failure> {
        if !self.allow_large && value > DEFAULT_COUNTER_CAP {
            return Err(usage(format!(
                "{what} {value} exceeds {DEFAULT_COUNTER_CAP}; pass --allow-large-counters to proceed"
            )));
        }
        Ok(())
    }
}

fn report_equiv(m: &WeightedOdca, v: &EquivVerdict) -> u8 {
    let witness = v.witness.as_ref().map_or(Value::Null, |w| m.format_word(w).into());
    let verdict = if v.is_equivalent() {
        "equivalent"
    } else {
        "not-equivalent"
    };
    report(verdict, witness, v.bound_used.into(), v.complete, v.is_equivalent())
}

fn cmd_eval(file: &Path, word: &str) -> Outcome {
    let value = match read(file)? {
        Document::WeightedOdca(m) => eval(&m, &m.parse_word(word)?)?,
        Document::BooleanOdca(b) => {
            let accepted = bool_eval(&b, &b.alphabet.parse_word(word)?)?;
            odca::exactla::int(i64::from(accepted))
        }
        Document::WeightedOca(o) => oca_eval(&o, &o.alphabet.parse_word(word)?)?,
        d => return Err(usage(format!("cannot evaluate a {} document", d.type_name()))),
    };
    println!("{}", format_rational(&value));
    Ok(0)
}

struct ReachQuery {
    odca: WeightedOdca,
    config: Configuration,
    space: VectorSpace,
    targets: Vec<usize>,
    counter: Option<usize>,
}

fn load_reach(args: &ReachArgs, limits: &Limits) -> Result<ReachQuery, Failure> {
    let odca = read_weighted(&args.file)?;
    let spec: ConfigSpec = match read(&args.config)? {
        Document::Config(c) => c,
        d => return Err(usage(format!("--config: expected config, found {}", d.type_name()))),
    };
    limits.check("counter value", spec.counter_value)?;
    let config = spec.resolve(&odca)?;
    let space = match read(&args.space)? {
        Document::VectorSpace(v) => v,
        d => {
            return Err(usage(format!(
                "--space: expected vector-space, found {}",
                d.type_name()
            )))
        }
    };
    let targets = args
        .targets
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            odca.counter
                .index_of(s)
                .ok_or_else(|| usage(format!("unknown counter state {s:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let counter = match args.counter.as_str() {
        "any" => None,
        s => {
            let m = s
                .parse::<usize>()
                .map_err(|_| usage(format!("--counter expects a number or \"any\", got {s:?}")))?;
            limits.check("counter value", m)?;
            Some(m)
        }
    };
    if let Some(b) = args.bound {
        limits.check("bound", b)?;
    }
    Ok(ReachQuery {
        odca,
        config,
        space,
        targets,
        counter,
    })
}

fn report_reach(q: &ReachQuery, witness: Option<Vec<usize>>, bound: Value, complete: bool) -> u8 {
    let found = witness.is_some();
    let witness = witness.map_or(Value::Null, |w| q.odca.format_word(&w).into());
    report(
        if found { "reachable" } else { "unreachable" },
        witness,
        bound,
        complete,
        found,
    )
}

fn cmd_reach(args: &ReachArgs, limits: &Limits) -> Outcome {
    let q = load_reach(args, limits)?;
    let default = match q.counter {
        Some(m) => counter_bound_reach(&q.odca, q.config.n, m),
        None => counter_bound_cover(&q.odca, q.config.n),
    };
    let bound = args.bound.unwrap_or(default);
    let witness = match q.counter {
        Some(m) => covs_reach(&q.odca, &q.config, &q.space, &q.targets, m, args.bound)?,
        None => covs_cover(&q.odca, &q.config, &q.space, &q.targets, args.bound)?,
    };
    Ok(report_reach(&q, witness, bound.into(), bound >= default))
}

fn cmd_regular(file: &Path) -> Outcome {
    let m = read_weighted(file)?;
    Ok(match is_regular(&m)? {
        Regularity::Regular => report("regular", Value::Null, Value::Null, true, true),
        Regularity::NotRegular { u, v } => {
            let witness = json!({ "u": m.format_word(&u), "v": m.format_word(&v) });
            report("not-regular", witness, Value::Null, true, false)
        }
    })
}

fn cmd_cover(a: &Path, b: &Path, bound: Option<usize>) -> Outcome {
    let (a, b) = (read_weighted(a)?, read_weighted(b)?);
    let complete = bound.is_none_or(|n| bound_is_complete(&a, &b, n));
    let bound_used = bound.map_or(Value::Null, Value::from);
    Ok(match covers(&a, &b, bound)? {
        Covering::Covered(found) => {
            let pairs: Vec<Value> = found
                .iter()
                .map(|w| {
                    json!({
                        "covered": b.counter.states[w.covered_state],
                        "covering": a.counter.states[w.covering_state],
                    })
                })
                .collect();
            report("covered", pairs.into(), bound_used, complete, true)
        }
        Covering::NotCovered {
            counter_state,
            direction,
            stage,
        } => {
            let stage = match stage {
                CoverStage::ZeroFunctionCheck => "zero-function-check",
                CoverStage::Learning => "learning",
            };
            let witness = json!({
                "counter_state": b.counter.states[counter_state],
                "direction": direction,
                "stage": stage,
            });
            report("not-covered", witness, bound_used, complete, false)
        }
    })
}

fn cmd_coverable_equiv(a: &Path, b: &Path, bound: Option<usize>) -> Outcome {
    let (a, b) = (read_weighted(a)?, read_weighted(b)?);
    let complete = bound.is_none_or(|n| bound_is_complete(&a, &b, n));
    let yes = coverable_equiv(&a, &b, bound)?;
    let verdict = if yes {
        "coverable-equivalent"
    } else {
        "not-coverable-equivalent"
    };
    Ok(report(
        verdict,
        Value::Null,
        bound.map_or(Value::Null, Value::from),
        complete,
        yes,
    ))
}

fn cmd_translate(file: &Path, output: &Path) -> Outcome {
    let text = match read(file)? {
        Document::WeightedOca(oca) => {
            if let Err(v) = check_counter_determinacy(&oca) {
                eprintln!(
                    "not counter-deterministic: counter values {} and {}",
                    v.counters.0, v.counters.1
                );
                let witness = Value::from(oca.alphabet.format_word(&v.word));
                return Ok(report("not-counter-deterministic", witness, Value::Null, true, false));
            }
            format::weighted_odca_to_json(&oca_to_odca(&oca)?)
        }
        Document::WeightedOdca(m) => format::weighted_oca_to_json(&odca_to_oca(&m)),
        d => return Err(usage(format!("cannot translate a {} document", d.type_name()))),
    };
    write(output, &text)?;
    Ok(0)
}

fn cmd_random(args: &RandomArgs) -> Outcome {
    if args.states == 0 || args.counter_states == 0 || args.alphabet == 0 {
        return Err(usage("sizes must be positive"));
    }
    let m = oracle::random_odca(args.states, args.counter_states, args.alphabet, None, args.seed);
    let text = format::weighted_odca_to_json(&m);
    match &args.output {
        Some(path) => write(path, &text)?,
        None => print!("{text}"),
    }
    Ok(0)
}

fn cmd_oracle(cmd: &OracleCommand, limits: &Limits) -> Outcome {
    match cmd {
        OracleCommand::Equiv { a, b, max_len } => {
            let (a, b) = (read_weighted(a)?, read_weighted(b)?);
            if a.alphabet != b.alphabet {
                return Err(Error::AlphabetMismatch {
                    left: a.alphabet.symbols().to_vec(),
                    right: b.alphabet.symbols().to_vec(),
                }
                .into());
            }
            let w = oracle::brute_equiv(&a, &b, *max_len);
            let yes = w.is_none();
            let witness = w.map_or(Value::Null, |w| a.format_word(&w).into());
            let verdict = if yes { "equivalent" } else { "not-equivalent" };
            Ok(report(verdict, witness, (*max_len).into(), false, yes))
        }
        OracleCommand::Reach {
            query,
            word_cap,
            counter_cap,
        } => {
            let q = load_reach(query, limits)?;
            let w = oracle::brute_reach(
                &q.odca,
                &q.config,
                &q.space,
                &q.targets,
                q.counter,
                *word_cap,
                *counter_cap,
            );
            Ok(report_reach(&q, w, (*counter_cap).into(), false))
        }
        OracleCommand::Hankel { file, max_len } => {
            let m = read_weighted(file)?;
            let rank = oracle::hankel_rank(|w| oracle::brute_eval(&m, w), m.alphabet.len(), *max_len);
            let out = json!({ "hankel_rank": rank, "max_len": max_len });
            println!("{}", serde_json::to_string_pretty(&out).expect("json"));
            Ok(0)
        }
        OracleCommand::Random(args) => cmd_random(args),
    }
}

fn dispatch(cli: &Cli) -> Outcome {
    let limits = Limits {
        allow_large: cli.allow_large_counters,
    };
    let check_bound = |b: &Option<usize>| b.map_or(Ok(()), |b| limits.check("bound", b));
    match &cli.command {
        Command::Eval { file, word } => cmd_eval(file, word),
        Command::Equiv { a, b, bound } => {
            check_bound(bound)?;
            let (ma, mb) = (read_weighted(a)?, read_weighted(b)?);
            let v = odca_equiv(&ma, &mb, *bound)?;
            Ok(report_equiv(&ma, &v))
        }
        Command::BoolEquiv { a, b, bound } => {
            check_bound(bound)?;
            let (ba, bb) = (read_boolean(a)?, read_boolean(b)?);
            let v = bool_equiv(&ba, &bb, *bound)?;
            Ok(report_equiv(&ba.to_weighted(), &v))
        }
        Command::Reach(args) => cmd_reach(args, &limits),
        Command::Regular { file } => cmd_regular(file),
        Command::Cover { a, b, bound } => {
            check_bound(bound)?;
            cmd_cover(a, b, *bound)
        }
        Command::CoverableEquiv { a, b, bound } => {
            check_bound(bound)?;
            cmd_coverable_equiv(a, b, *bound)
        }
        Command::Determinize { file, output } => {
            let d = determinize(&read_boolean(file)?)?;
            write(output, &format::boolean_odca_to_json(&d))?;
            Ok(0)
        }
        Command::Translate { file, output } => cmd_translate(file, output),
        Command::Oracle(cmd) => cmd_oracle(cmd, &limits),
        Command::Random(args) => cmd_random(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("odca: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
