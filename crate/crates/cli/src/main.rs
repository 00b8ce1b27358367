use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;

use lrc_core::acceptance;
use lrc_core::codefile::{CodeSpecFile, CodewordFile, MessageFile};
use lrc_core::evalset::PairSet;
use lrc_core::gf::{FieldElement, PrimeField};
use lrc_core::inner::InnerCode;
use lrc_core::lrc2::Lrc2Code;
use lrc_core::lrc3::{Case, Lrc3Code, Schedule};
use lrc_core::repair::LocalCode;
use lrc_core::rm::RmCode;
use lrc_core::sim::{AnyCode, Cluster, FailureSpec, Scenario, Step};

/// Build, encode, decode, repair and analyze locally repairable codes.
#[derive(Debug, Parser)]
#[command(name = "lrc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a code and write its spec file.
    Construct(ConstructArgs),
    /// Encode a message.
    Encode(EncodeArgs),
    /// Recover the message from a (possibly damaged) codeword.
    Decode(DecodeArgs),
    /// Replay failures and repairs on a simulated cluster.
    Simulate(SimulateArgs),
    /// Report parameters of a code, or of Reed-Muller codes.
    Analyze(AnalyzeArgs),
    /// Run the acceptance suite, or check a codeword against a spec.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PairsArg {
    All,
    Chain,
    Explicit,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum InnerArg {
    /// Systematic rows for locality 2, scaled Vandermonde rows for locality 3.
    Auto,
    /// Rows (1, a, ..., a^(m-1)).
    Mds,
    /// Rows (a, a^2, ..., a^m).
    Scaled,
    /// Identity rows followed by (1, a, ..., a^(m-1)).
    Systematic,
    /// Rows given by --rows.
    Explicit,
    /// Random search for rows meeting the interpolation requirements.
    Search,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CaseArg {
    A,
    B,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Spanning,
    AllPairs,
}

#[derive(Debug, Args)]
struct ConstructArgs {
    /// Locality: 2 or 3.
    #[arg(long, value_parser = clap::value_parser!(u8).range(2..=3))]
    kind: u8,
    #[arg(long)]
    q: u64,
    /// Number of inner rows N.
    #[arg(long)]
    n: usize,
    /// Inner dimension m.
    #[arg(long)]
    m: usize,
    /// Extension points per line.
    #[arg(long = "L", alias = "l")]
    l: usize,
    #[arg(long, value_enum, default_value = "chain")]
    pairs: PairsArg,
    /// Pairs for --pairs explicit, 0-based: "0-1,2-3".
    #[arg(long)]
    pair_list: Option<String>,
    #[arg(long = "case", value_enum, default_value = "a")]
    case: CaseArg,
    #[arg(long, value_enum, default_value = "auto")]
    inner: InnerArg,
    /// Evaluation points of the inner code, comma separated; default 1, 2, ...
    #[arg(long)]
    points: Option<String>,
    /// Rows for --inner explicit: "1,0;0,1;1,1".
    #[arg(long)]
    rows: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Attempts for --inner search.
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long)]
    allow_uncovered: bool,
    /// Brute-force the minimum distance when the code is small enough.
    #[arg(long)]
    bruteforce: bool,
    /// Spec output path; stdout when absent.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Parameter report output path; stderr when absent.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EncodeArgs {
    #[arg(long)]
    spec: PathBuf,
    /// Message file.
    #[arg(long, conflicts_with = "message", required_unless_present = "message")]
    data: Option<PathBuf>,
    /// Message symbols inline, comma separated.
    #[arg(long)]
    message: Option<String>,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DecodeArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    codeword: PathBuf,
    /// Pair schedule for the locality-3 decoder.
    #[arg(long, value_enum, default_value = "spanning")]
    mode: ModeArg,
    /// Corrupt this many randomly chosen symbols before decoding; locality-3
    /// codes only corrupt the sumset block.
    #[arg(long, default_value_t = 0)]
    inject_errors: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    spec: PathBuf,
    /// Codeword to place; the all-zero message is used when absent.
    #[arg(long)]
    codeword: Option<PathBuf>,
    /// Scenario file.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Nodes to fail, then repair once: "1,5".
    #[arg(long, conflicts_with = "scenario")]
    fail: Option<String>,
    /// Fail this many random nodes, then repair once.
    #[arg(long, conflicts_with_all = ["scenario", "fail"])]
    random_failures: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the cluster snapshot with its event log here.
    #[arg(long)]
    log: Option<PathBuf>,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[arg(long, required_unless_present = "rm_q")]
    spec: Option<PathBuf>,
    #[arg(long)]
    bruteforce: bool,
    /// Random erasure patterns per size for locality-3 codes.
    #[arg(long, default_value_t = 20)]
    probe_trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Tabulate Reed-Muller codes over F_q instead.
    #[arg(long, conflicts_with = "spec", requires = "rm_m")]
    rm_q: Option<u64>,
    #[arg(long)]
    rm_m: Option<usize>,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Check this codeword against --spec instead of running the suite.
    #[arg(long, requires = "spec")]
    codeword: Option<PathBuf>,
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Run only these criteria.
    #[arg(long, value_delimiter = ',')]
    criterion: Vec<usize>,
}

enum Failure {
    Usage(String),
    Domain(String),
    Verification(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Domain(_) => 2,
            Failure::Verification(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Domain(m) | Failure::Verification(m) => m,
        }
    }
}

impl From<lrc_core::Error> for Failure {
    fn from(e: lrc_core::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

fn domain(context: &str) -> impl Fn(lrc_core::Error) -> Failure + '_ {
    move |e| Failure::Domain(format!("{context}: {e}"))
}

type Result<T> = std::result::Result<T, Failure>;

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))
}

fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    match path {
        Some(p) => fs::write(p, text + "\n").map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn parse_list(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Failure::Usage(format!("not an integer: {t:?}"))))
        .collect()
}

fn parse_pairs(s: &str) -> Result<Vec<(usize, usize)>> {
    s.split(',')
        .map(|p| {
            let (a, b) = p
                .trim()
                .split_once('-')
                .ok_or_else(|| Failure::Usage(format!("pair {p:?} is not of the form i-j")))?;
            let parse = |x: &str| {
                x.trim()
                    .parse()
                    .map_err(|_| Failure::Usage(format!("bad index in {p:?}")))
            };
            Ok((parse(a)?, parse(b)?))
        })
        .collect()
}

fn load_spec(path: &Path) -> Result<AnyCode> {
    let spec: CodeSpecFile = read_json(path)?;
    spec.build().map_err(domain("spec"))
}

fn build_inner(a: &ConstructArgs, field: PrimeField) -> Result<InnerCode> {
    let points = |count: usize, zero_ok: bool| -> Result<Vec<FieldElement>> {
        let vals = match &a.points {
            Some(s) => parse_list(s)?,
            None => (if zero_ok { 0 } else { 1 }..).take(count).collect(),
        };
        Ok(vals.into_iter().map(|v| field.elem(v)).collect())
    };
    let inner_err = |e: lrc_core::inner::InnerError| Failure::Domain(format!("inner code: {e}"));
    let kind = match a.inner {
        InnerArg::Auto if a.kind == 2 => InnerArg::Systematic,
        InnerArg::Auto => InnerArg::Scaled,
        k => k,
    };
    match kind {
        InnerArg::Mds => InnerCode::mds(field, a.m, &points(a.n, false)?).map_err(inner_err),
        InnerArg::Scaled => InnerCode::scaled_mds(field, a.m, &points(a.n, false)?).map_err(inner_err),
        InnerArg::Systematic => {
            let parity =
                a.n.checked_sub(a.m)
                    .ok_or_else(|| Failure::Usage("--n must be at least --m".into()))?;
            InnerCode::systematic(field, a.m, &points(parity, false)?).map_err(inner_err)
        }
        InnerArg::Explicit => {
            let rows = a
                .rows
                .as_deref()
                .ok_or_else(|| Failure::Usage("--inner explicit needs --rows".into()))?;
            let rows: Vec<Vec<u64>> = rows.split(';').map(parse_list).collect::<Result<_>>()?;
            InnerCode::from_u64_rows(field, &rows).map_err(inner_err)
        }
        InnerArg::Search => InnerCode::search_nis_grade(field, a.n, a.m, a.trials, a.seed).map_err(inner_err),
        InnerArg::Auto => unreachable!("resolved above"),
    }
}

fn construct(a: &ConstructArgs) -> Result<()> {
    let field = PrimeField::new(a.q).map_err(|e| Failure::Domain(format!("field: {e}")))?;
    if a.kind == 3 && a.q < 5 {
        // reported before any inner-code work
        return Err(Failure::Domain(format!(
            "construct: {}",
            lrc_core::lrc3::Lrc3Error::QTooSmall(a.q)
        )));
    }
    let inner = build_inner(a, field)?;
    let case = match a.case {
        CaseArg::A => Case::A,
        CaseArg::B => Case::B,
    };
    let index_count = if a.kind == 3 && matches!(case, Case::B) {
        lrc_core::lrc3::SumSet::new(inner.rows()).len()
    } else {
        inner.n()
    };
    let pairs = match a.pairs {
        PairsArg::All => PairSet::all(index_count),
        PairsArg::Chain => PairSet::chain(index_count),
        PairsArg::Explicit => {
            let list = a
                .pair_list
                .as_deref()
                .ok_or_else(|| Failure::Usage("--pairs explicit needs --pair-list".into()))?;
            PairSet::new(index_count, parse_pairs(list)?).map_err(|e| Failure::Domain(format!("pairs: {e}")))?
        }
    };
    let code: AnyCode = if a.kind == 2 {
        Lrc2Code::build(inner, pairs, a.l, a.allow_uncovered)
            .map_err(|e| Failure::Domain(format!("locality 2: {e}")))?
            .into()
    } else {
        Lrc3Code::build(inner, pairs, a.l, case, a.allow_uncovered)
            .map_err(|e| Failure::Domain(format!("locality 3: {e}")))?
            .into()
    };
    write_json(&CodeSpecFile::from_code(&code), a.out.as_deref())?;
    let report = report_value(&code, a.bruteforce, 20, a.seed);
    match &a.report {
        Some(p) => write_json(&report, Some(p)),
        None => {
            eprintln!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
            Ok(())
        }
    }
}

fn report_value(code: &AnyCode, bruteforce: bool, probe_trials: usize, seed: u64) -> serde_json::Value {
    match code {
        AnyCode::Lrc2(c) => serde_json::to_value(c.report(bruteforce)),
        AnyCode::Lrc3(c) => serde_json::to_value(c.report(probe_trials, seed)),
    }
    .expect("serializable")
}

fn encode(a: &EncodeArgs) -> Result<()> {
    let code = load_spec(&a.spec)?;
    let field = code.field();
    let msg = match (&a.data, &a.message) {
        (Some(p), _) => read_json::<MessageFile>(p)?
            .elements(field)
            .map_err(domain("message"))?,
        (None, Some(s)) => {
            let vals = parse_list(s)?;
            MessageFile {
                q: field.modulus(),
                data: vals,
            }
            .elements(field)
            .map_err(domain("message"))?
        }
        (None, None) => unreachable!("clap requires one"),
    };
    let word = code.encode(&msg).map_err(|e| Failure::Domain(format!("encode: {e}")))?;
    write_json(&CodewordFile::new(&word, field), a.out.as_deref())
}

fn decode(a: &DecodeArgs) -> Result<()> {
    use rand::{Rng, SeedableRng};
    let code = load_spec(&a.spec)?;
    let field = code.field();
    let file: CodewordFile = read_json(&a.codeword)?;
    let mut received = file.received(field, code.len()).map_err(domain("codeword"))?;
    if a.inject_errors > 0 {
        let span = match &code {
            AnyCode::Lrc2(_) => code.len(),
            AnyCode::Lrc3(c) => c.sum_set().len(),
        };
        if a.inject_errors > span {
            return Err(Failure::Usage(format!(
                "cannot corrupt {} of {span} symbols",
                a.inject_errors
            )));
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(a.seed);
        for i in rand::seq::index::sample(&mut rng, span, a.inject_errors) {
            let shift = field.elem(rng.random_range(1..field.modulus()));
            received[i] = received[i].map(|x| x + shift);
        }
    }
    let message = match &code {
        AnyCode::Lrc2(c) => c
            .decode_global(&received)
            .map_err(|e| Failure::Domain(format!("decode: {e}")))?,
        AnyCode::Lrc3(c) => {
            let mode = match a.mode {
                ModeArg::Spanning => Schedule::Spanning,
                ModeArg::AllPairs => Schedule::AllPairs,
            };
            c.decode_interpolating(&received, mode)
                .map_err(|e| Failure::Domain(format!("decode: {e}")))?
                .message
        }
    };
    write_json(&MessageFile::new(&message, field), a.out.as_deref())
}

fn simulate(a: &SimulateArgs) -> Result<()> {
    let code = load_spec(&a.spec)?;
    let field = code.field();
    let word = match &a.codeword {
        Some(p) => read_json::<CodewordFile>(p)?
            .complete(field, code.len())
            .map_err(domain("codeword"))?,
        None => vec![field.zero(); code.len()],
    };
    let scenario = if let Some(p) = &a.scenario {
        read_json::<Scenario>(p)?
    } else if let Some(list) = &a.fail {
        let nodes = parse_list(list)?.into_iter().map(|v| v as usize).collect();
        Scenario {
            name: "explicit".into(),
            steps: vec![Step::Fail(FailureSpec::Explicit(nodes)), Step::Repair],
        }
    } else if let Some(count) = a.random_failures {
        Scenario {
            name: "random".into(),
            steps: vec![Step::Fail(FailureSpec::Random { count, seed: a.seed }), Step::Repair],
        }
    } else {
        return Err(Failure::Usage("give --scenario, --fail or --random-failures".into()));
    };
    let mut cluster = Cluster::place(code, &word).map_err(|e| Failure::Domain(format!("place: {e}")))?;
    let stats = cluster
        .run(&scenario)
        .map_err(|e| Failure::Domain(format!("simulate: {e}")))?;
    if let Some(p) = &a.log {
        write_json(&cluster.snapshot(), Some(p))?;
    }
    write_json(&stats, a.out.as_deref())
}

fn analyze(a: &AnalyzeArgs) -> Result<()> {
    if let (Some(q), Some(m)) = (a.rm_q, a.rm_m) {
        let field = PrimeField::new(q).map_err(|e| Failure::Domain(format!("field: {e}")))?;
        let max_u = m as u32 * (q as u32 - 1);
        let table = (0..=max_u)
            .map(|u| RmCode::new(field, m, u).map(|c| c.report(a.bruteforce)))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Failure::Domain(format!("rm: {e}")))?;
        return write_json(&table, a.out.as_deref());
    }
    let spec = a.spec.as_deref().expect("clap requires --spec or --rm-q");
    let code = load_spec(spec)?;
    write_json(
        &report_value(&code, a.bruteforce, a.probe_trials, a.seed),
        a.out.as_deref(),
    )
}

fn verify(a: &VerifyArgs) -> Result<()> {
    if let Some(path) = &a.codeword {
        let code = load_spec(a.spec.as_deref().expect("clap requires --spec"))?;
        let word = read_json::<CodewordFile>(path)?
            .complete(code.field(), code.len())
            .map_err(|e| Failure::Verification(format!("codeword: {e}")))?;
        if !code.is_codeword(&word) {
            return Err(Failure::Verification(format!("{} is not a codeword", path.display())));
        }
        println!("{} is a codeword", path.display());
        return Ok(());
    }
    let ids: Vec<usize> = if a.criterion.is_empty() {
        (1..=acceptance::CRITERIA.len()).collect()
    } else {
        a.criterion.clone()
    };
    if let Some(&bad) = ids.iter().find(|&&i| i == 0 || i > acceptance::CRITERIA.len()) {
        return Err(Failure::Usage(format!("no criterion {bad}")));
    }
    let mut failed = Vec::new();
    for id in ids {
        let r = acceptance::run(id);
        println!("{r}");
        if !r.passed {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(format!("failed criteria {failed:?}")))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Construct(a) => construct(a),
        Command::Encode(a) => encode(a),
        Command::Decode(a) => decode(a),
        Command::Simulate(a) => simulate(a),
        Command::Analyze(a) => analyze(a),
        Command::Verify(a) => verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
