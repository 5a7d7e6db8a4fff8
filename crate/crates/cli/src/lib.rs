//! Command implementations behind the `hamwalk` binary.
//!
//! Every command writes its artifact to `--out` (or stdout) and its report to
//! the `report` writer, and returns whether all of its checks passed.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use hamwalk::graycode::{
    balance_class, build_balanced_code, format_codewords, is_cyclic_gray, transition_counts,
};
use hamwalk::markov::{
    check_analysis_cap, is_doubly_stochastic, markov_lazy, markov_uniform, mixing_time,
    practical_mixing_time, DEFAULT_ANALYSIS_CAP, REPORT_EPSILONS,
};
use hamwalk::metric::{distance, DigitDistance, ExtendedPoint};
use hamwalk::ncube::{
    completeness_b, default_b_max, function_from_cycle, gamma, gamma_p, is_square_free,
    is_strongly_connected, BooleanMap, Configuration,
};
use hamwalk::prng::{GeneratorState, Variant};
use hamwalk::stats::{chi_square_uniformity, export_bits, monobit, runs, BitFormat, TestReport};
use hamwalk::stoptime::{estimate_expected_stop, estimate_expected_stop_par, to_csv};
use hamwalk::{fixtures, Error, Result};

/// Largest width accepted for code and function generation.
pub const MAX_GEN_BITS: usize = 20;

#[derive(Debug, Parser)]
#[command(
    name = "hamwalk",
    version,
    about = "Balanced Gray codes, chaotic-iteration maps and the generators built on them"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a balanced cyclic Gray code.
    GenCode(GenCodeArgs),
    /// Build the map obtained by removing a Hamiltonian cycle.
    GenFun(GenFunArgs),
    /// Connectivity, stochasticity and mixing-time report for a map.
    Analyze(AnalyzeArgs),
    /// Monte-Carlo estimate of the mean stopping time.
    Stoptime(StoptimeArgs),
    /// Emit generator output bits with a short quality summary.
    Bits(BitsArgs),
    /// Print the digit expansions of two worked metric examples.
    MetricDemo,
}

fn parse_n(s: &str) -> std::result::Result<usize, String> {
    let n: usize = s.parse().map_err(|e| format!("{e}"))?;
    if !(3..=MAX_GEN_BITS).contains(&n) {
        return Err(format!("N must lie in 3..={MAX_GEN_BITS}"));
    }
    Ok(n)
}

/// List of widths given as `6`, `4,6,8` or an inclusive range `4..8`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Widths(pub Vec<usize>);

fn parse_widths(s: &str) -> std::result::Result<Widths, String> {
    if let Some((lo, hi)) = s.split_once("..") {
        let (lo, hi) = (parse_n(lo)?, parse_n(hi)?);
        if lo > hi {
            return Err(format!("empty range {s}"));
        }
        return Ok(Widths((lo..=hi).collect()));
    }
    s.split(',')
        .map(|t| parse_n(t.trim()))
        .collect::<std::result::Result<_, _>>()
        .map(Widths)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CodeFormat {
    /// Comma-separated transition sequence on one line.
    Seq,
    /// One MSB-first codeword per line.
    Codewords,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BitsFormat {
    Ascii,
    Packed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Chi14,
    Chi16,
}

#[derive(Debug, Args)]
pub struct GenCodeArgs {
    #[arg(long, value_parser = parse_n)]
    pub n: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = CodeFormat::Seq)]
    pub format: CodeFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Source of the map: a bundled fixture (`a`..`e`), `negation`, a file of
/// images, or a map generated from a fresh balanced code.
#[derive(Debug, Args)]
pub struct FunctionArgs {
    #[arg(long, conflicts_with = "seed")]
    pub fixture: Option<String>,
    #[arg(long, value_parser = parse_n)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct GenFunArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    /// Deviation threshold for the practical mixing time.
    #[arg(long, default_value_t = 1e-6)]
    pub eps: f64,
    /// Walk lengths `b` whose graph `Gamma_{b}` is checked for strong
    /// connectivity.
    #[arg(long, value_delimiter = ',')]
    pub b: Vec<usize>,
    /// Largest N analysed with dense matrices.
    #[arg(long, default_value_t = DEFAULT_ANALYSIS_CAP)]
    pub cap: usize,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    pub format: ReportFormat,
}

#[derive(Debug, Args)]
pub struct StoptimeArgs {
    /// Widths to estimate, e.g. `4..8` or `4,6,8`; ignored with `--fixture`.
    #[arg(long, value_parser = parse_widths)]
    pub n: Option<Widths>,
    #[arg(long)]
    pub fixture: Option<String>,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    /// Run trials on all cores; results are identical to the serial run.
    #[arg(long)]
    pub parallel: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BitsArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    /// Seed of the inner random source.
    #[arg(long = "gen-seed", default_value_t = 0)]
    pub gen_seed: u64,
    /// Walk length; defaults to the measured practical mixing time.
    #[arg(long)]
    pub b: Option<usize>,
    #[arg(long, default_value_t = 1_000_000)]
    pub count: usize,
    #[arg(long, value_enum, default_value_t = VariantArg::Chi16)]
    pub variant: VariantArg,
    #[arg(long, value_enum, default_value_t = BitsFormat::Ascii)]
    pub format: BitsFormat,
    #[arg(long, default_value_t = 1e-6)]
    pub eps: f64,
    #[arg(long, default_value_t = DEFAULT_ANALYSIS_CAP)]
    pub cap: usize,
    #[arg(long)]
    pub out: PathBuf,
}

/// Writes `bytes` to `out`, or to `stdout` when no path is given.
fn emit(out: Option<&Path>, bytes: &[u8], stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => fs::write(path, bytes)?,
        None => stdout.write_all(bytes)?,
    }
    Ok(())
}

fn config_line(report: &mut dyn Write, args: &[String]) -> Result<()> {
    writeln!(report, "# hamwalk {}", args.join(" "))?;
    Ok(())
}

fn load_function(args: &FunctionArgs) -> Result<(BooleanMap, String)> {
    if let Some(name) = &args.fixture {
        if name == "negation" {
            let n = args.n.unwrap_or(3);
            return Ok((BooleanMap::negation(n)?, format!("negation N={n}")));
        }
        if fixtures::find(name).is_some() {
            return Ok((fixtures::load(name)?, format!("fixture {name}")));
        }
        let text = fs::read_to_string(name)?;
        return Ok((BooleanMap::parse(&text)?, format!("file {name}")));
    }
    match (args.n, args.seed) {
        (Some(n), Some(seed)) => {
            let code = build_balanced_code(n, seed)?;
            Ok((
                function_from_cycle(&code)?,
                format!("generated N={n} seed={seed}"),
            ))
        }
        _ => Err(Error::Domain(
            "give --fixture, or both --n and --seed".into(),
        )),
    }
}

pub fn gen_code(
    args: &GenCodeArgs,
    stdout: &mut dyn Write,
    report: &mut dyn Write,
) -> Result<bool> {
    let code = build_balanced_code(args.n, args.seed)?;
    let counts = transition_counts(&code);
    let valid = is_cyclic_gray(&code);
    writeln!(report, "class: {}", balance_class(&code))?;
    writeln!(report, "tc: {:?}", counts.as_slice())?;
    writeln!(report, "cyclic_gray: {valid}")?;
    let body = match args.format {
        CodeFormat::Seq => format!("{code}\n"),
        CodeFormat::Codewords => format_codewords(&code),
    };
    emit(args.out.as_deref(), body.as_bytes(), stdout)?;
    Ok(valid)
}

pub fn gen_fun(args: &GenFunArgs, stdout: &mut dyn Write, report: &mut dyn Write) -> Result<bool> {
    let (f, label) = load_function(&args.function)?;
    writeln!(report, "source: {label}")?;
    let mut ok = true;
    let source = &args.function;
    if let (None, Some(n), Some(seed)) = (&source.fixture, source.n, source.seed) {
        let code = build_balanced_code(n, seed)?;
        writeln!(report, "class: {}", balance_class(&code))?;
        writeln!(report, "tc: {:?}", transition_counts(&code).as_slice())?;
    }
    if f.directions().is_some() {
        let sf = is_square_free(&f)?;
        writeln!(report, "hbar_bijective: {}", sf.bijective)?;
        writeln!(report, "hbar_square_free: {}", sf.square_free)?;
        ok &= sf.bijective && sf.square_free;
    }
    emit(
        args.out.as_deref(),
        format!("{}\n", f.to_line()).as_bytes(),
        stdout,
    )?;
    Ok(ok)
}

pub fn analyze(args: &AnalyzeArgs, stdout: &mut dyn Write) -> Result<bool> {
    let (f, label) = load_function(&args.function)?;
    check_analysis_cap(f.n_bits(), args.cap)?;
    let strongly_connected = is_strongly_connected(&gamma(&f));
    let uniform = markov_uniform(&f);
    let mut doubly_stochastic = is_doubly_stochastic(&uniform);
    let mut practical_b = None;
    let mut t_mix = Vec::new();
    if f.directions().is_some() {
        let lazy = markov_lazy(&f)?;
        doubly_stochastic &= is_doubly_stochastic(&lazy);
        practical_b = Some(practical_mixing_time(&lazy, args.eps)?);
        for &eps in &REPORT_EPSILONS {
            t_mix.push((eps, mixing_time(&lazy, eps)?));
        }
    }
    let completeness = completeness_b(&f, default_b_max(f.n_bits()));
    let mut gamma_b = Vec::new();
    for &b in &args.b {
        gamma_b.push((b, is_strongly_connected(&gamma_p(&f, &[b])?)));
    }
    let ok = strongly_connected
        && doubly_stochastic
        && practical_b.is_some()
        && gamma_b.iter().all(|&(_, sc)| sc);

    let body = match args.format {
        ReportFormat::Json => {
            let value = json!({
                "source": label,
                "n_bits": f.n_bits(),
                "strongly_connected": strongly_connected,
                "doubly_stochastic": doubly_stochastic,
                "eps": args.eps,
                "practical_b": practical_b,
                "t_mix": t_mix.iter().map(|&(e, t)| json!({"eps": e, "t": t})).collect::<Vec<_>>(),
                "completeness_b": completeness,
                "gamma_b": gamma_b.iter().map(|&(b, sc)| json!({"b": b, "strongly_connected": sc})).collect::<Vec<_>>(),
            });
            serde_json::to_string_pretty(&value).expect("json values serialize") + "\n"
        }
        ReportFormat::Text => {
            let mut s = format!("source: {label}\nn_bits: {}\n", f.n_bits());
            s += &format!("strongly_connected: {strongly_connected}\n");
            s += &format!("doubly_stochastic: {doubly_stochastic}\n");
            match practical_b {
                Some(b) => s += &format!("practical_b: {b} (eps {:e})\n", args.eps),
                None => s += "practical_b: none (map has no removed-direction table)\n",
            }
            for (eps, t) in &t_mix {
                s += &format!("t_mix({eps:e}): {t}\n");
            }
            match completeness {
                Some(b) => s += &format!("completeness_b: {b}\n"),
                None => s += "completeness_b: none\n",
            }
            for (b, sc) in &gamma_b {
                s += &format!("strongly_connected(gamma_{b}): {sc}\n");
            }
            s
        }
    };
    stdout.write_all(body.as_bytes())?;
    Ok(ok)
}

pub fn stoptime(
    args: &StoptimeArgs,
    stdout: &mut dyn Write,
    report: &mut dyn Write,
) -> Result<bool> {
    let estimate = if args.parallel {
        estimate_expected_stop_par
    } else {
        estimate_expected_stop
    };
    let mut rows = Vec::new();
    if let Some(name) = &args.fixture {
        let (f, _) = load_function(&FunctionArgs {
            fixture: Some(name.clone()),
            n: None,
            seed: None,
        })?;
        rows.push(estimate(&f, args.trials, args.seed)?);
    } else {
        let widths = args
            .n
            .clone()
            .ok_or_else(|| Error::Domain("give --n or --fixture".into()))?;
        for n in widths.0 {
            let f = function_from_cycle(&build_balanced_code(n, args.seed)?)?;
            rows.push(estimate(&f, args.trials, args.seed)?);
        }
    }
    let mut ok = true;
    for row in &rows {
        let below = row.mean <= row.bound;
        writeln!(
            report,
            "N={} mean={:.3} se={:.3} bound={:.3} below_bound={below}",
            row.n_bits, row.mean, row.std_error, row.bound
        )?;
        ok &= below;
    }
    emit(args.out.as_deref(), to_csv(&rows).as_bytes(), stdout)?;
    Ok(ok)
}

pub fn bits(args: &BitsArgs, report: &mut dyn Write) -> Result<bool> {
    let (f, label) = load_function(&args.function)?;
    let variant = match args.variant {
        VariantArg::Chi14 => Variant::Chi14,
        VariantArg::Chi16 => Variant::Chi16,
    };
    let b = match args.b {
        Some(b) => b,
        None => {
            check_analysis_cap(f.n_bits(), args.cap)?;
            let m = match variant {
                Variant::Chi14 => markov_uniform(&f),
                Variant::Chi16 => markov_lazy(&f)?,
            };
            practical_mixing_time(&m, args.eps)?
        }
    };
    writeln!(report, "source: {label}")?;
    writeln!(report, "walk_length: {b}")?;
    let n = f.n_bits();
    let mut g = GeneratorState::seeded(f, b, args.gen_seed, variant)?;
    let outputs = g.outputs(args.count.div_ceil(n));
    let stream: Vec<bool> = outputs
        .iter()
        .flat_map(|&w| (0..n).map(move |k| (w >> (n - 1 - k)) & 1 == 1))
        .take(args.count)
        .collect();
    let format = match args.format {
        BitsFormat::Ascii => BitFormat::Ascii,
        BitsFormat::Packed => BitFormat::Packed,
    };
    let file = fs::File::create(&args.out)?;
    let written = export_bits(&stream, format, std::io::BufWriter::new(file))?;
    writeln!(report, "bytes_written: {written}")?;

    let mut ok = true;
    let mut show = |r: Result<TestReport>, report: &mut dyn Write| -> Result<()> {
        match r {
            Ok(r) => {
                ok &= r.pass;
                writeln!(report, "{r}")?;
            }
            Err(Error::TooFewSamples { needed, got }) => {
                writeln!(report, "skipped: needs {needed} samples, got {got}")?;
            }
            Err(e) => return Err(e),
        }
        Ok(())
    };
    show(monobit(&stream), report)?;
    show(runs(&stream), report)?;
    show(chi_square_uniformity(&outputs, n), report)?;
    Ok(ok)
}

/// The two worked examples, `(grouped digits, expected printed prefix)`.
pub fn metric_examples() -> Result<Vec<(DigitDistance, &'static str)>> {
    let point = |n: usize, u: &[usize], v: &[usize], periods: &[usize]| {
        ExtendedPoint::new(
            Configuration::new(n, 0)?,
            u.to_vec(),
            v.to_vec(),
            periods.to_vec(),
        )
    };
    let first = distance(
        &point(13, &[6, 11, 5], &[1, 2], &[1, 2, 11])?,
        &point(13, &[6, 4, 1], &[2, 1], &[1, 2, 11])?,
        2,
    )?;
    let second = distance(
        &point(9, &[6, 7, 4, 2], &[2, 2], &[2, 7])?,
        &point(9, &[4, 9, 6, 3, 6, 6, 7, 9, 8], &[7, 2], &[2, 7])?,
        2,
    )?;
    Ok(vec![
        (first, "0.01 0004000000000000000000 01 1005"),
        (second, "0.5 2263667 1 5600000"),
    ])
}

pub fn metric_demo(stdout: &mut dyn Write) -> Result<bool> {
    let mut ok = true;
    for (d, printed) in metric_examples()? {
        let matches = d.grouped().starts_with(printed);
        writeln!(stdout, "computed: {}", d.grouped())?;
        writeln!(stdout, "printed:  {printed}...")?;
        writeln!(stdout, "prefix_match: {matches}")?;
        ok &= matches;
    }
    Ok(ok)
}

/// Runs a parsed command. `argv` is echoed as the config line.
pub fn run(
    cli: &Cli,
    argv: &[String],
    stdout: &mut dyn Write,
    report: &mut dyn Write,
) -> Result<bool> {
    config_line(report, argv)?;
    match &cli.command {
        Command::GenCode(a) => gen_code(a, stdout, report),
        Command::GenFun(a) => gen_fun(a, stdout, report),
        Command::Analyze(a) => analyze(a, stdout),
        Command::Stoptime(a) => stoptime(a, stdout, report),
        Command::Bits(a) => bits(a, report),
        Command::MetricDemo => metric_demo(stdout),
    }
}
