//! Command line driver: mutate, analyze, orbit, verify, build and decompose
//! subcommands over quiver and recurrence spec files. Every report embeds
//! the sha256 of its input and the RNG seed, so reruns with the same
//! arguments produce byte-identical output.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use quiverdyn::algebra::parse_rational;
use quiverdyn::dynamics::{
    iterate, iterate_period2, iterate_symbolic, recurrence_from_quiver, Period2Spec,
    RecurrenceSpec, ResourceCaps, SpecFile,
};
use quiverdyn::fixtures::named_quiver;
use quiverdyn::integrals::{integral_report, lax_check, verify_frieze_det, verify_linear_relation, LaxFixture};
use quiverdyn::poisson::{invariant_bracket, leaf_reduce, verify_form_invariance, InvariantBracket, TwoForm};
use quiverdyn::quiver::{
    build_period1, build_period2, decompose_period1, detect_period, exceptional_period2, mutate,
    PalindromicTuple, QuiverMatrix,
};
use quiverdyn::sample::Sampler;
use quiverdyn::tropical::{classify_entropy, tropical_degrees, EntropyClass};
use quiverdyn::Rational;

#[derive(Parser)]
#[command(name = "quiverdyn", version, about = "Mutation-periodic quivers, cluster recurrences and their integrability structure")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Form,
    Integrals,
    Linear,
    Lax,
    All,
}

#[derive(Subcommand)]
enum Cmd {
    /// Apply a sequence of mutations to a quiver file and write the result.
    Mutate {
        /// Quiver file path or a named fixture (e.g. somos4).
        quiver: String,
        /// 1-based node indices, applied left to right.
        nodes: Vec<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Report period, decomposition, recurrence, entropy class and rank.
    Analyze {
        quiver: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Iterate a recurrence spec numerically, symbolically or tropically.
    Orbit {
        /// Spec file: {"n": int, "m": [int,...]} or {"period2": {...}}.
        spec: PathBuf,
        /// Initial values as rationals (e.g. 1,1,2/3,1); defaults to ones.
        #[arg(long, value_delimiter = ',')]
        init: Vec<String>,
        #[arg(long, default_value_t = 20)]
        count: usize,
        /// Emit Laurent polynomials in the initial cluster instead of values.
        #[arg(long)]
        symbolic: bool,
        /// Emit the max-plus degree sequence instead of values.
        #[arg(long)]
        tropical: bool,
        /// 1-based seed position for the tropical sequence.
        #[arg(long, default_value_t = 1)]
        seed_pos: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Cap on symbolic term counts before aborting.
        #[arg(long, default_value_t = 2_000_000)]
        max_terms: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run verification suites against a quiver; nonzero exit on failure.
    Verify {
        quiver: String,
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// Construct quivers from exponent tuples or the fixture catalog.
    Build {
        #[command(subcommand)]
        what: BuildCmd,
    },
    /// Peel a period-1 quiver into its primitive decomposition.
    Decompose {
        quiver: String,
    },
}

#[derive(Subcommand)]
enum BuildCmd {
    /// Period-1 quiver from a palindromic tuple, e.g. 1,-2,1.
    Period1 {
        #[arg(value_delimiter = ',')]
        m: Vec<i64>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Regular period-2 pair: n=4 takes r,s,t; n=5 takes r,t.
    Period2 {
        n: usize,
        #[arg(value_delimiter = ',')]
        params: Vec<i64>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// The exceptional five-node period-2 pair for a given m1.
    Exceptional {
        m1: i64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// A quiver from the named fixture catalog (somos4, p31, gr6-1, ...).
    Named {
        name: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn sha_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    format!("{:x}", h.finalize())
}

/// Load a quiver from a file path, or fall back to the fixture catalog;
/// returns the quiver together with the sha256 of the bytes that defined it.
fn load_quiver(arg: &str) -> Result<(QuiverMatrix, String)> {
    if Path::new(arg).exists() {
        let bytes = fs::read(arg).with_context(|| format!("reading {arg}"))?;
        let text = String::from_utf8(bytes.clone()).context("quiver file is not UTF-8")?;
        let q = QuiverMatrix::from_json(&text)
            .map_err(|e| anyhow!("invalid quiver file {arg}: {e}"))?;
        Ok((q, sha_hex(&bytes)))
    } else if let Some(q) = named_quiver(arg) {
        let canon = serde_json::to_vec(&q).expect("quiver serializes");
        Ok((q, sha_hex(&canon)))
    } else {
        bail!("no such file or named fixture: {arg}")
    }
}

/// Print a line to stdout, exiting quietly if the reader hung up (e.g. the
/// output was piped into head).
fn print_text(text: &str) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{text}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => std::process::exit(0),
        r => r.context("writing stdout"),
    }
}

fn write_out(output: &Option<PathBuf>, text: &str) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => print_text(text),
    }
}

fn quiver_json(q: &QuiverMatrix) -> String {
    // One row per line keeps the matrix readable without pretty-printed
    // one-number-per-line arrays.
    let rows: Vec<String> = q
        .b
        .iter()
        .map(|r| {
            let cells: Vec<String> = r.iter().map(|x| x.to_string()).collect();
            format!("    [{}]", cells.join(", "))
        })
        .collect();
    format!("{{\n  \"n\": {},\n  \"b\": [\n{}\n  ]\n}}", q.n, rows.join(",\n"))
}

fn run(cmd: Cmd) -> Result<bool> {
    match cmd {
        Cmd::Mutate {
            quiver,
            nodes,
            output,
        } => {
            let (mut q, _) = load_quiver(&quiver)?;
            if nodes.is_empty() {
                bail!("no mutation nodes given");
            }
            for k in nodes {
                q = mutate(&q, k).map_err(|e| anyhow!("mutation at {k}: {e}"))?;
            }
            write_out(&output, &quiver_json(&q))?;
            Ok(true)
        }
        Cmd::Analyze { quiver, format } => cmd_analyze(&quiver, format),
        Cmd::Orbit {
            spec,
            init,
            count,
            symbolic,
            tropical,
            seed_pos,
            format,
            max_terms,
            output,
        } => cmd_orbit(
            &spec, &init, count, symbolic, tropical, seed_pos, format, max_terms, &output,
        ),
        Cmd::Verify {
            quiver,
            suite,
            seed,
            trials,
        } => cmd_verify(&quiver, suite, seed, trials),
        Cmd::Build { what } => cmd_build(what),
        Cmd::Decompose { quiver } => {
            let (q, sha) = load_quiver(&quiver)?;
            let d = decompose_period1(&q)
                .map_err(|e| anyhow!("not a period-1 quiver: {e}"))?;
            #[derive(Serialize)]
            struct Out {
                input_sha256: String,
                decomposition: String,
                levels: Vec<Vec<i64>>,
            }
            let out = Out {
                input_sha256: sha,
                decomposition: d.display(),
                levels: d.levels.clone(),
            };
            print_text(&serde_json::to_string_pretty(&out)?)?;
            Ok(true)
        }
    }
}

#[derive(Serialize)]
struct EntropyInfo {
    class: String,
    parameters: Vec<(String, i64)>,
}

fn entropy_info(class: &EntropyClass) -> EntropyInfo {
    match class {
        EntropyClass::PositiveEntropy { side_sum } => EntropyInfo {
            class: "positive".into(),
            parameters: vec![("side_sum".into(), *side_sum)],
        },
        EntropyClass::PeriodicCaseI { m } => EntropyInfo {
            class: "case_i".into(),
            parameters: vec![("m".into(), *m as i64)],
        },
        EntropyClass::PrimitiveCaseII { q } => EntropyInfo {
            class: "case_ii".into(),
            parameters: vec![("q".into(), *q as i64)],
        },
        EntropyClass::CompositeCaseIII { q } => EntropyInfo {
            class: "case_iii".into(),
            parameters: vec![("q".into(), *q as i64)],
        },
        EntropyClass::GaleRobinsonCaseIV { p, q } => EntropyInfo {
            class: "case_iv".into(),
            parameters: vec![("p".into(), *p as i64), ("q".into(), *q as i64)],
        },
        EntropyClass::UnclassifiedZeroCandidate => EntropyInfo {
            class: "unclassified_zero".into(),
            parameters: vec![],
        },
    }
}

fn cmd_analyze(quiver: &str, format: Format) -> Result<bool> {
    let (q, sha) = load_quiver(quiver)?;

    #[derive(Serialize)]
    struct Report {
        input_sha256: String,
        n: usize,
        period: Option<usize>,
        decomposition: Option<String>,
        recurrence: Option<Vec<i64>>,
        entropy: Option<EntropyInfo>,
        rank: usize,
        kernel_dimension: usize,
        reduced_bracket: Option<Vec<Vec<String>>>,
    }

    let period = detect_period(&q, q.n.max(2));
    let rank = TwoForm::from_quiver(&q).rank();
    let mut report = Report {
        input_sha256: sha,
        n: q.n,
        period,
        decomposition: None,
        recurrence: None,
        entropy: None,
        rank,
        kernel_dimension: q.n - rank,
        reduced_bracket: None,
    };
    if period == Some(1) {
        if let Ok(d) = decompose_period1(&q) {
            report.decomposition = Some(d.display());
        }
        if let Ok(spec) = recurrence_from_quiver(&q) {
            report.entropy = Some(entropy_info(&classify_entropy(&spec)));
            report.recurrence = Some(spec.m.clone());
        }
        match invariant_bracket(&q) {
            InvariantBracket::Nondegenerate { c, .. } => {
                report.reduced_bracket = Some(
                    c.iter()
                        .map(|r| r.iter().map(|e| e.to_string()).collect())
                        .collect(),
                );
            }
            InvariantBracket::Degenerate { .. } => {
                if let Ok(red) = leaf_reduce(&q) {
                    report.reduced_bracket = Some(
                        red.reduced_bracket
                            .iter()
                            .map(|r| r.iter().map(|e| e.to_string()).collect())
                            .collect(),
                    );
                }
            }
        }
    }
    match format {
        Format::Json => print_text(&serde_json::to_string_pretty(&report)?)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(std::io::stdout());
            w.write_record(["key", "value"])?;
            w.write_record(["input_sha256", &report.input_sha256])?;
            w.write_record(["n", &report.n.to_string()])?;
            w.write_record([
                "period",
                &report.period.map_or("null".into(), |p| p.to_string()),
            ])?;
            w.write_record([
                "decomposition",
                report.decomposition.as_deref().unwrap_or("null"),
            ])?;
            w.write_record([
                "entropy",
                report
                    .entropy
                    .as_ref()
                    .map_or("null", |e| e.class.as_str()),
            ])?;
            w.write_record(["rank", &report.rank.to_string()])?;
            w.flush()?;
        }
    }
    Ok(true)
}

fn parse_init(init: &[String], n: usize) -> Result<Vec<Rational>> {
    if init.is_empty() {
        return Ok(vec![parse_rational("1").expect("1 parses"); n]);
    }
    if init.len() != n {
        bail!("expected {n} initial values, got {}", init.len());
    }
    init.iter()
        .map(|s| parse_rational(s).ok_or_else(|| anyhow!("bad rational: {s}")))
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn cmd_orbit(
    spec_path: &Path,
    init: &[String],
    count: usize,
    symbolic: bool,
    tropical: bool,
    seed_pos: usize,
    format: Format,
    max_terms: usize,
    output: &Option<PathBuf>,
) -> Result<bool> {
    let bytes = fs::read(spec_path).with_context(|| format!("reading {}", spec_path.display()))?;
    let sha = sha_hex(&bytes);
    let file: SpecFile = serde_json::from_slice(&bytes).context("invalid spec file")?;
    let caps = ResourceCaps {
        max_terms,
        ..ResourceCaps::default()
    };
    match file {
        SpecFile::Period2 { period2 } => {
            if symbolic || tropical {
                bail!("symbolic and tropical output cover single recurrences only");
            }
            orbit_period2(&period2, init, count, format, output, &sha)
        }
        SpecFile::Recurrence(spec) => {
            // Validate the palindromic contract up front.
            let spec = RecurrenceSpec::from_m(spec.m)
                .map_err(|e| anyhow!("invalid recurrence tuple: {e}"))?;
            if tropical {
                let degs = tropical_degrees(&spec, seed_pos, count);
                return emit_series(
                    format,
                    output,
                    &sha,
                    "degree",
                    degs.iter().map(|d| d.to_string()),
                    None,
                );
            }
            if symbolic {
                let orbit = iterate_symbolic(&spec, count, caps)
                    .map_err(|e| anyhow!("symbolic iteration failed: {e}"))?;
                let denominators: Vec<Vec<i64>> = orbit
                    .values
                    .iter()
                    .map(|p| p.denominator_exponents())
                    .collect();
                return emit_series(
                    format,
                    output,
                    &sha,
                    "laurent",
                    orbit.values.iter().map(|p| p.to_string()),
                    Some(denominators),
                );
            }
            let init = parse_init(init, spec.n)?;
            let orbit = iterate(&spec, &init, count)?;
            let ok = orbit.halted_at.is_none();
            if let Some(at) = orbit.halted_at {
                eprintln!("zero divisor at index {at}; orbit truncated");
            }
            emit_series(
                format,
                output,
                &sha,
                "value",
                orbit.values.iter().map(|v| v.to_string()),
                None,
            )?;
            Ok(ok)
        }
    }
}

fn emit_series<I: Iterator<Item = String>>(
    format: Format,
    output: &Option<PathBuf>,
    sha: &str,
    column: &str,
    values: I,
    denominators: Option<Vec<Vec<i64>>>,
) -> Result<bool> {
    match format {
        Format::Csv => {
            let mut buf = Vec::new();
            {
                let mut w = csv::Writer::from_writer(&mut buf);
                match &denominators {
                    None => {
                        w.write_record(["index", column])?;
                        for (i, v) in values.enumerate() {
                            w.write_record([&(i + 1).to_string(), &v])?;
                        }
                    }
                    Some(dens) => {
                        w.write_record(["index", column, "denominator_exponents"])?;
                        for (i, v) in values.enumerate() {
                            let d = dens[i]
                                .iter()
                                .map(|x| x.to_string())
                                .collect::<Vec<_>>()
                                .join(" ");
                            w.write_record([&(i + 1).to_string(), &v, &d])?;
                        }
                    }
                }
                w.flush()?;
            }
            write_out(output, String::from_utf8(buf)?.trim_end())?;
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Out {
                input_sha256: String,
                values: Vec<String>,
                #[serde(skip_serializing_if = "Option::is_none")]
                denominators: Option<Vec<Vec<i64>>>,
            }
            let out = Out {
                input_sha256: sha.to_string(),
                values: values.collect(),
                denominators,
            };
            write_out(output, &serde_json::to_string_pretty(&out)?)?;
        }
    }
    Ok(true)
}

fn orbit_period2(
    spec: &Period2Spec,
    init: &[String],
    count: usize,
    format: Format,
    output: &Option<PathBuf>,
    sha: &str,
) -> Result<bool> {
    let init = parse_init(init, spec.n)?;
    let orbit = iterate_period2(spec, &init, count)?;
    let ok = orbit.halted_at.is_none();
    if let Some(at) = orbit.halted_at {
        eprintln!("zero divisor at index {at}; orbit truncated");
    }
    match format {
        Format::Csv => {
            let mut buf = Vec::new();
            {
                let mut w = csv::Writer::from_writer(&mut buf);
                w.write_record(["index", "x", "y"])?;
                for (i, (x, y)) in orbit.values.iter().enumerate() {
                    w.write_record([&(i + 1).to_string(), &x.to_string(), &y.to_string()])?;
                }
                w.flush()?;
            }
            write_out(output, String::from_utf8(buf)?.trim_end())?;
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Out {
                input_sha256: String,
                values: Vec<(String, String)>,
                halted_at: Option<usize>,
            }
            let out = Out {
                input_sha256: sha.to_string(),
                values: orbit
                    .values
                    .iter()
                    .map(|(x, y)| (x.to_string(), y.to_string()))
                    .collect(),
                halted_at: orbit.halted_at,
            };
            write_out(output, &serde_json::to_string_pretty(&out)?)?;
        }
    }
    Ok(ok)
}

#[derive(Serialize)]
struct CheckResult {
    check: String,
    verdict: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<serde_json::Value>,
}

fn cmd_verify(quiver: &str, suite: Suite, seed: u64, trials: usize) -> Result<bool> {
    let (q, sha) = load_quiver(quiver)?;
    let mut checks: Vec<CheckResult> = Vec::new();
    let explicit = suite != Suite::All;

    if matches!(suite, Suite::Form | Suite::All) {
        match recurrence_from_quiver(&q) {
            Ok(_) => {
                let report = verify_form_invariance(&q, trials, seed)
                    .map_err(|e| anyhow!("form invariance check failed to run: {e}"))?;
                checks.push(CheckResult {
                    check: "form_invariance".into(),
                    verdict: report.ok,
                    witness: Some(serde_json::to_value(&report)?),
                });
            }
            Err(e) if explicit => bail!("form suite needs a period-1 quiver: {e}"),
            Err(_) => {}
        }
    }

    if matches!(suite, Suite::Integrals | Suite::All) {
        match recurrence_from_quiver(&q) {
            Ok(spec) => match integral_report(&spec, seed) {
                Ok(report) => {
                    for (name, verdict) in [
                        ("involution", report.involution_ok),
                        ("ladder", report.ladder_ok),
                        ("casimir", report.casimir_ok),
                    ] {
                        if let Some(v) = verdict {
                            checks.push(CheckResult {
                                check: format!("integrals_{name}"),
                                verdict: v,
                                witness: None,
                            });
                        }
                    }
                    if let Some(rel) = &report.linear_relation {
                        checks.push(CheckResult {
                            check: "integrals_linear_relation".into(),
                            verdict: rel.holds,
                            witness: Some(serde_json::to_value(rel)?),
                        });
                    }
                }
                Err(e) if explicit => bail!("integrals suite does not cover this family: {e}"),
                Err(_) => {}
            },
            Err(e) if explicit => bail!("integrals suite needs a period-1 quiver: {e}"),
            Err(_) => {}
        }
    }

    if matches!(suite, Suite::Linear | Suite::All) {
        match recurrence_from_quiver(&q) {
            Ok(spec) => {
                let mut sampler = Sampler::new(seed);
                let init = sampler.positive_point(spec.n);
                // Long enough for both relation shapes and 20 frieze minors.
                let len = 3 * spec.n * spec.n + 40;
                match iterate(&spec, &init, len) {
                    Ok(orbit) => {
                        match verify_linear_relation(&spec, &orbit) {
                            Ok(rel) => {
                                checks.push(CheckResult {
                                    check: "linear_relation".into(),
                                    verdict: rel.holds,
                                    witness: Some(serde_json::to_value(&rel)?),
                                });
                                if let Ok(det_ok) = verify_frieze_det(&spec, &orbit, 20) {
                                    checks.push(CheckResult {
                                        check: "frieze_determinant".into(),
                                        verdict: det_ok,
                                        witness: None,
                                    });
                                }
                            }
                            Err(e) if explicit => {
                                bail!("linear suite does not cover this family: {e}")
                            }
                            Err(_) => {}
                        }
                    }
                    Err(e) => bail!("orbit generation failed: {e}"),
                }
            }
            Err(e) if explicit => bail!("linear suite needs a period-1 quiver: {e}"),
            Err(_) => {}
        }
    }

    if matches!(suite, Suite::Lax | Suite::All) {
        let fixture = if q == quiverdyn::fixtures::somos4_quiver() {
            Some(LaxFixture::Somos4)
        } else if q == quiverdyn::fixtures::somos5_quiver() {
            Some(LaxFixture::Somos5)
        } else {
            None
        };
        match fixture {
            Some(f) => {
                let report = lax_check(f, trials, seed);
                checks.push(CheckResult {
                    check: "lax_equation".into(),
                    verdict: report.lax_ok,
                    witness: None,
                });
                checks.push(CheckResult {
                    check: "lax_invariant_constant".into(),
                    verdict: report.invariant_constant,
                    witness: None,
                });
            }
            None if explicit => bail!("lax suite covers the somos4 and somos5 fixtures only"),
            None => {}
        }
    }

    #[derive(Serialize)]
    struct Report {
        input_sha256: String,
        seed: u64,
        trials: usize,
        all_passed: bool,
        checks: Vec<CheckResult>,
    }
    let all_passed = checks.iter().all(|c| c.verdict);
    let report = Report {
        input_sha256: sha,
        seed,
        trials,
        all_passed,
        checks,
    };
    print_text(&serde_json::to_string_pretty(&report)?)?;
    Ok(all_passed)
}

fn cmd_build(what: BuildCmd) -> Result<bool> {
    match what {
        BuildCmd::Period1 { m, output } => {
            let t = PalindromicTuple::new(m).map_err(|e| anyhow!("bad tuple: {e}"))?;
            write_out(&output, &quiver_json(&build_period1(&t)))?;
            Ok(true)
        }
        BuildCmd::Period2 { n, params, output } => {
            let (b1, b2) =
                build_period2(n, &params).map_err(|e| anyhow!("bad parameters: {e}"))?;
            emit_pair(&output, &b1, &b2)
        }
        BuildCmd::Exceptional { m1, output } => {
            if m1 < 1 {
                bail!("m1 must be positive");
            }
            let (b1, b2) = exceptional_period2(m1);
            emit_pair(&output, &b1, &b2)
        }
        BuildCmd::Named { name, output } => {
            let q = named_quiver(&name).ok_or_else(|| anyhow!("unknown fixture: {name}"))?;
            write_out(&output, &quiver_json(&q))?;
            Ok(true)
        }
    }
}

fn emit_pair(output: &Option<PathBuf>, b1: &QuiverMatrix, b2: &QuiverMatrix) -> Result<bool> {
    #[derive(Serialize)]
    struct Pair<'a> {
        b1: &'a QuiverMatrix,
        b2: &'a QuiverMatrix,
    }
    let text = serde_json::to_string_pretty(&Pair { b1, b2 })?;
    write_out(output, &text)?;
    Ok(true)
}
