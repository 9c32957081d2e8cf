//! Command-line front end: diagrams, path construction, tangle-complex
//! validation, knot/tangle classification, and the surgery filter, with
//! stable exit codes and deterministic JSON/DOT/text output.

use clap::{Parser, Subcommand, ValueEnum};
use laminar_core::classify::{
    boundary_edge_path, classify_genuine, classify_persistent, classify_tangle, component_count,
    sfs_surgery_filter, ClassifyError,
};
use laminar_core::complex::{is_prelaminar, ComplexError, TangleComplex};
use laminar_core::farey::{self, build_diagram};
use laminar_core::paths::{
    build_channel_path, build_double_half_path, build_half_path, corners_of, enumerate_paths,
    half_path_agreement, map_targets, reduced_fractions, ChannelType, Constraints, Context,
    GammaPath, PathKind,
};
use laminar_core::rational::{normalize_montesinos, MontesinosKnot, Slope};
use serde_json::{json, Value};
use std::process::ExitCode;
use std::str::FromStr;

const EXIT_OK: u8 = 0;
const EXIT_NOT_PRELAMINAR: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_DEGENERATE: u8 = 3;
const EXIT_LINK: u8 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Persistent,
    Genuine,
    Surgery,
}

#[derive(Parser)]
#[command(
    name = "laminar",
    about = "Combinatorial branched-surface engine for Montesinos knots and tangles",
    version
)]
struct Cli {
    /// Output format (dot is only available for `diagram`).
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Worker threads for batch sweeps (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the diagram of a target slope: vertices, edges, triangles,
    /// boundary chains, and fork vertices.
    Diagram {
        #[arg(allow_hyphen_values = true)]
        target: String,
    },
    /// Build and report the standard paths toward a target slope.
    Path {
        #[arg(allow_hyphen_values = true)]
        target: String,
        /// Build only this single-half-channel variant (1-4).
        #[arg(long)]
        variant: Option<u8>,
        /// Build only the full-channel path of this type.
        #[arg(long)]
        channel: Option<String>,
        /// Exhaustively enumerate matching paths instead of building.
        #[arg(long)]
        enumerate: bool,
        /// Run the builder-vs-enumeration agreement sweep over all targets
        /// with denominator up to this bound.
        #[arg(long)]
        sweep: Option<i64>,
    },
    /// Validate a tangle complex file: circle and interior point types,
    /// branch classes, meridional cusps, and the pre-laminarity verdict.
    Check { file: String },
    /// Classify a Montesinos knot given its tangle slopes and an optional
    /// trailing integer band twist count.
    ClassifyKnot {
        /// Tangle slopes "p/q", then optionally an integer band twist count
        /// and `--mode persistent|genuine|surgery` (default persistent).
        #[arg(allow_hyphen_values = true, trailing_var_arg = true, num_args = 1..)]
        args: Vec<String>,
    },
    /// Classify the two-slope tangle T(r1, -r2).
    ClassifyTangle {
        #[arg(allow_hyphen_values = true)]
        r1: String,
        #[arg(allow_hyphen_values = true)]
        r2: String,
    },
    /// Shorthand for classify-knot --mode surgery.
    Surgery {
        #[arg(allow_hyphen_values = true, trailing_var_arg = true, num_args = 1..)]
        args: Vec<String>,
    },
}

fn max_q() -> i64 {
    std::env::var("LAMINAR_MAX_Q")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(64)
}

fn parse_slope(s: &str) -> Result<Slope, String> {
    Slope::from_str(s).map_err(|e| e.to_string())
}

/// Split classify arguments into slopes plus an optional trailing integer
/// band twist count.
fn parse_knot_args(args: &[String]) -> Result<MontesinosKnot, String> {
    if args.is_empty() {
        return Err("no tangle slopes given".into());
    }
    let (slope_args, n) = match args.last().unwrap() {
        last if !last.contains('/') => {
            let n: i64 = last.parse().map_err(|_| format!("bad twist count {last}"))?;
            (&args[..args.len() - 1], n)
        }
        _ => (args, 0),
    };
    let slopes: Vec<Slope> = slope_args
        .iter()
        .map(|a| parse_slope(a))
        .collect::<Result<_, _>>()?;
    normalize_montesinos(&slopes, n).map_err(|e| e.to_string())
}

/// Pull `--mode`, `--format`, and `--jobs` back out of a trailing argument
/// list. The classify subcommands must accept hyphen-leading slopes such as
/// `-1/4` in any position, which forces the argument list to be collected
/// verbatim; option flags are then recognized here instead.
fn extract_flags(
    raw: &[String],
    mode: &mut Mode,
    format: &mut Format,
    jobs: &mut Option<usize>,
) -> Result<Vec<String>, String> {
    let mut rest = Vec::new();
    let mut it = raw.iter();
    while let Some(a) = it.next() {
        let (flag, inline) = match a.split_once('=') {
            Some((f, v)) if f.starts_with("--") => (f, Some(v.to_string())),
            _ => (a.as_str(), None),
        };
        let mut value = |name: &str| -> Result<String, String> {
            inline
                .clone()
                .or_else(|| it.next().cloned())
                .ok_or_else(|| format!("{name} requires a value"))
        };
        match flag {
            "--mode" => {
                let v = value("--mode")?;
                *mode = Mode::from_str(&v, true).map_err(|_| format!("bad mode {v}"))?;
            }
            "--format" => {
                let v = value("--format")?;
                *format = Format::from_str(&v, true).map_err(|_| format!("bad format {v}"))?;
            }
            "--jobs" => {
                let v = value("--jobs")?;
                *jobs = Some(v.parse().map_err(|_| format!("bad job count {v}"))?);
            }
            _ if flag.starts_with("--") => return Err(format!("unknown flag {flag}")),
            _ => rest.push(a.clone()),
        }
    }
    Ok(rest)
}

fn fail(code: u8, msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

/// Write a line to stdout, swallowing broken-pipe errors so that piping
/// into `head` does not abort the process.
fn out_line(s: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout(), "{s}");
}

fn emit(v: &Value, format: Format) {
    match format {
        Format::Json | Format::Dot => out_line(&serde_json::to_string_pretty(v).unwrap()),
        Format::Text => {
            let mut buf = String::new();
            render_text(v, 0, &mut buf);
            out_line(buf.trim_end_matches('\n'));
        }
    }
}

/// Plain indented rendering of a JSON value for --format text.
fn render_text(v: &Value, indent: usize, buf: &mut String) {
    use std::fmt::Write;
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(m) => {
            for (k, val) in m {
                match val {
                    Value::Object(_) | Value::Array(_) => {
                        let _ = writeln!(buf, "{pad}{k}:");
                        render_text(val, indent + 1, buf);
                    }
                    _ => {
                        let _ = writeln!(buf, "{pad}{k}: {val}");
                    }
                }
            }
        }
        Value::Array(a) => {
            for val in a {
                match val {
                    Value::Object(_) | Value::Array(_) => render_text(val, indent, buf),
                    _ => {
                        let _ = writeln!(buf, "{pad}- {val}");
                    }
                }
            }
        }
        _ => {
            let _ = writeln!(buf, "{pad}{v}");
        }
    }
}

fn path_json(g: &GammaPath) -> Result<Value, String> {
    let d = build_diagram(g.target).map_err(|e| e.to_string())?;
    let corners = corners_of(g, &d).map_err(|e| e.to_string())?;
    Ok(g.to_json(&corners))
}

fn run_diagram(target: &str, format: Format) -> Result<ExitCode, ExitCode> {
    let t = parse_slope(target).map_err(|e| fail(EXIT_PARSE, &e))?;
    let d = build_diagram(t).map_err(|e| fail(EXIT_DEGENERATE, &e.to_string()))?;
    match format {
        Format::Dot => out_line(&farey::to_dot(&d)),
        _ => emit(&farey::to_json(&d), format),
    }
    Ok(ExitCode::from(EXIT_OK))
}

fn run_path(
    target: &str,
    variant: Option<u8>,
    channel: Option<String>,
    enumerate: bool,
    sweep: Option<i64>,
    format: Format,
) -> Result<ExitCode, ExitCode> {
    if let Some(qmax) = sweep {
        let targets = reduced_fractions(qmax.min(max_q()));
        let reports = map_targets(&targets, half_path_agreement);
        let bad: Vec<Value> = targets
            .iter()
            .zip(&reports)
            .filter(|(_, r)| !r.is_empty())
            .map(|(t, r)| json!({ "target": t, "disagreements": r }))
            .collect();
        emit(
            &json!({ "targets": targets.len(), "disagreements": bad }),
            format,
        );
        return Ok(ExitCode::from(if bad.is_empty() { EXIT_OK } else { EXIT_NOT_PRELAMINAR }));
    }
    let t = parse_slope(target).map_err(|e| fail(EXIT_PARSE, &e))?;
    let d = build_diagram(t).map_err(|e| fail(EXIT_DEGENERATE, &e.to_string()))?;
    let as_json = |g: &GammaPath| path_json(g).map_err(|e| fail(EXIT_DEGENERATE, &e));
    let mut out = serde_json::Map::new();
    if enumerate {
        let mut cs = Constraints::new(PathKind::SemiAllowable, Context::Knot);
        cs.max_q = max_q();
        let semi = enumerate_paths(&d, &cs).map_err(|e| fail(EXIT_DEGENERATE, &e.to_string()))?;
        let mut ca = Constraints::new(PathKind::Allowable, Context::Tangle);
        ca.max_q = max_q();
        let full = enumerate_paths(&d, &ca).map_err(|e| fail(EXIT_DEGENERATE, &e.to_string()))?;
        let mut listed = vec![];
        for g in semi.iter().chain(&full) {
            listed.push(as_json(g)?);
        }
        out.insert("enumerated".into(), Value::Array(listed));
    } else if let Some(v) = variant {
        if !(1..=4).contains(&v) {
            return Err(fail(EXIT_PARSE, "variant must be 1-4"));
        }
        let entry = match build_half_path(t, v) {
            Some(g) => as_json(&g)?,
            None => Value::Null,
        };
        out.insert(format!("variant{v}"), entry);
    } else if let Some(c) = &channel {
        let ct = match c.to_ascii_uppercase().as_str() {
            "A" => ChannelType::A,
            "B" => ChannelType::B,
            _ => return Err(fail(EXIT_PARSE, "channel must be A or B")),
        };
        let entry = match build_channel_path(t, ct) {
            Some(g) => as_json(&g)?,
            None => Value::Null,
        };
        out.insert(format!("channel{c}"), entry);
    } else {
        for v in 1..=4u8 {
            let entry = match build_half_path(t, v) {
                Some(g) => as_json(&g)?,
                None => Value::Null,
            };
            out.insert(format!("variant{v}"), entry);
        }
        for (name, ct) in [("channelA", ChannelType::A), ("channelB", ChannelType::B)] {
            let entry = match build_channel_path(t, ct) {
                Some(g) => as_json(&g)?,
                None => Value::Null,
            };
            out.insert(name.into(), entry);
        }
        let dh = match build_double_half_path(t) {
            Ok(g) => as_json(&g)?,
            Err(_) => Value::Null,
        };
        out.insert("doubleHalf".into(), dh);
        let bd = boundary_edge_path(t, true, Context::Knot)
            .ok()
            .map(|g| as_json(&g))
            .transpose()?
            .unwrap_or(Value::Null);
        out.insert("upperBoundary".into(), bd);
    }
    emit(&Value::Object(out), format);
    Ok(ExitCode::from(EXIT_OK))
}

fn run_check(file: &str, format: Format) -> Result<ExitCode, ExitCode> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| fail(EXIT_PARSE, &format!("cannot read {file}: {e}")))?;
    let tc: TangleComplex = serde_json::from_str(&text)
        .map_err(|e| fail(EXIT_PARSE, &format!("schema violation in {file}: {e}")))?;
    match is_prelaminar(&tc) {
        Ok(report) => {
            emit(&serde_json::to_value(&report).unwrap(), format);
            Ok(ExitCode::from(if report.ok {
                EXIT_OK
            } else {
                EXIT_NOT_PRELAMINAR
            }))
        }
        Err(ComplexError::Schema(at, why)) => {
            Err(fail(EXIT_PARSE, &format!("schema violation at {at}: {why}")))
        }
        Err(e) => {
            emit(
                &json!({ "ok": false, "error": e.to_string() }),
                format,
            );
            Ok(ExitCode::from(EXIT_NOT_PRELAMINAR))
        }
    }
}

fn classify_exit(e: &ClassifyError) -> u8 {
    match e {
        ClassifyError::Link(_) => EXIT_LINK,
        ClassifyError::Rational(_) => EXIT_PARSE,
        _ => EXIT_DEGENERATE,
    }
}

fn run_classify_knot(args: &[String], mode: Mode, format: Format) -> Result<ExitCode, ExitCode> {
    let k = parse_knot_args(args).map_err(|e| fail(EXIT_PARSE, &e))?;
    let result = match mode {
        Mode::Persistent => classify_persistent(&k).map(|v| v.to_json()),
        Mode::Genuine => classify_genuine(&k).map(|v| v.to_json()),
        Mode::Surgery => sfs_surgery_filter(&k).map(|v| v.to_json()),
    };
    match result {
        Ok(v) => {
            let wrapped = json!({
                "knot": {
                    "tangles": k.tangles,
                    "band_half_twists": k.n,
                    "mirrored": k.mirrored,
                    "pretzel": k.pretzel,
                    "components": component_count(&k),
                },
                "verdict": v,
            });
            emit(&wrapped, format);
            Ok(ExitCode::from(EXIT_OK))
        }
        Err(e) => Err(fail(classify_exit(&e), &e.to_string())),
    }
}

fn run_classify_tangle(r1: &str, r2: &str, format: Format) -> Result<ExitCode, ExitCode> {
    let a = parse_slope(r1).map_err(|e| fail(EXIT_PARSE, &e))?;
    let b = parse_slope(r2).map_err(|e| fail(EXIT_PARSE, &e))?;
    match classify_tangle(a, b) {
        Ok(v) => {
            emit(&v.to_json(), format);
            Ok(ExitCode::from(EXIT_OK))
        }
        Err(e) => Err(fail(classify_exit(&e), &e.to_string())),
    }
}

fn run() -> ExitCode {
    let cli = Cli::parse();
    let mut format = cli.format;
    let mut jobs = cli.jobs;
    let mut mode = Mode::Persistent;
    // The classify subcommands carry their flags inside the trailing
    // argument list; resolve those before anything else.
    let trailing = match &cli.command {
        Command::ClassifyKnot { args } | Command::Surgery { args } => {
            match extract_flags(args, &mut mode, &mut format, &mut jobs) {
                Ok(rest) => Some(rest),
                Err(e) => return fail(EXIT_PARSE, &e),
            }
        }
        _ => None,
    };
    if let Some(jobs) = jobs {
        // The worker pool is initialized lazily on first use, so setting
        // the thread-count variable here is sufficient.
        std::env::set_var("RAYON_NUM_THREADS", jobs.to_string());
    }
    if format == Format::Dot && !matches!(cli.command, Command::Diagram { .. }) {
        return fail(EXIT_PARSE, "--format dot is only available for `diagram`");
    }
    let result = match &cli.command {
        Command::Diagram { target } => run_diagram(target, format),
        Command::Path {
            target,
            variant,
            channel,
            enumerate,
            sweep,
        } => run_path(target, *variant, channel.clone(), *enumerate, *sweep, format),
        Command::Check { file } => run_check(file, format),
        Command::ClassifyKnot { .. } => run_classify_knot(&trailing.unwrap(), mode, format),
        Command::ClassifyTangle { r1, r2 } => run_classify_tangle(r1, r2, format),
        Command::Surgery { .. } => run_classify_knot(&trailing.unwrap(), Mode::Surgery, format),
    };
    result.unwrap_or_else(|code| code)
}

fn main() -> ExitCode {
    run()
}
