//! `pgh`: validation, projections, quotients, dendrograms, distances,
//! bounds, interleavings, generators and the property self-test, with
//! stable machine-readable output.
//!
//! Exit codes: 0 on success, 1 on domain/IO/budget errors, 2 on usage
//! errors. Error messages carry a `USAGE:`, `IO:`, `DOMAIN:` or `BUDGET:`
//! prefix on stderr. The `PGH_BUDGET` environment variable caps the
//! enumeration searches (tuple and map-pair counts).

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::OnceLock;

use clap::{Parser, Subcommand, ValueEnum};
use regex::Regex;
use serde_json::{json, Value};

use pgh_core::dendrogram::{closed_quotient, from_dendrogram, to_dendrogram};
use pgh_core::generate::{generate, ClassKind, GenConfig};
use pgh_core::gh::{
    dghp_bounds, dghp_exact, hausdorff_ultra, ugh_structural_with, Method, ScanStrategy, Witness,
};
use pgh_core::interleave::interleaving_distance;
use pgh_core::io::{
    dendrogram_from_json, dendrogram_to_json, fmt_sig, round_sig12, space_from_csv,
    space_from_json, space_to_csv, space_to_json,
};
use pgh_core::project::{project, snowflake};
use pgh_core::selftest::{run as run_selftest, SelftestConfig};
use pgh_core::{Budget, Error as CoreError, FiniteMetricSpace, PExponent};

#[derive(Parser)]
#[command(
    name = "pgh",
    version,
    about = "Gromov-Hausdorff distances on finite p-metric and ultrametric spaces"
)]
struct Cli {
    /// Output format for results on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Scan {
    Binary,
    Linear,
}

#[derive(Subcommand)]
enum Command {
    /// Check the p-triangle inequality; report the class or the violation.
    Validate {
        file: PathBuf,
        #[arg(long, default_value = "1")]
        p: String,
    },
    /// Apply the canonical projection onto p-metric spaces.
    Project {
        file: PathBuf,
        #[arg(long)]
        p: String,
    },
    /// Raise every distance to a power.
    Snowflake {
        file: PathBuf,
        #[arg(long)]
        power: f64,
    },
    /// t-closed quotient of an ultrametric space.
    Quotient {
        file: PathBuf,
        #[arg(long)]
        t: f64,
    },
    /// Convert an ultrametric space to its dendrogram (or back with --invert).
    Dendrogram {
        file: PathBuf,
        /// Read a dendrogram document and emit the ultrametric space.
        #[arg(long)]
        invert: bool,
    },
    /// u_GH between ultrametric spaces by the quotient-signature scan.
    Ugh {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        witness: bool,
        #[arg(long, value_enum, default_value_t = Scan::Binary)]
        scan: Scan,
    },
    /// Exact d_GH^(p) by enumeration (or interval bounds with --bounds).
    Dghp {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        p: String,
        #[arg(long)]
        witness: bool,
        /// Report diameter/spectrum/Hölder bounds instead of enumerating.
        #[arg(long)]
        bounds: bool,
    },
    /// p-interleaving distance between ultrametric spaces.
    Interleave {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        p: String,
        #[arg(long)]
        witness: bool,
    },
    /// Hausdorff distance between two label subsets of one space.
    Hausdorff {
        file: PathBuf,
        /// Comma-separated labels of the first subset.
        #[arg(long)]
        a: String,
        /// Comma-separated labels of the second subset.
        #[arg(long)]
        b: String,
    },
    /// Distance spectrum, optionally truncated below a threshold.
    Spectrum {
        file: PathBuf,
        #[arg(long)]
        eps: Option<f64>,
    },
    /// The curvature set K_n: all n-point distance matrices.
    Curvature {
        file: PathBuf,
        #[arg(long)]
        n: usize,
    },
    /// Emit a seeded random space (config file or flags).
    Generate {
        /// JSON file holding a generator config.
        #[arg(long, conflicts_with_all = ["seed", "n", "class", "lo", "hi"])]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        n: Option<usize>,
        /// metric | ultrametric | p:<exponent>
        #[arg(long)]
        class: Option<String>,
        #[arg(long, default_value_t = 1.0)]
        lo: f64,
        #[arg(long, default_value_t = 4.0)]
        hi: f64,
    },
    /// Run the seeded property suites of every module.
    Selftest {
        #[arg(long, default_value_t = 0x5EED)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        cases: usize,
    },
}

enum Failure {
    Usage(String),
    Core(CoreError),
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        Failure::Core(e)
    }
}

type CmdResult = Result<(Value, String), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(
                err.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            ) {
                print!("{err}");
                return ExitCode::SUCCESS;
            }
            eprintln!("USAGE: {err}");
            return ExitCode::from(2);
        }
    };
    let budget = match budget_from_env() {
        Ok(b) => b,
        Err(msg) => {
            eprintln!("USAGE: {msg}");
            return ExitCode::from(2);
        }
    };
    let format = cli.format;
    match dispatch(cli.command, &budget, format) {
        Ok((json_out, text_out)) => {
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&json_out).unwrap()),
                Format::Text => println!("{text_out}"),
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("USAGE: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Core(err)) => {
            let prefix = match err {
                CoreError::Io(_) => "IO",
                CoreError::Budget { .. } => "BUDGET",
                _ => "DOMAIN",
            };
            eprintln!("{prefix}: {err}");
            ExitCode::from(1)
        }
    }
}

fn budget_from_env() -> Result<Budget, String> {
    match std::env::var("PGH_BUDGET") {
        Err(_) => Ok(Budget::default()),
        Ok(raw) => raw
            .parse::<u128>()
            .map(Budget::from_limit)
            .map_err(|_| format!("PGH_BUDGET must be a non-negative integer, got {raw:?}")),
    }
}

/// Grammar for --p flags: a decimal >= 1 or the literal `inf`.
fn parse_p(raw: &str) -> Result<PExponent, Failure> {
    static P_GRAMMAR: OnceLock<Regex> = OnceLock::new();
    let re = P_GRAMMAR.get_or_init(|| Regex::new(r"^([1-9][0-9]*(\.[0-9]+)?|1\.0+|inf)$").unwrap());
    if !re.is_match(raw) {
        return Err(Failure::Usage(format!(
            "--p must be a decimal >= 1 or \"inf\", got {raw:?}"
        )));
    }
    let p: PExponent = raw
        .parse()
        .map_err(|e: CoreError| Failure::Usage(e.to_string()))?;
    if !p.is_infinity() && p.get() < 1.0 {
        return Err(Failure::Usage(format!("--p must be >= 1, got {raw:?}")));
    }
    Ok(p)
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Core(CoreError::Io(format!("{}: {e}", path.display()))))
}

/// Loads a space from JSON, falling back to CSV for non-JSON payloads.
fn load_space(path: &Path) -> Result<FiniteMetricSpace, Failure> {
    let text = read_file(path)?;
    if text.trim_start().starts_with('{') {
        Ok(space_from_json(&text)?)
    } else {
        Ok(space_from_csv(&text)?)
    }
}

fn space_output(space: &FiniteMetricSpace) -> CmdResult {
    let json: Value = serde_json::from_str(&space_to_json(space)).expect("valid space json");
    let text = space_to_csv(space)?.trim_end().to_string();
    Ok((json, text))
}

fn value_output(value: f64, extra: Value) -> (Value, String) {
    let mut json = json!({ "value": round_sig12(value) });
    if let Value::Object(map) = extra {
        json.as_object_mut().unwrap().extend(map);
    }
    (json, fmt_sig(value, 12))
}

fn labels_of(space: &FiniteMetricSpace, spec: &str, name: &str) -> Result<Vec<usize>, Failure> {
    spec.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|label| {
            space
                .labels()
                .iter()
                .position(|l| l == label)
                .ok_or_else(|| {
                    Failure::Core(CoreError::invalid(format!(
                        "unknown label {label:?} in subset {name}"
                    )))
                })
        })
        .collect()
}

fn emit(format: Format, json: &Value, text: &str) {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(json).unwrap()),
        Format::Text => println!("{text}"),
    }
}

fn dispatch(cmd: Command, budget: &Budget, format: Format) -> CmdResult {
    match cmd {
        Command::Validate { file, p } => {
            let space = load_space(&file)?;
            let p = parse_p(&p)?;
            match space.validate(p) {
                Ok(class) => Ok((
                    json!({
                        "valid": true,
                        "p": p,
                        "verified_p": class.verified_p,
                        "ultrametric": class.is_ultrametric(),
                    }),
                    format!("valid {p}-metric (verified up to p = {})", class.verified_p),
                )),
                Err(CoreError::Triangle { p, v }) => {
                    // The violation report is the command's output; the
                    // domain failure still drives the exit code.
                    let labels = space.labels();
                    let json = json!({
                        "valid": false,
                        "p": p,
                        "violation": {
                            "triple": [labels[v.i], labels[v.k], labels[v.j]],
                            "lhs": round_sig12(v.lhs),
                            "bound": round_sig12(v.bound),
                            "slack": round_sig12(v.slack),
                        },
                    });
                    let text = format!(
                        "invalid: d({}, {}) = {} exceeds the {p}-bound through {} = {} (slack {})",
                        labels[v.i],
                        labels[v.j],
                        fmt_sig(v.lhs, 12),
                        labels[v.k],
                        fmt_sig(v.bound, 12),
                        fmt_sig(v.slack, 12),
                    );
                    emit(format, &json, &text);
                    Err(CoreError::Triangle { p, v }.into())
                }
                Err(err) => Err(err.into()),
            }
        }
        Command::Project { file, p } => {
            let space = load_space(&file)?;
            let p = parse_p(&p)?;
            let result = project(&space, p)?;
            if !result.is_collapse_trivial() {
                eprintln!(
                    "note: projection collapsed {} points into {} classes",
                    space.len(),
                    result.space.len()
                );
            }
            space_output(&result.space)
        }
        Command::Snowflake { file, power } => {
            let space = load_space(&file)?;
            space_output(&snowflake(&space, power)?)
        }
        Command::Quotient { file, t } => {
            let space = load_space(&file)?;
            space_output(&closed_quotient(&space, t)?)
        }
        Command::Dendrogram { file, invert } => {
            if invert {
                let d = dendrogram_from_json(&read_file(&file)?)?;
                space_output(&from_dendrogram(&d))
            } else {
                let space = load_space(&file)?;
                let d = to_dendrogram(&space)?;
                let text = dendrogram_to_json(&d);
                let json: Value = serde_json::from_str(&text).expect("valid dendrogram json");
                Ok((json, text))
            }
        }
        Command::Ugh {
            a,
            b,
            witness,
            scan,
        } => {
            let x = load_space(&a)?;
            let y = load_space(&b)?;
            let strategy = match scan {
                Scan::Binary => ScanStrategy::Binary,
                Scan::Linear => ScanStrategy::Linear,
            };
            let report = ugh_structural_with(&x, &y, strategy)?;
            let value = report.value().expect("structural result is exact");
            let extra = if witness {
                match report.witness {
                    Some(Witness::QuotientLevel(t)) => {
                        json!({ "witness": { "quotient_level": round_sig12(t) } })
                    }
                    _ => json!({}),
                }
            } else {
                json!({})
            };
            Ok(value_output(value, extra))
        }
        Command::Dghp {
            a,
            b,
            p,
            witness,
            bounds,
        } => {
            let x = load_space(&a)?;
            let y = load_space(&b)?;
            let p = parse_p(&p)?;
            if bounds {
                let rep = dghp_bounds(&x, &y, p, budget);
                let json = json!({
                    "lower": round_sig12(rep.lower),
                    "upper": round_sig12(rep.upper),
                    "method": "bounds_only",
                });
                let text = format!("[{}, {}]", fmt_sig(rep.lower, 12), fmt_sig(rep.upper, 12));
                return Ok((json, text));
            }
            let rep = dghp_exact(&x, &y, p, budget)?;
            let value = rep.value().expect("enumeration result is exact");
            let mut extra = json!({ "method": method_name(rep.method) });
            if witness {
                if let Some(Witness::Correspondence(corr)) = rep.witness {
                    let pairs: Vec<Value> = corr
                        .pairs()
                        .iter()
                        .map(|&(i, j)| json!([x.labels()[i], y.labels()[j]]))
                        .collect();
                    extra
                        .as_object_mut()
                        .unwrap()
                        .insert("witness".into(), json!({ "correspondence": pairs }));
                }
            }
            Ok(value_output(value, extra))
        }
        Command::Interleave { a, b, p, witness } => {
            let x = load_space(&a)?;
            let y = load_space(&b)?;
            let p = parse_p(&p)?;
            let rep = interleaving_distance(&x, &y, p, budget)?;
            let extra = if witness {
                let phi: Vec<&String> = rep.witness_phi.iter().map(|&j| &y.labels()[j]).collect();
                let psi: Vec<&String> = rep.witness_psi.iter().map(|&i| &x.labels()[i]).collect();
                json!({ "witness": { "phi": phi, "psi": psi } })
            } else {
                json!({})
            };
            Ok(value_output(rep.value, extra))
        }
        Command::Hausdorff { file, a, b } => {
            let space = load_space(&file)?;
            let ia = labels_of(&space, &a, "A")?;
            let ib = labels_of(&space, &b, "B")?;
            let value = hausdorff_ultra(&space, &ia, &ib)?;
            Ok(value_output(value, json!({})))
        }
        Command::Spectrum { file, eps } => {
            let space = load_space(&file)?;
            let spec = match eps {
                Some(e) => space.spectrum_eps(e),
                None => space.spectrum(),
            };
            let values: Vec<f64> = spec.values().iter().map(|&v| round_sig12(v)).collect();
            let text = values
                .iter()
                .map(|&v| fmt_sig(v, 12))
                .collect::<Vec<_>>()
                .join(" ");
            Ok((json!({ "spectrum": values }), text))
        }
        Command::Curvature { file, n } => {
            let space = load_space(&file)?;
            let set = space.curvature_set(n, budget)?;
            let matrices: Vec<Vec<Vec<f64>>> = set
                .iter()
                .map(|mat| {
                    mat.chunks(n)
                        .map(|row| row.iter().map(|&v| round_sig12(v)).collect())
                        .collect()
                })
                .collect();
            let mut text = format!("{} matrices of order {n}", matrices.len());
            for mat in &matrices {
                text.push('\n');
                let rows: Vec<String> = mat
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|&v| fmt_sig(v, 12))
                            .collect::<Vec<_>>()
                            .join(" ")
                    })
                    .collect();
                text.push_str(&rows.join(" | "));
            }
            Ok((
                json!({ "order": n, "count": matrices.len(), "matrices": matrices }),
                text,
            ))
        }
        Command::Generate {
            config,
            seed,
            n,
            class,
            lo,
            hi,
        } => {
            let cfg = match config {
                Some(path) => serde_json::from_str(&read_file(&path)?)
                    .map_err(|e| Failure::Core(CoreError::Io(format!("generator config: {e}"))))?,
                None => {
                    let n = n.ok_or_else(|| Failure::Usage("generate needs --n".into()))?;
                    let class = parse_class(
                        &class.ok_or_else(|| Failure::Usage("generate needs --class".into()))?,
                    )?;
                    GenConfig {
                        seed,
                        n_points: n,
                        value_range: (lo, hi),
                        class,
                    }
                }
            };
            space_output(&generate(&cfg)?)
        }
        Command::Selftest { seed, cases } => {
            let report = run_selftest(&SelftestConfig { seed, cases });
            let mut lines = Vec::new();
            let mut failures = 0usize;
            for o in &report.outcomes {
                match &o.failure {
                    None => lines.push(format!("ok   {} ({} cases)", o.name, o.cases_run)),
                    Some(msg) => {
                        failures += 1;
                        lines.push(format!("FAIL {}: {msg}", o.name));
                    }
                }
            }
            lines.push(format!(
                "{} properties, {} failed (seed {seed}, {cases} cases each)",
                report.outcomes.len(),
                failures
            ));
            let json = json!({
                "passed": report.passed(),
                "seed": seed,
                "cases": cases,
                "properties": report.outcomes.iter().map(|o| json!({
                    "name": o.name,
                    "cases": o.cases_run,
                    "failure": o.failure,
                })).collect::<Vec<_>>(),
            });
            if failures > 0 {
                // Report on stdout, fail through the domain path.
                emit(format, &json, &lines.join("\n"));
                return Err(Failure::Core(CoreError::invalid(format!(
                    "selftest: {failures} properties failed"
                ))));
            }
            Ok((json, lines.join("\n")))
        }
    }
}

fn method_name(method: Method) -> &'static str {
    match method {
        Method::ExactEnumeration => "exact_enumeration",
        Method::Structural => "structural",
        Method::BoundsOnly => "bounds_only",
    }
}

fn parse_class(raw: &str) -> Result<ClassKind, Failure> {
    match raw {
        "metric" => Ok(ClassKind::Metric),
        "ultrametric" => Ok(ClassKind::Ultrametric),
        other => match other.strip_prefix("p:") {
            Some(p) => Ok(ClassKind::PMetric(parse_p(p)?)),
            None => Err(Failure::Usage(format!(
                "--class must be metric, ultrametric or p:<exponent>, got {raw:?}"
            ))),
        },
    }
}
