//! Batch command-line front end: parse JSON problem specs, run region and
//! codec workflows, and emit tables, CSV or JSON.
//!
//! Every command is a pure function of its inputs and seed; reports embed the
//! seed so runs can be replayed byte for byte.

use crate::channel::ProblemSpec;
use crate::codec::{self, CodeInstance, HashMode};
use crate::polytope::{self, PolytopeError};
use crate::regions::{
    build_cmg, build_crng, build_hk, build_jxg, CrngVariant, InequalitySystem, JxgForm, RatePoint,
    RateVar, RegionError,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Exit codes: stable contract for scripting.
pub mod exit_code {
    pub const OK: i32 = 0;
    pub const PARSE: i32 = 2;
    pub const VALIDATION: i32 = 3;
    pub const CAP: i32 = 4;
    pub const INFEASIBLE: i32 = 5;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("cap exceeded: {0}")]
    Cap(String),
    #[error("infeasible input: {0}")]
    Infeasible(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Parse(_) => exit_code::PARSE,
            CliError::Validation(_) => exit_code::VALIDATION,
            CliError::Cap(_) => exit_code::CAP,
            CliError::Infeasible(_) => exit_code::INFEASIBLE,
        }
    }
}

impl From<RegionError> for CliError {
    fn from(e: RegionError) -> Self {
        match e {
            RegionError::Prob(crate::prob::ProbError::StateSpaceTooLarge { .. }) => {
                CliError::Cap(e.to_string())
            }
            RegionError::InfeasibleSubstitution { .. }
            | RegionError::QTooSmall { .. }
            | RegionError::PointOutsideRegion(_) => CliError::Infeasible(e.to_string()),
            RegionError::InvalidPoint(_) | RegionError::UnknownVariable(_) => {
                CliError::Parse(e.to_string())
            }
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<PolytopeError> for CliError {
    fn from(e: PolytopeError) -> Self {
        match e {
            PolytopeError::BlowupCapExceeded { .. } => CliError::Cap(e.to_string()),
            PolytopeError::Infeasible => CliError::Infeasible(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<codec::CodecError> for CliError {
    fn from(e: codec::CodecError) -> Self {
        match e {
            codec::CodecError::SupportTooLarge { .. } => CliError::Cap(e.to_string()),
            codec::CodecError::Invalid(_) => CliError::Validation(e.to_string()),
            other => CliError::Infeasible(other.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "icr",
    about = "Rate regions and CRNG codes for two-user interference channels",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build, query and compare region inequality systems.
    Region {
        #[command(subcommand)]
        cmd: RegionCmd,
    },
    /// Simulate code instances and inspect hash ensembles.
    Codec {
        #[command(subcommand)]
        cmd: CodecCmd,
    },
    /// Sample a 2-D region boundary over a grid of directions.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Hk,
    Cmg,
    JxgRaw,
    JxgReduced,
    CrngBase,
    CrngFull,
    CrngTilde,
    CrngEliminated0,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SliceLevel {
    None,
    #[value(name = "0")]
    Zero,
    #[value(name = "00")]
    ZeroZero,
    #[value(name = "000")]
    ZeroZeroZero,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct RegionIo {
    /// Problem spec JSON ({"channel": ..., "input": ...}).
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub variant: Variant,
    /// Zero out common-rate layers before use.
    #[arg(long, value_enum, default_value = "none")]
    pub slice: SliceLevel,
}

#[derive(Subcommand, Debug)]
pub enum RegionCmd {
    /// Construct the inequality system and print it.
    Build {
        #[command(flatten)]
        io: RegionIo,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Decide membership of a rate point; prints violated tags on reject.
    Member {
        #[command(flatten)]
        io: RegionIo,
        /// Comma-separated assignments, e.g. "R0=0,R1=1,R2=1".
        #[arg(long)]
        point: String,
        /// Membership tolerance in bits.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Project out variables by Fourier-Motzkin elimination.
    Project {
        #[command(flatten)]
        io: RegionIo,
        /// Comma-separated variables to eliminate, e.g. "r00,r11,r22".
        #[arg(long)]
        eliminate: String,
        /// Remove LP-redundant rows afterwards.
        #[arg(long)]
        prune: bool,
        /// Intermediate row cap (hard limit 200000).
        #[arg(long, default_value_t = polytope::FM_CAP)]
        fm_cap: usize,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Maximize a direction over the region.
    Support {
        #[command(flatten)]
        io: RegionIo,
        /// Comma-separated direction, e.g. "R1=1,R2=1".
        #[arg(long)]
        direction: String,
    },
    /// Compare two region systems by support gaps and membership tables.
    Compare {
        #[command(flatten)]
        io: RegionIo,
        /// Second variant (same input file unless --input-b is given).
        #[arg(long, value_enum)]
        variant_b: Variant,
        #[arg(long, value_enum, default_value = "none")]
        slice_b: SliceLevel,
        #[arg(long)]
        input_b: Option<PathBuf>,
        #[arg(long, default_value_t = 32)]
        dirs: usize,
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
}

#[derive(Subcommand, Debug)]
pub enum CodecCmd {
    /// Monte Carlo error estimate of a code instance.
    Simulate {
        /// CodeInstance JSON.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Exact error probability by exhaustive enumeration.
    Exact {
        #[arg(long)]
        input: PathBuf,
    },
    /// Empirical (alpha, beta) hash profile of an ensemble.
    HashCheck {
        #[arg(long, value_enum, default_value = "dense")]
        hash_mode: HashModeArg,
        /// Column degree for sparse mode (default ceil(log2 n)).
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        l: usize,
        #[arg(long, default_value_t = 2)]
        q: u8,
        /// Exhaustive census instead of sampling.
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write a two-user toy interference code instance as JSON.
    Gen {
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        q: u8,
        #[arg(long, default_value_t = 4)]
        lf: usize,
        #[arg(long, default_value_t = 2)]
        lg: usize,
        /// Base symbol-flip probability.
        #[arg(long, default_value_t = 0.03)]
        noise: f64,
        /// Extra flip probability when the other user sends a nonzero symbol.
        #[arg(long, default_value_t = 0.02)]
        coupling: f64,
        #[arg(long)]
        sparse: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum HashModeArg {
    Dense,
    Sparse,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub io: RegionIo,
    /// Number of angles over the closed quarter circle.
    #[arg(long, default_value_t = 64)]
    pub angles: usize,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

/// Slice layers per variant; errors on combinations the variant cannot express.
fn slice_vars(variant: Variant, level: SliceLevel) -> Result<Vec<RateVar>, CliError> {
    use RateVar::*;
    let unsupported = || {
        Err(CliError::Validation(format!(
            "variant {variant:?} has no {level:?} slice"
        )))
    };
    Ok(match (variant, level) {
        (_, SliceLevel::None) => vec![],
        (Variant::Hk, SliceLevel::Zero) => vec![R10, R20],
        (Variant::JxgRaw | Variant::CrngBase, SliceLevel::Zero) => vec![R10, R20],
        (Variant::JxgRaw | Variant::CrngBase, SliceLevel::ZeroZero) => vec![R00, R10, R20],
        (Variant::JxgReduced | Variant::CrngTilde | Variant::CrngEliminated0, SliceLevel::Zero) => {
            vec![R0]
        }
        (Variant::CrngFull, SliceLevel::Zero) => vec![R01, R02, R12, R21],
        (Variant::CrngFull, SliceLevel::ZeroZero) => vec![R01, R02, R12, R21, R10, R20],
        (Variant::CrngFull, SliceLevel::ZeroZeroZero) => {
            vec![R01, R02, R12, R21, R10, R20, R00]
        }
        _ => return unsupported(),
    })
}

pub fn build_variant(
    spec: &ProblemSpec,
    variant: Variant,
    level: SliceLevel,
) -> Result<InequalitySystem, CliError> {
    let sys = match variant {
        Variant::Hk => build_hk(&spec.input, &spec.channel)?,
        Variant::Cmg => build_cmg(&spec.input, &spec.channel)?,
        Variant::JxgRaw => build_jxg(&spec.input, &spec.channel, JxgForm::Raw)?,
        Variant::JxgReduced => build_jxg(&spec.input, &spec.channel, JxgForm::Reduced)?,
        Variant::CrngBase => build_crng(&spec.input, &spec.channel, CrngVariant::Base)?,
        Variant::CrngFull => build_crng(&spec.input, &spec.channel, CrngVariant::Full)?,
        Variant::CrngTilde => build_crng(&spec.input, &spec.channel, CrngVariant::Tilde)?,
        Variant::CrngEliminated0 => {
            build_crng(&spec.input, &spec.channel, CrngVariant::Eliminated0)?
        }
    };
    let fixed = slice_vars(variant, level)?;
    Ok(sys.slice(&fixed)?)
}

fn parse_direction(s: &str) -> Result<BTreeMap<RateVar, f64>, CliError> {
    let pt = RatePoint::parse(s).map_err(|e| CliError::Parse(e.to_string()))?;
    Ok(pt.values().clone())
}

fn system_table(sys: &InequalitySystem) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "vars: [{}]  aux: [{}]  inequalities: {}",
        sys.rate_vars
            .iter()
            .map(|v| v.as_str())
            .collect::<Vec<_>>()
            .join(", "),
        sys.aux_vars
            .iter()
            .map(|v| v.as_str())
            .collect::<Vec<_>>()
            .join(", "),
        sys.num_inequalities()
    );
    for iq in &sys.ineqs {
        let lhs = iq
            .coeffs
            .iter()
            .map(|(v, c)| {
                if (*c - 1.0).abs() < 1e-12 {
                    v.as_str().to_string()
                } else {
                    format!("{c}*{v}")
                }
            })
            .collect::<Vec<_>>()
            .join(" + ");
        let sense = match iq.sense {
            crate::regions::Sense::Le => "<=",
            crate::regions::Sense::Ge => ">=",
        };
        let _ = writeln!(out, "  {:<40} {} {:.12}  [{}]", lhs, sense, iq.bound, iq.tag);
    }
    out
}

/// Runs one parsed command, returning the textual report.
pub fn execute(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Region { cmd } => region_cmd(cmd),
        Command::Codec { cmd } => codec_cmd(cmd),
        Command::Sweep(args) => sweep_cmd(args),
    }
}

fn region_cmd(cmd: RegionCmd) -> Result<String, CliError> {
    match cmd {
        RegionCmd::Build { io, format } => {
            let spec: ProblemSpec = read_json(&io.input)?;
            let sys = build_variant(&spec, io.variant, io.slice)?;
            Ok(match format {
                Format::Json => serde_json::to_string_pretty(&sys).expect("serializable") + "\n",
                Format::Csv => {
                    let mut out = String::from("tag,sense,bound\n");
                    for iq in &sys.ineqs {
                        let sense = match iq.sense {
                            crate::regions::Sense::Le => "<=",
                            crate::regions::Sense::Ge => ">=",
                        };
                        let _ = writeln!(out, "{},{},{:.12}", iq.tag, sense, iq.bound);
                    }
                    out
                }
                Format::Table => format!(
                    "{} inequalities\n{}",
                    sys.num_inequalities(),
                    system_table(&sys)
                ),
            })
        }
        RegionCmd::Member { io, point, tol } => {
            let spec: ProblemSpec = read_json(&io.input)?;
            let sys = build_variant(&spec, io.variant, io.slice)?;
            let pt = RatePoint::parse(&point).map_err(|e| CliError::Parse(e.to_string()))?;
            sys.require_assignment(&pt)
                .map_err(|e| CliError::Parse(e.to_string()))?;
            let inside = if sys.has_aux() {
                polytope::lp_feasible(&sys, &pt)?
            } else {
                sys.is_member(&pt, tol)?
            };
            if inside {
                Ok("ACCEPT\n".into())
            } else {
                let mut out = String::from("REJECT\n");
                let violated = sys.violated_tags(&pt, tol);
                if violated.is_empty() {
                    let _ = writeln!(out, "  no feasible auxiliary rates exist for this point");
                } else {
                    for tag in violated {
                        let _ = writeln!(out, "  violates {tag}");
                    }
                }
                Ok(out)
            }
        }
        RegionCmd::Project {
            io,
            eliminate,
            prune,
            fm_cap,
            format,
        } => {
            if fm_cap > 200_000 {
                return Err(CliError::Cap(format!(
                    "--fm-cap {fm_cap} exceeds the hard limit of 200000"
                )));
            }
            let spec: ProblemSpec = read_json(&io.input)?;
            let sys = build_variant(&spec, io.variant, io.slice)?;
            let vars: Vec<RateVar> = eliminate
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| s.trim().parse::<RateVar>())
                .collect::<Result<_, _>>()
                .map_err(|e| CliError::Parse(e.to_string()))?;
            let projected = polytope::fm_eliminate_with_cap(&sys, &vars, prune, fm_cap)?;
            Ok(match format {
                Format::Json => {
                    serde_json::to_string_pretty(&projected).expect("serializable") + "\n"
                }
                _ => format!(
                    "{} inequalities after eliminating [{}]\n{}",
                    projected.num_inequalities(),
                    vars.iter().map(|v| v.as_str()).collect::<Vec<_>>().join(", "),
                    system_table(&projected)
                ),
            })
        }
        RegionCmd::Support { io, direction } => {
            let spec: ProblemSpec = read_json(&io.input)?;
            let sys = build_variant(&spec, io.variant, io.slice)?;
            let dir = parse_direction(&direction)?;
            let (value, point) = polytope::support_point(&sys, &dir)?;
            let mut out = format!("support {value:.12}\n");
            let _ = writeln!(
                out,
                "argmax {}",
                point
                    .values()
                    .iter()
                    .map(|(v, x)| format!("{v}={x:.12}"))
                    .collect::<Vec<_>>()
                    .join(",")
            );
            Ok(out)
        }
        RegionCmd::Compare {
            io,
            variant_b,
            slice_b,
            input_b,
            dirs,
            points,
            seed,
            format,
        } => {
            let spec_a: ProblemSpec = read_json(&io.input)?;
            let spec_b: ProblemSpec = match &input_b {
                Some(p) => read_json(p)?,
                None => spec_a.clone(),
            };
            let sys_a = build_variant(&spec_a, io.variant, io.slice)?;
            let sys_b = build_variant(&spec_b, variant_b, slice_b)?;
            let report = polytope::compare_regions(&sys_a, &sys_b, dirs, points, seed)?;
            Ok(match format {
                Format::Json => {
                    serde_json::to_string_pretty(&report).expect("serializable") + "\n"
                }
                _ => format!(
                    "seed {}\nmax support gap {:.3e}\nA-only {}  B-only {}  both {}  neither {}\n",
                    report.seed,
                    report.max_support_gap,
                    report.a_only,
                    report.b_only,
                    report.both,
                    report.neither
                ),
            })
        }
    }
}

fn codec_cmd(cmd: CodecCmd) -> Result<String, CliError> {
    match cmd {
        CodecCmd::Simulate {
            input,
            trials,
            seed,
            format,
        } => {
            let code: CodeInstance = read_json(&input)?;
            let prepared = code.prepare()?;
            let result = prepared.simulate(trials, seed);
            Ok(match format {
                Format::Json => serde_json::to_string_pretty(&result).expect("serializable") + "\n",
                Format::Csv => format!(
                    "trials,errors,encoder_errors,error_rate,ci_half_width,seed\n{},{},{},{:.8e},{:.8e},{}\n",
                    result.trials,
                    result.errors,
                    result.encoder_errors,
                    result.error_rate,
                    result.ci_half_width,
                    result.seed
                ),
                Format::Table => format!(
                    "trials {}  errors {}  encoder-errors {}\nerror rate {:.6e} +- {:.2e} (95%)\nseed {}\n",
                    result.trials,
                    result.errors,
                    result.encoder_errors,
                    result.error_rate,
                    result.ci_half_width,
                    result.seed
                ),
            })
        }
        CodecCmd::Exact { input } => {
            let code: CodeInstance = read_json(&input)?;
            let prepared = code.prepare()?;
            let exact = prepared.exact_error()?;
            Ok(format!(
                "error probability {:.12e}\nencoder-abort component {:.12e}\n",
                exact.error_prob, exact.encoder_error_prob
            ))
        }
        CodecCmd::HashCheck {
            hash_mode,
            degree,
            n,
            l,
            q,
            exact,
            samples,
            seed,
        } => {
            let mode = match hash_mode {
                HashModeArg::Dense => HashMode::Dense,
                HashModeArg::Sparse => HashMode::Sparse {
                    degree: degree.unwrap_or_else(|| codec::sparse_degree(n, 1.0)),
                },
            };
            let census = if exact {
                codec::census_exact(mode, n, l, q)?
            } else {
                codec::census_sampled(mode, n, l, q, samples, seed)?
            };
            let profile = census.profile();
            Ok(format!(
                "alpha_hat {:.6}\nbeta_hat {:.6e}\nmethod {}\nseed {}\n",
                profile.alpha_hat,
                profile.beta_hat,
                profile.method,
                profile.seed.map_or("-".into(), |s| s.to_string())
            ))
        }
        CodecCmd::Gen {
            output,
            n,
            q,
            lf,
            lg,
            noise,
            coupling,
            sparse,
            seed,
        } => {
            let code = codec::toy_interference_code(n, q, lf, lg, noise, coupling, sparse, seed);
            code.prepare().map_err(CliError::from)?;
            let json = serde_json::to_string_pretty(&code).expect("serializable");
            write_atomic(&output, &json)?;
            Ok(format!("wrote {}\n", output.display()))
        }
    }
}

fn sweep_cmd(args: SweepArgs) -> Result<String, CliError> {
    let spec: ProblemSpec = read_json(&args.io.input)?;
    let sys = build_variant(&spec, args.io.variant, args.io.slice)?;
    if sys.rate_vars.len() != 2 {
        return Err(CliError::Validation(format!(
            "sweep needs a 2-D slice; system has rate variables [{}]",
            sys.rate_vars
                .iter()
                .map(|v| v.as_str())
                .collect::<Vec<_>>()
                .join(", ")
        )));
    }
    let (va, vb) = (sys.rate_vars[0], sys.rate_vars[1]);
    let mut rows = Vec::new();
    for k in 0..args.angles {
        let theta = if args.angles == 1 {
            std::f64::consts::FRAC_PI_4
        } else {
            k as f64 * std::f64::consts::FRAC_PI_2 / (args.angles - 1) as f64
        };
        let dir: BTreeMap<RateVar, f64> =
            [(va, theta.cos()), (vb, theta.sin())].into_iter().collect();
        let (value, point) = polytope::support_point(&sys, &dir)?;
        rows.push((
            theta,
            value,
            point.get(va).unwrap_or(0.0),
            point.get(vb).unwrap_or(0.0),
        ));
    }
    match args.format {
        Format::Json => {
            let json: Vec<serde_json::Value> = rows
                .iter()
                .map(|(t, s, a, b)| {
                    serde_json::json!({
                        "theta": t,
                        "support": s,
                        va.as_str(): a,
                        vb.as_str(): b,
                    })
                })
                .collect();
            Ok(serde_json::to_string_pretty(&json).expect("serializable") + "\n")
        }
        _ => {
            let mut out = format!("theta,support,{},{}\n", va.as_str(), vb.as_str());
            for (t, s, a, b) in rows {
                let _ = writeln!(out, "{t:.8},{s:.12},{a:.12},{b:.12}");
            }
            Ok(out)
        }
    }
}

fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, contents)
        .and_then(|_| std::fs::rename(&tmp, path))
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}
