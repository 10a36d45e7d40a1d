//! `lacunary`: command-line front end.
//!
//! Exit codes: 0 success, 2 invalid input, 3 insufficient precision, 4 enumeration
//! budget exceeded, 1 for I/O failures.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lacunary_core::cf::{expand, is_bad_at_depth, levy_of};
use lacunary_core::counting::{lacunary_form_count, moment_count_nk, moment_histogram, rz1_count, CountConfig, GeneralRzInstance, Rz1Instance, DEFAULT_BUDGET};
use lacunary_core::dispersion::block_dispersion;
use lacunary_core::exec::Execution;
use lacunary_core::experiments::{run, Artifacts, Experiment, ExperimentConfig, SequenceSource};
use lacunary_core::kronecker::{build_inhom_sequence, dispersion, gap_report, three_distance_check, PointBlock};
use lacunary_core::measures::{decay_profile, sample, MeasureModel, DEFAULT_CANTOR_DEPTH, DEFAULT_SAMPLE_BITS};
use lacunary_core::realnum::{format_decimal, format_rational, pow10_inv};
use lacunary_core::{CertifiedInterval, Error, RealSpec};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "lacunary", version, about = "Certified experiments on lacunary diophantine approximation")]
struct Cli {
    /// Run an archived experiment config instead of a subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Directory for CSV/JSON output files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Disable data parallelism.
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Continued fraction expansion, continuants and growth exponent.
    Cf {
        #[arg(long, allow_hyphen_values = true)]
        alpha: RealSpec,
        #[arg(long, default_value_t = 20)]
        depth: usize,
        /// Also report whether all partial quotients are at most this bound.
        #[arg(long)]
        bad_bound: Option<u64>,
        /// Accept an expansion truncated by the input's digit budget.
        #[arg(long)]
        partial: bool,
    },
    /// Lacunary sequence as JSON (`geometric:m`, `terms:…`, `inhom:α;γ`).
    Seq {
        #[arg(long)]
        source: SequenceSource,
        #[arg(long)]
        count: usize,
        /// Override Λ for inhomogeneous sequences.
        #[arg(long)]
        lambda: Option<f64>,
    },
    /// Gap statistics of the Kronecker orbit `{nα : 1 ≤ n ≤ N}`.
    Orbit {
        #[arg(long, allow_hyphen_values = true)]
        alpha: RealSpec,
        #[arg(long = "N")]
        n: usize,
        /// Working tolerance 10^-digits for budgeted inputs.
        #[arg(long, default_value_t = 40)]
        digits: u32,
    },
    /// Dispersion of explicit points, or of the block `{n_tβ : T < t ≤ 2T}`.
    Disp {
        #[arg(long, value_delimiter = ',', conflicts_with_all = ["seq", "beta"])]
        points: Option<Vec<RealSpec>>,
        #[arg(long, requires_all = ["beta", "t"])]
        seq: Option<SequenceSource>,
        #[arg(long)]
        beta: Option<RealSpec>,
        #[arg(long = "T")]
        t: Option<usize>,
    },
    /// Exhaustive counts against the explicit bounds.
    #[command(subcommand)]
    Count(CountCommand),
    /// Concentration survey over sampled β.
    Survey {
        #[arg(long, default_value = "geometric:2")]
        seq: String,
        /// Block starts T (comma separated).
        #[arg(long = "T", value_delimiter = ',', required = true)]
        t: Vec<usize>,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "lebesgue")]
        measure: String,
    },
    /// Fourier coefficients, decay profile and seeded samples of a measure.
    Measure {
        #[arg(long, default_value = "lebesgue")]
        model: MeasureModel,
        /// Frequencies: a comma list, or `a..b`, or `pow:b:k` for b^0..b^k.
        #[arg(long, default_value = "1..100", allow_hyphen_values = true)]
        xi: String,
        #[arg(long, default_value_t = DEFAULT_CANTOR_DEPTH)]
        depth: u32,
        /// Also draw this many samples.
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Certified hit scans.
    #[command(subcommand)]
    Hits(HitsCommand),
    /// Inhomogeneous sequence, lacunary hits, and translated multiplicative hits.
    Pipeline {
        #[arg(long, allow_hyphen_values = true)]
        alpha: RealSpec,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        gamma: RealSpec,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        delta: RealSpec,
        #[arg(long, default_value = "lebesgue")]
        measure: String,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        #[arg(long = "Tmax")]
        t_max: usize,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct BudgetArg {
    /// Largest number of lattice points to enumerate.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u128,
}

#[derive(Subcommand)]
enum CountCommand {
    /// `#{y ∈ [−Y,Y]^s : |Σ A_j y_j + b| ≤ max A}` against `8^s Y^{s−1}`.
    Rz1 {
        #[arg(long = "A", value_delimiter = ',', required = true)]
        a: Vec<i128>,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        b: i128,
        #[arg(long = "Y")]
        y: u32,
        #[command(flatten)]
        budget: BudgetArg,
    },
    /// `#{(y, z) : |Σ y_j a(z_j)| ≤ K}` against the general bound.
    General {
        #[arg(long)]
        seq: SequenceSource,
        #[arg(long)]
        s: u32,
        #[arg(long = "Y")]
        y: u32,
        #[arg(long = "Z")]
        z: u32,
        #[arg(long = "K")]
        k: i128,
        #[command(flatten)]
        budget: BudgetArg,
    },
    /// `N(k)`, or the full histogram when `--k` is omitted.
    Moment {
        #[arg(long)]
        seq: SequenceSource,
        #[arg(long)]
        s: u32,
        #[arg(long = "L")]
        l: u32,
        #[arg(long = "T")]
        t: u32,
        #[arg(long, allow_hyphen_values = true)]
        k: Option<i128>,
        #[command(flatten)]
        budget: BudgetArg,
    },
}

#[allow(clippy::large_enum_variant)]
#[derive(Subcommand)]
enum HitsCommand {
    /// `n‖nα − γ‖‖nβ − δ‖ < (ln ln n)^{3+ε}/ln n` for `16 ≤ n ≤ N`.
    Multiplicative {
        #[arg(long, allow_hyphen_values = true)]
        alpha: RealSpec,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        gamma: RealSpec,
        #[arg(long, allow_hyphen_values = true)]
        beta: RealSpec,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        delta: RealSpec,
        #[arg(long = "Nmax")]
        n_max: u64,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
    },
    /// `‖n_tβ − δ‖ < (ln t)^{3+ε}/t` for `3 ≤ t ≤ T`.
    Lacunary {
        #[arg(long)]
        seq: String,
        #[arg(long, allow_hyphen_values = true)]
        beta: RealSpec,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        delta: RealSpec,
        #[arg(long = "Tmax")]
        t_max: usize,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
    },
}

enum Failure {
    Core(Error),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InsufficientPrecision(_) => 3,
        Error::BudgetExceeded { .. } => 4,
        _ => 2,
    }
}

fn interval_json(x: &CertifiedInterval) -> Value {
    if x.is_point() {
        json!(format_rational(x.lo()))
    } else {
        json!({"lo": format_decimal(x.lo(), 30), "hi": format_decimal(x.hi(), 30)})
    }
}

fn write_file(out: Option<&Path>, name: &str, contents: &str) -> Result<(), Failure> {
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(name), contents)?;
    }
    Ok(())
}

fn parse_frequencies(s: &str) -> Result<Vec<i128>, Error> {
    let bad = || Error::Parse(format!("bad frequency list {s:?}"));
    if let Some(rest) = s.strip_prefix("pow:") {
        let (b, k) = rest.split_once(':').ok_or_else(bad)?;
        let (b, k): (i128, u32) = (b.parse().map_err(|_| bad())?, k.parse().map_err(|_| bad())?);
        return (0..=k).map(|j| b.checked_pow(j).ok_or_else(bad)).collect();
    }
    if let Some((a, b)) = s.split_once("..") {
        let (a, b): (i128, i128) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
        if b < a || b - a > 10_000_000 {
            return Err(Error::InvalidRange(format!("frequency range {s:?}")));
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect()
}

fn emit_artifacts(artifacts: &Artifacts, out: Option<&Path>) -> Result<Value, Failure> {
    if let Some(dir) = out {
        artifacts.write_to(dir)?;
    }
    Ok(artifacts.summary.clone())
}

fn execute(cli: Cli) -> Result<Value, Failure> {
    let exec = if cli.sequential { Execution::Sequential } else { Execution::default() };
    let out = cli.out.as_deref();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)?;
        let config = ExperimentConfig::from_json(&text)?;
        return emit_artifacts(&run(&config, exec)?, out);
    }
    let Some(command) = cli.command else {
        return Err(Error::Invalid("a subcommand or --config is required (see --help)".into()).into());
    };
    let budget_cfg = |b: &BudgetArg| CountConfig { budget: b.budget, exec };
    let value = match command {
        Command::Cf {
            alpha,
            depth,
            bad_bound,
            partial,
        } => {
            let exp = expand(&alpha, depth)?;
            if !partial {
                exp.require_depth(depth)?;
            }
            let mut v: Value = serde_json::from_str(&exp.to_json()).expect("valid json");
            v["alpha"] = json!(alpha.to_string());
            if exp.certified_depth > 0 {
                v["levy"] = serde_json::to_value(levy_of(&exp)?).expect("serializable");
            }
            if let Some(bound) = bad_bound {
                v["bad"] = serde_json::to_value(is_bad_at_depth(&alpha, exp.certified_depth.max(1), &BigInt::from(bound))?).expect("serializable");
            }
            write_file(out, "cf.json", &(v.to_string() + "\n"))?;
            v
        }
        Command::Seq { source, count, lambda } => {
            let (json_text, extra) = match (&source, lambda) {
                (SequenceSource::Inhomogeneous { alpha, gamma }, _) => {
                    let s = build_inhom_sequence(alpha, gamma, count, lambda)?;
                    let certs = serde_json::to_value(&s.certificates).expect("serializable");
                    (
                        s.sequence.to_json(),
                        Some(json!({"lambda": s.lambda, "lambda_source": s.lambda_source, "certificates": certs})),
                    )
                }
                (_, Some(_)) => return Err(Error::Invalid("--lambda applies only to inhom: sources".into()).into()),
                _ => (source.build(count)?.to_json(), None),
            };
            write_file(out, "sequence.json", &(json_text.clone() + "\n"))?;
            let mut v: Value = serde_json::from_str(&json_text).expect("valid json");
            if let Some(extra) = extra {
                v["construction"] = extra;
            }
            v
        }
        Command::Orbit { alpha, n, digits } => {
            let tol = pow10_inv(digits);
            let report = three_distance_check(&alpha, n, &tol)?;
            let block = lacunary_core::kronecker::orbit_block(&alpha, n, &tol)?;
            let gr = gap_report(&block);
            let gaps: Vec<Value> = report
                .gaps
                .iter()
                .map(|g| {
                    json!({
                        "length": g.exact.as_ref().map_or_else(|| interval_json(&g.length), |q| json!(q.to_string())),
                        "multiplicity": g.multiplicity,
                    })
                })
                .collect();
            let v = json!({
                "alpha": alpha.to_string(),
                "N": n,
                "distinct_points": gr.point_count(),
                "gaps": gaps,
                "dispersion": gr.dispersion_exact.as_ref().map_or_else(|| interval_json(&gr.dispersion), |q| json!(q.to_string())),
                "three_distance": report.holds(),
            });
            write_file(out, "orbit.json", &(v.to_string() + "\n"))?;
            v
        }
        Command::Disp { points, seq, beta, t } => {
            let d = match (points, seq, beta, t) {
                (Some(points), None, None, None) => {
                    let values = points
                        .iter()
                        .map(|p| p.as_rational().ok_or_else(|| Error::Invalid(format!("point {p} is not an exact rational"))))
                        .collect::<Result<Vec<BigRational>, Error>>()?;
                    if values.is_empty() {
                        return Err(Error::Invalid("no points".into()).into());
                    }
                    dispersion(&PointBlock::from_rationals(&values)?)
                }
                (None, Some(src), Some(beta), Some(t)) => block_dispersion(&src.build(2 * t)?, &beta, t)?,
                _ => return Err(Error::Invalid("give either --points or --seq with --beta and --T".into()).into()),
            };
            let v = json!({"dispersion": interval_json(&d)});
            write_file(out, "dispersion.json", &(v.to_string() + "\n"))?;
            v
        }
        Command::Count(cmd) => {
            let v = match cmd {
                CountCommand::Rz1 { a, b, y, budget } => rz1_count(&Rz1Instance::new(a, b, y)?, &budget_cfg(&budget))?.to_json_value(),
                CountCommand::General { seq, s, y, z, k, budget } => {
                    let seq = seq.build(2 * z as usize)?;
                    lacunary_form_count(&GeneralRzInstance::new(&seq, s, y, z, k)?, &budget_cfg(&budget))?.to_json_value()
                }
                CountCommand::Moment { seq, s, l, t, k, budget } => {
                    let seq = seq.build(2 * t as usize)?;
                    let cfg = budget_cfg(&budget);
                    match k {
                        Some(k) => json!({"k": k.to_string(), "count": moment_count_nk(&seq, s, l, t, k, &cfg)?}),
                        None => {
                            let hist = moment_histogram(&seq, s, l, t, &cfg)?;
                            let total: u64 = hist.values().sum();
                            let entries: Vec<Value> = hist.iter().map(|(k, c)| json!([k.to_string(), c])).collect();
                            json!({"total": total, "histogram": entries})
                        }
                    }
                }
            };
            write_file(out, "count.json", &(v.to_string() + "\n"))?;
            v
        }
        Command::Survey {
            seq,
            t,
            eps,
            samples,
            seed,
            measure,
        } => {
            let config = ExperimentConfig::new(Experiment::Survey {
                sequence: seq,
                measure,
                blocks: t,
                epsilon: eps,
                samples,
                seed,
            });
            emit_artifacts(&run(&config, exec)?, out)?
        }
        Command::Measure {
            model,
            xi,
            depth,
            sample: count,
            seed,
        } => {
            let freqs = parse_frequencies(&xi)?;
            let profile = decay_profile(&model, &freqs, depth)?;
            let mut v = profile.summary_json();
            write_file(out, "decay.csv", &profile.to_csv())?;
            if let Some(count) = count {
                let draws = sample(&model, seed, count, DEFAULT_SAMPLE_BITS, exec)?;
                let text: Vec<String> = draws
                    .iter()
                    .map(|x| x.as_rational().map_or_else(|| x.to_string(), |r| format_decimal(&r, 30)))
                    .collect();
                write_file(out, "samples.txt", &(text.join("\n") + "\n"))?;
                v["samples"] = json!(text);
            }
            write_file(out, "decay.json", &(v.to_string() + "\n"))?;
            v
        }
        Command::Hits(HitsCommand::Multiplicative {
            alpha,
            gamma,
            beta,
            delta,
            n_max,
            eps,
        }) => {
            let config = ExperimentConfig::new(Experiment::MultiplicativeHits {
                alpha,
                gamma,
                beta,
                delta,
                n_max,
                epsilon: eps,
            });
            emit_artifacts(&run(&config, exec)?, out)?
        }
        Command::Hits(HitsCommand::Lacunary { seq, beta, delta, t_max, eps }) => {
            let config = ExperimentConfig::new(Experiment::LacunaryHits {
                sequence: seq,
                beta,
                delta,
                t_max,
                epsilon: eps,
            });
            emit_artifacts(&run(&config, exec)?, out)?
        }
        Command::Pipeline {
            alpha,
            gamma,
            delta,
            measure,
            eps,
            t_max,
            samples,
            seed,
        } => {
            let config = ExperimentConfig::new(Experiment::Pipeline {
                alpha,
                gamma,
                delta,
                measure,
                epsilon: eps,
                t_max,
                samples,
                seed,
            });
            emit_artifacts(&run(&config, exec)?, out)?
        }
    };
    Ok(value)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(v) => {
            // a closed pipe downstream is not a failure of the computation
            let _ = writeln!(std::io::stdout(), "{v}");
            ExitCode::SUCCESS
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
