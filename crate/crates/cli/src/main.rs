//! `hqmc`: validate, convert, compare and model-check hybrid quantum models.
//!
//! Exit status: 0 on success or equivalence, 1 when the answer is negative
//! (invalid model, not equivalent), 2 on usage and I/O errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hqmc_core::equivalence::{blm_equivalent, blm_k_equivalent_bruteforce, sl_trace_equivalent};
use hqmc_core::io::{self as hio, Model};
use hqmc_core::model_check::{self, ReachOptions, REACH_TOL};
use hqmc_core::quantum::real_trace;
use hqmc_core::{transforms, Blm, DensityOperator, Error, HqMC, Mode, DEFAULT_TOL};

#[derive(Debug, Parser)]
#[command(
    name = "hqmc",
    version,
    about = "Verification toolkit for hybrid quantum Markov chains and automata"
)]
struct Cli {
    /// Numerical tolerance for zero and equality tests (overrides model tolerances).
    #[arg(long, global = true, env = "HQMC_TOL", value_parser = positive_f64)]
    tol: Option<f64>,

    /// Iteration budget of the reachability solver.
    #[arg(long, global = true, default_value_t = model_check::REACH_MAX_ITER, value_parser = positive_usize)]
    max_iter: usize,

    /// Longest word enumerated by brute-force comparisons.
    #[arg(long, global = true, default_value_t = 8, value_parser = positive_usize)]
    max_word_len: usize,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write the result here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    Qmc,
    Qa,
    Blm,
    Chqa,
    Product,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CliMode {
    /// Compare on all words including the empty one.
    Eps,
    /// Compare on nonempty words only.
    Plus,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the invariants of a model file.
    Validate { file: PathBuf },
    /// Convert a model into another representation.
    Convert {
        file: PathBuf,
        #[arg(long, value_enum)]
        to: Target,
        /// Bad-prefix DFA for `--to product`.
        #[arg(long)]
        dfa: Option<PathBuf>,
    },
    /// Language equivalence of two blm, qa or hqa files, or trace equivalence of two slhqmc files.
    Equiv {
        file1: PathBuf,
        file2: PathBuf,
        #[arg(long, value_enum)]
        mode: Option<CliMode>,
        /// Compare every word up to --max-word-len instead of running the basis algorithm.
        #[arg(long)]
        brute_force: bool,
    },
    /// Trace equivalence of two slhqmc files.
    TraceEquiv { file1: PathBuf, file2: PathBuf },
    /// Probability that runs from a state satisfy the safety property of a bad-prefix DFA.
    CheckSafety {
        model: PathBuf,
        dfa: PathBuf,
        #[arg(long)]
        state: String,
        /// Initial quantum state as a JSON matrix; defaults to the normalised initial mass at the state.
        #[arg(long)]
        rho: Option<PathBuf>,
    },
    /// Print the distribution after a number of steps.
    Run {
        model: PathBuf,
        #[arg(long, default_value_t = 0)]
        steps: usize,
    },
    /// Trace of the path superoperator of an explicit state sequence.
    Measure {
        model: PathBuf,
        #[arg(long, num_args = 1.., value_delimiter = ',', required = true)]
        path: Vec<String>,
        #[arg(long)]
        rho: Option<PathBuf>,
    },
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("`{s}` is not a positive number")),
    }
}

fn positive_usize(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(x) if x > 0 => Ok(x),
        _ => Err(format!("`{s}` is not a positive integer")),
    }
}

/// A result document plus the exit status it implies.
struct Outcome {
    value: Value,
    text: String,
    negative: bool,
}

impl Outcome {
    fn positive(value: Value, text: String) -> Self {
        Self {
            value,
            text,
            negative: false,
        }
    }
}

/// Errors that map to exit status 1 rather than 2.
struct Negative(Outcome);

impl std::fmt::Debug for Negative {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0.text)
    }
}

impl std::fmt::Display for Negative {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0.text)
    }
}

impl std::error::Error for Negative {}

struct Ctx {
    tol: Option<f64>,
    max_iter: usize,
    max_word_len: usize,
}

impl Ctx {
    fn tol(&self) -> f64 {
        self.tol.unwrap_or(DEFAULT_TOL)
    }

    fn load(&self, path: &Path) -> anyhow::Result<Model> {
        let text =
            fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        let model = hio::parse_model(&text).map_err(|e| match e {
            Error::InvalidModel(report) => anyhow!(Negative(invalid(path, "unknown", &report))),
            other => anyhow!(other).context(format!("cannot load {}", path.display())),
        })?;
        Ok(match self.tol {
            Some(t) => model.with_tol(t)?,
            None => model,
        })
    }

    fn reach_opts(&self) -> ReachOptions {
        ReachOptions {
            tol: self.tol.unwrap_or(REACH_TOL),
            max_iter: self.max_iter,
            ..Default::default()
        }
    }
}

fn invalid(path: &Path, kind: &str, report: &hqmc_core::ValidationReport) -> Outcome {
    let violations: Vec<Value> = report
        .violations
        .iter()
        .map(
            |v| json!({"location": v.location, "invariant": v.invariant, "magnitude": v.magnitude}),
        )
        .collect();
    Outcome {
        value: json!({"file": path.display().to_string(), "kind": kind, "valid": report.is_valid(), "violations": violations}),
        text: format!("{}: {kind}: {report}", path.display()),
        negative: !report.is_valid(),
    }
}

fn validate(ctx: &Ctx, file: &Path) -> anyhow::Result<Outcome> {
    let m = ctx.load(file)?;
    Ok(invalid(file, m.kind(), &m.validate()))
}

fn convert(ctx: &Ctx, file: &Path, to: Target, dfa: Option<&Path>) -> anyhow::Result<Outcome> {
    let m = ctx.load(file)?;
    let out: Model = match (&m, to) {
        (Model::HqMC(c), Target::Qmc) => transforms::hqmc_to_qmc(c)?.into(),
        (Model::SlHqMC(c), Target::Qmc) => transforms::hqmc_to_qmc(c.chain())?.into(),
        (Model::Hqa(a), Target::Qa) => transforms::hqa_to_qa(a)?.into(),
        (Model::Hqa(a), Target::Blm) => transforms::hqa_to_blm(a)?.into(),
        (Model::Qa(a), Target::Blm) => transforms::qa_to_blm(a)?.into(),
        (Model::SlHqMC(c), Target::Chqa) => transforms::sl_to_chqa(c)?.into(),
        (Model::SlHqMC(c), Target::Product) => {
            let path = dfa.ok_or_else(|| anyhow!("--to product requires --dfa"))?;
            let Model::Dfa(d) = ctx.load(path)? else {
                bail!("{} is not a dfa", path.display());
            };
            transforms::product(c, &d)?.into()
        }
        (m, t) => bail!("cannot convert a {} model to {t:?}", m.kind()),
    };
    let text = hio::model_to_json(&out)?;
    let value: Value = serde_json::from_str(&text)?;
    Ok(Outcome::positive(value, text))
}

fn to_blm(m: &Model) -> anyhow::Result<Blm> {
    Ok(match m {
        Model::Blm(b) => b.clone(),
        Model::Qa(a) => transforms::qa_to_blm(a)?,
        Model::Hqa(a) => transforms::hqa_to_blm(a)?,
        other => bail!("equivalence is not defined for {} models", other.kind()),
    })
}

fn verdict(v: &hqmc_core::EquivalenceVerdict) -> Outcome {
    let text = if v.equivalent {
        format!(
            "equivalent (basis size {}, max discrepancy {:.3e})",
            v.basis_size, v.margin
        )
    } else {
        let w = v.witness.as_deref().unwrap_or_default();
        let shown = if w.is_empty() {
            "ε".to_string()
        } else {
            w.join(" ")
        };
        format!(
            "not equivalent: witness `{shown}` (discrepancy {:.3e})",
            v.margin
        )
    };
    Outcome {
        value: hio::verdict_to_value(v),
        text,
        negative: !v.equivalent,
    }
}

fn equiv(
    ctx: &Ctx,
    f1: &Path,
    f2: &Path,
    mode: Option<CliMode>,
    brute: bool,
) -> anyhow::Result<Outcome> {
    let (m1, m2) = (ctx.load(f1)?, ctx.load(f2)?);
    if m1.kind() != m2.kind() {
        bail!("kind mismatch: {} vs {}", m1.kind(), m2.kind());
    }
    let tol = ctx.tol();
    let (b1, b2, mode) = match (&m1, &m2) {
        (Model::SlHqMC(a), Model::SlHqMC(b)) => {
            if !brute {
                return Ok(verdict(&sl_trace_equivalent(a, b, tol)?));
            }
            let blm = |m| transforms::hqa_to_blm(&transforms::sl_to_chqa(m)?);
            (blm(a)?, blm(b)?, Mode::PositiveWordsOnly)
        }
        _ => {
            let mode = match mode {
                Some(CliMode::Plus) => Mode::PositiveWordsOnly,
                _ => Mode::IncludeEpsilon,
            };
            (to_blm(&m1)?, to_blm(&m2)?, mode)
        }
    };
    let v = if brute {
        blm_k_equivalent_bruteforce(&b1, &b2, ctx.max_word_len, tol, mode)?
    } else {
        blm_equivalent(&b1, &b2, tol, mode)?
    };
    Ok(verdict(&v))
}

fn read_rho(path: &Path, dim: usize, tol: f64) -> anyhow::Result<DensityOperator> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let m = hio::parse_matrix(&text).with_context(|| format!("cannot parse {}", path.display()))?;
    if m.nrows() != dim {
        bail!(
            "density in {} has dimension {}, model has {dim}",
            path.display(),
            m.nrows()
        );
    }
    Ok(DensityOperator::new(m, tol)?)
}

fn chain_of(m: &Model) -> anyhow::Result<&HqMC> {
    match m {
        Model::HqMC(c) => Ok(c),
        Model::SlHqMC(c) => Ok(c.chain()),
        other => bail!("expected an hqmc or slhqmc model, got {}", other.kind()),
    }
}

fn check_safety(
    ctx: &Ctx,
    model: &Path,
    dfa: &Path,
    state: &str,
    rho: Option<&Path>,
) -> anyhow::Result<Outcome> {
    let Model::SlHqMC(m) = ctx.load(model)? else {
        bail!("{} is not an slhqmc model", model.display());
    };
    let Model::Dfa(d) = ctx.load(dfa)? else {
        bail!("{} is not a dfa", dfa.display());
    };
    let s = m.chain().state_index(state)?;
    let rho = match rho {
        Some(p) => read_rho(p, m.chain().dim(), m.chain().tol())?,
        None => model_check::default_rho(m.chain(), s)?,
    };
    match model_check::check_safety(&m, &d, s, &rho, ctx.reach_opts()) {
        Ok(r) => {
            let text = format!(
                "P(safe from {state}) = {:.12} ({} solve, {} iterations, residual {:.3e})",
                r.probability_satisfy,
                r.method.as_str(),
                r.iterations,
                r.residual
            );
            Ok(Outcome::positive(hio::safety_to_value(&r), text))
        }
        Err(Error::EmptyProperty) => Ok(Outcome::positive(
            json!({
                "state": state,
                "probability_satisfy": 0.0,
                "residual": 0.0,
                "iterations": 0,
                "method": "none",
                "note": "the DFA accepts the empty word, so the property is empty",
            }),
            format!("P(safe from {state}) = 0 (the DFA accepts the empty word, so the property is empty)"),
        )),
        Err(e) => Err(e.into()),
    }
}

fn run(ctx: &Ctx, model: &Path, steps: usize) -> anyhow::Result<Outcome> {
    let m = ctx.load(model)?;
    if let Model::Qmc(q) = &m {
        let rho = q.state_at(steps)?;
        let tr = real_trace(&rho);
        return Ok(Outcome::positive(
            json!({"step": steps, "trace": tr, "matrix": hio::matrix_to_value(&rho)}),
            format!("step {steps}: trace {tr:.12}\n{rho}"),
        ));
    }
    let c = chain_of(&m)?;
    let mu = c.distribution_at(steps)?;
    let mut text = format!("step {steps}");
    let mut total = 0.0;
    let states: Vec<Value> = c
        .states()
        .iter()
        .zip(&mu)
        .map(|(s, m)| {
            let tr = real_trace(m);
            total += tr;
            text.push_str(&format!("\n{s}: trace {tr:.12}"));
            json!({"state": s, "trace": tr, "matrix": hio::matrix_to_value(m)})
        })
        .collect();
    text.push_str(&format!("\ntotal trace {total:.12}"));
    Ok(Outcome::positive(
        json!({"step": steps, "states": states, "total_trace": total}),
        text,
    ))
}

fn measure(
    ctx: &Ctx,
    model: &Path,
    path: &[String],
    rho: Option<&Path>,
) -> anyhow::Result<Outcome> {
    let m = ctx.load(model)?;
    let c = chain_of(&m)?;
    let idx = model_check::state_indices(c, path)?;
    let rho = match rho {
        Some(p) => read_rho(p, c.dim(), c.tol())?,
        None => model_check::default_rho(c, idx[0])?,
    };
    let tr = model_check::cylinder_measure(c, idx[0], &idx, &rho)?;
    Ok(Outcome::positive(
        json!({"path": path, "trace": tr}),
        format!("{}: {tr:.12}", path.join(" ")),
    ))
}

fn emit(cli: &Cli, out: &Outcome) -> anyhow::Result<()> {
    let body = match cli.format {
        Format::Json => serde_json::to_string_pretty(&out.value)?,
        Format::Text => out.text.clone(),
    };
    match &cli.output {
        Some(p) => {
            fs::write(p, body + "\n").with_context(|| format!("cannot write {}", p.display()))?
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            match writeln!(stdout, "{body}") {
                // A closed pipe (e.g. `| head`) is not an error worth reporting.
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                r => r.context("cannot write to standard output")?,
            }
        }
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> anyhow::Result<Outcome> {
    let ctx = Ctx {
        tol: cli.tol,
        max_iter: cli.max_iter,
        max_word_len: cli.max_word_len,
    };
    match &cli.command {
        Command::Validate { file } => validate(&ctx, file),
        Command::Convert { file, to, dfa } => convert(&ctx, file, *to, dfa.as_deref()),
        Command::Equiv {
            file1,
            file2,
            mode,
            brute_force,
        } => equiv(&ctx, file1, file2, *mode, *brute_force),
        Command::TraceEquiv { file1, file2 } => {
            let (m1, m2) = (ctx.load(file1)?, ctx.load(file2)?);
            match (&m1, &m2) {
                (Model::SlHqMC(a), Model::SlHqMC(b)) => {
                    Ok(verdict(&sl_trace_equivalent(a, b, ctx.tol())?))
                }
                _ => bail!(
                    "trace-equiv needs two slhqmc models, got {} and {}",
                    m1.kind(),
                    m2.kind()
                ),
            }
        }
        Command::CheckSafety {
            model,
            dfa,
            state,
            rho,
        } => check_safety(&ctx, model, dfa, state, rho.as_deref()),
        Command::Run { model, steps } => run(&ctx, model, *steps),
        Command::Measure { model, path, rho } => measure(&ctx, model, path, rho.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = dispatch(&cli);
    let outcome = match result {
        Ok(o) => o,
        Err(e) => match e.downcast::<Negative>() {
            Ok(Negative(o)) => o,
            Err(e) => {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
        },
    };
    if let Err(e) = emit(&cli, &outcome) {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    let _ = std::io::stdout().flush();
    ExitCode::from(u8::from(outcome.negative))
}
