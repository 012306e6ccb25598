//! Subcommands, argument parsing and the exit-code contract.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use posmap_core::cones::{
    check_ccp, check_cp, refute_k_positivity, SeeSawConfig, SEARCH_TOL, SPECTRAL_TOL,
};
use posmap_core::decomp::{
    decide_decomposable, not_ccp_demo, piani_mora_check, Budgets, Consistency,
};
use posmap_core::factor::{
    factor_through_identity_with, factor_through_pure, FACTOR_SEARCH, FACTOR_TOL,
};
use posmap_core::maps::{tensor_maps, zoo};
use posmap_core::stinespring::minimal_dilation;
use posmap_core::{CertTolerances, CertificateKind, Error, FactorResult, LinearMapSpec, Status};
use serde_json::{json, Map, Value};

use crate::document::{convert, MapDocument};
use crate::error::{
    CliError, CliResult, EXIT_INTERNAL, EXIT_NEGATIVE, EXIT_POSITIVE, EXIT_UNDECIDED, EXIT_USAGE,
};
use crate::json::{num, parse, to_canonical_string};
use crate::report::{
    certificate_fields, dilation_fields, factor_fields, not_ccp_fields, piani_mora_fields,
    search_to_value, verdict_to_value, RunInfo,
};
use crate::reverify::reverify_value;

#[derive(Debug, Parser)]
#[command(
    name = "posmap",
    version,
    about = "Positivity cones, decomposability certificates and factorizations of linear maps between matrix algebras"
)]
pub struct Cli {
    /// Seed for every randomized search.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for multistart searches; results do not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Re-check a saved report or certificate.
    #[arg(long, value_name = "FILE")]
    pub reverify: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PropertyArg {
    Cp,
    Ccp,
    Kpos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FactorMode {
    Id,
    Pure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Repr {
    Choi,
    Kraus,
    Super,
}

impl Repr {
    fn name(self) -> &'static str {
        match self {
            Repr::Choi => "choi",
            Repr::Kraus => "kraus",
            Repr::Super => "super",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Test complete positivity, complete copositivity or k-positivity.
    Check {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[arg(long, value_enum)]
        property: PropertyArg,
        #[arg(long)]
        k: Option<usize>,
        /// Defaults to 1e-9 for spectral tests and 1e-7 for the k-positivity search.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = 64)]
        starts: usize,
        #[arg(long, default_value_t = 500)]
        iterations: usize,
    },
    /// Decide decomposability and emit a certificate.
    Decomp {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[command(flatten)]
        budget: DecompArgs,
    },
    /// Recover γ from β = γ ⊗ id_k, or β₁ from β = β₁ ⊗ α₂ with α₂ pure.
    Factor {
        #[arg(long, value_enum)]
        mode: FactorMode,
        #[arg(long, value_name = "FILE")]
        alpha: PathBuf,
        #[arg(long, value_name = "FILE")]
        alpha2: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        beta: PathBuf,
        /// Inferred from the dimensions when omitted.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = FACTOR_TOL)]
        tol: f64,
        /// Also write the recovered factor as a map document.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Emit a named map: identity, transpose, depolarizing, mu_family, choi75.
    Zoo {
        name: String,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long = "param", allow_negative_numbers = true)]
        params: Vec<f64>,
        #[arg(long, value_enum, default_value = "choi")]
        repr: Repr,
    },
    /// Emit the tensor product of two maps.
    Tensor {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value = "choi")]
        repr: Repr,
    },
    /// Emit the minimal Stinespring dilation of a completely positive map.
    Dilate { file: PathBuf },
    /// Decide decomposability of τ ⊗ id_k and compare with complete positivity of τ.
    PianiMora {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[command(flatten)]
        budget: DecompArgs,
    },
    /// Exhibit a positive element that τ ⊗ id_k composed with transpose sends to a non-positive one.
    NotCcp {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
    /// Re-check a saved report or certificate.
    Reverify { file: PathBuf },
}

#[derive(Debug, Clone, clap::Args)]
pub struct DecompArgs {
    /// Largest accepted ‖A + Γ(B) − C‖_F.
    #[arg(long, default_value_t = 1e-7)]
    pub tol_res: f64,
    /// Primal iteration budget.
    #[arg(long, default_value_t = 5000)]
    pub max_iter: usize,
    /// Witness-search iteration budget.
    #[arg(long, default_value_t = 2000)]
    pub witness_iter: usize,
    /// Smallest eigenvalue accepted as PSD in a certificate is −tol-psd.
    #[arg(long, default_value_t = 1e-9)]
    pub tol_psd: f64,
    /// A witness needs Tr(W·C) ≤ −margin.
    #[arg(long, default_value_t = 1e-6)]
    pub margin: f64,
}

impl DecompArgs {
    fn budgets(&self) -> Budgets {
        Budgets {
            primal_iterations: self.max_iter,
            witness_outer: self.witness_iter,
            tolerances: CertTolerances {
                psd: self.tol_psd,
                residual: self.tol_res,
                margin: self.margin,
                ..CertTolerances::default()
            },
            ..Budgets::default()
        }
    }
}

/// What the process prints and returns.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(args: I) -> RunOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    EXIT_POSITIVE
                }
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            return if code == EXIT_POSITIVE {
                RunOutput {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                RunOutput {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    let command = args
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join(" ");
    match execute(&cli, &command) {
        Ok((code, value)) => RunOutput {
            code,
            stdout: to_canonical_string(&value) + "\n",
            stderr: String::new(),
        },
        Err(e) => RunOutput {
            code: e.exit_code(),
            stdout: String::new(),
            stderr: format!("posmap: {e}\n"),
        },
    }
}

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn read_doc(path: &Path) -> CliResult<MapDocument> {
    MapDocument::parse(&read_text(path)?).map_err(|e| match e {
        CliError::Parse { field, message } => CliError::Parse {
            field,
            message: format!("{message} (in {})", path.display()),
        },
        other => other,
    })
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn status_code(s: Status) -> i32 {
    match s {
        Status::Holds => EXIT_POSITIVE,
        Status::Fails => EXIT_NEGATIVE,
        Status::Undecided => EXIT_UNDECIDED,
    }
}

fn kind_code(k: CertificateKind) -> i32 {
    match k {
        CertificateKind::Decomposition => EXIT_POSITIVE,
        CertificateKind::Witness => EXIT_NEGATIVE,
        CertificateKind::Undecided => EXIT_UNDECIDED,
    }
}

fn execute(cli: &Cli, command: &str) -> CliResult<(i32, Value)> {
    let start = Instant::now();
    let info = |tag: &'static str| RunInfo {
        command: command.to_string(),
        seed: cli.seed,
        threads: cli.threads,
        wall_time_s: start.elapsed().as_secs_f64(),
        tag,
    };
    if cli.threads == 0 {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    let cmd = match (&cli.command, &cli.reverify) {
        (Some(_), Some(_)) => {
            return Err(CliError::Usage(
                "--reverify cannot be combined with a subcommand".into(),
            ))
        }
        (None, Some(file)) => return reverify_file(file, &info),
        (None, None) => {
            return Err(CliError::Usage(
                "a subcommand or --reverify FILE is required".into(),
            ))
        }
        (Some(cmd), None) => cmd,
    };
    match cmd {
        Command::Check {
            input,
            property,
            k,
            tol,
            starts,
            iterations,
        } => {
            let doc = read_doc(input)?;
            let mut tolerances = Map::new();
            let verdict = match property {
                PropertyArg::Cp | PropertyArg::Ccp => {
                    let tol = tol.unwrap_or(SPECTRAL_TOL);
                    tolerances.insert("tol".into(), num(tol));
                    if *property == PropertyArg::Cp {
                        check_cp(&doc.map, tol)?
                    } else {
                        check_ccp(&doc.map, tol)?
                    }
                }
                PropertyArg::Kpos => {
                    let k = k.ok_or_else(|| {
                        CliError::Usage("--k is required for --property kpos".into())
                    })?;
                    let cfg = SeeSawConfig {
                        starts: *starts,
                        iterations: *iterations,
                        seed: cli.seed,
                        tol: tol.unwrap_or(SEARCH_TOL),
                        threads: cli.threads,
                    };
                    tolerances.insert("tol".into(), num(cfg.tol));
                    tolerances.insert("spectral".into(), num(SPECTRAL_TOL));
                    tolerances.insert("search".into(), search_to_value(&cfg));
                    refute_k_positivity(&doc.map, k, &cfg)?
                }
            };
            let tag = match property {
                PropertyArg::Cp => "choi-matrix-criterion",
                PropertyArg::Ccp => "complete-copositivity-via-transpose",
                PropertyArg::Kpos => "schmidt-rank-positivity-search",
            };
            let mut report = Map::new();
            info(tag).fill(&mut report, "check");
            report.insert("map".into(), doc.to_value());
            report.insert("tolerances".into(), Value::Object(tolerances));
            report.insert("verdict".into(), verdict_to_value(&verdict));
            Ok((status_code(verdict.status), Value::Object(report)))
        }
        Command::Decomp { input, budget } => {
            let doc = read_doc(input)?;
            let cert = decide_decomposable(&doc.map, &budget.budgets())?;
            let mut report = certificate_fields(&cert);
            info("decomposability-duality").fill(&mut report, "decomp");
            report.insert("map".into(), doc.to_value());
            report.insert("budgets".into(), budgets_value(budget));
            Ok((kind_code(cert.kind()), Value::Object(report)))
        }
        Command::Factor {
            mode,
            alpha,
            alpha2,
            beta,
            k,
            tol,
            out,
        } => {
            let inputs = FactorInputs {
                mode: *mode,
                alpha: read_doc(alpha)?.map,
                alpha2: alpha2.as_deref().map(read_doc).transpose()?.map(|d| d.map),
                beta: read_doc(beta)?.map,
                k: *k,
                tol: *tol,
                seed: cli.seed,
                threads: cli.threads,
            };
            if *mode == FactorMode::Pure && inputs.alpha2.is_none() {
                return Err(CliError::Usage(
                    "--alpha2 is required for --mode pure".into(),
                ));
            }
            let k = match *mode {
                FactorMode::Id => Some(inputs.resolved_k()?),
                FactorMode::Pure => None,
            };
            let result = run_factor(&inputs);
            let status = factor_status(&result);
            if status == "error" {
                return Err(result.expect_err("only errors have status 'error'"));
            }
            let tag = match mode {
                FactorMode::Id => "identity-tensor-factorization",
                FactorMode::Pure => "pure-tensor-factorization",
            };
            let mut report = Map::new();
            let (code, message) = match &result {
                Ok(r) => {
                    report.extend(factor_fields(r));
                    if let Some(path) = out {
                        write_text(
                            path,
                            &(MapDocument::new(r.factor.clone()).to_canonical_string() + "\n"),
                        )?;
                    }
                    (EXIT_POSITIVE, Value::Null)
                }
                Err(e) => (EXIT_NEGATIVE, json!(e.to_string())),
            };
            info(tag).fill(&mut report, "factor");
            report.insert("mode".into(), json!(mode_name(*mode)));
            report.insert("k".into(), json!(k));
            report.insert("tol".into(), num(*tol));
            report.insert("status".into(), json!(status));
            report.insert("message".into(), message);
            report.insert(
                "alpha".into(),
                MapDocument::new(inputs.alpha.clone()).to_value(),
            );
            report.insert(
                "alpha2".into(),
                inputs
                    .alpha2
                    .clone()
                    .map_or(Value::Null, |m| MapDocument::new(m).to_value()),
            );
            report.insert(
                "beta".into(),
                MapDocument::new(inputs.beta.clone()).to_value(),
            );
            Ok((code, Value::Object(report)))
        }
        Command::Zoo {
            name,
            dim,
            params,
            repr,
        } => {
            let all: Vec<f64> = dim
                .map(|d| d as f64)
                .into_iter()
                .chain(params.iter().copied())
                .collect();
            let map = zoo(name, &all)?;
            Ok((
                EXIT_POSITIVE,
                MapDocument::new(convert(&map, repr.name())?).to_value(),
            ))
        }
        Command::Tensor { a, b, repr } => {
            let map = tensor_maps(&read_doc(a)?.map, &read_doc(b)?.map)?;
            Ok((
                EXIT_POSITIVE,
                MapDocument::new(convert(&map, repr.name())?).to_value(),
            ))
        }
        Command::Dilate { file } => {
            let doc = read_doc(file)?;
            let triple = minimal_dilation(&doc.map)?;
            let mut report = dilation_fields(&triple);
            info("minimal-stinespring-dilation").fill(&mut report, "dilate");
            report.insert("map".into(), doc.to_value());
            Ok((EXIT_POSITIVE, Value::Object(report)))
        }
        Command::PianiMora { input, k, budget } => {
            let doc = read_doc(input)?;
            let r = piani_mora_check(&doc.map, *k, &budget.budgets())?;
            let code = match r.consistency {
                Consistency::Contradiction => EXIT_INTERNAL,
                _ => kind_code(r.certificate.kind()),
            };
            let mut report = piani_mora_fields(&r);
            info("tensor-identity-decomposability").fill(&mut report, "piani_mora");
            report.insert("tau".into(), doc.to_value());
            report.insert("budgets".into(), budgets_value(budget));
            Ok((code, Value::Object(report)))
        }
        Command::NotCcp { input, k } => {
            let doc = read_doc(input)?;
            let r = not_ccp_demo(&doc.map, *k)?;
            let code = if r.min_eigenvalue < -SPECTRAL_TOL {
                EXIT_NEGATIVE
            } else {
                EXIT_UNDECIDED
            };
            let mut report = not_ccp_fields(&r);
            info("tensor-identity-not-copositive").fill(&mut report, "not_ccp");
            report.insert("map".into(), doc.to_value());
            report.insert("tolerances".into(), json!({"tol": num(SPECTRAL_TOL)}));
            Ok((code, Value::Object(report)))
        }
        Command::Reverify { file } => reverify_file(file, &info),
    }
}

fn budgets_value(b: &DecompArgs) -> Value {
    json!({
        "max_iter": b.max_iter,
        "witness_iter": b.witness_iter,
        "tol_res": num(b.tol_res),
        "tol_psd": num(b.tol_psd),
        "margin": num(b.margin),
    })
}

fn reverify_file(file: &Path, info: &dyn Fn(&'static str) -> RunInfo) -> CliResult<(i32, Value)> {
    let doc = parse(&read_text(file)?)?;
    let r = reverify_value(&doc)?;
    let mut report = Map::new();
    info("certificate-reverification").fill(&mut report, "reverify");
    report.insert("target".into(), json!(r.target));
    report.insert("agrees".into(), json!(r.agrees));
    report.insert("details".into(), r.details);
    let code = if r.agrees {
        EXIT_POSITIVE
    } else {
        EXIT_NEGATIVE
    };
    Ok((code, Value::Object(report)))
}

pub fn mode_name(mode: FactorMode) -> &'static str {
    match mode {
        FactorMode::Id => "id",
        FactorMode::Pure => "pure",
    }
}

/// Everything a factorization run depends on; reports embed all of it.
#[derive(Debug, Clone)]
pub struct FactorInputs {
    pub mode: FactorMode,
    pub alpha: LinearMapSpec,
    pub alpha2: Option<LinearMapSpec>,
    pub beta: LinearMapSpec,
    pub k: Option<usize>,
    pub tol: f64,
    pub seed: u64,
    pub threads: usize,
}

impl FactorInputs {
    /// `k` as given, or `dim_in(β) / dim_in(α)`.
    pub fn resolved_k(&self) -> CliResult<usize> {
        if let Some(k) = self.k {
            return Ok(k);
        }
        let (a, b) = (self.alpha.dims(), self.beta.dims());
        if b.dim_in % a.dim_in == 0 && b.dim_in / a.dim_in * a.dim_out == b.dim_out {
            Ok(b.dim_in / a.dim_in)
        } else {
            Err(CliError::Usage(format!(
                "cannot infer k: β maps M_{} → M_{} but α maps M_{} → M_{}",
                b.dim_in, b.dim_out, a.dim_in, a.dim_out
            )))
        }
    }
}

pub fn run_factor(inputs: &FactorInputs) -> CliResult<FactorResult> {
    match inputs.mode {
        FactorMode::Id => {
            let search = SeeSawConfig {
                seed: inputs.seed,
                threads: inputs.threads,
                ..FACTOR_SEARCH
            };
            Ok(factor_through_identity_with(
                &inputs.alpha,
                &inputs.beta,
                inputs.resolved_k()?,
                inputs.tol,
                &search,
            )?)
        }
        FactorMode::Pure => {
            let alpha2 = inputs
                .alpha2
                .as_ref()
                .ok_or_else(|| CliError::Usage("--alpha2 is required for --mode pure".into()))?;
            Ok(factor_through_pure(
                &inputs.alpha,
                alpha2,
                &inputs.beta,
                inputs.tol,
            )?)
        }
    }
}

/// Stable name for a factorization outcome; `"error"` for anything that is not a verdict.
pub fn factor_status(result: &CliResult<FactorResult>) -> &'static str {
    match result {
        Ok(_) => "success",
        Err(CliError::Core(e)) => match e {
            Error::NotAFactor(_) => "not_a_factor",
            Error::NotDominated { .. } => "not_dominated",
            Error::NotPure { .. } => "not_pure",
            Error::PreconditionFailed(_) => "precondition_failed",
            Error::ReconstructionFailed { .. } => "reconstruction_failed",
            _ => "error",
        },
        Err(_) => "error",
    }
}
