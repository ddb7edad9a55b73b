//! `qetkit`: command-line front end for the eigenvalue transformation
//! toolkit. Every run writes a JSON report embedding its configuration and
//! the toolkit version; randomized inputs are derived from `--seed` alone.
//!
//! Exit codes: 0 ok, 2 usage, 3 precondition failure, 4 contract violation.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;

use qetkit::approx::{self, FunctionSpec, PolyMV, PolyMVJson};
use qetkit::blockenc::BlockEncoding;
use qetkit::decomp::{self, TermJson};
use qetkit::matrices::{self, ComplexMatrix, MatrixJson, StateJson};
use qetkit::ntca::{self, PrepareOracle};
use qetkit::qet::{self, Backend, Claim, CostReport};
use qetkit::{fixtures, Error, Tolerances, VERSION};

const EXIT_USAGE: u8 = 2;
const EXIT_PRECONDITION: u8 = 3;
const EXIT_CONTRACT: u8 = 4;

/// Grid points per axis for measured sup errors.
const ERROR_GRID: usize = 201;
const RECONSTRUCTION_GRID: usize = 33;

#[derive(Parser)]
#[command(name = "qetkit", version, about = "Quantum eigenvalue transformation at desk scale")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Interpolate a builtin function (or pass a polynomial through) and
    /// compare the measured error with the Jackson-type bound.
    Approx(Config),
    /// Chebyshev sum-of-products decomposition of a polynomial.
    Decompose(Config),
    /// Transform a normal matrix by a bivariate polynomial.
    Qet(Config),
    /// Transform a commuting Hermitian family by a multivariate polynomial.
    Mqet(Config),
    /// Exponential of a normal matrix.
    Exp(Config),
    /// Nonlinear transformation of the amplitudes of a prepared state.
    Ntca(Config),
}

#[derive(Args, Serialize, Clone)]
struct Config {
    /// Per-variable degree bound D (number of nodes for approx, truncation
    /// degree for exp).
    #[arg(long = "degree-bound")]
    degree_bound: Option<usize>,
    /// Number r of Chebyshev-expanded variables; mqet takes r + 1 matrices.
    #[arg(long)]
    vars: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "dilation", value_parser = ["dilation"])]
    backend: String,
    /// Evolution time for exp.
    #[arg(long)]
    time: Option<f64>,
    /// Input file: matrix JSON (qet, exp, ntca), list of matrix JSON (mqet)
    /// or polynomial JSON (approx, decompose).
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Polynomial JSON for the transforming function.
    #[arg(long)]
    poly: Option<PathBuf>,
    /// Output directory; the report is printed to stdout either way.
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
    /// Tolerance override, NAME=VAL; repeatable.
    #[arg(long = "tol", value_parser = parse_tol)]
    tol: Vec<(String, f64)>,
    /// Matrix dimension of generated fixtures.
    #[arg(long)]
    dim: Option<usize>,
    /// Builtin function for approx: exp-cos, trig, rational, poly.
    #[arg(long)]
    function: Option<String>,
    /// Generated family for mqet: commuting or noncommuting.
    #[arg(long)]
    fixture: Option<String>,
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (name, val) = s.split_once('=').ok_or_else(|| format!("expected NAME=VAL, got {s:?}"))?;
    let val: f64 = val.parse().map_err(|e| format!("{val:?}: {e}"))?;
    Ok((name.to_string(), val))
}

enum Failure {
    Usage(String),
    Precondition(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Precondition(e)
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    version: &'static str,
    command: &'static str,
    config: &'a Config,
    status: &'static str,
    failures: Vec<String>,
    result: T,
}

#[derive(Serialize)]
struct ErrorDocument<'a> {
    version: &'static str,
    status: &'static str,
    kind: &'a str,
    message: String,
}

/// Files besides report.json written to `--out`.
struct Artifacts {
    files: Vec<(&'static str, String)>,
}

impl Artifacts {
    fn none() -> Self {
        Self { files: Vec::new() }
    }

    fn with(mut self, name: &'static str, contents: String) -> Self {
        self.files.push((name, contents));
        self
    }
}

struct Run<T: Serialize> {
    result: T,
    claims: Vec<Claim>,
    artifacts: Artifacts,
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn error_kind(e: &Error) -> String {
    format!("{e:?}").chars().take_while(|c| c.is_ascii_alphanumeric()).collect()
}

fn tolerances(config: &Config) -> Outcome<Tolerances> {
    let mut tol = Tolerances::default();
    for (name, val) in &config.tol {
        tol.set(name, *val).map_err(|e| Failure::Usage(e.to_string()))?;
    }
    Ok(tol)
}

fn read(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn read_poly(path: &Path) -> Outcome<PolyMV> {
    let json: PolyMVJson = serde_json::from_str(&read(path)?).map_err(Error::from)?;
    Ok(PolyMV::from_json(&json)?)
}

fn read_matrix(path: &Path) -> Outcome<ComplexMatrix> {
    let json: MatrixJson = serde_json::from_str(&read(path)?).map_err(Error::from)?;
    Ok(json.to_matrix(true)?)
}

fn read_matrices(path: &Path) -> Outcome<Vec<ComplexMatrix>> {
    let json: Vec<MatrixJson> = serde_json::from_str(&read(path)?).map_err(Error::from)?;
    Ok(json.iter().map(|m| m.to_matrix(true)).collect::<qetkit::Result<_>>()?)
}

fn degree_bound(config: &Config, default: usize) -> Outcome<usize> {
    match config.degree_bound {
        Some(0) => Err(Failure::Usage("--degree-bound must be at least 1".into())),
        Some(d) => Ok(d),
        None => Ok(default),
    }
}

fn dim(config: &Config, default: usize) -> Outcome<usize> {
    let n = config.dim.unwrap_or(default);
    if !matrices::is_power_of_two(n) {
        return Err(Failure::Usage(format!("--dim {n} is not a power of two")));
    }
    Ok(n)
}

fn transform_poly(config: &Config, bounds: &[usize], rng: &mut fixtures::FixtureRng) -> Outcome<PolyMV> {
    match &config.poly {
        Some(path) => read_poly(path),
        None => Ok(fixtures::random_unit_sup_poly(bounds, rng)),
    }
}

fn sup_error(f: impl Fn(&[f64]) -> Complex64, g: impl Fn(&[f64]) -> Complex64, vars: usize) -> f64 {
    let per_axis = RECONSTRUCTION_GRID;
    let total = per_axis.pow(vars as u32);
    let mut point = vec![0.0; vars];
    let mut worst: f64 = 0.0;
    for flat in 0..total {
        let mut rest = flat;
        for slot in point.iter_mut().rev() {
            *slot = -1.0 + 2.0 * (rest % per_axis) as f64 / (per_axis - 1) as f64;
            rest /= per_axis;
        }
        worst = worst.max((f(&point) - g(&point)).norm());
    }
    worst
}

fn within(name: &str, bound: f64, value: f64) -> Claim {
    Claim {
        name: name.into(),
        claimed: bound,
        measured: value,
        holds: value <= bound,
        enforced: true,
    }
}

fn builtin(name: &str) -> Option<FunctionSpec> {
    let spec = match name {
        "exp-cos" => FunctionSpec::new(2, |x| Complex64::new(x[0].exp() * x[1].cos(), 0.0))
            .with_smoothness(2, std::f64::consts::E),
        "trig" => FunctionSpec::new(2, |x| Complex64::new((2.0 * x[0]).sin(), x[1].powi(3))).with_smoothness(2, 6.0),
        "rational" => {
            FunctionSpec::new(2, |x| Complex64::new(1.0 / (3.0 - x[0] - x[1]), 0.0)).with_smoothness(2, 2.0)
        }
        _ => return None,
    };
    Some(spec)
}

#[derive(Serialize)]
struct ApproxResult {
    function: String,
    nodes: usize,
    smoothness_order: Option<usize>,
    smoothness_constant: Option<f64>,
    measured_sup_error: f64,
    jackson_bound: Option<f64>,
    polynomial: PolyMVJson,
}

fn cmd_approx(config: &Config, tol: &Tolerances) -> Outcome<Run<ApproxResult>> {
    let name = config.function.clone().unwrap_or_else(|| "exp-cos".into());
    if name == "poly" {
        let path = config
            .input
            .as_ref()
            .ok_or_else(|| Failure::Usage("function poly needs --in".into()))?;
        let p = read_poly(path)?;
        let json = p.to_json();
        return Ok(Run {
            result: ApproxResult {
                function: name,
                nodes: p.max_degree() + 1,
                smoothness_order: None,
                smoothness_constant: None,
                measured_sup_error: 0.0,
                jackson_bound: None,
                polynomial: json.clone(),
            },
            claims: Vec::new(),
            artifacts: Artifacts::none().with("poly.json", to_json(&json)),
        });
    }
    let f = builtin(&name).ok_or_else(|| Failure::Usage(format!("unknown builtin function {name:?}")))?;
    let n = degree_bound(config, 12)?;
    let p = approx::tensor_interpolate(&f, &[n, n], tol)?;
    let measured = approx::uniform_grid_error(&f, &p, ERROR_GRID);
    let (k, m_k) = f.smoothness.expect("builtins declare smoothness");
    let bound = approx::jackson_bound_2d(k, m_k, n, n);
    let json = p.to_json();
    Ok(Run {
        result: ApproxResult {
            function: name,
            nodes: n,
            smoothness_order: Some(k),
            smoothness_constant: Some(m_k),
            measured_sup_error: measured,
            jackson_bound: Some(bound),
            polynomial: json.clone(),
        },
        claims: vec![within("measured <= jackson bound", bound, measured)],
        artifacts: Artifacts::none().with("poly.json", to_json(&json)),
    })
}

#[derive(Serialize)]
struct DecomposeResult {
    degree_bound: usize,
    r: usize,
    nonzero_terms: usize,
    beta_l1: f64,
    reconstruction_error: f64,
    terms: Vec<TermJson>,
}

fn cmd_decompose(config: &Config, tol: &Tolerances) -> Outcome<Run<DecomposeResult>> {
    let mut rng = fixtures::rng(config.seed);
    let (g, d) = match &config.input {
        Some(path) => {
            let g = read_poly(path)?;
            let d = degree_bound(config, g.degree_bounds().iter().copied().max().unwrap_or(1))?;
            (g, d)
        }
        None => {
            let d = degree_bound(config, 4)?;
            let r = config.vars.unwrap_or(1).max(1);
            (fixtures::random_unit_sup_poly(&vec![d; r + 1], &mut rng), d)
        }
    };
    let dec = decomp::normalize(&decomp::decompose_multivariate(&g, d, tol)?);
    let r = dec.r();
    let beta_l1 = dec.beta_l1();
    let reconstruction_error = sup_error(|x| g.eval(x), |x| dec.eval(x), g.num_vars());
    let mut claims = vec![within("reconstruction error", 1e-8, reconstruction_error)];
    if r == 1 {
        claims.push(within("|beta|_1 <= 2D", decomp::bivariate_beta_bound(d) + 1e-6, beta_l1));
    } else {
        claims.push(within("|beta|_1 <= (2D-1)^r", decomp::provable_beta_bound(d, r) + 1e-6, beta_l1));
        let mut quoted = within("|beta|_1 <= (D+2)^r", decomp::quoted_beta_bound(d, r) + 1e-6, beta_l1);
        quoted.enforced = false;
        claims.push(quoted);
    }
    Ok(Run {
        artifacts: Artifacts::none().with("terms.csv", dec.to_csv()),
        result: DecomposeResult {
            degree_bound: d,
            r,
            nonzero_terms: dec.nonzero_terms(),
            beta_l1,
            reconstruction_error,
            terms: dec.to_json(),
        },
        claims,
    })
}

#[derive(Serialize)]
struct QetReport {
    report: CostReport,
    subnorm_block: f64,
    terms: Vec<TermJson>,
}

fn exact_be(m: &ComplexMatrix, tol: &Tolerances) -> Outcome<BlockEncoding> {
    Ok(BlockEncoding::dilate(m, 1.0, tol)?)
}

fn cmd_qet(config: &Config, tol: &Tolerances) -> Outcome<Run<QetReport>> {
    let mut rng = fixtures::rng(config.seed);
    let m = match &config.input {
        Some(path) => read_matrix(path)?,
        None => fixtures::random_normal(dim(config, 8)?, &mut rng).0,
    };
    let d = degree_bound(config, 4)?;
    let g = transform_poly(config, &[d, d], &mut rng)?;
    let res = qet::qet_normal(&exact_be(&m, tol)?, &g, d, tol)?;
    Ok(Run {
        artifacts: Artifacts::none().with("terms.csv", res.decomposition.to_csv()),
        result: QetReport {
            subnorm_block: res.be.alpha(),
            terms: res.decomposition.to_json(),
            report: res.report,
        },
        claims: res.claims,
    })
}

fn mqet_family(config: &Config, count: usize, rng: &mut fixtures::FixtureRng) -> Outcome<Vec<ComplexMatrix>> {
    if let Some(path) = &config.input {
        return read_matrices(path);
    }
    let n = dim(config, 8)?;
    match config.fixture.as_deref().unwrap_or("commuting") {
        "commuting" => Ok(fixtures::random_commuting_hermitians(n, count, rng).matrices),
        "noncommuting" => (0..count)
            .map(|_| {
                let h = fixtures::random_hermitian(n, rng);
                let norm = matrices::operator_norm(&h)?;
                Ok(h.unscale(norm / 0.9))
            })
            .collect(),
        other => Err(Failure::Usage(format!("unknown fixture {other:?}"))),
    }
}

fn cmd_mqet(config: &Config, tol: &Tolerances) -> Outcome<Run<QetReport>> {
    let mut rng = fixtures::rng(config.seed);
    let r = config.vars.unwrap_or(1);
    if r == 0 {
        return Err(Failure::Usage("--vars must be at least 1".into()));
    }
    let family = mqet_family(config, r + 1, &mut rng)?;
    let bes = family.iter().map(|m| exact_be(m, tol)).collect::<Outcome<Vec<_>>>()?;
    let d = degree_bound(config, 3)?;
    let g = transform_poly(config, &vec![d; bes.len()], &mut rng)?;
    let res = qet::mqet(&bes, &g, d, tol)?;
    Ok(Run {
        artifacts: Artifacts::none().with("terms.csv", res.decomposition.to_csv()),
        result: QetReport {
            subnorm_block: res.be.alpha(),
            terms: res.decomposition.to_json(),
            report: res.report,
        },
        claims: res.claims,
    })
}

#[derive(Serialize)]
struct ExpReport {
    time: f64,
    truncation_degree: usize,
    truncation_bound: f64,
    meets_target: bool,
    report: CostReport,
}

fn cmd_exp(config: &Config, tol: &Tolerances) -> Outcome<Run<ExpReport>> {
    let mut rng = fixtures::rng(config.seed);
    let m = match &config.input {
        Some(path) => read_matrix(path)?,
        None => fixtures::random_normal(dim(config, 4)?, &mut rng).0,
    };
    let t = config.time.unwrap_or(0.5);
    let trunc = degree_bound(config, 16)?;
    let res = qet::exp_normal(&exact_be(&m, tol)?, t, trunc, tol)?;
    let claims = vec![within(
        "eps_measured <= eps_claimed",
        res.report.eps_claimed + qet::MEASURED_SLACK,
        res.eps_measured,
    )];
    Ok(Run {
        result: ExpReport {
            time: t,
            truncation_degree: trunc,
            truncation_bound: res.truncation_bound,
            meets_target: res.meets_target,
            report: res.report,
        },
        claims,
        artifacts: Artifacts::none(),
    })
}

/// 5x⁶y⁴ + 17xy⁸ scaled to unit sup on the square.
fn ntca_example() -> PolyMV {
    let g = PolyMV::from_terms(
        vec![7, 9],
        &[(vec![6, 4], Complex64::new(5.0, 0.0)), (vec![1, 8], Complex64::new(17.0, 0.0))],
    )
    .expect("exponents fit");
    let s = g.sup_norm();
    g.scale(Complex64::new(1.0 / s, 0.0))
}

#[derive(Serialize)]
struct NtcaReport {
    report: CostReport,
    success_probability: f64,
    expected_repetitions: f64,
    state: StateJson,
}

fn cmd_ntca(config: &Config, tol: &Tolerances) -> Outcome<Run<NtcaReport>> {
    let mut rng = fixtures::rng(config.seed);
    let u = match &config.input {
        Some(path) => read_matrix(path)?,
        None => fixtures::random_unitary(dim(config, 4)?, &mut rng),
    };
    let u = PrepareOracle::new(u, tol)?;
    let f = match &config.poly {
        Some(path) => read_poly(path)?,
        None => ntca_example(),
    };
    let d = degree_bound(config, f.degree_bounds().iter().copied().max().unwrap_or(1))?;
    let res = ntca::ntca_transform(&u, &f, d, tol)?;
    let mut claims = res.qet.claims.clone();
    claims.push(within(
        "state error <= eps_claimed",
        res.report.eps_claimed + qet::MEASURED_SLACK,
        res.report.eps_measured,
    ));
    let state = StateJson::from_state(&res.state);
    Ok(Run {
        artifacts: Artifacts::none().with("state.json", to_json(&state)),
        result: NtcaReport {
            report: res.report,
            success_probability: res.success_probability,
            expected_repetitions: res.expected_repetitions,
            state,
        },
        claims,
    })
}

fn emit<T: Serialize>(command: &'static str, config: &Config, run: Outcome<Run<T>>) -> Outcome<u8> {
    let run = run?;
    let failures: Vec<String> = run
        .claims
        .iter()
        .filter(|c| c.enforced && !c.holds)
        .map(|c| c.name.clone())
        .collect();
    #[derive(Serialize)]
    struct WithClaims<T: Serialize> {
        #[serde(flatten)]
        inner: T,
        claims: Vec<Claim>,
    }
    let doc = Document {
        version: VERSION,
        command,
        config,
        status: if failures.is_empty() { "ok" } else { "contract_violation" },
        failures: failures.clone(),
        result: WithClaims {
            inner: run.result,
            claims: run.claims,
        },
    };
    let report = to_json(&doc);
    if let Some(dir) = &config.out {
        let write = |name: &str, contents: &str| {
            fs::write(dir.join(name), contents)
                .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", dir.join(name).display())))
        };
        fs::create_dir_all(dir).map_err(|e| Failure::Usage(format!("cannot create {}: {e}", dir.display())))?;
        write("report.json", &report)?;
        for (name, contents) in &run.artifacts.files {
            write(name, contents)?;
        }
    }
    print!("{report}");
    Ok(if failures.is_empty() { 0 } else { EXIT_CONTRACT })
}

fn dispatch(command: &Command) -> Outcome<u8> {
    let (name, config) = match command {
        Command::Approx(c) => ("approx", c),
        Command::Decompose(c) => ("decompose", c),
        Command::Qet(c) => ("qet", c),
        Command::Mqet(c) => ("mqet", c),
        Command::Exp(c) => ("exp", c),
        Command::Ntca(c) => ("ntca", c),
    };
    let _backend: Backend = config.backend.parse().map_err(|e: Error| Failure::Usage(e.to_string()))?;
    let tol = tolerances(config)?;
    match command {
        Command::Approx(_) => emit(name, config, cmd_approx(config, &tol)),
        Command::Decompose(_) => emit(name, config, cmd_decompose(config, &tol)),
        Command::Qet(_) => emit(name, config, cmd_qet(config, &tol)),
        Command::Mqet(_) => emit(name, config, cmd_mqet(config, &tol)),
        Command::Exp(_) => emit(name, config, cmd_exp(config, &tol)),
        Command::Ntca(_) => emit(name, config, cmd_ntca(config, &tol)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Precondition(e)) => {
            let kind = error_kind(&e);
            let doc = ErrorDocument {
                version: VERSION,
                status: "precondition_failed",
                kind: &kind,
                message: e.to_string(),
            };
            eprint!("{}", to_json(&doc));
            ExitCode::from(EXIT_PRECONDITION)
        }
    }
}
