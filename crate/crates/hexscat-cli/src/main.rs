//! `hexscat` command-line front end.
//!
//! Exit codes: 0 when every check passes, 1 for failed checks or computation
//! errors, 2 for usage errors. Diagnostics go to stderr as one JSON object.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use hexscat::continuation::{self, asymptotic_prediction, deviation, method_gap, zeta, Branch, Prediction};
use hexscat::kernels::{Block, Forward, KernelRequest};
use hexscat::lattice::verify_distance_lemmas;
use hexscat::real::{lift, lower, Mp1024, Mp256, Mp512, Real, C};
use hexscat::resolvent::{r0_auto, r0_quad, r0_series, series_terms_needed, Mat2};
use hexscat::spectral::{load_potential, save_potential, spectrum_grid};
use hexscat::stripping::{reconstruct, Failure, ReconstructionParams, RowReport};
use hexscat::torus::verify_support;
use hexscat::{PotentialField, Site};

#[derive(Parser)]
#[command(name = "hexscat", version, about = "Scattering kernels and layer stripping on the hexagonal lattice")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exhaustive check of the distance inequalities over a box of difference vectors.
    VerifyLattice {
        #[arg(long, default_value_t = 12)]
        radius: i64,
        /// Also write the report as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Frequency support of rˢ, rˢα, rˢᾱ in exact integer arithmetic.
    VerifySupport {
        #[arg(long = "max-s", default_value_t = 8)]
        max_s: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One 2×2 block of the free resolvent.
    R0 {
        #[arg(long = "z-re", allow_hyphen_values = true)]
        z_re: f64,
        #[arg(long = "z-im", allow_hyphen_values = true)]
        z_im: f64,
        #[arg(long, allow_hyphen_values = true)]
        n1: i64,
        #[arg(long, allow_hyphen_values = true)]
        n2: i64,
        #[arg(long, value_enum, default_value_t = R0Method::Auto)]
        method: R0Method,
        /// Quadrature grid; grid doubling to 1e-12 when omitted.
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Continued phase at z = 1 + iN next to its closed-form asymptotics.
    Zeta {
        #[arg(long = "N")]
        n: f64,
        #[arg(long)]
        theta: f64,
        #[arg(long, value_enum, default_value_t = BranchArg::Pos)]
        branch: BranchArg,
        #[arg(long, value_enum, default_value_t = Precision::F64)]
        precision: Precision,
    },
    /// Kernels B₀, B₁ and B = B₀ − B₁ of a potential.
    Forward {
        #[arg(long)]
        potential: PathBuf,
        #[arg(long = "z-re", allow_hyphen_values = true)]
        z_re: f64,
        #[arg(long = "z-im")]
        z_im: f64,
        #[arg(long)]
        theta: f64,
        #[arg(long = "theta-prime")]
        theta_prime: f64,
        #[arg(long, value_parser = parse_block)]
        block: Block,
        #[arg(long, value_enum, default_value_t = Precision::Mp256)]
        precision: Precision,
    },
    /// Layer-stripping round trip against the forward map of a potential file.
    Reconstruct {
        /// Potential whose forward map serves as the data.
        #[arg(long)]
        potential: PathBuf,
        /// Support radius assumed by the reconstruction; defaults to the file's.
        #[arg(long = "M")]
        m: Option<i64>,
        #[arg(long, value_enum, default_value_t = MethodArg::Contour)]
        method: MethodArg,
        /// Ray method: smallest N of the nodes N, 2N, 4N, …
        #[arg(long = "n-base", default_value_t = 1000.0)]
        n_base: f64,
        /// Ray method: number of N nodes; Richardson order is one less.
        #[arg(long, default_value_t = 3)]
        levels: usize,
        /// Contour method: radius of the sampling circle.
        #[arg(long, default_value_t = 8.0)]
        radius: f64,
        /// Contour method: number of equispaced nodes.
        #[arg(long, default_value_t = 40)]
        points: usize,
        /// Number of θ = θ′ samples, log-uniform in t = b₁² over [1.5, 6].
        #[arg(long, default_value_t = 9)]
        thetas: usize,
        #[arg(long, value_enum, default_value_t = Precision::Mp256)]
        precision: Precision,
        /// Largest accepted max-abs recovery error.
        #[arg(long, default_value_t = 1e-2)]
        tolerance: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Grid samples of p(ξ) and |∇p| as CSV; Dirac cells carry grad_norm = -1.
    Spectrum {
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random integer potential, values uniform in [-3, 3] on the l¹ ball.
    GenPotential {
        #[arg(long = "M")]
        m: i64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum R0Method {
    Quad,
    Series,
    Auto,
}

#[derive(Clone, Copy, ValueEnum)]
enum BranchArg {
    Pos,
    Neg,
}

impl From<BranchArg> for Branch {
    fn from(b: BranchArg) -> Branch {
        match b {
            BranchArg::Pos => Branch::Positive,
            BranchArg::Neg => Branch::Negative,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Contour,
    Ray,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Precision {
    F64,
    Mp256,
    Mp512,
    Mp1024,
}

macro_rules! with_precision {
    ($p:expr, $f:ident ( $($a:expr),* )) => {
        match $p {
            Precision::F64 => $f::<f64>($($a),*),
            Precision::Mp256 => $f::<Mp256>($($a),*),
            Precision::Mp512 => $f::<Mp512>($($a),*),
            Precision::Mp1024 => $f::<Mp1024>($($a),*),
        }
    };
}

fn parse_block(s: &str) -> Result<Block, String> {
    s.parse().map_err(|e: hexscat::Error| e.to_string())
}

enum CliError {
    Usage(anyhow::Error),
    Compute(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Compute(e)
    }
}

impl From<hexscat::Error> for CliError {
    fn from(e: hexscat::Error) -> Self {
        CliError::Compute(e.into())
    }
}

fn usage(e: impl Into<anyhow::Error>) -> CliError {
    CliError::Usage(e.into())
}

type CliResult = Result<bool, CliError>;

#[derive(Serialize)]
struct Cx {
    re: f64,
    im: f64,
}

impl From<Complex64> for Cx {
    fn from(z: Complex64) -> Cx {
        Cx { re: z.re, im: z.im }
    }
}

fn cx<T: Real>(z: &C<T>) -> Cx {
    lower(z).into()
}

fn emit<S: Serialize>(v: &S) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out)?;
    Ok(())
}

fn write_json<S: Serialize>(path: &Path, v: &S) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(v)? + "\n";
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("HEXSCAT_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| usage(anyhow!("HEXSCAT_THREADS must be a positive integer, got {v:?}")))?;
        if n == 0 {
            return Err(usage(anyhow!("HEXSCAT_THREADS must be a positive integer")));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Compute(e.into()))?;
    }
    Ok(())
}

fn cmd_verify_lattice(radius: i64, out: Option<PathBuf>) -> CliResult {
    if radius < 1 {
        return Err(usage(anyhow!("--radius must be at least 1")));
    }
    let rep = verify_distance_lemmas(radius);
    println!("{:<44} {:>12} {:>10}  result", "lemma", "checked", "violations");
    for l in &rep.lemmas {
        let verdict = if l.passed() { "pass".to_string() } else { format!("FAIL at {:?}", l.witness) };
        println!("{:<44} {:>12} {:>10}  {}", l.name, l.checked, l.violations, verdict);
    }
    if let Some(p) = out {
        write_json(&p, &rep)?;
    }
    Ok(rep.all_pass())
}

fn cmd_verify_support(max_s: u32, out: Option<PathBuf>) -> CliResult {
    let rep = verify_support(max_s);
    println!("{:>3} {:<10} {:>6} {:>8}  result", "s", "family", "terms", "max_dist");
    for c in &rep.checks {
        let ok = c.violations.is_empty() && c.max_dist <= c.s as i64;
        println!("{:>3} {:<10} {:>6} {:>8}  {}", c.s, c.family, c.terms, c.max_dist, if ok { "pass" } else { "FAIL" });
    }
    if let Some(p) = out {
        write_json(&p, &rep)?;
    }
    Ok(rep.all_pass())
}

#[derive(Serialize)]
struct R0Out {
    z: Cx,
    n: (i64, i64),
    method: &'static str,
    /// Quadrature grid size or number of series terms.
    resolution: usize,
    block: [[Cx; 2]; 2],
}

fn block_out(m: &Mat2<f64>) -> [[Cx; 2]; 2] {
    [[m[0][0].into(), m[0][1].into()], [m[1][0].into(), m[1][1].into()]]
}

fn cmd_r0(z: Complex64, n: Site, method: R0Method, grid: Option<usize>) -> CliResult {
    hexscat::resolvent::check_admissible(z).map_err(usage)?;
    let (m, name, resolution) = match method {
        R0Method::Quad => {
            let (m, k) = match grid {
                Some(k) => (r0_quad(z, n, k).map_err(usage)?, k),
                None => hexscat::resolvent::r0_quad_auto(z, n, 1e-12)?,
            };
            (m, "quad", k)
        }
        R0Method::Series => {
            if z.norm() <= 3.0 {
                return Err(usage(anyhow!("the series needs |z| > 3")));
            }
            let s = series_terms_needed(z.norm(), 1e-15);
            (r0_series(z, n, s)?, "series", s as usize + 1)
        }
        R0Method::Auto => (r0_auto(z, n)?, "auto", 0),
    };
    emit(&R0Out { z: z.into(), n: (n.n1, n.n2), method: name, resolution, block: block_out(&m) })?;
    Ok(true)
}

#[derive(Serialize)]
struct ZetaOut {
    n: f64,
    theta: f64,
    branch: &'static str,
    precision: Precision,
    zeta: [Cx; 2],
    /// Real parts reduced to (−π, π].
    zeta_reduced: [Cx; 2],
    prediction: Prediction,
    deviation: [f64; 4],
    /// Largest gap between the half-angle and arcsin constructions, modulo 4π.
    method_gap: f64,
}

fn reduce(x: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let y = x.rem_euclid(two_pi);
    if y > std::f64::consts::PI {
        y - two_pi
    } else {
        y
    }
}

fn zeta_at<T: Real>(n: f64, theta: f64, branch: Branch, precision: Precision) -> CliResult {
    let z: C<T> = lift(Complex64::new(1.0, n));
    let th = T::from_f64(theta);
    let ang = zeta(&z, &th, branch)?.angles();
    let red = |c: &C<T>| Cx { re: reduce(c.re.to_f64()), im: c.im.to_f64() };
    let out = ZetaOut {
        n,
        theta,
        branch: match branch {
            Branch::Positive => "pos",
            Branch::Negative => "neg",
        },
        precision,
        zeta: [cx(&ang[0]), cx(&ang[1])],
        zeta_reduced: [red(&ang[0]), red(&ang[1])],
        prediction: asymptotic_prediction(n, theta, branch)?,
        deviation: deviation::<T>(n, theta, branch)?,
        method_gap: method_gap(&z, &th, branch)?,
    };
    emit(&out)?;
    Ok(true)
}

fn cmd_zeta(n: f64, theta: f64, branch: Branch, precision: Precision) -> CliResult {
    continuation::check_theta(theta).map_err(usage)?;
    if !(n.is_finite() && n >= 4.0) {
        return Err(usage(anyhow!("--N must be at least 4")));
    }
    with_precision!(precision, zeta_at(n, theta, branch, precision))
}

#[derive(Serialize)]
struct ForwardOut {
    z: Cx,
    theta: f64,
    theta_prime: f64,
    block: Block,
    precision: Precision,
    b0: Cx,
    b1: Cx,
    b: Cx,
}

fn forward_at<T: Real>(q: PotentialField, req: KernelRequest, precision: Precision) -> CliResult {
    let model = Forward::<T>::new(q, req.z.norm());
    let v = model.eval(&req)?;
    emit(&ForwardOut {
        z: req.z.into(),
        theta: req.theta,
        theta_prime: req.theta_prime,
        block: req.block,
        precision,
        b0: cx(&v.b0),
        b1: cx(&v.b1),
        b: cx(&v.total()),
    })?;
    Ok(true)
}

fn cmd_forward(potential: &Path, req: KernelRequest, precision: Precision) -> CliResult {
    let q = load_potential(potential).map_err(usage)?;
    continuation::check_theta(req.theta).map_err(usage)?;
    continuation::check_theta(req.theta_prime).map_err(usage)?;
    hexscat::kernels::check_ray_point(req.z).map_err(usage)?;
    with_precision!(precision, forward_at(q, req, precision))
}

#[derive(Serialize)]
struct ReconstructReport<'a> {
    params: &'a ReconstructionParams,
    precision: Precision,
    complete: bool,
    failure: Option<Failure>,
    max_abs_error: f64,
    tolerance: f64,
    pass: bool,
    rows: Vec<RowReport>,
}

fn reconstruct_at<T: Real>(
    truth: PotentialField,
    params: ReconstructionParams,
    precision: Precision,
    tolerance: f64,
    out: Option<PathBuf>,
    report: Option<PathBuf>,
) -> CliResult {
    let t0 = Instant::now();
    let oracle = Forward::<T>::new(truth.clone(), params.min_abs_z());
    let rec = reconstruct::<T, _>(&oracle, &params)?;
    let err = rec.field.max_abs_diff(&truth);
    let pass = rec.is_complete() && err <= tolerance;
    let rep = ReconstructReport {
        params: &params,
        precision,
        complete: rec.is_complete(),
        failure: rec.failure.clone(),
        max_abs_error: err,
        tolerance,
        pass,
        rows: rec.rows.clone(),
    };
    if let Some(p) = out {
        save_potential(&rec.field, &p)?;
    }
    match report {
        Some(p) => write_json(&p, &rep)?,
        None => emit(&rep)?,
    }
    let elapsed = t0.elapsed().as_secs_f64();
    eprintln!("{}", serde_json::json!({ "max_abs_error": err, "complete": rep.complete, "seconds": elapsed }));
    Ok(pass)
}

#[allow(clippy::too_many_arguments)]
fn cmd_reconstruct(
    potential: &Path,
    m: Option<i64>,
    method: MethodArg,
    n_base: f64,
    levels: usize,
    radius: f64,
    points: usize,
    thetas: usize,
    precision: Precision,
    tolerance: f64,
    out: Option<PathBuf>,
    report: Option<PathBuf>,
) -> CliResult {
    let truth = load_potential(potential).map_err(usage)?;
    let m = m.unwrap_or(truth.radius());
    if let Some((n, _)) = truth.iter().find(|(n, _)| n.l1() > m) {
        return Err(usage(anyhow!("potential has site ({}, {}) outside radius --M {m}", n.n1, n.n2)));
    }
    let mut params = match method {
        MethodArg::Contour => ReconstructionParams::contour(m, radius, points, thetas),
        MethodArg::Ray => ReconstructionParams::geometric(m, n_base, levels, thetas),
    }
    .map_err(usage)?;
    params.tolerance = tolerance;
    params.validate().map_err(usage)?;
    with_precision!(precision, reconstruct_at(truth, params, precision, tolerance, out, report))
}

fn cmd_spectrum(grid: usize, out: Option<PathBuf>) -> CliResult {
    if grid < 16 {
        return Err(usage(anyhow!("--grid must be at least 16")));
    }
    let samples = spectrum_grid(grid);
    let mut text = String::from("xi1,xi2,p,grad_norm\n");
    for s in &samples {
        text += &format!("{},{},{},{}\n", s.xi1, s.xi2, s.p, s.grad_norm.unwrap_or(-1.0));
    }
    match out {
        Some(p) => std::fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(true)
}

fn cmd_gen_potential(m: i64, seed: u64, out: Option<PathBuf>) -> CliResult {
    if m < 0 {
        return Err(usage(anyhow!("--M must be nonnegative")));
    }
    let q = PotentialField::random(m, seed);
    match out {
        Some(p) => save_potential(&q, &p)?,
        None => println!("{}", q.to_json()),
    }
    Ok(true)
}

fn run(cli: Cli) -> CliResult {
    configure_threads()?;
    match cli.cmd {
        Cmd::VerifyLattice { radius, out } => cmd_verify_lattice(radius, out),
        Cmd::VerifySupport { max_s, out } => cmd_verify_support(max_s, out),
        Cmd::R0 { z_re, z_im, n1, n2, method, grid } => cmd_r0(Complex64::new(z_re, z_im), Site::new(n1, n2), method, grid),
        Cmd::Zeta { n, theta, branch, precision } => cmd_zeta(n, theta, branch.into(), precision),
        Cmd::Forward { potential, z_re, z_im, theta, theta_prime, block, precision } => {
            let req = KernelRequest { z: Complex64::new(z_re, z_im), theta, theta_prime, block };
            cmd_forward(&potential, req, precision)
        }
        Cmd::Reconstruct {
            potential,
            m,
            method,
            n_base,
            levels,
            radius,
            points,
            thetas,
            precision,
            tolerance,
            out,
            report,
        } => cmd_reconstruct(&potential, m, method, n_base, levels, radius, points, thetas, precision, tolerance, out, report),
        Cmd::Spectrum { grid, out } => cmd_spectrum(grid, out),
        Cmd::GenPotential { m, seed, out } => cmd_gen_potential(m, seed, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Usage(e)) => {
            eprintln!("{}", serde_json::json!({ "error": "usage", "message": format!("{e:#}") }));
            ExitCode::from(2)
        }
        Err(CliError::Compute(e)) => {
            eprintln!("{}", serde_json::json!({ "error": "computation", "message": format!("{e:#}") }));
            ExitCode::from(1)
        }
    }
}
