//! `lpmink`: solve discrete L_p Minkowski problems, verify the closed-form
//! examples, tabulate transferred densities and run regularity diagnostics.
//!
//! Exit codes: 0 success, 2 non-convergence (partial result still written),
//! 64 invalid input, 70 internal invariant failure.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use lpmink::closed_forms::{FacetOrigin, Grid, VanishingLine};
use lpmink::convex::Polytope;
use lpmink::diagnostics::{diagnose, OriginLocation, Status};
use lpmink::geom::dot;
use lpmink::monge_ampere::{tangent_frame, transfer_density};
use lpmink::solver::{solve, LpProblem, Scheme, SolveOptions, SolveResult};
use lpmink::{selftest, Error, Exec};

use output::{csv, csv_path, emit, json, write_atomic};

const EXIT_NONCONVERGED: u8 = 2;
const EXIT_INPUT: u8 = 64;
const EXIT_INTERNAL: u8 = 70;

#[derive(Parser)]
#[command(name = "lpmink", version, about = "Discrete L_p Minkowski problems for p < 1")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a problem `{"dim", "p", "atoms": [{"u", "f"}]}`.
    Solve {
        #[arg(long)]
        input: PathBuf,
        /// Result JSON; the residual CSV goes next to it.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 500)]
        max_iter: usize,
        #[arg(long, default_value_t = 1.0)]
        damping: f64,
        #[arg(long, value_enum, default_value_t = SchemeArg::Newton)]
        scheme: SchemeArg,
    },
    /// Sweep one of the closed-form examples.
    VerifyExample {
        #[arg(value_enum)]
        example: Example,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.5)]
        p: f64,
        /// Only used by ex32.
        #[arg(long, default_value_t = 0.05)]
        beta: f64,
        /// Samples per axis.
        #[arg(long, default_value_t = 200)]
        grid: usize,
        /// Report JSON; the sweep CSV goes next to it.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Regularity report for a polytope, a vertex cloud or a solver result.
    Diagnose {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
        p: f64,
        /// Problem whose residuals are evaluated on the body.
        #[arg(long)]
        problem: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Tabulate the density transferred to the tangent plane at `e`.
    Transfer {
        /// `{"e", "p", "f"}`; without it `f ≡ 1` and `e` is the last axis.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
        p: f64,
        /// Samples per axis over `[-1, 1]^(n-1)`.
        #[arg(long, default_value_t = 21)]
        grid: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the invariant suite under five consecutive seeds.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Newton,
    FixedPoint,
}

#[derive(Clone, Copy, ValueEnum)]
enum Example {
    Ex32,
    Ex42,
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INPUT, message: message.into() }
    }

    fn internal(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INTERNAL, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Singular(_) => Failure::internal(e.to_string()),
            _ => Failure::input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::internal(format!("i/o error: {e}"))
    }
}

type Outcome = Result<u8, Failure>;

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn positive(name: &str, x: f64) -> Result<(), Failure> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Failure::input(format!("--{name} must be positive, got {x}")))
    }
}

fn run_solve(
    input: &Path,
    output: Option<&Path>,
    opts: SolveOptions,
) -> Outcome {
    positive("tol", opts.tol)?;
    if !(opts.damping > 0.0 && opts.damping <= 1.0) {
        return Err(Failure::input(format!("--damping must lie in (0, 1], got {}", opts.damping)));
    }
    let problem: LpProblem = read_json(input)?;
    let res = solve(&problem, &opts)?;
    emit(output, &json(&res))?;
    if let Some(out) = output {
        write_atomic(&csv_path(out), residual_csv(&problem, &res).as_bytes())?;
    }
    eprintln!(
        "{} after {} iterations, max residual {:.3e}",
        if res.converged { "converged" } else { "not converged" },
        res.iterations,
        res.max_residual
    );
    Ok(if res.converged { 0 } else { EXIT_NONCONVERGED })
}

fn residual_csv(problem: &LpProblem, res: &SolveResult) -> String {
    let n = problem.dim();
    let mut header = vec!["index".to_string()];
    header.extend((1..=n).map(|k| format!("u{k}")));
    header.extend(["f", "h", "residual"].map(String::from));
    let rows = (0..problem.normals().len()).map(|i| {
        let mut row = vec![i as f64];
        row.extend(&problem.normals()[i]);
        row.extend([problem.targets()[i], res.h[i], res.residuals[i]]);
        row
    });
    csv(&header, rows)
}

fn run_verify(example: Example, n: usize, p: f64, beta: f64, grid: usize, output: Option<&Path>) -> Outcome {
    if grid < 2 {
        return Err(Failure::input("--grid must be at least 2"));
    }
    let (report, table) = match example {
        Example::Ex32 => {
            let v = VanishingLine::new(n, p, beta)?;
            let rep = v.verify(&Grid { n_x1: grid, n_r: grid, r_min: 1e-4 }, Exec::default())?;
            let header = ["x1", "r", "value", "det", "residual"].map(String::from);
            let table = csv(&header, rep.rows.iter().map(|r| vec![r.x1, r.r, r.value, r.det, r.residual]));
            eprintln!(
                "convex: {}, residual in [{:.6e}, {:.6e}], sup/inf {:.3e}",
                rep.convex, rep.inf_residual, rep.sup_residual, rep.ratio
            );
            (json(&rep), table)
        }
        Example::Ex42 => {
            let v = FacetOrigin::new(n, p)?;
            let rep = v.verify(grid, 1e-6, Exec::default())?;
            let header = ["z", "value", "det", "residual"].map(String::from);
            let table = csv(&header, rep.rows.iter().map(|r| vec![r.z, r.value, r.det, r.residual]));
            eprintln!(
                "v(0) = {}, residual in [{:.6e}, {:.6e}], limit {:.10e}",
                rep.value_at_origin, rep.inf_residual, rep.sup_residual, rep.limit_constant
            );
            (json(&rep), table)
        }
    };
    emit(output, &report)?;
    if let Some(out) = output {
        write_atomic(&csv_path(out), table.as_bytes())?;
    }
    Ok(0)
}

fn read_body(path: &Path) -> Result<Polytope, Failure> {
    let value: serde_json::Value = read_json(path)?;
    let parse = |v: serde_json::Value| {
        serde_json::from_value::<Polytope>(v).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
    };
    if let Some(p) = value.get("polytope") {
        return parse(p.clone());
    }
    if value.get("facets").is_some() {
        return parse(value);
    }
    #[derive(Deserialize)]
    struct Cloud {
        dim: usize,
        vertices: Vec<Vec<f64>>,
    }
    let cloud: Cloud = serde_json::from_value(value).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    Ok(Polytope::from_vertices(cloud.dim, &cloud.vertices)?)
}

fn run_diagnose(input: &Path, p: f64, problem: Option<&Path>, output: Option<&Path>) -> Outcome {
    let body = read_body(input)?;
    let problem: Option<LpProblem> = problem.map(read_json).transpose()?;
    let rep = diagnose(&body, p, problem.as_ref())?;
    if let Some(out) = output {
        write_atomic(out, json(&rep).as_bytes())?;
    }
    let origin = match &rep.origin_location {
        OriginLocation::Interior => "interior".to_string(),
        OriginLocation::Boundary { face } => format!("boundary (face of dimension {})", face.dim),
    };
    println!("{:<34} {}", "origin", origin);
    println!("{:<34} {}", "dim N(K,o)", rep.origin_cone_dim);
    println!("{:<34} {}", "zero set null", rep.zero_set_null);
    println!("{:<34} {} (mass {:.12e})", "origin faces null", rep.origin_faces_null, rep.origin_face_mass);
    println!("{:<34} {} faces, mass {:.12e}", "X0", rep.x0.len(), rep.x0_mass);
    println!("{:<34} {} vertices, {} edges", "non-smooth", rep.non_smooth_vertices, rep.non_smooth_edges);
    if let Some(res) = &rep.positive_part_residuals {
        let worst = res.iter().flatten().map(|r| r.abs()).fold(0.0, f64::max);
        let skipped = res.iter().filter(|r| r.is_none()).count();
        println!("{:<34} {:.3e} ({} atoms with h = 0 skipped)", "max residual on {h > 0}", worst, skipped);
    }
    println!();
    for v in &rep.verdicts {
        let status = match v.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::NotApplicable => "n/a",
            Status::Undecided => "undecided",
        };
        println!("{:<40} {:<10} {}", v.name, status, v.note);
    }
    Ok(0)
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum SphereDensity {
    Constant { value: f64 },
    /// `c + ⟨w, x⟩`.
    Affine { c: f64, w: Vec<f64> },
}

impl SphereDensity {
    fn eval(&self, x: &[f64]) -> f64 {
        match self {
            SphereDensity::Constant { value } => *value,
            SphereDensity::Affine { c, w } => c + dot(w, x),
        }
    }
}

#[derive(Deserialize)]
struct TransferSpec {
    e: Vec<f64>,
    p: f64,
    f: SphereDensity,
}

fn run_transfer(input: Option<&Path>, n: usize, p: f64, grid: usize, output: Option<&Path>) -> Outcome {
    let spec = match input {
        Some(path) => read_json(path)?,
        None => {
            if !(2..=16).contains(&n) {
                return Err(Failure::input("--n must lie in 2..=16"));
            }
            let mut e = vec![0.0; n];
            e[n - 1] = 1.0;
            TransferSpec { e, p, f: SphereDensity::Constant { value: 1.0 } }
        }
    };
    if let SphereDensity::Affine { w, .. } = &spec.f {
        if w.len() != spec.e.len() {
            return Err(Failure::input("f.w must have the dimension of e"));
        }
    }
    if grid < 2 {
        return Err(Failure::input("--grid must be at least 2"));
    }
    let frame = tangent_frame(&spec.e)?;
    let d = frame.len();
    let axis: Vec<f64> = (0..grid).map(|i| -1.0 + 2.0 * i as f64 / (grid - 1) as f64).collect();
    let total = grid.checked_pow(d as u32).filter(|t| *t <= 10_000_000).ok_or_else(|| Failure::input("grid too large"))?;
    let mut rows = Vec::with_capacity(total);
    for k in 0..total {
        let mut rem = k;
        let mut y = vec![0.0; d];
        for c in (0..d).rev() {
            y[c] = axis[rem % grid];
            rem /= grid;
        }
        let mut amb = vec![0.0; spec.e.len()];
        for (yc, b) in y.iter().zip(&frame) {
            for (a, bj) in amb.iter_mut().zip(b) {
                *a += yc * bj;
            }
        }
        let g = transfer_density(|x| spec.f.eval(x), spec.p, &spec.e, &amb)?;
        y.push(g);
        rows.push(y);
    }
    let mut header: Vec<String> = (1..=d).map(|k| format!("y{k}")).collect();
    header.push("g".into());
    emit(output, &csv(&header, rows))?;
    Ok(0)
}

fn run_selftest(seed: u64, output: Option<&Path>) -> Outcome {
    let seeds: Vec<u64> = (seed..seed + 5).collect();
    let rep = selftest::run(&seeds, Exec::default());
    for c in &rep.checks {
        println!(
            "{} {:<22} seed {:<6} worst {:.3e} tol {:.1e}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.seed,
            c.worst,
            c.tol
        );
    }
    if let Some(out) = output {
        write_atomic(out, json(&rep).as_bytes())?;
    }
    Ok(if rep.pass { 0 } else { EXIT_INTERNAL })
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Solve { input, output, tol, max_iter, damping, scheme } => {
            let scheme = match scheme {
                SchemeArg::Newton => Scheme::Newton,
                SchemeArg::FixedPoint => Scheme::FixedPoint,
            };
            let opts = SolveOptions { tol, max_iter, damping, scheme, ..SolveOptions::default() };
            run_solve(&input, output.as_deref(), opts)
        }
        Command::VerifyExample { example, n, p, beta, grid, output } => {
            run_verify(example, n, p, beta, grid, output.as_deref())
        }
        Command::Diagnose { input, p, problem, output } => {
            run_diagnose(&input, p, problem.as_deref(), output.as_deref())
        }
        Command::Transfer { input, n, p, grid, output } => run_transfer(input.as_deref(), n, p, grid, output.as_deref()),
        Command::Selftest { seed, output } => run_selftest(seed, output.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
