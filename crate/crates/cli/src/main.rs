//! Command-line surface: validate and classify couplings, tabulate the
//! approximation schedules, evaluate kernels, run Hilbert-Schmidt
//! convergence sweeps to CSV, and run the verification battery.

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use stargreen::convergence::{
    convergence_record_at, fit_loglog, ConvergenceRecord, QuadratureConfig,
};
use stargreen::coupling::{
    CouplingClass, CouplingError, CouplingFamily, VertexCoupling, DEFAULT_TOL_CLASS,
    DEFAULT_TOL_UNITARY,
};
use stargreen::kernels::{
    approx_complement_kernel, approx_scalar_kernel, delta_vertex_kernel, dirichlet_kernel,
    target_complement_kernel, target_scalar_kernel, KernelQuery, KernelValue, SpectralParameter,
};
use stargreen::schedule::{schedule_point, ScheduleConfig, SchedulePoint};
use stargreen::stargraph::{full_approx_kernel, full_target_kernel, MatrixKernelValue};
use stargreen::verify::{run_battery, Suite};

/// Edge-count cap for the CLI; the library itself imposes none.
const MAX_EDGES: u32 = 64;

#[derive(Parser)]
#[command(
    name = "stargreen",
    version,
    about = "Star-graph vertex couplings: schedules, Green-function kernels, convergence sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a coupling and print its classification
    Validate(ValidateArgs),
    /// Print the approximation strengths u(d), v(d) for one distance
    Schedule(ScheduleArgs),
    /// Evaluate a Green-function kernel at one point
    Kernel(KernelArgs),
    /// Run a Hilbert-Schmidt convergence sweep and write CSV
    Sweep(SweepArgs),
    /// Run the verification battery
    Verify(VerifyArgs),
}

#[derive(Args, Clone)]
struct CouplingFlags {
    /// Number of edges at the vertex
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    a_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    a_im: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    b_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    b_im: Option<f64>,
    /// Named coupling family (alternative to raw a, b)
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    /// Family parameter for delta and delta_p
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Family parameter for delta_prime_s and delta_prime
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FamilyArg {
    #[value(name = "delta")]
    Delta,
    #[value(name = "delta_prime_s")]
    DeltaPrimeS,
    #[value(name = "delta_prime")]
    DeltaPrime,
    #[value(name = "delta_p")]
    DeltaP,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    coupling: CouplingFlags,
    /// Unitarity tolerance
    #[arg(long, default_value_t = DEFAULT_TOL_UNITARY)]
    tol: f64,
}

#[derive(Args)]
struct ScheduleArgs {
    #[command(flatten)]
    coupling: CouplingFlags,
    /// Distance of the edge interactions from the vertex
    #[arg(long)]
    d: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    zeta: f64,
    #[arg(long, default_value_t = 3.0)]
    nu: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum KernelType {
    #[value(name = "dirichlet")]
    Dirichlet,
    #[value(name = "target_complement")]
    TargetComplement,
    #[value(name = "target_scalar")]
    TargetScalar,
    #[value(name = "delta_vertex")]
    DeltaVertex,
    #[value(name = "approx_complement")]
    ApproxComplement,
    #[value(name = "approx_scalar")]
    ApproxScalar,
    #[value(name = "full_target")]
    FullTarget,
    #[value(name = "full_approx")]
    FullApprox,
}

#[derive(Args)]
struct KernelArgs {
    #[arg(long = "type", value_enum)]
    kernel_type: KernelType,
    #[arg(long)]
    kappa_re: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    kappa_im: f64,
    #[arg(long)]
    x: f64,
    #[arg(long)]
    y: f64,
    #[command(flatten)]
    coupling: CouplingFlags,
    /// Vertex delta strength (delta_vertex, approx kernels without coupling)
    #[arg(long, allow_hyphen_values = true)]
    u: Option<f64>,
    /// Edge delta strength (approx kernels without coupling)
    #[arg(long, allow_hyphen_values = true)]
    v: Option<f64>,
    /// Edge interaction distance (approx kernels)
    #[arg(long)]
    d: Option<f64>,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    zeta: f64,
    #[arg(long, default_value_t = 3.0)]
    nu: f64,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    coupling: CouplingFlags,
    #[arg(long)]
    kappa_re: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    kappa_im: f64,
    /// Largest distance of the geometric grid
    #[arg(long)]
    d_start: f64,
    /// Smallest distance of the geometric grid
    #[arg(long)]
    d_end: f64,
    /// Number of grid points (log-spaced)
    #[arg(long, value_parser = clap::value_parser!(u32).range(4..=400))]
    points: u32,
    /// Output CSV path
    #[arg(long)]
    out: std::path::PathBuf,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    zeta: f64,
    #[arg(long, default_value_t = 3.0)]
    nu: f64,
    /// Gauss nodes per quadrature panel
    #[arg(long, default_value_t = 20)]
    panel_order: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SuiteArg {
    Fast,
    Full,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: SuiteArg,
}

// ---------------------------------------------------------------------------
// Deterministic output formatting: 17 significant digits, '.' separator.
// ---------------------------------------------------------------------------

fn fmt_f(x: f64) -> String {
    if x.is_nan() {
        return "NaN".to_string();
    }
    format!("{x:.16e}")
}

fn json_complex(z: Complex64) -> String {
    format!("{{\"re\":{},\"im\":{}}}", fmt_f(z.re), fmt_f(z.im))
}

fn json_matrix(m: &[Vec<Complex64>]) -> String {
    let rows: Vec<String> = m
        .iter()
        .map(|row| {
            let cells: Vec<String> = row.iter().map(|z| json_complex(*z)).collect();
            format!("[{}]", cells.join(","))
        })
        .collect();
    format!("[{}]", rows.join(","))
}

fn emit_error(name: &str, message: &str) {
    println!(
        "{{\"status\":\"error\",\"error\":\"{name}\",\"message\":\"{}\"}}",
        message.replace('"', "'")
    );
}

/// Usage-level failure: wrong or missing flag combinations.
fn usage_error(message: &str) -> ExitCode {
    emit_error("BadUsage", message);
    ExitCode::from(2)
}

// ---------------------------------------------------------------------------
// Flag resolution
// ---------------------------------------------------------------------------

enum ResolvedCoupling {
    Ok(VertexCoupling, CouplingClass),
    Invalid {
        violations: Vec<String>,
        class: CouplingClass,
    },
    Usage(String),
    BadEdgeCount(u32),
}

fn resolve_coupling(flags: &CouplingFlags, tol: f64) -> ResolvedCoupling {
    let n = match flags.n {
        Some(n) => n,
        None => return ResolvedCoupling::Usage("--n is required".into()),
    };
    if !(2..=MAX_EDGES).contains(&n) {
        return ResolvedCoupling::BadEdgeCount(n);
    }
    let (a, b) = if let Some(family) = flags.family {
        let family = match family {
            FamilyArg::Delta => CouplingFamily::Delta {
                alpha: match flags.alpha {
                    Some(v) => v,
                    None => return ResolvedCoupling::Usage("--family delta needs --alpha".into()),
                },
            },
            FamilyArg::DeltaP => CouplingFamily::DeltaP {
                alpha: match flags.alpha {
                    Some(v) => v,
                    None => {
                        return ResolvedCoupling::Usage("--family delta_p needs --alpha".into())
                    }
                },
            },
            FamilyArg::DeltaPrimeS => CouplingFamily::DeltaPrimeS {
                beta: match flags.beta {
                    Some(v) => v,
                    None => {
                        return ResolvedCoupling::Usage(
                            "--family delta_prime_s needs --beta".into(),
                        )
                    }
                },
            },
            FamilyArg::DeltaPrime => CouplingFamily::DeltaPrime {
                beta: match flags.beta {
                    Some(v) => v,
                    None => {
                        return ResolvedCoupling::Usage("--family delta_prime needs --beta".into())
                    }
                },
            },
        };
        family.parameters(n)
    } else {
        match (flags.a_re, flags.a_im, flags.b_re, flags.b_im) {
            (Some(ar), Some(ai), Some(br), Some(bi)) => {
                (Complex64::new(ar, ai), Complex64::new(br, bi))
            }
            _ => {
                return ResolvedCoupling::Usage(
                    "provide --family with its parameter, or all of --a-re --a-im --b-re --b-im"
                        .into(),
                )
            }
        }
    };
    match VertexCoupling::new(n, a, b, tol) {
        Ok(vc) => {
            let class = vc.classify(DEFAULT_TOL_CLASS);
            ResolvedCoupling::Ok(vc, class)
        }
        Err(CouplingError::BadEdgeCount { n }) => ResolvedCoupling::BadEdgeCount(n),
        Err(err) => {
            // classify anyway for the report; validation is bypassed
            let class = VertexCoupling::new(n, a, b, f64::INFINITY)
                .map(|vc| vc.classify(DEFAULT_TOL_CLASS))
                .unwrap_or(CouplingClass::Generic);
            ResolvedCoupling::Invalid {
                violations: vec![err.to_string()],
                class,
            }
        }
    }
}

fn spectral(kappa_re: f64, kappa_im: f64) -> Result<SpectralParameter, String> {
    SpectralParameter::new(Complex64::new(kappa_re, kappa_im)).map_err(|e| e.to_string())
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn family_tag(f: FamilyArg) -> &'static str {
    match f {
        FamilyArg::Delta => "delta",
        FamilyArg::DeltaPrimeS => "delta_prime_s",
        FamilyArg::DeltaPrime => "delta_prime",
        FamilyArg::DeltaP => "delta_p",
    }
}

fn cmd_validate(args: &ValidateArgs) -> ExitCode {
    // informational sub-label when the coupling came from a named family
    let family_field = args
        .coupling
        .family
        .map(|f| format!(",\"family\":\"{}\"", family_tag(f)))
        .unwrap_or_default();
    match resolve_coupling(&args.coupling, args.tol) {
        ResolvedCoupling::Ok(_, class) => {
            println!(
                "{{\"status\":\"ok\",\"valid\":true,\"class\":\"{}\"{},\"violations\":[]}}",
                class.tag(),
                family_field
            );
            ExitCode::SUCCESS
        }
        ResolvedCoupling::Invalid { violations, class } => {
            let list: Vec<String> = violations
                .iter()
                .map(|v| format!("\"{}\"", v.replace('"', "'")))
                .collect();
            println!(
                "{{\"status\":\"ok\",\"valid\":false,\"class\":\"{}\",\"violations\":[{}]}}",
                class.tag(),
                list.join(",")
            );
            ExitCode::from(1)
        }
        ResolvedCoupling::BadEdgeCount(n) => {
            emit_error(
                "BadEdgeCount",
                &format!("edge count must be between 2 and {MAX_EDGES}, got {n}"),
            );
            ExitCode::from(2)
        }
        ResolvedCoupling::Usage(msg) => usage_error(&msg),
    }
}

fn cmd_schedule(args: &ScheduleArgs) -> ExitCode {
    let vc = match resolve_coupling(&args.coupling, DEFAULT_TOL_UNITARY) {
        ResolvedCoupling::Ok(vc, _) => vc,
        ResolvedCoupling::Invalid { violations, .. } => {
            emit_error("ConstraintViolated", &violations.join("; "));
            return ExitCode::from(1);
        }
        ResolvedCoupling::BadEdgeCount(n) => {
            emit_error("BadEdgeCount", &format!("invalid edge count {n}"));
            return ExitCode::from(2);
        }
        ResolvedCoupling::Usage(msg) => return usage_error(&msg),
    };
    let cfg = match ScheduleConfig::new(args.zeta, args.nu) {
        Ok(cfg) => cfg,
        Err(e) => return usage_error(&e.to_string()),
    };
    match schedule_point(&vc, args.d, &cfg) {
        Ok(sp) => {
            let branch = vc.classify(DEFAULT_TOL_CLASS).schedule_branch();
            println!(
                "{{\"status\":\"ok\",\"d\":{},\"u\":{},\"v\":{},\"branch\":\"{}\"}}",
                fmt_f(sp.d),
                fmt_f(sp.u),
                fmt_f(sp.v),
                branch.tag()
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            emit_error(schedule_error_name(&e), &e.to_string());
            ExitCode::from(1)
        }
    }
}

fn schedule_error_name(e: &stargreen::schedule::ScheduleError) -> &'static str {
    use stargreen::schedule::ScheduleError::*;
    match e {
        ExcludedCoupling { .. } => "ExcludedCoupling",
        NonPositiveDistance { .. } => "NonPositiveDistance",
        DegenerateBracket { .. } => "DegenerateBracket",
        NonRealStrength { .. } => "NonRealStrength",
        InvalidConfig { .. } => "InvalidConfig",
    }
}

fn kernel_error_name(e: &stargreen::kernels::KernelError) -> &'static str {
    use stargreen::kernels::KernelError::*;
    match e {
        SingularDenominator { .. } => "SingularDenominator",
        InvalidQuery { .. } => "InvalidQuery",
    }
}

fn print_scalar_kernel(kv: KernelValue) -> ExitCode {
    println!(
        "{{\"status\":\"ok\",\"g\":{},\"dg_dx\":{},\"underflowed\":{}}}",
        json_complex(kv.g),
        json_complex(kv.dg_dx),
        kv.underflowed
    );
    ExitCode::SUCCESS
}

fn print_matrix_kernel(mk: MatrixKernelValue) -> ExitCode {
    println!(
        "{{\"status\":\"ok\",\"n\":{},\"entries\":{},\"d_entries\":{},\"underflowed\":{}}}",
        mk.n(),
        json_matrix(&mk.entries),
        json_matrix(&mk.d_entries),
        mk.underflowed
    );
    ExitCode::SUCCESS
}

fn cmd_kernel(args: &KernelArgs) -> ExitCode {
    let kappa = match spectral(args.kappa_re, args.kappa_im) {
        Ok(k) => k,
        Err(msg) => return usage_error(&msg),
    };
    let query = match KernelQuery::new(kappa, args.x, args.y) {
        Ok(q) => q,
        Err(e) => return usage_error(&e.to_string()),
    };

    let coupling = || match resolve_coupling(&args.coupling, DEFAULT_TOL_UNITARY) {
        ResolvedCoupling::Ok(vc, _) => Ok(vc),
        ResolvedCoupling::Invalid { violations, .. } => Err((1u8, violations.join("; "))),
        ResolvedCoupling::BadEdgeCount(n) => Err((2u8, format!("invalid edge count {n}"))),
        ResolvedCoupling::Usage(msg) => Err((2u8, msg)),
    };
    let schedule_for = |vc: Option<&VertexCoupling>| -> Result<SchedulePoint, (u8, String)> {
        let d = args
            .d
            .ok_or((2u8, "--d is required for approximating kernels".to_string()))?;
        match (args.u, args.v) {
            (Some(u), Some(v)) => Ok(SchedulePoint { d, u, v }),
            _ => {
                let vc = vc.ok_or((
                    2u8,
                    "give --u and --v explicitly, or coupling flags to derive them".to_string(),
                ))?;
                let cfg =
                    ScheduleConfig::new(args.zeta, args.nu).map_err(|e| (2u8, e.to_string()))?;
                schedule_point(vc, d, &cfg).map_err(|e| (1u8, e.to_string()))
            }
        }
    };

    let fail = |code: u8, name: &str, msg: &str| -> ExitCode {
        emit_error(name, msg);
        ExitCode::from(code)
    };

    match args.kernel_type {
        KernelType::Dirichlet => print_scalar_kernel(dirichlet_kernel(&query)),
        KernelType::TargetComplement => {
            let a = match (args.coupling.a_re, args.coupling.a_im) {
                (Some(re), Some(im)) => Complex64::new(re, im),
                _ => match coupling() {
                    Ok(vc) => vc.a(),
                    Err((code, msg)) => return fail(code, "BadUsage", &msg),
                },
            };
            match target_complement_kernel(a, &query) {
                Ok(kv) => print_scalar_kernel(kv),
                Err(e) => fail(1, kernel_error_name(&e), &e.to_string()),
            }
        }
        KernelType::TargetScalar => match coupling() {
            Ok(vc) => match target_scalar_kernel(vc.a(), vc.b(), vc.n(), &query) {
                Ok(kv) => print_scalar_kernel(kv),
                Err(e) => fail(1, kernel_error_name(&e), &e.to_string()),
            },
            Err((code, msg)) => fail(code, "BadUsage", &msg),
        },
        KernelType::DeltaVertex => {
            let (u, n) = match (args.u, args.coupling.n) {
                (Some(u), Some(n)) if (2..=MAX_EDGES).contains(&n) => (u, n),
                _ => return usage_error("delta_vertex needs --u and --n (2..=64)"),
            };
            match delta_vertex_kernel(u, n, &query) {
                Ok(kv) => print_scalar_kernel(kv),
                Err(e) => fail(1, kernel_error_name(&e), &e.to_string()),
            }
        }
        KernelType::ApproxComplement => {
            let vc = coupling().ok();
            match schedule_for(vc.as_ref()) {
                Ok(sp) => match approx_complement_kernel(&sp, &query) {
                    Ok(kv) => print_scalar_kernel(kv),
                    Err(e) => fail(1, kernel_error_name(&e), &e.to_string()),
                },
                Err((code, msg)) => fail(code, "BadUsage", &msg),
            }
        }
        KernelType::ApproxScalar => {
            let vc = coupling().ok();
            let n = match (args.coupling.n, &vc) {
                (Some(n), _) if (2..=MAX_EDGES).contains(&n) => n,
                (_, Some(vc)) => vc.n(),
                _ => return usage_error("approx_scalar needs --n"),
            };
            match schedule_for(vc.as_ref()) {
                Ok(sp) => match approx_scalar_kernel(&sp, n, &query) {
                    Ok(kv) => print_scalar_kernel(kv),
                    Err(e) => fail(1, kernel_error_name(&e), &e.to_string()),
                },
                Err((code, msg)) => fail(code, "BadUsage", &msg),
            }
        }
        KernelType::FullTarget => match coupling() {
            Ok(vc) => match full_target_kernel(&vc, &query) {
                Ok(mk) => print_matrix_kernel(mk),
                Err(e) => fail(1, "StargraphError", &e.to_string()),
            },
            Err((code, msg)) => fail(code, "BadUsage", &msg),
        },
        KernelType::FullApprox => match coupling() {
            Ok(vc) => match schedule_for(Some(&vc)) {
                Ok(sp) => match full_approx_kernel(&vc, &sp, &query) {
                    Ok(mk) => print_matrix_kernel(mk),
                    Err(e) => fail(1, "StargraphError", &e.to_string()),
                },
                Err((code, msg)) => fail(code, "BadUsage", &msg),
            },
            Err((code, msg)) => fail(code, "BadUsage", &msg),
        },
    }
}

fn cmd_sweep(args: &SweepArgs) -> ExitCode {
    let vc = match resolve_coupling(&args.coupling, DEFAULT_TOL_UNITARY) {
        ResolvedCoupling::Ok(vc, _) => vc,
        ResolvedCoupling::Invalid { violations, .. } => {
            emit_error("ConstraintViolated", &violations.join("; "));
            return ExitCode::from(1);
        }
        ResolvedCoupling::BadEdgeCount(n) => {
            emit_error("BadEdgeCount", &format!("invalid edge count {n}"));
            return ExitCode::from(2);
        }
        ResolvedCoupling::Usage(msg) => return usage_error(&msg),
    };
    let kappa = match spectral(args.kappa_re, args.kappa_im) {
        Ok(k) => k,
        Err(msg) => return usage_error(&msg),
    };
    if !(args.d_start > args.d_end && args.d_end > 0.0) {
        return usage_error("need --d-start > --d-end > 0 (geometric grid)");
    }
    let scfg = match ScheduleConfig::new(args.zeta, args.nu) {
        Ok(cfg) => cfg,
        Err(e) => return usage_error(&e.to_string()),
    };
    let qcfg = match QuadratureConfig::new(args.panel_order, 40.0, 16) {
        Ok(cfg) => cfg,
        Err(e) => return usage_error(&e.to_string()),
    };

    let points = args.points as usize;
    let ratio = (args.d_end / args.d_start).powf(1.0 / (points as f64 - 1.0));
    let grid: Vec<f64> = (0..points)
        .map(|i| args.d_start * ratio.powi(i as i32))
        .collect();

    let mut csv =
        String::from("d,u,v,hs_sq_scalar,hs_sq_complement,hs_sq_total,fit_slope_running\n");
    let mut records: Vec<ConvergenceRecord> = Vec::with_capacity(points);
    for &d in &grid {
        let sp = match schedule_point(&vc, d, &scfg) {
            Ok(sp) => sp,
            Err(e) => {
                emit_error(schedule_error_name(&e), &e.to_string());
                return ExitCode::from(1);
            }
        };
        let record = match convergence_record_at(&vc, kappa, &sp, &qcfg) {
            Ok(r) => r,
            Err(e) => {
                emit_error("ConvergenceError", &e.to_string());
                return ExitCode::from(1);
            }
        };
        records.push(record);
        let running = if records.len() >= 4 {
            let ds: Vec<f64> = records.iter().map(|r| r.d).collect();
            let totals: Vec<f64> = records.iter().map(|r| r.hs_sq_total).collect();
            match fit_loglog(&ds, &totals) {
                Ok(fit) => fmt_f(fit.slope),
                Err(_) => String::new(),
            }
        } else {
            String::new()
        };
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            fmt_f(record.d),
            fmt_f(record.u),
            fmt_f(record.v),
            fmt_f(record.hs_sq_scalar),
            fmt_f(record.hs_sq_complement),
            fmt_f(record.hs_sq_total),
            running
        ));
    }

    if let Err(e) = std::fs::write(&args.out, csv) {
        emit_error("IoError", &e.to_string());
        return ExitCode::from(1);
    }

    let ds: Vec<f64> = records.iter().map(|r| r.d).collect();
    let totals: Vec<f64> = records.iter().map(|r| r.hs_sq_total).collect();
    match fit_loglog(&ds, &totals) {
        Ok(fit) => {
            eprintln!(
                "fit: slope={} intercept={} r_squared={}",
                fmt_f(fit.slope),
                fmt_f(fit.intercept),
                fmt_f(fit.r_squared)
            );
        }
        Err(e) => eprintln!("fit: unavailable ({e})"),
    }
    println!(
        "{{\"status\":\"ok\",\"rows\":{},\"out\":\"{}\"}}",
        records.len(),
        args.out.display()
    );
    ExitCode::SUCCESS
}

fn cmd_verify(args: &VerifyArgs) -> ExitCode {
    let suite = match args.suite {
        SuiteArg::Fast => Suite::Fast,
        SuiteArg::Full => Suite::Full,
    };
    let checks = run_battery(suite);
    let mut all_pass = true;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for c in &checks {
        all_pass &= c.pass;
        writeln!(
            out,
            "{} {} {:.6e} {:.1e}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.tolerance
        )
        .ok();
    }
    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Validate(args) => cmd_validate(args),
        Command::Schedule(args) => cmd_schedule(args),
        Command::Kernel(args) => cmd_kernel(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Verify(args) => cmd_verify(args),
    }
}
