use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use steercert::certify::{product_null_verdict, support_kernel_verdict, Verdict};
use steercert::io::{
    complete_weights, contact_report, family_from_map, matrix_to_json, parse_gen_spec, parse_lattice, parse_settings,
    parse_state, parse_vector, point_to_map, verdict_to_json, SettingsSpec, FAMILY_NAMES,
};
use steercert::lhslab::{cap_mass, lhs_lp, Assemblage, HiddenGrid, LpOptions};
use steercert::matcore::{basis_vector, DensityMatrix};
use steercert::sampling::Sampler;
use steercert::scaling::{compressed_slice, log_grid, scaling_fit, sigma_family};
use steercert::{Error, Tolerances, C64};

/// Largest LP accepted by `lhs`: deterministic strategies times grid points.
const LP_SIZE_LIMIT: usize = 200_000;

#[derive(Parser)]
#[command(name = "steercert", version, about = "Boundary-contact entanglement and steering certificates")]
struct Cli {
    /// Override eps_zero (also read from STEERCERT_TOL_ZERO; the flag wins).
    #[arg(long, global = true)]
    tol_zero: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a state in matrix JSON from a parameter file or the seeded sampler.
    Gen(GenArgs),
    /// Search a two-qubit state for a product null vector.
    Contact(StateArgs),
    /// Entanglement and steering verdict for a state.
    Certify(CertifyArgs),
    /// Conditional-state family along an untrusted two-plane, with slope fit.
    Scaling(ScalingArgs),
    /// Grid LHS linear program for a finite projective assemblage.
    Lhs(LhsArgs),
    /// Verdicts over a parameter lattice of a named family, as CSV.
    Scan(ScanArgs),
}

#[derive(Args)]
struct Output {
    /// Write here instead of stdout.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SampleKind {
    Cholesky,
    HBlock,
    RankTwo,
}

#[derive(Args)]
struct GenArgs {
    /// Flat JSON parameter file.
    #[arg(long, conflicts_with = "sample", required_unless_present = "sample")]
    params: Option<PathBuf>,
    /// Draw a random state instead.
    #[arg(long, value_enum)]
    sample: Option<SampleKind>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct StateArgs {
    /// State in matrix JSON.
    #[arg(long)]
    state: PathBuf,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long)]
    state: PathBuf,
    /// Untrusted vector (JSON array) selecting the support-kernel route.
    #[arg(long, requires = "alpha1")]
    alpha0: Option<PathBuf>,
    #[arg(long, requires = "alpha0")]
    alpha1: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct ScalingArgs {
    #[arg(long)]
    state: PathBuf,
    /// Defaults to |0>.
    #[arg(long)]
    alpha0: Option<PathBuf>,
    /// Defaults to |1>.
    #[arg(long)]
    alpha1: Option<PathBuf>,
    /// Trusted kernel vector of the contact state; with --phi selects the compressed slice.
    #[arg(long, requires = "phi")]
    beta: Option<PathBuf>,
    #[arg(long, requires = "beta")]
    phi: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-4)]
    tmin: f64,
    #[arg(long, default_value_t = 1e-2)]
    tmax: f64,
    #[arg(long, default_value_t = 20)]
    npoints: usize,
    /// Bloch-profile CSV (t, m, Rx, Ry, Rz, abs_b, d, u, delta).
    #[arg(long)]
    csv: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct LhsArgs {
    #[arg(long)]
    state: PathBuf,
    /// `t:0.2,0.1,...` for xi_t settings or `dirs:x,y,z;...` for Bloch directions.
    #[arg(long)]
    settings: String,
    /// Fibonacci grid size.
    #[arg(long, default_value_t = 200)]
    grid: usize,
    /// Append the exact contact direction to the grid.
    #[arg(long)]
    contact_atom: bool,
    /// Contact direction as `x,y,z`.
    #[arg(long, default_value = "0,0,1")]
    contact_dir: String,
    /// Number of grid sizes in the trend table, doubling from --grid.
    #[arg(long, default_value_t = 1)]
    levels: usize,
    /// Cap parameter t; defaults to the smallest t setting, else 0.1.
    #[arg(long)]
    cap_t: Option<f64>,
    /// Cap constant K.
    #[arg(long, default_value_t = 1.0)]
    cap_k: f64,
    /// Trend CSV (grid_size, residual, cap_mass).
    #[arg(long)]
    csv: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct ScanArgs {
    /// One of h_block, cholesky, spectral, x, bell_mix, two_product_one_entangled, werner.
    #[arg(long)]
    family: String,
    /// `name=value` or `name=start:stop:count` items separated by `;`.
    #[arg(long)]
    lattice: String,
    #[command(flatten)]
    output: Output,
}

/// Failure with its exit code: 2 for malformed input, 3 for an unsupported dimension.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::DimensionMismatch(_) => 3,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

fn malformed(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn read(path: &Path) -> Outcome<String> {
    std::fs::read_to_string(path).map_err(|e| malformed(format!("{}: {e}", path.display())))
}

fn write(path: Option<&Path>, text: &str) -> Outcome<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| malformed(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(output: &Output, value: &Value) -> Outcome<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    write(output.out.as_deref(), &text)
}

fn tolerances(flag: Option<f64>) -> Outcome<Tolerances> {
    let env = match std::env::var("STEERCERT_TOL_ZERO") {
        Ok(v) => Some(
            v.trim()
                .parse::<f64>()
                .map_err(|_| malformed(format!("STEERCERT_TOL_ZERO is not a number: {v}")))?,
        ),
        Err(_) => None,
    };
    match flag.or(env) {
        Some(eps) => Ok(Tolerances::default().with_eps_zero(eps)?),
        None => Ok(Tolerances::default()),
    }
}

fn load_state(path: &Path, tol: &Tolerances) -> Outcome<DensityMatrix> {
    Ok(parse_state(&read(path)?, tol)?)
}

fn load_vector(path: &Path) -> Outcome<Vec<C64>> {
    Ok(parse_vector(&read(path)?)?)
}

fn gen(args: &GenArgs) -> Outcome<()> {
    let doc = if let Some(path) = &args.params {
        let rho = parse_gen_spec(&read(path)?)?.build()?;
        matrix_to_json(rho.matrix(), rho.dims())
    } else {
        let mut s = Sampler::new(args.seed);
        let rho = match args.sample.expect("clap enforces one source") {
            SampleKind::Cholesky => steercert::families::cholesky_branch(&s.cholesky_params())?.0,
            SampleKind::HBlock => steercert::families::from_h_block(&s.h_block())?,
            SampleKind::RankTwo => {
                let m = s.psd(4, 2);
                DensityMatrix::two_qubit(m.hermitian_part(), &Tolerances::default())?
            }
        };
        let mut doc = matrix_to_json(rho.matrix(), rho.dims());
        doc["seed"] = json!(args.seed);
        doc
    };
    emit_json(&args.output, &doc)
}

fn contact(args: &StateArgs, tol: &Tolerances) -> Outcome<()> {
    let rho = load_state(&args.state, tol)?;
    emit_json(&args.output, &contact_report(&rho, tol)?)
}

fn certify(args: &CertifyArgs, tol: &Tolerances) -> Outcome<()> {
    let rho = load_state(&args.state, tol)?;
    let verdict: Verdict = match (&args.alpha0, &args.alpha1) {
        (Some(a0), Some(a1)) => support_kernel_verdict(&rho, &load_vector(a0)?, &load_vector(a1)?, tol)?,
        _ if rho.is_two_qubit() => product_null_verdict(&rho, tol)?,
        _ => {
            return Err(Failure {
                code: 3,
                message: format!(
                    "dims {:?}: the product-null route needs two qubits; pass --alpha0/--alpha1 for the support-kernel route",
                    rho.dims()
                ),
            })
        }
    };
    emit_json(&args.output, &verdict_to_json(&verdict))
}

fn scaling(args: &ScalingArgs, tol: &Tolerances) -> Outcome<()> {
    let rho = load_state(&args.state, tol)?;
    let dx = rho.dims().0;
    let a0 = match &args.alpha0 {
        Some(p) => load_vector(p)?,
        None => basis_vector(dx, 0),
    };
    let a1 = match &args.alpha1 {
        Some(p) => load_vector(p)?,
        None => basis_vector(dx, 1.min(dx - 1)),
    };
    let ts = log_grid(args.tmin, args.tmax, args.npoints)?;
    let fam = match (&args.beta, &args.phi) {
        (Some(b), Some(f)) => compressed_slice(&rho, &a0, &a1, &load_vector(f)?, &load_vector(b)?, &ts, tol)?,
        _ => sigma_family(&rho, &a0, &a1, &ts, tol)?,
    };
    if let Some(path) = &args.csv {
        write(Some(path), &fam.to_csv())?;
    }
    let report = match scaling_fit(&fam, (args.tmin, args.tmax)) {
        Ok(r) => json!({
            "slope_b": r.slope_b,
            "slope_d": r.slope_d,
            "d_below_floor": r.d_below_floor,
            "l_hat": r.l_hat,
            "c_hat": r.c_hat,
            "k_threshold": finite_or_null(r.k_threshold()),
            "passes": r.passes,
            "points": r.points,
        }),
        Err(Error::EmptyWindow) => json!({ "passes": false, "error": "fewer than 4 points in the window" }),
        Err(e) => return Err(e.into()),
    };
    emit_json(&args.output, &report)
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn parse_direction(text: &str) -> Outcome<[f64; 3]> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| malformed(format!("bad direction component '{s}'"))))
        .collect::<Outcome<_>>()?;
    match parts.as_slice() {
        [x, y, z] => Ok([*x, *y, *z]),
        _ => Err(malformed("direction needs three components")),
    }
}

fn lhs(args: &LhsArgs, tol: &Tolerances) -> Outcome<()> {
    let rho = load_state(&args.state, tol)?;
    let settings = parse_settings(&args.settings)?;
    let dir = parse_direction(&args.contact_dir)?;
    if args.levels == 0 || args.levels > 8 {
        return Err(malformed("--levels must lie in 1..=8"));
    }
    let n = settings.len();
    if n > steercert::lhslab::MAX_SETTINGS {
        return Err(Error::TooManySettings(n, steercert::lhslab::MAX_SETTINGS).into());
    }
    let largest = args.grid.saturating_mul(1 << (args.levels - 1)) + usize::from(args.contact_atom);
    let size = (1usize << n).saturating_mul(largest);
    if size > LP_SIZE_LIMIT {
        let max_grid = LP_SIZE_LIMIT >> n;
        return Err(malformed(format!(
            "LP too large: 2^{n} strategies x {largest} grid points = {size} > {LP_SIZE_LIMIT}; \
             use a grid of at most {max_grid} points, fewer levels, or fewer settings"
        )));
    }
    let cap_t = args.cap_t.unwrap_or(match &settings {
        SettingsSpec::TValues(ts) => ts.iter().copied().filter(|&t| t > 0.0).fold(f64::INFINITY, f64::min),
        SettingsSpec::Directions(_) => 0.1,
    });
    let cap_t = if cap_t.is_finite() { cap_t } else { 0.1 };
    let asm = Assemblage::from_state(&rho, &settings.kets()?, tol)?;
    let opts = LpOptions::default();
    let mut csv = String::from("grid_size,residual,cap_mass\n");
    let mut rows = Vec::new();
    for level in 0..args.levels {
        let size = args.grid << level;
        let grid = HiddenGrid::build(size, args.contact_atom, dir)?;
        let sol = lhs_lp(&asm, &grid, &opts)?;
        let mass = cap_mass(&sol, &grid, cap_t, args.cap_k, dir)?;
        let _ = writeln!(csv, "{size},{:e},{mass:e}", sol.residual);
        rows.push(json!({
            "grid_size": size,
            "contact_atom": args.contact_atom,
            "feasible": sol.feasible,
            "residual": sol.residual,
            "iterations": sol.iterations,
            "total_weight": sol.total_weight(),
            "cap_mass": mass,
        }));
    }
    if let Some(path) = &args.csv {
        write(Some(path), &csv)?;
    }
    let doc = json!({
        "settings": n,
        "no_signalling_defect": asm.no_signalling_defect(),
        "cap_t": cap_t,
        "cap_k": args.cap_k,
        "runs": rows,
    });
    emit_json(&args.output, &doc)
}

fn csv_field(x: f64) -> String {
    format!("{x:e}")
}

fn scan_row(family: &str, point: &[(String, f64)], tol: &Tolerances) -> String {
    let values: Vec<String> = point.iter().map(|(_, v)| csv_field(*v)).collect();
    let tail = (|| -> steercert::Result<String> {
        let mut map = point_to_map(family, point)?;
        complete_weights(&mut map);
        let spec = family_from_map(&map, &[])?;
        let rho = spec.build()?;
        let v = product_null_verdict(&rho, tol)?;
        let coherence = spec.analytic_coherence().unwrap_or(v.coherence).norm();
        Ok(format!(
            "{},{},{},{},{},{},ok",
            csv_field(coherence),
            csv_field(v.min_pt_eigenvalue),
            v.npt,
            v.steerable_a_to_b.as_str(),
            v.steerable_b_to_a.as_str(),
            v.mechanism.as_str()
        ))
    })()
    .unwrap_or_else(|e| format!(",,,,,,\"{}\"", e.to_string().replace('"', "'")));
    if values.is_empty() {
        tail
    } else {
        format!("{},{tail}", values.join(","))
    }
}

fn scan(args: &ScanArgs, tol: &Tolerances) -> Outcome<()> {
    if !FAMILY_NAMES.contains(&args.family.as_str()) {
        return Err(malformed(format!(
            "unknown family '{}'; expected one of {}",
            args.family,
            FAMILY_NAMES.join(", ")
        )));
    }
    let lattice = parse_lattice(&args.lattice)?;
    let mut out: String = lattice.axes.iter().map(|(name, _)| format!("{name},")).collect();
    out.push_str("abs_coherence,min_pt_eigenvalue,npt,steerable_AtoB,steerable_BtoA,mechanism,status\n");
    let rows: Vec<String> = lattice
        .points()
        .par_iter()
        .map(|p| scan_row(&args.family, p, tol))
        .collect();
    for row in rows {
        out.push_str(&row);
        out.push('\n');
    }
    write(args.output.out.as_deref(), &out)
}

fn run(cli: &Cli) -> Outcome<()> {
    let tol = tolerances(cli.tol_zero)?;
    match &cli.command {
        Command::Gen(a) => gen(a),
        Command::Contact(a) => contact(a, &tol),
        Command::Certify(a) => certify(a, &tol),
        Command::Scaling(a) => scaling(a, &tol),
        Command::Lhs(a) => lhs(a, &tol),
        Command::Scan(a) => scan(a, &tol),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("steercert: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
