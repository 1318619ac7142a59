mod manifest;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use hdx_core::complex::{check_exact_identities, homogeneous_weight_exact, validate, ExactIdentityReport, ValidationReport};
use hdx_core::decomposition::{Decomposer, PsiSolver, C0_TOLERANCE};
use hdx_core::generators::{complete_complex, GeneratorSpec};
use hdx_core::io::{
    canonical_complex_json, parse_cochain, parse_complex, parse_face_set, to_json, CochainFile, ComplexFile,
    LadderJson, ProfileJson,
};
use hdx_core::mixing::{check_mixing_bounds, second_eigenvalue_on_c0, C0Extremes, FaceSet, MixingOptions, TheoremId};
use hdx_core::operators::{
    assemble_codifferential, assemble_differential, assemble_lower_walk, assemble_nonlazy_upper, assemble_upper_walk,
    face_legend, verify_factorizations, FactorizationReport, OperatorMatrix,
};
use hdx_core::spectra::{check_descent, profile, DescentReport};
use hdx_core::suite::{run_suite, SuiteConfig};
use hdx_core::{Cochain, HdxError, WeightedComplex};

use manifest::{Report, RunManifest};

/// Residual limit for operator checks in `walk`.
const WALK_TOLERANCE: f64 = 1e-10;

#[derive(Parser)]
#[command(name = "hdx", version, about = "Spectral verification for weighted simplicial complexes")]
struct Cli {
    /// Record wall-clock time in the manifest. Reports are then no longer
    /// byte-reproducible.
    #[arg(long, global = true)]
    timing: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a complex and write it as JSON
    Gen(GenArgs),
    /// Check closure, purity and the weight identities of a complex file
    Validate {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Local spectral profile of a complex, or a CSV sweep over complete complexes
    Spectra(SpectraArgs),
    /// Assemble a walk or differential and check its structural identities
    Walk(WalkArgs),
    /// Decompose cochains into their ladder and check the energy identities
    Decompose(DecomposeArgs),
    /// Check the mixing bounds on a complex
    Mixing(MixingArgs),
    /// Run the full verification battery
    Suite(SuiteArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Complete,
    RandomPure,
    RegularGraphMatching,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: GenKind,
    /// Vertex count (complete, random-pure)
    #[arg(long)]
    m: Option<usize>,
    /// Dimension (complete, random-pure)
    #[arg(long)]
    n: Option<usize>,
    /// Top-face retention probability (random-pure)
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Vertex count (regular-graph-matching)
    #[arg(long)]
    v: Option<usize>,
    /// Degree (regular-graph-matching)
    #[arg(long)]
    s: Option<usize>,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Where to write the generated face set, if the generator makes one
    #[arg(long)]
    set_out: Option<PathBuf>,
}

#[derive(Args)]
struct SpectraArgs {
    file: Option<PathBuf>,
    /// Include per-face link eigenvalues
    #[arg(long)]
    faces: bool,
    /// CSV sweep over complete complexes, e.g. `m=5..9`
    #[arg(long, conflicts_with_all = ["file", "faces"])]
    sweep: Option<String>,
    /// Dimension of the swept complexes
    #[arg(long, default_value_t = 2, requires = "sweep")]
    n: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Op {
    Upper,
    Lower,
    Nonlazy,
    D,
    Dstar,
}

#[derive(Args)]
struct WalkArgs {
    file: PathBuf,
    /// Dimension the walk acts on, or the index of `d_k`
    #[arg(long, allow_negative_numbers = true)]
    k: isize,
    #[arg(long, value_enum)]
    op: Op,
    /// Write the matrix as CSV instead of the JSON report
    #[arg(long)]
    dump: bool,
    /// Write the `index,vertices` legend of the source faces
    #[arg(long)]
    legend: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    MinimumNorm,
    KernelShifted,
}

#[derive(Args)]
struct DecomposeArgs {
    file: PathBuf,
    #[arg(long)]
    k: usize,
    /// Cochain file; it is projected onto the complement of constants first
    #[arg(long, conflicts_with = "random", required_unless_present = "random")]
    cochain: Option<PathBuf>,
    /// Number of random cochains
    #[arg(long)]
    random: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "minimum-norm")]
    solver: SolverArg,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct MixingArgs {
    file: PathBuf,
    /// Comma-separated theorem ids (`lazy-upper`, `nonlazy-two-sided`,
    /// `nonlazy-one-sided`, `binary-thin`, or 6.5.1, 6.5.2, 6.6, 7.3)
    #[arg(long, value_delimiter = ',', value_parser = parse_theorem)]
    theorems: Option<Vec<TheoremId>>,
    /// Face set for the binary bound
    #[arg(long)]
    set: Option<PathBuf>,
    /// Use this λ instead of the measured link spectra
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SuiteArgs {
    #[arg(long, default_value_t = SuiteConfig::default().seed)]
    seed: u64,
    /// Random cochains per complex
    #[arg(long, default_value_t = SuiteConfig::default().cochains)]
    cochains: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn parse_theorem(s: &str) -> Result<TheoremId, String> {
    s.parse().map_err(|e: HdxError| e.to_string())
}

enum Failure {
    /// Bad flags or inputs (exit 2).
    Usage(String),
    /// A verification check failed (exit 1); the report was still written.
    Check(Vec<String>),
}

impl From<HdxError> for Failure {
    fn from(e: HdxError) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CliResult = Result<Vec<String>, Failure>;

fn input_error(path: &Path, e: HdxError) -> Failure {
    Failure::Usage(format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_complex(path: &Path, manifest: &mut RunManifest) -> Result<WeightedComplex, Failure> {
    let wc = parse_complex(&read(path)?).map_err(|e| input_error(path, e))?;
    manifest.input("complex", path, &canonical_complex_json(&wc)?);
    Ok(wc)
}

fn emit<T: Serialize>(
    manifest: &mut RunManifest,
    start: Instant,
    timing: bool,
    report: &T,
    output: Option<&Path>,
    failures: Vec<String>,
) -> CliResult {
    if timing {
        manifest.wall_clock_seconds = Some(start.elapsed().as_secs_f64());
    }
    write_out(output, &to_json(&Report { manifest, report })?)?;
    if manifest.pass {
        Ok(failures)
    } else {
        Err(Failure::Check(failures))
    }
}

fn gen(args: GenArgs) -> CliResult {
    fn need<T>(v: Option<T>, flag: &str, kind: &str) -> Result<T, Failure> {
        v.ok_or_else(|| Failure::Usage(format!("--{flag} is required for --kind {kind}")))
    }
    let spec = match args.kind {
        GenKind::Complete => GeneratorSpec::Complete {
            m: need(args.m, "m", "complete")?,
            n: need(args.n, "n", "complete")?,
        },
        GenKind::RandomPure => GeneratorSpec::RandomPure {
            m: need(args.m, "m", "random-pure")?,
            n: need(args.n, "n", "random-pure")?,
            p: need(args.p, "p", "random-pure")?,
            seed: need(args.seed, "seed", "random-pure")?,
        },
        GenKind::RegularGraphMatching => GeneratorSpec::RegularGraphMatching {
            v: need(args.v, "v", "regular-graph-matching")?,
            s: need(args.s, "s", "regular-graph-matching")?,
            seed: need(args.seed, "seed", "regular-graph-matching")?,
        },
    };
    let g = spec.generate()?;
    write_out(args.output.as_deref(), &to_json(&ComplexFile::from_generated(&g))?)?;
    match (&g.face_set, &args.set_out) {
        (Some(a), Some(p)) => write_out(Some(p), &to_json(a)?)?,
        (None, Some(_)) => {
            return Err(Failure::Usage(format!("generator `{}` produces no face set", spec.kind())));
        }
        _ => {}
    }
    Ok(Vec::new())
}

#[derive(Serialize)]
struct ValidateReport {
    float: ValidationReport,
    /// Integer identities, present when every top face has weight 1.
    #[serde(skip_serializing_if = "Option::is_none")]
    exact: Option<ExactIdentityReport>,
}

fn validate_cmd(file: &Path, output: Option<&Path>, timing: bool) -> CliResult {
    let start = Instant::now();
    let mut manifest = RunManifest::new("validate");
    let wc = load_complex(file, &mut manifest)?;
    let float = validate(wc.complex(), wc.weights());
    let mut failures = Vec::new();
    manifest.check("float-identities", float.ok);
    if !float.ok {
        for r in float.recursion.iter().chain(&float.top_sum) {
            if r.max_relative_residual > float.tolerance {
                failures.push(format!("k={}: residual {:e} > {:e}", r.k, r.max_relative_residual, float.tolerance));
            }
        }
    }
    let homogeneous = wc.top_faces().iter().all(|(_, w)| *w == 1.0);
    let exact = if homogeneous {
        let r = check_exact_identities(wc.complex(), &homogeneous_weight_exact(wc.complex())?)?;
        let failed =
            r.recursion_failures + r.top_sum_failures + r.intermediate_sum_failures + r.total_failures;
        manifest.check("exact-identities", failed == 0);
        if failed > 0 {
            failures.push(format!("{failed} exact identity failures"));
        }
        Some(r)
    } else {
        None
    };
    emit(&mut manifest, start, timing, &ValidateReport { float, exact }, output, failures)
}

#[derive(Serialize)]
struct SpectraReport {
    profile: ProfileJson,
    descent: DescentReport,
}

fn parse_sweep(s: &str) -> Result<(usize, usize), Failure> {
    let bad = || Failure::Usage(format!("--sweep expects `m=LO..HI`, got `{s}`"));
    let range = s.strip_prefix("m=").ok_or_else(bad)?;
    let (lo, hi) = range.split_once("..").ok_or_else(bad)?;
    let lo: usize = lo.parse().map_err(|_| bad())?;
    let hi: usize = hi.parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

/// One row per `(m, k)`: link extremes, measured `λ`s and the second
/// eigenvalue of `M⁺_k` against the lazy bound.
fn sweep_csv(lo: usize, hi: usize, n: usize) -> Result<String, Failure> {
    let mut out = String::from(
        "m,n,k,mu_k,nu_k,lambda_one_sided,lambda_two_sided,second_eigenvalue,lazy_bound\n",
    );
    for m in lo..=hi {
        let wc = complete_complex(m, n)?;
        let p = profile(&wc)?;
        for k in 0..n {
            let up = assemble_upper_walk(&wc, k)?;
            let second = second_eigenvalue_on_c0(&wc, &up).map_or(f64::NAN, |e| e.top);
            let kf = k as f64;
            let bound = (kf + 1.0) / (kf + 2.0) + (kf + 1.0) * p.lambda_one_sided;
            let _ = writeln!(
                out,
                "{m},{n},{k},{:?},{:?},{:?},{:?},{second:?},{bound:?}",
                p.mu(k),
                p.nu(k),
                p.lambda_one_sided,
                p.lambda_two_sided
            );
        }
    }
    Ok(out)
}

fn spectra_cmd(args: SpectraArgs, timing: bool) -> CliResult {
    if let Some(s) = &args.sweep {
        let (lo, hi) = parse_sweep(s)?;
        write_out(args.output.as_deref(), &sweep_csv(lo, hi, args.n)?)?;
        return Ok(Vec::new());
    }
    let file = args.file.ok_or_else(|| Failure::Usage("a complex file or --sweep is required".into()))?;
    let start = Instant::now();
    let mut manifest = RunManifest::new("spectra");
    let wc = load_complex(&file, &mut manifest)?;
    let p = profile(&wc)?;
    let descent = check_descent(&p);
    manifest.check("descent", descent.pass);
    let mut failures = Vec::new();
    for s in descent.one_step.iter().chain(&descent.from_top) {
        if !(s.mu_pass && s.nu_pass) {
            failures.push(format!("descent k={} from {}: mu={:e} bound={:?}", s.k, s.from, s.mu_k, s.mu_bound));
        }
    }
    let report = SpectraReport { profile: ProfileJson::new(&p, args.faces), descent };
    emit(&mut manifest, start, timing, &report, args.output.as_deref(), failures)
}

#[derive(Serialize)]
struct WalkReport {
    op: Op,
    k: isize,
    rows: usize,
    cols: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    row_sum_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    self_adjointness_residual: Option<f64>,
    /// Ascending, from the weighted symmetrization.
    #[serde(skip_serializing_if = "Option::is_none")]
    eigenvalues: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    c0_extremes: Option<C0Extremes>,
    factorization: FactorizationReport,
}

fn walk_cmd(args: WalkArgs, timing: bool) -> CliResult {
    let start = Instant::now();
    let mut manifest = RunManifest::new("walk");
    let wc = load_complex(&args.file, &mut manifest)?;
    let n = wc.dim() as isize;
    let walk_k = || -> Result<usize, Failure> {
        usize::try_from(args.k)
            .map_err(|_| Failure::Usage(format!("--k {} is negative; walks act on k >= 0", args.k)))
    };
    let op: OperatorMatrix = match args.op {
        Op::Upper => assemble_upper_walk(&wc, walk_k()?)?,
        Op::Lower => assemble_lower_walk(&wc, walk_k()?)?,
        Op::Nonlazy => assemble_nonlazy_upper(&wc, walk_k()?)?,
        Op::D => assemble_differential(&wc, args.k)?,
        Op::Dstar => assemble_codifferential(&wc, args.k)?,
    };
    if let Some(p) = &args.legend {
        write_out(Some(p), &face_legend(&wc, op.source_dim()))?;
    }
    if args.dump {
        write_out(args.output.as_deref(), &op.to_csv())?;
        return Ok(Vec::new());
    }
    let mut failures = Vec::new();
    let square = matches!(args.op, Op::Upper | Op::Lower | Op::Nonlazy);
    let stochastic = matches!(args.op, Op::Upper | Op::Lower);
    let row_sum_residual = stochastic.then(|| op.row_sum_residual());
    let self_adjointness_residual = square.then(|| op.self_adjointness_residual(&wc));
    for (name, r) in [("row-sum", row_sum_residual), ("self-adjoint", self_adjointness_residual)] {
        if let Some(r) = r {
            manifest.check(name, r <= WALK_TOLERANCE);
            if r > WALK_TOLERANCE {
                failures.push(format!("{name}: residual {r:e} > {WALK_TOLERANCE:e}"));
            }
        }
    }
    // the factorizations tie the walks at k to d_k and d_{k-1}
    let fk = if square { args.k } else { (args.k + 1).min(n) }.max(0) as usize;
    let factorization = verify_factorizations(&wc, fk)?;
    let worst = factorization.max_residual();
    manifest.check("factorization", worst <= WALK_TOLERANCE);
    if worst > WALK_TOLERANCE {
        failures.push(format!("factorization at k={fk}: residual {worst:e} > {WALK_TOLERANCE:e}"));
    }
    let report = WalkReport {
        op: args.op,
        k: args.k,
        rows: op.matrix().nrows(),
        cols: op.matrix().ncols(),
        row_sum_residual,
        self_adjointness_residual,
        eigenvalues: square.then(|| op.eigenvalues(&wc)),
        c0_extremes: if square { second_eigenvalue_on_c0(&wc, &op) } else { None },
        factorization,
    };
    emit(&mut manifest, start, timing, &report, args.output.as_deref(), failures)
}

#[derive(Serialize)]
struct DecomposeReport {
    k: usize,
    solver: PsiSolver,
    /// Relative weight of constants removed from a supplied cochain.
    #[serde(skip_serializing_if = "Option::is_none")]
    projection_residual: Option<f64>,
    ladders: Vec<LadderJson>,
}

fn decompose_cmd(args: DecomposeArgs, timing: bool) -> CliResult {
    let start = Instant::now();
    let mut manifest = RunManifest::new("decompose");
    let wc = load_complex(&args.file, &mut manifest)?;
    let solver = match args.solver {
        SolverArg::MinimumNorm => PsiSolver::MinimumNorm,
        SolverArg::KernelShifted => PsiSolver::KernelShifted { seed: args.seed },
    };
    let dec = Decomposer::new(&wc, args.k, solver)?;
    let p = profile(&wc)?;
    let mut projection_residual = None;
    let inputs: Vec<Cochain> = match (&args.cochain, args.random) {
        (Some(path), _) => {
            let phi = parse_cochain(&read(path)?, &wc).map_err(|e| input_error(path, e))?;
            if phi.k() != args.k as isize {
                return Err(input_error(
                    path,
                    HdxError::DimensionMismatch { expected: args.k as isize, found: phi.k() },
                ));
            }
            manifest.input("cochain", path, &serde_json::to_string(&CochainFile::from_cochain(&wc, &phi)).unwrap());
            let r = wc.c0_residual(&phi)?;
            if r > C0_TOLERANCE {
                projection_residual = Some(r);
            }
            vec![wc.project_c0(&phi)?]
        }
        (None, Some(count)) => {
            manifest.seeds.push(args.seed);
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            (0..count)
                .map(|_| wc.project_c0(&Cochain::random(&wc, args.k as isize, &mut rng)))
                .collect::<hdx_core::Result<_>>()?
        }
        (None, None) => unreachable!("clap requires --cochain or --random"),
    };
    let mut ladders = Vec::with_capacity(inputs.len());
    let mut failures = Vec::new();
    for (i, phi) in inputs.iter().enumerate() {
        let r = match dec.decompose(phi) {
            Ok(r) => r,
            Err(HdxError::ZeroCochain) => {
                return Err(Failure::Usage("cochain is constant; its C_0 part is zero".into()));
            }
            Err(e) => return Err(e.into()),
        };
        let rep = dec.verify(&r, &p)?;
        if !rep.pass {
            failures.push(format!(
                "cochain {i}: identity residuals {:e}, {:e}; upper {} lower {}",
                rep.identity1_residual, rep.identity2_residual, rep.cor64_upper_clamped_pass, rep.cor64_lower_pass
            ));
        }
        manifest.check(format!("ladder-{i:04}"), rep.pass);
        ladders.push(LadderJson::from(&rep));
    }
    let report = DecomposeReport { k: args.k, solver, projection_residual, ladders };
    emit(&mut manifest, start, timing, &report, args.output.as_deref(), failures)
}

fn mixing_cmd(args: MixingArgs, timing: bool) -> CliResult {
    let start = Instant::now();
    let mut manifest = RunManifest::new("mixing");
    let wc = load_complex(&args.file, &mut manifest)?;
    let face_set: Option<FaceSet> = match &args.set {
        Some(path) => {
            let a = parse_face_set(&read(path)?).map_err(|e| input_error(path, e))?;
            a.indices(&wc).map_err(|e| input_error(path, e))?;
            manifest.input("face-set", path, &serde_json::to_string(&a).unwrap());
            Some(a)
        }
        None => None,
    };
    let theorems = match args.theorems {
        Some(t) => t,
        None => {
            let mut t = MixingOptions::default().theorems;
            if face_set.is_some() {
                t.push(TheoremId::BinaryThin);
            }
            t
        }
    };
    if theorems.contains(&TheoremId::BinaryThin) && face_set.is_none() {
        return Err(Failure::Usage("binary-thin needs a face set (--set FILE)".into()));
    }
    let p = profile(&wc)?;
    let opts = MixingOptions { theorems, lambda_override: args.lambda, face_set };
    let report = check_mixing_bounds(&wc, &p, &opts)?;
    let mut failures = Vec::new();
    for e in &report.entries {
        let name = format!("{}/k={}", e.theorem_id, e.k);
        if e.advisory {
            if !e.pass {
                eprintln!("advisory: {name}: achieved {:?} > bound {:?}", e.achieved, e.bound);
            }
            manifest.checks.insert(format!("{name} (advisory)"), e.pass);
        } else {
            manifest.check(name.clone(), e.pass);
            if !e.pass {
                failures.push(format!("{name}: achieved {:?} > bound {:?}", e.achieved, e.bound));
            }
        }
    }
    emit(&mut manifest, start, timing, &report, args.output.as_deref(), failures)
}

fn suite_cmd(args: SuiteArgs, timing: bool) -> CliResult {
    let start = Instant::now();
    let mut manifest = RunManifest::new("suite");
    let config = SuiteConfig { seed: args.seed, cochains: args.cochains, ..SuiteConfig::default() };
    manifest.seeds.push(config.seed);
    let report = run_suite(&config)?;
    let mut failures = Vec::new();
    for c in &report.criteria {
        eprintln!("{}", c.summary());
        if c.advisory {
            manifest.checks.insert(format!("{:02} {} (advisory)", c.id, c.name), c.pass);
        } else {
            manifest.check(format!("{:02} {}", c.id, c.name), c.pass);
        }
        for f in c.failures() {
            let k = f.k.map(|k| format!(" k={k}")).unwrap_or_default();
            let line = format!("{} {}{k} {}: {:?} > {:?}", c.id, f.fixture, f.metric, f.value, f.limit);
            if c.advisory {
                eprintln!("advisory: {line}");
            } else {
                failures.push(line);
            }
        }
    }
    emit(&mut manifest, start, timing, &report, args.output.as_deref(), failures)
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("HDX_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| Failure::Usage(format!("HDX_THREADS must be a non-negative integer, got `{raw}`")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult {
    configure_threads()?;
    let timing = cli.timing;
    match cli.command {
        Command::Gen(a) => gen(a),
        Command::Validate { file, output } => validate_cmd(&file, output.as_deref(), timing),
        Command::Spectra(a) => spectra_cmd(a, timing),
        Command::Walk(a) => walk_cmd(a, timing),
        Command::Decompose(a) => decompose_cmd(a, timing),
        Command::Mixing(a) => mixing_cmd(a, timing),
        Command::Suite(a) => suite_cmd(a, timing),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(_) => ExitCode::SUCCESS,
        Err(Failure::Check(lines)) => {
            for l in lines {
                eprintln!("FAIL {l}");
            }
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
