//! Command-line front end.
//!
//! Problem files are JSON:
//!
//! ```json
//! {
//!   "components": [
//!     { "p": 3, "blocks": [[2, 2], [1, 2]],
//!       "matrix": [[0,1,1,1],[8,0,2,2],[2,1,0,1],[2,1,2,0]] }
//!   ],
//!   "settings": { "max_enumeration": 1000000, "methods": ["theorem", "kernel", "oracle"] }
//! }
//! ```
//!
//! One component per prime; `blocks` lists `[exponent, multiplicity]` pairs
//! with strictly decreasing exponents. Exit codes: 0 on success (whether or
//! not the center is trivial), 2 for unreadable or invalid input, 3 when the
//! methods disagree.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::center::{self, Analysis, AnalyzeOptions, CenterReport, Method, OracleMode};
use crate::cocycle::{CocycleTable, DEFAULT_VALIDATION_CAP};
use crate::error::Error;
use crate::pairing::PairingMatrix;
use crate::shape::{self, GroupElement, LiftedElement, PGroupShape, DEFAULT_ENUMERATION_CAP};
use crate::solver::{self, KernelDescription};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID_INPUT: i32 = 2;
pub const EXIT_METHODS_DISAGREE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "twisted-center",
    version,
    about = "Decide whether a twisted group algebra of a finite abelian group has trivial center"
)]
struct Cli {
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Largest number of vectors an exhaustive enumeration may visit.
    #[arg(long, global = true, value_name = "N")]
    max_enumeration: Option<u64>,

    /// Comma-separated methods (theorem, kernel, oracle). Theorem and kernel
    /// always run; listing oracle forces it, omitting it disables it.
    #[arg(long, global = true, value_delimiter = ',', value_name = "LIST")]
    methods: Option<Vec<MethodArg>>,

    /// Seed for `selftest`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Full pipeline: normalize, solve, cross-check, combine primes.
    Analyze { file: PathBuf },
    /// Print the normalized matrix of each component.
    Normalize { file: PathBuf },
    /// Print the solution set of the normalized system.
    Kernel { file: PathBuf },
    /// Enumerate the group and list central elements.
    Oracle { file: PathBuf },
    /// Validate a 2-cocycle table and derive its pairing matrix.
    CocycleCheck { file: PathBuf },
    /// Randomized cross-check of all methods on small shapes.
    Selftest {
        /// Random pairings per shape.
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Largest `Σ n_j m_j` of the shapes swept.
        #[arg(long, default_value_t = 4)]
        max_weight: u32,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Theorem,
    Kernel,
    Oracle,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Theorem => Method::Theorem,
            MethodArg::Kernel => Method::Kernel,
            MethodArg::Oracle => Method::Oracle,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Text,
    Json,
}

/// Input file for every subcommand except `cocycle-check`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub components: Vec<ComponentSpec>,
    #[serde(default)]
    pub settings: Settings,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSpec {
    pub p: u64,
    pub blocks: Vec<(u32, usize)>,
    pub matrix: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_enumeration: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub methods: Option<Vec<Method>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
}

/// Input file for `cocycle-check`: exponents of `φ(σ, τ)` indexed by the
/// lexicographic enumeration of the group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CocycleFile {
    pub p: u64,
    pub blocks: Vec<(u32, usize)>,
    pub values: Vec<Vec<i64>>,
}

/// JSON output of `analyze`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    /// Canonicalized input; feeding it back reproduces this report.
    pub input: ProblemFile,
    pub components: Vec<ComponentReport>,
    pub combined: CenterReport,
    pub timing_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentReport {
    pub p: u64,
    pub blocks: Vec<(u32, usize)>,
    pub group_order: u128,
    pub pairing_matrix: Vec<Vec<u64>>,
    pub normalized_modulus: u64,
    pub normalized_matrix: Vec<Vec<u64>>,
    pub theorem_trivial: bool,
    pub diagonal_valuations: Vec<u32>,
    pub zero_columns: usize,
    pub kernel: KernelReport,
    pub oracle_rank: Option<u128>,
    pub center: CenterReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelReport {
    pub modulus: u64,
    pub size: u128,
    pub generators: Vec<LiftedElement>,
    /// Coordinate `s` ranges over multiples of `steps[s]`, when the solution set is a box.
    pub steps: Option<Vec<u64>>,
}

impl From<&KernelDescription> for KernelReport {
    fn from(k: &KernelDescription) -> Self {
        KernelReport {
            modulus: k.modulus.value(),
            size: k.size,
            generators: k.generators.clone(),
            steps: k
                .per_variable
                .as_ref()
                .map(|v| v.iter().map(|c| c.step).collect()),
        }
    }
}

#[derive(Debug)]
enum CliError {
    Io(PathBuf, std::io::Error),
    Parse(PathBuf, serde_json::Error),
    Invalid(String, Error),
    Failed(Error),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Failed(Error::MethodsDisagree(_) | Error::InternalInconsistency(_)) => {
                EXIT_METHODS_DISAGREE
            }
            _ => EXIT_INVALID_INPUT,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Io(path, e) => format!("{}: {e}", path.display()),
            CliError::Parse(path, e) => {
                format!("{}:{}:{}: {e}", path.display(), e.line(), e.column())
            }
            CliError::Invalid(ctx, e) => format!("{ctx}: {e}"),
            CliError::Failed(e) => e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (including the program name), runs the command, and returns
/// the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{rendered}");
            } else {
                let _ = write!(out, "{rendered}");
            }
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.exit_code()
        }
    }
}

fn dispatch(cli: &Cli) -> CliResult<String> {
    match &cli.command {
        Command::Analyze { file } => {
            let problem = load_problem(file)?;
            let settings = effective_settings(cli, &problem.settings);
            let report = analyze_problem(file, &problem, &settings)?;
            if wants_json(cli, &settings) {
                Ok(to_json(&report))
            } else {
                Ok(render_report(&report))
            }
        }
        Command::Normalize { file } => {
            let problem = load_problem(file)?;
            let settings = effective_settings(cli, &problem.settings);
            let pairings = build_pairings(file, &problem)?;
            if wants_json(cli, &settings) {
                let v: Vec<_> = pairings
                    .iter()
                    .map(|a| {
                        let n = a.normalize();
                        serde_json::json!({
                            "p": a.shape().prime(),
                            "modulus": n.matrix().modulus().value(),
                            "normalized_matrix": n.to_rows(),
                        })
                    })
                    .collect();
                Ok(to_json(&serde_json::json!({ "components": v })))
            } else {
                let mut s = String::new();
                for a in &pairings {
                    let n = a.normalize();
                    let _ = writeln!(
                        s,
                        "p = {}: {} (mod {})",
                        a.shape().prime(),
                        a.shape(),
                        n.matrix().modulus().value()
                    );
                    s.push_str(&n.matrix().to_string());
                }
                Ok(s)
            }
        }
        Command::Kernel { file } => {
            let problem = load_problem(file)?;
            let settings = effective_settings(cli, &problem.settings);
            let pairings = build_pairings(file, &problem)?;
            let kernels: Vec<_> = pairings
                .iter()
                .map(|a| (a, solver::kernel(a.normalize().matrix())))
                .collect();
            if wants_json(cli, &settings) {
                let v: Vec<_> = kernels
                    .iter()
                    .map(|(a, k)| {
                        serde_json::json!({ "p": a.shape().prime(), "kernel": KernelReport::from(k) })
                    })
                    .collect();
                Ok(to_json(&serde_json::json!({ "components": v })))
            } else {
                let mut s = String::new();
                for (a, k) in &kernels {
                    let _ = writeln!(s, "p = {}: {}", a.shape().prime(), a.shape());
                    render_kernel(&mut s, k);
                }
                Ok(s)
            }
        }
        Command::Oracle { file } => {
            let problem = load_problem(file)?;
            let settings = effective_settings(cli, &problem.settings);
            let cap = settings.max_enumeration.unwrap_or(DEFAULT_ENUMERATION_CAP);
            let pairings = build_pairings(file, &problem)?;
            let mut results = Vec::new();
            for a in &pairings {
                let g = center::greg_brute_force(&a.normalize(), cap)
                    .map_err(|e| CliError::Invalid(component_context(file, a), e))?;
                results.push((a, g));
            }
            let combined: u128 = results.iter().map(|(_, g)| g.order).product();
            if wants_json(cli, &settings) {
                let v: Vec<_> = results
                    .iter()
                    .map(|(a, g)| {
                        serde_json::json!({
                            "p": a.shape().prime(),
                            "rank": g.order,
                            "trivial": g.is_trivial(),
                            "generators": g.generators,
                            "elements": g.elements,
                        })
                    })
                    .collect();
                Ok(to_json(&serde_json::json!({
                    "components": v,
                    "combined_rank": combined,
                    "combined_trivial": combined == 1,
                })))
            } else {
                let mut s = String::new();
                for (a, g) in &results {
                    let _ = writeln!(
                        s,
                        "p = {}: {} central elements out of {}",
                        a.shape().prime(),
                        g.order,
                        a.shape().order()
                    );
                    let _ = writeln!(s, "  generators: {}", fmt_elements(&g.generators));
                }
                let _ = writeln!(
                    s,
                    "combined rank {combined} ({})",
                    if combined == 1 { "trivial center" } else { "nontrivial center" }
                );
                Ok(s)
            }
        }
        Command::CocycleCheck { file } => {
            let text = read(file)?;
            let cf: CocycleFile =
                serde_json::from_str(&text).map_err(|e| CliError::Parse(file.clone(), e))?;
            let ctx = format!("{}", file.display());
            let shape = PGroupShape::new(cf.p, &cf.blocks)
                .map_err(|e| CliError::Invalid(ctx.clone(), e))?;
            let table = CocycleTable::new(shape, &cf.values)
                .map_err(|e| CliError::Invalid(ctx.clone(), e))?;
            table
                .validate(DEFAULT_VALIDATION_CAP)
                .map_err(|e| match e {
                    Error::NotACocycle(s, t, r) => {
                        let sh = table.shape();
                        CliError::Invalid(
                            format!(
                                "{ctx}: triple σ={:?}, τ={:?}, ρ={:?}",
                                sh.element_at(s).0,
                                sh.element_at(t).0,
                                sh.element_at(r).0
                            ),
                            e,
                        )
                    }
                    e => CliError::Invalid(ctx.clone(), e),
                })?;
            let a = table
                .derive_pairing()
                .map_err(|e| CliError::Invalid(ctx.clone(), e))?;
            let settings = effective_settings(cli, &Settings::default());
            if wants_json(cli, &settings) {
                Ok(to_json(&serde_json::json!({
                    "valid": true,
                    "p": cf.p,
                    "blocks": cf.blocks,
                    "pairing_matrix": a.to_rows(),
                })))
            } else {
                let mut s = format!("valid 2-cocycle on {}\npairing matrix:\n", a.shape());
                for row in a.to_rows() {
                    let _ = writeln!(s, "{row:?}");
                }
                Ok(s)
            }
        }
        Command::Selftest {
            trials,
            max_weight,
        } => selftest(cli, *trials, *max_weight),
    }
}

fn wants_json(cli: &Cli, settings: &Settings) -> bool {
    cli.json || settings.format == Some(OutputFormat::Json)
}

/// File settings overridden by command-line flags.
fn effective_settings(cli: &Cli, file: &Settings) -> Settings {
    Settings {
        max_enumeration: cli.max_enumeration.or(file.max_enumeration),
        methods: cli
            .methods
            .as_ref()
            .map(|m| m.iter().map(|&x| x.into()).collect())
            .or_else(|| file.methods.clone()),
        format: file.format,
    }
}

fn analyze_options(settings: &Settings) -> AnalyzeOptions {
    AnalyzeOptions {
        max_enumeration: settings.max_enumeration.unwrap_or(DEFAULT_ENUMERATION_CAP),
        oracle: match &settings.methods {
            None => OracleMode::Auto,
            Some(m) if m.contains(&Method::Oracle) => OracleMode::Always,
            Some(_) => OracleMode::Never,
        },
    }
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

pub fn parse_problem(text: &str) -> serde_json::Result<ProblemFile> {
    serde_json::from_str(text)
}

fn load_problem(path: &Path) -> CliResult<ProblemFile> {
    parse_problem(&read(path)?).map_err(|e| CliError::Parse(path.to_path_buf(), e))
}

fn component_context(path: &Path, a: &PairingMatrix) -> String {
    format!("{}: component p = {}", path.display(), a.shape().prime())
}

/// Validates every component and rejects repeated primes.
fn build_pairings(path: &Path, problem: &ProblemFile) -> CliResult<Vec<PairingMatrix>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (i, c) in problem.components.iter().enumerate() {
        let ctx = format!("{}: component {} (p = {})", path.display(), i + 1, c.p);
        if !seen.insert(c.p) {
            return Err(CliError::Invalid(ctx, Error::DuplicatePrime(c.p)));
        }
        let shape = PGroupShape::new(c.p, &c.blocks).map_err(|e| CliError::Invalid(ctx.clone(), e))?;
        let a = PairingMatrix::new(shape, &c.matrix).map_err(|e| CliError::Invalid(ctx, e))?;
        out.push(a);
    }
    if out.is_empty() {
        return Err(CliError::Invalid(
            format!("{}", path.display()),
            Error::EmptyShape,
        ));
    }
    Ok(out)
}

/// Runs the full pipeline on a parsed problem.
pub fn analyze_file_contents(problem: &ProblemFile, settings: &Settings) -> Result<ReportFile, String> {
    analyze_problem(Path::new("<input>"), problem, settings).map_err(|e| e.message())
}

fn analyze_problem(path: &Path, problem: &ProblemFile, settings: &Settings) -> CliResult<ReportFile> {
    let start = Instant::now();
    let pairings = build_pairings(path, problem)?;
    let options = analyze_options(settings);
    let mut analyses: Vec<Analysis> = Vec::new();
    for a in &pairings {
        let analysis = center::analyze_full(a, &options).map_err(|e| match e {
            Error::MethodsDisagree(_) | Error::InternalInconsistency(_) => CliError::Failed(e),
            e => CliError::Invalid(component_context(path, a), e),
        })?;
        analyses.push(analysis);
    }
    let reports: Vec<CenterReport> = analyses.iter().map(|x| x.report.clone()).collect();
    let combined = center::tensor_combine(&reports).map_err(CliError::Failed)?;

    let input = ProblemFile {
        components: pairings
            .iter()
            .map(|a| ComponentSpec {
                p: a.shape().prime(),
                blocks: a.shape().raw_blocks(),
                matrix: a
                    .to_rows()
                    .into_iter()
                    .map(|r| r.into_iter().map(|x| x as i64).collect())
                    .collect(),
            })
            .collect(),
        settings: settings.clone(),
    };
    let components = analyses
        .iter()
        .map(|x| {
            let shape = x.pairing.shape();
            ComponentReport {
                p: shape.prime(),
                blocks: shape.raw_blocks(),
                group_order: shape.order(),
                pairing_matrix: x.pairing.to_rows(),
                normalized_modulus: x.normalized.matrix().modulus().value(),
                normalized_matrix: x.normalized.to_rows(),
                theorem_trivial: x.theorem_trivial,
                diagonal_valuations: x.diagonal.valuations.clone(),
                zero_columns: x.diagonal.zero_columns,
                kernel: KernelReport::from(&x.kernel),
                oracle_rank: x.oracle.as_ref().map(|o| o.order),
                center: x.report.clone(),
            }
        })
        .collect();
    Ok(ReportFile {
        input,
        components,
        combined,
        timing_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn fmt_elements(elems: &[GroupElement]) -> String {
    if elems.is_empty() {
        return "none".into();
    }
    elems
        .iter()
        .map(|g| format!("{:?}", g.0))
        .collect::<Vec<_>>()
        .join(", ")
}

fn fmt_methods(m: &BTreeSet<Method>) -> String {
    m.iter().map(Method::to_string).collect::<Vec<_>>().join(", ")
}

fn render_kernel(s: &mut String, k: &KernelDescription) {
    let _ = writeln!(s, "  kernel over Z/{}: {} solutions", k.modulus.value(), k.size);
    match &k.per_variable {
        Some(vars) => {
            for (i, c) in vars.iter().enumerate() {
                let _ = writeln!(s, "    x{} {}", i + 1, c);
            }
        }
        None => {
            for g in &k.generators {
                let _ = writeln!(s, "    generator {:?}", g.0);
            }
        }
    }
}

fn render_report(r: &ReportFile) -> String {
    let mut s = String::new();
    for c in &r.components {
        let shape = PGroupShape::new(c.p, &c.blocks).expect("validated");
        let _ = writeln!(s, "p = {}: G = {}, |G| = {}", c.p, shape, c.group_order);
        let _ = writeln!(s, "  pairing matrix:");
        for row in &c.pairing_matrix {
            let _ = writeln!(s, "    {row:?}");
        }
        let _ = writeln!(s, "  normalized matrix (mod {}):", c.normalized_modulus);
        for row in &c.normalized_matrix {
            let _ = writeln!(s, "    {row:?}");
        }
        let _ = writeln!(
            s,
            "  diagonal valuations: {:?}, zero columns: {}",
            c.diagonal_valuations, c.zero_columns
        );
        let k = &c.kernel;
        let _ = writeln!(s, "  kernel over Z/{}: {} solutions", k.modulus, k.size);
        if let Some(steps) = &k.steps {
            for (i, &step) in steps.iter().enumerate() {
                let c = solver::VariableConstraint {
                    step,
                    modulus: k.modulus,
                };
                let _ = writeln!(s, "    x{} {}", i + 1, c);
            }
        }
        let _ = writeln!(
            s,
            "  block criterion: {}",
            if c.theorem_trivial { "all diagonal blocks invertible" } else { "some diagonal block singular" }
        );
        if let Some(o) = c.oracle_rank {
            let _ = writeln!(s, "  enumeration: {o} central elements");
        }
        let _ = writeln!(
            s,
            "  G_reg: rank {}, generators {}",
            c.center.rank,
            fmt_elements(&c.center.greg_generators)
        );
        let _ = writeln!(s, "  methods agreed: {}", fmt_methods(&c.center.methods_agreed));
    }
    let _ = writeln!(
        s,
        "center: {} (rank {} over the base ring)",
        if r.combined.trivial { "trivial" } else { "nontrivial" },
        r.combined.rank
    );
    let _ = writeln!(s, "elapsed: {:.2} ms", r.timing_ms);
    s
}

fn selftest(cli: &Cli, trials: usize, max_weight: u32) -> CliResult<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let options = AnalyzeOptions {
        max_enumeration: cli.max_enumeration.unwrap_or(DEFAULT_ENUMERATION_CAP),
        oracle: OracleMode::Always,
    };
    let mut instances = 0usize;
    let mut trivial = 0usize;
    for p in [2u64, 3] {
        let shapes = shape::shapes_up_to(p, max_weight, 3).map_err(CliError::Failed)?;
        for shape in shapes {
            for _ in 0..trials {
                let a = PairingMatrix::random(shape.clone(), &mut rng);
                let r = center::analyze(&a, &options).map_err(CliError::Failed)?;
                instances += 1;
                trivial += r.trivial as usize;
            }
        }
    }
    if cli.json {
        Ok(to_json(&serde_json::json!({
            "seed": cli.seed,
            "instances": instances,
            "trivial": trivial,
            "disagreements": 0,
        })))
    } else {
        Ok(format!(
            "selftest seed {}: {instances} instances, {trivial} with trivial center, all methods agree\n",
            cli.seed
        ))
    }
}
