use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use linksig::abelian::AbelianPresentation;
use linksig::hermitian::{solver_by_name, solver_names, DEFAULT_ZERO_THRESHOLD};
use linksig::integrate::{
    r_invariant, rho2, sample_records, write_csv, DegeneratePolicy, IntegralResult,
    IntegrationConfig, DEFAULT_MAX_POINTS_PER_COMPONENT, DEFAULT_POINTS_PER_DIM, DEFAULT_TOL,
};
use linksig::seifert::{braid_seifert, torus_link_data, BraidWord, ColoredSeifertData};
use linksig::signature::{cf_signature_with, EvalOptions};
use linksig::torus::TorusPoint;
use linksig::twistknot::{self, ExceptionAudit, ListDiff, ReferenceDiff};

const EXIT_INPUT: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(
    name = "linksig",
    version,
    about = "Colored-link signatures, rho-invariants and twist-knot audits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Signature and nullity of H(ω) at one point
    Sig(SigArgs),
    /// Normalized integral of the signature over the subtorus of a group
    Integrate(IntegrateArgs),
    /// Twist-knot classification and exception search
    #[command(subcommand)]
    Twist(TwistCommand),
    /// Seifert data of a braid closure
    Braid(BraidArgs),
    /// Seifert data of the torus link T(p, q)
    Torus(TorusArgs),
}

#[derive(Parser)]
struct SigArgs {
    #[arg(long)]
    link: PathBuf,
    /// Comma-separated angles in turns, e.g. "1/2" or "1/3,0.25"
    #[arg(long, allow_hyphen_values = true)]
    omega: String,
    #[arg(long, default_value = "householder")]
    solver: String,
    #[arg(long, default_value_t = DEFAULT_ZERO_THRESHOLD)]
    zero_threshold: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Parser)]
struct IntegrateArgs {
    #[arg(long)]
    link: PathBuf,
    /// "Z^n" or "n=<gens>; rel=<row>; <row>..."; defaults to the free group on the colors
    #[arg(long)]
    group: Option<String>,
    #[arg(long, default_value_t = DEFAULT_POINTS_PER_DIM)]
    grid: u64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Largest grid, in points per torsion component, refinement may reach
    #[arg(long, default_value_t = DEFAULT_MAX_POINTS_PER_COMPONENT)]
    max_points: u64,
    /// Seifert data of L± with twice the colors, for points with a coordinate equal to 1
    #[arg(long)]
    pm: Option<PathBuf>,
    /// Use the plain signature at points with a coordinate equal to 1
    #[arg(long)]
    fallback_degenerate: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Also write per-sample signatures on the requested grid as CSV
    #[arg(long)]
    samples: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value = "householder")]
    solver: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum TwistCommand {
    /// Algebraic concordance order of T_n
    Classify {
        #[arg(allow_hyphen_values = true)]
        n: i64,
    },
    /// Audit every order-two n up to --nmax
    Exceptions(ExceptionsArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Parser)]
struct ExceptionsArgs {
    #[arg(long, default_value_t = 150)]
    nmax: i64,
    /// Compare with the published candidate and filtered lists
    #[arg(long)]
    paper_diff: bool,
    /// Only decompositions with a >= b
    #[arg(long)]
    strict_geometry: bool,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    format: ReportFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Parser)]
struct BraidArgs {
    #[arg(long)]
    strands: usize,
    /// Space-separated signed generators, e.g. "1 -2 1"
    #[arg(long, allow_hyphen_values = true)]
    word: String,
    #[arg(long)]
    label: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Parser)]
struct TorusArgs {
    #[arg(long, allow_hyphen_values = true)]
    p: i64,
    #[arg(long, allow_hyphen_values = true)]
    q: i64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Budget(String),
}

impl From<linksig::Error> for Failure {
    fn from(e: linksig::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Sig(a) => cmd_sig(a),
        Command::Integrate(a) => cmd_integrate(a),
        Command::Twist(TwistCommand::Classify { n }) => {
            println!("{}", twistknot::classify(n));
            Ok(())
        }
        Command::Twist(TwistCommand::Exceptions(a)) => cmd_exceptions(a),
        Command::Braid(a) => cmd_braid(a),
        Command::Torus(a) => cmd_torus(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_BUDGET)
        }
    }
}

fn load_link(path: &Path) -> Result<ColoredSeifertData, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    ColoredSeifertData::from_json(&text)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn eval_options(solver: &str, zero_threshold: f64) -> Result<EvalOptions, Failure> {
    let solver = solver_by_name(solver).ok_or_else(|| {
        Failure::Input(format!(
            "unknown solver {solver:?}; available: {}",
            solver_names().join(", ")
        ))
    })?;
    if !(zero_threshold > 0.0 && zero_threshold < 1.0) {
        return Err(Failure::Input(format!(
            "zero threshold must lie in (0, 1), got {zero_threshold}"
        )));
    }
    Ok(EvalOptions {
        solver,
        zero_threshold,
    })
}

/// Writes through a temporary file in the target directory, so a failed run
/// leaves no partial output.
fn write_atomic(
    path: &Path,
    write: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
) -> CmdResult {
    let io_err = |e: std::io::Error| Failure::Input(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    write(&mut tmp).map_err(io_err)?;
    tmp.flush().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

fn emit(out: Option<&Path>, text: &str) -> CmdResult {
    match out {
        Some(p) => write_atomic(p, |w| w.write_all(text.as_bytes())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_sig(a: SigArgs) -> CmdResult {
    let opts = eval_options(&a.solver, a.zero_threshold)?;
    let d = load_link(&a.link)?;
    let omega = TorusPoint::parse(&a.omega)?;
    let v = cf_signature_with(&opts, &d, &omega)?;
    if !omega.is_punctured() {
        eprintln!(
            "warning: ω has a coordinate equal to 1; H(ω) is degenerate there (nullity {})",
            v.nullity
        );
    }
    println!("signature={} nullity={}", v.signature, v.nullity);
    Ok(())
}

fn result_csv(r: &IntegralResult) -> String {
    format!(
        "kind,value,exact,grid,estimated_error,samples,degenerate_samples,fallback_samples,converged\n\
         {},{:?},{},{},{:?},{},{},{},{}\n",
        serde_json::to_value(r.kind).unwrap().as_str().unwrap(),
        r.value,
        r.exact,
        r.grid,
        r.estimated_error,
        r.samples,
        r.degenerate_samples,
        r.fallback_samples,
        r.converged
    )
}

fn cmd_integrate(a: IntegrateArgs) -> CmdResult {
    let eval = eval_options(&a.solver, DEFAULT_ZERO_THRESHOLD)?;
    if a.grid == 0 {
        return Err(Failure::Input("--grid must be positive".into()));
    }
    if a.tol.is_nan() || a.tol <= 0.0 {
        return Err(Failure::Input("--tol must be positive".into()));
    }
    if a.workers == Some(0) {
        return Err(Failure::Input("--workers must be positive".into()));
    }
    let d = load_link(&a.link)?;
    let group: AbelianPresentation = match &a.group {
        Some(g) => g.parse()?,
        None => AbelianPresentation::free(d.colors())?,
    };
    let pm = a.pm.as_deref().map(load_link).transpose()?;
    let cfg = IntegrationConfig {
        points_per_dim: a.grid,
        tol: a.tol,
        max_points_per_component: a.max_points,
        workers: a.workers,
        eval,
        degenerate: if a.fallback_degenerate {
            DegeneratePolicy::NaiveFallback
        } else {
            DegeneratePolicy::Reject
        },
    };
    if let Some(path) = &a.samples {
        let recs = sample_records(&d, &group, pm.as_ref(), &cfg)?;
        write_atomic(path, |w| write_csv(&recs, w))?;
    }
    let r = match (&a.group, &pm) {
        (None, None) => r_invariant(&d, &cfg)?,
        _ => rho2(&d, &group, pm.as_ref(), &cfg)?,
    };
    let text = match a.format {
        Format::Json => serde_json::to_string_pretty(&r).unwrap() + "\n",
        Format::Csv => result_csv(&r),
    };
    emit(a.out.as_deref(), &text)?;
    if !r.converged {
        return Err(Failure::Budget(format!(
            "estimated error {:e} is above tolerance {} at the point budget",
            r.estimated_error, a.tol
        )));
    }
    Ok(())
}

fn join(ns: &[i64]) -> String {
    ns.iter().map(i64::to_string).collect::<Vec<_>>().join(" ")
}

fn diff_text(title: &str, d: &ListDiff, out: &mut String) {
    use std::fmt::Write as _;
    let _ = writeln!(
        out,
        "{title} ({} values): {}",
        d.reference.len(),
        join(&d.reference)
    );
    if d.agrees() {
        let _ = writeln!(out, "  agrees with computed list");
        return;
    }
    for e in &d.only_reference {
        match e.witness {
            Some(w) => {
                let _ = writeln!(out, "  only in reference: {} obstructed by {w}", e.n);
            }
            None => {
                let _ = writeln!(out, "  only in reference: {} (no witness found)", e.n);
            }
        }
    }
    if !d.only_computed.is_empty() {
        let _ = writeln!(out, "  only computed: {}", join(&d.only_computed));
    }
}

fn exceptions_text(
    a: &ExceptionsArgs,
    audits: &[ExceptionAudit],
    diff: Option<&ReferenceDiff>,
) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    let cands = twistknot::candidates(audits);
    let filtered: Vec<i64> = twistknot::prime_filter(audits)
        .iter()
        .map(|x| x.n)
        .collect();
    let mode = if a.strict_geometry {
        "a >= b"
    } else {
        "all a, b >= 1"
    };
    let _ = writeln!(
        out,
        "order-two n <= {}: {} audited ({mode})",
        a.nmax,
        audits.len()
    );
    let _ = writeln!(
        out,
        "candidate exceptions ({}): {}",
        cands.len(),
        join(&cands)
    );
    let _ = writeln!(
        out,
        "after prime filter ({}): {}",
        filtered.len(),
        join(&filtered)
    );
    let e = twistknot::ellipse_bound();
    let scope = if a.strict_geometry {
        "without the a >= b restriction no candidate exceeds"
    } else {
        "no candidate exceeds"
    };
    let _ = writeln!(
        out,
        "f <= 0 forces a <= {}, b <= {}; {scope} n = {}",
        e.max_a, e.max_b, e.max_n
    );
    if let Some(d) = diff {
        diff_text("reference candidates", &d.candidates, &mut out);
        diff_text("reference filtered", &d.filtered, &mut out);
    }
    out
}

fn cmd_exceptions(a: ExceptionsArgs) -> CmdResult {
    if a.nmax < 1 {
        return Err(Failure::Input("--nmax must be at least 1".into()));
    }
    let audits = twistknot::exceptions(a.nmax, a.strict_geometry);
    let diff = a
        .paper_diff
        .then(|| twistknot::reference_diff(&audits, a.nmax, a.strict_geometry));
    let text = match a.format {
        ReportFormat::Text => exceptions_text(&a, &audits, diff.as_ref()),
        ReportFormat::Json => {
            let doc = serde_json::json!({
                "audits": audits,
                "candidates": twistknot::candidates(&audits),
                "filtered": twistknot::prime_filter(&audits).iter().map(|x| x.n).collect::<Vec<_>>(),
                "ellipse": twistknot::ellipse_bound(),
                "diff": diff,
            });
            serde_json::to_string_pretty(&doc).unwrap() + "\n"
        }
    };
    emit(a.out.as_deref(), &text)
}

fn cmd_braid(a: BraidArgs) -> CmdResult {
    let word = BraidWord::parse(a.strands, &a.word)?;
    let mut d = braid_seifert(&word)?;
    if let Some(l) = a.label {
        d = d.with_label(l);
    }
    write_atomic(&a.out, |w| w.write_all(d.to_canonical_json().as_bytes()))
}

fn cmd_torus(a: TorusArgs) -> CmdResult {
    let d = torus_link_data(a.p, a.q)?;
    write_atomic(&a.out, |w| w.write_all(d.to_canonical_json().as_bytes()))
}
