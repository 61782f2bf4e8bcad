//! `subspace`: command-line frontend for subspace-core.
//!
//! Exit codes: 0 success (including negative position verdicts), 2 arrangement
//! rejected by the position check, 3 experiment sample fell short of the
//! requested count, 64 usage or input syntax error, 65 domain error, 66 I/O
//! error.

mod input;
mod output;

use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use subspace_core::arith::{factor_biguint, norm, product_formula_residual, PrimePower};
use subspace_core::experiments::{
    delta_budget, run_evertse_ferretti_baseline, run_main_experiment, ChainChecker, ChainRecord,
    ExperimentConfig,
};
use subspace_core::position::check_subgeneral;
use subspace_core::quang::quang_combine;
use subspace_core::seshadri::seshadri_constant;
use subspace_core::weil::{height, write_batch_csv, BatchManifest, MinMode, Target, WeilValue};
use subspace_core::{LinearForm, LinearSubvariety, Place, ProjPoint, Rat};

use input::{load, parse_place, parse_rat};
use output::{ledger, Artifact, Table};

pub const EXIT_REJECTED: u8 = 2;
pub const EXIT_PARTIAL: u8 = 3;
pub const EXIT_USAGE: u8 = 64;
pub const EXIT_DOMAIN: u8 = 65;
pub const EXIT_IO: u8 = 66;

#[derive(Parser)]
#[command(name = "subspace", version, about = "Heights, Weil functions and subspace-theorem experiments over Q")]
struct Cli {
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Override the seed of an experiment config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for parallel evaluation (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Progress and timing on stderr.
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Normalized absolute values of a rational at chosen places, with its product-formula ledger.
    Norm(NormArgs),
    /// Absolute logarithmic height of a rational point, with its canonical coordinates.
    Height(HeightArgs),
    /// Local Weil function of a hyperplane, divisor or closed subscheme at a point.
    Weil(WeilArgs),
    /// Subgeneral-position checks for hyperplane arrangements.
    #[command(subcommand)]
    Position(PositionCommand),
    /// Generic linear combinations turning subgeneral into general position.
    #[command(subcommand)]
    Quang(QuangCommand),
    /// Seshadri constant of a supported subscheme with respect to the hyperplane class.
    Seshadri(TargetArgs),
    /// Sampled-point experiments on the weighted proximity inequality.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
    /// Pointwise chain inequality between an arrangement and its combination certificate.
    #[command(subcommand)]
    Chain(ChainCommand),
    /// Largest dyadic delta fitting the epsilon budget for given l and n.
    Delta(DeltaArgs),
}

#[derive(Subcommand)]
enum PositionCommand {
    /// Decides l-subgeneral position and lists every violating subset.
    Check(PositionArgs),
}

#[derive(Subcommand)]
enum QuangCommand {
    /// Builds n + 1 forms in general position from l + 1 forms in l-subgeneral position.
    Combine(ArrangementArgs),
}

#[derive(Subcommand)]
enum ExperimentCommand {
    /// Weighted l-subgeneral inequality on sampled points of bounded height.
    Run(ConfigArgs),
    /// General-position baseline (l = n) on the same sampling pipeline.
    Baseline(ConfigArgs),
}

#[derive(Subcommand)]
enum ChainCommand {
    /// Evaluates both sides of the chain inequality at points and places.
    Check(ChainArgs),
}

#[derive(Args)]
struct NormArgs {
    /// A rational such as -12/35.
    #[arg(allow_hyphen_values = true)]
    x: String,
    /// Place as "inf" or a prime; repeatable. Defaults to inf and every prime dividing x.
    #[arg(long = "place")]
    places: Vec<String>,
}

#[derive(Args)]
struct HeightArgs {
    /// Coordinates as a JSON array (integers or "a/b" strings) or a file.
    point: String,
}

#[derive(Args)]
struct TargetArgs {
    /// Hyperplane as a JSON coefficient array.
    #[arg(long, conflicts_with_all = ["divisor", "subscheme", "target"])]
    hyperplane: Option<String>,
    /// Hypersurface as {"dim", "degree", "terms": [{"exponents", "coeff"}]}.
    #[arg(long, conflicts_with_all = ["subscheme", "target"])]
    divisor: Option<String>,
    /// Closed subscheme as {"label", "components": [forms]}.
    #[arg(long, conflicts_with = "target")]
    subscheme: Option<String>,
    /// Tagged target: {"linear": ...}, {"form": ...} or {"subscheme": ...}.
    #[arg(long)]
    target: Option<String>,
}

impl TargetArgs {
    fn given(&self) -> bool {
        self.hyperplane.is_some()
            || self.divisor.is_some()
            || self.subscheme.is_some()
            || self.target.is_some()
    }

    fn resolve(&self) -> Result<Target, CliError> {
        if let Some(s) = &self.hyperplane {
            return Ok(Target::Linear(load(s)?));
        }
        if let Some(s) = &self.divisor {
            return Ok(Target::Form(load(s)?));
        }
        if let Some(s) = &self.subscheme {
            return Ok(Target::Subscheme(load(s)?));
        }
        if let Some(s) = &self.target {
            return load(s);
        }
        Err(CliError::usage(
            "one of --hyperplane, --divisor, --subscheme or --target is required",
        ))
    }
}

#[derive(Args)]
struct WeilArgs {
    #[arg(long, required_unless_present = "manifest")]
    point: Option<String>,
    /// Place as "inf" or a prime; repeatable. Defaults to inf.
    #[arg(long = "place")]
    places: Vec<String>,
    #[command(flatten)]
    target: TargetArgs,
    /// Reject points on any subscheme component instead of dropping it from the minimum.
    #[arg(long)]
    strict: bool,
    /// Batch file {"points", "targets", "places", "mode"}; emits one row per triple.
    #[arg(long, conflicts_with_all = ["point", "places", "hyperplane", "divisor", "subscheme", "target"])]
    manifest: Option<String>,
}

#[derive(Args)]
struct ArrangementArgs {
    /// JSON array of linear forms (coefficient arrays), inline or a file.
    #[arg(long)]
    forms: String,
    /// JSON array of equations cutting out X; X is the whole space when omitted.
    #[arg(long)]
    subvariety: Option<String>,
    /// Places at which to report chain constants; repeatable. Defaults to inf.
    #[arg(long = "place")]
    places: Vec<String>,
}

impl ArrangementArgs {
    fn resolve(&self) -> Result<(Vec<LinearForm>, LinearSubvariety, Vec<Place>), CliError> {
        let forms: Vec<LinearForm> = load(&self.forms)?;
        let Some(first) = forms.first() else {
            return Err(CliError::domain("empty arrangement"));
        };
        let eqs: Vec<LinearForm> = match &self.subvariety {
            Some(s) => load(s)?,
            None => Vec::new(),
        };
        let x = LinearSubvariety::new(first.dim(), eqs)?;
        let places = places_or_inf(&self.places)?;
        Ok((forms, x, places))
    }
}

#[derive(Args)]
struct PositionArgs {
    #[command(flatten)]
    arrangement: ArrangementArgs,
    /// Subgeneral index; defaults to dim X (general position).
    #[arg(long)]
    l: Option<usize>,
}

#[derive(Args)]
struct ConfigArgs {
    /// Experiment config JSON, inline or a file.
    #[arg(long)]
    config: String,
}

#[derive(Args)]
struct ChainArgs {
    #[command(flatten)]
    arrangement: ArrangementArgs,
    /// A point; repeatable.
    #[arg(long = "point")]
    point: Vec<String>,
    /// JSON array of points, inline or a file.
    #[arg(long)]
    points: Option<String>,
}

#[derive(Args)]
struct DeltaArgs {
    #[arg(long)]
    l: usize,
    #[arg(long)]
    n: usize,
    /// A positive rational such as 1/10.
    #[arg(long)]
    epsilon: String,
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub msg: String,
    pub detail: Option<String>,
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            msg: msg.into(),
            detail: None,
        }
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        CliError {
            code: EXIT_DOMAIN,
            msg: msg.into(),
            detail: None,
        }
    }
}

impl From<subspace_core::Error> for CliError {
    fn from(e: subspace_core::Error) -> Self {
        use subspace_core::Error as E;
        let code = match &e {
            E::Parse(_) => EXIT_USAGE,
            E::Io(_) | E::Csv(_) => EXIT_IO,
            E::Position(_) => EXIT_REJECTED,
            _ => EXIT_DOMAIN,
        };
        let detail = match &e {
            E::Position(r) => serde_json::to_string_pretty(r).ok(),
            _ => None,
        };
        CliError {
            code,
            msg: e.to_string(),
            detail,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError {
            code: EXIT_IO,
            msg: e.to_string(),
            detail: None,
        }
    }
}

struct Ctx {
    format: Format,
    seed: Option<u64>,
    verbose: bool,
}

impl Ctx {
    fn log(&self, msg: impl AsRef<str>) {
        if self.verbose {
            eprintln!("subspace: {}", msg.as_ref());
        }
    }

    fn emit<T: Serialize>(&self, value: &T, table: impl FnOnce() -> Table) -> Result<Artifact, CliError> {
        match self.format {
            Format::Json => Artifact::json(value),
            Format::Csv => table().render(),
        }
    }
}

fn places_or_inf(raw: &[String]) -> Result<Vec<Place>, CliError> {
    if raw.is_empty() {
        return Ok(vec![Place::Infinite]);
    }
    let mut out: Vec<Place> = raw.iter().map(|s| parse_place(s)).collect::<Result<_, _>>()?;
    let before = out.len();
    out.sort();
    out.dedup();
    if out.len() != before {
        return Err(CliError::usage("duplicate --place"));
    }
    Ok(out)
}

#[derive(Serialize)]
struct NormEntry {
    place: Place,
    log_norm: f64,
    /// `log ||x||_p = -ord_p(x) log p`.
    ord: Option<i64>,
}

#[derive(Serialize)]
struct NormOutput {
    value: Rat,
    norms: Vec<NormEntry>,
    /// `(p, ord_p(x))` for every prime with nonzero valuation.
    finite_ledger: Vec<(u64, i64)>,
    archimedean_log: f64,
    product_formula_exact: bool,
    product_formula_float_residual: f64,
}

fn cmd_norm(ctx: &Ctx, a: &NormArgs) -> Result<Artifact, CliError> {
    let x = parse_rat(&a.x)?;
    let pf = product_formula_residual(&x)?;
    let places = if a.places.is_empty() {
        let mut v = vec![Place::Infinite];
        for (p, _) in factor_biguint(x.numer().magnitude())?
            .into_iter()
            .chain(factor_biguint(x.denom().magnitude())?)
        {
            v.push(Place::finite(p)?);
        }
        v.sort();
        v
    } else {
        places_or_inf(&a.places)?
    };
    let mut norms = Vec::with_capacity(places.len());
    for v in places {
        let n = norm(&x, v)?;
        norms.push(NormEntry {
            place: v,
            log_norm: n.approx,
            ord: n.exact.map(|e| e.exponent),
        });
    }
    let out = NormOutput {
        value: x,
        norms,
        finite_ledger: pf.finite.clone(),
        archimedean_log: pf.archimedean_log,
        product_formula_exact: pf.is_exact_zero(),
        product_formula_float_residual: pf.float_residual(),
    };
    ctx.emit(&out, || {
        let mut t = Table::new(&["place", "log_norm", "exact_ledger"]);
        for e in &out.norms {
            let exact = e.ord.map(|o| format!("{}*log({})", -o, e.place.prime().unwrap()));
            t.row([e.place.to_string(), e.log_norm.to_string(), exact.unwrap_or_default()]);
        }
        t
    })
}

#[derive(Serialize)]
struct HeightOutput {
    point: ProjPoint,
    canonical: String,
    height: f64,
}

fn cmd_height(ctx: &Ctx, a: &HeightArgs) -> Result<Artifact, CliError> {
    let p: ProjPoint = load(&a.point)?;
    let out = HeightOutput {
        canonical: p.to_string(),
        height: height(&p),
        point: p,
    };
    ctx.emit(&out, || {
        let mut t = Table::new(&["point", "height"]);
        t.row([out.canonical.clone(), out.height.to_string()]);
        t
    })
}

#[derive(Serialize)]
struct WeilOutput {
    values: Vec<WeilValue>,
    /// Sum over the requested places.
    sum: f64,
}

fn weil_row(t: &mut Table, w: &WeilValue) {
    t.row([
        w.point.to_string(),
        w.subject.clone(),
        w.place.to_string(),
        w.value.to_string(),
        w.exact.as_ref().map(ledger).unwrap_or_default(),
    ]);
}

const WEIL_COLUMNS: [&str; 5] = ["point", "target", "place", "value", "exact_ledger"];

#[derive(Serialize)]
struct BatchRow {
    point: ProjPoint,
    target: String,
    place: Place,
    /// `None` when the point lies on the target.
    value: Option<f64>,
    exact: Option<PrimePower>,
}

fn cmd_weil(ctx: &Ctx, a: &WeilArgs) -> Result<Artifact, CliError> {
    let mode = if a.strict { MinMode::Strict } else { MinMode::Lenient };
    if let Some(m) = &a.manifest {
        let mut manifest: BatchManifest = load(m)?;
        if a.strict {
            manifest.mode = MinMode::Strict;
        }
        ctx.log(format!(
            "batch of {} points x {} targets x {} places",
            manifest.points.len(),
            manifest.targets.len(),
            manifest.places.len()
        ));
        return match ctx.format {
            Format::Csv => {
                let mut buf = Vec::new();
                write_batch_csv(&manifest, &mut buf)?;
                Ok(Artifact(buf))
            }
            Format::Json => {
                let mut rows = Vec::new();
                for p in &manifest.points {
                    for t in &manifest.targets {
                        for &v in &manifest.places {
                            let (value, exact) = match t.weil(p, v, manifest.mode) {
                                Ok(w) => (Some(w.value), w.exact),
                                Err(subspace_core::Error::Support { .. }) => (None, None),
                                Err(e) => return Err(e.into()),
                            };
                            rows.push(BatchRow {
                                point: p.clone(),
                                target: t.to_string(),
                                place: v,
                                value,
                                exact,
                            });
                        }
                    }
                }
                Artifact::json(&rows)
            }
        };
    }
    if !a.target.given() {
        return Err(CliError::usage(
            "weil needs --manifest or one of --hyperplane, --divisor, --subscheme, --target",
        ));
    }
    let p: ProjPoint = load(a.point.as_deref().expect("required by clap"))?;
    let target = a.target.resolve()?;
    let places = places_or_inf(&a.places)?;
    let values: Vec<WeilValue> = places
        .iter()
        .map(|&v| target.weil(&p, v, mode))
        .collect::<Result<_, _>>()?;
    let out = WeilOutput {
        sum: values.iter().map(|w| w.value).sum(),
        values,
    };
    ctx.emit(&out, || {
        let mut t = Table::new(&WEIL_COLUMNS);
        for w in &out.values {
            weil_row(&mut t, w);
        }
        t
    })
}

fn cmd_position(ctx: &Ctx, a: &PositionArgs) -> Result<Artifact, CliError> {
    let (forms, x, _) = a.arrangement.resolve()?;
    let l = a.l.unwrap_or(x.dim());
    let report = check_subgeneral(&forms, &x, l)?;
    ctx.log(format!(
        "{} forms, dim X = {}, l = {l}: verdict {}",
        forms.len(),
        x.dim(),
        report.verdict
    ));
    ctx.emit(&report, || {
        let mut t = Table::new(&["verdict", "l", "indices", "dim", "bound"]);
        if report.witnesses.is_empty() {
            t.row([report.verdict.to_string(), l.to_string(), String::new(), String::new(), String::new()]);
        }
        for w in &report.witnesses {
            t.row([
                report.verdict.to_string(),
                l.to_string(),
                join(&w.indices),
                w.dim.to_string(),
                w.bound.to_string(),
            ]);
        }
        t
    })
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

fn cmd_quang(ctx: &Ctx, a: &ArrangementArgs) -> Result<Artifact, CliError> {
    let (forms, x, places) = a.resolve()?;
    let cert = quang_combine(&forms, &x)?.with_places(&places);
    cert.verify()?;
    ctx.log(format!("certificate: l = {}, n = {}, verified", cert.l, cert.n));
    ctx.emit(&cert, || {
        let mut t = Table::new(&["t", "output", "coefficients"]);
        for (i, (f, c)) in cert.outputs.iter().zip(&cert.coefficients).enumerate() {
            t.row([(i + 1).to_string(), f.to_string(), join(c)]);
        }
        t
    })
}

fn cmd_seshadri(ctx: &Ctx, a: &TargetArgs) -> Result<Artifact, CliError> {
    let target = a.resolve()?;
    let s = seshadri_constant(&target)?;
    ctx.emit(&s, || {
        let mut t = Table::new(&["target", "value", "justification"]);
        t.row([target.to_string(), s.value.to_string(), s.justification.clone()]);
        t
    })
}

fn cmd_experiment(ctx: &Ctx, a: &ConfigArgs, baseline: bool) -> Result<(Artifact, bool), CliError> {
    let mut cfg: ExperimentConfig = load(&a.config)?;
    if let Some(s) = ctx.seed {
        cfg.seed = s;
    }
    let start = Instant::now();
    let report = if baseline {
        run_evertse_ferretti_baseline(&cfg)?
    } else {
        run_main_experiment(&cfg)?
    };
    ctx.log(format!(
        "{} points evaluated, {} violators, max ratio {:?}, chain {}/{} pass, {:.2}s",
        report.evaluated,
        report.violator_count,
        report.max_ratio,
        report.chain_check.passed,
        report.chain_check.checked,
        start.elapsed().as_secs_f64()
    ));
    let artifact = match ctx.format {
        Format::Json => {
            let mut s = report.to_json()?;
            s.push('\n');
            Artifact(s.into_bytes())
        }
        Format::Csv => {
            let mut buf = Vec::new();
            report.write_csv(&mut buf)?;
            Artifact(buf)
        }
    };
    Ok((artifact, report.sample.partial))
}

fn cmd_chain(ctx: &Ctx, a: &ChainArgs) -> Result<Artifact, CliError> {
    let (forms, x, places) = a.arrangement.resolve()?;
    let mut points: Vec<ProjPoint> = a.point.iter().map(|s| load(s)).collect::<Result<_, _>>()?;
    if let Some(s) = &a.points {
        points.extend(load::<Vec<ProjPoint>>(s)?);
    }
    if points.is_empty() {
        return Err(CliError::usage("chain check needs --point or --points"));
    }
    let checker = ChainChecker::new(&forms, &x)?;
    let mut records: Vec<ChainRecord> = Vec::new();
    for p in &points {
        for &v in &places {
            records.push(checker.check(p, v)?);
        }
    }
    ctx.log(format!(
        "{} checks, {} pass, {} certificates",
        records.len(),
        records.iter().filter(|r| r.pass).count(),
        checker.certificates_built()
    ));
    ctx.emit(&records, || {
        let mut t = Table::new(&[
            "place", "point", "ordering", "lhs", "rhs", "k", "slack", "pass", "sorted", "exact_lhs",
            "exact_rhs",
        ]);
        for r in &records {
            let (el, er) = r
                .exact
                .map(|e| (e.lhs.to_string(), e.rhs.to_string()))
                .unwrap_or_default();
            t.row([
                r.place.to_string(),
                r.point.to_string(),
                join(&r.ordering),
                r.lhs.to_string(),
                r.rhs.to_string(),
                r.k.to_string(),
                r.slack.to_string(),
                r.pass.to_string(),
                r.sorted.to_string(),
                el,
                er,
            ]);
        }
        t
    })
}

#[derive(Serialize)]
struct DeltaOutput {
    l: usize,
    n: usize,
    epsilon: Rat,
    delta: Rat,
    delta_value: f64,
    /// `δ(l-n+1) + δ(l-n+1)(n+1+δ)`, strictly below epsilon.
    budget_used: Rat,
}

fn cmd_delta(ctx: &Ctx, a: &DeltaArgs) -> Result<Artifact, CliError> {
    let eps = parse_rat(&a.epsilon)?;
    let delta = delta_budget(a.l, a.n, &eps)?;
    let da = &delta * &Rat::from_integer((a.l - a.n + 1) as i64);
    let used = &da + &(&da * &(&Rat::from_integer((a.n + 1) as i64) + &delta));
    let out = DeltaOutput {
        l: a.l,
        n: a.n,
        delta_value: delta.to_f64(),
        epsilon: eps,
        delta,
        budget_used: used,
    };
    ctx.emit(&out, || {
        let mut t = Table::new(&["l", "n", "epsilon", "delta", "budget_used"]);
        t.row([
            out.l.to_string(),
            out.n.to_string(),
            out.epsilon.to_string(),
            out.delta.to_string(),
            out.budget_used.to_string(),
        ]);
        t
    })
}

fn dispatch(ctx: &Ctx, cmd: &Command) -> Result<(Artifact, u8), CliError> {
    let plain = |r: Result<Artifact, CliError>| r.map(|a| (a, 0));
    match cmd {
        Command::Norm(a) => plain(cmd_norm(ctx, a)),
        Command::Height(a) => plain(cmd_height(ctx, a)),
        Command::Weil(a) => plain(cmd_weil(ctx, a)),
        Command::Position(PositionCommand::Check(a)) => plain(cmd_position(ctx, a)),
        Command::Quang(QuangCommand::Combine(a)) => plain(cmd_quang(ctx, a)),
        Command::Seshadri(a) => plain(cmd_seshadri(ctx, a)),
        Command::Experiment(e) => {
            let (art, partial) = match e {
                ExperimentCommand::Run(a) => cmd_experiment(ctx, a, false)?,
                ExperimentCommand::Baseline(a) => cmd_experiment(ctx, a, true)?,
            };
            if partial {
                eprintln!("subspace: warning: sampler returned fewer points than requested");
            }
            Ok((art, if partial { EXIT_PARTIAL } else { 0 }))
        }
        Command::Chain(ChainCommand::Check(a)) => plain(cmd_chain(ctx, a)),
        Command::Delta(a) => plain(cmd_delta(ctx, a)),
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let ctx = Ctx {
        format: cli.format,
        seed: cli.seed,
        verbose: cli.verbose,
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(CliError::usage("--workers must be positive"));
        }
        builder = builder.num_threads(w);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::domain(format!("thread pool: {e}")))?;
    let (artifact, code) = pool.install(|| dispatch(&ctx, &cli.command))?;
    artifact.write(cli.out.as_deref())?;
    Ok(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.msg);
            if let Some(d) = e.detail {
                eprintln!("{d}");
            }
            ExitCode::from(e.code)
        }
    }
}
