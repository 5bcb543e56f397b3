//! Command-line front end: flat key=value configuration merged with flags,
//! one subcommand per library capability, and text/JSON/CSV output.
//!
//! Exit codes: 0 ok, 2 usage, 3 numeric, 4 verification failure.

use crate::error::{Error, Result};
use crate::holonomy::{borromean_variant, build_rep_double, build_rep_whitehead, dpr_solve, export_domain, verify_relations, wp_geometric_u};
use crate::jones::{jones_with, KnotSpec, Precision};
use crate::potential::{boundary_gradient_check, contour_grid, saddle_double, saddle_whitehead, write_grid_csv, GridSpec, PotentialParams, Region};
use crate::qnum::RootOfUnityCtx;
use crate::volume::{complex_volume_whitehead_nz, convergence_study, jones_ladder, target_volume, ComplexVolume};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Map, Value};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_VERIFY_FAIL: i32 = 4;

/// Output format of every subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(format!("format must be text, json or csv, got {s:?}")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Text => "text",
            Format::Json => "json",
            Format::Csv => "csv",
        })
    }
}

/// Comma-separated list of N values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NList(pub Vec<usize>);

impl FromStr for NList {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        s.split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| format!("bad N in list: {t:?}")))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(NList)
    }
}

impl fmt::Display for NList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|n| n.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// Declares the config fields once: the clap flags, key=value parsing,
/// canonical printing and flag-over-file merging all come from this list.
macro_rules! run_config {
    ($($(#[$m:meta])* $field:ident : $ty:ty = $key:literal),* $(,)?) => {
        /// Every option of every subcommand; unset fields take command defaults.
        #[derive(Debug, Clone, Default, PartialEq, Args)]
        pub struct RunConfig {
            $($(#[$m])* #[arg(long = $key)] pub $field: Option<$ty>,)*
        }

        impl RunConfig {
            /// Parse flat `key = value` lines; `#` starts a comment.
            pub fn parse_kv(text: &str) -> Result<Self> {
                let mut c = Self::default();
                for (i, raw) in text.lines().enumerate() {
                    let line = raw.split('#').next().unwrap_or("").trim();
                    if line.is_empty() {
                        continue;
                    }
                    let (k, v) = line
                        .split_once('=')
                        .ok_or_else(|| Error::Usage(format!("config line {}: expected key = value", i + 1)))?;
                    let (k, v) = (k.trim(), v.trim());
                    match k {
                        $($key => {
                            c.$field = Some(v.parse::<$ty>().map_err(|e| Error::Usage(format!("config key {k}: {e}")))?);
                        })*
                        _ => return Err(Error::Usage(format!("unknown config key {k:?}"))),
                    }
                }
                Ok(c)
            }

            /// Canonical text: set keys only, in declaration order.
            pub fn to_canonical(&self) -> String {
                let mut out = String::new();
                $(if let Some(v) = &self.$field {
                    out.push_str(&format!("{} = {}\n", $key, v));
                })*
                out
            }

            /// Fields set in `self` win over `base`.
            pub fn over(self, base: RunConfig) -> RunConfig {
                RunConfig { $($field: self.$field.or(base.$field),)* }
            }
        }
    };
}

run_config! {
    /// borromean, b1, b11, whitehead, double or twist.
    knot: String = "knot",
    p: i64 = "p",
    r: i64 = "r",
    n: usize = "N",
    ns: NList = "Ns",
    out: String = "out",
    format: Format = "format",
    threads: usize = "threads",
    cache: String = "cache",
    /// Relative tolerance for `verify` (default 0.05).
    tol: f64 = "tol",
    /// auto, double or a bit count for the twisted sums.
    precision: Precision = "precision",
    /// saddle or nz (volume command, Whitehead only for nz).
    path: String = "path",
    x_min: f64 = "x-min",
    x_max: f64 = "x-max",
    y_min: f64 = "y-min",
    y_max: f64 = "y-max",
    nx: usize = "nx",
    ny: usize = "ny",
    shift_a: f64 = "shift-a",
    shift_b: f64 = "shift-b",
    /// e, eprime or edoubleprime.
    region: String = "region",
    samples: usize = "samples",
}

#[derive(Debug, Parser)]
#[command(name = "knotvol", version, about = "Colored Jones state sums, saddle points and complex volumes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct CommandArgs {
    /// Flat key=value file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunConfig,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate J_{N−1}(K) at q = e^{iπ/N}.
    Jones(CommandArgs),
    /// Solve for the saddle point of the potential.
    Saddle(CommandArgs),
    /// Complex volume Vol + i·CS.
    Volume(CommandArgs),
    /// Growth-rate convergence study with a PASS/FAIL verdict.
    Verify(CommandArgs),
    /// Sample the potential on a grid (CSV).
    Contour(CommandArgs),
    /// Holonomy representation and fixed points (JSON).
    Rep(CommandArgs),
    /// Boundary-gradient and uniqueness check on a region.
    Regioncheck(CommandArgs),
}

impl Command {
    fn args(&self) -> &CommandArgs {
        match self {
            Command::Jones(a)
            | Command::Saddle(a)
            | Command::Volume(a)
            | Command::Verify(a)
            | Command::Contour(a)
            | Command::Rep(a)
            | Command::Regioncheck(a) => a,
        }
    }
}

/// A printed value.
#[derive(Debug, Clone, PartialEq)]
pub enum Val {
    Real(f64),
    Int(i64),
    Cx(Complex64),
    Str(String),
}

impl From<f64> for Val {
    fn from(x: f64) -> Self {
        Val::Real(x)
    }
}
impl From<i64> for Val {
    fn from(x: i64) -> Self {
        Val::Int(x)
    }
}
impl From<usize> for Val {
    fn from(x: usize) -> Self {
        Val::Int(x as i64)
    }
}
impl From<Complex64> for Val {
    fn from(x: Complex64) -> Self {
        Val::Cx(x)
    }
}
impl From<String> for Val {
    fn from(x: String) -> Self {
        Val::Str(x)
    }
}
impl From<&str> for Val {
    fn from(x: &str) -> Self {
        Val::Str(x.to_string())
    }
}

/// 15 significant digits.
pub fn sig15(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let e = x.abs().log10().floor() as i32;
    if (-5..15).contains(&e) {
        format!("{:.*}", (14 - e).max(0) as usize, x)
    } else {
        format!("{x:.14e}")
    }
}

impl Val {
    fn text(&self) -> String {
        match self {
            Val::Real(x) => sig15(*x),
            Val::Int(i) => i.to_string(),
            Val::Cx(z) => {
                let sign = if z.im.is_sign_negative() { '-' } else { '+' };
                format!("{} {} {}i", sig15(z.re), sign, sig15(z.im.abs()))
            }
            Val::Str(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Val::Real(x) => json!(x),
            Val::Int(i) => json!(i),
            Val::Cx(z) => json!({"re": z.re, "im": z.im}),
            Val::Str(s) => json!(s),
        }
    }

    /// CSV cells; complex values take two columns.
    fn cells(&self) -> Vec<String> {
        match self {
            Val::Cx(z) => vec![sig15(z.re), sig15(z.im)],
            v => vec![v.text()],
        }
    }
}

type Record = Vec<(String, Val)>;

fn rec(fields: Vec<(&str, Val)>) -> Record {
    fields.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// Result of a command: rows of named values, an optional verdict line and
/// raw artifacts already written elsewhere.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub rows: Vec<Record>,
    pub verdict: Option<bool>,
}

impl Report {
    fn one(r: Record) -> Self {
        Self { rows: vec![r], verdict: None }
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Text => {
                let mut s = String::new();
                for (i, row) in self.rows.iter().enumerate() {
                    if i > 0 {
                        s.push('\n');
                    }
                    for (k, v) in row {
                        s.push_str(&format!("{k}: {}\n", v.text()));
                    }
                }
                if let Some(ok) = self.verdict {
                    s.push_str(if ok { "PASS\n" } else { "FAIL\n" });
                }
                Ok(s)
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| Value::Object(row.iter().map(|(k, v)| (k.clone(), v.json())).collect::<Map<_, _>>()))
                    .collect();
                let mut top = Map::new();
                if rows.len() == 1 {
                    top = match rows.into_iter().next() {
                        Some(Value::Object(m)) => m,
                        _ => Map::new(),
                    };
                } else {
                    top.insert("rows".into(), Value::Array(rows));
                }
                if let Some(ok) = self.verdict {
                    top.insert("verdict".into(), json!(if ok { "PASS" } else { "FAIL" }));
                }
                Ok(serde_json::to_string_pretty(&Value::Object(top))? + "\n")
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                if let Some(first) = self.rows.first() {
                    let mut header = Vec::new();
                    for (k, v) in first {
                        match v {
                            Val::Cx(_) => {
                                header.push(format!("{k}_re"));
                                header.push(format!("{k}_im"));
                            }
                            _ => header.push(k.clone()),
                        }
                    }
                    w.write_record(&header)?;
                }
                for row in &self.rows {
                    w.write_record(row.iter().flat_map(|(_, v)| v.cells()))?;
                }
                let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
                Ok(String::from_utf8_lossy(&bytes).into_owned())
            }
        }
    }
}

/// Map an error to its exit code.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Usage(_) | Error::Domain(_) => EXIT_USAGE,
        _ => EXIT_NUMERIC,
    }
}

impl RunConfig {
    pub fn knot_spec(&self) -> Result<KnotSpec> {
        let name = self.knot.as_deref().ok_or_else(|| Error::Usage("missing --knot".into()))?;
        let need = |v: Option<i64>, f: &str| v.ok_or_else(|| Error::Usage(format!("--knot {name} needs --{f}")));
        match name {
            "borromean" | "b" => Ok(KnotSpec::Borromean),
            "b1" => Ok(KnotSpec::B1),
            "b11" => Ok(KnotSpec::B11),
            "whitehead" | "w" => Ok(KnotSpec::Whitehead(need(self.p, "p")?)),
            "double" | "d" => Ok(KnotSpec::DoubleTwist(need(self.p, "p")?, need(self.r, "r")?)),
            "twist" | "t" => Ok(KnotSpec::twist_knot(need(self.p, "p")?)),
            other => Err(Error::Usage(format!("unknown knot {other:?}"))),
        }
    }

    fn format(&self) -> Format {
        self.format.unwrap_or(Format::Text)
    }

    fn ns(&self, default: &[usize]) -> Vec<usize> {
        match (&self.ns, self.n) {
            (Some(l), _) => l.0.clone(),
            (None, Some(n)) => vec![n],
            (None, None) => default.to_vec(),
        }
    }
}

fn volume_record(knot: KnotSpec, v: &ComplexVolume) -> Record {
    rec(vec![
        ("knot", knot.to_string().into()),
        ("vol", v.vol.into()),
        ("cs", v.cs.into()),
        ("raw", v.raw.into()),
        ("path", serde_json::to_value(v.path).ok().and_then(|x| x.as_str().map(String::from)).unwrap_or_default().into()),
    ])
}

fn cmd_jones(c: &RunConfig) -> Result<Report> {
    let knot = c.knot_spec()?;
    let ns = c.ns(&[]);
    if ns.is_empty() {
        return Err(Error::Usage("jones needs --N or --Ns".into()));
    }
    let precision = c.precision.unwrap_or_default();
    let values = match (&c.cache, precision) {
        (Some(path), Precision::Auto) => jones_ladder(knot, &ns, Some(Path::new(path)))?,
        (Some(_), _) => return Err(Error::Usage("--cache stores auto-precision values only".into())),
        (None, _) => ns.iter().map(|&n| jones_with(&RootOfUnityCtx::new(n)?, knot, precision)).collect::<Result<Vec<_>>>()?,
    };
    let rows = values
        .iter()
        .map(|v| {
            rec(vec![
                ("knot", knot.to_string().into()),
                ("N", v.n.into()),
                ("value", v.to_complex().into()),
                ("logmag", v.value.logmag.into()),
                ("phase", v.value.phase.into()),
                ("growth", v.growth().into()),
                ("precision_bits", (v.precision_bits as usize).into()),
            ])
        })
        .collect();
    Ok(Report { rows, verdict: None })
}

fn cmd_saddle(c: &RunConfig) -> Result<Report> {
    let knot = c.knot_spec()?;
    let s = match knot {
        KnotSpec::Whitehead(p) => saddle_whitehead(p)?,
        KnotSpec::DoubleTwist(p, r) => saddle_double(p, r)?,
        _ => return Err(Error::Usage("saddle needs --knot whitehead, double or twist".into())),
    };
    let mut r = rec(vec![("knot", knot.to_string().into()), ("alpha0", s.alpha0.into())]);
    if let Some(b) = s.beta0 {
        r.push(("beta0".into(), b.into()));
    }
    r.extend(rec(vec![
        ("u", s.u.into()),
        ("v", s.v.into()),
        ("w0", s.w0.into()),
        ("exp_2pi_i_alpha0", s.u.into()),
        ("value", s.value.into()),
        ("volume", s.volume().into()),
        ("grad_residual", s.grad_residual.into()),
        ("hessian_det", s.hessian_det.into()),
    ]));
    Ok(Report::one(r))
}

fn cmd_volume(c: &RunConfig) -> Result<Report> {
    let knot = c.knot_spec()?;
    let v = match (c.path.as_deref().unwrap_or("saddle"), knot) {
        ("saddle", _) => target_volume(knot)?,
        ("nz", KnotSpec::Whitehead(p)) => complex_volume_whitehead_nz(p)?,
        ("nz", _) => return Err(Error::Usage("--path nz is available for whitehead only".into())),
        (other, _) => return Err(Error::Usage(format!("--path must be saddle or nz, got {other:?}"))),
    };
    Ok(Report::one(volume_record(knot, &v)))
}

/// Default N ladder per family.
pub fn default_ladder(knot: KnotSpec) -> Vec<usize> {
    match knot {
        KnotSpec::Borromean | KnotSpec::B1 | KnotSpec::B11 => vec![101, 201, 401, 501],
        KnotSpec::Whitehead(_) => vec![101, 201, 301, 401],
        KnotSpec::DoubleTwist(..) => vec![101, 151, 201, 301],
    }
}

fn cmd_verify(c: &RunConfig) -> Result<Report> {
    let knot = c.knot_spec()?;
    let ns = c.ns(&default_ladder(knot));
    let tol = c.tol.unwrap_or(0.05);
    let t = convergence_study(knot, &ns, c.cache.as_deref().map(Path::new))?;
    let last = t.rows.last().ok_or_else(|| Error::Numeric("empty table".into()))?;
    let rel = last.vol_err / last.target.re.abs();
    let monotone_breaks = t.non_monotone_steps().len();
    let ok = rel < tol && monotone_breaks <= 1;
    if let Some(out) = &c.out {
        t.write_csv(fs::File::create(out)?)?;
    }
    let mut rows: Vec<Record> = t
        .rows
        .iter()
        .map(|r| {
            rec(vec![
                ("N", r.n.into()),
                ("growth", r.growth.into()),
                ("target", r.target.into()),
                ("abs_err", r.abs_err.into()),
                ("rel_vol_err", (r.vol_err / r.target.re.abs()).into()),
            ])
        })
        .collect();
    if c.format() != Format::Csv {
        let mut summary = rec(vec![("knot", knot.to_string().into()), ("final_rel_vol_err", rel.into()), ("tol", tol.into())]);
        summary.push(("non_monotone_steps".into(), monotone_breaks.into()));
        if let (Some(e), Some(err)) = (t.extrapolated, t.extrapolated_err) {
            summary.push(("extrapolated".into(), e.into()));
            summary.push(("extrapolated_err".into(), err.into()));
        }
        rows.push(summary);
    }
    Ok(Report { rows, verdict: Some(ok) })
}

fn grid_spec(c: &RunConfig, params: &PotentialParams) -> GridSpec {
    let (x, y) = match params.family {
        crate::potential::Family::W => ((0.5, 1.0), (-0.3, 0.1)),
        crate::potential::Family::D => ((0.45, 0.88), (0.12, 0.55)),
    };
    GridSpec {
        x: (c.x_min.unwrap_or(x.0), c.x_max.unwrap_or(x.1)),
        y: (c.y_min.unwrap_or(y.0), c.y_max.unwrap_or(y.1)),
        nx: c.nx.unwrap_or(41),
        ny: c.ny.unwrap_or(41),
        imag_shift: (c.shift_a.unwrap_or(0.0), c.shift_b.unwrap_or(0.0)),
    }
}

fn params_for(knot: KnotSpec) -> Result<PotentialParams> {
    match knot {
        KnotSpec::Whitehead(p) => Ok(PotentialParams::whitehead(p)),
        KnotSpec::DoubleTwist(p, r) => Ok(PotentialParams::double(p, r)),
        _ => Err(Error::Usage("this command needs --knot whitehead, double or twist".into())),
    }
}

/// Writes the grid CSV to --out (or returns it as text).
fn cmd_contour(c: &RunConfig) -> Result<(Report, Option<String>)> {
    let params = params_for(c.knot_spec()?)?;
    let spec = grid_spec(c, &params);
    let samples = contour_grid(&params, &spec);
    let mut buf = Vec::new();
    write_grid_csv(&samples, &mut buf)?;
    let poles = samples.iter().filter(|s| s.near_pole).count();
    let report = Report::one(rec(vec![("samples", samples.len().into()), ("near_pole", poles.into())]));
    write_artifact(c.out.as_deref().map(Path::new), &buf).map(|raw| (report, raw))
}

fn cmd_rep(c: &RunConfig) -> Result<(Report, Option<String>)> {
    let knot = c.knot_spec()?;
    let data = match knot {
        KnotSpec::Borromean | KnotSpec::B1 | KnotSpec::B11 => borromean_variant(knot)?,
        KnotSpec::Whitehead(p) => build_rep_whitehead(p, wp_geometric_u(p)?.t)?,
        KnotSpec::DoubleTwist(p, r) => {
            let s = dpr_solve(p, r)?;
            build_rep_double(p, r, s.u, s.v, s.sqrt_disc)?
        }
    };
    let worst = verify_relations(&data)?.values().fold(0.0f64, |a, &b| a.max(b));
    let doc = serde_json::to_string_pretty(&export_domain(&data))? + "\n";
    let report = Report::one(rec(vec![("knot", knot.to_string().into()), ("max_relation_residual", worst.into())]));
    write_artifact(c.out.as_deref().map(Path::new), doc.as_bytes()).map(|raw| (report, raw))
}

fn cmd_regioncheck(c: &RunConfig) -> Result<Report> {
    let (p, r) = match c.knot_spec()? {
        KnotSpec::DoubleTwist(p, r) => (p, r),
        _ => return Err(Error::Usage("regioncheck needs --knot double or twist".into())),
    };
    let region = match c.region.as_deref().unwrap_or("e") {
        "e" => Region::E,
        "eprime" => Region::Eprime,
        "edoubleprime" => Region::Edoubleprime,
        other => return Err(Error::Usage(format!("--region must be e, eprime or edoubleprime, got {other:?}"))),
    };
    let rep = boundary_gradient_check(p, r, region, c.samples.unwrap_or(400))?;
    let mut row = rec(vec![
        ("boundary_samples", rep.boundary_samples.into()),
        ("min_grad_on_boundary", rep.min_grad_on_boundary.into()),
        ("interior_critical_points", rep.interior_critical_points.len().into()),
    ]);
    for (i, (a, b)) in rep.interior_critical_points.iter().enumerate() {
        row.push((format!("alpha_{i}"), (*a).into()));
        row.push((format!("beta_{i}"), (*b).into()));
    }
    let ok = rep.min_grad_on_boundary > 0.0 && rep.interior_critical_points.len() == 1;
    Ok(Report { rows: vec![row], verdict: Some(ok) })
}

/// Write bytes to `out`, or hand them back for stdout.
fn write_artifact(out: Option<&Path>, bytes: &[u8]) -> Result<Option<String>> {
    match out {
        Some(p) => {
            fs::write(p, bytes)?;
            Ok(None)
        }
        None => Ok(Some(String::from_utf8_lossy(bytes).into_owned())),
    }
}

/// Load the config file (if any) under the flags.
pub fn effective_config(args: &CommandArgs) -> Result<RunConfig> {
    let base = match &args.config {
        Some(p) => RunConfig::parse_kv(&fs::read_to_string(p).map_err(|e| Error::Usage(format!("config {}: {e}", p.display())))?)?,
        None => RunConfig::default(),
    };
    Ok(args.run.clone().over(base))
}

/// Run a parsed command, writing human/machine output to `stdout`. Returns
/// the exit code.
pub fn run<W: Write>(cli: Cli, stdout: &mut W) -> Result<i32> {
    let cfg = effective_config(cli.command.args())?;
    let threads = cfg.threads.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Usage(format!("thread pool: {e}")))?;
    let (report, raw) = pool.install(|| -> Result<(Report, Option<String>)> {
        match &cli.command {
            Command::Jones(_) => cmd_jones(&cfg).map(|r| (r, None)),
            Command::Saddle(_) => cmd_saddle(&cfg).map(|r| (r, None)),
            Command::Volume(_) => cmd_volume(&cfg).map(|r| (r, None)),
            Command::Verify(_) => cmd_verify(&cfg).map(|r| (r, None)),
            Command::Contour(_) => cmd_contour(&cfg),
            Command::Rep(_) => cmd_rep(&cfg),
            Command::Regioncheck(_) => cmd_regioncheck(&cfg).map(|r| (r, None)),
        }
    })?;
    match raw {
        // Artifact commands print the artifact itself when there is no --out.
        Some(text) => stdout.write_all(text.as_bytes())?,
        None => {
            let text = report.render(cfg.format())?;
            match (&cfg.out, &cli.command) {
                (Some(p), Command::Jones(_) | Command::Saddle(_) | Command::Volume(_) | Command::Regioncheck(_)) => {
                    fs::write(p, &text)?
                }
                _ => stdout.write_all(text.as_bytes())?,
            }
        }
    }
    Ok(match report.verdict {
        Some(false) => EXIT_VERIFY_FAIL,
        _ => EXIT_OK,
    })
}

/// Parse `argv`, run, and map every outcome to an exit code.
pub fn main_with_args<I, T, W, E>(argv: I, stdout: &mut W, stderr: &mut E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
    W: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = write!(if code == EXIT_OK { stdout as &mut dyn Write } else { stderr as &mut dyn Write }, "{e}");
            return code;
        }
    };
    match run(cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = main_with_args(std::iter::once("knotvol").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn config_round_trip() {
        let text = "knot = double\np = 6\nr = 2\nNs = 101,151\nformat = json\ntol = 0.05\nprecision = 300\n";
        let c = RunConfig::parse_kv(text).unwrap();
        assert_eq!(c.ns, Some(NList(vec![101, 151])));
        assert_eq!(c.to_canonical(), text);
        assert_eq!(RunConfig::parse_kv(&c.to_canonical()).unwrap(), c);
        assert!(RunConfig::parse_kv("bogus = 1").is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        fs::write(&path, "knot = borromean\nN = 5\nformat = json\n").unwrap();
        let (code, out, _) = run_args(&["jones", "--config", path.to_str().unwrap(), "--N", "3", "--format", "csv"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("knot,N,value_re"), "{out}");
        assert!(out.lines().nth(1).unwrap().starts_with("borromean,3,"));
    }

    #[test]
    fn jones_borromean_n3_positive() {
        let (code, out, _) = run_args(&["jones", "--knot", "borromean", "--N", "3", "--format", "json"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!(v["value"]["re"].as_f64().unwrap() > 0.0);
        assert!(v["value"]["im"].as_f64().unwrap().abs() < 1e-9);
    }

    #[test]
    fn usage_and_numeric_exit_codes() {
        assert_eq!(run_args(&["jones", "--knot", "borromean", "--N", "4"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["jones", "--knot", "nope", "--N", "5"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["saddle", "--knot", "borromean"]).0, EXIT_USAGE);
        assert_eq!(exit_code(&Error::Numeric("x".into())), EXIT_NUMERIC);
    }

    #[test]
    fn sig15_digits() {
        assert_eq!(sig15(0.8560350531), "0.856035053100000");
        assert_eq!(sig15(7.327724753417479), "7.32772475341748");
        assert_eq!(sig15(1e-9), "1.00000000000000e-9");
    }
}
