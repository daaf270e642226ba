//! The `chemostat` command line: parameter ingestion, case presets and export.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage or parameter error,
//! 3 numeric failure (including unclassified diagram cells).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::diagram::{self, GridSpec, Method};
use crate::equilibria::{self, CriticalDilutions, I2Kind, SteadyStateKind};
use crate::error::Error;
use crate::kinetics::{rescale, rescale_inflow, FoodWeb, FullParameters, Monod};
use crate::simulate::{self, Coordinates, IntegrationSpec, Trajectory};
use crate::stability::{self, Verdict};

/// Decay rate of every tier under `--maintenance`.
pub const MAINTENANCE_KDEC: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Case {
    A,
    B,
    C,
    D,
}

/// A named parameter set: deltas from the nominal parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CasePreset {
    pub name: &'static str,
    /// Parameter-file keys and values.
    pub overrides: &'static [(&'static str, f64)],
}

impl CasePreset {
    pub fn get(case: Case) -> Self {
        match case {
            Case::A => CasePreset {
                name: "case_a",
                overrides: &[],
            },
            Case::B => CasePreset {
                name: "case_b",
                overrides: &[("Ks_h2_c", 4.0e-6)],
            },
            Case::C => CasePreset {
                name: "case_c",
                overrides: &[("Ks_h2_c", 7.0e-6)],
            },
            Case::D => CasePreset {
                name: "case_d",
                overrides: &[("Ks_h2_c", 1.2e-5), ("Ks_h2", 0.5e-5), ("km_h2", 5.0)],
            },
        }
    }

    /// The overrides as a parameter file.
    pub fn to_json(&self) -> String {
        let map: serde_json::Map<String, serde_json::Value> = self
            .overrides
            .iter()
            .map(|(k, v)| (k.to_string(), json!(v)))
            .collect();
        serde_json::to_string_pretty(&map).expect("preset serializes")
    }

    pub fn parameters(&self) -> FullParameters {
        FullParameters::from_json(&self.to_json()).expect("preset keys are valid")
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "chemostat",
    version,
    about = "Three-tier chlorophenol food web in a chemostat"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Critical dilution rates D1, I2, D3 and the diagram regime.
    Criticals(CriticalsArgs),
    /// Every steady state at one operating point with its stability.
    SteadyStates(PointArgs),
    /// Operating diagram over a (D, S_ch_in) grid, written as CSV.
    Diagram(DiagramArgs),
    /// Integrate the dynamics and classify the attractor.
    Simulate(SimulateArgs),
    /// Track the SS3 spectrum along S_ch_in and report Hopf crossings.
    HopfScan(HopfArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Parameter preset.
    #[arg(long, value_enum, default_value = "a", conflicts_with = "params")]
    pub case: Case,
    /// JSON parameter file; omitted keys take nominal values.
    #[arg(long, value_name = "FILE")]
    pub params: Option<PathBuf>,
    /// Decay 0.02 on every tier.
    #[arg(long, overrides_with = "no_maintenance")]
    pub maintenance: bool,
    /// Decay 0 on every tier.
    #[arg(long, overrides_with = "maintenance")]
    pub no_maintenance: bool,
    #[arg(long, value_name = "RATE")]
    pub kdec_ch: Option<f64>,
    #[arg(long, value_name = "RATE")]
    pub kdec_ph: Option<f64>,
    #[arg(long, value_name = "RATE")]
    pub kdec_h2: Option<f64>,
    /// Machine-readable output.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CriticalsArgs {
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Clone, Args)]
pub struct PointArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Dilution rate (1/d).
    #[arg(short = 'd', long, allow_negative_numbers = true)]
    pub dilution: f64,
    /// Chlorophenol inflow (kgCOD/m3).
    #[arg(short = 's', long, allow_negative_numbers = true)]
    pub s_ch_in: f64,
    /// Report states in rescaled units.
    #[arg(long)]
    pub rescaled: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    /// Analytic without decay, numeric otherwise.
    Auto,
    Analytic,
    Numeric,
}

#[derive(Debug, Clone, Args)]
pub struct DiagramArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// CSV output file.
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    /// JSON summary output file.
    #[arg(long, value_name = "FILE")]
    pub summary: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "auto")]
    pub method: MethodArg,
    #[arg(long)]
    pub d_min: Option<f64>,
    #[arg(long)]
    pub d_max: Option<f64>,
    #[arg(long)]
    pub nd: Option<usize>,
    #[arg(long)]
    pub s_min: Option<f64>,
    #[arg(long)]
    pub s_max: Option<f64>,
    #[arg(long)]
    pub ns: Option<usize>,
    /// Even spacing in S_ch_in instead of logarithmic.
    #[arg(long)]
    pub s_linear: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(short = 'd', long, allow_negative_numbers = true)]
    pub dilution: f64,
    #[arg(short = 's', long, allow_negative_numbers = true)]
    pub s_ch_in: f64,
    /// Final time (d).
    #[arg(long, default_value_t = 10000.0)]
    pub t_end: f64,
    /// Spacing of recorded samples (d).
    #[arg(long, default_value_t = 1.0)]
    pub sample_interval: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub rtol: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub atol: f64,
    /// Six comma-separated initial values (X_ch, X_ph, X_H2, S_ch, S_ph, S_H2),
    /// rescaled under `--rescaled`. Default: SS3 with X_ch cut to 60%, or a
    /// generic start when SS3 does not exist.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub initial: Option<Vec<f64>>,
    /// Trajectory CSV output file.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub rescaled: bool,
}

#[derive(Debug, Clone, Args)]
pub struct HopfArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(short = 'd', long)]
    pub dilution: f64,
    #[arg(long)]
    pub s_min: f64,
    #[arg(long)]
    pub s_max: f64,
    /// Number of scan points.
    #[arg(short = 'n', long, default_value_t = 1000)]
    pub n: usize,
    /// CSV of the scan points.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    Io(String),
    Usage(String),
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Io(m) | CliError::Usage(m) | CliError::Numeric(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { .. } | Error::OmegaRegime { .. } => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

type CliResult<T = ()> = std::result::Result<T, CliError>;

/// A parameter set ready for the analysis modules.
pub struct Model {
    pub tag: String,
    pub params: FullParameters,
    pub web: FoodWeb<Monod>,
}

impl ModelArgs {
    pub fn load(&self) -> CliResult<Model> {
        let (tag, mut params) = match &self.params {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
                let p = FullParameters::from_json(&text)
                    .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
                let tag = path
                    .file_stem()
                    .map_or("params".into(), |s| s.to_string_lossy().into_owned());
                (tag, p)
            }
            None => {
                let preset = CasePreset::get(self.case);
                (preset.name.to_string(), preset.parameters())
            }
        };
        if self.maintenance {
            params = params.with_decay(MAINTENANCE_KDEC);
        } else if self.no_maintenance {
            params = params.with_decay(0.0);
        }
        if let Some(k) = self.kdec_ch {
            params.kdec_ch = k;
        }
        if let Some(k) = self.kdec_ph {
            params.kdec_ph = k;
        }
        if let Some(k) = self.kdec_h2 {
            params.kdec_h2 = k;
        }
        let web = rescale(&params)?.food_web();
        Ok(Model { tag, params, web })
    }
}

/// Parse `args` (program name first) and run, writing to `out` and `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                2
            } else {
                let _ = write!(out, "{}", e.render());
                0
            };
            return code;
        }
    };
    match dispatch(&cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.exit_code()
        }
    }
}

/// Entry point of the binary.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

fn dispatch(cmd: &Command, out: &mut dyn Write) -> CliResult {
    match cmd {
        Command::Criticals(a) => cmd_criticals(a, out),
        Command::SteadyStates(a) => cmd_steady_states(a, out),
        Command::Diagram(a) => cmd_diagram(a, out),
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::HopfScan(a) => cmd_hopf_scan(a, out),
    }
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> CliResult {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or("-".into(), |v| format!("{v:.6}"))
}

fn check_point(d: f64, s: f64) -> CliResult {
    if !(d > 0.0 && d.is_finite()) {
        return Err(CliError::Usage(format!(
            "dilution must be positive, got {d}"
        )));
    }
    if !(s >= 0.0 && s.is_finite()) {
        return Err(CliError::Usage(format!(
            "S_ch_in must be nonnegative, got {s}"
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct CriticalsReport<'a> {
    case: &'a str,
    decay: [f64; 3],
    omega: f64,
    y3y4: f64,
    criticals: &'a CriticalDilutions,
    /// `F1(0+) / y3y4`, the Gamma1 intercept in kgCOD/m3.
    gamma1_intercept: Option<f64>,
}

/// Dilution used for the `D -> 0+` limit of Gamma1.
const INTERCEPT_DILUTION: f64 = 1e-9;

fn cmd_criticals(a: &CriticalsArgs, out: &mut dyn Write) -> CliResult {
    let m = a.model.load()?;
    let c = equilibria::critical_dilutions(&m.web);
    let report = CriticalsReport {
        case: &m.tag,
        decay: m.web.decay,
        omega: m.web.omega,
        y3y4: m.web.y3y4,
        criticals: &c,
        gamma1_intercept: diagram::gamma1(INTERCEPT_DILUTION, &m.web),
    };
    if a.model.json {
        return write_json(out, &report);
    }
    writeln!(out, "case      {}  decay {:?}", m.tag, m.web.decay)?;
    writeln!(out, "D1        {}", fmt_opt(c.d1))?;
    match c.i2 {
        I2Kind::Empty => writeln!(out, "I2        empty")?,
        I2Kind::IntervalFromZero { d2 } => writeln!(out, "I2        (0, D2)  D2 = {d2:.6}")?,
        I2Kind::InteriorInterval { d2min, d2max } => writeln!(
            out,
            "I2        (D2min, D2max)  D2min = {d2min:.6}  D2max = {d2max:.6}"
        )?,
    }
    writeln!(out, "D3        {}", fmt_opt(c.d3))?;
    if c.i3_equals_i2 {
        writeln!(out, "I3        = I2")?;
    } else {
        let parts: Vec<String> =
            c.i3.iter()
                .map(|(l, h)| format!("({l:.6}, {h:.6})"))
                .collect();
        writeln!(
            out,
            "I3        {}",
            if parts.is_empty() {
                "empty".into()
            } else {
                parts.join(" ")
            }
        )?;
    }
    writeln!(
        out,
        "regime    {}",
        c.regime.map_or("-".to_string(), |r| r.to_string())
    )?;
    writeln!(out, "Gamma1(0) {}", fmt_opt(report.gamma1_intercept))?;
    Ok(())
}

#[derive(Serialize)]
struct StateReport {
    kind: SteadyStateKind,
    /// `(X_ch, X_ph, X_H2, S_ch, S_ph, S_H2)` or the rescaled components.
    state: [f64; 6],
    verdict: Verdict,
    max_real_part: f64,
    /// `[re, im]` pairs, by descending real part.
    eigenvalues: Vec<[f64; 2]>,
    /// Closed-form verdict, only without decay.
    analytic_verdict: Option<Verdict>,
}

#[derive(Serialize)]
struct PointReport<'a> {
    case: &'a str,
    decay: [f64; 3],
    d: f64,
    s_ch_in: f64,
    s0in: f64,
    coordinates: Coordinates,
    region: Option<diagram::Region>,
    states: Vec<StateReport>,
}

fn coordinate_names(c: Coordinates) -> [&'static str; 6] {
    match c {
        Coordinates::Full => ["X_ch", "X_ph", "X_H2", "S_ch", "S_ph", "S_H2"],
        Coordinates::Rescaled => ["x0", "x1", "x2", "s0", "s1", "s2"],
    }
}

fn cmd_steady_states(a: &PointArgs, out: &mut dyn Write) -> CliResult {
    check_point(a.dilution, a.s_ch_in)?;
    let m = a.model.load()?;
    let web = &m.web;
    let s0in = rescale_inflow(a.s_ch_in, web.y3y4);
    let coords = if a.rescaled {
        Coordinates::Rescaled
    } else {
        Coordinates::Full
    };
    let found = equilibria::all_steady_states(a.dilution, s0in, web)?;
    let mut states = Vec::new();
    for ss in &found {
        let ev = stability::spectrum(ss, web)?;
        let analytic_verdict = if web.has_maintenance() {
            None
        } else {
            Some(stability::stability_analytic(ss, web)?.verdict)
        };
        states.push(StateReport {
            kind: ss.kind,
            state: match coords {
                Coordinates::Full => simulate::rescaled_to_full(&ss.state, &m.params),
                Coordinates::Rescaled => ss.state,
            },
            verdict: stability::classify_real_part(ev[0].re),
            max_real_part: ev[0].re,
            eigenvalues: ev.iter().map(|l| [l.re, l.im]).collect(),
            analytic_verdict,
        });
    }
    let region =
        diagram::classify_point(a.dilution, a.s_ch_in, web, Method::default_for(web)).label;
    let report = PointReport {
        case: &m.tag,
        decay: web.decay,
        d: a.dilution,
        s_ch_in: a.s_ch_in,
        s0in,
        coordinates: coords,
        region,
        states,
    };
    if a.model.json {
        return write_json(out, &report);
    }
    writeln!(
        out,
        "case {}  D = {}  S_ch_in = {}  region {}",
        m.tag,
        a.dilution,
        a.s_ch_in,
        region.map_or("unclassified".to_string(), |r| r.to_string())
    )?;
    let names = coordinate_names(coords);
    write!(out, "{:<11}{:<10}{:>14}", "state", "verdict", "max Re")?;
    for n in names {
        write!(out, "{n:>14}")?;
    }
    writeln!(out)?;
    for s in &report.states {
        write!(
            out,
            "{:<11}{:<10}{:>14.6e}",
            s.kind.name(),
            format!("{:?}", s.verdict).to_lowercase(),
            s.max_real_part
        )?;
        for v in s.state {
            write!(out, "{v:>14.6e}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

fn cmd_diagram(a: &DiagramArgs, out: &mut dyn Write) -> CliResult {
    let m = a.model.load()?;
    let web = &m.web;
    let defaults = GridSpec::default_for(web);
    let spec = GridSpec {
        d_range: (
            a.d_min.unwrap_or(defaults.d_range.0),
            a.d_max.unwrap_or(defaults.d_range.1),
        ),
        nd: a.nd.unwrap_or(defaults.nd),
        s_range: (
            a.s_min.unwrap_or(defaults.s_range.0),
            a.s_max.unwrap_or(defaults.s_range.1),
        ),
        ns: a.ns.unwrap_or(defaults.ns),
        s_log: !a.s_linear,
    };
    let method = match a.method {
        MethodArg::Auto => Method::default_for(web),
        MethodArg::Analytic => Method::Analytic,
        MethodArg::Numeric => Method::Numeric,
    };
    if method == Method::Analytic && web.has_maintenance() {
        return Err(CliError::Usage(
            "the analytic method needs zero decay; use --no-maintenance or --method numeric".into(),
        ));
    }
    let grid = diagram::scan(&spec, web, method, &m.tag)?;
    grid.write_csv(create(&a.out)?)?;
    let summary = grid.summary(web);
    if let Some(path) = &a.summary {
        let mut f = create(path)?;
        write_json(&mut f, &summary)?;
    }
    if a.model.json {
        write_json(out, &summary)?;
    } else {
        writeln!(
            out,
            "{} x {} cells written to {}",
            summary.nd,
            summary.ns,
            a.out.display()
        )?;
        for (r, n) in &summary.region_counts {
            writeln!(out, "{r}  {n}")?;
        }
        writeln!(out, "unclassified  {}", summary.unclassified)?;
    }
    if summary.unclassified > 0 {
        let first = grid
            .cells
            .iter()
            .find_map(|c| c.error.as_deref())
            .unwrap_or("unknown");
        return Err(CliError::Numeric(format!(
            "{} cells unclassified, first: {first}",
            summary.unclassified
        )));
    }
    Ok(())
}

fn create(path: &Path) -> CliResult<std::io::BufWriter<fs::File>> {
    let f = fs::File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(std::io::BufWriter::new(f))
}

fn to_full(traj: &Trajectory, p: &FullParameters) -> Trajectory {
    Trajectory {
        coordinates: Coordinates::Full,
        states: traj
            .states
            .iter()
            .map(|y| simulate::rescaled_to_full(y, p))
            .collect(),
        ..traj.clone()
    }
}

#[derive(Serialize)]
struct SimulateReport<'a> {
    case: &'a str,
    decay: [f64; 3],
    spec: IntegrationSpec,
    coordinates: Coordinates,
    report: simulate::AttractorReport,
    accepted_steps: usize,
    rejected_steps: usize,
    fallback_from: Option<f64>,
}

fn cmd_simulate(a: &SimulateArgs, out: &mut dyn Write) -> CliResult {
    check_point(a.dilution, a.s_ch_in)?;
    let m = a.model.load()?;
    let web = &m.web;
    let s0in = rescale_inflow(a.s_ch_in, web.y3y4);
    let initial = match &a.initial {
        Some(v) => {
            let y: [f64; 6] = v
                .as_slice()
                .try_into()
                .map_err(|_| CliError::Usage("--initial needs six values".into()))?;
            if a.rescaled {
                y
            } else {
                simulate::full_to_rescaled(&y, &m.params)
            }
        }
        None => simulate::transect_initial(a.dilution, s0in, web)?,
    };
    let mut spec = IntegrationSpec::new(a.dilution, a.s_ch_in, a.t_end, initial);
    spec.rel_tol = a.rtol;
    spec.abs_tol = a.atol;
    spec.sample_interval = a.sample_interval;
    let coords = if a.rescaled {
        Coordinates::Rescaled
    } else {
        Coordinates::Full
    };
    let export = |traj: &Trajectory| match coords {
        Coordinates::Full => to_full(traj, &m.params),
        Coordinates::Rescaled => traj.clone(),
    };
    let traj = match simulate::integrate(&spec, web) {
        Ok(t) => t,
        Err(e) => {
            if let Some(path) = &a.out {
                export(&e.partial).write_csv(create(path)?)?;
            }
            return Err(match e.error {
                Error::InvalidParameter { .. } => CliError::Usage(e.to_string()),
                _ => CliError::Numeric(e.to_string()),
            });
        }
    };
    if let Some(path) = &a.out {
        export(&traj).write_csv(create(path)?)?;
    }
    let known = equilibria::all_steady_states(a.dilution, s0in, web)?;
    let mut report = simulate::classify_attractor(&traj, &known, web);
    if coords == Coordinates::Full {
        report.terminal_state = simulate::rescaled_to_full(&report.terminal_state, &m.params);
    }
    if a.model.json {
        return write_json(
            out,
            &SimulateReport {
                case: &m.tag,
                decay: web.decay,
                spec,
                coordinates: coords,
                report,
                accepted_steps: traj.accepted_steps,
                rejected_steps: traj.rejected_steps,
                fallback_from: traj.fallback_from,
            },
        );
    }
    writeln!(out, "outcome   {}", report.outcome.name())?;
    writeln!(out, "t_end     {}", report.terminal_time)?;
    let names = coordinate_names(coords);
    for (n, v) in names.iter().zip(report.terminal_state) {
        writeln!(out, "{n:<9} {v:.6e}")?;
    }
    writeln!(out, "|f|       {:.3e}", report.terminal_rhs_norm)?;
    if let Some(o) = report.oscillation {
        writeln!(
            out,
            "peaks {}  period {:.3}  amplitude {:.4e} -> {:.4e}  drift {:.4}",
            o.peaks, o.period, o.first_amplitude, o.last_amplitude, o.relative_drift
        )?;
    }
    writeln!(
        out,
        "steps {} accepted, {} rejected",
        traj.accepted_steps, traj.rejected_steps
    )?;
    Ok(())
}

fn cmd_hopf_scan(a: &HopfArgs, out: &mut dyn Write) -> CliResult {
    check_point(a.dilution, a.s_min)?;
    if !(a.s_max > a.s_min) || a.n < 2 {
        return Err(CliError::Usage("need s_max > s_min and n >= 2".into()));
    }
    let m = a.model.load()?;
    let scan = simulate::hopf_scan(a.dilution, (a.s_min, a.s_max), a.n, &m.web)?;
    if let Some(path) = &a.out {
        let mut w = csv::Writer::from_writer(create(path)?);
        w.write_record(["S_ch_in", "max_real_part", "leading_imag"])?;
        for p in &scan.points {
            let (re, im) = p
                .eigenvalues
                .as_ref()
                .map_or((String::new(), String::new()), |e| {
                    (e[0].re.to_string(), e[0].im.to_string())
                });
            w.write_record([p.s_ch_in.to_string(), re, im])?;
        }
        w.flush()?;
    }
    let no_ss3 = scan.skipped == scan.points.len();
    if a.model.json {
        return write_json(
            out,
            &json!({
                "case": m.tag,
                "decay": m.web.decay,
                "d": scan.d,
                "s_range": [a.s_min, a.s_max],
                "n": a.n,
                "crossings": scan.crossings,
                "skipped": scan.skipped,
                "no_ss3": no_ss3,
                "others_negative_throughout": scan.others_negative_throughout,
            }),
        );
    }
    writeln!(
        out,
        "D = {}  S_ch_in in [{}, {}]  {} points, {} without SS3",
        scan.d, a.s_min, a.s_max, a.n, scan.skipped
    )?;
    if no_ss3 {
        writeln!(out, "SS3 does not exist anywhere in the range")?;
    }
    for c in &scan.crossings {
        writeln!(
            out,
            "crossing at S_ch_in = {:.6}  frequency {:.6}  {}  others negative: {}",
            c.s_ch_in,
            c.frequency,
            if c.destabilizing {
                "destabilizing"
            } else {
                "stabilizing"
            },
            c.others_negative
        )?;
    }
    if scan.crossings.is_empty() {
        writeln!(out, "no crossings")?;
    }
    Ok(())
}
