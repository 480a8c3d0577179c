use serde::Serialize;
use weaktype::constants::{
    kp, moment_constant_nonneg, reference_constants, weak_constant_nonneg,
    weak_constant_pth_power, DEFAULT_SERIES_TOL,
};
use weaktype::extremal::{build_extremal_pair, resolve_params, trajectories, write_trajectories_csv};
use weaktype::mc_sim::SimConfig;
use weaktype::ode_g::{build_g_bessel, build_g_rk, default_t_max};
use weaktype::special_u_weak::UWContext;
use weaktype::verify;
use weaktype::{Error, Exponent};

use crate::args::{Cli, Command, Figure, Format, GMethod, Suite, VerifyArgs};
use crate::error::{CliError, CliResult};
use crate::output::{RunManifest, Sink};

/// Runs the command; `Ok(false)` means it ran but a check failed.
pub fn run(cli: &Cli) -> CliResult<bool> {
    let sink = Sink::new(cli.global.out.as_deref())?;
    match &cli.command {
        Command::Constants { p } => constants(cli, &sink, p),
        Command::Verify(args) => verify_cmd(cli, &sink, args),
        Command::Figures { which } => figures(cli, &sink, which),
        Command::Gfun { p, t_max, step, method } => gfun(cli, &sink, *p, *t_max, *step, *method),
    }
}

fn exponent(p: f64) -> CliResult<Exponent> {
    Exponent::new(p).map_err(usage)
}

/// Bad parameter values are the caller's mistake.
fn usage(e: Error) -> CliError {
    match e {
        Error::Domain(m) | Error::Parameter(m) => CliError::Usage(m),
        other => CliError::Library(other),
    }
}

#[derive(Debug, Serialize)]
struct Entry {
    value: Option<f64>,
    error: Option<String>,
}

impl Entry {
    fn from(r: weaktype::Result<f64>) -> Self {
        match r {
            Ok(v) => Self { value: Some(v), error: None },
            Err(e) => Self { value: None, error: Some(e.to_string()) },
        }
    }

    fn csv(&self) -> String {
        self.value.map(|v| v.to_string()).unwrap_or_default()
    }
}

#[derive(Debug, Serialize)]
struct ReferenceValue {
    name: String,
    value: f64,
}

#[derive(Debug, Serialize)]
struct ConstantsRow {
    p: f64,
    kp: Entry,
    cp: Entry,
    weak_nonneg: Entry,
    weak_nonneg_pth_power: Entry,
    reference: Vec<ReferenceValue>,
    /// Set when `p` itself is invalid.
    error: Option<String>,
}

impl ConstantsRow {
    fn new(p: f64) -> Self {
        let e = match Exponent::new(p) {
            Ok(e) => e,
            Err(err) => {
                let failed = || Entry::from(Err(err.clone()));
                return Self {
                    p,
                    kp: failed(),
                    cp: failed(),
                    weak_nonneg: failed(),
                    weak_nonneg_pth_power: failed(),
                    reference: Vec::new(),
                    error: Some(err.to_string()),
                };
            }
        };
        Self {
            p,
            kp: Entry::from(kp(&e, DEFAULT_SERIES_TOL).map(|c| c.value)),
            cp: Entry::from(moment_constant_nonneg(p)),
            weak_nonneg: Entry::from(weak_constant_nonneg(&e).map(|c| c.value)),
            weak_nonneg_pth_power: Entry::from(weak_constant_pth_power(&e)),
            reference: reference_constants(&e)
                .into_iter()
                .map(|c| ReferenceValue { name: c.name, value: c.value })
                .collect(),
            error: None,
        }
    }

    fn any_value(&self) -> bool {
        [&self.kp, &self.cp, &self.weak_nonneg, &self.weak_nonneg_pth_power]
            .iter()
            .any(|e| e.value.is_some())
    }

    fn errors(&self) -> String {
        if let Some(e) = &self.error {
            return e.clone();
        }
        [&self.kp, &self.cp, &self.weak_nonneg, &self.weak_nonneg_pth_power]
            .iter()
            .filter_map(|e| e.error.as_deref())
            .collect::<Vec<_>>()
            .join("; ")
    }
}

fn constants(cli: &Cli, sink: &Sink, ps: &[f64]) -> CliResult<bool> {
    let rows: Vec<ConstantsRow> = ps.iter().map(|&p| ConstantsRow::new(p)).collect();
    let body = match cli.global.format() {
        Format::Json => serde_json::to_string_pretty(&rows)? + "\n",
        Format::Csv => {
            let mut s = String::from("p,kp,cp,weak_nonneg,weak_nonneg_pth_power,reference,errors\n");
            for r in &rows {
                let reference: Vec<String> =
                    r.reference.iter().map(|c| format!("{}={}", c.name, c.value)).collect();
                s.push_str(&format!(
                    "{},{},{},{},{},\"{}\",\"{}\"\n",
                    r.p,
                    r.kp.csv(),
                    r.cp.csv(),
                    r.weak_nonneg.csv(),
                    r.weak_nonneg_pth_power.csv(),
                    reference.join("; "),
                    r.errors().replace('"', "'")
                ));
            }
            s
        }
    };
    let mut manifest = RunManifest::new("constants", cli.global.seed);
    for p in ps {
        manifest = manifest.param("p", p);
    }
    let name = format!("constants.{}", cli.global.format().extension());
    sink.emit(&name, &body, manifest)?;
    if rows.iter().all(|r| !r.any_value()) {
        eprintln!("error: no constant is defined at any of the given p");
        return Ok(false);
    }
    Ok(true)
}

#[derive(Serialize)]
#[serde(untagged)]
enum AnyReport {
    Suite(weaktype::report::SuiteReport),
    Mc(verify::McSuiteReport),
}

impl AnyReport {
    fn passed(&self) -> bool {
        match self {
            AnyReport::Suite(r) => r.passed,
            AnyReport::Mc(r) => r.passed,
        }
    }

    fn render(&self, format: Format) -> CliResult<String> {
        Ok(match (self, format) {
            (r, Format::Json) => serde_json::to_string_pretty(r)? + "\n",
            (AnyReport::Suite(r), Format::Csv) => r.to_csv(),
            (AnyReport::Mc(r), Format::Csv) => r.to_csv(),
        })
    }

    fn summary(&self) -> Vec<String> {
        match self {
            AnyReport::Suite(r) => r.checks.iter().map(|c| c.line()).collect(),
            AnyReport::Mc(r) => r.reports.iter().map(|c| c.line()).collect(),
        }
    }
}

struct SuiteDefaults {
    p: f64,
    n: usize,
}

fn defaults(suite: Suite) -> SuiteDefaults {
    let (p, n) = match suite {
        Suite::W => (0.5, 2000),
        Suite::UWeak => (3.0, 2000),
        Suite::UOrth => (1.5, 300),
        Suite::Ode | Suite::Extremal => (3.0, 0),
        Suite::McWeakType => (3.0, 1000),
        Suite::McStrip => (2.0, 100_000),
        Suite::Harmonic => (1.5, 100_000),
    };
    SuiteDefaults { p, n }
}

fn verify_cmd(cli: &Cli, sink: &Sink, args: &VerifyArgs) -> CliResult<bool> {
    let d = defaults(args.suite);
    let (pv, n, seed) = (args.p.unwrap_or(d.p), args.n.unwrap_or(d.n), cli.global.seed);
    let p = exponent(pv)?;
    let cfg = SimConfig::new(seed, n).with_dt(args.dt).with_workers(cli.global.workers);
    let report = match args.suite {
        Suite::W => verify::w_suite(n, seed).map(AnyReport::Suite),
        Suite::UWeak => verify::u_weak_suite(&p, n, seed).map(AnyReport::Suite),
        Suite::UOrth => verify::u_orth_suite(&p, n, seed).map(AnyReport::Suite),
        Suite::Ode => verify::ode_suite(&p).map(AnyReport::Suite),
        Suite::Extremal => verify::extremal_suite(&p).map(AnyReport::Suite),
        Suite::McWeakType => verify::mc_weak_type_suite(&p, args.paths, &cfg).map(AnyReport::Mc),
        Suite::McStrip => verify::mc_strip_suite(&p, &cfg).map(AnyReport::Mc),
        Suite::Harmonic if pv < 1.0 => verify::harmonic_1d_suite(&p).map(AnyReport::Suite),
        Suite::Harmonic => verify::harmonic_suite(&p, &cfg).map(AnyReport::Mc),
    }
    .map_err(usage)?;
    for line in report.summary() {
        eprintln!("{line}");
    }
    let manifest = RunManifest::new("verify", seed)
        .param("suite", args.suite.name())
        .param("p", pv)
        .param("n", n)
        .param("dt", args.dt)
        .param("paths", args.paths)
        .param("workers", cli.global.workers);
    let name = format!("verify-{}.{}", args.suite.name(), cli.global.format().extension());
    sink.emit(&name, &report.render(cli.global.format())?, manifest)?;
    Ok(report.passed())
}

/// Figure data is tabular; `--format json` only applies to reports.
fn csv_only(cli: &Cli, what: &str) {
    if cli.global.format == Some(Format::Json) {
        eprintln!("note: {what} is written as CSV");
    }
}

fn figures(cli: &Cli, sink: &Sink, which: &Figure) -> CliResult<bool> {
    let seed = cli.global.seed;
    match *which {
        Figure::Trajectories { p, x, delta } => {
            csv_only(cli, "trajectory data");
            let params = resolve_params(p, x, delta).map_err(usage)?;
            let (xm, ym) = build_extremal_pair(&params)?;
            let mut buf = Vec::new();
            write_trajectories_csv(&mut buf, &trajectories(&xm, &ym))
                .map_err(|e| CliError::io("<buffer>", e))?;
            let manifest = RunManifest::new("figures trajectories", seed)
                .param("p", p)
                .param("x", x)
                .param("delta", params.delta)
                .param("steps", params.n_steps);
            sink.emit("trajectories.csv", &String::from_utf8_lossy(&buf), manifest)?;
        }
        Figure::Regions { p, points } => {
            csv_only(cli, "region boundaries");
            if points == 0 {
                return Err(CliError::Usage("--points must be at least 1".into()));
            }
            let ctx = UWContext::new(&exponent(p)?).map_err(usage)?;
            let s_end = 5f64.min(ctx.g().s_max());
            let mut buf = Vec::new();
            ctx.write_boundary_csv(&mut buf, points, s_end)?;
            let manifest = RunManifest::new("figures regions", seed)
                .param("p", p)
                .param("points", points)
                .param("s_end", s_end);
            sink.emit("regions.csv", &String::from_utf8_lossy(&buf), manifest)?;
        }
    }
    Ok(true)
}

fn gfun(
    cli: &Cli,
    sink: &Sink,
    p: f64,
    t_max: Option<f64>,
    step: f64,
    method: GMethod,
) -> CliResult<bool> {
    csv_only(cli, "the G table");
    let e = exponent(p)?;
    let t_max = t_max.unwrap_or_else(|| default_t_max(p));
    let sol = match method {
        GMethod::Rk => build_g_rk(&e, t_max, step),
        GMethod::Bessel => build_g_bessel(&e, t_max),
    }
    .map_err(usage)?;
    let mut buf = Vec::new();
    sol.write_csv(&mut buf).map_err(|e| CliError::io("<buffer>", e))?;
    let manifest = RunManifest::new("gfun", cli.global.seed)
        .param("p", p)
        .param("t_max", t_max)
        .param("step", step)
        .param("method", format!("{method:?}").to_lowercase());
    sink.emit("gfun.csv", &String::from_utf8_lossy(&buf), manifest)?;
    Ok(true)
}
