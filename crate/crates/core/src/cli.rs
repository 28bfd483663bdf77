//! Command-line front end.

use std::collections::HashMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{Map, Value};

use crate::analytic::{
    delta_p_hom, delta_p_res, gaussian_factors, p0_hom_delayed, p_hom_asymptotic, p_res_asymptotic, zeta_blockade,
    HomCorrection,
};
use crate::error::Error;
use crate::model::{make_pair_amplitude, Channel, Geometry, ModelParams};
use crate::oracle::{grid_probability, run_audit, GridSpec};
use crate::quadrature::{QuadratureRule, RuleKind};
use crate::single_photon::amplitudes;
use crate::two_photon::{default_rule, probability_table, ProbabilityTable};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;
pub const EXIT_AUDIT: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "waveguide-hom", version, about = "Two-photon scattering off a waveguide emitter")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact, strong-coupling and oracle values at one parameter point.
    Point(Opts),
    /// Balanced HOM anti-bunching against Γ, exact vs asymptotic.
    FigHom(Opts),
    /// Interaction correction to P_res against Δ; `--inset` sweeps Γ instead.
    FigBlockade(Opts),
    /// Full table along one parameter (`--vary gamma|delay|center`).
    Sweep(Opts),
    /// Oracle cross-checks, unitarity scan and factor audit.
    Audit(Opts),
}

#[derive(clap::Args, Debug, Clone, Default)]
struct Opts {
    #[arg(long)]
    geometry: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    delay: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    center: Option<f64>,
    /// `start:stop` (or `start,stop`).
    #[arg(long, allow_hyphen_values = true)]
    range: Option<String>,
    #[arg(long)]
    steps: Option<usize>,
    /// Logarithmic spacing.
    #[arg(long)]
    log: bool,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Absolute tolerance; forces adaptive quadrature.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Flat `key = value` file mirroring the flags; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Swept variable for `sweep`.
    #[arg(long)]
    vary: Option<String>,
    /// Γ sweep of the total P_res for `fig-blockade`.
    #[arg(long)]
    inset: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Default)]
enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Numeric(String),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParams(_) | Error::Unsupported(_) => CliError::Usage(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn read_config(path: &Path) -> CliResult<HashMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut map = HashMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("config line {}: expected key = value", n + 1)))?;
        map.insert(k.trim().replace('_', "-"), v.trim().to_string());
    }
    Ok(map)
}

fn parse_value<T: std::str::FromStr>(key: &str, v: &str) -> CliResult<T> {
    v.parse().map_err(|_| usage(format!("invalid value '{v}' for {key}")))
}

impl Opts {
    /// Fills unset flags from the config file.
    fn merged(mut self) -> CliResult<Opts> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        for (key, v) in read_config(&path)? {
            match key.as_str() {
                "geometry" => {
                    self.geometry.get_or_insert(v);
                }
                "gamma" => {
                    if self.gamma.is_none() {
                        self.gamma = Some(parse_value(&key, &v)?);
                    }
                }
                "delay" => {
                    if self.delay.is_none() {
                        self.delay = Some(parse_value(&key, &v)?);
                    }
                }
                "center" => {
                    if self.center.is_none() {
                        self.center = Some(parse_value(&key, &v)?);
                    }
                }
                "range" => {
                    self.range.get_or_insert(v);
                }
                "steps" => {
                    if self.steps.is_none() {
                        self.steps = Some(parse_value(&key, &v)?);
                    }
                }
                "log" => {
                    if !self.log {
                        self.log = parse_value(&key, &v)?;
                    }
                }
                "format" => {
                    if self.format.is_none() {
                        self.format = Some(Format::from_str(&v, true).map_err(|_| usage(format!("invalid format '{v}'")))?);
                    }
                }
                "tol" => {
                    if self.tol.is_none() {
                        self.tol = Some(parse_value(&key, &v)?);
                    }
                }
                "output" => {
                    self.output.get_or_insert(PathBuf::from(v));
                }
                "vary" => {
                    self.vary.get_or_insert(v);
                }
                "inset" => {
                    if !self.inset {
                        self.inset = parse_value(&key, &v)?;
                    }
                }
                other => return Err(usage(format!("unknown config key '{other}'"))),
            }
        }
        Ok(self)
    }

    fn geometry(&self, default: Geometry) -> CliResult<Geometry> {
        match &self.geometry {
            Some(g) => Ok(g.parse()?),
            None => Ok(default),
        }
    }

    fn rule(&self, params: &ModelParams) -> CliResult<QuadratureRule> {
        Ok(self.rule_override()?.unwrap_or_else(|| default_rule(params)))
    }

    fn rule_override(&self) -> CliResult<Option<QuadratureRule>> {
        match self.tol {
            Some(t) if t > 0.0 && t.is_finite() => Ok(Some(QuadratureRule::adaptive(t))),
            Some(t) => Err(usage(format!("tolerance must be positive, got {t}"))),
            None => Ok(None),
        }
    }

    fn grid(&self, default: (f64, f64), default_steps: usize, default_log: bool) -> CliResult<Vec<f64>> {
        let (a, b) = match &self.range {
            Some(r) => parse_range(r)?,
            None => default,
        };
        let n = self.steps.unwrap_or(default_steps);
        spaced(a, b, n, self.log || (self.range.is_none() && default_log))
    }

    fn format(&self) -> Format {
        self.format.unwrap_or_default()
    }
}

fn parse_range(s: &str) -> CliResult<(f64, f64)> {
    let (a, b) = s
        .split_once(':')
        .or_else(|| s.split_once(','))
        .ok_or_else(|| usage(format!("range '{s}' must look like start:stop")))?;
    Ok((parse_value("range", a.trim())?, parse_value("range", b.trim())?))
}

/// `n` points from `a` to `b` inclusive.
fn spaced(a: f64, b: f64, n: usize, log: bool) -> CliResult<Vec<f64>> {
    if !(a.is_finite() && b.is_finite()) || a == b {
        return Err(usage(format!("empty range {a}:{b}")));
    }
    if n < 2 {
        return Err(usage("steps must be at least 2"));
    }
    if log && !(a > 0.0 && b > 0.0) {
        return Err(usage("log spacing needs a positive range"));
    }
    let t = |i: usize| i as f64 / (n - 1) as f64;
    Ok((0..n)
        .map(|i| {
            if i == n - 1 {
                b
            } else if log {
                (a.ln() + t(i) * (b.ln() - a.ln())).exp()
            } else {
                a + t(i) * (b - a)
            }
        })
        .collect())
}

/// `%.9g`.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.8e}");
    let (mant, exp) = sci.split_once('e').expect("scientific form");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-4..9).contains(&exp) {
        let mant = trim_zeros(mant);
        return format!("{mant}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs());
    }
    let decimals = (8 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Clone)]
enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format_sig9(*x),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }
}

type Record = Vec<(&'static str, Cell)>;

fn num(key: &'static str, x: f64) -> (&'static str, Cell) {
    (key, Cell::Num(x))
}

fn text(key: &'static str, s: impl Into<String>) -> (&'static str, Cell) {
    (key, Cell::Text(s.into()))
}

fn render(records: &[Record], format: Format, single: bool) -> String {
    match format {
        Format::Csv => {
            let mut out = String::new();
            if let Some(first) = records.first() {
                let header: Vec<_> = first.iter().map(|(k, _)| *k).collect();
                let _ = writeln!(out, "{}", header.join(","));
            }
            for r in records {
                let row: Vec<_> = r.iter().map(|(_, c)| c.csv()).collect();
                let _ = writeln!(out, "{}", row.join(","));
            }
            out
        }
        Format::Json => {
            let objects: Vec<Value> = records
                .iter()
                .map(|r| Value::Object(r.iter().map(|(k, c)| (k.to_string(), c.json())).collect::<Map<_, _>>()))
                .collect();
            let value = if single && objects.len() == 1 {
                objects.into_iter().next().expect("one record")
            } else {
                Value::Array(objects)
            };
            serde_json::to_string_pretty(&value).expect("serializable") + "\n"
        }
    }
}

fn emit(opts: &Opts, body: &str) -> CliResult<()> {
    match &opts.output {
        Some(path) => std::fs::write(path, body).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes()).map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

fn rule_name(kind: RuleKind) -> &'static str {
    match kind {
        RuleKind::GaussHermite => "gauss_hermite",
        RuleKind::AdaptivePanel => "adaptive_panel",
        RuleKind::Grid => "grid",
    }
}

fn point_params(opts: &Opts) -> CliResult<ModelParams> {
    let geometry = opts.geometry(Geometry::HomSplit)?;
    let gamma = opts.gamma.unwrap_or(10.0);
    let delay = opts.delay.unwrap_or(0.0);
    let (center, second) = match geometry {
        Geometry::HomSplit => (opts.center.unwrap_or(gamma), Channel::Two),
        _ => (opts.center.unwrap_or(0.0), Channel::One),
    };
    Ok(ModelParams::new(gamma, delay, center, geometry, Channel::One, second)?)
}

fn exact_table(opts: &Opts, params: &ModelParams) -> CliResult<ProbabilityTable> {
    Ok(probability_table(&make_pair_amplitude(params), params, &opts.rule(params)?)?)
}

fn table_columns(rec: &mut Record, table: &ProbabilityTable) {
    let [a, b, c] = &table.entries;
    rec.extend([
        num("p11", a.total),
        num("p12", b.total),
        num("p22", c.total),
        num("p11_independent", a.independent),
        num("p12_independent", b.independent),
        num("p22_independent", c.independent),
        num("anti_bunching", b.total),
        num("anti_bunching_independent", b.independent),
        num("delta_p", b.interaction),
        num("unitarity_defect", table.unitarity_defect()),
    ]);
}

fn cmd_point(opts: &Opts) -> CliResult<String> {
    let params = point_params(opts)?;
    let table = exact_table(opts, &params)?;
    let s = amplitudes(params.center, params.gamma, params.geometry);
    let mut rec: Record = vec![
        text("geometry", params.geometry.cli_name()),
        num("gamma", params.gamma),
        num("delay", params.delay),
        num("center", params.center),
        text("rule", rule_name(table.rule)),
    ];
    table_columns(&mut rec, &table);
    if params.geometry == Geometry::HomSplit {
        let (t, r) = (s.transmission(), s.reflection());
        let f = gaussian_factors(params.gamma, params.delay, false)?;
        rec.extend([
            num("nu", f.nu),
            num("zeta", f.zeta),
            num("p0_analytic", p0_hom_delayed(t, r, f.nu)?),
            num("delta_p_analytic", delta_p_hom(f.zeta, t, r, HomCorrection::Normalized)?),
            num("delta_p_analytic_literal", delta_p_hom(f.zeta, t, r, HomCorrection::Literal)?),
        ]);
    } else {
        // Crossing probability of the link; the reflector is its dual.
        let link = amplitudes(params.center, params.gamma, Geometry::ResonantLink);
        let (t, r) = (link.transmission(), link.reflection());
        let zeta = zeta_blockade(params.gamma, params.delay)?;
        rec.extend([
            num("zeta_bl", zeta),
            num("p0_analytic", 2.0 * t * r),
            num("delta_p_analytic", delta_p_res(zeta, t, r)?),
        ]);
    }
    let oracle = grid_probability(&params, &GridSpec::default())?;
    let o = oracle.anti_bunching().total;
    rec.extend([
        num("oracle_anti_bunching", o),
        num("oracle_abs_deviation", (o - table.anti_bunching().total).abs()),
    ]);
    Ok(render(&[rec], opts.format(), true))
}

fn collect_rows<F>(xs: &[f64], f: F) -> CliResult<Vec<Record>>
where
    F: Fn(f64) -> CliResult<Record> + Sync,
{
    xs.par_iter().map(|&x| f(x)).collect()
}

fn cmd_fig_hom(opts: &Opts) -> CliResult<String> {
    if let Some(g) = &opts.geometry {
        if g.parse::<Geometry>()? != Geometry::HomSplit {
            return Err(usage("fig-hom uses the hom geometry"));
        }
    }
    let delay = opts.delay.unwrap_or(0.0);
    let gammas = opts.grid((2.0, 20.0), 19, false)?;
    let rows = collect_rows(&gammas, |gamma| {
        let params = ModelParams::balanced_hom(gamma, delay)?;
        let exact = exact_table(opts, &params)?.anti_bunching().total;
        let asym = p_hom_asymptotic(gamma, delay, gamma, HomCorrection::Normalized)?;
        Ok(vec![
            num("gamma", gamma),
            num("p_hom_exact", exact),
            num("p_hom_asymptotic", asym),
            num("rel_diff", (asym - exact).abs() / exact.abs()),
        ])
    })?;
    Ok(render(&rows, opts.format(), false))
}

fn resonance_params(opts: &Opts, gamma: f64, delay: f64) -> CliResult<ModelParams> {
    let geometry = opts.geometry(Geometry::ResonantLink)?;
    if geometry == Geometry::HomSplit {
        return Err(usage("fig-blockade needs the link or reflector geometry"));
    }
    Ok(ModelParams::new(gamma, delay, opts.center.unwrap_or(0.0), geometry, Channel::One, Channel::One)?)
}

fn cmd_fig_blockade(opts: &Opts) -> CliResult<String> {
    let rows = if opts.inset {
        let delay = opts.delay.unwrap_or(0.0);
        let gammas = opts.grid((0.3, 5.0), 25, true)?;
        collect_rows(&gammas, |gamma| {
            let params = resonance_params(opts, gamma, delay)?;
            Ok(vec![num("gamma", gamma), num("p_res_total", exact_table(opts, &params)?.anti_bunching().total)])
        })?
    } else {
        let gamma = opts.gamma.unwrap_or(10.0);
        let delays = opts.grid((-3.0, 3.0), 25, false)?;
        collect_rows(&delays, |delay| {
            let params = resonance_params(opts, gamma, delay)?;
            Ok(vec![
                num("delay", delay),
                num("delta_p_res_exact", exact_table(opts, &params)?.anti_bunching().interaction),
                num("zeta_bl", zeta_blockade(gamma, delay)?),
            ])
        })?
    };
    Ok(render(&rows, opts.format(), false))
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Variable {
    Gamma,
    Delay,
    Center,
}

fn cmd_sweep(opts: &Opts) -> CliResult<String> {
    let var = match opts.vary.as_deref().unwrap_or("gamma") {
        "gamma" => Variable::Gamma,
        "delay" => Variable::Delay,
        "center" => Variable::Center,
        other => return Err(usage(format!("cannot vary '{other}'; expected gamma, delay or center"))),
    };
    let base = point_params(opts)?;
    let default = match var {
        Variable::Gamma => (1.0, 20.0),
        Variable::Delay => (-3.0, 3.0),
        Variable::Center => (base.center - 5.0, base.center + 5.0),
    };
    let xs = opts.grid(default, 11, false)?;
    let rows = collect_rows(&xs, |x| {
        let params = match var {
            // A balanced HOM point stays balanced as Γ moves.
            Variable::Gamma if base.geometry == Geometry::HomSplit && opts.center.is_none() => {
                base.with_gamma(x)?.with_center(x)?
            }
            Variable::Gamma => base.with_gamma(x)?,
            Variable::Delay => base.with_delay(x)?,
            Variable::Center => base.with_center(x)?,
        };
        let table = exact_table(opts, &params)?;
        let mut rec: Record = vec![
            text("geometry", params.geometry.cli_name()),
            num("gamma", params.gamma),
            num("delay", params.delay),
            num("center", params.center),
        ];
        table_columns(&mut rec, &table);
        let asym = match params.geometry {
            Geometry::HomSplit => p_hom_asymptotic(params.gamma, params.delay, params.center, HomCorrection::Normalized)?,
            _ => p_res_asymptotic(params.gamma, params.delay, params.center)?,
        };
        rec.push(num("anti_bunching_asymptotic", asym));
        Ok(rec)
    })?;
    Ok(render(&rows, opts.format(), false))
}

fn cmd_audit(opts: &Opts) -> CliResult<(String, bool)> {
    let summary = run_audit(&GridSpec::default(), opts.rule_override()?.as_ref())?;
    let body = match opts.format() {
        Format::Json => serde_json::to_string_pretty(&summary).expect("serializable") + "\n",
        Format::Csv => {
            let mut rows: Vec<Record> = Vec::new();
            for r in &summary.comparisons {
                rows.push(vec![
                    text("check", format!("oracle {} {}", r.params.geometry, r.label)),
                    num("gamma", r.params.gamma),
                    num("delay", r.params.delay),
                    num("value", r.abs_deviation),
                    num("tolerance", r.tolerance),
                    text("pass", r.pass.to_string()),
                ]);
            }
            for u in &summary.unitarity {
                let tag = if u.interaction { "on" } else { "off" };
                rows.push(vec![
                    text("check", format!("unitarity {} interaction {tag}", u.params.geometry)),
                    num("gamma", u.params.gamma),
                    num("delay", u.params.delay),
                    num("value", u.defect),
                    num("tolerance", u.tolerance),
                    text("pass", u.pass.to_string()),
                ]);
            }
            for r in &summary.factor.reports {
                rows.push(vec![
                    text("check", format!("factor {:?}", summary.factor.verdict).to_lowercase()),
                    num("gamma", r.params.gamma),
                    num("delay", r.params.delay),
                    num("value", r.rel_deviation),
                    num("tolerance", r.tolerance),
                    text("pass", r.pass.to_string()),
                ]);
            }
            render(&rows, Format::Csv, false)
        }
    };
    Ok((body, summary.pass))
}

/// Runs the CLI on `args` and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let (opts, cmd): (Opts, fn(&Opts) -> CliResult<(String, bool)>) = match cli.command {
        Command::Point(o) => (o, |o| cmd_point(o).map(|s| (s, true))),
        Command::FigHom(o) => (o, |o| cmd_fig_hom(o).map(|s| (s, true))),
        Command::FigBlockade(o) => (o, |o| cmd_fig_blockade(o).map(|s| (s, true))),
        Command::Sweep(o) => (o, |o| cmd_sweep(o).map(|s| (s, true))),
        Command::Audit(o) => (o, cmd_audit),
    };
    let result = opts.merged().and_then(|o| {
        let (body, pass) = cmd(&o)?;
        emit(&o, &body)?;
        Ok(pass)
    });
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => {
            eprintln!("audit failed");
            EXIT_AUDIT
        }
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            EXIT_USAGE
        }
        Err(CliError::Numeric(m)) => {
            eprintln!("numeric failure: {m}");
            EXIT_NUMERIC
        }
        Err(CliError::Io(m)) => {
            eprintln!("error: {m}");
            EXIT_NUMERIC
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(format_sig9(0.0), "0");
        assert_eq!(format_sig9(1.0), "1");
        assert_eq!(format_sig9(0.028_209_479_177_387_81), "0.0282094792");
        assert_eq!(format_sig9(-2.5), "-2.5");
        assert_eq!(format_sig9(123_456_789.4), "123456789");
        assert_eq!(format_sig9(1.234_567_891e-7), "1.23456789e-07");
        assert_eq!(format_sig9(9.999_999_999_9), "10");
        assert_eq!(format_sig9(6.02e23), "6.02e+23");
        assert_eq!(format_sig9(3.149_284_32e-5), "3.14928432e-05");
        assert_eq!(format_sig9(0.000_123), "0.000123");
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("2:20").unwrap(), (2.0, 20.0));
        assert_eq!(parse_range("-3, 3").unwrap(), (-3.0, 3.0));
        assert!(parse_range("5").is_err());
        assert_eq!(spaced(1.0, 3.0, 3, false).unwrap(), vec![1.0, 2.0, 3.0]);
        let l = spaced(1.0, 100.0, 3, true).unwrap();
        assert!((l[1] - 10.0).abs() < 1e-12 && l[2] == 100.0);
        assert!(spaced(2.0, 2.0, 5, false).is_err());
        assert!(spaced(-1.0, 2.0, 5, true).is_err());
        assert!(spaced(1.0, 2.0, 1, false).is_err());
    }

    #[test]
    fn config_fills_missing_flags_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "# comment\ngamma = 4\ndelay=0.5\nformat = json\n").unwrap();
        let opts = Opts {
            gamma: Some(7.0),
            config: Some(path.clone()),
            ..Opts::default()
        }
        .merged()
        .unwrap();
        assert_eq!(opts.gamma, Some(7.0));
        assert_eq!(opts.delay, Some(0.5));
        assert_eq!(opts.format, Some(Format::Json));
        std::fs::write(&path, "colour = red\n").unwrap();
        let bad = Opts { config: Some(path), ..Opts::default() }.merged();
        assert!(matches!(bad, Err(CliError::Usage(_))));
    }

    fn run_to_file(args: &[&str]) -> (i32, String) {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("out.txt");
        let mut full = vec!["waveguide-hom"];
        full.extend_from_slice(args);
        let out_s = out.to_str().unwrap().to_string();
        full.extend(["--output", &out_s]);
        let code = run(full);
        (code, std::fs::read_to_string(&out).unwrap_or_default())
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_to_file(&["point", "--gamma", "-1"]).0, EXIT_USAGE);
        assert_eq!(run_to_file(&["point", "--gamma", "0.05"]).0, EXIT_USAGE);
        assert_eq!(run_to_file(&["point", "--geometry", "prism"]).0, EXIT_USAGE);
        assert_eq!(run_to_file(&["fig-hom", "--range", "5:5"]).0, EXIT_USAGE);
        assert_eq!(run_to_file(&["fig-blockade", "--geometry", "hom"]).0, EXIT_USAGE);
        assert_eq!(run_to_file(&["point", "--tol", "0"]).0, EXIT_USAGE);
        assert_eq!(run(["waveguide-hom", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["waveguide-hom", "--help"]), EXIT_OK);
    }

    #[test]
    fn figure_headers() {
        let (code, hom) = run_to_file(&["fig-hom", "--range", "2:20", "--steps", "3"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(hom.lines().next(), Some("gamma,p_hom_exact,p_hom_asymptotic,rel_diff"));
        assert_eq!(hom.lines().count(), 4);
        let (_, bl) = run_to_file(&["fig-blockade", "--range=-2:2", "--steps", "5"]);
        assert_eq!(bl.lines().next(), Some("delay,delta_p_res_exact,zeta_bl"));
        let (_, inset) = run_to_file(&["fig-blockade", "--inset", "--range", "0.5:2", "--steps", "3", "--log"]);
        assert_eq!(inset.lines().next(), Some("gamma,p_res_total"));
    }

    #[test]
    fn blockade_column_is_even_in_delay() {
        let (_, bl) = run_to_file(&["fig-blockade", "--range=-2:2", "--steps", "9"]);
        let col: Vec<f64> = bl.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
        for i in 0..col.len() {
            assert!((col[i] - col[col.len() - 1 - i]).abs() < 1e-6);
        }
    }

    #[test]
    fn outputs_are_byte_stable() {
        let args = ["sweep", "--vary", "delay", "--range", "0:2", "--steps", "3", "--format", "json"];
        let (a, b) = (run_to_file(&args), run_to_file(&args));
        assert_eq!(a.0, EXIT_OK);
        assert_eq!(a.1, b.1);
        let v: Value = serde_json::from_str(&a.1).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 3);
    }

    #[test]
    fn tolerance_forces_adaptive() {
        let (_, gh) = run_to_file(&["point", "--gamma", "5", "--format", "json"]);
        let (_, ad) = run_to_file(&["point", "--gamma", "5", "--tol", "1e-9", "--format", "json"]);
        let gh: Value = serde_json::from_str(&gh).unwrap();
        let ad: Value = serde_json::from_str(&ad).unwrap();
        assert_eq!(gh["rule"], "gauss_hermite");
        assert_eq!(ad["rule"], "adaptive_panel");
        let d = gh["p12"].as_f64().unwrap() - ad["p12"].as_f64().unwrap();
        assert!(d.abs() < 1e-8);
    }
}
