//! `hulthen` command-line driver: argument and config handling, the
//! subcommands, and their CSV/JSON/SVG writers.

pub mod config;
pub mod svg;
pub mod table;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use hulthen::analysis::{
    self, find_intersections, imaginary_onset, parse_grid, Axis, CurveLabel, Formula, Level,
    OracleSettings, ScanCurve,
};
use hulthen::spectra::alpha_threshold;
use hulthen::wavefn::{normalize, RadialFunction};
use hulthen::{Alignment, Branch, DeltaPolicy, ModelParams64, RadialGrid64, SpinorSolution64, ThresholdKind};
use thiserror::Error;

use config::ConfigFile;
use table::{Cell, Table};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("verification failed: {0}")]
    VerifyFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Domain(_) => 2,
            CliError::Io(_) => 3,
            CliError::VerifyFailed(_) => 4,
        }
    }

    pub fn io(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }

    pub fn csv(e: csv::Error) -> Self {
        match e.into_kind() {
            csv::ErrorKind::Io(e) => CliError::Io(e.to_string()),
            other => CliError::Io(format!("{other:?}")),
        }
    }
}

impl From<hulthen::Error> for CliError {
    fn from(e: hulthen::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "hulthen", version, about = "Dirac and Klein-Gordon spectra with the Hulthen potential")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

/// Shared flags. Values stay as text until merged with the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Opts {
    #[arg(long = "Z", global = true, value_name = "Z")]
    pub z: Option<String>,
    /// Screening parameter; a comma list where several values make sense.
    #[arg(long, global = true)]
    pub alpha: Option<String>,
    #[arg(long, global = true)]
    pub mu0: Option<String>,
    /// Radial number (principal n for the simplified formulas): `k`, `a..=b`, `a..b` or `a,b,c`.
    #[arg(long, global = true)]
    pub nr: Option<String>,
    #[arg(long, global = true)]
    pub ell: Option<String>,
    #[arg(long, global = true)]
    pub dim: Option<String>,
    /// aligned | unaligned
    #[arg(long, global = true)]
    pub alignment: Option<String>,
    /// plus | minus
    #[arg(long, global = true)]
    pub branch: Option<String>,
    /// consistent | literal
    #[arg(long = "delta-policy", global = true)]
    pub delta_policy: Option<String>,
    /// dirac | kg | kg-simplified | dirac-simplified
    #[arg(long, global = true)]
    pub formula: Option<String>,
    /// `lo:hi:count[:log|lin]`, a comma list, or a point count (wavefunction).
    #[arg(long, global = true)]
    pub grid: Option<String>,
    /// csv | json
    #[arg(long, global = true)]
    pub format: Option<String>,
    #[arg(long, global = true)]
    pub plot: bool,
    /// Output file, or directory for `figures` and `verify`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, env = "HULTHEN_CONFIG")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Energies over a range of states.
    Spectrum,
    /// Normalized F and G for one Dirac state.
    Wavefunction,
    /// Energy curves along alpha or D.
    Scan {
        #[arg(long, default_value = "alpha")]
        axis: String,
    },
    /// Crossings between curves of adjacent dimension.
    Intersect,
    /// Screening values where the simplified spectra turn imaginary.
    Threshold,
    /// Oracle, identity and consistency checks.
    Verify,
    /// Data behind the four spectrum figures.
    Figures,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Flags merged over config-file values.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    raw: Opts,
    file: ConfigFile,
}

impl Settings {
    pub fn new(opts: Opts) -> Result<Self, CliError> {
        let file = match &opts.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        Ok(Self { raw: opts, file })
    }

    fn text(&self, key: &str) -> Option<String> {
        let flag = match key {
            "Z" => &self.raw.z,
            "alpha" => &self.raw.alpha,
            "mu0" => &self.raw.mu0,
            "nr" => &self.raw.nr,
            "ell" => &self.raw.ell,
            "dim" => &self.raw.dim,
            "alignment" => &self.raw.alignment,
            "branch" => &self.raw.branch,
            "delta-policy" => &self.raw.delta_policy,
            "formula" => &self.raw.formula,
            "grid" => &self.raw.grid,
            "format" => &self.raw.format,
            _ => &None,
        };
        flag.clone().or_else(|| self.file.get(key).map(str::to_string))
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, CliError>
    where
        T::Err: std::fmt::Display,
    {
        match self.text(key) {
            None => Ok(default),
            Some(s) => s
                .trim()
                .parse()
                .map_err(|e| CliError::Usage(format!("--{key}: cannot parse '{s}': {e}"))),
        }
    }

    pub fn z(&self) -> Result<f64, CliError> {
        self.parsed("Z", 1.0)
    }

    pub fn mu0(&self) -> Result<f64, CliError> {
        self.parsed("mu0", 1.0)
    }

    pub fn alphas(&self) -> Result<Vec<f64>, CliError> {
        match self.text("alpha") {
            None => Ok(vec![0.1]),
            Some(s) => float_list("alpha", &s),
        }
    }

    pub fn alpha(&self) -> Result<f64, CliError> {
        single("alpha", self.alphas()?)
    }

    pub fn range(&self, key: &str, default: &str) -> Result<Vec<u32>, CliError> {
        parse_range(key, &self.text(key).unwrap_or_else(|| default.to_string()))
    }

    pub fn alignment(&self) -> Result<Alignment, CliError> {
        self.parsed("alignment", Alignment::Unaligned)
    }

    pub fn branch(&self) -> Result<Branch, CliError> {
        self.parsed("branch", Branch::Minus)
    }

    pub fn delta_policy(&self) -> Result<DeltaPolicy, CliError> {
        self.parsed("delta-policy", DeltaPolicy::Consistent)
    }

    pub fn formula(&self) -> Result<Formula, CliError> {
        self.parsed("formula", Formula::Dirac)
    }

    pub fn grid(&self) -> Option<String> {
        self.text("grid")
    }

    pub fn format(&self) -> Result<Format, CliError> {
        match self.text("format").as_deref().map(str::trim) {
            None | Some("csv") => Ok(Format::Csv),
            Some("json") => Ok(Format::Json),
            Some(o) => Err(CliError::Usage(format!("--format: expected csv or json, got '{o}'"))),
        }
    }

    pub fn plot(&self) -> Result<bool, CliError> {
        if self.raw.plot {
            return Ok(true);
        }
        match self.file.get("plot").map(|s| s.trim().to_ascii_lowercase()) {
            None => Ok(false),
            Some(s) if matches!(s.as_str(), "true" | "1" | "yes" | "on") => Ok(true),
            Some(s) if matches!(s.as_str(), "false" | "0" | "no" | "off") => Ok(false),
            Some(s) => Err(CliError::Usage(format!("plot: expected a boolean, got '{s}'"))),
        }
    }

    pub fn out(&self) -> Option<PathBuf> {
        self.raw.out.clone().or_else(|| self.file.get("out").map(PathBuf::from))
    }
}

fn float_list(key: &str, s: &str) -> Result<Vec<f64>, CliError> {
    let v = s
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("--{key}: bad number '{}'", t.trim())))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if v.is_empty() {
        return Err(CliError::Usage(format!("--{key}: empty list")));
    }
    Ok(v)
}

fn single<T: Copy>(key: &str, v: Vec<T>) -> Result<T, CliError> {
    match v.as_slice() {
        [x] => Ok(*x),
        _ => Err(CliError::Usage(format!("--{key}: this command takes a single value"))),
    }
}

/// `k`, `a..=b`, `a..b` (half-open) or a comma list. Empty ranges are a
/// usage error.
pub fn parse_range(key: &str, s: &str) -> Result<Vec<u32>, CliError> {
    let s = s.trim();
    let num = |t: &str| {
        t.trim()
            .parse::<u32>()
            .map_err(|_| CliError::Usage(format!("--{key}: bad integer '{}'", t.trim())))
    };
    let v: Vec<u32> = if let Some((a, b)) = s.split_once("..=") {
        (num(a)?..=num(b)?).collect()
    } else if let Some((a, b)) = s.split_once("..") {
        (num(a)?..num(b)?).collect()
    } else {
        s.split(',').filter(|t| !t.trim().is_empty()).map(num).collect::<Result<_, _>>()?
    };
    if v.is_empty() {
        return Err(CliError::Usage(format!("--{key}: empty range '{s}'")));
    }
    Ok(v)
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code. Messages go to `stderr`.
pub fn run_from<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            return code;
        }
    };
    match run(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let s = Settings::new(cli.opts.clone())?;
    match &cli.command {
        Command::Spectrum => emit(&s, &spectrum(&s)?, false, stdout),
        Command::Wavefunction => emit(&s, &wavefunction(&s)?, true, stdout),
        Command::Scan { axis } => emit(&s, &scan(&s, axis)?, false, stdout),
        Command::Intersect => emit(&s, &intersect(&s)?, false, stdout),
        Command::Threshold => emit(&s, &threshold(&s)?, false, stdout),
        Command::Verify => verify(&s, stdout),
        Command::Figures => figures(&s, stdout),
    }
}

fn emit(s: &Settings, t: &Table, comments: bool, stdout: &mut dyn Write) -> Result<(), CliError> {
    let format = s.format()?;
    match s.out() {
        Some(path) => {
            let f = fs::File::create(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let w = std::io::BufWriter::new(f);
            write_table(t, format, comments, w)
        }
        None => write_table(t, format, comments, stdout),
    }
}

fn write_table<W: Write>(t: &Table, format: Format, comments: bool, w: W) -> Result<(), CliError> {
    match format {
        Format::Csv => t.write_csv(w, comments),
        Format::Json => t.write_json(w),
    }
}

fn status(e: &hulthen::EnergyResult64) -> &'static str {
    if e.is_real() {
        "real"
    } else {
        "imaginary"
    }
}

pub fn spectrum(s: &Settings) -> Result<Table, CliError> {
    let formula = s.formula()?;
    let (z, mu0, branch, alignment) = (s.z()?, s.mu0()?, s.branch()?, s.alignment()?);
    let alphas = s.alphas()?;
    let mut t = Table::new("spectrum", &["source", "n_r", "ell", "D", "kappa", "alpha", "branch", "energy", "status"]);
    t.meta("formula", formula.name());
    t.meta("Z", z);
    t.meta("mu0", mu0);
    if formula.is_simplified() {
        let (ns, dims) = (s.range("nr", "1")?, s.range("dim", "3")?);
        for &n in &ns {
            for &d in &dims {
                for &a in &alphas {
                    let e = analysis::scan::evaluate(formula, &Level::principal(n, f64::from(d)), a, branch, z, mu0)?;
                    t.push(vec![
                        e.source.name().into(),
                        n.into(),
                        Cell::Empty,
                        d.into(),
                        Cell::Empty,
                        a.into(),
                        e.branch.to_string().into(),
                        e.value().into(),
                        status(&e).into(),
                    ]);
                }
            }
        }
    } else {
        let (nrs, ells, dims) = (s.range("nr", "0")?, s.range("ell", "0")?, s.range("dim", "3")?);
        for &nr in &nrs {
            for &l in &ells {
                for &d in &dims {
                    let level = Level::state(nr, l, f64::from(d), alignment);
                    let kappa = level.to_state()?.kappa();
                    for &a in &alphas {
                        let e = analysis::scan::evaluate(formula, &level, a, branch, z, mu0)?;
                        t.push(vec![
                            e.source.name().into(),
                            nr.into(),
                            l.into(),
                            d.into(),
                            kappa.into(),
                            a.into(),
                            e.branch.to_string().into(),
                            e.value().into(),
                            status(&e).into(),
                        ]);
                    }
                }
            }
        }
    }
    Ok(t)
}

pub fn wavefunction(s: &Settings) -> Result<Table, CliError> {
    if s.formula()? != Formula::Dirac {
        return Err(CliError::Usage("wavefunction is only defined for --formula dirac".into()));
    }
    let nr = single("nr", s.range("nr", "0")?)?;
    let ell = single("ell", s.range("ell", "0")?)?;
    let dim = single("dim", s.range("dim", "3")?)?;
    let (z, mu0, alpha, branch, policy) = (s.z()?, s.mu0()?, s.alpha()?, s.branch()?, s.delta_policy()?);
    let state = hulthen::QuantumState64::new(nr, ell, dim, s.alignment()?)?;
    let params = ModelParams64::new(z, alpha, mu0)?;
    let energy = hulthen::spectra::dirac_energy(&state, &params, branch);
    if !energy.is_real() {
        let label = CurveLabel::new(Formula::Dirac, Level::state(nr, ell, f64::from(dim), s.alignment()?))
            .with_branch(branch)
            .with_coupling(z, mu0);
        let hint = match imaginary_onset(&label, 1e-8, alpha) {
            Some(a) => format!("; the energy is real only below alpha = {a:.16e}"),
            None => String::new(),
        };
        return Err(CliError::Domain(format!(
            "energy is imaginary at alpha = {alpha} for n_r={nr} l={ell} D={dim}{hint}"
        )));
    }
    let grid = match s.grid() {
        None => RadialGrid64::hybrid(alpha, 400)?,
        Some(g) => match g.trim().parse::<usize>() {
            Ok(n) => RadialGrid64::hybrid(alpha, n)?,
            Err(_) => RadialGrid64::from_points(parse_grid(&g)?)?,
        },
    };
    let solution = SpinorSolution64::new(&state, &params, &energy, policy)?;
    let rf = normalize(&RadialFunction::sample(solution, &grid, policy)?)?;
    let mut t = Table::new("wavefunction", &["r", "F", "G"]);
    t.meta("n_r", nr);
    t.meta("ell", ell);
    t.meta("D", dim);
    t.meta("Z", z);
    t.meta("mu0", mu0);
    t.meta("alpha", alpha);
    t.meta("branch", branch.to_string());
    t.meta("E", energy.value().unwrap_or(f64::NAN));
    t.meta("epsilon", rf.endpoint_exponents.0);
    t.meta("delta", rf.endpoint_exponents.1);
    t.meta("C", rf.norm_constant.unwrap_or(f64::NAN));
    t.meta("nodes", rf.nodes());
    for ((r, f), g) in rf.grid.iter().zip(&rf.f_values).zip(&rf.g_values) {
        t.push(vec![(*r).into(), (*f).into(), (*g).into()]);
    }
    Ok(t)
}

/// Curve label without the coordinate that varies along the scan.
pub fn curve_name(c: &ScanCurve) -> String {
    let along_d = c.axis == Axis::Dimension;
    let lvl = match c.label.level {
        Level::Principal { n, .. } if along_d => format!("n={n}"),
        Level::Principal { n, dim } => format!("n={n} D={dim}"),
        Level::State { n_r, ell, alignment, .. } if along_d => format!("n_r={n_r} l={ell} {alignment}"),
        Level::State { n_r, ell, dim, alignment } => format!("n_r={n_r} l={ell} D={dim} {alignment}"),
    };
    format!("{} {lvl}", c.label.formula)
}

fn curves_table(command: &'static str, curves: &[ScanCurve]) -> Table {
    let mut t = Table::new(command, &["curve", "label", "x", "energy", "status"]);
    for (i, c) in curves.iter().enumerate() {
        let label = curve_name(c);
        for p in &c.points {
            t.push(vec![i.into(), label.as_str().into(), p.x.into(), p.energy.value().into(), status(&p.energy).into()]);
        }
    }
    t
}

fn grid_or(s: &Settings, default: fn() -> Vec<f64>) -> Result<Vec<f64>, CliError> {
    match s.grid() {
        Some(g) => Ok(parse_grid(&g)?),
        None => Ok(default()),
    }
}

fn labels(s: &Settings, formula: Formula) -> Result<Vec<CurveLabel>, CliError> {
    let (z, mu0, branch) = (s.z()?, s.mu0()?, s.branch()?);
    let mut out = Vec::new();
    if formula.is_simplified() {
        for n in s.range("nr", "1..=3")? {
            for d in s.range("dim", "2..=5")? {
                out.push(CurveLabel::new(formula, Level::principal(n, f64::from(d))));
            }
        }
    } else {
        let alignment = s.alignment()?;
        for nr in s.range("nr", "0")? {
            for l in s.range("ell", "0")? {
                for d in s.range("dim", "3")? {
                    out.push(
                        CurveLabel::new(formula, Level::state(nr, l, f64::from(d), alignment))
                            .with_branch(branch)
                            .with_coupling(z, mu0),
                    );
                }
            }
        }
    }
    Ok(out)
}

pub fn scan_curves(s: &Settings, axis: Axis) -> Result<Vec<ScanCurve>, CliError> {
    let formula = s.formula()?;
    Ok(match axis {
        Axis::Alpha => analysis::alpha_scan(&labels(s, formula)?, &grid_or(s, analysis::default_alpha_grid)?)?,
        Axis::Dimension => {
            let default_n = if formula.is_simplified() { "1..=3" } else { "0" };
            analysis::dimension_scan(
                formula,
                &s.range("nr", default_n)?,
                s.alpha()?,
                &grid_or(s, analysis::default_dimension_grid)?,
            )?
        }
    })
}

pub fn scan(s: &Settings, axis: &str) -> Result<Table, CliError> {
    let axis = match axis.trim().to_ascii_lowercase().as_str() {
        "alpha" => Axis::Alpha,
        "dim" | "d" | "dimension" => Axis::Dimension,
        o => return Err(CliError::Usage(format!("--axis: expected alpha or dimension, got '{o}'"))),
    };
    let curves = scan_curves(s, axis)?;
    let mut t = curves_table("scan", &curves);
    t.meta("formula", s.formula()?.name());
    t.meta("axis", if axis == Axis::Alpha { "alpha" } else { "D" });
    if axis == Axis::Dimension {
        t.meta("alpha", s.alpha()?);
    }
    Ok(t)
}

pub fn intersect(s: &Settings) -> Result<Table, CliError> {
    let formula = s.formula()?;
    let grid = grid_or(s, analysis::default_alpha_grid)?;
    // Levels that do not exist (e.g. 2n + D - 3 <= 0) are skipped.
    let all = labels(s, formula)?;
    let ls: Vec<CurveLabel> = all.iter().copied().filter(|l| l.energy_at_alpha(grid[0]).is_ok()).collect();
    let curves = analysis::alpha_scan(&ls, &grid)?;
    let mut t = Table::new(
        "intersect",
        &["first", "second", "alpha_star", "energy", "gap", "tolerance", "verified"],
    );
    let mut pairs = 0usize;
    for (i, a) in curves.iter().enumerate() {
        for b in &curves[i + 1..] {
            let (la, lb) = (a.label.level, b.label.level);
            let adjacent = match (la, lb) {
                (Level::Principal { n, dim }, Level::Principal { n: m, dim: e }) => n == m && (e - dim).abs() == 1.0,
                (
                    Level::State { n_r, ell, dim, .. },
                    Level::State { n_r: m, ell: l, dim: e, .. },
                ) => n_r == m && ell == l && (e - dim).abs() == 1.0,
                _ => false,
            };
            if !adjacent {
                continue;
            }
            pairs += 1;
            for r in find_intersections(a, b)? {
                t.push(vec![
                    r.first.describe().into(),
                    r.second.describe().into(),
                    r.x_star.into(),
                    r.energy.into(),
                    r.gap.into(),
                    r.tolerance.into(),
                    r.verified.into(),
                ]);
            }
        }
    }
    t.meta("formula", formula.name());
    t.meta("pairs", pairs);
    t.meta("skipped_levels", all.len() - ls.len());
    Ok(t)
}

pub fn threshold(s: &Settings) -> Result<Table, CliError> {
    let kind = match s.formula()? {
        Formula::KleinGordon | Formula::KleinGordonSimplified => ThresholdKind::Kg,
        Formula::Dirac | Formula::DiracSimplified => ThresholdKind::Dirac,
    };
    let ns = s.range("nr", "1..=5")?;
    let dims = s.range("dim", "2..=8")?;
    let mut t = Table::new("threshold", &["n", "D", "alpha_threshold"]);
    t.meta("kind", if kind == ThresholdKind::Kg { "kg" } else { "dirac" });
    for &n in &ns {
        for &d in &dims {
            let a = alpha_threshold::<f64>(kind, n, f64::from(d)).ok();
            t.push(vec![n.into(), d.into(), a.into()]);
        }
    }
    Ok(t)
}

fn out_dir(s: &Settings) -> Result<PathBuf, CliError> {
    let dir = s.out().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    Ok(dir)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn table_bytes(t: &Table, format: Format) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    write_table(t, format, false, &mut buf)?;
    Ok(buf)
}

fn ext(format: Format) -> &'static str {
    match format {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

pub fn verify(s: &Settings, stdout: &mut dyn Write) -> Result<(), CliError> {
    let format = s.format()?;
    let report = analysis::verify::run_all(&OracleSettings::default())?;
    let mut t = Table::new("verify", &["id", "name", "passed", "detail", "seconds"]);
    for c in &report.checks {
        t.push(vec![c.id.into(), c.name.into(), c.passed.into(), c.detail.as_str().into(), c.seconds.into()]);
    }
    if s.out().is_some() {
        let dir = out_dir(s)?;
        write_file(&dir.join(format!("verify.{}", ext(format))), &table_bytes(&t, format)?)?;
        let mut rows = Table::new(
            "approximation",
            &["n_r", "ell", "D", "kappa", "alpha", "e_closed_form", "e_oracle_approx", "e_oracle_exact", "gap_approx", "gap_exact", "diagnostic"],
        );
        for r in &report.approximation {
            rows.push(vec![
                r.n_r.into(),
                r.ell.into(),
                r.dim.into(),
                r.kappa.into(),
                r.alpha.into(),
                r.e_closed_form.value().into(),
                r.e_oracle_approx.into(),
                r.e_oracle_exact.into(),
                r.gap_approx.into(),
                r.gap_exact.into(),
                r.diagnostic.clone().map_or(Cell::Empty, Cell::Text),
            ]);
        }
        write_file(&dir.join(format!("approximation.{}", ext(format))), &table_bytes(&rows, format)?)?;
        let consistency = serde_json::to_vec_pretty(&report.consistency).map_err(|e| CliError::Io(e.to_string()))?;
        write_file(&dir.join("consistency.json"), &consistency)?;
    }
    write_table(&t, format, false, &mut *stdout)?;
    if report.all_passed() {
        Ok(())
    } else {
        let failed: Vec<String> = report.checks.iter().filter(|c| !c.passed).map(|c| c.id.to_string()).collect();
        Err(CliError::VerifyFailed(format!("checks {} failed", failed.join(", "))))
    }
}

pub fn figures(s: &Settings, stdout: &mut dyn Write) -> Result<(), CliError> {
    let format = s.format()?;
    let plot = s.plot()?;
    let dir = out_dir(s)?;
    for fig in analysis::all_figures()? {
        let mut t = curves_table("figures", &fig.curves);
        t.meta("figure", fig.name);
        t.meta("title", fig.title);
        t.meta("x", fig.x_label);
        t.meta("y", fig.y_label);
        let data = dir.join(format!("{}.{}", fig.name, ext(format)));
        write_file(&data, &table_bytes(&t, format)?)?;
        writeln!(stdout, "{}", data.display()).map_err(CliError::io)?;
        if plot {
            let path = dir.join(format!("{}.svg", fig.name));
            write_file(&path, svg::render(fig.title, fig.x_label, fig.y_label, &fig.curves).as_bytes())?;
            writeln!(stdout, "{}", path.display()).map_err(CliError::io)?;
        }
    }
    Ok(())
}
