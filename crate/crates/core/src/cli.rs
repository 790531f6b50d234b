//! Command-line front end: symbol specification, computations, studies, and
//! machine-readable CSV/JSON output.
//!
//! Factor angles are given as fractions of a full turn. The `p/q` (or bare
//! integer) form is carried exactly, so the commensurability hypothesis of
//! the multi-singularity law can be certified; a decimal angle is treated as
//! an uncertified real and routes multi-singularity predictions through the
//! experimental gate.

use crate::asymptotics::{
    constant_profile, convergence_study, predict_multi_at, vanishing_factor_study, StudyOptions,
};
use crate::error::Error;
use crate::integral_ops::{fh_kernel, k_alpha_bounds, kernel_norm_with};
use crate::krylov::NormOptions;
use crate::symbols::{Angle, FHFactor, FHSymbol, SmoothPart};
use crate::toeplitz::ToeplitzOperator;
use num_complex::Complex64;
use std::fmt::Write as _;
use std::io::Write;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;
pub const EXIT_EXPERIMENTAL: i32 = 4;

const DEFAULT_MAX_ITER: usize = 5000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Coeffs,
    Norm,
    Knorm,
    Bounds,
    Predict,
    Study,
    Vanish,
    Profile,
}

impl Command {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "coeffs" => Command::Coeffs,
            "norm" => Command::Norm,
            "knorm" => Command::Knorm,
            "bounds" => Command::Bounds,
            "predict" => Command::Predict,
            "study" => Command::Study,
            "vanish" => Command::Vanish,
            "profile" => Command::Profile,
            _ => return None,
        })
    }

    fn name(&self) -> &'static str {
        match self {
            Command::Coeffs => "coeffs",
            Command::Norm => "norm",
            Command::Knorm => "knorm",
            Command::Bounds => "bounds",
            Command::Predict => "predict",
            Command::Study => "study",
            Command::Vanish => "vanish",
            Command::Profile => "profile",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorSpec {
    pub angle: Angle,
    pub alpha: Complex64,
    pub beta: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub factors: Vec<FactorSpec>,
    pub smooth: Vec<(i64, Complex64)>,
    pub n: Option<usize>,
    pub grid: Vec<f64>,
    pub tol: f64,
    pub level: u32,
    pub seed: u64,
    pub format: OutputFormat,
    pub experimental: bool,
    pub out: Option<std::path::PathBuf>,
}

pub const USAGE: &str = "\
fhnorm --command <coeffs|norm|knorm|bounds|predict|study|vanish|profile> [flags]

flags:
  --factor f,are,aim,bre,bim   singularity at angle f of a full turn (repeatable);
                               f as p/q or integer is exact, a decimal is an
                               uncertified real angle
  --smooth k,re,im             smooth-part coefficient b_k (repeatable; default b = 1)
  --n <int>                    matrix size (norm) or coefficient range (coeffs)
  --grid a,b,c                 strictly increasing grid: sizes n for study/vanish,
                               alphas for profile
  --tol <float>                norm-iteration tolerance; verdict tolerance for study
  --level <int>                dyadic discretization level for kernel norms (default 11)
  --seed <int>                 seed of the norm iteration start vector (default 1)
  --format <csv|json>          output format (default csv)
  --out <path>                 write output to a file instead of stdout
  --experimental               allow conjectural incommensurate-angle predictions

exit codes: 0 ok, 2 invalid config, 3 norm iteration did not converge,
4 experimental-only prediction requested without --experimental

environment: FHNORM_THREADS caps worker threads for grid studies
";

pub fn parse_args(args: &[String]) -> Result<RunConfig, String> {
    let mut command = None;
    let mut factors = Vec::new();
    let mut smooth = Vec::new();
    let mut n = None;
    let mut grid = Vec::new();
    let mut tol = 1e-8;
    let mut level = 11u32;
    let mut seed = 1u64;
    let mut format = OutputFormat::Csv;
    let mut experimental = false;
    let mut out = None;

    let mut it = args.iter();
    while let Some(flag) = it.next() {
        let mut value = |name: &str| -> Result<&String, String> {
            it.next().ok_or_else(|| format!("flag {name} needs a value"))
        };
        match flag.as_str() {
            "--command" => {
                let v = value("--command")?;
                command =
                    Some(Command::parse(v).ok_or_else(|| format!("unknown command '{v}'"))?);
            }
            "--factor" => factors.push(parse_factor(value("--factor")?)?),
            "--smooth" => smooth.push(parse_smooth(value("--smooth")?)?),
            "--n" => {
                n = Some(
                    value("--n")?
                        .parse::<usize>()
                        .map_err(|_| "--n needs a positive integer".to_string())?,
                )
            }
            "--grid" => {
                grid = value("--grid")?
                    .split(',')
                    .map(|s| s.trim().parse::<f64>().map_err(|_| format!("bad grid entry '{s}'")))
                    .collect::<Result<_, _>>()?
            }
            "--tol" => {
                tol = value("--tol")?
                    .parse::<f64>()
                    .map_err(|_| "--tol needs a number".to_string())?
            }
            "--level" => {
                level = value("--level")?
                    .parse::<u32>()
                    .map_err(|_| "--level needs an integer".to_string())?
            }
            "--seed" => {
                seed = value("--seed")?
                    .parse::<u64>()
                    .map_err(|_| "--seed needs an integer".to_string())?
            }
            "--format" => {
                format = match value("--format")?.as_str() {
                    "csv" => OutputFormat::Csv,
                    "json" => OutputFormat::Json,
                    other => return Err(format!("unknown format '{other}'")),
                }
            }
            "--experimental" => experimental = true,
            "--out" => out = Some(std::path::PathBuf::from(value("--out")?)),
            other => return Err(format!("unknown flag '{other}'")),
        }
    }

    let command = command.ok_or_else(|| "missing --command".to_string())?;
    if !(tol > 0.0) {
        return Err("tolerance must be positive".into());
    }
    if let Some(n) = n {
        if n == 0 {
            return Err("--n must be at least 1".into());
        }
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err("grid must be strictly increasing".into());
    }
    Ok(RunConfig {
        command,
        factors,
        smooth,
        n,
        grid,
        tol,
        level,
        seed,
        format,
        experimental,
        out,
    })
}

/// "f,are,aim,bre,bim" with f = p/q | integer | decimal (of a full turn).
fn parse_factor(s: &str) -> Result<FactorSpec, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 5 {
        return Err(format!("--factor needs 5 comma-separated fields, got '{s}'"));
    }
    let angle = parse_angle(parts[0])?;
    let nums: Vec<f64> = parts[1..]
        .iter()
        .map(|p| p.parse::<f64>().map_err(|_| format!("bad number '{p}' in --factor")))
        .collect::<Result<_, _>>()?;
    Ok(FactorSpec {
        angle,
        alpha: Complex64::new(nums[0], nums[1]),
        beta: Complex64::new(nums[2], nums[3]),
    })
}

fn parse_angle(s: &str) -> Result<Angle, String> {
    if let Some((p, q)) = s.split_once('/') {
        let num = p.trim().parse::<i64>().map_err(|_| format!("bad angle numerator '{p}'"))?;
        let den = q.trim().parse::<i64>().map_err(|_| format!("bad angle denominator '{q}'"))?;
        return Angle::from_fraction(num, den).map_err(|e| e.to_string());
    }
    if let Ok(num) = s.parse::<i64>() {
        return Angle::from_fraction(num, 1).map_err(|e| e.to_string());
    }
    let turns = s.parse::<f64>().map_err(|_| format!("bad angle '{s}'"))?;
    Ok(Angle::Radians(2.0 * std::f64::consts::PI * turns))
}

fn parse_smooth(s: &str) -> Result<(i64, Complex64), String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("--smooth needs 3 comma-separated fields, got '{s}'"));
    }
    let k = parts[0].parse::<i64>().map_err(|_| format!("bad index '{}'", parts[0]))?;
    let re = parts[1].parse::<f64>().map_err(|_| format!("bad number '{}'", parts[1]))?;
    let im = parts[2].parse::<f64>().map_err(|_| format!("bad number '{}'", parts[2]))?;
    Ok((k, Complex64::new(re, im)))
}

#[derive(Debug, Clone, PartialEq)]
enum Cell {
    Int(i64),
    Num(f64),
    Bool(bool),
    Text(String),
}

/// 12 significant digits, the printed precision of every numeric field.
fn fmt_num(x: f64) -> String {
    format!("{x:.11e}")
}

fn round12(x: f64) -> f64 {
    fmt_num(x).parse().unwrap_or(x)
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => fmt_num(*x),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Int(i) => serde_json::Value::from(*i),
            Cell::Num(x) => serde_json::Number::from_f64(round12(*x))
                .map(serde_json::Value::Number)
                .unwrap_or(serde_json::Value::Null),
            Cell::Bool(b) => serde_json::Value::from(*b),
            Cell::Text(s) => serde_json::Value::from(s.as_str()),
        }
    }
}

struct OutputTable {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
    notes: Vec<(&'static str, Cell)>,
}

impl OutputTable {
    fn render(&self, command: Command, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => {
                let mut s = String::new();
                let _ = writeln!(s, "{}", self.columns.join(","));
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                    let _ = writeln!(s, "{}", cells.join(","));
                }
                for (k, v) in &self.notes {
                    let _ = writeln!(s, "# {k}={}", v.csv());
                }
                s
            }
            OutputFormat::Json => {
                let mut notes = serde_json::Map::new();
                for (k, v) in &self.notes {
                    notes.insert((*k).to_string(), v.json());
                }
                let value = serde_json::json!({
                    "command": command.name(),
                    "columns": self.columns,
                    "rows": self.rows.iter().map(|r| r.iter().map(Cell::json).collect::<Vec<_>>()).collect::<Vec<_>>(),
                    "notes": notes,
                });
                let mut s = serde_json::to_string_pretty(&value).expect("table serializes");
                s.push('\n');
                s
            }
        }
    }
}

struct Failure {
    code: i32,
    kind: &'static str,
    msg: String,
}

impl Failure {
    fn config(msg: impl Into<String>) -> Self {
        Failure {
            code: EXIT_CONFIG,
            kind: "invalid-config",
            msg: msg.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::CommensurabilityRequired => Failure {
                code: EXIT_EXPERIMENTAL,
                kind: "experimental-required",
                msg: e.to_string(),
            },
            other => Failure::config(other.to_string()),
        }
    }
}

fn build_symbol(cfg: &RunConfig) -> Result<FHSymbol, Failure> {
    let mut factors = Vec::with_capacity(cfg.factors.len());
    for spec in &cfg.factors {
        factors.push(FHFactor::new(spec.angle, spec.alpha, spec.beta)?);
    }
    let smooth = if cfg.smooth.is_empty() {
        SmoothPart::one()
    } else {
        SmoothPart::from_coeffs(cfg.smooth.iter().copied())
    };
    Ok(FHSymbol::new(factors, smooth)?)
}

fn norm_options(cfg: &RunConfig) -> NormOptions {
    NormOptions {
        tol: cfg.tol,
        max_iter: DEFAULT_MAX_ITER,
        seed: cfg.seed,
    }
}

fn int_grid(cfg: &RunConfig) -> Result<Vec<usize>, Failure> {
    if cfg.grid.is_empty() {
        return Err(Failure::config("this command needs --grid"));
    }
    cfg.grid
        .iter()
        .map(|&x| {
            if x >= 1.0 && x.fract() == 0.0 {
                Ok(x as usize)
            } else {
                Err(Failure::config(format!("grid entry {x} is not a positive integer")))
            }
        })
        .collect()
}

fn single_factor(cfg: &RunConfig) -> Result<FactorSpec, Failure> {
    match cfg.factors.as_slice() {
        [one] => Ok(*one),
        _ => Err(Failure::config("this command needs exactly one --factor")),
    }
}

fn experimental_gate(cfg: &RunConfig, symbol: &FHSymbol) -> Result<(), Failure> {
    if !cfg.experimental && symbol.factors().len() >= 2 && !symbol.angles_commensurate() {
        return Err(Error::CommensurabilityRequired.into());
    }
    Ok(())
}

/// Execute a parsed configuration, writing the table to `out` and one-line
/// diagnostics to `err`. Returns the process exit code.
pub fn run(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match dispatch(cfg) {
        Ok((table, code)) => {
            let rendered = table.render(cfg.command, cfg.format);
            if out.write_all(rendered.as_bytes()).is_err() {
                return EXIT_CONFIG;
            }
            if code == EXIT_NONCONVERGENCE {
                diagnostic(err, code, "non-convergence", "norm iteration did not converge");
            }
            code
        }
        Err(f) => {
            diagnostic(err, f.code, f.kind, &f.msg);
            f.code
        }
    }
}

fn diagnostic(err: &mut dyn Write, code: i32, kind: &str, msg: &str) {
    let _ = writeln!(err, "error code={code} kind={kind} msg=\"{msg}\"");
}

fn dispatch(cfg: &RunConfig) -> Result<(OutputTable, i32), Failure> {
    match cfg.command {
        Command::Coeffs => cmd_coeffs(cfg),
        Command::Norm => cmd_norm(cfg),
        Command::Knorm => cmd_knorm(cfg),
        Command::Bounds => cmd_bounds(cfg),
        Command::Predict => cmd_predict(cfg),
        Command::Study => cmd_study(cfg),
        Command::Vanish => cmd_vanish(cfg),
        Command::Profile => cmd_profile(cfg),
    }
}

fn cmd_coeffs(cfg: &RunConfig) -> Result<(OutputTable, i32), Failure> {
    let range = cfg.n.ok_or_else(|| Failure::config("coeffs needs --n (range |k| <= n)"))? as i64;
    let symbol = build_symbol(cfg)?;
    let trunc = symbol.default_trunc(range as usize + 1);
    let (window, tail) = symbol.window_with_trunc(range as usize + 1, trunc)?;
    let rows = (-range..=range)
        .map(|k| {
            let a = window[(k + range) as usize];
            vec![Cell::Int(k), Cell::Num(a.re), Cell::Num(a.im)]
        })
        .collect();
    Ok((
        OutputTable {
            columns: vec!["k", "re", "im"],
            rows,
            notes: vec![
                ("trunc", Cell::Int(trunc)),
                ("tail_estimate", Cell::Num(tail)),
            ],
        },
        EXIT_OK,
    ))
}

fn cmd_norm(cfg: &RunConfig) -> Result<(OutputTable, i32), Failure> {
    let n = cfg.n.ok_or_else(|| Failure::config("norm needs --n"))?;
    let symbol = build_symbol(cfg)?;
    let op = ToeplitzOperator::from_symbol(&symbol, n)?;
    let est = op.spectral_norm_with(&norm_options(cfg));
    let table = OutputTable {
        columns: vec!["n", "norm", "iterations", "converged"],
        rows: vec![vec![
            Cell::Int(n as i64),
            Cell::Num(est.value),
            Cell::Int(est.iterations as i64),
            Cell::Bool(est.converged),
        ]],
        notes: vec![("triangle_bound", Cell::Num(op.window().triangle_bound()))],
    };
    let code = if est.converged { EXIT_OK } else { EXIT_NONCONVERGENCE };
    Ok((table, code))
}

fn cmd_knorm(cfg: &RunConfig) -> Result<(OutputTable, i32), Failure> {
    let spec = single_factor(cfg)?;
    let kernel = fh_kernel(spec.alpha, spec.beta)?;
    let res = kernel_norm_with(&kernel, cfg.level, &norm_options(cfg))?;
    let table = OutputTable {
        columns: vec!["level", "estimate", "error_indicator", "richardson", "converged"],
        rows: vec![vec![
            Cell::Int(cfg.level as i64),
            Cell::Num(res.estimate),
            Cell::Num(res.error_indicator),
            Cell::Num(res.richardson),
            Cell::Bool(res.converged),
        ]],
        notes: vec![
            ("gamma_re", Cell::Num(kernel.gamma().re)),
            ("cplus_mod", Cell::Num(kernel.cplus().norm())),
            ("cminus_mod", Cell::Num(kernel.cminus().norm())),
        ],
    };
    let code = if res.converged { EXIT_OK } else { EXIT_NONCONVERGENCE };
    Ok((table, code))
}

fn cmd_bounds(cfg: &RunConfig) -> Result<(OutputTable, i32), Failure> {
    let spec = single_factor(cfg)?;
    if spec.alpha.im != 0.0 {
        return Err(Failure::config("bounds needs a real alpha"));
    }
    let (lower, upper) = k_alpha_bounds(spec.alpha.re)?;
    Ok((
        OutputTable {
            columns: vec!["alpha", "lower", "upper"],
            rows: vec![vec![
                Cell::Num(spec.alpha.re),
                Cell::Num(lower),
                Cell::Num(upper),
            ]],
            notes: vec![],
        },
        EXIT_OK,
    ))
}

fn cmd_predict(cfg: &RunConfig) -> Result<(OutputTable, i32), Failure> {
    let symbol = build_symbol(cfg)?;
    if symbol.factors().is_empty() {
        return Err(Failure::config("predict needs at least one --factor"));
    }
    let prediction = predict_multi_at(
        &symbol,
        !cfg.experimental,
        cfg.level,
        &norm_options(cfg),
    )?;
    let rows = prediction
        .per_singularity
        .iter()
        .map(|s| {
            vec![
                Cell::Int(s.index as i64),
                Cell::Num(s.re_alpha),
                Cell::Num(s.kernel_norm),
                Cell::Num(s.b_modulus),
                Cell::Bool(s.dominant),
            ]
        })
        .collect();
    Ok((
        OutputTable {
            columns: vec!["index", "re_alpha", "kernel_norm", "b_modulus", "dominant"],
            rows,
            notes: vec![
                ("constant", Cell::Num(prediction.constant)),
                ("exponent", Cell::Num(prediction.exponent)),
                (
                    "status",
                    Cell::Text(if prediction.proven { "proven" } else { "conjectural" }.into()),
                ),
            ],
        },
        EXIT_OK,
    ))
}

fn cmd_study(cfg: &RunConfig) -> Result<(OutputTable, i32), Failure> {
    let symbol = build_symbol(cfg)?;
    if symbol.factors().is_empty() {
        return Err(Failure::config("study needs at least one --factor"));
    }
    experimental_gate(cfg, &symbol)?;
    let grid = int_grid(cfg)?;
    let opts = StudyOptions {
        norm: NormOptions {
            seed: cfg.seed,
            ..NormOptions::default()
        },
        level: cfg.level,
    };
    let study = convergence_study(&symbol, &grid, cfg.tol, &opts)?;
    let rows = study
        .rows
        .iter()
        .map(|r| {
            vec![
                Cell::Int(r.n as i64),
                Cell::Num(r.computed_norm),
                Cell::Num(r.predicted),
                Cell::Num(r.ratio),
                Cell::Bool(r.converged),
            ]
        })
        .collect();
    let all_converged = study.rows.iter().all(|r| r.converged);
    let table = OutputTable {
        columns: vec!["n", "computed_norm", "predicted", "ratio", "converged"],
        rows,
        notes: vec![
            ("constant", Cell::Num(study.prediction.constant)),
            ("exponent", Cell::Num(study.prediction.exponent)),
            (
                "status",
                Cell::Text(if study.prediction.proven { "proven" } else { "conjectural" }.into()),
            ),
            ("verdict", Cell::Text(study.verdict.to_string())),
        ],
    };
    let code = if all_converged { EXIT_OK } else { EXIT_NONCONVERGENCE };
    Ok((table, code))
}

fn cmd_vanish(cfg: &RunConfig) -> Result<(OutputTable, i32), Failure> {
    let spec = single_factor(cfg)?;
    if spec.angle.radians() != 0.0 {
        return Err(Failure::config("vanish studies the singularity at t0 = 1 (angle 0)"));
    }
    if cfg.smooth.is_empty() {
        return Err(Failure::config("vanish needs the vanishing factor via --smooth"));
    }
    let c = SmoothPart::from_coeffs(cfg.smooth.iter().copied());
    let grid = int_grid(cfg)?;
    let opts = StudyOptions {
        norm: NormOptions {
            seed: cfg.seed,
            ..NormOptions::default()
        },
        level: cfg.level,
    };
    let study = vanishing_factor_study(spec.alpha, spec.beta, &c, &grid, &opts)?;
    let rows = study
        .rows
        .iter()
        .map(|r| {
            vec![
                Cell::Int(r.n as i64),
                Cell::Num(r.computed_norm),
                Cell::Num(r.ratio),
                Cell::Bool(r.converged),
            ]
        })
        .collect();
    let all_converged = study.rows.iter().all(|r| r.converged);
    let table = OutputTable {
        columns: vec!["n", "computed_norm", "normalized", "converged"],
        rows,
        notes: vec![
            ("exponent", Cell::Num(study.exponent)),
            ("verdict", Cell::Text(study.verdict.to_string())),
        ],
    };
    let code = if all_converged { EXIT_OK } else { EXIT_NONCONVERGENCE };
    Ok((table, code))
}

fn cmd_profile(cfg: &RunConfig) -> Result<(OutputTable, i32), Failure> {
    if cfg.grid.is_empty() {
        return Err(Failure::config("profile needs --grid with alphas in (0, 1/2)"));
    }
    let rows = constant_profile(&cfg.grid, cfg.level)?;
    let rows = rows
        .iter()
        .map(|r| {
            vec![
                Cell::Num(r.alpha),
                Cell::Num(r.kernel_norm),
                Cell::Num(r.full_constant),
                Cell::Num(r.small_alpha_ref),
                Cell::Num(r.large_alpha_ref),
            ]
        })
        .collect();
    Ok((
        OutputTable {
            columns: vec![
                "alpha",
                "kernel_norm",
                "full_constant",
                "small_alpha_ref",
                "large_alpha_ref",
            ],
            rows,
            notes: vec![],
        },
        EXIT_OK,
    ))
}

/// Entry point used by the binary: parse, open the sink, run.
pub fn main_with_args(args: &[String]) -> i32 {
    let mut stderr = std::io::stderr();
    if args.is_empty() || args.iter().any(|a| a == "--help" || a == "-h") {
        print!("{USAGE}");
        return EXIT_OK;
    }
    let cfg = match parse_args(args) {
        Ok(cfg) => cfg,
        Err(msg) => {
            diagnostic(&mut stderr, EXIT_CONFIG, "invalid-config", &msg);
            return EXIT_CONFIG;
        }
    };
    match cfg.out.clone() {
        Some(path) => match std::fs::File::create(&path) {
            Ok(mut f) => run(&cfg, &mut f, &mut stderr),
            Err(e) => {
                diagnostic(
                    &mut stderr,
                    EXIT_CONFIG,
                    "invalid-config",
                    &format!("cannot open {}: {e}", path.display()),
                );
                EXIT_CONFIG
            }
        },
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            run(&cfg, &mut lock, &mut stderr)
        }
    }
}
