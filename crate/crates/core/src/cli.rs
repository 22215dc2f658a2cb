//! Command-line front end. The `btl` binary is a thin wrapper around [`main_with_args`].

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::integrals::{
    i_alpha_flux_corrected, i_alpha_quadrature, odd_even_check, v2_combination,
    verify_elementary_table, z_identities, IntegralReport,
};
use crate::linearized::{barrier_report, build_matrix_closed_form, det_and_recursion_check};
use crate::params::{check_structural_properties, check_unperturbed, solve, solve_unperturbed};
use crate::profiles::{correction_profiles_on, z0_log, GridSpec, V_alpha_log};
use crate::tower::{potential_bound_check, residual_scan, weighted_norm, NormGrid, TowerApprox};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const SLOPE_RANGE: (f64, f64) = (-4.8, -3.2);

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Params,
    Profiles,
    Integrals,
    Residual,
    Matrix,
    Barriers,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Solve the parameter system and check its structure
    Params,
    /// Build the correction profiles w0, w1
    Profiles,
    /// Closed-form integrals against quadrature
    Integrals,
    /// Weighted residual of the tower and its decay in p
    Residual,
    /// Relation matrix and its determinant
    Matrix,
    /// Barrier inequalities on the necks
    Barriers,
    /// Everything above
    All,
}

#[derive(Debug, Parser)]
#[command(
    name = "btl",
    version,
    about = "Sign-changing bubble towers for the Lane-Emden problem on the unit disk"
)]
struct Cli {
    #[command(subcommand)]
    sub: Sub,
    /// Number of bubbles
    #[arg(long, global = true)]
    k: Option<usize>,
    /// Exponent p
    #[arg(long, global = true)]
    p: Option<f64>,
    /// Comma-separated exponents for the residual scan
    #[arg(long = "p-list", global = true, value_delimiter = ',')]
    p_list: Option<Vec<f64>>,
    /// Comma-separated alpha values for profiles and integrals
    #[arg(long, global = true, value_delimiter = ',')]
    alpha: Option<Vec<f64>>,
    /// Weight exponent eta in (0,1)
    #[arg(long, global = true)]
    eta: Option<f64>,
    /// Relative tolerance for I_alpha against its closed form
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Points per annulus for the residual norm and profile grid size scale
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Output file (stdout when absent)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// key=value configuration file; flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub k: usize,
    pub p: f64,
    pub p_list: Vec<f64>,
    pub alpha: Vec<f64>,
    pub eta: f64,
    pub tol: f64,
    pub grid: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn defaults(command: Command) -> Self {
        RunConfig {
            command,
            k: 2,
            p: 100.0,
            p_list: vec![40.0, 80.0, 160.0, 320.0],
            alpha: Vec::new(),
            eta: 0.5,
            tol: 1e-6,
            grid: 512,
            out: None,
            format: Format::Json,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Usage("--k must be at least 1".into()));
        }
        if !(self.p > 1.0) {
            return Err(Error::Usage(format!("--p must exceed 1, got {}", self.p)));
        }
        if self.p_list.len() < 2 || self.p_list.iter().any(|p| !(*p > 1.0)) {
            return Err(Error::Usage(
                "--p-list needs at least two values, all above 1".into(),
            ));
        }
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return Err(Error::Usage(format!(
                "--eta must lie in (0,1), got {}",
                self.eta
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Usage("--tol must be positive".into()));
        }
        if self.grid < 16 {
            return Err(Error::Usage("--grid must be at least 16".into()));
        }
        if self.alpha.iter().any(|a| !(*a >= 2.0)) {
            return Err(Error::Usage("--alpha values must be at least 2".into()));
        }
        if self.command == Command::All && self.format == Format::Csv {
            return Err(Error::Usage("the all command writes JSON only".into()));
        }
        Ok(())
    }

    /// Alphas for profile and integral commands: the given list, or the first
    /// three exponents of the limiting recursion.
    pub fn alphas(&self) -> Result<Vec<f64>> {
        if !self.alpha.is_empty() {
            return Ok(self.alpha.clone());
        }
        Ok(solve_unperturbed(3)?.alpha)
    }
}

/// Parse `key = value` lines; `#` starts a comment.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::Usage(format!(
                "config line {}: expected key=value, got {raw:?}",
                n + 1
            ))
        })?;
        out.insert(k.trim().replace('_', "-"), v.trim().to_string());
    }
    Ok(out)
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Usage(format!("config key {key}: cannot parse {v:?}")))
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',').map(|s| parse_num(key, s.trim())).collect()
}

fn apply_config(cfg: &mut RunConfig, map: &BTreeMap<String, String>) -> Result<()> {
    for (key, v) in map {
        match key.as_str() {
            "k" => cfg.k = parse_num(key, v)?,
            "p" => cfg.p = parse_num(key, v)?,
            "p-list" => cfg.p_list = parse_list(key, v)?,
            "alpha" => cfg.alpha = parse_list(key, v)?,
            "eta" => cfg.eta = parse_num(key, v)?,
            "tol" => cfg.tol = parse_num(key, v)?,
            "grid" => cfg.grid = parse_num(key, v)?,
            "out" => cfg.out = Some(PathBuf::from(v)),
            "format" => {
                cfg.format = match v.as_str() {
                    "json" => Format::Json,
                    "csv" => Format::Csv,
                    _ => {
                        return Err(Error::Usage(format!(
                            "config key format: expected json or csv, got {v:?}"
                        )))
                    }
                }
            }
            _ => return Err(Error::Usage(format!("unknown config key {key:?}"))),
        }
    }
    Ok(())
}

fn resolve(cli: Cli) -> Result<RunConfig> {
    let command = match cli.sub {
        Sub::Params => Command::Params,
        Sub::Profiles => Command::Profiles,
        Sub::Integrals => Command::Integrals,
        Sub::Residual => Command::Residual,
        Sub::Matrix => Command::Matrix,
        Sub::Barriers => Command::Barriers,
        Sub::All => Command::All,
    };
    let mut cfg = RunConfig::defaults(command);
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        apply_config(&mut cfg, &parse_config_file(&text)?)?;
    }
    if let Some(v) = cli.k {
        cfg.k = v;
    }
    if let Some(v) = cli.p {
        cfg.p = v;
    }
    if let Some(v) = cli.p_list {
        cfg.p_list = v;
    }
    if let Some(v) = cli.alpha {
        cfg.alpha = v;
    }
    if let Some(v) = cli.eta {
        cfg.eta = v;
    }
    if let Some(v) = cli.tol {
        cfg.tol = v;
    }
    if let Some(v) = cli.grid {
        cfg.grid = v;
    }
    if let Some(v) = cli.out {
        cfg.out = Some(v);
    }
    if let Some(v) = cli.format {
        cfg.format = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// What a command produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub pass: bool,
    pub json: Value,
    pub csv: Option<String>,
}

fn csv_row(out: &mut String, cells: &[String]) {
    out.push_str(&cells.join(","));
    out.push('\n');
}

fn f(v: f64) -> String {
    format!("{v}")
}

fn norm_grid(cfg: &RunConfig) -> NormGrid {
    NormGrid {
        points_per_annulus: cfg.grid,
        ..NormGrid::default()
    }
}

pub fn run_params(cfg: &RunConfig) -> Result<Outcome> {
    let ps = solve(cfg.k, cfg.p, 0.0)?;
    let rep = check_structural_properties(&ps);
    let u = solve_unperturbed(cfg.k)?;
    let uchecks = check_unperturbed(&u);
    let pass = rep.all_pass() && uchecks.iter().all(|c| c.pass);
    let mut csv = String::new();
    csv_row(
        &mut csv,
        &[
            "j",
            "alpha_j",
            "s_j",
            "eps_j",
            "b_j",
            "ln_delta_j",
            "tau_j",
            "ln_C_j",
        ]
        .map(String::from),
    );
    for j in 0..ps.k {
        let opt = |v: Option<&f64>| v.map(|x| f(*x)).unwrap_or_default();
        csv_row(
            &mut csv,
            &[
                (j + 1).to_string(),
                f(ps.alpha[j]),
                opt(ps.s.get(j)),
                opt(ps.eps.get(j)),
                f(ps.b[j]),
                f(ps.ln_delta[j]),
                f(ps.tau[j]),
                f(ps.ln_c[j]),
            ],
        );
    }
    let json = json!({
        "command": "params",
        "params": ps,
        "structural": rep,
        "unperturbed": { "alpha": u.alpha, "s": u.s, "checks": uchecks },
        "pass": pass,
    });
    Ok(Outcome {
        pass,
        json,
        csv: Some(csv),
    })
}

pub fn run_profiles(cfg: &RunConfig) -> Result<Outcome> {
    let grid = GridSpec {
        points: 8 * cfg.grid,
        ..GridSpec::default()
    };
    let mut entries = Vec::new();
    let mut pass = true;
    let mut csv = String::new();
    for (n, a) in cfg.alphas()?.into_iter().enumerate() {
        let cp = correction_profiles_on(a, &grid)?;
        let s0 = cp.w0.fitted_log_slope();
        let s1 = cp.w1.fitted_log_slope();
        let e0 = (s0 - cp.c0).abs() / cp.c0.abs();
        let e1 = (s1 - cp.c1).abs() / cp.c1.abs();
        let ok =
            e0 <= 1e-3 && e1 <= 1e-3 && cp.w0.ode_residual <= 1e-8 && cp.w1.ode_residual <= 1e-8;
        pass &= ok;
        entries.push(json!({
            "alpha": a,
            "C0": cp.c0,
            "C1": cp.c1,
            "w0_at_0": cp.w0_at_0,
            "w1_at_0": cp.w1_at_0,
            "w0_fitted_slope": s0,
            "w1_fitted_slope": s1,
            "w0_slope_rel_err": e0,
            "w1_slope_rel_err": e1,
            "w0_ode_residual": cp.w0.ode_residual,
            "w1_ode_residual": cp.w1.ode_residual,
            "pass": ok,
        }));
        if n == 0 {
            csv_row(&mut csv, &["r", "w0", "w1", "V", "z"].map(String::from));
            for (i, t) in cp.w0.ln_r.iter().enumerate() {
                csv_row(
                    &mut csv,
                    &[
                        f(t.exp()),
                        f(cp.w0.values[i]),
                        f(cp.w1.values[i]),
                        f(V_alpha_log(a, *t)),
                        f(z0_log(a, *t)),
                    ],
                );
            }
        }
    }
    let json = json!({ "command": "profiles", "grid": grid, "profiles": entries, "pass": pass });
    Ok(Outcome {
        pass,
        json,
        csv: Some(csv),
    })
}

pub fn run_integrals(cfg: &RunConfig) -> Result<Outcome> {
    let mut reports: Vec<(Option<f64>, IntegralReport, bool)> = Vec::new();
    let grid = GridSpec {
        points: 8 * cfg.grid,
        ..GridSpec::default()
    };
    for a in cfg.alphas()? {
        let cp = correction_profiles_on(a, &grid)?;
        let q = i_alpha_quadrature(a, &cp.w0)?;
        let ok = q.within_rel(cfg.tol);
        reports.push((Some(a), q, ok));
        let fc = i_alpha_flux_corrected(a, &cp.w0)?;
        let ok = fc.within_rel(cfg.tol);
        reports.push((Some(a), fc, ok));
        for z in z_identities(a)? {
            let ok = z.within_abs(1e-8);
            reports.push((Some(a), z, ok));
        }
        let v2 = v2_combination(a)?;
        let ok = v2.within_abs(1e-10);
        reports.push((Some(a), v2, ok));
    }
    for r in verify_elementary_table()? {
        let ok = r.within_abs(1e-10);
        reports.push((None, r, ok));
    }
    for r in odd_even_check()? {
        let ok = r.within_abs(1e-12);
        reports.push((None, r, ok));
    }
    let pass = reports.iter().all(|r| r.2);
    let mut csv = String::new();
    csv_row(
        &mut csv,
        &[
            "name",
            "alpha",
            "quadrature",
            "closed_form",
            "abs_err",
            "rel_err",
            "pass",
        ]
        .map(String::from),
    );
    for (a, r, ok) in &reports {
        csv_row(
            &mut csv,
            &[
                format!("\"{}\"", r.name),
                a.map(f).unwrap_or_default(),
                f(r.quadrature_value),
                f(r.closed_form),
                f(r.abs_err),
                f(r.rel_err),
                ok.to_string(),
            ],
        );
    }
    let items: Vec<Value> = reports
        .iter()
        .map(|(a, r, ok)| json!({ "alpha": a, "report": r, "pass": ok }))
        .collect();
    let json = json!({ "command": "integrals", "reports": items, "pass": pass });
    Ok(Outcome {
        pass,
        json,
        csv: Some(csv),
    })
}

pub fn run_residual(cfg: &RunConfig) -> Result<Outcome> {
    let grid = norm_grid(cfg);
    let scan = residual_scan(cfg.k, &cfg.p_list, cfg.eta, 0.0, &grid)?;
    let pass = scan.slope >= SLOPE_RANGE.0 && scan.slope <= SLOPE_RANGE.1;
    let mut csv = String::new();
    csv_row(
        &mut csv,
        &["p", "j", "ln_r", "U_p", "rhoR_p"].map(String::from),
    );
    if cfg.format == Format::Csv {
        for &p in &cfg.p_list {
            let ta = TowerApprox::new(solve(cfg.k, p, 0.0)?, cfg.eta)?;
            for j in 0..ta.k() {
                for u in ta.annulus_samples(j, &grid) {
                    let ln_r = u + ta.params.ln_delta[j];
                    csv_row(
                        &mut csv,
                        &[
                            f(p),
                            (j + 1).to_string(),
                            f(ln_r),
                            f(ta.eval_tower(j, u)?),
                            f(ta.residual_at(j, u)?),
                        ],
                    );
                }
            }
        }
    }
    let json = json!({
        "command": "residual",
        "k": scan.k,
        "eta": scan.eta,
        "p_values": scan.p_values,
        "norms": scan.norms,
        "slope": scan.slope,
        "slope_range": [SLOPE_RANGE.0, SLOPE_RANGE.1],
        "reports": scan.reports,
        "pass": pass,
    });
    Ok(Outcome {
        pass,
        json,
        csv: Some(csv),
    })
}

pub fn run_matrix(cfg: &RunConfig) -> Result<Outcome> {
    let ps = solve(cfg.k, cfg.p, 0.0)?;
    let tm = build_matrix_closed_form(&ps)?;
    let rep = det_and_recursion_check(&tm)?;
    let pass = rep.pass();
    let mut csv = String::new();
    let n = 2 * cfg.k;
    let header: Vec<String> = (0..n)
        .map(|c| {
            if c % 2 == 0 {
                format!("sigma_{}", c / 2 + 1)
            } else {
                format!("gamma_{}", c / 2 + 1)
            }
        })
        .collect();
    csv_row(&mut csv, &header);
    for row in &tm.entries {
        csv_row(&mut csv, &row.iter().map(|v| f(*v)).collect::<Vec<_>>());
    }
    let json = json!({ "command": "matrix", "k": cfg.k, "p": cfg.p, "matrix": tm, "determinant": rep, "pass": pass });
    Ok(Outcome {
        pass,
        json,
        csv: Some(csv),
    })
}

pub fn run_barriers(cfg: &RunConfig) -> Result<Outcome> {
    let ps = solve(cfg.k, cfg.p, 0.0)?;
    let ta = TowerApprox::new(ps.clone(), cfg.eta)?;
    let pot = potential_bound_check(&ta, &norm_grid(cfg));
    let rep = barrier_report(&ps, pot.max_c_bar(), 0.5, cfg.eta, 1000)?;
    let pass = rep.all_pass;
    let mut csv = String::new();
    csv_row(
        &mut csv,
        &[
            "name",
            "j",
            "pass",
            "min_margin",
            "margin_at_threshold",
            "min_at_threshold",
        ]
        .map(String::from),
    );
    for c in &rep.checks {
        csv_row(
            &mut csv,
            &[
                format!("\"{}\"", c.name),
                c.j.to_string(),
                c.pass.to_string(),
                f(c.min_margin),
                f(c.margin_at_threshold),
                c.min_at_threshold.to_string(),
            ],
        );
    }
    let json = json!({ "command": "barriers", "k": cfg.k, "p": cfg.p, "potential": pot, "barriers": rep, "pass": pass });
    Ok(Outcome {
        pass,
        json,
        csv: Some(csv),
    })
}

pub fn run_all(cfg: &RunConfig) -> Result<Outcome> {
    let mut sections = serde_json::Map::new();
    let mut pass = true;
    let runners: [(&str, fn(&RunConfig) -> Result<Outcome>); 6] = [
        ("params", run_params),
        ("profiles", run_profiles),
        ("integrals", run_integrals),
        ("residual", run_residual),
        ("matrix", run_matrix),
        ("barriers", run_barriers),
    ];
    for (name, run) in runners {
        let o = run(cfg)?;
        pass &= o.pass;
        sections.insert(name.to_string(), o.json);
    }
    // One extra figure the residual scan does not carry: the norm at --p.
    let ta = TowerApprox::new(solve(cfg.k, cfg.p, 0.0)?, cfg.eta)?;
    let norm = weighted_norm(&ta, &norm_grid(cfg))?;
    sections.insert("norm_at_p".into(), json!(norm));
    sections.insert("pass".into(), json!(pass));
    Ok(Outcome {
        pass,
        json: Value::Object(sections),
        csv: None,
    })
}

pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    match cfg.command {
        Command::Params => run_params(cfg),
        Command::Profiles => run_profiles(cfg),
        Command::Integrals => run_integrals(cfg),
        Command::Residual => run_residual(cfg),
        Command::Matrix => run_matrix(cfg),
        Command::Barriers => run_barriers(cfg),
        Command::All => run_all(cfg),
    }
}

/// Render the outcome in the configured format.
pub fn render(cfg: &RunConfig, o: &Outcome) -> Result<String> {
    match cfg.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&o.json)
                .map_err(|e| Error::Invariant(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => o
            .csv
            .clone()
            .ok_or_else(|| Error::Usage(format!("no CSV form for {:?}", cfg.command))),
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("BTL_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| {
            Error::Usage(format!("BTL_THREADS must be a positive integer, got {v:?}"))
        })?;
        if n == 0 {
            return Err(Error::Usage("BTL_THREADS must be at least 1".into()));
        }
        // A pool built earlier in the same process keeps its size.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    Ok(())
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Usage(_) | Error::Io { .. } => EXIT_USAGE,
        _ => EXIT_CHECK_FAILED,
    }
}

/// Entry point shared by the binary and the tests. Returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = configure_threads()
        .and_then(|_| resolve(cli))
        .and_then(|cfg| {
            let o = run(&cfg)?;
            let text = render(&cfg, &o)?;
            match &cfg.out {
                Some(path) => std::fs::write(path, text).map_err(|source| Error::Io {
                    path: path.display().to_string(),
                    source,
                })?,
                None => {
                    use std::io::Write;
                    let mut stdout = std::io::stdout().lock();
                    match stdout
                        .write_all(text.as_bytes())
                        .and_then(|_| stdout.flush())
                    {
                        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                            return Err(Error::Io {
                                path: "<stdout>".into(),
                                source: e,
                            });
                        }
                        _ => {}
                    }
                }
            }
            Ok(o.pass)
        });
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => {
            eprintln!("btl: one or more checks failed");
            EXIT_CHECK_FAILED
        }
        Err(e) => {
            eprintln!("btl: {e}");
            exit_code_for(&e)
        }
    }
}
