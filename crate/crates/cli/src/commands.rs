use std::f64::consts::PI;
use std::thread;

use periodscope_core::criteria::{
    classify_monotonicity_with, isochrony_report, Verdict, DEFAULT_SAMPLES, DEFAULT_TOL_ISO,
};
use periodscope_core::period::{
    max_pairwise_rel_diff, period_derivative, period_ode_return, period_theta_quadrature,
    period_x_quadrature, PeriodMethod,
};
use periodscope_core::repro::{km_default_grid, km_polynomial_check, sect3_family_with, KMFamily};
use periodscope_core::{parse, Interval, LienardSystem, SystemConfig};
use serde_json::{json, Map, Value};

use crate::args::{
    Command, CriterionArgs, EnergyArgs, Numerics, Output, PeriodArgs, ReproKmArgs, ReproSect3Args,
    Sampling, SystemArgs, SystemInput,
};
use crate::error::CliError;
use crate::output::{num, Cell, Report, Table};

/// Rounding allowance for pointwise quantities, in units of their scale.
const ROUNDING: f64 = 64.0 * f64::EPSILON;

/// Relative spread under which a period sweep counts as flat.
const FLAT: f64 = 1e-7;

const KM_SWEEP: [f64; 5] = [0.02, 0.05, 0.1, 0.2, 0.3];

type Res<T> = Result<T, CliError>;

pub fn run(command: &Command) -> Res<(Report, &Output)> {
    match command {
        Command::System(a) => Ok((system(a)?, &a.output)),
        Command::Period(a) => Ok((period(a)?, &a.output)),
        Command::Monotonicity(a) => Ok((monotonicity(a)?, &a.output)),
        Command::Isochrony(a) => Ok((isochrony(a)?, &a.output)),
        Command::ReproKm(a) => Ok((repro_km(a)?, &a.output)),
        Command::ReproSect3(a) => Ok((repro_sect3(a)?, &a.output)),
    }
}

fn system_config(n: &Numerics) -> Res<SystemConfig> {
    let (lo, hi) = (n.domain[0], n.domain[1]);
    if !(lo.is_finite() && hi.is_finite() && lo < 0.0 && 0.0 < hi) {
        return Err(CliError::Config(format!("domain [{lo}, {hi}] must be finite and contain 0 in its interior")));
    }
    if !(n.tol_q > 0.0) {
        return Err(CliError::Config(format!("--tol-q must be positive, got {}", n.tol_q)));
    }
    Ok(SystemConfig {
        domain: Interval::new(lo, hi),
        tol_q: n.tol_q,
    })
}

fn build(input: &SystemInput) -> Res<LienardSystem> {
    let config = system_config(&input.numerics)?;
    Ok(LienardSystem::new(parse(&input.f)?, parse(&input.g)?, config)?)
}

fn check_sampling(s: &Sampling, min: usize) -> Res<()> {
    if s.samples < min {
        return Err(CliError::Config(format!("--samples must be at least {min}")));
    }
    if !(s.tol_iso > 0.0) {
        return Err(CliError::Config(format!("--tol-iso must be positive, got {}", s.tol_iso)));
    }
    Ok(())
}

/// Explicit list, linear sweep, or `default` when neither flag is given.
fn energies(args: &EnergyArgs, default: impl FnOnce() -> Vec<f64>) -> Res<Vec<f64>> {
    let list = match (&args.energies, &args.e_range) {
        (Some(list), _) => list.clone(),
        (None, Some(r)) => {
            let (min, max, n) = (r[0], r[1], r[2]);
            if !(n >= 1.0 && n.fract() == 0.0) {
                return Err(CliError::Config(format!("sweep count must be a positive integer, got {n}")));
            }
            if !(max >= min) {
                return Err(CliError::Config(format!("sweep bounds out of order: {min} > {max}")));
            }
            let n = n as usize;
            (0..n)
                .map(|k| if n == 1 { min } else { min + (max - min) * k as f64 / (n - 1) as f64 })
                .collect()
        }
        (None, None) => default(),
    };
    if list.is_empty() {
        return Err(CliError::Config("no energies given".into()));
    }
    if let Some(e) = list.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
        return Err(CliError::Config(format!("energies must be positive and finite, got {e}")));
    }
    Ok(list)
}

fn fractions(e_star: f64, ks: &[f64]) -> Vec<f64> {
    ks.iter().map(|k| k * e_star).collect()
}

/// Order-preserving map over scoped worker threads.
fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let workers = thread::available_parallelism().map_or(1, |n| n.get()).min(items.len()).max(1);
    let chunk = items.len().div_ceil(workers).max(1);
    let f = &f;
    thread::scope(|s| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|c| s.spawn(move || c.iter().map(f).collect::<Vec<R>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    })
}

/// Shape of a sampled function of energy.
fn trend(points: &[(f64, f64)]) -> &'static str {
    let mut p = points.to_vec();
    p.sort_by(|a, b| a.0.total_cmp(&b.0));
    let values: Vec<f64> = p.iter().map(|q| q.1).collect();
    if values.len() < 2 {
        return "single";
    }
    if max_pairwise_rel_diff(&values) <= FLAT {
        return "flat";
    }
    if values.windows(2).all(|w| w[1] > w[0]) {
        "increasing"
    } else if values.windows(2).all(|w| w[1] < w[0]) {
        "decreasing"
    } else {
        "non-monotone"
    }
}

fn common_verdict(v: &[Verdict]) -> &'static str {
    match v.first() {
        Some(first) if v.iter().all(|x| x == first) => first.name(),
        Some(_) => "mixed",
        None => "none",
    }
}

fn base_config(name: &str, numerics: &Numerics) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("subcommand".into(), json!(name));
    m.insert("domain".into(), json!([num(numerics.domain[0]), num(numerics.domain[1])]));
    m.insert("tol_q".into(), num(numerics.tol_q));
    m
}

fn input_config(name: &str, input: &SystemInput) -> Map<String, Value> {
    let mut m = base_config(name, &input.numerics);
    m.insert("f".into(), json!(input.f));
    m.insert("g".into(), json!(input.g));
    m
}

fn with_energies(mut m: Map<String, Value>, energies: &[f64]) -> Map<String, Value> {
    m.insert("energies".into(), Value::Array(energies.iter().map(|e| num(*e)).collect()));
    m
}

fn with_sampling(mut m: Map<String, Value>, s: &Sampling) -> Map<String, Value> {
    m.insert("tol_iso".into(), num(s.tol_iso));
    m.insert("samples".into(), json!(s.samples));
    m
}

fn system_diagnostics(sys: &LienardSystem) -> Map<String, Value> {
    let d = sys.domain();
    let (s_lo, s_hi) = sys.scan_limits();
    let mut m = Map::new();
    m.insert("f".into(), json!(sys.f().describe()));
    m.insert("g".into(), json!(sys.g().describe()));
    m.insert("domain".into(), json!([num(d.lo), num(d.hi)]));
    m.insert("v2_origin".into(), num(sys.curvature_at_origin()));
    m.insert("e_star".into(), num(sys.energy_ceiling()));
    m.insert("scan_limits".into(), json!([num(s_lo), num(s_hi)]));
    m.insert("conservative".into(), json!(sys.is_conservative()));
    m
}

fn system(a: &SystemArgs) -> Res<Report> {
    let sys = build(&a.system)?;
    let mut table = Table::new(&["x", "F", "mu", "V", "Phi", "method", "est_error", "status"]);
    let (lo, hi) = sys.scan_limits();
    let n = a.samples.max(2);
    let xs: Vec<f64> = (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect();
    let mut failed = 0;
    for (x, r) in xs.iter().zip(par_map(&xs, |x| sys.antiderivatives(*x))) {
        table.push(match r {
            Ok(ad) => vec![
                (*x).into(),
                ad.f_int.into(),
                ad.mass().into(),
                ad.v.into(),
                ad.phi.into(),
                "antiderivative-quadrature".into(),
                sys.tol_q().into(),
                "ok".into(),
            ],
            Err(e) => {
                failed += 1;
                let mut row = vec![Cell::Missing; 8];
                row[0] = (*x).into();
                row[5] = "antiderivative-quadrature".into();
                row[7] = e.to_string().into();
                row
            }
        });
    }
    let mut diagnostics = system_diagnostics(&sys);
    diagnostics.insert("failed_rows".into(), json!(failed));
    let mut config = input_config("system", &a.system);
    config.insert("samples".into(), json!(n));
    Ok(Report {
        config: Value::Object(config),
        table,
        diagnostics,
        failed_rows: failed,
        warnings: Vec::new(),
    })
}

struct PeriodRow {
    t: [Result<f64, String>; 3],
    errs: [f64; 3],
    derivative: Result<(f64, f64), String>,
}

fn period_row(sys: &LienardSystem, e: f64) -> PeriodRow {
    let methods = [period_x_quadrature, period_theta_quadrature, period_ode_return];
    let mut errs = [f64::NAN; 3];
    let t = core::array::from_fn(|i| {
        methods[i](sys, e).map_err(|err| err.to_string()).map(|s| {
            errs[i] = s.est_error;
            s.period
        })
    });
    let derivative = period_derivative(sys, e)
        .map_err(|err| err.to_string())
        .and_then(|s| s.derivative.map(|d| (d, s.est_error)).ok_or_else(|| "no derivative".to_string()));
    PeriodRow { t, errs, derivative }
}

fn period(a: &PeriodArgs) -> Res<Report> {
    let sys = build(&a.system)?;
    let e_star = sys.energy_ceiling();
    let energies = energies(&a.energies, || fractions(e_star, &[0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]))?;
    let mut table = Table::new(&[
        "E",
        "T_x",
        "T_theta",
        "T_ode",
        "dT_dE",
        "max_pairwise_rel_diff",
        "method",
        "est_error",
        "dT_dE_est_error",
        "status",
    ]);
    let method = PeriodMethod::PERIODS
        .iter()
        .map(|m| m.name())
        .chain([PeriodMethod::DerivativeQuadrature.name()])
        .collect::<Vec<_>>()
        .join("|");
    let mut failed = 0;
    let mut worst: f64 = 0.0;
    let mut theta = Vec::new();
    for (e, row) in energies.iter().zip(par_map(&energies, |e| period_row(&sys, *e))) {
        let ok: Vec<f64> = row.t.iter().filter_map(|r| r.as_ref().ok().copied()).collect();
        let mut problems: Vec<String> = row.t.iter().filter_map(|r| r.as_ref().err().cloned()).collect();
        if let Err(msg) = &row.derivative {
            problems.push(msg.clone());
        }
        let spread = (ok.len() == 3).then(|| max_pairwise_rel_diff(&ok));
        if let Some(s) = spread {
            worst = worst.max(s);
        }
        if let Ok(t) = &row.t[1] {
            theta.push((*e, *t));
        }
        let est = row.errs.iter().copied().filter(|v| !v.is_nan()).fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))));
        let status = if problems.is_empty() {
            "ok".to_string()
        } else {
            failed += 1;
            problems.dedup();
            problems.join("; ")
        };
        table.push(vec![
            (*e).into(),
            row.t[0].clone().ok().into(),
            row.t[1].clone().ok().into(),
            row.t[2].clone().ok().into(),
            row.derivative.as_ref().ok().map(|d| d.0).into(),
            spread.into(),
            method.as_str().into(),
            est.into(),
            row.derivative.as_ref().ok().map(|d| d.1).into(),
            status.into(),
        ]);
    }
    let mut diagnostics = system_diagnostics(&sys);
    diagnostics.insert("failed_rows".into(), json!(failed));
    diagnostics.insert("max_pairwise_rel_diff".into(), num(worst));
    diagnostics.insert("trend".into(), json!(trend(&theta)));
    Ok(Report {
        config: Value::Object(with_energies(input_config("period", &a.system), &energies)),
        table,
        diagnostics,
        failed_rows: failed,
        warnings: Vec::new(),
    })
}

fn monotonicity(a: &CriterionArgs) -> Res<Report> {
    check_sampling(&a.sampling, 16)?;
    let sys = build(&a.system)?;
    let e_star = sys.energy_ceiling();
    let energies = energies(&a.energies, || vec![0.5 * e_star])?;
    let mut table = Table::new(&["E", "x", "N", "verdict", "method", "est_error", "status"]);
    let reports = par_map(&energies, |e| classify_monotonicity_with(&sys, *e, a.sampling.samples, a.sampling.tol_iso));
    let (mut failed, mut verdicts, mut summary) = (0, Vec::new(), Vec::new());
    for (e, r) in energies.iter().zip(reports) {
        match r {
            Ok(rep) => {
                for (x, n) in &rep.samples {
                    table.push(vec![
                        (*e).into(),
                        (*x).into(),
                        (*n).into(),
                        rep.verdict.name().into(),
                        "n-criterion".into(),
                        (ROUNDING * rep.scale).into(),
                        "ok".into(),
                    ]);
                }
                verdicts.push(rep.verdict);
                summary.push(json!({
                    "energy": num(*e),
                    "verdict": rep.verdict.name(),
                    "window": [num(rep.window.x1), num(rep.window.x2)],
                    "min_n": num(rep.min_n),
                    "max_n": num(rep.max_n),
                    "argmin": num(rep.argmin),
                    "argmax": num(rep.argmax),
                    "scale": num(rep.scale),
                }));
            }
            Err(err) => {
                failed += 1;
                table.push(vec![
                    (*e).into(),
                    Cell::Missing,
                    Cell::Missing,
                    Cell::Missing,
                    "n-criterion".into(),
                    Cell::Missing,
                    err.to_string().into(),
                ]);
                summary.push(json!({ "energy": num(*e), "error": err.to_string() }));
            }
        }
    }
    let mut diagnostics = system_diagnostics(&sys);
    diagnostics.insert("failed_rows".into(), json!(failed));
    diagnostics.insert("verdict".into(), json!(common_verdict(&verdicts)));
    diagnostics.insert("energies".into(), Value::Array(summary));
    let config = with_sampling(with_energies(input_config("monotonicity", &a.system), &energies), &a.sampling);
    Ok(Report {
        config: Value::Object(config),
        table,
        diagnostics,
        failed_rows: failed,
        warnings: Vec::new(),
    })
}

fn lookup(samples: &[(f64, f64)], x: f64) -> Cell {
    samples.iter().find(|s| s.0 == x).map_or(Cell::Missing, |s| Cell::Num(s.1))
}

fn isochrony(a: &CriterionArgs) -> Res<Report> {
    check_sampling(&a.sampling, 2)?;
    let sys = build(&a.system)?;
    let e_star = sys.energy_ceiling();
    let energies = energies(&a.energies, || vec![0.5 * e_star])?;
    let mut table = Table::new(&["E", "x", "R", "W", "guard2", "C", "D", "verdict", "method", "est_error", "status"]);
    let reports = par_map(&energies, |e| isochrony_report(&sys, *e, a.sampling.samples, a.sampling.tol_iso));
    let (mut failed, mut all_iso, mut summary, mut warnings) = (0, true, Vec::new(), Vec::new());
    for (e, r) in energies.iter().zip(reports) {
        match r {
            Ok(rep) => {
                let verdict = if rep.verdict { "isochronous" } else { "not-isochronous" };
                for (x, res) in &rep.residual_samples {
                    let violated = rep.guard_violations.contains(x);
                    table.push(vec![
                        (*e).into(),
                        (*x).into(),
                        (*res).into(),
                        lookup(&rep.w_samples, *x),
                        lookup(&rep.guard2_samples, *x),
                        lookup(&rep.c_samples, *x),
                        lookup(&rep.d_samples, *x),
                        verdict.into(),
                        "isochrony-residual".into(),
                        (ROUNDING * rep.residual_scale).into(),
                        if violated { "guard violated" } else { "ok" }.into(),
                    ]);
                }
                if !rep.guard_violations.is_empty() {
                    warnings.push(format!("E = {e}: guard W vanishes near x = {:?}", rep.guard_violations));
                }
                all_iso &= rep.verdict;
                summary.push(json!({
                    "energy": num(*e),
                    "verdict": rep.verdict,
                    "window": [num(rep.window.x1), num(rep.window.x2)],
                    "max_abs_residual": num(rep.max_abs_residual),
                    "residual_scale": num(rep.residual_scale),
                    "residual_within_tolerance": rep.residual_within_tolerance(),
                    "min_abs_w": num(rep.min_abs_w),
                    "min_guard2_margin": num(rep.min_guard2_margin),
                    "c_spread": num(rep.c_spread),
                    "d_spread": num(rep.d_spread),
                    "guard_violations": rep.guard_violations.iter().map(|x| num(*x)).collect::<Vec<_>>(),
                }));
            }
            Err(err) => {
                failed += 1;
                all_iso = false;
                let mut row = vec![Cell::Missing; 11];
                row[0] = (*e).into();
                row[8] = "isochrony-residual".into();
                row[10] = err.to_string().into();
                table.push(row);
                summary.push(json!({ "energy": num(*e), "error": err.to_string() }));
            }
        }
    }
    let mut diagnostics = system_diagnostics(&sys);
    diagnostics.insert("failed_rows".into(), json!(failed));
    diagnostics.insert("verdict".into(), json!(all_iso));
    diagnostics.insert("energies".into(), Value::Array(summary));
    let config = with_sampling(with_energies(input_config("isochrony", &a.system), &energies), &a.sampling);
    Ok(Report {
        config: Value::Object(config),
        table,
        diagnostics,
        failed_rows: failed,
        warnings,
    })
}

struct KmRow {
    coefficients: [f64; 6],
    sign: Option<i8>,
    discrepancy: f64,
    prefactor: Option<f64>,
    verdict: &'static str,
    trend: &'static str,
    points: Vec<(f64, f64)>,
    est_error: f64,
}

// Energies at or above E* for this member are left out of the sweep.
fn km_row(a3: f64, config: SystemConfig, energies: &[f64], s: &Sampling) -> Result<KmRow, periodscope_core::Error> {
    let fam = KMFamily::new(a3);
    let check = km_polynomial_check(a3, &km_default_grid(a3))?;
    let sys = fam.system_with(config)?;
    let admissible: Vec<f64> = energies.iter().copied().filter(|e| *e < sys.energy_ceiling()).collect();
    if admissible.is_empty() {
        return Err(periodscope_core::Error::EnergyOutOfRange {
            energy: energies[0],
            ceiling: sys.energy_ceiling(),
        });
    }
    let mut verdicts = Vec::new();
    let mut points = Vec::new();
    let mut est_error: f64 = 0.0;
    for e in admissible {
        verdicts.push(classify_monotonicity_with(&sys, e, s.samples, s.tol_iso)?.verdict);
        let t = period_theta_quadrature(&sys, e)?;
        est_error = est_error.max(t.est_error);
        points.push((e, t.period));
    }
    Ok(KmRow {
        coefficients: fam.coefficients(),
        sign: check.polynomial_sign(),
        discrepancy: check.discrepancy,
        prefactor: check.prefactor,
        verdict: common_verdict(&verdicts),
        trend: trend(&points),
        points,
        est_error,
    })
}

fn repro_km(a: &ReproKmArgs) -> Res<Report> {
    check_sampling(&a.sampling, 16)?;
    let config = system_config(&a.numerics)?;
    if let Some(v) = a.a3.iter().find(|v| !v.is_finite()) {
        return Err(CliError::Config(format!("a3 must be finite, got {v}")));
    }
    let energies = energies(&a.energies, || KM_SWEEP.to_vec())?;
    let mut table = Table::new(&[
        "a3",
        "C0",
        "C1",
        "C2",
        "C3",
        "C4",
        "C5",
        "poly_sign",
        "poly_discrepancy",
        "prefactor",
        "n_verdict",
        "t_trend",
        "t_min",
        "t_max",
        "sweep_points",
        "method",
        "est_error",
        "status",
    ]);
    let method = "closed-form|n-criterion|theta-quadrature";
    let mut failed = 0;
    let mut series = Vec::new();
    for (a3, r) in a.a3.iter().zip(par_map(&a.a3, |a3| km_row(*a3, config, &energies, &a.sampling))) {
        match r {
            Ok(row) => {
                let mut cells: Vec<Cell> = vec![(*a3).into()];
                cells.extend(row.coefficients.iter().map(|c| Cell::Num(*c)));
                let min = row.points.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
                let max = row.points.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
                cells.extend([
                    row.sign.map_or(Cell::Missing, |v| Cell::Int(v.into())),
                    row.discrepancy.into(),
                    row.prefactor.into(),
                    row.verdict.into(),
                    row.trend.into(),
                    min.into(),
                    max.into(),
                    Cell::Int(row.points.len() as i64),
                    method.into(),
                    row.est_error.into(),
                    "ok".into(),
                ]);
                table.push(cells);
                series.push(json!({
                    "a3": num(*a3),
                    "energies": row.points.iter().map(|p| num(p.0)).collect::<Vec<_>>(),
                    "periods": row.points.iter().map(|p| num(p.1)).collect::<Vec<_>>(),
                }));
            }
            Err(err) => {
                failed += 1;
                let mut cells = vec![Cell::Missing; 18];
                cells[0] = (*a3).into();
                cells[15] = method.into();
                cells[17] = err.to_string().into();
                table.push(cells);
            }
        }
    }
    let mut diagnostics = Map::new();
    diagnostics.insert("friction".into(), json!(KMFamily::new(0.0).friction_text()));
    diagnostics.insert("failed_rows".into(), json!(failed));
    diagnostics.insert("period_series".into(), Value::Array(series));
    let mut cfg = with_sampling(with_energies(base_config("repro-km", &a.numerics), &energies), &a.sampling);
    cfg.insert("a3".into(), Value::Array(a.a3.iter().map(|v| num(*v)).collect()));
    Ok(Report {
        config: Value::Object(cfg),
        table,
        diagnostics,
        failed_rows: failed,
        warnings: Vec::new(),
    })
}

fn repro_sect3(a: &ReproSect3Args) -> Res<Report> {
    let config = system_config(&a.numerics)?;
    let sys = sect3_family_with(parse(&a.w)?, config)?;
    let e_star = sys.energy_ceiling();
    let energies = energies(&a.energies, || fractions(e_star, &[0.1, 0.4, 0.7]))?;
    let mut table = Table::new(&["E", "T_theta", "T_ode", "rel_err_2pi", "method", "est_error", "status"]);
    let rows = par_map(&energies, |e| -> Result<_, periodscope_core::Error> {
        Ok((period_theta_quadrature(&sys, *e)?, period_ode_return(&sys, *e)?))
    });
    let (mut failed, mut worst, mut all) = (0, 0.0f64, Vec::new());
    for (e, r) in energies.iter().zip(rows) {
        match r {
            Ok((t, o)) => {
                let rel = (t.period - 2.0 * PI).abs().max((o.period - 2.0 * PI).abs()) / (2.0 * PI);
                worst = worst.max(rel);
                all.extend([t.period, o.period]);
                table.push(vec![
                    (*e).into(),
                    t.period.into(),
                    o.period.into(),
                    rel.into(),
                    "theta-quadrature|ode-return".into(),
                    t.est_error.max(o.est_error).into(),
                    "ok".into(),
                ]);
            }
            Err(err) => {
                failed += 1;
                table.push(vec![
                    (*e).into(),
                    Cell::Missing,
                    Cell::Missing,
                    Cell::Missing,
                    "theta-quadrature|ode-return".into(),
                    Cell::Missing,
                    err.to_string().into(),
                ]);
            }
        }
    }
    let mut diagnostics = system_diagnostics(&sys);
    diagnostics.insert("failed_rows".into(), json!(failed));
    diagnostics.insert("max_rel_err_2pi".into(), num(worst));
    diagnostics.insert("max_pairwise_rel_diff".into(), num(max_pairwise_rel_diff(&all)));
    let mid = energies[energies.len() / 2];
    diagnostics.insert(
        "n_verdict".into(),
        match classify_monotonicity_with(&sys, mid, DEFAULT_SAMPLES, DEFAULT_TOL_ISO) {
            Ok(r) => json!(r.verdict.name()),
            Err(e) => json!(e.to_string()),
        },
    );
    let mut cfg = with_energies(base_config("repro-sect3", &a.numerics), &energies);
    cfg.insert("w".into(), json!(a.w));
    Ok(Report {
        config: Value::Object(cfg),
        table,
        diagnostics,
        failed_rows: failed,
        warnings: Vec::new(),
    })
}
