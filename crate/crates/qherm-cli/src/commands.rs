//! The five commands behind the binary. Each returns either an [`Outcome`]
//! (a result document plus exit code, since some documents report a failed
//! check) or a [`Failure`] (no document; message for stderr).
//!
//! Exit codes are part of the public contract:
//! 0 ok, 1 parse/usage, 2 not quasi-Hermitian (or not symmetrizable),
//! 3 cross-method disagreement, 4 solver non-convergence, 5 sweep bracket
//! not found.

use qherm_core::analytic::{
    gain_loss_chain, gain_loss_critical, gain_loss_spectrum, two_site_spectrum,
    uniform_chain_solution, GainLossParams, UniformChainParams,
};
use qherm_core::eigen::{
    general_eigenvalues, spectrum_deviation, symmetric_eigenvalues, Spectrum,
};
use qherm_core::metric::{
    self, compute_metric, quasi_herm_check, symmetrize, verify_intertwining, MetricDiagonal,
    QuasiHermReport,
};
use qherm_core::{ChainSpec, Complex64, Error, TridiagMatrix};
use serde_json::{json, Value};

use crate::config::{CoeffSpec, Config};
use crate::document::{complex, complex_list, float, float_list, ResultDocument};

/// Cross-method agreement bound for `spectrum --method auto`.
const AGREEMENT_TOL: f64 = 1e-8;
/// Default absolute-tolerance factor for the bisection path.
const SYM_TOL: f64 = 1e-12;
/// Default residual-gate factor for the root-finder path.
const ORACLE_TOL: f64 = 1e-10;

pub struct Outcome {
    pub doc: ResultDocument,
    pub exit: i32,
}

#[derive(Debug)]
pub struct Failure {
    pub exit: i32,
    pub message: String,
}

impl Failure {
    fn parse(message: impl Into<String>) -> Self {
        Failure { exit: 1, message: message.into() }
    }
    fn not_quasi_hermitian(message: impl Into<String>) -> Self {
        Failure { exit: 2, message: message.into() }
    }
    fn bracket(message: impl Into<String>) -> Self {
        Failure { exit: 5, message: message.into() }
    }

    fn from_core(e: &Error) -> Self {
        match e {
            Error::InvalidSpec(_) | Error::Domain(_) | Error::DimensionMismatch { .. } => {
                Failure::parse(e.to_string())
            }
            Error::Decoupled { .. } | Error::NotSymmetrizable { .. } | Error::NonSymmetric(_) => {
                Failure::not_quasi_hermitian(e.to_string())
            }
            Error::Convergence { .. }
            | Error::Range { .. }
            | Error::Defective { .. }
            | Error::Unsupported(_) => Failure { exit: 4, message: e.to_string() },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Auto,
    Symmetrize,
    Oracle,
}

pub struct Options {
    pub method: Method,
    pub q1: Option<f64>,
    pub tol: Option<f64>,
}

fn chain_matrix(cfg: &Config) -> Result<(ChainSpec, TridiagMatrix, f64), Failure> {
    let chain_cfg = cfg.chain().map_err(|e| Failure::parse(e.to_string()))?;
    let spec = chain_cfg.expand().map_err(|e| Failure::parse(e.to_string()))?;
    let m = TridiagMatrix::from_spec(&spec).map_err(|e| Failure::from_core(&e))?;
    Ok((spec, m, chain_cfg.q1()))
}

fn input_echo(spec: &ChainSpec, q1: f64) -> Value {
    let mut obj = serde_json::Map::new();
    obj.insert("n".into(), json!(spec.n));
    obj.insert("alpha".into(), complex_list(&spec.upper));
    obj.insert("beta".into(), complex_list(&spec.lower));
    obj.insert("omega".into(), complex_list(&spec.onsite));
    obj.insert("cyclic".into(), json!(spec.is_cyclic()));
    if let Some(corners) = &spec.corners {
        obj.insert("corner_up".into(), complex(corners.top_right));
        obj.insert("corner_down".into(), complex(corners.bottom_left));
    }
    obj.insert("q1".into(), float(q1));
    Value::Object(obj)
}

fn report_value(report: &QuasiHermReport) -> Value {
    let mut obj = serde_json::Map::new();
    obj.insert("is_quasi_hermitian".into(), json!(report.is_quasi_hermitian));
    obj.insert("diag_real".into(), json!(report.diag_real));
    obj.insert("ratios_positive".into(), json!(report.ratios_positive));
    obj.insert(
        "cyclic_ok".into(),
        match report.cyclic_ok {
            Some(ok) => json!(ok),
            None => Value::Null,
        },
    );
    obj.insert(
        "ratios".into(),
        match &report.ratios {
            Some(r) => float_list(r),
            None => Value::Null,
        },
    );
    obj.insert(
        "first_violation".into(),
        match &report.first_violation {
            Some(v) => {
                let mut inner = serde_json::Map::new();
                inner.insert("index".into(), json!(v.index));
                inner.insert("rule".into(), json!(v.rule.to_string()));
                inner.insert("value".into(), complex(v.value));
                Value::Object(inner)
            }
            None => Value::Null,
        },
    );
    Value::Object(obj)
}

fn metric_value(q: &MetricDiagonal) -> Value {
    let mut obj = serde_json::Map::new();
    obj.insert("q1".into(), float(q.q1()));
    obj.insert("log_scaled".into(), json!(q.is_log_scaled()));
    match q.values() {
        Some(values) => {
            obj.insert("values".into(), float_list(&values));
        }
        None => {
            let signs: Vec<f64> = (0..q.len()).map(|j| q.sign_at(j)).collect();
            let lns: Vec<f64> = (0..q.len()).map(|j| q.ln_abs(j)).collect();
            obj.insert("signs".into(), float_list(&signs));
            obj.insert("ln_magnitudes".into(), float_list(&lns));
        }
    }
    Value::Object(obj)
}

fn char_poly_residuals(m: &TridiagMatrix, values: &[Complex64]) -> Value {
    let res: Vec<f64> = values.iter().map(|v| m.char_poly_eval(*v).norm()).collect();
    float_list(&res)
}

/// `check`: quasi-Hermiticity report plus, when it passes, the metric and
/// the intertwining residual. Exit 0 when quasi-Hermitian, 2 otherwise.
pub fn cmd_check(cfg: &Config, opts: &Options) -> Result<Outcome, Failure> {
    let (spec, m, cfg_q1) = chain_matrix(cfg)?;
    let q1 = opts.q1.unwrap_or(cfg_q1);
    let tol = opts.tol.unwrap_or(metric::DEFAULT_TOL);
    if !(tol >= 0.0) {
        return Err(Failure::parse("tol must be non-negative"));
    }
    let report = quasi_herm_check(&m, tol);
    let mut doc = ResultDocument::new("check");
    doc.set("input", input_echo(&spec, q1));
    doc.set("quasi_hermitian", report_value(&report));
    if report.is_quasi_hermitian {
        let q = compute_metric(&m, q1).map_err(|e| Failure::from_core(&e))?;
        doc.set("metric", metric_value(&q));
        doc.set(
            "residuals",
            json!({ "intertwining": verify_intertwining(&m, &q) }),
        );
    }
    let exit = if report.is_quasi_hermitian { 0 } else { 2 };
    Ok(Outcome { doc, exit })
}

struct SymResult {
    spectrum: Spectrum,
    q: MetricDiagonal,
    intertwining: f64,
}

fn sym_path(m: &TridiagMatrix, q1: f64, tol: f64) -> Result<SymResult, Failure> {
    let q = compute_metric(m, q1).map_err(|e| Failure::from_core(&e))?;
    let t = symmetrize(m, &q).map_err(|e| Failure::from_core(&e))?;
    let spectrum = symmetric_eigenvalues(&t, tol).map_err(|e| Failure::from_core(&e))?;
    let intertwining = verify_intertwining(m, &q);
    Ok(SymResult { spectrum, q, intertwining })
}

/// `spectrum`: eigenvalues by the requested route. `auto` runs both routes
/// on open quasi-Hermitian chains and reports their deviation (exit 3 when
/// above 1e-8); otherwise it falls back to the oracle.
pub fn cmd_spectrum(cfg: &Config, opts: &Options) -> Result<Outcome, Failure> {
    let (spec, m, cfg_q1) = chain_matrix(cfg)?;
    let q1 = opts.q1.unwrap_or(cfg_q1);
    if let Some(t) = opts.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Failure::parse("tol must be a positive finite real"));
        }
    }
    let report = quasi_herm_check(&m, metric::DEFAULT_TOL);
    let sym_applies = report.is_quasi_hermitian && !m.is_cyclic();

    let mut doc = ResultDocument::new("spectrum");
    doc.set("input", input_echo(&spec, q1));
    let mut exit = 0;

    let mut residuals = serde_json::Map::new();
    let mut diagnostics = serde_json::Map::new();

    let primary: Spectrum = match opts.method {
        Method::Symmetrize => {
            if !report.is_quasi_hermitian {
                return Err(Failure::not_quasi_hermitian(describe_violation(&report)));
            }
            if m.is_cyclic() {
                return Err(Failure::parse(
                    "method symmetrize needs an open chain; use method oracle for cyclic chains",
                ));
            }
            let sym = sym_path(&m, q1, opts.tol.unwrap_or(SYM_TOL))?;
            doc.set("metric", metric_value(&sym.q));
            residuals.insert("intertwining".into(), float(sym.intertwining));
            diagnostics.insert("method_used".into(), json!("symmetrize"));
            sym.spectrum
        }
        Method::Oracle => {
            let s = general_eigenvalues(&m, opts.tol.unwrap_or(ORACLE_TOL))
                .map_err(|e| Failure::from_core(&e))?;
            diagnostics.insert("method_used".into(), json!("oracle"));
            s
        }
        Method::Auto => {
            if sym_applies {
                let sym = sym_path(&m, q1, opts.tol.unwrap_or(SYM_TOL))?;
                let gen = general_eigenvalues(&m, opts.tol.unwrap_or(ORACLE_TOL))
                    .map_err(|e| Failure::from_core(&e))?;
                let deviation = spectrum_deviation(&sym.spectrum.values, &gen.values);
                doc.set("metric", metric_value(&sym.q));
                residuals.insert("intertwining".into(), float(sym.intertwining));
                diagnostics.insert("method_used".into(), json!("symmetrize+oracle"));
                diagnostics.insert("cross_method_deviation".into(), float(deviation));
                if deviation > AGREEMENT_TOL {
                    exit = 3;
                }
                sym.spectrum
            } else {
                let s = general_eigenvalues(&m, opts.tol.unwrap_or(ORACLE_TOL))
                    .map_err(|e| Failure::from_core(&e))?;
                diagnostics.insert("method_used".into(), json!("oracle"));
                diagnostics.insert(
                    "note".into(),
                    json!(if m.is_cyclic() {
                        "oracle only: the symmetrize route does not cover cyclic chains"
                    } else {
                        "oracle only: chain is not quasi-Hermitian"
                    }),
                );
                s
            }
        }
    };

    residuals.insert("char_poly".into(), char_poly_residuals(&m, &primary.values));
    doc.set("spectrum", complex_list(&primary.values));
    doc.set("all_real", json!(primary.all_real));
    doc.set("reality_tol", float(primary.reality_tol));
    doc.set("residuals", Value::Object(residuals));
    doc.set("diagnostics", Value::Object(diagnostics));
    Ok(Outcome { doc, exit })
}

fn describe_violation(report: &QuasiHermReport) -> String {
    match &report.first_violation {
        Some(v) => format!("chain is not quasi-Hermitian: {} at site {}", v.rule, v.index),
        None => "chain is not quasi-Hermitian".into(),
    }
}

/// `transform`: the metric diagonal and the symmetrized matrix. Works for
/// complex-diagonal chains too (the off-diagonal transform applies there);
/// exit 2 when the couplings cannot be symmetrized at all.
pub fn cmd_transform(cfg: &Config, opts: &Options) -> Result<Outcome, Failure> {
    let (spec, m, cfg_q1) = chain_matrix(cfg)?;
    let q1 = opts.q1.unwrap_or(cfg_q1);
    let q = compute_metric(&m, q1).map_err(|e| Failure::from_core(&e))?;
    let t = symmetrize(&m, &q).map_err(|e| Failure::from_core(&e))?;
    let mut doc = ResultDocument::new("transform");
    doc.set("input", input_echo(&spec, q1));
    doc.set("metric", metric_value(&q));
    let mut sym = serde_json::Map::new();
    sym.insert("diag".into(), complex_list(t.diag()));
    sym.insert("upper".into(), complex_list(t.upper()));
    sym.insert("lower".into(), complex_list(t.lower()));
    if let Some(c) = t.corners() {
        sym.insert("corner_up".into(), complex(c.top_right));
        sym.insert("corner_down".into(), complex(c.bottom_left));
    }
    doc.set("symmetrized", Value::Object(sym));
    doc.set(
        "residuals",
        json!({ "intertwining": verify_intertwining(&m, &q) }),
    );
    Ok(Outcome { doc, exit: 0 })
}

/// `sweep`: scan the gain amplitude over the configured range, find the grid
/// cell where the numerically computed spectrum stops being all-real, then
/// sharpen the transition point with 40 bisection steps. Exit 5 when the
/// range never crosses it.
pub fn cmd_sweep(cfg: &Config, opts: &Options) -> Result<Outcome, Failure> {
    let chain_cfg = cfg.chain().map_err(|e| Failure::parse(e.to_string()))?;
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Failure::parse("config: missing \"sweep\" section"))?;
    if sweep.parameter != "v0" {
        return Err(Failure::parse(format!(
            "sweep.parameter: only \"v0\" is supported, got \"{}\"",
            sweep.parameter
        )));
    }
    let tag = match &chain_cfg.omega {
        CoeffSpec::GainLoss { yuce } => *yuce,
        _ => {
            return Err(Failure::parse(
                "sweep requires omega to use the yuce generator",
            ))
        }
    };
    // Validates coupling consistency and domain constraints (even n etc).
    let base_spec = chain_cfg.expand().map_err(|e| Failure::parse(e.to_string()))?;
    let [lo, hi] = sweep.range;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Failure::parse("sweep.range: need finite lo < hi"));
    }
    if sweep.steps < 1 {
        return Err(Failure::parse("sweep.steps: need at least one step"));
    }
    let tol = opts.tol.unwrap_or(ORACLE_TOL);
    let n = chain_cfg.n;
    let gamma = tag.gamma;

    let all_real_at = |v0: f64| -> Result<bool, Failure> {
        let p = GainLossParams { n, gamma, v0 };
        let spec = gain_loss_chain(&p).map_err(|e| Failure::parse(e.to_string()))?;
        let m = TridiagMatrix::from_spec(&spec).map_err(|e| Failure::from_core(&e))?;
        let s = general_eigenvalues(&m, tol).map_err(|e| Failure::from_core(&e))?;
        Ok(s.all_real)
    };

    let grid_point = |i: usize| lo + (hi - lo) * i as f64 / sweep.steps as f64;
    let mut bracket = None;
    let mut prev = all_real_at(lo)?;
    if prev {
        for i in 1..=sweep.steps {
            let x = grid_point(i);
            let cur = all_real_at(x)?;
            if prev && !cur {
                bracket = Some((grid_point(i - 1), x));
                break;
            }
            prev = cur;
        }
    }
    let (mut a, mut b) = bracket.ok_or_else(|| {
        Failure::bracket(format!(
            "no all-real to complex transition inside [{lo}, {hi}]; spectrum at {lo} is {}",
            if prev { "all-real throughout the grid" } else { "already complex" }
        ))
    })?;
    for _ in 0..40 {
        let mid = 0.5 * (a + b);
        if all_real_at(mid)? {
            a = mid;
        } else {
            b = mid;
        }
    }
    let threshold = 0.5 * (a + b);
    let analytic = gain_loss_critical(n, gamma).map_err(|e| Failure::parse(e.to_string()))?;

    let mut doc = ResultDocument::new("sweep");
    doc.set("input", input_echo(&base_spec, chain_cfg.q1()));
    doc.set(
        "sweep",
        json!({
            "parameter": "v0",
            "range": [lo, hi],
            "steps": sweep.steps,
        }),
    );
    doc.set("threshold", float(threshold));
    doc.set("bracket", Value::Array(vec![float(a), float(b)]));
    doc.set("analytic_threshold", float(analytic));
    doc.set("deviation", float((threshold - analytic).abs()));
    Ok(Outcome { doc, exit: 0 })
}

/// `analytic`: evaluate a closed-form model directly.
pub fn cmd_analytic(cfg: &Config, _opts: &Options) -> Result<Outcome, Failure> {
    use crate::config::AnalyticConfig;
    let section = cfg
        .analytic
        .as_ref()
        .ok_or_else(|| Failure::parse("config: missing \"analytic\" section"))?;
    let mut doc = ResultDocument::new("analytic");
    match section {
        AnalyticConfig::TwoByTwo { omega1, omega2, alpha, beta } => {
            let s = two_site_spectrum(
                omega1.value(),
                omega2.value(),
                alpha.value(),
                beta.value(),
            );
            doc.set(
                "input",
                json!({
                    "model": "2x2",
                    "omega1": complex(omega1.value()),
                    "omega2": complex(omega2.value()),
                    "alpha": complex(alpha.value()),
                    "beta": complex(beta.value()),
                }),
            );
            doc.set(
                "formula",
                json!("E = (omega1 + omega2 +- sqrt((omega1 - omega2)^2 + 4 alpha beta)) / 2"),
            );
            let s2 = Spectrum::from_values(vec![s.plus, s.minus], qherm_core::eigen::REALITY_TOL);
            doc.set("e_plus", complex(s.plus));
            doc.set("e_minus", complex(s.minus));
            doc.set("spectrum", complex_list(&s2.values));
            doc.set("all_real", json!(s.real_pair));
        }
        AnalyticConfig::Uniform { n, omega, alpha, beta } => {
            let p = UniformChainParams { n: *n, omega: *omega, alpha: *alpha, beta: *beta };
            let pairs = uniform_chain_solution(&p).map_err(|e| Failure::parse(e.to_string()))?;
            doc.set(
                "input",
                json!({
                    "model": "uniform",
                    "n": n,
                    "omega": omega,
                    "alpha": alpha,
                    "beta": beta,
                }),
            );
            doc.set(
                "formula",
                json!("E_k = omega + 2 sqrt(alpha beta) cos(k pi/(n+1)); d_jk = sqrt(2/(n+1)) sin(k j pi/(n+1))"),
            );
            let values: Vec<Complex64> = pairs.iter().map(|p| p.value).collect();
            doc.set("spectrum", complex_list(&values));
            doc.set(
                "vectors_d",
                Value::Array(pairs.iter().map(|p| complex_list(&p.sym_basis)).collect()),
            );
            doc.set(
                "vectors_c",
                Value::Array(pairs.iter().map(|p| complex_list(&p.chain_basis)).collect()),
            );
            doc.set("all_real", json!(true));
        }
        AnalyticConfig::GainLoss { n, gamma, v0 } => {
            let p = GainLossParams { n: *n, gamma: *gamma, v0: *v0 };
            let s = gain_loss_spectrum(&p).map_err(|e| Failure::parse(e.to_string()))?;
            let critical = gain_loss_critical(*n, *gamma)
                .map_err(|e| Failure::parse(e.to_string()))?;
            doc.set(
                "input",
                json!({ "model": "yuce", "n": n, "gamma": gamma, "v0": v0 }),
            );
            doc.set(
                "formula",
                json!("E_k^2 = 4 gamma cos^2(k pi/(n+1)) - v0^2, k = 1..n/2; real iff |v0| < 2 sqrt(gamma) cos(n pi/(2(n+1)))"),
            );
            doc.set("spectrum", complex_list(&s.values));
            doc.set("all_real", json!(s.all_real));
            doc.set("critical_v0", float(critical));
        }
    }
    Ok(Outcome { doc, exit: 0 })
}
