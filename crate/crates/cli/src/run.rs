use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use dixmier_core::genlimits::LimitEstimate;
use dixmier_core::models::{
    named_observable, nct_diag, torus_multiplier_diag, FourierElement, Model, TorusFunction, OBSERVABLES,
};
use dixmier_core::normality::{
    approximate_projection, dominated_check, monotone_convergence_check, nct_witness, torus_witness,
};
use dixmier_core::quantum_limit::{diagonal_rows, structure_check, NormalizedIntegral};
use dixmier_core::residue::{
    log_average_curve, measurability_diagnostic, residue_limit, residue_route, CurveRow, GammaRow, ResidueCurve,
    Verdict,
};
use dixmier_core::spectral::{zeta, DiagonalObservable, EigenvalueSequence};
use dixmier_core::suites::{run_suite, thetas};
use dixmier_core::summation::SumPlan;
use dixmier_core::Error;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::{Cli, Command, ModelAction, ObservableSpec, OperatorSpec, Route};

pub const DEFAULT_OUTPUT: &str = "dixmier-out";

#[derive(Debug)]
pub enum Failure {
    /// Bad flags, unreadable or malformed input: exit 2.
    Usage(String),
    /// The computation itself failed: exit 1.
    Compute(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Compute(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Compute(m) => f.write_str(m),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Spec { .. }
            | Error::Unknown { .. }
            | Error::InvalidArgument(_)
            | Error::ThetaMismatch(..)
            | Error::IncomparableProfiles(_) => Failure::Usage(e.to_string()),
            _ => Failure::Compute(e.to_string()),
        }
    }
}

type Outcome = Result<ExitCode, Failure>;

pub fn read_input(field: &str, path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("--{field} {}: {e}", path.display())))
}

pub fn execute(cli: &Cli) -> Outcome {
    if let Command::Model { action: ModelAction::List } = &cli.command {
        return Ok(model_list());
    }
    let cfg = cli.global.resolve()?;
    let out = Output::new(&cfg)?;
    let strict = cli.global.strict;
    let sum = SumPlan::default();
    match &cli.command {
        Command::Zeta { operator, observable, s } => cmd_zeta(&cfg, &out, operator, observable, s, &sum),
        Command::Dixmier { operator, observable, route } => {
            cmd_dixmier(&cfg, &out, operator, observable, *route, strict, &sum)
        }
        Command::Measurable { operator, observable } => {
            cmd_dixmier(&cfg, &out, operator, observable, Route::Both, strict, &sum)
        }
        Command::Structure { operator, observable } => cmd_structure(&cfg, &out, operator, observable, strict, &sum),
        Command::Normality { model, theta, count, size } => {
            cmd_normality(&cfg, &out, model, *theta, *count, *size, strict, &sum)
        },
        Command::Proptest { suite } => cmd_proptest(&cfg, &out, suite, &sum),
        Command::Model { .. } => unreachable!(),
    }
}

struct Output {
    dir: PathBuf,
}

impl Output {
    fn new(cfg: &RunConfig) -> Result<Self, Failure> {
        let dir = cfg.output.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT));
        fs::create_dir_all(&dir).map_err(|e| Failure::Usage(format!("--output {}: {e}", dir.display())))?;
        Ok(Self { dir })
    }

    fn json(&self, name: &str, value: &Value) -> Result<PathBuf, Failure> {
        let path = self.dir.join(name);
        let mut text = serde_json::to_string_pretty(value).expect("serializable report");
        text.push('\n');
        fs::write(&path, text).map_err(|e| Failure::Compute(format!("writing {}: {e}", path.display())))?;
        Ok(path)
    }

    /// Header first, so an empty table still has its schema.
    fn csv<T: Serialize>(&self, name: &str, headers: &[&str], rows: &[T]) -> Result<PathBuf, Failure> {
        let path = self.dir.join(name);
        let err = |e: csv::Error| Failure::Compute(format!("writing {}: {e}", path.display()));
        let mut w = csv::WriterBuilder::new().has_headers(false).from_path(&path).map_err(err)?;
        w.write_record(headers).map_err(err)?;
        for r in rows {
            w.serialize(r).map_err(err)?;
        }
        w.flush().map_err(|e| Failure::Compute(format!("writing {}: {e}", path.display())))?;
        Ok(path)
    }
}

fn model_list() -> ExitCode {
    println!("{:<10} {:>8}  description", "model", "trace");
    for m in Model::ALL {
        let trace = m.expected_trace().map_or("-".to_string(), |v| format!("{v:.6}"));
        println!("{:<10} {:>8}  {}", m.name(), trace, m.description());
    }
    println!("observables: {}", OBSERVABLES.join(", "));
    ExitCode::SUCCESS
}

struct Inputs {
    model: Option<Model>,
    operator: EigenvalueSequence,
    observable: DiagonalObservable,
    echo: Value,
}

fn parse_json<T: serde::de::DeserializeOwned>(field: &str, text: &str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::Usage(format!("spec error in field '{field}': {e}")))
}

fn inputs(op: &OperatorSpec, ob: &ObservableSpec) -> Result<Inputs, Failure> {
    let (model, operator) = match &op.spectrum {
        Some(path) => {
            let values: Vec<f64> = parse_json("spectrum", &read_input("spectrum", path)?)?;
            (None, EigenvalueSequence::from_list(values).map_err(|e| Failure::Usage(format!("spec error in field 'spectrum': {e}")))?)
        }
        None => {
            let m: Model = op.model.parse()?;
            (Some(m), m.operator(op.size)?)
        }
    };
    let need = |wanted: Model, flag: &str| -> Result<(), Failure> {
        if model == Some(wanted) {
            Ok(())
        } else {
            Err(Failure::Usage(format!("--{flag} needs --model {wanted}")))
        }
    };
    let observable = if let Some(path) = &ob.element {
        need(Model::Nctorus, "element")?;
        let mut a = FourierElement::from_json(&read_input("element", path)?)?;
        if let Some(theta) = ob.theta {
            a = FourierElement::new(theta, a.support().map(|(k, c)| (*k, *c))).map_err(|e| Failure::Usage(format!("spec error in field 'theta': {e}")))?;
        }
        nct_diag(&a)
    } else if let Some(path) = &ob.function {
        need(Model::Torus, "function")?;
        torus_multiplier_diag(&TorusFunction::from_json(&read_input("function", path)?)?)
    } else if let Some(path) = &ob.diagonal {
        let values: Vec<f64> = parse_json("diagonal", &read_input("diagonal", path)?)?;
        DiagonalObservable::finite(values.into_iter().map(Complex64::from).collect())
    } else {
        named_observable(&ob.observable)?
    };
    let echo = json!({
        "model": model.map(Model::name),
        "size": op.size.or(model.and_then(Model::default_size)),
        "spectrum": op.spectrum,
        "observable": observable.label(),
        "element": ob.element,
        "theta": ob.theta,
        "function": ob.function,
        "diagonal": ob.diagonal,
    });
    Ok(Inputs { model, operator, observable, echo })
}

#[derive(Serialize)]
struct ZetaRow {
    s: f64,
    value: f64,
    error: f64,
}

fn cmd_zeta(cfg: &RunConfig, out: &Output, op: &OperatorSpec, ob: &ObservableSpec, s: &[f64], sum: &SumPlan) -> Outcome {
    let inp = inputs(op, ob)?;
    let tol = if inp.operator.available().is_some() { cfg.zeta_tolerance.max(cfg.data_tolerance) } else { cfg.zeta_tolerance };
    let mut rows = Vec::with_capacity(s.len());
    let mut points = Vec::with_capacity(s.len());
    for &x in s {
        let z = zeta(&inp.observable, &inp.operator, x, tol, sum)?;
        rows.push(ZetaRow { s: x, value: z.value.re, error: z.error });
        points.push(json!({ "s": x, "re": z.value.re, "im": z.value.im, "error": z.error, "terms": z.terms }));
    }
    let csv = out.csv("zeta.csv", &["s", "value", "error"], &rows)?;
    let report = json!({ "command": "zeta", "inputs": inp.echo, "points": points, "config_echo": cfg });
    let path = out.json("zeta.json", &report)?;
    for r in &rows {
        println!("zeta({}) = {} ± {:.3e}", r.s, r.value, r.error);
    }
    println!("wrote {} and {}", csv.display(), path.display());
    Ok(ExitCode::SUCCESS)
}

fn verdict_of(e: &LimitEstimate) -> Verdict {
    match e.value() {
        Some(value) => Verdict::Measurable { value, error: e.width() / 2.0 },
        None => Verdict::Inconclusive,
    }
}

/// Adds `value`/`error` or `band` to a report.
fn headline(report: &mut Value, verdict: &Verdict, fallback: (f64, f64)) {
    let obj = report.as_object_mut().expect("object report");
    match *verdict {
        Verdict::Measurable { value, error } => {
            obj.insert("value".into(), json!(value));
            obj.insert("error".into(), json!(error));
        }
        Verdict::NonMeasurable { lo, hi } => {
            obj.insert("band".into(), json!([lo, hi]));
        }
        Verdict::Inconclusive => {
            obj.insert("band".into(), json!([fallback.0, fallback.1]));
        }
    }
}

fn union(a: &LimitEstimate, b: Option<&LimitEstimate>) -> (f64, f64) {
    let (lo, hi) = a.interval();
    b.map_or((lo, hi), |b| {
        let (c, d) = b.interval();
        (lo.min(c), hi.max(d))
    })
}

fn is_real(a: &DiagonalObservable) -> bool {
    a.constant_value().map_or_else(|| (1..=4096).all(|m| a.value(m).im == 0.0), |c| c.im == 0.0)
}

fn write_curve(out: &Output, curve: &ResidueCurve) -> Result<PathBuf, Failure> {
    let rows: Vec<CurveRow> = curve.rows();
    out.csv("residue_curve.csv", &["k", "s", "value", "error"], &rows)
}

fn write_gamma(out: &Output, rows: &[GammaRow]) -> Result<PathBuf, Failure> {
    out.csv("gamma_curve.csv", &["N", "gamma_N"], rows)
}

fn describe(e: &LimitEstimate) -> String {
    match e.value() {
        Some(v) => format!("converged {v} ± {:.3e}", e.width() / 2.0),
        None => {
            let (lo, hi) = e.interval();
            format!("band [{lo}, {hi}]")
        }
    }
}

fn cmd_dixmier(
    cfg: &RunConfig,
    out: &Output,
    op: &OperatorSpec,
    ob: &ObservableSpec,
    route: Route,
    strict: bool,
    sum: &SumPlan,
) -> Outcome {
    let inp = inputs(op, ob)?;
    let plan = cfg.residue_plan()?;
    let name = if route == Route::Both { "measurable" } else { "dixmier" };
    let mut written = Vec::new();
    let (verdict, routes, fallback, curve) = match route {
        Route::Both => {
            let rep = measurability_diagnostic(&inp.observable, &inp.operator, &plan, sum)?;
            written.push(write_curve(out, &rep.residue_curve)?);
            if let Some(g) = &rep.gamma_curve {
                written.push(write_gamma(out, &g.points)?);
            }
            println!("residue route: {}", describe(&rep.routes.residue));
            match &rep.routes.log_average {
                Some(l) => println!("log-average route: {}", describe(l)),
                None => println!("log-average route: skipped ({})", rep.routes.log_average_note.as_deref().unwrap_or("")),
            }
            let fallback = union(&rep.routes.residue, rep.routes.log_average.as_ref());
            (rep.verdict, serde_json::to_value(&rep.routes).expect("serializable"), fallback, Some(rep.residue_curve))
        }
        Route::Residue => {
            let (curve, est) = residue_route(&inp.observable, &inp.operator, &plan, sum)?;
            written.push(write_curve(out, &curve)?);
            println!("residue route: {}", describe(&est));
            (verdict_of(&est), json!({ "residue": est }), est.interval(), Some(curve))
        }
        Route::LogAverage => {
            let (gamma, est) = log_average_curve(&inp.observable, &inp.operator, &plan, sum)?;
            written.push(write_gamma(out, &gamma.points)?);
            println!("log-average route: {}", describe(&est));
            (verdict_of(&est), json!({ "log_average": est }), est.interval(), None)
        }
    };
    let mut report = json!({
        "command": name,
        "route": format!("{route:?}").to_lowercase(),
        "inputs": inp.echo,
        "expected": inp.model.filter(|_| inp.observable.constant_value() == Some(Complex64::ONE)).and_then(Model::expected_trace),
        "verdict": verdict,
        "routes": routes,
        "config_echo": cfg,
    });
    if let (Some(curve), false) = (&curve, is_real(&inp.observable)) {
        report["imaginary"] = json!(residue_limit(curve, true, &plan)?);
    }
    headline(&mut report, &verdict, fallback);
    written.push(out.json(&format!("{name}.json"), &report)?);
    println!("verdict: {}", serde_json::to_string(&verdict).expect("serializable"));
    for p in &written {
        println!("wrote {}", p.display());
    }
    let ok = matches!(verdict, Verdict::Measurable { .. });
    Ok(if strict && !ok { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

#[derive(Serialize)]
struct DiagonalRow {
    m: u64,
    value: f64,
}

fn cmd_structure(cfg: &RunConfig, out: &Output, op: &OperatorSpec, ob: &ObservableSpec, strict: bool, sum: &SumPlan) -> Outcome {
    let inp = inputs(op, ob)?;
    let splan = cfg.structure_plan()?;
    let integral = NormalizedIntegral::new(inp.operator.clone(), cfg.residue_plan()?, sum)?;
    let rep = structure_check(&inp.observable, &integral, &splan, sum)?;
    let rows: Vec<DiagonalRow> = diagonal_rows(&inp.observable, splan.diagonal.ladder.n_max, 256)
        .into_iter()
        .map(|(m, value)| DiagonalRow { m, value })
        .collect();
    let csv = out.csv("diagonal.csv", &["m", "value"], &rows)?;
    let verdict = match (rep.agreement.converged, rep.agreement.consistent) {
        (true, true) => "agreement",
        (true, false) => "disagreement",
        (false, true) => "overlapping_bands",
        (false, false) => "disjoint_bands",
    };
    let mut report = json!({
        "command": "structure",
        "inputs": inp.echo,
        "verdict": verdict,
        "normalization": integral.normalization(),
        "phi": rep.phi,
        "diagonal_limit": rep.diagonal_limit,
        "agreement": rep.agreement,
        "config_echo": cfg,
    });
    match rep.phi.value() {
        Some(v) => {
            report["value"] = json!(v);
            report["error"] = json!(rep.phi.width() / 2.0);
        }
        None => report["band"] = json!(rep.phi.interval()),
    }
    let path = out.json("structure.json", &report)?;
    println!("phi: {}", describe(&rep.phi));
    println!("diagonal limit: {}", describe(&rep.diagonal_limit));
    println!("verdict: {verdict}");
    println!("wrote {} and {}", path.display(), csv.display());
    let ok = rep.agreement.converged && rep.agreement.consistent;
    Ok(if strict && !ok { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn cmd_normality(
    cfg: &RunConfig,
    out: &Output,
    model: &str,
    theta: Option<f64>,
    count: u64,
    size: Option<u64>,
    strict: bool,
    sum: &SumPlan,
) -> Outcome {
    let m: Model = model.parse()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (witness, defects, theta) = match m {
        Model::Torus => (torus_witness(count, 512), Vec::new(), None),
        Model::Nctorus => {
            let theta = theta.unwrap_or(thetas()[1]);
            let ps = (0..4)
                .map(|_| approximate_projection(&mut rng, theta, 3, 4))
                .collect::<Result<Vec<_>, _>>()?;
            let defects: Vec<f64> = ps.iter().map(|p| p.defect).collect();
            (nct_witness(theta, count, ps.into_iter().map(|p| p.element).collect())?, defects, Some(theta))
        }
        _ => return Err(Failure::Usage(format!("normality needs --model torus or nctorus, got {m}"))),
    };
    let domination = dominated_check(&witness)?;
    let integral = NormalizedIntegral::new(m.operator(size)?, cfg.residue_plan()?, sum)?;
    let a = DiagonalObservable::convergent(0.8, 0.15, 1.0, 3.0, 0.0)?;
    let chain: Vec<_> = [0.2, 0.5, 0.7, 0.9, 1.0].iter().map(|&t| a.min_with(t)).collect();
    let monotone = monotone_convergence_check(&integral, &chain, &a, cfg.agreement, 1 << 16, sum)?;
    let ok = domination.is_dominated() && monotone.agrees;
    let report = json!({
        "command": "normality",
        "model": m.name(),
        "theta": theta,
        "size": size.or(m.default_size()),
        "verdict": if ok { "normal" } else { "failed" },
        "domination": domination,
        "projection_defects": defects,
        "monotone": monotone,
        "config_echo": cfg,
    });
    let path = out.json("normality.json", &report)?;
    println!("domination: {}", serde_json::to_string(&domination).expect("serializable"));
    println!(
        "monotone chain: sup phi(A_j) = {:?}, phi(sup) = {}, agrees = {}",
        monotone.chain_sup,
        describe(&monotone.supremum),
        monotone.agrees
    );
    println!("wrote {}", path.display());
    Ok(if strict && !ok { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn cmd_proptest(cfg: &RunConfig, out: &Output, suite: &str, sum: &SumPlan) -> Outcome {
    let rep = run_suite(suite, cfg.seed, sum)?;
    for c in &rep.checks {
        let status = if c.passed() { "PASS" } else { "FAIL" };
        println!("{status} {} ({} cases, {} failures)", c.name, c.cases, c.failures);
        if let Some(x) = &c.counterexample {
            println!("  counterexample: {x}");
        }
    }
    let report = json!({
        "command": "proptest",
        "verdict": if rep.passed() { "pass" } else { "fail" },
        "report": rep,
        "config_echo": cfg,
    });
    let path = out.json("proptest.json", &report)?;
    println!("suite {suite} seed {}: {}", cfg.seed, if rep.passed() { "all pass" } else { "FAILED" });
    println!("wrote {}", path.display());
    Ok(if rep.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
