//! The analyses behind each subcommand.

use jetcurv_core::applications::{harmonic_curvature_check, separability_check, ApplicationError, RiemannData};
use jetcurv_core::connection::{
    check_deformation_bracket, verify_eigensplitting, Connection, ConnectionError, Slice, SplitFrame,
};
use jetcurv_core::curvature::{
    check_bracket_table, check_plus_structure_equation, check_vertical_structure_equation, CurvatureError,
    CurvatureReport,
};
use jetcurv_core::jetcalc::JetContext;
use jetcurv_core::secondorder::{
    annihilator_forms, check_compatibility, d_minus_frame, d_minus_membership, probe_points, BaseMetric, LinearChart,
    SecondOrderError,
};
use symcore::{EvalError, Expr, ZeroTester};

use crate::report::Report;
use crate::specfile::{SliceSpec, SystemSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Split,
    Curvature,
    Identities,
    Compatibility,
    Separability,
    EigenVerify,
    Harmonic,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Split => "split",
            Command::Curvature => "curvature",
            Command::Identities => "identities",
            Command::Compatibility => "compatibility",
            Command::Separability => "separability",
            Command::EigenVerify => "eigen-verify",
            Command::Harmonic => "harmonic",
        }
    }

    /// Commands that build the system from `[F]`.
    pub fn uses_f(self) -> bool {
        self != Command::Harmonic
    }
}

/// Settings after merging the spec options with flags and environment.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub slice: Option<String>,
    pub points: usize,
    pub seed: u64,
    pub tol_sym: f64,
    pub tol_num: f64,
    pub probes: usize,
}

impl RunConfig {
    fn tester(&self) -> ZeroTester {
        ZeroTester {
            probes: self.probes,
            seed: self.seed,
            tolerance: self.tol_sym,
        }
    }
}

/// Input problems abort the run; assertion failures become report rows.
#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Assertion(String),
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        CliError::Input(format!("domain error while probing: {e}"))
    }
}

impl From<ConnectionError> for CliError {
    fn from(e: ConnectionError) -> Self {
        match e {
            ConnectionError::Eigen(_) | ConnectionError::Frame(_) => CliError::Assertion(e.to_string()),
            ConnectionError::Eval(inner) => inner.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<CurvatureError> for CliError {
    fn from(e: CurvatureError) -> Self {
        match e {
            CurvatureError::CrossCheck { .. } => CliError::Assertion(e.to_string()),
            CurvatureError::Jet(_) => CliError::Input(e.to_string()),
        }
    }
}

impl From<SecondOrderError> for CliError {
    fn from(e: SecondOrderError) -> Self {
        match e {
            SecondOrderError::Connection(inner) => inner.into(),
            SecondOrderError::Eval(inner) => inner.into(),
            SecondOrderError::Incompatible(_) | SecondOrderError::Mismatch { .. } => CliError::Assertion(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<ApplicationError> for CliError {
    fn from(e: ApplicationError) -> Self {
        match e {
            ApplicationError::Connection(inner) => inner.into(),
            ApplicationError::Curvature(inner) => inner.into(),
            ApplicationError::SecondOrder(inner) => inner.into(),
            ApplicationError::Eval(inner) => inner.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

/// Run an analysis step; an assertion error is recorded as a failed row.
fn guarded<T>(report: &mut Report, name: &str, r: Result<T, CliError>) -> Result<Option<T>, CliError> {
    match r {
        Ok(x) => Ok(Some(x)),
        Err(CliError::Assertion(msg)) => {
            report.assert(name, false, &msg);
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

fn show(tester: &ZeroTester, e: &Expr) -> String {
    let s = e.simplify();
    if !s.is_zero() && tester.check(&s).map(|v| v.is_zero).unwrap_or(false) {
        return "0".into();
    }
    s.to_string()
}

fn list(items: &[Expr]) -> String {
    items
        .iter()
        .map(|e| e.simplify().to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

fn selected_slices(spec: &SystemSpec, cfg: &RunConfig, report: &mut Report) -> Result<Vec<SliceSpec>, CliError> {
    if let Some(name) = &cfg.slice {
        return spec
            .slice(name)
            .cloned()
            .map(|s| vec![s])
            .ok_or_else(|| CliError::Input(format!("--slice {name}: no [slice {name}] block")));
    }
    if !spec.slices.is_empty() {
        return Ok(spec.slices.clone());
    }
    let n = spec.n();
    let e1: Vec<Expr> = (0..n)
        .map(|i| if i == 0 { Expr::one() } else { Expr::zero() })
        .collect();
    let name = spec.ctx.name(spec.ctx.x_idx(0)).to_string();
    report.line(format!("note: no [slice] blocks; using phi = d{name}, v = d/d{name}"));
    Ok(vec![SliceSpec {
        name,
        phi: e1.clone(),
        v: e1,
    }])
}

fn open_slice(report: &mut Report, ctx: &JetContext, s: &SliceSpec, tester: &ZeroTester) -> Result<Slice, CliError> {
    report.line(format!(
        "[slice {}] phi = ({}), v = ({})",
        s.name,
        list(&s.phi),
        list(&s.v)
    ));
    Ok(Slice::new(ctx, s.phi.clone(), s.v.clone(), tester)?)
}

fn build_frame(
    report: &mut Report,
    c: &Connection,
    s: &Slice,
    tester: &ZeroTester,
) -> Result<Option<SplitFrame>, CliError> {
    let r = SplitFrame::build(c, s, tester).map_err(CliError::from);
    guarded(report, "frame construction", r)
}

fn jacobi_name(ctx: &JetContext, nu: usize, i: usize, sigma: usize, j: usize) -> String {
    let x = |k: usize| ctx.name(ctx.x_idx(k));
    let y = |k: usize| ctx.name(ctx.y_idx(k));
    if ctx.m() == 1 {
        format!("Phi[{}][{}]", x(i), x(j))
    } else {
        format!("Phi[{}][{}][{}][{}]", y(nu), x(i), y(sigma), x(j))
    }
}

pub fn run(command: Command, spec: &SystemSpec, spec_bytes: &[u8], cfg: &RunConfig) -> Result<Report, CliError> {
    let mut report = Report::new(command.name(), spec_bytes, cfg.seed);
    report.line(format!(
        "jetcurv {}: n = {}, m = {}, seed = {:#x}",
        command.name(),
        spec.n(),
        spec.m(),
        cfg.seed
    ));
    let tester = cfg.tester();
    let c = spec.connection();
    let ctx = spec.ctx.clone();
    match command {
        Command::Split => {
            for sl in selected_slices(spec, cfg, &mut report)? {
                let s = open_slice(&mut report, &ctx, &sl, &tester)?;
                let Some(frame) = build_frame(&mut report, &c, &s, &tester)? else {
                    continue;
                };
                let h = frame.coefficients();
                for nu in 0..ctx.m() {
                    for sigma in 0..ctx.m() {
                        for k in 0..ctx.n() {
                            let name = format!(
                                "H[{}][{}][{}]",
                                ctx.name(ctx.y_idx(nu)),
                                ctx.name(ctx.y_idx(sigma)),
                                ctx.name(ctx.x_idx(k))
                            );
                            report.info(name, show(&tester, h.get(nu, sigma, k)));
                        }
                    }
                }
                for check in frame.verify(&tester).iter().chain(&frame.eigen_checks(&tester)) {
                    report.check("", check);
                }
            }
        }
        Command::Curvature => {
            for sl in selected_slices(spec, cfg, &mut report)? {
                let s = open_slice(&mut report, &ctx, &sl, &tester)?;
                let Some(frame) = build_frame(&mut report, &c, &s, &tester)? else {
                    continue;
                };
                let r = CurvatureReport::compute(&frame, &tester).map_err(CliError::from);
                let Some(cr) = guarded(&mut report, "curvature", r)? else {
                    continue;
                };
                let zero = |name: &str, op| jetcurv_core::oracle::check_zero_vvf(&ctx, name, &tester, op);
                report.zero_info("R_Gamma", &zero("R_Gamma", &cr.r_gamma));
                report.zero_info("R_H", &zero("R_H", &cr.r_h));
                report.zero_info("r_plus", &zero("r_plus", &cr.r_plus));
                for nu in 0..ctx.m() {
                    for i in 0..ctx.n() {
                        for sigma in 0..ctx.m() {
                            for j in 0..ctx.n() {
                                let e = cr.phi_components.get(nu, i, sigma, j);
                                report.info(jacobi_name(&ctx, nu, i, sigma, j), show(&tester, e));
                            }
                        }
                    }
                }
                for check in &cr.cross_checks {
                    report.check("", check);
                }
            }
        }
        Command::Identities => {
            for sl in selected_slices(spec, cfg, &mut report)? {
                let s = open_slice(&mut report, &ctx, &sl, &tester)?;
                for check in check_deformation_bracket(&c, &s, &tester) {
                    report.check("", &check);
                }
                let Some(frame) = build_frame(&mut report, &c, &s, &tester)? else {
                    continue;
                };
                let r = CurvatureReport::compute(&frame, &tester).map_err(CliError::from);
                let Some(cr) = guarded(&mut report, "curvature", r)? else {
                    continue;
                };
                for check in &cr.cross_checks {
                    report.check("", check);
                }
                report.check("", &check_vertical_structure_equation(&frame, &cr, &tester));
                report.check("", &check_plus_structure_equation(&frame, &cr, &tester));
                let rows = check_bracket_table(&frame, &cr, &tester).map_err(CliError::from);
                if let Some(rows) = guarded(&mut report, "bracket table", rows)? {
                    for check in &rows {
                        report.check("table: ", check);
                    }
                }
            }
        }
        Command::Compatibility => {
            for sl in selected_slices(spec, cfg, &mut report)? {
                let s = open_slice(&mut report, &ctx, &sl, &tester)?;
                let (c2, s2) = if s.adapted_index().is_some() {
                    (c.clone(), s)
                } else {
                    let chart = LinearChart::new(s.phi())?;
                    report.line(format!(
                        "  note: compatibility tested in the linear chart u{} = phi_i x^i",
                        chart.adapted + 1
                    ));
                    chart.transform(&c, &s, &tester)?
                };
                let compat = check_compatibility(&c2, &s2, &tester)?;
                let a = s2.adapted_index().expect("adapted");
                let detail: Vec<String> = compat
                    .witnesses
                    .iter()
                    .map(|w| {
                        format!(
                            "F[{}][{}][{}] depends on {}",
                            w.sigma,
                            w.p,
                            w.q,
                            ctx.name(ctx.dy_idx(w.nu - 1, a))
                        )
                    })
                    .collect();
                report.assert("compatibility condition", compat.compatible, &detail.join("; "));
                if compat.compatible {
                    let r = d_minus_frame(&c2, &s2, &tester).map_err(CliError::from);
                    if let Some(frame) = guarded(&mut report, "D- = first-order frame", r)? {
                        report.assert("D- = first-order frame", true, "");
                        report.check("", &d_minus_membership(&frame, &annihilator_forms(&c2, &s2), &tester));
                    }
                }
            }
        }
        Command::Separability => {
            let sep = separability_check(&c, &tester)?;
            report.assert("separable form", sep.separable(), &sep.violations.join("; "));
            for out in &sep.slices {
                report.line(format!("[slice {}] v = ({})", out.name, list(&out.v)));
                let prefix = format!("{}: ", out.name);
                report.check(&prefix, &out.r_h_vanishes);
                report.check(&prefix, &out.phi_diagonal);
                report.check(&prefix, &out.coefficients);
            }
        }
        Command::EigenVerify => {
            for sl in selected_slices(spec, cfg, &mut report)? {
                let s = open_slice(&mut report, &ctx, &sl, &tester)?;
                let points = probe_points(&c, &s, cfg.points, cfg.seed)?;
                for (k, p) in points.iter().enumerate() {
                    let m = verify_eigensplitting(&c, &s, p, cfg.tol_num)?;
                    report.matrix(&format!("{} point {}", sl.name, k + 1), &m);
                }
            }
        }
        Command::Harmonic => {
            let (Some(g), Some(h)) = (&spec.metric_g, &spec.metric_h) else {
                return Err(CliError::Input(
                    "harmonic needs [metric g] and [metric h] blocks".into(),
                ));
            };
            let g = RiemannData::christoffel(BaseMetric::on_base(ctx.clone(), g.clone(), &tester)?);
            let h = RiemannData::christoffel(BaseMetric::on_fibre(ctx.clone(), h.clone(), &tester)?);
            for check in g.checks(&tester) {
                report.check("g: ", &check);
            }
            for check in h.checks(&tester) {
                report.check("h: ", &check);
            }
            let hr = harmonic_curvature_check(&g, &h, &tester).map_err(CliError::from);
            if let Some(hr) = guarded(&mut report, "harmonic displays", hr)? {
                for check in &hr.checks {
                    report.check("", check);
                }
            }
        }
    }
    report.summary();
    Ok(report)
}
