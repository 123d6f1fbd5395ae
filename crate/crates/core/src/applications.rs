//! Example systems: harmonic-map connections, separable systems, the
//! oscillating lemniscate, and seeded random polynomial connections.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symcore::{diff, eval, EvalError, Expr, ZeroTester};

use crate::connection::{Connection, ConnectionError, Slice, SplitFrame};
use crate::curvature::{CurvatureError, CurvatureReport};
use crate::jetcalc::{contact_form, coordinate_form, lie_bracket};
use crate::jetcalc::{DiffForm, JetContext, JetError, VectorField, VectorValuedForm};
use crate::oracle::{check_equal_vvf, check_zero_exprs, check_zero_vvf, IdentityCheck, FD_STEP};
use crate::secondorder::{annihilator_forms, BaseMetric, SecondOrderError};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ApplicationError {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Connection(#[from] ConnectionError),
    #[error(transparent)]
    SecondOrder(#[from] SecondOrderError),
    #[error(transparent)]
    Curvature(#[from] CurvatureError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("chart condition fails: {0} must vanish")]
    ChartCondition(String),
    #[error("{0} metric must live on the {0} coordinates")]
    WrongCoordinates(&'static str),
    #[error("ordinary reduction needs one independent variable, got {0}")]
    NotOrdinary(usize),
}

/// A metric with its Levi-Civita connection and curvature tensor.
#[derive(Clone, Debug)]
pub struct RiemannData {
    metric: BaseMetric,
    /// `Γ^k_ij`, indexed `[k][i][j]`.
    christoffel: Vec<Vec<Vec<Expr>>>,
    /// `R^l_kij`, indexed `[l][k][i][j]`.
    riemann: Vec<Vec<Vec<Vec<Expr>>>>,
}

impl RiemannData {
    /// `Γ^k_ij = ½g^{kl}(∂_j g_li + ∂_i g_lj - ∂_l g_ij)` and
    /// `R^l_kij = ∂_iΓ^l_jk - ∂_jΓ^l_ik + Γ^l_im Γ^m_jk - Γ^l_jm Γ^m_ik`.
    pub fn christoffel(metric: BaseMetric) -> Self {
        let d = metric.dim();
        let ctx = metric.ctx().clone();
        let dg = |a: usize, b: usize, c: usize| ctx.partial(metric.g(a, b), metric.coord(c));
        let half = Expr::ratio(1, 2);
        let christoffel: Vec<Vec<Vec<Expr>>> = (0..d)
            .map(|k| {
                (0..d)
                    .map(|i| {
                        (0..d)
                            .map(|j| {
                                let terms =
                                    (0..d).map(|l| metric.inv(k, l) * (dg(l, i, j) + dg(l, j, i) - dg(i, j, l)));
                                (&half * Expr::sum(terms)).simplify()
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let g = |k: usize, i: usize, j: usize| &christoffel[k][i][j];
        let riemann = (0..d)
            .map(|l| {
                (0..d)
                    .map(|k| {
                        (0..d)
                            .map(|i| {
                                (0..d)
                                    .map(|j| {
                                        let mut terms = vec![
                                            ctx.partial(g(l, j, k), metric.coord(i)),
                                            -ctx.partial(g(l, i, k), metric.coord(j)),
                                        ];
                                        for mm in 0..d {
                                            terms.push(g(l, i, mm) * g(mm, j, k));
                                            terms.push(-(g(l, j, mm) * g(mm, i, k)));
                                        }
                                        Expr::sum(terms)
                                    })
                                    .collect()
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        RiemannData {
            metric,
            christoffel,
            riemann,
        }
    }

    pub fn metric(&self) -> &BaseMetric {
        &self.metric
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn gamma(&self, k: usize, i: usize, j: usize) -> &Expr {
        &self.christoffel[k][i][j]
    }

    pub fn riemann(&self, l: usize, k: usize, i: usize, j: usize) -> &Expr {
        &self.riemann[l][k][i][j]
    }

    pub fn is_flat(&self) -> bool {
        self.riemann.iter().flatten().flatten().flatten().all(Expr::is_zero)
    }

    /// Symmetry of `Γ`, antisymmetry of `R` in its last pair, the first
    /// Bianchi identity and metric compatibility.
    pub fn checks(&self, tester: &ZeroTester) -> Vec<IdentityCheck> {
        let d = self.dim();
        let m = &self.metric;
        let ctx = m.ctx();
        let idx = |v: &[usize]| v.iter().map(|x| (x + 1).to_string()).collect::<Vec<_>>().join(",");
        let mut sym = Vec::new();
        let mut anti = Vec::new();
        let mut bianchi = Vec::new();
        let mut compat = Vec::new();
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    sym.push((idx(&[a, b, c]), self.gamma(a, b, c) - self.gamma(a, c, b)));
                    let mut terms = vec![ctx.partial(m.g(a, b), m.coord(c))];
                    for l in 0..d {
                        terms.push(-(self.gamma(l, c, a) * m.g(l, b)));
                        terms.push(-(self.gamma(l, c, b) * m.g(a, l)));
                    }
                    compat.push((idx(&[a, b, c]), Expr::sum(terms)));
                    for e in 0..d {
                        anti.push((idx(&[a, b, c, e]), self.riemann(a, b, c, e) + self.riemann(a, b, e, c)));
                        let cyc = self.riemann(a, b, c, e) + self.riemann(a, c, e, b) + self.riemann(a, e, b, c);
                        bianchi.push((idx(&[a, b, c, e]), cyc));
                    }
                }
            }
        }
        vec![
            check_zero_exprs("Christoffel symmetry", tester, sym),
            check_zero_exprs("Riemann antisymmetry", tester, anti),
            check_zero_exprs("first Bianchi identity", tester, bianchi),
            check_zero_exprs("metric compatibility", tester, compat),
        ]
    }
}

fn ensure_coords(metric: &BaseMetric, expected: Vec<usize>, what: &'static str) -> Result<(), ApplicationError> {
    if (0..metric.dim()).map(|i| metric.coord(i)).collect::<Vec<_>>() != expected {
        return Err(ApplicationError::WrongCoordinates(what));
    }
    Ok(())
}

/// `F^ρ_ij = ᵍΓ^k_ij y^ρ_k - ʰΓ^ρ_σν y^σ_i y^ν_j` for `g` on the base and `h` on the fibre.
pub fn harmonic_connection(g: &RiemannData, h: &RiemannData) -> Result<Connection, ApplicationError> {
    let ctx = g.metric.ctx().clone();
    ensure_coords(&g.metric, (0..ctx.n()).map(|i| ctx.x_idx(i)).collect(), "base")?;
    ensure_coords(&h.metric, (0..ctx.m()).map(|s| ctx.y_idx(s)).collect(), "fibre")?;
    let (n, m) = (ctx.n(), ctx.m());
    let c = ctx.clone();
    Ok(Connection::new(ctx, move |rho, i, j| {
        let mut terms: Vec<Expr> = (0..n).map(|k| g.gamma(k, i, j) * c.dy(rho, k)).collect();
        for s in 0..m {
            for nu in 0..m {
                terms.push(-(h.gamma(rho, s, nu) * c.dy(s, i) * c.dy(nu, j)));
            }
        }
        Expr::sum(terms)
    }))
}

/// The four closed-form operators of a harmonic-map connection in a chart
/// with `g₁₁ = 1`, `g₁q = 0`, for `φ = dx¹`, `v = ∂/∂x¹`.
pub struct HarmonicDisplays {
    pub r_gamma: VectorValuedForm,
    pub r_h: VectorValuedForm,
    pub phi: VectorValuedForm,
    pub r_plus: VectorValuedForm,
}

pub fn harmonic_displays(frame: &SplitFrame, g: &RiemannData, h: &RiemannData) -> HarmonicDisplays {
    let ctx = frame.ctx();
    let (n, m, dim) = (ctx.n(), ctx.m(), ctx.dim());
    let y1 = |s: usize, i: usize| ctx.dy(s, i);
    let wedge = |a: &DiffForm, b: &DiffForm| a.wedge(b).expect("1-forms");
    let mut rg = Vec::new();
    let mut phi = Vec::new();
    let mut rp = Vec::new();
    for i in 0..n {
        for j in 0..n {
            // K^ν_ijk = ᵍR^l_kij y^ν_l + ʰR^ν_ρμσ y^σ_i y^μ_j y^ρ_k
            let mut u = VectorField::zero(dim);
            for nu in 0..m {
                for k in 0..n {
                    let mut terms: Vec<Expr> = (0..n).map(|l| g.riemann(l, k, i, j) * y1(nu, l)).collect();
                    for rho in 0..m {
                        for mu in 0..m {
                            for s in 0..m {
                                let r = h.riemann(nu, rho, mu, s);
                                if !r.is_zero() {
                                    terms.push(r * y1(s, i) * y1(mu, j) * y1(rho, k));
                                }
                            }
                        }
                    }
                    u.set(ctx.dy_idx(nu, k), Expr::sum(terms));
                }
            }
            rg.push((wedge(&frame.dx[i], &frame.dx[j]), u));
        }
        for nu in 0..m {
            // Φ^ρ_iνk = ʰR^ρ_μνσ y^σ_i y^μ_k
            let mut u = VectorField::zero(dim);
            for rho in 0..m {
                for k in 0..n {
                    let mut terms = Vec::new();
                    for mu in 0..m {
                        for s in 0..m {
                            terms.push(h.riemann(rho, mu, nu, s) * y1(s, i) * y1(mu, k));
                        }
                    }
                    u.set(ctx.dy_idx(rho, k), Expr::sum(terms));
                }
            }
            phi.push((wedge(&frame.dx[i], &frame.omega[nu]), u));
            // r^{pσ}_iν = -ᵍΓ^p_i1 δ^σ_ν
            for p in 1..n {
                let mut u = VectorField::zero(dim);
                u.set(ctx.dy_idx(nu, 0), -g.gamma(p, i, 0).clone());
                rp.push((wedge(&frame.dx[i], frame.psi(nu, p)), u));
            }
        }
    }
    let mut rh = Vec::new();
    for s in 0..m {
        for rho in 0..m {
            // κ^ν_σρk = ʰR^ν_μρσ y^μ_k
            let mut u = VectorField::zero(dim);
            for nu in 0..m {
                for k in 0..n {
                    let terms = (0..m).map(|mu| h.riemann(nu, mu, rho, s) * y1(mu, k));
                    u.set(ctx.dy_idx(nu, k), Expr::sum(terms));
                }
            }
            rh.push((wedge(&frame.omega[s], &frame.omega[rho]), u));
        }
    }
    HarmonicDisplays {
        r_gamma: VectorValuedForm::from_terms(dim, 2, &rg),
        r_h: VectorValuedForm::from_terms(dim, 2, &rh),
        phi: VectorValuedForm::from_terms(dim, 2, &phi),
        r_plus: VectorValuedForm::from_terms(dim, 2, &rp),
    }
}

pub struct HarmonicReport {
    pub frame: SplitFrame,
    pub curvature: CurvatureReport,
    /// `R^Γ`, `R^H`, `Φ`, `r₊` against their closed forms.
    pub checks: Vec<IdentityCheck>,
}

impl HarmonicReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Build the harmonic-map connection, split with `φ = dx¹`, `v = g♯(φ)`,
/// and compare the curvature operators with their closed forms.
pub fn harmonic_curvature_check(
    g: &RiemannData,
    h: &RiemannData,
    tester: &ZeroTester,
) -> Result<HarmonicReport, ApplicationError> {
    let ctx = g.metric.ctx().clone();
    let n = ctx.n();
    let gm = g.metric();
    let chart = std::iter::once((String::from("g[1][1] - 1"), gm.g(0, 0) - Expr::one()))
        .chain((1..n).map(|q| (format!("g[1][{}]", q + 1), gm.g(0, q).clone())));
    for (label, e) in chart {
        if !e.is_zero() && !tester.check(&e)?.is_zero {
            return Err(ApplicationError::ChartCondition(label));
        }
    }
    let c = harmonic_connection(g, h)?;
    let phi: Vec<Expr> = (0..n)
        .map(|i| if i == 0 { Expr::one() } else { Expr::zero() })
        .collect();
    let v = gm.sharp(&phi);
    let s = Slice::new(&ctx, phi, v, tester)?;
    let frame = SplitFrame::build(&c, &s, tester)?;
    let curvature = CurvatureReport::compute_checked(&frame, tester)?;
    let d = harmonic_displays(&frame, g, h);
    let checks = vec![
        check_equal_vvf(
            &ctx,
            "R_Gamma = K dx^dx (x) d/dy_k",
            tester,
            &curvature.r_gamma,
            &d.r_gamma,
        ),
        check_equal_vvf(&ctx, "R_H = kappa w^w (x) d/dy_k", tester, &curvature.r_h, &d.r_h),
        check_equal_vvf(&ctx, "Phi = hR y y dx^w (x) d/dy_k", tester, &curvature.phi, &d.phi),
        check_equal_vvf(
            &ctx,
            "r_plus = -gGamma dx^psi (x) d/dy_1",
            tester,
            &curvature.r_plus,
            &d.r_plus,
        ),
    ];
    Ok(HarmonicReport {
        frame,
        curvature,
        checks,
    })
}

/// Result for one directional slice of a separable system.
pub struct SliceOutcome {
    pub name: String,
    pub v: Vec<Expr>,
    pub r_h_vanishes: IdentityCheck,
    pub phi_diagonal: IdentityCheck,
    /// Coefficients against the slice formulas `⁽¹⁾H`, `⁽ᵖ⁾H`.
    pub coefficients: IdentityCheck,
}

pub struct SeparabilityReport {
    /// One-based `(σ, i, j)` entries and the coordinates they depend on illegitimately.
    pub violations: Vec<String>,
    pub slices: Vec<SliceOutcome>,
}

impl SeparabilityReport {
    pub fn separable(&self) -> bool {
        self.violations.is_empty()
    }

    /// The necessary conditions hold on every slice; only meaningful for separable input.
    pub fn passed(&self) -> bool {
        self.separable()
            && self
                .slices
                .iter()
                .all(|s| s.r_h_vanishes.passed && s.phi_diagonal.passed && s.coefficients.passed)
    }
}

/// Checks the separability hypothesis and, for `φ = dx¹` and the slices
/// `v₁ = e₁`, `v_p = e₁ + e_p`, that `R^H = 0` and `Φ` is diagonal in `(ν, σ)`.
pub fn separability_check(c: &Connection, tester: &ZeroTester) -> Result<SeparabilityReport, ApplicationError> {
    let ctx = c.ctx().clone();
    let (n, m) = (ctx.n(), ctx.m());
    let mut violations = Vec::new();
    for ((sigma, i, j), f) in c.entries() {
        let mut bad = Vec::new();
        for k in 0..n {
            bad.push(ctx.x_idx(k));
        }
        for nu in (0..m).filter(|&nu| nu != sigma) {
            bad.push(ctx.y_idx(nu));
            bad.extend((0..n).map(|k| ctx.dy_idx(nu, k)));
        }
        for a in bad {
            let d = ctx.partial(f, a);
            if !d.is_zero() && !tester.check(&d)?.is_zero {
                violations.push(format!(
                    "F[{}][{}][{}] depends on {}",
                    sigma + 1,
                    i + 1,
                    j + 1,
                    ctx.name(a)
                ));
            }
        }
    }
    let phi: Vec<Expr> = (0..n)
        .map(|i| if i == 0 { Expr::one() } else { Expr::zero() })
        .collect();
    let mut slices = Vec::new();
    for p in 0..n {
        let v: Vec<Expr> = (0..n)
            .map(|i| if i == 0 || i == p { Expr::one() } else { Expr::zero() })
            .collect();
        let s = Slice::new(&ctx, phi.clone(), v.clone(), tester)?;
        let frame = SplitFrame::build(c, &s, tester)?;
        let report = CurvatureReport::compute_checked(&frame, tester)?;
        let r_h_vanishes = check_zero_vvf(&ctx, "R_H = 0", tester, &report.r_h);
        let mut off = Vec::new();
        for nu in 0..m {
            for sigma in (0..m).filter(|&s| s != nu) {
                for i in 0..n {
                    for j in 0..n {
                        off.push((
                            format!("Phi[{}][{}][{}][{}]", nu + 1, i + 1, sigma + 1, j + 1),
                            report.phi_components.get(nu, i, sigma, j).clone(),
                        ));
                    }
                }
            }
        }
        let phi_diagonal = check_zero_exprs("Phi off-diagonal = 0", tester, off);
        let h = frame.coefficients();
        let mut items = Vec::new();
        for nu in 0..m {
            for sigma in 0..m {
                for k in 0..n {
                    let expected = if nu != sigma {
                        Expr::zero()
                    } else {
                        let d = |a: usize, b: usize| c.df(sigma, a, b, ctx.dy_idx(sigma, 0));
                        match (k, p) {
                            (0, 0) => Expr::ratio(1, 2) * d(0, 0),
                            (0, _) => Expr::ratio(1, 2) * (d(0, 0) - d(p, p)),
                            (_, 0) => d(0, k),
                            _ => d(0, k) + d(p, k),
                        }
                    };
                    items.push((
                        format!("H[{}][{}][{}]", nu + 1, sigma + 1, k + 1),
                        h.get(nu, sigma, k) - expected,
                    ));
                }
            }
        }
        let coefficients = check_zero_exprs("slice coefficients", tester, items);
        slices.push(SliceOutcome {
            name: format!("v{}", p + 1),
            v,
            r_h_vanishes,
            phi_diagonal,
            coefficients,
        });
    }
    Ok(SeparabilityReport { violations, slices })
}

/// `r_θθ = -2r - r_θ²/r`, `r_tθ = r_t r_θ/r`, `r_tt = -r` on coordinates `(t, th; r)`.
pub fn lemniscate() -> Connection {
    let ctx = Arc::new(JetContext::new(&["t", "th"], &["r"]).expect("distinct names"));
    let p = |s: &str| ctx.parse(s).expect("valid expression");
    let entries = [p("-r"), p("r_t*r_th/r"), p("-2*r - r_th^2/r")];
    Connection::new(ctx.clone(), |_, i, j| entries[i + j].clone())
}

/// The trivial system `F ≡ 0` on `x1..xn`, `y1..ym`.
pub fn free_connection(n: usize, m: usize) -> Connection {
    Connection::zero(Arc::new(standard_context(n, m)))
}

/// Context with base `x1..xn` and fibre `y1..ym`.
pub fn standard_context(n: usize, m: usize) -> JetContext {
    let base: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let fibre: Vec<String> = (1..=m).map(|s| format!("y{s}")).collect();
    let b: Vec<&str> = base.iter().map(String::as_str).collect();
    let f: Vec<&str> = fibre.iter().map(String::as_str).collect();
    JetContext::new(&b, &f).expect("distinct names")
}

/// Seeded polynomial connection: each entry is a sum of up to `terms`
/// monomials with integer coefficients in `[-2, 2]`, each a product of at
/// most two jet coordinates, so entries are at most quadratic in `y^σ_i`.
pub fn random_connection(ctx: Arc<JetContext>, seed: u64, terms: usize) -> Connection {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = ctx.dim();
    let (n, m) = (ctx.n(), ctx.m());
    let mut table = Vec::new();
    for _ in 0..m * n * (n + 1) / 2 {
        let mut parts = Vec::new();
        for _ in 0..rng.gen_range(1..=terms) {
            let coeff = loop {
                let c: i64 = rng.gen_range(-2..=2);
                if c != 0 {
                    break c;
                }
            };
            let factors = rng.gen_range(0..=2);
            let mut t = Expr::int(coeff);
            for _ in 0..factors {
                t = t * Expr::sym(ctx.coord(rng.gen_range(0..dim)));
            }
            parts.push(t);
        }
        table.push(Expr::sum(parts));
    }
    let slots = n * (n + 1) / 2;
    Connection::new(ctx.clone(), move |s, i, j| {
        let k = i * n - i * (i + 1) / 2 + j;
        table[s * slots + k].clone()
    })
}

/// `r = cos t · sqrt(cos 2θ)` with its first and second derivatives.
pub struct LemniscateSolution {
    pub r: Expr,
    pub r_t: Expr,
    pub r_th: Expr,
    pub r_tt: Expr,
    pub r_tth: Expr,
    pub r_thth: Expr,
}

pub fn lemniscate_solution(c: &Connection) -> LemniscateSolution {
    let ctx = c.ctx();
    let t = ctx.x(0);
    let th = ctx.x(1);
    let r = t.cos() * (Expr::int(2) * th).cos().sqrt();
    let (st, sth) = (ctx.coord(ctx.x_idx(0)), ctx.coord(ctx.x_idx(1)));
    let r_t = diff(&r, st);
    let r_th = diff(&r, sth);
    LemniscateSolution {
        r_tt: diff(&r_t, st),
        r_tth: diff(&r_t, sth),
        r_thth: diff(&r_th, sth),
        r,
        r_t,
        r_th,
    }
}

/// Largest residual of the three lemniscate equations on the closed-form
/// solution at `(t, θ)` points, using exact derivatives; the second value
/// uses central differences of the solution instead.
pub fn lemniscate_solution_residuals(c: &Connection, points: &[(f64, f64)]) -> Result<(f64, f64), EvalError> {
    let ctx = c.ctx();
    let sol = lemniscate_solution(c);
    let (st, sth) = (ctx.coord(ctx.x_idx(0)).clone(), ctx.coord(ctx.x_idx(1)).clone());
    let (sr, srt, srth) = (
        ctx.coord(ctx.y_idx(0)).clone(),
        ctx.coord(ctx.dy_idx(0, 0)).clone(),
        ctx.coord(ctx.dy_idx(0, 1)).clone(),
    );
    let mut exact_worst: f64 = 0.0;
    let mut fd_worst: f64 = 0.0;
    for &(t, th) in points {
        let base: std::collections::HashMap<_, _> = [(st.clone(), t), (sth.clone(), th)].into_iter().collect();
        let at = |e: &Expr, dt: f64, dth: f64| -> Result<f64, EvalError> {
            let mut p = base.clone();
            p.insert(st.clone(), t + dt);
            p.insert(sth.clone(), th + dth);
            eval(e, &p)
        };
        let mut jet = base.clone();
        jet.insert(sr.clone(), at(&sol.r, 0.0, 0.0)?);
        jet.insert(srt.clone(), at(&sol.r_t, 0.0, 0.0)?);
        jet.insert(srth.clone(), at(&sol.r_th, 0.0, 0.0)?);
        let rhs = [
            eval(c.f(0, 0, 0), &jet)?,
            eval(c.f(0, 0, 1), &jet)?,
            eval(c.f(0, 1, 1), &jet)?,
        ];
        let exact = [
            at(&sol.r_tt, 0.0, 0.0)?,
            at(&sol.r_tth, 0.0, 0.0)?,
            at(&sol.r_thth, 0.0, 0.0)?,
        ];
        // second differences of r itself
        let h = FD_STEP.sqrt() * 1e-1;
        let r = |dt: f64, dth: f64| at(&sol.r, dt, dth);
        let r0 = r(0.0, 0.0)?;
        let fd = [
            (r(h, 0.0)? - 2.0 * r0 + r(-h, 0.0)?) / (h * h),
            (r(h, h)? - r(h, -h)? - r(-h, h)? + r(-h, -h)?) / (4.0 * h * h),
            (r(0.0, h)? - 2.0 * r0 + r(0.0, -h)?) / (h * h),
        ];
        for k in 0..3 {
            exact_worst = exact_worst.max((exact[k] - rhs[k]).abs());
            fd_worst = fd_worst.max((fd[k] - rhs[k]).abs());
        }
    }
    Ok((exact_worst, fd_worst))
}

/// One-variable reduction: splits with `φ = dt`, `v = ∂/∂t` and compares
/// against the SODE data `Γ^ν_σ = -½∂F^ν/∂ẏ^σ`, `H_σ = ∂/∂y^σ - Γ^ν_σ ∂/∂ẏ^ν`,
/// `ψ^σ = ω̄^σ + Γ^σ_ν ω^ν` and
/// `Φ^ν_σ = Γ^ρ_σ Γ^ν_ρ - Γ(Γ^ν_σ) - H_σ(F^ν)`, built directly from `F`.
pub fn ode_reduction_check(c: &Connection, tester: &ZeroTester) -> Result<Vec<IdentityCheck>, ApplicationError> {
    let ctx = c.ctx().clone();
    if ctx.n() != 1 {
        return Err(ApplicationError::NotOrdinary(ctx.n()));
    }
    let m = ctx.m();
    let dim = ctx.dim();
    let s = Slice::new(&ctx, vec![Expr::one()], vec![Expr::one()], tester)?;
    let frame = SplitFrame::build(c, &s, tester)?;
    let report = CurvatureReport::compute_checked(&frame, tester)?;

    let f = |nu: usize| c.f(nu, 0, 0);
    let conn: Vec<Vec<Expr>> = (0..m)
        .map(|nu| {
            (0..m)
                .map(|sigma| Expr::ratio(-1, 2) * ctx.partial(f(nu), ctx.dy_idx(sigma, 0)))
                .collect()
        })
        .collect();
    let semispray = {
        let mut u = VectorField::basis(dim, ctx.x_idx(0));
        for nu in 0..m {
            u.set(ctx.y_idx(nu), ctx.dy(nu, 0));
            u.set(ctx.dy_idx(nu, 0), f(nu).clone());
        }
        u
    };
    let horizontal: Vec<VectorField> = (0..m)
        .map(|sigma| {
            let mut u = VectorField::basis(dim, ctx.y_idx(sigma));
            for nu in 0..m {
                u.set(ctx.dy_idx(nu, 0), -conn[nu][sigma].clone());
            }
            u
        })
        .collect();
    let dt = coordinate_form(&ctx, ctx.x_idx(0));
    let omega: Vec<DiffForm> = (0..m).map(|nu| contact_form(&ctx, nu)).collect::<Result<_, _>>()?;
    let psi: Vec<DiffForm> = (0..m)
        .map(|sigma| {
            let bar = coordinate_form(&ctx, ctx.dy_idx(sigma, 0)).sub(&dt.scale(f(sigma)));
            let mut parts = vec![bar];
            parts.extend((0..m).map(|nu| omega[nu].scale(&conn[sigma][nu])));
            DiffForm::sum(dim, 1, &parts)
        })
        .collect();

    let h = frame.coefficients();
    let mut h_items = Vec::new();
    let mut jacobi_items = Vec::new();
    let mut psi_items = Vec::new();
    let mut annihilator_items = Vec::new();
    let mut bracket_items = Vec::new();
    let forms = annihilator_forms(c, &s);
    for sigma in 0..m {
        for nu in 0..m {
            h_items.push((
                format!("H[{}][{}]", nu + 1, sigma + 1),
                h.get(nu, sigma, 0) + &conn[nu][sigma],
            ));
            let mut expected: Vec<Expr> = (0..m).map(|rho| &conn[rho][sigma] * &conn[nu][rho]).collect();
            expected.push(-semispray.apply(&ctx, &conn[nu][sigma]));
            expected.push(-horizontal[sigma].apply(&ctx, f(nu)));
            jacobi_items.push((
                format!("Phi[{}][{}]", nu + 1, sigma + 1),
                report.phi_components.get(nu, 0, sigma, 0) - Expr::sum(expected),
            ));
        }
        let d = frame.psi(sigma, 0).sub(&psi[sigma]);
        let twice = forms.get(sigma, 0, 0).sub(&psi[sigma].scale(&Expr::int(2)));
        for a in 0..dim {
            psi_items.push((format!("psi[{}] d{}", sigma + 1, ctx.name(a)), d.comp(a).clone()));
            annihilator_items.push((
                format!("psi[{}][1][1] d{}", sigma + 1, ctx.name(a)),
                twice.comp(a).clone(),
            ));
        }
        // [Γ, H_σ] = Γ^ν_σ H_ν + Φ^ν_σ ∂/∂ẏ^ν
        let lhs = lie_bracket(&ctx, &semispray, &horizontal[sigma])?;
        let mut rhs = VectorField::zero(dim);
        for nu in 0..m {
            rhs = rhs.add(&horizontal[nu].scale(&conn[nu][sigma]));
            let mut v = VectorField::zero(dim);
            v.set(ctx.dy_idx(nu, 0), report.phi_components.get(nu, 0, sigma, 0).clone());
            rhs = rhs.add(&v);
        }
        let gap = lhs.sub(&rhs);
        for a in 0..dim {
            bracket_items.push((
                format!("[Gamma,H_{}] d/d{}", sigma + 1, ctx.name(a)),
                gap.comp(a).clone(),
            ));
        }
    }
    let gamma_gap = frame.gamma[0].sub(&semispray);
    let gamma_items = (0..dim).map(|a| (format!("Gamma d/d{}", ctx.name(a)), gamma_gap.comp(a).clone()));
    Ok(vec![
        check_zero_exprs("Gamma_1 = semispray", tester, gamma_items),
        check_zero_exprs("H = 1/2 dF/dydot = -Gamma", tester, h_items),
        check_zero_exprs("psi = omega_bar + Gamma omega", tester, psi_items),
        check_zero_exprs("psi_11 = 2 psi", tester, annihilator_items),
        check_zero_exprs("Phi = Jacobi endomorphism", tester, jacobi_items),
        check_zero_exprs("[Gamma,H] = Gamma H + Phi V", tester, bracket_items),
    ])
}
