//! Curvature operators of the splittings, computed both as projected
//! Frölicher–Nijenhuis brackets and from their coordinate expressions.

use symcore::{Expr, ZeroTester};

use crate::connection::SplitFrame;
use crate::jetcalc::{
    fn_bracket, lie_bracket, vvf_compose, DiffForm, JetContext, JetError, VectorField, VectorValuedForm,
};
use crate::oracle::{check_equal_vvf, check_zero_exprs, check_zero_vvf, IdentityCheck};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum CurvatureError {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("{what} disagrees with its coordinate expression at {failures:?}")]
    CrossCheck { what: String, failures: Vec<String> },
}

/// Table `Φ^ν_{iσj}`.
#[derive(Clone, Debug, PartialEq)]
pub struct JacobiComponents {
    n: usize,
    m: usize,
    table: Vec<Expr>,
}

impl JacobiComponents {
    pub fn get(&self, nu: usize, i: usize, sigma: usize, j: usize) -> &Expr {
        &self.table[((nu * self.n + i) * self.m + sigma) * self.n + j]
    }

    /// The vector field `Φ_{iσ} = Φ^ν_{iσj} ∂/∂y^ν_j`.
    pub fn field(&self, ctx: &JetContext, i: usize, sigma: usize) -> VectorField {
        let mut u = VectorField::zero(ctx.dim());
        for nu in 0..self.m {
            for j in 0..self.n {
                u.set(ctx.dy_idx(nu, j), self.get(nu, i, sigma, j).clone());
            }
        }
        u
    }
}

/// `Φ^ν_{iσj} = H^ρ_{σi} H^ν_{ρj} + Γ_i(H^ν_{σj}) - H_σ(F^ν_ij)`.
pub fn jacobi_components(frame: &SplitFrame) -> JacobiComponents {
    let ctx = frame.ctx();
    let (n, m) = (ctx.n(), ctx.m());
    let h = frame.coefficients();
    let c = frame.connection();
    let mut table = Vec::with_capacity(m * n * m * n);
    for nu in 0..m {
        for i in 0..n {
            for sigma in 0..m {
                for j in 0..n {
                    let mut terms: Vec<Expr> = (0..m).map(|rho| h.get(rho, sigma, i) * h.get(nu, rho, j)).collect();
                    terms.push(frame.gamma[i].apply(ctx, h.get(nu, sigma, j)));
                    terms.push(-frame.horizontal[sigma].apply(ctx, c.f(nu, i, j)));
                    table.push(Expr::sum(terms));
                }
            }
        }
    }
    JacobiComponents { n, m, table }
}

/// `Σ_k α_k ∧ β_k ⊗ U_k`.
fn wedge_terms(ctx: &JetContext, terms: &[(&DiffForm, &DiffForm, VectorField)]) -> VectorValuedForm {
    let parts: Vec<(DiffForm, VectorField)> = terms
        .iter()
        .filter(|(_, _, u)| !u.is_zero())
        .map(|(a, b, u)| (a.wedge(b).expect("1-forms"), u.clone()))
        .collect();
    VectorValuedForm::from_terms(ctx.dim(), 2, &parts)
}

/// `dx^i ∧ dx^j ⊗ [Γ_i, Γ_j]`, summed over all `i, j`.
pub fn r_gamma_display(frame: &SplitFrame) -> VectorValuedForm {
    let ctx = frame.ctx();
    let n = ctx.n();
    let mut terms = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let b = lie_bracket(ctx, &frame.gamma[i], &frame.gamma[j]).expect("same context");
                terms.push((&frame.dx[i], &frame.dx[j], b));
            }
        }
    }
    wedge_terms(ctx, &terms)
}

/// `ω^σ ∧ ω^ρ ⊗ [H_σ, H_ρ]`, summed over all `σ, ρ`.
pub fn r_h_display(frame: &SplitFrame) -> VectorValuedForm {
    let ctx = frame.ctx();
    let m = ctx.m();
    let mut terms = Vec::new();
    for s in 0..m {
        for r in 0..m {
            if s != r {
                let b = lie_bracket(ctx, &frame.horizontal[s], &frame.horizontal[r]).expect("same context");
                terms.push((&frame.omega[s], &frame.omega[r], b));
            }
        }
    }
    wedge_terms(ctx, &terms)
}

/// `Φ^ν_{iσj} dx^i ∧ ω^σ ⊗ ∂/∂y^ν_j`.
pub fn jacobi_display(frame: &SplitFrame, comps: &JacobiComponents) -> VectorValuedForm {
    let ctx = frame.ctx();
    let mut terms = Vec::new();
    for i in 0..ctx.n() {
        for sigma in 0..ctx.m() {
            terms.push((&frame.dx[i], &frame.omega[sigma], comps.field(ctx, i, sigma)));
        }
    }
    wedge_terms(ctx, &terms)
}

/// `dx^i ∧ ψ^σ_i ⊗ H_σ`.
pub fn force_term(frame: &SplitFrame) -> VectorValuedForm {
    let ctx = frame.ctx();
    let mut terms = Vec::new();
    for i in 0..ctx.n() {
        for sigma in 0..ctx.m() {
            terms.push((&frame.dx[i], frame.psi(sigma, i), frame.horizontal[sigma].clone()));
        }
    }
    wedge_terms(ctx, &terms)
}

/// `(ṽ ∘ A, v₊ ∘ A)`.
pub fn decompose_plus_tilde(
    frame: &SplitFrame,
    a: &VectorValuedForm,
) -> Result<(VectorValuedForm, VectorValuedForm), CurvatureError> {
    let ctx = frame.ctx();
    Ok((
        vvf_compose(ctx, &frame.v_tilde, a)?,
        vvf_compose(ctx, &frame.v_plus, a)?,
    ))
}

/// Split a vertical vector field `X^ν_j ∂/∂y^ν_j` into `X^ν_j(∂/∂y^ν_j - v^j E_ν)` and `v^j X^ν_j E_ν`.
fn split_vertical(frame: &SplitFrame, x: &VectorField) -> (VectorField, VectorField) {
    let ctx = frame.ctx();
    let v = frame.slice().v();
    let mut plus = VectorField::zero(ctx.dim());
    for nu in 0..ctx.m() {
        let coeff = Expr::sum((0..ctx.n()).map(|j| &v[j] * x.comp(ctx.dy_idx(nu, j))));
        plus = plus.add(&frame.plus[nu].scale(&coeff));
    }
    (x.sub(&plus), plus)
}

/// The adapted-chart displays of the refined operators: `Φ̃`, `Φ₊`, `R̃^Γ`,
/// `R^Γ₊`, `R̃^H`, `R^H₊`, with `W^p_ν` replaced by `∂/∂y^ν_j - v^j E_ν`
/// so that they make sense in any chart.
pub struct RefinedDisplays {
    pub phi_tilde: VectorValuedForm,
    pub phi_plus: VectorValuedForm,
    pub r_gamma_tilde: VectorValuedForm,
    pub r_gamma_plus: VectorValuedForm,
    pub r_h_tilde: VectorValuedForm,
    pub r_h_plus: VectorValuedForm,
}

pub fn refined_displays(frame: &SplitFrame, comps: &JacobiComponents) -> RefinedDisplays {
    let ctx = frame.ctx();
    let (n, m) = (ctx.n(), ctx.m());
    let mut phi = (Vec::new(), Vec::new());
    for i in 0..n {
        for sigma in 0..m {
            let (t, p) = split_vertical(frame, &comps.field(ctx, i, sigma));
            phi.0.push((&frame.dx[i], &frame.omega[sigma], t));
            phi.1.push((&frame.dx[i], &frame.omega[sigma], p));
        }
    }
    let mut rg = (Vec::new(), Vec::new());
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let b = lie_bracket(ctx, &frame.gamma[i], &frame.gamma[j]).expect("same context");
                let (t, p) = split_vertical(frame, &b);
                rg.0.push((&frame.dx[i], &frame.dx[j], t));
                rg.1.push((&frame.dx[i], &frame.dx[j], p));
            }
        }
    }
    let mut rh = (Vec::new(), Vec::new());
    for s in 0..m {
        for r in 0..m {
            if s != r {
                let b = lie_bracket(ctx, &frame.horizontal[s], &frame.horizontal[r]).expect("same context");
                let (t, p) = split_vertical(frame, &b);
                rh.0.push((&frame.omega[s], &frame.omega[r], t));
                rh.1.push((&frame.omega[s], &frame.omega[r], p));
            }
        }
    }
    RefinedDisplays {
        phi_tilde: wedge_terms(ctx, &phi.0),
        phi_plus: wedge_terms(ctx, &phi.1),
        r_gamma_tilde: wedge_terms(ctx, &rg.0),
        r_gamma_plus: wedge_terms(ctx, &rg.1),
        r_h_tilde: wedge_terms(ctx, &rh.0),
        r_h_plus: wedge_terms(ctx, &rh.1),
    }
}

/// The coordinate expression of `r₊` in a chart where `φ = dx^a`:
/// `(v^k(v^p ∂F^σ_ik/∂y^ν_a - ∂F^σ_ik/∂y^ν_p - (v^p δ^a_i - δ^p_i) H^σ_{νk}) - δ^σ_ν ∂v^p/∂x^i)
/// dx^i ∧ ψ^ν_p ⊗ ∂/∂y^σ_a`, `p ≠ a`. `None` outside adapted charts.
pub fn r_plus_display(frame: &SplitFrame) -> Option<VectorValuedForm> {
    let a = frame.slice().adapted_index()?;
    let ctx = frame.ctx();
    let (n, m) = (ctx.n(), ctx.m());
    let c = frame.connection();
    let v = frame.slice().v();
    let h = frame.coefficients();
    let dim = ctx.dim();
    let mut terms = Vec::new();
    for i in 0..n {
        for nu in 0..m {
            for p in (0..n).filter(|&p| p != a) {
                let mut out = VectorField::zero(dim);
                for sigma in 0..m {
                    let mut parts = Vec::new();
                    for k in 0..n {
                        if v[k].is_zero() {
                            continue;
                        }
                        let mut inner = vec![
                            &v[p] * c.df(sigma, i, k, ctx.dy_idx(nu, a)),
                            -c.df(sigma, i, k, ctx.dy_idx(nu, p)),
                        ];
                        let mut delta = Expr::zero();
                        if i == a {
                            delta = &delta + &v[p];
                        }
                        if i == p {
                            delta = &delta - Expr::one();
                        }
                        if !delta.is_zero() {
                            inner.push(-(delta * h.get(sigma, nu, k)));
                        }
                        parts.push(&v[k] * Expr::sum(inner));
                    }
                    if sigma == nu {
                        parts.push(-ctx.partial(&v[p], ctx.x_idx(i)));
                    }
                    out.set(ctx.dy_idx(sigma, a), Expr::sum(parts));
                }
                terms.push((&frame.dx[i], frame.psi(nu, p), out));
            }
        }
    }
    Some(wedge_terms(ctx, &terms))
}

/// The brackets of `Γ` with the projectors, computed once.
pub struct BracketTable {
    pub gamma_gamma: VectorValuedForm,
    pub gamma_h: VectorValuedForm,
    pub gamma_v: VectorValuedForm,
    pub gamma_v_tilde: VectorValuedForm,
    pub gamma_v_plus: VectorValuedForm,
}

impl BracketTable {
    pub fn compute(frame: &SplitFrame) -> Result<Self, CurvatureError> {
        let ctx = frame.ctx();
        let g = &frame.gamma_proj;
        Ok(BracketTable {
            gamma_gamma: fn_bracket(ctx, g, g)?,
            gamma_h: fn_bracket(ctx, g, &frame.h_proj)?,
            gamma_v: fn_bracket(ctx, g, &frame.v_proj)?,
            gamma_v_tilde: fn_bracket(ctx, g, &frame.v_tilde)?,
            gamma_v_plus: fn_bracket(ctx, g, &frame.v_plus)?,
        })
    }
}

/// All named operators of the threefold and fourfold splittings.
pub struct CurvatureReport {
    pub r_gamma: VectorValuedForm,
    pub r_h: VectorValuedForm,
    pub phi: VectorValuedForm,
    pub phi_components: JacobiComponents,
    pub phi_tilde: VectorValuedForm,
    pub phi_plus: VectorValuedForm,
    pub r_gamma_tilde: VectorValuedForm,
    pub r_gamma_plus: VectorValuedForm,
    pub r_h_tilde: VectorValuedForm,
    pub r_h_plus: VectorValuedForm,
    pub r_plus: VectorValuedForm,
    pub brackets: BracketTable,
    /// Every two-way computation, as residual checks.
    pub cross_checks: Vec<IdentityCheck>,
}

impl CurvatureReport {
    pub fn compute(frame: &SplitFrame, tester: &ZeroTester) -> Result<Self, CurvatureError> {
        let ctx = frame.ctx();
        let brackets = BracketTable::compute(frame)?;
        let r_gamma = brackets.gamma_gamma.clone();
        let phi = vvf_compose(ctx, &frame.v_proj, &brackets.gamma_h)?;
        let hh = fn_bracket(ctx, &frame.h_proj, &frame.h_proj)?;
        let r_h = vvf_compose(ctx, &frame.v_proj, &hh)?;
        let r_plus = vvf_compose(ctx, &frame.v_plus, &brackets.gamma_v_tilde)?;
        let (phi_tilde, phi_plus) = decompose_plus_tilde(frame, &phi)?;
        let (r_gamma_tilde, r_gamma_plus) = decompose_plus_tilde(frame, &r_gamma)?;
        let (r_h_tilde, r_h_plus) = decompose_plus_tilde(frame, &r_h)?;
        let comps = jacobi_components(frame);
        let displays = refined_displays(frame, &comps);

        let mut cross_checks = vec![
            check_equal_vvf(
                ctx,
                "R_Gamma = dx^dx (x) [Gamma,Gamma]",
                tester,
                &r_gamma,
                &r_gamma_display(frame),
            ),
            check_equal_vvf(
                ctx,
                "Phi = v o [[Gamma,h]] = components",
                tester,
                &phi,
                &jacobi_display(frame, &comps),
            ),
            check_equal_vvf(
                ctx,
                "R_H = v o [[h,h]] = w^w (x) [H,H]",
                tester,
                &r_h,
                &r_h_display(frame),
            ),
            check_equal_vvf(ctx, "Phi_tilde display", tester, &phi_tilde, &displays.phi_tilde),
            check_equal_vvf(ctx, "Phi_plus display", tester, &phi_plus, &displays.phi_plus),
            check_equal_vvf(
                ctx,
                "R_Gamma_tilde display",
                tester,
                &r_gamma_tilde,
                &displays.r_gamma_tilde,
            ),
            check_equal_vvf(
                ctx,
                "R_Gamma_plus display",
                tester,
                &r_gamma_plus,
                &displays.r_gamma_plus,
            ),
            check_equal_vvf(ctx, "R_H_tilde display", tester, &r_h_tilde, &displays.r_h_tilde),
            check_equal_vvf(ctx, "R_H_plus display", tester, &r_h_plus, &displays.r_h_plus),
        ];
        if let Some(d) = r_plus_display(frame) {
            cross_checks.push(check_equal_vvf(ctx, "r_plus display", tester, &r_plus, &d));
        }
        Ok(CurvatureReport {
            r_gamma,
            r_h,
            phi,
            phi_components: comps,
            phi_tilde,
            phi_plus,
            r_gamma_tilde,
            r_gamma_plus,
            r_h_tilde,
            r_h_plus,
            r_plus,
            brackets,
            cross_checks,
        })
    }

    /// Like [`CurvatureReport::compute`], but a failed cross-check is an error.
    pub fn compute_checked(frame: &SplitFrame, tester: &ZeroTester) -> Result<Self, CurvatureError> {
        let report = Self::compute(frame, tester)?;
        if let Some(bad) = report.cross_checks.iter().find(|c| !c.passed) {
            return Err(CurvatureError::CrossCheck {
                what: bad.name.clone(),
                failures: bad.failures.clone(),
            });
        }
        Ok(report)
    }
}

/// `R^Γ = [[Γ, Γ]]`.
pub fn r_gamma(frame: &SplitFrame) -> Result<VectorValuedForm, CurvatureError> {
    Ok(fn_bracket(frame.ctx(), &frame.gamma_proj, &frame.gamma_proj)?)
}

/// `Φ = v ∘ [[Γ, h]]`, cross-checked against the component formula.
pub fn jacobi_curvature(
    frame: &SplitFrame,
    tester: &ZeroTester,
) -> Result<(VectorValuedForm, JacobiComponents), CurvatureError> {
    let ctx = frame.ctx();
    let gh = fn_bracket(ctx, &frame.gamma_proj, &frame.h_proj)?;
    let phi = vvf_compose(ctx, &frame.v_proj, &gh)?;
    let comps = jacobi_components(frame);
    let check = check_equal_vvf(ctx, "Phi", tester, &phi, &jacobi_display(frame, &comps));
    if !check.passed {
        return Err(CurvatureError::CrossCheck {
            what: "Phi".into(),
            failures: check.failures,
        });
    }
    Ok((phi, comps))
}

/// `R^H = v ∘ [[h, h]]`, cross-checked against `ω ∧ ω ⊗ [H, H]`.
pub fn r_h(frame: &SplitFrame, tester: &ZeroTester) -> Result<VectorValuedForm, CurvatureError> {
    let ctx = frame.ctx();
    let hh = fn_bracket(ctx, &frame.h_proj, &frame.h_proj)?;
    let rh = vvf_compose(ctx, &frame.v_proj, &hh)?;
    let check = check_equal_vvf(ctx, "R_H", tester, &rh, &r_h_display(frame));
    if !check.passed {
        return Err(CurvatureError::CrossCheck {
            what: "R_H".into(),
            failures: check.failures,
        });
    }
    Ok(rh)
}

/// `r₊ = v₊ ∘ [[Γ, ṽ]]`; in adapted charts also checked against its display.
pub fn r_plus_vertical(frame: &SplitFrame, tester: &ZeroTester) -> Result<VectorValuedForm, CurvatureError> {
    let ctx = frame.ctx();
    let gv = fn_bracket(ctx, &frame.gamma_proj, &frame.v_tilde)?;
    let rp = vvf_compose(ctx, &frame.v_plus, &gv)?;
    if let Some(d) = r_plus_display(frame) {
        let check = check_equal_vvf(ctx, "r_plus", tester, &rp, &d);
        if !check.passed {
            return Err(CurvatureError::CrossCheck {
                what: "r_plus".into(),
                failures: check.failures,
            });
        }
    }
    Ok(rp)
}

/// `v ∘ [[Γ, v]] + R^Γ + Φ = 0`.
pub fn check_vertical_structure_equation(
    frame: &SplitFrame,
    report: &CurvatureReport,
    tester: &ZeroTester,
) -> IdentityCheck {
    let ctx = frame.ctx();
    let lhs = match vvf_compose(ctx, &frame.v_proj, &report.brackets.gamma_v) {
        Ok(x) => x,
        Err(e) => return IdentityCheck::failed("vertical structure equation", e.to_string()),
    };
    let total = VectorValuedForm::sum(ctx.dim(), 2, &[&lhs, &report.r_gamma, &report.phi]);
    check_zero_vvf(ctx, "v o [[Gamma,v]] + R_Gamma + Phi = 0", tester, &total)
}

/// `v₊ ∘ [[Γ, v₊]] + R^Γ₊ + Φ₊ + r₊ = 0`.
pub fn check_plus_structure_equation(
    frame: &SplitFrame,
    report: &CurvatureReport,
    tester: &ZeroTester,
) -> IdentityCheck {
    let ctx = frame.ctx();
    let lhs = match vvf_compose(ctx, &frame.v_plus, &report.brackets.gamma_v_plus) {
        Ok(x) => x,
        Err(e) => return IdentityCheck::failed("plus structure equation", e.to_string()),
    };
    let total = VectorValuedForm::sum(
        ctx.dim(),
        2,
        &[&lhs, &report.r_gamma_plus, &report.phi_plus, &report.r_plus],
    );
    check_zero_vvf(ctx, "v+ o [[Gamma,v+]] + R_Gamma+ + Phi+ + r+ = 0", tester, &total)
}

/// The six bracket rows and five Lie-bracket rows of the curvature table.
pub fn check_bracket_table(
    frame: &SplitFrame,
    report: &CurvatureReport,
    tester: &ZeroTester,
) -> Result<Vec<IdentityCheck>, CurvatureError> {
    let ctx = frame.ctx();
    let dim = ctx.dim();
    let (n, m) = (ctx.n(), ctx.m());
    let c = frame.connection();
    let h = frame.coefficients();
    let phi = &report.phi;
    let rg = r_gamma_display(frame);
    let rh = r_h_display(frame);
    let force = force_term(frame);
    let two = Expr::int(2);
    let b = &report.brackets;
    let hh = fn_bracket(ctx, &frame.h_proj, &frame.h_proj)?;
    let hv = fn_bracket(ctx, &frame.h_proj, &frame.v_proj)?;
    let vv = fn_bracket(ctx, &frame.v_proj, &frame.v_proj)?;
    let sum = |parts: &[&VectorValuedForm]| VectorValuedForm::sum(dim, 2, parts);

    let mut out = vec![
        check_equal_vvf(
            ctx,
            "[[Gamma,Gamma]] = dx^dx (x) [Gamma_i,Gamma_j]",
            tester,
            &b.gamma_gamma,
            &rg,
        ),
        check_equal_vvf(
            ctx,
            "[[Gamma,h]] = Phi + dx^psi (x) H",
            tester,
            &b.gamma_h,
            &sum(&[phi, &force]),
        ),
        check_equal_vvf(
            ctx,
            "[[Gamma,v]] = -Phi - dx^psi (x) H - dx^dx (x) [Gamma_i,Gamma_j]",
            tester,
            &b.gamma_v,
            &sum(&[phi, &force, &rg]).neg(),
        ),
        check_equal_vvf(
            ctx,
            "[[h,h]] = w^w (x) [H,H] - 2 dx^psi (x) H",
            tester,
            &hh,
            &rh.sub(&force.scale(&two)),
        ),
        check_equal_vvf(
            ctx,
            "[[h,v]] = -Phi - w^w (x) [H,H] + dx^psi (x) H",
            tester,
            &hv,
            &force.sub(&sum(&[phi, &rh])),
        ),
        check_equal_vvf(
            ctx,
            "[[v,v]] = 2 Phi + dx^dx (x) [Gamma_i,Gamma_j] + w^w (x) [H,H]",
            tester,
            &vv,
            &sum(&[&phi.scale(&two), &rg, &rh]),
        ),
    ];

    // Lie brackets of the frame fields
    let mut gg = Vec::new();
    let mut gh = Vec::new();
    let mut gdy = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let lhs = lie_bracket(ctx, &frame.gamma[i], &frame.gamma[j])?;
            let mut rhs = VectorField::zero(dim);
            for nu in 0..m {
                for k in 0..n {
                    let e = frame.gamma[i].apply(ctx, c.f(nu, j, k)) - frame.gamma[j].apply(ctx, c.f(nu, i, k));
                    rhs.set(ctx.dy_idx(nu, k), e);
                }
            }
            push_field(&mut gg, format!("{i},{j}"), &lhs.sub(&rhs));
        }
        for sigma in 0..m {
            let lhs = lie_bracket(ctx, &frame.gamma[i], &frame.horizontal[sigma])?;
            let mut rhs = report.phi_components.field(ctx, i, sigma);
            for nu in 0..m {
                rhs = rhs.sub(&frame.horizontal[nu].scale(h.get(nu, sigma, i)));
            }
            push_field(&mut gh, format!("{i},{sigma}"), &lhs.sub(&rhs));
            for j in 0..n {
                let dy = VectorField::basis(dim, ctx.dy_idx(sigma, j));
                let lhs = lie_bracket(ctx, &frame.gamma[i], &dy)?;
                let mut rhs = VectorField::zero(dim);
                for nu in 0..m {
                    for k in 0..n {
                        let mut e = -c.df(nu, i, k, ctx.dy_idx(sigma, j));
                        if i == j {
                            e = e + h.get(nu, sigma, k);
                        }
                        rhs.set(ctx.dy_idx(nu, k), e);
                    }
                }
                if i == j {
                    rhs = rhs.sub(&frame.horizontal[sigma]);
                }
                push_field(&mut gdy, format!("{i},{sigma},{j}"), &lhs.sub(&rhs));
            }
        }
    }
    let mut hh_rows = Vec::new();
    let mut hdy = Vec::new();
    for sigma in 0..m {
        for nu in 0..m {
            let lhs = lie_bracket(ctx, &frame.horizontal[sigma], &frame.horizontal[nu])?;
            let mut rhs = VectorField::zero(dim);
            for rho in 0..m {
                for k in 0..n {
                    let e = frame.horizontal[sigma].apply(ctx, h.get(rho, nu, k))
                        - frame.horizontal[nu].apply(ctx, h.get(rho, sigma, k));
                    rhs.set(ctx.dy_idx(rho, k), e);
                }
            }
            push_field(&mut hh_rows, format!("{sigma},{nu}"), &lhs.sub(&rhs));
            for j in 0..n {
                let dy = VectorField::basis(dim, ctx.dy_idx(nu, j));
                let lhs = lie_bracket(ctx, &frame.horizontal[sigma], &dy)?;
                let mut rhs = VectorField::zero(dim);
                for rho in 0..m {
                    for k in 0..n {
                        rhs.set(
                            ctx.dy_idx(rho, k),
                            -ctx.partial(h.get(rho, sigma, k), ctx.dy_idx(nu, j)),
                        );
                    }
                }
                push_field(&mut hdy, format!("{sigma},{nu},{j}"), &lhs.sub(&rhs));
            }
        }
    }
    out.push(check_zero_exprs(
        "[Gamma_i,Gamma_j] = (Gamma_i F_jk - Gamma_j F_ik) d/dy_k",
        tester,
        gg,
    ));
    out.push(check_zero_exprs(
        "[H_s,H_n] = (H_s H_nk - H_n H_sk) d/dy_k",
        tester,
        hh_rows,
    ));
    out.push(check_zero_exprs("[Gamma_i,H_s] = -H_si H + Phi_is", tester, gh));
    out.push(check_zero_exprs(
        "[Gamma_i,d/dy_j] = -delta H + (delta H - dF/dy_j) d/dy_k",
        tester,
        gdy,
    ));
    out.push(check_zero_exprs("[H_s,d/dy_j] = -dH/dy_j d/dy_k", tester, hdy));
    Ok(out)
}

fn push_field(out: &mut Vec<(String, Expr)>, label: String, u: &VectorField) {
    for (a, e) in u.comps().iter().enumerate() {
        out.push((format!("{label}:{a}"), e.clone()));
    }
}
