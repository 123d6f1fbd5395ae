//! Second-order connections, slices `(φ, v)`, the eigen-splitting of
//! `L_{Γ_v} S₁^φ` and the adapted frame of the resulting decomposition.

use std::sync::Arc;

use symcore::{eval, EvalError, Expr, ZeroTester};

use crate::jetcalc::{
    contact_form, coordinate_form, fn_bracket, interior, interior_vvf, lie_derivative_vvf, vvf_compose, DiffForm,
    JetContext, JetError, VectorField, VectorValuedForm,
};
use crate::oracle::{
    assemble, check_equal_vvf, check_spectrum, check_zero_exprs, check_zero_field, IdentityCheck, JetPoint, JetSampler,
    MatrixCheckReport,
};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ConnectionError {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("{what}[{index}] must depend on base coordinates only")]
    NotBaseFunction { what: &'static str, index: usize },
    #[error("phi is not closed: d phi has a nonzero ({i},{j}) component")]
    NotClosed { i: usize, j: usize },
    #[error("i_v phi vanishes")]
    Degenerate,
    #[error("the slice must be normalized so that i_v phi = 1")]
    NotNormalized,
    #[error("phi has no nonvanishing component")]
    ZeroPhi,
    #[error("eigen-equation fails: {0}")]
    Eigen(String),
    #[error("frame/coframe verification fails: {0}")]
    Frame(String),
}

/// The functions `F^σ_ij` of a system `∂²y^σ/∂x^i∂x^j = F^σ_ij`.
#[derive(Clone, Debug)]
pub struct Connection {
    ctx: Arc<JetContext>,
    entries: Vec<Expr>,
}

fn pair_slots(n: usize) -> usize {
    n * (n + 1) / 2
}

impl Connection {
    /// `f(σ, i, j)` supplies the entry for `i ≤ j` (zero-based).
    pub fn new(ctx: Arc<JetContext>, f: impl Fn(usize, usize, usize) -> Expr) -> Self {
        let n = ctx.n();
        let mut entries = vec![Expr::zero(); ctx.m() * pair_slots(n)];
        for s in 0..ctx.m() {
            for i in 0..n {
                for j in i..n {
                    entries[s * pair_slots(n) + upper_slot(n, i, j)] = f(s, i, j).simplify();
                }
            }
        }
        Connection { ctx, entries }
    }

    pub fn zero(ctx: Arc<JetContext>) -> Self {
        Self::new(ctx, |_, _, _| Expr::zero())
    }

    pub fn ctx(&self) -> &Arc<JetContext> {
        &self.ctx
    }

    /// `F^σ_ij`, symmetric in `i, j`.
    pub fn f(&self, sigma: usize, i: usize, j: usize) -> &Expr {
        let n = self.ctx.n();
        &self.entries[sigma * pair_slots(n) + upper_slot(n, i, j)]
    }

    /// `∂F^σ_ij/∂z^a`.
    pub fn df(&self, sigma: usize, i: usize, j: usize, a: usize) -> Expr {
        self.ctx.partial(self.f(sigma, i, j), a)
    }

    /// `Γ_i = ∂/∂x^i + y^σ_i ∂/∂y^σ + F^σ_ij ∂/∂y^σ_j`.
    pub fn gamma_fields(&self) -> Vec<VectorField> {
        let ctx = &self.ctx;
        (0..ctx.n())
            .map(|i| {
                let mut u = VectorField::zero(ctx.dim());
                u.set(ctx.x_idx(i), Expr::one());
                for s in 0..ctx.m() {
                    u.set(ctx.y_idx(s), ctx.dy(s, i));
                    for j in 0..ctx.n() {
                        u.set(ctx.dy_idx(s, j), self.f(s, i, j).clone());
                    }
                }
                u
            })
            .collect()
    }

    /// `Γ = dx^i ⊗ Γ_i`.
    pub fn gamma_form(&self) -> VectorValuedForm {
        let ctx = &self.ctx;
        let terms: Vec<(DiffForm, VectorField)> = self
            .gamma_fields()
            .into_iter()
            .enumerate()
            .map(|(i, g)| (coordinate_form(ctx, ctx.x_idx(i)), g))
            .collect();
        VectorValuedForm::from_terms(ctx.dim(), 1, &terms)
    }

    /// `Γ_v = v^i Γ_i`.
    pub fn gamma_along(&self, v: &[Expr]) -> VectorField {
        let fields = self.gamma_fields();
        let terms: Vec<(Expr, &VectorField)> = v.iter().cloned().zip(fields.iter()).collect();
        VectorField::combination(self.ctx.dim(), &terms)
    }

    /// Entries with their `(σ, i, j)` labels, `i ≤ j`.
    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize, usize), &Expr)> {
        let n = self.ctx.n();
        (0..self.ctx.m()).flat_map(move |s| (0..n).flat_map(move |i| (i..n).map(move |j| ((s, i, j), self.f(s, i, j)))))
    }
}

/// Position of `(i, j)` with `i ≤ j` in row-major upper-triangular order.
fn upper_slot(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + j
}

/// A closed base 1-form `φ` and a transverse base vector field `v`.
#[derive(Clone, Debug, PartialEq)]
pub struct Slice {
    phi: Vec<Expr>,
    v: Vec<Expr>,
    normalized: bool,
}

impl Slice {
    /// Validates and rescales `v` so that `i_v φ = 1`.
    pub fn new(ctx: &JetContext, phi: Vec<Expr>, v: Vec<Expr>, tester: &ZeroTester) -> Result<Self, ConnectionError> {
        let s = Self::unnormalized(ctx, phi, v, tester)?;
        let p = s.pairing();
        if p.is_one() {
            return Ok(Slice { normalized: true, ..s });
        }
        let inv = p.recip();
        let v = s.v.iter().map(|c| (c * &inv).simplify()).collect();
        Ok(Slice {
            phi: s.phi,
            v,
            normalized: true,
        })
    }

    /// Validates without rescaling `v`.
    pub fn unnormalized(
        ctx: &JetContext,
        phi: Vec<Expr>,
        v: Vec<Expr>,
        tester: &ZeroTester,
    ) -> Result<Self, ConnectionError> {
        let n = ctx.n();
        for (what, comps) in [("phi", &phi), ("v", &v)] {
            if comps.len() != n {
                return Err(JetError::DimensionMismatch {
                    expected: n,
                    found: comps.len(),
                }
                .into());
            }
            if let Some(index) = comps.iter().position(|e| !ctx.is_base_function(e)) {
                return Err(ConnectionError::NotBaseFunction { what, index: index + 1 });
            }
        }
        if phi.iter().all(Expr::is_zero) {
            return Err(ConnectionError::ZeroPhi);
        }
        for i in 0..n {
            for j in i + 1..n {
                let curl = ctx.partial(&phi[j], ctx.x_idx(i)) - ctx.partial(&phi[i], ctx.x_idx(j));
                if !curl.is_zero() && !tester.check(&curl)?.is_zero {
                    return Err(ConnectionError::NotClosed { i: i + 1, j: j + 1 });
                }
            }
        }
        let s = Slice {
            phi: phi.into_iter().map(|e| e.simplify()).collect(),
            v: v.into_iter().map(|e| e.simplify()).collect(),
            normalized: false,
        };
        let p = s.pairing();
        if p.is_zero() {
            return Err(ConnectionError::Degenerate);
        }
        if !p.is_one() {
            // nonvanishing at the probe points
            let mut sampler = JetSampler::new(ctx, vec![p.clone()], tester.seed);
            for _ in 0..tester.probes {
                sampler.next_point().map_err(|_| ConnectionError::Degenerate)?;
            }
        }
        let normalized = p.is_one();
        Ok(Slice { normalized, ..s })
    }

    pub fn phi(&self) -> &[Expr] {
        &self.phi
    }

    pub fn v(&self) -> &[Expr] {
        &self.v
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// `i_v φ = v^i φ_i`.
    pub fn pairing(&self) -> Expr {
        Expr::sum(self.phi.iter().zip(&self.v).map(|(a, b)| a * b))
    }

    /// `Some(a)` when `φ = dx^a` exactly.
    pub fn adapted_index(&self) -> Option<usize> {
        let a = self.phi.iter().position(|e| !e.is_zero())?;
        (self.phi[a].is_one() && self.phi.iter().skip(a + 1).all(Expr::is_zero)).then_some(a)
    }
}

/// `S₁^φ = φ_k ω^σ ⊗ ∂/∂y^σ_k`.
pub fn s1_phi(c: &Connection, s: &Slice) -> VectorValuedForm {
    let ctx = c.ctx();
    let dim = ctx.dim();
    let mut terms = Vec::new();
    for sigma in 0..ctx.m() {
        let w = contact_form(ctx, sigma).expect("index in range");
        for k in 0..ctx.n() {
            if !s.phi[k].is_zero() {
                terms.push((w.scale(&s.phi[k]), VectorField::basis(dim, ctx.dy_idx(sigma, k))));
            }
        }
    }
    VectorValuedForm::from_terms(dim, 1, &terms)
}

/// `L_{Γ_v} S₁^φ`.
pub fn deformation(c: &Connection, s: &Slice) -> VectorValuedForm {
    lie_derivative_vvf(c.ctx(), &c.gamma_along(&s.v), &s1_phi(c, s))
}

/// The coordinate expression of `[[Γ, S₁^φ]]`:
/// `-φ_i dx^i ∧ ω^ν ⊗ ∂/∂y^ν + dx^i ∧ (φ_k dy^ν_i + ∂φ_k/∂x^i ω^ν - φ_j ∂F^ν_ik/∂y^σ_j ω^σ) ⊗ ∂/∂y^ν_k`.
pub fn gamma_s1_display(c: &Connection, s: &Slice) -> VectorValuedForm {
    let ctx = c.ctx();
    let (n, m, dim) = (ctx.n(), ctx.m(), ctx.dim());
    let dx: Vec<DiffForm> = (0..n).map(|i| coordinate_form(ctx, ctx.x_idx(i))).collect();
    let omega: Vec<DiffForm> = (0..m).map(|sg| contact_form(ctx, sg).expect("in range")).collect();
    let phi_dx = DiffForm::sum(
        dim,
        1,
        &dx.iter().zip(&s.phi).map(|(d, p)| d.scale(p)).collect::<Vec<_>>(),
    );
    let mut terms = Vec::new();
    for nu in 0..m {
        terms.push((
            phi_dx.wedge(&omega[nu]).expect("1-forms").neg(),
            VectorField::basis(dim, ctx.y_idx(nu)),
        ));
        for k in 0..n {
            for i in 0..n {
                let mut parts = vec![coordinate_form(ctx, ctx.dy_idx(nu, i)).scale(&s.phi[k])];
                parts.push(omega[nu].scale(&ctx.partial(&s.phi[k], ctx.x_idx(i))));
                for (sigma, w) in omega.iter().enumerate() {
                    let coeff = Expr::sum((0..n).map(|j| &s.phi[j] * c.df(nu, i, k, ctx.dy_idx(sigma, j))));
                    parts.push(w.scale(&-coeff));
                }
                let inner = DiffForm::sum(dim, 1, &parts);
                terms.push((
                    dx[i].wedge(&inner).expect("1-forms"),
                    VectorField::basis(dim, ctx.dy_idx(nu, k)),
                ));
            }
        }
    }
    VectorValuedForm::from_terms(dim, 2, &terms)
}

/// `[[Γ, S₁^φ]]` against its coordinate expression, and
/// `i_{Γ_v}[[Γ, S₁^φ]] = L_{Γ_v} S₁^φ`.
pub fn check_deformation_bracket(c: &Connection, s: &Slice, tester: &ZeroTester) -> Vec<IdentityCheck> {
    let ctx = c.ctx();
    let bracket = match fn_bracket(ctx, &c.gamma_form(), &s1_phi(c, s)) {
        Ok(b) => b,
        Err(e) => return vec![IdentityCheck::failed("[[Gamma,S1]]", e.to_string())],
    };
    let display = check_equal_vvf(
        ctx,
        "[[Gamma,S1]] coordinate expression",
        tester,
        &bracket,
        &gamma_s1_display(c, s),
    );
    let interior = match interior_vvf(ctx, &c.gamma_along(&s.v), &bracket) {
        Ok(contracted) => check_equal_vvf(
            ctx,
            "i_{Gamma_v}[[Gamma,S1]] = L_{Gamma_v}S1",
            tester,
            &contracted,
            &deformation(c, s),
        ),
        Err(e) => IdentityCheck::failed("i_{Gamma_v}[[Gamma,S1]] = L_{Gamma_v}S1", e.to_string()),
    };
    vec![display, interior]
}

/// Table `H^ν_{σk}` of the horizontal fields `H_σ = ∂/∂y^σ + H^ν_{σk} ∂/∂y^ν_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct HorizontalCoefficients {
    n: usize,
    m: usize,
    table: Vec<Expr>,
}

impl HorizontalCoefficients {
    pub fn from_fn(n: usize, m: usize, f: impl Fn(usize, usize, usize) -> Expr) -> Self {
        let mut table = Vec::with_capacity(m * m * n);
        for nu in 0..m {
            for sigma in 0..m {
                for k in 0..n {
                    table.push(f(nu, sigma, k).simplify());
                }
            }
        }
        HorizontalCoefficients { n, m, table }
    }

    /// `H^ν_{σk}`.
    pub fn get(&self, nu: usize, sigma: usize, k: usize) -> &Expr {
        &self.table[(nu * self.m + sigma) * self.n + k]
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Labelled differences, for zero checks.
    pub fn differences(&self, other: &HorizontalCoefficients) -> Vec<(String, Expr)> {
        let mut out = Vec::new();
        for nu in 0..self.m {
            for sigma in 0..self.m {
                for k in 0..self.n {
                    out.push((
                        format!("H[{}][{}][{}]", nu + 1, sigma + 1, k + 1),
                        self.get(nu, sigma, k) - other.get(nu, sigma, k),
                    ));
                }
            }
        }
        out
    }
}

/// The general-coordinate solution of the `-1` eigen-equation:
/// `A^ν_{σk} = v^i(φ_j ∂F^ν_{ik}/∂y^σ_j - δ^ν_σ ∂φ_k/∂x^i)`,
/// `H^ν_{σk} = A^ν_{σk} - ½ φ_k v^l A^ν_{σl}`. Needs `i_v φ = 1`.
pub fn horizontal_formula(c: &Connection, s: &Slice) -> Result<HorizontalCoefficients, ConnectionError> {
    if !s.normalized {
        return Err(ConnectionError::NotNormalized);
    }
    let ctx = c.ctx();
    let (n, m) = (ctx.n(), ctx.m());
    let a = |nu: usize, sigma: usize, k: usize| -> Expr {
        let mut terms = Vec::new();
        for i in 0..n {
            if s.v[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if s.phi[j].is_zero() {
                    continue;
                }
                let d = c.df(nu, i, k, ctx.dy_idx(sigma, j));
                if !d.is_zero() {
                    terms.push(&s.v[i] * &s.phi[j] * d);
                }
            }
            if nu == sigma {
                let dphi = ctx.partial(&s.phi[k], ctx.x_idx(i));
                if !dphi.is_zero() {
                    terms.push(-(&s.v[i] * dphi));
                }
            }
        }
        Expr::sum(terms)
    };
    let a_table = HorizontalCoefficients::from_fn(n, m, a);
    let half = Expr::ratio(1, 2);
    Ok(HorizontalCoefficients::from_fn(n, m, |nu, sigma, k| {
        let trace = Expr::sum((0..n).map(|l| &s.v[l] * a_table.get(nu, sigma, l)));
        a_table.get(nu, sigma, k) - &half * &s.phi[k] * trace
    }))
}

/// Horizontal coefficients, checked against the eigen-equation `L(H_σ) = -H_σ`.
pub fn horizontal_coefficients(
    c: &Connection,
    s: &Slice,
    tester: &ZeroTester,
) -> Result<HorizontalCoefficients, ConnectionError> {
    let h = horizontal_formula(c, s)?;
    let l = deformation(c, s);
    let ctx = c.ctx();
    for sigma in 0..ctx.m() {
        let hs = horizontal_field(ctx, &h, sigma);
        let check = check_zero_field(ctx, "eigen", tester, &l.apply(ctx, &hs).add(&hs));
        if !check.passed {
            return Err(ConnectionError::Eigen(format!(
                "H_{} at {:?}",
                sigma + 1,
                check.failures
            )));
        }
    }
    Ok(h)
}

/// `H_σ = ∂/∂y^σ + H^ν_{σk} ∂/∂y^ν_k`.
pub fn horizontal_field(ctx: &JetContext, h: &HorizontalCoefficients, sigma: usize) -> VectorField {
    let mut u = VectorField::zero(ctx.dim());
    u.set(ctx.y_idx(sigma), Expr::one());
    for nu in 0..ctx.m() {
        for k in 0..ctx.n() {
            u.set(ctx.dy_idx(nu, k), h.get(nu, sigma, k).clone());
        }
    }
    u
}

/// Frame and coframe adapted to `TJ¹π = D₋ ⊕ D_Γ ⊕ (D₀ ∩ Vπ₁,₀) ⊕ D₊`, with
/// the projectors of the three- and fourfold splittings.
#[derive(Clone, Debug)]
pub struct SplitFrame {
    conn: Connection,
    slice: Slice,
    coeffs: HorizontalCoefficients,
    pivot: usize,
    pub horizontal: Vec<VectorField>,
    pub gamma: Vec<VectorField>,
    /// `W^p_ν` for `p ≠ pivot`, `ν`-major.
    pub tilde: Vec<VectorField>,
    /// `E_ν = φ_j ∂/∂y^ν_j`.
    pub plus: Vec<VectorField>,
    pub omega: Vec<DiffForm>,
    pub dx: Vec<DiffForm>,
    /// `ψ^ν_k`, `ν`-major.
    pub psi: Vec<DiffForm>,
    /// Duals of `W^p_ν`.
    pub tilde_forms: Vec<DiffForm>,
    /// `v^k ψ^ν_k`.
    pub plus_forms: Vec<DiffForm>,
    pub h_proj: VectorValuedForm,
    pub gamma_proj: VectorValuedForm,
    pub v_proj: VectorValuedForm,
    pub v_tilde: VectorValuedForm,
    pub v_plus: VectorValuedForm,
}

impl SplitFrame {
    /// First-order frame: coefficients from [`horizontal_coefficients`].
    pub fn build(c: &Connection, s: &Slice, tester: &ZeroTester) -> Result<Self, ConnectionError> {
        let h = horizontal_coefficients(c, s, tester)?;
        Self::with_coefficients(c, s, h, tester)
    }

    /// Frame for given horizontal coefficients; duality and projector algebra are verified.
    pub fn with_coefficients(
        c: &Connection,
        s: &Slice,
        coeffs: HorizontalCoefficients,
        tester: &ZeroTester,
    ) -> Result<Self, ConnectionError> {
        if !s.normalized {
            return Err(ConnectionError::NotNormalized);
        }
        let frame = Self::assemble(c, s, coeffs, tester)?;
        for check in frame.verify(tester) {
            if !check.passed {
                return Err(ConnectionError::Frame(format!(
                    "{} at {:?}",
                    check.name, check.failures
                )));
            }
        }
        Ok(frame)
    }

    fn assemble(
        c: &Connection,
        s: &Slice,
        coeffs: HorizontalCoefficients,
        tester: &ZeroTester,
    ) -> Result<Self, ConnectionError> {
        let ctx = c.ctx().clone();
        let (n, m, dim) = (ctx.n(), ctx.m(), ctx.dim());
        let pivot = choose_pivot(&ctx, s, tester)?;

        let horizontal: Vec<VectorField> = (0..m).map(|sg| horizontal_field(&ctx, &coeffs, sg)).collect();
        let gamma = c.gamma_fields();
        let plus: Vec<VectorField> = (0..m)
            .map(|nu| {
                let mut u = VectorField::zero(dim);
                for j in 0..n {
                    u.set(ctx.dy_idx(nu, j), s.phi[j].clone());
                }
                u
            })
            .collect();
        let mut tilde = Vec::new();
        for nu in 0..m {
            for p in (0..n).filter(|&p| p != pivot) {
                let mut u = VectorField::basis(dim, ctx.dy_idx(nu, p));
                u = u.sub(&plus[nu].scale(&s.v[p]));
                tilde.push(u);
            }
        }

        let omega: Vec<DiffForm> = (0..m).map(|sg| contact_form(&ctx, sg).expect("in range")).collect();
        let dx: Vec<DiffForm> = (0..n).map(|i| coordinate_form(&ctx, ctx.x_idx(i))).collect();
        let mut psi = Vec::new();
        for nu in 0..m {
            for k in 0..n {
                let mut parts = vec![coordinate_form(&ctx, ctx.dy_idx(nu, k))];
                for i in 0..n {
                    parts.push(dx[i].scale(&-c.f(nu, k, i)));
                }
                for sg in 0..m {
                    parts.push(omega[sg].scale(&-coeffs.get(nu, sg, k)));
                }
                psi.push(DiffForm::sum(dim, 1, &parts));
            }
        }
        let psi_at = |nu: usize, k: usize| &psi[nu * n + k];
        let ratio_base = s.phi[pivot].recip();
        let mut tilde_forms = Vec::new();
        for nu in 0..m {
            for p in (0..n).filter(|&p| p != pivot) {
                let r = &s.phi[p] * &ratio_base;
                tilde_forms.push(psi_at(nu, p).sub(&psi_at(nu, pivot).scale(&r)));
            }
        }
        let plus_forms: Vec<DiffForm> = (0..m)
            .map(|nu| {
                let parts: Vec<DiffForm> = (0..n).map(|k| psi_at(nu, k).scale(&s.v[k])).collect();
                DiffForm::sum(dim, 1, &parts)
            })
            .collect();

        let pairs = |forms: &[DiffForm], fields: &[VectorField]| -> VectorValuedForm {
            let terms: Vec<(DiffForm, VectorField)> = forms.iter().cloned().zip(fields.iter().cloned()).collect();
            VectorValuedForm::from_terms(dim, 1, &terms)
        };
        let h_proj = pairs(&omega, &horizontal);
        let gamma_proj = pairs(&dx, &gamma);
        let fibre_fields: Vec<VectorField> = (0..m)
            .flat_map(|nu| (0..n).map(move |k| (nu, k)))
            .map(|(nu, k)| VectorField::basis(dim, ctx.dy_idx(nu, k)))
            .collect();
        let v_proj = pairs(&psi, &fibre_fields);
        let v_plus = pairs(&plus_forms, &plus);
        let v_tilde = v_proj.sub(&v_plus);

        Ok(SplitFrame {
            conn: c.clone(),
            slice: s.clone(),
            coeffs,
            pivot,
            horizontal,
            gamma,
            tilde,
            plus,
            omega,
            dx,
            psi,
            tilde_forms,
            plus_forms,
            h_proj,
            gamma_proj,
            v_proj,
            v_tilde,
            v_plus,
        })
    }

    pub fn ctx(&self) -> &JetContext {
        self.conn.ctx()
    }

    pub fn connection(&self) -> &Connection {
        &self.conn
    }

    pub fn slice(&self) -> &Slice {
        &self.slice
    }

    pub fn coefficients(&self) -> &HorizontalCoefficients {
        &self.coeffs
    }

    /// Base index singled out for the `W^p_ν` block (`1` in adapted charts).
    pub fn pivot(&self) -> usize {
        self.pivot
    }

    /// `{H_σ, Γ_i, W^p_ν, E_ν}`.
    pub fn frame(&self) -> Vec<VectorField> {
        let mut out = self.horizontal.clone();
        out.extend(self.gamma.iter().cloned());
        out.extend(self.tilde.iter().cloned());
        out.extend(self.plus.iter().cloned());
        out
    }

    /// `{ω^σ, dx^i, θ^ν_p, v^k ψ^ν_k}`, dual to [`SplitFrame::frame`].
    pub fn coframe(&self) -> Vec<DiffForm> {
        let mut out = self.omega.clone();
        out.extend(self.dx.iter().cloned());
        out.extend(self.tilde_forms.iter().cloned());
        out.extend(self.plus_forms.iter().cloned());
        out
    }

    pub fn psi(&self, nu: usize, k: usize) -> &DiffForm {
        &self.psi[nu * self.ctx().n() + k]
    }

    /// Duality, completeness and the projector algebra.
    pub fn verify(&self, tester: &ZeroTester) -> Vec<IdentityCheck> {
        let ctx = self.ctx();
        let dim = ctx.dim();
        let frame = self.frame();
        let coframe = self.coframe();
        let mut pairing = Vec::new();
        for (r, f) in coframe.iter().enumerate() {
            for (col, u) in frame.iter().enumerate() {
                let value = interior(ctx, u, f).expect("degree 1").value().clone();
                let delta = if r == col { Expr::one() } else { Expr::zero() };
                pairing.push((format!("<{r},{col}>"), value - delta));
            }
        }
        let id = VectorValuedForm::identity(dim);
        let total = VectorValuedForm::sum(dim, 1, &[&self.h_proj, &self.gamma_proj, &self.v_proj]);
        let tilde_pairs: Vec<(DiffForm, VectorField)> = self
            .tilde_forms
            .iter()
            .cloned()
            .zip(self.tilde.iter().cloned())
            .collect();
        let tilde_direct = VectorValuedForm::from_terms(dim, 1, &tilde_pairs);
        let mut out = vec![
            check_zero_exprs("frame/coframe duality", tester, pairing),
            check_equal_vvf(ctx, "h + Gamma + v = id", tester, &total, &id),
            check_equal_vvf(ctx, "v_tilde = theta (x) W", tester, &self.v_tilde, &tilde_direct),
        ];
        let projs = [
            ("h", &self.h_proj),
            ("Gamma", &self.gamma_proj),
            ("v_tilde", &self.v_tilde),
            ("v_plus", &self.v_plus),
        ];
        for (i, (na, a)) in projs.iter().enumerate() {
            for (j, (nb, b)) in projs.iter().enumerate() {
                let prod = vvf_compose(ctx, a, b).expect("degree 1");
                let name = format!("{na} o {nb}");
                out.push(if i == j {
                    check_equal_vvf(ctx, name, tester, &prod, a)
                } else {
                    crate::oracle::check_zero_vvf(ctx, name, tester, &prod)
                });
            }
        }
        out
    }

    /// Eigenvalues on the frame: `-1` on `H_σ`, `+1` on `E_ν`, `0` on `Γ_i` and `W^p_ν`.
    pub fn eigen_checks(&self, tester: &ZeroTester) -> Vec<IdentityCheck> {
        let ctx = self.ctx();
        let l = deformation(&self.conn, &self.slice);
        let residual = |fields: &[VectorField], lambda: i64| -> VectorField {
            // stack the residuals of all fields
            let mut comps = Vec::new();
            for u in fields {
                let r = l.apply(ctx, u).sub(&u.scale(&Expr::int(lambda)));
                comps.extend(r.comps().iter().cloned());
            }
            VectorField::new(comps)
        };
        let run = |name: &str, fields: &[VectorField], lambda: i64| {
            let r = residual(fields, lambda);
            check_zero_exprs(
                name,
                tester,
                r.comps().iter().enumerate().map(|(k, e)| (format!("#{k}"), e.clone())),
            )
        };
        vec![
            run("L H = -H", &self.horizontal, -1),
            run("L E = E", &self.plus, 1),
            run("L Gamma = 0", &self.gamma, 0),
            run("L W = 0", &self.tilde, 0),
        ]
    }
}

fn choose_pivot(ctx: &JetContext, s: &Slice, tester: &ZeroTester) -> Result<usize, ConnectionError> {
    if let Some(k) = s.phi.iter().position(|e| e.as_const().is_some() && !e.is_zero()) {
        return Ok(k);
    }
    for (k, e) in s.phi.iter().enumerate() {
        if e.is_zero() {
            continue;
        }
        let mut sampler = JetSampler::new(ctx, vec![e.clone()], tester.seed);
        if (0..tester.probes).all(|_| sampler.next_point().is_ok()) {
            return Ok(k);
        }
    }
    Err(ConnectionError::ZeroPhi)
}

/// Numeric certificate of the three-eigenvalue structure at one point.
pub fn verify_eigensplitting(
    c: &Connection,
    s: &Slice,
    point: &JetPoint,
    tol: f64,
) -> Result<MatrixCheckReport, ConnectionError> {
    if !s.normalized {
        return Err(ConnectionError::NotNormalized);
    }
    let l = deformation(c, s);
    let matrix = assemble(&l, point)?;
    Ok(check_spectrum(&matrix, c.ctx().m(), tol))
}

/// Denominators that must stay away from zero for the system and slice.
pub fn guards(c: &Connection, s: &Slice) -> Vec<Expr> {
    let mut out = Vec::new();
    let mut collect = |e: &Expr| collect_denominators(e, &mut out);
    for (_, e) in c.entries() {
        collect(e);
    }
    for e in s.phi.iter().chain(&s.v) {
        collect(e);
    }
    out.sort();
    out.dedup();
    out
}

fn collect_denominators(e: &Expr, out: &mut Vec<Expr>) {
    use symcore::Node;
    match e.node() {
        Node::Const(_) | Node::Sym(_) => {}
        Node::Sum(v) | Node::Product(v) => v.iter().for_each(|c| collect_denominators(c, out)),
        Node::Pow(b, k) => {
            if *k < 0 {
                out.push(b.clone());
            }
            collect_denominators(b, out);
        }
        Node::Func(_, a) => collect_denominators(a, out),
    }
}

/// Evaluate `e` at `p`, mapping domain failures to the connection error.
pub fn eval_at(e: &Expr, p: &JetPoint) -> Result<f64, ConnectionError> {
    Ok(eval(e, &p.0)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn upper_slots_are_dense() {
        for n in 1..5 {
            let mut k = 0;
            for i in 0..n {
                for j in i..n {
                    assert_eq!(upper_slot(n, i, j), k);
                    assert_eq!(upper_slot(n, j, i), k);
                    k += 1;
                }
            }
        }
    }
}
