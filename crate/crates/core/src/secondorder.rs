//! The second-order construction: the pulled-back codistribution `ψ^σ_ij`,
//! the compatibility condition, the distribution `D₋` and its metric variant.

use std::sync::Arc;

use nalgebra::DMatrix;
use symcore::{eval, EvalError, Expr, ZeroTester};

use crate::connection::{
    guards, horizontal_coefficients, Connection, ConnectionError, HorizontalCoefficients, Slice, SplitFrame,
};
use crate::jetcalc::{contact_form, coordinate_form, interior, DiffForm, JetContext, JetError, VectorField};
use crate::oracle::{check_zero_exprs, rank, IdentityCheck, JetPoint, JetSampler, MATRIX_TOLERANCE};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum SecondOrderError {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Connection(#[from] ConnectionError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("phi must be a coordinate differential dx^a in this chart")]
    NotAdapted,
    #[error("phi must have constant coefficients for a linear change of chart")]
    NonConstantPhi,
    #[error("compatibility condition fails at {0:?}")]
    Incompatible(Vec<CompatibilityWitness>),
    #[error("metric is not symmetric at ({i},{j})")]
    NotSymmetric { i: usize, j: usize },
    #[error("metric is singular")]
    Singular,
    #[error("supplied inverse does not invert the metric at {0:?}")]
    BadInverse(Vec<String>),
    #[error("no built-in inverse for a metric of dimension {0}; supply one")]
    NeedsInverse(usize),
    #[error("metric is not normalized: g(phi, phi) = {0}")]
    NotNormalized(String),
    #[error("{what} disagrees with the first-order frame at {failures:?}")]
    Mismatch { what: &'static str, failures: Vec<String> },
}

/// `½ n(ij)`: `½` on the diagonal, `1` off it.
fn half_multiplicity(i: usize, j: usize) -> Expr {
    if i == j {
        Expr::ratio(1, 2)
    } else {
        Expr::one()
    }
}

/// The forms `ψ^σ_ij`, `i ≤ j`.
#[derive(Clone, Debug, PartialEq)]
pub struct AnnihilatorForms {
    n: usize,
    m: usize,
    forms: Vec<DiffForm>,
}

impl AnnihilatorForms {
    pub fn get(&self, sigma: usize, i: usize, j: usize) -> &DiffForm {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        let slots = self.n * (self.n + 1) / 2;
        &self.forms[sigma * slots + i * self.n - i * (i + 1) / 2 + j]
    }

    pub fn all(&self) -> &[DiffForm] {
        &self.forms
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }
}

/// `ω̄^σ_i = dy^σ_i - F^σ_ik dx^k`.
pub fn contact_bar(c: &Connection, sigma: usize, i: usize) -> DiffForm {
    let ctx = c.ctx();
    let mut parts = vec![coordinate_form(ctx, ctx.dy_idx(sigma, i))];
    for k in 0..ctx.n() {
        parts.push(coordinate_form(ctx, ctx.x_idx(k)).scale(&-c.f(sigma, i, k)));
    }
    DiffForm::sum(ctx.dim(), 1, &parts)
}

/// `ψ^σ_ij = ½n(ij)(∂φ_i/∂x^j + ∂φ_j/∂x^i)ω^σ - φ_k ∂F^σ_ij/∂y^ν_k ω^ν + φ_i ω̄^σ_j + φ_j ω̄^σ_i`.
pub fn annihilator_forms(c: &Connection, s: &Slice) -> AnnihilatorForms {
    let ctx = c.ctx();
    let (n, m, dim) = (ctx.n(), ctx.m(), ctx.dim());
    let phi = s.phi();
    let omega: Vec<DiffForm> = (0..m).map(|sg| contact_form(ctx, sg).expect("in range")).collect();
    let mut forms = Vec::new();
    for sigma in 0..m {
        for i in 0..n {
            for j in i..n {
                let sym = ctx.partial(&phi[i], ctx.x_idx(j)) + ctx.partial(&phi[j], ctx.x_idx(i));
                let mut parts = vec![omega[sigma].scale(&(half_multiplicity(i, j) * sym))];
                for (nu, w) in omega.iter().enumerate() {
                    let coeff = Expr::sum((0..n).map(|k| &phi[k] * c.df(sigma, i, j, ctx.dy_idx(nu, k))));
                    parts.push(w.scale(&-coeff));
                }
                parts.push(contact_bar(c, sigma, j).scale(&phi[i]));
                parts.push(contact_bar(c, sigma, i).scale(&phi[j]));
                forms.push(DiffForm::sum(dim, 1, &parts));
            }
        }
    }
    AnnihilatorForms { n, m, forms }
}

/// A failing entry `∂F^σ_pq/∂y^ν_a ≠ 0`, one-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompatibilityWitness {
    pub sigma: usize,
    pub p: usize,
    pub q: usize,
    pub nu: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Compatibility {
    pub compatible: bool,
    pub witnesses: Vec<CompatibilityWitness>,
}

/// `∂F^σ_pq/∂y^ν_a = 0` for all `p, q ≠ a`, in a chart where `φ = dx^a`.
pub fn check_compatibility(c: &Connection, s: &Slice, tester: &ZeroTester) -> Result<Compatibility, SecondOrderError> {
    let a = s.adapted_index().ok_or(SecondOrderError::NotAdapted)?;
    let ctx = c.ctx();
    let (n, m) = (ctx.n(), ctx.m());
    let mut witnesses = Vec::new();
    for sigma in 0..m {
        for p in (0..n).filter(|&p| p != a) {
            for q in (p..n).filter(|&q| q != a) {
                for nu in 0..m {
                    let d = c.df(sigma, p, q, ctx.dy_idx(nu, a));
                    if !d.is_zero() && !tester.check(&d)?.is_zero {
                        witnesses.push(CompatibilityWitness {
                            sigma: sigma + 1,
                            p: p + 1,
                            q: q + 1,
                            nu: nu + 1,
                        });
                    }
                }
            }
        }
    }
    Ok(Compatibility {
        compatible: witnesses.is_empty(),
        witnesses,
    })
}

/// A linear change of base chart `u^a = φ_i x^i`, `u^p = x^p` for constant `φ`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearChart {
    /// `∂x^i/∂u^k`, indexed `[i][k]`.
    pub to_old: Vec<Vec<Expr>>,
    /// `∂u^k/∂x^i`, indexed `[k][i]`.
    pub to_new: Vec<Vec<Expr>>,
    pub adapted: usize,
}

impl LinearChart {
    pub fn new(phi: &[Expr]) -> Result<Self, SecondOrderError> {
        if phi.iter().any(|e| e.as_const().is_none()) {
            return Err(SecondOrderError::NonConstantPhi);
        }
        let n = phi.len();
        let a = phi.iter().position(|e| !e.is_zero()).ok_or(ConnectionError::ZeroPhi)?;
        let delta = |i: usize, k: usize| if i == k { Expr::one() } else { Expr::zero() };
        let to_new: Vec<Vec<Expr>> = (0..n)
            .map(|k| {
                (0..n)
                    .map(|i| if k == a { phi[i].clone() } else { delta(k, i) })
                    .collect()
            })
            .collect();
        let inv = phi[a].recip();
        let to_old: Vec<Vec<Expr>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|k| {
                        if i != a {
                            delta(i, k)
                        } else if k == a {
                            inv.clone()
                        } else {
                            -(&phi[k] * &inv)
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(LinearChart {
            to_old,
            to_new,
            adapted: a,
        })
    }

    /// Rewrite the connection and slice in the new chart, reusing the symbol names.
    pub fn transform(
        &self,
        c: &Connection,
        s: &Slice,
        tester: &ZeroTester,
    ) -> Result<(Connection, Slice), SecondOrderError> {
        let ctx = c.ctx();
        let (n, m) = (ctx.n(), ctx.m());
        let mut map = Vec::new();
        for i in 0..n {
            let x = Expr::sum((0..n).map(|k| &self.to_old[i][k] * ctx.x(k)));
            map.push((ctx.coord(ctx.x_idx(i)).clone(), x));
        }
        for sigma in 0..m {
            for i in 0..n {
                let d = Expr::sum((0..n).map(|k| &self.to_new[k][i] * ctx.dy(sigma, k)));
                map.push((ctx.coord(ctx.dy_idx(sigma, i)).clone(), d));
            }
        }
        let pulled: Vec<Vec<Vec<Expr>>> = (0..m)
            .map(|sg| {
                (0..n)
                    .map(|i| (0..n).map(|j| c.f(sg, i, j).subst(&map)).collect())
                    .collect()
            })
            .collect();
        let conn = Connection::new(ctx.clone(), |sg, k, l| {
            let mut terms = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    let w = &self.to_old[i][k] * &self.to_old[j][l];
                    if !w.is_zero() {
                        terms.push(w * &pulled[sg][i][j]);
                    }
                }
            }
            Expr::sum(terms)
        });
        let phi: Vec<Expr> = (0..n)
            .map(|k| if k == self.adapted { Expr::one() } else { Expr::zero() })
            .collect();
        let v: Vec<Expr> = (0..n)
            .map(|k| Expr::sum((0..n).map(|i| &self.to_new[k][i] * s.v()[i].subst(&map))))
            .collect();
        let slice = Slice::new(ctx, phi, v, tester)?;
        Ok((conn, slice))
    }
}

/// Compatibility for constant `φ`, after moving to a chart where `φ = du^a`.
pub fn check_compatibility_linear(
    c: &Connection,
    s: &Slice,
    tester: &ZeroTester,
) -> Result<Compatibility, SecondOrderError> {
    if s.adapted_index().is_some() {
        return check_compatibility(c, s, tester);
    }
    let chart = LinearChart::new(s.phi())?;
    let (c2, s2) = chart.transform(c, s, tester)?;
    check_compatibility(&c2, &s2, tester)
}

/// `H^ν_{σk} = ½ n(ak) ∂F^ν_{ak}/∂y^σ_a` in a chart where `φ = dx^a`.
pub fn d_minus_coefficients(c: &Connection, s: &Slice) -> Result<HorizontalCoefficients, SecondOrderError> {
    let a = s.adapted_index().ok_or(SecondOrderError::NotAdapted)?;
    let ctx = c.ctx();
    Ok(HorizontalCoefficients::from_fn(ctx.n(), ctx.m(), |nu, sigma, k| {
        half_multiplicity(a, k) * c.df(nu, a, k, ctx.dy_idx(sigma, a))
    }))
}

/// Frame built on `D₋`; refuses incompatible input and checks agreement
/// with the first-order horizontal fields for the slice's `v`.
pub fn d_minus_frame(c: &Connection, s: &Slice, tester: &ZeroTester) -> Result<SplitFrame, SecondOrderError> {
    let compat = check_compatibility(c, s, tester)?;
    if !compat.compatible {
        return Err(SecondOrderError::Incompatible(compat.witnesses));
    }
    let h = d_minus_coefficients(c, s)?;
    let first = horizontal_coefficients(c, s, tester)?;
    let check = check_zero_exprs("D- = first order", tester, h.differences(&first));
    if !check.passed {
        return Err(SecondOrderError::Mismatch {
            what: "D- coefficients",
            failures: check.failures,
        });
    }
    Ok(SplitFrame::with_coefficients(c, s, h, tester)?)
}

/// `i_U ψ^σ_ij = 0` for `U` in `{H_σ, Γ_i}` of the frame.
pub fn d_minus_membership(frame: &SplitFrame, forms: &AnnihilatorForms, tester: &ZeroTester) -> IdentityCheck {
    let ctx = frame.ctx();
    let mut items = Vec::new();
    let fields = frame
        .horizontal
        .iter()
        .enumerate()
        .map(|(k, u)| (format!("H_{}", k + 1), u))
        .chain(
            frame
                .gamma
                .iter()
                .enumerate()
                .map(|(k, u)| (format!("Gamma_{}", k + 1), u)),
        );
    for (label, u) in fields {
        for (r, f) in forms.all().iter().enumerate() {
            let value = interior(ctx, u, f).expect("degree 1").value().clone();
            items.push((format!("{label} psi#{r}"), value));
        }
    }
    check_zero_exprs("D- membership", tester, items)
}

/// Rank of the `(x, y)` block of `{H_σ, Γ_i}` at a point; `m + n` means
/// the span has rank `m + n` and meets `Vπ₁,₀` trivially.
pub fn d_minus_rank(frame: &SplitFrame, point: &JetPoint) -> Result<usize, EvalError> {
    let ctx = frame.ctx();
    let (n, m) = (ctx.n(), ctx.m());
    let fields: Vec<&VectorField> = frame.horizontal.iter().chain(frame.gamma.iter()).collect();
    let mut mat = DMatrix::zeros(n + m, fields.len());
    for (col, u) in fields.iter().enumerate() {
        for row in 0..n + m {
            mat[(row, col)] = eval(u.comp(row), &point.0)?;
        }
    }
    Ok(rank(&mat, MATRIX_TOLERANCE))
}

/// Rank of the span of all `ψ^σ_ij` at a point.
pub fn annihilator_rank(ctx: &JetContext, forms: &AnnihilatorForms, point: &JetPoint) -> Result<usize, EvalError> {
    let dim = ctx.dim();
    let mut mat = DMatrix::zeros(forms.all().len(), dim);
    for (r, f) in forms.all().iter().enumerate() {
        for a in 0..dim {
            let e = f.comp(a);
            if !e.is_zero() {
                mat[(r, a)] = eval(e, &point.0)?;
            }
        }
    }
    Ok(rank(&mat, MATRIX_TOLERANCE))
}

/// A symmetric metric in a subset of the jet coordinates (base or fibre).
#[derive(Clone, Debug)]
pub struct BaseMetric {
    ctx: Arc<JetContext>,
    coords: Vec<usize>,
    g: Vec<Vec<Expr>>,
    inv: Vec<Vec<Expr>>,
}

fn determinant(m: &[Vec<Expr>]) -> Expr {
    match m.len() {
        0 => Expr::one(),
        1 => m[0][0].clone(),
        n => Expr::sum((0..n).map(|j| {
            let sign = if j % 2 == 0 { Expr::one() } else { Expr::int(-1) };
            sign * &m[0][j] * determinant(&minor(m, 0, j))
        })),
    }
}

fn minor(m: &[Vec<Expr>], r: usize, c: usize) -> Vec<Vec<Expr>> {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != r)
        .map(|(_, row)| {
            row.iter()
                .enumerate()
                .filter(|(j, _)| *j != c)
                .map(|(_, e)| e.clone())
                .collect()
        })
        .collect()
}

/// Inverse by adjugate over determinant.
fn adjugate_inverse(m: &[Vec<Expr>]) -> Result<Vec<Vec<Expr>>, SecondOrderError> {
    let n = m.len();
    let det = determinant(m);
    if det.is_zero() {
        return Err(SecondOrderError::Singular);
    }
    let inv_det = det.recip();
    Ok((0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let sign = if (i + j) % 2 == 0 { Expr::one() } else { Expr::int(-1) };
                    (sign * determinant(&minor(m, j, i)) * &inv_det).simplify()
                })
                .collect()
        })
        .collect())
}

pub const MAX_ADJUGATE_DIM: usize = 4;

impl BaseMetric {
    /// Metric `g_ij` in the coordinates `coords` (indices into the context);
    /// the inverse is computed for dimension up to [`MAX_ADJUGATE_DIM`].
    pub fn new(
        ctx: Arc<JetContext>,
        coords: Vec<usize>,
        g: Vec<Vec<Expr>>,
        tester: &ZeroTester,
    ) -> Result<Self, SecondOrderError> {
        let d = coords.len();
        if d > MAX_ADJUGATE_DIM {
            return Err(SecondOrderError::NeedsInverse(d));
        }
        Self::check_shape(&g, d)?;
        let inv = adjugate_inverse(&g)?;
        let metric = BaseMetric { ctx, coords, g, inv };
        metric.check_nonsingular(tester)?;
        Ok(metric)
    }

    /// Metric with a user-supplied inverse, validated by `g·g⁻¹ = I`.
    pub fn with_inverse(
        ctx: Arc<JetContext>,
        coords: Vec<usize>,
        g: Vec<Vec<Expr>>,
        inv: Vec<Vec<Expr>>,
        tester: &ZeroTester,
    ) -> Result<Self, SecondOrderError> {
        let d = coords.len();
        Self::check_shape(&g, d)?;
        Self::check_shape(&inv, d)?;
        let metric = BaseMetric { ctx, coords, g, inv };
        let mut items = Vec::new();
        for i in 0..d {
            for j in 0..d {
                let delta = if i == j { Expr::one() } else { Expr::zero() };
                let e = Expr::sum((0..d).map(|k| &metric.g[i][k] * &metric.inv[k][j])) - delta;
                items.push((format!("({},{})", i + 1, j + 1), e));
            }
        }
        let check = check_zero_exprs("g g^-1 = I", tester, items);
        if !check.passed {
            return Err(SecondOrderError::BadInverse(check.failures));
        }
        Ok(metric)
    }

    /// Metric on the base, given by its contravariant form `g^ij`.
    pub fn from_inverse(
        ctx: Arc<JetContext>,
        inv: Vec<Vec<Expr>>,
        tester: &ZeroTester,
    ) -> Result<Self, SecondOrderError> {
        let coords: Vec<usize> = (0..ctx.n()).map(|i| ctx.x_idx(i)).collect();
        let d = coords.len();
        if d > MAX_ADJUGATE_DIM {
            return Err(SecondOrderError::NeedsInverse(d));
        }
        Self::check_shape(&inv, d)?;
        let g = adjugate_inverse(&inv)?;
        let metric = BaseMetric { ctx, coords, g, inv };
        metric.check_nonsingular(tester)?;
        Ok(metric)
    }

    /// Metric on the base coordinates.
    pub fn on_base(ctx: Arc<JetContext>, g: Vec<Vec<Expr>>, tester: &ZeroTester) -> Result<Self, SecondOrderError> {
        let coords = (0..ctx.n()).map(|i| ctx.x_idx(i)).collect();
        Self::new(ctx, coords, g, tester)
    }

    /// Metric on the fibre coordinates.
    pub fn on_fibre(ctx: Arc<JetContext>, g: Vec<Vec<Expr>>, tester: &ZeroTester) -> Result<Self, SecondOrderError> {
        let coords = (0..ctx.m()).map(|s| ctx.y_idx(s)).collect();
        Self::new(ctx, coords, g, tester)
    }

    fn check_shape(g: &[Vec<Expr>], d: usize) -> Result<(), SecondOrderError> {
        if g.len() != d || g.iter().any(|r| r.len() != d) {
            return Err(JetError::DimensionMismatch {
                expected: d,
                found: g.len(),
            }
            .into());
        }
        for i in 0..d {
            for j in i + 1..d {
                if g[i][j] != g[j][i] {
                    return Err(SecondOrderError::NotSymmetric { i: i + 1, j: j + 1 });
                }
            }
        }
        Ok(())
    }

    fn check_nonsingular(&self, tester: &ZeroTester) -> Result<(), SecondOrderError> {
        let det = determinant(&self.g);
        if det.as_const().is_some() {
            return if det.is_zero() {
                Err(SecondOrderError::Singular)
            } else {
                Ok(())
            };
        }
        let mut sampler = JetSampler::new(&self.ctx, vec![det], tester.seed);
        for _ in 0..tester.probes {
            sampler.next_point().map_err(|_| SecondOrderError::Singular)?;
        }
        Ok(())
    }

    pub fn ctx(&self) -> &Arc<JetContext> {
        &self.ctx
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Context index of the `i`-th metric coordinate.
    pub fn coord(&self, i: usize) -> usize {
        self.coords[i]
    }

    pub fn g(&self, i: usize, j: usize) -> &Expr {
        &self.g[i][j]
    }

    pub fn inv(&self, i: usize, j: usize) -> &Expr {
        &self.inv[i][j]
    }

    /// `v^i = g^{ij} φ_j`.
    pub fn sharp(&self, phi: &[Expr]) -> Vec<Expr> {
        (0..self.dim())
            .map(|i| Expr::sum((0..self.dim()).map(|j| &self.inv[i][j] * &phi[j])))
            .collect()
    }
}

/// Outcome of the metric reduction.
#[derive(Clone, Debug)]
pub struct MetricReduction {
    pub frame: SplitFrame,
    /// The horizontal coefficients read off the reduced codistribution.
    pub coefficients: HorizontalCoefficients,
    /// `ψ^σ_a - g^{ap}g^{aq}ψ^σ_pq` and `ψ^σ_ap + g^{aq}ψ^σ_pq`, which annihilate the `H_σ`.
    pub reduced_forms: Vec<DiffForm>,
    /// Annihilation check for the combinations `ψ^σ_aa + ½g^{ap}g^{aq}ψ^σ_pq`, `ψ^σ_ap - g^{aq}ψ^σ_pq`.
    pub alternative_check: IdentityCheck,
    /// Annihilation check for [`MetricReduction::reduced_forms`].
    pub reduced_check: IdentityCheck,
}

/// `H^ν_{σa} = ½(∂F^ν_aa/∂y^σ_a - g^{ap}g^{aq}∂F^ν_pq/∂y^σ_a)`,
/// `H^ν_{σq} = ∂F^ν_aq/∂y^σ_a + g^{ap}∂F^ν_pq/∂y^σ_a`, with `p, q ≠ a`.
pub fn metric_coefficients(c: &Connection, a: usize, g: &BaseMetric) -> HorizontalCoefficients {
    let ctx = c.ctx();
    let (n, m) = (ctx.n(), ctx.m());
    let others: Vec<usize> = (0..n).filter(|&p| p != a).collect();
    HorizontalCoefficients::from_fn(n, m, |nu, sigma, k| {
        let dfa = |i: usize, j: usize| c.df(nu, i, j, ctx.dy_idx(sigma, a));
        if k == a {
            let mut terms = vec![dfa(a, a)];
            for &p in &others {
                for &q in &others {
                    terms.push(-(g.inv(a, p) * g.inv(a, q) * dfa(p, q)));
                }
            }
            Expr::ratio(1, 2) * Expr::sum(terms)
        } else {
            let mut terms = vec![dfa(a, k)];
            for &p in &others {
                terms.push(g.inv(a, p) * dfa(p, k));
            }
            Expr::sum(terms)
        }
    })
}

/// Reduce the codistribution with a metric normalized by `g(φ, φ) = 1`;
/// `v = g♯(φ)`. The coefficients must coincide with the first-order ones.
pub fn metric_reduction(
    c: &Connection,
    phi: Vec<Expr>,
    g: &BaseMetric,
    tester: &ZeroTester,
) -> Result<MetricReduction, SecondOrderError> {
    let ctx = c.ctx();
    let norm = Expr::sum(
        (0..ctx.n())
            .flat_map(|i| (0..ctx.n()).map(move |j| (i, j)))
            .map(|(i, j)| g.inv(i, j) * &phi[i] * &phi[j]),
    );
    let residual = &norm - Expr::one();
    if !residual.is_zero() && !tester.check(&residual)?.is_zero {
        return Err(SecondOrderError::NotNormalized(norm.to_string()));
    }
    let v = g.sharp(&phi);
    let s = Slice::new(ctx, phi, v, tester)?;
    let a = s.adapted_index().ok_or(SecondOrderError::NotAdapted)?;
    let coefficients = metric_coefficients(c, a, g);
    let first = horizontal_coefficients(c, &s, tester)?;
    let check = check_zero_exprs("metric = first order", tester, coefficients.differences(&first));
    if !check.passed {
        return Err(SecondOrderError::Mismatch {
            what: "metric-reduced coefficients",
            failures: check.failures,
        });
    }
    let frame = SplitFrame::with_coefficients(c, &s, coefficients.clone(), tester)?;

    let forms = annihilator_forms(c, &s);
    let n = ctx.n();
    let others: Vec<usize> = (0..n).filter(|&p| p != a).collect();
    let combine = |sigma: usize, scale_a: Expr, scale_p: Expr| -> Vec<DiffForm> {
        let mut out = Vec::new();
        let mut parts = vec![forms.get(sigma, a, a).clone()];
        for &p in &others {
            for &q in &others {
                let w = &scale_a * g.inv(a, p) * g.inv(a, q);
                parts.push(forms.get(sigma, p, q).scale(&w));
            }
        }
        out.push(DiffForm::sum(ctx.dim(), 1, &parts));
        for &p in &others {
            let mut parts = vec![forms.get(sigma, a, p).clone()];
            for &q in &others {
                parts.push(forms.get(sigma, p, q).scale(&(&scale_p * g.inv(a, q))));
            }
            out.push(DiffForm::sum(ctx.dim(), 1, &parts));
        }
        out
    };
    let mut reduced_forms = Vec::new();
    let mut alternative = Vec::new();
    for sigma in 0..ctx.m() {
        reduced_forms.extend(combine(sigma, Expr::int(-1), Expr::one()));
        alternative.extend(combine(sigma, Expr::ratio(1, 2), Expr::int(-1)));
    }
    let annihilates = |name: &str, fs: &[DiffForm]| {
        let mut items = Vec::new();
        for (k, u) in frame.horizontal.iter().chain(frame.gamma.iter()).enumerate() {
            for (r, f) in fs.iter().enumerate() {
                items.push((
                    format!("field#{k} form#{r}"),
                    interior(ctx, u, f).expect("degree 1").value().clone(),
                ));
            }
        }
        check_zero_exprs(name, tester, items)
    };
    let reduced_check = annihilates("reduced forms annihilate D_g", &reduced_forms);
    let alternative_check = annihilates("half-weight combinations annihilate D_g", &alternative);
    Ok(MetricReduction {
        frame,
        coefficients,
        reduced_forms,
        alternative_check,
        reduced_check,
    })
}

/// Probe points for a connection and slice.
pub fn probe_points(c: &Connection, s: &Slice, count: usize, seed: u64) -> Result<Vec<JetPoint>, EvalError> {
    let mut sampler = JetSampler::new(c.ctx(), guards(c, s), seed);
    (0..count).map(|_| sampler.next_point()).collect()
}
