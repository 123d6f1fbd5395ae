//! Calculus on the first jet manifold in the coordinate (co)frame.
//!
//! Coordinates are ordered `x^1..x^n, y^1..y^m, y^1_1..y^1_n, .., y^m_n`.
//! Two-forms keep their strictly upper triangle over that order, with
//! `(a ∧ b)(U, W) = a(U) b(W) - a(W) b(U)`, so the stored entry for the pair
//! `(a, b)` is the value on `(∂_a, ∂_b)`.

use std::fmt;

use symcore::{diff, parse, Expr, ParseError, Role, Symbol, SymbolError, SymbolTable};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum JetError {
    #[error(transparent)]
    Symbol(#[from] SymbolError),
    #[error("{what} index {index} out of range 1..={bound}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        bound: usize,
    },
    #[error("expected {expected} components, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("form degree {0} is not supported here")]
    UnsupportedDegree(usize),
    #[error("base and fibre dimensions must be positive")]
    EmptyDimension,
}

/// Dimensions and coordinate names of `J¹π`.
#[derive(Debug)]
pub struct JetContext {
    n: usize,
    m: usize,
    symbols: SymbolTable,
    coords: Vec<Symbol>,
}

impl JetContext {
    /// Derivative coordinates are named `{y}_{x}`, e.g. `r_t`.
    pub fn new(base: &[&str], fibre: &[&str]) -> Result<Self, JetError> {
        if base.is_empty() || fibre.is_empty() {
            return Err(JetError::EmptyDimension);
        }
        let mut symbols = SymbolTable::new();
        let mut coords = Vec::new();
        for x in base {
            coords.push(symbols.register(x, Role::BaseCoordinate)?);
        }
        for y in fibre {
            coords.push(symbols.register(y, Role::FibreCoordinate)?);
        }
        for y in fibre {
            for x in base {
                coords.push(symbols.register(&format!("{y}_{x}"), Role::DerivativeCoordinate)?);
            }
        }
        Ok(JetContext {
            n: base.len(),
            m: fibre.len(),
            symbols,
            coords,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `n + m + nm`.
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn symbols(&self) -> &SymbolTable {
        &self.symbols
    }

    /// Registers an extra symbol (a free parameter of the system).
    pub fn add_parameter(&mut self, name: &str) -> Result<Symbol, JetError> {
        Ok(self.symbols.register(name, Role::Parameter)?)
    }

    pub fn parse(&self, text: &str) -> Result<Expr, ParseError> {
        parse(text, &self.symbols)
    }

    // zero-based frame positions

    pub fn x_idx(&self, i: usize) -> usize {
        debug_assert!(i < self.n);
        i
    }

    pub fn y_idx(&self, s: usize) -> usize {
        debug_assert!(s < self.m);
        self.n + s
    }

    pub fn dy_idx(&self, s: usize, i: usize) -> usize {
        debug_assert!(s < self.m && i < self.n);
        self.n + self.m + s * self.n + i
    }

    pub fn coord(&self, a: usize) -> &Symbol {
        &self.coords[a]
    }

    pub fn coords(&self) -> &[Symbol] {
        &self.coords
    }

    pub fn base_coords(&self) -> &[Symbol] {
        &self.coords[..self.n]
    }

    pub fn fibre_coords(&self) -> &[Symbol] {
        &self.coords[self.n..self.n + self.m]
    }

    pub fn x(&self, i: usize) -> Expr {
        Expr::sym(&self.coords[self.x_idx(i)])
    }

    pub fn y(&self, s: usize) -> Expr {
        Expr::sym(&self.coords[self.y_idx(s)])
    }

    pub fn dy(&self, s: usize, i: usize) -> Expr {
        Expr::sym(&self.coords[self.dy_idx(s, i)])
    }

    pub fn name(&self, a: usize) -> &str {
        self.coords[a].name()
    }

    /// True when `e` involves base coordinates (and parameters) only.
    pub fn is_base_function(&self, e: &Expr) -> bool {
        self.coords[self.n..].iter().all(|s| !e.depends_on(s))
    }

    /// `∂e/∂z^a`.
    pub fn partial(&self, e: &Expr, a: usize) -> Expr {
        diff(e, &self.coords[a])
    }

    pub fn check_index(&self, what: &'static str, index: usize, bound: usize) -> Result<(), JetError> {
        if index < bound {
            Ok(())
        } else {
            Err(JetError::IndexOutOfRange {
                what,
                index: index + 1,
                bound,
            })
        }
    }
}

/// Position of the pair `a < b` in the strictly upper triangle of a `dim × dim` table.
pub fn pair_index(dim: usize, a: usize, b: usize) -> usize {
    debug_assert!(a < b && b < dim);
    a * dim - a * (a + 1) / 2 + (b - a - 1)
}

fn pair_count(dim: usize) -> usize {
    dim * dim.saturating_sub(1) / 2
}

fn nonzero_sum(terms: Vec<Expr>) -> Expr {
    Expr::sum(terms.into_iter().filter(|t| !t.is_zero()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    comps: Vec<Expr>,
}

impl VectorField {
    pub fn new(comps: Vec<Expr>) -> Self {
        VectorField { comps }
    }

    pub fn zero(dim: usize) -> Self {
        VectorField {
            comps: vec![Expr::zero(); dim],
        }
    }

    /// The coordinate field `∂/∂z^a`.
    pub fn basis(dim: usize, a: usize) -> Self {
        let mut v = Self::zero(dim);
        v.comps[a] = Expr::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn comps(&self) -> &[Expr] {
        &self.comps
    }

    pub fn comp(&self, a: usize) -> &Expr {
        &self.comps[a]
    }

    pub fn set(&mut self, a: usize, e: Expr) {
        self.comps[a] = e;
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Expr::is_zero)
    }

    /// `U(f) = U^a ∂f/∂z^a`.
    pub fn apply(&self, ctx: &JetContext, f: &Expr) -> Expr {
        nonzero_sum(
            self.comps
                .iter()
                .enumerate()
                .filter(|(_, u)| !u.is_zero())
                .map(|(a, u)| u * ctx.partial(f, a))
                .collect(),
        )
    }

    pub fn add(&self, other: &VectorField) -> VectorField {
        VectorField::new(self.comps.iter().zip(&other.comps).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &VectorField) -> VectorField {
        VectorField::new(self.comps.iter().zip(&other.comps).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, f: &Expr) -> VectorField {
        VectorField::new(self.comps.iter().map(|a| a * f).collect())
    }

    /// `Σ f_k U_k`.
    pub fn combination(dim: usize, terms: &[(Expr, &VectorField)]) -> VectorField {
        let comps = (0..dim)
            .map(|a| {
                nonzero_sum(
                    terms
                        .iter()
                        .filter(|(f, u)| !f.is_zero() && !u.comps[a].is_zero())
                        .map(|(f, u)| f * &u.comps[a])
                        .collect(),
                )
            })
            .collect();
        VectorField::new(comps)
    }

    /// Jacobian `∂_a U^c`, indexed `[c][a]`.
    fn jacobian(&self, ctx: &JetContext) -> Vec<Vec<Expr>> {
        self.comps
            .iter()
            .map(|u| (0..ctx.dim()).map(|a| ctx.partial(u, a)).collect())
            .collect()
    }
}

pub fn lie_bracket(ctx: &JetContext, u: &VectorField, w: &VectorField) -> Result<VectorField, JetError> {
    same_dim(ctx, u.dim())?;
    same_dim(ctx, w.dim())?;
    let comps = (0..ctx.dim())
        .map(|a| u.apply(ctx, &w.comps[a]) - w.apply(ctx, &u.comps[a]))
        .collect();
    Ok(VectorField::new(comps))
}

fn same_dim(ctx: &JetContext, found: usize) -> Result<(), JetError> {
    if found == ctx.dim() {
        Ok(())
    } else {
        Err(JetError::DimensionMismatch {
            expected: ctx.dim(),
            found,
        })
    }
}

/// A differential form of degree 0, 1 or 2 in the coordinate coframe.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffForm {
    degree: usize,
    dim: usize,
    comps: Vec<Expr>,
}

impl DiffForm {
    pub fn zero(dim: usize, degree: usize) -> Self {
        let len = match degree {
            0 => 1,
            1 => dim,
            _ => pair_count(dim),
        };
        DiffForm {
            degree,
            dim,
            comps: vec![Expr::zero(); len],
        }
    }

    pub fn function(dim: usize, f: Expr) -> Self {
        DiffForm {
            degree: 0,
            dim,
            comps: vec![f],
        }
    }

    pub fn one_form(comps: Vec<Expr>) -> Self {
        DiffForm {
            degree: 1,
            dim: comps.len(),
            comps,
        }
    }

    /// `dz^a`.
    pub fn basis(dim: usize, a: usize) -> Self {
        let mut f = Self::zero(dim, 1);
        f.comps[a] = Expr::one();
        f
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Raw storage: the value, the 1-form components, or the upper triangle.
    pub fn comps(&self) -> &[Expr] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Expr::is_zero)
    }

    pub fn value(&self) -> &Expr {
        debug_assert_eq!(self.degree, 0);
        &self.comps[0]
    }

    pub fn comp(&self, a: usize) -> &Expr {
        debug_assert_eq!(self.degree, 1);
        &self.comps[a]
    }

    /// Full antisymmetric entry `α(∂_a, ∂_b)`.
    pub fn entry(&self, a: usize, b: usize) -> Expr {
        debug_assert_eq!(self.degree, 2);
        match a.cmp(&b) {
            std::cmp::Ordering::Less => self.comps[pair_index(self.dim, a, b)].clone(),
            std::cmp::Ordering::Greater => -&self.comps[pair_index(self.dim, b, a)],
            std::cmp::Ordering::Equal => Expr::zero(),
        }
    }

    pub fn set_entry(&mut self, a: usize, b: usize, e: Expr) {
        debug_assert!(self.degree == 2 && a < b);
        self.comps[pair_index(self.dim, a, b)] = e;
    }

    fn map(&self, f: impl Fn(&Expr) -> Expr) -> DiffForm {
        DiffForm {
            degree: self.degree,
            dim: self.dim,
            comps: self.comps.iter().map(f).collect(),
        }
    }

    fn zip(&self, other: &DiffForm, f: impl Fn(&Expr, &Expr) -> Expr) -> DiffForm {
        assert_eq!(self.degree, other.degree, "degree mismatch");
        DiffForm {
            degree: self.degree,
            dim: self.dim,
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn add(&self, other: &DiffForm) -> DiffForm {
        self.zip(other, |a, b| {
            if b.is_zero() {
                a.clone()
            } else if a.is_zero() {
                b.clone()
            } else {
                a + b
            }
        })
    }

    pub fn sub(&self, other: &DiffForm) -> DiffForm {
        self.zip(other, |a, b| if b.is_zero() { a.clone() } else { a - b })
    }

    pub fn scale(&self, f: &Expr) -> DiffForm {
        if f.is_one() {
            return self.clone();
        }
        self.map(|a| if a.is_zero() { Expr::zero() } else { a * f })
    }

    pub fn neg(&self) -> DiffForm {
        self.map(|a| -a)
    }

    pub fn simplify(&self) -> DiffForm {
        self.map(Expr::simplify)
    }

    /// Sum of many forms of equal degree, one canonicalization per component.
    pub fn sum(dim: usize, degree: usize, forms: &[DiffForm]) -> DiffForm {
        let mut out = DiffForm::zero(dim, degree);
        for (k, slot) in out.comps.iter_mut().enumerate() {
            *slot = nonzero_sum(forms.iter().map(|f| f.comps[k].clone()).collect());
        }
        out
    }

    /// Exterior product; the total degree must stay ≤ 2.
    pub fn wedge(&self, other: &DiffForm) -> Result<DiffForm, JetError> {
        let degree = self.degree + other.degree;
        if degree > 2 {
            return Err(JetError::UnsupportedDegree(degree));
        }
        if self.degree == 0 {
            return Ok(other.scale(self.value()));
        }
        if other.degree == 0 {
            return Ok(self.scale(other.value()));
        }
        let mut out = DiffForm::zero(self.dim, 2);
        let a_nz: Vec<usize> = (0..self.dim).filter(|&a| !self.comps[a].is_zero()).collect();
        let b_nz: Vec<usize> = (0..self.dim).filter(|&b| !other.comps[b].is_zero()).collect();
        let mut acc: std::collections::BTreeMap<usize, Vec<Expr>> = Default::default();
        for &a in &a_nz {
            for &b in &b_nz {
                if a == b {
                    continue;
                }
                let t = &self.comps[a] * &other.comps[b];
                let (lo, hi, t) = if a < b { (a, b, t) } else { (b, a, -t) };
                acc.entry(pair_index(self.dim, lo, hi)).or_default().push(t);
            }
        }
        for (k, terms) in acc {
            out.comps[k] = Expr::sum(terms);
        }
        Ok(out)
    }
}

/// Exterior derivative of a 0- or 1-form.
pub fn exterior_d(ctx: &JetContext, alpha: &DiffForm) -> Result<DiffForm, JetError> {
    let dim = ctx.dim();
    match alpha.degree {
        0 => Ok(DiffForm::one_form(
            (0..dim).map(|a| ctx.partial(alpha.value(), a)).collect(),
        )),
        1 => {
            let grads: Vec<Vec<Expr>> = alpha
                .comps
                .iter()
                .map(|c| {
                    if c.is_zero() {
                        vec![Expr::zero(); dim]
                    } else {
                        (0..dim).map(|a| ctx.partial(c, a)).collect()
                    }
                })
                .collect();
            let mut out = DiffForm::zero(dim, 2);
            for a in 0..dim {
                for b in a + 1..dim {
                    // ∂_a α_b - ∂_b α_a
                    let v = &grads[b][a] - &grads[a][b];
                    out.comps[pair_index(dim, a, b)] = v;
                }
            }
            Ok(out)
        }
        d => Err(JetError::UnsupportedDegree(d + 1)),
    }
}

/// Contraction in the first slot.
pub fn interior(ctx: &JetContext, u: &VectorField, alpha: &DiffForm) -> Result<DiffForm, JetError> {
    let dim = ctx.dim();
    match alpha.degree {
        0 => Err(JetError::UnsupportedDegree(0)),
        1 => Ok(DiffForm::function(
            dim,
            nonzero_sum(
                (0..dim)
                    .filter(|&a| !u.comps[a].is_zero() && !alpha.comps[a].is_zero())
                    .map(|a| &u.comps[a] * &alpha.comps[a])
                    .collect(),
            ),
        )),
        _ => {
            let support: Vec<usize> = (0..dim).filter(|&a| !u.comps[a].is_zero()).collect();
            let comps = (0..dim)
                .map(|b| {
                    nonzero_sum(
                        support
                            .iter()
                            .filter(|&&a| a != b)
                            .map(|&a| {
                                let e = alpha.entry(a, b);
                                if e.is_zero() {
                                    e
                                } else {
                                    &u.comps[a] * e
                                }
                            })
                            .collect(),
                    )
                })
                .collect();
            Ok(DiffForm::one_form(comps))
        }
    }
}

/// Lie derivative of a form along a vector field.
pub fn lie_derivative(ctx: &JetContext, u: &VectorField, alpha: &DiffForm) -> DiffForm {
    let dim = ctx.dim();
    match alpha.degree {
        0 => DiffForm::function(dim, u.apply(ctx, alpha.value())),
        1 => {
            let jac = u.jacobian(ctx);
            let comps = (0..dim)
                .map(|a| {
                    let mut terms = vec![u.apply(ctx, &alpha.comps[a])];
                    for b in 0..dim {
                        if !alpha.comps[b].is_zero() && !jac[b][a].is_zero() {
                            terms.push(&alpha.comps[b] * &jac[b][a]);
                        }
                    }
                    nonzero_sum(terms)
                })
                .collect();
            DiffForm::one_form(comps)
        }
        _ => {
            let jac = u.jacobian(ctx);
            let mut out = DiffForm::zero(dim, 2);
            for a in 0..dim {
                for b in a + 1..dim {
                    let k = pair_index(dim, a, b);
                    let mut terms = vec![u.apply(ctx, &alpha.comps[k])];
                    for c in 0..dim {
                        if !jac[c][a].is_zero() {
                            let e = alpha.entry(c, b);
                            if !e.is_zero() {
                                terms.push(e * &jac[c][a]);
                            }
                        }
                        if !jac[c][b].is_zero() {
                            let e = alpha.entry(a, c);
                            if !e.is_zero() {
                                terms.push(e * &jac[c][b]);
                            }
                        }
                    }
                    out.comps[k] = nonzero_sum(terms);
                }
            }
            out
        }
    }
}

/// Lie derivative along the coordinate field `∂/∂z^c`: differentiate every coefficient.
fn coordinate_lie(ctx: &JetContext, c: usize, alpha: &DiffForm) -> DiffForm {
    alpha.map(|e| ctx.partial(e, c))
}

/// A vector-valued form: one [`DiffForm`] per coordinate direction.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorValuedForm {
    degree: usize,
    forms: Vec<DiffForm>,
}

impl VectorValuedForm {
    pub fn zero(dim: usize, degree: usize) -> Self {
        VectorValuedForm {
            degree,
            forms: vec![DiffForm::zero(dim, degree); dim],
        }
    }

    pub fn from_forms(forms: Vec<DiffForm>) -> Self {
        let degree = forms.first().map_or(0, DiffForm::degree);
        assert!(forms.iter().all(|f| f.degree == degree && f.dim == forms.len()));
        VectorValuedForm { degree, forms }
    }

    /// `Σ α_k ⊗ U_k`.
    pub fn from_terms(dim: usize, degree: usize, terms: &[(DiffForm, VectorField)]) -> Self {
        let forms = (0..dim)
            .map(|c| {
                let parts: Vec<DiffForm> = terms
                    .iter()
                    .filter(|(_, u)| !u.comps[c].is_zero())
                    .map(|(f, u)| f.scale(&u.comps[c]))
                    .collect();
                DiffForm::sum(dim, degree, &parts)
            })
            .collect();
        VectorValuedForm { degree, forms }
    }

    /// The identity endomorphism `dz^a ⊗ ∂/∂z^a`.
    pub fn identity(dim: usize) -> Self {
        VectorValuedForm {
            degree: 1,
            forms: (0..dim).map(|a| DiffForm::basis(dim, a)).collect(),
        }
    }

    pub fn from_vector_field(u: &VectorField) -> Self {
        let dim = u.dim();
        VectorValuedForm {
            degree: 0,
            forms: u.comps.iter().map(|c| DiffForm::function(dim, c.clone())).collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.forms.len()
    }

    /// The form multiplying `∂/∂z^c`.
    pub fn form(&self, c: usize) -> &DiffForm {
        &self.forms[c]
    }

    pub fn forms(&self) -> &[DiffForm] {
        &self.forms
    }

    pub fn is_zero(&self) -> bool {
        self.forms.iter().all(DiffForm::is_zero)
    }

    /// For degree 1: the coefficient of `dz^d ⊗ ∂/∂z^c`.
    pub fn entry1(&self, c: usize, d: usize) -> &Expr {
        self.forms[c].comp(d)
    }

    /// For degree 2: the value on `(∂_a, ∂_b)` in direction `c`.
    pub fn entry2(&self, c: usize, a: usize, b: usize) -> Expr {
        self.forms[c].entry(a, b)
    }

    pub fn add(&self, other: &VectorValuedForm) -> VectorValuedForm {
        VectorValuedForm {
            degree: self.degree,
            forms: self.forms.iter().zip(&other.forms).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, other: &VectorValuedForm) -> VectorValuedForm {
        VectorValuedForm {
            degree: self.degree,
            forms: self.forms.iter().zip(&other.forms).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn scale(&self, f: &Expr) -> VectorValuedForm {
        VectorValuedForm {
            degree: self.degree,
            forms: self.forms.iter().map(|a| a.scale(f)).collect(),
        }
    }

    pub fn neg(&self) -> VectorValuedForm {
        VectorValuedForm {
            degree: self.degree,
            forms: self.forms.iter().map(DiffForm::neg).collect(),
        }
    }

    pub fn sum(dim: usize, degree: usize, parts: &[&VectorValuedForm]) -> VectorValuedForm {
        let forms = (0..dim)
            .map(|c| {
                let fs: Vec<DiffForm> = parts.iter().map(|p| p.forms[c].clone()).collect();
                DiffForm::sum(dim, degree, &fs)
            })
            .collect();
        VectorValuedForm { degree, forms }
    }

    /// Apply a vector-valued 0-form as the vector field it is.
    pub fn as_vector_field(&self) -> VectorField {
        assert_eq!(self.degree, 0);
        VectorField::new(self.forms.iter().map(|f| f.value().clone()).collect())
    }

    /// Evaluate a degree-1 form on a vector field.
    pub fn apply(&self, ctx: &JetContext, u: &VectorField) -> VectorField {
        assert_eq!(self.degree, 1);
        VectorField::new(
            self.forms
                .iter()
                .map(|f| interior(ctx, u, f).expect("degree 1").value().clone())
                .collect(),
        )
    }
}

impl fmt::Display for VectorValuedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dim = self.dim();
        let mut first = true;
        for (c, form) in self.forms.iter().enumerate() {
            for (k, e) in form.comps.iter().enumerate() {
                if e.is_zero() {
                    continue;
                }
                if !first {
                    writeln!(f)?;
                }
                first = false;
                match self.degree {
                    0 => write!(f, "[{c}] {e}")?,
                    1 => write!(f, "[{c}; {k}] {e}")?,
                    _ => {
                        let (a, b) = pair_of(dim, k);
                        write!(f, "[{c}; {a},{b}] {e}")?
                    }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Inverse of [`pair_index`].
pub fn pair_of(dim: usize, k: usize) -> (usize, usize) {
    let mut a = 0;
    let mut start = 0;
    loop {
        let row = dim - a - 1;
        if k < start + row {
            return (a, a + 1 + (k - start));
        }
        start += row;
        a += 1;
    }
}

/// Contract a vector field into every form of `a`.
pub fn interior_vvf(ctx: &JetContext, u: &VectorField, a: &VectorValuedForm) -> Result<VectorValuedForm, JetError> {
    if a.degree == 0 {
        return Err(JetError::UnsupportedDegree(0));
    }
    let forms = a
        .forms
        .iter()
        .map(|f| interior(ctx, u, f))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(VectorValuedForm {
        degree: a.degree - 1,
        forms,
    })
}

/// `A ∘ B` for a pointwise endomorphism `A`: `(A∘B)^c = A^c_d B^d`.
pub fn vvf_compose(ctx: &JetContext, a: &VectorValuedForm, b: &VectorValuedForm) -> Result<VectorValuedForm, JetError> {
    if a.degree != 1 {
        return Err(JetError::UnsupportedDegree(a.degree));
    }
    let dim = ctx.dim();
    let forms = (0..dim)
        .map(|c| {
            let parts: Vec<DiffForm> = (0..dim)
                .filter(|&d| !a.forms[c].comps[d].is_zero() && !b.forms[d].is_zero())
                .map(|d| b.forms[d].scale(&a.forms[c].comps[d]))
                .collect();
            DiffForm::sum(dim, b.degree, &parts)
        })
        .collect();
    Ok(VectorValuedForm {
        degree: b.degree,
        forms,
    })
}

/// `L_U A`, treating `A` as a tensor field.
pub fn lie_derivative_vvf(ctx: &JetContext, u: &VectorField, a: &VectorValuedForm) -> VectorValuedForm {
    let dim = ctx.dim();
    let jac = u.jacobian(ctx);
    let lied: Vec<DiffForm> = a.forms.iter().map(|f| lie_derivative(ctx, u, f)).collect();
    let forms = (0..dim)
        .map(|b| {
            let mut parts = vec![lied[b].clone()];
            for c in 0..dim {
                if !jac[b][c].is_zero() && !a.forms[c].is_zero() {
                    parts.push(a.forms[c].scale(&jac[b][c]).neg());
                }
            }
            DiffForm::sum(dim, a.degree, &parts)
        })
        .collect();
    VectorValuedForm {
        degree: a.degree,
        forms,
    }
}

/// Frölicher–Nijenhuis bracket, expanded over the coordinate decomposition
/// `A = α_c ⊗ ∂_c`, `B = β_d ⊗ ∂_d` of both arguments.
pub fn fn_bracket(ctx: &JetContext, a: &VectorValuedForm, b: &VectorValuedForm) -> Result<VectorValuedForm, JetError> {
    let dim = ctx.dim();
    let (da, db) = (a.degree, b.degree);
    let degree = da + db;
    if degree > 2 {
        return Err(JetError::UnsupportedDegree(degree));
    }
    let sign = if da % 2 == 0 { Expr::one() } else { Expr::int(-1) };
    let mut parts: Vec<Vec<DiffForm>> = vec![Vec::new(); dim];

    let d_alpha: Vec<Option<DiffForm>> = a
        .forms
        .iter()
        .map(|f| (da < 2 && db > 0 && !f.is_zero()).then(|| exterior_d(ctx, f).expect("degree ≤ 1")))
        .collect();
    let d_beta: Vec<Option<DiffForm>> = b
        .forms
        .iter()
        .map(|f| (db < 2 && da > 0 && !f.is_zero()).then(|| exterior_d(ctx, f).expect("degree ≤ 1")))
        .collect();

    for c in 0..dim {
        let alpha = &a.forms[c];
        if alpha.is_zero() {
            continue;
        }
        for d in 0..dim {
            let beta = &b.forms[d];
            if beta.is_zero() {
                continue;
            }
            // α ∧ L_{∂c} β ⊗ ∂_d
            let l_beta = coordinate_lie(ctx, c, beta);
            if !l_beta.is_zero() {
                parts[d].push(alpha.wedge(&l_beta)?);
            }
            // - L_{∂d} α ∧ β ⊗ ∂_c
            let l_alpha = coordinate_lie(ctx, d, alpha);
            if !l_alpha.is_zero() {
                parts[c].push(l_alpha.wedge(beta)?.neg());
            }
            // (-1)^a dα ∧ i_{∂c} β ⊗ ∂_d
            if db > 0 {
                if let Some(dal) = &d_alpha[c] {
                    let i_beta = interior(ctx, &VectorField::basis(dim, c), beta)?;
                    if !i_beta.is_zero() && !dal.is_zero() {
                        parts[d].push(dal.wedge(&i_beta)?.scale(&sign));
                    }
                }
            }
            // (-1)^a i_{∂d} α ∧ dβ ⊗ ∂_c
            if da > 0 {
                if let Some(dbe) = &d_beta[d] {
                    let i_alpha = interior(ctx, &VectorField::basis(dim, d), alpha)?;
                    if !i_alpha.is_zero() && !dbe.is_zero() {
                        parts[c].push(i_alpha.wedge(dbe)?.scale(&sign));
                    }
                }
            }
        }
    }
    let forms = parts.into_iter().map(|ps| DiffForm::sum(dim, degree, &ps)).collect();
    Ok(VectorValuedForm { degree, forms })
}

/// `dz^a` as a form on the context.
pub fn coordinate_form(ctx: &JetContext, a: usize) -> DiffForm {
    DiffForm::basis(ctx.dim(), a)
}

/// The contact form `ω^σ = dy^σ - y^σ_i dx^i` (zero-based `σ`).
pub fn contact_form(ctx: &JetContext, sigma: usize) -> Result<DiffForm, JetError> {
    ctx.check_index("fibre", sigma, ctx.m())?;
    let mut comps = vec![Expr::zero(); ctx.dim()];
    comps[ctx.y_idx(sigma)] = Expr::one();
    for i in 0..ctx.n() {
        comps[ctx.x_idx(i)] = -ctx.dy(sigma, i);
    }
    Ok(DiffForm::one_form(comps))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> JetContext {
        JetContext::new(&["t", "th"], &["r"]).unwrap()
    }

    #[test]
    fn coordinate_layout() {
        let c = ctx();
        assert_eq!(c.dim(), 5);
        assert_eq!(c.name(c.dy_idx(0, 1)), "r_th");
        assert_eq!(c.name(c.y_idx(0)), "r");
    }

    #[test]
    fn pair_index_roundtrip() {
        for dim in 2..7 {
            let mut k = 0;
            for a in 0..dim {
                for b in a + 1..dim {
                    assert_eq!(pair_index(dim, a, b), k);
                    assert_eq!(pair_of(dim, k), (a, b));
                    k += 1;
                }
            }
        }
    }

    #[test]
    fn wedge_of_coordinate_forms() {
        let c = ctx();
        let w = coordinate_form(&c, 0).wedge(&coordinate_form(&c, 1)).unwrap();
        assert!(w.entry(0, 1).is_one());
        assert_eq!(w.entry(1, 0), Expr::int(-1));
        let back = coordinate_form(&c, 1).wedge(&coordinate_form(&c, 0)).unwrap();
        assert_eq!(back.add(&w), DiffForm::zero(5, 2));
    }

    #[test]
    fn contact_form_pairs_with_fibre_direction() {
        let c = ctx();
        let w = contact_form(&c, 0).unwrap();
        let pairing = interior(&c, &VectorField::basis(5, c.y_idx(0)), &w).unwrap();
        assert!(pairing.value().is_one());
        assert_eq!(w.comp(0), &-c.dy(0, 0));
        assert!(contact_form(&c, 1).is_err());
    }

    #[test]
    fn differential_of_contact_form() {
        let c = ctx();
        let dw = exterior_d(&c, &contact_form(&c, 0).unwrap()).unwrap();
        // dω = -dy_i ∧ dx^i = dx^i ∧ dy_i
        for i in 0..2 {
            assert!(dw.entry(c.x_idx(i), c.dy_idx(0, i)).is_one());
        }
        assert!(dw.entry(0, 1).is_zero());
    }

    #[test]
    fn degree_three_is_rejected() {
        let c = ctx();
        let two = coordinate_form(&c, 0).wedge(&coordinate_form(&c, 1)).unwrap();
        assert_eq!(two.wedge(&coordinate_form(&c, 2)), Err(JetError::UnsupportedDegree(3)));
        assert!(exterior_d(&c, &two).is_err());
    }
}
