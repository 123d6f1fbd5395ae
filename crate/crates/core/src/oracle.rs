//! Numeric verification: matrices of endomorphisms at jet points, rank and
//! spectrum checks, finite-difference audits, and zero checks of whole tables.

use std::collections::HashMap;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symcore::{diff, eval, EvalError, Expr, Symbol, ZeroMethod, ZeroTester, MIN_DENOMINATOR, SAMPLE_HIGH, SAMPLE_LOW};

use crate::jetcalc::{pair_of, DiffForm, JetContext, VectorField, VectorValuedForm};

/// Absolute threshold for matrix checks.
pub const MATRIX_TOLERANCE: f64 = 1e-8;
pub const FD_STEP: f64 = 1e-6;

/// A numeric point of `J¹π` (plus any parameters).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct JetPoint(pub HashMap<Symbol, f64>);

impl JetPoint {
    pub fn from_names(ctx: &JetContext, values: &[(&str, f64)]) -> Result<Self, EvalError> {
        let mut map = HashMap::new();
        for (name, v) in values {
            let s = ctx
                .symbols()
                .lookup(name)
                .ok_or_else(|| EvalError::MissingSymbol(name.to_string()))?;
            map.insert(s.clone(), *v);
        }
        Ok(JetPoint(map))
    }

    pub fn get(&self, s: &Symbol) -> Option<f64> {
        self.0.get(s).copied()
    }

    pub fn set(&mut self, s: &Symbol, v: f64) {
        self.0.insert(s.clone(), v);
    }

    /// Fails if any guard expression is within [`MIN_DENOMINATOR`] of zero.
    pub fn admits(&self, guards: &[Expr]) -> Result<(), EvalError> {
        for g in guards {
            let v = eval(g, &self.0)?;
            if v.abs() < MIN_DENOMINATOR {
                return Err(EvalError::Domain {
                    expr: g.to_string(),
                    reason: "denominator too close to zero",
                });
            }
        }
        Ok(())
    }
}

/// Seeded stream of jet points in the sampling box, redrawn away from poles.
pub struct JetSampler {
    rng: ChaCha8Rng,
    symbols: Vec<Symbol>,
    guards: Vec<Expr>,
}

impl JetSampler {
    pub fn new(ctx: &JetContext, guards: Vec<Expr>, seed: u64) -> Self {
        let mut symbols: Vec<Symbol> = ctx.coords().to_vec();
        for g in &guards {
            symbols.extend(g.symbols());
        }
        symbols.sort();
        symbols.dedup();
        JetSampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            symbols,
            guards,
        }
    }

    pub fn next_point(&mut self) -> Result<JetPoint, EvalError> {
        let mut last = None;
        for _ in 0..10 {
            let p = JetPoint(
                self.symbols
                    .iter()
                    .map(|s| (s.clone(), self.rng.gen_range(SAMPLE_LOW..SAMPLE_HIGH)))
                    .collect(),
            );
            match p.admits(&self.guards) {
                Ok(()) => return Ok(p),
                Err(e) => last = Some(e),
            }
        }
        Err(last.expect("attempted"))
    }
}

/// Matrix of a degree-1 vector-valued form; row = output direction.
pub fn assemble(a: &VectorValuedForm, p: &JetPoint) -> Result<DMatrix<f64>, EvalError> {
    assert_eq!(a.degree(), 1, "assemble needs an endomorphism");
    let dim = a.dim();
    let mut m = DMatrix::zeros(dim, dim);
    for c in 0..dim {
        for d in 0..dim {
            let e = a.entry1(c, d);
            if !e.is_zero() {
                m[(c, d)] = eval(e, &p.0)?;
            }
        }
    }
    Ok(m)
}

/// Rank by Gaussian elimination with partial pivoting; pivots below
/// `threshold` count as zero.
pub fn rank(m: &DMatrix<f64>, threshold: f64) -> usize {
    let mut a = m.clone();
    let (rows, cols) = a.shape();
    let mut r = 0;
    for col in 0..cols {
        if r == rows {
            break;
        }
        let (pivot, best) =
            (r..rows)
                .map(|i| (i, a[(i, col)].abs()))
                .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best < threshold {
            continue;
        }
        a.swap_rows(r, pivot);
        for i in r + 1..rows {
            let f = a[(i, col)] / a[(r, col)];
            if f != 0.0 {
                for j in col..cols {
                    let v = a[(r, j)];
                    a[(i, j)] -= f * v;
                }
            }
        }
        r += 1;
    }
    r
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixCheck {
    pub name: &'static str,
    pub value: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Spectrum certificate for an operator expected to satisfy `L³ = L` with
/// `±1` eigenspaces of rank `m`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixCheckReport {
    pub dim: usize,
    pub checks: Vec<MatrixCheck>,
}

impl MatrixCheckReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&MatrixCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub fn check_spectrum(l: &DMatrix<f64>, m: usize, tol: f64) -> MatrixCheckReport {
    let dim = l.nrows();
    let id = DMatrix::<f64>::identity(dim, dim);
    let cube_gap = (l * l * l - l).abs().max();
    let tr = l.trace();
    let tr2 = (l * l).trace();
    let within = |name, value: f64, expected: f64| MatrixCheck {
        name,
        value,
        expected,
        tolerance: tol,
        passed: (value - expected).abs() <= tol,
    };
    let exact = |name, value: usize, expected: usize| MatrixCheck {
        name,
        value: value as f64,
        expected: expected as f64,
        tolerance: 0.0,
        passed: value == expected,
    };
    MatrixCheckReport {
        dim,
        checks: vec![
            within("cube_minus_identity_norm", cube_gap, 0.0),
            within("trace", tr, 0.0),
            within("trace_of_square", tr2, 2.0 * m as f64),
            exact("rank", rank(l, tol), 2 * m),
            exact("rank_minus_identity", rank(&(l - &id), tol), dim - m),
            exact("rank_plus_identity", rank(&(l + &id), tol), dim - m),
        ],
    }
}

/// Largest `|central difference - diff|/(1 + |diff|)` over the points.
pub fn fd_audit(e: &Expr, s: &Symbol, points: &[JetPoint]) -> Result<f64, EvalError> {
    let d = diff(e, s);
    let mut worst: f64 = 0.0;
    for p in points {
        let exact = eval(&d, &p.0)?;
        let x0 = p.get(s).ok_or_else(|| EvalError::MissingSymbol(s.name().to_string()))?;
        let mut q = p.0.clone();
        q.insert(s.clone(), x0 + FD_STEP);
        let up = eval(e, &q)?;
        q.insert(s.clone(), x0 - FD_STEP);
        let down = eval(e, &q)?;
        let fd = (up - down) / (2.0 * FD_STEP);
        worst = worst.max((fd - exact).abs() / (1.0 + exact.abs()));
    }
    Ok(worst)
}

/// Outcome of a symbolic identity check over a table of residuals.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityCheck {
    pub name: String,
    pub passed: bool,
    pub method: ZeroMethod,
    pub max_residual: f64,
    pub tolerance: f64,
    /// Labels of the components that did not vanish.
    pub failures: Vec<String>,
    pub error: Option<String>,
}

impl IdentityCheck {
    pub fn failed(name: impl Into<String>, reason: impl Into<String>) -> Self {
        IdentityCheck {
            name: name.into(),
            passed: false,
            method: ZeroMethod::Symbolic,
            max_residual: f64::NAN,
            tolerance: 0.0,
            failures: Vec::new(),
            error: Some(reason.into()),
        }
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

/// Zero-test every labelled residual.
pub fn check_zero_exprs<I>(name: impl Into<String>, tester: &ZeroTester, items: I) -> IdentityCheck
where
    I: IntoIterator<Item = (String, Expr)>,
{
    let mut out = IdentityCheck {
        name: name.into(),
        passed: true,
        method: ZeroMethod::Symbolic,
        max_residual: 0.0,
        tolerance: tester.tolerance,
        failures: Vec::new(),
        error: None,
    };
    for (label, e) in items {
        if e.is_zero() {
            continue;
        }
        match tester.check(&e) {
            Ok(v) => {
                if v.method == ZeroMethod::Numeric {
                    out.method = ZeroMethod::Numeric;
                }
                out.max_residual = out.max_residual.max(v.max_residual);
                if !v.is_zero {
                    out.passed = false;
                    out.failures.push(label);
                }
            }
            Err(err) => {
                out.passed = false;
                out.failures.push(label);
                out.error.get_or_insert_with(|| err.to_string());
            }
        }
    }
    out
}

fn form_items<'a>(ctx: &'a JetContext, prefix: String, f: &'a DiffForm) -> impl Iterator<Item = (String, Expr)> + 'a {
    let dim = f.dim();
    let degree = f.degree();
    f.comps().iter().enumerate().map(move |(k, e)| {
        let label = match degree {
            0 => prefix.clone(),
            1 => format!("{prefix}d{}", ctx.name(k)),
            _ => {
                let (a, b) = pair_of(dim, k);
                format!("{prefix}d{}^d{}", ctx.name(a), ctx.name(b))
            }
        };
        (label, e.clone())
    })
}

pub fn check_zero_form(ctx: &JetContext, name: impl Into<String>, tester: &ZeroTester, f: &DiffForm) -> IdentityCheck {
    check_zero_exprs(name, tester, form_items(ctx, String::new(), f))
}

pub fn check_zero_field(
    ctx: &JetContext,
    name: impl Into<String>,
    tester: &ZeroTester,
    u: &VectorField,
) -> IdentityCheck {
    check_zero_exprs(
        name,
        tester,
        u.comps()
            .iter()
            .enumerate()
            .map(|(a, e)| (format!("d/d{}", ctx.name(a)), e.clone())),
    )
}

pub fn check_zero_vvf(
    ctx: &JetContext,
    name: impl Into<String>,
    tester: &ZeroTester,
    a: &VectorValuedForm,
) -> IdentityCheck {
    let items: Vec<(String, Expr)> = a
        .forms()
        .iter()
        .enumerate()
        .flat_map(|(c, f)| form_items(ctx, format!("d/d{} ", ctx.name(c)), f).collect::<Vec<_>>())
        .collect();
    check_zero_exprs(name, tester, items)
}

pub fn check_equal_vvf(
    ctx: &JetContext,
    name: impl Into<String>,
    tester: &ZeroTester,
    a: &VectorValuedForm,
    b: &VectorValuedForm,
) -> IdentityCheck {
    check_zero_vvf(ctx, name, tester, &a.sub(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_simple_matrices() {
        assert_eq!(rank(&DMatrix::zeros(4, 4), 1e-8), 0);
        assert_eq!(rank(&DMatrix::identity(5, 5), 1e-8), 5);
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 0.0, 1.0, 1.0]);
        assert_eq!(rank(&m, 1e-8), 2);
    }

    #[test]
    fn spectrum_of_a_reflection_block() {
        // diag(1, -1, 0, 0) has m = 1
        let l = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -1.0, 0.0, 0.0]));
        assert!(check_spectrum(&l, 1, 1e-8).passed());
        assert!(!check_spectrum(&l, 2, 1e-8).passed());
    }
}
