//! Expanded normal form: a sum of rational multiples of monomials over atoms.
//!
//! Atoms are symbols, function applications with canonical arguments, and
//! primitive sums (leading coefficient 1, no common monomial factor) which only
//! ever carry negative exponents. Any positive power of a sum is expanded.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::expr::{Expr, Func, Node};

/// Sorted by atom; exponents never zero.
pub(crate) type Monomial = Vec<(Expr, i64)>;

#[derive(Clone, Debug, Default)]
pub(crate) struct Poly {
    terms: BTreeMap<Monomial, BigRational>,
}

fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let k = a[i].1 + b[j].1;
                if k != 0 {
                    out.push((a[i].0.clone(), k));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn mono_pow(m: &Monomial, k: i64) -> Monomial {
    if k == 0 {
        return Vec::new();
    }
    m.iter().map(|(a, e)| (a.clone(), e * k)).collect()
}

fn rational_pow(c: &BigRational, k: i64) -> BigRational {
    let base = if k < 0 { c.recip() } else { c.clone() };
    num_traits::pow::Pow::pow(&base, k.unsigned_abs() as u32)
}

fn has_positive_sum_atom(m: &Monomial) -> bool {
    m.iter().any(|(a, e)| *e > 0 && matches!(a.node(), Node::Sum(_)))
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn constant(c: BigRational) -> Poly {
        let mut p = Poly::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn one() -> Poly {
        Poly::constant(BigRational::one())
    }

    pub fn atom(a: Expr, k: i64) -> Poly {
        Poly::term(vec![(a, k)], BigRational::one())
    }

    /// A single term; positive powers of sum atoms are expanded.
    fn term(m: Monomial, c: BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        if !has_positive_sum_atom(&m) {
            let mut p = Poly::zero();
            p.terms.insert(m, c);
            return p;
        }
        let mut rest = Vec::new();
        let mut acc = Poly::constant(c);
        for (a, e) in m {
            if e > 0 && matches!(a.node(), Node::Sum(_)) {
                acc = acc.mul(&expand(&a).pow_nonneg(e as u64));
            } else {
                rest.push((a, e));
            }
        }
        acc.mul_monomial(&rest)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        if has_positive_sum_atom(&m) {
            self.add_assign(&Poly::term(m, c));
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &Poly) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn negated(mut self) -> Poly {
        for c in self.terms.values_mut() {
            *c = -c.clone();
        }
        self
    }

    pub fn scaled(mut self, s: &BigRational) -> Poly {
        if s.is_zero() {
            return Poly::zero();
        }
        for c in self.terms.values_mut() {
            *c *= s;
        }
        self
    }

    fn mul_monomial(&self, m: &Monomial) -> Poly {
        if m.is_empty() {
            return self.clone();
        }
        let mut out = Poly::zero();
        for (tm, c) in &self.terms {
            out.add_term(mono_mul(tm, m), c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(mono_mul(ma, mb), ca * cb);
            }
        }
        out
    }

    fn pow_nonneg(&self, mut k: u64) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Integer power. Panics on a negative power of the zero polynomial.
    pub fn pow(&self, k: i64) -> Poly {
        if k >= 0 {
            return self.pow_nonneg(k as u64);
        }
        assert!(!self.is_zero(), "division by zero in symbolic expression");
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            return Poly::term(mono_pow(m, k), rational_pow(c, k));
        }
        // content: the monomial gcd of all terms, then the leading coefficient
        let mut gcd: Monomial = self.terms.keys().next().unwrap().clone();
        for m in self.terms.keys().skip(1) {
            gcd = mono_gcd(&gcd, m);
        }
        let inv_gcd = mono_pow(&gcd, -1);
        let mut reduced = Poly::zero();
        for (m, c) in &self.terms {
            reduced.add_term(mono_mul(m, &inv_gcd), c.clone());
        }
        if reduced.terms.len() == 1 {
            return Poly::term(gcd, BigRational::one()).mul(&reduced).pow(k);
        }
        let lead = reduced.terms.values().next().unwrap().clone();
        let primitive = reduced.scaled(&lead.recip());
        let base = collect_sum(&primitive);
        let mut m = mono_pow(&gcd, k);
        m = mono_mul(&m, &vec![(base, k)]);
        Poly::term(m, rational_pow(&lead, k))
    }
}

/// Componentwise minimum exponent, treating absent atoms as exponent 0.
fn mono_gcd(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    loop {
        let next = match (a.get(i), b.get(j)) {
            (None, None) => break,
            (Some(x), None) => {
                i += 1;
                (x.0.clone(), x.1.min(0))
            }
            (None, Some(y)) => {
                j += 1;
                (y.0.clone(), y.1.min(0))
            }
            (Some(x), Some(y)) => match x.0.cmp(&y.0) {
                std::cmp::Ordering::Less => {
                    i += 1;
                    (x.0.clone(), x.1.min(0))
                }
                std::cmp::Ordering::Greater => {
                    j += 1;
                    (y.0.clone(), y.1.min(0))
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                    (x.0.clone(), x.1.min(y.1))
                }
            },
        };
        if next.1 != 0 {
            out.push(next);
        }
    }
    out
}

fn perfect_square(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

fn func_poly(f: Func, arg: Expr) -> Poly {
    if let Some(c) = arg.as_const() {
        let exact = match f {
            Func::Sin if c.is_zero() => Some(BigRational::zero()),
            Func::Cos | Func::Exp if c.is_zero() => Some(BigRational::one()),
            Func::Ln if c.is_one() => Some(BigRational::zero()),
            Func::Sqrt => match (perfect_square(c.numer()), perfect_square(c.denom())) {
                (Some(n), Some(d)) => Some(BigRational::new(n, d)),
                _ => None,
            },
            _ => None,
        };
        if let Some(v) = exact {
            return Poly::constant(v);
        }
    }
    Poly::atom(Expr::from_node(Node::Func(f, arg), true), 1)
}

/// Expanded form of any expression tree.
pub(crate) fn expand(e: &Expr) -> Poly {
    if e.is_canonical() {
        return expand_canonical(e);
    }
    match e.node() {
        Node::Const(c) => Poly::constant(c.clone()),
        Node::Sym(s) => Poly::atom(Expr::sym(s), 1),
        Node::Sum(ts) => {
            let mut acc = Poly::zero();
            for t in ts {
                acc.add_assign(&expand(t));
            }
            acc
        }
        Node::Product(fs) => {
            let mut acc = Poly::one();
            for f in fs {
                if acc.is_zero() {
                    break;
                }
                acc = acc.mul(&expand(f));
            }
            acc
        }
        Node::Pow(b, k) if *k < 0 => match b.node() {
            // distribute over the written factors so 1/(A^2*y) keeps A and y apart
            Node::Pow(inner, j) => expand(&Expr::raw_pow(inner.clone(), j * k)),
            Node::Product(fs) => {
                let mut acc = Poly::one();
                for f in fs {
                    acc = acc.mul(&expand(&Expr::raw_pow(f.clone(), *k)));
                }
                acc
            }
            _ => expand(b).pow(*k),
        },
        Node::Pow(b, k) => expand(b).pow(*k),
        Node::Func(f, a) => func_poly(*f, a.simplify()),
    }
}

fn push_factor(f: &Expr, coeff: &mut BigRational, m: &mut Monomial) {
    match f.node() {
        Node::Const(c) => *coeff *= c,
        Node::Pow(b, k) => m.push((b.clone(), *k)),
        _ => m.push((f.clone(), 1)),
    }
}

fn canonical_term(t: &Expr) -> (Monomial, BigRational) {
    let mut coeff = BigRational::one();
    let mut m = Vec::new();
    match t.node() {
        Node::Product(fs) => fs.iter().for_each(|f| push_factor(f, &mut coeff, &mut m)),
        _ => push_factor(t, &mut coeff, &mut m),
    }
    (m, coeff)
}

fn expand_canonical(e: &Expr) -> Poly {
    let mut p = Poly::zero();
    match e.node() {
        Node::Sum(ts) => {
            for t in ts {
                let (m, c) = canonical_term(t);
                p.terms.insert(m, c);
            }
        }
        _ => {
            let (m, c) = canonical_term(e);
            if !c.is_zero() {
                p.terms.insert(m, c);
            }
        }
    }
    p
}

fn term_expr(m: &Monomial, c: &BigRational) -> Expr {
    let mut factors = Vec::with_capacity(m.len() + 1);
    if !c.is_one() {
        factors.push(Expr::constant(c.clone()));
    }
    for (a, k) in m {
        if *k == 1 {
            factors.push(a.clone());
        } else {
            factors.push(Expr::from_node(Node::Pow(a.clone(), *k), true));
        }
    }
    match factors.len() {
        0 => Expr::one(),
        1 => factors.pop().unwrap(),
        _ => Expr::from_node(Node::Product(factors), true),
    }
}

fn collect_sum(p: &Poly) -> Expr {
    let terms: Vec<Expr> = p.terms.iter().map(|(m, c)| term_expr(m, c)).collect();
    match terms.len() {
        0 => Expr::zero(),
        1 => terms.into_iter().next().unwrap(),
        _ => Expr::from_node(Node::Sum(terms), true),
    }
}

/// Canonical expression for an expanded polynomial.
pub(crate) fn collect(p: Poly) -> Expr {
    collect_sum(&p)
}
