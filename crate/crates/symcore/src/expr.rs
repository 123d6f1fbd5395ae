use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::normal;
use crate::symbol::Symbol;

/// Elementary functions understood by the kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

/// One node of an expression tree.
///
/// Division is a product with a negative integer power; subtraction is a sum
/// with a `-1` coefficient.
#[derive(Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Const(BigRational),
    Sym(Symbol),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Pow(Expr, i64),
    Func(Func, Expr),
}

#[derive(Debug)]
struct Inner {
    node: Node,
    canonical: bool,
}

/// Immutable, cheaply clonable symbolic expression.
///
/// Values produced by the arithmetic operators, [`Expr::simplify`], `diff` and
/// the parser are in canonical form: expanded sums of monomials over atoms
/// (symbols, function applications and negative powers of primitive sums),
/// sorted by a fixed total order with folded rational coefficients.
#[derive(Clone)]
pub struct Expr(Arc<Inner>);

impl Expr {
    pub(crate) fn from_node(node: Node, canonical: bool) -> Expr {
        Expr(Arc::new(Inner { node, canonical }))
    }

    pub fn node(&self) -> &Node {
        &self.0.node
    }

    pub fn is_canonical(&self) -> bool {
        self.0.canonical
    }

    pub fn constant(value: BigRational) -> Expr {
        Expr::from_node(Node::Const(value), true)
    }

    pub fn int(value: i64) -> Expr {
        Expr::constant(BigRational::from_integer(BigInt::from(value)))
    }

    pub fn ratio(num: i64, den: i64) -> Expr {
        assert!(den != 0, "zero denominator in rational constant");
        Expr::constant(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn sym(s: &Symbol) -> Expr {
        Expr::from_node(Node::Sym(s.clone()), true)
    }

    /// Unsimplified sum node; use [`Expr::sum`] for a canonical result.
    pub fn raw_sum(terms: Vec<Expr>) -> Expr {
        Expr::from_node(Node::Sum(terms), false)
    }

    /// Unsimplified product node; use [`Expr::product`] for a canonical result.
    pub fn raw_product(factors: Vec<Expr>) -> Expr {
        Expr::from_node(Node::Product(factors), false)
    }

    pub fn raw_pow(base: Expr, exp: i64) -> Expr {
        Expr::from_node(Node::Pow(base, exp), false)
    }

    pub fn raw_func(f: Func, arg: Expr) -> Expr {
        Expr::from_node(Node::Func(f, arg), false)
    }

    pub fn apply(f: Func, arg: &Expr) -> Expr {
        Expr::raw_func(f, arg.clone()).simplify()
    }

    pub fn sin(&self) -> Expr {
        Expr::apply(Func::Sin, self)
    }

    pub fn cos(&self) -> Expr {
        Expr::apply(Func::Cos, self)
    }

    pub fn exp(&self) -> Expr {
        Expr::apply(Func::Exp, self)
    }

    pub fn ln(&self) -> Expr {
        Expr::apply(Func::Ln, self)
    }

    pub fn sqrt(&self) -> Expr {
        Expr::apply(Func::Sqrt, self)
    }

    /// Canonical sum of all terms, built in one pass.
    pub fn sum<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
        let mut acc = normal::Poly::zero();
        for t in terms {
            acc.add_assign(&normal::expand(&t));
        }
        normal::collect(acc)
    }

    pub fn product<I: IntoIterator<Item = Expr>>(factors: I) -> Expr {
        let mut acc = normal::Poly::one();
        for f in factors {
            if acc.is_zero() {
                break;
            }
            acc = acc.mul(&normal::expand(&f));
        }
        normal::collect(acc)
    }

    pub fn pow(&self, exp: i64) -> Expr {
        normal::collect(normal::expand(&Expr::raw_pow(self.clone(), exp)))
    }

    pub fn recip(&self) -> Expr {
        self.pow(-1)
    }

    pub fn scale(&self, c: &BigRational) -> Expr {
        normal::collect(normal::expand(self).scaled(c))
    }

    /// Canonical form of an arbitrary tree.
    pub fn simplify(&self) -> Expr {
        if self.is_canonical() {
            return self.clone();
        }
        normal::collect(normal::expand(self))
    }

    pub fn as_const(&self) -> Option<&BigRational> {
        match self.node() {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    /// True when the expression is structurally the constant 0.
    pub fn is_zero(&self) -> bool {
        matches!(self.node(), Node::Const(c) if c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self.node(), Node::Const(c) if c.is_one())
    }

    pub fn depends_on(&self, s: &Symbol) -> bool {
        match self.node() {
            Node::Const(_) => false,
            Node::Sym(t) => t == s,
            Node::Sum(v) | Node::Product(v) => v.iter().any(|e| e.depends_on(s)),
            Node::Pow(b, _) => b.depends_on(s),
            Node::Func(_, a) => a.depends_on(s),
        }
    }

    /// Free symbols, sorted and deduplicated.
    pub fn symbols(&self) -> Vec<Symbol> {
        fn walk(e: &Expr, out: &mut Vec<Symbol>) {
            match e.node() {
                Node::Const(_) => {}
                Node::Sym(s) => out.push(s.clone()),
                Node::Sum(v) | Node::Product(v) => v.iter().for_each(|c| walk(c, out)),
                Node::Pow(b, _) => walk(b, out),
                Node::Func(_, a) => walk(a, out),
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out.sort();
        out.dedup();
        out
    }

    /// Replace every occurrence of the listed symbols and simplify.
    pub fn subst(&self, map: &[(Symbol, Expr)]) -> Expr {
        fn walk(e: &Expr, map: &[(Symbol, Expr)]) -> Expr {
            match e.node() {
                Node::Const(_) => e.clone(),
                Node::Sym(s) => map
                    .iter()
                    .find(|(k, _)| k == s)
                    .map(|(_, v)| v.clone())
                    .unwrap_or_else(|| e.clone()),
                Node::Sum(v) => Expr::raw_sum(v.iter().map(|c| walk(c, map)).collect()),
                Node::Product(v) => Expr::raw_product(v.iter().map(|c| walk(c, map)).collect()),
                Node::Pow(b, k) => Expr::raw_pow(walk(b, map), *k),
                Node::Func(f, a) => Expr::raw_func(*f, walk(a, map)),
            }
        }
        walk(self, map).simplify()
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + match self.node() {
            Node::Const(_) | Node::Sym(_) => 0,
            Node::Sum(v) | Node::Product(v) => v.iter().map(Expr::size).sum(),
            Node::Pow(b, _) => b.size(),
            Node::Func(_, a) => a.size(),
        }
    }

    fn rank(&self) -> u8 {
        match self.node() {
            Node::Const(_) => 0,
            Node::Sym(_) => 1,
            Node::Func(..) => 2,
            Node::Pow(..) => 3,
            Node::Product(_) => 4,
            Node::Sum(_) => 5,
        }
    }
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.node == other.0.node
    }
}

impl Eq for Expr {}

impl Hash for Expr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.node.hash(state);
    }
}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Expr {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        match self.rank().cmp(&other.rank()) {
            Ordering::Equal => {}
            o => return o,
        }
        match (self.node(), other.node()) {
            (Node::Const(a), Node::Const(b)) => a.cmp(b),
            (Node::Sym(a), Node::Sym(b)) => a.cmp(b),
            (Node::Func(f, a), Node::Func(g, b)) => f.cmp(g).then_with(|| a.cmp(b)),
            (Node::Pow(a, j), Node::Pow(b, k)) => a.cmp(b).then_with(|| j.cmp(k)),
            (Node::Product(a), Node::Product(b)) | (Node::Sum(a), Node::Sum(b)) => a.cmp(b),
            _ => unreachable!("rank equality implies same variant"),
        }
    }
}

impl From<i64> for Expr {
    fn from(v: i64) -> Self {
        Expr::int(v)
    }
}

impl From<&Symbol> for Expr {
    fn from(s: &Symbol) -> Self {
        Expr::sym(s)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(self, rhs)
            }
        }
        impl $trait<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                (&self).$method(rhs)
            }
        }
        impl $trait<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| {
    if a.is_zero() {
        return b.simplify();
    }
    if b.is_zero() {
        return a.simplify();
    }
    let mut p = normal::expand(a);
    p.add_assign(&normal::expand(b));
    normal::collect(p)
});

binop!(Sub, sub, |a, b| {
    if b.is_zero() {
        return a.simplify();
    }
    let mut p = normal::expand(a);
    p.add_assign(&normal::expand(b).negated());
    normal::collect(p)
});

binop!(Mul, mul, |a, b| {
    if a.is_zero() || b.is_zero() {
        return Expr::zero();
    }
    if a.is_one() {
        return b.simplify();
    }
    if b.is_one() {
        return a.simplify();
    }
    normal::collect(normal::expand(a).mul(&normal::expand(b)))
});

binop!(Div, div, |a, b| {
    if a.is_zero() {
        return Expr::zero();
    }
    normal::collect(normal::expand(a).mul(&normal::expand(&b.recip())))
});

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        normal::collect(normal::expand(self).negated())
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

// ---------------------------------------------------------------------------
// Printing

fn write_rational(f: &mut fmt::Formatter<'_>, c: &BigRational) -> fmt::Result {
    if c.is_integer() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

/// Split a term into sign, coefficient, numerator factors and denominator factors.
fn split_term(e: &Expr) -> (BigRational, Vec<(Expr, i64)>, Vec<(Expr, i64)>) {
    let mut coeff = BigRational::one();
    let mut num = Vec::new();
    let mut den = Vec::new();
    let mut push = |base: &Expr, k: i64, coeff: &mut BigRational| match base.node() {
        Node::Const(c) if k >= 0 => *coeff *= num_traits::pow::Pow::pow(c, k as u32),
        _ if k > 0 => num.push((base.clone(), k)),
        _ if k < 0 => den.push((base.clone(), -k)),
        _ => {}
    };
    match e.node() {
        Node::Product(fs) => {
            for fac in fs {
                match fac.node() {
                    Node::Pow(b, k) => push(b, *k, &mut coeff),
                    _ => push(fac, 1, &mut coeff),
                }
            }
        }
        Node::Pow(b, k) => push(b, *k, &mut coeff),
        _ => push(e, 1, &mut coeff),
    }
    (coeff, num, den)
}

fn write_factor(f: &mut fmt::Formatter<'_>, base: &Expr, k: i64) -> fmt::Result {
    let needs_parens = match base.node() {
        Node::Sum(_) | Node::Product(_) | Node::Pow(..) => true,
        Node::Const(c) => k != 1 && (c.is_negative() || !c.is_integer()),
        _ => false,
    };
    if needs_parens {
        write!(f, "({base})")?;
    } else {
        write!(f, "{base}")?;
    }
    if k != 1 {
        write!(f, "^{k}")?;
    }
    Ok(())
}

fn write_factors(f: &mut fmt::Formatter<'_>, fs: &[(Expr, i64)]) -> fmt::Result {
    for (i, (b, k)) in fs.iter().enumerate() {
        if i > 0 {
            f.write_str("*")?;
        }
        write_factor(f, b, *k)?;
    }
    Ok(())
}

/// Writes the absolute value of a term; returns nothing about the sign.
fn write_term_abs(
    f: &mut fmt::Formatter<'_>,
    coeff: &BigRational,
    num: &[(Expr, i64)],
    den: &[(Expr, i64)],
) -> fmt::Result {
    let c = coeff.abs();
    let cn = c.numer();
    let cd = c.denom();
    let mut wrote = false;
    if !cn.is_one() || num.is_empty() {
        write!(f, "{cn}")?;
        wrote = true;
    }
    if !num.is_empty() {
        if wrote {
            f.write_str("*")?;
        }
        write_factors(f, num)?;
    }
    let den_items = den.len() + usize::from(!cd.is_one());
    if den_items > 0 {
        f.write_str("/")?;
        if den_items > 1 {
            f.write_str("(")?;
        }
        let mut first = true;
        if !cd.is_one() {
            write!(f, "{cd}")?;
            first = false;
        }
        if !den.is_empty() {
            if !first {
                f.write_str("*")?;
            }
            write_factors(f, den)?;
        }
        if den_items > 1 {
            f.write_str(")")?;
        }
    }
    Ok(())
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Const(c) => write_rational(f, c),
            Node::Sym(s) => write!(f, "{s}"),
            Node::Func(g, a) => write!(f, "{}({a})", g.name()),
            Node::Sum(terms) => {
                if terms.is_empty() {
                    return f.write_str("0");
                }
                for (i, t) in terms.iter().enumerate() {
                    let (c, num, den) = split_term(t);
                    let neg = c.is_negative();
                    match (i, neg) {
                        (0, true) => f.write_str("-")?,
                        (0, false) => {}
                        (_, true) => f.write_str(" - ")?,
                        (_, false) => f.write_str(" + ")?,
                    }
                    write_term_abs(f, &c, &num, &den)?;
                }
                Ok(())
            }
            Node::Product(_) | Node::Pow(..) => {
                let (c, num, den) = split_term(self);
                if c.is_negative() {
                    f.write_str("-")?;
                }
                write_term_abs(f, &c, &num, &den)
            }
        }
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}
