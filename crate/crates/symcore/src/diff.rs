use num_bigint::BigInt;
use num_rational::BigRational;

use crate::expr::{Expr, Func, Node};
use crate::normal::{collect, expand, Poly};
use crate::symbol::Symbol;

/// Exact partial derivative with respect to `s`, every other symbol held fixed.
pub fn diff(e: &Expr, s: &Symbol) -> Expr {
    if !e.depends_on(s) {
        return Expr::zero();
    }
    collect(diff_poly(&expand(e), s))
}

fn diff_poly(p: &Poly, s: &Symbol) -> Poly {
    let mut out = Poly::zero();
    for (m, c) in p.iter() {
        for (idx, (atom, k)) in m.iter().enumerate() {
            if !atom.depends_on(s) {
                continue;
            }
            let d_atom = diff_atom(atom, s);
            if d_atom.is_zero() {
                continue;
            }
            let mut rest = m.clone();
            if *k == 1 {
                rest.remove(idx);
            } else {
                rest[idx].1 = k - 1;
            }
            let coeff = c * BigRational::from_integer(BigInt::from(*k));
            let mut front = Poly::zero();
            front.add_term(rest, coeff);
            out.add_assign(&front.mul(&d_atom));
        }
    }
    out
}

fn diff_atom(atom: &Expr, s: &Symbol) -> Poly {
    match atom.node() {
        Node::Sym(t) if t == s => Poly::one(),
        Node::Sym(_) | Node::Const(_) => Poly::zero(),
        Node::Func(f, arg) => {
            let inner = diff_poly(&expand(arg), s);
            if inner.is_zero() {
                return inner;
            }
            let outer = match f {
                Func::Sin => Poly::atom(Expr::from_node(Node::Func(Func::Cos, arg.clone()), true), 1),
                Func::Cos => expand(&Expr::apply(Func::Sin, arg)).negated(),
                Func::Exp => Poly::atom(atom.clone(), 1),
                Func::Ln => expand(arg).pow(-1),
                Func::Sqrt => Poly::atom(atom.clone(), -1).scaled(&BigRational::new(BigInt::from(1), BigInt::from(2))),
            };
            outer.mul(&inner)
        }
        // primitive sums only occur as atoms with negative exponents
        Node::Sum(_) => diff_poly(&expand(atom), s),
        Node::Product(_) | Node::Pow(..) => diff_poly(&expand(atom), s),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::{Role, SymbolTable};

    #[test]
    fn derivative_of_constant_is_zero() {
        let mut t = SymbolTable::new();
        let x = t.register("x", Role::Parameter).unwrap();
        assert!(diff(&Expr::ratio(7, 3), &x).is_zero());
    }

    #[test]
    fn elementary_rules() {
        let mut t = SymbolTable::new();
        let x = t.register("x", Role::Parameter).unwrap();
        let ex = Expr::sym(&x);
        assert_eq!(diff(&ex.sin(), &x), ex.cos());
        assert_eq!(diff(&ex.cos(), &x), -ex.sin());
        assert_eq!(diff(&ex.exp(), &x), ex.exp());
        assert_eq!(diff(&ex.ln(), &x), ex.recip());
        assert_eq!(diff(&ex.sqrt(), &x), ex.sqrt().recip() * Expr::ratio(1, 2));
        let s = (&ex + Expr::one()).recip();
        assert_eq!(diff(&s, &x), -(&ex + Expr::one()).pow(-2));
    }
}
