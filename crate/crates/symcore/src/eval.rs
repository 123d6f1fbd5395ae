use std::collections::{BTreeMap, HashMap};

use num_traits::ToPrimitive;

use crate::expr::{Expr, Func, Node};
use crate::symbol::Symbol;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("no value for symbol `{0}`")]
    MissingSymbol(String),
    #[error("{reason} in `{expr}`")]
    Domain { expr: String, reason: &'static str },
}

/// Source of numeric values for symbols.
pub trait Valuation {
    fn value(&self, s: &Symbol) -> Option<f64>;
}

impl Valuation for HashMap<Symbol, f64> {
    fn value(&self, s: &Symbol) -> Option<f64> {
        self.get(s).copied()
    }
}

impl Valuation for BTreeMap<Symbol, f64> {
    fn value(&self, s: &Symbol) -> Option<f64> {
        self.get(s).copied()
    }
}

impl<F: Fn(&Symbol) -> Option<f64>> Valuation for F {
    fn value(&self, s: &Symbol) -> Option<f64> {
        self(s)
    }
}

/// IEEE double evaluation.
pub fn eval<V: Valuation + ?Sized>(e: &Expr, point: &V) -> Result<f64, EvalError> {
    Ok(match e.node() {
        Node::Const(c) => c.to_f64().unwrap_or(f64::NAN),
        Node::Sym(s) => point
            .value(s)
            .ok_or_else(|| EvalError::MissingSymbol(s.name().to_string()))?,
        Node::Sum(ts) => {
            let mut acc = 0.0;
            for t in ts {
                acc += eval(t, point)?;
            }
            acc
        }
        Node::Product(fs) => {
            let mut acc = 1.0;
            for f in fs {
                acc *= eval(f, point)?;
            }
            acc
        }
        Node::Pow(b, k) => {
            let base = eval(b, point)?;
            if base == 0.0 && *k < 0 {
                return Err(EvalError::Domain {
                    expr: b.to_string(),
                    reason: "division by zero",
                });
            }
            match i32::try_from(*k) {
                Ok(k) => base.powi(k),
                Err(_) => base.powf(*k as f64),
            }
        }
        Node::Func(f, a) => {
            let x = eval(a, point)?;
            let domain = |reason| EvalError::Domain {
                expr: e.to_string(),
                reason,
            };
            match f {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Exp => x.exp(),
                Func::Ln if x <= 0.0 => return Err(domain("logarithm of a non-positive value")),
                Func::Ln => x.ln(),
                Func::Sqrt if x < 0.0 => return Err(domain("square root of a negative value")),
                Func::Sqrt => x.sqrt(),
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::{Role, SymbolTable};

    #[test]
    fn zero_evaluates_to_zero() {
        let p: HashMap<Symbol, f64> = HashMap::new();
        assert_eq!(eval(&Expr::zero(), &p).unwrap(), 0.0);
    }

    #[test]
    fn reports_missing_symbols_and_poles() {
        let mut t = SymbolTable::new();
        let x = t.register("x", Role::Parameter).unwrap();
        let ex = Expr::sym(&x);
        let empty: HashMap<Symbol, f64> = HashMap::new();
        assert_eq!(eval(&ex, &empty), Err(EvalError::MissingSymbol("x".into())));
        let at_zero = |_: &Symbol| Some(0.0);
        assert!(matches!(
            eval(&ex.recip(), &at_zero),
            Err(EvalError::Domain {
                reason: "division by zero",
                ..
            })
        ));
        assert!(eval(&ex.ln(), &at_zero).is_err());
    }
}
