//! Two-tier zero testing: structural first, then seeded random probing.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::eval::{eval, EvalError};
use crate::expr::{Expr, Func, Node};
use crate::symbol::Symbol;

pub const DEFAULT_SEED: u64 = 0x5EED;
pub const DEFAULT_PROBES: usize = 8;
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
/// Sampling box for every coordinate.
pub const SAMPLE_LOW: f64 = 0.25;
pub const SAMPLE_HIGH: f64 = 1.75;
/// Points where any denominator is smaller than this are redrawn.
pub const MIN_DENOMINATOR: f64 = 1e-3;
const MAX_RESAMPLES: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeroMethod {
    Symbolic,
    Numeric,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZeroVerdict {
    pub is_zero: bool,
    pub method: ZeroMethod,
    /// Largest |value| / (1 + scale) seen over the probes (0 for the symbolic tier).
    pub max_residual: f64,
    pub probes: usize,
}

/// Configuration of the probabilistic tier.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroTester {
    pub probes: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl Default for ZeroTester {
    fn default() -> Self {
        ZeroTester {
            probes: DEFAULT_PROBES,
            seed: DEFAULT_SEED,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

/// Subexpressions that must stay away from zero (or from the negative axis).
fn guards(e: &Expr, out: &mut Vec<Expr>) {
    match e.node() {
        Node::Const(_) | Node::Sym(_) => {}
        Node::Sum(v) | Node::Product(v) => v.iter().for_each(|c| guards(c, out)),
        Node::Pow(b, k) => {
            if *k < 0 {
                out.push(b.clone());
            }
            guards(b, out);
        }
        Node::Func(f, a) => {
            if matches!(f, Func::Ln | Func::Sqrt) {
                out.push(a.clone());
            }
            guards(a, out);
        }
    }
}

/// Draws points in the sampling box that keep every guard above [`MIN_DENOMINATOR`].
pub struct PointSampler {
    rng: ChaCha8Rng,
    symbols: Vec<Symbol>,
    guards: Vec<Expr>,
}

impl PointSampler {
    pub fn new(exprs: &[&Expr], seed: u64) -> Self {
        let mut symbols = Vec::new();
        let mut gs = Vec::new();
        for e in exprs {
            symbols.extend(e.symbols());
            guards(e, &mut gs);
        }
        symbols.sort();
        symbols.dedup();
        gs.sort();
        gs.dedup();
        PointSampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            symbols,
            guards: gs,
        }
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    /// Next admissible point, or the last domain error after repeated failures.
    pub fn sample(&mut self) -> Result<HashMap<Symbol, f64>, EvalError> {
        let mut last_err = None;
        for _ in 0..MAX_RESAMPLES {
            let point: HashMap<Symbol, f64> = self
                .symbols
                .iter()
                .map(|s| (s.clone(), self.rng.gen_range(SAMPLE_LOW..SAMPLE_HIGH)))
                .collect();
            match self.admissible(&point) {
                Ok(()) => return Ok(point),
                Err(e) => last_err = Some(e),
            }
        }
        Err(last_err.expect("at least one attempt"))
    }

    fn admissible(&self, point: &HashMap<Symbol, f64>) -> Result<(), EvalError> {
        for g in &self.guards {
            let v = eval(g, point)?;
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

impl ZeroTester {
    pub fn with_probes(probes: usize) -> Self {
        ZeroTester {
            probes: probes.max(1),
            ..Self::default()
        }
    }

    pub fn check(&self, e: &Expr) -> Result<ZeroVerdict, EvalError> {
        let e = e.simplify();
        if e.is_zero() {
            return Ok(ZeroVerdict {
                is_zero: true,
                method: ZeroMethod::Symbolic,
                max_residual: 0.0,
                probes: 0,
            });
        }
        let mut sampler = PointSampler::new(&[&e], self.seed);
        let terms: Vec<Expr> = match e.node() {
            Node::Sum(ts) => ts.clone(),
            _ => vec![e.clone()],
        };
        let mut worst: f64 = 0.0;
        let mut zero = true;
        for _ in 0..self.probes.max(1) {
            let p = sampler.sample()?;
            let mut value = 0.0;
            let mut scale: f64 = 0.0;
            for t in &terms {
                let v = eval(t, &p)?;
                value += v;
                scale = scale.max(v.abs());
            }
            let rel = value.abs() / (1.0 + scale);
            worst = worst.max(rel);
            if !(rel <= self.tolerance) {
                zero = false;
            }
        }
        Ok(ZeroVerdict {
            is_zero: zero,
            method: ZeroMethod::Numeric,
            max_residual: worst,
            probes: self.probes.max(1),
        })
    }
}

/// Zero test with the default seed and tolerance.
pub fn is_zero(e: &Expr, probe_points: usize) -> Result<ZeroVerdict, EvalError> {
    ZeroTester::with_probes(probe_points).check(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::{Role, SymbolTable};

    #[test]
    fn symbolic_tier_catches_cancellation() {
        let mut t = SymbolTable::new();
        let x = Expr::sym(&t.register("x", Role::Parameter).unwrap());
        let v = is_zero(&(&x - &x), 8).unwrap();
        assert!(v.is_zero);
        assert_eq!(v.method, ZeroMethod::Symbolic);
    }

    #[test]
    fn numeric_tier_accepts_pythagoras() {
        let mut t = SymbolTable::new();
        let x = Expr::sym(&t.register("x", Role::Parameter).unwrap());
        let e = x.sin().pow(2) + x.cos().pow(2) - Expr::one();
        let v = is_zero(&e, 8).unwrap();
        assert!(v.is_zero);
        assert_eq!(v.method, ZeroMethod::Numeric);
        let bad = x.sin().pow(2) - x.cos().pow(2);
        assert!(!is_zero(&bad, 8).unwrap().is_zero);
    }

    #[test]
    fn resamples_away_from_poles() {
        let mut t = SymbolTable::new();
        let x = Expr::sym(&t.register("x", Role::Parameter).unwrap());
        // pole at x = 1 inside the box
        let e = (&x - Expr::one()).recip() * (&x - Expr::one()) - Expr::one();
        assert!(is_zero(&e, 8).unwrap().is_zero);
        let pole = (&x - Expr::one()).recip() + x.sin() - x.sin();
        let mut s = PointSampler::new(&[&pole], 1);
        for _ in 0..20 {
            let p = s.sample().unwrap();
            let xv = p.values().next().copied().unwrap();
            assert!((xv - 1.0).abs() >= MIN_DENOMINATOR);
        }
    }

    #[test]
    fn domain_failure_is_reported() {
        let mut t = SymbolTable::new();
        let x = Expr::sym(&t.register("x", Role::Parameter).unwrap());
        // ln(-x) is never defined in the box
        let e = (-&x).ln();
        assert!(is_zero(&e, 4).is_err());
    }
}
