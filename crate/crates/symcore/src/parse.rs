//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' exponent)?
//! exponent:= '-'? INT ('^' exponent)? | '(' '-'? INT ')'
//! primary := INT | IDENT | FUNC '(' expr ')' | '(' expr ')'
//! ```
//!
//! `123/456` is read as a division of two integer literals, which yields the
//! same exact rational.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::expr::{Expr, Func};
use crate::symbol::SymbolTable;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier `{name}` at position {pos}")]
    UnknownIdentifier { name: String, pos: usize },
    #[error("division by zero at position {pos}")]
    DivisionByZero { pos: usize },
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Op(char),
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn next(&mut self) -> Result<(Tok, usize), ParseError> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && (bytes[self.pos] as char).is_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        if self.pos >= bytes.len() {
            return Ok((Tok::End, start));
        }
        let c = bytes[self.pos] as char;
        if c.is_ascii_digit() {
            while self.pos < bytes.len() && bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let v: BigInt = self.src[start..self.pos].parse().expect("digits");
            return Ok((Tok::Int(v), start));
        }
        if c.is_ascii_alphabetic() {
            while self.pos < bytes.len() && (bytes[self.pos].is_ascii_alphanumeric() || bytes[self.pos] == b'_') {
                self.pos += 1;
            }
            return Ok((Tok::Ident(self.src[start..self.pos].to_string()), start));
        }
        if "+-*/^()".contains(c) {
            self.pos += 1;
            return Ok((Tok::Op(c), start));
        }
        Err(ParseError::Syntax {
            pos: start,
            msg: format!("unexpected character `{c}`"),
        })
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    pos: usize,
    symbols: &'a SymbolTable,
}

impl<'a> Parser<'a> {
    fn bump(&mut self) -> Result<(), ParseError> {
        let (t, p) = self.lexer.next()?;
        self.tok = t;
        self.pos = p;
        Ok(())
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.tok == Tok::Op(c) {
            self.bump()
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    fn error(&self, msg: String) -> ParseError {
        ParseError::Syntax { pos: self.pos, msg }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            match self.tok {
                Tok::Op('+') => {
                    self.bump()?;
                    terms.push(self.term()?);
                }
                Tok::Op('-') => {
                    self.bump()?;
                    let t = self.term()?;
                    terms.push(Expr::raw_product(vec![Expr::int(-1), t]));
                }
                _ => break,
            }
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Expr::raw_sum(terms)
        })
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut factors = vec![self.unary()?];
        loop {
            match self.tok {
                Tok::Op('*') => {
                    self.bump()?;
                    factors.push(self.unary()?);
                }
                Tok::Op('/') => {
                    self.bump()?;
                    let at = self.pos;
                    let d = self.unary()?;
                    if d.simplify().is_zero() {
                        return Err(ParseError::DivisionByZero { pos: at });
                    }
                    factors.push(Expr::raw_pow(d, -1));
                }
                _ => break,
            }
        }
        Ok(if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            Expr::raw_product(factors)
        })
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.tok == Tok::Op('-') {
            self.bump()?;
            let inner = self.unary()?;
            return Ok(Expr::raw_product(vec![Expr::int(-1), inner]));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let at = self.pos;
        let base = self.primary()?;
        if self.tok != Tok::Op('^') {
            return Ok(base);
        }
        self.bump()?;
        let k = self.exponent()?;
        if k < 0 && base.simplify().is_zero() {
            return Err(ParseError::DivisionByZero { pos: at });
        }
        Ok(Expr::raw_pow(base, k))
    }

    fn small_int(&self, v: &BigInt) -> Result<i64, ParseError> {
        i64::try_from(v).map_err(|_| self.error("exponent out of range".into()))
    }

    fn exponent(&mut self) -> Result<i64, ParseError> {
        if self.tok == Tok::Op('(') {
            self.bump()?;
            let neg = self.tok == Tok::Op('-');
            if neg {
                self.bump()?;
            }
            let v = match &self.tok {
                Tok::Int(v) => self.small_int(v)?,
                _ => return Err(self.error("exponent must be an integer literal".into())),
            };
            self.bump()?;
            self.expect(')')?;
            return Ok(if neg { -v } else { v });
        }
        let neg = self.tok == Tok::Op('-');
        if neg {
            self.bump()?;
        }
        let v = match &self.tok {
            Tok::Int(v) => self.small_int(v)?,
            _ => return Err(self.error("exponent must be an integer literal".into())),
        };
        self.bump()?;
        let v = if neg { -v } else { v };
        if self.tok == Tok::Op('^') {
            self.bump()?;
            let inner = self.exponent()?;
            let inner = u32::try_from(inner).map_err(|_| self.error("negative exponent of an exponent".into()))?;
            return v
                .checked_pow(inner)
                .ok_or_else(|| self.error("exponent out of range".into()));
        }
        Ok(v)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.tok.clone() {
            Tok::Int(v) => {
                self.bump()?;
                Ok(Expr::constant(BigRational::from_integer(v)))
            }
            Tok::Ident(name) => {
                let at = self.pos;
                self.bump()?;
                if let Some(f) = Func::from_name(&name) {
                    self.expect('(')?;
                    let arg = self.expr()?;
                    self.expect(')')?;
                    return Ok(Expr::raw_func(f, arg));
                }
                self.symbols
                    .lookup(&name)
                    .map(Expr::sym)
                    .ok_or(ParseError::UnknownIdentifier { name, pos: at })
            }
            Tok::Op('(') => {
                self.bump()?;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::End => Err(self.error("unexpected end of input".into())),
            t => Err(self.error(format!("unexpected token {t:?}"))),
        }
    }
}

/// Parse `text` against the registered symbols; the result is canonical.
pub fn parse(text: &str, symbols: &SymbolTable) -> Result<Expr, ParseError> {
    let mut p = Parser {
        lexer: Lexer { src: text, pos: 0 },
        tok: Tok::End,
        pos: 0,
        symbols,
    };
    p.bump()?;
    let e = p.expr()?;
    if p.tok != Tok::End {
        return Err(p.error("trailing input".into()));
    }
    Ok(e.simplify())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::Role;

    fn table() -> SymbolTable {
        let mut t = SymbolTable::new();
        for n in ["t", "th", "r", "r_t", "r_th"] {
            t.register(n, Role::Parameter).unwrap();
        }
        t
    }

    #[test]
    fn literals() {
        let t = table();
        assert!(parse("0", &t).unwrap().is_zero());
        assert_eq!(parse("3/6", &t).unwrap(), Expr::ratio(1, 2));
        assert_eq!(parse(" - 4 ", &t).unwrap(), Expr::int(-4));
    }

    #[test]
    fn precedence_and_associativity() {
        let t = table();
        assert_eq!(parse("2^3^2", &t).unwrap(), Expr::int(512));
        assert_eq!(parse("-2^2", &t).unwrap(), Expr::int(-4));
        assert_eq!(parse("8/2/2", &t).unwrap(), Expr::int(2));
        assert_eq!(parse("1 - 2 - 3", &t).unwrap(), Expr::int(-4));
        assert_eq!(parse("r^-2", &t).unwrap(), parse("1/(r*r)", &t).unwrap());
        assert_eq!(parse("r^(-1)", &t).unwrap(), parse("1/r", &t).unwrap());
    }

    #[test]
    fn errors_carry_positions() {
        let t = table();
        assert_eq!(
            parse("r + q", &t),
            Err(ParseError::UnknownIdentifier {
                name: "q".into(),
                pos: 4
            })
        );
        assert!(matches!(parse("r +", &t), Err(ParseError::Syntax { pos: 3, .. })));
        assert!(matches!(parse("r ^ r", &t), Err(ParseError::Syntax { pos: 4, .. })));
        assert!(matches!(parse("(r", &t), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse("r $ 2", &t), Err(ParseError::Syntax { pos: 2, .. })));
        assert_eq!(parse("1/(r - r)", &t), Err(ParseError::DivisionByZero { pos: 2 }));
    }

    #[test]
    fn lemniscate_entry_prints_back() {
        let t = table();
        let e = parse("-2*r - r_th^2/r", &t).unwrap();
        let again = parse(&e.to_string(), &t).unwrap();
        assert_eq!(e, again);
        assert_eq!(e.to_string(), "-r_th^2/r - 2*r");
    }

    #[test]
    fn powers_of_sums_in_denominators_print_back() {
        let t = table();
        for text in ["1/(1 - 2*r)^2", "r_th/(3*r*(1 + r)^2)", "(r + 1)^-3"] {
            let e = parse(text, &t).unwrap();
            assert_eq!(parse(&e.to_string(), &t).unwrap(), e, "{text}");
        }
        assert_eq!(parse("1/(1 - 2*r)^2", &t).unwrap(), parse("(1 - 2*r)^-2", &t).unwrap());
    }
}
