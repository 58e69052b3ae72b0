//! Recursive-descent parser for the polynomial grammar:
//!
//! ```text
//! expr   := ['-'] term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := coeff | var | '(' expr ')'
//! var    := 'z' INT ('^' INT)?
//! coeff  := '(' rat ('+'|'-') rat 'i' ')' | rat
//! rat    := INT ('/' INT)?
//! ```
//!
//! Whitespace is insignificant. Variables are `z1..zn`, 1-based. A single
//! leading `-` is accepted at the start of any `expr`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::{GaussRat, Monomial, Poly, PolyError};

pub fn parse(text: &str, nvars: usize) -> Result<Poly, PolyError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, nvars };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    nvars: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> PolyError {
        PolyError::Syntax { offset: self.pos, message: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), PolyError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Poly, PolyError> {
        let negate_first = self.eat(b'-');
        let first = self.term()?;
        let mut acc = if negate_first { -first } else { first };
        loop {
            if self.eat(b'+') {
                acc = &acc + &self.term()?;
            } else if self.eat(b'-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Poly, PolyError> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly, PolyError> {
        match self.peek() {
            Some(b'z') => self.var(),
            Some(c) if c.is_ascii_digit() => {
                let r = self.rat()?;
                Ok(Poly::constant(self.nvars, GaussRat::new(r, BigRational::zero())))
            }
            Some(b'(') => {
                let save = self.pos;
                if let Some(c) = self.try_complex_coeff()? {
                    return Ok(Poly::constant(self.nvars, c));
                }
                self.pos = save;
                self.expect(b'(')?;
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(_) => Err(self.err("expected a coefficient, variable or '('")),
            None => Err(self.err("unexpected end of input")),
        }
    }

    /// `'(' rat ('+'|'-') rat 'i' ')'`; returns `None` (without consuming
    /// meaningfully) if the parenthesised text is not of this shape.
    fn try_complex_coeff(&mut self) -> Result<Option<GaussRat>, PolyError> {
        self.expect(b'(')?;
        if !matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            return Ok(None);
        }
        let re = self.rat()?;
        let neg = match self.peek() {
            Some(b'+') => false,
            Some(b'-') => true,
            _ => return Ok(None),
        };
        self.pos += 1;
        if !matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            return Ok(None);
        }
        let im = self.rat()?;
        if !self.eat(b'i') {
            return Ok(None);
        }
        if !self.eat(b')') {
            return Ok(None);
        }
        Ok(Some(GaussRat::new(re, if neg { -im } else { im })))
    }

    fn int(&mut self) -> Result<BigInt, PolyError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(digits.parse().expect("digit string parses"))
    }

    fn small_int(&mut self) -> Result<u32, PolyError> {
        let at = self.pos;
        let v = self.int()?;
        u32::try_from(v).map_err(|_| PolyError::Syntax { offset: at, message: "integer too large".into() })
    }

    fn rat(&mut self) -> Result<BigRational, PolyError> {
        let num = self.int()?;
        if self.eat(b'/') {
            let at = self.pos;
            let den = self.int()?;
            if den.is_zero() {
                return Err(PolyError::Syntax { offset: at, message: "zero denominator".into() });
            }
            Ok(BigRational::new(num, den))
        } else {
            Ok(BigRational::from_integer(num))
        }
    }

    fn var(&mut self) -> Result<Poly, PolyError> {
        let at = self.pos;
        self.expect(b'z')?;
        // The index must follow 'z' directly.
        if !matches!(self.src.get(self.pos), Some(c) if c.is_ascii_digit()) {
            return Err(self.err("expected variable index after 'z'"));
        }
        let idx = self.small_int()? as usize;
        if idx == 0 || idx > self.nvars {
            return Err(PolyError::VariableOutOfRange { offset: at, index: idx, nvars: self.nvars });
        }
        let exp = if self.eat(b'^') { self.small_int()? } else { 1 };
        let mut m = Monomial::one(self.nvars);
        m.0[idx - 1] = exp;
        Ok(Poly::monomial(self.nvars, m, GaussRat::from_int(1)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial() {
        let p = parse("z1^2*z2", 2).unwrap();
        assert_eq!(p.num_terms(), 1);
        assert_eq!(p.coeff(&Monomial(vec![2, 1])), GaussRat::from_int(1));
    }

    #[test]
    fn complex_coefficient() {
        let p = parse("(1/2+3i)*z1 - z2", 2).unwrap();
        assert_eq!(p.num_terms(), 2);
        assert_eq!(p.coeff(&Monomial(vec![1, 0])), GaussRat::from_parts((1, 2), (3, 1)));
        assert_eq!(p.coeff(&Monomial(vec![0, 1])), GaussRat::from_int(-1));
    }

    #[test]
    fn zero() {
        let p = parse("0", 3).unwrap();
        assert!(p.is_zero());
        assert_eq!(p.nvars(), 3);
    }

    #[test]
    fn nested_parentheses_and_whitespace() {
        let p = parse(" ( z1 + 1 ) * (z1 - 1) ", 1).unwrap();
        assert_eq!(p, parse("z1^2 - 1", 1).unwrap());
        assert_eq!(parse("-(z1 - z2)", 2).unwrap(), parse("z2 - z1", 2).unwrap());
    }

    #[test]
    fn errors_carry_offsets() {
        match parse("z1 + * z2", 2) {
            Err(PolyError::Syntax { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("unexpected {other:?}"),
        }
        match parse("z1 + z3", 2) {
            Err(PolyError::VariableOutOfRange { offset, index, nvars }) => {
                assert_eq!((offset, index, nvars), (5, 3, 2))
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("z0", 2), Err(PolyError::VariableOutOfRange { .. })));
        assert!(matches!(parse("1/0", 1), Err(PolyError::Syntax { .. })));
        assert!(matches!(parse("z1 z2", 2), Err(PolyError::Syntax { .. })));
        assert!(matches!(parse("", 2), Err(PolyError::Syntax { .. })));
    }

    #[test]
    fn print_parse_roundtrip_on_samples() {
        for s in [
            "z1^2*z2",
            "(1/2+3i)*z1 - z2",
            "-(1/2-3i)*z1*z2^3 + 7",
            "-(0+2i)",
            "z1 - 1/3*z2 + (0+1i)*z3^4",
        ] {
            let p = parse(s, 3).unwrap();
            let printed = p.to_string();
            assert_eq!(parse(&printed, 3).unwrap(), p, "{s} -> {printed}");
            assert_eq!(parse(&printed, 3).unwrap().to_string(), printed);
        }
    }
}
