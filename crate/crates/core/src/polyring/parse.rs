use std::sync::Arc;

use super::{PolyError, PolyRing, Polynomial};

/// Parses the text grammar
///
/// ```text
/// expr   := ['+'|'-'] term (('+'|'-') term)*
/// term   := factor (['*'] factor)*
/// factor := atom ['^' digits]
/// atom   := digits | name | '(' expr ')'
/// ```
///
/// Names are the ring's variable names, or `x0..x{n-1}`.
pub fn parse_polynomial(ring: &Arc<PolyRing>, text: &str) -> Result<Polynomial, PolyError> {
    let mut p = Parser {
        ring,
        src: text.as_bytes(),
        pos: 0,
    };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(out)
}

struct Parser<'a> {
    ring: &'a Arc<PolyRing>,
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> PolyError {
        PolyError::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
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

    fn expr(&mut self) -> Result<Polynomial, PolyError> {
        let mut negate = false;
        match self.peek() {
            Some(b'-') => {
                negate = true;
                self.pos += 1;
            }
            Some(b'+') => self.pos += 1,
            _ => {}
        }
        let first = self.term()?;
        let mut acc = if negate { first.neg() } else { first };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.try_add(&t)?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.try_sub(&t)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, PolyError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let f = self.factor()?;
                    acc = acc.try_mul(&f)?;
                }
                Some(c) if c == b'(' || c.is_ascii_alphanumeric() || c == b'_' => {
                    let f = self.factor()?;
                    acc = acc.try_mul(&f)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Polynomial, PolyError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let e = self.digits()?;
            let e: u64 = e.parse().map_err(|_| self.err("exponent too large"))?;
            if e > u32::MAX as u64 {
                return Err(self.err("exponent too large"));
            }
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn digits(&mut self) -> Result<String, PolyError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn atom(&mut self) -> Result<Polynomial, PolyError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let d = self.digits()?;
                let md = self.ring.modulus();
                // reduce digit by digit so arbitrarily long literals are fine
                let mut v = 0u64;
                for ch in d.bytes() {
                    v = md.add(md.mul(v, 10 % md.value()), (ch - b'0') as u64 % md.value());
                }
                Ok(Polynomial::constant(self.ring, v as i128))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default();
                match self.ring.var_index(name) {
                    Some(i) => Polynomial::var(self.ring, i),
                    None => {
                        self.pos = start;
                        Err(self.err(&format!("unknown variable `{name}`")))
                    }
                }
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring() -> Arc<PolyRing> {
        PolyRing::new(5, vec!["x".into(), "y".into()]).unwrap()
    }

    #[test]
    fn parses_common_shapes() {
        let r = ring();
        let a = parse_polynomial(&r, "2x^2y + 3*y - 1").unwrap();
        let b = parse_polynomial(&r, "-1 + 3 y + 2*x*x*y").unwrap();
        assert_eq!(a, b);
        let c = parse_polynomial(&r, "(x + y)^5").unwrap();
        assert_eq!(c, parse_polynomial(&r, "x^5 + y^5").unwrap());
        let d = parse_polynomial(&r, "x0 * x1").unwrap();
        assert_eq!(d, parse_polynomial(&r, "x y").unwrap());
        assert!(parse_polynomial(&r, "12345678901234567890123").is_ok());
    }

    #[test]
    fn reports_position() {
        let r = ring();
        match parse_polynomial(&r, "x + z") {
            Err(PolyError::Parse { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_polynomial(&r, "x +"), Err(PolyError::Parse { pos: 3, .. })));
        assert!(matches!(parse_polynomial(&r, "(x"), Err(PolyError::Parse { .. })));
        assert!(matches!(parse_polynomial(&r, "x^"), Err(PolyError::Parse { .. })));
    }
}
