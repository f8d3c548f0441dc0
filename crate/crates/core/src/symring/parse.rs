use num_bigint::BigInt;

use super::var::{Var, MAX_COORDS};
use super::{Expr, SymError, Q};

/// Parses the expression grammar: integers, `+ - * / ^`, parentheses,
/// symbols `v1..v9`, jets `v1_x`, `v1_xx`, and `exp(vk)`, `log(vk)`.
pub fn parse(src: &str) -> Result<Expr, SymError> {
    let mut p = Parser {
        chars: src.chars().collect(),
        pos: 0,
    };
    let e = p.sum()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.err(format!("unexpected `{}`", p.chars[p.pos])));
    }
    Ok(e)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn line_col(&self, pos: usize) -> (usize, usize) {
        let mut line = 1;
        let mut col = 1;
        for &c in &self.chars[..pos.min(self.chars.len())] {
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        }
        (line, col)
    }

    fn err(&self, msg: String) -> SymError {
        self.err_at(self.pos, msg)
    }

    fn err_at(&self, pos: usize, msg: String) -> SymError {
        let (line, col) = self.line_col(pos);
        SymError::Parse { line, col, msg }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> Result<(), SymError> {
        match self.peek() {
            Some(d) if d == c => {
                self.pos += 1;
                Ok(())
            }
            Some(d) => Err(self.err(format!("expected `{c}`, found `{d}`"))),
            None => Err(self.err(format!("expected `{c}`, found end of input"))),
        }
    }

    fn sum(&mut self) -> Result<Expr, SymError> {
        let mut acc = self.product()?;
        loop {
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    acc += &self.product()?;
                }
                Some('-') => {
                    self.pos += 1;
                    acc -= &self.product()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn product(&mut self) -> Result<Expr, SymError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                Some('/') => {
                    self.pos += 1;
                    let at = self.pos;
                    let d = self.unary()?;
                    if d.is_zero() {
                        return Err(self.err_at(at, "division by zero".into()));
                    }
                    acc = (&acc / &d)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, SymError> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, SymError> {
        let base = self.atom()?;
        if self.peek() != Some('^') {
            return Ok(base);
        }
        self.pos += 1;
        let neg = match self.peek() {
            Some('-') => {
                self.pos += 1;
                true
            }
            Some('(') => {
                // Allow `^(-2)`.
                let save = self.pos;
                self.pos += 1;
                if self.peek() == Some('-') {
                    self.pos += 1;
                    let at = self.pos;
                    let n = self.integer()?;
                    self.expect(')')?;
                    return self.raise(base, -n, at);
                }
                self.pos = save + 1;
                let at = self.pos;
                let n = self.integer()?;
                self.expect(')')?;
                return self.raise(base, n, at);
            }
            _ => false,
        };
        let at = self.pos;
        let n = self.integer()?;
        self.raise(base, if neg { -n } else { n }, at)
    }

    fn raise(&self, base: Expr, n: i64, at: usize) -> Result<Expr, SymError> {
        let e = i32::try_from(n).map_err(|_| self.err_at(at, "exponent too large".into()))?;
        if e < 0 && base.is_zero() {
            return Err(self.err_at(at, "division by zero".into()));
        }
        base.pow(e)
    }

    fn integer(&mut self) -> Result<i64, SymError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer exponent".into()));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse()
            .map_err(|_| self.err_at(start, "exponent too large".into()))
    }

    fn atom(&mut self) -> Result<Expr, SymError> {
        match self.peek() {
            None => Err(self.err("unexpected end of input".into())),
            Some('(') => {
                self.pos += 1;
                let e = self.sum()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let s: String = self.chars[start..self.pos].iter().collect();
                let n: BigInt = s.parse().expect("digits");
                Ok(Expr::constant(Q::from_integer(n)))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.chars.len()
                    && (self.chars[self.pos].is_ascii_alphanumeric() || self.chars[self.pos] == '_')
                {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                match name.as_str() {
                    "exp" | "log" => {
                        self.expect('(')?;
                        self.skip_ws();
                        let at = self.pos;
                        let inner = self.sum()?;
                        self.expect(')')?;
                        let k = coord_of(&inner).ok_or_else(|| {
                            self.err_at(at, format!("{name} takes a single coordinate vk"))
                        })?;
                        Ok(if name == "exp" {
                            Expr::exp_of(k)
                        } else {
                            Expr::log_of(k)
                        })
                    }
                    _ => symbol(&name).map(Expr::var).ok_or_else(|| {
                        let (line, col) = self.line_col(start);
                        SymError::UnknownSymbol { name, line, col }
                    }),
                }
            }
            Some(c) => Err(self.err(format!("unexpected `{c}`"))),
        }
    }
}

fn coord_of(e: &Expr) -> Option<usize> {
    let vars = e.vars();
    if vars.len() != 1 {
        return None;
    }
    match *vars.iter().next()? {
        Var::Coord(k) if *e == Expr::coord(k) => Some(k),
        _ => None,
    }
}

fn symbol(name: &str) -> Option<Var> {
    let rest = name.strip_prefix('v')?;
    let (digits, suffix) = match rest.find('_') {
        Some(i) => (&rest[..i], &rest[i..]),
        None => (rest, ""),
    };
    if digits.len() != 1 || !digits.starts_with(|c: char| c.is_ascii_digit()) {
        return None;
    }
    let k: usize = digits.parse().ok()?;
    if k == 0 || k > MAX_COORDS {
        return None;
    }
    match suffix {
        "" => Some(Var::Coord(k - 1)),
        "_x" => Some(Var::Jet1(k - 1)),
        "_xx" => Some(Var::Jet2(k - 1)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_cancels() {
        assert!(parse("(v1+v2)^2 - v1^2 - 2*v1*v2 - v2^2")
            .unwrap()
            .is_zero());
    }

    #[test]
    fn generator_powers() {
        let e = parse("exp(v2)*exp(v2)").unwrap();
        assert_eq!(e.to_string(), "exp(v2)^2");
        assert_eq!(e.numer().len(), 1);
        assert_eq!(e.numer().total_degree(), 2);
    }

    #[test]
    fn reduced_fraction() {
        let e = parse("1/(v2^2)").unwrap();
        assert_eq!(e.to_string(), "1/v2^2");
        assert_eq!(parse("v2^-2").unwrap(), e);
    }

    #[test]
    fn errors_carry_positions() {
        match parse("v1 +\n  * v2") {
            Err(SymError::Parse { line, col, .. }) => assert_eq!((line, col), (2, 3)),
            other => panic!("{other:?}"),
        }
        match parse("v1 + w") {
            Err(SymError::UnknownSymbol { name, col, .. }) => {
                assert_eq!(name, "w");
                assert_eq!(col, 6);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("v1/(v2-v2)"), Err(SymError::Parse { .. })));
        assert!(matches!(parse("exp(v1+v2)"), Err(SymError::Parse { .. })));
    }
}
