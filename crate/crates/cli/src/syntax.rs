//! Infix expression grammar of problem files.
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := atom ('^' unary)?
//! atom    := number | name | name '(' sum ')' | 'D' '[' names ']' '(' name ')' | '(' sum ')'
//! ```
//!
//! Exponents must fold to rational constants. Decimal literals are read
//! exactly. The printer of the core crate emits this grammar, so printed
//! expressions parse back to the same canonical tree.

use biconformal::expr::{Elementary, Expr, Rational};

/// A declared function: opaque when `body` is `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionDecl {
    pub name: String,
    pub args: Vec<String>,
    pub body: Option<Expr>,
}

/// Names an expression may refer to.
pub struct Scope<'a> {
    pub coordinates: &'a [String],
    pub functions: &'a [FunctionDecl],
}

impl Scope<'_> {
    fn function(&self, name: &str) -> Option<&FunctionDecl> {
        self.functions.iter().find(|f| f.name == name)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SyntaxErrorKind {
    Message(String),
    Undeclared(String),
}

/// Error at a character offset into the parsed text.
#[derive(Clone, Debug, PartialEq)]
pub struct SyntaxError {
    pub offset: usize,
    pub kind: SyntaxErrorKind,
}

fn fail<T>(offset: usize, msg: impl Into<String>) -> Result<T, SyntaxError> {
    Err(SyntaxError { offset, kind: SyntaxErrorKind::Message(msg.into()) })
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Name(String),
    Sym(char),
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>, SyntaxError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(char::is_ascii_digit)) {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            out.push((start, Tok::Num(chars[start..i].iter().collect())));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((start, Tok::Name(chars[start..i].iter().collect())));
        } else if "+-*/^()[],".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            return fail(i, format!("unexpected character `{c}`"));
        }
    }
    Ok(out)
}

/// Exact value of a decimal literal such as `12`, `0.25` or `1.5e-3`.
pub fn parse_decimal(text: &str) -> Option<Rational> {
    let (mantissa, exp) = match text.find(['e', 'E']) {
        Some(k) => (&text[..k], text[k + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if (int.is_empty() && frac.is_empty()) || !(int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())) {
        return None;
    }
    let shift = exp - frac.len() as i32;
    if shift.abs() > 400 {
        return None;
    }
    let digits = format!("{int}{frac}");
    let digits = if digits.is_empty() { "0".to_string() } else { digits };
    let zeros = "0".repeat(shift.unsigned_abs() as usize);
    let s = if shift >= 0 { format!("{digits}{zeros}") } else { format!("{digits}/1{zeros}") };
    s.parse().ok()
}

struct Parser<'a, 's> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    scope: &'a Scope<'s>,
}

impl Parser<'_, '_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.0)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), SyntaxError> {
        if self.eat(c) {
            Ok(())
        } else {
            fail(self.offset(), format!("expected `{c}`"))
        }
    }

    fn name(&mut self) -> Result<(usize, String), SyntaxError> {
        match self.toks.get(self.pos) {
            Some((at, Tok::Name(n))) => {
                let r = (*at, n.clone());
                self.pos += 1;
                Ok(r)
            }
            _ => fail(self.offset(), "expected a name"),
        }
    }

    fn sum(&mut self) -> Result<Expr, SyntaxError> {
        let mut terms = vec![self.product()?];
        loop {
            if self.eat('+') {
                terms.push(self.product()?);
            } else if self.eat('-') {
                terms.push(-self.product()?);
            } else {
                return Ok(Expr::sum(terms));
            }
        }
    }

    fn product(&mut self) -> Result<Expr, SyntaxError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc * self.unary()?;
            } else if self.eat('/') {
                let at = self.offset();
                let d = self.unary()?;
                if d.is_zero() {
                    return fail(at, "division by zero");
                }
                acc = acc / d;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, SyntaxError> {
        if self.eat('-') {
            Ok(-self.unary()?)
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, SyntaxError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let at = self.offset();
        let e = self.unary()?;
        let Some(q) = e.as_rational() else {
            return fail(at, "exponent must be a rational constant");
        };
        if base.is_zero() && q <= &Rational::from_integer(0.into()) {
            return fail(at, "zero raised to a non-positive power");
        }
        Ok(Expr::pow(&base, q.clone()))
    }

    fn atom(&mut self) -> Result<Expr, SyntaxError> {
        let at = self.offset();
        match self.peek().cloned() {
            Some(Tok::Num(text)) => {
                self.pos += 1;
                match parse_decimal(&text) {
                    Some(q) => Ok(Expr::num(q)),
                    None => fail(at, format!("malformed number `{text}`")),
                }
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.sum()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Tok::Name(name)) => {
                self.pos += 1;
                if name == "D" && self.peek() == Some(&Tok::Sym('[')) {
                    return self.derivative();
                }
                self.named(at, &name)
            }
            Some(Tok::Sym(c)) => fail(at, format!("unexpected `{c}`")),
            None => fail(at, "unexpected end of expression"),
        }
    }

    /// `D[x,y](F)` after the `D`.
    fn derivative(&mut self) -> Result<Expr, SyntaxError> {
        self.expect('[')?;
        let mut coords = vec![self.name()?];
        while self.eat(',') {
            coords.push(self.name()?);
        }
        self.expect(']')?;
        self.expect('(')?;
        let (at, fname) = self.name()?;
        self.expect(')')?;
        let Some(f) = self.scope.function(&fname) else {
            return Err(SyntaxError { offset: at, kind: SyntaxErrorKind::Undeclared(fname) });
        };
        let mut e = Expr::opaque(&f.name, &f.args.iter().map(String::as_str).collect::<Vec<_>>());
        for (at, c) in coords {
            if !f.args.contains(&c) {
                return fail(at, format!("`{fname}` does not depend on `{c}`"));
            }
            e = e.diff(&c);
        }
        Ok(e)
    }

    fn named(&mut self, at: usize, name: &str) -> Result<Expr, SyntaxError> {
        if let Some(f) = Elementary::from_name(name) {
            self.expect('(')?;
            let u = self.sum()?;
            self.expect(')')?;
            return Ok(Expr::apply(f, &u));
        }
        if name == "sqrt" {
            self.expect('(')?;
            let u = self.sum()?;
            self.expect(')')?;
            return Ok(u.sqrt());
        }
        if self.scope.coordinates.iter().any(|c| c == name) {
            return Ok(Expr::coord(name));
        }
        let Some(f) = self.scope.function(name) else {
            return Err(SyntaxError { offset: at, kind: SyntaxErrorKind::Undeclared(name.to_string()) });
        };
        let args: Vec<&str> = f.args.iter().map(String::as_str).collect();
        if self.eat('(') {
            // explicit arguments must repeat the declaration
            let mut given = Vec::new();
            if !self.eat(')') {
                given.push(self.name()?.1);
                while self.eat(',') {
                    given.push(self.name()?.1);
                }
                self.expect(')')?;
            }
            if given != f.args {
                return fail(at, format!("`{name}` is declared with arguments ({})", f.args.join(", ")));
            }
        }
        Ok(Expr::opaque(name, &args))
    }
}

pub fn parse_expr(src: &str, scope: &Scope) -> Result<Expr, SyntaxError> {
    let toks = tokenize(src)?;
    let end = src.chars().count();
    let mut p = Parser { toks, pos: 0, end, scope };
    let e = p.sum()?;
    if p.pos < p.toks.len() {
        return fail(p.offset(), "unexpected trailing input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scope_parse(src: &str) -> Result<Expr, SyntaxError> {
        let coords = vec!["x".to_string(), "y".to_string()];
        let functions = vec![FunctionDecl { name: "F".into(), args: vec!["x".into(), "y".into()], body: None }];
        parse_expr(src, &Scope { coordinates: &coords, functions: &functions })
    }

    #[test]
    fn precedence_and_associativity() {
        let (x, y) = (Expr::coord("x"), Expr::coord("y"));
        assert_eq!(scope_parse("-x^2").unwrap(), -x.powi(2));
        assert_eq!(scope_parse("x - y - 1").unwrap(), &x - &y - Expr::one());
        assert_eq!(scope_parse("x/y/2").unwrap(), &x / &y / Expr::int(2));
        assert_eq!(scope_parse("x^(1/2)").unwrap(), x.sqrt());
        assert_eq!(scope_parse("sqrt(x)*sin(y)").unwrap(), x.sqrt() * y.sin());
    }

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse_decimal("0.25"), Some(biconformal::expr::rat(1, 4)));
        assert_eq!(parse_decimal("1.5e-3"), Some(biconformal::expr::rat(3, 2000)));
        assert_eq!(parse_decimal("12E2"), Some(biconformal::expr::rat(1200, 1)));
        assert_eq!(parse_decimal("1.2.3"), None);
    }

    #[test]
    fn opaque_functions_and_derivatives() {
        let f = Expr::opaque("F", &["x", "y"]);
        assert_eq!(scope_parse("F").unwrap(), f);
        assert_eq!(scope_parse("F(x, y)").unwrap(), f);
        assert_eq!(scope_parse("D[y,x](F)").unwrap(), f.diff("x").diff("y"));
        assert!(scope_parse("F(y, x)").is_err());
        assert!(scope_parse("D[z](F)").is_err());
    }

    #[test]
    fn errors_carry_offsets() {
        let e = scope_parse("x + zeta").unwrap_err();
        assert_eq!(e, SyntaxError { offset: 4, kind: SyntaxErrorKind::Undeclared("zeta".into()) });
        assert_eq!(scope_parse("x +").unwrap_err().offset, 3);
        assert_eq!(scope_parse("x ^ y").unwrap_err().offset, 4);
        assert_eq!(scope_parse("(x").unwrap_err().offset, 2);
        assert_eq!(scope_parse("x $ y").unwrap_err().offset, 2);
    }
}
