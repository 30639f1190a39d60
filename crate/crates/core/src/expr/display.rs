//! Infix printing. The output re-parses (in the CLI grammar) to the same
//! canonical tree, which the round-trip tests rely on.

use std::fmt::{self, Write};

use num_traits::{One, Signed};

use super::{Expr, Kind, Rational};

const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const POWER: u8 = 3;

fn is_negative(e: &Expr) -> bool {
    match e.kind() {
        Kind::Num(q) => q.is_negative(),
        Kind::Mul(fs) => matches!(fs[0].kind(), Kind::Num(q) if q.is_negative()),
        _ => false,
    }
}

fn write_exponent(out: &mut String, e: &Rational) {
    if e.is_integer() && e.is_positive() {
        let _ = write!(out, "^{}", e.numer());
    } else if e.is_integer() {
        let _ = write!(out, "^({})", e.numer());
    } else {
        let _ = write!(out, "^({}/{})", e.numer(), e.denom());
    }
}

fn render(e: &Expr, prec: u8, out: &mut String) {
    match e.kind() {
        Kind::Num(q) => {
            let plain = q.is_integer() && !q.is_negative();
            if !plain && prec >= PRODUCT {
                out.push('(');
            }
            if q.is_integer() {
                let _ = write!(out, "{}", q.numer());
            } else {
                let _ = write!(out, "{}/{}", q.numer(), q.denom());
            }
            if !plain && prec >= PRODUCT {
                out.push(')');
            }
        }
        Kind::Coord(s) | Kind::Param(s) => out.push_str(s),
        Kind::Opaque(c) => {
            if c.derivs.is_empty() {
                out.push_str(&c.name);
            } else {
                out.push_str("D[");
                for (i, d) in c.derivs.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push_str(&c.args[*d as usize]);
                }
                let _ = write!(out, "]({})", c.name);
            }
        }
        Kind::Apply(f, u) => {
            out.push_str(f.name());
            out.push('(');
            render(u, 0, out);
            out.push(')');
        }
        Kind::Add(ts) => {
            let wrap = prec > SUM;
            if wrap {
                out.push('(');
            }
            for (i, t) in ts.iter().enumerate() {
                if i == 0 {
                    render(t, SUM, out);
                } else if is_negative(t) {
                    out.push_str(" - ");
                    render(&-t, SUM, out);
                } else {
                    out.push_str(" + ");
                    render(t, SUM, out);
                }
            }
            if wrap {
                out.push(')');
            }
        }
        Kind::Mul(fs) => {
            let wrap = prec >= POWER || (prec >= PRODUCT && is_negative(e));
            if wrap {
                out.push('(');
            }
            render_product(fs, out);
            if wrap {
                out.push(')');
            }
        }
        Kind::Pow(b, k) => {
            if k.is_negative() {
                let wrap = prec >= PRODUCT;
                if wrap {
                    out.push('(');
                }
                out.push_str("1/");
                render(&Expr::pow(b, -k), POWER, out);
                if wrap {
                    out.push(')');
                }
            } else {
                render(b, POWER + 1, out);
                write_exponent(out, k);
            }
        }
    }
}

fn render_product(fs: &[Expr], out: &mut String) {
    let mut coeff = Rational::one();
    let mut numer: Vec<Expr> = Vec::new();
    let mut denom: Vec<Expr> = Vec::new();
    for f in fs {
        match f.kind() {
            Kind::Num(q) => coeff = q.clone(),
            Kind::Pow(b, k) if k.is_negative() => denom.push(Expr::pow(b, -k)),
            _ => numer.push(f.clone()),
        }
    }
    if coeff.is_negative() {
        out.push('-');
        coeff = -coeff;
    }
    let mut parts: Vec<String> = Vec::new();
    if !coeff.numer().is_one() || numer.is_empty() {
        parts.push(coeff.numer().to_string());
    }
    for f in &numer {
        let mut s = String::new();
        render(f, PRODUCT, &mut s);
        parts.push(s);
    }
    out.push_str(&parts.join("*"));
    let mut den: Vec<String> = Vec::new();
    if !coeff.denom().is_one() {
        den.push(coeff.denom().to_string());
    }
    for f in &denom {
        let mut s = String::new();
        render(f, PRODUCT, &mut s);
        den.push(s);
    }
    match den.len() {
        0 => {}
        1 => {
            out.push('/');
            out.push_str(&den[0]);
        }
        _ => {
            let _ = write!(out, "/({})", den.join("*"));
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        render(self, 0, &mut s);
        f.write_str(&s)
    }
}
