//! Symbolic scalar expressions.
//!
//! An [`Expr`] is an immutable, reference-counted DAG node kept in canonical
//! form by its smart constructors: sums and products are flattened, sorted by
//! a total node order, like terms and like bases are merged, and rational
//! constants are folded exactly. Structural equality is therefore a cheap
//! (hash-guided) comparison, which the zero tester exploits before falling
//! back to sampling.

mod diff;
mod display;
mod eval;
mod zero;

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use indexmap::IndexMap;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use diff::DiffCache;
pub use eval::{
    eval, EvalContext, EvalError, ExprFunction, FnFunction, OpaqueFunction, PartialFn, Tape,
};
pub use zero::{is_zero, zero_test, Witness, ZeroVerdict};

/// Exact rational constant.
pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Unary elementary functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Elementary {
    Sin,
    Cos,
    Exp,
    Log,
    Abs,
    /// Derivative of `abs`; treated as locally constant.
    Sign,
}

impl Elementary {
    pub fn name(self) -> &'static str {
        match self {
            Elementary::Sin => "sin",
            Elementary::Cos => "cos",
            Elementary::Exp => "exp",
            Elementary::Log => "log",
            Elementary::Abs => "abs",
            Elementary::Sign => "sign",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Elementary::Sin,
            "cos" => Elementary::Cos,
            "exp" => Elementary::Exp,
            "log" => Elementary::Log,
            "abs" => Elementary::Abs,
            "sign" => Elementary::Sign,
            _ => return None,
        })
    }
}

/// An application of a named function of some chart coordinates, possibly
/// differentiated. `derivs` is a sorted multiset of argument positions.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct OpaqueCall {
    pub name: Arc<str>,
    pub args: Arc<[Arc<str>]>,
    pub derivs: Vec<u8>,
}

#[derive(Debug)]
pub enum Kind {
    Num(Rational),
    Coord(Arc<str>),
    Param(Arc<str>),
    Opaque(OpaqueCall),
    Apply(Elementary, Expr),
    Pow(Expr, Rational),
    Mul(Vec<Expr>),
    Add(Vec<Expr>),
}

#[derive(Debug)]
struct Node {
    kind: Kind,
    hash: u64,
}

/// Canonical symbolic scalar. Cloning is an `Arc` bump.
#[derive(Clone)]
pub struct Expr(Arc<Node>);

fn splitmix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn mix(h: u64, x: u64) -> u64 {
    splitmix(h.rotate_left(23) ^ x.wrapping_add(0x9E37_79B9_7F4A_7C15))
}

fn hash_bytes(tag: u64, bytes: &[u8]) -> u64 {
    // FNV-1a, then scrambled
    let mut h = 0xcbf2_9ce4_8422_2325u64 ^ tag;
    for b in bytes {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100_0000_01b3);
    }
    splitmix(h)
}

fn hash_rational(q: &Rational) -> u64 {
    let (sign, digits) = q.numer().to_u64_digits();
    let mut h = mix(7, sign as u64);
    for d in digits {
        h = mix(h, d);
    }
    for d in q.denom().to_u64_digits().1 {
        h = mix(h, d ^ 0x5555);
    }
    h
}

fn rank(k: &Kind) -> u8 {
    match k {
        Kind::Num(_) => 0,
        Kind::Coord(_) => 1,
        Kind::Param(_) => 2,
        Kind::Opaque(_) => 3,
        Kind::Apply(..) => 4,
        Kind::Pow(..) => 5,
        Kind::Mul(_) => 6,
        Kind::Add(_) => 7,
    }
}

impl Expr {
    fn raw(kind: Kind) -> Expr {
        let hash = match &kind {
            Kind::Num(q) => hash_rational(q),
            Kind::Coord(s) => hash_bytes(1, s.as_bytes()),
            Kind::Param(s) => hash_bytes(2, s.as_bytes()),
            Kind::Opaque(c) => {
                let mut h = hash_bytes(3, c.name.as_bytes());
                for a in c.args.iter() {
                    h = mix(h, hash_bytes(31, a.as_bytes()));
                }
                for d in &c.derivs {
                    h = mix(h, 1000 + *d as u64);
                }
                h
            }
            Kind::Apply(f, u) => mix(mix(4, *f as u64), u.hash()),
            Kind::Pow(b, e) => mix(mix(5, b.hash()), hash_rational(e)),
            Kind::Mul(fs) => fs.iter().fold(6, |h, f| mix(h, f.hash())),
            Kind::Add(ts) => ts.iter().fold(8, |h, t| mix(h, t.hash())),
        };
        Expr(Arc::new(Node { kind, hash }))
    }

    pub fn kind(&self) -> &Kind {
        &self.0.kind
    }

    /// Structural hash; equal expressions have equal hashes.
    pub fn hash(&self) -> u64 {
        self.0.hash
    }

    pub fn ptr_id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn num(q: Rational) -> Expr {
        Expr::raw(Kind::Num(q))
    }

    pub fn int(n: i64) -> Expr {
        Expr::num(Rational::from_integer(BigInt::from(n)))
    }

    pub fn rational(n: i64, d: i64) -> Expr {
        Expr::num(rat(n, d))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn coord(name: &str) -> Expr {
        Expr::raw(Kind::Coord(Arc::from(name)))
    }

    pub fn param(name: &str) -> Expr {
        Expr::raw(Kind::Param(Arc::from(name)))
    }

    /// Undifferentiated opaque function of the named coordinates.
    pub fn opaque(name: &str, args: &[&str]) -> Expr {
        let args: Vec<Arc<str>> = args.iter().map(|a| Arc::from(*a)).collect();
        Expr::opaque_call(OpaqueCall {
            name: Arc::from(name),
            args: args.into(),
            derivs: Vec::new(),
        })
    }

    pub fn opaque_call(mut call: OpaqueCall) -> Expr {
        call.derivs.sort_unstable();
        Expr::raw(Kind::Opaque(call))
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self.kind() {
            Kind::Num(q) => Some(q),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind(), Kind::Num(q) if q.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self.kind(), Kind::Num(q) if q.is_one())
    }

    /// Canonical sum of arbitrary terms.
    pub fn sum<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
        let mut constant = Rational::zero();
        let mut coeffs: IndexMap<Expr, Rational> = IndexMap::new();
        let mut accumulate = |t: &Expr, constant: &mut Rational| match t.kind() {
            Kind::Num(q) => *constant += q,
            _ => {
                let (c, rest) = split_coeff(t);
                *coeffs.entry(rest).or_insert_with(Rational::zero) += c;
            }
        };
        for t in terms {
            match t.kind() {
                Kind::Add(children) => {
                    for c in children {
                        accumulate(c, &mut constant);
                    }
                }
                _ => accumulate(&t, &mut constant),
            }
        }
        let mut out: Vec<Expr> = Vec::with_capacity(coeffs.len() + 1);
        for (rest, c) in coeffs {
            if c.is_zero() {
                continue;
            }
            out.push(scale_raw(rest, c));
        }
        if out.is_empty() {
            return Expr::num(constant);
        }
        if !constant.is_zero() {
            out.push(Expr::num(constant));
        }
        if out.len() == 1 {
            return out.pop().unwrap();
        }
        out.sort_by(total_cmp);
        Expr::raw(Kind::Add(out))
    }

    /// Canonical product of arbitrary factors.
    pub fn product<I: IntoIterator<Item = Expr>>(factors: I) -> Expr {
        let mut coeff = Rational::one();
        let mut powers: IndexMap<Expr, Rational> = IndexMap::new();
        let mut add_power = |f: &Expr| {
            let (base, e) = match f.kind() {
                Kind::Pow(b, e) => (b.clone(), e.clone()),
                _ => (f.clone(), Rational::one()),
            };
            *powers.entry(base).or_insert_with(Rational::zero) += e;
        };
        for f in factors {
            match f.kind() {
                Kind::Num(q) => {
                    if q.is_zero() {
                        return Expr::zero();
                    }
                    coeff *= q;
                }
                Kind::Mul(children) => {
                    for c in children {
                        match c.kind() {
                            Kind::Num(q) => coeff *= q,
                            _ => add_power(c),
                        }
                    }
                }
                _ => add_power(&f),
            }
        }
        let mut out: Vec<Expr> = Vec::with_capacity(powers.len() + 1);
        let mut needs_regroup = false;
        for (base, e) in powers {
            if e.is_zero() {
                continue;
            }
            let t = Expr::pow(&base, e);
            match t.kind() {
                Kind::Num(q) => coeff *= q,
                Kind::Mul(_) => {
                    needs_regroup = true;
                    out.push(t);
                }
                _ => out.push(t),
            }
        }
        if coeff.is_zero() {
            return Expr::zero();
        }
        if needs_regroup {
            out.push(Expr::num(coeff));
            return Expr::product(out);
        }
        if out.is_empty() {
            return Expr::num(coeff);
        }
        out.sort_by(total_cmp);
        if coeff.is_one() {
            if out.len() == 1 {
                return out.pop().unwrap();
            }
        } else {
            // a scaled sum is distributed so that `e − e` cancels term by term
            if let [single] = out.as_slice() {
                if let Kind::Add(ts) = single.kind() {
                    return Expr::sum(ts.iter().map(|t| t.scale(&coeff)));
                }
            }
            out.insert(0, Expr::num(coeff));
        }
        Expr::raw(Kind::Mul(out))
    }

    /// `base^e` with rational exponent.
    pub fn pow(base: &Expr, e: Rational) -> Expr {
        if e.is_zero() {
            return Expr::one();
        }
        if e.is_one() {
            return base.clone();
        }
        let integral = e.is_integer();
        match base.kind() {
            Kind::Num(c) => {
                if let Some(v) = rational_power(c, &e) {
                    return Expr::num(v);
                }
            }
            Kind::Pow(b, e1) if integral => return Expr::pow(b, e1 * &e),
            Kind::Mul(fs) if integral => {
                return Expr::product(fs.iter().map(|f| Expr::pow(f, e.clone())));
            }
            _ => {}
        }
        Expr::raw(Kind::Pow(base.clone(), e))
    }

    pub fn powi(&self, e: i64) -> Expr {
        Expr::pow(self, rat(e, 1))
    }

    pub fn sqrt(&self) -> Expr {
        Expr::pow(self, rat(1, 2))
    }

    pub fn recip(&self) -> Expr {
        self.powi(-1)
    }

    pub fn apply(f: Elementary, u: &Expr) -> Expr {
        use Elementary::*;
        if let Kind::Num(q) = u.kind() {
            let folded = match f {
                Sin if q.is_zero() => Some(Rational::zero()),
                Cos | Exp if q.is_zero() => Some(Rational::one()),
                Log if q.is_one() => Some(Rational::zero()),
                Abs => Some(q.abs()),
                Sign => Some(q.signum()),
                _ => None,
            };
            if let Some(v) = folded {
                return Expr::num(v);
            }
        }
        match (f, u.kind()) {
            (Log, Kind::Apply(Exp, v)) => return v.clone(),
            (Abs, Kind::Apply(Abs | Exp, _)) => return u.clone(),
            (Sign, Kind::Apply(Exp, _)) => return Expr::one(),
            (Abs, Kind::Pow(_, e)) if e.is_integer() && (e.numer() % 2u32).is_zero() => {
                return u.clone()
            }
            _ => {}
        }
        Expr::raw(Kind::Apply(f, u.clone()))
    }

    pub fn sin(&self) -> Expr {
        Expr::apply(Elementary::Sin, self)
    }
    pub fn cos(&self) -> Expr {
        Expr::apply(Elementary::Cos, self)
    }
    pub fn exp(&self) -> Expr {
        Expr::apply(Elementary::Exp, self)
    }
    pub fn log(&self) -> Expr {
        Expr::apply(Elementary::Log, self)
    }
    pub fn abs(&self) -> Expr {
        Expr::apply(Elementary::Abs, self)
    }
    pub fn sign(&self) -> Expr {
        Expr::apply(Elementary::Sign, self)
    }

    pub fn scale(&self, q: &Rational) -> Expr {
        Expr::product([Expr::num(q.clone()), self.clone()])
    }

    /// Rebuilds the expression through the smart constructors. On canonical
    /// input this is the identity, which the tests check.
    pub fn canon(&self) -> Expr {
        match self.kind() {
            Kind::Num(_) | Kind::Coord(_) | Kind::Param(_) => self.clone(),
            Kind::Opaque(c) => Expr::opaque_call(c.clone()),
            Kind::Apply(f, u) => Expr::apply(*f, &u.canon()),
            Kind::Pow(b, e) => Expr::pow(&b.canon(), e.clone()),
            Kind::Mul(fs) => Expr::product(fs.iter().map(Expr::canon)),
            Kind::Add(ts) => Expr::sum(ts.iter().map(Expr::canon)),
        }
    }

    /// Node-for-node identity (not just structural equality).
    pub fn same_tree(&self, other: &Expr) -> bool {
        self == other
    }

    /// Replaces coordinate, parameter or opaque-call leaves via `f`.
    /// Returning `None` keeps the leaf.
    pub fn substitute(&self, f: &dyn Fn(&Expr) -> Option<Expr>) -> Expr {
        let mut memo = std::collections::HashMap::new();
        self.substitute_memo(f, &mut memo)
    }

    fn substitute_memo(
        &self,
        f: &dyn Fn(&Expr) -> Option<Expr>,
        memo: &mut std::collections::HashMap<usize, Expr>,
    ) -> Expr {
        if let Some(e) = memo.get(&self.ptr_id()) {
            return e.clone();
        }
        let out = match self.kind() {
            Kind::Num(_) => self.clone(),
            Kind::Coord(_) | Kind::Param(_) | Kind::Opaque(_) => {
                f(self).unwrap_or_else(|| self.clone())
            }
            Kind::Apply(g, u) => Expr::apply(*g, &u.substitute_memo(f, memo)),
            Kind::Pow(b, e) => Expr::pow(&b.substitute_memo(f, memo), e.clone()),
            Kind::Mul(fs) => Expr::product(fs.iter().map(|x| x.substitute_memo(f, memo))),
            Kind::Add(ts) => Expr::sum(ts.iter().map(|x| x.substitute_memo(f, memo))),
        };
        memo.insert(self.ptr_id(), out.clone());
        out
    }

    /// Visits every distinct node once.
    pub fn visit(&self, f: &mut dyn FnMut(&Expr)) {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self.clone()];
        while let Some(e) = stack.pop() {
            if !seen.insert(e.ptr_id()) {
                continue;
            }
            f(&e);
            match e.kind() {
                Kind::Apply(_, u) | Kind::Pow(u, _) => stack.push(u.clone()),
                Kind::Mul(xs) | Kind::Add(xs) => stack.extend(xs.iter().cloned()),
                _ => {}
            }
        }
    }

    /// Number of distinct DAG nodes.
    pub fn node_count(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }
}

/// Splits `c * rest` with `c` the leading rational of a product.
fn split_coeff(t: &Expr) -> (Rational, Expr) {
    if let Kind::Mul(fs) = t.kind() {
        if let Kind::Num(c) = fs[0].kind() {
            let rest = if fs.len() == 2 {
                fs[1].clone()
            } else {
                Expr::raw(Kind::Mul(fs[1..].to_vec()))
            };
            return (c.clone(), rest);
        }
    }
    (Rational::one(), t.clone())
}

/// `c * rest` where `rest` is canonical, non-numeric and carries no coefficient.
fn scale_raw(rest: Expr, c: Rational) -> Expr {
    if c.is_one() {
        return rest;
    }
    match rest.kind() {
        Kind::Mul(fs) => {
            let mut v = Vec::with_capacity(fs.len() + 1);
            v.push(Expr::num(c));
            v.extend(fs.iter().cloned());
            Expr::raw(Kind::Mul(v))
        }
        _ => Expr::raw(Kind::Mul(vec![Expr::num(c), rest])),
    }
}

fn exact_root(n: &BigInt, k: u32) -> Option<BigInt> {
    if n.is_negative() {
        if k % 2 == 0 {
            return None;
        }
        return exact_root(&-n, k).map(|r| -r);
    }
    let r = n.nth_root(k);
    (num_traits::Pow::pow(&r, k) == *n).then_some(r)
}

fn rational_power(c: &Rational, e: &Rational) -> Option<Rational> {
    let num = e.numer().to_i32()?;
    let den = e.denom().to_u32()?;
    if num.abs() > 256 || den > 16 {
        return None;
    }
    if c.is_zero() {
        return (num > 0).then(Rational::zero);
    }
    let base = if den == 1 {
        c.clone()
    } else {
        Rational::new(exact_root(c.numer(), den)?, exact_root(c.denom(), den)?)
    };
    Some(base.pow(num))
}

/// Total order on canonical nodes used to sort sums and products.
pub fn total_cmp(a: &Expr, b: &Expr) -> Ordering {
    if Arc::ptr_eq(&a.0, &b.0) {
        return Ordering::Equal;
    }
    let (ka, kb) = (a.kind(), b.kind());
    rank(ka).cmp(&rank(kb)).then_with(|| match (ka, kb) {
        (Kind::Num(x), Kind::Num(y)) => x.cmp(y),
        (Kind::Coord(x), Kind::Coord(y)) | (Kind::Param(x), Kind::Param(y)) => x.cmp(y),
        (Kind::Opaque(x), Kind::Opaque(y)) => x.cmp(y),
        (Kind::Apply(f, u), Kind::Apply(g, v)) => f.cmp(g).then_with(|| total_cmp(u, v)),
        (Kind::Pow(b1, e1), Kind::Pow(b2, e2)) => total_cmp(b1, b2).then_with(|| e1.cmp(e2)),
        (Kind::Mul(xs), Kind::Mul(ys)) | (Kind::Add(xs), Kind::Add(ys)) => a
            .hash()
            .cmp(&b.hash())
            .then(xs.len().cmp(&ys.len()))
            .then_with(|| {
                xs.iter()
                    .zip(ys)
                    .map(|(x, y)| total_cmp(x, y))
                    .find(|o| o.is_ne())
                    .unwrap_or(Ordering::Equal)
            }),
        _ => unreachable!("rank already separates kinds"),
    })
}

impl PartialEq for Expr {
    fn eq(&self, other: &Expr) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.hash() == other.hash() && total_cmp(self, other) == Ordering::Equal)
    }
}

impl Eq for Expr {}

impl Hash for Expr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(total_cmp(self, other))
    }
}

impl Ord for Expr {
    fn cmp(&self, other: &Self) -> Ordering {
        total_cmp(self, other)
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}

impl From<Rational> for Expr {
    fn from(q: Rational) -> Expr {
        Expr::num(q)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, |$a:ident, $b:ident| $body:expr) => {
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                let ($a, $b) = (&self, &rhs);
                $body
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                let ($a, $b) = (&self, rhs);
                $body
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                let ($a, $b) = (self, &rhs);
                $body
            }
        }
        impl $tr<&Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                let ($a, $b) = (self, rhs);
                $body
            }
        }
        impl $tr<i64> for Expr {
            type Output = Expr;
            fn $m(self, rhs: i64) -> Expr {
                let r = Expr::int(rhs);
                let ($a, $b) = (&self, &r);
                $body
            }
        }
        impl $tr<i64> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: i64) -> Expr {
                let r = Expr::int(rhs);
                let ($a, $b) = (self, &r);
                $body
            }
        }
    };
}

binop!(Add, add, |a, b| Expr::sum([a.clone(), b.clone()]));
binop!(Sub, sub, |a, b| Expr::sum([a.clone(), -b]));
binop!(Mul, mul, |a, b| Expr::product([a.clone(), b.clone()]));
binop!(Div, div, |a, b| Expr::product([a.clone(), b.recip()]));

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        self.scale(&rat(-1, 1))
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        Expr::sum(iter)
    }
}

impl std::iter::Product for Expr {
    fn product<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        Expr::product(iter)
    }
}
