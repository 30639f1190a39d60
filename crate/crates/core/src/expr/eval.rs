//! Floating evaluation through compiled tapes, and the binding context that
//! gives opaque functions concrete values.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::{DiffCache, Elementary, Expr, Kind};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("symbol `{0}` is not bound in the evaluation context")]
    Unbound(String),
    #[error("{op} is undefined at argument {arg}")]
    Domain { op: &'static str, arg: f64 },
    #[error("non-finite value produced")]
    NonFinite,
    #[error("no regular sample point found after {0} attempts")]
    Singular(usize),
    #[error("invalid context: {0}")]
    InvalidContext(String),
}

/// A compiled partial derivative of an opaque function, taking the values of
/// its declared arguments.
pub type PartialFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Concrete stand-in for an opaque function symbol.
pub trait OpaqueFunction: Send + Sync {
    fn arity(&self) -> usize;
    /// Partial derivative for a sorted multiset of argument positions
    /// (empty = the value itself).
    fn partial(&self, derivs: &[u8]) -> PartialFn;
}

/// Binding backed by a user closure `(args, derivs) -> value`.
pub struct FnFunction {
    arity: usize,
    f: Arc<dyn Fn(&[f64], &[u8]) -> f64 + Send + Sync>,
}

impl FnFunction {
    pub fn new(arity: usize, f: impl Fn(&[f64], &[u8]) -> f64 + Send + Sync + 'static) -> Self {
        FnFunction { arity, f: Arc::new(f) }
    }
}

impl OpaqueFunction for FnFunction {
    fn arity(&self) -> usize {
        self.arity
    }

    fn partial(&self, derivs: &[u8]) -> PartialFn {
        let f = self.f.clone();
        let d = derivs.to_vec();
        Arc::new(move |x| f(x, &d))
    }
}

/// Binding given by an explicit closed-form body in its own argument names.
/// Derivatives come from symbolic differentiation of the body.
pub struct ExprFunction {
    args: Vec<String>,
    body: Expr,
    partials: Mutex<HashMap<Vec<u8>, PartialFn>>,
}

impl ExprFunction {
    pub fn new(args: &[&str], body: Expr) -> Result<Self, EvalError> {
        let mut bad = None;
        body.visit(&mut |e| match e.kind() {
            Kind::Opaque(c) => bad = Some(c.name.to_string()),
            Kind::Param(p) => bad = Some(p.to_string()),
            Kind::Coord(c) if !args.contains(&&**c) => bad = Some(c.to_string()),
            _ => {}
        });
        if let Some(name) = bad {
            return Err(EvalError::Unbound(name));
        }
        Ok(ExprFunction {
            args: args.iter().map(|s| s.to_string()).collect(),
            body,
            partials: Mutex::new(HashMap::new()),
        })
    }

    /// A smooth, strictly positive function of generic shape:
    /// `a + b exp(q(x)) + c sin(l(x))` with a small quadratic `q` and affine `l`.
    pub fn random(args: &[&str], rng: &mut impl Rng) -> Self {
        let xs: Vec<Expr> = args.iter().map(|a| Expr::coord(a)).collect();
        let mut coef = |lo: f64, hi: f64| float_to_rational(rng.gen_range(lo..hi));
        let a = coef(0.5, 1.0);
        let b = coef(0.5, 1.0);
        let c = coef(-0.2, 0.2);
        let mut q = Vec::new();
        let mut l = vec![Expr::num(coef(-1.0, 1.0))];
        for (i, x) in xs.iter().enumerate() {
            q.push(x.scale(&coef(-0.4, 0.4)));
            l.push(x.scale(&coef(-1.0, 1.0)));
            for y in &xs[i..] {
                q.push((x * y).scale(&coef(-0.15, 0.15)));
            }
        }
        let body = Expr::num(a)
            + Expr::num(b) * Expr::sum(q).exp()
            + Expr::num(c) * Expr::sum(l).sin();
        ExprFunction::new(args, body).expect("body built from its own arguments")
    }

    pub fn body(&self) -> &Expr {
        &self.body
    }
}

/// Rounds to a short dyadic rational so random coefficients stay exact and small.
pub(crate) fn float_to_rational(x: f64) -> super::Rational {
    super::rat((x * 1024.0).round() as i64, 1024)
}

impl OpaqueFunction for ExprFunction {
    fn arity(&self) -> usize {
        self.args.len()
    }

    fn partial(&self, derivs: &[u8]) -> PartialFn {
        let mut memo = self.partials.lock().unwrap_or_else(|p| p.into_inner());
        if let Some(f) = memo.get(derivs) {
            return f.clone();
        }
        let mut cache = DiffCache::new();
        let mut e = self.body.clone();
        for d in derivs {
            e = cache.diff(&e, &self.args[*d as usize]);
        }
        let names: Vec<&str> = self.args.iter().map(String::as_str).collect();
        let ctx = EvalContext::unbounded(&names);
        let tape = Tape::compile(&[e], &ctx).expect("closed-form body compiles");
        let f: PartialFn = Arc::new(move |x| {
            let mut vals = Vec::new();
            let mut mags = Vec::new();
            match tape.run(x, &mut vals, &mut mags) {
                Ok(()) => vals[tape.outputs[0] as usize],
                Err(_) => f64::NAN,
            }
        });
        memo.insert(derivs.to_vec(), f.clone());
        f
    }
}

/// Everything needed to turn symbols into numbers: the sampling box, bound
/// parameters and functions, and the zero-test settings.
#[derive(Clone)]
pub struct EvalContext {
    domain: Vec<(Arc<str>, f64, f64)>,
    params: BTreeMap<String, f64>,
    functions: BTreeMap<String, Arc<dyn OpaqueFunction>>,
    pub seed: u64,
    pub tolerance: f64,
    pub samples: usize,
    pub max_retries: usize,
}

impl EvalContext {
    pub fn new(domain: &[(&str, (f64, f64))]) -> Self {
        EvalContext {
            domain: domain
                .iter()
                .map(|(n, (a, b))| (Arc::from(*n), *a, *b))
                .collect(),
            params: BTreeMap::new(),
            functions: BTreeMap::new(),
            seed: 42,
            tolerance: 1e-9,
            samples: 32,
            max_retries: 200,
        }
    }

    fn unbounded(names: &[&str]) -> Self {
        let dom: Vec<(&str, (f64, f64))> = names.iter().map(|n| (*n, (-1.0, 1.0))).collect();
        EvalContext::new(&dom)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self
    }

    pub fn with_samples(mut self, k: usize) -> Self {
        self.samples = k;
        self
    }

    pub fn validate(&self) -> Result<(), EvalError> {
        if !(self.tolerance > 0.0) {
            return Err(EvalError::InvalidContext(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.samples == 0 {
            return Err(EvalError::InvalidContext("sample count must be at least 1".into()));
        }
        for (n, a, b) in &self.domain {
            if !(a < b) || !a.is_finite() || !b.is_finite() {
                return Err(EvalError::InvalidContext(format!(
                    "sampling interval for `{n}` is degenerate: [{a}, {b}]"
                )));
            }
        }
        Ok(())
    }

    pub fn coordinates(&self) -> impl Iterator<Item = &str> {
        self.domain.iter().map(|(n, _, _)| &**n)
    }

    pub fn dim(&self) -> usize {
        self.domain.len()
    }

    pub fn interval(&self, i: usize) -> (f64, f64) {
        (self.domain[i].1, self.domain[i].2)
    }

    pub fn coordinate_index(&self, name: &str) -> Option<usize> {
        self.domain.iter().position(|(n, _, _)| &**n == name)
    }

    pub fn bind_param(&mut self, name: &str, value: f64) {
        self.params.insert(name.to_string(), value);
    }

    pub fn bind_function(&mut self, name: &str, f: Arc<dyn OpaqueFunction>) {
        self.functions.insert(name.to_string(), f);
    }

    pub fn function(&self, name: &str) -> Option<&Arc<dyn OpaqueFunction>> {
        self.functions.get(name)
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.get(name).copied()
    }

    /// Binds every opaque symbol in `exprs` that has no binding yet to a
    /// random generic function. The stream is derived from the context seed
    /// and the symbol name, so bindings are reproducible and independent of
    /// discovery order.
    pub fn bind_random_functions<'a>(&mut self, exprs: impl IntoIterator<Item = &'a Expr>) {
        let mut found: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for e in exprs {
            e.visit(&mut |n| {
                if let Kind::Opaque(c) = n.kind() {
                    found
                        .entry(c.name.to_string())
                        .or_insert_with(|| c.args.iter().map(|a| a.to_string()).collect());
                }
            });
        }
        for (name, args) in found {
            if self.functions.contains_key(&name) {
                continue;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ super::hash_bytes(99, name.as_bytes()));
            let refs: Vec<&str> = args.iter().map(String::as_str).collect();
            self.functions
                .insert(name, Arc::new(ExprFunction::random(&refs, &mut rng)));
        }
    }

    /// Uniform random point in the box.
    pub fn sample_point(&self, rng: &mut impl Rng) -> Vec<f64> {
        self.domain
            .iter()
            .map(|(_, a, b)| rng.gen_range(*a..*b))
            .collect()
    }
}

enum Op {
    Const(f64),
    Var(usize),
    Call(PartialFn, Box<[usize]>),
    Add(u32, u32),
    Mul(u32, u32),
    PowI(u32, i32),
    PowF(u32, f64),
    Apply(Elementary, u32),
}

/// Straight-line program evaluating a batch of expressions with shared
/// subterms. Alongside each value it tracks the largest magnitude seen in the
/// subtree, which serves as the cancellation scale in zero tests.
pub struct Tape {
    ops: Vec<Op>,
    operands: Vec<u32>,
    pub(crate) outputs: Vec<u32>,
}

impl Tape {
    pub fn compile(exprs: &[Expr], ctx: &EvalContext) -> Result<Tape, EvalError> {
        let mut b = TapeBuilder {
            ctx,
            tape: Tape { ops: Vec::new(), operands: Vec::new(), outputs: Vec::new() },
            slots: HashMap::new(),
            partials: HashMap::new(),
        };
        for e in exprs {
            let s = b.slot(e)?;
            b.tape.outputs.push(s);
        }
        Ok(b.tape)
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn output_count(&self) -> usize {
        self.outputs.len()
    }

    /// Evaluates every slot; `vals`/`mags` are resized as needed and reused.
    pub fn run(&self, point: &[f64], vals: &mut Vec<f64>, mags: &mut Vec<f64>) -> Result<(), EvalError> {
        vals.clear();
        mags.clear();
        let mut buf = [0.0f64; 16];
        for op in &self.ops {
            let (v, m) = match op {
                Op::Const(c) => (*c, c.abs()),
                Op::Var(i) => (point[*i], point[*i].abs()),
                Op::Call(f, idx) => {
                    let v = if idx.len() <= buf.len() {
                        for (k, i) in idx.iter().enumerate() {
                            buf[k] = point[*i];
                        }
                        f(&buf[..idx.len()])
                    } else {
                        let xs: Vec<f64> = idx.iter().map(|i| point[*i]).collect();
                        f(&xs)
                    };
                    (v, v.abs())
                }
                Op::Add(lo, hi) => {
                    let mut s = 0.0;
                    let mut m = 0.0f64;
                    for k in &self.operands[*lo as usize..*hi as usize] {
                        s += vals[*k as usize];
                        m = m.max(mags[*k as usize]);
                    }
                    (s, m.max(s.abs()))
                }
                Op::Mul(lo, hi) => {
                    let mut p = 1.0;
                    let mut m = 0.0f64;
                    for k in &self.operands[*lo as usize..*hi as usize] {
                        p *= vals[*k as usize];
                        m = m.max(mags[*k as usize]);
                    }
                    (p, m.max(p.abs()))
                }
                Op::PowI(k, e) => {
                    let x = vals[*k as usize];
                    if x == 0.0 && *e < 0 {
                        return Err(EvalError::Domain { op: "division", arg: x });
                    }
                    let v = x.powi(*e);
                    (v, v.abs().max(mags[*k as usize]))
                }
                Op::PowF(k, e) => {
                    let x = vals[*k as usize];
                    if x < 0.0 || (x == 0.0 && *e < 0.0) {
                        return Err(EvalError::Domain { op: "fractional power", arg: x });
                    }
                    let v = x.powf(*e);
                    (v, v.abs().max(mags[*k as usize]))
                }
                Op::Apply(f, k) => {
                    let x = vals[*k as usize];
                    let v = match f {
                        Elementary::Sin => x.sin(),
                        Elementary::Cos => x.cos(),
                        Elementary::Exp => x.exp(),
                        Elementary::Log => {
                            if x <= 0.0 {
                                return Err(EvalError::Domain { op: "log", arg: x });
                            }
                            x.ln()
                        }
                        Elementary::Abs => x.abs(),
                        Elementary::Sign => {
                            if x == 0.0 {
                                0.0
                            } else {
                                x.signum()
                            }
                        }
                    };
                    (v, v.abs().max(mags[*k as usize]))
                }
            };
            if !v.is_finite() {
                return Err(EvalError::NonFinite);
            }
            vals.push(v);
            mags.push(m);
        }
        Ok(())
    }

    /// Output values at a point.
    pub fn eval(&self, point: &[f64]) -> Result<Vec<f64>, EvalError> {
        let mut vals = Vec::with_capacity(self.ops.len());
        let mut mags = Vec::with_capacity(self.ops.len());
        self.run(point, &mut vals, &mut mags)?;
        Ok(self.outputs.iter().map(|s| vals[*s as usize]).collect())
    }

    /// Output values and scales at a point.
    pub fn eval_with_scale(
        &self,
        point: &[f64],
        vals: &mut Vec<f64>,
        mags: &mut Vec<f64>,
    ) -> Result<(), EvalError> {
        self.run(point, vals, mags)
    }

    pub(crate) fn output_slot(&self, i: usize) -> usize {
        self.outputs[i] as usize
    }
}

struct TapeBuilder<'a> {
    ctx: &'a EvalContext,
    tape: Tape,
    slots: HashMap<usize, (Expr, u32)>,
    partials: HashMap<(String, Vec<u8>), PartialFn>,
}

impl TapeBuilder<'_> {
    fn push(&mut self, op: Op) -> u32 {
        self.tape.ops.push(op);
        (self.tape.ops.len() - 1) as u32
    }

    fn slot(&mut self, e: &Expr) -> Result<u32, EvalError> {
        if let Some((_, s)) = self.slots.get(&e.ptr_id()) {
            return Ok(*s);
        }
        let op = match e.kind() {
            Kind::Num(q) => Op::Const(q.to_f64().unwrap_or(f64::NAN)),
            Kind::Coord(c) => Op::Var(
                self.ctx
                    .coordinate_index(c)
                    .ok_or_else(|| EvalError::Unbound(c.to_string()))?,
            ),
            Kind::Param(p) => Op::Const(
                self.ctx
                    .param(p)
                    .ok_or_else(|| EvalError::Unbound(p.to_string()))?,
            ),
            Kind::Opaque(call) => {
                let key = (call.name.to_string(), call.derivs.clone());
                let f = match self.partials.get(&key) {
                    Some(f) => f.clone(),
                    None => {
                        let binding = self
                            .ctx
                            .function(&call.name)
                            .ok_or_else(|| EvalError::Unbound(call.name.to_string()))?;
                        if binding.arity() != call.args.len() {
                            return Err(EvalError::InvalidContext(format!(
                                "`{}` bound with arity {} but used with {} arguments",
                                call.name,
                                binding.arity(),
                                call.args.len()
                            )));
                        }
                        let f = binding.partial(&call.derivs);
                        self.partials.insert(key, f.clone());
                        f
                    }
                };
                let idx = call
                    .args
                    .iter()
                    .map(|a| {
                        self.ctx
                            .coordinate_index(a)
                            .ok_or_else(|| EvalError::Unbound(a.to_string()))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Op::Call(f, idx.into())
            }
            Kind::Apply(f, u) => Op::Apply(*f, self.slot(u)?),
            Kind::Pow(b, k) => {
                let s = self.slot(b)?;
                match (k.is_integer(), k.to_i32()) {
                    (true, Some(i)) => Op::PowI(s, i),
                    _ => Op::PowF(s, k.to_f64().unwrap_or(f64::NAN)),
                }
            }
            Kind::Add(xs) | Kind::Mul(xs) => {
                let kids = xs.iter().map(|x| self.slot(x)).collect::<Result<Vec<_>, _>>()?;
                let lo = self.tape.operands.len() as u32;
                self.tape.operands.extend(kids);
                let hi = self.tape.operands.len() as u32;
                if matches!(e.kind(), Kind::Add(_)) {
                    Op::Add(lo, hi)
                } else {
                    Op::Mul(lo, hi)
                }
            }
        };
        let s = self.push(op);
        self.slots.insert(e.ptr_id(), (e.clone(), s));
        Ok(s)
    }
}

/// Value of `e` at `point` (coordinates in context order).
pub fn eval(e: &Expr, ctx: &EvalContext, point: &[f64]) -> Result<f64, EvalError> {
    if point.len() != ctx.dim() {
        return Err(EvalError::InvalidContext(format!(
            "point has {} coordinates, context has {}",
            point.len(),
            ctx.dim()
        )));
    }
    Ok(Tape::compile(std::slice::from_ref(e), ctx)?.eval(point)?[0])
}
