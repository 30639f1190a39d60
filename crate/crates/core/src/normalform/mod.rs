//! The normal system for bi-conformal vector fields, integrated as a linear
//! ODE along a curve, with the constraints monitored at every step.
//!
//! Every equation has the form `∇̄_b X = F_b(X)`. Along a curve with velocity
//! `v` the coordinate components then obey `dX/dt = v^b (F_b + connection
//! terms)`. Lie derivatives of the coefficient tensors are expanded as
//! `£ξ K_ba = ξ^d ∇̄_d K_ba + Ψ_b^d K_da + Ψ_a^d K_bd` with `Ψ_b^d = ∇̄_b ξ^d`;
//! see `docs/lie-expansion.md` for the derivation.

mod counting;

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::{Arc, Mutex};

use crate::biconformal::BiconformalData;
use crate::error::{Error, Result};
use crate::expr::{EvalContext, Expr, Tape};
use crate::geometry::{covariant_derivative, TensorField};

pub use counting::{
    closed_form_bound, constraint_matrix, count_constraints, matrix_rank, ConstraintCount,
};

/// Point values of the normal-system variables. `psi[c * n + a] = Ψ_c^a`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalFormState {
    pub xi: Vec<f64>,
    pub psi: Vec<f64>,
    pub phi: f64,
    pub chi: f64,
    pub phi_star: Vec<f64>,
    pub phi_bar: Vec<f64>,
    pub chi_star: Vec<f64>,
    pub chi_bar: Vec<f64>,
}

impl NormalFormState {
    pub fn zeros(n: usize) -> NormalFormState {
        NormalFormState {
            xi: vec![0.0; n],
            psi: vec![0.0; n * n],
            phi: 0.0,
            chi: 0.0,
            phi_star: vec![0.0; n],
            phi_bar: vec![0.0; n],
            chi_star: vec![0.0; n],
            chi_bar: vec![0.0; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.xi.len()
    }

    pub fn len_for(n: usize) -> usize {
        2 + 5 * n + n * n
    }

    /// Flat layout: `ξ, Ψ, φ, χ, φ*, φ̄, χ*, χ̄`.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(Self::len_for(self.dim()));
        v.extend(&self.xi);
        v.extend(&self.psi);
        v.push(self.phi);
        v.push(self.chi);
        v.extend(&self.phi_star);
        v.extend(&self.phi_bar);
        v.extend(&self.chi_star);
        v.extend(&self.chi_bar);
        v
    }

    pub fn from_vec(n: usize, v: &[f64]) -> NormalFormState {
        assert_eq!(v.len(), Self::len_for(n), "state vector length");
        let mut it = v.iter().copied();
        let mut take = |k: usize| -> Vec<f64> { it.by_ref().take(k).collect() };
        let xi = take(n);
        let psi = take(n * n);
        let pc = take(2);
        NormalFormState {
            xi,
            psi,
            phi: pc[0],
            chi: pc[1],
            phi_star: take(n),
            phi_bar: take(n),
            chi_star: take(n),
            chi_bar: take(n),
        }
    }

    /// Names matching [`Self::to_vec`], 1-based.
    pub fn column_names(n: usize) -> Vec<String> {
        let mut out = Vec::new();
        out.extend((1..=n).map(|a| format!("xi_{a}")));
        for c in 1..=n {
            out.extend((1..=n).map(|a| format!("psi_{c}_{a}")));
        }
        out.push("phi".into());
        out.push("chi".into());
        for name in ["phistar", "phibar", "chistar", "chibar"] {
            out.extend((1..=n).map(|a| format!("{name}_{a}")));
        }
        out
    }

    pub fn combine(a: f64, x: &NormalFormState, b: f64, y: &NormalFormState) -> NormalFormState {
        let (u, v) = (x.to_vec(), y.to_vec());
        let w: Vec<f64> = u.iter().zip(&v).map(|(p, q)| a * p + b * q).collect();
        NormalFormState::from_vec(x.dim(), &w)
    }

    pub fn max_abs(&self) -> f64 {
        self.to_vec().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `α = (φ + χ)/2`.
    pub fn alpha(&self) -> f64 {
        0.5 * (self.phi + self.chi)
    }

    /// `β = (φ − χ)/2`.
    pub fn beta(&self) -> f64 {
        0.5 * (self.phi - self.chi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Integrator {
    Euler,
    Midpoint,
    Rk4,
}

#[derive(Clone)]
pub enum Path {
    /// Vertices joined by straight segments, parameterized by coordinate arc length.
    Polyline(Vec<Vec<f64>>),
    /// `t ↦ (x(t), ẋ(t))` for `t ∈ [0, end]`.
    Analytic {
        eval: Arc<dyn Fn(f64) -> (Vec<f64>, Vec<f64>) + Send + Sync>,
        end: f64,
    },
}

#[derive(Clone)]
pub struct Curve {
    pub path: Path,
    pub step: f64,
    pub integrator: Integrator,
}

impl Curve {
    pub fn polyline(points: Vec<Vec<f64>>, step: f64) -> Curve {
        Curve { path: Path::Polyline(points), step, integrator: Integrator::Rk4 }
    }

    pub fn analytic(
        end: f64,
        step: f64,
        eval: impl Fn(f64) -> (Vec<f64>, Vec<f64>) + Send + Sync + 'static,
    ) -> Curve {
        Curve { path: Path::Analytic { eval: Arc::new(eval), end }, step, integrator: Integrator::Rk4 }
    }

    pub fn with_integrator(mut self, integrator: Integrator) -> Curve {
        self.integrator = integrator;
        self
    }

    /// Pieces with constant parameterization rule, as `(t0, t1, eval)`.
    fn pieces(&self) -> Vec<(f64, f64, Arc<dyn Fn(f64) -> (Vec<f64>, Vec<f64>) + Send + Sync>)> {
        match &self.path {
            Path::Analytic { eval, end } => vec![(0.0, *end, eval.clone())],
            Path::Polyline(pts) => {
                let mut out: Vec<(f64, f64, Arc<dyn Fn(f64) -> (Vec<f64>, Vec<f64>) + Send + Sync>)> =
                    Vec::new();
                let mut t0 = 0.0;
                for w in pts.windows(2) {
                    let (a, b) = (w[0].clone(), w[1].clone());
                    let len = a.iter().zip(&b).map(|(x, y)| (y - x) * (y - x)).sum::<f64>().sqrt();
                    if len == 0.0 {
                        continue;
                    }
                    let dir: Vec<f64> = a.iter().zip(&b).map(|(x, y)| (y - x) / len).collect();
                    let start = t0;
                    let f = move |t: f64| {
                        let s = t - start;
                        let x = a.iter().zip(&dir).map(|(x, d)| x + s * d).collect();
                        (x, dir.clone())
                    };
                    out.push((t0, t0 + len, Arc::new(f)));
                    t0 += len;
                }
                out
            }
        }
    }

    pub fn length_parameter(&self) -> f64 {
        self.pieces().last().map_or(0.0, |p| p.1)
    }
}

#[derive(Clone, Debug)]
pub struct Residuals {
    /// Max-norm of `£ξ P − φ P` and `£ξ Π − χ Π`.
    pub projector: f64,
    /// Max-norm of `£ξ E + p φ*` and `£ξ W + (n−p) χ*`.
    pub trace_forms: f64,
}

#[derive(Clone, Debug)]
pub struct Sample {
    pub t: f64,
    pub point: Vec<f64>,
    pub state: NormalFormState,
    pub residuals: Residuals,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
}

impl Trajectory {
    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory has its initial sample")
    }

    pub fn max_residuals(&self) -> (f64, f64) {
        self.samples.iter().fold((0.0, 0.0), |(a, b), s| {
            (a.max(s.residuals.projector), b.max(s.residuals.trace_forms))
        })
    }

    /// `t, ξ, Ψ, φ, χ, φ*, φ̄, χ*, χ̄, res_I, res_II`, one row per sample.
    pub fn to_csv(&self) -> String {
        let n = self.samples.first().map_or(0, |s| s.state.dim());
        let mut out = String::from("t,");
        out.push_str(&NormalFormState::column_names(n).join(","));
        out.push_str(",res_I,res_II\n");
        for s in &self.samples {
            let _ = write!(out, "{:e}", s.t);
            for v in s.state.to_vec() {
                let _ = write!(out, ",{v:e}");
            }
            let _ = writeln!(out, ",{:e},{:e}", s.residuals.projector, s.residuals.trace_forms);
        }
        out
    }
}

#[derive(Clone, Copy, Debug)]
pub struct TransportOptions {
    /// Abort with `ResidualBlowup` once either residual exceeds this.
    pub residual_bound: f64,
}

impl Default for TransportOptions {
    fn default() -> Self {
        TransportOptions { residual_bound: 1e6 }
    }
}

/// Numeric values of every coefficient tensor at one point, flat row-major.
struct Coeffs {
    gbar: Vec<f64>,
    g_inv: Vec<f64>,
    p: Vec<f64>,
    pi: Vec<f64>,
    p_mixed: Vec<f64>,
    pi_mixed: Vec<f64>,
    e: Vec<f64>,
    w: Vec<f64>,
    de: Vec<f64>,
    dw: Vec<f64>,
    dde: Vec<f64>,
    ddw: Vec<f64>,
    l0: Vec<f64>,
    l1: Vec<f64>,
    dl0: Vec<f64>,
    dl1: Vec<f64>,
    rbar: Vec<f64>,
    dp: Vec<f64>,
    dpi: Vec<f64>,
}

const FIELDS: usize = 19;

/// The normal system of one metric and projector pair, compiled for fast
/// point evaluation.
pub struct NormalSystem {
    n: usize,
    p: usize,
    ctx: EvalContext,
    tape: Tape,
    sizes: [usize; FIELDS],
    cache: Mutex<HashMap<Vec<u64>, Arc<Coeffs>>>,
}

impl NormalSystem {
    pub fn new(data: &BiconformalData) -> Result<NormalSystem> {
        let (n, p) = (data.n(), data.p());
        if p <= 2 || p + 2 >= n {
            return Err(Error::DegenerateRank { n, p });
        }
        let m = data.metric();
        let pp = data.projectors();
        let gbar = data.gbar();
        let de = covariant_derivative(gbar, data.e());
        let dw = covariant_derivative(gbar, data.w());
        let dde = covariant_derivative(gbar, &de);
        let ddw = covariant_derivative(gbar, &dw);
        let (l0, _) = data.l0()?;
        let (l1, _) = data.l1()?;
        let dl0 = covariant_derivative(gbar, l0);
        let dl1 = covariant_derivative(gbar, l1);
        let rbar = data.rbar()?;
        let dp = covariant_derivative(gbar, pp.p());
        let dpi = covariant_derivative(gbar, pp.pi());
        let fields: [&TensorField; FIELDS] = [
            gbar.field(),
            m.g_inv(),
            pp.p(),
            pp.pi(),
            pp.p_mixed(),
            pp.pi_mixed(),
            data.e(),
            data.w(),
            &de,
            &dw,
            &dde,
            &ddw,
            l0,
            l1,
            &dl0,
            &dl1,
            rbar,
            &dp,
            &dpi,
        ];
        let mut sizes = [0; FIELDS];
        let mut all: Vec<Expr> = Vec::new();
        for (k, f) in fields.iter().enumerate() {
            sizes[k] = f.components().len();
            all.extend(f.components().iter().cloned());
        }
        let ctx = m.ctx().clone();
        let tape = Tape::compile(&all, &ctx)?;
        Ok(NormalSystem { n, p, ctx, tape, sizes, cache: Mutex::new(HashMap::new()) })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.p
    }

    fn coeffs(&self, x: &[f64]) -> Result<Arc<Coeffs>> {
        let key: Vec<u64> = x.iter().map(|v| v.to_bits()).collect();
        if let Some(c) = self.cache.lock().unwrap_or_else(|e| e.into_inner()).get(&key) {
            return Ok(c.clone());
        }
        let vals = self.tape.eval(x)?;
        let mut it = vals.into_iter();
        let mut parts: Vec<Vec<f64>> =
            self.sizes.iter().map(|k| it.by_ref().take(*k).collect()).collect();
        let mut next = || parts.remove(0);
        let c = Arc::new(Coeffs {
            gbar: next(),
            g_inv: next(),
            p: next(),
            pi: next(),
            p_mixed: next(),
            pi_mixed: next(),
            e: next(),
            w: next(),
            de: next(),
            dw: next(),
            dde: next(),
            ddw: next(),
            l0: next(),
            l1: next(),
            dl0: next(),
            dl1: next(),
            rbar: next(),
            dp: next(),
            dpi: next(),
        });
        self.cache.lock().unwrap_or_else(|e| e.into_inner()).insert(key, c.clone());
        Ok(c)
    }

    fn inside(&self, x: &[f64]) -> bool {
        x.iter().enumerate().all(|(i, v)| {
            let (a, b) = self.ctx.interval(i);
            *v >= a && *v <= b
        })
    }

    /// Right-hand sides `∇̄_b X` for every variable, indexed with `b` first.
    fn covariant_rates(&self, c: &Coeffs, s: &NormalFormState) -> Rates {
        let n = self.n;
        let (p, q) = (self.p as f64, (self.n - self.p) as f64);
        let i2 = |a: usize, b: usize| a * n + b;
        let i3 = |a: usize, b: usize, d: usize| (a * n + b) * n + d;
        let raise = |v: &[f64]| -> Vec<f64> {
            (0..n).map(|a| (0..n).map(|b| c.g_inv[i2(a, b)] * v[b]).sum()).collect()
        };
        let phi_up = raise(&s.phi_bar);
        let chi_up = raise(&s.chi_bar);
        let lie2 = |k: &[f64], dk: &[f64], b: usize, a: usize| -> f64 {
            (0..n)
                .map(|d| {
                    s.xi[d] * dk[i3(d, b, a)]
                        + s.psi[i2(b, d)] * k[i2(d, a)]
                        + s.psi[i2(a, d)] * k[i2(b, d)]
                })
                .sum()
        };
        let chi_e: f64 = (0..n).map(|r| chi_up[r] * c.e[r]).sum();
        let phi_w: f64 = (0..n).map(|r| phi_up[r] * c.w[r]).sum();
        let mut r = Rates::zeros(n);
        for b in 0..n {
            r.phi[b] = s.phi_bar[b] + s.phi_star[b];
            r.chi[b] = s.chi_bar[b] + s.chi_star[b];
            for a in 0..n {
                let ba = i2(b, a);
                r.phi_star[ba] = -(lie2(&c.de, &c.dde, b, a)
                    + 0.5 * (s.chi_bar[b] * c.e[a] + s.chi_bar[a] * c.e[b] - chi_e * c.pi[ba]))
                    / p;
                r.chi_star[ba] = -(lie2(&c.dw, &c.ddw, b, a)
                    + 0.5 * (s.phi_bar[b] * c.w[a] + s.phi_bar[a] * c.w[b] - phi_w * c.p[ba]))
                    / q;
                let tp: f64 = (0..n).map(|k| phi_up[k] * c.dp[i3(k, b, a)]).sum();
                let tpi: f64 = (0..n).map(|k| chi_up[k] * c.dpi[i3(k, b, a)]).sum();
                r.phi_bar[ba] = (lie2(&c.l0, &c.dl0, b, a) + 2.0 * tp) / (2.0 - p);
                r.chi_bar[ba] = (lie2(&c.l1, &c.dl1, b, a) + 2.0 * tpi) / (2.0 - q);
                r.xi[ba] = s.psi[ba];
                // ∇̄_b Ψ_c^a with c := a here and the upper index in the inner loop
                let cc = a;
                for up in 0..n {
                    let source = 0.5
                        * (s.phi_bar[b] * c.p_mixed[i2(up, cc)] + s.phi_bar[cc] * c.p_mixed[i2(up, b)]
                            - phi_up[up] * c.p[i2(cc, b)]
                            + s.chi_bar[b] * c.pi_mixed[i2(up, cc)]
                            + s.chi_bar[cc] * c.pi_mixed[i2(up, b)]
                            - chi_up[up] * c.pi[i2(cc, b)]);
                    let curv: f64 = (0..n)
                        .map(|d| s.xi[d] * c.rbar[((up * n + cc) * n + d) * n + b])
                        .sum();
                    r.psi[i3(b, cc, up)] = source - curv;
                }
            }
        }
        r
    }

    /// `d state / dt` at `x` moving with velocity `v`.
    fn derivative(&self, x: &[f64], v: &[f64], s: &NormalFormState) -> Result<NormalFormState> {
        let n = self.n;
        let c = self.coeffs(x)?;
        let r = self.covariant_rates(&c, s);
        let g = |a: usize, b: usize, d: usize| c.gbar[(a * n + b) * n + d];
        let mut out = NormalFormState::zeros(n);
        let along = |f: &dyn Fn(usize) -> f64| -> f64 { (0..n).map(|b| v[b] * f(b)).sum() };
        out.phi = along(&|b| r.phi[b]);
        out.chi = along(&|b| r.chi[b]);
        let covector = |rate: &[f64], w: &[f64], a: usize| {
            along(&|b| rate[b * n + a] + (0..n).map(|k| g(k, b, a) * w[k]).sum::<f64>())
        };
        for a in 0..n {
            out.phi_star[a] = covector(&r.phi_star, &s.phi_star, a);
            out.phi_bar[a] = covector(&r.phi_bar, &s.phi_bar, a);
            out.chi_star[a] = covector(&r.chi_star, &s.chi_star, a);
            out.chi_bar[a] = covector(&r.chi_bar, &s.chi_bar, a);
            out.xi[a] = along(&|b| r.xi[b * n + a] - (0..n).map(|k| g(a, b, k) * s.xi[k]).sum::<f64>());
            for cc in 0..n {
                out.psi[cc * n + a] = along(&|b| {
                    r.psi[(b * n + cc) * n + a]
                        + (0..n)
                            .map(|k| g(k, b, cc) * s.psi[k * n + a] - g(a, b, k) * s.psi[cc * n + k])
                            .sum::<f64>()
                });
            }
        }
        Ok(out)
    }

    /// Max-norm residuals of the constraints at `x`.
    pub fn constraint_residuals(&self, s: &NormalFormState, x: &[f64]) -> Result<Residuals> {
        let n = self.n;
        let c = self.coeffs(x)?;
        let (p, q) = (self.p as f64, (self.n - self.p) as f64);
        let mut proj: f64 = 0.0;
        let mut forms: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                let lie = |low: &[f64], d: &[f64]| -> f64 {
                    (0..n)
                        .map(|k| {
                            s.xi[k] * d[(k * n + a) * n + b]
                                + s.psi[a * n + k] * low[k * n + b]
                                + s.psi[b * n + k] * low[a * n + k]
                        })
                        .sum()
                };
                proj = proj
                    .max((lie(&c.p, &c.dp) - s.phi * c.p[a * n + b]).abs())
                    .max((lie(&c.pi, &c.dpi) - s.chi * c.pi[a * n + b]).abs());
            }
            let lie1 = |form: &[f64], d: &[f64]| -> f64 {
                (0..n).map(|k| s.xi[k] * d[k * n + a] + s.psi[a * n + k] * form[k]).sum()
            };
            forms = forms
                .max((lie1(&c.e, &c.de) + p * s.phi_star[a]).abs())
                .max((lie1(&c.w, &c.dw) + q * s.chi_star[a]).abs());
        }
        Ok(Residuals { projector: proj, trace_forms: forms })
    }

    fn sample(&self, t: f64, x: Vec<f64>, state: NormalFormState) -> Result<Sample> {
        let residuals = self.constraint_residuals(&state, &x)?;
        Ok(Sample { t, point: x, state, residuals })
    }

    pub fn transport(&self, state0: &NormalFormState, curve: &Curve) -> Result<Trajectory> {
        self.transport_with(state0, curve, TransportOptions::default())
    }

    pub fn transport_with(
        &self,
        state0: &NormalFormState,
        curve: &Curve,
        opts: TransportOptions,
    ) -> Result<Trajectory> {
        let n = self.n;
        if state0.dim() != n || state0.psi.len() != n * n {
            return Err(Error::SlotVarianceMismatch(format!(
                "state of dimension {} for an {n}-dimensional chart",
                state0.dim()
            )));
        }
        if !(curve.step > 0.0) {
            return Err(Error::InvalidChart(format!("step must be positive, got {}", curve.step)));
        }
        let pieces = curve.pieces();
        let Some(first) = pieces.first() else {
            return Err(Error::InvalidChart("curve has no extent".into()));
        };
        let at = |eval: &dyn Fn(f64) -> (Vec<f64>, Vec<f64>), t: f64| -> Result<(Vec<f64>, Vec<f64>)> {
            let (x, v) = eval(t);
            if x.len() != n || v.len() != n {
                return Err(Error::InvalidChart(format!("curve point of dimension {}", x.len())));
            }
            if !self.inside(&x) {
                return Err(Error::StepOutsideBox { t });
            }
            Ok((x, v))
        };
        let (x0, _) = at(&*first.2, first.0)?;
        let mut samples = vec![self.sample(first.0, x0, state0.clone())?];
        let mut state = state0.to_vec();
        for (t0, t1, eval) in &pieces {
            let steps = ((t1 - t0) / curve.step).ceil().max(1.0) as usize;
            let h = (t1 - t0) / steps as f64;
            for k in 0..steps {
                let t = t0 + k as f64 * h;
                let f = |tt: f64, y: &[f64]| -> Result<Vec<f64>> {
                    let (x, v) = at(&**eval, tt)?;
                    Ok(self.derivative(&x, &v, &NormalFormState::from_vec(n, y))?.to_vec())
                };
                let axpy = |y: &[f64], a: f64, d: &[f64]| -> Vec<f64> {
                    y.iter().zip(d).map(|(p, q)| p + a * q).collect()
                };
                state = match curve.integrator {
                    Integrator::Euler => axpy(&state, h, &f(t, &state)?),
                    Integrator::Midpoint => {
                        let k1 = f(t, &state)?;
                        let k2 = f(t + 0.5 * h, &axpy(&state, 0.5 * h, &k1))?;
                        axpy(&state, h, &k2)
                    }
                    Integrator::Rk4 => {
                        let k1 = f(t, &state)?;
                        let k2 = f(t + 0.5 * h, &axpy(&state, 0.5 * h, &k1))?;
                        let k3 = f(t + 0.5 * h, &axpy(&state, 0.5 * h, &k2))?;
                        let k4 = f(t + h, &axpy(&state, h, &k3))?;
                        state
                            .iter()
                            .enumerate()
                            .map(|(i, y)| y + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
                            .collect()
                    }
                };
                let t_next = if k + 1 == steps { *t1 } else { t + h };
                let (x, _) = at(&**eval, t_next)?;
                let s = self.sample(t_next, x, NormalFormState::from_vec(n, &state))?;
                let worst = s.residuals.projector.max(s.residuals.trace_forms);
                if !(worst <= opts.residual_bound) {
                    return Err(Error::ResidualBlowup {
                        t: t_next,
                        residual: worst,
                        bound: opts.residual_bound,
                    });
                }
                samples.push(s);
            }
        }
        Ok(Trajectory { samples })
    }
}

struct Rates {
    phi: Vec<f64>,
    chi: Vec<f64>,
    phi_star: Vec<f64>,
    phi_bar: Vec<f64>,
    chi_star: Vec<f64>,
    chi_bar: Vec<f64>,
    xi: Vec<f64>,
    psi: Vec<f64>,
}

impl Rates {
    fn zeros(n: usize) -> Rates {
        Rates {
            phi: vec![0.0; n],
            chi: vec![0.0; n],
            phi_star: vec![0.0; n * n],
            phi_bar: vec![0.0; n * n],
            chi_star: vec![0.0; n * n],
            chi_bar: vec![0.0; n * n],
            xi: vec![0.0; n * n],
            psi: vec![0.0; n * n * n],
        }
    }
}

/// Convenience wrapper: compile the system and transport one state.
pub fn transport(data: &BiconformalData, state0: &NormalFormState, curve: &Curve) -> Result<Trajectory> {
    NormalSystem::new(data)?.transport(state0, curve)
}

/// Symbolic normal-system variables of a given vector field `ξ` with gauge
/// functions `φ, χ`: `Ψ = ∇̄ξ`, `φ* = Π·dφ`, `φ̄ = P·dφ` and dually.
pub struct StateField {
    n: usize,
    tape: Tape,
}

impl StateField {
    pub fn new(data: &BiconformalData, xi: &TensorField, phi: &Expr, chi: &Expr) -> Result<StateField> {
        let m = data.metric();
        let n = data.n();
        let chart = m.chart();
        let pp = data.projectors();
        let psi = covariant_derivative(data.gbar(), xi);
        let grad = |f: &Expr| -> Vec<Expr> { (0..n).map(|a| chart.diff(f, a)).collect() };
        let split = |mixed: &TensorField, d: &[Expr]| -> Vec<Expr> {
            (0..n)
                .map(|a| Expr::sum((0..n).map(|b| mixed.get(&[b, a]) * &d[b])))
                .collect()
        };
        let (dphi, dchi) = (grad(phi), grad(chi));
        let mut all: Vec<Expr> = xi.components().to_vec();
        all.extend(psi.components().iter().cloned());
        all.push(phi.clone());
        all.push(chi.clone());
        all.extend(split(pp.pi_mixed(), &dphi));
        all.extend(split(pp.p_mixed(), &dphi));
        all.extend(split(pp.p_mixed(), &dchi));
        all.extend(split(pp.pi_mixed(), &dchi));
        let mut ctx = m.ctx().clone();
        ctx.bind_random_functions(&all);
        Ok(StateField { n, tape: Tape::compile(&all, &ctx)? })
    }

    pub fn at(&self, x: &[f64]) -> Result<NormalFormState> {
        Ok(NormalFormState::from_vec(self.n, &self.tape.eval(x)?))
    }
}
