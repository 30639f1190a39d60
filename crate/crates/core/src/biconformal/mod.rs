//! Tensors built from the first derivatives of a projector pair, the affine
//! connection adapted to the pair, and its curvature.
//!
//! Index conventions: in `∇P` the derivative slot comes first, so
//! `dp[d][a][b] = ∇_d P_ab`; curvature follows
//! `R^a_bcd = ∂_c γ^a_db − ∂_d γ^a_cb + γ^a_rc γ^r_db − γ^a_rd γ^r_cb`.

mod identities;

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::expr::{Expr, ZeroVerdict};
use crate::geometry::{
    covariant_derivative, riemann_of, sum_over, Connection, MetricChart, TensorField, Variance,
};
use crate::projectors::ProjectorPair;

pub use identities::{verify_identities, IdentityCheck, IdentityReport};

use Variance::{Down, Up};

const D1: [Variance; 1] = [Down];
const D3: [Variance; 3] = [Down, Down, Down];
const UDD: [Variance; 3] = [Up, Down, Down];

fn frac(a: i64, b: i64) -> Expr {
    Expr::rational(a, b)
}

/// `M_abc = ∇_b P_ac + ∇_c P_ab − ∇_a P_bc`.
pub fn compute_m(m: &MetricChart, pp: &ProjectorPair) -> TensorField {
    let dp = covariant_derivative(m.christoffel(), pp.p());
    m_from_gradient(&dp)
}

fn m_from_gradient(dp: &TensorField) -> TensorField {
    TensorField::from_fn(dp.chart(), &D3, |i| {
        let (a, b, c) = (i[0], i[1], i[2]);
        dp.get(&[b, a, c]) + dp.get(&[c, a, b]) - dp.get(&[a, b, c])
    })
}

/// `E_a = M_acb P^cb` and `W_a = −M_acb Π^cb`.
pub fn compute_ew(m: &MetricChart, pp: &ProjectorPair, mm: &TensorField) -> (TensorField, TensorField) {
    let n = m.dim();
    let trace = |up: &TensorField| {
        TensorField::from_fn(m.chart(), &D1, |i| {
            Expr::sum((0..n).flat_map(|c| {
                (0..n).filter_map(move |b| {
                    let w = up.get(&[c, b]);
                    let x = mm.get(&[i[0], c, b]);
                    (!w.is_zero() && !x.is_zero()).then(|| w * x)
                })
            }))
        })
    };
    let e = trace(pp.p_up());
    let w = trace(pp.pi_up()).map(|c| -c);
    (e, w)
}

/// `T_abc = M_abc + W_a Π_bc/(n−p) − E_a P_bc/p` together with its splitting
/// `A_abc = P_a^d T_dbc`, `B_abc = Π_a^d T_dbc`.
pub fn compute_t(
    m: &MetricChart,
    pp: &ProjectorPair,
    mm: &TensorField,
    e: &TensorField,
    w: &TensorField,
) -> (TensorField, TensorField, TensorField) {
    let n = m.dim();
    let p = pp.rank() as i64;
    let q = n as i64 - p;
    let t = TensorField::from_fn(m.chart(), &D3, |i| {
        let (a, b, c) = (i[0], i[1], i[2]);
        mm.get(i) + frac(1, q) * w.get(&[a]) * pp.pi().get(&[b, c])
            - frac(1, p) * e.get(&[a]) * pp.p().get(&[b, c])
    });
    let split = |mix: &TensorField| {
        TensorField::from_fn(m.chart(), &D3, |i| {
            sum_over(n, |d| mix.get(&[d, i[0]]) * t.get(&[d, i[1], i[2]]))
        })
    };
    let a = split(pp.p_mixed());
    let b = split(pp.pi_mixed());
    (t, a, b)
}

/// `L^a_bc`, the difference between the adapted connection and Levi-Civita.
pub fn compute_l(
    m: &MetricChart,
    pp: &ProjectorPair,
    mm: &TensorField,
    e: &TensorField,
    w: &TensorField,
) -> TensorField {
    let n = m.dim();
    let p = pp.rank() as i64;
    let q = n as i64 - p;
    let mup = raise_first(m, mm);
    let (pm, pim) = (pp.p_mixed(), pp.pi_mixed());
    TensorField::from_fn(m.chart(), &UDD, |i| {
        let (a, b, c) = (i[0], i[1], i[2]);
        let mut terms = vec![
            frac(1, 2 * p) * (e.get(&[b]) * pm.get(&[a, c]) + e.get(&[c]) * pm.get(&[a, b])),
            frac(1, 2 * q) * (w.get(&[b]) * pim.get(&[a, c]) + w.get(&[c]) * pim.get(&[a, b])),
        ];
        for r in 0..n {
            let s = pm.get(&[a, r]) - pim.get(&[a, r]);
            let x = mup.get(&[r, b, c]);
            if !s.is_zero() && !x.is_zero() {
                terms.push(frac(1, 2) * s * x);
            }
        }
        Expr::sum(terms)
    })
}

/// `M^p_bc = g^pq M_qbc`.
pub(crate) fn raise_first(m: &MetricChart, t: &TensorField) -> TensorField {
    let n = m.dim();
    let mut slots = t.slots().to_vec();
    slots[0] = Up;
    let mut src = vec![0; t.rank()];
    TensorField::from_fn(m.chart(), &slots, |i| {
        src.copy_from_slice(i);
        sum_over(n, |q| {
            src[0] = q;
            let x = t.get(&src);
            if x.is_zero() {
                Expr::zero()
            } else {
                m.g_inv().get(&[i[0], q]) * x
            }
        })
    })
}

/// `R̄ = R + 2∇_[c L^a_d]b + 2 L^a_r[c L^r_d]b`, using Levi-Civita `∇`.
pub fn curvature_from_relation(m: &MetricChart, l: &TensorField) -> TensorField {
    let n = m.dim();
    let r = m.riemann();
    let dl = covariant_derivative(m.christoffel(), l);
    TensorField::from_fn(m.chart(), &[Up, Down, Down, Down], |i| {
        let (a, b, c, d) = (i[0], i[1], i[2], i[3]);
        let mut terms = vec![
            r.get(i).clone(),
            dl.get(&[c, a, d, b]).clone(),
            -dl.get(&[d, a, c, b]),
        ];
        for s in 0..n {
            terms.push(l.get(&[a, s, c]) * l.get(&[s, d, b]));
            terms.push(-(l.get(&[a, s, d]) * l.get(&[s, c, b])));
        }
        Expr::sum(terms)
    })
}

/// Trace-adjusted curvature of one projector of rank `k`:
/// `2[P^d_r R̄^r_cdb − (P^d_c Q_db + P^d_b Q_dc − Q_bc)/k] + R̄⁰ P_bc/(1−k)` with
/// `Q_db = P^r_q R̄^q_rdb` and `R̄⁰ = P^d_r R̄^r_cdb P^cb`.
fn trace_adjusted(
    rbar: &TensorField,
    mixed: &TensorField,
    low: &TensorField,
    up: &TensorField,
    k: usize,
) -> (TensorField, Expr) {
    let chart = rbar.chart();
    let n = chart.dim();
    let k = k as i64;
    let dd = [Down, Down];
    let kk = TensorField::from_fn(chart, &dd, |i| {
        let (c, b) = (i[0], i[1]);
        Expr::sum((0..n).flat_map(|d| {
            (0..n).map(move |r| mixed.get(&[d, r]) * rbar.get(&[r, c, d, b]))
        }))
    });
    let qq = TensorField::from_fn(chart, &dd, |i| {
        let (d, b) = (i[0], i[1]);
        Expr::sum((0..n).flat_map(|r| {
            (0..n).map(move |q| mixed.get(&[r, q]) * rbar.get(&[q, r, d, b]))
        }))
    });
    let r0 = Expr::sum((0..n).flat_map(|c| {
        let kk = &kk;
        (0..n).map(move |b| kk.get(&[c, b]) * up.get(&[c, b]))
    }));
    let l = TensorField::from_fn(chart, &dd, |i| {
        let (b, c) = (i[0], i[1]);
        let inner = sum_over(n, |d| mixed.get(&[d, c]) * qq.get(&[d, b]))
            + sum_over(n, |d| mixed.get(&[d, b]) * qq.get(&[d, c]))
            - qq.get(&[b, c]);
        Expr::int(2) * (kk.get(&[c, b]) - frac(1, k) * inner)
            + &r0 * frac(1, 1 - k) * low.get(&[b, c])
    });
    (l, r0)
}

/// Everything derived from one (metric, projector) pair. First-order objects
/// are built eagerly; curvature and the normal-form sources on demand.
pub struct BiconformalData {
    m: MetricChart,
    pp: ProjectorPair,
    dp: TensorField,
    mm: TensorField,
    e: TensorField,
    w: TensorField,
    t: TensorField,
    a: TensorField,
    b: TensorField,
    l: TensorField,
    gbar: Connection,
    u: TensorField,
    rbar: OnceLock<std::result::Result<TensorField, String>>,
    rbar_direct: OnceLock<TensorField>,
    l0: OnceLock<(TensorField, Expr)>,
    l1: OnceLock<(TensorField, Expr)>,
}

impl BiconformalData {
    pub fn new(m: &MetricChart, pp: &ProjectorPair) -> Result<BiconformalData> {
        let n = m.dim();
        let p = pp.rank();
        if p == 0 || p >= n {
            return Err(Error::InvalidRank { n, p });
        }
        if !std::sync::Arc::ptr_eq(m.chart(), pp.p().chart()) {
            return Err(Error::ChartMismatch);
        }
        let dp = covariant_derivative(m.christoffel(), pp.p());
        let mm = m_from_gradient(&dp);
        let (e, w) = compute_ew(m, pp, &mm);
        let (t, a, b) = compute_t(m, pp, &mm, &e, &w);
        let l = compute_l(m, pp, &mm, &e, &w);
        let gbar = m.christoffel().shifted(&l)?;
        let q = (n - p) as i64;
        let u = TensorField::from_fn(m.chart(), &D1, |i| {
            frac(1, 2 * p as i64) * e.get(i) + frac(1, 2 * q) * w.get(i)
        });
        Ok(BiconformalData {
            m: m.with_context(m.ctx().clone()),
            pp: pp.clone(),
            dp,
            mm,
            e,
            w,
            t,
            a,
            b,
            l,
            gbar,
            u,
            rbar: OnceLock::new(),
            rbar_direct: OnceLock::new(),
            l0: OnceLock::new(),
            l1: OnceLock::new(),
        })
    }

    pub fn metric(&self) -> &MetricChart {
        &self.m
    }

    pub fn projectors(&self) -> &ProjectorPair {
        &self.pp
    }

    pub fn n(&self) -> usize {
        self.m.dim()
    }

    pub fn p(&self) -> usize {
        self.pp.rank()
    }

    /// `∇_d P_ab` (Levi-Civita).
    pub fn grad_p(&self) -> &TensorField {
        &self.dp
    }

    pub fn m_tensor(&self) -> &TensorField {
        &self.mm
    }

    pub fn e(&self) -> &TensorField {
        &self.e
    }

    pub fn w(&self) -> &TensorField {
        &self.w
    }

    pub fn t(&self) -> &TensorField {
        &self.t
    }

    pub fn a(&self) -> &TensorField {
        &self.a
    }

    pub fn b(&self) -> &TensorField {
        &self.b
    }

    pub fn l(&self) -> &TensorField {
        &self.l
    }

    /// The adapted connection `γ̄ = Γ + L`.
    pub fn gbar(&self) -> &Connection {
        &self.gbar
    }

    /// `u_a = E_a/(2p) + W_a/(2(n−p))`.
    pub fn u(&self) -> &TensorField {
        &self.u
    }

    /// Covariant derivative with respect to `γ̄`.
    pub fn nabla_bar(&self, t: &TensorField) -> TensorField {
        covariant_derivative(&self.gbar, t)
    }

    /// Curvature of `γ̄` computed directly from its coefficients.
    pub fn rbar_direct(&self) -> &TensorField {
        self.rbar_direct.get_or_init(|| riemann_of(&self.gbar))
    }

    /// Curvature of `γ̄` through its relation with the Levi-Civita curvature,
    /// cross-checked against [`Self::rbar_direct`] on first use.
    pub fn rbar(&self) -> Result<&TensorField> {
        let r = self.rbar.get_or_init(|| {
            let rel = curvature_from_relation(&self.m, &self.l);
            let diff = match rel.sub(self.rbar_direct()) {
                Ok(d) => d,
                Err(e) => return Err(e.to_string()),
            };
            match self.m.zero_test(&diff) {
                Ok(ZeroVerdict::NonZero(w)) => Err(format!(
                    "relation and direct curvature differ at component {:?} by {:e}",
                    w.component, w.value
                )),
                Ok(_) => Ok(rel),
                Err(e) => Err(e.to_string()),
            }
        });
        r.as_ref().map_err(|e| Error::CrossCheckFailed(e.clone()))
    }

    fn check_trace_rank(&self) -> Result<()> {
        let (n, p) = (self.n(), self.p());
        if p == 1 || p + 1 == n {
            return Err(Error::DegenerateRank { n, p });
        }
        Ok(())
    }

    /// `(L⁰_bc, R̄⁰)`.
    pub fn l0(&self) -> Result<(&TensorField, &Expr)> {
        self.check_trace_rank()?;
        let rbar = self.rbar()?;
        let (l, r) = self.l0.get_or_init(|| {
            trace_adjusted(rbar, self.pp.p_mixed(), self.pp.p(), self.pp.p_up(), self.p())
        });
        Ok((l, r))
    }

    /// `(L¹_bc, R̄¹)`, the dual of [`Self::l0`].
    pub fn l1(&self) -> Result<(&TensorField, &Expr)> {
        self.check_trace_rank()?;
        let rbar = self.rbar()?;
        let (l, r) = self.l1.get_or_init(|| {
            trace_adjusted(
                rbar,
                self.pp.pi_mixed(),
                self.pp.pi(),
                self.pp.pi_up(),
                self.n() - self.p(),
            )
        });
        Ok((l, r))
    }

    /// Replaces `L` (and hence `γ̄`) by `L + δ`. Used to check that the
    /// identity suite detects a wrong connection.
    pub fn with_perturbed_l(&self, delta: &TensorField) -> Result<BiconformalData> {
        let l = self.l.add(delta)?;
        let gbar = self.m.christoffel().shifted(&l)?;
        Ok(BiconformalData {
            m: self.m.with_context(self.m.ctx().clone()),
            pp: self.pp.clone(),
            dp: self.dp.clone(),
            mm: self.mm.clone(),
            e: self.e.clone(),
            w: self.w.clone(),
            t: self.t.clone(),
            a: self.a.clone(),
            b: self.b.clone(),
            l,
            gbar,
            u: self.u.clone(),
            rbar: OnceLock::new(),
            rbar_direct: OnceLock::new(),
            l0: OnceLock::new(),
            l1: OnceLock::new(),
        })
    }
}

/// Free-function form of [`BiconformalData::rbar`].
pub fn compute_rbar(m: &MetricChart, pp: &ProjectorPair) -> Result<TensorField> {
    Ok(BiconformalData::new(m, pp)?.rbar()?.clone())
}

/// `(L⁰, L¹, R̄⁰, R̄¹)`.
pub fn compute_l0_l1(
    m: &MetricChart,
    pp: &ProjectorPair,
) -> Result<(TensorField, TensorField, Expr, Expr)> {
    let data = BiconformalData::new(m, pp)?;
    let (l0, r0) = data.l0()?;
    let (l1, r1) = data.l1()?;
    Ok((l0.clone(), l1.clone(), r0.clone(), r1.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{eval, EvalContext};
    use crate::fixtures::{flat, generated, unit_box, GeneratorClass};
    use crate::geometry::Chart;
    use std::sync::Arc;

    fn values(t: &TensorField, ctx: &EvalContext, x: &[f64]) -> Vec<f64> {
        t.components().iter().map(|c| eval(c, ctx, x).unwrap()).collect()
    }

    #[test]
    fn flat_decomposable_has_trivial_data() {
        let f = flat(4, 2).unwrap();
        let d = BiconformalData::new(&f.metric, &f.projectors).unwrap();
        for t in [d.m_tensor(), d.e(), d.w(), d.t(), d.l(), d.rbar().unwrap()] {
            assert!(t.is_structurally_zero());
        }
        let (l0, r0) = d.l0().unwrap();
        assert!(l0.is_structurally_zero() && r0.is_zero());
        assert!(d.l1().unwrap().0.is_structurally_zero());
    }

    #[test]
    fn rank_checks() {
        let f = flat(3, 1).unwrap();
        let d = BiconformalData::new(&f.metric, &f.projectors).unwrap();
        assert!(matches!(d.l0(), Err(Error::DegenerateRank { n: 3, p: 1 })));
        assert!(matches!(d.l1(), Err(Error::DegenerateRank { .. })));
    }

    // Independent numeric pipeline: P from the numeric Gram block, Christoffel
    // symbols and ∂P by central differences, then the defining combination.
    fn gauss_inverse(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let k = a.len();
        let mut m: Vec<Vec<f64>> = a
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut row = r.clone();
                row.extend((0..k).map(|j| (i == j) as u8 as f64));
                row
            })
            .collect();
        for c in 0..k {
            let piv = (c..k).max_by(|x, y| m[*x][c].abs().total_cmp(&m[*y][c].abs())).unwrap();
            m.swap(c, piv);
            let d = m[c][c];
            for v in m[c].iter_mut() {
                *v /= d;
            }
            for r in 0..k {
                if r != c {
                    let f = m[r][c];
                    let src = m[c].clone();
                    for (v, s) in m[r].iter_mut().zip(src) {
                        *v -= f * s;
                    }
                }
            }
        }
        m.into_iter().map(|r| r[k..].to_vec()).collect()
    }

    #[test]
    fn m_matches_finite_difference_oracle() {
        let (chart, ctx) = unit_box(3, 9).unwrap();
        let all = ["x1", "x2", "x3"];
        let rows: Vec<Vec<Expr>> = (0..3)
            .map(|a| {
                (0..3)
                    .map(|b| {
                        let (i, j) = (a.min(b), a.max(b));
                        let f = Expr::opaque(&format!("h{i}{j}"), &all);
                        if i == j {
                            f + Expr::int(1)
                        } else {
                            f * Expr::rational(1, 6)
                        }
                    })
                    .collect()
            })
            .collect();
        let m = MetricChart::from_rows(&chart, &rows, ctx).unwrap();
        let block = [0usize, 1];
        let pp = ProjectorPair::from_coordinate_block(&m, &block).unwrap();
        let mm = compute_m(&m, &pp);
        let ctx = m.ctx();
        let gnum = |x: &[f64]| -> Vec<Vec<f64>> {
            (0..3).map(|a| (0..3).map(|b| eval(m.g().get(&[a, b]), ctx, x).unwrap()).collect()).collect()
        };
        let pnum = |x: &[f64]| -> Vec<Vec<f64>> {
            let g = gnum(x);
            let gram: Vec<Vec<f64>> = block.iter().map(|a| block.iter().map(|b| g[*a][*b]).collect()).collect();
            let h = gauss_inverse(&gram);
            (0..3)
                .map(|a| {
                    (0..3)
                        .map(|b| {
                            let mut s = 0.0;
                            for (i, al) in block.iter().enumerate() {
                                for (j, be) in block.iter().enumerate() {
                                    s += g[a][*al] * h[i][j] * g[*be][b];
                                }
                            }
                            s
                        })
                        .collect()
                })
                .collect()
        };
        let h = 1e-5;
        let fd = |f: &dyn Fn(&[f64]) -> Vec<Vec<f64>>, x: &[f64], d: usize| -> Vec<Vec<f64>> {
            let (mut xp, mut xm) = (x.to_vec(), x.to_vec());
            xp[d] += h;
            xm[d] -= h;
            let (a, b) = (f(&xp), f(&xm));
            (0..3).map(|i| (0..3).map(|j| (a[i][j] - b[i][j]) / (2.0 * h)).collect()).collect()
        };
        for x in [[0.7, 1.1, 0.9], [1.3, 0.6, 1.2]] {
            let g = gnum(&x);
            let ginv = gauss_inverse(&g);
            let p = pnum(&x);
            let dg: Vec<_> = (0..3).map(|d| fd(&gnum, &x, d)).collect();
            let dp: Vec<_> = (0..3).map(|d| fd(&pnum, &x, d)).collect();
            let gamma = |a: usize, b: usize, c: usize| {
                (0..3)
                    .map(|e| 0.5 * ginv[a][e] * (dg[b][c][e] + dg[c][b][e] - dg[e][b][c]))
                    .sum::<f64>()
            };
            let nabla = |d: usize, a: usize, b: usize| {
                dp[d][a][b]
                    - (0..3).map(|r| gamma(r, d, a) * p[r][b] + gamma(r, d, b) * p[a][r]).sum::<f64>()
            };
            let got = values(&mm, ctx, &x);
            for a in 0..3 {
                for b in 0..3 {
                    for c in 0..3 {
                        let want = nabla(b, a, c) + nabla(c, a, b) - nabla(a, b, c);
                        let v = got[mm.flat_index(&[a, b, c])];
                        assert!(
                            (v - want).abs() <= 1e-5 * want.abs().max(1.0),
                            "M[{a}{b}{c}] = {v}, oracle {want}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn rbar_scalar_matches_brute_force_contraction() {
        let f = generated(GeneratorClass::Twisted, 4).unwrap();
        let d = BiconformalData::new(&f.metric, &f.projectors).unwrap();
        let (_, r0) = d.l0().unwrap();
        let ctx = f.metric.ctx();
        let x = [0.8, 1.2, 0.6, 1.4];
        let rbar = values(d.rbar().unwrap(), ctx, &x);
        let pm = values(f.projectors.p_mixed(), ctx, &x);
        let pu = values(f.projectors.p_up(), ctx, &x);
        let mut want = 0.0;
        for dd in 0..4 {
            for r in 0..4 {
                for c in 0..4 {
                    for b in 0..4 {
                        want += pm[dd * 4 + r] * rbar[((r * 4 + c) * 4 + dd) * 4 + b] * pu[c * 4 + b];
                    }
                }
            }
        }
        let got = eval(r0, ctx, &x).unwrap();
        assert!((got - want).abs() < 1e-9 * want.abs().max(1.0), "{got} vs {want}");
    }

    #[test]
    fn dual_sources_swap_with_the_projectors() {
        let f = crate::fixtures::generated_in(GeneratorClass::ConformallyReducible, 5, 3, 2).unwrap();
        let d = BiconformalData::new(&f.metric, &f.projectors).unwrap();
        let s = BiconformalData::new(&f.metric, &f.projectors.swapped()).unwrap();
        let m = &f.metric;
        assert!(m.zero_test(&d.l1().unwrap().0.sub(s.l0().unwrap().0).unwrap()).unwrap().is_zero());
        assert!(m.zero_test(&d.l0().unwrap().0.sub(s.l1().unwrap().0).unwrap()).unwrap().is_zero());
        assert!(m.zero_test(&d.e().sub(s.w()).unwrap()).unwrap().is_zero());
        assert!(m.zero_test(&d.l().sub(s.l()).unwrap()).unwrap().is_zero());
        // the two sources are genuinely different on this metric
        assert!(!m.zero_test(&d.l0().unwrap().0.sub(d.l1().unwrap().0).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn adapted_connection_does_not_preserve_the_metric() {
        let f = generated(GeneratorClass::Twisted, 8).unwrap();
        let d = BiconformalData::new(&f.metric, &f.projectors).unwrap();
        let g = f.metric.g();
        assert!(f.metric.zero_test(&covariant_derivative(f.metric.christoffel(), g)).unwrap().is_zero());
        assert!(!f.metric.zero_test(&d.nabla_bar(g)).unwrap().is_zero());
    }

    #[test]
    fn corrupted_connection_is_caught() {
        let f = generated(GeneratorClass::Warped, 6).unwrap();
        let d = BiconformalData::new(&f.metric, &f.projectors).unwrap();
        let xi = crate::fixtures::random_polynomial_field(f.metric.chart(), 1);
        assert!(verify_identities(&d, &xi).unwrap().all_pass());
        let chart: &Arc<Chart> = f.metric.chart();
        let delta = TensorField::from_fn(chart, &UDD, |i| {
            if i == [0, 1, 1] {
                chart.coord(2).clone()
            } else {
                Expr::zero()
            }
        });
        let bad = d.with_perturbed_l(&delta).unwrap();
        let rep = verify_identities(&bad, &xi).unwrap();
        assert!(!rep.get("bar-gradient-lower").unwrap().is_zero());
        // curvature of a symmetric connection keeps its generic properties
        assert!(rep.get("lie-curvature").unwrap().is_zero());
    }
}
