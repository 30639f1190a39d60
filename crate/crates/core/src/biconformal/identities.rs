//! Battery of identities relating `∇̄` to `∇`, and generic Lie-derivative
//! identities for a symmetric connection. Each check builds a residual field
//! that must vanish and records its zero verdict.

use crate::error::Result;
use crate::expr::{Expr, ZeroVerdict};
use crate::geometry::{
    covariant_derivative, lie_derivative_connection, lie_derivative_partial, sum_over,
    MetricChart, TensorField, Variance,
};
use crate::projectors::ProjectorPair;

use super::{frac, raise_first, BiconformalData};

use Variance::{Down, Up};

#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub name: String,
    pub verdict: ZeroVerdict,
}

#[derive(Clone, Debug, Default)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.verdict.is_zero())
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(|c| !c.verdict.is_zero())
    }

    pub fn get(&self, name: &str) -> Option<&ZeroVerdict> {
        self.checks.iter().find(|c| c.name == name).map(|c| &c.verdict)
    }

    fn push(&mut self, m: &MetricChart, name: &str, residual: &TensorField) -> Result<()> {
        let verdict = m.zero_test(residual)?;
        self.checks.push(IdentityCheck { name: name.to_string(), verdict });
        Ok(())
    }
}

/// One side of the projector duality: a projector with its trace one-form,
/// rank, and the `M` tensor it generates.
struct Side<'a> {
    low: &'a TensorField,
    mixed: &'a TensorField,
    up: &'a TensorField,
    other_mixed: &'a TensorField,
    other_up: &'a TensorField,
    trace: &'a TensorField,
    other_trace: &'a TensorField,
    k: i64,
    other_k: i64,
    m: TensorField,
    mup: TensorField,
}

fn sides<'a>(d: &'a BiconformalData, pp: &'a ProjectorPair) -> [Side<'a>; 2] {
    let (n, p) = (d.n() as i64, d.p() as i64);
    let mm = d.m_tensor().clone();
    let neg = mm.map(|c| -c);
    let mup = raise_first(d.metric(), &mm);
    let neg_up = mup.map(|c| -c);
    [
        Side {
            low: pp.p(),
            mixed: pp.p_mixed(),
            up: pp.p_up(),
            other_mixed: pp.pi_mixed(),
            other_up: pp.pi_up(),
            trace: d.e(),
            other_trace: d.w(),
            k: p,
            other_k: n - p,
            m: mm,
            mup,
        },
        Side {
            low: pp.pi(),
            mixed: pp.pi_mixed(),
            up: pp.pi_up(),
            other_mixed: pp.p_mixed(),
            other_up: pp.p_up(),
            trace: d.w(),
            other_trace: d.e(),
            k: n - p,
            other_k: p,
            m: neg,
            mup: neg_up,
        },
    ]
}

fn raise_vector(m: &MetricChart, v: &TensorField) -> TensorField {
    let n = m.dim();
    TensorField::from_fn(m.chart(), &[Up], |i| {
        sum_over(n, |b| m.g_inv().get(&[i[0], b]) * v.get(&[b]))
    })
}

/// Runs the full battery for `d` and the test vector field `xi`.
pub fn verify_identities(d: &BiconformalData, xi: &TensorField) -> Result<IdentityReport> {
    let m = d.metric();
    let pp = d.projectors();
    let chart = m.chart();
    let n = m.dim();
    let lc = m.christoffel();
    let gbar = d.gbar();
    let mut rep = IdentityReport::default();
    let d3 = [Down, Down, Down];
    let udd = [Up, Down, Down];
    let duu = [Down, Up, Up];

    for (si, s) in sides(d, pp).iter().enumerate() {
        let suffix = if si == 0 { "" } else { "-dual" };
        let (k, ok) = (s.k, s.other_k);
        let other_vec = raise_vector(m, s.other_trace);

        // ∇̄_a P_bc
        let nb = covariant_derivative(gbar, s.low);
        let nl = covariant_derivative(lc, s.low);
        let r1 = TensorField::from_fn(chart, &d3, |i| {
            let (a, b, c) = (i[0], i[1], i[2]);
            let mix = sum_over(n, |q| {
                s.low.get(&[c, q]) * s.mup.get(&[q, a, b]) + s.low.get(&[b, q]) * s.mup.get(&[q, a, c])
            });
            let rhs = nl.get(i) - frac(1, k) * s.trace.get(&[a]) * s.low.get(&[b, c])
                - frac(1, 2 * k)
                    * (s.trace.get(&[b]) * s.low.get(&[a, c]) + s.trace.get(&[c]) * s.low.get(&[a, b]))
                - frac(1, 2) * mix;
            nb.get(i) - rhs
        });
        rep.push(m, &format!("bar-gradient-lower{suffix}"), &r1)?;

        // 2∇̄_a P^b_c
        let nbm = covariant_derivative(gbar, s.mixed);
        let nlm = covariant_derivative(lc, s.mixed);
        let r2 = TensorField::from_fn(chart, &[Down, Up, Down], |i| {
            let (a, b, c) = (i[0], i[1], i[2]);
            let mut terms = vec![Expr::int(2) * nlm.get(i)];
            for q in 0..n {
                for r in 0..n {
                    let x = s.m.get(&[q, r, a]);
                    if x.is_zero() {
                        continue;
                    }
                    let w = s.up.get(&[b, q]) - s.other_up.get(&[b, q]);
                    terms.push(w * s.mixed.get(&[r, c]) * x);
                }
                terms.push(-(s.mixed.get(&[b, q]) * s.mup.get(&[q, a, c])));
            }
            terms.push(frac(1, ok) * s.other_trace.get(&[c]) * s.other_mixed.get(&[b, a]));
            terms.push(-(frac(1, k) * s.trace.get(&[c]) * s.mixed.get(&[b, a])));
            Expr::int(2) * nbm.get(i) - Expr::sum(terms)
        });
        rep.push(m, &format!("bar-gradient-mixed{suffix}"), &r2)?;

        // ∇̄_a P^bc
        let nbu = covariant_derivative(gbar, s.up);
        let nlu = covariant_derivative(lc, s.up);
        let r3 = TensorField::from_fn(chart, &duu, |i| {
            let (a, b, c) = (i[0], i[1], i[2]);
            let mix = sum_over(n, |r| {
                s.mup.get(&[b, a, r]) * s.up.get(&[r, c]) + s.mup.get(&[c, a, r]) * s.up.get(&[r, b])
            });
            let rhs = nlu.get(i)
                + frac(1, k) * s.trace.get(&[a]) * s.up.get(&[b, c])
                + frac(1, 2 * ok)
                    * (other_vec.get(&[c]) * s.other_mixed.get(&[b, a])
                        + other_vec.get(&[b]) * s.other_mixed.get(&[c, a]))
                - frac(1, 2) * mix;
            nbu.get(i) - rhs
        });
        rep.push(m, &format!("bar-gradient-upper{suffix}"), &r3)?;

        // divergences
        let div_up = TensorField::from_fn(chart, &[Up], |i| {
            sum_over(n, |a| nbu.get(&[a, a, i[0]]).clone())
        });
        let div_mixed = TensorField::from_fn(chart, &[Down], |i| {
            sum_over(n, |a| nbm.get(&[a, a, i[0]]).clone())
        });
        rep.push(m, &format!("divergence-upper{suffix}"), &div_up)?;
        rep.push(m, &format!("divergence-mixed{suffix}"), &div_mixed)?;

        // traces against the projector itself
        let tr_low = TensorField::from_fn(chart, &[Down], |i| {
            let a = i[0];
            Expr::sum((0..n).flat_map(|b| {
                let nb = &nb;
                (0..n).map(move |c| s.up.get(&[b, c]) * nb.get(&[a, b, c]))
            })) + s.trace.get(&[a])
        });
        let tr_up = TensorField::from_fn(chart, &[Down], |i| {
            let a = i[0];
            Expr::sum((0..n).flat_map(|b| {
                let nbu = &nbu;
                (0..n).map(move |c| s.low.get(&[b, c]) * nbu.get(&[a, b, c]))
            })) - s.trace.get(&[a])
        });
        rep.push(m, &format!("trace-lower{suffix}"), &tr_low)?;
        rep.push(m, &format!("trace-upper{suffix}"), &tr_up)?;

        // P^d_r ∇̄_b Π^r_d and P^dr ∇̄_d P_rb
        let nb_other = covariant_derivative(gbar, s.other_mixed);
        let cross = TensorField::from_fn(chart, &[Down], |i| {
            let b = i[0];
            Expr::sum((0..n).flat_map(|d| {
                let nb_other = &nb_other;
                (0..n).map(move |r| s.mixed.get(&[d, r]) * nb_other.get(&[b, r, d]))
            }))
        });
        let along = TensorField::from_fn(chart, &[Down], |i| {
            let b = i[0];
            Expr::sum((0..n).flat_map(|d| {
                let nb = &nb;
                (0..n).map(move |r| s.up.get(&[d, r]) * nb.get(&[d, r, b]))
            }))
        });
        rep.push(m, &format!("cross-trace{suffix}"), &cross)?;
        rep.push(m, &format!("along-divergence{suffix}"), &along)?;

        // algebra of the trace one-forms: Π_ac E^c = E_a, P^ab E_b = 0
        let tv = raise_vector(m, s.trace);
        let other_low_of = |a: usize, c: usize| {
            m.g().get(&[a, c]) - s.low.get(&[a, c])
        };
        let alg1 = TensorField::from_fn(chart, &[Down], |i| {
            sum_over(n, |c| other_low_of(i[0], c) * tv.get(&[c])) - s.trace.get(i)
        });
        let alg2 = TensorField::from_fn(chart, &[Up], |i| {
            sum_over(n, |b| s.up.get(&[i[0], b]) * s.trace.get(&[b]))
        });
        rep.push(m, &format!("one-form-complement{suffix}"), &alg1)?;
        rep.push(m, &format!("one-form-annihilate{suffix}"), &alg2)?;
    }

    let mm = d.m_tensor();
    let msym = TensorField::from_fn(chart, &d3, |i| mm.get(i) - mm.get(&[i[0], i[2], i[1]]));
    rep.push(m, "M-symmetry", &msym)?;
    rep.push(m, "splitting", &d.a().add(d.b())?.sub(d.t())?)?;

    let gsym = TensorField::from_fn(chart, &udd, |i| {
        gbar.coeff(i[0], i[1], i[2]) - gbar.coeff(i[0], i[2], i[1])
    });
    rep.push(m, "connection-symmetry", &gsym)?;

    let rbar_direct = d.rbar_direct();
    let rel = super::curvature_from_relation(m, d.l());
    rep.push(m, "curvature-relation", &rel.sub(rbar_direct)?)?;
    let rbar = rbar_direct;
    let anti = TensorField::from_fn(chart, &[Up, Down, Down, Down], |i| {
        rbar.get(i) + rbar.get(&[i[0], i[1], i[3], i[2]])
    });
    rep.push(m, "curvature-antisymmetry", &anti)?;

    // R = R̄ − 2∇̄_[c L^a_d]b + 2 L^a_r[c L^r_d]b
    let l = d.l();
    let dbl = covariant_derivative(gbar, l);
    let riemann = m.riemann();
    let inv = TensorField::from_fn(chart, &[Up, Down, Down, Down], |i| {
        let (a, b, c, dd) = (i[0], i[1], i[2], i[3]);
        let mut terms = vec![
            riemann.get(i).clone(),
            -rbar.get(i),
            dbl.get(&[c, a, dd, b]).clone(),
            -dbl.get(&[dd, a, c, b]),
        ];
        for r in 0..n {
            terms.push(-(l.get(&[a, r, c]) * l.get(&[r, dd, b])));
            terms.push(l.get(&[a, r, dd]) * l.get(&[r, c, b]));
        }
        Expr::sum(terms)
    });
    rep.push(m, "curvature-inverse-relation", &inv)?;

    // £ξ γ̄^a_bc = ∇̄_b ∇̄_c ξ^a + ξ^d R̄^a_cdb
    let lie_g = lie_derivative_connection(xi, gbar)?;
    let dxi = covariant_derivative(gbar, xi);
    let ddxi = covariant_derivative(gbar, &dxi);
    let lie_xi = TensorField::from_fn(chart, &udd, |i| {
        let (a, b, c) = (i[0], i[1], i[2]);
        lie_g.get(i)
            - ddxi.get(&[b, c, a])
            - sum_over(n, |dd| xi.get(&[dd]) * rbar.get(&[a, c, dd, b]))
    });
    rep.push(m, "lie-adapted-connection", &lie_xi)?;

    // ∇̄_c £ξ P_ab − £ξ ∇̄_c P_ab = (£ξγ̄^r_ca) P_rb + (£ξγ̄^r_cb) P_ar
    let p = pp.p();
    let lie_p = lie_derivative_partial(xi, p)?;
    let lhs1 = covariant_derivative(gbar, &lie_p);
    let lhs2 = lie_derivative_partial(xi, &covariant_derivative(gbar, p))?;
    let comm = TensorField::from_fn(chart, &d3, |i| {
        let (c, a, b) = (i[0], i[1], i[2]);
        lhs1.get(i) - lhs2.get(i)
            - sum_over(n, |r| {
                lie_g.get(&[r, c, a]) * p.get(&[r, b]) + lie_g.get(&[r, c, b]) * p.get(&[a, r])
            })
    });
    rep.push(m, "lie-commutation", &comm)?;

    // £ξ R̄^d_cab = ∇̄_a £ξγ̄^d_bc − ∇̄_b £ξγ̄^d_ac
    let lie_r = lie_derivative_partial(xi, rbar)?;
    let dlg = covariant_derivative(gbar, &lie_g);
    let lie_curv = TensorField::from_fn(chart, &[Up, Down, Down, Down], |i| {
        let (dd, c, a, b) = (i[0], i[1], i[2], i[3]);
        lie_r.get(i) - dlg.get(&[a, dd, b, c]) + dlg.get(&[b, dd, a, c])
    });
    rep.push(m, "lie-curvature", &lie_curv)?;

    // £ξ Γ^a_bc = ½ g^ae [∇_b £ξg_ce + ∇_c £ξg_be − ∇_e £ξg_bc]
    let lie_lc = lie_derivative_connection(xi, lc)?;
    let lie_metric = lie_derivative_partial(xi, m.g())?;
    let dlm = covariant_derivative(lc, &lie_metric);
    let lie_conn = TensorField::from_fn(chart, &udd, |i| {
        let (a, b, c) = (i[0], i[1], i[2]);
        lie_lc.get(i)
            - frac(1, 2)
                * sum_over(n, |e| {
                    m.g_inv().get(&[a, e])
                        * (dlm.get(&[b, c, e]) + dlm.get(&[c, b, e]) - dlm.get(&[e, b, c]))
                })
    });
    rep.push(m, "lie-levi-civita", &lie_conn)?;

    Ok(rep)
}
