//! Decision procedures on top of [`BiconformalData`]: conformal separability
//! with respect to the given projector, the subclass of a separable metric,
//! the bound on the dimension of the symmetry algebra, and the necessary
//! condition for a foliation by conformal leaves.

use std::fmt;

use crate::biconformal::BiconformalData;
use crate::error::{Error, Result};
use crate::expr::{Expr, ZeroVerdict};
use crate::geometry::{sum_over, MetricChart, TensorField, Variance};
use crate::projectors::ProjectorPair;

use Variance::Down;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Class {
    Decomposable,
    WarpedProduct,
    DoubleWarped,
    TwistedProduct,
    ConformallyReducible,
    GenericSeparable,
    NotSeparable,
}

impl Class {
    pub const ALL: [Class; 7] = [
        Class::Decomposable,
        Class::WarpedProduct,
        Class::DoubleWarped,
        Class::TwistedProduct,
        Class::ConformallyReducible,
        Class::GenericSeparable,
        Class::NotSeparable,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Class::Decomposable => "Decomposable",
            Class::WarpedProduct => "WarpedProduct",
            Class::DoubleWarped => "DoubleWarped",
            Class::TwistedProduct => "TwistedProduct",
            Class::ConformallyReducible => "ConformallyReducible",
            Class::GenericSeparable => "GenericSeparable",
            Class::NotSeparable => "NotSeparable",
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundResult {
    Finite(usize),
    PossiblyInfinite,
}

/// Verdicts behind a classification. All of them are computed even when an
/// earlier test already decides the label, since the classes overlap.
#[derive(Clone, Debug)]
pub struct Evidence {
    pub e_zero: ZeroVerdict,
    pub w_zero: ZeroVerdict,
    pub de_zero: ZeroVerdict,
    pub dw_zero: ZeroVerdict,
    pub du_zero: ZeroVerdict,
}

#[derive(Clone, Debug)]
pub struct ClassificationReport {
    pub separable: ZeroVerdict,
    pub class: Class,
    pub evidence: Evidence,
    pub n: usize,
    pub p: usize,
    pub bound: BoundResult,
}

/// The decision tree. Earlier branches are the more specific classes.
pub fn decide(separable: bool, e: bool, w: bool, de: bool, dw: bool, du: bool) -> Class {
    if !separable {
        Class::NotSeparable
    } else if e && w {
        Class::Decomposable
    } else if e && dw {
        Class::WarpedProduct
    } else if de && dw {
        Class::DoubleWarped
    } else if e {
        Class::TwistedProduct
    } else if du {
        Class::ConformallyReducible
    } else {
        Class::GenericSeparable
    }
}

/// `(dω)_ab = ∂_a ω_b − ∂_b ω_a`.
pub fn exterior_derivative(omega: &TensorField) -> Result<TensorField> {
    if omega.slots() != [Down] {
        return Err(Error::SlotVarianceMismatch(format!(
            "exterior derivative needs a one-form, got {:?}",
            omega.slots()
        )));
    }
    let chart = omega.chart().clone();
    Ok(TensorField::from_fn(&chart, &[Down, Down], |i| {
        let (a, b) = (i[0], i[1]);
        if a == b {
            Expr::zero()
        } else {
            chart.diff(omega.get(&[b]), a) - chart.diff(omega.get(&[a]), b)
        }
    }))
}

pub fn dimension_bound(n: usize, p: usize) -> Result<BoundResult> {
    if p == 0 || p >= n {
        return Err(Error::InvalidRank { n, p });
    }
    if p <= 2 || p + 2 >= n {
        return Ok(BoundResult::PossiblyInfinite);
    }
    let q = n - p;
    Ok(BoundResult::Finite(p * (p + 1) / 2 + q * (q + 1) / 2))
}

pub fn classify(data: &BiconformalData) -> Result<ClassificationReport> {
    let m = data.metric();
    let separable = m.zero_test(data.t())?;
    let e_zero = m.zero_test(data.e())?;
    let w_zero = m.zero_test(data.w())?;
    let de_zero = m.zero_test(&exterior_derivative(data.e())?)?;
    let dw_zero = m.zero_test(&exterior_derivative(data.w())?)?;
    let du_zero = m.zero_test(&exterior_derivative(data.u())?)?;
    let class = decide(
        separable.is_zero(),
        e_zero.is_zero(),
        w_zero.is_zero(),
        de_zero.is_zero(),
        dw_zero.is_zero(),
        du_zero.is_zero(),
    );
    Ok(ClassificationReport {
        separable,
        class,
        evidence: Evidence { e_zero, w_zero, de_zero, dw_zero, du_zero },
        n: data.n(),
        p: data.p(),
        bound: dimension_bound(data.n(), data.p())?,
    })
}

pub fn classify_metric(m: &MetricChart, pp: &ProjectorPair) -> Result<ClassificationReport> {
    classify(&BiconformalData::new(m, pp)?)
}

/// `P^r_a P^s_b P^q_c T_rsq`, the part of `T` tangent to the leaves.
pub fn leaf_projection_of_t(data: &BiconformalData) -> TensorField {
    let n = data.n();
    let pm = data.projectors().p_mixed();
    let t = data.t();
    let chart = data.metric().chart();
    let first = TensorField::from_fn(chart, &[Down; 3], |i| {
        sum_over(n, |q| pm.get(&[q, i[2]]) * t.get(&[i[0], i[1], q]))
    });
    let second = TensorField::from_fn(chart, &[Down; 3], |i| {
        sum_over(n, |s| pm.get(&[s, i[1]]) * first.get(&[i[0], s, i[2]]))
    });
    TensorField::from_fn(chart, &[Down; 3], |i| {
        sum_over(n, |r| pm.get(&[r, i[0]]) * second.get(&[r, i[1], i[2]]))
    })
}

/// Necessary condition for the leaves of `P` to be conformal hypersurfaces.
pub fn foliation_condition(data: &BiconformalData) -> Result<ZeroVerdict> {
    data.metric().zero_test(&leaf_projection_of_t(data))
}

/// Residuals `∇̄_a P_bc + E_a P_bc/p` and `∇̄_a Π_bc + W_a Π_bc/(n−p)`; both
/// vanish exactly when `T` does.
pub fn parallel_projector_residuals(data: &BiconformalData) -> (TensorField, TensorField) {
    let pp = data.projectors();
    let (n, p) = (data.n() as i64, data.p() as i64);
    let one = |low: &TensorField, form: &TensorField, k: i64| {
        let nb = data.nabla_bar(low);
        TensorField::from_fn(low.chart(), &[Down; 3], |i| {
            nb.get(i) + Expr::rational(1, k) * form.get(&[i[0]]) * low.get(&[i[1], i[2]])
        })
    };
    (one(pp.p(), data.e(), p), one(pp.pi(), data.w(), n - p))
}

/// `∇_b P_ac − (P_bc u_a + P_ab u_c − P_a^r u_r g_bc − P_c^r u_r g_ab)`,
/// indexed `[b][a][c]`. Vanishes on separable metrics.
pub fn gradient_from_u_residual(data: &BiconformalData) -> TensorField {
    let m = data.metric();
    let n = data.n();
    let pp = data.projectors();
    let (p, g, u) = (pp.p(), m.g(), data.u());
    let pm = pp.p_mixed();
    let pu = TensorField::from_fn(m.chart(), &[Down], |i| {
        sum_over(n, |r| pm.get(&[r, i[0]]) * u.get(&[r]))
    });
    let dp = data.grad_p();
    TensorField::from_fn(m.chart(), &[Down; 3], |i| {
        let (b, a, c) = (i[0], i[1], i[2]);
        dp.get(&[b, a, c]).clone()
            - (p.get(&[b, c]) * u.get(&[a]) + p.get(&[a, b]) * u.get(&[c])
                - pu.get(&[a]) * g.get(&[b, c])
                - pu.get(&[c]) * g.get(&[a, b]))
    })
}
