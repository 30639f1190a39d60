use crate::error::{Error, Result};
use crate::expr::Expr;

use super::{sum_over, Connection, MetricChart, TensorField, Variance};

/// Coordinate gradient `∂_d T`, new Down slot first. Not tensorial on its own.
pub fn partial_derivative(t: &TensorField) -> TensorField {
    let chart = t.chart().clone();
    let mut slots = vec![Variance::Down];
    slots.extend_from_slice(t.slots());
    TensorField::from_fn(&chart, &slots, |idx| chart.diff(t.get(&idx[1..]), idx[0]))
}

/// `∇_d T` for the given symmetric connection, new Down slot first.
pub fn covariant_derivative(conn: &Connection, t: &TensorField) -> TensorField {
    let chart = t.chart().clone();
    let n = chart.dim();
    let mut slots = vec![Variance::Down];
    slots.extend_from_slice(t.slots());
    let mut scratch = vec![0usize; t.rank()];
    TensorField::from_fn(&chart, &slots, |idx| {
        let d = idx[0];
        let rest = &idx[1..];
        let mut terms = vec![chart.diff(t.get(rest), d)];
        for (k, var) in t.slots().iter().enumerate() {
            scratch.copy_from_slice(rest);
            for r in 0..n {
                scratch[k] = r;
                let comp = t.get(&scratch);
                if comp.is_zero() {
                    continue;
                }
                match var {
                    Variance::Up => {
                        let g = conn.coeff(rest[k], d, r);
                        if !g.is_zero() {
                            terms.push(g * comp);
                        }
                    }
                    Variance::Down => {
                        let g = conn.coeff(r, d, rest[k]);
                        if !g.is_zero() {
                            terms.push(-(g * comp));
                        }
                    }
                }
            }
        }
        Expr::sum(terms)
    })
}

/// Contracts slot `slot` of `t` with a rank-2 field `m` (`m^{ab}` or `m_{ab}`),
/// replacing the slot variance by `to`.
fn contract_slot_with(t: &TensorField, slot: usize, m: &TensorField, to: Variance) -> TensorField {
    let n = t.dim();
    let mut slots = t.slots().to_vec();
    slots[slot] = to;
    let mut src = vec![0usize; t.rank()];
    TensorField::from_fn(t.chart(), &slots, |idx| {
        src.copy_from_slice(idx);
        sum_over(n, |b| {
            src[slot] = b;
            let c = t.get(&src);
            if c.is_zero() {
                return Expr::zero();
            }
            m.get(&[idx[slot], b]) * c
        })
    })
}

pub fn raise_index(m: &MetricChart, t: &TensorField, slot: usize) -> Result<TensorField> {
    match t.slots().get(slot) {
        Some(Variance::Down) => Ok(contract_slot_with(t, slot, m.g_inv(), Variance::Up)),
        _ => Err(Error::SlotVarianceMismatch(format!(
            "slot {slot} of {:?} is not a lower index",
            t.slots()
        ))),
    }
}

pub fn lower_index(m: &MetricChart, t: &TensorField, slot: usize) -> Result<TensorField> {
    match t.slots().get(slot) {
        Some(Variance::Up) => Ok(contract_slot_with(t, slot, m.g(), Variance::Down)),
        _ => Err(Error::SlotVarianceMismatch(format!(
            "slot {slot} of {:?} is not an upper index",
            t.slots()
        ))),
    }
}

/// Trace over one Up and one Down slot.
pub fn contract(t: &TensorField, s1: usize, s2: usize) -> Result<TensorField> {
    let (v1, v2) = match (t.slots().get(s1), t.slots().get(s2)) {
        (Some(a), Some(b)) if s1 != s2 => (*a, *b),
        _ => {
            return Err(Error::SlotVarianceMismatch(format!(
                "invalid contraction slots ({s1}, {s2}) for rank {}",
                t.rank()
            )))
        }
    };
    if v1 == v2 {
        return Err(Error::SlotVarianceMismatch(format!(
            "cannot contract two {v1:?} slots"
        )));
    }
    let n = t.dim();
    let keep: Vec<usize> = (0..t.rank()).filter(|k| *k != s1 && *k != s2).collect();
    let slots: Vec<Variance> = keep.iter().map(|k| t.slots()[*k]).collect();
    let mut src = vec![0usize; t.rank()];
    Ok(TensorField::from_fn(t.chart(), &slots, |idx| {
        for (j, k) in keep.iter().enumerate() {
            src[*k] = idx[j];
        }
        sum_over(n, |r| {
            src[s1] = r;
            src[s2] = r;
            t.get(&src).clone()
        })
    }))
}

/// Lie derivative along `xi` computed with any symmetric connection:
/// `ξ^c ∇_c T − Σ_up (∇_c ξ^a) T^{..c..} + Σ_down (∇_b ξ^c) T_{..c..}`.
pub fn lie_derivative(xi: &TensorField, t: &TensorField, conn: &Connection) -> Result<TensorField> {
    let dt = covariant_derivative(conn, t);
    let dxi = covariant_derivative(conn, xi);
    lie_from_gradients(xi, t, &dt, &dxi)
}

/// Lie derivative with plain coordinate derivatives (connection free).
pub fn lie_derivative_partial(xi: &TensorField, t: &TensorField) -> Result<TensorField> {
    let dt = partial_derivative(t);
    let dxi = partial_derivative(xi);
    lie_from_gradients(xi, t, &dt, &dxi)
}

fn lie_from_gradients(
    xi: &TensorField,
    t: &TensorField,
    dt: &TensorField,
    dxi: &TensorField,
) -> Result<TensorField> {
    if xi.slots() != [Variance::Up] {
        return Err(Error::SlotVarianceMismatch(format!(
            "Lie derivative needs a vector field, got {:?}",
            xi.slots()
        )));
    }
    let n = t.dim();
    let mut src = vec![0usize; t.rank() + 1];
    let mut inner = vec![0usize; t.rank()];
    Ok(TensorField::from_fn(t.chart(), t.slots(), |idx| {
        let mut terms = Vec::new();
        for c in 0..n {
            src[0] = c;
            src[1..].copy_from_slice(idx);
            terms.push(xi.get(&[c]) * dt.get(&src));
        }
        for (k, var) in t.slots().iter().enumerate() {
            inner.copy_from_slice(idx);
            for c in 0..n {
                inner[k] = c;
                let comp = t.get(&inner);
                if comp.is_zero() {
                    continue;
                }
                match var {
                    // dxi[c][a] = ∇_c ξ^a
                    Variance::Up => terms.push(-(dxi.get(&[c, idx[k]]) * comp)),
                    Variance::Down => terms.push(dxi.get(&[idx[k], c]) * comp),
                }
            }
        }
        Expr::sum(terms)
    }))
}

/// Lie derivative of connection coefficients:
/// `ξ^d ∂_d γ^a_bc − γ^d_bc ∂_d ξ^a + γ^a_dc ∂_b ξ^d + γ^a_bd ∂_c ξ^d + ∂_b ∂_c ξ^a`.
pub fn lie_derivative_connection(xi: &TensorField, conn: &Connection) -> Result<TensorField> {
    if xi.slots() != [Variance::Up] {
        return Err(Error::SlotVarianceMismatch(format!(
            "Lie derivative needs a vector field, got {:?}",
            xi.slots()
        )));
    }
    let chart = conn.chart().clone();
    let n = chart.dim();
    let dxi = partial_derivative(xi);
    Ok(TensorField::from_fn(
        &chart,
        &[Variance::Up, Variance::Down, Variance::Down],
        |i| {
            let (a, b, c) = (i[0], i[1], i[2]);
            let mut terms = vec![chart.diff(dxi.get(&[c, a]), b)];
            for d in 0..n {
                terms.push(xi.get(&[d]) * chart.diff(conn.coeff(a, b, c), d));
                terms.push(-(conn.coeff(d, b, c) * dxi.get(&[d, a])));
                terms.push(conn.coeff(a, d, c) * dxi.get(&[b, d]));
                terms.push(conn.coeff(a, b, d) * dxi.get(&[c, d]));
            }
            Expr::sum(terms)
        },
    ))
}

/// Curvature `R^a_bcd = ∂_c γ^a_db − ∂_d γ^a_cb + γ^a_rc γ^r_db − γ^a_rd γ^r_cb`.
pub fn riemann_of(conn: &Connection) -> TensorField {
    let chart = conn.chart().clone();
    let n = chart.dim();
    TensorField::from_fn(
        &chart,
        &[Variance::Up, Variance::Down, Variance::Down, Variance::Down],
        |i| {
            let (a, b, c, d) = (i[0], i[1], i[2], i[3]);
            if c == d {
                return Expr::zero();
            }
            let mut terms = vec![
                chart.diff(conn.coeff(a, d, b), c),
                -chart.diff(conn.coeff(a, c, b), d),
            ];
            for r in 0..n {
                terms.push(conn.coeff(a, r, c) * conn.coeff(r, d, b));
                terms.push(-(conn.coeff(a, r, d) * conn.coeff(r, c, b)));
            }
            Expr::sum(terms)
        },
    )
}
