//! Orthogonal complementary projector pairs `(P, Π)` with `P + Π = g`.

use std::sync::Arc;

use crate::error::{Error, Invariant, Result};
use crate::expr::{is_zero, zero_test, Expr, ZeroVerdict};
use crate::geometry::{symbolic_inverse, sum_over, MetricChart, TensorField, Variance};

const DD: [Variance; 2] = [Variance::Down, Variance::Down];
const UD: [Variance; 2] = [Variance::Up, Variance::Down];
const UU: [Variance; 2] = [Variance::Up, Variance::Up];

/// A validated projector pair. All index positions are cached because the
/// downstream formulas use every one of them.
#[derive(Clone, Debug)]
pub struct ProjectorPair {
    rank: usize,
    p: TensorField,
    pi: TensorField,
    s: TensorField,
    p_mixed: TensorField,
    pi_mixed: TensorField,
    p_up: TensorField,
    pi_up: TensorField,
}

fn mixed_of(m: &MetricChart, low: &TensorField) -> TensorField {
    let n = m.dim();
    TensorField::from_fn(m.chart(), &UD, |i| {
        sum_over(n, |c| m.g_inv().get(&[i[0], c]) * low.get(&[c, i[1]]))
    })
}

fn up_of(m: &MetricChart, mixed: &TensorField) -> TensorField {
    let n = m.dim();
    TensorField::from_fn(m.chart(), &UU, |i| {
        sum_over(n, |c| mixed.get(&[i[0], c]) * m.g_inv().get(&[c, i[1]]))
    })
}

fn require(m: &MetricChart, invariant: Invariant, residuals: &TensorField) -> Result<()> {
    match m.zero_test(residuals)? {
        ZeroVerdict::NonZero(w) => Err(Error::ValidationFailure {
            invariant,
            witness: Some(Box::new(w)),
        }),
        _ => Ok(()),
    }
}

impl ProjectorPair {
    /// Projector onto the span of the coordinate vectors `∂_α`, α in `block`,
    /// orthogonal with respect to `g`: `P_ab = g_aα H^{αβ} g_βb` with `H` the
    /// inverse Gram matrix of the block.
    pub fn from_coordinate_block(m: &MetricChart, block: &[usize]) -> Result<ProjectorPair> {
        let n = m.dim();
        if block.is_empty() || block.len() >= n || block.iter().any(|b| *b >= n) {
            return Err(Error::InvalidRank { n, p: block.len() });
        }
        let mut sorted = block.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != block.len() {
            return Err(Error::InvalidChart("repeated coordinate in block".into()));
        }
        let gram: Vec<Vec<Expr>> = sorted
            .iter()
            .map(|a| sorted.iter().map(|b| m.g().get(&[*a, *b]).clone()).collect())
            .collect();
        let (h, det) = symbolic_inverse(&gram);
        if is_zero(&det, m.ctx())?.is_zero() {
            return Err(Error::NullDistribution);
        }
        // P^a_b = δ^a_α H^{αβ} g_βb
        let mixed = TensorField::from_fn(m.chart(), &UD, |i| {
            match sorted.iter().position(|x| *x == i[0]) {
                None => Expr::zero(),
                Some(x) => Expr::sum(
                    sorted
                        .iter()
                        .enumerate()
                        .map(|(y, b)| &h[x][y] * m.g().get(&[*b, i[1]])),
                ),
            }
        });
        let low = TensorField::from_fn(m.chart(), &DD, |i| {
            let (a, b) = (i[0].min(i[1]), i[0].max(i[1]));
            Expr::sum(sorted.iter().enumerate().flat_map(|(x, al)| {
                let h = &h;
                sorted.iter().enumerate().map(move |(y, be)| {
                    m.g().get(&[a, *al]) * &h[x][y] * m.g().get(&[*be, b])
                })
            }))
        });
        ProjectorPair::validated(m, low, Some(mixed))
    }

    /// Projector from explicit covariant components; `Π := g − P`.
    pub fn from_components(m: &MetricChart, p: TensorField) -> Result<ProjectorPair> {
        if p.slots() != DD {
            return Err(Error::SlotVarianceMismatch(format!(
                "projector needs (Down, Down), got {:?}",
                p.slots()
            )));
        }
        if !Arc::ptr_eq(p.chart(), m.chart()) {
            return Err(Error::ChartMismatch);
        }
        ProjectorPair::validated(m, p, None)
    }

    fn validated(m: &MetricChart, p: TensorField, mixed: Option<TensorField>) -> Result<ProjectorPair> {
        let n = m.dim();
        let chart = m.chart();
        let sym = TensorField::from_fn(chart, &DD, |i| p.get(&[i[0], i[1]]) - p.get(&[i[1], i[0]]));
        require(m, Invariant::Symmetry, &sym)?;

        let pi = m.g().sub(&p)?;
        let compl = p.add(&pi)?.sub(m.g())?;
        require(m, Invariant::Complementarity, &compl)?;

        let p_mixed = mixed_of(m, &p);
        let pi_mixed = mixed_of(m, &pi);
        let square = |low: &TensorField, mix: &TensorField| {
            TensorField::from_fn(chart, &DD, |i| {
                sum_over(n, |q| low.get(&[i[0], q]) * mix.get(&[q, i[1]])) - low.get(&[i[0], i[1]])
            })
        };
        require(m, Invariant::Idempotency, &square(&p, &p_mixed))?;
        require(m, Invariant::Idempotency, &square(&pi, &pi_mixed))?;

        let orth = TensorField::from_fn(chart, &DD, |i| {
            sum_over(n, |q| p.get(&[i[0], q]) * pi_mixed.get(&[q, i[1]]))
        });
        require(m, Invariant::Orthogonality, &orth)?;

        let trace = sum_over(n, |a| p_mixed.get(&[a, a]).clone());
        let rank = (0..=n)
            .map(|k| Ok::<_, Error>((k, is_zero(&(&trace - Expr::int(k as i64)), m.ctx())?.is_zero())))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .find(|(_, ok)| *ok)
            .map(|(k, _)| k)
            .ok_or(Error::NonIntegerTrace)?;
        if rank == 0 || rank == n {
            return Err(Error::InvalidRank { n, p: rank });
        }

        let s = p.sub(&pi)?;
        let s_mixed = mixed_of(m, &s);
        let root = TensorField::from_fn(chart, &DD, |i| {
            sum_over(n, |q| s.get(&[i[0], q]) * s_mixed.get(&[q, i[1]])) - m.g().get(&[i[0], i[1]])
        });
        require(m, Invariant::SquareRoot, &root)?;

        let p_mixed = match mixed {
            Some(built) => {
                require(m, Invariant::MixedForm, &built.sub(&p_mixed)?)?;
                built
            }
            None => p_mixed,
        };
        let pi_mixed = TensorField::identity(chart).sub(&p_mixed)?;
        let p_up = up_of(m, &p_mixed);
        let pi_up = m.g_inv().sub(&p_up)?;
        Ok(ProjectorPair { rank, p, pi, s, p_mixed, pi_mixed, p_up, pi_up })
    }

    /// The dual pair `(Π, P)` of rank `n − p`.
    pub fn swapped(&self) -> ProjectorPair {
        ProjectorPair {
            rank: self.p.dim() - self.rank,
            p: self.pi.clone(),
            pi: self.p.clone(),
            s: self.s.map(|c| -c),
            p_mixed: self.pi_mixed.clone(),
            pi_mixed: self.p_mixed.clone(),
            p_up: self.pi_up.clone(),
            pi_up: self.p_up.clone(),
        }
    }

    /// Rank `p` of `P`.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.p.dim()
    }

    /// `P_ab`.
    pub fn p(&self) -> &TensorField {
        &self.p
    }

    /// `Π_ab`.
    pub fn pi(&self) -> &TensorField {
        &self.pi
    }

    /// `S_ab = P_ab − Π_ab`.
    pub fn s(&self) -> &TensorField {
        &self.s
    }

    /// `P^a_b`.
    pub fn p_mixed(&self) -> &TensorField {
        &self.p_mixed
    }

    /// `Π^a_b`.
    pub fn pi_mixed(&self) -> &TensorField {
        &self.pi_mixed
    }

    /// `P^ab`.
    pub fn p_up(&self) -> &TensorField {
        &self.p_up
    }

    /// `Π^ab`.
    pub fn pi_up(&self) -> &TensorField {
        &self.pi_up
    }
}

/// Zero verdicts for every projector axiom, without failing early.
pub fn axiom_report(m: &MetricChart, pp: &ProjectorPair) -> Result<Vec<(Invariant, ZeroVerdict)>> {
    let n = m.dim();
    let chart = m.chart();
    let mut out = Vec::new();
    let sym = TensorField::from_fn(chart, &DD, |i| {
        pp.p().get(&[i[0], i[1]]) - pp.p().get(&[i[1], i[0]])
    });
    out.push((Invariant::Symmetry, m.zero_test(&sym)?));
    out.push((Invariant::Complementarity, m.zero_test(&pp.p().add(pp.pi())?.sub(m.g())?)?));
    let idem = TensorField::from_fn(chart, &DD, |i| {
        sum_over(n, |q| pp.p().get(&[i[0], q]) * pp.p_mixed().get(&[q, i[1]])) - pp.p().get(&[i[0], i[1]])
    });
    out.push((Invariant::Idempotency, m.zero_test(&idem)?));
    let orth = TensorField::from_fn(chart, &DD, |i| {
        sum_over(n, |q| pp.p().get(&[i[0], q]) * pp.pi_mixed().get(&[q, i[1]]))
    });
    out.push((Invariant::Orthogonality, m.zero_test(&orth)?));
    let trace = sum_over(n, |a| pp.p_mixed().get(&[a, a]).clone()) - Expr::int(pp.rank() as i64);
    out.push((Invariant::Trace, zero_test(&[trace], m.ctx())?));
    let s_mixed = mixed_of(m, pp.s());
    let root = TensorField::from_fn(chart, &DD, |i| {
        sum_over(n, |q| pp.s().get(&[i[0], q]) * s_mixed.get(&[q, i[1]])) - m.g().get(&[i[0], i[1]])
    });
    out.push((Invariant::SquareRoot, m.zero_test(&root)?));
    out.push((Invariant::MixedForm, m.zero_test(&mixed_of(m, pp.p()).sub(pp.p_mixed())?)?));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Chart;

    fn flat4() -> MetricChart {
        let chart = Chart::new(&[
            ("x1", (0.0, 1.0)),
            ("x2", (0.0, 1.0)),
            ("x3", (0.0, 1.0)),
            ("x4", (0.0, 1.0)),
        ])
        .unwrap();
        let rows: Vec<Vec<Expr>> = (0..4)
            .map(|a| (0..4).map(|b| Expr::int((a == b) as i64)).collect())
            .collect();
        MetricChart::from_rows(&chart, &rows, chart.context()).unwrap()
    }

    #[test]
    fn flat_block_projector_is_diagonal() {
        let m = flat4();
        let pp = ProjectorPair::from_coordinate_block(&m, &[0, 1]).unwrap();
        assert_eq!(pp.rank(), 2);
        for a in 0..4 {
            for b in 0..4 {
                let want = Expr::int((a == b && a < 2) as i64);
                assert_eq!(pp.p_mixed().get(&[a, b]), &want);
            }
        }
    }

    #[test]
    fn full_metric_is_not_a_proper_projector() {
        let m = flat4();
        let err = ProjectorPair::from_components(&m, m.g().clone()).unwrap_err();
        assert!(matches!(err, Error::InvalidRank { n: 4, p: 4 }));
    }

    #[test]
    fn half_sum_with_square_root_passes() {
        // S = diag(1,1,-1,1) is a square root of the flat metric
        let m = flat4();
        let s = TensorField::from_fn(m.chart(), &DD, |i| {
            Expr::int(if i[0] != i[1] { 0 } else if i[0] == 2 { -1 } else { 1 })
        });
        let p = m.g().add(&s).unwrap().scale(&Expr::rational(1, 2));
        let pp = ProjectorPair::from_components(&m, p).unwrap();
        assert_eq!(pp.rank(), 3);
    }

    #[test]
    fn non_idempotent_tensor_rejected() {
        let m = flat4();
        let x = m.chart().coord(0).clone();
        let p = TensorField::from_fn(m.chart(), &DD, |i| {
            if i[0] == i[1] {
                Expr::int(1) + &x
            } else {
                Expr::rational(1, 3)
            }
        });
        // oracle: (P P - P)_00 = (1+x)^2 + 3/9 - (1+x) at x = 0.5 is 1.0833...
        let direct = (1.5f64).powi(2) + 3.0 / 9.0 - 1.5;
        assert!(direct.abs() > 1e-3);
        match ProjectorPair::from_components(&m, p) {
            Err(Error::ValidationFailure { invariant, .. }) => {
                assert_eq!(invariant, Invariant::Idempotency)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn null_block_rejected() {
        let chart = Chart::new(&[("u", (0.0, 1.0)), ("v", (0.0, 1.0)), ("y", (0.0, 1.0))]).unwrap();
        let z = Expr::zero;
        let rows = vec![
            vec![z(), Expr::one(), z()],
            vec![Expr::one(), z(), z()],
            vec![z(), z(), Expr::one()],
        ];
        let m = MetricChart::from_rows(&chart, &rows, chart.context()).unwrap();
        assert!(matches!(
            ProjectorPair::from_coordinate_block(&m, &[0]),
            Err(Error::NullDistribution)
        ));
    }
}
