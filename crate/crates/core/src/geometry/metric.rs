use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::expr::{is_zero, EvalContext, Expr, Kind, Rational, ZeroVerdict};

use super::ops::riemann_of;
use super::{sum_over, Chart, Connection, TensorField, Variance};

/// A chart with a symmetric, nondegenerate metric and its derived objects.
/// Inverse, determinant and Christoffel symbols are computed eagerly; the
/// Riemann tensor on first use.
pub struct MetricChart {
    chart: Arc<Chart>,
    ctx: Arc<EvalContext>,
    g: TensorField,
    g_inv: TensorField,
    det: Expr,
    christoffel: Connection,
    riemann: OnceLock<TensorField>,
}

impl MetricChart {
    /// Builds the metric chart. Opaque symbols of `g` that `ctx` leaves
    /// unbound receive random generic bindings.
    pub fn new(g: TensorField, mut ctx: EvalContext) -> Result<MetricChart> {
        if g.slots() != [Variance::Down, Variance::Down] {
            return Err(Error::SlotVarianceMismatch(format!(
                "metric needs (Down, Down), got {:?}",
                g.slots()
            )));
        }
        let chart = g.chart().clone();
        let n = chart.dim();
        if ctx.dim() != n || ctx.coordinates().zip(chart.names()).any(|(a, b)| a != b) {
            return Err(Error::InvalidChart(
                "evaluation context coordinates differ from the chart".into(),
            ));
        }
        ctx.validate()?;
        ctx.bind_random_functions(g.components());
        for a in 0..n {
            for b in a + 1..n {
                let d = g.get(&[a, b]) - g.get(&[b, a]);
                if !is_zero(&d, &ctx)?.is_zero() {
                    return Err(Error::AsymmetricMetric(a, b));
                }
            }
        }
        let rows: Vec<Vec<Expr>> = (0..n)
            .map(|a| (0..n).map(|b| g.get(&[a.min(b), a.max(b)]).clone()).collect())
            .collect();
        let (inv, det) = symbolic_inverse(&rows);
        if is_zero(&det, &ctx)?.is_zero() {
            return Err(Error::SingularMetric);
        }
        let g = TensorField::from_fn(&chart, &[Variance::Down, Variance::Down], |i| {
            rows[i[0]][i[1]].clone()
        });
        let g_inv =
            TensorField::from_fn(&chart, &[Variance::Up, Variance::Up], |i| inv[i[0]][i[1]].clone());
        let christoffel = levi_civita(&chart, &g, &g_inv);
        Ok(MetricChart {
            chart,
            ctx: Arc::new(ctx),
            g,
            g_inv,
            det,
            christoffel,
            riemann: OnceLock::new(),
        })
    }

    /// Metric from a full component matrix; the context samples the chart box.
    pub fn from_rows(chart: &Arc<Chart>, rows: &[Vec<Expr>], ctx: EvalContext) -> Result<MetricChart> {
        let n = chart.dim();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::SlotVarianceMismatch(format!("metric must be {n}x{n}")));
        }
        let g = TensorField::from_fn(chart, &[Variance::Down, Variance::Down], |i| {
            rows[i[0]][i[1]].clone()
        });
        MetricChart::new(g, ctx)
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn ctx(&self) -> &EvalContext {
        &self.ctx
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn g(&self) -> &TensorField {
        &self.g
    }

    pub fn g_inv(&self) -> &TensorField {
        &self.g_inv
    }

    pub fn det(&self) -> &Expr {
        &self.det
    }

    pub fn christoffel(&self) -> &Connection {
        &self.christoffel
    }

    pub fn riemann(&self) -> &TensorField {
        self.riemann.get_or_init(|| riemann_of(&self.christoffel))
    }

    /// Zero test in this chart's context.
    pub fn zero_test(&self, t: &TensorField) -> Result<ZeroVerdict> {
        t.zero_test(&self.ctx)
    }

    /// A copy sharing all symbolic data but sampling with other settings.
    pub fn with_context(&self, mut ctx: EvalContext) -> MetricChart {
        ctx.bind_random_functions(self.g.components());
        MetricChart {
            chart: self.chart.clone(),
            ctx: Arc::new(ctx),
            g: self.g.clone(),
            g_inv: self.g_inv.clone(),
            det: self.det.clone(),
            christoffel: self.christoffel.clone(),
            riemann: self.riemann.clone(),
        }
    }
}

fn levi_civita(chart: &Arc<Chart>, g: &TensorField, g_inv: &TensorField) -> Connection {
    let n = chart.dim();
    let dg = TensorField::from_fn(chart, &[Variance::Down; 3], |i| {
        chart.diff(g.get(&[i[1], i[2]]), i[0])
    });
    // first kind: [d; b c]
    let first = TensorField::from_fn(chart, &[Variance::Down; 3], |i| {
        let (d, b, c) = (i[0], i[1], i[2]);
        let h = Expr::rational(1, 2);
        if b > c {
            return Expr::zero();
        }
        h * (dg.get(&[b, d, c]) + dg.get(&[c, d, b]) - dg.get(&[d, b, c]))
    });
    let half = TensorField::from_fn(chart, &[Variance::Up, Variance::Down, Variance::Down], |i| {
        let (a, b, c) = (i[0], i[1], i[2]);
        if b > c {
            return Expr::zero();
        }
        sum_over(n, |d| {
            let f = first.get(&[d, b, c]);
            if f.is_zero() {
                Expr::zero()
            } else {
                g_inv.get(&[a, d]) * f
            }
        })
    });
    let full = TensorField::from_fn(chart, &[Variance::Up, Variance::Down, Variance::Down], |i| {
        half.get(&[i[0], i[1].min(i[2]), i[1].max(i[2])]).clone()
    });
    Connection::new(full).expect("slots are fixed above")
}

/// Pulls the monomial factor shared by every term of a sum out in front.
pub(crate) fn factor_common(e: &Expr) -> Expr {
    let Kind::Add(terms) = e.kind() else {
        return e.clone();
    };
    let monomial = |t: &Expr| -> Vec<(Expr, Rational)> {
        let factors: Vec<Expr> = match t.kind() {
            Kind::Mul(fs) => fs.clone(),
            _ => vec![t.clone()],
        };
        factors
            .into_iter()
            .filter(|f| f.as_rational().is_none())
            .map(|f| match f.kind() {
                Kind::Pow(b, k) => (b.clone(), k.clone()),
                _ => (f.clone(), Rational::from_integer(1.into())),
            })
            .collect()
    };
    let mut common: Vec<(Expr, Rational)> = monomial(&terms[0]);
    for t in &terms[1..] {
        let m = monomial(t);
        common.retain_mut(|(b, k)| match m.iter().find(|(c, _)| c == b) {
            Some((_, j)) => {
                if j < k {
                    *k = j.clone();
                }
                true
            }
            None => false,
        });
        if common.is_empty() {
            return e.clone();
        }
    }
    let c = Expr::product(common.iter().map(|(b, k)| Expr::pow(b, k.clone())));
    let inv = c.recip();
    c * Expr::sum(terms.iter().map(|t| t * &inv))
}

/// Inverse and determinant of a symmetric matrix of expressions. Diagonal
/// blocks (connected components of the sparsity pattern) are inverted
/// independently by cofactor expansion.
pub fn symbolic_inverse(a: &[Vec<Expr>]) -> (Vec<Vec<Expr>>, Expr) {
    let n = a.len();
    let mut comp: Vec<usize> = (0..n).collect();
    fn find(c: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while c[r] != r {
            r = c[r];
        }
        c[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if !a[i][j].is_zero() || !a[j][i].is_zero() {
                let (ri, rj) = (find(&mut comp, i), find(&mut comp, j));
                comp[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut root_of: HashMap<usize, usize> = HashMap::new();
    for i in 0..n {
        let r = find(&mut comp, i);
        let k = *root_of.entry(r).or_insert_with(|| {
            blocks.push(Vec::new());
            blocks.len() - 1
        });
        blocks[k].push(i);
    }
    let mut inv = vec![vec![Expr::zero(); n]; n];
    let mut dets = Vec::new();
    for block in &blocks {
        let sub: Vec<Vec<Expr>> = block
            .iter()
            .map(|i| block.iter().map(|j| a[*i][*j].clone()).collect())
            .collect();
        let (bi, bd) = block_inverse(&sub);
        for (x, i) in block.iter().enumerate() {
            for (y, j) in block.iter().enumerate() {
                inv[*i][*j] = bi[x][y].clone();
            }
        }
        dets.push(bd);
    }
    (inv, Expr::product(dets))
}

fn block_inverse(a: &[Vec<Expr>]) -> (Vec<Vec<Expr>>, Expr) {
    let n = a.len();
    if n == 1 {
        return (vec![vec![a[0][0].recip()]], a[0][0].clone());
    }
    let all: Vec<usize> = (0..n).collect();
    let full_mask: u32 = (1u32 << n) - 1;
    let det = factor_common(&laplace(a, &all, 0, full_mask, &mut HashMap::new()));
    let det_inv = det.recip();
    let mut inv = vec![vec![Expr::zero(); n]; n];
    for i in 0..n {
        let rows: Vec<usize> = all.iter().copied().filter(|r| *r != i).collect();
        let mut memo = HashMap::new();
        for j in i..n {
            let minor = laplace(a, &rows, 0, full_mask & !(1 << j), &mut memo);
            if minor.is_zero() {
                continue;
            }
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            let v = factor_common(&minor) * &det_inv * sign;
            inv[i][j] = v.clone();
            inv[j][i] = v;
        }
    }
    (inv, det)
}

/// Determinant of rows `rows[k..]` against the columns in `mask`.
fn laplace(
    a: &[Vec<Expr>],
    rows: &[usize],
    k: usize,
    mask: u32,
    memo: &mut HashMap<(usize, u32), Expr>,
) -> Expr {
    if k == rows.len() {
        return Expr::one();
    }
    if let Some(e) = memo.get(&(k, mask)) {
        return e.clone();
    }
    let mut terms = Vec::new();
    let mut pos = 0;
    for j in 0..a.len() {
        if mask & (1 << j) == 0 {
            continue;
        }
        let entry = &a[rows[k]][j];
        if !entry.is_zero() {
            let rest = laplace(a, rows, k + 1, mask & !(1 << j), memo);
            if !rest.is_zero() {
                let t = entry * rest;
                terms.push(if pos % 2 == 0 { t } else { -t });
            }
        }
        pos += 1;
    }
    let d = Expr::sum(terms);
    memo.insert((k, mask), d.clone());
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::zero_test;

    fn sphere() -> MetricChart {
        let chart = Chart::new(&[("theta", (0.3, 2.8)), ("phi", (0.0, 6.0))]).unwrap();
        let th = chart.coord(0).clone();
        let rows = vec![
            vec![Expr::one(), Expr::zero()],
            vec![Expr::zero(), th.sin().powi(2)],
        ];
        let ctx = chart.context();
        MetricChart::from_rows(&chart, &rows, ctx).unwrap()
    }

    #[test]
    fn flat_plane_has_vanishing_christoffels() {
        let chart = Chart::new(&[("x", (0.0, 1.0)), ("y", (0.0, 1.0))]).unwrap();
        let rows = vec![vec![Expr::one(), Expr::zero()], vec![Expr::zero(), Expr::one()]];
        let m = MetricChart::from_rows(&chart, &rows, chart.context()).unwrap();
        assert!(m.christoffel().field().is_structurally_zero());
        assert!(m.riemann().is_structurally_zero());
    }

    #[test]
    fn sphere_christoffel_and_curvature() {
        let m = sphere();
        let th = m.chart().coord(0).clone();
        // Γ^θ_φφ = -sinθ cosθ, from ½ g^θθ(-∂_θ g_φφ)
        let oracle = -(th.sin() * th.cos());
        let d = m.christoffel().coeff(0, 1, 1) - &oracle;
        assert!(is_zero(&d, m.ctx()).unwrap().is_zero());
        // R^θ_φθφ = ∂_θ Γ^θ_φφ - Γ^θ_φφ Γ^φ_θφ (other terms vanish) = sin²θ
        let d = m.riemann().get(&[0, 1, 0, 1]) - th.sin().powi(2);
        assert!(is_zero(&d, m.ctx()).unwrap().is_zero());
    }

    #[test]
    fn inverse_multiplies_to_identity() {
        let chart = Chart::new(&[("x", (0.5, 1.5)), ("y", (0.5, 1.5)), ("z", (0.5, 1.5))]).unwrap();
        let (x, y, z) = (chart.coord(0).clone(), chart.coord(1).clone(), chart.coord(2).clone());
        let rows = vec![
            vec![Expr::int(3) + &x, y.clone(), Expr::zero()],
            vec![y.clone(), Expr::int(2) + z.sin(), x * &z],
            vec![Expr::zero(), chart.coord(0) * &z, Expr::int(4) + y.exp()],
        ];
        let m = MetricChart::from_rows(&chart, &rows, chart.context()).unwrap();
        let mut residuals = Vec::new();
        for a in 0..3 {
            for b in 0..3 {
                let s = sum_over(3, |c| m.g().get(&[a, c]) * m.g_inv().get(&[c, b]));
                residuals.push(s - Expr::int((a == b) as i64));
            }
        }
        assert!(zero_test(&residuals, m.ctx()).unwrap().is_zero());
    }

    #[test]
    fn singular_and_asymmetric_metrics_rejected() {
        let chart = Chart::new(&[("x", (0.5, 1.5)), ("y", (0.5, 1.5))]).unwrap();
        let x = chart.coord(0).clone();
        let rows = vec![vec![x.clone(), x.clone()], vec![x.clone(), x.clone()]];
        assert!(matches!(
            MetricChart::from_rows(&chart, &rows, chart.context()),
            Err(Error::SingularMetric)
        ));
        let rows = vec![vec![Expr::one(), x.clone()], vec![Expr::zero(), Expr::one()]];
        assert!(matches!(
            MetricChart::from_rows(&chart, &rows, chart.context()),
            Err(Error::AsymmetricMetric(0, 1))
        ));
    }

    #[test]
    fn common_factors_are_pulled_out() {
        let (x, y) = (Expr::coord("x"), Expr::coord("y"));
        let e = x.powi(2) * &y + x.powi(3);
        let f = factor_common(&e);
        assert_eq!(f, x.powi(2) * (y + x));
    }
}
