//! Metrics with known answers, used by the test suites and the CLI demos.
//!
//! Adapted-coordinate metrics have the shape `Ξ₁ G_αβ dx^α dx^β + Ξ₂ G_AB dx^A dx^B`
//! with the first `p` coordinates spanning the first leaf. The leaf metrics
//! and conformal factors are opaque functions; which coordinates each factor
//! depends on decides the class of the metric.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classify::Class;
use crate::error::Result;
use crate::expr::{EvalContext, Expr, ExprFunction, Rational};
use crate::geometry::{Chart, MetricChart, TensorField, Variance};
use crate::projectors::ProjectorPair;

pub struct Fixture {
    pub name: String,
    pub metric: MetricChart,
    pub projectors: ProjectorPair,
    /// Classification the construction guarantees, when there is one.
    pub expected: Option<Class>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dependence {
    Constant,
    FirstLeaf,
    SecondLeaf,
    All,
}

/// Families produced by the adapted-coordinates generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorClass {
    Decomposable,
    Warped,
    DoubleWarped,
    Twisted,
    ConformallyReducible,
    /// Independent factors on flat leaves.
    BiconformallyFlat,
    /// Only the first leaf is warped.
    DualWarped,
    /// First leaf metric varies along the second leaf.
    NotSeparable,
}

impl GeneratorClass {
    pub const SEPARABLE: [GeneratorClass; 6] = [
        GeneratorClass::Decomposable,
        GeneratorClass::Warped,
        GeneratorClass::DoubleWarped,
        GeneratorClass::Twisted,
        GeneratorClass::ConformallyReducible,
        GeneratorClass::BiconformallyFlat,
    ];

    pub const ALL: [GeneratorClass; 8] = [
        GeneratorClass::Decomposable,
        GeneratorClass::Warped,
        GeneratorClass::DoubleWarped,
        GeneratorClass::Twisted,
        GeneratorClass::ConformallyReducible,
        GeneratorClass::BiconformallyFlat,
        GeneratorClass::DualWarped,
        GeneratorClass::NotSeparable,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GeneratorClass::Decomposable => "decomposable",
            GeneratorClass::Warped => "warped",
            GeneratorClass::DoubleWarped => "double-warped",
            GeneratorClass::Twisted => "twisted",
            GeneratorClass::ConformallyReducible => "conformally-reducible",
            GeneratorClass::BiconformallyFlat => "biconformally-flat",
            GeneratorClass::DualWarped => "dual-warped",
            GeneratorClass::NotSeparable => "not-separable",
        }
    }

    /// Most specific label the decision tree can reach for a generic member.
    pub fn expected(self) -> Class {
        match self {
            GeneratorClass::Decomposable => Class::Decomposable,
            GeneratorClass::Warped => Class::WarpedProduct,
            GeneratorClass::DoubleWarped | GeneratorClass::DualWarped => Class::DoubleWarped,
            GeneratorClass::Twisted => Class::TwistedProduct,
            GeneratorClass::ConformallyReducible => Class::ConformallyReducible,
            GeneratorClass::BiconformallyFlat => Class::GenericSeparable,
            GeneratorClass::NotSeparable => Class::NotSeparable,
        }
    }

    pub fn spec(self, n: usize, p: usize) -> AdaptedSpec {
        use Dependence::*;
        let base = AdaptedSpec {
            n,
            p,
            first: Constant,
            second: Constant,
            shared_factor: false,
            flat_leaves: false,
            tilted_first_leaf: false,
        };
        match self {
            GeneratorClass::Decomposable => base,
            GeneratorClass::Warped => AdaptedSpec { second: FirstLeaf, ..base },
            GeneratorClass::DoubleWarped => AdaptedSpec { first: SecondLeaf, second: FirstLeaf, ..base },
            GeneratorClass::Twisted => AdaptedSpec { second: All, ..base },
            GeneratorClass::ConformallyReducible => {
                AdaptedSpec { first: All, second: All, shared_factor: true, ..base }
            }
            GeneratorClass::BiconformallyFlat => {
                AdaptedSpec { first: All, second: All, flat_leaves: true, ..base }
            }
            GeneratorClass::DualWarped => AdaptedSpec { first: SecondLeaf, ..base },
            GeneratorClass::NotSeparable => AdaptedSpec { tilted_first_leaf: true, ..base },
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct AdaptedSpec {
    pub n: usize,
    pub p: usize,
    pub first: Dependence,
    pub second: Dependence,
    /// Use one factor for both leaves (`first` decides its dependence).
    pub shared_factor: bool,
    pub flat_leaves: bool,
    pub tilted_first_leaf: bool,
}

/// An adapted metric together with the symbolic pieces it was built from.
pub struct Adapted {
    pub fixture: Fixture,
    pub xi1: Expr,
    pub xi2: Expr,
    /// First-leaf metric, `p × p`, in the first `p` coordinates.
    pub g1: Vec<Vec<Expr>>,
    /// Second-leaf metric, `(n−p) × (n−p)`.
    pub g2: Vec<Vec<Expr>>,
}

pub fn coordinate_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

/// Chart `x1..xn`, each on `[0.5, 1.5]`, and a matching context.
pub fn unit_box(n: usize, seed: u64) -> Result<(Arc<Chart>, EvalContext)> {
    let names = coordinate_names(n);
    let spec: Vec<(&str, (f64, f64))> = names.iter().map(|s| (s.as_str(), (0.5, 1.5))).collect();
    Ok((Chart::new(&spec)?, EvalContext::new(&spec).with_seed(seed)))
}

fn leaf_metric(prefix: &str, coords: &[String], args: &[&str], flat: bool) -> Vec<Vec<Expr>> {
    let k = coords.len();
    (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    if flat {
                        Expr::int((i == j) as i64)
                    } else {
                        let (a, b) = (i.min(j) + 1, i.max(j) + 1);
                        let f = Expr::opaque(&format!("{prefix}{a}{b}"), args);
                        // keep the leaf metric safely non-degenerate
                        if a == b {
                            f
                        } else {
                            f * Expr::rational(1, 8)
                        }
                    }
                })
                .collect()
        })
        .collect()
}

pub fn adapted(spec: &AdaptedSpec, seed: u64) -> Result<Adapted> {
    let (n, p) = (spec.n, spec.p);
    let (chart, ctx) = unit_box(n, seed)?;
    let names = coordinate_names(n);
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let (first, second) = (&refs[..p], &refs[p..]);
    let factor = |name: &str, dep: Dependence| match dep {
        Dependence::Constant => Expr::one(),
        Dependence::FirstLeaf => Expr::opaque(name, first),
        Dependence::SecondLeaf => Expr::opaque(name, second),
        Dependence::All => Expr::opaque(name, &refs),
    };
    let xi1 = factor("Xi1", spec.first);
    let xi2 = if spec.shared_factor { xi1.clone() } else { factor("Xi2", spec.second) };
    let g1_args: &[&str] = if spec.tilted_first_leaf { &refs } else { first };
    let g1 = leaf_metric("Ga", &names[..p], g1_args, spec.flat_leaves);
    let g2 = leaf_metric("Gb", &names[p..], second, spec.flat_leaves);
    let rows: Vec<Vec<Expr>> = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| match (a < p, b < p) {
                    (true, true) => &xi1 * &g1[a][b],
                    (false, false) => &xi2 * &g2[a - p][b - p],
                    _ => Expr::zero(),
                })
                .collect()
        })
        .collect();
    let metric = MetricChart::from_rows(&chart, &rows, ctx)?;
    let block: Vec<usize> = (0..p).collect();
    let projectors = ProjectorPair::from_coordinate_block(&metric, &block)?;
    Ok(Adapted {
        fixture: Fixture {
            name: format!("adapted-n{n}-p{p}-seed{seed}"),
            metric,
            projectors,
            expected: None,
        },
        xi1,
        xi2,
        g1,
        g2,
    })
}

/// One member of a generator family on `n = 4`, `p = 2`.
pub fn generated(class: GeneratorClass, seed: u64) -> Result<Fixture> {
    generated_in(class, 4, 2, seed)
}

pub fn generated_in(class: GeneratorClass, n: usize, p: usize, seed: u64) -> Result<Fixture> {
    let mut f = adapted(&class.spec(n, p), seed)?.fixture;
    f.name = format!("{}-n{n}-p{p}-seed{seed}", class.name());
    f.expected = Some(class.expected());
    Ok(f)
}

/// Euclidean metric on `x1..xn` with the projector onto the first `p` coordinates.
pub fn flat(n: usize, p: usize) -> Result<Fixture> {
    let (chart, ctx) = unit_box(n, 42)?;
    let rows: Vec<Vec<Expr>> =
        (0..n).map(|a| (0..n).map(|b| Expr::int((a == b) as i64)).collect()).collect();
    let metric = MetricChart::from_rows(&chart, &rows, ctx)?;
    let block: Vec<usize> = (0..p).collect();
    let projectors = ProjectorPair::from_coordinate_block(&metric, &block)?;
    Ok(Fixture {
        name: format!("flat-n{n}-p{p}"),
        metric,
        projectors,
        expected: Some(Class::Decomposable),
    })
}

/// Stationary axisymmetric line element in `(t, r, θ, φ)`,
/// `(Ψ² sin²θ − α²) dt² + 2Ψ² sin²θ dt dφ + B²(dr² + r² dθ²) + Φ² sin²θ dφ²`,
/// with the projector tangent to `t = const`. With `equal_potentials` the
/// function `Φ` is replaced by `Ψ`.
pub fn stationary_axisymmetric(equal_potentials: bool, seed: u64) -> Result<Fixture> {
    let spec = [
        ("t", (0.0, 1.0)),
        ("r", (0.5, 1.5)),
        ("theta", (0.5, 1.3)),
        ("phi", (0.0, 1.0)),
    ];
    let chart = Chart::new(&spec)?;
    let ctx = EvalContext::new(&spec).with_seed(seed);
    let rt = ["r", "theta"];
    let psi = Expr::opaque("Psi", &rt);
    let alpha = Expr::opaque("alpha", &rt);
    let b = Expr::opaque("B", &rt);
    let phi_fn = if equal_potentials { psi.clone() } else { Expr::opaque("Phi", &rt) };
    let r = chart.coord(1).clone();
    let s2 = chart.coord(2).sin().powi(2);
    let z = Expr::zero;
    let g_tphi = psi.powi(2) * &s2;
    let rows = vec![
        vec![&g_tphi - alpha.powi(2), z(), z(), g_tphi.clone()],
        vec![z(), b.powi(2), z(), z()],
        vec![z(), z(), r.powi(2) * b.powi(2), z()],
        vec![g_tphi, z(), z(), phi_fn.powi(2) * &s2],
    ];
    let metric = MetricChart::from_rows(&chart, &rows, ctx)?;
    let projectors = ProjectorPair::from_coordinate_block(&metric, &[1, 2, 3])?;
    Ok(Fixture {
        name: format!(
            "stationary-axisymmetric-{}",
            if equal_potentials { "equal" } else { "generic" }
        ),
        metric,
        projectors,
        expected: Some(if equal_potentials { Class::WarpedProduct } else { Class::NotSeparable }),
    })
}

fn coefficient(rng: &mut impl Rng, lo: f64, hi: f64) -> Rational {
    crate::expr::rat((rng.gen_range(lo..hi) * 64.0).round() as i64, 64)
}

/// Polynomial of total degree ≤ 2 with constant term `c0` and remaining
/// coefficients drawn from `[lo, hi)`.
pub fn random_quadratic(vars: &[&str], c0: Rational, lo: f64, hi: f64, rng: &mut impl Rng) -> Expr {
    let xs: Vec<Expr> = vars.iter().map(|v| Expr::coord(v)).collect();
    let mut terms = vec![Expr::num(c0)];
    for (i, x) in xs.iter().enumerate() {
        terms.push(x.scale(&coefficient(rng, lo, hi)));
        for y in &xs[i..] {
            terms.push((x * y).scale(&coefficient(rng, lo, hi)));
        }
    }
    Expr::sum(terms)
}

/// The most general 4-metric foliated by conformally flat slices `x4 = const`:
/// `Φ(Ξ₁ dx1² + Ξ₂ dx2² + Ξ₃ dx3²) + 2 β_i dx^i dx4 + Ψ dx4²`, with `Φ, β_i, Ψ`
/// random quadratics in all coordinates and `Ξ_i` random quadratics in `x1..x3`.
/// The functions stay opaque symbolically and are bound to the polynomials.
pub fn general_foliation(seed: u64) -> Result<Fixture> {
    let (chart, mut ctx) = unit_box(4, seed)?;
    let all = ["x1", "x2", "x3", "x4"];
    let slice = &all[..3];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bind = |ctx: &mut EvalContext, name: &str, args: &[&str], body: Expr| -> Result<Expr> {
        ctx.bind_function(name, Arc::new(ExprFunction::new(args, body)?));
        Ok(Expr::opaque(name, args))
    };
    let one = || crate::expr::rat(1, 1);
    let phi = bind(&mut ctx, "Phi", &all, random_quadratic(&all, one(), 0.0, 0.25, &mut rng))?;
    let psi = bind(&mut ctx, "Psi", &all, random_quadratic(&all, crate::expr::rat(3, 1), 0.0, 0.25, &mut rng))?;
    let mut xis = Vec::new();
    let mut betas = Vec::new();
    for i in 1..=3 {
        xis.push(bind(&mut ctx, &format!("Xi{i}"), slice, random_quadratic(slice, one(), 0.0, 0.25, &mut rng))?);
        let c0 = coefficient(&mut rng, -0.3, 0.3);
        betas.push(bind(&mut ctx, &format!("beta{i}"), &all, random_quadratic(&all, c0, -0.05, 0.05, &mut rng))?);
    }
    let rows: Vec<Vec<Expr>> = (0..4)
        .map(|a| {
            (0..4)
                .map(|b| match (a, b) {
                    (3, 3) => psi.clone(),
                    (3, i) | (i, 3) => betas[i].clone(),
                    (i, j) if i == j => &phi * &xis[i],
                    _ => Expr::zero(),
                })
                .collect()
        })
        .collect();
    let metric = MetricChart::from_rows(&chart, &rows, ctx)?;
    let projectors = ProjectorPair::from_coordinate_block(&metric, &[0, 1, 2])?;
    Ok(Fixture {
        name: format!("general-foliation-seed{seed}"),
        metric,
        projectors,
        expected: Some(Class::NotSeparable),
    })
}

/// Vector field with random quadratic polynomial components.
pub fn random_polynomial_field(chart: &Arc<Chart>, seed: u64) -> TensorField {
    let names: Vec<&str> = chart.names().iter().map(String::as_str).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    TensorField::from_fn(chart, &[Variance::Up], |_| {
        let c0 = coefficient(&mut rng, -1.0, 1.0);
        random_quadratic(&names, c0, -0.5, 0.5, &mut rng)
    })
}

/// At least one metric of every class plus the extra generator families and
/// the stationary example: the corpus the identity suite runs over.
pub fn corpus(seed: u64) -> Result<Vec<Fixture>> {
    let mut out = vec![flat(4, 2)?];
    for (k, class) in GeneratorClass::ALL.iter().enumerate() {
        out.push(generated(*class, seed.wrapping_add(k as u64))?);
    }
    out.push(stationary_axisymmetric(true, seed)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::eval;

    #[test]
    fn stationary_projector_matches_closed_form() {
        let f = stationary_axisymmetric(false, 7).unwrap();
        let pm = f.projectors.p_mixed();
        let ctx = f.metric.ctx();
        let rt = ["r", "theta"];
        let ratio = Expr::opaque("Psi", &rt).powi(2) / Expr::opaque("Phi", &rt).powi(2);
        let point = [0.3, 1.1, 0.9, 0.2];
        let got = eval(pm.get(&[3, 0]), ctx, &point).unwrap();
        let want = eval(&ratio, ctx, &point).unwrap();
        assert!((got - want).abs() < 1e-12 * want.abs().max(1.0));
        for i in 1..4 {
            assert!((eval(pm.get(&[i, i]), ctx, &point).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn foliation_projector_matches_closed_form() {
        let f = general_foliation(3).unwrap();
        let ctx = f.metric.ctx();
        let all = ["x1", "x2", "x3", "x4"];
        let phi = Expr::opaque("Phi", &all);
        let point = [0.7, 1.2, 0.9, 1.4];
        let mut p44 = 0.0;
        for i in 0..3 {
            let beta = Expr::opaque(&format!("beta{}", i + 1), &all);
            let xi = Expr::opaque(&format!("Xi{}", i + 1), &all[..3]);
            let mixed = &beta / (&phi * &xi);
            let got = eval(f.projectors.p_mixed().get(&[i, 3]), ctx, &point).unwrap();
            let want = eval(&mixed, ctx, &point).unwrap();
            assert!((got - want).abs() < 1e-12, "P^{i}_4: {got} vs {want}");
            p44 += eval(&(beta.powi(2) / (&phi * &xi)), ctx, &point).unwrap();
            let pii = eval(f.projectors.p().get(&[i, i]), ctx, &point).unwrap();
            assert!((pii - eval(&(&phi * &xi), ctx, &point).unwrap()).abs() < 1e-12);
        }
        let got = eval(f.projectors.p().get(&[3, 3]), ctx, &point).unwrap();
        assert!((got - p44).abs() < 1e-12);
    }

    #[test]
    fn generator_covers_every_separable_label_once() {
        let mut labels: Vec<Class> = GeneratorClass::SEPARABLE.iter().map(|c| c.expected()).collect();
        labels.sort_by_key(|c| c.name());
        labels.dedup();
        assert_eq!(labels.len(), 6);
        assert!(!labels.contains(&Class::NotSeparable));
    }
}
