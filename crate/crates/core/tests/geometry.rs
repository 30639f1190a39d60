use std::sync::Arc;

use biconformal::expr::{rat, Expr};
use biconformal::fixtures::{random_polynomial_field, random_quadratic, unit_box};
use biconformal::geometry::{
    covariant_derivative, lie_derivative, lie_derivative_partial, Chart, Connection, MetricChart, TensorField,
    Variance,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use Variance::{Down, Up};

const NAMES: [&str; 3] = ["x1", "x2", "x3"];

/// Dominant diagonal of quadratics plus small off-diagonal quadratics,
/// positive definite on the unit box. `skip` drops one coordinate from
/// every component.
fn random_metric(seed: u64, skip: Option<usize>) -> MetricChart {
    let (chart, ctx) = unit_box(3, seed).unwrap();
    let vars: Vec<&str> = (0..3).filter(|i| Some(*i) != skip).map(|i| NAMES[i]).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = vec![vec![Expr::zero(); 3]; 3];
    for a in 0..3 {
        rows[a][a] = random_quadratic(&vars, rat(2, 1), 0.0, 0.3, &mut rng);
        for b in a + 1..3 {
            let off = random_quadratic(&vars, rat(0, 1), -0.1, 0.1, &mut rng);
            rows[a][b] = off.clone();
            rows[b][a] = off;
        }
    }
    MetricChart::from_rows(&chart, &rows, ctx).unwrap()
}

fn random_two_tensor(chart: &Arc<Chart>, seed: u64) -> TensorField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    TensorField::from_fn(chart, &[Down, Down], |_| random_quadratic(&NAMES, rat(1, 2), -1.0, 1.0, &mut rng))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn levi_civita_is_metric(seed in 0u64..1_000_000) {
        let m = random_metric(seed, None);
        let dg = covariant_derivative(m.christoffel(), m.g());
        prop_assert!(m.zero_test(&dg).unwrap().is_zero());
    }

    #[test]
    fn curvature_symmetries(seed in 0u64..1_000_000) {
        let m = random_metric(seed, None);
        let r = m.riemann();
        let chart = m.chart();
        let cyclic = TensorField::from_fn(chart, &[Up, Down, Down, Down], |i| {
            let (a, b, c, d) = (i[0], i[1], i[2], i[3]);
            r.get(&[a, b, c, d]) + r.get(&[a, c, d, b]) + r.get(&[a, d, b, c])
        });
        prop_assert!(m.zero_test(&cyclic).unwrap().is_zero());
        let anti = TensorField::from_fn(chart, &[Up, Down, Down, Down], |i| {
            r.get(&[i[0], i[1], i[2], i[3]]) + r.get(&[i[0], i[1], i[3], i[2]])
        });
        prop_assert!(m.zero_test(&anti).unwrap().is_zero());
    }

    #[test]
    fn lie_derivative_ignores_the_symmetric_connection(seed in 0u64..1_000_000) {
        let m = random_metric(seed, None);
        let chart = m.chart();
        let xi = random_polynomial_field(chart, seed + 1);
        let t = random_two_tensor(chart, seed + 2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 3);
        let comps: Vec<Expr> = (0..27)
            .map(|k| {
                let (b, c) = ((k / 3) % 3, k % 3);
                if b <= c { random_quadratic(&NAMES, rat(0, 1), -1.0, 1.0, &mut rng) } else { Expr::zero() }
            })
            .collect();
        let shift = TensorField::from_fn(chart, &[Up, Down, Down], |i| {
            let (b, c) = (i[1].min(i[2]), i[1].max(i[2]));
            comps[i[0] * 9 + b * 3 + c].clone()
        });
        let other = m.christoffel().shifted(&shift).unwrap();
        let oracle = lie_derivative_partial(&xi, &t).unwrap();
        for conn in [m.christoffel(), &other, &Connection::flat(chart)] {
            let got = lie_derivative(&xi, &t, conn).unwrap();
            prop_assert!(m.zero_test(&got.sub(&oracle).unwrap()).unwrap().is_zero());
        }
    }

    #[test]
    fn coordinate_translation_is_killing(seed in 0u64..1_000_000, k in 0usize..3) {
        let m = random_metric(seed, Some(k));
        let xi = TensorField::from_fn(m.chart(), &[Up], |i| Expr::int((i[0] == k) as i64));
        let lie = lie_derivative(&xi, m.g(), m.christoffel()).unwrap();
        prop_assert!(m.zero_test(&lie).unwrap().is_zero());
        let f = m.g().get(&[0, 0]).clone();
        let scalar = TensorField::scalar(m.chart(), f.clone());
        let along = lie_derivative_partial(&xi, &scalar).unwrap();
        prop_assert!(along.value().same_tree(&m.chart().diff(&f, k)));
    }
}
