mod common;

use biconformal::classify::{decide, dimension_bound, BoundResult, Class};
use biconformal::expr::{eval, is_zero, EvalContext, Expr, ZeroVerdict};
use biconformal::normalform::{closed_form_bound, count_constraints, NormalFormState};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const VARS: [&str; 3] = ["x1", "x2", "x3"];

fn context(seed: u64) -> EvalContext {
    EvalContext::new(&[("x1", (0.5, 1.5)), ("x2", (0.5, 1.5)), ("x3", (0.5, 1.5))]).with_seed(seed)
}

fn expr_from(seed: u64) -> Expr {
    common::random_expr(&mut ChaCha8Rng::seed_from_u64(seed), &VARS, 4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn derivatives_agree_with_central_differences(seed in any::<u64>()) {
        let e = expr_from(seed);
        let ctx = context(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        for _ in 0..20 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(0.6..1.4)).collect();
            let i = rng.gen_range(0..3);
            let sym = eval(&e.diff(VARS[i]), &ctx, &x).unwrap();
            let fd = common::central_difference(&e, &ctx, &x, i, 1e-5);
            prop_assert!((sym - fd).abs() <= 1e-6 * sym.abs().max(1.0), "{e}: {sym} vs {fd}");
        }
    }

    #[test]
    fn canonical_form_is_a_fixed_point(seed in any::<u64>()) {
        let e = expr_from(seed);
        prop_assert!(e.canon().same_tree(&e));
        prop_assert!(e.canon().canon().same_tree(&e.canon()));
    }

    #[test]
    fn zero_verdicts_are_sound(seed in any::<u64>()) {
        let e = expr_from(seed);
        let ctx = context(seed);
        prop_assert_eq!(is_zero(&(&e - &e), &ctx).unwrap(), ZeroVerdict::ProvablyZero);
        let one = Expr::one();
        let expanded = (&e + &one).powi(2) - e.powi(2) - Expr::int(2) * &e - one;
        prop_assert!(is_zero(&expanded, &ctx).unwrap().is_zero());
        let positive = e.powi(2) + Expr::rational(1, 10);
        match is_zero(&positive, &ctx).unwrap() {
            ZeroVerdict::NonZero(w) => prop_assert!(w.value.abs() > ctx.tolerance * (1.0 + w.scale)),
            other => prop_assert!(false, "{positive} judged {other:?}"),
        }
        if let ZeroVerdict::ProvablyZero = is_zero(&e, &ctx).unwrap() {
            let x = [1.0, 1.1, 0.9];
            prop_assert!(eval(&e, &ctx, &x).unwrap().abs() <= ctx.tolerance);
        }
    }

    #[test]
    fn labels_are_consistent_with_evidence(bits in 0u8..64) {
        let b = |k: u8| bits & (1 << k) != 0;
        let (sep, e, w, de, dw, du) = (b(0), b(1), b(2), b(3), b(4), b(5));
        let class = decide(sep, e, w, de, dw, du);
        prop_assert_eq!(class == Class::NotSeparable, !sep);
        match class {
            Class::Decomposable => prop_assert!(e && w),
            Class::WarpedProduct => prop_assert!(e && dw && !w),
            Class::DoubleWarped => prop_assert!(de && dw && !e),
            Class::TwistedProduct => prop_assert!(e && !dw),
            Class::ConformallyReducible => prop_assert!(du && !e && !(de && dw)),
            Class::GenericSeparable => prop_assert!(!e && !du && !(de && dw)),
            Class::NotSeparable => {}
        }
    }

    #[test]
    fn counting_exceeds_the_closed_form_by_n_plus_two(n in 2usize..=12, k in 0usize..11) {
        let p = 1 + k % (n - 1);
        let c = count_constraints(n, p).unwrap();
        prop_assert_eq!(c.variables, c.constraints + c.free);
        prop_assert_eq!(c.free, closed_form_bound(n, p) + n + 2);
        let finite = matches!(dimension_bound(n, p).unwrap(), BoundResult::Finite(_));
        prop_assert_eq!(finite, p >= 3 && p + 3 <= n);
    }

    #[test]
    fn state_vectors_round_trip(n in 2usize..7, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v: Vec<f64> = (0..NormalFormState::len_for(n)).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let s = NormalFormState::from_vec(n, &v);
        prop_assert_eq!(s.to_vec(), v.clone());
        let z = NormalFormState::combine(2.0, &s, -2.0, &s);
        prop_assert_eq!(z.max_abs(), 0.0);
        prop_assert_eq!(NormalFormState::column_names(n).len(), v.len());
    }
}
