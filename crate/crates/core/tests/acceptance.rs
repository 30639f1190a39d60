//! Acceptance gate. Every criterion runs to completion and prints one
//! PASS/FAIL line; the test fails at the end if any criterion failed.

mod common;

use std::collections::HashSet;
use std::time::{Duration, Instant};

use biconformal::biconformal::{verify_identities, BiconformalData};
use biconformal::classify::{classify, dimension_bound, foliation_condition, BoundResult, Class};
use biconformal::expr::{eval, zero_test};
use biconformal::fixtures::{
    adapted, corpus, flat, general_foliation, generated, random_polynomial_field, stationary_axisymmetric,
    GeneratorClass,
};
use biconformal::normalform::{
    constraint_matrix, count_constraints, matrix_rank, Curve, NormalFormState, NormalSystem,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn run(id: u32, title: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let mut o = f();
    let took = start.elapsed();
    if let Some(limit) = limit {
        if took > limit {
            o.pass = false;
            o.detail.push_str(&format!("; over the {}s budget", limit.as_secs()));
        }
    }
    let verdict = if o.pass { "PASS" } else { "FAIL" };
    println!("criterion {id} [{title}]: {verdict} ({:.2}s) {}", took.as_secs_f64(), o.detail);
    o.pass
}

fn data(f: &biconformal::fixtures::Fixture) -> BiconformalData {
    BiconformalData::new(&f.metric, &f.projectors).unwrap()
}

fn separable_closed_forms() -> Outcome {
    let a = common::two_by_two_separable(1);
    let f = &a.fixture;
    let d = data(f);
    let ctx = f.metric.ctx().clone().with_tolerance(1e-9).with_samples(32);
    let mut failed = Vec::new();
    let mut verdicts = Vec::new();
    for (name, res) in common::separable_residuals(&a, &d) {
        let v = zero_test(&res, &ctx).unwrap();
        verdicts.push(format!("{name}={}", v.label()));
        if !v.is_zero() {
            failed.push(name);
        }
    }
    outcome(failed.is_empty(), verdicts.join(" "))
}

fn stationary_example() -> Outcome {
    let generic = data(&stationary_axisymmetric(false, 42).unwrap());
    let t_generic = generic.metric().zero_test(generic.t()).unwrap();
    let equal = data(&stationary_axisymmetric(true, 42).unwrap());
    let r = classify(&equal).unwrap();
    let pass = !t_generic.is_zero()
        && r.separable.is_zero()
        && r.evidence.e_zero.is_zero()
        && r.evidence.dw_zero.is_zero()
        && r.class == Class::WarpedProduct;
    outcome(
        pass,
        format!(
            "generic T={}; equal potentials T={} E={} dW={} class={}",
            t_generic.label(),
            r.separable.label(),
            r.evidence.e_zero.label(),
            r.evidence.dw_zero.label(),
            r.class
        ),
    )
}

fn conformal_foliation() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for seed in [1, 2, 3] {
        let d = data(&general_foliation(seed).unwrap());
        let t = d.metric().zero_test(d.t()).unwrap();
        let leaf = foliation_condition(&d).unwrap();
        pass &= !t.is_zero() && leaf.is_zero();
        parts.push(format!("seed {seed}: T={} PPPT={}", t.label(), leaf.label()));
    }
    outcome(pass, parts.join("; "))
}

fn identity_suite() -> Outcome {
    let fixtures = corpus(2024).unwrap();
    let covered: HashSet<_> = fixtures.iter().filter_map(|f| f.expected).map(|c| c.name()).collect();
    let all_covered = Class::ALL.iter().all(|c| covered.contains(c.name()));
    let mut failures = Vec::new();
    let mut checks = 0;
    for (k, f) in fixtures.iter().enumerate() {
        let d = data(f);
        let xi = random_polynomial_field(f.metric.chart(), 100 + k as u64);
        let report = verify_identities(&d, &xi).unwrap();
        checks += report.checks.len();
        failures.extend(report.failures().map(|c| format!("{}:{}", f.name, c.name)));
    }
    let pass = fixtures.len() >= 8 && all_covered && failures.is_empty();
    outcome(
        pass,
        format!(
            "{} metrics, {} classes covered, {checks} checks, failures {:?}",
            fixtures.len(),
            covered.len(),
            failures
        ),
    )
}

fn classification_matrix() -> Outcome {
    let mut hits = 0;
    let mut misses = Vec::new();
    for class in GeneratorClass::SEPARABLE {
        for seed in [11, 12, 13] {
            let f = generated(class, seed).unwrap();
            let got = classify(&data(&f)).unwrap().class;
            if Some(got) == f.expected {
                hits += 1;
            } else {
                misses.push(format!("{} -> {got}", f.name));
            }
        }
    }
    outcome(misses.is_empty() && hits == 18, format!("{hits}/18 {misses:?}"))
}

fn dimension_arithmetic() -> Outcome {
    let closed = |n: usize, p: usize| p * (p + 1) / 2 + (n - p) * (n - p + 1) / 2;
    let mut count_mismatch = Vec::new();
    let mut flag_mismatch = Vec::new();
    for n in 2..=12 {
        for p in 1..n {
            let c = count_constraints(n, p).unwrap();
            if c.free != closed(n, p) {
                count_mismatch.push((n, p, c.free, closed(n, p)));
            }
            let flagged = dimension_bound(n, p).unwrap() == BoundResult::PossiblyInfinite;
            let expected = p <= 2 || p + 2 >= n;
            if flagged != expected {
                flag_mismatch.push((n, p));
            }
        }
    }
    let mut rank_mismatch = Vec::new();
    for n in 2..=5 {
        for p in 1..n {
            let r = matrix_rank(&constraint_matrix(n, p), 1e-12);
            if r != p * (p + 1) / 2 + p * (n - p) {
                rank_mismatch.push((n, p, r));
            }
        }
    }
    let pass = count_mismatch.is_empty() && flag_mismatch.is_empty() && rank_mismatch.is_empty();
    let sample = count_mismatch.iter().take(3).map(|(n, p, got, want)| {
        format!("n={n} p={p}: variables-constraints={got}, closed form={want}")
    });
    outcome(
        pass,
        format!(
            "count mismatches {}/66 [{}]; bound flags wrong {}; rank mismatches {}",
            count_mismatch.len(),
            sample.collect::<Vec<_>>().join(", "),
            flag_mismatch.len(),
            rank_mismatch.len()
        ),
    )
}

fn transport() -> Outcome {
    let start = vec![0.7, 0.8, 0.9, 1.0, 1.1, 1.2];
    let end = vec![1.2, 1.1, 0.9, 0.8, 0.7, 1.3];
    let curved = adapted(&GeneratorClass::BiconformallyFlat.spec(6, 3), 5).unwrap().fixture;
    let sys = NormalSystem::new(&data(&curved)).unwrap();
    let curve = Curve::polyline(vec![start.clone(), end.clone()], 0.05);

    let zero = sys.transport(&NormalFormState::zeros(6), &curve).unwrap();
    let zero_max = zero.samples.iter().map(|s| s.state.max_abs()).fold(0.0, f64::max);

    let flat_sys = NormalSystem::new(&data(&flat(6, 3).unwrap())).unwrap();
    let mut killing = NormalFormState::zeros(6);
    killing.xi = vec![0.3, -0.2, 0.5, 0.1, 0.4, -0.6];
    let a = vec![1.0; 6];
    let b: Vec<f64> = [1.0, -1.0, 1.0, 1.0, -1.0, -1.0].iter().map(|d| 1.0 + d / 6f64.sqrt()).collect();
    let unit = Curve::polyline(vec![a, b], 1e-3);
    let (ri, rii) = flat_sys.transport(&killing, &unit).unwrap().max_residuals();

    let len = NormalFormState::len_for(6);
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst = 0.0f64;
    for _ in 0..3 {
        let mut draw = || NormalFormState::from_vec(6, &(0..len).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>());
        let (u, v) = (draw(), draw());
        let (ca, cb) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let go = |s: &NormalFormState| sys.transport(s, &curve).unwrap().last().state.clone();
        let lhs = go(&NormalFormState::combine(ca, &u, cb, &v));
        let rhs = NormalFormState::combine(ca, &go(&u), cb, &go(&v));
        let diff = NormalFormState::combine(1.0, &lhs, -1.0, &rhs).max_abs();
        worst = worst.max(diff / lhs.max_abs().max(1e-300));
    }
    let pass = zero_max < 1e-13 && (unit.length_parameter() - 1.0).abs() < 1e-12 && ri < 1e-10 && rii < 1e-10 && worst <= 1e-8;
    outcome(
        pass,
        format!(
            "zero state max {zero_max:e}; translation residuals {ri:e}/{rii:e} over length {}; linearity rel {worst:e}",
            unit.length_parameter()
        ),
    )
}

fn gradient_oracle() -> Outcome {
    let vars = ["x1", "x2", "x3"];
    let ctx = biconformal::expr::EvalContext::new(&[("x1", (0.5, 1.5)), ("x2", (0.5, 1.5)), ("x3", (0.5, 1.5))]);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    let mut bad = 0;
    for _ in 0..100 {
        let e = common::random_expr(&mut rng, &vars, 4);
        let x: Vec<f64> = (0..3).map(|_| rng.gen_range(0.6..1.4)).collect();
        let i = rng.gen_range(0..3);
        let sym = eval(&e.diff(vars[i]), &ctx, &x).unwrap();
        let fd = common::central_difference(&e, &ctx, &x, i, 1e-5);
        let rel = (sym - fd).abs() / sym.abs().max(1.0);
        worst = worst.max(rel);
        if rel > 1e-6 {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("100 pairs, worst relative error {worst:e}"))
}

#[test]
fn acceptance() {
    let results = [
        run(1, "closed forms for a separable metric", Some(Duration::from_secs(30)), separable_closed_forms),
        run(2, "stationary axisymmetric metric", Some(Duration::from_secs(60)), stationary_example),
        run(3, "conformal foliation", Some(Duration::from_secs(120)), conformal_foliation),
        run(4, "identity suite", None, identity_suite),
        run(5, "classification matrix", None, classification_matrix),
        run(6, "dimension arithmetic", None, dimension_arithmetic),
        run(7, "transport", None, transport),
        run(8, "gradient oracle", None, gradient_oracle),
    ];
    let failed: Vec<usize> = (0..results.len()).filter(|k| !results[*k]).map(|k| k + 1).collect();
    println!("acceptance: {}/{} criteria pass", results.len() - failed.len(), results.len());
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
