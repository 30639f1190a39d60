mod common;

use biconformal::biconformal::{verify_identities, BiconformalData};
use biconformal::expr::zero_test;
use biconformal::fixtures::{generated, random_polynomial_field, GeneratorClass};

#[test]
fn separable_metric_matches_closed_forms() {
    for seed in [1, 2] {
        let a = common::two_by_two_separable(seed);
        let f = &a.fixture;
        let d = BiconformalData::new(&f.metric, &f.projectors).unwrap();
        for (name, res) in common::separable_residuals(&a, &d) {
            let v = zero_test(&res, f.metric.ctx()).unwrap();
            assert!(v.is_zero(), "seed {seed}, {name}: {v:?}");
        }
        // the closed forms are not vacuous
        assert!(!f.metric.zero_test(d.e()).unwrap().is_zero());
        assert!(!f.metric.zero_test(d.m_tensor()).unwrap().is_zero());
    }
}

#[test]
fn swapping_the_projectors_swaps_the_trace_forms() {
    let f = generated(GeneratorClass::DoubleWarped, 4).unwrap();
    let d = BiconformalData::new(&f.metric, &f.projectors).unwrap();
    let s = BiconformalData::new(&f.metric, &f.projectors.swapped()).unwrap();
    let m = &f.metric;
    assert!(m.zero_test(&d.e().sub(s.w()).unwrap()).unwrap().is_zero());
    assert!(m.zero_test(&d.w().sub(s.e()).unwrap()).unwrap().is_zero());
    assert!(m.zero_test(&d.m_tensor().add(s.m_tensor()).unwrap()).unwrap().is_zero());
    assert!(m.zero_test(&d.u().sub(s.u()).unwrap()).unwrap().is_zero());
    assert!(m.zero_test(&d.l().sub(s.l()).unwrap()).unwrap().is_zero());
}

#[test]
fn identity_battery_on_a_non_separable_metric() {
    let f = generated(GeneratorClass::NotSeparable, 6).unwrap();
    let d = BiconformalData::new(&f.metric, &f.projectors).unwrap();
    let xi = random_polynomial_field(f.metric.chart(), 6);
    let report = verify_identities(&d, &xi).unwrap();
    assert!(report.all_pass(), "{:?}", report.failures().collect::<Vec<_>>());
}
