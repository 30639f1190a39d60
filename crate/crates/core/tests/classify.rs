use biconformal::biconformal::BiconformalData;
use biconformal::classify::{
    classify, foliation_condition, gradient_from_u_residual, parallel_projector_residuals, BoundResult,
    Class,
};
use biconformal::fixtures::{corpus, general_foliation, generated, stationary_axisymmetric, GeneratorClass};

fn data(f: &biconformal::fixtures::Fixture) -> BiconformalData {
    BiconformalData::new(&f.metric, &f.projectors).unwrap()
}

#[test]
fn stationary_metric_is_warped_only_for_equal_potentials() {
    let generic = stationary_axisymmetric(false, 1).unwrap();
    let r = classify(&data(&generic)).unwrap();
    assert_eq!(r.class, Class::NotSeparable);
    assert!(r.separable.witness().is_some());

    let equal = stationary_axisymmetric(true, 1).unwrap();
    let r = classify(&data(&equal)).unwrap();
    assert_eq!(r.class, Class::WarpedProduct);
    assert!(r.evidence.e_zero.is_zero());
    assert!(r.evidence.dw_zero.is_zero());
    assert!(!r.evidence.w_zero.is_zero());
    assert_eq!((r.n, r.p), (4, 3));
    assert_eq!(r.bound, BoundResult::PossiblyInfinite);
}

#[test]
fn separability_is_parallel_transport_of_the_projectors() {
    for f in corpus(9).unwrap() {
        let d = data(&f);
        let m = d.metric();
        let separable = m.zero_test(d.t()).unwrap().is_zero();
        let (rp, rpi) = parallel_projector_residuals(&d);
        let parallel = m.zero_test(&rp).unwrap().is_zero() && m.zero_test(&rpi).unwrap().is_zero();
        assert_eq!(separable, parallel, "{}", f.name);
        if separable {
            assert!(m.zero_test(&gradient_from_u_residual(&d)).unwrap().is_zero(), "{}", f.name);
        }
    }
}

#[test]
fn swapping_projectors_swaps_the_evidence() {
    for class in GeneratorClass::ALL {
        let f = generated(class, 13).unwrap();
        let r = classify(&data(&f)).unwrap();
        let s = classify(&BiconformalData::new(&f.metric, &f.projectors.swapped()).unwrap()).unwrap();
        assert_eq!(r.separable.is_zero(), s.separable.is_zero(), "{}", f.name);
        assert_eq!(r.evidence.e_zero.is_zero(), s.evidence.w_zero.is_zero(), "{}", f.name);
        assert_eq!(r.evidence.de_zero.is_zero(), s.evidence.dw_zero.is_zero(), "{}", f.name);
        assert_eq!(r.evidence.du_zero.is_zero(), s.evidence.du_zero.is_zero(), "{}", f.name);
    }
}

#[test]
fn conformal_leaves_without_separability() {
    let f = general_foliation(21).unwrap();
    let d = data(&f);
    assert!(!d.metric().zero_test(d.t()).unwrap().is_zero());
    assert!(foliation_condition(&d).unwrap().is_zero());
    assert_eq!(classify(&d).unwrap().class, Class::NotSeparable);
}
