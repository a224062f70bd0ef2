use mksys_core::laws::{run_all, run_suite, suites};

#[test]
fn every_suite_passes_at_the_default_seed() {
    for r in run_all(0).unwrap() {
        assert!(r.passed(), "{}: {:?}", r.name, r.first_failure);
    }
}

#[test]
fn runs_are_reproducible_and_seed_dependent() {
    let a = run_suite("conditional-product", 7).unwrap();
    let b = run_suite("conditional-product", 7).unwrap();
    let c = run_suite("conditional-product", 8).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.digest, c.digest);
}

#[test]
fn unknown_suites_are_reported() {
    assert!(run_suite("no-such-suite", 0).is_err());
    assert_eq!(suites().len(), 16);
}
