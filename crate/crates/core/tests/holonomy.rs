mod common;

use std::f64::consts::PI;

use areahol_core::gamma::{gamma_mul, random_element, GammaRElement};
use areahol_core::rep::{evaluate, irreducible, validate_rep, ym_action_value};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn genus_two_rep_is_valid_and_irreducible() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let rep = common::genus_two_rep(&mut rng);
        let diag = validate_rep(&rep).unwrap();
        assert!(diag.ok, "{diag:?}");
        assert!(irreducible(&rep).unwrap());
        assert!((ym_action_value(&rep).unwrap() - 2.0 * PI * PI).abs() < 1e-9);
    }
}

#[test]
fn genus_two_evaluation_is_a_homomorphism() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let rep = common::genus_two_rep(&mut rng);
    for _ in 0..200 {
        let x = random_element(&mut rng, 2, 12);
        let y = random_element(&mut rng, 2, 12);
        let lhs = evaluate(&rep, &gamma_mul(&x, &y).unwrap()).unwrap();
        let rhs = &evaluate(&rep, &x).unwrap() * &evaluate(&rep, &y).unwrap();
        assert!(lhs.distance(&rhs) < 1e-9);
    }
    let relator = GammaRElement::parse(2, "a1 b1 a1^-1 b1^-1 a2 b2 a2^-1 b2^-1", 0.0).unwrap();
    let j = GammaRElement::central(2, 1.0);
    assert!(
        evaluate(&rep, &relator)
            .unwrap()
            .distance(&evaluate(&rep, &j).unwrap())
            < 1e-9
    );
}

#[test]
fn reducible_sums_are_detected() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let x = common::genus_two_rep(&mut rng);
    let y = common::genus_two_rep(&mut rng);
    let sum = x.direct_sum(&y).unwrap();
    assert!(validate_rep(&sum).unwrap().ok);
    assert!(!irreducible(&sum).unwrap());
    assert!((ym_action_value(&sum).unwrap() - 4.0 * PI * PI).abs() < 1e-9);
}
