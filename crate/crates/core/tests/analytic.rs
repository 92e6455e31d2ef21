use rug::ops::Pow;
use rug::Float;
use symval_core::analytic::{dirichlet_spec, evaluate, resolve_root_number, zeta_spec, RootNumber};
use symval_core::characters::parse_character;
use symval_core::numeric::{pi, Cx};

const PREC: u32 = 128;

fn rel(a: &Cx, b: &Cx) -> f64 {
    Float::with_val(PREC, (a - b).abs() / b.abs()).to_f64()
}

fn real(x: Float) -> Cx {
    Cx::real(x)
}

#[test]
fn zeta_at_even_and_negative_integers() {
    let z = zeta_spec();
    let p = pi(PREC);
    let v = evaluate(&z, &Cx::from_f64(PREC, 2.0, 0.0), PREC).unwrap();
    assert!(rel(&v.value, &real(Float::with_val(PREC, p.clone().square() / 6))) < 1e-35);
    let v = evaluate(&z, &Cx::from_f64(PREC, 4.0, 0.0), PREC).unwrap();
    assert!(rel(&v.value, &real(Float::with_val(PREC, p.clone().pow(4u32) / 90))) < 1e-35);
    // reached only through the functional equation
    let v = evaluate(&z, &Cx::from_f64(PREC, -1.0, 0.0), PREC).unwrap();
    assert!(rel(&v.value, &real(Float::with_val(PREC, -1) / 12)) < 1e-35);
    let v = evaluate(&z, &Cx::from_f64(PREC, -3.0, 0.0), PREC).unwrap();
    assert!(rel(&v.value, &real(Float::with_val(PREC, 1) / 120)) < 1e-35);
}

#[test]
fn first_zeta_zero() {
    // ordinate of the first nontrivial zero, to 30 digits
    let t: Float = Float::with_val(PREC, Float::parse("14.1347251417346937904572519835").unwrap());
    let s = Cx::new(Float::with_val(PREC, 0.5), t);
    let v = evaluate(&zeta_spec(), &s, PREC).unwrap();
    assert!(v.value.abs() < 1e-28);
}

#[test]
fn leibniz_and_its_cubic_analogue() {
    let chi = parse_character("4:[1]").unwrap();
    let spec = resolve_root_number(&dirichlet_spec(&chi).unwrap(), &[], PREC).unwrap();
    assert_eq!(spec.root_number, RootNumber::Sign(1));
    let p = pi(PREC);
    let v = evaluate(&spec, &Cx::from_f64(PREC, 1.0, 0.0), PREC).unwrap();
    assert!(rel(&v.value, &real(Float::with_val(PREC, &p / 4))) < 1e-35);
    let v = evaluate(&spec, &Cx::from_f64(PREC, 3.0, 0.0), PREC).unwrap();
    assert!(rel(&v.value, &real(Float::with_val(PREC, p.pow(3u32) / 32))) < 1e-35);
}

#[test]
fn quadratic_character_mod_5_at_one() {
    // L(1, (5/.)) = 2 log(golden ratio) / sqrt 5
    let chi = parse_character("5:[2]").unwrap();
    let spec = resolve_root_number(&dirichlet_spec(&chi).unwrap(), &[], PREC).unwrap();
    let v = evaluate(&spec, &Cx::from_f64(PREC, 1.0, 0.0), PREC).unwrap();
    let sqrt5 = Float::with_val(PREC, 5).sqrt();
    let phi = Float::with_val(PREC, (Float::with_val(PREC, 1) + &sqrt5) / 2);
    let want = Float::with_val(PREC, phi.ln() * 2u32 / &sqrt5);
    assert!(rel(&v.value, &real(want)) < 1e-35);
}
