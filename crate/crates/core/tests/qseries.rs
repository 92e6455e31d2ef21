use proptest::prelude::*;
use rug::Rational;
use symval_core::qseries::{builtin_form, hecke_validate, load_newform, newform_to_json};

const LEN: usize = 400;

/// Coefficients of q prod (1 - q^n)^24, multiplying one factor at a time.
fn delta_schoolbook(len: usize) -> Vec<i128> {
    let mut s = vec![0i128; len + 1];
    s[1] = 1;
    for j in 1..=len {
        for _ in 0..24 {
            for i in (j..=len).rev() {
                s[i] -= s[i - j];
            }
        }
    }
    s
}

fn sigma(n: usize, k: u32) -> i128 {
    (1..=n).filter(|d| n % d == 0).map(|d| (d as i128).pow(k)).sum()
}

/// 1 + c sum sigma_{k-1}(n) q^n
fn eisenstein(len: usize, k: u32, c: i128) -> Vec<i128> {
    (0..=len).map(|n| if n == 0 { 1 } else { c * sigma(n, k - 1) }).collect()
}

fn times(a: &[i128], b: &[i128]) -> Vec<i128> {
    let mut out = vec![0i128; a.len()];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate().take(a.len() - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn check(name: &str, oracle: &[i128]) {
    let f = builtin_form(name, LEN).unwrap();
    for n in 1..=LEN {
        assert_eq!(*f.a(n).unwrap(), Rational::from(oracle[n]), "{name} a({n})");
    }
    assert!(hecke_validate(&f).passed(), "{name}");
}

#[test]
fn delta_matches_schoolbook_product() {
    check("delta", &delta_schoolbook(LEN));
}

#[test]
fn products_with_eisenstein_series() {
    let delta = delta_schoolbook(LEN);
    check("e4delta", &times(&delta, &eisenstein(LEN, 4, 240)));
    check("e6delta", &times(&delta, &eisenstein(LEN, 6, -504)));
}

#[test]
fn json_round_trip() {
    let f = builtin_form("e4delta", 50).unwrap();
    let back = load_newform(newform_to_json(&f).as_bytes()).unwrap();
    assert_eq!(back.coefficients(), f.coefficients());
    assert_eq!(back.weight(), 16);
}

proptest! {
    #[test]
    fn corrupted_coefficient_is_caught(n in 2usize..=100, delta_value in 1i64..1000) {
        let mut f = builtin_form("delta", 200).unwrap();
        let old = f.a(n).unwrap().clone();
        f.set_coefficient(n, old + Rational::from(delta_value)).unwrap();
        prop_assert!(!hecke_validate(&f).passed());
    }
}
