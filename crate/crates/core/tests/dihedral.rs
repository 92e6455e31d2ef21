use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use symval_core::dihedral::{
    cm_newform, gaussian_cm_example, parse_conductor, verify_decomposition, HeckeCharacter, ImagQuadField, QuadInt,
    CLASS_NUMBER_ONE,
};
use symval_core::qseries::hecke_validate;

/// q prod (1 - q^{4n})^2 (1 - q^{8n})^2, the weight-2 newform of level 32.
fn eta_quotient_32(len: usize) -> Vec<i64> {
    let mut s = vec![0i64; len + 1];
    s[1] = 1;
    for (step, times) in [(4usize, 2), (8, 2)] {
        for _ in 0..times {
            let mut j = step;
            while j <= len {
                for i in (j..=len).rev() {
                    s[i] -= s[i - j];
                }
                j += step;
            }
        }
    }
    s
}

#[test]
fn gaussian_example_is_the_level_32_eta_quotient() {
    let phi = cm_newform(&gaussian_cm_example().unwrap(), 300).unwrap();
    assert_eq!(phi.form.level(), 32);
    assert_eq!(phi.form.weight(), 2);
    let oracle = eta_quotient_32(300);
    for n in 1..=300 {
        assert_eq!(*phi.form.a(n).unwrap(), Rational::from(oracle[n]), "a({n})");
    }
}

fn conductor_candidates(field: &ImagQuadField) -> Vec<QuadInt> {
    let mut out: Vec<QuadInt> = (1..=12).map(|n| QuadInt::new(n, 0)).collect();
    let gen = match field.discriminant() {
        -4 => Some("1+i"),
        -3 => Some("sqrt-3"),
        _ => None,
    };
    if let Some(g) = gen {
        for e in 1..=5 {
            out.push(parse_conductor(field, &format!("({g})^{e}")).unwrap());
        }
    }
    out
}

fn supported() -> Vec<HeckeCharacter> {
    let mut out = Vec::new();
    for d in CLASS_NUMBER_ONE {
        let field = ImagQuadField::new(d).unwrap();
        for u in 1..=4 {
            for f in conductor_candidates(&field) {
                if let Ok(chi) = HeckeCharacter::new(d, u, f) {
                    if chi.level() <= 2000 {
                        out.push(chi);
                    }
                }
            }
        }
    }
    out
}

#[test]
fn theta_series_satisfy_hecke_relations() {
    let all = supported();
    assert!(all.len() >= 20, "only {} configurations", all.len());
    for chi in &all {
        let phi = cm_newform(chi, 500).unwrap_or_else(|e| panic!("{chi}: {e}"));
        let rep = hecke_validate(&phi.form);
        assert!(rep.passed(), "{chi}: {} violations", rep.violations.len());
        assert_eq!(phi.form.weight(), chi.u() + 1);
        assert_eq!(phi.form.level(), chi.field().discriminant().unsigned_abs() * chi.field().norm(chi.conductor()).to_u64().unwrap());
    }
}

#[test]
fn nebentypus_matches_character_on_rational_ideals() {
    const PREC: u32 = 96;
    for chi in supported().iter().filter(|c| c.level() <= 600) {
        let omega = chi.nebentypus().unwrap();
        let field = chi.field();
        for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
            if chi.level() % p == 0 {
                continue;
            }
            let v = chi.value(&QuadInt::new(p, 0)).unwrap().expect("prime to f");
            let mut lhs = field.to_complex(&v, PREC);
            let pu = Float::with_val(PREC, Integer::from(p).pow(chi.u()));
            lhs = lhs.scale(&Float::with_val(PREC, pu.recip()));
            let rhs = omega.value_complex(p as i64, PREC).scale(&Float::with_val(PREC, field.omega_k(p as i64)));
            let err = Float::with_val(PREC, (&lhs - &rhs).abs());
            assert!(err < 1e-25, "{chi} at p={p}");
        }
    }
}

#[test]
fn decomposition_holds_for_every_supported_character() {
    for chi in supported().iter().filter(|c| c.level() <= 300) {
        let phi = cm_newform(chi, 200).unwrap();
        for n in 1..=6 {
            let rep = verify_decomposition(&phi, n, 200).unwrap_or_else(|e| panic!("{chi} n={n}: {e}"));
            assert!(rep.passed(), "{chi} n={n}: failures at {:?}", rep.failures());
            assert!(rep.checked.len() > 30);
        }
    }
}
