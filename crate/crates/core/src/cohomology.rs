//! Closed-form integer bookkeeping for cohomological representations of
//! GL(n): the cuspidal range, admissible pairs (w, l), the coefficient
//! weight attached to a twisted symmetric power, and the Rankin-product
//! criterion.

use std::fmt;

use rug::Rational;
use serde::Serialize;

/// (b_n, t_n) with b_n <= q <= t_n the cuspidal range.
pub fn cuspidal_range(n: u32) -> (u32, u32) {
    assert!(n >= 2, "cuspidal range needs n >= 2");
    if n % 2 == 0 {
        (n * n / 4, ((n + 1) * (n + 1) - 1) / 4 - 1)
    } else {
        ((n * n - 1) / 4, (n + 1) * (n + 1) / 4 - 1)
    }
}

/// Whether (w, l) lies in the admissible set for GL(m), m = l.len():
/// l_1 > ... > l_{[m/2]} > 0, l_i = -l_{m-i+1}, and w + l_i odd for
/// even m, even for odd m.
pub fn jwl_admissible(w: i64, l: &[i64]) -> bool {
    let m = l.len();
    if m < 2 {
        return false;
    }
    let half = m / 2;
    if l[..half].windows(2).any(|p| p[0] <= p[1]) || l[half - 1] <= 0 {
        return false;
    }
    if (0..m).any(|i| l[i] != -l[m - 1 - i]) {
        return false;
    }
    let want = if m % 2 == 0 { 1 } else { 0 };
    l.iter().all(|&li| (w + li).rem_euclid(2) == want)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DominantWeight {
    /// mu_1 >= ... >= mu_{n+1}
    #[serde(serialize_with = "ser_rationals")]
    pub entries: Vec<Rational>,
    /// mu_i + mu_{n+2-i}
    #[serde(serialize_with = "ser_rational")]
    pub weight: Rational,
}

fn ser_rationals<S: serde::Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|q| q.to_string()))
}

fn ser_rational<S: serde::Serializer>(v: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClozelRejection {
    pub clause: &'static str,
    pub reason: String,
}

impl fmt::Display for ClozelRejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.clause, self.reason)
    }
}

/// mu = (k-2) rho_{n+1} + s for Sym^n twisted by xi |.|^s with
/// xi_inf = sgn^eps, after checking the parity conditions on (s, eps).
pub fn clozel_weight(n: u32, k: u32, s: &Rational, eps: u8) -> Result<DominantWeight, ClozelRejection> {
    if k < 2 {
        return Err(ClozelRejection {
            clause: "weight",
            reason: "k must be at least 2".into(),
        });
    }
    if eps > 1 {
        return Err(ClozelRejection {
            clause: "sign",
            reason: "eps must be 0 or 1".into(),
        });
    }
    let s_integral = *s.denom() == 1;
    let s_half = *s.denom() == 2;
    if n % 2 == 0 {
        if !s_integral {
            return Err(ClozelRejection {
                clause: "n even",
                reason: "s must be an integer for n even".into(),
            });
        }
        let want = (n as u64 * (k as u64 - 1) / 2) % 2;
        if eps as u64 != want {
            return Err(ClozelRejection {
                clause: "n even",
                reason: format!("eps must be congruent to n(k-1)/2 = {want} mod 2"),
            });
        }
    } else if k % 2 == 0 && !s_integral {
        return Err(ClozelRejection {
            clause: "n odd, k even",
            reason: "s must be an integer when k is even".into(),
        });
    } else if k % 2 == 1 && !s_half {
        return Err(ClozelRejection {
            clause: "n odd, k odd",
            reason: "s must lie in 1/2 + Z when k is odd".into(),
        });
    }
    let entries = (0..=n)
        .map(|j| {
            let rho = Rational::from((n as i64 - 2 * j as i64, 2));
            rho * (k as i64 - 2) + s
        })
        .collect();
    Ok(DominantWeight {
        entries,
        weight: Rational::from(s * 2u32),
    })
}

/// Results for both signs; for odd n neither is excluded.
pub fn clozel_weights_both_signs(
    n: u32,
    k: u32,
    s: &Rational,
) -> [Result<DominantWeight, ClozelRejection>; 2] {
    [clozel_weight(n, k, s, 0), clozel_weight(n, k, s, 1)]
}

/// l = 2(k-1) rho_{n+1} = (k-1)(n, n-2, ..., -n).
pub fn symmetric_power_l(n: u32, k: u32) -> Vec<i64> {
    (0..=n)
        .map(|j| (k as i64 - 1) * (n as i64 - 2 * j as i64))
        .collect()
}

/// Rankin products of weights k1 >= k2 are cohomological iff k1 > k2 >= 2.
pub fn rankin_cohomological(k1: u32, k2: u32) -> bool {
    k1 > k2 && k2 >= 2
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_ranges() {
        assert_eq!(cuspidal_range(2), (1, 1));
        assert_eq!(cuspidal_range(3), (2, 3));
        assert_eq!(cuspidal_range(4), (4, 5));
    }

    #[test]
    fn admissibility() {
        assert!(jwl_admissible(0, &[11, -11]));
        assert!(!jwl_admissible(1, &[11, -11]));
        assert!(jwl_admissible(0, &[4, 2, 0, -2, -4]));
        assert!(!jwl_admissible(0, &[4, 4, 0, -4, -4]));
        assert!(!jwl_admissible(0, &[4, 2, 1, -2, -4]));
        assert!(!jwl_admissible(0, &[0, 0]));
    }

    #[test]
    fn weights() {
        let mu = clozel_weight(2, 12, &Rational::new(), 1).unwrap();
        let ints: Vec<Rational> = [10, 0, -10].iter().map(|&v| Rational::from(v)).collect();
        assert_eq!(mu.entries, ints);
        let r = clozel_weight(2, 12, &Rational::from((1, 2)), 1).unwrap_err();
        assert_eq!(r.clause, "n even");
        assert!(clozel_weight(2, 12, &Rational::new(), 0).is_err());
        let mu = clozel_weight(3, 11, &Rational::from((1, 2)), 0).unwrap();
        let ints: Vec<Rational> = [14, 5, -4, -13].iter().map(|&v| Rational::from(v)).collect();
        assert_eq!(mu.entries, ints);
        let both = clozel_weights_both_signs(3, 11, &Rational::from((1, 2)));
        assert!(both[0].is_ok() && both[1].is_ok());
    }

    #[test]
    fn rankin() {
        assert!(rankin_cohomological(4, 2));
        assert!(!rankin_cohomological(12, 12));
        assert!(!rankin_cohomological(3, 1));
    }

    proptest! {
        #[test]
        fn range_width(n in 2u32..=20) {
            let (b, t) = cuspidal_range(n);
            prop_assert!(b <= t);
            prop_assert_eq!(t - b, (n - 1) / 2);
        }

        #[test]
        fn purity(n in 1u32..=8, k in 2u32..=20, twice_s in -12i64..=12, eps in 0u8..=1) {
            let s = Rational::from((twice_s, 2));
            if let Ok(mu) = clozel_weight(n, k, &s, eps) {
                let len = mu.entries.len();
                for j in 0..len {
                    let sum = Rational::from(&mu.entries[j] + &mu.entries[len - 1 - j]);
                    prop_assert_eq!(&sum, &mu.weight);
                    prop_assert_eq!(mu.entries[j].denom(), &1);
                }
            }
        }
    }
}
