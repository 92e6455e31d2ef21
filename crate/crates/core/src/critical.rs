//! Critical integers of Sym^n L-functions of weight-k forms and the
//! predicted shape of their critical values in terms of the periods
//! c^+, c^- and the determinant period delta(omega).

use rug::Rational;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalSet {
    pub n: u32,
    pub k: u32,
    pub members: Vec<i64>,
    pub center: Rational,
}

impl CriticalSet {
    pub fn contains(&self, m: i64) -> bool {
        self.members.binary_search(&m).is_ok()
    }

    /// Members strictly right of the center of symmetry.
    pub fn right_half(&self) -> Vec<i64> {
        self.members
            .iter()
            .copied()
            .filter(|&m| m > self.center)
            .collect()
    }
}

fn stepped(from: i64, to: i64, step: i64) -> impl Iterator<Item = i64> {
    (0..)
        .map(move |i| from + i * step)
        .take_while(move |&m| m <= to)
}

pub fn critical_set(n: u32, k: u32) -> CriticalSet {
    assert!(n >= 1 && k >= 1, "n and k must be positive");
    let kk = (k - 1) as i64;
    let mut members = Vec::new();
    if k > 1 {
        if n % 2 == 1 {
            let r = ((n - 1) / 2) as i64;
            members.extend(r * kk + 1..=(r + 1) * kk);
        } else {
            let r = (n / 2) as i64;
            let (left, right) = match (r % 2 == 1, k % 2 == 0) {
                (true, true) => (
                    ((r - 1) * kk + 1, r * kk),
                    (r * kk + 1, (r + 1) * kk),
                ),
                (false, true) => (
                    ((r - 1) * kk + 2, r * kk - 1),
                    (r * kk + 2, (r + 1) * kk - 1),
                ),
                // k odd, either parity of r
                (_, false) => (
                    ((r - 1) * kk + 1, r * kk - 1),
                    (r * kk + 2, (r + 1) * kk),
                ),
            };
            members.extend(stepped(left.0, left.1, 2));
            members.extend(stepped(right.0, right.1, 2));
        }
    }
    CriticalSet {
        n,
        k,
        members,
        center: Rational::from((n as i64 * (k as i64 - 1) + 1, 2)),
    }
}

pub fn zeta_critical(m: i64) -> bool {
    (m > 0 && m % 2 == 0) || (m < 0 && m % 2 != 0)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DelignePrediction {
    pub pow_2pii: i64,
    pub e_plus: u32,
    pub e_minus: u32,
    pub e_delta: u32,
}

pub fn deligne_prediction(n: u32, m: i64, k: u32) -> Result<DelignePrediction> {
    if !critical_set(n, k).contains(m) {
        return Err(Error::Domain(format!(
            "{m} is not critical for Sym^{n} of weight {k}"
        )));
    }
    let l = (n / 2) as i64;
    let tri = |x: i64| (x * (x + 1) / 2) as u32;
    Ok(if n % 2 == 1 {
        let (big, small) = (tri(l + 1), tri(l));
        let (e_plus, e_minus) = if m % 2 == 0 { (big, small) } else { (small, big) };
        DelignePrediction {
            pow_2pii: m * (l + 1),
            e_plus,
            e_minus,
            e_delta: tri(l),
        }
    } else {
        let e = tri(l);
        if m % 2 == 0 {
            DelignePrediction { pow_2pii: m * (l + 1), e_plus: e, e_minus: e, e_delta: e }
        } else {
            DelignePrediction { pow_2pii: m * l, e_plus: e, e_minus: e, e_delta: tri(l - 1) }
        }
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RatioExponent {
    /// L(m1)/L(m2) ~ (2 pi i)^pow_2pii g(omega)^gauss_multiplicity.
    Cancels { pow_2pii: i64, gauss_multiplicity: i64 },
    /// The period exponents differ; no period-free relation is predicted.
    NoCancellation,
}

pub fn ratio_exponent(n: u32, m1: i64, m2: i64, k: u32) -> Result<RatioExponent> {
    let a = deligne_prediction(n, m1, k)?;
    let b = deligne_prediction(n, m2, k)?;
    if a.e_plus != b.e_plus || a.e_minus != b.e_minus {
        return Ok(RatioExponent::NoCancellation);
    }
    let de = a.e_delta as i64 - b.e_delta as i64;
    Ok(RatioExponent::Cancels {
        pow_2pii: a.pow_2pii - b.pow_2pii + (1 - k as i64) * de,
        gauss_multiplicity: de,
    })
}

/// All ordered pairs (m1, m2), m1 > m2, of critical integers whose ratio is period-free.
pub fn cancelling_pairs(n: u32, k: u32) -> Vec<(i64, i64)> {
    let set = critical_set(n, k);
    let mut out = Vec::new();
    for (i, &m2) in set.members.iter().enumerate() {
        for &m1 in &set.members[i + 1..] {
            if let Ok(RatioExponent::Cancels { .. }) = ratio_exponent(n, m1, m2, k) {
                out.push((m1, m2));
            }
        }
    }
    out
}
