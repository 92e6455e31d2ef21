//! Satake parameters and symmetric-power Euler factors.
//!
//! Euler factors are polynomials in X = p^{-s}. The Sym^n factor is
//! assembled from the trace a_p and determinant omega(p) p^{k-1} through
//! power sums and Newton's identities, so it stays exact whenever a_p is
//! rational and the twist has finite order.

use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::arith::{is_prime, primes_up_to, smallest_prime_factors};
use crate::characters::DirichletCharacter;
use crate::cyclo::Cyclo;
use crate::error::{Error, Result};
use crate::numeric::Cx;
use crate::qseries::Newform;

#[derive(Clone, Debug)]
pub struct SatakeParams {
    pub p: u64,
    /// alpha + beta = a_p
    pub trace: Cyclo,
    /// alpha * beta = omega(p) p^{k-1}, zero at bad primes
    pub det: Cyclo,
    pub good_prime: bool,
    pub alpha: Cx,
    pub beta: Cx,
}

pub fn satake_at(f: &Newform, p: u64, prec: u32) -> Result<SatakeParams> {
    if !is_prime(p) {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    let ap = Cyclo::from_rational(f.a(p as usize)?.clone());
    let good = f.level() % p != 0;
    let det = if good {
        let pk = Rational::from(Integer::from(p).pow(f.weight() - 1));
        f.nebentypus().value(p as i64).scale(&pk)
    } else {
        Cyclo::zero(1)
    };
    let (alpha, beta) = if good {
        // reciprocal roots of 1 - a_p X + det X^2
        let t = ap.to_complex(prec + 16);
        let d = det.to_complex(prec + 16);
        let disc = &(&t * &t) - &d.scale(&Float::with_val(prec + 16, 4));
        let root = disc.sqrt();
        let half = Float::with_val(prec + 16, 0.5);
        (
            (&t + &root).scale(&half).with_prec(prec),
            (&t - &root).scale(&half).with_prec(prec),
        )
    } else {
        (ap.to_complex(prec), Cx::zero(prec))
    };
    Ok(SatakeParams {
        p,
        trace: ap,
        det,
        good_prime: good,
        alpha,
        beta,
    })
}

/// 1 + c_1 X + ... + c_d X^d.
#[derive(Clone, Debug, PartialEq)]
pub struct EulerFactor {
    pub p: u64,
    pub coeffs: Vec<Cyclo>,
}

impl EulerFactor {
    pub fn one(p: u64) -> Self {
        EulerFactor {
            p,
            coeffs: vec![Cyclo::one()],
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn mul(&self, other: &EulerFactor) -> EulerFactor {
        let mut out = vec![Cyclo::zero(1); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        EulerFactor { p: self.p, coeffs: out }.trimmed()
    }

    /// The factor with X replaced by c X.
    pub fn substitute(&self, c: &Cyclo) -> EulerFactor {
        let mut pw = Cyclo::one();
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            coeffs.push(a.mul(&pw));
            pw = pw.mul(c);
        }
        EulerFactor { p: self.p, coeffs }.trimmed()
    }

    fn trimmed(mut self) -> EulerFactor {
        while self.coeffs.len() > 1 && self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        self
    }

    /// Coefficients of 1 / F(X) up to X^terms (inclusive).
    pub fn inverse_series(&self, terms: usize) -> Vec<Cyclo> {
        let mut out: Vec<Cyclo> = Vec::with_capacity(terms + 1);
        out.push(Cyclo::one());
        for j in 1..=terms {
            let mut acc = Cyclo::zero(1);
            for i in 1..=j.min(self.degree()) {
                acc = acc.sub(&self.coeffs[i].mul(&out[j - i]));
            }
            out.push(acc);
        }
        out
    }

    pub fn to_complex(&self, prec: u32) -> Vec<Cx> {
        self.coeffs.iter().map(|c| c.to_complex(prec)).collect()
    }

    /// F(p^{-s}) numerically.
    pub fn evaluate(&self, s: &Cx) -> Cx {
        let prec = s.prec();
        let x = Cx::real_base_pow(&Float::with_val(prec, self.p), &(-s));
        let mut acc = Cx::zero(prec);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * &x) + &c.to_complex(prec);
        }
        acc
    }
}

/// prod_{i=0}^n (1 - t alpha^i beta^{n-i} X).
pub fn sym_euler_factor(s: &SatakeParams, n: u32, twist: &Cyclo) -> EulerFactor {
    sym_factor_from_trace_det(s.p, &s.trace, &s.det, n, twist)
}

pub fn sym_factor_from_trace_det(
    p: u64,
    trace: &Cyclo,
    det: &Cyclo,
    n: u32,
    twist: &Cyclo,
) -> EulerFactor {
    let n = n as usize;
    let d = n + 1;
    // A_j = alpha^j + beta^j, D^j
    let mut a_pow = vec![Cyclo::from_int(2), trace.clone()];
    let mut d_pow = vec![Cyclo::one(), det.clone()];
    for j in 2..=d {
        let next = trace.mul(&a_pow[j - 1]).sub(&det.mul(&a_pow[j - 2]));
        a_pow.push(next);
        d_pow.push(d_pow[j - 1].mul(det));
    }
    // P_j = t^j h_n(alpha^j, beta^j)
    let mut t_pow = Cyclo::one();
    let mut power_sums = vec![Cyclo::zero(1)];
    for j in 1..=d {
        t_pow = t_pow.mul(twist);
        let (aj, dj) = (&a_pow[j], &d_pow[j]);
        let mut h_prev = Cyclo::one();
        let mut h = aj.clone();
        for _ in 2..=n {
            let next = aj.mul(&h).sub(&dj.mul(&h_prev));
            h_prev = h;
            h = next;
        }
        if n == 0 {
            h = Cyclo::one();
        }
        power_sums.push(t_pow.mul(&h));
    }
    // Newton: j e_j = sum_{i=1}^j (-1)^{i-1} e_{j-i} P_i
    let mut e = vec![Cyclo::one()];
    for j in 1..=d {
        let mut acc = Cyclo::zero(1);
        for i in 1..=j {
            let term = e[j - i].mul(&power_sums[i]);
            acc = if i % 2 == 1 { acc.add(&term) } else { acc.sub(&term) };
        }
        e.push(acc.scale(&Rational::from((1, j as u64))));
    }
    let coeffs = e
        .into_iter()
        .enumerate()
        .map(|(j, c)| if j % 2 == 1 { c.neg() } else { c })
        .collect();
    EulerFactor { p, coeffs }.trimmed()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BadPrimeMode {
    /// Local factor 1 at bad primes: the partial L-function.
    #[default]
    Partial,
    /// beta = 0 at bad primes: factor 1 - t a_p^n X.
    Naive,
}

impl std::str::FromStr for BadPrimeMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "partial" => Ok(BadPrimeMode::Partial),
            "naive" => Ok(BadPrimeMode::Naive),
            other => Err(Error::Configuration(format!("unknown bad-prime mode {other:?}"))),
        }
    }
}

/// Local Sym^n factor of f at p twisted by eta(p), honoring the bad-prime mode.
pub fn local_factor(
    f: &Newform,
    n: u32,
    eta: &DirichletCharacter,
    p: u64,
    mode: BadPrimeMode,
    excluded: &[u64],
) -> Result<EulerFactor> {
    if excluded.contains(&p) {
        return Ok(EulerFactor::one(p));
    }
    let twist = eta.value(p as i64);
    if twist.is_zero() {
        return Ok(EulerFactor::one(p));
    }
    let ap = Cyclo::from_rational(f.a(p as usize)?.clone());
    if f.level() % p == 0 {
        return Ok(match mode {
            BadPrimeMode::Partial => EulerFactor::one(p),
            BadPrimeMode::Naive => {
                sym_factor_from_trace_det(p, &ap, &Cyclo::zero(1), n, &twist)
            }
        });
    }
    let pk = Rational::from(Integer::from(p).pow(f.weight() - 1));
    let det = f.nebentypus().value(p as i64).scale(&pk);
    Ok(sym_factor_from_trace_det(p, &ap, &det, n, &twist))
}

/// Dirichlet coefficients b_1..b_L of the Euler product of Sym^n f twisted by eta.
pub fn dirichlet_coeffs(
    f: &Newform,
    n: u32,
    eta: &DirichletCharacter,
    length: usize,
    mode: BadPrimeMode,
) -> Result<Vec<Cyclo>> {
    dirichlet_coeffs_excluding(f, n, eta, length, mode, &[])
}

pub fn dirichlet_coeffs_excluding(
    f: &Newform,
    n: u32,
    eta: &DirichletCharacter,
    length: usize,
    mode: BadPrimeMode,
    excluded: &[u64],
) -> Result<Vec<Cyclo>> {
    if length == 0 {
        return Ok(Vec::new());
    }
    let primes = primes_up_to(length);
    if let Some(&pmax) = primes.last() {
        if pmax as usize > f.len() {
            return Err(Error::Range {
                needed: pmax as usize,
                available: f.len(),
            });
        }
    }
    let mut local: Vec<Vec<Cyclo>> = vec![Vec::new(); length + 1];
    for &p in &primes {
        let mut terms = 0usize;
        let mut pe = p as usize;
        while pe <= length {
            terms += 1;
            pe = pe.saturating_mul(p as usize);
        }
        let factor = local_factor(f, n, eta, p, mode, excluded)?;
        local[p as usize] = factor.inverse_series(terms);
    }
    let spf = smallest_prime_factors(length);
    let mut b: Vec<Cyclo> = Vec::with_capacity(length);
    b.push(Cyclo::one());
    for m in 2..=length {
        let p = spf[m] as usize;
        let mut rest = m / p;
        let mut e = 1;
        while rest % p == 0 {
            rest /= p;
            e += 1;
        }
        b.push(local[p][e].mul(&b[rest - 1]));
    }
    Ok(b)
}

/// Rational coefficients when every b_m lies in Q.
pub fn rational_coeffs(b: &[Cyclo]) -> Option<Vec<Rational>> {
    b.iter().map(|c| c.as_rational()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::{make_character, trivial_character};
    use crate::qseries::delta_newform;

    fn delta() -> Newform {
        delta_newform(200).unwrap()
    }

    #[test]
    fn satake_at_two() {
        let s = satake_at(&delta(), 2, 128).unwrap();
        assert!(s.good_prime);
        assert_eq!(s.trace, -24);
        assert_eq!(s.det, 2048);
        let sum = &s.alpha + &s.beta;
        let prod = &s.alpha * &s.beta;
        assert!((sum.re.to_f64() + 24.0).abs() < 1e-20);
        assert!((prod.re.to_f64() - 2048.0).abs() < 1e-15);
    }

    #[test]
    fn sym1_is_hecke_polynomial() {
        let s = satake_at(&delta(), 3, 64).unwrap();
        let f = sym_euler_factor(&s, 1, &Cyclo::one());
        assert_eq!(f.coeffs, vec![Cyclo::one(), Cyclo::from_int(-252), Cyclo::from_int(177147)]);
    }

    #[test]
    fn sym2_at_two() {
        let s = satake_at(&delta(), 2, 64).unwrap();
        let f = sym_euler_factor(&s, 2, &Cyclo::one());
        assert_eq!(f.degree(), 3);
        assert_eq!(f.coeffs[0], 1);
        let lead = Cyclo::from_rational(-Rational::from(Integer::from(2).pow(33)));
        assert_eq!(f.coeffs[3], lead);
        // -(alpha^2 + alpha beta + beta^2) = -(576 - 2048)
        assert_eq!(f.coeffs[1], 1472);
    }

    #[test]
    fn bad_prime_modes() {
        let doc = br#"{"weight":2,"level":11,"coefficients":[1,-2,-1,2,1,2,-2,0,-2,-2,1]}"#;
        let f = crate::qseries::load_newform(doc).unwrap();
        let t = trivial_character();
        let naive = local_factor(&f, 3, &t, 11, BadPrimeMode::Naive, &[]).unwrap();
        assert_eq!(naive.coeffs, vec![Cyclo::one(), Cyclo::from_int(-1)]);
        let partial = local_factor(&f, 3, &t, 11, BadPrimeMode::Partial, &[]).unwrap();
        assert_eq!(partial.degree(), 0);
        let s = satake_at(&f, 11, 64).unwrap();
        assert!(!s.good_prime && s.beta.is_zero());
    }

    #[test]
    fn sym1_coefficients_reproduce_tau() {
        let d = delta();
        let b = dirichlet_coeffs(&d, 1, &trivial_character(), 200, BadPrimeMode::Partial).unwrap();
        for (m, c) in b.iter().enumerate() {
            assert_eq!(c.as_rational().unwrap(), *d.a(m + 1).unwrap());
        }
        let b2 = dirichlet_coeffs(&d, 2, &trivial_character(), 4, BadPrimeMode::Partial).unwrap();
        assert_eq!(b2[1], -1472);
        assert_eq!(dirichlet_coeffs(&d, 3, &trivial_character(), 1, BadPrimeMode::Partial).unwrap().len(), 1);
    }

    #[test]
    fn twisted_coefficients_scale_by_character() {
        let d = delta();
        let eta = make_character(5, &[1]).unwrap();
        let plain = dirichlet_coeffs(&d, 2, &trivial_character(), 120, BadPrimeMode::Partial).unwrap();
        let tw = dirichlet_coeffs(&d, 2, &eta, 120, BadPrimeMode::Partial).unwrap();
        for m in 1..=120usize {
            assert_eq!(tw[m - 1], eta.value(m as i64).mul(&plain[m - 1]), "m={m}");
        }
    }

    #[test]
    fn range_error_when_coefficients_run_out() {
        let d = delta_newform(10).unwrap();
        assert!(matches!(
            dirichlet_coeffs(&d, 1, &trivial_character(), 50, BadPrimeMode::Partial),
            Err(Error::Range { .. })
        ));
    }
}
