//! Exact arithmetic in cyclotomic fields Q(zeta_m).
//!
//! An element is stored in the power basis 1, z, ..., z^(phi(m)-1) of
//! Q(zeta_m) with rational coefficients. Elements of different fields are
//! combined by lifting both into Q(zeta_lcm).

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use rug::{Integer, Rational};

use crate::arith::{divisors, euler_phi, lcm};
use crate::numeric::{Cx, pi};

/// Integer coefficients of the m-th cyclotomic polynomial, constant term first.
pub fn cyclotomic_polynomial(m: u64) -> Vec<Integer> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Vec<Integer>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&m) {
        return p.clone();
    }
    let p = compute_cyclotomic(m);
    cache.lock().unwrap().insert(m, p.clone());
    p
}

fn compute_cyclotomic(m: u64) -> Vec<Integer> {
    // x^m - 1 = prod_{d | m} Phi_d(x)
    let mut num: Vec<Integer> = vec![Integer::new(); m as usize + 1];
    num[0] = Integer::from(-1);
    num[m as usize] = Integer::from(1);
    for d in divisors(m) {
        if d == m {
            continue;
        }
        let den = cyclotomic_polynomial(d);
        num = exact_div(&num, &den);
    }
    num
}

fn exact_div(num: &[Integer], den: &[Integer]) -> Vec<Integer> {
    let mut rem: Vec<Integer> = num.to_vec();
    let dd = den.len() - 1;
    let nd = num.len() - 1;
    let mut quot = vec![Integer::new(); nd - dd + 1];
    let lead = den[dd].clone();
    for i in (0..=nd - dd).rev() {
        let q = Integer::from(&rem[i + dd] / &lead);
        for (j, c) in den.iter().enumerate() {
            rem[i + j] -= Integer::from(&q * c);
        }
        quot[i] = q;
    }
    quot
}

#[derive(Clone)]
pub struct Cyclo {
    order: u64,
    coeffs: Vec<Rational>,
}

impl Cyclo {
    pub fn zero(order: u64) -> Self {
        let order = order.max(1);
        Cyclo {
            order,
            coeffs: vec![Rational::new(); euler_phi(order) as usize],
        }
    }

    pub fn from_rational(q: Rational) -> Self {
        Cyclo {
            order: 1,
            coeffs: vec![q],
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from(n))
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// zeta_order^exponent.
    pub fn root_of_unity(order: u64, exponent: u64) -> Self {
        let order = order.max(1);
        let mut raw = vec![Rational::new(); order as usize];
        raw[(exponent % order) as usize] = Rational::from(1);
        Self::reduce(order, raw)
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coeffs
    }

    fn reduce(order: u64, mut raw: Vec<Rational>) -> Self {
        // fold exponents modulo `order` first, then divide by Phi_order
        if raw.len() > order as usize {
            for i in order as usize..raw.len() {
                let c = std::mem::take(&mut raw[i]);
                let slot = i % order as usize;
                raw[slot] += c;
            }
            raw.truncate(order as usize);
        }
        let phi = cyclotomic_polynomial(order);
        let deg = phi.len() - 1;
        for i in (deg..raw.len()).rev() {
            if raw[i] == 0 {
                continue;
            }
            let c = std::mem::take(&mut raw[i]);
            for (j, pj) in phi.iter().enumerate().take(deg) {
                if *pj != 0 {
                    raw[i - deg + j] -= Rational::from(&c * pj);
                }
            }
        }
        raw.resize(deg, Rational::new());
        Cyclo { order, coeffs: raw }
    }

    /// The same element viewed in Q(zeta_target); `target` must be a multiple of the order.
    pub fn lift(&self, target: u64) -> Self {
        if target == self.order {
            return self.clone();
        }
        assert!(target % self.order == 0, "lift target must be a multiple of the order");
        let step = (target / self.order) as usize;
        let mut raw = vec![Rational::new(); target as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            raw[i * step] = c.clone();
        }
        Self::reduce(target, raw)
    }

    fn common(&self, other: &Cyclo) -> (Cyclo, Cyclo) {
        let l = lcm(self.order, other.order);
        (self.lift(l), other.lift(l))
    }

    pub fn add(&self, other: &Cyclo) -> Cyclo {
        if self.order == 1 && other.order == 1 {
            return Cyclo::from_rational(Rational::from(&self.coeffs[0] + &other.coeffs[0]));
        }
        let (mut a, b) = self.common(other);
        for (x, y) in a.coeffs.iter_mut().zip(b.coeffs.iter()) {
            *x += y;
        }
        a
    }

    pub fn sub(&self, other: &Cyclo) -> Cyclo {
        if self.order == 1 && other.order == 1 {
            return Cyclo::from_rational(Rational::from(&self.coeffs[0] - &other.coeffs[0]));
        }
        let (mut a, b) = self.common(other);
        for (x, y) in a.coeffs.iter_mut().zip(b.coeffs.iter()) {
            *x -= y;
        }
        a
    }

    pub fn neg(&self) -> Cyclo {
        Cyclo {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| Rational::from(-c)).collect(),
        }
    }

    pub fn mul(&self, other: &Cyclo) -> Cyclo {
        if self.order == 1 && other.order == 1 {
            return Cyclo::from_rational(Rational::from(&self.coeffs[0] * &other.coeffs[0]));
        }
        let (a, b) = self.common(other);
        let mut raw = vec![Rational::new(); a.coeffs.len() + b.coeffs.len()];
        for (i, x) in a.coeffs.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if *y != 0 {
                    raw[i + j] += Rational::from(x * y);
                }
            }
        }
        Self::reduce(a.order, raw)
    }

    pub fn scale(&self, q: &Rational) -> Cyclo {
        Cyclo {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| Rational::from(c * q)).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Cyclo {
        let mut base = self.clone();
        let mut acc = Cyclo::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == 0)
    }

    /// The rational value when the element lies in Q.
    pub fn as_rational(&self) -> Option<Rational> {
        // coefficients are unique in the power basis of Q(zeta_m)
        if self.coeffs.iter().skip(1).all(|c| *c == 0) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Numeric value with zeta_m = exp(2 pi i / m).
    pub fn to_complex(&self, prec: u32) -> Cx {
        let mut acc = Cx::zero(prec);
        let two_pi_over_m = pi(prec) * 2u32 / Integer::from(self.order);
        for (i, c) in self.coeffs.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            let angle = two_pi_over_m.clone() * i as u32;
            let z = Cx::from_polar_unit(&angle);
            acc = &acc + &z.scale_rational(c);
        }
        acc
    }
}

impl PartialEq for Cyclo {
    fn eq(&self, other: &Cyclo) -> bool {
        cyclo_eq(self, other)
    }
}

impl PartialEq<i64> for Cyclo {
    fn eq(&self, other: &i64) -> bool {
        self.as_rational().is_some_and(|q| q == *other)
    }
}

/// Equality across different orders.
pub fn cyclo_eq(a: &Cyclo, b: &Cyclo) -> bool {
    a.sub(b).is_zero()
}

impl fmt::Debug for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = self.as_rational() {
            return write!(f, "{}", q);
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{}", c)?,
                1 => write!(f, "({})*z{}", c, self.order)?,
                _ => write!(f, "({})*z{}^{}", c, self.order, i)?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_polynomials() {
        let p = |m| -> Vec<i64> {
            cyclotomic_polynomial(m)
                .iter()
                .map(|c| c.to_i64().unwrap())
                .collect()
        };
        assert_eq!(p(1), vec![-1, 1]);
        assert_eq!(p(4), vec![1, 0, 1]);
        assert_eq!(p(6), vec![1, -1, 1]);
        assert_eq!(p(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn roots_of_unity_multiply() {
        let i = Cyclo::root_of_unity(4, 1);
        assert!(cyclo_eq(&i.mul(&i), &Cyclo::from_int(-1)));
        let w = Cyclo::root_of_unity(3, 1);
        // 1 + w + w^2 = 0
        let s = Cyclo::one().add(&w).add(&w.mul(&w));
        assert!(s.is_zero());
        // i * w lives in Q(zeta_12)
        let iw = i.mul(&w);
        assert_eq!(iw.order(), 12);
        assert!(cyclo_eq(&iw.pow(12), &Cyclo::one()));
        assert!(cyclo_eq(&iw, &Cyclo::root_of_unity(12, 7)));
    }

    #[test]
    fn numeric_value() {
        let z = Cyclo::root_of_unity(8, 1).add(&Cyclo::root_of_unity(8, 7));
        // zeta_8 + zeta_8^-1 = sqrt(2)
        let v = z.to_complex(128);
        assert!((v.re.to_f64() - 2f64.sqrt()).abs() < 1e-15);
        assert!(v.im.to_f64().abs() < 1e-15);
    }
}
