//! CM forms from Hecke characters of class-number-one imaginary quadratic
//! fields, and the isobaric decomposition of their symmetric powers.
//!
//! A Hecke character here is chi((alpha)) = (eps alpha)^u where eps is the
//! unit making eps alpha = 1 mod f. This is well defined exactly when the
//! units surject onto (O/f)^x and every unit that is 1 mod f has u-th
//! power 1. The conductor must be stable under complex conjugation so that
//! the attached form has rational coefficients.

use std::fmt;

use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use serde::Serialize;

use crate::arith::{gcd, is_prime, primes_up_to};
use crate::characters::{character_from_values, kronecker, DirichletCharacter};
use crate::cyclo::Cyclo;
use crate::error::{Error, Result};
use crate::numeric::Cx;
use crate::qseries::{hecke_validate, Newform};
use crate::satake::{sym_factor_from_trace_det, BadPrimeMode, EulerFactor};

pub const CLASS_NUMBER_ONE: [i64; 9] = [-3, -4, -7, -8, -11, -19, -43, -67, -163];

/// a + b w in the ring of integers, w^2 = c0 + c1 w.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadInt {
    pub a: Integer,
    pub b: Integer,
}

impl QuadInt {
    pub fn new(a: impl Into<Integer>, b: impl Into<Integer>) -> QuadInt {
        QuadInt { a: a.into(), b: b.into() }
    }

    pub fn is_rational(&self) -> bool {
        self.b == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImagQuadField {
    disc: i64,
    c0: i64,
    c1: i64,
    /// generator of the unit group and its order
    unit_order: u32,
}

impl ImagQuadField {
    pub fn new(disc: i64) -> Result<ImagQuadField> {
        if !CLASS_NUMBER_ONE.contains(&disc) {
            return Err(Error::Domain(format!(
                "{disc} is not the discriminant of a class-number-one imaginary quadratic field"
            )));
        }
        let (c0, c1) = if disc % 4 == 0 { (disc / 4, 0) } else { ((disc - 1) / 4, 1) };
        let unit_order = match disc {
            -4 => 4,
            -3 => 6,
            _ => 2,
        };
        Ok(ImagQuadField { disc, c0, c1, unit_order })
    }

    pub fn discriminant(&self) -> i64 {
        self.disc
    }

    pub fn mul(&self, x: &QuadInt, y: &QuadInt) -> QuadInt {
        let bd = Integer::from(&x.b * &y.b);
        let a = Integer::from(&x.a * &y.a) + Integer::from(&bd * self.c0);
        let b = Integer::from(&x.a * &y.b) + Integer::from(&x.b * &y.a) + bd * self.c1;
        QuadInt { a, b }
    }

    pub fn sub(&self, x: &QuadInt, y: &QuadInt) -> QuadInt {
        QuadInt::new(Integer::from(&x.a - &y.a), Integer::from(&x.b - &y.b))
    }

    pub fn conj(&self, x: &QuadInt) -> QuadInt {
        QuadInt::new(Integer::from(&x.b * self.c1) + &x.a, Integer::from(-&x.b))
    }

    pub fn norm(&self, x: &QuadInt) -> Integer {
        let mut n = Integer::from(x.a.square_ref());
        n += Integer::from(&x.a * &x.b) * self.c1;
        n -= Integer::from(x.b.square_ref()) * self.c0;
        n
    }

    pub fn trace(&self, x: &QuadInt) -> Integer {
        Integer::from(&x.a * 2) + Integer::from(&x.b * self.c1)
    }

    pub fn pow(&self, x: &QuadInt, mut e: u32) -> QuadInt {
        let mut acc = QuadInt::new(1, 0);
        let mut base = x.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// x / y when it lies in the ring.
    pub fn div_exact(&self, x: &QuadInt, y: &QuadInt) -> Option<QuadInt> {
        let n = self.norm(y);
        if n == 0 {
            return None;
        }
        let num = self.mul(x, &self.conj(y));
        if num.a.is_divisible(&n) && num.b.is_divisible(&n) {
            Some(QuadInt::new(num.a / &n, num.b / n))
        } else {
            None
        }
    }

    pub fn congruent(&self, x: &QuadInt, y: &QuadInt, modulus: &QuadInt) -> bool {
        self.div_exact(&self.sub(x, y), modulus).is_some()
    }

    /// Units as powers of a generator zeta_w: index j gives zeta_w^j.
    pub fn units(&self) -> Vec<QuadInt> {
        let gen = match self.disc {
            -4 => QuadInt::new(0, 1),
            // w = (1 + sqrt(-3))/2 is a primitive sixth root of unity
            -3 => QuadInt::new(0, 1),
            _ => QuadInt::new(-1, 0),
        };
        let mut out = vec![QuadInt::new(1, 0)];
        for _ in 1..self.unit_order {
            let next = self.mul(out.last().unwrap(), &gen);
            out.push(next);
        }
        out
    }

    pub fn unit_order(&self) -> u32 {
        self.unit_order
    }

    /// omega_K(p) = (D / p).
    pub fn omega_k(&self, n: i64) -> i64 {
        kronecker(self.disc, n)
    }

    /// An element of norm p for a prime p that is split or ramified.
    pub fn prime_above(&self, p: u64) -> Option<QuadInt> {
        let p = p as i64;
        // x^2 + c1 x y - c0 y^2 = p
        let ymax = ((4 * p) as f64 / self.disc.unsigned_abs() as f64).sqrt() as i64 + 2;
        for y in 0..=ymax {
            let disc = self.c1 * self.c1 * y * y + 4 * (self.c0 * y * y + p);
            if disc < 0 {
                continue;
            }
            let r = (disc as f64).sqrt().round() as i64;
            for rr in [r - 1, r, r + 1] {
                if rr >= 0 && rr * rr == disc && (rr - self.c1 * y) % 2 == 0 {
                    let x = (-self.c1 * y + rr) / 2;
                    let q = QuadInt::new(x, y);
                    if self.norm(&q) == p {
                        return Some(q);
                    }
                }
            }
        }
        None
    }

    pub fn to_complex(&self, x: &QuadInt, prec: u32) -> Cx {
        // w = c1/2 + sqrt(D)/2
        let sq = Float::with_val(prec, self.disc.unsigned_abs()).sqrt() / 2u32;
        let re = Float::with_val(prec, &x.a) + Float::with_val(prec, &x.b) * self.c1 / 2u32;
        let im = Float::with_val(prec, &x.b) * &sq;
        Cx::new(re, im)
    }
}

/// Parse a conductor such as "(1)", "(2)", "(1+i)^3", "(sqrt-3)" or "(3)^2".
pub fn parse_conductor(field: &ImagQuadField, text: &str) -> Result<QuadInt> {
    let bad = |m: &str| Error::Parse {
        location: text.to_string(),
        message: m.to_string(),
    };
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let (base, exp) = match t.rsplit_once('^') {
        Some((b, e)) => (b.to_string(), e.parse::<u32>().map_err(|_| bad("bad exponent"))?),
        None => (t.clone(), 1),
    };
    let inner = base.trim_start_matches('(').trim_end_matches(')');
    let gen = if let Ok(n) = inner.parse::<i64>() {
        QuadInt::new(n, 0)
    } else if inner == "1+i" && field.disc == -4 {
        QuadInt::new(1, 1)
    } else if matches!(inner, "sqrt-3" | "sqrt(-3)") && field.disc == -3 {
        // sqrt(-3) = 2w - 1
        QuadInt::new(-1, 2)
    } else {
        return Err(bad("unsupported conductor generator"));
    };
    Ok(field.pow(&gen, exp))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeckeCharacter {
    field: ImagQuadField,
    u: u32,
    conductor: QuadInt,
    conductor_norm: u64,
}

impl fmt::Display for HeckeCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "chi(D={}, u={}, f=({}+{}w))",
            self.field.disc, self.u, self.conductor.a, self.conductor.b
        )
    }
}

impl HeckeCharacter {
    pub fn new(disc: i64, u: u32, conductor: QuadInt) -> Result<HeckeCharacter> {
        let field = ImagQuadField::new(disc)?;
        if u == 0 {
            return Err(Error::IllDefined(
                "infinity type u = 0 makes chi Galois invariant (weight one)".into(),
            ));
        }
        let nf = field
            .norm(&conductor)
            .to_u64()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::IllDefined("conductor must be a nonzero ideal".into()))?;
        let cbar = field.conj(&conductor);
        if field.div_exact(&cbar, &conductor).is_none() {
            return Err(Error::IllDefined(
                "conductor is not stable under complex conjugation".into(),
            ));
        }
        let units = field.units();
        let one = QuadInt::new(1, 0);
        // kernel condition
        for e in &units {
            if field.congruent(e, &one, &conductor) && field.pow(e, u) != one {
                return Err(Error::IllDefined(format!(
                    "a unit congruent to 1 mod f has nontrivial {u}-th power"
                )));
            }
        }
        // surjectivity: distinct unit residues must exhaust (O/f)^x
        let mut distinct: Vec<&QuadInt> = Vec::new();
        for e in &units {
            if !distinct.iter().any(|d| field.congruent(d, e, &conductor)) {
                distinct.push(e);
            }
        }
        let phi = unit_count_mod(&field, nf);
        if distinct.len() as u64 != phi {
            return Err(Error::IllDefined(format!(
                "units reach {} of the {} residue classes prime to f; no normalized generator exists in general",
                distinct.len(),
                phi
            )));
        }
        Ok(HeckeCharacter {
            field,
            u,
            conductor,
            conductor_norm: nf,
        })
    }

    pub fn field(&self) -> &ImagQuadField {
        &self.field
    }

    pub fn u(&self) -> u32 {
        self.u
    }

    pub fn weight(&self) -> u32 {
        self.u + 1
    }

    pub fn conductor(&self) -> &QuadInt {
        &self.conductor
    }

    pub fn level(&self) -> u64 {
        self.field.disc.unsigned_abs() * self.conductor_norm
    }

    /// chi^j, same conductor.
    pub fn power(&self, j: u32) -> Result<HeckeCharacter> {
        HeckeCharacter::new(self.field.disc, self.u * j, self.conductor.clone())
    }

    fn coprime(&self, x: &QuadInt) -> bool {
        let n = self.field.norm(x);
        let g = Integer::from(n.gcd_ref(&Integer::from(self.conductor_norm)));
        g == 1
    }

    /// Index j of the unit zeta^j with zeta^j x = 1 mod f.
    fn normalizing_unit(&self, x: &QuadInt) -> Result<usize> {
        let one = QuadInt::new(1, 0);
        self.field
            .units()
            .iter()
            .position(|e| self.field.congruent(&self.field.mul(e, x), &one, &self.conductor))
            .ok_or_else(|| Error::IllDefined("generator normalization has no solution".into()))
    }

    /// chi((x)) for x prime to f, None otherwise.
    pub fn value(&self, x: &QuadInt) -> Result<Option<QuadInt>> {
        if !self.coprime(x) {
            return Ok(None);
        }
        let j = self.normalizing_unit(x)?;
        let g = self.field.mul(&self.field.units()[j], x);
        Ok(Some(self.field.pow(&g, self.u)))
    }

    /// Exponent of zeta_{2w} giving omega(a) = omega_K(a) chi((a)) / a^u.
    fn nebentypus_exponent(&self, a: u64) -> u64 {
        let w = self.field.unit_order as u64;
        let j = self
            .normalizing_unit(&QuadInt::new(a, 0))
            .expect("surjectivity was checked at construction") as u64;
        let sign = if self.field.omega_k(a as i64) == -1 { w } else { 0 };
        (sign + 2 * ((j * self.u as u64) % w)) % (2 * w)
    }

    pub fn nebentypus(&self) -> Result<DirichletCharacter> {
        let w = self.field.unit_order as u64;
        character_from_values(self.level(), 2 * w, |a| self.nebentypus_exponent(a))
    }

    /// Trace and determinant of the local Hecke polynomial of phi_chi at p.
    pub fn hecke_data_at(&self, p: u64) -> Result<(Integer, Integer)> {
        let k1 = self.u;
        let level = self.level();
        if level % p == 0 {
            if self.conductor_norm % p == 0 {
                return Ok((Integer::new(), Integer::new()));
            }
            // ramified, prime to f
            let pi = self.field.prime_above(p).expect("ramified primes have a generator");
            let v = self.value(&pi)?.expect("prime to f");
            debug_assert!(v.is_rational());
            return Ok((v.a, Integer::new()));
        }
        match self.field.omega_k(p as i64) {
            1 => {
                let pi = self.field.prime_above(p).expect("split primes have a generator");
                let v = self.value(&pi)?.expect("prime to f");
                Ok((self.field.trace(&v), self.field.norm(&v)))
            }
            _ => {
                let v = self.value(&QuadInt::new(p, 0))?.expect("prime to f");
                debug_assert!(v.is_rational());
                let _ = k1;
                Ok((Integer::new(), -v.a))
            }
        }
    }
}

/// |(O/f)^x| for a conjugation-stable f of norm nf.
fn unit_count_mod(field: &ImagQuadField, nf: u64) -> u64 {
    let mut phi = Rational::from(nf);
    for (p, _) in crate::arith::factor(nf) {
        match field.omega_k(p as i64) {
            1 => {
                // both primes above p divide f
                phi *= Rational::from((p - 1, p));
                phi *= Rational::from((p - 1, p));
            }
            0 => phi *= Rational::from((p - 1, p)),
            _ => phi *= Rational::from((p * p - 1, p * p)),
        }
    }
    phi.numer().to_u64().expect("small")
}

#[derive(Clone, Debug)]
pub struct CMForm {
    pub form: Newform,
    pub character: HeckeCharacter,
}

/// The theta series sum over ideals a prime to f of chi(a) q^{N a},
/// Hecke-validated.
pub fn cm_newform(chi: &HeckeCharacter, length: usize) -> Result<CMForm> {
    let field = &chi.field;
    let mut acc: Vec<QuadInt> = vec![QuadInt::new(0, 0); length + 1];
    let dabs = field.disc.unsigned_abs() as f64;
    let ymax = ((4.0 * length as f64) / dabs).sqrt() as i64 + 1;
    let xmax = (length as f64).sqrt() as i64 + ymax + 2;
    for y in -ymax..=ymax {
        for x in -xmax..=xmax {
            let q = QuadInt::new(x, y);
            let n = field.norm(&q);
            if n == 0 || n > length as u64 {
                continue;
            }
            if let Some(v) = chi.value(&q)? {
                let slot = &mut acc[n.to_usize().unwrap()];
                *slot = QuadInt::new(Integer::from(&slot.a + &v.a), Integer::from(&slot.b + &v.b));
            }
        }
    }
    let w = field.unit_order;
    let mut coeffs = Vec::with_capacity(length);
    for (n, v) in acc.iter().enumerate().skip(1) {
        if v.b != 0 || !v.a.is_divisible_u(w) {
            return Err(Error::Internal(format!("theta coefficient {n} is not rational")));
        }
        coeffs.push(Rational::from(Integer::from(&v.a / w)));
    }
    let mut form = Newform::new(chi.weight(), chi.level(), chi.nebentypus()?, coeffs)?;
    let report = hecke_validate(&form);
    if !report.passed() {
        return Err(Error::Internal(format!(
            "CM form fails Hecke relations at {} indices",
            report.violations.len()
        )));
    }
    form.mark_validated();
    Ok(CMForm {
        form,
        character: chi.clone(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Summand {
    /// AI(chi^a chi'^b)
    Induced { chi: u32, chi_conj: u32 },
    /// chi_Q^r
    Abelian { power: u32 },
}

impl Summand {
    pub fn degree(&self) -> u32 {
        match self {
            Summand::Induced { .. } => 2,
            Summand::Abelian { .. } => 1,
        }
    }
}

pub fn isobaric_factors(n: u32) -> Vec<Summand> {
    let r = n / 2;
    if n % 2 == 0 {
        let mut out: Vec<Summand> = (0..r)
            .map(|a| Summand::Induced { chi: n - a, chi_conj: a })
            .collect();
        out.push(Summand::Abelian { power: r });
        out
    } else {
        (0..=r)
            .map(|a| Summand::Induced { chi: n - a, chi_conj: a })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PeriodRelation {
    pub c_plus_exponent: u32,
    pub c_plus_extra: String,
    pub c_minus_exponent: u32,
    pub c_minus_extra: String,
}

pub fn period_relation_exponents(n: u32) -> PeriodRelation {
    PeriodRelation {
        c_plus_exponent: n,
        c_plus_extra: "1".into(),
        c_minus_exponent: n,
        c_minus_extra: "g(omega_K)".into(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrimeCheck {
    pub p: u64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecompositionReport {
    pub n: u32,
    pub prime_bound: u64,
    pub checked: Vec<PrimeCheck>,
    pub skipped: Vec<u64>,
}

impl DecompositionReport {
    pub fn failures(&self) -> Vec<u64> {
        self.checked.iter().filter(|c| !c.holds).map(|c| c.p).collect()
    }

    pub fn passed(&self) -> bool {
        self.failures().is_empty()
    }
}

fn rational_cyclo(z: Integer) -> Cyclo {
    Cyclo::from_rational(Rational::from(z))
}

/// Sym^n factor of phi_chi at a good p, from its stored coefficients.
pub fn lhs_factor(phi: &CMForm, n: u32, p: u64) -> Result<EulerFactor> {
    let f = &phi.form;
    let ap = Cyclo::from_rational(f.a(p as usize)?.clone());
    let pk = Rational::from(Integer::from(p).pow(f.weight() - 1));
    let det = f.nebentypus().value(p as i64).scale(&pk);
    Ok(sym_factor_from_trace_det(p, &ap, &det, n, &Cyclo::one()))
}

/// (omega omega_K)(p) as an exact value.
fn omega_omega_k(phi: &CMForm, p: u64) -> Cyclo {
    let ok = phi.character.field.omega_k(p as i64);
    phi.form.nebentypus().value(p as i64).scale(&Rational::from(ok))
}

/// Local factors of the right-hand side at a good p: one per summand,
/// in the order of `isobaric_factors`.
pub fn rhs_factors(phi: &CMForm, n: u32, p: u64) -> Result<Vec<EulerFactor>> {
    let chi = &phi.character;
    let k1 = chi.u;
    let r = n / 2;
    let t = omega_omega_k(phi, p);
    let top = if n % 2 == 0 { r } else { r + 1 };
    let mut out = Vec::new();
    for a in 0..top {
        let j = n - 2 * a;
        let (tr, det) = chi.power(j)?.hecke_data_at(p)?;
        let base = sym_factor_from_trace_det(p, &rational_cyclo(tr), &rational_cyclo(det), 1, &Cyclo::one());
        let shift = Cyclo::from_rational(Rational::from(Integer::from(p).pow(a * k1)));
        out.push(base.substitute(&t.pow(a).mul(&shift)));
    }
    if n % 2 == 0 {
        let c = t.pow(r).scale(&Rational::from(Integer::from(p).pow(r * k1)));
        out.push(EulerFactor {
            p,
            coeffs: vec![Cyclo::one(), c.neg()],
        });
    }
    Ok(out)
}

pub fn verify_decomposition(phi: &CMForm, n: u32, prime_bound: u64) -> Result<DecompositionReport> {
    let level = phi.form.level();
    let mut checked = Vec::new();
    let mut skipped = Vec::new();
    for p in primes_up_to(prime_bound as usize) {
        if p >= prime_bound {
            break;
        }
        if level % p == 0 {
            skipped.push(p);
            continue;
        }
        let lhs = lhs_factor(phi, n, p)?;
        let rhs = rhs_factors(phi, n, p)?
            .into_iter()
            .fold(EulerFactor::one(p), |acc, f| acc.mul(&f));
        checked.push(PrimeCheck { p, holds: lhs == rhs });
    }
    Ok(DecompositionReport {
        n,
        prime_bound,
        checked,
        skipped,
    })
}

/// prod_{p <= P} F_p(p^{-s})^{-1} from the numeric Satake parameters of phi_chi.
pub fn lhs_euler_product(
    phi: &CMForm,
    n: u32,
    s: &Cx,
    prime_bound: u64,
    mode: BadPrimeMode,
) -> Result<Cx> {
    let prec = s.prec();
    let mut acc = Cx::one(prec);
    for p in primes_up_to(prime_bound as usize) {
        let sp = crate::satake::satake_at(&phi.form, p, prec + 32)?;
        if !sp.good_prime && mode == BadPrimeMode::Partial {
            continue;
        }
        let x = Cx::real_base_pow(&Float::with_val(prec + 32, p), &(-s).with_prec(prec + 32));
        let mut local = Cx::one(prec + 32);
        for i in 0..=n {
            let mut root = Cx::one(prec + 32);
            for _ in 0..i {
                root = &root * &sp.alpha;
            }
            for _ in i..n {
                root = &root * &sp.beta;
            }
            local = &local * &(&Cx::one(prec + 32) - &(&root * &x));
        }
        acc = acc.div(&local);
    }
    Ok(acc.with_prec(prec))
}

/// The same product assembled from the right-hand constituents; with
/// `omit_abelian` the one-dimensional summand is dropped.
pub fn rhs_euler_product(
    phi: &CMForm,
    n: u32,
    s: &Cx,
    prime_bound: u64,
    mode: BadPrimeMode,
    omit_abelian: bool,
) -> Result<Cx> {
    let prec = s.prec();
    let wp = prec + 32;
    let mut acc = Cx::one(wp);
    let s = s.with_prec(wp);
    for p in primes_up_to(prime_bound as usize) {
        if phi.form.level() % p == 0 {
            if mode == BadPrimeMode::Naive {
                // beta = 0: only alpha^n survives, which is the a = 0 constituent's alpha
                let ap = phi.form.a(p as usize)?.clone();
                let root = Cx::from_rational(wp, &ap.pow(n));
                let x = Cx::real_base_pow(&Float::with_val(wp, p), &(-&s));
                acc = acc.div(&(&Cx::one(wp) - &(&root * &x)));
            }
            continue;
        }
        let factors = rhs_factors(phi, n, p)?;
        let count = factors.len();
        for (idx, f) in factors.into_iter().enumerate() {
            if omit_abelian && n % 2 == 0 && idx == count - 1 {
                continue;
            }
            acc = acc.div(&f.evaluate(&s));
        }
    }
    Ok(acc.with_prec(prec))
}

pub fn gaussian_cm_example() -> Result<HeckeCharacter> {
    let field = ImagQuadField::new(-4)?;
    HeckeCharacter::new(-4, 1, parse_conductor(&field, "(1+i)^3")?)
}

pub fn is_good_prime_for(phi: &CMForm, p: u64) -> bool {
    is_prime(p) && gcd(p, phi.form.level()) == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_arithmetic() {
        let k = ImagQuadField::new(-3).unwrap();
        let units = k.units();
        assert_eq!(units.len(), 6);
        assert_eq!(k.pow(&units[1], 6), QuadInt::new(1, 0));
        assert_eq!(k.pow(&units[1], 3), QuadInt::new(-1, 0));
        let pi = k.prime_above(7).unwrap();
        assert_eq!(k.norm(&pi), 7);
        assert!(ImagQuadField::new(-15).is_err());
    }

    #[test]
    fn level_32_example() {
        let chi = gaussian_cm_example().unwrap();
        assert_eq!(chi.level(), 32);
        let phi = cm_newform(&chi, 60).unwrap();
        let a = |n: usize| phi.form.a(n).unwrap().clone();
        assert_eq!(a(3), 0);
        assert_eq!(a(7), 0);
        assert_eq!(a(5), -2);
        assert_eq!(a(13), 6);
        assert!(phi.form.nebentypus().is_trivial());
        // the Gaussian unit normalization: -1+2i = 1 mod 2+2i
        let k = chi.field();
        assert!(k.congruent(&QuadInt::new(-1, 2), &QuadInt::new(1, 0), chi.conductor()));
    }

    #[test]
    fn ill_defined_configurations() {
        let k = ImagQuadField::new(-4).unwrap();
        // units {+-1} are 1 mod 2, so odd u is ill-defined
        assert!(matches!(
            HeckeCharacter::new(-4, 1, parse_conductor(&k, "(2)").unwrap()),
            Err(Error::IllDefined(_))
        ));
        assert!(HeckeCharacter::new(-4, 2, parse_conductor(&k, "(2)").unwrap()).is_ok());
        // (O/5)^x has 16 elements, far beyond the four units
        assert!(matches!(
            HeckeCharacter::new(-4, 4, QuadInt::new(5, 0)),
            Err(Error::IllDefined(_))
        ));
        // 2 + i is not conjugation stable
        assert!(matches!(
            HeckeCharacter::new(-4, 4, QuadInt::new(2, 1)),
            Err(Error::IllDefined(_))
        ));
        assert!(HeckeCharacter::new(-4, 0, QuadInt::new(1, 0)).is_err());
    }

    #[test]
    fn summands() {
        assert_eq!(isobaric_factors(1), vec![Summand::Induced { chi: 1, chi_conj: 0 }]);
        assert_eq!(
            isobaric_factors(2),
            vec![Summand::Induced { chi: 2, chi_conj: 0 }, Summand::Abelian { power: 1 }]
        );
        assert_eq!(
            isobaric_factors(3),
            vec![
                Summand::Induced { chi: 3, chi_conj: 0 },
                Summand::Induced { chi: 2, chi_conj: 1 }
            ]
        );
        for n in 1..12 {
            let d: u32 = isobaric_factors(n).iter().map(|s| s.degree()).sum();
            assert_eq!(d, n + 1);
        }
        assert_eq!(period_relation_exponents(3).c_minus_exponent, 3);
    }

    #[test]
    fn decomposition_small_n() {
        let chi = gaussian_cm_example().unwrap();
        let phi = cm_newform(&chi, 60).unwrap();
        for n in 1..=3 {
            let r = verify_decomposition(&phi, n, 60).unwrap();
            assert!(r.passed(), "n={n}: {:?}", r.failures());
            assert_eq!(r.skipped, vec![2]);
        }
    }
}
