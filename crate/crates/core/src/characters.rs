//! Dirichlet characters with exact root-of-unity values, Gauss sums, and
//! the determinant-period bookkeeping for a nebentypus.
//!
//! Unit-group generators are taken in CRT order by prime. The 2-part
//! contributes -1 (mod 4 and higher) and 5 (mod 8 and higher); an odd prime
//! power contributes its smallest primitive root. An exponent v_i on a
//! generator g_i of order o_i means chi(g_i) = exp(2 pi i v_i / o_i).

use std::fmt;

use rug::{Float, Integer};
use serde::{Deserialize, Serialize};

use crate::arith::{crt, divisors, factor, gcd, lcm, primitive_root_prime_power};
use crate::cyclo::Cyclo;
use crate::error::{Error, Result};
use crate::numeric::{two_pi, Cx};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitGenerator {
    /// Residue modulo the full modulus (1 on the other CRT components).
    pub residue: u64,
    pub order: u64,
    pub prime: u64,
}

/// Canonical generators of (Z/m)^x.
pub fn unit_generators(modulus: u64) -> Vec<UnitGenerator> {
    let parts: Vec<(u64, u32)> = factor(modulus);
    let moduli: Vec<u64> = parts.iter().map(|&(p, e)| p.pow(e)).collect();
    let lift = |idx: usize, g: u64| -> u64 {
        let system: Vec<(u64, u64)> = moduli
            .iter()
            .enumerate()
            .map(|(j, &m)| if j == idx { (g % m, m) } else { (1 % m, m) })
            .collect();
        crt(&system)
    };
    let mut out = Vec::new();
    for (idx, &(p, e)) in parts.iter().enumerate() {
        let pe = moduli[idx];
        if p == 2 {
            if e >= 2 {
                out.push(UnitGenerator { residue: lift(idx, pe - 1), order: 2, prime: 2 });
            }
            if e >= 3 {
                out.push(UnitGenerator {
                    residue: lift(idx, 5),
                    order: 1 << (e - 2),
                    prime: 2,
                });
            }
        } else {
            let g = primitive_root_prime_power(p, e);
            out.push(UnitGenerator {
                residue: lift(idx, g),
                order: pe / p * (p - 1),
                prime: p,
            });
        }
    }
    out
}

#[derive(Clone)]
pub struct DirichletCharacter {
    modulus: u64,
    generators: Vec<UnitGenerator>,
    exponents: Vec<u64>,
    order: u64,
    // exponent of zeta_order at each residue, None off the units
    table: Vec<Option<u64>>,
    conductor: u64,
    parity: i8,
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.modulus == other.modulus && self.exponents == other.exponents
    }
}

impl fmt::Debug for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "chi_{}{:?}", self.modulus, self.exponents)
    }
}

impl fmt::Display for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.exponents.iter().map(|e| e.to_string()).collect();
        write!(f, "{}:[{}]", self.modulus, v.join(","))
    }
}

/// The {modulus, values_on_generators} wire form of a character.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharacterSpec {
    pub modulus: u64,
    #[serde(default)]
    pub values_on_generators: Vec<i64>,
}

pub fn make_character(modulus: u64, generator_exponents: &[i64]) -> Result<DirichletCharacter> {
    if modulus == 0 {
        return Err(Error::Domain("modulus must be positive".into()));
    }
    let generators = unit_generators(modulus);
    if generators.len() != generator_exponents.len() {
        return Err(Error::Arity {
            expected: generators.len(),
            got: generator_exponents.len(),
        });
    }
    let exponents: Vec<u64> = generators
        .iter()
        .zip(generator_exponents)
        .map(|(g, &v)| v.rem_euclid(g.order as i64) as u64)
        .collect();
    let order = generators
        .iter()
        .zip(&exponents)
        .fold(1u64, |acc, (g, &v)| lcm(acc, g.order / gcd(g.order, v)));

    let mut table = vec![None; modulus as usize];
    // walk every tuple of generator powers
    let mut idx = vec![0u64; generators.len()];
    loop {
        let mut residue = 1 % modulus;
        let mut e = 0u64;
        for (i, g) in generators.iter().enumerate() {
            residue = (residue as u128 * crate::arith::pow_mod(g.residue, idx[i], modulus) as u128
                % modulus as u128) as u64;
            // v_i / o_i = step / order with step integral
            let step = exponents[i] * order / g.order;
            e = (e + step * idx[i]) % order;
        }
        table[residue as usize] = Some(e);
        let mut pos = 0;
        loop {
            if pos == generators.len() {
                break;
            }
            idx[pos] += 1;
            if idx[pos] < generators[pos].order {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
        if pos == generators.len() {
            break;
        }
    }

    let mut chi = DirichletCharacter {
        modulus,
        generators,
        exponents,
        order,
        table,
        conductor: modulus,
        parity: 1,
    };
    chi.parity = match chi.exponent_at_u(modulus - 1) {
        Some(0) | None => 1,
        Some(_) => -1,
    };
    chi.conductor = chi.compute_conductor();
    Ok(chi)
}

pub fn make_character_from_spec(spec: &CharacterSpec) -> Result<DirichletCharacter> {
    make_character(spec.modulus, &spec.values_on_generators)
}

pub fn trivial_character() -> DirichletCharacter {
    make_character(1, &[]).expect("modulus 1 has no generators")
}

/// Build a character mod `modulus` from a function giving the exponent of
/// zeta_order at each unit. The function must be a homomorphism.
pub fn character_from_values(
    modulus: u64,
    order: u64,
    value: impl Fn(u64) -> u64,
) -> Result<DirichletCharacter> {
    let gens = unit_generators(modulus);
    let mut exps = Vec::with_capacity(gens.len());
    for g in &gens {
        let e = value(g.residue) % order;
        // chi(g) = zeta_order^e = zeta_{g.order}^v
        if (e * g.order) % order != 0 {
            return Err(Error::Domain(format!(
                "value at generator {} has order not dividing {}",
                g.residue, g.order
            )));
        }
        exps.push((e * g.order / order) as i64);
    }
    let chi = make_character(modulus, &exps)?;
    for a in 1..modulus.max(2) {
        if gcd(a, modulus) != 1 {
            continue;
        }
        let want = value(a) % order;
        let got = chi.exponent_at_u(a).unwrap() * order / chi.order;
        if chi.order > order || got % order != want {
            return Err(Error::Domain(format!("values are not multiplicative at {a}")));
        }
    }
    Ok(chi)
}

/// Parse "5:[2]" or "5:2" or "1:[]".
pub fn parse_character(text: &str) -> Result<DirichletCharacter> {
    let bad = |m: &str| Error::Parse {
        location: text.to_string(),
        message: m.to_string(),
    };
    let (m, rest) = text.split_once(':').ok_or_else(|| bad("expected modulus:[exponents]"))?;
    let modulus: u64 = m.trim().parse().map_err(|_| bad("bad modulus"))?;
    let inner = rest.trim().trim_start_matches('[').trim_end_matches(']');
    let exps: Vec<i64> = if inner.trim().is_empty() {
        Vec::new()
    } else {
        inner
            .split(',')
            .map(|t| t.trim().parse::<i64>().map_err(|_| bad("bad exponent")))
            .collect::<Result<_>>()?
    };
    make_character(modulus, &exps)
}

impl DirichletCharacter {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn parity(&self) -> i8 {
        self.parity
    }

    pub fn is_odd(&self) -> bool {
        self.parity < 0
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.modulus
    }

    pub fn is_real(&self) -> bool {
        self.order <= 2
    }

    pub fn generators(&self) -> &[UnitGenerator] {
        &self.generators
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn spec(&self) -> CharacterSpec {
        CharacterSpec {
            modulus: self.modulus,
            values_on_generators: self.exponents.iter().map(|&e| e as i64).collect(),
        }
    }

    /// chi(a) = zeta_order^e, or None when gcd(a, modulus) > 1.
    pub fn exponent_at(&self, a: i64) -> Option<u64> {
        let r = a.rem_euclid(self.modulus as i64) as usize;
        self.table[r]
    }

    pub fn exponent_at_u(&self, a: u64) -> Option<u64> {
        self.table[(a % self.modulus) as usize]
    }

    pub fn value(&self, a: i64) -> Cyclo {
        match self.exponent_at(a) {
            Some(e) => Cyclo::root_of_unity(self.order, e),
            None => Cyclo::zero(1),
        }
    }

    pub fn value_complex(&self, a: i64, prec: u32) -> Cx {
        match self.exponent_at(a) {
            Some(e) => {
                let angle = two_pi(prec) * e as u32 / Integer::from(self.order);
                Cx::from_polar_unit(&angle)
            }
            None => Cx::zero(prec),
        }
    }

    /// Real value (+1, -1, 0) for characters of order at most 2.
    pub fn real_value(&self, a: i64) -> Option<i64> {
        if !self.is_real() {
            return None;
        }
        Some(match self.exponent_at(a) {
            None => 0,
            Some(0) => 1,
            Some(_) => -1,
        })
    }

    pub fn conj(&self) -> DirichletCharacter {
        let exps: Vec<i64> = self
            .generators
            .iter()
            .zip(&self.exponents)
            .map(|(g, &v)| ((g.order - v) % g.order) as i64)
            .collect();
        make_character(self.modulus, &exps).expect("same generators")
    }

    pub fn pow(&self, e: u64) -> DirichletCharacter {
        let exps: Vec<i64> = self
            .generators
            .iter()
            .zip(&self.exponents)
            .map(|(g, &v)| ((v as u128 * e as u128) % g.order as u128) as i64)
            .collect();
        make_character(self.modulus, &exps).expect("same generators")
    }

    /// The same character viewed at a multiple of its modulus.
    pub fn induce(&self, modulus: u64) -> Result<DirichletCharacter> {
        if modulus % self.modulus != 0 {
            return Err(Error::Consistency(format!(
                "{} is not a multiple of {}",
                modulus, self.modulus
            )));
        }
        let src = self.clone();
        let ord = self.order;
        character_from_values(modulus, ord, move |a| src.exponent_at_u(a).unwrap_or(0))
    }

    /// Product of two characters at the lcm of their moduli.
    pub fn mul(&self, other: &DirichletCharacter) -> DirichletCharacter {
        let m = lcm(self.modulus, other.modulus);
        let ord = lcm(self.order, other.order);
        let (a, b) = (self.clone(), other.clone());
        let (sa, sb) = (ord / a.order, ord / b.order);
        character_from_values(m, ord, move |x| {
            a.exponent_at_u(x).unwrap_or(0) * sa + b.exponent_at_u(x).unwrap_or(0) * sb
        })
        .expect("product of characters is a character")
    }

    fn compute_conductor(&self) -> u64 {
        for d in divisors(self.modulus) {
            let trivial_on_kernel = (1..self.modulus.max(2))
                .filter(|&a| gcd(a, self.modulus) == 1 && a % d == 1 % d)
                .all(|a| self.exponent_at_u(a) == Some(0));
            if trivial_on_kernel {
                return d;
            }
        }
        self.modulus
    }

    /// The primitive character inducing this one.
    pub fn primitive(&self) -> DirichletCharacter {
        let c = self.conductor;
        if c == self.modulus {
            return self.clone();
        }
        let src = self.clone();
        let m = self.modulus;
        character_from_values(c, self.order, move |b| {
            // any unit mod m reducing to b
            let mut a = b % c;
            while gcd(a, m) != 1 {
                a += c;
            }
            src.exponent_at_u(a).unwrap()
        })
        .expect("conductor computation guarantees a well-defined primitive character")
    }
}

#[derive(Clone, Debug)]
pub struct GaussSumValue {
    pub value: Cx,
    /// The primitive character actually summed.
    pub character: DirichletCharacter,
    /// Exact element of Q(zeta_lcm(order, conductor)) for small fields.
    pub exact: Option<Cyclo>,
}

/// g(chi) = sum_{u mod c} chi0(u) exp(-2 pi i u / c), c the conductor.
pub fn gauss_sum(chi: &DirichletCharacter, prec: u32) -> GaussSumValue {
    let chi0 = chi.primitive();
    let c = chi0.modulus();
    let wp = prec + 16;
    let tp = two_pi(wp);
    let mut acc = Cx::zero(wp);
    for u in 0..c {
        if let Some(e) = chi0.exponent_at_u(u) {
            // chi0(u) e^{-2 pi i u/c} = exp(2 pi i (e/ord - u/c))
            let num = Integer::from(e) * c - Integer::from(u) * chi0.order();
            let angle = Float::with_val(wp, &tp * &num) / (chi0.order() * c);
            acc = &acc + &Cx::from_polar_unit(&angle);
        }
    }
    let field = lcm(chi0.order(), c);
    let exact = if crate::arith::euler_phi(field) <= 256 {
        let mut z = Cyclo::zero(1);
        for u in 0..c {
            if let Some(e) = chi0.exponent_at_u(u) {
                let k = (e * (field / chi0.order()) + field - (u * (field / c)) % field) % field;
                z = z.add(&Cyclo::root_of_unity(field, k));
            }
        }
        Some(z)
    } else {
        None
    };
    debug_assert!({
        let dev = Float::with_val(wp, acc.norm_sqr() - c).abs();
        dev < Float::with_val(wp, Float::i_exp(1, -(prec as i32) / 2))
    });
    GaussSumValue {
        value: acc.with_prec(prec),
        character: chi0,
        exact,
    }
}

/// The pair (power of 2 pi i, character whose Gauss sum appears) in
/// delta(omega) ~ (2 pi i)^{1-k} g(omega).
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaExponents {
    pub pow_2pii: i64,
    pub gauss_sum_of: DirichletCharacter,
}

pub fn delta_exponents(omega: &DirichletCharacter, k: u32) -> DeltaExponents {
    DeltaExponents {
        pow_2pii: 1 - k as i64,
        gauss_sum_of: omega.primitive(),
    }
}

/// Every primitive character of the given modulus.
pub fn primitive_characters(modulus: u64) -> Vec<DirichletCharacter> {
    all_characters(modulus)
        .into_iter()
        .filter(|c| c.is_primitive())
        .collect()
}

pub fn all_characters(modulus: u64) -> Vec<DirichletCharacter> {
    let gens = unit_generators(modulus);
    let total: u64 = gens.iter().map(|g| g.order).product();
    let mut out = Vec::with_capacity(total as usize);
    for mut t in 0..total {
        let mut exps = Vec::with_capacity(gens.len());
        for g in &gens {
            exps.push((t % g.order) as i64);
            t /= g.order;
        }
        out.push(make_character(modulus, &exps).expect("arity matches"));
    }
    out
}

/// The Kronecker symbol (d / n) as a character modulo |d| for a
/// fundamental discriminant d.
pub fn kronecker_character(d: i64) -> Result<DirichletCharacter> {
    let m = d.unsigned_abs();
    character_from_values(m, 2, move |a| if kronecker(d, a as i64) == -1 { 1 } else { 0 })
}

/// Kronecker symbol (a / n) for n > 0.
pub fn kronecker(a: i64, n: i64) -> i64 {
    assert!(n > 0);
    let mut n = n;
    let mut a = a;
    let mut result = 1;
    while n % 2 == 0 {
        n /= 2;
        match a.rem_euclid(8) {
            0 | 2 | 4 | 6 => return 0,
            3 | 5 => result = -result,
            _ => {}
        }
    }
    // Jacobi symbol (a / n), n odd
    a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_conventions() {
        let g = unit_generators(40);
        let residues: Vec<u64> = g.iter().map(|g| g.residue).collect();
        // -1 and 5 on the 8-part, 2 on the 5-part
        assert_eq!(residues.len(), 3);
        assert_eq!(residues[0] % 8, 7);
        assert_eq!(residues[0] % 5, 1);
        assert_eq!(residues[1] % 8, 5);
        assert_eq!(residues[2] % 8, 1);
        assert_eq!(residues[2] % 5, 2);
    }

    #[test]
    fn small_characters() {
        let t = make_character(1, &[]).unwrap();
        assert_eq!((t.conductor(), t.parity()), (1, 1));
        let q5 = make_character(5, &[2]).unwrap();
        assert_eq!(q5.order(), 2);
        assert_eq!(q5.parity(), 1);
        for a in 1..5 {
            assert_eq!(q5.real_value(a).unwrap(), kronecker(a, 5));
        }
        let m4 = make_character(4, &[1]).unwrap();
        assert_eq!((m4.conductor(), m4.parity()), (4, -1));
        assert!(matches!(
            make_character(5, &[]),
            Err(Error::Arity { expected: 1, got: 0 })
        ));
    }

    #[test]
    fn conductor_and_primitive() {
        // the quadratic character mod 5 induced to mod 15
        let q5 = make_character(5, &[2]).unwrap();
        let lifted = q5.induce(15).unwrap();
        assert_eq!(lifted.conductor(), 5);
        assert_eq!(lifted.primitive(), q5);
        // mod 8 character trivial on -1 with 5 -> -1 is primitive
        let c8 = make_character(8, &[0, 1]).unwrap();
        assert_eq!(c8.conductor(), 8);
        assert_eq!(c8.parity(), 1);
    }

    #[test]
    fn gauss_sum_small_cases() {
        let g = gauss_sum(&trivial_character(), 128);
        assert_eq!(g.value.to_f64s(), (1.0, 0.0));
        let g = gauss_sum(&make_character(5, &[2]).unwrap(), 128);
        assert!((g.value.re.to_f64() - 5f64.sqrt()).abs() < 1e-15);
        assert!(g.value.im.to_f64().abs() < 1e-15);
        // negative-phase convention: odd quadratic Gauss sums are -i sqrt(q)
        let g = gauss_sum(&make_character(4, &[1]).unwrap(), 128);
        assert!((g.value.im.to_f64() + 2.0).abs() < 1e-15);
        assert!(g.exact.unwrap() == Cyclo::root_of_unity(4, 3).scale(&2.into()));
    }

    #[test]
    fn kronecker_characters() {
        let k = kronecker_character(-4).unwrap();
        assert_eq!(k, make_character(4, &[1]).unwrap());
        let k = kronecker_character(-3).unwrap();
        assert_eq!(k.real_value(2), Some(-1));
        assert_eq!(k.parity(), -1);
        let k = kronecker_character(-8).unwrap();
        assert_eq!(k.real_value(3), Some(1));
        assert_eq!(k.real_value(5), Some(-1));
        assert_eq!(k.real_value(7), Some(-1));
    }

    #[test]
    fn delta_bookkeeping() {
        let d = delta_exponents(&trivial_character(), 12);
        assert_eq!(d.pow_2pii, -11);
        assert!(d.gauss_sum_of.is_trivial());
        let w = make_character(5, &[1]).unwrap();
        let d = delta_exponents(&w, 3);
        assert_eq!(d.pow_2pii, -2);
        assert_eq!(d.gauss_sum_of, w);
    }
}
