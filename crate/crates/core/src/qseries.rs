//! Exact q-expansions: eta powers, the level-one eigenforms of weight 12,
//! 16 and 18, newform ingestion from JSON, and Hecke validation.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use rug::ops::Pow;
use rug::{Integer, Rational};
use serde_json::{Map, Number, Value};

use crate::arith::smallest_prime_factors;
use crate::characters::{make_character, trivial_character, DirichletCharacter};
use crate::cyclo::Cyclo;
use crate::error::{Error, Result};

/// Largest truncation length accepted unless the caller raises it.
pub const DEFAULT_COEFFICIENT_BUDGET: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerSeries {
    coeffs: Vec<Integer>,
}

impl PowerSeries {
    pub fn new(coeffs: Vec<Integer>) -> Self {
        assert!(!coeffs.is_empty(), "truncation length must be positive");
        PowerSeries { coeffs }
    }

    pub fn one(length: usize) -> Self {
        let mut coeffs = vec![Integer::new(); length];
        coeffs[0] = Integer::from(1);
        PowerSeries::new(coeffs)
    }

    pub fn truncation_length(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coefficients(&self) -> &[Integer] {
        &self.coeffs
    }

    pub fn into_coefficients(self) -> Vec<Integer> {
        self.coeffs
    }

    pub fn coefficient(&self, i: usize) -> &Integer {
        &self.coeffs[i]
    }

    /// Product truncated to the shorter of the two lengths.
    pub fn mul(&self, other: &PowerSeries) -> PowerSeries {
        let len = self.coeffs.len().min(other.coeffs.len());
        if std::ptr::eq(self, other) {
            return PowerSeries::new(square_truncated(&self.coeffs[..len]));
        }
        let (a, b) = (&self.coeffs[..len], &other.coeffs[..len]);
        // put the sparser factor in the outer loop
        let nnz = |s: &[Integer]| s.iter().filter(|c| **c != 0).count();
        let (outer, inner) = if nnz(a) <= nnz(b) { (a, b) } else { (b, a) };
        let mut out = vec![Integer::new(); len];
        for (i, x) in outer.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in inner[..len - i].iter().enumerate() {
                if *y != 0 {
                    out[i + j] += x * y;
                }
            }
        }
        PowerSeries::new(out)
    }

    pub fn square(&self) -> PowerSeries {
        PowerSeries::new(square_truncated(&self.coeffs))
    }
}

fn square_truncated(a: &[Integer]) -> Vec<Integer> {
    let len = a.len();
    let mut out = vec![Integer::new(); len];
    for i in 0..len {
        if a[i] == 0 {
            continue;
        }
        for j in i + 1..len - i {
            if a[j] != 0 {
                out[i + j] += &a[i] * &a[j];
            }
        }
    }
    for c in out.iter_mut() {
        *c <<= 1;
    }
    for i in 0..len.div_ceil(2) {
        if 2 * i < len {
            out[2 * i] += a[i].clone().square();
        }
    }
    out
}

/// prod_{n>=1} (1 - q^n) from the pentagonal number theorem.
fn eta_series(length: usize) -> PowerSeries {
    let mut coeffs = vec![Integer::new(); length];
    coeffs[0] = Integer::from(1);
    let mut k: usize = 1;
    loop {
        let sign = if k % 2 == 1 { -1 } else { 1 };
        let g1 = k * (3 * k - 1) / 2;
        let g2 = k * (3 * k + 1) / 2;
        if g1 >= length {
            break;
        }
        coeffs[g1] = Integer::from(sign);
        if g2 < length {
            coeffs[g2] = Integer::from(sign);
        }
        k += 1;
    }
    PowerSeries::new(coeffs)
}

pub fn eta_power(exponent: u32, length: usize) -> Result<PowerSeries> {
    eta_power_budgeted(exponent, length, DEFAULT_COEFFICIENT_BUDGET)
}

pub fn eta_power_budgeted(exponent: u32, length: usize, budget: usize) -> Result<PowerSeries> {
    if exponent == 0 || length == 0 {
        return Err(Error::Domain("exponent and length must be positive".into()));
    }
    if length > budget {
        return Err(Error::Resource(format!(
            "truncation length {length} exceeds the coefficient budget {budget}"
        )));
    }
    let mut base = eta_series(length);
    let mut acc: Option<PowerSeries> = None;
    let mut e = exponent;
    while e > 0 {
        if e & 1 == 1 {
            acc = Some(match acc {
                None => base.clone(),
                Some(a) => a.mul(&base),
            });
        }
        e >>= 1;
        if e > 0 {
            base = base.square();
        }
    }
    Ok(acc.expect("exponent is positive"))
}

/// sum_{d | n} d^power for n < length.
fn divisor_power_sums(power: u32, length: usize) -> Vec<Integer> {
    let mut out = vec![Integer::new(); length];
    for d in 1..length {
        let dp = Integer::from(d).pow(power);
        let mut m = d;
        while m < length {
            out[m] += &dp;
            m += d;
        }
    }
    out
}

fn eisenstein(length: usize, power: u32, scale: i64) -> PowerSeries {
    let mut coeffs = divisor_power_sums(power, length);
    for c in coeffs.iter_mut() {
        *c *= scale;
    }
    coeffs[0] = Integer::from(1);
    PowerSeries::new(coeffs)
}

#[derive(Clone)]
pub struct Newform {
    weight: u32,
    level: u64,
    nebentypus: DirichletCharacter,
    // a_1, a_2, ... stored from index 0
    coefficients: Vec<Rational>,
    validated: bool,
}

impl PartialEq for Newform {
    fn eq(&self, other: &Self) -> bool {
        self.weight == other.weight
            && self.level == other.level
            && self.nebentypus == other.nebentypus
            && self.coefficients == other.coefficients
    }
}

impl fmt::Debug for Newform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Newform")
            .field("weight", &self.weight)
            .field("level", &self.level)
            .field("nebentypus", &self.nebentypus)
            .field("length", &self.coefficients.len())
            .field("validated", &self.validated)
            .finish()
    }
}

impl Newform {
    pub fn new(
        weight: u32,
        level: u64,
        nebentypus: DirichletCharacter,
        coefficients: Vec<Rational>,
    ) -> Result<Newform> {
        if weight == 0 || level == 0 {
            return Err(Error::Domain("weight and level must be positive".into()));
        }
        if coefficients.is_empty() {
            return Err(Error::Domain("coefficient list is empty".into()));
        }
        if coefficients[0] != 1 {
            return Err(Error::Normalization(coefficients[0].to_string()));
        }
        if level % nebentypus.modulus() != 0 {
            return Err(Error::Consistency(format!(
                "character modulus {} does not divide level {}",
                nebentypus.modulus(),
                level
            )));
        }
        Ok(Newform {
            weight,
            level,
            nebentypus,
            coefficients,
            validated: false,
        })
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn nebentypus(&self) -> &DirichletCharacter {
        &self.nebentypus
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn is_validated(&self) -> bool {
        self.validated
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coefficients
    }

    /// a_n for 1 <= n <= len.
    pub fn a(&self, n: usize) -> Result<&Rational> {
        if n == 0 || n > self.coefficients.len() {
            return Err(Error::Range {
                needed: n,
                available: self.coefficients.len(),
            });
        }
        Ok(&self.coefficients[n - 1])
    }

    pub fn truncated(&self, length: usize) -> Newform {
        let mut f = self.clone();
        f.coefficients.truncate(length.max(1));
        f
    }

    /// Mutable access for fault-injection experiments; clears validation.
    pub fn set_coefficient(&mut self, n: usize, value: Rational) -> Result<()> {
        let available = self.coefficients.len();
        let slot = self
            .coefficients
            .get_mut(n.wrapping_sub(1))
            .ok_or(Error::Range { needed: n, available })?;
        *slot = value;
        self.validated = false;
        Ok(())
    }

    /// Run Hecke validation and record the outcome.
    pub fn validate(&mut self) -> HeckeReport {
        let report = hecke_validate(self);
        self.validated = report.violations.is_empty();
        report
    }

    pub(crate) fn mark_validated(&mut self) {
        self.validated = true;
    }
}

fn integer_form(weight: u32, coeffs: Vec<Integer>) -> Newform {
    Newform {
        weight,
        level: 1,
        nebentypus: trivial_character(),
        coefficients: coeffs.into_iter().map(Rational::from).collect(),
        validated: false,
    }
}

fn builtin_cache() -> &'static Mutex<HashMap<&'static str, Newform>> {
    static CACHE: OnceLock<Mutex<HashMap<&'static str, Newform>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached(name: &'static str, length: usize, build: impl Fn(usize) -> Result<Newform>) -> Result<Newform> {
    if let Some(f) = builtin_cache().lock().unwrap().get(name) {
        if f.len() >= length {
            return Ok(f.truncated(length));
        }
    }
    let f = build(length)?;
    builtin_cache().lock().unwrap().insert(name, f.clone());
    Ok(f)
}

/// Ramanujan's Delta = q prod (1 - q^n)^24, coefficients tau(1..=length).
pub fn delta_newform(length: usize) -> Result<Newform> {
    cached("delta", length, |len| {
        let eta24 = eta_power(24, len)?;
        Ok(integer_form(12, eta24.into_coefficients()))
    })
}

/// The weight-16 level-1 eigenform Delta * E_4.
pub fn e4delta_newform(length: usize) -> Result<Newform> {
    cached("e4delta", length, |len| {
        let eta24 = eta_power(24, len)?;
        let prod = eta24.mul(&eisenstein(len, 3, 240));
        Ok(integer_form(16, prod.into_coefficients()))
    })
}

/// The weight-18 level-1 eigenform Delta * E_6.
pub fn e6delta_newform(length: usize) -> Result<Newform> {
    cached("e6delta", length, |len| {
        let eta24 = eta_power(24, len)?;
        let prod = eta24.mul(&eisenstein(len, 5, -504));
        Ok(integer_form(18, prod.into_coefficients()))
    })
}

pub fn builtin_form(name: &str, length: usize) -> Result<Newform> {
    let mut f = match name {
        "delta" => delta_newform(length)?,
        "e4delta" => e4delta_newform(length)?,
        "e6delta" => e6delta_newform(length)?,
        other => return Err(Error::Domain(format!("unknown built-in form {other:?}"))),
    };
    // eigenforms by dimension count; validation is cheap next to the expansion
    f.validate();
    Ok(f)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    /// a_{p^{r+1}} = a_p a_{p^r} - omega(p) p^{k-1} a_{p^{r-1}} fails.
    Recurrence { p: u64, r: u32 },
    /// a_{mn} = a_m a_n fails for coprime m (a prime power) and n.
    Multiplicative { m: u64, n: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct HeckeViolation {
    pub index: u64,
    pub kind: ViolationKind,
    pub expected: String,
    pub found: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HeckeReport {
    pub checked: usize,
    pub violations: Vec<HeckeViolation>,
}

impl HeckeReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Regenerate a_n from the stored a_p through the Hecke relations and
/// report every stored value that disagrees.
///
/// Each index is compared against the value predicted from the prime
/// coefficients alone, so a single corrupted entry produces a single
/// violation rather than a cascade through its multiples.
pub fn hecke_validate(f: &Newform) -> HeckeReport {
    let len = f.len();
    let spf = smallest_prime_factors(len);
    let k1 = f.weight() - 1;
    let mut regen: Vec<Cyclo> = Vec::with_capacity(len + 1);
    regen.push(Cyclo::zero(1));
    regen.push(Cyclo::one());
    let mut violations = Vec::new();
    let mut checked = 0;
    for i in 2..=len {
        let p = spf[i] as usize;
        let mut pe = p;
        let mut e = 1u32;
        while (i / pe) % p == 0 {
            pe *= p;
            e += 1;
        }
        let stored = Cyclo::from_rational(f.coefficients[i - 1].clone());
        let (expected, kind) = if pe != i {
            let m = i / pe;
            (
                regen[pe].mul(&regen[m]),
                Some(ViolationKind::Multiplicative { m: pe as u64, n: m as u64 }),
            )
        } else if e == 1 {
            (stored.clone(), None)
        } else {
            let ap = &regen[p];
            let chi = f.nebentypus().value(p as i64);
            let pk = Rational::from(Integer::from(p).pow(k1));
            let t = chi.scale(&pk).mul(&regen[pe / p / p]);
            (
                ap.mul(&regen[pe / p]).sub(&t),
                Some(ViolationKind::Recurrence { p: p as u64, r: e - 1 }),
            )
        };
        if let Some(kind) = kind {
            checked += 1;
            if expected != stored {
                violations.push(HeckeViolation {
                    index: i as u64,
                    kind,
                    expected: expected.to_string(),
                    found: stored.to_string(),
                });
            }
        }
        regen.push(expected);
    }
    HeckeReport { checked, violations }
}

fn parse_err(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse {
        location: location.into(),
        message: message.into(),
    }
}

fn json_integer(v: &Value, location: &str) -> Result<Integer> {
    match v {
        Value::Number(n) => Integer::from_str_radix(&n.to_string(), 10)
            .map_err(|_| parse_err(location, format!("expected an integer, found {n}"))),
        _ => Err(parse_err(location, "expected an integer")),
    }
}

fn json_u64(v: &Value, location: &str) -> Result<u64> {
    json_integer(v, location)?
        .to_u64()
        .ok_or_else(|| parse_err(location, "expected a nonnegative machine-size integer"))
}

fn json_rational(v: &Value, location: &str) -> Result<Rational> {
    match v {
        Value::Number(_) => Ok(Rational::from(json_integer(v, location)?)),
        Value::String(s) => {
            let parsed = Rational::parse(s.trim())
                .map_err(|_| parse_err(location, format!("expected \"p/q\", found {s:?}")))?;
            Ok(Rational::from(parsed))
        }
        _ => Err(parse_err(location, "expected an integer or a \"p/q\" string")),
    }
}

pub fn load_newform(source: &[u8]) -> Result<Newform> {
    let doc: Value = serde_json::from_slice(source)
        .map_err(|e| parse_err(format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
    let obj = doc
        .as_object()
        .ok_or_else(|| parse_err("$", "expected a JSON object"))?;
    let field = |name: &str| {
        obj.get(name)
            .ok_or_else(|| parse_err(format!("$.{name}"), "missing field"))
    };
    let weight = json_u64(field("weight")?, "$.weight")?;
    let level = json_u64(field("level")?, "$.level")?;
    if weight == 0 || weight > u32::MAX as u64 {
        return Err(parse_err("$.weight", "weight must be a positive integer"));
    }
    if level == 0 {
        return Err(parse_err("$.level", "level must be positive"));
    }
    let nebentypus = match obj.get("nebentypus") {
        None | Some(Value::Null) => trivial_character(),
        Some(Value::Object(n)) => {
            let modulus = json_u64(
                n.get("modulus")
                    .ok_or_else(|| parse_err("$.nebentypus.modulus", "missing field"))?,
                "$.nebentypus.modulus",
            )?;
            if modulus == 0 {
                return Err(parse_err("$.nebentypus.modulus", "modulus must be positive"));
            }
            if level % modulus != 0 {
                return Err(Error::Consistency(format!(
                    "character modulus {modulus} does not divide level {level}"
                )));
            }
            let exps = match n.get("values_on_generators") {
                None => Vec::new(),
                Some(Value::Array(a)) => a
                    .iter()
                    .enumerate()
                    .map(|(i, v)| {
                        let loc = format!("$.nebentypus.values_on_generators[{i}]");
                        json_integer(v, &loc)?
                            .to_i64()
                            .ok_or_else(|| parse_err(loc, "exponent out of range"))
                    })
                    .collect::<Result<_>>()?,
                Some(_) => {
                    return Err(parse_err("$.nebentypus.values_on_generators", "expected an array"))
                }
            };
            if exps.is_empty() {
                // omitted values mean the trivial character of that modulus
                let gens = crate::characters::unit_generators(modulus).len();
                make_character(modulus, &vec![0; gens])?
            } else {
                make_character(modulus, &exps)?
            }
        }
        Some(_) => return Err(parse_err("$.nebentypus", "expected an object")),
    };
    let coeffs = match field("coefficients")? {
        Value::Array(a) if !a.is_empty() => a
            .iter()
            .enumerate()
            .map(|(i, v)| json_rational(v, &format!("$.coefficients[{i}]")))
            .collect::<Result<Vec<_>>>()?,
        Value::Array(_) => return Err(parse_err("$.coefficients", "coefficient list is empty")),
        _ => return Err(parse_err("$.coefficients", "expected an array")),
    };
    Newform::new(weight as u32, level, nebentypus, coeffs)
}

fn number(text: String) -> Value {
    Value::Number(text.parse::<Number>().expect("decimal integer literal"))
}

pub fn newform_to_json(f: &Newform) -> String {
    let mut obj = Map::new();
    obj.insert("weight".into(), number(f.weight.to_string()));
    obj.insert("level".into(), number(f.level.to_string()));
    if f.nebentypus.modulus() > 1 {
        let spec = f.nebentypus.spec();
        let mut n = Map::new();
        n.insert("modulus".into(), number(spec.modulus.to_string()));
        n.insert(
            "values_on_generators".into(),
            Value::Array(spec.values_on_generators.iter().map(|v| number(v.to_string())).collect()),
        );
        obj.insert("nebentypus".into(), Value::Object(n));
    }
    let coeffs = f
        .coefficients
        .iter()
        .map(|c| {
            if *c.denom() == 1 {
                number(c.numer().to_string())
            } else {
                Value::String(c.to_string())
            }
        })
        .collect();
    obj.insert("coefficients".into(), Value::Array(coeffs));
    serde_json::to_string(&Value::Object(obj)).expect("values serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(s: &PowerSeries) -> Vec<i64> {
        s.coefficients().iter().map(|c| c.to_i64().unwrap()).collect()
    }

    #[test]
    fn eta_small_cases() {
        assert_eq!(ints(&eta_power(1, 6).unwrap()), vec![1, -1, -1, 0, 0, 1]);
        assert_eq!(ints(&eta_power(24, 3).unwrap()), vec![1, -24, 252]);
        for e in 1..30 {
            assert_eq!(ints(&eta_power(e, 1).unwrap()), vec![1]);
        }
        assert!(matches!(
            eta_power_budgeted(24, 500, 100),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn delta_leading_coefficients() {
        let d = delta_newform(6).unwrap();
        let a: Vec<i64> = d.coefficients().iter().map(|c| c.numer().to_i64().unwrap()).collect();
        assert_eq!(a, vec![1, -24, 252, -1472, 4830, -6048]);
    }

    #[test]
    fn corrupted_coefficients_are_localized() {
        let mut d = delta_newform(40).unwrap();
        assert!(d.validate().passed());
        d.set_coefficient(4, Rational::new()).unwrap();
        let r = hecke_validate(&d);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].kind, ViolationKind::Recurrence { p: 2, r: 1 });

        let mut d = delta_newform(40).unwrap();
        d.set_coefficient(6, Rational::from(1)).unwrap();
        let r = hecke_validate(&d);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].kind, ViolationKind::Multiplicative { m: 2, n: 3 });
    }

    #[test]
    fn json_errors() {
        assert!(matches!(
            load_newform(br#"{"weight":2,"level":1,"coefficients":[2,3]}"#),
            Err(Error::Normalization(_))
        ));
        assert!(matches!(
            load_newform(br#"{"level":1,"coefficients":[1]}"#),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            load_newform(br#"{"weight":2,"level":6,"nebentypus":{"modulus":5,"values_on_generators":[2]},"coefficients":[1]}"#),
            Err(Error::Consistency(_))
        ));
        match load_newform(b"{\"weight\": 2,\n \"level\": }") {
            Err(Error::Parse { location, .. }) => assert!(location.starts_with("line 2")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rational_coefficients_round_trip() {
        let doc = br#"{"weight":2,"level":11,"coefficients":[1,"-2/3",-1,"12345678901234567890123"]}"#;
        let f = load_newform(doc).unwrap();
        assert_eq!(*f.a(2).unwrap(), Rational::from((-2, 3)));
        assert!(!f.is_validated());
        let again = load_newform(newform_to_json(&f).as_bytes()).unwrap();
        assert_eq!(f, again);
    }
}
