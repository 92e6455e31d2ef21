//! Rational recognition and the verification harnesses: period-cancelling
//! ratios of critical values, twisted-value relations and the value-level
//! check of the dihedral decomposition.
//!
//! A case passes when recognition succeeds at the working precision and
//! the confirmation precision with the same value, fails when both succeed
//! with different values, and is inconclusive otherwise.

use std::fmt;

use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use serde::Serialize;
use serde_json::json;

use crate::analytic::{
    evaluate_many, regular_integers, resolve_root_number, spec_for_builtin_symn, spec_for_symn,
    symn_gamma_factors, LFunctionSpec,
};
use crate::characters::{gauss_sum, trivial_character, DirichletCharacter};
use crate::critical::{cancelling_pairs, critical_set, ratio_exponent, RatioExponent};
use crate::dihedral::{lhs_euler_product, rhs_euler_product, CMForm};
use crate::error::{Error, Result};
use crate::numeric::{two_pi, Cx};
use crate::qseries::{builtin_form, Newform};
use crate::satake::BadPrimeMode;

pub const DEFAULT_PRECISION: u32 = 150;

/// Values are computed 16 bits beyond the nominal precision; ratios are
/// trusted to this many bits below it.
const ACCURACY_SLACK: u32 = 16;

pub fn default_height_cap() -> Integer {
    Integer::from(10u32).pow(30)
}

#[derive(Clone, Debug, Serialize)]
pub struct RecognitionResult {
    /// decimal rendering of the input
    pub input: String,
    #[serde(serialize_with = "ser_opt_rational")]
    pub recognized: Option<Rational>,
    #[serde(serialize_with = "ser_opt_integer")]
    pub height: Option<Integer>,
    pub stable: bool,
    pub precision: u32,
}

fn ser_opt_rational<S: serde::Serializer>(v: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(q) => s.serialize_some(&q.to_string()),
        None => s.serialize_none(),
    }
}

fn ser_opt_integer<S: serde::Serializer>(v: &Option<Integer>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(q) => s.serialize_some(&q.to_string()),
        None => s.serialize_none(),
    }
}

fn height_of(q: &Rational) -> Integer {
    let n = Integer::from(q.numer().abs_ref());
    n.max(q.denom().clone())
}

fn render(x: &Float) -> String {
    let digits = ((x.prec() as f64) * std::f64::consts::LOG10_2).floor().max(10.0) as usize;
    x.to_string_radix(10, Some(digits.min(60)))
}

/// Smallest-denominator continued-fraction convergent of `x` within
/// 2^{-prec/2} whose height is at most `max_height`.
pub fn recognize_rational(x: &Float, max_height: &Integer, prec: u32) -> RecognitionResult {
    let tol = Rational::from((1, Integer::from(1) << (prec / 2)));
    recognize_within(x, max_height, prec, tol)
}

/// As `recognize_rational`, additionally requiring agreement to
/// `accuracy_bits` relative to `scale`. Large-height rationals need this:
/// within a bare 2^{-prec/2} some earlier convergent usually fits the noise.
pub fn recognize_rational_strict(
    x: &Float,
    max_height: &Integer,
    prec: u32,
    accuracy_bits: u32,
    scale: &Float,
) -> RecognitionResult {
    recognize_within(x, max_height, prec, strict_tolerance(prec, accuracy_bits, scale))
}

fn strict_tolerance(prec: u32, accuracy_bits: u32, scale: &Float) -> Rational {
    let outer = Rational::from((1, Integer::from(1) << (prec / 2)));
    match scale.to_rational() {
        Some(s) => {
            let inner = Rational::from(s.abs_ref()) / (Integer::from(1) << accuracy_bits);
            if inner < outer {
                inner
            } else {
                outer
            }
        }
        None => outer,
    }
}

fn recognize_within(x: &Float, max_height: &Integer, prec: u32, tol: Rational) -> RecognitionResult {
    let mut out = RecognitionResult {
        input: render(x),
        recognized: None,
        height: None,
        stable: false,
        precision: prec,
    };
    let exact = match x.to_rational() {
        Some(q) => q,
        None => return out,
    };
    let outer = Rational::from((1, Integer::from(1) << (prec / 2)));
    let (mut h1, mut h2) = (Integer::from(1), Integer::from(0));
    let (mut k1, mut k2) = (Integer::from(0), Integer::from(1));
    let mut r = exact.clone();
    loop {
        let a = Integer::from(r.floor_ref());
        let h = Integer::from(&a * &h1) + &h2;
        let k = Integer::from(&a * &k1) + &k2;
        let cand = Rational::from((h.clone(), k.clone()));
        if height_of(&cand) > *max_height {
            break;
        }
        let err = Rational::from(&exact - &cand).abs();
        if err < tol {
            out.height = Some(height_of(&cand));
            out.recognized = Some(cand);
            break;
        }
        let frac = Rational::from(&r - &a);
        if frac == 0 {
            break;
        }
        r = frac.recip();
        h2 = std::mem::replace(&mut h1, h);
        k2 = std::mem::replace(&mut k1, k);
    }
    if let Some(q) = &out.recognized {
        let err = Rational::from(&exact - q).abs();
        assert!(err < outer, "recognized value violates its error bound");
    }
    out
}

/// Coordinates of z in Q(eta): basis {1} for order <= 2, {1, i} for
/// order 4 and {1, zeta_3} for order 3 or 6. With `accuracy_bits`, each
/// coordinate must also match to that many bits relative to |z|.
pub fn recognize_in_field(
    z: &Cx,
    order: u64,
    max_height: &Integer,
    prec: u32,
    accuracy_bits: Option<u32>,
) -> Result<Option<Vec<Rational>>> {
    let wp = z.prec();
    let scale = z.abs();
    let tol = match accuracy_bits {
        Some(bits) => strict_tolerance(prec, bits, &scale),
        None => Rational::from((1, Integer::from(1) << (prec / 2))),
    };
    let coords: Vec<Float> = match order {
        1 | 2 => {
            let im = Float::with_val(wp, z.im.abs_ref()).to_rational().unwrap_or_default();
            if im >= tol {
                return Ok(None);
            }
            vec![z.re.clone()]
        }
        4 => vec![z.re.clone(), z.im.clone()],
        3 | 6 => {
            // a + b zeta_3 = (a - b/2) + i b sqrt(3)/2
            let sqrt3 = Float::with_val(wp, 3).sqrt();
            let b = Float::with_val(wp, &z.im * 2u32) / &sqrt3;
            let a = Float::with_val(wp, &b / 2u32) + &z.re;
            vec![a, b]
        }
        other => {
            return Err(Error::Domain(format!(
                "recognition in Q(zeta_{other}) is not supported (orders 1, 2, 3, 4, 6 only)"
            )))
        }
    };
    let mut out = Vec::new();
    for c in coords {
        match recognize_within(&c, max_height, prec, tol.clone()).recognized {
            Some(q) => out.push(q),
            None => return Ok(None),
        }
    }
    Ok(Some(out))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
        })
    }
}

impl Status {
    fn combine(items: impl Iterator<Item = Status>) -> Status {
        let mut all_pass = true;
        for s in items {
            match s {
                Status::Fail => return Status::Fail,
                Status::Inconclusive => all_pass = false,
                Status::Pass => {}
            }
        }
        if all_pass {
            Status::Pass
        } else {
            Status::Inconclusive
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseOutcome {
    pub label: String,
    /// the ratio at the working precision, real and imaginary parts
    pub value: [String; 2],
    pub recognized: Option<Vec<String>>,
    pub confirmed: Option<Vec<String>>,
    pub status: Status,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub test: String,
    pub inputs: serde_json::Value,
    pub cases: Vec<CaseOutcome>,
    pub status: Status,
    pub precision: u32,
    pub confirm_precision: Option<u32>,
    pub height_cap: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
}

impl VerificationReport {
    /// Exact recognized values, one entry per case.
    pub fn recognized(&self) -> Vec<Option<Vec<String>>> {
        self.cases.iter().map(|c| c.recognized.clone()).collect()
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub precision: u32,
    /// None skips the confirmation pass (every recognized case is then
    /// inconclusive)
    pub confirm_precision: Option<u32>,
    pub height_cap: Integer,
    /// coefficient budget for built-in forms
    pub budget: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            precision: DEFAULT_PRECISION,
            confirm_precision: Some(2 * DEFAULT_PRECISION),
            height_cap: default_height_cap(),
            budget: 200_000,
        }
    }
}

impl VerifyOptions {
    fn precisions(&self) -> Vec<u32> {
        let mut v = vec![self.precision];
        v.extend(self.confirm_precision);
        v
    }
}

/// Where the q-expansion comes from: a built-in form that can be extended
/// on demand, or a fixed table.
#[derive(Clone, Debug)]
pub enum FormSource {
    Builtin(String),
    Fixed(Newform),
}

impl FormSource {
    pub fn builtin(name: &str) -> FormSource {
        FormSource::Builtin(name.to_string())
    }

    pub fn label(&self) -> String {
        match self {
            FormSource::Builtin(name) => name.clone(),
            FormSource::Fixed(f) => format!("form of weight {} level {}", f.weight(), f.level()),
        }
    }

    pub fn weight(&self) -> Result<u32> {
        Ok(match self {
            FormSource::Builtin(name) => builtin_form(name, 16)?.weight(),
            FormSource::Fixed(f) => f.weight(),
        })
    }

    pub fn spec(&self, n: u32, eta: &DirichletCharacter, budget: usize) -> Result<LFunctionSpec> {
        match self {
            FormSource::Builtin(name) => spec_for_builtin_symn(name, n, eta, budget),
            FormSource::Fixed(f) => spec_for_symn(f, n, eta),
        }
    }
}

fn cx_strings(z: &Cx) -> [String; 2] {
    [render(&z.re), render(&z.im)]
}

fn rat_strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(|q| q.to_string()).collect()
}

/// Status of one case from its recognitions at each precision.
fn judge(found: &[Option<Vec<Rational>>]) -> Status {
    if found.len() < 2 {
        return Status::Inconclusive;
    }
    match (&found[0], &found[1]) {
        (Some(a), Some(b)) if a == b => Status::Pass,
        (Some(_), Some(_)) => Status::Fail,
        _ => Status::Inconclusive,
    }
}

/// The central value of a self-dual L-function with root number -1.
fn forced_zero(spec: &LFunctionSpec, m: i64) -> bool {
    spec.self_dual
        && spec.root_number == crate::analytic::RootNumber::Sign(-1)
        && spec.center() == m
}

fn evaluate_at(spec: &LFunctionSpec, points: &[i64], prec: u32) -> Result<Vec<Cx>> {
    let wp = prec + 16;
    let spec = if spec.root_number.is_resolved() {
        spec.clone()
    } else {
        resolve_root_number(spec, &[], wp)?
    };
    let zs: Vec<Cx> = points.iter().map(|&m| Cx::from_f64(wp, m as f64, 0.0)).collect();
    Ok(evaluate_many(&spec, &zs, wp)?.into_iter().map(|v| v.value).collect())
}

fn two_pi_i_pow(e: i64, wp: u32) -> Cx {
    let base = Cx::new(Float::new(wp), two_pi(wp));
    let mut acc = Cx::one(wp);
    for _ in 0..e.unsigned_abs() {
        acc = &acc * &base;
    }
    if e < 0 {
        acc.recip()
    } else {
        acc
    }
}

/// L(m1)/L(m2) divided by (2 pi i)^e for every period-cancelling pair;
/// the result should be rational.
pub fn deligne_ratio_test(
    source: &FormSource,
    n: u32,
    pairs: &[(i64, i64)],
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    let k = source.weight()?;
    let spec = resolve_root_number(&source.spec(n, &trivial_character(), opts.budget)?, &[], opts.precision)?;
    let pairs: Vec<(i64, i64)> = if pairs.is_empty() {
        cancelling_pairs(n, k)
            .into_iter()
            .filter(|&(a, b)| !forced_zero(&spec, a) && !forced_zero(&spec, b))
            .collect()
    } else {
        pairs.to_vec()
    };
    let mut exps = Vec::new();
    for &(m1, m2) in &pairs {
        if forced_zero(&spec, m2) {
            return Err(Error::Domain(format!(
                "L({m2}) vanishes: it is the center and the root number is -1"
            )));
        }
        match ratio_exponent(n, m1, m2, k)? {
            RatioExponent::Cancels { pow_2pii, .. } => exps.push(pow_2pii),
            RatioExponent::NoCancellation => {
                return Err(Error::Domain(format!(
                    "pair ({m1}, {m2}) is not period-cancelling for Sym^{n} of weight {k}"
                )))
            }
        }
    }
    let mut points: Vec<i64> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
    points.sort_unstable();
    points.dedup();
    let mut per_prec: Vec<Vec<(Cx, Option<Vec<Rational>>)>> = Vec::new();
    for prec in opts.precisions() {
        let values = evaluate_at(&spec, &points, prec)?;
        let at = |m: i64| &values[points.binary_search(&m).unwrap()];
        let row = pairs
            .iter()
            .zip(&exps)
            .map(|(&(m1, m2), &e)| {
                let r = at(m1).div(at(m2)).div(&two_pi_i_pow(e, prec + 16));
                let rec = recognize_in_field(&r, 1, &opts.height_cap, prec, Some(prec - ACCURACY_SLACK)).unwrap_or(None);
                (r, rec)
            })
            .collect::<Vec<_>>();
        per_prec.push(row);
    }
    let cases = pairs
        .iter()
        .zip(&exps)
        .enumerate()
        .map(|(i, (&(m1, m2), &e))| {
            let found: Vec<Option<Vec<Rational>>> = per_prec.iter().map(|row| row[i].1.clone()).collect();
            CaseOutcome {
                label: format!("L({m1})/L({m2})/(2 pi i)^{e}"),
                value: cx_strings(&per_prec[0][i].0),
                recognized: found[0].as_deref().map(rat_strings),
                confirmed: found.get(1).and_then(|f| f.as_deref().map(rat_strings)),
                status: judge(&found),
            }
        })
        .collect::<Vec<_>>();
    Ok(VerificationReport {
        test: "deligne".into(),
        inputs: json!({
            "form": source.label(),
            "n": n,
            "k": k,
            "pairs": pairs,
        }),
        status: Status::combine(cases.iter().map(|c| c.status)),
        cases,
        precision: opts.precision,
        confirm_precision: opts.confirm_precision,
        height_cap: opts.height_cap.to_string(),
        residual: None,
    })
}

/// Which relation applies to (n, eta, m) and what it predicts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwistRelation {
    pub clause: u8,
    /// exponent of g(eta)
    pub gauss_power: i64,
    /// exponent of 2 pi i
    pub two_pi_i_power: i64,
    /// point of the untwisted value
    pub shifted: i64,
}

/// Conjectured relation between L(m, Sym^n f, eta) and an untwisted value.
/// For odd eta, m + 1 is used when both m + 1 and m - 1 are critical.
pub fn twist_relation(n: u32, k: u32, eta: &DirichletCharacter, m: i64) -> Result<TwistRelation> {
    let plain = critical_set(n, k);
    let w = n as i64 * (k as i64 - 1);
    let right = 2 * m > w + 1;
    if !eta.is_odd() {
        if !plain.contains(m) {
            return Err(Error::Domain(format!(
                "clause (1): {m} is not critical for Sym^{n} of weight {k}"
            )));
        }
        let e = if n % 2 == 0 && !right { n / 2 } else { (n + 2) / 2 };
        return Ok(TwistRelation { clause: 1, gauss_power: e as i64, two_pi_i_power: 0, shifted: m });
    }
    let clause = if n % 2 == 0 { 2 } else { 3 };
    if clause == 3 && k < 3 {
        return Err(Error::Domain("clause (3) needs k >= 3".into()));
    }
    let twisted = symn_gamma_factors(n, k, true)?;
    let probe = LFunctionSpec::new(
        String::new(),
        1,
        twisted,
        w,
        crate::analytic::RootNumber::Unresolved,
        true,
        Vec::new(),
        std::sync::Arc::new(|_| Ok(Vec::new())),
    )?;
    if !regular_integers(&probe, m, m).contains(&m) {
        return Err(Error::Domain(format!(
            "clause ({clause}): {m} is not critical for the twist of Sym^{n} by an odd character"
        )));
    }
    let (shifted, sign) = if plain.contains(m + 1) {
        (m + 1, -1)
    } else if plain.contains(m - 1) {
        (m - 1, 1)
    } else {
        return Err(Error::Domain(format!(
            "clause ({clause}): neither {} nor {} is critical for Sym^{n}",
            m - 1,
            m + 1
        )));
    };
    let e = match clause {
        2 if right => n as i64 / 2 + 1,
        2 => n as i64 / 2,
        _ => (n as i64 + 1) / 2,
    };
    Ok(TwistRelation { clause, gauss_power: e, two_pi_i_power: sign * e, shifted })
}

/// L(m, Sym^n f, eta) / (g(eta)^e (2 pi i)^e' L(m', Sym^n f)) recognized
/// in Q(eta), for each m.
pub fn twist_test_many(
    source: &FormSource,
    n: u32,
    eta: &DirichletCharacter,
    ms: &[i64],
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    if !eta.is_primitive() {
        return Err(Error::Domain(format!("{eta} is not primitive")));
    }
    let k = source.weight()?;
    let relations: Vec<TwistRelation> = ms
        .iter()
        .map(|&m| twist_relation(n, k, eta, m))
        .collect::<Result<_>>()?;
    let order = eta.order();
    if ![1, 2, 3, 4, 6].contains(&order) {
        return Err(Error::Domain(format!("characters of order {order} are not supported")));
    }
    let twisted = source.spec(n, eta, opts.budget)?;
    let plain = resolve_root_number(&source.spec(n, &trivial_character(), opts.budget)?, &[], opts.precision)?;
    if let Some(r) = relations.iter().find(|r| forced_zero(&plain, r.shifted)) {
        return Err(Error::Domain(format!(
            "untwisted L({}) vanishes: it is the center and the root number is -1",
            r.shifted
        )));
    }
    let mut untwisted_points: Vec<i64> = relations.iter().map(|r| r.shifted).collect();
    untwisted_points.sort_unstable();
    untwisted_points.dedup();
    let mut per_prec = Vec::new();
    for prec in opts.precisions() {
        let wp = prec + 16;
        let tw = evaluate_at(&twisted, ms, prec)?;
        let un = evaluate_at(&plain, &untwisted_points, prec)?;
        let g = gauss_sum(eta, wp).value;
        let row = ms
            .iter()
            .zip(&relations)
            .zip(&tw)
            .map(|((_, rel), lt)| {
                let lu = &un[untwisted_points.binary_search(&rel.shifted).unwrap()];
                let mut denom = lu * &two_pi_i_pow(rel.two_pi_i_power, wp);
                for _ in 0..rel.gauss_power {
                    denom = &denom * &g;
                }
                let r = lt.div(&denom);
                let rec = recognize_in_field(&r, order, &opts.height_cap, prec, Some(prec - ACCURACY_SLACK)).unwrap_or(None);
                (r, rec)
            })
            .collect::<Vec<_>>();
        per_prec.push(row);
    }
    let cases = ms
        .iter()
        .zip(&relations)
        .enumerate()
        .map(|(i, (&m, rel))| {
            let found: Vec<Option<Vec<Rational>>> = per_prec.iter().map(|row: &Vec<(Cx, Option<Vec<Rational>>)>| row[i].1.clone()).collect();
            CaseOutcome {
                label: format!(
                    "clause ({}) L({m}, eta)/(g^{} (2 pi i)^{} L({}))",
                    rel.clause, rel.gauss_power, rel.two_pi_i_power, rel.shifted
                ),
                value: cx_strings(&per_prec[0][i].0),
                recognized: found[0].as_deref().map(rat_strings),
                confirmed: found.get(1).and_then(|f| f.as_deref().map(rat_strings)),
                status: judge(&found),
            }
        })
        .collect::<Vec<_>>();
    Ok(VerificationReport {
        test: "twist".into(),
        inputs: json!({
            "form": source.label(),
            "n": n,
            "k": k,
            "character": eta.to_string(),
            "m": ms,
            "relations": relations,
        }),
        status: Status::combine(cases.iter().map(|c| c.status)),
        cases,
        precision: opts.precision,
        confirm_precision: opts.confirm_precision,
        height_cap: opts.height_cap.to_string(),
        residual: None,
    })
}

pub fn twist_test(
    source: &FormSource,
    n: u32,
    eta: &DirichletCharacter,
    m: i64,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    twist_test_many(source, n, eta, &[m], opts)
}

#[derive(Clone, Debug)]
pub struct DihedralValueOptions {
    pub precision: u32,
    pub prime_bound: u64,
    pub lhs_mode: BadPrimeMode,
    pub rhs_mode: BadPrimeMode,
    /// fault injection: drop the one-dimensional summand on the right
    pub omit_abelian: bool,
}

impl Default for DihedralValueOptions {
    fn default() -> Self {
        DihedralValueOptions {
            precision: 192,
            prime_bound: 1000,
            lhs_mode: BadPrimeMode::Partial,
            rhs_mode: BadPrimeMode::Partial,
            omit_abelian: false,
        }
    }
}

/// Sym^n L(s) of a CM form evaluated directly and as the product of its
/// isobaric constituents, over the same primes; passes when the relative
/// difference is below 2^{-precision/2}.
pub fn dihedral_value_test(phi: &CMForm, n: u32, s: &Cx, opts: &DihedralValueOptions) -> Result<VerificationReport> {
    if opts.lhs_mode != opts.rhs_mode {
        return Err(Error::Configuration(format!(
            "bad-prime modes differ: {:?} on the left, {:?} on the right",
            opts.lhs_mode, opts.rhs_mode
        )));
    }
    let wp = opts.precision + 32;
    let s = s.with_prec(wp);
    let lhs = lhs_euler_product(phi, n, &s, opts.prime_bound, opts.lhs_mode)?;
    let rhs = rhs_euler_product(phi, n, &s, opts.prime_bound, opts.rhs_mode, opts.omit_abelian)?;
    let residual = Float::with_val(wp, (&lhs - &rhs).abs() / lhs.abs()).to_f64();
    let tol = 2f64.powi(-((opts.precision / 2) as i32));
    let status = if residual < tol { Status::Pass } else { Status::Fail };
    let (re, im) = s.to_f64s();
    Ok(VerificationReport {
        test: "dihedral".into(),
        inputs: json!({
            "n": n,
            "s": [re, im],
            "prime_bound": opts.prime_bound,
            "omit_abelian": opts.omit_abelian,
            "level": phi.character.level(),
        }),
        cases: vec![CaseOutcome {
            label: "lhs/rhs".into(),
            value: cx_strings(&lhs.div(&rhs).with_prec(opts.precision)),
            recognized: None,
            confirmed: None,
            status,
        }],
        status,
        precision: opts.precision,
        confirm_precision: None,
        height_cap: String::new(),
        residual: Some(residual),
    })
}
