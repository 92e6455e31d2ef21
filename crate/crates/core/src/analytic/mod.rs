//! Completed L-functions Lambda(s) = Q^{s/2} prod gamma_j(s) L(s) with
//! functional equation Lambda(s) = eps conj(Lambda(w + 1 - conj s)).
//!
//! Conventions: Gamma_R(s) = pi^{-s/2} Gamma(s/2), Gamma_C(s) = 2 (2 pi)^{-s} Gamma(s).
//! Everything is in the motivic normalization; the automorphic L-function
//! of Sym^n is L(s + n(k-1)/2).
//!
//! The gamma data for Sym^n are reconstructed from the Hodge types: one
//! Gamma_C(s - a(k-1)) per pair of types, plus for even n a Gamma_R whose
//! parity is fixed by requiring the regular integers to be the critical set.

mod contour;
mod incgamma;

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::sync::{Arc, Mutex};

use rug::{Float, Rational};
use serde::Serialize;

use crate::characters::DirichletCharacter;
use crate::critical::critical_set;
use crate::cyclo::Cyclo;
use crate::error::{Error, Result};
use crate::numeric::{gamma, ln_gamma_abs_f64, pi, two_pi, Cx};
use crate::qseries::{builtin_form, Newform};
use crate::satake::{dirichlet_coeffs, BadPrimeMode};

pub use contour::SMOOTHING_BETA;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GammaKind {
    R,
    C,
}

/// Gamma_kind(s + shift).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GammaFactor {
    pub kind: GammaKind,
    pub shift: i64,
}

impl fmt::Display for GammaFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.kind {
            GammaKind::R => "R",
            GammaKind::C => "C",
        };
        match self.shift {
            0 => write!(f, "Gamma_{k}(s)"),
            s if s > 0 => write!(f, "Gamma_{k}(s+{s})"),
            s => write!(f, "Gamma_{k}(s{s})"),
        }
    }
}

impl GammaFactor {
    pub fn r(shift: i64) -> Self {
        GammaFactor { kind: GammaKind::R, shift }
    }

    pub fn c(shift: i64) -> Self {
        GammaFactor { kind: GammaKind::C, shift }
    }

    pub fn degree(&self) -> u32 {
        match self.kind {
            GammaKind::R => 1,
            GammaKind::C => 2,
        }
    }

    pub fn has_pole_at(&self, m: i64) -> bool {
        let u = m + self.shift;
        match self.kind {
            GammaKind::R => u <= 0 && u % 2 == 0,
            GammaKind::C => u <= 0,
        }
    }

    pub fn eval(&self, z: &Cx) -> Cx {
        let wp = z.prec();
        let u = z.add_real(&Float::with_val(wp, self.shift));
        match self.kind {
            GammaKind::R => {
                let half = u.scale(&Float::with_val(wp, 0.5));
                let pw = Cx::real_base_pow(&pi(wp), &(-&half));
                &pw * &gamma(&half)
            }
            GammaKind::C => {
                let pw = Cx::real_base_pow(&two_pi(wp), &(-&u));
                (&pw * &gamma(&u)).scale(&Float::with_val(wp, 2))
            }
        }
    }

    /// ln |gamma(x + iy)| in double precision.
    pub(crate) fn ln_abs_f64(&self, x: f64, y: f64) -> f64 {
        let u = x + self.shift as f64;
        match self.kind {
            GammaKind::R => -(u / 2.0) * PI.ln() + ln_gamma_abs_f64(u / 2.0, y / 2.0),
            GammaKind::C => LN_2 - u * (2.0 * PI).ln() + ln_gamma_abs_f64(u, y),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RootNumber {
    Unresolved,
    Sign(i8),
    Numeric(Cx),
}

impl RootNumber {
    pub fn value(&self, prec: u32) -> Option<Cx> {
        match self {
            RootNumber::Unresolved => None,
            RootNumber::Sign(s) => Some(Cx::from_f64(prec, *s as f64, 0.0)),
            RootNumber::Numeric(z) => Some(z.with_prec(prec)),
        }
    }

    pub fn is_resolved(&self) -> bool {
        !matches!(self, RootNumber::Unresolved)
    }
}

impl fmt::Display for RootNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RootNumber::Unresolved => write!(f, "unresolved"),
            RootNumber::Sign(s) => write!(f, "{s:+}"),
            RootNumber::Numeric(z) => {
                let (re, im) = z.to_f64s();
                write!(f, "{re:.12}{im:+.12}i")
            }
        }
    }
}

/// A pole of Lambda(s) with its residue.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pole {
    pub at: Rational,
    pub residue: Rational,
}

pub type CoefficientFn = dyn Fn(usize) -> Result<Vec<Cyclo>> + Send + Sync;

#[derive(Clone)]
pub struct LFunctionSpec {
    pub label: String,
    pub degree: u32,
    pub conductor: u64,
    pub gamma: Vec<GammaFactor>,
    pub weight: i64,
    pub root_number: RootNumber,
    pub self_dual: bool,
    pub poles: Vec<Pole>,
    /// Euler factors at bad primes were replaced by 1.
    pub partial: bool,
    provider: Arc<CoefficientFn>,
    cache: Arc<Mutex<Vec<Cyclo>>>,
}

impl fmt::Debug for LFunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LFunctionSpec")
            .field("label", &self.label)
            .field("degree", &self.degree)
            .field("conductor", &self.conductor)
            .field("gamma", &self.gamma)
            .field("weight", &self.weight)
            .field("root_number", &self.root_number)
            .field("self_dual", &self.self_dual)
            .finish()
    }
}

impl LFunctionSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        label: impl Into<String>,
        conductor: u64,
        gamma: Vec<GammaFactor>,
        weight: i64,
        root_number: RootNumber,
        self_dual: bool,
        poles: Vec<Pole>,
        provider: Arc<CoefficientFn>,
    ) -> Result<Self> {
        if conductor == 0 {
            return Err(Error::Domain("conductor must be positive".into()));
        }
        let degree = gamma.iter().map(|g| g.degree()).sum();
        Ok(LFunctionSpec {
            label: label.into(),
            degree,
            conductor,
            gamma,
            weight,
            root_number,
            self_dual,
            poles,
            partial: false,
            provider,
            cache: Arc::new(Mutex::new(Vec::new())),
        })
    }

    /// Same analytic data, ignoring labels and coefficient sources.
    pub fn same_data(&self, other: &LFunctionSpec) -> bool {
        self.degree == other.degree
            && self.conductor == other.conductor
            && self.gamma == other.gamma
            && self.weight == other.weight
            && self.self_dual == other.self_dual
            && self.poles == other.poles
    }

    pub fn center(&self) -> Rational {
        Rational::from((self.weight + 1, 2))
    }

    pub fn with_root_number(&self, eps: RootNumber) -> Self {
        let mut out = self.clone();
        out.root_number = eps;
        out
    }

    /// b_1..b_len.
    pub fn coefficients(&self, len: usize) -> Result<Vec<Cyclo>> {
        {
            let cache = self.cache.lock().unwrap();
            if cache.len() >= len {
                return Ok(cache[..len].to_vec());
            }
        }
        let b = (self.provider)(len)?;
        if b.len() < len {
            return Err(Error::Range {
                needed: len,
                available: b.len(),
            });
        }
        self.check_growth(&b)?;
        let mut cache = self.cache.lock().unwrap();
        if cache.len() < b.len() {
            *cache = b.clone();
        }
        Ok(b[..len].to_vec())
    }

    /// |b_p| <= binom(d, ceil(d/2)) p^{w/2} (1 + margin) on sampled primes.
    fn check_growth(&self, b: &[Cyclo]) -> Result<()> {
        let d = self.degree as u64;
        let bound = crate::arith::binomial(d, d.div_ceil(2)) as f64 * 1.001;
        for p in crate::arith::primes_up_to(b.len().min(2000)) {
            let v = b[p as usize - 1].to_complex(64).abs().to_f64();
            let lim = bound * (p as f64).powf(self.weight as f64 / 2.0);
            if v > lim {
                return Err(Error::Consistency(format!(
                    "|b_{p}| = {v:.4e} exceeds the weight-{} bound {lim:.4e}",
                    self.weight
                )));
            }
        }
        Ok(())
    }

    /// ln |Q^{z/2} G(z)| in double precision.
    pub(crate) fn ln_abs_completion(&self, x: f64, y: f64) -> f64 {
        0.5 * x * (self.conductor as f64).ln()
            + self.gamma.iter().map(|g| g.ln_abs_f64(x, y)).sum::<f64>()
    }

    /// Q^{z/2} G(z).
    pub fn completion_factor(&self, z: &Cx) -> Cx {
        let wp = z.prec();
        let half = z.scale(&Float::with_val(wp, 0.5));
        let mut acc = Cx::real_base_pow(&Float::with_val(wp, self.conductor), &half);
        for g in &self.gamma {
            acc = &acc * &g.eval(z);
        }
        acc
    }

    pub fn gamma_has_pole_at(&self, z: &Cx) -> bool {
        if !z.im.is_zero() || !z.re.is_integer() {
            return false;
        }
        let m = z.re.to_f64() as i64;
        self.gamma.iter().any(|g| g.has_pole_at(m))
    }

    pub fn abscissa_of_convergence(&self) -> f64 {
        self.weight as f64 / 2.0 + 1.0
    }
}

/// Integers m in [lo, hi] at which no gamma factor of Lambda(s) or of
/// Lambda(w + 1 - s) has a pole.
pub fn regular_integers(spec: &LFunctionSpec, lo: i64, hi: i64) -> Vec<i64> {
    (lo..=hi)
        .filter(|&m| {
            spec.gamma
                .iter()
                .all(|g| !g.has_pole_at(m) && !g.has_pole_at(spec.weight + 1 - m))
        })
        .collect()
}

fn regular_set_of(gamma: &[GammaFactor], w: i64) -> Vec<i64> {
    (-(w + 4)..=2 * w + 5)
        .filter(|&m| gamma.iter().all(|g| !g.has_pole_at(m) && !g.has_pole_at(w + 1 - m)))
        .collect()
}

/// Gamma data of Sym^n for weight k, twisted by a character of the given parity.
pub fn symn_gamma_factors(n: u32, k: u32, eta_odd: bool) -> Result<Vec<GammaFactor>> {
    if n == 0 || k == 0 {
        return Err(Error::Domain("n and k must be positive".into()));
    }
    let kk = k as i64 - 1;
    let w = n as i64 * kk;
    let mut out: Vec<GammaFactor> = (0..n.div_ceil(2) as i64)
        .map(|a| GammaFactor::c(-a * kk))
        .collect();
    if n % 2 == 0 {
        let r = (n / 2) as i64;
        let target = critical_set(n, k).members;
        let matching: Vec<i64> = (0..=1)
            .filter(|&eps| {
                let mut trial = out.clone();
                trial.push(GammaFactor::r(-r * kk + eps));
                regular_set_of(&trial, w) == target
            })
            .collect();
        let eps = match matching.as_slice() {
            [e] => *e,
            // empty critical set; the parity of the middle Hodge type decides
            [_, _] => (r * kk).rem_euclid(2),
            _ => {
                return Err(Error::Internal(format!(
                    "no Gamma_R parity reproduces the critical set of Sym^{n}, k = {k}"
                )))
            }
        };
        out.push(GammaFactor::r(-r * kk + (eps ^ eta_odd as i64)));
    }
    Ok(out)
}

pub fn zeta_spec() -> LFunctionSpec {
    let provider: Arc<CoefficientFn> = Arc::new(|len| Ok(vec![Cyclo::one(); len]));
    LFunctionSpec::new(
        "zeta",
        1,
        vec![GammaFactor::r(0)],
        0,
        RootNumber::Sign(1),
        true,
        vec![
            Pole { at: Rational::from(0), residue: Rational::from(-1) },
            Pole { at: Rational::from(1), residue: Rational::from(1) },
        ],
        provider,
    )
    .expect("conductor 1")
}

/// L(s, chi) for a primitive nontrivial character.
pub fn dirichlet_spec(chi: &DirichletCharacter) -> Result<LFunctionSpec> {
    if chi.is_trivial() {
        return Ok(zeta_spec());
    }
    if !chi.is_primitive() {
        return Err(Error::Domain(format!("{chi} is not primitive")));
    }
    let c = chi.clone();
    let provider: Arc<CoefficientFn> =
        Arc::new(move |len| Ok((1..=len as i64).map(|n| c.value(n)).collect()));
    LFunctionSpec::new(
        format!("L(s, {chi})"),
        chi.modulus(),
        vec![GammaFactor::r(if chi.is_odd() { 1 } else { 0 })],
        0,
        RootNumber::Unresolved,
        chi.is_real(),
        Vec::new(),
        provider,
    )
}

fn twist_conductor(n: u32, eta: &DirichletCharacter) -> Result<u64> {
    if eta.is_trivial() {
        if eta.modulus() != 1 {
            return Err(Error::Domain(
                "a trivial twist must be given with modulus 1".into(),
            ));
        }
        return Ok(1);
    }
    if !eta.is_primitive() {
        return Err(Error::Domain(format!("{eta} is not primitive")));
    }
    eta.modulus()
        .checked_pow(n + 1)
        .ok_or_else(|| Error::Domain("conductor overflows".into()))
}

fn symn_label(name: &str, n: u32, eta: &DirichletCharacter) -> String {
    if eta.is_trivial() {
        format!("Sym^{n} {name}")
    } else {
        format!("Sym^{n} {name} x {eta}")
    }
}

/// Sym^n of a level-one form, twisted by a primitive (or trivial) eta.
/// Coefficients come from the stored q-expansion of `f`.
pub fn spec_for_symn(f: &Newform, n: u32, eta: &DirichletCharacter) -> Result<LFunctionSpec> {
    if f.level() != 1 {
        return Err(Error::Domain(
            "symmetric power specs are built for level one forms only".into(),
        ));
    }
    let conductor = twist_conductor(n, eta)?;
    let gamma = symn_gamma_factors(n, f.weight(), eta.is_odd())?;
    let form = Arc::new(f.clone());
    let e = eta.clone();
    let provider: Arc<CoefficientFn> = Arc::new(move |len| {
        dirichlet_coeffs(&form, n, &e, len, BadPrimeMode::Partial).map_err(|err| match err {
            Error::Range { .. } => Error::Range {
                needed: len,
                available: form.len(),
            },
            other => other,
        })
    });
    let mut spec = LFunctionSpec::new(
        symn_label("f", n, eta),
        conductor,
        gamma,
        n as i64 * (f.weight() as i64 - 1),
        RootNumber::Unresolved,
        eta.is_real(),
        Vec::new(),
        provider,
    )?;
    spec.partial = !eta.is_trivial();
    Ok(spec)
}

/// Like `spec_for_symn` for a built-in form, extending the q-expansion on
/// demand up to `budget` coefficients.
pub fn spec_for_builtin_symn(
    name: &str,
    n: u32,
    eta: &DirichletCharacter,
    budget: usize,
) -> Result<LFunctionSpec> {
    let f = builtin_form(name, 16)?;
    let mut spec = spec_for_symn(&f, n, eta)?;
    let owned = name.to_string();
    let e = eta.clone();
    spec.label = symn_label(name, n, eta);
    spec.provider = Arc::new(move |len| {
        if len > budget {
            return Err(Error::Resource(format!(
                "{len} coefficients needed, budget is {budget}"
            )));
        }
        let f = builtin_form(&owned, len.max(16))?;
        dirichlet_coeffs(&f, n, &e, len, BadPrimeMode::Partial)
    });
    Ok(spec)
}

#[derive(Clone, Debug)]
pub struct LValue {
    pub s: Cx,
    /// L(s), the finite part
    pub value: Cx,
    /// Lambda(s)
    pub completed: Cx,
    pub precision_bits: u32,
    /// estimated relative error of the value
    pub truncation_error_bound: f64,
    pub terms: usize,
    pub partial: bool,
}

fn require_root_number(spec: &LFunctionSpec) -> Result<()> {
    if spec.root_number.is_resolved() {
        Ok(())
    } else {
        Err(Error::State(format!(
            "root number of {} is unresolved",
            spec.label
        )))
    }
}

fn uses_incomplete_gamma(spec: &LFunctionSpec) -> bool {
    spec.gamma.len() == 1
}

/// L(s) at one point.
pub fn evaluate(spec: &LFunctionSpec, s: &Cx, prec: u32) -> Result<LValue> {
    Ok(evaluate_many(spec, std::slice::from_ref(s), prec)?.remove(0))
}

/// L(s) at several points, sharing the expensive Dirichlet sums.
pub fn evaluate_many(spec: &LFunctionSpec, points: &[Cx], prec: u32) -> Result<Vec<LValue>> {
    require_root_number(spec)?;
    if prec < 32 {
        return Err(Error::Domain("precision must be at least 32 bits".into()));
    }
    for s in points {
        if spec.poles.iter().any(|p| s.im.is_zero() && s.re == *p.at.numer() && *p.at.denom() == 1) {
            return Err(Error::Domain("L(s) has a pole at the requested point".into()));
        }
    }
    if uses_incomplete_gamma(spec) {
        points
            .iter()
            .map(|s| incgamma::evaluate_point(spec, s, prec))
            .collect()
    } else {
        contour::evaluate_points(spec, points, prec)
    }
}

/// Forces the contour route; used to cross-check the incomplete-gamma route.
pub fn evaluate_by_contour(spec: &LFunctionSpec, points: &[Cx], prec: u32) -> Result<Vec<LValue>> {
    require_root_number(spec)?;
    contour::evaluate_points(spec, points, prec)
}

fn default_probes(spec: &LFunctionSpec) -> Vec<Cx> {
    let c = (spec.weight as f64 + 1.0) / 2.0;
    vec![
        Cx::from_f64(64, c + 1.25, 0.75),
        Cx::from_f64(64, c + 2.5, -0.4),
    ]
}

/// Solve for the root number from two smoothings of the functional
/// equation at each probe point.
pub fn resolve_root_number(spec: &LFunctionSpec, probes: &[Cx], prec: u32) -> Result<LFunctionSpec> {
    let probes = if probes.is_empty() {
        default_probes(spec)
    } else {
        probes.to_vec()
    };
    let eps = contour::solve_root_number(spec, &probes, prec)?;
    Ok(spec.with_root_number(eps))
}

/// Root number resolution followed by evaluation, sharing one node set.
pub fn resolve_and_evaluate(
    spec: &LFunctionSpec,
    points: &[Cx],
    prec: u32,
) -> Result<(LFunctionSpec, Vec<LValue>)> {
    let resolved = if spec.root_number.is_resolved() {
        spec.clone()
    } else {
        resolve_root_number(spec, &[], prec)?
    };
    let values = evaluate_many(&resolved, points, prec)?;
    Ok((resolved, values))
}

#[derive(Clone, Debug, Serialize)]
pub struct FeCheck {
    pub max_residual: f64,
    pub residuals: Vec<f64>,
    pub precision_bits: u32,
}

/// |Lambda_0(s) - Lambda_beta(s)| / |Lambda(s)| for two smoothings; small
/// only when the functional equation with the stored root number holds.
pub fn fe_selfcheck(spec: &LFunctionSpec, samples: &[Cx], prec: u32) -> Result<FeCheck> {
    require_root_number(spec)?;
    let residuals = contour::smoothing_residuals(spec, samples, prec)?;
    let max_residual = residuals.iter().cloned().fold(0.0, f64::max);
    Ok(FeCheck {
        max_residual,
        residuals,
        precision_bits: prec,
    })
}

/// Sample points on both sides of the center, away from the real axis.
pub fn default_samples(spec: &LFunctionSpec, count: usize) -> Vec<Cx> {
    let c = (spec.weight as f64 + 1.0) / 2.0;
    (0..count)
        .map(|i| {
            let x = c + 0.35 + 0.9 * i as f64 - 0.4 * (i % 2) as f64;
            let y = 0.6 + 0.45 * i as f64;
            Cx::from_f64(64, x, if i % 2 == 0 { y } else { -y })
        })
        .collect()
}
