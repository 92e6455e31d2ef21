//! Single gamma factor: the classical incomplete-gamma expansion
//!
//!   Lambda(s) = K sum b_n X_n^{mu'-a} Gamma(a, X_n)
//!             + eps K sum conj(b_n) X_n^{mu'-a~} Gamma(a~, X_n)
//!             + sum_rho r_rho / (s - rho),
//!
//! with gamma(z) = K P^{-lambda z} Gamma(lambda z + mu'), a = lambda s + mu',
//! a~ = lambda (w + 1 - s) + mu' and X_n = n^{1/lambda} P / Q^{1/(2 lambda)}.

use std::f64::consts::{LN_2, PI};

use rug::ops::Pow;
use rug::Float;

use super::{GammaKind, LFunctionSpec, LValue};
use crate::error::{Error, Result};
use crate::numeric::{ln_gamma_abs_f64, pi, two_pi, upper_incomplete_gamma, Cx};

struct Shape {
    lambda: f64,
    /// mu' as an exact half-integer times 2
    mu_twice: i64,
    p_is_two_pi: bool,
    shift: i64,
}

fn shape(spec: &LFunctionSpec) -> Shape {
    let g = spec.gamma[0];
    match g.kind {
        GammaKind::R => Shape { lambda: 0.5, mu_twice: g.shift, p_is_two_pi: false, shift: g.shift },
        GammaKind::C => Shape { lambda: 1.0, mu_twice: 2 * g.shift, p_is_two_pi: true, shift: g.shift },
    }
}

/// ln |Gamma(a, X)| for X past the bulk, else ln |Gamma(a)|.
fn ln_incgamma_f64(ar: f64, ai: f64, x: f64) -> f64 {
    if x > (ar * ar + ai * ai).sqrt() + 2.0 {
        (ar - 1.0) * x.ln() - x
    } else {
        ln_gamma_abs_f64(ar.max(0.5), ai).max((ar - 1.0) * x.max(1e-300).ln() - x)
    }
}

pub(super) fn evaluate_point(spec: &LFunctionSpec, s: &Cx, prec: u32) -> Result<LValue> {
    let sh = shape(spec);
    let q = spec.conductor as f64;
    let w1 = spec.weight as f64 + 1.0;
    let (sigma, tau) = s.to_f64s();
    let d = spec.degree as f64;
    let ln_size = {
        let (x, y) = if sigma >= w1 / 2.0 { (sigma, tau) } else { (w1 - sigma, -tau) };
        spec.ln_abs_completion(x, y)
    };
    let ln_target = ln_size - (prec as f64 + 12.0) * LN_2;
    let mu = sh.mu_twice as f64 / 2.0;
    let (ar, ai) = (sh.lambda * sigma + mu, sh.lambda * tau);
    let (br, bi) = (sh.lambda * (w1 - sigma) + mu, -sh.lambda * tau);
    let ln_p = if sh.p_is_two_pi { (2.0 * PI).ln() } else { PI.ln() };
    let ln_k = if sh.p_is_two_pi {
        LN_2 - sh.shift as f64 * (2.0 * PI).ln()
    } else {
        -(sh.shift as f64 / 2.0) * PI.ln()
    };
    let x_of = |n: f64| (n.ln() / sh.lambda + ln_p - q.ln() / (2.0 * sh.lambda)).exp();
    let bulk = (ar * ar + ai * ai).sqrt().max((br * br + bi * bi).sqrt()) + 5.0;
    let mut terms;
    let mut largest = f64::NEG_INFINITY;
    let mut n = 1usize;
    loop {
        let nf = n as f64;
        let x = x_of(nf);
        let ln_b = spec.weight as f64 / 2.0 * nf.ln() + (d - 1.0) * (1.0 + nf.ln()).ln();
        let t1 = ln_b + ln_k + (mu - ar) * x.ln() + ln_incgamma_f64(ar, ai, x);
        let t2 = ln_b + ln_k + (mu - br) * x.ln() + ln_incgamma_f64(br, bi, x);
        let t = t1.max(t2);
        largest = largest.max(t);
        terms = n;
        if x > bulk && t < ln_target - 10.0 {
            break;
        }
        n += 1;
        if n > 50_000_000 {
            return Err(Error::Resource("incomplete-gamma series does not terminate".into()));
        }
    }
    let loss = ((largest - ln_size) / LN_2).max(0.0);
    let wp = prec + 32 + loss.ceil() as u32;
    let b = spec.coefficients(terms)?;
    let eps = spec
        .root_number
        .value(wp)
        .ok_or_else(|| Error::State("root number unresolved".into()))?;

    let s_w = s.with_prec(wp);
    let lam = Float::with_val(wp, sh.lambda);
    let mu_f = Float::with_val(wp, sh.mu_twice) / 2u32;
    let a = s_w.scale(&lam).add_real(&mu_f);
    let s_dual = (-&s_w).add_real(&Float::with_val(wp, spec.weight + 1));
    let a_dual = s_dual.scale(&lam).add_real(&mu_f);
    let p = if sh.p_is_two_pi { two_pi(wp) } else { pi(wp) };
    let k = if sh.p_is_two_pi {
        let mut v = Float::with_val(wp, p.clone().pow(-sh.shift as i32));
        v *= 2u32;
        v
    } else {
        Float::with_val(wp, pi(wp).ln() * -sh.shift as i32 / 2u32).exp()
    };
    let q_f = Float::with_val(wp, spec.conductor);
    let q_pow = Float::with_val(wp, q_f.ln() / (2.0 * sh.lambda)).exp();
    let mu_minus_a = (-&a).add_real(&mu_f);
    let mu_minus_ad = (-&a_dual).add_real(&mu_f);
    let mut sum1 = Cx::zero(wp);
    let mut sum2 = Cx::zero(wp);
    for (idx, bn) in b.iter().enumerate() {
        if bn.is_zero() {
            continue;
        }
        let n = Float::with_val(wp, idx + 1);
        let npow = if sh.lambda == 1.0 { n } else { Float::with_val(wp, n.square_ref()) };
        let x = Float::with_val(wp, &npow * &p) / &q_pow;
        let bc = bn.to_complex(wp);
        let g1 = &Cx::real_base_pow(&x, &mu_minus_a) * &upper_incomplete_gamma(&a, &x);
        let g2 = &Cx::real_base_pow(&x, &mu_minus_ad) * &upper_incomplete_gamma(&a_dual, &x);
        sum1 = &sum1 + &(&bc * &g1);
        sum2 = &sum2 + &(&bc.conj() * &g2);
    }
    let mut lambda = &sum1.scale(&k) + &(&eps * &sum2.scale(&k));
    for pole in &spec.poles {
        let rho = Cx::from_rational(wp, &pole.at);
        lambda = &lambda + &(&s_w - &rho).recip().scale_rational(&pole.residue);
    }
    let value = if spec.gamma_has_pole_at(s) {
        Cx::zero(prec)
    } else {
        lambda.div(&spec.completion_factor(&s_w)).with_prec(prec)
    };
    let ln_abs = lambda.abs().to_f64().ln();
    let bound = ((ln_target + 10f64.ln() - ln_abs).exp() + 2f64.powf(-(wp as f64 - loss - 8.0)))
        .max(f64::MIN_POSITIVE);
    Ok(LValue {
        s: s.with_prec(prec),
        value,
        completed: lambda.with_prec(prec),
        precision_bits: prec,
        truncation_error_bound: bound,
        terms,
        partial: spec.partial,
    })
}
