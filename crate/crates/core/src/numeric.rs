//! Arbitrary-precision complex arithmetic over MPFR floats, plus the
//! special functions the L-function evaluator needs: complex Gamma by a
//! shifted Stirling series and the upper incomplete Gamma function.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Mutex, OnceLock};

use rug::float::Constant;
use rug::{Assign, Float, Integer, Rational};

pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

pub fn two_pi(prec: u32) -> Float {
    pi(prec) * 2u32
}

#[derive(Clone, PartialEq)]
pub struct Cx {
    pub re: Float,
    pub im: Float,
}

impl fmt::Debug for Cx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}i)", self.re.to_f64(), self.im.to_f64())
    }
}

impl Cx {
    pub fn zero(prec: u32) -> Cx {
        Cx {
            re: Float::new(prec),
            im: Float::new(prec),
        }
    }

    pub fn one(prec: u32) -> Cx {
        Cx::real(Float::with_val(prec, 1))
    }

    pub fn i(prec: u32) -> Cx {
        Cx {
            re: Float::new(prec),
            im: Float::with_val(prec, 1),
        }
    }

    pub fn real(re: Float) -> Cx {
        let prec = re.prec();
        Cx {
            re,
            im: Float::new(prec),
        }
    }

    pub fn new(re: Float, im: Float) -> Cx {
        Cx { re, im }
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Cx {
        Cx {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn from_rational(prec: u32, q: &Rational) -> Cx {
        Cx::real(Float::with_val(prec, q))
    }

    /// exp(i * angle)
    pub fn from_polar_unit(angle: &Float) -> Cx {
        let prec = angle.prec();
        let (s, c) = angle.clone().sin_cos(Float::new(prec));
        Cx { re: c, im: s }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn with_prec(&self, prec: u32) -> Cx {
        Cx {
            re: Float::with_val(prec, &self.re),
            im: Float::with_val(prec, &self.im),
        }
    }

    pub fn conj(&self) -> Cx {
        Cx {
            re: self.re.clone(),
            im: Float::with_val(self.im.prec(), -&self.im),
        }
    }

    pub fn norm_sqr(&self) -> Float {
        let prec = self.prec();
        let mut r = Float::with_val(prec, &self.re * &self.re);
        r += &self.im * &self.im;
        r
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    pub fn arg(&self) -> Float {
        Float::with_val(self.prec(), self.im.atan2_ref(&self.re))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn scale(&self, f: &Float) -> Cx {
        let prec = self.prec();
        Cx {
            re: Float::with_val(prec, &self.re * f),
            im: Float::with_val(prec, &self.im * f),
        }
    }

    pub fn scale_rational(&self, q: &Rational) -> Cx {
        let prec = self.prec();
        Cx {
            re: Float::with_val(prec, &self.re * q),
            im: Float::with_val(prec, &self.im * q),
        }
    }

    pub fn add_real(&self, x: &Float) -> Cx {
        Cx {
            re: Float::with_val(self.prec(), &self.re + x),
            im: self.im.clone(),
        }
    }

    pub fn recip(&self) -> Cx {
        let d = self.norm_sqr();
        let prec = self.prec();
        Cx {
            re: Float::with_val(prec, &self.re / &d),
            im: Float::with_val(prec, -&self.im) / &d,
        }
    }

    pub fn div(&self, other: &Cx) -> Cx {
        self * &other.recip()
    }

    pub fn exp(&self) -> Cx {
        let prec = self.prec();
        let m = Float::with_val(prec, self.re.exp_ref());
        let (s, c) = self.im.clone().sin_cos(Float::new(prec));
        Cx {
            re: c * &m,
            im: s * &m,
        }
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Cx {
        let prec = self.prec();
        Cx {
            re: Float::with_val(prec, self.re.hypot_ref(&self.im)).ln(),
            im: self.arg(),
        }
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Cx {
        if self.is_zero() {
            return self.clone();
        }
        let prec = self.prec();
        let r = Float::with_val(prec, self.abs().sqrt_ref());
        let half = Float::with_val(prec, self.arg() / 2u32);
        Cx::from_polar_unit(&half).scale(&r)
    }

    /// Principal power self^w.
    pub fn powc(&self, w: &Cx) -> Cx {
        (w * &self.ln()).exp()
    }

    /// x^self for real x > 0.
    pub fn real_base_pow(x: &Float, w: &Cx) -> Cx {
        let lx = Float::with_val(w.prec(), x.ln_ref());
        w.scale(&lx).exp()
    }

    pub fn mul_assign_ref(&mut self, other: &Cx, t1: &mut Float, t2: &mut Float) {
        // (a+bi)(c+di) with two scratch registers
        t1.assign(&self.re * &other.re);
        t2.assign(&self.im * &other.im);
        *t1 -= &*t2;
        t2.assign(&self.re * &other.im);
        self.im *= &other.re;
        self.im += &*t2;
        std::mem::swap(&mut self.re, t1);
    }

    pub fn to_f64s(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl Add for &Cx {
    type Output = Cx;
    fn add(self, o: &Cx) -> Cx {
        let prec = self.prec().max(o.prec());
        Cx {
            re: Float::with_val(prec, &self.re + &o.re),
            im: Float::with_val(prec, &self.im + &o.im),
        }
    }
}

impl Sub for &Cx {
    type Output = Cx;
    fn sub(self, o: &Cx) -> Cx {
        let prec = self.prec().max(o.prec());
        Cx {
            re: Float::with_val(prec, &self.re - &o.re),
            im: Float::with_val(prec, &self.im - &o.im),
        }
    }
}

impl Mul for &Cx {
    type Output = Cx;
    fn mul(self, o: &Cx) -> Cx {
        let prec = self.prec().max(o.prec());
        let mut re = Float::with_val(prec, &self.re * &o.re);
        re -= Float::with_val(prec, &self.im * &o.im);
        let mut im = Float::with_val(prec, &self.re * &o.im);
        im += Float::with_val(prec, &self.im * &o.re);
        Cx { re, im }
    }
}

impl Neg for &Cx {
    type Output = Cx;
    fn neg(self) -> Cx {
        Cx {
            re: Float::with_val(self.re.prec(), -&self.re),
            im: Float::with_val(self.im.prec(), -&self.im),
        }
    }
}

/// Bernoulli numbers B_2, B_4, ..., B_{2 count} from the tangent numbers.
pub fn bernoulli_even(count: usize) -> Vec<Rational> {
    static CACHE: OnceLock<Mutex<Vec<Rational>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(Vec::new()));
    let mut guard = cache.lock().unwrap();
    if guard.len() < count {
        let n = count.max(2 * guard.len()).max(16);
        // tangent numbers T_1..T_n, integer-only recurrence
        let mut t = vec![Integer::new(); n + 1];
        t[1] = Integer::from(1);
        for k in 2..=n {
            t[k] = Integer::from(&t[k - 1] * (k as u32 - 1));
        }
        for k in 2..=n {
            for j in k..=n {
                let a = Integer::from(&t[j - 1] * (j - k) as u32);
                t[j] *= (j - k + 2) as u32;
                t[j] += a;
            }
        }
        let mut out = Vec::with_capacity(n);
        for (idx, tn) in t.iter().enumerate().skip(1) {
            // B_{2m} = (-1)^{m-1} 2m T_m / (4^m (4^m - 1))
            let m = idx as u32;
            let four_m = Integer::from(1) << (2 * m);
            let den = Integer::from(&four_m - 1u32) * &four_m;
            let mut b = Rational::from((Integer::from(tn * (2 * m)), den));
            if m % 2 == 0 {
                b = -b;
            }
            out.push(b);
        }
        *guard = out;
    }
    guard[..count].to_vec()
}

/// Coefficients B_{2j} / (2j (2j-1)) of the Stirling series, j = 1..count.
fn stirling_coefficients(prec: u32, count: usize) -> Vec<Float> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, usize), Vec<Float>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&(prec, count)) {
        return v.clone();
    }
    let out: Vec<Float> = bernoulli_even(count)
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let two_j = 2 * (i as u32 + 1);
            Float::with_val(prec, b) / (two_j * (two_j - 1))
        })
        .collect();
    cache.lock().unwrap().insert((prec, count), out.clone());
    out
}

/// Gamma(z) for complex z away from the poles.
pub fn gamma(z: &Cx) -> Cx {
    let prec = z.prec();
    let wp = prec + 16;
    let z = z.with_prec(wp);
    // shift Re z up to R so the Stirling remainder is below 2^-wp
    let r_min = 0.12 * wp as f64 + 8.0;
    let x = z.re.to_f64();
    let shift = if x < r_min { (r_min - x).ceil() as u32 } else { 0 };
    let mut denom = Cx::one(wp);
    let mut zs = z.clone();
    for _ in 0..shift {
        denom = &denom * &zs;
        zs.re += 1u32;
    }
    let lg = ln_gamma_stirling(&zs);
    lg.exp().div(&denom).with_prec(prec)
}

/// Stirling series for ln Gamma(z), valid for large Re z.
fn ln_gamma_stirling(z: &Cx) -> Cx {
    let wp = z.prec();
    let half_ln_two_pi = Float::with_val(wp, two_pi(wp).ln()) / 2u32;
    let lnz = z.ln();
    let mut acc = &(z.add_real(&Float::with_val(wp, -0.5))) * &lnz;
    acc = &acc - z;
    acc.re += &half_ln_two_pi;
    let zinv = z.recip();
    let zinv2 = &zinv * &zinv;
    let mut pw = zinv.clone();
    let absz = z.abs().to_f64();
    let max_terms = ((std::f64::consts::PI * absz) as usize).clamp(4, 400);
    let coeffs = stirling_coefficients(wp, max_terms);
    let target = -(wp as i64) - 8;
    for c in coeffs.iter() {
        let term = pw.scale(c);
        let mag = term.abs();
        acc = &acc + &term;
        if mag.is_zero() || (mag.get_exp().unwrap_or(i32::MIN) as i64) < target {
            break;
        }
        pw = &pw * &zinv2;
    }
    acc
}

/// ln|Gamma(x + iy)| in double precision for x > 0.
pub fn ln_gamma_abs_f64(x: f64, y: f64) -> f64 {
    let mut shift_acc = 0.0;
    let mut xr = x;
    while xr < 12.0 {
        shift_acc += 0.5 * (xr * xr + y * y).ln();
        xr += 1.0;
    }
    // Re of Stirling: (z - 1/2) ln z - z + ln(2 pi)/2 + 1/(12 z) - 1/(360 z^3) + 1/(1260 z^5)
    let r2 = xr * xr + y * y;
    let th = y.atan2(xr);
    let lnr = 0.5 * r2.ln();
    let (ur, ui) = (xr / r2, -y / r2);
    let (u2r, u2i) = (ur * ur - ui * ui, 2.0 * ur * ui);
    let (u3r, u3i) = (ur * u2r - ui * u2i, ur * u2i + ui * u2r);
    let u5r = u3r * u2r - u3i * u2i;
    let re = (xr - 0.5) * lnr - y * th - xr + 0.5 * (2.0 * std::f64::consts::PI).ln() + ur / 12.0
        - u3r / 360.0
        + u5r / 1260.0;
    re - shift_acc
}

/// Upper incomplete Gamma function Gamma(a, x) for complex a and real x > 0.
///
/// The continued fraction is used when x > |a| + 2 or when a is a
/// non-positive integer; otherwise Gamma(a) minus the lower series.
pub fn upper_incomplete_gamma(a: &Cx, x: &Float) -> Cx {
    let prec = a.prec().max(x.prec());
    let wp = prec + 24;
    let a = a.with_prec(wp);
    let x = Float::with_val(wp, x);
    let absa = a.abs().to_f64();
    let xf = x.to_f64();
    let nonpositive_integer = a.im.is_zero() && a.re.is_integer() && a.re <= 0;
    let out = if xf > absa + 2.0 || nonpositive_integer {
        incgamma_continued_fraction(&a, &x)
    } else {
        let lower = lower_incomplete_gamma_series(&a, &x);
        &gamma(&a) - &lower
    };
    out.with_prec(prec)
}

/// e^{-x} x^a / (x + 1 - a - 1(1-a)/(x + 3 - a - 2(2-a)/(x + 5 - a - ...))), modified Lentz.
fn incgamma_continued_fraction(a: &Cx, x: &Float) -> Cx {
    let wp = a.prec();
    let tiny = Float::with_val(wp, Float::i_exp(1, -(wp as i32) * 2));
    let one = Cx::one(wp);
    let mut b = Cx::real(Float::with_val(wp, x + 1u32));
    b = &b - a;
    let mut c = Cx::real(Float::with_val(wp, 1) / &tiny);
    let mut d = b.recip();
    let mut h = d.clone();
    let eps_exp = -(wp as i32) + 2;
    for i in 1..200_000u32 {
        // an = -i (i - a)
        let mut an = a.clone();
        an.re = Float::with_val(wp, i) - &an.re;
        an.im = -an.im;
        let an = an.scale(&Float::with_val(wp, -(i as i64)));
        b.re += 2u32;
        d = &(&an * &d) + &b;
        if d.abs().is_zero() {
            d = Cx::real(tiny.clone());
        }
        c = &b + &an.div(&c);
        if c.abs().is_zero() {
            c = Cx::real(tiny.clone());
        }
        d = d.recip();
        let del = &d * &c;
        h = &h * &del;
        let diff = (&del - &one).abs();
        if diff.is_zero() || diff.get_exp().unwrap_or(i32::MIN) < eps_exp {
            break;
        }
    }
    // e^{-x} x^a
    let lx = Float::with_val(wp, x.ln_ref());
    let mut e = a.scale(&lx);
    e.re -= x;
    &e.exp() * &h
}

/// gamma(a, x) = e^{-x} x^a sum_k x^k / (a (a+1) ... (a+k)).
fn lower_incomplete_gamma_series(a: &Cx, x: &Float) -> Cx {
    let wp = a.prec();
    let mut term = a.recip();
    let mut sum = term.clone();
    let mut ak = a.clone();
    let eps_exp = -(wp as i32) - 4;
    for _ in 0..1_000_000 {
        ak.re += 1u32;
        term = term.scale(x).div(&ak);
        sum = &sum + &term;
        let t = term.abs();
        let s = sum.abs();
        if t.is_zero() || t.get_exp().unwrap_or(i32::MIN) < s.get_exp().unwrap_or(0) + eps_exp {
            break;
        }
    }
    let lx = Float::with_val(wp, x.ln_ref());
    let mut e = a.scale(&lx);
    e.re -= x;
    &e.exp() * &sum
}

/// Parse a decimal complex literal such as "13", "0.5+2i", "-1.25-0.5i", "3i".
pub fn parse_complex(text: &str, prec: u32) -> Option<Cx> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return None;
    }
    let parse_real = |s: &str| -> Option<Float> {
        Float::parse(s).ok().map(|v| Float::with_val(prec, v))
    };
    if let Some(body) = t.strip_suffix('i') {
        // split at the last sign that is not part of an exponent
        let bytes = body.as_bytes();
        let mut split = None;
        for idx in (1..bytes.len()).rev() {
            let ch = bytes[idx];
            if (ch == b'+' || ch == b'-') && !matches!(bytes[idx - 1], b'e' | b'E') {
                split = Some(idx);
                break;
            }
        }
        let (re_s, im_s) = match split {
            Some(idx) => (&body[..idx], &body[idx..]),
            None => ("0", body),
        };
        let im_s = match im_s {
            "" | "+" => "1",
            "-" => "-1",
            s => s,
        };
        let im_s = im_s.strip_prefix('+').unwrap_or(im_s);
        Some(Cx::new(parse_real(re_s)?, parse_real(im_s)?))
    } else {
        Some(Cx::real(parse_real(&t)?))
    }
}

/// Exact rational value of a finite float.
pub fn float_to_rational(x: &Float) -> Option<Rational> {
    x.to_rational()
}

pub fn int_to_float(prec: u32, n: &Integer) -> Float {
    Float::with_val(prec, n)
}
