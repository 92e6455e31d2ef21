//! Smoothed Mellin-Barnes evaluation on one vertical line.
//!
//! With g(z) = exp(beta (z - s)) and s' = w + 1 - s,
//!
//!   Lambda(s) = I1 + eps I2 + sum_rho r_rho g(rho) / (s - rho),
//!   I1 = (1/2 pi i) int_(c) Lambda(z) g(z) / (z - s) dz,
//!   I2 = (1/2 pi i) int_(c) Lambda~(z) g(w + 1 - z) / (z - s') dz,
//!
//! where Lambda~ has the conjugate coefficients. Both integrals use the
//! trapezoid rule on z_j = c + i j h. Inserting the truncated Dirichlet
//! series, the sums L_N(z_j) do not depend on s or beta, so they are
//! computed once per node set. The identity holds for every beta only when
//! the functional equation does, which is what the root-number solver and
//! the self-check exploit.

use std::collections::HashMap;
use std::f64::consts::{LN_2, PI};

use rug::{Assign, Float};

use super::{LFunctionSpec, LValue, RootNumber};
use crate::cyclo::Cyclo;
use crate::error::{Error, Result};
use crate::numeric::{pi, Cx};

/// Second smoothing used for root numbers and self-checks.
pub const SMOOTHING_BETA: f64 = 0.5;

const DELTAS: [f64; 8] = [2.0, 3.0, 4.0, 6.0, 8.0, 11.0, 15.0, 20.0];

#[derive(Clone, Copy, Debug)]
struct Side {
    /// pole of 1/(z - s) or 1/(z - s')
    sigma: f64,
    tau: f64,
    /// ln |g| = slope (x - sigma)
    slope: f64,
    ln_target: f64,
    ln_size: f64,
}

#[derive(Clone, Debug)]
struct Geometry {
    c1: f64,
    h: f64,
    nodes: i64,
    terms: usize,
    wp: u32,
    loss_bits: f64,
}

fn ln_sum_exp(values: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.filter(|x| x.is_finite()).collect();
    let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

struct Estimator<'a> {
    spec: &'a LFunctionSpec,
    half_w: f64,
    d: f64,
    int_cache: HashMap<i64, f64>,
}

impl<'a> Estimator<'a> {
    fn new(spec: &'a LFunctionSpec) -> Self {
        Estimator {
            spec,
            half_w: spec.weight as f64 / 2.0,
            d: spec.degree as f64,
            int_cache: HashMap::new(),
        }
    }

    /// ln of sum |b_n| n^{-x}.
    fn ln_dirichlet_bound(&self, x: f64) -> f64 {
        let sig = x - self.half_w;
        if sig > 1.05 {
            self.d * (1.0 + 1.0 / (sig - 1.0)).ln()
        } else {
            self.d * 13f64.ln()
        }
    }

    fn ln_abs_f(&self, side: &Side, x: f64, t: f64) -> f64 {
        self.spec.ln_abs_completion(x, t) + self.ln_dirichlet_bound(x) + side.slope * (x - side.sigma)
            - 0.5 * ((x - side.sigma).powi(2) + (t - side.tau).powi(2)).ln()
    }

    /// ln of (1/2 pi) int |F(x + it)| dt, sampled.
    fn ln_line_integral(&self, side: &Side, x: f64, t_max: f64) -> f64 {
        let step = 0.25;
        let k = (t_max / step).ceil() as i64;
        ln_sum_exp((-k..=k).map(|i| self.ln_abs_f(side, x, i as f64 * step))) + step.ln()
            - (2.0 * PI).ln()
    }

    /// ln int |Q^{z/2} G(z)| dt on Re z = c, with c on a half-integer grid.
    fn ln_int_completion(&mut self, c: f64) -> f64 {
        let key = (c * 2.0).round() as i64;
        if let Some(v) = self.int_cache.get(&key) {
            return *v;
        }
        let base = self.spec.ln_abs_completion(c, 0.0);
        let step = 0.1 * (1.0 + c.abs().sqrt());
        let mut acc = 0.5;
        let mut t = step;
        loop {
            let r = (self.spec.ln_abs_completion(c, t) - base).exp();
            acc += r;
            if r < 1e-18 || t > 1e5 {
                break;
            }
            t += step;
        }
        let v = base + (2.0 * acc * step).ln();
        self.int_cache.insert(key, v);
        v
    }

    /// ln of the tail sum_{n > N} |b_n| |W(n)| for one side.
    fn ln_tail(&mut self, side: &Side, n: f64) -> f64 {
        let ln_n = n.ln();
        let c_lo = side.sigma.max(self.half_w + 1.0) + 0.5;
        let mut best = f64::INFINITY;
        let mut worse = 0;
        let mut c = c_lo;
        while c < c_lo + 4000.0 {
            let v = -(2.0 * PI).ln() + self.ln_int_completion(c) + side.slope * (c - side.sigma)
                - (c - side.sigma).ln()
                + (self.half_w + 1.0 - c) * ln_n
                + (self.d - 1.0) * (1.0 + ln_n).ln()
                - (c - self.half_w - 1.0).ln();
            if v < best {
                best = v;
                worse = 0;
            } else {
                worse += 1;
                if worse > 12 {
                    break;
                }
            }
            c += 0.5;
        }
        best
    }

    fn terms_needed(&mut self, sides: &[Side]) -> usize {
        let slack = ((4 * sides.len()) as f64).ln();
        let mut needed = 1usize;
        for side in sides {
            let ok = |est: &mut Self, n: usize| est.ln_tail(side, n as f64) <= side.ln_target - slack;
            if ok(self, needed) {
                continue;
            }
            let mut hi = needed.max(2);
            while !ok(self, hi) {
                hi *= 2;
                if hi > 1 << 34 {
                    break;
                }
            }
            let mut lo = hi / 2;
            while hi - lo > 1 {
                let mid = (lo + hi) / 2;
                if ok(self, mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            needed = needed.max(hi);
        }
        needed
    }

    /// Height beyond which the integrand is negligible on Re z = x.
    fn node_height(&self, side: &Side, x: f64) -> f64 {
        let mut t = 0.0;
        let mut quiet = 0;
        loop {
            let v = self
                .ln_abs_f(side, x, side.tau + t)
                .max(self.ln_abs_f(side, x, side.tau - t));
            if v < side.ln_target - 12.0 {
                quiet += 1;
                if quiet >= 4 {
                    return t + side.tau.abs();
                }
            } else {
                quiet = 0;
            }
            t += 0.5;
            if t > 1e6 {
                return t;
            }
        }
    }
}

fn ln_lambda_estimate(spec: &LFunctionSpec, s: &Cx) -> f64 {
    let (sigma, tau) = s.to_f64s();
    let w1 = spec.weight as f64 + 1.0;
    let (x, y) = if sigma >= w1 / 2.0 { (sigma, tau) } else { (w1 - sigma, -tau) };
    spec.ln_abs_completion(x, y)
}

fn sides_for(spec: &LFunctionSpec, points: &[Cx], betas: &[f64], prec: u32) -> Vec<Side> {
    let w1 = spec.weight as f64 + 1.0;
    let mut out = Vec::new();
    for s in points {
        let (sigma, tau) = s.to_f64s();
        let size = ln_lambda_estimate(spec, s);
        let target = size - (prec as f64 + 12.0) * LN_2;
        for &beta in betas {
            out.push(Side { sigma, tau, slope: beta, ln_target: target, ln_size: size });
            out.push(Side {
                sigma: w1 - sigma,
                tau: -tau,
                slope: -beta,
                ln_target: target,
                ln_size: size,
            });
        }
    }
    out
}

fn plan(spec: &LFunctionSpec, points: &[Cx], betas: &[f64], prec: u32, complex_nodes: bool) -> Geometry {
    let mut est = Estimator::new(spec);
    let sides = sides_for(spec, points, betas, prec);
    let terms = est.terms_needed(&sides);
    let sigma_a = spec.abscissa_of_convergence();
    let base = sides.iter().map(|s| s.sigma).fold(sigma_a - 0.5, f64::max);
    let mut best: Option<(f64, Geometry)> = None;
    for &delta in DELTAS.iter() {
        let c1 = base + delta;
        let a = (0.75 * delta).min(c1 - sigma_a - 0.25);
        if a < 0.5 {
            continue;
        }
        let t_max = sides
            .iter()
            .map(|s| est.node_height(s, c1 + a).max(est.node_height(s, c1)))
            .fold(0.0, f64::max);
        let mut h = f64::INFINITY;
        let mut loss: f64 = 0.0;
        for side in &sides {
            let m_plus = est.ln_line_integral(side, c1 + a, t_max + 10.0);
            let m_minus = est.ln_line_integral(side, c1 - a, t_max + 10.0);
            let m_a = m_plus.max(m_minus);
            let denom = (2f64.ln() + m_a - side.ln_target + 1.0).max(1.0);
            h = h.min(2.0 * PI * a / denom);
            let m0 = est.ln_line_integral(side, c1, t_max + 10.0);
            loss = loss.max((m0 - side.ln_size) / LN_2);
        }
        let nodes = (t_max / h).ceil().max(1.0) as i64;
        let span = if complex_nodes { 2 * nodes + 1 } else { nodes + 1 } as f64;
        let wp = prec as f64 + 20.0 + loss.max(0.0) + span.log2() + (terms as f64).log2() / 2.0;
        let wpf = wp / 64.0;
        let cost = terms as f64 * span * wpf.powf(1.6) + span * est.d * 60.0 * wpf * wpf;
        let g = Geometry {
            c1,
            h,
            nodes,
            terms,
            wp: wp.ceil() as u32,
            loss_bits: loss.max(0.0),
        };
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, g));
        }
    }
    best.expect("at least one strip width is admissible").1
}

/// Dirichlet sums and completion factors on the node set.
struct NodeSet {
    geo: Geometry,
    c1: Float,
    h: Float,
    /// index j + offset
    offset: i64,
    /// L_N(z_j) for j in [-offset, nodes]
    sums: Vec<Cx>,
    /// (h / 2 pi) Q^{z_j/2} G(z_j) for j in [0, nodes]
    base: Vec<Cx>,
    real: bool,
}

impl NodeSet {
    fn build(spec: &LFunctionSpec, geo: Geometry) -> Result<NodeSet> {
        let b = spec.coefficients(geo.terms)?;
        let real = b.iter().all(|c| c.as_rational().is_some());
        let wp = geo.wp;
        let c1 = Float::with_val(wp, geo.c1);
        let h = Float::with_val(wp, geo.h);
        let offset = if real { 0 } else { geo.nodes };
        let sums = node_sums(&b, real, &c1, &h, offset, geo.nodes, wp);
        let scale = Float::with_val(wp, &h / &crate::numeric::two_pi(wp));
        let base = (0..=geo.nodes)
            .map(|j| {
                let z = Cx::new(c1.clone(), Float::with_val(wp, &h * j));
                spec.completion_factor(&z).scale(&scale)
            })
            .collect();
        Ok(NodeSet { geo, c1, h, offset, sums, base, real })
    }

    fn z(&self, j: i64) -> Cx {
        Cx::new(self.c1.clone(), Float::with_val(self.geo.wp, &self.h * j))
    }

    fn base(&self, j: i64) -> Cx {
        if j >= 0 {
            self.base[j as usize].clone()
        } else {
            self.base[(-j) as usize].conj()
        }
    }

    fn l(&self, j: i64) -> Cx {
        if self.real && j < 0 {
            self.sums[(-j) as usize].conj()
        } else {
            self.sums[(j + self.offset) as usize].clone()
        }
    }

    /// conj(L_N(conj z_j)), the dual series.
    fn l_dual(&self, j: i64) -> Cx {
        if self.real {
            self.l(j)
        } else {
            self.l(-j).conj()
        }
    }

    /// (I1, I2, polar part) at s with smoothing beta.
    fn pieces(&self, spec: &LFunctionSpec, s: &Cx, beta: f64) -> (Cx, Cx, Cx) {
        let wp = self.geo.wp;
        let s = s.with_prec(wp);
        let s_dual = (-&s).add_real(&Float::with_val(wp, spec.weight + 1));
        let beta_f = Float::with_val(wp, beta);
        let mut i1 = Cx::zero(wp);
        let mut i2 = Cx::zero(wp);
        for j in -self.geo.nodes..=self.geo.nodes {
            let z = self.z(j);
            let base = self.base(j);
            let d1 = &z - &s;
            let d2 = &z - &s_dual;
            let mut t1 = &(&base * &self.l(j)) * &d1.recip();
            let mut t2 = &(&base * &self.l_dual(j)) * &d2.recip();
            if beta != 0.0 {
                t1 = &t1 * &d1.scale(&beta_f).exp();
                t2 = &t2 * &(-&d2).scale(&beta_f).exp();
            }
            i1 = &i1 + &t1;
            i2 = &i2 + &t2;
        }
        let mut polar = Cx::zero(wp);
        for p in &spec.poles {
            let rho = Cx::from_rational(wp, &p.at);
            let diff = &s - &rho;
            let mut term = diff.recip().scale_rational(&p.residue);
            if beta != 0.0 {
                term = &term * &(-&diff).scale(&beta_f).exp();
            }
            polar = &polar + &term;
        }
        (i1, i2, polar)
    }
}

fn node_sums(b: &[Cyclo], real: bool, c1: &Float, h: &Float, offset: i64, nodes: i64, wp: u32) -> Vec<Cx> {
    let count = (offset + nodes + 1) as usize;
    let mut re: Vec<Float> = vec![Float::new(wp); count];
    let mut im: Vec<Float> = vec![Float::new(wp); count];
    let mut pr = Float::new(wp);
    let mut pi_ = Float::new(wp);
    let mut t1 = Float::new(wp);
    let mut t2 = Float::new(wp);
    let mut wr = Float::new(wp);
    let mut wi = Float::new(wp);
    for (idx, bn) in b.iter().enumerate() {
        if bn.is_zero() {
            continue;
        }
        let n = idx as u64 + 1;
        let ln_n = Float::with_val(wp, n).ln();
        let mag = (-Float::with_val(wp, c1 * &ln_n)).exp();
        let coef = if real {
            let q = bn.as_rational().expect("real coefficients");
            Cx::real(Float::with_val(wp, &q * &mag))
        } else {
            bn.to_complex(wp).scale(&mag)
        };
        let theta = Float::with_val(wp, h * &ln_n);
        let (sin, cos) = theta.clone().sin_cos(Float::new(wp));
        wr.assign(&cos);
        wi.assign(-&sin);
        if offset != 0 {
            // start at j = -offset: multiply by exp(+i theta offset)
            let ang = Float::with_val(wp, &theta * offset);
            let start = Cx::from_polar_unit(&ang);
            let c0 = &coef * &start;
            pr.assign(&c0.re);
            pi_.assign(&c0.im);
        } else {
            pr.assign(&coef.re);
            pi_.assign(&coef.im);
        }
        for k in 0..count {
            re[k] += &pr;
            im[k] += &pi_;
            t1.assign(&pr * &wr);
            t2.assign(&pi_ * &wi);
            t1 -= &t2;
            t2.assign(&pr * &wi);
            pi_ *= &wr;
            pi_ += &t2;
            std::mem::swap(&mut pr, &mut t1);
        }
    }
    re.into_iter().zip(im).map(|(r, i)| Cx::new(r, i)).collect()
}

fn relative_bound(geo: &Geometry, ln_target: f64, lambda: &Cx, prec: u32) -> f64 {
    let ln_abs = lambda.abs().to_f64().ln();
    let truncation = (ln_target + 6f64.ln() - ln_abs).exp();
    let rounding = 2f64.powf(-(geo.wp as f64 - geo.loss_bits - 8.0));
    let _ = prec;
    (truncation + rounding).max(f64::MIN_POSITIVE)
}

pub(super) fn evaluate_points(spec: &LFunctionSpec, points: &[Cx], prec: u32) -> Result<Vec<LValue>> {
    let eps = spec
        .root_number
        .value(prec + 64)
        .ok_or_else(|| Error::State("root number unresolved".into()))?;
    let geo = plan(spec, points, &[0.0], prec, false);
    let nodes = NodeSet::build(spec, geo)?;
    let wp = nodes.geo.wp;
    let eps = eps.with_prec(wp);
    points
        .iter()
        .map(|s| {
            let (i1, i2, polar) = nodes.pieces(spec, s, 0.0);
            let lambda = &(&i1 + &(&eps * &i2)) + &polar;
            let ln_target = ln_lambda_estimate(spec, s) - (prec as f64 + 12.0) * LN_2;
            Ok(finish(spec, s, lambda, &nodes.geo, ln_target, prec))
        })
        .collect()
}

fn finish(
    spec: &LFunctionSpec,
    s: &Cx,
    lambda: Cx,
    geo: &Geometry,
    ln_target: f64,
    prec: u32,
) -> LValue {
    let wp = lambda.prec();
    let value = if spec.gamma_has_pole_at(s) {
        Cx::zero(prec)
    } else {
        lambda.div(&spec.completion_factor(&s.with_prec(wp))).with_prec(prec)
    };
    LValue {
        s: s.with_prec(prec),
        value,
        truncation_error_bound: relative_bound(geo, ln_target, &lambda, prec),
        completed: lambda.with_prec(prec),
        precision_bits: prec,
        terms: geo.terms,
        partial: spec.partial,
    }
}

pub(super) fn solve_root_number(spec: &LFunctionSpec, probes: &[Cx], prec: u32) -> Result<RootNumber> {
    let betas = [0.0, SMOOTHING_BETA];
    let geo = plan(spec, probes, &betas, prec, true);
    let nodes = NodeSet::build(spec, geo)?;
    let wp = nodes.geo.wp;
    let mut found: Vec<Cx> = Vec::new();
    for s in probes {
        let (a1, a2, ap) = nodes.pieces(spec, s, 0.0);
        let (b1, b2, bp) = nodes.pieces(spec, s, SMOOTHING_BETA);
        let num = &(&b1 + &bp) - &(&a1 + &ap);
        let den = &a2 - &b2;
        if den.abs().is_zero() {
            return Err(Error::Resolution("degenerate probe point".into()));
        }
        found.push(num.div(&den));
    }
    let tol = Float::with_val(wp, Float::i_exp(1, -((prec / 3).max(16) as i32)));
    for e in &found {
        let dev = Float::with_val(wp, e.abs() - 1u32).abs();
        if dev > tol {
            return Err(Error::Resolution(format!(
                "|eps| = {:.6} at a probe point, not on the unit circle",
                e.abs().to_f64()
            )));
        }
    }
    for e in &found[1..] {
        if (e - &found[0]).abs() > tol {
            return Err(Error::Resolution(format!(
                "probe points disagree: {:?} vs {:?}",
                found[0].to_f64s(),
                e.to_f64s()
            )));
        }
    }
    let eps = found[0].clone();
    if spec.self_dual {
        for sign in [1i8, -1] {
            let d = Float::with_val(wp, &eps.re - sign as i32).abs();
            if d <= tol && Float::with_val(wp, eps.im.clone().abs()) <= tol {
                return Ok(RootNumber::Sign(sign));
            }
        }
        return Err(Error::Resolution(format!(
            "self-dual spec but eps = {:?} is not +-1",
            eps.to_f64s()
        )));
    }
    let unit = eps.scale(&Float::with_val(wp, eps.abs().recip_ref()));
    Ok(RootNumber::Numeric(unit.with_prec(prec)))
}

pub(super) fn smoothing_residuals(spec: &LFunctionSpec, samples: &[Cx], prec: u32) -> Result<Vec<f64>> {
    let betas = [0.0, SMOOTHING_BETA];
    let geo = plan(spec, samples, &betas, prec, true);
    let nodes = NodeSet::build(spec, geo)?;
    let wp = nodes.geo.wp;
    let eps = spec.root_number.value(wp).expect("checked by caller");
    let _ = pi(wp);
    Ok(samples
        .iter()
        .map(|s| {
            let (a1, a2, ap) = nodes.pieces(spec, s, 0.0);
            let (b1, b2, bp) = nodes.pieces(spec, s, SMOOTHING_BETA);
            let l0 = &(&a1 + &(&eps * &a2)) + &ap;
            let l1 = &(&b1 + &(&eps * &b2)) + &bp;
            let diff = (&l0 - &l1).abs();
            Float::with_val(wp, &diff / &l0.abs()).to_f64()
        })
        .collect())
}
