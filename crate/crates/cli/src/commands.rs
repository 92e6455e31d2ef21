use std::path::Path;

use rug::{Float, Rational};
use serde_json::{json, Value};
use symval_core::analytic::{
    default_samples, dirichlet_spec, fe_selfcheck, resolve_and_evaluate, resolve_root_number, zeta_spec,
    LFunctionSpec,
};
use symval_core::characters::{gauss_sum, parse_character, primitive_characters, trivial_character, DirichletCharacter};
use symval_core::cohomology::{clozel_weights_both_signs, cuspidal_range, jwl_admissible, rankin_cohomological};
use symval_core::critical::{critical_set, deligne_prediction, ratio_exponent, RatioExponent};
use symval_core::dihedral::{cm_newform, parse_conductor, verify_decomposition, CMForm, HeckeCharacter, ImagQuadField};
use symval_core::error::{Error, Result};
use symval_core::numeric::parse_complex;
use symval_core::qseries::{builtin_form, load_newform};
use symval_core::satake::{dirichlet_coeffs, local_factor, BadPrimeMode};
use symval_core::verify::{
    deligne_ratio_test, dihedral_value_test, twist_test_many, DihedralValueOptions, FormSource, Status,
    VerificationReport, VerifyOptions,
};

use crate::config::Config;
use crate::output::{csv_string, Output};
use crate::{Command, FormArgs, HeckeArgs, LArgs, VerifyCommand};

const BUILTINS: [&str; 3] = ["delta", "e4delta", "e6delta"];

fn form_source(name: &str) -> Result<FormSource> {
    if BUILTINS.contains(&name) {
        return Ok(FormSource::builtin(name));
    }
    let bytes = std::fs::read(name).map_err(|e| Error::Parse {
        location: name.to_string(),
        message: format!("not a built-in form and not readable: {e}"),
    })?;
    Ok(FormSource::Fixed(load_newform(&bytes)?))
}

fn character(text: Option<&str>) -> Result<DirichletCharacter> {
    match text {
        Some(t) => parse_character(t),
        None => Ok(trivial_character()),
    }
}

fn fmt_float(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".into();
    }
    x.to_string_radix(10, Some(digits))
}

fn digits_for(prec: u32) -> usize {
    ((prec as f64) * std::f64::consts::LOG10_2).floor() as usize
}

fn cx_text(re: &str, im: &str) -> String {
    match im.strip_prefix('-') {
        Some(rest) => format!("{re} - {rest} i"),
        None => format!("{re} + {im} i"),
    }
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(|t| {
            t.trim().parse().map_err(|_| Error::Parse {
                location: what.to_string(),
                message: format!("cannot parse {t:?}"),
            })
        })
        .collect()
}

fn spec_for(args: &LArgs, cfg: &Config) -> Result<LFunctionSpec> {
    if args.zeta {
        return Ok(zeta_spec());
    }
    if let Some(c) = &args.dirichlet {
        return dirichlet_spec(&parse_character(c)?);
    }
    let eta = character(args.form.character.as_deref())?;
    form_source(&args.form.form)?.spec(args.form.n, &eta, cfg.coefficient_budget)
}

fn newform_for(args: &FormArgs, len: usize, cfg: &Config) -> Result<symval_core::qseries::Newform> {
    if len > cfg.coefficient_budget {
        return Err(Error::Resource(format!(
            "{len} coefficients requested, budget is {}",
            cfg.coefficient_budget
        )));
    }
    match form_source(&args.form)? {
        FormSource::Builtin(name) => builtin_form(&name, len.max(16)),
        FormSource::Fixed(f) => Ok(f),
    }
}

fn hecke_character(h: &HeckeArgs) -> Result<HeckeCharacter> {
    let field = ImagQuadField::new(h.disc)?;
    HeckeCharacter::new(h.disc, h.u, parse_conductor(&field, &h.conductor)?)
}

fn cm_form(h: &HeckeArgs, len: usize) -> Result<CMForm> {
    cm_newform(&hecke_character(h)?, len)
}

fn report_output(r: &VerificationReport) -> Output {
    let mut text = format!("{} {}\n", r.test, r.status);
    for c in &r.cases {
        let rec = match &c.recognized {
            Some(v) => v.join(", "),
            None => "-".into(),
        };
        text.push_str(&format!("  {}: {} [{}]\n", c.label, rec, c.status));
    }
    if let Some(res) = r.residual {
        text.push_str(&format!("  residual {res:e}\n"));
    }
    let mut csv = vec![vec!["case".into(), "recognized".into(), "confirmed".into(), "status".into()]];
    for c in &r.cases {
        csv.push(vec![
            c.label.clone(),
            c.recognized.as_ref().map(|v| v.join(" ")).unwrap_or_default(),
            c.confirmed.as_ref().map(|v| v.join(" ")).unwrap_or_default(),
            c.status.to_string(),
        ]);
    }
    let mut json = serde_json::to_value(r).expect("serializable report");
    json["recognized"] = json!(r.recognized());
    Output::new(json, text, csv).with_status(r.status)
}

/// A harness that cannot run its evaluations (budget, missing
/// coefficients) reports inconclusive rather than failing.
fn inconclusive(test: &str, inputs: Value, reason: &Error, cfg: &Config) -> Output {
    let json = json!({
        "test": test,
        "inputs": inputs,
        "recognized": [],
        "status": "inconclusive",
        "precision": cfg.precision_bits,
        "reason": reason.to_string(),
    });
    let text = format!("{test} inconclusive: {reason}\n");
    let csv = vec![vec!["status".into(), "reason".into()], vec!["inconclusive".into(), reason.to_string()]];
    Output::new(json, text, csv).with_status(Status::Inconclusive)
}

fn verify_options(cfg: &Config, confirm: Option<u32>) -> VerifyOptions {
    VerifyOptions {
        precision: cfg.precision_bits,
        confirm_precision: Some(confirm.unwrap_or(2 * cfg.precision_bits)),
        height_cap: cfg.height_cap.clone(),
        budget: cfg.coefficient_budget,
    }
}

fn harness_result(test: &str, inputs: Value, r: Result<VerificationReport>, cfg: &Config) -> Result<Output> {
    match r {
        Ok(rep) => Ok(report_output(&rep)),
        Err(e @ (Error::Resource(_) | Error::Range { .. })) => Ok(inconclusive(test, inputs, &e, cfg)),
        Err(e) => Err(e),
    }
}

pub fn run(cmd: &Command, cfg: &Config) -> Result<Output> {
    match cmd {
        Command::Critical { n, k } => {
            if *n == 0 || *k == 0 {
                return Err(Error::Domain("n and k must be positive".into()));
            }
            let set = critical_set(*n, *k);
            let text = set.members.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(" ");
            let mut csv = vec![vec!["m".to_string()]];
            csv.extend(set.members.iter().map(|m| vec![m.to_string()]));
            let json = json!({"n": n, "k": k, "members": set.members, "center": set.center.to_string()});
            Ok(Output::new(json, text, csv))
        }
        Command::Predict { n, k, m, m2 } => match m2 {
            None => {
                let p = deligne_prediction(*n, *m, *k)?;
                let text = format!(
                    "(2 pi i)^{} c+^{} c-^{} delta^{}",
                    p.pow_2pii, p.e_plus, p.e_minus, p.e_delta
                );
                let csv = vec![
                    vec!["pow_2pii".into(), "e_plus".into(), "e_minus".into(), "e_delta".into()],
                    vec![p.pow_2pii.to_string(), p.e_plus.to_string(), p.e_minus.to_string(), p.e_delta.to_string()],
                ];
                let json = json!({"n": n, "k": k, "m": m, "prediction": p});
                Ok(Output::new(json, text, csv))
            }
            Some(m2) => {
                let r = ratio_exponent(*n, *m, *m2, *k)?;
                let text = match &r {
                    RatioExponent::Cancels { pow_2pii, gauss_multiplicity } => {
                        format!("(2 pi i)^{pow_2pii} g^{gauss_multiplicity}")
                    }
                    RatioExponent::NoCancellation => "no cancellation".into(),
                };
                let csv = vec![vec!["ratio".into()], vec![text.clone()]];
                let json = json!({"n": n, "k": k, "m1": m, "m2": m2, "ratio": r});
                Ok(Output::new(json, text, csv))
            }
        },
        Command::Euler { form, p } => {
            let f = newform_for(form, (*p as usize).max(16), cfg)?;
            let eta = character(form.character.as_deref())?;
            let fac = local_factor(&f, form.n, &eta, *p, cfg.bad_prime_mode, &[])?;
            let coeffs: Vec<String> = fac.coeffs.iter().map(|c| c.to_string()).collect();
            let text = format!("p={}: {}", p, coeffs.join(" "));
            let mut csv = vec![vec!["degree".into(), "coefficient".into()]];
            csv.extend(coeffs.iter().enumerate().map(|(i, c)| vec![i.to_string(), c.clone()]));
            let json = json!({"p": p, "n": form.n, "coefficients": coeffs});
            Ok(Output::new(json, text, csv))
        }
        Command::Coeffs { form, count } => {
            let f = newform_for(form, *count, cfg)?;
            let eta = character(form.character.as_deref())?;
            let b = dirichlet_coeffs(&f, form.n, &eta, *count, cfg.bad_prime_mode)?;
            let vals: Vec<String> = b.iter().map(|c| c.to_string()).collect();
            let text = vals
                .iter()
                .enumerate()
                .map(|(i, v)| format!("{} {}", i + 1, v))
                .collect::<Vec<_>>()
                .join("\n");
            let mut csv = vec![vec!["m".into(), "b".into()]];
            csv.extend(vals.iter().enumerate().map(|(i, v)| vec![(i + 1).to_string(), v.clone()]));
            let json = json!({"n": form.n, "coefficients": vals});
            Ok(Output::new(json, text, csv))
        }
        Command::Lvalue { source, points, csv } => {
            let prec = cfg.precision_bits;
            let spec = spec_for(source, cfg)?;
            let zs = points
                .iter()
                .map(|t| {
                    parse_complex(t, prec + 32).ok_or_else(|| Error::Parse {
                        location: "--s".into(),
                        message: format!("cannot parse {t:?} as a complex number"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let (resolved, values) = resolve_and_evaluate(&spec, &zs, prec)?;
            let digits = digits_for(prec);
            let mut rows = vec![vec![
                "s".to_string(),
                "re".into(),
                "im".into(),
                "error_bound".into(),
                "terms".into(),
            ]];
            let mut text = format!("{}  root number {}\n", resolved.label, resolved.root_number);
            let mut items = Vec::new();
            for (t, v) in points.iter().zip(&values) {
                // components below the error bound are noise
                let floor = v.value.abs().to_f64() * v.truncation_error_bound.max(2f64.powi(16 - prec as i32));
                let part = |x: &Float| if x.to_f64().abs() < floor { "0".to_string() } else { fmt_float(x, digits) };
                let (re, im) = (part(&v.value.re), part(&v.value.im));
                text.push_str(&format!("L({t}) = {}  (rel. error < {:.1e})\n", cx_text(&re, &im), v.truncation_error_bound));
                rows.push(vec![t.clone(), re.clone(), im.clone(), format!("{:e}", v.truncation_error_bound), v.terms.to_string()]);
                items.push(json!({
                    "s": t,
                    "re": re,
                    "im": im,
                    "error_bound": v.truncation_error_bound,
                    "terms": v.terms,
                    "partial": v.partial,
                }));
            }
            if let Some(path) = csv {
                write_file(path, &csv_string(&rows))?;
            }
            let json = json!({
                "label": resolved.label,
                "root_number": resolved.root_number.to_string(),
                "precision": prec,
                "values": items,
            });
            Ok(Output::new(json, text, rows))
        }
        Command::Fecheck { source, samples } => {
            let prec = cfg.precision_bits;
            let spec = spec_for(source, cfg)?;
            let spec = if spec.root_number.is_resolved() {
                spec
            } else {
                resolve_root_number(&spec, &[], prec)?
            };
            let pts = default_samples(&spec, *samples);
            let fe = fe_selfcheck(&spec, &pts, prec)?;
            let tol = 2f64.powi(-((prec / 2) as i32));
            let status = if fe.max_residual < tol { Status::Pass } else { Status::Fail };
            let text = format!(
                "{} root number {}: max residual {:e} ({status})",
                spec.label, spec.root_number, fe.max_residual
            );
            let mut csv = vec![vec!["sample".into(), "residual".into()]];
            csv.extend(fe.residuals.iter().enumerate().map(|(i, r)| vec![i.to_string(), format!("{r:e}")]));
            let json = json!({
                "label": spec.label,
                "root_number": spec.root_number.to_string(),
                "check": fe,
                "status": status,
            });
            Ok(Output::new(json, text, csv).with_status(status))
        }
        Command::Verify { test } => run_verify(test, cfg),
        Command::Dihedral { hecke, n, bound } => {
            let phi = cm_form(hecke, *bound as usize + 1)?;
            let rep = verify_decomposition(&phi, *n, *bound)?;
            let status = if rep.passed() { Status::Pass } else { Status::Fail };
            let text = format!(
                "{} Sym^{n}: {} primes checked, {} skipped, failures {:?} ({status})",
                phi.character,
                rep.checked.len(),
                rep.skipped.len(),
                rep.failures()
            );
            let mut csv = vec![vec!["p".into(), "holds".into()]];
            csv.extend(rep.checked.iter().map(|c| vec![c.p.to_string(), c.holds.to_string()]));
            let json = json!({"character": phi.character.to_string(), "report": rep, "status": status});
            Ok(Output::new(json, text, csv).with_status(status))
        }
        Command::Cohomology { range, clozel, admissible, rankin } => run_cohomology(*range, clozel, admissible, rankin),
        Command::Character { character: c, modulus } => run_character(c.as_deref(), *modulus, cfg),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents)
        .map_err(|e| Error::Configuration(format!("cannot write {}: {e}", path.display())))
}

fn run_verify(test: &VerifyCommand, cfg: &Config) -> Result<Output> {
    match test {
        VerifyCommand::Deligne { form, n, pairs, confirm } => {
            let pairs: Vec<(i64, i64)> = match pairs {
                None => Vec::new(),
                Some(text) => text
                    .split(';')
                    .filter(|t| !t.trim().is_empty())
                    .map(|t| {
                        let v: Vec<i64> = parse_list(t, "--pairs")?;
                        match v.as_slice() {
                            [a, b] => Ok((*a, *b)),
                            _ => Err(Error::Parse {
                                location: "--pairs".into(),
                                message: format!("{t:?} is not a pair"),
                            }),
                        }
                    })
                    .collect::<Result<_>>()?,
            };
            let inputs = json!({"form": form, "n": n, "pairs": pairs});
            let src = form_source(form)?;
            let r = deligne_ratio_test(&src, *n, &pairs, &verify_options(cfg, *confirm));
            harness_result("deligne", inputs, r, cfg)
        }
        VerifyCommand::Twist { form, n, character: c, m, confirm } => {
            let ms: Vec<i64> = parse_list(m, "--m")?;
            let eta = parse_character(c)?;
            let inputs = json!({"form": form, "n": n, "character": c, "m": ms});
            let src = form_source(form)?;
            let r = twist_test_many(&src, *n, &eta, &ms, &verify_options(cfg, *confirm));
            harness_result("twist", inputs, r, cfg)
        }
        VerifyCommand::Dihedral { hecke, n, point, bound, rhs_mode, omit_abelian } => {
            let phi = cm_form(hecke, *bound as usize + 1)?;
            let s = parse_complex(point, cfg.precision_bits + 32).ok_or_else(|| Error::Parse {
                location: "--s".into(),
                message: format!("cannot parse {point:?}"),
            })?;
            let rhs_mode: BadPrimeMode = match rhs_mode {
                Some(m) => m.parse()?,
                None => cfg.bad_prime_mode,
            };
            let opts = DihedralValueOptions {
                precision: cfg.precision_bits,
                prime_bound: *bound,
                lhs_mode: cfg.bad_prime_mode,
                rhs_mode,
                omit_abelian: *omit_abelian,
            };
            Ok(report_output(&dihedral_value_test(&phi, *n, &s, &opts)?))
        }
    }
}

fn run_cohomology(
    range: Option<u32>,
    clozel: &Option<String>,
    admissible: &Option<String>,
    rankin: &Option<String>,
) -> Result<Output> {
    if let Some(n) = range {
        if n < 2 {
            return Err(Error::Domain("the cuspidal range needs n >= 2".into()));
        }
        let (b, t) = cuspidal_range(n);
        let csv = vec![vec!["b".into(), "t".into()], vec![b.to_string(), t.to_string()]];
        return Ok(Output::new(json!({"n": n, "b": b, "t": t}), format!("b={b} t={t}"), csv));
    }
    if let Some(text) = clozel {
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        let [n, k, s, eps] = parts.as_slice() else {
            return Err(Error::Parse {
                location: "--clozel".into(),
                message: "expected n,k,s,eps".into(),
            });
        };
        let perr = |what: &str| Error::Parse {
            location: "--clozel".into(),
            message: format!("bad {what}"),
        };
        let n: u32 = n.parse().map_err(|_| perr("n"))?;
        let k: u32 = k.parse().map_err(|_| perr("k"))?;
        let s: Rational = s.parse().map_err(|_| perr("s"))?;
        let eps: u8 = eps.parse().map_err(|_| perr("eps"))?;
        let both = clozel_weights_both_signs(n, k, &s);
        let r = &both[eps.min(1) as usize];
        let (text, json) = match r {
            Ok(mu) => {
                let e: Vec<String> = mu.entries.iter().map(|q| q.to_string()).collect();
                (format!("mu = ({}) w = {}", e.join(", "), mu.weight), json!({"weight": mu}))
            }
            Err(rej) => (format!("rejected: {rej}"), json!({"rejected": rej})),
        };
        let csv = vec![vec!["result".into()], vec![text.clone()]];
        return Ok(Output::new(json, text, csv));
    }
    if let Some(text) = admissible {
        let (w, l) = text.split_once(';').ok_or_else(|| Error::Parse {
            location: "--admissible".into(),
            message: "expected w;l1,l2,...".into(),
        })?;
        let w: i64 = w.trim().parse().map_err(|_| Error::Parse {
            location: "--admissible".into(),
            message: "bad w".into(),
        })?;
        let l: Vec<i64> = parse_list(l, "--admissible")?;
        let ok = jwl_admissible(w, &l);
        let csv = vec![vec!["admissible".into()], vec![ok.to_string()]];
        return Ok(Output::new(json!({"w": w, "l": l, "admissible": ok}), ok.to_string(), csv));
    }
    if let Some(text) = rankin {
        let v: Vec<u32> = parse_list(text, "--rankin")?;
        let [k1, k2] = v.as_slice() else {
            return Err(Error::Parse {
                location: "--rankin".into(),
                message: "expected k1,k2".into(),
            });
        };
        let ok = rankin_cohomological(*k1, *k2);
        let csv = vec![vec!["cohomological".into()], vec![ok.to_string()]];
        return Ok(Output::new(json!({"k1": k1, "k2": k2, "cohomological": ok}), ok.to_string(), csv));
    }
    Err(Error::Domain(
        "cohomology needs one of --range, --clozel, --admissible, --rankin".into(),
    ))
}

fn character_row(chi: &DirichletCharacter, prec: u32) -> (Value, String, Vec<String>) {
    let g = gauss_sum(chi, prec);
    let digits = digits_for(prec).min(40);
    // |g| = sqrt(q), so anything this small is rounding noise
    let noise = Float::with_val(prec, Float::i_exp(1, 16 - prec as i32));
    let snap = |x: &Float| if Float::with_val(prec, x.abs_ref()) < noise { "0".to_string() } else { fmt_float(x, digits) };
    let (re, im) = (snap(&g.value.re), snap(&g.value.im));
    let parity = if chi.is_odd() { "odd" } else { "even" };
    let text = format!(
        "{chi}: order {} conductor {} {parity}{} g = {}",
        chi.order(),
        chi.conductor(),
        if chi.is_primitive() { " primitive" } else { "" },
        cx_text(&re, &im),
    );
    let json = json!({
        "character": chi.to_string(),
        "order": chi.order(),
        "conductor": chi.conductor(),
        "parity": parity,
        "primitive": chi.is_primitive(),
        "gauss_sum": {"re": re, "im": im, "exact": g.exact.map(|c| c.to_string())},
    });
    let row = vec![chi.to_string(), chi.order().to_string(), chi.conductor().to_string(), parity.into(), re, im];
    (json, text, row)
}

fn run_character(c: Option<&str>, modulus: Option<u64>, cfg: &Config) -> Result<Output> {
    let chars = match (c, modulus) {
        (Some(t), None) => vec![parse_character(t)?],
        (None, Some(q)) => primitive_characters(q),
        _ => {
            return Err(Error::Domain("character needs exactly one of --char, --modulus".into()));
        }
    };
    let mut csv = vec![vec![
        "character".to_string(),
        "order".into(),
        "conductor".into(),
        "parity".into(),
        "gauss_re".into(),
        "gauss_im".into(),
    ]];
    let mut texts = Vec::new();
    let mut items = Vec::new();
    for chi in &chars {
        let (j, t, r) = character_row(chi, cfg.precision_bits);
        items.push(j);
        texts.push(t);
        csv.push(r);
    }
    Ok(Output::new(json!({"characters": items}), texts.join("\n"), csv))
}
