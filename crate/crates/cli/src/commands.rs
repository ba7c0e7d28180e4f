use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigInt;
use serde_json::{json, Value};

use alpha_forge::alpha::{alpha_certified, alpha_p, alpha_partial, FieldConstants};
use alpha_forge::avgalpha::{self, alpha_p_of_x, convergence_sweep, mean_alpha_p_with, CoefficientBox};
use alpha_forge::census::{census_form, census_form_naive, psi_exact, theorem42_experiment};
use alpha_forge::dickman::{self, predict};
use alpha_forge::quadfield::{primitive_ideal_count, QuadField};
use alpha_forge::{AlphaEstimate, Error, FieldParams, Parallelism, Polynomial, Result};

use crate::args::*;
use crate::report::Report;

fn poly(s: &str) -> Result<Polynomial> {
    Polynomial::from_str(s)
}

fn field_params(o: &FieldOverride) -> Result<Option<FieldParams>> {
    match (o.field_degree, &o.field_disc, o.p0) {
        (Some(degree), Some(disc), Some(p0)) => {
            let disc_magnitude = BigInt::from_str(disc.trim())
                .map_err(|_| Error::Parse(format!("bad field discriminant {disc:?}")))?;
            Ok(Some(FieldParams {
                degree,
                disc_magnitude: disc_magnitude.magnitude().clone().into(),
                p0,
            }))
        }
        _ => Ok(None),
    }
}

fn estimate_json(e: &AlphaEstimate) -> Value {
    json!({
        "partial_sum": e.partial_sum,
        "tail_bound": e.tail_bound,
        "ramified_correction": e.ramified_correction,
        "rounding_slack": e.rounding_slack,
        "interval_lo": e.interval_lo,
        "interval_hi": e.interval_hi,
        "assumes_rh": e.assumes_rh,
        "field": {
            "degree": e.field.degree,
            "disc_magnitude": e.field.disc_magnitude.to_string(),
            "p0": e.field.p0,
        },
        "constants": constants_json(&e.constants),
    })
}

fn constants_json(c: &FieldConstants) -> Value {
    json!({"a_k": c.a_k, "b_k": c.b_k, "c_k": c.c_k})
}

pub fn alpha(a: &AlphaArgs, config: Value, par: &Parallelism) -> Result<Report> {
    let start = Instant::now();
    let f = poly(&a.poly)?;
    let params = field_params(&a.field)?;
    let explicit = params.is_some();
    let mut result = json!({"poly": f.to_coeff_string(), "cutoff": a.cutoff});
    match alpha_certified(&f, a.cutoff, params, par) {
        Ok(e) => merge(&mut result, estimate_json(&e)),
        Err(Error::Domain(why)) if !a.rh_tail && !explicit => {
            merge(
                &mut result,
                json!({
                    "partial_sum": alpha_partial(&f, a.cutoff, par)?,
                    "tail_bound": null,
                    "interval_lo": null,
                    "interval_hi": null,
                    "assumes_rh": false,
                    "uncertified": why,
                }),
            );
        }
        Err(e) => return Err(e),
    }
    if !a.local.is_empty() {
        let locals = a
            .local
            .iter()
            .map(|&p| {
                let l = alpha_p(&f, p)?;
                Ok(json!({
                    "p": p,
                    "value": l.value,
                    "method": l.method,
                    "approximate": l.approximate,
                    "remainder_bound": l.remainder_bound,
                    "n_p_k": l.profile.map(|pr| pr.counts.iter().map(|c| c.to_string()).collect::<Vec<_>>()),
                }))
            })
            .collect::<Result<Vec<_>>>()?;
        result["local"] = Value::Array(locals);
    }
    result["seconds"] = start.elapsed().as_secs_f64().into();
    Ok(Report::new("alpha", config, result))
}

pub fn rho(a: &RhoArgs, config: Value) -> Result<Report> {
    let value = dickman::rho_deriv(a.u, a.deriv)?;
    Ok(Report::new("rho", config, json!({"u": a.u, "deriv": a.deriv, "value": value}))
        .with_headline(value.to_string()))
}

pub fn predict_cmd(a: &PredictArgs, config: Value) -> Result<Report> {
    let p = predict(a.x, a.bound, a.alpha)?;
    let headline = if a.saias { p.psi_saias_2term } else { p.psi_hildebrand };
    let result = json!({
        "x": p.x,
        "bound": p.b,
        "alpha": p.alpha_shift,
        "shifted_x": p.x * p.alpha_shift.unwrap_or(0.0).exp(),
        "u": p.u,
        "psi_hildebrand": p.psi_hildebrand,
        "psi_saias_2term": p.psi_saias_2term,
        "outside_region": p.outside_region,
        "near_breakpoint": p.near_breakpoint,
    });
    Ok(Report::new("predict", config, result).with_headline(headline.to_string()))
}

pub fn census(a: &CensusArgs, config: Value, par: &Parallelism) -> Result<Report> {
    let f = poly(&a.poly)?;
    let form = f.homogenize();
    let c = census_form(&form, a.norm_bound, a.smooth_bound, par)?;
    let mut result = json!({
        "poly": f.to_coeff_string(),
        "x": c.x,
        "bound": c.b,
        "pairs_total": c.pairs_total,
        "pairs_smooth": c.pairs_smooth,
        "ratio": c.ratio,
        "runtime_seconds": c.runtime_seconds,
    });
    if a.oracle {
        let o = census_form_naive(&form, a.norm_bound, a.smooth_bound)?;
        result["oracle"] = json!({
            "pairs_total": o.pairs_total,
            "pairs_smooth": o.pairs_smooth,
            "agrees": o.pairs_total == c.pairs_total && o.pairs_smooth == c.pairs_smooth,
        });
    }
    Ok(Report::new("census", config, result))
}

pub fn experiment(a: &ExperimentArgs, config: Value, par: &Parallelism) -> Result<Report> {
    let f = poly(&a.poly)?;
    let est = alpha_certified(&f, a.alpha_cutoff, field_params(&a.field)?, par)?;
    let mut rows = Vec::new();
    for &x in &a.norm_bound {
        for &b in &a.smooth_bound {
            let r = theorem42_experiment(&f, x, b, &est, par)?;
            let gap = r.rel_gap_exact.unwrap_or(r.rel_gap_saias);
            rows.push(json!({
                "x": x,
                "bound": b,
                "pairs_total": r.census.pairs_total,
                "pairs_smooth": r.census.pairs_smooth,
                "empirical_ratio": r.empirical_ratio,
                "alpha": r.alpha,
                "shifted_x": r.shifted_x,
                "predicted_exact": r.predicted_exact,
                "predicted_saias": r.predicted_saias,
                "rel_gap_exact": r.rel_gap_exact,
                "rel_gap_saias": r.rel_gap_saias,
                "within_tolerance": gap <= a.tolerance,
                "runtime_seconds": r.census.runtime_seconds,
            }));
        }
    }
    let result = json!({
        "poly": f.to_coeff_string(),
        "alpha": estimate_json(&est),
        "alpha_cutoff": a.alpha_cutoff,
        "tolerance": a.tolerance,
        "rows": rows.clone(),
    });
    Ok(Report::new("experiment-t42", config, result).with_table(rows))
}

fn parse_box(d: usize, s: &str) -> Result<CoefficientBox> {
    let intervals = s
        .split(',')
        .map(|iv| {
            let (lo, hi) = iv
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("interval {iv:?} is not lo:hi")))?;
            let num = |t: &str| {
                t.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::Parse(format!("bad bound {t:?} in {iv:?}")))
            };
            Ok((num(lo)?, num(hi)?))
        })
        .collect::<Result<Vec<_>>>()?;
    CoefficientBox::new(d, intervals)
}

pub fn avg(a: &AvgArgs, config: Value, par: &Parallelism) -> Result<Report> {
    let need_prime = || a.prime.ok_or_else(|| Error::Parse("--prime is required here".into()));
    if !a.sweep.is_empty() {
        let p = need_prime()?;
        let rows: Vec<Value> = convergence_sweep(a.degree, p, &a.sweep, par)?
            .into_iter()
            .map(|r| {
                json!({
                    "m": r.m,
                    "mean": r.mean,
                    "deviation": r.deviation,
                    "envelope": r.envelope,
                    "count": r.count,
                    "monte_carlo": r.monte_carlo,
                })
            })
            .collect();
        let result = json!({"degree": a.degree, "p": p, "target": alpha_p_of_x(p), "rows": rows.clone()});
        return Ok(Report::new("avg", config, result).with_table(rows));
    }
    let spec = a
        .coeff_box
        .as_deref()
        .ok_or_else(|| Error::Parse("either --box or --sweep is required".into()))?;
    let b = parse_box(a.degree, spec)?;
    if let Some(bins) = a.histogram {
        let values = avgalpha::truncated_alpha_values(&b, a.prime_bound, par)?;
        let rows: Vec<Value> = avgalpha::histogram(&values, bins)
            .into_iter()
            .map(|h| json!({"lo": h.lo, "hi": h.hi, "count": h.count}))
            .collect();
        let result = json!({
            "degree": a.degree,
            "prime_bound": a.prime_bound,
            "polynomials": values.len(),
            "bins": rows.clone(),
        });
        return Ok(Report::new("avg", config, result).with_table(rows));
    }
    let p = need_prime()?;
    let m = mean_alpha_p_with(&b, p, par, a.samples, a.seed)?;
    let target = alpha_p_of_x(p);
    let result = json!({
        "degree": a.degree,
        "p": p,
        "mean": m.mean,
        "count": m.count,
        "zero_discriminant": m.zero_discriminant,
        "monte_carlo": m.monte_carlo,
        "standard_error": m.standard_error,
        "target": target,
        "deviation": (m.mean - target).abs(),
    });
    Ok(Report::new("avg", config, result))
}

pub fn field(a: &FieldArgs, config: Value, par: &Parallelism) -> Result<Report> {
    let k = QuadField::new(a.disc)?;
    let mut result = json!({"disc": k.d, "units": k.w});
    if a.class_number {
        result["class_number"] = k.h.into();
        result["lambda_k"] = k.lambda_k.into();
        result["gamma_0"] = k.gamma_0().into();
    }
    if let Some(t) = a.remainder {
        let psi = k.psi_k(t, par);
        let tf = t as f64;
        let c = FieldConstants::new(2, (k.d.unsigned_abs() as f64).ln());
        let lt = tf.ln();
        let envelope = tf.sqrt() * (c.a_k + c.b_k * lt + c.c_k * lt * lt);
        result["remainder"] = json!({
            "t": t,
            "remainder_r": k.remainder_r(t, par),
            "psi_k": psi,
            "deviation": psi - tf,
            "rh_envelope": envelope,
            "within_envelope": (psi - tf).abs() <= envelope,
            "constants": constants_json(&c),
        });
    }
    if let Some(x) = a.primitive_count {
        let n = primitive_ideal_count(&k, x)?;
        result["primitive"] = json!({
            "x": x,
            "count": n,
            "density": n as f64 / x as f64,
            "gamma_0": k.gamma_0(),
        });
    }
    Ok(Report::new("field", config, result))
}

pub fn psi(a: &PsiArgs, config: Value, par: &Parallelism) -> Result<Report> {
    let n = psi_exact(a.x, a.bound, par)?;
    Ok(Report::new("psi", config, json!({"x": a.x, "bound": a.bound, "psi": n})).with_headline(n.to_string()))
}

fn merge(into: &mut Value, from: Value) {
    if let (Value::Object(a), Value::Object(b)) = (into, from) {
        a.extend(b);
    }
}

