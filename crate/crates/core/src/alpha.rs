//! Murphy's α.
//!
//! `α_p(f) = log p · (1/(p−1) − cont_p(f))` with
//! `cont_p(f) = p/(p+1) · Σ_k n_{p^k}(f)/p^k`, and `α(f) = Σ_p α_p(f)`.
//! Partial sums come with an explicit truncation bound valid under the
//! Riemann hypothesis for `ζ_K` and `ζ_Q`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, jacobi, ln_abs, Reducer};
use crate::error::{Error, Result};
use crate::fp;
use crate::polyform::{is_fundamental, Polynomial};
use crate::primes::map_prime_segments;
use crate::rootcount::{max_exponent, RootCountProfile, RootCounter};
use crate::summation::CompensatedSum;
use crate::Parallelism;

/// Chebyshev constant: `Σ_{p ≤ X} log p ≤ e·X`.
pub const CHEBYSHEV_E: f64 = 1.01624;

/// Rounding slack added to certified intervals, relative to `|partial_sum|`.
pub const ROUNDING_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalMethod {
    RegularClosedForm,
    LiftedSeries,
    QuadraticField,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalAlpha {
    pub p: u64,
    pub value: f64,
    pub method: LocalMethod,
    pub profile: Option<RootCountProfile>,
    /// Root counts did not stabilize within the 128-bit range; `value` is
    /// off by at most `remainder_bound`.
    pub approximate: bool,
    pub remainder_bound: f64,
}

/// Number-field data entering the tail bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldParams {
    /// Degree `n_K` of the field.
    pub degree: u32,
    /// `|Disc K|`.
    pub disc_magnitude: BigInt,
    /// Every prime above `p0` is unramified and does not divide the index or
    /// `F(1,0) F(0,1)`, except for the primes accounted for by
    /// `ramified_correction`.
    pub p0: u64,
}

/// Explicit constants bounding the prime-ideal remainder under RH.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldConstants {
    pub a_k: f64,
    pub b_k: f64,
    pub c_k: f64,
}

impl FieldConstants {
    pub fn new(degree: u32, ln_disc: f64) -> Self {
        let n = degree as f64;
        FieldConstants {
            a_k: 4781.0 / 96.0 * ln_disc + 58681.0 / 113.0 * n,
            b_k: 23.0 / 3.0 * ln_disc + 68.0 / 3.0 * n,
            c_k: 863.0 / 31.0 * n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaEstimate {
    pub partial_sum: f64,
    pub cutoff_x: u64,
    /// The RH truncation bound evaluated at `cutoff_x`.
    pub tail_bound: f64,
    /// Bound on the ramified primes above `cutoff_x` that the tail formula
    /// does not model (zero unless `p0` was lowered below them).
    pub ramified_correction: f64,
    pub rounding_slack: f64,
    pub interval_lo: f64,
    pub interval_hi: f64,
    pub assumes_rh: bool,
    pub field: FieldParams,
    pub constants: FieldConstants,
}

impl AlphaEstimate {
    pub fn half_width(&self) -> f64 {
        self.tail_bound + self.ramified_correction + self.rounding_slack
    }

    pub fn contains(&self, value: f64) -> bool {
        self.interval_lo <= value && value <= self.interval_hi
    }
}

fn regular_value(p: u64, n_p: f64) -> f64 {
    let pf = p as f64;
    pf.ln() * (1.0 / (pf - 1.0) - n_p / (pf - 1.0) * (pf / (pf + 1.0)))
}

fn check_disc(rc: &RootCounter) -> Result<()> {
    if rc.discriminant().is_zero() {
        Err(Error::domain("alpha requires a nonzero discriminant"))
    } else {
        Ok(())
    }
}

fn check_prime(p: u64) -> Result<()> {
    if arith::is_prime_u64(p) {
        Ok(())
    } else {
        Err(Error::domain(format!("{p} is not prime")))
    }
}

/// Root counts `n_{p^k}` for `k = 1..=K`, where `K >= 2 v_p(Disc) + 2` is
/// extended until the last three counts agree.
struct Series {
    counts: Vec<u128>,
    stabilized: bool,
    remainder_bound: f64,
}

fn lifted_series(rc: &RootCounter, p: u64) -> Result<Series> {
    let v = rc.disc_valuation(p).unwrap_or(0);
    let cap = max_exponent(p);
    let k_min = (2 * v + 2).min(cap);
    let mut counts = Vec::new();
    let mut stabilized = false;
    for k in 1..=cap {
        counts.push(rc.n_pk_lifted(p, k)?);
        let n = counts.len();
        if k >= k_min && n >= 3 && counts[n - 1] == counts[n - 2] && counts[n - 2] == counts[n - 3] {
            stabilized = true;
            break;
        }
    }
    let remainder_bound = if stabilized {
        0.0
    } else {
        // Σ_{k > K} 2d p^{min(2v, k)} / p^k
        let big_k = counts.len() as i32;
        let (d, pf) = (rc.degree() as f64, p as f64);
        let two_v = 2 * v as i32;
        let flat = (two_v - big_k).max(0) as f64 * 2.0 * d;
        let geometric = 2.0 * d * pf.powi(two_v.max(big_k) - big_k) / (pf - 1.0);
        flat + geometric
    };
    Ok(Series {
        counts,
        stabilized,
        remainder_bound,
    })
}

/// `Σ_k n_{p^k}/p^k` with the tail closed by the last count.
fn series_sum(counts: &[u128], p: u64) -> f64 {
    let pf = p as f64;
    let mut s = CompensatedSum::new();
    let mut scale = 1.0;
    for &c in counts {
        scale /= pf;
        s.add(c as f64 * scale);
    }
    s.add(*counts.last().unwrap() as f64 * scale / (pf - 1.0));
    s.value()
}

fn series_local(rc: &RootCounter, p: u64) -> Result<LocalAlpha> {
    let series = lifted_series(rc, p)?;
    let pf = p as f64;
    let s = series_sum(&series.counts, p);
    let value = pf.ln() * (1.0 / (pf - 1.0) - pf / (pf + 1.0) * s);
    Ok(LocalAlpha {
        p,
        value,
        method: LocalMethod::LiftedSeries,
        approximate: !series.stabilized,
        remainder_bound: pf.ln() * pf / (pf + 1.0) * series.remainder_bound,
        profile: Some(RootCountProfile {
            p,
            counts: series.counts,
            stabilized: rc.is_unramified(p),
        }),
    })
}

/// `α_p(f)`. Primes dividing neither `Disc f` nor `F(1,0)` use the closed
/// form in `n_p`; the rest sum the lifted series.
pub fn alpha_p(f: &Polynomial, p: u64) -> Result<LocalAlpha> {
    let rc = RootCounter::new(f);
    alpha_p_with(&rc, p)
}

pub fn alpha_p_with(rc: &RootCounter, p: u64) -> Result<LocalAlpha> {
    check_disc(rc)?;
    check_prime(p)?;
    if rc.divides_discriminant(p) || rc.divides_leading(p) {
        return series_local(rc, p);
    }
    let (n_p, method) = if rc.degree() == 2 && p != 2 {
        let d = rc.disc_residue(p);
        ((1 + jacobi(d, p)) as u128, LocalMethod::QuadraticField)
    } else {
        (rc.n_p(p)?, LocalMethod::RegularClosedForm)
    };
    Ok(LocalAlpha {
        p,
        value: regular_value(p, n_p as f64),
        method,
        profile: None,
        approximate: false,
        remainder_bound: 0.0,
    })
}

/// `α_p(f)` through the lifted series for every prime, bypassing the closed
/// form.
pub fn alpha_p_lifted(f: &Polynomial, p: u64) -> Result<LocalAlpha> {
    let rc = RootCounter::new(f);
    check_disc(&rc)?;
    check_prime(p)?;
    series_local(&rc, p)
}

/// Exact `cont_p(f)` when the root counts stabilize.
pub fn cont_p_exact(f: &Polynomial, p: u64) -> Result<Option<BigRational>> {
    let rc = RootCounter::new(f);
    check_disc(&rc)?;
    check_prime(p)?;
    let series = if rc.is_unramified(p) {
        Series {
            counts: vec![rc.n_p(p)?],
            stabilized: true,
            remainder_bound: 0.0,
        }
    } else {
        lifted_series(&rc, p)?
    };
    if !series.stabilized {
        return Ok(None);
    }
    let pb = BigInt::from(p);
    let mut sum = BigRational::zero();
    let mut denom = BigInt::one();
    for &c in &series.counts {
        denom *= &pb;
        sum += BigRational::new(BigInt::from(c), denom.clone());
    }
    let last = BigInt::from(*series.counts.last().unwrap());
    sum += BigRational::new(last, denom * (&pb - 1));
    Ok(Some(sum * BigRational::new(pb.clone(), pb + 1)))
}

impl RootCounter {
    pub(crate) fn disc_residue(&self, p: u64) -> u64 {
        Reducer::new(self.discriminant()).rem(p)
    }
}

/// Per-prime evaluator for partial sums, with residues precomputed.
struct PartialKernel {
    rc: RootCounter,
    disc: Reducer,
    lead: Reducer,
    coeffs: Vec<Reducer>,
}

impl PartialKernel {
    fn new(f: &Polynomial) -> Self {
        let rc = RootCounter::new(f);
        PartialKernel {
            disc: Reducer::new(rc.discriminant()),
            lead: Reducer::new(f.leading()),
            coeffs: f.coeffs().iter().map(Reducer::new).collect(),
            rc,
        }
    }

    fn value(&self, p: u64) -> f64 {
        let d = self.disc.rem(p);
        if d == 0 || self.lead.rem(p) == 0 {
            return series_local(&self.rc, p)
                .expect("prime within range")
                .value;
        }
        let n_p = match self.rc.degree() {
            1 => 1,
            2 if p != 2 => (1 + jacobi(d, p)) as usize,
            _ => {
                let c: Vec<u64> = self.coeffs.iter().map(|r| r.rem(p)).collect();
                fp::count_roots(&c, p)
            }
        };
        regular_value(p, n_p as f64)
    }
}

/// `Σ_{p ≤ X} α_p(f)`. Primes are processed in fixed segments and the
/// per-segment compensated sums are folded in order, so the result does not
/// depend on the worker count.
pub fn alpha_partial(f: &Polynomial, x: u64, par: &Parallelism) -> Result<f64> {
    let kernel = PartialKernel::new(f);
    check_disc(&kernel.rc)?;
    if x < 2 {
        return Ok(0.0);
    }
    let parts = map_prime_segments(x, par, |primes| {
        let mut s = CompensatedSum::new();
        for &p in primes {
            s.add(kernel.value(p));
        }
        s.value()
    });
    Ok(CompensatedSum::fold_ordered(parts))
}

/// RH truncation bound `|α(f) − Σ_{p ≤ X} α_p(f)|` for `X >= max(p0, n_K)`.
pub fn tail_bound_rh(x: u64, degree: u32, disc_magnitude: &BigInt, p0: u64) -> Result<f64> {
    if disc_magnitude.is_zero() {
        return Err(Error::domain("field discriminant must be nonzero"));
    }
    let min_x = p0.max(degree as u64).max(2);
    if x < min_x {
        return Err(Error::domain(format!("cutoff must be at least {min_x}")));
    }
    Ok(tail_formula(x as f64, degree, ln_abs(disc_magnitude)))
}

/// The tail bound as a function of real `X`, for monotonicity studies.
pub fn tail_formula(x: f64, degree: u32, ln_disc: f64) -> f64 {
    let e = CHEBYSHEV_E;
    let n = degree as f64;
    let k = FieldConstants::new(degree, ln_disc);
    let lx = x.ln();
    let first = 3.0 * e * x.sqrt() / (x - 1.0);
    let second = x.powf(-1.0 / 6.0) * (e * n / 4f64.ln()) * (4.5 + 5.0 * lx);
    let third = 3.0 * k.a_k + 3.0 * e * n + 4.0 * k.b_k + 16.0 * k.c_k
        + (3.0 * k.b_k + 8.0 * k.c_k) * lx
        + 3.0 * k.c_k * lx * lx;
    (first + second + third) / x.sqrt()
}

/// Field data derived from `f` when it can be done without computing an
/// index: primitive linear polynomials and quadratics with fundamental
/// discriminant.
///
/// For the quadratic case `cont_p(f) = cont_p(K)` at every prime, so `p0`
/// is 2; ramified primes above the cutoff are covered by
/// `ramified_correction` instead.
pub fn derive_field_params(f: &Polynomial) -> Result<FieldParams> {
    match f.degree() {
        1 => {
            if !f.content().is_one() {
                return Err(Error::domain("linear polynomial is not primitive; supply field parameters"));
            }
            let mut p0 = 2;
            for c in [f.leading(), f.constant()] {
                if c.is_zero() {
                    continue;
                }
                let c = c.abs().to_u64().ok_or_else(|| {
                    Error::domain("coefficients beyond 64 bits; supply field parameters")
                })?;
                if let Some(&(p, _)) = arith::factor_u64(c).last() {
                    p0 = p0.max(p);
                }
            }
            Ok(FieldParams {
                degree: 1,
                disc_magnitude: BigInt::one(),
                p0,
            })
        }
        2 => {
            let d = f.discriminant();
            let fundamental = !d.is_zero()
                && matches!(d.mod_floor(&BigInt::from(4)).to_u8(), Some(0 | 1))
                && is_fundamental(&d)?;
            if !fundamental {
                return Err(Error::domain(
                    "discriminant is not fundamental; supply field parameters",
                ));
            }
            Ok(FieldParams {
                degree: 2,
                disc_magnitude: d.abs(),
                p0: 2,
            })
        }
        _ => Err(Error::domain("degree >= 3 requires explicit field parameters")),
    }
}

/// Partial sum up to `X` with a certified interval under RH.
pub fn alpha_certified(
    f: &Polynomial,
    x: u64,
    params: Option<FieldParams>,
    par: &Parallelism,
) -> Result<AlphaEstimate> {
    let derived = params.is_none();
    let field = match params {
        Some(p) => p,
        None => derive_field_params(f)?,
    };
    let tail = tail_bound_rh(x, field.degree, &field.disc_magnitude, field.p0)?;
    let ln_disc = ln_abs(&field.disc_magnitude);
    // each ramified prime above X contributes log p/(p²−1) beyond the model
    let ramified_correction = if derived && field.degree == 2 {
        let xf = x as f64;
        ln_disc / (xf * xf - 1.0)
    } else {
        0.0
    };
    let partial_sum = alpha_partial(f, x, par)?;
    let rounding_slack = ROUNDING_SLACK * partial_sum.abs();
    let half = tail + ramified_correction + rounding_slack;
    Ok(AlphaEstimate {
        partial_sum,
        cutoff_x: x,
        tail_bound: tail,
        ramified_correction,
        rounding_slack,
        interval_lo: partial_sum - half,
        interval_hi: partial_sum + half,
        assumes_rh: true,
        constants: FieldConstants::new(field.degree, ln_disc),
        field,
    })
}

/// `α` of any linear polynomial: `12 log A − γ − log 2π = −ζ′(2)/ζ(2)`.
pub fn alpha_linear_exact() -> f64 {
    const LN_GLAISHER: f64 = 0.248_754_477_033_784_25;
    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
    12.0 * LN_GLAISHER - EULER_GAMMA - (2.0 * std::f64::consts::PI).ln()
}
