//! Exact smooth counts: `Ψ(x, B)` by a segmented division sieve, and
//! `Ψ_F(x, B)` for positive definite binary quadratic forms by line sieving
//! each row `b`.
//!
//! Form censuses are parameterized by the norm bound: they count coprime
//! `(a, b) ∈ Z²` with `0 < F(a, b) <= x`.

use std::time::Instant;

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alpha::AlphaEstimate;
use crate::arith::gcd_u64;
use crate::dickman::predicted_smooth_ratio;
use crate::error::{Error, Result};
use crate::fp;
use crate::polyform::{BinaryForm, Polynomial};
use crate::primes::{primes_up_to, segments};
use crate::Parallelism;

/// Largest `x` accepted by [`psi_exact`].
pub const PSI_EXACT_LIMIT: u64 = 100_000_000;
/// Largest norm bound accepted by [`census_form`].
pub const CENSUS_LIMIT: u64 = 1 << 62;
/// Rows per work unit in [`census_form`].
const ROW_BLOCK: i64 = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusResult {
    pub form: BinaryForm,
    pub x: u64,
    pub b: u64,
    pub pairs_total: u64,
    pub pairs_smooth: u64,
    pub ratio: f64,
    pub runtime_seconds: f64,
}

/// `#{1 <= n <= x : P(n) <= B}`.
pub fn psi_exact(x: u64, b: u64, par: &Parallelism) -> Result<u64> {
    if x > PSI_EXACT_LIMIT {
        return Err(Error::range(format!("x = {x} exceeds {PSI_EXACT_LIMIT}")));
    }
    if x == 0 {
        return Ok(0);
    }
    if b >= x {
        return Ok(x);
    }
    let primes = primes_up_to(b);
    let segs = segments(x, par.segment_size);
    let counts: Vec<u64> = par.install(|| {
        segs.par_iter()
            .map(|&(lo, hi)| {
                let mut rest: Vec<u64> = (lo..=hi).collect();
                for &p in &primes {
                    let first = lo.div_ceil(p) * p;
                    let mut m = first;
                    while m <= hi {
                        let r = &mut rest[(m - lo) as usize];
                        while (*r).is_multiple_of(p) {
                            *r /= p;
                        }
                        m += p;
                    }
                }
                rest.iter().filter(|&&r| r == 1).count() as u64
            })
            .collect()
    });
    // segments start at 2; n = 1 is smooth
    Ok(1 + counts.iter().sum::<u64>())
}

/// A positive definite quadratic form `c2 a² + c1 a b + c0 b²` prepared for
/// line sieving.
#[derive(Debug, Clone)]
struct DefiniteForm {
    c0: i64,
    c1: i64,
    c2: i64,
    /// `|c1² − 4 c0 c2|`
    disc: i128,
}

impl DefiniteForm {
    fn new(form: &BinaryForm) -> Result<Self> {
        if form.degree() != 2 {
            return Err(Error::domain("census requires a quadratic form"));
        }
        let c = form
            .small_coeffs()
            .ok_or_else(|| Error::domain("census coefficients must fit in 64 bits"))?;
        let (c0, c1, c2) = (c[0], c[1], c[2]);
        let d = c1 as i128 * c1 as i128 - 4 * c0 as i128 * c2 as i128;
        if d >= 0 || c2 <= 0 {
            return Err(Error::domain("census requires a positive definite form"));
        }
        Ok(DefiniteForm { c0, c1, c2, disc: -d })
    }

    fn eval(&self, a: i64, b: i64) -> i128 {
        let (a, b) = (a as i128, b as i128);
        self.c2 as i128 * a * a + self.c1 as i128 * a * b + self.c0 as i128 * b * b
    }

    /// Largest `|b|` with some `a` giving `F(a, b) <= x`.
    fn b_max(&self, x: u64) -> i64 {
        // min over a of F(a, b) is b² |D| / (4 c2)
        let bound = 4 * self.c2 as i128 * x as i128 / self.disc;
        let mut b = (bound as f64).sqrt() as i64;
        while (b as i128 + 1) * (b as i128 + 1) <= bound {
            b += 1;
        }
        while b > 0 && (b as i128) * (b as i128) > bound {
            b -= 1;
        }
        b
    }

    /// Closed interval of `a` with `F(a, b) <= x`, if nonempty.
    fn a_range(&self, x: u64, b: i64) -> Option<(i64, i64)> {
        let (c2, c1) = (self.c2 as f64, self.c1 as f64);
        let centre = -c1 * b as f64 / (2.0 * c2);
        let rad2 = (4.0 * c2 * x as f64 - self.disc as f64 * (b as f64) * (b as f64)) / (4.0 * c2 * c2);
        if rad2 < 0.0 {
            return None;
        }
        let rad = rad2.sqrt();
        let mut lo = (centre - rad).floor() as i64;
        let mut hi = (centre + rad).ceil() as i64;
        let x = x as i128;
        while lo <= hi && self.eval(lo, b) > x {
            lo += 1;
        }
        while lo > i64::MIN + 1 && self.eval(lo - 1, b) <= x {
            lo -= 1;
        }
        while hi >= lo && self.eval(hi, b) > x {
            hi -= 1;
        }
        while self.eval(hi + 1, b) <= x {
            hi += 1;
        }
        (lo <= hi).then_some((lo, hi))
    }
}

/// Per-prime sieve data: roots of `F(X, 1)` modulo `p`.
#[derive(Debug, Clone)]
struct FactorBaseEntry {
    p: u64,
    /// `None` when every residue is a root.
    roots: Option<Vec<u64>>,
    lead_divisible: bool,
}

fn factor_base(f: &DefiniteForm, b: u64) -> Vec<FactorBaseEntry> {
    primes_up_to(b)
        .into_iter()
        .map(|p| {
            let m = |c: i64| c.rem_euclid(p as i64) as u64;
            let coeffs = [m(f.c0), m(f.c1), m(f.c2)];
            let roots = if coeffs.iter().all(|&c| c == 0) {
                None
            } else {
                Some(fp::roots(&coeffs, p))
            };
            FactorBaseEntry {
                p,
                roots,
                lead_divisible: coeffs[2] == 0,
            }
        })
        .collect()
}

/// Sieve results for a single row.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RowReport {
    pub total: u64,
    pub smooth: u64,
    /// `(a, [(p, e)])` for each smooth coprime pair, when requested.
    pub factored: Vec<(i64, Vec<(u64, u32)>)>,
}

fn sieve_row(
    form: &DefiniteForm,
    base: &[FactorBaseEntry],
    x: u64,
    b: i64,
    record: bool,
) -> RowReport {
    let Some((lo, hi)) = form.a_range(x, b) else {
        return RowReport::default();
    };
    let len = (hi - lo + 1) as usize;
    let mut rest: Vec<u64> = (lo..=hi).map(|a| form.eval(a, b) as u64).collect();
    let mut factors: Vec<Vec<(u64, u32)>> = if record { vec![Vec::new(); len] } else { Vec::new() };
    let bu = b.unsigned_abs();
    let mut divide = |i: usize, p: u64, rest: &mut [u64]| {
        let r = &mut rest[i];
        if *r == 0 {
            return;
        }
        let mut e = 0;
        while (*r).is_multiple_of(p) {
            *r /= p;
            e += 1;
        }
        if record && e > 0 {
            factors[i].push((p, e));
        }
    };
    for entry in base {
        let p = entry.p;
        let start_of = |r: u64| -> usize {
            // first a >= lo with a ≡ r (mod p)
            let off = (r as i128 - lo as i128).rem_euclid(p as i128) as u64;
            off as usize
        };
        let bp = bu % p;
        // residues r with p | F(a, b) for a ≡ r (mod p); None means every a
        let classes: Option<Vec<u64>> = if bp == 0 {
            // F(a, b) ≡ c2 a² (mod p)
            (!entry.lead_divisible).then(|| vec![0])
        } else {
            entry.roots.as_ref().map(|roots| {
                let bs = b.rem_euclid(p as i64) as u64;
                roots.iter().map(|&r| ((r as u128 * bs as u128) % p as u128) as u64).collect()
            })
        };
        match classes {
            None => (0..len).for_each(|i| divide(i, p, &mut rest)),
            Some(classes) => {
                for r in classes {
                    let mut i = start_of(r);
                    while i < len {
                        divide(i, p, &mut rest);
                        i += p as usize;
                    }
                }
            }
        }
    }
    let mut report = RowReport::default();
    for (i, a) in (lo..=hi).enumerate() {
        if gcd_u64(a.unsigned_abs(), bu) != 1 || form.eval(a, b) == 0 {
            continue;
        }
        report.total += 1;
        if rest[i] == 1 {
            report.smooth += 1;
            if record {
                report.factored.push((a, std::mem::take(&mut factors[i])));
            }
        }
    }
    report
}

/// Line-sieved census of one row `b`, with the prime factorization of every
/// smooth value when `record` is set.
pub fn census_row(form: &BinaryForm, x: u64, smooth_bound: u64, b: i64, record: bool) -> Result<RowReport> {
    let f = DefiniteForm::new(form)?;
    let base = factor_base(&f, smooth_bound.min(x));
    Ok(sieve_row(&f, &base, x, b, record))
}

fn check_census_args(x: u64) -> Result<()> {
    if x > CENSUS_LIMIT {
        return Err(Error::range(format!("norm bound {x} exceeds {CENSUS_LIMIT}")));
    }
    Ok(())
}

/// `#{(a, b) : gcd(a, b) = 1, 0 < F(a, b) <= x}` and the `B`-smooth part.
pub fn census_form(form: &BinaryForm, x: u64, smooth_bound: u64, par: &Parallelism) -> Result<CensusResult> {
    let start = Instant::now();
    check_census_args(x)?;
    let f = DefiniteForm::new(form)?;
    let base = factor_base(&f, smooth_bound.min(x));
    let b_max = f.b_max(x);
    // rows b and −b are images under (a, b) ↦ (−a, −b)
    let blocks: Vec<(i64, i64)> = (0..=b_max / ROW_BLOCK)
        .map(|k| (k * ROW_BLOCK, ((k + 1) * ROW_BLOCK - 1).min(b_max)))
        .collect();
    let parts: Vec<(u64, u64)> = par.install(|| {
        blocks
            .par_iter()
            .map(|&(lo, hi)| {
                let (mut t, mut s) = (0, 0);
                for b in lo..=hi {
                    let r = sieve_row(&f, &base, x, b, false);
                    let w = if b == 0 { 1 } else { 2 };
                    t += w * r.total;
                    s += w * r.smooth;
                }
                (t, s)
            })
            .collect()
    });
    let (pairs_total, pairs_smooth) = parts.iter().fold((0, 0), |(t, s), &(a, b)| (t + a, s + b));
    Ok(CensusResult {
        form: form.clone(),
        x,
        b: smooth_bound,
        pairs_total,
        pairs_smooth,
        ratio: if pairs_total == 0 { 0.0 } else { pairs_smooth as f64 / pairs_total as f64 },
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}

fn largest_prime_factor_at_most(mut n: u64, b: u64) -> bool {
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            if p > b {
                return false;
            }
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    n <= b || n == 1
}

/// Per-pair trial-division census over the full box; reference
/// implementation for [`census_form`].
pub fn census_form_naive(form: &BinaryForm, x: u64, smooth_bound: u64) -> Result<CensusResult> {
    let start = Instant::now();
    check_census_args(x)?;
    let f = DefiniteForm::new(form)?;
    let b_max = f.b_max(x);
    let (mut total, mut smooth) = (0, 0);
    for b in -b_max..=b_max {
        let Some((lo, hi)) = f.a_range(x, b) else { continue };
        for a in lo..=hi {
            let v = f.eval(a, b);
            if v <= 0 || v > x as i128 || gcd_u64(a.unsigned_abs(), b.unsigned_abs()) != 1 {
                continue;
            }
            total += 1;
            if largest_prime_factor_at_most(v as u64, smooth_bound) {
                smooth += 1;
            }
        }
    }
    Ok(CensusResult {
        form: form.clone(),
        x,
        b: smooth_bound,
        pairs_total: total,
        pairs_smooth: smooth,
        ratio: if total == 0 { 0.0 } else { smooth as f64 / total as f64 },
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Empirical smooth ratio of a form against the α-shifted predictions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem42Report {
    pub census: CensusResult,
    pub alpha: f64,
    pub empirical_ratio: f64,
    pub shifted_x: f64,
    pub predicted_saias: f64,
    /// `Ψ(⌊x e^α⌋, B) / (x e^α)` when `x e^α` is within the exact-sieve range.
    pub predicted_exact: Option<f64>,
    pub abs_gap_saias: f64,
    pub rel_gap_saias: f64,
    pub abs_gap_exact: Option<f64>,
    pub rel_gap_exact: Option<f64>,
}

/// Compares `Ψ_F(x, B) / Ψ_F(x, x)` with `Ψ(x e^α, B) / (x e^α)`.
pub fn theorem42_experiment(
    f: &Polynomial,
    x: u64,
    smooth_bound: u64,
    alpha: &AlphaEstimate,
    par: &Parallelism,
) -> Result<Theorem42Report> {
    let census = census_form(&f.homogenize(), x, smooth_bound, par)?;
    let a = alpha.partial_sum;
    let shifted_x = x as f64 * a.exp();
    let empirical_ratio = census.ratio;
    let predicted_saias = if smooth_bound as f64 >= shifted_x {
        1.0
    } else {
        predicted_smooth_ratio(a, x as f64, smooth_bound as f64)?
    };
    let predicted_exact = match shifted_x.floor().to_u64() {
        Some(n) if (1..=PSI_EXACT_LIMIT).contains(&n) => {
            Some(psi_exact(n, smooth_bound, par)? as f64 / shifted_x)
        }
        _ => None,
    };
    let gap = |pred: f64| (empirical_ratio - pred).abs();
    Ok(Theorem42Report {
        alpha: a,
        empirical_ratio,
        shifted_x,
        predicted_saias,
        abs_gap_saias: gap(predicted_saias),
        rel_gap_saias: gap(predicted_saias) / predicted_saias,
        abs_gap_exact: predicted_exact.map(gap),
        rel_gap_exact: predicted_exact.map(|p| gap(p) / p),
        predicted_exact,
        census,
    })
}
