//! Averages of `α_p(f)` over monic polynomials with coefficients in a box.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alpha::alpha_p;
use crate::error::{Error, Result};
use crate::polyform::Polynomial;
use crate::summation::CompensatedSum;
use crate::Parallelism;

/// Boxes up to this size are enumerated exhaustively.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;
pub const DEFAULT_SAMPLES: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 0x5eed;

/// Monic degree-`d` polynomials `X^d + Σ f_i X^i` with `f_i ∈ [lo_i, hi_i]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientBox {
    pub d: usize,
    /// `intervals[i]` bounds `f_i`, inclusive; `lo > hi` is empty.
    pub intervals: Vec<(i64, i64)>,
}

impl CoefficientBox {
    pub fn new(d: usize, intervals: Vec<(i64, i64)>) -> Result<Self> {
        if d == 0 {
            return Err(Error::domain("degree must be at least 1"));
        }
        if intervals.len() != d {
            return Err(Error::domain(format!("degree {d} needs {d} intervals, got {}", intervals.len())));
        }
        Ok(CoefficientBox { d, intervals })
    }

    /// `[−m, m]^d`.
    pub fn symmetric(d: usize, m: i64) -> Result<Self> {
        CoefficientBox::new(d, vec![(-m, m); d])
    }

    fn width(&self, i: usize) -> u128 {
        let (lo, hi) = self.intervals[i];
        if lo > hi {
            0
        } else {
            (hi as i128 - lo as i128 + 1) as u128
        }
    }

    /// Number of coefficient tuples, zero-discriminant ones included.
    pub fn size(&self) -> u128 {
        (0..self.d).map(|i| self.width(i)).product()
    }

    /// Tuple number `idx` in lexicographic order, `f_0` fastest.
    fn coeffs_at(&self, mut idx: u128) -> Vec<i64> {
        let mut c = Vec::with_capacity(self.d + 1);
        for i in 0..self.d {
            let w = self.width(i);
            c.push(self.intervals[i].0 + (idx % w) as i64);
            idx /= w;
        }
        c.push(1);
        c
    }

    fn poly_at(&self, idx: u128) -> Option<Polynomial> {
        let f = Polynomial::from_i64s(&self.coeffs_at(idx)).expect("monic");
        (!f.discriminant().is_zero()).then_some(f)
    }
}

/// Every monic polynomial in the box with nonzero discriminant, once each.
pub fn enumerate_box(b: &CoefficientBox) -> Result<impl Iterator<Item = Polynomial> + '_> {
    let n = b.size();
    if n > ENUMERATION_LIMIT {
        return Err(Error::range(format!("box has {n} elements, limit {ENUMERATION_LIMIT}")));
    }
    Ok((0..n).filter_map(move |i| b.poly_at(i)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanReport {
    pub p: u64,
    pub mean: f64,
    /// Polynomials averaged over (or sampled, for Monte Carlo).
    pub count: u64,
    pub zero_discriminant: u64,
    pub monte_carlo: bool,
    pub standard_error: Option<f64>,
}

const CHUNK: u128 = 4096;

/// Mean of `α_p` over the box. Boxes above [`ENUMERATION_LIMIT`] are
/// sampled: `samples` draws split evenly over strata of the index range.
pub fn mean_alpha_p(b: &CoefficientBox, p: u64, par: &Parallelism) -> Result<MeanReport> {
    mean_alpha_p_with(b, p, par, DEFAULT_SAMPLES, DEFAULT_SEED)
}

pub fn mean_alpha_p_with(
    b: &CoefficientBox,
    p: u64,
    par: &Parallelism,
    samples: u64,
    seed: u64,
) -> Result<MeanReport> {
    let n = b.size();
    if n == 0 {
        return Err(Error::domain("empty box"));
    }
    if n <= ENUMERATION_LIMIT {
        exhaustive_mean(b, p, par)
    } else {
        sampled_mean(b, p, par, samples.max(2), seed)
    }
}

fn exhaustive_mean(b: &CoefficientBox, p: u64, par: &Parallelism) -> Result<MeanReport> {
    let n = b.size();
    let chunks: Vec<(u128, u128)> = (0..n.div_ceil(CHUNK))
        .map(|k| (k * CHUNK, ((k + 1) * CHUNK).min(n)))
        .collect();
    let parts: Vec<Result<(f64, u64, u64)>> = par.install(|| {
        chunks
            .par_iter()
            .map(|&(lo, hi)| {
                let mut s = CompensatedSum::new();
                let (mut count, mut zero) = (0, 0);
                for i in lo..hi {
                    match b.poly_at(i) {
                        Some(f) => {
                            s.add(alpha_p(&f, p)?.value);
                            count += 1;
                        }
                        None => zero += 1,
                    }
                }
                Ok((s.value(), count, zero))
            })
            .collect()
    });
    let mut sums = Vec::with_capacity(parts.len());
    let (mut count, mut zero) = (0, 0);
    for part in parts {
        let (s, c, z) = part?;
        sums.push(s);
        count += c;
        zero += z;
    }
    if count == 0 {
        return Err(Error::domain("box has no polynomial with nonzero discriminant"));
    }
    Ok(MeanReport {
        p,
        mean: CompensatedSum::fold_ordered(sums) / count as f64,
        count,
        zero_discriminant: zero,
        monte_carlo: false,
        standard_error: None,
    })
}

const STRATA: u64 = 64;

fn sampled_mean(b: &CoefficientBox, p: u64, par: &Parallelism, samples: u64, seed: u64) -> Result<MeanReport> {
    let n = b.size();
    let per = samples.div_ceil(STRATA);
    let parts: Vec<Result<(Vec<f64>, u64)>> = par.install(|| {
        (0..STRATA)
            .into_par_iter()
            .map(|s| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(s);
                let lo = n * s as u128 / STRATA as u128;
                let hi = n * (s + 1) as u128 / STRATA as u128;
                let mut vals = Vec::with_capacity(per as usize);
                let mut zero = 0;
                for _ in 0..per {
                    match b.poly_at(rng.gen_range(lo..hi)) {
                        Some(f) => vals.push(alpha_p(&f, p)?.value),
                        None => zero += 1,
                    }
                }
                Ok((vals, zero))
            })
            .collect()
    });
    // equal-size strata: the overall mean is the mean of stratum means
    let mut means = Vec::new();
    let mut var_sum = 0.0;
    let (mut count, mut zero) = (0, 0);
    for part in parts {
        let (vals, z) = part?;
        zero += z;
        count += vals.len() as u64;
        if vals.is_empty() {
            continue;
        }
        let m = CompensatedSum::fold_ordered(vals.iter().copied()) / vals.len() as f64;
        let var = if vals.len() > 1 {
            vals.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (vals.len() - 1) as f64
        } else {
            0.0
        };
        var_sum += var / vals.len() as f64;
        means.push(m);
    }
    if means.is_empty() {
        return Err(Error::domain("no sampled polynomial had nonzero discriminant"));
    }
    let k = means.len() as f64;
    Ok(MeanReport {
        p,
        mean: CompensatedSum::fold_ordered(means) / k,
        count,
        zero_discriminant: zero,
        monte_carlo: true,
        standard_error: Some(var_sum.sqrt() / k),
    })
}

/// `α_p(X) = log p / (p² − 1)`, the value for every linear polynomial.
pub fn alpha_p_of_x(p: u64) -> f64 {
    let pf = p as f64;
    pf.ln() / (pf * pf - 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub m: i64,
    pub mean: f64,
    pub deviation: f64,
    /// `d (log d + log m)/m + 1/m`, up to a constant.
    pub envelope: f64,
    pub count: u64,
    pub monte_carlo: bool,
}

/// Mean of `α_p` over `[−m, m]^d` for each `m`, against `α_p(X)`.
pub fn convergence_sweep(d: usize, p: u64, m_values: &[i64], par: &Parallelism) -> Result<Vec<SweepRow>> {
    let target = alpha_p_of_x(p);
    m_values
        .iter()
        .map(|&m| {
            if m < 1 {
                return Err(Error::domain(format!("m = {m} must be positive")));
            }
            let r = mean_alpha_p(&CoefficientBox::symmetric(d, m)?, p, par)?;
            let (df, mf) = (d as f64, m as f64);
            Ok(SweepRow {
                m,
                mean: r.mean,
                deviation: (r.mean - target).abs(),
                envelope: df * (df.ln() + mf.ln()) / mf + 1.0 / mf,
                count: r.count,
                monte_carlo: r.monte_carlo,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: u64,
}

/// `Σ_{p ≤ prime_bound} α_p(f)` for every polynomial of an enumerable box.
pub fn truncated_alpha_values(b: &CoefficientBox, prime_bound: u64, par: &Parallelism) -> Result<Vec<f64>> {
    let primes = crate::primes::primes_up_to(prime_bound);
    let polys: Vec<Polynomial> = enumerate_box(b)?.collect();
    par.install(|| {
        polys
            .par_iter()
            .map(|f| {
                let mut s = CompensatedSum::new();
                for &p in &primes {
                    s.add(alpha_p(f, p)?.value);
                }
                Ok(s.value())
            })
            .collect()
    })
}

/// Equal-width histogram over `[min, max]` of `values`.
pub fn histogram(values: &[f64], bins: usize) -> Vec<HistogramBin> {
    if values.is_empty() || bins == 0 {
        return Vec::new();
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let mut counts = vec![0u64; bins];
    for &v in values {
        let i = (((v - lo) / width) as usize).min(bins - 1);
        counts[i] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| HistogramBin {
            lo: lo + i as f64 * width,
            hi: lo + (i + 1) as f64 * width,
            count,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_examples() {
        let b = CoefficientBox::new(2, vec![(0, 1), (0, 1)]).unwrap();
        let got: Vec<String> = enumerate_box(&b).unwrap().map(|f| f.to_string()).collect();
        assert_eq!(got, vec!["X^2 + 1", "X^2 + X", "X^2 + X + 1"]);
        let e = CoefficientBox::new(2, vec![(0, 1), (3, 2)]).unwrap();
        assert_eq!(enumerate_box(&e).unwrap().count(), 0);
        let l = CoefficientBox::new(1, vec![(-1, 1)]).unwrap();
        let got: Vec<String> = enumerate_box(&l).unwrap().map(|f| f.to_string()).collect();
        assert_eq!(got, vec!["X - 1", "X", "X + 1"]);
        let big = CoefficientBox::symmetric(3, 1000).unwrap();
        assert!(matches!(enumerate_box(&big), Err(Error::Range(_))));
        assert!(CoefficientBox::new(2, vec![(0, 1)]).is_err());
    }

    #[test]
    fn linear_means_are_exact() {
        let par = Parallelism::new(2, 1 << 10);
        for p in [2, 3, 5, 7] {
            let r = mean_alpha_p(&CoefficientBox::symmetric(1, 50).unwrap(), p, &par).unwrap();
            assert!((r.mean - alpha_p_of_x(p)).abs() < 1e-15);
            let rows = convergence_sweep(1, p, &[3, 10], &par).unwrap();
            assert!(rows.iter().all(|r| r.deviation < 1e-15));
        }
        assert!((alpha_p_of_x(2) - 0.231049).abs() < 1e-6);
    }

    #[test]
    fn single_polynomial_box() {
        let par = Parallelism::serial();
        let b = CoefficientBox::new(2, vec![(1, 1), (0, 0)]).unwrap();
        let r = mean_alpha_p(&b, 2, &par).unwrap();
        assert!((r.mean - 2.0 / 3.0 * 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn zero_discriminant_exclusions_bounded() {
        for (d, m0, m1) in [(2usize, 5i64, 7i64), (2, 20, 3), (3, 4, 4), (2, 30, 30)] {
            let mut iv = vec![(-m0, m0)];
            iv.extend(std::iter::repeat_n((-m1, m1), d - 1));
            let b = CoefficientBox::new(d, iv).unwrap();
            let zero = b.size() - enumerate_box(&b).unwrap().count() as u128;
            let bound = d as u128 * b.size() / b.width(0);
            assert!(zero <= bound, "{d} {m0} {m1}: {zero} > {bound}");
        }
    }

    #[test]
    fn mean_independent_of_workers() {
        let b = CoefficientBox::symmetric(2, 40).unwrap();
        let a = mean_alpha_p(&b, 3, &Parallelism::new(1, 1)).unwrap();
        let c = mean_alpha_p(&b, 3, &Parallelism::new(7, 1)).unwrap();
        assert_eq!(a.mean.to_bits(), c.mean.to_bits());
    }

    #[test]
    fn sampled_mean_is_close() {
        let par = Parallelism::new(4, 1);
        let b = CoefficientBox::symmetric(3, 300).unwrap();
        let r = mean_alpha_p_with(&b, 2, &par, 20_000, 7).unwrap();
        assert!(r.monte_carlo);
        let se = r.standard_error.unwrap();
        assert!(se > 0.0 && se < 0.05);
        assert!((r.mean - alpha_p_of_x(2)).abs() < 5.0 * se + 0.02, "{} ± {se}", r.mean);
        let again = mean_alpha_p_with(&b, 2, &par, 20_000, 7).unwrap();
        assert_eq!(r, again);
    }

    #[test]
    fn histogram_counts_everything() {
        let par = Parallelism::new(2, 1);
        let vals = truncated_alpha_values(&CoefficientBox::symmetric(2, 10).unwrap(), 30, &par).unwrap();
        let h = histogram(&vals, 12);
        assert_eq!(h.len(), 12);
        assert_eq!(h.iter().map(|b| b.count).sum::<u64>(), vals.len() as u64);
    }
}
