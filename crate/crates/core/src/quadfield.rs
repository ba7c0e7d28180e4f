//! Imaginary quadratic fields `K = Q(√D)` with `D < 0` fundamental.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::arith::{gcd_u64, jacobi};
use crate::error::{Error, Result};
use crate::polyform::{is_fundamental, Polynomial};
use crate::primes::{isqrt, map_prime_segments, primes_up_to};
use crate::rootcount;
use crate::summation::CompensatedSum;
use crate::Parallelism;

/// Largest `|D|` accepted by [`class_number`].
pub const CLASS_NUMBER_LIMIT: u64 = 1_000_000_000_000;

/// Largest norm bound accepted by [`primitive_ideal_count`] (one byte per
/// integer up to the bound).
pub const PRIMITIVE_COUNT_LIMIT: u64 = 1_000_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadField {
    pub d: i64,
    pub h: u64,
    pub w: u32,
    pub lambda_k: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealCountProfile {
    pub p: u64,
    pub n_p_k: u32,
    /// Entry `k − 1` counts primitive ideals of norm `p^k`.
    pub primitive_counts: Vec<u32>,
}

/// Kronecker symbol `(D/n)`.
pub fn kronecker(d: i64, n: i64) -> i32 {
    if n == 0 {
        return (d.abs() == 1) as i32;
    }
    let mut sign = 1;
    let mut n = n;
    if n < 0 {
        n = -n;
        if d < 0 {
            sign = -1;
        }
    }
    let mut n = n as u64;
    let tz = n.trailing_zeros();
    if tz > 0 {
        if d % 2 == 0 {
            return 0;
        }
        if tz % 2 == 1 && matches!(d.rem_euclid(8), 3 | 5) {
            sign = -sign;
        }
        n >>= tz;
    }
    if n == 1 {
        return sign;
    }
    sign * jacobi(d.rem_euclid(n as i64) as u64, n)
}

impl QuadField {
    pub fn new(d: i64) -> Result<Self> {
        if d >= 0 {
            return Err(Error::domain(format!("{d} is not negative")));
        }
        if !matches!(d.rem_euclid(4), 0 | 1) || !is_fundamental(&BigInt::from(d))? {
            return Err(Error::domain(format!("{d} is not a fundamental discriminant")));
        }
        let h = class_number(d)?;
        let w = match d {
            -4 => 4,
            -3 => 6,
            _ => 2,
        };
        let lambda_k = 2.0 * std::f64::consts::PI * h as f64 / (w as f64 * (-d as f64).sqrt());
        Ok(QuadField { d, h, w, lambda_k })
    }

    pub fn chi(&self, n: i64) -> i32 {
        kronecker(self.d, n)
    }

    /// Number of prime ideals of norm `p`.
    pub fn n_p(&self, p: u64) -> u32 {
        (1 + self.chi(p as i64)) as u32
    }

    pub fn is_ramified(&self, p: u64) -> bool {
        self.d.unsigned_abs().is_multiple_of(p)
    }

    /// Leading constant `λ_K / ζ(2)` of the primitive-ideal count.
    pub fn gamma_0(&self) -> f64 {
        6.0 * self.lambda_k / (std::f64::consts::PI * std::f64::consts::PI)
    }

    pub fn ideal_profile(&self, p: u64, k_max: u32) -> IdealCountProfile {
        let n = self.n_p(p);
        let ramified = self.is_ramified(p);
        let primitive_counts = (1..=k_max)
            .map(|k| if ramified && k >= 2 { 0 } else { n })
            .collect();
        IdealCountProfile {
            p,
            n_p_k: n,
            primitive_counts,
        }
    }

    /// `cont_p(K)`: `1/(p+1)` at ramified primes, `p/(p+1) · n_p/(p−1)`
    /// otherwise.
    pub fn cont_p(&self, p: u64) -> BigRational {
        let pb = BigInt::from(p);
        if self.is_ramified(p) {
            BigRational::new(1.into(), pb + 1)
        } else {
            let n = BigInt::from(self.n_p(p));
            BigRational::new(&pb * n, (&pb + 1) * (pb - 1))
        }
    }

    /// `Σ_{p ≤ t} (1 − n_p(K)) log p = −Σ_{p ≤ t} χ_D(p) log p`.
    pub fn remainder_r(&self, t: u64, par: &Parallelism) -> f64 {
        if t < 2 {
            return 0.0;
        }
        let parts = map_prime_segments(t, par, |primes| {
            let mut s = CompensatedSum::new();
            for &p in primes {
                s.add(-(self.chi(p as i64) as f64) * (p as f64).ln());
            }
            s.value()
        });
        CompensatedSum::fold_ordered(parts)
    }

    /// `ψ_K(t) = Σ_{N(𝔭^k) ≤ t} log N(𝔭)`.
    pub fn psi_k(&self, t: u64, par: &Parallelism) -> f64 {
        if t < 2 {
            return 0.0;
        }
        let parts = map_prime_segments(t, par, |primes| {
            let mut s = CompensatedSum::new();
            for &p in primes {
                let lp = (p as f64).ln();
                // powers p^k <= t
                let mut k = 0u32;
                let mut m = 1u64;
                while let Some(n) = m.checked_mul(p).filter(|&n| n <= t) {
                    m = n;
                    k += 1;
                }
                match self.chi(p as i64) {
                    1 => s.add(2.0 * k as f64 * lp),
                    0 => s.add(k as f64 * lp),
                    _ => s.add(2.0 * (k / 2) as f64 * lp),
                }
            }
            s.value()
        });
        CompensatedSum::fold_ordered(parts)
    }
}

/// Class number by counting reduced forms `(a, b, c)` of discriminant `D`.
pub fn class_number(d: i64) -> Result<u64> {
    if d >= 0 || !matches!(d.rem_euclid(4), 0 | 1) {
        return Err(Error::domain(format!("{d} is not a negative discriminant")));
    }
    let n = d.unsigned_abs();
    if n > CLASS_NUMBER_LIMIT {
        return Err(Error::range(format!("|D| = {n} exceeds {CLASS_NUMBER_LIMIT}")));
    }
    let mut h = 0;
    let a_max = isqrt(n / 3);
    for a in 1..=a_max {
        let b_start = if n.is_multiple_of(2) { 0 } else { 1 };
        let mut b = b_start;
        while b <= a {
            let num = b * b + n;
            if num.is_multiple_of(4 * a) {
                let c = num / (4 * a);
                if c >= a && gcd_u64(gcd_u64(a, b), c) == 1 {
                    h += 1;
                    if b > 0 && b < a && a < c {
                        // (a, −b, c) is reduced too
                        h += 1;
                    }
                }
            }
            b += 2;
        }
    }
    Ok(h)
}

/// Number of primitive ideals of norm `<= x`.
///
/// `a★(n)` is multiplicative with `a★(p^k) = 2` (split, `k >= 1`), `0`
/// (inert, `k >= 1`), and `1, 0` (ramified, `k = 1`, `k >= 2`).
pub fn primitive_ideal_count(field: &QuadField, x: u64) -> Result<u64> {
    if x == 0 {
        return Ok(0);
    }
    if x > PRIMITIVE_COUNT_LIMIT {
        return Err(Error::range(format!("x = {x} exceeds {PRIMITIVE_COUNT_LIMIT}")));
    }
    const ZERO: u8 = u8::MAX;
    // log2 of a★(n), or ZERO
    let mut e = vec![0u8; x as usize + 1];
    for p in primes_up_to(x) {
        let step = p as usize;
        match field.chi(p as i64) {
            1 => {
                for m in (step..=x as usize).step_by(step) {
                    if e[m] != ZERO {
                        e[m] += 1;
                    }
                }
            }
            0 => {
                if let Some(p2) = p.checked_mul(p).filter(|&q| q <= x) {
                    for m in (p2 as usize..=x as usize).step_by(p2 as usize) {
                        e[m] = ZERO;
                    }
                }
            }
            _ => {
                for m in (step..=x as usize).step_by(step) {
                    e[m] = ZERO;
                }
            }
        }
    }
    Ok(e[1..].iter().filter(|&&v| v != ZERO).map(|&v| 1u64 << v).sum())
}

/// `n_p(f)` for a quadratic `f` with fundamental discriminant, which equals
/// the number of prime ideals of norm `p` in its field.
pub fn n_p_quadratic_poly(f: &Polynomial, p: u64) -> Result<u128> {
    if f.degree() != 2 {
        return Err(Error::domain("polynomial is not quadratic"));
    }
    let d = f.discriminant();
    let fundamental = {
        use num_integer::Integer;
        use num_traits::{ToPrimitive, Zero};
        !d.is_zero() && matches!(d.mod_floor(&BigInt::from(4)).to_u8(), Some(0 | 1)) && is_fundamental(&d)?
    };
    if !fundamental {
        return Err(Error::domain(format!("discriminant {d} is not fundamental")));
    }
    rootcount::n_pk(f, p, 1)
}
