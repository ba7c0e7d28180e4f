//! Root counts `n_{p^k}(f)`: affine roots of `f` modulo `p^k` plus the
//! projective roots `b = 0 mod p` of `F(1, b)`.
//!
//! Counting works on root clusters. A root `r` of `g` mod `p` is refined by
//! the shifted polynomial `h(t) = g(r + p t)`: if every coefficient of `h`
//! is divisible by `p^k` the whole class lifts, otherwise `h / p^v` is
//! counted recursively modulo `p^(k - v)`. Each recursion step is the
//! Hensel test "which of the `p` lifts of `r` survive" applied to all lifts
//! at once, so the cost stays polynomial in `log p` even when roots
//! multiply.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::{self, mulmod128, addmod128, Reducer, MAX_MODULUS_128};
use crate::error::{Error, Result};
use crate::fp;
use crate::polyform::Polynomial;

/// `n_{p^k}(f)` for `k = 1..=counts.len()`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootCountProfile {
    pub p: u64,
    pub counts: Vec<u128>,
    /// `p` does not divide the discriminant, so every count equals `n_p`.
    pub stabilized: bool,
}

/// `p^k`, or a range error when it exceeds the 128-bit working range.
pub fn prime_power(p: u64, k: u32) -> Result<u128> {
    let mut m: u128 = 1;
    for _ in 0..k {
        m = m
            .checked_mul(p as u128)
            .filter(|&m| m <= MAX_MODULUS_128)
            .ok_or_else(|| Error::range(format!("{p}^{k} exceeds 2^126")))?;
    }
    Ok(m)
}

/// Largest `k` with `p^k <= 2^126`.
pub fn max_exponent(p: u64) -> u32 {
    let mut k = 0;
    let mut m: u128 = 1;
    while let Some(n) = m.checked_mul(p as u128).filter(|&n| n <= MAX_MODULUS_128) {
        m = n;
        k += 1;
    }
    k
}

fn check_prime(p: u64) -> Result<()> {
    if arith::is_prime_u64(p) {
        Ok(())
    } else {
        Err(Error::domain(format!("{p} is not prime")))
    }
}

/// Precomputed residues of a polynomial, its reversal and its discriminant,
/// reused across many primes and exponents.
#[derive(Debug, Clone)]
pub struct RootCounter {
    degree: usize,
    coeffs: Vec<Reducer>,
    reversed: Vec<Reducer>,
    disc: BigInt,
    disc_red: Reducer,
    lead_red: Reducer,
}

impl RootCounter {
    pub fn new(f: &Polynomial) -> Self {
        let disc = f.discriminant();
        RootCounter {
            degree: f.degree(),
            coeffs: f.coeffs().iter().map(Reducer::new).collect(),
            reversed: f.reversed_coeffs().iter().map(Reducer::new).collect(),
            disc_red: Reducer::new(&disc),
            lead_red: Reducer::new(f.leading()),
            disc,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn discriminant(&self) -> &BigInt {
        &self.disc
    }

    pub fn divides_discriminant(&self, p: u64) -> bool {
        self.disc_red.rem(p) == 0
    }

    /// `p` divides neither the discriminant nor the content, so lifting
    /// preserves every root modulo `p`.
    pub fn is_unramified(&self, p: u64) -> bool {
        !self.divides_discriminant(p) && self.coeffs.iter().any(|c| c.rem(p) != 0)
    }

    pub fn divides_leading(&self, p: u64) -> bool {
        self.lead_red.rem(p) == 0
    }

    /// `v_p(Disc f)`; `None` when the discriminant vanishes.
    pub fn disc_valuation(&self, p: u64) -> Option<u32> {
        if self.disc.is_zero() {
            None
        } else {
            Some(arith::valuation(&self.disc, p))
        }
    }

    pub(crate) fn coeffs_mod_p(&self, p: u64) -> Vec<u64> {
        self.coeffs.iter().map(|r| r.rem(p)).collect()
    }

    fn reduce128(src: &[Reducer], m: u128) -> Vec<u128> {
        src.iter().map(|r| r.rem128(m)).collect()
    }

    /// Affine roots of `f` modulo `p^k`.
    pub fn affine_roots_mod_pk(&self, p: u64, k: u32) -> Result<u128> {
        check_prime(p)?;
        if k == 0 {
            return Err(Error::domain("k must be >= 1"));
        }
        let m = prime_power(p, k)?;
        Ok(count_cluster(Self::reduce128(&self.coeffs, m), p, k, false))
    }

    /// Roots of `F(1, b)` modulo `p^k` with `b = 0 mod p`.
    pub fn projective_roots_mod_pk(&self, p: u64, k: u32) -> Result<u128> {
        check_prime(p)?;
        if k == 0 {
            return Err(Error::domain("k must be >= 1"));
        }
        let m = prime_power(p, k)?;
        Ok(count_cluster(Self::reduce128(&self.reversed, m), p, k, true))
    }

    /// `n_p(f)` from the roots modulo `p` alone.
    pub fn n_p(&self, p: u64) -> Result<u128> {
        check_prime(p)?;
        let affine = fp::count_roots(&self.coeffs_mod_p(p), p) as u128;
        let affine = if self.coeffs.iter().all(|c| c.rem(p) == 0) {
            p as u128
        } else {
            affine
        };
        Ok(affine + self.divides_leading(p) as u128)
    }

    /// `n_{p^k}(f)` computed by lifting, never by the unramified shortcut.
    pub fn n_pk_lifted(&self, p: u64, k: u32) -> Result<u128> {
        Ok(self.affine_roots_mod_pk(p, k)? + self.projective_roots_mod_pk(p, k)?)
    }

    /// `n_{p^k}(f)`. When `p` divides neither the discriminant nor the
    /// content the count is independent of `k` and is taken from the roots
    /// modulo `p`.
    pub fn n_pk(&self, p: u64, k: u32) -> Result<u128> {
        check_prime(p)?;
        if k == 0 {
            return Err(Error::domain("k must be >= 1"));
        }
        prime_power(p, k)?;
        if self.is_unramified(p) {
            return self.n_p(p);
        }
        self.n_pk_lifted(p, k)
    }

    pub fn profile(&self, p: u64, k_max: u32) -> Result<RootCountProfile> {
        if k_max == 0 {
            return Err(Error::domain("k_max must be >= 1"));
        }
        let counts = (1..=k_max)
            .map(|k| self.n_pk(p, k))
            .collect::<Result<Vec<_>>>()?;
        Ok(RootCountProfile {
            p,
            counts,
            stabilized: self.is_unramified(p),
        })
    }
}

pub fn affine_roots_mod_pk(f: &Polynomial, p: u64, k: u32) -> Result<u128> {
    RootCounter::new(f).affine_roots_mod_pk(p, k)
}

pub fn n_pk(f: &Polynomial, p: u64, k: u32) -> Result<u128> {
    RootCounter::new(f).n_pk(p, k)
}

pub fn profile(f: &Polynomial, p: u64, k_max: u32) -> Result<RootCountProfile> {
    RootCounter::new(f).profile(p, k_max)
}

fn pow_u128(p: u64, e: u32) -> u128 {
    (p as u128).pow(e)
}

/// `v_p(c)` for a residue `c` modulo `p^k`, capped at `k`.
fn val_mod(c: u128, p: u64, k: u32) -> u32 {
    if c == 0 {
        return k;
    }
    let p = p as u128;
    let mut v = 0;
    let mut c = c;
    while c.is_multiple_of(p) {
        c /= p;
        v += 1;
    }
    v.min(k)
}

/// Coefficients of `g(r + p t)` as a polynomial in `t`, modulo `m`.
fn shift_scale(g: &[u128], r: u128, p: u64, m: u128) -> Vec<u128> {
    let mut h = g.to_vec();
    let n = h.len();
    // Taylor shift by r (repeated synthetic division)
    for i in 0..n {
        for j in (i..n - 1).rev() {
            h[j] = addmod128(h[j], mulmod128(r, h[j + 1], m), m);
        }
    }
    let mut scale: u128 = 1;
    let pm = p as u128 % m;
    for c in h.iter_mut() {
        *c = mulmod128(*c, scale, m);
        scale = mulmod128(scale, pm, m);
    }
    h
}

/// Number of `x mod p^k` with `g(x) = 0 mod p^k`; with `zero_only`, only
/// `x = 0 mod p` is admitted. Coefficients of `g` are residues mod `p^k`.
fn count_cluster(g: Vec<u128>, p: u64, k: u32, zero_only: bool) -> u128 {
    let v0 = g.iter().map(|&c| val_mod(c, p, k)).min().unwrap_or(k);
    if v0 >= k {
        return if zero_only { pow_u128(p, k - 1) } else { pow_u128(p, k) };
    }
    if v0 > 0 {
        let d = pow_u128(p, v0);
        let reduced: Vec<u128> = g.iter().map(|&c| c / d).collect();
        return pow_u128(p, v0) * count_cluster(reduced, p, k - v0, zero_only);
    }
    let m = pow_u128(p, k);
    let low: Vec<u64> = g.iter().map(|&c| (c % p as u128) as u64).collect();
    let mut candidates = fp::roots(&low, p);
    if zero_only {
        candidates.retain(|&r| r == 0);
    }
    let mut total = 0u128;
    for r in candidates {
        if k == 1 {
            total += 1;
            continue;
        }
        let h = shift_scale(&g, r as u128, p, m);
        let v = h.iter().map(|&c| val_mod(c, p, k)).min().unwrap_or(k);
        if v >= k {
            total += pow_u128(p, k - 1);
        } else {
            let d = pow_u128(p, v);
            let reduced: Vec<u128> = h.iter().map(|&c| c / d).collect();
            total += pow_u128(p, v - 1) * count_cluster(reduced, p, k - v, false);
        }
    }
    total
}
