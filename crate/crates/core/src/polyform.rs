//! Exact integer polynomials and their binary forms.
//!
//! Coefficients are arbitrary precision everywhere. The discriminant is
//! computed with the subresultant pseudo-remainder sequence, so it is exact
//! for every input.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{factor_u64, is_prime_u64};
use crate::error::{Error, Result};

/// Dense polynomial with integer coefficients in ascending degree order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Polynomial {
    coeffs: Vec<BigInt>,
}

impl Polynomial {
    /// Builds a polynomial, trimming high zero coefficients. Constants are
    /// rejected: every operation in this crate needs degree at least one.
    pub fn new(mut coeffs: Vec<BigInt>) -> Result<Self> {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.len() < 2 {
            return Err(Error::domain("polynomial must have degree >= 1"));
        }
        Ok(Polynomial { coeffs })
    }

    pub fn from_i64s(coeffs: &[i64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> &BigInt {
        self.coeffs.last().unwrap()
    }

    pub fn constant(&self) -> &BigInt {
        &self.coeffs[0]
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_one()
    }

    /// Coefficients as machine integers, when they all fit.
    pub fn to_i64s(&self) -> Option<Vec<i64>> {
        self.coeffs.iter().map(ToPrimitive::to_i64).collect()
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Vec<BigInt> {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigInt::from(i))
            .collect()
    }

    /// `X^d f(1/X)`, i.e. `F(1, X)`. May have a lower degree than `f`
    /// when the constant coefficient vanishes, so it is returned as a raw
    /// coefficient vector.
    pub fn reversed_coeffs(&self) -> Vec<BigInt> {
        let mut r: Vec<BigInt> = self.coeffs.iter().rev().cloned().collect();
        while r.last().is_some_and(Zero::is_zero) {
            r.pop();
        }
        r
    }

    pub fn content(&self) -> BigInt {
        content(&self.coeffs)
    }

    pub fn discriminant(&self) -> BigInt {
        discriminant(self)
    }

    pub fn homogenize(&self) -> BinaryForm {
        homogenize(self)
    }

    /// Comma-separated ascending coefficients, the CLI text format.
    pub fn to_coeff_string(&self) -> String {
        self.coeffs
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Cheap necessary-condition screen for irreducibility over Q.
    ///
    /// Degree 1 is always irreducible; degree 2 is decided exactly by the
    /// discriminant not being a square; degree 3 by the absence of a rational
    /// root (when the coefficients fit in 64 bits). Higher degrees return
    /// `None`.
    pub fn irreducibility_screen(&self) -> Option<bool> {
        match self.degree() {
            1 => Some(true),
            2 => {
                let d = self.discriminant();
                if d.is_negative() {
                    return Some(true);
                }
                let r = d.sqrt();
                Some(&r * &r != d)
            }
            3 => self.has_rational_root().map(|r| !r),
            _ => None,
        }
    }

    /// Rational root test; `None` if the end coefficients are too large to
    /// enumerate divisors.
    pub fn has_rational_root(&self) -> Option<bool> {
        if self.constant().is_zero() {
            return Some(true);
        }
        let a0 = self.constant().abs().to_u64()?;
        let ad = self.leading().abs().to_u64()?;
        let num = divisors(a0);
        let den = divisors(ad);
        for &p in &num {
            for &q in &den {
                if p.gcd(&q) != 1 {
                    continue;
                }
                // f(p/q) = 0  <=>  sum c_i p^i q^(d-i) = 0
                for sign in [1i64, -1] {
                    let pp = BigInt::from(p) * sign;
                    let qq = BigInt::from(q);
                    let d = self.degree();
                    let mut acc = BigInt::zero();
                    for (i, c) in self.coeffs.iter().enumerate() {
                        acc += c * pp.pow(i as u32) * qq.pow((d - i) as u32);
                    }
                    if acc.is_zero() {
                        return Some(true);
                    }
                }
            }
        }
        Some(false)
    }
}

fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factor_u64(n) {
        let cur = out.clone();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            out.extend(cur.iter().map(|d| d * pk));
        }
    }
    out.sort_unstable();
    out
}

impl FromStr for Polynomial {
    type Err = Error;

    /// Parses `"c0,c1,...,cd"` (ascending degree).
    fn from_str(s: &str) -> Result<Self> {
        let coeffs = s
            .split(',')
            .map(|t| {
                let t = t.trim();
                t.parse::<BigInt>()
                    .map_err(|_| Error::Parse(format!("bad coefficient {t:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Polynomial::new(coeffs)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let a = c.abs();
            let show_coeff = i == 0 || !a.is_one();
            if show_coeff {
                write!(f, "{a}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "{}X", if show_coeff { "*" } else { "" })?,
                _ => write!(f, "{}X^{i}", if show_coeff { "*" } else { "" })?,
            }
        }
        Ok(())
    }
}

/// Homogenization `F(X1, X2) = X2^d f(X1 / X2)`. `coeffs[i]` multiplies
/// `X1^i X2^(d-i)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryForm {
    coeffs: Vec<BigInt>,
    #[serde(skip)]
    small: Option<Vec<i64>>,
}

impl BinaryForm {
    pub fn from_poly(f: &Polynomial) -> Self {
        let coeffs = f.coeffs().to_vec();
        let small = coeffs.iter().map(ToPrimitive::to_i64).collect();
        BinaryForm { coeffs, small }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Machine-word coefficients, when every coefficient fits in `i64`.
    pub fn small_coeffs(&self) -> Option<&[i64]> {
        self.small.as_deref()
    }

    pub fn to_polynomial(&self) -> Polynomial {
        Polynomial {
            coeffs: self.coeffs.clone(),
        }
    }

    /// Exact value using 128-bit checked arithmetic; `None` on overflow or
    /// when the coefficients do not fit machine words.
    pub fn evaluate_i128(&self, a: i64, b: i64) -> Option<i128> {
        let c = self.small.as_ref()?;
        let d = c.len() - 1;
        let (a, b) = (a as i128, b as i128);
        let mut acc: i128 = 0;
        let mut apow: i128 = 1;
        for (i, &ci) in c.iter().enumerate() {
            let bp = b.checked_pow((d - i) as u32)?;
            let t = (ci as i128).checked_mul(apow)?.checked_mul(bp)?;
            acc = acc.checked_add(t)?;
            if i < d {
                apow = apow.checked_mul(a)?;
            }
        }
        Some(acc)
    }

    /// Exact value of `F(a, b)`.
    pub fn evaluate(&self, a: i64, b: i64) -> BigInt {
        if let Some(v) = self.evaluate_i128(a, b) {
            return BigInt::from(v);
        }
        self.evaluate_big(&BigInt::from(a), &BigInt::from(b))
    }

    pub fn evaluate_big(&self, a: &BigInt, b: &BigInt) -> BigInt {
        let d = self.degree();
        let mut acc = BigInt::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            acc += c * a.pow(i as u32) * b.pow((d - i) as u32);
        }
        acc
    }
}

pub fn homogenize(f: &Polynomial) -> BinaryForm {
    BinaryForm::from_poly(f)
}

/// Evaluates `F(a, b)` exactly.
pub fn evaluate_form(form: &BinaryForm, a: i64, b: i64) -> BigInt {
    form.evaluate(a, b)
}

// ---- dense integer polynomial helpers (ascending coefficients) ----

fn trim(p: &mut Vec<BigInt>) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn content(p: &[BigInt]) -> BigInt {
    p.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
}

/// Pseudo-remainder `lc(b)^(deg a - deg b + 1) a mod b`.
fn prem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    let lb = &b[db];
    let mut r = a.to_vec();
    let mut e = (a.len() - b.len() + 1) as u32;
    trim(&mut r);
    while !r.is_empty() && r.len() > db {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        for c in r.iter_mut() {
            *c *= lb;
        }
        let shift = dr - db;
        for (i, bc) in b.iter().enumerate() {
            r[i + shift] -= &lr * bc;
        }
        trim(&mut r);
        e -= 1;
    }
    if e > 0 {
        let m = lb.pow(e);
        for c in r.iter_mut() {
            *c *= &m;
        }
    }
    r
}

/// Resultant of two integer polynomials by the subresultant algorithm.
pub fn resultant(a: &[BigInt], b: &[BigInt]) -> BigInt {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    if a.is_empty() || b.is_empty() {
        return BigInt::zero();
    }
    let (da, db) = (a.len() - 1, b.len() - 1);
    if db == 0 {
        return b[0].pow(da as u32);
    }
    if da == 0 {
        return a[0].pow(db as u32);
    }
    let ca = content(&a);
    let cb = content(&b);
    for c in a.iter_mut() {
        *c = &*c / &ca;
    }
    for c in b.iter_mut() {
        *c = &*c / &cb;
    }
    let t = ca.pow(db as u32) * cb.pow(da as u32);
    let mut g = BigInt::one();
    let mut h = BigInt::one();
    let mut s = BigInt::one();
    if da < db {
        std::mem::swap(&mut a, &mut b);
        if da % 2 == 1 && db % 2 == 1 {
            s = -s;
        }
    }
    loop {
        let (da, db) = (a.len() - 1, b.len() - 1);
        let delta = (da - db) as u32;
        if da % 2 == 1 && db % 2 == 1 {
            s = -s;
        }
        let r = prem(&a, &b);
        a = b;
        let div = &g * h.pow(delta);
        b = r.into_iter().map(|c| c / &div).collect();
        g = a.last().unwrap().clone();
        if delta > 0 {
            h = g.pow(delta) / h.pow(delta - 1);
        }
        if b.is_empty() {
            return BigInt::zero();
        }
        if b.len() == 1 {
            break;
        }
    }
    let da = (a.len() - 1) as u32;
    let h = b[0].pow(da) / h.pow(da - 1);
    s * t * h
}

/// Exact discriminant; degree-one polynomials have discriminant 1.
pub fn discriminant(f: &Polynomial) -> BigInt {
    let d = f.degree();
    if d == 1 {
        return BigInt::one();
    }
    let r = resultant(f.coeffs(), &f.derivative());
    let sign = if (d * (d - 1) / 2) % 2 == 1 { -1 } else { 1 };
    r * sign / f.leading()
}

/// A discriminant value with its fundamental-discriminant classification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Discriminant {
    pub value: BigInt,
    pub is_fundamental: bool,
}

impl Discriminant {
    /// Classifies any integer; values that are not `0` or `1 mod 4` (or are
    /// zero) are simply not fundamental.
    pub fn classify(value: BigInt) -> Result<Self> {
        let m4 = value.mod_floor(&BigInt::from(4)).to_u8().unwrap();
        let is_fundamental = if value.is_zero() || m4 >= 2 {
            false
        } else {
            is_fundamental(&value)?
        };
        Ok(Discriminant {
            value,
            is_fundamental,
        })
    }
}

/// Fundamental-discriminant test.
///
/// Squarefreeness of huge values is decided by trial division to 10^6 followed
/// by a probable-prime test of the cofactor; a cofactor that is neither prime,
/// a square, nor small enough to be a product of two primes yields a range
/// error rather than a guess.
pub fn is_fundamental(d: &BigInt) -> Result<bool> {
    if d.is_zero() {
        return Err(Error::domain("0 is not a discriminant"));
    }
    let m4 = d.mod_floor(&BigInt::from(4)).to_u8().unwrap();
    match m4 {
        1 => squarefree(&d.abs()),
        0 => {
            let m: BigInt = d / 4;
            let r = m.mod_floor(&BigInt::from(4)).to_u8().unwrap();
            if r == 2 || r == 3 {
                squarefree(&m.abs())
            } else {
                Ok(false)
            }
        }
        _ => Err(Error::domain(format!(
            "{d} is congruent to {m4} mod 4, not a discriminant"
        ))),
    }
}

const TRIAL_LIMIT: u64 = 1_000_000;

fn squarefree(n: &BigInt) -> Result<bool> {
    if let Some(small) = n.to_u64() {
        return Ok(factor_u64(small).iter().all(|&(_, e)| e == 1));
    }
    let mut m = n.clone();
    let mut p = 2u64;
    while p <= TRIAL_LIMIT {
        let bp = BigInt::from(p);
        if (&m % &bp).is_zero() {
            m /= &bp;
            if (&m % &bp).is_zero() {
                return Ok(false);
            }
        }
        p += if p == 2 { 1 } else { 2 };
        if let Some(small) = m.to_u64() {
            return Ok(factor_u64(small).iter().all(|&(_, e)| e == 1));
        }
    }
    if m.is_one() || is_probable_prime(&m) {
        return Ok(true);
    }
    let r = m.sqrt();
    if &r * &r == m {
        return Ok(false);
    }
    // every prime factor exceeds 10^6; below 10^18 m is a product of two
    // distinct primes (the square case was excluded above)
    if m < BigInt::from(TRIAL_LIMIT).pow(3) {
        return Ok(true);
    }
    Err(Error::range(format!(
        "cannot certify squarefreeness of {n}: unfactored cofactor {m}"
    )))
}

/// Miller-Rabin with the first 20 prime bases.
pub fn is_probable_prime(n: &BigInt) -> bool {
    if let Some(s) = n.to_u64() {
        return is_prime_u64(s);
    }
    if n.is_even() || n.is_negative() {
        return false;
    }
    let one = BigInt::one();
    let nm1 = n - &one;
    let mut d = nm1.clone();
    let mut s = 0u32;
    while d.is_even() {
        d >>= 1;
        s += 1;
    }
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71] {
        let mut x = BigInt::from(a).modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&BigInt::from(2), n);
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
