//! Word-sized modular arithmetic shared by the root counters, the prime
//! sieves and the quadratic-field code.

use num_bigint::{BigInt, Sign};

#[inline]
pub fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn powmod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Largest modulus accepted by the 128-bit helpers. Keeping two bits of
/// headroom lets `addmod128` work without overflow checks.
pub const MAX_MODULUS_128: u128 = 1u128 << 126;

#[inline]
pub fn addmod128(a: u128, b: u128, m: u128) -> u128 {
    let s = a + b;
    if s >= m {
        s - m
    } else {
        s
    }
}

#[inline]
pub fn submod128(a: u128, b: u128, m: u128) -> u128 {
    if a >= b {
        a - b
    } else {
        m - (b - a)
    }
}

/// `a * b mod m` for `m <= 2^126`, operands already reduced.
pub fn mulmod128(a: u128, b: u128, m: u128) -> u128 {
    if (a >> 64) == 0 && (b >> 64) == 0 {
        return (a * b) % m;
    }
    // shift-and-add; only reached for moduli above 2^64
    let (mut x, mut y) = if a < b { (b, a) } else { (a, b) };
    let mut acc = 0u128;
    while y > 0 {
        if y & 1 == 1 {
            acc = addmod128(acc, x, m);
        }
        x = addmod128(x, x, m);
        y >>= 1;
    }
    acc
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn gcd_i64(a: i64, b: i64) -> u64 {
    gcd_u64(a.unsigned_abs(), b.unsigned_abs())
}

/// Jacobi symbol `(a/n)` for odd `n >= 1`.
pub fn jacobi(mut a: u64, mut n: u64) -> i32 {
    debug_assert!(n & 1 == 1);
    a %= n;
    let mut sign = 1;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        if tz & 1 == 1 && (n % 8 == 3 || n % 8 == 5) {
            sign = -sign;
        }
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let s = d.trailing_zeros();
    d >>= s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_brent(n: u64) -> u64 {
    // n is odd, composite and not a prime power of a small prime
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mulmod(x, x, n) + c) % n;
        let (mut x, mut y, mut g) = (2u64, 2u64, 1u64);
        let mut q = 1u64;
        let mut ys = y;
        let mut r = 1u64;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..(128.min(r - k)) {
                    y = f(y);
                    q = mulmod(q, x.abs_diff(y), n);
                }
                g = gcd_u64(q, n);
                k += 128;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd_u64(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

/// Prime factorization of a 64-bit integer as sorted `(prime, exponent)` pairs.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    let mut stack = vec![n];
    let mut primes = Vec::new();
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime_u64(m) {
            primes.push(m);
            continue;
        }
        let r = (m as f64).sqrt() as u64;
        let root = (r.saturating_sub(1)..=r + 1).find(|&s| s * s == m);
        if let Some(s) = root {
            stack.push(s);
            stack.push(s);
            continue;
        }
        let d = pollard_brent(m);
        stack.push(d);
        stack.push(m / d);
    }
    primes.sort_unstable();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

/// An arbitrary-precision integer prepared for repeated reduction modulo
/// word-sized moduli without allocating.
#[derive(Debug, Clone)]
pub struct Reducer {
    negative: bool,
    // most significant limb first
    limbs: Vec<u64>,
}

impl Reducer {
    pub fn new(value: &BigInt) -> Self {
        let (sign, mut limbs) = value.to_u64_digits();
        limbs.reverse();
        Reducer {
            negative: sign == Sign::Minus,
            limbs,
        }
    }

    /// Value modulo `m`, in `[0, m)`.
    pub fn rem(&self, m: u64) -> u64 {
        let mut acc = 0u128;
        let m128 = m as u128;
        for &limb in &self.limbs {
            acc = ((acc << 64) | limb as u128) % m128;
        }
        let r = acc as u64;
        if self.negative && r != 0 {
            m - r
        } else {
            r
        }
    }

    /// Value modulo `m <= 2^126`, in `[0, m)`.
    pub fn rem128(&self, m: u128) -> u128 {
        let shift = mulmod128(1u128 << 63, 2, m);
        let mut acc = 0u128;
        for &limb in &self.limbs {
            acc = addmod128(mulmod128(acc, shift, m), (limb as u128) % m, m);
        }
        if self.negative && acc != 0 {
            m - acc
        } else {
            acc
        }
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.is_empty()
    }
}

/// `ln |n|` for a nonzero arbitrary-precision integer, accurate to a few
/// ulps regardless of size.
pub fn ln_abs(n: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap().abs().ln();
    }
    let shift = bits - 64;
    let top = (n.magnitude() >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Exact `p`-adic valuation of a nonzero arbitrary-precision integer.
pub fn valuation(n: &BigInt, p: u64) -> u32 {
    use num_integer::Integer;
    use num_traits::Zero;
    assert!(!n.is_zero(), "valuation of zero");
    let p = BigInt::from(p);
    let mut v = 0;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}
