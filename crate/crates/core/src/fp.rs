//! Dense polynomials over a prime field `Z/pZ` with `p < 2^63`: just enough
//! to count and find roots.

use crate::arith::{mulmod, powmod};

pub(crate) type FpPoly = Vec<u64>;

fn trim(a: &mut FpPoly) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

#[inline]
fn addm(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % p as u128) as u64
}

#[inline]
fn subm(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        p - (b - a)
    }
}

fn inv(a: u64, p: u64) -> u64 {
    powmod(a, p - 2, p)
}

pub(crate) fn eval(a: &[u64], x: u64, p: u64) -> u64 {
    a.iter().rev().fold(0, |acc, &c| addm(mulmod(acc, x, p), c, p))
}

fn make_monic(a: &mut FpPoly, p: u64) {
    if let Some(&lc) = a.last() {
        if lc != 1 {
            let i = inv(lc, p);
            for c in a.iter_mut() {
                *c = mulmod(*c, i, p);
            }
        }
    }
}

/// Remainder of `a` modulo the monic polynomial `m`.
fn rem_monic(a: &mut FpPoly, m: &[u64], p: u64) {
    let dm = m.len() - 1;
    trim(a);
    while a.len() > dm {
        let top = a.len() - 1;
        let q = a[top];
        if q != 0 {
            let shift = top - dm;
            for (i, &mc) in m.iter().enumerate() {
                a[i + shift] = subm(a[i + shift], mulmod(q, mc, p), p);
            }
        }
        a.pop();
        trim(a);
    }
}

fn mul(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = addm(out[i + j], mulmod(x, y, p), p);
        }
    }
    out
}

/// `base^e mod m` for monic `m`.
fn powmod_poly(base: &[u64], mut e: u64, m: &[u64], p: u64) -> FpPoly {
    let mut result: FpPoly = vec![1];
    rem_monic(&mut result, m, p);
    let mut b = base.to_vec();
    rem_monic(&mut b, m, p);
    while e > 0 {
        if e & 1 == 1 {
            result = mul(&result, &b, p);
            rem_monic(&mut result, m, p);
        }
        e >>= 1;
        if e > 0 {
            b = mul(&b, &b, p);
            rem_monic(&mut b, m, p);
        }
    }
    result
}

fn gcd(mut a: FpPoly, mut b: FpPoly, p: u64) -> FpPoly {
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        make_monic(&mut b, p);
        rem_monic(&mut a, &b, p);
        std::mem::swap(&mut a, &mut b);
    }
    make_monic(&mut a, p);
    a
}

/// Exact quotient of `a` by monic `b`.
fn div_exact(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let mut q = vec![0u64; a.len() - db];
    for top in (db..r.len()).rev() {
        let c = r[top];
        q[top - db] = c;
        if c != 0 {
            for (i, &bc) in b.iter().enumerate() {
                r[i + top - db] = subm(r[i + top - db], mulmod(c, bc, p), p);
            }
        }
    }
    q
}

const SCAN_LIMIT: u64 = 64;

/// Product of the distinct linear factors of `a` (made monic), i.e.
/// `gcd(a, X^p - X)`. `a` must be nonzero mod `p`.
fn split_part(a: &[u64], p: u64) -> FpPoly {
    let mut g = a.to_vec();
    trim(&mut g);
    make_monic(&mut g, p);
    if g.len() <= 1 {
        return vec![1];
    }
    let mut h = powmod_poly(&[0, 1], p, &g, p);
    if h.len() < 2 {
        h.resize(2, 0);
    }
    h[1] = subm(h[1], 1, p);
    gcd(g, h, p)
}

/// Number of distinct roots in `Z/pZ` of a polynomial that is nonzero mod `p`.
pub(crate) fn count_roots(a: &[u64], p: u64) -> usize {
    let mut g = a.to_vec();
    trim(&mut g);
    if g.len() <= 1 {
        return 0;
    }
    if p <= SCAN_LIMIT {
        return (0..p).filter(|&x| eval(&g, x, p) == 0).count();
    }
    split_part(&g, p).len() - 1
}

/// Distinct roots in `Z/pZ`, ascending. Equal-degree splitting uses the
/// fixed shift sequence 1, 2, 3, ... so the output is reproducible.
pub(crate) fn roots(a: &[u64], p: u64) -> Vec<u64> {
    let mut g = a.to_vec();
    trim(&mut g);
    if g.len() <= 1 {
        return Vec::new();
    }
    if p <= SCAN_LIMIT {
        return (0..p).filter(|&x| eval(&g, x, p) == 0).collect();
    }
    let s = split_part(&g, p);
    let mut out = Vec::new();
    split(s, p, &mut out);
    out.sort_unstable();
    out
}

fn split(g: FpPoly, p: u64, out: &mut Vec<u64>) {
    match g.len() {
        0 | 1 => {}
        2 => out.push(subm(0, g[0], p)),
        _ => {
            let e = (p - 1) / 2;
            let mut delta = 1u64;
            loop {
                let mut w = powmod_poly(&[delta % p, 1], e, &g, p);
                if w.is_empty() {
                    w.push(0);
                }
                w[0] = subm(w[0], 1, p);
                let h = gcd(g.clone(), w, p);
                if h.len() > 1 && h.len() < g.len() {
                    let other = div_exact(&g, &h, p);
                    split(h, p, out);
                    split(other, p, out);
                    return;
                }
                delta += 1;
            }
        }
    }
}
