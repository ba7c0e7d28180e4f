//! Dickman's ρ and smooth-count estimates.
//!
//! ρ is built one unit interval at a time, each interval stored as a
//! Chebyshev expansion sampled at Chebyshev nodes. On `[n, n+1]` the table
//! solves `u ρ(u) = ∫_{u−1}^{u} ρ(t) dt` by fixed-point iteration, with
//! 32-point Gauss–Legendre quadrature for the integrals.
//!
//! This integrated form of `u ρ′(u) = −ρ(u−1)` has a positive integrand,
//! so errors stay relative. Marching `ρ(u) = ρ(n) − ∫_n^u ρ(t−1)/t dt`
//! instead leaves an absolute error near machine epsilon that swamps ρ
//! beyond `u ≈ 12`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
pub const DEFAULT_U_MAX: f64 = 50.0;
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
/// Highest derivative order served by [`RhoTable::deriv`].
pub const MAX_DERIV: u32 = 4;
/// Placeholder for the unknown constant in the expansion's region condition.
pub const SAIAS_REGION_C: f64 = 1.0;

const CHEB_NODES: usize = 40;
const GL_ORDER: usize = 32;
const MAX_PICARD: usize = 200;

/// Nodes and weights of Gauss–Legendre quadrature on `[-1, 1]`.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Chebyshev expansion on `[lo, lo + 1]`.
#[derive(Debug, Clone)]
struct Piece {
    lo: f64,
    coeffs: Vec<f64>,
}

impl Piece {
    fn from_fn(lo: f64, f: impl Fn(f64) -> f64) -> Self {
        let n = CHEB_NODES;
        let pi = std::f64::consts::PI;
        let vals: Vec<f64> = (0..n)
            .map(|k| {
                let t = (pi * (k as f64 + 0.5) / n as f64).cos();
                f(lo + 0.5 * (t + 1.0))
            })
            .collect();
        let coeffs = (0..n)
            .map(|j| {
                let s: f64 = (0..n)
                    .map(|k| vals[k] * (pi * j as f64 * (k as f64 + 0.5) / n as f64).cos())
                    .sum();
                s * 2.0 / n as f64 * if j == 0 { 0.5 } else { 1.0 }
            })
            .collect();
        Piece { lo, coeffs }
    }

    fn eval(&self, u: f64) -> f64 {
        clenshaw(&self.coeffs, 2.0 * (u - self.lo) - 1.0)
    }

    /// Derivative of the expansion itself.
    fn eval_derivative(&self, u: f64) -> f64 {
        let c = &self.coeffs;
        let n = c.len();
        let mut d = vec![0.0; n + 1];
        for j in (1..n).rev() {
            d[j - 1] = d[j + 1] + 2.0 * j as f64 * c[j];
        }
        d[0] *= 0.5;
        // d/du = 2 d/dt
        2.0 * clenshaw(&d[..n - 1], 2.0 * (u - self.lo) - 1.0)
    }
}

fn clenshaw(c: &[f64], t: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &cj in c.iter().skip(1).rev() {
        let b0 = 2.0 * t * b1 - b2 + cj;
        b2 = b1;
        b1 = b0;
    }
    t * b1 - b2 + c[0]
}

/// ρ on `[0, u_max]`.
#[derive(Debug, Clone)]
pub struct RhoTable {
    u_max: f64,
    tolerance: f64,
    /// `pieces[n − 1]` covers `[n, n + 1]`.
    pieces: Vec<Piece>,
}

impl RhoTable {
    pub fn new(u_max: f64) -> Result<Self> {
        if !(u_max >= 1.0) || u_max > 1000.0 {
            return Err(Error::range(format!("u_max = {u_max} outside [1, 1000]")));
        }
        let (gx, gw) = gauss_legendre(GL_ORDER);
        let integrate = |a: f64, b: f64, f: &dyn Fn(f64) -> f64| -> f64 {
            let half = 0.5 * (b - a);
            let mid = 0.5 * (b + a);
            gx.iter().zip(&gw).map(|(&x, &w)| w * f(mid + half * x)).sum::<f64>() * half
        };
        let mut pieces: Vec<Piece> = Vec::new();
        let n_pieces = u_max.ceil() as usize;
        for n in 1..=n_pieces {
            let lo = n as f64;
            let prev = pieces.last().cloned();
            let rho_prev = |t: f64| prev.as_ref().map_or(1.0, |p| p.eval(t));
            // u ρ(u) = ∫_{u−1}^{u} ρ, split at lo; the part below lo is known
            let known = |u: f64| integrate(u - 1.0, lo, &rho_prev);
            let mut piece = Piece::from_fn(lo, |u| known(u) / u);
            for _ in 0..MAX_PICARD {
                let next = Piece::from_fn(lo, |u| (known(u) + integrate(lo, u, &|t| piece.eval(t))) / u);
                let scale = next.coeffs[0].abs();
                let change = next
                    .coeffs
                    .iter()
                    .zip(&piece.coeffs)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                piece = next;
                if change <= 1e-17 * scale {
                    break;
                }
            }
            pieces.push(piece);
        }
        Ok(RhoTable {
            u_max,
            tolerance: DEFAULT_TOLERANCE,
            pieces,
        })
    }

    /// Shared table on `[0, 50]`.
    pub fn global() -> &'static RhoTable {
        static TABLE: OnceLock<RhoTable> = OnceLock::new();
        TABLE.get_or_init(|| RhoTable::new(DEFAULT_U_MAX).expect("default range is valid"))
    }

    pub fn u_max(&self) -> f64 {
        self.u_max
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    fn piece(&self, u: f64) -> &Piece {
        let n = (u.floor() as usize).clamp(1, self.pieces.len());
        &self.pieces[n - 1]
    }

    fn check(&self, u: f64) -> Result<()> {
        if u.is_nan() || u > self.u_max {
            Err(Error::range(format!("u = {u} exceeds u_max = {}", self.u_max)))
        } else {
            Ok(())
        }
    }

    /// ρ(u); 0 for `u < 0`, 1 on `[0, 1]`.
    pub fn rho(&self, u: f64) -> Result<f64> {
        self.check(u)?;
        Ok(self.rho_unchecked(u))
    }

    fn rho_unchecked(&self, u: f64) -> f64 {
        if u < 0.0 {
            0.0
        } else if u <= 1.0 {
            1.0
        } else {
            self.piece(u).eval(u)
        }
    }

    /// `ρ^{(j)}(u)` from the differentiated delay equation
    /// `u ρ^{(j)}(u) = −ρ^{(j−1)}(u−1) − (j−1) ρ^{(j−1)}(u)`.
    /// At integers the right-hand limit is returned.
    pub fn deriv(&self, u: f64, j: u32) -> Result<f64> {
        if j > MAX_DERIV {
            return Err(Error::range(format!("derivative order {j} > {MAX_DERIV}")));
        }
        self.check(u)?;
        Ok(self.deriv_unchecked(u, j))
    }

    fn deriv_unchecked(&self, u: f64, j: u32) -> f64 {
        if j == 0 {
            return self.rho_unchecked(u);
        }
        if u < 1.0 {
            return 0.0;
        }
        let shifted = self.deriv_unchecked(u - 1.0, j - 1);
        let same = if j > 1 {
            (j - 1) as f64 * self.deriv_unchecked(u, j - 1)
        } else {
            0.0
        };
        -(shifted + same) / u
    }

    /// Derivative of the stored expansion, independent of the delay
    /// equation; used to measure the table's residual.
    pub fn table_derivative(&self, u: f64) -> Result<f64> {
        self.check(u)?;
        Ok(if u < 1.0 { 0.0 } else { self.piece(u).eval_derivative(u) })
    }

    /// `|u ρ′(u) + ρ(u − 1)|` with `ρ′` taken from the stored expansion.
    pub fn dde_residual(&self, u: f64) -> Result<f64> {
        Ok((u * self.table_derivative(u)? + self.rho(u - 1.0)?).abs())
    }
}

pub fn rho(u: f64) -> Result<f64> {
    RhoTable::global().rho(u)
}

pub fn rho_deriv(u: f64, j: u32) -> Result<f64> {
    RhoTable::global().deriv(u, j)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothPrediction {
    pub x: f64,
    pub b: f64,
    pub u: f64,
    pub psi_hildebrand: f64,
    pub psi_saias_2term: f64,
    pub alpha_shift: Option<f64>,
    /// `(x, B)` lies outside `x ≥ B ≥ exp((log log x)^{5/3})`.
    pub outside_region: bool,
    /// `{u}` is too close to an integer for the two-term expansion.
    pub near_breakpoint: bool,
}

fn u_of(x: f64, b: f64) -> Result<f64> {
    if !(b > 1.0) || !(x >= 1.0) {
        return Err(Error::domain(format!("need x >= 1 and B > 1, got x = {x}, B = {b}")));
    }
    Ok(x.ln() / b.ln())
}

fn outside_region(x: f64, b: f64) -> bool {
    let lower = if x > std::f64::consts::E {
        x.ln().ln().max(0.0).powf(1.67).exp()
    } else {
        2.0
    };
    !(b >= 2.0 && b <= x && b >= lower)
}

fn near_breakpoint(u: f64, b: f64, j: u32) -> bool {
    let lb = b.ln();
    let gap = SAIAS_REGION_C * (j + 1) as f64 * lb.ln().max(0.0) / lb;
    u > 0.0 && u < (j + 1) as f64 && u.fract() <= gap
}

/// `x ρ(log x / log B)`.
pub fn psi_hildebrand(x: f64, b: f64) -> Result<f64> {
    Ok(x * rho(u_of(x, b)?)?)
}

/// `x Σ_{j ≤ J} γ_j ρ^{(j)}(u) / (log B)^j` with `γ_0 = 1`, `γ_1 = γ − 1`.
pub fn psi_saias(x: f64, b: f64, j: u32) -> Result<f64> {
    let u = u_of(x, b)?;
    match j {
        0 => Ok(x * rho(u)?),
        1 => Ok(x * (rho(u)? + (EULER_GAMMA - 1.0) * rho_deriv(u, 1)? / b.ln())),
        _ => Err(Error::range(format!("expansion order {j} unsupported (max 1)"))),
    }
}

/// Both estimates with region diagnostics; `alpha` shifts `x` to `x e^α`.
pub fn predict(x: f64, b: f64, alpha: Option<f64>) -> Result<SmoothPrediction> {
    let xs = x * alpha.unwrap_or(0.0).exp();
    let u = u_of(xs, b)?;
    Ok(SmoothPrediction {
        x,
        b,
        u,
        psi_hildebrand: psi_hildebrand(xs, b)?,
        psi_saias_2term: psi_saias(xs, b, 1)?,
        alpha_shift: alpha,
        outside_region: outside_region(xs, b),
        near_breakpoint: near_breakpoint(u, b, 1),
    })
}

/// `Ψ(x e^α, B) / (x e^α)` through the two-term expansion.
pub fn predicted_smooth_ratio(alpha_f: f64, x: f64, b: f64) -> Result<f64> {
    let xs = x * alpha_f.exp();
    Ok(psi_saias(xs, b, 1)? / xs)
}

/// `(6/π²) A x² Π ρ(d_i u)`.
pub fn conjecture_prediction(degrees: &[u32], area: f64, x: f64, b: f64) -> Result<f64> {
    let u = u_of(x, b)?;
    let mut prod = 6.0 / (std::f64::consts::PI * std::f64::consts::PI) * area * x * x;
    for &d in degrees {
        prod *= rho(d as f64 * u)?;
    }
    Ok(prod)
}
