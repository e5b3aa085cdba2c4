//! Gauss-Legendre and Gauss-Hermite rules with panel and adaptive drivers.
//!
//! The integrands in this crate are trigonometric polynomials times smooth
//! (Gaussian-like) factors, so fixed-order Gauss-Legendre panels scaled to
//! the highest frequency present reach spectral accuracy cheaply. The
//! adaptive driver exists as a fallback for integrands whose frequency
//! content the caller cannot bound.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on the Legendre recurrence; machine-precision roots.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut pp = 0.0;
            for _ in 0..100 {
                // Legendre P_n(x) and derivative by upward recurrence.
                let mut p0 = 1.0;
                let mut p1 = x;
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                pp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / pp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            let w = 2.0 / ((1.0 - x * x) * pp * pp);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn integrate_c(&self, lo: f64, hi: f64, f: impl Fn(f64) -> Complex64) -> Complex64 {
        let c = 0.5 * (lo + hi);
        let h = 0.5 * (hi - lo);
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(c + h * x) * *w;
        }
        acc * h
    }

    pub fn integrate(&self, lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> f64 {
        let c = 0.5 * (lo + hi);
        let h = 0.5 * (hi - lo);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(c + h * x) * *w;
        }
        acc * h
    }
}

fn gl_cache() -> &'static Mutex<HashMap<usize, Arc<GaussLegendre>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Shared Gauss-Legendre rule of the given order.
pub fn gauss_legendre(order: usize) -> Arc<GaussLegendre> {
    let mut cache = gl_cache().lock().unwrap();
    cache
        .entry(order)
        .or_insert_with(|| Arc::new(GaussLegendre::new(order)))
        .clone()
}

/// Composite Gauss-Legendre over equal panels.
pub fn integrate_panels_c(
    lo: f64,
    hi: f64,
    panels: usize,
    order: usize,
    f: impl Fn(f64) -> Complex64,
) -> Complex64 {
    let rule = gauss_legendre(order);
    let step = (hi - lo) / panels as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let a = lo + step * p as f64;
        acc += rule.integrate_c(a, a + step, &f);
    }
    acc
}

pub fn integrate_panels(
    lo: f64,
    hi: f64,
    panels: usize,
    order: usize,
    f: impl Fn(f64) -> f64,
) -> f64 {
    let rule = gauss_legendre(order);
    let step = (hi - lo) / panels as f64;
    let mut acc = 0.0;
    for p in 0..panels {
        let a = lo + step * p as f64;
        acc += rule.integrate(a, a + step, &f);
    }
    acc
}

/// Panel count that puts at least ~10 Gauss nodes per oscillation of the
/// highest angular frequency present on [lo, hi].
pub fn panels_for_frequency(max_angular_freq: f64, lo: f64, hi: f64, order: usize) -> usize {
    let cycles = max_angular_freq.abs() * (hi - lo) / (2.0 * PI);
    let nodes_needed = (10.0 * cycles).ceil() as usize + order;
    nodes_needed.div_ceil(order).max(1)
}

/// Adaptive bisection with a tolerance on the absolute error.
///
/// Each interval is accepted when an order-15 and an order-25 estimate agree
/// within its share of the budget. Failure to converge reports the partial
/// estimate and the achieved bound.
pub fn integrate_adaptive_c(
    lo: f64,
    hi: f64,
    abs_tol: f64,
    f: &dyn Fn(f64) -> Complex64,
) -> Result<(Complex64, f64)> {
    fn recurse(
        lo: f64,
        hi: f64,
        tol: f64,
        depth: usize,
        f: &dyn Fn(f64) -> Complex64,
        coarse: &GaussLegendre,
        fine: &GaussLegendre,
    ) -> (Complex64, f64, bool) {
        let c = coarse.integrate_c(lo, hi, f);
        let v = fine.integrate_c(lo, hi, f);
        let err = (v - c).norm();
        if err <= tol || depth == 0 {
            (v, err, err <= tol)
        } else {
            let mid = 0.5 * (lo + hi);
            let (v1, e1, ok1) = recurse(lo, mid, tol / 2.0, depth - 1, f, coarse, fine);
            let (v2, e2, ok2) = recurse(mid, hi, tol / 2.0, depth - 1, f, coarse, fine);
            (v1 + v2, e1 + e2, ok1 && ok2)
        }
    }
    let coarse = gauss_legendre(15);
    let fine = gauss_legendre(25);
    let (value, bound, ok) = recurse(lo, hi, abs_tol, 28, f, &coarse, &fine);
    if ok {
        Ok((value, bound))
    } else {
        Err(Error::QuadratureNonConvergence {
            est_re: value.re,
            est_im: value.im,
            bound,
            tol: abs_tol,
        })
    }
}

/// Nodes and weights for ∫ e^(-t^2) g(t) dt.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    /// Roots of the orthonormal Hermite polynomial, located by Sturm
    /// bisection on the Jacobi matrix (off-diagonals sqrt(k/2)) and polished
    /// by Newton. The recurrence values grow like e^(x^2/2), which bounds
    /// usable orders at roughly 650 before overflow; far above any order the
    /// crate requests.
    pub fn new(n: usize) -> Self {
        assert!((1..=650).contains(&n), "Gauss-Hermite order out of range");
        let nf = n as f64;
        let bound = (2.0 * nf).sqrt() + 2.0;
        let count_below = |lambda: f64| -> usize {
            // LDL pivots of J - lambda I; J has zero diagonal and
            // off-diagonals b_k = sqrt(k/2)
            let mut count = 0;
            let mut q = -lambda;
            if q < 0.0 {
                count += 1;
            }
            for k in 1..n {
                let b2 = k as f64 / 2.0;
                let q_safe = if q.abs() < 1e-300 {
                    if q >= 0.0 { 1e-300 } else { -1e-300 }
                } else {
                    q
                };
                q = -lambda - b2 / q_safe;
                if q < 0.0 {
                    count += 1;
                }
            }
            count
        };
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            // bisect for the i-th smallest eigenvalue
            let (mut lo, mut hi) = (-bound, bound);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if count_below(mid) <= i {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo < 1e-13 * bound {
                    break;
                }
            }
            let mut z = 0.5 * (lo + hi);
            let mut dpn = 0.0;
            for _ in 0..40 {
                let (p, dp) = hermite_orthonormal_and_derivative(n, z);
                dpn = dp;
                let dz = p / dp;
                z -= dz;
                if dz.abs() < 1e-15 * (1.0 + z.abs()) {
                    break;
                }
            }
            let (_, dp) = hermite_orthonormal_and_derivative(n, z);
            dpn = dp;
            nodes[i] = z;
            nodes[n - 1 - i] = -z;
            let w = 2.0 / (dpn * dpn);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
            let (_, dp) = hermite_orthonormal_and_derivative(n, 0.0);
            weights[n / 2] = 2.0 / (dp * dp);
        }
        GaussHermite { nodes, weights }
    }
}

/// Orthonormal Hermite polynomial h~_n and derivative at x (weight e^(-x^2)).
fn hermite_orthonormal_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = std::f64::consts::PI.powf(-0.25);
    if n == 0 {
        return (p0, 0.0);
    }
    let mut p1 = std::f64::consts::SQRT_2 * x * p0;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = (2.0 / kf).sqrt() * x * p1 - ((kf - 1.0) / kf).sqrt() * p0;
        p0 = p1;
        p1 = p2;
    }
    // h~'_n = sqrt(2n) h~_{n-1}
    ((p1), (2.0 * n as f64).sqrt() * p0)
}

fn gh_cache() -> &'static Mutex<HashMap<usize, Arc<GaussHermite>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussHermite>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Shared Gauss-Hermite rule of the given order.
pub fn gauss_hermite(order: usize) -> Arc<GaussHermite> {
    let mut cache = gh_cache().lock().unwrap();
    cache
        .entry(order)
        .or_insert_with(|| Arc::new(GaussHermite::new(order)))
        .clone()
}
