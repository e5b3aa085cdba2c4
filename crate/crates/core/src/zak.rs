//! Zak (kq) transform and the flatness criterion.
//!
//! The transform used here is the canonical one attached to the magnetic
//! translation eigenbasis: for a function h on the line,
//!
//!     (Zh)(k, q) = sqrt(a/2pi) sum_n e^(-i q n a) h(k - n a)
//!
//! on the fundamental cell D = [0, a) x [0, 2pi/a). It is unitary,
//!
//!     ||Zh||_{L2(D)} = ||h||_{L2(R)},
//!
//! its inverse is H(k - n a) = sqrt(a/2pi) ∫_0^{2pi/a} dq e^(i q n a) Zh(k, q),
//! and the filter image t_d(k, q) = (2pi)^(-1/2) sum_n h_n e^(i k n 2pi/a)
//! coincides with Z(T_d) identically. On the square lattice, where
//! a = 2pi/a, these formulas reduce to the familiar sqrt(2pi/a)-normalized
//! ones; on other lattices the two cell lengths differ and only this
//! normalization keeps the map unitary and the flatness level at d/2pi.
//!
//! The sublattice orthonormality condition holds iff
//!
//!     J_d(k, q) = sum_{l<d} |Zh((k + l a)/d, q)|^2 = d/(2pi)
//!
//! identically on D, which is the second, integration-free verification
//! route for filter banks.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::Result;
use crate::filters::FilterBank;
use crate::generator::GeneratorFunction;
use crate::lattice::LatticeSpec;
use crate::quad::{integrate_panels_c, panels_for_frequency};

/// A function on the fundamental cell D = [0, a) x [0, 2pi/a), evaluated
/// lazily. `phase_modes` bounds the number of e^(i q n a) modes present,
/// which the inverse transform uses to size its quadrature.
#[derive(Clone)]
pub struct ZakFunction {
    eval: Arc<dyn Fn(f64, f64) -> Complex64 + Send + Sync>,
    pub spacing: f64,
    phase_modes: usize,
}

impl std::fmt::Debug for ZakFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ZakFunction")
            .field("spacing", &self.spacing)
            .field("phase_modes", &self.phase_modes)
            .finish()
    }
}

impl ZakFunction {
    pub fn new(
        eval: impl Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
        spacing: f64,
        phase_modes: usize,
    ) -> Self {
        ZakFunction {
            eval: Arc::new(eval),
            spacing,
            phase_modes,
        }
    }

    pub fn eval(&self, k: f64, q: f64) -> Complex64 {
        (self.eval)(k, q)
    }

    /// Cell height 2pi/a.
    pub fn q_extent(&self) -> f64 {
        2.0 * PI / self.spacing
    }

    /// L2 norm over the cell D.
    pub fn l2_norm_on_cell(&self) -> f64 {
        let a = self.spacing;
        let qmax = self.q_extent();
        let order = 16;
        let kp = 24usize.max(self.phase_modes * 6);
        let qp = 24usize.max(self.phase_modes * 6);
        let rule = crate::quad::gauss_legendre(order);
        let mut acc = 0.0;
        let kstep = a / kp as f64;
        let qstep = qmax / qp as f64;
        for i in 0..kp {
            for j in 0..qp {
                let k0 = i as f64 * kstep;
                let q0 = j as f64 * qstep;
                for (xn, xw) in rule.nodes.iter().zip(&rule.weights) {
                    let k = k0 + kstep * 0.5 * (xn + 1.0);
                    let mut inner = 0.0;
                    for (yn, yw) in rule.nodes.iter().zip(&rule.weights) {
                        let q = q0 + qstep * 0.5 * (yn + 1.0);
                        inner += yw * self.eval(k, q).norm_sqr();
                    }
                    acc += xw * inner * (kstep / 2.0) * (qstep / 2.0);
                }
            }
        }
        acc.sqrt()
    }
}

/// Zak transform of a finitely supported function. The lattice sum is an
/// exact finite sum: generator functions carry explicit (possibly truncated)
/// supports, so only the n with k - n a inside the support contribute.
pub fn zak_transform(h: &GeneratorFunction) -> ZakFunction {
    let a = h.spacing();
    let (lo, hi) = h.support();
    let h = h.clone();
    let n_lo = ((0.0 - hi) / a).floor() as i64 - 1;
    let n_hi = ((a - lo) / a).ceil() as i64 + 1;
    let modes = (n_hi - n_lo).unsigned_abs() as usize;
    let norm = (a / (2.0 * PI)).sqrt();
    ZakFunction::new(
        move |k, q| {
            let mut acc = Complex64::new(0.0, 0.0);
            for n in n_lo..=n_hi {
                let s = k - n as f64 * a;
                let v = h.eval(s);
                if v != Complex64::new(0.0, 0.0) {
                    acc += Complex64::new(0.0, -q * n as f64 * a).exp() * v;
                }
            }
            acc * norm
        },
        a,
        modes,
    )
}

/// The filter image t_d(k, q) = (2pi)^(-1/2) sum_n h_n e^(i k n 2pi/a);
/// independent of q, and identical to zak_transform of the filter's T_d.
pub fn t_d_zak(filter: &FilterBank, lat: &LatticeSpec) -> ZakFunction {
    let f = filter.clone();
    let unit = lat.k_unit();
    let norm = 1.0 / (2.0 * PI).sqrt();
    ZakFunction::new(
        move |k, _q| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (n, h) in f.iter() {
                acc += h * Complex64::new(0.0, k * n as f64 * unit).exp();
            }
            acc * norm
        },
        lat.a,
        0,
    )
}

/// Inverse Zak transform evaluated at a point on the line: with
/// omega = k - n a, k in [0, a),
///
///     H(omega) = sqrt(a/2pi) ∫_0^{2pi/a} dq e^(i q n a) z(k, q).
pub fn inverse_zak(z: &ZakFunction, omega: f64) -> Result<Complex64> {
    let a = z.spacing;
    let k = omega.rem_euclid(a);
    let n = -((omega - k) / a).round();
    let qmax = z.q_extent();
    // integrand modes: e^(i q n a) against the transform's own e^(-i q j a)
    let freq = (n.abs() + z.phase_modes as f64) * a;
    let order = 20;
    let panels = panels_for_frequency(freq, 0.0, qmax, order);
    let val = integrate_panels_c(0.0, qmax, panels, order, |q| {
        Complex64::new(0.0, q * n * a).exp() * z.eval(k, q)
    });
    Ok(val * (a / (2.0 * PI)).sqrt())
}

/// J_d(k, q) = sum_{l=0}^{d-1} |z((k + l a)/d, q)|^2.
pub fn j_d(z: &ZakFunction, d: u32, k: f64, q: f64) -> f64 {
    let a = z.spacing;
    (0..d)
        .map(|l| z.eval((k + l as f64 * a) / d as f64, q).norm_sqr())
        .sum()
}

/// Grid scan of J_d against its flat value d/(2pi).
#[derive(Debug, Clone)]
pub struct FlatnessReport {
    pub grid_n: usize,
    /// Row-major J_d values over the (k, q) grid.
    pub values: Vec<f64>,
    pub target: f64,
    pub max_deviation: f64,
}

pub fn j_d_flatness(z: &ZakFunction, d: u32, grid_n: usize) -> FlatnessReport {
    assert!(grid_n >= 1);
    let a = z.spacing;
    let qmax = z.q_extent();
    let target = d as f64 / (2.0 * PI);
    let mut values = Vec::with_capacity(grid_n * grid_n);
    let mut max_deviation = 0.0f64;
    for i in 0..grid_n {
        let k = a * (i as f64 + 0.5) / grid_n as f64;
        for j in 0..grid_n {
            let q = qmax * (j as f64 + 0.5) / grid_n as f64;
            let v = j_d(z, d, k, q);
            max_deviation = max_deviation.max((v - target).abs());
            values.push(v);
        }
    }
    FlatnessReport {
        grid_n,
        values,
        target,
        max_deviation,
    }
}
