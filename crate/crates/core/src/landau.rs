//! Landau-level wavefunctions on magnetic lattices.
//!
//! A generator function h(s) on the line maps to a two-dimensional
//! wavefunction through the level-l kernel
//!
//!     psi(x, y) = ∫ K_l(r, s) h(s) ds,
//!     K_l(r, s) = e^(i (y/2) u) / (2 pi) * e^(i y s) * I_l(u + s),
//!     I_l(v)    = ∫ e^(i v P - i gamma P^2) f_l(P) dP,
//!
//! where f_l is the l-th harmonic-oscillator eigenstate, u = x - y/sqrt(3)
//! and gamma = 1/(2 sqrt(3)) on the triangular lattice, u = x and gamma = 0
//! on the square one. At l = 0 the P-integral is Gaussian and collapses to
//! the closed-form kernel
//!
//!     K_0(r, s) = C_shape * e^(i (y/2) u) * e^(i y s - beta (u + s)^2)
//!
//! with beta = (3/8)(1 - i/sqrt(3)) (triangular) or 1/2 (square). For a
//! filter-backed generator the s-integral is itself a sum of Gaussian
//! integrals, giving a closed form in terms of the complex error function;
//! the evaluation here keeps every factor in product form (Faddeeva-based)
//! so it stays accurate in relative terms even where |psi| underflows the
//! Gaussian envelope.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cerf::faddeeva_w;
use crate::error::{Error, Result};
use crate::filters::FilterBank;
use crate::generator::{GeneratorFunction, GeneratorSource};
use crate::lattice::{make_lattice, site_position, DecimationPattern, LatticeShape, LatticeSpec, SiteIndex};
use crate::quad::{gauss_hermite, gauss_legendre, integrate_adaptive_c, integrate_panels_c, panels_for_frequency};

/// Kernel selector: lattice shape plus Landau level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KernelSpec {
    pub shape: LatticeShape,
    pub level: u32,
}

pub const MAX_LEVEL: u32 = 10;

/// beta of the level-0 kernel exponent.
pub fn kernel_beta(shape: LatticeShape) -> Complex64 {
    match shape {
        LatticeShape::Triangular => Complex64::new(3.0 / 8.0, -3.0 / 8.0 / 3.0f64.sqrt()),
        LatticeShape::Square => Complex64::new(0.5, 0.0),
    }
}

/// Constant prefactor of the level-0 kernel.
pub fn kernel_prefactor(shape: LatticeShape) -> Complex64 {
    let p34 = PI.powf(0.75);
    match shape {
        LatticeShape::Triangular => {
            let root = (Complex64::new(2.0, 2.0 / 3.0f64.sqrt())).sqrt();
            Complex64::new(1.0, 0.0) / (p34 * root)
        }
        LatticeShape::Square => Complex64::new(1.0 / (2.0f64.sqrt() * p34), 0.0),
    }
}

/// Chirp gamma of the P-integral.
fn kernel_chirp(shape: LatticeShape) -> f64 {
    match shape {
        LatticeShape::Triangular => 0.5 / 3.0f64.sqrt(),
        LatticeShape::Square => 0.0,
    }
}

/// The sheared coordinate the kernel Gaussian lives in.
pub fn kernel_u(shape: LatticeShape, r: [f64; 2]) -> f64 {
    match shape {
        LatticeShape::Triangular => r[0] - r[1] / 3.0f64.sqrt(),
        LatticeShape::Square => r[0],
    }
}

/// Level-0 closed-form kernel.
pub fn kernel_eval_level0(shape: LatticeShape, r: [f64; 2], s: f64) -> Complex64 {
    let u = kernel_u(shape, r);
    let beta = kernel_beta(shape);
    let t = u + s;
    let phase = Complex64::new(0.0, 0.5 * r[1] * u + r[1] * s);
    kernel_prefactor(shape) * (phase - beta * t * t).exp()
}

/// Kernel at any level; level 0 dispatches to the closed form.
pub fn kernel_eval(ks: KernelSpec, r: [f64; 2], s: f64) -> Result<Complex64> {
    if ks.level == 0 {
        Ok(kernel_eval_level0(ks.shape, r, s))
    } else {
        kernel_level(ks.shape, ks.level, r, s)
    }
}

/// Normalized harmonic-oscillator eigenstate f_l(t).
pub fn hermite_function(l: u32, t: f64) -> f64 {
    let g = (-0.5 * t * t).exp();
    let mut f0 = PI.powf(-0.25) * g;
    if l == 0 {
        return f0;
    }
    let mut f1 = 2.0f64.sqrt() * t * f0;
    for k in 2..=l {
        let kf = k as f64;
        let f2 = t * (2.0 / kf).sqrt() * f1 - ((kf - 1.0) / kf).sqrt() * f0;
        f0 = f1;
        f1 = f2;
    }
    f1
}

/// I_l(v) = ∫ e^(i v P - i gamma P^2) f_l(P) dP by Gauss-Hermite quadrature
/// on the steepest-descent contour. Writing the exponent as
/// -alpha (P - P*)^2 - v^2/(4 alpha) with alpha = 1/2 + i gamma and the
/// saddle P* = i v / (2 alpha), the substitution P = P* + t/sqrt(alpha)
/// leaves e^(-t^2) times a degree-l polynomial, which the rule integrates
/// exactly; the order only has to grow with the level.
fn i_level(shape: LatticeShape, level: u32, v: f64) -> Complex64 {
    let gamma = kernel_chirp(shape);
    let alpha = Complex64::new(0.5, gamma);
    let sq = alpha.sqrt();
    let p_star = Complex64::new(0.0, v) / (2.0 * alpha);
    let pref = (-v * v / (4.0 * alpha)).exp() / sq * PI.powf(-0.25);
    let rule = gauss_hermite((level as usize + 6).max(8));
    let mut acc = Complex64::new(0.0, 0.0);
    for (t, w) in rule.nodes.iter().zip(&rule.weights) {
        acc += *w * hermite_poly_normalized_c(level, p_star + t / sq);
    }
    pref * acc
}

/// H_l(z)/sqrt(2^l l!), the polynomial factor of f_l without the Gaussian.
fn hermite_poly_normalized_c(l: u32, z: Complex64) -> Complex64 {
    let mut p0 = Complex64::new(1.0, 0.0);
    if l == 0 {
        return p0;
    }
    let mut p1 = 2.0f64.sqrt() * z;
    for k in 2..=l {
        let kf = k as f64;
        let p2 = z * (2.0 / kf).sqrt() * p1 - ((kf - 1.0) / kf).sqrt() * p0;
        p0 = p1;
        p1 = p2;
    }
    p1
}

fn hermite_poly_normalized(l: u32, x: f64) -> f64 {
    hermite_poly_normalized_c(l, Complex64::new(x, 0.0)).re
}

/// Higher-level kernel by quadrature over the oscillator coordinate.
pub fn kernel_level(shape: LatticeShape, level: u32, r: [f64; 2], s: f64) -> Result<Complex64> {
    if level > MAX_LEVEL {
        return Err(Error::UnsupportedLevel(level));
    }
    let u = kernel_u(shape, r);
    let v = u + s;
    let phase = Complex64::new(0.0, 0.5 * r[1] * u + r[1] * s).exp();
    Ok(phase / (2.0 * PI) * i_level(shape, level, v))
}

/// psi(r) = ∫ K(r, s) h(s) ds over the generator support.
pub fn synthesize(ks: KernelSpec, h: &GeneratorFunction, r: [f64; 2]) -> Result<Complex64> {
    let (lo, hi) = h.support();
    if ks.level == 0 {
        let integrand = |s: f64| kernel_eval_level0(ks.shape, r, s) * h.eval(s);
        match h.source() {
            GeneratorSource::Filter { max_abs_index, .. } => {
                let order = 20;
                let freq =
                    r[1].abs() + *max_abs_index as f64 * 2.0 * PI / h.spacing() + 6.0;
                let panels = panels_for_frequency(freq, lo, hi, order);
                Ok(integrate_panels_c(lo, hi, panels, order, integrand))
            }
            GeneratorSource::External => Ok(integrate_adaptive_c(lo, hi, 1e-9, &integrand)?.0),
        }
    } else {
        // direct (slow) route: per-node kernel quadrature
        let order = 20;
        let freq = r[1].abs() + 8.0 * 2.0 * PI / h.spacing();
        let panels = panels_for_frequency(freq, lo, hi, order);
        let rule = gauss_legendre(order);
        let step = (hi - lo) / panels as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for p in 0..panels {
            let a0 = lo + p as f64 * step;
            let c = a0 + 0.5 * step;
            for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                let s = c + 0.5 * step * x;
                acc += *w * kernel_level(ks.shape, ks.level, r, s)? * h.eval(s);
            }
        }
        Ok(acc * 0.5 * step)
    }
}

/// Magnetic translation of a wavefunction closure: T_1^n T_2^m applied to f,
///
///     (T f)(r) = (-1)^(n m) e^(i/2 (Y x - X y)) f(x - X, y - Y)
///
/// with (X, Y) the localization center the translation transports the
/// origin to.
pub fn magnetic_translate<F>(f: F, site: SiteIndex, lat: &LatticeSpec) -> impl Fn([f64; 2]) -> Complex64
where
    F: Fn([f64; 2]) -> Complex64,
{
    let [bx, by] = site_position(lat, site);
    let sign = if (site.n * site.m) % 2 == 0 { 1.0 } else { -1.0 };
    move |r: [f64; 2]| {
        let phase = Complex64::new(0.0, 0.5 * (by * r[0] - bx * r[1])).exp();
        sign * phase * f([r[0] - bx, r[1] - by])
    }
}

/// Closed-form wavefunction of a filter bank at level 0.
///
/// Each coefficient h_l contributes a Gaussian segment integral expressed
/// through the Faddeeva function; the three branch combinations below cancel
/// the O(1) erf plateaus analytically, so the result keeps full relative
/// accuracy deep in the Gaussian tails.
#[derive(Debug, Clone)]
pub struct ClosedFormWavefunction {
    shape: LatticeShape,
    a: f64,
    k_unit: f64,
    beta: Complex64,
    sqrt_beta: Complex64,
    pref: Complex64,
    modes: Vec<(f64, Complex64)>,
}

impl ClosedFormWavefunction {
    pub fn new(filter: &FilterBank, shape: LatticeShape) -> Self {
        let lat = make_lattice(shape, filter.d(), DecimationPattern::AlongA2);
        let beta = kernel_beta(shape);
        let sqrt_beta = beta.sqrt();
        // kernel prefactor x (integral-to-erf factor) x T_d normalization
        let pref = kernel_prefactor(shape) * (PI.sqrt() / (2.0 * sqrt_beta)) / lat.a.sqrt();
        ClosedFormWavefunction {
            shape,
            a: lat.a,
            k_unit: lat.k_unit(),
            beta,
            sqrt_beta,
            pref,
            modes: filter.iter().map(|(l, h)| (l as f64, h)).collect(),
        }
    }

    pub fn shape(&self) -> LatticeShape {
        self.shape
    }

    pub fn spacing(&self) -> f64 {
        self.a
    }

    pub fn eval(&self, r: [f64; 2]) -> Complex64 {
        let (a, beta, sb) = (self.a, self.beta, self.sqrt_beta);
        let u = kernel_u(self.shape, r);
        let y = r[1];
        let e_a = (-beta * u * u).exp();
        let mut acc = Complex64::new(0.0, 0.0);
        for &(l, h) in &self.modes {
            let alpha = y + l * self.k_unit;
            let (g, _) = stable_mode_pieces(beta, sb, a, u, alpha, e_a);
            acc += h * g;
        }
        self.pref * Complex64::new(0.0, 0.5 * y * u).exp() * acc
    }
}

#[inline]
fn i_times(z: Complex64) -> Complex64 {
    Complex64::new(-z.im, z.re)
}

#[inline]
fn minus_i_times(z: Complex64) -> Complex64 {
    Complex64::new(z.im, -z.re)
}

/// Stable per-mode pieces shared by the closed forms:
/// g = e^(-alpha^2/(4 beta) - i alpha u) (Phi(B) - Phi(A)), plus the two
/// boundary exponentials E_A = e^(-beta u^2), E_B = e^(-beta (u+a)^2 + i a alpha).
#[inline]
fn stable_mode_pieces(
    beta: Complex64,
    sqrt_beta: Complex64,
    a: f64,
    u: f64,
    alpha: f64,
    e_a: Complex64,
) -> (Complex64, Complex64) {
    let big_a = (2.0 * beta * u - Complex64::new(0.0, alpha)) / (2.0 * sqrt_beta);
    let big_b = big_a + a * sqrt_beta;
    let e_b = (-beta * (u + a) * (u + a) + Complex64::new(0.0, a * alpha)).exp();
    let g = if big_a.re >= 0.0 {
        // Re B >= Re A >= 0 always (Re(a sqrt(beta)) > 0)
        e_a * faddeeva_w(i_times(big_a)) - e_b * faddeeva_w(i_times(big_b))
    } else if big_b.re < 0.0 {
        e_b * faddeeva_w(minus_i_times(big_b)) - e_a * faddeeva_w(minus_i_times(big_a))
    } else {
        let c = (-alpha * alpha / (4.0 * beta) - Complex64::new(0.0, alpha * u)).exp();
        2.0 * c - e_b * faddeeva_w(i_times(big_b)) - e_a * faddeeva_w(minus_i_times(big_a))
    };
    (g, e_b)
}

/// Closed-form first-Landau-level wavefunction of a filter bank.
///
/// At l = 1 the oscillator integral collapses to I_1(v) = C v e^(-beta v^2),
/// and the remaining s-integral of (u+s) e^(i alpha s - beta (u+s)^2) splits
/// into boundary exponentials plus alpha times the l = 0 segment integral,
/// so the evaluation reuses the same stable pieces.
#[derive(Debug, Clone)]
pub struct Level1Wavefunction {
    shape: LatticeShape,
    a: f64,
    k_unit: f64,
    beta: Complex64,
    sqrt_beta: Complex64,
    pref: Complex64,
    modes: Vec<(f64, Complex64)>,
}

impl Level1Wavefunction {
    pub fn new(filter: &FilterBank, shape: LatticeShape) -> Self {
        let lat = make_lattice(shape, filter.d(), DecimationPattern::AlongA2);
        let beta = kernel_beta(shape);
        // alpha_c = 1/2 + i gamma = 1/(4 beta)
        let alpha_c = 1.0 / (4.0 * beta);
        let c1 = Complex64::new(0.0, 1.0) * 2.0f64.sqrt() * PI.powf(0.25)
            / (2.0 * alpha_c.powf(1.5));
        Level1Wavefunction {
            shape,
            a: lat.a,
            k_unit: lat.k_unit(),
            beta,
            sqrt_beta: beta.sqrt(),
            pref: c1 / (2.0 * PI * lat.a.sqrt()),
            modes: filter.iter().map(|(l, h)| (l as f64, h)).collect(),
        }
    }

    pub fn eval(&self, r: [f64; 2]) -> Complex64 {
        let (a, beta, sb) = (self.a, self.beta, self.sqrt_beta);
        let u = kernel_u(self.shape, r);
        let y = r[1];
        let e_a = (-beta * u * u).exp();
        let g_weight = PI.sqrt() / (2.0 * sb);
        let mut acc = Complex64::new(0.0, 0.0);
        for &(l, h) in &self.modes {
            let alpha = y + l * self.k_unit;
            let (g, e_b) = stable_mode_pieces(beta, sb, a, u, alpha, e_a);
            let term = (e_a - e_b + Complex64::new(0.0, alpha) * g_weight * g) / (2.0 * beta);
            acc += h * term;
        }
        self.pref * Complex64::new(0.0, 0.5 * y * u).exp() * acc
    }
}

/// Large-|r| asymptotic form of [`ClosedFormWavefunction`]: the Gaussian
/// envelope times simple-pole terms, one per filter tap, plus the
/// lattice-shifted correction block. Valid once the erf arguments are large;
/// on the slow line u = 0 it exhibits the 1/|y| decay.
#[derive(Debug, Clone)]
pub struct AsymptoticWavefunction {
    shape: LatticeShape,
    a: f64,
    k_unit: f64,
    beta: Complex64,
    pref: Complex64,
    modes: Vec<(f64, Complex64)>,
}

impl AsymptoticWavefunction {
    pub fn new(filter: &FilterBank, shape: LatticeShape) -> Self {
        let lat = make_lattice(shape, filter.d(), DecimationPattern::AlongA2);
        AsymptoticWavefunction {
            shape,
            a: lat.a,
            k_unit: lat.k_unit(),
            beta: kernel_beta(shape),
            pref: kernel_prefactor(shape) / lat.a.sqrt(),
            modes: filter.iter().map(|(l, h)| (l as f64, h)).collect(),
        }
    }

    pub fn eval(&self, r: [f64; 2]) -> Complex64 {
        let (a, beta) = (self.a, self.beta);
        let u = kernel_u(self.shape, r);
        let y = r[1];
        let two_beta_u = 2.0 * beta * u;
        // e^(-beta a^2 - a (2 beta u - i y)); common to every tap because the
        // tap offsets contribute integer multiples of 2 pi
        let corr = (-beta * a * a - a * (two_beta_u - Complex64::new(0.0, y))).exp();
        let mut acc = Complex64::new(0.0, 0.0);
        for &(l, h) in &self.modes {
            let denom = two_beta_u - Complex64::new(0.0, y + l * self.k_unit);
            acc += h * (1.0 / denom - corr / (denom + 2.0 * a * beta));
        }
        self.pref * (Complex64::new(0.0, 0.5 * y * u) - beta * u * u).exp() * acc
    }
}

/// psi_3 of the Haar 3-filter on the triangular lattice.
pub fn haar3_closed_form(r: [f64; 2]) -> Complex64 {
    use std::sync::OnceLock;
    static PSI: OnceLock<ClosedFormWavefunction> = OnceLock::new();
    PSI.get_or_init(|| {
        let f = crate::filters::builtin("haar3").unwrap();
        ClosedFormWavefunction::new(&f, LatticeShape::Triangular)
    })
    .eval(r)
}

/// Asymptotic companion of [`haar3_closed_form`].
pub fn haar3_asymptotic(r: [f64; 2]) -> Complex64 {
    use std::sync::OnceLock;
    static PSI: OnceLock<AsymptoticWavefunction> = OnceLock::new();
    PSI.get_or_init(|| {
        let f = crate::filters::builtin("haar3").unwrap();
        AsymptoticWavefunction::new(&f, LatticeShape::Triangular)
    })
    .eval(r)
}

/// The Haar 2-filter wavefunction on the square lattice (a^2 = 2 pi).
pub fn haar2_square_closed_form(r: [f64; 2]) -> Complex64 {
    use std::sync::OnceLock;
    static PSI: OnceLock<ClosedFormWavefunction> = OnceLock::new();
    PSI.get_or_init(|| {
        let f = crate::filters::builtin("haar2").unwrap();
        ClosedFormWavefunction::new(&f, LatticeShape::Square)
    })
    .eval(r)
}

/// Asymptotic companion of [`haar2_square_closed_form`].
pub fn haar2_square_asymptotic(r: [f64; 2]) -> Complex64 {
    use std::sync::OnceLock;
    static PSI: OnceLock<AsymptoticWavefunction> = OnceLock::new();
    PSI.get_or_init(|| {
        let f = crate::filters::builtin("haar2").unwrap();
        AsymptoticWavefunction::new(&f, LatticeShape::Square)
    })
    .eval(r)
}

/// Unit vector along the slow-decay line of the level-0 wavefunctions
/// (x = y/sqrt(3) on the triangular lattice, the y axis on the square one).
pub fn slow_direction(shape: LatticeShape) -> [f64; 2] {
    match shape {
        LatticeShape::Triangular => [0.5, 3.0f64.sqrt() / 2.0],
        LatticeShape::Square => [0.0, 1.0],
    }
}

/// Tensor Gauss-Legendre rule over a rotated rectangle ("strip"), sized so
/// the slow direction can be covered much farther than the Gaussian one.
#[derive(Debug, Clone, Copy)]
pub struct StripRule {
    /// Unit vector along the strip.
    pub dir: [f64; 2],
    pub half_length: f64,
    pub half_width: f64,
    pub panels_per_unit_length: f64,
    pub panels_per_unit_width: f64,
    pub order: usize,
}

impl StripRule {
    /// A strip along the shape's slow line, defaults tuned for |psi|^2-type
    /// integrands (structure scale ~ the lattice constant).
    pub fn for_shape(shape: LatticeShape, half_length: f64, half_width: f64) -> Self {
        StripRule {
            dir: slow_direction(shape),
            half_length,
            half_width,
            panels_per_unit_length: 2.0,
            panels_per_unit_width: 2.0,
            order: 12,
        }
    }

    pub fn integrate_c(
        &self,
        center: [f64; 2],
        f: &dyn Fn([f64; 2]) -> Complex64,
    ) -> Complex64 {
        let rule = gauss_legendre(self.order);
        let perp = [self.dir[1], -self.dir[0]];
        let np = ((2.0 * self.half_width * self.panels_per_unit_width).ceil() as usize).max(1);
        let nl = ((2.0 * self.half_length * self.panels_per_unit_length).ceil() as usize).max(1);
        let wstep = 2.0 * self.half_width / np as f64;
        let lstep = 2.0 * self.half_length / nl as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..np {
            let w0 = -self.half_width + i as f64 * wstep;
            for (xn, xw) in rule.nodes.iter().zip(&rule.weights) {
                let w = w0 + wstep * 0.5 * (xn + 1.0);
                let mut inner = Complex64::new(0.0, 0.0);
                for j in 0..nl {
                    let l0 = -self.half_length + j as f64 * lstep;
                    for (yn, yw) in rule.nodes.iter().zip(&rule.weights) {
                        let l = l0 + lstep * 0.5 * (yn + 1.0);
                        let p = [
                            center[0] + w * perp[0] + l * self.dir[0],
                            center[1] + w * perp[1] + l * self.dir[1],
                        ];
                        inner += *yw * f(p);
                    }
                }
                acc += *xw * inner;
            }
        }
        acc * (wstep / 2.0) * (lstep / 2.0)
    }

    pub fn l2_norm(&self, center: [f64; 2], f: &dyn Fn([f64; 2]) -> Complex64) -> f64 {
        self.integrate_c(center, &|r| Complex64::new(f(r).norm_sqr(), 0.0))
            .re
            .sqrt()
    }

    /// <f, g> = ∫ conj(f) g over the strip.
    pub fn overlap(
        &self,
        center: [f64; 2],
        f: &dyn Fn([f64; 2]) -> Complex64,
        g: &dyn Fn([f64; 2]) -> Complex64,
    ) -> Complex64 {
        self.integrate_c(center, &|r| f(r).conj() * g(r))
    }
}

/// A wavefunction synthesized through the level-l kernel with the
/// oscillator integral cached on a grid; used where many evaluations are
/// needed (overlap matrices at l >= 1).
pub struct LevelWavefunction {
    shape: LatticeShape,
    h: GeneratorFunction,
    s_nodes: Vec<(f64, f64)>,
    v_lo: f64,
    v_step: f64,
    i_table: Vec<Complex64>,
}

impl LevelWavefunction {
    /// `u_extent` bounds |u| over the evaluation region and `max_abs_y` the
    /// |y| values that will be requested; both size the quadratures.
    pub fn new(
        shape: LatticeShape,
        level: u32,
        h: &GeneratorFunction,
        u_extent: f64,
        max_abs_y: f64,
    ) -> Result<Self> {
        if level > MAX_LEVEL {
            return Err(Error::UnsupportedLevel(level));
        }
        let (lo, hi) = h.support();
        // fixed s-rule resolving e^(iys) at the largest requested |y|
        let order = 16;
        let freq = max_abs_y + 8.0 * 2.0 * PI / h.spacing();
        let panels = panels_for_frequency(freq, lo, hi, order);
        let rule = gauss_legendre(order);
        let step = (hi - lo) / panels as f64;
        let mut s_nodes = Vec::with_capacity(panels * order);
        for p in 0..panels {
            let c = lo + (p as f64 + 0.5) * step;
            for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                s_nodes.push((c + 0.5 * step * x, w * 0.5 * step));
            }
        }
        // I_l table over the reachable v = u + s range
        let v_lo = -u_extent + lo - 0.5;
        let v_hi = u_extent + hi + 0.5;
        let v_step = 0.01;
        let n = ((v_hi - v_lo) / v_step).ceil() as usize + 4;
        let mut i_table = Vec::with_capacity(n);
        for i in 0..n {
            let v = v_lo + i as f64 * v_step;
            i_table.push(i_level(shape, level, v));
        }
        Ok(LevelWavefunction {
            shape,
            h: h.clone(),
            s_nodes,
            v_lo,
            v_step,
            i_table,
        })
    }

    fn i_interp(&self, v: f64) -> Complex64 {
        let t = (v - self.v_lo) / self.v_step;
        let i = (t.floor() as usize).clamp(1, self.i_table.len() - 3);
        let x = t - i as f64;
        // Catmull-Rom through the four surrounding samples
        let pm1 = self.i_table[i - 1];
        let p0 = self.i_table[i];
        let p1 = self.i_table[i + 1];
        let p2 = self.i_table[i + 2];
        let a = (p1 - pm1) * 0.5;
        let b = pm1 - p0 * 2.5 + p1 * 2.0 - p2 * 0.5;
        let c = (p2 - pm1) * 0.5 + (p0 - p1) * 1.5;
        p0 + a * x + b * x * x + c * x * x * x
    }

    pub fn eval(&self, r: [f64; 2]) -> Complex64 {
        let u = kernel_u(self.shape, r);
        let y = r[1];
        let mut acc = Complex64::new(0.0, 0.0);
        for &(s, w) in &self.s_nodes {
            let hv = self.h.eval(s);
            if hv == Complex64::new(0.0, 0.0) {
                continue;
            }
            let phase = Complex64::new(0.0, y * s).exp();
            acc += w * hv * phase * self.i_interp(u + s);
        }
        acc * Complex64::new(0.0, 0.5 * y * u).exp() / (2.0 * PI)
    }
}

/// A complex field sampled on a rectangular grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WaveField {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Row-major over (x, y): values[ix * ys.len() + iy].
    pub values: Vec<Complex64>,
    pub source: String,
    /// Riemann estimate of the squared L2 norm over the sampled window.
    pub norm_sq_estimate: f64,
}

impl WaveField {
    pub fn sample(
        f: &dyn Fn([f64; 2]) -> Complex64,
        bounds: [f64; 4],
        step: f64,
        source: impl Into<String>,
    ) -> WaveField {
        let [x0, x1, y0, y1] = bounds;
        assert!(x1 > x0 && y1 > y0 && step > 0.0);
        let nx = ((x1 - x0) / step).round() as usize + 1;
        let ny = ((y1 - y0) / step).round() as usize + 1;
        let xs: Vec<f64> = (0..nx).map(|i| x0 + i as f64 * step).collect();
        let ys: Vec<f64> = (0..ny).map(|j| y0 + j as f64 * step).collect();
        let mut values = Vec::with_capacity(nx * ny);
        let mut norm = 0.0;
        for &x in &xs {
            for &y in &ys {
                let v = f([x, y]);
                norm += v.norm_sqr();
                values.push(v);
            }
        }
        WaveField {
            xs,
            ys,
            values,
            source: source.into(),
            norm_sq_estimate: norm * step * step,
        }
    }

    pub fn get(&self, ix: usize, iy: usize) -> Complex64 {
        self.values[ix * self.ys.len() + iy]
    }
}
