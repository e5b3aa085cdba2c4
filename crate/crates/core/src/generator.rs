//! Generator functions on the line.
//!
//! A validated filter bank {h_l} defines the compactly supported
//! trigonometric polynomial
//!
//!     T_d(s) = a^(-1/2) sum_l h_l e^(i l s 2*pi/a),   s in [0, a),
//!
//! whose kernel image is the single-electron wavefunction. This module
//! evaluates T_d, verifies the s-space orthonormality condition
//!
//!     S_{n,dm} = ∫ ds e^(i s d m 2*pi/a) conj(h(s)) h(s - n a) = delta delta
//!
//! and inverts the construction by reading Fourier coefficients back off a
//! generator function.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::Result;
use crate::filters::FilterBank;
use crate::lattice::LatticeSpec;
use crate::quad::{integrate_adaptive_c, integrate_panels, integrate_panels_c, panels_for_frequency};

#[derive(Debug, Clone)]
pub enum GeneratorSource {
    /// Built from a filter bank; carries the largest |index| so quadratures
    /// can bound the frequency content exactly.
    Filter { d: u32, max_abs_index: i64 },
    External,
}

/// A square-integrable function of one real variable with finite support.
/// Functions with unbounded support enter through a caller-chosen truncation
/// window, which downstream results record.
#[derive(Clone)]
pub struct GeneratorFunction {
    eval: Arc<dyn Fn(f64) -> Complex64 + Send + Sync>,
    support: (f64, f64),
    spacing: f64,
    source: GeneratorSource,
}

impl std::fmt::Debug for GeneratorFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GeneratorFunction")
            .field("support", &self.support)
            .field("spacing", &self.spacing)
            .field("source", &self.source)
            .finish()
    }
}

/// Direct evaluation of T_d at one point; exact finite sum, zero outside
/// [0, a).
pub fn t_d_eval(filter: &FilterBank, lat: &LatticeSpec, s: f64) -> Complex64 {
    if !(0.0..lat.a).contains(&s) {
        return Complex64::new(0.0, 0.0);
    }
    let k = lat.k_unit();
    let mut acc = Complex64::new(0.0, 0.0);
    for (l, h) in filter.iter() {
        acc += h * Complex64::new(0.0, l as f64 * s * k).exp();
    }
    acc / lat.a.sqrt()
}

impl GeneratorFunction {
    /// The generator T_d of a filter bank on [0, a).
    pub fn from_filter(filter: &FilterBank, lat: &LatticeSpec) -> Self {
        let f = filter.clone();
        let lat = *lat;
        GeneratorFunction {
            eval: Arc::new(move |s| t_d_eval(&f, &lat, s)),
            support: (0.0, lat.a),
            spacing: lat.a,
            source: GeneratorSource::Filter {
                d: filter.d(),
                max_abs_index: filter.max_abs_index(),
            },
        }
    }

    /// Wrap an arbitrary function with an explicit (truncated) support.
    pub fn external(
        eval: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
        support: (f64, f64),
        spacing: f64,
    ) -> Self {
        assert!(support.1 > support.0, "support must be a nonempty interval");
        GeneratorFunction {
            eval: Arc::new(eval),
            support,
            spacing,
            source: GeneratorSource::External,
        }
    }

    pub fn eval(&self, s: f64) -> Complex64 {
        if s < self.support.0 || s >= self.support.1 {
            Complex64::new(0.0, 0.0)
        } else {
            (self.eval)(s)
        }
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn source(&self) -> &GeneratorSource {
        &self.source
    }

    /// L2 norm over the support.
    pub fn l2_norm(&self) -> f64 {
        let (lo, hi) = self.support;
        let panels = self.panels_for_extra_frequency(0.0, 24);
        integrate_panels(lo, hi, panels, 24, |s| self.eval(s).norm_sqr()).sqrt()
    }

    /// Panel count covering the function's own frequency content plus an
    /// extra modulation frequency.
    fn panels_for_extra_frequency(&self, extra: f64, order: usize) -> usize {
        let own = match self.source {
            GeneratorSource::Filter { max_abs_index, .. } => {
                // conj(h) h products double the bandwidth
                2.0 * max_abs_index as f64 * 2.0 * std::f64::consts::PI / self.spacing
            }
            GeneratorSource::External => 6.0 * 2.0 * std::f64::consts::PI / self.spacing,
        };
        let (lo, hi) = self.support;
        panels_for_frequency(own + extra.abs(), lo, hi, order)
    }
}

/// ∫ ds e^(i s exponent 2*pi/a) conj(h(s)) h(s - n a) over the overlap of
/// the two supports. Disjoint supports short-circuit to an exact zero, which
/// for compact generators is the whole story at n != 0.
pub fn overlap_entry(h: &GeneratorFunction, exponent: i64, n: i64) -> Result<Complex64> {
    let a = h.spacing;
    let (lo, hi) = h.support;
    let shifted = (lo + n as f64 * a, hi + n as f64 * a);
    let olo = lo.max(shifted.0);
    let ohi = hi.min(shifted.1);
    if olo >= ohi {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let omega = exponent as f64 * h.k_unit_local();
    let integrand = |s: f64| {
        Complex64::new(0.0, omega * s).exp() * h.eval(s).conj() * h.eval(s - n as f64 * a)
    };
    match h.source {
        GeneratorSource::Filter { .. } => {
            let order = 24;
            let panels = h.panels_for_extra_frequency(omega, order);
            Ok(integrate_panels_c(olo, ohi, panels, order, integrand))
        }
        GeneratorSource::External => {
            let (value, _) = integrate_adaptive_c(olo, ohi, 1e-10, &integrand)?;
            Ok(value)
        }
    }
}

impl GeneratorFunction {
    fn k_unit_local(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.spacing
    }
}

/// One entry S_{n, dm} of the sublattice orthonormality condition.
pub fn onc_entry(
    h: &GeneratorFunction,
    d: u32,
    n: i64,
    m: i64,
    _lat: &LatticeSpec,
) -> Result<Complex64> {
    overlap_entry(h, d as i64 * m, n)
}

/// Matrix of S_{n, dm} for |n| <= n_max, |m| <= m_max.
#[derive(Debug, Clone)]
pub struct OncMatrix {
    pub n_max: i64,
    pub m_max: i64,
    /// Row-major over n = -n_max..=n_max, m = -m_max..=m_max.
    pub entries: Vec<Complex64>,
}

impl OncMatrix {
    pub fn get(&self, n: i64, m: i64) -> Complex64 {
        let row = (n + self.n_max) as usize;
        let col = (m + self.m_max) as usize;
        self.entries[row * (2 * self.m_max as usize + 1) + col]
    }

    /// Largest |S_{n,dm} - delta_{n0} delta_{m0}| over the block.
    pub fn max_identity_deviation(&self) -> f64 {
        let mut max = 0.0f64;
        for n in -self.n_max..=self.n_max {
            for m in -self.m_max..=self.m_max {
                let mut v = self.get(n, m);
                if n == 0 && m == 0 {
                    v -= Complex64::new(1.0, 0.0);
                }
                max = max.max(v.norm());
            }
        }
        max
    }
}

pub fn onc_matrix(
    h: &GeneratorFunction,
    d: u32,
    n_max: i64,
    m_max: i64,
    lat: &LatticeSpec,
) -> Result<OncMatrix> {
    let mut entries = Vec::with_capacity(((2 * n_max + 1) * (2 * m_max + 1)) as usize);
    for n in -n_max..=n_max {
        for m in -m_max..=m_max {
            entries.push(onc_entry(h, d, n, m, lat)?);
        }
    }
    Ok(OncMatrix {
        n_max,
        m_max,
        entries,
    })
}

/// Fourier coefficients H_n = a^(-1/2) ∫ K(s) e^(-i n s 2*pi/a) ds read off a
/// generator-like function, together with the truncation window actually
/// integrated over.
#[derive(Debug, Clone)]
pub struct RecoveredCoefficients {
    pub coeffs: BTreeMap<i64, Complex64>,
    pub window: (f64, f64),
}

impl RecoveredCoefficients {
    pub fn max_error_against(&self, filter: &FilterBank) -> f64 {
        let mut max = 0.0f64;
        let keys: std::collections::BTreeSet<i64> = self
            .coeffs
            .keys()
            .copied()
            .chain(filter.iter().map(|(n, _)| n))
            .collect();
        for n in keys {
            let got = self.coeffs.get(&n).copied().unwrap_or_default();
            max = max.max((got - filter.coeff(n)).norm());
        }
        max
    }

    /// Package the recovered coefficients as a filter bank for residual
    /// checks against the orthonormality condition.
    pub fn to_filter_bank(&self, d: u32) -> Result<FilterBank> {
        FilterBank::new(d, self.coeffs.iter().map(|(n, h)| (*n, *h)))
    }
}

pub fn coefficients_from_function(
    k: &GeneratorFunction,
    lat: &LatticeSpec,
    n_range: RangeInclusive<i64>,
) -> Result<RecoveredCoefficients> {
    let a = lat.a;
    let unit = lat.k_unit();
    let (lo, hi) = k.support();
    let mut coeffs = BTreeMap::new();
    for n in n_range {
        let omega = -(n as f64) * unit;
        let integrand = |s: f64| Complex64::new(0.0, omega * s).exp() * k.eval(s);
        let value = match k.source() {
            GeneratorSource::Filter { .. } => {
                let order = 24;
                let panels = k.panels_for_extra_frequency(omega, order);
                integrate_panels_c(lo, hi, panels, order, integrand)
            }
            GeneratorSource::External => integrate_adaptive_c(lo, hi, 1e-11, &integrand)?.0,
        };
        coeffs.insert(n, value / a.sqrt());
    }
    Ok(RecoveredCoefficients {
        coeffs,
        window: (lo, hi),
    })
}
