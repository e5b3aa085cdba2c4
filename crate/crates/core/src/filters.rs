//! d-MRA filter banks.
//!
//! A filter bank is a finitely supported set of complex coefficients {h_n}
//! together with an integer dilation d >= 2. The single condition the rest of
//! the crate needs is the orthonormality (autocorrelation) condition
//!
//!     sum_n h_n conj(h_{n+dl}) = delta_{l,0}
//!
//! checked by [`FilterBank::validate`]. The sum rule sum_n h_n = sqrt(d) of a
//! genuine scaling filter is advisory only and reported separately. Passing
//! the autocorrelation condition does not by itself guarantee a full d-MRA
//! for d >= 3; nothing downstream needs more than the condition itself.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dilation plus sparse integer-indexed coefficients; indices not present are
/// zero. Supports of practical filters are small and may include negative
/// indices, so a sorted map beats a dense array here.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    d: u32,
    coeffs: BTreeMap<i64, Complex64>,
}

/// Per-lag residuals of the orthonormality condition.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    /// (lag l, r_l) with r_l = sum_n h_n conj(h_{n+dl}) - delta_{l,0},
    /// for every lag with overlapping support.
    pub residuals: Vec<(i64, Complex64)>,
    pub max_residual: f64,
    pub tol: f64,
    pub pass: bool,
}

impl ValidationReport {
    pub fn residual_at(&self, lag: i64) -> Option<Complex64> {
        self.residuals.iter().find(|(l, _)| *l == lag).map(|(_, r)| *r)
    }
}

/// Default tolerance for [`FilterBank::validated`]; analytic filters pass
/// exactly, numerically recovered ones carry quadrature error below this.
pub const DEFAULT_VALIDATION_TOL: f64 = 1e-12;

impl FilterBank {
    pub fn new(d: u32, coeffs: impl IntoIterator<Item = (i64, Complex64)>) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDilation(d as i64));
        }
        let mut map = BTreeMap::new();
        for (n, h) in coeffs {
            if map.insert(n, h).is_some() {
                return Err(Error::DuplicateIndex(n));
            }
        }
        if map.is_empty() || map.values().all(|h| *h == Complex64::new(0.0, 0.0)) {
            return Err(Error::InvalidFilter(
                "at least one coefficient must be nonzero".into(),
            ));
        }
        Ok(FilterBank { d, coeffs: map })
    }

    pub fn from_real(d: u32, first_index: i64, values: &[f64]) -> Result<Self> {
        Self::new(
            d,
            values
                .iter()
                .enumerate()
                .map(|(i, v)| (first_index + i as i64, Complex64::new(*v, 0.0))),
        )
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn coeff(&self, n: i64) -> Complex64 {
        self.coeffs.get(&n).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs.iter().map(|(n, h)| (*n, *h))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// (min index, max index) of the support.
    pub fn support(&self) -> (i64, i64) {
        let min = *self.coeffs.keys().next().unwrap();
        let max = *self.coeffs.keys().next_back().unwrap();
        (min, max)
    }

    pub fn max_abs_index(&self) -> i64 {
        let (lo, hi) = self.support();
        lo.abs().max(hi.abs())
    }

    /// Discrete autocorrelation sum_n h_n conj(h_{n+lag}).
    pub fn autocorrelation(&self, lag: i64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&n, &h) in &self.coeffs {
            if let Some(&g) = self.coeffs.get(&(n + lag)) {
                acc += h * g.conj();
            }
        }
        acc
    }

    /// Residuals of the orthonormality condition at every lag that has
    /// overlapping support; pass iff max |r_l| <= tol.
    pub fn validate(&self, tol: f64) -> ValidationReport {
        assert!(tol >= 0.0, "tolerance must be nonnegative");
        let (lo, hi) = self.support();
        let max_lag = (hi - lo) / self.d as i64;
        let mut residuals = Vec::new();
        let mut max_residual = 0.0f64;
        for l in -max_lag..=max_lag {
            let mut r = self.autocorrelation(self.d as i64 * l);
            if l == 0 {
                r -= Complex64::new(1.0, 0.0);
            }
            max_residual = max_residual.max(r.norm());
            residuals.push((l, r));
        }
        ValidationReport {
            residuals,
            max_residual,
            tol,
            pass: max_residual <= tol,
        }
    }

    /// Residual |sum_n h_n - sqrt(d)| of the scaling-filter sum rule.
    /// Advisory: the orthonormality machinery downstream never requires it.
    pub fn sum_rule_residual(&self) -> f64 {
        let s: Complex64 = self.coeffs.values().sum();
        (s - Complex64::new((self.d as f64).sqrt(), 0.0)).norm()
    }

    /// Promote to a validated filter or report why not.
    pub fn validated(self, tol: f64) -> Result<ValidatedFilterBank> {
        let report = self.validate(tol);
        if report.pass {
            Ok(ValidatedFilterBank(self))
        } else {
            Err(Error::InvalidFilter(format!(
                "orthonormality condition fails: max residual {:.3e} > tol {:.1e}",
                report.max_residual, tol
            )))
        }
    }
}

impl fmt::Display for FilterBank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d={} ({} coefficients)", self.d, self.coeffs.len())
    }
}

/// A filter bank that passed the orthonormality condition at construction.
#[derive(Debug, Clone)]
pub struct ValidatedFilterBank(FilterBank);

impl std::ops::Deref for ValidatedFilterBank {
    type Target = FilterBank;
    fn deref(&self) -> &FilterBank {
        &self.0
    }
}

impl ValidatedFilterBank {
    pub fn into_inner(self) -> FilterBank {
        self.0
    }
}

/// Daubechies-4 scaling coefficients (standard published values).
const DB4: [f64; 4] = [
    0.4829629131445341,
    0.8365163037378077,
    0.2241438680420134,
    -0.1294095225512603,
];

/// Builtin filters: `haar2`, `haar3`, generic `haar<d>` (h_0..h_{d-1} =
/// 1/sqrt(d)), and `db4`.
pub fn builtin(name: &str) -> Result<ValidatedFilterBank> {
    let bank = if let Some(ds) = name.strip_prefix("haar") {
        let d: u32 = ds
            .parse()
            .map_err(|_| Error::UnknownBuiltin(name.to_string()))?;
        if d < 2 {
            return Err(Error::InvalidDilation(d as i64));
        }
        let h = 1.0 / (d as f64).sqrt();
        FilterBank::from_real(d, 0, &vec![h; d as usize])?
    } else if name == "db4" {
        FilterBank::from_real(2, 0, &DB4)?
    } else {
        return Err(Error::UnknownBuiltin(name.to_string()));
    };
    bank.validated(DEFAULT_VALIDATION_TOL)
}

/// Parse the filter file format: first data line `d=<int>`, then
/// `<index> <re> <im>` per line; `#` starts a comment.
pub fn parse_filter(text: &str) -> Result<FilterBank> {
    let mut d: Option<u32> = None;
    let mut coeffs: Vec<(i64, Complex64)> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let lineno = i + 1;
        if d.is_none() {
            let rest = line
                .strip_prefix("d=")
                .or_else(|| line.strip_prefix("d ="))
                .ok_or_else(|| Error::Parse {
                    line: lineno,
                    msg: "expected `d=<int>` on the first data line".into(),
                })?;
            let val: i64 = rest.trim().parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("cannot parse dilation from `{rest}`"),
            })?;
            if val < 2 {
                return Err(Error::InvalidDilation(val));
            }
            d = Some(val as u32);
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected `<index> <re> <im>`, got `{line}`"),
            });
        }
        let n: i64 = fields[0].parse().map_err(|_| Error::Parse {
            line: lineno,
            msg: format!("bad index `{}`", fields[0]),
        })?;
        let re: f64 = fields[1].parse().map_err(|_| Error::Parse {
            line: lineno,
            msg: format!("bad real part `{}`", fields[1]),
        })?;
        let im: f64 = fields[2].parse().map_err(|_| Error::Parse {
            line: lineno,
            msg: format!("bad imaginary part `{}`", fields[2]),
        })?;
        if !seen.insert(n) {
            return Err(Error::DuplicateIndex(n));
        }
        coeffs.push((n, Complex64::new(re, im)));
    }
    let d = d.ok_or_else(|| Error::Parse {
        line: 0,
        msg: "missing `d=<int>` header".into(),
    })?;
    FilterBank::new(d, coeffs)
}

pub fn load_filter(path: impl AsRef<Path>) -> Result<FilterBank> {
    parse_filter(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Brute-force double-loop autocorrelation over the dense index range;
    /// independent of the map-based implementation.
    fn brute_autocorrelation(f: &FilterBank, lag: i64) -> Complex64 {
        let (lo, hi) = f.support();
        let mut acc = Complex64::new(0.0, 0.0);
        for n in (lo - 1)..=(hi + 1) {
            for m in (lo - 1)..=(hi + 1) {
                if m == n + lag {
                    acc += f.coeff(n) * f.coeff(m).conj();
                }
            }
        }
        acc
    }

    #[test]
    fn haar_filters_pass_exactly() {
        // squaring fl(1/sqrt(d)) picks up at most one ulp at lag zero
        for name in ["haar2", "haar3"] {
            let f = builtin(name).unwrap();
            let report = f.validate(1e-15);
            assert!(report.pass, "{name}: max residual {}", report.max_residual);
            // off-center lags vanish bit-exactly (no overlap survives)
            for (l, r) in &report.residuals {
                if *l != 0 {
                    assert_eq!(*r, Complex64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn haar_d_family_up_to_16() {
        for d in 2..=16u32 {
            let f = builtin(&format!("haar{d}")).unwrap();
            let report = f.validate(1e-14);
            assert!(report.pass, "haar{d}: max residual {}", report.max_residual);
            // l = 0 residual is sum |h|^2 - 1
            let r0 = report.residual_at(0).unwrap();
            assert!(r0.norm() < 1e-14);
        }
    }

    #[test]
    fn db4_passes_and_obeys_sum_rule() {
        let f = builtin("db4").unwrap();
        assert!(f.validate(1e-14).pass);
        assert!(f.sum_rule_residual() < 1e-14);
    }

    #[test]
    fn unnormalized_pair_fails_with_unit_residual() {
        let f = FilterBank::from_real(2, 0, &[1.0, 1.0]).unwrap();
        let report = f.validate(1e-12);
        assert!(!report.pass);
        let r0 = report.residual_at(0).unwrap();
        assert!((r0.re - 1.0).abs() < 1e-15 && r0.im == 0.0);
        assert!((report.max_residual - 1.0).abs() < 1e-15);
        assert!(f.clone().validated(1e-12).is_err());
    }

    #[test]
    fn sum_rule_examples() {
        assert!(builtin("haar3").unwrap().sum_rule_residual() < 1e-15);
        assert!(builtin("haar2").unwrap().sum_rule_residual() < 1e-15);
        let single = FilterBank::from_real(2, 0, &[1.0]).unwrap();
        let expected = std::f64::consts::SQRT_2 - 1.0;
        assert!((single.sum_rule_residual() - expected).abs() < 1e-15);
    }

    #[test]
    fn constructor_rejects_bad_input() {
        assert!(matches!(
            FilterBank::from_real(1, 0, &[1.0]),
            Err(Error::InvalidDilation(1))
        ));
        assert!(matches!(
            FilterBank::new(2, std::iter::empty()),
            Err(Error::InvalidFilter(_))
        ));
        assert!(matches!(
            FilterBank::from_real(2, 0, &[0.0, 0.0]),
            Err(Error::InvalidFilter(_))
        ));
        let dup = FilterBank::new(
            2,
            [(0, Complex64::new(1.0, 0.0)), (0, Complex64::new(0.5, 0.0))],
        );
        assert!(matches!(dup, Err(Error::DuplicateIndex(0))));
    }

    #[test]
    fn parse_round_trip_and_errors() {
        let text = "# Haar-3 filter\nd=3\n0 0.5773502691896258 0\n1 0.5773502691896258 0\n2 0.5773502691896258 0\n";
        let f = parse_filter(text).unwrap();
        assert_eq!(f.d(), 3);
        let h = builtin("haar3").unwrap();
        for n in 0..3 {
            assert!((f.coeff(n) - h.coeff(n)).norm() < 1e-15);
        }
        assert!(f.validate(1e-14).pass);

        assert!(matches!(
            parse_filter("d=3\n0 1 0\n0 1 0\n"),
            Err(Error::DuplicateIndex(0))
        ));
        assert!(matches!(
            parse_filter("d=1\n0 1 0\n"),
            Err(Error::InvalidDilation(1))
        ));
        assert!(matches!(parse_filter("0 1 0\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_filter("d=2\nx y\n"), Err(Error::Parse { .. })));
        assert!(builtin("nosuch").is_err());
    }

    #[test]
    fn validated_norm_is_one() {
        for name in ["haar2", "haar3", "haar7", "db4"] {
            let f = builtin(name).unwrap();
            let norm2: f64 = f.iter().map(|(_, h)| h.norm_sqr()).sum();
            assert!((norm2 - 1.0).abs() < 1e-14, "{name}: {norm2}");
        }
    }

    proptest! {
        /// Residuals must agree exactly with the brute-force double loop.
        #[test]
        fn residuals_match_brute_force(
            d in 2u32..5,
            values in proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..9),
            first in -4i64..4,
        ) {
            prop_assume!(values.iter().any(|(re, im)| *re != 0.0 || *im != 0.0));
            let f = FilterBank::new(
                d,
                values.iter().enumerate().map(|(i, (re, im))| {
                    (first + i as i64, Complex64::new(*re, *im))
                }),
            ).unwrap();
            let report = f.validate(1e300);
            for (l, r) in &report.residuals {
                let mut expected = brute_autocorrelation(&f, d as i64 * l);
                if *l == 0 {
                    expected -= Complex64::new(1.0, 0.0);
                }
                prop_assert_eq!(*r, expected);
            }
        }

        /// Haar-like filters with arbitrary per-tap phases stay orthonormal.
        #[test]
        fn phased_haar_filters_pass(d in 2u32..8, phases in proptest::collection::vec(0.0f64..std::f64::consts::TAU, 8)) {
            let h = 1.0 / (d as f64).sqrt();
            let coeffs = (0..d as usize).map(|i| {
                (i as i64, Complex64::from_polar(h, phases[i % phases.len()]))
            });
            let f = FilterBank::new(d, coeffs).unwrap();
            prop_assert!(f.validate(1e-13).pass);
        }
    }
}
