//! Classical Wigner energy and Monte Carlo Coulomb integrals.
//!
//! The classical reference is the Madelung energy per electron of the
//! equilateral triangular point crystal in a neutralizing background at
//! density nu/(2 pi), evaluated by two-dimensional Ewald summation; it
//! scales exactly as E_W(nu) = c sqrt(nu).
//!
//! The quantum correction is the lattice sum
//!
//!     delta E = (1/2) sum_{sites} [ E_d - E_ex - 1/|R| ]
//!
//! over the occupied sublattice, with the direct and exchange two-body
//! integrals estimated by seeded Monte Carlo over a compact region around
//! each pair. Sampling uses counter-based streams: every (site, sample)
//! index owns its random numbers, so estimates are bit-identical for any
//! worker count and any site enumeration order.

use std::f64::consts::PI;

use errorfunctions::RealErrorFunctions;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cerf::{norm_cdf, norm_quantile};
use crate::error::{Error, Result};
use crate::landau::magnetic_translate;
use crate::lattice::{site_distance, site_position, sublattice_sites, LatticeSpec, SiteIndex};
use crate::rng::CounterRng;

/// Axis-aligned sampling box.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BoxSpec {
    pub center: [f64; 2],
    pub half_width: f64,
}

/// Integration region: one box per electron coordinate.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Region {
    pub box1: BoxSpec,
    pub box2: BoxSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Sampler {
    /// Uniform over each box; bounded weights, reliable error bars.
    Uniform,
    /// Isotropic Gaussian of width sigma centered on each box, truncated to
    /// the box by inverse-CDF sampling (fixed draw count per sample, so the
    /// stream stays counter-addressable).
    GaussianImportance { sigma: f64 },
}

impl std::str::FromStr for Sampler {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s == "uniform" {
            Ok(Sampler::Uniform)
        } else if s == "gaussian" {
            Ok(Sampler::GaussianImportance { sigma: 2.0 })
        } else if let Some(rest) = s.strip_prefix("gaussian:") {
            let sigma: f64 = rest
                .parse()
                .map_err(|_| format!("bad sigma in sampler `{s}`"))?;
            Ok(Sampler::GaussianImportance { sigma })
        } else {
            Err(format!(
                "unknown sampler `{s}` (use `uniform`, `gaussian`, or `gaussian:<sigma>`)"
            ))
        }
    }
}

/// Everything that determines one pair integral bit-for-bit.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MonteCarloConfig {
    pub seed: u64,
    pub n_points: u64,
    pub region: Region,
    pub sampler: Sampler,
    /// Samples per reduction batch; estimates are reduced in batch-index
    /// order, independent of which worker computed a batch.
    pub batch_size: u64,
    pub workers: usize,
}

pub const DEFAULT_BATCH_SIZE: u64 = 4096;

impl MonteCarloConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_points == 0 {
            return Err(Error::InvalidMonteCarlo("n_points must be >= 1".into()));
        }
        if !(self.region.box1.half_width > 0.0) || !(self.region.box2.half_width > 0.0) {
            return Err(Error::InvalidMonteCarlo(
                "region boxes must have positive volume".into(),
            ));
        }
        if let Sampler::GaussianImportance { sigma } = self.sampler {
            if !(sigma > 0.0) {
                return Err(Error::InvalidMonteCarlo("sigma must be positive".into()));
            }
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidMonteCarlo("batch_size must be >= 1".into()));
        }
        if self.workers == 0 {
            return Err(Error::InvalidMonteCarlo("workers must be >= 1".into()));
        }
        Ok(())
    }
}

/// A Monte Carlo estimate with its batch-means standard error.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

fn sample_coord(
    rng: &CounterRng,
    index: u64,
    j: u32,
    center: f64,
    half: f64,
    sampler: Sampler,
) -> (f64, f64) {
    let u = rng.uniform(index, j);
    match sampler {
        Sampler::Uniform => (center - half + 2.0 * half * u, 1.0 / (2.0 * half)),
        Sampler::GaussianImportance { sigma } => {
            let lo = norm_cdf(-half / sigma);
            let hi = norm_cdf(half / sigma);
            let mass = hi - lo;
            let t = norm_quantile((lo + mass * u).clamp(1e-300, 1.0 - 2e-16));
            let x = (center + sigma * t).clamp(center - half, center + half);
            let pdf = (-0.5 * t * t).exp() / ((2.0 * PI).sqrt() * sigma * mass);
            (x, pdf)
        }
    }
}

/// Draw (r1, r2) and the two per-box densities.
fn sample_pair(
    rng: &CounterRng,
    index: u64,
    region: &Region,
    sampler: Sampler,
) -> ([f64; 2], [f64; 2], f64, f64) {
    let b1 = region.box1;
    let b2 = region.box2;
    let (x1, px1) = sample_coord(rng, index, 0, b1.center[0], b1.half_width, sampler);
    let (y1, py1) = sample_coord(rng, index, 1, b1.center[1], b1.half_width, sampler);
    let (x2, px2) = sample_coord(rng, index, 2, b2.center[0], b2.half_width, sampler);
    let (y2, py2) = sample_coord(rng, index, 3, b2.center[1], b2.half_width, sampler);
    ([x1, y1], [x2, y2], px1 * py1, px2 * py2)
}

const ACCUM: usize = 6;

#[derive(Debug, Clone, Copy, Default)]
struct MeanAndError {
    mean: f64,
    stderr: f64,
}

/// Batch-reduced Monte Carlo over counter streams. The integrand maps a
/// weighted sample to up to six simultaneous accumulators.
fn mc_run(
    cfg: &MonteCarloConfig,
    stream: u64,
    integrand: &(dyn Fn([f64; 2], [f64; 2], f64, f64) -> [f64; ACCUM] + Sync),
) -> [MeanAndError; ACCUM] {
    let rng = CounterRng::new(cfg.seed, stream);
    let n = cfg.n_points;
    let bs = cfg.batch_size.min(n);
    let n_batches = n.div_ceil(bs) as usize;
    let region = cfg.region;
    let sampler = cfg.sampler;

    let eval_batch = move |b: usize| -> [f64; ACCUM] {
        let lo = b as u64 * bs;
        let hi = (lo + bs).min(n);
        let mut sum = [0.0f64; ACCUM];
        let mut comp = [0.0f64; ACCUM];
        for i in lo..hi {
            let (r1, r2, p1, p2) = sample_pair(&rng, i, &region, sampler);
            let vals = integrand(r1, r2, p1, p2);
            for k in 0..ACCUM {
                let y = vals[k] - comp[k];
                let t = sum[k] + y;
                comp[k] = (t - sum[k]) - y;
                sum[k] = t;
            }
        }
        sum
    };

    let workers = cfg.workers.min(n_batches).max(1);
    let mut batch_sums: Vec<[f64; ACCUM]> = vec![[0.0; ACCUM]; n_batches];
    if workers == 1 {
        for (b, slot) in batch_sums.iter_mut().enumerate() {
            *slot = eval_batch(b);
        }
    } else {
        let results: Vec<Vec<(usize, [f64; ACCUM])>> = std::thread::scope(|scope| {
            (0..workers)
                .map(|w| {
                    let eval_batch = &eval_batch;
                    scope.spawn(move || {
                        let mut out = Vec::new();
                        let mut b = w;
                        while b < n_batches {
                            out.push((b, eval_batch(b)));
                            b += workers;
                        }
                        out
                    })
                })
                .collect::<Vec<_>>()
                .into_iter()
                .map(|h| h.join().unwrap())
                .collect()
        });
        for chunk in results {
            for (b, sum) in chunk {
                batch_sums[b] = sum;
            }
        }
    }

    let mut out = [MeanAndError::default(); ACCUM];
    let n_full = (n / bs) as usize;
    for k in 0..ACCUM {
        let mut total = 0.0;
        for sums in &batch_sums {
            total += sums[k];
        }
        let mean = total / n as f64;
        let stderr = if n_full >= 2 {
            let means: Vec<f64> = batch_sums[..n_full]
                .iter()
                .map(|s| s[k] / bs as f64)
                .collect();
            let m = means.iter().sum::<f64>() / n_full as f64;
            let var =
                means.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n_full - 1) as f64;
            (var / n_full as f64).sqrt()
        } else {
            0.0
        };
        out[k] = MeanAndError { mean, stderr };
    }
    out
}

/// Outcome of one two-body integral with in-region normalization
/// diagnostics of the two densities.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PairIntegral {
    pub value: Estimate,
    /// Imaginary component (meaningful for the exchange integral, where it
    /// must vanish within error).
    pub imag: Estimate,
    pub norm1: f64,
    pub norm2: f64,
}

/// E_d-style integral of two densities: ∫∫ rho1(r1) rho2(r2) / |r1 - r2|.
pub fn direct_integral(
    rho1: &(dyn Fn([f64; 2]) -> f64 + Sync),
    rho2: &(dyn Fn([f64; 2]) -> f64 + Sync),
    cfg: &MonteCarloConfig,
    stream: u64,
) -> Result<PairIntegral> {
    cfg.validate()?;
    let res = mc_run(cfg, stream, &move |r1, r2, p1, p2| {
        let a = rho1(r1);
        let b = rho2(r2);
        let d = (r1[0] - r2[0]).hypot(r1[1] - r2[1]).max(1e-14);
        [a * b / (p1 * p2 * d), 0.0, a / p1, b / p2, 0.0, 0.0]
    });
    Ok(PairIntegral {
        value: Estimate {
            value: res[0].mean,
            stderr: res[0].stderr,
        },
        imag: Estimate {
            value: 0.0,
            stderr: 0.0,
        },
        norm1: res[2].mean,
        norm2: res[3].mean,
    })
}

/// Direct Coulomb integral between psi translated to `site` and psi itself,
/// Monte Carlo over the configured region.
pub fn direct_energy(
    psi: &(dyn Fn([f64; 2]) -> Complex64 + Sync),
    site: SiteIndex,
    lat: &LatticeSpec,
    cfg: &MonteCarloConfig,
) -> Result<PairIntegral> {
    let [bx, by] = site_position(lat, site);
    let rho_t = move |r: [f64; 2]| psi([r[0] - bx, r[1] - by]).norm_sqr();
    let rho_0 = move |r: [f64; 2]| psi(r).norm_sqr();
    direct_integral(&rho_t, &rho_0, cfg, stream_for_site(site))
}

/// Exchange Coulomb integral
/// ∫∫ conj(psi_t(r1)) conj(psi(r2)) psi(r1) psi_t(r2) / |r1 - r2|.
/// The estimator is complex; its imaginary part must vanish within error.
pub fn exchange_energy(
    psi: &(dyn Fn([f64; 2]) -> Complex64 + Sync),
    site: SiteIndex,
    lat: &LatticeSpec,
    cfg: &MonteCarloConfig,
) -> Result<PairIntegral> {
    cfg.validate()?;
    let psi_t = magnetic_translate(|r| psi(r), site, lat);
    let res = mc_run(cfg, stream_for_site(site) ^ EXCHANGE_STREAM_TAG, &move |r1,
                                                                              r2,
                                                                              p1,
                                                                              p2| {
        let t1 = psi_t(r1);
        let t2 = psi_t(r2);
        let o1 = psi(r1);
        let o2 = psi(r2);
        let d = (r1[0] - r2[0]).hypot(r1[1] - r2[1]).max(1e-14);
        let g = t1.conj() * o2.conj() * o1 * t2 / (p1 * p2 * d);
        [g.re, g.im, t1.norm_sqr() / p1, o2.norm_sqr() / p2, 0.0, 0.0]
    });
    Ok(PairIntegral {
        value: Estimate {
            value: res[0].mean,
            stderr: res[0].stderr,
        },
        imag: Estimate {
            value: res[1].mean,
            stderr: res[1].stderr,
        },
        norm1: res[2].mean,
        norm2: res[3].mean,
    })
}

const EXCHANGE_STREAM_TAG: u64 = 0x45584348414e4745; // "EXCHANGE"

/// Stream id owned by a lattice site, stable across runs and radii.
fn stream_for_site(site: SiteIndex) -> u64 {
    (site.n as u64).wrapping_mul(0x9e3779b97f4a7c15)
        ^ (site.m as u64).wrapping_mul(0xc2b2ae3d27d4eb4f)
}

/// Ewald-summed Madelung energy per electron of the classical triangular
/// Wigner crystal with neutralizing background, at filling nu. `eta_scale`
/// rescales the splitting parameter; the result is invariant under it,
/// which doubles as the convergence check.
pub fn triangular_madelung(nu: f64, eta_scale: f64) -> Result<f64> {
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(Error::InvalidFilling(nu));
    }
    if !(0.05..=20.0).contains(&eta_scale) {
        return Err(Error::EwaldNonConvergence(format!(
            "splitting scale {eta_scale} outside [0.05, 20]"
        )));
    }
    let cell_area = 2.0 * PI / nu;
    let aw = (2.0 * cell_area / 3.0f64.sqrt()).sqrt();
    let a1 = [aw, 0.0];
    let a2 = [aw / 2.0, aw * 3.0f64.sqrt() / 2.0];
    let det = a1[0] * a2[1] - a1[1] * a2[0];
    let b1 = [2.0 * PI * a2[1] / det, -2.0 * PI * a2[0] / det];
    let b2 = [-2.0 * PI * a1[1] / det, 2.0 * PI * a1[0] / det];
    let eta = eta_scale * PI.sqrt() / aw;

    // real-space shells until erfc is negligible
    let r_cut = 8.0 / eta;
    let n_max = (r_cut / aw).ceil() as i64 + 2;
    let mut energy = 0.0;
    for i in -n_max..=n_max {
        for j in -n_max..=n_max {
            if i == 0 && j == 0 {
                continue;
            }
            let x = i as f64 * a1[0] + j as f64 * a2[0];
            let y = i as f64 * a1[1] + j as f64 * a2[1];
            let r = x.hypot(y);
            energy += 0.5 * RealErrorFunctions::erfc(eta * r) / r;
        }
    }
    // reciprocal shells
    let k_cut = 16.0 * eta;
    let b_len = (b1[0].hypot(b1[1])).min(b2[0].hypot(b2[1]));
    let m_max = (k_cut / b_len).ceil() as i64 + 2;
    for i in -m_max..=m_max {
        for j in -m_max..=m_max {
            if i == 0 && j == 0 {
                continue;
            }
            let kx = i as f64 * b1[0] + j as f64 * b2[0];
            let ky = i as f64 * b1[1] + j as f64 * b2[1];
            let k = kx.hypot(ky);
            energy += (PI / cell_area) * RealErrorFunctions::erfc(k / (2.0 * eta)) / k;
        }
    }
    // self and background terms
    energy += -eta / PI.sqrt() - PI.sqrt() / (cell_area * eta);

    // convergence guard: the outermost real shell must be negligible
    let tail = RealErrorFunctions::erfc(eta * n_max as f64 * aw) / (n_max as f64 * aw);
    if tail > 1e-12 {
        return Err(Error::EwaldNonConvergence(format!(
            "real-space tail {tail:e} above 1e-12"
        )));
    }
    Ok(energy)
}

/// The coefficient c in E_W = c sqrt(nu).
pub fn wigner_coefficient() -> f64 {
    use std::sync::OnceLock;
    static C: OnceLock<f64> = OnceLock::new();
    *C.get_or_init(|| triangular_madelung(1.0, 1.0).expect("default Ewald converges"))
}

/// Classical Wigner-crystal energy per electron at filling nu.
pub fn wigner_energy(nu: f64) -> Result<f64> {
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(Error::InvalidFilling(nu));
    }
    Ok(wigner_coefficient() * nu.sqrt())
}

/// Per-pair knobs of the delta-E lattice sum that are not part of the MC
/// engine configuration proper.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DeltaEOptions {
    /// Include the exchange integrals (off reproduces the reference setup,
    /// where they are dropped as orders of magnitude smaller).
    pub include_exchange: bool,
    /// Divide each pair integral by the product of in-region norms. Off by
    /// default: the faithful reading only checks normalization and warns.
    pub renormalize_in_region: bool,
}

impl Default for DeltaEOptions {
    fn default() -> Self {
        DeltaEOptions {
            include_exchange: false,
            renormalize_in_region: false,
        }
    }
}

/// MC parameters shared by every pair; the per-pair region is derived from
/// the site position.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MonteCarloTemplate {
    pub seed: u64,
    pub n_points: u64,
    pub sampler: Sampler,
    /// Half-width of the box placed around each wavefunction center.
    pub box_half_width: f64,
    pub batch_size: u64,
    pub workers: usize,
}

impl MonteCarloTemplate {
    pub fn config_for_site(&self, lat: &LatticeSpec, site: SiteIndex) -> MonteCarloConfig {
        MonteCarloConfig {
            seed: self.seed,
            n_points: self.n_points,
            region: Region {
                box1: BoxSpec {
                    center: site_position(lat, site),
                    half_width: self.box_half_width,
                },
                box2: BoxSpec {
                    center: [0.0, 0.0],
                    half_width: self.box_half_width,
                },
            },
            sampler: self.sampler,
            batch_size: self.batch_size,
            workers: self.workers,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ExchangeReport {
    pub real: Estimate,
    pub imag: Estimate,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairReport {
    pub site: SiteIndex,
    pub position: [f64; 2],
    pub distance: f64,
    pub direct: Estimate,
    pub exchange: Option<ExchangeReport>,
    /// Point-charge term 1/|R| subtracted in the lattice sum.
    pub classical: f64,
    pub norm1: f64,
    pub norm2: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub n_points: u64,
    pub sampler: Sampler,
    pub box_half_width: f64,
    pub batch_size: u64,
    pub workers: usize,
    pub truncation_radius: f64,
    pub lattice: LatticeSpec,
    pub options: DeltaEOptions,
    pub min_region_norm: f64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnergyReport {
    /// Classical Wigner energy at the lattice filling.
    pub e_w: f64,
    /// Kinetic constant hbar*omega/2 in the dimensionless units.
    pub kinetic: f64,
    pub pairs: Vec<PairReport>,
    pub delta_e: Estimate,
    /// kinetic + e_w + delta_e.
    pub total: f64,
    pub provenance: Provenance,
}

/// The quantum correction delta E over the occupied sublattice within
/// `truncation_radius`, plus the assembled total energy per electron.
pub fn delta_e(
    psi: &(dyn Fn([f64; 2]) -> Complex64 + Sync),
    lat: &LatticeSpec,
    truncation_radius: f64,
    mc: &MonteCarloTemplate,
    options: DeltaEOptions,
) -> Result<EnergyReport> {
    let sites = sublattice_sites(lat, truncation_radius);
    let mut pairs = Vec::with_capacity(sites.len());
    let mut sum = 0.0;
    let mut var = 0.0;
    let mut min_norm = f64::INFINITY;
    let mut warnings = Vec::new();
    for site in sites {
        let cfg = mc.config_for_site(lat, site);
        let dist = site_distance(lat, site);
        let mut direct = direct_energy(psi, site, lat, &cfg)?;
        let mut exchange = if options.include_exchange {
            Some(exchange_energy(psi, site, lat, &cfg)?)
        } else {
            None
        };
        if options.renormalize_in_region {
            let scale = 1.0 / (direct.norm1 * direct.norm2);
            direct.value.value *= scale;
            direct.value.stderr *= scale;
            if let Some(ex) = exchange.as_mut() {
                let s = 1.0 / (ex.norm1 * ex.norm2);
                ex.value.value *= s;
                ex.value.stderr *= s;
                ex.imag.value *= s;
                ex.imag.stderr *= s;
            }
        }
        min_norm = min_norm.min(direct.norm1).min(direct.norm2);
        let ex_value = exchange.map(|e| e.value.value).unwrap_or(0.0);
        let ex_var = exchange
            .map(|e| e.value.stderr * e.value.stderr)
            .unwrap_or(0.0);
        sum += 0.5 * (direct.value.value - ex_value - 1.0 / dist);
        var += 0.25 * (direct.value.stderr * direct.value.stderr + ex_var);
        pairs.push(PairReport {
            site,
            position: site_position(lat, site),
            distance: dist,
            direct: direct.value,
            exchange: exchange.map(|e| ExchangeReport {
                real: e.value,
                imag: e.imag,
            }),
            classical: 1.0 / dist,
            norm1: direct.norm1,
            norm2: direct.norm2,
        });
    }
    if min_norm < 0.99 {
        warnings.push(format!(
            "region too small: in-region normalization {min_norm:.4} < 0.99"
        ));
    }
    let e_w = wigner_energy(lat.filling())?;
    let delta = Estimate {
        value: sum,
        stderr: var.sqrt(),
    };
    let kinetic = 0.5;
    Ok(EnergyReport {
        e_w,
        kinetic,
        total: kinetic + e_w + delta.value,
        delta_e: delta,
        pairs,
        provenance: Provenance {
            seed: mc.seed,
            n_points: mc.n_points,
            sampler: mc.sampler,
            box_half_width: mc.box_half_width,
            batch_size: mc.batch_size,
            workers: mc.workers,
            truncation_radius,
            lattice: *lat,
            options,
            min_region_norm: min_norm,
            warnings,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{make_lattice, DecimationPattern, LatticeShape};
    use approx::assert_relative_eq;

    fn unit_gaussian_density(center: [f64; 2], sigma: f64) -> impl Fn([f64; 2]) -> f64 {
        move |r: [f64; 2]| {
            let dx = r[0] - center[0];
            let dy = r[1] - center[1];
            (-0.5 * (dx * dx + dy * dy) / (sigma * sigma)).exp() / (2.0 * PI * sigma * sigma)
        }
    }

    #[test]
    fn wigner_coefficient_matches_reference() {
        // classical triangular Wigner crystal: -0.7821 sqrt(nu)
        let c = wigner_coefficient();
        assert!((c - (-0.7821)).abs() < 5e-4, "c = {c}");
        assert_relative_eq!(c, -0.782133, epsilon = 2e-6);
        // exact sqrt(nu) scaling
        let e3 = wigner_energy(1.0 / 3.0).unwrap();
        assert_relative_eq!(e3, c / 3.0f64.sqrt(), max_relative = 1e-12);
        assert!((e3 - (-0.45155)).abs() < 5e-4);
    }

    #[test]
    fn ewald_is_splitting_invariant() {
        let e1 = triangular_madelung(1.0, 1.0).unwrap();
        let e2 = triangular_madelung(1.0, 1.7).unwrap();
        let e3 = triangular_madelung(0.37, 0.8).unwrap();
        let e4 = triangular_madelung(0.37, 1.5).unwrap();
        assert!((e1 - e2).abs() < 1e-6, "{e1} vs {e2}");
        assert!((e3 - e4).abs() < 1e-6);
    }

    #[test]
    fn ewald_rejects_bad_input() {
        assert!(triangular_madelung(0.0, 1.0).is_err());
        assert!(triangular_madelung(1.2, 1.0).is_err());
        assert!(triangular_madelung(1.0, 100.0).is_err());
        assert!(wigner_energy(-0.1).is_err());
    }

    #[test]
    fn point_charge_limit() {
        // two sharp normalized Gaussians at distance R: E_d -> 1/R
        let lat = make_lattice(LatticeShape::Triangular, 3, DecimationPattern::AlongA2);
        let dist = 2.0 * lat.a;
        let sigma = 0.02 * dist; // width/|R| = 0.02
        let rho1 = unit_gaussian_density([dist, 0.0], sigma);
        let rho2 = unit_gaussian_density([0.0, 0.0], sigma);
        let cfg = MonteCarloConfig {
            seed: 11,
            n_points: 40_000,
            region: Region {
                box1: BoxSpec {
                    center: [dist, 0.0],
                    half_width: 10.0 * sigma,
                },
                box2: BoxSpec {
                    center: [0.0, 0.0],
                    half_width: 10.0 * sigma,
                },
            },
            sampler: Sampler::GaussianImportance { sigma },
            batch_size: 500,
            workers: 1,
        };
        let est = direct_integral(&rho1, &rho2, &cfg, 0).unwrap();
        let product = est.value.value * dist;
        assert!(
            (product - 1.0).abs() < 0.01,
            "E_d * R = {product}, stderr {}",
            est.value.stderr * dist
        );
        // in-region norms of the truncated Gaussians are 1 up to 1e-6
        assert!((est.norm1 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn stderr_scales_with_sample_count() {
        let rho = unit_gaussian_density([0.0, 0.0], 1.0);
        let rho_far = unit_gaussian_density([6.0, 0.0], 1.0);
        let region = Region {
            box1: BoxSpec {
                center: [6.0, 0.0],
                half_width: 5.0,
            },
            box2: BoxSpec {
                center: [0.0, 0.0],
                half_width: 5.0,
            },
        };
        let base = MonteCarloConfig {
            seed: 5,
            n_points: 20_000,
            region,
            sampler: Sampler::Uniform,
            batch_size: 500,
            workers: 1,
        };
        let mut big = base;
        big.n_points = 80_000;
        let e1 = direct_integral(&rho_far, &rho, &base, 3).unwrap();
        let e4 = direct_integral(&rho_far, &rho, &big, 3).unwrap();
        let ratio = e1.value.stderr / e4.value.stderr;
        assert!(
            (ratio - 2.0).abs() < 0.4,
            "stderr ratio {ratio} (expected ~2)"
        );
        // and the two estimates agree within combined error
        let diff = (e1.value.value - e4.value.value).abs();
        assert!(diff < 4.0 * (e1.value.stderr + e4.value.stderr));
    }

    #[test]
    fn estimates_are_bit_identical_across_workers() {
        let rho = unit_gaussian_density([0.0, 0.0], 1.2);
        let rho_t = unit_gaussian_density([4.0, 0.0], 1.2);
        let region = Region {
            box1: BoxSpec {
                center: [4.0, 0.0],
                half_width: 6.0,
            },
            box2: BoxSpec {
                center: [0.0, 0.0],
                half_width: 6.0,
            },
        };
        let mut results = Vec::new();
        for workers in [1usize, 2, 8] {
            let cfg = MonteCarloConfig {
                seed: 77,
                n_points: 30_000,
                region,
                sampler: Sampler::Uniform,
                batch_size: 1024,
                workers,
            };
            let est = direct_integral(&rho_t, &rho, &cfg, 9).unwrap();
            results.push((est.value.value, est.value.stderr, est.norm1, est.norm2));
        }
        assert_eq!(results[0], results[1]);
        assert_eq!(results[0], results[2]);
    }

    #[test]
    fn gaussian_sampler_matches_uniform_expectation() {
        // same integral, two samplers: estimates agree within error bars
        let rho1 = unit_gaussian_density([3.0, 1.0], 0.8);
        let rho2 = unit_gaussian_density([0.0, 0.0], 0.8);
        let region = Region {
            box1: BoxSpec {
                center: [3.0, 1.0],
                half_width: 4.0,
            },
            box2: BoxSpec {
                center: [0.0, 0.0],
                half_width: 4.0,
            },
        };
        let mk = |sampler| MonteCarloConfig {
            seed: 21,
            n_points: 60_000,
            region,
            sampler,
            batch_size: 1000,
            workers: 2,
        };
        let u = direct_integral(&rho1, &rho2, &mk(Sampler::Uniform), 1).unwrap();
        let g = direct_integral(
            &rho1,
            &rho2,
            &mk(Sampler::GaussianImportance { sigma: 1.2 }),
            1,
        )
        .unwrap();
        let diff = (u.value.value - g.value.value).abs();
        let band = 4.0 * (u.value.stderr + g.value.stderr);
        assert!(diff < band, "uniform {} vs gaussian {}", u.value.value, g.value.value);
        // importance sampling should not be worse here
        assert!(g.value.stderr < u.value.stderr);
    }

    #[test]
    fn config_validation() {
        let region = Region {
            box1: BoxSpec {
                center: [0.0, 0.0],
                half_width: 1.0,
            },
            box2: BoxSpec {
                center: [0.0, 0.0],
                half_width: 1.0,
            },
        };
        let good = MonteCarloConfig {
            seed: 0,
            n_points: 10,
            region,
            sampler: Sampler::Uniform,
            batch_size: 4,
            workers: 1,
        };
        assert!(good.validate().is_ok());
        let mut bad = good;
        bad.n_points = 0;
        assert!(bad.validate().is_err());
        let mut bad = good;
        bad.region.box1.half_width = 0.0;
        assert!(bad.validate().is_err());
        let mut bad = good;
        bad.sampler = Sampler::GaussianImportance { sigma: 0.0 };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn sampler_parsing() {
        assert_eq!("uniform".parse::<Sampler>().unwrap(), Sampler::Uniform);
        assert_eq!(
            "gaussian:1.5".parse::<Sampler>().unwrap(),
            Sampler::GaussianImportance { sigma: 1.5 }
        );
        assert!("nope".parse::<Sampler>().is_err());
    }
}
