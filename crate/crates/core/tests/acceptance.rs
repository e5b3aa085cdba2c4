//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with the measured figure (run with `--nocapture` to see them).
//!
//! The full-scale Coulomb run is `#[ignore]`d by default; invoke it with
//! `cargo test -p lll-mra --test acceptance -- --ignored c11_full`.

use lll_mra::coulomb::{
    delta_e, direct_integral, triangular_madelung, wigner_coefficient, wigner_energy, BoxSpec,
    DeltaEOptions, MonteCarloConfig, MonteCarloTemplate, Region, Sampler,
};
use lll_mra::filters::{builtin, FilterBank};
use lll_mra::generator::{coefficients_from_function, onc_matrix, t_d_eval, GeneratorFunction};
use lll_mra::landau::{
    haar2_square_closed_form, haar3_asymptotic, haar3_closed_form, kernel_eval_level0,
    kernel_level, magnetic_translate, synthesize, ClosedFormWavefunction, KernelSpec,
    Level1Wavefunction, StripRule,
};
use lll_mra::lattice::{make_lattice, DecimationPattern, LatticeShape, LatticeSpec, SiteIndex};
use lll_mra::zak::{inverse_zak, j_d_flatness, t_d_zak};
use num_complex::Complex64;

fn tri(d: u32) -> LatticeSpec {
    make_lattice(LatticeShape::Triangular, d, DecimationPattern::AlongA2)
}

fn sq(d: u32) -> LatticeSpec {
    make_lattice(LatticeShape::Square, d, DecimationPattern::AlongA2)
}

#[test]
fn c01_filter_suite() {
    let mut worst = 0.0f64;
    for name in ["haar2", "haar3"] {
        worst = worst.max(builtin(name).unwrap().validate(1e-14).max_residual);
    }
    for d in 2..=16u32 {
        let rep = builtin(&format!("haar{d}")).unwrap().validate(1e-14);
        assert!(rep.pass, "haar{d} residual {}", rep.max_residual);
        worst = worst.max(rep.max_residual);
    }
    assert!(worst < 1e-14);

    let bad = FilterBank::from_real(2, 0, &[1.0, 1.0]).unwrap();
    let rep = bad.validate(1e-12);
    assert!(!rep.pass);
    let r0 = rep.residual_at(0).unwrap();
    assert!((r0.re - 1.0).abs() < 1e-15 && r0.im == 0.0);
    println!("criterion 01 PASS: haar family max residual {worst:.2e}; invalid filter r_0 = 1");
}

#[test]
fn c02_onc_matrix_s_space() {
    let lat = tri(3);
    let f = builtin("haar3").unwrap();
    let g = GeneratorFunction::from_filter(&f, &lat);
    let mat = onc_matrix(&g, 3, 3, 3, &lat).unwrap();
    let dev = mat.max_identity_deviation();
    assert!(dev < 1e-8, "max identity deviation {dev}");
    // n = 0 row against the discrete autocorrelation
    let mut row_dev = 0.0f64;
    for m in -3i64..=3 {
        let expected = f.autocorrelation(3 * m);
        row_dev = row_dev.max((mat.get(0, m) - expected).norm());
    }
    assert!(row_dev < 1e-10, "n=0 row deviation {row_dev}");
    println!("criterion 02 PASS: identity deviation {dev:.2e}, autocorrelation row deviation {row_dev:.2e}");
}

#[test]
fn c03_zak_flatness() {
    let lat = tri(3);
    let f = builtin("haar3").unwrap();
    let rep3 = j_d_flatness(&t_d_zak(&f, &lat), 3, 64);
    assert!(rep3.max_deviation < 1e-10, "J_3 deviation {}", rep3.max_deviation);

    let lat = sq(2);
    let f = builtin("haar2").unwrap();
    let rep2 = j_d_flatness(&t_d_zak(&f, &lat), 2, 64);
    assert!(rep2.max_deviation < 1e-10, "J_2 deviation {}", rep2.max_deviation);
    println!(
        "criterion 03 PASS: |J_3 - 3/2pi| <= {:.2e}, |J_2 - 2/2pi| <= {:.2e} on 64x64 grids",
        rep3.max_deviation, rep2.max_deviation
    );
}

#[test]
fn c04_round_trips() {
    // filter -> T_d -> coefficients
    let mut worst_coeff = 0.0f64;
    for (name, lat) in [("haar3", tri(3)), ("haar2", sq(2)), ("db4", sq(2))] {
        let f = builtin(name).unwrap();
        let g = GeneratorFunction::from_filter(&f, &lat);
        let rec = coefficients_from_function(&g, &lat, -4..=7).unwrap();
        worst_coeff = worst_coeff.max(rec.max_error_against(&f));
    }
    assert!(worst_coeff < 1e-10, "coefficient recovery error {worst_coeff}");

    // filter image in the Zak cell -> back to T_d
    let lat = tri(3);
    let f = builtin("haar3").unwrap();
    let z = t_d_zak(&f, &lat);
    let mut worst_inv = 0.0f64;
    for omega in [-1.0, 0.2, 0.9, 1.8, 2.69, 3.1, 5.0] {
        let got = inverse_zak(&z, omega).unwrap();
        worst_inv = worst_inv.max((got - t_d_eval(&f, &lat, omega)).norm());
    }
    assert!(worst_inv < 1e-8, "inverse Zak deviation {worst_inv}");
    println!("criterion 04 PASS: coefficient recovery {worst_coeff:.2e}, inverse-Zak round trip {worst_inv:.2e}");
}

#[test]
fn c05_closed_form_vs_quadrature() {
    let mut worst = 0.0f64;
    let lat = tri(3);
    let f = builtin("haar3").unwrap();
    let g = GeneratorFunction::from_filter(&f, &lat);
    let ks = KernelSpec {
        shape: LatticeShape::Triangular,
        level: 0,
    };
    for i in 0..20 {
        for j in 0..20 {
            let r = [
                -2.0 * lat.a + 4.0 * lat.a * i as f64 / 19.0,
                -2.0 * lat.a + 4.0 * lat.a * j as f64 / 19.0,
            ];
            let dev = (synthesize(ks, &g, r).unwrap() - haar3_closed_form(r)).norm();
            worst = worst.max(dev);
        }
    }
    assert!(worst < 1e-6, "triangular deviation {worst}");

    let lat = sq(2);
    let f = builtin("haar2").unwrap();
    let g = GeneratorFunction::from_filter(&f, &lat);
    let ks = KernelSpec {
        shape: LatticeShape::Square,
        level: 0,
    };
    let mut worst_sq = 0.0f64;
    for i in 0..20 {
        for j in 0..20 {
            let r = [
                -2.0 * lat.a + 4.0 * lat.a * i as f64 / 19.0,
                -2.0 * lat.a + 4.0 * lat.a * j as f64 / 19.0,
            ];
            let dev = (synthesize(ks, &g, r).unwrap() - haar2_square_closed_form(r)).norm();
            worst_sq = worst_sq.max(dev);
        }
    }
    assert!(worst_sq < 1e-6, "square deviation {worst_sq}");
    println!("criterion 05 PASS: 20x20 grid deviations {worst:.2e} (triangular), {worst_sq:.2e} (square)");
}

#[test]
fn c06_norm_canonicity() {
    // ||T_d|| = 1 to machine precision
    let mut worst_td = 0.0f64;
    for (name, lat) in [("haar3", tri(3)), ("haar2", sq(2)), ("db4", sq(2))] {
        let f = builtin(name).unwrap();
        let g = GeneratorFunction::from_filter(&f, &lat);
        worst_td = worst_td.max((g.l2_norm() - 1.0).abs());
    }
    assert!(worst_td < 1e-12, "||T_d|| deviation {worst_td}");

    // ||psi_3|| = 1 within 2e-3 on a window sized from the 1/|y| tail
    // (asymptotic tail mass ~ 0.82/L in the squared norm)
    let rule = StripRule::for_shape(LatticeShape::Triangular, 400.0, 7.0);
    let norm = rule.l2_norm([0.0, 0.0], &|r| haar3_closed_form(r));
    assert!(
        (norm - 1.0).abs() < 2e-3,
        "||psi_3|| = {norm} not within 2e-3"
    );
    println!("criterion 06 PASS: ||psi_3|| = {norm:.6} (|dev| = {:.2e}), ||T_d|| dev {worst_td:.2e}", (norm - 1.0).abs());
}

#[test]
fn c07_position_space_onc() {
    let lat = tri(3);
    let psi = |r: [f64; 2]| haar3_closed_form(r);
    let rule = StripRule {
        dir: lll_mra::landau::slow_direction(LatticeShape::Triangular),
        half_length: 400.0,
        half_width: 9.0,
        panels_per_unit_length: 1.4,
        panels_per_unit_width: 1.6,
        order: 10,
    };
    let mut worst = 0.0f64;
    for (n, m) in [(0i64, 0i64), (1, 0), (-1, 0), (0, 1), (0, -1)] {
        let site = SiteIndex::new(n, 3 * m);
        let translated = magnetic_translate(psi, site, &lat);
        let s = rule.overlap([0.0, 0.0], &psi, &translated);
        let expected = if n == 0 && m == 0 { 1.0 } else { 0.0 };
        let dev = (s - Complex64::new(expected, 0.0)).norm();
        worst = worst.max(dev);
        assert!(dev < 5e-3, "entry ({n},{m}): {s} (deviation {dev})");
    }
    println!("criterion 07 PASS: position-space ONC deviations <= {worst:.2e}");
}

#[test]
fn c08_asymptotics() {
    let a = tri(3).a;
    let sqrt3 = 3.0f64.sqrt();
    // ten points with |r| >= 5a, |x - y/sqrt(3)| >= 1
    let pts = [
        [9.583, 14.0],
        [-7.160, -15.0],
        [13.047, 20.0],
        [18.821, 30.0],
        [5.0 * a, 0.0],
        [-5.0 * a, 1.0],
        [4.0 * a, -3.0 * a],
        [16.0 / sqrt3 + 2.0, 16.0],
        [-20.0 / sqrt3 - 1.5, -20.0],
        [25.0 / sqrt3 + 1.0, 25.0],
    ];
    let mut worst = 0.0f64;
    for r in pts {
        assert!(r[0].hypot(r[1]) >= 5.0 * a - 1e-9);
        assert!((r[0] - r[1] / sqrt3).abs() >= 1.0 - 1e-9);
        let c = haar3_closed_form(r);
        let rel = (haar3_asymptotic(r) - c).norm() / c.norm();
        worst = worst.max(rel);
        assert!(rel < 0.01, "r = {r:?}: rel {rel}");
    }

    // 1/|y| decay along the slow line: sample at lattice-commensurate
    // spacing (multiples of 2 pi / a) so the Bloch beat drops out and the
    // envelope is isolated
    let k_unit = 2.0 * std::f64::consts::PI / a;
    let mut vals = Vec::new();
    for k in 0..9 {
        let y = 10.0 * a + 4.0 * k_unit * k as f64;
        assert!(y <= 40.0 * a);
        vals.push(haar3_closed_form([y / sqrt3, y]).norm() * y);
    }
    let (lo, hi) = vals
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
    let variation = (hi - lo) / lo;
    assert!(variation < 0.10, "envelope variation {variation}: {vals:?}");
    println!("criterion 08 PASS: asymptotic rel error <= {worst:.4}, envelope variation {variation:.4}");
}

#[test]
fn c09_wigner_coefficient() {
    let c = wigner_coefficient();
    assert!((c - (-0.7821)).abs() < 5e-4, "coefficient {c}");
    // splitting invariance
    let e1 = triangular_madelung(1.0, 0.7).unwrap();
    let e2 = triangular_madelung(1.0, 1.6).unwrap();
    assert!((e1 - e2).abs() < 1e-6);
    // scaling
    let e = wigner_energy(1.0 / 3.0).unwrap();
    assert!((e - c / 3.0f64.sqrt()).abs() < 1e-12);
    println!("criterion 09 PASS: E_W/sqrt(nu) = {c:.6} (reference -0.7821 +- 5e-4)");
}

#[test]
fn c10_kernel_levels() {
    // level 0 quadrature route against the closed form at 25 points
    let mut state = 0xfeed5u64;
    let mut rnd = move || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let mut worst0 = 0.0f64;
    for _ in 0..25 {
        let r = [4.0 * rnd() - 2.0, 4.0 * rnd() - 2.0];
        let s = 2.69 * rnd();
        let dev = (kernel_level(LatticeShape::Triangular, 0, r, s).unwrap()
            - kernel_eval_level0(LatticeShape::Triangular, r, s))
        .norm();
        worst0 = worst0.max(dev);
    }
    assert!(worst0 < 1e-8, "level-0 deviation {worst0}");

    // level independence: the l = 1 position-space overlaps reproduce the
    // s-space ONC matrix (identity for haar3). The closed-form l = 1
    // wavefunction is itself validated against kernel_level(1) quadrature
    // in the unit tests.
    let lat = tri(3);
    let f = builtin("haar3").unwrap();
    let lw = Level1Wavefunction::new(&f, LatticeShape::Triangular);
    let psi1 = |r: [f64; 2]| lw.eval(r);
    let rule = StripRule {
        dir: lll_mra::landau::slow_direction(LatticeShape::Triangular),
        half_length: 400.0,
        half_width: 9.0,
        panels_per_unit_length: 1.4,
        panels_per_unit_width: 1.6,
        order: 10,
    };
    let mut worst1 = 0.0f64;
    for (n, m) in [(0i64, 0i64), (1, 0), (0, 1)] {
        let site = SiteIndex::new(n, 3 * m);
        let translated = magnetic_translate(psi1, site, &lat);
        let s = rule.overlap([0.0, 0.0], &psi1, &translated);
        let expected = if n == 0 && m == 0 { 1.0 } else { 0.0 };
        let dev = (s - Complex64::new(expected, 0.0)).norm();
        worst1 = worst1.max(dev);
        assert!(dev < 5e-3, "level-1 entry ({n},{m}): {s}");
    }
    println!("criterion 10 PASS: level-0 kernel dev {worst0:.2e}, level-1 ONC dev {worst1:.2e}");
}

/// CI-scale part of the Coulomb criterion: determinism, error-bar scaling,
/// and the point-charge limit at 20k points.
#[test]
fn c11_coulomb_ci_scale() {
    let lat = tri(3);
    // point-charge limit at width/|R| = 0.02
    let dist = 2.0 * lat.a;
    let sigma = 0.02 * dist;
    let gauss = move |c: [f64; 2]| {
        move |r: [f64; 2]| {
            let dx = r[0] - c[0];
            let dy = r[1] - c[1];
            (-0.5 * (dx * dx + dy * dy) / (sigma * sigma)).exp()
                / (2.0 * std::f64::consts::PI * sigma * sigma)
        }
    };
    let cfg = MonteCarloConfig {
        seed: 2024,
        n_points: 20_000,
        region: Region {
            box1: BoxSpec {
                center: [dist, 0.0],
                half_width: 12.0 * sigma,
            },
            box2: BoxSpec {
                center: [0.0, 0.0],
                half_width: 12.0 * sigma,
            },
        },
        sampler: Sampler::GaussianImportance { sigma },
        batch_size: 500,
        workers: 2,
    };
    let est = direct_integral(&gauss([dist, 0.0]), &gauss([0.0, 0.0]), &cfg, 0).unwrap();
    let product = est.value.value * dist;
    assert!((product - 1.0).abs() < 0.01, "E_d * R = {product}");

    // stderr halves when points quadruple (within 20%)
    let psi = ClosedFormWavefunction::new(&builtin("haar3").unwrap(), LatticeShape::Triangular);
    let template = |n: u64| MonteCarloTemplate {
        seed: 99,
        n_points: n,
        sampler: Sampler::Uniform,
        box_half_width: 6.0 * lat.a,
        batch_size: 500,
        workers: 4,
    };
    let site_cfg = template(20_000).config_for_site(&lat, SiteIndex::new(1, 0));
    let site_cfg4 = template(80_000).config_for_site(&lat, SiteIndex::new(1, 0));
    let e1 = lll_mra::coulomb::direct_energy(&|r| psi.eval(r), SiteIndex::new(1, 0), &lat, &site_cfg).unwrap();
    let e4 = lll_mra::coulomb::direct_energy(&|r| psi.eval(r), SiteIndex::new(1, 0), &lat, &site_cfg4).unwrap();
    let ratio = e1.value.stderr / e4.value.stderr;
    assert!((1.6..=2.4).contains(&ratio), "stderr ratio {ratio}");

    // bit-identical reruns across worker counts on a small delta-E
    let mut reports = Vec::new();
    for workers in [1usize, 2, 8] {
        let mc = MonteCarloTemplate {
            seed: 7,
            n_points: 4_000,
            sampler: Sampler::Uniform,
            box_half_width: 4.0 * lat.a,
            batch_size: 256,
            workers,
        };
        let rep = delta_e(
            &|r| psi.eval(r),
            &lat,
            1.1 * lat.a,
            &mc,
            DeltaEOptions::default(),
        )
        .unwrap();
        reports.push((rep.delta_e.value, rep.delta_e.stderr));
    }
    assert_eq!(reports[0], reports[1]);
    assert_eq!(reports[0], reports[2]);
    println!(
        "criterion 11 (CI scale) PASS: point-charge E_d*R = {product:.4}, stderr ratio {ratio:.2}, delta-E bit-identical across 1/2/8 workers"
    );
}

/// Full-scale Coulomb band check, the reference setup: 250k points per
/// integral, exchange off, truncation radius 6a, doubling stability.
/// Ignored by default; see the decisions ledger discussion of the band.
#[test]
#[ignore = "full-scale Monte Carlo run (minutes); run explicitly"]
fn c11_full_scale_delta_e_band() {
    let lat = tri(3);
    let psi = ClosedFormWavefunction::new(&builtin("haar3").unwrap(), LatticeShape::Triangular);
    let mc = MonteCarloTemplate {
        seed: 20250809,
        n_points: 250_000,
        sampler: Sampler::Uniform,
        box_half_width: 6.0 * lat.a,
        batch_size: 4096,
        workers: 8,
    };
    let base = delta_e(
        &|r| psi.eval(r),
        &lat,
        6.0 * lat.a,
        &mc,
        DeltaEOptions::default(),
    )
    .unwrap();
    let mut mc2 = mc;
    mc2.n_points = 500_000;
    let doubled = delta_e(
        &|r| psi.eval(r),
        &lat,
        12.0 * lat.a,
        &mc2,
        DeltaEOptions::default(),
    )
    .unwrap();
    let d1 = base.delta_e;
    let d2 = doubled.delta_e;
    println!(
        "full-scale delta E = {:.4} +- {:.4} (radius 6a), {:.4} +- {:.4} (doubled)",
        d1.value, d1.stderr, d2.value, d2.stderr
    );
    let stable = (d1.value - d2.value).abs() <= d1.stderr + d2.stderr;
    assert!(
        stable,
        "doubling moved delta E by {:.4}, combined stderr {:.4}",
        (d1.value - d2.value).abs(),
        d1.stderr + d2.stderr
    );
    assert!(
        (0.25..=0.39).contains(&d1.value),
        "delta E = {:.4} outside [0.25, 0.39]",
        d1.value
    );
    println!("criterion 11 (full scale) PASS: delta E = {:.4} in [0.25, 0.39], doubling-stable", d1.value);
}

#[test]
fn c12_mc_determinism() {
    let lat = tri(3);
    let psi = ClosedFormWavefunction::new(&builtin("haar3").unwrap(), LatticeShape::Triangular);
    let run = |workers: usize| {
        let mc = MonteCarloTemplate {
            seed: 31337,
            n_points: 8_000,
            sampler: Sampler::GaussianImportance { sigma: 2.0 },
            box_half_width: 5.0 * lat.a,
            batch_size: 512,
            workers,
        };
        let rep = delta_e(
            &|r| psi.eval(r),
            &lat,
            2.7 * lat.a,
            &mc,
            DeltaEOptions {
                include_exchange: true,
                renormalize_in_region: false,
            },
        )
        .unwrap();
        serde_json::to_string(&rep).unwrap()
    };
    let r1 = run(1);
    let r2 = run(2);
    let r8 = run(8);
    assert_eq!(r1, r2, "1-worker vs 2-worker reports differ");
    assert_eq!(r1, r8, "1-worker vs 8-worker reports differ");
    println!("criterion 12 PASS: serialized energy reports bit-identical for 1/2/8 workers");
}
