use num_complex::Complex64;
use qpinem::experiment::*;
use qpinem::fockspace::{coherent_cutoff, make_coherent, PhotonStatistics, PhotonicState};
use qpinem::interaction::{spectrum_approx, Coupling, KRange};

fn coherent(alpha: f64) -> PhotonicState<f64> {
    make_coherent(Complex64::new(alpha, 0.0), coherent_cutoff(alpha * alpha)).unwrap()
}

fn poisson_spectrum(mean: f64, g: f64) -> qpinem::ElectronSpectrum64 {
    spectrum_approx(&PhotonStatistics::poisson(mean, coherent_cutoff(mean)), &Coupling::real(g), KRange::Auto).unwrap()
}

#[test]
fn single_electron_gives_a_unit_peak() {
    let spec = poisson_spectrum(100.0, 0.1);
    let s = sample_spectrum(&spec, 1, 7).unwrap();
    assert_eq!(s.probs().iter().filter(|p| **p == 1.0).count(), 1);
    assert!((s.total() - 1.0).abs() < 1e-15);
}

#[test]
fn sampling_is_deterministic_per_seed() {
    let spec = poisson_spectrum(100.0, 0.1);
    let a = sample_spectrum(&spec, 5000, 42).unwrap();
    let b = sample_spectrum(&spec, 5000, 42).unwrap();
    let c = sample_spectrum(&spec, 5000, 43).unwrap();
    assert_eq!(a.probs(), b.probs());
    assert_ne!(a.probs(), c.probs());
}

#[test]
fn large_samples_converge_in_total_variation() {
    // multinomial: E TV ≤ ½ Σ √(P_k/N) ≈ 2e-3 here
    let spec = poisson_spectrum(900.0, 0.1);
    let s = sample_spectrum(&spec, 1_000_000, 1).unwrap();
    let tv: f64 = 0.5 * spec.ks().map(|k| (spec.get(k) - s.get(k)).abs()).sum::<f64>();
    assert!(tv < 0.01, "{tv}");
}

#[test]
fn histogram_variance_is_multinomial() {
    let spec = poisson_spectrum(100.0, 0.1);
    let (n, reps) = (1000usize, 400usize);
    let samples: Vec<_> = (0..reps).map(|r| sample_spectrum_stream(&spec, n, 9, r as u64).unwrap()).collect();
    for k in [0i64, 1, 2, -3] {
        let p = spec.get(k);
        let vals: Vec<f64> = samples.iter().map(|s| s.get(k)).collect();
        let mean = vals.iter().sum::<f64>() / reps as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
        let want = p * (1.0 - p) / n as f64;
        // standard error of a sample variance, Gaussian limit
        let se = want * (2.0 / (reps - 1) as f64).sqrt();
        assert!((var - want).abs() < 3.0 * se, "k = {k}: {var} vs {want} ± {se}");
    }
}

#[test]
fn precision_matches_the_five_percent_anchor() {
    let cfg = ExperimentConfig::new(1000, Coupling::real(0.1), 2024);
    let state = coherent(30.0);
    let rep = precision_curve(&state, &cfg, 3, &[1000]).unwrap();
    let d = &rep.deviations[0];
    assert!(d[0] > 0.03 && d[0] < 0.08, "{d:?}");
    assert!(d[0] < d[1] && d[1] < d[2], "{d:?}");
    assert_eq!(rep.failures[0], 0);
}

#[test]
fn precision_scales_as_inverse_square_root() {
    let cfg = ExperimentConfig::new(1000, Coupling::real(0.1), 5);
    let rep = precision_curve(&coherent(30.0), &cfg, 1, &DEFAULT_SWEEP).unwrap();
    let e = rep.exponents[0];
    assert!((-0.6..=-0.4).contains(&e), "{e} {:?}", rep.deviations);
}

#[test]
fn precision_reports_are_bit_identical() {
    let mut cfg = ExperimentConfig::new(100, Coupling::real(0.1), 77);
    cfg.realizations = 20;
    cfg.g_jitter = 0.02;
    let state = coherent(10.0);
    let a = precision_curve(&state, &cfg, 2, &[100, 1000]).unwrap();
    let b = precision_curve(&state, &cfg, 2, &[100, 1000]).unwrap();
    assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
    assert!(a.to_csv().unwrap().starts_with("N,m,rel_error\n"));
}

#[test]
fn invalid_configs_are_rejected() {
    let state = coherent(3.0);
    let mut cfg = ExperimentConfig::new(0, Coupling::real(0.1), 1);
    assert!(precision_curve(&state, &cfg, 1, &[10]).is_err());
    cfg.electrons = 10;
    cfg.g_jitter = -0.1;
    assert!(precision_curve(&state, &cfg, 1, &[10]).is_err());
    cfg.g_jitter = 0.0;
    cfg.realizations = 0;
    assert!(precision_curve(&state, &cfg, 1, &[10]).is_err());
}

#[test]
fn jitter_slopes_follow_two_m() {
    let g = Coupling::real(0.1);
    let grid: Vec<f64> = (-5..=5).map(|i| i as f64 * 0.01).collect();
    let rep = jitter_sensitivity(&coherent(30.0), &g, &grid, 3).unwrap();
    for (m, s) in rep.slopes.iter().enumerate() {
        let m = (m + 1) as f64;
        assert!(*s >= 1.8 * m && *s <= 2.2 * m, "m = {m}: {s}");
    }
    // δ = 0 row
    assert!(rep.deviations[5].iter().all(|d| d.abs() < 1e-9));
    assert!(rep.to_csv().unwrap().starts_with("jitter,m,rel_deviation\n"));
}

#[test]
fn overestimated_coupling_underestimates_moments() {
    // the true coupling is 5% below the nominal kernel coupling
    let g = Coupling::real(0.1);
    let rep = jitter_sensitivity(&coherent(10.0), &g, &[-0.05, 0.05], 3).unwrap();
    for m in 0..3 {
        assert!(rep.deviations[0][m] < 0.0 && rep.deviations[1][m] > 0.0);
        let want = 0.95f64.powi(2 * (m as i32 + 1)) - 1.0;
        assert!((rep.deviations[0][m] - want).abs() < 1e-8);
    }
}

#[test]
fn jitter_grid_is_bounded() {
    assert!(jitter_sensitivity(&coherent(3.0), &Coupling::real(0.1), &[0.3], 1).is_err());
}

#[test]
fn single_shot_budget_for_the_five_percent_target() {
    let g = Coupling::real(0.1);
    let b = single_shot_budget(&coherent(30.0), &g, 0.05, 1, &BudgetOptions { trace_electrons: 4 }).unwrap();
    assert!(b.electrons_needed > 300 && b.electrons_needed < 1500, "{}", b.electrons_needed);
    assert!((b.quadrature_growth - b.electrons_needed as f64 * 0.005).abs() < 1e-12);
    assert_eq!(b.verdict, Verdict::DestructiveOnly);
    assert!(b.regime_ok);
    assert!(b.drift_sublinear);
    assert_eq!(b.drift.len(), 2);
}

#[test]
fn back_action_per_electron_scales_with_g_squared() {
    // same β: g → g/10, ⟨n⟩ → 100⟨n⟩
    let a = single_shot_budget(&coherent(3.0), &Coupling::real(0.5), 0.05, 1, &BudgetOptions { trace_electrons: 0 })
        .unwrap();
    let b = single_shot_budget(&coherent(30.0), &Coupling::real(0.05), 0.05, 1, &BudgetOptions { trace_electrons: 0 })
        .unwrap();
    assert!((a.beta - b.beta).abs() < 1e-12);
    let per_a = a.quadrature_growth / a.electrons_needed as f64;
    let per_b = b.quadrature_growth / b.electrons_needed as f64;
    assert!((per_a / per_b - 100.0).abs() < 1e-9);
}
