use num_complex::Complex64;
use proptest::prelude::*;
use qpinem::fockspace::{
    coherent_cutoff, make_cat, make_coherent, make_fock, make_mixed_pair, make_thermal, quadrature_variance,
    squeezed_amplitudes, thermal_cutoff, CMatrix, Parity, PhotonStatistics, PhotonicState,
};
use qpinem::interaction::*;
use qpinem::special::{bessel_j_seq, displacement_element};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn coherent(alpha: f64) -> PhotonicState<f64> {
    make_coherent(c(alpha, 0.0), coherent_cutoff(alpha * alpha)).unwrap()
}

fn squeezed_vacuum_60() -> PhotonicState<f64> {
    let psi = squeezed_amplitudes(c(0.0, 0.0), 1.0, 0.0, 60);
    PhotonicState::from_amplitudes(&psi, "squeezed vacuum r=1").unwrap()
}

fn oracle_for(state: &PhotonicState<f64>, g: &Coupling<f64>, exact: &ElectronSpectrum<f64>) -> InteractionOutcome<f64> {
    oracle_spectrum(state, g, &OracleOptions::new(exact.k_max() as usize)).unwrap()
}

#[test]
fn zero_coupling_is_identity() {
    let g = Coupling::real(0.0);
    for n in 0..6 {
        for k in -3..=3i64 {
            let a = amplitude_exact(n, k, &g).unwrap();
            let want = if k == 0 { 1.0 } else { 0.0 };
            assert!((a - c(want, 0.0)).norm() < 1e-15);
        }
    }
    let out = spectrum_exact(&coherent(2.0), &g, &ExactOptions::default()).unwrap();
    assert!((out.spectrum.get(0) - 1.0).abs() < 1e-14);
}

#[test]
fn vacuum_emits_one_photon_with_poisson_weight() {
    let g = Coupling::new(0.3, 0.7).unwrap();
    let a = amplitude_exact(0, -1, &g).unwrap();
    assert!((a.norm_sqr() - 0.09 * (-0.09f64).exp()).abs() < 1e-15);
    // nothing to absorb
    let vac = make_fock::<f64>(0, 1).unwrap();
    let out = spectrum_exact(&vac, &Coupling::real(0.5), &ExactOptions::default()).unwrap();
    for k in 1..=out.spectrum.k_max() {
        assert_eq!(out.spectrum.get(k), 0.0);
    }
    // vacuum emission is Poissonian in |g|²
    let x: f64 = 0.25;
    let mut fact = 1.0;
    for m in 0..8i64 {
        if m > 0 {
            fact *= m as f64;
        }
        let want = (-x).exp() * x.powi(m as i32) / fact;
        assert!((out.spectrum.get(-m) - want).abs() < 1e-14, "{m}: {} vs {want}", out.spectrum.get(-m));
    }
}

#[test]
fn amplitude_is_displacement_element() {
    // independent route: ⟨n−k|D(g b)|n⟩ with b acting as a phase on the ladder
    let g = Coupling::new(0.45, -1.1).unwrap();
    for n in 0..12usize {
        for k in -5..=5i64 {
            let a = amplitude_exact(n, k, &g).unwrap();
            let m = n as i64 - k;
            if m < 0 {
                assert_eq!(a, c(0.0, 0.0));
                continue;
            }
            // D(ξ) with ξ = g e^{-iϕ}: ⟨m|D|n⟩ carries e^{-i(m−n)ϕ} = e^{ikϕ}, i.e. k rungs up.
            let d = displacement_element(m as usize, n, g.value());
            assert!((a - d).norm() < 1e-14, "n={n} k={k}: {a} vs {d}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn detailed_balance(n in 0usize..120, k in -20i64..20, gm in 0.0f64..2.0, phase in -3.2f64..3.2) {
        // |⟨n−k|S|n⟩|² = |⟨n|S|n−k⟩|²
        prop_assume!(n as i64 - k >= 0);
        let g = Coupling::new(gm, phase).unwrap();
        let a = amplitude_exact(n, k, &g).unwrap().norm_sqr();
        let b = amplitude_exact((n as i64 - k) as usize, -k, &g).unwrap().norm_sqr();
        prop_assert!((a - b).abs() < 1e-13 * (1.0 + a));
    }

    #[test]
    fn engines_conserve_probability_and_energy(
        weights in proptest::collection::vec(0.0f64..1.0, 2..25),
        gm in 0.01f64..1.5,
    ) {
        let stats = PhotonStatistics::from_weights(weights).unwrap();
        let state = PhotonicState::from_statistics(&stats, "random");
        let g = Coupling::real(gm);
        let out = spectrum_exact(&state, &g, &ExactOptions::default()).unwrap();
        let s = &out.spectrum;
        prop_assert!((s.total() - 1.0).abs() < 1e-8);
        // photon-electron energy conservation
        let after = out.post_state_traced.mean_photon_number();
        prop_assert!((s.mean_k() + (after - stats.mean())).abs() < 1e-8);
        // marginals of the joint table
        let joint = out.joint.as_ref().unwrap();
        let lad = joint.ladder_marginal();
        for (i, p) in lad.iter().enumerate() {
            prop_assert!((p - s.probs()[i]).abs() < 1e-13);
        }
        let ph = joint.photon_marginal();
        let post = out.post_state_traced.diagonal();
        for (a, b) in ph.iter().zip(&post) {
            prop_assert!((a - b).abs() < 1e-13);
        }
        // postselection reassembles the traced state
        let mut mix = vec![0.0; post.len()];
        for k in s.ks() {
            if s.get(k) > 0.0 {
                let q = postselect_state(joint, k).unwrap();
                for (m, v) in mix.iter_mut().zip(q.probs()) {
                    *m += s.get(k) * v;
                }
            }
        }
        for (a, b) in mix.iter().zip(&post) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        let approx = spectrum_approx(&stats, &g, KRange::Auto).unwrap();
        prop_assert!((approx.total() - 1.0).abs() < 1e-8);
        for k in approx.ks() {
            prop_assert!((approx.get(k) - approx.get(-k)).abs() < 1e-15);
        }
    }

    #[test]
    fn approximate_trace_out_is_identity(
        weights in proptest::collection::vec(0.0f64..1.0, 2..200),
        gm in 0.0f64..0.5,
    ) {
        let stats = PhotonStatistics::from_weights(weights).unwrap();
        let out = trace_out_approx(&stats, &Coupling::real(gm), 80);
        prop_assert!(out.max_abs_diff(&stats) < 1e-12);
    }
}

#[test]
fn exact_engine_matches_oracle() {
    let states = vec![
        make_fock::<f64>(0, 1).unwrap(),
        make_fock::<f64>(3, 4).unwrap(),
        coherent(3.0),
        make_thermal::<f64>(2.0, thermal_cutoff(2.0, 1e-10)).unwrap(),
        squeezed_vacuum_60(),
    ];
    for g in [Coupling::new(0.3, 0.0).unwrap(), Coupling::new(0.5, 2.0).unwrap()] {
        for st in &states {
            let ex = spectrum_exact(st, &g, &ExactOptions::default()).unwrap();
            let or = oracle_for(st, &g, &ex.spectrum);
            let d = ex.spectrum.max_abs_diff(&or.spectrum);
            assert!(d < 1e-8, "{} g={}: {d:e}", st.label(), g.magnitude());
            assert!((or.spectrum.total() - 1.0).abs() < 1e-10);
            let pd = ex.post_state_traced.diagonal();
            let po = or.post_state_traced.diagonal();
            for n in 0..pd.len().max(po.len()) {
                let a = pd.get(n).cloned().unwrap_or(0.0);
                let b = po.get(n).cloned().unwrap_or(0.0);
                assert!((a - b).abs() < 1e-8);
            }
        }
    }
}

#[test]
fn coherences_of_post_state_match_oracle() {
    let st = make_coherent(c(1.2, 0.8), 30).unwrap();
    let g = Coupling::new(0.6, 0.4).unwrap();
    let ex = spectrum_exact(&st, &g, &ExactOptions::default()).unwrap();
    let or = oracle_for(&st, &g, &ex.spectrum);
    let a = ex.post_state_traced.to_dense();
    let b = or.post_state_traced.to_dense();
    let n = a.dim().min(b.dim());
    for i in 0..n {
        for j in 0..n {
            assert!((a.get(i, j) - b.get(i, j)).norm() < 1e-8);
        }
    }
}

#[test]
fn oracle_with_zero_coupling_is_identity() {
    let st = coherent(1.5);
    let out = oracle_spectrum(&st, &Coupling::real(0.0), &OracleOptions::new(3)).unwrap();
    assert!((out.spectrum.get(0) - 1.0).abs() < 1e-14);
    let post = out.post_state_traced.diagonal();
    for (n, p) in st.diagonal().iter().enumerate() {
        assert!((post[n] - p).abs() < 1e-14);
    }
}

#[test]
fn window_too_small_is_rejected_with_leakage() {
    let err = spectrum_exact(
        &coherent(3.0),
        &Coupling::real(1.0),
        &ExactOptions { k_range: KRange::Symmetric(2), ..Default::default() },
    )
    .unwrap_err();
    match err {
        qpinem::Error::Leakage { k_max, leakage, .. } => {
            assert_eq!(k_max, 2);
            assert!(leakage > 1e-3);
        }
        e => panic!("unexpected {e}"),
    }
}

#[test]
fn approximation_degrades_with_coupling() {
    // β = 3 coherent
    let mut errs = Vec::new();
    for gm in [0.1, 0.2, 0.3, 0.5] {
        let mean: f64 = 9.0 / (gm * gm);
        let st = make_coherent(c(mean.sqrt(), 0.0), coherent_cutoff(mean)).unwrap();
        let g = Coupling::real(gm);
        let ex =
            spectrum_exact(&st, &g, &ExactOptions { joint: false, coherences: false, ..Default::default() }).unwrap();
        let ap = spectrum_approx(&qpinem::fockspace::statistics(&st), &g, KRange::Auto).unwrap();
        errs.push(ex.spectrum.max_abs_diff(&ap));
    }
    assert!(errs[0] < 1e-3, "{errs:?}");
    assert!(errs.windows(2).all(|w| w[1] > w[0]), "{errs:?}");
    assert!(errs[3] > 10.0 * errs[0]);
}

#[test]
fn fock_closed_form_is_bessel_squared() {
    let g = Coupling::real(0.2);
    let n = 225;
    let st = PhotonStatistics::<f64>::fock(n, n + 1);
    let ap = spectrum_approx(&st, &g, KRange::Auto).unwrap();
    let cf = spectrum_closed_form(ClosedForm::Fock { n }, &g, KRange::Auto).unwrap();
    assert!(ap.max_abs_diff(&cf) < 1e-14);
    let j = bessel_j_seq(6.0f64, 3);
    assert!((cf.get(-3) - j[3] * j[3]).abs() < 1e-15);
}

#[test]
fn thermal_closed_form_value() {
    // e^{-2} I_0(2) with I_0(2) = Σ 1/(j!)²
    let mut i0 = 0.0;
    let mut t = 1.0;
    for j in 0..40 {
        if j > 0 {
            t /= (j * j) as f64;
        }
        i0 += t;
    }
    let cf = spectrum_closed_form(ClosedForm::Thermal { mean_n: 100.0 }, &Coupling::real(0.1), KRange::Auto).unwrap();
    assert!((cf.get(0) - (-2.0f64).exp() * i0).abs() < 1e-14);
    assert!((cf.get(0) - 0.30850832255367104).abs() < 1e-14);
    assert!((cf.total() - 1.0).abs() < 1e-8);
}

#[test]
fn squeezed_vacuum_closed_form_references() {
    // mpmath, 60 digits
    let b = 10f64.sqrt();
    for (k, want) in
        [(0, 0.18323978846303015), (1, 0.10215437488032555), (3, 0.056_659_790_148_136_47), (6, 0.026194301266906933)]
    {
        let v: f64 = squeezed_vacuum_peak(k, b).unwrap();
        assert!((v - want).abs() < 1e-10, "k={k}: {v} vs {want}");
    }
    for (k, want) in [(0, 0.38184362428212874), (2, 0.081_626_145_030_127_51)] {
        let v: f64 = squeezed_vacuum_peak(k, 1.2).unwrap();
        assert!((v - want).abs() < 1e-12, "k={k}: {v} vs {want}");
    }
    assert!((squeezed_vacuum_peak::<f64>(0, 1e-4).unwrap() - 1.0).abs() < 1e-7);
    assert!((squeezed_vacuum_peak::<f64>(0, 0.0).unwrap() - 1.0).abs() < 1e-15);
}

#[test]
fn coherent_correction_is_second_order() {
    // at fixed β the residual of J² + F/⟨n⟩ against the Bessel kernel drops ~100× per decade of ⟨n⟩
    let beta = 10f64.sqrt();
    let mut errs = Vec::new();
    for mean in [1000.0f64, 10000.0] {
        let g = Coupling::real(beta / mean.sqrt());
        let stats = PhotonStatistics::<f64>::poisson(mean, coherent_cutoff(mean));
        let ap = spectrum_approx(&stats, &g, KRange::Auto).unwrap();
        let cf = spectrum_closed_form(ClosedForm::Coherent { mean_n: mean }, &g, KRange::Auto).unwrap();
        let fock = spectrum_closed_form(ClosedForm::Fock { n: mean as usize }, &g, KRange::Auto).unwrap();
        errs.push((ap.max_abs_diff(&cf), ap.max_abs_diff(&fock)));
    }
    assert!(errs[0].0 < 1e-5, "{errs:?}");
    assert!(errs[0].0 < 0.05 * errs[0].1);
    let ratio = errs[0].0 / errs[1].0;
    assert!(ratio > 50.0 && ratio < 200.0, "{errs:?}");
}

#[test]
fn continuum_closed_forms_converge_as_inverse_mean() {
    let beta = 10f64.sqrt();
    let mut th = Vec::new();
    let mut sv = Vec::new();
    for mean in [100.0f64, 1000.0] {
        let g = Coupling::real(beta / mean.sqrt());
        let len = thermal_cutoff(mean, 1e-14);
        let ap = spectrum_approx(&PhotonStatistics::<f64>::thermal(mean, len), &g, KRange::Auto).unwrap();
        let cf = spectrum_closed_form(ClosedForm::Thermal { mean_n: mean }, &g, KRange::Auto).unwrap();
        th.push(ap.max_abs_diff(&cf));
        let len = (60.0 * mean) as usize;
        let ap = spectrum_approx(&PhotonStatistics::<f64>::squeezed_vacuum(mean, len), &g, KRange::Auto).unwrap();
        let cf = spectrum_closed_form(ClosedForm::SqueezedVacuum { mean_n: mean }, &g, KRange::Auto).unwrap();
        sv.push(ap.max_abs_diff(&cf));
    }
    for e in [&th, &sv] {
        let r = e[0] / e[1];
        assert!(r > 7.0 && r < 13.0, "{e:?}");
    }
}

#[test]
fn postselection_examples() {
    let g0 = Coupling::real(0.0);
    let st = coherent(2.0);
    let out = spectrum_exact(&st, &g0, &ExactOptions::default()).unwrap();
    let q = postselect_state(out.joint.as_ref().unwrap(), 0).unwrap();
    for (n, p) in st.diagonal().iter().enumerate() {
        assert!((q.get(n) - p).abs() < 1e-15);
    }
    assert!(postselect_state(out.joint.as_ref().unwrap(), 1).is_err());

    let fock = make_fock::<f64>(7, 8).unwrap();
    let out = spectrum_exact(&fock, &Coupling::real(0.4), &ExactOptions::default()).unwrap();
    let q = postselect_state(out.joint.as_ref().unwrap(), 1).unwrap();
    assert!((q.get(6) - 1.0).abs() < 1e-14);

    // α = 20, |g| = 0.1: conditioning on ±3 or 0 moves ⟨n⟩ only slightly
    let st = coherent(20.0);
    let out = spectrum_exact(&st, &Coupling::real(0.1), &ExactOptions::default()).unwrap();
    let j = out.joint.as_ref().unwrap();
    let means: Vec<f64> = [-3i64, 0, 3].iter().map(|k| postselect_state(j, *k).unwrap().mean()).collect();
    for m in &means {
        assert!((m - 400.0).abs() < 0.05 * 400.0, "{means:?}");
    }
    // absorbing photons leaves fewer behind than emitting them
    assert!(means[2] < means[0]);
}

#[test]
fn back_action_examples() {
    let st = coherent(5.0);
    let mut devs = Vec::new();
    for gm in [0.05, 0.1, 0.2, 0.3] {
        let tr = traced_back_action(&st, &Coupling::real(gm), 1).unwrap();
        devs.push(tr.deviations[0]);
    }
    assert!(devs[0] < 0.01, "{devs:?}");
    assert!(devs.windows(2).all(|w| w[1] > w[0]), "{devs:?}");

    let tr = traced_back_action(&st, &Coupling::real(0.3), 8).unwrap();
    for n in [1usize, 2, 4] {
        assert!(tr.deviations[2 * n - 1] < 2.0 * tr.deviations[n - 1], "{:?}", tr.deviations);
    }
    assert!(traced_back_action(&st, &Coupling::real(0.3), 0).is_err());
}

#[test]
fn quadrature_variance_grows_by_half_g_squared() {
    let st = make_coherent(c(1.5, -0.5), 40).unwrap();
    let g = Coupling::new(0.1, 0.3).unwrap();
    let q = quadrature_growth(&st, &g, 1, 0.4).unwrap();
    assert!((q.predicted - q.initial - 0.005).abs() < 1e-15);
    assert!((q.final_evolved() - q.predicted).abs() < 1e-10);

    let sq = PhotonicState::from_amplitudes(&squeezed_amplitudes(c(0.5, 0.0), 0.4, 0.3, 40), "sq").unwrap();
    let q = quadrature_growth(&sq, &Coupling::real(0.05), 5, 1.1).unwrap();
    for (i, v) in q.evolved.iter().enumerate() {
        let want = q.initial + (i + 1) as f64 * 0.0025 / 2.0;
        assert!((v - want).abs() < 1e-8, "step {i}: {v} vs {want}");
    }
    let q0 = quadrature_growth(&sq, &Coupling::real(0.0), 2, 0.0).unwrap();
    assert!((q0.final_evolved() - quadrature_variance(&sq, 0.0)).abs() < 1e-11);
}

#[test]
fn composed_coupling_matches_two_mode_oracle() {
    let g = Coupling::new(0.3f64, 0.5).unwrap();
    assert_eq!(compose_interactions(g, 1).unwrap().coupling, g);
    assert!((compose_interactions(g, 4).unwrap().coupling.magnitude() - 0.6).abs() < 1e-15);
    assert!(compose_interactions(g, 0).is_err());
    let gt = compose_interactions(g, 2).unwrap().coupling;

    // two coherent modes: collective mode is coherent with (α₁ + α₂)/√2
    let a1 = c(0.8, 0.2);
    let a2 = c(-0.3, 0.6);
    let p1 = make_coherent(a1, 14).unwrap().to_dense();
    let p2 = make_coherent(a2, 14).unwrap().to_dense();
    let psi = |m: &CMatrix<f64>| -> Vec<Complex64> {
        let r0 = m.get(0, 0).re.sqrt();
        (0..m.dim()).map(|i| m.get(i, 0).conj() * (1.0 / r0)).collect()
    };
    let two = oracle_two_mode_spectrum(&psi(&p1), &psi(&p2), &g, 14).unwrap();
    let coll = make_coherent((a1 + a2) / 2f64.sqrt(), 20).unwrap();
    let one = spectrum_exact(&coll, &gt, &ExactOptions::default()).unwrap();
    assert!(two.max_abs_diff(&one.spectrum) < 1e-8);

    // |0⟩|1⟩: the collective mode is ½|0⟩⟨0| + ½|1⟩⟨1|
    let v0 = vec![c(1.0, 0.0)];
    let v1 = vec![c(0.0, 0.0), c(1.0, 0.0)];
    let two = oracle_two_mode_spectrum(&v0, &v1, &g, 10).unwrap();
    let mixed = PhotonicState::from_statistics(&PhotonStatistics::new(vec![0.5, 0.5]).unwrap(), "mix");
    let one = spectrum_exact(&mixed, &gt, &ExactOptions::default()).unwrap();
    assert!(two.max_abs_diff(&one.spectrum) < 1e-8);
}

#[test]
fn vacuum_two_point_is_classical_comb() {
    let vac = make_fock::<f64>(0, 1).unwrap();
    let g = Coupling::real(0.1);
    let lo = c(20.0, 0.0);
    let comb = bessel_j_seq(4.0f64, 40);
    for theta in [0.0, 1.3] {
        // the exact engine includes the quantum-stage vacuum emission, the
        // Bessel route the classical comb of the displaced vacuum
        let s = two_point_spectrum(&vac, lo, theta, &g, &TwoPointOptions::default()).unwrap();
        for k in -10..=10i64 {
            let j = comb[k.unsigned_abs() as usize];
            assert!((s.get(k) - j * j).abs() < 2e-3, "k={k}");
        }
        let ex =
            two_point_spectrum(&vac, lo, theta, &g, &TwoPointOptions { engine: Engine::Exact, ..Default::default() })
                .unwrap();
        let s0 =
            two_point_spectrum(&vac, lo, 0.0, &g, &TwoPointOptions { engine: Engine::Exact, ..Default::default() })
                .unwrap();
        assert!(ex.max_abs_diff(&s0) < 1e-13);
    }
    // the pure LO comb
    let comb_amp = lo_comb(lo, &g, 30);
    for (i, a) in comb_amp.iter().enumerate() {
        let j = comb[(i as i64 - 30).unsigned_abs() as usize];
        assert!((a.norm_sqr() - j * j).abs() < 1e-15);
    }
}

#[test]
fn two_point_equals_displaced_single_point() {
    let st = make_cat(c(1.0, 0.5), Parity::Even, 20).unwrap();
    let g = Coupling::new(0.4, 0.9).unwrap();
    let lo = c(2.0, -1.0);
    for theta in [0.0, 0.7, 2.5] {
        let opts = TwoPointOptions { engine: Engine::Exact, ..Default::default() };
        let two = two_point_spectrum(&st, lo, theta, &g, &opts).unwrap();
        let alpha = lo * Complex64::from_polar(1.0, theta);
        let disp = displaced_state(&st, alpha).unwrap();
        let one =
            spectrum_exact(&disp, &g, &ExactOptions { joint: false, coherences: false, ..Default::default() }).unwrap();
        assert!(two.max_abs_diff(&one.spectrum) < 1e-10, "θ={theta}");
        let flipped =
            two_point_spectrum(&st, lo, theta, &g, &TwoPointOptions { order: LoOrder::QuantumFirst, ..opts }).unwrap();
        assert!(two.max_abs_diff(&flipped) < 1e-15);
        // oracle with the LO as a c-number stage
        let or =
            oracle_spectrum(&st, &g, &OracleOptions { lo: Some(alpha), ..OracleOptions::new(two.k_max() as usize) })
                .unwrap();
        assert!(two.max_abs_diff(&or.spectrum) < 1e-8, "θ={theta}");
        // displaced statistics route
        let ds = displaced_statistics(&st, alpha).unwrap();
        let dd = disp.diagonal();
        for (n, p) in ds.probs().iter().enumerate() {
            assert!((p - dd.get(n).cloned().unwrap_or(0.0)).abs() < 1e-12, "{n}: {p} vs {:?}", dd.get(n));
        }
    }
}

#[test]
fn cat_and_mixture_differ_in_two_point_spectra() {
    let alpha = c(2.0, 0.0);
    let cat = make_cat(alpha, Parity::Even, 40).unwrap();
    let mix = make_mixed_pair(alpha, 40).unwrap();
    let g = Coupling::real(0.1);
    let lo = c(20.0, 0.0);
    let opts = TwoPointOptions::default();
    let mut max = 0.0f64;
    for theta in [0.0, std::f64::consts::FRAC_PI_2] {
        let a = two_point_spectrum(&cat, lo, theta, &g, &opts).unwrap();
        let b = two_point_spectrum(&mix, lo, theta, &g, &opts).unwrap();
        max = max.max(a.max_abs_diff(&b));
    }
    // same-state noise floor is exact zero; the difference is a genuine signal
    let again = two_point_spectrum(&cat, lo, 0.0, &g, &opts).unwrap();
    assert_eq!(again.max_abs_diff(&two_point_spectrum(&cat, lo, 0.0, &g, &opts).unwrap()), 0.0);
    assert!(max > 1e-6, "{max}");
}

#[test]
fn spectrum_serialization_roundtrip() {
    let s = spectrum_exact(&coherent(2.0), &Coupling::new(0.3, 0.1).unwrap(), &ExactOptions::default())
        .unwrap()
        .spectrum
        .with_label("coherent");
    let json = s.to_json().unwrap();
    let back = ElectronSpectrum::<f64>::from_json(&json).unwrap();
    assert_eq!(back, s);
    let csv = s.to_csv().unwrap();
    assert!(csv.starts_with("k,probability\n"));
    let back = ElectronSpectrum::<f64>::from_csv(&csv, Engine::Exact).unwrap();
    assert_eq!(back.probs(), s.probs());
    assert_eq!(back.k_min(), s.k_min());
    assert!(ElectronSpectrum::<f64>::from_csv("k,p\n0,1\n", Engine::Exact).is_err());
    assert!(ElectronSpectrum::<f64>::from_csv("k,probability\n0,0.5\n2,0.5\n", Engine::Exact).is_err());
}

#[test]
fn single_precision_engines_track_double() {
    let g64 = Coupling::real(0.2f64);
    let g32 = Coupling::real(0.2f32);
    let s64 = make_coherent(c(4.0, 0.0), 60).unwrap();
    let s32 = make_coherent(num_complex::Complex32::new(4.0, 0.0), 60).unwrap();
    let opts = ExactOptions { k_range: KRange::Symmetric(25), spec_tol: 1e-5, ..Default::default() };
    let a = spectrum_exact(&s64, &g64, &opts).unwrap();
    let b = spectrum_exact(&s32, &g32, &opts).unwrap();
    for k in a.spectrum.ks() {
        assert!((a.spectrum.get(k) - b.spectrum.get(k) as f64).abs() < 1e-5);
    }
    let ap = spectrum_approx(&qpinem::fockspace::statistics(&s32), &g32, KRange::Symmetric(25)).unwrap();
    assert!((ap.total() - 1.0).abs() < 1e-5);
}
