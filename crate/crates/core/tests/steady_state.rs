use ladderfl::dynamics::{evolve, steady_state};
use ladderfl::effective::{effective_steady_states, shifted_resonance};
use ladderfl::{build_liouvillian, DensityMatrix, Level, Model, Params, RateForm};
use proptest::prelude::*;

const XIS: [f64; 3] = [std::f64::consts::FRAC_1_SQRT_2, 1.0, std::f64::consts::SQRT_2];

fn full_populations(p: &Params) -> [f64; 3] {
    steady_state(&build_liouvillian(p, Model::Full3Level).unwrap()).unwrap().populations()
}

#[test]
fn resonant_equal_dipoles_match_effective_model() {
    let p = Params::new(40.0, -120.0, 0.0, 1.0).unwrap();
    let full = full_populations(&p);
    let eff = effective_steady_states(&p).unwrap();
    for k in 0..3 {
        assert!((full[k] - eff[k]).abs() < 0.02, "{full:?} vs {eff:?}");
        assert!((full[k] - 1.0 / 3.0).abs() < 0.02);
    }
}

#[test]
fn moderate_drive_matches_effective_model_for_unequal_dipoles() {
    for xi in XIS {
        let p = Params::new(20.0, -120.0, 0.0, xi).unwrap();
        let full = full_populations(&p);
        let eff = effective_steady_states(&p).unwrap();
        for k in 0..3 {
            assert!((full[k] - eff[k]).abs() < 0.02, "ξ={xi}: {full:?} vs {eff:?}");
        }
        let ratio = full[1] / full[2];
        assert!((ratio / (xi * xi) - 1.0).abs() < 0.1, "ξ={xi}: ratio {ratio}");
    }
}

#[test]
fn two_photon_peak_follows_shifted_resonance() {
    for xi in XIS {
        let p = Params::new(40.0, -120.0, 0.0, xi).unwrap();
        let target = shifted_resonance(&p).unwrap();
        let (best, _) = (-100..=100)
            .map(|k| {
                let d = target.round() + 0.1 * k as f64;
                (d, full_populations(&p.with_delta(d))[2])
            })
            .fold((f64::NAN, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
        assert!((best - target).abs() < 1.0, "ξ={xi}: argmax {best} vs {target}");
        if xi == 1.0 {
            assert_eq!(best, 0.0);
        }
    }
}

#[test]
fn every_model_has_a_unique_steady_state() {
    let p = Params::new(40.0, -120.0, 5.0, 1.2).unwrap();
    for model in [
        Model::Full3Level,
        Model::EffectiveTwoLevel,
        Model::DressedSecular(RateForm::Asymptotic),
        Model::DressedSecular(RateForm::General),
    ] {
        let l = build_liouvillian(&p, model).unwrap();
        let rho = steady_state(&l).unwrap();
        assert!(rho.min_eigenvalue() > -1e-9, "{model}");
        let r = l.apply(rho.matrix());
        assert!(r.iter().map(|z| z.norm()).fold(0.0, f64::max) <= 1e-10, "{model}");
    }
}

#[test]
fn secular_strong_drive_is_uniform_over_dressed_levels() {
    let p = Params::new(400.0, -120.0, 0.0, 1.0).unwrap();
    let l = build_liouvillian(&p, Model::DressedSecular(RateForm::Asymptotic)).unwrap();
    let rho = steady_state(&l).unwrap();
    let b = ladderfl::dressed::diagonalize(&p).unwrap();
    for op in [ladderfl::dressed::DressedLevel::M, ladderfl::dressed::DressedLevel::U, ladderfl::dressed::DressedLevel::L] {
        let k = b.ket(op).map(|x| ladderfl::operators::C64::new(x, 0.0));
        let pop = (k.adjoint() * rho.matrix() * k)[0].re;
        assert!((pop - 1.0 / 3.0).abs() < 1e-9, "{op:?}: {pop}");
    }
}

#[test]
fn relaxation_reaches_the_steady_state() {
    let l = build_liouvillian(&Params::new(40.0, -120.0, 0.0, 1.0).unwrap(), Model::Full3Level).unwrap();
    let ss = steady_state(&l).unwrap();
    let rho = evolve(&l, &DensityMatrix::pure(Level::F), 200.0).unwrap();
    let d = (rho.matrix() - ss.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert!(d < 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn steady_state_is_physical(omega in 0.0f64..60.0, delta in -80.0f64..80.0, xi in 0.5f64..2.0) {
        let p = Params::new(omega, -120.0, delta, xi).unwrap();
        let l = build_liouvillian(&p, Model::Full3Level).unwrap();
        let rho = steady_state(&l).unwrap();
        let m = rho.matrix();
        prop_assert!((m.trace().re - 1.0).abs() < 1e-10);
        prop_assert!((m - m.adjoint()).iter().all(|z| z.norm() < 1e-12));
        prop_assert!(rho.min_eigenvalue() > -1e-9);
        let r = l.apply(m);
        prop_assert!(r.iter().all(|z| z.norm() <= 1e-10));
    }

    #[test]
    fn effective_populations_form_a_distribution(omega in 0.0f64..60.0, delta in -80.0f64..80.0, xi in 0.5f64..2.0) {
        let p = Params::new(omega, -120.0, delta, xi).unwrap();
        let pops = effective_steady_states(&p).unwrap();
        prop_assert!(pops.iter().all(|&x| (-1e-12..=1.0 + 1e-12).contains(&x)));
        prop_assert!((pops.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
