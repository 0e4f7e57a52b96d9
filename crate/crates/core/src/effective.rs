//! Closed forms of the effective two-level model, obtained by adiabatically
//! eliminating the intermediate level |e⟩.
//!
//! Valid for |α| ≫ Γ and a drive near two-photon resonance; all expressions
//! are singular at single-photon resonance α/2 + δ = 0.

use crate::error::{Error, Result};
use crate::params::Params;

/// Smallest |α/2 + δ| (in units of Γ) accepted by the effective model.
pub const SINGULARITY_GUARD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveParams {
    /// Effective two-photon Rabi amplitude Ω_eff.
    pub omega_eff: f64,
    /// Stark shift of |g⟩.
    pub delta_g: f64,
    /// Stark shift of |f⟩.
    pub delta_f: f64,
    /// Effective detuning from the Stark-shifted two-photon resonance.
    pub delta_eff: f64,
    /// Drive detuning δ at which Δ_eff vanishes.
    pub delta_shifted: f64,
}

/// Drive amplitude and level shifts of the effective model (no δ_shifted).
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct EffectiveDrive {
    pub omega_eff: f64,
    pub delta_g: f64,
    pub delta_f: f64,
    pub delta_eff: f64,
}

pub(crate) fn effective_drive(p: &Params) -> Result<EffectiveDrive> {
    p.validate()?;
    let detuning = p.single_photon_detuning();
    if detuning.abs() <= SINGULARITY_GUARD * p.gamma {
        return Err(Error::Domain(format!(
            "effective model is singular at single-photon resonance (α/2 + δ = {detuning:.3e})"
        )));
    }
    let half_sq = (p.omega / 2.0).powi(2);
    let delta_g = half_sq / detuning;
    let delta_f = p.xi * p.xi * delta_g;
    Ok(EffectiveDrive {
        omega_eff: 2.0 * p.xi * half_sq / detuning,
        delta_g,
        delta_f,
        delta_eff: -2.0 * p.delta + delta_f - delta_g,
    })
}

/// Stark-shifted two-photon resonance δ_shifted = −α/4 − ½√((α/2)² + 2(Ω/2)²(ξ² − 1)).
///
/// The root with the minus sign is taken; for α < 0 and ξ = 1 it is δ = 0.
pub fn shifted_resonance(p: &Params) -> Result<f64> {
    p.validate()?;
    let radicand = (p.alpha / 2.0).powi(2) + 2.0 * (p.omega / 2.0).powi(2) * (p.xi * p.xi - 1.0);
    if radicand < 0.0 {
        return Err(Error::Domain(format!("no shifted two-photon resonance: radicand {radicand:.3e} < 0")));
    }
    Ok(-p.alpha / 4.0 - 0.5 * radicand.sqrt())
}

pub fn effective_params(p: &Params) -> Result<EffectiveParams> {
    let d = effective_drive(p)?;
    Ok(EffectiveParams {
        omega_eff: d.omega_eff,
        delta_g: d.delta_g,
        delta_f: d.delta_f,
        delta_eff: d.delta_eff,
        delta_shifted: shifted_resonance(p)?,
    })
}

/// Common denominator Ω_eff²(2 + ξ²) + 4Δ_eff² + ξ⁴Γ² of the steady state.
fn steady_denominator(p: &Params, d: &EffectiveDrive) -> f64 {
    let xi2 = p.xi * p.xi;
    d.omega_eff.powi(2) * (2.0 + xi2) + 4.0 * d.delta_eff.powi(2) + xi2 * xi2 * p.gamma.powi(2)
}

/// Steady-state populations (g, e, f) of the effective model.
///
/// Only requires the effective drive, so it is defined even where the
/// shifted resonance is not.
pub fn effective_steady_states(p: &Params) -> Result<[f64; 3]> {
    let d = effective_drive(p)?;
    let den = steady_denominator(p, &d);
    let xi2 = p.xi * p.xi;
    let w2 = d.omega_eff.powi(2);
    let pop_g = (w2 + 4.0 * d.delta_eff.powi(2) + xi2 * xi2 * p.gamma.powi(2)) / den;
    Ok([pop_g, xi2 * w2 / den, w2 / den])
}

/// g⁽²⁾(0) of the effective model at arbitrary detuning.
///
/// With ⟨Σ₊²Σ₋²⟩ = ξ²⟨σ_ff⟩ and ⟨Σ₊Σ₋⟩ = ⟨σ_ee⟩ + ξ²⟨σ_ff⟩ evaluated on the
/// effective steady state this is
/// (Ω_eff²(2 + ξ²) + 4Δ_eff² + ξ⁴Γ²) / (4ξ²Ω_eff²).
pub fn effective_g2_zero(p: &Params) -> Result<f64> {
    let d = effective_drive(p)?;
    if d.omega_eff == 0.0 {
        return Err(Error::Domain("g2(0) undefined without drive (Ω_eff = 0)".into()));
    }
    Ok(steady_denominator(p, &d) / (4.0 * p.xi * p.xi * d.omega_eff.powi(2)))
}

/// Two-photon-resonance form g⁽²⁾(0) = 1/2 + 1/(4ξ²) + α²Γ²/(4Ω⁴).
///
/// Coincides with [`effective_g2_zero`] at ξ = 1, δ = 0. For ξ ≠ 1 the two
/// differ because Δ_eff ≠ 0 at δ = 0 and the ξ-dependent terms are exchanged.
pub fn resonant_g2_zero(p: &Params) -> Result<f64> {
    p.validate()?;
    if p.omega == 0.0 {
        return Err(Error::Domain("g2(0) undefined without drive (Ω = 0)".into()));
    }
    Ok(0.5 + 1.0 / (4.0 * p.xi * p.xi) + (p.alpha * p.gamma).powi(2) / (4.0 * p.omega.powi(4)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn no_shift_for_equal_dipoles() {
        for omega in [0.0, 1.0, 40.0, 300.0] {
            let p = Params::new(omega, -120.0, 0.0, 1.0).unwrap();
            assert_eq!(shifted_resonance(&p).unwrap(), 0.0);
        }
    }

    #[test]
    fn shifted_resonance_sign_branch() {
        // ξ = 1: −α/4 − |α|/4
        let p = Params::new(10.0, 80.0, 0.0, 1.0).unwrap();
        assert_eq!(shifted_resonance(&p).unwrap(), -40.0);
    }

    #[test]
    fn shifted_resonance_xi_sqrt2() {
        let p = Params::new(40.0, -120.0, 0.0, 2f64.sqrt()).unwrap();
        let expected = 30.0 - 0.5 * 4400f64.sqrt();
        assert_abs_diff_eq!(shifted_resonance(&p).unwrap(), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(expected, -3.166, epsilon = 1e-3);
    }

    #[test]
    fn negative_radicand_is_domain_error() {
        let p = Params::new(200.0, -120.0, 0.0, 0.5).unwrap();
        assert!(matches!(shifted_resonance(&p), Err(Error::Domain(_))));
        // the drive terms alone remain defined
        assert!(effective_steady_states(&p).is_ok());
    }

    #[test]
    fn singular_at_single_photon_resonance() {
        let p = Params::new(10.0, -120.0, 60.0, 1.0).unwrap();
        assert!(matches!(effective_params(&p), Err(Error::Domain(_))));
        assert!(effective_steady_states(&p).is_err());
    }

    #[test]
    fn strong_drive_amplitude() {
        let p = Params::new(40.0, -120.0, 0.0, 1.0).unwrap();
        let e = effective_params(&p).unwrap();
        assert_abs_diff_eq!(e.omega_eff, -40.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e.delta_g, -20.0 / 3.0, epsilon = 1e-12);
        assert_eq!(e.delta_eff, 0.0);
    }

    #[test]
    fn undriven_steady_state() {
        let p = Params::new(0.0, -120.0, 0.0, 1.0).unwrap();
        assert_eq!(effective_steady_states(&p).unwrap(), [1.0, 0.0, 0.0]);
        assert!(effective_g2_zero(&p).is_err());
        assert!(resonant_g2_zero(&p).is_err());
    }

    #[test]
    fn saturated_populations_approach_one_third() {
        // ξ = 1, δ = 0 ⇒ Δ_eff = 0; deviation ∝ Γ²/Ω_eff²
        for omega in [40.0, 100.0, 400.0] {
            let p = Params::new(omega, -120.0, 0.0, 1.0).unwrap();
            let w = effective_params(&p).unwrap().omega_eff;
            for pop in effective_steady_states(&p).unwrap() {
                assert!((pop - 1.0 / 3.0).abs() <= 1.0 / w.powi(2));
            }
        }
    }

    #[test]
    fn g2_zero_strong_drive_value() {
        let p = Params::new(40.0, -120.0, 0.0, 1.0).unwrap();
        let expected = 0.75 + 14400.0 / 10_240_000.0;
        assert_abs_diff_eq!(resonant_g2_zero(&p).unwrap(), expected, epsilon = 1e-14);
        assert_abs_diff_eq!(effective_g2_zero(&p).unwrap(), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(expected, 0.75141, epsilon = 1e-5);
    }

    #[test]
    fn g2_zero_infinite_drive_limit() {
        let p = Params::new(1e6, -120.0, 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(resonant_g2_zero(&p).unwrap(), 0.75, epsilon = 1e-12);
    }

    #[test]
    fn g2_zero_matches_steady_state_moments() {
        // ξ²⟨σ_ff⟩ / (⟨σ_ee⟩ + ξ²⟨σ_ff⟩)² evaluated from the populations
        let p = Params::new(25.0, -120.0, 1.5, 0.8).unwrap();
        let [_, e, f] = effective_steady_states(&p).unwrap();
        let xi2 = p.xi * p.xi;
        let moments = xi2 * f / (e + xi2 * f).powi(2);
        assert_abs_diff_eq!(effective_g2_zero(&p).unwrap(), moments, epsilon = 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn detuning_vanishes_at_shifted_resonance(
            omega in 0.0f64..60.0, alpha in -200.0f64..-20.0, xi in 0.5f64..2.0
        ) {
            let p = Params::new(omega, alpha, 0.0, xi).unwrap();
            prop_assume!(alpha * alpha / 4.0 + omega * omega / 2.0 * (xi * xi - 1.0) >= 0.0);
            let ds = shifted_resonance(&p).unwrap();
            let e = effective_params(&p.with_delta(ds)).unwrap();
            prop_assert!(e.delta_eff.abs() <= 1e-10);
        }

        #[test]
        fn populations_are_a_distribution(
            omega in 0.0f64..60.0, delta in -80.0f64..80.0, xi in 0.5f64..2.0
        ) {
            let p = Params::new(omega, -120.0, delta, xi).unwrap();
            prop_assume!(p.single_photon_detuning().abs() > 1e-6);
            let pops = effective_steady_states(&p).unwrap();
            prop_assert!(pops.iter().all(|&x| (0.0..=1.0).contains(&x)));
            prop_assert!((pops.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            if pops[2] > 0.0 {
                prop_assert!((pops[1] / pops[2] - xi * xi).abs() <= 1e-12 * xi * xi);
            }
        }

        #[test]
        fn resonant_g2_never_antibunched(omega in 0.1f64..500.0, xi in 0.1f64..10.0) {
            let p = Params::new(omega, -120.0, 0.0, xi).unwrap();
            prop_assert!(resonant_g2_zero(&p).unwrap() > 0.5);
        }
    }
}
