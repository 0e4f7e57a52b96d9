//! Physical parameters of the driven ladder atom.
//!
//! All rates and frequencies are expressed in units of the lower-transition
//! decay rate Γ; times are in units of 1/Γ.

use crate::error::{Error, Result};

/// Parameter set (Γ, Ω, α, δ, ξ) for the rotating-frame model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    /// Lower-transition decay rate Γ. Fixes the unit; normally 1.0.
    pub gamma: f64,
    /// Drive amplitude Ω of the lower transition.
    pub omega: f64,
    /// Anharmonicity α = ω_fe − ω_eg.
    pub alpha: f64,
    /// Detuning δ of the drive from two-photon resonance.
    pub delta: f64,
    /// Ratio ξ of the upper to lower dipole moments.
    pub xi: f64,
}

impl Default for Params {
    fn default() -> Self {
        Params { gamma: 1.0, omega: 40.0, alpha: -120.0, delta: 0.0, xi: 1.0 }
    }
}

impl Params {
    /// Builds a validated parameter set with Γ = 1.
    pub fn new(omega: f64, alpha: f64, delta: f64, xi: f64) -> Result<Self> {
        let p = Params { gamma: 1.0, omega, alpha, delta, xi };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("gamma", self.gamma),
            ("omega", self.omega),
            ("alpha", self.alpha),
            ("delta", self.delta),
            ("xi", self.xi),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::InvalidParameter { name, reason: format!("{v} is not finite") });
            }
        }
        if self.gamma <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "gamma",
                reason: format!("{} must be > 0", self.gamma),
            });
        }
        if self.xi <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "xi",
                reason: format!("{} must be > 0", self.xi),
            });
        }
        Ok(())
    }

    pub fn with_omega(self, omega: f64) -> Self {
        Params { omega, ..self }
    }

    pub fn with_delta(self, delta: f64) -> Self {
        Params { delta, ..self }
    }

    pub fn with_xi(self, xi: f64) -> Self {
        Params { xi, ..self }
    }

    /// Detuning of the drive from the single-photon resonances, α/2 + δ.
    pub fn single_photon_detuning(&self) -> f64 {
        self.alpha / 2.0 + self.delta
    }
}
