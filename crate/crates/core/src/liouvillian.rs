//! Liouvillian superoperators of the three supported models.
//!
//! Density matrices are column-stacked (`vec(ρ)[i + 3j] = ρ[(i, j)]`); the
//! generator satisfies d vec(ρ)/dt = L vec(ρ).

use std::fmt;
use std::str::FromStr;

use crate::dressed::{diagonalize, secular_jump_operators, RateForm};
use crate::error::{Error, Result};
use crate::linalg::{kron, left, right, trace_functional, unvec, vec, Mat9, Vec9};
use crate::operators::{hamiltonian_effective, hamiltonian_full, lowering_operator, Level, Mat3, Operator3, C64};
use crate::params::Params;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    /// Full three-level master equation with collective decay Σ₋.
    Full3Level,
    /// Adiabatically eliminated |e⟩ with independent decay of both dipoles.
    EffectiveTwoLevel,
    /// Secular master equation in the dressed basis. Presumes Ω ≫ Γ.
    DressedSecular(RateForm),
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Full3Level => "full",
            Model::EffectiveTwoLevel => "effective",
            Model::DressedSecular(RateForm::Asymptotic) => "secular",
            Model::DressedSecular(RateForm::General) => "secular-general",
        })
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "full" | "full3level" => Ok(Model::Full3Level),
            "effective" | "effective2level" | "effectivetwolevel" => Ok(Model::EffectiveTwoLevel),
            "secular" | "dressed" | "dressedsecular" => Ok(Model::DressedSecular(RateForm::Asymptotic)),
            "secular-general" | "dressed-general" => Ok(Model::DressedSecular(RateForm::General)),
            _ => Err(Error::UnknownModel(s.to_string())),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Liouvillian {
    matrix: Mat9,
    model: Model,
    params: Params,
}

/// Superoperator of −i[H, ρ].
pub fn commutator_superoperator(h: &Mat3) -> Mat9 {
    (left(h) - right(h)) * C64::new(0.0, -1.0)
}

/// Superoperator of (rate/2)·Λ(X)ρ = rate·(XρX† − ½{X†X, ρ}).
pub fn dissipator_superoperator(rate: f64, x: &Operator3) -> Mat9 {
    let xm = x.0;
    let xdx = xm.adjoint() * xm;
    let jump = kron(&xm.conjugate(), &xm);
    (jump - (left(&xdx) + right(&xdx)) * C64::new(0.5, 0.0)) * C64::new(rate, 0.0)
}

pub fn build_liouvillian(p: &Params, model: Model) -> Result<Liouvillian> {
    p.validate()?;
    let (h, jumps): (Mat3, Vec<(f64, Operator3)>) = match model {
        Model::Full3Level => (hamiltonian_full(p)?.0, vec![(p.gamma, lowering_operator(p.xi)?)]),
        Model::EffectiveTwoLevel => (
            hamiltonian_effective(p)?.0,
            vec![
                (p.gamma, Operator3::transition(Level::G, Level::E)),
                (p.xi * p.xi * p.gamma, Operator3::transition(Level::E, Level::F)),
            ],
        ),
        Model::DressedSecular(form) => {
            let basis = diagonalize(p)?;
            (hamiltonian_full(p)?.0, secular_jump_operators(&basis, form)?)
        }
    };
    let mut matrix = commutator_superoperator(&h);
    for (rate, x) in &jumps {
        matrix += dissipator_superoperator(*rate, x);
    }
    Ok(Liouvillian { matrix, model, params: *p })
}

impl Liouvillian {
    pub fn matrix(&self) -> &Mat9 {
        &self.matrix
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn apply(&self, rho: &Mat3) -> Mat3 {
        unvec(&(self.matrix * vec(rho)))
    }

    pub fn apply_vec(&self, v: &Vec9) -> Vec9 {
        self.matrix * v
    }

    /// Largest |Tr(L·vec(E_ij))| over the matrix units E_ij.
    ///
    /// The trace functional is linear, so this bounds the trace drift of any ρ.
    pub fn trace_defect(&self) -> f64 {
        let t = trace_functional(&Mat3::identity());
        (t.transpose() * self.matrix).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}
