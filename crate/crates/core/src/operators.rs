//! Atomic operators on the three-dimensional bare basis (|g⟩, |e⟩, |f⟩).
//!
//! Matrices are indexed `[(row, col)]` with row/column 0 = |g⟩, 1 = |e⟩,
//! 2 = |f⟩, so that |i⟩ is the i-th unit vector.

use nalgebra::Matrix3;
use num_complex::Complex64;

use crate::effective::effective_params;
use crate::error::{Error, Result};
use crate::params::Params;

pub type C64 = Complex64;
pub type Mat3 = Matrix3<C64>;

/// Bare atomic levels in basis order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    G = 0,
    E = 1,
    F = 2,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::G, Level::E, Level::F];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// A 3×3 complex operator on the bare atomic space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Operator3(pub Mat3);

impl Operator3 {
    pub fn zeros() -> Self {
        Operator3(Mat3::zeros())
    }

    pub fn identity() -> Self {
        Operator3(Mat3::identity())
    }

    /// The transition operator σ_ij = |i⟩⟨j|.
    pub fn transition(i: Level, j: Level) -> Self {
        let mut m = Mat3::zeros();
        m[(i.index(), j.index())] = C64::new(1.0, 0.0);
        Operator3(m)
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn dagger(&self) -> Self {
        Operator3(self.0.adjoint())
    }

    /// Largest entry of |A − A†|.
    pub fn hermiticity_defect(&self) -> f64 {
        (self.0 - self.0.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Expectation value Tr(A ρ).
    pub fn expect(&self, rho: &DensityMatrix) -> C64 {
        (self.0 * rho.0).trace()
    }
}

impl std::ops::Mul for Operator3 {
    type Output = Operator3;
    fn mul(self, rhs: Operator3) -> Operator3 {
        Operator3(self.0 * rhs.0)
    }
}

/// The atomic lowering operator Σ₋ = |g⟩⟨e| + ξ|e⟩⟨f|.
///
/// The raising operator Σ₊ is its conjugate transpose.
pub fn lowering_operator(xi: f64) -> Result<Operator3> {
    if !xi.is_finite() || xi <= 0.0 {
        return Err(Error::InvalidParameter { name: "xi", reason: format!("{xi} must be finite and > 0") });
    }
    let mut m = Mat3::zeros();
    m[(0, 1)] = C64::new(1.0, 0.0);
    m[(1, 2)] = C64::new(xi, 0.0);
    Ok(Operator3(m))
}

/// Rotating-frame Hamiltonian H/ħ of the driven ladder atom.
///
/// Diagonal (0, −(α/2 + δ), −2δ) with drive (Ω/2)(Σ₊ + Σ₋).
pub fn hamiltonian_full(p: &Params) -> Result<Operator3> {
    p.validate()?;
    let half = p.omega / 2.0;
    let h = nalgebra::Matrix3::new(
        0.0,
        half,
        0.0,
        half,
        -(p.alpha / 2.0 + p.delta),
        p.xi * half,
        0.0,
        p.xi * half,
        -2.0 * p.delta,
    );
    Ok(Operator3(h.map(|x| C64::new(x, 0.0))))
}

/// Effective two-photon Hamiltonian with |e⟩ adiabatically eliminated.
///
/// Embedded in the full space: the |e⟩ row and column are zero, so only the
/// dissipators couple to the intermediate level.
pub fn hamiltonian_effective(p: &Params) -> Result<Operator3> {
    p.validate()?;
    let eff = effective_params(p)?;
    let mut m = Mat3::zeros();
    m[(0, 0)] = C64::new(eff.delta_g, 0.0);
    m[(2, 2)] = C64::new(-2.0 * p.delta + eff.delta_f, 0.0);
    m[(0, 2)] = C64::new(eff.omega_eff / 2.0, 0.0);
    m[(2, 0)] = C64::new(eff.omega_eff / 2.0, 0.0);
    Ok(Operator3(m))
}

/// Lindblad decay superoperator Λ(X)ρ = 2XρX† − X†Xρ − ρX†X.
pub fn dissipator(x: &Operator3, rho: &Mat3) -> Mat3 {
    let xd = x.0.adjoint();
    let xdx = xd * x.0;
    (x.0 * rho * xd) * C64::new(2.0, 0.0) - xdx * rho - rho * xdx
}

/// A 3×3 atomic density matrix.
///
/// Construction through [`DensityMatrix::new`] checks Hermiticity, unit trace
/// and positivity against [`DensityMatrix::TOLERANCE`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(Mat3);

impl DensityMatrix {
    pub const TOLERANCE: f64 = 1e-10;

    pub fn new(m: Mat3) -> Result<Self> {
        Self::with_tolerance(m, Self::TOLERANCE)
    }

    /// Validates with a caller-chosen tolerance on every invariant.
    pub fn with_tolerance(m: Mat3, tol: f64) -> Result<Self> {
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NotPhysical("non-finite entry".into()));
        }
        let herm = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > tol {
            return Err(Error::NotPhysical(format!("‖ρ − ρ†‖ = {herm:.3e}")));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::NotPhysical(format!("Tr ρ = {tr}")));
        }
        let rho = DensityMatrix(m);
        let min_eig = rho.min_eigenvalue();
        if min_eig < -tol {
            return Err(Error::NotPhysical(format!("negative eigenvalue {min_eig:.3e}")));
        }
        Ok(rho)
    }

    /// The pure state |l⟩⟨l|.
    pub fn pure(level: Level) -> Self {
        let mut m = Mat3::zeros();
        m[(level.index(), level.index())] = C64::new(1.0, 0.0);
        DensityMatrix(m)
    }

    /// Builds ρ = |ψ⟩⟨ψ|/⟨ψ|ψ⟩ from an unnormalised amplitude vector.
    pub fn from_amplitudes(psi: [C64; 3]) -> Result<Self> {
        let v = nalgebra::Vector3::from(psi);
        let n = v.norm_squared();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::NotPhysical("zero or non-finite state vector".into()));
        }
        Ok(DensityMatrix(v * v.adjoint() / C64::new(n, 0.0)))
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn into_inner(self) -> Mat3 {
        self.0
    }

    /// Populations (ρ_gg, ρ_ee, ρ_ff).
    pub fn populations(&self) -> [f64; 3] {
        [self.0[(0, 0)].re, self.0[(1, 1)].re, self.0[(2, 2)].re]
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> [f64; 3] {
        let herm = (self.0 + self.0.adjoint()) * C64::new(0.5, 0.0);
        let mut ev: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        [ev[0], ev[1], ev[2]]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }
}
