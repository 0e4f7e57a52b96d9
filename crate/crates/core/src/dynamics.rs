//! Steady states, time propagation and quantum-regression correlations.
//!
//! Propagation diagonalises the Liouvillian once; every later time sample
//! costs O(9²). When the eigenvector matrix is ill-conditioned the
//! propagator falls back to Padé matrix exponentials.

use crate::dressed::{diagonalize, DressedOp};
use crate::error::{Error, Result};
use crate::linalg::{expm, trace_functional, unvec, vec, Eigen9, Mat9, Vec9};
use crate::liouvillian::Liouvillian;
use crate::operators::{lowering_operator, DensityMatrix, Mat3, Operator3, C64};

/// ⟨Σ₊Σ₋⟩ below this counts as no emission.
pub const EMISSION_THRESHOLD: f64 = 1e-12;
/// Eigenvector condition number above which the propagator uses Padé.
pub const CONDITION_LIMIT: f64 = 1e10;
/// Absolute tolerance on the eigenvalues of a steady state.
pub const STEADY_POSITIVITY_TOL: f64 = 1e-9;
/// Absolute tolerance on Hermiticity, trace and positivity after propagation.
pub const PROPAGATION_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
enum Strategy {
    Spectral(Eigen9),
    Pade,
}

/// exp(L t) for one Liouvillian.
#[derive(Debug, Clone)]
pub struct Propagator {
    generator: Mat9,
    strategy: Strategy,
}

impl Propagator {
    /// Diagonalises L, or falls back to Padé exponentials when the
    /// eigenvector matrix is defective beyond [`CONDITION_LIMIT`].
    pub fn new(l: &Liouvillian) -> Self {
        let generator = *l.matrix();
        let strategy = match Eigen9::new(&generator) {
            Ok(eig) if eig.condition <= CONDITION_LIMIT => Strategy::Spectral(eig),
            _ => Strategy::Pade,
        };
        Propagator { generator, strategy }
    }

    /// A propagator that never diagonalises; uniform grids are stepped with a
    /// single exp(L Δτ).
    pub fn stepping(l: &Liouvillian) -> Self {
        Propagator { generator: *l.matrix(), strategy: Strategy::Pade }
    }

    pub fn eigen(&self) -> Option<&Eigen9> {
        match &self.strategy {
            Strategy::Spectral(e) => Some(e),
            Strategy::Pade => None,
        }
    }

    pub fn generator(&self) -> &Mat9 {
        &self.generator
    }

    pub fn propagate(&self, x: &Vec9, t: f64) -> Result<Vec9> {
        check_time(t)?;
        if t == 0.0 {
            return Ok(*x);
        }
        match &self.strategy {
            Strategy::Spectral(e) => Ok(e.apply_fn(x, |l| (l * t).exp())),
            Strategy::Pade => Ok(expm(&(self.generator * C64::new(t, 0.0)))? * x),
        }
    }

    /// `measure · exp(L τ) x` for every τ of an ascending grid.
    pub fn regression(&self, x: &Vec9, measure: &Vec9, taus: &[f64]) -> Result<Vec<C64>> {
        check_grid(taus)?;
        match &self.strategy {
            Strategy::Spectral(e) => {
                let coeff = e.inverse * x;
                let row = measure.transpose() * e.vectors;
                let weights: Vec<C64> = (0..9).map(|k| row[k] * coeff[k]).collect();
                Ok(taus
                    .iter()
                    .map(|&t| weights.iter().zip(e.values.iter()).map(|(w, l)| w * (l * t).exp()).sum())
                    .collect())
            }
            Strategy::Pade => {
                let dot = |v: &Vec9| (measure.transpose() * v)[0];
                if let Some(step) = uniform_step(taus) {
                    let p = expm(&(self.generator * C64::new(step, 0.0)))?;
                    let mut v = self.propagate(x, taus[0])?;
                    let mut out = Vec::with_capacity(taus.len());
                    for k in 0..taus.len() {
                        if k > 0 {
                            v = p * v;
                        }
                        out.push(dot(&v));
                    }
                    Ok(out)
                } else {
                    taus.iter().map(|&t| self.propagate(x, t).map(|v| dot(&v))).collect()
                }
            }
        }
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("time {t} must be finite and ≥ 0")));
    }
    Ok(())
}

fn check_grid(taus: &[f64]) -> Result<()> {
    if taus.is_empty() {
        return Err(Error::Domain("empty τ grid".into()));
    }
    for &t in taus {
        check_time(t)?;
    }
    if taus.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("τ grid must be strictly ascending".into()));
    }
    Ok(())
}

fn uniform_step(taus: &[f64]) -> Option<f64> {
    if taus.len() < 2 {
        return None;
    }
    let step = (taus[taus.len() - 1] - taus[0]) / (taus.len() - 1) as f64;
    let uniform = taus.windows(2).all(|w| ((w[1] - w[0]) - step).abs() <= 1e-9 * step.max(1.0));
    uniform.then_some(step)
}

/// Steady state from L with one row replaced by the trace constraint.
pub fn steady_state(l: &Liouvillian) -> Result<DensityMatrix> {
    let m = *l.matrix();
    let scale = crate::linalg::norm1(&m).max(1.0);
    let sv = m.singular_values();
    let null_dim = sv.iter().filter(|&&s| s <= 1e-9 * scale).count();
    if null_dim > 1 {
        return Err(Error::NonUniqueSteadyState(null_dim));
    }
    let mut a = m;
    let t = trace_functional(&Mat3::identity());
    a.set_row(0, &t.transpose());
    let mut rhs = Vec9::zeros();
    rhs[0] = C64::new(1.0, 0.0);
    let sol = a.lu().solve(&rhs).ok_or_else(|| Error::Numeric("steady-state system is singular".into()))?;
    let residual = (m * sol).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if residual > 1e-10 * scale {
        return Err(Error::Numeric(format!("steady-state residual {residual:.3e}")));
    }
    let rho = unvec(&sol);
    let herm = (rho + rho.adjoint()) * C64::new(0.5, 0.0);
    DensityMatrix::with_tolerance(herm, STEADY_POSITIVITY_TOL)
}

/// ρ(t) = exp(L t) ρ₀.
pub fn evolve(l: &Liouvillian, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    evolve_with(&Propagator::new(l), rho0, t)
}

pub fn evolve_with(prop: &Propagator, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    let v = prop.propagate(&vec(rho0.matrix()), t)?;
    DensityMatrix::with_tolerance(unvec(&v), PROPAGATION_TOL)
}

/// Sampled correlation function.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationTrace<T> {
    pub tau: Vec<f64>,
    pub values: Vec<T>,
    /// Steady-state denominator the samples were divided by.
    pub normalization: f64,
}

/// Steady state and emission moments shared by the correlation routines.
#[derive(Debug, Clone)]
pub struct EmissionStats {
    pub rho: DensityMatrix,
    pub sigma_minus: Operator3,
    /// ⟨Σ₊Σ₋⟩_ss
    pub intensity: f64,
    /// ⟨Σ₋⟩_ss
    pub mean_lowering: C64,
}

impl EmissionStats {
    pub fn new(l: &Liouvillian) -> Result<Self> {
        let rho = steady_state(l)?;
        let sigma_minus = lowering_operator(l.params().xi)?;
        let intensity = (sigma_minus.dagger() * sigma_minus).expect(&rho).re;
        let mean_lowering = sigma_minus.expect(&rho);
        Ok(EmissionStats { rho, sigma_minus, intensity, mean_lowering })
    }

    pub fn require_emission(&self) -> Result<()> {
        if !(self.intensity > EMISSION_THRESHOLD) {
            return Err(Error::NoEmission(self.intensity));
        }
        Ok(())
    }

    /// |⟨Σ₋⟩|² / ⟨Σ₊Σ₋⟩, the weight of the coherent (elastic) component.
    pub fn coherent_fraction(&self) -> f64 {
        self.mean_lowering.norm_sqr() / self.intensity
    }

    /// ⟨ΔΣ₊ΔΣ₋⟩ / ⟨Σ₊Σ₋⟩, the total incoherent weight.
    pub fn incoherent_fraction(&self) -> f64 {
        1.0 - self.coherent_fraction()
    }
}

/// Normalised first-order correlation g⁽¹⁾(τ) = ⟨Σ₊(τ)Σ₋(0)⟩ / ⟨Σ₊Σ₋⟩.
pub fn g1(l: &Liouvillian, taus: &[f64]) -> Result<CorrelationTrace<C64>> {
    g1_with(&Propagator::new(l), &EmissionStats::new(l)?, taus)
}

pub fn g1_with(prop: &Propagator, stats: &EmissionStats, taus: &[f64]) -> Result<CorrelationTrace<C64>> {
    stats.require_emission()?;
    let sm = stats.sigma_minus.0;
    let x = vec(&(sm * stats.rho.matrix()));
    let measure = trace_functional(&sm.adjoint());
    let raw = prop.regression(&x, &measure, taus)?;
    let n = stats.intensity;
    Ok(CorrelationTrace { tau: taus.to_vec(), values: raw.into_iter().map(|z| z / n).collect(), normalization: n })
}

/// Normalised second-order correlation
/// g⁽²⁾(τ) = ⟨Σ₊(0)Σ₊Σ₋(τ)Σ₋(0)⟩ / ⟨Σ₊Σ₋⟩².
pub fn g2(l: &Liouvillian, taus: &[f64]) -> Result<CorrelationTrace<f64>> {
    g2_with(&Propagator::new(l), &EmissionStats::new(l)?, taus)
}

pub fn g2_with(prop: &Propagator, stats: &EmissionStats, taus: &[f64]) -> Result<CorrelationTrace<f64>> {
    stats.require_emission()?;
    let sm = stats.sigma_minus.0;
    let x = vec(&(sm * stats.rho.matrix() * sm.adjoint()));
    let measure = trace_functional(&(sm.adjoint() * sm));
    let norm = stats.intensity.powi(2);
    real_trace(prop.regression(&x, &measure, taus)?, taus, norm)
}

/// Dressed-transition correlation
/// g⁽²⁾(A, 0; B, τ) = ⟨σ_A†(0) σ_B†σ_B(τ) σ_A(0)⟩ / (⟨σ_A†σ_A⟩⟨σ_B†σ_B⟩).
///
/// The dressed operators are built from the Liouvillian's parameters.
pub fn g2_cross(l: &Liouvillian, first: DressedOp, second: DressedOp, taus: &[f64]) -> Result<CorrelationTrace<f64>> {
    let rho = steady_state(l)?;
    g2_cross_with(&Propagator::new(l), l, &rho, first, second, taus)
}

pub fn g2_cross_with(
    prop: &Propagator,
    l: &Liouvillian,
    rho: &DensityMatrix,
    first: DressedOp,
    second: DressedOp,
    taus: &[f64],
) -> Result<CorrelationTrace<f64>> {
    let basis = diagonalize(l.params())?;
    let a = basis.operator(first).0;
    let b = basis.operator(second).0;
    let na = (a.adjoint() * a * rho.matrix()).trace().re;
    let nb = (b.adjoint() * b * rho.matrix()).trace().re;
    for n in [na, nb] {
        if !(n > EMISSION_THRESHOLD) {
            return Err(Error::NoEmission(n));
        }
    }
    let x = vec(&(a * rho.matrix() * a.adjoint()));
    let measure = trace_functional(&(b.adjoint() * b));
    real_trace(prop.regression(&x, &measure, taus)?, taus, na * nb)
}

fn real_trace(raw: Vec<C64>, taus: &[f64], norm: f64) -> Result<CorrelationTrace<f64>> {
    let values: Vec<f64> = raw.into_iter().map(|z| z.re / norm).collect();
    if let Some(bad) = values.iter().find(|v| !v.is_finite() || **v < -1e-8) {
        return Err(Error::Numeric(format!("g2 sample {bad:.3e} is negative or non-finite")));
    }
    Ok(CorrelationTrace { tau: taus.to_vec(), values, normalization: norm })
}

/// Uniform grid of `count` points on [start, stop].
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (count - 1) as f64;
            (0..count).map(|k| if k + 1 == count { stop } else { start + step * k as f64 }).collect()
        }
    }
}
